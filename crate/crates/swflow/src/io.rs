//! CSV output and the self-describing binary field container.
//!
//! Container layout: the 8-byte magic `SWFIELD1`, a little-endian `u64`
//! header length, a UTF-8 JSON header, then `len` little-endian `f64`
//! values. Values are site-major with `x4` fastest; complex components
//! are stored as interleaved real and imaginary parts.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use swcore::gauge::U1Connection;
use swcore::lattice::{FormField, LatticeManifold, ValueType};
use swcore::spin::{Chirality, SpinorField};

pub const MAGIC: &[u8; 8] = b"SWFIELD1";

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Scalar(Vec<f64>),
    Form(FormField),
    Spinor(SpinorField),
    Connection(U1Connection),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContainerHeader {
    pub kind: String,
    pub n: usize,
    pub lengths: [f64; 4],
    /// Real values per site.
    pub components: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value_type: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chirality: Option<String>,
    pub layout: String,
    pub config_hash: String,
    pub len: usize,
}

const LAYOUT: &str = "site-major, x4 fastest, little-endian f64";

fn invalid(msg: impl Into<String>) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.into())
}

fn value_type_name(v: ValueType) -> &'static str {
    match v {
        ValueType::Real => "real",
        ValueType::Imaginary => "imaginary",
    }
}

impl Field {
    fn describe(&self) -> (&'static str, Option<u8>, Option<String>, Option<String>, Vec<f64>) {
        match self {
            Field::Scalar(v) => ("scalar", None, None, None, v.clone()),
            Field::Form(f) => ("form", Some(f.degree), Some(value_type_name(f.value_type).into()), None, f.data.clone()),
            Field::Spinor(s) => ("spinor", None, None, Some(s.chirality.name().into()), s.to_real()),
            Field::Connection(c) => ("connection", Some(1), Some("imaginary".into()), None, c.a.clone()),
        }
    }
}

pub fn write_container(path: &Path, m: &LatticeManifold, field: &Field, config_hash: &str) -> io::Result<()> {
    let (kind, degree, value_type, chirality, data) = field.describe();
    let header = ContainerHeader {
        kind: kind.into(),
        n: m.n,
        lengths: m.lengths,
        components: data.len() / m.n_sites(),
        degree,
        value_type,
        chirality,
        layout: LAYOUT.into(),
        config_hash: config_hash.into(),
        len: data.len(),
    };
    let json = serde_json::to_vec(&header).map_err(|e| invalid(e.to_string()))?;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&(json.len() as u64).to_le_bytes())?;
    w.write_all(&json)?;
    for x in &data {
        w.write_all(&x.to_le_bytes())?;
    }
    w.flush()
}

pub fn read_container(path: &Path) -> io::Result<(ContainerHeader, Field)> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    decode_container(&bytes)
}

pub fn decode_container(bytes: &[u8]) -> io::Result<(ContainerHeader, Field)> {
    if bytes.len() < 16 || &bytes[..8] != MAGIC {
        return Err(invalid("not a field container"));
    }
    let hlen = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes")) as usize;
    let body = bytes.get(16..16usize.saturating_add(hlen)).ok_or_else(|| invalid("truncated header"))?;
    let header: ContainerHeader = serde_json::from_slice(body).map_err(|e| invalid(e.to_string()))?;
    let payload = &bytes[16 + hlen..];
    if payload.len() != header.len * 8 {
        return Err(invalid(format!("payload holds {} bytes, header promises {}", payload.len(), header.len * 8)));
    }
    let sites = header.n.pow(4);
    if header.components * sites != header.len {
        return Err(invalid("component count disagrees with lattice size"));
    }
    let data: Vec<f64> = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    let field = match header.kind.as_str() {
        "scalar" => Field::Scalar(data),
        "form" => {
            let degree = header.degree.ok_or_else(|| invalid("form without degree"))?;
            let vt = match header.value_type.as_deref() {
                Some("real") => ValueType::Real,
                Some("imaginary") => ValueType::Imaginary,
                _ => return Err(invalid("unknown value type")),
            };
            let f = FormField::from_data(degree, vt, data);
            if f.ncomp() != header.components {
                return Err(invalid("degree disagrees with component count"));
            }
            Field::Form(f)
        }
        "spinor" => {
            let ch = match header.chirality.as_deref() {
                Some("plus") => Chirality::Plus,
                Some("minus") => Chirality::Minus,
                Some("full") => Chirality::Full,
                _ => return Err(invalid("unknown chirality")),
            };
            if header.components != 2 * ch.comps() {
                return Err(invalid("chirality disagrees with component count"));
            }
            Field::Spinor(SpinorField::from_real(ch, &data))
        }
        "connection" => Field::Connection(U1Connection { a: data }),
        k => return Err(invalid(format!("unknown field kind `{k}`"))),
    };
    Ok((header, field))
}

/// Per-site CSV: `site,x1,x2,x3,x4,<columns...>`.
pub fn write_field_csv(path: &Path, m: &LatticeManifold, columns: &[&str], values: &[f64], config_hash: &str) -> io::Result<()> {
    let k = columns.len();
    if values.len() != k * m.n_sites() {
        return Err(invalid("column count disagrees with field size"));
    }
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# config_hash={config_hash}")?;
    writeln!(w, "site,x1,x2,x3,x4,{}", columns.join(","))?;
    for s in 0..m.n_sites() {
        let x = m.position(s);
        write!(w, "{s},{},{},{},{}", x[0], x[1], x[2], x[3])?;
        for v in &values[s * k..(s + 1) * k] {
            write!(w, ",{v}")?;
        }
        writeln!(w)?;
    }
    w.flush()
}

/// Generic table CSV with a hash comment line.
pub fn write_table_csv(path: &Path, header: &[&str], rows: &[Vec<String>], config_hash: &str) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# config_hash={config_hash}")?;
    writeln!(w, "{}", header.join(","))?;
    for r in rows {
        writeln!(w, "{}", r.join(","))?;
    }
    w.flush()
}

//! U(1) link connections on the trivial determinant line.
//!
//! The link variable `a_i(x)` parallel-transports spinors by `e^{-i h a_i}`,
//! so spinors feel the connection form `-i a` and the spinor curvature is
//! `-i curl a`. The determinant line carries twice that: the curvature
//! returned by [`curvature`] is `F_A = -2i curl a`, stored as the real
//! coefficient of `i`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::clifford::{hodge_star, two_form_norm_sq, PAIRS};
use crate::lattice::{self, FormField, LatticeManifold, ValueType};
use crate::real::{cis, floor};
use crate::spin::SpinorField;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct U1Connection {
    /// `a_i(x)` at index `site * 4 + axis`.
    pub a: Vec<f64>,
}

impl U1Connection {
    pub fn zero(m: &LatticeManifold) -> Self {
        U1Connection { a: vec![0.0; m.n_sites() * 4] }
    }

    pub fn constant(m: &LatticeManifold, c: [f64; 4]) -> Self {
        let mut a = vec![0.0; m.n_sites() * 4];
        for (k, v) in a.iter_mut().enumerate() {
            *v = c[k % 4];
        }
        U1Connection { a }
    }

    pub fn as_form(&self) -> FormField {
        FormField::from_data(1, ValueType::Imaginary, self.a.clone())
    }

    pub fn from_form(f: &FormField) -> Self {
        U1Connection { a: f.data.clone() }
    }

    pub fn check(&self, m: &LatticeManifold) -> Result<()> {
        if self.a.len() != m.n_sites() * 4 {
            return Err(Error::Shape(alloc::format!("connection has {} links, expected {}", self.a.len(), m.n_sites() * 4)));
        }
        if self.a.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("connection"));
        }
        Ok(())
    }
}

/// `g = e^{iΘ}` with `Θ(x) = θ(x) + 2π Σ_a w_a x_a / L_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeTransform {
    pub theta: Vec<f64>,
    pub winding: [i64; 4],
}

impl GaugeTransform {
    pub fn identity(m: &LatticeManifold) -> Self {
        GaugeTransform { theta: vec![0.0; m.n_sites()], winding: [0; 4] }
    }

    /// Full phase `Θ(x)` at a site.
    pub fn phase(&self, m: &LatticeManifold, site: usize) -> f64 {
        let x = m.position(site);
        let mut t = self.theta[site];
        for a in 0..4 {
            t += 2.0 * PI * self.winding[a] as f64 * x[a] / m.lengths[a];
        }
        t
    }
}

/// Curvature `F_A = -2i curl a` of the determinant line (coefficients of `i`).
pub fn curvature(m: &LatticeManifold, conn: &U1Connection) -> FormField {
    let mut f = lattice::d(m, &conn.as_form()).expect("degree 1");
    f.data.iter_mut().for_each(|x| *x *= -2.0);
    f.value_type = ValueType::Imaginary;
    f
}

/// Pointwise self-dual projection `½(F + ⋆F)`.
pub fn self_dual_part(f: &FormField) -> Result<FormField> {
    dual_split(f, 1.0)
}

/// Pointwise anti-self-dual projection `½(F - ⋆F)`.
pub fn anti_self_dual_part(f: &FormField) -> Result<FormField> {
    dual_split(f, -1.0)
}

fn dual_split(f: &FormField, sign: f64) -> Result<FormField> {
    if f.degree != 2 {
        return Err(Error::Degree(f.degree));
    }
    let mut out = f.clone();
    for (dst, src) in out.data.chunks_exact_mut(6).zip(f.data.chunks_exact(6)) {
        let v: [f64; 6] = src.try_into().unwrap();
        let st = hodge_star(&v);
        for p in 0..6 {
            dst[p] = 0.5 * (v[p] + sign * st[p]);
        }
    }
    Ok(out)
}

/// Average of the four plaquettes of each orientation touching a site.
pub fn site_average(m: &LatticeManifold, f: &FormField) -> Vec<[f64; 6]> {
    (0..m.n_sites())
        .map(|s| {
            let mut out = [0.0; 6];
            for (p, &(i, j)) in PAIRS.iter().enumerate() {
                let si = m.bwd(s, i);
                let sj = m.bwd(s, j);
                let sij = m.bwd(si, j);
                out[p] = 0.25 * (f.at(s, p) + f.at(si, p) + f.at(sj, p) + f.at(sij, p));
            }
            out
        })
        .collect()
}

/// Apply a gauge transformation to a connection and a spinor.
pub fn gauge_transform(
    m: &LatticeManifold,
    g: &GaugeTransform,
    conn: &U1Connection,
    phi: &SpinorField,
) -> Result<(U1Connection, SpinorField)> {
    let sites = m.n_sites();
    if g.theta.len() != sites || conn.a.len() != sites * 4 || phi.sites() != sites {
        return Err(Error::Shape("gauge transform operands disagree in size".into()));
    }
    let mut a = conn.a.clone();
    for s in 0..sites {
        for ax in 0..4 {
            let t = m.fwd(s, ax);
            a[s * 4 + ax] += (g.theta[t] - g.theta[s]) / m.spacing[ax] + 2.0 * PI * g.winding[ax] as f64 / m.lengths[ax];
        }
    }
    let comps = phi.comps();
    let mut values = phi.values.clone();
    for s in 0..sites {
        let z = cis(g.phase(m, s));
        for c in 0..comps {
            values[s * comps + c] *= z;
        }
    }
    Ok((U1Connection { a }, SpinorField { chirality: phi.chirality, values }))
}

/// Harmonic representative of a connection and its Jacobian-torus point.
#[derive(Debug, Clone)]
pub struct HarmonicProjection {
    pub connection: U1Connection,
    pub jacobian_coord: [f64; 4],
    pub coefficients: [f64; 4],
}

pub fn harmonic_project(m: &LatticeManifold, conn: &U1Connection) -> Result<HarmonicProjection> {
    let h = lattice::hodge_decompose(m, &conn.as_form())?;
    let coefficients = h.harmonic_coefficients;
    Ok(HarmonicProjection {
        connection: U1Connection::from_form(&h.harmonic),
        jacobian_coord: jacobian_coordinate(m, &coefficients),
        coefficients,
    })
}

/// `frac(c_a L_a / 2π)`, with values that round to 1 wrapped to 0.
pub fn jacobian_coordinate(m: &LatticeManifold, coefficients: &[f64; 4]) -> [f64; 4] {
    [0, 1, 2, 3].map(|a| wrap_unit(coefficients[a] * m.lengths[a] / (2.0 * PI)))
}

pub fn wrap_unit(t: f64) -> f64 {
    let f = t - floor(t);
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Harmonic connection with the given Jacobian coordinate.
pub fn connection_at(m: &LatticeManifold, coord: [f64; 4]) -> Result<U1Connection> {
    let basis = lattice::harmonic_basis(m)?;
    let mut a = vec![0.0; m.n_sites() * 4];
    for k in 0..4 {
        let c = 2.0 * PI * coord[k] / m.lengths[k];
        crate::linalg::axpy(c, &basis[k].data, &mut a);
    }
    Ok(U1Connection { a })
}

/// `N = (1/4π²) ∫ (|F⁺|² - |F⁻|²)` using a shifted (cup) product of
/// plaquettes, which is an exact lattice total derivative.
pub fn topological_number(m: &LatticeManifold, f: &FormField) -> f64 {
    // (p, q, sign): F_p(x) F_q(x + e_i + e_j) with p = (i, j)
    const TERMS: [(usize, usize, f64); 6] = [(0, 5, 1.0), (5, 0, 1.0), (1, 4, -1.0), (4, 1, -1.0), (2, 3, 1.0), (3, 2, 1.0)];
    let mut acc = 0.0;
    for s in 0..m.n_sites() {
        for &(p, q, sign) in TERMS.iter() {
            let (i, j) = PAIRS[p];
            let t = m.fwd(m.fwd(s, i), j);
            acc += sign * f.at(s, p) * f.at(t, q);
        }
    }
    acc * m.plaquette_weight / (4.0 * PI * PI)
}

/// Pointwise `|F⁺|² - |F⁻|²` summed with plaquette weights (unshifted), the
/// naive density whose integral is only zero up to discretization error.
pub fn naive_topological_density(m: &LatticeManifold, f: &FormField) -> f64 {
    let sd = self_dual_part(f).unwrap();
    let asd = anti_self_dual_part(f).unwrap();
    let mut acc = 0.0;
    for s in 0..m.n_sites() {
        let a: [f64; 6] = sd.data[s * 6..s * 6 + 6].try_into().unwrap();
        let b: [f64; 6] = asd.data[s * 6..s * 6 + 6].try_into().unwrap();
        acc += 0.5 * (two_form_norm_sq(&a) - two_form_norm_sq(&b));
    }
    acc * m.plaquette_weight
}

/// Mean holonomy `Σ_line h a_a` over all lines parallel to each axis.
pub fn mean_holonomy(m: &LatticeManifold, conn: &U1Connection) -> [f64; 4] {
    let sites = m.n_sites() as f64;
    [0, 1, 2, 3].map(|a| {
        let total: f64 = (0..m.n_sites()).map(|s| conn.a[s * 4 + a]).sum();
        total * m.spacing[a] * m.n as f64 / sites
    })
}

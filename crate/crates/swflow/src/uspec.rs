//! Conformal-factor mini-language.
//!
//! A spec is either a preset or a sum of cosine terms:
//!
//! ```text
//! flat
//! bump:0.3                     # 0.3*cos(2*pi*x1)
//! two-bump:0.5
//! 0.5*cos(2*pi*(x1 + 0.25)) - 0.1*cos(2*pi*(2*x2 - x3))
//! ```
//!
//! Coordinates `x1..x4` are fractions of the periods, so integer wave
//! numbers keep `u` periodic. Non-integer wave numbers are rejected.

use std::f64::consts::PI;
use std::fmt;

use swcore::lattice;

#[derive(Debug, Clone, PartialEq)]
pub struct CosTerm {
    pub amp: f64,
    pub k: [i64; 4],
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum USpec {
    Flat,
    Bump(f64),
    TwoBump(f64),
    Sum(Vec<CosTerm>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("u-spec: {msg} at byte {pos}")]
pub struct ParseError {
    pub msg: String,
    pub pos: usize,
}

impl USpec {
    pub fn parse(s: &str) -> Result<Self, ParseError> {
        let t = s.trim();
        if t == "flat" || t == "0" {
            return Ok(USpec::Flat);
        }
        for (name, ctor) in [("bump:", USpec::Bump as fn(f64) -> USpec), ("two-bump:", USpec::TwoBump)] {
            if let Some(rest) = t.strip_prefix(name) {
                let eps = rest.trim().parse::<f64>().map_err(|_| ParseError { msg: format!("bad {name} amplitude"), pos: name.len() })?;
                if !eps.is_finite() {
                    return Err(ParseError { msg: "amplitude not finite".into(), pos: name.len() });
                }
                return Ok(ctor(eps));
            }
        }
        let mut p = Parser { s: t.as_bytes(), i: 0 };
        let terms = p.sum()?;
        Ok(USpec::Sum(terms))
    }

    /// Evaluate at a physical point of the torus with the given periods.
    pub fn eval(&self, x: [f64; 4], lengths: [f64; 4]) -> f64 {
        match self {
            USpec::Flat => 0.0,
            USpec::Bump(eps) => lattice::cosine_profile(*eps, 0, lengths[0])(x),
            USpec::TwoBump(eps) => lattice::two_bump_profile(*eps, lengths)(x),
            USpec::Sum(terms) => terms
                .iter()
                .map(|t| {
                    let arg: f64 = (0..4).map(|a| t.k[a] as f64 * x[a] / lengths[a]).sum::<f64>() + t.phase;
                    t.amp * (2.0 * PI * arg).cos()
                })
                .sum(),
        }
    }

    pub fn closure(&self, lengths: [f64; 4]) -> impl Fn([f64; 4]) -> f64 + '_ {
        move |x| self.eval(x, lengths)
    }
}

impl fmt::Display for USpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            USpec::Flat => write!(f, "flat"),
            USpec::Bump(e) => write!(f, "bump:{e}"),
            USpec::TwoBump(e) => write!(f, "two-bump:{e}"),
            USpec::Sum(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    let sep = match (i, t.amp.is_sign_negative()) {
                        (0, false) => "",
                        (0, true) => "-",
                        (_, false) => " + ",
                        (_, true) => " - ",
                    };
                    write!(f, "{sep}{}*cos(2*pi*(", t.amp.abs())?;
                    let mut first = true;
                    for a in (0..4).filter(|a| t.k[*a] != 0) {
                        let s = match (first, t.k[a] < 0) {
                            (true, false) => "",
                            (true, true) => "-",
                            (false, false) => " + ",
                            (false, true) => " - ",
                        };
                        write!(f, "{s}{}*x{}", t.k[a].abs(), a + 1)?;
                        first = false;
                    }
                    let s = match (first, t.phase.is_sign_negative()) {
                        (true, false) => "",
                        (true, true) => "-",
                        (false, false) => " + ",
                        (false, true) => " - ",
                    };
                    write!(f, "{s}{}))", t.phase.abs())?;
                }
                Ok(())
            }
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T, ParseError> {
        Err(ParseError { msg: msg.into(), pos: self.i })
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn eat(&mut self, lit: &str) -> bool {
        self.ws();
        if self.s[self.i..].starts_with(lit.as_bytes()) {
            self.i += lit.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, lit: &str) -> Result<(), ParseError> {
        if self.eat(lit) {
            Ok(())
        } else {
            self.err(&format!("expected `{lit}`"))
        }
    }

    fn number(&mut self) -> Option<f64> {
        self.ws();
        let start = self.i;
        while self.i < self.s.len() && (self.s[self.i].is_ascii_digit() || b".eE".contains(&self.s[self.i]) || (self.i > start && b"+-".contains(&self.s[self.i]) && b"eE".contains(&self.s[self.i - 1]))) {
            self.i += 1;
        }
        let v = std::str::from_utf8(&self.s[start..self.i]).ok()?.parse::<f64>().ok();
        if v.is_none() {
            self.i = start;
        }
        v
    }

    fn sign(&mut self) -> Option<f64> {
        if self.eat("+") {
            Some(1.0)
        } else if self.eat("-") {
            Some(-1.0)
        } else {
            None
        }
    }

    fn sum(&mut self) -> Result<Vec<CosTerm>, ParseError> {
        let mut out = Vec::new();
        let mut sgn = self.sign().unwrap_or(1.0);
        loop {
            let mut t = self.term()?;
            t.amp *= sgn;
            out.push(t);
            self.ws();
            if self.i == self.s.len() {
                return Ok(out);
            }
            sgn = match self.sign() {
                Some(s) => s,
                None => return self.err("expected `+` or `-` between terms"),
            };
        }
    }

    // [amp '*'] 'cos(2*pi*' ( linear | '(' linear ')' ) ')'
    fn term(&mut self) -> Result<CosTerm, ParseError> {
        let amp = match self.number() {
            Some(a) => {
                self.expect("*")?;
                a
            }
            None => 1.0,
        };
        self.expect("cos(")?;
        self.expect("2")?;
        self.expect("*")?;
        self.expect("pi")?;
        self.expect("*")?;
        let paren = self.eat("(");
        let (k, phase) = self.linear()?;
        if paren {
            self.expect(")")?;
        }
        self.expect(")")?;
        if !amp.is_finite() || !phase.is_finite() {
            return self.err("non-finite coefficient");
        }
        Ok(CosTerm { amp, k, phase })
    }

    // sum of `c*xj`, `xj` and constants
    fn linear(&mut self) -> Result<([i64; 4], f64), ParseError> {
        let mut k = [0i64; 4];
        let mut phase = 0.0;
        let mut sgn = self.sign().unwrap_or(1.0);
        loop {
            let c = self.number();
            let has_var = if c.is_some() { self.eat("*") } else { true };
            if has_var {
                if !self.eat("x") {
                    return self.err("expected coordinate x1..x4");
                }
                let d = self.s.get(self.i).copied().unwrap_or(0);
                if !(b'1'..=b'4').contains(&d) {
                    return self.err("coordinate index must be 1..4");
                }
                self.i += 1;
                let c = sgn * c.unwrap_or(1.0);
                if c.fract() != 0.0 || c.abs() > 1e6 {
                    return self.err("wave numbers must be integers");
                }
                k[(d - b'1') as usize] += c as i64;
            } else {
                phase += sgn * c.unwrap_or(0.0);
            }
            match self.sign() {
                Some(s) => sgn = s,
                None => return Ok((k, phase)),
            }
        }
    }
}

//! Clifford algebra of Euclidean 4-space in a chiral basis.
//!
//! Gammas are anti-Hermitian with `γ_a γ_b + γ_b γ_a = -2 δ_ab`. The chirality
//! operator `γ_1γ_2γ_3γ_4` is `diag(1, 1, -1, -1)`, so `proj_plus = ½(I - Γ)`
//! selects the lower two components. Positive spinors are stored as
//! 2-vectors in that block.

use crate::real::sqrt;
use crate::{Complex64, Error, Result};

pub type Mat4 = [[Complex64; 4]; 4];
pub type Mat2 = [[Complex64; 2]; 2];
pub type Spinor4 = [Complex64; 4];
pub type Spinor2 = [Complex64; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Ordered pairs `(i, j)`, `i < j`, used for 2-form components everywhere.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Flat Hodge star on pair components: `(⋆F)_p = STAR_SIGN[p] * F_{STAR_INDEX[p]}`.
pub const STAR_INDEX: [usize; 6] = [5, 4, 3, 2, 1, 0];
pub const STAR_SIGN: [f64; 6] = [1.0, -1.0, 1.0, 1.0, -1.0, 1.0];

/// Position of the pair `(i, j)` (either order) in [`PAIRS`], with the sign
/// picked up by reordering. Returns `None` on the diagonal.
pub fn pair_index(i: usize, j: usize) -> Option<(usize, f64)> {
    if i == j {
        return None;
    }
    let (a, b, s) = if i < j { (i, j, 1.0) } else { (j, i, -1.0) };
    let p = PAIRS.iter().position(|&q| q == (a, b))?;
    Some((p, s))
}

pub fn mat_zero() -> Mat4 {
    [[ZERO; 4]; 4]
}

pub fn mat_identity() -> Mat4 {
    let mut m = mat_zero();
    for (k, row) in m.iter_mut().enumerate() {
        row[k] = ONE;
    }
    m
}

pub fn mat_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut c = mat_zero();
    for i in 0..4 {
        for j in 0..4 {
            let mut s = ZERO;
            for k in 0..4 {
                s += a[i][k] * b[k][j];
            }
            c[i][j] = s;
        }
    }
    c
}

pub fn mat_add(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut c = *a;
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] += b[i][j];
        }
    }
    c
}

pub fn mat_scale(a: &Mat4, s: Complex64) -> Mat4 {
    let mut c = *a;
    for row in c.iter_mut() {
        for x in row.iter_mut() {
            *x *= s;
        }
    }
    c
}

pub fn mat_sub(a: &Mat4, b: &Mat4) -> Mat4 {
    mat_add(a, &mat_scale(b, -ONE))
}

pub fn mat_commutator(a: &Mat4, b: &Mat4) -> Mat4 {
    mat_sub(&mat_mul(a, b), &mat_mul(b, a))
}

pub fn mat_adjoint(a: &Mat4) -> Mat4 {
    let mut c = mat_zero();
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = a[j][i].conj();
        }
    }
    c
}

pub fn mat_apply(a: &Mat4, v: &Spinor4) -> Spinor4 {
    let mut out = [ZERO; 4];
    for i in 0..4 {
        for k in 0..4 {
            out[i] += a[i][k] * v[k];
        }
    }
    out
}

/// Largest entry modulus, used as a matrix distance in tests.
pub fn mat_max_abs(a: &Mat4) -> f64 {
    a.iter()
        .flat_map(|r| r.iter())
        .fold(0.0, |m, z| f64::max(m, z.norm()))
}

pub fn mat_trace(a: &Mat4) -> Complex64 {
    a[0][0] + a[1][1] + a[2][2] + a[3][3]
}

/// Extract a 2×2 block: rows `2r..2r+2`, columns `2c..2c+2`.
pub fn block(a: &Mat4, r: usize, c: usize) -> Mat2 {
    let mut b = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            b[i][j] = a[2 * r + i][2 * c + j];
        }
    }
    b
}

#[inline]
pub fn mat2_apply(a: &Mat2, v: &Spinor2) -> Spinor2 {
    [
        a[0][0] * v[0] + a[0][1] * v[1],
        a[1][0] * v[0] + a[1][1] * v[1],
    ]
}

/// Fixed gamma-matrix convention with chirality projectors.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSet {
    pub gamma: [Mat4; 4],
    pub chirality: Mat4,
    pub proj_plus: Mat4,
    pub proj_minus: Mat4,
}

impl GammaSet {
    pub fn new() -> Self {
        // γ_a = [[0, σ_a], [-σ_a, 0]] for a = 1..3, γ_4 = [[0, iI], [iI, 0]].
        let pauli: [Mat2; 3] = [
            [[ZERO, ONE], [ONE, ZERO]],
            [[ZERO, -I], [I, ZERO]],
            [[ONE, ZERO], [ZERO, -ONE]],
        ];
        let mut gamma = [mat_zero(); 4];
        for (a, s) in pauli.iter().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    gamma[a][i][2 + j] = s[i][j];
                    gamma[a][2 + i][j] = -s[i][j];
                }
            }
        }
        for i in 0..2 {
            gamma[3][i][2 + i] = I;
            gamma[3][2 + i][i] = I;
        }
        let chirality = mat_mul(&mat_mul(&gamma[0], &gamma[1]), &mat_mul(&gamma[2], &gamma[3]));
        let id = mat_identity();
        let half = Complex64::new(0.5, 0.0);
        let proj_plus = mat_scale(&mat_sub(&id, &chirality), half);
        let proj_minus = mat_scale(&mat_add(&id, &chirality), half);
        GammaSet { gamma, chirality, proj_plus, proj_minus }
    }

    /// Embed a positive 2-spinor into the 4-component representation.
    pub fn embed_plus(v: &Spinor2) -> Spinor4 {
        [ZERO, ZERO, v[0], v[1]]
    }

    /// Embed a negative 2-spinor into the 4-component representation.
    pub fn embed_minus(v: &Spinor2) -> Spinor4 {
        [v[0], v[1], ZERO, ZERO]
    }

    /// Block of `γ_a` mapping positive to negative spinors.
    pub fn plus_to_minus(&self, a: usize) -> Mat2 {
        block(&self.gamma[a], 0, 1)
    }

    /// Block of `γ_a` mapping negative to positive spinors.
    pub fn minus_to_plus(&self, a: usize) -> Mat2 {
        block(&self.gamma[a], 1, 0)
    }

    /// `γ_i γ_j` restricted to positive spinors.
    pub fn product_plus(&self, i: usize, j: usize) -> Mat2 {
        block(&mat_mul(&self.gamma[i], &self.gamma[j]), 1, 1)
    }
}

impl Default for GammaSet {
    fn default() -> Self {
        Self::new()
    }
}

/// Element of so(4), stored as the antisymmetric matrix `b` acting on
/// column vectors: `e_k ∧ e_l` has `b[k][l] = 1`, `b[l][k] = -1`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CliffordBivector {
    pub b: [[f64; 4]; 4],
}

impl CliffordBivector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `e_k ∧ e_l` with 1-based indices.
    pub fn wedge(k: usize, l: usize) -> Result<Self> {
        let (k, l) = check_pair(k, l)?;
        let mut b = [[0.0; 4]; 4];
        b[k][l] = 1.0;
        b[l][k] = -1.0;
        Ok(CliffordBivector { b })
    }

    /// Antisymmetric part of an arbitrary real matrix.
    pub fn from_matrix(m: &[[f64; 4]; 4]) -> Self {
        let mut b = [[0.0; 4]; 4];
        for k in 0..4 {
            for l in 0..4 {
                b[k][l] = 0.5 * (m[k][l] - m[l][k]);
            }
        }
        CliffordBivector { b }
    }

    pub fn apply(&self, v: &[f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for k in 0..4 {
            for l in 0..4 {
                out[k] += self.b[k][l] * v[l];
            }
        }
        out
    }

    /// Lie bracket of so(4) (matrix commutator).
    pub fn bracket(&self, other: &Self) -> Self {
        let mut c = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    c[i][j] += self.b[i][k] * other.b[k][j] - other.b[i][k] * self.b[k][j];
                }
            }
        }
        CliffordBivector { b: c }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut c = self.b;
        for i in 0..4 {
            for j in 0..4 {
                c[i][j] += other.b[i][j];
            }
        }
        CliffordBivector { b: c }
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut c = self.b;
        for row in c.iter_mut() {
            for x in row.iter_mut() {
                *x *= s;
            }
        }
        CliffordBivector { b: c }
    }
}

fn check_axis(k: usize) -> Result<usize> {
    if (1..=4).contains(&k) {
        Ok(k - 1)
    } else {
        Err(Error::AxisOutOfRange { index: k })
    }
}

fn check_pair(k: usize, l: usize) -> Result<(usize, usize)> {
    let (k0, l0) = (check_axis(k)?, check_axis(l)?);
    if k0 == l0 {
        return Err(Error::DegenerateWedge(k));
    }
    Ok((k0, l0))
}

/// `(e_k ∧ e_l)(v) = ⟨v, e_l⟩ e_k - ⟨v, e_k⟩ e_l`, 1-based indices.
pub fn wedge_action(k: usize, l: usize, v: &[f64; 4]) -> Result<[f64; 4]> {
    let (k0, l0) = check_pair(k, l)?;
    let mut out = [0.0; 4];
    out[k0] += v[l0];
    out[l0] -= v[k0];
    Ok(out)
}

/// Lift so(4) → spin(4) inside Cl(4).
///
/// With `γ² = -1` the lift that is a Lie algebra homomorphism and satisfies
/// `[Θ(X), c(v)] = c(Xv)` sends `e_k ∧ e_l` to `½ γ_l γ_k = -½ γ_k γ_l`.
pub fn theta_iso(gs: &GammaSet, b: &CliffordBivector) -> Mat4 {
    let mut out = mat_zero();
    for &(k, l) in PAIRS.iter() {
        let c = b.b[k][l];
        if c != 0.0 {
            let gg = mat_mul(&gs.gamma[l], &gs.gamma[k]);
            out = mat_add(&out, &mat_scale(&gg, Complex64::new(0.5 * c, 0.0)));
        }
    }
    out
}

/// Clifford multiplication `(Σ_a x_a γ_a) ψ`.
pub fn clifford_action(gs: &GammaSet, x: &[f64; 4], psi: &Spinor4) -> Spinor4 {
    let mut out = [ZERO; 4];
    for a in 0..4 {
        if x[a] != 0.0 {
            let g = mat_apply(&gs.gamma[a], psi);
            for k in 0..4 {
                out[k] += g[k] * x[a];
            }
        }
    }
    out
}

/// Action of an imaginary 2-form `i·F` (coefficients `F_p` over [`PAIRS`])
/// on a positive spinor: `Σ_{i<j} i F_ij γ_i γ_j v`.
pub fn two_form_action_plus(gs: &GammaSet, f: &[f64; 6], v: &Spinor2) -> Spinor2 {
    let mut out = [ZERO; 2];
    for (p, &(i, j)) in PAIRS.iter().enumerate() {
        if f[p] != 0.0 {
            let w = mat2_apply(&gs.product_plus(i, j), v);
            out[0] += I * f[p] * w[0];
            out[1] += I * f[p] * w[1];
        }
    }
    out
}

/// Quadratic map `σ(v)` on positive spinors, as the imaginary parts of its
/// six pair components (the form itself is `i` times the returned values).
///
/// `σ_ij(v) = -¼ ⟨γ_i γ_j v, v⟩`. With this scale `|σ(v)|² = ¼|v|⁴` in the
/// tensor norm, `½ σ(v)·v = ¼|v|² v`, and `σ` is self-dual.
pub fn sigma_map(gs: &GammaSet, v: &Spinor2) -> [f64; 6] {
    let mut out = [0.0; 6];
    for (p, &(i, j)) in PAIRS.iter().enumerate() {
        let w = mat2_apply(&gs.product_plus(i, j), v);
        let ip = w[0] * v[0].conj() + w[1] * v[1].conj();
        out[p] = -0.25 * ip.im;
    }
    out
}

/// Tensor norm `Σ_{i,j} |F_ij|² = 2 Σ_{i<j} |F_ij|²` of a 2-form.
pub fn two_form_norm_sq(f: &[f64; 6]) -> f64 {
    2.0 * f.iter().map(|x| x * x).sum::<f64>()
}

pub fn hodge_star(f: &[f64; 6]) -> [f64; 6] {
    let mut out = [0.0; 6];
    for p in 0..6 {
        out[p] = STAR_SIGN[p] * f[STAR_INDEX[p]];
    }
    out
}

pub fn spinor_norm(v: &[Complex64]) -> f64 {
    sqrt(v.iter().map(|z| z.norm_sqr()).sum())
}

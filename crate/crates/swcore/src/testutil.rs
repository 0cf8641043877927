use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::functional::{Configuration, Tangent};
use crate::gauge::U1Connection;
use crate::lattice::{build_torus, LatticeManifold};
use crate::spin::{Chirality, SpinorField};
use crate::Complex64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn bumpy(n: usize) -> LatticeManifold {
    build_torus(n, [1.0; 4], |x| 0.2 * libm::cos(2.0 * PI * x[0]) + 0.1 * libm::sin(2.0 * PI * (x[1] - x[2]))).unwrap()
}

pub fn flat(n: usize) -> LatticeManifold {
    build_torus(n, [1.0; 4], |_| 0.0).unwrap()
}

pub fn random_plus(m: &LatticeManifold, r: &mut ChaCha8Rng, amp: f64) -> SpinorField {
    let mut f = SpinorField::zeros(m, Chirality::Plus);
    f.values.iter_mut().for_each(|z| *z = Complex64::new(r.gen_range(-amp..amp), r.gen_range(-amp..amp)));
    f
}

pub fn random_conn(m: &LatticeManifold, r: &mut ChaCha8Rng, amp: f64) -> U1Connection {
    U1Connection { a: (0..m.n_sites() * 4).map(|_| r.gen_range(-amp..amp)).collect() }
}

pub fn random_config(m: &LatticeManifold, r: &mut ChaCha8Rng) -> Configuration {
    Configuration { conn: random_conn(m, r, 1.0), phi: random_plus(m, r, 1.0) }
}

pub fn random_tangent(m: &LatticeManifold, r: &mut ChaCha8Rng) -> Tangent {
    Tangent { theta: (0..m.n_sites() * 4).map(|_| r.gen_range(-1.0..1.0)).collect(), v: random_plus(m, r, 1.0) }
}

/// Smooth low-mode configuration for convergence studies.
pub fn smooth_config(m: &LatticeManifold) -> Configuration {
    let mut conn = U1Connection::zero(m);
    let mut phi = SpinorField::zeros(m, Chirality::Plus);
    for s in 0..m.n_sites() {
        let x = m.position(s);
        conn.a[s * 4] = 0.5 * libm::sin(2.0 * PI * x[1]);
        conn.a[s * 4 + 2] = 0.3 * libm::cos(2.0 * PI * x[3]);
        let t = 2.0 * PI * x[0];
        phi.set2(s, [Complex64::new(1.0 + 0.3 * libm::cos(t), 0.2 * libm::sin(2.0 * PI * x[2])), Complex64::new(0.1, 0.4 * libm::sin(t))]);
    }
    Configuration { conn, phi }
}

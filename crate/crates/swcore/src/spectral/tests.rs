use super::*;
use crate::functional::module_norm;
use crate::gauge::{gauge_transform, GaugeTransform};
use crate::lattice::{build_torus, cosine_profile};
use crate::testutil::*;
use core::f64::consts::PI;
use rand::Rng;

struct Skewed(usize);

impl SymmetricOperator for Skewed {
    fn dim(&self) -> usize {
        self.0
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        for i in 0..self.0 {
            y[i] = 2.0 * x[i] + x[(i + 1) % self.0];
        }
        Ok(())
    }
}

fn dense_opts() -> EigenOptions {
    EigenOptions { choice: SolverChoice::Dense, ..EigenOptions::default() }
}

#[test]
fn rejects_non_symmetric() {
    let op = Skewed(20);
    assert!(matches!(lowest_eigenvalue(&op, &EigenOptions::default(), None), Err(Error::NotSymmetric { .. })));
}

#[test]
fn iterative_matches_dense_scalar() {
    let m = build_torus(4, [1.0; 4], cosine_profile(0.5, 0, 1.0)).unwrap();
    let op = ScalarOperator::new(&m);
    let d = lowest_eigenvalue(&op, &dense_opts(), None).unwrap();
    let it = lowest_eigenvalue(&op, &EigenOptions { tol: 1e-9, ..EigenOptions::default() }, None).unwrap();
    assert!(d.eigenvalue < 0.0);
    assert!((d.eigenvalue - it.eigenvalue).abs() <= 1e-8 * d.eigenvalue.abs(), "{} {}", d.eigenvalue, it.eigenvalue);
    assert!(it.residual <= 1e-9 && d.residual < 1e-8);
}

#[test]
fn flat_spectra() {
    let m = flat(4);
    let g = SpinGeometry::new(&m);
    let zero = U1Connection::zero(&m);
    let r = lambda_c(&g, &zero, &EigenOptions::default(), None).unwrap();
    assert!(r.eigenvalue.abs() < 1e-8);
    let op = LaOperator::new(&g, &zero);
    let v = op.to_field(&r.eigenvector);
    let v0 = v.at2(0);
    for s in 0..m.n_sites() {
        let w = v.at2(s);
        assert!((w[0] - v0[0]).norm() + (w[1] - v0[1]).norm() < 1e-6);
    }
    let lg = lambda_g(&m, &EigenOptions::default(), None).unwrap();
    assert!(lg.eigenvalue.abs() < 1e-8);
}

#[test]
fn twisted_plane_wave_spectrum() {
    let m = flat(4);
    let g = SpinGeometry::new(&m);
    let a = [1.3, -0.7, 0.0, 2.9];
    let conn = U1Connection::constant(&m, a);
    let h = m.spacing[0];
    let mut best = f64::INFINITY;
    for k in 0..256usize {
        let ks = [k % 4, (k / 4) % 4, (k / 16) % 4, k / 64];
        let e: f64 = (0..4).map(|i| (2.0 - 2.0 * libm::cos(h * (2.0 * PI * ks[i] as f64 - a[i]))) / (h * h)).sum();
        best = best.min(e);
    }
    let r = lambda_c(&g, &conn, &dense_opts(), None).unwrap();
    assert!((r.eigenvalue - best).abs() < 1e-9 * best, "{} {}", r.eigenvalue, best);
    let it = lambda_c(&g, &conn, &EigenOptions::default(), None).unwrap();
    assert!((it.eigenvalue - best).abs() < 1e-8 * best);
}

#[test]
fn scalar_first_mode() {
    let m = flat(8);
    let spec = dense_spectrum(&ScalarOperator::new(&m)).unwrap();
    let h = m.spacing[0];
    let exact = (2.0 - 2.0 * libm::cos(2.0 * PI * h)) / (h * h);
    let first = spec.iter().find(|v| **v > 1e-8).copied().unwrap();
    assert!((first - exact).abs() < 1e-9);
    assert!((first - 4.0 * PI * PI).abs() < 0.06 * 4.0 * PI * PI);
}

#[test]
fn reducible_block_structure() {
    let m = bumpy(4);
    let g = SpinGeometry::new(&m);
    let mut r = rng(3);
    let conn = random_conn(&m, &mut r, 1.0);
    let c = Configuration::reducible(&m, conn.clone());
    let theta: Vec<f64> = (0..m.n_sites() * 4).map(|_| r.gen_range(-1.0..1.0)).collect();
    let v = random_plus(&m, &mut r, 1.0);
    let b = hessian_blocks(&g, &c, &theta, &v).unwrap();
    assert!(b.h12.iter().all(|x| *x == 0.0));
    assert!(b.h21.values.iter().all(|z| z.re == 0.0 && z.im == 0.0));
    let la = g.l_a_apply(&conn, &v).unwrap();
    assert!(b.h22.sub(&la).max_norm() < 1e-12);
    let dd = lattice::codifferential(&m, &lattice::d(&m, &FormField::from_data(1, ValueType::Imaginary, theta)).unwrap()).unwrap();
    assert!(linalg::max_abs(&b.h11.iter().zip(&dd.data).map(|(a, b)| a - b).collect::<Vec<_>>()) < 1e-12);
    // constant one-forms are flat directions
    let fm = flat(4);
    let fg = SpinGeometry::new(&fm);
    let fc = Configuration::reducible(&fm, U1Connection::constant(&fm, [0.5, 0.0, 1.0, 0.0]));
    for a in 0..4 {
        let mut th = vec![0.0; fm.n_sites() * 4];
        for s in 0..fm.n_sites() {
            th[s * 4 + a] = 1.0;
        }
        let t = Tangent { theta: th, v: SpinorField::plus_zero(&fm) };
        let h = hessian_apply(&fg, &fc, &t).unwrap();
        assert!(module_norm(&fm, &h) < 1e-8);
    }
}

#[test]
fn slice_projection() {
    let m = bumpy(4);
    let mut r = rng(5);
    let xi = random_tangent(&m, &mut r);
    let zero = SpinorField::plus_zero(&m);
    let (p0, _) = slice_project(&m, &zero, &xi).unwrap();
    assert!(linalg::max_abs(&slice_operator(&m, &zero, &p0).unwrap()) < 1e-8);
    assert_eq!(p0.v, xi.v);
    let phi = random_plus(&m, &mut r, 1.0);
    let before = linalg::max_abs(&slice_operator(&m, &phi, &xi).unwrap());
    let (p, _) = slice_project(&m, &phi, &xi).unwrap();
    let after = linalg::max_abs(&slice_operator(&m, &phi, &p).unwrap());
    assert!(after < 1e-6 * before && after < 1e-8, "{before} {after}");
    let (pp, _) = slice_project(&m, &phi, &p).unwrap();
    assert!(module_norm(&m, &pp.sub(&p)) < 1e-10 * module_norm(&m, &p));
}

#[test]
fn hessian_operator_is_symmetric() {
    let m = bumpy(4);
    let g = SpinGeometry::new(&m);
    let mut r = rng(7);
    let c = random_config(&m, &mut r);
    for slice in [false, true] {
        let op = HessianOperator::new(&g, &c, slice);
        assert!(check_symmetry(&op, 1).unwrap() < 1e-9);
        let x: Vec<f64> = (0..op.dim()).map(|_| r.gen_range(-1.0..1.0)).collect();
        let back = op.from_tangent(&op.to_tangent(&x));
        assert!(x.iter().zip(&back).all(|(a, b)| (a - b).abs() < 1e-12));
    }
}

#[test]
fn kato_comparison_and_gauge_spectrum() {
    let m = build_torus(4, [1.0; 4], cosine_profile(0.5, 0, 1.0)).unwrap();
    let g = SpinGeometry::new(&m);
    let mut r = rng(11);
    let conn = random_conn(&m, &mut r, 2.0);
    let lg = lambda_g(&m, &dense_opts(), None).unwrap().eigenvalue;
    let spec = dense_spectrum(&LaOperator::new(&g, &conn)).unwrap();
    assert!(lg <= spec[0] + 1e-6);
    let gt = GaugeTransform { theta: (0..m.n_sites()).map(|_| r.gen_range(-3.0..3.0)).collect(), winding: [1, 0, -1, 0] };
    let (a2, _) = gauge_transform(&m, &gt, &conn, &SpinorField::plus_zero(&m)).unwrap();
    let spec2 = dense_spectrum(&LaOperator::new(&g, &a2)).unwrap();
    for (x, y) in spec.iter().zip(&spec2) {
        assert!((x - y).abs() < 1e-8 * (1.0 + x.abs()));
    }
}

use super::*;
use crate::lattice::{build_torus, cosine_profile};
use crate::spin::Chirality;
use crate::testutil::*;
use crate::Complex64;
use rand::Rng;

fn opts() -> EigenOptions {
    EigenOptions { tol: 1e-9, ..EigenOptions::default() }
}

#[test]
fn perelman_and_yamabe_on_flat() {
    let m = flat(4);
    assert!(perelman_quantity(&m, &opts(), None).unwrap().abs() < 1e-8);
    assert_eq!(yamabe_quotient(&m), 0.0);
}

#[test]
fn conformal_shift_invariance() {
    let base = build_torus(4, [1.0; 4], cosine_profile(0.5, 0, 1.0)).unwrap();
    let shifted = build_torus(4, [1.0; 4], |x| cosine_profile(0.5, 0, 1.0)(x) + 0.7).unwrap();
    let p0 = perelman_quantity(&base, &opts(), None).unwrap();
    let p1 = perelman_quantity(&shifted, &opts(), None).unwrap();
    assert!(p0 < 0.0);
    assert!((p0 - p1).abs() < 1e-8 * p0.abs());
    let y0 = yamabe_quotient(&base);
    let y1 = yamabe_quotient(&shifted);
    assert!((y0 - y1).abs() < 1e-10 * y0.abs());
}

#[test]
fn trivial_report() {
    let fam = [MetricSample::from_fn("flat", 4, [1.0; 4], |_| 0.0).unwrap()];
    let r = lambda_bar_c_estimate(&fam, &[[0.0; 4]], 4, [1.0; 4], &opts(), None).unwrap();
    assert_eq!(r.verdict, Verdict::NotDecided);
    assert!(r.max_lambda_c_product.abs() < 1e-8 && r.max_lambda_g_product.abs() < 1e-8);
    assert!(lambda_bar_c_estimate(&[], &[[0.0; 4]], 4, [1.0; 4], &opts(), None).is_err());
}

#[test]
fn flat_jacobian_sweep_rises_to_half() {
    let fam = [MetricSample::from_fn("flat", 4, [1.0; 4], |_| 0.0).unwrap()];
    let jac: alloc::vec::Vec<[f64; 4]> = (0..5).map(|j| [j as f64 / 8.0, 0.0, 0.0, 0.0]).collect();
    let r = lambda_bar_c_estimate(&fam, &jac, 4, [1.0; 4], &opts(), None).unwrap();
    for w in r.samples.windows(2) {
        assert!(w[1].lambda_c > w[0].lambda_c);
        assert!(w[1].lambda_g <= w[1].lambda_c + 1e-6);
    }
    // adding samples never lowers the maxima
    let part = summarize(r.samples[..2].to_vec(), 1e-9);
    assert!(part.max_lambda_c_product <= r.max_lambda_c_product);
}

#[test]
fn summarize_flags_negative_samples() {
    let mk = |lc: f64, res: f64| StabilitySample {
        label: "x".into(),
        jacobian_coord: [0.0; 4],
        lambda_g: -1.0,
        lambda_c: lc,
        volume: 1.0,
        lambda_g_product: -1.0,
        lambda_c_product: lc,
        residual: res,
        error: None,
    };
    assert_eq!(summarize(alloc::vec![mk(-1e-7, 1e-10)], 1e-9).verdict, Verdict::NotDecided);
    assert_eq!(summarize(alloc::vec![mk(-1e-3, 1e-10)], 1e-9).verdict, Verdict::Unstable);
    assert_eq!(summarize(alloc::vec![mk(-1e-3, 1e-3)], 1e-9).verdict, Verdict::NotDecided);
    let mut bad = mk(f64::NAN, f64::NAN);
    bad.error = Some("failed".into());
    let r = summarize(alloc::vec![bad, mk(0.5, 0.0)], 1e-9);
    assert_eq!(r.max_lambda_c_product, 0.5);
}

#[test]
fn cauchy_schwarz_holds() {
    let m = bumpy(4);
    let mut r = rng(41);
    for _ in 0..100 {
        let amp = r.gen_range(0.01..10.0);
        let phi = random_plus(&m, &mut r, amp);
        let (a, b) = cauchy_schwarz(&m, &phi);
        assert!(a <= b * (1.0 + 1e-14));
    }
}

#[test]
fn certificate_chain() {
    let m = bumpy(4);
    let g = SpinGeometry::new(&m);
    let zero = crate::gauge::U1Connection::zero(&m);
    assert!(matches!(instability_certificate(&g, &Configuration::reducible(&m, zero.clone())), Err(Error::ZeroField)));
    // linear regime: a tiny field is far from balance
    let mut r = rng(43);
    let phi = random_plus(&m, &mut r, 1e-4);
    let c = instability_certificate(&g, &Configuration { conn: zero.clone(), phi }).unwrap();
    assert!(c.balance_defect > 0.99);
    assert!(c.rhs < 0.0 && c.bound_on_lambda < 0.0);
    // constant spinor on the flat torus: lhs = 0, rhs < 0
    let f = flat(4);
    let fg = SpinGeometry::new(&f);
    let phi = SpinorField::constant(&f, Chirality::Plus, &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    let c = instability_certificate(&fg, &Configuration { conn: crate::gauge::U1Connection::zero(&f), phi }).unwrap();
    assert!(c.lhs.abs() < 1e-12);
    assert!((c.rhs + 0.25).abs() < 1e-12 && (c.bound_on_lambda + 0.25).abs() < 1e-12);
    assert!(c.rayleigh.abs() < 1e-12);
}

#[test]
fn chern_numbers() {
    let z = chern_data(0, 0, 0);
    assert_eq!((z.c2_plus, z.c2_minus), (Ratio::from_integer(0), Ratio::from_integer(0)));
    let k3 = chern_data(0, 24, -16);
    assert_eq!((k3.c2_plus, k3.c2_minus), (Ratio::from_integer(0), Ratio::from_integer(24)));
    let c = chern_data(4, 4, 0);
    assert_eq!((c.c2_plus, c.c2_minus), (Ratio::from_integer(-1), Ratio::from_integer(3)));
    let odd = chern_data(1, 0, 0);
    assert!(!odd.integral);
    assert_eq!(odd.c2_plus, Ratio::new(1, 4));
}

#[test]
fn default_family_shape() {
    let fam = default_family(4, [1.0; 4]).unwrap();
    assert_eq!(fam.len(), 6);
    assert_eq!(default_jacobian_sweep().len(), 8);
    for f in &fam {
        assert!(f.u.iter().any(|u| *u != 0.0));
    }
}

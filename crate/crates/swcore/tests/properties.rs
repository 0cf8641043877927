use proptest::prelude::*;
use swcore::clifford::{self, GammaSet};
use swcore::functional::{sw_energy, Configuration};
use swcore::gauge::{self, GaugeTransform, U1Connection};
use swcore::lattice::{self, build_torus, FormField, ValueType};
use swcore::spin::{Chirality, SpinGeometry, SpinorField};
use swcore::stability::{cauchy_schwarz, chern_data, summarize, StabilitySample};
use swcore::Complex64;

fn sample(lg: f64, lc: f64) -> StabilitySample {
    StabilitySample {
        label: "p".into(),
        jacobian_coord: [0.0; 4],
        lambda_g: lg,
        lambda_c: lc,
        volume: 1.0,
        lambda_g_product: lg,
        lambda_c_product: lc,
        residual: 0.0,
        error: None,
    }
}

fn spinor2() -> impl Strategy<Value = [Complex64; 2]> {
    prop::array::uniform4(-3.0f64..3.0).prop_map(|a| [Complex64::new(a[0], a[1]), Complex64::new(a[2], a[3])])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn clifford_square_is_minus_norm(x in prop::array::uniform4(-2.0f64..2.0), v in prop::array::uniform4(-1.0f64..1.0)) {
        let gs = GammaSet::new();
        let psi = [0, 1, 2, 3].map(|i| Complex64::new(v[i], -v[(i + 1) % 4]));
        let twice = clifford::clifford_action(&gs, &x, &clifford::clifford_action(&gs, &x, &psi));
        let n2: f64 = x.iter().map(|a| a * a).sum();
        for i in 0..4 {
            prop_assert!((twice[i] + psi[i] * n2).norm() <= 1e-12 * (1.0 + n2));
        }
    }

    #[test]
    fn sigma_is_self_dual_with_quartic_norm(v in spinor2(), t in -3.0f64..3.0) {
        let gs = GammaSet::new();
        let s = clifford::sigma_map(&gs, &v);
        let n2 = v[0].norm_sqr() + v[1].norm_sqr();
        prop_assert!((clifford::two_form_norm_sq(&s) - 0.25 * n2 * n2).abs() <= 1e-12 * (1.0 + n2 * n2));
        let st = clifford::hodge_star(&s);
        for p in 0..6 {
            prop_assert!((st[p] - s[p]).abs() <= 1e-12 * (1.0 + n2));
        }
        let z = Complex64::from_polar(1.0, t);
        let s2 = clifford::sigma_map(&gs, &[v[0] * z, v[1] * z]);
        for p in 0..6 {
            prop_assert!((s2[p] - s[p]).abs() <= 1e-12 * (1.0 + n2));
        }
    }

    #[test]
    fn exterior_derivative_squares_to_zero(seed in 0u64..1000) {
        let m = build_torus(4, [1.0, 1.5, 1.0, 0.8], |x| 0.1 * (x[0] * core::f64::consts::TAU).sin()).unwrap();
        let n = m.n_sites();
        let f: Vec<f64> = (0..n).map(|s| ((s as u64 * 2654435761 + seed) % 97) as f64 / 97.0).collect();
        let dd = lattice::d(&m, &lattice::d(&m, &FormField::from_data(0, ValueType::Real, f)).unwrap()).unwrap();
        prop_assert!(dd.max_abs() < 1e-12);
        prop_assert!(lattice::d(&m, &dd).is_err());
    }

    #[test]
    fn energy_is_gauge_invariant(theta in prop::collection::vec(-3.0f64..3.0, 256), w in prop::array::uniform4(-2i64..3), amp in 0.0f64..2.0) {
        let m = build_torus(4, [1.0; 4], |x| 0.2 * (core::f64::consts::TAU * x[1]).cos()).unwrap();
        let g = SpinGeometry::new(&m);
        let n = m.n_sites();
        let conn = U1Connection { a: (0..4 * n).map(|l| amp * ((l * 7 % 13) as f64 - 6.0)).collect() };
        let mut phi = SpinorField::zeros(&m, Chirality::Plus);
        for (i, z) in phi.values.iter_mut().enumerate() {
            *z = Complex64::new(((i * 5 % 11) as f64 - 5.0) / 5.0, ((i * 3 % 7) as f64 - 3.0) / 3.0);
        }
        let c = Configuration { conn, phi };
        let e0 = sw_energy(&g, &c).unwrap().total;
        let gt = GaugeTransform { theta, winding: w };
        let (a2, p2) = gauge::gauge_transform(&m, &gt, &c.conn, &c.phi).unwrap();
        let e1 = sw_energy(&g, &Configuration { conn: a2, phi: p2 }).unwrap().total;
        prop_assert!((e1 - e0).abs() <= 1e-10 * (1.0 + e0.abs()));
    }

    #[test]
    fn cauchy_schwarz_never_fails(vals in prop::collection::vec(spinor2(), 256)) {
        let m = build_torus(4, [1.0; 4], |x| 0.3 * (core::f64::consts::TAU * x[0]).cos()).unwrap();
        let mut phi = SpinorField::zeros(&m, Chirality::Plus);
        for (s, v) in vals.iter().enumerate() {
            phi.set2(s, *v);
        }
        let (a, b) = cauchy_schwarz(&m, &phi);
        prop_assert!(a <= b * (1.0 + 1e-14));
    }

    #[test]
    fn chern_difference_is_euler(c in -1000i64..1000, x in -1000i64..1000, s in -1000i64..1000) {
        let d = chern_data(c, x, s);
        prop_assert_eq!(d.c2_minus - d.c2_plus, num_rational::Ratio::from_integer(x as i128));
    }

    #[test]
    fn sampled_suprema_never_drop(base in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..8), extra in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 0..8)) {
        let a: Vec<_> = base.iter().map(|&(g, c)| sample(g, c)).collect();
        let mut b = a.clone();
        b.extend(extra.iter().map(|&(g, c)| sample(g, c)));
        let (ra, rb) = (summarize(a, 1e-8), summarize(b, 1e-8));
        prop_assert!(rb.max_lambda_g_product >= ra.max_lambda_g_product);
        prop_assert!(rb.max_lambda_c_product >= ra.max_lambda_c_product);
        // a verdict of unstable survives more samples
        prop_assert!(ra.verdict != swcore::stability::Verdict::Unstable || rb.verdict == ra.verdict);
    }
}

use nqac::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn overlap_is_symmetric_and_bounded(p in 2u32..=5, lam in 0.0f64..2.0, g in 0.0f64..5.0, m0 in -1.0f64..1.0, mc in -1.0f64..1.0) {
        let params = ModelParams::new(p, 2, 1.0, lam).with_gamma(g);
        let a = instanton_overlap(&params, m0, mc).unwrap();
        let b = instanton_overlap(&params, mc, m0).unwrap();
        prop_assert_eq!(a.overlap, b.overlap);
        prop_assert!((0.0..=1.0).contains(&a.overlap));
        prop_assert_eq!(instanton_overlap(&params, m0, m0).unwrap().overlap, 1.0);
    }

    #[test]
    fn overlap_invariant_under_saddle_scaling(lam in 0.0f64..2.0, g in 0.1f64..4.0, c in 1.0f64..4.0, m0 in 0.0f64..1.0, mc in 0.0f64..1.0) {
        let params = ModelParams::new(4, 4, 1.0, lam).with_gamma(g);
        let scaled = scale_params(&params, c, ScalingConvention::Saddle);
        let a = instanton_overlap(&params, m0, mc).unwrap();
        let b = instanton_overlap(&scaled, m0, mc).unwrap();
        prop_assert!((a.overlap - b.overlap).abs() < 1e-12);
        prop_assert!(b.log_gap(10.0) <= a.log_gap(10.0) + 1e-12);
    }

    #[test]
    fn spinwave_branches_match_closed_form(j in 0.2f64..2.0, c in 1.0f64..4.0, lam in 0.05f64..0.95, g in 0.0f64..10.0) {
        let s = spinwave_spectrum(j, c, lam, g).unwrap();
        let (w0, w1) = spinwave_closed_form(j, c, lam, g);
        let scale = (2.0 * j * c).powi(2) + g * g;
        prop_assert!(s.omega0 >= 0.0 && s.omega1 >= 0.0);
        prop_assert!((s.omega0.powi(2) - w0).abs() < 1e-9 * scale);
        prop_assert!((s.omega1.powi(2) - w1).abs() < 1e-9 * scale);
        if g >= 2.0 * j * c * lam {
            prop_assert_eq!(s.theta, 0.0);
        } else {
            prop_assert!(s.theta > 0.0);
        }
    }

    #[test]
    fn occupancy_scales_as_j_c_squared(j in 0.1f64..2.0, c in 1.0f64..5.0, lam in 0.0f64..2.0, beta in 0.01f64..3.0, half in 1usize..20) {
        let n = 2 * half;
        let a = af_occupancy(j, c, lam, beta, n).unwrap();
        let b = af_occupancy(j * c * c, 1.0, lam * c * c, beta, n).unwrap();
        prop_assert!((a.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (x, y) in a.probabilities.iter().zip(&b.probabilities) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn ferro_metastability_monotone_in_flipped_fraction(lam in 0.5f64..1.2) {
        let params = ModelParams::new(2, 2, 1.0, lam);
        let mut seen = false;
        for i in 1..50 {
            let exists = fm_metastable_exists(&params, i as f64 / 100.0).unwrap();
            prop_assert!(exists || !seen, "lost metastability at k/N = {}", i as f64 / 100.0);
            seen |= exists;
        }
    }
}

#[test]
fn spinwave_gap_closes_as_square_root() {
    let (j, c, lam) = (1.0, 2.0, 0.4);
    let gc = 2.0 * j * c * lam;
    let samples: Vec<(f64, f64)> = [1e-8, 1e-7, 1e-6, 1e-5]
        .iter()
        .map(|&d| (d, spinwave_spectrum(j, c, lam, gc - d).unwrap().omega1))
        .collect();
    let (e, _) = gap_exponent_fit(&samples).unwrap();
    assert!((e - 0.5).abs() < 1e-3, "{e}");
    assert!(spinwave_spectrum(j, c, lam, gc).unwrap().gap() < 1e-6);
    assert!(spinwave_spectrum(0.0, c, lam, 1.0).is_err());
}

#[test]
fn transition_overlap_shrinks_gap_with_nesting() {
    let settings = SolverSettings {
        grid_points: 1001,
        ..SolverSettings::default()
    };
    let mut last = 0.0;
    for c in [1.0, 2.0, 3.0] {
        let params = scale_params(
            &ModelParams::new(4, 4, 1.0, 1.0).with_temperature(0.01),
            c,
            ScalingConvention::Saddle,
        );
        let est = instanton_overlap_at_transition(&params, &settings).unwrap();
        assert!(est.overlap < 1.0);
        let lg = est.log_gap(20.0);
        assert!(lg < last, "C = {c}: {lg}");
        last = lg;
    }
    let second = ModelParams::new(4, 2, 1.0, 6.0).with_temperature(0.01);
    assert_eq!(
        instanton_overlap_at_transition(&second, &settings)
            .unwrap()
            .overlap,
        1.0
    );
}

#[test]
fn antiferro_threshold_monotone_in_penalty() {
    let n = 100;
    for k in [5usize, 10, 20] {
        let mut seen = false;
        for i in 1..60 {
            let lam = i as f64 * 0.01;
            let exists =
                af_metastable_exists(&ModelParams::new(2, 2, 1.0, lam).antiferro(), k, n).unwrap();
            assert!(
                exists || !seen,
                "k = {k}: lost metastability at lambda = {lam}"
            );
            seen |= exists;
        }
        assert!(seen);
    }
}

#[test]
fn ferro_levels_ground_state_and_ordering() {
    let params = ModelParams::new(2, 2, 1.0, 0.9).with_temperature(0.05);
    let f0 = fm_level_free_energy(&params, 100, 0).unwrap().unwrap();
    let occ = fm_occupancy(&params, 100).unwrap();
    assert!((occ.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(occ.energies.windows(2).all(|w| w[0] <= w[1]));
    if let Some(f10) = fm_level_free_energy(&params, 100, 10).unwrap() {
        assert!(f10 > f0);
    }
    assert_eq!(fm_log_degeneracy(10, 5), ln_binomial(10, 5));
    assert_eq!(fm_log_degeneracy(10, 0), std::f64::consts::LN_2);
}

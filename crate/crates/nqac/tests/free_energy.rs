use nqac::*;
use proptest::prelude::*;
use proptest::strategy::ValueTree;

fn family() -> impl Strategy<Value = ModelParams> {
    (
        2u32..=5,
        2u32..=4,
        0.5f64..1.5,
        0.0f64..2.0,
        0.0f64..4.0,
        0.0f64..1.0,
        1.0f64..2.5,
    )
        .prop_map(|(p, q, j, lam, g, t, c)| {
            let mut params = ModelParams::new(p, q, j, 0.0).with_nesting(c);
            params.set_scaled_lambda(lam);
            params.set_scaled_gamma(g);
            params.with_temperature(t * c.powi(p as i32 - 1))
        })
}

fn settings() -> SolverSettings {
    SolverSettings {
        grid_points: 1001,
        ..SolverSettings::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn saddle_points_are_stationary(params in family()) {
        let scale = params.energy_scale();
        for s in solve_symmetric(&params, &settings()).unwrap() {
            prop_assert!(s.residual < 1e-8);
            let g = free_energy_gradient(&params, &s.config).unwrap()[0];
            prop_assert!(g.abs() / scale < 1e-8, "gradient {g}");
        }
    }

    #[test]
    fn gradient_matches_finite_differences(params in family(), x in 0.05f64..0.95, w1 in -0.9f64..0.9, w2 in -0.9f64..0.9) {
        let ws = [w1, w2];
        let cfg = SectorConfig::from_parts(&[x, 1.0 - x], &ws).unwrap();
        let g = free_energy_gradient(&params, &cfg).unwrap();
        let h = 1e-6;
        for i in 0..2 {
            let mut up = ws;
            let mut dn = ws;
            up[i] += h;
            dn[i] -= h;
            let f = |w: &[f64; 2]| free_energy(&params, &SectorConfig::from_parts(&[x, 1.0 - x], w).unwrap()).unwrap();
            let fd = (f(&up) - f(&dn)) / (2.0 * h);
            prop_assert!((fd - g[i]).abs() < 1e-6 * params.energy_scale().max(1.0), "sector {i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn normalization_divides_by_energy_scale(params in family(), m in -1.0f64..1.0) {
        let cfg = SectorConfig::symmetric(m);
        let s = free_energy_sample(&params, &cfg).unwrap();
        prop_assert_eq!(s.value, free_energy(&params, &cfg).unwrap());
        prop_assert!((s.value_normalized * params.energy_scale() - s.value).abs() <= 1e-12 * s.value.abs().max(1.0));
    }

    #[test]
    fn even_orders_are_z2_symmetric(params in family(), m in 0.0f64..1.0) {
        let mut params = params;
        params.p = 2 * (params.p / 2);
        params.q = 2 * (params.q / 2);
        let a = free_energy(&params, &SectorConfig::symmetric(m)).unwrap();
        let b = free_energy(&params, &SectorConfig::symmetric(-m)).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn coupling_sign_irrelevant_at_zero_magnetization(params in family(), n in 0.0f64..1.0) {
        let cfg = SectorConfig::local_order(n);
        let a = free_energy(&params.antiferro(), &cfg).unwrap();
        let b = free_energy(&params, &cfg).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn antiferro_even_penalty_matches_uniform_block_form(params in family(), n in 0.0f64..1.0) {
        let mut params = params.antiferro();
        params.q = 2 * (params.q / 2);
        let (q, c) = (params.q as i32, params.nesting);
        let h = q as f64 * params.lambda * c.powi(q - 1) * n.powi(q - 1);
        let e = h.hypot(params.gamma);
        let quantum = if params.temperature > 0.0 { -c * params.temperature * log_2cosh(e / params.temperature) } else { -c * e };
        let expected = (q - 1) as f64 * params.lambda * c.powi(q) * n.powi(q) + quantum;
        let a = free_energy(&params, &SectorConfig::local_order(n)).unwrap();
        prop_assert!((a - expected).abs() <= 1e-10 * a.abs().max(1.0), "{a} vs {expected}");
    }

    #[test]
    fn saddle_solutions_invariant_under_scaling(params in family(), target in 1.0f64..3.0) {
        let other = scale_params(&params, target, ScalingConvention::Saddle);
        let a = solve_symmetric(&params, &settings()).unwrap();
        let b = solve_symmetric(&other, &settings()).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x.config.ws()[0] - y.config.ws()[0]).abs() < 1e-9);
            prop_assert_eq!(x.stability, y.stability);
        }
    }

    #[test]
    fn low_temperature_free_energy_invariant(params in family(), m in -1.0f64..1.0) {
        let c = params.nesting;
        let cold = params.with_temperature(1e-3 * params.j * c.powi(params.p as i32));
        let cfg = SectorConfig::symmetric(m);
        let f = free_energy(&cold, &cfg).unwrap();
        let g = free_energy(&scale_params(&cold, 1.0, ScalingConvention::LowTFreeEnergy), &cfg).unwrap();
        prop_assert!((f - g).abs() < 1e-6 * f.abs());
    }

    #[test]
    fn low_temperature_partition_invariant(params in family(), m in -1.0f64..1.0) {
        let cold = params.with_temperature(1e-4);
        let scaled = scale_params(&cold, 1.0, ScalingConvention::LowTPartition);
        let cfg = SectorConfig::symmetric(m);
        let a = free_energy(&cold, &cfg).unwrap() / cold.temperature;
        let b = free_energy(&scaled, &cfg).unwrap() / scaled.temperature;
        prop_assert!((a - b).abs() < 1e-6 * a.abs());
    }

    #[test]
    fn global_minimum_is_lowest_saddle(params in family()) {
        let scale = params.energy_scale();
        let g = global_minimum(&params, &[1.0], &settings()).unwrap();
        let w = g.config.ws()[0];
        if w > 1e-4 && w < 1.0 - 1e-4 {
            prop_assert!(g.residual < 1e-8, "residual {} at w = {w}", g.residual);
        }
        let best = solve_symmetric(&params, &settings())
            .unwrap()
            .into_iter()
            .filter(|s| s.config.ws()[0] >= -1e-12)
            .map(|s| s.free_energy)
            .fold(f64::INFINITY, f64::min);
        prop_assert!((g.free_energy - best).abs() / scale < 1e-9, "{} vs {best}", g.free_energy);
    }

    #[test]
    fn ordered_moment_never_reenters(params in family()) {
        let mut last = f64::INFINITY;
        for k in 0..12 {
            let mut at = params;
            at.set_scaled_gamma(0.5 * k as f64);
            let w = global_minimum(&at, &[1.0], &settings()).unwrap().config.ws()[0].abs();
            prop_assert!(w <= last + 1e-6, "moment grew from {last} to {w} at step {k}");
            last = w;
        }
    }
}

#[test]
fn hundred_draw_symmetric_vs_global() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for _ in 0..100 {
        let params = family().new_tree(&mut runner).unwrap().current();
        let g = global_minimum(&params, &[1.0], &settings()).unwrap();
        let sols = solve_symmetric(&params, &settings()).unwrap();
        let w = g.config.ws()[0];
        assert!(
            sols.iter()
                .any(|s| (s.config.ws()[0].abs() - w.abs()).abs() < 1e-7),
            "{params:?}: {w} not in saddle set"
        );
    }
}

#[test]
fn sectored_solver_is_deterministic_and_damping_independent() {
    let params = ModelParams::new(4, 2, 1.0, 0.6)
        .with_gamma(1.5)
        .with_temperature(0.05);
    let fractions = [0.2, 0.8];
    let run = |damping| {
        let s = SolverSettings {
            damping,
            ..SolverSettings::default()
        };
        solve_sectored(&params, &fractions, &s).unwrap()
    };
    assert_eq!(run(0.5), run(0.5));
    let minima = |r: SectoredSolve| {
        let mut v: Vec<Vec<f64>> = r
            .solutions
            .into_iter()
            .filter(|s| s.stability == Stability::LocalMin)
            .map(|s| s.config.ws())
            .collect();
        v.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        v
    };
    let a = minima(run(0.3));
    let b = minima(run(0.8));
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!(
            x.iter().zip(y).all(|(u, v)| (u - v).abs() < 1e-8),
            "{x:?} vs {y:?}"
        );
    }
}

#[test]
fn log_binomial_matches_exact_integer_value() {
    use num_bigint::BigUint;
    let exact = |n: u64, k: u64| -> f64 {
        let mut acc = BigUint::from(1u32);
        for i in 0..k {
            acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
        }
        let bits = acc.bits();
        let shift = bits.saturating_sub(60);
        let top: u64 = (&acc >> shift).try_into().unwrap();
        (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
    };
    for (n, k) in [(100, 50), (100, 3), (1000, 500), (5000, 17)] {
        assert!(
            (ln_binomial(n, k) - exact(n, k)).abs() < 1e-9 * exact(n, k),
            "({n}, {k})"
        );
    }
    let d = DegeneracyTerm::new(100, 50).unwrap();
    assert!((d.log_degeneracy - std::f64::consts::LN_2 - exact(100, 50)).abs() < 1e-9);
    let hot = ModelParams::new(2, 2, 1.0, 1.0).with_temperature(1.0);
    let s = entropy_term(&hot, 100, 50).unwrap();
    assert!((s + 0.674_769_888).abs() < 1e-8, "{s}");
    assert_eq!(
        DegeneracyTerm::new(10, 0).unwrap().log_degeneracy,
        std::f64::consts::LN_2
    );
}

#[test]
fn normalized_entropy_vanishes_with_nesting() {
    let mut last = f64::INFINITY;
    for c in [1.0, 2.0, 4.0, 8.0, 16.0] {
        let mut params = ModelParams::new(4, 2, 1.0, 0.0).with_nesting(c);
        params.set_scaled_lambda(0.6);
        params = params.with_temperature(0.1 * c.powi(3));
        let s = (entropy_term(&params, 100, 10).unwrap() / params.energy_scale()).abs();
        assert!(s < last);
        last = s;
    }
    assert!(last < 1e-2);
}

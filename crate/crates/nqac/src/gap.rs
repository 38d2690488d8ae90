use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::phase::degenerate_minima;
use crate::saddle::SolverSettings;

/// Sudden-overlap gap estimate between the two competing minima.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapEstimate {
    pub overlap: f64,
    /// log Δ / (N C), equal to log overlap.
    pub log_gap_per_spin: f64,
    pub at_params: ModelParams,
}

impl GapEstimate {
    /// log Δ for N logical qubits at the nesting level of `at_params`.
    pub fn log_gap(&self, n_logical: f64) -> f64 {
        n_logical * self.at_params.nesting * self.log_gap_per_spin
    }
}

fn effective_field(params: &ModelParams, m: f64) -> f64 {
    let c = params.nesting;
    let (p, q) = (params.p as i32, params.q as i32);
    params.coupling.sign() * p as f64 * params.j * c.powi(p - 1) * m.powi(p - 1)
        + q as f64 * params.lambda * c.powi(q - 1) * m.powi(q - 1)
}

/// Ground-state angle of -h σz - Γ σx measured from the z axis.
fn ground_angle(h: f64, gamma: f64) -> f64 {
    gamma.atan2(h)
}

pub fn instanton_overlap(params: &ModelParams, m0: f64, mc: f64) -> Result<GapEstimate> {
    params.validate()?;
    for (name, m) in [("m0", m0), ("mc", mc)] {
        if !(m.is_finite() && m.abs() <= 1.0) {
            return Err(Error::Input(format!("{name} must lie in [-1, 1], got {m}")));
        }
    }
    let a0 = ground_angle(effective_field(params, m0), params.gamma);
    let ac = ground_angle(effective_field(params, mc), params.gamma);
    let overlap = ((a0 - ac) / 2.0).cos().abs().min(1.0);
    Ok(GapEstimate {
        overlap,
        log_gap_per_spin: overlap.ln(),
        at_params: *params,
    })
}

/// Overlap at the first-order point of the family with Γ free; 1 when the transition is
/// not first order.
pub fn instanton_overlap_at_transition(
    params: &ModelParams,
    settings: &SolverSettings,
) -> Result<GapEstimate> {
    match degenerate_minima(params, settings)? {
        Some((g, m0, mc)) => {
            let at = params.with_gamma(g * params.nesting.powi(params.p as i32 - 1));
            instanton_overlap(&at, m0, mc)
        }
        None => Ok(GapEstimate {
            overlap: 1.0,
            log_gap_per_spin: 0.0,
            at_params: *params,
        }),
    }
}

/// Bogoliubov spectrum of harmonic fluctuations around the classical nested p=q=2 state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinWaveSpectrum {
    pub theta: f64,
    pub omega0: f64,
    pub omega1: f64,
    pub a: f64,
    pub b: f64,
    pub lambda_a: f64,
    pub lambda_b: f64,
}

impl SpinWaveSpectrum {
    pub fn gap(&self) -> f64 {
        self.omega0.min(self.omega1)
    }
}

fn checked_sqrt(x2: f64, scale: f64, what: &str) -> Result<f64> {
    if x2 < -1e-12 * scale.max(1.0) {
        return Err(Error::Numerical(format!(
            "{what} squared is negative ({x2})"
        )));
    }
    Ok(x2.max(0.0).sqrt())
}

/// Spin-wave frequencies; `lam` is the penalty-to-coupling ratio of the nested Hamiltonian.
pub fn spinwave_spectrum(j: f64, c: f64, lam: f64, gamma: f64) -> Result<SpinWaveSpectrum> {
    for (param, v) in [("J", j), ("nesting", c), ("lambda", lam)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain { param, value: v });
        }
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::Domain {
            param: "gamma",
            value: gamma,
        });
    }
    let jc = j * c;
    let gc = 2.0 * jc * lam;
    let (theta, cos) = if gamma >= gc {
        (0.0, 1.0)
    } else {
        ((gamma / gc).acos(), gamma / gc)
    };
    let cos2 = cos * cos;
    let sin2 = 1.0 - cos2;
    let a = jc * (1.0 - lam) * cos2 + gc * sin2 + gamma * cos;
    let b = gc * sin2 - jc * lam * cos2 + gamma * cos;
    let a_la = jc * (1.0 - lam) * cos2;
    let b_lb = -jc * lam * cos2;
    let scale = a * a + b * b + gc * gc;
    let omega0 = checked_sqrt((a - a_la) * (a + a_la), scale, "omega0")?;
    let omega1 = checked_sqrt((b - b_lb) * (b + b_lb), scale, "omega1")?;
    Ok(SpinWaveSpectrum {
        theta,
        omega0,
        omega1,
        a,
        b,
        lambda_a: a_la / a,
        lambda_b: b_lb / b,
    })
}

/// Closed-form branch expressions for ω0², ω1².
pub fn spinwave_closed_form(j: f64, c: f64, lam: f64, gamma: f64) -> (f64, f64) {
    let jc = j * c;
    let gc = 2.0 * jc * lam;
    if gamma >= gc {
        (
            gamma * gamma + 2.0 * jc * (1.0 - lam) * gamma,
            gamma * (gamma - gc),
        )
    } else {
        (
            gc * gc + (1.0 - lam) * gamma * gamma / lam,
            gc * gc - gamma * gamma,
        )
    }
}

/// Least-squares fit of log ω = log a + e log δ; returns (e, a).
pub fn gap_exponent_fit(samples: &[(f64, f64)]) -> Result<(f64, f64)> {
    if samples
        .iter()
        .any(|&(d, w)| !(d > 0.0 && w > 0.0 && d.is_finite() && w.is_finite()))
    {
        return Err(Error::Input(
            "fit samples need positive finite (delta, omega)".into(),
        ));
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| s.0.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if samples.len() < 2 || sxx.is_nan() || sxx <= 1e-12 * n {
        return Err(Error::Input(
            "fit samples need at least two distinct delta values".into(),
        ));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, (my - slope * mx).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix2;

    #[test]
    fn identical_minima_overlap_one() {
        let p = ModelParams::new(4, 2, 1.0, 1.0).with_gamma(2.0);
        let g = instanton_overlap(&p, 0.4, 0.4).unwrap();
        assert_eq!(g.overlap, 1.0);
        assert_eq!(g.log_gap_per_spin, 0.0);
    }

    #[test]
    fn overlap_matches_dense_eigenvectors() {
        let p = ModelParams::new(4, 2, 1.0, 0.3).with_gamma(1.4);
        let ground = |m: f64| {
            let h = effective_field(&p, m);
            let mat = Matrix2::new(-h, -p.gamma, -p.gamma, h);
            let eig = mat.symmetric_eigen();
            let k = if eig.eigenvalues[0] < eig.eigenvalues[1] {
                0
            } else {
                1
            };
            eig.eigenvectors.column(k).into_owned()
        };
        let (m0, mc) = (0.0, 0.93);
        let direct = ground(m0).dot(&ground(mc)).abs();
        let g = instanton_overlap(&p, m0, mc).unwrap();
        assert!((g.overlap - direct).abs() < 1e-12);
    }

    #[test]
    fn opposite_fields_at_zero_gamma_are_orthogonal() {
        let p = ModelParams::new(2, 2, 1.0, 0.0);
        let g = instanton_overlap(&p, 0.5, -0.5).unwrap();
        assert!(g.overlap < 1e-15);
    }

    #[test]
    fn gap_closes_at_critical_field() {
        let (j, c, lam) = (1.0, 2.0, 0.6);
        let s = spinwave_spectrum(j, c, lam, 2.0 * j * c * lam).unwrap();
        assert_eq!(s.omega1, 0.0);
        assert!(s.omega0 > 0.0);
    }

    #[test]
    fn branches_match_closed_forms() {
        for &g in &[0.0, 0.3, 1.1, 2.4, 5.0] {
            let s = spinwave_spectrum(1.0, 1.5, 0.7, g).unwrap();
            let (w0, w1) = spinwave_closed_form(1.0, 1.5, 0.7, g);
            assert!((s.omega0 * s.omega0 - w0).abs() < 1e-10);
            assert!((s.omega1 * s.omega1 - w1).abs() < 1e-10);
        }
    }

    #[test]
    fn exact_power_law_fit() {
        let samples: Vec<(f64, f64)> = (0..30)
            .map(|i| {
                let d = 1e-6 * 10f64.powf(i as f64 / 7.0);
                (d, 3.0 * d.sqrt())
            })
            .collect();
        let (e, a) = gap_exponent_fit(&samples).unwrap();
        assert!((e - 0.5).abs() < 1e-10 && (a - 3.0).abs() < 1e-10);
        assert!(gap_exponent_fit(&[(1e-3, 1.0), (1e-3, 2.0)]).is_err());
    }
}

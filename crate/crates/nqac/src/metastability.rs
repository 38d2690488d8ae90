use crate::error::{Error, Result};
use crate::free_energy::{free_energy, free_energy_with_degeneracy, Terms};
use crate::numeric::{bisect_predicate, linspace};
use crate::params::{af_three_sector_fractions, ln_binomial, ModelParams, SectorConfig};
use crate::saddle::{
    global_minimum, hessian_eigenvalues, response_map_spectral_max, solve_sectored_from,
    SaddleSolution, SolverSettings,
};
use rayon::prelude::*;
use std::f64::consts::LN_2;

/// Zero-temperature, zero-field corner test: each sector field points along its spin.
fn corner_stable(params: &ModelParams, fractions: &[f64], ws: &[f64]) -> bool {
    let t = Terms::new(params);
    let m: f64 = fractions.iter().zip(ws).map(|(f, w)| f * w).sum();
    let noise = 1e-12 * (t.h_p.abs() + t.h_q.abs());
    ws.iter().all(|&w| t.field(w, m) * w > noise)
}

fn classical_endpoint(params: &ModelParams) -> bool {
    params.temperature == 0.0 && params.gamma == 0.0
}

fn quadrant_seeds(signs: &[f64]) -> Vec<Vec<f64>> {
    let axis = linspace(0.05, 1.0, 5);
    let mut seeds: Vec<Vec<f64>> = vec![signs.to_vec()];
    let mut grid: Vec<Vec<f64>> = vec![vec![]];
    for &s in signs {
        grid = grid
            .into_iter()
            .flat_map(|g| {
                axis.iter().map(move |&a| {
                    let mut x = g.clone();
                    x.push(s * a);
                    x
                })
            })
            .collect();
    }
    seeds.extend(grid);
    seeds
}

fn sign_pattern(ws: &[f64], signs: &[f64]) -> bool {
    ws.iter().zip(signs).all(|(w, s)| w * s > 1e-6)
}

/// Locally stable ferro two-sector state with w1 > 0 > w2 at flipped fraction x, if any.
pub fn fm_mixed_solution(
    params: &ModelParams,
    x: f64,
    settings: &SolverSettings,
) -> Result<Option<SaddleSolution>> {
    let config = SectorConfig::two_sector(x, 1.0, -1.0)?;
    let fractions = config.fractions();
    let signs = [1.0, -1.0];
    if classical_endpoint(params) {
        params.validate()?;
        if !corner_stable(params, &fractions, &signs) {
            return Ok(None);
        }
        let value = free_energy(params, &config)?;
        return Ok(Some(SaddleSolution {
            config,
            residual: 0.0,
            stability: crate::saddle::Stability::LocalMin,
            free_energy: value,
            multiplicity: 1,
        }));
    }
    let solve = solve_sectored_from(params, &fractions, &quadrant_seeds(&signs), settings)?;
    let t = Terms::new(params);
    let scale = params.energy_scale();
    Ok(solve.solutions.into_iter().find(|s| {
        let ws = s.config.ws();
        sign_pattern(&ws, &signs)
            && s.residual < settings.fp_tolerance
            && hessian_eigenvalues(&t, &fractions, &ws, scale)
                .iter()
                .all(|&e| e >= -1e-8)
    }))
}

/// Whether the ferro state with a fraction k/N of flipped logical qubits is metastable.
pub fn fm_metastable_exists(params: &ModelParams, k_over_n: f64) -> Result<bool> {
    Ok(fm_mixed_solution(params, k_over_n, &SolverSettings::default())?.is_some())
}

/// Whether the antiferro three-sector state is metastable. `upper` selects the (k+1)-th
/// excited state (flipped single spin, w3 < 0); otherwise the k-th (w3 > 0).
pub fn af_metastable_branch(params: &ModelParams, k: usize, n: usize, upper: bool) -> Result<bool> {
    params.validate()?;
    let fractions = af_three_sector_fractions(n, k)?;
    let signs = [1.0, -1.0, if upper { -1.0 } else { 1.0 }];
    if classical_endpoint(params) {
        return Ok(corner_stable(params, &fractions, &signs));
    }
    let settings = SolverSettings::default();
    let solve = solve_sectored_from(params, &fractions, &quadrant_seeds(&signs), &settings)?;
    let t = Terms::new(params);
    Ok(solve.solutions.iter().any(|s| {
        let ws = s.config.ws();
        sign_pattern(&ws, &signs)
            && s.residual < settings.fp_tolerance
            && response_map_spectral_max(&t, &fractions, &ws) <= 1.0 + 1e-8
    }))
}

/// Whether the k-th antiferro excited state is metastable.
pub fn af_metastable_exists(params: &ModelParams, k: usize, n: usize) -> Result<bool> {
    af_metastable_branch(params, k, n, false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionAxis {
    /// Fraction of flipped logical qubits k/N.
    KOverN,
    /// T / C^(p-1).
    Temperature,
    /// Γ / C^(p-1).
    Gamma,
    /// λ C^(q-p).
    Lambda,
}

impl RegionAxis {
    pub fn name(self) -> &'static str {
        match self {
            RegionAxis::KOverN => "k_over_N",
            RegionAxis::Temperature => "T_scaled",
            RegionAxis::Gamma => "gamma_scaled",
            RegionAxis::Lambda => "lambda_scaled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateFamily {
    Ferro,
    Antiferro { n: usize, upper: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetastableSide {
    Below,
    Above,
}

/// Boundary of the metastable region: for each abscissa, the ordinate where existence flips.
#[derive(Debug, Clone, PartialEq)]
pub struct MetastabilityRegion {
    pub axis1: RegionAxis,
    pub axis2: RegionAxis,
    pub boundary: Vec<(f64, Option<f64>)>,
    pub side_with_metastable: Vec<Option<MetastableSide>>,
}

fn apply_axis(
    params: &ModelParams,
    axis: RegionAxis,
    value: f64,
    k_over_n: &mut f64,
) -> ModelParams {
    let c = params.nesting;
    let unit = c.powi(params.p as i32 - 1);
    match axis {
        RegionAxis::KOverN => {
            *k_over_n = value;
            *params
        }
        RegionAxis::Temperature => params.with_temperature(value * unit),
        RegionAxis::Gamma => params.with_gamma(value * unit),
        RegionAxis::Lambda => params.with_lambda(value / c.powi(params.q as i32 - params.p as i32)),
    }
}

fn exists_at(
    params: &ModelParams,
    family: StateFamily,
    k_over_n: f64,
    settings: &SolverSettings,
) -> Result<bool> {
    match family {
        StateFamily::Ferro => Ok(fm_mixed_solution(params, k_over_n, settings)?.is_some()),
        StateFamily::Antiferro { n, upper } => {
            let k = (k_over_n * n as f64).round() as usize;
            af_metastable_branch(params, k, n, upper)
        }
    }
}

/// Traces the metastability boundary along `axis2` for each abscissa on `axis1`.
#[allow(clippy::too_many_arguments)]
pub fn trace_region(
    params: &ModelParams,
    family: StateFamily,
    axis1: RegionAxis,
    abscissae: &[f64],
    axis2: RegionAxis,
    range: (f64, f64),
    k_over_n: f64,
    tolerance: f64,
) -> Result<MetastabilityRegion> {
    if axis1 == axis2 {
        return Err(Error::Input("region axes must differ".into()));
    }
    params.validate()?;
    let settings = SolverSettings::default();
    let rows: Vec<Result<(Option<f64>, Option<MetastableSide>)>> = abscissae
        .par_iter()
        .map(|&x| {
            let mut kn = k_over_n;
            let base = apply_axis(params, axis1, x, &mut kn);
            let pred = |y: f64| -> bool {
                let mut kk = kn;
                let at = apply_axis(&base, axis2, y, &mut kk);
                exists_at(&at, family, kk, &settings).unwrap_or(false)
            };
            let (lo, hi) = range;
            let (at_lo, at_hi) = (pred(lo), pred(hi));
            if at_lo == at_hi {
                return Ok((None, None));
            }
            let (a, b) = bisect_predicate(pred, lo, hi, tolerance);
            let side = if at_lo {
                MetastableSide::Below
            } else {
                MetastableSide::Above
            };
            Ok((Some(0.5 * (a + b)), Some(side)))
        })
        .collect();
    let mut boundary = Vec::with_capacity(rows.len());
    let mut sides = Vec::with_capacity(rows.len());
    for (x, r) in abscissae.iter().zip(rows) {
        let (y, s) = r?;
        boundary.push((*x, y));
        sides.push(s);
    }
    Ok(MetastabilityRegion {
        axis1,
        axis2,
        boundary,
        side_with_metastable: sides,
    })
}

/// Highest value along `axis` (T or Γ, scaled) at which the ferro state with flipped fraction
/// k/N stays metastable; `None` if it is not metastable at the lower end.
pub fn fm_ceiling(
    params: &ModelParams,
    k_over_n: f64,
    axis: RegionAxis,
    lower: f64,
    upper: f64,
    tolerance: f64,
) -> Result<Option<f64>> {
    let r = trace_region(
        params,
        StateFamily::Ferro,
        RegionAxis::KOverN,
        &[k_over_n],
        axis,
        (lower, upper),
        k_over_n,
        tolerance,
    )?;
    match (r.boundary[0].1, r.side_with_metastable[0]) {
        (Some(y), Some(MetastableSide::Below)) => Ok(Some(y)),
        (None, _) => {
            let settings = SolverSettings::default();
            let mut kn = k_over_n;
            let at = apply_axis(params, axis, upper, &mut kn);
            Ok(
                if exists_at(&at, StateFamily::Ferro, k_over_n, &settings)? {
                    Some(upper)
                } else {
                    None
                },
            )
        }
        _ => Ok(None),
    }
}

/// Boltzmann occupancy of discrete levels.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancySpectrum {
    /// Level label (k for ferro, imbalance i for antiferro).
    pub levels: Vec<usize>,
    /// Energy per logical qubit.
    pub energies: Vec<f64>,
    pub log_degeneracies: Vec<f64>,
    /// log d - β N E.
    pub log_weights: Vec<f64>,
    pub probabilities: Vec<f64>,
}

fn normalize(
    levels: Vec<usize>,
    energies: Vec<f64>,
    log_d: Vec<f64>,
    beta: f64,
    n: usize,
) -> OccupancySpectrum {
    let nf = n as f64;
    let (log_weights, probabilities) = if beta.is_infinite() {
        let e_min = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let lw: Vec<f64> = energies
            .iter()
            .zip(&log_d)
            .map(|(&e, &d)| if e == e_min { d } else { f64::NEG_INFINITY })
            .collect();
        let top = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = lw.iter().map(|w| (w - top).exp()).sum();
        let p = lw.iter().map(|w| (w - top).exp() / z).collect();
        (lw, p)
    } else {
        let lw: Vec<f64> = energies
            .iter()
            .zip(&log_d)
            .map(|(&e, &d)| d - beta * nf * e)
            .collect();
        let top = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = lw.iter().map(|w| (w - top).exp()).sum();
        let p = lw.iter().map(|w| (w - top).exp() / z).collect();
        (lw, p)
    };
    OccupancySpectrum {
        levels,
        energies,
        log_degeneracies: log_d,
        log_weights,
        probabilities,
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::Domain {
            param: "beta",
            value: beta,
        });
    }
    Ok(())
}

/// Occupancy of the fully ordered antiferro levels at the end of the anneal. Level i has
/// |N_up - N_down| = 2i, energy C²[J(2i/N)² - λ] per logical qubit.
pub fn af_occupancy(j: f64, c: f64, lam: f64, beta: f64, n: usize) -> Result<OccupancySpectrum> {
    check_beta(beta)?;
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::Input(format!(
            "N must be even and positive, got {n}"
        )));
    }
    let nf = n as f64;
    let levels: Vec<usize> = (0..=n / 2).collect();
    let energies = levels
        .iter()
        .map(|&i| c * c * (j * (2.0 * i as f64 / nf).powi(2) - lam))
        .collect();
    let log_d = levels
        .iter()
        .map(|&i| ln_binomial(n as u64, (n / 2 - i) as u64) + if i > 0 { LN_2 } else { 0.0 })
        .collect();
    Ok(normalize(levels, energies, log_d, beta, n))
}

/// Log-degeneracy of the ferro level with k flipped logical qubits out of N.
pub fn fm_log_degeneracy(n: usize, k: usize) -> f64 {
    let base = ln_binomial(n as u64, k as u64);
    if 2 * k == n {
        base
    } else {
        base + LN_2
    }
}

/// Occupancy of the ferro levels k = 0..N/2 at Γ = 0, with classical sector values w = ±1.
pub fn fm_occupancy(params: &ModelParams, n: usize) -> Result<OccupancySpectrum> {
    params.validate()?;
    if n == 0 {
        return Err(Error::Input("N must be positive".into()));
    }
    let cold = params.with_temperature(0.0).with_gamma(0.0);
    let levels: Vec<usize> = (0..=n / 2).collect();
    let energies = levels
        .iter()
        .map(|&k| {
            let cfg = if k == 0 {
                SectorConfig::symmetric(1.0)
            } else {
                SectorConfig::two_sector(k as f64 / n as f64, 1.0, -1.0)?
            };
            free_energy(&cold, &cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    let log_d = levels.iter().map(|&k| fm_log_degeneracy(n, k)).collect();
    let beta = params.beta();
    Ok(normalize(levels, energies, log_d, beta, n))
}

/// Degeneracy-augmented free energy F_k / C^max(p,q) of the k-th ferro level at the current
/// (T, Γ), or `None` when that level is not metastable.
pub fn fm_level_free_energy(params: &ModelParams, n: usize, k: usize) -> Result<Option<f64>> {
    let settings = SolverSettings::default();
    let scale = params.energy_scale();
    if k == 0 {
        let g = global_minimum(params, &[1.0], &settings)?;
        let w = g.config.ws()[0];
        return Ok(Some(
            free_energy_with_degeneracy(params, n as u64, 0, w, w)? / scale,
        ));
    }
    let Some(sol) = fm_mixed_solution(params, k as f64 / n as f64, &settings)? else {
        return Ok(None);
    };
    let ws = sol.config.ws();
    Ok(Some(
        free_energy_with_degeneracy(params, n as u64, k as u64, ws[0], ws[1])? / scale,
    ))
}

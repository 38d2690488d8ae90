use crate::error::{Error, Result};
use crate::free_energy::Terms;
use crate::numeric::{bisect, bisect_predicate, brent_min, linspace, richardson_derivative};
use crate::params::{Coupling, ModelParams};
use crate::saddle::{profile_minima, Profile, SolverSettings};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalAxis {
    /// Abscissae are Γ/C, ordinates T/C.
    TOfGamma,
    /// Abscissae are T/C, ordinates Γ/C.
    GammaOfT,
}

/// Point on a p=q=2 critical line in units of C. `None` where the ordered phase is absent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub gamma_over_c: Option<f64>,
    pub t_over_c: Option<f64>,
}

fn p2_coupling(params: &ModelParams) -> Result<f64> {
    if params.p != 2 || params.q != 2 {
        return Err(Error::Input(format!(
            "critical line needs p = q = 2, got p={}, q={}",
            params.p, params.q
        )));
    }
    Ok(match params.coupling {
        Coupling::Ferro => params.j + params.lambda,
        Coupling::Antiferro => params.lambda,
    })
}

/// Solves g = 2K tanh(g/t) for g at fixed t, with K the effective p=q=2 coupling.
fn gamma_of_t(k: f64, t: f64) -> Option<f64> {
    if t == 0.0 {
        return Some(2.0 * k);
    }
    if t >= 2.0 * k {
        return None;
    }
    bisect(
        |g| g - 2.0 * k * (g / t).tanh(),
        1e-300_f64.max(t * 1e-12),
        2.0 * k,
        0.0,
        300,
    )
}

fn t_of_gamma(k: f64, g: f64) -> Option<f64> {
    if g > 2.0 * k {
        return None;
    }
    if g == 2.0 * k {
        return Some(0.0);
    }
    if g == 0.0 {
        return Some(2.0 * k);
    }
    Some(g / (g / (2.0 * k)).atanh())
}

/// Critical line of the p=q=2 model, Γ/C = 2K tanh(βΓ) with K = J+λ (ferro) or λ (antiferro).
pub fn critical_line_p2(
    params: &ModelParams,
    axis: CriticalAxis,
    abscissae: &[f64],
) -> Result<Vec<CriticalPoint>> {
    params.validate()?;
    let k = p2_coupling(params)?;
    if abscissae.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::Input(
            "critical-line abscissae must be finite and non-negative".into(),
        ));
    }
    Ok(abscissae
        .par_iter()
        .map(|&x| match axis {
            CriticalAxis::GammaOfT => CriticalPoint {
                gamma_over_c: gamma_of_t(k, x),
                t_over_c: Some(x),
            },
            CriticalAxis::TOfGamma => CriticalPoint {
                gamma_over_c: Some(x),
                t_over_c: t_of_gamma(k, x),
            },
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaylorMethod {
    AnalyticT0,
    Numeric,
}

/// Coefficients of m², m³, m⁴, m⁶ in F/C^max(p,q) around m = 0. Analytic sets carry only the
/// closed-form terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorCoefficients {
    pub c2: Option<f64>,
    pub c3: Option<f64>,
    pub c4: Option<f64>,
    pub c6: Option<f64>,
    pub method: TaylorMethod,
}

fn field_scale(params: &ModelParams) -> f64 {
    let c = params.nesting;
    params.p as f64 * params.j * c.powi(params.p as i32 - 1)
        + params.q as f64 * params.lambda * c.powi(params.q as i32 - 1)
        + params.eta
}

pub fn taylor_coefficients(
    params: &ModelParams,
    method: TaylorMethod,
) -> Result<TaylorCoefficients> {
    params.validate()?;
    if params.gamma == 0.0 && params.temperature == 0.0 {
        return Err(Error::Domain {
            param: "gamma",
            value: 0.0,
        });
    }
    match method {
        TaylorMethod::AnalyticT0 => analytic_t0(params),
        TaylorMethod::Numeric => Ok(numeric_taylor(params)),
    }
}

fn analytic_t0(params: &ModelParams) -> Result<TaylorCoefficients> {
    if params.temperature != 0.0
        || params.q != 2
        || params.p < 3
        || params.coupling != Coupling::Ferro
    {
        return Err(Error::Input(
            "closed-form coefficients need T = 0, q = 2, p >= 3, ferro coupling".into(),
        ));
    }
    let (j, l, c, g) = (params.j, params.lambda, params.nesting, params.gamma);
    let p = params.p as i32;
    let cp = c.powi(p);
    let c2 = (l * c * c - 2.0 * l * l * c.powi(3) / g) / cp;
    let (c3, c4) = match p {
        3 => (Some(2.0 * j * (1.0 - 3.0 * c * l / g)), None),
        4 => (
            Some(0.0),
            Some(3.0 * j - 8.0 * j * c * l / g + 2.0 * c * l.powi(4) / g.powi(3)),
        ),
        _ => (Some(0.0), Some(2.0 * l.powi(4) * c.powi(5 - p) / g.powi(3))),
    };
    Ok(TaylorCoefficients {
        c2: Some(c2),
        c3,
        c4,
        c6: None,
        method: TaylorMethod::AnalyticT0,
    })
}

/// Distance from m = 0 to the nearest complex singularity of F, estimated from |h(r)| = |Γ + iπT/2|.
fn analytic_radius(params: &ModelParams) -> f64 {
    let c = params.nesting;
    let (p, q) = (params.p as i32, params.q as i32);
    let target = params
        .gamma
        .hypot(std::f64::consts::FRAC_PI_2 * params.temperature);
    let field = |r: f64| {
        p as f64 * params.j * c.powi(p - 1) * r.powi(p - 1)
            + q as f64 * params.lambda * c.powi(q - 1) * r.powi(q - 1)
    };
    if field(1.0) <= target {
        return 1.0;
    }
    let (lo, hi) = bisect_predicate(|r| field(r) >= target, 0.0, 1.0, 1e-12);
    0.5 * (lo + hi)
}

fn numeric_taylor(params: &ModelParams) -> TaylorCoefficients {
    let t = Terms::new(params);
    let scale = params.energy_scale();
    let f = |m: f64| t.free_energy_symmetric(m) / scale;
    let h = 0.3 * analytic_radius(params);
    let coef = |order: usize, fact: f64| richardson_derivative(f, 0.0, order, h, 5) / fact;
    TaylorCoefficients {
        c2: Some(coef(2, 2.0)),
        c3: Some(coef(3, 6.0)),
        c4: Some(coef(4, 24.0)),
        c6: Some(coef(6, 720.0)),
        method: TaylorMethod::Numeric,
    }
}

/// Effective coupling K in the linearized condition 2CK tanh(βΓ)/Γ = 1, if the m² term exists.
fn quadratic_coupling(params: &ModelParams) -> Option<f64> {
    match (params.coupling, params.p, params.q) {
        (Coupling::Antiferro, _, 2) => Some(params.lambda),
        (Coupling::Antiferro, _, _) => None,
        (Coupling::Ferro, 2, 2) => Some(params.j + params.lambda),
        (Coupling::Ferro, _, 2) => Some(params.lambda),
        (Coupling::Ferro, 2, _) => Some(params.j),
        _ => None,
    }
}

/// Unscaled Γ where the m² coefficient of F vanishes.
fn gamma_c2_raw(params: &ModelParams) -> Option<f64> {
    let k = quadratic_coupling(params)?;
    if params.eta != 0.0 || k <= 0.0 {
        return None;
    }
    let a = 2.0 * params.nesting * k;
    gamma_of_t(a / 2.0, params.temperature)
}

/// Γ_c2 / C^(p-1), the field where the m = 0 state loses stability.
pub fn gamma_c2(params: &ModelParams) -> Result<Option<f64>> {
    params.validate()?;
    Ok(gamma_c2_raw(params).map(|g| g / gamma_unit(params)))
}

fn gamma_unit(params: &ModelParams) -> f64 {
    params.nesting.powi(params.p as i32 - 1)
}

/// Two-minima structure of a symmetric profile at one field value.
#[derive(Debug, Clone, Copy)]
struct Basins {
    inner: (f64, f64),
    outer: (f64, f64),
    global: f64,
}

fn basins(profile: &Profile, points: usize) -> Option<Basins> {
    basins_of(|w| profile.value(w), points)
}

fn basins_of<F: Fn(f64) -> f64>(f: F, points: usize) -> Option<Basins> {
    let minima = profile_minima(f, 0.0, 1.0, points);
    let global = minima.iter().min_by(|a, b| a.1.total_cmp(&b.1))?.0;
    let inner = *minima.first()?;
    let outer = *minima.last()?;
    Some(Basins {
        inner,
        outer,
        global,
    })
}

/// First-order degeneracy field of a one-parameter family of symmetric profiles.
pub(crate) fn degeneracy_field<F>(make: F, upper: f64, points: usize) -> Option<f64>
where
    F: Fn(f64) -> Profile + Sync,
{
    let n_scan = 400;
    let grid = linspace(upper / n_scan as f64, upper, n_scan);
    let scan: Vec<Option<Basins>> = grid.par_iter().map(|&g| basins(&make(g), points)).collect();
    let locate = |a: f64, b: f64, ba: &Basins, bb: &Basins| -> Option<f64> {
        let split = 0.5 * (ba.global + bb.global);
        let outer_at_a = ba.global > split;
        let (lo, hi) = bisect_predicate(
            |g| basins(&make(g), points).map_or(outer_at_a, |x| (x.global > split) == outer_at_a),
            a,
            b,
            1e-12 * upper,
        );
        Some(0.5 * (lo + hi))
    };
    for i in 0..grid.len() - 1 {
        let (Some(a), Some(b)) = (scan[i], scan[i + 1]) else {
            continue;
        };
        let two_a = a.outer.0 - a.inner.0 > 1e-6;
        let two_b = b.outer.0 - b.inner.0 > 1e-6;
        let d_a = a.outer.1 - a.inner.1;
        let d_b = b.outer.1 - b.inner.1;
        if two_a && two_b && d_a < 0.0 && d_b >= 0.0 {
            return locate(grid[i], grid[i + 1], &a, &b);
        }
        if (a.global - b.global).abs() > 0.05 {
            let (mut lo, mut hi, mut blo, mut bhi) = (grid[i], grid[i + 1], a, b);
            loop {
                if hi - lo < 1e-9 * upper {
                    if (blo.global - bhi.global).abs() > 1e-2 {
                        return Some(0.5 * (lo + hi));
                    }
                    break;
                }
                let mid = 0.5 * (lo + hi);
                let bm = basins(&make(mid), points)?;
                if (blo.global - bm.global).abs() >= (bm.global - bhi.global).abs() {
                    hi = mid;
                    bhi = bm;
                } else {
                    lo = mid;
                    blo = bm;
                }
                let da = blo.outer.1 - blo.inner.1;
                let db = bhi.outer.1 - bhi.inner.1;
                if blo.outer.0 - blo.inner.0 > 1e-6
                    && bhi.outer.0 - bhi.inner.0 > 1e-6
                    && da < 0.0
                    && db >= 0.0
                {
                    return locate(lo, hi, &blo, &bhi);
                }
            }
        }
    }
    None
}

/// Γ_c1 / C^(p-1): field where the two symmetric minima are degenerate.
pub fn locate_gamma_c1(params: &ModelParams, settings: &SolverSettings) -> Result<Option<f64>> {
    params.validate()?;
    settings.validate()?;
    let base = *params;
    let g = degeneracy_field(
        |g| Profile::new(&base.with_gamma(g)),
        1.05 * field_scale(params),
        settings.grid_points / 2 + 1,
    );
    Ok(g.map(|g| g / gamma_unit(params)))
}

/// Degenerate minima at Γ_c1: (Γ_c1 / C^(p-1), inner m, outer m).
pub fn degenerate_minima(
    params: &ModelParams,
    settings: &SolverSettings,
) -> Result<Option<(f64, f64, f64)>> {
    let Some(g) = locate_gamma_c1(params, settings)? else {
        return Ok(None);
    };
    let at = params.with_gamma(g * gamma_unit(params));
    let b = basins(&Profile::new(&at), settings.grid_points / 2 + 1)
        .ok_or_else(|| Error::Numerical("profile has no minimum".into()))?;
    Ok(Some((g, b.inner.0, b.outer.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionOrder {
    First,
    Second,
    CoexistingFirstAndSecond,
    None,
}

impl TransitionOrder {
    pub fn as_str(self) -> &'static str {
        match self {
            TransitionOrder::First => "first",
            TransitionOrder::Second => "second",
            TransitionOrder::CoexistingFirstAndSecond => "coexisting_first_and_second",
            TransitionOrder::None => "none",
        }
    }
}

/// Transition summary in scaled units Γ/C^(p-1) and F/C^max(p,q).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransitionReport {
    pub gamma_c1: Option<f64>,
    pub gamma_c2: Option<f64>,
    pub order: TransitionOrder,
    pub barrier_height: Option<f64>,
    pub barrier_width: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Barrier {
    /// F(max between the minima) - F(minima), normalized by C^max(p,q).
    pub height: f64,
    /// Distance in m between the two degenerate minima.
    pub width: f64,
}

fn profile_barrier<F: Fn(f64) -> f64>(f: F, scale: f64, points: usize) -> Option<Barrier> {
    let b = basins_of(&f, points)?;
    if b.outer.0 - b.inner.0 <= 1e-6 {
        return Some(Barrier {
            height: 0.0,
            width: 0.0,
        });
    }
    let (_, neg_max) = brent_min(|w| -f(w), b.inner.0, b.outer.0, 1e-12);
    let floor = b.inner.1.max(b.outer.1);
    Some(Barrier {
        height: ((-neg_max) - floor).max(0.0) / scale,
        width: b.outer.0 - b.inner.0,
    })
}

/// Barrier height and width of the symmetric profile at the parameters given (normally at Γ_c1).
pub fn barrier_metrics(params: &ModelParams, settings: &SolverSettings) -> Result<Barrier> {
    params.validate()?;
    settings.validate()?;
    let profile = Profile::new(params);
    profile_barrier(
        |w| profile.value(w),
        params.energy_scale(),
        settings.grid_points / 2 + 1,
    )
    .ok_or_else(|| Error::Numerical("profile has no minimum".into()))
}

/// Locates Γ_c1 and Γ_c2 for the family with Γ free and classifies the transition.
pub fn classify_transition(
    params: &ModelParams,
    settings: &SolverSettings,
) -> Result<TransitionReport> {
    let gamma_c1 = locate_gamma_c1(params, settings)?;
    let gamma_c2 = gamma_c2(params)?;
    let order = match (gamma_c1, gamma_c2) {
        (Some(a), Some(b)) if a < b => TransitionOrder::CoexistingFirstAndSecond,
        (Some(_), _) => TransitionOrder::First,
        (None, Some(_)) => TransitionOrder::Second,
        (None, None) => TransitionOrder::None,
    };
    let (barrier_height, barrier_width) = match gamma_c1 {
        Some(g) => {
            let at = params.with_gamma(g * gamma_unit(params));
            let b = barrier_metrics(&at, settings)?;
            (Some(b.height), Some(b.width))
        }
        None => (None, None),
    };
    Ok(TransitionReport {
        gamma_c1,
        gamma_c2,
        order,
        barrier_height,
        barrier_width,
    })
}

fn quartic_negative_at_gamma_c2(params: &ModelParams) -> Option<bool> {
    let g = gamma_c2_raw(params)?;
    let at = params.with_gamma(g);
    numeric_taylor(&at).c4.map(|c4| c4 < 0.0)
}

/// λ_c · C^(q-p) at the given temperature: boundary between first-order (below) and
/// second-order (above) transitions, from the sign of the quartic coefficient at Γ_c2.
/// `None` when the ordered phase does not support a first-order transition at this T.
pub fn lambda_critical(params: &ModelParams, temperature: f64) -> Result<Option<f64>> {
    params.validate()?;
    if params.q != 2 || params.p < 3 || params.coupling != Coupling::Ferro {
        return Err(Error::Input(
            "lambda_critical needs a ferro family with q = 2 and p >= 3".into(),
        ));
    }
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(Error::Domain {
            param: "temperature",
            value: temperature,
        });
    }
    let base = params.with_temperature(temperature).with_eta(0.0);
    let c = params.nesting;
    let unit = c.powi(params.q as i32 - params.p as i32);
    let lo = (temperature / (2.0 * c)).max(1e-9 / unit) * (1.0 + 1e-9);
    let first = |l: f64| quartic_negative_at_gamma_c2(&base.with_lambda(l)).unwrap_or(false);
    if !first(lo) {
        return Ok(None);
    }
    let mut hi = (2.0 * lo).max(1.0 / unit);
    let mut doublings = 0;
    while first(hi) {
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::Numerical("no upper bracket for lambda_c".into()));
        }
    }
    let (a, b) = bisect_predicate(first, lo, hi, 1e-6 / unit);
    Ok(Some(0.5 * (a + b) * unit))
}

/// Temperature (in units of C^p) above which `lambda_critical` reports no first-order regime.
pub fn lambda_critical_end(params: &ModelParams, tolerance: f64) -> Result<f64> {
    let unit = params.nesting.powi(params.p as i32);
    let exists = |t: f64| matches!(lambda_critical(params, t * unit), Ok(Some(_)));
    if !exists(0.0) {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while exists(hi) {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Numerical("no end point for lambda_c".into()));
        }
    }
    let (a, b) = bisect_predicate(exists, 0.0, hi, tolerance);
    Ok(0.5 * (a + b))
}

/// True when the hybrid symmetric profile has a first-order jump somewhere in Γ.
fn hybrid_first_order(params: &ModelParams, points: usize) -> bool {
    let base = *params;
    degeneracy_field(
        |g| Profile::hybrid(&base.with_gamma(g)),
        1.05 * field_scale(params),
        points,
    )
    .is_some()
}

/// Critical λ·C^(q-p) versus η/C^(p-1) for the hybrid code at T = 0; `None` where no first-order
/// regime exists down to λ = 0.
pub fn hybrid_critical_line(
    params: &ModelParams,
    etas_scaled: &[f64],
    settings: &SolverSettings,
) -> Result<Vec<(f64, Option<f64>)>> {
    params.validate()?;
    settings.validate()?;
    let c = params.nesting;
    let eta_unit = c.powi(params.p as i32 - 1);
    let lam_unit = c.powi(params.q as i32 - params.p as i32);
    let points = settings.grid_points / 2 + 1;
    let base = params.with_temperature(0.0);
    etas_scaled
        .par_iter()
        .map(|&e| {
            if !(e >= 0.0 && e.is_finite()) {
                return Err(Error::Domain {
                    param: "eta",
                    value: e,
                });
            }
            let at = base.with_eta(e * eta_unit);
            let first = |l: f64| hybrid_first_order(&at.with_lambda(l), points);
            let lo = 1e-6 / lam_unit;
            if !first(lo) {
                return Ok((e, None));
            }
            let mut hi = 1.0 / lam_unit;
            while first(hi) {
                hi *= 2.0;
                if hi * lam_unit > 1e6 {
                    return Err(Error::Numerical(
                        "no upper bracket for the hybrid critical line".into(),
                    ));
                }
            }
            let (a, b) = bisect_predicate(first, lo, hi, 1e-4 / lam_unit);
            Ok((e, Some(0.5 * (a + b) * lam_unit)))
        })
        .collect()
}

use crate::error::{Error, Result};
use crate::free_energy::Terms;
use crate::numeric::{bisect, brent_min, linspace};
use crate::params::{validate_fractions, Coupling, ModelParams, SectorConfig};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub grid_points: usize,
    pub fp_tolerance: f64,
    pub max_iterations: usize,
    pub damping: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            grid_points: 2001,
            fp_tolerance: 1e-12,
            max_iterations: 10_000,
            damping: 0.5,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 3 || self.grid_points.is_multiple_of(2) {
            return Err(Error::Input(format!(
                "grid_points must be odd and >= 3, got {}",
                self.grid_points
            )));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::Input(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        if self.fp_tolerance.is_nan() || self.fp_tolerance <= 0.0 {
            return Err(Error::Input("fp_tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stability {
    LocalMin,
    Saddle,
    LocalMax,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::LocalMin => "local_min",
            Stability::Saddle => "saddle",
            Stability::LocalMax => "local_max",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SaddleSolution {
    pub config: SectorConfig,
    pub residual: f64,
    pub stability: Stability,
    pub free_energy: f64,
    /// Number of Z2-equivalent solutions represented by this one.
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectoredSolve {
    pub solutions: Vec<SaddleSolution>,
    pub seeds: usize,
    pub converged_seeds: usize,
}

/// One-dimensional order-parameter path: uniform magnetization for ferro coupling, local order
/// ±n at zero total magnetization for antiferro coupling.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Profile {
    pub terms: Terms,
    pub local_order: bool,
    pub hybrid: bool,
}

impl Profile {
    pub fn new(params: &ModelParams) -> Self {
        Profile {
            terms: Terms::new(params),
            local_order: params.coupling == Coupling::Antiferro,
            hybrid: false,
        }
    }

    pub fn hybrid(params: &ModelParams) -> Self {
        Profile {
            hybrid: true,
            ..Profile::new(params)
        }
    }

    pub fn config(&self, w: f64) -> SectorConfig {
        if self.local_order {
            SectorConfig::local_order(w)
        } else {
            SectorConfig::symmetric(w)
        }
    }

    pub fn value(&self, w: f64) -> f64 {
        match (self.local_order, self.hybrid) {
            (false, false) => self.terms.free_energy_symmetric(w),
            (false, true) => self.terms.free_energy_hybrid(&[1.0], &[w]),
            (true, false) => self.terms.free_energy(&[0.5, 0.5], &[w, -w]),
            (true, true) => self.terms.free_energy_hybrid(&[0.5, 0.5], &[w, -w]),
        }
    }

    pub fn slope(&self, w: f64) -> f64 {
        if self.hybrid {
            let h = 1e-6;
            return (self.value(w + h) - self.value(w - h)) / (2.0 * h);
        }
        let mut g = [0.0; 2];
        if self.local_order {
            self.terms.gradient(&[0.5, 0.5], &[w, -w], &mut g);
            g[0] - g[1]
        } else {
            self.terms.gradient(&[1.0], &[w], &mut g[..1]);
            g[0]
        }
    }

    pub fn residual(&self, w: f64) -> f64 {
        let h = if self.local_order {
            self.terms.h_q * w.powi(self.terms.q - 1)
        } else {
            self.terms.field(w, w)
        };
        w - self.terms.response(h)
    }

    pub fn z2_symmetric(&self) -> bool {
        if self.local_order {
            true
        } else {
            self.terms.p % 2 == 0 && self.terms.q % 2 == 0
        }
    }

    pub fn stability(&self, w: f64, scale: f64) -> Stability {
        let probe = |d: f64| -> (f64, f64) {
            let f0 = self.value(w);
            let left = if w - d >= -1.0 {
                self.value(w - d) - f0
            } else {
                f64::NAN
            };
            let right = if w + d <= 1.0 {
                self.value(w + d) - f0
            } else {
                f64::NAN
            };
            (left, right)
        };
        if w.abs() >= 1.0 {
            let (l, r) = probe(1e-3);
            let inner = if w > 0.0 { l } else { r };
            return if inner > 0.0 {
                Stability::LocalMin
            } else {
                Stability::LocalMax
            };
        }
        let h = 1e-5_f64.min((1.0 - w.abs()) / 2.0);
        let curvature = (self.slope(w + h) - self.slope(w - h)) / (2.0 * h) / scale;
        if curvature > 1e-8 {
            return Stability::LocalMin;
        }
        if curvature < -1e-8 {
            return Stability::LocalMax;
        }
        let noise = 1e-13 * scale.max(self.value(w).abs());
        for d in [1e-3, 1e-2] {
            let (l, r) = probe(d);
            let l = if l.is_nan() { r } else { l };
            let r = if r.is_nan() { l } else { r };
            if l > noise && r > noise {
                return Stability::LocalMin;
            }
            if l < -noise && r < -noise {
                return Stability::LocalMax;
            }
            if (l > noise && r < -noise) || (l < -noise && r > noise) {
                return Stability::Saddle;
            }
        }
        Stability::Saddle
    }

    fn solution(&self, w: f64, scale: f64) -> SaddleSolution {
        let multiplicity = if self.z2_symmetric() && w.abs() > 1e-12 {
            2
        } else {
            1
        };
        SaddleSolution {
            config: self.config(w),
            residual: self.residual(w).abs(),
            stability: self.stability(w, scale),
            free_energy: self.value(w),
            multiplicity,
        }
    }
}

fn dedup_sorted(mut ws: Vec<f64>, tol: f64) -> Vec<f64> {
    ws.sort_by(|a, b| a.total_cmp(b));
    let mut out: Vec<f64> = Vec::with_capacity(ws.len());
    for w in ws {
        if out.last().is_none_or(|&last| (w - last).abs() > tol) {
            out.push(w);
        }
    }
    out
}

/// All fixed points of w = (h/E) tanh(βE) along the symmetric path.
pub fn solve_symmetric(
    params: &ModelParams,
    settings: &SolverSettings,
) -> Result<Vec<SaddleSolution>> {
    params.validate()?;
    settings.validate()?;
    let profile = Profile::new(params);
    let scale = params.energy_scale();
    let tol = settings.fp_tolerance;
    let grid = linspace(-1.0, 1.0, settings.grid_points);
    let g: Vec<f64> = grid.iter().map(|&w| profile.residual(w)).collect();
    let mut roots = Vec::new();
    for i in 0..grid.len() {
        if g[i] == 0.0 {
            roots.push(grid[i]);
            continue;
        }
        if i + 1 < grid.len() && g[i + 1] != 0.0 && g[i].signum() != g[i + 1].signum() {
            if let Some(r) = bisect(|w| profile.residual(w), grid[i], grid[i + 1], 0.0, 200) {
                if profile.residual(r).abs() <= tol {
                    roots.push(r);
                }
            }
        }
        if i > 0 && i + 1 < grid.len() {
            let (a, b, c) = (g[i - 1], g[i], g[i + 1]);
            let touches = b.abs() < a.abs()
                && b.abs() < c.abs()
                && a.signum() == b.signum()
                && b.signum() == c.signum();
            if touches {
                let (w, r) = brent_min(
                    |w| profile.residual(w).abs(),
                    grid[i - 1],
                    grid[i + 1],
                    1e-14,
                );
                if r <= tol {
                    roots.push(w);
                }
            }
        }
    }
    let mut roots = dedup_sorted(roots, 1e-8);
    if profile.z2_symmetric() {
        roots.retain(|&w| w >= -1e-14);
        for w in roots.iter_mut() {
            *w = w.abs();
        }
    }
    if roots.is_empty() {
        return Err(Error::Numerical(
            "no fixed point of the saddle equation found".into(),
        ));
    }
    Ok(roots
        .into_iter()
        .map(|w| profile.solution(w, scale))
        .collect())
}

fn sector_response(t: &Terms, fractions: &[f64], ws: &[f64], out: &mut [f64]) {
    let m: f64 = fractions.iter().zip(ws).map(|(f, w)| f * w).sum();
    let hm = t.h_p * m.powi(t.p - 1);
    for (o, &w) in out.iter_mut().zip(ws) {
        *o = t.response(hm + t.h_q * w.powi(t.q - 1));
    }
}

fn sector_residual(t: &Terms, fractions: &[f64], ws: &[f64]) -> f64 {
    let mut r = vec![0.0; ws.len()];
    sector_response(t, fractions, ws, &mut r);
    ws.iter()
        .zip(&r)
        .map(|(w, x)| (w - x).abs())
        .fold(0.0, f64::max)
}

/// Jacobian of the sector response map, d rhs_j / d w_i.
fn response_jacobian(t: &Terms, fractions: &[f64], ws: &[f64]) -> DMatrix<f64> {
    let s = ws.len();
    let m: f64 = fractions.iter().zip(ws).map(|(f, w)| f * w).sum();
    let hm = t.h_p * m.powi(t.p - 1);
    let a = t.h_p * (t.p - 1) as f64 * m.powi(t.p - 2);
    DMatrix::from_fn(s, s, |j, i| {
        let h = hm + t.h_q * ws[j].powi(t.q - 1);
        let mut dh = a * fractions[i];
        if i == j {
            dh += t.h_q * (t.q - 1) as f64 * ws[j].powi(t.q - 2);
        }
        t.response_slope(h) * dh
    })
}

fn newton_polish(t: &Terms, fractions: &[f64], start: &[f64], tol: f64) -> Option<Vec<f64>> {
    let s = start.len();
    let mut w = start.to_vec();
    let mut r = vec![0.0; s];
    for _ in 0..60 {
        sector_response(t, fractions, &w, &mut r);
        let f = DVector::from_iterator(s, w.iter().zip(&r).map(|(a, b)| a - b));
        if f.amax() <= 0.1 * tol {
            break;
        }
        let jac = DMatrix::identity(s, s) - response_jacobian(t, fractions, &w);
        let step = jac.lu().solve(&(-f))?;
        for i in 0..s {
            w[i] = (w[i] + step[i]).clamp(-1.0, 1.0);
        }
        if step.amax() < 1e-16 {
            break;
        }
    }
    if w.iter().any(|x| !x.is_finite()) || sector_residual(t, fractions, &w) > tol {
        return None;
    }
    Some(w)
}

fn damped_fixed_point(
    t: &Terms,
    fractions: &[f64],
    seed: &[f64],
    settings: &SolverSettings,
) -> Option<Vec<f64>> {
    let s = seed.len();
    let mut w = seed.to_vec();
    let mut r = vec![0.0; s];
    let d = settings.damping;
    for it in 0..settings.max_iterations {
        sector_response(t, fractions, &w, &mut r);
        let mut step: f64 = 0.0;
        for i in 0..s {
            let next = (1.0 - d) * w[i] + d * r[i];
            step = step.max((next - w[i]).abs());
            w[i] = next;
        }
        if step < settings.fp_tolerance * 0.1 {
            return newton_polish(t, fractions, &w, settings.fp_tolerance);
        }
        if step < 1e-4 && it % 16 == 15 {
            if let Some(x) = newton_polish(t, fractions, &w, settings.fp_tolerance) {
                return Some(x);
            }
        }
    }
    newton_polish(t, fractions, &w, settings.fp_tolerance)
}

/// Symmetric finite-difference Hessian of the sector free energy, normalized by C^max(p,q).
pub(crate) fn sector_hessian(t: &Terms, fractions: &[f64], ws: &[f64], scale: f64) -> DMatrix<f64> {
    let s = ws.len();
    let h = 1e-5;
    let mut hess = DMatrix::zeros(s, s);
    let mut gp = vec![0.0; s];
    let mut gm = vec![0.0; s];
    let mut x = ws.to_vec();
    for j in 0..s {
        x[j] = ws[j] + h;
        t.gradient(fractions, &x, &mut gp);
        x[j] = ws[j] - h;
        t.gradient(fractions, &x, &mut gm);
        x[j] = ws[j];
        for i in 0..s {
            hess[(i, j)] = (gp[i] - gm[i]) / (2.0 * h) / scale;
        }
    }
    (&hess + hess.transpose()) * 0.5
}

pub(crate) fn hessian_eigenvalues(
    t: &Terms,
    fractions: &[f64],
    ws: &[f64],
    scale: f64,
) -> Vec<f64> {
    SymmetricEigen::new(sector_hessian(t, fractions, ws, scale))
        .eigenvalues
        .iter()
        .copied()
        .collect()
}

/// Largest eigenvalue of the linearized response map; below one means the fixed point attracts.
pub(crate) fn response_map_spectral_max(t: &Terms, fractions: &[f64], ws: &[f64]) -> f64 {
    let s = ws.len();
    let m: f64 = fractions.iter().zip(ws).map(|(f, w)| f * w).sum();
    let hm = t.h_p * m.powi(t.p - 1);
    let a = t.h_p * (t.p - 1) as f64 * m.powi(t.p - 2);
    let root_p: Vec<f64> = (0..s)
        .map(|j| (t.response_slope(hm + t.h_q * ws[j].powi(t.q - 1)) / fractions[j]).sqrt())
        .collect();
    let sym = DMatrix::from_fn(s, s, |i, j| {
        let mut k = a * fractions[i] * fractions[j];
        if i == j {
            k += fractions[i] * t.h_q * (t.q - 1) as f64 * ws[i].powi(t.q - 2);
        }
        root_p[i] * k * root_p[j]
    });
    SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

fn classify_sector(t: &Terms, fractions: &[f64], ws: &[f64], scale: f64) -> Stability {
    let eig = SymmetricEigen::new(sector_hessian(t, fractions, ws, scale));
    let eps = 1e-8;
    let mut pos = 0;
    let mut neg = 0;
    let f0 = t.free_energy(fractions, ws);
    let noise = 1e-13 * scale.max(f0.abs());
    for (k, &ev) in eig.eigenvalues.iter().enumerate() {
        let sign = if ev > eps {
            1
        } else if ev < -eps {
            -1
        } else {
            let v = eig.eigenvectors.column(k);
            let shifted = |d: f64| -> f64 {
                let x: Vec<f64> = ws.iter().enumerate().map(|(i, w)| w + d * v[i]).collect();
                t.free_energy(fractions, &x) - f0
            };
            let (l, r) = (shifted(-1e-3), shifted(1e-3));
            if l > noise && r > noise {
                1
            } else if l < -noise && r < -noise {
                -1
            } else {
                0
            }
        };
        match sign {
            1 => pos += 1,
            -1 => neg += 1,
            _ => {
                pos += 1;
                neg += 1;
            }
        }
    }
    if neg == 0 {
        Stability::LocalMin
    } else if pos == 0 {
        Stability::LocalMax
    } else {
        Stability::Saddle
    }
}

fn sector_solution(
    t: &Terms,
    fractions: &[f64],
    ws: Vec<f64>,
    scale: f64,
) -> Result<SaddleSolution> {
    let residual = sector_residual(t, fractions, &ws);
    let stability = classify_sector(t, fractions, &ws, scale);
    let free_energy = t.free_energy(fractions, &ws);
    Ok(SaddleSolution {
        config: SectorConfig::from_parts(fractions, &ws)?,
        residual,
        stability,
        free_energy,
        multiplicity: 1,
    })
}

fn dedup_vectors(mut sols: Vec<Vec<f64>>, tol: f64) -> Vec<Vec<f64>> {
    sols.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut out: Vec<Vec<f64>> = Vec::new();
    for s in sols {
        let dup = out
            .iter()
            .any(|o| o.iter().zip(&s).all(|(a, b)| (a - b).abs() <= tol));
        if !dup {
            out.push(s);
        }
    }
    out
}

fn seed_grid(dim: usize, per_dim: usize) -> Vec<Vec<f64>> {
    let axis = linspace(-1.0, 1.0, per_dim);
    let mut seeds = vec![vec![]];
    for _ in 0..dim {
        seeds = seeds
            .into_iter()
            .flat_map(|s| {
                axis.iter().map(move |&a| {
                    let mut x = s.clone();
                    x.push(a);
                    x
                })
            })
            .collect();
    }
    seeds
}

/// Fixed points of the coupled sector equations from the given seeds.
pub fn solve_sectored_from(
    params: &ModelParams,
    fractions: &[f64],
    seeds: &[Vec<f64>],
    settings: &SolverSettings,
) -> Result<SectoredSolve> {
    params.validate()?;
    settings.validate()?;
    validate_fractions(fractions)?;
    if seeds.iter().any(|s| s.len() != fractions.len()) {
        return Err(Error::Input(
            "seed dimension does not match the number of sectors".into(),
        ));
    }
    let t = Terms::new(params);
    let scale = params.energy_scale();
    let found: Vec<Vec<f64>> = seeds
        .par_iter()
        .filter_map(|seed| damped_fixed_point(&t, fractions, seed, settings))
        .collect();
    let converged_seeds = found.len();
    let unique = dedup_vectors(found, 1e-8);
    let solutions = unique
        .into_iter()
        .map(|ws| sector_solution(&t, fractions, ws, scale))
        .collect::<Result<Vec<_>>>()?;
    Ok(SectoredSolve {
        solutions,
        seeds: seeds.len(),
        converged_seeds,
    })
}

/// Fixed points of the two- or three-sector equations from every corner and an 11-point grid per
/// dimension of the order-parameter cube.
pub fn solve_sectored(
    params: &ModelParams,
    fractions: &[f64],
    settings: &SolverSettings,
) -> Result<SectoredSolve> {
    if !(2..=3).contains(&fractions.len()) {
        return Err(Error::Input(format!(
            "expected 2 or 3 sectors, got {}",
            fractions.len()
        )));
    }
    solve_sectored_from(params, fractions, &seed_grid(fractions.len(), 11), settings)
}

/// Local minima of a one-dimensional profile on `[lo, hi]`, refined by Brent's method.
pub(crate) fn profile_minima<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    points: usize,
) -> Vec<(f64, f64)> {
    let grid = linspace(lo, hi, points);
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let n = grid.len();
    let mut out = Vec::new();
    for i in 0..n {
        let left_ok = i == 0 || vals[i] < vals[i - 1];
        let right_ok = i == n - 1 || vals[i] <= vals[i + 1];
        let left_ok =
            left_ok || (i > 0 && vals[i] == vals[i - 1] && i + 1 < n && vals[i] < vals[i + 1]);
        if !(left_ok && right_ok) {
            continue;
        }
        if i == 0 || i == n - 1 {
            let inner = if i == 0 { grid[1] } else { grid[n - 2] };
            let (x, fx) = brent_min(&f, grid[i].min(inner), grid[i].max(inner), 1e-12);
            if fx < vals[i] {
                out.push((x, fx));
            } else {
                out.push((grid[i], vals[i]));
            }
        } else {
            let (x, fx) = brent_min(&f, grid[i - 1], grid[i + 1], 1e-12);
            if fx <= vals[i] {
                out.push((x, fx));
            } else {
                out.push((grid[i], vals[i]));
            }
        }
    }
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (x, fx) in out {
        match merged.last_mut() {
            Some(last) if (x - last.0).abs() < 1e-7 => {
                if fx < last.1 {
                    *last = (x, fx);
                }
            }
            _ => merged.push((x, fx)),
        }
    }
    merged
}

fn zoom_refine(t: &Terms, fractions: &[f64], start: Vec<f64>, spacing: f64) -> (Vec<f64>, f64) {
    let s = start.len();
    let mut best = start;
    let mut fbest = t.free_energy(fractions, &best);
    let mut step = spacing;
    while step > 1e-11 {
        let mut improved = true;
        while improved {
            improved = false;
            for offsets in seed_grid(s, 5) {
                let cand: Vec<f64> = best
                    .iter()
                    .zip(&offsets)
                    .map(|(b, o)| (b + o * 2.0 * step).clamp(-1.0, 1.0))
                    .collect();
                let fc = t.free_energy(fractions, &cand);
                if fc < fbest {
                    fbest = fc;
                    best = cand;
                    improved = true;
                }
            }
        }
        step *= 0.5;
    }
    (best, fbest)
}

/// Refines a located minimum to a root of the slope when one is bracketed nearby.
fn polish_stationary(profile: &Profile, w: f64) -> f64 {
    let h = 1e-5;
    let (a, b) = ((w - h).max(-1.0), (w + h).min(1.0));
    let (sa, sb) = (profile.slope(a), profile.slope(b));
    if sa < 0.0 && sb > 0.0 {
        bisect(|x| profile.slope(x), a, b, 0.0, 200).unwrap_or(w)
    } else {
        w
    }
}

/// Global minimizer of the free energy by exhaustive grid scan plus refinement.
///
/// One sector scans the symmetric path (local order ±n for antiferro coupling) over `[0, 1]`,
/// which holds the global minimum for non-negative couplings. Two or three sectors scan the
/// full cube on a coarser grid.
pub fn global_minimum(
    params: &ModelParams,
    fractions: &[f64],
    settings: &SolverSettings,
) -> Result<SaddleSolution> {
    params.validate()?;
    settings.validate()?;
    validate_fractions(fractions)?;
    let scale = params.energy_scale();
    if fractions.len() == 1 {
        let profile = Profile::new(params);
        let minima = profile_minima(|w| profile.value(w), 0.0, 1.0, settings.grid_points / 2 + 1);
        let (w, _) = minima
            .into_iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .ok_or_else(|| Error::Numerical("empty profile".into()))?;
        return Ok(profile.solution(polish_stationary(&profile, w), scale));
    }
    if fractions.len() > 3 {
        return Err(Error::Input(format!(
            "expected 1 to 3 sectors, got {}",
            fractions.len()
        )));
    }
    let t = Terms::new(params);
    let per_dim = if fractions.len() == 2 {
        settings.grid_points.min(401)
    } else {
        settings.grid_points.min(81)
    };
    let axis = linspace(-1.0, 1.0, per_dim);
    let points = seed_grid(fractions.len(), per_dim);
    let vals: Vec<f64> = points
        .par_iter()
        .map(|x| t.free_energy(fractions, x))
        .collect();
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let spacing = axis[1] - axis[0];
    let candidates: Vec<Vec<f64>> = order
        .into_iter()
        .take(8)
        .map(|i| points[i].clone())
        .collect();
    let (best, _) = candidates
        .into_par_iter()
        .map(|c| zoom_refine(&t, fractions, c, spacing))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Numerical("empty grid".into()))?;
    sector_solution(&t, fractions, best, scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2(gamma_over_c: f64) -> ModelParams {
        ModelParams::new(2, 2, 1.0, 1.5)
            .with_temperature(0.02)
            .with_gamma(gamma_over_c)
    }

    #[test]
    fn three_intersections_below_critical_field() {
        let sols = solve_symmetric(&p2(4.0), &SolverSettings::default()).unwrap();
        assert_eq!(sols.len(), 2);
        assert_eq!(sols[0].config.magnetization(), 0.0);
        assert_eq!(sols[0].stability, Stability::LocalMax);
        assert!(sols[1].config.magnetization() > 0.1);
        assert_eq!(sols[1].multiplicity, 2);
        assert_eq!(sols[1].stability, Stability::LocalMin);
    }

    #[test]
    fn unique_solution_above_critical_field() {
        let sols = solve_symmetric(&p2(5.5), &SolverSettings::default()).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].config.magnetization(), 0.0);
        let big = p2(1e3 * 2.5);
        let sols = solve_symmetric(&big, &SolverSettings::default()).unwrap();
        assert_eq!(sols.len(), 1);
        assert_eq!(sols[0].stability, Stability::LocalMin);
    }

    #[test]
    fn zero_temperature_corner_states() {
        let p = ModelParams::new(2, 2, 1.0, 0.9);
        let s = SolverSettings::default();
        let sols = solve_sectored(&p, &[0.91, 0.09], &s).unwrap().solutions;
        let has = |a: f64, b: f64| sols.iter().any(|x| x.config.ws() == vec![a, b]);
        assert!(has(1.0, -1.0));
        assert!(has(1.0, 1.0) && has(-1.0, -1.0));
        let sols = solve_sectored(&p, &[0.97, 0.03], &s).unwrap().solutions;
        assert!(!sols.iter().any(|x| x.config.ws() == vec![1.0, -1.0]));
    }

    #[test]
    fn global_minimum_across_critical_field() {
        let s = SolverSettings::default();
        let below = ModelParams::new(2, 2, 1.0, 1.5).with_gamma(4.9);
        assert!(
            global_minimum(&below, &[1.0], &s)
                .unwrap()
                .config
                .magnetization()
                > 0.0
        );
        let above = below.with_gamma(5.1);
        assert_eq!(
            global_minimum(&above, &[1.0], &s)
                .unwrap()
                .config
                .magnetization(),
            0.0
        );
    }

    #[test]
    fn two_sector_global_minimum_is_uniform() {
        let p = ModelParams::new(2, 2, 1.0, 1.0)
            .with_gamma(1.0)
            .with_temperature(0.1);
        let s = SolverSettings::default();
        let g2 = global_minimum(&p, &[0.6, 0.4], &s).unwrap();
        let g1 = global_minimum(&p, &[1.0], &s).unwrap();
        assert!((g2.free_energy - g1.free_energy).abs() < 1e-10);
    }
}

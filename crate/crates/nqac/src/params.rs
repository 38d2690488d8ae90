use crate::error::{Error, Result};
use statrs::function::gamma::ln_gamma;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coupling {
    Ferro,
    Antiferro,
}

impl Coupling {
    pub fn sign(self) -> f64 {
        match self {
            Coupling::Ferro => 1.0,
            Coupling::Antiferro => -1.0,
        }
    }
}

/// Parameter tuple of the nested p-spin model with a q-body penalty.
///
/// `temperature == 0` selects the closed-form zero-temperature branch everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub p: u32,
    pub q: u32,
    pub j: f64,
    pub coupling: Coupling,
    pub lambda: f64,
    pub eta: f64,
    pub gamma: f64,
    pub temperature: f64,
    pub nesting: f64,
}

impl ModelParams {
    pub fn new(p: u32, q: u32, j: f64, lambda: f64) -> Self {
        ModelParams {
            p,
            q,
            j,
            coupling: Coupling::Ferro,
            lambda,
            eta: 0.0,
            gamma: 0.0,
            temperature: 0.0,
            nesting: 1.0,
        }
    }

    pub fn antiferro(mut self) -> Self {
        self.coupling = Coupling::Antiferro;
        self
    }

    pub fn with_coupling(mut self, coupling: Coupling) -> Self {
        self.coupling = coupling;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }

    pub fn with_nesting(mut self, c: f64) -> Self {
        self.nesting = c;
        self
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    /// Largest of p and q; free energies scale as C to this power.
    pub fn max_order(&self) -> u32 {
        self.p.max(self.q)
    }

    pub fn energy_scale(&self) -> f64 {
        self.nesting.powi(self.max_order() as i32)
    }

    /// Γ / C^(p-1), the field in saddle units.
    pub fn scaled_gamma(&self) -> f64 {
        self.gamma / self.nesting.powi(self.p as i32 - 1)
    }

    pub fn set_scaled_gamma(&mut self, g: f64) {
        self.gamma = g * self.nesting.powi(self.p as i32 - 1);
    }

    /// λ / C^(p-q), the penalty in saddle units.
    pub fn scaled_lambda(&self) -> f64 {
        self.lambda * self.nesting.powi(self.q as i32 - self.p as i32)
    }

    pub fn set_scaled_lambda(&mut self, l: f64) {
        self.lambda = l * self.nesting.powi(self.p as i32 - self.q as i32);
    }

    pub fn beta(&self) -> f64 {
        if self.temperature > 0.0 {
            1.0 / self.temperature
        } else {
            f64::INFINITY
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 2 {
            return Err(Error::Domain {
                param: "p",
                value: self.p as f64,
            });
        }
        if self.q < 2 {
            return Err(Error::Domain {
                param: "q",
                value: self.q as f64,
            });
        }
        let checks: [(&'static str, f64, f64); 6] = [
            ("J", self.j, f64::MIN_POSITIVE),
            ("lambda", self.lambda, 0.0),
            ("eta", self.eta, 0.0),
            ("gamma", self.gamma, 0.0),
            ("temperature", self.temperature, 0.0),
            ("nesting", self.nesting, 1.0),
        ];
        for (param, value, lo) in checks {
            if !value.is_finite() || value < lo {
                return Err(Error::Domain { param, value });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector {
    pub fraction: f64,
    pub w: f64,
}

/// Partition of the logical qubits into sectors of uniform magnetization.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorConfig {
    pub sectors: Vec<Sector>,
}

impl SectorConfig {
    pub fn new(sectors: Vec<Sector>) -> Result<Self> {
        let cfg = SectorConfig { sectors };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_parts(fractions: &[f64], ws: &[f64]) -> Result<Self> {
        if fractions.len() != ws.len() {
            return Err(Error::Input(format!(
                "{} fractions but {} order parameters",
                fractions.len(),
                ws.len()
            )));
        }
        Self::new(
            fractions
                .iter()
                .zip(ws)
                .map(|(&fraction, &w)| Sector { fraction, w })
                .collect(),
        )
    }

    pub fn symmetric(m: f64) -> Self {
        SectorConfig {
            sectors: vec![Sector {
                fraction: 1.0,
                w: m,
            }],
        }
    }

    /// Local order ±n on two equal halves, total magnetization zero.
    pub fn local_order(n: f64) -> Self {
        SectorConfig {
            sectors: vec![
                Sector {
                    fraction: 0.5,
                    w: n,
                },
                Sector {
                    fraction: 0.5,
                    w: -n,
                },
            ],
        }
    }

    /// Fractions (1-x, x) for a state with a fraction x of flipped logical qubits.
    pub fn two_sector(x: f64, w1: f64, w2: f64) -> Result<Self> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::Input(format!("k/N must lie in (0, 1), got {x}")));
        }
        Self::from_parts(&[1.0 - x, x], &[w1, w2])
    }

    /// Fractions ((N/2-k-1)/N, (N/2+k)/N, 1/N).
    pub fn af_three_sector(n: usize, k: usize, w: [f64; 3]) -> Result<Self> {
        Self::from_parts(&af_three_sector_fractions(n, k)?, &w)
    }

    pub fn fractions(&self) -> Vec<f64> {
        self.sectors.iter().map(|s| s.fraction).collect()
    }

    pub fn ws(&self) -> Vec<f64> {
        self.sectors.iter().map(|s| s.w).collect()
    }

    pub fn magnetization(&self) -> f64 {
        self.sectors.iter().map(|s| s.fraction * s.w).sum()
    }

    pub fn validate(&self) -> Result<()> {
        validate_fractions(&self.fractions())?;
        for s in &self.sectors {
            if !(-1.0..=1.0).contains(&s.w) {
                return Err(Error::Input(format!(
                    "order parameter {} outside [-1, 1]",
                    s.w
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn validate_fractions(fractions: &[f64]) -> Result<()> {
    if fractions.is_empty() {
        return Err(Error::Input("no sectors".into()));
    }
    for &f in fractions {
        if !(f > 0.0 && f <= 1.0) {
            return Err(Error::Input(format!("sector fraction {f} outside (0, 1]")));
        }
    }
    let total: f64 = fractions.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::Input(format!(
            "sector fractions sum to {total}, not 1"
        )));
    }
    Ok(())
}

pub fn af_three_sector_fractions(n: usize, k: usize) -> Result<[f64; 3]> {
    if !n.is_multiple_of(2) || n < 4 || k + 2 > n / 2 {
        return Err(Error::Input(format!(
            "three-sector state needs even N >= 4 and k <= N/2 - 2, got N={n}, k={k}"
        )));
    }
    let nf = n as f64;
    Ok([
        (n / 2 - k - 1) as f64 / nf,
        (n / 2 + k) as f64 / nf,
        1.0 / nf,
    ])
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreeEnergySample {
    pub config: SectorConfig,
    pub value: f64,
    pub value_normalized: f64,
}

/// log d_k with d_k = 2 binomial(N, k).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegeneracyTerm {
    pub n: u64,
    pub k: u64,
    pub log_degeneracy: f64,
}

impl DegeneracyTerm {
    pub fn new(n: u64, k: u64) -> Result<Self> {
        if k > n {
            return Err(Error::Input(format!("k={k} exceeds N={n}")));
        }
        Ok(DegeneracyTerm {
            n,
            k,
            log_degeneracy: std::f64::consts::LN_2 + ln_binomial(n, k),
        })
    }
}

pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k == 0 || k == n {
        return 0.0;
    }
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingConvention {
    Saddle,
    LowTFreeEnergy,
    LowTPartition,
}

/// Maps `params` (at nesting `params.nesting`) to the equivalent parameter set at nesting
/// `target_c` under the chosen convention.
pub fn scale_params(
    params: &ModelParams,
    target_c: f64,
    convention: ScalingConvention,
) -> ModelParams {
    let r = params.nesting / target_c;
    let p = params.p as i32;
    let q = params.q as i32;
    let mut out = *params;
    out.nesting = target_c;
    match convention {
        ScalingConvention::Saddle => {
            out.temperature = params.temperature / r.powi(p - 1);
            out.gamma = params.gamma / r.powi(p - 1);
            out.lambda = params.lambda * r.powi(q - p);
        }
        ScalingConvention::LowTFreeEnergy => {
            out.j = params.j * r.powi(p);
            out.lambda = params.lambda * r.powi(q);
            out.gamma = params.gamma * r;
            out.eta = params.eta * r;
        }
        ScalingConvention::LowTPartition => {
            out.temperature = params.temperature / r.powi(p);
            out.lambda = params.lambda * r.powi(q - p);
            out.gamma = params.gamma * r.powi(1 - p);
        }
    }
    out
}

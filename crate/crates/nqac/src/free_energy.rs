use crate::error::{Error, Result};
use crate::params::{
    validate_fractions, DegeneracyTerm, FreeEnergySample, ModelParams, SectorConfig,
};
use std::f64::consts::LN_2;

/// log(2 cosh x) without overflow.
pub fn log_2cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p()
}

/// Precomputed prefactors of the sectored free energy.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Terms {
    pub p: i32,
    pub q: i32,
    pub c: f64,
    pub temperature: f64,
    pub gamma: f64,
    pub eta: f64,
    /// (p-1) s J C^p
    pub e_p: f64,
    /// (q-1) λ C^q
    pub e_q: f64,
    /// s p J C^(p-1)
    pub h_p: f64,
    /// q λ C^(q-1)
    pub h_q: f64,
}

impl Terms {
    pub fn new(params: &ModelParams) -> Self {
        let p = params.p as i32;
        let q = params.q as i32;
        let c = params.nesting;
        let s = params.coupling.sign();
        Terms {
            p,
            q,
            c,
            temperature: params.temperature,
            gamma: params.gamma,
            eta: params.eta,
            e_p: (p - 1) as f64 * s * params.j * c.powi(p),
            e_q: (q - 1) as f64 * params.lambda * c.powi(q),
            h_p: s * p as f64 * params.j * c.powi(p - 1),
            h_q: q as f64 * params.lambda * c.powi(q - 1),
        }
    }

    #[inline]
    pub fn field(&self, w: f64, m: f64) -> f64 {
        self.h_p * m.powi(self.p - 1) + self.h_q * w.powi(self.q - 1)
    }

    /// Sector response (h/E) tanh(βE); zero when E vanishes.
    #[inline]
    pub fn response(&self, h: f64) -> f64 {
        let e = h.hypot(self.gamma);
        if e == 0.0 {
            return 0.0;
        }
        if self.temperature > 0.0 {
            h / e * (e / self.temperature).tanh()
        } else {
            h / e
        }
    }

    /// d response / d h.
    #[inline]
    pub fn response_slope(&self, h: f64) -> f64 {
        let e = h.hypot(self.gamma);
        if e == 0.0 {
            return if self.temperature > 0.0 {
                1.0 / self.temperature
            } else {
                0.0
            };
        }
        let g2 = self.gamma * self.gamma;
        if self.temperature > 0.0 {
            let x = e / self.temperature;
            let t = x.tanh();
            let sech2 = 1.0 - t * t;
            g2 / (e * e * e) * t + h * h / (e * e) * sech2 / self.temperature
        } else {
            g2 / (e * e * e)
        }
    }

    #[inline]
    fn quantum_term(&self, e: f64) -> f64 {
        if self.temperature > 0.0 {
            -self.c * self.temperature * log_2cosh(e / self.temperature)
        } else {
            -self.c * e
        }
    }

    pub fn free_energy(&self, fractions: &[f64], ws: &[f64]) -> f64 {
        let m: f64 = fractions.iter().zip(ws).map(|(f, w)| f * w).sum();
        let mut value = self.e_p * m.powi(self.p);
        let hm = self.h_p * m.powi(self.p - 1);
        for (&f, &w) in fractions.iter().zip(ws) {
            let h = hm + self.h_q * w.powi(self.q - 1);
            value += f * (self.e_q * w.powi(self.q) + self.quantum_term(h.hypot(self.gamma)));
        }
        value
    }

    pub fn free_energy_symmetric(&self, m: f64) -> f64 {
        let h = self.field(m, m);
        self.e_p * m.powi(self.p)
            + self.e_q * m.powi(self.q)
            + self.quantum_term(h.hypot(self.gamma))
    }

    pub fn free_energy_hybrid(&self, fractions: &[f64], ws: &[f64]) -> f64 {
        let m: f64 = fractions.iter().zip(ws).map(|(f, w)| f * w).sum();
        let mut value = self.e_p * m.powi(self.p);
        let hm = self.h_p * m.powi(self.p - 1);
        for (&f, &w) in fractions.iter().zip(ws) {
            let h = hm + self.h_q * w.powi(self.q - 1);
            let vp = (h + self.eta).hypot(self.gamma);
            let vm = (h - self.eta).hypot(self.gamma);
            let quantum = if self.temperature > 0.0 {
                let a = self.c * log_2cosh(vp / self.temperature);
                let b = self.c * log_2cosh(vm / self.temperature);
                let hi = a.max(b);
                let d = (a - b).abs();
                -self.temperature * (hi + ((-d).exp().ln_1p() - LN_2))
            } else {
                -self.c * vp.max(vm)
            };
            value += f * (self.e_q * w.powi(self.q) + quantum);
        }
        value
    }

    /// Analytic gradient of the sectored free energy with respect to the sector order parameters.
    pub fn gradient(&self, fractions: &[f64], ws: &[f64], out: &mut [f64]) {
        let m: f64 = fractions.iter().zip(ws).map(|(f, w)| f * w).sum();
        let hm = self.h_p * m.powi(self.p - 1);
        let mean_t: f64 = fractions
            .iter()
            .zip(ws)
            .map(|(&f, &w)| f * self.response(hm + self.h_q * w.powi(self.q - 1)))
            .sum();
        let a = (self.p - 1) as f64 * self.h_p * self.c * m.powi(self.p - 2);
        for i in 0..ws.len() {
            let w = ws[i];
            let t = self.response(hm + self.h_q * w.powi(self.q - 1));
            let b = (self.q - 1) as f64 * self.h_q * self.c * w.powi(self.q - 2);
            out[i] = fractions[i] * (a * (m - mean_t) + b * (w - t));
        }
    }
}

fn checked(value: f64, params: &ModelParams) -> Result<f64> {
    if value.is_finite() {
        return Ok(value);
    }
    let candidates: [(&'static str, f64); 6] = [
        ("J", params.j),
        ("lambda", params.lambda),
        ("gamma", params.gamma),
        ("temperature", params.temperature),
        ("nesting", params.nesting),
        ("eta", params.eta),
    ];
    let (param, v) = candidates
        .into_iter()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .unwrap_or(("J", params.j));
    Err(Error::Domain { param, value: v })
}

/// Free energy per logical qubit of a sectored configuration.
pub fn free_energy(params: &ModelParams, config: &SectorConfig) -> Result<f64> {
    params.validate()?;
    config.validate()?;
    let t = Terms::new(params);
    checked(t.free_energy(&config.fractions(), &config.ws()), params)
}

pub fn free_energy_sample(params: &ModelParams, config: &SectorConfig) -> Result<FreeEnergySample> {
    let value = free_energy(params, config)?;
    Ok(FreeEnergySample {
        config: config.clone(),
        value,
        value_normalized: value / params.energy_scale(),
    })
}

/// Free energy with a designated penalty qubit of coupling η per logical qubit.
pub fn free_energy_hybrid(params: &ModelParams, config: &SectorConfig) -> Result<f64> {
    params.validate()?;
    config.validate()?;
    let t = Terms::new(params);
    checked(
        t.free_energy_hybrid(&config.fractions(), &config.ws()),
        params,
    )
}

/// Two-sector free energy of the k-th excited state plus its entropy -(T/N) log d_k.
pub fn free_energy_with_degeneracy(
    params: &ModelParams,
    n: u64,
    k: u64,
    w1: f64,
    w2: f64,
) -> Result<f64> {
    if n == 0 || 2 * k > n {
        return Err(Error::Input(format!(
            "need 0 <= k <= N/2, got N={n}, k={k}"
        )));
    }
    let config = if k == 0 {
        SectorConfig::symmetric(w1)
    } else {
        SectorConfig::two_sector(k as f64 / n as f64, w1, w2)?
    };
    let base = free_energy(params, &config)?;
    Ok(base + entropy_term(params, n, k)?)
}

pub fn entropy_term(params: &ModelParams, n: u64, k: u64) -> Result<f64> {
    if params.temperature == 0.0 {
        return Ok(0.0);
    }
    let d = DegeneracyTerm::new(n, k)?;
    Ok(-params.temperature * d.log_degeneracy / n as f64)
}

/// Sectored gradient, validated entry point.
pub fn free_energy_gradient(params: &ModelParams, config: &SectorConfig) -> Result<Vec<f64>> {
    params.validate()?;
    validate_fractions(&config.fractions())?;
    let t = Terms::new(params);
    let mut g = vec![0.0; config.sectors.len()];
    t.gradient(&config.fractions(), &config.ws(), &mut g);
    Ok(g)
}

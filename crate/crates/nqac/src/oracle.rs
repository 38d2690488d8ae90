use crate::error::{Error, Result};
use crate::params::Coupling;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

pub const ENUMERATION_LIMIT: usize = 24;
pub const DIAGONALIZATION_LIMIT: usize = 14;
const DENSE_LIMIT: usize = 256;

/// Physical instance: N logical qubits, each repeated on C physical sites `i*C + c`.
/// Intra-block couplings store the penalty γ and act with strength 2γ.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedInstance {
    pub n: usize,
    pub c: usize,
    pub fields: Vec<f64>,
    pub couplings: BTreeMap<(usize, usize), f64>,
}

impl EncodedInstance {
    pub fn total_spins(&self) -> usize {
        self.n * self.c
    }

    pub fn is_intra(&self, a: usize, b: usize) -> bool {
        a / self.c == b / self.c
    }

    /// Coupling strength as it enters the Hamiltonian.
    pub fn pair_strength(&self, a: usize, b: usize, value: f64) -> f64 {
        if self.is_intra(a, b) {
            2.0 * value
        } else {
            value
        }
    }

    pub fn to_triplets(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.c);
        for (i, &h) in self.fields.iter().enumerate() {
            if h != 0.0 {
                let _ = writeln!(out, "{i} {i} {h:?}");
            }
        }
        for (&(i, j), &v) in &self.couplings {
            let _ = writeln!(out, "{i} {j} {v:?}");
        }
        out
    }

    pub fn from_triplets(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines
            .next()
            .ok_or_else(|| Error::Input("empty instance file".into()))?;
        let mut hp = header.split_whitespace();
        let parse_usize = |s: Option<&str>, what: &str| -> Result<usize> {
            s.ok_or_else(|| Error::Input(format!("missing {what}")))?
                .parse::<usize>()
                .map_err(|e| Error::Input(format!("bad {what}: {e}")))
        };
        let n = parse_usize(hp.next(), "N")?;
        let c = parse_usize(hp.next(), "C")?;
        if hp.next().is_some() || n == 0 || c == 0 {
            return Err(Error::Input(format!(
                "header must be `N C` with positive values, got `{header}`"
            )));
        }
        let total = n * c;
        let mut inst = EncodedInstance {
            n,
            c,
            fields: vec![0.0; total],
            couplings: BTreeMap::new(),
        };
        let mut seen_fields = vec![false; total];
        for line in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Input(format!("expected `i j value`, got `{line}`")));
            }
            let i = parse_usize(Some(parts[0]), "site index")?;
            let j = parse_usize(Some(parts[1]), "site index")?;
            let v: f64 = parts[2]
                .parse()
                .map_err(|e| Error::Input(format!("bad value in `{line}`: {e}")))?;
            if i >= total || j >= total {
                return Err(Error::Input(format!("site index out of range in `{line}`")));
            }
            if i == j {
                if std::mem::replace(&mut seen_fields[i], true) {
                    return Err(Error::Input(format!("duplicate field for site {i}")));
                }
                inst.fields[i] = v;
            } else if inst.couplings.insert((i.min(j), i.max(j)), v).is_some() {
                return Err(Error::Input(format!("duplicate coupling ({i}, {j})")));
            }
        }
        Ok(inst)
    }
}

/// Nested encoding of a logical Ising problem with C physical copies and penalty γ.
pub fn encode(
    logical_h: &[f64],
    logical_j: &[Vec<f64>],
    c: usize,
    gamma_pen: f64,
) -> Result<EncodedInstance> {
    let n = logical_h.len();
    if n == 0 || c == 0 {
        return Err(Error::Input(
            "need at least one logical qubit and C >= 1".into(),
        ));
    }
    if n * c > ENUMERATION_LIMIT {
        return Err(Error::SizeCap {
            what: "physical spins",
            size: n * c,
            limit: ENUMERATION_LIMIT,
        });
    }
    if logical_j.len() != n || logical_j.iter().any(|r| r.len() != n) {
        return Err(Error::Input(format!("coupling matrix must be {n}x{n}")));
    }
    for (i, row) in logical_j.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v != logical_j[j][i] {
                return Err(Error::Input(format!(
                    "coupling matrix not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let fields = (0..n * c).map(|s| c as f64 * logical_h[s / c]).collect();
    let mut couplings = BTreeMap::new();
    for a in 0..n * c {
        for b in a + 1..n * c {
            let (i, j) = (a / c, b / c);
            let v = if i == j { gamma_pen } else { logical_j[i][j] };
            if v != 0.0 {
                couplings.insert((a, b), v);
            }
        }
    }
    Ok(EncodedInstance {
        n,
        c,
        fields,
        couplings,
    })
}

/// Majority-vote decoding of physical spins (±1) into logical spins.
pub fn decode(n: usize, c: usize, spins: &[i8]) -> Result<Vec<i8>> {
    if spins.len() != n * c {
        return Err(Error::Input(format!(
            "expected {} spins, got {}",
            n * c,
            spins.len()
        )));
    }
    spins
        .chunks(c)
        .enumerate()
        .map(|(i, block)| {
            let s: i32 = block.iter().map(|&x| x as i32).sum();
            match s.signum() {
                1 => Ok(1),
                -1 => Ok(-1),
                _ => Err(Error::Input(format!("tied majority in logical qubit {i}"))),
            }
        })
        .collect()
}

/// Classical Hamiltonian used for the oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HamiltonianForm {
    /// Intensive p-spin form -s J N (M/N)^p - λ Σ_i B_i^q with block sums B_i and M = Σ B_i.
    Pspin {
        p: u32,
        q: u32,
        j: f64,
        lambda: f64,
        coupling: Coupling,
    },
    /// Raw pairwise form -Σ h σ - Σ K σσ from the instance's fields and couplings.
    Pairwise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subspace {
    All,
    /// Only states with every block uniform.
    Codewords,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub energies: Vec<f64>,
    pub degeneracies: Vec<u64>,
    /// Spacing between the two lowest states counted with multiplicity.
    pub gap: Option<f64>,
}

fn spin(bits: u64, s: usize) -> f64 {
    if bits >> s & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

/// Integer data that fixes the p-spin energy: (M^p, Σ B_i^q).
fn pspin_key(blocks: &[i64], p: u32, q: u32) -> (i128, i128) {
    let m: i64 = blocks.iter().sum();
    let s: i128 = blocks.iter().map(|&b| (b as i128).pow(q)).sum();
    ((m as i128).pow(p), s)
}

fn pspin_energy(
    n: usize,
    key: (i128, i128),
    p: u32,
    j: f64,
    lambda: f64,
    coupling: Coupling,
) -> f64 {
    let nf = n as f64;
    -coupling.sign() * j * nf.powi(1 - p as i32) * key.0 as f64 - lambda * key.1 as f64
}

struct Pairwise {
    fields: Vec<f64>,
    neighbors: Vec<Vec<(usize, f64)>>,
    pairs: Vec<(usize, usize, f64)>,
}

impl Pairwise {
    fn new(inst: &EncodedInstance) -> Self {
        let total = inst.total_spins();
        let mut neighbors = vec![Vec::new(); total];
        let mut pairs = Vec::new();
        for (&(a, b), &v) in &inst.couplings {
            let k = inst.pair_strength(a, b, v);
            neighbors[a].push((b, k));
            neighbors[b].push((a, k));
            pairs.push((a, b, k));
        }
        Pairwise {
            fields: inst.fields.clone(),
            neighbors,
            pairs,
        }
    }

    fn energy(&self, bits: u64) -> f64 {
        let f: f64 = self
            .fields
            .iter()
            .enumerate()
            .map(|(s, h)| -h * spin(bits, s))
            .sum();
        let c: f64 = self
            .pairs
            .iter()
            .map(|&(a, b, k)| -k * spin(bits, a) * spin(bits, b))
            .sum();
        f + c
    }

    /// Energy change when site s flips in state `bits`.
    fn flip_delta(&self, bits: u64, s: usize) -> f64 {
        let local: f64 = self.fields[s]
            + self.neighbors[s]
                .iter()
                .map(|&(t, k)| k * spin(bits, t))
                .sum::<f64>();
        2.0 * spin(bits, s) * local
    }
}

fn energy_scale(inst: &EncodedInstance, form: &HamiltonianForm) -> f64 {
    match *form {
        HamiltonianForm::Pspin { j, lambda, .. } => {
            let t = inst.total_spins() as f64;
            (j.abs() * t.powi(2) + lambda.abs() * t * t).max(1.0)
        }
        HamiltonianForm::Pairwise => {
            let f: f64 = inst.fields.iter().map(|h| h.abs()).sum();
            let c: f64 = inst
                .couplings
                .iter()
                .map(|(&(a, b), &v)| inst.pair_strength(a, b, v).abs())
                .sum();
            (f + c).max(1.0)
        }
    }
}

fn finish(mut levels: Vec<(f64, u64)>, scale: f64) -> SpectrumResult {
    levels.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, u64)> = Vec::new();
    for (e, d) in levels {
        match merged.last_mut() {
            Some(last) if (e - last.0).abs() <= 1e-9 * scale => last.1 += d,
            _ => merged.push((e, d)),
        }
    }
    let gap = match merged.as_slice() {
        [] => None,
        [(_, d), ..] if *d > 1 => Some(0.0),
        [(e0, _), (e1, _), ..] => Some(e1 - e0),
        _ => None,
    };
    SpectrumResult {
        energies: merged.iter().map(|l| l.0).collect(),
        degeneracies: merged.iter().map(|l| l.1).collect(),
        gap,
    }
}

fn merge_counts<K: std::hash::Hash + Eq>(
    mut a: HashMap<K, u64>,
    b: HashMap<K, u64>,
) -> HashMap<K, u64> {
    for (k, v) in b {
        *a.entry(k).or_insert(0) += v;
    }
    a
}

/// Exact classical spectrum by exhaustive enumeration.
pub fn classical_spectrum(
    inst: &EncodedInstance,
    form: &HamiltonianForm,
    subspace: Subspace,
) -> Result<SpectrumResult> {
    let total = inst.total_spins();
    if total > ENUMERATION_LIMIT {
        return Err(Error::SizeCap {
            what: "physical spins",
            size: total,
            limit: ENUMERATION_LIMIT,
        });
    }
    let scale = energy_scale(inst, form);
    let (n, c) = (inst.n, inst.c);
    match (*form, subspace) {
        (
            HamiltonianForm::Pspin {
                p,
                q,
                j,
                lambda,
                coupling,
            },
            Subspace::Codewords,
        ) => {
            let mut counts: HashMap<(i128, i128), u64> = HashMap::new();
            for word in 0u64..1 << n {
                let blocks: Vec<i64> = (0..n).map(|i| spin(word, i) as i64 * c as i64).collect();
                *counts.entry(pspin_key(&blocks, p, q)).or_insert(0) += 1;
            }
            let levels = counts
                .into_iter()
                .map(|(k, d)| (pspin_energy(n, k, p, j, lambda, coupling), d))
                .collect();
            Ok(finish(levels, scale))
        }
        (
            HamiltonianForm::Pspin {
                p,
                q,
                j,
                lambda,
                coupling,
            },
            Subspace::All,
        ) => {
            let (high, low) = split_bits(total);
            let counts = (0u64..1 << high)
                .into_par_iter()
                .map(|top| {
                    let mut counts: HashMap<(i128, i128), u64> = HashMap::new();
                    let mut bits = top << low;
                    let mut blocks: Vec<i64> = vec![0; n];
                    for s in 0..total {
                        blocks[s / c] += spin(bits, s) as i64;
                    }
                    *counts.entry(pspin_key(&blocks, p, q)).or_insert(0) += 1;
                    for step in 1u64..1 << low {
                        let s = step.trailing_zeros() as usize;
                        blocks[s / c] -= 2 * spin(bits, s) as i64;
                        bits ^= 1 << s;
                        *counts.entry(pspin_key(&blocks, p, q)).or_insert(0) += 1;
                    }
                    counts
                })
                .reduce(HashMap::new, merge_counts);
            let levels = counts
                .into_iter()
                .map(|(k, d)| (pspin_energy(n, k, p, j, lambda, coupling), d))
                .collect();
            Ok(finish(levels, scale))
        }
        (HamiltonianForm::Pairwise, Subspace::Codewords) => {
            let pw = Pairwise::new(inst);
            let block = (1u64 << c) - 1;
            let levels = (0u64..1 << n)
                .map(|word| {
                    let bits = (0..n)
                        .filter(|&i| word >> i & 1 == 1)
                        .fold(0u64, |acc, i| acc | block << (i * c));
                    (pw.energy(bits), 1)
                })
                .collect();
            Ok(finish(levels, scale))
        }
        (HamiltonianForm::Pairwise, Subspace::All) => {
            let pw = Pairwise::new(inst);
            let (high, low) = split_bits(total);
            let quantum = 1e-9 * scale;
            let counts = (0u64..1 << high)
                .into_par_iter()
                .map(|top| {
                    let mut counts: HashMap<i64, (u64, u64)> = HashMap::new();
                    let mut bits = top << low;
                    let mut e = pw.energy(bits);
                    let mut tally = |e: f64, bits: u64| {
                        let entry = counts
                            .entry((e / quantum).round() as i64)
                            .or_insert((0, bits));
                        entry.0 += 1;
                        entry.1 = entry.1.min(bits);
                    };
                    tally(e, bits);
                    for step in 1u64..1 << low {
                        let s = step.trailing_zeros() as usize;
                        e += pw.flip_delta(bits, s);
                        bits ^= 1 << s;
                        tally(e, bits);
                    }
                    counts
                })
                .reduce(HashMap::new, |mut a, b| {
                    for (k, (d, rep)) in b {
                        let entry = a.entry(k).or_insert((0, rep));
                        entry.0 += d;
                        entry.1 = entry.1.min(rep);
                    }
                    a
                });
            let levels = counts
                .into_values()
                .map(|(d, rep)| (pw.energy(rep), d))
                .collect();
            Ok(finish(levels, scale))
        }
    }
}

fn split_bits(total: usize) -> (usize, usize) {
    let high = total.saturating_sub(12).min(8);
    (high, total - high)
}

/// Diagonal of the classical Hamiltonian in the computational basis.
pub fn diagonal(inst: &EncodedInstance, form: &HamiltonianForm) -> Result<Vec<f64>> {
    let total = inst.total_spins();
    if total > ENUMERATION_LIMIT {
        return Err(Error::SizeCap {
            what: "physical spins",
            size: total,
            limit: ENUMERATION_LIMIT,
        });
    }
    let (n, c) = (inst.n, inst.c);
    Ok(match *form {
        HamiltonianForm::Pspin {
            p,
            q,
            j,
            lambda,
            coupling,
        } => (0u64..1 << total)
            .into_par_iter()
            .map(|bits| {
                let mut blocks = vec![0i64; n];
                for s in 0..total {
                    blocks[s / c] += spin(bits, s) as i64;
                }
                pspin_energy(n, pspin_key(&blocks, p, q), p, j, lambda, coupling)
            })
            .collect(),
        HamiltonianForm::Pairwise => {
            let pw = Pairwise::new(inst);
            (0u64..1 << total)
                .into_par_iter()
                .map(|bits| pw.energy(bits))
                .collect()
        }
    })
}

fn apply_hamiltonian(diag: &[f64], spins: usize, gamma: f64, x: &[f64], out: &mut [f64]) {
    out.par_iter_mut().enumerate().for_each(|(i, o)| {
        let mut acc = diag[i] * x[i];
        for s in 0..spins {
            acc -= gamma * x[i ^ (1 << s)];
        }
        *o = acc;
    });
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lowest eigenpair of H restricted to the complement of `deflate`, by Lanczos with full
/// reorthogonalization.
fn lanczos_lowest(
    diag: &[f64],
    spins: usize,
    gamma: f64,
    deflate: &[Vec<f64>],
    seed: u64,
) -> (f64, Vec<f64>) {
    let dim = diag.len();
    let project = |v: &mut Vec<f64>| {
        for d in deflate {
            let a = dot(v, d);
            v.iter_mut().zip(d).for_each(|(x, y)| *x -= a * y);
        }
    };
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    let mut v: Vec<f64> = (0..dim)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect();
    project(&mut v);
    let norm = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; dim];
    let max_steps = dim.min(400);
    let mut best = (f64::INFINITY, DVector::zeros(1));
    for step in 0..max_steps {
        apply_hamiltonian(diag, spins, gamma, &basis[step], &mut w);
        let a = dot(&w, &basis[step]);
        alphas.push(a);
        for _ in 0..2 {
            for b in &basis {
                let r = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= r * y);
            }
            let mut tmp = std::mem::take(&mut w);
            project(&mut tmp);
            w = tmp;
        }
        let beta = dot(&w, &w).sqrt();
        let k = alphas.len();
        let t = DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                alphas[i]
            } else if i + 1 == j || j + 1 == i {
                betas[i.min(j)]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let (idx, &theta) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        let y = eig.eigenvectors.column(idx).into_owned();
        let residual = beta * y[k - 1].abs();
        best = (theta, y);
        if residual < 1e-11 * theta.abs().max(1.0) || beta < 1e-12 {
            break;
        }
        betas.push(beta);
        basis.push(w.iter().map(|x| x / beta).collect());
    }
    let (theta, y) = best;
    let mut vec = vec![0.0; dim];
    for (coef, b) in y.iter().zip(&basis) {
        vec.iter_mut().zip(b).for_each(|(x, v)| *x += coef * v);
    }
    let norm = dot(&vec, &vec).sqrt();
    vec.iter_mut().for_each(|x| *x /= norm);
    (theta, vec)
}

/// First excitation gap of -Γ Σ σx + H_Z.
pub fn quantum_gap(inst: &EncodedInstance, form: &HamiltonianForm, gamma: f64) -> Result<f64> {
    let total = inst.total_spins();
    if total > DIAGONALIZATION_LIMIT {
        return Err(Error::SizeCap {
            what: "physical spins",
            size: total,
            limit: DIAGONALIZATION_LIMIT,
        });
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::Domain {
            param: "gamma",
            value: gamma,
        });
    }
    let diag = diagonal(inst, form)?;
    let dim = diag.len();
    if dim <= DENSE_LIMIT {
        let h = DMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                diag[i]
            } else if (i ^ j).count_ones() == 1 {
                -gamma
            } else {
                0.0
            }
        });
        let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        return Ok(if dim > 1 { ev[1] - ev[0] } else { 0.0 });
    }
    let (e0, v0) = lanczos_lowest(&diag, total, gamma, &[], 1);
    let (e1, _) = lanczos_lowest(&diag, total, gamma, &[v0], 2);
    Ok((e1 - e0).max(0.0))
}

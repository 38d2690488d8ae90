use crate::args::{Command, Point};
use crate::error::CliError;
use crate::table::Cell;
use nqac::{
    af_metastable_branch, af_occupancy, barrier_metrics, classical_spectrum, classify_transition,
    critical_line_p2, encode, fm_level_free_energy, fm_mixed_solution, fm_occupancy, free_energy,
    free_energy_gradient, free_energy_hybrid, global_minimum, hybrid_critical_line,
    instanton_overlap, instanton_overlap_at_transition, lambda_critical, quantum_gap,
    solve_sectored, solve_symmetric, spinwave_closed_form, spinwave_spectrum, trace_region,
    Coupling, CriticalAxis, EncodedInstance, HamiltonianForm, MetastableSide, ModelParams,
    RegionAxis, SectorConfig, StateFamily, Subspace,
};

/// Output of one sweep point: column titles and one or more rows.
pub struct Fragment {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Fragment {
    fn single(columns: &[&str], row: Vec<Cell>) -> Self {
        Fragment {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: vec![row],
        }
    }

    fn many(columns: &[&str], rows: Vec<Vec<Cell>>) -> Self {
        Fragment {
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows,
        }
    }
}

pub fn evaluate(command: Command, pt: &Point) -> Result<Fragment, CliError> {
    match command {
        Command::FeScan => fe_scan(pt),
        Command::Saddle => saddle(pt),
        Command::Critline => critline(pt),
        Command::Classify => classify(pt),
        Command::Lambdac => lambdac(pt),
        Command::Barrier => barrier(pt),
        Command::GapInstanton => gap_instanton(pt),
        Command::GapSpinwave => gap_spinwave(pt),
        Command::MetaFm => meta_fm(pt),
        Command::MetaAf => meta_af(pt),
        Command::Occupancy => occupancy(pt),
        Command::HybridCritline => hybrid_critline(pt),
        Command::ExactSpectrum => exact_spectrum(pt),
        Command::ExactGap => exact_gap(pt),
    }
}

fn flag(b: bool) -> Cell {
    Cell::text(if b { "true" } else { "false" })
}

fn fe_scan(pt: &Point) -> Result<Fragment, CliError> {
    let params = pt.params()?;
    let m = pt.require("m")?;
    let config = SectorConfig::symmetric(m);
    let scale = params.energy_scale();
    let (f, slope) = if params.eta > 0.0 {
        (free_energy_hybrid(&params, &config)?, None)
    } else {
        (
            free_energy(&params, &config)?,
            Some(free_energy_gradient(&params, &config)?[0] / scale),
        )
    };
    Ok(Fragment::single(
        &["F", "F_normalized", "dF_dm_normalized"],
        vec![f.into(), (f / scale).into(), Cell::opt(slope)],
    ))
}

fn saddle(pt: &Point) -> Result<Fragment, CliError> {
    let params = pt.params()?;
    let settings = pt.settings()?;
    let scale = params.energy_scale();
    if let Some(x) = pt.get("k_over_N") {
        let fractions = [1.0 - x, x];
        let solve = solve_sectored(&params, &fractions, &settings)?;
        let best = global_minimum(&params, &fractions, &settings)?.free_energy;
        let rows = solve
            .solutions
            .iter()
            .map(|s| {
                let ws = s.config.ws();
                vec![
                    ws[0].into(),
                    ws[1].into(),
                    s.config.magnetization().into(),
                    s.residual.into(),
                    Cell::text(s.stability.as_str()),
                    (s.free_energy / scale).into(),
                    flag((s.free_energy - best).abs() <= 1e-9 * scale.max(best.abs())),
                ]
            })
            .collect();
        let cols = [
            "w1",
            "w2",
            "m",
            "residual",
            "stability",
            "F_normalized",
            "global",
        ];
        return Ok(Fragment::many(&cols, rows));
    }
    let solutions = solve_symmetric(&params, &settings)?;
    let best = solutions
        .iter()
        .map(|s| s.free_energy)
        .fold(f64::INFINITY, f64::min);
    let rows = solutions
        .iter()
        .map(|s| {
            vec![
                s.config.ws()[0].into(),
                s.residual.into(),
                Cell::text(s.stability.as_str()),
                (s.free_energy / scale).into(),
                (s.multiplicity as f64).into(),
                flag((s.free_energy - best).abs() <= 1e-9 * scale.max(best.abs())),
            ]
        })
        .collect();
    Ok(Fragment::many(
        &[
            "w",
            "residual",
            "stability",
            "F_normalized",
            "multiplicity",
            "global",
        ],
        rows,
    ))
}

fn critline(pt: &Point) -> Result<Fragment, CliError> {
    let params = pt.params()?;
    let c = params.nesting;
    let point = if pt.get("gamma").is_some() {
        critical_line_p2(&params, CriticalAxis::TOfGamma, &[params.gamma / c])?[0]
    } else {
        critical_line_p2(&params, CriticalAxis::GammaOfT, &[params.temperature / c])?[0]
    };
    Ok(Fragment::single(
        &["T_c_over_C", "gamma_c_over_C"],
        vec![Cell::opt(point.t_over_c), Cell::opt(point.gamma_over_c)],
    ))
}

fn classify(pt: &Point) -> Result<Fragment, CliError> {
    let params = pt.params()?;
    let r = classify_transition(&params, &pt.settings()?)?;
    let diff = match (r.gamma_c1, r.gamma_c2) {
        (Some(a), Some(b)) => Some(a - b),
        _ => None,
    };
    let cols = [
        "gamma_c1_scaled",
        "gamma_c2_scaled",
        "order",
        "barrier_height",
        "barrier_width",
        "gamma_c1_minus_gamma_c2",
    ];
    Ok(Fragment::single(
        &cols,
        vec![
            Cell::opt(r.gamma_c1),
            Cell::opt(r.gamma_c2),
            Cell::text(r.order.as_str()),
            Cell::opt(r.barrier_height),
            Cell::opt(r.barrier_width),
            Cell::opt(diff),
        ],
    ))
}

fn lambdac(pt: &Point) -> Result<Fragment, CliError> {
    let params = pt.params()?;
    let v = lambda_critical(&params, params.temperature)?;
    let name = format!("lambda_c_over_C{}", params.p as i32 - params.q as i32);
    Ok(Fragment {
        columns: vec![name],
        rows: vec![vec![Cell::opt(v)]],
    })
}

fn barrier(pt: &Point) -> Result<Fragment, CliError> {
    let params = pt.params()?;
    let b = barrier_metrics(&params, &pt.settings()?)?;
    Ok(Fragment::single(
        &["barrier_height", "barrier_width"],
        vec![b.height.into(), b.width.into()],
    ))
}

fn gap_instanton(pt: &Point) -> Result<Fragment, CliError> {
    let params = pt.params()?;
    let est = match (pt.get("m0"), pt.get("mc")) {
        (Some(m0), Some(mc)) => instanton_overlap(&params, m0, mc)?,
        (None, None) => instanton_overlap_at_transition(&params, &pt.settings()?)?,
        _ => return Err(CliError::Usage("give both m0 and mc, or neither".into())),
    };
    let log_gap = pt.get("N").map(|n| est.log_gap(n));
    Ok(Fragment::single(
        &["gamma_scaled", "overlap", "log_gap_per_spin", "log_gap"],
        vec![
            est.at_params.scaled_gamma().into(),
            est.overlap.into(),
            est.log_gap_per_spin.into(),
            Cell::opt(log_gap),
        ],
    ))
}

fn gap_spinwave(pt: &Point) -> Result<Fragment, CliError> {
    let (j, c, lam, g) = (
        pt.num("J", 1.0),
        pt.num("C", 1.0),
        pt.require("lambda")?,
        pt.num("gamma", 0.0),
    );
    let s = spinwave_spectrum(j, c, lam, g)?;
    let (w0, w1) = spinwave_closed_form(j, c, lam, g);
    Ok(Fragment::single(
        &[
            "theta",
            "omega0",
            "omega1",
            "gap",
            "omega0_sq_closed",
            "omega1_sq_closed",
        ],
        vec![
            s.theta.into(),
            s.omega0.into(),
            s.omega1.into(),
            s.gap().into(),
            w0.into(),
            w1.into(),
        ],
    ))
}

fn region_axis(
    pt: &Point,
    params: &ModelParams,
) -> Result<Option<(RegionAxis, f64, f64)>, CliError> {
    let Some(name) = pt.text("boundary") else {
        return Ok(None);
    };
    let axis = match name {
        "T" => RegionAxis::Temperature,
        "gamma" => RegionAxis::Gamma,
        "lambda" => RegionAxis::Lambda,
        other => {
            return Err(CliError::Usage(format!(
                "unknown boundary axis `{other}`; expected T, gamma or lambda"
            )))
        }
    };
    let default_hi = match axis {
        RegionAxis::Lambda => 4.0 * params.j.max(params.scaled_lambda()).max(1.0),
        _ => 2.0 * (params.p as f64 * params.j + params.q as f64 * params.scaled_lambda()),
    };
    Ok(Some((axis, pt.num("lo", 0.0), pt.num("hi", default_hi))))
}

fn boundary_row(
    pt: &Point,
    params: &ModelParams,
    family: StateFamily,
    k_over_n: f64,
    axis: RegionAxis,
    lo: f64,
    hi: f64,
) -> Result<Fragment, CliError> {
    let r = trace_region(
        params,
        family,
        RegionAxis::KOverN,
        &[k_over_n],
        axis,
        (lo, hi),
        k_over_n,
        pt.num("tolerance", 1e-6),
    )?;
    let side = r.side_with_metastable[0].map(|s| match s {
        MetastableSide::Below => "below",
        MetastableSide::Above => "above",
    });
    Ok(Fragment::single(
        &["axis", "boundary", "metastable_side"],
        vec![
            Cell::text(axis.name()),
            Cell::opt(r.boundary[0].1),
            side.map_or(Cell::Missing, Cell::text),
        ],
    ))
}

fn meta_fm(pt: &Point) -> Result<Fragment, CliError> {
    let params = pt.params()?;
    let x = pt.require("k_over_N")?;
    if let Some((axis, lo, hi)) = region_axis(pt, &params)? {
        return boundary_row(pt, &params, StateFamily::Ferro, x, axis, lo, hi);
    }
    let sol = fm_mixed_solution(&params, x, &pt.settings()?)?;
    let ws = sol.as_ref().map(|s| s.config.ws());
    let f_k = match pt.integer("N")? {
        Some(n) => fm_level_free_energy(&params, n, (x * n as f64).round() as usize)?,
        None => None,
    };
    Ok(Fragment::single(
        &["metastable", "w1", "w2", "F_k_normalized"],
        vec![
            flag(sol.is_some()),
            Cell::opt(ws.as_ref().map(|w| w[0])),
            Cell::opt(ws.as_ref().map(|w| w[1])),
            Cell::opt(f_k),
        ],
    ))
}

fn meta_af(pt: &Point) -> Result<Fragment, CliError> {
    let params = pt.params()?.with_coupling(Coupling::Antiferro);
    let n = pt.require_integer("N")?;
    let upper = match pt.text("branch").unwrap_or("lower") {
        "lower" => false,
        "upper" => true,
        other => {
            return Err(CliError::Usage(format!(
                "unknown branch `{other}`; expected lower or upper"
            )))
        }
    };
    let k = match (pt.integer("k")?, pt.get("k_over_N")) {
        (Some(k), None) => k,
        (None, Some(x)) => (x * n as f64).round() as usize,
        _ => return Err(CliError::Usage("give exactly one of k or k_over_N".into())),
    };
    if let Some((axis, lo, hi)) = region_axis(pt, &params)? {
        return boundary_row(
            pt,
            &params,
            StateFamily::Antiferro { n, upper },
            k as f64 / n as f64,
            axis,
            lo,
            hi,
        );
    }
    let exists = af_metastable_branch(&params, k, n, upper)?;
    Ok(Fragment::single(
        &["k", "metastable"],
        vec![(k as f64).into(), flag(exists)],
    ))
}

fn occupancy(pt: &Point) -> Result<Fragment, CliError> {
    let params = pt.params()?;
    let n = pt.require_integer("N")?;
    let spec = match params.coupling {
        Coupling::Antiferro => {
            af_occupancy(params.j, params.nesting, params.lambda, params.beta(), n)?
        }
        Coupling::Ferro => fm_occupancy(&params, n)?,
    };
    let rows = (0..spec.levels.len())
        .map(|i| {
            vec![
                (spec.levels[i] as f64).into(),
                spec.energies[i].into(),
                spec.log_degeneracies[i].into(),
                spec.log_weights[i].into(),
                spec.probabilities[i].into(),
            ]
        })
        .collect();
    Ok(Fragment::many(
        &[
            "level",
            "energy",
            "log_degeneracy",
            "log_weight",
            "probability",
        ],
        rows,
    ))
}

fn hybrid_critline(pt: &Point) -> Result<Fragment, CliError> {
    let params = pt.params()?;
    let eta_scaled = params.eta / params.nesting.powi(params.p as i32 - 1);
    let line = hybrid_critical_line(&params.with_eta(0.0), &[eta_scaled], &pt.settings()?)?;
    Ok(Fragment::single(
        &["eta_scaled", "lambda_c_scaled"],
        vec![line[0].0.into(), Cell::opt(line[0].1)],
    ))
}

fn instance_and_form(pt: &Point) -> Result<(EncodedInstance, HamiltonianForm), CliError> {
    let params = pt.params()?;
    let pspin = HamiltonianForm::Pspin {
        p: params.p,
        q: params.q,
        j: params.j,
        lambda: params.lambda,
        coupling: params.coupling,
    };
    let form = match pt.text("form").unwrap_or("pspin") {
        "pspin" => pspin,
        "pairwise" => HamiltonianForm::Pairwise,
        other => {
            return Err(CliError::Usage(format!(
                "unknown form `{other}`; expected pspin or pairwise"
            )))
        }
    };
    if let Some(path) = pt.text("instance") {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
        return Ok((EncodedInstance::from_triplets(&text)?, form));
    }
    let n = pt.require_integer("N")?;
    let c = pt.integer("C")?.unwrap_or(1);
    let s = params.coupling.sign() * params.j;
    let logical_j: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0.0 } else { s }).collect())
        .collect();
    Ok((
        encode(&vec![pt.num("h", 0.0); n], &logical_j, c, params.lambda)?,
        form,
    ))
}

fn exact_spectrum(pt: &Point) -> Result<Fragment, CliError> {
    let (inst, form) = instance_and_form(pt)?;
    let subspace = match pt.text("subspace").unwrap_or("all") {
        "all" => Subspace::All,
        "codewords" => Subspace::Codewords,
        other => {
            return Err(CliError::Usage(format!(
                "unknown subspace `{other}`; expected all or codewords"
            )))
        }
    };
    let spec = classical_spectrum(&inst, &form, subspace)?;
    let rows = spec
        .energies
        .iter()
        .zip(&spec.degeneracies)
        .enumerate()
        .map(|(i, (&e, &d))| vec![(i as f64).into(), e.into(), (d as f64).into()])
        .collect();
    Ok(Fragment::many(&["level", "energy", "degeneracy"], rows))
}

fn exact_gap(pt: &Point) -> Result<Fragment, CliError> {
    let (inst, form) = instance_and_form(pt)?;
    let gamma = pt.num("gamma", 0.0);
    Ok(Fragment::single(
        &["gap"],
        vec![quantum_gap(&inst, &form, gamma)?.into()],
    ))
}

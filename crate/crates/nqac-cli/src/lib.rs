//! Command-line front end: parameter sweeps over the nqac evaluators with CSV/JSON output.

pub mod args;
pub mod commands;
pub mod error;
pub mod figures;
pub mod table;

pub use args::{cli, parse_args, Command, Format, Invocation, Point, Sweep, SweepSpec};
pub use error::CliError;
pub use table::{Cell, Table};

use rayon::prelude::*;
use std::path::Path;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn sweep_points(spec: &SweepSpec) -> Vec<Vec<(String, f64)>> {
    let mut points: Vec<Vec<(String, f64)>> = vec![Vec::new()];
    for s in &spec.sweeps {
        let values = s.values();
        points = points
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push((s.name.clone(), v));
                    p
                })
            })
            .collect();
    }
    points
}

fn header(spec: &SweepSpec, timestamp: &str) -> Vec<String> {
    let mut h = vec![
        format!("nqac {VERSION}"),
        format!("command: {}", spec.command.name()),
        format!("generated: {timestamp}"),
    ];
    for (k, v) in &spec.fixed {
        h.push(format!("input {k} = {v}"));
    }
    for s in &spec.sweeps {
        h.push(format!(
            "sweep {} = {} {} {}",
            s.name, s.start, s.stop, s.steps
        ));
    }
    let first = sweep_points(spec).into_iter().next().unwrap_or_default();
    if let Ok(p) = Point::new(spec, &first).and_then(|pt| pt.params()) {
        let coupling = match p.coupling {
            nqac::Coupling::Ferro => "ferro",
            nqac::Coupling::Antiferro => "antiferro",
        };
        let swept = if spec.sweeps.is_empty() {
            ""
        } else {
            " (first sweep point)"
        };
        h.push(format!(
            "resolved{swept}: p = {}, q = {}, J = {:e}, coupling = {coupling}, lambda = {:e}, eta = {:e}, gamma = {:e}, T = {:e}, C = {:e}",
            p.p, p.q, p.j, p.lambda, p.eta, p.gamma, p.temperature, p.nesting
        ));
    }
    h
}

fn evaluate_all(spec: &SweepSpec) -> Result<Table, CliError> {
    let points = sweep_points(spec);
    let results: Vec<Result<commands::Fragment, CliError>> = points
        .par_iter()
        .map(|swept| {
            let pt = Point::new(spec, swept)?;
            commands::evaluate(spec.command, &pt)
        })
        .collect();
    let mut table = Table {
        columns: spec.sweeps.iter().map(|s| s.name.clone()).collect(),
        ..Table::default()
    };
    let mut command_columns: Option<Vec<String>> = None;
    for (swept, res) in points.iter().zip(results) {
        let frag = res?;
        match &command_columns {
            None => {
                table.columns.extend(frag.columns.iter().cloned());
                command_columns = Some(frag.columns.clone());
            }
            Some(cols) if *cols != frag.columns => {
                return Err(CliError::Usage(
                    "output columns differ between sweep points".into(),
                ));
            }
            Some(_) => {}
        }
        for row in frag.rows {
            let mut full: Vec<Cell> = swept.iter().map(|(_, v)| Cell::Num(*v)).collect();
            full.extend(row);
            table.rows.push(full);
        }
    }
    Ok(table)
}

/// Evaluates every sweep point on a pool of `spec.jobs` workers; row order is independent of
/// the worker count.
pub fn run(spec: &SweepSpec) -> Result<Table, CliError> {
    run_at(
        spec,
        &chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    )
}

pub fn run_at(spec: &SweepSpec, timestamp: &str) -> Result<Table, CliError> {
    args::validate_keys(spec)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = spec.jobs {
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| CliError::Io(e.to_string()))?;
    let mut table = pool.install(|| evaluate_all(spec))?;
    table.header = header(spec, timestamp);
    Ok(table)
}

pub fn render(table: &Table, format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => Ok(table.to_json()),
    }
}

pub fn write_output(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Full command-line entry point; returns the process exit code.
pub fn main_with_args(argv: &[String]) -> i32 {
    let result = match args::parse_invocation(argv) {
        Err(Ok(e)) => return args::clap_failure(e),
        Err(Err(e)) => Err(e),
        Ok(Invocation::Reproduce {
            figure,
            output_dir,
            jobs,
        }) => figures::reproduce_cli(&figure, &output_dir, jobs),
        Ok(Invocation::Sweep(spec)) => run(&spec)
            .and_then(|table| write_output(&render(&table, spec.format)?, spec.output.as_deref())),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

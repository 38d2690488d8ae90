use crate::args::{Command, SweepSpec};
use crate::error::CliError;
use crate::{render, run, Format};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

/// Expected value recorded in a figure manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct Landmark {
    pub quantity: &'static str,
    pub expected: f64,
    pub tolerance: f64,
    /// "published" for values read from the reference figures, "closed_form" for analytic ones.
    pub source: &'static str,
}

#[derive(Debug, Clone)]
pub struct Figure {
    pub id: String,
    pub artifacts: Vec<(String, SweepSpec)>,
    pub landmarks: Vec<Landmark>,
}

pub const FIGURE_COUNT: usize = 17;

fn lm(quantity: &'static str, expected: f64, tolerance: f64, source: &'static str) -> Landmark {
    Landmark {
        quantity,
        expected,
        tolerance,
        source,
    }
}

fn spec(command: Command) -> SweepSpec {
    SweepSpec::new(command).set("J", 1)
}

fn p4q2() -> SweepSpec {
    spec(Command::Classify).set("p", 4).set("q", 2)
}

pub fn figure(n: usize) -> Option<Figure> {
    let (artifacts, landmarks): (Vec<(String, SweepSpec)>, Vec<Landmark>) = match n {
        1 => {
            let saddle = spec(Command::Saddle)
                .set("lambda", 1.5)
                .set("T_over_C", 0.02)
                .sweep("gamma_over_C", 0.0, 6.0, 25);
            let mut arts = vec![("saddle".to_string(), saddle)];
            for lam in [0.5, 1.0, 1.5] {
                arts.push((
                    format!("critline_lambda{lam}"),
                    spec(Command::Critline).set("lambda", lam).sweep(
                        "T_over_C",
                        0.001,
                        2.0 * (1.0 + lam),
                        300,
                    ),
                ));
            }
            (
                arts,
                vec![lm(
                    "gamma_c_over_C at lambda=1.5, T/C=0.02",
                    5.0,
                    5e-3,
                    "published",
                )],
            )
        }
        2 => {
            let base = |c| {
                spec(c)
                    .set("p", 4)
                    .set("q", 4)
                    .set("lambda", 1)
                    .set("T_over_C4", 0.01)
            };
            (
                vec![
                    (
                        "free_energy".into(),
                        base(Command::FeScan)
                            .set("gamma_over_C3", 2.37)
                            .sweep("m", -1.0, 1.0, 2001),
                    ),
                    ("classify".into(), base(Command::Classify)),
                ],
                vec![lm("gamma_c1_over_C3", 2.37, 0.02, "published")],
            )
        }
        3 => {
            let pairs = [(0.01, 1.2), (0.1, 1.3), (0.6, 2.0), (3.3, 6.7)];
            let mut arts = Vec::new();
            for (lam, g) in pairs {
                let base = |c| {
                    spec(c)
                        .set("p", 4)
                        .set("q", 2)
                        .set("lambda_over_C2", lam)
                        .set("T_over_C4", 0.01)
                };
                arts.push((
                    format!("free_energy_lambda{lam}"),
                    base(Command::FeScan)
                        .set("gamma_over_C3", g)
                        .sweep("m", -1.0, 1.0, 1001),
                ));
                arts.push((format!("classify_lambda{lam}"), base(Command::Classify)));
            }
            let marks = vec![
                lm(
                    "gamma_c1_over_C3 at lambda/C^2=0.01",
                    1.2,
                    0.05,
                    "published",
                ),
                lm("gamma_c1_over_C3 at lambda/C^2=0.1", 1.3, 0.05, "published"),
                lm("gamma_c1_over_C3 at lambda/C^2=0.6", 2.0, 0.05, "published"),
                lm("gamma_c1_over_C3 at lambda/C^2=3.3", 6.7, 0.05, "published"),
            ];
            (arts, marks)
        }
        4 => (
            vec![(
                "barrier".into(),
                p4q2()
                    .set("T_over_C4", 0.01)
                    .sweep("lambda_over_C2", 0.01, 3.9, 40),
            )],
            vec![lm(
                "barrier vanishes near lambda/C^2",
                4.0,
                0.1,
                "published",
            )],
        ),
        5 => (
            vec![(
                "lambda_c".into(),
                spec(Command::Lambdac)
                    .set("p", 4)
                    .set("q", 2)
                    .sweep("T_over_C4", 0.0, 13.0, 27),
            )],
            vec![
                lm("lambda_c_over_C2 at T=0", 4.0, 0.05, "published"),
                lm(
                    "T_over_C4 where the ferro phase disappears",
                    12.5,
                    0.5,
                    "published",
                ),
            ],
        ),
        6 => (
            vec![(
                "gamma_difference".into(),
                spec(Command::Classify).set("p", 3).set("q", 2).sweep(
                    "lambda_over_C",
                    0.1,
                    5.0,
                    50,
                ),
            )],
            vec![lm(
                "min gamma_c1 - gamma_c2 (positive)",
                0.0,
                0.0,
                "published",
            )],
        ),
        7 => {
            let base = |c| {
                p4q2()
                    .command_as(c)
                    .set("lambda_over_C2", 4)
                    .set("gamma_over_C3", 8)
            };
            (
                vec![(
                    "free_energy".into(),
                    base(Command::FeScan).sweep("m", -1.0, 1.0, 1001),
                )],
                vec![
                    lm("lambda_c_over_C2", 4.0, 0.05, "closed_form"),
                    lm("gamma_c2_over_C3 at lambda_c", 8.0, 1e-6, "closed_form"),
                ],
            )
        }
        8 => {
            let arts = (3..=6)
                .map(|p| {
                    let hi = 1.5 * p as f64;
                    (
                        format!("classify_p{p}"),
                        spec(Command::Classify).set("p", p).set("q", 2).sweep(
                            &format!("lambda_over_C{}", p - 2),
                            0.1,
                            hi,
                            40,
                        ),
                    )
                })
                .collect();
            (
                arts,
                vec![lm("p=4 order change at lambda/C^2", 4.0, 0.05, "published")],
            )
        }
        9 => (
            vec![(
                "classify_p5".into(),
                spec(Command::Classify).set("p", 5).set("q", 2).sweep(
                    "lambda_over_C3",
                    1.5,
                    3.0,
                    31,
                ),
            )],
            vec![
                lm(
                    "gamma_c1 = gamma_c2 crossing at lambda/C^3",
                    2.078,
                    0.01,
                    "published",
                ),
                lm("coexistence ends at lambda/C^3", 2.5, 0.05, "published"),
            ],
        ),
        10 => (
            vec![(
                "overlap".into(),
                spec(Command::GapInstanton).set("p", 4).set("q", 2).sweep(
                    "lambda_over_C2",
                    0.05,
                    4.0,
                    40,
                ),
            )],
            vec![lm("overlap at lambda/C^2=4", 1.0, 0.01, "published")],
        ),
        11 => {
            let arts = [0.03, 3.3]
                .iter()
                .map(|&t| {
                    (
                        format!("classify_af_T{t}"),
                        spec(Command::Classify)
                            .set("p", 4)
                            .set("q", 4)
                            .set("coupling", "antiferro")
                            .set("T_over_C", t)
                            .sweep("lambda", 0.1, 3.0, 30),
                    )
                })
                .collect();
            (arts, Vec::new())
        }
        12 => (
            vec![(
                "hybrid".into(),
                spec(Command::HybridCritline).set("p", 4).set("q", 2).sweep(
                    "eta_over_C3",
                    0.0,
                    1.0,
                    11,
                ),
            )],
            vec![lm("lambda_c_over_C2 at eta=0", 4.0, 0.05, "published")],
        ),
        13 => {
            let arts = [3.8, 3.3, 0.07, 0.0]
                .iter()
                .map(|&g| {
                    (
                        format!("sectored_gamma{g}"),
                        spec(Command::Saddle)
                            .set("lambda", 0.9)
                            .set("k_over_N", 0.09)
                            .set("gamma_over_C", g),
                    )
                })
                .collect();
            (arts, Vec::new())
        }
        14 => {
            let mut arts = Vec::new();
            for lam in [0.9, 1.1] {
                let base = || {
                    spec(Command::MetaFm)
                        .set("lambda", lam)
                        .sweep("k_over_N", 0.01, 0.5, 50)
                };
                arts.push((
                    format!("gamma_ceiling_lambda{lam}"),
                    base().set("boundary", "gamma").set("hi", 4),
                ));
                arts.push((
                    format!("T_ceiling_lambda{lam}"),
                    base().set("boundary", "T").set("hi", 4),
                ));
            }
            (
                arts,
                vec![
                    lm(
                        "lowest metastable k/N at lambda=0.9",
                        0.05,
                        1e-9,
                        "closed_form",
                    ),
                    lm(
                        "highest metastable T/C at lambda=0.9",
                        1.28,
                        0.02,
                        "published",
                    ),
                ],
            )
        }
        15 => {
            let mut arts = Vec::new();
            for kn in [0.1, 0.2] {
                for lam in [0.9, 1.1] {
                    arts.push((
                        format!("T_gamma_k{kn}_lambda{lam}"),
                        spec(Command::MetaFm)
                            .set("lambda", lam)
                            .set("k_over_N", kn)
                            .set("boundary", "T")
                            .set("hi", 4)
                            .sweep("gamma_over_C", 0.0, 2.0, 21),
                    ));
                }
            }
            arts.push((
                "lambda_vs_k".into(),
                spec(Command::MetaFm)
                    .set("T_over_C", 0.03)
                    .set("gamma_over_C", 0.03)
                    .set("boundary", "lambda")
                    .set("hi", 4)
                    .sweep("k_over_N", 0.02, 0.5, 25),
            ));
            (arts, Vec::new())
        }
        16 => {
            let base = || spec(Command::MetaFm).set("lambda", 1).set("T_over_C", 0.03);
            let mut arts = vec![(
                "ground_state".to_string(),
                spec(Command::Saddle)
                    .set("lambda", 1)
                    .set("T_over_C", 0.03)
                    .sweep("gamma_over_C", 0.0, 2.0, 41),
            )];
            for kn in [0.03, 0.48] {
                arts.push((
                    format!("w_k{kn}"),
                    base()
                        .set("k_over_N", kn)
                        .sweep("gamma_over_C", 0.0, 2.0, 41),
                ));
            }
            arts.push((
                "free_energy_levels".into(),
                base()
                    .set("gamma_over_C", 0.03)
                    .set("N", 100)
                    .sweep("k_over_N", 0.01, 0.5, 50),
            ));
            (
                arts,
                vec![lm(
                    "gamma_over_C where k/N=0.48 stops being metastable",
                    1.25,
                    0.05,
                    "published",
                )],
            )
        }
        17 => {
            let mut arts = Vec::new();
            for t in [0.0, 0.33] {
                for k in [10, 20, 30] {
                    arts.push((
                        format!("af_k{k}_T{t}"),
                        spec(Command::MetaAf)
                            .set("N", 100)
                            .set("k", k)
                            .set("T_over_C", t)
                            .set("boundary", "lambda")
                            .set("hi", 4)
                            .sweep("gamma_over_C", 0.0, 2.0, 21),
                    ));
                }
            }
            (
                arts,
                vec![
                    lm(
                        "lambda threshold k/N=0.1 at T=0, gamma=0",
                        0.2,
                        1e-9,
                        "closed_form",
                    ),
                    lm(
                        "lambda threshold k/N=0.2 at T=0, gamma=0",
                        0.4,
                        1e-9,
                        "closed_form",
                    ),
                    lm(
                        "lambda threshold k/N=0.3 at T=0, gamma=0",
                        0.6,
                        1e-9,
                        "closed_form",
                    ),
                ],
            )
        }
        _ => return None,
    };
    Some(Figure {
        id: format!("fig{n}"),
        artifacts,
        landmarks,
    })
}

impl SweepSpec {
    fn command_as(mut self, command: Command) -> Self {
        self.command = command;
        self
    }
}

pub fn manifest(fig: &Figure, files: &[PathBuf]) -> Value {
    let landmarks: Vec<Value> = fig
        .landmarks
        .iter()
        .map(|l| json!({"quantity": l.quantity, "expected": l.expected, "tolerance": l.tolerance, "source": l.source}))
        .collect();
    let files: Vec<String> = files
        .iter()
        .filter_map(|f| f.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    json!({"figure": fig.id, "artifacts": files, "landmarks": landmarks})
}

/// Writes every artifact of a figure plus `<id>_manifest.json` into `dir`.
pub fn reproduce(fig: &Figure, dir: &Path, jobs: Option<usize>) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for (name, spec) in &fig.artifacts {
        let mut spec = spec.clone();
        spec.jobs = jobs;
        let table = run(&spec)?;
        let path = dir.join(format!("{}_{name}.csv", fig.id));
        std::fs::write(&path, render(&table, Format::Csv)?)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        files.push(path);
    }
    let path = dir.join(format!("{}_manifest.json", fig.id));
    let text = serde_json::to_string_pretty(&manifest(fig, &files)).unwrap_or_default();
    std::fs::write(&path, text + "\n")
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    files.push(path);
    Ok(files)
}

pub fn parse_figure_id(id: &str) -> Result<Vec<usize>, CliError> {
    if id == "all" {
        return Ok((1..=FIGURE_COUNT).collect());
    }
    id.strip_prefix("fig")
        .and_then(|n| n.parse::<usize>().ok())
        .filter(|n| (1..=FIGURE_COUNT).contains(n))
        .map(|n| vec![n])
        .ok_or_else(|| {
            CliError::Usage(format!(
                "unknown figure `{id}`; expected fig1..fig{FIGURE_COUNT} or all"
            ))
        })
}

pub fn reproduce_cli(id: &str, dir: &Path, jobs: Option<usize>) -> Result<(), CliError> {
    let figures = parse_figure_id(id)?;
    let jobs = match jobs {
        Some(j) => Some(j.max(1)),
        None => crate::args::env_jobs()?,
    };
    for n in figures {
        let fig = figure(n).ok_or_else(|| CliError::Usage(format!("unknown figure {n}")))?;
        for f in reproduce(&fig, dir, jobs)? {
            eprintln!("wrote {}", f.display());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_figure_is_defined_and_valid() {
        for n in 1..=FIGURE_COUNT {
            let fig = figure(n).unwrap();
            assert!(!fig.artifacts.is_empty());
            for (_, s) in &fig.artifacts {
                crate::args::validate_keys(s).unwrap();
            }
        }
        assert!(figure(18).is_none());
        assert!(parse_figure_id("fig0").is_err());
        assert_eq!(parse_figure_id("all").unwrap().len(), FIGURE_COUNT);
    }
}

use crate::error::CliError;
use clap::{Arg, ArgAction, ArgMatches};
use nqac::{Coupling, ModelParams, SolverSettings};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Command {
    FeScan,
    Saddle,
    Critline,
    Classify,
    Lambdac,
    Barrier,
    GapInstanton,
    GapSpinwave,
    MetaFm,
    MetaAf,
    Occupancy,
    HybridCritline,
    ExactSpectrum,
    ExactGap,
}

pub const COMMANDS: [(&str, Command); 14] = [
    ("fe-scan", Command::FeScan),
    ("saddle", Command::Saddle),
    ("critline", Command::Critline),
    ("classify", Command::Classify),
    ("lambdac", Command::Lambdac),
    ("barrier", Command::Barrier),
    ("gap-instanton", Command::GapInstanton),
    ("gap-spinwave", Command::GapSpinwave),
    ("meta-fm", Command::MetaFm),
    ("meta-af", Command::MetaAf),
    ("occupancy", Command::Occupancy),
    ("hybrid-critline", Command::HybridCritline),
    ("exact-spectrum", Command::ExactSpectrum),
    ("exact-gap", Command::ExactGap),
];

impl Command {
    pub fn about(self) -> &'static str {
        match self {
            Command::FeScan => "Free energy and gradient at magnetizations m",
            Command::Saddle => "Saddle-point solutions and their stability",
            Command::Critline => "Critical line in the (gamma, T) plane",
            Command::Classify => "Locate and classify the transition",
            Command::Lambdac => "Critical penalty strength at a temperature",
            Command::Barrier => "Free-energy barrier at the transition",
            Command::GapInstanton => "Instanton estimate of the minimum gap",
            Command::GapSpinwave => "Spin-wave spectrum and gap",
            Command::MetaFm => "Ferromagnetic metastable states",
            Command::MetaAf => "Antiferromagnetic metastable states",
            Command::Occupancy => "Thermal occupancy of metastable states",
            Command::HybridCritline => "Critical line of the hybrid scheme",
            Command::ExactSpectrum => "Exact classical spectrum of an encoded instance",
            Command::ExactGap => "Exact quantum gap of an encoded instance",
        }
    }

    pub fn name(self) -> &'static str {
        COMMANDS
            .iter()
            .find(|(_, c)| *c == self)
            .map(|(n, _)| *n)
            .unwrap_or("?")
    }
}

impl FromStr for Command {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        COMMANDS
            .iter()
            .find(|(n, _)| *n == s)
            .map(|(_, c)| *c)
            .ok_or_else(|| {
                let names: Vec<&str> = COMMANDS.iter().map(|(n, _)| *n).collect();
                CliError::Usage(format!(
                    "unknown command `{s}`; expected one of: {}",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        match self.steps {
            1 => vec![self.start],
            n => (0..n)
                .map(|i| {
                    if i == n - 1 {
                        self.stop
                    } else {
                        self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

/// Fully parsed run description.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub command: Command,
    pub fixed: BTreeMap<String, String>,
    pub sweeps: Vec<Sweep>,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub jobs: Option<usize>,
}

impl SweepSpec {
    pub fn new(command: Command) -> Self {
        SweepSpec {
            command,
            fixed: BTreeMap::new(),
            sweeps: Vec::new(),
            format: Format::Csv,
            output: None,
            jobs: None,
        }
    }

    pub fn set(mut self, key: &str, value: impl ToString) -> Self {
        self.fixed.insert(key.to_string(), value.to_string());
        self
    }

    pub fn sweep(mut self, name: &str, start: f64, stop: f64, steps: usize) -> Self {
        self.sweeps.push(Sweep {
            name: name.to_string(),
            start,
            stop,
            steps,
        });
        self
    }
}

const NUMERIC_KEYS: [&str; 22] = [
    "p",
    "q",
    "J",
    "lambda",
    "eta",
    "gamma",
    "T",
    "C",
    "m",
    "k_over_N",
    "N",
    "k",
    "m0",
    "mc",
    "h",
    "lo",
    "hi",
    "tolerance",
    "grid_points",
    "fp_tolerance",
    "max_iterations",
    "damping",
];
const TEXT_KEYS: [&str; 6] = [
    "coupling", "form", "subspace", "instance", "branch", "boundary",
];
const SCALABLE: [&str; 5] = ["J", "lambda", "eta", "gamma", "T"];

pub fn accepted_keys() -> String {
    let mut v: Vec<String> = NUMERIC_KEYS
        .iter()
        .chain(TEXT_KEYS.iter())
        .map(|s| s.to_string())
        .collect();
    v.push("<J|lambda|eta|gamma|T>_over_C[<k>]".into());
    v.join(", ")
}

/// Splits `gamma_over_C3` into ("gamma", 3).
pub fn scaled_name(key: &str) -> Option<(&str, i32)> {
    let (base, rest) = key.split_once("_over_C")?;
    if !SCALABLE.contains(&base) {
        return None;
    }
    let k = if rest.is_empty() {
        1
    } else {
        rest.parse().ok()?
    };
    Some((base, k))
}

fn known_key(key: &str) -> bool {
    NUMERIC_KEYS.contains(&key) || TEXT_KEYS.contains(&key) || scaled_name(key).is_some()
}

fn parse_f64(key: &str, v: &str) -> Result<f64, CliError> {
    v.parse::<f64>()
        .map_err(|_| CliError::Usage(format!("value `{v}` for `{key}` is not a number")))
}

fn parse_sweep(parts: &[&str]) -> Result<Sweep, CliError> {
    if parts.len() != 4 {
        return Err(CliError::Usage(
            "--sweep expects: name start stop steps".into(),
        ));
    }
    let steps: usize = parts[3].parse().map_err(|_| {
        CliError::Usage(format!(
            "sweep steps `{}` is not a positive integer",
            parts[3]
        ))
    })?;
    if steps == 0 {
        return Err(CliError::Usage("sweep steps must be positive".into()));
    }
    Ok(Sweep {
        name: parts[0].to_string(),
        start: parse_f64(parts[0], parts[1])?,
        stop: parse_f64(parts[0], parts[2])?,
        steps,
    })
}

/// Parses a flat `key = value` configuration file.
pub fn parse_config(text: &str, spec: &mut SweepSpec) -> Result<(), CliError> {
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "config line {}: expected `key = value`",
                lineno + 1
            ))
        })?;
        apply_option(spec, k.trim(), v.trim(), true)?;
    }
    Ok(())
}

fn apply_option(
    spec: &mut SweepSpec,
    key: &str,
    value: &str,
    from_config: bool,
) -> Result<(), CliError> {
    match key {
        "sweep" => {
            let parts: Vec<&str> = value.split_whitespace().collect();
            spec.sweeps.push(parse_sweep(&parts)?);
        }
        "format" => {
            spec.format = match value {
                "csv" => Format::Csv,
                "json" => Format::Json,
                _ => {
                    return Err(CliError::Usage(format!(
                        "unknown format `{value}`; expected csv or json"
                    )))
                }
            }
        }
        "output" => spec.output = Some(PathBuf::from(value)),
        "jobs" => {
            let j: usize = value
                .parse()
                .map_err(|_| CliError::Usage(format!("jobs `{value}` is not an integer")))?;
            spec.jobs = Some(j.max(1));
        }
        _ => {
            if !from_config || !spec.fixed.contains_key(key) {
                spec.fixed.insert(key.to_string(), value.to_string());
            }
        }
    }
    Ok(())
}

const SCALE_POWERS: std::ops::RangeInclusive<i32> = 1..=6;

fn parameter_names() -> Vec<(String, bool)> {
    let mut v: Vec<(String, bool)> = NUMERIC_KEYS
        .iter()
        .chain(TEXT_KEYS.iter())
        .map(|k| (k.to_string(), false))
        .collect();
    for base in SCALABLE {
        v.push((format!("{base}_over_C"), true));
        v.extend(SCALE_POWERS.map(|k| (format!("{base}_over_C{k}"), true)));
    }
    v
}

fn evaluator(name: &'static str, command: Command) -> clap::Command {
    let mut cmd = clap::Command::new(name)
        .about(command.about())
        .arg(
            Arg::new("sweep")
                .long("sweep")
                .num_args(4)
                .value_names(["NAME", "START", "STOP", "STEPS"])
                .action(ArgAction::Append)
                .allow_negative_numbers(true)
                .help("Sweep a parameter over STEPS points from START to STOP inclusive"),
        )
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("FILE")
                .value_parser(clap::value_parser!(PathBuf))
                .help("Read key = value settings; command-line values take precedence"),
        )
        .arg(
            Arg::new("format")
                .long("format")
                .value_parser(["csv", "json"])
                .help("Output format [default: csv]"),
        )
        .arg(
            Arg::new("output")
                .long("output")
                .value_name("PATH")
                .value_parser(clap::value_parser!(PathBuf))
                .help("Write to PATH instead of stdout"),
        )
        .arg(
            Arg::new("jobs")
                .long("jobs")
                .value_name("N")
                .value_parser(clap::value_parser!(usize))
                .help("Worker threads [default: NQAC_JOBS or all cores]"),
        )
        .after_help("Scaled forms <J|lambda|eta|gamma|T>_over_C<k> give the value divided by C^k.");
    for (key, scaled) in parameter_names() {
        cmd = cmd.arg(
            Arg::new(key.clone())
                .long(key)
                .value_name("VALUE")
                .allow_negative_numbers(true)
                .hide(scaled)
                .help_heading("Parameters"),
        );
    }
    cmd
}

/// Argument grammar of the `nqac` binary.
pub fn cli() -> clap::Command {
    let mut cmd = clap::Command::new("nqac")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Mean-field analysis of nested quantum annealing correction")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for (name, command) in COMMANDS {
        cmd = cmd.subcommand(evaluator(name, command));
    }
    cmd.subcommand(
        clap::Command::new("reproduce")
            .about("Regenerate the data behind a figure (fig1..fig17 or all)")
            .arg(Arg::new("figure").required(true))
            .arg(
                Arg::new("output-dir")
                    .long("output-dir")
                    .value_name("DIR")
                    .default_value(".")
                    .value_parser(clap::value_parser!(PathBuf)),
            )
            .arg(
                Arg::new("jobs")
                    .long("jobs")
                    .value_name("N")
                    .value_parser(clap::value_parser!(usize)),
            ),
    )
}

/// Parsed command line.
#[derive(Debug, Clone, PartialEq)]
pub enum Invocation {
    Sweep(SweepSpec),
    Reproduce {
        figure: String,
        output_dir: PathBuf,
        jobs: Option<usize>,
    },
}

pub(crate) fn env_jobs() -> Result<Option<usize>, CliError> {
    match std::env::var("NQAC_JOBS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(|j| Some(j.max(1)))
            .map_err(|_| CliError::Usage(format!("NQAC_JOBS `{v}` is not an integer"))),
        Err(_) => Ok(None),
    }
}

fn usage_error(e: clap::Error) -> CliError {
    let mut msg = e.render().to_string();
    if e.kind() == clap::error::ErrorKind::UnknownArgument {
        msg.push_str(&format!("\naccepted parameters: {}", accepted_keys()));
    }
    CliError::Usage(msg.trim_end().trim_start_matches("error: ").to_string())
}

fn spec_from_matches(command: Command, m: &ArgMatches) -> Result<SweepSpec, CliError> {
    let mut spec = SweepSpec::new(command);
    for (key, _) in parameter_names() {
        if let Some(v) = m.get_one::<String>(&key) {
            spec.fixed.insert(key, v.clone());
        }
    }
    if let Some(occurrences) = m.get_occurrences::<String>("sweep") {
        for occ in occurrences {
            let parts: Vec<&str> = occ.map(String::as_str).collect();
            spec.sweeps.push(parse_sweep(&parts)?);
        }
    }
    if let Some(f) = m.get_one::<String>("format") {
        apply_option(&mut spec, "format", f, false)?;
    }
    spec.output = m.get_one::<PathBuf>("output").cloned();
    spec.jobs = m.get_one::<usize>("jobs").map(|j| (*j).max(1));
    if let Some(path) = m.get_one::<PathBuf>("config") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        parse_config(&text, &mut spec)?;
    }
    if spec.jobs.is_none() {
        spec.jobs = env_jobs()?;
    }
    validate_keys(&spec)?;
    Ok(spec)
}

/// Parses a full argument list (without the program name). Help and version requests come
/// back as `Err` with the rendered text, so callers can print them.
pub fn parse_invocation(args: &[String]) -> Result<Invocation, Result<clap::Error, CliError>> {
    let m = cli()
        .try_get_matches_from(std::iter::once("nqac").chain(args.iter().map(String::as_str)))
        .map_err(Ok)?;
    let (name, sub) = m.subcommand().expect("subcommand is required");
    if name == "reproduce" {
        return Ok(Invocation::Reproduce {
            figure: sub.get_one::<String>("figure").cloned().unwrap_or_default(),
            output_dir: sub
                .get_one::<PathBuf>("output-dir")
                .cloned()
                .unwrap_or_else(|| PathBuf::from(".")),
            jobs: sub.get_one::<usize>("jobs").copied(),
        });
    }
    let command: Command = name.parse().map_err(Err)?;
    spec_from_matches(command, sub)
        .map(Invocation::Sweep)
        .map_err(Err)
}

/// Parses `<command> [--key value]... [--sweep name start stop steps]...` into a sweep.
pub fn parse_args(args: &[String]) -> Result<SweepSpec, CliError> {
    match parse_invocation(args) {
        Ok(Invocation::Sweep(spec)) => Ok(spec),
        Ok(Invocation::Reproduce { .. }) => {
            Err(CliError::Usage("`reproduce` is not a sweep command".into()))
        }
        Err(Ok(e)) => Err(usage_error(e)),
        Err(Err(e)) => Err(e),
    }
}

pub(crate) fn clap_failure(e: clap::Error) -> i32 {
    use clap::error::ErrorKind;
    match e.kind() {
        ErrorKind::DisplayHelp
        | ErrorKind::DisplayVersion
        | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            e.exit_code()
        }
        _ => {
            let err = usage_error(e);
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

pub fn validate_keys(spec: &SweepSpec) -> Result<(), CliError> {
    let names: Vec<&str> = spec
        .fixed
        .keys()
        .map(String::as_str)
        .chain(spec.sweeps.iter().map(|s| s.name.as_str()))
        .collect();
    let unknown: Vec<&str> = names.iter().copied().filter(|k| !known_key(k)).collect();
    if !unknown.is_empty() {
        return Err(CliError::Usage(format!(
            "unknown parameter(s): {}; accepted: {}",
            unknown.join(", "),
            accepted_keys()
        )));
    }
    let mut bases: BTreeMap<&str, &str> = BTreeMap::new();
    for name in &names {
        let base = scaled_name(name).map(|(b, _)| b).unwrap_or(name);
        if let Some(prev) = bases.insert(base, name) {
            return Err(CliError::Usage(format!(
                "parameter `{base}` given more than once (`{prev}` and `{name}`)"
            )));
        }
    }
    if spec.sweeps.len() > 2 {
        return Err(CliError::Usage(
            "at most two swept parameters are supported".into(),
        ));
    }
    for s in &spec.sweeps {
        if TEXT_KEYS.contains(&s.name.as_str()) {
            return Err(CliError::Usage(format!("`{}` cannot be swept", s.name)));
        }
    }
    Ok(())
}

/// Parameter values at one sweep point.
#[derive(Debug, Clone)]
pub struct Point {
    numbers: BTreeMap<String, f64>,
    texts: BTreeMap<String, String>,
}

impl Point {
    pub fn new(spec: &SweepSpec, swept: &[(String, f64)]) -> Result<Self, CliError> {
        let mut numbers = BTreeMap::new();
        let mut texts = BTreeMap::new();
        for (k, v) in &spec.fixed {
            if TEXT_KEYS.contains(&k.as_str()) {
                texts.insert(k.clone(), v.clone());
            } else {
                numbers.insert(k.clone(), parse_f64(k, v)?);
            }
        }
        for (k, v) in swept {
            numbers.insert(k.clone(), *v);
        }
        Ok(Point { numbers, texts })
    }

    fn c(&self) -> f64 {
        self.numbers.get("C").copied().unwrap_or(1.0)
    }

    /// Unscaled value of a parameter given either directly or as `<name>_over_C<k>`.
    pub fn get(&self, name: &str) -> Option<f64> {
        if let Some(v) = self.numbers.get(name) {
            return Some(*v);
        }
        self.numbers.iter().find_map(|(k, v)| match scaled_name(k) {
            Some((base, power)) if base == name => Some(v * self.c().powi(power)),
            _ => None,
        })
    }

    pub fn num(&self, name: &str, default: f64) -> f64 {
        self.get(name).unwrap_or(default)
    }

    pub fn require(&self, name: &str) -> Result<f64, CliError> {
        self.get(name)
            .ok_or_else(|| CliError::Usage(format!("parameter `{name}` is required")))
    }

    pub fn integer(&self, name: &str) -> Result<Option<usize>, CliError> {
        match self.get(name) {
            None => Ok(None),
            Some(v) if v >= 0.0 && v.fract() == 0.0 && v < 1e15 => Ok(Some(v as usize)),
            Some(v) => Err(CliError::Usage(format!(
                "`{name}` must be a non-negative integer, got {v}"
            ))),
        }
    }

    pub fn require_integer(&self, name: &str) -> Result<usize, CliError> {
        self.integer(name)?
            .ok_or_else(|| CliError::Usage(format!("parameter `{name}` is required")))
    }

    pub fn text(&self, name: &str) -> Option<&str> {
        self.texts.get(name).map(String::as_str)
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        let p = self.integer("p")?.unwrap_or(2) as u32;
        let q = self.integer("q")?.unwrap_or(2) as u32;
        let coupling = match self.text("coupling").unwrap_or("ferro") {
            "ferro" => Coupling::Ferro,
            "antiferro" => Coupling::Antiferro,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown coupling `{other}`; expected ferro or antiferro"
                )))
            }
        };
        let params = ModelParams::new(p, q, self.num("J", 1.0), self.num("lambda", 0.0))
            .with_coupling(coupling)
            .with_eta(self.num("eta", 0.0))
            .with_gamma(self.num("gamma", 0.0))
            .with_temperature(self.num("T", 0.0))
            .with_nesting(self.c());
        params.validate()?;
        Ok(params)
    }

    pub fn settings(&self) -> Result<SolverSettings, CliError> {
        let d = SolverSettings::default();
        let s = SolverSettings {
            grid_points: self.integer("grid_points")?.unwrap_or(d.grid_points),
            fp_tolerance: self.num("fp_tolerance", d.fp_tolerance),
            max_iterations: self.integer("max_iterations")?.unwrap_or(d.max_iterations),
            damping: self.num("damping", d.damping),
        };
        s.validate()?;
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn scaled_names_resolve() {
        let spec = parse_args(&args(
            "fe-scan --p 4 --C 2 --gamma_over_C3 1.5 --T_over_C4 0.01",
        ))
        .unwrap();
        let pt = Point::new(&spec, &[]).unwrap();
        assert_eq!(pt.get("gamma"), Some(12.0));
        assert_eq!(pt.get("T"), Some(0.16));
        assert_eq!(scaled_name("T_over_C"), Some(("T", 1)));
        assert_eq!(scaled_name("m_over_C2"), None);
    }

    #[test]
    fn conflicting_and_unknown_names() {
        assert!(matches!(
            parse_args(&args("fe-scan --gamma 1 --gamma_over_C3 2")),
            Err(CliError::Usage(_))
        ));
        let err = parse_args(&args("fe-scan --bogus 1"))
            .unwrap_err()
            .to_string();
        assert!(err.contains("bogus") && err.contains("lambda"));
    }

    #[test]
    fn sweep_and_config() {
        let mut spec =
            parse_args(&args("critline --lambda 1.5 --sweep T_over_C 0.001 3 300")).unwrap();
        assert_eq!(spec.sweeps[0].values().len(), 300);
        parse_config("lambda = 9\nJ = 2 # comment\nformat = json\n", &mut spec).unwrap();
        assert_eq!(spec.fixed["lambda"], "1.5");
        assert_eq!(spec.fixed["J"], "2");
        assert_eq!(spec.format, Format::Json);
    }
}

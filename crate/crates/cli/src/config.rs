//! Command-line and config-file parsing.
//!
//! Parameters are looked up in a per-subcommand table. A flag `--energy-ev`
//! and a file line `energy_ev = 1.0` name the same key; flags win.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use atomcoh::units::CONSTANT_KEYS;
use atomcoh::PhysicalConstants;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Purity,
    Momentum,
    TwoSlit,
    XSection,
    Conditions,
}

impl Subcommand {
    pub const ALL: [Subcommand; 5] = [
        Self::Purity,
        Self::Momentum,
        Self::TwoSlit,
        Self::XSection,
        Self::Conditions,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Purity => "purity",
            Self::Momentum => "momentum",
            Self::TwoSlit => "twoslit",
            Self::XSection => "xsection",
            Self::Conditions => "conditions",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == s)
    }

    pub fn params(self) -> &'static [ParamSpec] {
        match self {
            Self::Purity => PURITY,
            Self::Momentum => MOMENTUM,
            Self::TwoSlit => TWOSLIT,
            Self::XSection => XSECTION,
            Self::Conditions => CONDITIONS,
        }
    }

    fn default_format(self) -> Format {
        match self {
            Self::Conditions => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Positive,
    NonNegative,
    Real,
    /// Integer count with a lower bound.
    Count(usize),
    Choice(&'static [&'static str]),
    /// Positive number, or `auto` to derive it from other parameters.
    PositiveOrAuto,
}

#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub key: &'static str,
    pub default: &'static str,
    pub kind: Kind,
    pub help: &'static str,
}

const fn p(key: &'static str, default: &'static str, kind: Kind, help: &'static str) -> ParamSpec {
    ParamSpec {
        key,
        default,
        kind,
        help,
    }
}

const SPECIES: &[&str] = &["hydrogen", "helium"];

const PURITY: &[ParamSpec] = &[
    p("z_min", "1e-3", Kind::Positive, "smallest a_B/width"),
    p("z_max", "1e2", Kind::Positive, "largest a_B/width"),
    p("points", "50", Kind::Count(2), "log-spaced grid points"),
];

const MOMENTUM: &[ParamSpec] = &[
    p("z0", "1.0", Kind::Positive, "a_B/delta"),
    p("q_max", "10", Kind::Positive, "largest |p - P0| in hbar/a_B"),
    p("points", "101", Kind::Count(2), "uniform grid points from 0"),
    p("species", "hydrogen", Kind::Choice(SPECIES), "bound electron state"),
];

const TWOSLIT: &[ParamSpec] = &[
    p("separation_ab", "1000", Kind::Positive, "slit separation in a_B"),
    p("delta_ab", "200", Kind::Positive, "initial packet width in a_B"),
    p("p0_au", "5", Kind::Real, "forward momentum in hbar/a_B"),
    p("spreading", "50", Kind::Positive, "hbar t0/(2 M delta^2) at the screen"),
    p("t0_s", "auto", Kind::PositiveOrAuto, "flight time in seconds; overrides spreading"),
    p("amp_a", "0.7071067811865476", Kind::NonNegative, "|a|; |b| = sqrt(1 - |a|^2)"),
    p("phase_rad", "0", Kind::Real, "phase of b relative to a"),
    p("points", "401", Kind::Count(3), "screen samples"),
    p("span_periods", "1", Kind::Positive, "screen span in expected fringe periods"),
];

const XSECTION: &[ParamSpec] = &[
    p("energy_ev", "1.0", Kind::Positive, "neutron energy"),
    p("points", "19", Kind::Count(2), "lab angles on [0, pi]"),
    p("method", "both", Kind::Choice(&["numeric", "asymptotic", "both"]), "evaluation path"),
    p("z0", "0", Kind::NonNegative, "a_B/delta of the helium packet"),
    p("scatt_length_fm", "3.26", Kind::Real, "neutron-alpha scattering length"),
    p("mass_ratio", "4", Kind::Positive, "m_alpha/m_n in the numeric path"),
    p("nucleus_size_fm", "0.2", Kind::Positive, "interaction range for the decoherence condition"),
    p("delta_ab", "1e4", Kind::Positive, "packet width used for the condition margins"),
];

const CONDITIONS: &[ParamSpec] = &[
    p("energy_ev", "1.0", Kind::Positive, "neutron energy"),
    p("delta_ab", "1e4", Kind::Positive, "packet width in a_B"),
    p("species", "helium", Kind::Choice(SPECIES), "atom carrying the packet"),
    p("nucleus_size_fm", "0.2", Kind::Positive, "interaction range"),
];

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Count(usize),
    Text(String),
    Auto,
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(v) => write!(f, "{v}"),
            Value::Count(n) => write!(f, "{n}"),
            Value::Text(s) => f.write_str(s),
            Value::Auto => f.write_str("auto"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub params: BTreeMap<&'static str, Value>,
    /// `None` writes to standard output.
    pub output: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
    pub constants: PhysicalConstants,
    /// Constant overrides as given, for the metadata header.
    pub constant_overrides: BTreeMap<String, f64>,
}

impl RunConfig {
    pub fn number(&self, key: &str) -> f64 {
        match self.params.get(key) {
            Some(Value::Number(v)) => *v,
            other => panic!("parameter {key} is not numeric: {other:?}"),
        }
    }

    pub fn count(&self, key: &str) -> usize {
        match self.params.get(key) {
            Some(Value::Count(n)) => *n,
            other => panic!("parameter {key} is not a count: {other:?}"),
        }
    }

    pub fn text(&self, key: &str) -> &str {
        match self.params.get(key) {
            Some(Value::Text(s)) => s,
            other => panic!("parameter {key} is not text: {other:?}"),
        }
    }

    /// `None` when the parameter was left at `auto`.
    pub fn optional(&self, key: &str) -> Option<f64> {
        match self.params.get(key) {
            Some(Value::Number(v)) => Some(*v),
            _ => None,
        }
    }
}

pub enum Parsed {
    Run(RunConfig),
    Help(String),
}

pub fn usage() -> String {
    let mut s = String::from(
        "usage: atomcoh <subcommand> [--key value ...] [--config FILE] [--output PATH]\n\
         \x20               [--format csv|json] [--threads N] [--const-NAME VALUE]\n\n\
         Config files hold one `key = value` per line; `#` starts a comment.\n\
         Flags override file entries. Constants are overridden by their name or const_<name>.\n",
    );
    for cmd in Subcommand::ALL {
        s.push_str(&format!("\n{}:\n", cmd.name()));
        for spec in cmd.params() {
            s.push_str(&format!(
                "  --{:<18} {:<10} {}\n",
                spec.key.replace('_', "-"),
                spec.default,
                spec.help
            ));
        }
    }
    s.push_str(&format!("\nconstants: {}\n", CONSTANT_KEYS.join(", ")));
    s
}

fn parse_value(spec: &ParamSpec, raw: &str) -> Result<Value, CliError> {
    let raw = raw.trim();
    let number = || {
        raw.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| CliError::Usage(format!("{} expects a number, got {raw:?}", spec.key)))
    };
    let value = match spec.kind {
        Kind::Positive => {
            let v = number()?;
            if !(v > 0.0) {
                return Err(CliError::Usage(format!("{} must be positive, got {v}", spec.key)));
            }
            Value::Number(v)
        }
        Kind::NonNegative => {
            let v = number()?;
            if !(v >= 0.0) {
                return Err(CliError::Usage(format!(
                    "{} must be non-negative, got {v}",
                    spec.key
                )));
            }
            Value::Number(v)
        }
        Kind::Real => Value::Number(number()?),
        Kind::Count(min) => {
            let n: usize = raw.parse().map_err(|_| {
                CliError::Usage(format!("{} expects a whole number, got {raw:?}", spec.key))
            })?;
            if n < min {
                return Err(CliError::Usage(format!("{} must be at least {min}, got {n}", spec.key)));
            }
            Value::Count(n)
        }
        Kind::Choice(options) => {
            if !options.contains(&raw) {
                return Err(CliError::Usage(format!(
                    "{} must be one of {}, got {raw:?}",
                    spec.key,
                    options.join(", ")
                )));
            }
            Value::Text(raw.to_string())
        }
        Kind::PositiveOrAuto => {
            if raw == "auto" {
                Value::Auto
            } else {
                let v = number()?;
                if !(v > 0.0) {
                    return Err(CliError::Usage(format!("{} must be positive, got {v}", spec.key)));
                }
                Value::Number(v)
            }
        }
    };
    Ok(value)
}

fn unknown_key(cmd: Subcommand, key: &str) -> CliError {
    let valid: Vec<&str> = cmd.params().iter().map(|s| s.key).collect();
    CliError::Usage(format!(
        "unknown key {key:?} for {}; valid keys: {}, [const_]<{}>",
        cmd.name(),
        valid.join(", "),
        CONSTANT_KEYS.join("|")
    ))
}

/// Parses `key = value` lines into raw entries, keeping line numbers.
fn parse_file(text: &str) -> Result<Vec<(String, String, usize)>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config line {}: expected key = value, got {line:?}",
                i + 1
            )));
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(CliError::Usage(format!(
                "config line {}: empty key or value in {line:?}",
                i + 1
            )));
        }
        out.push((k.to_string(), v.to_string(), i + 1));
    }
    Ok(out)
}

/// Splits argv (without the program name) into the subcommand and raw
/// options. Returns the `--config` path if given.
struct RawArgs {
    subcommand: Subcommand,
    options: Vec<(String, String)>,
    config_path: Option<PathBuf>,
    output: Option<PathBuf>,
    format: Option<Format>,
    threads: Option<usize>,
}

fn split_args(argv: &[String]) -> Result<Option<RawArgs>, CliError> {
    let Some(first) = argv.first() else {
        return Err(CliError::Usage("missing subcommand".into()));
    };
    if first == "--help" || first == "-h" || first == "help" {
        return Ok(None);
    }
    let subcommand = Subcommand::parse(first).ok_or_else(|| {
        let names: Vec<&str> = Subcommand::ALL.iter().map(|c| c.name()).collect();
        CliError::Usage(format!(
            "unknown subcommand {first:?}; expected one of {}",
            names.join(", ")
        ))
    })?;
    let mut raw = RawArgs {
        subcommand,
        options: Vec::new(),
        config_path: None,
        output: None,
        format: None,
        threads: None,
    };
    let mut it = argv[1..].iter();
    while let Some(arg) = it.next() {
        if arg == "--help" || arg == "-h" {
            return Ok(None);
        }
        let Some(flag) = arg.strip_prefix("--") else {
            return Err(CliError::Usage(format!("unexpected argument {arg:?}")));
        };
        let (name, value) = match flag.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => {
                let v = it
                    .next()
                    .ok_or_else(|| CliError::Usage(format!("--{flag} needs a value")))?;
                (flag.to_string(), v.clone())
            }
        };
        match name.as_str() {
            "config" => raw.config_path = Some(PathBuf::from(value)),
            "output" => raw.output = Some(PathBuf::from(value)),
            "format" => {
                raw.format = Some(match value.as_str() {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    _ => {
                        return Err(CliError::Usage(format!(
                            "--format must be csv or json, got {value:?}"
                        )))
                    }
                })
            }
            "threads" => {
                let n: usize = value
                    .parse()
                    .ok()
                    .filter(|n| *n > 0)
                    .ok_or_else(|| CliError::Usage(format!("--threads expects a positive integer, got {value:?}")))?;
                raw.threads = Some(n);
            }
            _ => raw.options.push((name.replace('-', "_"), value)),
        }
    }
    Ok(Some(raw))
}

/// Builds a validated [`RunConfig`] from argv (without the program name) and
/// the contents of the config file, if one was read.
pub fn parse_config(argv: &[String], file_contents: Option<&str>) -> Result<Parsed, CliError> {
    let Some(raw) = split_args(argv)? else {
        return Ok(Parsed::Help(usage()));
    };
    let cmd = raw.subcommand;
    let mut entries: BTreeMap<String, (String, String)> = BTreeMap::new();
    if let Some(text) = file_contents {
        for (k, v, line) in parse_file(text)? {
            entries.insert(k, (v, format!("config line {line}")));
        }
    }
    for (k, v) in raw.options {
        let origin = format!("flag --{}", k.replace('_', "-"));
        entries.insert(k, (v, origin));
    }

    let mut params = BTreeMap::new();
    for spec in cmd.params() {
        params.insert(spec.key, parse_value(spec, spec.default)?);
    }
    let mut constants = PhysicalConstants::default();
    let mut constant_overrides = BTreeMap::new();
    for (key, (value, origin)) in entries {
        let constant = key
            .strip_prefix("const_")
            .or_else(|| CONSTANT_KEYS.contains(&key.as_str()).then_some(key.as_str()));
        if let Some(name) = constant {
            let v: f64 = value.trim().parse().map_err(|_| {
                CliError::Usage(format!("{origin}: constant {name} expects a number, got {value:?}"))
            })?;
            constants
                .set(name, v)
                .map_err(|e| CliError::Usage(format!("{origin}: {e}")))?;
            constant_overrides.insert(name.to_string(), v);
            continue;
        }
        let spec = cmd
            .params()
            .iter()
            .find(|s| s.key == key)
            .ok_or_else(|| match unknown_key(cmd, &key) {
                CliError::Usage(m) => CliError::Usage(format!("{origin}: {m}")),
                e => e,
            })?;
        let parsed = parse_value(spec, &value).map_err(|e| match e {
            CliError::Usage(m) => CliError::Usage(format!("{origin}: {m}")),
            e => e,
        })?;
        params.insert(spec.key, parsed);
    }

    let config = RunConfig {
        subcommand: cmd,
        params,
        output: raw.output,
        format: raw.format.unwrap_or(cmd.default_format()),
        threads: raw.threads,
        constants,
        constant_overrides,
    };
    cross_validate(&config)?;
    Ok(Parsed::Run(config))
}

/// Reads the `--config` path out of argv, if present, so the caller can load it.
pub fn config_path(argv: &[String]) -> Result<Option<PathBuf>, CliError> {
    Ok(split_args(argv)?.and_then(|r| r.config_path))
}

fn cross_validate(c: &RunConfig) -> Result<(), CliError> {
    match c.subcommand {
        Subcommand::Purity if c.number("z_min") >= c.number("z_max") => Err(CliError::Usage(
            format!("z_min ({}) must be below z_max ({})", c.number("z_min"), c.number("z_max")),
        )),
        Subcommand::TwoSlit if c.number("amp_a") > 1.0 => Err(CliError::Usage(format!(
            "amp_a must be at most 1, got {}",
            c.number("amp_a")
        ))),
        Subcommand::XSection if c.number("scatt_length_fm") == 0.0 => {
            Err(CliError::Usage("scatt_length_fm must be non-zero".into()))
        }
        Subcommand::XSection if c.number("mass_ratio") <= 1.0 => Err(CliError::Usage(format!(
            "mass_ratio must exceed 1, got {}",
            c.number("mass_ratio")
        ))),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn run(argv: &str, file: Option<&str>) -> Result<RunConfig, CliError> {
        match parse_config(&args(argv), file)? {
            Parsed::Run(c) => Ok(c),
            Parsed::Help(_) => panic!("unexpected help"),
        }
    }

    #[test]
    fn flags_map_to_keys() {
        let c = run("xsection --energy-ev 1.0 --points 19", None).unwrap();
        assert_eq!(c.subcommand, Subcommand::XSection);
        assert_eq!(c.number("energy_ev"), 1.0);
        assert_eq!(c.count("points"), 19);
        assert_eq!(c.text("method"), "both");
        assert_eq!(c.number("scatt_length_fm"), 3.26);
        assert_eq!(c.format, Format::Csv);
    }

    #[test]
    fn flag_beats_file() {
        let c = run("momentum --z0 0.5", Some("z0=0.01\n")).unwrap();
        assert_eq!(c.number("z0"), 0.5);
        let c = run("momentum", Some("# header\n\nz0 = 0.01  # inline\n")).unwrap();
        assert_eq!(c.number("z0"), 0.01);
    }

    #[test]
    fn rejects_negative_energy() {
        let err = run("xsection --energy-ev -1", None).unwrap_err();
        assert!(err.to_string().contains("positive"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn unknown_key_lists_valid_ones() {
        let err = run("purity --bogus 3", None).unwrap_err().to_string();
        assert!(err.contains("z_min") && err.contains("z_max") && err.contains("points"), "{err}");
        let err = run("purity", Some("z_min=1e-3\nfoo=1\n")).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = run("purity", Some("z_min=1e-3\n\njunk\n")).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn type_mismatch_names_key() {
        let err = run("purity --points many", None).unwrap_err().to_string();
        assert!(err.contains("points"), "{err}");
        let err = run("xsection --method fast", None).unwrap_err().to_string();
        assert!(err.contains("numeric, asymptotic, both"), "{err}");
    }

    #[test]
    fn global_options() {
        let c = run("conditions --format csv --threads 2 --output out.csv", None).unwrap();
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.threads, Some(2));
        assert_eq!(c.output.as_deref(), Some(std::path::Path::new("out.csv")));
        assert_eq!(run("conditions", None).unwrap().format, Format::Json);
        assert!(run("conditions --format xml", None).is_err());
        assert!(run("conditions --threads 0", None).is_err());
    }

    #[test]
    fn constant_overrides() {
        let c = run("xsection --const-m-alpha-over-m-n 4", None).unwrap();
        assert!((c.constants.m_alpha / c.constants.m_n - 4.0).abs() < 1e-14);
        assert!(run("xsection --const-planck 1", None).is_err());
        let c = run("conditions", Some("m_alpha_over_m_n=4.0\n")).unwrap();
        assert!((c.constants.m_alpha / c.constants.m_n - 4.0).abs() < 1e-14);
        assert_eq!(c.constant_overrides.get("m_alpha_over_m_n"), Some(&4.0));
    }

    #[test]
    fn auto_values_and_cross_checks() {
        let c = run("twoslit", None).unwrap();
        assert_eq!(c.optional("t0_s"), None);
        let c = run("twoslit --t0-s 1e-3", None).unwrap();
        assert_eq!(c.optional("t0_s"), Some(1e-3));
        assert!(run("twoslit --amp-a 1.5", None).is_err());
        assert!(run("purity --z-min 10 --z-max 1", None).is_err());
    }

    #[test]
    fn help_and_missing_subcommand() {
        assert!(matches!(parse_config(&args("--help"), None), Ok(Parsed::Help(_))));
        assert!(parse_config(&[], None).is_err());
        assert!(parse_config(&args("fly"), None).is_err());
    }
}

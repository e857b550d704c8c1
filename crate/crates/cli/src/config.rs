//! Sectioned key-value config files.
//!
//! ```text
//! [units]
//! g = 1
//!
//! [particle.1]
//! kind = yurke-stoler
//! z0 = 4
//! delta0 = 1
//! mass = 2
//!
//! [sweep]
//! masses = 1, 2, 4, 8, 16
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use qfall::experiments::config::short_digest;
use qfall::experiments::{ExperimentConfig, GridSettings, ParticleConfig, SolverSettings, SweepSettings};
use qfall::states::{StatePreset, WavepacketSpec};
use qfall::units::{MassPair, UnitSystem};
use qfall::Error;

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl ParseError {
    fn at(line: usize, key: &str, message: impl Into<String>) -> Self {
        ParseError {
            line: Some(line),
            key: Some(key.to_string()),
            message: message.into(),
        }
    }

    fn line(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line: Some(line),
            key: None,
            message: message.into(),
        }
    }

    fn general(message: impl Into<String>) -> Self {
        ParseError {
            line: None,
            key: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = self.line {
            write!(f, "line {l}: ")?;
        }
        if let Some(k) = &self.key {
            write!(f, "key '{k}': ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SnapshotMode {
    #[default]
    None,
    Strided(usize),
}

impl FromStr for SnapshotMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "none" {
            return Ok(SnapshotMode::None);
        }
        match s.strip_prefix("strided:").map(|k| k.trim().parse::<usize>()) {
            Some(Ok(k)) if k > 0 => Ok(SnapshotMode::Strided(k)),
            _ => Err(format!("expected 'none' or 'strided:K' with K >= 1, got '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SnapshotFormat {
    #[default]
    Csv,
    Binary,
}

impl FromStr for SnapshotFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "csv" => Ok(SnapshotFormat::Csv),
            "binary" | "bin" => Ok(SnapshotFormat::Binary),
            other => Err(format!("expected 'csv' or 'binary', got '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputSettings {
    pub dir: Option<PathBuf>,
    pub snapshots: SnapshotMode,
    pub snapshot_format: SnapshotFormat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedConfig {
    pub config: ExperimentConfig,
    pub output: OutputSettings,
    /// Keys left at their default value, with the value used.
    pub defaults: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

const UNITS_KEYS: &[&str] = &["hbar", "g", "length_ref", "mass_ref"];
const PARTICLE_KEYS: &[&str] = &[
    "kind",
    "z0",
    "delta",
    "delta0",
    "c_plus_re",
    "c_plus_im",
    "c_minus_re",
    "c_minus_im",
    "theta",
    "mass",
    "m_inertial",
    "m_gravitational",
];
const GRID_KEYS: &[&str] = &["z_min", "z_max", "n_points"];
const SOLVER_KEYS: &[&str] = &["dt", "steps_per_fall", "snapshot_stride", "store_fields"];
const EXPERIMENT_KEYS: &[&str] = &[
    "z_detector",
    "frame_acceleration",
    "auto_match",
    "match_tolerance",
    "seed",
    "threads",
];
const SWEEP_KEYS: &[&str] = &["masses", "states", "thetas", "simulate"];
const OUTPUT_KEYS: &[&str] = &["dir", "snapshots", "snapshot_format"];

fn known_keys(section: &str) -> Option<&'static [&'static str]> {
    if section.starts_with("particle.") {
        return Some(PARTICLE_KEYS);
    }
    Some(match section {
        "units" => UNITS_KEYS,
        "grid" => GRID_KEYS,
        "solver" => SOLVER_KEYS,
        "experiment" => EXPERIMENT_KEYS,
        "sweep" => SWEEP_KEYS,
        "output" => OUTPUT_KEYS,
        _ => return None,
    })
}

fn suggestion(word: &str, candidates: &[&str]) -> Option<String> {
    candidates
        .iter()
        .map(|c| (strsim::jaro_winkler(word, c), *c))
        .filter(|(score, _)| *score > 0.7)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, c)| c.to_string())
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

#[derive(Debug, Clone, Default)]
struct Section {
    line: usize,
    entries: BTreeMap<String, Entry>,
}

/// Lexed file: sections in name order, each with its keys.
#[derive(Debug, Clone, Default)]
struct Document {
    sections: BTreeMap<String, Section>,
}

fn strip_comment(line: &str) -> &str {
    match line.find(['#', ';']) {
        Some(i) => &line[..i],
        None => line,
    }
}

fn lex(text: &str) -> Result<Document, ParseError> {
    let mut doc = Document::default();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| ParseError::line(n, "unterminated section header"))?
                .trim()
                .to_ascii_lowercase();
            if name.is_empty() {
                return Err(ParseError::line(n, "empty section name"));
            }
            if doc.sections.contains_key(&name) {
                return Err(ParseError::line(n, format!("duplicate section [{name}]")));
            }
            doc.sections.insert(
                name.clone(),
                Section {
                    line: n,
                    entries: BTreeMap::new(),
                },
            );
            current = Some(name);
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ParseError::line(n, format!("expected 'key = value', got '{line}'")))?;
        let key = key.trim().to_ascii_lowercase();
        let section = current
            .as_ref()
            .ok_or_else(|| ParseError::at(n, &key, "key appears before any section header"))?;
        let entries = &mut doc.sections.get_mut(section).expect("section exists").entries;
        if entries.contains_key(&key) {
            return Err(ParseError::at(n, &key, format!("duplicate key in [{section}]")));
        }
        entries.insert(
            key,
            Entry {
                value: value.trim().to_string(),
                line: n,
            },
        );
    }
    Ok(doc)
}

/// Comment- and layout-free form of the config: sorted `section.key=value` lines.
/// Settings that cannot change results (threads, output location and
/// snapshot export) are left out.
pub fn canonicalize(text: &str) -> Result<String, ParseError> {
    let doc = lex(text)?;
    let mut out = String::new();
    for (name, section) in doc.sections.iter().filter(|(n, _)| *n != "output") {
        out.push_str(&format!("[{name}]\n"));
        for (key, entry) in &section.entries {
            if name == "experiment" && key == "threads" {
                continue;
            }
            out.push_str(&format!("{key}={}\n", entry.value));
        }
    }
    Ok(out)
}

/// Content digest of the canonical text.
pub fn config_digest(text: &str) -> Result<String, ParseError> {
    Ok(short_digest(canonicalize(text)?.as_bytes()))
}

/// Typed reads from one section with default tracking.
struct Reader<'a> {
    name: &'a str,
    section: Option<&'a Section>,
    defaults: &'a mut BTreeMap<String, String>,
}

impl<'a> Reader<'a> {
    fn entry(&self, key: &str) -> Option<&'a Entry> {
        self.section.and_then(|s| s.entries.get(key))
    }

    fn header_line(&self) -> Option<usize> {
        self.section.map(|s| s.line)
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>, ParseError>
    where
        T::Err: fmt::Display,
    {
        match self.entry(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<T>()
                .map(Some)
                .map_err(|err| ParseError::at(e.line, key, format!("cannot parse '{}': {err}", e.value))),
        }
    }

    fn or<T: FromStr + fmt::Display>(&mut self, key: &str, default: T) -> Result<T, ParseError>
    where
        T::Err: fmt::Display,
    {
        match self.parse(key)? {
            Some(v) => Ok(v),
            None => {
                self.defaults.insert(format!("{}.{key}", self.name), default.to_string());
                Ok(default)
            }
        }
    }

    fn required<T: FromStr>(&self, key: &str) -> Result<T, ParseError>
    where
        T::Err: fmt::Display,
    {
        self.parse(key)?.ok_or_else(|| ParseError {
            line: self.header_line(),
            key: Some(key.to_string()),
            message: format!("missing required key in [{}]", self.name),
        })
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, ParseError>
    where
        T::Err: fmt::Display,
    {
        let Some(e) = self.entry(key) else {
            return Ok(None);
        };
        e.value
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<T>()
                    .map_err(|err| ParseError::at(e.line, key, format!("cannot parse '{s}': {err}")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    fn positive(&mut self, key: &str, default: f64) -> Result<f64, ParseError> {
        let v = self.or(key, default)?;
        self.check(key, v > 0.0 && v.is_finite(), "must be positive")?;
        Ok(v)
    }

    fn check(&self, key: &str, ok: bool, message: &str) -> Result<(), ParseError> {
        if ok {
            return Ok(());
        }
        let line = self.entry(key).map(|e| e.line).or(self.header_line());
        Err(ParseError {
            line,
            key: Some(key.to_string()),
            message: message.to_string(),
        })
    }

    fn wrap(&self, err: Error) -> ParseError {
        ParseError {
            line: self.header_line(),
            key: None,
            message: format!("[{}]: {err}", self.name),
        }
    }
}

fn particle(r: &mut Reader<'_>, unit: &UnitSystem) -> Result<ParticleConfig, ParseError> {
    let kind = r.or("kind", "gaussian".to_string())?.to_ascii_lowercase();
    let z0: f64 = r.required("z0")?;
    let delta0: f64 = r.or("delta0", unit.length_ref)?;
    if delta0.is_nan() || delta0 <= 0.0 {
        let line = r.entry("delta0").map(|e| e.line).or(r.header_line());
        return Err(ParseError {
            line,
            key: Some("delta0".into()),
            message: "Delta0 must be positive".into(),
        });
    }
    let spec = if kind == "cat" {
        let delta: f64 = r.required("delta")?;
        if r.entry("theta").is_some() {
            let theta: f64 = r.required("theta")?;
            let h = std::f64::consts::FRAC_1_SQRT_2;
            WavepacketSpec::cat_with_phase(z0, delta, delta0, h, h, theta)
        } else {
            let c = |re: &str, im: &str| -> Result<qfall::Complex64, ParseError> {
                Ok(qfall::Complex64::new(r.required(re)?, r.parse(im)?.unwrap_or(0.0)))
            };
            WavepacketSpec::cat(z0, delta, delta0, c("c_plus_re", "c_plus_im")?, c("c_minus_re", "c_minus_im")?)
        }
    } else {
        let preset: StatePreset = kind
            .parse()
            .map_err(|e: Error| ParseError::at(r.entry("kind").map(|e| e.line).unwrap_or(0), "kind", e.to_string()))?;
        match preset {
            StatePreset::Gaussian => WavepacketSpec::gaussian(z0, delta0),
            _ => {
                let delta = r.or("delta", delta0)?;
                match preset {
                    StatePreset::Male => WavepacketSpec::male(z0, delta, delta0),
                    StatePreset::Female => WavepacketSpec::female(z0, delta, delta0),
                    _ => WavepacketSpec::yurke_stoler(z0, delta, delta0),
                }
            }
        }
    }
    .map_err(|e| r.wrap(e))?;
    let both: Option<f64> = r.parse("mass")?;
    let m_i = match r.parse::<f64>("m_inertial")? {
        Some(v) => v,
        None => r.or("m_inertial", both.unwrap_or(unit.mass_ref))?,
    };
    let m_g = match r.parse::<f64>("m_gravitational")? {
        Some(v) => v,
        None => r.or("m_gravitational", both.unwrap_or(unit.mass_ref))?,
    };
    let mass = MassPair::new(m_i, m_g).map_err(|e| r.wrap(e))?;
    Ok(ParticleConfig { spec, mass })
}

/// Parses config text. With `strict`, unknown sections and keys are errors;
/// otherwise they become warnings.
pub fn parse_config_str(text: &str, strict: bool) -> Result<ParsedConfig, ParseError> {
    let doc = lex(text)?;
    let mut warnings = Vec::new();
    let mut defaults = BTreeMap::new();

    let section_names = ["units", "particle.N", "grid", "solver", "experiment", "sweep", "output"];
    for (name, section) in &doc.sections {
        let Some(keys) = known_keys(name) else {
            let mut msg = format!("unknown section [{name}]");
            if let Some(s) = suggestion(name, &section_names) {
                msg.push_str(&format!("; did you mean [{s}]?"));
            }
            if strict {
                return Err(ParseError::line(section.line, msg));
            }
            warnings.push(format!("line {}: {msg}", section.line));
            continue;
        };
        if let Some(index) = name.strip_prefix("particle.") {
            if !index.parse::<usize>().is_ok_and(|i| i >= 1) {
                return Err(ParseError::line(
                    section.line,
                    format!("particle sections are numbered from 1, got [{name}]"),
                ));
            }
        }
        for (key, entry) in &section.entries {
            if keys.contains(&key.as_str()) {
                continue;
            }
            let mut msg = format!("unknown key in [{name}]");
            if let Some(s) = suggestion(key, keys) {
                msg.push_str(&format!("; did you mean '{s}'?"));
            }
            if strict {
                return Err(ParseError::at(entry.line, key, msg));
            }
            warnings.push(format!("line {}: key '{key}': {msg}", entry.line));
        }
    }

    let section = |name: &str| doc.sections.get(name);

    let mut r = Reader {
        name: "units",
        section: section("units"),
        defaults: &mut defaults,
    };
    let hbar = r.positive("hbar", 1.0)?;
    let g: f64 = r.or("g", 1.0)?;
    r.check("g", g >= 0.0 && g.is_finite(), "must be non-negative")?;
    let length_ref = r.positive("length_ref", 1.0)?;
    let mass_ref = r.positive("mass_ref", 1.0)?;
    let unit = UnitSystem::new(hbar, g, length_ref, mass_ref).map_err(|e| r.wrap(e))?;

    let mut particles: Vec<(usize, ParticleConfig)> = Vec::new();
    for (name, s) in &doc.sections {
        let Some(index) = name.strip_prefix("particle.") else {
            continue;
        };
        let index: usize = index.parse().expect("checked above");
        let mut r = Reader {
            name,
            section: Some(s),
            defaults: &mut defaults,
        };
        particles.push((index, particle(&mut r, &unit)?));
    }
    particles.sort_by_key(|(i, _)| *i);
    for (expected, (i, _)) in particles.iter().enumerate() {
        if *i != expected + 1 {
            return Err(ParseError::general(format!(
                "particle sections must be numbered 1..N without gaps; missing [particle.{}]",
                expected + 1
            )));
        }
    }
    if particles.is_empty() {
        return Err(ParseError::general("at least one [particle.N] section is required"));
    }
    let particles: Vec<ParticleConfig> = particles.into_iter().map(|(_, p)| p).collect();

    let grid = match section("grid") {
        None => {
            defaults.insert("grid".into(), "auto".into());
            None
        }
        Some(s) => {
            let r = Reader {
                name: "grid",
                section: Some(s),
                defaults: &mut defaults,
            };
            let settings = GridSettings {
                z_min: r.required("z_min")?,
                z_max: r.required("z_max")?,
                n_points: r.required("n_points")?,
            };
            settings.grid().map_err(|e| r.wrap(e))?;
            Some(settings)
        }
    };

    let base = SolverSettings::default();
    let mut r = Reader {
        name: "solver",
        section: section("solver"),
        defaults: &mut defaults,
    };
    let dt: Option<f64> = r.parse("dt")?;
    if let Some(dt) = dt {
        r.check("dt", dt > 0.0 && dt.is_finite(), "must be positive")?;
    } else {
        r.defaults.insert("solver.dt".into(), "fall time / steps_per_fall".into());
    }
    let steps_per_fall: usize = r.or("steps_per_fall", base.steps_per_fall)?;
    r.check("steps_per_fall", steps_per_fall > 0, "must be at least 1")?;
    let snapshot_stride: usize = r.or("snapshot_stride", base.snapshot_stride)?;
    r.check("snapshot_stride", snapshot_stride > 0, "must be at least 1")?;
    let store_fields = r.or("store_fields", base.store_fields)?;
    let solver = SolverSettings {
        dt,
        steps_per_fall,
        snapshot_stride,
        store_fields,
    };

    let mut r = Reader {
        name: "experiment",
        section: section("experiment"),
        defaults: &mut defaults,
    };
    let z_detector = r.or("z_detector", 0.0)?;
    let frame_acceleration = r.or("frame_acceleration", unit.g)?;
    r.check(
        "frame_acceleration",
        frame_acceleration >= 0.0 && frame_acceleration.is_finite(),
        "must be non-negative",
    )?;
    let auto_match = r.or("auto_match", true)?;
    let match_tolerance = r.positive("match_tolerance", 1e-9)?;
    let seed = r.or("seed", 0u64)?;
    let threads: usize = r.or("threads", 1)?;
    r.check("threads", threads > 0, "must be at least 1")?;

    let sweep = match section("sweep") {
        None => None,
        Some(s) => {
            let mut r = Reader {
                name: "sweep",
                section: Some(s),
                defaults: &mut defaults,
            };
            let base = SweepSettings::default();
            let masses: Vec<f64> = r.list("masses")?.unwrap_or(base.masses);
            r.check("masses", masses.iter().all(|m| *m > 0.0 && m.is_finite()), "masses must be positive")?;
            let states: Vec<StatePreset> = r.list("states")?.unwrap_or(base.states);
            let thetas: Vec<f64> = r.list("thetas")?.unwrap_or_default();
            let simulate = r.or("simulate", false)?;
            r.check(
                "masses",
                !(masses.is_empty() && states.is_empty() && thetas.is_empty()),
                "a [sweep] section needs at least one non-empty axis",
            )?;
            Some(SweepSettings {
                masses,
                states,
                thetas,
                simulate,
            })
        }
    };

    let r = Reader {
        name: "output",
        section: section("output"),
        defaults: &mut defaults,
    };
    let output = OutputSettings {
        dir: r.parse::<String>("dir")?.map(PathBuf::from),
        snapshots: r.parse("snapshots")?.unwrap_or_default(),
        snapshot_format: r.parse("snapshot_format")?.unwrap_or_default(),
    };

    let config = ExperimentConfig {
        unit,
        particles,
        frame_acceleration,
        z_detector,
        grid,
        solver,
        sweep,
        auto_match,
        match_tolerance,
        seed,
        threads,
        source_digest: Some(config_digest(text)?),
    };
    config.validate().map_err(|e| ParseError::general(e.to_string()))?;
    Ok(ParsedConfig {
        config,
        output,
        defaults,
        warnings,
    })
}

pub fn parse_config(path: &Path, strict: bool) -> Result<ParsedConfig, ParseError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ParseError::general(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(&text, strict)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[particle.1]\nz0 = 2\n";

    #[test]
    fn minimal_config() {
        let p = parse_config_str(MINIMAL, true).unwrap();
        assert_eq!(p.config.particles.len(), 1);
        assert_eq!(p.config.particles[0].spec, WavepacketSpec::gaussian(2.0, 1.0).unwrap());
        assert_eq!(p.config.grid, None);
        assert_eq!(p.defaults["grid"], "auto");
        assert_eq!(p.defaults["units.g"], "1");
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn zero_delta0_rejected() {
        let err = parse_config_str("[particle.1]\nz0 = 2\ndelta0 = 0\n", false).unwrap_err();
        assert!(err.message.contains("Delta0 must be positive"), "{err}");
        assert_eq!(err.line, Some(3));
        assert_eq!(err.key.as_deref(), Some("delta0"));
    }

    #[test]
    fn unknown_key_suggests_nearest() {
        let text = "[particle.1]\nz0 = 2\ndetla = 1\n";
        let err = parse_config_str(text, true).unwrap_err();
        assert_eq!(err.line, Some(3));
        assert!(err.message.contains("did you mean 'delta'"), "{err}");
        let lenient = parse_config_str(text, false).unwrap();
        assert_eq!(lenient.warnings.len(), 1);
    }

    #[test]
    fn missing_required_key() {
        let err = parse_config_str("[particle.1]\nkind = male\n", false).unwrap_err();
        assert_eq!(err.key.as_deref(), Some("z0"));
        assert_eq!(err.line, Some(1));
    }

    #[test]
    fn bad_value_names_line() {
        let err = parse_config_str("[particle.1]\nz0 = two\n", false).unwrap_err();
        assert_eq!(err.line, Some(2));
        assert!(err.to_string().starts_with("line 2: key 'z0'"));
    }

    #[test]
    fn digest_ignores_layout_and_comments() {
        let a = "[particle.1]\nz0 = 2\nmass = 1\n[experiment]\nthreads = 2\n";
        let b = "# drop\n[experiment]\n  threads=2   ; comment\n\n[particle.1]\nmass=1\nz0 = 2\n";
        assert_eq!(config_digest(a).unwrap(), config_digest(b).unwrap());
        let c = "[particle.1]\nz0 = 3\nmass = 1\n[experiment]\nthreads = 2\n";
        let d = "[particle.1]\nz0 = 2\nmass = 1\n[experiment]\nthreads = 8\n[output]\ndir = x\n";
        assert_eq!(config_digest(a).unwrap(), config_digest(d).unwrap());
        assert_ne!(config_digest(a).unwrap(), config_digest(c).unwrap());
    }

    #[test]
    fn full_config() {
        let text = "\
[units]
g = 1
[particle.1]
kind = cat
z0 = 4
delta = 1
theta = 1.5707963267948966
m_inertial = 2
m_gravitational = 1
[particle.2]
kind = female
z0 = 4
mass = 3
[grid]
z_min = -40
z_max = 20
n_points = 2048
[solver]
dt = 0.001
[sweep]
masses = 1, 2, 4, 8, 16
states = gaussian, male
[output]
snapshots = strided:8
snapshot_format = binary
";
        let p = parse_config_str(text, true).unwrap();
        let c = &p.config;
        assert_eq!(c.particles[0].mass, MassPair::new(2.0, 1.0).unwrap());
        assert_eq!(c.particles[1].mass, MassPair::equal(3.0).unwrap());
        assert!((c.particles[0].spec.theta() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(c.grid.unwrap().n_points, 2048);
        assert_eq!(c.solver.dt, Some(0.001));
        assert_eq!(c.sweep.as_ref().unwrap().states, vec![StatePreset::Gaussian, StatePreset::Male]);
        assert_eq!(p.output.snapshots, SnapshotMode::Strided(8));
        assert_eq!(p.output.snapshot_format, SnapshotFormat::Binary);
    }

    #[test]
    fn grid_invariants_checked_eagerly() {
        let err = parse_config_str("[particle.1]\nz0 = 2\n[grid]\nz_min = -1\nz_max = 1\nn_points = 100\n", false)
            .unwrap_err();
        assert_eq!(err.line, Some(3));
    }

    #[test]
    fn particles_numbered_without_gaps() {
        assert!(parse_config_str("[particle.2]\nz0 = 2\n", false).is_err());
        assert!(parse_config_str("[units]\ng = 1\n", false).is_err());
    }

    #[test]
    fn snapshot_mode_parsing() {
        assert_eq!("none".parse::<SnapshotMode>(), Ok(SnapshotMode::None));
        assert_eq!("strided:4".parse::<SnapshotMode>(), Ok(SnapshotMode::Strided(4)));
        assert!("strided:0".parse::<SnapshotMode>().is_err());
        assert!("every".parse::<SnapshotMode>().is_err());
    }
}

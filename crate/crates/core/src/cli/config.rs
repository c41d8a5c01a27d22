//! Scenario files.
//!
//! Flat `key = value` lines grouped under `[section]` headers. Blank lines and
//! lines starting with `#` or `;` are ignored. Unknown sections, unknown keys
//! and repeated keys are errors.
//!
//! ```text
//! [pulse]
//! shape = gaussian        # gaussian | narrowband | tabulated
//! sigma = 1.0             # gaussian only, RMS intensity duration in 1/Γ
//! detuning = 0.0          # gaussian and narrowband, in Γ
//! spectrum_file = s.csv   # tabulated only: omega, re[, im] per line
//! normalize = true        # tabulated only
//!
//! [medium]
//! od0 = 2.0               # resonant optical depth
//! length = 1.0            # in c/Γ
//! coupling_file = g.csv   # optional: z, g per line; od0 then rescales it
//!
//! [engine]
//! method = spectral       # spectral | timedomain | both
//! cells = 200             # time-domain medium cells
//! tail_tolerance = 1e-8
//! max_steps = 1000000
//! epsilon = 1.0           # weak-probe strength
//!
//! [quadrature]
//! rtol = 1e-9
//! n_min = 1024
//! n_max = 1048576
//! fixed_intervals = 4096  # optional: one fixed grid, no refinement
//!
//! [output]
//! path = out.csv          # relative to the config file; stdout if absent
//!
//! [sweep]                 # sweep subcommand only
//! axis = od0              # od0 | od_eff | detuning | sigma
//! start = 0.1
//! stop = 10
//! points = 50
//! spacing = linear        # linear | log
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::domain::{MediumProfile, PulseSpec, WeakProbeConfig};
use crate::error::Result;
use crate::quadrature::QuadratureConfig;
use crate::timedomain::GridSpec;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

fn err(line: Option<usize>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Gaussian,
    NarrowBand,
    Tabulated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseTemplate {
    pub shape: Shape,
    pub sigma: Option<f64>,
    pub detuning: f64,
    pub table: Option<(Vec<f64>, Vec<Complex64>)>,
    pub normalize: bool,
}

impl PulseTemplate {
    pub fn build(&self) -> Result<PulseSpec> {
        match self.shape {
            Shape::Gaussian => PulseSpec::gaussian(self.sigma.unwrap_or(f64::NAN), self.detuning),
            Shape::NarrowBand => Ok(PulseSpec::narrow_band(self.detuning)),
            Shape::Tabulated => {
                let (w, a) = self.table.clone().unwrap_or_default();
                PulseSpec::tabulated(w, a, self.normalize)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MediumTemplate {
    pub od0: Option<f64>,
    pub length: f64,
    pub coupling: Option<(Vec<f64>, Vec<f64>)>,
}

impl MediumTemplate {
    pub fn build(&self) -> Result<MediumProfile> {
        match (&self.coupling, self.od0) {
            (None, od0) => MediumProfile::uniform(od0.unwrap_or(f64::NAN), self.length),
            (Some((z, g)), None) => MediumProfile::tabulated(self.length, z.clone(), g.clone()),
            (Some((z, g)), Some(od0)) => {
                let raw = MediumProfile::tabulated(self.length, z.clone(), g.clone())?;
                let scale = if raw.od0() > 0.0 { (od0 / raw.od0()).sqrt() } else { f64::NAN };
                MediumProfile::tabulated(self.length, z.clone(), g.iter().map(|v| v * scale).collect())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineSelection {
    Spectral,
    TimeDomain,
    Both,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GridOverrides {
    pub cells: Option<usize>,
    pub tail_tolerance: Option<f64>,
    pub max_steps: Option<usize>,
}

impl GridOverrides {
    /// Grid with at least 200 cells and 50 steps per pulse duration unless
    /// overridden.
    pub fn grid(&self, pulse: &PulseSpec, medium: &MediumProfile) -> Result<GridSpec> {
        let cells = self.cells.unwrap_or_else(|| {
            let sigma = pulse.sigma().unwrap_or(1.0);
            ((50.0 * medium.length() / sigma).ceil() as usize).max(200)
        });
        let mut g = GridSpec::new(pulse, medium, cells)?;
        if let Some(t) = self.tail_tolerance {
            g.tail_tolerance = t;
        }
        if let Some(m) = self.max_steps {
            g.max_steps = m;
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub pulse: PulseTemplate,
    pub medium: MediumTemplate,
    pub engine: EngineSelection,
    pub grid: GridOverrides,
    pub quadrature: QuadratureConfig,
    pub fixed_intervals: Option<usize>,
    pub probe: WeakProbeConfig,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Od0,
    OdEff,
    Detuning,
    Sigma,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::Od0 => "od0",
            Axis::OdEff => "od_eff",
            Axis::Detuning => "detuning",
            Axis::Sigma => "sigma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|k| {
                let s = k as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.start + s * (self.stop - self.start),
                    Spacing::Log => (self.start.ln() + s * (self.stop / self.start).ln()).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub scenario: Scenario,
    pub sweep: Option<SweepSpec>,
}

const SCHEMA: &[(&str, &[&str])] = &[
    ("pulse", &["shape", "sigma", "detuning", "spectrum_file", "normalize"]),
    ("medium", &["od0", "length", "coupling_file"]),
    ("engine", &["method", "cells", "tail_tolerance", "max_steps", "epsilon"]),
    ("quadrature", &["rtol", "n_min", "n_max", "fixed_intervals"]),
    ("output", &["path"]),
    ("sweep", &["axis", "start", "stop", "points", "spacing"]),
];

type Entries = BTreeMap<(String, String), (usize, String)>;

fn tokenize(text: &str) -> std::result::Result<(Entries, Vec<String>), ConfigError> {
    let mut entries = Entries::new();
    let mut sections = Vec::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| err(Some(line_no), "unterminated section header"))?
                .trim()
                .to_owned();
            if !SCHEMA.iter().any(|(s, _)| *s == name) {
                return Err(err(Some(line_no), format!("unknown section [{name}]")));
            }
            if sections.contains(&name) {
                return Err(err(Some(line_no), format!("section [{name}] appears twice")));
            }
            sections.push(name.clone());
            current = Some(name);
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(Some(line_no), format!("expected 'key = value', got '{line}'")))?;
        let (key, value) = (key.trim().to_owned(), value.trim().to_owned());
        let section = current
            .clone()
            .ok_or_else(|| err(Some(line_no), format!("key '{key}' appears before any section")))?;
        let allowed = SCHEMA.iter().find(|(s, _)| *s == section).map(|(_, k)| *k).unwrap_or(&[]);
        if !allowed.contains(&key.as_str()) {
            return Err(err(Some(line_no), format!("unknown key '{key}' in [{section}]")));
        }
        if value.is_empty() {
            return Err(err(Some(line_no), format!("key '{key}' has no value")));
        }
        if entries.insert((section.clone(), key.clone()), (line_no, value)).is_some() {
            return Err(err(Some(line_no), format!("key '{key}' repeated in [{section}]")));
        }
    }
    Ok((entries, sections))
}

fn strip_comment(line: &str) -> &str {
    let cut = line.find(['#', ';']).unwrap_or(line.len());
    &line[..cut]
}

struct Reader<'a> {
    entries: &'a Entries,
    base: &'a Path,
}

impl Reader<'_> {
    fn raw(&self, section: &str, key: &str) -> Option<(usize, &str)> {
        self.entries
            .get(&(section.to_owned(), key.to_owned()))
            .map(|(l, v)| (*l, v.as_str()))
    }

    fn parse<T: std::str::FromStr>(&self, section: &str, key: &str) -> std::result::Result<Option<T>, ConfigError> {
        match self.raw(section, key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| err(Some(line), format!("cannot parse '{v}' for {section}.{key}"))),
        }
    }

    fn positive(&self, section: &str, key: &str) -> std::result::Result<Option<f64>, ConfigError> {
        let v: Option<f64> = self.parse(section, key)?;
        if let Some(x) = v {
            if !(x > 0.0 && x.is_finite()) {
                let line = self.raw(section, key).map(|(l, _)| l);
                return Err(err(line, format!("{section}.{key} must be positive, got {x}")));
            }
        }
        Ok(v)
    }

    fn choice<T: Copy>(&self, section: &str, key: &str, options: &[(&str, T)]) -> std::result::Result<Option<T>, ConfigError> {
        match self.raw(section, key) {
            None => Ok(None),
            Some((line, v)) => options
                .iter()
                .find(|(name, _)| name.eq_ignore_ascii_case(v))
                .map(|(_, t)| Some(*t))
                .ok_or_else(|| {
                    let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                    err(Some(line), format!("{section}.{key} must be one of {}, got '{v}'", names.join(", ")))
                }),
        }
    }

    fn required<T>(&self, section: &str, key: &str, v: Option<T>) -> std::result::Result<T, ConfigError> {
        v.ok_or_else(|| err(None, format!("missing required key {section}.{key}")))
    }

    fn forbid(&self, section: &str, key: &str, why: &str) -> std::result::Result<(), ConfigError> {
        match self.raw(section, key) {
            Some((line, _)) => Err(err(Some(line), format!("{section}.{key} is not used {why}"))),
            None => Ok(()),
        }
    }

    fn path(&self, section: &str, key: &str) -> Option<(usize, PathBuf)> {
        self.raw(section, key).map(|(l, v)| (l, self.base.join(v)))
    }

    fn table(&self, section: &str, key: &str, min_cols: usize) -> std::result::Result<Option<Vec<Vec<f64>>>, ConfigError> {
        let Some((line, path)) = self.path(section, key) else {
            return Ok(None);
        };
        let text = std::fs::read_to_string(&path)
            .map_err(|e| err(Some(line), format!("cannot read {}: {e}", path.display())))?;
        let mut rows = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let l = strip_comment(raw).trim();
            if l.is_empty() {
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> =
                l.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).map(str::parse).collect();
            match row {
                Ok(r) if r.len() >= min_cols => rows.push(r),
                _ => {
                    return Err(err(
                        Some(line),
                        format!("{}:{}: expected at least {min_cols} numeric columns", path.display(), k + 1),
                    ))
                }
            }
        }
        Ok(Some(rows))
    }
}

/// Parses a scenario file. Relative paths inside it resolve against `base`.
pub fn parse_config(text: &str, base: &Path) -> std::result::Result<Config, ConfigError> {
    let (entries, sections) = tokenize(text)?;
    let r = Reader { entries: &entries, base };

    let shape = r
        .choice(
            "pulse",
            "shape",
            &[("gaussian", Shape::Gaussian), ("narrowband", Shape::NarrowBand), ("tabulated", Shape::Tabulated)],
        )?
        .unwrap_or(Shape::Gaussian);
    let sigma: Option<f64> = r.parse("pulse", "sigma")?;
    let detuning: Option<f64> = r.parse("pulse", "detuning")?;
    let normalize: Option<bool> = r.parse("pulse", "normalize")?;
    let mut table = None;
    match shape {
        Shape::Gaussian => {
            r.required("pulse", "sigma", sigma)?;
            r.forbid("pulse", "spectrum_file", "by a gaussian pulse")?;
            r.forbid("pulse", "normalize", "by a gaussian pulse")?;
        }
        Shape::NarrowBand => {
            r.forbid("pulse", "sigma", "by a narrow-band pulse")?;
            r.forbid("pulse", "spectrum_file", "by a narrow-band pulse")?;
            r.forbid("pulse", "normalize", "by a narrow-band pulse")?;
        }
        Shape::Tabulated => {
            r.forbid("pulse", "sigma", "by a tabulated pulse")?;
            r.forbid("pulse", "detuning", "by a tabulated pulse")?;
            let rows = r.required("pulse", "spectrum_file", r.table("pulse", "spectrum_file", 2)?)?;
            let omega = rows.iter().map(|row| row[0]).collect();
            let amp = rows
                .iter()
                .map(|row| Complex64::new(row[1], row.get(2).copied().unwrap_or(0.0)))
                .collect();
            table = Some((omega, amp));
        }
    }
    let pulse = PulseTemplate {
        shape,
        sigma,
        detuning: detuning.unwrap_or(0.0),
        table,
        normalize: normalize.unwrap_or(true),
    };

    let coupling = r.table("medium", "coupling_file", 2)?.map(|rows| {
        let z = rows.iter().map(|row| row[0]).collect();
        let g = rows.iter().map(|row| row[1]).collect();
        (z, g)
    });
    let od0: Option<f64> = r.parse("medium", "od0")?;
    if coupling.is_none() {
        r.required("medium", "od0", od0)?;
    }
    let medium = MediumTemplate {
        od0,
        length: r.parse("medium", "length")?.unwrap_or(1.0),
        coupling,
    };

    let engine = r
        .choice(
            "engine",
            "method",
            &[
                ("spectral", EngineSelection::Spectral),
                ("timedomain", EngineSelection::TimeDomain),
                ("both", EngineSelection::Both),
            ],
        )?
        .unwrap_or(EngineSelection::Spectral);
    let grid = GridOverrides {
        cells: r.parse("engine", "cells")?,
        tail_tolerance: r.positive("engine", "tail_tolerance")?,
        max_steps: r.parse("engine", "max_steps")?,
    };
    let probe = match r.positive("engine", "epsilon")? {
        Some(e) => WeakProbeConfig::new(e).map_err(|e| err(None, e.to_string()))?,
        None => WeakProbeConfig::default(),
    };

    let defaults = QuadratureConfig::default();
    let quadrature = QuadratureConfig {
        rtol: r.positive("quadrature", "rtol")?.unwrap_or(defaults.rtol),
        n_min: r.parse("quadrature", "n_min")?.unwrap_or(defaults.n_min),
        n_max: r.parse("quadrature", "n_max")?.unwrap_or(defaults.n_max),
    };
    quadrature.validate().map_err(|e| err(None, e.to_string()))?;
    let fixed_intervals: Option<usize> = r.parse("quadrature", "fixed_intervals")?;
    if fixed_intervals.is_some_and(|n| n < 2) {
        return Err(err(None, "quadrature.fixed_intervals must be at least 2"));
    }

    let output = r.path("output", "path").map(|(_, p)| p);

    let sweep = if sections.iter().any(|s| s == "sweep") {
        let axis = r.choice(
            "sweep",
            "axis",
            &[("od0", Axis::Od0), ("od_eff", Axis::OdEff), ("detuning", Axis::Detuning), ("sigma", Axis::Sigma)],
        )?;
        let axis = r.required("sweep", "axis", axis)?;
        let start: f64 = r.required("sweep", "start", r.parse("sweep", "start")?)?;
        let stop: f64 = r.required("sweep", "stop", r.parse("sweep", "stop")?)?;
        let points: usize = r.required("sweep", "points", r.parse("sweep", "points")?)?;
        let spacing = r
            .choice("sweep", "spacing", &[("linear", Spacing::Linear), ("log", Spacing::Log)])?
            .unwrap_or(Spacing::Linear);
        if !(start.is_finite() && stop.is_finite() && start < stop) {
            return Err(err(None, format!("sweep range must be ordered, got [{start}, {stop}]")));
        }
        if points < 2 {
            return Err(err(None, format!("sweep needs at least 2 points, got {points}")));
        }
        if spacing == Spacing::Log && start <= 0.0 {
            return Err(err(None, "log spacing needs a positive start"));
        }
        match (axis, shape) {
            (Axis::Sigma, s) if s != Shape::Gaussian => {
                return Err(err(None, "a sigma sweep needs a gaussian pulse"));
            }
            (Axis::Detuning, Shape::Tabulated) => {
                return Err(err(None, "a detuning sweep needs a gaussian or narrow-band pulse"));
            }
            _ => {}
        }
        Some(SweepSpec {
            axis,
            start,
            stop,
            points,
            spacing,
        })
    } else {
        None
    };

    Ok(Config {
        scenario: Scenario {
            pulse,
            medium,
            engine,
            grid,
            quadrature,
            fixed_intervals,
            probe,
            output,
        },
        sweep,
    })
}

/// Reads and parses a scenario file.
pub fn load_config(path: &Path) -> std::result::Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| err(None, format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config(&text, base)
}

use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::freefermion::ThermoLimit;
use crate::model::{FieldProtocol, ModelParams};
use crate::openquantum::{BathSpec, LadderChoice, NoiseKind};

/// Zero threshold on the log-negativity.
pub const DEFAULT_EPSILON: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanKind {
    Phase,
    Fs,
    ThermalBeta,
    ThermalRegion,
    ClosedScan,
    SnapshotGrid,
    OpenRun,
}

impl ScanKind {
    pub fn name(self) -> &'static str {
        match self {
            ScanKind::Phase => "phase",
            ScanKind::Fs => "fs",
            ScanKind::ThermalBeta => "thermal_beta",
            ScanKind::ThermalRegion => "thermal_region",
            ScanKind::ClosedScan => "closed_scan",
            ScanKind::SnapshotGrid => "snapshot_grid",
            ScanKind::OpenRun => "open_run",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        let all = [
            ScanKind::Phase,
            ScanKind::Fs,
            ScanKind::ThermalBeta,
            ScanKind::ThermalRegion,
            ScanKind::ClosedScan,
            ScanKind::SnapshotGrid,
            ScanKind::OpenRun,
        ];
        all.into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| config_err(format!("unknown scan kind `{s}`")))
    }
}

/// A one-dimensional parameter grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Grid {
    Values { values: Vec<f64> },
    Linear { start: f64, stop: f64, count: usize },
    Log { start: f64, stop: f64, count: usize },
}

impl Grid {
    pub fn single(v: f64) -> Self {
        Grid::Values { values: vec![v] }
    }

    pub fn list(values: &[f64]) -> Self {
        Grid::Values {
            values: values.to_vec(),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let frac = |i: usize, count: usize| {
            if count == 1 {
                0.0
            } else {
                i as f64 / (count - 1) as f64
            }
        };
        match self {
            Grid::Values { values } => values.clone(),
            Grid::Linear { start, stop, count } => (0..*count)
                .map(|i| {
                    if i + 1 == *count && i > 0 {
                        *stop
                    } else {
                        start + (stop - start) * frac(i, *count)
                    }
                })
                .collect(),
            Grid::Log { start, stop, count } => {
                let (a, b) = (start.ln(), stop.ln());
                (0..*count)
                    .map(|i| match i {
                        0 => *start,
                        _ if i + 1 == *count => *stop,
                        _ => (a + (b - a) * frac(i, *count)).exp(),
                    })
                    .collect()
            }
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Grid::Values { values } => values.len(),
            Grid::Linear { count, .. } | Grid::Log { count, .. } => *count,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let spaced = |rest: &str| -> Result<(f64, f64, usize)> {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 3 {
                return Err(config_err(format!("grid `{s}` needs start:stop:count")));
            }
            let count = parts[2]
                .trim()
                .parse::<usize>()
                .map_err(|_| config_err(format!("bad count in `{s}`")))?;
            Ok((parse_f64(parts[0])?, parse_f64(parts[1])?, count))
        };
        let g = if let Some(rest) = s.strip_prefix("lin:") {
            let (start, stop, count) = spaced(rest)?;
            Grid::Linear { start, stop, count }
        } else if let Some(rest) = s.strip_prefix("log:") {
            let (start, stop, count) = spaced(rest)?;
            if !(start > 0.0 && stop > 0.0) {
                return Err(config_err(format!(
                    "log grid `{s}` needs positive endpoints"
                )));
            }
            Grid::Log { start, stop, count }
        } else {
            Grid::Values {
                values: s.split(',').map(parse_f64).collect::<Result<_>>()?,
            }
        };
        if g.is_empty() {
            return Err(config_err(format!("grid `{s}` is empty")));
        }
        Ok(g)
    }
}

/// Which field, if any, is fixed by `λ1² = λ2² + 1 − γ²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FsConstraint {
    None,
    /// `λ1` from `(γ, λ2)`; the `lambda1` grid is ignored.
    Lambda1,
    /// `λ2 ≥ 0` from `(γ, λ1)`; the `lambda2` grid is ignored.
    Lambda2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    Quench,
    Hold,
}

impl ProtocolKind {
    pub fn protocol(self, p: &ModelParams) -> FieldProtocol {
        match self {
            ProtocolKind::Quench => p.quench(),
            ProtocolKind::Hold => p.hold(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "n")]
pub enum SystemSize {
    /// Large-ring proxy of the infinite chain.
    Thermo,
    Finite(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Gamma,
    Lambda1,
    Lambda2,
    BetaS,
    T,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Gamma => "gamma",
            Axis::Lambda1 => "lambda1",
            Axis::Lambda2 => "lambda2",
            Axis::BetaS => "beta_s",
            Axis::T => "t",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        [
            Axis::Gamma,
            Axis::Lambda1,
            Axis::Lambda2,
            Axis::BetaS,
            Axis::T,
        ]
        .into_iter()
        .find(|a| a.name() == s.trim())
        .ok_or_else(|| config_err(format!("unknown axis `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub scan: ScanKind,
    pub gamma: Grid,
    pub lambda1: Grid,
    pub lambda2: Grid,
    pub beta_s: Grid,
    pub t: Grid,
    pub fs: FsConstraint,
    pub size: SystemSize,
    pub thermo: ThermoLimit,
    pub protocol: ProtocolKind,
    pub epsilon: f64,
    /// Extra thresholds for which revival counts are reported.
    pub epsilon_sensitivity: Vec<f64>,
    /// Scanned axes of a zero-region map, `(x, y)`.
    pub axes: (Axis, Axis),
    /// Fraction of the time window averaged for late-time diagnostics.
    pub late_fraction: f64,
    pub bath: BathSpec,
    pub ladder: LadderChoice,
    pub dt: f64,
    pub t_final: f64,
    pub observe_every: f64,
    /// Open-run pairs; `None` means every nearest-neighbour pair.
    pub pairs: Option<Vec<(usize, usize)>>,
    pub trace_tol: f64,
    pub min_eig_tol: f64,
    pub out_dir: PathBuf,
    /// File stem of the outputs; defaults to the scan name.
    pub name: Option<String>,
}

impl SweepConfig {
    /// Defaults of each scan, set to the reference presets.
    pub fn preset(scan: ScanKind) -> Self {
        let mut c = Self {
            scan,
            gamma: Grid::single(0.6),
            lambda1: Grid::single(1.0),
            lambda2: Grid::single(1.0),
            beta_s: Grid::single(250.0),
            t: Grid::single(0.0),
            fs: FsConstraint::Lambda1,
            size: SystemSize::Thermo,
            thermo: ThermoLimit::default(),
            protocol: ProtocolKind::Quench,
            epsilon: DEFAULT_EPSILON,
            epsilon_sensitivity: vec![1e-5, 1e-3],
            axes: (Axis::Lambda1, Axis::BetaS),
            late_fraction: 0.1,
            bath: BathSpec::default(),
            ladder: LadderChoice::Ladder,
            dt: 1e-3,
            t_final: 10.0,
            observe_every: 0.05,
            pairs: None,
            trace_tol: 1e-8,
            min_eig_tol: 1e-7,
            out_dir: PathBuf::from("out"),
            name: None,
        };
        match scan {
            ScanKind::Phase => {
                c.fs = FsConstraint::None;
                c.gamma = Grid::single(0.8);
                c.lambda1 = Grid::Linear {
                    start: -3.0,
                    stop: 3.0,
                    count: 61,
                };
                c.lambda2 = Grid::Linear {
                    start: -3.0,
                    stop: 3.0,
                    count: 61,
                };
            }
            ScanKind::Fs => {
                c.gamma = Grid::single(0.8);
                c.lambda2 = Grid::Linear {
                    start: 0.0,
                    stop: 2.0,
                    count: 5,
                };
            }
            ScanKind::ThermalBeta => {
                c.gamma = Grid::single(0.35);
                c.beta_s = Grid::Log {
                    start: 250.0,
                    stop: 1e-3,
                    count: 500,
                };
            }
            ScanKind::ThermalRegion => {
                c.fs = FsConstraint::None;
                c.lambda1 = Grid::Linear {
                    start: 0.8,
                    stop: 1.8,
                    count: 101,
                };
                c.beta_s = Grid::list(&[100.0, 50.0, 20.0, 10.0, 5.0, 0.0]);
            }
            ScanKind::ClosedScan => {
                c.gamma = Grid::single(0.8);
                c.fs = FsConstraint::Lambda2;
                c.lambda1 = Grid::Linear {
                    start: 0.6,
                    stop: 3.0,
                    count: 25,
                };
                c.t = Grid::Linear {
                    start: 0.0,
                    stop: 50.0,
                    count: 201,
                };
            }
            ScanKind::SnapshotGrid => {
                c.gamma = Grid::Linear {
                    start: 0.01,
                    stop: 1.0,
                    count: 50,
                };
                c.lambda2 = Grid::list(&[0.0, 1.0]);
                c.beta_s = Grid::Log {
                    start: 250.0,
                    stop: 0.1,
                    count: 50,
                };
                c.t = Grid::list(&[0.0, 2.0, 10.0, 40.0]);
            }
            ScanKind::OpenRun => {
                c.size = SystemSize::Finite(10);
                c.fs = FsConstraint::Lambda2;
                c.lambda1 = Grid::list(&[0.8, 0.85, 0.9, 1.0, 1.2]);
                c.beta_s = Grid::single(80.0);
            }
        }
        c
    }

    /// Preset for `scan`, then `key = value` pairs applied in order.
    pub fn from_pairs(scan: ScanKind, pairs: &[(String, String)]) -> Result<Self> {
        let mut c = Self::preset(scan);
        for (k, v) in pairs {
            c.set(k, v)?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "scan" => {
                let kind = ScanKind::parse(v)?;
                if kind != self.scan {
                    return Err(config_err(format!(
                        "config is for scan `{v}`, running `{}`",
                        self.scan.name()
                    )));
                }
            }
            "gamma" => self.gamma = Grid::parse(v)?,
            "lambda1" => self.lambda1 = Grid::parse(v)?,
            "lambda2" => self.lambda2 = Grid::parse(v)?,
            "beta_s" => self.beta_s = Grid::parse(v)?,
            "t" => self.t = Grid::parse(v)?,
            "fs" => {
                self.fs = match v {
                    "none" => FsConstraint::None,
                    "lambda1" => FsConstraint::Lambda1,
                    "lambda2" => FsConstraint::Lambda2,
                    _ => {
                        return Err(config_err(format!(
                            "fs must be none, lambda1 or lambda2, got `{v}`"
                        )))
                    }
                }
            }
            "size" => {
                self.size = if v == "thermo" {
                    SystemSize::Thermo
                } else {
                    SystemSize::Finite(parse_usize(v)?)
                }
            }
            "n_start" => self.thermo.n_start = parse_usize(v)?,
            "n_max" => self.thermo.n_max = parse_usize(v)?,
            "thermo_tol" => self.thermo.tol = parse_f64(v)?,
            "protocol" => {
                self.protocol = match v {
                    "quench" => ProtocolKind::Quench,
                    "hold" => ProtocolKind::Hold,
                    _ => {
                        return Err(config_err(format!(
                            "protocol must be quench or hold, got `{v}`"
                        )))
                    }
                }
            }
            "epsilon" => self.epsilon = parse_f64(v)?,
            "epsilon_sensitivity" => {
                self.epsilon_sensitivity = if v.is_empty() {
                    vec![]
                } else {
                    v.split(',').map(parse_f64).collect::<Result<_>>()?
                }
            }
            "axes" => {
                let parts: Vec<&str> = v.split(',').collect();
                if parts.len() != 2 {
                    return Err(config_err(format!("axes needs two names, got `{v}`")));
                }
                self.axes = (Axis::parse(parts[0])?, Axis::parse(parts[1])?);
            }
            "late_fraction" => self.late_fraction = parse_f64(v)?,
            "beta_e" => self.bath.beta_e = parse_f64(v)?,
            "b" => self.bath.b = parse_f64(v)?,
            "k" => self.bath.k = parse_f64(v)?,
            "doors" => self.bath.doors = v.split(',').map(parse_usize).collect::<Result<_>>()?,
            "include_absorption" => self.bath.include_absorption = parse_bool(v)?,
            "noise" => {
                self.bath.noise = match v {
                    "dissipative" => NoiseKind::Dissipative,
                    "dephasing" => NoiseKind::Dephasing,
                    _ => {
                        return Err(config_err(format!(
                            "noise must be dissipative or dephasing, got `{v}`"
                        )))
                    }
                }
            }
            "dephasing_rate" => self.bath.dephasing_rate = parse_f64(v)?,
            "ladder" => {
                self.ladder = match v {
                    "ladder" => LadderChoice::Ladder,
                    "literal" => LadderChoice::Literal,
                    _ => {
                        return Err(config_err(format!(
                            "ladder must be ladder or literal, got `{v}`"
                        )))
                    }
                }
            }
            "dt" => self.dt = parse_f64(v)?,
            "t_final" => self.t_final = parse_f64(v)?,
            "observe_every" => self.observe_every = parse_f64(v)?,
            "pairs" => {
                self.pairs = if v == "all" {
                    None
                } else {
                    Some(parse_pairs(v)?)
                }
            }
            "trace_tol" => self.trace_tol = parse_f64(v)?,
            "min_eig_tol" => self.min_eig_tol = parse_f64(v)?,
            "out_dir" => self.out_dir = PathBuf::from(v),
            "name" => self.name = Some(v.to_string()),
            other => return Err(config_err(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(config_err("epsilon must be positive".into()));
        }
        if self.epsilon_sensitivity.iter().any(|e| !(*e > 0.0)) {
            return Err(config_err(
                "epsilon_sensitivity values must be positive".into(),
            ));
        }
        for (name, g) in [
            ("gamma", &self.gamma),
            ("lambda1", &self.lambda1),
            ("lambda2", &self.lambda2),
            ("t", &self.t),
        ] {
            if g.is_empty() || g.values().iter().any(|v| !v.is_finite()) {
                return Err(config_err(format!(
                    "grid `{name}` must be nonempty and finite"
                )));
            }
        }
        if self.beta_s.is_empty()
            || self
                .beta_s
                .values()
                .iter()
                .any(|b| !(b.is_finite() && *b >= 0.0))
        {
            return Err(config_err(
                "beta_s grid must be nonempty and non-negative".into(),
            ));
        }
        if self.gamma.values().contains(&0.0) {
            return Err(config_err("gamma must be nonzero".into()));
        }
        if self.t.values().iter().any(|t| *t < 0.0) {
            return Err(config_err("times must be non-negative".into()));
        }
        if let SystemSize::Finite(n) = self.size {
            if n < 4 || n % 2 != 0 {
                return Err(config_err(format!(
                    "size must be an even number >= 4, got {n}"
                )));
            }
        }
        if !(self.late_fraction > 0.0 && self.late_fraction <= 1.0) {
            return Err(config_err("late_fraction must lie in (0, 1]".into()));
        }
        if !(self.dt > 0.0 && self.observe_every > 0.0 && self.t_final >= 0.0) {
            return Err(config_err(
                "dt and observe_every must be positive, t_final non-negative".into(),
            ));
        }
        if self.axes.0 == self.axes.1 {
            return Err(config_err("the two axes must differ".into()));
        }
        Ok(())
    }

    /// Output file stem.
    pub fn stem(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| self.scan.name().to_string())
    }
}

/// Parses a flat `key = value` text. Keys may not repeat within one text.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = vec![];
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            config_err(format!(
                "line {}: expected `key = value`, got `{line}`",
                no + 1
            ))
        })?;
        let k = k.trim().to_string();
        if k.is_empty() {
            return Err(config_err(format!("line {}: empty key", no + 1)));
        }
        if out.iter().any(|(seen, _)| *seen == k) {
            return Err(config_err(format!("line {}: key `{k}` repeated", no + 1)));
        }
        out.push((k, v.trim().to_string()));
    }
    Ok(out)
}

fn config_err(msg: String) -> Error {
    Error::Config(msg)
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| config_err(format!("`{s}` is not a number")))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| config_err(format!("`{s}` is not a non-negative integer")))
}

fn parse_bool(s: &str) -> Result<bool> {
    match s.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(config_err(format!("`{s}` is not a boolean"))),
    }
}

/// `1-2,10-1` style pair lists.
fn parse_pairs(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .map(|p| {
            let (a, b) = p
                .split_once('-')
                .ok_or_else(|| config_err(format!("pair `{p}` must look like i-j")))?;
            Ok((parse_usize(a)?, parse_usize(b)?))
        })
        .collect()
}

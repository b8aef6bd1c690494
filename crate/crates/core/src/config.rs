//! Run configuration: flat `key=value` text with dotted section prefixes.
//!
//! ```text
//! # Fig. 3 underdamped curve
//! chain.n_ions = 50
//! laser.delta = 10
//! laser.alpha_target = 2e-3
//! bath.temperature = 250
//! ```
//!
//! Blank lines and `#` comments are ignored. Optional numbers accept `auto`.
//! Unknown keys and duplicate keys are errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::analysis::RevivalConfig;
use crate::chain::{ChainSpec, ModeSpectrum, SpacingConvention};
use crate::coupling::{FitWindow, LaserConfig, LaserKind};
use crate::error::{Error, Result};
use crate::niba::{BathState, EvolveConfig, VolterraScheme};

/// Every accepted key, in echo order.
pub const KEYS: &[&str] = &[
    "chain.n_ions",
    "chain.addressed_index",
    "chain.d0",
    "laser.kind",
    "laser.delta",
    "laser.epsilon",
    "laser.eta",
    "laser.f_dipole",
    "laser.alpha_target",
    "bath.temperature",
    "solver.h",
    "solver.t_max",
    "solver.scheme",
    "analysis.fit_lo",
    "analysis.fit_hi",
    "analysis.alpha_grid",
    "analysis.t_list",
    "analysis.n_list",
    "analysis.revival_lo",
    "analysis.revival_hi",
    "analysis.baseline_lo",
    "analysis.baseline_hi",
    "analysis.revival_threshold",
    "plan.recoil_khz",
    "output.dir",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub chain: ChainSpec,
    pub laser: LaserConfig,
    pub alpha_target: Option<f64>,
    pub bath: BathState,
    pub h: Option<f64>,
    pub t_max: Option<f64>,
    pub scheme: VolterraScheme,
    pub fit_lo: Option<f64>,
    pub fit_hi: Option<f64>,
    pub alpha_grid: Vec<f64>,
    pub t_list: Vec<f64>,
    pub n_list: Vec<usize>,
    pub revival: RevivalConfig,
    pub recoil_khz: f64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            chain: ChainSpec::new(50).expect("positive"),
            laser: LaserConfig {
                kind: LaserKind::TravellingWave,
                eta: 0.1,
                f_dipole: 0.1,
                delta: 10.0,
                epsilon: 0.0,
            },
            alpha_target: None,
            bath: BathState::zero(),
            h: None,
            t_max: None,
            scheme: VolterraScheme::Gregory,
            fit_lo: None,
            fit_hi: None,
            alpha_grid: vec![0.1, 0.5, 1.0, 1.5],
            t_list: vec![0.0],
            n_list: vec![20, 50, 100],
            revival: RevivalConfig::default(),
            recoil_khz: crate::analysis::PAPER_RECOIL_KHZ,
            output_dir: PathBuf::from("out"),
        }
    }
}

fn bad(key: &str, reason: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key}: {reason}"))
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let x: f64 = v
        .parse()
        .map_err(|_| bad(key, format!("`{v}` is not a number")))?;
    if !x.is_finite() {
        return Err(bad(key, "must be finite"));
    }
    Ok(x)
}

fn parse_opt_f64(key: &str, v: &str) -> Result<Option<f64>> {
    match v {
        "auto" | "none" => Ok(None),
        _ => parse_f64(key, v).map(Some),
    }
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.parse()
        .map_err(|_| bad(key, format!("`{v}` is not a non-negative integer")))
}

fn parse_list<T>(key: &str, v: &str, item: impl Fn(&str, &str) -> Result<T>) -> Result<Vec<T>> {
    let items: Vec<T> = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| item(key, s))
        .collect::<Result<_>>()?;
    if items.is_empty() {
        return Err(bad(key, "list must not be empty"));
    }
    Ok(items)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "auto".to_string(), fmt_num)
}

fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_list<T>(xs: &[T], f: impl Fn(&T) -> String) -> String {
    xs.iter().map(f).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected key=value, got `{line}`",
                    lineno + 1
                ))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(Error::Config(format!("{key}: unknown key")));
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(bad(key, "given more than once"));
            }
        }
        Self::from_entries(&entries)
    }

    /// Applies `entries` on top of the defaults and validates the result.
    pub fn from_entries(entries: &BTreeMap<String, String>) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut addressed = None;
        for (key, v) in entries {
            let key = key.as_str();
            match key {
                "chain.n_ions" => {
                    let n = parse_usize(key, v)?;
                    cfg.chain = ChainSpec::new(n)
                        .map_err(|_| bad(key, "must be at least 1"))?
                        .with_spacing(cfg.chain.spacing);
                }
                "chain.addressed_index" => {
                    addressed = match v.as_str() {
                        "center" => None,
                        _ => Some(parse_usize(key, v)?),
                    }
                }
                "chain.d0" => {
                    cfg.chain.spacing = SpacingConvention::parse(v)
                        .ok_or_else(|| bad(key, format!("`{v}` is not one of center, mean")))?
                }
                "laser.kind" => {
                    cfg.laser.kind = LaserKind::parse(v).ok_or_else(|| {
                        bad(
                            key,
                            format!("`{v}` is not one of travelling_wave, standing_wave_linear"),
                        )
                    })?
                }
                "laser.delta" => cfg.laser.delta = parse_f64(key, v)?,
                "laser.epsilon" => cfg.laser.epsilon = parse_f64(key, v)?,
                "laser.eta" => cfg.laser.eta = parse_f64(key, v)?,
                "laser.f_dipole" => cfg.laser.f_dipole = parse_f64(key, v)?,
                "laser.alpha_target" => cfg.alpha_target = parse_opt_f64(key, v)?,
                "bath.temperature" => {
                    cfg.bath.temperature = parse_f64(key, v)?;
                }
                "solver.h" => cfg.h = parse_opt_f64(key, v)?,
                "solver.t_max" => cfg.t_max = parse_opt_f64(key, v)?,
                "solver.scheme" => {
                    cfg.scheme = VolterraScheme::parse(v).ok_or_else(|| {
                        bad(key, format!("`{v}` is not one of gregory, trapezoid_pc"))
                    })?
                }
                "analysis.fit_lo" => cfg.fit_lo = parse_opt_f64(key, v)?,
                "analysis.fit_hi" => cfg.fit_hi = parse_opt_f64(key, v)?,
                "analysis.alpha_grid" => cfg.alpha_grid = parse_list(key, v, parse_f64)?,
                "analysis.t_list" => cfg.t_list = parse_list(key, v, parse_f64)?,
                "analysis.n_list" => cfg.n_list = parse_list(key, v, parse_usize)?,
                "analysis.revival_lo" => cfg.revival.search.0 = parse_f64(key, v)?,
                "analysis.revival_hi" => cfg.revival.search.1 = parse_f64(key, v)?,
                "analysis.baseline_lo" => cfg.revival.baseline.0 = parse_f64(key, v)?,
                "analysis.baseline_hi" => cfg.revival.baseline.1 = parse_f64(key, v)?,
                "analysis.revival_threshold" => cfg.revival.threshold = parse_f64(key, v)?,
                "plan.recoil_khz" => cfg.recoil_khz = parse_f64(key, v)?,
                "output.dir" => cfg.output_dir = PathBuf::from(v),
                _ => return Err(Error::Config(format!("{key}: unknown key"))),
            }
        }
        if let Some(i) = addressed {
            cfg.chain.addressed_index = i;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every parameter; errors name the offending key.
    pub fn validate(&self) -> Result<()> {
        if self.chain.addressed_index >= self.chain.n_ions {
            return Err(bad(
                "chain.addressed_index",
                format!(
                    "{} out of range for {} ions",
                    self.chain.addressed_index, self.chain.n_ions
                ),
            ));
        }
        match self.laser.kind {
            LaserKind::TravellingWave if !(self.laser.eta > 0.0) => {
                return Err(bad("laser.eta", "must be positive for a travelling wave"))
            }
            LaserKind::StandingWaveLinear if !(self.laser.f_dipole > 0.0) => {
                return Err(bad(
                    "laser.f_dipole",
                    "must be positive for a standing wave",
                ))
            }
            _ => {}
        }
        if !(self.laser.delta >= 0.0) {
            return Err(bad("laser.delta", "must be non-negative"));
        }
        if let Some(a) = self.alpha_target {
            if !(a > 0.0) {
                return Err(bad("laser.alpha_target", "must be positive"));
            }
        }
        if !(self.bath.temperature >= 0.0) {
            return Err(bad("bath.temperature", "must be non-negative"));
        }
        for (key, x) in [("solver.h", self.h), ("solver.t_max", self.t_max)] {
            if let Some(x) = x {
                if !(x > 0.0) {
                    return Err(bad(key, "must be positive"));
                }
            }
        }
        if let (Some(h), Some(t)) = (self.h, self.t_max) {
            if t < h {
                return Err(bad("solver.t_max", "must be at least one step"));
            }
        }
        if let (Some(lo), Some(hi)) = (self.fit_lo, self.fit_hi) {
            if !(hi > lo) {
                return Err(bad("analysis.fit_hi", "must exceed analysis.fit_lo"));
            }
        }
        if self.alpha_grid.iter().any(|&a| !(a > 0.0)) {
            return Err(bad("analysis.alpha_grid", "entries must be positive"));
        }
        if self.t_list.iter().any(|&t| !(t >= 0.0)) {
            return Err(bad("analysis.t_list", "entries must be non-negative"));
        }
        if self.n_list.iter().any(|&n| n < 2) {
            return Err(bad("analysis.n_list", "entries must be at least 2"));
        }
        let r = &self.revival;
        if !(0.0 <= r.search.0 && r.search.0 < r.search.1) {
            return Err(bad(
                "analysis.revival_hi",
                "need 0 <= revival_lo < revival_hi",
            ));
        }
        if !(0.0 <= r.baseline.0 && r.baseline.0 < r.baseline.1) {
            return Err(bad(
                "analysis.baseline_hi",
                "need 0 <= baseline_lo < baseline_hi",
            ));
        }
        if !(r.threshold > 0.0) {
            return Err(bad("analysis.revival_threshold", "must be positive"));
        }
        if !(self.recoil_khz > 0.0) {
            return Err(bad("plan.recoil_khz", "must be positive"));
        }
        Ok(())
    }

    /// Configured fit window, with missing edges taken from the default window.
    pub fn fit_window(&self, spectrum: &ModeSpectrum) -> FitWindow {
        let d = FitWindow::default_for(spectrum);
        FitWindow {
            lo: self.fit_lo.unwrap_or(d.lo),
            hi: self.fit_hi.unwrap_or(d.hi),
        }
    }

    pub fn evolve_config(&self, spectrum: &ModeSpectrum) -> EvolveConfig {
        EvolveConfig {
            chain: self.chain,
            laser: self.laser,
            bath: self.bath,
            alpha_target: self.alpha_target,
            fit_window: Some(self.fit_window(spectrum)),
            h: self.h,
            t_max: self.t_max,
            scheme: self.scheme,
        }
    }

    /// Every key with its effective value, in [`KEYS`] order.
    pub fn echo(&self) -> Vec<(String, String)> {
        let values = [
            self.chain.n_ions.to_string(),
            self.chain.addressed_index.to_string(),
            self.chain.spacing.as_str().to_string(),
            self.laser.kind.as_str().to_string(),
            fmt_num(self.laser.delta),
            fmt_num(self.laser.epsilon),
            fmt_num(self.laser.eta),
            fmt_num(self.laser.f_dipole),
            fmt_opt(self.alpha_target),
            fmt_num(self.bath.temperature),
            fmt_opt(self.h),
            fmt_opt(self.t_max),
            self.scheme.as_str().to_string(),
            fmt_opt(self.fit_lo),
            fmt_opt(self.fit_hi),
            fmt_list(&self.alpha_grid, |&x| fmt_num(x)),
            fmt_list(&self.t_list, |&x| fmt_num(x)),
            fmt_list(&self.n_list, |n| n.to_string()),
            fmt_num(self.revival.search.0),
            fmt_num(self.revival.search.1),
            fmt_num(self.revival.baseline.0),
            fmt_num(self.revival.baseline.1),
            fmt_num(self.revival.threshold),
            fmt_num(self.recoil_khz),
            self.output_dir.display().to_string(),
        ];
        KEYS.iter().map(|k| k.to_string()).zip(values).collect()
    }
}

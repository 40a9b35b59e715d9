use std::fmt;
use std::path::PathBuf;

use fdsim::geometry::{NetworkConfig, Selection};
use fdsim::montecarlo::HdCondition;
use fdsim::precoding::Scheme;
use ini::Ini;

pub const DEFAULT_SPEC: &str = include_str!("../specs/default.ini");

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// One compared system: an FD precoding scheme or an HD baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    Fd(Scheme),
    Hd(HdCondition),
}

impl Arm {
    pub fn label(self) -> &'static str {
        match self {
            Arm::Fd(s) => s.label(),
            Arm::Hd(c) => c.label(),
        }
    }

    pub fn parse(s: &str) -> Option<Arm> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hd_ac" => Some(Arm::Hd(HdCondition::Ac)),
            "hd_rc" => Some(Arm::Hd(HdCondition::Rc)),
            other => other.parse().ok().map(Arm::Fd),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    None,
    PA,
    PU,
    D,
    SigmaAa2,
    NAntennas,
    Delta,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::None => "none",
            Axis::PA => "p_a",
            Axis::PU => "p_u",
            Axis::D => "d",
            Axis::SigmaAa2 => "sigma_aa2",
            Axis::NAntennas => "n_antennas",
            Axis::Delta => "delta",
        }
    }

    fn is_power(self) -> bool {
        matches!(self, Axis::PA | Axis::PU | Axis::SigmaAa2)
    }

    /// Parses an axis name; a `_db` suffix on a power axis flags dB values.
    fn parse(s: &str) -> Option<(Axis, bool)> {
        let s = s.trim().to_ascii_lowercase();
        let (name, db) = match s.strip_suffix("_db") {
            Some(n) => (n.to_string(), true),
            None => (s, false),
        };
        let axis = [Axis::None, Axis::PA, Axis::PU, Axis::D, Axis::SigmaAa2, Axis::NAntennas, Axis::Delta]
            .into_iter()
            .find(|a| a.label() == name)?;
        (!db || axis.is_power()).then_some((axis, db))
    }

    /// `base` with this axis set to `v` (linear units).
    pub fn apply(self, base: &NetworkConfig<f64>, v: f64) -> NetworkConfig<f64> {
        let mut c = base.clone();
        match self {
            Axis::None => {}
            Axis::PA => c.p_a = v,
            Axis::PU => c.p_u = v,
            Axis::D => c.d = v,
            Axis::SigmaAa2 => c.sigma_aa2 = v,
            Axis::NAntennas => {
                c.n_u = v as usize;
                c.n_d = v as usize;
            }
            Axis::Delta => c.delta = v,
        }
        c
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: Axis,
    /// Linear units.
    pub values: Vec<f64>,
}

impl Sweep {
    /// Configurations in sweep order; `none` gives the base alone.
    pub fn points(&self, base: &NetworkConfig<f64>) -> Vec<NetworkConfig<f64>> {
        if self.axis == Axis::None {
            return vec![base.clone()];
        }
        self.values.iter().map(|&v| self.axis.apply(base, v)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub base: NetworkConfig<f64>,
    pub sweep: Sweep,
    pub arms: Vec<Arm>,
    pub trials: u64,
    pub seed: u64,
    pub gamma_th: f64,
    pub grid_size: usize,
    pub analytic: bool,
    pub out: PathBuf,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            base: NetworkConfig::default(),
            sweep: Sweep { axis: Axis::None, values: Vec::new() },
            arms: vec![Arm::Fd(Scheme::MrcMrt)],
            trials: 10_000,
            seed: 1,
            gamma_th: 1.0,
            grid_size: 200,
            analytic: true,
            out: PathBuf::from("results.csv"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

pub fn parse_on_off(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "on" | "true" | "yes" | "1" => Some(true),
        "off" | "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

pub fn parse_arms(s: &str) -> Result<Vec<Arm>, Diagnostic> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| Arm::parse(t).ok_or_else(|| Diagnostic::new("run.schemes", format!("unknown scheme `{}`", t.trim()))))
        .collect()
}

struct Reader {
    diags: Vec<Diagnostic>,
}

impl Reader {
    fn num<T: std::str::FromStr>(&mut self, field: &str, v: &str) -> Option<T> {
        let r = v.trim().parse().ok();
        if r.is_none() {
            self.diags.push(Diagnostic::new(field, format!("cannot parse `{}`", v.trim())));
        }
        r
    }

    fn power(&mut self, field: &str, v: &str, db: bool) -> Option<f64> {
        self.num::<f64>(field, v).map(|x| if db { db_to_linear(x) } else { x })
    }
}

macro_rules! set {
    ($target:expr, $value:expr) => {{
        if let Some(x) = $value {
            $target = x;
        }
        true
    }};
}

impl ExperimentSpec {
    /// Parses spec text; unset keys keep the defaults.
    pub fn parse(text: &str) -> Result<Self, Vec<Diagnostic>> {
        let ini = Ini::load_from_str(text).map_err(|e| vec![Diagnostic::new("spec", e.to_string())])?;
        let mut spec = Self::default();
        let mut rd = Reader { diags: Vec::new() };
        let mut sweep_axis = None;
        let mut sweep_values = None;
        for (section, props) in ini.iter() {
            let section = section.unwrap_or("").to_ascii_lowercase();
            for (key, v) in props.iter() {
                let key = key.trim().to_ascii_lowercase();
                let field = format!("{section}.{key}");
                let (name, db) = match key.strip_suffix("_db") {
                    Some(n) => (n, true),
                    None => (key.as_str(), false),
                };
                let b = &mut spec.base;
                let known = match (section.as_str(), name, db) {
                    ("network", "lambda_d", false) => set!(b.lambda_d, rd.num(&field, v)),
                    ("network", "r_c", false) => set!(b.r_c, rd.num(&field, v)),
                    ("network", "alpha", false) => set!(b.alpha, rd.num(&field, v)),
                    ("network", "d", false) => set!(b.d, rd.num(&field, v)),
                    ("network", "p_a", _) => set!(b.p_a, rd.power(&field, v, db)),
                    ("network", "p_u", _) => set!(b.p_u, rd.power(&field, v, db)),
                    ("network", "sigma_n2", _) => set!(b.sigma_n2, rd.power(&field, v, db)),
                    ("network", "sigma_aa2", _) => set!(b.sigma_aa2, rd.power(&field, v, db)),
                    ("network", "n_u", false) => set!(b.n_u, rd.num(&field, v)),
                    ("network", "n_d", false) => set!(b.n_d, rd.num(&field, v)),
                    ("network", "delta", false) => set!(b.delta, rd.num(&field, v)),
                    ("network", "selection", false) => {
                        match v.trim().to_ascii_lowercase().as_str() {
                            "nus" => b.selection = Selection::Nus,
                            "rus" => b.selection = Selection::Rus,
                            other => rd.diags.push(Diagnostic::new(&field, format!("expected nus or rus, got `{other}`"))),
                        }
                        true
                    }
                    ("sweep", "axis", false) => {
                        match Axis::parse(v) {
                            Some(a) => sweep_axis = Some(a),
                            None => rd.diags.push(Diagnostic::new(&field, format!("unknown axis `{}`", v.trim()))),
                        }
                        true
                    }
                    ("sweep", "values", false) => {
                        let xs: Vec<Option<f64>> =
                            v.split(',').filter(|t| !t.trim().is_empty()).map(|t| rd.num(&field, t)).collect();
                        sweep_values = xs.into_iter().collect::<Option<Vec<f64>>>();
                        true
                    }
                    ("run", "schemes", false) => {
                        match parse_arms(v) {
                            Ok(a) => spec.arms = a,
                            Err(d) => rd.diags.push(d),
                        }
                        true
                    }
                    ("run", "trials", false) => set!(spec.trials, rd.num(&field, v)),
                    ("run", "seed", false) => set!(spec.seed, rd.num(&field, v)),
                    ("run", "gamma_th", _) => set!(spec.gamma_th, rd.power(&field, v, db)),
                    ("run", "grid_size", false) => set!(spec.grid_size, rd.num(&field, v)),
                    ("run", "analytic", false) => {
                        match parse_on_off(v) {
                            Some(on) => spec.analytic = on,
                            None => rd.diags.push(Diagnostic::new(&field, "expected on or off")),
                        }
                        true
                    }
                    ("run", "out", false) => {
                        spec.out = PathBuf::from(v.trim());
                        true
                    }
                    _ => false,
                };
                if !known {
                    rd.diags.push(Diagnostic::new(field, "unknown key"));
                }
            }
        }
        if let Some((axis, db)) = sweep_axis {
            spec.sweep.axis = axis;
            if let Some(vs) = sweep_values.take() {
                spec.sweep.values = if db { vs.into_iter().map(db_to_linear).collect() } else { vs };
            }
        } else if let Some(vs) = sweep_values {
            spec.sweep.values = vs;
        }
        if rd.diags.is_empty() {
            Ok(spec)
        } else {
            Err(rd.diags)
        }
    }

    /// Every reason `run` would reject this spec; empty iff it is accepted.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        if self.arms.is_empty() {
            out.push(Diagnostic::new("run.schemes", "must list at least one scheme"));
        }
        if self.trials == 0 {
            out.push(Diagnostic::new("run.trials", "must be ≥ 1"));
        }
        if !(self.gamma_th > 0.0 && self.gamma_th.is_finite()) {
            out.push(Diagnostic::new("run.gamma_th", "must be finite and > 0"));
        }
        if self.arms.contains(&Arm::Fd(Scheme::Optimal)) && self.grid_size < 2 {
            out.push(Diagnostic::new("run.grid_size", "optimal scheme needs ≥ 2 grid points"));
        }
        match (self.sweep.axis, self.sweep.values.is_empty()) {
            (Axis::None, false) => out.push(Diagnostic::new("sweep.values", "given without a sweep axis")),
            (Axis::None, true) => {}
            (_, true) => out.push(Diagnostic::new("sweep.values", "sweep axis needs at least one value")),
            (Axis::NAntennas, false) => {
                for v in &self.sweep.values {
                    if !(*v >= 1.0 && v.fract() == 0.0) {
                        out.push(Diagnostic::new("sweep.values", format!("antenna count {v} is not a positive integer")));
                    }
                }
            }
            _ => {}
        }
        let points = self.sweep.points(&self.base);
        for (i, cfg) in points.iter().enumerate() {
            let prefix = if self.sweep.axis == Axis::None { "network".to_string() } else { format!("sweep[{i}]") };
            for (field, reason) in cfg.diagnostics() {
                out.push(Diagnostic::new(format!("{prefix}.{field}"), reason));
            }
            for arm in &self.arms {
                let bad = match arm {
                    Arm::Fd(Scheme::MrcZf) if cfg.n_d < 2 => Some("mrc_zf needs n_d ≥ 2"),
                    Arm::Fd(Scheme::ZfMrt) if cfg.n_u < 2 => Some("zf_mrt needs n_u ≥ 2"),
                    Arm::Hd(_) if !(cfg.sigma_n2 > 0.0) => Some("HD baselines need sigma_n2 > 0"),
                    _ => None,
                };
                if let Some(msg) = bad {
                    out.push(Diagnostic::new(format!("{prefix}.{}", arm.label()), msg));
                }
            }
        }
        out
    }
}

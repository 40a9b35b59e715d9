use std::io::{self, Write};

use fdsim::analytic::{self, DlRate, EvalSpec, UlRate};
use fdsim::error::Error;
use fdsim::geometry::{NetworkConfig, Selection};
use fdsim::montecarlo::{estimate_fd_multi, estimate_hd, gain, HdCondition, McOptions, RateReport};
use fdsim::precoding::Scheme;

use crate::spec::{Arm, ExperimentSpec};

/// Column order of the CSV; matches the field order of [`ResultRow`].
pub const COLUMNS: [&str; 26] = [
    "lambda_d",
    "r_c",
    "alpha",
    "d",
    "p_a",
    "p_u",
    "sigma_n2",
    "sigma_aa2",
    "n_u",
    "n_d",
    "delta",
    "selection",
    "trials",
    "seed",
    "scheme",
    "source",
    "rate_ul",
    "rate_dl",
    "rate_sum",
    "se_ul",
    "se_dl",
    "outage_ul",
    "outage_dl",
    "gain_vs_hd_ac",
    "gain_vs_hd_rc",
    "note",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub cfg: NetworkConfig<f64>,
    pub trials: u64,
    pub seed: u64,
    pub scheme: String,
    /// `mc` or `analytic:<variant>`.
    pub source: String,
    pub rate_ul: Option<f64>,
    pub rate_dl: Option<f64>,
    pub rate_sum: Option<f64>,
    pub se_ul: Option<f64>,
    pub se_dl: Option<f64>,
    pub outage_ul: Option<f64>,
    pub outage_dl: Option<f64>,
    pub gain_vs_hd_ac: Option<f64>,
    pub gain_vs_hd_rc: Option<f64>,
    pub note: String,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

impl ResultRow {
    pub fn fields(&self) -> Vec<String> {
        let c = &self.cfg;
        let sel = match c.selection {
            Selection::Nus => "nus",
            Selection::Rus => "rus",
        };
        vec![
            num(c.lambda_d),
            num(c.r_c),
            num(c.alpha),
            num(c.d),
            num(c.p_a),
            num(c.p_u),
            num(c.sigma_n2),
            num(c.sigma_aa2),
            c.n_u.to_string(),
            c.n_d.to_string(),
            num(c.delta),
            sel.into(),
            self.trials.to_string(),
            self.seed.to_string(),
            self.scheme.clone(),
            self.source.clone(),
            opt(self.rate_ul),
            opt(self.rate_dl),
            opt(self.rate_sum),
            opt(self.se_ul),
            opt(self.se_dl),
            opt(self.outage_ul),
            opt(self.outage_dl),
            opt(self.gain_vs_hd_ac),
            opt(self.gain_vs_hd_rc),
            self.note.clone(),
        ]
    }
}

pub fn write_csv<W: Write>(rows: &[ResultRow], w: W) -> io::Result<()> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(COLUMNS)?;
    for r in rows {
        out.write_record(r.fields())?;
    }
    out.flush()
}

pub fn csv_string(rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

fn gains(sum: Option<f64>, hd: &[Option<f64>; 2]) -> [Option<f64>; 2] {
    hd.map(|h| Some(gain(sum?, h?).ok()?).filter(|g| g.is_finite()))
}

/// Analytic variant label per arm; `None` when no closed form exists.
pub fn analytic_label(arm: Arm) -> Option<&'static str> {
    match arm {
        Arm::Fd(Scheme::MrcMrt) => Some("case1_exact+exact"),
        Arm::Fd(Scheme::MrcZf) => Some("mrczf+exact"),
        Arm::Fd(Scheme::ZfMrt) => Some("zfmrt+exact"),
        Arm::Fd(Scheme::Optimal) => None,
        Arm::Hd(c) => Some(c.label()),
    }
}

struct Partial {
    ul: Option<f64>,
    dl: Option<f64>,
    notes: Vec<String>,
}

impl Partial {
    fn take(&mut self, tag: &str, r: fdsim::error::Result<analytic::Evaluation>) -> Option<f64> {
        match r {
            Ok(e) => {
                if let Some(n) = e.note {
                    self.notes.push(format!("{tag}: {n}"));
                }
                Some(e.value)
            }
            Err(e) => {
                self.notes.push(format!("{tag}: {e}"));
                None
            }
        }
    }
}

fn analytic_rates(cfg: &NetworkConfig<f64>, arm: Arm, spec: &EvalSpec) -> Partial {
    let mut p = Partial { ul: None, dl: None, notes: Vec::new() };
    match arm {
        Arm::Fd(s) => {
            let (ul, dl_cfg) = match s {
                Scheme::MrcMrt => (UlRate::Case1Exact, cfg.clone()),
                // ZF transmit leaves n_d − 1 degrees of freedom for the DL user
                Scheme::MrcZf => (UlRate::MrcZf, NetworkConfig { n_d: cfg.n_d.saturating_sub(1), ..cfg.clone() }),
                Scheme::ZfMrt => (UlRate::ZfMrt, cfg.clone()),
                Scheme::Optimal => return p,
            };
            p.ul = p.take("ul", analytic::ul_rate(cfg, ul, spec));
            p.dl = p.take("dl", analytic::dl_rate(&dl_cfg, DlRate::Exact, spec));
        }
        Arm::Hd(c) => match analytic::hd_rates(cfg, c, spec) {
            Ok((ul, dl)) => {
                p.ul = Some(ul);
                p.dl = Some(dl);
            }
            Err(e) => p.notes.push(e.to_string()),
        },
    }
    p
}

/// Evaluates every (sweep point, arm, source) in output order.
pub fn run(spec: &ExperimentSpec) -> Result<Vec<ResultRow>, Error> {
    let opts = McOptions { gamma_th: spec.gamma_th, grid_size: spec.grid_size, ..McOptions::new(spec.trials, spec.seed) };
    let eval = EvalSpec::default();
    let fd: Vec<Scheme> = spec
        .arms
        .iter()
        .filter_map(|a| match a {
            Arm::Fd(s) => Some(*s),
            Arm::Hd(_) => None,
        })
        .collect();
    let mut rows = Vec::new();
    for cfg in spec.sweep.points(&spec.base) {
        let fd_reports = if fd.is_empty() { Vec::new() } else { estimate_fd_multi(&cfg, &fd, &opts)? };
        let hd_reports: Vec<Option<RateReport>> = [HdCondition::Ac, HdCondition::Rc]
            .into_iter()
            .map(|c| estimate_hd(&cfg, c, cfg.delta, &opts).ok())
            .collect();
        let hd_mc = [0, 1].map(|i| hd_reports[i].as_ref().map(|r| r.mean_sum));
        let hd_an = if spec.analytic {
            [HdCondition::Ac, HdCondition::Rc].map(|c| analytic::hd_rates(&cfg, c, &eval).ok().map(|(u, d)| u + d))
        } else {
            [None, None]
        };
        let row = |scheme: &str, source: String| ResultRow {
            cfg: cfg.clone(),
            trials: spec.trials,
            seed: spec.seed,
            scheme: scheme.to_string(),
            source,
            rate_ul: None,
            rate_dl: None,
            rate_sum: None,
            se_ul: None,
            se_dl: None,
            outage_ul: None,
            outage_dl: None,
            gain_vs_hd_ac: None,
            gain_vs_hd_rc: None,
            note: String::new(),
        };
        for arm in &spec.arms {
            let rep = match arm {
                Arm::Fd(s) => fd_reports.iter().find(|r| r.scheme == s.label()),
                Arm::Hd(HdCondition::Ac) => hd_reports[0].as_ref(),
                Arm::Hd(HdCondition::Rc) => hd_reports[1].as_ref(),
            }
            .ok_or_else(|| Error::Domain(format!("no Monte Carlo report for {}", arm.label())))?;
            let [g_ac, g_rc] = gains(Some(rep.mean_sum), &hd_mc);
            let mc = ResultRow {
                rate_ul: Some(rep.mean_rate_ul),
                rate_dl: Some(rep.mean_rate_dl),
                rate_sum: Some(rep.mean_sum),
                se_ul: Some(rep.se_ul),
                se_dl: Some(rep.se_dl),
                outage_ul: matches!(arm, Arm::Fd(_)).then_some(rep.outage_ul),
                outage_dl: matches!(arm, Arm::Fd(_)).then_some(rep.outage_dl),
                gain_vs_hd_ac: g_ac,
                gain_vs_hd_rc: g_rc,
                ..row(arm.label(), "mc".into())
            };
            rows.push(mc);
            let Some(label) = analytic_label(*arm).filter(|_| spec.analytic) else {
                continue;
            };
            let p = analytic_rates(&cfg, *arm, &eval);
            let sum = p.ul.zip(p.dl).map(|(u, d)| u + d);
            let [g_ac, g_rc] = gains(sum, &hd_an);
            rows.push(ResultRow {
                rate_ul: p.ul,
                rate_dl: p.dl,
                rate_sum: sum,
                gain_vs_hd_ac: g_ac,
                gain_vs_hd_rc: g_rc,
                note: p.notes.join("; "),
                ..row(arm.label(), format!("analytic:{label}"))
            });
        }
    }
    Ok(rows)
}

//! One-dimensional parameter sweeps.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use finrx_core::device::{self, Region};
use finrx_core::params::{is_scalar_key, validate, Params};
use finrx_core::receptor::equilibrium_ok;
use finrx_core::{Link, ModelError};

use crate::table::{Cell, Table};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// SNR in dB at `ligand.n_m`.
    SnrDb,
    /// Symbol error probability of the M-ary alphabet.
    Sep,
    /// Mean output current change at `ligand.n_m` (A).
    MuI,
    /// Band-integrated output current noise variance at `ligand.n_m` (A²).
    Psd,
    /// Mean current change relative to the bias current.
    Response,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::SnrDb, Metric::Sep, Metric::MuI, Metric::Psd, Metric::Response];

    pub fn name(self) -> &'static str {
        match self {
            Metric::SnrDb => "snr_db",
            Metric::Sep => "sep",
            Metric::MuI => "mu_I",
            Metric::Psd => "psd",
            Metric::Response => "response",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| CliError::Usage(format!("unknown metric `{s}` (snr_db, sep, mu_I, psd, response)")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Values {
    List(Vec<f64>),
    Range { start: f64, stop: f64, count: usize, log: bool },
}

impl Values {
    pub fn lin(start: f64, stop: f64, count: usize) -> Self {
        Values::Range { start, stop, count, log: false }
    }

    pub fn log(start: f64, stop: f64, count: usize) -> Self {
        Values::Range { start, stop, count, log: true }
    }

    /// Endpoints are reproduced exactly.
    pub fn expand(&self) -> Vec<f64> {
        match *self {
            Values::List(ref v) => v.clone(),
            Values::Range { start, stop, count, log } => (0..count)
                .map(|i| {
                    if i == 0 {
                        return start;
                    }
                    if i + 1 == count {
                        return stop;
                    }
                    let t = i as f64 / (count - 1) as f64;
                    if log {
                        (start.ln() + t * (stop.ln() - start.ln())).exp()
                    } else {
                        start + t * (stop - start)
                    }
                })
                .collect(),
        }
    }
}

impl FromStr for Values {
    type Err = CliError;

    /// `start:stop:count[:lin|log]` or a comma list.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |m: &str| CliError::Usage(format!("bad sweep values `{s}`: {m}"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad(&format!("`{t}` is not a number")));
        if s.contains(':') {
            let parts: Vec<&str> = s.split(':').collect();
            if !(3..=4).contains(&parts.len()) {
                return Err(bad("expected start:stop:count[:lin|log]"));
            }
            let count = parts[2].trim().parse::<usize>().map_err(|_| bad("count must be an integer"))?;
            let log = match parts.get(3).map(|p| p.trim()) {
                None | Some("lin") => false,
                Some("log") => true,
                Some(o) => return Err(bad(&format!("unknown spacing `{o}`"))),
            };
            Ok(Values::Range { start: num(parts[0])?, stop: num(parts[1])?, count, log })
        } else {
            Ok(Values::List(s.split(',').map(num).collect::<Result<_, _>>()?))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Dotted parameter key, e.g. `channel.d`.
    pub variable: String,
    pub values: Values,
    pub metric: Metric,
    /// Applied to the base bundle before sweeping.
    pub overrides: Vec<(String, f64)>,
    /// Alphabet size for `sep`.
    pub m_ary: usize,
    /// Sampling window for the equilibrium flag; `None` leaves it unknown.
    pub tau_p: Option<f64>,
}

impl SweepSpec {
    pub fn new(variable: &str, values: Values, metric: Metric) -> Self {
        Self {
            variable: variable.to_string(),
            values,
            metric,
            overrides: Vec::new(),
            m_ary: 2,
            tau_p: None,
        }
    }

    pub fn with_m(mut self, m_ary: usize) -> Self {
        self.m_ary = m_ary;
        self
    }

    pub fn check(&self) -> Result<Vec<f64>, CliError> {
        if !is_scalar_key(&self.variable) {
            return Err(CliError::Usage(format!("`{}` is not a sweepable parameter", self.variable)));
        }
        for (k, _) in &self.overrides {
            if !is_scalar_key(k) {
                return Err(CliError::Usage(format!("`{k}` is not a scalar parameter")));
            }
        }
        let xs = self.values.expand();
        if xs.is_empty() {
            return Err(CliError::Usage("sweep has no values".into()));
        }
        if xs.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Usage("sweep values must be finite".into()));
        }
        let up = xs.windows(2).all(|w| w[1] > w[0]);
        let down = xs.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(CliError::Usage("sweep values must be strictly ordered".into()));
        }
        if let Values::Range { start, stop, log: true, .. } = self.values {
            if !(start > 0.0 && stop > 0.0) {
                return Err(CliError::Usage("log spacing needs positive endpoints".into()));
            }
        }
        let inert = match self.metric {
            Metric::Sep => ["ligand.n_m"].as_slice(),
            _ => ["ligand.k_max"].as_slice(),
        };
        if inert.contains(&self.variable.as_str()) {
            return Err(CliError::Usage(format!(
                "`{}` does not affect metric `{}`",
                self.variable, self.metric
            )));
        }
        if self.metric == Metric::Sep && self.m_ary < 2 {
            return Err(ModelError::AlphabetSize(self.m_ary).into());
        }
        Ok(xs)
    }
}

/// One evaluated sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub value: f64,
    pub metric: f64,
    pub tau_b: f64,
    pub region: Region,
    pub equilibrium: Option<bool>,
    pub status: String,
}

impl Row {
    fn failed(value: f64, region: Region, status: String) -> Self {
        Self { value, metric: f64::NAN, tau_b: f64::NAN, region, equilibrium: None, status }
    }
}

/// Metric and the slowest binding relaxation time involved.
pub fn evaluate(params: &Params, metric: Metric, m_ary: usize) -> Result<(f64, f64), ModelError> {
    let link = Link::new(params)?;
    let n_m = params.ligand.n_m;
    let tau = |n: f64| link.binding(n).tau_b;
    Ok(match metric {
        Metric::SnrDb => (link.snr_db(n_m), tau(n_m)),
        Metric::MuI => (link.mean_current(n_m), tau(n_m)),
        Metric::Psd => (link.current_variance(n_m), tau(n_m)),
        Metric::Response => (link.mean_current(n_m) / link.op.i_d, tau(n_m)),
        Metric::Sep => {
            let stats = link.symbol_stats(m_ary)?;
            let tau_b = stats.levels.iter().map(|&n| tau(n)).fold(0.0, f64::max);
            (stats.sep(), tau_b)
        }
    })
}

fn status_of(e: &ModelError) -> &'static str {
    match e {
        ModelError::NoFlow => "no_flow",
        ModelError::NotLinearRegion { .. } => "not_linear",
        ModelError::NoThreshold { .. } => "no_threshold",
        ModelError::InvalidStats(_) => "invalid_stats",
        ModelError::LevelCount { .. } => "level_count",
        ModelError::AlphabetSize(_) => "alphabet_size",
        _ => "model_error",
    }
}

fn eval_row(base: &Params, spec: &SweepSpec, value: f64) -> Row {
    let p = base.set_scalar(&spec.variable, value).expect("checked key");
    let region = device::region(p.device.v_ov, p.device.v_sd);
    let violations: Vec<String> = validate(&p)
        .into_iter()
        .filter(|v| !(v.field == "device.v_sd" && region == Region::Invalid))
        .map(|v| v.field)
        .collect();
    if !violations.is_empty() {
        return Row::failed(value, region, format!("invalid({})", violations.join(" ")));
    }
    if region == Region::Invalid {
        return Row::failed(value, region, "not_linear".into());
    }
    match evaluate(&p, spec.metric, spec.m_ary) {
        Ok((metric, tau_b)) => Row {
            value,
            metric,
            tau_b,
            region,
            equilibrium: spec.tau_p.map(|t| equilibrium_ok(t, tau_b)),
            status: "ok".into(),
        },
        Err(e) => Row::failed(value, region, status_of(&e).into()),
    }
}

/// Evaluates every sweep point in parallel; rows keep the input order.
pub fn run_sweep(spec: &SweepSpec, base: &Params) -> Result<Vec<Row>, CliError> {
    let xs = spec.check()?;
    let mut base = base.clone();
    for (k, v) in &spec.overrides {
        base = base.set_scalar(k, *v)?;
    }
    Ok(xs.par_iter().map(|&x| eval_row(&base, spec, x)).collect())
}

/// Table form of a sweep, with band and flag columns.
pub fn sweep_table(spec: &SweepSpec, base: &Params, rows: &[Row]) -> Table {
    let mut t = Table::new([
        spec.variable.as_str(),
        spec.metric.name(),
        "tau_b",
        "f_min",
        "f_max",
        "n_points",
        "region",
        "equilibrium_ok",
        "status",
    ]);
    let b = &base.band;
    for r in rows {
        t.push(vec![
            Cell::Num(r.value),
            Cell::Num(r.metric),
            Cell::Num(r.tau_b),
            Cell::Num(b.f_min),
            Cell::Num(b.f_max),
            Cell::Int(b.n_points as u64),
            match r.region {
                Region::Linear => "linear",
                Region::Invalid => "invalid",
            }
            .into(),
            match r.equilibrium {
                Some(true) => "true",
                Some(false) => "false",
                None => "na",
            }
            .into(),
            r.status.clone().into(),
        ]);
    }
    t.meta("variable", &spec.variable);
    t.meta("metric", spec.metric);
    if spec.metric == Metric::Sep {
        t.meta("M", spec.m_ary);
    }
    t.meta("tau_p", spec.tau_p.map_or("none".to_string(), |v| format!("{v:e}")));
    for (k, v) in &spec.overrides {
        t.meta("override", format!("{k}={v:e}"));
    }
    t
}

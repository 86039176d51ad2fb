//! Batch front-end for `finrx-core`: presets, named sweep experiments and
//! CSV tables for each subcommand.

pub mod sweep;
pub mod table;

use thiserror::Error;

use finrx_core::oracle::{simulate_sep, TrialConfig};
use finrx_core::params::{defaults, BandConfig, Params};
use finrx_core::{ConfigError, Link, ModelError};

pub use sweep::{run_sweep, sweep_table, Metric, Row, SweepSpec, Values};
pub use table::{emit_csv, Cell, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for configuration and usage errors, 3 for model-domain errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Model(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

pub const PRESETS: [&str; 2] = ["table1", "physiological"];

/// Named parameter bundles. `physiological` raises the fin to 500 nm and the
/// ionic strength to 150 mol/m³.
pub fn preset(name: &str) -> Result<Params, CliError> {
    match name {
        "table1" => Ok(defaults()),
        "physiological" => {
            let mut p = defaults();
            p.device.t_s = 5e-7;
            p.channel.c_ion = 150.0;
            Ok(p)
        }
        _ => Err(CliError::Usage(format!("unknown preset `{name}` ({})", PRESETS.join(", ")))),
    }
}

/// A canned sweep and the preset it runs on.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub name: &'static str,
    pub preset: &'static str,
    pub about: &'static str,
    pub spec: SweepSpec,
}

/// Built-in sweeps. SEP experiments use the alphabet size `m_ary`.
pub fn experiments(m_ary: usize) -> Vec<Experiment> {
    let e = |name, preset, about, var, values, metric| Experiment {
        name,
        preset,
        about,
        spec: SweepSpec::new(var, values, metric).with_m(m_ary),
    };
    vec![
        e("snr-vs-nm", "table1", "SNR against released molecules", "ligand.n_m", Values::log(1e4, 1e10, 50), Metric::SnrDb),
        e("snr-vs-d", "table1", "SNR against distance", "channel.d", Values::log(1e-4, 1e-2, 20), Metric::SnrDb),
        e("snr-vs-lsr", "table1", "SNR against receptor length", "ligand.l_sr", Values::lin(1e-9, 5e-9, 11), Metric::SnrDb),
        e("mu-vs-nm", "table1", "mean current against released molecules", "ligand.n_m", Values::log(1e4, 1e7, 31), Metric::MuI),
        e("sep-vs-d", "physiological", "SEP against distance", "channel.d", Values::log(1e-4, 1e-2, 15), Metric::Sep),
        e("sep-vs-ts", "physiological", "SEP against fin height", "device.t_s", Values::lin(1e-7, 1e-6, 10), Metric::Sep),
        e("sep-vs-vsd", "physiological", "SEP against drain bias", "device.v_sd", Values::lin(0.05, 0.35, 10), Metric::Sep),
        e("sep-vs-d0", "physiological", "SEP against intrinsic diffusion", "channel.d0", Values::log(5e-10, 5e-9, 10), Metric::Sep),
        e("sep-vs-cion", "physiological", "SEP against ionic strength", "channel.c_ion", Values::lin(50.0, 300.0, 10), Metric::Sep),
        e("sep-vs-not", "physiological", "SEP against trap density", "device.n_ot", Values::log(10f64.powf(21.5), 10f64.powf(22.5), 10), Metric::Sep),
    ]
}

pub fn experiment(name: &str, m_ary: usize) -> Result<Experiment, CliError> {
    experiments(m_ary)
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| CliError::Usage(format!("unknown experiment `{name}`")))
}

/// Parses `fmin:fmax:n`.
pub fn parse_band(s: &str) -> Result<BandConfig, CliError> {
    let bad = || CliError::Usage(format!("bad band `{s}`, expected fmin:fmax:n"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    Ok(BandConfig {
        f_min: parts[0].trim().parse().map_err(|_| bad())?,
        f_max: parts[1].trim().parse().map_err(|_| bad())?,
        n_points: parts[2].trim().parse().map_err(|_| bad())?,
    })
}

/// Sampled noise spectrum at `n_m` released molecules.
pub fn psd_table(params: &Params, n_m: f64) -> Result<Table, CliError> {
    let link = Link::new(params)?;
    let s = link.noise_spectrum(n_m, &params.band);
    let mut t = Table::new(["f", "s_binding", "s_flicker", "s_total"]);
    for i in 0..s.freqs.len() {
        t.push(vec![s.freqs[i].into(), s.s_binding[i].into(), s.s_flicker[i].into(), s.s_total[i].into()]);
    }
    t.meta("n_m", format!("{n_m:e}"));
    t.meta("tau_b", format!("{:e}", s.tau_b));
    t.meta("sigma2_I", format!("{:e}", finrx_core::link::current_variance(&s)));
    let cross: Vec<String> = s.crossovers().iter().map(|f| format!("{f:e}")).collect();
    t.meta("crossovers", if cross.is_empty() { "none".into() } else { cross.join(" ") });
    Ok(t)
}

/// Receiver response against the number of released molecules.
pub fn response_table(params: &Params, n_m: &[f64]) -> Result<Table, CliError> {
    let link = Link::new(params)?;
    let mut t = Table::new(["n_m", "rho_r", "p_on", "mu_I", "i_d", "response", "tau_b"]);
    for &n in n_m {
        let b = link.binding(n);
        let mu = link.mean_current(n);
        t.push(vec![
            n.into(),
            link.received_concentration(n).into(),
            b.p_on.into(),
            mu.into(),
            link.op.i_d.into(),
            (mu / link.op.i_d).into(),
            b.tau_b.into(),
        ]);
    }
    t.meta("n_r", link.n_r);
    Ok(t)
}

/// Per-symbol statistics, thresholds and the resulting SEP.
pub fn sep_table(params: &Params, m_ary: usize) -> Result<Table, CliError> {
    let stats = Link::new(params)?.symbol_stats(m_ary)?;
    let pe = stats.sep();
    let mut t = Table::new(["symbol", "n_m", "mu_I", "sigma2_I", "threshold_low", "threshold_high", "sep"]);
    for m in 0..m_ary {
        let lo = if m == 0 { f64::NEG_INFINITY } else { stats.thresholds[m - 1] };
        let hi = if m + 1 == m_ary { f64::INFINITY } else { stats.thresholds[m] };
        t.push(vec![
            Cell::Int(m as u64),
            stats.levels[m].into(),
            stats.mu[m].into(),
            stats.sigma2[m].into(),
            lo.into(),
            hi.into(),
            pe.into(),
        ]);
    }
    t.meta("M", m_ary);
    Ok(t)
}

/// Monte-Carlo SEP against the analytic value.
pub fn oracle_table(params: &Params, m_ary: usize, trials: &TrialConfig) -> Result<Table, CliError> {
    if trials.n_trials < finrx_core::oracle::MIN_SEP_TRIALS {
        return Err(CliError::Usage(format!(
            "need at least {} trials",
            finrx_core::oracle::MIN_SEP_TRIALS
        )));
    }
    let stats = Link::new(params)?.symbol_stats(m_ary)?;
    let analytic = stats.sep();
    let (mc, se) = simulate_sep(&stats, trials);
    let z = if se > 0.0 { (mc - analytic) / se } else { f64::NAN };
    let agree = (mc - analytic).abs() <= 3.0 * se;
    let mut t = Table::new(["M", "trials", "sep_analytic", "sep_mc", "std_error", "z", "within_3se"]);
    t.push(vec![
        Cell::Int(m_ary as u64),
        Cell::Int(trials.n_trials),
        analytic.into(),
        mc.into(),
        se.into(),
        z.into(),
        if agree { "true" } else { "false" }.into(),
    ]);
    Ok(t)
}

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use finrx_cli::{
    emit_csv, experiment, experiments, oracle_table, parse_band, preset, psd_table, response_table, run_sweep,
    sep_table, sweep_table, CliError, Metric, SweepSpec, Table, Values, PRESETS,
};
use finrx_core::oracle::TrialConfig;
use finrx_core::params::{validate, Params};
use finrx_core::ConfigError;

#[derive(Parser)]
#[command(name = "finrx", version, about = "FinFET molecular-communication receiver model")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Common {
    /// `key = value` config file applied on top of the preset
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one parameter, e.g. `--set channel.d=2mm` (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    /// Base parameter bundle (default table1, or the experiment's own)
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Output path, `-` for stdout
    #[arg(long, global = true, default_value = "-")]
    out: String,
    /// Noise integration band `fmin:fmax:n`
    #[arg(long, global = true)]
    band: Option<String>,
    /// Alphabet size
    #[arg(long = "M", global = true, default_value_t = 2)]
    m_ary: usize,
    /// Seed for Monte-Carlo runs
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Sampling window (s) for the receptor equilibrium flag
    #[arg(long = "tau-p", global = true)]
    tau_p: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sweep one parameter and report a metric per point
    Sweep {
        /// Named experiment; see `presets`
        #[arg(long, conflicts_with_all = ["var", "values", "metric"])]
        experiment: Option<String>,
        /// Dotted parameter key
        #[arg(long, requires_all = ["values", "metric"])]
        var: Option<String>,
        /// `start:stop:count[:lin|log]` or a comma list
        #[arg(long, allow_hyphen_values = true)]
        values: Option<String>,
        /// snr_db, sep, mu_I, psd or response
        #[arg(long)]
        metric: Option<String>,
    },
    /// Output current noise spectrum
    Psd {
        /// Released molecules (defaults to ligand.n_m)
        #[arg(long = "n-m")]
        n_m: Option<f64>,
    },
    /// Mean current response against released molecules
    Response {
        #[arg(long, default_value = "1e4:1e7:31:log")]
        values: String,
    },
    /// Symbol statistics, ML thresholds and SEP
    Sep,
    /// Monte-Carlo check of the analytic SEP
    Oracle {
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
    },
    /// Parse and validate the configuration
    ValidateConfig,
    /// List presets and experiments, or print one preset's config
    Presets {
        #[arg(long)]
        show: Option<String>,
    },
}

fn base_params(c: &Common) -> Result<Params, CliError> {
    let mut p = preset(c.preset.as_deref().unwrap_or("table1"))?;
    if let Some(path) = &c.config {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(ConfigError::Parse {
                line: 0,
                message: format!("cannot read {}: {e}", path.display()),
            })
        })?;
        p = p.apply_unchecked(&text)?;
    }
    for s in &c.set {
        if !s.contains('=') {
            return Err(CliError::Usage(format!("--set expects KEY=VALUE, got `{s}`")));
        }
        p = p.apply_unchecked(s)?;
    }
    if let Some(b) = &c.band {
        p.band = parse_band(b)?;
    }
    let violations = validate(&p);
    if !violations.is_empty() {
        return Err(ConfigError::Invalid(violations).into());
    }
    Ok(p)
}

fn write_table(t: &Table, out: &str) -> Result<(), CliError> {
    if out == "-" {
        let stdout = io::stdout();
        let mut w = stdout.lock();
        emit_csv(t, &mut w)?;
        w.flush()?;
    } else {
        let mut w = BufWriter::new(File::create(out)?);
        emit_csv(t, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let c = &cli.common;
    let table = match cli.cmd {
        Cmd::Presets { show: Some(name) } => {
            print!("{}", preset(&name)?.to_config_text());
            return Ok(());
        }
        Cmd::Presets { show: None } => {
            println!("presets:");
            for p in PRESETS {
                println!("  {p}");
            }
            println!("experiments:");
            for e in experiments(c.m_ary) {
                println!("  {:<12} [{}] {}", e.name, e.preset, e.about);
            }
            return Ok(());
        }
        Cmd::ValidateConfig => {
            let p = base_params(c)?;
            println!("ok {}", finrx_cli::table::config_hash(&p));
            return Ok(());
        }
        Cmd::Sweep { experiment: Some(name), .. } => {
            let e = experiment(&name, c.m_ary)?;
            let common = Common { preset: c.preset.clone().or(Some(e.preset.to_string())), ..c.clone() };
            let base = base_params(&common)?;
            let spec = SweepSpec { tau_p: c.tau_p, ..e.spec };
            let mut t = sweep_table(&spec, &base, &run_sweep(&spec, &base)?);
            t.meta("experiment", name);
            t.provenance(&base, None);
            t
        }
        Cmd::Sweep { var, values, metric, .. } => {
            let base = base_params(c)?;
            let var = var.ok_or_else(|| CliError::Usage("sweep needs --experiment or --var/--values/--metric".into()))?;
            let values: Values = values.unwrap_or_default().parse()?;
            let metric: Metric = metric.unwrap_or_default().parse()?;
            let spec = SweepSpec { tau_p: c.tau_p, ..SweepSpec::new(&var, values, metric).with_m(c.m_ary) };
            let mut t = sweep_table(&spec, &base, &run_sweep(&spec, &base)?);
            t.provenance(&base, None);
            t
        }
        Cmd::Psd { n_m } => {
            let base = base_params(c)?;
            let mut t = psd_table(&base, n_m.unwrap_or(base.ligand.n_m))?;
            t.provenance(&base, None);
            t
        }
        Cmd::Response { values } => {
            let base = base_params(c)?;
            let xs = values.parse::<Values>()?.expand();
            let mut t = response_table(&base, &xs)?;
            t.provenance(&base, None);
            t
        }
        Cmd::Sep => {
            let base = base_params(c)?;
            let mut t = sep_table(&base, c.m_ary)?;
            t.provenance(&base, None);
            t
        }
        Cmd::Oracle { trials } => {
            let base = base_params(c)?;
            let mut t = oracle_table(&base, c.m_ary, &TrialConfig::new(trials, c.seed))?;
            t.provenance(&base, Some(c.seed));
            t
        }
    };
    write_table(&table, &c.out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! Parameter sets, defaults, validation and the flat `key = value` config
//! format.
//!
//! All stored values are SI. The config reader converts unit suffixes
//! (`10mm`, `2 nm`, `100mV`, `10um/s`) at parse time.

use std::fmt;

use crate::constants::VACUUM_PERMITTIVITY;
use crate::error::ConfigError;

/// Microfluidic channel, flow and electrolyte.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    /// Channel height (m).
    pub h_ch: f64,
    /// Channel width (m).
    pub l_ch: f64,
    /// Mean flow velocity (m/s). Zero degrades to pure diffusion.
    pub u: f64,
    /// Intrinsic diffusion coefficient of the ligand (m²/s).
    pub d0: f64,
    /// Transmitter to receiver distance (m); the transmitter sits at x = 0.
    pub x_r: f64,
    /// Temperature (K).
    pub temperature: f64,
    /// Ionic strength (mol/m³).
    pub c_ion: f64,
    /// Medium permittivity (F/m).
    pub eps_m: f64,
}

/// Tri-gate FinFET geometry, materials and bias.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceParams {
    /// Fin top width W (m).
    pub w: f64,
    /// Fin (nanowire) height t_s (m).
    pub t_s: f64,
    /// Effective channel length, also the receptor-covered length (m).
    pub l_eff: f64,
    /// Oxide thickness (m).
    pub t_ox: f64,
    /// Oxide permittivity (F/m).
    pub eps_ox: f64,
    /// Nanowire permittivity (F/m).
    pub eps_nw: f64,
    /// Flat-band voltage (V).
    pub v_fb: f64,
    /// Doping concentration (m⁻³). Only used by the threshold-voltage model.
    pub n_a: Option<f64>,
    /// Intrinsic carrier concentration (m⁻³). Only used by the
    /// threshold-voltage model.
    pub n_i: Option<f64>,
    /// Hole mobility (m²/Vs).
    pub mu_p: f64,
    /// Source-drain voltage (V).
    pub v_sd: f64,
    /// Overdrive V_SG − |V_t| (V).
    pub v_ov: f64,
    /// Hole density (m⁻³).
    pub p: f64,
    /// Trap tunnelling distance (m).
    pub lambda_tun: f64,
    /// Oxide trap density (eV⁻¹ m⁻³).
    pub n_ot: f64,
    /// Coulomb scattering coefficient (Vs/C).
    pub alpha_s: f64,
}

/// Ligand chemistry, receptor layer and the M-CSK alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct LigandParams {
    /// Binding rate (m³/s).
    pub k1: f64,
    /// Unbinding rate (1/s).
    pub k_minus1: f64,
    /// Mean free electrons per ligand.
    pub n_e: f64,
    /// Receptor surface density (m⁻²).
    pub rho_sr: f64,
    /// Receptor length (m).
    pub l_sr: f64,
    /// Molecules released for single-symbol metrics (SNR, mean current).
    pub n_m: f64,
    /// Largest number of molecules the transmitter can release.
    pub k_max: f64,
    /// Explicit per-symbol release counts; `None` uses [`LigandParams::levels`]'s
    /// default mapping.
    pub levels: Option<Vec<f64>>,
}

/// Frequency band over which noise PSDs are integrated.
#[derive(Debug, Clone, PartialEq)]
pub struct BandConfig {
    pub f_min: f64,
    pub f_max: f64,
    pub n_points: usize,
}

/// A complete, immutable parameter bundle.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub channel: ChannelParams,
    pub device: DeviceParams,
    pub ligand: LigandParams,
    pub band: BandConfig,
}

/// Doping default used only by the threshold-voltage model.
pub const DEFAULT_N_A: f64 = 1e24;
/// Intrinsic carrier concentration of silicon at 300 K.
pub const DEFAULT_N_I: f64 = 1.45e16;

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            h_ch: 3e-6,
            l_ch: 15e-6,
            u: 10e-6,
            d0: 2e-10,
            x_r: 1e-3,
            temperature: 300.0,
            c_ion: 30.0,
            eps_m: 78.0 * VACUUM_PERMITTIVITY,
        }
    }
}

impl Default for DeviceParams {
    fn default() -> Self {
        Self {
            w: 10.0 * std::f64::consts::PI * 1e-9,
            t_s: 5e-8,
            l_eff: 50e-9,
            t_ox: 2e-9,
            eps_ox: 3.9 * VACUUM_PERMITTIVITY,
            eps_nw: 11.68 * VACUUM_PERMITTIVITY,
            v_fb: -0.4762,
            n_a: Some(DEFAULT_N_A),
            n_i: Some(DEFAULT_N_I),
            mu_p: 500e-4,
            v_sd: 0.1,
            v_ov: 0.4,
            p: 1e24,
            lambda_tun: 0.05e-9,
            n_ot: 1e22,
            alpha_s: 1.9e-4,
        }
    }
}

impl Default for LigandParams {
    fn default() -> Self {
        Self {
            k1: 2e-19,
            k_minus1: 20.0,
            n_e: 3.0,
            rho_sr: 4e16,
            l_sr: 2e-9,
            n_m: 5e5,
            k_max: 4e6,
            levels: None,
        }
    }
}

impl Default for BandConfig {
    fn default() -> Self {
        Self {
            f_min: 1e-3,
            f_max: 1e3,
            n_points: 601,
        }
    }
}

impl Default for Params {
    fn default() -> Self {
        defaults()
    }
}

/// Table-I parameter bundle.
pub fn defaults() -> Params {
    Params {
        channel: ChannelParams::default(),
        device: DeviceParams::default(),
        ligand: LigandParams::default(),
        band: BandConfig::default(),
    }
}

impl ChannelParams {
    /// Cross-sectional area h_ch · l_ch (m²).
    pub fn area(&self) -> f64 {
        self.h_ch * self.l_ch
    }
}

impl DeviceParams {
    /// Gated perimeter W + 2 t_s (m).
    pub fn w_eff(&self) -> f64 {
        self.w + 2.0 * self.t_s
    }

    /// Oxide capacitance per unit area ε_ox / t_ox (F/m²).
    pub fn cox_per_area(&self) -> f64 {
        self.eps_ox / self.t_ox
    }
}

impl LigandParams {
    /// Per-symbol release counts for an `m_ary`-symbol alphabet.
    ///
    /// Explicit `levels` win. Otherwise symbol m releases (m + 1)·K/M, so
    /// the top symbol releases K and every symbol carries ligands.
    pub fn levels(&self, m_ary: usize) -> Vec<f64> {
        match &self.levels {
            Some(v) => v.clone(),
            None => (0..m_ary)
                .map(|m| (m + 1) as f64 * self.k_max / m_ary as f64)
                .collect(),
        }
    }
}

impl BandConfig {
    /// Log-spaced grid from `f_min` to `f_max` inclusive.
    pub fn grid(&self) -> Vec<f64> {
        let (a, b) = (self.f_min.ln(), self.f_max.ln());
        let n = self.n_points;
        (0..n)
            .map(|i| {
                if i == 0 {
                    self.f_min
                } else if i == n - 1 {
                    self.f_max
                } else {
                    (a + (b - a) * i as f64 / (n - 1) as f64).exp()
                }
            })
            .collect()
    }
}

/// One violated invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub bound: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.bound)
    }
}

struct Checker(Vec<Violation>);

impl Checker {
    fn require(&mut self, ok: bool, field: &str, bound: &str) {
        if !ok {
            self.0.push(Violation {
                field: field.to_string(),
                bound: bound.to_string(),
            });
        }
    }
    fn positive(&mut self, v: f64, field: &str) {
        self.require(v.is_finite() && v > 0.0, field, "must be finite and > 0");
    }
    fn non_negative(&mut self, v: f64, field: &str) {
        self.require(v.is_finite() && v >= 0.0, field, "must be finite and >= 0");
    }
}

/// Every violated invariant of `p`. An empty list means the bundle is valid.
pub fn validate(p: &Params) -> Vec<Violation> {
    let mut c = Checker(Vec::new());
    let ch = &p.channel;
    c.positive(ch.h_ch, "channel.h_ch");
    c.positive(ch.l_ch, "channel.l_ch");
    c.non_negative(ch.u, "channel.u");
    c.positive(ch.d0, "channel.d0");
    c.positive(ch.x_r, "channel.d");
    c.positive(ch.temperature, "channel.t");
    c.positive(ch.c_ion, "channel.c_ion");
    c.positive(ch.eps_m, "channel.eps_m");

    let d = &p.device;
    c.positive(d.w, "device.w");
    c.positive(d.t_s, "device.t_s");
    c.positive(d.l_eff, "device.l_eff");
    c.positive(d.t_ox, "device.t_ox");
    c.positive(d.eps_ox, "device.eps_ox");
    c.positive(d.eps_nw, "device.eps_nw");
    c.require(d.v_fb.is_finite(), "device.v_fb", "must be finite");
    if let Some(n) = d.n_a {
        c.positive(n, "device.n_a");
    }
    if let Some(n) = d.n_i {
        c.positive(n, "device.n_i");
    }
    c.positive(d.mu_p, "device.mu_p");
    c.positive(d.p, "device.p");
    c.non_negative(d.lambda_tun, "device.lambda");
    c.non_negative(d.n_ot, "device.n_ot");
    c.non_negative(d.alpha_s, "device.alpha_s");
    c.require(
        !(d.t_s > 0.0 && d.w > 0.0) || d.t_s > d.w,
        "device.t_s",
        "tri-gate geometry requires t_s > w",
    );
    c.positive(d.v_ov, "device.v_ov");
    c.non_negative(d.v_sd, "device.v_sd");
    c.require(
        d.v_sd <= d.v_ov,
        "device.v_sd",
        "linear region requires v_sd <= v_ov",
    );

    let l = &p.ligand;
    c.positive(l.k1, "ligand.k1");
    c.positive(l.k_minus1, "ligand.k_minus1");
    c.non_negative(l.n_e, "ligand.n_e");
    c.positive(l.rho_sr, "ligand.rho_sr");
    c.non_negative(l.l_sr, "ligand.l_sr");
    c.non_negative(l.n_m, "ligand.n_m");
    c.positive(l.k_max, "ligand.k_max");
    if let Some(levels) = &l.levels {
        c.require(levels.len() >= 2, "ligand.levels", "need at least 2 levels");
        c.require(
            levels.iter().all(|x| x.is_finite() && *x >= 0.0),
            "ligand.levels",
            "levels must be finite and >= 0",
        );
        c.require(
            levels.windows(2).all(|w| w[0] < w[1]),
            "ligand.levels",
            "levels must be strictly increasing",
        );
        c.require(
            levels.iter().all(|x| *x <= l.k_max),
            "ligand.levels",
            "levels must not exceed k_max",
        );
    }

    let b = &p.band;
    c.positive(b.f_min, "band.f_min");
    c.require(
        b.f_max.is_finite() && b.f_max > b.f_min,
        "band.f_max",
        "must be finite and > f_min",
    );
    c.require(b.n_points >= 2, "band.n_points", "must be >= 2");
    c.0
}

// ---------------------------------------------------------------------------
// Config text
// ---------------------------------------------------------------------------

#[derive(Clone, Copy)]
enum Unit {
    /// Accepts SI prefixes, optionally followed by the unit symbol.
    Linear(&'static str),
    /// Accepts only the bare unit symbol.
    Fixed(&'static str),
    Dimensionless,
}

#[derive(Clone, Copy)]
enum Slot {
    Real(fn(&mut Params) -> &mut f64),
    OptReal(fn(&mut Params) -> &mut Option<f64>),
    Count(fn(&mut Params) -> &mut usize),
    Levels,
}

struct Key {
    name: &'static str,
    unit: Unit,
    slot: Slot,
}

macro_rules! real {
    ($($f:ident).+) => {
        Slot::Real(|p: &mut Params| &mut p.$($f).+)
    };
}

const KEYS: &[Key] = &[
    Key { name: "channel.h_ch", unit: Unit::Linear("m"), slot: real!(channel.h_ch) },
    Key { name: "channel.l_ch", unit: Unit::Linear("m"), slot: real!(channel.l_ch) },
    Key { name: "channel.u", unit: Unit::Linear("m/s"), slot: real!(channel.u) },
    Key { name: "channel.d0", unit: Unit::Fixed("m^2/s"), slot: real!(channel.d0) },
    Key { name: "channel.d", unit: Unit::Linear("m"), slot: real!(channel.x_r) },
    Key { name: "channel.t", unit: Unit::Fixed("K"), slot: real!(channel.temperature) },
    Key { name: "channel.c_ion", unit: Unit::Fixed("mol/m^3"), slot: real!(channel.c_ion) },
    Key { name: "channel.eps_m", unit: Unit::Fixed("F/m"), slot: real!(channel.eps_m) },
    Key { name: "device.w", unit: Unit::Linear("m"), slot: real!(device.w) },
    Key { name: "device.t_s", unit: Unit::Linear("m"), slot: real!(device.t_s) },
    Key { name: "device.l_eff", unit: Unit::Linear("m"), slot: real!(device.l_eff) },
    Key { name: "device.t_ox", unit: Unit::Linear("m"), slot: real!(device.t_ox) },
    Key { name: "device.eps_ox", unit: Unit::Fixed("F/m"), slot: real!(device.eps_ox) },
    Key { name: "device.eps_nw", unit: Unit::Fixed("F/m"), slot: real!(device.eps_nw) },
    Key { name: "device.v_fb", unit: Unit::Linear("V"), slot: real!(device.v_fb) },
    Key { name: "device.n_a", unit: Unit::Fixed("m^-3"), slot: Slot::OptReal(|p| &mut p.device.n_a) },
    Key { name: "device.n_i", unit: Unit::Fixed("m^-3"), slot: Slot::OptReal(|p| &mut p.device.n_i) },
    Key { name: "device.mu_p", unit: Unit::Fixed("m^2/Vs"), slot: real!(device.mu_p) },
    Key { name: "device.v_sd", unit: Unit::Linear("V"), slot: real!(device.v_sd) },
    Key { name: "device.v_ov", unit: Unit::Linear("V"), slot: real!(device.v_ov) },
    Key { name: "device.p", unit: Unit::Fixed("m^-3"), slot: real!(device.p) },
    Key { name: "device.lambda", unit: Unit::Linear("m"), slot: real!(device.lambda_tun) },
    Key { name: "device.n_ot", unit: Unit::Fixed("eV^-1m^-3"), slot: real!(device.n_ot) },
    Key { name: "device.alpha_s", unit: Unit::Fixed("Vs/C"), slot: real!(device.alpha_s) },
    Key { name: "ligand.k1", unit: Unit::Fixed("m^3/s"), slot: real!(ligand.k1) },
    Key { name: "ligand.k_minus1", unit: Unit::Fixed("1/s"), slot: real!(ligand.k_minus1) },
    Key { name: "ligand.n_e", unit: Unit::Dimensionless, slot: real!(ligand.n_e) },
    Key { name: "ligand.rho_sr", unit: Unit::Fixed("m^-2"), slot: real!(ligand.rho_sr) },
    Key { name: "ligand.l_sr", unit: Unit::Linear("m"), slot: real!(ligand.l_sr) },
    Key { name: "ligand.n_m", unit: Unit::Dimensionless, slot: real!(ligand.n_m) },
    Key { name: "ligand.k_max", unit: Unit::Dimensionless, slot: real!(ligand.k_max) },
    Key { name: "ligand.levels", unit: Unit::Dimensionless, slot: Slot::Levels },
    Key { name: "band.f_min", unit: Unit::Linear("Hz"), slot: real!(band.f_min) },
    Key { name: "band.f_max", unit: Unit::Linear("Hz"), slot: real!(band.f_max) },
    Key { name: "band.n_points", unit: Unit::Dimensionless, slot: Slot::Count(|p| &mut p.band.n_points) },
];

/// Accepted aliases, mapped to their canonical key.
const ALIASES: &[(&str, &str)] = &[("channel.x_r", "channel.d")];

fn find_key(name: &str) -> Option<&'static Key> {
    let name = ALIASES
        .iter()
        .find(|(a, _)| *a == name)
        .map_or(name, |(_, c)| c);
    KEYS.iter().find(|k| k.name == name)
}

/// Names of every recognised config key, in serialization order.
pub fn config_keys() -> impl Iterator<Item = &'static str> {
    KEYS.iter().map(|k| k.name)
}

/// Whether `name` resolves to a scalar (sweepable) parameter.
pub fn is_scalar_key(name: &str) -> bool {
    matches!(find_key(name), Some(Key { slot: Slot::Real(_), .. }))
}

fn prefix_factor(c: char) -> Option<f64> {
    Some(match c {
        'p' => 1e-12,
        'n' => 1e-9,
        'u' | 'µ' | 'μ' => 1e-6,
        'm' => 1e-3,
        'k' => 1e3,
        _ => return None,
    })
}

/// Longest leading substring that parses as a finite float, and the rest.
fn split_number(s: &str) -> Option<(f64, &str)> {
    let mut ends: Vec<usize> = s.char_indices().map(|(i, _)| i).skip(1).collect();
    ends.push(s.len());
    ends.into_iter()
        .rev()
        .find_map(|end| s[..end].parse::<f64>().ok().map(|v| (v, &s[end..])))
        .filter(|(v, _)| v.is_finite())
}

fn suffix_factor(unit: Unit, suffix: &str) -> Option<f64> {
    let suffix = suffix.trim();
    if suffix.is_empty() {
        return Some(1.0);
    }
    match unit {
        Unit::Dimensionless => None,
        Unit::Fixed(u) => (suffix == u).then_some(1.0),
        Unit::Linear(u) => {
            if suffix == u {
                return Some(1.0);
            }
            let mut chars = suffix.chars();
            let factor = prefix_factor(chars.next()?)?;
            let rest = chars.as_str();
            (rest.is_empty() || rest == u).then_some(factor)
        }
    }
}

fn parse_scalar(key: &Key, raw: &str, line: usize) -> Result<f64, ConfigError> {
    let (v, suffix) = split_number(raw).ok_or_else(|| ConfigError::Parse {
        line,
        message: format!("`{}`: cannot parse `{raw}` as a number", key.name),
    })?;
    let factor = suffix_factor(key.unit, suffix).ok_or_else(|| ConfigError::UnitSuffix {
        line,
        key: key.name.to_string(),
        suffix: suffix.trim().to_string(),
    })?;
    Ok(v * factor)
}

fn apply_line(p: &mut Params, key: &Key, raw: &str, line: usize) -> Result<(), ConfigError> {
    match key.slot {
        Slot::Real(f) => *f(p) = parse_scalar(key, raw, line)?,
        Slot::OptReal(f) => {
            *f(p) = if raw.eq_ignore_ascii_case("none") {
                None
            } else {
                Some(parse_scalar(key, raw, line)?)
            }
        }
        Slot::Count(f) => {
            *f(p) = raw.parse::<usize>().map_err(|_| ConfigError::Parse {
                line,
                message: format!("`{}`: expected a non-negative integer, got `{raw}`", key.name),
            })?
        }
        Slot::Levels => {
            p.ligand.levels = if raw.eq_ignore_ascii_case("auto") {
                None
            } else {
                Some(
                    raw.split(',')
                        .map(|s| parse_scalar(key, s.trim(), line))
                        .collect::<Result<_, _>>()?,
                )
            }
        }
    }
    Ok(())
}

impl Params {
    /// Apply a config document on top of `self` and validate the result.
    pub fn with_config(&self, text: &str) -> Result<Params, ConfigError> {
        let p = self.apply_unchecked(text)?;
        let violations = validate(&p);
        if violations.is_empty() {
            Ok(p)
        } else {
            Err(ConfigError::Invalid(violations))
        }
    }

    /// Apply a config document without validating; used by sweeps so that
    /// out-of-domain points can be reported rather than rejected.
    pub fn apply_unchecked(&self, text: &str) -> Result<Params, ConfigError> {
        let mut p = self.clone();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (k, v) = content.split_once('=').ok_or_else(|| ConfigError::Parse {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let (k, v) = (k.trim(), v.trim());
            let key = find_key(k).ok_or_else(|| ConfigError::UnknownKey {
                line,
                key: k.to_string(),
            })?;
            if v.is_empty() {
                return Err(ConfigError::Parse {
                    line,
                    message: format!("`{k}` has no value"),
                });
            }
            apply_line(&mut p, key, v, line)?;
        }
        Ok(p)
    }

    /// Set one scalar parameter by its dotted key.
    pub fn set_scalar(&self, name: &str, value: f64) -> Result<Params, ConfigError> {
        match find_key(name) {
            Some(Key { slot: Slot::Real(f), .. }) => {
                let mut p = self.clone();
                *f(&mut p) = value;
                Ok(p)
            }
            _ => Err(ConfigError::UnknownKey {
                line: 0,
                key: name.to_string(),
            }),
        }
    }

    /// Read one scalar parameter by its dotted key.
    pub fn get_scalar(&self, name: &str) -> Option<f64> {
        match find_key(name)?.slot {
            Slot::Real(f) => Some(*f(&mut self.clone())),
            _ => None,
        }
    }

    /// Serialize every key in SI units; `load_config` of the output
    /// reproduces `self` exactly.
    pub fn to_config_text(&self) -> String {
        let mut scratch = self.clone();
        let mut out = String::new();
        for key in KEYS {
            let value = match key.slot {
                Slot::Real(f) => format!("{:e}", *f(&mut scratch)),
                Slot::OptReal(f) => match *f(&mut scratch) {
                    Some(v) => format!("{v:e}"),
                    None => "none".to_string(),
                },
                Slot::Count(f) => f(&mut scratch).to_string(),
                Slot::Levels => match &self.ligand.levels {
                    Some(v) => v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(", "),
                    None => "auto".to_string(),
                },
            };
            out.push_str(key.name);
            out.push_str(" = ");
            out.push_str(&value);
            out.push('\n');
        }
        out
    }
}

/// Parse a config document over [`defaults`]. Unspecified keys keep their
/// default value; the result is validated.
pub fn load_config(text: &str) -> Result<Params, ConfigError> {
    defaults().with_config(text)
}

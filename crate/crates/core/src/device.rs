//! Tri-gate FinFET electrical model.
//!
//! Drain current follows the charge-sheet form where the normalized
//! inversion charge at each end of the channel is a principal-branch
//! Lambert W of an exponential of the local overdrive. Current magnitudes
//! are used for the p-type device; no sign bookkeeping is done here.

use crate::constants::{BOLTZMANN, ELEMENTARY_CHARGE};
use crate::error::ModelError;
use crate::params::DeviceParams;

const MAX_ITER: usize = 64;

/// Principal branch W₀(x) for x ≥ 0: the w ≥ 0 with w·eʷ = x.
pub fn lambert_w(x: f64) -> Result<f64, ModelError> {
    if x.is_nan() || x < 0.0 {
        return Err(ModelError::NegativeLambertArgument(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if x > std::f64::consts::E {
        return Ok(lambert_w_exp(x.ln()));
    }
    Ok(halley_direct(x, x.ln_1p()))
}

/// W₀(eᶻ), evaluated without forming eᶻ when z is large.
pub fn lambert_w_exp(z: f64) -> f64 {
    if z <= 1.0 {
        let x = z.exp();
        return halley_direct(x, x.ln_1p());
    }
    // w + ln w = z
    let (l1, l2) = (z, z.ln());
    let mut w = if z > 3.0 { l1 - l2 + l2 / l1 } else { 0.5 * z };
    for _ in 0..MAX_ITER {
        let h = w + w.ln() - z;
        let d1 = 1.0 + 1.0 / w;
        let d2 = -1.0 / (w * w);
        let step = h / (d1 - 0.5 * h * d2 / d1);
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w {
            break;
        }
    }
    w
}

fn halley_direct(x: f64, mut w: f64) -> f64 {
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs() {
            break;
        }
    }
    w
}

/// 2kT/q (V).
pub fn double_thermal_voltage(temperature: f64) -> f64 {
    2.0 * BOLTZMANN * temperature / ELEMENTARY_CHARGE
}

/// Long-channel threshold voltage (V). Needs the doping and intrinsic
/// carrier concentrations, which no other result depends on.
pub fn threshold_voltage(dev: &DeviceParams, temperature: f64) -> Result<f64, ModelError> {
    let n_a = dev.n_a.ok_or(ModelError::MissingDoping("doping concentration n_a"))?;
    let n_i = dev.n_i.ok_or(ModelError::MissingDoping("intrinsic concentration n_i"))?;
    let q = ELEMENTARY_CHARGE;
    let kt = BOLTZMANN * temperature;
    let arg = q * dev.t_ox / dev.eps_ox * (n_i * n_i * dev.eps_nw / (2.0 * kt * n_a)).sqrt();
    Ok(dev.v_fb - double_thermal_voltage(temperature) * arg.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Linear,
    Invalid,
}

/// Bias point of the receiver transistor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub v_ov: f64,
    pub v_sd: f64,
    pub i_d: f64,
    pub g_fet: f64,
    pub region: Region,
}

/// Linear (triode) region: positive overdrive and V_SD within it.
pub fn region(v_ov: f64, v_sd: f64) -> Region {
    if v_ov > 0.0 && v_sd >= 0.0 && v_sd <= v_ov {
        Region::Linear
    } else {
        Region::Invalid
    }
}

fn check_linear(v_ov: f64, v_sd: f64) -> Result<(), ModelError> {
    match region(v_ov, v_sd) {
        Region::Linear => Ok(()),
        Region::Invalid => Err(ModelError::NotLinearRegion { v_ov, v_sd }),
    }
}

/// Normalized inversion charge at source and drain for overdrive `v_ov`.
fn sheet_charges(dev: &DeviceParams, temperature: f64, v_ov: f64) -> (f64, f64) {
    let vt2 = double_thermal_voltage(temperature);
    (lambert_w_exp(v_ov / vt2), lambert_w_exp((v_ov - dev.v_sd) / vt2))
}

/// µ_p · 2 W_eff / L_eff · C_ox' · (2kT/q)² (A).
fn current_scale(dev: &DeviceParams, temperature: f64) -> f64 {
    let vt2 = double_thermal_voltage(temperature);
    dev.mu_p * 2.0 * dev.w_eff() / dev.l_eff * dev.cox_per_area() * vt2 * vt2
}

/// Drain current magnitude at overdrive `v_ov` and the device's V_SD (A).
pub fn drain_current(dev: &DeviceParams, temperature: f64, v_ov: f64) -> Result<f64, ModelError> {
    check_linear(v_ov, dev.v_sd)?;
    let (qs, qd) = sheet_charges(dev, temperature, v_ov);
    Ok(current_scale(dev, temperature) * (qs - qd) * (1.0 + 0.5 * (qs + qd)))
}

/// ∂I_D/∂V_ov at fixed V_SD (A/V).
///
/// With q = W(e^{V/v}) one has dq/dV = q / ((1 + q) v), so the bracket
/// (q + q²/2) differentiates to q / v at each end.
pub fn transconductance(dev: &DeviceParams, temperature: f64, v_ov: f64) -> Result<f64, ModelError> {
    check_linear(v_ov, dev.v_sd)?;
    let (qs, qd) = sheet_charges(dev, temperature, v_ov);
    Ok(current_scale(dev, temperature) / double_thermal_voltage(temperature) * (qs - qd))
}

/// Operating point at the device's own overdrive.
pub fn operating_point(dev: &DeviceParams, temperature: f64) -> OperatingPoint {
    let region = region(dev.v_ov, dev.v_sd);
    let (i_d, g_fet) = match region {
        Region::Linear => (
            drain_current(dev, temperature, dev.v_ov).unwrap_or(f64::NAN),
            transconductance(dev, temperature, dev.v_ov).unwrap_or(f64::NAN),
        ),
        Region::Invalid => (f64::NAN, f64::NAN),
    };
    OperatingPoint {
        v_ov: dev.v_ov,
        v_sd: dev.v_sd,
        i_d,
        g_fet,
        region,
    }
}

/// Flat-band voltage noise at 1 Hz (V²/Hz); scales as 1/|f|.
///
/// Traps over the whole gated area (W + 2 t_s)·L_eff contribute. `n_ot` is
/// per eV, so kT enters in eV.
pub fn flatband_noise_1hz(dev: &DeviceParams, temperature: f64) -> f64 {
    let area = dev.w_eff() * dev.l_eff;
    let cox = dev.cox_per_area();
    let kt_ev = BOLTZMANN * temperature / ELEMENTARY_CHARGE;
    let q = ELEMENTARY_CHARGE;
    dev.lambda_tun * kt_ev * q * q * dev.n_ot / (area * cox * cox)
}

/// Correlated number/mobility fluctuation factor [1 + α_s µ_p C_ox' V_ov]².
pub fn mobility_fluctuation_factor(dev: &DeviceParams) -> f64 {
    let b = 1.0 + dev.alpha_s * dev.mu_p * dev.cox_per_area() * dev.v_ov;
    b * b
}

/// Output-referred flicker current PSD (A²/Hz) for transconductance `g_fet`.
pub fn flicker_psd(dev: &DeviceParams, temperature: f64, g_fet: f64, f: f64) -> Result<f64, ModelError> {
    if f == 0.0 {
        return Err(ModelError::ZeroFrequency);
    }
    Ok(flatband_noise_1hz(dev, temperature) / f.abs() * g_fet * g_fet * mobility_fluctuation_factor(dev))
}

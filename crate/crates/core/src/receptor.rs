//! Biorecognition: ligand transport to the fin surface, equilibrium receptor
//! occupancy and the Lorentzian binding-noise spectrum.

use std::f64::consts::PI;

use crate::error::ModelError;
use crate::params::{ChannelParams, DeviceParams, LigandParams};
use crate::transport::effective_diffusion;

/// Functionalized area covering the top and both side walls of the fin (m²).
pub fn active_area(dev: &DeviceParams) -> f64 {
    (dev.w + 2.0 * dev.t_s) * dev.l_eff
}

/// Number of receptors on the active area, rounded to an integer count.
pub fn receptor_count(dev: &DeviceParams, lig: &LigandParams) -> u64 {
    (lig.rho_sr * active_area(dev)).round() as u64
}

/// Dimensionless flow (Péclet-like) number P_s = 6 Q w_R² / (D l_ch h_ch²)
/// with Q = A_ch u and w_R the fin top width.
pub fn shear_number(ch: &ChannelParams, dev: &DeviceParams) -> f64 {
    let q = ch.area() * ch.u;
    6.0 * q * dev.w * dev.w / (effective_diffusion(ch) * ch.l_ch * ch.h_ch * ch.h_ch)
}

/// Dimensionless mass-transfer factor k_T / (D l_r) as a function of P_s.
///
/// The two fits are not continuous at P_s = 1 (about 4 % apart); the
/// high-flow branch is used there.
pub fn transport_factor(ps: f64) -> f64 {
    if ps >= 1.0 {
        0.8075 * ps.cbrt() + 0.7058 * ps.powf(-1.0 / 6.0) - 0.1984 / ps.cbrt()
    } else {
        let z = 4.885 - ps.ln();
        2.0 * PI / z * (1.0 - 0.09266 * ps / z)
    }
}

/// Transport rate of ligands to the receptor surface (m³/s).
pub fn transport_rate(ch: &ChannelParams, dev: &DeviceParams) -> Result<f64, ModelError> {
    if !(ch.u > 0.0) {
        return Err(ModelError::NoFlow);
    }
    let ps = shear_number(ch, dev);
    Ok(effective_diffusion(ch) * dev.l_eff * transport_factor(ps))
}

/// Equilibrium occupancy of `n_r` independent receptors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BindingState {
    pub n_r: u64,
    pub p_on: f64,
    pub mean: f64,
    pub variance: f64,
    /// Relaxation time (s); zero until [`BindingState::with_relaxation`].
    pub tau_b: f64,
    pub k_t: f64,
    /// Dissociation constant k₋₁/k₁ (molecules/m³).
    pub k_d: f64,
}

/// Binomial occupancy statistics at ligand concentration `rho_r`
/// (molecules/m³).
pub fn binding_stats(rho_r: f64, lig: &LigandParams, n_r: u64) -> BindingState {
    let k_d = lig.k_minus1 / lig.k1;
    let p_on = if rho_r.is_infinite() { 1.0 } else { rho_r / (rho_r + k_d) };
    let n = n_r as f64;
    BindingState {
        n_r,
        p_on,
        mean: p_on * n,
        variance: p_on * (1.0 - p_on) * n,
        tau_b: 0.0,
        k_t: f64::INFINITY,
        k_d,
    }
}

/// Relaxation time of transport-influenced binding (s).
pub fn relaxation_time(rho_r: f64, lig: &LigandParams, n_r: u64, k_t: f64) -> f64 {
    let (k1, km1) = (lig.k1, lig.k_minus1);
    let rate = k1 * rho_r + km1;
    1.0 / rate + k1 * (k1 * rho_r + n_r as f64 * km1) / (k_t * rate * rate)
}

impl BindingState {
    /// Attach the relaxation time for transport rate `k_t`.
    pub fn with_relaxation(self, rho_r: f64, lig: &LigandParams, k_t: f64) -> Self {
        Self {
            tau_b: relaxation_time(rho_r, lig, self.n_r, k_t),
            k_t,
            ..self
        }
    }

    /// Two-sided Lorentzian PSD of the bound-receptor count (count²/Hz).
    pub fn noise_psd(&self, f: f64) -> f64 {
        binding_noise_psd(self.variance, self.tau_b, f)
    }

    /// Lorentzian corner frequency 1/(2π τ_B) (Hz).
    pub fn corner_frequency(&self) -> f64 {
        1.0 / (2.0 * PI * self.tau_b)
    }
}

/// var · 2τ / (1 + (2π f τ)²); integrates to `variance` over (−∞, ∞).
pub fn binding_noise_psd(variance: f64, tau_b: f64, f: f64) -> f64 {
    let x = 2.0 * PI * f * tau_b;
    variance * 2.0 * tau_b / (1.0 + x * x)
}

/// Two-sided integral of the binding PSD over |f| ∈ [f_lo, f_hi].
pub fn binding_noise_band_power(variance: f64, tau_b: f64, f_lo: f64, f_hi: f64) -> f64 {
    let w = 2.0 * PI * tau_b;
    variance * 2.0 / PI * ((w * f_hi).atan() - (w * f_lo).atan())
}

/// Receptors are at equilibrium when the sampling window spans at least five
/// relaxation times.
pub fn equilibrium_ok(tau_p: f64, tau_b: f64) -> bool {
    tau_p >= 5.0 * tau_b
}

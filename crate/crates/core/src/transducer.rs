//! Charge-to-potential transduction at the fin surface.
//!
//! Bound ligand charge is screened by the electrolyte (Debye length) and
//! lands on a capacitor stack: oxide in series with the nanowire inversion
//! layer, in parallel with the electrolyte double layer. All three faces of
//! the fin are lumped into one stack of width W + 2 t_s.

use crate::constants::{AVOGADRO, BOLTZMANN, ELEMENTARY_CHARGE};
use crate::params::{ChannelParams, DeviceParams};

/// Electrolyte Debye length (m).
pub fn debye_length(ch: &ChannelParams) -> f64 {
    let q = ELEMENTARY_CHARGE;
    (ch.eps_m * BOLTZMANN * ch.temperature / (2.0 * AVOGADRO * q * q * ch.c_ion)).sqrt()
}

/// Mean effective charge of one ligand electron held `receptor_length` above
/// the surface (C).
pub fn effective_charge(debye: f64, receptor_length: f64) -> f64 {
    ELEMENTARY_CHARGE * (-receptor_length / debye).exp()
}

/// Screening length of the hole layer inside the nanowire (m).
pub fn nanowire_screening_length(dev: &DeviceParams, temperature: f64) -> f64 {
    let q = ELEMENTARY_CHARGE;
    (dev.eps_nw * BOLTZMANN * temperature / (dev.p * q * q)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransducerState {
    pub debye: f64,
    pub q_eff: f64,
    pub c_ox: f64,
    pub c_dl: f64,
    pub c_nw: f64,
    pub c_eq: f64,
}

impl TransducerState {
    /// Surface potential created by one bound ligand carrying `n_e`
    /// electrons (V). The total for N_B bound ligands is N_B times this.
    pub fn ligand_potential(&self, n_e: f64) -> f64 {
        self.q_eff * n_e / self.c_eq
    }
}

/// Oxide, double-layer and nanowire capacitances over the gated area and
/// their equivalent (F).
pub fn capacitance_stack(
    dev: &DeviceParams,
    ch: &ChannelParams,
    debye: f64,
    receptor_length: f64,
) -> TransducerState {
    let area = dev.w_eff() * dev.l_eff;
    let c_ox = dev.eps_ox / dev.t_ox * area;
    let c_dl = ch.eps_m / debye * area;
    let c_nw = dev.eps_nw / nanowire_screening_length(dev, ch.temperature) * area;
    TransducerState {
        debye,
        q_eff: effective_charge(debye, receptor_length),
        c_ox,
        c_dl,
        c_nw,
        c_eq: 1.0 / (1.0 / c_ox + 1.0 / c_nw) + c_dl,
    }
}

/// Convenience: full transducer state for a channel/device/receptor length.
pub fn transducer(dev: &DeviceParams, ch: &ChannelParams, receptor_length: f64) -> TransducerState {
    capacitance_stack(dev, ch, debye_length(ch), receptor_length)
}

//! Ligand propagation along the microfluidic channel.
//!
//! A pulse of `N_m` molecules spread uniformly over the cross-section at
//! x = 0, t = 0 advects with the mean flow and spreads with the Taylor–Aris
//! effective diffusion coefficient. The receiver samples the peak of the
//! pulse as it passes x = x_R.

use std::f64::consts::PI;

use crate::error::ModelError;
use crate::params::ChannelParams;

/// Taylor–Aris effective diffusion coefficient for a rectangular duct (m²/s).
///
/// Symmetric in (h_ch, l_ch); reduces to D0 when u = 0.
pub fn effective_diffusion(ch: &ChannelParams) -> f64 {
    let (h, l, u, d0) = (ch.h_ch, ch.l_ch, ch.u, ch.d0);
    let dispersion = 8.5 * u * u * h * h * l * l / (210.0 * d0 * d0 * (h * h + 2.4 * h * l + l * l));
    (1.0 + dispersion) * d0
}

/// One-dimensional advection–diffusion solution for an impulse release.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationProfile {
    /// Released molecules.
    pub n_m: f64,
    /// Channel cross-section (m²).
    pub area: f64,
    /// Effective diffusion coefficient (m²/s).
    pub d_eff: f64,
    /// Flow velocity (m/s).
    pub u: f64,
}

impl ConcentrationProfile {
    pub fn new(ch: &ChannelParams, n_m: f64) -> Self {
        Self {
            n_m,
            area: ch.area(),
            d_eff: effective_diffusion(ch),
            u: ch.u,
        }
    }

    /// Concentration at distance `x` (m) from the transmitter and time `t`
    /// (s) after release, in molecules/m³.
    pub fn concentration(&self, x: f64, t: f64) -> Result<f64, ModelError> {
        if !(t > 0.0) {
            return Err(ModelError::NonPositiveTime(t));
        }
        let spread = 4.0 * self.d_eff * t;
        let peak = self.n_m / self.area / (PI * spread).sqrt();
        let offset = x - self.u * t;
        Ok(peak * (-offset * offset / spread).exp())
    }
}

/// Time for the pulse peak to reach the receiver, x_R / u (s).
pub fn propagation_delay(ch: &ChannelParams) -> Result<f64, ModelError> {
    if ch.u > 0.0 {
        Ok(ch.x_r / ch.u)
    } else {
        Err(ModelError::NoFlow)
    }
}

/// Peak concentration sampled at the receiver for `n_m` released molecules
/// (molecules/m³).
pub fn received_concentration(ch: &ChannelParams, n_m: f64) -> Result<f64, ModelError> {
    let t_d = propagation_delay(ch)?;
    let d_eff = effective_diffusion(ch);
    Ok(n_m / (ch.area() * (4.0 * PI * d_eff * t_d).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table1() -> ChannelParams {
        ChannelParams::default()
    }

    #[test]
    fn no_flow_means_no_dispersion() {
        let ch = ChannelParams { u: 0.0, ..table1() };
        assert_eq!(effective_diffusion(&ch), ch.d0);
    }

    #[test]
    fn dispersion_at_table1() {
        // tests/golden/compute_golden.py: (1 + 8.5u²h²l²/(210 D0²(h²+2.4hl+l²)))·D0
        assert_relative_eq!(
            effective_diffusion(&table1()),
            2.001_198_308_270_676_7e-10,
            max_relative = 1e-14
        );
    }

    #[test]
    fn dispersion_fades_with_d0() {
        let mut last = f64::INFINITY;
        for k in 0..20 {
            let ch = ChannelParams {
                d0: 1e-12 * 2f64.powi(k),
                ..table1()
            };
            let ratio = effective_diffusion(&ch) / ch.d0;
            assert!(ratio >= 1.0 && ratio < last);
            last = ratio;
        }
        assert!(last - 1.0 < 1e-6);
    }

    #[test]
    fn zero_release_is_zero_everywhere() {
        let p = ConcentrationProfile::new(&table1(), 0.0);
        for (x, t) in [(0.0, 1.0), (1e-3, 100.0), (-1e-3, 5.0)] {
            assert_eq!(p.concentration(x, t).unwrap(), 0.0);
        }
    }

    #[test]
    fn peak_sits_on_the_advected_centre() {
        let p = ConcentrationProfile::new(&table1(), 5e5);
        let t = 37.0;
        let expected = 5e5 / p.area / (4.0 * PI * p.d_eff * t).sqrt();
        assert_eq!(p.concentration(p.u * t, t).unwrap(), expected);
    }

    #[test]
    fn rejects_non_positive_time() {
        let p = ConcentrationProfile::new(&table1(), 5e5);
        assert_eq!(p.concentration(0.0, 0.0), Err(ModelError::NonPositiveTime(0.0)));
        assert!(p.concentration(0.0, -1.0).is_err());
    }

    #[test]
    fn delay() {
        assert_relative_eq!(propagation_delay(&table1()).unwrap(), 100.0, max_relative = 1e-15);
        let far = ChannelParams { x_r: 1e-2, ..table1() };
        assert_relative_eq!(propagation_delay(&far).unwrap(), 1000.0, max_relative = 1e-15);
        let still = ChannelParams { u: 0.0, ..table1() };
        assert_eq!(propagation_delay(&still), Err(ModelError::NoFlow));
        assert_eq!(received_concentration(&still, 1.0), Err(ModelError::NoFlow));
    }

    #[test]
    fn received_matches_profile_at_delay() {
        let ch = table1();
        let p = ConcentrationProfile::new(&ch, 5e5);
        let t_d = propagation_delay(&ch).unwrap();
        assert_relative_eq!(
            received_concentration(&ch, 5e5).unwrap(),
            p.concentration(ch.x_r, t_d).unwrap(),
            max_relative = 1e-14
        );
        assert_eq!(received_concentration(&ch, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn received_at_table1() {
        // tests/golden/compute_golden.py: 5e5 / (A_ch · sqrt(4π · D_eff · 100 s))
        assert_relative_eq!(
            received_concentration(&table1(), 5e5).unwrap(),
            2.215_682_334_008_676_7e19,
            max_relative = 1e-13
        );
    }
}

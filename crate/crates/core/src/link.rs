//! End-to-end link: per-symbol current statistics, output noise spectrum,
//! SNR, ML decision thresholds and symbol error probability for M-ary
//! concentration shift keying.

use std::f64::consts::{PI, SQRT_2};

use crate::device::{self, OperatingPoint, Region};
use crate::error::ModelError;
use crate::params::{BandConfig, Params};
use crate::receptor::{self, BindingState};
use crate::transducer::{self, TransducerState};
use crate::transport;

/// Everything about a parameter bundle that does not depend on the number
/// of released molecules.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub params: Params,
    pub d_eff: f64,
    pub delay: f64,
    pub n_r: u64,
    pub k_t: f64,
    pub transducer: TransducerState,
    /// Surface potential per bound ligand (V).
    pub psi_l: f64,
    pub op: OperatingPoint,
    /// Output flicker PSD at 1 Hz (A²/Hz).
    pub flicker_1hz: f64,
}

impl Link {
    /// Fails when there is no flow or the transistor is not in the linear
    /// region.
    pub fn new(params: &Params) -> Result<Self, ModelError> {
        let (ch, dev, lig) = (&params.channel, &params.device, &params.ligand);
        let delay = transport::propagation_delay(ch)?;
        let k_t = receptor::transport_rate(ch, dev)?;
        let op = device::operating_point(dev, ch.temperature);
        if op.region != Region::Linear {
            return Err(ModelError::NotLinearRegion {
                v_ov: dev.v_ov,
                v_sd: dev.v_sd,
            });
        }
        let tr = transducer::transducer(dev, ch, lig.l_sr);
        let flicker_1hz = device::flicker_psd(dev, ch.temperature, op.g_fet, 1.0)?;
        Ok(Self {
            params: params.clone(),
            d_eff: transport::effective_diffusion(ch),
            delay,
            n_r: receptor::receptor_count(dev, lig),
            k_t,
            psi_l: tr.ligand_potential(lig.n_e),
            transducer: tr,
            op,
            flicker_1hz,
        })
    }

    pub fn k_d(&self) -> f64 {
        self.params.ligand.k_minus1 / self.params.ligand.k1
    }

    /// Peak ligand concentration at the receiver (molecules/m³).
    pub fn received_concentration(&self, n_m: f64) -> f64 {
        let ch = &self.params.channel;
        n_m / (ch.area() * (4.0 * PI * self.d_eff * self.delay).sqrt())
    }

    /// Receptor occupancy statistics, including τ_B, for `n_m` released.
    pub fn binding(&self, n_m: f64) -> BindingState {
        let rho = self.received_concentration(n_m);
        receptor::binding_stats(rho, &self.params.ligand, self.n_r).with_relaxation(rho, &self.params.ligand, self.k_t)
    }

    /// Gain from bound-ligand count to output current, g_FET·Ψ_L (A).
    pub fn current_per_ligand(&self) -> f64 {
        self.op.g_fet * self.psi_l
    }

    /// Mean output current change for `n_m` released molecules (A), in the
    /// closed form that folds transport and binding into one expression.
    pub fn mean_current(&self, n_m: f64) -> f64 {
        let ceiling = self.current_per_ligand() * self.n_r as f64;
        if n_m.is_infinite() {
            return ceiling;
        }
        let ch = &self.params.channel;
        let half = self.k_d() * ch.area() * (4.0 * PI * self.d_eff * ch.x_r / ch.u).sqrt();
        ceiling * n_m / (n_m + half)
    }

    /// Output current noise PSD sampled on `band`'s grid.
    pub fn noise_spectrum(&self, n_m: f64, band: &BandConfig) -> NoiseSpectrum {
        let b = self.binding(n_m);
        let gain2 = self.current_per_ligand().powi(2);
        let freqs = band.grid();
        let s_binding: Vec<f64> = freqs.iter().map(|&f| b.noise_psd(f) * gain2).collect();
        let s_flicker: Vec<f64> = freqs.iter().map(|&f| self.flicker_1hz / f.abs()).collect();
        let s_total = s_binding.iter().zip(&s_flicker).map(|(a, b)| a + b).collect();
        NoiseSpectrum {
            freqs,
            s_binding,
            s_flicker,
            s_total,
            band: band.clone(),
            binding_variance: b.variance * gain2,
            tau_b: b.tau_b,
            flicker_1hz: self.flicker_1hz,
        }
    }

    /// Band-integrated output current variance at the bundle's band (A²).
    pub fn current_variance(&self, n_m: f64) -> f64 {
        current_variance(&self.noise_spectrum(n_m, &self.params.band))
    }

    pub fn snr(&self, n_m: f64) -> f64 {
        let mu = self.mean_current(n_m);
        mu * mu / self.current_variance(n_m)
    }

    pub fn snr_db(&self, n_m: f64) -> f64 {
        10.0 * self.snr(n_m).log10()
    }

    /// Statistics of the `m_ary` symbols under the bundle's level mapping.
    pub fn symbol_stats(&self, m_ary: usize) -> Result<SymbolStats, ModelError> {
        if m_ary < 2 {
            return Err(ModelError::AlphabetSize(m_ary));
        }
        let levels = self.params.ligand.levels(m_ary);
        if levels.len() != m_ary {
            return Err(ModelError::LevelCount {
                got: levels.len(),
                expected: m_ary,
            });
        }
        let mu = levels.iter().map(|&n| self.mean_current(n)).collect();
        let sigma2 = levels.iter().map(|&n| self.current_variance(n)).collect();
        let mut stats = SymbolStats::new(mu, sigma2)?;
        stats.levels = levels;
        Ok(stats)
    }
}

/// Sampled output-referred current noise PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpectrum {
    pub freqs: Vec<f64>,
    pub s_binding: Vec<f64>,
    pub s_flicker: Vec<f64>,
    pub s_total: Vec<f64>,
    pub band: BandConfig,
    /// Binding-noise current variance over all frequencies (A²).
    pub binding_variance: f64,
    pub tau_b: f64,
    pub flicker_1hz: f64,
}

impl NoiseSpectrum {
    pub fn binding_at(&self, f: f64) -> f64 {
        receptor::binding_noise_psd(self.binding_variance, self.tau_b, f)
    }

    pub fn flicker_at(&self, f: f64) -> f64 {
        self.flicker_1hz / f.abs()
    }

    /// Frequencies where binding and flicker noise are equal, bracketed on
    /// the grid and refined by bisection.
    pub fn crossovers(&self) -> Vec<f64> {
        let diff = |f: f64| (self.binding_at(f) / self.flicker_at(f)).ln();
        let mut out = Vec::new();
        for w in self.freqs.windows(2) {
            let (mut lo, mut hi) = (w[0], w[1]);
            let (dlo, dhi) = (diff(lo), diff(hi));
            if dlo == 0.0 {
                out.push(lo);
                continue;
            }
            if dlo.signum() == dhi.signum() || dhi == 0.0 {
                continue;
            }
            for _ in 0..200 {
                let mid = (lo * hi).sqrt();
                if mid <= lo || mid >= hi {
                    break;
                }
                if diff(mid).signum() == dlo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push((lo * hi).sqrt());
        }
        out
    }
}

/// Integral of samples `s` over the grid `freqs` in the log variable:
/// ∫ S df = ∫ f S(f) d(ln f). Composite Simpson when the grid is uniform
/// in ln f with an even interval count, trapezoid otherwise.
pub fn log_integral(freqs: &[f64], s: &[f64]) -> f64 {
    let n = freqs.len();
    if n < 2 {
        return 0.0;
    }
    let y: Vec<f64> = freqs.iter().zip(s).map(|(f, s)| f * s).collect();
    let x: Vec<f64> = freqs.iter().map(|f| f.ln()).collect();
    let h = (x[n - 1] - x[0]) / (n - 1) as f64;
    let uniform = x.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
    if uniform && (n - 1).is_multiple_of(2) {
        let mut acc = y[0] + y[n - 1];
        for (i, v) in y.iter().enumerate().take(n - 1).skip(1) {
            acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        acc * h / 3.0
    } else {
        x.windows(2)
            .zip(y.windows(2))
            .map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1]))
            .sum()
    }
}

/// σ²_I = 2 ∫_{f_min}^{f_max} S_total df: the two-sided PSD folded onto
/// positive frequencies.
pub fn current_variance(spectrum: &NoiseSpectrum) -> f64 {
    2.0 * log_integral(&spectrum.freqs, &spectrum.s_total)
}

/// Per-symbol Gaussian current statistics and their ML thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolStats {
    pub m: usize,
    /// Released molecules per symbol, when built from a link.
    pub levels: Vec<f64>,
    pub mu: Vec<f64>,
    pub sigma2: Vec<f64>,
    pub thresholds: Vec<f64>,
}

impl SymbolStats {
    /// Means must be non-decreasing; equal adjacent means need equal
    /// variances.
    pub fn new(mu: Vec<f64>, sigma2: Vec<f64>) -> Result<Self, ModelError> {
        let thresholds = ml_thresholds(&mu, &sigma2)?;
        Ok(Self {
            m: mu.len(),
            levels: Vec::new(),
            mu,
            sigma2,
            thresholds,
        })
    }

    pub fn sep(&self) -> f64 {
        sep(self)
    }
}

fn check_stats(mu: &[f64], sigma2: &[f64]) -> Result<(), ModelError> {
    if mu.len() < 2 {
        return Err(ModelError::AlphabetSize(mu.len()));
    }
    if mu.len() != sigma2.len() {
        return Err(ModelError::InvalidStats(format!(
            "{} means but {} variances",
            mu.len(),
            sigma2.len()
        )));
    }
    if let Some(i) = sigma2.iter().position(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(ModelError::InvalidStats(format!("variance {i} is {}", sigma2[i])));
    }
    if let Some(i) = mu.iter().position(|m| !m.is_finite()) {
        return Err(ModelError::InvalidStats(format!("mean {i} is {}", mu[i])));
    }
    for i in 1..mu.len() {
        if mu[i] < mu[i - 1] {
            return Err(ModelError::InvalidStats(format!("mean {i} is below mean {}", i - 1)));
        }
        if mu[i] == mu[i - 1] && !same_variance(sigma2[i - 1], sigma2[i]) {
            return Err(ModelError::InvalidStats(format!(
                "means {} and {i} coincide with different variances",
                i - 1
            )));
        }
    }
    Ok(())
}

fn same_variance(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.max(b)
}

/// Threshold between two adjacent Gaussian symbols where their likelihoods
/// are equal.
///
/// With equal variances this is the midpoint. Otherwise the likelihood
/// equality is a quadratic with one root on each side of the narrower
/// Gaussian's mean; the root facing the wider symbol is returned. It lies in
/// (μ₀, μ₁) whenever such a root exists.
pub fn pair_threshold(mu0: f64, mu1: f64, s0: f64, s1: f64) -> f64 {
    if same_variance(s0, s1) {
        return 0.5 * (mu0 + mu1);
    }
    let delta = mu1 - mu0;
    // In the offset y from the narrower mean: a y² + b y + c = 0 with a > 0,
    // b ≥ 0, c < 0, so the positive root −2c / (b + √disc) is cancellation-free.
    let (narrow, wide) = if s0 < s1 { (s0, s1) } else { (s1, s0) };
    let a = wide - narrow;
    let b = 2.0 * delta * narrow;
    let c = -delta * delta * narrow - narrow * wide * (wide / narrow).ln();
    let y = -2.0 * c / (b + (b * b - 4.0 * a * c).sqrt());
    if s0 < s1 {
        mu0 + y
    } else {
        mu1 - y
    }
}

/// ML thresholds λ₁..λ_{M−1} between adjacent symbols.
pub fn ml_thresholds(mu: &[f64], sigma2: &[f64]) -> Result<Vec<f64>, ModelError> {
    check_stats(mu, sigma2)?;
    let t: Vec<f64> = (1..mu.len())
        .map(|i| pair_threshold(mu[i - 1], mu[i], sigma2[i - 1], sigma2[i]))
        .collect();
    for i in 1..t.len() {
        if !(t[i] > t[i - 1]) {
            return Err(ModelError::NoThreshold { lower: i, upper: i + 1 });
        }
    }
    Ok(t)
}

/// Symbol error probability of equiprobable symbols under the thresholds.
pub fn sep(stats: &SymbolStats) -> f64 {
    let (mu, lam) = (&stats.mu, &stats.thresholds);
    let m = mu.len();
    let sd: Vec<f64> = stats.sigma2.iter().map(|s| s.sqrt() * SQRT_2).collect();
    let mut acc = libm::erfc((lam[0] - mu[0]) / sd[0]) + libm::erfc((mu[m - 1] - lam[m - 2]) / sd[m - 1]);
    for i in 1..m - 1 {
        acc += libm::erfc((mu[i] - lam[i - 1]) / sd[i]) + libm::erfc((lam[i] - mu[i]) / sd[i]);
    }
    acc / (2.0 * m as f64)
}

/// Convenience: statistics for `params` at alphabet size `m_ary`.
pub fn symbol_stats(params: &Params, m_ary: usize) -> Result<SymbolStats, ModelError> {
    Link::new(params)?.symbol_stats(m_ary)
}

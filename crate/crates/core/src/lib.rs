//! Link-level model of a molecular-communication channel: a rectangular
//! microfluidic duct carrying ligand pulses to a tri-gate (FinFET) silicon
//! nanowire biosensor.
//!
//! The pipeline runs
//! [`transport`] → [`receptor`] → [`transducer`] → [`device`] → [`link`]:
//! released molecules disperse along the channel, bind surface receptors,
//! shift the gate surface potential, and modulate the drain current. The
//! [`link`] module assembles per-symbol statistics, noise spectra, SNR and
//! M-CSK symbol error probability; [`oracle`] cross-checks the analytic
//! error probability by Monte-Carlo sampling.

pub mod constants;
pub mod device;
pub mod error;
pub mod link;
pub mod oracle;
pub mod params;
pub mod receptor;
pub mod transducer;
pub mod transport;

pub use error::{ConfigError, ModelError};
pub use link::{Link, NoiseSpectrum, SymbolStats};
pub use params::{BandConfig, ChannelParams, DeviceParams, LigandParams, Params, Violation};

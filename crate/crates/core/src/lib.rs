//! Monte Carlo simulator for zero-forcing precoding by two transmitters that
//! each hold their own (imperfect) estimate of a 2×2 MISO broadcast channel.
//!
//! Precoding schemes live in [`precoding`], channel-estimate models in [`csi`],
//! the SNR sweep and slope fit in [`engine`], and the quantization-distortion
//! checks in [`bounds`].

pub mod bounds;
pub mod channel;
pub mod config;
pub mod csi;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod numerics;
pub mod precoding;
pub mod report;
pub mod rng;

pub use channel::ChannelPair;
pub use config::parse_config;
pub use csi::{CsiModel, CsiQuality};
pub use engine::{estimate_mg, run_sweep, MgEstimate, SweepConfig, SweepRecord};
pub use error::{Error, Result};
pub use experiment::{Experiment, Preset};
pub use precoding::{Precoder, Scheme, SchemeConfig};

//! Coalitional beamforming games in the multi-user MISO interference channel.
//!
//! Links are players. Each transmitter picks a unit-norm beamformer; links in a
//! coalition zero-force (or Wiener-filter) each other while outsiders play
//! maximum-ratio transmission. The crate provides channel generation, the
//! beamformers, achievable rates, an exact analysis of when the ε-core of the
//! game is empty, a merge-only coalition formation algorithm, and exact counts
//! of the deviations involved.

pub mod beamforming;
pub mod coalition;
pub mod combinatorics;
pub mod config;
pub mod core_analysis;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod formation;
pub mod output;
pub mod rates;
pub mod scenario;

pub use beamforming::{Beamformer, BfScheme, StrategyProfile};
pub use coalition::{Coalition, CoalitionStructure, LinkId};
pub use core_analysis::{CoreFlavor, CoreReport};
pub use error::{Error, Result};
pub use exec::Execution;
pub use formation::{FormationResult, OverheadModel};
pub use scenario::{ChannelSet, NoisePower, Scenario};

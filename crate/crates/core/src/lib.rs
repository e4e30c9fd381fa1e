//! Influence maximization under the independent cascade model, solved by
//! co-evolving one population per cheap spread proxy (EDV, TIS) with
//! overlap-driven knowledge transfer between the populations.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`] – immutable CSR networks, edge-list IO and the GN benchmark generator.
//! * [`diffusion`] – Monte Carlo IC spread estimation and an exact live-edge oracle.
//! * [`proxy`] – the EDV and TIS transformations.
//! * [`evo`] – seed-set genomes, warm start, crossover, mutation, repair, elitism.
//! * [`mtefim`] – the multi-transformation solver, relationship estimation,
//!   transfer, and output selection (SOSS / MCSS).
//! * [`baselines`] – degree, PageRank, degree discount, CELF, single-proxy EAs.
//! * [`bench`] – rank statistics and the experiment harness.
//! * [`cli`] – the `mtefim` command line (behind the `cli` feature).

pub mod baselines;
pub mod bench;
#[cfg(feature = "cli")]
pub mod cli;
pub mod diffusion;
pub mod error;
pub mod evo;
pub mod graph;
pub mod mtefim;
pub mod proxy;
pub mod seeds;

pub use error::{Error, Result};
pub use graph::{Network, NodeId};

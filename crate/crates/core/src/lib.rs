//! Wireless link scheduling under the SINR interference model, built around a
//! conflict-graph relaxation of cumulative interference.
//!
//! The crate models sets of geometric communication links whose transmissions
//! succeed when their signal-to-interference ratio clears a per-link
//! threshold. Cumulative interference makes scheduling problems awkward to
//! work with directly, so the central construction here is a family of
//! pairwise conflict graphs whose independent sets are guaranteed feasible
//! under a matching oblivious power assignment. On top of the graphs sit the
//! scheduling algorithms themselves: first-fit coloring for TDMA, a
//! local-ratio weighted independent set solver, greedy multi-channel
//! selection, rate-control expansion into fixed-weight replicas, and the
//! multi-channel multi-antenna (MC-MA) virtual-link construction.
//!
//! The crate is `no_std`-compatible (`alloc` required): disable default
//! features and enable `libm` for builds without the standard library.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("linksched-core needs either the `std` or the `libm` feature");

extern crate alloc;

mod math;

pub mod error;
pub mod graph;
pub mod mcma;
pub mod model;
pub mod rate;
pub mod schedule;

pub use error::{Error, Result};
pub use graph::{
    choose_tau, delta_min, f_adjacent, tau_interval, Adjacency, ConflictFn, ConflictGraph,
    GraphParams,
};
pub use model::{
    directed_distance, is_feasible, is_pair_feasible, link_distance, sir, tau_interference,
    FeasibilityReport, Instance, Link, LinkId, Point, PowerAssignment, DEFAULT_TOL,
};
pub use schedule::{
    first_fit_coloring, greedy_multichannel, inductive_order, local_ratio_mwis,
    measure_inductive_independence, partition_feasible, ChannelAssignment, Coloring,
    InductiveIndependence, WeightedSolution,
};

//! Capacitated cost-sharing connection games.
//!
//! Agents route unit demands along capacitated paths of a directed graph
//! and split each edge's cost through a per-edge share table. The crate
//! computes agent and social costs exactly over the rationals, runs
//! potential-decreasing improvement dynamics, enumerates equilibria at desk
//! scale and reports exact price-of-anarchy and price-of-stability values
//! together with the bounds they are expected to satisfy.

pub mod analysis;
pub mod constructive;
pub mod document;
pub mod dynamics;
pub mod error;
pub mod extension;
pub mod flow;
pub mod game;
pub mod graph;
pub mod instances;
pub mod rational;
pub mod scheme;
pub mod suite;

pub use error::{Error, Result};
pub use game::{GameInstance, StrategyProfile, Terminals};
pub use graph::{EdgeId, Graph, GraphClass, NodeId, Path, SpExpr};
pub use rational::{Cost, RatioValue, Rational};
pub use scheme::CostSharingScheme;

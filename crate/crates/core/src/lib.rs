//! Exact engine for the max k-cut game on undirected, unweighted graphs.
//!
//! - [`graph`]: bit-packed graphs, Erdős–Rényi sampling, labeled enumeration.
//! - [`game`]: colorings, payoffs, cut values and coalition quantities.
//! - [`solver`]: exact max k-cut by branch and bound, enumeration of optima,
//!   local search, and the color-class brute force behind the `P_C` table.
//! - [`equilibrium`]: Nash and q-strong equilibrium checks, strong-deviation
//!   search, minimality, and audits of minimal deviations.
//! - [`dynamics`]: best-response and coalition-improvement dynamics.

pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod graph;
pub mod io;
pub mod solver;

pub use error::{DynamicsError, EquilibriumError, GameError, GraphError, SolverError};
pub use game::{Color, Coloring, CutReport};
pub use graph::{Graph, RandomGraphSpec, VertexSet};

//! Named instances used by the regressions.
//!
//! The six-player worked example lists only its cut edges; exactly one
//! monochromatic edge at `v1` is missing from that list. Both candidates,
//! `{v1, v3}` and `{v1, v6}`, reproduce every stated payoff and cut value.

use serde::{Deserialize, Serialize};

use crate::game::{Color, Coloring};
use crate::graph::Graph;
use crate::io::GraphDocument;

pub const RED: Color = 1;
pub const BLUE: Color = 2;
pub const GREEN: Color = 3;

/// Which missing edge completes the worked example.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reconstruction {
    /// Canonical fixture: the extra edge is `{v1, v3}`.
    V1V3,
    V1V6,
}

impl Reconstruction {
    pub const ALL: [Reconstruction; 2] = [Reconstruction::V1V3, Reconstruction::V1V6];

    pub fn extra_edge(self) -> (usize, usize) {
        match self {
            Reconstruction::V1V3 => (0, 2),
            Reconstruction::V1V6 => (0, 5),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Reconstruction::V1V3 => "v1v3",
            Reconstruction::V1V6 => "v1v6",
        }
    }
}

/// The cut edges of σ in the worked example, 0-based.
pub const FIGURE1_CUT_EDGES: [(usize, usize); 8] =
    [(0, 1), (0, 3), (1, 2), (2, 3), (2, 4), (3, 4), (3, 5), (4, 5)];

#[derive(Clone, Debug)]
pub struct Figure1 {
    pub graph: Graph,
    pub names: Vec<String>,
    /// (red, blue, red, blue, green, red)
    pub sigma: Coloring,
    /// (green, blue, green, blue, red, red)
    pub gamma: Coloring,
}

impl Figure1 {
    pub fn document(&self) -> GraphDocument {
        GraphDocument {
            graph: self.graph.clone(),
            k: Some(3),
            names: Some(self.names.clone()),
            sigma: Some(self.sigma.as_slice().to_vec()),
        }
    }
}

pub fn figure1(reconstruction: Reconstruction) -> Figure1 {
    let edges = FIGURE1_CUT_EDGES.iter().copied().chain([reconstruction.extra_edge()]);
    Figure1 {
        graph: Graph::from_edges(6, edges).expect("fixture edges are valid"),
        names: (1..=6).map(|i| format!("v{i}")).collect(),
        sigma: Coloring::new(vec![RED, BLUE, RED, BLUE, GREEN, RED], 3).expect("valid"),
        gamma: Coloring::new(vec![GREEN, BLUE, GREEN, BLUE, RED, RED], 3).expect("valid"),
    }
}

pub fn color_name(c: Color) -> String {
    match c {
        RED => "red".into(),
        BLUE => "blue".into(),
        GREEN => "green".into(),
        other => format!("c{other}"),
    }
}

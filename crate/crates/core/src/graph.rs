//! Undirected simple graphs with bit-packed adjacency rows.
//!
//! Every vertex row is a single `u64` word, so neighborhood intersections
//! (triangle tests, per-color degrees) are one `AND` plus a popcount. The
//! engine targets exhaustive work on small graphs; `MAX_VERTICES` bounds `n`.

use std::fmt;

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// Largest supported vertex count (one adjacency word per vertex).
pub const MAX_VERTICES: usize = 64;

/// Largest `n` accepted by [`enumerate_graphs`]: the pair set must fit a word.
pub const MAX_ENUMERATION_VERTICES: usize = 11;

/// A set of vertex indices `0..64`, stored as a bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<usize>", try_from = "Vec<usize>")]
pub struct VertexSet(u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        VertexSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_VERTICES);
        if n == MAX_VERTICES {
            VertexSet(u64::MAX)
        } else {
            VertexSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(1u64 << v)
    }

    #[inline]
    pub fn contains(self, v: usize) -> bool {
        v < MAX_VERTICES && self.0 >> v & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, v: usize) {
        self.0 |= 1u64 << v;
    }

    #[inline]
    pub fn remove(&mut self, v: usize) {
        self.0 &= !(1u64 << v);
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn union(self, other: Self) -> Self {
        VertexSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: Self) -> Self {
        VertexSet(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: Self) -> Self {
        VertexSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// Largest member plus one, or 0 for the empty set.
    pub fn upper_bound(self) -> usize {
        MAX_VERTICES - self.0.leading_zeros() as usize
    }

    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Members in increasing order.
    pub fn iter(self) -> VertexIter {
        VertexIter(self.0)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = VertexSet::EMPTY;
        for v in iter {
            set.insert(v);
        }
        set
    }
}

impl IntoIterator for VertexSet {
    type Item = usize;
    type IntoIter = VertexIter;

    fn into_iter(self) -> VertexIter {
        self.iter()
    }
}

impl From<VertexSet> for Vec<usize> {
    fn from(set: VertexSet) -> Self {
        set.iter().collect()
    }
}

impl TryFrom<Vec<usize>> for VertexSet {
    type Error = GraphError;

    fn try_from(members: Vec<usize>) -> Result<Self, GraphError> {
        let mut set = VertexSet::EMPTY;
        for v in members {
            if v >= MAX_VERTICES {
                return Err(GraphError::TooManyVertices(v + 1));
            }
            set.insert(v);
        }
        Ok(set)
    }
}

#[derive(Clone, Debug)]
pub struct VertexIter(u64);

impl Iterator for VertexIter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(v)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let len = self.0.count_ones() as usize;
        (len, Some(len))
    }
}

impl ExactSizeIterator for VertexIter {}

/// Undirected graph on vertices `0..n` without self-loops or parallel edges.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    rows: Vec<u64>,
}

impl Graph {
    /// Graph with `n` isolated vertices.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        if n > MAX_VERTICES {
            return Err(GraphError::TooManyVertices(n));
        }
        Ok(Graph { n, rows: vec![0; n] })
    }

    /// Builds a graph from an edge list, rejecting self-loops, repeated pairs
    /// and out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(n)?;
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let mut g = Graph::empty(n)?;
        for u in 0..n {
            g.rows[u] = VertexSet::full(n).bits() & !(1u64 << u);
        }
        Ok(g)
    }

    /// Complete bipartite graph with sides `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Result<Self, GraphError> {
        Graph::from_edges(a + b, (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))))
    }

    /// Path `0 - 1 - .. - (n-1)`.
    pub fn path(n: usize) -> Result<Self, GraphError> {
        Graph::from_edges(n, (1..n).map(|v| (v - 1, v)))
    }

    /// Disjoint union; the vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Result<Self, GraphError> {
        let shift = self.n;
        Graph::from_edges(
            self.n + other.n,
            self.edges().chain(other.edges().map(|(u, v)| (u + shift, v + shift))),
        )
    }

    fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.rows[u] >> v & 1 == 1 {
            return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
        }
        self.rows[u] |= 1u64 << v;
        self.rows[v] |= 1u64 << u;
        Ok(())
    }

    pub fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { v, n: self.n })
        }
    }

    pub fn check_set(&self, set: VertexSet) -> Result<(), GraphError> {
        match set.difference(self.vertices()).first() {
            None => Ok(()),
            Some(v) => Err(GraphError::VertexOutOfRange { v, n: self.n }),
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    /// Neighborhood of `v`. Panics if `v >= n`.
    #[inline]
    pub fn neighbors(&self, v: usize) -> VertexSet {
        VertexSet(self.rows[v])
    }

    pub fn degree(&self, v: usize) -> Result<usize, GraphError> {
        self.check_vertex(v)?;
        Ok(self.rows[v].count_ones() as usize)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.rows[u] >> v & 1 == 1
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            VertexSet(self.rows[u] & !((2u64 << u) - 1)).iter().map(move |v| (u, v))
        })
    }

    /// Number of edges with both endpoints in `set`.
    pub fn edges_within(&self, set: VertexSet) -> usize {
        set.iter().map(|v| (self.rows[v] & set.bits()).count_ones() as usize).sum::<usize>() / 2
    }

    pub fn contains_triangle(&self) -> bool {
        self.edges().any(|(u, v)| self.rows[u] & self.rows[v] != 0)
    }

    /// The subgraph induced by `set`, reindexed to `0..|set|`. The returned
    /// map sends each new index to its original vertex.
    pub fn induced_subgraph(&self, set: VertexSet) -> Result<(Graph, Vec<usize>), GraphError> {
        self.check_set(set)?;
        let index_map: Vec<usize> = set.iter().collect();
        let mut position = [usize::MAX; MAX_VERTICES];
        for (i, &v) in index_map.iter().enumerate() {
            position[v] = i;
        }
        let sub = Graph::from_edges(
            index_map.len(),
            self.edges()
                .filter(|&(u, v)| set.contains(u) && set.contains(v))
                .map(|(u, v)| (position[u], position[v])),
        )?;
        Ok((sub, index_map))
    }

    /// Whether the subgraph induced by `set` is connected. The empty set
    /// counts as connected.
    pub fn is_connected_within(&self, set: VertexSet) -> bool {
        let Some(start) = set.first() else {
            return true;
        };
        let mut reached = VertexSet::singleton(start);
        let mut frontier = reached;
        while !frontier.is_empty() {
            let mut next = VertexSet::EMPTY;
            for v in frontier {
                next = next.union(self.neighbors(v));
            }
            frontier = next.intersection(set).difference(reached);
            reached = reached.union(frontier);
        }
        reached == set
    }

    /// True iff `set` induces a connected subgraph and no edge leaves it.
    pub fn is_isolated_component(&self, set: VertexSet) -> Result<bool, GraphError> {
        self.check_set(set)?;
        if set.is_empty() {
            return Err(GraphError::EmptySet);
        }
        let leaves = set.iter().any(|v| !self.neighbors(v).is_subset(set));
        Ok(!leaves && self.is_connected_within(set))
    }

    /// Relabels vertices: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Graph, GraphError> {
        if perm.len() != self.n {
            return Err(GraphError::InvalidPermutation);
        }
        let image: VertexSet = perm.iter().copied().collect();
        if perm.iter().any(|&v| v >= self.n) || image.len() != self.n {
            return Err(GraphError::InvalidPermutation);
        }
        Graph::from_edges(self.n, self.edges().map(|(u, v)| (perm[u], perm[v])))
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// Parameters of a G(n, p) random graph with `p = avg_degree / (n - 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomGraphSpec {
    pub n: usize,
    pub avg_degree: f64,
    pub seed: u64,
}

impl RandomGraphSpec {
    pub fn edge_probability(&self) -> Result<f64, GraphError> {
        let p = if self.n <= 1 {
            if self.avg_degree == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.avg_degree / (self.n - 1) as f64
        };
        if !(0.0..=1.0).contains(&p) {
            return Err(GraphError::InvalidProbability(p));
        }
        Ok(p)
    }
}

/// Samples an Erdős–Rényi graph.
///
/// Generator: ChaCha8 seeded with `seed_from_u64(seed)`. Pairs `(u, v)`,
/// `u < v`, are visited in lexicographic order; each draws one `u64` `x` and
/// the edge is kept iff `(x >> 11) * 2^-53 < p`.
pub fn generate_er(spec: &RandomGraphSpec) -> Result<Graph, GraphError> {
    let p = spec.edge_probability()?;
    if spec.n > MAX_VERTICES {
        return Err(GraphError::TooManyVertices(spec.n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut g = Graph::empty(spec.n)?;
    for u in 0..spec.n {
        for v in u + 1..spec.n {
            let x = rng.next_u64();
            if (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64) < p {
                g.add_edge(u, v)?;
            }
        }
    }
    Ok(g)
}

fn vertex_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

/// Every labeled simple graph on `n` vertices with exactly `m` edges, in
/// increasing order of the edge-subset bitmask (pairs in lexicographic order).
pub fn enumerate_graphs(n: usize, m: usize) -> Result<GraphEnumeration, GraphError> {
    if n > MAX_ENUMERATION_VERTICES {
        return Err(GraphError::TooManyVertices(n));
    }
    let pairs = vertex_pairs(n);
    if m > pairs.len() {
        return Err(GraphError::EdgeCountOutOfRange { m, max: pairs.len() });
    }
    let next = if m == 0 { Some(0) } else { Some((1u64 << m) - 1) };
    Ok(GraphEnumeration { n, pairs, next, fixed_m: true })
}

/// Every labeled simple graph on `n` vertices (all `2^(n(n-1)/2)` of them).
pub fn enumerate_all_graphs(n: usize) -> Result<GraphEnumeration, GraphError> {
    if n > 8 {
        return Err(GraphError::TooManyVertices(n));
    }
    Ok(GraphEnumeration { n, pairs: vertex_pairs(n), next: Some(0), fixed_m: false })
}

/// Lazy stream of labeled graphs; see [`enumerate_graphs`].
#[derive(Clone, Debug)]
pub struct GraphEnumeration {
    n: usize,
    pairs: Vec<(usize, usize)>,
    next: Option<u64>,
    fixed_m: bool,
}

impl GraphEnumeration {
    fn build(&self, mask: u64) -> Graph {
        let mut rows = vec![0u64; self.n];
        for bit in VertexSet(mask) {
            let (u, v) = self.pairs[bit];
            rows[u] |= 1 << v;
            rows[v] |= 1 << u;
        }
        Graph { n: self.n, rows }
    }
}

impl Iterator for GraphEnumeration {
    type Item = Graph;

    fn next(&mut self) -> Option<Graph> {
        let mask = self.next?;
        let limit = 1u128 << self.pairs.len();
        if mask as u128 >= limit {
            self.next = None;
            return None;
        }
        self.next = if self.fixed_m {
            if mask == 0 {
                None
            } else {
                // Gosper's hack: next larger word with the same popcount.
                let c = mask & mask.wrapping_neg();
                let r = mask + c;
                let succ = (((r ^ mask) >> 2) / c) | r;
                (r != 0 && (succ as u128) < limit).then_some(succ)
            }
        } else {
            mask.checked_add(1)
        };
        Some(self.build(mask))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn degrees() {
        let empty = Graph::empty(4).unwrap();
        assert!((0..4).all(|v| empty.degree(v).unwrap() == 0));
        let k3 = Graph::complete(3).unwrap();
        assert!((0..3).all(|v| k3.degree(v).unwrap() == 2));
        assert_eq!(k3.m(), 3);
        assert!(matches!(k3.degree(3), Err(GraphError::VertexOutOfRange { v: 3, n: 3 })));
    }

    #[test]
    fn rejects_malformed_edges() {
        assert!(matches!(Graph::from_edges(3, [(1, 1)]), Err(GraphError::SelfLoop(1))));
        assert!(matches!(Graph::from_edges(3, [(0, 1), (1, 0)]), Err(GraphError::DuplicateEdge(0, 1))));
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
        assert!(Graph::empty(65).is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_graphs(5, 7).unwrap().count(), 120);
        let k3: Vec<_> = enumerate_graphs(3, 3).unwrap().collect();
        assert_eq!(k3, vec![Graph::complete(3).unwrap()]);
        assert!(enumerate_graphs(2, 2).is_err());
        assert_eq!(enumerate_graphs(2, 1).unwrap().count(), 1);
        assert_eq!(enumerate_graphs(4, 0).unwrap().count(), 1);
        for n in 0..=5usize {
            let pairs = (n * n.saturating_sub(1) / 2) as u64;
            for m in 0..=pairs {
                let all: Vec<_> = enumerate_graphs(n, m as usize).unwrap().collect();
                assert_eq!(all.len() as u64, binomial(pairs, m), "n={n} m={m}");
                assert!(all.iter().all(|g| g.m() == m as usize));
                let distinct: std::collections::HashSet<_> = all.iter().collect();
                assert_eq!(distinct.len(), all.len());
            }
            assert_eq!(enumerate_all_graphs(n).unwrap().count() as u64, 1 << pairs);
        }
    }

    #[test]
    fn triangles() {
        assert!(Graph::complete(3).unwrap().contains_triangle());
        let k23 = Graph::complete_bipartite(2, 3).unwrap();
        assert_eq!(k23.m(), 6);
        assert!(!k23.contains_triangle());
    }

    #[test]
    fn triangle_free_maximum_on_five_vertices() {
        let densest = (0..=10)
            .filter(|&m| enumerate_graphs(5, m).unwrap().any(|g| !g.contains_triangle()))
            .max();
        assert_eq!(densest, Some(6));
    }

    #[test]
    fn induced_subgraphs() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let (same, map) = g.induced_subgraph(g.vertices()).unwrap();
        assert_eq!(same, g);
        assert_eq!(map, vec![0, 1, 2, 3, 4]);
        let (empty, map) = g.induced_subgraph(VertexSet::EMPTY).unwrap();
        assert_eq!(empty.n(), 0);
        assert!(map.is_empty());
        let (sub, map) = g.induced_subgraph([1, 2, 4].into_iter().collect()).unwrap();
        assert_eq!(map, vec![1, 2, 4]);
        assert_eq!(sub.edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert!(g.induced_subgraph(VertexSet::singleton(7)).is_err());
    }

    #[test]
    fn isolated_components() {
        let g = Graph::complete(3).unwrap().disjoint_union(&Graph::complete(2).unwrap()).unwrap();
        assert!(g.is_isolated_component([0, 1, 2].into_iter().collect()).unwrap());
        assert!(g.is_isolated_component([3, 4].into_iter().collect()).unwrap());
        assert!(!g.is_isolated_component([0, 1].into_iter().collect()).unwrap());
        assert!(!g.is_isolated_component([0, 3].into_iter().collect()).unwrap());
        assert!(matches!(g.is_isolated_component(VertexSet::EMPTY), Err(GraphError::EmptySet)));

        let path = Graph::path(5).unwrap();
        for bits in 1..(1u64 << 5) - 1 {
            assert!(!path.is_isolated_component(VertexSet::from_bits(bits)).unwrap());
        }
    }

    #[test]
    fn er_extremes_and_determinism() {
        let full = generate_er(&RandomGraphSpec { n: 15, avg_degree: 14.0, seed: 9 }).unwrap();
        assert_eq!(full, Graph::complete(15).unwrap());
        let none = generate_er(&RandomGraphSpec { n: 15, avg_degree: 0.0, seed: 9 }).unwrap();
        assert_eq!(none.m(), 0);
        let spec = RandomGraphSpec { n: 15, avg_degree: 5.0, seed: 42 };
        assert_eq!(generate_er(&spec).unwrap(), generate_er(&spec).unwrap());
        assert!(generate_er(&RandomGraphSpec { n: 15, avg_degree: 15.0, seed: 0 }).is_err());
        assert!(generate_er(&RandomGraphSpec { n: 15, avg_degree: -1.0, seed: 0 }).is_err());
    }

    #[test]
    fn er_mean_edge_count() {
        // m ~ Binomial(105, 5/14): mean 37.5, sd sqrt(105 p (1-p)).
        let p = 5.0 / 14.0;
        let trials = 1000;
        let total: usize = (0..trials)
            .map(|seed| generate_er(&RandomGraphSpec { n: 15, avg_degree: 5.0, seed }).unwrap().m())
            .sum();
        let mean = total as f64 / trials as f64;
        let se = (105.0 * p * (1.0 - p) / trials as f64).sqrt();
        assert!((mean - 37.5).abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn vertex_set_serde() {
        let set: VertexSet = [0, 3, 5].into_iter().collect();
        let json = serde_json::to_string(&set).unwrap();
        assert_eq!(json, "[0,3,5]");
        assert_eq!(serde_json::from_str::<VertexSet>(&json).unwrap(), set);
        assert!(serde_json::from_str::<VertexSet>("[64]").is_err());
        assert_eq!(format!("{set:?}"), "{0, 3, 5}");
    }
}

//! Colorings, payoffs and the cut accounting of the max k-cut game.
//!
//! Colors are the integers `1..=k`. A player's payoff is the number of its
//! neighbors holding a different color; the cut value `S` counts bichromatic
//! edges, and the social welfare is `2 S`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GameError;
use crate::graph::{Graph, VertexSet, MAX_VERTICES};

/// Largest supported palette.
pub const MAX_COLORS: usize = 16;

pub type Color = u8;

/// One bitmask of vertices per color; index `a - 1` holds color `a`.
pub(crate) type ClassMasks = [u64; MAX_COLORS];

/// A strategy profile: color `colors[v]` in `1..=k` for each vertex `v`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawColoring", into = "RawColoring")]
pub struct Coloring {
    colors: Vec<Color>,
    k: Color,
}

#[derive(Serialize, Deserialize)]
struct RawColoring {
    k: Color,
    sigma: Vec<Color>,
}

impl TryFrom<RawColoring> for Coloring {
    type Error = GameError;

    fn try_from(raw: RawColoring) -> Result<Self, GameError> {
        Coloring::new(raw.sigma, raw.k as usize)
    }
}

impl From<Coloring> for RawColoring {
    fn from(c: Coloring) -> Self {
        RawColoring { k: c.k, sigma: c.colors }
    }
}

pub(crate) fn check_palette(k: usize) -> Result<Color, GameError> {
    if k == 0 || k > MAX_COLORS {
        return Err(GameError::UnsupportedColorCount(k));
    }
    Ok(k as Color)
}

impl Coloring {
    pub fn new(colors: Vec<Color>, k: usize) -> Result<Self, GameError> {
        let k = check_palette(k)?;
        if colors.len() > MAX_VERTICES {
            return Err(GameError::Graph(crate::GraphError::TooManyVertices(colors.len())));
        }
        if let Some(&color) = colors.iter().find(|&&c| c == 0 || c > k) {
            return Err(GameError::ColorOutOfRange { color, k });
        }
        Ok(Coloring { colors, k })
    }

    /// Everyone plays color 1.
    pub fn monochromatic(n: usize, k: usize) -> Result<Self, GameError> {
        Coloring::new(vec![1; n], k)
    }

    /// The `index`-th coloring in mixed-radix order (vertex 0 most significant).
    pub fn from_index(mut index: u64, n: usize, k: usize) -> Result<Self, GameError> {
        let k8 = check_palette(k)?;
        let mut colors = vec![1; n];
        for slot in colors.iter_mut().rev() {
            *slot = (index % k as u64) as Color + 1;
            index /= k as u64;
        }
        Coloring::new(colors, k8 as usize)
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k as usize
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Color of vertex `v`. Panics if `v` is out of range.
    #[inline]
    pub fn color(&self, v: usize) -> Color {
        self.colors[v]
    }

    pub fn as_slice(&self) -> &[Color] {
        &self.colors
    }

    pub(crate) fn set(&mut self, v: usize, color: Color) {
        self.colors[v] = color;
    }

    /// The coloring equal to `self` except on the listed vertices.
    pub fn replace(&self, assignments: &[(usize, Color)]) -> Result<Coloring, GameError> {
        let mut out = self.clone();
        for &(v, color) in assignments {
            if v >= self.len() {
                return Err(crate::GraphError::VertexOutOfRange { v, n: self.len() }.into());
            }
            if color == 0 || color > self.k {
                return Err(GameError::ColorOutOfRange { color, k: self.k });
            }
            out.colors[v] = color;
        }
        Ok(out)
    }

    /// Relabels colors so they appear in order of first use (1, 2, ...).
    pub fn canonical(&self) -> Coloring {
        let mut map = [0 as Color; MAX_COLORS + 1];
        let mut next = 0;
        let colors = self
            .colors
            .iter()
            .map(|&c| {
                if map[c as usize] == 0 {
                    next += 1;
                    map[c as usize] = next;
                }
                map[c as usize]
            })
            .collect();
        Coloring { colors, k: self.k }
    }

    pub fn is_canonical(&self) -> bool {
        let mut max_seen = 0;
        for &c in &self.colors {
            if c > max_seen + 1 {
                return false;
            }
            max_seen = max_seen.max(c);
        }
        true
    }

    /// Every canonical coloring of `n` vertices with at most `k` colors, in
    /// lexicographic order. One representative per color-relabeling class.
    pub fn all_canonical(n: usize, k: usize) -> Result<Vec<Coloring>, GameError> {
        let k = check_palette(k)?;
        let mut out = Vec::new();
        let mut colors = vec![1 as Color; n];
        // max_prefix[i] is the largest color among colors[..i].
        fn fill(i: usize, max_prefix: Color, k: Color, colors: &mut Vec<Color>, out: &mut Vec<Coloring>) {
            if i == colors.len() {
                out.push(Coloring { colors: colors.clone(), k });
                return;
            }
            for c in 1..=(max_prefix + 1).min(k) {
                colors[i] = c;
                fill(i + 1, max_prefix.max(c), k, colors, out);
            }
        }
        fill(0, 0, k, &mut colors, &mut out);
        Ok(out)
    }

    /// Number of distinct colors used.
    pub fn colors_used(&self) -> usize {
        self.colors.iter().collect::<BTreeSet<_>>().len()
    }

    /// Applies `perm` to every color: `a` becomes `perm[a - 1]`.
    pub fn permute_colors(&self, perm: &[Color]) -> Result<Coloring, GameError> {
        let colors = self.colors.iter().map(|&c| perm[c as usize - 1]).collect();
        Coloring::new(colors, self.k())
    }

    pub(crate) fn class_masks(&self) -> ClassMasks {
        let mut masks = [0u64; MAX_COLORS];
        for (v, &c) in self.colors.iter().enumerate() {
            masks[c as usize - 1] |= 1u64 << v;
        }
        masks
    }

    pub(crate) fn check_against(&self, g: &Graph) -> Result<(), GameError> {
        if self.len() != g.n() {
            return Err(GameError::SizeMismatch { coloring: self.len(), graph: g.n() });
        }
        Ok(())
    }
}

impl fmt::Debug for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coloring(k={}, {:?})", self.k, self.colors)
    }
}

fn check_pair(g: &Graph, sigma: &Coloring, gamma: &Coloring) -> Result<(), GameError> {
    sigma.check_against(g)?;
    gamma.check_against(g)?;
    if sigma.k != gamma.k {
        return Err(GameError::PaletteMismatch(sigma.k, gamma.k));
    }
    Ok(())
}

fn check_color(sigma: &Coloring, a: Color) -> Result<(), GameError> {
    if a == 0 || a > sigma.k {
        return Err(GameError::ColorOutOfRange { color: a, k: sigma.k });
    }
    Ok(())
}

/// `E(σ)` and `S(σ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutReport {
    pub cut_edges: Vec<(usize, usize)>,
    pub size: usize,
}

/// Number of neighbors of `v` holding color `a`.
pub fn color_degree(g: &Graph, sigma: &Coloring, v: usize, a: Color) -> Result<usize, GameError> {
    sigma.check_against(g)?;
    g.check_vertex(v)?;
    check_color(sigma, a)?;
    Ok(g.neighbors(v).iter().filter(|&u| sigma.color(u) == a).count())
}

pub fn cut(g: &Graph, sigma: &Coloring) -> Result<CutReport, GameError> {
    sigma.check_against(g)?;
    let cut_edges: Vec<_> = g.edges().filter(|&(u, v)| sigma.color(u) != sigma.color(v)).collect();
    Ok(CutReport { size: cut_edges.len(), cut_edges })
}

pub fn cut_value(g: &Graph, sigma: &Coloring) -> Result<usize, GameError> {
    sigma.check_against(g)?;
    Ok(cut_value_unchecked(g, &sigma.class_masks(), sigma.k()))
}

/// `S` from class masks: `m` minus the monochromatic edges.
pub(crate) fn cut_value_unchecked(g: &Graph, masks: &ClassMasks, k: usize) -> usize {
    let mono: usize = masks[..k]
        .iter()
        .map(|&mask| g.edges_within(VertexSet::from_bits(mask)))
        .sum();
    g.m() - mono
}

pub fn payoff(g: &Graph, sigma: &Coloring, v: usize) -> Result<usize, GameError> {
    sigma.check_against(g)?;
    g.check_vertex(v)?;
    Ok(g.neighbors(v).iter().filter(|&u| sigma.color(u) != sigma.color(v)).count())
}

/// Payoff of every player, indexed by vertex.
pub fn payoffs(g: &Graph, sigma: &Coloring) -> Result<Vec<usize>, GameError> {
    (0..g.n()).map(|v| payoff(g, sigma, v)).collect()
}

pub fn social_welfare(g: &Graph, sigma: &Coloring) -> Result<usize, GameError> {
    Ok(payoffs(g, sigma)?.into_iter().sum())
}

/// `ΔS(σ, γ) = S(γ) - S(σ)`.
pub fn cut_difference(g: &Graph, sigma: &Coloring, gamma: &Coloring) -> Result<i64, GameError> {
    check_pair(g, sigma, gamma)?;
    Ok(cut_value(g, gamma)? as i64 - cut_value(g, sigma)? as i64)
}

/// Edges inside `c` that are monochromatic under `sigma` and bichromatic
/// under `gamma`.
pub fn p_c(g: &Graph, sigma: &Coloring, gamma: &Coloring, c: VertexSet) -> Result<usize, GameError> {
    check_pair(g, sigma, gamma)?;
    g.check_set(c)?;
    Ok(g.edges()
        .filter(|&(u, v)| c.contains(u) && c.contains(v))
        .filter(|&(u, v)| sigma.color(u) == sigma.color(v) && gamma.color(u) != gamma.color(v))
        .count())
}

fn check_subset(sigma: &Coloring, c: VertexSet) -> Result<(), GameError> {
    match c.difference(VertexSet::full(sigma.len())).first() {
        None => Ok(()),
        Some(v) => Err(crate::GraphError::VertexOutOfRange { v, n: sigma.len() }.into()),
    }
}

/// `K_C(σ)`: colors held by members of `c`.
pub fn coalition_colors(sigma: &Coloring, c: VertexSet) -> Result<BTreeSet<Color>, GameError> {
    check_subset(sigma, c)?;
    Ok(c.iter().map(|v| sigma.color(v)).collect())
}

/// `C_a(σ)`: members of `c` holding color `a`.
pub fn color_class(sigma: &Coloring, c: VertexSet, a: Color) -> Result<VertexSet, GameError> {
    check_subset(sigma, c)?;
    check_color(sigma, a)?;
    Ok(c.iter().filter(|&v| sigma.color(v) == a).collect())
}

/// Vertices whose color differs between `sigma` and `gamma`.
pub fn deviating_set(sigma: &Coloring, gamma: &Coloring) -> Result<VertexSet, GameError> {
    if sigma.len() != gamma.len() {
        return Err(GameError::SizeMismatch { coloring: gamma.len(), graph: sigma.len() });
    }
    if sigma.k != gamma.k {
        return Err(GameError::PaletteMismatch(sigma.k, gamma.k));
    }
    Ok((0..sigma.len()).filter(|&v| sigma.color(v) != gamma.color(v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{figure1, Reconstruction, BLUE, GREEN, RED};

    fn set(vs: &[usize]) -> VertexSet {
        vs.iter().copied().collect()
    }

    #[test]
    fn coloring_validation() {
        assert!(Coloring::new(vec![1, 2, 3], 3).is_ok());
        assert_eq!(Coloring::new(vec![1, 4], 3), Err(GameError::ColorOutOfRange { color: 4, k: 3 }));
        assert_eq!(Coloring::new(vec![0], 3), Err(GameError::ColorOutOfRange { color: 0, k: 3 }));
        assert!(Coloring::new(vec![], 0).is_err());
        assert!(Coloring::new(vec![1], 17).is_err());
        let g = Graph::complete(3).unwrap();
        let short = Coloring::monochromatic(2, 2).unwrap();
        assert_eq!(cut(&g, &short), Err(GameError::SizeMismatch { coloring: 2, graph: 3 }));
    }

    #[test]
    fn canonical_form() {
        let c = Coloring::new(vec![3, 3, 1, 2, 1], 3).unwrap();
        assert_eq!(c.canonical().as_slice(), &[1, 1, 2, 3, 2]);
        assert!(c.canonical().is_canonical());
        assert!(!c.is_canonical());
        assert_eq!(c.colors_used(), 3);
        assert_eq!(Coloring::from_index(5, 3, 3).unwrap().as_slice(), &[1, 2, 3]);
    }

    #[test]
    fn canonical_enumeration() {
        for n in 0..=6 {
            for k in 1..=4usize {
                let mut filtered: Vec<Coloring> = (0..(k as u64).pow(n as u32))
                    .map(|i| Coloring::from_index(i, n, k).unwrap())
                    .filter(Coloring::is_canonical)
                    .collect();
                filtered.sort();
                assert_eq!(Coloring::all_canonical(n, k).unwrap(), filtered, "n={n} k={k}");
            }
        }
        // Stirling numbers S(6,1) + S(6,2) + S(6,3).
        assert_eq!(Coloring::all_canonical(6, 3).unwrap().len(), 1 + 31 + 90);
    }

    #[test]
    fn color_degrees() {
        let empty = Graph::empty(3).unwrap();
        let sigma = Coloring::new(vec![1, 2, 3], 3).unwrap();
        for v in 0..3 {
            for a in 1..=3 {
                assert_eq!(color_degree(&empty, &sigma, v, a).unwrap(), 0);
            }
        }
        let k3 = Graph::complete(3).unwrap();
        let mono = Coloring::monochromatic(3, 2).unwrap();
        assert_eq!(color_degree(&k3, &mono, 0, 1).unwrap(), 2);
        assert_eq!(color_degree(&k3, &mono, 0, 2).unwrap(), 0);
        assert!(color_degree(&k3, &mono, 0, 3).is_err());
        assert!(color_degree(&k3, &mono, 3, 1).is_err());

        let fig = figure1(Reconstruction::V1V3);
        assert_eq!(color_degree(&fig.graph, &fig.sigma, 0, BLUE).unwrap(), 2);
    }

    #[test]
    fn figure1_quantities() {
        for rec in [Reconstruction::V1V3, Reconstruction::V1V6] {
            let fig = figure1(rec);
            let (g, sigma, gamma) = (&fig.graph, &fig.sigma, &fig.gamma);
            assert_eq!(g.degree(3).unwrap(), 4);
            assert_eq!(cut(g, sigma).unwrap().size, 8);
            assert_eq!(social_welfare(g, sigma).unwrap(), 16);
            assert_eq!(payoffs(g, sigma).unwrap(), vec![2, 2, 3, 4, 3, 2]);
            let c = set(&[0, 2, 4]);
            assert_eq!(coalition_colors(sigma, c).unwrap(), [RED, GREEN].into_iter().collect());
            assert_eq!(color_class(sigma, c, RED).unwrap(), set(&[0, 2]));
            assert_eq!(color_class(sigma, c, GREEN).unwrap(), set(&[4]));
            assert_eq!(color_class(sigma, c, BLUE).unwrap(), VertexSet::EMPTY);
            assert_eq!(deviating_set(sigma, gamma).unwrap(), c);
        }
        let fig = figure1(Reconstruction::V1V3);
        assert_eq!(cut(&fig.graph, &fig.gamma).unwrap().size, 7);
        assert_eq!(cut_difference(&fig.graph, &fig.sigma, &fig.gamma).unwrap(), -1);
        assert_eq!(p_c(&fig.graph, &fig.sigma, &fig.gamma, set(&[0, 2, 4])).unwrap(), 0);
        let alt = figure1(Reconstruction::V1V6);
        assert_eq!(cut(&alt.graph, &alt.gamma).unwrap().size, 8);
    }

    #[test]
    fn degenerate_inputs() {
        let g = Graph::empty(0).unwrap();
        let sigma = Coloring::new(vec![], 2).unwrap();
        assert_eq!(cut(&g, &sigma).unwrap().size, 0);
        assert_eq!(social_welfare(&g, &sigma).unwrap(), 0);
        assert!(coalition_colors(&sigma, VertexSet::EMPTY).unwrap().is_empty());
        assert_eq!(deviating_set(&sigma, &sigma).unwrap(), VertexSet::EMPTY);
    }

    #[test]
    fn rainbow_and_monochromatic() {
        let k3 = Graph::complete(3).unwrap();
        let rainbow = Coloring::new(vec![1, 2, 3], 3).unwrap();
        assert_eq!(payoffs(&k3, &rainbow).unwrap(), vec![2, 2, 2]);
        assert_eq!(p_c(&k3, &rainbow, &Coloring::monochromatic(3, 3).unwrap(), k3.vertices()).unwrap(), 0);
        let mono = Coloring::monochromatic(3, 3).unwrap();
        assert_eq!(cut(&k3, &mono).unwrap().size, 0);
        assert_eq!(social_welfare(&k3, &mono).unwrap(), 0);
        assert_eq!(coalition_colors(&mono, k3.vertices()).unwrap().len(), 1);
        let isolated = Graph::empty(2).unwrap();
        assert_eq!(payoff(&isolated, &Coloring::new(vec![1, 2], 2).unwrap(), 0).unwrap(), 0);
    }

    #[test]
    fn replace_changes_only_listed_vertices() {
        let sigma = Coloring::new(vec![1, 1, 2], 3).unwrap();
        let gamma = sigma.replace(&[(1, 3)]).unwrap();
        assert_eq!(gamma.as_slice(), &[1, 3, 2]);
        assert_eq!(deviating_set(&sigma, &gamma).unwrap(), VertexSet::singleton(1));
        assert!(sigma.replace(&[(1, 4)]).is_err());
        assert!(sigma.replace(&[(3, 1)]).is_err());
    }

    #[test]
    fn coloring_serde() {
        let sigma = Coloring::new(vec![1, 2, 1], 2).unwrap();
        let json = serde_json::to_string(&sigma).unwrap();
        assert_eq!(json, r#"{"k":2,"sigma":[1,2,1]}"#);
        assert_eq!(serde_json::from_str::<Coloring>(&json).unwrap(), sigma);
        assert!(serde_json::from_str::<Coloring>(r#"{"k":2,"sigma":[3]}"#).is_err());
    }
}

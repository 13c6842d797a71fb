//! Exact max k-cut.
//!
//! The search assigns vertices in descending-degree order and only opens a
//! new color when every smaller color is already in use, so each coloring is
//! visited once per color-permutation class. A node is pruned when its
//! optimistic bound cannot reach the incumbent. The bound adds to the cut
//! already fixed, for every unassigned vertex, its assigned neighbors minus
//! those on its least crowded color, plus every edge between unassigned
//! vertices.

use serde::{Deserialize, Serialize};

use crate::error::{GameError, SolverError};
use crate::game::{check_palette, ClassMasks, Color, Coloring, MAX_COLORS};
use crate::graph::Graph;

/// Limit on branch-and-bound node expansions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget(pub u64);

impl Budget {
    pub const UNLIMITED: Budget = Budget(u64::MAX);
}

impl Default for Budget {
    fn default() -> Self {
        Budget::UNLIMITED
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Optimum {
    pub best_value: usize,
    /// Canonical representatives (colors numbered by first appearance).
    pub witnesses: Vec<Coloring>,
    /// Labeled optima, when every optimum was enumerated.
    pub count_labeled: Option<u64>,
    /// `false` when the budget ran out and `best_value` is only a lower bound.
    pub exhausted: bool,
    pub nodes: u64,
}

impl Optimum {
    /// Every labeled coloring represented by the witnesses.
    pub fn labeled_witnesses(&self) -> Vec<Coloring> {
        let mut all: Vec<Coloring> = self.witnesses.iter().flat_map(color_relabelings).collect();
        all.sort();
        all
    }
}

/// Number of labeled colorings in the color-permutation class of `c`:
/// `k! / (k - used)!`.
pub fn labeled_multiplicity(c: &Coloring) -> u64 {
    let (k, used) = (c.k() as u64, c.colors_used() as u64);
    (k - used + 1..=k).product()
}

/// All colorings obtained from `c` by injectively renaming its used colors.
pub fn color_relabelings(c: &Coloring) -> Vec<Coloring> {
    let canon = c.canonical();
    let used = canon.colors_used();
    let mut out = Vec::new();
    let mut image = Vec::with_capacity(used);
    relabel_rec(&canon, used, &mut image, &mut out);
    out
}

fn relabel_rec(canon: &Coloring, used: usize, image: &mut Vec<Color>, out: &mut Vec<Coloring>) {
    if image.len() == used {
        let colors = canon.as_slice().iter().map(|&c| image[c as usize - 1]).collect();
        out.push(Coloring::new(colors, canon.k()).expect("relabeling stays in palette"));
        return;
    }
    for c in 1..=canon.k() as Color {
        if !image.contains(&c) {
            image.push(c);
            relabel_rec(canon, used, image, out);
            image.pop();
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Best,
    All,
}

struct BranchAndBound<'g> {
    g: &'g Graph,
    k: usize,
    order: Vec<usize>,
    masks: ClassMasks,
    assigned: u64,
    colors: Vec<Color>,
    mode: Mode,
    best: usize,
    best_coloring: Option<Coloring>,
    found: Vec<Coloring>,
    nodes: u64,
    budget: u64,
    aborted: bool,
}

impl<'g> BranchAndBound<'g> {
    fn new(g: &'g Graph, k: usize, mode: Mode, budget: Budget, warm: Coloring, warm_value: usize) -> Self {
        let mut order: Vec<usize> = (0..g.n()).collect();
        order.sort_by_key(|&v| (std::cmp::Reverse(g.neighbors(v).len()), v));
        BranchAndBound {
            g,
            k,
            order,
            masks: [0; MAX_COLORS],
            assigned: 0,
            colors: vec![0; g.n()],
            mode,
            best: warm_value,
            best_coloring: Some(warm),
            found: Vec::new(),
            nodes: 0,
            budget: budget.0,
            aborted: false,
        }
    }

    fn bound(&self, cut: usize) -> usize {
        let free = !self.assigned & self.g.vertices().bits();
        let mut optimistic = cut;
        let mut free_edges = 0;
        for v in crate::VertexSet::from_bits(free) {
            let row = self.g.neighbors(v).bits();
            let back = (row & self.assigned).count_ones() as usize;
            let crowd = self.masks[..self.k]
                .iter()
                .map(|&m| (row & m).count_ones() as usize)
                .min()
                .unwrap_or(0);
            optimistic += back - crowd;
            free_edges += (row & free).count_ones() as usize;
        }
        optimistic + free_edges / 2
    }

    fn dfs(&mut self, depth: usize, used: usize, cut: usize) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            return;
        }
        if depth == self.order.len() {
            self.leaf(cut);
            return;
        }
        let bound = self.bound(cut);
        let hopeless = match self.mode {
            Mode::Best => bound <= self.best,
            Mode::All => bound < self.best,
        };
        if hopeless {
            return;
        }
        let v = self.order[depth];
        let row = self.g.neighbors(v).bits();
        let back = (row & self.assigned).count_ones() as usize;
        for c in 1..=(used + 1).min(self.k) {
            let gained = back - (row & self.masks[c - 1]).count_ones() as usize;
            self.colors[v] = c as Color;
            self.masks[c - 1] |= 1 << v;
            self.assigned |= 1 << v;
            self.dfs(depth + 1, used.max(c), cut + gained);
            self.assigned &= !(1 << v);
            self.masks[c - 1] &= !(1 << v);
            self.colors[v] = 0;
        }
    }

    fn leaf(&mut self, cut: usize) {
        let coloring = || Coloring::new(self.colors.clone(), self.k).expect("complete assignment").canonical();
        match self.mode {
            Mode::Best => {
                if cut > self.best {
                    self.best = cut;
                    self.best_coloring = Some(coloring());
                }
            }
            Mode::All => {
                if cut > self.best {
                    self.best = cut;
                    self.found.clear();
                }
                if cut == self.best {
                    self.found.push(coloring());
                }
            }
        }
    }
}

fn warm_start(g: &Graph, k: usize) -> Result<(Coloring, usize), GameError> {
    let start = Coloring::monochromatic(g.n(), k)?;
    let warm = local_search(g, k, &start, g.m() + 1)?;
    let value = crate::game::cut_value(g, &warm)?;
    Ok((warm.canonical(), value))
}

/// Maximum cut value over all k-colorings, with one canonical witness.
///
/// When the budget runs out the incumbent is returned with
/// `exhausted = false`.
pub fn max_cut_exact(g: &Graph, k: usize, budget: Budget) -> Result<Optimum, SolverError> {
    check_palette(k)?;
    let (warm, value) = warm_start(g, k)?;
    let mut bb = BranchAndBound::new(g, k, Mode::Best, budget, warm, value);
    bb.dfs(0, 0, 0);
    Ok(Optimum {
        best_value: bb.best,
        witnesses: bb.best_coloring.into_iter().collect(),
        count_labeled: None,
        exhausted: !bb.aborted,
        nodes: bb.nodes,
    })
}

/// Every optimal coloring, as sorted canonical representatives.
pub fn enumerate_optimal(g: &Graph, k: usize, budget: Budget) -> Result<Optimum, SolverError> {
    check_palette(k)?;
    let (warm, value) = warm_start(g, k)?;
    let mut bb = BranchAndBound::new(g, k, Mode::All, budget, warm, value);
    bb.dfs(0, 0, 0);
    if bb.aborted {
        return Err(SolverError::BudgetExceeded { budget: budget.0 });
    }
    let mut witnesses = bb.found;
    witnesses.sort();
    let count_labeled = witnesses.iter().map(labeled_multiplicity).sum();
    Ok(Optimum {
        best_value: bb.best,
        witnesses,
        count_labeled: Some(count_labeled),
        exhausted: true,
        nodes: bb.nodes,
    })
}

/// Sweeps vertices in index order, moving each to its least crowded color
/// (smallest index among ties) when that strictly helps. Stops after a pass
/// with no move or after `max_passes` passes; with `max_passes > m` the
/// result is always a Nash equilibrium, since every move raises the cut.
pub fn local_search(g: &Graph, k: usize, start: &Coloring, max_passes: usize) -> Result<Coloring, GameError> {
    start.check_against(g)?;
    if start.k() != k {
        return Err(GameError::PaletteMismatch(start.k() as u8, check_palette(k)?));
    }
    let mut sigma = start.clone();
    let mut masks = sigma.class_masks();
    for _ in 0..max_passes {
        let mut moved = false;
        for v in 0..g.n() {
            let row = g.neighbors(v).bits();
            let current = sigma.color(v) as usize - 1;
            let (best, crowd) = (0..k)
                .map(|a| (a, (row & masks[a]).count_ones()))
                .min_by_key(|&(a, c)| (c, a))
                .expect("k >= 1");
            if crowd < (row & masks[current]).count_ones() {
                masks[current] &= !(1 << v);
                masks[best] |= 1 << v;
                sigma.set(v, best as Color + 1);
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    Ok(sigma)
}

/// Color-class sizes of a coalition, one entry per color it uses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigSpec {
    pub class_sizes: Vec<usize>,
}

impl ConfigSpec {
    pub fn new(class_sizes: impl Into<Vec<usize>>) -> Self {
        ConfigSpec { class_sizes: class_sizes.into() }
    }

    pub fn coalition_size(&self) -> usize {
        self.class_sizes.iter().sum()
    }
}

const MAX_CONFIG_RECOLORINGS: u128 = 1 << 32;

/// Graph-free maximum of `P_C(σ, γ)` for a coalition whose color classes
/// have the given sizes.
///
/// Every intra-class pair is taken to be an edge. Each member must move to
/// another color already used by the coalition, and all
/// `(classes - 1)^|C|` such recolorings are tried; the result is the largest
/// number of same-class pairs that end up on different colors.
pub fn max_pc_config(spec: &ConfigSpec) -> Result<usize, SolverError> {
    let classes = spec.class_sizes.len();
    if classes < 2 {
        return Err(SolverError::TooFewClasses(classes));
    }
    if spec.class_sizes.contains(&0) {
        return Err(SolverError::EmptyClass);
    }
    let members: Vec<usize> = spec
        .class_sizes
        .iter()
        .enumerate()
        .flat_map(|(class, &size)| std::iter::repeat(class).take(size))
        .collect();
    let radix = classes - 1;
    let total = (radix as u128).checked_pow(members.len() as u32).unwrap_or(u128::MAX);
    if total > MAX_CONFIG_RECOLORINGS {
        return Err(SolverError::ConfigTooLarge(total));
    }

    let mut digits = vec![0usize; members.len()];
    let mut counts = vec![0usize; classes * classes];
    let mut best = 0;
    loop {
        // Digit d selects the d-th color other than the member's own class.
        counts.iter_mut().for_each(|c| *c = 0);
        for (&class, &d) in members.iter().zip(&digits) {
            let target = if d >= class { d + 1 } else { d };
            counts[class * classes + target] += 1;
        }
        let split: usize = spec
            .class_sizes
            .iter()
            .enumerate()
            .map(|(class, &size)| {
                let together: usize =
                    counts[class * classes..(class + 1) * classes].iter().map(|&c| c * c.saturating_sub(1) / 2).sum();
                size * (size - 1) / 2 - together
            })
            .sum();
        best = best.max(split);

        let mut i = 0;
        loop {
            if i == digits.len() {
                return Ok(best);
            }
            digits[i] += 1;
            if digits[i] < radix {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{figure1, Reconstruction};
    use crate::game::cut_value;
    use crate::graph::enumerate_all_graphs;

    /// Exhaustive reference: every coloring in `K^n`.
    fn brute_force(g: &Graph, k: usize) -> (usize, Vec<Coloring>) {
        let total = (k as u64).pow(g.n() as u32);
        let mut best = 0;
        let mut all = Vec::new();
        for idx in 0..total {
            let c = Coloring::from_index(idx, g.n(), k).unwrap();
            let s = g.edges().filter(|&(u, v)| c.color(u) != c.color(v)).count();
            if s > best {
                best = s;
                all.clear();
            }
            if s == best {
                all.push(c);
            }
        }
        (best, all)
    }

    #[test]
    fn small_optima() {
        let k3 = Graph::complete(3).unwrap();
        assert_eq!(max_cut_exact(&k3, 2, Budget::UNLIMITED).unwrap().best_value, 2);
        assert_eq!(max_cut_exact(&k3, 3, Budget::UNLIMITED).unwrap().best_value, 3);
        let opt = enumerate_optimal(&k3, 3, Budget::UNLIMITED).unwrap();
        assert_eq!(opt.witnesses.len(), 1);
        assert_eq!(opt.count_labeled, Some(6));
        assert_eq!(opt.labeled_witnesses().len(), 6);

        let p2 = Graph::path(2).unwrap();
        let opt = enumerate_optimal(&p2, 2, Budget::UNLIMITED).unwrap();
        assert_eq!((opt.witnesses.len(), opt.count_labeled), (1, Some(2)));

        let k4 = Graph::complete(4).unwrap();
        let opt = enumerate_optimal(&k4, 2, Budget::UNLIMITED).unwrap();
        assert_eq!(opt.best_value, 4);
        assert_eq!(opt.witnesses.len(), 3);
        assert!(opt.witnesses.iter().all(|c| c.as_slice().iter().filter(|&&x| x == 1).count() == 2));
    }

    #[test]
    fn figure1_optimum() {
        let fig = figure1(Reconstruction::V1V3);
        let opt = max_cut_exact(&fig.graph, 3, Budget::UNLIMITED).unwrap();
        assert_eq!(opt.best_value, 9);
        assert!(opt.exhausted);
        let witness = Coloring::new(vec![1, 3, 2, 3, 1, 2], 3).unwrap();
        assert_eq!(cut_value(&fig.graph, &witness).unwrap(), 9);
        let all = enumerate_optimal(&fig.graph, 3, Budget::UNLIMITED).unwrap();
        assert!(all.witnesses.contains(&witness.canonical()));
    }

    #[test]
    fn matches_brute_force_exhaustively() {
        for n in 0..=5 {
            for g in enumerate_all_graphs(n).unwrap() {
                for k in 1..=3 {
                    let (best, all) = brute_force(&g, k);
                    let opt = enumerate_optimal(&g, k, Budget::UNLIMITED).unwrap();
                    assert_eq!(opt.best_value, best, "{g:?} k={k}");
                    assert_eq!(opt.labeled_witnesses(), all, "{g:?} k={k}");
                    assert_eq!(opt.count_labeled, Some(all.len() as u64));
                    let single = max_cut_exact(&g, k, Budget::UNLIMITED).unwrap();
                    assert_eq!(single.best_value, best);
                    assert!(opt.witnesses.contains(&single.witnesses[0]));
                }
            }
        }
    }

    #[test]
    fn budget_exhaustion() {
        let g = Graph::complete(8).unwrap();
        let partial = max_cut_exact(&g, 3, Budget(5)).unwrap();
        assert!(!partial.exhausted);
        assert_eq!(cut_value(&g, &partial.witnesses[0]).unwrap(), partial.best_value);
        assert_eq!(enumerate_optimal(&g, 3, Budget(5)), Err(SolverError::BudgetExceeded { budget: 5 }));
        assert!(max_cut_exact(&g, 0, Budget::UNLIMITED).is_err());
    }

    #[test]
    fn local_search_reaches_equilibrium() {
        let k3 = Graph::complete(3).unwrap();
        let mono = Coloring::monochromatic(3, 2).unwrap();
        let out = local_search(&k3, 2, &mono, 10).unwrap();
        assert!(cut_value(&k3, &out).unwrap() >= 2);
        let again = local_search(&k3, 2, &out, 10).unwrap();
        assert_eq!(again, out);
        assert!(local_search(&k3, 3, &mono, 10).is_err());
    }

    #[test]
    fn relabelings() {
        let c = Coloring::new(vec![2, 2, 1], 3).unwrap();
        assert_eq!(labeled_multiplicity(&c), 6);
        let all = color_relabelings(&c);
        assert_eq!(all.len(), 6);
        assert!(all.contains(&c));
        assert_eq!(labeled_multiplicity(&Coloring::monochromatic(4, 3).unwrap()), 3);
    }

    #[test]
    fn config_brute_force() {
        let cases: &[(&[usize], usize)] = &[
            (&[3, 1], 0),
            (&[3, 1, 1], 2),
            (&[3, 1, 1, 1], 3),
            (&[2, 2], 0),
            (&[2, 2, 1], 2),
            (&[4, 1, 1], 4),
            (&[4, 1, 1, 1], 5),
            (&[4, 1, 1, 1, 1], 6),
            (&[2, 2, 2], 3),
        ];
        for &(sizes, expected) in cases {
            assert_eq!(max_pc_config(&ConfigSpec::new(sizes)).unwrap(), expected, "{sizes:?}");
        }
        assert_eq!(max_pc_config(&ConfigSpec::new([5])), Err(SolverError::TooFewClasses(1)));
        assert_eq!(max_pc_config(&ConfigSpec::new([2, 0])), Err(SolverError::EmptyClass));
        assert!(matches!(max_pc_config(&ConfigSpec::new([1; 40])), Err(SolverError::ConfigTooLarge(_))));
    }
}

//! Scheduling algorithms driven by the inductive (effective-length) order.
//!
//! All algorithms scan vertices sorted by non-decreasing effective length,
//! which keeps the independence number of every vertex's later neighborhood
//! small in the conflict graphs built here. That single ordering yields
//! provable approximation factors for first-fit coloring (TDMA slots),
//! local-ratio weighted independent set, and greedy channel assignment.
//!
//! The index-level entry points (`*_classes`, `*_select`) are generic over
//! [`Adjacency`] so the MC-MA virtual-link graph can reuse them; the
//! id-level wrappers operate on [`ConflictGraph`] directly.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Adjacency, ConflictGraph};
use crate::model::LinkId;

/// Partition of links into independent classes (TDMA slots / colors).
#[derive(Debug, Clone, PartialEq)]
pub struct Coloring {
    /// Classes in creation order; each is independent in the source graph.
    pub classes: Vec<Vec<LinkId>>,
    /// Class index per link.
    pub assignment: BTreeMap<LinkId, usize>,
}

impl Coloring {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }
}

/// An independent set with its total weight.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSolution {
    /// Selected link ids, ascending.
    pub selected: Vec<LinkId>,
    pub total_weight: f64,
}

/// Assignment of links to a fixed number of channels.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelAssignment {
    /// One independent set per channel; pairwise disjoint.
    pub channels: Vec<Vec<LinkId>>,
    /// Links that fit in no channel.
    pub unassigned: Vec<LinkId>,
}

impl ChannelAssignment {
    pub fn assigned_count(&self) -> usize {
        self.channels.iter().map(Vec::len).sum()
    }
}

/// Measured inductive independence of a graph order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InductiveIndependence {
    /// Largest independent set found in any vertex's later neighborhood.
    pub k: usize,
    /// True when some neighborhood exceeded the cap and was subsampled, so
    /// `k` is only a lower bound.
    pub truncated: bool,
}

/// Link ids sorted by (effective length, id).
pub fn inductive_order(g: &ConflictGraph) -> Vec<LinkId> {
    g.order_indices().iter().map(|&v| g.ids()[v]).collect()
}

/// First-fit coloring over an explicit vertex order (indices into `g`).
///
/// Each vertex takes the smallest class free of conflicts with the already
/// colored ones. `order` may cover a subset of the graph; only listed
/// vertices are colored.
pub fn first_fit_classes<G: Adjacency>(g: &G, order: &[usize]) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in order {
        let slot = classes
            .iter()
            .position(|class| class.iter().all(|&u| !g.adjacent(u, v)))
            .unwrap_or(classes.len());
        if slot == classes.len() {
            classes.push(Vec::new());
        }
        classes[slot].push(v);
    }
    classes
}

/// First-fit coloring of `g` in the given id order.
///
/// `order` must be a permutation of the graph's vertices.
pub fn first_fit_coloring(g: &ConflictGraph, order: &[LinkId]) -> Result<Coloring> {
    if order.len() != g.len() {
        return Err(Error::InvalidOrder);
    }
    let mut seen = alloc::vec![false; g.len()];
    let mut indices = Vec::with_capacity(order.len());
    for &id in order {
        let v = g.index_of(id).ok_or(Error::LinkNotFound(id))?;
        if seen[v] {
            return Err(Error::InvalidOrder);
        }
        seen[v] = true;
        indices.push(v);
    }
    Ok(coloring_from_classes(g, first_fit_classes(g, &indices)))
}

fn coloring_from_classes(g: &ConflictGraph, classes: Vec<Vec<usize>>) -> Coloring {
    let mut assignment = BTreeMap::new();
    let classes: Vec<Vec<LinkId>> = classes
        .into_iter()
        .enumerate()
        .map(|(c, class)| {
            class
                .into_iter()
                .map(|v| {
                    let id = g.ids()[v];
                    assignment.insert(id, c);
                    id
                })
                .collect()
        })
        .collect();
    Coloring {
        classes,
        assignment,
    }
}

/// Split a feasible set into independent classes: first-fit over `s` in
/// non-increasing effective-length order (ties by id).
///
/// Physical feasibility of `s` is the caller's contract; the class count is
/// meaningful as a tightness diagnostic only for feasible inputs, where it
/// tracks the iteration depth of the conflict threshold at the set's
/// diversity.
pub fn partition_feasible(g: &ConflictGraph, s: &[LinkId]) -> Result<Coloring> {
    let eff = g.effective_lengths();
    let mut indices = Vec::with_capacity(s.len());
    for &id in s {
        indices.push(g.index_of(id).ok_or(Error::LinkNotFound(id))?);
    }
    indices.sort_by(|&a, &b| {
        eff[b]
            .partial_cmp(&eff[a])
            .unwrap()
            .then_with(|| g.ids()[a].cmp(&g.ids()[b]))
    });
    Ok(coloring_from_classes(g, first_fit_classes(g, &indices)))
}

/// Local-ratio selection over an explicit order. Returns selected vertex
/// indices (ascending) and their total weight under `weights`.
///
/// Forward pass: every vertex still carrying positive weight pays its weight
/// to itself and its later neighbors and joins a candidate stack. Backward
/// pass: candidates enter the solution unless they conflict with one already
/// chosen. The result is independent, with total weight within a factor of
/// the order's inductive independence number of the optimum.
pub fn local_ratio_select<G: Adjacency>(
    g: &G,
    order: &[usize],
    weights: &[f64],
) -> (Vec<usize>, f64) {
    let mut residual = weights.to_vec();
    let mut stack: Vec<usize> = Vec::new();
    for (pos, &v) in order.iter().enumerate() {
        if residual[v] <= 0.0 {
            continue;
        }
        let wv = residual[v];
        residual[v] = 0.0;
        for &u in &order[pos + 1..] {
            if g.adjacent(u, v) {
                residual[u] -= wv;
            }
        }
        stack.push(v);
    }
    let mut chosen = alloc::vec![false; g.vertex_count()];
    for &v in stack.iter().rev() {
        if stack.iter().all(|&u| !chosen[u] || !g.adjacent(u, v)) {
            chosen[v] = true;
        }
    }
    let selected: Vec<usize> = (0..g.vertex_count()).filter(|&v| chosen[v]).collect();
    let total = selected.iter().map(|&v| weights[v]).sum();
    (selected, total)
}

/// Maximum-weight independent set approximation via local ratio in the
/// inductive order. Weights are keyed by link id and must be non-negative
/// and cover every vertex.
pub fn local_ratio_mwis(
    g: &ConflictGraph,
    weights: &BTreeMap<LinkId, f64>,
) -> Result<WeightedSolution> {
    let mut by_index = Vec::with_capacity(g.len());
    for &id in g.ids() {
        let w = *weights.get(&id).ok_or(Error::MissingWeight(id))?;
        if !w.is_finite() || w < 0.0 {
            return Err(Error::NegativeWeight { id, weight: w });
        }
        by_index.push(w);
    }
    let (selected, total) = local_ratio_select(g, g.order_indices(), &by_index);
    Ok(WeightedSolution {
        selected: selected.into_iter().map(|v| g.ids()[v]).collect(),
        total_weight: total,
    })
}

/// [`local_ratio_mwis`] with the weights stored on the instance links.
pub fn local_ratio_mwis_link_weights(g: &ConflictGraph) -> WeightedSolution {
    let weights: BTreeMap<LinkId, f64> = g
        .instance()
        .links()
        .iter()
        .map(|l| (l.id, l.weight))
        .collect();
    local_ratio_mwis(g, &weights).expect("link weights are validated non-negative")
}

/// Greedy assignment of links to `channels` channels: scan the inductive
/// order and drop each link into the lowest-index channel where it conflicts
/// with nothing, leaving it unassigned when none fits.
pub fn greedy_multichannel(g: &ConflictGraph, channels: usize) -> Result<ChannelAssignment> {
    if channels < 1 {
        return Err(Error::InvalidChannelCount(channels));
    }
    let mut chans: Vec<Vec<usize>> = alloc::vec![Vec::new(); channels];
    let mut unassigned: Vec<usize> = Vec::new();
    for &v in g.order_indices() {
        match chans
            .iter()
            .position(|ch| ch.iter().all(|&u| !g.adjacent(u, v)))
        {
            Some(c) => chans[c].push(v),
            None => unassigned.push(v),
        }
    }
    Ok(ChannelAssignment {
        channels: chans
            .into_iter()
            .map(|ch| ch.into_iter().map(|v| g.ids()[v]).collect())
            .collect(),
        unassigned: unassigned.into_iter().map(|v| g.ids()[v]).collect(),
    })
}

/// Exact maximum independent set size of the subgraph induced by `mask`,
/// branch and bound over at most 64 vertices.
fn mis_size(adj: &[u64], mask: u64) -> u32 {
    if mask == 0 {
        return 0;
    }
    // branch on the highest-degree vertex inside the mask
    let mut best_v = usize::MAX;
    let mut best_deg = 0u32;
    let mut m = mask;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        let deg = (adj[v] & mask).count_ones();
        if best_v == usize::MAX || deg > best_deg {
            best_v = v;
            best_deg = deg;
        }
    }
    if best_deg == 0 {
        return mask.count_ones();
    }
    let bit = 1u64 << best_v;
    if best_deg == 1 {
        // a degree-1 vertex is always safe to take
        return 1 + mis_size(adj, mask & !bit & !adj[best_v]);
    }
    let with_v = 1 + mis_size(adj, mask & !bit & !adj[best_v]);
    let without_v = mis_size(adj, mask & !bit);
    with_v.max(without_v)
}

/// Measure the independence number of each vertex's later neighborhood in
/// the given order, reporting the maximum.
///
/// Neighborhoods larger than `cap` (at most 64) are subsampled evenly and
/// the result flagged as truncated, making `k` a lower bound.
pub fn inductive_independence<G: Adjacency>(
    g: &G,
    order: &[usize],
    cap: usize,
) -> InductiveIndependence {
    let cap = cap.min(64);
    let mut k = 0usize;
    let mut truncated = false;
    for (pos, &v) in order.iter().enumerate() {
        let mut nb: Vec<usize> = order[pos + 1..]
            .iter()
            .copied()
            .filter(|&u| g.adjacent(u, v))
            .collect();
        if nb.len() > cap {
            truncated = true;
            let len = nb.len();
            nb = (0..cap).map(|i| nb[i * len / cap]).collect();
        }
        let mut adj = alloc::vec![0u64; nb.len()];
        for (a, &u) in nb.iter().enumerate() {
            for (b, &w) in nb.iter().enumerate().skip(a + 1) {
                if g.adjacent(u, w) {
                    adj[a] |= 1u64 << b;
                    adj[b] |= 1u64 << a;
                }
            }
        }
        let mask = if nb.is_empty() {
            0
        } else {
            u64::MAX >> (64 - nb.len())
        };
        k = k.max(mis_size(&adj, mask) as usize);
    }
    InductiveIndependence { k, truncated }
}

/// Measured inductive independence of a conflict graph under its own order.
/// Exhaustive up to `cap` neighborhood vertices (default choice: 25).
pub fn measure_inductive_independence(g: &ConflictGraph, cap: usize) -> InductiveIndependence {
    inductive_independence(g, g.order_indices(), cap)
}

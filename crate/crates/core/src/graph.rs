//! Conflict graphs over link sets.
//!
//! Two links `i, j` conflict when the product of their crossed distances
//! fails to clear a threshold driven by their effective lengths:
//!
//! ```text
//! adjacent(i, j)  <=>  d_ij * d_ji <= eff_i * eff_j * f(eff_max / eff_min)
//! ```
//!
//! with the power-law threshold `f(x) = gamma * x^delta`, `gamma >= 1`,
//! `0 <= delta < 1`. Larger `gamma` or `delta` only add edges, so graph
//! independence becomes a stronger separation requirement. The point of the
//! construction: for `delta` above [`delta_min`] and a large enough `gamma`,
//! every independent set of the graph is feasible under the length-scaled
//! power assignment with exponent [`choose_tau`] — scheduling in the graph
//! yields physically valid schedules.
//!
//! Graphs are immutable once built and safe to share across threads.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::model::{directed_distance, Instance, Link, LinkId};

/// Power-law conflict threshold `f(x) = gamma * x^delta`.
///
/// `delta = 0` degenerates to a plain separation factor of `gamma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConflictFn {
    gamma: f64,
    delta: f64,
}

impl ConflictFn {
    /// Validating constructor: `gamma >= 1`, `0 <= delta < 1`.
    pub fn new(gamma: f64, delta: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 1.0 {
            return Err(Error::InvalidGamma(gamma));
        }
        if !delta.is_finite() || !(0.0..1.0).contains(&delta) {
            return Err(Error::InvalidDelta(delta));
        }
        Ok(ConflictFn { gamma, delta })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Threshold value at diversity `x`.
    pub fn eval(&self, x: f64) -> f64 {
        self.gamma * math::powf(x, self.delta)
    }

    /// Start of the fixed-point region: the least `x >= 1` with
    /// `f(x) < x`, plus one. In closed form `gamma^(1/(1-delta)) + 1`.
    pub fn fixpoint_threshold(&self) -> f64 {
        math::powf(self.gamma, 1.0 / (1.0 - self.delta)) + 1.0
    }

    /// How many times the threshold must be applied to drive `x` into the
    /// fixed-point region; 1 when `x` is already there.
    ///
    /// Grows doubly-logarithmically in `x` for this power-law family. Errors
    /// after 64 iterations, which cannot happen for finite inputs.
    pub fn iteration_depth(&self, x: f64) -> Result<u32> {
        let x0 = self.fixpoint_threshold();
        if x <= x0 {
            return Ok(1);
        }
        let mut y = x;
        for count in 1..=64 {
            y = self.eval(y);
            if y <= x0 {
                return Ok(count);
            }
        }
        Err(Error::IterationLimit)
    }
}

fn adjacent_with_eff(i: &Link, j: &Link, eff_i: f64, eff_j: f64, func: &ConflictFn) -> bool {
    let dij = directed_distance(i, j);
    let dji = directed_distance(j, i);
    let (lo, hi) = if eff_i <= eff_j {
        (eff_i, eff_j)
    } else {
        (eff_j, eff_i)
    };
    dij * dji <= eff_i * eff_j * func.eval(hi / lo)
}

/// Conflict predicate between two distinct links.
pub fn f_adjacent(i: &Link, j: &Link, func: &ConflictFn, alpha: f64) -> bool {
    adjacent_with_eff(
        i,
        j,
        i.effective_length(alpha),
        j.effective_length(alpha),
        func,
    )
}

/// Smallest usable conflict exponent `(alpha - m + 1) / (2(alpha - m) + 1)`.
///
/// For every `delta` strictly above this value a length-scaled power
/// exponent exists that makes independent sets feasible. Always lies in
/// (1/2, 1) when `alpha > m`.
pub fn delta_min(alpha: f64, m: u32) -> Result<f64> {
    let m_f = m as f64;
    if !alpha.is_finite() || alpha <= m_f {
        return Err(Error::InvalidAlpha { alpha, m });
    }
    let a = alpha - m_f;
    Ok((a + 1.0) / (2.0 * a + 1.0))
}

/// Open interval `(lo, hi)` of power exponents compatible with conflict
/// exponent `delta`:
///
/// ```text
/// lo = 1 - (1 + delta)/2 * (alpha - m)/alpha
/// hi = 1 - (1 - delta)/2 * (alpha - m + 1)/alpha
/// ```
///
/// Signals an error when the interval is empty (`delta` too small); it is
/// guaranteed nonempty for `delta > delta_min(alpha, m)`.
pub fn tau_interval(delta: f64, alpha: f64, m: u32) -> Result<(f64, f64)> {
    let m_f = m as f64;
    if !alpha.is_finite() || alpha <= m_f {
        return Err(Error::InvalidAlpha { alpha, m });
    }
    if !delta.is_finite() || delta <= 0.0 || delta >= 1.0 {
        return Err(Error::InvalidDelta(delta));
    }
    let lo = 1.0 - (1.0 + delta) / 2.0 * (alpha - m_f) / alpha;
    let hi = 1.0 - (1.0 - delta) / 2.0 * (alpha - m_f + 1.0) / alpha;
    if lo >= hi {
        return Err(Error::EmptyTauInterval { delta, lo, hi });
    }
    Ok((lo, hi))
}

/// Midpoint of [`tau_interval`]; always strictly inside (0, 1).
pub fn choose_tau(delta: f64, alpha: f64, m: u32) -> Result<f64> {
    let (lo, hi) = tau_interval(delta, alpha, m)?;
    Ok((lo + hi) / 2.0)
}

/// Derived parameters tying a conflict exponent to its power assignment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphParams {
    pub delta_min: f64,
    pub tau_lo: f64,
    pub tau_hi: f64,
    /// Chosen point: the interval midpoint.
    pub tau: f64,
}

impl GraphParams {
    pub fn derive(alpha: f64, m: u32, delta: f64) -> Result<GraphParams> {
        let dm = delta_min(alpha, m)?;
        let (tau_lo, tau_hi) = tau_interval(delta, alpha, m)?;
        Ok(GraphParams {
            delta_min: dm,
            tau_lo,
            tau_hi,
            tau: (tau_lo + tau_hi) / 2.0,
        })
    }
}

/// Read access to a symmetric conflict relation over vertices `0..n`.
///
/// Lets the scheduling algorithms run unchanged on plain conflict graphs and
/// on the MC-MA virtual-link graph.
pub trait Adjacency {
    fn vertex_count(&self) -> usize;
    /// Symmetric, irreflexive.
    fn adjacent(&self, a: usize, b: usize) -> bool;
}

/// Dense symmetric bit matrix.
#[derive(Debug, Clone)]
pub(crate) struct BitMatrix {
    n: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub(crate) fn new(n: usize) -> Self {
        let words_per_row = n.div_ceil(64);
        BitMatrix {
            n,
            words_per_row,
            words: alloc::vec![0u64; n * words_per_row],
        }
    }

    pub(crate) fn set_sym(&mut self, a: usize, b: usize) {
        self.words[a * self.words_per_row + b / 64] |= 1u64 << (b % 64);
        self.words[b * self.words_per_row + a / 64] |= 1u64 << (a % 64);
    }

    pub(crate) fn get(&self, a: usize, b: usize) -> bool {
        debug_assert!(a < self.n && b < self.n);
        self.words[a * self.words_per_row + b / 64] & (1u64 << (b % 64)) != 0
    }
}

/// Conflict graph over the links of an [`Instance`].
///
/// Vertices are instance positions; the inductive order sorts them by
/// non-decreasing effective length with ties broken by id, which is the
/// order every scheduling algorithm in this crate scans.
#[derive(Debug, Clone)]
pub struct ConflictGraph {
    instance: Instance,
    func: ConflictFn,
    adj: BitMatrix,
    eff: Vec<f64>,
    ids: Vec<LinkId>,
    index_of: BTreeMap<LinkId, usize>,
    order: Vec<usize>,
}

impl ConflictGraph {
    /// Evaluate the conflict predicate over every pair. O(n^2).
    pub fn build(instance: Instance, func: ConflictFn) -> ConflictGraph {
        let n = instance.len();
        let alpha = instance.alpha();
        let eff: Vec<f64> = instance
            .links()
            .iter()
            .map(|l| l.effective_length(alpha))
            .collect();
        let ids: Vec<LinkId> = instance.links().iter().map(|l| l.id).collect();
        let mut adj = BitMatrix::new(n);
        for a in 0..n {
            for b in (a + 1)..n {
                let links = instance.links();
                if adjacent_with_eff(&links[a], &links[b], eff[a], eff[b], &func) {
                    adj.set_sym(a, b);
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            eff[a]
                .partial_cmp(&eff[b])
                .unwrap()
                .then_with(|| ids[a].cmp(&ids[b]))
        });
        let index_of = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        ConflictGraph {
            instance,
            func,
            adj,
            eff,
            ids,
            index_of,
            order,
        }
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn func(&self) -> ConflictFn {
        self.func
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Link ids by vertex index.
    pub fn ids(&self) -> &[LinkId] {
        &self.ids
    }

    pub fn index_of(&self, id: LinkId) -> Option<usize> {
        self.index_of.get(&id).copied()
    }

    /// Effective lengths by vertex index.
    pub fn effective_lengths(&self) -> &[f64] {
        &self.eff
    }

    /// Vertex indices in inductive order.
    pub fn order_indices(&self) -> &[usize] {
        &self.order
    }

    pub fn adjacent_ids(&self, a: LinkId, b: LinkId) -> Result<bool> {
        let ia = self.index_of(a).ok_or(Error::LinkNotFound(a))?;
        let ib = self.index_of(b).ok_or(Error::LinkNotFound(b))?;
        Ok(ia != ib && self.adj.get(ia, ib))
    }

    /// True when no two of the given links conflict.
    pub fn is_independent(&self, ids: &[LinkId]) -> Result<bool> {
        let mut indices = Vec::with_capacity(ids.len());
        for &id in ids {
            indices.push(self.index_of(id).ok_or(Error::LinkNotFound(id))?);
        }
        for (k, &a) in indices.iter().enumerate() {
            for &b in &indices[k + 1..] {
                if a != b && self.adj.get(a, b) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Edge list as id pairs `(min, max)`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(LinkId, LinkId)> {
        let n = self.len();
        let mut edges = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                if self.adj.get(a, b) {
                    let (x, y) = (self.ids[a], self.ids[b]);
                    edges.push(if x <= y { (x, y) } else { (y, x) });
                }
            }
        }
        edges.sort_unstable();
        edges
    }

    /// Ratio of the largest to the smallest effective length; 1 for fewer
    /// than two links.
    pub fn diversity(&self) -> f64 {
        diversity_of_slice(&self.eff)
    }

    /// Diversity restricted to a subset of links.
    pub fn diversity_of(&self, ids: &[LinkId]) -> Result<f64> {
        let mut effs = Vec::with_capacity(ids.len());
        for &id in ids {
            effs.push(self.eff[self.index_of(id).ok_or(Error::LinkNotFound(id))?]);
        }
        Ok(diversity_of_slice(&effs))
    }
}

fn diversity_of_slice(effs: &[f64]) -> f64 {
    if effs.len() < 2 {
        return 1.0;
    }
    let mut min = f64::INFINITY;
    let mut max = 0.0f64;
    for &e in effs {
        min = min.min(e);
        max = max.max(e);
    }
    max / min
}

impl Adjacency for ConflictGraph {
    fn vertex_count(&self) -> usize {
        self.len()
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        a != b && self.adj.get(a, b)
    }
}

//! Geometric links, SINR feasibility, and oblivious power assignments.
//!
//! A [`Link`] is a sender/receiver pair in the plane with a per-link SIR
//! threshold `beta` and a scheduling weight. Reception on link `i` succeeds
//! within a concurrently transmitting set `S` when
//!
//! ```text
//! SIR(S, i) = (P(i) / l_i^alpha) / sum_{j in S \ {i}} P(j) / d_ji^alpha  >=  beta_i
//! ```
//!
//! where `l_i` is the link length, `d_ji` the distance from `j`'s sender to
//! `i`'s receiver, `alpha` the path-loss exponent and `P` the power
//! assignment. Ambient noise is omitted: the model targets interference-
//! limited operation. The *effective length* `beta^(1/alpha) * l` folds the
//! threshold into the geometry and is the quantity all conflict-graph
//! machinery works with.
//!
//! Everything here is a pure function of immutable inputs and can be called
//! concurrently without restriction.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Identifier of a link, unique within an [`Instance`].
pub type LinkId = u64;

/// Default relative tolerance for feasibility comparisons: link `i` passes
/// when `sir >= beta_i * (1 - tol)`.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A point in the Euclidean plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Euclidean distance to `other`.
    pub fn distance(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        math::sqrt(dx * dx + dy * dy)
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// A single-hop communication request.
#[derive(Debug, Clone, PartialEq)]
pub struct Link {
    pub id: LinkId,
    pub sender: Point,
    pub receiver: Point,
    /// Minimum SIR required for successful reception. At least 1.
    pub beta: f64,
    /// Utility gained by scheduling this link. Non-negative.
    pub weight: f64,
    /// Link this one was replicated from; equals `id` for links that are not
    /// replicas. Rate-control expansion sets it on the copies it creates.
    pub origin_id: LinkId,
}

impl Link {
    /// Validating constructor. `origin_id` is set to `id`.
    pub fn new(id: LinkId, sender: Point, receiver: Point, beta: f64, weight: f64) -> Result<Link> {
        if !sender.is_finite() || !receiver.is_finite() {
            return Err(Error::NonFiniteCoordinate);
        }
        if !beta.is_finite() || beta < 1.0 {
            return Err(Error::InvalidBeta(beta));
        }
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::InvalidWeight(weight));
        }
        let link = Link {
            id,
            sender,
            receiver,
            beta,
            weight,
            origin_id: id,
        };
        if link.length() <= 0.0 {
            return Err(Error::ZeroLengthLink(id));
        }
        Ok(link)
    }

    /// Sender-to-receiver distance.
    pub fn length(&self) -> f64 {
        self.sender.distance(&self.receiver)
    }

    /// `beta^(1/alpha) * length`: the length inflated so that the per-link
    /// threshold disappears from the feasibility condition.
    pub fn effective_length(&self, alpha: f64) -> f64 {
        math::powf(self.beta, 1.0 / alpha) * self.length()
    }
}

/// Distance from `i`'s sender to `j`'s receiver (`d_ij`).
pub fn directed_distance(i: &Link, j: &Link) -> f64 {
    i.sender.distance(&j.receiver)
}

/// Minimum distance between the endpoints of two links.
pub fn link_distance(i: &Link, j: &Link) -> f64 {
    let a = i.sender.distance(&j.sender);
    let b = i.sender.distance(&j.receiver);
    let c = i.receiver.distance(&j.sender);
    let d = i.receiver.distance(&j.receiver);
    a.min(b).min(c.min(d))
}

/// Transmit power rule local to each link. Powers are defined up to a common
/// positive scale factor, which cancels in every SIR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerAssignment {
    /// Every sender transmits with the same power.
    Uniform,
    /// Power proportional to `effective_length^(tau * alpha)`, `tau` in (0, 1).
    /// Interpolates between uniform (`tau -> 0`) and linear (`tau -> 1`)
    /// power scaling.
    LengthScaled { tau: f64 },
}

impl PowerAssignment {
    /// Length-scaled assignment, validating `0 < tau < 1`.
    pub fn length_scaled(tau: f64) -> Result<Self> {
        if !tau.is_finite() || tau <= 0.0 || tau >= 1.0 {
            return Err(Error::InvalidTau(tau));
        }
        Ok(PowerAssignment::LengthScaled { tau })
    }

    /// Power used by `link`'s sender.
    pub fn power(&self, link: &Link, alpha: f64) -> f64 {
        match self {
            PowerAssignment::Uniform => 1.0,
            PowerAssignment::LengthScaled { tau } => {
                math::powf(link.effective_length(alpha), tau * alpha)
            }
        }
    }
}

/// A set of links plus the model parameters they live under.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    alpha: f64,
    m: u32,
    links: Vec<Link>,
}

impl Instance {
    /// Doubling dimension of the plane.
    pub const DIMENSION: u32 = 2;

    /// Validating constructor: requires `alpha > 2` and pairwise distinct
    /// link ids.
    pub fn new(alpha: f64, links: Vec<Link>) -> Result<Instance> {
        if !alpha.is_finite() || alpha <= Self::DIMENSION as f64 {
            return Err(Error::InvalidAlpha {
                alpha,
                m: Self::DIMENSION,
            });
        }
        let mut ids: Vec<LinkId> = links.iter().map(|l| l.id).collect();
        ids.sort_unstable();
        for pair in ids.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateLinkId(pair[0]));
            }
        }
        Ok(Instance {
            alpha,
            m: Self::DIMENSION,
            links,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Doubling dimension; always 2 in this planar implementation.
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn link(&self, id: LinkId) -> Option<&Link> {
        self.links.iter().find(|l| l.id == id)
    }
}

/// Outcome of a feasibility check over a set of links.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    /// True when every link's SIR clears its threshold (up to the tolerance).
    pub feasible: bool,
    /// SIR per link; `f64::INFINITY` for a link with no interferers.
    pub per_link_sir: BTreeMap<LinkId, f64>,
    /// Link with the smallest `sir / beta` ratio, if the set is nonempty.
    pub worst_link: Option<LinkId>,
}

/// SIR of link `id` within the concurrently transmitting set `links`.
///
/// Returns `f64::INFINITY` when `id` is the only member, and 0 when some
/// interferer sits exactly on `id`'s receiver.
pub fn sir(links: &[Link], id: LinkId, power: &PowerAssignment, alpha: f64) -> Result<f64> {
    let target = links
        .iter()
        .find(|l| l.id == id)
        .ok_or(Error::LinkNotFound(id))?;
    Ok(sir_of(links, target, power, alpha))
}

fn sir_of(links: &[Link], target: &Link, power: &PowerAssignment, alpha: f64) -> f64 {
    let signal = power.power(target, alpha) / math::powf(target.length(), alpha);
    let mut interference = 0.0;
    for j in links {
        if j.id == target.id {
            continue;
        }
        let d = directed_distance(j, target);
        interference += power.power(j, alpha) / math::powf(d, alpha);
    }
    if interference == 0.0 {
        f64::INFINITY
    } else {
        signal / interference
    }
}

/// Check whether `links` can all transmit concurrently under `power`.
///
/// Link `i` passes when `sir >= beta_i * (1 - tol)`; the empty set is
/// trivially feasible.
pub fn is_feasible(
    links: &[Link],
    power: &PowerAssignment,
    alpha: f64,
    tol: f64,
) -> FeasibilityReport {
    let mut per_link_sir = BTreeMap::new();
    let mut feasible = true;
    let mut worst: Option<(LinkId, f64)> = None;
    for link in links {
        let s = sir_of(links, link, power, alpha);
        per_link_sir.insert(link.id, s);
        if s < link.beta * (1.0 - tol) {
            feasible = false;
        }
        let ratio = s / link.beta;
        let replace = match worst {
            None => true,
            Some((_, r)) => ratio < r,
        };
        if replace {
            worst = Some((link.id, ratio));
        }
    }
    FeasibilityReport {
        feasible,
        per_link_sir,
        worst_link: worst.map(|(id, _)| id),
    }
}

/// Closed-form test for whether the pair `{i, j}` is feasible under *some*
/// power assignment: holds iff `d_ij * d_ji >= eff_i * eff_j`.
///
/// Solving the two SIR constraints for the power ratio `P(i)/P(j)` leaves a
/// nonempty interval exactly under this product condition; the boundary is
/// treated as feasible.
pub fn is_pair_feasible(i: &Link, j: &Link, alpha: f64) -> bool {
    let dij = directed_distance(i, j);
    let dji = directed_distance(j, i);
    dij * dji >= i.effective_length(alpha) * j.effective_length(alpha)
}

/// Normalized interference on `target` from `links` under the length-scaled
/// power rule with exponent `tau`:
///
/// ```text
/// sum_{j != target} eff_j^(tau alpha) * eff_target^((1-tau) alpha) / d_j,target^alpha
/// ```
///
/// A set is feasible under that assignment (with exact thresholds) precisely
/// when this sum stays below 1 for every member.
pub fn tau_interference(links: &[Link], target: &Link, tau: f64, alpha: f64) -> f64 {
    debug_assert!(tau > 0.0 && tau < 1.0);
    let eff_target = math::powf(target.effective_length(alpha), (1.0 - tau) * alpha);
    let mut total = 0.0;
    for j in links {
        if j.id == target.id {
            continue;
        }
        let d = directed_distance(j, target);
        total +=
            math::powf(j.effective_length(alpha), tau * alpha) * eff_target / math::powf(d, alpha);
    }
    total
}

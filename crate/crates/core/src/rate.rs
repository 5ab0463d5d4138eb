//! Rate control by expansion into fixed-weight replicas.
//!
//! A link whose utility depends on its achieved SIR is replaced by co-located
//! copies, one per candidate rate level: copy `k` carries the level's utility
//! as a fixed weight and the smallest SIR threshold that reaches it as its
//! `beta`. Copies of one link always conflict with each other in any graph
//! built at `gamma >= 1`, so an independent-set solver over the expanded
//! instance implicitly picks at most one rate per link; collapsing maps the
//! chosen copies back to their originals.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::model::{Instance, Link, LinkId};
use crate::schedule::WeightedSolution;

/// Bisection bracket and tolerance for inverting monotone utilities.
const INVERT_HI: f64 = (1u64 << 60) as f64;
const INVERT_TOL: f64 = 1e-9;

/// One discrete rate level: the SIR threshold required and the utility won.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityLevel {
    /// Minimum SIR at which this level's rate is sustained; at least 1.
    pub beta: f64,
    /// Utility of scheduling the link at this level; positive.
    pub utility: f64,
}

/// Monotone non-decreasing utility of SIR, zero below SIR 1.
///
/// `u_min`/`u_max` bound the attainable utilities for the instance at hand
/// and drive both the geometric level grid and the diversity measure.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneUtility {
    pub u_min: f64,
    pub u_max: f64,
    pub kind: MonotoneKind,
}

/// Shape of a monotone utility curve.
#[derive(Debug, Clone, PartialEq)]
pub enum MonotoneKind {
    /// `u(x) = scale * log2(1 + x)` — Shannon-style rate curve.
    Log2Shannon { scale: f64 },
    /// `u(x) = slope * x + intercept`, slope >= 0.
    Linear { slope: f64, intercept: f64 },
    /// Piecewise-linear interpolation through `(x, u)` points sorted by `x`;
    /// clamped outside the covered range.
    Table { points: Vec<(f64, f64)> },
}

impl MonotoneUtility {
    /// Evaluate at SIR `x`; zero below 1 by convention.
    pub fn eval(&self, x: f64) -> f64 {
        if x < 1.0 {
            return 0.0;
        }
        match &self.kind {
            MonotoneKind::Log2Shannon { scale } => scale * math::log2(1.0 + x),
            MonotoneKind::Linear { slope, intercept } => slope * x + intercept,
            MonotoneKind::Table { points } => {
                if points.is_empty() {
                    return 0.0;
                }
                if x <= points[0].0 {
                    return points[0].1;
                }
                let last = points[points.len() - 1];
                if x >= last.0 {
                    return last.1;
                }
                for w in points.windows(2) {
                    let (x0, u0) = w[0];
                    let (x1, u1) = w[1];
                    if x <= x1 {
                        return u0 + (u1 - u0) * (x - x0) / (x1 - x0);
                    }
                }
                last.1
            }
        }
    }
}

/// Per-link utility: either explicit levels or a monotone curve.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilitySpec {
    pub link_id: LinkId,
    pub form: UtilityForm,
}

#[derive(Debug, Clone, PartialEq)]
pub enum UtilityForm {
    /// Levels sorted by increasing utility.
    Levels(Vec<UtilityLevel>),
    Monotone(MonotoneUtility),
}

impl UtilitySpec {
    fn validate(&self) -> Result<()> {
        match &self.form {
            UtilityForm::Levels(levels) => {
                if levels.is_empty() {
                    return Err(Error::EmptyLevels(self.link_id));
                }
                let mut prev = 0.0f64;
                for level in levels {
                    if !level.beta.is_finite() || level.beta < 1.0 {
                        return Err(Error::InvalidLevels(self.link_id));
                    }
                    if !level.utility.is_finite() || level.utility <= prev {
                        return Err(Error::InvalidLevels(self.link_id));
                    }
                    prev = level.utility;
                }
                Ok(())
            }
            UtilityForm::Monotone(m) => {
                let ok = m.u_min.is_finite()
                    && m.u_max.is_finite()
                    && m.u_min > 0.0
                    && m.u_min <= m.u_max;
                let kind_ok = match &m.kind {
                    MonotoneKind::Log2Shannon { scale } => *scale > 0.0 && scale.is_finite(),
                    MonotoneKind::Linear { slope, intercept } => {
                        *slope >= 0.0 && slope.is_finite() && intercept.is_finite()
                    }
                    MonotoneKind::Table { points } => {
                        !points.is_empty()
                            && points
                                .windows(2)
                                .all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1)
                            && points.iter().all(|p| p.0.is_finite() && p.1.is_finite())
                    }
                };
                if ok && kind_ok {
                    Ok(())
                } else {
                    Err(Error::InvalidLevels(self.link_id))
                }
            }
        }
    }

    /// Utility range covered by this specification.
    fn bounds(&self) -> (f64, f64) {
        match &self.form {
            UtilityForm::Levels(levels) => (levels[0].utility, levels[levels.len() - 1].utility),
            UtilityForm::Monotone(m) => (m.u_min, m.u_max),
        }
    }
}

/// Rate level carried by one replica of an expanded instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CopyLevel {
    pub origin: LinkId,
    pub weight: f64,
    pub beta: f64,
}

/// Fixed-weight instance produced by rate-control expansion. Replicas of one
/// original share its exact geometry and record it in `origin_id`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpandedInstance {
    pub instance: Instance,
    /// Replica id -> its level.
    pub levels: BTreeMap<LinkId, CopyLevel>,
}

fn specs_by_link(specs: &[UtilitySpec]) -> BTreeMap<LinkId, &UtilitySpec> {
    specs.iter().map(|s| (s.link_id, s)).collect()
}

fn push_copy(
    original: &Link,
    next_id: &mut LinkId,
    weight: f64,
    beta: f64,
    links: &mut Vec<Link>,
    levels: &mut BTreeMap<LinkId, CopyLevel>,
) {
    let id = *next_id;
    *next_id += 1;
    links.push(Link {
        id,
        sender: original.sender,
        receiver: original.receiver,
        beta,
        weight,
        origin_id: original.id,
    });
    levels.insert(
        id,
        CopyLevel {
            origin: original.id,
            weight,
            beta,
        },
    );
}

/// Expand discrete utility levels into one replica per (link, level).
///
/// Every link needs a spec in level form; thresholds below 1 are rejected at
/// validation since sub-unit SIR yields zero utility.
pub fn expand_discrete(inst: &Instance, specs: &[UtilitySpec]) -> Result<ExpandedInstance> {
    let by_link = specs_by_link(specs);
    let mut next_id = fresh_id_start(inst);
    let mut links = Vec::new();
    let mut levels = BTreeMap::new();
    for original in inst.links() {
        let spec = by_link
            .get(&original.id)
            .ok_or(Error::MissingUtility(original.id))?;
        spec.validate()?;
        let UtilityForm::Levels(lvls) = &spec.form else {
            return Err(Error::WrongUtilityForm(original.id));
        };
        for level in lvls {
            push_copy(
                original,
                &mut next_id,
                level.utility,
                level.beta,
                &mut links,
                &mut levels,
            );
        }
    }
    Ok(ExpandedInstance {
        instance: Instance::new(inst.alpha(), links)?,
        levels,
    })
}

/// Expand monotone utilities onto a geometric weight grid.
///
/// Levels are the powers of two `w` with `u_min / 2 < w <= u_max`, so every
/// attainable utility sits within a factor 2 of some kept level. Each level's
/// threshold is the least SIR reaching it, found by bisection to absolute
/// tolerance 1e-9 within `[1, 2^60]`; levels unreachable inside that bracket
/// are dropped. Only the heaviest `ceil(2*log2(n)) + 1` levels per link are
/// kept, `n` being the instance size driving the approximation target.
pub fn expand_geometric(
    inst: &Instance,
    specs: &[UtilitySpec],
    n: usize,
) -> Result<ExpandedInstance> {
    let by_link = specs_by_link(specs);
    let keep = math::ceil(2.0 * math::log2(n.max(1) as f64)) as usize + 1;
    let mut next_id = fresh_id_start(inst);
    let mut links = Vec::new();
    let mut levels = BTreeMap::new();
    for original in inst.links() {
        let spec = by_link
            .get(&original.id)
            .ok_or(Error::MissingUtility(original.id))?;
        spec.validate()?;
        let UtilityForm::Monotone(curve) = &spec.form else {
            return Err(Error::WrongUtilityForm(original.id));
        };
        // exponent range: u_min / 2 < 2^k <= u_max
        let k_hi = math::floor(math::log2(curve.u_max)) as i64;
        let k_lo = k_hi - exponent_span(curve.u_min, k_hi);
        let mut chosen: Vec<(f64, f64)> = Vec::new(); // (weight, beta), ascending weight
        for k in k_lo..=k_hi {
            let weight = math::powf(2.0, k as f64);
            if weight > curve.u_max || 2.0 * weight <= curve.u_min {
                continue;
            }
            if let Some(beta) = invert_monotone(curve, weight, original.id)? {
                chosen.push((weight, beta));
            }
        }
        if chosen.len() > keep {
            let cut = chosen.len() - keep;
            chosen.drain(..cut);
        }
        for (weight, beta) in chosen {
            push_copy(
                original,
                &mut next_id,
                weight,
                beta,
                &mut links,
                &mut levels,
            );
        }
    }
    Ok(ExpandedInstance {
        instance: Instance::new(inst.alpha(), links)?,
        levels,
    })
}

/// Number of power-of-two steps from `2^k_hi` down to the first level at or
/// below `u_min / 2`, padded by one step against log2 rounding.
fn exponent_span(u_min: f64, k_hi: i64) -> i64 {
    let k_min = math::floor(math::log2(u_min)) as i64 - 1;
    (k_hi - k_min + 1).max(1)
}

/// Least `x` with `u(x) >= target`, or None when the bracket cannot reach it.
fn invert_monotone(curve: &MonotoneUtility, target: f64, id: LinkId) -> Result<Option<f64>> {
    let u_lo = curve.eval(1.0);
    if u_lo >= target {
        return Ok(Some(1.0));
    }
    let u_hi = curve.eval(INVERT_HI);
    if u_hi < target {
        return Ok(None);
    }
    let mut lo = 1.0f64;
    let mut hi = INVERT_HI;
    let mut u_at_lo = u_lo;
    let mut u_at_hi = u_hi;
    while hi - lo > INVERT_TOL {
        let mid = lo / 2.0 + hi / 2.0;
        if mid <= lo || mid >= hi {
            // float resolution reached before the tolerance; hi is the
            // tightest representable threshold
            break;
        }
        let u_mid = curve.eval(mid);
        if u_mid < u_at_lo || u_mid > u_at_hi {
            return Err(Error::NonMonotoneUtility(id));
        }
        if u_mid >= target {
            hi = mid;
            u_at_hi = u_mid;
        } else {
            lo = mid;
            u_at_lo = u_mid;
        }
    }
    Ok(Some(hi))
}

fn fresh_id_start(inst: &Instance) -> LinkId {
    inst.links().iter().map(|l| l.id).max().map_or(0, |m| m + 1)
}

/// Utility-weighted diversity `max_i(u_max_i * l_i) / min_j(u_min_j * l_j)`.
///
/// Plays the role of the length diversity for rate-control instances: the
/// approximation quality of the expanded problem degrades only doubly-
/// logarithmically in this ratio.
pub fn delta_prime(inst: &Instance, specs: &[UtilitySpec]) -> Result<f64> {
    let by_link = specs_by_link(specs);
    let mut hi = 0.0f64;
    let mut lo = f64::INFINITY;
    for link in inst.links() {
        let spec = by_link
            .get(&link.id)
            .ok_or(Error::MissingUtility(link.id))?;
        spec.validate()?;
        let (u_min, u_max) = spec.bounds();
        let len = link.length();
        hi = hi.max(u_max * len);
        lo = lo.min(u_min * len);
    }
    if inst.is_empty() {
        return Ok(1.0);
    }
    Ok(hi / lo)
}

/// Map a solution over the expanded instance back to original links.
///
/// Errors when two selected replicas share an origin, which cannot happen
/// for solutions independent in a conflict graph built at `gamma >= 1`
/// (co-located replicas always conflict there). Total weight is preserved.
pub fn collapse_solution(
    exp: &ExpandedInstance,
    sol: &WeightedSolution,
) -> Result<WeightedSolution> {
    let mut selected = Vec::with_capacity(sol.selected.len());
    let mut total = 0.0;
    for &copy_id in &sol.selected {
        let level = exp
            .levels
            .get(&copy_id)
            .ok_or(Error::LinkNotFound(copy_id))?;
        if selected.contains(&level.origin) {
            return Err(Error::DuplicateOrigin(level.origin));
        }
        selected.push(level.origin);
        total += level.weight;
    }
    selected.sort_unstable();
    Ok(WeightedSolution {
        selected,
        total_weight: total,
    })
}

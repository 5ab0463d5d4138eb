//! Binary search for the conflict scale `gamma`.
//!
//! Smaller `gamma` means fewer conflicts and better objectives, but below
//! some point the emitted independent sets stop being physically feasible
//! under the matching power assignment. The search bisects `gamma` in log
//! space, accepting a value only when every set the algorithm emits at that
//! scale re-verifies as feasible, and returns the best verified outcome.

use std::collections::BTreeMap;
use std::fmt;

use linksched_core::graph::{ConflictFn, ConflictGraph};
use linksched_core::mcma::{build_mcma_graph, expand_virtual, NodeCaps, NodeKey, VirtualLink};
use linksched_core::model::{is_feasible, Instance, Link, LinkId, PowerAssignment, DEFAULT_TOL};
use linksched_core::schedule::{
    first_fit_classes, first_fit_coloring, inductive_order, local_ratio_mwis_link_weights,
    local_ratio_select,
};

/// Which algorithm the search runs and verifies at each probed scale.
#[derive(Debug, Clone, PartialEq)]
pub enum SearchAlgorithm {
    /// Local-ratio weighted independent set; objective: total weight.
    Mwis,
    /// First-fit coloring in inductive order; objective: fewer classes.
    FirstFitColoring,
    /// The MC-MA pipeline under these node capabilities: first-fit classes
    /// of the virtual-link graph plus its weighted selection, verified per
    /// channel; objective: fewer classes. Pairwise independence of the base
    /// graph does not bound cumulative per-channel interference, so the
    /// scale must be tuned against the virtual-link sets themselves.
    McmaFirstFit(BTreeMap<NodeKey, NodeCaps>),
}

/// Result of a successful search.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSearchOutcome {
    /// Best verified scale.
    pub gamma: f64,
    /// Objective at that scale (total weight, or minus the class count).
    pub objective: f64,
    /// Number of scales evaluated.
    pub evaluations: u32,
}

/// The upper bound itself failed verification; nothing can be returned.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaSearchError {
    pub hi: f64,
    /// Worst `sir / beta` ratio observed at the upper bound.
    pub worst_ratio: f64,
    /// Link attaining it.
    pub worst_link: Option<LinkId>,
}

impl fmt::Display for GammaSearchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "even gamma = {} produced an infeasible set (worst sir/beta {} at link {:?})",
            self.hi, self.worst_ratio, self.worst_link
        )
    }
}

impl std::error::Error for GammaSearchError {}

const BISECTION_STEPS: u32 = 20;

struct Evaluation {
    feasible: bool,
    objective: f64,
    worst_ratio: f64,
    worst_link: Option<LinkId>,
}

impl Evaluation {
    fn new(objective: f64) -> Self {
        Evaluation {
            feasible: true,
            objective,
            worst_ratio: f64::INFINITY,
            worst_link: None,
        }
    }

    /// Fold one emitted set's feasibility report into the evaluation.
    fn absorb(&mut self, inst: &Instance, members: &[Link], power: &PowerAssignment) {
        let report = is_feasible(members, power, inst.alpha(), DEFAULT_TOL);
        if !report.feasible {
            self.feasible = false;
        }
        if let Some(w) = report.worst_link {
            let ratio = report.per_link_sir[&w] / inst.link(w).unwrap().beta;
            if ratio < self.worst_ratio {
                self.worst_ratio = ratio;
                self.worst_link = Some(w);
            }
        }
    }
}

fn members_of(inst: &Instance, ids: &[LinkId]) -> Vec<Link> {
    ids.iter()
        .map(|&id| inst.link(id).expect("solver emits known ids").clone())
        .collect()
}

/// Virtual links grouped as per-channel original sets, deduplicated.
fn per_channel_originals(vlinks: &[VirtualLink]) -> BTreeMap<u32, Vec<LinkId>> {
    let mut by_channel: BTreeMap<u32, Vec<LinkId>> = BTreeMap::new();
    for v in vlinks {
        let entry = by_channel.entry(v.channel).or_default();
        if !entry.contains(&v.original) {
            entry.push(v.original);
        }
    }
    by_channel
}

fn evaluate(
    inst: &Instance,
    delta: f64,
    tau: f64,
    gamma: f64,
    algo: &SearchAlgorithm,
) -> Evaluation {
    let power = PowerAssignment::length_scaled(tau).expect("tau validated by caller");
    let func = ConflictFn::new(gamma, delta).expect("search bounds keep gamma >= 1");
    let graph = ConflictGraph::build(inst.clone(), func);
    match algo {
        SearchAlgorithm::Mwis => {
            let sol = local_ratio_mwis_link_weights(&graph);
            let mut eval = Evaluation::new(sol.total_weight);
            eval.absorb(inst, &members_of(inst, &sol.selected), &power);
            eval
        }
        SearchAlgorithm::FirstFitColoring => {
            let coloring = first_fit_coloring(&graph, &inductive_order(&graph))
                .expect("inductive order is a permutation");
            let mut eval = Evaluation::new(-(coloring.num_classes() as f64));
            for class in &coloring.classes {
                eval.absorb(inst, &members_of(inst, class), &power);
            }
            eval
        }
        SearchAlgorithm::McmaFirstFit(caps) => {
            let vlinks = expand_virtual(inst, caps).expect("caps must cover every node");
            let vgraph =
                build_mcma_graph(vlinks, &graph).expect("virtual links come from this instance");
            let classes = first_fit_classes(&vgraph, vgraph.order_indices());
            let mut eval = Evaluation::new(-(classes.len() as f64));
            let weights: Vec<f64> = vgraph
                .vlinks()
                .iter()
                .map(|v| inst.link(v.original).map_or(0.0, |l| l.weight))
                .collect();
            let (selection, _) = local_ratio_select(&vgraph, vgraph.order_indices(), &weights);
            let mut emitted: Vec<Vec<VirtualLink>> = classes
                .into_iter()
                .map(|class| class.into_iter().map(|v| vgraph.vlinks()[v]).collect())
                .collect();
            emitted.push(selection.into_iter().map(|v| vgraph.vlinks()[v]).collect());
            for set in &emitted {
                for originals in per_channel_originals(set).values() {
                    eval.absorb(inst, &members_of(inst, originals), &power);
                }
            }
            eval
        }
    }
}

/// Bisect `gamma` in `[lo, hi]` (log-space midpoints, 20 steps), keeping the
/// verified scale with the best objective. Deterministic in its inputs.
///
/// Errors when even `hi` fails verification, carrying the worst violation
/// for diagnostics.
pub fn binary_search_gamma(
    inst: &Instance,
    delta: f64,
    tau: f64,
    lo: f64,
    hi: f64,
    algo: SearchAlgorithm,
) -> Result<GammaSearchOutcome, GammaSearchError> {
    assert!(
        lo >= 1.0 && hi <= (1u64 << 20) as f64 && lo <= hi,
        "bounds must sit in [1, 2^20]"
    );
    let mut evaluations = 0u32;
    let mut best: Option<(f64, f64)> = None; // (gamma, objective)

    let consider = |gamma: f64, best: &mut Option<(f64, f64)>| -> Evaluation {
        let eval = evaluate(inst, delta, tau, gamma, &algo);
        if eval.feasible {
            let better = match best {
                None => true,
                Some((g, obj)) => eval.objective > *obj || (eval.objective == *obj && gamma < *g),
            };
            if better {
                *best = Some((gamma, eval.objective));
            }
        }
        eval
    };

    let top = consider(hi, &mut best);
    evaluations += 1;
    if !top.feasible {
        return Err(GammaSearchError {
            hi,
            worst_ratio: top.worst_ratio,
            worst_link: top.worst_link,
        });
    }
    if lo < hi {
        consider(lo, &mut best);
        evaluations += 1;
    }

    let mut lo_cur = lo.ln();
    let mut hi_cur = hi.ln();
    for _ in 0..BISECTION_STEPS {
        let mid = ((lo_cur + hi_cur) / 2.0).exp();
        let eval = consider(mid, &mut best);
        evaluations += 1;
        if eval.feasible {
            hi_cur = mid.ln();
        } else {
            lo_cur = mid.ln();
        }
    }

    let (gamma, objective) = best.expect("hi verified feasible above");
    Ok(GammaSearchOutcome {
        gamma,
        objective,
        evaluations,
    })
}

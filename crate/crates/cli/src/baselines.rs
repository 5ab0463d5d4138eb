//! Greedy feasibility baselines for weighted link selection.

use linksched_core::model::{is_feasible, Instance, Link, PowerAssignment, DEFAULT_TOL};
use linksched_core::schedule::WeightedSolution;

/// Greedy accept/reject scan in increasing length-by-weight order.
///
/// Each candidate joins the accumulated set only if the whole set stays
/// feasible under `power`, so the output is feasible by construction and
/// re-verifies against [`is_feasible`] exactly.
pub fn greedy_feasibility_heuristic(inst: &Instance, power: &PowerAssignment) -> WeightedSolution {
    let mut order: Vec<&Link> = inst.links().iter().collect();
    order.sort_by(|a, b| {
        let ka = a.length() / a.weight;
        let kb = b.length() / b.weight;
        ka.partial_cmp(&kb).unwrap().then_with(|| a.id.cmp(&b.id))
    });
    greedy_accept(inst, power, &order)
}

fn greedy_accept(inst: &Instance, power: &PowerAssignment, order: &[&Link]) -> WeightedSolution {
    let alpha = inst.alpha();
    let mut chosen: Vec<Link> = Vec::new();
    for &cand in order {
        chosen.push(cand.clone());
        if !is_feasible(&chosen, power, alpha, DEFAULT_TOL).feasible {
            chosen.pop();
        }
    }
    let mut selected: Vec<_> = chosen.iter().map(|l| l.id).collect();
    selected.sort_unstable();
    let total_weight = chosen.iter().map(|l| l.weight).sum();
    WeightedSolution {
        selected,
        total_weight,
    }
}

/// Partition links into factor-2 weight classes, run the uniform greedy
/// (increasing length) on each class, and keep the heaviest class solution.
///
/// Expects weights >= 1. Provably logarithmic in the worst case but usually
/// dominated by the plain greedy; reported as-is.
pub fn weight_class_baseline(inst: &Instance, power: &PowerAssignment) -> WeightedSolution {
    let mut classes: std::collections::BTreeMap<i32, Vec<&Link>> =
        std::collections::BTreeMap::new();
    for l in inst.links() {
        let class = l.weight.log2().floor() as i32;
        classes.entry(class).or_default().push(l);
    }
    let mut best = WeightedSolution {
        selected: Vec::new(),
        total_weight: 0.0,
    };
    for mut members in classes.into_values() {
        members.sort_by(|a, b| {
            a.length()
                .partial_cmp(&b.length())
                .unwrap()
                .then_with(|| a.id.cmp(&b.id))
        });
        let sol = greedy_accept(inst, power, &members);
        if sol.total_weight > best.total_weight {
            best = sol;
        }
    }
    best
}

/// Weight-class index of a weight: floor(log2(w)).
pub fn weight_class_of(weight: f64) -> i32 {
    weight.log2().floor() as i32
}

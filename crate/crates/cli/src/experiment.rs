//! Monte Carlo experiment runner: weighted link selection on random
//! instances across a grid of length-diversity values.
//!
//! For each `l_max` and trial, one instance is generated and every
//! configured algorithm scores it; rows aggregate the mean and sample
//! standard deviation over trials. Every reported solution is re-verified
//! feasible under its power assignment before being counted; a trial whose
//! algorithm produces nothing verifiable contributes zero and the run
//! continues.

use linksched_core::graph::{choose_tau, delta_min};
use linksched_core::model::{is_feasible, Instance, Link, PowerAssignment, DEFAULT_TOL};
use linksched_core::schedule::WeightedSolution;

use crate::baselines::{greedy_feasibility_heuristic, weight_class_baseline};
use crate::gamma::{binary_search_gamma, SearchAlgorithm};
use crate::instances::{gen_random_instance, GenConfig};

/// Algorithms the experiment can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Conflict-graph weighted independent set, once per configured epsilon.
    ConflictGraphMwis,
    /// Greedy feasibility scan in length-by-weight order.
    GreedyFeasibility,
    /// Factor-2 weight classes, uniform greedy per class, best class kept.
    WeightClass,
}

impl Algorithm {
    pub fn label(&self) -> &'static str {
        match self {
            Algorithm::ConflictGraphMwis => "conflict_graph_mwis",
            Algorithm::GreedyFeasibility => "greedy_feasibility",
            Algorithm::WeightClass => "weight_class",
        }
    }

    pub fn from_label(label: &str) -> Option<Algorithm> {
        match label {
            "conflict_graph_mwis" => Some(Algorithm::ConflictGraphMwis),
            "greedy_feasibility" => Some(Algorithm::GreedyFeasibility),
            "weight_class" => Some(Algorithm::WeightClass),
            _ => None,
        }
    }
}

/// Full experiment description; mirrors the JSON config file.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub lmax_values: Vec<f64>,
    pub side: f64,
    pub alpha: f64,
    pub beta: f64,
    pub trials: u32,
    pub seed: u64,
    pub algorithms: Vec<Algorithm>,
    /// Conflict exponent offsets: delta = delta_min + eps * (1 - delta_min).
    pub epsilons: Vec<f64>,
}

impl ExperimentConfig {
    /// Default benchmark grid: 400 links in a 1000 x 1000 square,
    /// alpha 2.8, beta 1, 20 trials, diversity grid {10, 50, 100, 250},
    /// epsilons 0.1 and 0.9.
    pub fn study_defaults(seed: u64) -> Self {
        ExperimentConfig {
            n: 400,
            lmax_values: vec![10.0, 50.0, 100.0, 250.0],
            side: 1000.0,
            alpha: 2.8,
            beta: 1.0,
            trials: 20,
            seed,
            algorithms: vec![
                Algorithm::GreedyFeasibility,
                Algorithm::ConflictGraphMwis,
                Algorithm::WeightClass,
            ],
            epsilons: vec![0.1, 0.9],
        }
    }
}

/// One aggregated CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub l_max: f64,
    pub algorithm: String,
    pub epsilon: Option<f64>,
    pub mean_weight: f64,
    pub std_weight: f64,
    pub trials: u32,
    pub seed: u64,
}

fn mean_std(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Verify a solution against the physical model; zero it out (with a note on
/// stderr) if it fails, so a bad trial cannot inflate a mean.
fn verified_weight(inst: &Instance, sol: &WeightedSolution, power: &PowerAssignment) -> f64 {
    let members: Vec<Link> = sol
        .selected
        .iter()
        .filter_map(|&id| inst.link(id).cloned())
        .collect();
    if members.len() != sol.selected.len() {
        eprintln!("warning: solution references unknown links; counting 0");
        return 0.0;
    }
    if is_feasible(&members, power, inst.alpha(), DEFAULT_TOL).feasible {
        sol.total_weight
    } else {
        eprintln!("warning: emitted solution failed re-verification; counting 0");
        0.0
    }
}

/// Objective of the conflict-graph algorithm on one instance at one epsilon.
/// The scale is tuned per instance by binary search; a failed search counts
/// zero for the trial.
fn conflict_graph_objective(inst: &Instance, epsilon: f64) -> f64 {
    let alpha = inst.alpha();
    let dm = delta_min(alpha, 2).expect("alpha validated at generation");
    let delta = dm + epsilon * (1.0 - dm);
    let tau = choose_tau(delta, alpha, 2).expect("delta above delta_min");
    match binary_search_gamma(
        inst,
        delta,
        tau,
        1.0,
        (1u64 << 20) as f64,
        SearchAlgorithm::Mwis,
    ) {
        Ok(outcome) => outcome.objective,
        Err(err) => {
            eprintln!("warning: gamma search failed ({err}); counting 0");
            0.0
        }
    }
}

/// Run the whole experiment grid. Deterministic in the configuration.
pub fn run_experiment(cfg: &ExperimentConfig) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    // baselines check feasibility under the midpoint-exponent assignment
    let dm = delta_min(cfg.alpha, 2).expect("alpha must exceed 2");
    let delta_mid = dm + 0.5 * (1.0 - dm);
    let tau = choose_tau(delta_mid, cfg.alpha, 2).expect("midpoint delta is admissible");
    let power = PowerAssignment::length_scaled(tau).expect("tau lies in (0,1)");

    for &l_max in &cfg.lmax_values {
        let gen = GenConfig {
            n: cfg.n,
            l_max,
            side: cfg.side,
            alpha: cfg.alpha,
            beta_range: (cfg.beta, cfg.beta),
            seed: cfg.seed,
        };
        let instances: Vec<Instance> = (0..cfg.trials)
            .map(|t| gen_random_instance(&gen, t))
            .collect();

        for &algorithm in &cfg.algorithms {
            match algorithm {
                Algorithm::ConflictGraphMwis => {
                    for &eps in &cfg.epsilons {
                        let samples: Vec<f64> = instances
                            .iter()
                            .map(|inst| conflict_graph_objective(inst, eps))
                            .collect();
                        let (mean, std) = mean_std(&samples);
                        rows.push(ResultRow {
                            l_max,
                            algorithm: algorithm.label().to_string(),
                            epsilon: Some(eps),
                            mean_weight: mean,
                            std_weight: std,
                            trials: cfg.trials,
                            seed: cfg.seed,
                        });
                    }
                }
                Algorithm::GreedyFeasibility | Algorithm::WeightClass => {
                    let samples: Vec<f64> = instances
                        .iter()
                        .map(|inst| {
                            let sol = match algorithm {
                                Algorithm::GreedyFeasibility => {
                                    greedy_feasibility_heuristic(inst, &power)
                                }
                                _ => weight_class_baseline(inst, &power),
                            };
                            verified_weight(inst, &sol, &power)
                        })
                        .collect();
                    let (mean, std) = mean_std(&samples);
                    rows.push(ResultRow {
                        l_max,
                        algorithm: algorithm.label().to_string(),
                        epsilon: None,
                        mean_weight: mean,
                        std_weight: std,
                        trials: cfg.trials,
                        seed: cfg.seed,
                    });
                }
            }
        }
    }
    rows
}

/// Render rows as CSV with the fixed schema
/// `l_max,algorithm,epsilon,mean_weight,std_weight,trials,seed`.
pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from("l_max,algorithm,epsilon,mean_weight,std_weight,trials,seed\n");
    for r in rows {
        let eps = r.epsilon.map(|e| e.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.l_max, r.algorithm, eps, r.mean_weight, r.std_weight, r.trials, r.seed
        ));
    }
    out
}

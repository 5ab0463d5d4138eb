//! Command-line interface.
//!
//! Subcommands:
//!   gen       generate a random instance file
//!   graph     build a conflict graph and write it as JSON
//!   tdma      first-fit slot assignment (graph coloring)
//!   mwis      weighted independent set (optionally with rate control)
//!   channels  greedy multi-channel selection
//!   mcma      multi-channel multi-antenna selection over virtual links
//!   bench     run the Monte Carlo experiment grid and write CSV
//!
//! Every solution-emitting command re-checks its own output: independence in
//! the graph it built, plus physical feasibility whenever the conflict
//! exponent admits a power assignment. A violated invariant exits nonzero
//! with a diagnostic on stderr.

use std::collections::BTreeMap;
use std::fs;

use serde_json::json;

use linksched_core::graph::{choose_tau, ConflictFn, ConflictGraph};
use linksched_core::mcma::{build_mcma_graph, expand_virtual, mcma_feasible_check};
use linksched_core::model::{is_feasible, Instance, Link, LinkId, PowerAssignment, DEFAULT_TOL};
use linksched_core::rate::{collapse_solution, expand_discrete, expand_geometric, UtilityForm};
use linksched_core::schedule::{
    first_fit_coloring, greedy_multichannel, inductive_order, local_ratio_mwis_link_weights,
    local_ratio_select, measure_inductive_independence, WeightedSolution,
};

use crate::experiment::{rows_to_csv, run_experiment};
use crate::formats;
use crate::gamma::{binary_search_gamma, SearchAlgorithm};
use crate::instances::{gen_random_instance, GenConfig};

const USAGE: &str = "\
linksched — wireless link scheduling in the SINR model via conflict graphs

USAGE:
  linksched gen --n N --lmax L --alpha A --beta B --seed S --out FILE
                [--side W] [--trial T]
  linksched graph --in FILE --gamma G --delta D --out FILE
  linksched tdma --in FILE --gamma G --delta D [--diag] [--out FILE]
  linksched mwis --in FILE --gamma G --delta D [--diag] [--out FILE]
                 [--rate-control --utils FILE]
  linksched mwis --in FILE --delta D --search [--diag] [--out FILE]
  linksched channels --in FILE --c C --gamma G --delta D [--diag] [--out FILE]
  linksched mcma --in FILE --caps FILE --gamma G --delta D [--c C] [--out FILE]
  linksched bench --config FILE --csv FILE

Solutions print as JSON on stdout unless --out is given. --diag adds the
measured inductive independence. --search replaces a fixed --gamma with the
binary search used by the benchmark harness.

Exit codes: 0 success, 1 usage or input error, 2 output invariant violation.";

/// Parsed flag set: `--key value` pairs plus bare `--switch`es.
struct Args {
    values: BTreeMap<String, String>,
    switches: Vec<String>,
}

const SWITCHES: &[&str] = &["--diag", "--rate-control", "--search", "--help"];

impl Args {
    fn parse(args: &[String]) -> Result<Args, String> {
        let mut values = BTreeMap::new();
        let mut switches = Vec::new();
        let mut i = 0;
        while i < args.len() {
            let key = &args[i];
            if !key.starts_with("--") {
                return Err(format!("unexpected argument {key:?}"));
            }
            if SWITCHES.contains(&key.as_str()) {
                switches.push(key.clone());
                i += 1;
            } else {
                let value = args
                    .get(i + 1)
                    .ok_or_else(|| format!("missing value for {key}"))?;
                values.insert(key.clone(), value.clone());
                i += 2;
            }
        }
        Ok(Args { values, switches })
    }

    fn has(&self, switch: &str) -> bool {
        self.switches.iter().any(|s| s == switch)
    }

    fn required(&self, key: &str) -> Result<&str, String> {
        self.values
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| format!("missing {key}"))
    }

    fn number<T: std::str::FromStr>(&self, key: &str) -> Result<T, String> {
        self.required(key)?
            .parse()
            .map_err(|_| format!("{key} wants a number, got {:?}", self.values[key]))
    }

    fn number_or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, String> {
        match self.values.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| format!("{key} wants a number, got {v:?}")),
        }
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn run(args: &[String]) -> i32 {
    let Some(command) = args.first() else {
        eprintln!("{USAGE}");
        return 1;
    };
    if command == "--help" || command == "help" {
        println!("{USAGE}");
        return 0;
    }
    let parsed = match Args::parse(&args[1..]) {
        Ok(p) => p,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 1;
        }
    };
    if parsed.has("--help") {
        println!("{USAGE}");
        return 0;
    }
    let outcome = match command.as_str() {
        "gen" => cmd_gen(&parsed),
        "graph" => cmd_graph(&parsed),
        "tdma" => cmd_tdma(&parsed),
        "mwis" => cmd_mwis(&parsed),
        "channels" => cmd_channels(&parsed),
        "mcma" => cmd_mcma(&parsed),
        "bench" => cmd_bench(&parsed),
        other => Err(CliError::Usage(format!("unknown command {other:?}"))),
    };
    match outcome {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) | Err(CliError::Input(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Invariant(msg)) => {
            eprintln!("invariant violation: {msg}");
            2
        }
    }
}

enum CliError {
    Usage(String),
    Input(String),
    Invariant(String),
}

impl From<String> for CliError {
    fn from(msg: String) -> Self {
        CliError::Usage(msg)
    }
}

fn read_file(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {path}: {e}")))
}

fn write_output(args: &Args, text: &str) -> Result<(), CliError> {
    match args.values.get("--out") {
        Some(path) => {
            fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {path}: {e}")))
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn load_instance(args: &Args) -> Result<Instance, CliError> {
    let path = args.required("--in")?;
    formats::instance_from_json(&read_file(path)?)
        .map_err(|e| CliError::Input(format!("{path}: {e}")))
}

fn build_graph(inst: Instance, args: &Args) -> Result<ConflictGraph, CliError> {
    let gamma: f64 = args.number("--gamma")?;
    let delta: f64 = args.number("--delta")?;
    let func = ConflictFn::new(gamma, delta).map_err(|e| CliError::Input(e.to_string()))?;
    Ok(ConflictGraph::build(inst, func))
}

/// Power assignment implied by the graph's conflict exponent, when one
/// exists.
fn implied_power(g: &ConflictGraph) -> Option<(f64, PowerAssignment)> {
    let tau = choose_tau(g.func().delta(), g.instance().alpha(), g.instance().m()).ok()?;
    Some((tau, PowerAssignment::length_scaled(tau).ok()?))
}

fn diagnostics(g: &ConflictGraph, wanted: bool) -> serde_json::Value {
    if !wanted {
        return serde_json::Value::Null;
    }
    let m = measure_inductive_independence(g, 25);
    json!({ "k_measured": m.k, "truncated": m.truncated })
}

fn members_of(inst: &Instance, ids: &[LinkId]) -> Vec<Link> {
    ids.iter()
        .filter_map(|&id| inst.link(id).cloned())
        .collect()
}

fn check_independent(g: &ConflictGraph, ids: &[LinkId], what: &str) -> Result<(), CliError> {
    match g.is_independent(ids) {
        Ok(true) => Ok(()),
        Ok(false) => Err(CliError::Invariant(format!("{what} is not independent"))),
        Err(e) => Err(CliError::Invariant(format!("{what}: {e}"))),
    }
}

fn cmd_gen(args: &Args) -> Result<(), CliError> {
    let cfg = GenConfig {
        n: args.number("--n")?,
        l_max: args.number("--lmax")?,
        side: args.number_or("--side", 1000.0)?,
        alpha: args.number("--alpha")?,
        beta_range: {
            let beta: f64 = args.number("--beta")?;
            (beta, beta)
        },
        seed: args.number("--seed")?,
    };
    if cfg.l_max <= 1.0 {
        return Err(CliError::Usage("--lmax must exceed 1".into()));
    }
    let trial: u32 = args.number_or("--trial", 0)?;
    let inst = gen_random_instance(&cfg, trial);
    let path = args.required("--out")?;
    fs::write(path, formats::instance_to_json(&inst))
        .map_err(|e| CliError::Input(format!("cannot write {path}: {e}")))?;
    Ok(())
}

fn cmd_graph(args: &Args) -> Result<(), CliError> {
    let g = build_graph(load_instance(args)?, args)?;
    let file = formats::GraphFile::from_graph(&g);
    let path = args.required("--out")?;
    fs::write(
        path,
        serde_json::to_string_pretty(&file).expect("graph serialization"),
    )
    .map_err(|e| CliError::Input(format!("cannot write {path}: {e}")))?;
    Ok(())
}

fn cmd_tdma(args: &Args) -> Result<(), CliError> {
    let g = build_graph(load_instance(args)?, args)?;
    let coloring = first_fit_coloring(&g, &inductive_order(&g))
        .map_err(|e| CliError::Invariant(e.to_string()))?;
    for class in &coloring.classes {
        check_independent(&g, class, "a slot")?;
    }
    let feasibility = implied_power(&g).map(|(tau, p)| {
        let ok = coloring.classes.iter().all(|class| {
            is_feasible(
                &members_of(g.instance(), class),
                &p,
                g.instance().alpha(),
                DEFAULT_TOL,
            )
            .feasible
        });
        (tau, ok)
    });
    let out = json!({
        "classes": coloring.classes,
        "num_classes": coloring.num_classes(),
        "gamma": g.func().gamma(),
        "delta": g.func().delta(),
        "tau": feasibility.map(|(tau, _)| tau),
        "classes_feasible": feasibility.map(|(_, ok)| ok),
        "diagnostics": diagnostics(&g, args.has("--diag")),
    });
    write_output(args, &serde_json::to_string_pretty(&out).expect("json"))
}

fn solution_json(
    g: &ConflictGraph,
    sol: &WeightedSolution,
    diag: bool,
    extra: serde_json::Value,
) -> serde_json::Value {
    let feasibility = implied_power(g).map(|(tau, p)| {
        let ok = is_feasible(
            &members_of(g.instance(), &sol.selected),
            &p,
            g.instance().alpha(),
            DEFAULT_TOL,
        )
        .feasible;
        (tau, ok)
    });
    json!({
        "selected": sol.selected,
        "total_weight": sol.total_weight,
        "gamma": g.func().gamma(),
        "delta": g.func().delta(),
        "tau": feasibility.map(|(tau, _)| tau),
        "feasible": feasibility.map(|(_, ok)| ok),
        "diagnostics": diagnostics(g, diag),
        "rate_control": extra,
    })
}

fn cmd_mwis(args: &Args) -> Result<(), CliError> {
    let inst = load_instance(args)?;
    if args.has("--rate-control") {
        return cmd_mwis_rate_control(inst, args);
    }
    let g = if args.has("--search") {
        let delta: f64 = args.number("--delta")?;
        let alpha = inst.alpha();
        let tau = choose_tau(delta, alpha, 2)
            .map_err(|e| CliError::Input(format!("--search needs a usable delta: {e}")))?;
        let outcome = binary_search_gamma(
            &inst,
            delta,
            tau,
            1.0,
            (1u64 << 20) as f64,
            SearchAlgorithm::Mwis,
        )
        .map_err(|e| CliError::Input(e.to_string()))?;
        let func = ConflictFn::new(outcome.gamma, delta).expect("search emits valid scales");
        ConflictGraph::build(inst, func)
    } else {
        build_graph(inst, args)?
    };
    let sol = local_ratio_mwis_link_weights(&g);
    check_independent(&g, &sol.selected, "the solution")?;
    let out = solution_json(&g, &sol, args.has("--diag"), serde_json::Value::Null);
    write_output(args, &serde_json::to_string_pretty(&out).expect("json"))
}

fn cmd_mwis_rate_control(inst: Instance, args: &Args) -> Result<(), CliError> {
    let utils_path = args.required("--utils")?;
    let specs = formats::utility_specs_from_json(&read_file(utils_path)?)
        .map_err(|e| CliError::Input(format!("{utils_path}: {e}")))?;
    let all_levels = specs
        .iter()
        .all(|s| matches!(s.form, UtilityForm::Levels(_)));
    let all_monotone = specs
        .iter()
        .all(|s| matches!(s.form, UtilityForm::Monotone(_)));
    let expanded = if all_levels {
        expand_discrete(&inst, &specs)
    } else if all_monotone {
        expand_geometric(&inst, &specs, inst.len())
    } else {
        return Err(CliError::Input(
            "mixed utility forms in one file are unsupported; use all levels or all monotone"
                .into(),
        ));
    }
    .map_err(|e| CliError::Input(e.to_string()))?;

    let g = build_graph(expanded.instance.clone(), args)?;
    let sol = local_ratio_mwis_link_weights(&g);
    check_independent(&g, &sol.selected, "the expanded solution")?;
    let collapsed = collapse_solution(&expanded, &sol)
        .map_err(|e| CliError::Invariant(format!("collapse failed: {e}")))?;
    let chosen: Vec<_> = sol
        .selected
        .iter()
        .map(|copy| {
            let level = expanded.levels[copy];
            json!({ "link": level.origin, "beta": level.beta, "weight": level.weight })
        })
        .collect();
    let delta_prime = linksched_core::rate::delta_prime(&inst, &specs)
        .map_err(|e| CliError::Input(e.to_string()))?;
    let extra = json!({
        "selected_levels": chosen,
        "collapsed_total_weight": collapsed.total_weight,
        "delta_prime": delta_prime,
    });
    let out = solution_json(&g, &sol, args.has("--diag"), extra);
    write_output(args, &serde_json::to_string_pretty(&out).expect("json"))
}

fn cmd_channels(args: &Args) -> Result<(), CliError> {
    let g = build_graph(load_instance(args)?, args)?;
    let c: usize = args.number("--c")?;
    let assignment = greedy_multichannel(&g, c).map_err(|e| CliError::Usage(e.to_string()))?;
    for channel in &assignment.channels {
        check_independent(&g, channel, "a channel")?;
    }
    let out = json!({
        "channels": assignment.channels,
        "unassigned": assignment.unassigned,
        "assigned_count": assignment.assigned_count(),
        "gamma": g.func().gamma(),
        "delta": g.func().delta(),
        "diagnostics": diagnostics(&g, args.has("--diag")),
    });
    write_output(args, &serde_json::to_string_pretty(&out).expect("json"))
}

fn cmd_mcma(args: &Args) -> Result<(), CliError> {
    let inst = load_instance(args)?;
    let caps_path = args.required("--caps")?;
    let mut caps = formats::caps_from_json(&read_file(caps_path)?)
        .map_err(|e| CliError::Input(format!("{caps_path}: {e}")))?;

    // optional restriction to the C lowest-numbered channels in the file
    if let Some(limit) = args.values.get("--c") {
        let limit: usize = limit
            .parse()
            .map_err(|_| CliError::Usage("--c wants a number".into()))?;
        let mut all: Vec<u32> = caps.values().flat_map(|c| c.channels().to_vec()).collect();
        all.sort_unstable();
        all.dedup();
        all.truncate(limit);
        for entry in caps.values_mut() {
            let kept: Vec<u32> = entry
                .channels()
                .iter()
                .copied()
                .filter(|c| all.contains(c))
                .collect();
            *entry = linksched_core::mcma::NodeCaps::new(entry.antennas(), kept)
                .map_err(|_| CliError::Input("--c left some node with no channels".into()))?;
        }
    }

    let base = build_graph(inst.clone(), args)?;
    let vlinks = expand_virtual(&inst, &caps).map_err(|e| CliError::Input(e.to_string()))?;
    let g = build_mcma_graph(vlinks, &base).map_err(|e| CliError::Input(e.to_string()))?;

    // weighted selection over virtual links, weights from the originals
    let weights: Vec<f64> = g
        .vlinks()
        .iter()
        .map(|v| inst.link(v.original).map(|l| l.weight).unwrap_or(0.0))
        .collect();
    let (chosen, total) = local_ratio_select(&g, g.order_indices(), &weights);
    let selected: Vec<_> = chosen.iter().map(|&i| g.vlinks()[i]).collect();

    let (tau, feasible) = match implied_power(&base) {
        Some((tau, p)) => {
            let ok = mcma_feasible_check(&selected, &p, &inst, DEFAULT_TOL)
                .map_err(|e| CliError::Invariant(e.to_string()))?;
            if !ok {
                return Err(CliError::Invariant(
                    "selected virtual links fail the physical MC-MA check".into(),
                ));
            }
            (Some(tau), Some(true))
        }
        None => (None, None),
    };

    let out = json!({
        "selected": selected.iter().map(|v| json!({
            "link": v.original,
            "sender_antenna": v.sender_antenna,
            "receiver_antenna": v.receiver_antenna,
            "channel": v.channel,
        })).collect::<Vec<_>>(),
        "total_weight": total,
        "virtual_links": g.len(),
        "gamma": base.func().gamma(),
        "delta": base.func().delta(),
        "tau": tau,
        "feasible": feasible,
    });
    write_output(args, &serde_json::to_string_pretty(&out).expect("json"))
}

fn cmd_bench(args: &Args) -> Result<(), CliError> {
    let config_path = args.required("--config")?;
    let cfg: formats::ConfigFile = serde_json::from_str(&read_file(config_path)?)
        .map_err(|e| CliError::Input(format!("{config_path}: {e}")))?;
    let cfg = cfg
        .into_config()
        .map_err(|e| CliError::Input(e.to_string()))?;
    let rows = run_experiment(&cfg);
    let csv = rows_to_csv(&rows);
    let path = args.required("--csv")?;
    fs::write(path, csv).map_err(|e| CliError::Input(format!("cannot write {path}: {e}")))?;
    Ok(())
}

//! On-disk JSON schemas and conversions to the core types.
//!
//! Floats are serialized with the shortest representation that round-trips
//! to the identical bit pattern, so files regenerate their instances
//! exactly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use linksched_core::graph::ConflictGraph;
use linksched_core::mcma::{NodeCaps, NodeKey};
use linksched_core::model::{Instance, Link, LinkId, Point};
use linksched_core::rate::{MonotoneKind, MonotoneUtility, UtilityForm, UtilityLevel, UtilitySpec};

use crate::experiment::{Algorithm, ExperimentConfig};

/// Errors from parsing or converting files.
#[derive(Debug)]
pub enum FormatError {
    Json(serde_json::Error),
    Core(linksched_core::Error),
    Invalid(String),
}

impl std::fmt::Display for FormatError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FormatError::Json(e) => write!(f, "malformed JSON: {e}"),
            FormatError::Core(e) => write!(f, "invalid data: {e}"),
            FormatError::Invalid(msg) => write!(f, "invalid data: {msg}"),
        }
    }
}

impl std::error::Error for FormatError {}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json(e)
    }
}

impl From<linksched_core::Error> for FormatError {
    fn from(e: linksched_core::Error) -> Self {
        FormatError::Core(e)
    }
}

// ---------------------------------------------------------------------------
// Instance files
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinkRecord {
    pub id: LinkId,
    pub sx: f64,
    pub sy: f64,
    pub rx: f64,
    pub ry: f64,
    pub beta: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub alpha: f64,
    pub m: u32,
    pub links: Vec<LinkRecord>,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> Self {
        InstanceFile {
            alpha: inst.alpha(),
            m: inst.m(),
            links: inst
                .links()
                .iter()
                .map(|l| LinkRecord {
                    id: l.id,
                    sx: l.sender.x,
                    sy: l.sender.y,
                    rx: l.receiver.x,
                    ry: l.receiver.y,
                    beta: l.beta,
                    weight: l.weight,
                })
                .collect(),
        }
    }

    pub fn into_instance(self) -> Result<Instance, FormatError> {
        if self.m != 2 {
            return Err(FormatError::Invalid(format!(
                "dimension m = {} unsupported; this implementation is planar (m = 2)",
                self.m
            )));
        }
        let links = self
            .links
            .into_iter()
            .map(|r| {
                Link::new(
                    r.id,
                    Point::new(r.sx, r.sy),
                    Point::new(r.rx, r.ry),
                    r.beta,
                    r.weight,
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Instance::new(self.alpha, links)?)
    }
}

pub fn instance_to_json(inst: &Instance) -> String {
    serde_json::to_string_pretty(&InstanceFile::from_instance(inst))
        .expect("instance serialization cannot fail")
}

pub fn instance_from_json(text: &str) -> Result<Instance, FormatError> {
    serde_json::from_str::<InstanceFile>(text)?.into_instance()
}

// ---------------------------------------------------------------------------
// Graph files
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphParamsRecord {
    pub delta_min: f64,
    pub tau_lo: f64,
    pub tau_hi: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub gamma: f64,
    pub delta: f64,
    pub alpha: f64,
    /// Link ids in instance order.
    pub vertices: Vec<LinkId>,
    /// Edges as `[min_id, max_id]`, sorted lexicographically.
    pub edges: Vec<[LinkId; 2]>,
    /// Power-assignment parameters when `delta` admits them.
    pub params: Option<GraphParamsRecord>,
}

impl GraphFile {
    pub fn from_graph(g: &ConflictGraph) -> Self {
        let params = linksched_core::graph::GraphParams::derive(
            g.instance().alpha(),
            g.instance().m(),
            g.func().delta(),
        )
        .ok()
        .map(|p| GraphParamsRecord {
            delta_min: p.delta_min,
            tau_lo: p.tau_lo,
            tau_hi: p.tau_hi,
            tau: p.tau,
        });
        GraphFile {
            gamma: g.func().gamma(),
            delta: g.func().delta(),
            alpha: g.instance().alpha(),
            vertices: g.ids().to_vec(),
            edges: g.edges().into_iter().map(|(a, b)| [a, b]).collect(),
            params,
        }
    }
}

// ---------------------------------------------------------------------------
// Utility specification files
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelRecord {
    pub beta: f64,
    pub u: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MonotoneRecord {
    pub kind: String,
    pub u_min: f64,
    pub u_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intercept: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 2]>>,
}

/// Per-link utility: exactly one of the two forms.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UtilityRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<LevelRecord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monotone: Option<MonotoneRecord>,
}

/// Utility file: link id (as a JSON string key) to its specification.
pub type UtilityFile = BTreeMap<String, UtilityRecord>;

pub fn utility_specs_from_json(text: &str) -> Result<Vec<UtilitySpec>, FormatError> {
    let file: UtilityFile = serde_json::from_str(text)?;
    let mut specs = Vec::with_capacity(file.len());
    for (key, record) in file {
        let link_id: LinkId = key
            .parse()
            .map_err(|_| FormatError::Invalid(format!("utility key {key:?} is not a link id")))?;
        let form = match (record.levels, record.monotone) {
            (Some(levels), None) => UtilityForm::Levels(
                levels
                    .into_iter()
                    .map(|l| UtilityLevel {
                        beta: l.beta,
                        utility: l.u,
                    })
                    .collect(),
            ),
            (None, Some(m)) => {
                let kind = match m.kind.as_str() {
                    "log2_shannon" => MonotoneKind::Log2Shannon {
                        scale: m.scale.unwrap_or(1.0),
                    },
                    "linear" => MonotoneKind::Linear {
                        slope: m.slope.unwrap_or(1.0),
                        intercept: m.intercept.unwrap_or(0.0),
                    },
                    "table" => MonotoneKind::Table {
                        points: m
                            .points
                            .ok_or_else(|| {
                                FormatError::Invalid(format!(
                                    "table utility for link {link_id} needs points"
                                ))
                            })?
                            .into_iter()
                            .map(|[x, u]| (x, u))
                            .collect(),
                    },
                    other => {
                        return Err(FormatError::Invalid(format!(
                            "unknown monotone utility kind {other:?}"
                        )))
                    }
                };
                UtilityForm::Monotone(MonotoneUtility {
                    u_min: m.u_min,
                    u_max: m.u_max,
                    kind,
                })
            }
            _ => {
                return Err(FormatError::Invalid(format!(
                    "utility for link {link_id} must have exactly one of levels/monotone"
                )))
            }
        };
        specs.push(UtilitySpec { link_id, form });
    }
    Ok(specs)
}

// ---------------------------------------------------------------------------
// Node capability files
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapsRecord {
    pub antennas: u32,
    pub channels: Vec<u32>,
}

/// Caps file: node key `"x,y"` to its capabilities.
pub type CapsFile = BTreeMap<String, CapsRecord>;

pub fn caps_from_json(text: &str) -> Result<BTreeMap<NodeKey, NodeCaps>, FormatError> {
    let file: CapsFile = serde_json::from_str(text)?;
    let mut caps = BTreeMap::new();
    for (key, record) in file {
        let (x, y) = key
            .split_once(',')
            .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)))
            .ok_or_else(|| {
                FormatError::Invalid(format!("node key {key:?} is not \"x,y\" coordinates"))
            })?;
        caps.insert(
            NodeKey::of(Point::new(x, y)),
            NodeCaps::new(record.antennas, record.channels)?,
        );
    }
    Ok(caps)
}

/// Render a caps map keyed by the exact coordinates of instance nodes.
pub fn caps_to_json(inst: &Instance, caps: &BTreeMap<NodeKey, (u32, Vec<u32>)>) -> String {
    let mut file = CapsFile::new();
    for l in inst.links() {
        for p in [l.sender, l.receiver] {
            if let Some((antennas, channels)) = caps.get(&NodeKey::of(p)) {
                file.insert(
                    format!("{},{}", p.x, p.y),
                    CapsRecord {
                        antennas: *antennas,
                        channels: channels.clone(),
                    },
                );
            }
        }
    }
    serde_json::to_string_pretty(&file).expect("caps serialization cannot fail")
}

// ---------------------------------------------------------------------------
// Experiment config files
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigFile {
    pub n: usize,
    pub lmax_values: Vec<f64>,
    #[serde(default = "default_side")]
    pub side: f64,
    pub alpha: f64,
    pub beta: f64,
    pub trials: u32,
    pub seed: u64,
    pub algorithms: Vec<String>,
    #[serde(default)]
    pub epsilons: Vec<f64>,
}

fn default_side() -> f64 {
    1000.0
}

impl ConfigFile {
    pub fn into_config(self) -> Result<ExperimentConfig, FormatError> {
        let algorithms = self
            .algorithms
            .iter()
            .map(|label| {
                Algorithm::from_label(label).ok_or_else(|| {
                    FormatError::Invalid(format!("unknown algorithm label {label:?}"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if self.n < 1 || self.trials < 1 || self.side <= 0.0 || self.lmax_values.is_empty() {
            return Err(FormatError::Invalid(
                "config needs n >= 1, trials >= 1, side > 0 and a nonempty lmax grid".into(),
            ));
        }
        if self.lmax_values.iter().any(|&l| l <= 1.0) {
            return Err(FormatError::Invalid("every l_max must exceed 1".into()));
        }
        Ok(ExperimentConfig {
            n: self.n,
            lmax_values: self.lmax_values,
            side: self.side,
            alpha: self.alpha,
            beta: self.beta,
            trials: self.trials,
            seed: self.seed,
            algorithms,
            epsilons: self.epsilons,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_random_instance, GenConfig};
    use linksched_core::graph::ConflictFn;

    #[test]
    fn instance_roundtrip_is_bit_exact() {
        let cfg = GenConfig::fixed_beta(30, 100.0, 2.8, 1.5, 21);
        let inst = gen_random_instance(&cfg, 2);
        let text = instance_to_json(&inst);
        let back = instance_from_json(&text).unwrap();
        assert_eq!(back.alpha().to_bits(), inst.alpha().to_bits());
        assert_eq!(back.len(), inst.len());
        for (a, b) in back.links().iter().zip(inst.links()) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.sender.x.to_bits(), b.sender.x.to_bits());
            assert_eq!(a.sender.y.to_bits(), b.sender.y.to_bits());
            assert_eq!(a.receiver.x.to_bits(), b.receiver.x.to_bits());
            assert_eq!(a.receiver.y.to_bits(), b.receiver.y.to_bits());
            assert_eq!(a.beta.to_bits(), b.beta.to_bits());
            assert_eq!(a.weight.to_bits(), b.weight.to_bits());
        }
    }

    #[test]
    fn wrong_dimension_rejected() {
        let text = r#"{"alpha": 2.8, "m": 3, "links": []}"#;
        assert!(instance_from_json(text).is_err());
    }

    #[test]
    fn graph_file_edges_sorted() {
        let cfg = GenConfig::fixed_beta(40, 50.0, 2.8, 1.0, 4);
        let inst = gen_random_instance(&cfg, 0);
        let g = ConflictGraph::build(inst, ConflictFn::new(4.0, 0.8).unwrap());
        let file = GraphFile::from_graph(&g);
        assert!(file.params.is_some());
        let mut sorted = file.edges.clone();
        sorted.sort();
        assert_eq!(file.edges, sorted);
        for [a, b] in &file.edges {
            assert!(a < b);
        }
    }

    #[test]
    fn utility_files_parse_both_forms() {
        let text = r#"{
            "0": {"levels": [{"beta": 1.0, "u": 1.0}, {"beta": 4.0, "u": 3.0}]},
            "1": {"monotone": {"kind": "log2_shannon", "u_min": 1.0, "u_max": 64.0}},
            "2": {"monotone": {"kind": "linear", "slope": 2.0, "intercept": 0.5,
                                 "u_min": 2.5, "u_max": 20.0}},
            "3": {"monotone": {"kind": "table", "points": [[1.0, 1.0], [10.0, 5.0]],
                                 "u_min": 1.0, "u_max": 5.0}}
        }"#;
        let specs = utility_specs_from_json(text).unwrap();
        assert_eq!(specs.len(), 4);
        assert!(matches!(specs[0].form, UtilityForm::Levels(ref l) if l.len() == 2));
        assert!(matches!(
            specs[1].form,
            UtilityForm::Monotone(MonotoneUtility {
                kind: MonotoneKind::Log2Shannon { .. },
                ..
            })
        ));

        assert!(utility_specs_from_json(r#"{"0": {}}"#).is_err());
        assert!(utility_specs_from_json(r#"{"x": {"levels": []}}"#).is_err());
    }

    #[test]
    fn caps_files_parse() {
        let text = r#"{"0,0": {"antennas": 2, "channels": [1, 2]},
                        "1.5,-2.25": {"antennas": 1, "channels": [1]}}"#;
        let caps = caps_from_json(text).unwrap();
        assert_eq!(caps.len(), 2);
        let key = NodeKey::of(Point::new(1.5, -2.25));
        assert_eq!(caps[&key].antennas(), 1);
        assert!(caps_from_json(r#"{"zzz": {"antennas": 1, "channels": [1]}}"#).is_err());
        assert!(caps_from_json(r#"{"0,0": {"antennas": 0, "channels": [1]}}"#).is_err());
    }

    #[test]
    fn config_file_roundtrip() {
        let text = r#"{
            "n": 400, "lmax_values": [10, 50, 100, 250], "alpha": 2.8, "beta": 1.0,
            "trials": 20, "seed": 1,
            "algorithms": ["greedy_feasibility", "conflict_graph_mwis", "weight_class"],
            "epsilons": [0.1, 0.9]
        }"#;
        let cfg = serde_json::from_str::<ConfigFile>(text)
            .unwrap()
            .into_config()
            .unwrap();
        assert_eq!(cfg, ExperimentConfig::study_defaults(1));
        assert!(serde_json::from_str::<ConfigFile>(r#"{"n": 0}"#).is_err());
    }
}

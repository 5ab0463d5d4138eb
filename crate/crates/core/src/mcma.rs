//! Multi-channel multi-antenna (MC-MA) scheduling over virtual links.
//!
//! Every physical link expands into one virtual link per (sender antenna,
//! receiver antenna, shared channel) combination. A set of virtual links is
//! feasible when no antenna is used twice and, per channel, the underlying
//! originals form a feasible set. The conflict graph over virtual links
//! mirrors that definition pairwise: two virtual links conflict when they
//! share an antenna, or share a channel while their originals conflict in
//! the base graph. Virtual links using a common antenna therefore always
//! form cliques, which keeps the inductive independence of the lifted graph
//! within 2 of the base graph's.
//!
//! Nodes are identified by exact coordinate equality: links whose endpoints
//! coincide share that node's antennas.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{Adjacency, BitMatrix, ConflictGraph};
use crate::model::{is_feasible, Instance, Link, LinkId, Point, PowerAssignment};

/// Channel identifier.
pub type ChannelId = u32;

/// Node identity for antenna bookkeeping: exact coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct NodeKey {
    x_bits: u64,
    y_bits: u64,
}

impl NodeKey {
    pub fn of(p: Point) -> Self {
        // normalize -0.0 so it names the same node as 0.0
        let x = if p.x == 0.0 { 0.0 } else { p.x };
        let y = if p.y == 0.0 { 0.0 } else { p.y };
        NodeKey {
            x_bits: x.to_bits(),
            y_bits: y.to_bits(),
        }
    }
}

/// Antenna count and usable channels of one node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeCaps {
    antennas: u32,
    channels: Vec<ChannelId>,
}

impl NodeCaps {
    /// Validating constructor: at least one antenna and one channel.
    /// Channels are deduplicated and kept sorted.
    pub fn new(antennas: u32, mut channels: Vec<ChannelId>) -> Result<Self> {
        channels.sort_unstable();
        channels.dedup();
        if antennas < 1 || channels.is_empty() {
            return Err(Error::InvalidCaps);
        }
        Ok(NodeCaps { antennas, channels })
    }

    pub fn antennas(&self) -> u32 {
        self.antennas
    }

    pub fn channels(&self) -> &[ChannelId] {
        &self.channels
    }
}

/// One (link, sender antenna, receiver antenna, channel) combination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VirtualLink {
    pub original: LinkId,
    /// Sender antenna index, 1-based.
    pub sender_antenna: u32,
    /// Receiver antenna index, 1-based.
    pub receiver_antenna: u32,
    pub channel: ChannelId,
}

/// Enumerate the virtual links of an instance.
///
/// `caps` must cover every endpoint node. A link whose endpoints share no
/// channel contributes nothing. Output order: ascending (link id, sender
/// antenna, receiver antenna, channel).
pub fn expand_virtual(
    inst: &Instance,
    caps: &BTreeMap<NodeKey, NodeCaps>,
) -> Result<Vec<VirtualLink>> {
    let mut order: Vec<&Link> = inst.links().iter().collect();
    order.sort_by_key(|l| l.id);
    let mut vlinks = Vec::new();
    for link in order {
        let s_caps = caps
            .get(&NodeKey::of(link.sender))
            .ok_or(Error::MissingCaps {
                x: link.sender.x,
                y: link.sender.y,
            })?;
        let r_caps = caps
            .get(&NodeKey::of(link.receiver))
            .ok_or(Error::MissingCaps {
                x: link.receiver.x,
                y: link.receiver.y,
            })?;
        let shared: Vec<ChannelId> = s_caps
            .channels()
            .iter()
            .copied()
            .filter(|c| r_caps.channels().contains(c))
            .collect();
        for a_s in 1..=s_caps.antennas() {
            for a_r in 1..=r_caps.antennas() {
                for &c in &shared {
                    vlinks.push(VirtualLink {
                        original: link.id,
                        sender_antenna: a_s,
                        receiver_antenna: a_r,
                        channel: c,
                    });
                }
            }
        }
    }
    Ok(vlinks)
}

/// Conflict graph over virtual links.
///
/// Vertex order lifts the base inductive order: by the original's effective
/// length, then original id, then (sender antenna, receiver antenna,
/// channel).
#[derive(Debug, Clone)]
pub struct McmaGraph {
    vlinks: Vec<VirtualLink>,
    adj: BitMatrix,
    order: Vec<usize>,
}

impl McmaGraph {
    pub fn vlinks(&self) -> &[VirtualLink] {
        &self.vlinks
    }

    /// Vertex indices in the lifted inductive order.
    pub fn order_indices(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.vlinks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vlinks.is_empty()
    }
}

impl Adjacency for McmaGraph {
    fn vertex_count(&self) -> usize {
        self.vlinks.len()
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        a != b && self.adj.get(a, b)
    }
}

/// Antennas used by one virtual link.
fn antennas_of(v: &VirtualLink, link: &Link) -> [(NodeKey, u32); 2] {
    [
        (NodeKey::of(link.sender), v.sender_antenna),
        (NodeKey::of(link.receiver), v.receiver_antenna),
    ]
}

fn share_antenna(a: &[(NodeKey, u32); 2], b: &[(NodeKey, u32); 2]) -> bool {
    a.iter().any(|x| b.contains(x))
}

/// Build the MC-MA conflict graph: adjacency is antenna sharing, or same
/// channel with conflicting originals. Replicas of one original sharing a
/// channel conflict too — the original conflicts with itself — so an
/// independent set never schedules a link twice on one channel, and each
/// virtual link's later neighborhood holds unique replicas of a base
/// independent set plus its two antenna cliques (inductive independence
/// grows by at most 2).
pub fn build_mcma_graph(vlinks: Vec<VirtualLink>, base: &ConflictGraph) -> Result<McmaGraph> {
    let n = vlinks.len();
    let mut base_index = Vec::with_capacity(n);
    let mut antennas = Vec::with_capacity(n);
    for v in &vlinks {
        let idx = base
            .index_of(v.original)
            .ok_or(Error::UnknownOriginal(v.original))?;
        base_index.push(idx);
        antennas.push(antennas_of(v, &base.instance().links()[idx]));
    }
    let mut adj = BitMatrix::new(n);
    for a in 0..n {
        for b in (a + 1)..n {
            let shared_antenna = share_antenna(&antennas[a], &antennas[b]);
            let channel_conflict = vlinks[a].channel == vlinks[b].channel
                && (base_index[a] == base_index[b] || base.adjacent(base_index[a], base_index[b]));
            if shared_antenna || channel_conflict {
                adj.set_sym(a, b);
            }
        }
    }
    let eff = base.effective_lengths();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (va, vb) = (&vlinks[a], &vlinks[b]);
        eff[base_index[a]]
            .partial_cmp(&eff[base_index[b]])
            .unwrap()
            .then_with(|| va.original.cmp(&vb.original))
            .then_with(|| va.sender_antenna.cmp(&vb.sender_antenna))
            .then_with(|| va.receiver_antenna.cmp(&vb.receiver_antenna))
            .then_with(|| va.channel.cmp(&vb.channel))
    });
    Ok(McmaGraph { vlinks, adj, order })
}

/// Physical MC-MA feasibility: antenna-disjoint, and per channel the set of
/// distinct originals must be feasible under `power`.
pub fn mcma_feasible_check(
    s: &[VirtualLink],
    power: &PowerAssignment,
    inst: &Instance,
    tol: f64,
) -> Result<bool> {
    let mut used: Vec<(NodeKey, u32)> = Vec::with_capacity(2 * s.len());
    let mut per_channel: BTreeMap<ChannelId, BTreeSet<LinkId>> = BTreeMap::new();
    for v in s {
        let link = inst
            .link(v.original)
            .ok_or(Error::UnknownOriginal(v.original))?;
        for antenna in antennas_of(v, link) {
            used.push(antenna);
        }
        per_channel.entry(v.channel).or_default().insert(v.original);
    }
    used.sort_unstable();
    if used.windows(2).any(|w| w[0] == w[1]) {
        return Ok(false);
    }
    for originals in per_channel.values() {
        let links: Vec<Link> = originals
            .iter()
            .map(|&id| inst.link(id).unwrap().clone())
            .collect();
        if !is_feasible(&links, power, inst.alpha(), tol).feasible {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ConflictFn;
    use crate::model::DEFAULT_TOL;
    use alloc::vec;

    fn link(id: LinkId, s: (f64, f64), r: (f64, f64)) -> Link {
        Link::new(id, Point::new(s.0, s.1), Point::new(r.0, r.1), 1.0, 1.0).unwrap()
    }

    fn caps_for(
        inst: &Instance,
        antennas: u32,
        channels: &[ChannelId],
    ) -> BTreeMap<NodeKey, NodeCaps> {
        let mut caps = BTreeMap::new();
        for l in inst.links() {
            for p in [l.sender, l.receiver] {
                caps.insert(
                    NodeKey::of(p),
                    NodeCaps::new(antennas, channels.to_vec()).unwrap(),
                );
            }
        }
        caps
    }

    #[test]
    fn expansion_counts() {
        let inst = Instance::new(2.8, vec![link(0, (0.0, 0.0), (1.0, 0.0))]).unwrap();
        let vl = expand_virtual(&inst, &caps_for(&inst, 1, &[1])).unwrap();
        assert_eq!(vl.len(), 1);
        assert_eq!(
            vl[0],
            VirtualLink {
                original: 0,
                sender_antenna: 1,
                receiver_antenna: 1,
                channel: 1
            }
        );

        let vl = expand_virtual(&inst, &caps_for(&inst, 2, &[1, 2])).unwrap();
        assert_eq!(vl.len(), 8); // 2 * 2 * 2
    }

    #[test]
    fn expansion_disjoint_channels_and_missing_caps() {
        let inst = Instance::new(2.8, vec![link(0, (0.0, 0.0), (1.0, 0.0))]).unwrap();
        let mut caps = BTreeMap::new();
        caps.insert(
            NodeKey::of(Point::new(0.0, 0.0)),
            NodeCaps::new(1, vec![1]).unwrap(),
        );
        caps.insert(
            NodeKey::of(Point::new(1.0, 0.0)),
            NodeCaps::new(1, vec![2]).unwrap(),
        );
        assert!(expand_virtual(&inst, &caps).unwrap().is_empty());

        caps.remove(&NodeKey::of(Point::new(1.0, 0.0)));
        assert!(matches!(
            expand_virtual(&inst, &caps).unwrap_err(),
            Error::MissingCaps { .. }
        ));

        assert!(NodeCaps::new(0, vec![1]).is_err());
        assert!(NodeCaps::new(1, vec![]).is_err());
    }

    #[test]
    fn adjacency_rules() {
        // two nearby links: base-adjacent at this gamma
        let inst = Instance::new(
            2.8,
            vec![
                link(0, (0.0, 0.0), (1.0, 0.0)),
                link(1, (1.5, 0.0), (2.5, 0.0)),
            ],
        )
        .unwrap();
        let base = ConflictGraph::build(inst.clone(), ConflictFn::new(8.0, 0.5).unwrap());
        assert!(base.adjacent_ids(0, 1).unwrap());

        let vl = expand_virtual(&inst, &caps_for(&inst, 2, &[1, 2])).unwrap();
        let g = build_mcma_graph(vl.clone(), &base).unwrap();
        let pos = |orig, a_s, a_r, c| {
            vl.iter()
                .position(|v| {
                    (v.original, v.sender_antenna, v.receiver_antenna, v.channel)
                        == (orig, a_s, a_r, c)
                })
                .unwrap()
        };

        // same original, shared sender antenna
        assert!(g.adjacent(pos(0, 1, 1, 1), pos(0, 1, 2, 2)));
        // adjacent originals on the same channel, distinct antennas
        assert!(g.adjacent(pos(0, 1, 1, 1), pos(1, 2, 2, 1)));
        // adjacent originals on different channels, distinct antennas
        assert!(!g.adjacent(pos(0, 1, 1, 1), pos(1, 2, 2, 2)));
        // same original on one channel conflicts even with distinct antennas
        assert!(g.adjacent(pos(0, 1, 1, 1), pos(0, 2, 2, 1)));
        // same original on different channels and antennas does not
        assert!(!g.adjacent(pos(0, 1, 1, 1), pos(0, 2, 2, 2)));
    }

    #[test]
    fn antenna_sets_are_cliques() {
        let inst = Instance::new(
            2.8,
            vec![
                link(0, (0.0, 0.0), (1.0, 0.0)),
                link(1, (30.0, 0.0), (31.0, 0.0)),
            ],
        )
        .unwrap();
        let base = ConflictGraph::build(inst.clone(), ConflictFn::new(2.0, 0.5).unwrap());
        let vl = expand_virtual(&inst, &caps_for(&inst, 2, &[1, 2])).unwrap();
        let g = build_mcma_graph(vl.clone(), &base).unwrap();

        // group virtual links by each antenna they use
        let mut groups: BTreeMap<(NodeKey, u32), Vec<usize>> = BTreeMap::new();
        for (i, v) in vl.iter().enumerate() {
            let l = inst.link(v.original).unwrap();
            for a in antennas_of(v, l) {
                groups.entry(a).or_default().push(i);
            }
        }
        for members in groups.values() {
            for (i, &a) in members.iter().enumerate() {
                for &b in &members[i + 1..] {
                    assert!(g.adjacent(a, b));
                }
            }
        }
    }

    #[test]
    fn feasibility_check_cases() {
        let inst = Instance::new(
            2.8,
            vec![
                link(0, (0.0, 0.0), (1.0, 0.0)),
                link(1, (500.0, 0.0), (501.0, 0.0)),
            ],
        )
        .unwrap();
        let p = PowerAssignment::Uniform;
        assert!(mcma_feasible_check(&[], &p, &inst, DEFAULT_TOL).unwrap());

        let v1 = VirtualLink {
            original: 0,
            sender_antenna: 1,
            receiver_antenna: 1,
            channel: 1,
        };
        let v2 = VirtualLink {
            original: 0,
            sender_antenna: 1,
            receiver_antenna: 2,
            channel: 2,
        };
        // shared sender antenna
        assert!(!mcma_feasible_check(&[v1, v2], &p, &inst, DEFAULT_TOL).unwrap());

        // far-apart originals on one channel: feasible
        let v3 = VirtualLink {
            original: 1,
            sender_antenna: 1,
            receiver_antenna: 1,
            channel: 1,
        };
        assert!(mcma_feasible_check(&[v1, v3], &p, &inst, DEFAULT_TOL).unwrap());

        // same original twice on one channel with distinct antennas:
        // originals deduplicate to a singleton, so this is allowed
        let v4 = VirtualLink {
            original: 0,
            sender_antenna: 2,
            receiver_antenna: 2,
            channel: 1,
        };
        assert!(mcma_feasible_check(&[v1, v4], &p, &inst, DEFAULT_TOL).unwrap());

        let ghost = VirtualLink {
            original: 9,
            sender_antenna: 1,
            receiver_antenna: 1,
            channel: 1,
        };
        assert!(mcma_feasible_check(&[ghost], &p, &inst, DEFAULT_TOL).is_err());
    }

    #[test]
    fn unknown_original_rejected_at_build() {
        let inst = Instance::new(2.8, vec![link(0, (0.0, 0.0), (1.0, 0.0))]).unwrap();
        let base = ConflictGraph::build(inst, ConflictFn::new(2.0, 0.5).unwrap());
        let ghost = VirtualLink {
            original: 5,
            sender_antenna: 1,
            receiver_antenna: 1,
            channel: 1,
        };
        assert_eq!(
            build_mcma_graph(vec![ghost], &base).unwrap_err(),
            Error::UnknownOriginal(5)
        );
    }

    #[test]
    fn lifted_order_follows_base_order() {
        let inst = Instance::new(
            2.8,
            vec![
                link(0, (0.0, 0.0), (3.0, 0.0)),
                link(1, (30.0, 0.0), (31.0, 0.0)),
            ],
        )
        .unwrap();
        let base = ConflictGraph::build(inst.clone(), ConflictFn::new(2.0, 0.5).unwrap());
        let vl = expand_virtual(&inst, &caps_for(&inst, 2, &[1])).unwrap();
        let g = build_mcma_graph(vl.clone(), &base).unwrap();
        // link 1 is shorter: all its virtual links come first
        let order = g.order_indices();
        let split = vl.iter().filter(|v| v.original == 1).count();
        for &v in &order[..split] {
            assert_eq!(vl[v].original, 1);
        }
        for &v in &order[split..] {
            assert_eq!(vl[v].original, 0);
        }
    }
}

//! AOGM-based DET/SEG/TRA evaluation: transform-cost comparison of a computed
//! tracking graph against a reference graph, plus mean-Jaccard segmentation
//! scoring under the majority-overlap node matching.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    build_tracking_graph, intersection_size, jaccard, LabelFrame, LabelVideo, Node, TrackingGraph,
};

/// Costs of the six graph operations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AogmWeights {
    /// Node split.
    pub w_ns: f64,
    /// False negative node (add missing).
    pub w_fn: f64,
    /// False positive node (delete spurious).
    pub w_fp: f64,
    /// Redundant edge delete.
    pub w_ed: f64,
    /// Missing edge add.
    pub w_ea: f64,
    /// Edge semantics change (continuation vs parent link).
    pub w_ec: f64,
}

impl Default for AogmWeights {
    fn default() -> Self {
        AogmWeights {
            w_ns: 5.0,
            w_fn: 10.0,
            w_fp: 1.0,
            w_ed: 1.0,
            w_ea: 1.5,
            w_ec: 1.0,
        }
    }
}

impl AogmWeights {
    pub fn validate(&self) -> Result<()> {
        let all = [self.w_ns, self.w_fn, self.w_fp, self.w_ed, self.w_ea, self.w_ec];
        if all.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::invalid("AOGM weights must be non-negative"));
        }
        Ok(())
    }

    /// Same node weights, edge operations zeroed; used for DET.
    fn nodes_only(&self) -> AogmWeights {
        AogmWeights {
            w_ed: 0.0,
            w_ea: 0.0,
            w_ec: 0.0,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub ns: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub fp: usize,
    pub ed: usize,
    pub ea: usize,
    pub ec: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub det: f64,
    pub seg: f64,
    pub tra: f64,
    pub aogm_cost: f64,
    pub aogm_empty_cost: f64,
    pub aogm_d_cost: f64,
    pub aogm_d_empty_cost: f64,
    pub op_counts: OpCounts,
    /// (reference node, matched computed node, jaccard) triples.
    pub matched_pairs: Vec<(Node, Node, f64)>,
}

/// Majority-overlap matching for one frame pair: reference id R matches
/// computed id C iff C covers strictly more than half of R's pixels. Single-
/// valued label grids make the match unique per reference node.
pub fn match_nodes(
    ref_frame: &LabelFrame,
    comp_frame: &LabelFrame,
) -> Result<BTreeMap<u32, Option<u32>>> {
    if ref_frame.width != comp_frame.width || ref_frame.height != comp_frame.height {
        return Err(Error::incompatible(format!(
            "frame dimensions differ: {}x{} vs {}x{}",
            ref_frame.width, ref_frame.height, comp_frame.width, comp_frame.height
        )));
    }
    let mut out = BTreeMap::new();
    for (rid, rpx) in ref_frame.pixels_by_id() {
        // Count overlap per computed id directly from the reference pixels.
        let mut overlap: BTreeMap<u32, usize> = BTreeMap::new();
        for &p in &rpx {
            let cid = comp_frame.labels[p as usize];
            if cid != 0 {
                *overlap.entry(cid).or_default() += 1;
            }
        }
        let matched = overlap
            .into_iter()
            .find(|(_, n)| 2 * n > rpx.len())
            .map(|(cid, _)| cid);
        out.insert(rid, matched);
    }
    Ok(out)
}

/// Node matching over whole graphs: ref node -> comp node (same frame).
fn match_graph_nodes(ref_g: &TrackingGraph, comp_g: &TrackingGraph) -> BTreeMap<Node, Node> {
    // Index comp pixel sets per frame.
    let mut comp_by_frame: BTreeMap<usize, Vec<(&Node, &Vec<u32>)>> = BTreeMap::new();
    for (node, px) in &comp_g.node_pixels {
        comp_by_frame.entry(node.0).or_default().push((node, px));
    }
    let mut matches = BTreeMap::new();
    for (rnode, rpx) in &ref_g.node_pixels {
        if let Some(cands) = comp_by_frame.get(&rnode.0) {
            for (cnode, cpx) in cands {
                if 2 * intersection_size(rpx, cpx) > rpx.len() {
                    matches.insert(*rnode, **cnode);
                    break;
                }
            }
        }
    }
    matches
}

/// AOGM transformation cost from the computed graph to the reference graph.
///
/// NS: a computed node matched by k > 1 reference nodes costs k−1 splits.
/// FN: unmatched reference nodes. FP: computed nodes matching no reference
/// node. Edges are compared through the induced node correspondence: a
/// reference edge with no corresponding computed edge is an EA; a computed
/// edge corresponding to no reference edge is an ED; corresponding edges whose
/// link semantics differ (continuation vs parent) count one EC.
pub fn aogm_cost(
    ref_g: &TrackingGraph,
    comp_g: &TrackingGraph,
    w: &AogmWeights,
) -> Result<(f64, OpCounts)> {
    w.validate()?;
    let matches = match_graph_nodes(ref_g, comp_g);

    let mut counts = OpCounts::default();

    let mut matched_per_comp: BTreeMap<Node, usize> = BTreeMap::new();
    for cnode in matches.values() {
        *matched_per_comp.entry(*cnode).or_default() += 1;
    }
    counts.ns = matched_per_comp.values().map(|k| k - 1).sum();
    counts.fn_ = ref_g.nodes.len() - matches.len();
    counts.fp = comp_g
        .nodes
        .iter()
        .filter(|c| !matched_per_comp.contains_key(c))
        .count();

    let comp_edges: std::collections::BTreeSet<(Node, Node)> =
        comp_g.edges.iter().copied().collect();
    // Comp edges referenced by at least one ref edge through the matching.
    let mut comp_edge_used: std::collections::BTreeSet<(Node, Node)> =
        std::collections::BTreeSet::new();
    for redge in &ref_g.edges {
        let corresponding = match (matches.get(&redge.0), matches.get(&redge.1)) {
            (Some(c1), Some(c2)) if comp_edges.contains(&(*c1, *c2)) => Some((*c1, *c2)),
            _ => None,
        };
        match corresponding {
            None => counts.ea += 1,
            Some(cedge) => {
                comp_edge_used.insert(cedge);
                let ref_is_parent = TrackingGraph::edge_is_parent_link(redge);
                let comp_is_parent = TrackingGraph::edge_is_parent_link(&cedge);
                if ref_is_parent != comp_is_parent {
                    counts.ec += 1;
                }
            }
        }
    }
    counts.ed = comp_g
        .edges
        .iter()
        .filter(|e| !comp_edge_used.contains(e))
        .count();

    let cost = w.w_ns * counts.ns as f64
        + w.w_fn * counts.fn_ as f64
        + w.w_fp * counts.fp as f64
        + w.w_ed * counts.ed as f64
        + w.w_ea * counts.ea as f64
        + w.w_ec * counts.ec as f64;
    Ok((cost, counts))
}

fn empty_graph() -> TrackingGraph {
    TrackingGraph {
        nodes: Vec::new(),
        edges: Vec::new(),
        node_pixels: BTreeMap::new(),
    }
}

/// Cost of building the reference graph from nothing (AOGM₀).
pub fn aogm_empty_cost(ref_g: &TrackingGraph, w: &AogmWeights) -> Result<f64> {
    Ok(aogm_cost(ref_g, &empty_graph(), w)?.0)
}

/// TRA = 1 − min(AOGM, AOGM₀) / AOGM₀.
pub fn tra_score(ref_g: &TrackingGraph, comp_g: &TrackingGraph, w: &AogmWeights) -> Result<f64> {
    let empty = aogm_empty_cost(ref_g, w)?;
    if empty == 0.0 {
        return Err(Error::invalid("empty reference graph: TRA undefined"));
    }
    let (cost, _) = aogm_cost(ref_g, comp_g, w)?;
    Ok(1.0 - cost.min(empty) / empty)
}

/// DET: same normalization with edge weights zeroed.
pub fn det_score(ref_g: &TrackingGraph, comp_g: &TrackingGraph, w: &AogmWeights) -> Result<f64> {
    tra_score(ref_g, comp_g, &w.nodes_only())
}

/// SEG: mean Jaccard over all reference nodes under the majority matching;
/// unmatched reference nodes contribute 0.
pub fn seg_score(ref_video: &LabelVideo, comp_video: &LabelVideo) -> Result<f64> {
    check_compatible(ref_video, comp_video)?;
    let mut total = 0.0;
    let mut n = 0usize;
    for (rf, cf) in ref_video.frames.iter().zip(&comp_video.frames) {
        let comp_px = cf.pixels_by_id();
        let matches = match_nodes(rf, cf)?;
        for (rid, rpx) in rf.pixels_by_id() {
            n += 1;
            if let Some(Some(cid)) = matches.get(&rid) {
                total += jaccard(&rpx, &comp_px[cid])?;
            }
        }
    }
    if n == 0 {
        return Err(Error::invalid("empty reference video: SEG undefined"));
    }
    Ok(total / n as f64)
}

fn check_compatible(ref_video: &LabelVideo, comp_video: &LabelVideo) -> Result<()> {
    if ref_video.frames.len() != comp_video.frames.len() {
        return Err(Error::incompatible(format!(
            "frame counts differ: {} vs {}",
            ref_video.frames.len(),
            comp_video.frames.len()
        )));
    }
    if ref_video.width() != comp_video.width() || ref_video.height() != comp_video.height() {
        return Err(Error::incompatible(format!(
            "dimensions differ: {}x{} vs {}x{}",
            ref_video.width(),
            ref_video.height(),
            comp_video.width(),
            comp_video.height()
        )));
    }
    Ok(())
}

/// Full evaluation of a computed video against a reference video.
pub fn evaluate(
    ref_video: &LabelVideo,
    comp_video: &LabelVideo,
    w: &AogmWeights,
) -> Result<MetricsReport> {
    ref_video.validate()?;
    comp_video.validate()?;
    check_compatible(ref_video, comp_video)?;

    let ref_g = build_tracking_graph(ref_video)?;
    let comp_g = build_tracking_graph(comp_video)?;

    let (cost, op_counts) = aogm_cost(&ref_g, &comp_g, w)?;
    let empty = aogm_empty_cost(&ref_g, w)?;
    if empty == 0.0 {
        return Err(Error::invalid("empty reference video"));
    }
    let wd = w.nodes_only();
    let (d_cost, _) = aogm_cost(&ref_g, &comp_g, &wd)?;
    let d_empty = aogm_empty_cost(&ref_g, &wd)?;

    let matches = match_graph_nodes(&ref_g, &comp_g);
    let matched_pairs = matches
        .iter()
        .map(|(r, c)| {
            let j = jaccard(&ref_g.node_pixels[r], &comp_g.node_pixels[c])?;
            Ok((*r, *c, j))
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(MetricsReport {
        det: 1.0 - d_cost.min(d_empty) / d_empty,
        seg: seg_score(ref_video, comp_video)?,
        tra: 1.0 - cost.min(empty) / empty,
        aogm_cost: cost,
        aogm_empty_cost: empty,
        aogm_d_cost: d_cost,
        aogm_d_empty_cost: d_empty,
        op_counts,
        matched_pairs,
    })
}

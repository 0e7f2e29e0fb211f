//! Shared domain types: label frames, label videos with track tables, and the
//! tracking graph the evaluator operates on.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// A single integer label image. 0 is background, any other value is a track id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelFrame {
    pub width: u32,
    pub height: u32,
    /// Row-major, `height * width` entries.
    pub labels: Vec<u32>,
}

impl LabelFrame {
    pub fn zeros(width: u32, height: u32) -> Self {
        LabelFrame {
            width,
            height,
            labels: vec![0; (width as usize) * (height as usize)],
        }
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u32 {
        self.labels[(y as usize) * (self.width as usize) + (x as usize)]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, id: u32) {
        self.labels[(y as usize) * (self.width as usize) + (x as usize)] = id;
    }

    /// Linear indices of pixels carrying each nonzero id, ascending ids,
    /// ascending raster order within each id.
    pub fn pixels_by_id(&self) -> BTreeMap<u32, Vec<u32>> {
        let mut out: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for (i, &id) in self.labels.iter().enumerate() {
            if id != 0 {
                out.entry(id).or_default().push(i as u32);
            }
        }
        out
    }

    /// Count of nonzero pixels.
    pub fn labeled_pixels(&self) -> usize {
        self.labels.iter().filter(|&&v| v != 0).count()
    }
}

/// One row of the track table: `id first_frame last_frame parent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrackRecord {
    pub id: u32,
    pub first_frame: usize,
    pub last_frame: usize,
    pub parent: u32,
}

/// An ordered sequence of label frames plus its track table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVideo {
    pub frames: Vec<LabelFrame>,
    pub tracks: Vec<TrackRecord>,
}

impl LabelVideo {
    pub fn width(&self) -> u32 {
        self.frames.first().map_or(0, |f| f.width)
    }

    pub fn height(&self) -> u32 {
        self.frames.first().map_or(0, |f| f.height)
    }

    /// Check every structural invariant: uniform dimensions, unique positive
    /// ids, pixels confined to and covering exactly `[first_frame, last_frame]`
    /// (tracks are temporally contiguous), and well-formed parent links.
    pub fn validate(&self) -> Result<()> {
        if self.frames.is_empty() {
            return Err(Error::invalid("video has no frames"));
        }
        let (w, h) = (self.frames[0].width, self.frames[0].height);
        for (t, f) in self.frames.iter().enumerate() {
            if f.width != w || f.height != h {
                return Err(Error::invalid(format!(
                    "frame {t} is {}x{}, expected {w}x{h}",
                    f.width, f.height
                )));
            }
            if f.labels.len() != (w as usize) * (h as usize) {
                return Err(Error::invalid(format!("frame {t} grid size mismatch")));
            }
        }

        let mut table: BTreeMap<u32, TrackRecord> = BTreeMap::new();
        for rec in &self.tracks {
            if rec.id == 0 {
                return Err(Error::invalid("track id 0 is reserved for background"));
            }
            if rec.first_frame > rec.last_frame {
                return Err(Error::invalid(format!(
                    "track {}: first_frame {} > last_frame {}",
                    rec.id, rec.first_frame, rec.last_frame
                )));
            }
            if rec.last_frame >= self.frames.len() {
                return Err(Error::invalid(format!(
                    "track {}: last_frame {} beyond video length {}",
                    rec.id,
                    rec.last_frame,
                    self.frames.len()
                )));
            }
            if table.insert(rec.id, *rec).is_some() {
                return Err(Error::invalid(format!("duplicate track id {}", rec.id)));
            }
        }
        for rec in &self.tracks {
            if rec.parent != 0 {
                let p = table.get(&rec.parent).ok_or_else(|| {
                    Error::invalid(format!("track {}: unknown parent {}", rec.id, rec.parent))
                })?;
                if p.last_frame + 1 != rec.first_frame {
                    return Err(Error::invalid(format!(
                        "track {}: parent {} ends at {} but child starts at {}",
                        rec.id, rec.parent, p.last_frame, rec.first_frame
                    )));
                }
            }
        }

        // Presence[id] = frames where the id actually has pixels.
        let mut presence: BTreeMap<u32, BTreeSet<usize>> = BTreeMap::new();
        for (t, f) in self.frames.iter().enumerate() {
            for &id in f.labels.iter() {
                if id != 0 {
                    presence.entry(id).or_default().insert(t);
                }
            }
        }
        for (id, frames) in &presence {
            let rec = table
                .get(id)
                .ok_or_else(|| Error::invalid(format!("id {id} in frames but not in track table")))?;
            let lo = *frames.iter().next().unwrap();
            let hi = *frames.iter().next_back().unwrap();
            if lo != rec.first_frame || hi != rec.last_frame {
                return Err(Error::invalid(format!(
                    "track {id}: pixels span [{lo}, {hi}] but table says [{}, {}]",
                    rec.first_frame, rec.last_frame
                )));
            }
            if frames.len() != hi - lo + 1 {
                return Err(Error::invalid(format!(
                    "track {id}: non-contiguous appearance within [{lo}, {hi}]"
                )));
            }
        }
        for rec in &self.tracks {
            if !presence.contains_key(&rec.id) {
                return Err(Error::invalid(format!(
                    "track {} listed in table but has no pixels",
                    rec.id
                )));
            }
        }
        Ok(())
    }
}

/// Node of a tracking graph: one object instance in one frame.
pub type Node = (usize, u32);

/// Acyclic oriented graph of (frame, id) nodes with temporal edges.
#[derive(Debug, Clone)]
pub struct TrackingGraph {
    pub nodes: Vec<Node>,
    /// Directed edges between consecutive frames, (frame, id) -> (frame+1, id').
    pub edges: Vec<(Node, Node)>,
    pub node_pixels: BTreeMap<Node, Vec<u32>>,
}

impl TrackingGraph {
    /// An edge between two frames of the same track is a continuation; an edge
    /// crossing ids is a parent link.
    pub fn edge_is_parent_link(edge: &(Node, Node)) -> bool {
        edge.0 .1 != edge.1 .1
    }
}

/// Build the tracking graph of a label video: one node per (frame, id) with a
/// nonempty pixel set, continuation edges along each track, and one parent
/// edge per nonzero parent link.
pub fn build_tracking_graph(video: &LabelVideo) -> Result<TrackingGraph> {
    video.validate()?;

    let mut node_pixels: BTreeMap<Node, Vec<u32>> = BTreeMap::new();
    for (t, frame) in video.frames.iter().enumerate() {
        for (id, px) in frame.pixels_by_id() {
            node_pixels.insert((t, id), px);
        }
    }

    let nodes: Vec<Node> = node_pixels.keys().copied().collect();
    let mut edges = Vec::new();
    for rec in &video.tracks {
        for t in rec.first_frame..rec.last_frame {
            edges.push(((t, rec.id), (t + 1, rec.id)));
        }
        if rec.parent != 0 {
            // Validation guarantees parent ends exactly one frame earlier.
            edges.push(((rec.first_frame - 1, rec.parent), (rec.first_frame, rec.id)));
        }
    }
    edges.sort_unstable();

    Ok(TrackingGraph {
        nodes,
        edges,
        node_pixels,
    })
}

/// Jaccard overlap of two pixel sets given as sorted index slices.
///
/// Errors when both sets are empty; the ratio is undefined there.
pub fn jaccard(a: &[u32], b: &[u32]) -> Result<f64> {
    if a.is_empty() && b.is_empty() {
        return Err(Error::invalid("jaccard of two empty sets"));
    }
    let inter = intersection_size(a, b);
    let union = a.len() + b.len() - inter;
    Ok(inter as f64 / union as f64)
}

/// |a ∩ b| for sorted slices.
pub fn intersection_size(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0usize, 0usize, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Renumber track ids to 1..K ordered by (first_frame, first raster-scan pixel
/// in the first appearance frame). Pixel geometry is untouched.
pub fn relabel_canonical(video: &LabelVideo) -> LabelVideo {
    // (first_frame, first raster index, old id) -> sort key
    let mut keys: Vec<(usize, u32, u32)> = Vec::new();
    let mut seen: BTreeSet<u32> = BTreeSet::new();
    for (t, frame) in video.frames.iter().enumerate() {
        for (i, &id) in frame.labels.iter().enumerate() {
            if id != 0 && seen.insert(id) {
                keys.push((t, i as u32, id));
            }
        }
    }
    keys.sort_unstable();
    let mut map: BTreeMap<u32, u32> = BTreeMap::new();
    for (k, &(_, _, old)) in keys.iter().enumerate() {
        map.insert(old, (k + 1) as u32);
    }

    let frames = video
        .frames
        .iter()
        .map(|f| LabelFrame {
            width: f.width,
            height: f.height,
            labels: f
                .labels
                .iter()
                .map(|&id| if id == 0 { 0 } else { map[&id] })
                .collect(),
        })
        .collect();

    let mut tracks: Vec<TrackRecord> = video
        .tracks
        .iter()
        .filter(|r| map.contains_key(&r.id))
        .map(|r| TrackRecord {
            id: map[&r.id],
            first_frame: r.first_frame,
            last_frame: r.last_frame,
            parent: if r.parent == 0 { 0 } else { map[&r.parent] },
        })
        .collect();
    tracks.sort_unstable_by_key(|r| r.id);

    LabelVideo { frames, tracks }
}

/// Rebuild a track table from raw frames alone: each id's contiguous run of
/// presence becomes one track; non-contiguous runs are split into fresh ids
/// (parent 0), then everything is canonically relabeled. Used after cropping
/// or splitting, where objects may leave and re-enter the window.
pub fn rebuild_tracks(frames: Vec<LabelFrame>) -> LabelVideo {
    let mut presence: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (t, f) in frames.iter().enumerate() {
        let mut seen = BTreeSet::new();
        for &id in &f.labels {
            if id != 0 && seen.insert(id) {
                presence.entry(id).or_default().push(t);
            }
        }
    }

    let mut next_id = presence.keys().next_back().copied().unwrap_or(0) + 1;
    let mut frames = frames;
    let mut tracks = Vec::new();
    for (id, ts) in presence {
        // Split into maximal contiguous runs; the first run keeps the id.
        let mut runs: Vec<(usize, usize)> = Vec::new();
        for &t in &ts {
            match runs.last_mut() {
                Some((_, hi)) if *hi + 1 == t => *hi = t,
                _ => runs.push((t, t)),
            }
        }
        for (k, &(lo, hi)) in runs.iter().enumerate() {
            let run_id = if k == 0 {
                id
            } else {
                let fresh = next_id;
                next_id += 1;
                for t in lo..=hi {
                    for v in frames[t].labels.iter_mut() {
                        if *v == id {
                            *v = fresh;
                        }
                    }
                }
                fresh
            };
            tracks.push(TrackRecord {
                id: run_id,
                first_frame: lo,
                last_frame: hi,
                parent: 0,
            });
        }
    }

    relabel_canonical(&LabelVideo { frames, tracks })
}

/// 4-connected components of the nonzero pixels sharing one label value.
/// Returns each component as a sorted list of linear indices.
pub fn connected_components(frame: &LabelFrame) -> Vec<Vec<u32>> {
    let w = frame.width as usize;
    let h = frame.height as usize;
    let mut visited = vec![false; w * h];
    let mut out = Vec::new();
    for start in 0..w * h {
        if visited[start] || frame.labels[start] == 0 {
            continue;
        }
        let id = frame.labels[start];
        let mut comp = Vec::new();
        let mut stack = vec![start];
        visited[start] = true;
        while let Some(p) = stack.pop() {
            comp.push(p as u32);
            let (x, y) = (p % w, p / w);
            let mut push = |q: usize| {
                if !visited[q] && frame.labels[q] == id {
                    visited[q] = true;
                    stack.push(q);
                }
            };
            if x > 0 {
                push(p - 1);
            }
            if x + 1 < w {
                push(p + 1);
            }
            if y > 0 {
                push(p - w);
            }
            if y + 1 < h {
                push(p + w);
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

//! Two-pass union-find connected-component labeling.

use serde::{Deserialize, Serialize};

use super::BinaryImage;
use crate::geom::BBox;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl Connectivity {
    pub fn from_neighbors(n: u8) -> Option<Self> {
        match n {
            4 => Some(Connectivity::Four),
            8 => Some(Connectivity::Eight),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    /// Raster-scan discovery order among the surviving components.
    pub id: usize,
    pub pixel_count: usize,
    pub bbox: BBox,
    /// Mean `(x, y)` of member pixel coordinates.
    pub centroid: (f64, f64),
}

struct DisjointSet {
    parent: Vec<u32>,
}

impl DisjointSet {
    fn new() -> Self {
        DisjointSet { parent: Vec::new() }
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let ra = self.find(a);
        let rb = self.find(b);
        // the smaller label stays root so roots follow raster order
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        lo
    }
}

#[derive(Clone, Copy)]
struct Accum {
    count: usize,
    sum_x: u64,
    sum_y: u64,
    x0: u32,
    y0: u32,
    x1: u32,
    y1: u32,
}

/// Labels the ink pixels of `mask`.
///
/// Components smaller than `min_pixels` are dropped. The result is sorted by
/// `(bbox.y, bbox.x, id)`.
pub fn connected_components(mask: &BinaryImage, connectivity: Connectivity, min_pixels: usize) -> Vec<Component> {
    let labels = label_pixels(mask, connectivity);
    let (w, h) = (mask.width(), mask.height());

    let max_label = labels.iter().copied().max().unwrap_or(0);

    let mut accums: Vec<Option<Accum>> = vec![None; max_label as usize];
    for y in 0..h {
        for x in 0..w {
            let l = labels[(y * w + x) as usize];
            if l == 0 {
                continue;
            }
            let slot = &mut accums[l as usize - 1];
            match slot {
                None => {
                    *slot = Some(Accum {
                        count: 1,
                        sum_x: x as u64,
                        sum_y: y as u64,
                        x0: x,
                        y0: y,
                        x1: x,
                        y1: y,
                    })
                }
                Some(a) => {
                    a.count += 1;
                    a.sum_x += x as u64;
                    a.sum_y += y as u64;
                    a.x0 = a.x0.min(x);
                    a.x1 = a.x1.max(x);
                    a.y1 = a.y1.max(y);
                }
            }
        }
    }

    let mut out: Vec<Component> = accums
        .into_iter()
        .flatten()
        .filter(|a| a.count >= min_pixels.max(1))
        .enumerate()
        .map(|(id, a)| Component {
            id,
            pixel_count: a.count,
            bbox: BBox::from_corners(a.x0, a.y0, a.x1, a.y1),
            centroid: (a.sum_x as f64 / a.count as f64, a.sum_y as f64 / a.count as f64),
        })
        .collect();
    out.sort_by(|a, b| (a.bbox.y, a.bbox.x, a.id).cmp(&(b.bbox.y, b.bbox.x, b.id)));
    out
}

/// Per-pixel component labels: 0 for background, `1..=n` for components,
/// numbered in raster order of each component's first pixel.
pub fn label_pixels(mask: &BinaryImage, connectivity: Connectivity) -> Vec<u32> {
    let (w, h) = (mask.width() as usize, mask.height() as usize);
    let bits = mask.bits();
    let mut provisional = vec![u32::MAX; w * h];
    let mut sets = DisjointSet::new();

    // first pass: provisional labels from already-visited neighbours
    for y in 0..h {
        for x in 0..w {
            let idx = y * w + x;
            if !bits[idx] {
                continue;
            }
            let mut label = u32::MAX;
            let visit = |nidx: usize, label: &mut u32, sets: &mut DisjointSet| {
                let nl = provisional[nidx];
                if nl != u32::MAX {
                    *label = if *label == u32::MAX { nl } else { sets.union(*label, nl) };
                }
            };
            if x > 0 {
                visit(idx - 1, &mut label, &mut sets);
            }
            if y > 0 {
                visit(idx - w, &mut label, &mut sets);
                if connectivity == Connectivity::Eight {
                    if x > 0 {
                        visit(idx - w - 1, &mut label, &mut sets);
                    }
                    if x + 1 < w {
                        visit(idx - w + 1, &mut label, &mut sets);
                    }
                }
            }
            provisional[idx] = if label == u32::MAX { sets.make() } else { label };
        }
    }

    // second pass: resolve to roots and renumber densely in raster order
    let mut dense = vec![0u32; sets.parent.len()];
    let mut next = 0u32;
    let mut out = vec![0u32; w * h];
    for idx in 0..w * h {
        let p = provisional[idx];
        if p == u32::MAX {
            continue;
        }
        let root = sets.find(p) as usize;
        if dense[root] == 0 {
            next += 1;
            dense[root] = next;
        }
        out[idx] = dense[root];
    }
    out
}

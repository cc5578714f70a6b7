//! Exact K-nearest-neighbour graph over component centroids, backed by a
//! uniform grid index.

use crate::raster::Component;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    /// Index of the neighbour in `ComponentGraph::components`.
    pub target: usize,
    pub distance: f64,
    /// Direction in degrees, folded into `[-90, 90)`.
    pub angle: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentGraph {
    pub components: Vec<Component>,
    /// `neighbors[i]` holds `min(k, n - 1)` edges sorted by `(distance, id)`.
    pub neighbors: Vec<Vec<Edge>>,
}

impl ComponentGraph {
    /// Fewer than two components: no edges can exist.
    pub fn is_empty(&self) -> bool {
        self.components.len() < 2
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, &Edge)> {
        self.neighbors
            .iter()
            .enumerate()
            .flat_map(|(i, es)| es.iter().map(move |e| (i, e)))
    }
}

/// Folds an angle in degrees into `[-90, 90)`.
pub fn fold_angle(deg: f64) -> f64 {
    let a = (deg + 90.0).rem_euclid(180.0) - 90.0;
    if a >= 90.0 {
        a - 180.0
    } else {
        a
    }
}

/// Undirected edge direction in `[-90, 90)`; identical for `(a, b)` and `(b, a)`.
pub fn edge_angle(from: (f64, f64), to: (f64, f64)) -> f64 {
    let (mut dx, mut dy) = (to.0 - from.0, to.1 - from.1);
    if dx < 0.0 || (dx == 0.0 && dy > 0.0) {
        dx = -dx;
        dy = -dy;
    }
    fold_angle(dy.atan2(dx).to_degrees())
}

pub(crate) fn squared_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    dx * dx + dy * dy
}

struct Grid {
    x0: f64,
    y0: f64,
    cell: f64,
    cols: usize,
    rows: usize,
    cells: Vec<Vec<usize>>,
}

impl Grid {
    fn new(points: &[(f64, f64)], k: usize) -> Self {
        let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &(x, y) in points {
            x0 = x0.min(x);
            y0 = y0.min(y);
            x1 = x1.max(x);
            y1 = y1.max(y);
        }
        let area = ((x1 - x0).max(1.0)) * ((y1 - y0).max(1.0));
        // roughly k points per cell
        let cell = (area * k.max(1) as f64 / points.len() as f64).sqrt().max(1.0);
        let cols = ((x1 - x0) / cell).floor() as usize + 1;
        let rows = ((y1 - y0) / cell).floor() as usize + 1;
        let mut cells = vec![Vec::new(); cols * rows];
        let mut grid = Grid {
            x0,
            y0,
            cell,
            cols,
            rows,
            cells: Vec::new(),
        };
        for (i, &p) in points.iter().enumerate() {
            let (cx, cy) = grid.cell_of(p);
            cells[cy * cols + cx].push(i);
        }
        grid.cells = cells;
        grid
    }

    fn cell_of(&self, p: (f64, f64)) -> (usize, usize) {
        let cx = (((p.0 - self.x0) / self.cell).floor() as usize).min(self.cols - 1);
        let cy = (((p.1 - self.y0) / self.cell).floor() as usize).min(self.rows - 1);
        (cx, cy)
    }
}

/// Builds the exact K-NN graph; ties are broken by `(distance, component id)`.
pub fn build_knn_graph(components: Vec<Component>, k: usize) -> ComponentGraph {
    let n = components.len();
    if n < 2 || k == 0 {
        return ComponentGraph {
            neighbors: vec![Vec::new(); n],
            components,
        };
    }
    let k = k.min(n - 1);
    let points: Vec<(f64, f64)> = components.iter().map(|c| c.centroid).collect();
    let grid = Grid::new(&points, k);

    let neighbors = (0..n)
        .map(|i| {
            let p = points[i];
            let (cx, cy) = grid.cell_of(p);
            let mut best: Vec<(f64, usize, usize)> = Vec::with_capacity(k + 1);
            let max_ring = grid.cols.max(grid.rows);
            for ring in 0..=max_ring {
                let (x_lo, x_hi) = (cx as i64 - ring as i64, cx as i64 + ring as i64);
                let (y_lo, y_hi) = (cy as i64 - ring as i64, cy as i64 + ring as i64);
                for gy in y_lo..=y_hi {
                    if gy < 0 || gy >= grid.rows as i64 {
                        continue;
                    }
                    let on_edge_row = gy == y_lo || gy == y_hi;
                    for gx in x_lo..=x_hi {
                        if gx < 0 || gx >= grid.cols as i64 {
                            continue;
                        }
                        if !on_edge_row && gx != x_lo && gx != x_hi {
                            continue;
                        }
                        for &j in &grid.cells[gy as usize * grid.cols + gx as usize] {
                            if j == i {
                                continue;
                            }
                            let cand = (squared_distance(p, points[j]), components[j].id, j);
                            if best.len() < k || cmp_candidate(&cand, &best[best.len() - 1]).is_lt() {
                                let pos = best.partition_point(|b| cmp_candidate(b, &cand).is_lt());
                                best.insert(pos, cand);
                                best.truncate(k);
                            }
                        }
                    }
                }
                // anything outside this ring is at least `ring * cell` away
                if best.len() == k {
                    let reach = ring as f64 * grid.cell;
                    if best[k - 1].0 < reach * reach {
                        break;
                    }
                }
            }
            best.into_iter()
                .map(|(d2, _, j)| Edge {
                    target: j,
                    distance: d2.sqrt(),
                    angle: edge_angle(p, points[j]),
                })
                .collect()
        })
        .collect();

    ComponentGraph { components, neighbors }
}

fn cmp_candidate(a: &(f64, usize, usize), b: &(f64, usize, usize)) -> std::cmp::Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

//! Region feature vectors: bag of words followed by six spatial features.

use super::text::{tokenize, Vocabulary};
use crate::geom::BBox;

pub const SPATIAL_DIMS: usize = 6;

/// Sparse feature vector of dimension `|V| + 6`, entries sorted by index.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureVector {
    pub dim: usize,
    pub entries: Vec<(usize, f64)>,
}

impl FeatureVector {
    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for &(i, x) in &self.entries {
            v[i] = x;
        }
        v
    }

    pub fn from_dense(values: &[f64]) -> Self {
        FeatureVector {
            dim: values.len(),
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0.0)
                .map(|(i, &x)| (i, x))
                .collect(),
        }
    }

    pub fn spatial(&self) -> Vec<f64> {
        self.to_dense()[self.dim - SPATIAL_DIMS..].to_vec()
    }
}

/// `(cx/W, cy/H, w/W, h/H, w/h, area/(W*H))`.
pub fn spatial_features(bbox: &BBox, page_w: u32, page_h: u32) -> [f64; SPATIAL_DIMS] {
    let (pw, ph) = (page_w as f64, page_h as f64);
    let (cx, cy) = bbox.center();
    let (w, h) = (bbox.w as f64, bbox.h as f64);
    [cx / pw, cy / ph, w / pw, h / ph, w / h, (w * h) / (pw * ph)]
}

/// Bag-of-words block (presence, or counts with `counts`) then spatial
/// block. Missing text leaves the BoW block zero.
pub fn featurize(
    text: Option<&str>,
    bbox: &BBox,
    page_w: u32,
    page_h: u32,
    vocab: &Vocabulary,
    counts: bool,
) -> FeatureVector {
    let mut bow: Vec<(usize, f64)> = Vec::new();
    if let Some(text) = text {
        for t in tokenize(text) {
            if let Some(i) = vocab.index_of(&t) {
                bow.push((i, 1.0));
            }
        }
        bow.sort_by_key(|e| e.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(bow.len());
        for (i, x) in bow {
            match merged.last_mut() {
                Some(last) if last.0 == i => {
                    if counts {
                        last.1 += x;
                    }
                }
                _ => merged.push((i, x)),
            }
        }
        bow = merged;
    }
    let n = vocab.len();
    bow.extend(
        spatial_features(bbox, page_w, page_h)
            .into_iter()
            .enumerate()
            .map(|(i, x)| (n + i, x)),
    );
    FeatureVector {
        dim: n + SPATIAL_DIMS,
        entries: bow,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab() -> Vocabulary {
        Vocabulary::build(["total total", "total due"], 10, 1)
    }

    #[test]
    fn full_page_box() {
        let s = spatial_features(&BBox::new(0, 0, 600, 800), 600, 800);
        assert_eq!(s, [0.5, 0.5, 1.0, 1.0, 600.0 / 800.0, 1.0]);
    }

    #[test]
    fn bow_presence() {
        let f = featurize(Some("Total total"), &BBox::new(0, 0, 10, 10), 100, 100, &vocab(), false);
        assert_eq!(f.dim, 8);
        assert_eq!(&f.to_dense()[..2], &[1.0, 0.0]);
        let c = featurize(Some("Total total"), &BBox::new(0, 0, 10, 10), 100, 100, &vocab(), true);
        assert_eq!(c.to_dense()[0], 2.0);
    }

    #[test]
    fn textless_region_keeps_spatial() {
        let f = featurize(None, &BBox::new(10, 20, 30, 40), 100, 100, &vocab(), false);
        let d = f.to_dense();
        assert_eq!(&d[..2], &[0.0, 0.0]);
        assert!(f.spatial().iter().all(|&x| x > 0.0));
        assert_eq!(FeatureVector::from_dense(&d), f);
    }
}

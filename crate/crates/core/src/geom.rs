use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Axis-aligned pixel rectangle `(x, y, w, h)`.
///
/// Coordinates are half-open: the box covers columns `x..x + w` and rows
/// `y..y + h`, so its area is exactly `w * h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BBox {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl BBox {
    /// Panics when `w` or `h` is zero.
    pub fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        assert!(w >= 1 && h >= 1, "BBox requires w >= 1 and h >= 1");
        BBox { x, y, w, h }
    }

    pub fn try_new(x: u32, y: u32, w: u32, h: u32) -> Option<Self> {
        (w >= 1 && h >= 1).then_some(BBox { x, y, w, h })
    }

    /// Box spanning the inclusive pixel corners `(x0, y0)` and `(x1, y1)`.
    pub fn from_corners(x0: u32, y0: u32, x1: u32, y1: u32) -> Self {
        BBox::new(x0, y0, x1 - x0 + 1, y1 - y0 + 1)
    }

    pub fn right(&self) -> u32 {
        self.x + self.w
    }

    pub fn bottom(&self) -> u32 {
        self.y + self.h
    }

    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    pub fn center(&self) -> (f64, f64) {
        (
            self.x as f64 + self.w as f64 / 2.0,
            self.y as f64 + self.h as f64 / 2.0,
        )
    }

    pub fn intersection_area(&self, other: &BBox) -> u64 {
        let ix = self.right().min(other.right()).saturating_sub(self.x.max(other.x));
        let iy = self.bottom().min(other.bottom()).saturating_sub(self.y.max(other.y));
        ix as u64 * iy as u64
    }

    pub fn union(&self, other: &BBox) -> BBox {
        let x = self.x.min(other.x);
        let y = self.y.min(other.y);
        BBox {
            x,
            y,
            w: self.right().max(other.right()) - x,
            h: self.bottom().max(other.bottom()) - y,
        }
    }

    pub fn contains(&self, other: &BBox) -> bool {
        other.x >= self.x
            && other.y >= self.y
            && other.right() <= self.right()
            && other.bottom() <= self.bottom()
    }

    pub fn contains_point(&self, px: f64, py: f64) -> bool {
        px >= self.x as f64 && py >= self.y as f64 && px < self.right() as f64 && py < self.bottom() as f64
    }

    pub fn fits_in(&self, page_w: u32, page_h: u32) -> bool {
        self.right() <= page_w && self.bottom() <= page_h
    }
}

impl fmt::Display for BBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}, {}]", self.x, self.y, self.w, self.h)
    }
}

impl Serialize for BBox {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        [self.x, self.y, self.w, self.h].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BBox {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let [x, y, w, h] = <[u32; 4]>::deserialize(deserializer)?;
        BBox::try_new(x, y, w, h)
            .ok_or_else(|| serde::de::Error::custom(format!("bbox [{x}, {y}, {w}, {h}] has zero width or height")))
    }
}

/// Intersection over union of two boxes, in `[0, 1]`.
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let inter = a.intersection_area(b);
    if inter == 0 {
        return 0.0;
    }
    let union = a.area() + b.area() - inter;
    inter as f64 / union as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn iou_examples() {
        let a = BBox::new(0, 0, 10, 10);
        assert_eq!(iou(&a, &a), 1.0);
        assert_eq!(iou(&a, &BBox::new(100, 100, 5, 5)), 0.0);
        // intersection 5x10 = 50, union 100 + 100 - 50 = 150
        let b = BBox::new(5, 0, 10, 10);
        assert!((iou(&a, &b) - 50.0 / 150.0).abs() < 1e-15);
    }

    #[test]
    fn touching_edges_do_not_intersect() {
        let a = BBox::new(0, 0, 10, 10);
        assert_eq!(iou(&a, &BBox::new(10, 0, 10, 10)), 0.0);
        assert_eq!(iou(&a, &BBox::new(0, 10, 10, 10)), 0.0);
    }

    #[test]
    fn bbox_json_is_an_array() {
        let b = BBox::new(1, 2, 3, 4);
        assert_eq!(serde_json::to_string(&b).unwrap(), "[1,2,3,4]");
        assert_eq!(serde_json::from_str::<BBox>("[1,2,3,4]").unwrap(), b);
        assert!(serde_json::from_str::<BBox>("[1,2,0,4]").is_err());
    }

    fn arb_box() -> impl Strategy<Value = BBox> {
        (0u32..100, 0u32..100, 1u32..60, 1u32..60).prop_map(|(x, y, w, h)| BBox::new(x, y, w, h))
    }

    proptest! {
        #[test]
        fn iou_is_symmetric_and_bounded(a in arb_box(), b in arb_box()) {
            let ab = iou(&a, &b);
            prop_assert_eq!(ab, iou(&b, &a));
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert_eq!(iou(&a, &a), 1.0);
        }

        #[test]
        fn union_contains_both(a in arb_box(), b in arb_box()) {
            let u = a.union(&b);
            prop_assert!(u.contains(&a) && u.contains(&b));
        }
    }
}

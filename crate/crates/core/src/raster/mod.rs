//! Grayscale rasters, PGM I/O, Otsu binarization and connected components.

pub mod components;
pub mod otsu;
pub mod pgm;

pub use components::{connected_components, Component, Connectivity};
pub use otsu::{binarize, otsu_threshold};
pub use pgm::{read_pgm, write_pgm};

use crate::geom::BBox;

pub const INK: u8 = 0;
pub const PAPER: u8 = 255;

/// 8-bit single-channel image; 0 is black ink, 255 white paper.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, fill: u8) -> Self {
        assert!(width >= 1 && height >= 1, "image dimensions must be positive");
        GrayImage {
            width,
            height,
            pixels: vec![fill; width as usize * height as usize],
        }
    }

    pub fn blank(width: u32, height: u32) -> Self {
        Self::new(width, height, PAPER)
    }

    pub fn from_raw(width: u32, height: u32, pixels: Vec<u8>) -> Option<Self> {
        (width >= 1 && height >= 1 && pixels.len() == width as usize * height as usize).then_some(GrayImage {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, value: u8) {
        let idx = y as usize * self.width as usize + x as usize;
        self.pixels[idx] = value;
    }

    /// Fills `rect`, clipped to the image.
    pub fn fill_rect(&mut self, rect: BBox, value: u8) {
        let x1 = rect.right().min(self.width) as usize;
        let y1 = rect.bottom().min(self.height) as usize;
        let x0 = (rect.x as usize).min(x1);
        let w = self.width as usize;
        for y in rect.y as usize..y1 {
            self.pixels[y * w + x0..y * w + x1].fill(value);
        }
    }

    /// Draws the one-pixel outline of `rect`.
    pub fn stroke_rect(&mut self, rect: BBox, value: u8) {
        let (x0, y0) = (rect.x, rect.y);
        let (x1, y1) = (rect.right() - 1, rect.bottom() - 1);
        self.fill_rect(BBox::from_corners(x0, y0, x1, y0), value);
        self.fill_rect(BBox::from_corners(x0, y1, x1, y1), value);
        self.fill_rect(BBox::from_corners(x0, y0, x0, y1), value);
        self.fill_rect(BBox::from_corners(x1, y0, x1, y1), value);
    }

    pub fn count_where(&self, rect: BBox, pred: impl Fn(u8) -> bool) -> usize {
        let mut n = 0;
        for y in rect.y..rect.bottom().min(self.height) {
            for x in rect.x..rect.right().min(self.width) {
                if pred(self.get(x, y)) {
                    n += 1;
                }
            }
        }
        n
    }

    /// Tight bounding box of pixels below `PAPER`, if any.
    pub fn ink_bbox(&self) -> Option<BBox> {
        let mut bounds: Option<(u32, u32, u32, u32)> = None;
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) < PAPER {
                    bounds = Some(match bounds {
                        None => (x, y, x, y),
                        Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
                    });
                }
            }
        }
        bounds.map(|(x0, y0, x1, y1)| BBox::from_corners(x0, y0, x1, y1))
    }
}

/// Row-major ink mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryImage {
    width: u32,
    height: u32,
    bits: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width >= 1 && height >= 1, "image dimensions must be positive");
        BinaryImage {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        }
    }

    pub fn from_bits(width: u32, height: u32, bits: Vec<bool>) -> Option<Self> {
        (width >= 1 && height >= 1 && bits.len() == width as usize * height as usize).then_some(BinaryImage {
            width,
            height,
            bits,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: u32, y: u32) -> bool {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u32, y: u32, ink: bool) {
        let idx = y as usize * self.width as usize + x as usize;
        self.bits[idx] = ink;
    }

    pub fn ink_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

use super::{BinaryImage, GrayImage};

pub fn histogram(img: &GrayImage) -> [u64; 256] {
    let mut hist = [0u64; 256];
    for &p in img.pixels() {
        hist[p as usize] += 1;
    }
    hist
}

/// Otsu's threshold over the 256-bin histogram.
///
/// Class 0 holds the values `<= t`. The between-class variance is evaluated
/// in the form `(N*S0 - W0*S)^2 / (W0*W1)`, which is `N^2` times the usual
/// `w0*w1*(mu0 - mu1)^2`, so the arg-max is unchanged. A threshold with an
/// empty class scores 0. Ties keep the smallest `t`, which makes a constant
/// image yield 0.
pub fn otsu_threshold(img: &GrayImage) -> u8 {
    let hist = histogram(img);
    let total: u64 = hist.iter().sum();
    let sum_all: u64 = hist.iter().enumerate().map(|(v, &c)| v as u64 * c).sum();
    let n = total as f64;
    let s = sum_all as f64;

    let mut best_t = 0u8;
    let mut best_score = -1.0f64;
    let mut w0 = 0u64;
    let mut s0 = 0u64;
    for t in 0..=255usize {
        w0 += hist[t];
        s0 += t as u64 * hist[t];
        let w1 = total - w0;
        let score = if w0 == 0 || w1 == 0 {
            0.0
        } else {
            let d = n * s0 as f64 - w0 as f64 * s;
            d * d / (w0 as f64 * w1 as f64)
        };
        if score > best_score {
            best_score = score;
            best_t = t as u8;
        }
    }
    best_t
}

/// Ink mask with ink where `pixel <= threshold`.
pub fn binarize(img: &GrayImage, threshold: u8) -> BinaryImage {
    let bits = img.pixels().iter().map(|&p| p <= threshold).collect();
    BinaryImage::from_bits(img.width(), img.height(), bits).expect("dimensions preserved")
}

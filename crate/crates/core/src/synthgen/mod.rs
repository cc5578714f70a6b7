//! Deterministic synthetic document pages with exact ground truth.
//!
//! Text is greeked: characters are solid rectangles separated by fixed
//! character, word and line gaps, which is exactly the structure the
//! Docstrum segmenter measures. Every document derives its own generator
//! state from `seed ^ doc_index`, so pages can be produced in any order (or
//! in parallel) with identical bytes.

mod layout;
pub mod lexicon;
pub mod render;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use lexicon::class_lexicon;
pub use render::{render_caption, render_greeked_text, render_image_block, render_list, render_table, GreekedTextStyle};

use crate::error::{Error, Result};
use crate::manifest::{save_manifest, AnnotatedDoc, LabeledRegion, Manifest, Split};
use crate::raster::{pgm, GrayImage};
use crate::rng::Rng;
use crate::taxonomy::{LabelTaxonomy, SOURCE8};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    #[default]
    #[serde(rename = "source8")]
    Source8,
    #[serde(rename = "synthetic-invoice")]
    SyntheticInvoice,
    #[serde(rename = "synthetic-resume")]
    SyntheticResume,
}

impl Preset {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "source8" => Some(Preset::Source8),
            "synthetic-invoice" => Some(Preset::SyntheticInvoice),
            "synthetic-resume" => Some(Preset::SyntheticResume),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Source8 => "source8",
            Preset::SyntheticInvoice => "synthetic-invoice",
            Preset::SyntheticResume => "synthetic-resume",
        }
    }

    pub fn taxonomy(&self) -> LabelTaxonomy {
        match self {
            Preset::Source8 => LabelTaxonomy::source8(),
            Preset::SyntheticInvoice => LabelTaxonomy::invoice5(),
            Preset::SyntheticResume => LabelTaxonomy::resume6(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub seed: u64,
    pub n_docs: usize,
    pub preset: Preset,
    /// Candidate `(width, height)` page sizes in pixels, chosen uniformly.
    pub page_sizes: Vec<(u32, u32)>,
    pub two_column_prob: f64,
    pub margin: u32,
    pub gutter: u32,
    /// Per-label weights for standalone source8 elements. The
    /// `"Image/Table Caption"` entry is instead the probability that a table
    /// or image element gets a caption.
    pub element_mix: BTreeMap<String, f64>,
    /// Inclusive range of standalone elements per source8 page.
    pub elements_per_page: (u32, u32),
    /// Vertical gap between consecutive elements.
    pub block_gap: u32,
    pub char_gap: u32,
    pub word_gap: u32,
    pub line_gap: u32,
    pub char_w: (u32, u32),
    pub char_h: (u32, u32),
    /// Maximum horizontal offset applied to element positions.
    pub jitter: u32,
    /// When set, the first `test_size` documents form the test split.
    pub test_size: Option<usize>,
}

impl Default for GenConfig {
    fn default() -> Self {
        let mix = [
            ("Title", 0.05),
            ("Heading", 0.10),
            ("Sub-Heading", 0.10),
            ("Text Block", 0.40),
            ("List", 0.12),
            ("Table", 0.10),
            ("Image Content", 0.13),
            ("Image/Table Caption", 0.60),
        ];
        GenConfig {
            seed: 0,
            n_docs: 200,
            preset: Preset::Source8,
            page_sizes: vec![(620, 877), (827, 1169), (1240, 1754)],
            two_column_prob: 0.3,
            margin: 40,
            gutter: 48,
            element_mix: mix.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            elements_per_page: (1, 40),
            block_gap: 21,
            char_gap: 2,
            word_gap: 6,
            line_gap: 7,
            char_w: (5, 7),
            char_h: (8, 10),
            jitter: 6,
            test_size: None,
        }
    }
}

impl GenConfig {
    pub fn preset(preset: Preset) -> Self {
        match preset {
            Preset::Source8 => GenConfig::default(),
            Preset::SyntheticInvoice => GenConfig {
                preset,
                n_docs: 170,
                page_sizes: vec![(620, 877), (827, 1169)],
                two_column_prob: 0.0,
                test_size: Some(100),
                ..GenConfig::default()
            },
            Preset::SyntheticResume => GenConfig {
                preset,
                n_docs: 100,
                page_sizes: vec![(620, 877), (827, 1169)],
                two_column_prob: 0.3,
                test_size: Some(50),
                ..GenConfig::default()
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.n_docs < 1 {
            return fail("n_docs must be at least 1".into());
        }
        if self.page_sizes.is_empty() {
            return fail("page_sizes is empty".into());
        }
        for &(w, h) in &self.page_sizes {
            if w < 2 * self.margin + 200 || h < 2 * self.margin + 200 {
                return fail(format!("page size {w}x{h} leaves no room inside margin {}", self.margin));
            }
        }
        if !(0.0..=1.0).contains(&self.two_column_prob) {
            return fail(format!("two_column_prob {} is outside [0, 1]", self.two_column_prob));
        }
        for (label, &p) in &self.element_mix {
            if !SOURCE8.contains(&label.as_str()) {
                return fail(format!("element_mix names {label:?}, which is not a source8 label"));
            }
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("element_mix[{label:?}] = {p} is outside [0, 1]"));
            }
        }
        if self.preset == Preset::Source8 && SOURCE8[..7].iter().all(|l| self.mix(l) == 0.0) {
            return fail("element_mix gives every standalone element probability 0".into());
        }
        if self.elements_per_page.0 < 1 || self.elements_per_page.0 > self.elements_per_page.1 {
            return fail(format!("elements_per_page range {:?} is empty", self.elements_per_page));
        }
        for (name, (lo, hi)) in [("char_w", self.char_w), ("char_h", self.char_h)] {
            if lo < 1 || lo > hi {
                return fail(format!("{name} range ({lo}, {hi}) is invalid"));
            }
        }
        if self.gutter < 1 || self.block_gap < 1 || self.margin < 1 {
            return fail("margin, gutter and block_gap must be >= 1".into());
        }
        if let Some(t) = self.test_size {
            if t > self.n_docs {
                return fail(format!("test_size {t} exceeds n_docs {}", self.n_docs));
            }
        }
        self.body_style(self.char_w.0, self.char_h.0).validate()
    }

    pub fn mix(&self, label: &str) -> f64 {
        self.element_mix.get(label).copied().unwrap_or(0.0)
    }

    pub fn body_style(&self, char_w: u32, char_h: u32) -> GreekedTextStyle {
        GreekedTextStyle {
            char_w,
            char_h,
            char_gap: self.char_gap,
            word_gap: self.word_gap,
            line_gap: self.line_gap,
            words_per_line: (1, 6),
            lines: (1, 1),
        }
    }

    fn sample_style(&self, rng: &mut Rng) -> GreekedTextStyle {
        let cw = rng.range_u32(self.char_w.0, self.char_w.1);
        let ch = rng.range_u32(self.char_h.0, self.char_h.1);
        self.body_style(cw, ch)
    }
}

pub fn doc_id(index: usize) -> String {
    format!("doc_{index:06}")
}

/// Body-text character style used on page `index`, i.e. the spacing ground
/// truth for that page.
pub fn page_style(cfg: &GenConfig, index: usize) -> GreekedTextStyle {
    let mut rng = Rng::new(cfg.seed ^ index as u64);
    rng.index(cfg.page_sizes.len());
    cfg.sample_style(&mut rng)
}

/// Renders page `index` of the corpus described by `cfg`.
pub fn generate_page(cfg: &GenConfig, index: usize) -> Result<(GrayImage, AnnotatedDoc)> {
    let mut rng = Rng::new(cfg.seed ^ index as u64);
    let size = *rng.choose(&cfg.page_sizes);
    let page = match cfg.preset {
        Preset::Source8 => layout::source8_page(cfg, size, &mut rng)?,
        Preset::SyntheticInvoice => layout::invoice_page(cfg, size, &mut rng)?,
        Preset::SyntheticResume => layout::resume_page(cfg, size, &mut rng)?,
    };
    let id = doc_id(index);
    let doc = AnnotatedDoc {
        image_path: format!("images/{id}.pgm"),
        doc_id: id,
        page_w: size.0,
        page_h: size.1,
        regions: page.regions,
    };
    Ok((page.image, doc))
}

/// Builds the manifest for `cfg` without writing any image.
pub fn generate_manifest<F>(cfg: &GenConfig, mut on_page: F) -> Result<Manifest>
where
    F: FnMut(usize, &GrayImage) -> Result<()>,
{
    cfg.validate()?;
    let mut manifest = Manifest::new(cfg.preset.taxonomy());
    for i in 0..cfg.n_docs {
        let (img, doc) = generate_page(cfg, i)?;
        on_page(i, &img)?;
        manifest.docs.push(doc);
    }
    manifest.split = split_for(cfg);
    Ok(manifest)
}

/// Train/test split of a generated corpus: the first `test_size` documents
/// are test documents.
pub fn split_for(cfg: &GenConfig) -> Option<BTreeMap<String, Split>> {
    cfg.test_size.map(|t| {
        (0..cfg.n_docs)
            .map(|i| (doc_id(i), if i < t { Split::Test } else { Split::Train }))
            .collect()
    })
}

/// Writes `out_dir/images/doc_NNNNNN.pgm` for every page plus
/// `out_dir/manifest.json`. Pages are rendered on the current rayon pool.
pub fn generate_corpus(cfg: &GenConfig, out_dir: impl AsRef<Path>) -> Result<Manifest> {
    cfg.validate()?;
    let out_dir = out_dir.as_ref();
    let images = out_dir.join("images");
    fs::create_dir_all(&images).map_err(|e| Error::io(&images, e))?;

    let docs: Vec<AnnotatedDoc> = (0..cfg.n_docs)
        .into_par_iter()
        .map(|i| {
            let (img, doc) = generate_page(cfg, i)?;
            pgm::write_pgm(&img, out_dir.join(&doc.image_path))?;
            Ok(doc)
        })
        .collect::<Result<_>>()?;

    let mut manifest = Manifest::new(cfg.preset.taxonomy());
    manifest.docs = docs;
    manifest.split = split_for(cfg);
    save_manifest(&manifest, out_dir.join("manifest.json"))?;
    Ok(manifest)
}

/// Regions whose ink is not exactly bounded by their bbox, for diagnostics.
pub fn loose_regions<'a>(img: &GrayImage, regions: &'a [LabeledRegion]) -> Vec<&'a LabeledRegion> {
    use crate::raster::PAPER;
    regions
        .iter()
        .filter(|r| {
            let b = r.bbox;
            let edge_ink = |rect: crate::geom::BBox| img.count_where(rect, |p| p < PAPER) > 0;
            let top = edge_ink(crate::geom::BBox::new(b.x, b.y, b.w, 1));
            let bottom = edge_ink(crate::geom::BBox::new(b.x, b.bottom() - 1, b.w, 1));
            let left = edge_ink(crate::geom::BBox::new(b.x, b.y, 1, b.h));
            let right = edge_ink(crate::geom::BBox::new(b.right() - 1, b.y, 1, b.h));
            !(top && bottom && left && right)
        })
        .collect()
}

//! Greeked rendering primitives. Every character is a filled
//! `char_w x char_h` rectangle, so each returned bbox bounds its ink exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::BBox;
use crate::raster::{GrayImage, INK};
use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreekedTextStyle {
    pub char_w: u32,
    pub char_h: u32,
    pub char_gap: u32,
    pub word_gap: u32,
    pub line_gap: u32,
    /// Inclusive range of words per line.
    pub words_per_line: (u32, u32),
    /// Inclusive range of lines per block.
    pub lines: (u32, u32),
}

impl GreekedTextStyle {
    pub fn validate(&self) -> Result<()> {
        let spacings = [self.char_w, self.char_h, self.char_gap, self.word_gap, self.line_gap];
        if spacings.iter().any(|&v| v < 1) {
            return Err(Error::Config("text style spacings must all be >= 1".into()));
        }
        if !(self.char_gap < self.word_gap && self.word_gap < self.line_gap) {
            return Err(Error::Config(format!(
                "text style needs char_gap < word_gap < line_gap, got {} / {} / {}",
                self.char_gap, self.word_gap, self.line_gap
            )));
        }
        if self.words_per_line.0 < 1 || self.words_per_line.0 > self.words_per_line.1 {
            return Err(Error::Config(format!("words_per_line range {:?} is empty or zero", self.words_per_line)));
        }
        if self.lines.0 < 1 || self.lines.0 > self.lines.1 {
            return Err(Error::Config(format!("lines range {:?} is empty or zero", self.lines)));
        }
        Ok(())
    }

    /// Same proportions with every dimension multiplied by `num / den`.
    pub fn scaled(&self, num: u32, den: u32) -> Self {
        let s = |v: u32| (v * num).div_ceil(den).max(1);
        GreekedTextStyle {
            char_w: s(self.char_w),
            char_h: s(self.char_h),
            char_gap: s(self.char_gap),
            word_gap: s(self.word_gap),
            line_gap: s(self.line_gap),
            ..*self
        }
    }

    pub fn with_lines(self, lo: u32, hi: u32) -> Self {
        GreekedTextStyle { lines: (lo, hi), ..self }
    }

    pub fn with_words(self, lo: u32, hi: u32) -> Self {
        GreekedTextStyle {
            words_per_line: (lo, hi),
            ..self
        }
    }

    pub fn word_width(&self, word: &str) -> u32 {
        let n = word.chars().count() as u32;
        n * self.char_w + n.saturating_sub(1) * self.char_gap
    }

    pub fn line_width(&self, words: &[String]) -> u32 {
        let widths: u32 = words.iter().map(|w| self.word_width(w)).sum();
        widths + words.len().saturating_sub(1) as u32 * self.word_gap
    }

    pub fn block_height(&self, n_lines: u32) -> u32 {
        n_lines * self.char_h + n_lines.saturating_sub(1) * self.line_gap
    }
}

/// Lines of words laid out at a fixed origin.
#[derive(Clone, Debug, PartialEq)]
pub struct TextPlan {
    pub style: GreekedTextStyle,
    pub lines: Vec<Vec<String>>,
}

impl TextPlan {
    pub fn width(&self) -> u32 {
        self.lines.iter().map(|l| self.style.line_width(l)).max().unwrap_or(0)
    }

    pub fn height(&self) -> u32 {
        self.style.block_height(self.lines.len() as u32)
    }

    pub fn words(&self) -> Vec<String> {
        self.lines.iter().flatten().cloned().collect()
    }

    pub fn draw(&self, img: &mut GrayImage, origin: (u32, u32)) -> BBox {
        draw_lines(img, origin, &self.style, &self.lines)
    }
}

/// Draws `lines` with their first character's top-left at `origin` and
/// returns the tight bbox.
pub fn draw_lines(img: &mut GrayImage, origin: (u32, u32), style: &GreekedTextStyle, lines: &[Vec<String>]) -> BBox {
    assert!(
        lines.iter().any(|l| !l.is_empty()),
        "greeked text needs at least one word"
    );
    let (x0, mut y) = origin;
    for line in lines {
        let mut x = x0;
        for (wi, word) in line.iter().enumerate() {
            if wi > 0 {
                x += style.word_gap;
            }
            for (ci, _) in word.chars().enumerate() {
                if ci > 0 {
                    x += style.char_gap;
                }
                img.fill_rect(BBox::new(x, y, style.char_w, style.char_h), INK);
                x += style.char_w;
            }
        }
        y += style.char_h + style.line_gap;
    }
    let w = lines.iter().map(|l| style.line_width(l)).max().unwrap_or(0);
    BBox::new(x0, origin.1, w, style.block_height(lines.len() as u32))
}

/// Samples a block of text no wider than `max_width`.
///
/// Each line takes a word count from `style.words_per_line`; with `fill` the
/// count is ignored and every line but the last is packed to `max_width`.
/// Words that cannot fit on an otherwise empty line are skipped.
pub fn plan_text(
    style: &GreekedTextStyle,
    lexicon: &[&str],
    max_width: u32,
    fill: bool,
    rng: &mut Rng,
) -> Result<TextPlan> {
    style.validate()?;
    let fitting: Vec<&str> = lexicon.iter().copied().filter(|w| style.word_width(w) <= max_width).collect();
    if fitting.is_empty() {
        return Err(Error::Config(format!("no lexicon word fits in {max_width}px")));
    }
    let n_lines = rng.range_u32(style.lines.0, style.lines.1);
    let mut lines = Vec::with_capacity(n_lines as usize);
    for li in 0..n_lines {
        let last = li + 1 == n_lines;
        let target = if fill && !last {
            u32::MAX
        } else {
            rng.range_u32(style.words_per_line.0, style.words_per_line.1)
        };
        let mut line: Vec<String> = Vec::new();
        let mut width = 0u32;
        let mut misses = 0;
        while (line.len() as u32) < target && misses < 4 {
            let word = *rng.choose(&fitting);
            let extra = style.word_width(word) + if line.is_empty() { 0 } else { style.word_gap };
            if width + extra <= max_width {
                width += extra;
                line.push(word.to_string());
                misses = 0;
            } else {
                misses += 1;
            }
        }
        if line.is_empty() {
            line.push(fitting[0].to_string());
        }
        lines.push(line);
    }
    Ok(TextPlan { style: *style, lines })
}

/// Samples and draws a block of greeked text at `origin`.
pub fn render_greeked_text(
    img: &mut GrayImage,
    origin: (u32, u32),
    style: &GreekedTextStyle,
    lexicon: &[&str],
    max_width: u32,
    rng: &mut Rng,
) -> Result<(BBox, Vec<String>)> {
    let plan = plan_text(style, lexicon, max_width, false, rng)?;
    let bbox = plan.draw(img, origin);
    Ok((bbox, plan.words()))
}

/// Ruled grid with one greeked word per cell.
#[derive(Clone, Debug, PartialEq)]
pub struct TablePlan {
    pub style: GreekedTextStyle,
    pub rows: u32,
    pub cols: u32,
    pub cell_w: u32,
    pub cell_h: u32,
    pub cells: Vec<Option<String>>,
}

impl TablePlan {
    fn pad(style: &GreekedTextStyle) -> u32 {
        style.char_gap + 2
    }

    pub fn new(style: &GreekedTextStyle, rows: u32, cols: u32, width: u32, lexicon: &[&str], rng: &mut Rng) -> Self {
        assert!(rows >= 1 && cols >= 1);
        let pad = Self::pad(style);
        let cell_w = ((width.saturating_sub(1)) / cols).max(2 * pad + style.char_w + 1);
        let cell_h = style.char_h + 2 * pad + 1;
        let room = cell_w - 1 - 2 * pad;
        let fitting: Vec<&str> = lexicon.iter().copied().filter(|w| style.word_width(w) <= room).collect();
        let cells = (0..rows * cols)
            .map(|_| (!fitting.is_empty()).then(|| rng.choose(&fitting).to_string()))
            .collect();
        TablePlan {
            style: *style,
            rows,
            cols,
            cell_w,
            cell_h,
            cells,
        }
    }

    pub fn width(&self) -> u32 {
        self.cols * self.cell_w + 1
    }

    pub fn height(&self) -> u32 {
        self.rows * self.cell_h + 1
    }

    pub fn words(&self) -> Vec<String> {
        self.cells.iter().flatten().cloned().collect()
    }

    pub fn draw(&self, img: &mut GrayImage, origin: (u32, u32)) -> BBox {
        let (x0, y0) = origin;
        let bbox = BBox::new(x0, y0, self.width(), self.height());
        for r in 0..=self.rows {
            img.fill_rect(BBox::new(x0, y0 + r * self.cell_h, self.width(), 1), INK);
        }
        for c in 0..=self.cols {
            img.fill_rect(BBox::new(x0 + c * self.cell_w, y0, 1, self.height()), INK);
        }
        let pad = Self::pad(&self.style);
        for (i, cell) in self.cells.iter().enumerate() {
            if let Some(word) = cell {
                let (r, c) = (i as u32 / self.cols, i as u32 % self.cols);
                let origin = (x0 + c * self.cell_w + 1 + pad, y0 + r * self.cell_h + 1 + pad);
                draw_lines(img, origin, &self.style, &[vec![word.clone()]]);
            }
        }
        bbox
    }
}

pub fn render_table(
    img: &mut GrayImage,
    origin: (u32, u32),
    rows: u32,
    cols: u32,
    width: u32,
    style: &GreekedTextStyle,
    lexicon: &[&str],
    rng: &mut Rng,
) -> (BBox, Vec<String>) {
    let plan = TablePlan::new(style, rows, cols, width, lexicon, rng);
    (plan.draw(img, origin), plan.words())
}

/// Bulleted items: a square bullet followed by indented greeked lines.
#[derive(Clone, Debug, PartialEq)]
pub struct ListPlan {
    pub style: GreekedTextStyle,
    pub items: Vec<TextPlan>,
}

impl ListPlan {
    pub fn bullet_size(style: &GreekedTextStyle) -> u32 {
        (style.char_h / 2).max(2)
    }

    pub fn indent(style: &GreekedTextStyle) -> u32 {
        Self::bullet_size(style) + style.word_gap
    }

    pub fn new(style: &GreekedTextStyle, n_items: u32, max_width: u32, lexicon: &[&str], rng: &mut Rng) -> Result<Self> {
        let item_style = style.with_lines(1, 2);
        let room = max_width.saturating_sub(Self::indent(style));
        let items = (0..n_items)
            .map(|_| plan_text(&item_style, lexicon, room, false, rng))
            .collect::<Result<_>>()?;
        Ok(ListPlan { style: *style, items })
    }

    pub fn width(&self) -> u32 {
        Self::indent(&self.style) + self.items.iter().map(TextPlan::width).max().unwrap_or(0)
    }

    pub fn height(&self) -> u32 {
        let body: u32 = self.items.iter().map(TextPlan::height).sum();
        body + self.items.len().saturating_sub(1) as u32 * self.style.line_gap
    }

    pub fn words(&self) -> Vec<String> {
        self.items.iter().flat_map(TextPlan::words).collect()
    }

    pub fn draw(&self, img: &mut GrayImage, origin: (u32, u32)) -> BBox {
        let s = Self::bullet_size(&self.style);
        let (x0, mut y) = origin;
        for item in &self.items {
            img.fill_rect(BBox::new(x0, y + (self.style.char_h - s) / 2, s, s), INK);
            item.draw(img, (x0 + Self::indent(&self.style), y));
            y += item.height() + self.style.line_gap;
        }
        BBox::new(x0, origin.1, self.width(), self.height())
    }
}

pub fn render_list(
    img: &mut GrayImage,
    origin: (u32, u32),
    n_items: u32,
    max_width: u32,
    style: &GreekedTextStyle,
    lexicon: &[&str],
    rng: &mut Rng,
) -> Result<(BBox, Vec<String>)> {
    let plan = ListPlan::new(style, n_items, max_width, lexicon, rng)?;
    Ok((plan.draw(img, origin), plan.words()))
}

pub const HATCH_SPACING: u32 = 6;

/// Border rectangle filled with a 45-degree hatch; inks nothing outside
/// `(origin, w, h)`.
pub fn render_image_block(img: &mut GrayImage, origin: (u32, u32), w: u32, h: u32) -> BBox {
    let bbox = BBox::new(origin.0, origin.1, w, h);
    img.stroke_rect(bbox, INK);
    for dy in 1..h.saturating_sub(1) {
        for dx in 1..w.saturating_sub(1) {
            if (dx + dy) % HATCH_SPACING == 0 {
                img.set(origin.0 + dx, origin.1 + dy, INK);
            }
        }
    }
    bbox
}

/// One short line centred horizontally under `anchor`, `gap` pixels below it.
pub fn plan_caption(style: &GreekedTextStyle, anchor: BBox, lexicon: &[&str], rng: &mut Rng) -> Result<TextPlan> {
    plan_text(&style.with_lines(1, 1).with_words(1, 4), lexicon, anchor.w, false, rng)
}

pub fn render_caption(
    img: &mut GrayImage,
    anchor: BBox,
    gap: u32,
    style: &GreekedTextStyle,
    lexicon: &[&str],
    rng: &mut Rng,
) -> Result<(BBox, Vec<String>)> {
    let plan = plan_caption(style, anchor, lexicon, rng)?;
    let x = anchor.x + (anchor.w - plan.width()) / 2;
    let bbox = plan.draw(img, (x, anchor.bottom() + gap));
    Ok((bbox, plan.words()))
}

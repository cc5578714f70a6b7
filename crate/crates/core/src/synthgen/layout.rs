//! Page layout samplers for each preset. Elements are placed in flow order,
//! top to bottom within a column, so regions in one column never overlap.

use super::lexicon::class_lexicon;
use super::render::{
    plan_caption, plan_text, render_image_block, GreekedTextStyle, ListPlan, TablePlan, TextPlan,
};
use super::GenConfig;
use crate::error::Result;
use crate::geom::BBox;
use crate::manifest::LabeledRegion;
use crate::raster::GrayImage;
use crate::rng::Rng;
use crate::taxonomy::{INVOICE5, RESUME6, SOURCE8};

enum Plan {
    Text(TextPlan),
    List(ListPlan),
    Table(TablePlan),
    Image { w: u32, h: u32 },
}

impl Plan {
    fn size(&self) -> (u32, u32) {
        match self {
            Plan::Text(p) => (p.width(), p.height()),
            Plan::List(p) => (p.width(), p.height()),
            Plan::Table(p) => (p.width(), p.height()),
            Plan::Image { w, h } => (*w, *h),
        }
    }

    fn words(&self) -> Vec<String> {
        match self {
            Plan::Text(p) => p.words(),
            Plan::List(p) => p.words(),
            Plan::Table(p) => p.words(),
            Plan::Image { .. } => Vec::new(),
        }
    }

    fn draw(&self, img: &mut GrayImage, origin: (u32, u32)) -> BBox {
        match self {
            Plan::Text(p) => p.draw(img, origin),
            Plan::List(p) => p.draw(img, origin),
            Plan::Table(p) => p.draw(img, origin),
            Plan::Image { w, h } => render_image_block(img, origin, *w, *h),
        }
    }
}

fn region(bbox: BBox, label: &str, words: Vec<String>) -> LabeledRegion {
    let text = (!words.is_empty()).then(|| words.join(" "));
    LabeledRegion::ground_truth(bbox, label, text)
}

pub(super) struct Page {
    pub image: GrayImage,
    pub regions: Vec<LabeledRegion>,
}

struct Columns {
    count: u32,
    width: u32,
}

impl Columns {
    fn sample(cfg: &GenConfig, page_w: u32, rng: &mut Rng) -> Self {
        let inner = page_w - 2 * cfg.margin;
        let two = rng.chance(cfg.two_column_prob) && inner > cfg.gutter + 2 * 120;
        if two {
            Columns {
                count: 2,
                width: (inner - cfg.gutter) / 2,
            }
        } else {
            Columns { count: 1, width: inner }
        }
    }

    fn left(&self, cfg: &GenConfig, col: u32) -> u32 {
        cfg.margin + col * (self.width + cfg.gutter)
    }
}

fn source8_plan(label: &str, style: &GreekedTextStyle, max_w: u32, rng: &mut Rng) -> Result<Plan> {
    let lex = class_lexicon(&format!("source8:{label}"))?;
    Ok(match label {
        "Title" => Plan::Text(plan_text(&style.scaled(2, 1).with_lines(1, 1).with_words(2, 5), lex, max_w, false, rng)?),
        "Heading" => Plan::Text(plan_text(&style.scaled(3, 2).with_lines(1, 1).with_words(1, 4), lex, max_w, false, rng)?),
        "Sub-Heading" => {
            Plan::Text(plan_text(&style.scaled(5, 4).with_lines(1, 1).with_words(1, 4), lex, max_w, false, rng)?)
        }
        "Text Block" => Plan::Text(plan_text(&style.with_lines(2, 8).with_words(1, 6), lex, max_w, true, rng)?),
        "List" => {
            let n = rng.range_u32(2, 5);
            Plan::List(ListPlan::new(&style.with_words(2, 6), n, max_w, lex, rng)?)
        }
        "Table" => {
            let rows = rng.range_u32(2, 6);
            let cols = rng.range_u32(2, 4);
            let width = rng.range_u32(max_w / 2, max_w);
            Plan::Table(TablePlan::new(style, rows, cols, width, lex, rng))
        }
        "Image Content" => {
            let w = rng.range_u32((max_w / 3).max(16), max_w);
            let h = rng.range_u32(40, 200);
            Plan::Image { w, h }
        }
        other => unreachable!("{other} is not a standalone source8 element"),
    })
}

const CAPTION: &str = SOURCE8[7];

pub(super) fn source8_page(cfg: &GenConfig, page: (u32, u32), rng: &mut Rng) -> Result<Page> {
    let (page_w, page_h) = page;
    let mut image = GrayImage::blank(page_w, page_h);
    let mut regions = Vec::new();
    let style = cfg.sample_style(rng);
    let columns = Columns::sample(cfg, page_w, rng);

    let standalone: Vec<(&str, f64)> = SOURCE8
        .iter()
        .filter(|&&l| l != CAPTION)
        .map(|&l| (l, cfg.mix(l)))
        .filter(|&(_, p)| p > 0.0)
        .collect();
    let total: f64 = standalone.iter().map(|(_, p)| p).sum();
    let caption_prob = cfg.mix(CAPTION);

    let target = rng.range_u32(cfg.elements_per_page.0, cfg.elements_per_page.1);
    let bottom = page_h - cfg.margin;
    let (mut col, mut y, mut placed, mut too_tall) = (0u32, cfg.margin, 0u32, 0u32);
    while placed < target && col < columns.count {
        let mut u = rng.unit_f64() * total;
        let mut label = standalone[standalone.len() - 1].0;
        for &(l, p) in &standalone {
            if u < p {
                label = l;
                break;
            }
            u -= p;
        }
        let jx = rng.range_u32(0, cfg.jitter.min(columns.width / 8));
        let max_w = columns.width - jx;
        let plan = source8_plan(label, &style, max_w, rng)?;
        let (_, h) = plan.size();
        let caption = if matches!(label, "Table" | "Image Content") && rng.chance(caption_prob) {
            let anchor = BBox::new(0, 0, plan.size().0, h);
            Some(plan_caption(&style, anchor, class_lexicon("source8:caption")?, rng)?)
        } else {
            None
        };
        let full_h = h + caption.as_ref().map_or(0, |c| style.line_gap + c.height());

        if y + full_h > bottom {
            if y == cfg.margin {
                // does not fit even in an empty column
                too_tall += 1;
                if too_tall > 8 {
                    break;
                }
                continue;
            }
            col += 1;
            y = cfg.margin;
            if col >= columns.count || cfg.margin + full_h > bottom {
                break;
            }
        }
        let x = columns.left(cfg, col) + jx;
        let bbox = plan.draw(&mut image, (x, y));
        regions.push(region(bbox, label, plan.words()));
        if let Some(cap) = caption {
            let cx = bbox.x + (bbox.w - cap.width()) / 2;
            let cb = cap.draw(&mut image, (cx, bbox.bottom() + style.line_gap));
            regions.push(region(cb, CAPTION, cap.words()));
        }
        y += full_h + cfg.block_gap;
        placed += 1;
    }
    Ok(Page { image, regions })
}

pub(super) fn invoice_page(cfg: &GenConfig, page: (u32, u32), rng: &mut Rng) -> Result<Page> {
    let (page_w, page_h) = page;
    let mut image = GrayImage::blank(page_w, page_h);
    let mut regions = Vec::new();
    let style = cfg.sample_style(rng);
    let lex = |k: &str| class_lexicon(&format!("invoice5:{k}"));
    let inner = page_w - 2 * cfg.margin;
    let half = inner / 2 - cfg.gutter / 2;
    let jitter = |rng: &mut Rng| rng.range_u32(0, cfg.jitter);

    // header row: logo on one side, sender address on the other
    let logo_left = rng.chance(0.8);
    let logo_w = rng.range_u32(80, 140);
    let logo_h = rng.range_u32(40, 70);
    let name = plan_text(&style.with_lines(1, 1).with_words(1, 2), lex("logo")?, logo_w, false, rng)?;
    let address = plan_text(&style.with_lines(3, 4).with_words(2, 3), lex("address")?, half, false, rng)?;
    let top = cfg.margin + jitter(rng);

    let logo_x = if logo_left { cfg.margin + jitter(rng) } else { page_w - cfg.margin - logo_w - jitter(rng) };
    let mut logo_box = render_image_block(&mut image, (logo_x, top), logo_w, logo_h);
    logo_box = logo_box.union(&name.draw(&mut image, (logo_x, logo_box.bottom() + style.line_gap)));
    regions.push(region(logo_box, INVOICE5[0], name.words()));

    let addr_x = if logo_left {
        page_w - cfg.margin - address.width() - jitter(rng)
    } else {
        cfg.margin + jitter(rng)
    };
    let addr_box = address.draw(&mut image, (addr_x, top));
    regions.push(region(addr_box, INVOICE5[1], address.words()));
    let mut y = logo_box.bottom().max(addr_box.bottom()) + cfg.block_gap;

    // invoice details, optionally beside a billing address
    let info = plan_text(&style.with_lines(2, 4).with_words(2, 4), lex("info")?, half, false, rng)?;
    let info_box = info.draw(&mut image, (cfg.margin + jitter(rng), y));
    regions.push(region(info_box, INVOICE5[2], info.words()));
    let mut row_bottom = info_box.bottom();
    if rng.chance(0.5) {
        let bill_to = plan_text(&style.with_lines(2, 4).with_words(2, 3), lex("address")?, half, false, rng)?;
        let x = page_w - cfg.margin - bill_to.width() - jitter(rng);
        let b = bill_to.draw(&mut image, (x, y));
        regions.push(region(b, INVOICE5[1], bill_to.words()));
        row_bottom = row_bottom.max(b.bottom());
    }
    y = row_bottom + cfg.block_gap + jitter(rng);

    let amount = plan_text(&style.with_lines(1, 3).with_words(2, 3), lex("amount")?, half, false, rng)?;
    let rows_max = 8;
    let mut table = TablePlan::new(&style, rng.range_u32(3, rows_max), rng.range_u32(3, 5), inner - cfg.jitter, lex("tables")?, rng);
    while table.rows > 1 && y + table.height() + cfg.block_gap + amount.height() + cfg.margin > page_h {
        table.rows -= 1;
        table.cells.truncate((table.rows * table.cols) as usize);
    }
    let table_box = table.draw(&mut image, (cfg.margin + jitter(rng), y));
    regions.push(region(table_box, INVOICE5[3], table.words()));
    y = table_box.bottom() + cfg.block_gap;

    if y + amount.height() + cfg.margin <= page_h {
        let x = page_w - cfg.margin - amount.width() - jitter(rng);
        let b = amount.draw(&mut image, (x, y));
        regions.push(region(b, INVOICE5[4], amount.words()));
    }
    Ok(Page { image, regions })
}

pub(super) fn resume_page(cfg: &GenConfig, page: (u32, u32), rng: &mut Rng) -> Result<Page> {
    let (page_w, page_h) = page;
    let mut image = GrayImage::blank(page_w, page_h);
    let mut regions = Vec::new();
    let style = cfg.sample_style(rng);
    let columns = Columns::sample(cfg, page_w, rng);

    let mut sections: Vec<&str> = vec![RESUME6[4], RESUME6[1], RESUME6[0], RESUME6[3], RESUME6[5]];
    rng.shuffle(&mut sections);
    sections.retain(|_| rng.chance(0.9));
    sections.insert(0, RESUME6[2]);

    let heading_style = style.scaled(3, 2).with_lines(1, 1).with_words(1, 2);
    let bottom = page_h - cfg.margin;
    let (mut col, mut y) = (0u32, cfg.margin);
    for label in sections {
        let lex = class_lexicon(&format!("resume6:{label}"))?;
        let jx = rng.range_u32(0, cfg.jitter.min(columns.width / 8));
        let max_w = columns.width - jx;
        let heading = plan_text(&heading_style, lex, max_w, false, rng)?;
        let body = plan_text(&style.with_lines(2, 6).with_words(1, 6), lex, max_w, true, rng)?;
        let h = heading.height() + style.line_gap + body.height();
        if y + h > bottom {
            col += 1;
            y = cfg.margin;
            if col >= columns.count || y + h > bottom {
                break;
            }
        }
        let x = columns.left(cfg, col) + jx;
        let hb = heading.draw(&mut image, (x, y));
        let bb = body.draw(&mut image, (x, hb.bottom() + style.line_gap));
        let mut words = heading.words();
        words.extend(body.words());
        regions.push(region(hb.union(&bb), label, words));
        y += h + cfg.block_gap;
    }
    Ok(Page { image, regions })
}

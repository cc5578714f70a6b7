//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the summary prints in
//! order; exits non-zero when any criterion fails.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use laylens::docstrum::{segment_image, DocstrumParams};
use laylens::eval::matching::match_regions;
use laylens::eval::report::check_f1_consistency;
use laylens::fewshot::protocol::{resolve_detections, DetectionSource};
use laylens::fewshot::{loss_and_gradient, run_protocol, FeatureVector, LinearModel, ProtocolConfig};
use laylens::raster::components::label_pixels;
use laylens::raster::{connected_components, otsu_threshold, Connectivity};
use laylens::synthgen::{generate_corpus, generate_page, page_style, GenConfig, Preset};
use laylens::{iou, BBox, BinaryImage, GrayImage, LabeledRegion, Rng};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

// ---------------------------------------------------------------- 1

/// Published learning-curve rows: (table, k or dataset, P, R, F1).
const PUBLISHED: &[(&str, &str, f64, f64, f64)] = &[
    ("invoice end-to-end", "10", 0.4721, 0.5188, 0.4943),
    ("invoice end-to-end", "20", 0.4962, 0.5444, 0.5192),
    ("invoice end-to-end", "30", 0.5012, 0.5791, 0.5373),
    ("invoice end-to-end", "40", 0.5244, 0.601, 0.5601),
    ("invoice end-to-end", "50", 0.5316, 0.6101, 0.5682),
    ("invoice end-to-end", "60", 0.5599, 0.6214, 0.589),
    ("invoice end-to-end", "70", 0.56, 0.6354, 0.5953),
    ("invoice foreground", "0", 0.144, 0.4214, 0.2147),
    ("invoice foreground", "10", 0.5992, 0.6212, 0.61),
    ("invoice foreground", "20", 0.611, 0.7062, 0.655),
    ("invoice foreground", "30", 0.6203, 0.7755, 0.6893),
    ("invoice foreground", "40", 0.6767, 0.7901, 0.729),
    ("invoice foreground", "50", 0.6742, 0.7992, 0.7314),
    ("invoice foreground", "60", 0.7017, 0.8001, 0.7484),
    ("invoice foreground", "70", 0.7292, 0.8132, 0.7689),
    ("invoice scratch", "10", 0.1078, 0.1991, 0.1399),
    ("invoice scratch", "20", 0.1377, 0.235, 0.1736),
    ("invoice scratch", "30", 0.1744, 0.2768, 0.214),
    ("invoice scratch", "40", 0.1957, 0.2998, 0.2368),
    ("invoice scratch", "50", 0.3018, 0.3036, 0.3027),
    ("invoice scratch", "60", 0.3738, 0.315, 0.3419),
    ("invoice scratch", "70", 0.3888, 0.3445, 0.3653),
    ("invoice classifier", "70", 0.7718, 0.8135, 0.7921),
    ("resume end-to-end", "10", 0.6144, 0.5888, 0.6013),
    ("resume end-to-end", "20", 0.6398, 0.6011, 0.6198),
    ("resume end-to-end", "30", 0.6587, 0.6218, 0.6397),
    ("resume end-to-end", "40", 0.6712, 0.6325, 0.6513),
    ("resume end-to-end", "50", 0.6946, 0.634, 0.6629),
    ("resume foreground", "0", 0.035, 0.4311, 0.06),
    ("resume foreground", "10", 0.8228, 0.821, 0.8219),
    ("resume foreground", "20", 0.8542, 0.8224, 0.838),
    ("resume foreground", "30", 0.8655, 0.8291, 0.8469),
    ("resume foreground", "40", 0.9123, 0.8363, 0.8726),
    ("resume foreground", "50", 0.8977, 0.8343, 0.8659),
    ("resume scratch", "10", 0.3797, 0.3571, 0.368),
    ("resume scratch", "20", 0.3859, 0.3928, 0.3893),
    ("resume scratch", "30", 0.5238, 0.5238, 0.5238),
    ("resume scratch", "40", 0.5178, 0.7532, 0.6137),
    ("resume scratch", "50", 0.60946, 0.61309, 0.61037),
    ("resume classifier", "50", 0.804, 0.8946, 0.8469),
    ("baseline", "invoice", 0.0547, 0.1935, 0.0853),
    ("baseline", "resume", 0.2415, 0.2559, 0.2485),
];

fn criterion_metric_arithmetic() -> Outcome {
    let rows: Vec<(String, f64, f64, f64)> = PUBLISHED
        .iter()
        .map(|&(t, k, p, r, f)| (format!("{t} {k}"), p, r, f))
        .collect();
    let flagged = check_f1_consistency(&rows, 0.001);
    let outside: Vec<&str> = flagged
        .iter()
        .map(|m| m.row.as_str())
        .filter(|r| !r.starts_with("resume foreground"))
        .collect();
    let k50 = flagged.iter().find(|m| m.row == "resume foreground 50");
    let listing: Vec<String> = flagged
        .iter()
        .map(|m| format!("{}: printed {} computed {:.4}", m.row, m.printed, m.computed))
        .collect();
    let pass = outside.is_empty() && k50.is_some();
    outcome(
        pass,
        format!(
            "{} rows, {} within 0.001; flagged [{}]",
            rows.len(),
            rows.len() - flagged.len(),
            listing.join("; ")
        ),
    )
}

// ---------------------------------------------------------------- 2

fn random_box(rng: &mut Rng) -> BBox {
    let w = rng.range_u32(5, 40);
    let h = rng.range_u32(5, 40);
    BBox::new(rng.range_u32(0, 100 - w), rng.range_u32(0, 100 - h), w, h)
}

fn jitter_box(rng: &mut Rng, b: BBox) -> BBox {
    let dx = rng.range_u32(0, 6);
    let dy = rng.range_u32(0, 6);
    let x = (b.x + dx).saturating_sub(3).min(99);
    let y = (b.y + dy).saturating_sub(3).min(99);
    let w = (b.w + rng.range_u32(0, 6)).saturating_sub(3).clamp(1, 100 - x);
    let h = (b.h + rng.range_u32(0, 6)).saturating_sub(3).clamp(1, 100 - y);
    BBox::new(x, y, w, h)
}

/// Largest number of disjoint (pred, gt) pairs with IoU >= thresh, by
/// enumerating every assignment.
fn optimal_tp(preds: &[BBox], gts: &[BBox], thresh: f64) -> usize {
    fn go(i: usize, preds: &[BBox], gts: &[BBox], used: &mut Vec<bool>, thresh: f64) -> usize {
        if i == preds.len() {
            return 0;
        }
        let mut best = go(i + 1, preds, gts, used, thresh);
        for g in 0..gts.len() {
            if !used[g] && iou(&preds[i], &gts[g]) >= thresh {
                used[g] = true;
                best = best.max(1 + go(i + 1, preds, gts, used, thresh));
                used[g] = false;
            }
        }
        best
    }
    go(0, preds, gts, &mut vec![false; gts.len()], thresh)
}

/// True when every prediction has a unique best candidate (no IoU tie) and
/// no two predictions share the same best ground truth.
fn best_choices_unique(preds: &[BBox], gts: &[BBox], thresh: f64) -> bool {
    let mut taken = BTreeSet::new();
    for p in preds {
        let cands: Vec<(usize, f64)> = gts
            .iter()
            .enumerate()
            .map(|(g, b)| (g, iou(p, b)))
            .filter(|&(_, v)| v >= thresh)
            .collect();
        let Some(&(g, v)) = cands.iter().max_by(|a, b| a.1.total_cmp(&b.1)) else {
            continue;
        };
        if cands.iter().filter(|c| c.1 == v).count() > 1 || !taken.insert(g) {
            return false;
        }
    }
    true
}

fn criterion_matching_oracle() -> Outcome {
    let mut rng = Rng::new(2024);
    let (mut unique_cases, mut violations) = (0, Vec::new());
    for case in 0..1000 {
        let gts: Vec<BBox> = (0..rng.range_u32(0, 6)).map(|_| random_box(&mut rng)).collect();
        let mut preds: Vec<BBox> = Vec::new();
        for _ in 0..rng.range_u32(0, 6) {
            let b = if !gts.is_empty() && rng.chance(0.7) {
                let g = *rng.choose(&gts);
                jitter_box(&mut rng, g)
            } else {
                random_box(&mut rng)
            };
            preds.push(b);
        }
        let pred_regions: Vec<LabeledRegion> = preds
            .iter()
            .map(|&b| LabeledRegion::detection(b, "foreground", rng.range_u32(0, 4) as f64 / 4.0))
            .collect();
        let gt_regions: Vec<LabeledRegion> = gts.iter().map(|&b| LabeledRegion::ground_truth(b, "x", None)).collect();
        let greedy = match_regions(&pred_regions, &gt_regions, 0.5, false).tp();
        let optimal = optimal_tp(&preds, &gts, 0.5);
        let unique = best_choices_unique(&preds, &gts, 0.5);
        unique_cases += unique as usize;
        if greedy > optimal || (unique && greedy != optimal) {
            violations.push(format!("case {case}: greedy {greedy} optimal {optimal}"));
        }
    }
    outcome(
        violations.is_empty(),
        format!(
            "1000 instances, {unique_cases} with unique best choices, {} violations {}",
            violations.len(),
            violations.first().cloned().unwrap_or_default()
        ),
    )
}

// ---------------------------------------------------------------- 3

/// Flood-fill partition of the ink pixels into sets of pixel indices.
fn bfs_partition(mask: &BinaryImage, eight: bool) -> BTreeSet<Vec<usize>> {
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let bits = mask.bits();
    let mut seen = vec![false; bits.len()];
    let mut parts = BTreeSet::new();
    for start in 0..bits.len() {
        if !bits[start] || seen[start] {
            continue;
        }
        let mut part = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(i) = queue.pop_front() {
            part.push(i);
            let (x, y) = (i as i64 % w, i as i64 / w);
            for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    if (dx == 0 && dy == 0) || (!eight && dx != 0 && dy != 0) {
                        continue;
                    }
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w || ny >= h {
                        continue;
                    }
                    let j = (ny * w + nx) as usize;
                    if bits[j] && !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        part.sort_unstable();
        parts.insert(part);
    }
    parts
}

fn criterion_components_oracle() -> Outcome {
    let mut rng = Rng::new(77);
    let mut mismatches = Vec::new();
    for case in 0..1000 {
        let density = 0.2 + 0.5 * rng.unit_f64();
        let bits: Vec<bool> = (0..32 * 32).map(|_| rng.chance(density)).collect();
        let mask = BinaryImage::from_bits(32, 32, bits).unwrap();
        for (conn, eight) in [(Connectivity::Four, false), (Connectivity::Eight, true)] {
            let labels = label_pixels(&mask, conn);
            let mut by_label: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
            for (i, &l) in labels.iter().enumerate() {
                if l != 0 {
                    by_label.entry(l).or_default().push(i);
                }
            }
            let ours: BTreeSet<Vec<usize>> = by_label.into_values().collect();
            let oracle = bfs_partition(&mask, eight);
            let comps = connected_components(&mask, conn, 1);
            let sizes: Vec<usize> = {
                let mut s: Vec<usize> = comps.iter().map(|c| c.pixel_count).collect();
                s.sort_unstable();
                s
            };
            let oracle_sizes: Vec<usize> = {
                let mut s: Vec<usize> = oracle.iter().map(|p| p.len()).collect();
                s.sort_unstable();
                s
            };
            if ours != oracle || sizes != oracle_sizes {
                mismatches.push(format!("mask {case} {conn:?}"));
            }
        }
    }
    outcome(
        mismatches.is_empty(),
        format!("1000 masks x 2 connectivities, {} mismatches", mismatches.len()),
    )
}

// ---------------------------------------------------------------- 4

/// Textbook scan: maximize w0*w1*(mu0 - mu1)^2 over t, class 0 = values <= t.
fn exhaustive_otsu(pixels: &[u8]) -> u8 {
    let n = pixels.len() as f64;
    let mut best = (0u8, -1.0f64);
    for t in 0..=255u8 {
        let (mut c0, mut s0, mut c1, mut s1) = (0.0, 0.0, 0.0, 0.0);
        for &p in pixels {
            if p <= t {
                c0 += 1.0;
                s0 += p as f64;
            } else {
                c1 += 1.0;
                s1 += p as f64;
            }
        }
        let score = if c0 == 0.0 || c1 == 0.0 {
            0.0
        } else {
            let (w0, w1) = (c0 / n, c1 / n);
            let d = s0 / c0 - s1 / c1;
            w0 * w1 * d * d
        };
        if score > best.1 {
            best = (t, score);
        }
    }
    best.0
}

fn criterion_otsu_oracle() -> Outcome {
    let mut rng = Rng::new(4242);
    let mut mismatches = 0;
    for _ in 0..200 {
        let (w, h) = (rng.range_u32(8, 64), rng.range_u32(8, 64));
        let (m0, m1) = (rng.range_u32(0, 160) as i64, rng.range_u32(90, 255) as i64);
        let spread = rng.range_u32(1, 60) as i64;
        let p_ink = rng.unit_f64();
        let pixels: Vec<u8> = (0..w * h)
            .map(|_| {
                let m = if rng.chance(p_ink) { m0 } else { m1 };
                (m + rng.uniform(-spread, spread).unwrap()).clamp(0, 255) as u8
            })
            .collect();
        let img = GrayImage::from_raw(w, h, pixels).unwrap();
        if otsu_threshold(&img) != exhaustive_otsu(img.pixels()) {
            mismatches += 1;
        }
    }
    outcome(mismatches == 0, format!("200 images, {mismatches} mismatches"))
}

// ---------------------------------------------------------------- 5

fn criterion_docstrum_round_trip() -> Outcome {
    let cfg = GenConfig {
        seed: 505,
        n_docs: 50,
        page_sizes: vec![(620, 877)],
        two_column_prob: 0.0,
        element_mix: BTreeMap::from([("Text Block".to_string(), 1.0)]),
        elements_per_page: (3, 3),
        ..GenConfig::default()
    };
    let params = DocstrumParams::default();
    let (mut spacing_ok, mut tp, mut n_gt, mut n_pred) = (0, 0, 0, 0);
    for i in 0..cfg.n_docs {
        let (img, doc) = generate_page(&cfg, i).unwrap();
        let seg = segment_image(&img, &params);
        let style = page_style(&cfg, i);
        let char_pitch = (style.char_w + style.char_gap) as f64;
        let line_pitch = (style.char_h + style.line_gap) as f64;
        if let Ok(s) = seg.spacings {
            if (s.char_spacing - char_pitch).abs() <= params.hist_bin_px
                && (s.line_spacing - line_pitch).abs() <= params.hist_bin_px
            {
                spacing_ok += 1;
            }
        }
        let gts: Vec<LabeledRegion> = doc.regions.into_iter().filter(|r| r.label == "Text Block").collect();
        let preds: Vec<LabeledRegion> = seg
            .blocks
            .iter()
            .map(|&b| LabeledRegion::detection(b, "foreground", 1.0))
            .collect();
        tp += match_regions(&preds, &gts, 0.5, false).tp();
        n_gt += gts.len();
        n_pred += preds.len();
    }
    let frac = spacing_ok as f64 / cfg.n_docs as f64;
    let recall = tp as f64 / n_gt as f64;
    outcome(
        frac >= 0.9 && recall >= 0.8,
        format!(
            "spacings recovered on {spacing_ok}/50 pages ({frac:.2}); block recall {recall:.4} ({tp}/{n_gt}, {n_pred} blocks)"
        ),
    )
}

// ---------------------------------------------------------------- 6

fn criterion_gradient_check() -> Outcome {
    let mut rng = Rng::new(66);
    let (classes, dim, batch, eps) = (5, 50, 16, 1e-5);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let mut model = LinearModel::zeros(classes, dim);
        for v in model.w.iter_mut().chain(model.b.iter_mut()) {
            *v = rng.unit_f64() - 0.5;
        }
        let xs: Vec<FeatureVector> = (0..batch)
            .map(|_| FeatureVector::from_dense(&(0..dim).map(|_| rng.unit_f64() * 2.0 - 1.0).collect::<Vec<_>>()))
            .collect();
        let ys: Vec<usize> = (0..batch).map(|_| rng.index(classes)).collect();
        let l2 = 1e-2 * rng.unit_f64();
        let (_, grad) = loss_and_gradient(&model, &xs, &ys, l2);
        let mut check = |analytic: f64, plus: LinearModel, minus: LinearModel| {
            let fd = (loss_and_gradient(&plus, &xs, &ys, l2).0 - loss_and_gradient(&minus, &xs, &ys, l2).0) / (2.0 * eps);
            let rel = (analytic - fd).abs() / (analytic.abs() + fd.abs()).max(1e-8);
            worst = worst.max(rel);
        };
        for i in 0..model.w.len() {
            let (mut p, mut m) = (model.clone(), model.clone());
            p.w[i] += eps;
            m.w[i] -= eps;
            check(grad.w[i], p, m);
        }
        for i in 0..model.b.len() {
            let (mut p, mut m) = (model.clone(), model.clone());
            p.b[i] += eps;
            m.b[i] -= eps;
            check(grad.b[i], p, m);
        }
    }
    outcome(worst < 1e-4, format!("20 batches of 5 classes x 50 features, max relative error {worst:.2e}"))
}

// ---------------------------------------------------------------- 7

fn criterion_invoice_protocol() -> Outcome {
    let cfg = GenConfig {
        seed: 7,
        ..GenConfig::preset(Preset::SyntheticInvoice)
    };
    let manifest = laylens::synthgen::generate_manifest(&cfg, |_, _| Ok(())).unwrap();
    let dets = resolve_detections(&manifest, Path::new("."), &DetectionSource::GroundTruth).unwrap();
    let pcfg = ProtocolConfig {
        k_values: vec![10, 20, 30, 40, 50, 60, 70],
        seed: 1,
        ..ProtocolConfig::default()
    };
    let out = match run_protocol(&manifest, &dets, "gt", None, None, &pcfg) {
        Ok(o) => o,
        Err(e) => return outcome(false, format!("protocol failed: {e}")),
    };
    let rows = &out.report.rows;
    let first = &rows[0];
    let last = rows.last().unwrap();
    let f1 = |r: &laylens::fewshot::ProtocolRow| r.end2end.headline_f1();
    let pass = first.k == 10 && first.classifier_accuracy >= 0.95 && f1(last) >= f1(first);
    outcome(
        pass,
        format!(
            "classifier-only accuracy at k=10 {:.4}; mean F1 k=10 {:.4}, k={} {:.4}",
            first.classifier_accuracy,
            f1(first),
            last.k,
            f1(last)
        ),
    )
}

// ---------------------------------------------------------------- 8

fn files_under(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn criterion_determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let mut runs = Vec::new();
    for (name, jobs) in [("a", "1"), ("b", "1"), ("c", "8")] {
        let out = tmp.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_laylens"))
            .args([
                "protocol",
                "--preset",
                "synthetic-invoice",
                "--detections",
                "docstrum",
                "--k-list",
                "10,30",
                "--seed",
                "3",
                "--jobs",
                jobs,
                "--out",
            ])
            .arg(&out)
            .stdout(std::process::Stdio::null())
            .status()
            .unwrap();
        if !status.success() {
            return outcome(false, format!("protocol run {name} exited with {status}"));
        }
        runs.push(files_under(&out));
    }
    let same_repeat = runs[0] == runs[1];
    let same_jobs = runs[0] == runs[2];
    let reports = runs[0].keys().filter(|p| !p.starts_with("corpus")).count();
    outcome(
        same_repeat && same_jobs,
        format!(
            "{} files ({} reports/models/config); repeat identical: {same_repeat}; jobs 1 vs 8 identical: {same_jobs}",
            runs[0].len(),
            reports
        ),
    )
}

// ---------------------------------------------------------------- 9

fn criterion_throughput() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = GenConfig {
        seed: 9,
        n_docs: 200,
        page_sizes: vec![(620, 877)],
        ..GenConfig::default()
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let start = Instant::now();
    let result = pool.install(|| generate_corpus(&cfg, tmp.path()));
    let secs = start.elapsed().as_secs_f64();
    if let Err(e) = result {
        return outcome(false, format!("generation failed: {e}"));
    }
    let written = files_under(tmp.path());
    let pages = written.keys().filter(|p| p.extension().is_some_and(|e| e == "pgm")).count();
    let bytes: usize = written.values().map(Vec::len).sum();
    if pages != cfg.n_docs {
        return outcome(false, format!("expected {} page images, found {pages}", cfg.n_docs));
    }
    let rate = cfg.n_docs as f64 / secs;
    outcome(
        rate >= 20.0,
        format!(
            "{pages} pages ({:.1} MB) written in {secs:.2}s on one thread: {rate:.1} pages/s",
            bytes as f64 / 1e6
        ),
    )
}

fn main() {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check, Option<Duration>); 9] = [
        ("metric arithmetic", criterion_metric_arithmetic, Some(Duration::from_secs(1))),
        ("matching oracle", criterion_matching_oracle, Some(Duration::from_secs(10))),
        ("connected components oracle", criterion_components_oracle, Some(Duration::from_secs(10))),
        ("otsu oracle", criterion_otsu_oracle, Some(Duration::from_secs(5))),
        ("docstrum round trip", criterion_docstrum_round_trip, Some(Duration::from_secs(60))),
        ("gradient check", criterion_gradient_check, Some(Duration::from_secs(5))),
        ("few-shot invoice protocol", criterion_invoice_protocol, Some(Duration::from_secs(120))),
        ("determinism", criterion_determinism, None),
        ("generation throughput", criterion_throughput, None),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut o = check();
        let took = start.elapsed();
        if let Some(limit) = limit {
            if took > *limit {
                o.pass = false;
                o.detail.push_str(&format!("; exceeded the {}s limit", limit.as_secs()));
            }
        }
        failed += (!o.pass) as usize;
        println!(
            "{} criterion {}: {name}: {} [{:.2}s]",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            took.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

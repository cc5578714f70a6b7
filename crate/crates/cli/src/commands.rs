//! Subcommand implementations.

use std::fmt;
use std::path::{Path, PathBuf};

use laylens::docstrum::{docstrum as segment, DocstrumParams};
use laylens::eval::report::learning_curve_table;
use laylens::eval::{evaluate_corpus, learning_curve_csv, CurveRow, EvalMode};
use laylens::fewshot::protocol::{
    classify_detections, default_k_values, docstrum_detections, resolve_detections, shuffled_pool,
    training_examples, DetectionSource,
};
use laylens::fewshot::{run_protocol, train as train_model, ClassifierModel, ProtocolConfig, TrainParams};
use laylens::manifest::{
    load_detections, load_manifest, manifest_root, save_detections, save_manifest, to_canonical_json, write_text,
    DocDetections,
};
use laylens::raster::{read_pgm, write_pgm};
use laylens::synthgen::{generate_corpus, generate_page, split_for, GenConfig, Preset};
use laylens::{DetectionSet, Error, GrayImage, Manifest, Split, Transcripts};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{echo, from_value, layered, resolve_gen, Flags};
use crate::{ClassifyArgs, DocstrumArgs, EvalArgs, GenArgs, IngestArgs, ProtocolArgs, TrainArgs};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Argument(_) => 1,
            _ => 2,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: 1,
        message: message.into(),
    }
}

fn required(value: &str, flag: &str) -> CliResult<()> {
    if value.is_empty() {
        Err(usage(format!("missing required option --{flag} (flag or config file)")))
    } else {
        Ok(())
    }
}

fn parent_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("config serializes")
}

fn load_json_file(path: &Path) -> CliResult<Value> {
    Ok(crate::config::read_json(path)?)
}

fn check_preset(name: Option<&str>) -> CliResult<()> {
    match name {
        Some(p) if Preset::parse(p).is_none() => Err(usage(format!(
            "--preset must be source8, synthetic-invoice or synthetic-resume, not {p:?}"
        ))),
        _ => Ok(()),
    }
}

pub fn gen(a: GenArgs) -> CliResult {
    check_preset(a.preset.as_deref())?;
    let mut flags = Flags::default();
    flags
        .set("preset", a.preset.as_deref())
        .set("seed", a.seed)
        .set("n_docs", a.n_docs)
        .set("test_size", a.test_size);
    let raw = layered(Value::Object(Default::default()), a.config.as_deref(), flags)?;
    let cfg = resolve_gen(raw)?;
    let manifest = generate_corpus(&cfg, &a.out)?;
    echo(&a.out, &cfg)?;
    println!("generated {} pages into {}", manifest.docs.len(), a.out.display());
    Ok(())
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DocstrumRun {
    pub images: String,
    pub split: Option<String>,
    pub params: DocstrumParams,
}

fn parse_split(s: &str) -> CliResult<Option<Split>> {
    match s {
        "all" => Ok(None),
        "train" => Ok(Some(Split::Train)),
        "test" => Ok(Some(Split::Test)),
        _ => Err(usage(format!("--split must be train, test or all, not {s:?}"))),
    }
}

pub fn docstrum(a: DocstrumArgs) -> CliResult {
    let mut flags = Flags::default();
    flags.set("images", a.images.as_deref()).set("split", a.split.as_deref());
    if let Some(p) = &a.params {
        flags.set("params", Some(load_json_file(p)?));
    }
    let run: DocstrumRun = from_value(
        layered(to_value(&DocstrumRun::default()), a.config.as_deref(), flags)?,
        "docstrum config",
    )?;
    required(&run.images, "images")?;
    run.params.validate()?;
    let images = Path::new(&run.images);
    let set = if images.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(images)
            .map_err(|e| Error::Io {
                path: images.to_path_buf(),
                source: e,
            })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "pgm"))
            .collect();
        files.sort();
        let docs: laylens::Result<Vec<DocDetections>> = files
            .par_iter()
            .map(|p| {
                let img = read_pgm(p)?;
                Ok(DocDetections {
                    doc_id: p.file_stem().unwrap_or_default().to_string_lossy().into_owned(),
                    regions: segment(&img, &run.params),
                })
            })
            .collect();
        DetectionSet { docs: docs? }
    } else {
        let manifest = load_manifest(images)?;
        let split = match &run.split {
            Some(s) => parse_split(s)?,
            None => manifest.split.as_ref().map(|_| Split::Test),
        };
        let docs: Vec<_> = match split {
            Some(s) => manifest.docs_in(s),
            None => manifest.docs.iter().collect(),
        };
        docstrum_detections(&docs, &manifest_root(images), &run.params)?
    };
    save_detections(&set, &a.out)?;
    echo(&parent_dir(&a.out), &run)?;
    println!("{} documents, {} blocks", set.docs.len(), set.region_count());
    Ok(())
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainRun {
    pub manifest: String,
    pub k: Option<usize>,
    pub seed: u64,
    pub train: TrainParams,
}

pub fn train(a: TrainArgs) -> CliResult {
    let mut hp = Flags::default();
    hp.set("lr", a.lr)
        .set("l2", a.l2)
        .set("epochs", a.epochs)
        .set("max_vocab", a.max_vocab)
        .set("min_df", a.min_df)
        .set("counts", a.counts.then_some(true))
        .set("seed", a.seed);
    let mut flags = Flags::default();
    flags.set("manifest", a.manifest.as_deref()).set("k", a.k).set("seed", a.seed);
    flags.nested("train", hp);
    let run: TrainRun = from_value(
        layered(to_value(&TrainRun::default()), a.config.as_deref(), flags)?,
        "train config",
    )?;
    required(&run.manifest, "manifest")?;
    let manifest = load_manifest(&run.manifest)?;
    let pool = shuffled_pool(&manifest, run.seed);
    let k = run.k.unwrap_or(pool.len());
    if k == 0 || k > pool.len() {
        return Err(Error::Protocol(format!("k = {k} must lie in 1..={}", pool.len())).into());
    }
    let model = train_model(&manifest.taxonomy, &training_examples(&pool[..k]), &run.train)?;
    model.save(&a.out)?;
    echo(&parent_dir(&a.out), &run)?;
    println!(
        "trained on {k} documents: {} tokens, train loss {:.6}",
        model.vocab.len(),
        model.train_loss
    );
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyRun {
    pub manifest: String,
    pub model: String,
    pub detections: String,
    pub transcripts: Option<String>,
    pub docstrum: DocstrumParams,
}

impl Default for ClassifyRun {
    fn default() -> Self {
        ClassifyRun {
            manifest: String::new(),
            model: String::new(),
            detections: "gt".into(),
            transcripts: None,
            docstrum: DocstrumParams::default(),
        }
    }
}

fn load_transcripts(path: &Option<String>) -> CliResult<Option<Transcripts>> {
    Ok(match path {
        Some(p) => Some(Transcripts::load(p)?),
        None => None,
    })
}

pub fn classify(a: ClassifyArgs) -> CliResult {
    let mut flags = Flags::default();
    flags
        .set("manifest", a.manifest.as_deref())
        .set("model", a.model.as_deref())
        .set("detections", a.detections.as_deref())
        .set("transcripts", a.transcripts.as_deref());
    if let Some(p) = &a.params {
        flags.set("docstrum", Some(load_json_file(p)?));
    }
    let run: ClassifyRun = from_value(
        layered(to_value(&ClassifyRun::default()), a.config.as_deref(), flags)?,
        "classify config",
    )?;
    required(&run.manifest, "manifest")?;
    required(&run.model, "model")?;
    let manifest = load_manifest(&run.manifest)?;
    let model = ClassifierModel::load(&run.model)?;
    if model.taxonomy != manifest.taxonomy {
        return Err(Error::Config(format!(
            "model taxonomy {:?} does not match manifest taxonomy {:?}",
            model.taxonomy.name, manifest.taxonomy.name
        ))
        .into());
    }
    let source = DetectionSource::parse(&run.detections, run.docstrum.clone())?;
    let dets = resolve_detections(&manifest, &manifest_root(Path::new(&run.manifest)), &source)?;
    let transcripts = load_transcripts(&run.transcripts)?;
    let labelled = classify_detections(&model, &manifest, &dets, transcripts.as_ref())?;
    save_detections(&labelled, &a.out)?;
    echo(&parent_dir(&a.out), &run)?;
    println!("classified {} regions in {} documents", labelled.region_count(), labelled.docs.len());
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalRun {
    pub manifest: String,
    pub detections: String,
    pub mode: EvalMode,
    pub iou: f64,
    pub k: usize,
}

impl Default for EvalRun {
    fn default() -> Self {
        EvalRun {
            manifest: String::new(),
            detections: String::new(),
            mode: EvalMode::End2end,
            iou: laylens::eval::DEFAULT_IOU,
            k: 0,
        }
    }
}

pub fn eval(a: EvalArgs) -> CliResult {
    let mode = match a.mode.as_deref() {
        Some(m) => Some(EvalMode::parse(m).ok_or_else(|| {
            usage(format!("--mode must be foreground, end2end or classifier_only, not {m:?}"))
        })?),
        None => None,
    };
    let mut flags = Flags::default();
    flags
        .set("manifest", a.manifest.as_deref())
        .set("detections", a.detections.as_deref())
        .set("mode", mode)
        .set("iou", a.iou)
        .set("k", a.k);
    let run: EvalRun = from_value(
        layered(to_value(&EvalRun::default()), a.config.as_deref(), flags)?,
        "eval config",
    )?;
    required(&run.manifest, "manifest")?;
    required(&run.detections, "detections")?;
    let manifest = load_manifest(&run.manifest)?;
    let dets = load_detections(&run.detections)?.validate_against(&manifest)?;
    let report = evaluate_corpus(&manifest, &dets, run.mode, run.iou)?;
    let rows = [CurveRow {
        k: run.k,
        mode: run.mode,
        metrics: report.metrics.clone(),
    }];
    let mut table = learning_curve_table(&format!("{} @ IoU {}", run.mode, run.iou), &rows);
    if let Some(acc) = report.accuracy {
        table.push_str(&format!("accuracy {acc:.4}\n"));
    }
    write_text(&a.out.with_extension("txt"), &table)?;
    write_text(&a.out.with_extension("csv"), &learning_curve_csv(&rows))?;
    write_text(&a.out.with_extension("json"), &to_canonical_json(&report))?;
    echo(&parent_dir(&a.out), &run)?;
    print!("{table}");
    Ok(())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolRun {
    pub manifest: Option<String>,
    pub gen: Option<GenConfig>,
    pub detections: String,
    pub k_list: Option<Vec<usize>>,
    pub seed: u64,
    pub iou: f64,
    pub train: TrainParams,
    pub docstrum: DocstrumParams,
    pub transcripts: Option<String>,
    pub baseline: bool,
}

impl Default for ProtocolRun {
    fn default() -> Self {
        ProtocolRun {
            manifest: None,
            gen: None,
            detections: "gt".into(),
            k_list: None,
            seed: 0,
            iou: laylens::eval::DEFAULT_IOU,
            train: TrainParams::default(),
            docstrum: DocstrumParams::default(),
            transcripts: None,
            baseline: true,
        }
    }
}

/// Corpus for a protocol run: the manifest plus, when generated, the test
/// page images held in memory.
struct Corpus {
    manifest: Manifest,
    root: PathBuf,
    test_images: Option<Vec<GrayImage>>,
}

impl Corpus {
    fn docstrum(&self, params: &DocstrumParams) -> CliResult<DetectionSet> {
        let test = self.manifest.docs_in(Split::Test);
        match &self.test_images {
            Some(images) => Ok(DetectionSet {
                docs: test
                    .par_iter()
                    .zip(images.par_iter())
                    .map(|(doc, img)| DocDetections {
                        doc_id: doc.doc_id.clone(),
                        regions: segment(img, params),
                    })
                    .collect(),
            }),
            None => Ok(docstrum_detections(&test, &self.root, params)?),
        }
    }
}

fn generated_corpus(cfg: &GenConfig, write_to: Option<&Path>) -> CliResult<Corpus> {
    cfg.validate()?;
    let pages: laylens::Result<Vec<(GrayImage, laylens::AnnotatedDoc)>> =
        (0..cfg.n_docs).into_par_iter().map(|i| generate_page(cfg, i)).collect();
    let pages = pages?;
    let mut manifest = Manifest::new(cfg.preset.taxonomy());
    manifest.split = split_for(cfg);
    if let Some(dir) = write_to {
        let images = dir.join("images");
        std::fs::create_dir_all(&images).map_err(|e| Error::Io { path: images, source: e })?;
        pages
            .par_iter()
            .map(|(img, doc)| write_pgm(img, dir.join(&doc.image_path)))
            .collect::<laylens::Result<()>>()?;
    }
    let mut test_images = Vec::new();
    for (img, doc) in pages {
        if manifest.split.as_ref().and_then(|s| s.get(&doc.doc_id)) == Some(&Split::Test) {
            test_images.push(img);
        }
        manifest.docs.push(doc);
    }
    if manifest.split.is_none() {
        return Err(Error::Config("the protocol needs a generator test_size".into()).into());
    }
    if let Some(dir) = write_to {
        save_manifest(&manifest, dir.join("manifest.json"))?;
    }
    Ok(Corpus {
        manifest,
        root: write_to.map(Path::to_path_buf).unwrap_or_default(),
        test_images: Some(test_images),
    })
}

pub fn protocol(a: ProtocolArgs) -> CliResult {
    check_preset(a.preset.as_deref())?;
    let mut flags = Flags::default();
    flags
        .set("manifest", a.manifest.as_deref())
        .set("detections", a.detections.as_deref())
        .set("k_list", a.k_list.clone())
        .set("seed", a.seed)
        .set("iou", a.iou)
        .set("transcripts", a.transcripts.as_deref())
        .set("baseline", a.no_baseline.then_some(false));
    if let Some(p) = &a.preset {
        let mut g = Flags::default();
        g.set("preset", Some(p));
        flags.nested("gen", g);
    }
    if let Some(e) = a.epochs {
        let mut t = Flags::default();
        t.set("epochs", Some(e));
        flags.nested("train", t);
    }
    if let Some(p) = &a.params {
        flags.set("docstrum", Some(load_json_file(p)?));
    }
    let mut defaults = to_value(&ProtocolRun::default());
    // generator settings resolve against their preset's defaults below
    defaults.as_object_mut().expect("object").remove("gen");
    let mut raw = layered(defaults, a.config.as_deref(), flags)?;
    let gen_raw = raw.as_object_mut().expect("object").remove("gen");
    let mut run: ProtocolRun = from_value(raw, "protocol config")?;
    run.gen = match gen_raw {
        Some(Value::Null) | None => None,
        Some(g) => Some(resolve_gen(g)?),
    };

    let corpus = match (&run.manifest, &run.gen) {
        (Some(_), Some(_)) => return Err(usage("give either a manifest or a generator preset, not both")),
        (None, None) => return Err(usage("missing required option --preset or --manifest")),
        (Some(m), None) => {
            let path = Path::new(m);
            Corpus {
                manifest: load_manifest(path)?,
                root: manifest_root(path),
                test_images: None,
            }
        }
        (None, Some(g)) => {
            let dir = a.out.as_ref().map(|o| o.join("corpus"));
            generated_corpus(g, dir.as_deref())?
        }
    };
    let manifest = &corpus.manifest;
    let source = DetectionSource::parse(&run.detections, run.docstrum.clone())?;
    let detections = match &source {
        DetectionSource::Docstrum(p) => corpus.docstrum(p)?,
        other => resolve_detections(manifest, &corpus.root, other)?,
    };
    let baseline = if !run.baseline {
        None
    } else if matches!(source, DetectionSource::Docstrum(_)) {
        Some(detections.clone())
    } else {
        Some(corpus.docstrum(&run.docstrum)?)
    };
    let transcripts = load_transcripts(&run.transcripts)?;
    let cfg = ProtocolConfig {
        k_values: run
            .k_list
            .clone()
            .unwrap_or_else(|| default_k_values(&manifest.taxonomy.name)),
        seed: run.seed,
        iou_thresh: run.iou,
        train: run.train.clone(),
    };
    let out = run_protocol(
        manifest,
        &detections,
        &source.describe(),
        baseline.as_ref(),
        transcripts.as_ref(),
        &cfg,
    )?;
    let report = &out.report;
    let mut text = String::new();
    for (mode, title) in [
        (EvalMode::End2end, "end-to-end"),
        (EvalMode::Foreground, "foreground detection"),
        (EvalMode::ClassifierOnly, "classifier only"),
    ] {
        text.push_str(&learning_curve_table(
            &format!("{title} ({}, detections {})", report.taxonomy, report.detections),
            &report.curve(mode),
        ));
        text.push('\n');
    }
    text.push_str("classifier accuracy\n");
    for r in &report.rows {
        text.push_str(&format!("{:>5}  {:.4}\n", r.k, r.classifier_accuracy));
    }
    if let Some(b) = &report.baseline {
        text.push_str(&format!(
            "\nbaseline (docstrum, foreground)\n  precision {:.4}  recall {:.4}  f1 {:.4}\n",
            b.precision, b.recall, b.f1
        ));
    }
    print!("{text}");
    if let Some(dir) = &a.out {
        let mut rows = Vec::new();
        for mode in [EvalMode::End2end, EvalMode::Foreground, EvalMode::ClassifierOnly] {
            rows.extend(report.curve(mode));
        }
        write_text(&dir.join("report.txt"), &text)?;
        write_text(&dir.join("report.json"), &to_canonical_json(report))?;
        write_text(&dir.join("learning_curve.csv"), &learning_curve_csv(&rows))?;
        for (k, model) in &out.models {
            model.save(dir.join("models").join(format!("model_k{k:03}.json")))?;
        }
        echo(dir, &run)?;
    }
    Ok(())
}

pub fn ingest(a: IngestArgs) -> CliResult {
    let manifest = load_manifest(&a.manifest)?;
    let set = load_detections(&a.detections)?.validate_against(&manifest)?;
    if let Some(out) = &a.out {
        save_detections(&set, out)?;
    }
    println!("valid: {} documents, {} regions", set.docs.len(), set.region_count());
    Ok(())
}

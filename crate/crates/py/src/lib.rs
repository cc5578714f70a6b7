//! Python bindings. Structured values (configs, manifests, detection sets,
//! reports) cross the boundary as plain dicts and lists with the same layout
//! as their JSON files.

use std::path::Path;

use laylens::docstrum::DocstrumParams;
use laylens::eval::{evaluate_corpus, EvalMode};
use laylens::fewshot::protocol::{classify_detections, resolve_detections, shuffled_pool, training_examples};
use laylens::fewshot::{run_protocol, ClassifierModel, DetectionSource, ProtocolConfig, TrainParams};
use laylens::manifest::{parse_json, to_canonical_json};
use laylens::raster::{binarize, connected_components, read_pgm, write_pgm, Connectivity};
use laylens::synthgen::{GenConfig, Preset};
use laylens::{BBox, DetectionSet, GrayImage, Manifest, Transcripts};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

fn py_err(e: laylens::Error) -> PyErr {
    match e {
        laylens::Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (to_canonical_json(value),))
}

fn json_of(obj: &Bound<'_, PyAny>) -> PyResult<String> {
    obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()
}

fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>, context: &str) -> PyResult<T> {
    parse_json(&json_of(obj)?, context).map_err(py_err)
}

fn to_bbox(b: (u32, u32, u32, u32)) -> PyResult<BBox> {
    BBox::try_new(b.0, b.1, b.2, b.3).ok_or_else(|| PyValueError::new_err("box width and height must be positive"))
}

/// Generator config for `preset` with the keys of `overrides` replacing the
/// preset defaults.
fn gen_config(preset: &str, overrides: Option<&Bound<'_, PyAny>>) -> PyResult<GenConfig> {
    let mut base = serde_json::to_value(GenConfig::preset(parse_preset(preset)?)).expect("config serializes");
    if let Some(obj) = overrides {
        let Value::Object(extra) = from_py::<Value>(obj, "generator config")? else {
            return Err(PyValueError::new_err("generator config must be a dict"));
        };
        let target = base.as_object_mut().expect("config is an object");
        for (k, v) in extra {
            target.insert(k, v);
        }
    }
    parse_json(&base.to_string(), "generator config").map_err(py_err)
}

fn parse_preset(name: &str) -> PyResult<Preset> {
    Preset::parse(name).ok_or_else(|| PyValueError::new_err(format!("unknown preset {name:?}")))
}

fn docstrum_params(params: Option<&Bound<'_, PyAny>>) -> PyResult<DocstrumParams> {
    let p = match params {
        Some(obj) => from_py(obj, "docstrum params")?,
        None => DocstrumParams::default(),
    };
    p.validate().map_err(py_err)?;
    Ok(p)
}

fn train_params(params: Option<&Bound<'_, PyAny>>) -> PyResult<TrainParams> {
    match params {
        Some(obj) => from_py(obj, "training params"),
        None => Ok(TrainParams::default()),
    }
}

fn load_manifest_arg(obj: &Bound<'_, PyAny>) -> PyResult<Manifest> {
    let m: Manifest = from_py(obj, "manifest")?;
    m.validate().map_err(py_err)?;
    Ok(m)
}

/// Greyscale page image, 0 = black, 255 = white.
#[pyclass(name = "Image", module = "laylens")]
struct PyImage {
    inner: GrayImage,
}

#[pymethods]
impl PyImage {
    #[new]
    #[pyo3(signature = (width, height, fill=255))]
    fn new(width: u32, height: u32, fill: u8) -> PyResult<Self> {
        if width == 0 || height == 0 {
            return Err(PyValueError::new_err("image dimensions must be positive"));
        }
        Ok(PyImage {
            inner: GrayImage::new(width, height, fill),
        })
    }

    #[staticmethod]
    fn from_bytes(width: u32, height: u32, data: Vec<u8>) -> PyResult<Self> {
        GrayImage::from_raw(width, height, data)
            .map(|inner| PyImage { inner })
            .ok_or_else(|| PyValueError::new_err("pixel buffer does not match width * height"))
    }

    #[staticmethod]
    fn read_pgm(path: &str) -> PyResult<Self> {
        read_pgm(path).map(|inner| PyImage { inner }).map_err(py_err)
    }

    fn write_pgm(&self, path: &str) -> PyResult<()> {
        write_pgm(&self.inner, path).map_err(py_err)
    }

    #[getter]
    fn width(&self) -> u32 {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> u32 {
        self.inner.height()
    }

    fn to_bytes(&self) -> Vec<u8> {
        self.inner.pixels().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("Image({}x{})", self.inner.width(), self.inner.height())
    }
}

/// Trained region classifier.
#[pyclass(name = "Model", module = "laylens")]
struct PyModel {
    inner: ClassifierModel,
}

#[pymethods]
impl PyModel {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        ClassifierModel::from_json(text, "model")
            .map(|inner| PyModel { inner })
            .map_err(py_err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        ClassifierModel::load(path).map(|inner| PyModel { inner }).map_err(py_err)
    }

    fn save(&self, path: &str) -> PyResult<()> {
        self.inner.save(path).map_err(py_err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.taxonomy.labels.clone()
    }

    #[getter]
    fn vocab_size(&self) -> usize {
        self.inner.vocab.len()
    }

    #[getter]
    fn train_loss(&self) -> f64 {
        self.inner.train_loss
    }

    /// Labels every detection; returns a detection set dict.
    #[pyo3(signature = (manifest, detections, transcripts=None))]
    fn classify<'py>(
        &self,
        py: Python<'py>,
        manifest: &Bound<'py, PyAny>,
        detections: &Bound<'py, PyAny>,
        transcripts: Option<&Bound<'py, PyAny>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let manifest = load_manifest_arg(manifest)?;
        let dets: DetectionSet = from_py(detections, "detections")?;
        let dets = dets.validate_against(&manifest).map_err(py_err)?;
        let transcripts: Option<Transcripts> = transcripts.map(|t| from_py(t, "transcripts")).transpose()?;
        let out = py
            .detach(|| classify_detections(&self.inner, &manifest, &dets, transcripts.as_ref()))
            .map_err(py_err)?;
        to_py(py, &out)
    }

    fn __repr__(&self) -> String {
        format!(
            "Model({} classes, {} tokens)",
            self.inner.taxonomy.labels.len(),
            self.inner.vocab.len()
        )
    }
}

/// Intersection over union of two `(x, y, w, h)` boxes.
#[pyfunction]
fn iou(a: (u32, u32, u32, u32), b: (u32, u32, u32, u32)) -> PyResult<f64> {
    Ok(laylens::iou(&to_bbox(a)?, &to_bbox(b)?))
}

#[pyfunction]
fn otsu_threshold(image: &PyImage) -> u8 {
    laylens::raster::otsu_threshold(&image.inner)
}

/// Connected ink components as `(x, y, w, h, pixel_count)` tuples. Ink is
/// `pixel <= threshold`; Otsu's threshold is used when none is given.
#[pyfunction]
#[pyo3(signature = (image, threshold=None, connectivity=8, min_pixels=1))]
fn components(image: &PyImage, threshold: Option<u8>, connectivity: u8, min_pixels: usize) -> PyResult<Vec<(u32, u32, u32, u32, usize)>> {
    let conn = Connectivity::from_neighbors(connectivity)
        .ok_or_else(|| PyValueError::new_err("connectivity must be 4 or 8"))?;
    let t = threshold.unwrap_or_else(|| laylens::raster::otsu_threshold(&image.inner));
    let mask = binarize(&image.inner, t);
    Ok(connected_components(&mask, conn, min_pixels)
        .into_iter()
        .map(|c| (c.bbox.x, c.bbox.y, c.bbox.w, c.bbox.h, c.pixel_count))
        .collect())
}

/// The resolved generator config for `preset` as a dict.
#[pyfunction]
#[pyo3(signature = (preset="source8", overrides=None))]
fn generator_config<'py>(py: Python<'py>, preset: &str, overrides: Option<&Bound<'py, PyAny>>) -> PyResult<Bound<'py, PyAny>> {
    let cfg = gen_config(preset, overrides)?;
    cfg.validate().map_err(py_err)?;
    to_py(py, &cfg)
}

/// Renders page `index` of a corpus; returns `(image, doc)`.
#[pyfunction]
#[pyo3(signature = (index=0, preset="source8", config=None))]
fn generate_page<'py>(
    py: Python<'py>,
    index: usize,
    preset: &str,
    config: Option<&Bound<'py, PyAny>>,
) -> PyResult<(PyImage, Bound<'py, PyAny>)> {
    let cfg = gen_config(preset, config)?;
    let (img, doc) = laylens::synthgen::generate_page(&cfg, index).map_err(py_err)?;
    Ok((PyImage { inner: img }, to_py(py, &doc)?))
}

/// Writes a corpus (images plus `manifest.json`) to `out_dir` and returns
/// the manifest.
#[pyfunction]
#[pyo3(signature = (out_dir, preset="source8", config=None))]
fn generate_corpus<'py>(
    py: Python<'py>,
    out_dir: &str,
    preset: &str,
    config: Option<&Bound<'py, PyAny>>,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = gen_config(preset, config)?;
    let manifest = py
        .detach(|| laylens::synthgen::generate_corpus(&cfg, out_dir))
        .map_err(py_err)?;
    to_py(py, &manifest)
}

/// Docstrum text blocks of `image` as foreground region dicts.
#[pyfunction]
#[pyo3(signature = (image, params=None))]
fn docstrum<'py>(py: Python<'py>, image: &PyImage, params: Option<&Bound<'py, PyAny>>) -> PyResult<Bound<'py, PyAny>> {
    let params = docstrum_params(params)?;
    let regions = py.detach(|| laylens::docstrum::docstrum(&image.inner, &params));
    to_py(py, &regions)
}

/// Scores a detection set against the test split of `manifest`.
#[pyfunction]
#[pyo3(signature = (manifest, detections, mode="end2end", iou=0.5))]
fn evaluate<'py>(
    py: Python<'py>,
    manifest: &Bound<'py, PyAny>,
    detections: &Bound<'py, PyAny>,
    mode: &str,
    iou: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let manifest = load_manifest_arg(manifest)?;
    let dets: DetectionSet = from_py(detections, "detections")?;
    let mode = EvalMode::parse(mode).ok_or_else(|| PyValueError::new_err(format!("unknown mode {mode:?}")))?;
    let report = py
        .detach(|| evaluate_corpus(&manifest, &dets, mode, iou))
        .map_err(py_err)?;
    to_py(py, &report)
}

/// Trains on the first `k` documents of the seeded shuffle of the training
/// documents (all of them when `k` is None).
#[pyfunction]
#[pyo3(signature = (manifest, k=None, seed=0, params=None))]
fn train(manifest: &Bound<'_, PyAny>, k: Option<usize>, seed: u64, params: Option<&Bound<'_, PyAny>>) -> PyResult<PyModel> {
    let py = manifest.py();
    let manifest = load_manifest_arg(manifest)?;
    let hp = train_params(params)?;
    let pool = shuffled_pool(&manifest, seed);
    let k = k.unwrap_or(pool.len());
    if k == 0 || k > pool.len() {
        return Err(PyValueError::new_err(format!("k = {k} must lie in 1..={}", pool.len())));
    }
    let model = py
        .detach(|| laylens::fewshot::train(&manifest.taxonomy, &training_examples(&pool[..k]), &hp))
        .map_err(py_err)?;
    Ok(PyModel { inner: model })
}

/// Runs the learning-curve protocol and returns the report dict.
///
/// `detections` is "gt", "docstrum" or "file:<path>"; image and detection
/// paths are resolved against `root`.
#[pyfunction]
#[pyo3(signature = (manifest, detections="gt", root=".", k_values=None, seed=0, iou=0.5, train=None, docstrum=None, baseline=true))]
#[allow(clippy::too_many_arguments)]
fn protocol<'py>(
    py: Python<'py>,
    manifest: &Bound<'py, PyAny>,
    detections: &str,
    root: &str,
    k_values: Option<Vec<usize>>,
    seed: u64,
    iou: f64,
    train: Option<&Bound<'py, PyAny>>,
    docstrum: Option<&Bound<'py, PyAny>>,
    baseline: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let manifest = load_manifest_arg(manifest)?;
    let params = docstrum_params(docstrum)?;
    let source = DetectionSource::parse(detections, params.clone()).map_err(py_err)?;
    let cfg = ProtocolConfig {
        k_values: k_values.unwrap_or_else(|| laylens::fewshot::protocol::default_k_values(&manifest.taxonomy.name)),
        seed,
        iou_thresh: iou,
        train: train_params(train)?,
    };
    let root = Path::new(root);
    let report = py
        .detach(|| {
            let dets = resolve_detections(&manifest, root, &source)?;
            let base = if baseline {
                Some(resolve_detections(&manifest, root, &DetectionSource::Docstrum(params.clone()))?)
            } else {
                None
            };
            run_protocol(&manifest, &dets, &source.describe(), base.as_ref(), None, &cfg).map(|o| o.report)
        })
        .map_err(py_err)?;
    to_py(py, &report)
}

#[pymodule(name = "laylens")]
fn laylens_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyImage>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(iou, m)?)?;
    m.add_function(wrap_pyfunction!(otsu_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(components, m)?)?;
    m.add_function(wrap_pyfunction!(generator_config, m)?)?;
    m.add_function(wrap_pyfunction!(generate_page, m)?)?;
    m.add_function(wrap_pyfunction!(generate_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(docstrum, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(train, m)?)?;
    m.add_function(wrap_pyfunction!(protocol, m)?)?;
    Ok(())
}

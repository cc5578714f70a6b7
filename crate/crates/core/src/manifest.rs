//! Annotation manifests, detection files and region transcripts.
//!
//! All three are JSON. Manifests and detection files share the region
//! schema `{"bbox":[x,y,w,h],"label":…,"text":…|null,"score":…|null}`;
//! saving always writes fields in declaration order, which is the canonical
//! form, so `save(load(save(m)))` reproduces the first file byte for byte.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::BBox;
use crate::taxonomy::LabelTaxonomy;
use crate::FOREGROUND;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledRegion {
    pub bbox: BBox,
    pub label: String,
    #[serde(default)]
    pub text: Option<String>,
    #[serde(default)]
    pub score: Option<f64>,
}

impl LabeledRegion {
    pub fn ground_truth(bbox: BBox, label: impl Into<String>, text: Option<String>) -> Self {
        LabeledRegion {
            bbox,
            label: label.into(),
            text,
            score: None,
        }
    }

    pub fn detection(bbox: BBox, label: impl Into<String>, score: f64) -> Self {
        LabeledRegion {
            bbox,
            label: label.into(),
            text: None,
            score: Some(score),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedDoc {
    pub doc_id: String,
    /// Image path relative to the manifest's directory.
    #[serde(rename = "image")]
    pub image_path: String,
    pub page_w: u32,
    pub page_h: u32,
    pub regions: Vec<LabeledRegion>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub taxonomy: LabelTaxonomy,
    pub docs: Vec<AnnotatedDoc>,
    #[serde(default)]
    pub split: Option<BTreeMap<String, Split>>,
}

impl Manifest {
    pub fn new(taxonomy: LabelTaxonomy) -> Self {
        Manifest {
            taxonomy,
            docs: Vec::new(),
            split: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.taxonomy.validate()?;
        let mut seen = HashSet::new();
        for doc in &self.docs {
            if !seen.insert(doc.doc_id.as_str()) {
                return Err(Error::doc(&doc.doc_id, "doc_id is not unique"));
            }
            if doc.page_w == 0 || doc.page_h == 0 {
                return Err(Error::doc(&doc.doc_id, "page dimensions must be positive"));
            }
            for (i, region) in doc.regions.iter().enumerate() {
                if !region.bbox.fits_in(doc.page_w, doc.page_h) {
                    return Err(Error::doc(
                        &doc.doc_id,
                        format!(
                            "region {i} bbox {} lies outside the {}x{} page",
                            region.bbox, doc.page_w, doc.page_h
                        ),
                    ));
                }
                if !self.taxonomy.contains(&region.label) {
                    return Err(Error::doc(
                        &doc.doc_id,
                        format!(
                            "region {i} label {:?} is not in taxonomy {:?}",
                            region.label, self.taxonomy.name
                        ),
                    ));
                }
                if region.score.is_some() {
                    return Err(Error::doc(
                        &doc.doc_id,
                        format!("region {i} is ground truth and must not carry a score"),
                    ));
                }
            }
        }
        if let Some(split) = &self.split {
            for doc_id in split.keys() {
                if !seen.contains(doc_id.as_str()) {
                    return Err(Error::InvalidManifest(format!("split names unknown doc_id {doc_id:?}")));
                }
            }
            if let Some(doc) = self.docs.iter().find(|d| !split.contains_key(&d.doc_id)) {
                return Err(Error::doc(&doc.doc_id, "missing from split"));
            }
        }
        Ok(())
    }

    pub fn doc(&self, doc_id: &str) -> Option<&AnnotatedDoc> {
        self.docs.iter().find(|d| d.doc_id == doc_id)
    }

    pub fn split_of(&self, doc_id: &str) -> Option<Split> {
        self.split.as_ref().and_then(|s| s.get(doc_id).copied())
    }

    /// Documents in manifest order belonging to `which`. Without a split
    /// every document is returned.
    pub fn docs_in(&self, which: Split) -> Vec<&AnnotatedDoc> {
        match &self.split {
            None => self.docs.iter().collect(),
            Some(split) => self.docs.iter().filter(|d| split.get(&d.doc_id) == Some(&which)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(self)
    }

    pub fn from_json(text: &str, context: &str) -> Result<Self> {
        let manifest: Manifest = parse_json(text, context)?;
        manifest.validate()?;
        Ok(manifest)
    }
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Manifest::from_json(&text, &path.display().to_string())
}

pub fn save_manifest(manifest: &Manifest, path: impl AsRef<Path>) -> Result<()> {
    manifest.validate()?;
    write_text(path.as_ref(), &manifest.to_json())
}

/// Directory against which a manifest's relative image paths resolve.
pub fn manifest_root(manifest_path: &Path) -> PathBuf {
    manifest_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DocDetections {
    pub doc_id: String,
    pub regions: Vec<LabeledRegion>,
}

/// Output of a foreground detector (or of the classifier), one entry per
/// document.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DetectionSet {
    pub docs: Vec<DocDetections>,
}

impl DetectionSet {
    /// Ground-truth boxes as score-1 detections, optionally keeping labels.
    pub fn from_ground_truth<'a>(docs: impl IntoIterator<Item = &'a AnnotatedDoc>, keep_labels: bool) -> Self {
        DetectionSet {
            docs: docs
                .into_iter()
                .map(|doc| DocDetections {
                    doc_id: doc.doc_id.clone(),
                    regions: doc
                        .regions
                        .iter()
                        .map(|r| LabeledRegion {
                            bbox: r.bbox,
                            label: if keep_labels { r.label.clone() } else { FOREGROUND.to_string() },
                            text: r.text.clone(),
                            score: Some(1.0),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn get(&self, doc_id: &str) -> Option<&DocDetections> {
        self.docs.iter().find(|d| d.doc_id == doc_id)
    }

    pub fn region_count(&self) -> usize {
        self.docs.iter().map(|d| d.regions.len()).sum()
    }

    /// Checks the set against `manifest` and reorders documents into
    /// manifest order. Documents absent from the set get no entry.
    pub fn validate_against(mut self, manifest: &Manifest) -> Result<Self> {
        let order: HashMap<&str, usize> = manifest
            .docs
            .iter()
            .enumerate()
            .map(|(i, d)| (d.doc_id.as_str(), i))
            .collect();
        let mut seen = HashSet::new();
        for det in &self.docs {
            let Some(&idx) = order.get(det.doc_id.as_str()) else {
                return Err(Error::doc(&det.doc_id, "detections reference a doc_id absent from the manifest"));
            };
            if !seen.insert(det.doc_id.clone()) {
                return Err(Error::doc(&det.doc_id, "doc_id appears twice in the detection file"));
            }
            let doc = &manifest.docs[idx];
            for (i, region) in det.regions.iter().enumerate() {
                if !region.bbox.fits_in(doc.page_w, doc.page_h) {
                    return Err(Error::doc(
                        &det.doc_id,
                        format!("detection {i} bbox {} lies outside the {}x{} page", region.bbox, doc.page_w, doc.page_h),
                    ));
                }
                match region.score {
                    None => return Err(Error::doc(&det.doc_id, format!("detection {i} has no score"))),
                    Some(s) if !(0.0..=1.0).contains(&s) => {
                        return Err(Error::doc(&det.doc_id, format!("detection {i} score {s} is outside [0, 1]")))
                    }
                    Some(_) => {}
                }
                if region.label != FOREGROUND && !manifest.taxonomy.contains(&region.label) {
                    return Err(Error::doc(
                        &det.doc_id,
                        format!("detection {i} label {:?} is neither \"foreground\" nor in the taxonomy", region.label),
                    ));
                }
            }
        }
        self.docs.sort_by_key(|d| order[d.doc_id.as_str()]);
        Ok(self)
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(self)
    }
}

pub fn load_detections(path: impl AsRef<Path>) -> Result<DetectionSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_json(&text, &path.display().to_string())
}

pub fn save_detections(set: &DetectionSet, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &set.to_json())
}

/// Region transcripts keyed by `"doc_id#region_idx"`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Transcripts(pub BTreeMap<String, String>);

impl Transcripts {
    pub fn key(doc_id: &str, region_idx: usize) -> String {
        format!("{doc_id}#{region_idx}")
    }

    pub fn get(&self, doc_id: &str, region_idx: usize) -> Option<&str> {
        self.0.get(&Self::key(doc_id, region_idx)).map(String::as_str)
    }

    pub fn insert(&mut self, doc_id: &str, region_idx: usize, text: impl Into<String>) {
        self.0.insert(Self::key(doc_id, region_idx), text.into());
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        parse_json(&text, &path.display().to_string())
    }
}

pub fn parse_json<T: DeserializeOwned>(text: &str, context: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::json(context, &e))
}

pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("in-memory JSON serialization cannot fail");
    text.push('\n');
    text
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize) -> Manifest {
        let mut m = Manifest::new(LabelTaxonomy::invoice5());
        for i in 0..n {
            m.docs.push(AnnotatedDoc {
                doc_id: format!("doc{i}"),
                image_path: format!("images/doc{i}.pgm"),
                page_w: 100,
                page_h: 200,
                regions: vec![
                    LabeledRegion::ground_truth(BBox::new(1, 2, 30, 40), "Logo", None),
                    LabeledRegion::ground_truth(BBox::new(10, 150, 90, 50), "Address", Some("street city".into())),
                ],
            });
        }
        m
    }

    #[test]
    fn empty_docs_list_loads() {
        let text = r#"{"taxonomy":{"name":"resume6","labels":["Education","Experience","Bio","Skills","Summary","Other"]},"docs":[],"split":null}"#;
        let m = Manifest::from_json(text, "inline").unwrap();
        assert!(m.docs.is_empty());
    }

    #[test]
    fn out_of_page_region_names_doc() {
        let mut m = sample(2);
        m.docs[1].regions[0].bbox = BBox::new(90, 0, 20, 10);
        let err = Manifest::from_json(&m.to_json(), "inline").unwrap_err();
        match err {
            Error::InvalidDoc { doc_id, .. } => assert_eq!(doc_id, "doc1"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        let mut m = sample(3);
        m.split = Some(
            [("doc0", Split::Train), ("doc1", Split::Test), ("doc2", Split::Train)]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        );
        save_manifest(&m, &path).unwrap();
        let first = fs::read_to_string(&path).unwrap();
        let loaded = load_manifest(&path).unwrap();
        assert_eq!(loaded, m);
        save_manifest(&loaded, &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), first);
    }

    #[test]
    fn canonical_field_order() {
        let text = sample(1).to_json();
        let keys = ["\"taxonomy\"", "\"docs\"", "\"doc_id\"", "\"image\"", "\"page_w\"", "\"regions\"", "\"bbox\"", "\"label\"", "\"text\"", "\"score\"", "\"split\""];
        let positions: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "{text}");
        assert!(text.contains("\"score\": null"));
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = Manifest::from_json("{\n  \"taxonomy\": 3\n}", "bad.json").unwrap_err();
        match err {
            Error::Json { line, context, .. } => {
                assert_eq!(line, 2);
                assert_eq!(context, "bad.json");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn split_must_cover_every_doc() {
        let mut m = sample(2);
        m.split = Some([("doc0".to_string(), Split::Train)].into_iter().collect());
        assert!(m.validate().is_err());
        m.split.as_mut().unwrap().insert("ghost".into(), Split::Test);
        assert!(m.validate().is_err());
    }

    #[test]
    fn detection_validation() {
        let m = sample(2);
        let mut set = DetectionSet::from_ground_truth(m.docs.iter().rev(), false);
        let ok = set.clone().validate_against(&m).unwrap();
        assert_eq!(ok.docs[0].doc_id, "doc0");

        set.docs[0].regions[0].score = Some(1.2);
        assert!(set.clone().validate_against(&m).is_err());

        set.docs[0].regions[0].score = None;
        assert!(set.clone().validate_against(&m).is_err());

        set.docs[0].regions[0].score = Some(0.5);
        set.docs[0].doc_id = "unknown".into();
        match set.validate_against(&m).unwrap_err() {
            Error::InvalidDoc { doc_id, .. } => assert_eq!(doc_id, "unknown"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn transcript_keys() {
        let mut t = Transcripts::default();
        t.insert("doc_000001", 3, "total due");
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r##"{"doc_000001#3":"total due"}"##);
        assert_eq!(t.get("doc_000001", 3), Some("total due"));
        assert_eq!(t.get("doc_000001", 0), None);
    }
}

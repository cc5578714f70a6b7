//! Multinomial logistic regression trained by full-batch gradient descent.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::features::{featurize, FeatureVector, SPATIAL_DIMS};
use super::text::Vocabulary;
use crate::error::{Error, Result};
use crate::manifest::{parse_json, to_canonical_json, write_text, LabeledRegion};
use crate::taxonomy::LabelTaxonomy;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainParams {
    pub max_vocab: usize,
    pub min_df: usize,
    /// Token counts instead of presence in the BoW block.
    pub counts: bool,
    pub lr: f64,
    pub l2: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            max_vocab: 2000,
            min_df: 1,
            counts: false,
            lr: 0.1,
            l2: 1e-4,
            epochs: 500,
            seed: 0,
        }
    }
}

impl TrainParams {
    pub fn validate(&self) -> Result<()> {
        if self.max_vocab < 1 || self.min_df < 1 {
            return Err(Error::Config("max_vocab and min_df must be at least 1".into()));
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(Error::Config(format!("learning rate {} must be positive", self.lr)));
        }
        if !(self.l2.is_finite() && self.l2 >= 0.0) {
            return Err(Error::Config(format!("l2 {} must be non-negative", self.l2)));
        }
        Ok(())
    }
}

/// Weights `W` (row-major, `n_classes x dim`) and biases `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    pub n_classes: usize,
    pub dim: usize,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl LinearModel {
    pub fn zeros(n_classes: usize, dim: usize) -> Self {
        LinearModel {
            n_classes,
            dim,
            w: vec![0.0; n_classes * dim],
            b: vec![0.0; n_classes],
        }
    }

    pub fn logits(&self, x: &FeatureVector) -> Vec<f64> {
        (0..self.n_classes)
            .map(|c| {
                let row = &self.w[c * self.dim..(c + 1) * self.dim];
                self.b[c] + x.entries.iter().map(|&(i, v)| row[i] * v).sum::<f64>()
            })
            .collect()
    }

    pub fn probabilities(&self, x: &FeatureVector) -> Vec<f64> {
        softmax(&self.logits(x))
    }
}

pub fn softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|&v| (v - m).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Index of the largest value; the lowest index wins ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Gradient of the objective with respect to `W` and `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradient {
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

/// Mean cross-entropy plus `(l2 / 2) * ||W||^2`, and its gradient.
pub fn loss_and_gradient(model: &LinearModel, xs: &[FeatureVector], ys: &[usize], l2: f64) -> (f64, Gradient) {
    let (c_n, d) = (model.n_classes, model.dim);
    let mut gw = vec![0.0; c_n * d];
    let mut gb = vec![0.0; c_n];
    let mut loss = 0.0;
    let n = xs.len().max(1) as f64;
    for (x, &y) in xs.iter().zip(ys) {
        let z = model.logits(x);
        let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = m + z.iter().map(|&v| (v - m).exp()).sum::<f64>().ln();
        loss += lse - z[y];
        for c in 0..c_n {
            let p = (z[c] - lse).exp();
            let g = (p - if c == y { 1.0 } else { 0.0 }) / n;
            gb[c] += g;
            let row = &mut gw[c * d..(c + 1) * d];
            for &(i, v) in &x.entries {
                row[i] += g * v;
            }
        }
    }
    loss /= n;
    let mut sq = 0.0;
    for (g, &w) in gw.iter_mut().zip(&model.w) {
        *g += l2 * w;
        sq += w * w;
    }
    loss += 0.5 * l2 * sq;
    (loss, Gradient { w: gw, b: gb })
}

/// Result of [`fit`]: the model and the loss after every epoch.
#[derive(Clone, Debug)]
pub struct Fit {
    pub model: LinearModel,
    pub losses: Vec<f64>,
}

const MAX_HALVINGS: usize = 60;

/// Gradient descent from zero weights. A step that would raise the loss is
/// retried with half the learning rate, which stays halved afterwards.
pub fn fit(xs: &[FeatureVector], ys: &[usize], n_classes: usize, dim: usize, hp: &TrainParams) -> Result<Fit> {
    let mut model = LinearModel::zeros(n_classes, dim);
    let (mut loss, mut grad) = loss_and_gradient(&model, xs, ys, hp.l2);
    if !loss.is_finite() {
        return Err(Error::Training(format!("loss is {loss} at epoch 0")));
    }
    let mut lr = hp.lr;
    let mut losses = Vec::with_capacity(hp.epochs);
    for epoch in 1..=hp.epochs {
        let mut halvings = 0;
        loop {
            let mut cand = model.clone();
            for (w, g) in cand.w.iter_mut().zip(&grad.w) {
                *w -= lr * g;
            }
            for (b, g) in cand.b.iter_mut().zip(&grad.b) {
                *b -= lr * g;
            }
            let (l, g) = loss_and_gradient(&cand, xs, ys, hp.l2);
            if l.is_finite() && l <= loss {
                model = cand;
                loss = l;
                grad = g;
                break;
            }
            halvings += 1;
            if halvings > MAX_HALVINGS {
                return Err(Error::Training(format!(
                    "loss diverged at epoch {epoch} (candidate loss {l}, learning rate {lr:e})"
                )));
            }
            lr /= 2.0;
        }
        losses.push(loss);
    }
    Ok(Fit { model, losses })
}

/// A trained region classifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierModel {
    pub taxonomy: LabelTaxonomy,
    pub vocab: Vocabulary,
    #[serde(rename = "W")]
    pub w: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub hp: TrainParams,
    pub train_loss: f64,
}

/// A training or inference example: a region and the page it sits on.
#[derive(Clone, Copy, Debug)]
pub struct RegionRef<'a> {
    pub region: &'a LabeledRegion,
    pub text: Option<&'a str>,
    pub page_w: u32,
    pub page_h: u32,
}

impl ClassifierModel {
    pub fn dim(&self) -> usize {
        self.vocab.len() + SPATIAL_DIMS
    }

    pub fn linear(&self) -> LinearModel {
        LinearModel {
            n_classes: self.w.len(),
            dim: self.dim(),
            w: self.w.iter().flatten().copied().collect(),
            b: self.b.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.taxonomy.validate()?;
        let bad = |m: String| Err(Error::Config(format!("model: {m}")));
        if self.w.len() != self.taxonomy.len() || self.b.len() != self.taxonomy.len() {
            return bad(format!(
                "{} weight rows and {} biases for {} classes",
                self.w.len(),
                self.b.len(),
                self.taxonomy.len()
            ));
        }
        if let Some(row) = self.w.iter().find(|r| r.len() != self.dim()) {
            return bad(format!("weight row of length {} but feature dimension {}", row.len(), self.dim()));
        }
        if !self.w.iter().flatten().chain(&self.b).all(|v| v.is_finite()) {
            return bad("non-finite parameter".into());
        }
        Ok(())
    }

    pub fn featurize(&self, r: &RegionRef<'_>) -> FeatureVector {
        featurize(r.text, &r.region.bbox, r.page_w, r.page_h, &self.vocab, self.hp.counts)
    }

    pub fn to_json(&self) -> String {
        to_canonical_json(self)
    }

    pub fn from_json(text: &str, context: &str) -> Result<Self> {
        let m: ClassifierModel = parse_json(text, context)?;
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_text(path.as_ref(), &self.to_json())
    }
}

/// Builds the vocabulary from the examples' text and fits the classifier.
///
/// Every taxonomy class needs at least one example.
pub fn train(taxonomy: &LabelTaxonomy, examples: &[RegionRef<'_>], hp: &TrainParams) -> Result<ClassifierModel> {
    hp.validate()?;
    let mut ys = Vec::with_capacity(examples.len());
    for e in examples {
        let y = taxonomy
            .index_of(&e.region.label)
            .ok_or_else(|| Error::UnknownLabel(e.region.label.clone()))?;
        ys.push(y);
    }
    let missing: Vec<&str> = (0..taxonomy.len())
        .filter(|c| !ys.contains(c))
        .map(|c| taxonomy.label(c))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Training(format!("no training example for class(es) {missing:?}")));
    }
    let vocab = Vocabulary::build(examples.iter().filter_map(|e| e.text), hp.max_vocab, hp.min_df);
    if vocab.is_empty() {
        log::warn!("training regions carry no text; the model uses spatial features only");
    }
    let xs: Vec<FeatureVector> = examples
        .iter()
        .map(|e| featurize(e.text, &e.region.bbox, e.page_w, e.page_h, &vocab, hp.counts))
        .collect();
    let dim = vocab.len() + SPATIAL_DIMS;
    let fitted = fit(&xs, &ys, taxonomy.len(), dim, hp)?;
    let train_loss = fitted
        .losses
        .last()
        .copied()
        .unwrap_or_else(|| loss_and_gradient(&fitted.model, &xs, &ys, hp.l2).0);
    Ok(ClassifierModel {
        taxonomy: taxonomy.clone(),
        vocab,
        w: fitted.model.w.chunks(dim).map(|r| r.to_vec()).collect(),
        b: fitted.model.b,
        hp: hp.clone(),
        train_loss,
    })
}

/// Labels each region with the arg-max class; the score is that class's
/// softmax probability.
pub fn classify(model: &ClassifierModel, regions: &[RegionRef<'_>]) -> Vec<LabeledRegion> {
    let lin = model.linear();
    regions
        .iter()
        .map(|r| {
            let p = lin.probabilities(&model.featurize(r));
            let c = argmax(&p);
            LabeledRegion {
                bbox: r.region.bbox,
                label: model.taxonomy.label(c).to_string(),
                text: r.region.text.clone(),
                score: Some(p[c]),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn dense(v: &[f64]) -> FeatureVector {
        FeatureVector::from_dense(v)
    }

    #[test]
    fn zero_model_is_uniform() {
        let m = LinearModel::zeros(4, 3);
        let p = m.probabilities(&dense(&[1.0, -2.0, 3.0]));
        assert!(p.iter().all(|&v| (v - 0.25).abs() < 1e-15));
        assert_eq!(argmax(&p), 0);
    }

    #[test]
    fn separable_one_dimensional() {
        let xs = vec![dense(&[1.0]), dense(&[-1.0]), dense(&[1.0]), dense(&[-1.0])];
        let ys = vec![0, 1, 0, 1];
        let hp = TrainParams {
            l2: 0.0,
            ..TrainParams::default()
        };
        let f = fit(&xs, &ys, 2, 1, &hp).unwrap();
        let acc = xs
            .iter()
            .zip(&ys)
            .filter(|(x, &y)| argmax(&f.model.logits(x)) == y)
            .count();
        assert_eq!(acc, 4);
        assert!(f.losses.windows(2).all(|w| w[1] <= w[0]));
    }

    fn random_batch(rng: &mut Rng, n: usize, d: usize, c: usize) -> (LinearModel, Vec<FeatureVector>, Vec<usize>) {
        let mut m = LinearModel::zeros(c, d);
        for w in m.w.iter_mut().chain(m.b.iter_mut()) {
            *w = rng.unit_f64() - 0.5;
        }
        let xs = (0..n)
            .map(|_| dense(&(0..d).map(|_| rng.unit_f64() * 2.0 - 1.0).collect::<Vec<_>>()))
            .collect();
        let ys = (0..n).map(|_| rng.index(c)).collect();
        (m, xs, ys)
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = Rng::new(5);
        let (m, xs, ys) = random_batch(&mut rng, 12, 7, 5);
        let l2 = 0.01;
        let (_, g) = loss_and_gradient(&m, &xs, &ys, l2);
        let eps = 1e-5;
        for i in 0..m.w.len() {
            let (mut a, mut b) = (m.clone(), m.clone());
            a.w[i] += eps;
            b.w[i] -= eps;
            let fd = (loss_and_gradient(&a, &xs, &ys, l2).0 - loss_and_gradient(&b, &xs, &ys, l2).0) / (2.0 * eps);
            assert!((fd - g.w[i]).abs() <= 1e-6 * (1.0 + fd.abs()), "w[{i}]: {fd} vs {}", g.w[i]);
        }
        for i in 0..m.b.len() {
            let (mut a, mut b) = (m.clone(), m.clone());
            a.b[i] += eps;
            b.b[i] -= eps;
            let fd = (loss_and_gradient(&a, &xs, &ys, l2).0 - loss_and_gradient(&b, &xs, &ys, l2).0) / (2.0 * eps);
            assert!((fd - g.b[i]).abs() <= 1e-6 * (1.0 + fd.abs()));
        }
    }

    #[test]
    fn loss_is_monotone_without_l2() {
        let mut rng = Rng::new(9);
        let (_, xs, ys) = random_batch(&mut rng, 40, 6, 3);
        let hp = TrainParams {
            l2: 0.0,
            lr: 5.0,
            epochs: 100,
            ..TrainParams::default()
        };
        let f = fit(&xs, &ys, 3, 6, &hp).unwrap();
        assert!(f.losses.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn argmax_ignores_logit_shift() {
        let mut rng = Rng::new(3);
        for _ in 0..50 {
            let z: Vec<f64> = (0..5).map(|_| rng.unit_f64() * 10.0 - 5.0).collect();
            let shift = rng.unit_f64() * 100.0 - 50.0;
            let z2: Vec<f64> = z.iter().map(|v| v + shift).collect();
            assert_eq!(argmax(&softmax(&z)), argmax(&softmax(&z2)));
        }
    }

    #[test]
    fn training_is_bitwise_deterministic() {
        let mut rng = Rng::new(4);
        let (_, xs, ys) = random_batch(&mut rng, 30, 5, 3);
        let hp = TrainParams::default();
        let a = fit(&xs, &ys, 3, 5, &hp).unwrap().model;
        let b = fit(&xs, &ys, 3, 5, &hp).unwrap().model;
        let bits = |m: &LinearModel| m.w.iter().chain(&m.b).map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn non_finite_input_reports_epoch() {
        let xs = vec![dense(&[f64::NAN])];
        let err = fit(&xs, &[0], 2, 1, &TrainParams::default()).unwrap_err();
        assert!(err.to_string().contains("epoch 0"), "{err}");
    }
}

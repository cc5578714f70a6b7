use std::collections::BTreeMap;

use laylens::eval::{evaluate_corpus, EvalMode};
use laylens::manifest::DocDetections;
use laylens::{AnnotatedDoc, BBox, DetectionSet, LabelTaxonomy, LabeledRegion, Manifest, Split};

fn doc(id: &str, regions: &[(u32, &str)]) -> AnnotatedDoc {
    AnnotatedDoc {
        doc_id: id.into(),
        image_path: format!("images/{id}.pgm"),
        page_w: 200,
        page_h: 200,
        regions: regions
            .iter()
            .map(|&(x, l)| LabeledRegion::ground_truth(BBox::new(x, 10, 20, 20), l, None))
            .collect(),
    }
}

fn fixture() -> Manifest {
    let mut m = Manifest::new(LabelTaxonomy::invoice5());
    let logo = LabelTaxonomy::invoice5().labels[0].clone();
    let addr = LabelTaxonomy::invoice5().labels[1].clone();
    m.docs = vec![
        doc("a", &[(0, &logo), (50, &addr)]),
        doc("b", &[(0, &addr), (50, &addr)]),
        doc("t", &[(0, &logo)]),
    ];
    m.split = Some(BTreeMap::from([
        ("a".to_string(), Split::Test),
        ("b".to_string(), Split::Test),
        ("t".to_string(), Split::Train),
    ]));
    m.validate().unwrap();
    m
}

fn perfect(m: &Manifest) -> DetectionSet {
    DetectionSet::from_ground_truth(m.docs_in(Split::Test), true)
}

#[test]
fn perfect_detections_score_one_everywhere() {
    let m = fixture();
    for mode in [EvalMode::Foreground, EvalMode::End2end, EvalMode::ClassifierOnly] {
        let r = evaluate_corpus(&m, &perfect(&m), mode, 0.5).unwrap();
        assert_eq!((r.metrics.precision, r.metrics.recall, r.metrics.f1), (1.0, 1.0, 1.0), "{mode}");
    }
}

#[test]
fn empty_detections_score_zero() {
    let m = fixture();
    let r = evaluate_corpus(&m, &DetectionSet::default(), EvalMode::End2end, 0.5).unwrap();
    assert_eq!((r.metrics.precision, r.metrics.recall), (0.0, 0.0));
    assert_eq!(r.metrics.fn_, 4);
}

#[test]
fn classifier_only_accuracy() {
    let m = fixture();
    let mut d = perfect(&m);
    d.docs[1].regions[0].label = LabelTaxonomy::invoice5().labels[0].clone();
    let r = evaluate_corpus(&m, &d, EvalMode::ClassifierOnly, 0.5).unwrap();
    assert_eq!(r.accuracy, Some(0.75));
    let fg = evaluate_corpus(&m, &d, EvalMode::Foreground, 0.5).unwrap();
    assert_eq!(fg.metrics.f1, 1.0);
    let e2e = evaluate_corpus(&m, &d, EvalMode::End2end, 0.5).unwrap();
    assert_eq!((e2e.metrics.tp, e2e.metrics.fp, e2e.metrics.fn_), (3, 1, 1));
    assert!(e2e.metrics.tp <= fg.metrics.tp);
}

#[test]
fn unknown_and_training_docs_are_rejected() {
    let m = fixture();
    let mut d = perfect(&m);
    d.docs.push(DocDetections {
        doc_id: "zzz".into(),
        regions: vec![],
    });
    let e = evaluate_corpus(&m, &d, EvalMode::End2end, 0.5).unwrap_err();
    assert!(e.to_string().contains("zzz"));

    let leak = DetectionSet::from_ground_truth(m.docs.iter(), true);
    let e = evaluate_corpus(&m, &leak, EvalMode::End2end, 0.5).unwrap_err();
    assert!(e.to_string().contains("training document"), "{e}");
}

mod common;

use std::collections::BTreeMap;

use common::*;
use discreg::eval::*;
use discreg::synth::blob_labels;
use discreg::volume::*;
use discreg::Error;

/// Scalar per-label loop over voxel triples.
fn oracle_pair(a: &LabelVolume, b: &LabelVolume) -> (BTreeMap<u32, f64>, f64) {
    let mut labels: Vec<u32> = a.data().iter().chain(b.data()).copied().filter(|&l| l != 0).collect();
    labels.sort_unstable();
    labels.dedup();
    let mut per = BTreeMap::new();
    for l in labels {
        let mut inter = 0usize;
        let mut union = 0usize;
        for i in 0..a.data().len() {
            let (x, y) = (a.data()[i] == l, b.data()[i] == l);
            if x && y {
                inter += 1;
            }
            if x || y {
                union += 1;
            }
        }
        per.insert(l, 100.0 * inter as f64 / union as f64);
    }
    let mean = per.values().sum::<f64>() / per.len() as f64;
    (per, mean)
}

#[test]
fn pair_means_on_130_structures() {
    let d = Dims::cube(32);
    let a = blob_labels(d, 130, 1).unwrap();
    let b = warp_labels(&a, &random_field(d, 1.5, 2)).unwrap();
    let labels = structure_labels(&a, &b);
    assert!(labels.len() > 100);
    let got = mean_jc_pair(&a, &b, &labels).unwrap();
    let (per, mean) = oracle_pair(&a, &b);
    assert_eq!(got.per_structure.len(), per.len());
    for (l, v) in &per {
        assert!((got.per_structure[l] - v).abs() < 1e-9);
    }
    assert!((got.mean - mean).abs() < 1e-9);
    assert!(got.per_structure.values().all(|v| (0.0..=100.0).contains(v)));
}

#[test]
fn dataset_mean_over_144_pairs() {
    let d = Dims::cube(12);
    let vols: Vec<LabelVolume> = (0..12).map(|s| blob_labels(d, 6, s).unwrap()).collect();
    let mut means = Vec::new();
    let mut reports = Vec::new();
    for (i, a) in vols.iter().enumerate() {
        for (j, b) in vols.iter().enumerate() {
            let labels = structure_labels(a, b);
            let p = mean_jc_pair(a, b, &labels).unwrap();
            assert!((p.mean - oracle_pair(a, b).1).abs() < 1e-9);
            means.push(p.mean);
            reports.push(PairReport::new(format!("v{i:02}"), format!("v{j:02}"), p));
        }
    }
    assert_eq!(means.len(), 144);
    let oracle = means.iter().sum::<f64>() / 144.0;
    assert!((mean_jc_dataset(&means).unwrap() - oracle).abs() < 1e-9);
    let report = JcReport::new(reports, vec![]).unwrap();
    assert_eq!(report.m, 144);
    assert!((report.dataset_mean - oracle).abs() < 1e-9);
}

#[test]
fn dim_mismatch_rejected() {
    let a = random_labels(Dims::cube(3), 2, 0);
    let b = random_labels(Dims::cube(4), 2, 0);
    assert!(matches!(jaccard(&a, &b, 1), Err(Error::DimMismatch { .. })));
    assert!(matches!(mean_jc_pair(&a, &b, &[1]), Err(Error::DimMismatch { .. })));
}

#[test]
fn report_files_written() {
    let dir = tempfile::tempdir().unwrap();
    let a = random_labels(Dims::cube(4), 3, 1);
    let p = mean_jc_pair(&a, &a, &structure_labels(&a, &a)).unwrap();
    let r = JcReport::new(vec![PairReport::new("x", "x", p)], vec![]).unwrap();
    let (json, csv) = r.write(dir.path().join("report")).unwrap();
    assert_eq!(JcReport::from_json(&std::fs::read_to_string(json).unwrap()).unwrap().dataset_mean, 100.0);
    assert!(std::fs::read_to_string(csv).unwrap().starts_with("fixed,moving,structure,jc\n"));
}

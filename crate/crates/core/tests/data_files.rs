use std::fs;
use std::path::PathBuf;

use tnvqc::data_io::{
    load_dataset, load_idx, pairwise_matrix_csv, preprocess, save_dataset, write_results, ImageRecord,
};
use tnvqc::spin::{build_lattice, generate_phase_dataset, LatticeKind, SpinModel};
use tnvqc::variational::{Prediction, RunMeta, TrainConfig, TrainReport};
use tnvqc::Error;

fn report(meta: RunMeta, accuracy: f64) -> TrainReport {
    TrainReport {
        meta,
        config: TrainConfig::phase(0.002, 1),
        n_train: 1,
        n_val: 1,
        n_test: 1,
        iterations: 0,
        loss_history: vec![],
        val_accuracy_history: vec![],
        best_iteration: 0,
        best_val_accuracy: 1.0,
        final_params: vec![0.0],
        test_accuracy: accuracy,
        test_predictions: vec![Prediction {
            sweep_value: Some(0.5),
            label: 0,
            probs: vec![0.6, 0.4],
        }],
    }
}

#[test]
fn dataset_round_trip_and_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let lat = build_lattice(LatticeKind::Rectangular, 2, 2).unwrap();
    let ds = generate_phase_dataset(SpinModel::Xxz, &lat, 12, 8).unwrap();
    let path = dir.path().join("xxz.qprd");
    save_dataset(&ds, &path, Some(&serde_json::json!({"seed": 8}))).unwrap();
    assert_eq!(load_dataset(&path).unwrap(), ds);
    assert!(dir.path().join("xxz.qprd.json").exists());

    let bytes = fs::read(&path).unwrap();
    assert_eq!(&bytes[..4], b"QPRD");
    assert_eq!(bytes[11], 3);
    // 16-byte header, then 17 + 16 * 2^4 bytes per record
    assert_eq!(bytes.len(), 16 + 12 * (17 + 256));

    let truncated = dir.path().join("short.qprd");
    fs::write(&truncated, &bytes[..bytes.len() - 3]).unwrap();
    assert!(matches!(load_dataset(&truncated), Err(Error::Format { .. })));

    let mut v99 = bytes.clone();
    v99[4..8].copy_from_slice(&99u32.to_le_bytes());
    let p99 = dir.path().join("v99.qprd");
    fs::write(&p99, v99).unwrap();
    assert!(matches!(load_dataset(&p99), Err(Error::UnsupportedVersion { found: 99, expected: 1 })));
}

#[test]
fn idx_magic_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let labels = dir.path().join("labels");
    let mut lb = vec![0, 0, 8, 1, 0, 0, 0, 1];
    lb.push(3);
    fs::write(&labels, &lb).unwrap();
    // a labels file passed as the images file
    match load_idx(&labels, &labels) {
        Err(Error::Format { offset, .. }) => assert_eq!(offset, 0),
        other => panic!("expected format error, got {other:?}"),
    }
    let images = dir.path().join("images");
    let mut ib = vec![0, 0, 8, 3, 0, 0, 0, 1, 0, 0, 0, 28, 0, 0, 0, 28];
    ib.extend(std::iter::repeat(9u8).take(784));
    fs::write(&images, &ib).unwrap();
    let recs = load_idx(&images, &labels).unwrap();
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0].label, 3);
}

#[test]
fn preprocessing_is_normalized_and_linear() {
    let pixels: Vec<u8> = (0..784).map(|i| ((i * 37) % 251) as u8).collect();
    let a = preprocess(&ImageRecord { pixels: pixels.clone(), label: 0 });
    assert_eq!(a.vector.len(), 256);
    let norm: f64 = a.vector.iter().map(|v| v * v).sum();
    assert!((norm - 1.0).abs() < 1e-10);
    // halving every pixel leaves the normalized encoding unchanged up to the integer rounding
    let doubled: Vec<u8> = pixels.iter().map(|&p| p / 2 * 2).collect();
    let halved: Vec<u8> = doubled.iter().map(|&p| p / 2).collect();
    let x = preprocess(&ImageRecord { pixels: doubled, label: 0 });
    let y = preprocess(&ImageRecord { pixels: halved, label: 0 });
    for (p, q) in x.vector.iter().zip(&y.vector) {
        assert!((p - q).abs() < 1e-12);
    }
}

#[test]
fn results_tables() {
    let dir = tempfile::tempdir().unwrap();
    let phase = RunMeta {
        task: "phase".into(),
        model: "TFIM".into(),
        lattice: "1x8".into(),
        layout: "MERA".into(),
        block: "U".into(),
        layers: 1,
        variant: "standard".into(),
        n_qubits: 8,
        pair: None,
    };
    let path = dir.path().join("one.csv");
    let written = write_results(&[report(phase.clone(), 0.99)], &path).unwrap();
    let text = fs::read_to_string(&written.csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1].split(',').count(), 9);
    assert!(written.pairwise.is_none());

    let mut pairs = Vec::new();
    for a in 0..10 {
        for b in 0..a {
            let meta = RunMeta {
                task: "image".into(),
                pair: Some([a, b]),
                ..phase.clone()
            };
            pairs.push(report(meta, (a * 10 + b) as f64 / 100.0));
        }
    }
    assert_eq!(pairs.len(), 45);
    let matrix = pairwise_matrix_csv(&pairs);
    let rows: Vec<Vec<&str>> = matrix.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 11);
    for (i, row) in rows[1..].iter().enumerate() {
        assert_eq!(row.len(), 11);
        for (j, cell) in row[1..].iter().enumerate() {
            assert_eq!(cell.is_empty(), j >= i, "cell ({i}, {j})");
        }
    }
    assert_eq!(rows[10][9], "0.98");
    let w = write_results(&pairs, &dir.path().join("img.csv")).unwrap();
    assert_eq!(w.pairwise, Some(PathBuf::from(dir.path().join("img_pairwise.csv"))));

    assert!(matches!(write_results(&[], &path), Err(Error::Argument(_))));
}

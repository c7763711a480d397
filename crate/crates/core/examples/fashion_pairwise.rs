//! Binary Fashion-MNIST classification with an eight-qubit MERA on 16x16 amplitude encodings.
//!
//! Expects the four IDX files in `data/fashion-mnist` (or the directory given as the first
//! argument). Further arguments pick the class pair and layer count: `-- data 4 6 3`.
use std::path::PathBuf;

use tnvqc::ansatz::{build_mera, BlockKind, MeraVariant};
use tnvqc::classifier::{pairwise_image_pipeline, ImageTaskConfig};
use tnvqc::data_io::{load_idx, preprocess_all, FASHION_CLASSES};

fn main() -> tnvqc::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let dir = PathBuf::from(args.first().map(String::as_str).unwrap_or("data/fashion-mnist"));
    let num = |i: usize, d: usize| args.get(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let (a, b, layers) = (num(1, 4), num(2, 6), num(3, 1));

    let train = preprocess_all(&load_idx(&dir.join("train-images-idx3-ubyte"), &dir.join("train-labels-idx1-ubyte"))?);
    let test = preprocess_all(&load_idx(&dir.join("t10k-images-idx3-ubyte"), &dir.join("t10k-labels-idx1-ubyte"))?);

    let circuit = build_mera(8, BlockKind::U, layers, MeraVariant::Standard)?;
    let report = pairwise_image_pipeline(a, b, &circuit, &train, &test, &ImageTaskConfig::new(1))?;
    println!(
        "{} vs {} (MERA-U L={layers}): val {:.4}, test {:.4} on {} images",
        FASHION_CLASSES[a], FASHION_CLASSES[b], report.best_val_accuracy, report.test_accuracy, report.n_test
    );
    Ok(())
}

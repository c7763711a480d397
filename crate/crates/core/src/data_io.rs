//! Fashion-MNIST IDX ingestion, image preprocessing, `QPRD` dataset files and result tables.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{PhaseDataset, PhaseRecord, SpinModel};
use crate::variational::TrainReport;

pub const IMAGE_SIDE: usize = 28;
pub const IMAGE_PIXELS: usize = IMAGE_SIDE * IMAGE_SIDE;
pub const RESIZED_SIDE: usize = 16;
pub const ENCODED_LEN: usize = RESIZED_SIDE * RESIZED_SIDE;

const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

pub const FASHION_CLASSES: [&str; 10] = [
    "T-shirt/top",
    "Trouser",
    "Pullover",
    "Dress",
    "Coat",
    "Sandal",
    "Shirt",
    "Sneaker",
    "Bag",
    "Ankle boot",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageRecord {
    pub pixels: Vec<u8>,
    pub label: u8,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EncodedImage {
    pub vector: Vec<f64>,
    pub label: u8,
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn be_u32(bytes: &[u8], offset: usize, what: &str) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes(b.try_into().expect("4-byte slice")))
        .ok_or_else(|| Error::format(offset as u64, format!("truncated before {what}")))
}

/// Parse a pair of IDX files (big-endian headers) into labeled 28x28 images.
pub fn load_idx(images_path: &Path, labels_path: &Path) -> Result<Vec<ImageRecord>> {
    let images = read_file(images_path)?;
    let labels = read_file(labels_path)?;
    let (n_images, pixels) = parse_idx_images(&images)?;
    let label_bytes = parse_idx_labels(&labels)?;
    if label_bytes.len() != n_images {
        return Err(Error::format(
            4,
            format!("labels file declares {} items, images file {}", label_bytes.len(), n_images),
        ));
    }
    label_bytes
        .iter()
        .enumerate()
        .map(|(i, &label)| {
            if label >= 10 {
                return Err(Error::format(8 + i as u64, format!("label {label} out of range")));
            }
            Ok(ImageRecord {
                pixels: pixels[i * IMAGE_PIXELS..(i + 1) * IMAGE_PIXELS].to_vec(),
                label,
            })
        })
        .collect()
}

/// Returns the image count and the raw pixel block.
pub fn parse_idx_images(bytes: &[u8]) -> Result<(usize, &[u8])> {
    let magic = be_u32(bytes, 0, "magic")?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(Error::format(0, format!("expected image magic {IDX_IMAGES_MAGIC:#010x}, found {magic:#010x}")));
    }
    let count = be_u32(bytes, 4, "image count")? as usize;
    let rows = be_u32(bytes, 8, "row count")? as usize;
    let cols = be_u32(bytes, 12, "column count")? as usize;
    if rows != IMAGE_SIDE || cols != IMAGE_SIDE {
        return Err(Error::format(8, format!("expected 28x28 images, found {rows}x{cols}")));
    }
    let expected = 16 + count * IMAGE_PIXELS;
    if bytes.len() != expected {
        return Err(Error::format(
            bytes.len().min(expected) as u64,
            format!("declared {count} images need {expected} bytes, file has {}", bytes.len()),
        ));
    }
    Ok((count, &bytes[16..]))
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<&[u8]> {
    let magic = be_u32(bytes, 0, "magic")?;
    if magic != IDX_LABELS_MAGIC {
        return Err(Error::format(0, format!("expected label magic {IDX_LABELS_MAGIC:#010x}, found {magic:#010x}")));
    }
    let count = be_u32(bytes, 4, "label count")? as usize;
    let expected = 8 + count;
    if bytes.len() != expected {
        return Err(Error::format(
            bytes.len().min(expected) as u64,
            format!("declared {count} labels need {expected} bytes, file has {}", bytes.len()),
        ));
    }
    Ok(&bytes[8..])
}

/// Corner-aligned bilinear resize of a square grayscale image.
pub fn resize_bilinear(pixels: &[f64], side: usize, new_side: usize) -> Vec<f64> {
    let scale = (side - 1) as f64 / (new_side - 1) as f64;
    let mut out = Vec::with_capacity(new_side * new_side);
    for r in 0..new_side {
        let y = r as f64 * scale;
        let y0 = (y.floor() as usize).min(side - 1);
        let y1 = (y0 + 1).min(side - 1);
        let fy = y - y0 as f64;
        for c in 0..new_side {
            let x = c as f64 * scale;
            let x0 = (x.floor() as usize).min(side - 1);
            let x1 = (x0 + 1).min(side - 1);
            let fx = x - x0 as f64;
            let at = |yy: usize, xx: usize| pixels[yy * side + xx];
            let top = at(y0, x0) * (1.0 - fx) + at(y0, x1) * fx;
            let bottom = at(y1, x0) * (1.0 - fx) + at(y1, x1) * fx;
            out.push(top * (1.0 - fy) + bottom * fy);
        }
    }
    out
}

/// Resize to 16x16, flatten row-major and L2-normalize. A blank image becomes the uniform vector.
pub fn preprocess(image: &ImageRecord) -> EncodedImage {
    let pixels: Vec<f64> = image.pixels.iter().map(|&p| f64::from(p)).collect();
    let mut vector = resize_bilinear(&pixels, IMAGE_SIDE, RESIZED_SIDE);
    let norm = vector.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        log::warn!("all-zero image (label {}) encoded as the uniform vector", image.label);
        vector.iter_mut().for_each(|v| *v = 1.0 / RESIZED_SIDE as f64);
    } else {
        vector.iter_mut().for_each(|v| *v /= norm);
    }
    EncodedImage {
        vector,
        label: image.label,
    }
}

pub fn preprocess_all(images: &[ImageRecord]) -> Vec<EncodedImage> {
    images.par_iter().map(preprocess).collect()
}

// ---------------------------------------------------------------------------------------------
// QPRD

pub const QPRD_MAGIC: &[u8; 4] = b"QPRD";
pub const QPRD_VERSION: u32 = 1;
const QPRD_HEADER_LEN: usize = 16;

pub fn encode_dataset(dataset: &PhaseDataset) -> Result<Vec<u8>> {
    let n = dataset.n_sites();
    let dim = 1usize << n;
    let narrow = |v: usize, what: &str| {
        u8::try_from(v).map_err(|_| Error::Argument(format!("{what} {v} does not fit in a byte")))
    };
    let mut out = Vec::with_capacity(QPRD_HEADER_LEN + dataset.records.len() * (17 + 16 * dim));
    out.extend_from_slice(QPRD_MAGIC);
    out.extend_from_slice(&QPRD_VERSION.to_le_bytes());
    out.push(dataset.model.code());
    out.push(narrow(dataset.rows, "rows")?);
    out.push(narrow(dataset.cols, "cols")?);
    out.push(narrow(dataset.n_classes, "n_classes")?);
    let n_records =
        u32::try_from(dataset.records.len()).map_err(|_| Error::Argument("too many records".into()))?;
    out.extend_from_slice(&n_records.to_le_bytes());
    for r in &dataset.records {
        if r.amplitudes.len() != dim {
            return Err(Error::Shape(format!("record has {} amplitudes, expected {dim}", r.amplitudes.len())));
        }
        out.extend_from_slice(&r.sweep_value.to_le_bytes());
        out.push(r.label);
        out.extend_from_slice(&r.energy.to_le_bytes());
        for a in &r.amplitudes {
            out.extend_from_slice(&a.re.to_le_bytes());
            out.extend_from_slice(&a.im.to_le_bytes());
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos + n;
        let slice = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::format(self.pos as u64, format!("truncated while reading {what}")))?;
        self.pos = end;
        Ok(slice)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().expect("4 bytes")))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().expect("8 bytes")))
    }
}

pub fn decode_dataset(bytes: &[u8]) -> Result<PhaseDataset> {
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(4, "magic")? != QPRD_MAGIC {
        return Err(Error::format(0, "missing QPRD magic"));
    }
    let version = cur.u32("version")?;
    if version != QPRD_VERSION {
        return Err(Error::UnsupportedVersion {
            found: version,
            expected: QPRD_VERSION,
        });
    }
    let model_code = cur.u8("model")?;
    let model = SpinModel::from_code(model_code)
        .ok_or_else(|| Error::format(8, format!("unknown model code {model_code}")))?;
    let rows = cur.u8("rows")? as usize;
    let cols = cur.u8("cols")? as usize;
    let n_classes = cur.u8("n_classes")? as usize;
    let n_records = cur.u32("record count")? as usize;
    let n = rows * cols;
    if n == 0 || n > crate::spin::MAX_ED_QUBITS {
        return Err(Error::format(9, format!("unsupported lattice {rows}x{cols}")));
    }
    if n_classes != model.n_classes() {
        return Err(Error::format(11, format!("{model} datasets have {} classes, header says {n_classes}", model.n_classes())));
    }
    let dim = 1usize << n;
    let record_len = 17 + 16 * dim;
    let expected = QPRD_HEADER_LEN + n_records * record_len;
    if bytes.len() != expected {
        return Err(Error::format(
            bytes.len().min(expected) as u64,
            format!("{n_records} records need {expected} bytes, file has {}", bytes.len()),
        ));
    }
    let mut records = Vec::with_capacity(n_records);
    for _ in 0..n_records {
        let sweep_value = cur.f64("sweep value")?;
        let label_at = cur.pos;
        let label = cur.u8("label")?;
        if label as usize >= n_classes {
            return Err(Error::format(label_at as u64, format!("label {label} out of range")));
        }
        let energy = cur.f64("energy")?;
        let mut amplitudes = Vec::with_capacity(dim);
        for _ in 0..dim {
            let re = cur.f64("amplitude")?;
            let im = cur.f64("amplitude")?;
            amplitudes.push(Complex64::new(re, im));
        }
        records.push(PhaseRecord {
            sweep_value,
            label,
            energy,
            amplitudes,
        });
    }
    Ok(PhaseDataset {
        model,
        rows,
        cols,
        n_classes,
        records,
    })
}

/// Path of the JSON sidecar next to a dataset file.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Write the binary dataset and, when given, its JSON sidecar.
pub fn save_dataset(dataset: &PhaseDataset, path: &Path, sidecar: Option<&serde_json::Value>) -> Result<()> {
    let bytes = encode_dataset(dataset)?;
    write_bytes(path, &bytes)?;
    if let Some(meta) = sidecar {
        write_json(&sidecar_path(path), meta)?;
    }
    Ok(())
}

pub fn load_dataset(path: &Path) -> Result<PhaseDataset> {
    decode_dataset(&read_file(path)?)
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

// ---------------------------------------------------------------------------------------------
// Results

pub const RESULTS_CSV_HEADER: &str = "task,model,lattice,layout,block,layers,variant,seed,test_accuracy";

pub fn results_csv(reports: &[TrainReport]) -> String {
    let mut out = String::from(RESULTS_CSV_HEADER);
    out.push('\n');
    for r in reports {
        let m = &r.meta;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            m.task, m.model, m.lattice, m.layout, m.block, m.layers, m.variant, r.config.seed, r.test_accuracy
        ));
    }
    out
}

/// Lower-triangular 10x10 table of pairwise accuracies; cell `(i, j)` with `i > j` holds the
/// accuracy of the pair `{i, j}`. Pairs trained more than once keep the last report.
pub fn pairwise_matrix_csv(reports: &[TrainReport]) -> String {
    let n = FASHION_CLASSES.len();
    let mut cells = vec![vec![None; n]; n];
    for r in reports {
        if let Some([a, b]) = r.meta.pair {
            let (hi, lo) = if a > b { (a, b) } else { (b, a) };
            if hi < n {
                cells[hi][lo] = Some(r.test_accuracy);
            }
        }
    }
    let mut out = String::from("class");
    for name in FASHION_CLASSES {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (i, row) in cells.iter().enumerate() {
        out.push_str(FASHION_CLASSES[i]);
        for (j, cell) in row.iter().enumerate() {
            out.push(',');
            if j < i {
                if let Some(v) = cell {
                    out.push_str(&v.to_string());
                }
            }
        }
        out.push('\n');
    }
    out
}

pub fn loss_history_csv(report: &TrainReport) -> String {
    let mut out = String::from("iteration,loss,val_accuracy\n");
    let mut val = report.val_accuracy_history.iter().peekable();
    for (i, loss) in report.loss_history.iter().enumerate() {
        let it = i + 1;
        out.push_str(&format!("{it},{loss},"));
        if let Some(p) = val.next_if(|p| p.iteration == it) {
            out.push_str(&p.accuracy.to_string());
        }
        out.push('\n');
    }
    out
}

/// Files produced by [`write_results`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultPaths {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub pairwise: Option<PathBuf>,
}

/// Write the summary CSV at `path`, the full reports as JSON beside it, and a pairwise matrix
/// when any report is an image-pair task.
pub fn write_results(reports: &[TrainReport], path: &Path) -> Result<ResultPaths> {
    if reports.is_empty() {
        return Err(Error::Argument("no reports to write".into()));
    }
    write_bytes(path, results_csv(reports).as_bytes())?;
    let json = path.with_extension("json");
    write_json(&json, reports)?;
    let pairwise = if reports.iter().any(|r| r.meta.pair.is_some()) {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
        let p = path.with_file_name(format!("{stem}_pairwise.csv"));
        write_bytes(&p, pairwise_matrix_csv(reports).as_bytes())?;
        Some(p)
    } else {
        None
    };
    Ok(ResultPaths { csv: path.to_path_buf(), json, pairwise })
}

/// Accepts a bare report, a list of reports, or a bundle with a `reports` array.
pub fn read_reports(path: &Path) -> Result<Vec<TrainReport>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let list = match value {
        serde_json::Value::Object(mut map) if map.contains_key("reports") => map.remove("reports").expect("checked"),
        v => v,
    };
    if list.is_array() {
        Ok(serde_json::from_value(list)?)
    } else {
        Ok(vec![serde_json::from_value(list)?])
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    write_bytes(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx_images(count: u32, pixels: &[u8]) -> Vec<u8> {
        let mut b = Vec::new();
        b.extend_from_slice(&IDX_IMAGES_MAGIC.to_be_bytes());
        b.extend_from_slice(&count.to_be_bytes());
        b.extend_from_slice(&28u32.to_be_bytes());
        b.extend_from_slice(&28u32.to_be_bytes());
        b.extend_from_slice(pixels);
        b
    }

    #[test]
    fn idx_header_checks() {
        let good = idx_images(1, &[7u8; 784]);
        assert_eq!(parse_idx_images(&good).unwrap().0, 1);
        let mut wrong_magic = good.clone();
        wrong_magic[3] = 0x01;
        assert!(matches!(parse_idx_images(&wrong_magic), Err(Error::Format { offset: 0, .. })));
        let truncated = &good[..good.len() - 1];
        assert!(matches!(parse_idx_images(truncated), Err(Error::Format { offset: 799, .. })));
        assert!(matches!(parse_idx_images(&good[..6]), Err(Error::Format { offset: 4, .. })));
    }

    #[test]
    fn constant_and_blank_images() {
        let c = preprocess(&ImageRecord { pixels: vec![200; 784], label: 1 });
        assert!(c.vector.iter().all(|v| (v - 1.0 / 16.0).abs() < 1e-15));
        let z = preprocess(&ImageRecord { pixels: vec![0; 784], label: 1 });
        assert!(z.vector.iter().all(|v| *v == 1.0 / 16.0));
    }

    #[test]
    fn resize_hits_corners() {
        let px: Vec<f64> = (0..784).map(|i| i as f64).collect();
        let r = resize_bilinear(&px, 28, 16);
        assert_eq!(r[0], 0.0);
        assert_eq!(r[15], 27.0);
        assert_eq!(r[255], 783.0);
        // linear ramps are reproduced exactly
        assert!((r[1] - 27.0 / 15.0).abs() < 1e-12);
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar_path(Path::new("out/a.qprd")), PathBuf::from("out/a.qprd.json"));
    }
}

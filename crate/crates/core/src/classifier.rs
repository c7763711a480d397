//! Classification pipelines: state preparation, ansatz, readout decoding, splits and evaluation.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::ansatz::{Circuit, Layout};
use crate::data_io::EncodedImage;
use crate::error::{Error, Result};
use crate::qsim::State;
use crate::seeding::{self, Purpose};
use crate::spin::PhaseDataset;
use crate::variational::{
    self, softmax, Classifier, ExpectationLoss, GradientMethod, LabeledState, RunMeta, TrainConfig, TrainReport,
    PROB_FLOOR,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadoutKind {
    SingleZ,
    TwoQubitAmplitude,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadoutSpec {
    pub kind: ReadoutKind,
    pub qubits: Vec<usize>,
    pub n_classes: usize,
}

impl ReadoutSpec {
    pub fn single_z(qubit: usize) -> Self {
        ReadoutSpec {
            kind: ReadoutKind::SingleZ,
            qubits: vec![qubit],
            n_classes: 2,
        }
    }

    pub fn two_qubit_amplitude(qi: usize, qj: usize, n_classes: usize) -> Result<Self> {
        let spec = ReadoutSpec {
            kind: ReadoutKind::TwoQubitAmplitude,
            qubits: vec![qi, qj],
            n_classes,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Phase readout pair for a 4- or 8-site register.
    pub fn phase_default(n_qubits: usize, n_classes: usize) -> Result<Self> {
        match n_qubits {
            4 => Self::two_qubit_amplitude(1, 2, n_classes),
            8 => Self::two_qubit_amplitude(2, 5, n_classes),
            _ => Err(Error::Size(format!("phase readout is defined for 4 or 8 qubits, got {n_qubits}"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            ReadoutKind::SingleZ => self.qubits.len() == 1 && self.n_classes == 2,
            ReadoutKind::TwoQubitAmplitude => {
                self.qubits.len() == 2 && self.qubits[0] != self.qubits[1] && (2..=4).contains(&self.n_classes)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Argument(format!("inconsistent readout {self:?}")))
        }
    }

    fn check_width(&self, n_qubits: usize) -> Result<()> {
        match self.qubits.iter().find(|&&q| q >= n_qubits) {
            Some(q) => Err(Error::Index(format!("readout qubit {q} on a {n_qubits}-qubit register"))),
            None => Ok(()),
        }
    }
}

pub fn decode_phase_probs(state: &State, readout: &ReadoutSpec) -> Result<Vec<f64>> {
    if readout.kind != ReadoutKind::TwoQubitAmplitude {
        return Err(Error::Argument("phase decoding needs a two-qubit amplitude readout".into()));
    }
    let p = state.two_qubit_basis_probs(readout.qubits[0], readout.qubits[1])?;
    Ok(softmax(&p[..readout.n_classes]))
}

pub fn decode_image_probs(state: &State, readout: &ReadoutSpec) -> Result<Vec<f64>> {
    if readout.kind != ReadoutKind::SingleZ {
        return Err(Error::Argument("image decoding needs a single-Z readout".into()));
    }
    let p0 = (1.0 + state.expectation_z(readout.qubits[0])?) / 2.0;
    Ok(vec![p0, 1.0 - p0])
}

/// Sign of Z_i and Z_j on outcome k of the readout pair (k = 2 b_i + b_j).
fn outcome_signs(k: usize) -> (f64, f64) {
    let s = |bit: usize| if bit == 0 { 1.0 } else { -1.0 };
    (s(k >> 1), s(k & 1))
}

/// Cross-entropy of the softmaxed pair-outcome probabilities, as a function of
/// `(<Z_i>, <Z_j>, <Z_i Z_j>)`.
struct PhaseLoss {
    masks: [usize; 3],
    n_classes: usize,
    label: usize,
}

impl ExpectationLoss for PhaseLoss {
    fn observable_masks(&self) -> Vec<usize> {
        self.masks.to_vec()
    }

    fn evaluate(&self, e: &[f64]) -> Result<(f64, Vec<f64>)> {
        let logits: Vec<f64> = (0..self.n_classes)
            .map(|k| {
                let (si, sj) = outcome_signs(k);
                (1.0 + si * e[0] + sj * e[1] + si * sj * e[2]) / 4.0
            })
            .collect();
        let q = softmax(&logits);
        let value = variational::cross_entropy(&q, self.label)?;
        let mut d = vec![0.0; 3];
        if q[self.label] > PROB_FLOOR {
            for (k, qk) in q.iter().enumerate() {
                let dl = qk - f64::from(u8::from(k == self.label));
                let (si, sj) = outcome_signs(k);
                d[0] += dl * si / 4.0;
                d[1] += dl * sj / 4.0;
                d[2] += dl * si * sj / 4.0;
            }
        }
        Ok((value, d))
    }
}

struct ImageLoss {
    mask: usize,
    label: usize,
}

impl ExpectationLoss for ImageLoss {
    fn observable_masks(&self) -> Vec<usize> {
        vec![self.mask]
    }

    fn evaluate(&self, e: &[f64]) -> Result<(f64, Vec<f64>)> {
        let p0 = (1.0 + e[0]) / 2.0;
        let probs = [p0, 1.0 - p0];
        let value = variational::cross_entropy(&probs, self.label)?;
        let p = probs[self.label];
        let grad = if p > PROB_FLOOR {
            if self.label == 0 {
                -0.5 / p
            } else {
                0.5 / p
            }
        } else {
            0.0
        };
        Ok((value, vec![grad]))
    }
}

/// An ansatz paired with a readout.
#[derive(Clone, Debug, PartialEq)]
pub struct Pipeline {
    pub circuit: Circuit,
    pub readout: ReadoutSpec,
}

impl Pipeline {
    pub fn new(circuit: Circuit, readout: ReadoutSpec) -> Result<Self> {
        readout.validate()?;
        readout.check_width(circuit.n_qubits)?;
        Ok(Pipeline { circuit, readout })
    }

    pub fn decode(&self, state: &State) -> Result<Vec<f64>> {
        match self.readout.kind {
            ReadoutKind::SingleZ => decode_image_probs(state, &self.readout),
            ReadoutKind::TwoQubitAmplitude => decode_phase_probs(state, &self.readout),
        }
    }

    fn loss_for(&self, label: usize) -> Box<dyn ExpectationLoss> {
        let n = self.circuit.n_qubits;
        match self.readout.kind {
            ReadoutKind::SingleZ => Box::new(ImageLoss {
                mask: variational::z_mask(n, &self.readout.qubits),
                label,
            }),
            ReadoutKind::TwoQubitAmplitude => {
                let (i, j) = (self.readout.qubits[0], self.readout.qubits[1]);
                Box::new(PhaseLoss {
                    masks: [
                        variational::z_mask(n, &[i]),
                        variational::z_mask(n, &[j]),
                        variational::z_mask(n, &[i, j]),
                    ],
                    n_classes: self.readout.n_classes,
                    label,
                })
            }
        }
    }

    pub fn loss_value(&self, params: &[f64], sample: &LabeledState) -> Result<f64> {
        variational::loss_value(&self.circuit, params, &sample.input, self.loss_for(sample.label).as_ref())
    }
}

impl Classifier for Pipeline {
    fn n_params(&self) -> usize {
        self.circuit.n_params
    }

    fn n_classes(&self) -> usize {
        self.readout.n_classes
    }

    fn predict_probs(&self, params: &[f64], sample: &LabeledState) -> Result<Vec<f64>> {
        self.decode(&self.circuit.run(params, &sample.input)?)
    }

    fn loss_and_grad(&self, params: &[f64], sample: &LabeledState, method: GradientMethod) -> Result<(f64, Vec<f64>)> {
        if sample.label >= self.readout.n_classes {
            return Err(Error::Argument(format!("label {} with {} classes", sample.label, self.readout.n_classes)));
        }
        variational::gradient(method, &self.circuit, params, &sample.input, self.loss_for(sample.label).as_ref())
    }
}

/// Accuracy of a pipeline on labeled states.
pub fn evaluate(pipeline: &Pipeline, params: &[f64], records: &[LabeledState]) -> Result<f64> {
    variational::accuracy(pipeline, params, records)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub ratios: [u32; 3],
    pub seed: u64,
    pub stratified: bool,
}

impl SplitSpec {
    pub fn new(ratios: [u32; 3], seed: u64) -> Self {
        SplitSpec {
            ratios,
            seed,
            stratified: true,
        }
    }
}

/// Indices into the input, each list in ascending order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

fn proportional(n: usize, ratios: [u32; 3]) -> (usize, usize) {
    let total = f64::from(ratios.iter().sum::<u32>());
    let train = (n as f64 * f64::from(ratios[0]) / total).round() as usize;
    let val = (n as f64 * f64::from(ratios[1]) / total).round() as usize;
    let train = train.min(n);
    (train, val.min(n - train))
}

/// Seeded shuffle (per class when stratified) followed by proportional train/val/test cuts.
pub fn split_dataset(labels: &[usize], spec: &SplitSpec) -> Result<SplitIndices> {
    if spec.ratios.iter().any(|&r| r == 0) {
        return Err(Error::Argument(format!("split ratios must be positive, got {:?}", spec.ratios)));
    }
    let groups: Vec<Vec<usize>> = if spec.stratified {
        let n_classes = labels.iter().max().map_or(0, |m| m + 1);
        (0..n_classes)
            .map(|c| (0..labels.len()).filter(|&i| labels[i] == c).collect::<Vec<_>>())
            .filter(|g| !g.is_empty())
            .collect()
    } else {
        vec![(0..labels.len()).collect()]
    };
    let mut out = SplitIndices {
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
    };
    for (g, mut members) in groups.into_iter().enumerate() {
        let (n_train, n_val) = proportional(members.len(), spec.ratios);
        if n_train == 0 || n_val == 0 || n_train + n_val >= members.len() {
            return Err(Error::Argument(format!(
                "group {g} has {} records, too few for a {:?} split",
                members.len(),
                spec.ratios
            )));
        }
        let mut rng = seeding::stream(spec.seed, Purpose::Split, g as u64);
        members.shuffle(&mut rng);
        out.train.extend_from_slice(&members[..n_train]);
        out.val.extend_from_slice(&members[n_train..n_train + n_val]);
        out.test.extend_from_slice(&members[n_train + n_val..]);
    }
    out.train.sort_unstable();
    out.val.sort_unstable();
    out.test.sort_unstable();
    Ok(out)
}

/// Learning rate used for phase recognition when the config does not set one.
pub fn default_phase_learning_rate(layout: Layout) -> f64 {
    match layout {
        Layout::Ttn => 0.0008,
        _ => 0.002,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseTaskConfig {
    pub split: SplitSpec,
    pub train: TrainConfig,
    /// Replaces the width-based default readout pair.
    pub readout: Option<ReadoutSpec>,
}

impl PhaseTaskConfig {
    pub fn new(layout: Layout, seed: u64) -> Self {
        PhaseTaskConfig {
            split: SplitSpec::new([3, 1, 1], seeding::derive(seed, 0x5350)),
            train: TrainConfig::phase(default_phase_learning_rate(layout), seed),
            readout: None,
        }
    }
}

fn circuit_meta(circuit: &Circuit) -> RunMeta {
    RunMeta {
        layout: match circuit.layout {
            Layout::MeraModified => Layout::Mera.to_string(),
            l => l.to_string(),
        },
        block: circuit.block.map(|b| format!("{b:?}")).unwrap_or_default(),
        layers: circuit.layers,
        variant: match circuit.layout {
            Layout::MeraModified => "modified".into(),
            _ => "standard".into(),
        },
        n_qubits: circuit.n_qubits,
        ..RunMeta::default()
    }
}

pub fn phase_samples(dataset: &PhaseDataset) -> Result<Vec<LabeledState>> {
    dataset
        .records
        .iter()
        .map(|r| {
            Ok(LabeledState {
                input: State::from_amplitudes(r.amplitudes.clone())?,
                label: r.label as usize,
                sweep_value: Some(r.sweep_value),
            })
        })
        .collect()
}

fn pick(samples: &[LabeledState], idx: &[usize]) -> Vec<LabeledState> {
    idx.iter().map(|&i| samples[i].clone()).collect()
}

/// Train a phase classifier on stored ground states.
pub fn phase_pipeline(dataset: &PhaseDataset, circuit: &Circuit, config: &PhaseTaskConfig) -> Result<TrainReport> {
    let n = dataset.n_sites();
    if circuit.n_qubits != n {
        return Err(Error::Shape(format!("{}-qubit ansatz for a {n}-site lattice", circuit.n_qubits)));
    }
    let readout = match &config.readout {
        Some(r) => r.clone(),
        None => ReadoutSpec::phase_default(n, dataset.n_classes)?,
    };
    let pipeline = Pipeline::new(circuit.clone(), readout)?;
    let samples = phase_samples(dataset)?;
    let labels: Vec<usize> = samples.iter().map(|s| s.label).collect();
    let split = split_dataset(&labels, &config.split)?;
    let mut report = variational::train(
        &pipeline,
        &pick(&samples, &split.train),
        &pick(&samples, &split.val),
        &pick(&samples, &split.test),
        &config.train,
    )?;
    let lattice = dataset.lattice()?;
    report.meta = RunMeta {
        task: "phase".into(),
        model: dataset.model.to_string(),
        lattice: lattice.descriptor(),
        ..circuit_meta(circuit)
    };
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageTaskConfig {
    /// Per-class training images drawn from the training corpus.
    pub train_per_class: usize,
    /// Per-class validation images drawn from the rest of the training corpus.
    pub val_per_class: usize,
    /// Per-class test images from the test corpus; `None` uses all of them.
    pub test_per_class: Option<usize>,
    pub readout_qubit: usize,
    pub train: TrainConfig,
}

impl ImageTaskConfig {
    pub fn new(seed: u64) -> Self {
        ImageTaskConfig {
            train_per_class: 2000,
            val_per_class: 400,
            test_per_class: None,
            readout_qubit: 2,
            train: TrainConfig::image(seed),
        }
    }
}

fn subsample_class(images: &[EncodedImage], class: usize, take: usize, chunk: u64, seed: u64) -> Result<Vec<usize>> {
    let mut idx: Vec<usize> = (0..images.len()).filter(|&i| images[i].label as usize == class).collect();
    if idx.len() < take {
        return Err(Error::Argument(format!("class {class} has {} images, {take} requested", idx.len())));
    }
    let mut rng = seeding::stream(seed, Purpose::Subsample, (chunk << 8) | class as u64);
    idx.shuffle(&mut rng);
    idx.truncate(take);
    Ok(idx)
}

fn image_sample(img: &EncodedImage, label: usize) -> Result<LabeledState> {
    Ok(LabeledState {
        input: State::amplitude_encode(&img.vector)?,
        label,
        sweep_value: None,
    })
}

/// Binary classifier for two Fashion-MNIST classes; `class_a` maps to label 0.
pub fn pairwise_image_pipeline(
    class_a: usize,
    class_b: usize,
    circuit: &Circuit,
    train_corpus: &[EncodedImage],
    test_corpus: &[EncodedImage],
    config: &ImageTaskConfig,
) -> Result<TrainReport> {
    if class_a == class_b {
        return Err(Error::Argument(format!("pairwise task needs two distinct classes, got {class_a} twice")));
    }
    if class_a >= 10 || class_b >= 10 {
        return Err(Error::Argument(format!("classes must be in 0..10, got ({class_a}, {class_b})")));
    }
    let pipeline = Pipeline::new(circuit.clone(), ReadoutSpec::single_z(config.readout_qubit))?;
    let seed = config.train.seed;
    let mut train = Vec::new();
    let mut val = Vec::new();
    let mut test = Vec::new();
    for (label, class) in [class_a, class_b].into_iter().enumerate() {
        let picked = subsample_class(
            train_corpus,
            class,
            config.train_per_class + config.val_per_class,
            0,
            seed,
        )?;
        let (tr, va) = picked.split_at(config.train_per_class);
        let mut tr = tr.to_vec();
        let mut va = va.to_vec();
        tr.sort_unstable();
        va.sort_unstable();
        for i in tr {
            train.push((i, image_sample(&train_corpus[i], label)?));
        }
        for i in va {
            val.push((i, image_sample(&train_corpus[i], label)?));
        }
        let mut te: Vec<usize> = match config.test_per_class {
            Some(k) => subsample_class(test_corpus, class, k, 1, seed)?,
            None => (0..test_corpus.len()).filter(|&i| test_corpus[i].label as usize == class).collect(),
        };
        te.sort_unstable();
        for i in te {
            test.push((i, image_sample(&test_corpus[i], label)?));
        }
    }
    // keep corpus order so class blocks are interleaved as in the source files
    let order = |v: &mut Vec<(usize, LabeledState)>| -> Vec<LabeledState> {
        v.sort_by_key(|(i, _)| *i);
        v.drain(..).map(|(_, s)| s).collect()
    };
    let (train, val, test) = (order(&mut train), order(&mut val), order(&mut test));
    let mut report = variational::train(&pipeline, &train, &val, &test, &config.train)?;
    report.meta = RunMeta {
        task: "image".into(),
        model: format!(
            "{} vs {}",
            crate::data_io::FASHION_CLASSES[class_a],
            crate::data_io::FASHION_CLASSES[class_b]
        ),
        lattice: String::new(),
        pair: Some([class_a, class_b]),
        ..circuit_meta(circuit)
    };
    Ok(report)
}

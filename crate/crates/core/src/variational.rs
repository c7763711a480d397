//! Losses, circuit gradients, ADAM, VQE and the mini-batch training loop.

use std::f64::consts::FRAC_PI_2;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::Circuit;
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::qsim::{Axis, Gate, State};
use crate::seeding::{self, Purpose};

/// Probabilities are clamped to this floor before taking a logarithm.
pub const PROB_FLOOR: f64 = 1e-12;

pub fn cross_entropy(probs: &[f64], label: usize) -> Result<f64> {
    let p = *probs
        .get(label)
        .ok_or_else(|| Error::Argument(format!("label {label} out of range for {} classes", probs.len())))?;
    Ok(-p.max(PROB_FLOOR).ln())
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Index of the largest entry; ties go to the lower index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// A loss that sees the output state only through expectations of Z-strings.
///
/// Each observable is a basis-index bitmask selecting the qubits of a product of Z operators.
pub trait ExpectationLoss {
    fn observable_masks(&self) -> Vec<usize>;

    /// Loss value and its derivative with respect to each expectation.
    fn evaluate(&self, expectations: &[f64]) -> Result<(f64, Vec<f64>)>;
}

/// Basis-index mask of a Z-string on the given qubits of an `n`-qubit register.
pub fn z_mask(n_qubits: usize, qubits: &[usize]) -> usize {
    qubits.iter().fold(0, |m, &q| m | (1 << (n_qubits - 1 - q)))
}

fn expectations(state: &State, masks: &[usize]) -> Vec<f64> {
    masks.iter().map(|&m| state.expectation_z_mask(m)).collect()
}

pub fn loss_value(circuit: &Circuit, params: &[f64], input: &State, loss: &dyn ExpectationLoss) -> Result<f64> {
    let out = circuit.run(params, input)?;
    Ok(loss.evaluate(&expectations(&out, &loss.observable_masks()))?.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMethod {
    ParameterShift,
    FiniteDifference,
    /// Reverse-mode sweep over the gate list; same values as the shift rule at ~3 circuit costs.
    #[default]
    Adjoint,
}

pub const FINITE_DIFFERENCE_STEP: f64 = 1e-5;

fn check_unshared_slots(circuit: &Circuit) -> Result<()> {
    let mut seen = vec![false; circuit.n_params];
    for g in &circuit.gates {
        if let Some(s) = g.slot() {
            if s >= seen.len() {
                return Err(Error::Index(format!("slot {s} beyond n_params {}", circuit.n_params)));
            }
            if seen[s] {
                return Err(Error::UnsupportedGate(format!(
                    "slot {s} drives several gates; the shift rule needs one rotation per parameter"
                )));
            }
            seen[s] = true;
        }
    }
    Ok(())
}

/// Shift-rule gradient: each expectation is differentiated by `(e(θ+π/2) - e(θ-π/2)) / 2` and
/// chained through the loss.
pub fn parameter_shift_gradient(
    circuit: &Circuit,
    params: &[f64],
    input: &State,
    loss: &dyn ExpectationLoss,
) -> Result<(f64, Vec<f64>)> {
    check_unshared_slots(circuit)?;
    let masks = loss.observable_masks();
    let out = circuit.run(params, input)?;
    let (value, dl_de) = loss.evaluate(&expectations(&out, &masks))?;
    let mut shifted = params.to_vec();
    let mut grad = vec![0.0; params.len()];
    for k in 0..params.len() {
        shifted[k] = params[k] + FRAC_PI_2;
        let plus = expectations(&circuit.run(&shifted, input)?, &masks);
        shifted[k] = params[k] - FRAC_PI_2;
        let minus = expectations(&circuit.run(&shifted, input)?, &masks);
        shifted[k] = params[k];
        grad[k] = dl_de
            .iter()
            .zip(plus.iter().zip(&minus))
            .map(|(d, (p, m))| d * (p - m) / 2.0)
            .sum();
    }
    Ok((value, grad))
}

/// Central differences of the loss itself.
pub fn finite_difference_gradient(
    circuit: &Circuit,
    params: &[f64],
    input: &State,
    loss: &dyn ExpectationLoss,
    step: f64,
) -> Result<(f64, Vec<f64>)> {
    let value = loss_value(circuit, params, input, loss)?;
    let mut shifted = params.to_vec();
    let mut grad = vec![0.0; params.len()];
    for k in 0..params.len() {
        shifted[k] = params[k] + step;
        let plus = loss_value(circuit, &shifted, input, loss)?;
        shifted[k] = params[k] - step;
        let minus = loss_value(circuit, &shifted, input, loss)?;
        shifted[k] = params[k];
        grad[k] = (plus - minus) / (2.0 * step);
    }
    Ok((value, grad))
}

/// Reverse-mode gradient. With `M = sum_m (dL/de_m) O_m` and `lambda = M psi`, each rotation
/// `exp(-i θ P / 2)` contributes `Im <lambda_g | P | psi_g>` where both vectors are taken just
/// after the gate.
pub fn adjoint_gradient(
    circuit: &Circuit,
    params: &[f64],
    input: &State,
    loss: &dyn ExpectationLoss,
) -> Result<(f64, Vec<f64>)> {
    let masks = loss.observable_masks();
    let mut psi = circuit.run(params, input)?;
    let (value, dl_de) = loss.evaluate(&expectations(&psi, &masks))?;

    let diag: Vec<f64> = (0..psi.dim())
        .map(|b| {
            masks
                .iter()
                .zip(&dl_de)
                .map(|(&m, d)| if (b & m).count_ones() % 2 == 0 { *d } else { -*d })
                .sum()
        })
        .collect();
    let mut lambda = psi.clone();
    lambda.scale_diagonal(&diag);

    let mut grad = vec![0.0; params.len()];
    for g in circuit.gates.iter().rev() {
        match *g {
            Gate::Rotation { axis, qubit, .. } => {
                let theta = g.resolve_angle(params)?.unwrap_or_default();
                if let Some(slot) = g.slot() {
                    let mut p_psi = psi.clone();
                    p_psi.apply_pauli(axis, qubit);
                    grad[slot] += crate::qsim::inner_product(lambda.amplitudes(), p_psi.amplitudes()).im;
                }
                psi.apply_rotation(axis, qubit, -theta);
                lambda.apply_rotation(axis, qubit, -theta);
            }
            Gate::Cnot { control, target } => {
                psi.apply_cnot(control, target);
                lambda.apply_cnot(control, target);
            }
        }
    }
    Ok((value, grad))
}

pub fn gradient(
    method: GradientMethod,
    circuit: &Circuit,
    params: &[f64],
    input: &State,
    loss: &dyn ExpectationLoss,
) -> Result<(f64, Vec<f64>)> {
    match method {
        GradientMethod::ParameterShift => parameter_shift_gradient(circuit, params, input, loss),
        GradientMethod::FiniteDifference => {
            finite_difference_gradient(circuit, params, input, loss, FINITE_DIFFERENCE_STEP)
        }
        GradientMethod::Adjoint => adjoint_gradient(circuit, params, input, loss),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamHyper {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamHyper {
    pub fn with_learning_rate(learning_rate: f64) -> Self {
        AdamHyper {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub step_count: u64,
    pub first_moment: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub hyper: AdamHyper,
}

impl AdamState {
    pub fn new(n_params: usize, hyper: AdamHyper) -> Self {
        AdamState {
            step_count: 0,
            first_moment: vec![0.0; n_params],
            second_moment: vec![0.0; n_params],
            hyper,
        }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        if params.len() != self.first_moment.len() || grads.len() != params.len() {
            return Err(Error::Shape(format!(
                "ADAM state sized {} given {} params and {} grads",
                self.first_moment.len(),
                params.len(),
                grads.len()
            )));
        }
        let AdamHyper { learning_rate, beta1, beta2, epsilon } = self.hyper;
        self.step_count += 1;
        let t = self.step_count as i32;
        let c1 = 1.0 - beta1.powi(t);
        let c2 = 1.0 - beta2.powi(t);
        for i in 0..params.len() {
            let g = grads[i];
            self.first_moment[i] = beta1 * self.first_moment[i] + (1.0 - beta1) * g;
            self.second_moment[i] = beta2 * self.second_moment[i] + (1.0 - beta2) * g * g;
            let m_hat = self.first_moment[i] / c1;
            let v_hat = self.second_moment[i] / c2;
            params[i] -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
        }
        Ok(())
    }
}

/// Uniform initial parameters in `[-scale, scale]`.
pub fn init_params(n: usize, scale: f64, seed: u64, index: u64) -> Vec<f64> {
    let mut rng = seeding::stream(seed, Purpose::Init, index);
    (0..n)
        .map(|_| if scale > 0.0 { rng.gen_range(-scale..=scale) } else { 0.0 })
        .collect()
}

// ---------------------------------------------------------------------------------------------
// VQE

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeConfig {
    pub iterations: usize,
    pub learning_rate: f64,
    pub restarts: usize,
    /// Half-width of the uniform initial-angle window; restarts only differ meaningfully when
    /// this is of order pi.
    pub init_scale: f64,
    pub seed: u64,
}

impl VqeConfig {
    pub fn new(seed: u64) -> Self {
        VqeConfig {
            iterations: 2000,
            learning_rate: 0.01,
            restarts: 3,
            init_scale: std::f64::consts::PI,
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    pub energy: f64,
    pub params: Vec<f64>,
    /// Energy at every iteration of every restart, restart-major.
    pub energy_history: Vec<Vec<f64>>,
    pub best_restart: usize,
}

pub fn energy(circuit: &Circuit, params: &[f64], h: &Hamiltonian) -> Result<f64> {
    circuit.run_from_zero(params)?.expectation(h)
}

/// Shift-rule gradient of `<psi(θ)|H|psi(θ)>`.
pub fn energy_gradient(circuit: &Circuit, params: &[f64], h: &Hamiltonian) -> Result<Vec<f64>> {
    check_unshared_slots(circuit)?;
    let mut shifted = params.to_vec();
    let mut grad = vec![0.0; params.len()];
    for k in 0..params.len() {
        shifted[k] = params[k] + FRAC_PI_2;
        let plus = energy(circuit, &shifted, h)?;
        shifted[k] = params[k] - FRAC_PI_2;
        let minus = energy(circuit, &shifted, h)?;
        shifted[k] = params[k];
        grad[k] = (plus - minus) / 2.0;
    }
    Ok(grad)
}

/// Minimize the energy with ADAM from `restarts` random starts; keep the lowest energy seen.
pub fn vqe_ground_state(h: &Hamiltonian, ansatz: &Circuit, config: &VqeConfig) -> Result<VqeResult> {
    if ansatz.n_qubits != h.n_qubits() {
        return Err(Error::Shape(format!(
            "{}-qubit ansatz for a {}-qubit Hamiltonian",
            ansatz.n_qubits,
            h.n_qubits()
        )));
    }
    if config.restarts == 0 || config.iterations == 0 {
        return Err(Error::Argument("VQE needs at least one restart and one iteration".into()));
    }
    let mut best: Option<(f64, Vec<f64>, usize)> = None;
    let mut history = Vec::with_capacity(config.restarts);
    for r in 0..config.restarts {
        let mut params = init_params(ansatz.n_params, config.init_scale, seeding::derive(config.seed, 0x5645), r as u64);
        let mut adam = AdamState::new(ansatz.n_params, AdamHyper::with_learning_rate(config.learning_rate));
        let mut trace = Vec::with_capacity(config.iterations);
        for _ in 0..config.iterations {
            let e = energy(ansatz, &params, h)?;
            trace.push(e);
            if best.as_ref().map_or(true, |(b, _, _)| e < *b) {
                best = Some((e, params.clone(), r));
            }
            let g = energy_gradient(ansatz, &params, h)?;
            adam.step(&mut params, &g)?;
        }
        let e = energy(ansatz, &params, h)?;
        if best.as_ref().map_or(true, |(b, _, _)| e < *b) {
            best = Some((e, params.clone(), r));
        }
        history.push(trace);
    }
    let (energy, params, best_restart) = best.expect("at least one iteration ran");
    Ok(VqeResult {
        energy,
        params,
        energy_history: history,
        best_restart,
    })
}

// ---------------------------------------------------------------------------------------------
// Training

/// Model input: a prepared state with its class and an optional sweep coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledState {
    pub input: State,
    pub label: usize,
    pub sweep_value: Option<f64>,
}

/// A parametrized classifier that [`train`] can optimize.
pub trait Classifier: Sync {
    fn n_params(&self) -> usize;
    fn n_classes(&self) -> usize;
    fn predict_probs(&self, params: &[f64], sample: &LabeledState) -> Result<Vec<f64>>;
    fn loss_and_grad(&self, params: &[f64], sample: &LabeledState, method: GradientMethod) -> Result<(f64, Vec<f64>)>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    Iterations(usize),
    /// Full passes over the training split, `ceil(n_train / batch_size)` updates each.
    Epochs(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    #[default]
    CrossEntropy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub schedule: Schedule,
    pub seed: u64,
    #[serde(default)]
    pub loss: LossKind,
    #[serde(default)]
    pub gradient: GradientMethod,
    pub val_every: usize,
    pub init_scale: f64,
}

impl TrainConfig {
    /// Phase-recognition defaults: batch 8, 2000 updates.
    pub fn phase(learning_rate: f64, seed: u64) -> Self {
        TrainConfig {
            batch_size: 8,
            learning_rate,
            schedule: Schedule::Iterations(2000),
            seed,
            loss: LossKind::CrossEntropy,
            gradient: GradientMethod::Adjoint,
            val_every: 50,
            init_scale: 0.1,
        }
    }

    /// Image defaults: lr 0.01, batch 20, 40 epochs.
    pub fn image(seed: u64) -> Self {
        TrainConfig {
            batch_size: 20,
            learning_rate: 0.01,
            schedule: Schedule::Epochs(40),
            ..Self::phase(0.01, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be >= 1".into()));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("learning_rate must be finite and >= 0, got {}", self.learning_rate)));
        }
        if self.val_every == 0 {
            return Err(Error::Config("val_every must be >= 1".into()));
        }
        Ok(())
    }

    pub fn iterations(&self, n_train: usize) -> usize {
        match self.schedule {
            Schedule::Iterations(n) => n,
            Schedule::Epochs(e) => e * n_train.div_ceil(self.batch_size),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationPoint {
    pub iteration: usize,
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub sweep_value: Option<f64>,
    pub label: usize,
    pub probs: Vec<f64>,
}

/// What was trained, for result tables.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct RunMeta {
    pub task: String,
    pub model: String,
    pub lattice: String,
    pub layout: String,
    pub block: String,
    pub layers: usize,
    pub variant: String,
    pub n_qubits: usize,
    /// Original class indices of a pairwise image task.
    pub pair: Option<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub meta: RunMeta,
    pub config: TrainConfig,
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    pub iterations: usize,
    pub loss_history: Vec<f64>,
    pub val_accuracy_history: Vec<ValidationPoint>,
    pub best_iteration: usize,
    pub best_val_accuracy: f64,
    pub final_params: Vec<f64>,
    pub test_accuracy: f64,
    pub test_predictions: Vec<Prediction>,
}

pub fn predictions(model: &dyn Classifier, params: &[f64], records: &[LabeledState]) -> Result<Vec<Prediction>> {
    records
        .par_iter()
        .map(|r| {
            Ok(Prediction {
                sweep_value: r.sweep_value,
                label: r.label,
                probs: model.predict_probs(params, r)?,
            })
        })
        .collect()
}

/// Fraction of records whose argmax prediction equals the label.
pub fn accuracy(model: &dyn Classifier, params: &[f64], records: &[LabeledState]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::Argument("cannot evaluate on an empty record set".into()));
    }
    let hits = records
        .par_iter()
        .map(|r| Ok(usize::from(argmax(&model.predict_probs(params, r)?) == r.label)))
        .collect::<Result<Vec<usize>>>()?;
    Ok(hits.iter().sum::<usize>() as f64 / records.len() as f64)
}

/// Mean loss and gradient over a batch, accumulated in batch order.
pub fn batch_loss_and_grad(
    model: &dyn Classifier,
    params: &[f64],
    batch: &[&LabeledState],
    method: GradientMethod,
) -> Result<(f64, Vec<f64>)> {
    let parts = batch
        .par_iter()
        .map(|s| model.loss_and_grad(params, s, method))
        .collect::<Result<Vec<_>>>()?;
    let mut grad = vec![0.0; params.len()];
    let mut loss = 0.0;
    for (l, g) in &parts {
        loss += l;
        for (acc, v) in grad.iter_mut().zip(g) {
            *acc += v;
        }
    }
    let n = batch.len() as f64;
    grad.iter_mut().for_each(|v| *v /= n);
    Ok((loss / n, grad))
}

struct BatchSampler {
    n: usize,
    seed: u64,
    epoch: u64,
    order: Vec<usize>,
    cursor: usize,
}

impl BatchSampler {
    fn new(n: usize, seed: u64) -> Self {
        let mut s = BatchSampler {
            n,
            seed,
            epoch: 0,
            order: Vec::new(),
            cursor: 0,
        };
        s.reshuffle();
        s
    }

    fn reshuffle(&mut self) {
        self.order = (0..self.n).collect();
        let mut rng = seeding::stream(self.seed, Purpose::Batches, self.epoch);
        self.order.shuffle(&mut rng);
        self.epoch += 1;
        self.cursor = 0;
    }

    fn next_batch(&mut self, size: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(size);
        while out.len() < size {
            if self.cursor == self.n {
                self.reshuffle();
            }
            out.push(self.order[self.cursor]);
            self.cursor += 1;
        }
        out
    }
}

/// Mini-batch ADAM loop. Validation accuracy is measured every `val_every` updates and after the
/// last one; the parameters with the best validation accuracy (earliest on ties) are scored on
/// the test split.
pub fn train(
    model: &dyn Classifier,
    train_set: &[LabeledState],
    val_set: &[LabeledState],
    test_set: &[LabeledState],
    config: &TrainConfig,
) -> Result<TrainReport> {
    config.validate()?;
    if train_set.is_empty() || val_set.is_empty() || test_set.is_empty() {
        return Err(Error::Argument("train, validation and test splits must all be nonempty".into()));
    }
    let n_params = model.n_params();
    let mut params = init_params(n_params, config.init_scale, config.seed, 0);
    let mut adam = AdamState::new(n_params, AdamHyper::with_learning_rate(config.learning_rate));
    let iterations = config.iterations(train_set.len());
    let mut sampler = BatchSampler::new(train_set.len(), config.seed);

    let mut loss_history = Vec::with_capacity(iterations);
    let mut val_history = Vec::new();
    let mut best = (f64::NEG_INFINITY, 0usize, params.clone());

    for it in 1..=iterations {
        let idx = sampler.next_batch(config.batch_size.min(train_set.len()));
        let batch: Vec<&LabeledState> = idx.iter().map(|&i| &train_set[i]).collect();
        let (loss, grad) = batch_loss_and_grad(model, &params, &batch, config.gradient)?;
        loss_history.push(loss);
        adam.step(&mut params, &grad)?;

        if it % config.val_every == 0 || it == iterations {
            let acc = accuracy(model, &params, val_set)?;
            val_history.push(ValidationPoint { iteration: it, accuracy: acc });
            if acc > best.0 {
                best = (acc, it, params.clone());
            }
        }
    }
    if iterations == 0 {
        best = (accuracy(model, &params, val_set)?, 0, params.clone());
    }

    let (best_val, best_iteration, best_params) = best;
    let test_accuracy = accuracy(model, &best_params, test_set)?;
    let test_predictions = predictions(model, &best_params, test_set)?;
    Ok(TrainReport {
        meta: RunMeta::default(),
        config: config.clone(),
        n_train: train_set.len(),
        n_val: val_set.len(),
        n_test: test_set.len(),
        iterations,
        loss_history,
        val_accuracy_history: val_history,
        best_iteration,
        best_val_accuracy: best_val,
        final_params: best_params,
        test_accuracy,
        test_predictions,
    })
}

/// Rotation axes used by a circuit, handy for checking shift-rule applicability.
pub fn rotation_axes(circuit: &Circuit) -> Vec<Axis> {
    circuit
        .gates
        .iter()
        .filter_map(|g| match g {
            Gate::Rotation { axis, .. } => Some(*axis),
            _ => None,
        })
        .collect()
}

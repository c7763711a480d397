//! Config-driven experiment runner behind the `tnvqc` binary.
//!
//! Every subcommand reads one JSON config, fills defaults, and writes its artifacts plus a JSON
//! copy of the resolved config into the output directory. Nothing depends on wall-clock time,
//! so reruns with the same config and seed are byte-identical.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::{self, AnalysisReport, SamplingConfig};
use crate::ansatz::{self, BlockKind, Circuit, Layout, MeraVariant};
use crate::classifier::{self, ImageTaskConfig, PhaseTaskConfig, ReadoutSpec, SplitSpec};
use crate::data_io::{self, EncodedImage};
use crate::error::{Error, Result};
use crate::seeding;
use crate::spin::{self, LatticeKind, PhaseDataset, SpinModel};
use crate::variational::{self, GradientMethod, Schedule, TrainReport, VqeConfig};

#[derive(Debug, Parser)]
#[command(name = "tnvqc", version, about = "Tensor-network variational circuit experiments")]
pub struct Cli {
    /// JSON experiment config; omitted fields take their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Root seed, overriding the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Also write the gate list of every circuit built.
    #[arg(long, global = true)]
    pub dump_circuit: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expressibility and entangling capability sweep.
    Analyze,
    /// Generate a labeled ground-state dataset.
    GenData,
    /// Train a phase classifier.
    TrainPhase,
    /// Train pairwise Fashion-MNIST classifiers.
    TrainImage {
        /// Training IDX images file.
        #[arg(long)]
        images: Option<PathBuf>,
        /// Training IDX labels file.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Test IDX images file
        #[arg(long)]
        test_images: Option<PathBuf>,
        /// Test IDX labels file
        #[arg(long)]
        test_labels: Option<PathBuf>,
    },
    /// Variational ground-state search compared against exact diagonalization.
    Vqe,
    /// Aggregate report JSON files into tables and plot data.
    Report {
        /// Report JSON files written by train-phase or train-image.
        paths: Vec<PathBuf>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSpec {
    pub layout: Layout,
    pub block: BlockKind,
    pub layers: usize,
}

impl Default for AnsatzSpec {
    fn default() -> Self {
        AnsatzSpec {
            layout: Layout::Mera,
            block: BlockKind::U,
            layers: 1,
        }
    }
}

impl AnsatzSpec {
    pub fn build(&self, n_qubits: usize) -> Result<Circuit> {
        match self.layout {
            Layout::Ttn => ansatz::build_ttn(n_qubits, self.block, self.layers),
            Layout::Mera => ansatz::build_mera(n_qubits, self.block, self.layers, MeraVariant::Standard),
            Layout::MeraModified => ansatz::build_mera(n_qubits, self.block, self.layers, MeraVariant::Modified),
            Layout::Hwe => ansatz::build_hardware_efficient(n_qubits, self.layers),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeConfig {
    pub n_qubits: usize,
    pub layouts: Vec<Layout>,
    pub blocks: Vec<BlockKind>,
    pub layers: Vec<usize>,
    pub n_samples: usize,
    pub n_bins: usize,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig {
            n_qubits: 8,
            layouts: vec![Layout::Ttn, Layout::Mera],
            blocks: vec![BlockKind::U, BlockKind::V],
            layers: (1..=5).collect(),
            n_samples: analysis::DEFAULT_SAMPLES,
            n_bins: analysis::DEFAULT_BINS,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub model: SpinModel,
    pub rows: usize,
    pub cols: usize,
    pub n_points: usize,
    /// Dataset file; relative paths resolve against the output directory.
    pub file: Option<PathBuf>,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            model: SpinModel::Tfim,
            rows: 1,
            cols: 8,
            n_points: 1000,
            file: None,
        }
    }
}

impl DataConfig {
    fn lattice(&self) -> Result<spin::Lattice> {
        let kind = if self.rows == 1 { LatticeKind::Chain } else { LatticeKind::Rectangular };
        spin::build_lattice(kind, self.rows, self.cols)
    }

    fn default_file_name(&self) -> String {
        format!("{}_{}x{}.qprd", self.model.to_string().to_lowercase(), self.rows, self.cols)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseConfig {
    /// Existing dataset to train on; generated from the `data` block when absent.
    pub dataset: Option<PathBuf>,
    pub ansatz: AnsatzSpec,
    /// Defaults to 0.002 for MERA layouts and 0.0008 for TTN.
    pub learning_rate: Option<f64>,
    pub batch_size: usize,
    pub iterations: usize,
    pub split_ratios: [u32; 3],
    pub readout: Option<ReadoutSpec>,
    pub gradient: GradientMethod,
    pub val_every: usize,
    pub init_scale: f64,
}

impl Default for PhaseConfig {
    fn default() -> Self {
        PhaseConfig {
            dataset: None,
            ansatz: AnsatzSpec::default(),
            learning_rate: None,
            batch_size: 8,
            iterations: 2000,
            split_ratios: [3, 1, 1],
            readout: None,
            gradient: GradientMethod::Adjoint,
            val_every: 50,
            init_scale: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImageConfig {
    pub data_dir: PathBuf,
    /// Class index pairs; the first of each pair is label 0.
    pub pairs: Vec<[usize; 2]>,
    pub ansatz: AnsatzSpec,
    pub train_per_class: usize,
    pub val_per_class: usize,
    pub test_per_class: Option<usize>,
    pub readout_qubit: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub gradient: GradientMethod,
    pub val_every: usize,
    pub init_scale: f64,
}

impl Default for ImageConfig {
    fn default() -> Self {
        ImageConfig {
            data_dir: PathBuf::from("data/fashion-mnist"),
            pairs: vec![[4, 6]],
            ansatz: AnsatzSpec::default(),
            train_per_class: 2000,
            val_per_class: 400,
            test_per_class: None,
            readout_qubit: 2,
            learning_rate: 0.01,
            batch_size: 20,
            epochs: 40,
            gradient: GradientMethod::Adjoint,
            val_every: 50,
            init_scale: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VqeCliConfig {
    pub model: SpinModel,
    pub rows: usize,
    pub cols: usize,
    /// Transverse field for TFIM, anisotropy for XXZ.
    pub value: f64,
    pub depth: usize,
    pub iterations: usize,
    pub learning_rate: f64,
    pub restarts: usize,
    pub init_scale: f64,
}

impl Default for VqeCliConfig {
    fn default() -> Self {
        let d = VqeConfig::new(0);
        VqeCliConfig {
            model: SpinModel::Tfim,
            rows: 1,
            cols: 4,
            value: 1.0,
            depth: 3,
            iterations: d.iterations,
            learning_rate: d.learning_rate,
            restarts: d.restarts,
            init_scale: d.init_scale,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    pub inputs: Vec<PathBuf>,
}

/// The whole config file. Only `seed` is mandatory (here or via `--seed`).
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    pub analyze: AnalyzeConfig,
    pub data: DataConfig,
    pub phase: PhaseConfig,
    pub image: ImageConfig,
    pub vqe: VqeCliConfig,
    pub report: ReportConfig,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::Config("no seed given; set \"seed\" in the config or pass --seed".into()))
    }
}

/// Resolved run context shared by the subcommands.
pub struct Run {
    pub config: ExperimentConfig,
    pub out: PathBuf,
    pub dump_circuit: bool,
}

impl Run {
    pub fn new(config: ExperimentConfig, out: PathBuf, seed_override: Option<u64>, dump_circuit: bool) -> Result<Self> {
        let mut config = config;
        if seed_override.is_some() {
            config.seed = seed_override;
        }
        config.seed()?;
        Ok(Run {
            config,
            out,
            dump_circuit,
        })
    }

    fn seed(&self) -> u64 {
        self.config.seed.expect("checked in Run::new")
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.out.join(p)
        }
    }

    fn dump(&self, name: &str, circuit: &Circuit) -> Result<()> {
        if self.dump_circuit {
            data_io::write_text(&self.path(name), &circuit.to_text())?;
        }
        Ok(())
    }

    fn write_config_echo(&self, name: &str) -> Result<()> {
        data_io::write_json(&self.path(name), &self.config)
    }
}

/// An artifact bundle: the resolved config next to a payload.
#[derive(Serialize)]
struct Echo<'a, T: Serialize> {
    config: &'a ExperimentConfig,
    #[serde(flatten)]
    payload: T,
}

pub fn cmd_analyze(run: &Run) -> Result<Vec<AnalysisReport>> {
    let cfg = &run.config.analyze;
    if cfg.layouts.is_empty() || cfg.blocks.is_empty() || cfg.layers.is_empty() {
        return Err(Error::Config("analyze needs at least one layout, block and layer count".into()));
    }
    let sampling = SamplingConfig {
        n_samples: cfg.n_samples,
        n_bins: cfg.n_bins,
        seed: run.seed(),
    };
    let mut reports = Vec::new();
    for &layout in &cfg.layouts {
        for &block in &cfg.blocks {
            for &layers in &cfg.layers {
                let spec = AnsatzSpec { layout, block, layers };
                let circuit = spec.build(cfg.n_qubits)?;
                run.dump(&format!("circuit_{layout}_{block}_L{layers}.txt"), &circuit)?;
                let report = analysis::analyze(&circuit, &sampling)?;
                log::info!(
                    "{layout}-{block} L={layers}: expr {:.4} Q {:.4}",
                    report.expressibility,
                    report.entangling_capability
                );
                reports.push(report);
            }
        }
    }
    let mut csv = String::from(analysis::REPORT_CSV_HEADER);
    csv.push('\n');
    for r in &reports {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    data_io::write_text(&run.path("analysis.csv"), &csv)?;
    #[derive(Serialize)]
    struct Payload<'a> {
        reports: &'a [AnalysisReport],
    }
    data_io::write_json(
        &run.path("analysis.json"),
        &Echo {
            config: &run.config,
            payload: Payload { reports: &reports },
        },
    )?;
    Ok(reports)
}

fn dataset_path(run: &Run) -> PathBuf {
    let d = &run.config.data;
    match &d.file {
        Some(f) => run.resolve(f),
        None => run.path(&d.default_file_name()),
    }
}

pub fn cmd_gen_data(run: &Run) -> Result<PathBuf> {
    let d = &run.config.data;
    let lattice = d.lattice()?;
    let dataset = spin::generate_phase_dataset(d.model, &lattice, d.n_points, seeding::derive(run.seed(), 0x4441))?;
    let path = dataset_path(run);
    let sidecar = serde_json::to_value(&Echo {
        config: &run.config,
        payload: BTreeMap::from([("n_records", dataset.records.len())]),
    })?;
    data_io::save_dataset(&dataset, &path, Some(&sidecar))?;
    log::info!("wrote {} records to {}", dataset.records.len(), path.display());
    Ok(path)
}

fn phase_probability_csv(report: &TrainReport) -> String {
    let n_classes = report.test_predictions.first().map_or(2, |p| p.probs.len());
    let mut out = String::from("sweep_value");
    for k in 1..n_classes {
        out.push_str(&format!(",p_class{k}"));
    }
    out.push('\n');
    let mut rows: Vec<_> = report.test_predictions.iter().collect();
    rows.sort_by(|a, b| a.sweep_value.unwrap_or(0.0).total_cmp(&b.sweep_value.unwrap_or(0.0)));
    for p in rows {
        out.push_str(&p.sweep_value.map(|v| v.to_string()).unwrap_or_default());
        for v in &p.probs[1..] {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}

fn write_report_bundle(run: &Run, stem: &str, reports: &[TrainReport]) -> Result<()> {
    data_io::write_results(reports, &run.path(&format!("{stem}_results.csv")))?;
    for (k, r) in reports.iter().enumerate() {
        let suffix = if reports.len() == 1 { String::new() } else { format!("_{k}") };
        data_io::write_text(&run.path(&format!("{stem}_loss{suffix}.csv")), &data_io::loss_history_csv(r))?;
    }
    #[derive(Serialize)]
    struct Payload<'a> {
        reports: &'a [TrainReport],
    }
    data_io::write_json(
        &run.path(&format!("{stem}_report.json")),
        &Echo {
            config: &run.config,
            payload: Payload { reports },
        },
    )
}

pub fn cmd_train_phase(run: &Run) -> Result<TrainReport> {
    let p = &run.config.phase;
    let dataset: PhaseDataset = match &p.dataset {
        Some(path) => data_io::load_dataset(&run.resolve(path))?,
        None => {
            let d = &run.config.data;
            spin::generate_phase_dataset(d.model, &d.lattice()?, d.n_points, seeding::derive(run.seed(), 0x4441))?
        }
    };
    let circuit = p.ansatz.build(dataset.n_sites())?;
    run.dump("circuit_phase.txt", &circuit)?;
    let mut task = PhaseTaskConfig::new(p.ansatz.layout, run.seed());
    task.split = SplitSpec::new(p.split_ratios, seeding::derive(run.seed(), 0x5350));
    task.readout = p.readout.clone();
    task.train.learning_rate = p
        .learning_rate
        .unwrap_or_else(|| classifier::default_phase_learning_rate(p.ansatz.layout));
    task.train.batch_size = p.batch_size;
    task.train.schedule = Schedule::Iterations(p.iterations);
    task.train.gradient = p.gradient;
    task.train.val_every = p.val_every;
    task.train.init_scale = p.init_scale;
    let report = classifier::phase_pipeline(&dataset, &circuit, &task)?;
    log::info!("phase test accuracy {:.4}", report.test_accuracy);
    write_report_bundle(run, "phase", std::slice::from_ref(&report))?;
    data_io::write_text(&run.path("phase_probabilities.csv"), &phase_probability_csv(&report))?;
    Ok(report)
}

/// IDX file locations for the image task.
#[derive(Clone, Debug, Default)]
pub struct ImagePaths {
    pub images: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub test_images: Option<PathBuf>,
    pub test_labels: Option<PathBuf>,
}

fn load_corpus(images: &Path, labels: &Path) -> Result<Vec<EncodedImage>> {
    Ok(data_io::preprocess_all(&data_io::load_idx(images, labels)?))
}

pub fn cmd_train_image(run: &Run, paths: &ImagePaths) -> Result<Vec<TrainReport>> {
    let c = &run.config.image;
    if c.pairs.is_empty() {
        return Err(Error::Config("image.pairs is empty".into()));
    }
    let dir = &c.data_dir;
    let pick = |p: &Option<PathBuf>, name: &str| p.clone().unwrap_or_else(|| dir.join(name));
    let train_corpus = load_corpus(
        &pick(&paths.images, "train-images-idx3-ubyte"),
        &pick(&paths.labels, "train-labels-idx1-ubyte"),
    )?;
    let test_corpus = load_corpus(
        &pick(&paths.test_images, "t10k-images-idx3-ubyte"),
        &pick(&paths.test_labels, "t10k-labels-idx1-ubyte"),
    )?;
    let circuit = c.ansatz.build(8)?;
    run.dump("circuit_image.txt", &circuit)?;
    let mut task = ImageTaskConfig::new(run.seed());
    task.train_per_class = c.train_per_class;
    task.val_per_class = c.val_per_class;
    task.test_per_class = c.test_per_class;
    task.readout_qubit = c.readout_qubit;
    task.train.learning_rate = c.learning_rate;
    task.train.batch_size = c.batch_size;
    task.train.schedule = Schedule::Epochs(c.epochs);
    task.train.gradient = c.gradient;
    task.train.val_every = c.val_every;
    task.train.init_scale = c.init_scale;
    let mut reports = Vec::with_capacity(c.pairs.len());
    for &[a, b] in &c.pairs {
        let r = classifier::pairwise_image_pipeline(a, b, &circuit, &train_corpus, &test_corpus, &task)?;
        log::info!("pair ({a}, {b}) test accuracy {:.4}", r.test_accuracy);
        reports.push(r);
    }
    write_report_bundle(run, "image", &reports)?;
    Ok(reports)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeSummary {
    pub model: String,
    pub lattice: String,
    pub value: f64,
    pub ed_energy: f64,
    pub vqe_energy: f64,
    pub abs_error: f64,
    pub best_restart: usize,
    pub params: Vec<f64>,
}

pub fn cmd_vqe(run: &Run) -> Result<VqeSummary> {
    let v = &run.config.vqe;
    let kind = if v.rows == 1 { LatticeKind::Chain } else { LatticeKind::Rectangular };
    let lattice = spin::build_lattice(kind, v.rows, v.cols)?;
    let h = v.model.hamiltonian(&lattice, v.value)?;
    let (ed_energy, _) = spin::ground_state_ed(&h)?;
    let circuit = ansatz::build_hardware_efficient(lattice.n_sites(), v.depth)?;
    run.dump("circuit_vqe.txt", &circuit)?;
    let cfg = VqeConfig {
        iterations: v.iterations,
        learning_rate: v.learning_rate,
        restarts: v.restarts,
        init_scale: v.init_scale,
        seed: run.seed(),
    };
    let result = variational::vqe_ground_state(&h, &circuit, &cfg)?;
    let summary = VqeSummary {
        model: v.model.to_string(),
        lattice: lattice.descriptor(),
        value: v.value,
        ed_energy,
        vqe_energy: result.energy,
        abs_error: (result.energy - ed_energy).abs(),
        best_restart: result.best_restart,
        params: result.params.clone(),
    };
    println!(
        "{} {} value={}: VQE {:.8}  ED {:.8}  |diff| {:.3e}",
        summary.model, summary.lattice, summary.value, summary.vqe_energy, summary.ed_energy, summary.abs_error
    );
    data_io::write_json(
        &run.path("vqe.json"),
        &Echo {
            config: &run.config,
            payload: &summary,
        },
    )?;
    let mut trace = String::from("restart,iteration,energy\n");
    for (r, hist) in result.energy_history.iter().enumerate() {
        for (i, e) in hist.iter().enumerate() {
            trace.push_str(&format!("{r},{i},{e}\n"));
        }
    }
    data_io::write_text(&run.path("vqe_energy.csv"), &trace)?;
    Ok(summary)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

/// Table of phase accuracies (one row per distinct configuration, mean and sample standard
/// deviation over seeds), accuracy against layer count for image pairs, and the predicted
/// probability sweep of every phase report.
pub fn cmd_report(run: &Run, paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let inputs: Vec<PathBuf> = if paths.is_empty() {
        run.config.report.inputs.clone()
    } else {
        paths.to_vec()
    };
    if inputs.is_empty() {
        return Err(Error::Argument("report needs at least one input file".into()));
    }
    let mut reports = Vec::new();
    for p in &inputs {
        reports.extend(data_io::read_reports(p)?);
    }
    let mut written = Vec::new();

    let phase: Vec<&TrainReport> = reports.iter().filter(|r| r.meta.task == "phase").collect();
    let mut groups: Vec<(String, Vec<f64>)> = Vec::new();
    for r in &phase {
        let m = &r.meta;
        let key = format!("{},{},{},{},{},{}", m.model, m.lattice, m.layout, m.block, m.layers, m.variant);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(r.test_accuracy),
            None => groups.push((key, vec![r.test_accuracy])),
        }
    }
    let mut table = String::from("model,lattice,layout,block,layers,variant,n_runs,mean_accuracy,std_accuracy\n");
    for (key, accs) in &groups {
        let (mean, std) = mean_std(accs);
        table.push_str(&format!("{key},{},{mean},{std}\n", accs.len()));
    }
    let p = run.path("phase_table.csv");
    data_io::write_text(&p, &table)?;
    written.push(p);

    let mut layers = String::from("pair,layout,block,layers,test_accuracy\n");
    for r in reports.iter().filter(|r| r.meta.task == "image") {
        let m = &r.meta;
        layers.push_str(&format!("{},{},{},{},{}\n", m.model, m.layout, m.block, m.layers, r.test_accuracy));
    }
    let p = run.path("accuracy_vs_layers.csv");
    data_io::write_text(&p, &layers)?;
    written.push(p);

    for (k, r) in phase.iter().enumerate() {
        let p = run.path(&format!("phase_probabilities_{k}.csv"));
        data_io::write_text(&p, &phase_probability_csv(r))?;
        written.push(p);
    }
    let image: Vec<TrainReport> = reports.iter().filter(|r| r.meta.pair.is_some()).cloned().collect();
    if !image.is_empty() {
        let p = run.path("pairwise_matrix.csv");
        data_io::write_text(&p, &data_io::pairwise_matrix_csv(&image))?;
        written.push(p);
    }
    run.write_config_echo("report_config.json")?;
    Ok(written)
}

/// Parse arguments already split by clap and run one subcommand.
pub fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let run = Run::new(config, cli.out.clone(), cli.seed, cli.dump_circuit)?;
    fs::create_dir_all(&run.out).map_err(|e| Error::io(&run.out, e))?;
    match &cli.command {
        Command::Analyze => cmd_analyze(&run).map(|_| ()),
        Command::GenData => cmd_gen_data(&run).map(|_| ()),
        Command::TrainPhase => cmd_train_phase(&run).map(|_| ()),
        Command::TrainImage {
            images,
            labels,
            test_images,
            test_labels,
        } => cmd_train_image(
            &run,
            &ImagePaths {
                images: images.clone(),
                labels: labels.clone(),
                test_images: test_images.clone(),
                test_labels: test_labels.clone(),
            },
        )
        .map(|_| ()),
        Command::Vqe => cmd_vqe(&run).map(|_| ()),
        Command::Report { paths } => cmd_report(&run, paths).map(|_| ()),
    }
}

/// Size the worker pool from `TNVQC_THREADS` when set.
pub fn init_thread_pool() -> Result<()> {
    if let Ok(v) = std::env::var("TNVQC_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| Error::Config(format!("TNVQC_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(Error::Config("TNVQC_THREADS must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}

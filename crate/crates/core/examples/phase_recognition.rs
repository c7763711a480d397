//! Train a MERA classifier on spin-chain ground states (XXZ by default) and list its test misses.
//!
//! `cargo run --release --example phase_recognition -- tfim 8`
use tnvqc::ansatz::{build_mera, BlockKind, Layout, MeraVariant};
use tnvqc::classifier::{phase_pipeline, PhaseTaskConfig};
use tnvqc::spin::{build_lattice, generate_phase_dataset, LatticeKind, SpinModel};

fn main() -> tnvqc::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let model: SpinModel = args.first().map(|s| s.parse()).transpose()?.unwrap_or(SpinModel::Xxz);
    let sites = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(4);

    let lattice = build_lattice(LatticeKind::Chain, 1, sites)?;
    let ds = generate_phase_dataset(model, &lattice, 1000, 1)?;
    let circuit = build_mera(sites, BlockKind::U, 1, MeraVariant::Standard)?;
    let report = phase_pipeline(&ds, &circuit, &PhaseTaskConfig::new(Layout::Mera, 1))?;

    println!(
        "{model} 1x{sites}: best val {:.3} at iteration {}, test {:.3}",
        report.best_val_accuracy, report.best_iteration, report.test_accuracy
    );
    for p in &report.test_predictions {
        let guess = tnvqc::variational::argmax(&p.probs);
        if guess != p.label {
            println!("  miss at {:+.3}: label {} predicted {guess} {:?}", p.sweep_value.unwrap_or(f64::NAN), p.label, p.probs);
        }
    }
    Ok(())
}

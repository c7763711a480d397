//! Standard against modified four-qubit MERA on Ising chains and plaquettes, averaged over seeds.
use tnvqc::ansatz::{build_mera, BlockKind, Layout, MeraVariant};
use tnvqc::classifier::{phase_pipeline, PhaseTaskConfig};
use tnvqc::spin::{build_lattice, generate_phase_dataset, LatticeKind, SpinModel};

fn main() -> tnvqc::Result<()> {
    for (kind, rows, cols) in [(LatticeKind::Chain, 1, 4), (LatticeKind::Rectangular, 2, 2)] {
        let lattice = build_lattice(kind, rows, cols)?;
        for variant in [MeraVariant::Standard, MeraVariant::Modified] {
            let circuit = build_mera(4, BlockKind::U, 1, variant)?;
            let mut accs = Vec::new();
            for seed in 1..=3 {
                let ds = generate_phase_dataset(SpinModel::Tfim, &lattice, 1000, seed)?;
                accs.push(phase_pipeline(&ds, &circuit, &PhaseTaskConfig::new(Layout::Mera, seed))?.test_accuracy);
            }
            let mean = accs.iter().sum::<f64>() / accs.len() as f64;
            println!("TFIM {rows}x{cols} {variant:?}: {accs:?} mean {mean:.4}");
        }
    }
    Ok(())
}

//! Variational ground state of small spin models, compared with exact diagonalization.
use tnvqc::ansatz::build_hardware_efficient;
use tnvqc::spin::{build_lattice, ground_state_ed, LatticeKind, SpinModel};
use tnvqc::variational::{vqe_ground_state, VqeConfig};

fn main() -> tnvqc::Result<()> {
    for (kind, rows, cols) in [(LatticeKind::Chain, 1, 4), (LatticeKind::Rectangular, 2, 2)] {
        let lattice = build_lattice(kind, rows, cols)?;
        for (model, v) in [(SpinModel::Tfim, 1.0), (SpinModel::Xxz, 0.5)] {
            let h = model.hamiltonian(&lattice, v)?;
            let (e0, _) = ground_state_ed(&h)?;
            let r = vqe_ground_state(&h, &build_hardware_efficient(4, 3)?, &VqeConfig::new(1))?;
            println!(
                "{model} {rows}x{cols} v={v}: VQE {:.6}  ED {e0:.6}  gap {:.1e} (restart {})",
                r.energy,
                r.energy - e0,
                r.best_restart
            );
        }
    }
    Ok(())
}

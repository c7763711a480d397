//! Ground energies of the open-boundary Ising and XXZ models across their sweeps.
use tnvqc::eigen::jacobi_eigenvalues;
use tnvqc::spin::{build_lattice, ground_state_ed, LatticeKind, SpinModel};

fn main() -> tnvqc::Result<()> {
    let chain = build_lattice(LatticeKind::Chain, 1, 8)?;
    let square = build_lattice(LatticeKind::Rectangular, 2, 2)?;
    for (model, values) in [
        (SpinModel::Tfim, vec![0.0, 0.5, 1.0, 2.0, 3.0]),
        (SpinModel::Xxz, vec![-2.0, -1.0, 0.0, 1.0, 2.0]),
    ] {
        for v in values {
            let (e8, psi) = ground_state_ed(&model.hamiltonian(&chain, v)?)?;
            let h4 = model.hamiltonian(&square, v)?;
            let (e4, _) = ground_state_ed(&h4)?;
            let jacobi = jacobi_eigenvalues(&h4.to_dense())[0];
            println!(
                "{model} v={v:>5}: E0(1x8) = {e8:>10.6} (<Z0> {:+.3})  E0(2x2) = {e4:>9.6}  jacobi diff {:.1e}",
                psi.expectation_z(0)?,
                (e4 - jacobi).abs()
            );
        }
    }
    Ok(())
}

//! Build a Bell pair by hand and read off pair probabilities, fidelities and reduced purity.
use tnvqc::qsim::{Angle, Gate, State};

fn main() -> tnvqc::Result<()> {
    let mut psi = State::new(2)?;
    psi.apply_gate(&Gate::ry(0, Angle::Fixed(std::f64::consts::FRAC_PI_2)), &[])?;
    psi.apply_gate(&Gate::cnot(0, 1), &[])?;

    println!("amplitudes: {:?}", psi.amplitudes());
    println!("[p00, p01, p10, p11] = {:?}", psi.two_qubit_basis_probs(0, 1)?);
    println!("<Z0> = {:.3}, <Z0 Z1> = {:.3}", psi.expectation_z(0)?, psi.expectation_zz(0, 1)?);
    println!("purity of qubit 0: {:.3}", psi.reduced_density_single(0)?.purity());

    // |00> overlaps the Bell state with fidelity 1/2
    println!("F(|00>, bell) = {:.3}", State::new(2)?.fidelity(&psi)?);

    // amplitude encoding normalizes a real vector
    let enc = State::amplitude_encode(&[3.0, 0.0, 0.0, 4.0])?;
    println!("encoded [3,0,0,4]: {:?}", enc.amplitudes());
    Ok(())
}

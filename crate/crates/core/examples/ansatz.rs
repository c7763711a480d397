//! Print the gate lists of the tensor-network ansatzes on four qubits.
//!
//! `cargo run --example ansatz -- mera v 2`
use tnvqc::ansatz::{build_hardware_efficient, build_mera, build_ttn, BlockKind, MeraVariant};

fn main() -> tnvqc::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let layout = args.first().map(String::as_str).unwrap_or("ttn");
    let block = match args.get(1).map(String::as_str) {
        Some("v") => BlockKind::V,
        _ => BlockKind::U,
    };
    let layers = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);

    let circuit = match layout {
        "ttn" => build_ttn(4, block, layers)?,
        "mera" => build_mera(4, block, layers, MeraVariant::Standard)?,
        "modified" => build_mera(4, block, layers, MeraVariant::Modified)?,
        "hwe" => build_hardware_efficient(4, layers)?,
        other => return Err(tnvqc::Error::Argument(format!("unknown layout {other}"))),
    };
    println!(
        "{layout} {block} L={layers}: {} params, {} blocks, {} CNOTs",
        circuit.n_params,
        circuit.block_count(),
        circuit.cnot_count()
    );
    print!("{}", circuit.to_text());
    Ok(())
}

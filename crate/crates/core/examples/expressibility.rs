//! Expressibility and entangling capability of TTN and MERA on eight qubits.
//!
//! Pass a sample count to trade accuracy for speed (default 1000).
use tnvqc::analysis::{analyze, SamplingConfig, REPORT_CSV_HEADER};
use tnvqc::ansatz::{build_mera, build_ttn, BlockKind, MeraVariant};

fn main() -> tnvqc::Result<()> {
    let n_samples = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let cfg = SamplingConfig { n_samples, ..SamplingConfig::new(1) };
    println!("{REPORT_CSV_HEADER}");
    for block in [BlockKind::U, BlockKind::V] {
        for layers in [1, 3, 5] {
            for c in [build_ttn(8, block, layers)?, build_mera(8, block, layers, MeraVariant::Standard)?] {
                println!("{}", analyze(&c, &cfg)?.csv_row());
            }
        }
    }
    Ok(())
}

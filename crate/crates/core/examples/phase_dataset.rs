//! Generate a labelled ground-state dataset and round-trip it through the binary format.
use tnvqc::data_io::{load_dataset, save_dataset};
use tnvqc::spin::{build_lattice, generate_phase_dataset, LatticeKind, SpinModel};

fn main() -> tnvqc::Result<()> {
    let lattice = build_lattice(LatticeKind::Chain, 1, 4)?;
    let ds = generate_phase_dataset(SpinModel::Xxz, &lattice, 200, 1)?;
    println!("{} records, class counts {:?}", ds.records.len(), ds.class_counts());
    for r in ds.records.iter().step_by(40) {
        println!("  delta {:+.3} -> class {}", r.sweep_value, r.label);
    }

    let dir = std::env::temp_dir().join("tnvqc-example");
    let path = dir.join("xxz_1x4.qprd");
    save_dataset(&ds, &path, Some(&serde_json::json!({"seed": 1})))?;
    assert_eq!(load_dataset(&path)?, ds);
    println!("wrote {} ({} bytes)", path.display(), std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0));
    Ok(())
}

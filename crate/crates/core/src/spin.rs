//! Spin lattices, TFIM/XXZ Hamiltonians, exact diagonalization and labeled ground-state datasets.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen;
use crate::error::{Error, Result};
use crate::hamiltonian::{Hamiltonian, Pauli, PauliString};
use crate::qsim::State;
use crate::seeding::{self, Purpose};

/// Largest system [`ground_state_ed`] will diagonalize densely.
pub const MAX_ED_QUBITS: usize = 12;

/// Lower end of every sweep that would otherwise start at an exactly degenerate point.
pub const SWEEP_FLOOR: f64 = 1e-3;

/// Transverse-field threshold for rectangular lattices.
pub const TFIM_2D_CRITICAL_FIELD: f64 = 3.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeKind {
    Chain,
    Rectangular,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub kind: LatticeKind,
    pub rows: usize,
    pub cols: usize,
    /// Open-boundary nearest-neighbour pairs `(i, j)` with `i < j`.
    pub bonds: Vec<(usize, usize)>,
}

impl Lattice {
    pub fn n_sites(&self) -> usize {
        self.rows * self.cols
    }

    /// Both extents larger than one.
    pub fn is_two_dimensional(&self) -> bool {
        self.rows > 1 && self.cols > 1
    }

    pub fn descriptor(&self) -> String {
        format!("{}x{}", self.rows, self.cols)
    }
}

pub fn build_lattice(kind: LatticeKind, rows: usize, cols: usize) -> Result<Lattice> {
    if rows == 0 || cols == 0 {
        return Err(Error::Argument(format!("lattice dimensions must be positive, got {rows}x{cols}")));
    }
    if kind == LatticeKind::Chain && rows != 1 {
        return Err(Error::Argument(format!("a chain has a single row, got {rows}")));
    }
    let site = |r: usize, c: usize| r * cols + c;
    let mut bonds = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                bonds.push((site(r, c), site(r, c + 1)));
            }
            if r + 1 < rows {
                bonds.push((site(r, c), site(r + 1, c)));
            }
        }
    }
    Ok(Lattice { kind, rows, cols, bonds })
}

/// `H = J sum_<ij> Z_i Z_j + h sum_i X_i`.
pub fn build_tfim(lattice: &Lattice, j: f64, h: f64) -> Result<Hamiltonian> {
    let n = lattice.n_sites();
    let mut ham = Hamiltonian::new(n);
    for &(a, b) in &lattice.bonds {
        ham.add_term(j, PauliString::with(n, &[(a, Pauli::Z), (b, Pauli::Z)]))?;
    }
    for s in 0..n {
        ham.add_term(h, PauliString::with(n, &[(s, Pauli::X)]))?;
    }
    Ok(ham)
}

/// `H = J sum_<ij> (X_i X_j + Y_i Y_j + delta Z_i Z_j)`.
pub fn build_xxz(lattice: &Lattice, j: f64, delta: f64) -> Result<Hamiltonian> {
    let n = lattice.n_sites();
    let mut ham = Hamiltonian::new(n);
    for &(a, b) in &lattice.bonds {
        ham.add_term(j, PauliString::with(n, &[(a, Pauli::X), (b, Pauli::X)]))?;
        ham.add_term(j, PauliString::with(n, &[(a, Pauli::Y), (b, Pauli::Y)]))?;
        ham.add_term(j * delta, PauliString::with(n, &[(a, Pauli::Z), (b, Pauli::Z)]))?;
    }
    Ok(ham)
}

/// Lowest eigenvalue and a canonical unit eigenvector.
///
/// When the ground level is degenerate (eigenvalues within `1e-9 * max(1, |E0|)`), the returned
/// vector is the projection onto that eigenspace of the lowest-index basis state with a nonzero
/// projection. Either way the first amplitude above `1e-9` in magnitude is made real positive.
pub fn ground_state_ed(h: &Hamiltonian) -> Result<(f64, State)> {
    let n = h.n_qubits();
    if n == 0 || n > MAX_ED_QUBITS {
        return Err(Error::Size(format!("exact diagonalization supports 1..={MAX_ED_QUBITS} qubits, got {n}")));
    }
    let (values, vectors) = eigen::hermitian_eigen(&h.to_dense());
    let e0 = values[0];
    let tol = 1e-9 * e0.abs().max(1.0);
    let space: Vec<&Vec<Complex64>> = values
        .iter()
        .zip(&vectors)
        .take_while(|(v, _)| **v <= e0 + tol)
        .map(|(_, vec)| vec)
        .collect();
    let mut psi = if space.len() == 1 {
        space[0].clone()
    } else {
        canonical_in_span(&space)
    };
    fix_phase(&mut psi);
    let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    psi.iter_mut().for_each(|a| *a /= norm);
    Ok((e0, State::from_amplitudes(psi)?))
}

fn canonical_in_span(space: &[&Vec<Complex64>]) -> Vec<Complex64> {
    let dim = space[0].len();
    for k in 0..dim {
        // coefficients <v|e_k> = conj(v_k)
        let weight: f64 = space.iter().map(|v| v[k].norm_sqr()).sum();
        if weight > 1e-6 {
            let mut out = vec![Complex64::new(0.0, 0.0); dim];
            for v in space {
                let c = v[k].conj();
                for (o, x) in out.iter_mut().zip(v.iter()) {
                    *o += c * x;
                }
            }
            return out;
        }
    }
    space[0].clone()
}

fn fix_phase(psi: &mut [Complex64]) {
    if let Some(first) = psi.iter().find(|a| a.norm() > 1e-9).copied() {
        let rot = first.conj() / first.norm();
        psi.iter_mut().for_each(|a| *a *= rot);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinModel {
    Tfim,
    Xxz,
}

impl SpinModel {
    pub fn n_classes(self) -> usize {
        match self {
            SpinModel::Tfim => 2,
            SpinModel::Xxz => 3,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            SpinModel::Tfim => 0,
            SpinModel::Xxz => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(SpinModel::Tfim),
            1 => Some(SpinModel::Xxz),
            _ => None,
        }
    }

    pub fn hamiltonian(self, lattice: &Lattice, sweep_value: f64) -> Result<Hamiltonian> {
        match self {
            SpinModel::Tfim => build_tfim(lattice, 1.0, sweep_value),
            SpinModel::Xxz => build_xxz(lattice, 1.0, sweep_value),
        }
    }

    /// Per-class sweep sub-intervals `[lo, hi)` (the last one closed), with `J = 1`.
    pub fn class_intervals(self, two_dimensional: bool) -> Vec<(f64, f64)> {
        match (self, two_dimensional) {
            (SpinModel::Tfim, false) => vec![(SWEEP_FLOOR, 1.0), (1.0, 2.0)],
            (SpinModel::Tfim, true) => vec![(SWEEP_FLOOR, TFIM_2D_CRITICAL_FIELD), (TFIM_2D_CRITICAL_FIELD, 6.0)],
            (SpinModel::Xxz, _) => vec![(-2.0, -1.0), (-1.0, 1.0), (1.0, 2.0)],
        }
    }
}

impl fmt::Display for SpinModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpinModel::Tfim => "TFIM",
            SpinModel::Xxz => "XXZ",
        })
    }
}

impl FromStr for SpinModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tfim" => Ok(SpinModel::Tfim),
            "xxz" => Ok(SpinModel::Xxz),
            _ => Err(Error::Argument(format!("unknown spin model {s:?}"))),
        }
    }
}

/// Phase class at `J = 1`. TFIM: 0 below the critical field, 1 above. XXZ: 0 (ferromagnetic)
/// for `delta < -1`, 1 (paramagnetic) for `-1 <= delta < 1`, 2 (antiferromagnetic) otherwise.
pub fn phase_label(model: SpinModel, two_dimensional: bool, sweep_value: f64) -> usize {
    match model {
        SpinModel::Tfim => {
            let hc = if two_dimensional { TFIM_2D_CRITICAL_FIELD } else { 1.0 };
            usize::from(sweep_value >= hc)
        }
        SpinModel::Xxz => {
            if sweep_value < -1.0 {
                0
            } else if sweep_value < 1.0 {
                1
            } else {
                2
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseRecord {
    pub sweep_value: f64,
    pub label: u8,
    pub energy: f64,
    pub amplitudes: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseDataset {
    pub model: SpinModel,
    pub rows: usize,
    pub cols: usize,
    pub n_classes: usize,
    pub records: Vec<PhaseRecord>,
}

impl PhaseDataset {
    pub fn n_sites(&self) -> usize {
        self.rows * self.cols
    }

    pub fn lattice(&self) -> Result<Lattice> {
        let kind = if self.rows == 1 { LatticeKind::Chain } else { LatticeKind::Rectangular };
        build_lattice(kind, self.rows, self.cols)
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for r in &self.records {
            counts[r.label as usize] += 1;
        }
        counts
    }
}

/// Class-stratified sweep: each class gets `n_points / n_classes` values (remainder to the
/// lowest classes) drawn uniformly inside its interval, sorted ascending, each paired with its
/// exact ground state.
pub fn generate_phase_dataset(model: SpinModel, lattice: &Lattice, n_points: usize, seed: u64) -> Result<PhaseDataset> {
    let n_classes = model.n_classes();
    if n_points < n_classes {
        return Err(Error::Argument(format!("need at least {n_classes} points, got {n_points}")));
    }
    let two_d = lattice.is_two_dimensional();
    let intervals = model.class_intervals(two_d);
    let mut values = Vec::with_capacity(n_points);
    for (class, &(lo, hi)) in intervals.iter().enumerate() {
        let count = n_points / n_classes + usize::from(class < n_points % n_classes);
        let mut rng = seeding::stream(seed, Purpose::Sweep, class as u64);
        for _ in 0..count {
            let v: f64 = lo + (hi - lo) * rng.gen::<f64>();
            values.push(v);
        }
    }
    values.sort_by(f64::total_cmp);

    let records = values
        .par_iter()
        .map(|&v| {
            let ham = model.hamiltonian(lattice, v)?;
            let (energy, state) = ground_state_ed(&ham)?;
            Ok(PhaseRecord {
                sweep_value: v,
                label: phase_label(model, two_d, v) as u8,
                energy,
                amplitudes: state.into_amplitudes(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(PhaseDataset {
        model,
        rows: lattice.rows,
        cols: lattice.cols,
        n_classes,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> Lattice {
        build_lattice(LatticeKind::Chain, 1, n).unwrap()
    }

    #[test]
    fn lattice_bonds() {
        assert_eq!(chain(4).bonds, vec![(0, 1), (1, 2), (2, 3)]);
        let sq = build_lattice(LatticeKind::Rectangular, 2, 2).unwrap();
        assert_eq!(sq.bonds.len(), 4);
        let rect = build_lattice(LatticeKind::Rectangular, 2, 4).unwrap();
        assert_eq!(rect.bonds.len(), 10);
        assert!(rect.is_two_dimensional());
        assert!(!chain(8).is_two_dimensional());
        assert!(build_lattice(LatticeKind::Rectangular, 0, 3).is_err());
        assert!(build_lattice(LatticeKind::Chain, 2, 3).is_err());
        // every unordered pair appears once
        let mut seen = rect.bonds.clone();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 10);
    }

    #[test]
    fn tfim_examples() {
        let h = build_tfim(&chain(2), 1.0, 0.0).unwrap();
        assert_eq!(h.terms().len(), 3);
        assert!((ground_state_ed(&h).unwrap().0 + 1.0).abs() < 1e-12);
        let h = build_tfim(&chain(4), 1.0, 0.0).unwrap();
        assert!((ground_state_ed(&h).unwrap().0 + 3.0).abs() < 1e-12);
        let rect = build_lattice(LatticeKind::Rectangular, 2, 4).unwrap();
        assert_eq!(build_tfim(&rect, 0.3, 0.7).unwrap().terms().len(), 18);
    }

    #[test]
    fn brute_force_tfim_zero_field_matches_bond_count() {
        // E0 at h=0 is the minimum over basis states of J * sum of bond parities
        let rect = build_lattice(LatticeKind::Rectangular, 2, 4).unwrap();
        let brute = (0..256u32)
            .map(|b| {
                rect.bonds
                    .iter()
                    .map(|&(i, j)| {
                        let bi = (b >> (7 - i)) & 1;
                        let bj = (b >> (7 - j)) & 1;
                        if bi == bj { 1.0 } else { -1.0 }
                    })
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        assert_eq!(brute, -10.0);
        let e0 = ground_state_ed(&build_tfim(&rect, 1.0, 0.0).unwrap()).unwrap().0;
        assert!((e0 - brute).abs() < 1e-10);
    }

    #[test]
    fn xxz_examples() {
        let (e, psi) = ground_state_ed(&build_xxz(&chain(2), 1.0, 1.0).unwrap()).unwrap();
        assert!((e + 3.0).abs() < 1e-12);
        let a = psi.amplitudes();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((a[1].re - s).abs() < 1e-10 && (a[2].re + s).abs() < 1e-10);
        assert!(a[0].norm() < 1e-10 && a[3].norm() < 1e-10);
        let (e, _) = ground_state_ed(&build_xxz(&chain(2), 1.0, 0.0).unwrap()).unwrap();
        assert!((e + 2.0).abs() < 1e-12);
        assert_eq!(build_xxz(&chain(4), 1.0, 0.3).unwrap().terms().len(), 9);
    }

    #[test]
    fn ed_matches_jacobi() {
        let h = build_tfim(&chain(4), 1.0, 1.0).unwrap();
        let e0 = ground_state_ed(&h).unwrap().0;
        let j = eigen::jacobi_eigenvalues(&h.to_dense())[0];
        assert!((e0 - j).abs() < 1e-10);
    }

    #[test]
    fn degenerate_ground_space_is_canonical() {
        // TFIM at h=0 on two sites: |01> and |10> are degenerate; the lower index wins
        let (_, psi) = ground_state_ed(&build_tfim(&chain(2), 1.0, 0.0).unwrap()).unwrap();
        assert!((psi.amplitudes()[1].re - 1.0).abs() < 1e-12);
        // ferromagnetic XXZ: fully polarized |0000> is picked
        let (e, psi) = ground_state_ed(&build_xxz(&chain(4), 1.0, -1.5).unwrap()).unwrap();
        assert!((e + 4.5).abs() < 1e-10);
        assert!((psi.amplitudes()[0].re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ed_size_ceiling() {
        let big = build_tfim(&chain(13), 1.0, 1.0).unwrap();
        assert!(matches!(ground_state_ed(&big), Err(Error::Size(_))));
    }

    #[test]
    fn labels() {
        assert_eq!(phase_label(SpinModel::Tfim, false, 0.5), 0);
        assert_eq!(phase_label(SpinModel::Tfim, false, 1.5), 1);
        assert_eq!(phase_label(SpinModel::Tfim, true, 3.5), 1);
        assert_eq!(phase_label(SpinModel::Tfim, true, 2.9), 0);
        assert_eq!(phase_label(SpinModel::Xxz, false, 0.0), 1);
        assert_eq!(phase_label(SpinModel::Xxz, true, -1.5), 0);
        assert_eq!(phase_label(SpinModel::Xxz, false, -1.0), 1);
        assert_eq!(phase_label(SpinModel::Xxz, false, 1.0), 2);
    }

    #[test]
    fn small_dataset_is_balanced_and_consistent() {
        let lat = chain(4);
        let ds = generate_phase_dataset(SpinModel::Xxz, &lat, 30, 5).unwrap();
        assert_eq!(ds.class_counts(), vec![10, 10, 10]);
        assert!(ds.records.windows(2).all(|w| w[0].sweep_value <= w[1].sweep_value));
        for r in &ds.records {
            let s = State::from_amplitudes(r.amplitudes.clone()).unwrap();
            let h = build_xxz(&lat, 1.0, r.sweep_value).unwrap();
            assert!((h.expectation(&s).unwrap() - r.energy).abs() < 1e-8);
            assert!((-2.0..=2.0).contains(&r.sweep_value));
        }
        assert_eq!(ds, generate_phase_dataset(SpinModel::Xxz, &lat, 30, 5).unwrap());
        assert!(generate_phase_dataset(SpinModel::Xxz, &lat, 2, 5).is_err());
    }
}

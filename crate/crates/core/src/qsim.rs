//! Dense statevector simulator.
//!
//! Qubit 0 is the most significant bit of the basis index: the basis state
//! `|q0 q1 ... q(n-1)>` sits at index `sum_k q_k * 2^(n-1-k)`. Rotations follow
//! the `exp(-i theta P / 2)` convention.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;

/// Hard ceiling on simulated width; `2^14` amplitudes is 256 KiB.
pub const MAX_QUBITS: usize = 14;

const NORM_TOL: f64 = 1e-10;
const NEGATIVE_PROB_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Where a rotation gets its angle from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Angle {
    /// Index into the caller's parameter vector.
    Slot(usize),
    /// Radians baked into the gate.
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    Rotation { axis: Axis, qubit: usize, angle: Angle },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn rx(qubit: usize, angle: Angle) -> Self {
        Gate::Rotation { axis: Axis::X, qubit, angle }
    }

    pub fn ry(qubit: usize, angle: Angle) -> Self {
        Gate::Rotation { axis: Axis::Y, qubit, angle }
    }

    pub fn rz(qubit: usize, angle: Angle) -> Self {
        Gate::Rotation { axis: Axis::Z, qubit, angle }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::Cnot { control, target }
    }

    pub fn slot(&self) -> Option<usize> {
        match self {
            Gate::Rotation { angle: Angle::Slot(s), .. } => Some(*s),
            _ => None,
        }
    }

    pub fn max_qubit(&self) -> usize {
        match *self {
            Gate::Rotation { qubit, .. } => qubit,
            Gate::Cnot { control, target } => control.max(target),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cnot { .. })
    }

    /// Resolve the rotation angle against a parameter vector.
    pub fn resolve_angle(&self, params: &[f64]) -> Result<Option<f64>> {
        match *self {
            Gate::Rotation { angle: Angle::Fixed(a), .. } => Ok(Some(a)),
            Gate::Rotation { angle: Angle::Slot(s), .. } => params
                .get(s)
                .copied()
                .map(Some)
                .ok_or_else(|| Error::Index(format!("parameter slot {s} out of range ({})", params.len()))),
            Gate::Cnot { .. } => Ok(None),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct State {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl State {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn new(n_qubits: usize) -> Result<Self> {
        check_width(n_qubits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(State { n_qubits, amps })
    }

    /// Wrap an existing amplitude vector. The vector must already be normalized.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n_qubits = width_of(amps.len())?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Argument(format!("amplitudes not normalized (|psi|^2 = {norm})")));
        }
        Ok(State { n_qubits, amps })
    }

    /// Normalize `vector` into the real amplitudes of a state.
    pub fn amplitude_encode(vector: &[f64]) -> Result<Self> {
        let n_qubits = width_of(vector.len())?;
        let norm = vector.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::DegenerateInput("cannot encode a zero vector".into()));
        }
        let amps = vector.iter().map(|v| Complex64::new(v / norm, 0.0)).collect();
        Ok(State { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::Index(format!("qubit {qubit} out of range for {} qubits", self.n_qubits)));
        }
        Ok(())
    }

    fn check_pair(&self, a: usize, b: usize) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::Argument(format!("qubit indices must differ (got {a} twice)")));
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate, params: &[f64]) -> Result<()> {
        match *gate {
            Gate::Rotation { axis, qubit, .. } => {
                self.check_qubit(qubit)?;
                let theta = gate.resolve_angle(params)?.unwrap_or_default();
                self.apply_rotation(axis, qubit, theta);
            }
            Gate::Cnot { control, target } => {
                self.check_pair(control, target)?;
                self.apply_cnot(control, target);
            }
        }
        Ok(())
    }

    /// `exp(-i theta P / 2)` on `qubit`. Caller guarantees the index is valid.
    pub(crate) fn apply_rotation(&mut self, axis: Axis, qubit: usize, theta: f64) {
        let (s, c) = (theta / 2.0).sin_cos();
        let m = rotation_matrix(axis, c, s);
        self.apply_single(qubit, m);
    }

    /// Apply the Pauli matrix `P` itself (not a rotation) on `qubit`.
    pub(crate) fn apply_pauli(&mut self, axis: Axis, qubit: usize) {
        let o = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let m = match axis {
            Axis::X => [[o, one], [one, o]],
            Axis::Y => [[o, -i], [i, o]],
            Axis::Z => [[one, o], [o, -one]],
        };
        self.apply_single(qubit, m);
    }

    fn apply_single(&mut self, qubit: usize, m: [[Complex64; 2]; 2]) {
        let mask = self.mask(qubit);
        let dim = self.amps.len();
        let mut start = 0;
        while start < dim {
            for i in start..start + mask {
                let j = i | mask;
                let a0 = self.amps[i];
                let a1 = self.amps[j];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[j] = m[1][0] * a0 + m[1][1] * a1;
            }
            start += 2 * mask;
        }
    }

    pub(crate) fn apply_cnot(&mut self, control: usize, target: usize) {
        let cm = self.mask(control);
        let tm = self.mask(target);
        for i in 0..self.amps.len() {
            if i & cm != 0 && i & tm == 0 {
                self.amps.swap(i, i | tm);
            }
        }
    }

    /// Multiply every amplitude by a real diagonal operator.
    pub(crate) fn scale_diagonal(&mut self, diag: &[f64]) {
        for (a, d) in self.amps.iter_mut().zip(diag) {
            *a *= *d;
        }
    }

    pub fn inner(&self, other: &State) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::Shape(format!(
                "state widths differ ({} vs {})",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(inner_product(&self.amps, &other.amps))
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &State) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Expectation of the Z-string on the qubits selected by a basis-index bitmask.
    pub(crate) fn expectation_z_mask(&self, mask: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(b, a)| {
                let p = a.norm_sqr();
                if (b & mask).count_ones() % 2 == 0 {
                    p
                } else {
                    -p
                }
            })
            .sum()
    }

    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        Ok(self.expectation_z_mask(self.mask(qubit)))
    }

    pub fn expectation_zz(&self, qi: usize, qj: usize) -> Result<f64> {
        self.check_pair(qi, qj)?;
        Ok(self.expectation_z_mask(self.mask(qi) | self.mask(qj)))
    }

    /// Outcome probabilities `[p00, p01, p10, p11]` of the pair `(qi, qj)`,
    /// rebuilt from `<Z_i>`, `<Z_j>` and `<Z_i Z_j>`.
    pub fn two_qubit_basis_probs(&self, qi: usize, qj: usize) -> Result<[f64; 4]> {
        self.check_pair(qi, qj)?;
        let zi = self.expectation_z_mask(self.mask(qi));
        let zj = self.expectation_z_mask(self.mask(qj));
        let zij = self.expectation_z_mask(self.mask(qi) | self.mask(qj));
        probs_from_z_triple(zi, zj, zij)
    }

    pub fn reduced_density_single(&self, qubit: usize) -> Result<ReducedDensity1Q> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        let mut r00 = 0.0;
        let mut r11 = 0.0;
        let mut r01 = Complex64::new(0.0, 0.0);
        for (i, a) in self.amps.iter().enumerate() {
            if i & mask == 0 {
                let b = self.amps[i | mask];
                r00 += a.norm_sqr();
                r11 += b.norm_sqr();
                r01 += a * b.conj();
            }
        }
        Ok(ReducedDensity1Q {
            matrix: [
                [Complex64::new(r00, 0.0), r01],
                [r01.conj(), Complex64::new(r11, 0.0)],
            ],
        })
    }

    /// `<psi|H|psi>`.
    pub fn expectation(&self, h: &Hamiltonian) -> Result<f64> {
        h.expectation(self)
    }
}

/// Reconstruct `[p00, p01, p10, p11]` from a Z expectation triple.
pub fn probs_from_z_triple(zi: f64, zj: f64, zij: f64) -> Result<[f64; 4]> {
    let mut p = [
        (1.0 + zi + zj + zij) / 4.0,
        (1.0 + zi - zj - zij) / 4.0,
        (1.0 - zi + zj - zij) / 4.0,
        (1.0 - zi - zj + zij) / 4.0,
    ];
    for v in p.iter_mut() {
        if *v < -NEGATIVE_PROB_TOL {
            return Err(Error::Consistency(format!("negative outcome probability {v}")));
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(p)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedDensity1Q {
    pub matrix: [[Complex64; 2]; 2],
}

impl ReducedDensity1Q {
    pub fn trace(&self) -> f64 {
        self.matrix[0][0].re + self.matrix[1][1].re
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        let m = &self.matrix;
        m[0][0].norm_sqr() + m[1][1].norm_sqr() + 2.0 * m[0][1].norm_sqr()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let m = &self.matrix;
        m[0][0].im.abs() <= tol && m[1][1].im.abs() <= tol && (m[0][1] - m[1][0].conj()).norm() <= tol
    }
}

pub(crate) fn inner_product(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn rotation_matrix(axis: Axis, c: f64, s: f64) -> [[Complex64; 2]; 2] {
    let re = |x: f64| Complex64::new(x, 0.0);
    match axis {
        Axis::X => [
            [re(c), Complex64::new(0.0, -s)],
            [Complex64::new(0.0, -s), re(c)],
        ],
        Axis::Y => [[re(c), re(-s)], [re(s), re(c)]],
        Axis::Z => [
            [Complex64::new(c, -s), re(0.0)],
            [re(0.0), Complex64::new(c, s)],
        ],
    }
}

fn check_width(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::Size(format!("n_qubits must be in 1..={MAX_QUBITS}, got {n_qubits}")));
    }
    Ok(())
}

fn width_of(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::Shape(format!("length {len} is not a power of two >= 2")));
    }
    let n = len.trailing_zeros() as usize;
    check_width(n)?;
    Ok(n)
}

//! Weighted sums of Pauli strings.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::State;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

/// One Pauli letter per site, site 0 first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString(pub Vec<Pauli>);

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString(vec![Pauli::I; n])
    }

    /// Identity everywhere except the listed `(site, letter)` pairs.
    pub fn with(n: usize, ops: &[(usize, Pauli)]) -> Self {
        let mut s = Self::identity(n);
        for &(site, p) in ops {
            s.0[site] = p;
        }
        s
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(x_mask, z_mask, n_y)` over basis-index bits. Y contributes to both masks.
    fn masks(&self) -> (usize, usize, u32) {
        let n = self.0.len();
        let mut x = 0;
        let mut z = 0;
        let mut ny = 0;
        for (q, p) in self.0.iter().enumerate() {
            let bit = 1 << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => x |= bit,
                Pauli::Z => z |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit;
                    ny += 1;
                }
            }
        }
        (x, z, ny)
    }

    /// Matrix element phase: `P|b> = phase(b) |b ^ x_mask>`.
    fn action(&self) -> impl Fn(usize) -> (usize, Complex64) {
        let (x, z, ny) = self.masks();
        let base = match ny % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        move |b| {
            let sign = if (b & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            (b ^ x, base * sign)
        }
    }

    /// `<psi|P|psi>` (real because P is Hermitian).
    pub fn expectation(&self, amps: &[Complex64]) -> f64 {
        let act = self.action();
        amps.iter()
            .enumerate()
            .map(|(b, a)| {
                let (b2, ph) = act(b);
                (amps[b2].conj() * ph * a).re
            })
            .sum()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            f.write_str(match p {
                Pauli::I => "I",
                Pauli::X => "X",
                Pauli::Y => "Y",
                Pauli::Z => "Z",
            })?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Argument(format!("invalid Pauli letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(PauliString)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coefficient: f64,
    pub pauli: PauliString,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hamiltonian {
    n_qubits: usize,
    terms: Vec<Term>,
}

impl Hamiltonian {
    pub fn new(n_qubits: usize) -> Self {
        Hamiltonian {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn add_term(&mut self, coefficient: f64, pauli: PauliString) -> Result<()> {
        if !coefficient.is_finite() {
            return Err(Error::Argument(format!("non-finite coefficient {coefficient}")));
        }
        if pauli.len() != self.n_qubits {
            return Err(Error::Shape(format!(
                "Pauli string of length {} on a {}-qubit Hamiltonian",
                pauli.len(),
                self.n_qubits
            )));
        }
        self.terms.push(Term { coefficient, pauli });
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn expectation(&self, state: &State) -> Result<f64> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::Shape(format!(
                "{}-qubit state against {}-qubit Hamiltonian",
                state.n_qubits(),
                self.n_qubits
            )));
        }
        let amps = state.amplitudes();
        Ok(self
            .terms
            .iter()
            .map(|t| t.coefficient * t.pauli.expectation(amps))
            .sum())
    }

    /// Dense `2^n x 2^n` matrix in the computational basis.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for t in &self.terms {
            let act = t.pauli.action();
            for b in 0..dim {
                let (row, ph) = act(b);
                m[(row, b)] += ph * t.coefficient;
            }
        }
        m
    }

    /// `true` when every matrix element is real (no odd number of Y letters in any term).
    pub fn is_real(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.pauli.0.iter().filter(|p| **p == Pauli::Y).count() % 2 == 0)
    }
}

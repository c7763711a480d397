//! Two-qubit unitary blocks and the tree/MERA/hardware-efficient circuit layouts built from them.
//!
//! Every builder hands out parameter slots sequentially, so a circuit's slots are exactly
//! `0..n_params` with each slot used by one gate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{Angle, Axis, Gate, State};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    /// Six RY rotations interleaved with three CNOTs.
    U,
    /// Fifteen-rotation, three-CNOT general two-qubit unitary.
    V,
}

impl BlockKind {
    pub fn params_per_block(self) -> usize {
        match self {
            BlockKind::U => 6,
            BlockKind::V => 15,
        }
    }

    pub fn gates(self, a: usize, b: usize, slot_base: usize) -> Result<Vec<Gate>> {
        match self {
            BlockKind::U => block_u(a, b, slot_base),
            BlockKind::V => block_v(a, b, slot_base),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layout {
    Ttn,
    Mera,
    MeraModified,
    Hwe,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeraVariant {
    #[default]
    Standard,
    /// Four-qubit MERA whose first block couples the outer qubits 0 and 3.
    Modified,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
    pub n_params: usize,
    pub layout: Layout,
    pub block: Option<BlockKind>,
    pub layers: usize,
    /// Qubit pairs of every placed block, in placement order.
    pub block_pairs: Vec<(usize, usize)>,
}

fn distinct(a: usize, b: usize) -> Result<()> {
    if a == b {
        return Err(Error::Argument(format!("block qubits must differ (got {a} twice)")));
    }
    Ok(())
}

/// Six-parameter entangler: three rounds of (RY on both qubits, CNOT) with alternating CNOT
/// direction. All-zero angles leave exactly a SWAP.
pub fn block_u(a: usize, b: usize, slot_base: usize) -> Result<Vec<Gate>> {
    distinct(a, b)?;
    let s = |k: usize| Angle::Slot(slot_base + k);
    Ok(vec![
        Gate::ry(a, s(0)),
        Gate::ry(b, s(1)),
        Gate::cnot(a, b),
        Gate::ry(a, s(2)),
        Gate::ry(b, s(3)),
        Gate::cnot(b, a),
        Gate::ry(a, s(4)),
        Gate::ry(b, s(5)),
        Gate::cnot(a, b),
    ])
}

/// General two-qubit unitary in the three-CNOT canonical form: ZYZ Euler rotations on each
/// qubit, the entangling core, then ZYZ again.
pub fn block_v(a: usize, b: usize, slot_base: usize) -> Result<Vec<Gate>> {
    distinct(a, b)?;
    let s = |k: usize| Angle::Slot(slot_base + k);
    Ok(vec![
        Gate::rz(a, s(0)),
        Gate::ry(a, s(1)),
        Gate::rz(a, s(2)),
        Gate::rz(b, s(3)),
        Gate::ry(b, s(4)),
        Gate::rz(b, s(5)),
        Gate::cnot(b, a),
        Gate::rz(a, s(6)),
        Gate::ry(b, s(7)),
        Gate::cnot(a, b),
        Gate::ry(b, s(8)),
        Gate::cnot(b, a),
        Gate::rz(a, s(9)),
        Gate::ry(a, s(10)),
        Gate::rz(a, s(11)),
        Gate::rz(b, s(12)),
        Gate::ry(b, s(13)),
        Gate::rz(b, s(14)),
    ])
}

fn ttn_pairs(n_qubits: usize) -> Result<Vec<(usize, usize)>> {
    match n_qubits {
        4 => Ok(vec![(0, 1), (2, 3), (1, 2)]),
        8 => Ok(vec![(0, 1), (2, 3), (4, 5), (6, 7), (1, 2), (5, 6), (2, 5)]),
        n => Err(Error::Size(format!("tree layouts support 4 or 8 qubits, got {n}"))),
    }
}

fn mera_pairs(n_qubits: usize, variant: MeraVariant) -> Result<Vec<(usize, usize)>> {
    match (n_qubits, variant) {
        (4, MeraVariant::Standard) => Ok(vec![(1, 2), (0, 1), (2, 3), (1, 2)]),
        (4, MeraVariant::Modified) => Ok(vec![(0, 3), (0, 1), (2, 3), (1, 2)]),
        (8, MeraVariant::Standard) => Ok(vec![
            (1, 2),
            (3, 4),
            (5, 6),
            (0, 1),
            (2, 3),
            (4, 5),
            (6, 7),
            (2, 5),
            (1, 2),
            (5, 6),
            (2, 5),
        ]),
        (8, MeraVariant::Modified) => Err(Error::Argument(
            "the modified MERA variant is defined for 4 qubits only".into(),
        )),
        (n, _) => Err(Error::Size(format!("tree layouts support 4 or 8 qubits, got {n}"))),
    }
}

fn from_pairs(
    n_qubits: usize,
    pairs: &[(usize, usize)],
    block: BlockKind,
    layers: usize,
    layout: Layout,
) -> Result<Circuit> {
    if layers == 0 {
        return Err(Error::Argument("layers must be >= 1".into()));
    }
    let mut gates = Vec::new();
    let mut block_pairs = Vec::new();
    let mut slot = 0;
    for _ in 0..layers {
        for &(a, b) in pairs {
            gates.extend(block.gates(a, b, slot)?);
            slot += block.params_per_block();
            block_pairs.push((a, b));
        }
    }
    Ok(Circuit {
        n_qubits,
        gates,
        n_params: slot,
        layout,
        block: Some(block),
        layers,
        block_pairs,
    })
}

pub fn build_ttn(n_qubits: usize, block: BlockKind, layers: usize) -> Result<Circuit> {
    let pairs = ttn_pairs(n_qubits)?;
    from_pairs(n_qubits, &pairs, block, layers, Layout::Ttn)
}

pub fn build_mera(n_qubits: usize, block: BlockKind, layers: usize, variant: MeraVariant) -> Result<Circuit> {
    let pairs = mera_pairs(n_qubits, variant)?;
    let layout = match variant {
        MeraVariant::Standard => Layout::Mera,
        MeraVariant::Modified => Layout::MeraModified,
    };
    from_pairs(n_qubits, &pairs, block, layers, layout)
}

/// `depth` rounds of (RY, RZ on every qubit; CNOT ladder), then a closing RY layer.
pub fn build_hardware_efficient(n_qubits: usize, depth: usize) -> Result<Circuit> {
    if n_qubits < 2 || n_qubits > crate::qsim::MAX_QUBITS {
        return Err(Error::Size(format!("hardware-efficient ansatz needs 2..=14 qubits, got {n_qubits}")));
    }
    if depth == 0 {
        return Err(Error::Size("depth must be >= 1".into()));
    }
    let mut gates = Vec::new();
    let mut slot = 0;
    let mut next = || {
        slot += 1;
        Angle::Slot(slot - 1)
    };
    for _ in 0..depth {
        for q in 0..n_qubits {
            gates.push(Gate::ry(q, next()));
            gates.push(Gate::rz(q, next()));
        }
        for q in 0..n_qubits - 1 {
            gates.push(Gate::cnot(q, q + 1));
        }
    }
    for q in 0..n_qubits {
        gates.push(Gate::ry(q, next()));
    }
    Ok(Circuit {
        n_qubits,
        gates,
        n_params: depth * 2 * n_qubits + n_qubits,
        layout: Layout::Hwe,
        block: None,
        layers: depth,
        block_pairs: Vec::new(),
    })
}

impl Circuit {
    /// Ad-hoc circuit from a gate list. `n_params` is one past the largest slot used.
    pub fn from_gates(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if let Some(g) = gates.iter().find(|g| g.max_qubit() >= n_qubits) {
            return Err(Error::Index(format!("gate {g:?} exceeds {n_qubits} qubits")));
        }
        let n_params = gates.iter().filter_map(Gate::slot).map(|s| s + 1).max().unwrap_or(0);
        Ok(Circuit {
            n_qubits,
            gates,
            n_params,
            layout: Layout::Hwe,
            block: None,
            layers: 1,
            block_pairs: Vec::new(),
        })
    }

    /// Run on `input` and return the output state.
    pub fn run(&self, params: &[f64], input: &State) -> Result<State> {
        let mut s = input.clone();
        self.apply(params, &mut s)?;
        Ok(s)
    }

    /// Run starting from `|0...0>`.
    pub fn run_from_zero(&self, params: &[f64]) -> Result<State> {
        let mut s = State::new(self.n_qubits)?;
        self.apply(params, &mut s)?;
        Ok(s)
    }

    pub fn apply(&self, params: &[f64], state: &mut State) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::Shape(format!(
                "circuit takes {} parameters, got {}",
                self.n_params,
                params.len()
            )));
        }
        if state.n_qubits() != self.n_qubits {
            return Err(Error::Shape(format!(
                "{}-qubit circuit applied to a {}-qubit state",
                self.n_qubits,
                state.n_qubits()
            )));
        }
        for g in &self.gates {
            state.apply_gate(g, params)?;
        }
        Ok(())
    }

    /// Replace every slot reference with its value from `params`.
    pub fn bind(&self, params: &[f64]) -> Result<Circuit> {
        if params.len() != self.n_params {
            return Err(Error::Shape(format!(
                "circuit takes {} parameters, got {}",
                self.n_params,
                params.len()
            )));
        }
        let gates = self
            .gates
            .iter()
            .map(|g| match *g {
                Gate::Rotation { axis, qubit, .. } => Ok(Gate::Rotation {
                    axis,
                    qubit,
                    angle: Angle::Fixed(g.resolve_angle(params)?.unwrap_or_default()),
                }),
                cnot => Ok(cnot),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Circuit {
            gates,
            n_params: 0,
            ..self.clone()
        })
    }

    /// Inverse of a parameter-free (bound) circuit: gates reversed, angles negated.
    pub fn adjoint(&self) -> Result<Circuit> {
        if self.n_params != 0 {
            return Err(Error::Argument("bind parameters before taking the adjoint".into()));
        }
        let gates = self
            .gates
            .iter()
            .rev()
            .map(|g| match *g {
                Gate::Rotation { axis, qubit, angle: Angle::Fixed(a) } => Gate::Rotation {
                    axis,
                    qubit,
                    angle: Angle::Fixed(-a),
                },
                other => other,
            })
            .collect();
        Ok(Circuit { gates, ..self.clone() })
    }

    pub fn block_count(&self) -> usize {
        self.block_pairs.len()
    }

    pub fn cnot_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    /// Line-oriented dump: `KIND q0 [q1] [slot=k|angle=x]`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            out.push_str(&gate_line(g));
            out.push('\n');
        }
        out
    }
}

pub fn gate_line(g: &Gate) -> String {
    match *g {
        Gate::Rotation { axis, qubit, angle } => {
            let arg = match angle {
                Angle::Slot(s) => format!("slot={s}"),
                Angle::Fixed(a) => format!("angle={a:?}"),
            };
            format!("R{axis} {qubit} {arg}")
        }
        Gate::Cnot { control, target } => format!("CNOT {control} {target}"),
    }
}

/// Parse the text produced by [`Circuit::to_text`]. Blank lines and `#` comments are skipped.
pub fn parse_gates(text: &str) -> Result<Vec<Gate>> {
    let mut gates = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |what: &str| Error::Argument(format!("line {}: {what}: {raw:?}", lineno + 1));
        let mut parts = line.split_whitespace();
        let kind = parts.next().ok_or_else(|| bad("empty"))?;
        let qubit = |p: Option<&str>| -> Result<usize> {
            p.ok_or_else(|| bad("missing qubit"))?
                .parse()
                .map_err(|_| bad("bad qubit index"))
        };
        let gate = match kind {
            "CNOT" => Gate::cnot(qubit(parts.next())?, qubit(parts.next())?),
            "RX" | "RY" | "RZ" => {
                let axis = match kind {
                    "RX" => Axis::X,
                    "RY" => Axis::Y,
                    _ => Axis::Z,
                };
                let q = qubit(parts.next())?;
                let arg = parts.next().ok_or_else(|| bad("missing angle"))?;
                let angle = if let Some(v) = arg.strip_prefix("slot=") {
                    Angle::Slot(v.parse().map_err(|_| bad("bad slot"))?)
                } else if let Some(v) = arg.strip_prefix("angle=") {
                    Angle::Fixed(v.parse().map_err(|_| bad("bad angle"))?)
                } else {
                    return Err(bad("expected slot= or angle="));
                };
                Gate::Rotation { axis, qubit: q, angle }
            }
            _ => return Err(bad("unknown gate kind")),
        };
        if parts.next().is_some() {
            return Err(bad("trailing tokens"));
        }
        gates.push(gate);
    }
    Ok(gates)
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BlockKind::U => "U",
            BlockKind::V => "V",
        })
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Layout::Ttn => "TTN",
            Layout::Mera => "MERA",
            Layout::MeraModified => "MERA_MODIFIED",
            Layout::Hwe => "HWE",
        })
    }
}

impl FromStr for BlockKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "U" => Ok(BlockKind::U),
            "V" => Ok(BlockKind::V),
            _ => Err(Error::Argument(format!("unknown block kind {s:?}"))),
        }
    }
}

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrices::{BitMatrix, BitVec};

/// The binary connective every gate of a circuit applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Connective {
    #[serde(rename = "XOR")]
    Xor,
    #[serde(rename = "OR")]
    Or,
}

impl Connective {
    pub fn apply(self, a: bool, b: bool) -> bool {
        match self {
            Connective::Xor => a ^ b,
            Connective::Or => a | b,
        }
    }

    pub fn combine(self, a: &BitVec, b: &BitVec) -> BitVec {
        match self {
            Connective::Xor => a.xor(b),
            Connective::Or => a.or(b),
        }
    }

    /// Matrix product matching the connective's semantics.
    pub fn mul(self, a: &BitMatrix, b: &BitMatrix) -> Result<BitMatrix> {
        match self {
            Connective::Xor => a.mul_gf2(b),
            Connective::Or => a.mul_bool(b),
        }
    }
}

impl fmt::Display for Connective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Connective::Xor => "XOR",
            Connective::Or => "OR",
        })
    }
}

/// A reference to an input `x_i` or to the output of a gate (both 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Signal {
    Input(usize),
    Gate(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gate {
    pub left: Signal,
    pub right: Signal,
}

/// A straight-line program of fan-in-2 gates over one connective.
///
/// Gates may only reference inputs and earlier gates, so every circuit is
/// acyclic by construction. An output is either a signal or `None`, the
/// constant 0 (used for zero rows, which the circuit model cannot otherwise
/// express and which cost nothing).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    n_inputs: usize,
    connective: Connective,
    gates: Vec<Gate>,
    outputs: Vec<Option<Signal>>,
}

impl Circuit {
    pub fn new(n_inputs: usize, connective: Connective) -> Self {
        Self {
            n_inputs,
            connective,
            gates: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn from_parts(
        n_inputs: usize,
        connective: Connective,
        gates: Vec<Gate>,
        outputs: Vec<Option<Signal>>,
    ) -> Result<Self> {
        let mut c = Self::new(n_inputs, connective);
        for g in gates {
            c.add_gate(g.left, g.right)?;
        }
        for o in outputs {
            c.add_output(o)?;
        }
        Ok(c)
    }

    fn check_signal(&self, s: Signal, limit_gates: usize) -> Result<()> {
        match s {
            Signal::Input(i) if i < self.n_inputs => Ok(()),
            Signal::Gate(g) if g < limit_gates => Ok(()),
            _ => Err(Error::InvalidInput(format!(
                "signal {s:?} is not defined (inputs {}, gates so far {limit_gates})",
                self.n_inputs
            ))),
        }
    }

    /// Appends a gate and returns its signal.
    pub fn add_gate(&mut self, left: Signal, right: Signal) -> Result<Signal> {
        self.check_signal(left, self.gates.len())?;
        self.check_signal(right, self.gates.len())?;
        self.gates.push(Gate { left, right });
        Ok(Signal::Gate(self.gates.len() - 1))
    }

    /// Unchecked variant for constructions that only reference signals they
    /// have already created.
    pub(crate) fn gate(&mut self, left: Signal, right: Signal) -> Signal {
        debug_assert!(self.check_signal(left, self.gates.len()).is_ok());
        debug_assert!(self.check_signal(right, self.gates.len()).is_ok());
        self.gates.push(Gate { left, right });
        Signal::Gate(self.gates.len() - 1)
    }

    pub fn add_output(&mut self, s: Option<Signal>) -> Result<()> {
        if let Some(s) = s {
            self.check_signal(s, self.gates.len())?;
        }
        self.outputs.push(s);
        Ok(())
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn connective(&self) -> Connective {
        self.connective
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> &[Option<Signal>] {
        &self.outputs
    }

    pub(crate) fn outputs_mut(&mut self) -> &mut Vec<Option<Signal>> {
        &mut self.outputs
    }

    /// Number of gates.
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    /// Gates on a longest input-to-output path.
    pub fn depth(&self) -> usize {
        let d = self.gate_depths();
        self.outputs
            .iter()
            .map(|o| match o {
                Some(Signal::Gate(g)) => d[*g],
                _ => 0,
            })
            .max()
            .unwrap_or(0)
    }

    fn gate_depths(&self) -> Vec<usize> {
        let mut d = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let at = |s: Signal| match s {
                Signal::Input(_) => 0,
                Signal::Gate(k) => d[k],
            };
            let v = 1 + at(g.left).max(at(g.right));
            d.push(v);
        }
        d
    }

    /// The same gate list read with another connective.
    pub fn with_connective(&self, connective: Connective) -> Circuit {
        Circuit {
            connective,
            ..self.clone()
        }
    }

    /// Output values on input `x`.
    pub fn eval(&self, x: &[bool]) -> Result<Vec<bool>> {
        if x.len() != self.n_inputs {
            return Err(Error::DimensionMismatch(format!(
                "input of length {} for a circuit with {} inputs",
                x.len(),
                self.n_inputs
            )));
        }
        let mut vals: Vec<bool> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let at = |s: Signal| match s {
                Signal::Input(i) => x[i],
                Signal::Gate(k) => vals[k],
            };
            let v = self.connective.apply(at(g.left), at(g.right));
            vals.push(v);
        }
        Ok(self
            .outputs
            .iter()
            .map(|o| match o {
                None => false,
                Some(Signal::Input(i)) => x[*i],
                Some(Signal::Gate(k)) => vals[*k],
            })
            .collect())
    }

    /// Value vectors of all gates, in gate order. Input `x_i` has value
    /// vector `e_i`; a gate combines its children's vectors with the
    /// circuit's connective.
    pub fn gate_value_vectors(&self) -> Vec<BitVec> {
        let n = self.n_inputs;
        let mut vv: Vec<BitVec> = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let v = {
                let at = |s: Signal| -> std::borrow::Cow<'_, BitVec> {
                    match s {
                        Signal::Input(i) => std::borrow::Cow::Owned(BitVec::unit(n, i)),
                        Signal::Gate(k) => std::borrow::Cow::Borrowed(&vv[k]),
                    }
                };
                self.connective.combine(&at(g.left), &at(g.right))
            };
            vv.push(v);
        }
        vv
    }

    /// Value vectors of every signal: the `n` inputs first, then each gate.
    pub fn value_vectors(&self) -> Vec<BitVec> {
        let mut all: Vec<BitVec> = (0..self.n_inputs).map(|i| BitVec::unit(self.n_inputs, i)).collect();
        all.extend(self.gate_value_vectors());
        all
    }

    fn signal_vector(&self, gates: &[BitVec], s: Option<Signal>) -> BitVec {
        match s {
            None => BitVec::zeros(self.n_inputs),
            Some(Signal::Input(i)) => BitVec::unit(self.n_inputs, i),
            Some(Signal::Gate(k)) => gates[k].clone(),
        }
    }

    /// The matrix computed: row `i` is the value vector of output `i`.
    pub fn matrix_of(&self) -> BitMatrix {
        let gv = self.gate_value_vectors();
        let rows: Vec<BitVec> = self.outputs.iter().map(|&o| self.signal_vector(&gv, o)).collect();
        BitMatrix::from_rows(&rows, self.n_inputs)
    }

    /// Exact check that the circuit computes `a`.
    pub fn verify(&self, a: &BitMatrix) -> Result<bool> {
        if a.rows() != self.outputs.len() || a.cols() != self.n_inputs {
            return Err(Error::DimensionMismatch(format!(
                "circuit is {}x{}, matrix is {}x{}",
                self.outputs.len(),
                self.n_inputs,
                a.rows(),
                a.cols()
            )));
        }
        Ok(self.matrix_of() == *a)
    }

    /// True when at every gate the children's value vectors (under this
    /// circuit's connective) have disjoint supports.
    ///
    /// For XOR circuits this is the cancellation-free property. With disjoint
    /// children the parent's vector is the union of the children's, so value
    /// vectors only grow along edges and every ancestor dominates its
    /// descendants. Conversely if two children share coordinate `i` the
    /// parent loses `i`, and is not above a child containing it. See
    /// [`Circuit::is_cancellation_free_by_ancestry`] for the direct check.
    ///
    /// For OR circuits the test says whether the same DAG, read as an XOR
    /// circuit, would be cancellation-free and compute the same matrix.
    pub fn is_cancellation_free(&self) -> bool {
        let vv = self.gate_value_vectors();
        let n = self.n_inputs;
        self.gates.iter().all(|g| {
            let at = |s: Signal| match s {
                Signal::Input(i) => BitVec::unit(n, i),
                Signal::Gate(k) => vv[k].clone(),
            };
            !at(g.left).intersects(&at(g.right))
        })
    }

    /// Direct form of the definition: for every node `u` and every node `w`
    /// below it (inputs included), `κ(u) ≥ κ(w)` coordinate-wise.
    ///
    /// Quadratic in the circuit size; intended for cross-checking.
    pub fn is_cancellation_free_by_ancestry(&self) -> bool {
        let all = self.value_vectors();
        let n = self.n_inputs;
        let idx = |s: Signal| match s {
            Signal::Input(i) => i,
            Signal::Gate(k) => n + k,
        };
        // below[v] = set of nodes strictly below node v
        let total = n + self.gates.len();
        let mut below: Vec<BitVec> = vec![BitVec::zeros(total); total];
        for (k, g) in self.gates.iter().enumerate() {
            let mut b = BitVec::zeros(total);
            for child in [g.left, g.right] {
                let c = idx(child);
                b.set(c, true);
                b.or_assign(&below[c]);
            }
            below[n + k] = b;
        }
        (n..total).all(|u| below[u].iter_ones().all(|w| all[w].is_subset(&all[u])))
    }
}

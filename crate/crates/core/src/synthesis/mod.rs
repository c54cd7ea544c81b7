//! Circuit constructions.
//!
//! Every procedure returns a [`SynthesisResult`] carrying the circuit, the
//! method name, the parameters it chose, and the measured cost (gates for
//! fan-in-2 circuits, wires for layered ones).

mod families;
mod greedy;
mod lupanov;

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::circuits::{Circuit, Connective, LayeredCircuit};
use crate::error::Result;
use crate::matrices::BitMatrix;

pub use families::{
    complement_transform, hadamard_circuit, product_circuit, setintersection_or_circuit,
    sierpinski_circuit, DepthMode,
};
pub use greedy::{boyar_peralta, naive_rowwise, paar_greedy, BP_COVER_NODE_CAP};
pub use lupanov::{lupanov, lupanov_depth2, lupanov_with, LupanovVariant};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SynthCircuit {
    Fanin2(Circuit),
    Layered(LayeredCircuit),
}

impl SynthCircuit {
    pub fn verify(&self, a: &BitMatrix) -> Result<bool> {
        match self {
            SynthCircuit::Fanin2(c) => c.verify(a),
            SynthCircuit::Layered(l) => l.verify(a),
        }
    }

    pub fn is_cancellation_free(&self) -> bool {
        match self {
            SynthCircuit::Fanin2(c) => c.is_cancellation_free(),
            SynthCircuit::Layered(l) => l.is_cancellation_free(),
        }
    }

    pub fn connective(&self) -> Connective {
        match self {
            SynthCircuit::Fanin2(c) => c.connective(),
            SynthCircuit::Layered(l) => l.connective(),
        }
    }

    /// Gates for fan-in-2 circuits, wires for layered ones.
    pub fn cost(&self) -> usize {
        match self {
            SynthCircuit::Fanin2(c) => c.size(),
            SynthCircuit::Layered(l) => l.wires(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            SynthCircuit::Fanin2(c) => c.depth(),
            SynthCircuit::Layered(l) => l.depth(),
        }
    }

    pub fn as_fanin2(&self) -> Option<&Circuit> {
        match self {
            SynthCircuit::Fanin2(c) => Some(c),
            SynthCircuit::Layered(_) => None,
        }
    }

    pub fn as_layered(&self) -> Option<&LayeredCircuit> {
        match self {
            SynthCircuit::Layered(l) => Some(l),
            SynthCircuit::Fanin2(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthesisResult {
    pub circuit: SynthCircuit,
    pub method: String,
    pub params: BTreeMap<String, Value>,
    pub cost: usize,
    pub cancellation_free: bool,
}

/// JSON summary of a result, without the circuit itself.
#[derive(Debug, Clone, Serialize)]
pub struct CostReport {
    pub method: String,
    pub connective: Connective,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gates: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wires: Option<usize>,
    pub depth: usize,
    pub cancellation_free: bool,
    pub params: BTreeMap<String, Value>,
}

impl SynthesisResult {
    pub(crate) fn new(circuit: SynthCircuit, method: &str) -> Self {
        let cost = circuit.cost();
        let cancellation_free = circuit.is_cancellation_free();
        Self {
            circuit,
            method: method.to_string(),
            params: BTreeMap::new(),
            cost,
            cancellation_free,
        }
    }

    pub(crate) fn fanin2(c: Circuit, method: &str) -> Self {
        Self::new(SynthCircuit::Fanin2(c), method)
    }

    pub(crate) fn layered(l: LayeredCircuit, method: &str) -> Self {
        Self::new(SynthCircuit::Layered(l), method)
    }

    pub(crate) fn param(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), v.into());
        self
    }

    pub fn verify(&self, a: &BitMatrix) -> Result<bool> {
        self.circuit.verify(a)
    }

    pub fn report(&self) -> CostReport {
        let (gates, wires) = match &self.circuit {
            SynthCircuit::Fanin2(c) => (Some(c.size()), None),
            SynthCircuit::Layered(l) => (Some(l.gate_count()), Some(l.wires())),
        };
        CostReport {
            method: self.method.clone(),
            connective: self.circuit.connective(),
            gates,
            wires,
            depth: self.circuit.depth(),
            cancellation_free: self.cancellation_free,
            params: self.params.clone(),
        }
    }
}

/// Chains `signals` left to right with fan-in-2 gates.
pub(crate) fn chain(c: &mut Circuit, signals: &[crate::circuits::Signal]) -> Option<crate::circuits::Signal> {
    let mut it = signals.iter().copied();
    let first = it.next()?;
    Some(it.fold(first, |acc, s| c.gate(acc, s)))
}

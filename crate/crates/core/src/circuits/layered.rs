use crate::error::{Error, Result};
use crate::matrices::{BitMatrix, BitVec};

use super::slp::{Circuit, Connective, Signal};

/// Reference to an input or to gate `index` of layer `layer` (both 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LayerRef {
    Input(usize),
    Node { layer: usize, index: usize },
}

/// A depth-`d` circuit of unbounded fan-in gates whose cost is its wire count.
///
/// Layer `l` gates may read inputs and gates of layers `< l`. Every gate has
/// fan-in at least 1; a fan-in-1 gate is a single wire forwarding its child.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredCircuit {
    n_inputs: usize,
    connective: Connective,
    layers: Vec<Vec<Vec<LayerRef>>>,
    outputs: Vec<Option<LayerRef>>,
}

impl LayeredCircuit {
    pub fn new(n_inputs: usize, connective: Connective, depth: usize) -> Self {
        Self {
            n_inputs,
            connective,
            layers: vec![Vec::new(); depth],
            outputs: Vec::new(),
        }
    }

    fn check_ref(&self, r: LayerRef, before_layer: usize) -> Result<()> {
        match r {
            LayerRef::Input(i) if i < self.n_inputs => Ok(()),
            LayerRef::Node { layer, index }
                if layer < before_layer && index < self.layers[layer].len() =>
            {
                Ok(())
            }
            _ => Err(Error::InvalidInput(format!(
                "reference {r:?} is not available below layer {}",
                before_layer + 1
            ))),
        }
    }

    pub fn add_gate(&mut self, layer: usize, children: Vec<LayerRef>) -> Result<LayerRef> {
        if layer >= self.layers.len() {
            return Err(Error::InvalidInput(format!(
                "layer {} exceeds depth {}",
                layer + 1,
                self.layers.len()
            )));
        }
        if children.is_empty() {
            return Err(Error::InvalidInput("gates need fan-in at least 1".into()));
        }
        for &c in &children {
            self.check_ref(c, layer)?;
        }
        self.layers[layer].push(children);
        Ok(LayerRef::Node {
            layer,
            index: self.layers[layer].len() - 1,
        })
    }

    pub fn add_output(&mut self, r: Option<LayerRef>) -> Result<()> {
        if let Some(r) = r {
            self.check_ref(r, self.layers.len())?;
        }
        self.outputs.push(r);
        Ok(())
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn connective(&self) -> Connective {
        self.connective
    }

    /// Number of layers.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Vec<Vec<LayerRef>>] {
        &self.layers
    }

    pub fn outputs(&self) -> &[Option<LayerRef>] {
        &self.outputs
    }

    /// Sum of fan-ins.
    pub fn wires(&self) -> usize {
        self.layers.iter().flatten().map(Vec::len).sum()
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    pub fn max_fan_in(&self) -> usize {
        self.layers.iter().flatten().map(Vec::len).max().unwrap_or(0)
    }

    fn node_vectors(&self) -> Vec<Vec<BitVec>> {
        let n = self.n_inputs;
        let mut out: Vec<Vec<BitVec>> = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let mut vs = Vec::with_capacity(layer.len());
            for gate in layer {
                let mut acc = BitVec::zeros(n);
                for &c in gate {
                    let v = match c {
                        LayerRef::Input(i) => BitVec::unit(n, i),
                        LayerRef::Node { layer, index } => out[layer][index].clone(),
                    };
                    acc = self.connective.combine(&acc, &v);
                }
                vs.push(acc);
            }
            out.push(vs);
        }
        out
    }

    pub fn matrix_of(&self) -> BitMatrix {
        let nv = self.node_vectors();
        let rows: Vec<BitVec> = self
            .outputs
            .iter()
            .map(|o| match *o {
                None => BitVec::zeros(self.n_inputs),
                Some(LayerRef::Input(i)) => BitVec::unit(self.n_inputs, i),
                Some(LayerRef::Node { layer, index }) => nv[layer][index].clone(),
            })
            .collect();
        BitMatrix::from_rows(&rows, self.n_inputs)
    }

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

    /// Every gate's children have pairwise disjoint value vectors.
    pub fn is_cancellation_free(&self) -> bool {
        let nv = self.node_vectors();
        let n = self.n_inputs;
        self.layers.iter().flatten().all(|gate| {
            let mut seen = BitVec::zeros(n);
            for &c in gate {
                let v = match c {
                    LayerRef::Input(i) => BitVec::unit(n, i),
                    LayerRef::Node { layer, index } => nv[layer][index].clone(),
                };
                if seen.intersects(&v) {
                    return false;
                }
                seen.or_assign(&v);
            }
            true
        })
    }

    /// Expands every fan-in-`k` gate into `k-1` fan-in-2 gates arranged as a
    /// balanced tree over the children in left-to-right order. Fan-in-1 gates
    /// become plain forwarding.
    pub fn flatten(&self) -> Circuit {
        let mut c = Circuit::new(self.n_inputs, self.connective);
        let mut sig: Vec<Vec<Signal>> = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            let mut row = Vec::with_capacity(layer.len());
            for gate in layer {
                let children: Vec<Signal> = gate
                    .iter()
                    .map(|&r| match r {
                        LayerRef::Input(i) => Signal::Input(i),
                        LayerRef::Node { layer, index } => sig[layer][index],
                    })
                    .collect();
                row.push(balanced(&mut c, &children));
            }
            sig.push(row);
        }
        for o in &self.outputs {
            let s = o.map(|r| match r {
                LayerRef::Input(i) => Signal::Input(i),
                LayerRef::Node { layer, index } => sig[layer][index],
            });
            c.add_output(s).expect("flattened output refers to built signal");
        }
        c
    }

    /// Circuit computing `outer · inner`: `inner`'s layers followed by
    /// `outer`'s, with outer input `j` wired to inner output `j`.
    ///
    /// Wires from a constant-0 inner output are dropped; a gate left without
    /// wires is itself constant 0 and is removed, cascading upward.
    pub fn compose(outer: &LayeredCircuit, inner: &LayeredCircuit) -> Result<LayeredCircuit> {
        if outer.n_inputs != inner.outputs.len() {
            return Err(Error::DimensionMismatch(format!(
                "outer circuit has {} inputs, inner has {} outputs",
                outer.n_inputs,
                inner.outputs.len()
            )));
        }
        if outer.connective != inner.connective {
            return Err(Error::InvalidInput("connectives differ".into()));
        }
        let shift = inner.depth();
        let mut out = LayeredCircuit::new(inner.n_inputs, inner.connective, shift + outer.depth());
        for (l, layer) in inner.layers.iter().enumerate() {
            out.layers[l] = layer.clone();
        }
        let mut remap: Vec<Vec<Option<LayerRef>>> = Vec::with_capacity(outer.depth());
        let map = |r: LayerRef, remap: &Vec<Vec<Option<LayerRef>>>| match r {
            LayerRef::Input(j) => inner.outputs[j],
            LayerRef::Node { layer, index } => remap[layer][index],
        };
        for (l, layer) in outer.layers.iter().enumerate() {
            let mut row = Vec::with_capacity(layer.len());
            for gate in layer {
                let children: Vec<LayerRef> = gate.iter().filter_map(|&r| map(r, &remap)).collect();
                if children.is_empty() {
                    row.push(None);
                } else {
                    row.push(Some(out.add_gate(shift + l, children)?));
                }
            }
            remap.push(row);
        }
        for o in &outer.outputs {
            let r = o.and_then(|r| map(r, &remap));
            out.add_output(r)?;
        }
        Ok(out)
    }
}

fn balanced(c: &mut Circuit, children: &[Signal]) -> Signal {
    match children.len() {
        1 => children[0],
        len => {
            let mid = len.div_ceil(2);
            let l = balanced(c, &children[..mid]);
            let r = balanced(c, &children[mid..]);
            c.gate(l, r)
        }
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// The depth-2 example computing the 4×4 example matrix with 9 wires.
    pub fn depth_two_example() -> LayeredCircuit {
        use LayerRef::*;
        let mut l = LayeredCircuit::new(4, Connective::Xor, 2);
        let y4 = l.add_gate(0, vec![Input(1), Input(2), Input(3)]).unwrap();
        let y1 = l.add_gate(0, vec![Input(0), Input(1)]).unwrap();
        let y2 = l.add_gate(1, vec![y1, Input(2)]).unwrap();
        let y3 = l.add_gate(1, vec![y4, Input(0)]).unwrap();
        for o in [y1, y2, y3, y4] {
            l.add_output(Some(o)).unwrap();
        }
        l
    }
}

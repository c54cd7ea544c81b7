use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

use super::slp::{Circuit, Signal};

/// Outcome of fixing some inputs to constant 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationResult {
    /// Same inputs and outputs as the original; restricted inputs are unused.
    pub reduced: Circuit,
    /// Original gate indices that stopped doing any computation.
    pub eliminated: BTreeSet<usize>,
    /// Outputs whose original signal disappeared, with their new source
    /// (`None` when the output became constant 0).
    pub forwarded_outputs: BTreeMap<usize, Option<Signal>>,
}

impl EliminationResult {
    pub fn surviving_gates(&self) -> usize {
        self.reduced.size()
    }
}

/// Propagates constant zeros through a gate list, dropping every gate with a
/// zero child. `lookup` gives the (possibly zero) value of a leaf.
fn propagate(
    src: &Circuit,
    dst: &mut Circuit,
    mut leaf: impl FnMut(usize) -> Option<Signal>,
) -> (Vec<Option<Signal>>, BTreeSet<usize>) {
    let mut vals: Vec<Option<Signal>> = Vec::with_capacity(src.size());
    let mut eliminated = BTreeSet::new();
    for (k, g) in src.gates().iter().enumerate() {
        let at = |s: Signal, leaf: &mut dyn FnMut(usize) -> Option<Signal>, vals: &[Option<Signal>]| match s {
            Signal::Input(i) => leaf(i),
            Signal::Gate(j) => vals[j],
        };
        let l = at(g.left, &mut leaf, &vals);
        let r = at(g.right, &mut leaf, &vals);
        let v = match (l, r) {
            (Some(a), Some(b)) => Some(dst.gate(a, b)),
            (Some(a), None) | (None, Some(a)) => {
                eliminated.insert(k);
                Some(a)
            }
            (None, None) => {
                eliminated.insert(k);
                None
            }
        };
        vals.push(v);
    }
    (vals, eliminated)
}

/// Sets the inputs in `zeroed` (0-based) to constant 0 and removes every gate
/// computing `0 ∘ w` (forwarding `w`) or `0 ∘ 0`, cascading.
pub fn restrict_zero(c: &Circuit, zeroed: &[usize]) -> Result<EliminationResult> {
    let n = c.n_inputs();
    if let Some(&bad) = zeroed.iter().find(|&&i| i >= n) {
        return Err(Error::InvalidInput(format!("input {} out of range {n}", bad + 1)));
    }
    let z: BTreeSet<usize> = zeroed.iter().copied().collect();
    let mut reduced = Circuit::new(n, c.connective());
    let (vals, eliminated) = propagate(c, &mut reduced, |i| {
        if z.contains(&i) {
            None
        } else {
            Some(Signal::Input(i))
        }
    });
    let mut forwarded_outputs = BTreeMap::new();
    for (o, out) in c.outputs().iter().enumerate() {
        let new = match *out {
            None => None,
            Some(Signal::Input(i)) => (!z.contains(&i)).then_some(Signal::Input(i)),
            Some(Signal::Gate(k)) => vals[k],
        };
        let lost = match *out {
            Some(Signal::Input(i)) => z.contains(&i),
            Some(Signal::Gate(k)) => eliminated.contains(&k),
            None => false,
        };
        if lost {
            forwarded_outputs.insert(o, new);
        }
        reduced.add_output(new).expect("reduced signals exist");
    }
    Ok(EliminationResult {
        reduced,
        eliminated,
        forwarded_outputs,
    })
}

/// Circuit for `matrix_of(outer) · matrix_of(inner)`: the outputs of `inner`
/// feed the inputs of `outer`.
///
/// The size is `size(outer) + size(inner)` unless `inner` has constant-0
/// outputs, in which case the outer gates reading them are eliminated.
pub fn compose(outer: &Circuit, inner: &Circuit) -> Result<Circuit> {
    if outer.n_inputs() != inner.outputs().len() {
        return Err(Error::DimensionMismatch(format!(
            "outer circuit has {} inputs, inner has {} outputs",
            outer.n_inputs(),
            inner.outputs().len()
        )));
    }
    if outer.connective() != inner.connective() {
        return Err(Error::InvalidInput(format!(
            "cannot compose {} circuit over {} circuit",
            outer.connective(),
            inner.connective()
        )));
    }
    let mut c = inner.clone();
    c.outputs_mut().clear();
    let (vals, _) = propagate(outer, &mut c, |j| inner.outputs()[j]);
    for o in outer.outputs() {
        let s = o.and_then(|s| match s {
            Signal::Input(j) => inner.outputs()[j],
            Signal::Gate(k) => vals[k],
        });
        c.add_output(s)?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::slp::fixtures::cf_example;
    use crate::circuits::Connective;
    use crate::matrices::{gen_random, BitMatrix};
    use proptest::prelude::*;

    fn single_gate() -> Circuit {
        let mut c = Circuit::new(2, Connective::Xor);
        let g = c.add_gate(Signal::Input(0), Signal::Input(1)).unwrap();
        c.add_output(Some(g)).unwrap();
        c
    }

    #[test]
    fn restricting_one_input_forwards_the_other() {
        let r = restrict_zero(&single_gate(), &[0]).unwrap();
        assert_eq!(r.eliminated.len(), 1);
        assert_eq!(r.reduced.outputs(), &[Some(Signal::Input(1))]);
        assert_eq!(r.forwarded_outputs.get(&0), Some(&Some(Signal::Input(1))));
    }

    #[test]
    fn restricting_nothing_is_identity() {
        let c = cf_example();
        let r = restrict_zero(&c, &[]).unwrap();
        assert_eq!(r.reduced, c);
        assert!(r.eliminated.is_empty());
        assert!(r.forwarded_outputs.is_empty());
        assert!(restrict_zero(&c, &[4]).is_err());
    }

    #[test]
    fn both_zero_cascades() {
        let mut c = Circuit::new(3, Connective::Xor);
        let g = c.add_gate(Signal::Input(0), Signal::Input(1)).unwrap();
        let h = c.add_gate(g, Signal::Input(2)).unwrap();
        c.add_output(Some(g)).unwrap();
        c.add_output(Some(h)).unwrap();
        let r = restrict_zero(&c, &[0, 1]).unwrap();
        assert_eq!(r.eliminated.into_iter().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(r.reduced.outputs(), &[None, Some(Signal::Input(2))]);
        assert_eq!(r.reduced.size(), 0);
    }

    #[test]
    fn composing_two_sierpinski_two_circuits_cancels() {
        // S_2 · S_2 = I_2 over GF(2)
        let mut s2 = Circuit::new(2, Connective::Xor);
        let g = s2.add_gate(Signal::Input(0), Signal::Input(1)).unwrap();
        s2.add_output(Some(Signal::Input(0))).unwrap();
        s2.add_output(Some(g)).unwrap();
        assert!(s2.is_cancellation_free());
        let c = compose(&s2, &s2).unwrap();
        assert_eq!(c.size(), 2);
        assert_eq!(c.matrix_of(), BitMatrix::identity(2));
        assert!(!c.is_cancellation_free());
    }

    #[test]
    fn compose_with_identity_wiring() {
        let c = cf_example();
        let mut id = Circuit::new(4, Connective::Xor);
        for i in 0..4 {
            id.add_output(Some(Signal::Input(i))).unwrap();
        }
        assert_eq!(compose(&c, &id).unwrap().matrix_of(), c.matrix_of());
        assert_eq!(compose(&id, &c).unwrap().matrix_of(), c.matrix_of());
        assert!(compose(&c, &single_gate()).is_err());
    }

    fn rowwise(a: &BitMatrix) -> Circuit {
        let mut c = Circuit::new(a.cols(), Connective::Xor);
        for i in 0..a.rows() {
            let mut acc: Option<Signal> = None;
            for j in a.row(i).iter_ones() {
                acc = Some(match acc {
                    None => Signal::Input(j),
                    Some(s) => c.gate(s, Signal::Input(j)),
                });
            }
            c.add_output(acc).unwrap();
        }
        c
    }

    proptest! {
        #[test]
        fn restriction_commutes_with_matrix(seed: u64, mask in 0u32..256) {
            let a = gen_random(6, 8, seed);
            let c = rowwise(&a);
            let z: Vec<usize> = (0..8).filter(|i| (mask >> i) & 1 == 1).collect();
            let r = restrict_zero(&c, &z).unwrap();
            prop_assert_eq!(r.reduced.matrix_of(), a.zero_columns(&z));
            prop_assert_eq!(r.reduced.size() + r.eliminated.len(), c.size());
        }

        #[test]
        fn composition_is_associative(seed: u64) {
            let a = rowwise(&gen_random(3, 4, seed));
            let b = rowwise(&gen_random(4, 5, seed ^ 1));
            let c = rowwise(&gen_random(5, 6, seed ^ 2));
            let left = compose(&a, &compose(&b, &c).unwrap()).unwrap();
            let right = compose(&compose(&a, &b).unwrap(), &c).unwrap();
            prop_assert_eq!(left.matrix_of(), right.matrix_of());
            let expect = a.matrix_of().mul_gf2(&b.matrix_of()).unwrap().mul_gf2(&c.matrix_of()).unwrap();
            prop_assert_eq!(left.matrix_of(), expect);
        }
    }
}

//! Constructions for specific matrix families and for products.

use std::fmt;
use std::str::FromStr;

use crate::circuits::{compose, Circuit, Connective, LayeredCircuit, Signal};
use crate::error::{Error, Result};
use crate::matrices::{binary_expansion_matrix, check_power_of_two, BitMatrix};

use super::{chain, lupanov, lupanov_depth2, lupanov_with, SynthesisResult};

/// Outputs of `S_k` on the inputs `xs`, built as the two halves plus one
/// gate per row of the lower half.
fn sierpinski_rec(c: &mut Circuit, xs: &[usize]) -> Vec<Signal> {
    if xs.len() == 1 {
        return vec![Signal::Input(xs[0])];
    }
    let (lo, hi) = xs.split_at(xs.len() / 2);
    let top = sierpinski_rec(c, lo);
    let right = sierpinski_rec(c, hi);
    let bottom: Vec<Signal> = top.iter().zip(&right).map(|(&a, &b)| c.gate(a, b)).collect();
    top.into_iter().chain(bottom).collect()
}

/// Cancellation-free circuit for `S_n` with exactly `n/2 · log2 n` gates.
pub fn sierpinski_circuit(n: usize) -> Result<SynthesisResult> {
    check_power_of_two(n)?;
    let mut c = Circuit::new(n, Connective::Xor);
    let xs: Vec<usize> = (0..n).collect();
    let outs = sierpinski_rec(&mut c, &xs);
    *c.outputs_mut() = outs.into_iter().map(Some).collect();
    Ok(SynthesisResult::fanin2(c, "sierpinski"))
}

/// OR circuit for `K_n` through `K_n = B·Bᵀ`, `B` the `n × log2 n` binary
/// expansion matrix: block constructions for `Bᵀ` and `B`, composed.
pub fn setintersection_or_circuit(n: usize) -> Result<SynthesisResult> {
    check_power_of_two(n)?;
    let b = binary_expansion_matrix(n)?;
    let inner = lupanov_with(&b.transpose(), Connective::Or);
    let outer = lupanov_with(&b, Connective::Or);
    let c = compose(outer.circuit.as_fanin2().expect("fan-in 2"), inner.circuit.as_fanin2().expect("fan-in 2"))?;
    Ok(SynthesisResult::fanin2(c, "setint")
        .param("inner_gates", inner.cost)
        .param("outer_gates", outer.cost))
}

/// XOR circuit for `H_n` through a GF(2) rank factorization `H_n = L·R`
/// (rank `log2 n + 1` for `n ≥ 2`), block constructions for both factors.
pub fn hadamard_circuit(n: usize) -> Result<SynthesisResult> {
    check_power_of_two(n)?;
    let h = crate::matrices::gen_hadamard(n)?;
    let f = h.rank_factorize_gf2();
    let inner = lupanov(&f.right);
    let outer = lupanov(&f.left);
    let c = compose(outer.circuit.as_fanin2().expect("fan-in 2"), inner.circuit.as_fanin2().expect("fan-in 2"))?;
    Ok(SynthesisResult::fanin2(c, "hadamard")
        .param("rank", f.rank)
        .param("inner_gates", inner.cost)
        .param("outer_gates", outer.cost))
}

/// Circuit for `complement(A)` from an XOR circuit for `A`: a parity chain
/// `p = x_1 ⊕ … ⊕ x_n` (`n − 1` gates) and `y_i ⊕ p` for every output
/// (a constant-0 output becomes `p` itself).
pub fn complement_transform(c: &Circuit) -> Result<Circuit> {
    if c.connective() != Connective::Xor {
        return Err(Error::InvalidInput("complement transform needs an XOR circuit".into()));
    }
    let mut out = c.clone();
    out.outputs_mut().clear();
    let xs: Vec<Signal> = (0..c.n_inputs()).map(Signal::Input).collect();
    let Some(p) = chain(&mut out, &xs) else {
        return Ok(c.clone());
    };
    for o in c.outputs() {
        let y = match *o {
            Some(s) => out.gate(s, p),
            None => p,
        };
        out.outputs_mut().push(Some(y));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthMode {
    /// Fan-in-2 block circuits for both factors, composed.
    Fanin2,
    /// Depth-2 block circuits for both factors, stacked into depth 4.
    Depth4,
}

impl FromStr for DepthMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fanin2" => Ok(DepthMode::Fanin2),
            "depth4" => Ok(DepthMode::Depth4),
            _ => Err(Error::InvalidInput(format!("unknown depth mode {s:?} (fanin2|depth4)"))),
        }
    }
}

impl fmt::Display for DepthMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DepthMode::Fanin2 => "fanin2",
            DepthMode::Depth4 => "depth4",
        })
    }
}

/// XOR circuit for `B·C` over GF(2): a circuit for `C` feeding one for `B`.
/// The composition introduces cancellations whenever `B` sums overlapping
/// rows of `C`.
pub fn product_circuit(b: &BitMatrix, c: &BitMatrix, mode: DepthMode) -> Result<SynthesisResult> {
    if b.cols() != c.rows() {
        return Err(Error::DimensionMismatch(format!(
            "B is {}×{}, C is {}×{}",
            b.rows(),
            b.cols(),
            c.rows(),
            c.cols()
        )));
    }
    let r = match mode {
        DepthMode::Fanin2 => {
            let (ob, ic) = (lupanov(b), lupanov(c));
            let circ = compose(ob.circuit.as_fanin2().expect("fan-in 2"), ic.circuit.as_fanin2().expect("fan-in 2"))?;
            SynthesisResult::fanin2(circ, "product")
                .param("outer_gates", ob.cost)
                .param("inner_gates", ic.cost)
        }
        DepthMode::Depth4 => {
            let (ob, ic) = (lupanov_depth2(b), lupanov_depth2(c));
            let l = LayeredCircuit::compose(
                ob.circuit.as_layered().expect("layered"),
                ic.circuit.as_layered().expect("layered"),
            )?;
            SynthesisResult::layered(l, "product")
                .param("outer_wires", ob.cost)
                .param("inner_wires", ic.cost)
        }
    };
    Ok(r.param("depth_mode", mode.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrices::{gen_hadamard, gen_random, gen_setintersection, gen_sierpinski, BitVec};
    use proptest::prelude::*;

    #[test]
    fn sierpinski_sizes() {
        assert_eq!(sierpinski_circuit(1).unwrap().cost, 0);
        assert_eq!(sierpinski_circuit(2).unwrap().cost, 1);
        let r = sierpinski_circuit(8).unwrap();
        assert_eq!(r.cost, 12);
        assert!(r.verify(&gen_sierpinski(8).unwrap()).unwrap() && r.cancellation_free);
        assert_eq!(sierpinski_circuit(256).unwrap().cost, 1024);
        assert!(sierpinski_circuit(6).is_err());
    }

    #[test]
    fn setintersection_small() {
        let r = setintersection_or_circuit(2).unwrap();
        assert!(r.verify(&gen_setintersection(2).unwrap()).unwrap());
        assert!(r.cost <= 2);
        let r = setintersection_or_circuit(4).unwrap();
        let c = r.circuit.as_fanin2().unwrap();
        let y = c.eval(&BitVec::unit(4, 3).to_bools()).unwrap();
        let k4 = gen_setintersection(4).unwrap();
        assert_eq!(y, (0..4).map(|i| k4.get(i, 3)).collect::<Vec<_>>());
        assert!(setintersection_or_circuit(1).unwrap().verify(&gen_setintersection(1).unwrap()).unwrap());
    }

    #[test]
    fn setintersection_linear() {
        for n in [64usize, 128, 256, 512, 1024] {
            let r = setintersection_or_circuit(n).unwrap();
            assert!(r.verify(&gen_setintersection(n).unwrap()).unwrap());
            assert!(r.cost <= 8 * n, "n={n}: {}", r.cost);
        }
    }

    #[test]
    fn hadamard_small_and_linear() {
        let r = hadamard_circuit(2).unwrap();
        assert_eq!(r.cost, 1);
        assert!(r.verify(&gen_hadamard(2).unwrap()).unwrap());
        let r = hadamard_circuit(16).unwrap();
        assert!(r.verify(&gen_hadamard(16).unwrap()).unwrap());
        assert!(!r.cancellation_free);
        for n in [64usize, 128, 256, 512, 1024] {
            let r = hadamard_circuit(n).unwrap();
            assert!(r.verify(&gen_hadamard(n).unwrap()).unwrap());
            assert!(r.cost <= 10 * n, "n={n}: {}", r.cost);
        }
    }

    #[test]
    fn complement_of_sierpinski() {
        for n in [1usize, 2, 4, 8, 64] {
            let s = sierpinski_circuit(n).unwrap();
            let c = s.circuit.as_fanin2().unwrap();
            let t = complement_transform(c).unwrap();
            assert_eq!(t.size() - c.size(), 2 * n - 1);
            let comp = gen_sierpinski(n).unwrap().complement();
            assert!(t.verify(&comp).unwrap());
            let back = complement_transform(&t).unwrap();
            assert!(back.verify(&gen_sierpinski(n).unwrap()).unwrap());
            if n >= 2 {
                assert!(!t.is_cancellation_free());
            }
        }
        let or = Circuit::new(2, Connective::Or);
        assert!(complement_transform(&or).is_err());
    }

    #[test]
    fn product_modes() {
        let i = BitMatrix::identity(5);
        assert!(product_circuit(&i, &i, DepthMode::Fanin2).unwrap().verify(&i).unwrap());
        assert!(product_circuit(&i, &i, DepthMode::Depth4).unwrap().verify(&i).unwrap());
        let (b, c) = (gen_random(64, 84, 1), gen_random(84, 64, 2));
        let a = b.mul_gf2(&c).unwrap();
        let f = product_circuit(&b, &c, DepthMode::Fanin2).unwrap();
        assert!(f.verify(&a).unwrap());
        assert_eq!(f.cost, lupanov(&b).cost + lupanov(&c).cost);
        let d = product_circuit(&b, &c, DepthMode::Depth4).unwrap();
        assert!(d.verify(&a).unwrap());
        assert_eq!(d.circuit.depth(), 4);
        assert!(product_circuit(&b, &b, DepthMode::Fanin2).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn product_verifies(m in 1usize..=16, k in 1usize..=16, n in 1usize..=16, s in any::<u64>()) {
            let b = gen_random(m, k, s);
            let c = gen_random(k, n, s.wrapping_add(1));
            let a = b.mul_gf2(&c).unwrap();
            for mode in [DepthMode::Fanin2, DepthMode::Depth4] {
                let r = product_circuit(&b, &c, mode).unwrap();
                prop_assert!(r.verify(&a).unwrap());
            }
        }
    }
}

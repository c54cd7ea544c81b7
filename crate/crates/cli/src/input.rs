//! Reading matrices and circuits from paths, generator names or stdin.

use std::fs;
use std::io::{self, Read};
use std::path::Path;

use cfcircuit::circuits::{Circuit, LayeredCircuit};
use cfcircuit::matrices::MatrixSpec;
use cfcircuit::BitMatrix;

use crate::Failure;

fn read_source(arg: &str) -> Result<String, Failure> {
    if arg == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Invalid(format!("reading stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(arg).map_err(|e| Failure::Invalid(format!("{arg}: {e}")))
}

/// `-` reads stdin, an existing path is read as a file, anything else must
/// be a generator such as `sierpinski:8`.
pub fn load_matrix(arg: &str) -> Result<BitMatrix, Failure> {
    if arg == "-" || Path::new(arg).exists() {
        let text = read_source(arg)?;
        return BitMatrix::parse(&text).map_err(|e| Failure::Invalid(format!("{arg}: {e}")));
    }
    let spec: MatrixSpec = arg
        .parse()
        .map_err(|e| Failure::Invalid(format!("{arg} is neither a file nor a generator: {e}")))?;
    spec.build().map_err(|e| Failure::Invalid(format!("{arg}: {e}")))
}

pub enum AnyCircuit {
    Fanin2(Circuit),
    Layered(LayeredCircuit),
}

fn is_layered(text: &str) -> bool {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .is_some_and(|h| h.split_whitespace().any(|w| w == "layers"))
}

pub fn load_circuit(arg: &str) -> Result<AnyCircuit, Failure> {
    let text = read_source(arg)?;
    let parsed = if is_layered(&text) {
        text.parse().map(AnyCircuit::Layered)
    } else {
        text.parse().map(AnyCircuit::Fanin2)
    };
    parsed.map_err(|e| Failure::Invalid(format!("{arg}: {e}")))
}

//! Text formats.
//!
//! Straight-line programs:
//!
//! ```text
//! inputs 4 connective XOR
//! t1 = x1 + x2
//! t2 = t1 + x3
//! outputs: y1=t1 y2=t2 y3=x4 y4=0
//! ```
//!
//! `+` is the circuit's connective and `0` marks a constant-0 output.
//! Layered circuits use `g<layer>.<index>` names and list every gate of a
//! layer before the next layer:
//!
//! ```text
//! inputs 4 connective XOR layers 2
//! g1.1 = x2 + x3 + x4
//! g2.1 = g1.1 + x1
//! outputs: y1=g2.1 y2=g1.1 y3=0 y4=x4
//! ```
//!
//! Blank lines and lines starting with `#` are ignored when parsing.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::layered::{LayerRef, LayeredCircuit};
use super::slp::{Circuit, Connective, Signal};

fn fmt_signal(s: Signal) -> String {
    match s {
        Signal::Input(i) => format!("x{}", i + 1),
        Signal::Gate(k) => format!("t{}", k + 1),
    }
}

fn fmt_layer_ref(r: LayerRef) -> String {
    match r {
        LayerRef::Input(i) => format!("x{}", i + 1),
        LayerRef::Node { layer, index } => format!("g{}.{}", layer + 1, index + 1),
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "inputs {} connective {}", self.n_inputs(), self.connective())?;
        for (k, g) in self.gates().iter().enumerate() {
            writeln!(f, "t{} = {} + {}", k + 1, fmt_signal(g.left), fmt_signal(g.right))?;
        }
        f.write_str("outputs:")?;
        for (i, o) in self.outputs().iter().enumerate() {
            let r = o.map_or_else(|| "0".to_string(), fmt_signal);
            write!(f, " y{}={}", i + 1, r)?;
        }
        writeln!(f)
    }
}

impl fmt::Display for LayeredCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "inputs {} connective {} layers {}",
            self.n_inputs(),
            self.connective(),
            self.depth()
        )?;
        for (l, layer) in self.layers().iter().enumerate() {
            for (k, gate) in layer.iter().enumerate() {
                let rhs: Vec<String> = gate.iter().map(|&r| fmt_layer_ref(r)).collect();
                writeln!(f, "g{}.{} = {}", l + 1, k + 1, rhs.join(" + "))?;
            }
        }
        f.write_str("outputs:")?;
        for (i, o) in self.outputs().iter().enumerate() {
            let r = o.map_or_else(|| "0".to_string(), fmt_layer_ref);
            write!(f, " y{}={}", i + 1, r)?;
        }
        writeln!(f)
    }
}

/// Whitespace-separated tokens with their 1-based column.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter().map(|(s, t)| (line[..s].chars().count() + 1, t)).collect()
}

fn content_lines(input: &str) -> impl Iterator<Item = (usize, &str)> {
    input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}

fn parse_index(s: &str, line: usize, col: usize, what: &str) -> Result<usize> {
    let v: usize = s
        .parse()
        .map_err(|_| Error::parse(line, col, format!("bad {what} index {s:?}")))?;
    if v == 0 {
        return Err(Error::parse(line, col, format!("{what} indices start at 1")));
    }
    Ok(v - 1)
}

struct Header {
    n_inputs: usize,
    connective: Connective,
    layers: Option<usize>,
}

fn parse_header(line_no: usize, line: &str) -> Result<Header> {
    let t = tokens(line);
    let expect = |i: usize, word: &str| -> Result<()> {
        match t.get(i) {
            Some((_, w)) if *w == word => Ok(()),
            Some((c, w)) => Err(Error::parse(line_no, *c, format!("expected {word:?}, found {w:?}"))),
            None => Err(Error::parse(line_no, line.len() + 1, format!("expected {word:?}"))),
        }
    };
    expect(0, "inputs")?;
    let (c, n) = t
        .get(1)
        .ok_or_else(|| Error::parse(line_no, line.len() + 1, "missing input count"))?;
    let n_inputs: usize = n
        .parse()
        .map_err(|_| Error::parse(line_no, *c, format!("bad input count {n:?}")))?;
    expect(2, "connective")?;
    let (c, conn) = t
        .get(3)
        .ok_or_else(|| Error::parse(line_no, line.len() + 1, "missing connective"))?;
    let connective = match *conn {
        "XOR" => Connective::Xor,
        "OR" => Connective::Or,
        other => return Err(Error::parse(line_no, *c, format!("unknown connective {other:?}"))),
    };
    let layers = if t.len() > 4 {
        expect(4, "layers")?;
        let (c, d) = t
            .get(5)
            .ok_or_else(|| Error::parse(line_no, line.len() + 1, "missing layer count"))?;
        Some(d.parse().map_err(|_| Error::parse(line_no, *c, format!("bad layer count {d:?}")))?)
    } else {
        None
    };
    let used = if layers.is_some() { 6 } else { 4 };
    if let Some((c, w)) = t.get(used) {
        return Err(Error::parse(line_no, *c, format!("unexpected {w:?}")));
    }
    Ok(Header {
        n_inputs,
        connective,
        layers,
    })
}

/// Parses the `outputs:` line, resolving each reference with `resolve`.
fn parse_outputs<R>(
    line_no: usize,
    line: &str,
    mut resolve: impl FnMut(&str, usize) -> Result<R>,
) -> Result<Vec<Option<R>>> {
    let t = tokens(line);
    match t.first() {
        Some((_, "outputs:")) => {}
        Some((c, w)) => return Err(Error::parse(line_no, *c, format!("expected \"outputs:\", found {w:?}"))),
        None => return Err(Error::parse(line_no, 1, "expected outputs")),
    }
    let mut outs = Vec::new();
    for (k, (c, tok)) in t.iter().skip(1).enumerate() {
        let (name, r) = tok
            .split_once('=')
            .ok_or_else(|| Error::parse(line_no, *c, format!("expected y<i>=<ref>, found {tok:?}")))?;
        if name != format!("y{}", k + 1) {
            return Err(Error::parse(line_no, *c, format!("expected y{}, found {name:?}", k + 1)));
        }
        let rc = c + name.len() + 1;
        outs.push(if r == "0" { None } else { Some(resolve(r, rc)?) });
    }
    Ok(outs)
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let mut lines = content_lines(input);
        let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, 1, "empty circuit"))?;
        let h = parse_header(hl, header)?;
        if h.layers.is_some() {
            return Err(Error::parse(hl, 1, "layered circuit where a straight-line program was expected"));
        }
        let mut c = Circuit::new(h.n_inputs, h.connective);
        let resolve = |c: &Circuit, s: &str, line: usize, col: usize| -> Result<Signal> {
            let sig = if let Some(i) = s.strip_prefix('x') {
                let i = parse_index(i, line, col, "input")?;
                if i >= c.n_inputs() {
                    return Err(Error::parse(line, col, format!("input {s} out of range")));
                }
                Signal::Input(i)
            } else if let Some(k) = s.strip_prefix('t') {
                let k = parse_index(k, line, col, "gate")?;
                if k >= c.size() {
                    return Err(Error::parse(line, col, format!("gate {s} used before definition")));
                }
                Signal::Gate(k)
            } else {
                return Err(Error::parse(line, col, format!("bad reference {s:?}")));
            };
            Ok(sig)
        };
        for (ln, line) in lines {
            let t = tokens(line);
            if t.first().map(|x| x.1) == Some("outputs:") {
                let outs = parse_outputs(ln, line, |s, col| resolve(&c, s, ln, col))?;
                for o in outs {
                    c.add_output(o)?;
                }
                return Ok(c);
            }
            match t.as_slice() {
                [(c0, name), (c1, "="), (c2, a), (c3, "+"), (c4, b)] => {
                    if *name != format!("t{}", c.size() + 1) {
                        return Err(Error::parse(ln, *c0, format!("expected t{}, found {name:?}", c.size() + 1)));
                    }
                    let _ = (c1, c3);
                    let l = resolve(&c, a, ln, *c2)?;
                    let r = resolve(&c, b, ln, *c4)?;
                    c.add_gate(l, r)?;
                }
                _ => {
                    let col = t.first().map_or(1, |x| x.0);
                    return Err(Error::parse(ln, col, "expected \"t<k> = <ref> + <ref>\" or \"outputs:\""));
                }
            }
        }
        Err(Error::parse(
            input.lines().count() + 1,
            1,
            "missing outputs line (truncated circuit?)",
        ))
    }
}

impl FromStr for LayeredCircuit {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let mut lines = content_lines(input);
        let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, 1, "empty circuit"))?;
        let h = parse_header(hl, header)?;
        let depth = h
            .layers
            .ok_or_else(|| Error::parse(hl, 1, "layered circuit header needs \"layers <d>\""))?;
        let mut c = LayeredCircuit::new(h.n_inputs, h.connective, depth);
        let parse_node = |s: &str, line: usize, col: usize| -> Result<(usize, usize)> {
            let body = s
                .strip_prefix('g')
                .ok_or_else(|| Error::parse(line, col, format!("bad reference {s:?}")))?;
            let (l, k) = body
                .split_once('.')
                .ok_or_else(|| Error::parse(line, col, format!("bad gate name {s:?}")))?;
            Ok((parse_index(l, line, col, "layer")?, parse_index(k, line, col, "gate")?))
        };
        let resolve = |c: &LayeredCircuit, s: &str, line: usize, col: usize| -> Result<LayerRef> {
            if let Some(i) = s.strip_prefix('x') {
                let i = parse_index(i, line, col, "input")?;
                if i >= c.n_inputs() {
                    return Err(Error::parse(line, col, format!("input {s} out of range")));
                }
                return Ok(LayerRef::Input(i));
            }
            let (layer, index) = parse_node(s, line, col)?;
            if layer >= c.depth() || index >= c.layers()[layer].len() {
                return Err(Error::parse(line, col, format!("gate {s} used before definition")));
            }
            Ok(LayerRef::Node { layer, index })
        };
        for (ln, line) in lines {
            let t = tokens(line);
            if t.first().map(|x| x.1) == Some("outputs:") {
                let outs = parse_outputs(ln, line, |s, col| resolve(&c, s, ln, col))?;
                for o in outs {
                    c.add_output(o)?;
                }
                return Ok(c);
            }
            if t.len() < 3 || t[1].1 != "=" || t.len().is_multiple_of(2) {
                let col = t.first().map_or(1, |x| x.0);
                return Err(Error::parse(ln, col, "expected \"g<l>.<k> = <ref> + ... + <ref>\""));
            }
            let (layer, index) = parse_node(t[0].1, ln, t[0].0)?;
            if layer >= depth || index != c.layers()[layer].len() {
                return Err(Error::parse(ln, t[0].0, format!("gate {} out of order", t[0].1)));
            }
            if c.layers()[layer + 1..].iter().any(|l| !l.is_empty()) {
                return Err(Error::parse(ln, t[0].0, "layers must be listed in order"));
            }
            let mut children = Vec::new();
            for (i, (col, tok)) in t.iter().enumerate().skip(2) {
                if i % 2 == 1 {
                    if *tok != "+" {
                        return Err(Error::parse(ln, *col, format!("expected \"+\", found {tok:?}")));
                    }
                    continue;
                }
                let r = resolve(&c, tok, ln, *col)?;
                if let LayerRef::Node { layer: l, .. } = r {
                    if l >= layer {
                        return Err(Error::parse(ln, *col, format!("{tok} is not in an earlier layer")));
                    }
                }
                children.push(r);
            }
            c.add_gate(layer, children)?;
        }
        Err(Error::parse(
            input.lines().count() + 1,
            1,
            "missing outputs line (truncated circuit?)",
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::layered::fixtures::depth_two_example;
    use crate::circuits::slp::fixtures::{cf_example, cancelling_example};

    #[test]
    fn slp_text_is_canonical() {
        let c = cf_example();
        let t = c.to_string();
        assert_eq!(
            t,
            "inputs 4 connective XOR\nt1 = x1 + x2\nt2 = t1 + x3\nt3 = t2 + x4\nt4 = x2 + x3\nt5 = t4 + x4\noutputs: y1=t1 y2=t2 y3=t3 y4=t5\n"
        );
        let back: Circuit = t.parse().unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_string(), t);
        let r = cancelling_example();
        assert_eq!(r.to_string().parse::<Circuit>().unwrap(), r);
    }

    #[test]
    fn constant_outputs_and_comments() {
        let src = "# comment\ninputs 2 connective OR\n\noutputs: y1=0 y2=x2\n";
        let c: Circuit = src.parse().unwrap();
        assert_eq!(c.outputs(), &[None, Some(Signal::Input(1))]);
        assert_eq!(c.connective(), Connective::Or);
    }

    #[test]
    fn parse_errors() {
        let err = |s: &str| match s.parse::<Circuit>() {
            Err(Error::Parse { line, column, .. }) => (line, column),
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(err("inputs 2 connective XOR\nt1 = x1 + x3\noutputs: y1=t1\n"), (2, 11));
        assert_eq!(err("inputs 2 connective XOR\nt1 = x1 + t1\noutputs: y1=t1\n"), (2, 11));
        assert_eq!(err("inputs 2 connective XOR\nt2 = x1 + x2\n"), (2, 1));
        assert_eq!(err("inputs 2 connective AND\n"), (1, 21));
        assert_eq!(err("inputs 2 connective XOR\nt1 = x1 + x2\n").0, 3);
        assert_eq!(err("inputs 2 connective XOR\noutputs: y2=x1\n"), (2, 10));
        assert_eq!(err(""), (1, 1));
    }

    #[test]
    fn layered_round_trip() {
        let l = depth_two_example();
        let t = l.to_string();
        assert!(t.starts_with("inputs 4 connective XOR layers 2\ng1.1 = x2 + x3 + x4\n"));
        let back: LayeredCircuit = t.parse().unwrap();
        assert_eq!(back, l);
        assert_eq!(back.to_string(), t);
        assert!("inputs 2 connective XOR layers 1\ng1.1 = g1.1\noutputs: y1=g1.1\n"
            .parse::<LayeredCircuit>()
            .is_err());
        assert!(t.parse::<Circuit>().is_err());
    }
}

//! Minimum circuit size for small matrices by exhaustive search.
//!
//! A state is the list of known value vectors (the unit vectors first). A
//! step appends one combination of two known vectors: XOR, disjoint union
//! (cancellation-free), or OR. The search deepens the gate bound one at a
//! time, so the first bound with a solution is the optimum.
//!
//! Pruning, each step of which keeps at least one optimal circuit reachable:
//!
//! * Forced targets. A missing target row that one gate can produce right
//!   now is added immediately. Any solution produces that row at some point;
//!   producing it earlier from the currently available children costs the
//!   same and only enlarges every later state.
//! * Canonical order. Let `c` be the previous free (non-forced) choice and
//!   `S` the state just before it. The next free choice `v` must satisfy
//!   `v > c` or be impossible to produce from `S`. Otherwise `v` and `c` can
//!   be swapped: both orders end in the same state, because adding forced
//!   targets until none is producible has a unique result. Swapping removes
//!   an inversion, so some optimal sequence obeys the rule everywhere.
//! * Lower bound. Every missing target costs one gate, and when none of them
//!   is producible at least one more non-target gate is needed first.
//! * In the cancellation-free and OR models vectors only grow along paths,
//!   so a vector that is not below some target row can never feed one and is
//!   not generated.

mod census;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuits::{Circuit, Connective, Signal};
use crate::error::{Error, Result};
use crate::matrices::BitMatrix;

pub use census::{census, Census, CensusEntry, ModelHistogram, MAX_CENSUS_N};

pub const DEFAULT_LIMIT: usize = 14;
pub const MAX_LIMIT: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Model {
    #[serde(rename = "xor")]
    Xor,
    #[serde(rename = "cf")]
    Cf,
    #[serde(rename = "or")]
    Or,
}

impl Model {
    pub const ALL: [Model; 3] = [Model::Xor, Model::Cf, Model::Or];

    /// The connective of the circuits this model searches over.
    pub fn connective(self) -> Connective {
        match self {
            Model::Xor | Model::Cf => Connective::Xor,
            Model::Or => Connective::Or,
        }
    }

    /// The vector produced by a gate on `a` and `b`, if the model allows it.
    #[inline]
    fn combine(self, a: u64, b: u64) -> Option<u64> {
        match self {
            Model::Xor => Some(a ^ b),
            Model::Cf => (a & b == 0).then_some(a | b),
            Model::Or => Some(a | b),
        }
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xor" => Ok(Model::Xor),
            "cf" => Ok(Model::Cf),
            "or" => Ok(Model::Or),
            _ => Err(Error::InvalidInput(format!("unknown model {s:?} (xor|cf|or)"))),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Xor => "xor",
            Model::Cf => "cf",
            Model::Or => "or",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Optimal,
    /// No circuit with at most `limit` gates exists.
    ExceedsLimit,
    /// The node budget ran out; `lower_bound` is still valid.
    NodeBudget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    pub limit: usize,
    pub max_nodes: Option<u64>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            limit: DEFAULT_LIMIT,
            max_nodes: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub model: Model,
    pub status: SearchStatus,
    pub optimal_size: Option<usize>,
    /// Every circuit in the model has at least this many gates.
    pub lower_bound: usize,
    pub witness: Option<Circuit>,
    pub nodes_expanded: u64,
    pub limit: usize,
}

struct Search<'a> {
    model: Model,
    targets: &'a [u64],
    state: Vec<u64>,
    units: usize,
    /// `(left, right)` state indices per added vector.
    parents: Vec<(usize, usize)>,
    nodes: u64,
    max_nodes: u64,
    out_of_nodes: bool,
}

impl Search<'_> {
    fn contains(&self, v: u64) -> bool {
        self.state.contains(&v)
    }

    /// Children producing `v` from the first `len` vectors of the state.
    fn producer(&self, v: u64, len: usize) -> Option<(usize, usize)> {
        let s = &self.state[..len];
        for i in 0..len {
            if self.model != Model::Xor && s[i] & !v != 0 {
                continue;
            }
            for j in i + 1..len {
                if self.model.combine(s[i], s[j]) == Some(v) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    fn missing(&self) -> usize {
        self.targets.iter().filter(|&&t| !self.contains(t)).count()
    }

    fn push(&mut self, v: u64, p: (usize, usize)) {
        self.state.push(v);
        self.parents.push(p);
    }

    fn truncate(&mut self, len: usize) {
        self.state.truncate(len);
        self.parents.truncate(len - self.units);
    }

    /// Adds producible targets until none is left.
    fn close(&mut self) {
        loop {
            let len = self.state.len();
            let found = self
                .targets
                .iter()
                .filter(|&&t| !self.state.contains(&t))
                .find_map(|&t| self.producer(t, len).map(|p| (t, p)));
            match found {
                Some((t, p)) => self.push(t, p),
                None => return,
            }
        }
    }

    fn useful(&self, v: u64) -> bool {
        self.model == Model::Xor || self.targets.iter().any(|&t| v & !t == 0)
    }

    /// Free choices allowed after `prev = (vector, state length before it)`.
    fn candidates(&self, prev: Option<(u64, usize)>) -> Vec<(u64, (usize, usize))> {
        let len = self.state.len();
        let mut out: Vec<(u64, (usize, usize))> = Vec::new();
        for i in 0..len {
            for j in i + 1..len {
                let Some(v) = self.model.combine(self.state[i], self.state[j]) else {
                    continue;
                };
                if v == 0 || !self.useful(v) || self.contains(v) {
                    continue;
                }
                out.push((v, (i, j)));
            }
        }
        out.sort_unstable_by_key(|&(v, _)| v);
        out.dedup_by_key(|&mut (v, _)| v);
        if let Some((c, before)) = prev {
            out.retain(|&(v, _)| v > c || self.producer(v, before).is_none());
        }
        out
    }

    /// True if the targets can be completed within `budget` further gates.
    fn dfs(&mut self, budget: usize, prev: Option<(u64, usize)>) -> bool {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            self.out_of_nodes = true;
            return false;
        }
        let len = self.state.len();
        self.close();
        let forced = self.state.len() - len;
        if forced > budget {
            self.truncate(len);
            return false;
        }
        let budget = budget - forced;
        let missing = self.missing();
        if missing == 0 {
            return true;
        }
        if missing + 1 > budget {
            self.truncate(len);
            return false;
        }
        for (v, p) in self.candidates(prev) {
            let before = self.state.len();
            self.push(v, p);
            if self.dfs(budget - 1, Some((v, before))) {
                return true;
            }
            self.truncate(before);
            if self.out_of_nodes {
                break;
            }
        }
        self.truncate(len);
        false
    }

    fn witness(&self, n: usize, rows: &[u64]) -> Circuit {
        let mut c = Circuit::new(n, self.model.connective());
        let sig = |k: usize| {
            if k < n {
                Signal::Input(k)
            } else {
                Signal::Gate(k - n)
            }
        };
        for &(i, j) in &self.parents {
            c.add_gate(sig(i), sig(j)).expect("parents precede children");
        }
        for &r in rows {
            let out = (r != 0).then(|| sig(self.state.iter().position(|&v| v == r).expect("target reached")));
            c.add_output(out).expect("valid signal");
        }
        c
    }
}

/// Minimum number of gates of a circuit for `a` in `model`, with a witness.
pub fn optimal_size(a: &BitMatrix, model: Model, opts: SearchOptions) -> Result<SearchOutcome> {
    let n = a.cols();
    if n > 64 {
        return Err(Error::InvalidInput(format!("exact search supports at most 64 columns, got {n}")));
    }
    if opts.limit > MAX_LIMIT {
        return Err(Error::InvalidInput(format!("limit {} exceeds the maximum {MAX_LIMIT}", opts.limit)));
    }
    let rows: Vec<u64> = (0..a.rows()).map(|i| a.row_u64(i)).collect();
    let mut targets: Vec<u64> = rows.iter().copied().filter(|r| r.count_ones() >= 2).collect();
    targets.sort_unstable();
    targets.dedup();
    let mut s = Search {
        model,
        targets: &targets,
        state: (0..n).map(|j| 1u64 << j).collect(),
        units: n,
        parents: Vec::new(),
        nodes: 0,
        max_nodes: opts.max_nodes.unwrap_or(u64::MAX),
        out_of_nodes: false,
    };
    let start = targets.len();
    let mut lower_bound = start;
    let mut found = None;
    for bound in start..=opts.limit {
        if s.dfs(bound, None) {
            found = Some(bound);
            break;
        }
        if s.out_of_nodes {
            break;
        }
        lower_bound = bound + 1;
    }
    let (status, optimal_size, witness) = match found {
        Some(_) => {
            let size = s.parents.len();
            lower_bound = size;
            (SearchStatus::Optimal, Some(size), Some(s.witness(n, &rows)))
        }
        None if s.out_of_nodes => (SearchStatus::NodeBudget, None, None),
        None => (SearchStatus::ExceedsLimit, None, None),
    };
    Ok(SearchOutcome {
        model,
        status,
        optimal_size,
        lower_bound,
        witness,
        nodes_expanded: s.nodes,
        limit: opts.limit,
    })
}

#[cfg(test)]
pub(crate) mod oracle {
    //! Unpruned breadth-first search over every set of vectors on `n ≤ 4`
    //! coordinates: `dist[S]` is the fewest gates producing the non-unit set
    //! `S`, for every `S` at once.

    use super::Model;

    pub struct Oracle {
        n: usize,
        /// Index of each non-unit nonzero vector.
        slot: Vec<Option<usize>>,
        /// Fewest gates to produce at least the given set of non-units.
        best_superset: Vec<u8>,
    }

    impl Oracle {
        pub fn new(n: usize, model: Model) -> Self {
            assert!(n <= 4);
            let vectors: Vec<u64> = (1..1u64 << n).filter(|v| v.count_ones() >= 2).collect();
            let k = vectors.len();
            let mut slot = vec![None; 1 << n];
            for (i, &v) in vectors.iter().enumerate() {
                slot[v as usize] = Some(i);
            }
            let mut dist = vec![u8::MAX; 1 << k];
            dist[0] = 0;
            let mut frontier = vec![0usize];
            let mut d = 0u8;
            while !frontier.is_empty() {
                d += 1;
                let mut next = Vec::new();
                for &set in &frontier {
                    let known: Vec<u64> = (0..n)
                        .map(|j| 1u64 << j)
                        .chain((0..k).filter(|&i| set >> i & 1 == 1).map(|i| vectors[i]))
                        .collect();
                    for a in 0..known.len() {
                        for b in a + 1..known.len() {
                            let Some(v) = model.combine(known[a], known[b]) else { continue };
                            let Some(i) = slot.get(v as usize).copied().flatten() else { continue };
                            let ns = set | 1 << i;
                            if dist[ns] == u8::MAX {
                                dist[ns] = d;
                                next.push(ns);
                            }
                        }
                    }
                }
                frontier = next;
            }
            // Minimum over supersets.
            let mut best = dist;
            for bit in 0..k {
                for s in (0..1usize << k).rev() {
                    if s >> bit & 1 == 0 {
                        best[s] = best[s].min(best[s | 1 << bit]);
                    }
                }
            }
            Self { n, slot, best_superset: best }
        }

        /// Fewest gates computing all the given rows.
        pub fn optimum(&self, rows: &[u64]) -> usize {
            let mut set = 0usize;
            for &r in rows {
                assert!(r < 1 << self.n);
                if let Some(i) = self.slot[r as usize] {
                    set |= 1 << i;
                }
            }
            self.best_superset[set] as usize
        }
    }
}

//! Space-bounded reversible Turing machines and their configuration graphs.
//!
//! The machine model is a single tape of `space` cells with head moves
//! `L`, `R` and `S`. A move that would leave the tape halts the machine
//! without accepting. A machine accepts `x` when its run from the start
//! configuration reaches the accepting configuration for `x`: accept state,
//! head on cell 0, and the tape holding `x` again.
//!
//! Configurations are packed as a mixed-radix integer with the state as the
//! least significant digit, then the head position, then the tape cells
//! from cell 0 upwards:
//!
//! ```text
//! index = state + |Q| * (head + S * (tape[0] + |Σ| * (tape[1] + |Σ| * (...))))
//! ```

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::sparse_oracle::{Entry, RowOracleMatrix};
use crate::spectral::path_gap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
    S,
}

impl Move {
    fn delta(self) -> isize {
        match self {
            Move::L => -1,
            Move::R => 1,
            Move::S => 0,
        }
    }
}

/// The machine's JSON description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MachineSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub states: Vec<String>,
    pub start: String,
    pub accept: String,
    pub alphabet: Vec<String>,
    pub blank: String,
    pub space: usize,
    pub transitions: Vec<(String, String, String, String, Move)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Action {
    state: usize,
    write: usize,
    mv: Move,
}

#[derive(Debug, Clone)]
pub struct ReversibleTM {
    name: String,
    states: Vec<String>,
    alphabet: Vec<char>,
    blank: usize,
    start: usize,
    accept: usize,
    space: usize,
    /// Indexed by `state * |Σ| + symbol`.
    table: Vec<Option<Action>>,
    /// `(from, read, action)` triples, for reverse lookups.
    transitions: Vec<(usize, usize, Action)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Configuration {
    pub state: usize,
    pub head: usize,
    pub tape: Vec<usize>,
}

impl ReversibleTM {
    pub fn from_spec(spec: &MachineSpec) -> Result<Self> {
        let lookup = |names: &[String], what: &str, n: &str| {
            names.iter().position(|s| s == n).ok_or_else(|| Error::Parse(format!("unknown {what} {n:?}")))
        };
        ensure!(!spec.states.is_empty(), Parse, "machine has no states");
        ensure!(spec.space > 0, Parse, "space bound must be positive");
        for (i, s) in spec.states.iter().enumerate() {
            ensure!(!spec.states[..i].contains(s), Parse, "duplicate state {s:?}");
        }
        let mut alphabet = Vec::with_capacity(spec.alphabet.len());
        for s in &spec.alphabet {
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) if !alphabet.contains(&c) => alphabet.push(c),
                _ => return Err(Error::Parse(format!("bad or repeated tape symbol {s:?}"))),
            }
        }
        let start = lookup(&spec.states, "state", &spec.start)?;
        let accept = lookup(&spec.states, "state", &spec.accept)?;
        ensure!(start != accept, Parse, "start and accept states coincide");
        let blank = lookup(&spec.alphabet, "symbol", &spec.blank)?;

        let sigma = alphabet.len();
        let mut table = vec![None; spec.states.len() * sigma];
        let mut transitions = Vec::with_capacity(spec.transitions.len());
        for (q, a, q2, a2, mv) in &spec.transitions {
            let from = lookup(&spec.states, "state", q)?;
            let read = lookup(&spec.alphabet, "symbol", a)?;
            let action = Action {
                state: lookup(&spec.states, "state", q2)?,
                write: lookup(&spec.alphabet, "symbol", a2)?,
                mv: *mv,
            };
            let slot = &mut table[from * sigma + read];
            ensure!(slot.is_none(), Parse, "two transitions for ({q}, {a})");
            *slot = Some(action);
            transitions.push((from, read, action));
        }
        Ok(Self {
            name: spec.name.clone().unwrap_or_else(|| "machine".into()),
            states: spec.states.clone(),
            alphabet,
            blank,
            start,
            accept,
            space: spec.space,
            table,
            transitions,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_spec(&serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Same machine with a different space bound.
    pub fn with_space(&self, space: usize) -> Result<Self> {
        ensure!(space > 0, Config, "space bound must be positive");
        Ok(Self { space, ..self.clone() })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> usize {
        self.space
    }

    pub fn state_name(&self, state: usize) -> &str {
        &self.states[state]
    }

    /// Number of configurations, `|Q| · S · |Σ|^S`.
    pub fn dim(&self) -> Result<usize> {
        let sigma = self.alphabet.len();
        let tapes = (0..self.space).try_fold(1usize, |acc, _| acc.checked_mul(sigma));
        tapes
            .and_then(|t| t.checked_mul(self.space))
            .and_then(|t| t.checked_mul(self.states.len()))
            .ok_or_else(|| Error::Resource("configuration count overflows".into()))
    }

    pub fn encode(&self, c: &Configuration) -> usize {
        let sigma = self.alphabet.len();
        let tape = c.tape.iter().rev().fold(0usize, |acc, &s| acc * sigma + s);
        c.state + self.states.len() * (c.head + self.space * tape)
    }

    pub fn decode(&self, index: usize) -> Result<Configuration> {
        let dim = self.dim()?;
        ensure!(index < dim, Range, "configuration index {index} >= {dim}");
        let q = self.states.len();
        let sigma = self.alphabet.len();
        let state = index % q;
        let rest = index / q;
        let head = rest % self.space;
        let mut code = rest / self.space;
        let tape = (0..self.space)
            .map(|_| {
                let s = code % sigma;
                code /= sigma;
                s
            })
            .collect();
        Ok(Configuration { state, head, tape })
    }

    fn tape_for(&self, input: &str) -> Result<Vec<usize>> {
        let mut tape = vec![self.blank; self.space];
        for (cell, ch) in input.chars().enumerate() {
            ensure!(cell < self.space, Config, "input {input:?} longer than space bound {}", self.space);
            tape[cell] = self
                .alphabet
                .iter()
                .position(|&a| a == ch)
                .ok_or_else(|| Error::Config(format!("input symbol {ch:?} not in alphabet")))?;
        }
        Ok(tape)
    }

    /// Start configuration `s_x`: start state, head on cell 0, `x` then blanks.
    pub fn start_config(&self, input: &str) -> Result<Configuration> {
        Ok(Configuration { state: self.start, head: 0, tape: self.tape_for(input)? })
    }

    /// Accepting configuration for `x`: accept state, head on cell 0, tape `x`.
    pub fn accept_config(&self, input: &str) -> Result<Configuration> {
        Ok(Configuration { state: self.accept, head: 0, tape: self.tape_for(input)? })
    }

    pub fn step(&self, c: &Configuration) -> Option<Configuration> {
        let sigma = self.alphabet.len();
        let action = self.table[c.state * sigma + c.tape[c.head]]?;
        let head = c.head.checked_add_signed(action.mv.delta())?;
        if head >= self.space {
            return None;
        }
        let mut tape = c.tape.clone();
        tape[c.head] = action.write;
        Some(Configuration { state: action.state, head, tape })
    }

    pub fn successor(&self, index: usize) -> Option<usize> {
        let c = self.decode(index).ok()?;
        self.step(&c).map(|n| self.encode(&n))
    }

    /// All configurations whose step lands on `index`.
    pub fn predecessors(&self, index: usize) -> Vec<usize> {
        let Ok(c) = self.decode(index) else {
            return Vec::new();
        };
        let mut preds = Vec::new();
        for &(from, read, action) in &self.transitions {
            if action.state != c.state {
                continue;
            }
            let Some(head) = c.head.checked_add_signed(-action.mv.delta()) else {
                continue;
            };
            if head >= self.space || c.tape[head] != action.write {
                continue;
            }
            let mut tape = c.tape.clone();
            tape[head] = read;
            preds.push(self.encode(&Configuration { state: from, head, tape }));
        }
        preds.sort_unstable();
        preds
    }

    /// Exhaustive check of the properties the reductions rely on.
    pub fn validate(&self) -> Result<ValidationReport> {
        let dim = self.dim()?;
        let mut report = ValidationReport::default();
        report.accept_transition =
            self.transitions.iter().find(|(from, _, _)| *from == self.accept).map(|&(_, read, _)| self.alphabet[read]);

        let mut successor = vec![usize::MAX; dim];
        let mut predecessor = vec![usize::MAX; dim];
        for i in 0..dim {
            let Some(j) = self.successor(i) else { continue };
            successor[i] = j;
            if predecessor[j] != usize::MAX {
                if report.injectivity.is_none() {
                    report.injectivity = Some((self.decode(predecessor[j])?, self.decode(i)?));
                }
            } else {
                predecessor[j] = i;
            }
            if report.start_predecessor.is_none() && j % self.states.len() == self.start {
                report.start_predecessor = Some(self.decode(i)?);
            }
        }

        // Out-degree ≤ 1, so a walk that revisits a vertex of its own run
        // has found a cycle.
        let mut mark = vec![0u32; dim];
        'outer: for s in 0..dim {
            if mark[s] != 0 {
                continue;
            }
            let run = s as u32 + 1;
            let mut v = s;
            loop {
                if mark[v] == run {
                    report.cycle = Some(self.decode(v)?);
                    break 'outer;
                }
                if mark[v] != 0 {
                    break;
                }
                mark[v] = run;
                match successor[v] {
                    usize::MAX => break,
                    next => v = next,
                }
            }
        }
        Ok(report)
    }

    /// Runs the machine on `x` until it halts.
    pub fn simulate(&self, input: &str) -> Result<RunOutcome> {
        let target = self.accept_config(input)?;
        let mut c = self.start_config(input)?;
        let limit = self.dim()?;
        let mut steps = 0;
        while let Some(next) = self.step(&c) {
            c = next;
            steps += 1;
            ensure!(steps <= limit, Contract, "run on {input:?} does not halt");
        }
        Ok(RunOutcome { accepted: c == target, steps, halted_at: c })
    }

    /// Adjacency of the augmented configuration graph `G_x`.
    ///
    /// Row `i` holds the machine edge out of configuration `i` (if any), the
    /// accepting configuration holds the back edge to `s_x`, and every vertex
    /// other than `s_x` and the accepting configuration carries a self-loop.
    pub fn augmented_adjacency(&self, input: &str) -> Result<RowOracleMatrix> {
        let report = self.validate()?;
        ensure!(report.passed(), Contract, "machine {} failed validation: {report}", self.name);
        let dim = self.dim()?;
        let s = self.encode(&self.start_config(input)?);
        let t = self.encode(&self.accept_config(input)?);
        let machine = Arc::new(self.clone());
        let rows = Arc::clone(&machine);
        let row = move |i: usize| -> Vec<Entry> {
            if i == t {
                return vec![(s, 1)];
            }
            let mut r = Vec::with_capacity(2);
            if let Some(j) = rows.successor(i) {
                r.push((j, 1));
            }
            if i != s {
                r.push((i, 1));
            }
            r.sort_unstable();
            r
        };
        let column = move |j: usize| -> Vec<Entry> {
            let mut c: Vec<Entry> = machine.predecessors(j).into_iter().map(|p| (p, 1)).collect();
            if j == s {
                c.push((t, 1));
            } else if j != t {
                c.push((j, 1));
            }
            c.sort_unstable();
            c
        };
        Ok(RowOracleMatrix::new(dim, 2, 1, row)?.with_column_ones_bound(2).with_column_oracle(column))
    }

    /// `Aᵀ A` of the augmented adjacency together with a gap exponent `g`.
    ///
    /// Every nonzero smallest eigenvalue is at least the path-block bound
    /// `2(1 - cos(π/(2·dim+1)))`, and `g` is the least integer with
    /// `2^-g` below that bound.
    pub fn reduce_to_gapped(&self, input: &str) -> Result<GappedInstance> {
        let adjacency = self.augmented_adjacency(input)?;
        let dim = adjacency.dim();
        let gap_bound = path_gap(dim);
        let gap_exponent = (-gap_bound.log2()).ceil().max(0.0) as u32;
        Ok(GappedInstance { matrix: adjacency.ata_oracle()?, gap_exponent, gap_bound })
    }
}

#[derive(Debug, Clone)]
pub struct GappedInstance {
    pub matrix: RowOracleMatrix,
    pub gap_exponent: u32,
    pub gap_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub accepted: bool,
    pub steps: usize,
    pub halted_at: Configuration,
}

/// Result of [`ReversibleTM::validate`]; each field holds the first witness
/// of one kind of failure.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// Two distinct configurations with the same successor.
    pub injectivity: Option<(Configuration, Configuration)>,
    /// A configuration stepping into the start state.
    pub start_predecessor: Option<Configuration>,
    /// A symbol on which the accept state still has a transition.
    pub accept_transition: Option<char>,
    /// A configuration lying on a cycle of the configuration graph.
    pub cycle: Option<Configuration>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self == &Self::default()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.passed() {
            return write!(f, "pass");
        }
        let mut parts = Vec::new();
        if let Some((a, b)) = &self.injectivity {
            parts.push(format!("step not injective ({a:?} and {b:?} share a successor)"));
        }
        if let Some(c) = &self.start_predecessor {
            parts.push(format!("start configuration has predecessor {c:?}"));
        }
        if let Some(sym) = self.accept_transition {
            parts.push(format!("accept state has a transition on {sym:?}"));
        }
        if let Some(c) = &self.cycle {
            parts.push(format!("configuration graph has a cycle through {c:?}"));
        }
        write!(f, "{}", parts.join("; "))
    }
}

/// Explicit configuration graph, for cross-checking the oracles.
pub fn configuration_edges(m: &ReversibleTM) -> Result<HashMap<usize, usize>> {
    let dim = m.dim()?;
    let mut edges = HashMap::new();
    for i in 0..dim {
        let c = m.decode(i)?;
        if let Some(n) = m.step(&c) {
            edges.insert(i, m.encode(&n));
        }
    }
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn machine(json: &str) -> ReversibleTM {
        ReversibleTM::from_json(json).unwrap()
    }

    #[test]
    fn encode_decode_round_trip() {
        let m = corpus::machine("unary_counter").unwrap().with_space(3).unwrap();
        for i in 0..m.dim().unwrap() {
            let c = m.decode(i).unwrap();
            assert_eq!(m.encode(&c), i);
        }
        assert!(matches!(m.decode(m.dim().unwrap()), Err(Error::Range(_))));
    }

    #[test]
    fn packing_is_bit_exact() {
        let m = corpus::machine("double_one").unwrap();
        let c = Configuration { state: 0, head: 0, tape: vec![1, 1, 0] };
        assert_eq!(m.encode(&c), 36);
        let c = Configuration { state: 1, head: 1, tape: vec![1, 1, 0] };
        assert_eq!(m.encode(&c), 41);
        assert_eq!(m.dim().unwrap(), 96);
    }

    #[test]
    fn non_injective_machine_fails() {
        let m = machine(
            r#"{"states":["q0","q1","q2","q3"],"start":"q0","accept":"q3","alphabet":["0","1"],
                "blank":"0","space":2,
                "transitions":[["q1","0","q3","1","S"],["q2","1","q3","1","S"]]}"#,
        );
        let report = m.validate().unwrap();
        let (a, b) = report.injectivity.clone().expect("collision");
        assert_ne!(a, b);
        assert_eq!(m.step(&a), m.step(&b));
        assert!(!report.passed());
    }

    #[test]
    fn start_reentry_fails() {
        let m = machine(
            r#"{"states":["s","a","acc"],"start":"s","accept":"acc","alphabet":["0","1"],
                "blank":"0","space":2,
                "transitions":[["s","1","a","1","R"],["a","0","s","0","L"]]}"#,
        );
        let report = m.validate().unwrap();
        assert!(report.start_predecessor.is_some());
        assert!(report.injectivity.is_none());
    }

    #[test]
    fn looping_machine_fails() {
        let m = machine(
            r#"{"states":["s","a","b","acc"],"start":"s","accept":"acc","alphabet":["0","1"],
                "blank":"0","space":2,
                "transitions":[["a","0","b","0","S"],["b","0","a","0","S"]]}"#,
        );
        assert!(m.validate().unwrap().cycle.is_some());
        assert!(matches!(m.augmented_adjacency(""), Err(Error::Contract(_))));
    }

    #[test]
    fn corpus_machines_validate() {
        for name in corpus::MACHINE_NAMES {
            let m = corpus::machine(name).unwrap();
            for space in 1..=4 {
                let m = m.with_space(space).unwrap();
                assert!(m.validate().unwrap().passed(), "{name} at S={space}");
            }
        }
    }

    #[test]
    fn accept_configuration_halts() {
        let m = corpus::machine("double_one").unwrap();
        assert_eq!(m.step(&m.accept_config("11").unwrap()), None);
    }

    #[test]
    fn golden_step() {
        let golden: serde_json::Value = serde_json::from_str(corpus::GOLDEN_STEP).unwrap();
        let m = corpus::machine(golden["machine"].as_str().unwrap()).unwrap();
        let start = m.start_config(golden["input"].as_str().unwrap()).unwrap();
        assert_eq!(m.encode(&start) as u64, golden["start_index"].as_u64().unwrap());
        let next = m.step(&start).unwrap();
        assert_eq!(m.encode(&next) as u64, golden["next_index"].as_u64().unwrap());
        assert_eq!(m.state_name(next.state), golden["next"]["state"].as_str().unwrap());
        assert_eq!(next.head as u64, golden["next"]["head"].as_u64().unwrap());
    }

    #[test]
    fn runs_never_revisit_configurations() {
        let m = corpus::machine("unary_counter").unwrap();
        for input in &corpus::inputs("unary_counter") {
            let mut seen = std::collections::HashSet::new();
            let mut c = m.start_config(input).unwrap();
            assert!(seen.insert(c.clone()));
            while let Some(n) = m.step(&c) {
                assert!(seen.insert(n.clone()), "revisited on {input}");
                c = n;
            }
        }
    }

    #[test]
    fn graph_degrees_at_most_one() {
        for name in corpus::MACHINE_NAMES {
            let m = corpus::machine(name).unwrap();
            let edges = configuration_edges(&m).unwrap();
            let mut indegree = vec![0; m.dim().unwrap()];
            for &j in edges.values() {
                indegree[j] += 1;
            }
            assert!(indegree.iter().all(|&d| d <= 1), "{name}");
            for (&i, &j) in &edges {
                assert_eq!(m.predecessors(j), vec![i]);
            }
        }
    }

    #[test]
    fn accept_row_holds_back_edge() {
        let m = corpus::machine("double_one").unwrap();
        let a = m.augmented_adjacency("11").unwrap();
        let s = m.encode(&m.start_config("11").unwrap());
        let t = m.encode(&m.accept_config("11").unwrap());
        assert_eq!(a.row(t).unwrap(), vec![(s, 1)]);
        // s_x carries no self-loop, only its machine edge.
        let row = a.row(s).unwrap();
        assert!(row.iter().all(|&(j, _)| j != s));
        assert_eq!(row.len(), 1);
    }

    #[test]
    fn garbage_configuration_has_only_self_loop() {
        let m = corpus::machine("double_one").unwrap();
        let a = m.augmented_adjacency("11").unwrap();
        // state r reading a blank: no transition applies.
        let c = Configuration { state: 2, head: 2, tape: vec![0, 0, 0] };
        let i = m.encode(&c);
        assert_eq!(a.row(i).unwrap(), vec![(i, 1)]);
    }

    #[test]
    fn adjacency_matches_enumerated_graph() {
        let m = corpus::machine("unary_counter").unwrap().with_space(3).unwrap();
        let edges = configuration_edges(&m).unwrap();
        for input in ["#", "#1", "#11"] {
            let a = m.augmented_adjacency(input).unwrap();
            let dense = a.materialize().unwrap();
            let s = m.encode(&m.start_config(input).unwrap());
            let t = m.encode(&m.accept_config(input).unwrap());
            let n = m.dim().unwrap();
            let mut expected = nalgebra::DMatrix::<i64>::zeros(n, n);
            for (&i, &j) in &edges {
                expected[(i, j)] = 1;
            }
            for i in 0..n {
                if i != s && i != t {
                    expected[(i, i)] = 1;
                }
            }
            expected[(t, s)] = 1;
            assert_eq!(dense.entries(), &expected, "{input}");
            for j in 0..n {
                let mut col: Vec<_> = (0..n).filter(|&i| expected[(i, j)] != 0).map(|i| (i, 1)).collect();
                col.sort();
                assert_eq!(a.column(j).unwrap(), col);
            }
        }
    }

    #[test]
    fn simulation_outcomes() {
        let m = corpus::machine("unary_counter").unwrap();
        assert!(m.simulate("#11").unwrap().accepted);
        assert!(!m.simulate("#1").unwrap().accepted);
        assert!(m.simulate("#").unwrap().accepted);
        assert!(matches!(m.start_config("#1111"), Err(Error::Config(_))));
        assert!(matches!(m.start_config("x"), Err(Error::Config(_))));
    }
}

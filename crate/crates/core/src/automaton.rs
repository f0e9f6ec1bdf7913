//! Deterministic finite automata as labelled state graphs.
//!
//! An [`Automaton`] is built from named states and symbols through an
//! [`AutomatonBuilder`]. Validation checks determinism and injectivity of the
//! output map, then merges every group of symbols that trigger the same
//! `source -> target` transition into a single [`Arrow`]. Merged arrows are
//! the unit of graph structure: divergence, convergence and reversibility are
//! all defined on them.
//!
//! Identifiers are sorted lexicographically, so a [`StateId`] or [`SymbolId`]
//! orders the same way as its name.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Index of a state inside its automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub(crate) usize);

impl StateId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Index of an input symbol inside its automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub(crate) usize);

impl SymbolId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A merged transition: every input symbol taking `source` to `target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub source: StateId,
    pub target: StateId,
    /// Sorted, never empty.
    pub labels: Vec<SymbolId>,
}

/// Raw, unvalidated description of an automaton.
#[derive(Debug, Clone, Default)]
pub struct AutomatonBuilder {
    name: String,
    inputs: Vec<String>,
    outputs: Vec<String>,
    states: Vec<String>,
    initial: Option<String>,
    output_map: Vec<(String, String)>,
    transitions: Vec<(String, String, String)>,
}

impl AutomatonBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn inputs<I, S>(mut self, symbols: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.inputs.extend(symbols.into_iter().map(Into::into));
        self
    }

    pub fn outputs<I, S>(mut self, symbols: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.outputs.extend(symbols.into_iter().map(Into::into));
        self
    }

    pub fn states<I, S>(mut self, states: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.states.extend(states.into_iter().map(Into::into));
        self
    }

    pub fn initial(mut self, state: impl Into<String>) -> Self {
        self.initial = Some(state.into());
        self
    }

    pub fn clear_initial(mut self) -> Self {
        self.initial = None;
        self
    }

    pub fn output(mut self, state: impl Into<String>, symbol: impl Into<String>) -> Self {
        self.output_map.push((state.into(), symbol.into()));
        self
    }

    pub fn transition(
        mut self,
        from: impl Into<String>,
        symbol: impl Into<String>,
        to: impl Into<String>,
    ) -> Self {
        self.transitions
            .push((from.into(), symbol.into(), to.into()));
        self
    }

    /// Validates the description and merges arrows.
    pub fn build(self) -> Result<Automaton> {
        let states = sorted_unique(self.states);
        let inputs = sorted_unique(self.inputs);
        let outputs = sorted_unique(self.outputs);

        let state_id = |name: &str| {
            states
                .binary_search_by(|s| s.as_str().cmp(name))
                .map(StateId)
                .map_err(|_| Error::UnknownState(name.to_string()))
        };
        let symbol_id = |name: &str| {
            inputs
                .binary_search_by(|s| s.as_str().cmp(name))
                .map(SymbolId)
                .map_err(|_| Error::UnknownSymbol(name.to_string()))
        };

        let initial = self.initial.as_deref().map(state_id).transpose()?;

        let mut delta = vec![vec![None; inputs.len()]; states.len()];
        for (from, symbol, to) in &self.transitions {
            let q = state_id(from)?;
            let s = symbol_id(symbol)?;
            let t = state_id(to)?;
            match delta[q.0][s.0] {
                Some(prev) if prev != t => {
                    return Err(Error::Nondeterministic {
                        state: from.clone(),
                        symbol: symbol.clone(),
                    })
                }
                _ => delta[q.0][s.0] = Some(t),
            }
        }

        let mut output_of: Vec<Option<usize>> = vec![None; states.len()];
        for (state, symbol) in &self.output_map {
            let q = state_id(state)?;
            let o = outputs
                .binary_search(symbol)
                .map_err(|_| Error::UnknownSymbol(symbol.clone()))?;
            match output_of[q.0] {
                Some(prev) if prev != o => return Err(Error::ConflictingOutput(state.clone())),
                _ => output_of[q.0] = Some(o),
            }
        }
        let output_of = output_of
            .into_iter()
            .enumerate()
            .map(|(q, o)| o.ok_or_else(|| Error::MissingOutput(states[q].clone())))
            .collect::<Result<Vec<_>>>()?;

        let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
        for (q, &o) in output_of.iter().enumerate() {
            if let Some(&first) = owner.get(&o) {
                return Err(Error::NonInjectiveOutput {
                    first: states[first].clone(),
                    second: states[q].clone(),
                    output: outputs[o].clone(),
                });
            }
            owner.insert(o, q);
        }

        let mut arrows = Vec::with_capacity(states.len());
        let mut in_degree = vec![0; states.len()];
        for (q, row) in delta.iter().enumerate() {
            let mut by_target: BTreeMap<StateId, Vec<SymbolId>> = BTreeMap::new();
            for (s, target) in row.iter().enumerate() {
                if let Some(t) = target {
                    by_target.entry(*t).or_default().push(SymbolId(s));
                }
            }
            let merged: Vec<Arrow> = by_target
                .into_iter()
                .map(|(target, labels)| {
                    in_degree[target.0] += 1;
                    Arrow {
                        source: StateId(q),
                        target,
                        labels,
                    }
                })
                .collect();
            arrows.push(merged);
        }

        Ok(Automaton {
            name: self.name,
            inputs,
            outputs,
            states,
            initial,
            output_of,
            delta,
            arrows,
            in_degree,
        })
    }
}

fn sorted_unique(mut v: Vec<String>) -> Vec<String> {
    v.sort();
    v.dedup();
    v
}

/// A validated deterministic automaton. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    name: String,
    inputs: Vec<String>,
    outputs: Vec<String>,
    states: Vec<String>,
    initial: Option<StateId>,
    output_of: Vec<usize>,
    delta: Vec<Vec<Option<StateId>>>,
    arrows: Vec<Vec<Arrow>>,
    in_degree: Vec<usize>,
}

impl Automaton {
    pub fn builder(name: impl Into<String>) -> AutomatonBuilder {
        AutomatonBuilder::new(name)
    }

    /// Returns a builder reproducing this automaton, for derived constructions.
    pub fn to_builder(&self) -> AutomatonBuilder {
        let mut b = AutomatonBuilder::new(self.name.clone())
            .inputs(self.inputs.iter().cloned())
            .outputs(self.outputs.iter().cloned())
            .states(self.states.iter().cloned());
        if let Some(q) = self.initial {
            b = b.initial(self.state_name(q));
        }
        for q in self.state_ids() {
            b = b.output(self.state_name(q), self.output_of(q));
        }
        for (q, s, t) in self.transitions() {
            b = b.transition(self.state_name(q), self.symbol_name(s), self.state_name(t));
        }
        b
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.states.len()).map(StateId)
    }

    pub fn symbol_ids(&self) -> impl Iterator<Item = SymbolId> + '_ {
        (0..self.inputs.len()).map(SymbolId)
    }

    pub fn initial(&self) -> Option<StateId> {
        self.initial
    }

    /// Looks a state up by name.
    pub fn state(&self, name: &str) -> Result<StateId> {
        self.states
            .binary_search_by(|s| s.as_str().cmp(name))
            .map(StateId)
            .map_err(|_| Error::UnknownState(name.to_string()))
    }

    /// Looks an input symbol up by name.
    pub fn symbol(&self, name: &str) -> Result<SymbolId> {
        self.inputs
            .binary_search_by(|s| s.as_str().cmp(name))
            .map(SymbolId)
            .map_err(|_| Error::UnknownSymbol(name.to_string()))
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.0]
    }

    pub fn symbol_name(&self, s: SymbolId) -> &str {
        &self.inputs[s.0]
    }

    /// The output symbol `F(q)`.
    pub fn output_of(&self, q: StateId) -> &str {
        &self.outputs[self.output_of[q.0]]
    }

    /// State whose output is `output`, if any. Unique because `F` is injective.
    pub fn state_with_output(&self, output: &str) -> Option<StateId> {
        let o = self
            .outputs
            .binary_search_by(|s| s.as_str().cmp(output))
            .ok()?;
        self.output_of.iter().position(|&x| x == o).map(StateId)
    }

    /// The transition function `G(q, s)`, `None` where undefined.
    pub fn target(&self, q: StateId, s: SymbolId) -> Option<StateId> {
        self.delta[q.0][s.0]
    }

    /// Every defined `(state, symbol, target)` triple, before merging.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, SymbolId, StateId)> + '_ {
        self.delta.iter().enumerate().flat_map(|(q, row)| {
            row.iter()
                .enumerate()
                .filter_map(move |(s, t)| t.map(|t| (StateId(q), SymbolId(s), t)))
        })
    }

    pub fn transition_count(&self) -> usize {
        self.delta.iter().flatten().filter(|t| t.is_some()).count()
    }

    /// Symbols accepted in state `q`.
    pub fn defined_symbols(&self, q: StateId) -> impl Iterator<Item = SymbolId> + '_ {
        self.delta[q.0]
            .iter()
            .enumerate()
            .filter_map(|(s, t)| t.map(|_| SymbolId(s)))
    }

    /// Merged arrows leaving `q`, sorted by target.
    pub fn arrows_from(&self, q: StateId) -> &[Arrow] {
        &self.arrows[q.0]
    }

    pub fn arrows(&self) -> impl Iterator<Item = &Arrow> + '_ {
        self.arrows.iter().flatten()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.iter().map(Vec::len).sum()
    }

    /// The arrow from `source` to `target`, if present.
    pub fn arrow_between(&self, source: StateId, target: StateId) -> Option<&Arrow> {
        let row = &self.arrows[source.0];
        row.binary_search_by(|a| a.target.cmp(&target))
            .ok()
            .map(|i| &row[i])
    }

    pub fn out_degree(&self, q: StateId) -> usize {
        self.arrows[q.0].len()
    }

    pub fn in_degree(&self, q: StateId) -> usize {
        self.in_degree[q.0]
    }

    /// States left by at least two arrows.
    pub fn divergent_states(&self) -> Vec<StateId> {
        self.state_ids()
            .filter(|&q| self.out_degree(q) >= 2)
            .collect()
    }

    /// States reached by at least two arrows. Self-loops count.
    pub fn convergent_states(&self) -> Vec<StateId> {
        self.state_ids()
            .filter(|&q| self.in_degree(q) >= 2)
            .collect()
    }

    pub fn is_reversible(&self) -> bool {
        self.in_degree.iter().all(|&d| d <= 1)
    }

    pub fn is_sink(&self, q: StateId) -> bool {
        self.arrows[q.0].is_empty()
    }

    /// One clock step: `G(q, s)`, or `ForbiddenInput` where undefined.
    pub fn step(&self, q: StateId, s: SymbolId) -> Result<StateId> {
        self.target(q, s).ok_or_else(|| Error::ForbiddenInput {
            state: self.state_name(q).to_string(),
            symbol: self.symbol_name(s).to_string(),
            position: None,
        })
    }

    /// Runs `word` from `start`.
    pub fn run(&self, start: StateId, word: &[SymbolId]) -> Result<Path> {
        let mut q = start;
        let mut steps = Vec::with_capacity(word.len());
        let mut outputs = Vec::with_capacity(word.len() + 1);
        outputs.push(self.output_of(q).to_string());
        for (position, &s) in word.iter().enumerate() {
            let target = self.step(q, s).map_err(|e| match e {
                Error::ForbiddenInput { state, symbol, .. } => Error::ForbiddenInput {
                    state,
                    symbol,
                    position: Some(position),
                },
                other => other,
            })?;
            let arrow = self.arrows[q.0]
                .binary_search_by(|a| a.target.cmp(&target))
                .expect("defined transition has an arrow");
            steps.push(PathStep {
                symbol: s,
                arrow,
                target,
            });
            outputs.push(self.output_of(target).to_string());
            q = target;
        }
        Ok(Path {
            start,
            steps,
            outputs,
        })
    }

    /// Parses an input word.
    ///
    /// Whitespace or commas separate symbols. A single token that is not a
    /// symbol is split into characters when each one is a symbol, so binary
    /// words can be written `0100`.
    pub fn parse_word(&self, text: &str) -> Result<Vec<SymbolId>> {
        let tokens: Vec<&str> = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .collect();
        if let [single] = tokens.as_slice() {
            if self.symbol(single).is_err() {
                let chars: Option<Vec<SymbolId>> = single
                    .chars()
                    .map(|c| self.symbol(c.encode_utf8(&mut [0; 4])).ok())
                    .collect();
                if let Some(word) = chars {
                    return Ok(word);
                }
            }
        }
        tokens.into_iter().map(|t| self.symbol(t)).collect()
    }

    pub fn format_word(&self, word: &[SymbolId]) -> String {
        word.iter()
            .map(|&s| self.symbol_name(s))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Comma-joined label names of an arrow.
    pub fn label_text(&self, arrow: &Arrow) -> String {
        arrow
            .labels
            .iter()
            .map(|&s| self.symbol_name(s))
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} states, {} arrows)",
            self.name,
            self.state_count(),
            self.arrow_count()
        )
    }
}

/// One step of a [`Path`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathStep {
    pub symbol: SymbolId,
    /// Index into `arrows_from(source)`.
    pub arrow: usize,
    pub target: StateId,
}

/// A computation: the walk through the graph driven by an input word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub start: StateId,
    pub steps: Vec<PathStep>,
    /// Output of every visited state, start included.
    pub outputs: Vec<String>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn end(&self) -> StateId {
        self.steps.last().map_or(self.start, |s| s.target)
    }

    /// Visited states, start included.
    pub fn states(&self) -> Vec<StateId> {
        std::iter::once(self.start)
            .chain(self.steps.iter().map(|s| s.target))
            .collect()
    }

    /// Source state of step `i`.
    pub fn source_of(&self, i: usize) -> StateId {
        if i == 0 {
            self.start
        } else {
            self.steps[i - 1].target
        }
    }

    pub fn word(&self) -> Vec<SymbolId> {
        self.steps.iter().map(|s| s.symbol).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::figures;

    fn names(a: &Automaton, qs: &[StateId]) -> Vec<String> {
        qs.iter().map(|&q| a.state_name(q).to_string()).collect()
    }

    #[test]
    fn one_bit_memory_validates_with_four_arrows() {
        let m = figures::one_bit_memory();
        assert_eq!(m.state_count(), 2);
        assert_eq!(m.arrow_count(), 4);
    }

    #[test]
    fn nondeterminism_is_rejected() {
        let err = Automaton::builder("bad")
            .inputs(["a"])
            .outputs(["x", "y", "z"])
            .states(["q0", "q1", "q2"])
            .output("q0", "x")
            .output("q1", "y")
            .output("q2", "z")
            .transition("q0", "a", "q1")
            .transition("q0", "a", "q2")
            .build()
            .unwrap_err();
        assert_eq!(
            err,
            Error::Nondeterministic {
                state: "q0".into(),
                symbol: "a".into()
            }
        );
    }

    #[test]
    fn repeated_identical_transition_is_fine() {
        let a = Automaton::builder("dup")
            .inputs(["a"])
            .outputs(["x"])
            .states(["q"])
            .output("q", "x")
            .transition("q", "a", "q")
            .transition("q", "a", "q")
            .build()
            .unwrap();
        assert_eq!(a.arrow_count(), 1);
    }

    #[test]
    fn shared_output_is_rejected() {
        let err = Automaton::builder("bad")
            .inputs(["a"])
            .outputs(["x"])
            .states(["p", "q"])
            .output("p", "x")
            .output("q", "x")
            .build()
            .unwrap_err();
        assert!(matches!(err, Error::NonInjectiveOutput { .. }));
    }

    #[test]
    fn undeclared_names_and_missing_outputs() {
        let base = || {
            Automaton::builder("t")
                .inputs(["a"])
                .outputs(["x"])
                .states(["p"])
        };
        assert_eq!(
            base().output("p", "x").transition("p", "b", "p").build(),
            Err(Error::UnknownSymbol("b".into()))
        );
        assert_eq!(
            base().output("p", "x").transition("p", "a", "r").build(),
            Err(Error::UnknownState("r".into()))
        );
        assert_eq!(base().build(), Err(Error::MissingOutput("p".into())));
        assert_eq!(
            base().output("p", "y").build(),
            Err(Error::UnknownSymbol("y".into()))
        );
    }

    #[test]
    fn merging_groups_symbols_per_target() {
        let a = Automaton::builder("merge")
            .inputs(["A", "B", "C"])
            .outputs(["x", "y"])
            .states(["Q", "R"])
            .output("Q", "x")
            .output("R", "y")
            .transition("Q", "A", "R")
            .transition("Q", "B", "R")
            .transition("Q", "C", "Q")
            .build()
            .unwrap();
        let q = a.state("Q").unwrap();
        let arrows = a.arrows_from(q);
        assert_eq!(arrows.len(), 2);
        assert_eq!(a.label_text(&arrows[0]), "C");
        assert_eq!(a.label_text(&arrows[1]), "A,B");
        assert_eq!(a.transition_count(), 3);
        assert!(a.divergent_states().contains(&q));
    }

    #[test]
    fn fig7_arrows_from() {
        let a = figures::fig7();
        let c = a.state("C").unwrap();
        let arrows = a.arrows_from(c);
        assert_eq!(arrows.len(), 2);
        assert_eq!(a.state_name(arrows[0].target), "C");
        assert_eq!(a.label_text(&arrows[0]), "0");
        assert_eq!(a.state_name(arrows[1].target), "D");
        assert_eq!(a.label_text(&arrows[1]), "1");
        assert!(a.arrows_from(a.state("Stop").unwrap()).is_empty());
        assert_eq!(a.state("Nope"), Err(Error::UnknownState("Nope".into())));
    }

    #[test]
    fn fig5_arrows_from_zero() {
        let m = figures::one_bit_memory();
        let z = m.state("0").unwrap();
        let arrows = m.arrows_from(z);
        assert_eq!(arrows.len(), 2);
        assert_eq!(
            (m.state_name(arrows[0].target), m.label_text(&arrows[0])),
            ("0", "set0".to_string())
        );
        assert_eq!(
            (m.state_name(arrows[1].target), m.label_text(&arrows[1])),
            ("1", "set1".to_string())
        );
    }

    #[test]
    fn divergence_and_convergence_sets() {
        let f7 = figures::fig7();
        assert_eq!(names(&f7, &f7.divergent_states()), ["B", "C", "G"]);
        assert_eq!(names(&f7, &f7.convergent_states()), ["C", "F"]);
        assert!(!f7.is_reversible());

        let f8 = figures::mod4_counter();
        assert!(f8.divergent_states().is_empty());
        assert!(f8.convergent_states().is_empty());
        assert!(f8.is_reversible());

        let tff = figures::t_flip_flop();
        assert_eq!(names(&tff, &tff.divergent_states()), ["0", "1"]);

        let mem = figures::one_bit_memory();
        assert_eq!(names(&mem, &mem.convergent_states()), ["0", "1"]);
        assert!(!mem.is_reversible());

        let chain = figures::linear_chain(5);
        assert!(chain.is_reversible());
    }

    #[test]
    fn step_and_forbidden_input() {
        let f7 = figures::fig7();
        let b = f7.state("B").unwrap();
        let e = f7.state("E").unwrap();
        let zero = f7.symbol("0").unwrap();
        assert_eq!(f7.step(b, zero), Ok(e));
        assert!(matches!(
            f7.step(e, zero),
            Err(Error::ForbiddenInput { position: None, .. })
        ));

        let mem = figures::one_bit_memory();
        let one = mem.state("1").unwrap();
        let set0 = mem.symbol("set0").unwrap();
        assert_eq!(mem.state_name(mem.step(one, set0).unwrap()), "0");
    }

    #[test]
    fn fig7_words_visit_expected_states() {
        let f7 = figures::fig7();
        let a = f7.state("A").unwrap();
        let w1 = f7.parse_word("0100001010").unwrap();
        let p1 = f7.run(a, &w1).unwrap();
        assert_eq!(
            names(&f7, &p1.states()),
            ["A", "B", "C", "C", "C", "C", "C", "D", "F", "G", "Stop"]
        );
        let w2 = f7.parse_word("0011100110").unwrap();
        let p2 = f7.run(a, &w2).unwrap();
        assert_eq!(
            names(&f7, &p2.states()),
            ["A", "B", "E", "F", "G", "A", "B", "E", "F", "G", "Stop"]
        );
        assert_eq!(p2.outputs.len(), 11);
    }

    #[test]
    fn empty_word_and_forbidden_position() {
        let f7 = figures::fig7();
        let a = f7.state("A").unwrap();
        let p = f7.run(a, &[]).unwrap();
        assert!(p.is_empty());
        assert_eq!(p.states(), vec![a]);
        assert_eq!(p.outputs, vec![f7.output_of(a).to_string()]);

        let e = f7.state("E").unwrap();
        let err = f7.run(e, &f7.parse_word("10").unwrap()).unwrap_err();
        assert!(matches!(
            err,
            Error::ForbiddenInput {
                position: Some(1),
                ..
            }
        ));
    }

    #[test]
    fn parse_word_forms() {
        let mem = figures::one_bit_memory();
        let w = mem.parse_word("set0 set1,set1").unwrap();
        assert_eq!(mem.format_word(&w), "set0 set1 set1");
        assert!(mem.parse_word("set2").is_err());
        assert_eq!(mem.parse_word("").unwrap(), vec![]);
    }

    #[test]
    fn builder_round_trip() {
        let f7 = figures::fig7();
        assert_eq!(f7.to_builder().build().unwrap(), f7);
    }
}

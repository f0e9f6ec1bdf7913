//! Deterministic Turing machines seen as a head automaton working on tape
//! cells.
//!
//! The head and each tape cell are separately testable automata; their
//! dissipation under that modular reading is accounted per step by
//! [`modular_tm_dissipation`]. A halting run, seen globally with its tape
//! inside, is a linear reversible graph ([`global_graph`]).
//! [`bennett_simulate`] computes, copies the result and uncomputes using a
//! history tape, at the level of global configurations.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::automaton::Automaton;
use crate::error::{Error, Result};
use crate::figures::CLOCK;

/// Default cap on the number of materialised tape cells.
pub const DEFAULT_TAPE_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ControlState(usize);

impl ControlState {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TapeSymbol(usize);

impl TapeSymbol {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    Left,
    Right,
    /// Stay in place.
    None,
}

impl Move {
    pub fn offset(self) -> i64 {
        match self {
            Move::Left => -1,
            Move::Right => 1,
            Move::None => 0,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Move::Left => 'L',
            Move::Right => 'R',
            Move::None => 'N',
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "L" => Some(Move::Left),
            "R" => Some(Move::Right),
            "N" => Some(Move::None),
            _ => None,
        }
    }
}

/// Identifier of a rule: the `(state, read)` pair it applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleKey {
    pub state: ControlState,
    pub read: TapeSymbol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rule {
    pub next: ControlState,
    pub write: TapeSymbol,
    pub movement: Move,
}

#[derive(Debug, Clone)]
pub struct TuringMachineBuilder {
    name: String,
    blank: String,
    tape: Vec<String>,
    states: Vec<String>,
    initial: Option<String>,
    halting: Vec<String>,
    rules: Vec<(String, String, String, String, Move)>,
    tape_limit: usize,
}

impl TuringMachineBuilder {
    pub fn tape_symbols<I, S>(mut self, symbols: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.tape.extend(symbols.into_iter().map(Into::into));
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

    pub fn halting<I, S>(mut self, states: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.halting.extend(states.into_iter().map(Into::into));
        self
    }

    pub fn rule(
        mut self,
        state: impl Into<String>,
        read: impl Into<String>,
        next: impl Into<String>,
        write: impl Into<String>,
        movement: Move,
    ) -> Self {
        self.rules.push((
            state.into(),
            read.into(),
            next.into(),
            write.into(),
            movement,
        ));
        self
    }

    pub fn tape_limit(mut self, cells: usize) -> Self {
        self.tape_limit = cells;
        self
    }

    pub fn build(self) -> Result<TuringMachine> {
        let mut states = self.states;
        states.sort();
        states.dedup();
        let mut tape = self.tape;
        tape.sort();
        tape.dedup();

        let state = |n: &str| {
            states
                .binary_search_by(|s| s.as_str().cmp(n))
                .map(ControlState)
                .map_err(|_| Error::UnknownState(n.to_string()))
        };
        let symbol = |n: &str| {
            tape.binary_search_by(|s| s.as_str().cmp(n))
                .map(TapeSymbol)
                .map_err(|_| Error::UnknownSymbol(n.to_string()))
        };

        let blank = symbol(&self.blank).map_err(|_| {
            Error::InvalidMachine(format!("blank `{}` is not a tape symbol", self.blank))
        })?;
        let initial = state(
            self.initial
                .as_deref()
                .ok_or_else(|| Error::InvalidMachine("no initial state".into()))?,
        )?;
        let mut halting = vec![false; states.len()];
        for h in &self.halting {
            halting[state(h)?.0] = true;
        }
        let mut rules = BTreeMap::new();
        for (q, r, n, w, m) in &self.rules {
            let key = RuleKey {
                state: state(q)?,
                read: symbol(r)?,
            };
            if halting[key.state.0] {
                return Err(Error::InvalidMachine(format!(
                    "halting state `{q}` has a rule"
                )));
            }
            let rule = Rule {
                next: state(n)?,
                write: symbol(w)?,
                movement: *m,
            };
            if let Some(prev) = rules.insert(key, rule) {
                if prev != rule {
                    return Err(Error::Nondeterministic {
                        state: q.clone(),
                        symbol: r.clone(),
                    });
                }
            }
        }
        Ok(TuringMachine {
            name: self.name,
            blank,
            tape,
            states,
            initial,
            halting,
            rules,
            tape_limit: self.tape_limit,
        })
    }
}

/// A validated deterministic Turing machine.
#[derive(Debug, Clone, PartialEq)]
pub struct TuringMachine {
    name: String,
    blank: TapeSymbol,
    tape: Vec<String>,
    states: Vec<String>,
    initial: ControlState,
    halting: Vec<bool>,
    rules: BTreeMap<RuleKey, Rule>,
    tape_limit: usize,
}

impl TuringMachine {
    pub fn builder(name: impl Into<String>, blank: impl Into<String>) -> TuringMachineBuilder {
        TuringMachineBuilder {
            name: name.into(),
            blank: blank.into(),
            tape: Vec::new(),
            states: Vec::new(),
            initial: None,
            halting: Vec::new(),
            rules: Vec::new(),
            tape_limit: DEFAULT_TAPE_LIMIT,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn blank(&self) -> TapeSymbol {
        self.blank
    }

    pub fn tape_alphabet(&self) -> &[String] {
        &self.tape
    }

    pub fn control_states(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> ControlState {
        self.initial
    }

    pub fn is_halting(&self, q: ControlState) -> bool {
        self.halting[q.0]
    }

    pub fn halting_states(&self) -> impl Iterator<Item = ControlState> + '_ {
        (0..self.states.len())
            .filter(|&q| self.halting[q])
            .map(ControlState)
    }

    pub fn rules(&self) -> impl Iterator<Item = (RuleKey, Rule)> + '_ {
        self.rules.iter().map(|(k, r)| (*k, *r))
    }

    pub fn rule_count(&self) -> usize {
        self.rules.len()
    }

    pub fn rule(&self, key: RuleKey) -> Option<Rule> {
        self.rules.get(&key).copied()
    }

    pub fn tape_limit(&self) -> usize {
        self.tape_limit
    }

    pub fn state_name(&self, q: ControlState) -> &str {
        &self.states[q.0]
    }

    pub fn symbol_name(&self, s: TapeSymbol) -> &str {
        &self.tape[s.0]
    }

    pub fn symbol(&self, name: &str) -> Result<TapeSymbol> {
        self.tape
            .binary_search_by(|s| s.as_str().cmp(name))
            .map(TapeSymbol)
            .map_err(|_| Error::UnknownSymbol(name.to_string()))
    }

    pub fn state(&self, name: &str) -> Result<ControlState> {
        self.states
            .binary_search_by(|s| s.as_str().cmp(name))
            .map(ControlState)
            .map_err(|_| Error::UnknownState(name.to_string()))
    }

    /// Parses tape contents; see [`Automaton::parse_word`] for the forms
    /// accepted.
    pub fn parse_tape(&self, text: &str) -> Result<Vec<TapeSymbol>> {
        let tokens: Vec<&str> = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .collect();
        if let [single] = tokens.as_slice() {
            if self.symbol(single).is_err() {
                let chars: Option<Vec<TapeSymbol>> = single
                    .chars()
                    .map(|c| self.symbol(c.encode_utf8(&mut [0; 4])).ok())
                    .collect();
                if let Some(tape) = chars {
                    return Ok(tape);
                }
            }
        }
        tokens.into_iter().map(|t| self.symbol(t)).collect()
    }

    pub fn format_tape(&self, cells: &[TapeSymbol]) -> String {
        cells
            .iter()
            .map(|&s| self.symbol_name(s))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Initial configuration with `input` written from cell 0 and the head on
    /// cell 0.
    pub fn initial_configuration(&self, input: &[TapeSymbol]) -> Result<Configuration> {
        if input.len() > self.tape_limit {
            return Err(Error::TapeLimit(self.tape_limit));
        }
        Ok(Configuration {
            state: self.initial,
            tape: Tape {
                origin: 0,
                cells: input.to_vec(),
                blank: self.blank,
            },
            head: 0,
        })
    }
}

/// Finite tape window, blank outside.
#[derive(Debug, Clone)]
pub struct Tape {
    origin: i64,
    cells: Vec<TapeSymbol>,
    blank: TapeSymbol,
}

impl Tape {
    pub fn read(&self, pos: i64) -> TapeSymbol {
        let i = pos - self.origin;
        if i < 0 || i >= self.cells.len() as i64 {
            self.blank
        } else {
            self.cells[i as usize]
        }
    }

    fn write(&mut self, pos: i64, s: TapeSymbol, limit: usize) -> Result<()> {
        if self.cells.is_empty() {
            self.origin = pos;
        }
        if pos < self.origin {
            let grow = (self.origin - pos) as usize;
            if self.cells.len() + grow > limit {
                return Err(Error::TapeLimit(limit));
            }
            self.cells
                .splice(0..0, std::iter::repeat_n(self.blank, grow));
            self.origin = pos;
        }
        let i = (pos - self.origin) as usize;
        if i >= self.cells.len() {
            if i + 1 > limit {
                return Err(Error::TapeLimit(limit));
            }
            self.cells.resize(i + 1, self.blank);
        }
        self.cells[i] = s;
        Ok(())
    }

    /// Position of the first non-blank cell and the trimmed contents.
    pub fn trimmed(&self) -> (i64, &[TapeSymbol]) {
        let first = self.cells.iter().position(|&c| c != self.blank);
        match first {
            None => (0, &[]),
            Some(f) => {
                let last = self
                    .cells
                    .iter()
                    .rposition(|&c| c != self.blank)
                    .expect("non-blank exists");
                (self.origin + f as i64, &self.cells[f..=last])
            }
        }
    }
}

impl PartialEq for Tape {
    fn eq(&self, other: &Self) -> bool {
        self.blank == other.blank && self.trimmed() == other.trimmed()
    }
}

impl Eq for Tape {}

impl std::hash::Hash for Tape {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.blank.hash(h);
        self.trimmed().hash(h);
    }
}

/// Control state, tape and head position. Equality ignores blank padding.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub state: ControlState,
    pub tape: Tape,
    pub head: i64,
}

impl Configuration {
    pub fn read(&self) -> TapeSymbol {
        self.tape.read(self.head)
    }

    /// Whitespace-free canonical rendering, e.g. `b@1[-1:1.1.1]`.
    pub fn canonical(&self, tm: &TuringMachine) -> String {
        let (start, cells) = self.tape.trimmed();
        let cells = cells
            .iter()
            .map(|&s| tm.symbol_name(s))
            .collect::<Vec<_>>()
            .join(".");
        format!(
            "{}@{}[{}:{}]",
            tm.state_name(self.state),
            self.head,
            start,
            cells
        )
    }
}

/// Applies one rule.
pub fn tm_step(tm: &TuringMachine, c: &Configuration) -> Result<Configuration> {
    tm_step_with_key(tm, c).map(|(next, _)| next)
}

fn tm_step_with_key(tm: &TuringMachine, c: &Configuration) -> Result<(Configuration, RuleKey)> {
    if tm.is_halting(c.state) {
        return Err(Error::Halted);
    }
    let key = RuleKey {
        state: c.state,
        read: c.read(),
    };
    let rule = tm.rule(key).ok_or_else(|| Error::NoRule {
        state: tm.state_name(key.state).to_string(),
        symbol: tm.symbol_name(key.read).to_string(),
    })?;
    let mut next = c.clone();
    next.tape.write(c.head, rule.write, tm.tape_limit)?;
    next.state = rule.next;
    next.head += rule.movement.offset();
    Ok((next, key))
}

/// Configurations of a run, until halting or the step budget.
#[derive(Debug, Clone)]
pub struct RunTrace {
    pub configurations: Vec<Configuration>,
    /// Rule applied at each step.
    pub rules_applied: Vec<RuleKey>,
    pub halted: bool,
}

impl RunTrace {
    /// Number of steps `n`.
    pub fn steps(&self) -> usize {
        self.rules_applied.len()
    }

    pub fn last(&self) -> &Configuration {
        self.configurations
            .last()
            .expect("trace holds the initial configuration")
    }

    /// Trimmed final tape when halted.
    pub fn result(&self) -> Option<Vec<TapeSymbol>> {
        self.halted.then(|| self.last().tape.trimmed().1.to_vec())
    }

    /// Length `r` of the result.
    pub fn result_len(&self) -> Option<usize> {
        self.result().map(|r| r.len())
    }

    pub fn head_states(&self) -> Vec<ControlState> {
        self.configurations.iter().map(|c| c.state).collect()
    }
}

/// Runs `tm` on `input` for at most `max_steps` steps.
pub fn tm_run(tm: &TuringMachine, input: &[TapeSymbol], max_steps: usize) -> Result<RunTrace> {
    let mut c = tm.initial_configuration(input)?;
    let mut configurations = vec![c.clone()];
    let mut rules_applied = Vec::new();
    while !tm.is_halting(c.state) && rules_applied.len() < max_steps {
        let (next, key) = tm_step_with_key(tm, &c)?;
        rules_applied.push(key);
        configurations.push(next.clone());
        c = next;
    }
    Ok(RunTrace {
        halted: tm.is_halting(c.state),
        configurations,
        rules_applied,
    })
}

/// The head as a finite automaton reading the tape alphabet. Outputs repeat
/// the state names, so the output map is injective.
pub fn head_automaton(tm: &TuringMachine) -> Automaton {
    let mut b = Automaton::builder(format!("{}.head", tm.name))
        .states(tm.states.iter().cloned())
        .inputs(tm.tape.iter().cloned())
        .outputs(tm.states.iter().cloned())
        .initial(tm.state_name(tm.initial));
    for q in &tm.states {
        b = b.output(q, q);
    }
    for (key, rule) in tm.rules() {
        b = b.transition(
            tm.state_name(key.state),
            tm.symbol_name(key.read),
            tm.state_name(rule.next),
        );
    }
    b.build()
        .expect("head of a valid machine is a valid automaton")
}

/// Whether an observed head-state sequence repeats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HeadPeriodicity {
    /// The run halted within the horizon.
    Halted,
    /// From `preperiod` on, the sequence repeats with `period`, over at least
    /// two periods and at least half the observation.
    EventuallyPeriodic {
        preperiod: usize,
        period: usize,
    },
    NotPeriodic,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub has_convergence: bool,
    /// Convergent states of the head automaton.
    pub witnesses: Vec<String>,
    pub steps_observed: usize,
    pub periodicity: HeadPeriodicity,
}

impl LemmaReport {
    /// A head without convergence must show a periodic (or halting) head
    /// sequence; a non-periodic infinite sequence needs a convergence.
    pub fn consistent(&self) -> bool {
        self.has_convergence || self.periodicity != HeadPeriodicity::NotPeriodic
    }
}

/// Smallest `(preperiod, period)` describing the tail of `seq`.
pub fn detect_period<T: PartialEq>(seq: &[T]) -> Option<(usize, usize)> {
    let len = seq.len();
    for period in 1..=len / 2 {
        // Walk back from the end while the period holds.
        let mut start = len - period;
        while start > 0 && seq[start - 1] == seq[start - 1 + period] {
            start -= 1;
        }
        let tail = len - start;
        if tail >= 2 * period && 2 * tail >= len {
            return Some((start, period));
        }
    }
    None
}

/// Structural convergence check of the head, plus an observation of the head
/// sequence on `input` over `horizon` steps.
pub fn check_convergence_lemma(
    tm: &TuringMachine,
    input: &[TapeSymbol],
    horizon: usize,
) -> Result<LemmaReport> {
    let head = head_automaton(tm);
    let witnesses: Vec<String> = head
        .convergent_states()
        .into_iter()
        .map(|q| head.state_name(q).to_string())
        .collect();
    let trace = tm_run(tm, input, horizon)?;
    let periodicity = if trace.halted {
        HeadPeriodicity::Halted
    } else {
        match detect_period(&trace.head_states()) {
            Some((preperiod, period)) => HeadPeriodicity::EventuallyPeriodic { preperiod, period },
            None => HeadPeriodicity::NotPeriodic,
        }
    };
    Ok(LemmaReport {
        has_convergence: !witnesses.is_empty(),
        witnesses,
        steps_observed: trace.steps(),
        periodicity,
    })
}

/// A memory cell: one state per symbol, `write_x` leads to `x` from anywhere.
pub fn cell_automaton<S: AsRef<str>>(alphabet: &[S]) -> Result<Automaton> {
    let mut symbols: Vec<&str> = alphabet.iter().map(AsRef::as_ref).collect();
    symbols.sort();
    symbols.dedup();
    if symbols.len() < 2 {
        return Err(Error::AlphabetTooSmall(symbols.len()));
    }
    let write = |x: &str| format!("write_{x}");
    let mut b = Automaton::builder("cell")
        .states(symbols.iter().copied())
        .outputs(symbols.iter().copied())
        .inputs(symbols.iter().map(|x| write(x)))
        .initial(symbols[0]);
    for &q in &symbols {
        b = b.output(q, q);
        for &x in &symbols {
            b = b.transition(q, write(x), x);
        }
    }
    b.build()
}

/// Per-step dissipation of a run, head and cell charged separately.
#[derive(Debug, Clone)]
pub struct TmDissipation {
    pub trace: RunTrace,
    /// Uniform choice information of the head state left at each step.
    pub head_bits: Vec<f64>,
    /// `log₂ |tape alphabet|` per step: every step writes a cell.
    pub cell_bits: Vec<f64>,
    pub cumulative_bits: Vec<f64>,
}

impl TmDissipation {
    pub fn total(&self) -> f64 {
        self.cumulative_bits.last().copied().unwrap_or(0.0)
    }

    /// Least-squares slope of cumulative bits against step number `1..=n`.
    pub fn slope(&self) -> f64 {
        let n = self.cumulative_bits.len();
        if n < 2 {
            return self.total();
        }
        let nf = n as f64;
        let mean_t = (nf + 1.0) / 2.0;
        let mean_y = self.cumulative_bits.iter().sum::<f64>() / nf;
        let (num, den) =
            self.cumulative_bits
                .iter()
                .enumerate()
                .fold((0.0, 0.0), |(num, den), (i, y)| {
                    let dt = (i + 1) as f64 - mean_t;
                    (num + dt * (y - mean_y), den + dt * dt)
                });
        num / den
    }
}

/// Dissipation of the modular head + cells implement along a run.
pub fn modular_tm_dissipation(
    tm: &TuringMachine,
    input: &[TapeSymbol],
    max_steps: usize,
) -> Result<TmDissipation> {
    let trace = tm_run(tm, input, max_steps)?;
    let head = head_automaton(tm);
    let cell_charge = (tm.tape.len() as f64).log2();
    let mut head_bits = Vec::with_capacity(trace.steps());
    let mut cumulative_bits = Vec::with_capacity(trace.steps());
    let mut total = 0.0;
    for key in &trace.rules_applied {
        let q = head
            .state(tm.state_name(key.state))
            .expect("head shares state names");
        let h = (head.out_degree(q) as f64).log2();
        head_bits.push(h);
        total += h + cell_charge;
        cumulative_bits.push(total);
    }
    Ok(TmDissipation {
        cell_bits: vec![cell_charge; trace.steps()],
        trace,
        head_bits,
        cumulative_bits,
    })
}

/// Inputless chain through `labels`, which must be pairwise distinct.
pub fn linear_automaton(name: &str, labels: &[String]) -> Result<Automaton> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::RepeatedConfiguration(l.clone()));
        }
    }
    let mut b = Automaton::builder(name)
        .inputs([CLOCK])
        .states(labels.iter().cloned())
        .outputs(labels.iter().cloned());
    if let Some(first) = labels.first() {
        b = b.initial(first);
    }
    for l in labels {
        b = b.output(l, l);
    }
    for w in labels.windows(2) {
        b = b.transition(&w[0], CLOCK, &w[1]);
    }
    b.build()
}

/// Global graph of a halted run: a linear chain of its configurations.
pub fn global_graph(tm: &TuringMachine, trace: &RunTrace) -> Result<Automaton> {
    if !trace.halted {
        return Err(Error::NotHalted);
    }
    let labels: Vec<String> = trace
        .configurations
        .iter()
        .map(|c| c.canonical(tm))
        .collect();
    linear_automaton(&format!("{}.global", tm.name), &labels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Compute,
    Copy,
    Uncompute,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Compute => "compute",
            Phase::Copy => "copy",
            Phase::Uncompute => "uncompute",
        })
    }
}

/// Work configuration plus history and output tapes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GlobalConfiguration {
    pub phase: Phase,
    pub work: Configuration,
    pub history: Vec<RuleKey>,
    pub output: Vec<TapeSymbol>,
}

impl GlobalConfiguration {
    pub fn canonical(&self, tm: &TuringMachine) -> String {
        let history = self
            .history
            .iter()
            .map(|k| format!("{}/{}", tm.state_name(k.state), tm.symbol_name(k.read)))
            .collect::<Vec<_>>()
            .join(".");
        let output = self
            .output
            .iter()
            .map(|&s| tm.symbol_name(s))
            .collect::<Vec<_>>()
            .join(".");
        format!(
            "{}|{}|h[{}]|o[{}]",
            self.phase,
            self.work.canonical(tm),
            history,
            output
        )
    }
}

/// Record of a compute / copy / uncompute simulation.
#[derive(Debug, Clone)]
pub struct BennettTrace {
    /// Steps `n` of the simulated machine.
    pub forward_steps: usize,
    /// Length `r` of its result.
    pub result_len: usize,
    /// Rule used at each forward step, in order.
    pub history_records: Vec<RuleKey>,
    pub configurations: Vec<GlobalConfiguration>,
    pub input: Vec<TapeSymbol>,
}

impl BennettTrace {
    /// `2n + r` for this construction.
    pub fn total_steps(&self) -> usize {
        self.configurations.len() - 1
    }

    /// Indices where copy and uncompute begin.
    pub fn phase_boundaries(&self) -> (usize, usize) {
        (self.forward_steps, self.forward_steps + self.result_len)
    }

    pub fn last(&self) -> &GlobalConfiguration {
        self.configurations.last().expect("non-empty")
    }

    pub fn history_empty_at_end(&self) -> bool {
        self.last().history.is_empty()
    }

    pub fn output(&self) -> &[TapeSymbol] {
        &self.last().output
    }

    /// Work tape back to the input, head on cell 0.
    pub fn input_restored(&self, tm: &TuringMachine) -> bool {
        let start = tm
            .initial_configuration(&self.input)
            .expect("input fitted the tape on entry");
        self.last().work == start
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.configurations.len());
        self.configurations.iter().all(|c| seen.insert(c))
    }

    pub fn global_graph(&self, tm: &TuringMachine) -> Result<Automaton> {
        let labels: Vec<String> = self
            .configurations
            .iter()
            .map(|c| c.canonical(tm))
            .collect();
        linear_automaton(&format!("{}.bennett", tm.name), &labels)
    }

    /// State count `4n + 4r + 5` of the classic quadruple-machine
    /// construction, for comparison only.
    pub fn reference_state_count(&self) -> usize {
        4 * self.forward_steps + 4 * self.result_len + 5
    }
}

/// Runs `tm` forward recording rule identifiers, copies the result onto an
/// output tape, then undoes every step from the history.
pub fn bennett_simulate(
    tm: &TuringMachine,
    input: &[TapeSymbol],
    max_steps: usize,
) -> Result<BennettTrace> {
    let run = tm_run(tm, input, max_steps)?;
    if !run.halted {
        return Err(Error::NotHalting(max_steps));
    }
    let result = run.result().expect("halted");
    let n = run.steps();

    let mut configurations = Vec::with_capacity(2 * n + result.len() + 1);
    for (i, work) in run.configurations.iter().enumerate() {
        configurations.push(GlobalConfiguration {
            phase: Phase::Compute,
            work: work.clone(),
            history: run.rules_applied[..i].to_vec(),
            output: Vec::new(),
        });
    }

    let mut g = configurations.last().expect("initial").clone();
    g.phase = Phase::Copy;
    for &s in &result {
        g.output.push(s);
        configurations.push(g.clone());
    }

    g.phase = Phase::Uncompute;
    for step in 0..n {
        let key = g.history.pop().expect("history holds n records");
        let rule = tm.rule(key).expect("recorded rule exists");
        let work = &mut g.work;
        let back = work.head - rule.movement.offset();
        if work.state != rule.next || work.tape.read(back) != rule.write {
            return Err(Error::IrreversibleStep { step });
        }
        work.tape.write(back, key.read, tm.tape_limit)?;
        work.state = key.state;
        work.head = back;
        if *work != run.configurations[n - 1 - step] {
            return Err(Error::IrreversibleStep { step });
        }
        configurations.push(g.clone());
    }

    Ok(BennettTrace {
        forward_steps: n,
        result_len: result.len(),
        history_records: run.rules_applied,
        configurations,
        input: input.to_vec(),
    })
}

//! Modular implements.
//!
//! The graph of a modular implement, with its input connections opened, is
//! the Cartesian product of the module graphs ([`product`]). Closing the
//! connections of a [`Wiring`] selects a sub-relation of that product
//! ([`wire`]), whose reachable part ([`reachable_subgraph`]) can be checked
//! against a specification automaton with [`equivalent`].
//!
//! Tuple states are named `(qA,qB)`, tuple inputs `a|b` and tuple outputs
//! `(oA,oB)`. One-component tuples keep the plain name.

use std::collections::{BTreeMap, VecDeque};

use crate::automaton::{Automaton, StateId, SymbolId};
use crate::dissipation::{choice_information, Distribution, InputModel};
use crate::error::{Error, Result};
use crate::figures::CLOCK;

/// Largest state count accepted by monolithic constructions.
pub const STATE_LIMIT: u128 = 1 << 20;

pub fn tuple_name<S: AsRef<str>>(parts: &[S]) -> String {
    match parts {
        [one] => one.as_ref().to_string(),
        _ => format!(
            "({})",
            parts
                .iter()
                .map(AsRef::as_ref)
                .collect::<Vec<_>>()
                .join(",")
        ),
    }
}

pub fn tuple_symbol<S: AsRef<str>>(parts: &[S]) -> String {
    parts
        .iter()
        .map(AsRef::as_ref)
        .collect::<Vec<_>>()
        .join("|")
}

/// Mixed-radix enumeration of all index tuples below `radices`.
fn tuples(radices: &[usize]) -> Vec<Vec<usize>> {
    let total: usize = radices.iter().product();
    let mut out = Vec::with_capacity(total);
    if total == 0 {
        return out;
    }
    let mut cur = vec![0; radices.len()];
    loop {
        out.push(cur.clone());
        let mut i = radices.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < radices[i] {
                break;
            }
            cur[i] = 0;
        }
    }
}

fn state_count_product(modules: &[&Automaton]) -> u128 {
    modules
        .iter()
        .try_fold(1u128, |acc, m| acc.checked_mul(m.state_count() as u128))
        .unwrap_or(u128::MAX)
}

fn check_size(modules: &[&Automaton]) -> Result<()> {
    let states = state_count_product(modules);
    if states > STATE_LIMIT {
        return Err(Error::SizeLimit {
            states,
            limit: STATE_LIMIT,
        });
    }
    Ok(())
}

/// Product automaton with the component tuple of every state and symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductAutomaton {
    automaton: Automaton,
    modules: Vec<String>,
    state_components: Vec<Vec<StateId>>,
    symbol_components: Vec<Vec<SymbolId>>,
}

impl ProductAutomaton {
    pub fn automaton(&self) -> &Automaton {
        &self.automaton
    }

    pub fn into_automaton(self) -> Automaton {
        self.automaton
    }

    /// Names of the component modules, in tuple order.
    pub fn modules(&self) -> &[String] {
        &self.modules
    }

    pub fn components(&self, q: StateId) -> &[StateId] {
        &self.state_components[q.index()]
    }

    pub fn symbol_components(&self, s: SymbolId) -> &[SymbolId] {
        &self.symbol_components[s.index()]
    }

    /// Independent per-component arrow probabilities.
    pub fn product_model(&self, modules: &[&Automaton], models: &[&InputModel]) -> InputModel {
        let a = &self.automaton;
        let rows = a
            .state_ids()
            .map(|q| {
                let comps = self.components(q);
                a.arrows_from(q)
                    .iter()
                    .map(|arrow| {
                        let targets = self.components(arrow.target);
                        modules
                            .iter()
                            .zip(models)
                            .enumerate()
                            .map(|(i, (m, model))| {
                                let idx = m
                                    .arrows_from(comps[i])
                                    .iter()
                                    .position(|x| x.target == targets[i])
                                    .expect("product arrow projects onto component arrows");
                                model.probability(comps[i], idx)
                            })
                            .product()
                    })
                    .collect()
            })
            .collect();
        InputModel::from_arrow_probabilities(a, rows)
            .expect("product of distributions is a distribution")
    }

    /// Product distribution `π_A ⊗ π_B ⊗ …`.
    pub fn product_distribution(&self, parts: &[&Distribution]) -> Distribution {
        let p = self
            .automaton
            .state_ids()
            .map(|q| {
                self.components(q)
                    .iter()
                    .zip(parts)
                    .map(|(&c, d)| d.mass(c))
                    .product()
            })
            .collect();
        Distribution::new(p).expect("product of distributions is a distribution")
    }
}

/// Cartesian product of two automata.
pub fn product(a: &Automaton, b: &Automaton) -> ProductAutomaton {
    build_product(&[a, b])
}

/// n-ary product with flat tuples. Refuses more than [`STATE_LIMIT`] states.
pub fn product_all(modules: &[&Automaton]) -> Result<ProductAutomaton> {
    check_size(modules)?;
    Ok(build_product(modules))
}

fn build_product(modules: &[&Automaton]) -> ProductAutomaton {
    let name = modules
        .iter()
        .map(|m| m.name())
        .collect::<Vec<_>>()
        .join("*");
    let state_tuples = tuples(&modules.iter().map(|m| m.state_count()).collect::<Vec<_>>());
    let symbol_tuples = tuples(&modules.iter().map(|m| m.inputs().len()).collect::<Vec<_>>());

    let state_label = |t: &[usize]| {
        tuple_name(
            &t.iter()
                .zip(modules)
                .map(|(&i, m)| m.state_name(StateId(i)))
                .collect::<Vec<_>>(),
        )
    };
    let symbol_label = |t: &[usize]| {
        tuple_symbol(
            &t.iter()
                .zip(modules)
                .map(|(&i, m)| m.symbol_name(SymbolId(i)))
                .collect::<Vec<_>>(),
        )
    };
    let output_label = |t: &[usize]| {
        tuple_name(
            &t.iter()
                .zip(modules)
                .map(|(&i, m)| m.output_of(StateId(i)))
                .collect::<Vec<_>>(),
        )
    };

    let state_names: Vec<String> = state_tuples.iter().map(|t| state_label(t)).collect();
    let symbol_names: Vec<String> = symbol_tuples.iter().map(|t| symbol_label(t)).collect();
    let mut b = Automaton::builder(name)
        .states(state_names.iter().cloned())
        .inputs(symbol_names.iter().cloned())
        .outputs(state_tuples.iter().map(|t| output_label(t)));
    if let Some(init) = modules
        .iter()
        .map(|m| m.initial().map(StateId::index))
        .collect::<Option<Vec<_>>>()
    {
        b = b.initial(state_label(&init));
    }
    for (t, qname) in state_tuples.iter().zip(&state_names) {
        b = b.output(qname, output_label(t));
        for (st, sname) in symbol_tuples.iter().zip(&symbol_names) {
            let next: Option<Vec<usize>> = modules
                .iter()
                .enumerate()
                .map(|(i, m)| m.target(StateId(t[i]), SymbolId(st[i])).map(StateId::index))
                .collect();
            if let Some(next) = next {
                b = b.transition(qname, sname, state_label(&next));
            }
        }
    }
    let automaton = b.build().expect("product of valid automata is valid");

    let mut state_components = vec![Vec::new(); automaton.state_count()];
    for (t, qname) in state_tuples.iter().zip(&state_names) {
        let q = automaton.state(qname).expect("declared");
        state_components[q.index()] = t.iter().map(|&i| StateId(i)).collect();
    }
    let mut symbol_components = vec![Vec::new(); automaton.inputs().len()];
    for (t, sname) in symbol_tuples.iter().zip(&symbol_names) {
        let s = automaton.symbol(sname).expect("declared");
        symbol_components[s.index()] = t.iter().map(|&i| SymbolId(i)).collect();
    }
    ProductAutomaton {
        automaton,
        modules: modules.iter().map(|m| m.name().to_string()).collect(),
        state_components,
        symbol_components,
    }
}

/// An output-to-input connection. The destination reads, at step `t`, the
/// source's output at step `t` translated through `mapping` (identity when
/// empty).
#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    pub source: usize,
    pub destination: usize,
    pub mapping: BTreeMap<String, String>,
}

/// Modules and what drives each module's input port.
#[derive(Debug, Clone, Default)]
pub struct Wiring {
    pub name: String,
    pub modules: Vec<(String, Automaton)>,
    pub connections: Vec<Connection>,
    pub constants: Vec<(usize, String)>,
}

impl Wiring {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn add_module(&mut self, name: impl Into<String>, automaton: Automaton) -> usize {
        self.modules.push((name.into(), automaton));
        self.modules.len() - 1
    }

    pub fn module_index(&self, name: &str) -> Result<usize> {
        self.modules
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| Error::UnknownModule(name.to_string()))
    }

    pub fn connect(&mut self, source: usize, destination: usize) -> &mut Self {
        self.connect_mapped(source, destination, BTreeMap::new())
    }

    pub fn connect_mapped(
        &mut self,
        source: usize,
        destination: usize,
        mapping: BTreeMap<String, String>,
    ) -> &mut Self {
        self.connections.push(Connection {
            source,
            destination,
            mapping,
        });
        self
    }

    pub fn constant(&mut self, module: usize, symbol: impl Into<String>) -> &mut Self {
        self.constants.push((module, symbol.into()));
        self
    }

    /// Modules whose input is neither connected nor constant.
    pub fn free_modules(&self) -> Vec<usize> {
        (0..self.modules.len())
            .filter(|&m| {
                !self.connections.iter().any(|c| c.destination == m)
                    && !self.constants.iter().any(|&(c, _)| c == m)
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
enum Driver {
    Free(usize),
    Constant(SymbolId),
    /// Destination symbol for each state of the source module.
    Connected {
        source: usize,
        by_state: Vec<SymbolId>,
    },
}

/// The automaton induced by closing a wiring's connections.
#[derive(Debug, Clone)]
pub struct ClosedSystem {
    automaton: Automaton,
    modules: Vec<(String, Automaton)>,
    state_components: Vec<Vec<StateId>>,
}

impl ClosedSystem {
    pub fn automaton(&self) -> &Automaton {
        &self.automaton
    }

    pub fn into_automaton(self) -> Automaton {
        self.automaton
    }

    pub fn modules(&self) -> &[(String, Automaton)] {
        &self.modules
    }

    pub fn components(&self, q: StateId) -> &[StateId] {
        &self.state_components[q.index()]
    }

    pub fn is_inputless(&self) -> bool {
        self.automaton.inputs() == [CLOCK]
    }

    /// Uniform choice information of the open (product) graph at `q`: the
    /// sum over modules, each with its inputs opened.
    pub fn open_graph_bits(&self, q: StateId) -> f64 {
        self.modules
            .iter()
            .zip(self.components(q))
            .map(|((_, m), &c)| choice_information(&InputModel::uniform(m), c))
            .sum()
    }

    /// Open-graph charge of each module at `q`.
    pub fn module_bits(&self, q: StateId) -> Vec<f64> {
        self.modules
            .iter()
            .zip(self.components(q))
            .map(|((_, m), &c)| choice_information(&InputModel::uniform(m), c))
            .collect()
    }
}

/// Closes the connections of `w`.
///
/// Free module inputs become the system inputs (tuples in module order);
/// when every port is driven the system only reads the clock symbol.
pub fn wire(w: &Wiring) -> Result<ClosedSystem> {
    let modules: Vec<&Automaton> = w.modules.iter().map(|(_, a)| a).collect();
    check_size(&modules)?;
    let name_of = |i: usize| -> Result<&str> {
        w.modules
            .get(i)
            .map(|(n, _)| n.as_str())
            .ok_or_else(|| Error::UnknownModule(format!("#{i}")))
    };

    let mut drivers: Vec<Option<Driver>> = vec![None; modules.len()];
    let mut set_driver = |m: usize, d: Driver| -> Result<()> {
        let slot = drivers
            .get_mut(m)
            .ok_or_else(|| Error::UnknownModule(format!("#{m}")))?;
        if slot.is_some() {
            return Err(Error::MultiplyDrivenPort(w.modules[m].0.clone()));
        }
        *slot = Some(d);
        Ok(())
    };

    for (m, symbol) in &w.constants {
        name_of(*m)?;
        let s = modules[*m].symbol(symbol)?;
        set_driver(*m, Driver::Constant(s))?;
    }
    for c in &w.connections {
        let source_name = name_of(c.source)?;
        let dest_name = name_of(c.destination)?;
        let (src, dst) = (modules[c.source], modules[c.destination]);
        let by_state = src
            .state_ids()
            .map(|q| {
                let out = src.output_of(q);
                let mapped = if c.mapping.is_empty() {
                    Some(out)
                } else {
                    c.mapping.get(out).map(String::as_str)
                };
                mapped
                    .and_then(|s| dst.symbol(s).ok())
                    .ok_or_else(|| Error::AlphabetMismatch {
                        source_module: source_name.to_string(),
                        destination: dest_name.to_string(),
                        output: out.to_string(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        set_driver(
            c.destination,
            Driver::Connected {
                source: c.source,
                by_state,
            },
        )?;
    }
    let free: Vec<usize> = (0..modules.len())
        .filter(|&m| drivers[m].is_none())
        .collect();
    for (pos, &m) in free.iter().enumerate() {
        drivers[m] = Some(Driver::Free(pos));
    }
    let drivers: Vec<Driver> = drivers.into_iter().map(|d| d.expect("assigned")).collect();

    let state_tuples = tuples(&modules.iter().map(|m| m.state_count()).collect::<Vec<_>>());
    let free_tuples: Vec<Vec<usize>> = if free.is_empty() {
        Vec::new()
    } else {
        tuples(
            &free
                .iter()
                .map(|&m| modules[m].inputs().len())
                .collect::<Vec<_>>(),
        )
    };
    let free_names: Vec<String> = free_tuples
        .iter()
        .map(|t| {
            tuple_symbol(
                &t.iter()
                    .zip(&free)
                    .map(|(&s, &m)| modules[m].symbol_name(SymbolId(s)))
                    .collect::<Vec<_>>(),
            )
        })
        .collect();
    let input_names: Vec<String> = if free.is_empty() {
        vec![CLOCK.to_string()]
    } else {
        free_names.clone()
    };

    let state_label = |t: &[usize]| {
        tuple_name(
            &t.iter()
                .zip(&modules)
                .map(|(&i, m)| m.state_name(StateId(i)))
                .collect::<Vec<_>>(),
        )
    };
    let output_label = |t: &[usize]| {
        tuple_name(
            &t.iter()
                .zip(&modules)
                .map(|(&i, m)| m.output_of(StateId(i)))
                .collect::<Vec<_>>(),
        )
    };

    let mut b = Automaton::builder(w.name.clone())
        .inputs(input_names.iter().cloned())
        .states(state_tuples.iter().map(|t| state_label(t)))
        .outputs(state_tuples.iter().map(|t| output_label(t)));
    if let Some(init) = modules
        .iter()
        .map(|m| m.initial().map(StateId::index))
        .collect::<Option<Vec<_>>>()
    {
        b = b.initial(state_label(&init));
    }

    let no_free = [Vec::new()];
    let closed_inputs: &[Vec<usize>] = if free.is_empty() {
        &no_free
    } else {
        &free_tuples
    };
    for t in &state_tuples {
        let qname = state_label(t);
        b = b.output(&qname, output_label(t));
        for (k, ft) in closed_inputs.iter().enumerate() {
            let next: Option<Vec<usize>> = modules
                .iter()
                .enumerate()
                .map(|(i, m)| {
                    let s = match &drivers[i] {
                        Driver::Free(pos) => SymbolId(ft[*pos]),
                        Driver::Constant(s) => *s,
                        Driver::Connected { source, by_state } => by_state[t[*source]],
                    };
                    m.target(StateId(t[i]), s).map(StateId::index)
                })
                .collect();
            if let Some(next) = next {
                b = b.transition(&qname, &input_names[k], state_label(&next));
            }
        }
    }
    let automaton = b.build().expect("closed system of valid modules is valid");
    let mut state_components = vec![Vec::new(); automaton.state_count()];
    for t in &state_tuples {
        let q = automaton.state(&state_label(t)).expect("declared");
        state_components[q.index()] = t.iter().map(|&i| StateId(i)).collect();
    }
    Ok(ClosedSystem {
        automaton,
        modules: w.modules.clone(),
        state_components,
    })
}

fn require_initial(a: &Automaton) -> Result<StateId> {
    a.initial()
        .ok_or_else(|| Error::MissingInitial(a.name().to_string()))
}

/// States reachable from the initial state, in breadth-first order.
pub fn reachable_states(a: &Automaton) -> Result<Vec<StateId>> {
    let init = require_initial(a)?;
    let mut seen = vec![false; a.state_count()];
    let mut order = vec![init];
    seen[init.index()] = true;
    let mut i = 0;
    while i < order.len() {
        for arrow in a.arrows_from(order[i]) {
            if !seen[arrow.target.index()] {
                seen[arrow.target.index()] = true;
                order.push(arrow.target);
            }
        }
        i += 1;
    }
    Ok(order)
}

/// Restriction of `a` to the states and arrows reachable from its initial
/// state.
pub fn reachable_subgraph(a: &Automaton) -> Result<Automaton> {
    let reach = reachable_states(a)?;
    let init = require_initial(a)?;
    let mut b = Automaton::builder(a.name())
        .inputs(a.inputs().iter().cloned())
        .states(reach.iter().map(|&q| a.state_name(q).to_string()))
        .outputs(reach.iter().map(|&q| a.output_of(q).to_string()))
        .initial(a.state_name(init));
    for &q in &reach {
        b = b.output(a.state_name(q), a.output_of(q));
        for s in a.defined_symbols(q) {
            let t = a.target(q, s).expect("defined");
            b = b.transition(a.state_name(q), a.symbol_name(s), a.state_name(t));
        }
    }
    b.build()
}

#[derive(Clone)]
struct Matching {
    states: Vec<Option<StateId>>,
    states_inv: Vec<Option<StateId>>,
    symbols: Vec<Option<SymbolId>>,
    symbols_inv: Vec<Option<SymbolId>>,
}

impl Matching {
    /// Records `x ↦ y`; `Ok(true)` when the pair is new.
    fn pair(&mut self, x: StateId, y: StateId) -> Option<bool> {
        match (self.states[x.index()], self.states_inv[y.index()]) {
            (Some(p), _) => (p == y).then_some(false),
            (None, Some(_)) => None,
            (None, None) => {
                self.states[x.index()] = Some(y);
                self.states_inv[y.index()] = Some(x);
                Some(true)
            }
        }
    }
}

fn search(
    a: &Automaton,
    b: &Automaton,
    mut m: Matching,
    mut work: VecDeque<(StateId, StateId)>,
) -> bool {
    while let Some((p, q)) = work.pop_front() {
        let sa: Vec<SymbolId> = a.defined_symbols(p).collect();
        let sb: Vec<SymbolId> = b.defined_symbols(q).collect();
        if sa.len() != sb.len() {
            return false;
        }
        for &s in &sa {
            match m.symbols[s.index()] {
                Some(t) => {
                    let Some(y) = b.target(q, t) else {
                        return false;
                    };
                    let x = a.target(p, s).expect("defined");
                    match m.pair(x, y) {
                        None => return false,
                        Some(true) => work.push_back((x, y)),
                        Some(false) => {}
                    }
                }
                None => {
                    for &t in &sb {
                        if m.symbols_inv[t.index()].is_some() {
                            continue;
                        }
                        let mut m2 = m.clone();
                        m2.symbols[s.index()] = Some(t);
                        m2.symbols_inv[t.index()] = Some(s);
                        let mut w2 = work.clone();
                        w2.push_front((p, q));
                        if search(a, b, m2, w2) {
                            return true;
                        }
                    }
                    return false;
                }
            }
        }
    }
    true
}

fn equivalent_seeded(
    a: &Automaton,
    b: &Automaton,
    renaming: &[(SymbolId, SymbolId)],
) -> Result<bool> {
    let ia = require_initial(a)?;
    let ib = require_initial(b)?;
    if reachable_states(a)?.len() != reachable_states(b)?.len() {
        return Ok(false);
    }
    let mut m = Matching {
        states: vec![None; a.state_count()],
        states_inv: vec![None; b.state_count()],
        symbols: vec![None; a.inputs().len()],
        symbols_inv: vec![None; b.inputs().len()],
    };
    for &(s, t) in renaming {
        m.symbols[s.index()] = Some(t);
        m.symbols_inv[t.index()] = Some(s);
    }
    m.pair(ia, ib);
    Ok(search(a, b, m, VecDeque::from([(ia, ib)])))
}

/// Rooted isomorphism of the reachable graphs, up to some bijective renaming
/// of input symbols. Outputs are not compared.
pub fn equivalent(a: &Automaton, b: &Automaton) -> Result<bool> {
    equivalent_seeded(a, b, &[])
}

/// Like [`equivalent`] with a declared renaming of `a`'s symbols into `b`'s.
pub fn equivalent_under(
    a: &Automaton,
    b: &Automaton,
    renaming: &BTreeMap<String, String>,
) -> Result<bool> {
    let pairs = renaming
        .iter()
        .map(|(x, y)| Ok((a.symbol(x)?, b.symbol(y)?)))
        .collect::<Result<Vec<_>>>()?;
    equivalent_seeded(a, b, &pairs)
}

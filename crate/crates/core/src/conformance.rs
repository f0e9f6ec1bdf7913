//! Conformance testing of implements against their characteristic graph.
//!
//! A test presents a single input word, the [`TestTour`], that follows every
//! merged arrow at least once. Because outputs identify states, observing the
//! output after each step is enough to check every transition covered.

use std::collections::{BTreeSet, VecDeque};

use crate::automaton::{Automaton, StateId, SymbolId};
use crate::composition::{product_all, STATE_LIMIT};
use crate::error::{Error, Result};

/// An input word covering the arrows of an automaton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestTour {
    pub start: StateId,
    pub word: Vec<SymbolId>,
    /// Covered arrows as `(source, target)` pairs.
    pub covered: BTreeSet<(StateId, StateId)>,
}

impl TestTour {
    /// Cost of the test, in clock steps.
    pub fn length(&self) -> usize {
        self.word.len()
    }
}

/// Pass/fail outcome of [`simulate_test`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub first_discrepancy: Option<Discrepancy>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.first_discrepancy.is_none()
    }
}

/// Step 0 is the observation before any input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Discrepancy {
    pub step: usize,
    pub expected: String,
    pub observed: String,
}

/// A black box whose output is observable after each clock step.
pub trait Device {
    fn observe(&mut self) -> String;
    /// Presents one input symbol. Returns `false` if the device refuses it.
    fn apply(&mut self, symbol: &str) -> bool;
}

/// A device that simulates an automaton.
#[derive(Debug, Clone)]
pub struct SimulatedDevice<'a> {
    automaton: &'a Automaton,
    state: StateId,
}

impl<'a> SimulatedDevice<'a> {
    pub fn new(automaton: &'a Automaton, state: StateId) -> Self {
        Self { automaton, state }
    }
}

impl Device for SimulatedDevice<'_> {
    fn observe(&mut self) -> String {
        self.automaton.output_of(self.state).to_string()
    }

    fn apply(&mut self, symbol: &str) -> bool {
        let next = self
            .automaton
            .symbol(symbol)
            .ok()
            .and_then(|s| self.automaton.target(self.state, s));
        match next {
            Some(q) => {
                self.state = q;
                true
            }
            None => false,
        }
    }
}

fn check_limit(a: &Automaton) -> Result<()> {
    let states = a.state_count() as u128;
    if states > STATE_LIMIT {
        return Err(Error::SizeLimit {
            states,
            limit: STATE_LIMIT,
        });
    }
    Ok(())
}

/// Greedy transition tour from `start`.
///
/// An arrow is safe when, once it is covered, every other uncovered arrow
/// stays reachable from its target. At each point the walk takes a safe
/// uncovered arrow of the current state, preferring arrows whose target
/// still has uncovered arrows of its own, then the `arrows_from` order. If
/// there is none it goes along a shortest path to the nearest state that has
/// one, and failing that to the nearest state with any uncovered arrow. Each
/// arrow is triggered by its smallest label.
pub fn transition_tour(a: &Automaton, start: StateId) -> Result<TestTour> {
    check_limit(a)?;
    let mut tour = Tour {
        a,
        uncovered: a.state_ids().map(|q| a.out_degree(q)).collect(),
        flags: a
            .state_ids()
            .map(|q| vec![false; a.out_degree(q)])
            .collect(),
    };
    let mut remaining: usize = tour.uncovered.iter().sum();
    let mut word = Vec::new();
    let mut covered = BTreeSet::new();
    let mut q = start;

    while remaining > 0 {
        let pick = match tour.best_arrow(q, true) {
            Some(i) => i,
            None => {
                let route = tour
                    .route(q, |t, q| t.best_arrow(q, true).is_some())
                    .or_else(|| tour.route(q, |t, q| t.uncovered[q.index()] > 0));
                match route {
                    Some(route) => {
                        for (s, t) in route {
                            word.push(s);
                            q = t;
                        }
                        match tour.best_arrow(q, true) {
                            Some(i) => i,
                            None => tour
                                .best_arrow(q, false)
                                .expect("route ends at an uncovered arrow"),
                        }
                    }
                    None => break,
                }
            }
        };
        let arrow = &a.arrows_from(q)[pick];
        tour.flags[q.index()][pick] = true;
        tour.uncovered[q.index()] -= 1;
        remaining -= 1;
        covered.insert((arrow.source, arrow.target));
        word.push(arrow.labels[0]);
        q = arrow.target;
    }

    if remaining > 0 {
        let uncovered = a
            .arrows()
            .filter(|arr| !covered.contains(&(arr.source, arr.target)))
            .map(|arr| {
                (
                    a.state_name(arr.source).to_string(),
                    a.state_name(arr.target).to_string(),
                )
            })
            .collect();
        return Err(Error::Untestable {
            automaton: a.name().to_string(),
            uncovered,
        });
    }
    Ok(TestTour {
        start,
        word,
        covered,
    })
}

struct Tour<'a> {
    a: &'a Automaton,
    uncovered: Vec<usize>,
    flags: Vec<Vec<bool>>,
}

impl Tour<'_> {
    /// Preferred uncovered arrow at `q`, restricted to safe ones if asked.
    fn best_arrow(&mut self, q: StateId, safe_only: bool) -> Option<usize> {
        let arrows = self.a.arrows_from(q);
        let mut order: Vec<usize> = (0..arrows.len())
            .filter(|&i| !self.flags[q.index()][i])
            .collect();
        if order.is_empty() {
            return None;
        }
        self.uncovered[q.index()] -= 1;
        order.sort_by_key(|&i| (self.uncovered[arrows[i].target.index()] == 0, i));
        let pick = order
            .iter()
            .copied()
            .find(|&i| !safe_only || reaches_all(self.a, arrows[i].target, &self.uncovered));
        self.uncovered[q.index()] += 1;
        pick
    }

    /// Shortest path from `from` to the nearest state satisfying `goal`.
    fn route(
        &mut self,
        from: StateId,
        goal: impl Fn(&mut Self, StateId) -> bool,
    ) -> Option<Vec<(SymbolId, StateId)>> {
        let a = self.a;
        let mut prev: Vec<Option<(StateId, SymbolId)>> = vec![None; a.state_count()];
        let mut seen = vec![false; a.state_count()];
        seen[from.index()] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(q) = queue.pop_front() {
            if goal(self, q) {
                let mut route = Vec::new();
                let mut cur = q;
                while let Some((p, s)) = prev[cur.index()] {
                    route.push((s, cur));
                    cur = p;
                }
                route.reverse();
                return Some(route);
            }
            for arrow in a.arrows_from(q) {
                if !seen[arrow.target.index()] {
                    seen[arrow.target.index()] = true;
                    prev[arrow.target.index()] = Some((q, arrow.labels[0]));
                    queue.push_back(arrow.target);
                }
            }
        }
        None
    }
}

/// Whether every state with uncovered arrows is reachable from `from`.
fn reaches_all(a: &Automaton, from: StateId, uncovered: &[usize]) -> bool {
    let mut seen = vec![false; a.state_count()];
    seen[from.index()] = true;
    let mut stack = vec![from];
    while let Some(q) = stack.pop() {
        for arrow in a.arrows_from(q) {
            if !seen[arrow.target.index()] {
                seen[arrow.target.index()] = true;
                stack.push(arrow.target);
            }
        }
    }
    uncovered
        .iter()
        .zip(&seen)
        .all(|(&left, &reached)| left == 0 || reached)
}

/// Length of the transition tour from `start`.
pub fn test_cost(a: &Automaton, start: StateId) -> Result<usize> {
    transition_tour(a, start).map(|t| t.length())
}

/// Sum of the separate test costs of each module.
pub fn modular_test_cost(modules: &[&Automaton], starts: &[StateId]) -> Result<usize> {
    modules
        .iter()
        .zip(starts)
        .map(|(m, &s)| {
            test_cost(m, s).map_err(|e| match e {
                Error::Untestable { uncovered, .. } => Error::Untestable {
                    automaton: m.name().to_string(),
                    uncovered,
                },
                other => other,
            })
        })
        .sum()
}

/// Cost of testing the product of `modules` as one monolithic automaton.
///
/// Refuses with `SizeLimit` beyond [`STATE_LIMIT`] product states.
pub fn monolithic_test_cost(modules: &[&Automaton], starts: &[StateId]) -> Result<usize> {
    let p = product_all(modules)?;
    let a = p.automaton();
    let start = a
        .state_ids()
        .find(|&q| p.components(q) == starts)
        .ok_or_else(|| Error::UnknownState(format!("{starts:?}")))?;
    test_cost(a, start)
}

/// Arrow count of the product of `modules`, computed without building it.
/// Saturates at `u128::MAX`.
pub fn product_arrow_count(modules: &[&Automaton]) -> u128 {
    // Out-degrees multiply state by state, so the total is the product of
    // the component totals.
    modules
        .iter()
        .try_fold(1u128, |acc, m| acc.checked_mul(m.arrow_count() as u128))
        .unwrap_or(u128::MAX)
}

/// Replays `tour` on `device` and compares outputs with `reference`.
pub fn simulate_test(
    reference: &Automaton,
    device: &mut dyn Device,
    tour: &TestTour,
) -> Result<Verdict> {
    let path = reference.run(tour.start, &tour.word)?;
    for (step, expected) in path.outputs.iter().enumerate() {
        if step > 0 {
            let symbol = reference.symbol_name(tour.word[step - 1]);
            if !device.apply(symbol) {
                return Err(Error::DeviceRefused(step - 1));
            }
        }
        let observed = device.observe();
        if &observed != expected {
            return Ok(Verdict {
                first_discrepancy: Some(Discrepancy {
                    step,
                    expected: expected.clone(),
                    observed,
                }),
            });
        }
    }
    Ok(Verdict {
        first_discrepancy: None,
    })
}

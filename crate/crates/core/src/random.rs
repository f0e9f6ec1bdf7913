//! Seeded generators of random automata and input models, for property tests
//! and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::automaton::Automaton;
use crate::dissipation::{Distribution, InputModel};
use crate::turing::{Move, TuringMachine};

fn names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// Random deterministic automaton with `states` states over `symbols`
/// symbols. Each (state, symbol) pair is defined with probability `density`.
pub fn random_automaton<R: Rng + ?Sized>(
    rng: &mut R,
    name: &str,
    states: usize,
    symbols: usize,
    density: f64,
) -> Automaton {
    build_random(rng, name, states, symbols, density, true)
}

/// Like [`random_automaton`] but every state has at least one transition.
pub fn random_module<R: Rng + ?Sized>(
    rng: &mut R,
    name: &str,
    states: usize,
    symbols: usize,
    density: f64,
) -> Automaton {
    build_random(rng, name, states, symbols, density, false)
}

fn build_random<R: Rng + ?Sized>(
    rng: &mut R,
    name: &str,
    states: usize,
    symbols: usize,
    density: f64,
    allow_sinks: bool,
) -> Automaton {
    let qs = names("q", states);
    let xs = names("x", symbols);
    let mut b = Automaton::builder(name)
        .states(qs.iter().cloned())
        .inputs(xs.iter().cloned())
        .outputs(names("o", states));
    if states > 0 {
        b = b.initial(&qs[0]);
    }
    for (i, q) in qs.iter().enumerate() {
        b = b.output(q, format!("o{i}"));
        let forced = (!allow_sinks).then(|| rng.gen_range(0..symbols));
        for (j, x) in xs.iter().enumerate() {
            if forced == Some(j) || rng.gen_bool(density) {
                let t = &qs[rng.gen_range(0..states)];
                b = b.transition(q, x, t);
            }
        }
    }
    b.build().expect("generated automaton is valid")
}

/// Random automaton of 1..=`max_states` states and 1..=`max_symbols` symbols.
pub fn small_automaton<R: Rng + ?Sized>(
    rng: &mut R,
    max_states: usize,
    max_symbols: usize,
) -> Automaton {
    let n = rng.gen_range(1..=max_states);
    let k = rng.gen_range(1..=max_symbols);
    let density = rng.gen_range(0.3..=1.0);
    random_automaton(rng, "random", n, k, density)
}

/// Random strongly connected automaton: a random Hamiltonian cycle through
/// all states on some symbol, plus extra random transitions.
pub fn strongly_connected<R: Rng + ?Sized>(
    rng: &mut R,
    states: usize,
    symbols: usize,
) -> Automaton {
    assert!(states >= 1 && symbols >= 1);
    let qs = names("q", states);
    let xs = names("x", symbols);
    let mut order: Vec<usize> = (1..states).collect();
    order.shuffle(rng);
    order.insert(0, 0);

    let mut table = vec![vec![None; symbols]; states];
    for w in 0..states {
        let from = order[w];
        let to = order[(w + 1) % states];
        let x = rng.gen_range(0..symbols);
        table[from][x] = Some(to);
    }
    for row in table.iter_mut() {
        for cell in row.iter_mut() {
            if cell.is_none() && rng.gen_bool(0.5) {
                *cell = Some(rng.gen_range(0..states));
            }
        }
    }

    let mut b = Automaton::builder("scc")
        .states(qs.iter().cloned())
        .inputs(xs.iter().cloned())
        .outputs(names("o", states))
        .initial(&qs[0]);
    for (i, row) in table.iter().enumerate() {
        b = b.output(&qs[i], format!("o{i}"));
        for (x, cell) in row.iter().enumerate() {
            if let Some(t) = cell {
                b = b.transition(&qs[i], &xs[x], &qs[*t]);
            }
        }
    }
    b.build().expect("generated automaton is valid")
}

/// Random positive probabilities over the arrows of every state.
pub fn random_model<R: Rng + ?Sized>(rng: &mut R, a: &Automaton) -> InputModel {
    let rows = a
        .state_ids()
        .map(|q| {
            let w: Vec<f64> = (0..a.out_degree(q))
                .map(|_| rng.gen_range(0.05..1.0))
                .collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|x| x / s).collect()
        })
        .collect();
    InputModel::from_arrow_probabilities(a, rows).expect("normalised rows")
}

/// Random full-support distribution over `n` states.
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Distribution {
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    let s: f64 = w.iter().sum();
    Distribution::new(w.into_iter().map(|x| x / s).collect()).expect("normalised")
}

/// Random machine with up to `max_states` working states plus `halt`, over
/// `0`, `1` and possibly `_` (blank `0`). Rules are partial.
pub fn random_machine<R: Rng + ?Sized>(rng: &mut R, max_states: usize) -> TuringMachine {
    let n = rng.gen_range(1..=max_states);
    let qs = names("q", n);
    let mut tape = vec!["0", "1"];
    if rng.gen_bool(0.3) {
        tape.push("_");
    }
    let mut b = TuringMachine::builder("random", "0")
        .tape_symbols(tape.iter().copied())
        .states(qs.iter().cloned())
        .states(["halt"])
        .initial(&qs[0])
        .halting(["halt"]);
    for q in &qs {
        for &read in &tape {
            if rng.gen_bool(0.85) {
                let next = if rng.gen_bool(0.2) {
                    "halt".to_string()
                } else {
                    qs[rng.gen_range(0..n)].clone()
                };
                let write = tape[rng.gen_range(0..tape.len())];
                let movement = [Move::Left, Move::Right, Move::None][rng.gen_range(0..3)];
                b = b.rule(q, read, next, write, movement);
            }
        }
    }
    b.build().expect("generated machine is valid")
}

//! Reference automata and machines used throughout the documentation,
//! tests and benchmarks.
//!
//! Inputless automata use the single clock symbol [`CLOCK`].

use crate::automaton::Automaton;
use crate::composition::Wiring;
use crate::turing::{Move, TuringMachine};

/// Input symbol of clock-driven automata that read no information.
pub const CLOCK: &str = "ck";

fn build(b: crate::automaton::AutomatonBuilder) -> Automaton {
    b.build().expect("reference automaton is valid")
}

/// Two-state memory written by `set0` / `set1`.
pub fn one_bit_memory() -> Automaton {
    build(
        Automaton::builder("memory")
            .inputs(["set0", "set1"])
            .outputs(["0", "1"])
            .states(["0", "1"])
            .initial("0")
            .output("0", "0")
            .output("1", "1")
            .transition("0", "set0", "0")
            .transition("0", "set1", "1")
            .transition("1", "set0", "0")
            .transition("1", "set1", "1"),
    )
}

/// Ten-arrow dissipative automaton with divergences at B, C, G and
/// convergences at C, F. `Stop` is a sink.
pub fn fig7() -> Automaton {
    let states = ["A", "B", "C", "D", "E", "F", "G", "Stop"];
    let mut b = Automaton::builder("fig7")
        .inputs(["0", "1"])
        .outputs(states.iter().map(|s| s.to_lowercase()))
        .states(states)
        .initial("A");
    for s in states {
        b = b.output(s, s.to_lowercase());
    }
    for (from, sym, to) in [
        ("A", "0", "B"),
        ("B", "0", "E"),
        ("B", "1", "C"),
        ("C", "0", "C"),
        ("C", "1", "D"),
        ("D", "0", "F"),
        ("E", "1", "F"),
        ("F", "1", "G"),
        ("G", "0", "Stop"),
        ("G", "1", "A"),
    ] {
        b = b.transition(from, sym, to);
    }
    build(b)
}

/// Cyclic modulo-`n` counter driven by the clock only.
pub fn cyclic_counter(name: &str, n: usize) -> Automaton {
    let ids: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let mut b = Automaton::builder(name)
        .inputs([CLOCK])
        .outputs(ids.iter().cloned())
        .states(ids.iter().cloned())
        .initial("0");
    for i in 0..n {
        b = b
            .output(&ids[i], &ids[i])
            .transition(&ids[i], CLOCK, &ids[(i + 1) % n]);
    }
    build(b)
}

pub fn mod4_counter() -> Automaton {
    cyclic_counter("mod4", 4)
}

pub fn mod2_counter() -> Automaton {
    cyclic_counter("mod2", 2)
}

/// T-flip-flop: `T = 0` keeps the state, `T = 1` toggles it. Output `Q`
/// equals the state.
pub fn t_flip_flop() -> Automaton {
    build(
        Automaton::builder("tff")
            .inputs(["0", "1"])
            .outputs(["0", "1"])
            .states(["0", "1"])
            .initial("0")
            .output("0", "0")
            .output("1", "1")
            .transition("0", "0", "0")
            .transition("0", "1", "1")
            .transition("1", "0", "1")
            .transition("1", "1", "0"),
    )
}

/// Inputless chain `s0 -> s1 -> ... -> s{n-1}`.
pub fn linear_chain(n: usize) -> Automaton {
    let ids: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let mut b = Automaton::builder("chain")
        .inputs([CLOCK])
        .outputs(ids.iter().cloned())
        .states(ids.iter().cloned());
    if n > 0 {
        b = b.initial(&ids[0]);
    }
    for i in 0..n {
        b = b.output(&ids[i], &ids[i]);
        if i + 1 < n {
            b = b.transition(&ids[i], CLOCK, &ids[i + 1]);
        }
    }
    build(b)
}

/// Two T-flip-flops: `A` toggles on every pulse, `B` toggles when `Q_A = 1`.
pub fn two_bit_counter_wiring() -> Wiring {
    let mut w = Wiring::new("counter4");
    let a = w.add_module("A", t_flip_flop());
    let b = w.add_module("B", t_flip_flop());
    w.constant(a, "1");
    w.connect(a, b);
    w
}

/// A modulo-2 counter whose output drives a T-flip-flop.
pub fn mod2_tff_wiring() -> Wiring {
    let mut w = Wiring::new("counter4b");
    let a = w.add_module("A", mod2_counter());
    let b = w.add_module("B", t_flip_flop());
    w.constant(a, CLOCK);
    w.connect(a, b);
    w
}

/// Two-state, two-symbol busy beaver: halts after 6 steps leaving four 1s.
pub fn busy_beaver2() -> TuringMachine {
    TuringMachine::builder("bb2", "0")
        .tape_symbols(["0", "1"])
        .states(["a", "b", "halt"])
        .initial("a")
        .halting(["halt"])
        .rule("a", "0", "b", "1", Move::Right)
        .rule("a", "1", "b", "1", Move::Left)
        .rule("b", "0", "a", "1", Move::Left)
        .rule("b", "1", "halt", "1", Move::Right)
        .build()
        .expect("reference machine is valid")
}

/// Binary counter that increments forever. The number is written most
/// significant digit first; `r` walks right to the end, `c` propagates the
/// carry leftwards.
pub fn binary_counter() -> TuringMachine {
    TuringMachine::builder("bincount", "_")
        .tape_symbols(["_", "0", "1"])
        .states(["c", "r"])
        .initial("r")
        .rule("r", "0", "r", "0", Move::Right)
        .rule("r", "1", "r", "1", Move::Right)
        .rule("r", "_", "c", "_", Move::Left)
        .rule("c", "1", "c", "0", Move::Left)
        .rule("c", "0", "r", "1", Move::Right)
        .rule("c", "_", "r", "1", Move::Right)
        .build()
        .expect("reference machine is valid")
}

/// One control state rewriting blanks while moving right, forever.
pub fn right_sweeper() -> TuringMachine {
    TuringMachine::builder("sweep", "0")
        .tape_symbols(["0", "1"])
        .states(["a"])
        .initial("a")
        .rule("a", "0", "a", "0", Move::Right)
        .build()
        .expect("reference machine is valid")
}

/// Halts immediately: the result is the input.
pub fn identity_machine() -> TuringMachine {
    TuringMachine::builder("identity", "0")
        .tape_symbols(["0", "1"])
        .states(["h"])
        .initial("h")
        .halting(["h"])
        .build()
        .expect("reference machine is valid")
}

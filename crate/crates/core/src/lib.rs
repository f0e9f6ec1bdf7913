//! Information loss in finite automata and the machines built from them.
//!
//! The crate covers deterministic automata and their arrow structure,
//! choice information and ensemble dissipation, parallel products and wired
//! closed systems, transition tours for conformance testing, and Turing
//! machines read as a head automaton plus memory cells.

pub mod automaton;
pub mod composition;
pub mod conformance;
pub mod dissipation;
pub mod error;
pub mod figures;
pub mod random;
pub mod turing;

pub use automaton::{Arrow, Automaton, AutomatonBuilder, Path, PathStep, StateId, SymbolId};
pub use composition::{
    equivalent, equivalent_under, product, product_all, reachable_states, reachable_subgraph, wire,
    ClosedSystem, Connection, ProductAutomaton, Wiring, STATE_LIMIT,
};
pub use conformance::{
    modular_test_cost, monolithic_test_cost, simulate_test, test_cost, transition_tour, Device,
    Discrepancy, SimulatedDevice, TestTour, Verdict,
};
pub use dissipation::{
    choice_information, ensemble_dissipation, ensemble_step, entropy_bits, landauer_energy,
    path_choice_information, szilard_check, Distribution, EnsembleTrace, InputModel, PathReport,
    BOLTZMANN,
};
pub use error::{Error, Result};
pub use figures::CLOCK;
pub use turing::{
    bennett_simulate, cell_automaton, check_convergence_lemma, global_graph, head_automaton,
    modular_tm_dissipation, tm_run, tm_step, BennettTrace, Configuration, Move, RunTrace,
    TuringMachine,
};

//! Logical dissipation of an automaton.
//!
//! Two measures are provided:
//!
//! * **choice information** carried by the input when a state is left,
//!   `-Σ p log₂ p` over the merged arrows of that state, summed along a
//!   computation by [`path_choice_information`];
//! * **ensemble loss**: pushing a distribution over states through one step,
//!   the entropy of the joint `(state, arrow)` pair minus the entropy of the
//!   next state. The joint pair maps deterministically onto the next state,
//!   so this loss is never negative, and it is non-zero only where arrows
//!   converge.
//!
//! Over `T` steps the two are tied by
//! `loss = Σ input bits + H(π₀) − H(π_T)`, see [`EnsembleTrace`].
//!
//! All quantities are in bits.

use std::collections::BTreeMap;

use crate::automaton::{Automaton, Path, StateId, SymbolId};
use crate::error::{Error, Result};

/// Boltzmann constant in J/K, at the precision used for the reference values.
pub const BOLTZMANN: f64 = 1.38e-23;

/// Tolerance on probability sums.
pub const PROBABILITY_TOLERANCE: f64 = 1e-12;

/// Tolerance on entropy identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

/// Shannon entropy in bits; zero entries contribute nothing.
pub fn entropy_bits(p: &[f64]) -> f64 {
    // Folding from +0.0 keeps deterministic states at 0 rather than -0.
    p.iter()
        .filter(|&&x| x > 0.0)
        .fold(0.0, |h, &x| h - x * x.log2())
}

fn surprisal(p: f64) -> f64 {
    if p >= 1.0 {
        0.0
    } else {
        -p.log2()
    }
}

fn check_probabilities(p: &[f64], tolerance: f64, what: &str) -> Result<()> {
    if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "{what}: entry {x} is negative or not finite"
        )));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > tolerance {
        return Err(Error::InvalidDistribution(format!(
            "{what}: probabilities sum to {sum}"
        )));
    }
    Ok(())
}

/// Probability of each merged arrow leaving each state.
///
/// Rows follow `arrows_from(q)` order. Sink states have empty rows.
#[derive(Debug, Clone, PartialEq)]
pub struct InputModel {
    probs: Vec<Vec<f64>>,
}

impl InputModel {
    /// Equiprobable arrows in every state.
    pub fn uniform(a: &Automaton) -> Self {
        let probs = a
            .state_ids()
            .map(|q| {
                let n = a.out_degree(q);
                vec![1.0 / n as f64; n]
            })
            .collect();
        Self { probs }
    }

    /// Explicit per-arrow probabilities, one row per state.
    pub fn from_arrow_probabilities(a: &Automaton, probs: Vec<Vec<f64>>) -> Result<Self> {
        if probs.len() != a.state_count() {
            return Err(Error::InvalidDistribution(format!(
                "expected {} rows, got {}",
                a.state_count(),
                probs.len()
            )));
        }
        for (q, row) in a.state_ids().zip(&probs) {
            let name = a.state_name(q);
            if row.len() != a.out_degree(q) {
                return Err(Error::InvalidDistribution(format!(
                    "state `{name}` has {} arrows but {} probabilities",
                    a.out_degree(q),
                    row.len()
                )));
            }
            if !row.is_empty() {
                check_probabilities(row, PROBABILITY_TOLERANCE, &format!("state `{name}`"))?;
            }
        }
        Ok(Self { probs })
    }

    /// Builds a model from per-symbol probabilities.
    ///
    /// The probability of an arrow is the sum over its labels. States without
    /// any entry stay uniform; states with entries must sum to one within
    /// `tolerance` and are then renormalised exactly.
    pub fn from_symbol_probabilities(
        a: &Automaton,
        weights: &BTreeMap<(StateId, SymbolId), f64>,
        tolerance: f64,
    ) -> Result<Self> {
        let mut model = Self::uniform(a);
        for q in a.state_ids() {
            let entries: Vec<(SymbolId, f64)> = weights
                .range((q, SymbolId(0))..=(q, SymbolId(usize::MAX)))
                .map(|(&(_, s), &p)| (s, p))
                .collect();
            if entries.is_empty() {
                continue;
            }
            let name = a.state_name(q);
            let mut row = vec![0.0; a.out_degree(q)];
            for (s, p) in entries {
                let Some(target) = a.target(q, s) else {
                    return Err(Error::ForbiddenInput {
                        state: name.to_string(),
                        symbol: a.symbol_name(s).to_string(),
                        position: None,
                    });
                };
                let i = a
                    .arrows_from(q)
                    .iter()
                    .position(|arrow| arrow.target == target)
                    .expect("defined transition has an arrow");
                row[i] += p;
            }
            check_probabilities(&row, tolerance, &format!("state `{name}`"))?;
            let sum: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p /= sum);
            model.probs[q.index()] = row;
        }
        Ok(model)
    }

    pub fn arrow_probabilities(&self, q: StateId) -> &[f64] {
        &self.probs[q.index()]
    }

    pub fn probability(&self, q: StateId, arrow: usize) -> f64 {
        self.probs[q.index()][arrow]
    }

    /// True when every row is uniform.
    pub fn is_uniform(&self) -> bool {
        self.probs.iter().all(|row| {
            let u = 1.0 / row.len() as f64;
            row.iter().all(|p| (p - u).abs() <= PROBABILITY_TOLERANCE)
        })
    }
}

/// Information needed to leave `q`: the entropy of its arrow distribution.
pub fn choice_information(m: &InputModel, q: StateId) -> f64 {
    entropy_bits(m.arrow_probabilities(q))
}

/// Choice information of every step of a computation.
#[derive(Debug, Clone, PartialEq)]
pub struct PathReport {
    pub path: Path,
    pub per_step_bits: Vec<f64>,
    pub total_bits: f64,
    /// Indices of steps whose target is a convergent state.
    pub convergences_entered: Vec<usize>,
}

/// Runs `word` from `start` and charges `-log₂ p` for each arrow taken.
///
/// Under the uniform model this is `log₂(out-degree)` at each divergence.
pub fn path_choice_information(
    a: &Automaton,
    m: &InputModel,
    start: StateId,
    word: &[SymbolId],
) -> Result<PathReport> {
    let path = a.run(start, word)?;
    let mut per_step_bits = Vec::with_capacity(path.len());
    let mut convergences_entered = Vec::new();
    for (i, step) in path.steps.iter().enumerate() {
        let source = path.source_of(i);
        per_step_bits.push(surprisal(m.probability(source, step.arrow)));
        if a.in_degree(step.target) >= 2 {
            convergences_entered.push(i);
        }
    }
    let total_bits = per_step_bits.iter().sum();
    Ok(PathReport {
        path,
        per_step_bits,
        total_bits,
        convergences_entered,
    })
}

/// Probability distribution over the states of an automaton.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        check_probabilities(&p, PROBABILITY_TOLERANCE, "state distribution")?;
        Ok(Self(p))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn point(n: usize, q: StateId) -> Self {
        let mut p = vec![0.0; n];
        p[q.index()] = 1.0;
        Self(p)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.0)
    }

    pub fn mass(&self, q: StateId) -> f64 {
        self.0[q.index()]
    }
}

/// Result of pushing a distribution through one step.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStep {
    pub next: Distribution,
    /// `H(π) + input_bits − H(π')`, never below zero up to rounding.
    pub loss_bits: f64,
    /// Expected choice information `Σ π(q)·H(q)`.
    pub input_bits: f64,
}

/// One step of the state distribution under the input model.
///
/// Mass on sink states is carried over unchanged and reads no input.
pub fn ensemble_step(a: &Automaton, m: &InputModel, pi: &Distribution) -> Result<EnsembleStep> {
    if pi.len() != a.state_count() {
        return Err(Error::InvalidDistribution(format!(
            "distribution has {} entries for {} states",
            pi.len(),
            a.state_count()
        )));
    }
    check_probabilities(pi.as_slice(), PROBABILITY_TOLERANCE, "state distribution")?;
    Ok(step_unchecked(a, m, pi))
}

fn step_unchecked(a: &Automaton, m: &InputModel, pi: &Distribution) -> EnsembleStep {
    let mut next = vec![0.0; a.state_count()];
    let mut input_bits = 0.0;
    for q in a.state_ids() {
        let mass = pi.mass(q);
        if mass == 0.0 {
            continue;
        }
        let arrows = a.arrows_from(q);
        if arrows.is_empty() {
            next[q.index()] += mass;
            continue;
        }
        input_bits += mass * choice_information(m, q);
        for (arrow, &p) in arrows.iter().zip(m.arrow_probabilities(q)) {
            next[arrow.target.index()] += mass * p;
        }
    }
    let next = Distribution(next);
    let loss_bits = pi.entropy() + input_bits - next.entropy();
    EnsembleStep {
        next,
        loss_bits,
        input_bits,
    }
}

/// Evolution of a state distribution over a horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleTrace {
    /// `π₀ … π_T`, one more entry than there are steps.
    pub distributions: Vec<Distribution>,
    pub per_step_loss_bits: Vec<f64>,
    /// Running sum of `per_step_loss_bits`.
    pub cumulative_loss_bits: Vec<f64>,
    pub per_step_input_bits: Vec<f64>,
}

impl EnsembleTrace {
    pub fn horizon(&self) -> usize {
        self.per_step_loss_bits.len()
    }

    pub fn total_loss(&self) -> f64 {
        self.cumulative_loss_bits.last().copied().unwrap_or(0.0)
    }

    pub fn total_input(&self) -> f64 {
        self.per_step_input_bits.iter().sum()
    }

    /// `H(π₀) − H(π_T)`: entropy drawn from (or stored into) the state.
    pub fn stored_entropy_change(&self) -> f64 {
        let first = self
            .distributions
            .first()
            .map_or(0.0, Distribution::entropy);
        let last = self.distributions.last().map_or(0.0, Distribution::entropy);
        first - last
    }

    /// Deviation from `loss = input + H(π₀) − H(π_T)`; zero up to rounding.
    pub fn accounting_residual(&self) -> f64 {
        self.total_loss() - (self.total_input() + self.stored_entropy_change())
    }
}

/// Iterates [`ensemble_step`] `horizon` times from `pi0`.
pub fn ensemble_dissipation(
    a: &Automaton,
    m: &InputModel,
    pi0: &Distribution,
    horizon: usize,
) -> Result<EnsembleTrace> {
    let first = ensemble_step(a, m, pi0)?;
    let mut trace = EnsembleTrace {
        distributions: vec![pi0.clone()],
        per_step_loss_bits: Vec::with_capacity(horizon),
        cumulative_loss_bits: Vec::with_capacity(horizon),
        per_step_input_bits: Vec::with_capacity(horizon),
    };
    let mut total = 0.0;
    let mut step = first;
    for t in 0..horizon {
        if t > 0 {
            step = step_unchecked(a, m, trace.distributions.last().expect("non-empty"));
        }
        total += step.loss_bits;
        trace.per_step_loss_bits.push(step.loss_bits);
        trace.cumulative_loss_bits.push(total);
        trace.per_step_input_bits.push(step.input_bits);
        trace.distributions.push(step.next.clone());
    }
    Ok(trace)
}

/// Whether entropy increases `s1`, `s2` (J/K) of a two-state memory satisfy
/// `exp(−s1/k) + exp(−s2/k) ≤ 1`.
pub fn szilard_check(s1: f64, s2: f64) -> bool {
    (-s1 / BOLTZMANN).exp() + (-s2 / BOLTZMANN).exp() <= 1.0 + PROBABILITY_TOLERANCE
}

/// Minimum energy in joules dissipated when erasing `bits` at `temperature`.
// Negated comparisons also reject NaN.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn landauer_energy(bits: f64, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return Err(Error::NonPositiveTemperature(temperature));
    }
    if !(bits >= 0.0) {
        return Err(Error::NegativeInformation(bits));
    }
    Ok(bits * BOLTZMANN * temperature * std::f64::consts::LN_2)
}

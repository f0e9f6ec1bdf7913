//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Every tolerance and seed is pinned below.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::HashMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use dissipate_cli::formats::{load_automaton, load_tm, load_wiring};
use dissipate_core::composition::{equivalent, product, reachable_subgraph, wire};
use dissipate_core::conformance::{
    modular_test_cost, product_arrow_count, test_cost, transition_tour,
};
use dissipate_core::dissipation::{
    choice_information, ensemble_dissipation, landauer_energy, path_choice_information,
    szilard_check, Distribution, InputModel, BOLTZMANN,
};
use dissipate_core::random::{
    random_distribution, random_model, random_module, small_automaton, strongly_connected,
};
use dissipate_core::turing::{
    bennett_simulate, global_graph, head_automaton, modular_tm_dissipation, tm_run,
};
use dissipate_core::Automaton;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const WORD_TOLERANCE: f64 = 1e-9;
const WORD_TIME_LIMIT: Duration = Duration::from_millis(1);
const MEMORY_TOLERANCE: f64 = 1e-9;
const COUNTER_TOLERANCE: f64 = 1e-12;
const EXTENSIVITY_TOLERANCE: f64 = 1e-9;
const IDENTITY_TOLERANCE: f64 = 1e-9;
const LOSS_FLOOR: f64 = -1e-12;
const LANDAUER_ONE_BIT: f64 = 2.8699e-21;
const LANDAUER_TOLERANCE: f64 = 1e-24;

const EXTENSIVITY_PAIRS: usize = 500;
const TOUR_AUTOMATA: usize = 1000;
const IDENTITY_TRIPLES: usize = 1000;
const SEED: u64 = 20_240_611;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! check {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn asset(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../assets")
        .join(name)
}

fn automaton(name: &str) -> Result<Automaton, String> {
    load_automaton(&asset(name))
        .map(|f| f.automaton)
        .map_err(|e| e.to_string())
}

fn names(a: &Automaton, qs: &[dissipate_core::StateId]) -> Vec<String> {
    qs.iter().map(|&q| a.state_name(q).to_string()).collect()
}

fn criterion_1() -> Outcome {
    let file = load_automaton(&asset("fig7.aut")).map_err(|e| e.to_string())?;
    let a = &file.automaton;
    let start = a.state("A").map_err(|e| e.to_string())?;
    let cases = [
        ("0100001010", 7.0, "A B C C C C C D F G Stop"),
        ("0011100110", 4.0, "A B E F G A B E F G Stop"),
    ];
    let mut fastest = Duration::MAX;
    for (word, bits, path) in cases {
        let w = a.parse_word(word).map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let t0 = Instant::now();
            let r =
                path_choice_information(a, &file.model, start, &w).map_err(|e| e.to_string())?;
            fastest = fastest.min(t0.elapsed());
            check!(
                (r.total_bits - bits).abs() <= WORD_TOLERANCE,
                "{word}: {} bits",
                r.total_bits
            );
            let visited = names(a, &r.path.states()).join(" ");
            check!(visited == path, "{word}: path {visited}");
        }
    }
    check!(
        fastest < WORD_TIME_LIMIT,
        "word evaluation took {fastest:?}"
    );
    Ok(format!("7 and 4 bits, paths exact, {fastest:?} per word"))
}

fn criterion_2() -> Outcome {
    let a = automaton("fig5.aut")?;
    let m = InputModel::uniform(&a);
    let t = ensemble_dissipation(&a, &m, &Distribution::uniform(a.state_count()), 100)
        .map_err(|e| e.to_string())?;
    check!(t.horizon() == 100, "horizon {}", t.horizon());
    for (i, &l) in t.per_step_loss_bits.iter().enumerate() {
        check!((l - 1.0).abs() <= MEMORY_TOLERANCE, "step {i}: {l} bits");
    }
    Ok(format!(
        "1 bit/step for 100 steps, total {:.9}",
        t.total_loss()
    ))
}

fn criterion_3() -> Outcome {
    let a = automaton("fig8.aut")?;
    check!(a.is_reversible(), "not reversible");
    check!(a.divergent_states().is_empty(), "divergent states present");
    check!(
        a.convergent_states().is_empty(),
        "convergent states present"
    );
    let m = InputModel::uniform(&a);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut starts = vec![Distribution::uniform(4)];
    starts.extend(a.state_ids().map(|q| Distribution::point(4, q)));
    starts.extend((0..10).map(|_| random_distribution(&mut rng, 4)));
    for pi in &starts {
        for horizon in [1, 10, 100, 1000] {
            let t = ensemble_dissipation(&a, &m, pi, horizon).map_err(|e| e.to_string())?;
            let worst = t
                .per_step_loss_bits
                .iter()
                .fold(0.0f64, |w, l| w.max(l.abs()));
            check!(
                worst <= COUNTER_TOLERANCE,
                "loss {worst} at horizon {horizon}"
            );
        }
    }
    Ok(format!(
        "reversible, no divergence/convergence, zero loss from {} starts",
        starts.len()
    ))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let mut worst = 0.0f64;
    for pair in 0..EXTENSIVITY_PAIRS {
        let mut module = |name: &str| {
            let n = rng.gen_range(1..=6);
            let k = rng.gen_range(1..=3);
            let d = rng.gen_range(0.3..=1.0);
            random_module(&mut rng, name, n, k, d)
        };
        let (a, b) = (module("A"), module("B"));
        let (ma, mb) = (random_model(&mut rng, &a), random_model(&mut rng, &b));
        let p = product(&a, &b);
        let pa = p.automaton();
        check!(
            pa.state_count() == a.state_count() * b.state_count(),
            "pair {pair}: {} states",
            pa.state_count()
        );
        let mp = p.product_model(&[&a, &b], &[&ma, &mb]);
        for q in pa.state_ids() {
            let c = p.components(q);
            check!(
                pa.out_degree(q) == a.out_degree(c[0]) * b.out_degree(c[1]),
                "pair {pair}: out-degree at {}",
                pa.state_name(q)
            );
            let err = (choice_information(&mp, q)
                - choice_information(&ma, c[0])
                - choice_information(&mb, c[1]))
            .abs();
            worst = worst.max(err);
            check!(
                err <= EXTENSIVITY_TOLERANCE,
                "pair {pair}: error {err} at {}",
                pa.state_name(q)
            );
        }
    }
    Ok(format!(
        "{EXTENSIVITY_PAIRS} pairs, worst deviation {worst:.2e} bits"
    ))
}

fn criterion_5() -> Outcome {
    let mod4 = automaton("fig8.aut")?;
    for name in ["counter2.wiring", "fig12.wiring"] {
        let w = load_wiring(&asset(name)).map_err(|e| e.to_string())?;
        let closed = wire(&w.wiring).map_err(|e| e.to_string())?;
        let reach = reachable_subgraph(closed.automaton()).map_err(|e| e.to_string())?;
        check!(
            reach.state_count() == 4,
            "{name}: {} reachable states",
            reach.state_count()
        );
        check!(
            equivalent(&reach, &mod4).map_err(|e| e.to_string())?,
            "{name}: not isomorphic"
        );
    }
    Ok("both wirings realise the four-cycle".into())
}

fn covers_all(a: &Automaton, start: dissipate_core::StateId) -> Result<usize, String> {
    let tour = transition_tour(a, start).map_err(|e| format!("{}: {e}", a.name()))?;
    let path = a.run(start, &tour.word).map_err(|e| e.to_string())?;
    let mut seen = std::collections::BTreeSet::new();
    for i in 0..path.len() {
        seen.insert((path.source_of(i), path.steps[i].target));
    }
    check!(
        seen.len() == a.arrow_count(),
        "{}: {} of {} arrows",
        a.name(),
        seen.len(),
        a.arrow_count()
    );
    Ok(tour.length())
}

fn criterion_6() -> Outcome {
    let mut bundled = Vec::new();
    for name in [
        "fig5.aut",
        "fig7.aut",
        "fig8.aut",
        "tff.aut",
        "fig11.aut",
        "chain.aut",
    ] {
        bundled.push(automaton(name)?);
    }
    for name in ["counter2.wiring", "fig12.wiring"] {
        let w = load_wiring(&asset(name)).map_err(|e| e.to_string())?;
        let closed = wire(&w.wiring).map_err(|e| e.to_string())?;
        bundled.push(reachable_subgraph(closed.automaton()).map_err(|e| e.to_string())?);
    }
    for a in &bundled {
        covers_all(a, a.initial().ok_or("no initial state")?)?;
    }

    let memory = &bundled[0];
    let len = covers_all(memory, memory.state("0").map_err(|e| e.to_string())?)?;
    check!(len == 4, "memory tour length {len}");

    let tff = &bundled[3];
    let z = tff.state("0").map_err(|e| e.to_string())?;
    let modular = modular_test_cost(&[tff, tff], &[z, z]).map_err(|e| e.to_string())?;
    let arrows = product_arrow_count(&[tff, tff]);
    check!(
        modular == 8 && arrows == 16,
        "modular {modular}, product arrows {arrows}"
    );
    check!(
        (modular as u128) < arrows,
        "modular {modular} not below {arrows}"
    );

    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    for i in 0..TOUR_AUTOMATA {
        let (n, k) = (rng.gen_range(1..=12), rng.gen_range(1..=4));
        let a = strongly_connected(&mut rng, n, k);
        let start = a.state_ids().nth(rng.gen_range(0..n)).expect("in range");
        let cost = test_cost(&a, start).map_err(|e| format!("automaton {i}: {e}"))?;
        check!(
            cost <= a.arrow_count() * a.state_count(),
            "automaton {i}: cost {cost} > {} x {}",
            a.arrow_count(),
            a.state_count()
        );
    }
    Ok(format!(
        "{} bundled graphs fully covered, memory 4, modular 8 < 16, bound on {TOUR_AUTOMATA} random",
        bundled.len()
    ))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let (mut worst_residual, mut lowest_loss) = (0.0f64, f64::INFINITY);
    for i in 0..IDENTITY_TRIPLES {
        let a = small_automaton(&mut rng, 8, 4);
        let m = random_model(&mut rng, &a);
        let pi = random_distribution(&mut rng, a.state_count());
        let horizon = rng.gen_range(0..=50);
        let t = ensemble_dissipation(&a, &m, &pi, horizon).map_err(|e| e.to_string())?;
        let residual = t.accounting_residual().abs();
        worst_residual = worst_residual.max(residual);
        check!(
            residual <= IDENTITY_TOLERANCE,
            "triple {i}: residual {residual}"
        );
        for &l in &t.per_step_loss_bits {
            lowest_loss = lowest_loss.min(l);
            check!(l >= LOSS_FLOOR, "triple {i}: loss {l}");
        }
    }
    Ok(format!(
        "{IDENTITY_TRIPLES} triples, worst residual {worst_residual:.2e}, lowest step loss {lowest_loss:.2e}"
    ))
}

/// Plain simulator over string rules, independent of the library.
fn brute_force_bb2() -> (usize, Vec<char>) {
    let rules: HashMap<(char, char), (char, char, i64)> = [
        (('a', '0'), ('b', '1', 1)),
        (('a', '1'), ('b', '1', -1)),
        (('b', '0'), ('a', '1', -1)),
        (('b', '1'), ('h', '1', 1)),
    ]
    .into_iter()
    .collect();
    let mut tape: HashMap<i64, char> = HashMap::new();
    let (mut state, mut head, mut steps) = ('a', 0i64, 0usize);
    while state != 'h' && steps < 1000 {
        let read = *tape.get(&head).unwrap_or(&'0');
        let (next, write, dir) = rules[&(state, read)];
        tape.insert(head, write);
        state = next;
        head += dir;
        steps += 1;
    }
    let lo = tape
        .iter()
        .filter(|(_, &c)| c != '0')
        .map(|(&k, _)| k)
        .min()
        .unwrap_or(0);
    let hi = tape
        .iter()
        .filter(|(_, &c)| c != '0')
        .map(|(&k, _)| k)
        .max()
        .unwrap_or(-1);
    let result = (lo..=hi).map(|i| *tape.get(&i).unwrap_or(&'0')).collect();
    (steps, result)
}

fn criterion_8() -> Outcome {
    let (oracle_n, oracle_result) = brute_force_bb2();
    check!(
        oracle_n == 6 && oracle_result == ['1'; 4],
        "oracle: n = {oracle_n}, result {oracle_result:?}"
    );

    let bb = load_tm(&asset("bb2.tm")).map_err(|e| e.to_string())?;
    let trace = tm_run(&bb, &[], 1000).map_err(|e| e.to_string())?;
    check!(trace.halted, "bb2 did not halt");
    let r = trace.result_len().unwrap_or(0);
    check!(
        trace.steps() == oracle_n && r == oracle_result.len(),
        "n = {}, r = {r}",
        trace.steps()
    );

    let g = global_graph(&bb, &trace).map_err(|e| e.to_string())?;
    check!(
        g.state_count() == 7,
        "global graph has {} states",
        g.state_count()
    );
    check!(
        g.is_reversible() && g.divergent_states().is_empty(),
        "global graph is not linear"
    );
    let init = g.initial().ok_or("global graph has no initial state")?;
    let loss = ensemble_dissipation(
        &g,
        &InputModel::uniform(&g),
        &Distribution::point(7, init),
        6,
    )
    .map_err(|e| e.to_string())?
    .total_loss();
    check!(loss == 0.0, "global graph dissipates {loss}");

    let head = head_automaton(&bb);
    check!(
        head.arrow_count() == 3,
        "bb2 head has {} arrows",
        head.arrow_count()
    );
    check!(head.convergent_states().is_empty(), "bb2 head converges");

    let counter = load_tm(&asset("bincount.tm")).map_err(|e| e.to_string())?;
    let ch = head_automaton(&counter);
    let witnesses = names(&ch, &ch.convergent_states());
    check!(
        !witnesses.is_empty(),
        "binary counter head has no convergence"
    );
    Ok(format!(
        "n = 6, r = 4 (oracle agrees), 7-state linear graph, head 3 arrows, counter witnesses {}",
        witnesses.join(",")
    ))
}

fn criterion_9() -> Outcome {
    let bb = load_tm(&asset("bb2.tm")).map_err(|e| e.to_string())?;
    let run = tm_run(&bb, &[], 1000).map_err(|e| e.to_string())?;
    let b = bennett_simulate(&bb, &[], 1000).map_err(|e| e.to_string())?;
    let (n, r) = (b.forward_steps, b.result_len);
    check!(
        b.total_steps() == 2 * n + r && b.total_steps() == 16,
        "total_steps {}",
        b.total_steps()
    );
    check!(b.input_restored(&bb), "input tape not restored");
    check!(b.history_empty_at_end(), "history not empty");
    check!(
        Some(b.output().to_vec()) == run.result(),
        "output differs from result"
    );
    check!(b.is_injective(), "trajectory repeats a configuration");
    let g = b.global_graph(&bb).map_err(|e| e.to_string())?;
    let init = g.initial().ok_or("no initial state")?;
    let loss = ensemble_dissipation(
        &g,
        &InputModel::uniform(&g),
        &Distribution::point(g.state_count(), init),
        b.total_steps(),
    )
    .map_err(|e| e.to_string())?
    .total_loss();
    check!(
        g.is_reversible() && loss == 0.0,
        "global graph dissipates {loss}"
    );
    Ok(format!(
        "16 steps, restored, history empty, injective, 0 bits; cited 4n+4r+5 = {} (reported only)",
        b.reference_state_count()
    ))
}

fn criterion_10() -> Outcome {
    let sweep = load_tm(&asset("sweep.tm")).map_err(|e| e.to_string())?;
    for t in [1usize, 10, 100, 1000] {
        let d = modular_tm_dissipation(&sweep, &[], t).map_err(|e| e.to_string())?;
        check!(d.trace.steps() == t, "ran {} steps", d.trace.steps());
        check!(d.total() == t as f64, "T = {t}: {} bits", d.total());
    }
    Ok("cumulative bits = T exactly for T in 1, 10, 100, 1000".into())
}

fn criterion_11() -> Outcome {
    let k_ln2 = BOLTZMANN * std::f64::consts::LN_2;
    check!(szilard_check(k_ln2, k_ln2), "boundary rejected");
    let e = landauer_energy(1.0, 300.0).map_err(|e| e.to_string())?;
    check!(
        (e - LANDAUER_ONE_BIT).abs() <= LANDAUER_TOLERANCE,
        "landauer {e:e}"
    );
    Ok(format!(
        "Szilard boundary holds, 1 bit at 300 K = {e:.4e} J"
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("word counts on the ten-arrow graph", criterion_1),
        ("one-bit memory erases 1 bit per step", criterion_2),
        ("modulo-4 counter is reversible", criterion_3),
        ("product extensivity", criterion_4),
        ("wirings reproduce the four-cycle", criterion_5),
        ("transition tour cost", criterion_6),
        ("ensemble accounting identity", criterion_7),
        ("busy beaver and head automata", criterion_8),
        ("compute-copy-uncompute", criterion_9),
        ("linear modular TM dissipation", criterion_10),
        ("thermodynamic utilities", criterion_11),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:>2} {title}: {detail}", i + 1),
            Err(reason) => {
                failures += 1;
                println!("FAIL {:>2} {title}: {reason}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.2?}",
        criteria.len() - failures,
        criteria.len(),
        start.elapsed()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}

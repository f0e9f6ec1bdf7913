use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use dissipate_core::automaton::{Automaton, StateId};
use dissipate_core::composition::{equivalent, product, reachable_subgraph, wire};
use dissipate_core::conformance::transition_tour;
use dissipate_core::dissipation::{
    choice_information, ensemble_dissipation, landauer_energy, path_choice_information,
    Distribution, InputModel,
};
use dissipate_core::turing::{
    bennett_simulate, check_convergence_lemma, global_graph, head_automaton,
    modular_tm_dissipation, tm_run, TapeSymbol, TuringMachine,
};
use dissipate_core::Error as CoreError;

use crate::dot::to_dot;
use crate::formats::{
    load_automaton, load_tm, load_wiring, write_automaton, AutomatonFile, ParseError,
};
use crate::report::Report;

#[derive(Debug, Parser)]
#[command(
    name = "dissipate",
    version,
    about = "Logical dissipation of finite automata and Turing machines"
)]
pub struct Cli {
    /// Emit JSON with sorted keys instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Counts, divergent/convergent states and per-state choice information.
    Analyze { file: PathBuf },
    /// Runs a word and charges its choice information.
    Run {
        file: PathBuf,
        /// Start state; defaults to the initial state.
        #[arg(long)]
        start: Option<String>,
        #[arg(long)]
        word: String,
        /// Temperature in kelvin for the Landauer figure.
        #[arg(long, env = "DISSIPATE_TEMPERATURE", default_value_t = 300.0)]
        temp: f64,
    },
    /// Ensemble entropy loss of the state distribution over a horizon.
    Ensemble {
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Start from this state instead of the uniform distribution.
        #[arg(long)]
        start: Option<String>,
    },
    /// Cartesian product of two automata.
    Product {
        a: PathBuf,
        b: PathBuf,
        /// Write the product automaton here.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Closes the connections of a wiring file.
    Wire {
        wiring: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Part of an automaton (or wiring) reachable from its initial state.
    Reach {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rooted isomorphism of reachable graphs, up to input renaming.
    Equiv { a: PathBuf, b: PathBuf },
    /// Transition tour covering every arrow.
    Test {
        file: PathBuf,
        #[arg(long)]
        start: Option<String>,
    },
    /// Turing machine analyses.
    #[command(subcommand)]
    Tm(TmCommand),
    /// Graphviz rendering.
    Dot { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum TmCommand {
    /// Runs the machine.
    Run {
        file: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
    },
    /// The head automaton and its convergences.
    Head {
        file: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
        /// Steps observed for the head-sequence periodicity check.
        #[arg(long, default_value_t = 1000)]
        horizon: usize,
    },
    /// Per-step head and cell dissipation.
    Dissip {
        file: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Global graph of a halting run.
    Linear {
        file: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
    },
    /// Compute, copy, uncompute.
    Bennett {
        file: PathBuf,
        #[arg(long, default_value = "")]
        input: String,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] CoreError),
    #[error("{path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// 1 for domain errors, 2 for usage and parse errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            _ => 2,
        }
    }
}

/// What a command prints on success.
#[derive(Debug)]
pub enum Output {
    Report(Report),
    Text(String),
}

impl Output {
    pub fn render(&self, json: bool) -> String {
        match self {
            Output::Report(r) if json => r.to_json(),
            Output::Report(r) => r.to_text(),
            Output::Text(t) => t.clone(),
        }
    }
}

type CmdResult = Result<Output, CliError>;

fn usage(e: CoreError) -> CliError {
    CliError::Usage(e.to_string())
}

fn names(a: &Automaton, qs: &[StateId]) -> Vec<String> {
    qs.iter().map(|&q| a.state_name(q).to_string()).collect()
}

fn start_state(a: &Automaton, start: Option<&str>) -> Result<StateId, CliError> {
    match start {
        Some(s) => a.state(s).map_err(usage),
        None => a.initial().ok_or_else(|| {
            CliError::Usage(format!("`{}` has no initial state; pass --start", a.name()))
        }),
    }
}

fn is_wiring(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "wiring")
}

/// An automaton file, or the closed system of a wiring file.
fn load_any(path: &Path) -> Result<Automaton, CliError> {
    if is_wiring(path) {
        let w = load_wiring(path)?;
        Ok(wire(&w.wiring)?.into_automaton())
    } else {
        Ok(load_automaton(path)?.automaton)
    }
}

fn save(path: &Path, a: Automaton) -> Result<(), CliError> {
    let text = write_automaton(&AutomatonFile::uniform(a));
    std::fs::write(path, text).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn structure(r: &mut Report, a: &Automaton) {
    r.set("automaton", a.name())
        .set("states", a.state_count())
        .set("arrows", a.arrow_count())
        .set("transitions", a.transition_count())
        .set("divergent", names(a, &a.divergent_states()))
        .set("convergent", names(a, &a.convergent_states()))
        .set("reversible", a.is_reversible());
}

pub fn execute(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Analyze { file } => analyze(file),
        Command::Run {
            file,
            start,
            word,
            temp,
        } => run(file, start.as_deref(), word, *temp),
        Command::Ensemble { file, steps, start } => ensemble(file, *steps, start.as_deref()),
        Command::Product { a, b, output } => product_cmd(a, b, output.as_deref()),
        Command::Wire { wiring, output } => wire_cmd(wiring, output.as_deref()),
        Command::Reach { file, output } => reach(file, output.as_deref()),
        Command::Equiv { a, b } => equiv(a, b),
        Command::Test { file, start } => test(file, start.as_deref()),
        Command::Tm(tm) => tm_cmd(tm),
        Command::Dot { file } => Ok(Output::Text(to_dot(&load_any(file)?))),
    }
}

fn analyze(file: &Path) -> CmdResult {
    let f = load_automaton(file)?;
    let a = &f.automaton;
    let mut r = Report::new("analyze");
    structure(&mut r, a);
    let choice: Map<String, Value> = a
        .state_ids()
        .map(|q| {
            (
                a.state_name(q).to_string(),
                json!(choice_information(&f.model, q)),
            )
        })
        .collect();
    r.set("choice_information_bits", choice)
        .set("initial", a.initial().map(|q| a.state_name(q).to_string()))
        .set("uniform_model", f.model.is_uniform());
    Ok(Output::Report(r))
}

fn run(file: &Path, start: Option<&str>, word: &str, temp: f64) -> CmdResult {
    let f = load_automaton(file)?;
    let a = &f.automaton;
    let q = start_state(a, start)?;
    let word = a.parse_word(word).map_err(usage)?;
    let report = path_choice_information(a, &f.model, q, &word)?;
    let energy = landauer_energy(report.total_bits, temp).map_err(usage)?;
    let mut r = Report::new("run");
    r.set("start", a.state_name(q))
        .set("word", a.format_word(&word))
        .set("path", names(a, &report.path.states()))
        .set("outputs", report.path.outputs.clone())
        .set("per_step_bits", report.per_step_bits.clone())
        .set("total_bits", report.total_bits)
        .set("convergences_entered", report.convergences_entered.clone())
        .set("temperature_k", temp)
        .set("landauer_joules", energy);
    Ok(Output::Report(r))
}

fn ensemble(file: &Path, steps: usize, start: Option<&str>) -> CmdResult {
    let f = load_automaton(file)?;
    let a = &f.automaton;
    let pi0 = match start {
        Some(s) => Distribution::point(a.state_count(), a.state(s).map_err(usage)?),
        None => Distribution::uniform(a.state_count()),
    };
    let t = ensemble_dissipation(a, &f.model, &pi0, steps)?;
    let mut r = Report::new("ensemble");
    r.set("automaton", a.name())
        .set("horizon", steps)
        .set("per_step_loss_bits", t.per_step_loss_bits.clone())
        .set("per_step_input_bits", t.per_step_input_bits.clone())
        .set("total_loss_bits", t.total_loss())
        .set("total_input_bits", t.total_input())
        .set("stored_entropy_change_bits", t.stored_entropy_change())
        .set("accounting_residual", t.accounting_residual());
    Ok(Output::Report(r))
}

fn product_cmd(a: &Path, b: &Path, output: Option<&Path>) -> CmdResult {
    let (fa, fb) = (load_automaton(a)?, load_automaton(b)?);
    let p = product(&fa.automaton, &fb.automaton);
    let pa = p.automaton();
    let model = p.product_model(&[&fa.automaton, &fb.automaton], &[&fa.model, &fb.model]);
    // Largest deviation from additivity of choice information.
    let extensivity_error = pa
        .state_ids()
        .map(|q| {
            let c = p.components(q);
            let sum = choice_information(&fa.model, c[0]) + choice_information(&fb.model, c[1]);
            (choice_information(&model, q) - sum).abs()
        })
        .fold(0.0, f64::max);
    let mut r = Report::new("product");
    structure(&mut r, pa);
    r.set("modules", vec![fa.automaton.name(), fb.automaton.name()])
        .set(
            "state_count_product",
            fa.automaton.state_count() * fb.automaton.state_count(),
        )
        .set("extensivity_max_error_bits", extensivity_error);
    if let Some(path) = output {
        save(path, p.into_automaton())?;
        r.set("written", path.display().to_string());
    }
    Ok(Output::Report(r))
}

fn wire_cmd(path: &Path, output: Option<&Path>) -> CmdResult {
    let w = load_wiring(path)?;
    let closed = wire(&w.wiring)?;
    let a = closed.automaton();
    let mut r = Report::new("wire");
    structure(&mut r, a);
    r.set(
        "modules",
        closed
            .modules()
            .iter()
            .map(|(n, _)| n.clone())
            .collect::<Vec<_>>(),
    )
    .set("inputless", closed.is_inputless());

    if let (true, Some(init)) = (closed.is_inputless(), a.initial()) {
        // Follow the clock from the initial state until a state repeats.
        let mut q = init;
        let mut seen = vec![q];
        let mut open_bits = Vec::new();
        while let Some(next) = a.arrows_from(q).first().map(|x| x.target) {
            open_bits.push(closed.open_graph_bits(q));
            q = next;
            if seen.contains(&q) {
                break;
            }
            seen.push(q);
        }
        let word = vec![a.symbol(dissipate_core::CLOCK)?; open_bits.len()];
        let closed_bits =
            path_choice_information(a, &InputModel::uniform(a), init, &word)?.total_bits;
        r.set("closed_path", names(a, &seen))
            .set("open_graph_bits_per_step", open_bits.clone())
            .set("open_graph_bits_total", open_bits.iter().sum::<f64>())
            .set("closed_path_bits", closed_bits);
    }
    if let Some(out) = output {
        save(out, closed.into_automaton())?;
        r.set("written", out.display().to_string());
    }
    Ok(Output::Report(r))
}

fn reach(file: &Path, output: Option<&Path>) -> CmdResult {
    let a = reachable_subgraph(&load_any(file)?)?;
    let mut r = Report::new("reach");
    structure(&mut r, &a);
    let cycle = a.state_count() > 0
        && a.state_ids()
            .all(|q| a.out_degree(q) == 1 && a.in_degree(q) == 1);
    r.set("state_names", a.states().to_vec())
        .set("single_cycle", cycle);
    if let Some(out) = output {
        save(out, a)?;
        r.set("written", out.display().to_string());
    }
    Ok(Output::Report(r))
}

fn equiv(a: &Path, b: &Path) -> CmdResult {
    let (a, b) = (load_any(a)?, load_any(b)?);
    let mut r = Report::new("equiv");
    r.set("equivalent", equivalent(&a, &b)?)
        .set("left", a.name())
        .set("right", b.name());
    Ok(Output::Report(r))
}

fn test(file: &Path, start: Option<&str>) -> CmdResult {
    let a = load_automaton(file)?.automaton;
    let q = start_state(&a, start)?;
    let tour = transition_tour(&a, q)?;
    let mut r = Report::new("test");
    r.set("automaton", a.name())
        .set("start", a.state_name(q))
        .set("tour", a.format_word(&tour.word))
        .set("length", tour.length())
        .set("arrows", a.arrow_count())
        .set("covered", tour.covered.len())
        .set("bound", a.arrow_count() * a.state_count());
    Ok(Output::Report(r))
}

fn tape(tm: &TuringMachine, input: &str) -> Result<Vec<TapeSymbol>, CliError> {
    tm.parse_tape(input).map_err(usage)
}

fn tm_cmd(cmd: &TmCommand) -> CmdResult {
    let mut r;
    match cmd {
        TmCommand::Run {
            file,
            input,
            max_steps,
        } => {
            let tm = load_tm(file)?;
            let trace = tm_run(&tm, &tape(&tm, input)?, *max_steps)?;
            let last = trace.last();
            r = Report::new("tm run");
            r.set("machine", tm.name())
                .set("steps", trace.steps())
                .set("halted", trace.halted)
                .set("final_state", tm.state_name(last.state))
                .set("head", last.head)
                .set("tape", tm.format_tape(last.tape.trimmed().1))
                .set("result_length", trace.result_len());
        }
        TmCommand::Head {
            file,
            input,
            horizon,
        } => {
            let tm = load_tm(file)?;
            let head = head_automaton(&tm);
            r = Report::new("tm head");
            structure(&mut r, &head);
            r.set("machine", tm.name()).set("rules", tm.rule_count());
            let lemma = check_convergence_lemma(&tm, &tape(&tm, input)?, *horizon)?;
            let periodicity = match lemma.periodicity {
                dissipate_core::turing::HeadPeriodicity::Halted => json!("halted"),
                dissipate_core::turing::HeadPeriodicity::NotPeriodic => json!("not periodic"),
                dissipate_core::turing::HeadPeriodicity::EventuallyPeriodic {
                    preperiod,
                    period,
                } => json!({ "preperiod": preperiod, "period": period }),
            };
            r.set("lemma_witnesses", lemma.witnesses.clone())
                .set("head_sequence", periodicity)
                .set("steps_observed", lemma.steps_observed);
        }
        TmCommand::Dissip { file, input, steps } => {
            let tm = load_tm(file)?;
            let d = modular_tm_dissipation(&tm, &tape(&tm, input)?, *steps)?;
            r = Report::new("tm dissip");
            r.set("machine", tm.name())
                .set("steps", d.trace.steps())
                .set("halted", d.trace.halted)
                .set("head_bits", d.head_bits.clone())
                .set("cell_bits", d.cell_bits.clone())
                .set("cumulative_bits", d.cumulative_bits.clone())
                .set("total_bits", d.total())
                .set("slope_bits_per_step", d.slope());
        }
        TmCommand::Linear {
            file,
            input,
            max_steps,
        } => {
            let tm = load_tm(file)?;
            let trace = tm_run(&tm, &tape(&tm, input)?, *max_steps)?;
            let g = global_graph(&tm, &trace)?;
            r = Report::new("tm linear");
            structure(&mut r, &g);
            r.set("dissipation_bits", chain_dissipation(&g)?);
        }
        TmCommand::Bennett {
            file,
            input,
            max_steps,
        } => {
            let tm = load_tm(file)?;
            let b = bennett_simulate(&tm, &tape(&tm, input)?, *max_steps)?;
            let g = b.global_graph(&tm)?;
            r = Report::new("tm bennett");
            r.set("machine", tm.name())
                .set("forward_steps", b.forward_steps)
                .set("result_length", b.result_len)
                .set("total_steps", b.total_steps())
                .set("history_empty", b.history_empty_at_end())
                .set("input_restored", b.input_restored(&tm))
                .set("output", tm.format_tape(b.output()))
                .set("injective", b.is_injective())
                .set("global_graph_states", g.state_count())
                .set("global_graph_reversible", g.is_reversible())
                .set("dissipation_bits", chain_dissipation(&g)?)
                .set("reference_state_count", b.reference_state_count());
        }
    }
    Ok(Output::Report(r))
}

/// Ensemble loss along an inputless chain started at its first state.
fn chain_dissipation(g: &Automaton) -> Result<f64, CliError> {
    let Some(init) = g.initial() else {
        return Ok(0.0);
    };
    let pi = Distribution::point(g.state_count(), init);
    let t = ensemble_dissipation(g, &InputModel::uniform(g), &pi, g.state_count())?;
    Ok(t.total_loss())
}

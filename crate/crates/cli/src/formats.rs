//! Line-oriented text formats for automata, Turing machines and wirings.
//!
//! `#` starts a comment; tokens are whitespace separated. Every error carries
//! the 1-based line it was found on.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use dissipate_core::automaton::Automaton;
use dissipate_core::composition::Wiring;
use dissipate_core::dissipation::InputModel;
use dissipate_core::turing::{Move, TuringMachine};
use dissipate_core::Error as CoreError;

/// Tolerance on per-state probability sums read from files.
pub const FILE_PROBABILITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: CoreError },
    #[error("{path}: {source}")]
    InFile {
        path: String,
        source: Box<ParseError>,
    },
}

impl ParseError {
    fn syntax(line: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            line,
            message: message.into(),
        }
    }
}

pub type ParseResult<T> = std::result::Result<T, ParseError>;

pub fn read_file(path: &Path) -> ParseResult<String> {
    std::fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Non-empty lines with comments stripped, paired with line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = line.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn expect_args(line: usize, tokens: &[&str], n: usize) -> ParseResult<()> {
    if tokens.len() != n + 1 {
        return Err(ParseError::syntax(
            line,
            format!(
                "`{}` takes {} argument(s), got {}",
                tokens[0],
                n,
                tokens.len() - 1
            ),
        ));
    }
    Ok(())
}

fn expect_some(line: usize, tokens: &[&str]) -> ParseResult<()> {
    if tokens.len() < 2 {
        return Err(ParseError::syntax(
            line,
            format!("`{}` needs at least one argument", tokens[0]),
        ));
    }
    Ok(())
}

/// An automaton with the input model given by its `prob` lines.
#[derive(Debug, Clone)]
pub struct AutomatonFile {
    pub automaton: Automaton,
    /// `(state, symbol) -> p` as written.
    pub probabilities: BTreeMap<(String, String), f64>,
    pub model: InputModel,
}

impl AutomatonFile {
    pub fn uniform(automaton: Automaton) -> Self {
        let model = InputModel::uniform(&automaton);
        Self {
            automaton,
            probabilities: BTreeMap::new(),
            model,
        }
    }
}

pub fn parse_automaton(text: &str) -> ParseResult<AutomatonFile> {
    let mut name = None;
    let mut b = Automaton::builder("");
    let mut probs: Vec<(usize, String, String, f64)> = Vec::new();
    // First line mentioning each state and each (state, symbol) pair.
    let mut first_line: BTreeMap<String, usize> = BTreeMap::new();
    let mut last_line = 0;

    for (line, tokens) in lines(text) {
        last_line = line;
        let args = &tokens[1..];
        match tokens[0] {
            "automaton" => {
                expect_args(line, &tokens, 1)?;
                if name.replace(args[0].to_string()).is_some() {
                    return Err(ParseError::syntax(line, "duplicate `automaton` line"));
                }
            }
            "inputs" => {
                expect_some(line, &tokens)?;
                b = b.inputs(args.iter().copied());
            }
            "outputs" => {
                expect_some(line, &tokens)?;
                b = b.outputs(args.iter().copied());
            }
            "states" => {
                expect_some(line, &tokens)?;
                for s in args {
                    first_line.entry(s.to_string()).or_insert(line);
                }
                b = b.states(args.iter().copied());
            }
            "initial" => {
                expect_args(line, &tokens, 1)?;
                b = b.initial(args[0]);
            }
            "output" => {
                expect_args(line, &tokens, 2)?;
                b = b.output(args[0], args[1]);
            }
            "trans" => {
                expect_args(line, &tokens, 3)?;
                first_line
                    .entry(format!("{}\u{0}{}", args[0], args[1]))
                    .or_insert(line);
                b = b.transition(args[0], args[1], args[2]);
            }
            "prob" => {
                expect_args(line, &tokens, 3)?;
                let p: f64 = args[2].parse().map_err(|_| {
                    ParseError::syntax(line, format!("`{}` is not a number", args[2]))
                })?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(ParseError::syntax(
                        line,
                        format!("probability {p} outside [0, 1]"),
                    ));
                }
                probs.push((line, args[0].to_string(), args[1].to_string(), p));
            }
            other => {
                return Err(ParseError::syntax(
                    line,
                    format!("unknown directive `{other}`"),
                ))
            }
        }
    }

    let name = name.ok_or_else(|| ParseError::syntax(1, "missing `automaton <name>` line"))?;
    let automaton = b.build().map_err(|e| {
        let line = match &e {
            CoreError::Nondeterministic { state, symbol } => {
                first_line.get(&format!("{state}\u{0}{symbol}")).copied()
            }
            CoreError::MissingOutput(s) | CoreError::UnknownState(s) => first_line.get(s).copied(),
            _ => None,
        };
        ParseError::Invalid {
            line: line.unwrap_or(last_line),
            source: e,
        }
    })?;
    let automaton = automaton.with_name(name);

    let mut by_id = BTreeMap::new();
    let mut probabilities = BTreeMap::new();
    for (line, q, s, p) in &probs {
        let invalid = |source| ParseError::Invalid {
            line: *line,
            source,
        };
        let qi = automaton.state(q).map_err(invalid)?;
        let si = automaton.symbol(s).map_err(invalid)?;
        if automaton.target(qi, si).is_none() {
            return Err(ParseError::syntax(
                *line,
                format!("no transition from `{q}` on `{s}`"),
            ));
        }
        if probabilities.insert((q.clone(), s.clone()), *p).is_some() {
            return Err(ParseError::syntax(
                *line,
                format!("duplicate probability for `{q}` `{s}`"),
            ));
        }
        by_id.insert((qi, si), *p);
    }
    let model =
        InputModel::from_symbol_probabilities(&automaton, &by_id, FILE_PROBABILITY_TOLERANCE)
            .map_err(|source| {
                // Point at the first prob line of the offending state.
                let line = match &source {
                    CoreError::InvalidDistribution(msg) => probs
                        .iter()
                        .find(|(_, q, _, _)| msg.contains(&format!("`{q}`")))
                        .map(|(l, ..)| *l),
                    _ => None,
                };
                ParseError::Invalid {
                    line: line.or(probs.first().map(|p| p.0)).unwrap_or(last_line),
                    source,
                }
            })?;
    Ok(AutomatonFile {
        automaton,
        probabilities,
        model,
    })
}

/// Canonical text of an automaton: sorted declarations, one transition per
/// line in (state, symbol) order.
pub fn write_automaton(file: &AutomatonFile) -> String {
    let a = &file.automaton;
    let mut out = String::new();
    let _ = writeln!(out, "automaton {}", a.name());
    if !a.inputs().is_empty() {
        let _ = writeln!(out, "inputs {}", a.inputs().join(" "));
    }
    if !a.outputs().is_empty() {
        let _ = writeln!(out, "outputs {}", a.outputs().join(" "));
    }
    if !a.states().is_empty() {
        let _ = writeln!(out, "states {}", a.states().join(" "));
    }
    if let Some(q) = a.initial() {
        let _ = writeln!(out, "initial {}", a.state_name(q));
    }
    for q in a.state_ids() {
        let _ = writeln!(out, "output {} {}", a.state_name(q), a.output_of(q));
    }
    for (q, s, t) in a.transitions() {
        let _ = writeln!(
            out,
            "trans {} {} {}",
            a.state_name(q),
            a.symbol_name(s),
            a.state_name(t)
        );
    }
    for ((q, s), p) in &file.probabilities {
        let _ = writeln!(out, "prob {q} {s} {p}");
    }
    out
}

pub fn load_automaton(path: &Path) -> ParseResult<AutomatonFile> {
    let text = read_file(path)?;
    parse_automaton(&text).map_err(|e| ParseError::InFile {
        path: path.display().to_string(),
        source: Box::new(e),
    })
}

pub fn parse_tm(text: &str) -> ParseResult<TuringMachine> {
    let mut name = None;
    let mut blank = None;
    let mut tape = Vec::new();
    let mut states = Vec::new();
    let mut initial = None;
    let mut halting = Vec::new();
    let mut rules = Vec::new();
    let mut last_line = 0;

    for (line, tokens) in lines(text) {
        last_line = line;
        let args = &tokens[1..];
        match tokens[0] {
            "tm" => {
                expect_args(line, &tokens, 1)?;
                name = Some(args[0].to_string());
            }
            "blank" => {
                expect_args(line, &tokens, 1)?;
                blank = Some(args[0].to_string());
            }
            "tape" => {
                expect_some(line, &tokens)?;
                tape.extend(args.iter().map(|s| s.to_string()));
            }
            "states" => {
                expect_some(line, &tokens)?;
                states.extend(args.iter().map(|s| s.to_string()));
            }
            "initial" => {
                expect_args(line, &tokens, 1)?;
                initial = Some(args[0].to_string());
            }
            "halting" => {
                expect_some(line, &tokens)?;
                halting.extend(args.iter().map(|s| s.to_string()));
            }
            "rule" => {
                expect_args(line, &tokens, 5)?;
                let movement = Move::parse(args[4]).ok_or_else(|| {
                    ParseError::syntax(line, format!("move `{}` is not L, R or N", args[4]))
                })?;
                rules.push((line, args[0], args[1], args[2], args[3], movement));
            }
            other => {
                return Err(ParseError::syntax(
                    line,
                    format!("unknown directive `{other}`"),
                ))
            }
        }
    }

    let name = name.ok_or_else(|| ParseError::syntax(1, "missing `tm <name>` line"))?;
    let blank = blank.ok_or_else(|| ParseError::syntax(last_line, "missing `blank` line"))?;
    let mut b = TuringMachine::builder(name, blank)
        .tape_symbols(tape)
        .states(states)
        .halting(halting);
    if let Some(q) = initial {
        b = b.initial(q);
    }
    // Validate rule by rule so errors point at the offending line.
    for &(line, q, r, n, w, m) in &rules {
        let probe = b.clone().rule(q, r, n, w, m);
        if let Err(source) = probe.clone().build() {
            let names_token = |s: &String| [q, r, n, w].contains(&s.as_str());
            let here = match &source {
                CoreError::UnknownState(s) | CoreError::UnknownSymbol(s) => names_token(s),
                CoreError::Nondeterministic { .. } => true,
                CoreError::InvalidMachine(msg) => msg.contains("has a rule"),
                _ => false,
            };
            if here {
                return Err(ParseError::Invalid { line, source });
            }
        }
        b = probe;
    }
    b.build().map_err(|source| ParseError::Invalid {
        line: last_line,
        source,
    })
}

pub fn write_tm(tm: &TuringMachine) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "tm {}", tm.name());
    let _ = writeln!(out, "blank {}", tm.symbol_name(tm.blank()));
    let _ = writeln!(out, "tape {}", tm.tape_alphabet().join(" "));
    let _ = writeln!(out, "states {}", tm.control_states().join(" "));
    let _ = writeln!(out, "initial {}", tm.state_name(tm.initial()));
    let halting: Vec<&str> = tm.halting_states().map(|q| tm.state_name(q)).collect();
    if !halting.is_empty() {
        let _ = writeln!(out, "halting {}", halting.join(" "));
    }
    for (k, r) in tm.rules() {
        let _ = writeln!(
            out,
            "rule {} {} {} {} {}",
            tm.state_name(k.state),
            tm.symbol_name(k.read),
            tm.state_name(r.next),
            tm.symbol_name(r.write),
            r.movement.letter()
        );
    }
    out
}

pub fn load_tm(path: &Path) -> ParseResult<TuringMachine> {
    let text = read_file(path)?;
    parse_tm(&text).map_err(|e| ParseError::InFile {
        path: path.display().to_string(),
        source: Box::new(e),
    })
}

/// A wiring plus the initial state chosen for each module, if any.
#[derive(Debug, Clone)]
pub struct WiringFile {
    pub wiring: Wiring,
    /// Module files, in declaration order.
    pub paths: Vec<PathBuf>,
}

/// Parses a wiring description. Module paths are resolved against `base`.
///
/// ```text
/// wiring counter4
/// module A tff.aut
/// module B tff.aut
/// const A 1
/// connect A B            # identity mapping
/// connect A B 0=x 1=y    # explicit output=input mapping
/// initial A 0            # overrides the module file's initial state
/// ```
pub fn parse_wiring(text: &str, base: &Path) -> ParseResult<WiringFile> {
    let mut w = Wiring::new("");
    let mut named = false;
    let mut paths = Vec::new();
    for (line, tokens) in lines(text) {
        let args = &tokens[1..];
        let module = |w: &Wiring, name: &str| {
            w.module_index(name)
                .map_err(|source| ParseError::Invalid { line, source })
        };
        match tokens[0] {
            "wiring" => {
                expect_args(line, &tokens, 1)?;
                w.name = args[0].to_string();
                named = true;
            }
            "module" => {
                expect_args(line, &tokens, 2)?;
                if w.module_index(args[0]).is_ok() {
                    return Err(ParseError::syntax(
                        line,
                        format!("duplicate module `{}`", args[0]),
                    ));
                }
                let path = base.join(args[1]);
                let file = load_automaton(&path).map_err(|e| match e {
                    ParseError::Io { .. } | ParseError::InFile { .. } => ParseError::InFile {
                        path: format!("line {line}"),
                        source: Box::new(e),
                    },
                    e => e,
                })?;
                w.add_module(args[0], file.automaton);
                paths.push(path);
            }
            "const" => {
                expect_args(line, &tokens, 2)?;
                let m = module(&w, args[0])?;
                w.constant(m, args[1]);
            }
            "connect" => {
                if tokens.len() < 3 {
                    return Err(ParseError::syntax(
                        line,
                        "`connect` needs a source and a destination",
                    ));
                }
                let src = module(&w, args[0])?;
                let dst = module(&w, args[1])?;
                let mut mapping = BTreeMap::new();
                for pair in &args[2..] {
                    let (o, i) = pair.split_once('=').ok_or_else(|| {
                        ParseError::syntax(line, format!("mapping `{pair}` is not output=input"))
                    })?;
                    mapping.insert(o.to_string(), i.to_string());
                }
                w.connect_mapped(src, dst, mapping);
            }
            "initial" => {
                expect_args(line, &tokens, 2)?;
                let m = module(&w, args[0])?;
                let (name, a) = &w.modules[m];
                let a = a
                    .to_builder()
                    .initial(args[1])
                    .build()
                    .map_err(|source| ParseError::Invalid { line, source })?
                    .with_name(a.name());
                w.modules[m] = (name.clone(), a);
            }
            other => {
                return Err(ParseError::syntax(
                    line,
                    format!("unknown directive `{other}`"),
                ))
            }
        }
    }
    if !named {
        return Err(ParseError::syntax(1, "missing `wiring <name>` line"));
    }
    Ok(WiringFile { wiring: w, paths })
}

pub fn load_wiring(path: &Path) -> ParseResult<WiringFile> {
    let text = read_file(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_wiring(&text, base).map_err(|e| ParseError::InFile {
        path: path.display().to_string(),
        source: Box::new(e),
    })
}

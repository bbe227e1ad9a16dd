use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypercause::alternating::ltl_to_alternating;
use hypercause::causality::{Config, Explainer, Status};
use hypercause::checker::{find_counterexample, Bounds, DEFAULT_PERIOD_BOUND, DEFAULT_PREFIX_BOUND};
use hypercause::io::{counterexample_json, load_counterexample, load_formula, load_machine, LoadError};
use hypercause::logic::{eval_hyper, negate_to_nnf, zip};
use hypercause::oracle::brute_force_causes;
use hypercause::report::{render_candidates, render_report, render_trace, CandidateReport, Report, Style};
use hypercause::satcore::candidate_cause;
use hypercause::{AnnotationPolicy, Counterexample, Error, HyperFormula, MooreMachine, Syntax};

const EXIT_OK: u8 = 0;
const EXIT_NOTHING: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_BOUNDS: u8 = 3;

#[derive(Parser)]
#[command(name = "hypercause", version, about = "Explain counterexamples to universal HyperLTL properties")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a counterexample within lasso bounds.
    Check(Common),
    /// Compute actual causes of a counterexample.
    Explain {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        search: Search,
    },
    /// Compute the candidate cause set only.
    Candidates(Common),
    /// Compute actual causes by exhaustive enumeration.
    Oracle(Common),
    /// Load and check the input files without computing anything.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct Common {
    /// Machine file.
    #[arg(long)]
    system: PathBuf,
    /// Formula file.
    #[arg(long)]
    formula: PathBuf,
    /// Trace file; searched for within bounds when omitted.
    #[arg(long)]
    counterexample: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SyntaxArg::Auto)]
    syntax: SyntaxArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, default_value_t = DEFAULT_PREFIX_BOUND)]
    prefix_bound: usize,
    #[arg(long, default_value_t = DEFAULT_PERIOD_BOUND)]
    period_bound: usize,
    /// Recorded in the report.
    #[arg(long)]
    seed: Option<u64>,
    /// Print the automaton for the negated formula and its run on the
    /// counterexample to stderr.
    #[arg(long)]
    dump_aa: bool,
}

#[derive(Args)]
struct Search {
    /// Report every minimal cause instead of the first.
    #[arg(long)]
    all: bool,
    #[arg(long)]
    max_cause_size: Option<usize>,
    #[arg(long)]
    max_contingency_size: Option<usize>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    system: PathBuf,
    #[arg(long)]
    formula: Option<PathBuf>,
    #[arg(long)]
    counterexample: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SyntaxArg::Auto)]
    syntax: SyntaxArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum SyntaxArg {
    Auto,
    Infix,
    Sexpr,
}

impl From<SyntaxArg> for Syntax {
    fn from(s: SyntaxArg) -> Syntax {
        match s {
            SyntaxArg::Auto => Syntax::Auto,
            SyntaxArg::Infix => Syntax::Infix,
            SyntaxArg::Sexpr => Syntax::Sexpr,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::TooLarge(_) => EXIT_BOUNDS,
            _ => EXIT_INVALID,
        };
        Failure::new(code, e.to_string())
    }
}

fn load_error(path: &Path) -> impl Fn(LoadError) -> Failure + '_ {
    move |e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display()))
}

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn style() -> Style {
    Style {
        ansi: std::io::stdout().is_terminal() && std::env::var_os("NO_COLOR").is_none(),
    }
}

struct Inputs {
    machine: MooreMachine,
    formula: HyperFormula,
    cex: Counterexample,
}

/// Loads the inputs, running the checker when no counterexample is given.
fn prepare(c: &Common) -> Result<Inputs, Failure> {
    let machine = load_machine(&c.system).map_err(load_error(&c.system))?;
    let formula = load_formula(&c.formula, c.syntax.into()).map_err(load_error(&c.formula))?;
    let cex = match &c.counterexample {
        Some(p) => load_counterexample(p, &machine).map_err(load_error(p))?,
        None => find_counterexample(&machine, &formula, Bounds::new(c.prefix_bound, c.period_bound))?
            .ok_or_else(|| Failure::new(EXIT_NOTHING, "no violation found within bounds"))?,
    };
    if eval_hyper(&cex, &formula).map_err(|e| Failure::from(Error::from(e)))? {
        return Err(Failure::new(
            EXIT_NOTHING,
            "the counterexample satisfies the formula; nothing to explain",
        ));
    }
    if c.dump_aa {
        let (phi, t) = zip(&formula, &cex).map_err(|e| Failure::from(Error::from(e)))?;
        let aut = ltl_to_alternating(&negate_to_nnf(&phi)).map_err(|e| Failure::from(Error::from(e)))?;
        eprint!("{}", aut.dump());
        if let (true, Some(run)) = aut.accepts_lasso(t.alphabet(), t.lasso()) {
            eprint!("{}", run.dump(&aut));
        }
    }
    Ok(Inputs { machine, formula, cex })
}

fn exit_for(status: Status) -> u8 {
    match status {
        Status::Found => EXIT_OK,
        Status::NoActualCause => EXIT_NOTHING,
        Status::BoundedOut => EXIT_BOUNDS,
    }
}

fn emit_report(c: &Common, cex: &Counterexample, mut report: Report) -> u8 {
    report.stats.seed = c.seed;
    match c.format {
        Format::Json => emit(&format!("{}\n", report.to_json())),
        Format::Text => emit(&render_report(cex, &report, style())),
    }
    exit_for(report.status)
}

fn check(c: &Common) -> Result<u8, Failure> {
    let machine = load_machine(&c.system).map_err(load_error(&c.system))?;
    let formula = load_formula(&c.formula, c.syntax.into()).map_err(load_error(&c.formula))?;
    let Some(cex) = find_counterexample(&machine, &formula, Bounds::new(c.prefix_bound, c.period_bound))? else {
        return Err(Failure::new(EXIT_NOTHING, "no violation found within bounds"));
    };
    match c.format {
        Format::Json => emit(&format!("{}\n", counterexample_json(&cex))),
        Format::Text => {
            let none = Default::default();
            let mut text = format!("violation of {formula}\n");
            for var in cex.vars() {
                text += &format!("  {var}: {}\n", render_trace(&cex, var, &none, &none, Style::PLAIN));
            }
            emit(&text);
        }
    }
    Ok(EXIT_OK)
}

fn explain(c: &Common, s: &Search) -> Result<u8, Failure> {
    let inputs = prepare(c)?;
    let config = Config {
        max_cause_size: s.max_cause_size,
        max_contingency_size: s.max_contingency_size,
        policy: AnnotationPolicy::Canonical,
    };
    let candidate = candidate_cause(&inputs.machine, &inputs.formula, &inputs.cex, config.policy)?;
    let x = Explainer::new(&inputs.machine, &inputs.formula, &inputs.cex, config)?;
    let report = if s.all {
        x.all_minimal_causes(&candidate)?
    } else {
        x.actual_cause(&candidate)?
    };
    Ok(emit_report(c, &inputs.cex, Report::from_causes(&report)))
}

fn candidates(c: &Common) -> Result<u8, Failure> {
    let inputs = prepare(c)?;
    let candidate = candidate_cause(&inputs.machine, &inputs.formula, &inputs.cex, AnnotationPolicy::Canonical)?;
    match c.format {
        Format::Json => emit(&format!(
            "{}\n",
            serde_json::to_string_pretty(&CandidateReport::new(&candidate)).expect("reports serialize")
        )),
        Format::Text => emit(&render_candidates(&inputs.cex, &candidate, style())),
    }
    Ok(EXIT_OK)
}

fn oracle(c: &Common) -> Result<u8, Failure> {
    let inputs = prepare(c)?;
    let start = Instant::now();
    let outcome = brute_force_causes(&inputs.machine, &inputs.formula, &inputs.cex)?;
    let report = Report::from_oracle(&outcome, start.elapsed().as_millis() as u64);
    Ok(emit_report(c, &inputs.cex, report))
}

fn validate(v: &ValidateArgs) -> Result<u8, Failure> {
    let machine = load_machine(&v.system).map_err(load_error(&v.system))?;
    let ap = machine.alphabet();
    let excluded = ap.names(machine.output_mask() & !machine.controllable_outputs());
    let mut text = format!(
        "{}: {} states, {} inputs, {} outputs\n",
        v.system.display(),
        machine.states().len(),
        machine.num_inputs(),
        machine.num_outputs()
    );
    if !excluded.is_empty() {
        text += &format!("  outputs without contingency control: {}\n", excluded.join(", "));
    }
    let formula = match &v.formula {
        Some(p) => {
            let f = load_formula(p, v.syntax.into()).map_err(load_error(p))?;
            text += &format!("{}: {f}\n", p.display());
            Some(f)
        }
        None => None,
    };
    if let Some(p) = &v.counterexample {
        let cex = load_counterexample(p, &machine).map_err(load_error(p))?;
        text += &format!("{}: {} traces\n", p.display(), cex.traces().len());
        if let Some(f) = &formula {
            let holds = eval_hyper(&cex, f).map_err(|e| Failure::from(Error::from(e)))?;
            text += &format!("  formula {}\n", if holds { "holds" } else { "is violated" });
        }
    }
    emit(&text);
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check(c) => check(c),
        Command::Explain { common, search } => explain(common, search),
        Command::Candidates(c) => candidates(c),
        Command::Oracle(c) => oracle(c),
        Command::Validate(v) => validate(v),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("hypercause: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

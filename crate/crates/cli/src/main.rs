//! `quasidense`: decide formulas over quasi-dense frames, check and
//! filtrate models, and run the brute-force oracle.
//!
//! Exit codes: 0 SAT or check passed, 1 UNSAT or check failed, 2 UNKNOWN,
//! 64 usage error, 65 unreadable or malformed input.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quasidense::filtration::build_filtrated;
use quasidense::formula::{parse, Formula, TargetFormula};
use quasidense::kripke::{check_model, is_kl_frame, to_dot, KLSpec, PointedModel};
use quasidense::oracle::{enumerate_models, generate_corpus, SearchBound, SearchResult};
use quasidense::solver::{solve_traced, SolverConfig, Verdict};
use quasidense::tableau::TableauConfig;

const EXIT_SAT: u8 = 0;
const EXIT_UNSAT: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_DATA: u8 = 65;

#[derive(Parser)]
#[command(name = "quasidense", version, about = "Satisfiability and finite models for quasi-dense modal logics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a formula; on SAT print a verified model.
    Solve {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long)]
        kl: String,
        #[arg(long, default_value_t = TableauConfig::default().max_worlds)]
        max_worlds: usize,
        #[arg(long, default_value_t = TableauConfig::default().max_steps)]
        max_steps: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Print each tableau rule application to stderr.
        #[arg(long)]
        trace: bool,
    },
    /// Check that a model is a KL-frame satisfying the formula at its root.
    CheckModel {
        model: PathBuf,
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long)]
        kl: String,
    },
    /// Print the path-filtrated model of a model with respect to a formula.
    Filtrate {
        model: PathBuf,
        #[command(flatten)]
        input: FormulaInput,
        /// Also report whether the filtrated frame is a KL-frame.
        #[arg(long)]
        kl: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Search all small models exhaustively.
    OracleSearch {
        #[command(flatten)]
        input: FormulaInput,
        #[arg(long)]
        kl: String,
        #[arg(long, default_value_t = 4)]
        max_worlds: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    #[command(hide = true)]
    CorpusCount {
        #[arg(long, value_delimiter = ',', default_value = "p,q")]
        atoms: Vec<String>,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        size: usize,
    },
}

#[derive(Args)]
struct FormulaInput {
    /// The formula, e.g. `<>p & [][]~p`.
    #[arg(required_unless_present = "formula_file")]
    formula: Option<String>,
    /// Read the formula from a file instead.
    #[arg(long, conflicts_with = "formula")]
    formula_file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: String) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message,
    }
}

fn data(message: String) -> Failure {
    Failure {
        code: EXIT_DATA,
        message,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_SAT };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Solve {
            input,
            kl,
            max_worlds,
            max_steps,
            format,
            trace,
        } => {
            let phi = read_formula(&input)?;
            let kl = parse_kl(&kl)?;
            if max_worlds == 0 || max_steps == 0 {
                return Err(usage("--max-worlds and --max-steps must be positive".into()));
            }
            let config = SolverConfig {
                tableau: TableauConfig {
                    max_worlds,
                    max_steps,
                    ..TableauConfig::default()
                },
                ..SolverConfig::default()
            };
            let mut sink = |line: &str| {
                if trace {
                    eprintln!("{line}");
                }
            };
            let decision = solve_traced(&phi, &kl, &config, &mut sink);
            match decision.verdict {
                Verdict::Sat { model, report } => {
                    println!("SAT");
                    print!("{}", render(&model, format));
                    if let Some(r) = report {
                        println!("verification: {r}");
                    }
                    Ok(EXIT_SAT)
                }
                Verdict::Unsat => {
                    println!("UNSAT");
                    Ok(EXIT_UNSAT)
                }
                Verdict::Unknown(reason) => {
                    println!("UNKNOWN: {reason}");
                    Ok(EXIT_UNKNOWN)
                }
            }
        }
        Command::CheckModel { model, input, kl } => {
            let pm = read_model(&model)?;
            let phi = read_formula(&input)?;
            let kl = parse_kl(&kl)?;
            let report = check_model(&pm, &phi, &kl);
            println!("{}", if report.ok() { "ok" } else { "failed" });
            println!("{report}");
            Ok(if report.ok() { EXIT_SAT } else { EXIT_UNSAT })
        }
        Command::Filtrate {
            model,
            input,
            kl,
            format,
        } => {
            let pm = read_model(&model)?;
            let phi = read_formula(&input)?;
            let kl = kl.as_deref().map(parse_kl).transpose()?;
            let target = TargetFormula::new(phi);
            let fm = build_filtrated(&pm, &target).map_err(|e| data(e.to_string()))?;
            print!("{}", render(&fm.model, format));
            if let Some(kl) = kl {
                println!("kl_frame_ok={}", is_kl_frame(fm.model.frame(), &kl));
            }
            Ok(EXIT_SAT)
        }
        Command::OracleSearch {
            input,
            kl,
            max_worlds,
            format,
        } => {
            let phi = read_formula(&input)?;
            let kl = parse_kl(&kl)?;
            if max_worlds == 0 {
                return Err(usage("--max-worlds must be positive".into()));
            }
            match enumerate_models(&phi, &kl, SearchBound { max_worlds }) {
                SearchResult::Found(pm) => {
                    println!("FOUND");
                    print!("{}", render(&pm, format));
                    Ok(EXIT_SAT)
                }
                SearchResult::NoneUpTo(n) => {
                    println!("NONE up to {n} worlds");
                    Ok(EXIT_UNSAT)
                }
            }
        }
        Command::CorpusCount { atoms, depth, size } => {
            let atoms: Vec<&str> = atoms.iter().map(String::as_str).collect();
            let corpus = generate_corpus(&atoms, depth, size).map_err(|e| usage(e.to_string()))?;
            println!("{}", corpus.len());
            Ok(EXIT_SAT)
        }
    }
}

fn parse_kl(text: &str) -> Result<KLSpec, Failure> {
    text.parse().map_err(|e| usage(format!("--kl {text}: {e}")))
}

fn read_formula(input: &FormulaInput) -> Result<Formula, Failure> {
    let text = match (&input.formula, &input.formula_file) {
        (Some(t), _) => t.clone(),
        (None, Some(path)) => std::fs::read_to_string(path)
            .map_err(|e| data(format!("cannot read {}: {e}", path.display())))?,
        (None, None) => return Err(usage("no formula given".into())),
    };
    parse(text.trim()).map_err(|e| data(format!("formula: {e}")))
}

fn read_model(path: &PathBuf) -> Result<PointedModel, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| data(format!("cannot read {}: {e}", path.display())))?;
    PointedModel::from_json(&text).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn render(pm: &PointedModel, format: Format) -> String {
    match format {
        Format::Json => pm.to_json(),
        Format::Dot => to_dot(pm),
        Format::Text => {
            let frame = pm.frame();
            let mut out = format!("root {}\nworlds {}\n", frame.name(pm.root()), frame.worlds().join(" "));
            for (a, b) in frame.rel().pairs() {
                let _ = writeln!(out, "{} -> {}", frame.name(a), frame.name(b));
            }
            for (p, set) in pm.model().valuation() {
                let ws: Vec<&str> = set.ones().map(|w| frame.name(w)).collect();
                let _ = writeln!(out, "{p}: {}", ws.join(" "));
            }
            out
        }
    }
}

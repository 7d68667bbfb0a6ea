//! Command-line front end for the entropy engine.
//!
//! Exit codes: 0 on success, 1 on validation errors (including malformed
//! input and usage errors), 2 when an enumeration guard is exceeded.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gpt_entropy::boxworld::{chsh_value, enumerate_pure_states, Signature};
use gpt_entropy::coding::{hypothesis_test_pn_with, simulate_compression, CodingConfig, Source};
use gpt_entropy::entropy::{Engine, EntropyReport, Limits, Partition, MAX_STRATEGIES_ENV};
use gpt_entropy::framework::{box_distance_exact, distance_with_limit, State};
use gpt_entropy::games::{build_ic_state_noisy, build_rac_state_noisy};
use gpt_entropy::info::{self, RenyiOrder};
use gpt_entropy::{classical::ClassicalState, golden, io, rational, Error, Result};

use output::{num, Format, Report};

/// Largest Hilbert-space dimension accepted from state files.
const MAX_QUANTUM_DIM: usize = 8;

#[derive(Debug, Parser)]
#[command(name = "gpt-entropy", version, about = "Entropy in classical, quantum and box-world theories")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..), global = true)]
    max_subsystems: u64,

    /// Bound on the product of per-subsystem output counts.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..), global = true)]
    max_outcomes: u64,

    #[arg(long, env = MAX_STRATEGIES_ENV, default_value_t = 1_000_000,
          value_parser = clap::value_parser!(u64).range(1..), global = true)]
    max_strategies: u64,

    /// Seed for Monte-Carlo runs.
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Game {
    Rac,
    Ic,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Measurement entropy, or its Rényi variant, of a state or marginal.
    Entropy {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        subsystems: Option<Vec<usize>>,
        /// Rényi order (`inf` for min-entropy).
        #[arg(long)]
        alpha: Option<RenyiOrder>,
    },
    /// Conditional entropy of A given B.
    Conditional {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        b: Vec<usize>,
        /// Measure B and condition instead of taking the difference form.
        #[arg(long)]
        plus: bool,
    },
    /// Mutual information between A and B.
    Mutual {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<usize>,
        #[arg(long)]
        plus: bool,
    },
    /// Accessible information between A and B.
    Accinfo {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        a: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<usize>,
    },
    /// Decomposition entropy and its witness decomposition.
    Decomp { file: PathBuf },
    /// Operational distance between two states.
    Distance { first: PathBuf, second: PathBuf },
    /// Pure states of the box-world state space with a given signature.
    Vertices {
        /// Boxes as `inputs:outputs`, comma separated.
        #[arg(long)]
        signature: String,
        /// Print every vertex table.
        #[arg(long)]
        list: bool,
    },
    /// CHSH value of a bipartite binary box.
    Chsh { file: PathBuf },
    /// Entropic quantities of a protocol state.
    Game {
        #[arg(value_enum)]
        game: Game,
        /// PR-box correctness probability.
        #[arg(long, default_value = "1")]
        p: String,
    },
    /// Subadditivity gap of the conditional entropy over noisy PR boxes.
    SsaSweep {
        #[arg(long, default_value_t = 0.5)]
        p_min: f64,
        #[arg(long, default_value_t = 1.0)]
        p_max: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Typical-subspace compression of a memoryless letter source.
    CodeSim {
        /// Letter probabilities.
        #[arg(long, value_delimiter = ',', required = true)]
        source: Vec<String>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rate: f64,
        #[arg(long)]
        eps: f64,
        /// Target atypical mass.
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Optimal finite-N error exponent between two distributions.
    Hyptest {
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<String>,
        #[arg(long)]
        nmax: usize,
        /// Number of evenly spaced N up to `nmax`.
        #[arg(long, default_value_t = 5)]
        points: usize,
        /// Bound on the probability of rejecting the first hypothesis.
        #[arg(long, default_value = "1/2")]
        eps: String,
    },
    /// Evaluates every built-in reference value and reports pass or fail.
    PaperCheck,
}

fn load(path: &std::path::Path) -> Result<State> {
    let state = io::read_state(path)?;
    if let State::Quantum(rho) = &state {
        if rho.dim() > MAX_QUANTUM_DIM {
            return Err(Error::OutOfRange(format!("quantum dimension {} exceeds {MAX_QUANTUM_DIM}", rho.dim())));
        }
    }
    Ok(state)
}

fn check_signature(sig: &Signature, limits: &Limits) -> Result<()> {
    if sig.len() > limits.max_subsystems {
        return Err(Error::GuardExceeded {
            what: "subsystems".into(),
            needed: sig.len() as u128,
            limit: limits.max_subsystems as u128,
        });
    }
    if sig.output_count() > limits.max_outcomes {
        return Err(Error::GuardExceeded {
            what: "joint outcomes".into(),
            needed: sig.output_count() as u128,
            limit: limits.max_outcomes as u128,
        });
    }
    Ok(())
}

fn entropy_report(r: &EntropyReport) -> Report {
    Report::from_struct(r)
}

fn probabilities(items: &[String]) -> Result<Vec<rational::Rational>> {
    items.iter().map(|s| rational::parse(s)).collect()
}

fn run(cli: &Cli) -> Result<Report> {
    let limits = Limits {
        max_subsystems: cli.max_subsystems as usize,
        max_outcomes: cli.max_outcomes as usize,
        max_strategies: cli.max_strategies as u128,
        ..Limits::default()
    };
    let engine = Engine::new(limits);
    Ok(match &cli.command {
        Command::Entropy { file, subsystems, alpha } => {
            let mut state = load(file)?;
            if let Some(subs) = subsystems {
                state = state.marginal(subs)?;
            }
            entropy_report(&match alpha {
                Some(order) => engine.hhat_alpha(&state, *order)?,
                None => engine.hhat(&state)?,
            })
        }
        Command::Conditional { file, a, b, plus } => {
            let state = load(file)?;
            let part = Partition::new(a.clone(), b.clone());
            entropy_report(&if *plus {
                engine.cond_plus(&state, &part)?
            } else {
                engine.cond_standard(&state, &part)?
            })
        }
        Command::Mutual { file, a, b, plus } => {
            let state = load(file)?;
            let part = Partition::new(a.clone(), b.clone());
            entropy_report(&if *plus { engine.mutual_plus(&state, &part)? } else { engine.mutual(&state, &part)? })
        }
        Command::Accinfo { file, a, b } => {
            let state = load(file)?;
            entropy_report(&engine.accessible_info(&state, &Partition::new(a.clone(), b.clone()))?)
        }
        Command::Decomp { file } => entropy_report(&engine.decomposition_entropy(&load(file)?)?),
        Command::Distance { first, second } => {
            let (s0, s1) = (load(first)?, load(second)?);
            let mut report =
                Report::default().field("distance", num(distance_with_limit(&s0, &s1, limits.max_strategies)?));
            if let (State::Box(a), State::Box(b)) = (&s0, &s1) {
                let (exact, strategy) = box_distance_exact(a, b, limits.max_strategies)?;
                report = report
                    .field("distance_exact", Value::String(rational::format(&exact)))
                    .field("strategy", json!(strategy));
            }
            report
        }
        Command::Vertices { signature, list } => {
            let sig = io::parse_signature(signature)?;
            check_signature(&sig, &limits)?;
            let vs = enumerate_pure_states(&sig, limits.max_vertex_candidates)?;
            let mut report = Report::default()
                .field("signature", Value::String(sig.to_string()))
                .field("pure_states", json!(vs.len()))
                .field("product", json!(vs.product_count()))
                .field("entangled", json!(vs.entangled_count()));
            if *list {
                let rows = vs
                    .vertices
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        let kind = if k < vs.product_count() { "product" } else { "entangled" };
                        let table: Vec<String> = v.table().iter().map(rational::format).collect();
                        vec![json!(k), json!(kind), Value::String(table.join(" "))]
                    })
                    .collect();
                report = report.table(&["index", "kind", "table"], rows);
            }
            report
        }
        Command::Chsh { file } => match load(file)? {
            State::Box(b) => {
                let v = chsh_value(&b)?;
                Report::default()
                    .field("chsh", num(rational::to_f64(&v)))
                    .field("chsh_exact", Value::String(rational::format(&v)))
            }
            other => return Err(Error::Unsupported(format!("CHSH of a {} state", other.theory()))),
        },
        Command::Game { game, p } => {
            let p = rational::parse(p)?;
            let (values, label) = match game {
                Game::Rac => (golden::rac_values(&engine, &build_rac_state_noisy(&p)?)?, "rac"),
                Game::Ic => (golden::ic_values(&engine, &build_ic_state_noisy(&p)?)?, "ic"),
            };
            let mut report = Report::default().field("game", json!(label)).field("p", json!(rational::format(&p)));
            for (k, v) in values {
                report = report.field(&k, num(v));
            }
            report
        }
        Command::SsaSweep { p_min, p_max, step } => {
            let sweep = golden::ssa_sweep(&engine, *p_min, *p_max, *step)?;
            let rows = sweep.points.iter().map(|pt| vec![num(pt.p), num(pt.gap)]).collect();
            Report::default().field("threshold", sweep.threshold.map_or(Value::Null, num)).table(&["p", "gap"], rows)
        }
        Command::CodeSim { source, n, rate, eps, delta, trials } => {
            let source = Source::letters(probabilities(source)?)?;
            let config = CodingConfig::classical(*rate, *eps, *delta)?;
            Report::from_struct(&simulate_compression(&source, *n, &config, *trials, cli.seed)?)
        }
        Command::Hyptest { p, q, nmax, points, eps } => {
            let s1 = ClassicalState::from_probs(probabilities(p)?)?;
            let s2 = ClassicalState::from_probs(probabilities(q)?)?;
            let threshold = rational::parse(eps)?;
            if *points == 0 || *nmax < *points {
                return Err(Error::OutOfRange(format!("need 1 <= points <= nmax, got {points} and {nmax}")));
            }
            let rows = (1..=*points)
                .map(|k| {
                    let r = hypothesis_test_pn_with(&s1, &s2, nmax * k / points, &threshold)?;
                    Ok(vec![
                        json!(r.n),
                        num(r.p_n),
                        num(r.log2_p_n),
                        num(r.rate),
                        r.p_n_exact.as_ref().map_or(Value::Null, |x| Value::String(rational::format(x))),
                    ])
                })
                .collect::<Result<Vec<_>>>()?;
            Report::default()
                .field("eps", Value::String(rational::format(&threshold)))
                .field("relative_entropy", num(info::kl_divergence(&s1.probs_f64(), &s2.probs_f64())))
                .table(&["n", "p_n", "log2_p_n", "rate", "p_n_exact"], rows)
        }
        Command::PaperCheck => {
            let rows = golden::reference_checks(&engine)?;
            let passed = rows.iter().filter(|r| r.pass).count();
            let table = rows
                .iter()
                .map(|r| {
                    vec![
                        json!(r.group),
                        json!(r.quantity),
                        num(r.value),
                        num(r.expected),
                        num(r.tolerance),
                        json!(if r.pass { "PASS" } else { "FAIL" }),
                    ]
                })
                .collect();
            Report::default()
                .field("passed", json!(passed))
                .field("total", json!(rows.len()))
                .table(&["group", "quantity", "value", "expected", "tolerance", "status"], table)
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(report) => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            if report.write(cli.format, &mut lock).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            if cli.format == Format::Json {
                eprintln!("{}", io::error_to_json(&e));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(if e.is_guard() { 2 } else { 1 })
        }
    }
}

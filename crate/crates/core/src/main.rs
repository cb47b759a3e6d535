use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use purify::config::EffectBehaviorConfig;
use purify::metrics::{span, work};
use purify::program::{analyze, Program};
use purify::propcheck::{run_suite, SuiteConfig, SUITES};
use purify::semantics::{check_laws, eval, Action, ConstEnv, Monad, Value};
use purify::translate::Mode;

#[derive(Parser)]
#[command(
    name = "purify",
    version,
    about = "Compile direct-style effect marks to applicative/monadic combinators"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Type-check a program and print its type.
    Check { file: PathBuf },
    /// Translate a direct-style program and print the result.
    Translate {
        file: PathBuf,
        #[arg(long, default_value = "opt")]
        mode: Mode,
        /// Apply the law-based rewriter to the output.
        #[arg(long)]
        normalize: bool,
        /// Print type annotations on lambdas.
        #[arg(long)]
        annotate: bool,
    },
    /// Static span and work of the program and of each translation.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a program in one of the built-in monads.
    Run {
        file: PathBuf,
        #[arg(long, default_value = "trace")]
        monad: Monad,
        /// Translate first, with this mode, and run the translation.
        #[arg(long)]
        mode: Option<Mode>,
        /// JSON file with per-effect behaviors and latencies.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Latency in milliseconds of effects the config does not mention.
        #[arg(long, default_value_t = 100.0)]
        latency: f64,
        /// Write the effect trace as Graphviz (trace monad only).
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Check the monad laws on random inputs.
    Laws {
        #[arg(long)]
        monad: Monad,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a property suite and print a JSON report.
    Suite {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        name: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 5)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restrict semantic checks to one monad.
        #[arg(long)]
        monad: Option<Monad>,
    },
}

enum Failure {
    Diagnostic(String),
    Property,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure::Diagnostic(e.to_string())
    }
}

fn load(path: &Path) -> Result<Program, Failure> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| Failure::Diagnostic(format!("{}: {e}", path.display())))?;
    Program::parse(&src).map_err(|e| Failure::Diagnostic(format!("{}: {e}", path.display())))
}

fn describe(v: &Value) -> String {
    let Value::Eff(a) = v else {
        return v.to_string();
    };
    match a {
        Action::Option(Some(x)) => format!("some {x}"),
        Action::Option(None) => "none".into(),
        Action::State(f) => {
            let (x, s) = f(0);
            format!("{x} (state 0 -> {s})")
        }
        Action::Writer(x, log) => format!("{x} (log [{}])", log.join(", ")),
        Action::Trace(_, x) => x.to_string(),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse().cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Diagnostic(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Property) => ExitCode::from(2),
    }
}

fn run(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Check { file } => {
            let p = load(&file)?;
            println!("{}", p.ty);
        }
        Cmd::Translate {
            file,
            mode,
            normalize,
            annotate,
        } => {
            let t = load(&file)?.translate(mode, normalize)?;
            print!("{}", t.render(annotate));
        }
        Cmd::Analyze { file, json } => {
            let a = analyze(&load(&file)?)?;
            if json {
                println!("{}", serde_json::to_string(&a)?);
            } else {
                println!("        span work");
                for (name, s, w) in [
                    ("source", a.span_src, a.work_src),
                    ("opt", a.span_opt, a.work_opt),
                    ("naive", a.span_naive, a.work_naive),
                    ("seq", a.span_seq, a.work_seq),
                ] {
                    println!("{name:<7} {s:>4} {w:>4}");
                }
            }
        }
        Cmd::Run {
            file,
            monad,
            mode,
            config,
            latency,
            dot,
        } => {
            let mut p = load(&file)?;
            if let Some(mode) = mode {
                p = p.translate(mode, false)?;
            }
            let cfg = match config {
                Some(path) => EffectBehaviorConfig::load(&path)?,
                None => EffectBehaviorConfig::default(),
            };
            cfg.validate(&p.sig)?;
            if !latency.is_finite() || latency < 0.0 {
                return Err(Failure::Diagnostic(format!("bad latency {latency}")));
            }
            let env = ConstEnv::new(&p.sig, monad, &cfg.behaviors());
            let v = eval(&p.term, p.label, monad, &env)?;
            println!("result: {}", describe(&v));
            println!("static span {} work {}", span(&p.term), work(&p.term));
            if let Value::Eff(Action::Trace(dag, _)) = &v {
                let lat: BTreeMap<String, f64> = cfg.latencies(&p.sig, latency);
                println!("dynamic span {} work {}", dag.dyn_span()?, dag.dyn_work());
                println!("simulated latency {} ms", dag.simulate_latency(&lat)?);
                if let Some(out) = dot {
                    std::fs::write(&out, dag.to_dot())
                        .map_err(|e| Failure::Diagnostic(format!("{}: {e}", out.display())))?;
                }
            } else if dot.is_some() {
                return Err(Failure::Diagnostic("--dot needs --monad trace".into()));
            }
        }
        Cmd::Laws {
            monad,
            trials,
            seed,
        } => {
            let r = check_laws(monad, trials, seed);
            println!("{}", serde_json::to_string_pretty(&r)?);
            if !r.all_pass() {
                return Err(Failure::Property);
            }
        }
        Cmd::Suite {
            name,
            trials,
            depth,
            seed,
            monad,
        } => {
            let mut cfg = SuiteConfig {
                depth,
                seed,
                ..SuiteConfig::default()
            };
            if let Some(m) = monad {
                cfg.monads = vec![m];
            }
            let r = run_suite(&name, &cfg, trials)?;
            println!("{}", serde_json::to_string_pretty(&r)?);
            if !r.ok() {
                return Err(Failure::Property);
            }
        }
    }
    Ok(())
}

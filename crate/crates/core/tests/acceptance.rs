//! End-to-end acceptance run. Prints one line per criterion and exits
//! non-zero if any of them fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use purify::ast::{alpha_eq, Label};
use purify::metrics::{span, work};
use purify::program::{analyze, Program};
use purify::propcheck::{run_suite, SuiteConfig, SuiteReport};
use purify::semantics::{check_laws, eval, value_eq, Action, ConstEnv, Monad, Value};
use purify::translate::Mode;

fn program(name: &str) -> Program {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../programs")
        .join(name);
    Program::parse(&std::fs::read_to_string(path).expect("program file"))
        .expect("well-typed program")
}

fn target(body: &str) -> Program {
    let decls = "effect fetch : Str -> Eff Str\nprim concat : Str -> Str -> Str\nprim urlXX : Str\nprim urlYY : Str\n";
    Program::parse(&format!("{decls}purify {{ {body} }}")).expect("well-typed target")
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn suite(name: &str, trials: usize, depth: usize, monads: &[Monad]) -> SuiteReport {
    let cfg = SuiteConfig {
        depth,
        seed: 2024,
        monads: monads.to_vec(),
        ..SuiteConfig::default()
    };
    run_suite(name, &cfg, trials).expect("suite runs")
}

fn summary(r: &SuiteReport) -> String {
    let first = r
        .failures
        .first()
        .map(|f| format!("; first: {} ({})", f.term_pretty, f.detail))
        .unwrap_or_default();
    format!("{}: {}/{} passed{first}", r.suite, r.passes, r.trials)
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    o.detail = format!("{} [{:.2?}, limit {:?}]", o.detail, took, limit);
    o.ok &= took <= limit;
    o
}

fn pair_golden() -> Outcome {
    let a = analyze(&program("pair.pur")).expect("analysis");
    let got = (a.span_src, a.work_src, a.span_opt, a.work_opt);
    outcome(
        got == (1, 2, 1, 2),
        format!("span/work src {}/{}, opt {}/{}", got.0, got.1, got.2, got.3),
    )
}

fn two_chain_golden() -> Outcome {
    let p = program("two_chain.pur");
    let opt = p.translate(Mode::Opt, false).expect("translation");
    let expected = target(
        "ap (map (fun b -> concat(b)) (join (map (fun a -> fetch(a)) fetch(urlXX)))) \
            (join (map (fun a -> fetch(a)) fetch(urlYY)))",
    );
    let shape = alpha_eq(&opt.term.erase_types(), &expected.term.erase_types());
    let literal = target(
        "ap (ap (pure (fun x -> fun y -> x ++ y)) (join (map fetch fetch(urlXX)))) \
            (join (map fetch fetch(urlYY)))",
    );
    let same = Monad::BUILTIN.iter().all(|&m| {
        let env = ConstEnv::default_for(&p.sig, m);
        let a = eval(&opt.term, Label::Tgt, m, &env).expect("eval");
        let b = eval(&literal.term, Label::Tgt, m, &env).expect("eval");
        value_eq(&a, &b, &opt.ty, m)
    });
    let a = analyze(&p).expect("analysis");
    outcome(
        shape && same && (a.span_opt, a.work_opt, a.span_seq) == (2, 4, 4),
        format!(
            "alpha-equivalent {shape}, agrees with the literal form {same}, opt {}/{}, seq span {}",
            a.span_opt, a.work_opt, a.span_seq
        ),
    )
}

fn property(name: &str, trials: usize) -> Outcome {
    let r = suite(name, trials, 6, &Monad::BUILTIN);
    outcome(r.ok(), summary(&r))
}

fn com_properties() -> Outcome {
    let a = suite("effect_free", 5000, 6, &Monad::BUILTIN);
    let b = suite("relabel", 5000, 6, &Monad::BUILTIN);
    outcome(
        a.ok() && b.ok(),
        format!("{}; {}", summary(&a), summary(&b)),
    )
}

fn law_gate() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for m in Monad::BUILTIN {
        let r = check_laws(m, 1000, 2024);
        let failed: usize = r.laws.iter().map(|l| l.failures).sum();
        ok &= r.all_pass();
        detail.push(format!("{m} {failed} law failures"));
    }
    let sem = suite("semantics", 2000, 6, &[Monad::Broken]);
    let base = suite("baseline", 2000, 6, &[Monad::Broken]);
    let detected = sem.failed() + base.failed();
    ok &= detected > 0;
    detail.push(format!(
        "broken monad: {} counterexamples to PURE preservation, {} to baseline agreement",
        sem.failed(),
        base.failed()
    ));
    outcome(ok, detail.join(", "))
}

fn parallelism() -> Outcome {
    let p = program("two_chain.pur");
    let m = Monad::Trace;
    let lat = purify::config::EffectBehaviorConfig::default().latencies(&p.sig, 100.0);
    let mut ok = true;
    let mut detail = Vec::new();
    for (mode, want) in [(Mode::Opt, 200.0), (Mode::Seq, 400.0)] {
        let t = p.translate(mode, false).expect("translation");
        let env = ConstEnv::default_for(&t.sig, m);
        let Value::Eff(Action::Trace(dag, _)) = eval(&t.term, Label::Tgt, m, &env).expect("eval")
        else {
            return outcome(false, "trace evaluation produced no trace");
        };
        let ms = dag.simulate_latency(&lat).expect("acyclic");
        let dyn_ = (dag.dyn_span().expect("acyclic"), dag.dyn_work());
        let stat = (span(&t.term), work(&t.term));
        ok &= ms == want && dyn_ == stat;
        detail.push(format!(
            "{mode:?} {ms}ms, dynamic {}/{}, static {}/{}",
            dyn_.0, dyn_.1, stat.0, stat.1
        ));
    }
    outcome(ok, detail.join(", "))
}

type Criterion = (&'static str, Box<dyn FnOnce() -> Outcome>);

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        (
            "pair program span and work",
            Box::new(|| timed(Duration::from_secs(1), pair_golden)),
        ),
        (
            "two-chain translation",
            Box::new(|| timed(Duration::from_secs(1), two_chain_golden)),
        ),
        (
            "translation preserves types",
            Box::new(|| timed(Duration::from_secs(60), || property("types", 10_000))),
        ),
        (
            "translation preserves meaning",
            Box::new(|| timed(Duration::from_secs(120), || property("semantics", 2000))),
        ),
        (
            "translation preserves span and work",
            Box::new(|| timed(Duration::from_secs(60), || property("span_work", 10_000))),
        ),
        (
            "smart constructors",
            Box::new(|| timed(Duration::from_secs(60), || property("smart_ctors", 5000))),
        ),
        (
            "common terms are effect-free",
            Box::new(|| timed(Duration::from_secs(30), com_properties)),
        ),
        ("monad laws and the broken monad", Box::new(law_gate)),
        ("parallelism under trace latency", Box::new(parallelism)),
        (
            "normalizer soundness",
            Box::new(|| timed(Duration::from_secs(120), || property("normalize", 2000))),
        ),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let o = run();
        if !o.ok {
            failed += 1;
        }
        let verdict = if o.ok { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict}  {name}: {}", i + 1, o.detail);
    }
    if failed == 0 {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria fail");
        ExitCode::FAILURE
    }
}

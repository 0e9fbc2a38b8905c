//! One pass/fail line per acceptance criterion. Each criterion runs its
//! checks over the full τ × seed grid and must also meet its time budget.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ekkit::harness::{run_suite, suite_taus, CheckId, Env, SUITE_SEEDS};

use CheckId::*;

struct Criterion {
    n: u32,
    what: &'static str,
    checks: &'static [CheckId],
    budget_s: u64,
}

const CRITERIA: &[Criterion] = &[
    Criterion { n: 1, what: "series vs direct Lerch sums", checks: &[ThmC], budget_s: 60 },
    Criterion { n: 2, what: "functional equation", checks: &[FuncEq], budget_s: 10 },
    Criterion { n: 3, what: "Kronecker/zeta anchors", checks: &[ZetaId, EFLink, KronId], budget_s: 10 },
    Criterion { n: 4, what: "derivative suite", checks: &[DerivE, DerivG], budget_s: 30 },
    Criterion { n: 5, what: "stratum limits", checks: &[Limits], budget_s: 10 },
    Criterion { n: 6, what: "quadratic identity and AYBE", checks: &[Quad, Aybe], budget_s: 60 },
    Criterion { n: 7, what: "Stasheff and [m,m] = 0", checks: &[Stasheff, MaurerCartan], budget_s: 120 },
    Criterion { n: 8, what: "cyclicity and unit", checks: &[Cyclic, Unital], budget_s: 30 },
    Criterion { n: 9, what: "products vs perturbation oracle", checks: &[PerturbOracle], budget_s: 30 },
    Criterion { n: 10, what: "Laurent expansion", checks: &[Expansion], budget_s: 20 },
    Criterion { n: 11, what: "variation equations", checks: &[Variation], budget_s: 120 },
    Criterion { n: 12, what: "reduction polynomials and constants", checks: &[Corb, Constants], budget_s: 60 },
    Criterion { n: 13, what: "classical oracles", checks: &[ClassicalX], budget_s: 20 },
];

fn criterion(c: &Criterion) -> (bool, String) {
    let base = match Env::new(suite_taus()[0], SUITE_SEEDS[0]) {
        Ok(e) => e,
        Err(e) => return (false, e.to_string()),
    };
    let t0 = Instant::now();
    let summary = match run_suite(c.checks, &suite_taus(), &SUITE_SEEDS, &base) {
        Ok(s) => s,
        Err(e) => return (false, e.to_string()),
    };
    let dt = t0.elapsed();
    // NaN residuals rank as the worst
    let key = |r: &ekkit::harness::CheckReport| {
        let q = r.residual / r.threshold;
        if q.is_nan() {
            f64::INFINITY
        } else {
            q
        }
    };
    let worst = summary.reports.iter().max_by(|x, y| key(x).total_cmp(&key(y)));
    let mut detail = format!("{} runs, {:.1} s / {} s", summary.reports.len(), dt.as_secs_f64(), c.budget_s);
    if let Some(r) = worst {
        detail += &format!(", worst {} residual {:.2e} (threshold {:.0e})", r.check, r.residual, r.threshold);
    }
    (summary.all_pass() && dt <= Duration::from_secs(c.budget_s), detail)
}

fn full_cli() -> (bool, String) {
    let t0 = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_ekkit")).args(["verify", "--all"]).output();
    let dt = t0.elapsed();
    match out {
        Ok(o) => {
            let ok = o.status.code() == Some(0) && dt <= Duration::from_secs(300);
            let tail = String::from_utf8_lossy(&o.stderr).trim().to_string();
            (ok, format!("exit {:?}, {:.1} s / 300 s: {tail}", o.status.code(), dt.as_secs_f64()))
        }
        Err(e) => (false, e.to_string()),
    }
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut line = |n: u32, what: &str, (ok, detail): (bool, String)| {
        if !ok {
            failed += 1;
        }
        println!("criterion {n:>2} {}: {what} ({detail})", if ok { "PASS" } else { "FAIL" });
    };
    for c in CRITERIA {
        line(c.n, c.what, criterion(c));
    }
    line(14, "ekkit verify --all", full_cli());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use ekkit::classical::{eisenstein, eisenstein2_star, kronecker_f, theta, weier_p, weier_zeta, z_fn, Tau};
use ekkit::ekseries::{ek, f_star, g_star, SeriesParams, Variant};
use ekkit::harness::{emit_table, run_suite, suite_taus, CheckId, Env, TableFormat, TableKind, TableSpec, SUITE_SEEDS};
use ekkit::symrec::{Reducer, Var};
use ekkit::{EkError, C64};

#[derive(Parser)]
#[command(name = "ekkit", version, about = "Eisenstein-Kronecker numbers and the elliptic A-infinity structure")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate one function; prints a JSON object.
    Eval(EvalArgs),
    /// Run verification checks; prints one JSON report per line.
    Verify(VerifyArgs),
    /// Write a value table.
    Table(TableArgs),
    /// Print the reduction polynomial of g*_{a,b}.
    Corb(CorbArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// f, g, ek, theta, wp, zeta, Z, F or e2k
    #[arg(long = "fn")]
    func: String,
    /// key=value pairs: a, b, m, n, k, deriv (integers); z, w, tau (`re,im`); tilde (0/1)
    #[arg(long, num_args = 0.., allow_hyphen_values = true)]
    args: Vec<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, conflicts_with = "all", required_unless_present = "all")]
    check: Option<String>,
    #[arg(long)]
    all: bool,
    /// Modulus `re,im`; without it the standard three are used.
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<String>,
    /// Without it seeds 1, 2, 3 are used.
    #[arg(long)]
    seed: Option<u64>,
    /// Absolute threshold override.
    #[arg(long)]
    tol: Option<f64>,
    /// Multiply every default threshold.
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long, default_value_t = 2)]
    s: usize,
    /// Debug mutation: flip the sign of m_4.
    #[arg(long, hide = true)]
    corrupt_m4: bool,
}

#[derive(Args)]
struct TableArgs {
    /// ek, gstar or eisenstein
    #[arg(long)]
    kind: String,
    #[arg(long, default_value_t = 3)]
    amax: usize,
    #[arg(long, default_value_t = 4)]
    bmax: usize,
    #[arg(long, allow_hyphen_values = true, default_value = "0.3,0.2")]
    z: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0.1,0.4")]
    w: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0,1")]
    tau: String,
    #[arg(long, default_value = "json")]
    format: String,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CorbArgs {
    #[arg(long)]
    a: usize,
    #[arg(long)]
    b: usize,
    /// Reduce g*_{a,b}(z, 0) instead.
    #[arg(long)]
    one_var: bool,
}

/// Failure kinds mapped onto the exit-code contract.
enum Fail {
    Usage(String),
    Checks,
}

impl From<EkError> for Fail {
    fn from(e: EkError) -> Self {
        Fail::Usage(e.to_string())
    }
}

fn parse_complex(s: &str) -> Result<C64, Fail> {
    let bad = || Fail::Usage(format!("expected `re,im`, got {s:?}"));
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    Ok(C64::new(re.trim().parse().map_err(|_| bad())?, im.trim().parse().map_err(|_| bad())?))
}

fn parse_tau(s: &str) -> Result<Tau, Fail> {
    Ok(Tau::new(parse_complex(s)?)?)
}

struct KV(HashMap<String, String>);

impl KV {
    fn parse(args: &[String]) -> Result<Self, Fail> {
        let mut m = HashMap::new();
        for a in args.iter().filter(|a| !a.is_empty()) {
            let (k, v) = a.split_once('=').ok_or_else(|| Fail::Usage(format!("expected key=value, got {a:?}")))?;
            m.insert(k.to_string(), v.to_string());
        }
        Ok(Self(m))
    }

    fn get(&self, k: &str) -> Result<&str, Fail> {
        self.0.get(k).map(String::as_str).ok_or_else(|| Fail::Usage(format!("missing argument {k}")))
    }

    fn int(&self, k: &str) -> Result<usize, Fail> {
        self.get(k)?.parse().map_err(|_| Fail::Usage(format!("{k} must be a non-negative integer")))
    }

    fn int_or(&self, k: &str, d: usize) -> Result<usize, Fail> {
        if self.0.contains_key(k) {
            self.int(k)
        } else {
            Ok(d)
        }
    }

    fn complex(&self, k: &str) -> Result<C64, Fail> {
        parse_complex(self.get(k)?)
    }

    fn tau(&self) -> Result<Tau, Fail> {
        parse_tau(self.0.get("tau").map(String::as_str).unwrap_or("0,1"))
    }
}

fn eval(a: &EvalArgs) -> Result<(), Fail> {
    let kv = KV::parse(&a.args)?;
    let tau = kv.tau()?;
    let l = tau.lattice();
    let p = SeriesParams::default();
    let tol = 1e-15;
    let cx = |v: C64| json!([v.re, v.im]);
    let out = match a.func.as_str() {
        "f" | "g" | "ek" => {
            let (z, w) = (l.strat(kv.complex("z")?), l.strat(kv.complex("w")?));
            let variant = if kv.int_or("tilde", 0)? == 1 { Variant::Tilde } else { Variant::Plain };
            let v = match a.func.as_str() {
                "f" => f_star(kv.int("m")?, kv.int("n")?, &z, &w, &l, &p, variant)?,
                "g" => g_star(kv.int("a")?, kv.int("b")?, &z, &w, &l, &p, variant)?,
                _ => ek(kv.int("a")?, kv.int("b")?, &z, &w, &l, &p)?,
            };
            json!({"fn": a.func, "value": cx(v.value), "radius_used": v.radius_used, "tail_bound": v.tail_bound})
        }
        "theta" => json!({"fn": "theta", "value": cx(theta(kv.complex("z")?, tau, tol))}),
        "wp" => {
            let d = kv.int_or("deriv", 0)?;
            let d = u8::try_from(d).map_err(|_| Fail::Usage("deriv too large".into()))?;
            json!({"fn": "wp", "value": cx(weier_p(kv.complex("z")?, &l, d, tol)?)})
        }
        "zeta" => json!({"fn": "zeta", "value": cx(weier_zeta(kv.complex("z")?, &l, tol)?)}),
        "Z" => json!({"fn": "Z", "value": cx(z_fn(kv.complex("z")?, &l, tol)?)}),
        "F" => json!({"fn": "F", "value": cx(kronecker_f(kv.complex("z")?, kv.complex("w")?, tau, tol)?)}),
        "e2k" => {
            // k is the weight 2k; weight 2 gives e*_2
            let k = kv.int("k")?;
            let v = if k == 2 { eisenstein2_star(&l, tol) } else { eisenstein(&l, k, tol)? };
            json!({"fn": "e2k", "weight": k, "value": cx(v)})
        }
        other => return Err(Fail::Usage(format!("unknown function {other:?}"))),
    };
    println!("{out}");
    Ok(())
}

fn verify(a: &VerifyArgs) -> Result<(), Fail> {
    let checks: Vec<CheckId> = match &a.check {
        Some(c) => vec![c.parse()?],
        None => CheckId::ALL.to_vec(),
    };
    let taus = match &a.tau {
        Some(t) => vec![parse_tau(t)?.value()],
        None => suite_taus(),
    };
    let seeds = match a.seed {
        Some(s) => vec![s],
        None => SUITE_SEEDS.to_vec(),
    };
    let mut base = Env::new(taus[0], seeds[0])?;
    base.r = a.r;
    base.s = a.s;
    base.threshold = a.tol;
    base.threshold_scale = a.tol_scale;
    base.corrupt_m4 = a.corrupt_m4;
    let summary = run_suite(&checks, &taus, &seeds, &base)?;
    for r in &summary.reports {
        println!("{}", r.to_json());
    }
    eprintln!("{} passed, {} failed in {:.1} s", summary.passed, summary.failed, summary.elapsed_ms as f64 / 1000.0);
    if summary.all_pass() {
        Ok(())
    } else {
        Err(Fail::Checks)
    }
}

fn table(a: &TableArgs) -> Result<(), Fail> {
    let spec = TableSpec {
        kind: a.kind.parse::<TableKind>()?,
        amax: a.amax,
        bmax: a.bmax,
        z: parse_complex(&a.z)?,
        w: parse_complex(&a.w)?,
        tau: parse_tau(&a.tau)?,
    };
    let format: TableFormat = a.format.parse()?;
    emit_table(&spec, format, a.out.as_deref()).map_err(|e| match e {
        // an unwritable path is not a usage error, but it is not a check failure either
        EkError::Io(m) => Fail::Usage(m),
        e => e.into(),
    })
}

fn corb(a: &CorbArgs) {
    let mut r = Reducer::new();
    let p = if a.one_var { r.one_var(Var::Z, a.a, a.b) } else { r.gab(a.a, a.b) };
    println!("{p}");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Eval(a) => eval(a),
        Cmd::Verify(a) => verify(a),
        Cmd::Table(a) => table(a),
        Cmd::Corb(a) => {
            corb(a);
            Ok(())
        }
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Checks) => ExitCode::from(1),
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

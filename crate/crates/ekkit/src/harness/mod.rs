//! Named verification checks, the suite runner and table generation.

mod checks;
mod sample;
mod table;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::classical::Tau;
use crate::error::{EkError, Result};
use crate::lattice::C64;

pub use sample::{Sampler, EXCLUSION};
pub use table::{emit_table, table_rows, TableFormat, TableKind, TableRow, TableSpec};

macro_rules! check_ids {
    ($($v:ident => $s:literal, $thr:expr;)*) => {
        /// Every verifiable identity, in report order.
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum CheckId { $($v),* }

        impl CheckId {
            pub const ALL: &'static [CheckId] = &[$(CheckId::$v),*];

            pub fn as_str(&self) -> &'static str {
                match self { $(CheckId::$v => $s),* }
            }

            /// Default pass threshold, matched to the method error.
            pub fn threshold(&self) -> f64 {
                match self { $(CheckId::$v => $thr),* }
            }
        }

        impl FromStr for CheckId {
            type Err = EkError;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($s => Ok(CheckId::$v),)*
                    _ => Err(EkError::UnknownCheck(s.to_string())),
                }
            }
        }
    };
}

check_ids! {
    ThmC => "thm-c", 1e-3;
    FuncEq => "func-eq", 1e-9;
    DerivE => "deriv-e", 1e-5;
    DerivG => "deriv-g", 1e-5;
    Limits => "limits", 1e-5;
    Quasi => "quasi", 1e-10;
    ZetaId => "zeta-id", 1e-9;
    KronId => "kron-id", 1e-8;
    EFLink => "e-f-link", 1e-8;
    ClassicalX => "classical-x", 1e-8;
    Quad => "quad", 1e-8;
    Aybe => "aybe", 1e-10;
    Expansion => "expansion", 1e-8;
    Stasheff => "stasheff", 1e-8;
    Cyclic => "cyclic", 1e-9;
    Unital => "unital", 1e-12;
    PerturbOracle => "perturb-oracle", 1e-9;
    MaurerCartan => "maurer-cartan", 1e-8;
    Variation => "variation", 1e-5;
    Corb => "corb", 1e-9;
    Constants => "constants", 1e-8;
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The test moduli used by the full suite.
pub const SUITE_TAUS: [(f64, f64); 3] = [(0.0, 1.0), (0.5, 1.0), (-0.25, 1.1)];
pub const SUITE_SEEDS: [u64; 3] = [1, 2, 3];

/// Parameters of one check run.
#[derive(Clone, Copy, Debug)]
pub struct Env {
    pub tau: Tau,
    pub r: usize,
    pub s: usize,
    pub seed: u64,
    /// Absolute threshold override.
    pub threshold: Option<f64>,
    /// Multiplies the default threshold (ignored with an override).
    pub threshold_scale: f64,
    /// Debug mutation: flip the sign of `m_4` in the A∞ products.
    pub corrupt_m4: bool,
}

impl Env {
    pub fn new(tau: C64, seed: u64) -> Result<Self> {
        Ok(Self {
            tau: Tau::new(tau).map_err(|e| EkError::InvalidConfig(e.to_string()))?,
            r: 2,
            s: 2,
            seed,
            threshold: None,
            threshold_scale: 1.0,
            corrupt_m4: false,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.r == 0 || self.s == 0 || self.r > 4 || self.s > 4 {
            return Err(EkError::InvalidConfig(format!("r = {}, s = {} must lie in 1..=4", self.r, self.s)));
        }
        if !(self.threshold_scale > 0.0) || self.threshold.is_some_and(|t| !(t > 0.0)) {
            return Err(EkError::InvalidConfig("thresholds must be positive".into()));
        }
        Ok(())
    }

    pub fn threshold_for(&self, id: CheckId) -> f64 {
        self.threshold.unwrap_or(id.threshold() * self.threshold_scale)
    }
}

/// Outcome of one check; `pass` iff `residual < threshold`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckReport {
    pub check: String,
    pub tau: [f64; 2],
    pub seed: u64,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
    pub elapsed_ms: u64,
}

impl CheckReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Run a single named check.
pub fn run_check(id: CheckId, env: &Env) -> Result<CheckReport> {
    env.validate()?;
    let t0 = Instant::now();
    let residual = checks::residual(id, env)?;
    let threshold = env.threshold_for(id);
    // NaN never passes
    let pass = residual < threshold;
    let t = env.tau.value();
    Ok(CheckReport {
        check: id.as_str().to_string(),
        tau: [t.re, t.im],
        seed: env.seed,
        residual,
        threshold,
        pass,
        elapsed_ms: t0.elapsed().as_millis() as u64,
    })
}

/// Aggregate of a suite run.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteSummary {
    pub reports: Vec<CheckReport>,
    pub passed: usize,
    pub failed: usize,
    pub elapsed_ms: u64,
}

impl SuiteSummary {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }
}

/// Thread cap from `EKKIT_THREADS` (unset or invalid → rayon's default).
pub fn thread_cap() -> Option<usize> {
    std::env::var("EKKIT_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|n| *n > 0)
}

/// Run `checks` over every `(τ, seed)` pair. Jobs run concurrently on a
/// pool capped by `EKKIT_THREADS`; reports come back in check order, then
/// τ, then seed. A check that errors is reported as a failure with a NaN
/// residual.
pub fn run_suite(checks: &[CheckId], taus: &[C64], seeds: &[u64], base: &Env) -> Result<SuiteSummary> {
    base.validate()?;
    let mut jobs = Vec::new();
    for id in checks {
        for t in taus {
            for s in seeds {
                let mut env = *base;
                env.tau = Tau::new(*t)?;
                env.seed = *s;
                jobs.push((*id, env));
            }
        }
    }
    let t0 = Instant::now();
    let work = || -> Vec<CheckReport> {
        jobs.par_iter()
            .map(|(id, env)| {
                run_check(*id, env).unwrap_or_else(|_| CheckReport {
                    check: id.as_str().to_string(),
                    tau: [env.tau.value().re, env.tau.value().im],
                    seed: env.seed,
                    residual: f64::NAN,
                    threshold: env.threshold_for(*id),
                    pass: false,
                    elapsed_ms: 0,
                })
            })
            .collect()
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| EkError::InvalidConfig(e.to_string()))?;
    let reports = pool.install(work);
    let passed = reports.iter().filter(|r| r.pass).count();
    Ok(SuiteSummary { failed: reports.len() - passed, passed, reports, elapsed_ms: t0.elapsed().as_millis() as u64 })
}

pub fn suite_taus() -> Vec<C64> {
    SUITE_TAUS.iter().map(|(a, b)| C64::new(*a, *b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in CheckId::ALL {
            assert_eq!(id.as_str().parse::<CheckId>().unwrap(), *id);
        }
        assert_eq!(CheckId::ALL.len(), 21);
        assert!(matches!("nope".parse::<CheckId>(), Err(EkError::UnknownCheck(_))));
    }

    #[test]
    fn report_json_shape() {
        let env = Env::new(C64::new(0.0, 1.0), 1).unwrap();
        let r = run_check(CheckId::ZetaId, &env).unwrap();
        assert!(r.pass, "{r:?}");
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        for k in ["check", "tau", "seed", "residual", "threshold", "pass", "elapsed_ms"] {
            assert!(v.get(k).is_some(), "{k}");
        }
        assert_eq!(v["tau"], serde_json::json!([0.0, 1.0]));
    }

    #[test]
    fn deterministic_residuals() {
        let env = Env::new(C64::new(0.5, 1.0), 2).unwrap();
        let a = run_check(CheckId::FuncEq, &env).unwrap();
        let b = run_check(CheckId::FuncEq, &env).unwrap();
        assert_eq!(a.residual.to_bits(), b.residual.to_bits());
    }

    #[test]
    fn invalid_env() {
        let mut env = Env::new(C64::new(0.0, 1.0), 1).unwrap();
        env.r = 0;
        assert!(run_check(CheckId::Quasi, &env).is_err());
        assert!(Env::new(C64::new(0.0, -1.0), 1).is_err());
    }
}

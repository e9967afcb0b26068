//! Seeded check orchestration and JSON reports.

pub mod checks;
pub mod sampler;

use std::fmt;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elliptic::{EllipticContext, MIN_IM_TAU};
use crate::error::{Error, Result};
use crate::ncalgebra::LConvention;
use crate::rmatrix::ThirdTerm;
use checks::{constraints, effective_sizes, run_trial, TrialOutcome, TrialSetup};
pub use sampler::{sample_params, Constraints, HbarSpec, Sampler, RNG_NAME};

pub const SCHEMA: &str = "ellrmx-report/1";
pub const MAX_NM: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
#[value(rename_all = "kebab-case")]
pub enum CheckKind {
    Ybe,
    DybeFelder,
    DybeSlnm,
    Rll,
    Relations,
    Fay,
    SklyaninRep,
    TvReduce,
    BbReduce,
    All,
}

impl CheckKind {
    /// The individual checks `all` expands to, in report order.
    pub const SINGLE: [CheckKind; 9] = [
        CheckKind::Fay,
        CheckKind::Ybe,
        CheckKind::DybeFelder,
        CheckKind::DybeSlnm,
        CheckKind::BbReduce,
        CheckKind::SklyaninRep,
        CheckKind::Relations,
        CheckKind::TvReduce,
        CheckKind::Rll,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Ybe => "ybe",
            CheckKind::DybeFelder => "dybe-felder",
            CheckKind::DybeSlnm => "dybe-slnm",
            CheckKind::Rll => "rll",
            CheckKind::Relations => "relations",
            CheckKind::Fay => "fay",
            CheckKind::SklyaninRep => "sklyanin-rep",
            CheckKind::TvReduce => "tv-reduce",
            CheckKind::BbReduce => "bb-reduce",
            CheckKind::All => "all",
        }
    }

    pub fn default_tol(self) -> f64 {
        match self {
            CheckKind::Fay => 1e-10,
            CheckKind::Ybe | CheckKind::DybeFelder | CheckKind::DybeSlnm | CheckKind::SklyaninRep => 1e-9,
            CheckKind::Rll | CheckKind::Relations | CheckKind::TvReduce => 1e-8,
            CheckKind::BbReduce => 1e-12,
            CheckKind::All => 1e-9,
        }
    }

    fn index(self) -> u64 {
        CheckKind::SINGLE.iter().position(|&k| k == self).map_or(0, |i| i as u64 + 1)
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckConfig {
    pub check: CheckKind,
    pub n: usize,
    pub m: usize,
    pub tau: Complex64,
    pub hbar: HbarSpec,
    pub trials: usize,
    pub seed: u64,
    /// Overrides every per-check default when set.
    pub tol: Option<f64>,
    pub l_exp_factor: bool,
    pub third_term: ThirdTerm,
    pub record_runtime: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            check: CheckKind::All,
            n: 2,
            m: 2,
            tau: Complex64::new(0.3, 0.8),
            hbar: HbarSpec::Random,
            trials: 20,
            seed: 42,
            tol: None,
            l_exp_factor: true,
            third_term: ThirdTerm::Scaled,
            record_runtime: false,
        }
    }
}

impl CheckConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |s: String| Err(Error::InvalidConfig(s));
        if self.n == 0 || self.m == 0 {
            return bad(format!("N = {} and M = {} must be positive", self.n, self.m));
        }
        if self.n * self.m > MAX_NM {
            return bad(format!("N·M = {} exceeds {MAX_NM}", self.n * self.m));
        }
        if !(self.tau.im >= MIN_IM_TAU) || !self.tau.re.is_finite() {
            return bad(format!("Im tau = {} must be at least {MIN_IM_TAU}", self.tau.im));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("tol = {t} must be positive"));
            }
        }
        if self.trials == 0 {
            return bad("trials must be positive".into());
        }
        if let HbarSpec::Fixed(h) = self.hbar {
            if !(h.re.is_finite() && h.im.is_finite()) {
                return bad("hbar must be finite".into());
            }
        }
        Ok(())
    }

    pub fn tol_for(&self, kind: CheckKind) -> f64 {
        self.tol.unwrap_or(kind.default_tol())
    }

    fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            check: self.check,
            n: self.n,
            m: self.m,
            tau: [self.tau.re, self.tau.im],
            hbar: match self.hbar {
                HbarSpec::Random => None,
                HbarSpec::Fixed(h) => Some([h.re, h.im]),
            },
            trials: self.trials,
            seed: self.seed,
            tol: self.tol,
            l_exp_factor: self.l_exp_factor,
            third_term: self.third_term,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub check: CheckKind,
    pub n: usize,
    pub m: usize,
    pub tau: [f64; 2],
    /// `null` when ħ is sampled.
    pub hbar: Option<[f64; 2]>,
    pub trials: usize,
    pub seed: u64,
    pub tol: Option<f64>,
    pub l_exp_factor: bool,
    pub third_term: ThirdTerm,
}

/// Non-finite values are written as `null` and read back as NaN.
mod lossy_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }

    pub mod vec {
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(xs.iter().map(|x| x.is_finite().then_some(*x)))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Ok(Vec::<Option<f64>>::deserialize(d)?
                .into_iter()
                .map(|x| x.unwrap_or(f64::NAN))
                .collect())
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: CheckKind,
    pub n: usize,
    pub m: usize,
    pub tol: f64,
    pub pass: bool,
    #[serde(with = "lossy_f64")]
    pub max_residual: f64,
    #[serde(with = "lossy_f64")]
    pub mean_residual: f64,
    #[serde(with = "lossy_f64::vec")]
    pub per_trial: Vec<f64>,
    /// Relation-space rank of the first trial, for span checks.
    pub rank: Option<usize>,
    pub rejections: usize,
}

impl PartialEq for CheckReport {
    fn eq(&self, other: &Self) -> bool {
        serde_json::to_value(self).ok() == serde_json::to_value(other).ok()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub config: ConfigEcho,
    pub checks: Vec<CheckReport>,
    pub pass: bool,
    #[serde(with = "lossy_f64")]
    pub max_residual: f64,
    pub rank: Option<usize>,
    pub seed: u64,
    pub rng: String,
    pub runtime_ms: Option<u64>,
}

fn nan_max(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter()
        .fold(0.0f64, |a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) })
}

fn run_single(ctx: &EllipticContext, cfg: &CheckConfig, kind: CheckKind) -> Result<CheckReport> {
    let (n, m) = effective_sizes(kind, cfg.n, cfg.m);
    let setup = TrialSetup {
        n,
        m,
        conv: LConvention {
            exp_factor: cfg.l_exp_factor,
        },
        third: cfg.third_term,
    };
    let cons = constraints(kind, n, m);
    let outcomes: Vec<Result<(TrialOutcome, usize)>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut s = Sampler::new(ctx, cfg.seed, kind.index() << 32 | trial, cfg.hbar, &cons);
            match run_trial(ctx, kind, setup, &mut s) {
                Ok(o) => Ok((o, s.rejections())),
                Err(e @ (Error::SamplingFailed(_) | Error::InvalidConfig(_))) => Err(e),
                // any other failure is a failed trial, not a configuration problem
                Err(_) => Ok((
                    TrialOutcome {
                        residual: f64::NAN,
                        rank: None,
                    },
                    s.rejections(),
                )),
            }
        })
        .collect();
    let outcomes: Vec<(TrialOutcome, usize)> = outcomes.into_iter().collect::<Result<_>>()?;
    let per_trial: Vec<f64> = outcomes.iter().map(|(o, _)| o.residual).collect();
    let max_residual = nan_max(per_trial.iter().copied());
    let mean_residual = per_trial.iter().sum::<f64>() / per_trial.len() as f64;
    let tol = cfg.tol_for(kind);
    Ok(CheckReport {
        check: kind,
        n,
        m,
        tol,
        pass: max_residual < tol,
        max_residual,
        mean_residual,
        per_trial,
        rank: outcomes.first().and_then(|(o, _)| o.rank),
        rejections: outcomes.iter().map(|(_, r)| r).sum(),
    })
}

/// Runs the configured check (or every check for `all`). The returned
/// runtime is wall-clock milliseconds; it enters the report only when
/// `record_runtime` is set.
pub fn run_check(cfg: &CheckConfig) -> Result<(Report, u64)> {
    cfg.validate()?;
    let start = Instant::now();
    let ctx = EllipticContext::new(cfg.tau)?;
    let kinds: Vec<CheckKind> = if cfg.check == CheckKind::All {
        CheckKind::SINGLE.to_vec()
    } else {
        vec![cfg.check]
    };
    let checks = kinds
        .into_iter()
        .map(|k| run_single(&ctx, cfg, k))
        .collect::<Result<Vec<_>>>()?;
    let runtime = start.elapsed().as_millis() as u64;
    let report = Report {
        schema: SCHEMA.to_string(),
        config: cfg.echo(),
        pass: checks.iter().all(|c| c.pass),
        max_residual: nan_max(checks.iter().map(|c| c.max_residual)),
        rank: if checks.len() == 1 { checks[0].rank } else { None },
        checks,
        seed: cfg.seed,
        rng: RNG_NAME.to_string(),
        runtime_ms: cfg.record_runtime.then_some(runtime),
    };
    Ok((report, runtime))
}

/// Canonical JSON: keys sorted, shortest round-trip float formatting.
pub fn report_json(report: &Report) -> Result<String> {
    // serde_json's Map is ordered by key unless preserve_order is enabled
    let value = serde_json::to_value(report)?;
    let mut s = serde_json::to_string_pretty(&value)?;
    s.push('\n');
    Ok(s)
}

pub fn emit_report(report: &Report, path: &Path) -> Result<()> {
    std::fs::write(path, report_json(report)?)?;
    Ok(())
}

/// One human-readable line per check.
pub fn summary(report: &Report) -> String {
    let mut out = String::new();
    for c in &report.checks {
        let rank = c.rank.map(|r| format!(" rank={r}")).unwrap_or_default();
        out.push_str(&format!(
            "{:<13} N={} M={} {} max={:.3e} mean={:.3e} tol={:.0e}{rank}\n",
            c.check.name(),
            c.n,
            c.m,
            if c.pass { "PASS" } else { "FAIL" },
            c.max_residual,
            c.mean_residual,
            c.tol
        ));
    }
    out.push_str(if report.pass { "overall PASS\n" } else { "overall FAIL\n" });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(check: CheckKind) -> CheckConfig {
        CheckConfig {
            check,
            trials: 3,
            ..CheckConfig::default()
        }
    }

    #[test]
    fn validation() {
        assert!(cfg(CheckKind::Ybe).validate().is_ok());
        let big = CheckConfig {
            n: 4,
            m: 4,
            ..cfg(CheckKind::All)
        };
        assert!(matches!(run_check(&big), Err(Error::InvalidConfig(_))));
        let low = CheckConfig {
            tau: Complex64::new(0.0, 0.2),
            ..cfg(CheckKind::Ybe)
        };
        assert!(low.validate().is_err());
        let tol = CheckConfig {
            tol: Some(-1.0),
            ..cfg(CheckKind::Ybe)
        };
        assert!(tol.validate().is_err());
    }

    #[test]
    fn ybe_passes_and_is_deterministic() {
        let (a, _) = run_check(&cfg(CheckKind::Ybe)).unwrap();
        let (b, _) = run_check(&cfg(CheckKind::Ybe)).unwrap();
        assert!(a.pass);
        assert_eq!(report_json(&a).unwrap(), report_json(&b).unwrap());
    }

    #[test]
    fn json_round_trip_and_null_for_nan() {
        let (mut r, _) = run_check(&cfg(CheckKind::Fay)).unwrap();
        let back: Report = serde_json::from_str(&report_json(&r).unwrap()).unwrap();
        assert_eq!(back, r);
        r.checks[0].per_trial[0] = f64::NAN;
        let s = report_json(&r).unwrap();
        assert!(s.contains("null"));
        let back: Report = serde_json::from_str(&s).unwrap();
        assert!(back.checks[0].per_trial[0].is_nan());
    }

    #[test]
    fn pass_flag_matches_tolerance() {
        let strict = CheckConfig {
            tol: Some(1e-30),
            ..cfg(CheckKind::Ybe)
        };
        let (r, _) = run_check(&strict).unwrap();
        assert!(!r.pass);
        assert_eq!(r.checks[0].pass, r.checks[0].max_residual < r.checks[0].tol);
    }

    #[test]
    fn keys_sorted() {
        let (r, _) = run_check(&cfg(CheckKind::Fay)).unwrap();
        let s = report_json(&r).unwrap();
        let top: Vec<usize> = ["\"checks\"", "\"config\"", "\"max_residual\"", "\"pass\"", "\"rank\"", "\"rng\"", "\"runtime_ms\"", "\"schema\"", "\"seed\""]
            .iter()
            .map(|k| s.rfind(k).unwrap())
            .collect();
        assert!(top.windows(2).all(|w| w[0] < w[1]), "{top:?}");
        assert!(s.contains(SCHEMA));
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use num_complex::Complex64;

use ellrmx::rmatrix::ThirdTerm;
use ellrmx::verify::{emit_report, run_check, summary, CheckConfig, CheckKind, HbarSpec};

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected re,im but got {s:?}"))?;
    let re: f64 = re.trim().parse().map_err(|e| format!("{re:?}: {e}"))?;
    let im: f64 = im.trim().parse().map_err(|e| format!("{im:?}: {e}"))?;
    Ok(Complex64::new(re, im))
}

fn parse_hbar(s: &str) -> Result<HbarSpec, String> {
    if s == "random" {
        Ok(HbarSpec::Random)
    } else {
        parse_complex(s).map(HbarSpec::Fixed)
    }
}

fn parse_switch(s: &str) -> Result<bool, String> {
    match s {
        "on" => Ok(true),
        "off" => Ok(false),
        _ => Err(format!("expected on or off, got {s:?}")),
    }
}

fn parse_third(s: &str) -> Result<ThirdTerm, String> {
    match s {
        "scaled" => Ok(ThirdTerm::Scaled),
        "unscaled" => Ok(ThirdTerm::Unscaled),
        _ => Err(format!("expected scaled or unscaled, got {s:?}")),
    }
}

/// Numerical checks of elliptic R-matrices and RLL relations.
///
/// Exit status: 0 pass, 1 fail, 2 configuration or sampling error.
#[derive(Parser, Debug)]
#[command(name = "ellrmx", version)]
struct Cli {
    check: CheckKind,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value = "0.3,0.8", value_parser = parse_complex, allow_hyphen_values = true)]
    tau: Complex64,
    #[arg(long, default_value = "random", value_parser = parse_hbar, allow_hyphen_values = true)]
    hbar: HbarSpec,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Overrides the per-check default tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value = "on", value_parser = parse_switch, action = clap::ArgAction::Set)]
    l_exp_factor: bool,
    #[arg(long, default_value = "scaled", value_parser = parse_third)]
    third_term: ThirdTerm,
    /// Write wall-clock runtime into the JSON report (breaks byte identity).
    #[arg(long)]
    record_runtime: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let cfg = CheckConfig {
        check: cli.check,
        n: cli.n,
        m: cli.m,
        tau: cli.tau,
        hbar: cli.hbar,
        trials: cli.trials,
        seed: cli.seed,
        tol: cli.tol,
        l_exp_factor: cli.l_exp_factor,
        third_term: cli.third_term,
        record_runtime: cli.record_runtime,
    };
    let (report, runtime) = match run_check(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    print!("{}", summary(&report));
    println!("runtime {runtime} ms");
    let written = match &cli.out {
        Some(path) => emit_report(&report, path),
        None => Ok(()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

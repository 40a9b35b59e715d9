use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fdsim_cli::spec::{parse_arms, parse_on_off};
use fdsim_cli::{run, write_csv, Diagnostic, ExperimentSpec, DEFAULT_SPEC};

#[derive(Parser)]
#[command(name = "fdsim", version, about = "Full-duplex access point sum-rate experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its CSV.
    Run(RunArgs),
    /// Check a spec file and list every problem.
    Validate(SpecArg),
    /// Print the built-in default spec.
    DefaultSpec,
}

#[derive(Args)]
struct SpecArg {
    /// Spec file; the built-in default when omitted.
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    spec: SpecArg,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated, e.g. mrc_mrt,mrc_zf,hd_ac
    #[arg(long)]
    schemes: Option<String>,
    /// on or off
    #[arg(long)]
    analytic: Option<String>,
}

fn fail(diags: &[Diagnostic]) -> ExitCode {
    for d in diags {
        eprintln!("error: {d}");
    }
    ExitCode::from(2)
}

fn load(arg: &SpecArg) -> Result<ExperimentSpec, Vec<Diagnostic>> {
    let text = match &arg.spec {
        Some(p) => std::fs::read_to_string(p).map_err(|e| {
            vec![Diagnostic { field: "spec".into(), message: format!("{}: {e}", p.display()) }]
        })?,
        None => DEFAULT_SPEC.to_string(),
    };
    ExperimentSpec::parse(&text)
}

fn apply_flags(spec: &mut ExperimentSpec, a: &RunArgs) -> Result<(), Vec<Diagnostic>> {
    if let Some(t) = a.trials {
        spec.trials = t;
    }
    if let Some(s) = a.seed {
        spec.seed = s;
    }
    if let Some(o) = &a.out {
        spec.out = o.clone();
    }
    if let Some(s) = &a.schemes {
        spec.arms = parse_arms(s).map_err(|d| vec![d])?;
    }
    if let Some(s) = &a.analytic {
        spec.analytic = parse_on_off(s)
            .ok_or_else(|| vec![Diagnostic { field: "--analytic".into(), message: "expected on or off".into() }])?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::DefaultSpec => {
            print!("{DEFAULT_SPEC}");
            ExitCode::SUCCESS
        }
        Command::Validate(arg) => {
            let diags = match load(&arg) {
                Ok(spec) => spec.validate(),
                Err(d) => d,
            };
            if diags.is_empty() {
                println!("ok");
                ExitCode::SUCCESS
            } else {
                fail(&diags)
            }
        }
        Command::Run(args) => {
            let mut spec = match load(&args.spec) {
                Ok(s) => s,
                Err(d) => return fail(&d),
            };
            if let Err(d) = apply_flags(&mut spec, &args) {
                return fail(&d);
            }
            let diags = spec.validate();
            if !diags.is_empty() {
                return fail(&diags);
            }
            let rows = match run(&spec) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::FAILURE;
                }
            };
            let written = File::create(&spec.out).and_then(|f| write_csv(&rows, BufWriter::new(f)));
            if let Err(e) = written {
                eprintln!("error: {}: {e}", spec.out.display());
                return ExitCode::FAILURE;
            }
            println!("{:<8} {:<28} {:>10} {:>10} {:>10}", "scheme", "source", "rate_ul", "rate_dl", "rate_sum");
            let cell = |x: Option<f64>| x.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into());
            for r in &rows {
                println!(
                    "{:<8} {:<28} {:>10} {:>10} {:>10}",
                    r.scheme,
                    r.source,
                    cell(r.rate_ul),
                    cell(r.rate_dl),
                    cell(r.rate_sum)
                );
            }
            println!("wrote {} rows to {}", rows.len(), spec.out.display());
            ExitCode::SUCCESS
        }
    }
}

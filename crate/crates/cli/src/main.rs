//! `zdf`: construct, verify and scan coset-index zero-difference functions.

mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zdf_core::{Execution, FamilyId};

use commands::{CliError, Context, Expectations, FamilyParams, EXIT_INVALID};
use output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "zdf",
    version,
    about = "Zero-difference functions from cyclotomic-like cosets of Z_n"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    emit: Format,

    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Largest n for which the direct-counting cross-check (and scan) runs.
    #[arg(long, default_value_t = 4096, global = true, value_parser = clap::value_parser!(u64).range(2..))]
    brute_bound: u64,

    /// Start the primitive-root search at this residue (CRT families).
    #[arg(long, global = true)]
    seed_generator: Option<u64>,

    /// Disable the rayon thread pool.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a family instance: subgroup, cosets and the f_G table.
    Construct(FamilyArgs),
    /// Check a family's predicted (n, m, S), or measure a single (n, e).
    Verify(VerifyArgs),
    /// Per-shift collision counts N(a) for G = <e> in Z_n.
    Spectrum(InstanceArgs),
    /// Every cyclic unit subgroup for every n in a range.
    Scan(ScanArgs),
    /// Regenerate the summary table of all families.
    Table,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    #[arg(long, value_parser = commands::parse_family)]
    family: FamilyId,
    #[command(flatten)]
    params: FamilyParams,
}

#[derive(Debug, Args)]
struct InstanceArgs {
    #[arg(long)]
    n: u64,
    #[arg(long)]
    e: u64,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_parser = commands::parse_family, conflicts_with_all = ["n", "e"])]
    family: Option<FamilyId>,
    #[command(flatten)]
    params: FamilyParams,
    #[arg(long, requires = "e")]
    n: Option<u64>,
    #[arg(long, requires = "n")]
    e: Option<u64>,
    /// Expected image size; a mismatch fails verification.
    #[arg(long)]
    expect_m: Option<u64>,
    /// Expected spectrum values, comma separated.
    #[arg(long, value_delimiter = ',')]
    expect_s: Option<Vec<u64>>,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[arg(long)]
    n_min: u64,
    #[arg(long)]
    n_max: u64,
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let ctx = Context {
        brute_bound: cli.brute_bound,
        seed_generator: cli.seed_generator,
        exec: if cli.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        },
    };
    let out = match &cli.command {
        Command::Construct(a) => commands::construct(&ctx, a.family, &a.params)?,
        Command::Verify(a) => {
            let expect = Expectations {
                m: a.expect_m,
                s: a.expect_s.clone(),
            };
            match (a.family, a.n, a.e) {
                (Some(family), _, _) => {
                    commands::verify_family_cmd(&ctx, family, &a.params, &expect)?
                }
                (None, Some(n), Some(e)) => commands::verify_instance(&ctx, n, e, &expect)?,
                _ => {
                    return Err(CliError::invalid(
                        "verify needs either --family or both --n and --e",
                    ))
                }
            }
        }
        Command::Spectrum(a) => commands::spectrum(&ctx, a.n, a.e)?,
        Command::Scan(a) => commands::scan(&ctx, a.n_min, a.n_max)?,
        Command::Table => commands::table(&ctx)?,
    };

    let rendered = out.render(cli.emit).map_err(CliError::invalid)?;
    let written = match &cli.out {
        Some(path) => std::fs::write(path, rendered.as_bytes())
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout()
            .lock()
            .write_all(rendered.as_bytes())
            .map_err(|e| e.to_string()),
    };
    written.map_err(CliError::invalid)?;
    Ok(out.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(if err.code == 0 {
                EXIT_INVALID
            } else {
                err.code
            })
        }
    }
}

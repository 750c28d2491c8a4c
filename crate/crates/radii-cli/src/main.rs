use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use radii_cli::commands::{
    cmd_coexist, cmd_continue, cmd_diagram, cmd_estimates, cmd_prove_point, cmd_verify, format_report,
};
use radii_cli::config::{Overrides, RunConfig};
use radii_cli::CliError;

#[derive(Parser)]
#[command(name = "radii", version, about = "Validated continuation of Mimura-type steady states")]
struct Cli {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Continue a branch from the seed and certify every segment.
    Continue {
        #[command(flatten)]
        ov: Overrides,
        #[arg(long)]
        out: PathBuf,
    },
    /// Prove a single solution ball at the seed's diffusion.
    ProvePoint {
        #[command(flatten)]
        ov: Overrides,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-run every rigorous check of a certificate.
    Verify { cert: PathBuf },
    /// Export the (d, z(0)) diagram as CSV and SVG.
    Diagram {
        certs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        verify_first: bool,
    },
    /// Count distinct solutions at a fixed diffusion.
    Coexist {
        certs: Vec<PathBuf>,
        #[arg(long = "d-star")]
        d_star: f64,
    },
    /// Tabulate the convolution estimates.
    Estimates {
        #[command(flatten)]
        ov: Overrides,
        #[arg(long = "M")]
        big_m: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn resolve(config: &Option<PathBuf>, ov: &Overrides) -> Result<RunConfig, CliError> {
    let text = config
        .as_ref()
        .map(|p| std::fs::read_to_string(p).map_err(|e| CliError::io(p, e)))
        .transpose()?;
    RunConfig::resolve(text.as_deref(), ov)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Continue { ov, out } => {
            let cfg = resolve(&cli.config, ov)?;
            let s = cmd_continue(&cfg, out)?;
            println!(
                "{} segments verified, d = {}; certificate {}, log {}",
                s.segments,
                s.d_final,
                s.cert.display(),
                s.log.display()
            );
        }
        Command::ProvePoint { ov, out } => {
            let cfg = resolve(&cli.config, ov)?;
            let rec = cmd_prove_point(&cfg, out)?;
            println!("verified: r = {:e}, kappa <= {:e}", rec.r, rec.kappa_hi);
        }
        Command::Verify { cert } => {
            let rep = cmd_verify(cert)?;
            println!("{}: {} records verified", cert.display(), rep.records.len());
        }
        Command::Diagram {
            certs,
            out,
            svg,
            verify_first,
        } => {
            let svg = svg.clone().unwrap_or_else(|| out.with_extension("svg"));
            let rows = cmd_diagram(certs, out, &svg, *verify_first)?;
            println!("{rows} rows written to {}, plot {}", out.display(), svg.display());
        }
        Command::Coexist { certs, d_star } => {
            print!("{}", format_report(&cmd_coexist(certs, *d_star)?));
        }
        Command::Estimates { ov, big_m, out } => {
            let cfg = resolve(&cli.config, ov)?;
            cmd_estimates(&cfg, *big_m, out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("RADII_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("radii: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

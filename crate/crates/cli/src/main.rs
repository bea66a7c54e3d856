use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use xlmimo_core::config::{default_setups, load_scenario, load_setups};
use xlmimo_core::ee::{ee_bandwidth_limit, knee_point};
use xlmimo_core::sweep::{
    parse_values, run_compare, run_sweep_to_file, write_csv, SweepAxis, SweepMode, SweepSpec,
    DEFAULT_KNEE_FRACTION,
};
use xlmimo_core::throughput::chi_scaling;
use xlmimo_core::{Error, ErrorClass, Result};

/// Energy-efficiency sweeps for near-field XL-MIMO and reference systems.
#[derive(Parser)]
#[command(name = "xlmimo", version)]
struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the model along one axis and write CSV plus a manifest.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// bandwidth, antennas, users, tx_power or setup
        #[arg(long)]
        axis: SweepAxis,
        /// `a,b,c`, `lin(start,stop,count)` or `log(start,stop,count)`
        #[arg(long)]
        values: String,
        /// closed_form, monte_carlo or both
        #[arg(long, default_value = "closed_form")]
        mode: SweepMode,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the bandwidth limit, knee point and array-gain scaling.
    Limits {
        #[arg(long)]
        scenario: PathBuf,
    },
    /// Compare setups over a transmit-density grid.
    Compare {
        /// Setups file; omitted or empty means the three reference setups.
        #[arg(long)]
        setups: Option<PathBuf>,
        #[arg(long)]
        pgrid: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(4);
        }
    };
    match pool.install(|| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Config => 2,
                ErrorClass::Numeric => 3,
                ErrorClass::Io => 4,
            })
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Sweep { scenario, axis, values, mode, trials, seed, out } => {
            let scenario = load_scenario(&scenario)?;
            let spec = SweepSpec { axis, values: parse_values(&values)?, mode, trials, master_seed: seed };
            let manifest = run_sweep_to_file(&scenario, &spec, &out)?;
            eprintln!("wrote {} rows to {}", manifest.rows, out.display());
            Ok(())
        }
        Command::Limits { scenario } => limits(&scenario),
        Command::Compare { setups, pgrid, out } => {
            let setups = match setups {
                Some(path) => load_setups(&path)?,
                None => default_setups(),
            };
            let grid = parse_values(&pgrid)?;
            if grid.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::Invalid("pgrid values must be strictly increasing".into()));
            }
            let rows = run_compare(&setups, &grid)?;
            write_csv(&rows, BufWriter::new(File::create(&out)?))?;
            eprintln!("wrote {} rows to {}", rows.len(), out.display());
            Ok(())
        }
    }
}

fn limits(path: &Path) -> Result<()> {
    let s = load_scenario(path)?;
    let mut out = std::io::stdout().lock();
    let scaling = chi_scaling(s.spacing(), &s.cell)?;
    writeln!(out, "family = {}", s.family)?;
    match ee_bandwidth_limit(&s) {
        Ok(v) => writeln!(out, "ee_bandwidth_limit_bits_per_joule = {v:e}")?,
        Err(e) => writeln!(out, "ee_bandwidth_limit_bits_per_joule = unavailable ({e})")?,
    }
    match knee_point(&s, DEFAULT_KNEE_FRACTION) {
        Ok(k) => {
            writeln!(out, "knee_point_antennas = {:.1}", k.antennas)?;
            writeln!(out, "knee_point_snr = {:e}", k.snr_at_knee)?;
            if !k.in_low_power_regime() {
                writeln!(out, "warning: knee point lies outside the low-power regime")?;
            }
        }
        Err(e) => writeln!(out, "knee_point_antennas = unavailable ({e})")?,
    }
    writeln!(out, "chi_linear_coefficient = {:e}", scaling.linear_coefficient)?;
    writeln!(out, "chi_saturation_limit = {:e}", scaling.saturation_limit)?;
    Ok(())
}

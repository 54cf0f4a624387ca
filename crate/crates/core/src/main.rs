use clap::{Parser, Subcommand, ValueEnum};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use stored_light::config::{parse_angle, parse_config, parse_theta_list, protocol_config, Scale};
use stored_light::output::{fmt_g17, write_meta, write_run_csv, write_summary_csv};
use stored_light::polariton::{dark_polariton_3, dark_polariton_4, mixing_matrix, polariton_velocity};
use stored_light::scenario::{overlap_config, run_overlap_scenario, run_storage_cycle, sweep_pulse_area};
use stored_light::{Error, Result, SimulationConfig, Variant, C64};

#[derive(Parser)]
#[command(name = "stored-light", version, about = "Store, rotate and release light in four-level media")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Case {
    A,
    B,
}

impl From<Case> for Variant {
    fn from(c: Case) -> Self {
        match c {
            Case::A => Variant::CaseA,
            Case::B => Variant::CaseB,
        }
    }
}

#[derive(clap::Args)]
struct RunArgs {
    /// Configuration file (`key = value` lines) applied over the preset
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    case: Case,
    /// Use the model parameters as given instead of the tenfold reduced preset
    #[arg(long)]
    full_scale: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// One storage cycle
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Control-4 pulse area, e.g. `pi/2` or `0.7`
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        theta: String,
        /// Overlap control 4 with the release (case a)
        #[arg(long)]
        overlap: bool,
    },
    /// One storage cycle per pulse area
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Comma separated pulse areas, e.g. `0,pi/6,pi/4,pi`
        #[arg(long, allow_hyphen_values = true)]
        thetas: String,
    },
    /// Closed-form polariton quantities as a CSV row
    Analytics {
        #[arg(long, value_enum)]
        quantity: Quantity,
        #[arg(long, value_enum, default_value = "b")]
        case: Case,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        theta: String,
        /// Control amplitude eps2 (a.u.); defaults to the preset maximum
        #[arg(long)]
        eps2: Option<f64>,
        /// Atom density (a.u.)
        #[arg(long)]
        density: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        eps1: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        eps3: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        sigma_bc: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        sigma_dc: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Quantity {
    Velocity,
    Mixing,
    Polariton,
}

fn base_config(args: &RunArgs) -> Result<SimulationConfig> {
    let scale = if args.full_scale { Scale::Full } else { Scale::Desk };
    let base = protocol_config(args.case.into(), scale);
    match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            parse_config(&text, base)
        }
        None => Ok(base),
    }
}

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn simulate(run: &RunArgs, theta: &str, overlap: bool) -> Result<()> {
    let base = base_config(run)?;
    let cfg = if overlap {
        overlap_config(&base)?
    } else {
        base.with_pulse_area(parse_angle(theta)?, 0.0)?
    };
    prepare_out(&run.out)?;
    let result = if overlap {
        run_overlap_scenario(&cfg)?
    } else {
        run_storage_cycle(&cfg)?
    };
    write_run_csv(&run.out.join("run.csv"), &result)?;
    write_summary_csv(&run.out.join("summary.csv"), std::slice::from_ref(&result))?;
    write_meta(
        &run.out.join("run.meta"),
        &cfg,
        &[("theta", fmt_g17(result.theta)), ("overlap", overlap.to_string())],
    )?;
    eprintln!(
        "theta={:.6} E1={:e} E3={:e} peak1={:e} peak3={:e}",
        result.theta, result.released_energy_1, result.released_energy_3, result.peak_amp_1, result.peak_amp_3
    );
    Ok(())
}

fn sweep(run: &RunArgs, thetas: &str) -> Result<()> {
    let cfg = base_config(run)?;
    let thetas = parse_theta_list(thetas)?;
    prepare_out(&run.out)?;
    let results = sweep_pulse_area(&cfg, &thetas)?;
    for (k, r) in results.iter().enumerate() {
        write_run_csv(&run.out.join(format!("run_{k:03}.csv")), r)?;
    }
    write_summary_csv(&run.out.join("summary.csv"), &results)?;
    let list = thetas.iter().map(|t| fmt_g17(*t)).collect::<Vec<_>>().join(";");
    write_meta(&run.out.join("run.meta"), &cfg, &[("thetas", list)])?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn analytics(
    quantity: Quantity,
    case: Case,
    theta: &str,
    eps2: Option<f64>,
    density: Option<f64>,
    eps1: f64,
    eps3: f64,
    sigma_bc: f64,
    sigma_dc: f64,
) -> Result<()> {
    let cfg = protocol_config(case.into(), Scale::Full);
    let theta = parse_angle(theta)?;
    let n = density.unwrap_or(cfg.density);
    let eps2 = eps2.unwrap_or(cfg.schedule.control2.eps2_max);
    let s = &cfg.scheme;
    let omega2 = s.omega2_rabi(eps2);
    match quantity {
        Quantity::Velocity => {
            let v = polariton_velocity(theta, omega2, n, s);
            println!("theta,omega2,density,velocity");
            println!("{},{},{},{}", fmt_g17(theta), fmt_g17(omega2), fmt_g17(n), fmt_g17(v));
        }
        Quantity::Mixing => {
            let m = mixing_matrix(theta, n, s)?;
            println!("theta,m11,m13,m31,m33");
            println!(
                "{},{},{},{},{}",
                fmt_g17(theta),
                fmt_g17(m.m11),
                fmt_g17(m.m13),
                fmt_g17(m.m31),
                fmt_g17(m.m33)
            );
        }
        Quantity::Polariton => {
            let c = |x: f64| C64::new(x, 0.0);
            let p = match s.variant {
                Variant::CaseA => dark_polariton_3(c(eps1), c(sigma_bc), omega2, n, s)?,
                Variant::CaseB => dark_polariton_4(c(eps1), c(eps3), c(sigma_bc), c(sigma_dc), theta, omega2, n, s)?,
            };
            println!("theta,omega2,re_psi,im_psi");
            println!("{},{},{},{}", fmt_g17(theta), fmt_g17(omega2), fmt_g17(p.re), fmt_g17(p.im));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.command {
        Command::Simulate { run, theta, overlap } => simulate(run, theta, *overlap),
        Command::Sweep { run, thetas } => sweep(run, thetas),
        Command::Analytics {
            quantity,
            case,
            theta,
            eps2,
            density,
            eps1,
            eps3,
            sigma_bc,
            sigma_dc,
        } => analytics(*quantity, *case, theta, *eps2, *density, *eps1, *eps3, *sigma_bc, *sigma_dc),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

mod config;
mod verify;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use bergman::eigenspace::{cs_overlap_abs2, kernel_closed, Eigenspace};
use bergman::geometry::bergman_distance;
use bergman::spectral::{constant_audit, format_sig17, symbol_sweep, SymbolSample, CSV_HEADER};
use clap::{Parser, Subcommand};

use config::{parse_point, Failure, GridArgs, Mode, RunConfig, SpaceArgs};

/// Generalized Bergman spaces on the unit ball: verification and tabulation.
///
/// The λ sweep runs on a thread pool sized by RAYON_NUM_THREADS; output does
/// not depend on it.
#[derive(Parser, Debug)]
#[command(name = "bergman", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the verification suites for one space
    Verify {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Mode::Audited)]
        mode: Mode,
        /// Write the report here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Tabulate the Berezin symbol over a λ grid as CSV
    Symbol {
        #[command(flatten)]
        space: SpaceArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Mode::Audited)]
        mode: Mode,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Compare the reproducing kernel at two points
    Kernel {
        #[command(flatten)]
        space: SpaceArgs,
        /// Comma-separated complex coordinates, e.g. 0.3+0.1i,0
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        #[arg(long, default_value_t = 40)]
        p_max: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Print the Gram matrix of the basis up to degree p_max
    Basis {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value_t = 3)]
        p_max: usize,
    },
    /// Print the constant audit report
    Audit {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.5,1,2,5")]
        lambdas: Vec<f64>,
    },
}

fn emit(text: &str, output: &Option<PathBuf>) -> Result<(), Failure> {
    match output {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn cmd_verify(cfg: &RunConfig) -> Result<(), Failure> {
    let report = verify::run(cfg);
    emit(&report.render(cfg), &cfg.output)?;
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.lines.iter().filter(|l| l.outcome.is_err()).map(|l| l.name).collect();
        Err(Failure::Check(format!("failing checks: {}", failed.join(", "))))
    }
}

fn cmd_symbol(cfg: &RunConfig) -> Result<(), Failure> {
    let audit = constant_audit(&cfg.params, &[0.5, 1.0, 2.0, 5.0])?;
    let rows = symbol_sweep(&cfg.params, &cfg.grid, cfg.mode, audit.fitted_scale);
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    let mut failures = 0;
    for (row, &l) in rows.iter().zip(&cfg.grid) {
        match row {
            Ok(s) => text.push_str(&s.csv_row()),
            Err(_) => {
                failures += 1;
                text.push_str(&SymbolSample::failed_row(l, audit.fitted_scale));
            }
        }
        text.push('\n');
    }
    emit(&text, &cfg.output)?;
    if failures > 0 {
        return Err(Failure::Check(format!("{failures} λ values failed to evaluate")));
    }
    Ok(())
}

fn cmd_kernel(space: &SpaceArgs, z: &str, w: &str, p_max: usize, tol: f64) -> Result<(), Failure> {
    let params = space.params()?;
    let z = parse_point(z, params.n())?;
    let w = parse_point(w, params.n())?;
    let closed = kernel_closed(&params, &z, &w);
    let mut out = String::new();
    out.push_str(&format!("kernel_closed {} {}\n", format_sig17(closed.re), format_sig17(closed.im)));
    let mut ok = true;
    if z.norm_sq() <= 0.64 && w.norm_sq() <= 0.64 {
        let eig = Eigenspace::new(params.clone(), p_max)?;
        let t = eig.kernel_truncated(&z, &w, p_max)?;
        let gap = (t.value - closed).norm();
        ok = gap <= tol.max(10.0 * t.tail_estimate);
        out.push_str(&format!("kernel_truncated {} {} p_max={p_max}\n", format_sig17(t.value.re), format_sig17(t.value.im)));
        out.push_str(&format!("truncation_gap {}\n", format_sig17(gap)));
    } else {
        out.push_str("kernel_truncated unavailable (needs |z|, |w| <= 0.8)\n");
    }
    out.push_str(&format!("cs_overlap_abs2 {}\n", format_sig17(cs_overlap_abs2(&params, &z, &w))));
    out.push_str(&format!("bergman_distance {}\n", format_sig17(bergman_distance(&z, &w)?)));
    emit(&out, &None)?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Check("truncated kernel misses the closed form".into()))
    }
}

fn cmd_basis(space: &SpaceArgs, p_max: usize) -> Result<(), Failure> {
    let params = space.params()?;
    let eig = Eigenspace::new(params, p_max)?;
    let (idx, g) = eig.gram(p_max)?;
    let mut out = String::from("index p q j\n");
    for (k, i) in idx.iter().enumerate() {
        out.push_str(&format!("{k} {} {} {}\n", i.p, i.q, i.j));
    }
    for row in &g {
        let cells: Vec<String> = row.iter().map(|v| format_sig17(*v)).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    for r in eig.kappa_records() {
        if r.literal != r.used {
            out.push_str(&format!("renormalized p={} q={} deviation {:.3e}\n", r.p, r.q, r.norm_deviation));
        }
    }
    emit(&out, &None)
}

fn cmd_audit(space: &SpaceArgs, lambdas: &[f64]) -> Result<(), Failure> {
    let report = constant_audit(&space.params()?, lambdas)?;
    emit(&format!("{report}\n"), &None)?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check("audited residual above tolerance".into()))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Verify { space, grid, tol, mode, output } => cmd_verify(&RunConfig::new(&space, &grid, tol, output, mode)?),
        Command::Symbol { space, grid, tol, mode, output } => cmd_symbol(&RunConfig::new(&space, &grid, tol, output, mode)?),
        Command::Kernel { space, z, w, p_max, tol } => cmd_kernel(&space, &z, &w, p_max, tol),
        Command::Basis { space, p_max } => cmd_basis(&space, p_max),
        Command::Audit { space, lambdas } => cmd_audit(&space, &lambdas),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Check(m) => eprintln!("check failed: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}

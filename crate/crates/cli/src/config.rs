use std::path::PathBuf;
use std::str::FromStr;

use bergman::geometry::BallPoint;
use bergman::spectral::ConstantMode;
use bergman::SpaceParams;
use clap::{Args, ValueEnum};
use num_complex::Complex64;

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or inadmissible parameters (exit 2).
    Usage(String),
    /// A check or evaluation failed (exit 1).
    Check(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Check(_) => 1,
        }
    }
}

impl From<bergman::Error> for Failure {
    fn from(e: bergman::Error) -> Self {
        match e {
            bergman::Error::Admissibility(_) | bergman::Error::Parameter(_) => Failure::Usage(e.to_string()),
            other => Failure::Check(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Check(format!("I/O: {e}"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Audited,
    LiteralConstants,
}

impl From<Mode> for ConstantMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Audited => ConstantMode::Audited,
            Mode::LiteralConstants => ConstantMode::Literal,
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct SpaceArgs {
    /// Complex dimension of the ball
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Magnetic field strength ν
    #[arg(long, default_value_t = 3.5)]
    pub nu: f64,
    /// Landau level
    #[arg(long, default_value_t = 1)]
    pub m: usize,
}

impl SpaceArgs {
    pub fn params(&self) -> Result<SpaceParams, Failure> {
        Ok(SpaceParams::new(self.n, self.nu, self.m)?)
    }
}

#[derive(Args, Clone, Debug)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.5)]
    pub start: f64,
    #[arg(long, default_value_t = 5.0)]
    pub stop: f64,
    #[arg(long, default_value_t = 0.5)]
    pub step: f64,
}

impl GridArgs {
    /// start, start + step, … up to stop inclusive.
    pub fn grid(&self) -> Result<Vec<f64>, Failure> {
        if !(self.step > 0.0) || !self.start.is_finite() || !self.stop.is_finite() || self.stop < self.start {
            return Err(Failure::Usage(format!(
                "empty λ grid: start {} stop {} step {}",
                self.start, self.stop, self.step
            )));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        if count > 100_000 {
            return Err(Failure::Usage(format!("λ grid of {count} points is too large")));
        }
        Ok((0..count).map(|i| self.start + i as f64 * self.step).collect())
    }
}

/// Everything one subcommand run needs.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub params: SpaceParams,
    pub grid: Vec<f64>,
    pub tol: f64,
    pub output: Option<PathBuf>,
    pub mode: ConstantMode,
}

impl RunConfig {
    pub fn new(space: &SpaceArgs, grid: &GridArgs, tol: f64, output: Option<PathBuf>, mode: Mode) -> Result<Self, Failure> {
        if !(tol > 0.0) {
            return Err(Failure::Usage(format!("tolerance {tol} must be positive")));
        }
        Ok(Self { params: space.params()?, grid: grid.grid()?, tol, output, mode: mode.into() })
    }
}

/// Parses "a,b,…" where each entry is a complex number such as 0.3, -0.1i
/// or 0.2+0.4i.
pub fn parse_point(text: &str, n: usize) -> Result<BallPoint, Failure> {
    let coords = text
        .split(',')
        .map(|t| Complex64::from_str(t.trim()).map_err(|_| Failure::Usage(format!("cannot parse '{t}' as a complex number"))))
        .collect::<Result<Vec<_>, _>>()?;
    if coords.len() != n {
        return Err(Failure::Usage(format!("point '{text}' has {} coordinates, expected {n}", coords.len())));
    }
    BallPoint::new(coords).map_err(|e| Failure::Usage(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_inclusive() {
        let g = GridArgs { start: 0.5, stop: 5.0, step: 0.5 }.grid().unwrap();
        assert_eq!(g.len(), 10);
        assert_eq!(g[9], 5.0);
        assert!(GridArgs { start: 1.0, stop: 0.0, step: 0.5 }.grid().is_err());
    }

    #[test]
    fn points_parse() {
        let p = parse_point("0.3+0.1i, -0.2i", 2).unwrap();
        assert_eq!(p.coords()[1], Complex64::new(0.0, -0.2));
        assert!(parse_point("0.3", 2).is_err());
        assert!(parse_point("0.9,0.9", 2).is_err());
    }
}

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use revlink_core::linking::{EquatorOrientation, GeodesicType};
use revlink_core::SurfaceSpec;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "revlink", version, about = "Left-handedness and lifted linking for geodesic flows on spheres of revolution")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalArgs {
    /// Relative quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,

    /// Margin below 2π required for a left-handed verdict.
    #[arg(long = "verdict-tol", global = true, default_value_t = 1e-6)]
    pub verdict_tol: f64,

    /// Number of Clairaut levels scanned.
    #[arg(long, global = true, default_value_t = 512)]
    pub grid: usize,

    /// Worker threads; defaults to one per core. Never changes the output.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    #[serde(skip)]
    pub workers: Option<u64>,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    #[serde(skip)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide left-handedness of one surface.
    Analyze {
        #[arg(long, value_parser = parse_surface)]
        surface: SurfaceSpec,
    },
    /// `analyze` on the δ-pinched sphere.
    Sdelta {
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Verdicts along a family of ellipsoids.
    Sweep {
        /// `b=lo..hi:step=s`, `b=lo..hi:s` or `b=value`.
        #[arg(long)]
        range: BRange,
    },
    /// Axis ratio where ellipsoids stop being left-handed.
    CriticalB {
        /// Width of the final bisection bracket.
        #[arg(long = "b-tol", default_value_t = 1e-4)]
        b_tol: f64,
    },
    /// Closed-form lifted linking numbers.
    Link {
        /// `plus` or `minus`; may be given twice.
        #[arg(long, value_parser = parse_equator)]
        equator: Vec<EquatorOrientation>,
        /// Geodesic type `p,q`; may be given twice.
        #[arg(long = "type", value_parser = parse_type, allow_hyphen_values = true)]
        types: Vec<GeodesicType>,
        /// Which of two geodesics lies on the torus closer to the equator.
        #[arg(long, value_enum)]
        outer: Option<Outer>,
        /// Resolve `--outer` from the Clairaut levels on this surface.
        #[arg(long, value_parser = parse_surface)]
        surface: Option<SurfaceSpec>,
    },
    /// Compare closed forms against the diagram pipeline.
    Oracle {
        #[arg(long, value_parser = parse_surface, required_unless_present = "diagram")]
        surface: Option<SurfaceSpec>,
        #[arg(long = "max-p", default_value_t = 6)]
        max_p: i64,
        #[arg(long = "max-q", default_value_t = 3)]
        max_q: i64,
        /// Vertices per half swing in sampled diagrams.
        #[arg(long = "pts-per-swing", default_value_t = 96)]
        pts_per_swing: usize,
        /// Check one diagram file against the closed form for `--type`.
        #[arg(long, requires = "diagram_type")]
        diagram: Option<PathBuf>,
        #[arg(long = "type", id = "diagram_type", value_parser = parse_type, allow_hyphen_values = true)]
        diagram_type: Option<GeodesicType>,
        /// Equator the diagram is linked with.
        #[arg(long, value_parser = parse_equator, default_value = "plus")]
        equator: EquatorOrientation,
    },
    /// Dump a geodesic trajectory launched from the equator.
    Trace {
        #[arg(long, value_parser = parse_surface)]
        surface: SurfaceSpec,
        /// Clairaut level, |c| below the equator radius.
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long = "t-max", default_value_t = 20.0)]
        t_max: f64,
        #[arg(long, default_value_t = 0.05)]
        stride: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        u0: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Outer {
    First,
    Second,
}

/// Typeset minus signs are accepted wherever a number is.
fn ascii_minus(text: &str) -> String {
    text.replace('\u{2212}', "-")
}

fn parse_surface(text: &str) -> Result<SurfaceSpec, String> {
    text.parse().map_err(|e: revlink_core::Error| e.to_string())
}

fn parse_type(text: &str) -> Result<GeodesicType, String> {
    ascii_minus(text).parse().map_err(|e: revlink_core::Error| e.to_string())
}

fn parse_equator(text: &str) -> Result<EquatorOrientation, String> {
    text.parse().map_err(|e: revlink_core::Error| e.to_string())
}

/// Equally spaced axis ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct BRange {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl BRange {
    pub fn values(&self) -> Vec<f64> {
        if self.step == 0.0 {
            return vec![self.lo];
        }
        let n = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.lo + self.step * k as f64).collect()
    }
}

impl FromStr for BRange {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, String> {
        let bad = || format!("malformed range `{text}`; expected b=lo..hi:step=s");
        let num = |t: &str| -> Result<f64, String> { t.trim().parse::<f64>().map_err(|_| bad()).and_then(|x| if x.is_finite() { Ok(x) } else { Err(bad()) }) };
        let body = text.trim().strip_prefix("b=").ok_or_else(bad)?;
        let Some((lo, rest)) = body.split_once("..") else {
            let b = num(body)?;
            return Ok(BRange { lo: b, hi: b, step: 0.0 });
        };
        let (hi, step) = rest.split_once(':').ok_or_else(bad)?;
        let step = step.trim();
        let step = num(step.strip_prefix("step=").unwrap_or(step))?;
        let range = BRange { lo: num(lo)?, hi: num(hi)?, step };
        if !(range.step > 0.0) || range.hi < range.lo {
            return Err(bad());
        }
        Ok(range)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_forms() {
        let r: BRange = "b=1.0..3.0:0.5".parse().unwrap();
        assert_eq!(r.values(), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        let r: BRange = "b=1..2:step=0.25".parse().unwrap();
        assert_eq!(r.values().len(), 5);
        let r: BRange = "b=1".parse().unwrap();
        assert_eq!(r.values(), vec![1.0]);
        for bad in ["b=1..", "1..2:0.5", "b=2..1:0.5", "b=1..2:0", "b=1..2:-1", "b=x"] {
            assert!(bad.parse::<BRange>().is_err(), "{bad}");
        }
    }

    #[test]
    fn typeset_minus_in_types() {
        assert_eq!(parse_type("\u{2212}2,1").unwrap(), GeodesicType::new(-2, 1).unwrap());
    }
}

use std::fmt::Write;
use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;

use csl_core::analytic::{joint_pdf_delta_omega, Var};
use csl_core::engine::sig10;
use csl_core::BallConfig;

use crate::common::ball;
use crate::failure::{CmdResult, Failure};
use crate::manifest::Outputs;

/// Offset from 0 and 1 at which endpoint values are evaluated.
const EDGE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PdfVar {
    H,
    R,
    Delta,
    Omega,
    Sigma,
    #[value(name = "delta_c")]
    DeltaC,
    /// Joint density of (delta, omega).
    Joint,
}

impl PdfVar {
    fn var(self) -> Option<Var> {
        Some(match self {
            PdfVar::H => Var::H,
            PdfVar::R => Var::R,
            PdfVar::Delta => Var::Delta,
            PdfVar::Omega => Var::Omega,
            PdfVar::Sigma => Var::Sigma,
            PdfVar::DeltaC => Var::DeltaC,
            PdfVar::Joint => return None,
        })
    }

    fn name(self) -> &'static str {
        self.var().map_or("joint", Var::name)
    }
}

#[derive(Debug, clap::Args, Serialize)]
pub struct Args {
    #[arg(long = "var", value_enum)]
    pub var: PdfVar,
    #[arg(short = 'd')]
    pub d: usize,
    #[arg(short = 'n')]
    pub n: usize,
    /// Grid points on [0, 1] (per axis for the joint density); default 2001, or 201 for joint.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Write pdf_<var>.csv and a manifest here instead of printing to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Density on `points` equally spaced points of [0, 1] as CSV `x,density`.
/// Endpoint values are one-sided limits, approximated just inside.
pub fn tabulate(var: Var, cfg: BallConfig, points: usize) -> csl_core::Result<String> {
    let mut s = String::from("x,density\n");
    for i in 0..points {
        let x = i as f64 / (points - 1) as f64;
        let y = var.pdf(x.clamp(EDGE, 1.0 - EDGE), cfg)?;
        let _ = writeln!(s, "{},{}", sig10(x), sig10(y));
    }
    Ok(s)
}

/// Joint density of (delta, omega) on a square grid as CSV `x,y,density`.
pub fn tabulate_joint(cfg: BallConfig, points: usize) -> String {
    let mut s = String::from("x,y,density\n");
    for i in 0..points {
        let x = i as f64 / (points - 1) as f64;
        for j in 0..points {
            let y = j as f64 / (points - 1) as f64;
            let _ = writeln!(
                s,
                "{},{},{}",
                sig10(x),
                sig10(y),
                sig10(joint_pdf_delta_omega(x, y, cfg))
            );
        }
    }
    s
}

pub fn run(args: Args, argv: &[String]) -> CmdResult {
    let cfg = ball(args.d, args.n)?;
    let points = args
        .grid
        .unwrap_or(if args.var == PdfVar::Joint { 201 } else { 2001 });
    if points < 2 {
        return Err(Failure::usage("--grid must be at least 2"));
    }
    let csv = match args.var.var() {
        Some(v) => {
            if !v.defined_for(cfg) {
                return Err(Failure::usage(format!(
                    "{} has no density for {cfg}: the flat fills the ball",
                    v.name()
                )));
            }
            tabulate(v, cfg, points)?
        }
        None => tabulate_joint(cfg, points),
    };
    match &args.out {
        Some(dir) => {
            let mut out = Outputs::create(dir, argv, "pdf", &args, None)?;
            out.write(&format!("pdf_{}.csv", args.var.name()), &csv)?;
            out.finish()?;
        }
        None => print!("{csv}"),
    }
    Ok(())
}

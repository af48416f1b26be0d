//! Command-line grammar and the validated run configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use derham_core::geometry::parse_polygon_vertices;
use derham_core::spaces::{family_count, Shape};
use derham_core::{make_polygon, ElementKind};

#[derive(Parser, Debug)]
#[command(name = "derham", version, about = "Build and verify finite element de Rham sequences in exact arithmetic")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Exactness, compatibility, enrichment properties, M-index and commuting diagrams.
    Verify(Args),
    /// Slot dimensions, enrichment dimensions and M-index per family and degree.
    Table(Args),
    /// Writes every slot basis and the enrichment spaces of one sequence.
    Basis(Args),
}

#[derive(clap::Args, Debug, Clone)]
pub struct Args {
    /// interval, triangle, square, polygon, tet, cube, prism or pyramid; all when omitted.
    #[arg(long, value_parser = parse_element)]
    pub element: Option<ElementKind>,
    /// Family number; all families of the element when omitted.
    #[arg(long)]
    pub family: Option<u8>,
    /// Degree `k` or inclusive range `a..b`; defaults to 0..2.
    #[arg(long)]
    pub k: Option<KRange>,
    /// Polygon vertex file: one `x y` per line, rationals `p/q`, counter-clockwise.
    #[arg(long)]
    pub polygon_vertices: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub report: ReportFormat,
    /// Seed for the random inputs of the commuting-diagram checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the output here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_element(s: &str) -> Result<ElementKind, String> {
    ElementKind::from_name(s).ok_or_else(|| {
        let names: Vec<&str> = ElementKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown element `{}` (expected one of {})", s, names.join(", "))
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

/// Inclusive degree range; a single `k` is `k..k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KRange {
    pub lo: u32,
    pub hi: u32,
}

impl KRange {
    pub fn single(k: u32) -> KRange {
        KRange { lo: k, hi: k }
    }

    pub fn iter(self) -> impl Iterator<Item = u32> {
        self.lo..=self.hi
    }
}

impl FromStr for KRange {
    type Err = String;

    fn from_str(s: &str) -> Result<KRange, String> {
        let num = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("`{}` is not a non-negative integer", t));
        let r = match s.split_once("..") {
            Some((a, b)) => KRange { lo: num(a)?, hi: num(b)? },
            None => KRange::single(num(s)?),
        };
        if r.lo > r.hi {
            return Err(format!("empty range {}", s));
        }
        Ok(r)
    }
}

impl fmt::Display for KRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..{}", self.lo, self.hi)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Verify,
    Table,
    Basis,
}

/// One (element, family, k) job.
#[derive(Clone, Debug)]
pub struct Job {
    pub shape: Shape,
    pub family: u8,
    pub k: u32,
}

/// A validated configuration: every job exists.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: CommandKind,
    pub jobs: Vec<Job>,
    pub report: ReportFormat,
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Worker threads; `None` leaves the choice to the pool.
    pub threads: Option<usize>,
}

/// Environment variable capping the number of parallel jobs.
pub const JOBS_ENV: &str = "DERHAM_JOBS";

impl RunConfig {
    /// Validates `args` and expands them into jobs. `jobs_env` is the value
    /// of [`JOBS_ENV`], if set.
    pub fn new(command: CommandKind, args: &Args, jobs_env: Option<&str>) -> Result<RunConfig> {
        let polygon = match &args.polygon_vertices {
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
                let pts = parse_polygon_vertices(&text)?;
                Some(make_polygon(&pts).with_context(|| format!("polygon in {}", p.display()))?)
            }
            None => None,
        };
        let kinds: Vec<ElementKind> = match args.element {
            Some(ElementKind::Polygon) if polygon.is_none() => bail!("--element polygon needs --polygon-vertices"),
            Some(k) => vec![k],
            None => ElementKind::ALL.into_iter().filter(|&k| k != ElementKind::Polygon || polygon.is_some()).collect(),
        };
        if command == CommandKind::Basis {
            if args.element.is_none() || args.family.is_none() {
                bail!("basis needs --element and --family");
            }
            if let Some(r) = args.k {
                if r.lo != r.hi {
                    bail!("basis takes a single --k");
                }
            }
        }
        let range = args.k.unwrap_or(if command == CommandKind::Basis { KRange::single(0) } else { KRange { lo: 0, hi: 2 } });
        let mut jobs = Vec::new();
        for kind in kinds {
            let shape = match kind {
                ElementKind::Polygon => Shape::Polygon(polygon.clone().unwrap()),
                _ => Shape::reference(kind)?,
            };
            let count = family_count(kind);
            let families: Vec<u8> = match args.family {
                Some(f) if (1..=count).contains(&f) => vec![f],
                Some(f) if args.element.is_some() => bail!("{} has families 1..{}, not {}", kind, count, f),
                Some(_) => continue,
                None => (1..=count).collect(),
            };
            for family in families {
                for k in range.iter() {
                    jobs.push(Job { shape: shape.clone(), family, k });
                }
            }
        }
        if jobs.is_empty() {
            bail!("no element has family {}", args.family.unwrap_or(0));
        }
        let threads = match jobs_env {
            None => None,
            Some(s) => match s.trim().parse::<usize>() {
                Ok(n) if n > 0 => Some(n),
                _ => bail!("{} must be a positive integer, got `{}`", JOBS_ENV, s),
            },
        };
        Ok(RunConfig { command, jobs, report: args.report, seed: args.seed, out: args.out.clone(), threads })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!("3".parse::<KRange>().unwrap(), KRange::single(3));
        assert_eq!("0..2".parse::<KRange>().unwrap(), KRange { lo: 0, hi: 2 });
        assert!("2..1".parse::<KRange>().is_err());
        assert!("-1".parse::<KRange>().is_err());
        assert_eq!(KRange { lo: 0, hi: 2 }.iter().count(), 3);
    }
}

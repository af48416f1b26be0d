//! The three subcommands. Jobs run in parallel; output is assembled in job
//! order, so it does not depend on scheduling.

use std::fmt::Write;

use anyhow::{Context, Result};
use derham_core::interp::Interpolators;
use derham_core::spaces::{build_sequence, SequenceSpec, Shape};
use derham_core::verify::verify_build;
use derham_core::{ElementKind, Field, Polynomial, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{CommandKind, Job, ReportFormat, RunConfig};
use crate::report::{render_table, render_text, Report};

/// Exit code when every verdict passes.
pub const EXIT_PASS: i32 = 0;
/// Exit code when some verdict fails.
pub const EXIT_FAIL: i32 = 1;
/// Exit code for usage and I/O errors.
pub const EXIT_USAGE: i32 = 2;

/// Random inputs per commuting identity in `verify`.
pub const COMMUTING_INPUTS: usize = 3;

/// Polynomial of total degree `deg` in `nvars` variables with small random
/// rational coefficients.
pub fn random_polynomial(rng: &mut impl Rng, nvars: usize, deg: u32) -> Polynomial {
    let mut p = Polynomial::zero(nvars);
    for m in derham_core::spaces::total_degree(nvars, deg) {
        let c = Rational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=5).into());
        p = p.add(&Polynomial::term(nvars, m, c));
    }
    p
}

/// One random input per differential operator of a `dim`-dimensional
/// sequence: a scalar for grad, a field for curl and div.
pub fn random_inputs(rng: &mut impl Rng, dim: usize, deg: u32) -> Vec<Field> {
    (0..dim)
        .map(|s| {
            let comps = match (dim, s) {
                (_, 0) => 1,
                (2, _) => 2,
                _ => 3,
            };
            Field::from_polys((0..comps).map(|_| random_polynomial(rng, dim, deg)).collect())
        })
        .collect()
}

/// Deterministic per-job generator.
pub fn job_rng(seed: u64, kind: ElementKind, family: u8, k: u32) -> ChaCha8Rng {
    let tag = ((kind as u64) << 16) | ((family as u64) << 8) | k as u64;
    ChaCha8Rng::seed_from_u64(seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Whether `verify` runs the commuting-diagram check for a job. Polygons
/// need integrals of Wachspress functions; pyramids above k = 1 are skipped
/// to bound runtime.
pub fn runs_commuting(shape: &Shape, k: u32) -> bool {
    match shape.kind() {
        ElementKind::Polygon => false,
        ElementKind::Pyramid => k <= 1,
        _ => true,
    }
}

/// Checks every commuting identity on `n` seeded inputs of degree `k + 3`.
pub fn commuting_notes(seq: &SequenceSpec, rng: &mut impl Rng, n: usize) -> Result<(bool, Vec<String>)> {
    let ip = Interpolators::new(seq)?;
    let mut notes = Vec::new();
    let mut pass = true;
    for _ in 0..n {
        let inputs = random_inputs(rng, seq.dim(), seq.k + 3);
        let r = ip.check(&inputs)?;
        if !r.projection {
            pass = false;
            notes.push("failed: an interpolator does not fix its slot".into());
        }
        for id in r.identities.iter().filter(|i| !i.pass) {
            pass = false;
            notes.push(format!("failed: {}", id.name));
        }
    }
    if pass {
        notes.push(format!("commuting diagram exact on {} seeded inputs of degree {}", n, seq.k + 3));
    }
    Ok((pass, notes))
}

/// A verified job: its report and overall verdict.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub pass: bool,
}

/// Runs every check on one job.
pub fn verify_job(job: &Job, seed: u64, commuting: bool) -> Result<Outcome> {
    let build = build_sequence(&job.shape, job.family, job.k)?;
    let fr = verify_build(&build)?;
    let mut report = Report::from_family(&fr);
    let closed_ok = !report.notes.iter().any(|n| n.ends_with("MISMATCH"));
    let mut pass = fr.pass() && closed_ok;
    if commuting && runs_commuting(&job.shape, job.k) {
        let mut rng = job_rng(seed, job.shape.kind(), job.family, job.k);
        let (ok, notes) = commuting_notes(&build.sequence, &mut rng, COMMUTING_INPUTS)?;
        pass &= ok;
        report.notes.extend(notes);
    }
    Ok(Outcome { report, pass })
}

/// Exit code for a finished `verify`: pass only if every job passed.
pub fn verdict_code(outcomes: &[Outcome]) -> i32 {
    if outcomes.iter().all(|o| o.pass) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn run_jobs(cfg: &RunConfig, commuting: bool) -> Result<Vec<Outcome>> {
    let work = || cfg.jobs.par_iter().map(|j| verify_job(j, cfg.seed, commuting)).collect::<Result<Vec<_>>>();
    match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build().context("starting worker pool")?.install(work),
        None => work(),
    }
}

/// Writes one basis per line after a `[name] dim` heading.
fn write_section(out: &mut String, name: &str, fns: &[Field]) {
    let _ = writeln!(out, "[{}] {}", name, fns.len());
    for f in fns {
        let _ = writeln!(out, "{}", f);
    }
}

/// The basis export of one job.
pub fn basis_export(job: &Job) -> Result<String> {
    let b = build_sequence(&job.shape, job.family, job.k)?;
    let seq = &b.sequence;
    let mut out = String::new();
    let _ = writeln!(out, "# element={} family={} k={}", job.shape.kind(), job.family, job.k);
    let names = seq.slot_names();
    let dims: Vec<String> = names.iter().zip(seq.dims()).map(|(n, d)| format!("{}={}", n, d)).collect();
    let _ = writeln!(out, "# dims {}", dims.join(" "));
    for (n, s) in names.iter().zip(&seq.slots) {
        write_section(&mut out, n, s.basis());
    }
    if let Some(id) = b.delta_h_id {
        write_section(&mut out, &format!("δH {}", id.tag.name()), b.delta_h.basis());
    }
    if let (Some(id), Some(de)) = (b.delta_e_id, &b.delta_e) {
        write_section(&mut out, &format!("δE {}", id.tag.name()), de.basis());
    }
    Ok(out)
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn json(reports: Vec<Report>) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&reports)?;
    s.push('\n');
    Ok(s)
}

/// Runs a validated configuration and returns the exit code. Errors are
/// usage or I/O failures.
pub fn run(cfg: &RunConfig) -> Result<i32> {
    match cfg.command {
        CommandKind::Verify => {
            let outcomes = run_jobs(cfg, true)?;
            let text = match cfg.report {
                ReportFormat::Json => json(outcomes.iter().map(|o| o.report.clone()).collect())?,
                ReportFormat::Text => {
                    let mut s = String::new();
                    for o in &outcomes {
                        render_text(&o.report, o.pass, &mut s);
                    }
                    let passed = outcomes.iter().filter(|o| o.pass).count();
                    let _ = writeln!(s, "{} of {} passed", passed, outcomes.len());
                    s
                }
            };
            emit(cfg, &text)?;
            Ok(verdict_code(&outcomes))
        }
        CommandKind::Table => {
            let reports: Vec<Report> = run_jobs(cfg, false)?.into_iter().map(|o| o.report).collect();
            let text = match cfg.report {
                ReportFormat::Json => json(reports)?,
                ReportFormat::Text => render_table(&reports),
            };
            emit(cfg, &text)?;
            Ok(EXIT_PASS)
        }
        CommandKind::Basis => {
            let text = basis_export(&cfg.jobs[0])?;
            emit(cfg, &text)?;
            Ok(EXIT_PASS)
        }
    }
}


//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::process::ExitCode;
use std::time::Instant;

use derham::commands::{job_rng, random_inputs, random_polynomial};
use derham::report::closed_forms;
use derham_core::calculus::{diff, DiffOp};
use derham_core::geometry::{sample_hexagon, sample_pentagon};
use derham_core::interp::Interpolators;
use derham_core::spaces::{build_family, build_sequence, direct_sum, family_count, row_family, FaceFamily, FunctionSpace, Shape};
use derham_core::verify::{attach_across_face, check_exactness, check_hybrid_patch, verify_build, FamilyReport, PatchSide};
use derham_core::ElementKind::{self, *};
use derham_core::{make_polygon, make_reference, AffineMap, Error, Field};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

const REFERENCE: [ElementKind; 7] = [Interval, Triangle, Square, Tet, Cube, Prism, Pyramid];
const SOLIDS: [ElementKind; 4] = [Tet, Cube, Prism, Pyramid];
const SEED: u64 = 2024;

fn shapes() -> Vec<Shape> {
    let mut v: Vec<Shape> = REFERENCE.iter().map(|&k| Shape::reference(k).unwrap()).collect();
    v.push(Shape::Polygon(make_polygon(&sample_pentagon()).unwrap()));
    v.push(Shape::Polygon(make_polygon(&sample_hexagon()).unwrap()));
    v
}

fn tag(r: &FamilyReport) -> String {
    format!("{} family {} k={}", r.element, r.family, r.k)
}

/// The full sweep of every family at k = 0, 1, 2, with polygons.
fn sweep() -> Result<Vec<FamilyReport>, String> {
    let mut jobs = Vec::new();
    for s in shapes() {
        for f in 1..=family_count(s.kind()) {
            for k in 0..3 {
                jobs.push((s.clone(), f, k));
            }
        }
    }
    jobs.par_iter()
        .map(|(s, f, k)| {
            let b = build_sequence(s, *f, *k).map_err(|e| e.to_string())?;
            verify_build(&b).map_err(|e| format!("{} family {} k={}: {}", s.kind(), f, k, e))
        })
        .collect()
}

fn failures<T>(items: impl IntoIterator<Item = T>, bad: impl Fn(&T) -> Option<String>) -> Vec<String> {
    items.into_iter().filter_map(|x| bad(&x)).collect()
}

fn verdict(count: usize, what: &str, bad: Vec<String>) -> Outcome {
    if bad.is_empty() {
        Ok(format!("{} {}", count, what))
    } else {
        Err(bad.join("; "))
    }
}

fn exactness(reports: &[FamilyReport]) -> Outcome {
    let bad = failures(reports, |r| {
        (!r.exact()).then(|| format!("{}: {:?}", tag(r), r.exactness.first_failure()))
    });
    verdict(reports.len(), "sequences exact", bad)
}

fn pyramid_faces_follow_tables() -> Result<usize, String> {
    let mut n = 0;
    for family in 2..=4u8 {
        for k in 0..3 {
            let b = build_family(Pyramid, family, k).map_err(|e| e.to_string())?;
            let el = &b.sequence.element;
            for (i, (_, id)) in b.boundary.iter().enumerate() {
                let want = if el.faces[i].shape == Square { FaceFamily::Square(family) } else { FaceFamily::Triangle(2) };
                if id.family != want {
                    return Err(format!("pyramid family {family} face {i}: {:?}", id.family));
                }
                n += 1;
            }
        }
    }
    Ok(n)
}

fn compatibility(reports: &[FamilyReport]) -> Outcome {
    let mut bad = failures(reports, |r| {
        let faces_ok = r.boundary_match.iter().all(|(_, ok)| *ok);
        (!r.compatible() || !faces_ok).then(|| format!("{}: {:?}", tag(r), r.notes))
    });
    let faces = pyramid_faces_follow_tables().unwrap_or_else(|e| {
        bad.push(e);
        0
    });
    let traced: usize = reports.iter().map(|r| r.boundary_match.len()).sum();
    verdict(reports.len(), &format!("sequences compatible, {} boundary traces matched ({} pyramid faces against the tables)", traced, faces), bad)
}

/// Closed-form checks of `what` over the sweep; returns (checked, failures).
fn closed_form_checks(reports: &[FamilyReport], what: &[&str]) -> (usize, Vec<String>) {
    let mut checked = 0;
    let mut bad = Vec::new();
    for r in reports {
        for (q, v) in closed_forms(r.element, r.family, r.k) {
            if !what.contains(&q) {
                continue;
            }
            let got = match q {
                "dim δH" => r.delta.as_ref().map(|d| d.dim_h as i64),
                "dim δE" => r.delta.as_ref().map(|d| d.dim_e as i64),
                _ => r.m_index.map(|m| m.definition),
            };
            checked += 1;
            if got != Some(v) {
                bad.push(format!("{}: {} = {:?}, expected {}", tag(r), q, got, v));
            }
        }
    }
    (checked, bad)
}

fn delta_dimensions(reports: &[FamilyReport]) -> Outcome {
    let (n, mut bad) = closed_form_checks(reports, &["dim δH", "dim δE"]);
    bad.extend(failures(reports, |r| {
        r.delta.as_ref().filter(|d| !d.pass()).map(|d| format!("{}: properties {:?}", tag(r), d.props))
    }));
    verdict(n, "closed-form enrichment dimensions matched, all enrichment properties hold", bad)
}

fn m_indices(reports: &[FamilyReport]) -> Outcome {
    let (n, mut bad) = closed_form_checks(reports, &["M-index"]);
    let mut compared = 0;
    for r in reports {
        if let Some(m) = r.m_index {
            compared += 1;
            if !m.agree() {
                bad.push(format!("{}: {:?}", tag(r), m));
            }
        }
    }
    verdict(n, &format!("closed-form M-indices matched, both forms agree on {} cases", compared), bad)
}

fn commuting() -> Outcome {
    const INPUTS: usize = 20;
    let jobs: Vec<(ElementKind, u8, u32)> = REFERENCE
        .iter()
        .flat_map(|&k| (1..=family_count(k)).flat_map(move |f| (0..2).map(move |d| (k, f, d))))
        .collect();
    let bad: Vec<String> = jobs
        .par_iter()
        .filter_map(|&(kind, family, k)| {
            let run = || -> Result<Option<String>, Error> {
                let seq = build_family(kind, family, k)?.sequence;
                let ip = Interpolators::new(&seq)?;
                let mut rng = job_rng(SEED, kind, family, k);
                for i in 0..INPUTS {
                    let r = ip.check(&random_inputs(&mut rng, seq.dim(), k + 3))?;
                    if !r.pass() {
                        return Ok(Some(format!("{kind} family {family} k={k} input {i}: {:?}", r)));
                    }
                }
                Ok(None)
            };
            run().unwrap_or_else(|e| Some(format!("{kind} family {family} k={k}: {e}")))
        })
        .collect();
    verdict(jobs.len(), &format!("sequences commute with projection on {} seeded inputs each", INPUTS), bad)
}

fn invariants(reports: &[FamilyReport]) -> Outcome {
    const SAMPLES: usize = 200;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut bad = Vec::new();
    for i in 0..SAMPLES {
        let p = Field::from_poly(random_polynomial(&mut rng, 3, 5));
        if !diff(DiffOp::Curl3d, &diff(DiffOp::Grad, &p)).is_zero() {
            bad.push(format!("curl grad of sample {i}"));
        }
        let q = Field::from_poly(random_polynomial(&mut rng, 2, 5));
        if !diff(DiffOp::Curl2d, &diff(DiffOp::Grad, &q)).is_zero() {
            bad.push(format!("rot grad of sample {i}"));
        }
        let f = Field::from_polys((0..3).map(|_| random_polynomial(&mut rng, 3, 4)).collect());
        if !diff(DiffOp::Div, &diff(DiffOp::Curl3d, &f)).is_zero() {
            bad.push(format!("div curl of sample {i}"));
        }
    }
    bad.extend(failures(reports, |r| (r.exactness.alternating_sum != 1).then(|| format!("{}: alternating sum {}", tag(r), r.exactness.alternating_sum))));
    for k in SOLIDS {
        let chi = make_reference(k).map(|r| r.euler_characteristic());
        if chi != Ok(2) {
            bad.push(format!("{k}: V-E+F = {chi:?}"));
        }
    }
    verdict(SAMPLES, &format!("samples per identity, {} alternating sums, {} Euler counts", reports.len(), SOLIDS.len()), bad)
}

fn at_identity(kind: ElementKind, family: u8, face: usize) -> PatchSide {
    PatchSide { kind, family, map: AffineMap::identity(3), face }
}

fn patches() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for row in 1..=4u8 {
        for (ia, &a) in SOLIDS.iter().enumerate() {
            for &b in &SOLIDS[ia..] {
                let (Some(fa), Some(fb)) = (row_family(row, a), row_family(row, b)) else { continue };
                let (ra, rb) = (make_reference(a).unwrap(), make_reference(b).unwrap());
                for (i, x) in ra.faces.iter().enumerate() {
                    for (j, y) in rb.faces.iter().enumerate() {
                        if x.shape != y.shape {
                            continue;
                        }
                        for k in 0..2 {
                            let side_a = at_identity(a, fa, i);
                            let r = attach_across_face(&side_a, i, b, fb, j).and_then(|side_b| check_hybrid_patch(&side_a, &side_b, k));
                            checked += 1;
                            match r {
                                Ok(r) if r.equal() => {}
                                other => bad.push(format!("row {row} {a}({i})-{b}({j}) k={k}: {other:?}")),
                            }
                        }
                    }
                }
            }
        }
    }
    // cube family 3 against prism family 3 on a square face
    let cube = at_identity(Cube, 3, 0);
    let face = make_reference(Prism).unwrap().faces.iter().position(|f| f.shape == Square).unwrap();
    let found = attach_across_face(&cube, 0, Prism, 3, face).and_then(|p| check_hybrid_patch(&cube, &p, 1)).map(|r| r.mismatch);
    if found != Ok([0, 1, 0]) {
        bad.push(format!("cube 3 / prism 3 at k=1: {found:?}, expected a one-dimensional E mismatch"));
    }
    verdict(checked, "conforming patches, cube 3 / prism 3 E traces differ by one function", bad)
}

fn negative_controls() -> Outcome {
    let seq = build_family(Cube, 1, 1).map_err(|e| e.to_string())?.sequence;
    let expected = ["im grad = ker curl", "im curl = ker div", "curl E ⊂ V"];
    let mut bad = Vec::new();
    for (slot, want) in expected.iter().enumerate() {
        let s = &seq.slots[slot];
        let broken = seq.with_slot(slot, s.without(s.dim() - 1));
        match check_exactness(&broken).first_failure() {
            Some(v) if v.name == *want => {}
            other => bad.push(format!("slot {slot}: {other:?}, expected {want}")),
        }
    }
    let b = build_family(Pyramid, 1, 1).map_err(|e| e.to_string())?;
    let h = &b.admissible.slots[0];
    let mut overlap = b.delta_h.basis().to_vec();
    overlap.push(h.basis()[0].clone());
    let bad_delta = FunctionSpace::span(Pyramid, 3, 1, overlap);
    if !matches!(direct_sum(h, &bad_delta), Err(Error::OverlapNotTrivial { .. })) {
        bad.push("overlapping enrichment was accepted".into());
    }
    verdict(4, "broken sequences rejected at the expected place", bad)
}

fn main() -> ExitCode {
    let start = Instant::now();
    let reports = match sweep() {
        Ok(v) => v,
        Err(e) => {
            println!("sweep failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    let criteria: [Criterion; 8] = [
        ("exactness sweep", Box::new(|| exactness(&reports))),
        ("compatibility and boundary families", Box::new(|| compatibility(&reports))),
        ("enrichment dimensions", Box::new(|| delta_dimensions(&reports))),
        ("M-index", Box::new(|| m_indices(&reports))),
        ("commuting diagrams", Box::new(commuting)),
        ("complex invariants", Box::new(|| invariants(&reports))),
        ("hybrid patches", Box::new(patches)),
        ("negative controls", Box::new(negative_controls)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(s) => println!("criterion {}: PASS {}: {}", i + 1, name, s),
            Err(s) => {
                failed += 1;
                println!("criterion {}: FAIL {}: {}", i + 1, name, s);
            }
        }
    }
    println!("{} of 8 criteria passed in {:.1} s", 8 - failed, start.elapsed().as_secs_f64());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

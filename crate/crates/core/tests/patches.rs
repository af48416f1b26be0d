//! Two-element patches: mixed element types from the same whole-mesh row
//! glued along a shared face, with trace spaces compared on that face.

use derham_core::geometry::{make_reference, AffineMap};
use derham_core::spaces::row_family;
use derham_core::verify::{attach_across_face, check_hybrid_patch, PatchSide};
use derham_core::ElementKind::{self, *};
use derham_core::Error;

const SOLIDS: [ElementKind; 4] = [Tet, Cube, Prism, Pyramid];

fn at_identity(kind: ElementKind, family: u8, face: usize) -> PatchSide {
    PatchSide { kind, family, map: AffineMap::identity(3), face }
}

/// Mismatch of every face pairing between `a` and `b` in `row` at degree `k`.
fn pairings(row: u8, a: ElementKind, b: ElementKind, k: u32) -> Vec<[usize; 3]> {
    let (Some(fa), Some(fb)) = (row_family(row, a), row_family(row, b)) else { return Vec::new() };
    let (ra, rb) = (make_reference(a).unwrap(), make_reference(b).unwrap());
    let mut out = Vec::new();
    for (i, x) in ra.faces.iter().enumerate() {
        for (j, y) in rb.faces.iter().enumerate() {
            if x.shape != y.shape {
                continue;
            }
            let side_a = at_identity(a, fa, i);
            let side_b = attach_across_face(&side_a, i, b, fb, j).unwrap();
            out.push(check_hybrid_patch(&side_a, &side_b, k).unwrap().mismatch);
        }
    }
    out
}

#[test]
fn rows_glue_conformingly() {
    for row in 1..=4u8 {
        for (ia, &a) in SOLIDS.iter().enumerate() {
            for &b in &SOLIDS[ia..] {
                for k in 0..2 {
                    for m in pairings(row, a, b, k) {
                        assert_eq!(m, [0, 0, 0], "row {row} {a}-{b} k={k}");
                    }
                }
            }
        }
    }
}

#[test]
fn third_row_cube_prism_tangential_mismatch() {
    // row 3 runs no prism family, so take the third prism family directly
    let cube = at_identity(Cube, 3, 0);
    let ra = make_reference(Prism).unwrap();
    let face = ra.faces.iter().position(|f| f.shape == Square).unwrap();
    let prism = attach_across_face(&cube, 0, Prism, 3, face).unwrap();
    let r1 = check_hybrid_patch(&cube, &prism, 1).unwrap();
    assert_eq!(r1.mismatch, [0, 1, 0]);
    assert_eq!(r1.dims_a, [8, 11, 4]);
    assert_eq!(r1.dims_b, [8, 11, 4]);
    assert_eq!(check_hybrid_patch(&cube, &prism, 0).unwrap().mismatch, [0, 0, 0]);
}

#[test]
fn same_element_on_both_sides() {
    for kind in SOLIDS {
        let r = make_reference(kind).unwrap();
        for face in 0..r.faces.len() {
            let a = at_identity(kind, 1, face);
            let b = attach_across_face(&a, face, kind, 1, face).unwrap();
            assert!(check_hybrid_patch(&a, &b, 1).unwrap().equal(), "{kind} face {face}");
        }
    }
}

#[test]
fn mismatched_faces_are_refused() {
    let cube = at_identity(Cube, 1, 0);
    let tri = make_reference(Tet).unwrap().faces.len() - 1;
    assert!(matches!(attach_across_face(&cube, 0, Tet, 1, tri), Err(Error::FacesDoNotMatch)));
    // two sides that do not share the named faces
    let other = at_identity(Cube, 1, 1);
    assert!(matches!(check_hybrid_patch(&cube, &other, 0), Err(Error::FacesDoNotMatch)));
}

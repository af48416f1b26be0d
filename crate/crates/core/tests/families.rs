//! Every family on every element: frozen slot dimensions, exactness,
//! compatibility, boundary families, enrichment properties and M-index.

use derham_core::geometry::{make_polygon, sample_hexagon, sample_pentagon};
use derham_core::spaces::{build_sequence, family_count, Shape};
use derham_core::verify::{verify_family, FamilyReport};
use derham_core::ElementKind::{self, *};

/// (element, family, [dims at k = 0, 1, 2]), computed by rank and
/// cross-checked against binomial counts where those exist.
const DIMS: &[(ElementKind, u8, [&[usize]; 3])] = &[
    (Interval, 1, [&[2, 1], &[3, 2], &[4, 3]]),
    (Triangle, 1, [&[6, 6, 1], &[10, 12, 3], &[15, 20, 6]]),
    (Triangle, 2, [&[3, 3, 1], &[6, 8, 3], &[10, 15, 6]]),
    (Square, 1, [&[8, 8, 1], &[12, 14, 3], &[17, 22, 6]]),
    (Square, 2, [&[4, 4, 1], &[8, 10, 3], &[12, 17, 6]]),
    (Square, 3, [&[4, 4, 1], &[8, 11, 4], &[13, 21, 9]]),
    (Square, 4, [&[4, 4, 1], &[9, 12, 4], &[16, 24, 9]]),
    (Tet, 1, [&[20, 30, 12, 1], &[35, 60, 30, 4], &[56, 105, 60, 10]]),
    (Tet, 2, [&[4, 6, 4, 1], &[10, 20, 15, 4], &[20, 45, 36, 10]]),
    (Cube, 1, [&[32, 48, 18, 1], &[50, 84, 39, 4], &[74, 135, 72, 10]]),
    (Cube, 2, [&[8, 12, 6, 1], &[20, 36, 21, 4], &[32, 66, 45, 10]]),
    (Cube, 3, [&[8, 12, 6, 1], &[20, 42, 31, 8], &[39, 99, 88, 27]]),
    (Cube, 4, [&[8, 12, 6, 1], &[27, 54, 36, 8], &[64, 144, 108, 27]]),
    (Prism, 1, [&[26, 39, 15, 1], &[42, 71, 34, 4], &[64, 118, 65, 10]]),
    (Prism, 2, [&[6, 9, 5, 1], &[15, 28, 18, 4], &[26, 55, 40, 10]]),
    (Prism, 3, [&[6, 9, 5, 1], &[15, 31, 23, 6], &[29, 71, 61, 18]]),
    (Prism, 4, [&[6, 9, 5, 1], &[18, 36, 25, 6], &[40, 90, 69, 18]]),
    (Pyramid, 1, [&[25, 38, 15, 1], &[42, 70, 33, 4], &[65, 117, 63, 10]]),
    (Pyramid, 2, [&[5, 8, 5, 1], &[13, 26, 18, 4], &[25, 53, 39, 10]]),
    (Pyramid, 3, [&[5, 8, 5, 1], &[13, 27, 19, 4], &[26, 57, 42, 10]]),
    (Pyramid, 4, [&[5, 8, 5, 1], &[14, 28, 19, 4], &[29, 60, 42, 10]]),
];

fn assert_passes(r: &FamilyReport) {
    let tag = format!("{} family {} k={}", r.element, r.family, r.k);
    assert!(r.exact(), "{tag}: not exact: {:?}", r.exactness.first_failure());
    assert!(r.compatible(), "{tag}: not compatible: {:?}", r.notes);
    if let Some(d) = &r.delta {
        assert!(d.pass(), "{tag}: enrichment properties {:?} {:?}", d.props, r.notes);
    }
    if let Some(m) = r.m_index {
        assert!(m.agree(), "{tag}: M-index forms {:?}", m);
    }
    assert!(r.pass(), "{tag}");
}

#[test]
fn reference_families_pass_with_frozen_dimensions() {
    let mut seen = 0;
    for &(kind, family, dims) in DIMS {
        let shape = Shape::reference(kind).unwrap();
        for (k, want) in dims.iter().enumerate() {
            let r = verify_family(&shape, family, k as u32).unwrap();
            assert_eq!(r.dims, want.to_vec(), "{kind} family {family} k={k}");
            assert_passes(&r);
        }
        seen += 1;
    }
    let expected: u8 = [Interval, Triangle, Square, Tet, Cube, Prism, Pyramid].iter().map(|&k| family_count(k)).sum();
    assert_eq!(seen, expected as usize);
}

#[test]
fn polygon_families_pass() {
    // (vertices, family, dims at k = 0, 1, 2, dim δH at k = 0, 1, 2)
    type Case = (Vec<Vec<derham_core::Rational>>, u8, [[usize; 3]; 3], [usize; 3]);
    let cases: [Case; 4] = [
        (sample_pentagon(), 1, [[10, 10, 1], [15, 17, 3], [20, 25, 6]], [4, 5, 5]),
        (sample_pentagon(), 2, [[5, 5, 1], [10, 12, 3], [15, 20, 6]], [2, 4, 5]),
        (sample_hexagon(), 1, [[12, 12, 1], [18, 20, 3], [24, 29, 6]], [6, 8, 9]),
        (sample_hexagon(), 2, [[6, 6, 1], [12, 14, 3], [18, 23, 6]], [3, 6, 8]),
    ];
    for (verts, family, dims, dh) in cases {
        let shape = Shape::Polygon(make_polygon(&verts).unwrap());
        for k in 0..3 {
            let r = verify_family(&shape, family, k as u32).unwrap();
            assert_eq!(r.dims, dims[k].to_vec());
            assert_eq!(r.delta.as_ref().unwrap().dim_h, dh[k]);
            assert_passes(&r);
        }
    }
}

#[test]
fn boundary_families_follow_the_trace_tables() {
    use derham_core::spaces::FaceFamily;
    // pyramid families 2-4: triangle family 2 on the sides, square family i on the base
    for family in 2..=4u8 {
        let b = build_sequence(&Shape::reference(Pyramid).unwrap(), family, 1).unwrap();
        let base = b.sequence.element.faces.iter().position(|f| f.shape == Square).unwrap();
        for (i, (_, id)) in b.boundary.iter().enumerate() {
            let want = if i == base { FaceFamily::Square(family) } else { FaceFamily::Triangle(2) };
            assert_eq!(id.family, want);
        }
    }
}

#[test]
fn unknown_family_is_an_error() {
    let shape = Shape::reference(Tet).unwrap();
    assert!(matches!(build_sequence(&shape, 3, 0), Err(derham_core::Error::UnknownFamily { .. })));
}

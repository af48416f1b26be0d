//! Harmonic interpolators: small worked cases, constraint counts, the
//! projection property and the commuting diagram.

mod common;

use derham_core::interp::{build_system, check_commuting, harmonic_interpolate, Interpolators, Role};
use derham_core::spaces::build_family;
use derham_core::verify::BubbleKind;
use derham_core::ElementKind::{self, *};
use derham_core::{Field, Polynomial, Rational, RationalFunction};

fn constant(nvars: usize, c: i64) -> Field {
    Field::scalar(RationalFunction::constant(nvars, Rational::from_integer(c.into())))
}

#[test]
fn interval_worked_cases() {
    let seq = build_family(Interval, 1, 0).unwrap().sequence;
    let x = Field::from_poly(Polynomial::var(1, 0));
    let x2 = Field::from_poly(Polynomial::mono(1, [2, 0, 0]));
    // mean of x
    let half = Field::scalar(RationalFunction::constant(1, Rational::new(1.into(), 2.into())));
    assert!(harmonic_interpolate(BubbleKind::W, &seq, &x).unwrap().equal(&half));
    // endpoint values of x^2
    assert!(harmonic_interpolate(BubbleKind::H, &seq, &x2).unwrap().equal(&x));
    // d/dx of the H interpolant is 1, the W interpolant of 2x
    let two_x = Field::from_poly(Polynomial::var(1, 0).scale(&Rational::from_integer(2.into())));
    assert!(harmonic_interpolate(BubbleKind::W, &seq, &two_x).unwrap().equal(&constant(1, 1)));
    assert!(check_commuting(&seq, &[x2]).unwrap().pass());
}

#[test]
fn tet_normal_moments() {
    let seq = build_family(Tet, 2, 0).unwrap().sequence;
    let v = build_system(BubbleKind::V, &seq).unwrap();
    assert_eq!(v.constraint_count(), 4);
    assert_eq!(v.groups.iter().filter(|g| g.role == Role::Top).count(), 4);
    let w = build_system(BubbleKind::W, &seq).unwrap();
    assert_eq!(w.constraint_count(), 1);
}

#[test]
fn constraint_counts_match_slot_dimensions() {
    for (kind, n) in [(Interval, 1u8), (Triangle, 2), (Square, 4), (Tet, 2), (Cube, 4), (Prism, 4), (Pyramid, 4)] {
        for family in 1..=n {
            for k in 0..2 {
                let seq = build_family(kind, family, k).unwrap().sequence;
                let ip = Interpolators::new(&seq).unwrap();
                for (s, sys) in ip.systems.iter().enumerate() {
                    assert_eq!(sys.constraint_count(), seq.slots[s].dim(), "{kind} {family} k={k} slot {s}");
                }
            }
        }
    }
}

#[test]
fn constants_are_reproduced() {
    for kind in [Interval, Triangle, Square, Tet, Cube, Prism, Pyramid] {
        let seq = build_family(kind, 1, 0).unwrap().sequence;
        let n = kind.dim();
        let c = constant(n, 5);
        assert!(harmonic_interpolate(BubbleKind::H, &seq, &c).unwrap().equal(&c));
        assert!(harmonic_interpolate(BubbleKind::W, &seq, &c).unwrap().equal(&c));
    }
}

fn commuting_on(kind: ElementKind, family: u8, k: u32, seed: u64, inputs: usize) {
    let seq = build_family(kind, family, k).unwrap().sequence;
    let ip = Interpolators::new(&seq).unwrap();
    let mut rng = common::rng(seed);
    for _ in 0..inputs {
        let u = common::sequence_inputs(&mut rng, kind.dim(), k + 3);
        let r = ip.check(&u).unwrap();
        assert!(r.pass(), "{kind} {family} k={k}: {:?}", r);
    }
}

#[test]
fn tet_cubic_inputs_commute() {
    commuting_on(Tet, 2, 0, 11, 5);
}

#[test]
fn every_family_commutes_at_low_order() {
    for (kind, n) in [(Interval, 1u8), (Triangle, 2), (Square, 4), (Tet, 2), (Cube, 4), (Prism, 4), (Pyramid, 4)] {
        for family in 1..=n {
            commuting_on(kind, family, 0, 3 + family as u64, 2);
        }
    }
}

#[test]
fn pyramid_interpolants_are_rational() {
    let seq = build_family(Pyramid, 2, 1).unwrap().sequence;
    let mut rng = common::rng(5);
    let u = common::polynomial(&mut rng, 3, 4);
    let p = harmonic_interpolate(BubbleKind::H, &seq, &Field::from_poly(u)).unwrap();
    assert!(!p.0[0].is_polynomial());
}

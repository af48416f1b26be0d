//! Seeded random inputs shared by the integration tests.

#![allow(dead_code)]

use derham_core::spaces::total_degree;
use derham_core::{Field, Polynomial, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn polynomial(rng: &mut impl Rng, nvars: usize, deg: u32) -> Polynomial {
    let mut p = Polynomial::zero(nvars);
    for m in total_degree(nvars, deg) {
        let c = Rational::new(rng.gen_range(-7i64..=7).into(), rng.gen_range(1i64..=6).into());
        p = p.add(&Polynomial::term(nvars, m, c));
    }
    p
}

pub fn field(rng: &mut impl Rng, nvars: usize, comps: usize, deg: u32) -> Field {
    Field::from_polys((0..comps).map(|_| polynomial(rng, nvars, deg)).collect())
}

/// One input per operator of a `dim`-dimensional sequence.
pub fn sequence_inputs(rng: &mut impl Rng, dim: usize, deg: u32) -> Vec<Field> {
    (0..dim).map(|s| field(rng, dim, if s == 0 { 1 } else if dim == 2 { 2 } else { 3 }, deg)).collect()
}

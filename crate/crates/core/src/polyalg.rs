//! Multivariate polynomials over the rationals and rational functions whose
//! denominators are products of a few registered factors, e.g. `(1-z)` on
//! the pyramid or the Wachspress denominator of a polygon.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::{self, Write};

use num_traits::{One, Zero};

use crate::geometry::AffineMap;
use crate::qlinalg::{Rational, SparseRow};
use crate::Error;

/// Exponents of x, y, z. Unused trailing slots stay zero.
pub type Monomial = [u16; 3];

pub const VAR_NAMES: [&str; 3] = ["x", "y", "z"];

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Polynomial {
    nvars: u8,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= 3);
        Polynomial { nvars: nvars as u8, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::term(nvars, [0; 3], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn term(nvars: usize, m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        debug_assert!(m[nvars..].iter().all(|&e| e == 0));
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// The monomial `x^a y^b z^c` with coefficient one.
    pub fn mono(nvars: usize, m: Monomial) -> Self {
        Self::term(nvars, m, Rational::one())
    }

    /// The coordinate function of axis `i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = [0; 3];
        m[i] = 1;
        Self::mono(nvars, m)
    }

    /// `c_0 + sum_i c_{i+1} x_i`.
    pub fn affine(nvars: usize, constant: Rational, coeffs: &[Rational]) -> Self {
        let mut p = Self::constant(nvars, constant);
        for (i, c) in coeffs.iter().enumerate() {
            p = p.add(&Self::var(nvars, i).scale(c));
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars as usize
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Number of nonzero terms.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The constant value, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&[0; 3]).cloned(),
            _ => None,
        }
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().map(|&e| e as u32).sum()).max()
    }

    /// Largest exponent of axis `i`.
    pub fn degree_in(&self, i: usize) -> u16 {
        self.terms.keys().map(|m| m[i]).max().unwrap_or(0)
    }

    /// Lexicographic leading term (x > y > z).
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &Polynomial) -> Polynomial {
        let mut p = self.with_nvars(self.nvars().max(o.nvars()));
        for (m, c) in &o.terms {
            p.add_term(*m, c.clone());
        }
        p
    }

    pub fn sub(&self, o: &Polynomial) -> Polynomial {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Self::zero(self.nvars());
        }
        Polynomial { nvars: self.nvars, terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect() }
    }

    /// Multiplies by a monomial.
    pub fn shift(&self, by: &Monomial) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| ([m[0] + by[0], m[1] + by[1], m[2] + by[2]], c.clone())).collect(),
        }
    }

    pub fn mul(&self, o: &Polynomial) -> Polynomial {
        let mut p = Self::zero(self.nvars().max(o.nvars()));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                p.add_term([ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]], ca * cb);
            }
        }
        p
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut r = Self::one(self.nvars());
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Same terms, viewed in a space with `n` variables.
    pub fn with_nvars(&self, n: usize) -> Polynomial {
        debug_assert!(self.terms.keys().all(|m| m[n..].iter().all(|&e| e == 0)));
        Polynomial { nvars: n as u8, terms: self.terms.clone() }
    }

    pub fn differentiate(&self, var: usize) -> Polynomial {
        let mut p = Self::zero(self.nvars());
        for (m, c) in &self.terms {
            if m[var] > 0 {
                let mut d = *m;
                d[var] -= 1;
                p.add_term(d, c * Rational::from_integer(m[var].into()));
            }
        }
        p
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.iter().enumerate().take(self.nvars()) {
                for _ in 0..e {
                    t *= &x[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Composition with polynomials: variable `i` is replaced by `images[i]`.
    pub fn compose(&self, images: &[Polynomial], nvars: usize) -> Polynomial {
        let mut powers: Vec<Vec<Polynomial>> = images.iter().map(|p| vec![Polynomial::one(nvars), p.clone()]).collect();
        let mut out = Polynomial::zero(nvars);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(nvars, c.clone());
            for (i, &e) in m.iter().enumerate().take(self.nvars()) {
                let e = e as usize;
                while powers[i].len() <= e {
                    let next = powers[i].last().unwrap().mul(&images[i]);
                    powers[i].push(next);
                }
                if e > 0 {
                    t = t.mul(&powers[i][e]);
                }
            }
            out = out.add(&t);
        }
        out
    }

    pub fn substitute_affine(&self, map: &AffineMap) -> Polynomial {
        assert_eq!(map.codomain_dim(), self.nvars(), "map codomain does not match polynomial");
        self.compose(&map.component_polynomials(), map.domain_dim())
    }

    /// Exact quotient `self / d`, or `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        let (dm, dc) = d.leading()?;
        let (dm, dc) = (*dm, dc.clone());
        let mut rem = self.clone();
        let mut quot = Polynomial::zero(self.nvars().max(d.nvars()));
        while let Some((m, c)) = rem.leading() {
            if (0..3).any(|i| m[i] < dm[i]) {
                return None;
            }
            let qm = [m[0] - dm[0], m[1] - dm[1], m[2] - dm[2]];
            let qc = c / &dc;
            rem = rem.sub(&d.shift(&qm).scale(&qc));
            quot.add_term(qm, qc);
        }
        Some(quot)
    }
}

fn fmt_rational(c: &Rational, f: &mut impl Write) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

fn fmt_monomial(m: &Monomial, f: &mut impl Write) -> fmt::Result {
    let mut first = true;
    for (i, &e) in m.iter().enumerate() {
        if e > 0 {
            if !first {
                f.write_char(' ')?;
            }
            write!(f, "{}^{}", VAR_NAMES[i], e)?;
            first = false;
        }
    }
    Ok(())
}

fn fmt_terms(p: &Polynomial, den: &str, f: &mut impl Write) -> fmt::Result {
    if p.is_zero() {
        return f.write_char('0');
    }
    // Ascending degree, then lexicographic, reads naturally.
    let mut terms: Vec<_> = p.terms.iter().collect();
    terms.sort_by_key(|(m, _)| (m.iter().map(|&e| e as u32).sum::<u32>(), core::cmp::Reverse(**m)));
    for (i, (m, c)) in terms.into_iter().enumerate() {
        if i > 0 {
            f.write_str(" + ")?;
        }
        fmt_rational(c, f)?;
        if m.iter().any(|&e| e > 0) {
            f.write_str(" * ")?;
            fmt_monomial(m, f)?;
        }
        f.write_str(den)?;
    }
    Ok(())
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_terms(self, "", f)
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({})", self.nvars, self)
    }
}

/// A non-constant polynomial scaled so that its constant term is one (or,
/// without a constant term, its leading coefficient is one).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Factor(Polynomial);

impl Factor {
    /// Normalizes `p`; returns the factor and the scalar `s` with `p = s * factor`.
    pub fn normalize(p: &Polynomial) -> Option<(Factor, Rational)> {
        if p.as_constant().is_some() {
            return None;
        }
        let s = match p.terms.get(&[0; 3]) {
            Some(c) => c.clone(),
            None => p.leading().unwrap().1.clone(),
        };
        Some((Factor(p.scale(&s.recip())), s))
    }

    pub fn new(p: &Polynomial) -> Option<Factor> {
        Self::normalize(p).map(|(f, _)| f)
    }

    /// The pyramid factor `1 - z`.
    pub fn one_minus_z() -> Factor {
        Factor::new(&Polynomial::one(3).sub(&Polynomial::var(3, 2))).unwrap()
    }

    pub fn poly(&self) -> &Polynomial {
        &self.0
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Factor::one_minus_z() {
            return f.write_str("1-z");
        }
        // compact form without spaces so the export grammar stays unambiguous
        let mut s = String::new();
        fmt_terms(&self.0, "", &mut s)?;
        f.write_str(&s.replace(" * ", "*").replace(" + ", "+").replace(' ', "*"))
    }
}

/// `numerator / prod factor^power`, cancelled as far as exact division allows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Vec<(Factor, u32)>,
}

fn merge_den(a: &[(Factor, u32)], b: &[(Factor, u32)], op: impl Fn(u32, u32) -> u32) -> Vec<(Factor, u32)> {
    let mut m: BTreeMap<&Factor, (u32, u32)> = BTreeMap::new();
    for (f, p) in a {
        m.entry(f).or_default().0 += p;
    }
    for (f, p) in b {
        m.entry(f).or_default().1 += p;
    }
    m.into_iter().map(|(f, (x, y))| (f.clone(), op(x, y))).filter(|(_, p)| *p > 0).collect()
}

fn den_product(den: &[(Factor, u32)], nvars: usize) -> Polynomial {
    let mut p = Polynomial::one(nvars);
    for (f, e) in den {
        p = p.mul(&f.0.pow(*e));
    }
    p
}

impl RationalFunction {
    pub fn poly(p: Polynomial) -> Self {
        RationalFunction { num: p, den: Vec::new() }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::poly(Polynomial::zero(nvars))
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::poly(Polynomial::constant(nvars, c))
    }

    /// `num / prod f^p`, canonicalized.
    pub fn new(num: Polynomial, den: Vec<(Factor, u32)>) -> Self {
        let den = merge_den(&den, &[], |a, _| a);
        let mut r = RationalFunction { num, den };
        r.cancel();
        r
    }

    /// `num / den` where `den` must be a scalar times a product of the
    /// registered factors.
    pub fn quotient(num: Polynomial, den: &Polynomial, registry: &[Factor]) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::DenominatorVanishes);
        }
        let mut rest = den.clone();
        let mut powers = Vec::new();
        for f in registry {
            let mut e = 0;
            while let Some(q) = rest.div_exact(&f.0) {
                if rest.as_constant().is_some() {
                    break;
                }
                rest = q;
                e += 1;
            }
            if e > 0 {
                powers.push((f.clone(), e));
            }
        }
        let c = rest.as_constant().ok_or(Error::UnsupportedFactor)?;
        Ok(Self::new(num.scale(&c.recip()), powers))
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &[(Factor, u32)] {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        self.den.is_empty().then_some(&self.num)
    }

    fn cancel(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        for (f, p) in &mut self.den {
            while *p > 0 {
                match self.num.div_exact(&f.0) {
                    Some(q) => {
                        self.num = q;
                        *p -= 1;
                    }
                    None => break,
                }
            }
        }
        self.den.retain(|(_, p)| *p > 0);
    }

    fn lift(&self, den: &[(Factor, u32)]) -> Polynomial {
        let extra = merge_den(den, &self.den, |a, b| a - b);
        self.num.mul(&den_product(&extra, self.nvars()))
    }

    pub fn add(&self, o: &RationalFunction) -> RationalFunction {
        if self.den == o.den {
            return Self::new(self.num.add(&o.num), self.den.clone());
        }
        let den = merge_den(&self.den, &o.den, |a, b| a.max(b));
        Self::new(self.lift(&den).add(&o.lift(&den)), den)
    }

    pub fn sub(&self, o: &RationalFunction) -> RationalFunction {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn scale(&self, c: &Rational) -> RationalFunction {
        if c.is_zero() {
            return Self::zero(self.nvars());
        }
        RationalFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn mul(&self, o: &RationalFunction) -> RationalFunction {
        Self::new(self.num.mul(&o.num), merge_den(&self.den, &o.den, |a, b| a + b))
    }

    pub fn mul_poly(&self, p: &Polynomial) -> RationalFunction {
        Self::new(self.num.mul(p), self.den.clone())
    }

    /// Partial derivative by the quotient rule in factored form.
    pub fn differentiate(&self, var: usize) -> RationalFunction {
        if self.den.is_empty() {
            return Self::poly(self.num.differentiate(var));
        }
        let n = self.nvars();
        let base = den_product(&self.den.iter().map(|(f, _)| (f.clone(), 1)).collect::<Vec<_>>(), n);
        let mut top = self.num.differentiate(var).mul(&base);
        for (i, (f, p)) in self.den.iter().enumerate() {
            let df = f.0.differentiate(var);
            if df.is_zero() {
                continue;
            }
            let others: Vec<_> = self.den.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, (g, _))| (g.clone(), 1)).collect();
            let t = self.num.mul(&df).mul(&den_product(&others, n)).scale(&Rational::from_integer((*p).into()));
            top = top.sub(&t);
        }
        Self::new(top, self.den.iter().map(|(f, p)| (f.clone(), p + 1)).collect())
    }

    /// Composition with an affine map.
    pub fn substitute_affine(&self, map: &AffineMap) -> Result<RationalFunction, Error> {
        let num = self.num.substitute_affine(map);
        let mut scale = Rational::one();
        let mut den = Vec::new();
        for (f, p) in &self.den {
            let g = f.0.substitute_affine(map);
            match g.as_constant() {
                Some(c) if c.is_zero() => return Err(Error::DenominatorVanishes),
                Some(c) => {
                    for _ in 0..*p {
                        scale *= &c;
                    }
                }
                None => {
                    let (h, s) = Factor::normalize(&g).unwrap();
                    for _ in 0..*p {
                        scale *= &s;
                    }
                    den.push((h, *p));
                }
            }
        }
        Ok(Self::new(num.scale(&scale.recip()), den))
    }

    /// Value at a point; `None` when the denominator vanishes there.
    pub fn eval(&self, x: &[Rational]) -> Option<Rational> {
        let d = den_product(&self.den, self.nvars()).eval(x);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(x) / d)
    }

    /// True iff `self - o` vanishes identically.
    pub fn equal(&self, o: &RationalFunction) -> bool {
        if self.den == o.den {
            return self.num == o.num;
        }
        let den = merge_den(&self.den, &o.den, |a, b| a.max(b));
        self.lift(&den) == o.lift(&den)
    }

    /// Splits into `(p, den)` such that `self = p / prod den`; `den` is the
    /// given common denominator, which must be a multiple of this one.
    pub fn numerator_over(&self, den: &[(Factor, u32)]) -> Polynomial {
        self.lift(den)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut den = String::new();
        if !self.den.is_empty() {
            den.push_str(" /");
            for (fac, p) in &self.den {
                write!(den, " ({})^{}", fac, p)?;
            }
        }
        fmt_terms(&self.num, &den, f)
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({})", self)
    }
}

/// A scalar (one component) or vector valued function.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Field(pub Vec<RationalFunction>);

impl Field {
    pub fn scalar(f: RationalFunction) -> Self {
        Field(vec![f])
    }

    pub fn from_poly(p: Polynomial) -> Self {
        Field(vec![RationalFunction::poly(p)])
    }

    pub fn from_polys(ps: Vec<Polynomial>) -> Self {
        Field(ps.into_iter().map(RationalFunction::poly).collect())
    }

    pub fn zero(nvars: usize, comps: usize) -> Self {
        Field(vec![RationalFunction::zero(nvars); comps])
    }

    pub fn comps(&self) -> usize {
        self.0.len()
    }

    pub fn nvars(&self) -> usize {
        self.0[0].nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(RationalFunction::is_zero)
    }

    pub fn add(&self, o: &Field) -> Field {
        assert_eq!(self.comps(), o.comps());
        Field(self.0.iter().zip(&o.0).map(|(a, b)| a.add(b)).collect())
    }

    pub fn sub(&self, o: &Field) -> Field {
        assert_eq!(self.comps(), o.comps());
        Field(self.0.iter().zip(&o.0).map(|(a, b)| a.sub(b)).collect())
    }

    pub fn scale(&self, c: &Rational) -> Field {
        Field(self.0.iter().map(|a| a.scale(c)).collect())
    }

    pub fn equal(&self, o: &Field) -> bool {
        self.comps() == o.comps() && self.0.iter().zip(&o.0).all(|(a, b)| a.equal(b))
    }

    pub fn substitute_affine(&self, map: &AffineMap) -> Result<Field, Error> {
        self.0.iter().map(|c| c.substitute_affine(map)).collect::<Result<_, _>>().map(Field)
    }

    pub fn eval(&self, x: &[Rational]) -> Option<Vec<Rational>> {
        self.0.iter().map(|c| c.eval(x)).collect()
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{}", c)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self)
    }
}

fn parse_monomial(s: &str, sep: char, nvars: usize) -> Option<Monomial> {
    let mut m = [0u16; 3];
    for v in s.split(sep).filter(|t| !t.is_empty()) {
        let (name, e) = v.split_once('^')?;
        let i = VAR_NAMES[..nvars].iter().position(|&n| n == name)?;
        m[i] = m[i].checked_add(e.parse().ok()?)?;
    }
    Some(m)
}

fn parse_factor(s: &str, nvars: usize) -> Option<Factor> {
    if s == "1-z" && nvars == 3 {
        return Some(Factor::one_minus_z());
    }
    let mut p = Polynomial::zero(nvars);
    for t in s.split('+') {
        let (c, m) = match t.split_once('*') {
            Some((c, m)) => (c, parse_monomial(m, '*', nvars)?),
            None => (t, [0; 3]),
        };
        p = p.add(&Polynomial::term(nvars, m, crate::qlinalg::parse_rational(c)?));
    }
    Factor::new(&p)
}

fn parse_term(s: &str, nvars: usize) -> Option<RationalFunction> {
    let (num, den) = match s.split_once(" / ") {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let (c, m) = match num.split_once(" * ") {
        Some((c, m)) => (c, parse_monomial(m, ' ', nvars)?),
        None => (num, [0; 3]),
    };
    let mut factors = Vec::new();
    for d in den.into_iter().flat_map(|d| d.split(' ')) {
        let (f, e) = d.strip_prefix('(')?.rsplit_once(")^")?;
        factors.push((parse_factor(f, nvars)?, e.parse().ok()?));
    }
    Some(RationalFunction::new(Polynomial::term(nvars, m, crate::qlinalg::parse_rational(c)?), factors))
}

/// Reads one line of the basis export grammar back into a field on
/// `nvars` variables; the inverse of `Display`.
pub fn parse_field(line: &str, nvars: usize) -> Result<Field, Error> {
    let bad = || Error::BadSpec(alloc::format!("cannot parse `{}`", line));
    let comps = line
        .trim()
        .split(" | ")
        .map(|c| {
            c.split(" + ").try_fold(RationalFunction::zero(nvars), |acc, t| parse_term(t, nvars).map(|r| acc.add(&r)))
        })
        .collect::<Option<Vec<_>>>()
        .ok_or_else(bad)?;
    Ok(Field(comps))
}

/// `sum_j c_j f_j`, skipping zero coefficients.
pub fn combine(coeffs: &[Rational], fns: &[Field]) -> Field {
    assert_eq!(coeffs.len(), fns.len());
    let mut out: Option<Field> = None;
    // group by shared denominator first: adding same-denominator terms is cheap
    let mut groups: BTreeMap<Vec<Vec<(Factor, u32)>>, Vec<Polynomial>> = BTreeMap::new();
    for (c, f) in coeffs.iter().zip(fns) {
        if c.is_zero() {
            continue;
        }
        let key: Vec<_> = f.0.iter().map(|r| r.den.clone()).collect();
        let acc = groups.entry(key).or_insert_with(|| f.0.iter().map(|r| Polynomial::zero(r.nvars())).collect());
        for (a, r) in acc.iter_mut().zip(&f.0) {
            *a = a.add(&r.num.scale(c));
        }
    }
    for (key, nums) in groups {
        let g = Field(nums.into_iter().zip(key).map(|(n, d)| RationalFunction::new(n, d)).collect());
        out = Some(match out {
            None => g,
            Some(o) => o.add(&g),
        });
    }
    out.unwrap_or_else(|| Field::zero(fns[0].nvars(), fns[0].comps()))
}

/// Coefficient matrix of a list of fields over a common denominator.
///
/// Every function is multiplied by the least common denominator of the
/// whole list and expanded; columns are the occurring (component, monomial)
/// pairs. Two lists are comparable only when coordinatized together.
pub fn coordinatize(fns: &[Field]) -> (Vec<SparseRow>, usize) {
    let mut lcd: Vec<(Factor, u32)> = Vec::new();
    for f in fns {
        for r in &f.0 {
            lcd = merge_den(&lcd, &r.den, |a, b| a.max(b));
        }
    }
    let mut lifted: Vec<Vec<Polynomial>> = Vec::with_capacity(fns.len());
    let mut cache: BTreeMap<Vec<(Factor, u32)>, Polynomial> = BTreeMap::new();
    for f in fns {
        let comps = f
            .0
            .iter()
            .map(|r| {
                if r.den == lcd {
                    return r.num.clone();
                }
                let extra = merge_den(&lcd, &r.den, |a, b| a - b);
                let m = cache.entry(extra.clone()).or_insert_with(|| den_product(&extra, r.nvars()));
                r.num.mul(m)
            })
            .collect();
        lifted.push(comps);
    }
    let mut cols: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
    for comps in &lifted {
        for (i, p) in comps.iter().enumerate() {
            for m in p.terms.keys() {
                cols.insert((i, *m), 0);
            }
        }
    }
    for (j, v) in cols.values_mut().enumerate() {
        *v = j;
    }
    let rows = lifted
        .iter()
        .map(|comps| {
            let mut r: Vec<(usize, Rational)> = Vec::new();
            for (i, p) in comps.iter().enumerate() {
                for (m, c) in &p.terms {
                    r.push((cols[&(i, *m)], c.clone()));
                }
            }
            r.sort_by_key(|e| e.0);
            SparseRow(r)
        })
        .collect();
    (rows, cols.len())
}

/// Dense version of [`coordinatize`].
pub fn coordinatize_matrix(fns: &[Field]) -> crate::qlinalg::QMatrix {
    let (rows, cols) = coordinatize(fns);
    let dense = rows
        .into_iter()
        .map(|r| {
            let mut d = vec![Rational::zero(); cols];
            for (c, v) in r.0 {
                d[c] = v;
            }
            d
        })
        .collect();
    crate::qlinalg::QMatrix::from_rows(dense, cols)
}

/// Rank of the span of `fns`.
pub fn span_rank(fns: &[Field]) -> usize {
    let (rows, cols) = coordinatize(fns);
    crate::qlinalg::rank_of_rows(rows, cols)
}

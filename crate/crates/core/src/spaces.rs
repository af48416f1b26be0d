//! Function spaces, the concrete sequence families on every element shape,
//! and the enrichment (delta) spaces that make them compatible.
//!
//! A space is stored as an independent list of fields; the list handed to
//! a constructor may be degenerate and is pruned by rank.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::calculus::{diff, sequence_ops, DiffOp, Entity};
use crate::geometry::{ElementKind, PolygonElement, ReferenceElement};
use crate::polyalg::{coordinatize, Factor, Field, Monomial, Polynomial, RationalFunction};
use crate::qlinalg::{independent_of_rows, left_kernel, rank_of_rows, Rational};
use crate::polyalg::combine;
use crate::{make_reference, Error};

/// A finite dimensional space of scalar or vector fields on an element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionSpace {
    kind: ElementKind,
    nvars: usize,
    comps: usize,
    basis: Vec<Field>,
}

impl FunctionSpace {
    /// Span of `fns`, keeping a maximal independent subset in order.
    pub fn span(kind: ElementKind, nvars: usize, comps: usize, fns: Vec<Field>) -> Self {
        for f in &fns {
            assert_eq!((f.nvars(), f.comps()), (nvars, comps), "field shape does not match the space");
        }
        let (rows, cols) = coordinatize(&fns);
        let keep = independent_of_rows(rows, cols);
        let mut fns: Vec<Option<Field>> = fns.into_iter().map(Some).collect();
        let basis = keep.into_iter().map(|i| fns[i].take().unwrap()).collect();
        FunctionSpace { kind, nvars, comps, basis }
    }

    pub fn zero(kind: ElementKind, nvars: usize, comps: usize) -> Self {
        FunctionSpace { kind, nvars, comps, basis: Vec::new() }
    }

    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn comps(&self) -> usize {
        self.comps
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Field] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    fn same_shape(&self, o: &FunctionSpace) -> bool {
        self.nvars == o.nvars && self.comps == o.comps
    }

    /// Dimension of `self + o`.
    pub fn sum_dim(&self, o: &FunctionSpace) -> usize {
        assert!(self.same_shape(o));
        let all: Vec<Field> = self.basis.iter().chain(&o.basis).cloned().collect();
        let (rows, cols) = coordinatize(&all);
        rank_of_rows(rows, cols)
    }

    /// `self + o`, not necessarily direct.
    pub fn sum(&self, o: &FunctionSpace) -> FunctionSpace {
        assert!(self.same_shape(o));
        let all = self.basis.iter().chain(&o.basis).cloned().collect();
        FunctionSpace::span(self.kind, self.nvars, self.comps, all)
    }

    pub fn contains(&self, f: &Field) -> bool {
        self.contains_all(core::slice::from_ref(f))
    }

    pub fn contains_all(&self, fs: &[Field]) -> bool {
        if fs.is_empty() {
            return true;
        }
        let all: Vec<Field> = self.basis.iter().chain(fs).cloned().collect();
        let (rows, cols) = coordinatize(&all);
        rank_of_rows(rows, cols) == self.dim()
    }

    pub fn contains_space(&self, o: &FunctionSpace) -> bool {
        self.contains_all(&o.basis)
    }

    /// Equality as spaces, by double containment.
    pub fn equals(&self, o: &FunctionSpace) -> bool {
        self.same_shape(o) && self.dim() == o.dim() && self.contains_space(o)
    }

    /// Dimension of `self ∩ o`.
    pub fn intersection_dim(&self, o: &FunctionSpace) -> usize {
        self.dim() + o.dim() - self.sum_dim(o)
    }

    /// Span of `op` applied to the basis.
    pub fn image(&self, op: DiffOp) -> FunctionSpace {
        let imgs: Vec<Field> = self.basis.iter().map(|f| diff(op, f)).collect();
        let comps = match op {
            DiffOp::Grad => self.nvars,
            DiffOp::Curl3d => 3,
            DiffOp::Curl2d | DiffOp::Div => 1,
        };
        FunctionSpace::span(self.kind, self.nvars, comps, imgs)
    }

    /// Subspace of `self` annihilated by a linear map given through the
    /// images of the basis. `images[i][j]` is the image of basis function
    /// `i` on the `j`-th component of the target (e.g. one entity of a
    /// boundary); targets with different variables are coordinatized apart.
    pub fn kernel_of(&self, images: &[Vec<Field>]) -> FunctionSpace {
        let combos = kernel_combinations(images, self.dim());
        let fns = combos.iter().map(|c| combine(c, &self.basis)).collect();
        FunctionSpace { kind: self.kind, nvars: self.nvars, comps: self.comps, basis: fns }
    }

    /// The space with basis function `i` removed.
    pub fn without(&self, i: usize) -> FunctionSpace {
        let mut basis = self.basis.clone();
        basis.remove(i);
        FunctionSpace { basis, ..self.clone() }
    }

    /// Applies `f` to every basis function and spans the results.
    pub fn map(&self, nvars: usize, comps: usize, f: impl Fn(&Field) -> Result<Field, Error>) -> Result<FunctionSpace, Error> {
        let fns = self.basis.iter().map(f).collect::<Result<Vec<_>, _>>()?;
        Ok(FunctionSpace::span(self.kind, nvars, comps, fns))
    }

    pub fn with_kind(mut self, kind: ElementKind) -> FunctionSpace {
        self.kind = kind;
        self
    }
}

/// Coefficient vectors `c` with `sum_i c_i images[i] = 0` componentwise.
pub fn kernel_combinations(images: &[Vec<Field>], n: usize) -> Vec<Vec<Rational>> {
    assert_eq!(images.len(), n);
    if n == 0 {
        return Vec::new();
    }
    let parts = images.first().map_or(0, Vec::len);
    let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
    let mut offset = 0;
    for j in 0..parts {
        let col: Vec<Field> = images.iter().map(|im| im[j].clone()).collect();
        let (r, c) = coordinatize(&col);
        for (i, row) in r.into_iter().enumerate() {
            rows[i].extend(row.0.into_iter().map(|(k, v)| (k + offset, v)));
        }
        offset += c;
    }
    let rows = rows.into_iter().map(crate::qlinalg::SparseRow).collect();
    left_kernel(rows, offset)
}

/// Rank of the span of a space's basis; always `s.dim()`.
pub fn span_dim(s: &FunctionSpace) -> usize {
    let (rows, cols) = coordinatize(s.basis());
    rank_of_rows(rows, cols)
}

/// `a ⊕ b`, failing when the sum is not direct.
pub fn direct_sum(a: &FunctionSpace, b: &FunctionSpace) -> Result<FunctionSpace, Error> {
    if !a.same_shape(b) {
        return Err(Error::BadSpec("direct sum of spaces with different shapes".into()));
    }
    let s = a.sum(b);
    if s.dim() != a.dim() + b.dim() {
        return Err(Error::OverlapNotTrivial { left: a.dim(), right: b.dim(), sum: s.dim() });
    }
    Ok(s)
}

// ---------------------------------------------------------------------------
// Monomial and field helpers

fn exps(n: usize, bound: impl Fn(&Monomial) -> bool, max: u16) -> Vec<Monomial> {
    let mut out = Vec::new();
    let r = |i: usize| if i < n { 0..=max } else { 0..=0 };
    for c in r(2) {
        for b in r(1) {
            for a in r(0) {
                let m = [a, b, c];
                if bound(&m) {
                    out.push(m);
                }
            }
        }
    }
    out.sort_by_key(|m| (m[0] + m[1] + m[2], core::cmp::Reverse(*m)));
    out
}

fn deg(m: &Monomial) -> u32 {
    m.iter().map(|&e| e as u32).sum()
}

/// Exponents of `P_p` in `n` variables.
pub fn total_degree(n: usize, p: u32) -> Vec<Monomial> {
    exps(n, |m| deg(m) <= p, p as u16)
}

/// Exponents of the homogeneous `P~_p` in `n` variables.
pub fn homogeneous(n: usize, p: u32) -> Vec<Monomial> {
    exps(n, |m| deg(m) == p, p as u16)
}

/// Exponents with `m_i <= bounds[i]`.
pub fn boxed(n: usize, bounds: [u32; 3]) -> Vec<Monomial> {
    let max = *bounds.iter().max().unwrap() as u16;
    exps(n, |m| (0..3).all(|i| m[i] as u32 <= bounds[i]), max)
}

/// `P_a(x,y) ⊗ P_b(z)`.
pub fn split_degree(a: u32, b: u32) -> Vec<Monomial> {
    exps(3, |m| (m[0] + m[1]) as u32 <= a && m[2] as u32 <= b, a.max(b) as u16)
}

fn x(n: usize, i: usize) -> Polynomial {
    Polynomial::var(n, i)
}

fn mono(n: usize, m: Monomial) -> Polynomial {
    Polynomial::mono(n, m)
}

fn scalars(n: usize, ms: &[Monomial]) -> Vec<Field> {
    ms.iter().map(|m| Field::from_poly(mono(n, *m))).collect()
}

/// Every scalar placed in every component.
fn bold(n: usize, comps: usize, ss: &[Polynomial]) -> Vec<Field> {
    let mut out = Vec::new();
    for c in 0..comps {
        for s in ss {
            let mut v = vec![Polynomial::zero(n); comps];
            v[c] = s.clone();
            out.push(Field::from_polys(v));
        }
    }
    out
}

fn polys(n: usize, ms: &[Monomial]) -> Vec<Polynomial> {
    ms.iter().map(|m| mono(n, *m)).collect()
}

fn vecp(v: [Polynomial; 3]) -> Field {
    Field::from_polys(v.into())
}

fn zero3() -> Polynomial {
    Polynomial::zero(3)
}

/// `x × v` in 3D.
fn cross_x(v: &[Polynomial; 3]) -> Field {
    let (px, py, pz) = (x(3, 0), x(3, 1), x(3, 2));
    vecp([
        py.mul(&v[2]).sub(&pz.mul(&v[1])),
        pz.mul(&v[0]).sub(&px.mul(&v[2])),
        px.mul(&v[1]).sub(&py.mul(&v[0])),
    ])
}

/// `x × p = (y p, -x p)` in 2D.
fn rot_x(p: &Polynomial) -> Field {
    let n = p.nvars();
    Field::from_polys(vec![x(n, 1).mul(p), x(n, 0).mul(p).neg()])
}

fn over_omz(num: Polynomial, m: u32) -> RationalFunction {
    if m == 0 {
        RationalFunction::poly(num)
    } else {
        RationalFunction::new(num, vec![(Factor::one_minus_z(), m)])
    }
}

// ---------------------------------------------------------------------------
// Named polynomial spaces

/// Descriptions of the polynomial building blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceSpec {
    /// `P_p`.
    P(u32),
    /// Homogeneous `P~_p`.
    PTilde(u32),
    /// `Q_p`.
    Q(u32),
    /// `P_a(x,y) ⊗ P_b(z)`, written `P_{a|b}`.
    PSplit(u32, u32),
    /// `x^i y^j z^l` with `i <= a, j <= b, l <= c`, written `P_{a,b,c}`.
    PBox(u32, u32, u32),
    /// The vector version of a scalar space.
    Bold(Box<SpaceSpec>),
    /// `x × P~_p` in 2D, `x × bold P~_p` in 3D.
    KoszulCross(u32),
    /// `x P~_p`.
    KoszulScalar(u32),
    /// `bold P_p(x,y) ⊕ (-y, x) P~_p(x,y)`.
    Nedelec(u32),
    /// `bold P_p(x,y) ⊕ (x, y) P~_p(x,y)`.
    RaviartThomas(u32),
    /// A planar vector space times `P_b(z)`, third component zero.
    TensorZ(Box<SpaceSpec>, u32),
}

fn spec_fields(n: usize, spec: &SpaceSpec) -> Result<(usize, Vec<Field>), Error> {
    let need3 = |what: &str| -> Result<(), Error> {
        if n == 3 {
            Ok(())
        } else {
            Err(Error::BadSpec(format!("{} needs three variables", what)))
        }
    };
    Ok(match spec {
        SpaceSpec::P(p) => (1, scalars(n, &total_degree(n, *p))),
        SpaceSpec::PTilde(p) => (1, scalars(n, &homogeneous(n, *p))),
        SpaceSpec::Q(p) => (1, scalars(n, &boxed(n, [*p; 3]))),
        SpaceSpec::PSplit(a, b) => {
            need3("P_{a|b}")?;
            (1, scalars(3, &split_degree(*a, *b)))
        }
        SpaceSpec::PBox(a, b, c) => (1, scalars(n, &boxed(n, [*a, *b, *c]))),
        SpaceSpec::Bold(inner) => {
            let (c, fs) = spec_fields(n, inner)?;
            if c != 1 {
                return Err(Error::BadSpec("bold of a vector space".into()));
            }
            let ss: Vec<Polynomial> = fs.into_iter().map(|f| f.0[0].numerator().clone()).collect();
            (n, bold(n, n, &ss))
        }
        SpaceSpec::KoszulCross(p) => match n {
            2 => (2, polys(2, &homogeneous(2, *p)).iter().map(rot_x).collect()),
            3 => {
                let mut out = Vec::new();
                for q in polys(3, &homogeneous(3, *p)) {
                    for i in 0..3 {
                        let mut v = [zero3(), zero3(), zero3()];
                        v[i] = q.clone();
                        out.push(cross_x(&v));
                    }
                }
                (3, out)
            }
            _ => return Err(Error::BadSpec("x × p needs two or three variables".into())),
        },
        SpaceSpec::KoszulScalar(p) => {
            if n < 2 {
                return Err(Error::BadSpec("x p needs two or three variables".into()));
            }
            let fs = polys(n, &homogeneous(n, *p))
                .iter()
                .map(|q| Field::from_polys((0..n).map(|i| x(n, i).mul(q)).collect()))
                .collect();
            (n, fs)
        }
        SpaceSpec::Nedelec(p) | SpaceSpec::RaviartThomas(p) => {
            if n < 2 {
                return Err(Error::BadSpec("planar vector space needs two variables".into()));
            }
            let planar: Vec<Monomial> = total_degree(2, *p);
            let mut out = Vec::new();
            for c in 0..2 {
                for m in &planar {
                    let mut v = vec![Polynomial::zero(n); 2];
                    v[c] = mono(n, *m);
                    out.push(v);
                }
            }
            for m in homogeneous(2, *p) {
                let q = mono(n, m);
                let (px, py) = (x(n, 0), x(n, 1));
                out.push(match spec {
                    SpaceSpec::Nedelec(_) => vec![py.mul(&q).neg(), px.mul(&q)],
                    _ => vec![px.mul(&q), py.mul(&q)],
                });
            }
            (2, out.into_iter().map(Field::from_polys).collect())
        }
        SpaceSpec::TensorZ(inner, b) => {
            need3("tensor product with P(z)")?;
            let (c, fs) = spec_fields(3, inner)?;
            if c != 2 {
                return Err(Error::BadSpec("tensor product with P(z) takes a planar vector space".into()));
            }
            let mut out = Vec::new();
            for f in &fs {
                for j in 0..=*b {
                    let zj = mono(3, [0, 0, j as u16]);
                    let p0 = f.0[0].numerator().mul(&zj);
                    let p1 = f.0[1].numerator().mul(&zj);
                    out.push(vecp([p0, p1, zero3()]));
                }
            }
            (3, out)
        }
    })
}

/// Builds a named polynomial space on a reference shape.
pub fn build_space(kind: ElementKind, spec: &SpaceSpec) -> Result<FunctionSpace, Error> {
    let n = kind.dim();
    let (comps, fs) = spec_fields(n, spec)?;
    Ok(FunctionSpace::span(kind, n, comps, fs))
}

// ---------------------------------------------------------------------------
// Enrichment spaces

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DeltaTag {
    H2I,
    H2II,
    H3I,
    H3II,
    H3III,
    H3IV,
    H3V,
    H3VI,
    E3I,
    E3II,
    E3III,
    E3IV,
    E3V,
}

impl DeltaTag {
    pub fn name(self) -> &'static str {
        match self {
            DeltaTag::H2I => "dH2.I",
            DeltaTag::H2II => "dH2.II",
            DeltaTag::H3I => "dH3.I",
            DeltaTag::H3II => "dH3.II",
            DeltaTag::H3III => "dH3.III",
            DeltaTag::H3IV => "dH3.IV",
            DeltaTag::H3V => "dH3.V",
            DeltaTag::H3VI => "dH3.VI",
            DeltaTag::E3I => "dE3.I",
            DeltaTag::E3II => "dE3.II",
            DeltaTag::E3III => "dE3.III",
            DeltaTag::E3IV => "dE3.IV",
            DeltaTag::E3V => "dE3.V",
        }
    }

    fn element(self) -> ElementKind {
        match self {
            DeltaTag::H2I => ElementKind::Square,
            DeltaTag::H2II => ElementKind::Polygon,
            DeltaTag::H3I | DeltaTag::H3II | DeltaTag::E3I | DeltaTag::E3II => ElementKind::Cube,
            DeltaTag::H3III | DeltaTag::E3III => ElementKind::Prism,
            _ => ElementKind::Pyramid,
        }
    }

    fn is_vector(self) -> bool {
        matches!(self, DeltaTag::E3I | DeltaTag::E3II | DeltaTag::E3III | DeltaTag::E3IV | DeltaTag::E3V)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DeltaSpaceId {
    pub tag: DeltaTag,
    pub index: u32,
}

impl DeltaSpaceId {
    pub fn new(tag: DeltaTag, index: u32) -> Self {
        DeltaSpaceId { tag, index }
    }
}

/// An element shape: a reference polytope or a physical polygon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Reference(ReferenceElement),
    Polygon(PolygonElement),
}

impl Shape {
    pub fn reference(kind: ElementKind) -> Result<Shape, Error> {
        make_reference(kind).map(Shape::Reference)
    }

    pub fn element(&self) -> &ReferenceElement {
        match self {
            Shape::Reference(r) => r,
            Shape::Polygon(p) => &p.element,
        }
    }

    pub fn kind(&self) -> ElementKind {
        self.element().kind
    }
}

fn h3i_like(k: u32, extra: impl Fn(usize) -> Vec<Polynomial>) -> Vec<Field> {
    let n = 3;
    let mut out: Vec<Polynomial> = vec![
        mono(n, [1, 1, k as u16]),
        mono(n, [k as u16, 1, 1]),
        mono(n, [1, k as u16, 1]),
    ];
    for i in 0..3 {
        out.extend(extra(i));
    }
    out.into_iter().map(Field::from_poly).collect()
}

/// `x_i` times the homogeneous polynomials of degree `p` in the two other
/// variables, taken cyclically: `(y,z)` for `x`, `(z,x)` for `y`, `(x,y)` for `z`.
fn cyclic_homog(i: usize, p: u32) -> Vec<Polynomial> {
    let (a, b) = ((i + 1) % 3, (i + 2) % 3);
    (0..=p)
        .map(|j| {
            let mut m = [0u16; 3];
            m[a] = j as u16;
            m[b] = (p - j) as u16;
            m[i] += 1;
            mono(3, m)
        })
        .collect()
}

/// `x_a ∇x_b - x_b ∇x_a` with `(a, b)` the cyclic successors of `i`.
fn rotation_field(i: usize) -> [Polynomial; 3] {
    let (a, b) = ((i + 1) % 3, (i + 2) % 3);
    let mut v = [zero3(), zero3(), zero3()];
    v[b] = x(3, a);
    v[a] = x(3, b).neg();
    v
}

fn scale_vec(v: &[Polynomial; 3], p: &Polynomial) -> [Polynomial; 3] {
    [v[0].mul(p), v[1].mul(p), v[2].mul(p)]
}

/// Monomial `x^a y^b z^c` in three variables.
fn m3(a: u32, b: u32, c: u32) -> Polynomial {
    mono(3, [a as u16, b as u16, c as u16])
}

fn pyramid_h_iv(k: u32, printed: bool) -> Vec<Field> {
    if k == 0 {
        return Vec::new();
    }
    let mut out = vec![over_omz(m3(1, 1, k - 1), 1)];
    if k >= 2 {
        for j in 0..=k - 2 {
            out.push(over_omz(m3(1 + j, 1, 1 + (k - 2 - j)), 1));
            out.push(over_omz(m3(1, 1 + j, 1 + (k - 2 - j)), 1));
        }
    }
    if !printed {
        out.push(over_omz(m3(1, k, 0), 1));
        out.push(over_omz(m3(k, 1, 0), 1));
    }
    out.into_iter().map(Field::scalar).collect()
}

fn pyramid_pairs(k: u32, narrow: bool) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    if narrow {
        out.push((1, k));
        out.push((k, 1));
    }
    let top = if narrow { k.saturating_sub(1) } else { k };
    for a in 0..=top {
        for b in 0..=top {
            if a + b > k {
                out.push((a, b));
            }
        }
    }
    if narrow && k == 0 {
        out.clear();
    }
    out
}

// x y^{k-1} (1-z) ∇(y/(1-z)), its mirror, and xy/(1-z) (z ∇x - x ∇z)
fn pyramid_e_iv(k: u32) -> Vec<Field> {
    let z = || RationalFunction::zero(3);
    let mut out = vec![Field(vec![z(), over_omz(m3(1, k - 1, 0), 0), over_omz(m3(1, k, 0), 1)])];
    if k >= 2 {
        out.push(Field(vec![over_omz(m3(k - 1, 1, 0), 0), z(), over_omz(m3(k, 1, 0), 1)]));
        out.push(Field(vec![over_omz(m3(1, 1, 1), 1), z(), over_omz(m3(2, 1, 0), 1).neg()]));
    }
    out
}

// one field per (i, j) with i, j <= k < i + j; each keeps its slanted face traces in Nedelec
fn pyramid_e_pairs(k: u32) -> Vec<Field> {
    let z = || RationalFunction::zero(3);
    let mut out = Vec::new();
    for i in 0..=k {
        for j in 0..=k {
            if i + j < k + 1 {
                continue;
            }
            out.push(if i == j {
                Field(vec![over_omz(m3(i, i + 1, 0), i), over_omz(m3(i + 1, i, 0), i).neg(), z()])
            } else if i > j {
                Field(vec![over_omz(m3(i, j + 1, 0), j), z(), over_omz(m3(i + 1, j + 1, 0), j + 1)])
            } else {
                Field(vec![z(), over_omz(m3(i + 1, j, 0), i), over_omz(m3(i + 1, j + 1, 0), i + 1)])
            });
        }
    }
    out
}

fn psi_bounds(i: usize, ne: usize, k: u32, printed: bool) -> (i64, i64) {
    let (k, i) = (k as i64, i as i64);
    let shift = if printed { 1 } else { 0 };
    if i < ne as i64 {
        ((k + 2 + shift - i).max(0), k - 1)
    } else {
        ((k + 3 + shift - i).max(1), k - 1)
    }
}

fn polygon_delta(p: &PolygonElement, k: u32, printed: bool) -> Vec<Field> {
    let ne = p.num_vertices();
    let mut out = Vec::new();
    // the indexing is one based: Psi_i uses xi_{i+1} and lambda_{i+1},
    // which are entries i (mod ne) of our zero based lists
    for i in 3..=ne {
        let (lo, hi) = psi_bounds(i, ne, k, printed);
        let idx = i % ne;
        for a in lo..=hi {
            let f = p.xis[idx].mul_poly(&p.lambdas[idx].pow(a as u32));
            out.push(Field::scalar(f));
        }
    }
    out
}

fn delta_fields(id: DeltaSpaceId, shape: &Shape, printed: bool) -> Result<Vec<Field>, Error> {
    let want = id.tag.element();
    let have = shape.kind();
    let ok = have == want || (want == ElementKind::Square && have == ElementKind::Square);
    if !ok {
        return Err(Error::IncompatibleElement(format!("{} lives on the {}, not the {}", id.tag.name(), want, have)));
    }
    let k = id.index;
    if k == 0 {
        return Ok(Vec::new());
    }
    let n = shape.element().dim();
    let _ = n;
    Ok(match id.tag {
        DeltaTag::H2I => vec![mono(2, [1, k as u16, 0]), mono(2, [k as u16, 1, 0])].into_iter().map(Field::from_poly).collect(),
        DeltaTag::H2II => match shape {
            Shape::Polygon(p) => polygon_delta(p, k, printed),
            Shape::Reference(_) => return Err(Error::IncompatibleElement("dH2.II needs a polygon with its vertex functions".into())),
        },
        DeltaTag::H3I => h3i_like(k, |i| cyclic_homog(i, k)),
        DeltaTag::H3II => h3i_like(k, |i| {
            // x y^k, x z^k for i = x, and cyclic
            let (a, b) = ((i + 1) % 3, (i + 2) % 3);
            let mut m1 = [0u16; 3];
            m1[i] = 1;
            m1[a] = k as u16;
            let mut m2 = [0u16; 3];
            m2[i] = 1;
            m2[b] = k as u16;
            vec![mono(3, m1), mono(3, m2)]
        }),
        DeltaTag::H3III => {
            let mut out = vec![m3(1, 0, k), m3(0, 1, k)];
            for j in 0..=k {
                out.push(m3(j, k - j, 1));
            }
            out.into_iter().map(Field::from_poly).collect()
        }
        DeltaTag::H3IV => pyramid_h_iv(k, printed),
        DeltaTag::H3V | DeltaTag::H3VI => {
            let mut out = pyramid_h_iv(k, printed);
            for (a, b) in pyramid_pairs(k, id.tag == DeltaTag::H3V) {
                out.push(Field::scalar(over_omz(m3(a, b, 0), a.min(b))));
            }
            out
        }
        DeltaTag::E3I => {
            let mut out = Vec::new();
            for i in 0..3 {
                let rot = rotation_field(i);
                for p in cyclic_homog(i, k - 1) {
                    out.push(vecp(scale_vec(&rot, &p)));
                }
            }
            out
        }
        DeltaTag::E3II => {
            let mut out = Vec::new();
            let km = (k - 1) as u16;
            for i in 0..3 {
                let (a, b) = ((i + 1) % 3, (i + 2) % 3);
                // x_i (x_a^k ∇x_b - x_b^k ∇x_a)
                let mut v = [zero3(), zero3(), zero3()];
                let mut ma = [0u16; 3];
                ma[i] = 1;
                ma[a] = k as u16;
                let mut mb = [0u16; 3];
                mb[i] = 1;
                mb[b] = k as u16;
                v[b] = mono(3, ma);
                v[a] = mono(3, mb).neg();
                out.push(vecp(v));
                // x_i x_a^{k-1} x_b^{k-1} (x_a ∇x_b - x_b ∇x_a)
                let mut m = [0u16; 3];
                m[i] = 1;
                m[a] = km;
                m[b] = km;
                out.push(vecp(scale_vec(&rotation_field(i), &mono(3, m))));
            }
            out
        }
        DeltaTag::E3III => {
            let rot = rotation_field(2);
            let mut out = vec![vecp(scale_vec(&rot, &m3(0, 0, k)))];
            for j in 0..k {
                out.push(vecp(scale_vec(&rot, &m3(j, k - 1 - j, 1))));
            }
            out
        }
        DeltaTag::E3IV | DeltaTag::E3V if printed => {
            let z = RationalFunction::zero(3);
            let mut out = vec![
                Field(vec![z.clone(), z.clone(), over_omz(m3(1, k, 0), 1)]),
                Field(vec![z.clone(), z.clone(), over_omz(m3(k, 1, 0), 1)]),
                Field(vec![over_omz(m3(1, 1, 1), 1), z.clone(), z.clone()]),
            ];
            if id.tag == DeltaTag::E3V {
                for (a, b) in pyramid_pairs(k, false) {
                    out.push(Field(vec![over_omz(m3(a, b + 1, 0), a.min(b)), z.clone(), z.clone()]));
                }
            }
            out
        }
        DeltaTag::E3IV => pyramid_e_iv(k),
        DeltaTag::E3V => {
            let mut out = pyramid_e_iv(k);
            out.extend(pyramid_e_pairs(k - 1));
            out
        }
    })
}

/// The enrichment space `id` on `shape`.
///
/// Some spaces deviate from the printed spanning sets, which either are too
/// small for their dimension identities or have traces outside the face spaces:
/// * `H2II` uses lower exponent bounds one less than printed;
/// * `H3IV` (and with it `H3V`, `H3VI`) adds `x y^k/(1-z)` and `y x^k/(1-z)`;
/// * `E3IV` and `E3V` gain `∇z` corrections so that tangential traces on
///   the slanted faces stay in the triangle Nedelec space, and the extra
///   pairs in `E3V` run over `i, j <= k-1 < i + j`.
///
/// [`build_delta_printed`] gives the sets verbatim.
pub fn build_delta(id: DeltaSpaceId, shape: &Shape) -> Result<FunctionSpace, Error> {
    delta_space(id, shape, false)
}

/// The enrichment space with its spanning set exactly as printed.
pub fn build_delta_printed(id: DeltaSpaceId, shape: &Shape) -> Result<FunctionSpace, Error> {
    delta_space(id, shape, true)
}

fn delta_space(id: DeltaSpaceId, shape: &Shape, printed: bool) -> Result<FunctionSpace, Error> {
    let fs = delta_fields(id, shape, printed)?;
    let n = shape.element().dim();
    let comps = if id.tag.is_vector() { 3 } else { 1 };
    Ok(FunctionSpace::span(shape.kind(), n, comps, fs))
}

// ---------------------------------------------------------------------------
// Sequences

/// An ordered chain of spaces `H -> (E ->) (V ->) W` on an element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceSpec {
    pub element: ReferenceElement,
    pub label: String,
    pub family: u8,
    pub k: u32,
    pub slots: Vec<FunctionSpace>,
}

impl SequenceSpec {
    pub fn dim(&self) -> usize {
        self.element.dim()
    }

    pub fn ops(&self) -> &'static [DiffOp] {
        sequence_ops(self.dim())
    }

    /// Slot names in order: `H, W`, `H, E, W` or `H, E, V, W`.
    pub fn slot_names(&self) -> &'static [&'static str] {
        slot_names(self.dim())
    }

    pub fn h(&self) -> &FunctionSpace {
        &self.slots[0]
    }

    pub fn w(&self) -> &FunctionSpace {
        self.slots.last().unwrap()
    }

    pub fn e(&self) -> Option<&FunctionSpace> {
        (self.dim() >= 2).then(|| &self.slots[1])
    }

    pub fn v(&self) -> Option<&FunctionSpace> {
        (self.dim() == 3).then(|| &self.slots[2])
    }

    pub fn dims(&self) -> Vec<usize> {
        self.slots.iter().map(FunctionSpace::dim).collect()
    }

    /// `sum (-1)^i dim slot_i`.
    pub fn alternating_sum(&self) -> i64 {
        self.slots.iter().enumerate().map(|(i, s)| if i % 2 == 0 { s.dim() as i64 } else { -(s.dim() as i64) }).sum()
    }

    /// The same sequence with one slot replaced.
    pub fn with_slot(&self, i: usize, s: FunctionSpace) -> SequenceSpec {
        let mut out = self.clone();
        out.slots[i] = s;
        out
    }
}

pub fn slot_names(dim: usize) -> &'static [&'static str] {
    match dim {
        1 => &["H", "W"],
        2 => &["H", "E", "W"],
        _ => &["H", "E", "V", "W"],
    }
}

/// The 2D sequence expected on a face (or the 1D one on an edge).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FaceFamily {
    Interval,
    Triangle(u8),
    Square(u8),
    /// Square family 3 with its `H(curl)` space rebuilt around the second
    /// coordinate, as found on the quadrilateral faces of prism family 3.
    PrismSquare,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FaceSequenceId {
    pub family: FaceFamily,
    pub k: u32,
}

impl FaceSequenceId {
    pub fn shape(&self) -> ElementKind {
        match self.family {
            FaceFamily::Interval => ElementKind::Interval,
            FaceFamily::Triangle(_) => ElementKind::Triangle,
            FaceFamily::Square(_) | FaceFamily::PrismSquare => ElementKind::Square,
        }
    }
}

/// A family member together with the pieces it was assembled from.
#[derive(Clone, Debug)]
pub struct FamilyBuild {
    pub sequence: SequenceSpec,
    /// The admissible sequence before enrichment.
    pub admissible: SequenceSpec,
    pub delta_h: FunctionSpace,
    pub delta_h_id: Option<DeltaSpaceId>,
    pub delta_e: Option<FunctionSpace>,
    pub delta_e_id: Option<DeltaSpaceId>,
    /// Expected trace sequence on each edge (2D) or face (3D).
    pub boundary: Vec<(Entity, FaceSequenceId)>,
}

/// Number of families defined on each element kind.
pub fn family_count(kind: ElementKind) -> u8 {
    match kind {
        ElementKind::Interval => 1,
        ElementKind::Triangle | ElementKind::Polygon => 2,
        _ if kind == ElementKind::Tet => 2,
        _ => 4,
    }
}

struct Parts {
    slots: Vec<Vec<Field>>,
    dh: Vec<Field>,
    dh_id: Option<DeltaSpaceId>,
    de: Vec<Field>,
    de_id: Option<DeltaSpaceId>,
    faces: Vec<FaceSequenceId>,
}

fn sp(kind: ElementKind, spec: SpaceSpec) -> Vec<Field> {
    spec_fields(kind.dim(), &spec).expect("valid builtin space").1
}

fn cat(parts: Vec<Vec<Field>>) -> Vec<Field> {
    parts.into_iter().flatten().collect()
}

fn bx(s: SpaceSpec) -> Box<SpaceSpec> {
    Box::new(s)
}

/// `S^{2d}_{i,k}`, the admissible planar sequences.
fn ambient_2d(kind: ElementKind, i: u8, k: u32) -> Vec<Vec<Field>> {
    use SpaceSpec::*;
    let n = 2;
    match i {
        1 => vec![sp(kind, P(k + 2)), sp(kind, Bold(bx(P(k + 1)))), sp(kind, P(k))],
        2 => vec![sp(kind, P(k + 1)), cat(vec![sp(kind, Bold(bx(P(k)))), sp(kind, KoszulCross(k))]), sp(kind, P(k))],
        3 => {
            let h = cat(vec![sp(kind, Q(k)), scalars(n, &[[k as u16 + 1, 0, 0], [0, k as u16 + 1, 0]])]);
            let e = cat(vec![sp(kind, Bold(bx(Q(k)))), vec![rot_x(&mono(n, [k as u16, k as u16, 0]))]]);
            vec![h, e, sp(kind, Q(k))]
        }
        _ => {
            let mut e = Vec::new();
            for m in boxed(n, [k, k + 1, 0]) {
                e.push(Field::from_polys(vec![mono(n, m), Polynomial::zero(n)]));
            }
            for m in boxed(n, [k + 1, k, 0]) {
                e.push(Field::from_polys(vec![Polynomial::zero(n), mono(n, m)]));
            }
            vec![sp(kind, Q(k + 1)), e, sp(kind, Q(k))]
        }
    }
}

/// `S^{3d}_{i,k}`, the admissible spatial sequences.
fn ambient_3d(kind: ElementKind, i: u8, k: u32) -> Vec<Vec<Field>> {
    use SpaceSpec::*;
    let ku = k as u16;
    match i {
        1 => vec![sp(kind, P(k + 3)), sp(kind, Bold(bx(P(k + 2)))), sp(kind, Bold(bx(P(k + 1)))), sp(kind, P(k))],
        2 => vec![
            sp(kind, P(k + 1)),
            cat(vec![sp(kind, Bold(bx(P(k)))), sp(kind, KoszulCross(k))]),
            cat(vec![sp(kind, Bold(bx(P(k)))), sp(kind, KoszulScalar(k))]),
            sp(kind, P(k)),
        ],
        3 => {
            let h = cat(vec![sp(kind, Q(k)), scalars(3, &[[ku + 1, 0, 0], [0, ku + 1, 0], [0, 0, ku + 1]])]);
            let mut ek = Vec::new();
            for j in 0..3 {
                let mut m = [ku; 3];
                m[j] = 0;
                let mut v = [zero3(), zero3(), zero3()];
                v[j] = mono(3, m);
                ek.push(cross_x(&v));
            }
            let e = cat(vec![sp(kind, Bold(bx(Q(k)))), ek]);
            let c = mono(3, [ku; 3]);
            let v = cat(vec![sp(kind, Bold(bx(Q(k)))), vec![vecp([x(3, 0).mul(&c), x(3, 1).mul(&c), x(3, 2).mul(&c)])]]);
            vec![h, e, v, sp(kind, Q(k))]
        }
        4 => {
            let comp = |bounds: [[u32; 3]; 3]| -> Vec<Field> {
                let mut out = Vec::new();
                for (c, b) in bounds.iter().enumerate() {
                    for m in boxed(3, *b) {
                        let mut v = [zero3(), zero3(), zero3()];
                        v[c] = mono(3, m);
                        out.push(vecp(v));
                    }
                }
                out
            };
            let (a, b) = (k, k + 1);
            vec![
                sp(kind, Q(k + 1)),
                comp([[a, b, b], [b, a, b], [b, b, a]]),
                comp([[b, a, a], [a, b, a], [a, a, b]]),
                sp(kind, Q(k)),
            ]
        }
        5 => {
            let h = cat(vec![
                sp(kind, PSplit(k, k)),
                scalars(3, &homogeneous(2, k + 1)),
                scalars(3, &[[0, 0, ku + 1]]),
            ]);
            let e3 = |p: Polynomial| vecp([zero3(), zero3(), p]);
            let e = cat(vec![
                sp(kind, Bold(bx(PSplit(k, k)))),
                homogeneous(2, k).into_iter().map(|m| {
                    let q = mono(3, m);
                    vecp([x(3, 1).mul(&q), x(3, 0).mul(&q).neg(), zero3()])
                }).collect(),
                homogeneous(2, k + 1).into_iter().map(|m| e3(mono(3, [m[0], m[1], ku]))).collect(),
            ]);
            let v = cat(vec![
                sp(kind, Bold(bx(PSplit(k, k)))),
                homogeneous(2, k).into_iter().map(|m| e3(mono(3, [m[0], m[1], ku + 1]))).collect(),
            ]);
            vec![h, e, v, sp(kind, PSplit(k, k))]
        }
        _ => {
            let third = |a: u32, b: u32| -> Vec<Field> {
                split_degree(a, b).into_iter().map(|m| vecp([zero3(), zero3(), mono(3, m)])).collect()
            };
            let e = cat(vec![sp(kind, TensorZ(bx(Nedelec(k)), k + 1)), third(k + 1, k)]);
            let v = cat(vec![sp(kind, TensorZ(bx(RaviartThomas(k)), k)), third(k, k + 1)]);
            vec![sp(kind, PSplit(k + 1, k + 1)), e, v, sp(kind, PSplit(k, k))]
        }
    }
}

/// The admissible sequence `S^{2d}_{i,k}` (i = 1..4) or `S^{3d}_{i,k}`
/// (i = 1..6) restricted to a reference element of matching dimension.
pub fn ambient_sequence(kind: ElementKind, i: u8, k: u32) -> Result<SequenceSpec, Error> {
    let element = make_reference(kind)?;
    let slots = match (kind.dim(), i) {
        (2, 1..=4) => ambient_2d(kind, i, k),
        (3, 1..=6) => ambient_3d(kind, i, k),
        _ => return Err(Error::UnknownFamily { element: kind, family: i }),
    };
    let n = kind.dim();
    let comps = slot_comps(n);
    let slots = slots.into_iter().zip(comps).map(|(fs, c)| FunctionSpace::span(kind, n, c, fs)).collect();
    Ok(SequenceSpec { element, label: format!("S{}d_{}", n, i), family: i, k, slots })
}

fn slot_comps(n: usize) -> Vec<usize> {
    match n {
        1 => vec![1, 1],
        2 => vec![1, 2, 1],
        _ => vec![1, 3, 3, 1],
    }
}

fn face_ids(k: &ReferenceElement, tri: FaceSequenceId, sq: FaceSequenceId) -> Vec<FaceSequenceId> {
    k.faces.iter().map(|f| if f.shape == ElementKind::Triangle { tri } else { sq }).collect()
}

fn fid(family: FaceFamily, k: u32) -> FaceSequenceId {
    FaceSequenceId { family, k }
}

fn parts(shape: &Shape, family: u8, k: u32) -> Result<Parts, Error> {
    let kind = shape.kind();
    let el = shape.element();
    let unknown = || Error::UnknownFamily { element: kind, family };
    let none = |slots: Vec<Vec<Field>>, faces: Vec<FaceSequenceId>| Parts {
        slots,
        dh: Vec::new(),
        dh_id: None,
        de: Vec::new(),
        de_id: None,
        faces,
    };
    let with_delta = |shape: &Shape, slots, hid: Option<DeltaSpaceId>, eid: Option<DeltaSpaceId>, faces| -> Result<Parts, Error> {
        let dh = match hid {
            Some(id) => delta_fields(id, shape, false)?,
            None => Vec::new(),
        };
        let de = match eid {
            Some(id) => delta_fields(id, shape, false)?,
            None => Vec::new(),
        };
        Ok(Parts { slots, dh, dh_id: hid, de, de_id: eid, faces })
    };
    let d = DeltaSpaceId::new;
    use DeltaTag::*;
    use SpaceSpec::*;
    let edges = |kk: u32| vec![fid(FaceFamily::Interval, kk); el.edges.len()];
    Ok(match (kind, family) {
        (ElementKind::Interval, 1) => none(vec![sp(kind, P(k + 1)), sp(kind, P(k))], Vec::new()),
        (ElementKind::Triangle, 1) => none(ambient_2d(kind, 1, k), edges(k + 1)),
        (ElementKind::Triangle, 2) => none(ambient_2d(kind, 2, k), edges(k)),
        (ElementKind::Square, 1) => with_delta(shape, ambient_2d(kind, 1, k), Some(d(H2I, k + 2)), None, edges(k + 1))?,
        (ElementKind::Square, 2) => with_delta(shape, ambient_2d(kind, 2, k), Some(d(H2I, k + 1)), None, edges(k))?,
        (ElementKind::Square, 3) => with_delta(shape, ambient_2d(kind, 3, k), Some(d(H2I, k + 1)), None, edges(k))?,
        (ElementKind::Square, 4) => none(ambient_2d(kind, 4, k), edges(k)),
        (ElementKind::Polygon, 1) => with_delta(shape, ambient_2d(kind, 1, k), Some(d(H2II, k + 2)), None, edges(k + 1))?,
        (ElementKind::Polygon, 2) => with_delta(shape, ambient_2d(kind, 2, k), Some(d(H2II, k + 1)), None, edges(k))?,
        (ElementKind::Tet, 1) => none(ambient_3d(kind, 1, k), vec![fid(FaceFamily::Triangle(1), k + 1); 4]),
        (ElementKind::Tet, 2) => none(ambient_3d(kind, 2, k), vec![fid(FaceFamily::Triangle(2), k); 4]),
        (ElementKind::Cube, 1) => {
            with_delta(shape, ambient_3d(kind, 1, k), Some(d(H3I, k + 3)), Some(d(E3I, k + 2)), vec![fid(FaceFamily::Square(1), k + 1); 6])?
        }
        (ElementKind::Cube, 2) => {
            with_delta(shape, ambient_3d(kind, 2, k), Some(d(H3I, k + 1)), Some(d(E3I, k + 1)), vec![fid(FaceFamily::Square(2), k); 6])?
        }
        (ElementKind::Cube, 3) => {
            with_delta(shape, ambient_3d(kind, 3, k), Some(d(H3II, k + 1)), Some(d(E3II, k + 1)), vec![fid(FaceFamily::Square(3), k); 6])?
        }
        (ElementKind::Cube, 4) => none(ambient_3d(kind, 4, k), vec![fid(FaceFamily::Square(4), k); 6]),
        (ElementKind::Prism, 1) => with_delta(
            shape,
            ambient_3d(kind, 1, k),
            Some(d(H3III, k + 3)),
            Some(d(E3III, k + 2)),
            face_ids(el, fid(FaceFamily::Triangle(1), k + 1), fid(FaceFamily::Square(1), k + 1)),
        )?,
        (ElementKind::Prism, 2) => with_delta(
            shape,
            ambient_3d(kind, 2, k),
            Some(d(H3III, k + 1)),
            Some(d(E3III, k + 1)),
            face_ids(el, fid(FaceFamily::Triangle(2), k), fid(FaceFamily::Square(2), k)),
        )?,
        (ElementKind::Prism, 3) => with_delta(
            shape,
            ambient_3d(kind, 5, k),
            Some(d(H3III, k + 1)),
            Some(d(E3III, k + 1)),
            face_ids(el, fid(FaceFamily::Triangle(2), k), fid(FaceFamily::PrismSquare, k)),
        )?,
        (ElementKind::Prism, 4) => {
            none(ambient_3d(kind, 6, k), face_ids(el, fid(FaceFamily::Triangle(2), k), fid(FaceFamily::Square(4), k)))
        }
        (ElementKind::Pyramid, 1) => with_delta(
            shape,
            ambient_3d(kind, 1, k),
            Some(d(H3IV, k + 3)),
            Some(d(E3IV, k + 2)),
            face_ids(el, fid(FaceFamily::Triangle(1), k + 1), fid(FaceFamily::Square(1), k + 1)),
        )?,
        (ElementKind::Pyramid, i @ 2..=4) => {
            let (h, e) = match i {
                2 => (H3IV, E3IV),
                3 => (H3V, E3V),
                _ => (H3VI, E3V),
            };
            with_delta(
                shape,
                ambient_3d(kind, 2, k),
                Some(d(h, k + 1)),
                Some(d(e, k + 1)),
                face_ids(el, fid(FaceFamily::Triangle(2), k), fid(FaceFamily::Square(i), k)),
            )?
        }
        _ => return Err(unknown()),
    })
}

fn family_label(kind: ElementKind, family: u8) -> String {
    format!("{}{}", kind.name(), family)
}

/// Builds family `family` at degree index `k` on `shape`, assembling
/// `H = H^g ⊕ δH`, `E = E^g ⊕ ∇δH ⊕ δE`, `V = V^g ⊕ ∇×δE`, `W = W^g`.
pub fn build_sequence(shape: &Shape, family: u8, k: u32) -> Result<FamilyBuild, Error> {
    let kind = shape.kind();
    let el = shape.element();
    let n = el.dim();
    let p = parts(shape, family, k)?;
    let comps = slot_comps(n);
    let g: Vec<FunctionSpace> = p.slots.into_iter().zip(&comps).map(|(fs, &c)| FunctionSpace::span(kind, n, c, fs)).collect();
    let admissible = SequenceSpec { element: el.clone(), label: format!("{}g", family_label(kind, family)), family, k, slots: g.clone() };
    let delta_h = FunctionSpace::span(kind, n, 1, p.dh);
    let mut slots = g;
    slots[0] = direct_sum(&slots[0], &delta_h)?;
    if n >= 2 {
        slots[1] = direct_sum(&slots[1], &delta_h.image(DiffOp::Grad))?;
    }
    let delta_e = (n == 3).then(|| FunctionSpace::span(kind, n, 3, p.de));
    if let Some(de) = &delta_e {
        slots[1] = direct_sum(&slots[1], de)?;
        slots[2] = direct_sum(&slots[2], &de.image(DiffOp::Curl3d))?;
    }
    let boundary = match n {
        1 => Vec::new(),
        2 => (0..el.edges.len()).map(Entity::Edge).zip(p.faces).collect(),
        _ => (0..el.faces.len()).map(Entity::Face).zip(p.faces).collect(),
    };
    Ok(FamilyBuild {
        sequence: SequenceSpec { element: el.clone(), label: family_label(kind, family), family, k, slots },
        admissible,
        delta_h,
        delta_h_id: p.dh_id,
        delta_e,
        delta_e_id: p.de_id,
        boundary,
    })
}

/// Convenience wrapper for reference elements.
pub fn build_family(kind: ElementKind, family: u8, k: u32) -> Result<FamilyBuild, Error> {
    build_sequence(&Shape::reference(kind)?, family, k)
}

/// The sequence on the reference edge/triangle/square named by `id`.
pub fn build_face_sequence(id: FaceSequenceId) -> Result<SequenceSpec, Error> {
    match id.family {
        FaceFamily::Interval => Ok(build_family(ElementKind::Interval, 1, id.k)?.sequence),
        FaceFamily::Triangle(i) => Ok(build_family(ElementKind::Triangle, i, id.k)?.sequence),
        FaceFamily::Square(i) => Ok(build_family(ElementKind::Square, i, id.k)?.sequence),
        FaceFamily::PrismSquare => {
            let mut s = build_family(ElementKind::Square, 3, id.k)?.sequence;
            let kind = ElementKind::Square;
            let ku = id.k as u16;
            let mut e = sp(kind, SpaceSpec::Bold(bx(SpaceSpec::Q(id.k))));
            e.push(Field::from_polys(vec![Polynomial::zero(2), mono(2, [ku + 1, ku, 0])]));
            for f in delta_fields(DeltaSpaceId::new(DeltaTag::H2I, id.k + 1), &Shape::reference(kind)?, false)? {
                e.push(diff(DiffOp::Grad, &f));
            }
            s.slots[1] = FunctionSpace::span(kind, 2, 2, e);
            s.label = String::from("square3~");
            Ok(s)
        }
    }
}

/// Which family each element uses in the four whole-mesh rows, if any.
pub fn row_family(row: u8, kind: ElementKind) -> Option<u8> {
    match (row, kind) {
        (1, ElementKind::Tet | ElementKind::Cube | ElementKind::Prism | ElementKind::Pyramid) => Some(1),
        (2..=4, ElementKind::Tet) => Some(2),
        (2, ElementKind::Cube | ElementKind::Prism | ElementKind::Pyramid) => Some(2),
        (3, ElementKind::Cube | ElementKind::Pyramid) => Some(3),
        (4, ElementKind::Cube | ElementKind::Prism | ElementKind::Pyramid) => Some(4),
        _ => None,
    }
}

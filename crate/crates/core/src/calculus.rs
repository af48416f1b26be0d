//! Differential operators, traces onto subentities, exact integration over
//! reference entities, and the affine pullbacks.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::geometry::{dot, AffineMap, ElementKind, ReferenceElement};
use crate::polyalg::{coordinatize, Factor, Field, Monomial, Polynomial, RationalFunction};
use crate::qlinalg::{qi, QMatrix, Rational};
use crate::Error;

/// Coordinate rows, their (component, monomial) labels and the common denominator.
type Expanded = (Vec<Vec<(usize, Rational)>>, Vec<(usize, Monomial)>, Vec<(Factor, u32)>);

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DiffOp {
    Grad,
    Curl2d,
    Curl3d,
    Div,
}

/// The operators of a sequence in `dim` space dimensions, in order.
pub fn sequence_ops(dim: usize) -> &'static [DiffOp] {
    match dim {
        1 => &[DiffOp::Grad],
        2 => &[DiffOp::Grad, DiffOp::Curl2d],
        _ => &[DiffOp::Grad, DiffOp::Curl3d, DiffOp::Div],
    }
}

pub fn diff(op: DiffOp, f: &Field) -> Field {
    let d = |i: usize, v: usize| f.0[i].differentiate(v);
    match op {
        DiffOp::Grad => {
            assert_eq!(f.comps(), 1, "grad takes a scalar");
            Field((0..f.nvars()).map(|v| d(0, v)).collect())
        }
        DiffOp::Curl2d => {
            assert_eq!(f.comps(), 2, "curl2d takes a 2-vector");
            Field::scalar(d(1, 0).sub(&d(0, 1)))
        }
        DiffOp::Curl3d => {
            assert_eq!(f.comps(), 3, "curl3d takes a 3-vector");
            Field(vec![d(2, 1).sub(&d(1, 2)), d(0, 2).sub(&d(2, 0)), d(1, 0).sub(&d(0, 1))])
        }
        DiffOp::Div => {
            let mut acc = d(0, 0);
            for i in 1..f.comps() {
                acc = acc.add(&d(i, i));
            }
            Field::scalar(acc)
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TraceKind {
    HVertex,
    HEdge,
    HFace,
    EEdge,
    EFace,
    VFace,
    HFull,
    EFull,
    VFull,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord, Hash)]
pub enum Entity {
    Vertex(usize),
    Edge(usize),
    Face(usize),
}

/// Value of `f` at vertex `v`. Where a denominator vanishes (the pyramid
/// apex) the function is first restricted to an incident edge, where the
/// pole has cancelled for the functions we deal with.
pub fn vertex_value(k: &ReferenceElement, v: usize, f: &RationalFunction) -> Result<Rational, Error> {
    if let Some(x) = f.eval(&k.vertices[v]) {
        return Ok(x);
    }
    for e in &k.edges {
        if let Some(end) = e.vertices.iter().position(|&w| w == v) {
            let r = f.substitute_affine(&e.chart)?;
            if let Some(x) = r.eval(&[qi(end as i64)]) {
                return Ok(x);
            }
        }
    }
    Err(Error::DenominatorVanishes)
}

/// Restriction of each component to `entity`, in the entity's chart variables.
pub fn trace_h(k: &ReferenceElement, entity: Entity, f: &Field) -> Result<Field, Error> {
    match entity {
        Entity::Vertex(v) => f
            .0
            .iter()
            .map(|c| vertex_value(k, v, c).map(|x| RationalFunction::constant(0, x)))
            .collect::<Result<_, _>>()
            .map(Field),
        Entity::Edge(e) => f.substitute_affine(&k.edges[e].chart),
        Entity::Face(i) => f.substitute_affine(&k.faces[i].chart),
    }
}

fn dot_field(f: &Field, dir: &[Rational]) -> RationalFunction {
    let mut acc = RationalFunction::zero(f.nvars());
    for (c, d) in f.0.iter().zip(dir) {
        if !d.is_zero() {
            acc = acc.add(&c.scale(d));
        }
    }
    acc
}

/// Tangential trace: `v . t_e` on an edge, `(v . a, v . b)` on a face with
/// chart axes `a, b`.
pub fn trace_e(k: &ReferenceElement, entity: Entity, f: &Field) -> Result<Field, Error> {
    match entity {
        Entity::Edge(e) => {
            let edge = &k.edges[e];
            Field::scalar(dot_field(f, &edge.tangent)).substitute_affine(&edge.chart)
        }
        Entity::Face(i) => {
            let face = &k.faces[i];
            Field(vec![dot_field(f, &face.tangents[0]), dot_field(f, &face.tangents[1])]).substitute_affine(&face.chart)
        }
        Entity::Vertex(_) => Err(Error::BadSpec("no tangential trace on a vertex".into())),
    }
}

/// Normal trace `v . n` on a face, `n` the unnormalized outward normal.
pub fn trace_v(k: &ReferenceElement, face: usize, f: &Field) -> Result<Field, Error> {
    let fc = &k.faces[face];
    Field::scalar(dot_field(f, &fc.normal)).substitute_affine(&fc.chart)
}

/// Boundary entities on which full traces live: vertices in 1D, edges in
/// 2D, faces in 3D.
pub fn boundary_entities(k: &ReferenceElement) -> Vec<Entity> {
    match k.dim() {
        1 => (0..k.vertices.len()).map(Entity::Vertex).collect(),
        2 => (0..k.edges.len()).map(Entity::Edge).collect(),
        _ => (0..k.faces.len()).map(Entity::Face).collect(),
    }
}

pub fn trace(kind: TraceKind, k: &ReferenceElement, entity: Option<Entity>, f: &Field) -> Result<Vec<Field>, Error> {
    let one = |e: Option<Entity>| e.ok_or_else(|| Error::BadSpec("trace needs an entity".into()));
    match kind {
        TraceKind::HVertex | TraceKind::HEdge | TraceKind::HFace => Ok(vec![trace_h(k, one(entity)?, f)?]),
        TraceKind::EEdge | TraceKind::EFace => Ok(vec![trace_e(k, one(entity)?, f)?]),
        TraceKind::VFace => match one(entity)? {
            Entity::Face(i) => Ok(vec![trace_v(k, i, f)?]),
            _ => Err(Error::BadSpec("normal trace needs a face".into())),
        },
        TraceKind::HFull => boundary_entities(k).into_iter().map(|e| trace_h(k, e, f)).collect(),
        TraceKind::EFull => boundary_entities(k).into_iter().map(|e| trace_e(k, e, f)).collect(),
        TraceKind::VFull => {
            if k.dim() != 3 {
                return Err(Error::BadSpec("normal traces exist on 3D elements only".into()));
            }
            (0..k.faces.len()).map(|i| trace_v(k, i, f)).collect()
        }
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, b| a * BigInt::from(b))
}

fn ratio(n: BigInt, d: BigInt) -> Rational {
    Rational::new(n, d)
}

/// Integral of `x^a y^b z^c` over the reference domain of `kind`.
pub fn monomial_integral(kind: ElementKind, m: &Monomial) -> Result<Rational, Error> {
    let [a, b, c] = [m[0] as u32, m[1] as u32, m[2] as u32];
    let line = |e: u32| ratio(BigInt::one(), BigInt::from(e + 1));
    Ok(match kind {
        ElementKind::Interval => line(a),
        ElementKind::Square => line(a) * line(b),
        ElementKind::Cube => line(a) * line(b) * line(c),
        ElementKind::Triangle => ratio(factorial(a) * factorial(b), factorial(a + b + 2)),
        ElementKind::Tet => ratio(factorial(a) * factorial(b) * factorial(c), factorial(a + b + c + 3)),
        ElementKind::Prism => ratio(factorial(a) * factorial(b), factorial(a + b + 2)) * line(c),
        ElementKind::Pyramid => integrate_kind(kind, &RationalFunction::poly(Polynomial::mono(3, *m)))?,
        ElementKind::Polygon => return Err(Error::Unsupported("polygon monomials need the vertices".into())),
    })
}

/// Integral over the pyramid of `x^a y^b (1-z)^e`; with `x = (1-z) u` the
/// integrand collapses to `(1-z)^(a+b+2+e) / ((a+1)(b+1))`.
fn pyramid_term(a: u32, b: u32, e: i64) -> Result<Rational, Error> {
    let p = a as i64 + b as i64 + e + 3;
    if p <= 0 {
        return Err(Error::DivergentIntegral);
    }
    Ok(ratio(BigInt::one(), BigInt::from((a as i64 + 1) * (b as i64 + 1) * p)))
}

/// Integral of `f` over the reference element `kind` (chart coordinates for
/// subentities).
pub fn integrate_kind(kind: ElementKind, f: &RationalFunction) -> Result<Rational, Error> {
    if f.is_zero() {
        return Ok(Rational::zero());
    }
    let den = f.denominator();
    if kind == ElementKind::Pyramid {
        let m = match den {
            [] => 0,
            [(fac, m)] if *fac == Factor::one_minus_z() => *m as i64,
            _ => return Err(Error::UnsupportedFactor),
        };
        // rewrite the numerator in w = 1 - z
        let w = AffineMap::new(
            vec![vec![qi(1), qi(0), qi(0)], vec![qi(0), qi(1), qi(0)], vec![qi(0), qi(0), qi(-1)]],
            vec![qi(0), qi(0), qi(1)],
        );
        let n = f.numerator().substitute_affine(&w);
        let mut acc = Rational::zero();
        for (mono, c) in n.terms() {
            acc += c * pyramid_term(mono[0] as u32, mono[1] as u32, mono[2] as i64 - m)?;
        }
        return Ok(acc);
    }
    let p = f.as_polynomial().ok_or(Error::UnsupportedFactor)?;
    let mut acc = Rational::zero();
    for (mono, c) in p.terms() {
        acc += c * monomial_integral(kind, mono)?;
    }
    Ok(acc)
}

/// Integral over the element itself. Polygons are split into a fan of
/// triangles; only polynomial integrands are supported there.
pub fn integrate(k: &ReferenceElement, f: &RationalFunction) -> Result<Rational, Error> {
    if k.kind != ElementKind::Polygon {
        return integrate_kind(k.kind, f);
    }
    if !f.is_polynomial() {
        return Err(Error::Unsupported("integration of rational functions on polygons".into()));
    }
    let v = &k.vertices;
    let mut acc = Rational::zero();
    for i in 1..v.len() - 1 {
        let a = crate::geometry::sub(&v[i], &v[0]);
        let b = crate::geometry::sub(&v[i + 1], &v[0]);
        let map = AffineMap::from_frame(&v[0], &[a, b]);
        let jac = map.det();
        acc += integrate_kind(ElementKind::Triangle, &f.substitute_affine(&map)?)? * jac;
    }
    Ok(acc)
}

/// Integral of `f` over `entity` of `k`, in chart coordinates.
pub fn integrate_entity(k: &ReferenceElement, entity: Option<Entity>, f: &RationalFunction) -> Result<Rational, Error> {
    match entity {
        None => integrate(k, f),
        Some(Entity::Edge(_)) => integrate_kind(ElementKind::Interval, f),
        Some(Entity::Face(i)) => integrate_kind(k.faces[i].shape, f),
        Some(Entity::Vertex(_)) => f.eval(&[]).ok_or(Error::DenominatorVanishes),
    }
}

/// Matrix of inner products `(a_i, b_j)` over a reference domain of the
/// given kind. Both lists are expanded once on monomials, so the cost is
/// one integral per monomial pair rather than one product per function pair.
pub fn gram(kind: ElementKind, a: &[Field], b: &[Field]) -> Result<QMatrix, Error> {
    if a.is_empty() || b.is_empty() {
        return Ok(QMatrix::zeros(a.len(), b.len()));
    }
    let comps = a[0].comps();
    assert_eq!(comps, b[0].comps());
    let expand = |fs: &[Field]| -> Expanded {
        let (rows, _) = coordinatize(fs);
        // recover column labels: (component, monomial), sorted the same way
        let mut labels = BTreeMap::new();
        let mut den: Vec<(Factor, u32)> = Vec::new();
        for f in fs {
            for r in &f.0 {
                for (fac, p) in r.denominator() {
                    match den.iter_mut().find(|(g, _)| g == fac) {
                        Some(e) => e.1 = e.1.max(*p),
                        None => den.push((fac.clone(), *p)),
                    }
                }
            }
        }
        den.sort();
        for f in fs {
            for (i, r) in f.0.iter().enumerate() {
                for (m, _) in r.numerator_over(&den).terms() {
                    labels.insert((i, *m), ());
                }
            }
        }
        (rows.into_iter().map(|r| r.0).collect(), labels.into_keys().collect(), den)
    };
    let (ra, la, da) = expand(a);
    let (rb, lb, db) = expand(b);
    let mut den = da.clone();
    for (f, p) in &db {
        match den.iter_mut().find(|(g, _)| g == f) {
            Some(e) => e.1 += *p,
            None => den.push((f.clone(), *p)),
        }
    }
    let nvars = a[0].nvars();
    let mut moments: BTreeMap<Monomial, Rational> = BTreeMap::new();
    let mut moment = |m: Monomial| -> Result<Rational, Error> {
        if let Some(v) = moments.get(&m) {
            return Ok(v.clone());
        }
        let f = RationalFunction::new(Polynomial::mono(nvars, m), den.clone());
        let v = integrate_kind(kind, &f)?;
        moments.insert(m, v.clone());
        Ok(v)
    };
    // M[alpha][beta] for matching components
    let mut mm = vec![vec![Rational::zero(); lb.len()]; la.len()];
    for (i, (ca, ma)) in la.iter().enumerate() {
        for (j, (cb, mb)) in lb.iter().enumerate() {
            if ca == cb {
                mm[i][j] = moment([ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]])?;
            }
        }
    }
    // (A M) B^T
    let mut am = vec![vec![Rational::zero(); lb.len()]; ra.len()];
    for (r, row) in ra.iter().enumerate() {
        for (c, v) in row {
            for (j, x) in mm[*c].iter().enumerate() {
                if !x.is_zero() {
                    am[r][j] += v * x;
                }
            }
        }
    }
    let mut out = QMatrix::zeros(a.len(), b.len());
    for (r, amr) in am.iter().enumerate() {
        for (s, row) in rb.iter().enumerate() {
            let mut acc = Rational::zero();
            for (c, v) in row {
                if !amr[*c].is_zero() {
                    acc += v * &amr[*c];
                }
            }
            out.set(r, s, acc);
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PullbackKind {
    H1,
    Curl,
    Div,
    L2,
}

/// Transports `f`, given on the domain of `map`, to its image.
pub fn pullback(kind: PullbackKind, map: &AffineMap, f: &Field) -> Result<Field, Error> {
    let inv = map.inverse()?;
    let g = f.substitute_affine(&inv)?;
    let lin = map.linear();
    let apply = |m: &QMatrix, g: &Field| -> Field {
        Field(
            (0..m.rows())
                .map(|r| {
                    let mut acc = RationalFunction::zero(g.nvars());
                    for (c, comp) in g.0.iter().enumerate() {
                        let x = m.get(r, c);
                        if !x.is_zero() {
                            acc = acc.add(&comp.scale(x));
                        }
                    }
                    acc
                })
                .collect(),
        )
    };
    Ok(match kind {
        PullbackKind::H1 => g,
        PullbackKind::Curl => {
            if g.comps() == 1 {
                g.scale(&lin.get(0, 0).recip())
            } else {
                apply(&inv.linear().transpose(), &g)
            }
        }
        PullbackKind::Div => {
            let det = map.det();
            apply(lin, &g).scale(&det.recip())
        }
        PullbackKind::L2 => g.scale(&map.det().recip()),
    })
}

/// Integral of the dot product of two fields; convenience for tests.
pub fn inner(k: &ReferenceElement, a: &Field, b: &Field) -> Result<Rational, Error> {
    let mut acc = RationalFunction::zero(a.nvars());
    for (x, y) in a.0.iter().zip(&b.0) {
        acc = acc.add(&x.mul(y));
    }
    integrate(k, &acc)
}

/// `|t|^2` of an edge and `|n|^2` of a face, re-exported for callers that
/// want unit-length traces.
pub fn direction_sq_len(dir: &[Rational]) -> Rational {
    dot(dir, dir)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::make_reference;
    use crate::qlinalg::q;

    fn p3(m: Monomial) -> Polynomial {
        Polynomial::mono(3, m)
    }

    #[test]
    fn diff_examples() {
        let g = diff(DiffOp::Grad, &Field::from_poly(Polynomial::mono(2, [1, 1, 0])));
        assert!(g.equal(&Field::from_polys(vec![Polynomial::var(2, 1), Polynomial::var(2, 0)])));
        // curl(0, -xyz, xy^2) = (3xy, -y^2, -yz)
        let v = Field::from_polys(vec![Polynomial::zero(3), p3([1, 1, 1]).neg(), p3([1, 2, 0])]);
        let c = diff(DiffOp::Curl3d, &v);
        let want = Field::from_polys(vec![p3([1, 1, 0]).scale(&qi(3)), p3([0, 2, 0]).neg(), p3([0, 1, 1]).neg()]);
        assert!(c.equal(&want));
        let x = Field::from_polys(vec![p3([1, 0, 0]), p3([0, 1, 0]), p3([0, 0, 1])]);
        assert!(diff(DiffOp::Div, &x).equal(&Field::from_poly(Polynomial::constant(3, qi(3)))));
    }

    #[test]
    fn trace_examples() {
        let cube = make_reference(ElementKind::Cube).unwrap();
        let z0 = cube.faces.iter().position(|f| f.normal == vec![qi(0), qi(0), qi(-1)]).unwrap();
        let v = Field::from_polys(vec![p3([0, 1, 0]), p3([1, 0, 0]), p3([1, 0, 0]).add(&p3([0, 1, 0]))]);
        let t = trace_e(&cube, Entity::Face(z0), &v).unwrap();
        assert!(t.equal(&Field::from_polys(vec![Polynomial::var(2, 1), Polynomial::var(2, 0)])));
        // normal trace of curl(x y (y grad z - z grad y)) on x = 1 is 3y
        let w = Field::from_polys(vec![Polynomial::zero(3), p3([1, 1, 1]).neg(), p3([1, 2, 0])]);
        let x1 = cube.faces.iter().position(|f| f.normal == vec![qi(1), qi(0), qi(0)]).unwrap();
        let n = trace_v(&cube, x1, &diff(DiffOp::Curl3d, &w)).unwrap();
        // chart of x = 1 is (1, s, t)
        assert!(n.equal(&Field::from_poly(Polynomial::var(2, 0).scale(&qi(3)))));
        for f in 0..cube.faces.len() {
            if f != x1 && cube.faces[f].normal.iter().all(|c| *c <= Rational::zero()) {
                assert!(trace_v(&cube, f, &diff(DiffOp::Curl3d, &w)).unwrap().is_zero());
            }
        }
        let iv = make_reference(ElementKind::Interval).unwrap();
        let v1 = trace_h(&iv, Entity::Vertex(1), &Field::from_poly(Polynomial::mono(1, [2, 0, 0]))).unwrap();
        assert_eq!(v1.0[0].eval(&[]), Some(qi(1)));
    }

    #[test]
    fn apex_value_through_edge() {
        let p = make_reference(ElementKind::Pyramid).unwrap();
        let f = RationalFunction::new(p3([1, 1, 0]), vec![(Factor::one_minus_z(), 1)]);
        assert_eq!(vertex_value(&p, 4, &f), Ok(qi(0)));
    }

    #[test]
    fn integrals() {
        assert_eq!(integrate_kind(ElementKind::Tet, &RationalFunction::constant(3, qi(1))), Ok(q(1, 6)));
        let f = RationalFunction::new(p3([1, 1, 0]), vec![(Factor::one_minus_z(), 1)]);
        assert_eq!(integrate_kind(ElementKind::Pyramid, &f), Ok(q(1, 16)));
        let g = RationalFunction::new(Polynomial::one(3), vec![(Factor::one_minus_z(), 3)]);
        assert_eq!(integrate_kind(ElementKind::Pyramid, &g), Err(Error::DivergentIntegral));
        assert_eq!(integrate_kind(ElementKind::Pyramid, &RationalFunction::constant(3, qi(1))), Ok(q(1, 3)));
        assert_eq!(integrate_kind(ElementKind::Prism, &RationalFunction::poly(p3([0, 0, 1]))), Ok(q(1, 4)));
        let poly = crate::geometry::make_polygon(&crate::geometry::sample_pentagon()).unwrap();
        // shoelace area of the sample pentagon
        assert_eq!(integrate(&poly.element, &RationalFunction::constant(2, qi(1))), Ok(q(15, 2)));
    }

    #[test]
    fn gram_matches_direct_products() {
        let fac = vec![(Factor::one_minus_z(), 1)];
        let a = vec![
            Field::scalar(RationalFunction::new(p3([1, 1, 0]), fac.clone())),
            Field::from_poly(p3([0, 0, 1]).add(&p3([1, 0, 0]))),
        ];
        let b = vec![Field::scalar(RationalFunction::new(p3([1, 0, 0]), fac)), Field::from_poly(Polynomial::one(3))];
        let g = gram(ElementKind::Pyramid, &a, &b).unwrap();
        let p = make_reference(ElementKind::Pyramid).unwrap();
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                assert_eq!(g.get(i, j), &inner(&p, ai, bj).unwrap(), "{i} {j}");
            }
        }
    }

    #[test]
    fn pullback_commutes() {
        let map = AffineMap::new(
            vec![vec![qi(2), qi(1), qi(0)], vec![q(1, 2), qi(1), qi(1)], vec![qi(0), qi(-1), qi(3)]],
            vec![qi(1), q(-2, 3), qi(0)],
        );
        let f = Field::from_poly(p3([2, 1, 0]));
        let lhs = diff(DiffOp::Grad, &pullback(PullbackKind::H1, &map, &f).unwrap());
        let rhs = pullback(PullbackKind::Curl, &map, &diff(DiffOp::Grad, &f)).unwrap();
        assert!(lhs.equal(&rhs));
        let v = Field::from_polys(vec![p3([2, 0, 0]), p3([1, 1, 0]), Polynomial::zero(3)]);
        let lhs = diff(DiffOp::Div, &pullback(PullbackKind::Div, &map, &v).unwrap());
        let rhs = pullback(PullbackKind::L2, &map, &diff(DiffOp::Div, &v)).unwrap();
        assert!(lhs.equal(&rhs));
        let lhs = diff(DiffOp::Curl3d, &pullback(PullbackKind::Curl, &map, &v).unwrap());
        let rhs = pullback(PullbackKind::Div, &map, &diff(DiffOp::Curl3d, &v)).unwrap();
        assert!(lhs.equal(&rhs));
        let id = AffineMap::identity(3);
        for kind in [PullbackKind::H1, PullbackKind::Curl, PullbackKind::Div, PullbackKind::L2] {
            let g = if kind == PullbackKind::H1 || kind == PullbackKind::L2 { &f } else { &v };
            assert!(pullback(kind, &id, g).unwrap().equal(g));
        }
    }
}

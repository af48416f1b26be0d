//! Reference elements, their oriented subentities and charts, and the
//! convex polygon with its edge functions and Wachspress coordinates.
//!
//! Conventions: edges run from the lower to the higher vertex index; face
//! vertex loops are counter-clockwise seen from outside; normals point
//! outward. Directions are kept unnormalized so that everything stays
//! rational.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::polyalg::{Factor, Polynomial, RationalFunction};
use crate::qlinalg::{qi, QMatrix, Rational};
use crate::Error;

pub type Point = Vec<Rational>;

/// `x -> linear * x + offset`, from `domain_dim` to `codomain_dim` variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AffineMap {
    linear: QMatrix,
    offset: Vec<Rational>,
}

impl AffineMap {
    /// `linear` is given by rows, one per codomain coordinate.
    pub fn new(linear: Vec<Vec<Rational>>, offset: Vec<Rational>) -> Self {
        let cols = linear.first().map_or(0, |r| r.len());
        assert_eq!(linear.len(), offset.len());
        AffineMap { linear: QMatrix::from_rows(linear, cols), offset }
    }

    pub fn from_matrix(linear: QMatrix, offset: Vec<Rational>) -> Self {
        assert_eq!(linear.rows(), offset.len());
        AffineMap { linear, offset }
    }

    pub fn identity(n: usize) -> Self {
        AffineMap { linear: QMatrix::identity(n), offset: vec![Rational::zero(); n] }
    }

    /// The map `p -> origin + sum_i p_i axes[i]`.
    pub fn from_frame(origin: &[Rational], axes: &[Point]) -> Self {
        let rows = (0..origin.len()).map(|r| axes.iter().map(|a| a[r].clone()).collect()).collect();
        let cols = axes.len();
        AffineMap { linear: QMatrix::from_rows(rows, cols), offset: origin.to_vec() }
    }

    /// Constant map from a zero-dimensional domain onto `p`.
    pub fn point(p: &[Rational]) -> Self {
        AffineMap { linear: QMatrix::zeros(p.len(), 0), offset: p.to_vec() }
    }

    pub fn domain_dim(&self) -> usize {
        self.linear.cols()
    }

    pub fn codomain_dim(&self) -> usize {
        self.linear.rows()
    }

    pub fn linear(&self) -> &QMatrix {
        &self.linear
    }

    pub fn offset(&self) -> &[Rational] {
        &self.offset
    }

    pub fn apply(&self, p: &[Rational]) -> Point {
        self.linear.mul_vec(p).into_iter().zip(&self.offset).map(|(a, b)| a + b).collect()
    }

    /// Each codomain coordinate as a polynomial in the domain variables.
    pub fn component_polynomials(&self) -> Vec<Polynomial> {
        (0..self.codomain_dim())
            .map(|r| Polynomial::affine(self.domain_dim(), self.offset[r].clone(), self.linear.row(r)))
            .collect()
    }

    /// `self o inner`.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        let lin = self.linear.mul(&inner.linear);
        let off = self.apply(&inner.offset);
        AffineMap { linear: lin, offset: off }
    }

    pub fn det(&self) -> Rational {
        det(&self.linear)
    }

    pub fn inverse(&self) -> Result<AffineMap, Error> {
        if self.domain_dim() != self.codomain_dim() {
            return Err(Error::SingularMap);
        }
        let inv = self.linear.inverse().ok_or(Error::SingularMap)?;
        let off = inv.mul_vec(&self.offset).into_iter().map(|v| -v).collect();
        Ok(AffineMap { linear: inv, offset: off })
    }

    /// A left inverse of an injective map, defined on the whole codomain.
    /// Composed with `self` it is the identity of the domain.
    pub fn pseudo_inverse(&self) -> Result<AffineMap, Error> {
        let a = &self.linear;
        let ata = a.transpose().mul(a);
        let inv = ata.inverse().ok_or(Error::SingularMap)?;
        let lin = inv.mul(&a.transpose());
        let off = lin.mul_vec(&self.offset).into_iter().map(|v| -v).collect();
        Ok(AffineMap { linear: lin, offset: off })
    }
}

/// Determinant by cofactor expansion; only used for matrices up to 3x3.
pub fn det(m: &QMatrix) -> Rational {
    assert_eq!(m.rows(), m.cols());
    match m.rows() {
        0 => Rational::one(),
        1 => m.get(0, 0).clone(),
        n => {
            let mut acc = Rational::zero();
            for c in 0..n {
                let minor_rows = (1..n).map(|r| (0..n).filter(|&j| j != c).map(|j| m.get(r, j).clone()).collect()).collect();
                let minor = QMatrix::from_rows(minor_rows, n - 1);
                let t = m.get(0, c) * det(&minor);
                if c % 2 == 0 {
                    acc += t;
                } else {
                    acc -= t;
                }
            }
            acc
        }
    }
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).fold(Rational::zero(), |s, t| s + t)
}

pub fn cross(a: &[Rational], b: &[Rational]) -> Point {
    vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

/// `det(a, b)` for plane vectors.
pub fn cross2(a: &[Rational], b: &[Rational]) -> Rational {
    &a[0] * &b[1] - &a[1] * &b[0]
}

fn pt(c: &[i64]) -> Point {
    c.iter().map(|&v| qi(v)).collect()
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum ElementKind {
    Interval,
    Triangle,
    Square,
    Polygon,
    Tet,
    Cube,
    Prism,
    Pyramid,
}

impl ElementKind {
    pub const ALL: [ElementKind; 8] = [
        ElementKind::Interval,
        ElementKind::Triangle,
        ElementKind::Square,
        ElementKind::Polygon,
        ElementKind::Tet,
        ElementKind::Cube,
        ElementKind::Prism,
        ElementKind::Pyramid,
    ];

    pub fn dim(self) -> usize {
        match self {
            ElementKind::Interval => 1,
            ElementKind::Triangle | ElementKind::Square | ElementKind::Polygon => 2,
            _ => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ElementKind::Interval => "interval",
            ElementKind::Triangle => "triangle",
            ElementKind::Square => "square",
            ElementKind::Polygon => "polygon",
            ElementKind::Tet => "tet",
            ElementKind::Cube => "cube",
            ElementKind::Prism => "prism",
            ElementKind::Pyramid => "pyramid",
        }
    }

    pub fn from_name(s: &str) -> Option<ElementKind> {
        ElementKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

impl fmt::Display for ElementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    /// Vertex indices, lower first.
    pub vertices: [usize; 2],
    /// `v1 - v0`, unnormalized.
    pub tangent: Point,
    /// `t -> v0 + t * tangent` on `[0, 1]`.
    pub chart: AffineMap,
}

impl Edge {
    pub fn tangent_sq_len(&self) -> Rational {
        dot(&self.tangent, &self.tangent)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    /// Triangle or square, the shape of the chart's reference domain.
    pub shape: ElementKind,
    /// Counter-clockwise seen from outside.
    pub vertices: Vec<usize>,
    /// Element vertices hit by the reference vertices of `shape`, in order.
    pub chart_vertices: Vec<usize>,
    /// `(s, t) -> origin + s a + t b`.
    pub chart: AffineMap,
    pub tangents: [Point; 2],
    /// Outward, parallel to `a x b`, same length.
    pub normal: Point,
}

impl Face {
    pub fn normal_sq_len(&self) -> Rational {
        dot(&self.normal, &self.normal)
    }

    /// +1 if `a x b` points outward, -1 otherwise.
    pub fn chart_orientation(&self) -> i32 {
        if cross(&self.tangents[0], &self.tangents[1]) == self.normal {
            1
        } else {
            -1
        }
    }
}

/// A reference polytope, or a physical polygon, with its subentities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReferenceElement {
    pub kind: ElementKind,
    pub vertices: Vec<Point>,
    pub edges: Vec<Edge>,
    pub faces: Vec<Face>,
    /// Denominator factors that functions on this element may carry.
    pub factors: Vec<Factor>,
}

impl ReferenceElement {
    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn centroid(&self) -> Point {
        centroid(&self.vertices)
    }

    /// Map from the reference point to a vertex.
    pub fn vertex_chart(&self, v: usize) -> AffineMap {
        AffineMap::point(&self.vertices[v])
    }

    /// Index of the edge joining `a` and `b`.
    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        let key = [a.min(b), a.max(b)];
        self.edges.iter().position(|e| e.vertices == key)
    }

    /// Indices of the faces containing edge `e`.
    pub fn faces_of_edge(&self, e: usize) -> Vec<usize> {
        let [a, b] = self.edges[e].vertices;
        (0..self.faces.len()).filter(|&f| self.faces[f].vertices.contains(&a) && self.faces[f].vertices.contains(&b)).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        let (v, e, f) = (self.vertices.len() as i64, self.edges.len() as i64, self.faces.len() as i64);
        match self.dim() {
            1 => v - 1,
            2 => v - e + 1,
            _ => v - e + f,
        }
    }

    pub fn face_frame(&self, f: usize) -> (&AffineMap, &[Point; 2], &Point) {
        let face = &self.faces[f];
        (&face.chart, &face.tangents, &face.normal)
    }

    /// Signed volume test: true when `p` lies in the closed element.
    /// Only used by tests and sanity checks.
    pub fn contains(&self, p: &[Rational]) -> bool {
        match self.dim() {
            1 => p[0] >= Rational::zero() && p[0] <= Rational::one(),
            2 => {
                let n = self.vertices.len();
                let loop_ = planar_loop(self);
                (0..n).all(|i| {
                    let a = &self.vertices[loop_[i]];
                    let b = &self.vertices[loop_[(i + 1) % n]];
                    cross2(&sub(b, a), &sub(p, a)) >= Rational::zero()
                })
            }
            _ => self.faces.iter().all(|f| dot(&f.normal, &sub(p, &self.vertices[f.vertices[0]])) <= Rational::zero()),
        }
    }
}

fn centroid(pts: &[Point]) -> Point {
    let n = qi(pts.len() as i64);
    (0..pts[0].len()).map(|i| pts.iter().map(|p| p[i].clone()).fold(Rational::zero(), |a, b| a + b) / &n).collect()
}

/// Vertex order around a 2D element, counter-clockwise.
fn planar_loop(k: &ReferenceElement) -> Vec<usize> {
    match k.kind {
        ElementKind::Triangle => vec![0, 1, 2],
        _ => (0..k.vertices.len()).collect(),
    }
}

fn make_edges(vertices: &[Point], pairs: &[[usize; 2]]) -> Vec<Edge> {
    pairs
        .iter()
        .map(|&[a, b]| {
            let (a, b) = (a.min(b), a.max(b));
            let tangent = sub(&vertices[b], &vertices[a]);
            let chart = AffineMap::from_frame(&vertices[a], core::slice::from_ref(&tangent));
            Edge { vertices: [a, b], tangent, chart }
        })
        .collect()
}

fn make_face(vertices: &[Point], interior: &[Rational], chart_vertices: &[usize]) -> Face {
    let shape = if chart_vertices.len() == 3 { ElementKind::Triangle } else { ElementKind::Square };
    let o = &vertices[chart_vertices[0]];
    let a = sub(&vertices[chart_vertices[1]], o);
    let b = sub(&vertices[*chart_vertices.last().unwrap()], o);
    if shape == ElementKind::Square {
        // parallelogram check
        let c = sub(&vertices[chart_vertices[2]], o);
        debug_assert_eq!(c, a.iter().zip(&b).map(|(x, y)| x + y).collect::<Point>());
    }
    let mut normal = cross(&a, &b);
    let outward = dot(&normal, &sub(o, interior)) > Rational::zero();
    let mut loop_ = chart_vertices.to_vec();
    if !outward {
        normal = normal.into_iter().map(|v| -v).collect();
        loop_.reverse();
    }
    let chart = AffineMap::from_frame(o, &[a.clone(), b.clone()]);
    Face { shape, vertices: loop_, chart_vertices: chart_vertices.to_vec(), chart, tangents: [a, b], normal }
}

/// The reference element of the given kind.
///
/// Vertex numbering:
/// * interval `0, 1`; triangle `(0,0), (1,0), (0,1)`;
///   square `(0,0), (1,0), (1,1), (0,1)`
/// * tet: origin then the unit points on x, y, z
/// * cube: vertex `x + 2y + 4z` sits at `(x, y, z)`
/// * prism: the triangle at `z = 0`, then at `z = 1`
/// * pyramid: the unit square at `z = 0`, then the apex `(0,0,1)`
///
/// Face charts follow the coordinate axes where possible; on the prism the
/// second chart coordinate of every quadrilateral face is `z`.
pub fn make_reference(kind: ElementKind) -> Result<ReferenceElement, Error> {
    let (vertices, edges, faces): (Vec<Point>, Vec<[usize; 2]>, Vec<Vec<usize>>) = match kind {
        ElementKind::Interval => (vec![pt(&[0]), pt(&[1])], vec![[0, 1]], vec![]),
        ElementKind::Triangle => (vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1])], vec![[0, 1], [0, 2], [1, 2]], vec![]),
        ElementKind::Square => (
            vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[1, 1]), pt(&[0, 1])],
            vec![[0, 1], [1, 2], [2, 3], [0, 3]],
            vec![],
        ),
        ElementKind::Polygon => return Err(Error::BadSpec("polygons are built with make_polygon".into())),
        ElementKind::Tet => (
            vec![pt(&[0, 0, 0]), pt(&[1, 0, 0]), pt(&[0, 1, 0]), pt(&[0, 0, 1])],
            vec![[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]],
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        ),
        ElementKind::Cube => {
            let v = (0..8).map(|i| pt(&[i & 1, (i >> 1) & 1, (i >> 2) & 1])).collect();
            let e = vec![
                [0, 1], [2, 3], [4, 5], [6, 7],
                [0, 2], [1, 3], [4, 6], [5, 7],
                [0, 4], [1, 5], [2, 6], [3, 7],
            ];
            let f = vec![
                vec![0, 2, 6, 4],
                vec![1, 3, 7, 5],
                vec![0, 1, 5, 4],
                vec![2, 3, 7, 6],
                vec![0, 1, 3, 2],
                vec![4, 5, 7, 6],
            ];
            (v, e, f)
        }
        ElementKind::Prism => (
            vec![pt(&[0, 0, 0]), pt(&[1, 0, 0]), pt(&[0, 1, 0]), pt(&[0, 0, 1]), pt(&[1, 0, 1]), pt(&[0, 1, 1])],
            vec![[0, 1], [0, 2], [1, 2], [3, 4], [3, 5], [4, 5], [0, 3], [1, 4], [2, 5]],
            vec![vec![0, 1, 2], vec![3, 4, 5], vec![0, 1, 4, 3], vec![0, 2, 5, 3], vec![1, 2, 5, 4]],
        ),
        ElementKind::Pyramid => (
            vec![pt(&[0, 0, 0]), pt(&[1, 0, 0]), pt(&[1, 1, 0]), pt(&[0, 1, 0]), pt(&[0, 0, 1])],
            vec![[0, 1], [1, 2], [2, 3], [0, 3], [0, 4], [1, 4], [2, 4], [3, 4]],
            vec![vec![0, 1, 2, 3], vec![0, 1, 4], vec![0, 3, 4], vec![1, 2, 4], vec![3, 2, 4]],
        ),
    };
    let interior = centroid(&vertices);
    let edges = make_edges(&vertices, &edges);
    let faces = faces.iter().map(|cv| make_face(&vertices, &interior, cv)).collect();
    let factors = if kind == ElementKind::Pyramid { vec![Factor::one_minus_z()] } else { vec![] };
    Ok(ReferenceElement { kind, vertices, edges, faces, factors })
}

/// A strictly convex polygon with its edge functions and vertex functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolygonElement {
    pub element: ReferenceElement,
    /// `lambdas[i]` vanishes on the edge from vertex `i` to `i + 1` and
    /// has maximum one on the polygon.
    pub lambdas: Vec<Polynomial>,
    /// Wachspress coordinates, `xis[i](v_j) = delta_ij`.
    pub xis: Vec<RationalFunction>,
    /// Common denominator of the `xis` (constant for triangles and
    /// parallelograms, then not registered).
    pub denominator: Polynomial,
}

impl PolygonElement {
    pub fn num_vertices(&self) -> usize {
        self.element.vertices.len()
    }

    /// Edge index (into `element.edges`) of the edge from `v_i` to `v_{i+1}`.
    pub fn edge_index(&self, i: usize) -> usize {
        let n = self.num_vertices();
        self.element.edge_between(i % n, (i + 1) % n).unwrap()
    }
}

/// Builds a polygon from counter-clockwise vertices.
pub fn make_polygon(vertices: &[Point]) -> Result<PolygonElement, Error> {
    let n = vertices.len();
    if n < 3 || vertices.iter().any(|v| v.len() != 2) {
        return Err(Error::BadSpec("a polygon needs at least three planar vertices".into()));
    }
    // every vertex strictly left of every non-incident edge, and consecutive
    // edges turn left
    for i in 0..n {
        let a = &vertices[i];
        let b = &vertices[(i + 1) % n];
        let e = sub(b, a);
        for (j, p) in vertices.iter().enumerate() {
            if j == i || j == (i + 1) % n {
                continue;
            }
            let s = cross2(&e, &sub(p, a));
            if s.is_zero() {
                return Err(Error::CollinearVertices);
            }
            if s.is_negative() {
                return Err(Error::NonConvex);
            }
        }
    }
    let ell: Vec<Polynomial> = (0..n)
        .map(|i| {
            let a = &vertices[i];
            let e = sub(&vertices[(i + 1) % n], a);
            // det(e, x - a) = e0 (y - a1) - e1 (x - a0)
            let c0 = &e[1] * &a[0] - &e[0] * &a[1];
            Polynomial::affine(2, c0, &[-e[1].clone(), e[0].clone()])
        })
        .collect();
    let lambdas = ell
        .iter()
        .map(|l| {
            let m = vertices.iter().map(|v| l.eval(v)).max().unwrap();
            l.scale(&m.recip())
        })
        .collect();
    let weights: Vec<Polynomial> = (0..n)
        .map(|i| {
            let prev = &vertices[(i + n - 1) % n];
            let area = cross2(&sub(&vertices[i], prev), &sub(&vertices[(i + 1) % n], &vertices[i]));
            let mut w = Polynomial::constant(2, area);
            for (j, l) in ell.iter().enumerate() {
                if j != i && j != (i + n - 1) % n {
                    w = w.mul(l);
                }
            }
            w
        })
        .collect();
    let denominator = weights.iter().fold(Polynomial::zero(2), |a, w| a.add(w));
    let (factors, xis) = match Factor::normalize(&denominator) {
        None => {
            let c = denominator.as_constant().unwrap();
            (vec![], weights.iter().map(|w| RationalFunction::poly(w.scale(&c.recip()))).collect())
        }
        Some((fac, s)) => {
            let xis = weights.iter().map(|w| RationalFunction::new(w.scale(&s.recip()), vec![(fac.clone(), 1)])).collect();
            (vec![fac], xis)
        }
    };
    let pairs: Vec<[usize; 2]> = (0..n).map(|i| [i, (i + 1) % n]).collect();
    let edges = make_edges(vertices, &pairs);
    let element = ReferenceElement { kind: ElementKind::Polygon, vertices: vertices.to_vec(), edges, faces: vec![], factors };
    Ok(PolygonElement { element, lambdas, xis, denominator })
}

/// Reads a polygon vertex file: one vertex per line, `x y` as rationals
/// `p/q` (or integers). Blank lines and lines starting with `#` are skipped.
pub fn parse_polygon_vertices(text: &str) -> Result<Vec<Point>, Error> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(Error::BadSpec(alloc::format!("line {}: expected `x y`", n + 1)));
        }
        let p = parts
            .iter()
            .map(|t| crate::qlinalg::parse_rational(t).ok_or_else(|| Error::BadSpec(alloc::format!("line {}: `{}` is not a rational", n + 1, t))))
            .collect::<Result<Point, _>>()?;
        out.push(p);
    }
    Ok(out)
}

/// A convex pentagon with small rational coordinates.
pub fn sample_pentagon() -> Vec<Point> {
    vec![pt(&[0, 0]), pt(&[2, 0]), pt(&[3, 2]), pt(&[1, 3]), pt(&[-1, 1])]
}

/// A convex hexagon with small rational coordinates.
pub fn sample_hexagon() -> Vec<Point> {
    vec![pt(&[0, 0]), pt(&[2, 0]), pt(&[4, 1]), pt(&[4, 3]), pt(&[1, 4]), pt(&[-1, 2])]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::q;

    #[test]
    fn counts() {
        let t = make_reference(ElementKind::Tet).unwrap();
        assert_eq!((t.vertices.len(), t.edges.len(), t.faces.len()), (4, 6, 4));
        let p = make_reference(ElementKind::Pyramid).unwrap();
        assert_eq!((p.vertices.len(), p.edges.len(), p.faces.len()), (5, 8, 5));
        for k in [ElementKind::Tet, ElementKind::Cube, ElementKind::Prism, ElementKind::Pyramid] {
            assert_eq!(make_reference(k).unwrap().euler_characteristic(), 2, "{k}");
        }
    }

    #[test]
    fn frames() {
        let c = make_reference(ElementKind::Cube).unwrap();
        let z0 = c.faces.iter().position(|f| f.vertices.iter().all(|&v| v < 4)).unwrap();
        let (chart, _, n) = c.face_frame(z0);
        assert_eq!(n, &pt(&[0, 0, -1]));
        assert_eq!(chart.apply(&[q(1, 3), q(2, 5)]), vec![q(1, 3), q(2, 5), qi(0)]);
        let p = make_reference(ElementKind::Pyramid).unwrap();
        let n = &p.faces[3].normal;
        assert!(n[1].is_zero() && n[0] == n[2] && n[0].is_positive());
        let t = make_reference(ElementKind::Tet).unwrap();
        let n = &t.faces[3].normal;
        assert!(n[0] == n[1] && n[1] == n[2] && n[0].is_positive());
    }

    #[test]
    fn edges_orthogonal_to_normals() {
        for k in [ElementKind::Tet, ElementKind::Cube, ElementKind::Prism, ElementKind::Pyramid] {
            let r = make_reference(k).unwrap();
            for (i, e) in r.edges.iter().enumerate() {
                let fs = r.faces_of_edge(i);
                assert_eq!(fs.len(), 2, "{k} edge {i}");
                for f in fs {
                    assert!(dot(&e.tangent, &r.faces[f].normal).is_zero());
                }
            }
        }
    }

    #[test]
    fn face_loops_are_counter_clockwise_from_outside() {
        for k in [ElementKind::Tet, ElementKind::Cube, ElementKind::Prism, ElementKind::Pyramid] {
            let r = make_reference(k).unwrap();
            for f in &r.faces {
                let v = &f.vertices;
                let a = sub(&r.vertices[v[1]], &r.vertices[v[0]]);
                let b = sub(&r.vertices[v[2]], &r.vertices[v[1]]);
                assert!(dot(&cross(&a, &b), &f.normal).is_positive());
            }
        }
    }

    #[test]
    fn chart_pseudo_inverse() {
        let r = make_reference(ElementKind::Prism).unwrap();
        for f in &r.faces {
            let pi = f.chart.pseudo_inverse().unwrap();
            assert_eq!(pi.compose(&f.chart), AffineMap::identity(2));
        }
    }

    #[test]
    fn polygon_checks() {
        let bad = vec![pt(&[0, 0]), pt(&[2, 0]), pt(&[1, 1]), pt(&[2, 2]), pt(&[0, 2])];
        assert_eq!(make_polygon(&bad), Err(Error::NonConvex));
        let col = vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[2, 0]), pt(&[0, 2])];
        assert_eq!(make_polygon(&col), Err(Error::CollinearVertices));
    }

    #[test]
    fn wachspress_properties() {
        for vs in [sample_pentagon(), sample_hexagon(), vec![pt(&[0, 0]), pt(&[1, 0]), pt(&[1, 1]), pt(&[0, 1])]] {
            let p = make_polygon(&vs).unwrap();
            let n = vs.len();
            let mut sum = RationalFunction::zero(2);
            let mut sx = RationalFunction::zero(2);
            for (i, xi) in p.xis.iter().enumerate() {
                for (j, v) in vs.iter().enumerate() {
                    assert_eq!(xi.eval(v).unwrap(), if i == j { qi(1) } else { qi(0) });
                }
                sum = sum.add(xi);
                sx = sx.add(&xi.mul_poly(&Polynomial::constant(2, vs[i][0].clone())));
            }
            assert!(sum.equal(&RationalFunction::constant(2, qi(1))));
            assert!(sx.equal(&RationalFunction::poly(Polynomial::var(2, 0))));
            // linear on every edge
            for e in &p.element.edges {
                for xi in &p.xis {
                    let tr = xi.substitute_affine(&e.chart).unwrap();
                    assert!(tr.as_polynomial().is_some_and(|q| q.degree().unwrap_or(0) <= 1));
                }
            }
            for (i, l) in p.lambdas.iter().enumerate() {
                assert!(l.eval(&vs[i]).is_zero() && l.eval(&vs[(i + 1) % n]).is_zero());
                assert_eq!(vs.iter().map(|v| l.eval(v)).max().unwrap(), qi(1));
            }
            if n == 4 {
                assert!(p.xis.iter().all(|x| x.is_polynomial()));
            } else {
                assert_eq!(p.element.factors.len(), 1);
                assert_eq!(p.denominator.degree(), Some(n as u32 - 3));
            }
        }
    }

    #[test]
    fn triangle_wachspress_is_barycentric() {
        let p = make_polygon(&[pt(&[0, 0]), pt(&[1, 0]), pt(&[0, 1])]).unwrap();
        let x = Polynomial::var(2, 0);
        let y = Polynomial::var(2, 1);
        assert!(p.xis[1].equal(&RationalFunction::poly(x.clone())));
        assert!(p.xis[0].equal(&RationalFunction::poly(Polynomial::one(2).sub(&x).sub(&y))));
    }
}

//! Exactness, bubbles, compatibility, enrichment properties, M-index,
//! edge compatibility of face sequences and trace matching across a
//! shared face of two mapped elements.
//!
//! Every check is a comparison of ranks on a common coordinatization;
//! failures are verdicts in the reports, not errors.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::calculus::{diff, integrate, pullback, trace_e, trace_h, trace_v, DiffOp, Entity, PullbackKind};
use crate::geometry::{cross, AffineMap, ElementKind, ReferenceElement};
use crate::polyalg::{Field, RationalFunction};
use crate::qlinalg::Rational;
use crate::spaces::{build_face_sequence, build_sequence, FaceSequenceId, FamilyBuild, FunctionSpace, SequenceSpec, Shape};
use crate::{make_reference, Error};

/// Which full trace (or the mean) defines a bubble space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BubbleKind {
    H,
    E,
    V,
    /// Zero mean.
    W,
}

/// One evaluated identity or containment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub name: String,
    pub lhs: i64,
    pub rhs: i64,
    pub pass: bool,
}

impl Verdict {
    fn eq(name: impl Into<String>, lhs: usize, rhs: usize) -> Verdict {
        Verdict::signed(name, lhs as i64, rhs as i64)
    }

    fn signed(name: impl Into<String>, lhs: i64, rhs: i64) -> Verdict {
        Verdict { name: name.into(), lhs, rhs, pass: lhs == rhs }
    }

    /// A containment `A ⊂ B`, recorded as `dim(A + B)` against `dim B`.
    fn sub(name: impl Into<String>, sum: usize, big: usize) -> Verdict {
        Verdict::eq(name, sum, big)
    }

    fn flag(name: impl Into<String>, pass: bool) -> Verdict {
        Verdict { name: name.into(), lhs: pass as i64, rhs: 1, pass }
    }
}

fn all_pass(vs: &[Verdict]) -> bool {
    vs.iter().all(|v| v.pass)
}

// ---------------------------------------------------------------------------
// Exactness

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessReport {
    pub dims: Vec<usize>,
    pub verdicts: Vec<Verdict>,
    pub alternating_sum: i64,
    pub pass: bool,
}

impl ExactnessReport {
    /// The first failing verdict, if any.
    pub fn first_failure(&self) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| !v.pass)
    }
}

fn op_name(op: DiffOp) -> &'static str {
    match op {
        DiffOp::Grad => "grad",
        DiffOp::Curl2d | DiffOp::Curl3d => "curl",
        DiffOp::Div => "div",
    }
}

/// Checks `ker d_0 = constants`, `d_i(slot_i) ⊂ slot_{i+1}`,
/// `im d_i = ker d_{i+1}` and `im d_last = W`, plus the alternating sum.
pub fn check_exactness(seq: &SequenceSpec) -> ExactnessReport {
    let ops = seq.ops();
    let names = seq.slot_names();
    let images: Vec<FunctionSpace> = ops.iter().zip(&seq.slots).map(|(&op, s)| s.image(op)).collect();
    // rank d_i = dim image, kernel dim = dim slot - rank
    let mut verdicts = Vec::new();
    let h = &seq.slots[0];
    let one = Field::scalar(RationalFunction::constant(h.nvars(), Rational::one()));
    verdicts.push(Verdict::eq(format!("dim ker {} = 1", op_name(ops[0])), h.dim() - images[0].dim(), 1));
    verdicts.push(Verdict::flag("constants in H", h.contains(&one)));
    for (i, &op) in ops.iter().enumerate() {
        let next = &seq.slots[i + 1];
        let n = op_name(op);
        verdicts.push(Verdict::sub(format!("{} {} ⊂ {}", n, names[i], names[i + 1]), next.sum_dim(&images[i]), next.dim()));
        if i + 1 < ops.len() {
            let ker_next = next.dim() - images[i + 1].dim();
            verdicts.push(Verdict::eq(format!("im {} = ker {}", n, op_name(ops[i + 1])), images[i].dim(), ker_next));
        } else {
            verdicts.push(Verdict::eq(format!("{} onto {}", n, names[i + 1]), images[i].dim(), next.dim()));
        }
    }
    let alt = seq.alternating_sum();
    verdicts.push(Verdict::signed("alternating sum = 1", alt, 1));
    ExactnessReport { dims: seq.dims(), pass: all_pass(&verdicts), verdicts, alternating_sum: alt }
}

// ---------------------------------------------------------------------------
// Traces and bubbles

/// Image of every basis function on every boundary entity for `kind`.
fn full_traces(space: &FunctionSpace, kind: BubbleKind, k: &ReferenceElement) -> Result<Vec<Vec<Field>>, Error> {
    let ents: Vec<Entity> = crate::calculus::boundary_entities(k);
    space
        .basis()
        .iter()
        .map(|f| -> Result<Vec<Field>, Error> {
            match kind {
                BubbleKind::H => ents.iter().map(|&e| trace_h(k, e, f)).collect(),
                BubbleKind::E => ents.iter().map(|&e| trace_e(k, e, f)).collect(),
                BubbleKind::V => (0..k.faces.len()).map(|i| trace_v(k, i, f)).collect(),
                BubbleKind::W => {
                    let m = integrate(k, &f.0[0])?;
                    Ok(vec![Field::scalar(RationalFunction::constant(0, m))])
                }
            }
        })
        .collect()
}

/// The bubble subspace of `space`: vanishing full trace, or zero mean.
pub fn bubble(space: &FunctionSpace, kind: BubbleKind, k: &ReferenceElement) -> Result<FunctionSpace, Error> {
    if space.is_zero() {
        return Ok(space.clone());
    }
    let imgs = full_traces(space, kind, k)?;
    Ok(space.kernel_of(&imgs))
}

/// Subspace annihilated by a differential operator.
pub fn kernel_of_op(space: &FunctionSpace, op: DiffOp) -> FunctionSpace {
    let imgs: Vec<Vec<Field>> = space.basis().iter().map(|f| vec![diff(op, f)]).collect();
    space.kernel_of(&imgs)
}

/// Subspace with vanishing full trace of `kind` and vanishing `op`.
fn bubble_kernel(space: &FunctionSpace, kind: BubbleKind, op: DiffOp, k: &ReferenceElement) -> Result<FunctionSpace, Error> {
    if space.is_zero() {
        return Ok(space.clone());
    }
    let mut imgs = full_traces(space, kind, k)?;
    for (row, f) in imgs.iter_mut().zip(space.basis()) {
        row.push(diff(op, f));
    }
    Ok(space.kernel_of(&imgs))
}

fn trace_space(space: &FunctionSpace, shape: ElementKind, comps: usize, f: impl Fn(&Field) -> Result<Field, Error>) -> Result<FunctionSpace, Error> {
    Ok(space.map(shape.dim(), comps, f)?.with_kind(shape))
}

/// `tr_H`, `tr_E`, `tr_V` of a space onto an edge or a face, in chart variables.
pub fn entity_trace(space: &FunctionSpace, slot: BubbleKind, k: &ReferenceElement, e: Entity) -> Result<FunctionSpace, Error> {
    let shape = match e {
        Entity::Edge(_) => ElementKind::Interval,
        Entity::Face(i) => k.faces[i].shape,
        Entity::Vertex(_) => return Err(Error::BadSpec("vertex traces are values, not spaces".into())),
    };
    let n = shape.dim();
    match slot {
        BubbleKind::H => trace_space(space, shape, 1, |f| trace_h(k, e, f)),
        BubbleKind::E => trace_space(space, shape, if n == 1 { 1 } else { 2 }, |f| trace_e(k, e, f)),
        BubbleKind::V => match e {
            Entity::Face(i) => trace_space(space, shape, 1, |f| trace_v(k, i, f)),
            _ => Err(Error::BadSpec("normal traces live on faces".into())),
        },
        BubbleKind::W => Err(Error::BadSpec("L2 spaces have no trace".into())),
    }
}

/// Trace sequence of `seq` on an edge (2D or 3D) or face (3D).
pub fn trace_sequence(seq: &SequenceSpec, e: Entity) -> Result<SequenceSpec, Error> {
    let k = &seq.element;
    let (shape, kinds): (ElementKind, &[BubbleKind]) = match e {
        Entity::Edge(_) => (ElementKind::Interval, &[BubbleKind::H, BubbleKind::E]),
        Entity::Face(i) => (k.faces[i].shape, &[BubbleKind::H, BubbleKind::E, BubbleKind::V]),
        Entity::Vertex(_) => return Err(Error::BadSpec("no trace sequence on a vertex".into())),
    };
    let slots = kinds.iter().enumerate().map(|(i, &kind)| entity_trace(&seq.slots[i], kind, k, e)).collect::<Result<Vec<_>, _>>()?;
    Ok(SequenceSpec { element: make_reference(shape)?, label: format!("trace of {}", seq.label), family: seq.family, k: seq.k, slots })
}

/// Full trace dimension, `dim S - dim bubble(S)`.
pub fn trace_dim(space: &FunctionSpace, kind: BubbleKind, k: &ReferenceElement) -> Result<usize, Error> {
    Ok(space.dim() - bubble(space, kind, k)?.dim())
}

// ---------------------------------------------------------------------------
// Compatibility

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityReport {
    /// Exactness and compatibility of each trace sequence, by entity.
    pub entities: Vec<(Entity, bool)>,
    pub identities: Vec<Verdict>,
    pub pass: bool,
}

/// Recursive compatibility: every trace sequence is exact and compatible,
/// and the trace dimensions satisfy the vertex/edge/face counting identities.
pub fn check_compatibility(seq: &SequenceSpec) -> Result<CompatibilityReport, Error> {
    let k = &seq.element;
    let d = k.dim();
    let mut identities = Vec::new();
    let mut entities = Vec::new();
    let tr_h = trace_dim(seq.h(), BubbleKind::H, k)?;
    if d == 1 {
        identities.push(Verdict::eq("dim tr_H H = 2", tr_h, 2));
        return Ok(CompatibilityReport { pass: all_pass(&identities), entities, identities });
    }
    let iv = make_reference(ElementKind::Interval)?;
    // edge quantities, measured directly on the element's edges
    let mut sum_hb_e = 0;
    let mut sum_w_e = 0;
    for e in 0..k.edges.len() {
        let ts = trace_sequence(seq, Entity::Edge(e))?;
        sum_hb_e += bubble(ts.h(), BubbleKind::H, &iv)?.dim();
        sum_w_e += ts.w().dim();
        if d == 2 {
            let ok = check_exactness(&ts).pass && check_compatibility(&ts)?.pass;
            entities.push((Entity::Edge(e), ok));
        }
    }
    let nv = k.vertices.len();
    let tr_e = trace_dim(seq.e().unwrap(), BubbleKind::E, k)?;
    if d == 2 {
        identities.push(Verdict::eq("dim tr_H H = #V + Σ_e dim H̊(e)", tr_h, nv + sum_hb_e));
        identities.push(Verdict::eq("dim tr_E E = Σ_e dim W(e)", tr_e, sum_w_e));
    } else {
        let (mut sum_hb_f, mut sum_eb_f, mut sum_w_f) = (0, 0, 0);
        for f in 0..k.faces.len() {
            let ts = trace_sequence(seq, Entity::Face(f))?;
            sum_hb_f += bubble(ts.h(), BubbleKind::H, &ts.element)?.dim();
            sum_eb_f += bubble(ts.e().unwrap(), BubbleKind::E, &ts.element)?.dim();
            sum_w_f += ts.w().dim();
            let ok = check_exactness(&ts).pass && check_compatibility(&ts)?.pass;
            entities.push((Entity::Face(f), ok));
        }
        let tr_v = trace_dim(seq.v().unwrap(), BubbleKind::V, k)?;
        identities.push(Verdict::eq("dim tr_H H = #V + Σ_e dim H̊(e) + Σ_f dim H̊(f)", tr_h, nv + sum_hb_e + sum_hb_f));
        identities.push(Verdict::eq("dim tr_E E = Σ_e dim W(e) + Σ_f dim E̊(f)", tr_e, sum_w_e + sum_eb_f));
        identities.push(Verdict::eq("dim tr_V V = Σ_f dim W(f)", tr_v, sum_w_f));
    }
    let pass = all_pass(&identities) && entities.iter().all(|e| e.1);
    Ok(CompatibilityReport { entities, identities, pass })
}

/// Compares each trace sequence with the sequence expected on that entity.
pub fn check_boundary_families(seq: &SequenceSpec, boundary: &[(Entity, FaceSequenceId)]) -> Result<Vec<(Entity, bool)>, Error> {
    boundary
        .iter()
        .map(|&(e, id)| {
            let ts = trace_sequence(seq, e)?;
            let want = build_face_sequence(id)?;
            let ok = ts.slots.iter().zip(&want.slots).all(|(a, b)| a.equals(b));
            Ok((e, ok))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Enrichment properties

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaReport {
    pub dim_h: usize,
    pub dim_e: usize,
    /// Properties (i)-(iv) of δH followed by (i)-(iv) of δE; the latter
    /// hold vacuously in 2D.
    pub props: [bool; 8],
    pub details: Vec<Verdict>,
    /// Edge compatibility of the expected face sequences (3D).
    pub faces_edge_compatible: bool,
}

impl DeltaReport {
    pub fn pass(&self) -> bool {
        self.props.iter().all(|&p| p) && self.faces_edge_compatible
    }
}

/// Trace of a face space onto one of its edges, written in the element
/// edge's own chart (so that traces from the two adjacent faces compare).
fn face_space_on_edge(k: &ReferenceElement, f: usize, e: usize, space: &FunctionSpace, tangential: bool) -> Result<FunctionSpace, Error> {
    let face = &k.faces[f];
    let r = make_reference(face.shape)?;
    let [a, b] = k.edges[e].vertices;
    let cv = &face.chart_vertices;
    let le = r
        .edges
        .iter()
        .position(|le| {
            let (g0, g1) = (cv[le.vertices[0]], cv[le.vertices[1]]);
            (g0 == a && g1 == b) || (g0 == b && g1 == a)
        })
        .ok_or_else(|| Error::BadSpec("edge is not on this face".into()))?;
    let reversed = cv[r.edges[le].vertices[0]] != a;
    let flip = AffineMap::new(vec![vec![-Rational::one()]], vec![Rational::one()]);
    let kind = if tangential { BubbleKind::E } else { BubbleKind::H };
    let t = entity_trace(space, kind, &r, Entity::Edge(le))?;
    if !reversed {
        return Ok(t);
    }
    // the sign flip of a reversed tangent does not change the space
    trace_space(&t, ElementKind::Interval, 1, |g| g.substitute_affine(&flip))
}

/// For every edge shared by two faces, the H and tangential E traces of the
/// two face sequences agree as spaces. `faces[i]` lives on face `i` in
/// that face's chart variables.
pub fn check_edge_compatibility(k: &ReferenceElement, faces: &[SequenceSpec]) -> Result<bool, Error> {
    for e in 0..k.edges.len() {
        let fs = k.faces_of_edge(e);
        let tr: Vec<(FunctionSpace, FunctionSpace)> = fs
            .iter()
            .map(|&f| Ok((face_space_on_edge(k, f, e, faces[f].h(), false)?, face_space_on_edge(k, f, e, faces[f].e().unwrap(), true)?)))
            .collect::<Result<_, Error>>()?;
        for w in tr.windows(2) {
            if !w[0].0.equals(&w[1].0) || !w[0].1.equals(&w[1].1) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Sum over the element's edges of `dim H̊(e)` for the edge spaces induced
/// by the expected boundary sequences.
fn boundary_edge_bubbles(k: &ReferenceElement, boundary: &[SequenceSpec]) -> Result<usize, Error> {
    let iv = make_reference(ElementKind::Interval)?;
    let mut acc = 0;
    for e in 0..k.edges.len() {
        let h = if k.dim() == 2 {
            boundary[e].h().clone()
        } else {
            let f = k.faces_of_edge(e)[0];
            face_space_on_edge(k, f, e, boundary[f].h(), false)?
        };
        acc += bubble(&h, BubbleKind::H, &iv)?.dim();
    }
    Ok(acc)
}

/// Admissibility of the pre-enrichment sequence, then properties (i)-(iv)
/// of δH and, in 3D, of δE. `boundary[i]` is the expected sequence on edge
/// `i` (2D) or face `i` (3D), in chart variables.
pub fn check_delta_properties(
    admissible: &SequenceSpec,
    dh: &FunctionSpace,
    de: Option<&FunctionSpace>,
    boundary: &[SequenceSpec],
) -> Result<DeltaReport, Error> {
    let k = &admissible.element;
    let d = k.dim();
    let ents: Vec<Entity> = crate::calculus::boundary_entities(k);
    let bkinds: &[BubbleKind] = if d == 2 { &[BubbleKind::H, BubbleKind::E] } else { &[BubbleKind::H, BubbleKind::E, BubbleKind::V] };

    // admissibility
    for (j, &e) in ents.iter().enumerate() {
        for (i, &bk) in bkinds.iter().enumerate() {
            let t = entity_trace(&admissible.slots[i], bk, k, e)?;
            if !boundary[j].slots[i].contains_space(&t) {
                return Err(Error::AdmissibilityViolated(format!("{} trace on {:?} leaves the boundary space", admissible.slot_names()[i], e)));
            }
        }
    }
    let w = admissible.w();
    let one = Field::scalar(RationalFunction::constant(w.nvars(), Rational::one()));
    if !w.contains(&one) {
        return Err(Error::AdmissibilityViolated("constants are not in W".into()));
    }

    let mut details = Vec::new();
    let hg = admissible.h();

    // δH
    let mut ok_i = true;
    for (j, &e) in ents.iter().enumerate() {
        let t = entity_trace(dh, BubbleKind::H, k, e)?;
        ok_i &= boundary[j].h().contains_space(&t);
    }
    details.push(Verdict::flag("δH traces in boundary H", ok_i));
    let inter = hg.intersection_dim(dh);
    details.push(Verdict::eq("dim δH ∩ H^g = 0", inter, 0));
    let hb_g = bubble(hg, BubbleKind::H, k)?;
    let hb_sum = bubble(&hg.sum(dh), BubbleKind::H, k)?;
    let ok_iii = hb_sum.equals(&hb_g);
    details.push(Verdict::flag("bubbles of H^g ⊕ δH = bubbles of H^g", ok_iii));
    let mut rhs = k.vertices.len() as i64 + boundary_edge_bubbles(k, boundary)? as i64;
    if d == 3 {
        for (j, b) in boundary.iter().enumerate() {
            let r = make_reference(k.faces[j].shape)?;
            rhs += bubble(b.h(), BubbleKind::H, &r)?.dim() as i64;
        }
    }
    rhs += hb_g.dim() as i64 - hg.dim() as i64;
    let dim_h = dh.dim();
    details.push(Verdict::signed("dim δH formula", dim_h as i64, rhs));
    let mut props = [ok_i, inter == 0, ok_iii, dim_h as i64 == rhs, true, true, true, true];

    let mut dim_e = 0;
    let mut faces_edge_compatible = true;
    if d == 3 {
        let de = de.ok_or_else(|| Error::BadSpec("3D enrichment needs δE".into()))?;
        dim_e = de.dim();
        let vg = admissible.v().unwrap();
        let mut ok_i = true;
        for (j, &e) in ents.iter().enumerate() {
            let t = entity_trace(de, BubbleKind::E, k, e)?;
            ok_i &= boundary[j].e().unwrap().contains_space(&t);
        }
        details.push(Verdict::flag("δE tangential traces in boundary E", ok_i));
        let cde = de.image(DiffOp::Curl3d);
        let inter = vg.intersection_dim(&cde);
        details.push(Verdict::eq("dim curl δE ∩ V^g = 0", inter, 0));
        let lhs = bubble_kernel(&vg.sum(&cde), BubbleKind::V, DiffOp::Div, k)?;
        let rhs_sp = bubble_kernel(vg, BubbleKind::V, DiffOp::Div, k)?;
        let ok_iii = lhs.equals(&rhs_sp);
        details.push(Verdict::flag("div-free bubbles of V^g ⊕ curl δE = those of V^g", ok_iii));
        let mut rhs: i64 = boundary.iter().map(|b| b.w().dim() as i64).sum();
        rhs += bubble(admissible.w(), BubbleKind::W, k)?.dim() as i64;
        rhs += rhs_sp.dim() as i64 - vg.dim() as i64;
        details.push(Verdict::eq("dim curl δE = dim δE", cde.dim(), dim_e));
        details.push(Verdict::signed("dim δE formula", dim_e as i64, rhs));
        props[4] = ok_i;
        props[5] = inter == 0;
        props[6] = ok_iii;
        props[7] = dim_e as i64 == rhs && cde.dim() == dim_e;
        faces_edge_compatible = check_edge_compatibility(k, boundary)?;
    }
    Ok(DeltaReport { dim_h, dim_e, props, details, faces_edge_compatible })
}

// ---------------------------------------------------------------------------
// M-index

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MIndex {
    /// `dim M(∂K) - dim tr{div-free V} - dim tr{grad-free W}`.
    pub definition: i64,
    /// `Σ dim M(f) + dim W̊ + dim{div-free V̊} - dim V`.
    pub four_term: i64,
}

impl MIndex {
    pub fn agree(&self) -> bool {
        self.definition == self.four_term
    }
}

/// M-index of `(V, W)` with boundary space dimensions `m_dims`. In 2D `V`
/// is the `H(curl)` slot with the scalar curl and tangential traces.
pub fn m_index(k: &ReferenceElement, v: &FunctionSpace, w: &FunctionSpace, m_dims: &[usize]) -> Result<MIndex, Error> {
    let (op, kind) = match k.dim() {
        2 => (DiffOp::Curl2d, BubbleKind::E),
        3 => (DiffOp::Div, BubbleKind::V),
        _ => return Err(Error::Unsupported("M-index needs a 2D or 3D element".into())),
    };
    let m: i64 = m_dims.iter().map(|&x| x as i64).sum();
    let free = kernel_of_op(v, op);
    let tr_free = trace_dim(&free, kind, k)? as i64;
    let consts = kernel_of_op(w, DiffOp::Grad).dim() as i64;
    let free_b = bubble_kernel(v, kind, op, k)?.dim() as i64;
    let wb = bubble(w, BubbleKind::W, k)?.dim() as i64;
    Ok(MIndex { definition: m - tr_free - consts, four_term: m + wb + free_b - v.dim() as i64 })
}

// ---------------------------------------------------------------------------
// Whole-family report

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyReport {
    pub element: ElementKind,
    pub family: u8,
    pub k: u32,
    pub dims: Vec<usize>,
    pub exactness: ExactnessReport,
    pub compatibility: CompatibilityReport,
    pub boundary_match: Vec<(Entity, bool)>,
    pub delta: Option<DeltaReport>,
    pub m_index: Option<MIndex>,
    pub notes: Vec<String>,
}

impl FamilyReport {
    pub fn exact(&self) -> bool {
        self.exactness.pass
    }

    pub fn compatible(&self) -> bool {
        self.compatibility.pass && self.boundary_match.iter().all(|b| b.1)
    }

    pub fn pass(&self) -> bool {
        self.exact()
            && self.compatible()
            && self.delta.as_ref().map_or(true, DeltaReport::pass)
            && self.m_index.map_or(true, |m| m.agree())
    }
}

/// Runs every structural check on a family member.
pub fn verify_family(shape: &Shape, family: u8, k: u32) -> Result<FamilyReport, Error> {
    let b = build_sequence(shape, family, k)?;
    verify_build(&b)
}

/// As [`verify_family`], on an already assembled family.
pub fn verify_build(b: &FamilyBuild) -> Result<FamilyReport, Error> {
    let seq = &b.sequence;
    let el = &seq.element;
    let mut notes = Vec::new();
    let exactness = check_exactness(seq);
    let compatibility = check_compatibility(seq)?;
    let boundary_match = check_boundary_families(seq, &b.boundary)?;
    let (delta, m_index) = if el.dim() >= 2 {
        let bseqs = b.boundary.iter().map(|&(_, id)| build_face_sequence(id)).collect::<Result<Vec<_>, _>>()?;
        let delta = check_delta_properties(&b.admissible, &b.delta_h, b.delta_e.as_ref(), &bseqs)?;
        let adm = &b.admissible;
        let v = if el.dim() == 3 { adm.v().unwrap() } else { adm.e().unwrap() };
        let m_dims: Vec<usize> = bseqs.iter().map(|s| s.w().dim()).collect();
        let mi = m_index(el, v, adm.w(), &m_dims)?;
        if !mi.agree() {
            notes.push(format!("M-index forms disagree: {} vs {}", mi.definition, mi.four_term));
        }
        (Some(delta), Some(mi))
    } else {
        (None, None)
    };
    if let Some(id) = b.delta_h_id {
        if b.delta_h.dim() == 0 {
            notes.push(format!("{} at index {} is the zero space", id.tag.name(), id.index));
        }
    }
    for v in exactness.verdicts.iter().chain(&compatibility.identities).filter(|v| !v.pass) {
        notes.push(format!("failed: {} ({} vs {})", v.name, v.lhs, v.rhs));
    }
    for (e, ok) in compatibility.entities.iter().chain(&boundary_match) {
        if !ok {
            notes.push(format!("trace sequence on {:?} does not match", e));
        }
    }
    if let Some(d) = &delta {
        for v in d.details.iter().filter(|v| !v.pass) {
            notes.push(format!("failed: {} ({} vs {})", v.name, v.lhs, v.rhs));
        }
        if !d.faces_edge_compatible {
            notes.push("face sequences disagree on a shared edge".into());
        }
    }
    Ok(FamilyReport {
        element: el.kind,
        family: seq.family,
        k: seq.k,
        dims: seq.dims(),
        exactness,
        compatibility,
        boundary_match,
        delta,
        m_index,
        notes,
    })
}

// ---------------------------------------------------------------------------
// Hybrid patches

/// One element of a two-element patch: a family on a reference element
/// mapped to physical space, and the face that is shared.
#[derive(Clone, Debug)]
pub struct PatchSide {
    pub kind: ElementKind,
    pub family: u8,
    pub map: AffineMap,
    pub face: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatchReport {
    /// `[H, E, V]`: `max(dim(T_A + T_B) - dim T_A, dim(T_A + T_B) - dim T_B)`.
    pub mismatch: [usize; 3],
    pub dims_a: [usize; 3],
    pub dims_b: [usize; 3],
}

impl PatchReport {
    pub fn equal(&self) -> bool {
        self.mismatch == [0, 0, 0]
    }
}

fn physical_traces(side: &PatchSide, k: u32, chart: &AffineMap) -> Result<[FunctionSpace; 3], Error> {
    let seq = build_sequence(&Shape::reference(side.kind)?, side.family, k)?.sequence;
    let lin = chart.linear();
    let a: Vec<Rational> = (0..3).map(|r| lin.get(r, 0).clone()).collect();
    let b: Vec<Rational> = (0..3).map(|r| lin.get(r, 1).clone()).collect();
    let n = cross(&a, &b);
    let dot = |f: &Field, d: &[Rational]| -> RationalFunction {
        let mut acc = RationalFunction::zero(3);
        for (c, x) in f.0.iter().zip(d) {
            if !x.is_zero() {
                acc = acc.add(&c.scale(x));
            }
        }
        acc
    };
    let shape = make_reference(side.kind)?.faces[side.face].shape;
    let h = seq.h().map(2, 1, |f| pullback(PullbackKind::H1, &side.map, f)?.substitute_affine(chart))?.with_kind(shape);
    let e = seq.e().unwrap().map(2, 2, |f| {
        let g = pullback(PullbackKind::Curl, &side.map, f)?;
        Field(vec![dot(&g, &a), dot(&g, &b)]).substitute_affine(chart)
    })?
    .with_kind(shape);
    let v = seq.v().unwrap().map(2, 1, |f| {
        let g = pullback(PullbackKind::Div, &side.map, f)?;
        Field::scalar(dot(&g, &n)).substitute_affine(chart)
    })?
    .with_kind(shape);
    Ok([h, e, v])
}

/// Glues two mapped elements along a face and compares their H, tangential
/// E and normal V trace spaces on it, both written in the first element's
/// physical face chart.
pub fn check_hybrid_patch(a: &PatchSide, b: &PatchSide, k: u32) -> Result<PatchReport, Error> {
    let ra = make_reference(a.kind)?;
    let rb = make_reference(b.kind)?;
    let pts = |r: &ReferenceElement, s: &PatchSide| -> Vec<Vec<Rational>> {
        let mut v: Vec<Vec<Rational>> = r.faces[s.face].vertices.iter().map(|&i| s.map.apply(&r.vertices[i])).collect();
        v.sort();
        v
    };
    if a.face >= ra.faces.len() || b.face >= rb.faces.len() || pts(&ra, a) != pts(&rb, b) {
        return Err(Error::FacesDoNotMatch);
    }
    let chart = a.map.compose(&ra.faces[a.face].chart);
    let ta = physical_traces(a, k, &chart)?;
    let tb = physical_traces(b, k, &chart)?;
    let mut mismatch = [0; 3];
    for i in 0..3 {
        let s = ta[i].sum_dim(&tb[i]);
        mismatch[i] = (s - ta[i].dim()).max(s - tb[i].dim());
    }
    Ok(PatchReport { mismatch, dims_a: [ta[0].dim(), ta[1].dim(), ta[2].dim()], dims_b: [tb[0].dim(), tb[1].dim(), tb[2].dim()] })
}

/// Places reference `kind` (running `family`) on the far side of face
/// `face_a` of the mapped element `a`, gluing its own face `face_b` there.
/// The chart frames of the two faces are matched, so `face_b` must have
/// the same shape as `face_a`.
pub fn attach_across_face(a: &PatchSide, face_a: usize, kind: ElementKind, family: u8, face_b: usize) -> Result<PatchSide, Error> {
    let ra = make_reference(a.kind)?;
    let rb = make_reference(kind)?;
    let (fa, fb) = match (ra.faces.get(face_a), rb.faces.get(face_b)) {
        (Some(x), Some(y)) if x.shape == y.shape => (x, y),
        _ => return Err(Error::FacesDoNotMatch),
    };
    let la = a.map.linear();
    let phys = |v: &[Rational]| la.mul_vec(v);
    let origin_a = a.map.apply(&fa.chart.apply(&[Rational::zero(), Rational::zero()]));
    let origin_b = fb.chart.apply(&[Rational::zero(), Rational::zero()]);
    // outward normal of a, in physical space, up to a positive factor
    let (ta, tb) = (phys(&fa.tangents[0]), phys(&fa.tangents[1]));
    let mut na = cross(&ta, &tb);
    let inward = crate::geometry::sub(&a.map.apply(&ra.centroid()), &origin_a);
    if crate::geometry::dot(&na, &inward) > Rational::zero() {
        na = na.into_iter().map(|x| -x).collect();
    }
    let neg_na: Vec<Rational> = na.into_iter().map(|x| -x).collect();
    // L [a_b b_b n_b] = [a_a b_a -n_a]
    let cols = |u: &[Rational], v: &[Rational], w: &[Rational]| -> crate::QMatrix {
        crate::QMatrix::from_rows((0..3).map(|r| vec![u[r].clone(), v[r].clone(), w[r].clone()]).collect(), 3)
    };
    let src = cols(&fb.tangents[0], &fb.tangents[1], &fb.normal);
    let dst = cols(&ta, &tb, &neg_na);
    let lin = dst.mul(&src.inverse().ok_or(Error::SingularMap)?);
    let moved = lin.mul_vec(&origin_b);
    let offset = crate::geometry::sub(&origin_a, &moved);
    Ok(PatchSide { kind, family, map: AffineMap::from_matrix(lin, offset), face: face_b })
}

/// The affine map fixing the plane through `face` of `kind` and reflecting
/// the element to the other side, so the image shares the face with the
/// original.
pub fn reflect_across_face(kind: ElementKind, face: usize) -> Result<AffineMap, Error> {
    let r = make_reference(kind)?;
    let f = &r.faces[face];
    let o = &r.vertices[f.vertices[0]];
    let n = &f.normal;
    // x -> x - 2 ((x - o) . n / |n|^2) n
    let nn = f.normal_sq_len();
    let mut lin = vec![vec![Rational::zero(); 3]; 3];
    let mut off = vec![Rational::zero(); 3];
    let on: Rational = o.iter().zip(n).map(|(a, b)| a * b).sum();
    for i in 0..3 {
        for j in 0..3 {
            let delta = if i == j { Rational::one() } else { Rational::zero() };
            lin[i][j] = delta - Rational::from_integer(2.into()) * &n[i] * &n[j] / &nn;
        }
        off[i] = Rational::from_integer(2.into()) * &on * &n[i] / &nn;
    }
    Ok(AffineMap::new(lin, off))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{build_family, build_space, SpaceSpec};

    #[test]
    fn interval_exact() {
        let s = build_family(ElementKind::Interval, 1, 2).unwrap().sequence;
        let r = check_exactness(&s);
        assert!(r.pass);
        assert_eq!(r.dims, vec![4, 3]);
        assert!(check_compatibility(&s).unwrap().pass);
    }

    #[test]
    fn bubbles() {
        let iv = make_reference(ElementKind::Interval).unwrap();
        let p2 = build_space(ElementKind::Interval, &SpaceSpec::P(2)).unwrap();
        let b = bubble(&p2, BubbleKind::H, &iv).unwrap();
        assert_eq!(b.dim(), 1);
        assert!(b.contains(&Field::from_poly(crate::Polynomial::var(1, 0).mul(&crate::Polynomial::var(1, 0).sub(&crate::Polynomial::one(1))))));
        let tri = make_reference(ElementKind::Triangle).unwrap();
        let p2t = build_space(ElementKind::Triangle, &SpaceSpec::P(2)).unwrap();
        assert_eq!(bubble(&p2t, BubbleKind::H, &tri).unwrap().dim(), 0);
        for kind in [ElementKind::Interval, ElementKind::Triangle, ElementKind::Cube, ElementKind::Pyramid] {
            let r = make_reference(kind).unwrap();
            let p0 = build_space(kind, &SpaceSpec::P(0)).unwrap();
            assert_eq!(bubble(&p0, BubbleKind::W, &r).unwrap().dim(), 0);
        }
    }

    #[test]
    fn triangle_trace_identity() {
        let s = build_family(ElementKind::Triangle, 1, 0).unwrap().sequence;
        let r = check_compatibility(&s).unwrap();
        assert!(r.pass);
        assert_eq!((r.identities[0].lhs, r.identities[0].rhs), (6, 6));
    }

    #[test]
    fn broken_sequence_fails() {
        let s = build_family(ElementKind::Tet, 2, 1).unwrap().sequence;
        let broken = s.with_slot(1, s.slots[1].without(0));
        assert!(!check_exactness(&broken).pass);
    }

    #[test]
    fn reflection_fixes_face() {
        let r = make_reference(ElementKind::Pyramid).unwrap();
        for f in 0..r.faces.len() {
            let m = reflect_across_face(ElementKind::Pyramid, f).unwrap();
            for &v in &r.faces[f].vertices {
                assert_eq!(m.apply(&r.vertices[v]), r.vertices[v]);
            }
            assert_eq!(m.det(), -Rational::one());
        }
    }
}

//! Harmonic interpolators onto the slots of a compatible sequence and the
//! commuting-diagram check.
//!
//! For slot `s` every entity of dimension `j >= s` carries constraints:
//! vertex values when `j = s = 0`; moments of the trace against the full
//! top-slot trace space when `j = s > 0`; otherwise moments of the
//! derivative of the trace against derivatives of the slot bubbles on the
//! entity, plus moments of the trace against the bubbles the derivative
//! kills. Test spaces come from the bubble machinery, so the interpolators
//! follow whatever sequence they are given.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::One;

use crate::calculus::{diff, gram, sequence_ops, trace_h, trace_e, trace_v, DiffOp, Entity};
use crate::geometry::{ElementKind, ReferenceElement};
use crate::polyalg::{combine, Field, RationalFunction};
use crate::qlinalg::{mat_rank, QMatrix, Rational};
use crate::spaces::{FunctionSpace, SequenceSpec};
use crate::verify::{bubble, entity_trace, kernel_of_op, BubbleKind};
use crate::{make_reference, Error};

/// What a group of constraint rows measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// Point value at a vertex.
    Vertex,
    /// Trace against the top-slot trace space of an entity of the slot's own dimension.
    Top,
    /// Derivative of the trace against derivatives of bubbles.
    Derivative,
    /// Trace against bubbles with vanishing derivative.
    KernelBubble,
}

#[derive(Clone, Debug)]
enum Probe {
    Vertex(usize),
    Moment { shape: ElementKind, op: Option<DiffOp>, tests: Vec<Field> },
}

/// Constraint rows tied to one entity (`None` is the element itself).
#[derive(Clone, Debug)]
pub struct ConstraintGroup {
    pub entity: Option<Entity>,
    pub role: Role,
    probe: Probe,
}

impl ConstraintGroup {
    pub fn len(&self) -> usize {
        match &self.probe {
            Probe::Vertex(_) => 1,
            Probe::Moment { tests, .. } => tests.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The test functions of a moment group, in entity chart variables.
    pub fn tests(&self) -> &[Field] {
        match &self.probe {
            Probe::Vertex(_) => &[],
            Probe::Moment { tests, .. } => tests,
        }
    }
}

/// Assembled interpolation problem for one slot of a sequence.
#[derive(Clone, Debug)]
pub struct InterpolationSystem {
    pub kind: BubbleKind,
    pub slot: usize,
    pub space: FunctionSpace,
    pub groups: Vec<ConstraintGroup>,
    /// Row `i` holds every constraint evaluated on basis function `i`.
    pub matrix: QMatrix,
    element: ReferenceElement,
    solver: QMatrix,
}

fn slot_of(kind: BubbleKind, n: usize) -> Result<usize, Error> {
    match (kind, n) {
        (BubbleKind::H, _) => Ok(0),
        (BubbleKind::E, 2 | 3) => Ok(1),
        (BubbleKind::V, 3) => Ok(2),
        (BubbleKind::W, _) => Ok(n),
        _ => Err(Error::BadSpec(format!("no {:?} slot in dimension {}", kind, n))),
    }
}

fn kind_of(slot: usize, n: usize) -> BubbleKind {
    if slot == n {
        return BubbleKind::W;
    }
    [BubbleKind::H, BubbleKind::E, BubbleKind::V][slot]
}

/// Trace of a slot function onto `entity`, in chart variables.
fn restrict(k: &ReferenceElement, slot: usize, entity: Option<Entity>, u: &Field) -> Result<Field, Error> {
    let Some(e) = entity else { return Ok(u.clone()) };
    match (slot, e) {
        (0, _) => trace_h(k, e, u),
        (1, _) => trace_e(k, e, u),
        (2, Entity::Face(i)) => trace_v(k, i, u),
        _ => Err(Error::BadSpec(format!("slot {} has no trace on {:?}", slot, e))),
    }
}

fn entities_of_dim(k: &ReferenceElement, j: usize) -> Vec<Option<Entity>> {
    let n = k.dim();
    if j == n {
        return vec![None];
    }
    match j {
        0 => (0..k.vertices.len()).map(|v| Some(Entity::Vertex(v))).collect(),
        1 => (0..k.edges.len()).map(|e| Some(Entity::Edge(e))).collect(),
        _ => (0..k.faces.len()).map(|f| Some(Entity::Face(f))).collect(),
    }
}

fn constant(nvars: usize) -> Field {
    Field::scalar(RationalFunction::constant(nvars, Rational::one()))
}

fn constraint_groups(seq: &SequenceSpec, slot: usize) -> Result<Vec<ConstraintGroup>, Error> {
    let k = &seq.element;
    let n = k.dim();
    let space = &seq.slots[slot];
    let kind = kind_of(slot, n);
    let mut groups = Vec::new();
    for j in slot..=n {
        for entity in entities_of_dim(k, j) {
            if j == 0 {
                let Some(Entity::Vertex(v)) = entity else { unreachable!() };
                groups.push(ConstraintGroup { entity, role: Role::Vertex, probe: Probe::Vertex(v) });
                continue;
            }
            let (local, reference) = match entity {
                None => (space.clone(), k.clone()),
                Some(e) => {
                    let t = entity_trace(space, kind, k, e)?;
                    let r = make_reference(t.kind())?;
                    (t, r)
                }
            };
            let shape = reference.kind;
            if j == slot {
                let mut fns = bubble(&local, BubbleKind::W, &reference)?.basis().to_vec();
                fns.push(constant(j));
                let tests = FunctionSpace::span(shape, j, 1, fns).basis().to_vec();
                groups.push(ConstraintGroup { entity, role: Role::Top, probe: Probe::Moment { shape, op: None, tests } });
                continue;
            }
            let b = bubble(&local, kind, &reference)?;
            let op = sequence_ops(j)[slot];
            let d = b.image(op).basis().to_vec();
            if !d.is_empty() {
                groups.push(ConstraintGroup { entity, role: Role::Derivative, probe: Probe::Moment { shape, op: Some(op), tests: d } });
            }
            let z = kernel_of_op(&b, op).basis().to_vec();
            if !z.is_empty() {
                groups.push(ConstraintGroup { entity, role: Role::KernelBubble, probe: Probe::Moment { shape, op: None, tests: z } });
            }
        }
    }
    Ok(groups)
}

/// Evaluates every constraint of `groups` on each of `fns`.
fn evaluate(k: &ReferenceElement, slot: usize, groups: &[ConstraintGroup], fns: &[Field]) -> Result<Vec<Vec<Rational>>, Error> {
    let mut out = vec![Vec::new(); fns.len()];
    for g in groups {
        match &g.probe {
            Probe::Vertex(v) => {
                for (row, f) in out.iter_mut().zip(fns) {
                    let val = trace_h(k, Entity::Vertex(*v), f)?;
                    row.push(val.0[0].eval(&[]).ok_or(Error::DenominatorVanishes)?);
                }
            }
            Probe::Moment { shape, op, tests } => {
                let traced = fns
                    .iter()
                    .map(|f| {
                        let t = restrict(k, slot, g.entity, f)?;
                        Ok(match op {
                            Some(op) => diff(*op, &t),
                            None => t,
                        })
                    })
                    .collect::<Result<Vec<_>, Error>>()?;
                let m = gram(*shape, &traced, tests)?;
                for (i, row) in out.iter_mut().enumerate() {
                    row.extend_from_slice(m.row(i));
                }
            }
        }
    }
    Ok(out)
}

/// Assembles the interpolation system of the `kind` slot of `seq`.
pub fn build_system(kind: BubbleKind, seq: &SequenceSpec) -> Result<InterpolationSystem, Error> {
    let k = &seq.element;
    if k.kind == ElementKind::Polygon {
        return Err(Error::Unsupported("interpolation on polygons".into()));
    }
    let slot = slot_of(kind, k.dim())?;
    let space = seq.slots[slot].clone();
    let groups = constraint_groups(seq, slot)?;
    let rows: usize = groups.iter().map(|g| g.len()).sum();
    let size = space.dim();
    let vals = evaluate(k, slot, &groups, space.basis())?;
    let matrix = QMatrix::from_rows(vals, rows);
    if rows != size {
        return Err(Error::SingularSystem { rank: mat_rank(&matrix).min(size), size: size.max(rows) });
    }
    // coefficients c solve matrix^T c = constraint values
    let solver = matrix.transpose().inverse().ok_or_else(|| Error::SingularSystem { rank: mat_rank(&matrix), size })?;
    Ok(InterpolationSystem { kind, slot, space, groups, matrix, element: k.clone(), solver })
}

impl InterpolationSystem {
    pub fn constraint_count(&self) -> usize {
        self.groups.iter().map(|g| g.len()).sum()
    }

    /// Coefficients of the interpolant in the slot basis.
    pub fn coefficients(&self, u: &Field) -> Result<Vec<Rational>, Error> {
        let b = evaluate(&self.element, self.slot, &self.groups, core::slice::from_ref(u))?.pop().unwrap();
        Ok(self.solver.mul_vec(&b))
    }

    /// The unique slot member matching every constraint of `u`.
    pub fn apply(&self, u: &Field) -> Result<Field, Error> {
        let c = self.coefficients(u)?;
        if c.is_empty() {
            return Ok(Field::zero(self.space.nvars(), self.space.comps()));
        }
        Ok(combine(&c, self.space.basis()))
    }

    /// `Π b = b` for every basis function `b`.
    pub fn reproduces_basis(&self) -> Result<bool, Error> {
        for b in self.space.basis() {
            if !self.apply(b)?.equal(b) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// One-shot interpolation of `u` onto the `kind` slot of `seq`.
pub fn harmonic_interpolate(kind: BubbleKind, seq: &SequenceSpec, u: &Field) -> Result<Field, Error> {
    build_system(kind, seq)?.apply(u)
}

/// Interpolators for every slot of a sequence, built once.
#[derive(Clone, Debug)]
pub struct Interpolators {
    pub systems: Vec<InterpolationSystem>,
}

impl Interpolators {
    pub fn new(seq: &SequenceSpec) -> Result<Interpolators, Error> {
        let n = seq.element.dim();
        let systems = (0..=n).map(|s| build_system(kind_of(s, n), seq)).collect::<Result<_, _>>()?;
        Ok(Interpolators { systems })
    }

    fn dim(&self) -> usize {
        self.systems.len() - 1
    }

    /// Checks `d Π_s u = Π_{s+1} d u`.
    pub fn commutes(&self, slot: usize, u: &Field) -> Result<CommutingIdentity, Error> {
        let op = sequence_ops(self.dim())[slot];
        let lhs = diff(op, &self.systems[slot].apply(u)?);
        let rhs = self.systems[slot + 1].apply(&diff(op, u))?;
        let names = crate::spaces::slot_names(self.dim());
        let name = format!("{} Π_{} u = Π_{} {} u", op_symbol(op), names[slot], names[slot + 1], op_symbol(op));
        Ok(CommutingIdentity { name, pass: lhs.equal(&rhs) })
    }

    /// Every applicable identity; `inputs[s]` feeds the identity leaving slot `s`.
    pub fn check(&self, inputs: &[Field]) -> Result<CommutingReport, Error> {
        if inputs.len() != self.dim() {
            return Err(Error::BadSpec(format!("need {} inputs, got {}", self.dim(), inputs.len())));
        }
        let identities = inputs.iter().enumerate().map(|(s, u)| self.commutes(s, u)).collect::<Result<Vec<_>, _>>()?;
        let mut projection = true;
        for s in &self.systems {
            projection &= s.reproduces_basis()?;
        }
        Ok(CommutingReport { identities, projection })
    }
}

fn op_symbol(op: DiffOp) -> &'static str {
    match op {
        DiffOp::Grad => "∇",
        DiffOp::Curl2d | DiffOp::Curl3d => "∇×",
        DiffOp::Div => "∇·",
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutingIdentity {
    pub name: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutingReport {
    pub identities: Vec<CommutingIdentity>,
    /// Every interpolator fixes its slot basis.
    pub projection: bool,
}

impl CommutingReport {
    pub fn pass(&self) -> bool {
        self.projection && self.identities.iter().all(|i| i.pass)
    }
}

/// Builds the interpolators of `seq` and checks every commuting identity
/// on `inputs`, one per differential operator.
pub fn check_commuting(seq: &SequenceSpec, inputs: &[Field]) -> Result<CommutingReport, Error> {
    Interpolators::new(seq)?.check(inputs)
}

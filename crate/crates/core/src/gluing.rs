//! Exterior algebras of `H₁(F, S₊; F₂)` as modules over tensor powers of
//! `F₂[E]/(E²)`, and how they behave when `S₊` intervals are glued.
//!
//! A [`StandardBasis`] picks, per surface component, two circles per handle,
//! a circle around every `S₋`-meeting boundary circle but one, and the edges
//! of a spanning tree on the `S₊` components. The interval `I` acts on wedges
//! of these by removing one tree edge incident to `I`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2::{Cokernel, GF2Matrix, GF2Vector};
use crate::surface::{IntervalLabel, PlusVertex, SurfaceComponent, SutureCircle, SuturedSurfaceType};

/// One element of a standard basis of `H₁(F, S₊; F₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BasisElement {
    /// One of the two circles of handle `handle`; `second` picks which.
    Torus { comp: usize, handle: usize, second: bool },
    /// A circle parallel to boundary circle `circle`.
    Boundary { comp: usize, circle: usize },
    /// An edge of the spanning tree.
    Edge(PlusVertex, PlusVertex),
}

impl BasisElement {
    fn touches(&self, v: PlusVertex) -> bool {
        matches!(self, Self::Edge(a, b) if *a == v || *b == v)
    }
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Torus { comp, handle, second } => {
                write!(f, "c{comp}.h{handle}{}", if *second { "b" } else { "a" })
            }
            Self::Boundary { comp, circle } => write!(f, "c{comp}.b{circle}.loop"),
            Self::Edge(a, b) => write!(f, "{a}~{b}"),
        }
    }
}

/// A basis of `H₁(F, S₊; F₂)` built from circles and tree edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StandardBasis {
    pub elements: Vec<BasisElement>,
    /// Per component, the `S₋`-meeting boundary circle without a parallel circle.
    pub designated: Vec<usize>,
}

impl StandardBasis {
    /// The lowest `S₋`-meeting circle is left out, and the tree is a star
    /// centred at the last `S₊` component.
    pub fn default_for(s: &SuturedSurfaceType) -> Result<Self> {
        s.validate()?;
        let mut centres = BTreeMap::new();
        for c in 0..s.components.len() {
            if let Some(&v) = s.plus_vertices(c).last() {
                centres.insert(c, v);
            }
        }
        let designated = s
            .components
            .iter()
            .map(|c| c.boundary.iter().position(SutureCircle::meets_minus).expect("validated"))
            .collect();
        Self::build(s, designated, &centres)
    }

    // torus circles, boundary circles, then star edges, component by component
    fn build(s: &SuturedSurfaceType, designated: Vec<usize>, centres: &BTreeMap<usize, PlusVertex>) -> Result<Self> {
        let mut elements = Vec::new();
        for (ci, comp) in s.components.iter().enumerate() {
            for h in 0..comp.genus {
                elements.push(BasisElement::Torus { comp: ci, handle: h, second: false });
                elements.push(BasisElement::Torus { comp: ci, handle: h, second: true });
            }
            for (bi, b) in comp.boundary.iter().enumerate() {
                if b.meets_minus() && bi != designated[ci] {
                    elements.push(BasisElement::Boundary { comp: ci, circle: bi });
                }
            }
            if let Some(&centre) = centres.get(&ci) {
                for v in s.plus_vertices(ci) {
                    if v != centre {
                        elements.push(BasisElement::Edge(v, centre));
                    }
                }
            }
        }
        let basis = Self { elements, designated };
        basis.validate(s)?;
        Ok(basis)
    }

    /// Checks that the elements form a standard basis for `s`.
    pub fn validate(&self, s: &SuturedSurfaceType) -> Result<()> {
        let bad = |m: String| Err(Error::BasisMismatch(m));
        if self.designated.len() != s.components.len() {
            return bad("one designated circle per component is required".into());
        }
        let mut seen = BTreeSet::new();
        for e in &self.elements {
            if !seen.insert(*e) {
                return bad(format!("{e} is listed twice"));
            }
        }
        for (ci, comp) in s.components.iter().enumerate() {
            let des = self.designated[ci];
            if !comp.boundary.get(des).is_some_and(SutureCircle::meets_minus) {
                return bad(format!("designated circle {des} of component {ci} does not meet S-"));
            }
            let tori = self.elements.iter().filter(|e| matches!(e, BasisElement::Torus { comp, .. } if *comp == ci));
            let expected: BTreeSet<(usize, bool)> = (0..comp.genus).flat_map(|h| [(h, false), (h, true)]).collect();
            let found: BTreeSet<(usize, bool)> = tori
                .map(|e| match e {
                    BasisElement::Torus { handle, second, .. } => (*handle, *second),
                    _ => unreachable!(),
                })
                .collect();
            if found != expected {
                return bad(format!("component {ci} needs two circles for each of its {} handles", comp.genus));
            }
            let circles: BTreeSet<usize> = self
                .elements
                .iter()
                .filter_map(|e| match e {
                    BasisElement::Boundary { comp, circle } if *comp == ci => Some(*circle),
                    _ => None,
                })
                .collect();
            let wanted: BTreeSet<usize> =
                (0..comp.boundary.len()).filter(|&b| comp.boundary[b].meets_minus() && b != des).collect();
            if circles != wanted {
                return bad(format!("component {ci} has boundary circles {circles:?}, expected {wanted:?}"));
            }
            let vertices = s.plus_vertices(ci);
            let edges: Vec<(PlusVertex, PlusVertex)> = self
                .elements
                .iter()
                .filter_map(|e| match e {
                    BasisElement::Edge(a, b) if a.comp() == ci || b.comp() == ci => Some((*a, *b)),
                    _ => None,
                })
                .collect();
            if !is_spanning_tree(&vertices, &edges) {
                return bad(format!("edges on component {ci} do not form a spanning tree of its S+ components"));
            }
        }
        for e in &self.elements {
            let ok = match e {
                BasisElement::Torus { comp, .. } | BasisElement::Boundary { comp, .. } => *comp < s.components.len(),
                BasisElement::Edge(a, b) => a.comp() == b.comp() && a.comp() < s.components.len(),
            };
            if !ok {
                return bad(format!("{e} does not belong to the surface"));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    fn degree(&self, v: PlusVertex) -> usize {
        self.elements.iter().filter(|e| e.touches(v)).count()
    }

    fn edges_at(&self, v: PlusVertex) -> Vec<usize> {
        (0..self.elements.len()).filter(|&i| self.elements[i].touches(v)).collect()
    }
}

fn is_spanning_tree(vertices: &[PlusVertex], edges: &[(PlusVertex, PlusVertex)]) -> bool {
    if vertices.is_empty() {
        return edges.is_empty();
    }
    if edges.len() + 1 != vertices.len() {
        return false;
    }
    let index: BTreeMap<PlusVertex, usize> = vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut parent: Vec<usize> = (0..vertices.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for (a, b) in edges {
        let (Some(&ia), Some(&ib)) = (index.get(a), index.get(b)) else { return false };
        let (ra, rb) = (find(&mut parent, ia), find(&mut parent, ib));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    true
}

/// A vector space with commuting square-zero operators, one per label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EModule {
    pub dim: usize,
    pub actions: BTreeMap<String, GF2Matrix>,
    pub basis_tags: Vec<String>,
}

impl EModule {
    /// Checks shapes, `E² = 0` and pairwise commutation.
    pub fn new(dim: usize, actions: BTreeMap<String, GF2Matrix>, basis_tags: Vec<String>) -> Result<Self> {
        if basis_tags.len() != dim {
            return Err(Error::Shape(format!("{} tags for dimension {dim}", basis_tags.len())));
        }
        for (l, a) in &actions {
            if a.rows() != dim || a.cols() != dim {
                return Err(Error::Shape(format!("action {l} is {}x{}, expected {dim}x{dim}", a.rows(), a.cols())));
            }
            if !a.mul(a)?.is_zero() {
                return Err(Error::Domain(format!("action {l} does not square to zero")));
            }
        }
        for (l, a) in &actions {
            for (k, b) in actions.range::<String, _>((std::ops::Bound::Excluded(l), std::ops::Bound::Unbounded)) {
                if a.mul(b)? != b.mul(a)? {
                    return Err(Error::Domain(format!("actions {l} and {k} do not commute")));
                }
            }
        }
        Ok(Self { dim, actions, basis_tags })
    }

    pub fn action(&self, label: &str) -> Result<&GF2Matrix> {
        self.actions.get(label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn labels(&self) -> Vec<String> {
        self.actions.keys().cloned().collect()
    }

    /// Renames labels; unmapped labels are kept.
    pub fn relabel(&self, map: &BTreeMap<String, String>) -> Self {
        let actions = self
            .actions
            .iter()
            .map(|(l, a)| (map.get(l).cloned().unwrap_or_else(|| l.clone()), a.clone()))
            .collect();
        Self { dim: self.dim, actions, basis_tags: self.basis_tags.clone() }
    }

    /// `self ⊗ other` over `F₂`, with labels prefixed `1:` and `2:`.
    /// Basis index `i·dim(other) + j` holds `tag_i ⊗ tag_j`.
    pub fn tensor(&self, other: &Self) -> Self {
        let (i1, i2) = (GF2Matrix::identity(self.dim), GF2Matrix::identity(other.dim));
        let mut actions = BTreeMap::new();
        for (l, a) in &self.actions {
            actions.insert(format!("1:{l}"), a.kron(&i2));
        }
        for (l, a) in &other.actions {
            actions.insert(format!("2:{l}"), i1.kron(a));
        }
        let mut basis_tags = Vec::with_capacity(self.dim * other.dim);
        for t1 in &self.basis_tags {
            for t2 in &other.basis_tags {
                basis_tags.push(format!("{t1}|{t2}"));
            }
        }
        Self { dim: self.dim * other.dim, actions, basis_tags }
    }

    /// Ranks of all products of distinct actions, keyed by the sorted label set.
    pub fn rank_profile(&self) -> Vec<(Vec<String>, usize)> {
        let labels = self.labels();
        let mut out = Vec::new();
        for mask in 0u64..1 << labels.len() {
            let mut m = GF2Matrix::identity(self.dim);
            let mut set = Vec::new();
            for (i, l) in labels.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    m = m.mul(&self.actions[l]).expect("square");
                    set.push(l.clone());
                }
            }
            out.push((set, m.rank()));
        }
        out.sort();
        out
    }
}

fn wedge_tag(basis: &StandardBasis, mask: u64) -> String {
    let parts: Vec<String> =
        (0..basis.len()).filter(|&i| mask >> i & 1 == 1).map(|i| basis.elements[i].to_string()).collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("^")
    }
}

/// `∧*H₁(F, S₊; F₂)` in the wedge basis of `basis`, with one action per `S₊` interval.
pub fn wedge_module(s: &SuturedSurfaceType, basis: &StandardBasis) -> Result<EModule> {
    basis.validate(s)?;
    let n = basis.len();
    if n > 20 {
        return Err(Error::Domain(format!("H1 has rank {n}; wedge modules are limited to rank 20")));
    }
    let dim = 1usize << n;
    let mut actions = BTreeMap::new();
    for label in s.intervals() {
        let incident: Vec<usize> = basis.edges_at(PlusVertex::Interval(label));
        let mut m = GF2Matrix::zeros(dim, dim);
        for x in 0..dim {
            for &c in &incident {
                if x >> c & 1 == 1 {
                    m.flip(x & !(1 << c), x);
                }
            }
        }
        actions.insert(label.to_string(), m);
    }
    let tags = (0..dim as u64).map(|x| wedge_tag(basis, x)).collect();
    EModule::new(dim, actions, tags)
}

/// Quotient of `M` by the image of `E_{l1} + E_{l2}`, i.e. `M ⊗ F₂[E]/(E²)`
/// over the two actions. The projection and section used are returned too.
pub fn tensor_reduce_with(m: &EModule, l1: &str, l2: &str) -> Result<(EModule, Cokernel)> {
    if l1 == l2 {
        return Err(Error::Domain(format!("cannot glue {l1} to itself")));
    }
    let x = m.action(l1)?.add(m.action(l2)?)?;
    let coker = x.cokernel_basis();
    let section = coker.section();
    let mut actions = BTreeMap::new();
    for (l, a) in &m.actions {
        if l != l1 && l != l2 {
            actions.insert(l.clone(), coker.projection.mul(&a.mul(&section)?)?);
        }
    }
    let tags = coker.complement.iter().map(|&i| m.basis_tags[i].clone()).collect();
    Ok((EModule::new(coker.dim(), actions, tags)?, coker))
}

pub fn tensor_reduce(m: &EModule, l1: &str, l2: &str) -> Result<EModule> {
    Ok(tensor_reduce_with(m, l1, l2)?.0)
}

/// Pairs of labels to glue, the first of each from the first module.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GluingSpec {
    pub pairs: Vec<(IntervalLabel, IntervalLabel)>,
}

impl GluingSpec {
    /// Parses `c0.b0.i0:c0.b0.i1,…`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (a, b) = item
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("gluing pair {item:?} is not of the form A:B")))?;
            pairs.push((a.parse()?, b.parse()?));
        }
        Ok(Self { pairs })
    }

    fn check(&self, s1: &SuturedSurfaceType, s2: &SuturedSurfaceType) -> Result<()> {
        let (mut left, mut right) = (BTreeSet::new(), BTreeSet::new());
        for &(a, b) in &self.pairs {
            s1.check_interval(a)?;
            s2.check_interval(b)?;
            if !left.insert(a) || !right.insert(b) {
                return Err(Error::Domain("gluing pairs must use distinct intervals".into()));
            }
        }
        Ok(())
    }
}

/// `M1 ⊗ M2` reduced once for each glued pair.
pub fn glue_modules(m1: &EModule, m2: &EModule, spec: &GluingSpec) -> Result<EModule> {
    let mut m = m1.tensor(m2);
    for (a, b) in &spec.pairs {
        m = tensor_reduce(&m, &format!("1:{a}"), &format!("2:{b}"))?;
    }
    Ok(m)
}

/// How two glued intervals sit relative to each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GluingCase {
    DistinctComponents,
    SameCircle,
    SameCircleOnly,
    DifferentCircles,
    DifferentCirclesOnly,
}

impl GluingCase {
    pub fn of(s: &SuturedSurfaceType, i1: IntervalLabel, i2: IntervalLabel) -> Self {
        if i1.comp != i2.comp {
            return Self::DistinctComponents;
        }
        let others = s.plus_vertices(i1.comp).len() > 2;
        match (i1.circle == i2.circle, others) {
            (true, true) => Self::SameCircle,
            (true, false) => Self::SameCircleOnly,
            (false, true) => Self::DifferentCircles,
            (false, false) => Self::DifferentCirclesOnly,
        }
    }
}

/// A glued surface together with where everything went.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfGluing {
    pub surface: SuturedSurfaceType,
    pub case: GluingCase,
    pub comp_map: Vec<usize>,
    /// Handles of an old component start at this index in the new one.
    pub handle_offset: Vec<usize>,
    /// Boundary circles other than those of `I1`, `I2`.
    pub circle_map: BTreeMap<(usize, usize), (usize, usize)>,
    /// Every interval other than `I1`, `I2`.
    pub labels: BTreeMap<IntervalLabel, IntervalLabel>,
    /// The circle carrying the old boundary segment from `I1` to `I2`.
    pub sigma_circle: (usize, usize),
}

impl SelfGluing {
    fn map_vertex(&self, v: PlusVertex) -> Option<PlusVertex> {
        match v {
            PlusVertex::Interval(l) => self.labels.get(&l).map(|&n| PlusVertex::Interval(n)),
            PlusVertex::Circle(c, b) => self.circle_map.get(&(c, b)).map(|&(nc, nb)| PlusVertex::Circle(nc, nb)),
        }
    }
}

fn check_pair(s: &SuturedSurfaceType, i1: IntervalLabel, i2: IntervalLabel) -> Result<()> {
    s.validate()?;
    s.check_interval(i1)?;
    s.check_interval(i2)?;
    if i1 == i2 {
        return Err(Error::Domain(format!("cannot glue {i1} to itself")));
    }
    Ok(())
}

// intervals of a circle after `i`, in order, skipping `i`
fn after(i: usize, idx: usize, k: usize) -> usize {
    (idx + k - i - 1) % k
}

/// Glues `I1` to `I2` so that the result is oriented.
pub fn glue_self(s: &SuturedSurfaceType, i1: IntervalLabel, i2: IntervalLabel) -> Result<SelfGluing> {
    check_pair(s, i1, i2)?;
    let case = GluingCase::of(s, i1, i2);
    let n = s.components.len();
    let k_of = |l: IntervalLabel| s.components[l.comp].boundary[l.circle].plus_intervals();
    let (k1, k2) = (k_of(i1), k_of(i2));
    let mut labels = BTreeMap::new();
    let mut circle_map = BTreeMap::new();
    let mut handle_offset = vec![0; n];
    let mut comps: Vec<SurfaceComponent> = Vec::new();
    let mut comp_map = vec![0; n];
    let sigma_circle;

    if i1.comp != i2.comp {
        let (c1, c2) = (i1.comp, i2.comp);
        for c in 0..n {
            if c == c2 {
                continue;
            }
            comp_map[c] = comps.len();
            comps.push(s.components[c].clone());
        }
        comp_map[c2] = comp_map[c1];
        let nc = comp_map[c1];
        let (a, b) = (&s.components[c1], &s.components[c2]);
        let mut boundary = a.boundary.clone();
        boundary[i1.circle] = SutureCircle::alternating_or_minus(k1 + k2 - 2);
        let len1 = boundary.len();
        boundary.extend(b.boundary.iter().enumerate().filter(|&(bi, _)| bi != i2.circle).map(|(_, c)| *c));
        comps[nc] = SurfaceComponent { genus: a.genus + b.genus, boundary };
        handle_offset[c2] = a.genus;
        for c in 0..n {
            for bi in 0..s.components[c].boundary.len() {
                let target = if c == c1 {
                    (bi != i1.circle).then_some((nc, bi))
                } else if c == c2 {
                    (bi != i2.circle).then(|| (nc, len1 + bi - usize::from(bi > i2.circle)))
                } else {
                    Some((comp_map[c], bi))
                };
                if let Some(t) = target {
                    circle_map.insert((c, bi), t);
                }
            }
        }
        for l in s.intervals() {
            let target = if l.comp == c1 && l.circle == i1.circle {
                (l.index != i1.index).then(|| IntervalLabel::new(nc, i1.circle, after(i1.index, l.index, k1)))
            } else if l.comp == c2 && l.circle == i2.circle {
                (l.index != i2.index).then(|| IntervalLabel::new(nc, i1.circle, k1 - 1 + after(i2.index, l.index, k2)))
            } else {
                let (tc, tb) = circle_map[&(l.comp, l.circle)];
                Some(IntervalLabel::new(tc, tb, l.index))
            };
            if let Some(t) = target {
                labels.insert(l, t);
            }
        }
        sigma_circle = (nc, i1.circle);
    } else {
        let c = i1.comp;
        for x in 0..n {
            comp_map[x] = x;
        }
        comps = s.components.clone();
        let old = &s.components[c];
        if i1.circle == i2.circle {
            let (i, j, k) = (i1.index, i2.index, k1);
            let a_count = (j + k - i - 1) % k;
            let b_count = (i + k - j - 1) % k;
            let mut boundary = old.boundary.clone();
            boundary[i1.circle] = SutureCircle::alternating_or_minus(a_count);
            let b_pos = boundary.len();
            boundary.push(SutureCircle::alternating_or_minus(b_count));
            comps[c] = SurfaceComponent { genus: old.genus, boundary };
            for x in 0..n {
                for bi in 0..s.components[x].boundary.len() {
                    if !(x == c && bi == i1.circle) {
                        circle_map.insert((x, bi), (x, bi));
                    }
                }
            }
            for l in s.intervals() {
                if l == i1 || l == i2 {
                    continue;
                }
                let target = if l.comp == c && l.circle == i1.circle {
                    let pos = after(i, l.index, k);
                    if pos < a_count {
                        IntervalLabel::new(c, i1.circle, pos)
                    } else {
                        IntervalLabel::new(c, b_pos, after(j, l.index, k))
                    }
                } else {
                    l
                };
                labels.insert(l, target);
            }
            sigma_circle = (c, i1.circle);
        } else {
            let mut boundary = old.boundary.clone();
            boundary[i1.circle] = SutureCircle::alternating_or_minus(k1 + k2 - 2);
            boundary.remove(i2.circle);
            comps[c] = SurfaceComponent { genus: old.genus + 1, boundary };
            let shift = |bi: usize| bi - usize::from(bi > i2.circle);
            for x in 0..n {
                for bi in 0..s.components[x].boundary.len() {
                    if x != c {
                        circle_map.insert((x, bi), (x, bi));
                    } else if bi != i1.circle && bi != i2.circle {
                        circle_map.insert((x, bi), (x, shift(bi)));
                    }
                }
            }
            let merged = shift(i1.circle);
            for l in s.intervals() {
                if l == i1 || l == i2 {
                    continue;
                }
                let target = if l.comp == c && l.circle == i1.circle {
                    IntervalLabel::new(c, merged, after(i1.index, l.index, k1))
                } else if l.comp == c && l.circle == i2.circle {
                    IntervalLabel::new(c, merged, k1 - 1 + after(i2.index, l.index, k2))
                } else {
                    let (tc, tb) = circle_map[&(l.comp, l.circle)];
                    IntervalLabel::new(tc, tb, l.index)
                };
                labels.insert(l, target);
            }
            sigma_circle = (c, merged);
        }
    }
    Ok(SelfGluing {
        surface: SuturedSurfaceType { components: comps },
        case,
        comp_map,
        handle_offset,
        circle_map,
        labels,
        sigma_circle,
    })
}

/// A standard basis adapted to gluing `I1` to `I2`: the vertices on `I1`, `I2`
/// are leaves (or isolated) of star trees centred elsewhere, and the circles
/// carrying `I1`, `I2` are the designated ones.
pub fn adapted_basis(s: &SuturedSurfaceType, i1: IntervalLabel, i2: IntervalLabel) -> Result<StandardBasis> {
    check_pair(s, i1, i2)?;
    let (p1, p2) = (PlusVertex::Interval(i1), PlusVertex::Interval(i2));
    let mut centres = BTreeMap::new();
    let mut designated: Vec<usize> = StandardBasis::default_for(s)?.designated;
    for c in 0..s.components.len() {
        let vs = s.plus_vertices(c);
        let centre = vs.iter().rev().find(|&&v| v != p1 && v != p2).copied().or_else(|| vs.last().copied());
        if let Some(v) = centre {
            centres.insert(c, v);
        }
    }
    designated[i1.comp] = i1.circle;
    if i2.comp != i1.comp {
        designated[i2.comp] = i2.circle;
    }
    StandardBasis::build(s, designated, &centres)
}

/// Checks the conditions `constructive_iso` relies on.
pub fn check_adapted(s: &SuturedSurfaceType, basis: &StandardBasis, i1: IntervalLabel, i2: IntervalLabel) -> Result<()> {
    check_pair(s, i1, i2)?;
    basis.validate(s)?;
    let (p1, p2) = (PlusVertex::Interval(i1), PlusVertex::Interval(i2));
    let bad = |m: &str| Err(Error::NotAdapted(m.to_string()));
    if basis.degree(p1) > 1 || basis.degree(p2) > 1 {
        return bad("the vertices on I1 and I2 must be leaves of the tree");
    }
    match GluingCase::of(s, i1, i2) {
        GluingCase::DistinctComponents => {
            if basis.designated[i1.comp] != i1.circle || basis.designated[i2.comp] != i2.circle {
                return bad("the circles carrying I1 and I2 must be the designated ones");
            }
        }
        case => {
            if basis.designated[i1.comp] != i1.circle {
                return bad("the circle carrying I1 must be the designated one");
            }
            if matches!(case, GluingCase::SameCircle | GluingCase::DifferentCircles) {
                let (e1, e2) = (basis.edges_at(p1), basis.edges_at(p2));
                let (BasisElement::Edge(a1, b1), BasisElement::Edge(a2, b2)) =
                    (basis.elements[e1[0]], basis.elements[e2[0]])
                else {
                    unreachable!()
                };
                let q1 = if a1 == p1 { b1 } else { a1 };
                let q2 = if a2 == p2 { b2 } else { a2 };
                if q1 != q2 || q1 == p1 || q1 == p2 {
                    return bad("the edges at I1 and I2 must share their other endpoint");
                }
            }
        }
    }
    Ok(())
}

/// Outcome of the basis-level isomorphism for one self-gluing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstructiveReport {
    pub case: GluingCase,
    pub glued: SuturedSurfaceType,
    pub reduced_dim: usize,
    pub glued_dim: usize,
    pub well_defined: bool,
    pub invertible: bool,
    pub intertwined: Vec<String>,
    pub not_intertwined: Vec<String>,
}

impl ConstructiveReport {
    pub fn passed(&self) -> bool {
        self.well_defined && self.invertible && self.not_intertwined.is_empty() && self.reduced_dim == self.glued_dim
    }
}

/// Transfers an adapted basis across the gluing and builds the wedge-level
/// bijection from the reduced module to the glued surface's module.
pub fn constructive_iso(
    s: &SuturedSurfaceType,
    basis: &StandardBasis,
    i1: IntervalLabel,
    i2: IntervalLabel,
) -> Result<(GF2Matrix, ConstructiveReport)> {
    check_adapted(s, basis, i1, i2)?;
    let g = glue_self(s, i1, i2)?;
    let (p1, p2) = (PlusVertex::Interval(i1), PlusVertex::Interval(i2));
    let glued_edges: Vec<usize> = {
        let mut v = basis.edges_at(p1);
        v.extend(basis.edges_at(p2));
        v.sort();
        v.dedup();
        v
    };

    // new basis: transferred elements in order, then the one created by the gluing
    let mut elements = Vec::new();
    let mut transfer: Vec<Option<usize>> = vec![None; basis.len()];
    let new_comp = g.comp_map[i1.comp];
    let new_genus = s.components[i1.comp].genus;
    for (idx, e) in basis.elements.iter().enumerate() {
        if glued_edges.contains(&idx) {
            continue;
        }
        let mapped = match *e {
            BasisElement::Torus { comp, handle, second } => {
                BasisElement::Torus { comp: g.comp_map[comp], handle: handle + g.handle_offset[comp], second }
            }
            BasisElement::Boundary { comp, circle } => match g.circle_map.get(&(comp, circle)) {
                Some(&(nc, nb)) if !(matches!(g.case, GluingCase::DifferentCircles | GluingCase::DifferentCirclesOnly)
                    && comp == i2.comp
                    && circle == i2.circle) =>
                {
                    BasisElement::Boundary { comp: nc, circle: nb }
                }
                _ if comp == i2.comp && circle == i2.circle => {
                    BasisElement::Torus { comp: new_comp, handle: new_genus, second: true }
                }
                _ => return Err(Error::NotAdapted(format!("{e} has no image after gluing"))),
            },
            BasisElement::Edge(a, b) => match (g.map_vertex(a), g.map_vertex(b)) {
                (Some(x), Some(y)) => BasisElement::Edge(x, y),
                _ => return Err(Error::NotAdapted(format!("{e} touches a glued interval"))),
            },
        };
        transfer[idx] = Some(elements.len());
        elements.push(mapped);
    }
    let other_end = |idx: usize, p: PlusVertex| match basis.elements[idx] {
        BasisElement::Edge(a, b) => {
            if a == p {
                b
            } else {
                a
            }
        }
        _ => unreachable!(),
    };
    let created = match g.case {
        GluingCase::DistinctComponents => {
            let (e1, e2) = (basis.edges_at(p1), basis.edges_at(p2));
            if let (Some(&a), Some(&b)) = (e1.first(), e2.first()) {
                let q1 = g.map_vertex(other_end(a, p1)).expect("q1 survives");
                let q2 = g.map_vertex(other_end(b, p2)).expect("q2 survives");
                Some(BasisElement::Edge(q1, q2))
            } else {
                None
            }
        }
        GluingCase::SameCircle | GluingCase::SameCircleOnly => {
            Some(BasisElement::Boundary { comp: g.sigma_circle.0, circle: g.sigma_circle.1 })
        }
        GluingCase::DifferentCircles | GluingCase::DifferentCirclesOnly => {
            Some(BasisElement::Torus { comp: new_comp, handle: new_genus, second: false })
        }
    };
    let created_idx = created.map(|e| {
        elements.push(e);
        elements.len() - 1
    });
    let mut designated = vec![0; g.surface.components.len()];
    for (c, &d) in basis.designated.iter().enumerate() {
        if let Some(&(nc, nb)) = g.circle_map.get(&(c, d)) {
            designated[nc] = nb;
        }
    }
    designated[new_comp] = match g.case {
        GluingCase::SameCircle | GluingCase::SameCircleOnly => g.surface.components[new_comp].boundary.len() - 1,
        _ => g.sigma_circle.1,
    };
    let new_basis = StandardBasis { elements, designated };
    new_basis.validate(&g.surface)?;

    let m = wedge_module(s, basis)?;
    let target = wedge_module(&g.surface, &new_basis)?;
    let l1 = i1.to_string();
    let l2 = i2.to_string();
    let (reduced, coker) = tensor_reduce_with(&m, &l1, &l2)?;

    let bit = |i: usize| 1u64 << i;
    let carry = |x: u64| -> u64 {
        (0..basis.len())
            .filter(|&i| x >> i & 1 == 1)
            .filter_map(|i| transfer[i])
            .fold(0, |acc, j| acc | bit(j))
    };
    let mut psi = GF2Matrix::zeros(target.dim, m.dim);
    for x in 0..m.dim as u64 {
        let present: Vec<usize> = glued_edges.iter().copied().filter(|&i| x >> i & 1 == 1).collect();
        let image = match (g.case, glued_edges.len(), present.len()) {
            (GluingCase::DistinctComponents, 2, 2)
            | (GluingCase::SameCircle, 2, 2)
            | (GluingCase::DifferentCircles, 2, 2) => Some(carry(x) | bit(created_idx.expect("created"))),
            (GluingCase::DistinctComponents | GluingCase::SameCircle | GluingCase::DifferentCircles, _, 1) => {
                Some(carry(x))
            }
            (GluingCase::DistinctComponents, 0, 0) => Some(carry(x)),
            (GluingCase::SameCircleOnly | GluingCase::DifferentCirclesOnly, 1, 1) => {
                Some(carry(x) | bit(created_idx.expect("created")))
            }
            (GluingCase::SameCircleOnly | GluingCase::DifferentCirclesOnly, 1, 0) => Some(carry(x)),
            _ => None,
        };
        if let Some(y) = image {
            psi.set(y as usize, x as usize, true);
        }
    }

    let x = m.action(&l1)?.add(m.action(&l2)?)?;
    let well_defined = psi.mul(&x)?.is_zero();
    let iso = psi.mul(&coker.section())?;
    let invertible = iso.is_square() && iso.is_invertible();
    let (mut intertwined, mut not_intertwined) = (Vec::new(), Vec::new());
    for (old, new) in &g.labels {
        let a = reduced.action(&old.to_string())?;
        let b = target.action(&new.to_string())?;
        if iso.mul(a)? == b.mul(&iso)? {
            intertwined.push(format!("{old}->{new}"));
        } else {
            not_intertwined.push(format!("{old}->{new}"));
        }
    }
    let report = ConstructiveReport {
        case: g.case,
        glued: g.surface.clone(),
        reduced_dim: reduced.dim,
        glued_dim: target.dim,
        well_defined,
        invertible,
        intertwined,
        not_intertwined,
    };
    Ok((iso, report))
}

/// Searches for an invertible map `T` with `T·A_l = B_l·T` for every label.
/// The solution space is enumerated when small, sampled otherwise.
pub fn find_intertwiner(a: &EModule, b: &EModule, seed: u64) -> Result<Option<GF2Matrix>> {
    if a.dim != b.dim || a.labels() != b.labels() {
        return Ok(None);
    }
    let n = a.dim;
    let unknowns = n * n;
    let mut rows = Vec::new();
    for l in a.labels() {
        let (x, y) = (&a.actions[&l], &b.actions[&l]);
        for i in 0..n {
            for k in 0..n {
                // (T·x)_{ik} + (y·T)_{ik} = 0
                let mut row = GF2Vector::zeros(unknowns);
                for j in 0..n {
                    if x.get(j, k) {
                        row.flip(i * n + j);
                    }
                    if y.get(i, j) {
                        row.flip(j * n + k);
                    }
                }
                if !row.is_zero() {
                    rows.push(row);
                }
            }
        }
    }
    let system = GF2Matrix::from_row_vectors(unknowns, rows)?;
    let kernel = system.kernel_basis();
    let to_matrix = |v: &GF2Vector| {
        let mut t = GF2Matrix::zeros(n, n);
        for idx in v.support() {
            t.set(idx / n, idx % n, true);
        }
        t
    };
    let k = kernel.len();
    if k == 0 {
        return Ok(None);
    }
    let combine = |mask: &[bool]| {
        let mut v = GF2Vector::zeros(unknowns);
        for (i, &on) in mask.iter().enumerate() {
            if on {
                v = v.add(&kernel[i]).expect("same length");
            }
        }
        v
    };
    if k <= 16 {
        for m in 1u64..1 << k {
            let mask: Vec<bool> = (0..k).map(|i| m >> i & 1 == 1).collect();
            let t = to_matrix(&combine(&mask));
            if t.is_invertible() {
                return Ok(Some(t));
            }
        }
        return Ok(None);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..4096 {
        let mask: Vec<bool> = (0..k).map(|_| rng.gen()).collect();
        let t = to_matrix(&combine(&mask));
        if t.is_invertible() {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Outcome of comparing the glued module with the glued surface's module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GluingReport {
    pub spec: Vec<(String, String)>,
    pub glued: SuturedSurfaceType,
    pub module_dim: usize,
    pub surface_dim: usize,
    pub rank_profiles_equal: bool,
    /// Only searched when the dimension is at most 16.
    pub intertwiner_found: Option<bool>,
    pub constructive: Option<ConstructiveReport>,
}

impl GluingReport {
    pub fn passed(&self) -> bool {
        self.module_dim == self.surface_dim
            && self.rank_profiles_equal
            && self.intertwiner_found != Some(false)
            && self.constructive.as_ref().is_none_or(ConstructiveReport::passed)
    }
}

/// The surface obtained by gluing `s2` to `s1` along `spec`, together with
/// where the remaining intervals went (keyed `1:` / `2:` like [`EModule::tensor`]).
pub fn glue_surfaces(
    s1: &SuturedSurfaceType,
    s2: &SuturedSurfaceType,
    spec: &GluingSpec,
) -> Result<(SuturedSurfaceType, BTreeMap<String, IntervalLabel>)> {
    spec.check(s1, s2)?;
    let offset = s1.components.len();
    let shift = |l: IntervalLabel| IntervalLabel::new(l.comp + offset, l.circle, l.index);
    let mut surface = s1.disjoint_union(s2);
    let mut labels: BTreeMap<String, IntervalLabel> = BTreeMap::new();
    for l in s1.intervals() {
        labels.insert(format!("1:{l}"), l);
    }
    for l in s2.intervals() {
        labels.insert(format!("2:{l}"), shift(l));
    }
    for (a, b) in &spec.pairs {
        let (x, y) = (labels[&format!("1:{a}")], labels[&format!("2:{b}")]);
        let g = glue_self(&surface, x, y)?;
        labels = labels.into_iter().filter_map(|(k, l)| g.labels.get(&l).map(|&n| (k, n))).collect();
        surface = g.surface;
    }
    Ok((surface, labels))
}

/// Checks the gluing theorem for one pair of surfaces: dimensions, rank
/// profiles, and (in small cases) an explicit intertwiner.
pub fn verify_gluing(s1: &SuturedSurfaceType, s2: &SuturedSurfaceType, spec: &GluingSpec) -> Result<GluingReport> {
    let m1 = wedge_module(s1, &StandardBasis::default_for(s1)?)?;
    let m2 = wedge_module(s2, &StandardBasis::default_for(s2)?)?;
    let glued_module = glue_modules(&m1, &m2, spec)?;
    let (glued, labels) = glue_surfaces(s1, s2, spec)?;
    let target = wedge_module(&glued, &StandardBasis::default_for(&glued)?)?;
    let names: BTreeMap<String, String> = labels.iter().map(|(k, l)| (k.clone(), l.to_string())).collect();
    let renamed = glued_module.relabel(&names);
    let rank_profiles_equal = renamed.rank_profile() == target.rank_profile();
    let intertwiner_found = if renamed.dim <= 16 && renamed.dim == target.dim {
        Some(find_intertwiner(&renamed, &target, 0x5eed)?.is_some())
    } else {
        None
    };
    let constructive = match spec.pairs.as_slice() {
        [(a, b)] => {
            let union = s1.disjoint_union(s2);
            let shifted = IntervalLabel::new(b.comp + s1.components.len(), b.circle, b.index);
            let basis = adapted_basis(&union, *a, shifted)?;
            Some(constructive_iso(&union, &basis, *a, shifted)?.1)
        }
        _ => None,
    };
    Ok(GluingReport {
        spec: spec.pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        glued: glued.canonical(),
        module_dim: renamed.dim,
        surface_dim: target.dim,
        rank_profiles_equal,
        intertwiner_found,
        constructive,
    })
}

/// `N` with the actions of `l1` and `l2` replaced by their sum, named `output`.
/// For `N = M' ⊗ M''` this is the action of `Δ(E) = E⊗1 + 1⊗E`.
pub fn hopf_module(n: &EModule, l1: &str, l2: &str, output: &str) -> Result<EModule> {
    let delta = n.action(l1)?.add(n.action(l2)?)?;
    let mut actions = n.actions.clone();
    actions.remove(l1);
    actions.remove(l2);
    actions.insert(output.to_string(), delta);
    EModule::new(n.dim, actions, n.basis_tags.clone())
}

/// Builds `M ⊗_{R⊗R} R`, `R = F₂[E]/(E²)`, from the presentation
/// `M ⊗ R / ((E·m) ⊗ r + m ⊗ (E·r))` for both factors, and checks that
/// `m ↦ m ⊗ 1` induces an isomorphism from [`tensor_reduce`] intertwining
/// every remaining action.
pub fn reduce_matches_presentation(m: &EModule, l1: &str, l2: &str) -> Result<bool> {
    let n = m.dim;
    let (a1, a2) = (m.action(l1)?, m.action(l2)?);
    // m_i ⊗ 1 at 2i, m_i ⊗ E at 2i + 1
    let mut rels = Vec::new();
    for a in [a1, a2] {
        for i in 0..n {
            for r in 0..2 {
                let mut v = GF2Vector::zeros(2 * n);
                for j in a.column(i).support() {
                    v.flip(2 * j + r);
                }
                if r == 0 {
                    v.flip(2 * i + 1);
                }
                rels.push(v);
            }
        }
    }
    let coker = GF2Matrix::from_columns(2 * n, &rels)?.cokernel_basis();
    let (ours, ours_coker) = tensor_reduce_with(m, l1, l2)?;
    let mut incl = GF2Matrix::zeros(2 * n, n);
    for i in 0..n {
        incl.set(2 * i, i, true);
    }
    let f = coker.projection.mul(&incl)?.mul(&ours_coker.section())?;
    if !(f.is_square() && f.is_invertible()) {
        return Ok(false);
    }
    let lift = GF2Matrix::identity(2);
    for (l, a) in &m.actions {
        if l == l1 || l == l2 {
            continue;
        }
        let theirs = coker.projection.mul(&a.kron(&lift))?.mul(&coker.section())?;
        if f.mul(ours.action(l)?)? != theirs.mul(&f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The outcome of [`verify_gluing`] for a gluing of one surface to itself.
pub fn verify_self_gluing(s: &SuturedSurfaceType, i1: IntervalLabel, i2: IntervalLabel) -> Result<GluingReport> {
    let g = glue_self(s, i1, i2)?;
    let m = wedge_module(s, &StandardBasis::default_for(s)?)?;
    let reduced = tensor_reduce(&m, &i1.to_string(), &i2.to_string())?;
    let names: BTreeMap<String, String> = g.labels.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
    let renamed = reduced.relabel(&names);
    let target = wedge_module(&g.surface, &StandardBasis::default_for(&g.surface)?)?;
    let intertwiner_found = if renamed.dim <= 16 && renamed.dim == target.dim {
        Some(find_intertwiner(&renamed, &target, 0x5eed)?.is_some())
    } else {
        None
    };
    let basis = adapted_basis(s, i1, i2)?;
    Ok(GluingReport {
        spec: vec![(i1.to_string(), i2.to_string())],
        glued: g.surface.canonical(),
        module_dim: renamed.dim,
        surface_dim: target.dim,
        rank_profiles_equal: renamed.rank_profile() == target.rank_profile(),
        intertwiner_found,
        constructive: Some(constructive_iso(s, &basis, i1, i2)?.1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use proptest::prelude::*;
    use SutureCircle::{Alternating as Alt, FullyMinus, FullyPlus};

    fn l(c: usize, b: usize, i: usize) -> IntervalLabel {
        IntervalLabel::new(c, b, i)
    }

    fn surf(components: Vec<(usize, Vec<SutureCircle>)>) -> SuturedSurfaceType {
        SuturedSurfaceType::new(components.into_iter().map(|(genus, boundary)| SurfaceComponent { genus, boundary }).collect())
            .unwrap()
    }

    fn default_module(s: &SuturedSurfaceType) -> EModule {
        wedge_module(s, &StandardBasis::default_for(s).unwrap()).unwrap()
    }

    fn m(rows: &[&str]) -> GF2Matrix {
        GF2Matrix::from_row_strings(rows).unwrap()
    }

    #[test]
    fn disk_module_is_trivial() {
        let d = default_module(&corpus::disk());
        assert_eq!(d.dim, 1);
        assert!(d.actions.values().all(GF2Matrix::is_zero));
    }

    #[test]
    fn pants_table() {
        let p = default_module(&corpus::pants());
        assert_eq!(p.basis_tags.len(), 4);
        // columns are images of 1, e1, e2, e1^e2
        assert_eq!(p.action("c0.b0.i0").unwrap(), &m(&["0100", "0000", "0001", "0000"]));
        assert_eq!(p.action("c0.b0.i1").unwrap(), &m(&["0010", "0001", "0000", "0000"]));
        assert_eq!(p.action("c0.b0.i2").unwrap(), &m(&["0110", "0001", "0001", "0000"]));
    }

    #[test]
    fn basis_sizes_match_h1() {
        for s in [corpus::pants(), corpus::annulus(), surf(vec![(2, vec![Alt(2), FullyPlus, FullyMinus])])] {
            let b = StandardBasis::default_for(&s).unwrap();
            assert_eq!(b.len(), s.h1_rank());
        }
    }

    #[test]
    fn mismatched_basis_is_rejected() {
        let s = corpus::pants();
        let b = StandardBasis::default_for(&corpus::annulus()).unwrap();
        assert!(matches!(wedge_module(&s, &b), Err(Error::BasisMismatch(_))));
    }

    #[test]
    fn free_rank_one_reduces_to_two() {
        // the output acts by E + E
        let p = default_module(&corpus::pants());
        let r = tensor_reduce(&p, "c0.b0.i0", "c0.b0.i1").unwrap();
        assert_eq!(r.dim, 2);
        assert!(r.action("c0.b0.i2").unwrap().is_zero());
    }

    #[test]
    fn zero_actions_reduce_to_themselves() {
        let a = default_module(&surf(vec![(1, vec![Alt(1)]), (0, vec![Alt(1)])]));
        let r = tensor_reduce(&a, "c0.b0.i0", "c1.b0.i0").unwrap();
        assert_eq!(r.dim, a.dim);
    }

    #[test]
    fn missing_labels_are_errors() {
        let p = default_module(&corpus::pants());
        assert!(matches!(tensor_reduce(&p, "c0.b0.i0", "c9.b0.i0"), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn glue_self_cases() {
        let two_disks = corpus::disk().disjoint_union(&corpus::disk());
        let g = glue_self(&two_disks, l(0, 0, 0), l(1, 0, 0)).unwrap();
        assert_eq!(g.surface, surf(vec![(0, vec![FullyMinus])]));

        let g = glue_self(&surf(vec![(0, vec![Alt(2), Alt(1)])]), l(0, 0, 0), l(0, 0, 1)).unwrap();
        assert_eq!(g.case, GluingCase::SameCircle);
        assert_eq!(g.surface.components[0].genus, 0);
        assert_eq!(g.surface.components[0].boundary.len(), 3);

        let g = glue_self(&surf(vec![(0, vec![Alt(1), Alt(2)])]), l(0, 0, 0), l(0, 1, 0)).unwrap();
        assert_eq!(g.case, GluingCase::DifferentCircles);
        assert_eq!(g.surface, surf(vec![(1, vec![Alt(1)])]));
        assert_eq!(g.labels[&l(0, 1, 1)], l(0, 0, 0));
    }

    #[test]
    fn glue_self_rejects_bad_labels() {
        let s = corpus::pants();
        assert!(matches!(glue_self(&s, l(0, 0, 0), l(0, 0, 5)), Err(Error::UnknownLabel(_))));
        assert!(glue_self(&s, l(0, 0, 0), l(0, 0, 0)).is_err());
    }

    #[test]
    fn glued_surfaces_keep_h1_bookkeeping() {
        for case in corpus::gluing_cases() {
            let g = glue_self(&case.surface, case.i1, case.i2).unwrap();
            g.surface.validate().unwrap();
            let before = case.surface.h1_rank();
            let reduced = tensor_reduce(&default_module(&case.surface), &case.i1.to_string(), &case.i2.to_string()).unwrap();
            assert_eq!(1usize << g.surface.h1_rank(), reduced.dim, "{}", case.name);
            assert!(g.surface.h1_rank() <= before);
        }
    }

    #[test]
    fn every_case_has_a_constructive_isomorphism() {
        let mut seen = BTreeSet::new();
        for case in corpus::gluing_cases() {
            let basis = adapted_basis(&case.surface, case.i1, case.i2).unwrap();
            let (iso, r) = constructive_iso(&case.surface, &basis, case.i1, case.i2).unwrap();
            assert!(r.passed(), "{}: {r:?}", case.name);
            assert!(iso.is_invertible());
            seen.insert(r.case);
        }
        assert_eq!(seen.len(), 5);
    }

    #[test]
    fn degenerate_distinct_components() {
        // isolated vertices on one or both sides
        for s in [
            corpus::disk().disjoint_union(&corpus::pants()),
            corpus::pants().disjoint_union(&corpus::disk()),
            corpus::disk().disjoint_union(&corpus::disk()),
        ] {
            let i2 = l(1, 0, 0);
            let basis = adapted_basis(&s, l(0, 0, 0), i2).unwrap();
            let (_, r) = constructive_iso(&s, &basis, l(0, 0, 0), i2).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn unadapted_basis_is_reported() {
        let s = corpus::pants();
        let basis = StandardBasis::default_for(&s).unwrap();
        // the default star is centred on i2, which is then not a leaf
        let err = constructive_iso(&s, &basis, l(0, 0, 0), l(0, 0, 2)).unwrap_err();
        assert!(matches!(err, Error::NotAdapted(_)));
    }

    #[test]
    fn pants_with_two_disks() {
        let disks = corpus::disk().disjoint_union(&corpus::disk());
        let spec = GluingSpec { pairs: vec![(l(0, 0, 0), l(0, 0, 0)), (l(0, 0, 1), l(1, 0, 0))] };
        let r = verify_gluing(&corpus::pants(), &disks, &spec).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.module_dim, 1);
    }

    #[test]
    fn no_pairs_is_a_plain_tensor_product() {
        let (a, p) = (default_module(&corpus::annulus()), default_module(&corpus::pants()));
        let g = glue_modules(&a, &p, &GluingSpec::default()).unwrap();
        assert_eq!(g.dim, a.dim * p.dim);
    }

    #[test]
    fn two_annuli_make_a_torus() {
        let a = corpus::annulus();
        let spec = GluingSpec::parse("c0.b0.i0:c0.b0.i0, c0.b1.i0:c0.b1.i0").unwrap();
        let r = verify_gluing(&a, &a, &spec).unwrap();
        assert!(r.passed());
        assert_eq!(r.glued, surf(vec![(1, vec![FullyMinus, FullyMinus])]));
    }

    #[test]
    fn pair_order_does_not_matter() {
        let a = corpus::annulus();
        let p = corpus::pants();
        let fwd = GluingSpec::parse("c0.b0.i0:c0.b0.i0,c0.b1.i0:c0.b0.i1").unwrap();
        let rev = GluingSpec { pairs: fwd.pairs.iter().rev().copied().collect() };
        let (m1, m2) = (default_module(&a), default_module(&p));
        let x = glue_modules(&m1, &m2, &fwd).unwrap();
        let y = glue_modules(&m1, &m2, &rev).unwrap();
        assert_eq!(x.rank_profile(), y.rank_profile());
        assert!(verify_gluing(&a, &p, &fwd).unwrap().passed());
    }

    #[test]
    fn two_steps_match_one_step() {
        let (a, p) = (corpus::annulus(), corpus::pants());
        let both = GluingSpec::parse("c0.b0.i0:c0.b0.i0,c0.b1.i0:c0.b0.i1").unwrap();
        let first = GluingSpec { pairs: vec![both.pairs[0]] };
        let one_step = verify_gluing(&a, &p, &both).unwrap();
        let (mid, labels) = glue_surfaces(&a, &p, &first).unwrap();
        let mid_module = default_module(&mid);
        let second = tensor_reduce(&mid_module, &labels["1:c0.b1.i0"].to_string(), &labels["2:c0.b0.i1"].to_string()).unwrap();
        let direct = glue_modules(&default_module(&a), &default_module(&p), &both).unwrap();
        assert_eq!(second.dim, direct.dim);
        assert_eq!(second.dim, one_step.surface_dim);
        let ranks = |m: &EModule| m.rank_profile().into_iter().map(|(k, r)| (k.len(), r)).collect::<Vec<_>>();
        assert_eq!(ranks(&second), ranks(&direct));
    }

    #[test]
    fn pants_corollary_is_an_equality() {
        let inputs = surf(vec![(1, vec![Alt(2)])]).disjoint_union(&corpus::annulus());
        let n = default_module(&inputs);
        let spec = GluingSpec::parse("c0.b0.i0:c0.b0.i0,c0.b0.i1:c1.b0.i0").unwrap();
        let glued = glue_modules(&default_module(&corpus::pants()), &n, &spec).unwrap();
        let rename: BTreeMap<String, String> = glued
            .labels()
            .into_iter()
            .map(|k| {
                let short = k.strip_prefix("2:").map_or_else(|| "out".to_string(), str::to_string);
                (k, short)
            })
            .collect();
        let glued = glued.relabel(&rename);
        let hopf = hopf_module(&n, "c0.b0.i0", "c1.b0.i0", "out").unwrap();
        assert_eq!(glued.dim, hopf.dim);
        assert_eq!(glued.actions, hopf.actions);
        assert!(glued.basis_tags.iter().all(|t| t.starts_with("c0.b0.i0~c0.b0.i2^c0.b0.i1~c0.b0.i2|")));
    }

    #[test]
    fn coassociativity() {
        // both ways of stacking two pants: the output acts as the sum of the three inputs
        let p = corpus::pants();
        for (out_label, into) in [("c0.b0.i0", "c0.b0.i2"), ("c0.b0.i1", "c0.b0.i2")] {
            let spec = GluingSpec::parse(&format!("{out_label}:{into}")).unwrap();
            let mp = default_module(&p);
            let g = glue_modules(&mp, &mp, &spec).unwrap();
            let inputs: Vec<&GF2Matrix> =
                g.actions.iter().filter(|(k, _)| k.as_str() != "1:c0.b0.i2").map(|(_, a)| a).collect();
            assert_eq!(inputs.len(), 3);
            let sum = inputs[0].add(inputs[1]).unwrap().add(inputs[2]).unwrap();
            assert_eq!(g.action("1:c0.b0.i2").unwrap(), &sum);
        }
    }

    fn presentation_oracle(m: &EModule, l1: &str, l2: &str) -> (usize, bool) {
        let dim = tensor_reduce(m, l1, l2).unwrap().dim;
        (dim, reduce_matches_presentation(m, l1, l2).unwrap())
    }

    #[test]
    fn tensor_reduce_matches_presentation_on_examples() {
        for case in corpus::gluing_cases() {
            let mm = default_module(&case.surface);
            let (dim, ok) = presentation_oracle(&mm, &case.i1.to_string(), &case.i2.to_string());
            assert!(ok, "{}", case.name);
            assert_eq!(dim, tensor_reduce(&mm, &case.i1.to_string(), &case.i2.to_string()).unwrap().dim);
        }
    }

    fn small_surface() -> impl Strategy<Value = SuturedSurfaceType> {
        let circle = prop_oneof![
            (1usize..=3).prop_map(Alt),
            Just(FullyMinus),
            Just(FullyPlus),
        ];
        let comp = (0usize..=1, prop::collection::vec(circle, 1..=3)).prop_map(|(genus, mut boundary)| {
            if !boundary.iter().any(SutureCircle::meets_minus) {
                boundary.push(FullyMinus);
            }
            SurfaceComponent { genus, boundary }
        });
        prop::collection::vec(comp, 1..=2)
            .prop_map(|components| SuturedSurfaceType { components })
            .prop_filter("at most dimension 16 with two intervals", |s| s.h1_rank() <= 4 && s.intervals().len() >= 2)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn reduce_agrees_with_presentation(s in small_surface(), pick in any::<(u8, u8)>()) {
            let labels = s.intervals();
            let a = labels[pick.0 as usize % labels.len()];
            let b = labels[(pick.0 as usize + 1 + pick.1 as usize % (labels.len() - 1)) % labels.len()];
            prop_assume!(a != b);
            let mm = default_module(&s);
            let (dim, ok) = presentation_oracle(&mm, &a.to_string(), &b.to_string());
            prop_assert!(ok);
            prop_assert_eq!(dim, tensor_reduce(&mm, &a.to_string(), &b.to_string()).unwrap().dim);
        }

        #[test]
        fn random_self_gluings(s in small_surface(), pick in any::<(u8, u8)>()) {
            let labels = s.intervals();
            let a = labels[pick.0 as usize % labels.len()];
            let b = labels[(pick.0 as usize + 1 + pick.1 as usize % (labels.len() - 1)) % labels.len()];
            prop_assume!(a != b);
            let g = glue_self(&s, a, b).unwrap();
            prop_assert!(g.surface.validate().is_ok());
            let basis = adapted_basis(&s, a, b).unwrap();
            let (_, r) = constructive_iso(&s, &basis, a, b).unwrap();
            prop_assert!(r.passed(), "{:?}", r);
            let mm = default_module(&s);
            let target = default_module(&g.surface);
            let reduced = tensor_reduce(&mm, &a.to_string(), &b.to_string()).unwrap();
            let names: BTreeMap<String, String> = g.labels.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
            let reduced = reduced.relabel(&names);
            prop_assert_eq!(reduced.rank_profile(), target.rank_profile());
        }
    }
}

//! Arc diagrams: oriented intervals and circles carrying marked points that
//! are matched in pairs.
//!
//! Points are addressed either by their user-facing id or by a position
//! `(component, index)` where `index` follows the orientation. A circle with
//! `n` points has perimeter `n` in lifted coordinates.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::surface::{SurfaceComponent, SutureCircle, SuturedSurfaceType};

pub type PointId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    Interval,
    Circle,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Component {
    pub kind: ComponentKind,
    pub points: Vec<PointId>,
}

/// The JSON form of a diagram, before validation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawArcDiagram {
    pub components: Vec<Component>,
    pub matching: Vec<[PointId; 2]>,
}

/// One way a [`RawArcDiagram`] can fail to be an arc diagram.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DegeneratePair { point: PointId },
    ZeroPointId,
    PlacedTwice { point: PointId },
    UnplacedPoint { point: PointId },
    UnmatchedPoint { point: PointId },
    MatchedTwice { point: PointId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DegeneratePair { point } => write!(f, "pair is not two distinct points ({point})"),
            Self::ZeroPointId => write!(f, "point ids must be positive"),
            Self::PlacedTwice { point } => write!(f, "point {point} placed more than once"),
            Self::UnplacedPoint { point } => write!(f, "unplaced point {point}"),
            Self::UnmatchedPoint { point } => write!(f, "point {point} is in no matched pair"),
            Self::MatchedTwice { point } => write!(f, "point {point} is in more than one pair"),
        }
    }
}

impl RawArcDiagram {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// All invariant violations; empty iff the diagram is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = BTreeSet::new();
        let mut placed = BTreeMap::new();
        for c in &self.components {
            for &p in &c.points {
                if p == 0 {
                    out.insert(Violation::ZeroPointId);
                }
                *placed.entry(p).or_insert(0) += 1;
            }
        }
        for (&p, &n) in &placed {
            if n > 1 {
                out.insert(Violation::PlacedTwice { point: p });
            }
        }
        let mut matched = BTreeMap::new();
        for &[a, b] in &self.matching {
            if a == b {
                out.insert(Violation::DegeneratePair { point: a });
            }
            for p in [a, b] {
                if p == 0 {
                    out.insert(Violation::ZeroPointId);
                }
                *matched.entry(p).or_insert(0) += 1;
                if !placed.contains_key(&p) {
                    out.insert(Violation::UnplacedPoint { point: p });
                }
            }
        }
        for (&p, &n) in &matched {
            if n > 1 {
                out.insert(Violation::MatchedTwice { point: p });
            }
        }
        for &p in placed.keys() {
            if !matched.contains_key(&p) {
                out.insert(Violation::UnmatchedPoint { point: p });
            }
        }
        out.into_iter().collect()
    }
}

/// A point's place in the diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub comp: usize,
    pub index: usize,
}

/// A validated arc diagram.
///
/// Matched pairs are indexed `0..pair_count()` in increasing order of their
/// smaller point id; idempotents and wedge basis elements are subsets of these
/// indices, encoded as bitmasks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArcDiagram {
    components: Vec<Component>,
    pairs: Vec<[PointId; 2]>,
    offsets: Vec<usize>,
    // indexed by global point index
    positions: Vec<Position>,
    ids: Vec<PointId>,
    pair_of: Vec<usize>,
    partner: Vec<usize>,
    id_to_global: BTreeMap<PointId, usize>,
}

impl TryFrom<RawArcDiagram> for ArcDiagram {
    type Error = Error;

    fn try_from(raw: RawArcDiagram) -> Result<Self> {
        let violations = raw.validate();
        if !violations.is_empty() {
            let msg: Vec<String> = violations.iter().map(ToString::to_string).collect();
            return Err(Error::InvalidDiagram(msg.join("; ")));
        }
        let mut pairs: Vec<[PointId; 2]> =
            raw.matching.iter().map(|&[a, b]| [a.min(b), a.max(b)]).collect();
        pairs.sort();
        if pairs.len() > 63 {
            return Err(Error::InvalidDiagram("at most 63 matched pairs are supported".into()));
        }
        let mut offsets = Vec::new();
        let mut positions = Vec::new();
        let mut ids = Vec::new();
        let mut id_to_global = BTreeMap::new();
        for (ci, c) in raw.components.iter().enumerate() {
            offsets.push(positions.len());
            for (k, &p) in c.points.iter().enumerate() {
                id_to_global.insert(p, positions.len());
                positions.push(Position { comp: ci, index: k });
                ids.push(p);
            }
        }
        let mut pair_of = vec![0; ids.len()];
        let mut partner = vec![0; ids.len()];
        for (pi, &[a, b]) in pairs.iter().enumerate() {
            let (ga, gb) = (id_to_global[&a], id_to_global[&b]);
            pair_of[ga] = pi;
            pair_of[gb] = pi;
            partner[ga] = gb;
            partner[gb] = ga;
        }
        Ok(Self { components: raw.components, pairs, offsets, positions, ids, pair_of, partner, id_to_global })
    }
}

impl ArcDiagram {
    pub fn from_json(text: &str) -> Result<Self> {
        RawArcDiagram::from_json(text)?.try_into()
    }

    pub fn to_raw(&self) -> RawArcDiagram {
        RawArcDiagram { components: self.components.clone(), matching: self.pairs.clone() }
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn kind(&self, comp: usize) -> ComponentKind {
        self.components[comp].kind
    }

    pub fn is_interval(&self, comp: usize) -> bool {
        self.components.get(comp).is_some_and(|c| c.kind == ComponentKind::Interval)
    }

    pub fn check_interval(&self, comp: usize) -> Result<()> {
        if self.is_interval(comp) {
            Ok(())
        } else {
            Err(Error::NotAnInterval(comp))
        }
    }

    pub fn intervals(&self) -> Vec<usize> {
        (0..self.components.len()).filter(|&c| self.is_interval(c)).collect()
    }

    pub fn has_circles(&self) -> bool {
        self.components.iter().any(|c| c.kind == ComponentKind::Circle)
    }

    /// Number of marked points on a component; also the perimeter of a circle.
    pub fn len_of(&self, comp: usize) -> usize {
        self.components[comp].points.len()
    }

    pub fn point_count(&self) -> usize {
        self.ids.len()
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[[PointId; 2]] {
        &self.pairs
    }

    /// Global index of the point at a position.
    pub fn global(&self, comp: usize, index: usize) -> usize {
        self.offsets[comp] + index
    }

    pub fn position(&self, global: usize) -> Position {
        self.positions[global]
    }

    pub fn id(&self, global: usize) -> PointId {
        self.ids[global]
    }

    pub fn global_of_id(&self, id: PointId) -> Option<usize> {
        self.id_to_global.get(&id).copied()
    }

    pub fn pair_of(&self, global: usize) -> usize {
        self.pair_of[global]
    }

    pub fn partner(&self, global: usize) -> usize {
        self.partner[global]
    }

    /// Global indices of the two points of a pair.
    pub fn pair_points(&self, pair: usize) -> [usize; 2] {
        let [a, b] = self.pairs[pair];
        [self.id_to_global[&a], self.id_to_global[&b]]
    }

    /// The matched pairs as a basis of `H₁(F, S₊; F₂)`, sorted by smaller point id.
    pub fn homology_basis(&self) -> HomologyClassBasis {
        HomologyClassBasis { pairs: self.pairs.clone() }
    }

    /// `φ_I` of the class of a matched pair: how many of its points lie on `I`, mod 2.
    pub fn phi_pairing(&self, pair: usize, interval: usize) -> Result<bool> {
        self.check_interval(interval)?;
        if pair >= self.pairs.len() {
            return Err(Error::Domain(format!("no matched pair with index {pair}")));
        }
        let on = self.pair_points(pair).iter().filter(|&&g| self.positions[g].comp == interval).count();
        Ok(on % 2 == 1)
    }

    /// Reconstructs the sutured surface represented by the diagram.
    ///
    /// `Z × [0,1]` gets one orientable 1-handle per matched pair along `Z × {1}`;
    /// `S₊ = Z × {0}`. The top boundary is cut at the marked points into
    /// segments that are traced with the boundary orientation (against the
    /// orientation of `Z` along the top edge). Arriving at point `x` the trace
    /// crosses the handle and continues from just before `M(x)`.
    pub fn surface_type(&self) -> SuturedSurfaceType {
        let ncomp = self.components.len();
        // union-find over components of Z joined by handles
        let mut parent: Vec<usize> = (0..ncomp).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for pair in 0..self.pairs.len() {
            let [a, b] = self.pair_points(pair);
            let (ra, rb) = (find(&mut parent, self.positions[a].comp), find(&mut parent, self.positions[b].comp));
            parent[ra] = rb;
        }

        // segments: intervals have n+1, circles n (cyclic)
        let seg_count = |c: usize| match self.kind(c) {
            ComponentKind::Interval => self.len_of(c) + 1,
            ComponentKind::Circle => self.len_of(c),
        };
        let seg_before = |g: usize| {
            let p = self.positions[g];
            (p.comp, p.index)
        };
        // segment (c, j) is traversed from its right end to its left end
        let next = |(c, j): (usize, usize)| -> ((usize, usize), bool) {
            let n = self.len_of(c);
            match self.kind(c) {
                ComponentKind::Interval if j == 0 => ((c, n), true),
                ComponentKind::Interval => (seg_before(self.partner[self.global(c, j - 1)]), false),
                ComponentKind::Circle => {
                    let left = (j + n - 1) % n;
                    (seg_before(self.partner[self.global(c, left)]), false)
                }
            }
        };

        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        let mut circles: BTreeMap<usize, Vec<SutureCircle>> = BTreeMap::new();
        let mut chi: BTreeMap<usize, i64> = BTreeMap::new();
        for c in 0..ncomp {
            let root = find(&mut parent, c);
            let e = chi.entry(root).or_insert(0);
            if self.kind(c) == ComponentKind::Interval {
                *e += 1;
            }
        }
        for pair in 0..self.pairs.len() {
            let root = find(&mut parent, self.positions[self.pair_points(pair)[0]].comp);
            *chi.get_mut(&root).unwrap() -= 1;
        }
        for c in 0..ncomp {
            let root = find(&mut parent, c);
            if self.kind(c) == ComponentKind::Circle {
                circles.entry(root).or_default().push(SutureCircle::FullyPlus);
                if self.len_of(c) == 0 {
                    circles.entry(root).or_default().push(SutureCircle::FullyMinus);
                }
            }
            for j in 0..seg_count(c) {
                if seen.contains(&(c, j)) {
                    continue;
                }
                let mut plus = 0;
                let mut cur = (c, j);
                loop {
                    seen.insert(cur);
                    let (nx, through_bottom) = next(cur);
                    plus += usize::from(through_bottom);
                    cur = nx;
                    if cur == (c, j) {
                        break;
                    }
                }
                circles.entry(root).or_default().push(SutureCircle::alternating_or_minus(plus));
            }
        }

        let components = circles
            .into_iter()
            .map(|(root, boundary)| {
                let b = boundary.len() as i64;
                let twice_genus = 2 - chi[&root] - b;
                debug_assert!(twice_genus >= 0 && twice_genus % 2 == 0);
                SurfaceComponent { genus: (twice_genus / 2) as usize, boundary }
            })
            .collect();
        SuturedSurfaceType { components }.canonical()
    }
}

/// Matched pairs in basis order; each is one basis element of `H₁(F, S₊; F₂)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyClassBasis {
    pub pairs: Vec<[PointId; 2]>,
}

impl HomologyClassBasis {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

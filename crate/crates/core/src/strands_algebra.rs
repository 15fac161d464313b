//! The strands algebra `A(Z)` over `F₂`.
//!
//! A [`StrandsPicture`] holds a set of dotted (horizontal) matched pairs and a
//! list of solid strands. Each solid is stored in lifted coordinates: `start`
//! is a position on its component and `end` is a position plus a multiple of
//! the perimeter (circles only), so that `end > start` always. Strands with a
//! negative `start` are *sources*: special strands entering from the initial
//! endpoint of an interval, used by the bimodule `E` and its tensor powers.
//!
//! Idempotents and dotted sets are bitmasks over matched pair indices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::arc_diagram::{ArcDiagram, ComponentKind};
use crate::error::{Error, Result};

/// One solid strand, in lifted coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Strand {
    pub comp: usize,
    pub start: i64,
    pub end: i64,
}

impl Strand {
    pub fn new(comp: usize, start: i64, end: i64) -> Self {
        Self { comp, start, end }
    }

    /// The strand from point `from` to point `to` (by id) turning `winding`
    /// extra times. On a circle `winding` counts full turns of the lift, so a
    /// strand from a point to itself needs `winding ≥ 1`.
    pub fn between(d: &ArcDiagram, from: u32, to: u32, winding: usize) -> Result<Self> {
        let locate = |id| {
            d.global_of_id(id)
                .map(|g| d.position(g))
                .ok_or_else(|| Error::Domain(format!("no point with id {id}")))
        };
        let (a, b) = (locate(from)?, locate(to)?);
        if a.comp != b.comp {
            return Err(Error::Domain(format!("points {from} and {to} lie on different components")));
        }
        let (s, e) = (a.index as i64, b.index as i64);
        let end = match d.kind(a.comp) {
            ComponentKind::Interval => e,
            ComponentKind::Circle => {
                let n = d.len_of(a.comp) as i64;
                let base = if e > s { e } else { e + n };
                let w = if e > s { winding } else { winding.saturating_sub(1) };
                base + n * w as i64
            }
        };
        Ok(Self::new(a.comp, s, end))
    }

    /// A special strand on lane `lane ≥ 1`, ending at position `end` of an interval.
    pub fn source(comp: usize, lane: usize, end: i64) -> Self {
        Self::new(comp, -(lane as i64), end)
    }

    pub fn is_source(&self) -> bool {
        self.start < 0
    }

    /// Lane of a source strand.
    pub fn lane(&self) -> Option<usize> {
        self.is_source().then(|| (-self.start) as usize)
    }

    /// Global index of the left endpoint; `None` for sources.
    pub fn start_point(&self, d: &ArcDiagram) -> Option<usize> {
        (!self.is_source()).then(|| d.global(self.comp, self.start as usize))
    }

    pub fn end_point(&self, d: &ArcDiagram) -> usize {
        let n = d.len_of(self.comp) as i64;
        d.global(self.comp, self.end.rem_euclid(n) as usize)
    }

    pub fn winding(&self, d: &ArcDiagram) -> usize {
        match d.kind(self.comp) {
            ComponentKind::Interval => 0,
            ComponentKind::Circle => (self.end - self.start).div_euclid(d.len_of(self.comp) as i64) as usize,
        }
    }
}

/// Number of transverse intersections of the taut representatives of two
/// strands (horizontal strands have `start == end`).
pub fn strand_crossings(d: &ArcDiagram, a: &Strand, b: &Strand) -> u64 {
    if a.comp != b.comp {
        return 0;
    }
    let (ds, de) = (a.start - b.start, a.end - b.end);
    match d.kind(a.comp) {
        ComponentKind::Interval => u64::from(ds * de < 0),
        ComponentKind::Circle => {
            // translates of b by multiples of the perimeter strictly between
            let n = d.len_of(a.comp) as i64;
            let (lo, hi) = (ds.min(de), ds.max(de));
            let count = -(-hi).div_euclid(n) - 1 - lo.div_euclid(n);
            count.max(0) as u64
        }
    }
}

/// Total pairwise crossings among a set of strands.
pub fn inversions(d: &ArcDiagram, strands: &[Strand]) -> u64 {
    let mut total = 0;
    for (i, a) in strands.iter().enumerate() {
        for b in &strands[i + 1..] {
            total += strand_crossings(d, a, b);
        }
    }
    total
}

fn horizontal(d: &ArcDiagram, global: usize) -> Strand {
    let p = d.position(global);
    Strand::new(p.comp, p.index as i64, p.index as i64)
}

/// A basis element of `A(Z)` (or, with sources, of `E^⊗m`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StrandsPicture {
    pub dotted: u64,
    pub solids: Vec<Strand>,
}

impl StrandsPicture {
    pub fn new(dotted: u64, mut solids: Vec<Strand>) -> Self {
        solids.sort();
        Self { dotted, solids }
    }

    pub fn empty() -> Self {
        Self::new(0, Vec::new())
    }

    /// The purely dotted picture on a set of matched pairs.
    pub fn idempotent(mask: u64) -> Self {
        Self::new(mask, Vec::new())
    }

    pub fn is_idempotent(&self) -> bool {
        self.solids.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.solids.len() + self.dotted.count_ones() as usize
    }

    pub fn sources(&self) -> impl Iterator<Item = &Strand> {
        self.solids.iter().filter(|s| s.is_source())
    }

    pub fn source_count(&self) -> usize {
        self.sources().count()
    }

    /// Pairs hosting a left endpoint, as a bitmask.
    pub fn left_idempotent_mask(&self, d: &ArcDiagram) -> u64 {
        self.solids
            .iter()
            .filter_map(|s| s.start_point(d))
            .fold(self.dotted, |m, g| m | 1 << d.pair_of(g))
    }

    /// Pairs hosting a right endpoint, as a bitmask.
    pub fn right_idempotent_mask(&self, d: &ArcDiagram) -> u64 {
        self.solids.iter().fold(self.dotted, |m, s| m | 1 << d.pair_of(s.end_point(d)))
    }

    pub fn left_idempotent(&self, d: &ArcDiagram) -> Self {
        Self::idempotent(self.left_idempotent_mask(d))
    }

    pub fn right_idempotent(&self, d: &ArcDiagram) -> Self {
        Self::idempotent(self.right_idempotent_mask(d))
    }

    /// Solids together with one horizontal strand per dotted point.
    pub fn all_strands(&self, d: &ArcDiagram) -> Vec<Strand> {
        let mut out = self.solids.clone();
        for pair in 0..d.pair_count() {
            if self.dotted >> pair & 1 == 1 {
                out.extend(d.pair_points(pair).map(|g| horizontal(d, g)));
            }
        }
        out
    }

    /// Crossings of the taut picture, dotted strands included.
    pub fn crossing_count(&self, d: &ArcDiagram) -> u64 {
        inversions(d, &self.all_strands(d))
    }

    /// Largest winding of any solid.
    pub fn max_winding(&self, d: &ArcDiagram) -> usize {
        self.solids.iter().map(|s| s.winding(d)).max().unwrap_or(0)
    }

    /// Checks every picture invariant, with an optional bound on windings.
    pub fn validate(&self, d: &ArcDiagram, winding_cap: Option<usize>) -> Result<()> {
        let bad = |msg: String| Err(Error::Domain(msg));
        if d.pair_count() < 64 && self.dotted >> d.pair_count() != 0 {
            return bad("dotted set names a pair that does not exist".into());
        }
        let (mut left, mut right) = (0u64, 0u64);
        let mut lanes = BTreeSet::new();
        for s in &self.solids {
            if s.comp >= d.components().len() {
                return bad(format!("strand on missing component {}", s.comp));
            }
            let n = d.len_of(s.comp) as i64;
            if n == 0 {
                return bad(format!("strand on component {} without points", s.comp));
            }
            if s.end <= s.start {
                return bad(format!("strand {s:?} is horizontal or moves backwards"));
            }
            match d.kind(s.comp) {
                ComponentKind::Interval => {
                    if s.start >= n || s.end >= n {
                        return bad(format!("strand {s:?} leaves its interval"));
                    }
                }
                ComponentKind::Circle => {
                    if s.is_source() || s.start >= n {
                        return bad(format!("strand {s:?} is not normalized on its circle"));
                    }
                }
            }
            if let Some(cap) = winding_cap {
                if s.winding(d) > cap {
                    return bad(format!("strand {s:?} winds more than {cap} times"));
                }
            }
            if let Some(g) = s.start_point(d) {
                let bit = 1 << d.pair_of(g);
                if left & bit != 0 {
                    return bad(format!("two left endpoints on pair {}", d.pair_of(g)));
                }
                left |= bit;
            } else if !lanes.insert(s.start) {
                return bad(format!("two sources share lane {}", -s.start));
            }
            let bit = 1 << d.pair_of(s.end_point(d));
            if right & bit != 0 {
                return bad(format!("two right endpoints on pair {}", d.pair_of(s.end_point(d))));
            }
            right |= bit;
        }
        if (left | right) & self.dotted != 0 {
            return bad("a dotted pair also hosts a solid endpoint".into());
        }
        Ok(())
    }

    /// Human-readable form using point ids, e.g. `[1-2] 3->5 4->4+1`.
    pub fn describe(&self, d: &ArcDiagram) -> String {
        let mut parts = Vec::new();
        for pair in 0..d.pair_count() {
            if self.dotted >> pair & 1 == 1 {
                let [a, b] = d.pairs()[pair];
                parts.push(format!("[{a}-{b}]"));
            }
        }
        for s in &self.solids {
            let from = match s.start_point(d) {
                Some(g) => d.id(g).to_string(),
                None => format!("P{}", -s.start),
            };
            let w = s.winding(d);
            let wind = if d.kind(s.comp) == ComponentKind::Circle && s.end.rem_euclid(d.len_of(s.comp) as i64) <= s.start {
                w.saturating_sub(1)
            } else {
                w
            };
            if wind > 0 {
                parts.push(format!("{from}->{}+{wind}", d.id(s.end_point(d))));
            } else {
                parts.push(format!("{from}->{}", d.id(s.end_point(d))));
            }
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join(" ")
        }
    }
}

/// The concatenation `x·y`, or `None` when the product vanishes.
pub fn product(d: &ArcDiagram, x: &StrandsPicture, y: &StrandsPicture) -> Option<StrandsPicture> {
    if x.right_idempotent_mask(d) != y.left_idempotent_mask(d) {
        return None;
    }
    let mut y_used = vec![false; y.solids.len()];
    let mut solids = Vec::with_capacity(x.solids.len() + y.solids.len());
    let mut x_sec = x.solids.clone();
    let mut y_sec = y.solids.clone();
    for s in &x.solids {
        let b = s.end_point(d);
        let cont = y.solids.iter().position(|t| t.start_point(d) == Some(b));
        match cont {
            Some(i) => {
                y_used[i] = true;
                let t = y.solids[i];
                solids.push(Strand::new(s.comp, s.start, s.end + (t.end - t.start)));
            }
            None if y.dotted >> d.pair_of(b) & 1 == 1 => {
                y_sec.push(horizontal(d, b));
                solids.push(*s);
            }
            None => return None,
        }
    }
    for (i, t) in y.solids.iter().enumerate() {
        if y_used[i] {
            continue;
        }
        match t.start_point(d) {
            None => solids.push(*t),
            Some(c) if x.dotted >> d.pair_of(c) & 1 == 1 => {
                x_sec.push(horizontal(d, c));
                solids.push(*t);
            }
            Some(_) => return None,
        }
    }
    if inversions(d, &solids) != inversions(d, &x_sec) + inversions(d, &y_sec) {
        return None;
    }
    Some(StrandsPicture::new(x.dotted & y.dotted, solids))
}

/// `x·y` after checking both pictures against `d`.
pub fn checked_multiply(d: &ArcDiagram, x: &StrandsPicture, y: &StrandsPicture) -> Result<Element> {
    x.validate(d, None)?;
    y.validate(d, None)?;
    Ok(multiply(d, x, y))
}

pub fn multiply(d: &ArcDiagram, x: &StrandsPicture, y: &StrandsPicture) -> Element {
    product(d, x, y).map(Element::from).unwrap_or_default()
}

/// The differential: sum over crossings whose resolution loses exactly one crossing.
pub fn differential(d: &ArcDiagram, x: &StrandsPicture) -> Element {
    let mut out = Element::zero();
    let base = inversions(d, &x.solids);
    let m = x.solids.len();
    for i in 0..m {
        for j in i + 1..m {
            let (a, b) = (x.solids[i], x.solids[j]);
            if a.comp != b.comp {
                continue;
            }
            for shift in crossing_shifts(d, a.comp, a.start - b.start, a.end - b.end) {
                let mut solids = x.solids.clone();
                solids[i] = Strand::new(a.comp, a.start, b.end + shift);
                solids[j] = Strand::new(a.comp, b.start, a.end - shift);
                if inversions(d, &solids) + 1 == base {
                    out.toggle(StrandsPicture::new(x.dotted, solids));
                }
            }
        }
    }
    for pair in 0..d.pair_count() {
        if x.dotted >> pair & 1 == 0 {
            continue;
        }
        for c in d.pair_points(pair) {
            let h = horizontal(d, c);
            for i in 0..m {
                let a = x.solids[i];
                if a.comp != h.comp {
                    continue;
                }
                let with_h = {
                    let mut v = x.solids.clone();
                    v.push(h);
                    inversions(d, &v)
                };
                for shift in crossing_shifts(d, a.comp, a.start - h.start, a.end - h.end) {
                    let mut solids = x.solids.clone();
                    solids[i] = Strand::new(a.comp, a.start, h.start + shift);
                    solids.push(Strand::new(a.comp, h.start, a.end - shift));
                    if inversions(d, &solids) + 1 == with_h {
                        out.toggle(StrandsPicture::new(x.dotted & !(1 << pair), solids));
                    }
                }
            }
        }
    }
    out
}

// Offsets `k·n` at which a translate of the second strand crosses the first.
fn crossing_shifts(d: &ArcDiagram, comp: usize, ds: i64, de: i64) -> Vec<i64> {
    match d.kind(comp) {
        ComponentKind::Interval => {
            if ds * de < 0 {
                vec![0]
            } else {
                vec![]
            }
        }
        ComponentKind::Circle => {
            let n = d.len_of(comp) as i64;
            let (lo, hi) = (ds.min(de), ds.max(de));
            (lo.div_euclid(n) + 1..)
                .map(|k| k * n)
                .take_while(|&v| v < hi)
                .collect()
        }
    }
}

/// An `F₂`-linear combination of pictures.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Element {
    terms: BTreeSet<StrandsPicture>,
}

impl From<StrandsPicture> for Element {
    fn from(p: StrandsPicture) -> Self {
        let mut e = Self::zero();
        e.toggle(p);
        e
    }
}

impl FromIterator<StrandsPicture> for Element {
    fn from_iter<T: IntoIterator<Item = StrandsPicture>>(iter: T) -> Self {
        let mut e = Self::zero();
        for p in iter {
            e.toggle(p);
        }
        e
    }
}

impl Element {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Adds one copy of `p`; two copies cancel.
    pub fn toggle(&mut self, p: StrandsPicture) {
        if !self.terms.remove(&p) {
            self.terms.insert(p);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, p: &StrandsPicture) -> bool {
        self.terms.contains(p)
    }

    pub fn terms(&self) -> impl Iterator<Item = &StrandsPicture> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for p in &other.terms {
            out.toggle(p.clone());
        }
        out
    }

    pub fn mul(&self, d: &ArcDiagram, other: &Self) -> Self {
        let mut out = Self::zero();
        for x in &self.terms {
            for y in &other.terms {
                if let Some(p) = product(d, x, y) {
                    out.toggle(p);
                }
            }
        }
        out
    }

    pub fn differential(&self, d: &ArcDiagram) -> Self {
        let mut out = Self::zero();
        for x in &self.terms {
            for p in differential(d, x).terms {
                out.toggle(p);
            }
        }
        out
    }
}

impl IntoIterator for Element {
    type Item = StrandsPicture;
    type IntoIter = std::collections::btree_set::IntoIter<StrandsPicture>;

    fn into_iter(self) -> Self::IntoIter {
        self.terms.into_iter()
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|p| format!("{p:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Special strands to include in an enumeration: `count` lanes entering interval `interval`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sources {
    pub interval: usize,
    pub count: usize,
}

/// All `2^|matching|` idempotents, in bitmask order.
pub fn idempotents(d: &ArcDiagram) -> Vec<StrandsPicture> {
    (0..1u64 << d.pair_count()).map(StrandsPicture::idempotent).collect()
}

/// All pictures of weight `k` with windings at most `winding_cap`, sorted.
pub fn enumerate_basis(d: &ArcDiagram, k: usize, winding_cap: usize) -> Vec<StrandsPicture> {
    enumerate_pictures(d, k, winding_cap, None)
}

/// Like [`enumerate_basis`], with `sources.count` special strands on `sources.interval`.
/// Specials count towards the weight.
pub fn enumerate_pictures(
    d: &ArcDiagram,
    k: usize,
    winding_cap: usize,
    sources: Option<Sources>,
) -> Vec<StrandsPicture> {
    let m = sources.map_or(0, |s| s.count);
    if k < m {
        return Vec::new();
    }
    let targets: Vec<Vec<i64>> = (0..d.point_count())
        .map(|g| {
            let p = d.position(g);
            let n = d.len_of(p.comp) as i64;
            let s = p.index as i64;
            match d.kind(p.comp) {
                ComponentKind::Interval => (s + 1..n).collect(),
                ComponentKind::Circle => (s + 1..s + (winding_cap as i64 + 1) * n).collect(),
            }
        })
        .collect();
    let mut out = Vec::new();
    let mut solids = Vec::new();
    choose_solids(d, &targets, 0, k - m, 0, 0, &mut solids, &mut |solids, left, right| {
        let mut ends = Vec::new();
        choose_sources(d, sources, 1, right, &mut ends, &mut |ends, right| {
            let taken = solids.len() + ends.len();
            let free = (0..d.pair_count()).filter(|&p| (left | right) >> p & 1 == 0).collect::<Vec<_>>();
            for_subsets(&free, k - taken, &mut |dotted| {
                let mut all = solids.to_vec();
                all.extend_from_slice(ends);
                out.push(StrandsPicture::new(dotted, all));
            });
        });
    });
    out.sort();
    out
}

/// Every picture of every weight, sorted by weight and then by picture.
pub fn enumerate_all(d: &ArcDiagram, winding_cap: usize, sources: Option<Sources>) -> Vec<StrandsPicture> {
    (0..=d.pair_count())
        .flat_map(|k| enumerate_pictures(d, k, winding_cap, sources))
        .collect()
}

/// Outcome of the exhaustive axiom checks on one diagram.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub winding_cap: usize,
    /// Basis size per weight, for the weights checked.
    pub basis_sizes: BTreeMap<usize, usize>,
    pub d_squared_checked: usize,
    pub leibniz_checked: usize,
    pub associativity_checked: usize,
    /// At most ten, in enumeration order.
    pub failures: Vec<String>,
    pub failure_count: usize,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }
}

/// Checks `d² = 0` on every basis element, the Leibniz rule on every pair
/// with nonzero product and, for weights up to `assoc_max_weight`,
/// associativity on every triple. `weight` restricts everything to one weight.
pub fn check_axioms(
    d: &ArcDiagram,
    weight: Option<usize>,
    winding_cap: usize,
    assoc_max_weight: Option<usize>,
) -> AxiomReport {
    let weights: Vec<usize> = match weight {
        Some(k) => vec![k],
        None => (0..=d.pair_count()).collect(),
    };
    let mut basis_sizes = BTreeMap::new();
    let (mut d_squared_checked, mut leibniz_checked, mut associativity_checked) = (0, 0, 0);
    let mut failures = Vec::new();
    for &k in &weights {
        let basis = enumerate_basis(d, k, winding_cap);
        basis_sizes.insert(k, basis.len());
        let mut by_left: BTreeMap<u64, Vec<&StrandsPicture>> = BTreeMap::new();
        for x in &basis {
            by_left.entry(x.left_idempotent_mask(d)).or_default().push(x);
        }
        let assoc = assoc_max_weight.is_some_and(|w| k <= w);
        let per_x: Vec<(usize, usize, usize, Vec<String>)> = basis
            .par_iter()
            .map(|x| {
                let mut fails = Vec::new();
                let dx = differential(d, x);
                if !dx.differential(d).is_zero() {
                    fails.push(format!("d^2 != 0 on {}", x.describe(d)));
                }
                let (mut leib, mut triples) = (0, 0);
                let partners = by_left.get(&x.right_idempotent_mask(d)).map_or(&[][..], Vec::as_slice);
                for &y in partners {
                    let Some(xy) = product(d, x, y) else { continue };
                    leib += 1;
                    let lhs = differential(d, &xy);
                    let rhs = dx.mul(d, &Element::from(y.clone())).add(&Element::from(x.clone()).mul(d, &differential(d, y)));
                    if lhs != rhs {
                        fails.push(format!("Leibniz fails on {} * {}", x.describe(d), y.describe(d)));
                    }
                }
                if assoc {
                    for &y in partners {
                        let xy = multiply(d, x, y);
                        for &z in by_left.get(&y.right_idempotent_mask(d)).map_or(&[][..], Vec::as_slice) {
                            triples += 1;
                            let lhs = xy.mul(d, &Element::from(z.clone()));
                            let rhs = Element::from(x.clone()).mul(d, &multiply(d, y, z));
                            if lhs != rhs {
                                fails.push(format!(
                                    "associativity fails on {} * {} * {}",
                                    x.describe(d),
                                    y.describe(d),
                                    z.describe(d)
                                ));
                            }
                        }
                    }
                }
                (1, leib, triples, fails)
            })
            .collect();
        for (a, b, c, f) in per_x {
            d_squared_checked += a;
            leibniz_checked += b;
            associativity_checked += c;
            failures.extend(f);
        }
    }
    let failure_count = failures.len();
    failures.truncate(10);
    AxiomReport {
        winding_cap,
        basis_sizes,
        d_squared_checked,
        leibniz_checked,
        associativity_checked,
        failures,
        failure_count,
    }
}

#[allow(clippy::too_many_arguments)]
fn choose_solids(
    d: &ArcDiagram,
    targets: &[Vec<i64>],
    g: usize,
    budget: usize,
    left: u64,
    right: u64,
    solids: &mut Vec<Strand>,
    visit: &mut dyn FnMut(&[Strand], u64, u64),
) {
    if g == d.point_count() {
        visit(solids, left, right);
        return;
    }
    choose_solids(d, targets, g + 1, budget, left, right, solids, visit);
    let lbit = 1 << d.pair_of(g);
    if budget == 0 || left & lbit != 0 {
        return;
    }
    let p = d.position(g);
    let n = d.len_of(p.comp) as i64;
    for &end in &targets[g] {
        let e = d.global(p.comp, end.rem_euclid(n) as usize);
        let rbit = 1 << d.pair_of(e);
        if right & rbit != 0 {
            continue;
        }
        solids.push(Strand::new(p.comp, p.index as i64, end));
        choose_solids(d, targets, g + 1, budget - 1, left | lbit, right | rbit, solids, visit);
        solids.pop();
    }
}

fn choose_sources(
    d: &ArcDiagram,
    sources: Option<Sources>,
    lane: usize,
    right: u64,
    ends: &mut Vec<Strand>,
    visit: &mut dyn FnMut(&[Strand], u64),
) {
    let Some(src) = sources else {
        visit(ends, right);
        return;
    };
    if lane > src.count {
        visit(ends, right);
        return;
    }
    for pos in 0..d.len_of(src.interval) {
        let rbit = 1 << d.pair_of(d.global(src.interval, pos));
        if right & rbit != 0 {
            continue;
        }
        ends.push(Strand::source(src.interval, lane, pos as i64));
        choose_sources(d, sources, lane + 1, right | rbit, ends, visit);
        ends.pop();
    }
}

fn for_subsets(items: &[usize], size: usize, visit: &mut dyn FnMut(u64)) {
    fn go(items: &[usize], size: usize, acc: u64, visit: &mut dyn FnMut(u64)) {
        if size == 0 {
            visit(acc);
            return;
        }
        if items.len() < size {
            return;
        }
        go(&items[1..], size - 1, acc | 1 << items[0], visit);
        go(&items[1..], size, acc, visit);
    }
    go(items, size, 0, visit);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arc_diagram::{Component, RawArcDiagram};
    use proptest::prelude::*;

    fn interval(n: u32, matching: &[[u32; 2]]) -> ArcDiagram {
        RawArcDiagram {
            components: vec![Component { kind: ComponentKind::Interval, points: (1..=n).collect() }],
            matching: matching.to_vec(),
        }
        .try_into()
        .unwrap()
    }

    fn d1() -> ArcDiagram {
        interval(2, &[[1, 2]])
    }

    fn d2() -> ArcDiagram {
        interval(4, &[[1, 3], [2, 4]])
    }

    fn circle_diagram() -> ArcDiagram {
        RawArcDiagram {
            components: vec![
                Component { kind: ComponentKind::Interval, points: vec![1, 2] },
                Component { kind: ComponentKind::Circle, points: vec![3, 4] },
            ],
            matching: vec![[1, 3], [2, 4]],
        }
        .try_into()
        .unwrap()
    }

    fn solid(d: &ArcDiagram, a: u32, b: u32) -> Strand {
        Strand::between(d, a, b, 0).unwrap()
    }

    #[test]
    fn weights() {
        assert_eq!(StrandsPicture::empty().weight(), 0);
        assert_eq!(StrandsPicture::idempotent(1).weight(), 1);
        let d3 = interval(6, &[[1, 2], [3, 4], [5, 6]]);
        let x = StrandsPicture::new(0b100, vec![solid(&d3, 1, 2), solid(&d3, 3, 4)]);
        assert_eq!(x.weight(), 3);
        assert!(x.validate(&d3, None).is_ok());
    }

    #[test]
    fn d1_weight_one_basis() {
        let d = d1();
        let basis = enumerate_basis(&d, 1, 2);
        assert_eq!(basis.len(), 2);
        assert!(basis.contains(&StrandsPicture::idempotent(1)));
        assert!(basis.contains(&StrandsPicture::new(0, vec![solid(&d, 1, 2)])));
        assert_eq!(enumerate_basis(&d, 0, 2), vec![StrandsPicture::empty()]);
    }

    #[test]
    fn crossing_counts_on_an_interval() {
        let d = interval(4, &[[1, 2], [3, 4]]);
        let nested = StrandsPicture::new(0, vec![solid(&d, 1, 4), solid(&d, 2, 3)]);
        assert_eq!(nested.crossing_count(&d), 1);
        let d = interval(4, &[[1, 3], [2, 4]]);
        let x = StrandsPicture::new(0, vec![solid(&d, 1, 3), solid(&d, 2, 4)]);
        assert_eq!(x.crossing_count(&d), 0);
    }

    #[test]
    fn crossing_resolution_on_an_interval() {
        // 1->4 over 2->3 resolves to 1->3, 2->4
        let d = interval(4, &[[1, 2], [3, 4]]);
        let x = StrandsPicture::new(0, vec![solid(&d, 1, 4), solid(&d, 2, 3)]);
        let dx = differential(&d, &x);
        assert_eq!(dx, Element::from(StrandsPicture::new(0, vec![solid(&d, 1, 3), solid(&d, 2, 4)])));
    }

    #[test]
    fn solid_through_dotted_pair() {
        let d = interval(4, &[[1, 4], [2, 3]]);
        let x = StrandsPicture::new(0b10, vec![solid(&d, 1, 4)]);
        assert_eq!(x.crossing_count(&d), 2);
        let dx = differential(&d, &x);
        let expect: Element = [
            StrandsPicture::new(0, vec![solid(&d, 1, 2), solid(&d, 2, 4)]),
            StrandsPicture::new(0, vec![solid(&d, 1, 3), solid(&d, 3, 4)]),
        ]
        .into_iter()
        .collect();
        assert_eq!(dx, expect);
    }

    #[test]
    fn idempotents_act_as_identities() {
        for d in [d1(), d2()] {
            for x in enumerate_all(&d, 2, None) {
                let lam = x.left_idempotent(&d);
                let rho = x.right_idempotent(&d);
                assert_eq!(multiply(&d, &lam, &x), Element::from(x.clone()));
                assert_eq!(multiply(&d, &x, &rho), Element::from(x.clone()));
                for e in idempotents(&d) {
                    if e != lam {
                        assert!(multiply(&d, &e, &x).is_zero());
                    }
                    if e != rho {
                        assert!(multiply(&d, &x, &e).is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn idempotent_examples() {
        assert_eq!(idempotents(&d1()).len(), 2);
        let d3 = interval(6, &[[1, 4], [2, 5], [3, 6]]);
        let ids = idempotents(&d3);
        assert_eq!(ids.len(), 8);
        for e in ids {
            assert_eq!(multiply(&d3, &e, &e), Element::from(e));
        }
        let d = d1();
        let x = StrandsPicture::new(0, vec![solid(&d, 1, 2)]);
        assert_eq!(x.left_idempotent(&d), StrandsPicture::idempotent(1));
    }

    #[test]
    fn hand_concatenation_on_d2() {
        let d = d2();
        // 1->2 then 2->3, dotted pair {2,4} consumed on the left, {1,3} on the right
        let x = StrandsPicture::new(0, vec![solid(&d, 1, 2)]);
        let y = StrandsPicture::new(0, vec![solid(&d, 2, 3)]);
        assert_eq!(multiply(&d, &x, &y), Element::from(StrandsPicture::new(0, vec![solid(&d, 1, 3)])));
        // 1->2 with {1,3}? not allowed; instead x = 2->3 and y = {1,3} dotted is mismatched
        let x = StrandsPicture::new(0, vec![solid(&d, 2, 3)]);
        let y = StrandsPicture::idempotent(0b01);
        assert_eq!(multiply(&d, &x, &y), Element::from(x.clone()));
    }

    #[test]
    fn sampled_crossings_agree_on_a_circle() {
        let d = circle_diagram();
        let n = 2i64;
        let strands: Vec<Strand> = (0..2)
            .flat_map(|s| (s + 1..s + 3 * n).map(move |e| Strand::new(1, s, e)))
            .chain((0..2).map(|p| Strand::new(1, p, p)))
            .collect();
        for a in &strands {
            for b in &strands {
                let generic = (a.start - b.start).rem_euclid(n) != 0 && (a.end - b.end).rem_euclid(n) != 0;
                if generic {
                    assert_eq!(strand_crossings(&d, a, b), sampled_crossings(a, b, n), "{a:?} {b:?}");
                }
            }
        }
    }

    // straight lines in the universal cover, sampled on a fine grid
    fn sampled_crossings(a: &Strand, b: &Strand, n: i64) -> u64 {
        let steps = 997;
        let mut count = 0;
        for k in -10..=10 {
            let f = |i: i64| {
                let t = i as f64 / steps as f64;
                let pa = a.start as f64 + t * (a.end - a.start) as f64;
                let pb = b.start as f64 + t * (b.end - b.start) as f64 + (k * n) as f64;
                pa - pb
            };
            let mut prev = f(0).signum();
            for i in 1..=steps {
                let cur = f(i);
                if cur != 0.0 && cur.signum() != prev {
                    count += 1;
                    prev = cur.signum();
                }
            }
        }
        count
    }

    #[test]
    fn dotted_strand_vs_winding_solid() {
        let d = circle_diagram();
        // from point 3 twice around back to itself, past point 4 twice
        let x = StrandsPicture::new(0, vec![Strand::new(1, 0, 4)]);
        let h = horizontal(&d, d.global(1, 1));
        assert_eq!(strand_crossings(&d, &x.solids[0], &h), 2);
        let h0 = horizontal(&d, d.global(1, 0));
        assert_eq!(strand_crossings(&d, &x.solids[0], &h0), 1);
    }

    #[test]
    fn between_respects_winding() {
        let d = circle_diagram();
        assert_eq!(Strand::between(&d, 3, 4, 0).unwrap(), Strand::new(1, 0, 1));
        assert_eq!(Strand::between(&d, 4, 3, 0).unwrap(), Strand::new(1, 1, 2));
        assert_eq!(Strand::between(&d, 3, 3, 1).unwrap(), Strand::new(1, 0, 2));
        assert_eq!(Strand::between(&d, 3, 4, 1).unwrap(), Strand::new(1, 0, 3));
        assert_eq!(Strand::new(1, 0, 2).winding(&d), 1);
        assert!(Strand::between(&d, 1, 3, 0).is_err());
    }

    fn brute_force_count(d: &ArcDiagram, k: usize, cap: usize) -> usize {
        let mut universe = Vec::new();
        for g in 0..d.point_count() {
            let p = d.position(g);
            let n = d.len_of(p.comp) as i64;
            let s = p.index as i64;
            for end in s + 1..s + 4 * n.max(1) {
                let st = Strand::new(p.comp, s, end);
                if (d.kind(p.comp) == ComponentKind::Interval && end < n)
                    || (d.kind(p.comp) == ComponentKind::Circle && st.winding(d) <= cap)
                {
                    universe.push(st);
                }
            }
        }
        let mut count = 0;
        for subset in 0..1u64 << universe.len() {
            let solids: Vec<Strand> =
                (0..universe.len()).filter(|&i| subset >> i & 1 == 1).map(|i| universe[i]).collect();
            if solids.len() > k {
                continue;
            }
            for dotted in 0..1u64 << d.pair_count() {
                let x = StrandsPicture::new(dotted, solids.clone());
                if x.weight() == k && x.validate(d, Some(cap)).is_ok() {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn enumeration_matches_generate_and_filter() {
        for d in [d1(), d2(), interval(4, &[[1, 4], [2, 3]]), circle_diagram()] {
            for k in 0..=d.pair_count() {
                let got = enumerate_basis(&d, k, 1);
                assert_eq!(got.len(), brute_force_count(&d, k, 1), "k = {k}");
                assert!(got.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn beyond_top_weight_is_empty() {
        assert!(enumerate_basis(&d2(), 3, 2).is_empty());
    }

    #[test]
    fn d2_has_a_vanishing_product_from_a_double_crossing() {
        let d = d2();
        let basis = enumerate_all(&d, 0, None);
        let found = basis.iter().any(|x| {
            basis.iter().any(|y| {
                x.right_idempotent_mask(&d) == y.left_idempotent_mask(&d)
                    && product(&d, x, y).is_none()
                    && x.solids.iter().all(|s| {
                        let b = s.end_point(&d);
                        y.solids.iter().any(|t| t.start_point(&d) == Some(b))
                            || y.dotted >> d.pair_of(b) & 1 == 1
                    })
            })
        });
        assert!(found);
    }

    #[test]
    fn checked_multiply_rejects_foreign_pictures() {
        let d = d1();
        let bogus = StrandsPicture::new(0, vec![Strand::new(0, 0, 3)]);
        assert!(matches!(checked_multiply(&d, &bogus, &bogus), Err(Error::Domain(_))));
    }

    fn exhaustive_axioms(d: &ArcDiagram, cap: usize) {
        let basis = enumerate_all(d, cap, None);
        for x in &basis {
            let dx = differential(d, x);
            assert!(dx.differential(d).is_zero(), "d² ≠ 0 on {}", x.describe(d));
            for y in &basis {
                let xy = multiply(d, x, y);
                let lhs = xy.differential(d);
                let rhs = dx.mul(d, &Element::from(y.clone())).add(&Element::from(x.clone()).mul(d, &differential(d, y)));
                assert_eq!(lhs, rhs, "Leibniz fails on {} · {}", x.describe(d), y.describe(d));
            }
        }
    }

    #[test]
    fn axiom_report_on_d1() {
        let r = check_axioms(&d1(), None, 2, Some(1));
        assert!(r.passed());
        assert_eq!(r.basis_sizes.values().copied().collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(r.d_squared_checked, 3);
        assert!(r.associativity_checked > 0);
    }

    #[test]
    fn axioms_on_small_interval_diagrams() {
        exhaustive_axioms(&d1(), 0);
        exhaustive_axioms(&d2(), 0);
        exhaustive_axioms(&interval(4, &[[1, 4], [2, 3]]), 0);
    }

    #[test]
    fn axioms_on_a_circle_diagram() {
        exhaustive_axioms(&circle_diagram(), 1);
    }

    fn matching_strategy() -> impl Strategy<Value = Vec<[u32; 2]>> {
        (1usize..=3).prop_flat_map(|pairs| {
            Just((1..=2 * pairs as u32).collect::<Vec<_>>()).prop_shuffle().prop_map(|pts| {
                pts.chunks(2).map(|c| [c[0], c[1]]).collect::<Vec<_>>()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn random_interval_diagrams_satisfy_axioms(matching in matching_strategy(), seed in any::<u64>()) {
            let d = interval(2 * matching.len() as u32, &matching);
            let basis = enumerate_all(&d, 0, None);
            let pick = |i: u64| &basis[(seed.rotate_left(i as u32 * 7) % basis.len() as u64) as usize];
            for i in 0..16 {
                let (x, y, z) = (pick(i), pick(i + 1), pick(i + 2));
                prop_assert!(differential(&d, x).differential(&d).is_zero());
                let xy = Element::from(x.clone()).mul(&d, &Element::from(y.clone()));
                let lhs = xy.mul(&d, &Element::from(z.clone()));
                let rhs = Element::from(x.clone()).mul(&d, &Element::from(y.clone()).mul(&d, &Element::from(z.clone())));
                prop_assert_eq!(lhs, rhs);
                let leib = differential(&d, x).mul(&d, &Element::from(y.clone()))
                    .add(&Element::from(x.clone()).mul(&d, &differential(&d, y)));
                prop_assert_eq!(xy.differential(&d), leib);
            }
        }

        #[test]
        fn products_and_differentials_preserve_weight(matching in matching_strategy()) {
            let d = interval(2 * matching.len() as u32, &matching);
            let basis = enumerate_all(&d, 0, None);
            for x in &basis {
                for t in differential(&d, x).terms() {
                    prop_assert_eq!(t.weight(), x.weight());
                    prop_assert!(t.validate(&d, None).is_ok());
                }
                for y in &basis {
                    if let Some(p) = product(&d, x, y) {
                        prop_assert_eq!(p.weight(), x.weight());
                        prop_assert!(p.validate(&d, None).is_ok());
                    }
                }
            }
        }
    }
}

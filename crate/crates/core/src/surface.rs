//! Combinatorial isomorphism types of sutured surfaces.
//!
//! A component is recorded by its genus and, for each boundary circle, how the
//! suture points split it into `S₊` and `S₋` arcs. `S₊` intervals are named by
//! [`IntervalLabel`]s `(component, circle, index)`, where `index` counts the
//! `S₊` arcs of the circle in boundary-orientation order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Suture pattern of one boundary circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SutureCircle {
    FullyPlus,
    FullyMinus,
    /// `k ≥ 1` arcs of `S₊` alternating with `k` arcs of `S₋`.
    Alternating(usize),
}

impl SutureCircle {
    pub fn alternating_or_minus(plus: usize) -> Self {
        if plus == 0 {
            Self::FullyMinus
        } else {
            Self::Alternating(plus)
        }
    }

    pub fn plus_intervals(&self) -> usize {
        match self {
            Self::Alternating(k) => *k,
            _ => 0,
        }
    }

    pub fn meets_minus(&self) -> bool {
        !matches!(self, Self::FullyPlus)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum FullKind {
    FullyPlus,
    FullyMinus,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SutureCircleRepr {
    Alternating { plus: usize, minus: usize },
    Full(FullKind),
}

impl Serialize for SutureCircle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Self::FullyPlus => SutureCircleRepr::Full(FullKind::FullyPlus),
            Self::FullyMinus => SutureCircleRepr::Full(FullKind::FullyMinus),
            Self::Alternating(k) => SutureCircleRepr::Alternating { plus: k, minus: k },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SutureCircle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match SutureCircleRepr::deserialize(d)? {
            SutureCircleRepr::Full(FullKind::FullyPlus) => Ok(Self::FullyPlus),
            SutureCircleRepr::Full(FullKind::FullyMinus) => Ok(Self::FullyMinus),
            SutureCircleRepr::Alternating { plus, minus } if plus == minus && plus >= 1 => {
                Ok(Self::Alternating(plus))
            }
            SutureCircleRepr::Alternating { plus, minus } => Err(serde::de::Error::custom(format!(
                "boundary circle must alternate: plus = {plus}, minus = {minus}"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SurfaceComponent {
    pub genus: usize,
    pub boundary: Vec<SutureCircle>,
}

impl SurfaceComponent {
    /// Boundary circles meeting `S₋`.
    pub fn minus_circles(&self) -> usize {
        self.boundary.iter().filter(|c| c.meets_minus()).count()
    }

    /// Connected components of `S₊`: intervals plus fully-`S₊` circles.
    pub fn plus_components(&self) -> usize {
        self.boundary
            .iter()
            .map(|c| match c {
                SutureCircle::FullyPlus => 1,
                other => other.plus_intervals(),
            })
            .sum()
    }

    /// `dim H₁(F, S₊; F₂)` of this component.
    pub fn h1_rank(&self) -> usize {
        2 * self.genus + self.minus_circles() - 1 + self.plus_components().saturating_sub(1)
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.boundary.len() as i64
    }
}

/// A sutured surface up to homeomorphism.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SuturedSurfaceType {
    pub components: Vec<SurfaceComponent>,
}

/// Names one `S₊` interval of a surface.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntervalLabel {
    pub comp: usize,
    pub circle: usize,
    pub index: usize,
}

impl IntervalLabel {
    pub fn new(comp: usize, circle: usize, index: usize) -> Self {
        Self { comp, circle, index }
    }
}

impl fmt::Display for IntervalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}.b{}.i{}", self.comp, self.circle, self.index)
    }
}

impl Serialize for IntervalLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IntervalLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for IntervalLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("interval label {s:?} is not of the form cN.bN.iN"));
        let mut parts = s.split('.');
        let mut field = |prefix: char| -> Result<usize> {
            let p = parts.next().ok_or_else(bad)?;
            p.strip_prefix(prefix).and_then(|n| n.parse().ok()).ok_or_else(bad)
        };
        let label = Self::new(field('c')?, field('b')?, field('i')?);
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(label)
    }
}

/// A vertex of the spanning graph `Γ_F`: one per connected component of `S₊`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PlusVertex {
    Interval(IntervalLabel),
    /// A fully-`S₊` boundary circle `(component, circle)`.
    Circle(usize, usize),
}

impl PlusVertex {
    pub fn comp(&self) -> usize {
        match self {
            Self::Interval(l) => l.comp,
            Self::Circle(c, _) => *c,
        }
    }
}

impl fmt::Display for PlusVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Interval(l) => write!(f, "{l}"),
            Self::Circle(c, b) => write!(f, "c{c}.b{b}"),
        }
    }
}

impl SuturedSurfaceType {
    pub fn new(components: Vec<SurfaceComponent>) -> Result<Self> {
        let s = Self { components };
        s.validate()?;
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("surface types always serialize")
    }

    /// Every component needs boundary meeting `S₋`; `S₊` may be empty.
    pub fn validate(&self) -> Result<()> {
        for (i, c) in self.components.iter().enumerate() {
            if c.minus_circles() == 0 {
                return Err(Error::InvalidSurface(format!(
                    "component {i} has no boundary circle meeting S-"
                )));
            }
            if c.boundary.contains(&SutureCircle::Alternating(0)) {
                return Err(Error::InvalidSurface(format!("component {i} has an empty alternating circle")));
            }
        }
        Ok(())
    }

    /// Components and boundary circles sorted into a canonical order.
    pub fn canonical(&self) -> Self {
        let mut comps: Vec<SurfaceComponent> = self
            .components
            .iter()
            .map(|c| {
                let mut b = c.boundary.clone();
                b.sort();
                SurfaceComponent { genus: c.genus, boundary: b }
            })
            .collect();
        comps.sort();
        Self { components: comps }
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// All `S₊` interval labels in lexicographic order.
    pub fn intervals(&self) -> Vec<IntervalLabel> {
        let mut out = Vec::new();
        for (ci, c) in self.components.iter().enumerate() {
            for (bi, b) in c.boundary.iter().enumerate() {
                for k in 0..b.plus_intervals() {
                    out.push(IntervalLabel::new(ci, bi, k));
                }
            }
        }
        out
    }

    pub fn has_interval(&self, l: IntervalLabel) -> bool {
        self.components
            .get(l.comp)
            .and_then(|c| c.boundary.get(l.circle))
            .is_some_and(|b| l.index < b.plus_intervals())
    }

    pub fn check_interval(&self, l: IntervalLabel) -> Result<()> {
        if self.has_interval(l) {
            Ok(())
        } else {
            Err(Error::UnknownLabel(l.to_string()))
        }
    }

    /// `S₊` components of one surface component, intervals first in label order.
    pub fn plus_vertices(&self, comp: usize) -> Vec<PlusVertex> {
        let c = &self.components[comp];
        let mut out = Vec::new();
        for (bi, b) in c.boundary.iter().enumerate() {
            for k in 0..b.plus_intervals() {
                out.push(PlusVertex::Interval(IntervalLabel::new(comp, bi, k)));
            }
        }
        for (bi, b) in c.boundary.iter().enumerate() {
            if *b == SutureCircle::FullyPlus {
                out.push(PlusVertex::Circle(comp, bi));
            }
        }
        out
    }

    /// Total `dim H₁(F, S₊; F₂)`.
    pub fn h1_rank(&self) -> usize {
        self.components.iter().map(SurfaceComponent::h1_rank).sum()
    }

    /// `self ⊔ other`; components of `other` are shifted past those of `self`.
    pub fn disjoint_union(&self, other: &Self) -> Self {
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        Self { components }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_schema() {
        let text = r#"{"components":[{"genus":1,"boundary":[{"plus":2,"minus":2},"fully_plus","fully_minus"]}]}"#;
        let s = SuturedSurfaceType::from_json(text).unwrap();
        assert_eq!(
            s.components[0].boundary,
            vec![SutureCircle::Alternating(2), SutureCircle::FullyPlus, SutureCircle::FullyMinus]
        );
        assert_eq!(s.to_json(), text);
    }

    #[test]
    fn non_alternating_circle_is_rejected() {
        let text = r#"{"components":[{"genus":0,"boundary":[{"plus":2,"minus":1}]}]}"#;
        assert!(matches!(SuturedSurfaceType::from_json(text), Err(Error::Parse(_))));
        let text = r#"{"components":[{"genus":0,"boundary":["fully_plus"]}]}"#;
        assert!(matches!(SuturedSurfaceType::from_json(text), Err(Error::InvalidSurface(_))));
    }

    #[test]
    fn h1_ranks() {
        let disk = SurfaceComponent { genus: 0, boundary: vec![SutureCircle::Alternating(1)] };
        assert_eq!(disk.h1_rank(), 0);
        let pants = SurfaceComponent { genus: 0, boundary: vec![SutureCircle::Alternating(3)] };
        assert_eq!(pants.h1_rank(), 2);
        let torus = SurfaceComponent { genus: 1, boundary: vec![SutureCircle::Alternating(1)] };
        assert_eq!(torus.h1_rank(), 2);
        // σ₊ = 0: H₁(F, ∅) of an annulus.
        let annulus = SurfaceComponent {
            genus: 0,
            boundary: vec![SutureCircle::FullyMinus, SutureCircle::FullyMinus],
        };
        assert_eq!(annulus.h1_rank(), 1);
    }

    #[test]
    fn labels_parse() {
        let l: IntervalLabel = "c1.b0.i2".parse().unwrap();
        assert_eq!(l, IntervalLabel::new(1, 0, 2));
        assert!("c1.b0".parse::<IntervalLabel>().is_err());
        assert!("x1.b0.i0".parse::<IntervalLabel>().is_err());
    }
}

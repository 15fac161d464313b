//! The bimodule `E` over `A(Z)` attached to an interval component `I`.
//!
//! Basis elements are strands pictures carrying special strands that enter at
//! the initial endpoint of `I` (see [`Strand::source`]); `E^⊗m` has `m` of them,
//! lane `1` being the earliest. Actions and the differential are the ordinary
//! strands operations, so [`multiply`] and [`differential`] apply directly.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::arc_diagram::ArcDiagram;
use crate::error::{Error, Result};
use crate::gf2::{GF2Matrix, GF2Vector};
use crate::strands_algebra::{
    differential, enumerate_all, multiply, product, Element, Sources, Strand, StrandsPicture,
};

/// All pictures of `E^⊗m` for interval `interval`, sorted by weight.
pub fn e_basis(d: &ArcDiagram, interval: usize, m: usize, winding_cap: usize) -> Result<Vec<StrandsPicture>> {
    d.check_interval(interval)?;
    Ok(enumerate_all(d, winding_cap, Some(Sources { interval, count: m })))
}

pub fn left_act(d: &ArcDiagram, a: &StrandsPicture, x: &StrandsPicture) -> Element {
    multiply(d, a, x)
}

pub fn right_act(d: &ArcDiagram, x: &StrandsPicture, a: &StrandsPicture) -> Element {
    multiply(d, x, a)
}

pub fn e_differential(d: &ArcDiagram, x: &StrandsPicture) -> Element {
    differential(d, x)
}

/// An element of `S`: the special strand is the only one that moves.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpecialElement {
    /// Points of `I` passed before reaching the endpoint.
    pub degree: usize,
    pub picture: StrandsPicture,
}

impl SpecialElement {
    /// Position on `I` where the special strand ends.
    pub fn end(&self) -> usize {
        self.picture.solids[0].end as usize
    }
}

/// `S`, sorted by increasing degree.
pub fn special_set(d: &ArcDiagram, interval: usize) -> Result<Vec<SpecialElement>> {
    d.check_interval(interval)?;
    let mut out = Vec::new();
    for q in 0..d.len_of(interval) {
        let qbit = 1u64 << d.pair_of(d.global(interval, q));
        for dotted in 0..1u64 << d.pair_count() {
            if dotted & qbit == 0 {
                let picture = StrandsPicture::new(dotted, vec![Strand::source(interval, 1, q as i64)]);
                out.push(SpecialElement { degree: q, picture });
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Splits a basis element of `E` as `a·y` with `a ∈ A(Z)` and `y ∈ S`.
pub fn factor(d: &ArcDiagram, x: &StrandsPicture) -> Result<(StrandsPicture, SpecialElement)> {
    let mut sources = x.sources();
    let (Some(special), None) = (sources.next(), sources.next()) else {
        return Err(Error::Domain("factorization needs exactly one special strand".into()));
    };
    let q = special.end;
    let interval = special.comp;
    let qbit = 1u64 << d.pair_of(d.global(interval, q as usize));
    let y = StrandsPicture::new(x.right_idempotent_mask(d) & !qbit, vec![*special]);
    let a = StrandsPicture::new(x.dotted, x.solids.iter().filter(|s| !s.is_source()).copied().collect());
    Ok((a, SpecialElement { degree: q as usize, picture: y }))
}

/// Outcome of checking that `x ↦ (a, y)` is a bijection onto compatible pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorizationReport {
    pub basis_size: usize,
    pub special_count: usize,
    pub compatible_pairs: usize,
    pub round_trip_failures: Vec<String>,
}

impl FactorizationReport {
    pub fn passed(&self) -> bool {
        self.round_trip_failures.is_empty() && self.basis_size == self.compatible_pairs
    }
}

pub fn factorization_check(d: &ArcDiagram, interval: usize, winding_cap: usize) -> Result<FactorizationReport> {
    let basis = e_basis(d, interval, 1, winding_cap)?;
    let specials = special_set(d, interval)?;
    let algebra = enumerate_all(d, winding_cap, None);
    let mut by_right: HashMap<u64, usize> = HashMap::new();
    for a in &algebra {
        *by_right.entry(a.right_idempotent_mask(d)).or_default() += 1;
    }
    let compatible_pairs = specials
        .iter()
        .map(|y| by_right.get(&y.picture.left_idempotent_mask(d)).copied().unwrap_or(0))
        .sum();
    let mut round_trip_failures = Vec::new();
    for x in &basis {
        let (a, y) = factor(d, x)?;
        let ok = a.right_idempotent_mask(d) == y.picture.left_idempotent_mask(d)
            && specials.binary_search(&y).is_ok()
            && product(d, &a, &y.picture).as_ref() == Some(x);
        if !ok {
            round_trip_failures.push(x.describe(d));
        }
    }
    Ok(FactorizationReport { basis_size: basis.len(), special_count: specials.len(), compatible_pairs, round_trip_failures })
}

/// Outcome of checking the degree filtration on `S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiltrationReport {
    pub special_count: usize,
    pub max_degree: usize,
    pub differential_terms: usize,
    pub violations: Vec<String>,
}

impl FiltrationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every term of `d(y)`, `y ∈ S`, factors as `a'·y'` with `deg y' < deg y`.
pub fn filtration_check(d: &ArcDiagram, interval: usize) -> Result<FiltrationReport> {
    let specials = special_set(d, interval)?;
    let mut violations = Vec::new();
    let mut differential_terms = 0;
    for y in &specials {
        for term in e_differential(d, &y.picture).terms() {
            differential_terms += 1;
            let (_, y2) = factor(d, term)?;
            if y2.degree >= y.degree {
                violations.push(format!("{} -> {}", y.picture.describe(d), term.describe(d)));
            }
        }
    }
    Ok(FiltrationReport {
        special_count: specials.len(),
        max_degree: specials.iter().map(|y| y.degree).max().unwrap_or(0),
        differential_terms,
        violations,
    })
}

/// Moves every special strand `by` lanes later.
pub fn shift_lanes(x: &StrandsPicture, by: usize) -> StrandsPicture {
    let solids = x
        .solids
        .iter()
        .map(|s| if s.is_source() { Strand::new(s.comp, s.start - by as i64, s.end) } else { *s })
        .collect();
    StrandsPicture::new(x.dotted, solids)
}

/// The concatenation `x₁ ⊗ x₂ ↦ x₁·x₂` into `E^⊗2`.
pub fn concatenate(d: &ArcDiagram, x1: &StrandsPicture, x2: &StrandsPicture) -> Option<StrandsPicture> {
    product(d, x1, &shift_lanes(x2, x1.source_count()))
}

/// Outcome of comparing `E ⊗_{A(Z)} E` with `E^⊗2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TensorIsoReport {
    pub m: usize,
    pub generators: usize,
    pub relation_rank: usize,
    pub quotient_dim: usize,
    pub target_dim: usize,
    pub well_defined: bool,
    pub bijective: bool,
    pub commutes_with_differential: bool,
}

impl TensorIsoReport {
    pub fn passed(&self) -> bool {
        self.well_defined && self.bijective && self.commutes_with_differential
    }
}

fn index_of(basis: &[StrandsPicture]) -> HashMap<&StrandsPicture, usize> {
    basis.iter().enumerate().map(|(i, p)| (p, i)).collect()
}

/// Builds `E ⊗_{A(Z)} E` as a quotient of the idempotent-matched tensor
/// product and checks that concatenation is an isomorphism of differential
/// modules onto `E^⊗2`. For `m = 1` both sides are `E` and the map is the
/// identity. Diagrams with circles are rejected, since the check needs a
/// finite basis closed under products.
pub fn tensor_iso(d: &ArcDiagram, interval: usize, m: usize) -> Result<TensorIsoReport> {
    d.check_interval(interval)?;
    if d.has_circles() {
        return Err(Error::Domain("tensor_iso needs a diagram without circles".into()));
    }
    match m {
        1 => {
            let n = e_basis(d, interval, 1, 0)?.len();
            Ok(TensorIsoReport {
                m,
                generators: n,
                relation_rank: 0,
                quotient_dim: n,
                target_dim: n,
                well_defined: true,
                bijective: true,
                commutes_with_differential: true,
            })
        }
        2 => tensor_iso_two(d, interval),
        _ => Err(Error::Domain(format!("tensor_iso is implemented for m = 1, 2, not {m}"))),
    }
}

fn tensor_iso_two(d: &ArcDiagram, interval: usize) -> Result<TensorIsoReport> {
    let e1 = e_basis(d, interval, 1, 0)?;
    let e2 = e_basis(d, interval, 2, 0)?;
    let algebra: Vec<StrandsPicture> = enumerate_all(d, 0, None).into_iter().filter(|a| !a.is_idempotent()).collect();
    let e1_index = index_of(&e1);
    let e2_index = index_of(&e2);

    let mut by_left: HashMap<u64, Vec<usize>> = HashMap::new();
    for (j, x) in e1.iter().enumerate() {
        by_left.entry(x.left_idempotent_mask(d)).or_default().push(j);
    }
    let mut gens: Vec<(usize, usize)> = Vec::new();
    for (i, x) in e1.iter().enumerate() {
        for &j in by_left.get(&x.right_idempotent_mask(d)).into_iter().flatten() {
            gens.push((i, j));
        }
    }
    let gen_index: HashMap<(usize, usize), usize> = gens.iter().enumerate().map(|(k, &g)| (g, k)).collect();
    let g = gens.len();
    let lookup = |p: &StrandsPicture| *e1_index.get(p).expect("products of E-pictures stay in the basis");

    // relations x₁a ⊗ x₂ + x₁ ⊗ ax₂
    let relations: Vec<GF2Vector> = e1
        .par_iter()
        .flat_map_iter(|x1| {
            let mut local = Vec::new();
            for a in algebra.iter().filter(|a| a.left_idempotent_mask(d) == x1.right_idempotent_mask(d)) {
                for &j in by_left.get(&a.right_idempotent_mask(d)).into_iter().flatten() {
                    let x2 = &e1[j];
                    let mut v = GF2Vector::zeros(g);
                    if let Some(x1a) = product(d, x1, a) {
                        v.flip(gen_index[&(lookup(&x1a), j)]);
                    }
                    if let Some(ax2) = product(d, a, x2) {
                        v.flip(gen_index[&(e1_index[x1], lookup(&ax2))]);
                    }
                    if !v.is_zero() {
                        local.push(v);
                    }
                }
            }
            local
        })
        .collect();
    let rel = GF2Matrix::from_columns(g, &relations)?;
    let coker = rel.cokernel_basis();

    let mut phi = GF2Matrix::zeros(e2.len(), g);
    for (k, &(i, j)) in gens.iter().enumerate() {
        if let Some(p) = concatenate(d, &e1[i], &e1[j]) {
            phi.set(e2_index[&p], k, true);
        }
    }
    let well_defined = phi.mul(&rel)?.is_zero();
    let induced = phi.mul(&coker.section())?;
    let bijective = induced.is_square() && induced.is_invertible();

    let mut d_gen = GF2Matrix::zeros(g, g);
    for (k, &(i, j)) in gens.iter().enumerate() {
        for t in differential(d, &e1[i]).terms() {
            d_gen.flip(gen_index[&(lookup(t), j)], k);
        }
        for t in differential(d, &e1[j]).terms() {
            d_gen.flip(gen_index[&(i, lookup(t))], k);
        }
    }
    let mut d_target = GF2Matrix::zeros(e2.len(), e2.len());
    for (k, x) in e2.iter().enumerate() {
        for t in differential(d, x).terms() {
            d_target.flip(e2_index[t], k);
        }
    }
    let commutes_with_differential = phi.mul(&d_gen)? == d_target.mul(&phi)?;

    Ok(TensorIsoReport {
        m: 2,
        generators: g,
        relation_rank: rel.rank(),
        quotient_dim: coker.dim(),
        target_dim: e2.len(),
        well_defined,
        bijective,
        commutes_with_differential,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arc_diagram::{Component, ComponentKind, RawArcDiagram};
    use crate::corpus;
    use crate::nilcoxeter::{nc_act, nc_differential, NCElement, Perm};

    fn no_points_on_first() -> ArcDiagram {
        RawArcDiagram {
            components: vec![
                Component { kind: ComponentKind::Interval, points: vec![] },
                Component { kind: ComponentKind::Interval, points: vec![1, 2] },
            ],
            matching: vec![[1, 2]],
        }
        .try_into()
        .unwrap()
    }

    #[test]
    fn circles_are_rejected() {
        let d = corpus::diagram("D5").unwrap();
        assert_eq!(e_basis(&d, 1, 1, 2), Err(Error::NotAnInterval(1)));
        assert_eq!(special_set(&d, 1), Err(Error::NotAnInterval(1)));
    }

    #[test]
    fn d1_basis_and_specials() {
        let d = corpus::diagram("D1").unwrap();
        let basis = e_basis(&d, 0, 1, 2).unwrap();
        // the special ends at 1 or at 2; both have weight 1
        assert_eq!(basis.len(), 2);
        let s = special_set(&d, 0).unwrap();
        assert_eq!(s.iter().map(|y| (y.end(), y.degree)).collect::<Vec<_>>(), vec![(0, 0), (1, 1)]);
        for y in &s {
            assert_eq!(y.picture.right_idempotent_mask(&d), 1);
        }
    }

    #[test]
    fn m_zero_is_the_algebra() {
        let d = corpus::diagram("D2").unwrap();
        assert_eq!(e_basis(&d, 0, 0, 2).unwrap(), enumerate_all(&d, 2, None));
    }

    #[test]
    fn empty_interval_gives_zero_bimodule() {
        let d = no_points_on_first();
        assert!(e_basis(&d, 0, 1, 2).unwrap().is_empty());
        assert!(special_set(&d, 0).unwrap().is_empty());
        assert!(filtration_check(&d, 0).unwrap().passed());
    }

    #[test]
    fn generate_and_filter_agrees() {
        let d = corpus::diagram("D2").unwrap();
        let basis = e_basis(&d, 0, 1, 0).unwrap();
        let mut brute = 0;
        for q in 0..4 {
            for a in enumerate_all(&d, 0, None) {
                let mut solids = a.solids.clone();
                solids.push(Strand::source(0, 1, q));
                let x = StrandsPicture::new(a.dotted, solids);
                if x.validate(&d, None).is_ok() {
                    brute += 1;
                    assert!(basis.contains(&x));
                }
            }
        }
        assert_eq!(brute, basis.len());
    }

    #[test]
    fn idempotents_act_on_both_sides() {
        for name in ["D1", "D2"] {
            let d = corpus::diagram(name).unwrap();
            for x in e_basis(&d, 0, 1, 2).unwrap() {
                let (lam, rho) = (x.left_idempotent_mask(&d), x.right_idempotent_mask(&d));
                for e in 0..1u64 << d.pair_count() {
                    let e_pic = StrandsPicture::idempotent(e);
                    let l = left_act(&d, &e_pic, &x);
                    let r = right_act(&d, &x, &e_pic);
                    assert_eq!(l.is_zero(), e != lam);
                    assert_eq!(r.is_zero(), e != rho);
                    if e == lam {
                        assert_eq!(l, Element::from(x.clone()));
                    }
                }
            }
        }
    }

    #[test]
    fn factor_of_a_special_element_is_trivial() {
        let d = corpus::diagram("D2").unwrap();
        for y in special_set(&d, 0).unwrap() {
            let (a, y2) = factor(&d, &y.picture).unwrap();
            assert_eq!(a, y.picture.left_idempotent(&d));
            assert_eq!(y2, y);
        }
    }

    #[test]
    fn factorization_is_a_bijection() {
        for (name, d) in corpus::diagrams() {
            for i in d.intervals() {
                let r = factorization_check(&d, i, 2).unwrap();
                assert!(r.passed(), "{name} interval {i}: {r:?}");
            }
        }
    }

    #[test]
    fn filtration_decreases() {
        let d = corpus::diagram("D2").unwrap();
        let r = filtration_check(&d, 0).unwrap();
        assert!(r.passed());
        assert!(r.differential_terms > 0);
        assert!(filtration_check(&corpus::diagram("D1").unwrap(), 0).unwrap().passed());
    }

    #[test]
    fn bimodule_axioms_exhaustively() {
        for name in ["D1", "D2", "D4"] {
            let d = corpus::diagram(name).unwrap();
            let algebra = enumerate_all(&d, 0, None);
            for x in e_basis(&d, 0, 1, 0).unwrap() {
                let dx = e_differential(&d, &x);
                assert!(dx.differential(&d).is_zero());
                for a in &algebra {
                    let ax = left_act(&d, a, &x);
                    let left_leibniz =
                        differential(&d, a).mul(&d, &Element::from(x.clone())).add(&Element::from(a.clone()).mul(&d, &dx));
                    assert_eq!(ax.differential(&d), left_leibniz);
                    let xa = right_act(&d, &x, a);
                    let right_leibniz =
                        dx.mul(&d, &Element::from(a.clone())).add(&Element::from(x.clone()).mul(&d, &differential(&d, a)));
                    assert_eq!(xa.differential(&d), right_leibniz);
                    for b in &algebra {
                        let lhs = ax.mul(&d, &Element::from(b.clone()));
                        let rhs = Element::from(a.clone()).mul(&d, &right_act(&d, &x, b));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn tensor_iso_examples() {
        for name in ["D1", "D2", "D3", "D4"] {
            let d = corpus::diagram(name).unwrap();
            for i in d.intervals() {
                let r = tensor_iso(&d, i, 2).unwrap();
                assert!(r.passed(), "{name} {i}: {r:?}");
                assert_eq!(r.quotient_dim, r.target_dim);
                assert!(tensor_iso(&d, i, 1).unwrap().passed());
            }
        }
        let d2 = corpus::diagram("D2").unwrap();
        assert!(tensor_iso(&d2, 0, 2).unwrap().target_dim > 0);
    }

    #[test]
    fn nilcoxeter_action() {
        for name in ["D2", "D3"] {
            let d = corpus::diagram(name).unwrap();
            let basis = e_basis(&d, 0, 2, 0).unwrap();
            assert!(!basis.is_empty());
            let algebra = enumerate_all(&d, 0, None);
            let tau = Perm::simple(2, 1).unwrap();
            for x in &basis {
                let ex = Element::from(x.clone());
                assert_eq!(nc_act(&d, &NCElement::one(2), &ex).unwrap(), ex);
                let once = nc_act(&d, &NCElement::from(tau.clone()), &ex).unwrap();
                assert!(nc_act(&d, &NCElement::from(tau.clone()), &once).unwrap().is_zero());
                for w in Perm::all(2) {
                    let ew = NCElement::from(w.clone());
                    let lhs = nc_act(&d, &ew, &ex).unwrap().differential(&d);
                    let rhs = nc_act(&d, &nc_differential(&w), &ex)
                        .unwrap()
                        .add(&nc_act(&d, &ew, &ex.differential(&d)).unwrap());
                    assert_eq!(lhs, rhs, "{w} on {}", x.describe(&d));
                    for a in &algebra {
                        let ea = Element::from(a.clone());
                        let lhs = nc_act(&d, &ew, &ex.mul(&d, &ea)).unwrap();
                        let rhs = nc_act(&d, &ew, &ex).unwrap().mul(&d, &ea);
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }
}

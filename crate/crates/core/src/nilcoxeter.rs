//! NilCoxeter algebras `NCₙ`: permutation diagrams with a length-additive
//! product and a crossing-resolution differential.
//!
//! Permutations are stored 0-based in one-line notation, `w[i]` being where
//! the strand starting at `i` ends. In a product `a·b` the diagram of `a` is
//! drawn first, so `(a·b)[i] = b[a[i]]`.

use std::collections::BTreeSet;
use std::fmt;

use crate::arc_diagram::ArcDiagram;
use crate::error::{Error, Result};
use crate::strands_algebra::{Element, Strand, StrandsPicture};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm {
    images: Vec<usize>,
    length: usize,
}

impl Perm {
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Domain(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Self::new_unchecked(images))
    }

    fn new_unchecked(images: Vec<usize>) -> Self {
        let length = count_inversions(&images);
        Self { images, length }
    }

    pub fn identity(n: usize) -> Self {
        Self::new_unchecked((0..n).collect())
    }

    /// The simple transposition `sᵢ` exchanging strands `i-1` and `i`, for `1 ≤ i < n`.
    pub fn simple(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i >= n {
            return Err(Error::Domain(format!("s{i} does not exist in NC{n}")));
        }
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(i - 1, i);
        Ok(Self::new_unchecked(images))
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Crossing count of the reduced diagram.
    pub fn length(&self) -> usize {
        self.length
    }

    pub fn is_identity(&self) -> bool {
        self.length == 0
    }

    /// `self` followed by `other`, as permutations.
    pub fn then(&self, other: &Self) -> Self {
        Self::new_unchecked(self.images.iter().map(|&i| other.images[i]).collect())
    }

    /// All `n!` permutations in lexicographic order.
    pub fn all(n: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Self::new_unchecked(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
            let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }

    /// The lexicographically least reduced word `[a₁, …, a_ℓ]` with
    /// `self = s_{a₁}·…·s_{a_ℓ}`.
    pub fn reduced_word(&self) -> Vec<usize> {
        let mut w = self.images.clone();
        let mut word = Vec::with_capacity(self.length);
        while let Some(i) = (1..w.len()).find(|&i| w[i - 1] > w[i]) {
            word.push(i);
            w.swap(i - 1, i);
        }
        word
    }

    pub fn from_word(n: usize, word: &[usize]) -> Result<Self> {
        word.iter().try_fold(Self::identity(n), |acc, &i| Ok(acc.then(&Self::simple(n, i)?)))
    }
}

fn count_inversions(w: &[usize]) -> usize {
    let mut count = 0;
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            count += usize::from(w[i] > w[j]);
        }
    }
    count
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = self.reduced_word();
        if word.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = word.iter().map(|i| format!("s{i}")).collect();
        write!(f, "{}", parts.join(""))
    }
}

/// An element of `NCₙ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NCElement {
    n: usize,
    terms: BTreeSet<Perm>,
}

impl NCElement {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeSet::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::from(Perm::identity(n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn toggle(&mut self, w: Perm) {
        debug_assert_eq!(w.n(), self.n);
        if !self.terms.remove(&w) {
            self.terms.insert(w);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &Perm> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_n(self.n, other.n)?;
        let mut out = self.clone();
        for w in &other.terms {
            out.toggle(w.clone());
        }
        Ok(out)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_n(self.n, other.n)?;
        let mut out = Self::zero(self.n);
        for a in &self.terms {
            for b in &other.terms {
                out = out.add(&nc_multiply(a, b)?)?;
            }
        }
        Ok(out)
    }

    pub fn differential(&self) -> Self {
        let mut out = Self::zero(self.n);
        for w in &self.terms {
            for t in nc_differential(w).terms {
                out.toggle(t);
            }
        }
        out
    }
}

impl From<Perm> for NCElement {
    fn from(w: Perm) -> Self {
        let mut e = Self::zero(w.n());
        e.toggle(w);
        e
    }
}

impl fmt::Display for NCElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn check_n(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::Domain(format!("NC{a} and NC{b} elements cannot be combined")))
    }
}

/// Stacks `a` below `b`; zero when the stack has a double crossing.
pub fn nc_multiply(a: &Perm, b: &Perm) -> Result<NCElement> {
    check_n(a.n(), b.n())?;
    let c = a.then(b);
    if c.length() == a.length() + b.length() {
        Ok(NCElement::from(c))
    } else {
        Ok(NCElement::zero(a.n()))
    }
}

/// Sum of all single-crossing resolutions that lose exactly one crossing.
pub fn nc_differential(w: &Perm) -> NCElement {
    let n = w.n();
    let mut out = NCElement::zero(n);
    for i in 0..n {
        for j in i + 1..n {
            if w.images[i] > w.images[j] {
                let mut images = w.images.clone();
                images.swap(i, j);
                let r = Perm::new_unchecked(images);
                if r.length() + 1 == w.length() {
                    out.toggle(r);
                }
            }
        }
    }
    out
}

/// An element `h` with `d(h) = 1`, which makes every `NCₙ`-module contractible.
pub fn acyclicity_witness(n: usize) -> Result<Perm> {
    if n < 2 {
        return Err(Error::NoWitness(n));
    }
    Perm::simple(n, 1)
}

/// Acts by a permutation on the special strands of a picture: lane `j` is
/// rerouted to the end of lane `w(j)`.
pub fn nc_act_picture(d: &ArcDiagram, w: &Perm, x: &StrandsPicture) -> Result<Option<StrandsPicture>> {
    let mut ends: Vec<Option<Strand>> = vec![None; w.n()];
    for s in x.sources() {
        let lane = s.lane().expect("sources have lanes");
        if lane > w.n() {
            return Err(Error::Domain(format!("picture has lane {lane} but the permutation acts on {}", w.n())));
        }
        ends[lane - 1] = Some(*s);
    }
    if ends.iter().any(Option::is_none) || x.source_count() != w.n() {
        return Err(Error::Domain(format!(
            "picture has {} special strands, expected {}",
            x.source_count(),
            w.n()
        )));
    }
    let ends: Vec<Strand> = ends.into_iter().flatten().collect();
    let mut solids: Vec<Strand> = x.solids.iter().filter(|s| !s.is_source()).copied().collect();
    for (j, s) in ends.iter().enumerate() {
        solids.push(Strand::new(s.comp, s.start, ends[w.images[j]].end));
    }
    let y = StrandsPicture::new(x.dotted, solids);
    if y.crossing_count(d) == x.crossing_count(d) + w.length() as u64 {
        Ok(Some(y))
    } else {
        Ok(None)
    }
}

/// The action of `NC_m` on `E^⊗m`, bilinear in both arguments.
pub fn nc_act(d: &ArcDiagram, w: &NCElement, x: &Element) -> Result<Element> {
    let mut out = Element::zero();
    for p in w.terms() {
        for t in x.terms() {
            if let Some(y) = nc_act_picture(d, p, t)? {
                out.toggle(y);
            }
        }
    }
    Ok(out)
}

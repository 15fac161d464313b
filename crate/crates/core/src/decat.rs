//! `K₀` of `A(Z)` over `F₂`, the map induced by `E ⊗ −`, and the operator `Φ_I`
//! on `∧*H₁(F, S₊; F₂)`.
//!
//! Both sides are indexed by subsets of matched pairs, encoded as bitmasks:
//! an idempotent on the `K₀` side, a wedge of homology classes on the other.
//! The identification between them is the identity on masks.

use serde::Serialize;

use crate::arc_diagram::ArcDiagram;
use crate::e_bimodule::special_set;
use crate::error::Result;
use crate::gf2::GF2Matrix;
use crate::nilcoxeter::{acyclicity_witness, nc_differential, NCElement};

/// Dimension of `K₀` of `A(Z)`: one class per idempotent.
pub fn k0_dim(d: &ArcDiagram) -> usize {
    1 << d.pair_count()
}

/// Dimension of `∧*H₁(F, S₊; F₂)`.
pub fn wedge_dim(d: &ArcDiagram) -> usize {
    1 << d.homology_basis().len()
}

/// `[E ⊗ −]` on `K₀`: the column of `e` sums `[λ(y)]` over `y ∈ S` with `ρ(y) = e`.
pub fn k0_e_matrix(d: &ArcDiagram, interval: usize) -> Result<GF2Matrix> {
    k0_e_block(d, interval, None)
}

// restricted to special elements of one weight when `weight` is given
fn k0_e_block(d: &ArcDiagram, interval: usize, weight: Option<usize>) -> Result<GF2Matrix> {
    let n = k0_dim(d);
    let mut m = GF2Matrix::zeros(n, n);
    for y in special_set(d, interval)? {
        if weight.is_some_and(|k| y.picture.weight() != k) {
            continue;
        }
        let rho = y.picture.right_idempotent_mask(d) as usize;
        let lam = y.picture.left_idempotent_mask(d) as usize;
        m.flip(lam, rho);
    }
    Ok(m)
}

/// `Φ_I`: a wedge `X` goes to the sum of `X \ {c}` over `c ∈ X` with `φ_I(c) = 1`.
pub fn phi_matrix(d: &ArcDiagram, interval: usize) -> Result<GF2Matrix> {
    d.check_interval(interval)?;
    let pairs = d.pair_count();
    let mut odd = 0u64;
    for c in 0..pairs {
        if d.phi_pairing(c, interval)? {
            odd |= 1 << c;
        }
    }
    let n = wedge_dim(d);
    let mut m = GF2Matrix::zeros(n, n);
    for x in 0..n as u64 {
        for c in 0..pairs {
            if x & odd & 1 << c != 0 {
                m.flip((x & !(1 << c)) as usize, x as usize);
            }
        }
    }
    Ok(m)
}

/// Restriction of a matrix on subsets to weight `k` columns and weight `k-1` rows.
pub fn graded_block(m: &GF2Matrix, k: usize) -> GF2Matrix {
    let n = m.cols();
    let cols: Vec<usize> = (0..n).filter(|x| x.count_ones() as usize == k).collect();
    let rows: Vec<usize> = (0..n).filter(|x| k > 0 && x.count_ones() as usize == k - 1).collect();
    let mut out = GF2Matrix::zeros(rows.len(), cols.len());
    for (i, &r) in rows.iter().enumerate() {
        for (j, &c) in cols.iter().enumerate() {
            out.set(i, j, m.get(r, c));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockCheck {
    pub k: usize,
    pub e_block: GF2Matrix,
    pub phi_block: GF2Matrix,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MainTheoremReport {
    pub interval: usize,
    pub bijection: &'static str,
    pub k0_dim: usize,
    pub wedge_dim: usize,
    pub k0_e_matrix: GF2Matrix,
    pub phi_matrix: GF2Matrix,
    pub equal: bool,
    pub lowers_weight: bool,
    pub blocks: Vec<BlockCheck>,
}

impl MainTheoremReport {
    pub fn passed(&self) -> bool {
        self.k0_dim == self.wedge_dim && self.equal && self.lowers_weight && self.blocks.iter().all(|b| b.equal)
    }
}

/// Compares `[E ⊗ −]` with `Φ_I`, as a whole and weight by weight.
pub fn verify_main_theorem(d: &ArcDiagram, interval: usize) -> Result<MainTheoremReport> {
    let e = k0_e_matrix(d, interval)?;
    let phi = phi_matrix(d, interval)?;
    let n = e.cols();
    let lowers_weight = (0..n).all(|c| (0..n).all(|r| !e.get(r, c) || r.count_ones() + 1 == c.count_ones()));
    let mut blocks = Vec::new();
    for k in 1..=d.pair_count() {
        let e_block = graded_block(&k0_e_block(d, interval, Some(k))?, k);
        let phi_block = graded_block(&phi, k);
        let equal = e_block == phi_block;
        blocks.push(BlockCheck { k, e_block, phi_block, equal });
    }
    Ok(MainTheoremReport {
        interval,
        bijection: "idempotent on a set of matched pairs <-> wedge of the same pairs",
        k0_dim: k0_dim(d),
        wedge_dim: wedge_dim(d),
        equal: e == phi,
        k0_e_matrix: e,
        phi_matrix: phi,
        lowers_weight,
        blocks,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UAlgebraReport {
    /// Multiplication by `E` in the basis `(1, E)`.
    pub e_matrix: GF2Matrix,
    pub e_squared_zero: bool,
    /// `n` for which `d(s₁) = 1` in `NCₙ`.
    pub witnesses: Vec<usize>,
}

impl UAlgebraReport {
    pub fn passed(&self) -> bool {
        self.e_squared_zero && self.witnesses == (2..=5).collect::<Vec<_>>()
    }
}

/// Checks `F₂[E]/(E²)` and the acyclicity witnesses for `2 ≤ n ≤ 5`.
pub fn u_algebra_check() -> UAlgebraReport {
    let e_matrix = GF2Matrix::from_rows(&[[0u8, 0], [1, 0]]).expect("2x2");
    let e_squared_zero = e_matrix.mul(&e_matrix).expect("square").is_zero();
    let witnesses = (2..=5)
        .filter(|&n| acyclicity_witness(n).is_ok_and(|h| nc_differential(&h) == NCElement::one(n)))
        .collect();
    UAlgebraReport { e_matrix, e_squared_zero, witnesses }
}

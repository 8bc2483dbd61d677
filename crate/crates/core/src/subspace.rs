//! Exact subspaces of `Q^n`: kernels, orthogonal complements, the
//! stoichiometric and kinetic-order subspaces, and both deficiencies.

use serde::Serialize;

use crate::equilibria::laplacian;
use crate::error::{Error, Result};
use crate::graph::decompose;
use crate::matrix::{Rational, RationalMatrix};
use crate::network::GeneralizedNetwork;

/// A linear subspace stored as a matrix whose columns form a basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    basis: RationalMatrix,
}

impl SubspaceBasis {
    /// Wraps `basis` as is. Fails if its columns are linearly dependent.
    pub fn new(basis: RationalMatrix) -> Result<Self> {
        if basis.rank() != basis.cols() {
            return Err(Error::DependentColumns);
        }
        Ok(SubspaceBasis { basis })
    }

    pub fn from_columns(columns: &[Vec<Rational>], ambient_dim: usize) -> Result<Self> {
        Self::new(RationalMatrix::from_columns(columns, ambient_dim))
    }

    /// The span of arbitrary (possibly dependent) vectors, in canonical form.
    pub fn span(vectors: &[Vec<Rational>], ambient_dim: usize) -> Self {
        column_space(&RationalMatrix::from_columns(vectors, ambient_dim))
    }

    pub fn zero(ambient_dim: usize) -> Self {
        SubspaceBasis {
            basis: RationalMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        SubspaceBasis {
            basis: RationalMatrix::identity(ambient_dim),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn matrix(&self) -> &RationalMatrix {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<Vec<Rational>> {
        self.basis.columns()
    }

    /// Same subspace with the basis in reduced column echelon form.
    pub fn canonical(&self) -> Self {
        column_space(&self.basis)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        let extended = self
            .basis
            .hconcat(&RationalMatrix::from_columns(&[v.to_vec()], self.ambient_dim()));
        extended.rank() == self.dim()
    }

    /// Decided by `rank[B₁|B₂] = rank B₁ = rank B₂`.
    pub fn same_subspace(&self, other: &SubspaceBasis) -> bool {
        self.ambient_dim() == other.ambient_dim()
            && self.dim() == other.dim()
            && self.basis.hconcat(&other.basis).rank() == self.dim()
    }
}

/// Canonical basis of the column space of `m`: the nonzero rows of
/// `rref(mᵀ)`, taken as columns.
pub fn column_space(m: &RationalMatrix) -> SubspaceBasis {
    let n = m.rows();
    if m.cols() == 0 {
        return SubspaceBasis::zero(n);
    }
    let (r, pivots) = m.transpose().rref();
    let columns: Vec<Vec<Rational>> = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
    SubspaceBasis {
        basis: RationalMatrix::from_columns(&columns, n),
    }
}

/// Basis of `{x : M x = 0}` in canonical form.
pub fn kernel_basis(m: &RationalMatrix) -> SubspaceBasis {
    let n = m.cols();
    if m.rows() == 0 {
        return SubspaceBasis::full(n);
    }
    let (r, pivots) = m.rref();
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let vectors: Vec<Vec<Rational>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::from_integer(0.into()); n];
            v[f] = Rational::from_integer(1.into());
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r[(row, f)].clone();
            }
            v
        })
        .collect();
    column_space(&RationalMatrix::from_columns(&vectors, n))
}

/// Basis of `{x : Bᵀ x = 0}`.
pub fn orthogonal_complement(b: &SubspaceBasis) -> SubspaceBasis {
    if b.dim() == 0 {
        return SubspaceBasis::full(b.ambient_dim());
    }
    kernel_basis(&b.matrix().transpose())
}

/// `dim(U ∩ W) = dim U + dim W − dim(U + W)`.
pub fn intersection_dim(u: &SubspaceBasis, w: &SubspaceBasis) -> usize {
    u.dim() + w.dim() - u.matrix().hconcat(w.matrix()).rank()
}

/// `S = span{y' − y}`.
pub fn stoichiometric_subspace(net: &GeneralizedNetwork) -> SubspaceBasis {
    SubspaceBasis::span(&net.reaction_vectors(), net.species_count())
}

/// `S̃ = span{ỹ' − ỹ}`.
pub fn kinetic_order_subspace(net: &GeneralizedNetwork) -> SubspaceBasis {
    SubspaceBasis::span(&net.kinetic_reaction_vectors(), net.species_count())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DeficiencyMethod {
    Structural,
    Direct,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeficiencyReport {
    pub m: usize,
    pub l: usize,
    pub s: usize,
    pub s_tilde: usize,
    pub delta: usize,
    pub delta_tilde: usize,
    pub method: DeficiencyMethod,
}

/// `δ = m − l − s` and `δ̃ = m − l − s̃`; only valid when `t = l`.
pub fn structural_deficiencies(net: &GeneralizedNetwork) -> Result<DeficiencyReport> {
    let d = decompose(net);
    if d.t() != d.l() {
        return Err(Error::StructuralFormulaInapplicable {
            terminal: d.t(),
            linkage: d.l(),
        });
    }
    let m = net.complex_count();
    let s = stoichiometric_subspace(net).dim();
    let s_tilde = kinetic_order_subspace(net).dim();
    Ok(DeficiencyReport {
        m,
        l: d.l(),
        s,
        s_tilde,
        delta: m - d.l() - s,
        delta_tilde: m - d.l() - s_tilde,
        method: DeficiencyMethod::Structural,
    })
}

/// `δ = dim(ker Y ∩ im A)` and `δ̃ = dim(ker Ỹ ∩ im A)` for the given rates.
pub fn direct_deficiencies(net: &GeneralizedNetwork, rates: &[Rational]) -> Result<DeficiencyReport> {
    let a = laplacian(net, rates)?;
    let image = column_space(&a);
    let ker_y = kernel_basis(&net.complex_matrix());
    let ker_yt = kernel_basis(&net.kinetic_matrix());
    Ok(DeficiencyReport {
        m: net.complex_count(),
        l: decompose(net).l(),
        s: stoichiometric_subspace(net).dim(),
        s_tilde: kinetic_order_subspace(net).dim(),
        delta: intersection_dim(&ker_y, &image),
        delta_tilde: intersection_dim(&ker_yt, &image),
        method: DeficiencyMethod::Direct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::int;
    use crate::parse::parse_network;

    fn cols(v: &[&[i64]]) -> Vec<Vec<Rational>> {
        v.iter().map(|c| c.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn kernel_of_single_equation() {
        let k = kernel_basis(&RationalMatrix::from_i64(&[&[1, 1]]));
        assert_eq!(k.vectors(), cols(&[&[1, -1]]));
    }

    #[test]
    fn kernel_of_identity_is_trivial() {
        assert_eq!(kernel_basis(&RationalMatrix::identity(3)).dim(), 0);
    }

    #[test]
    fn kernel_postcondition_holds_exactly() {
        let m = RationalMatrix::from_i64(&[&[1, 2, 0, -1], &[0, 1, 1, 1], &[1, 3, 1, 0]]);
        let k = kernel_basis(&m);
        assert_eq!(k.dim(), 2);
        assert!(m.mul(k.matrix()).is_zero());
    }

    #[test]
    fn complement_matches_worked_bases() {
        let s = SubspaceBasis::from_columns(&cols(&[&[-1, -1, 1]]), 3).unwrap();
        let v = orthogonal_complement(&s);
        assert_eq!(v.vectors(), cols(&[&[1, 0, 1], &[0, 1, 1]]));

        let st = SubspaceBasis::from_columns(&cols(&[&[-1, 1, 1]]), 3).unwrap();
        let vt = orthogonal_complement(&st);
        let expected = SubspaceBasis::from_columns(&cols(&[&[1, 0, 1], &[1, 1, 0]]), 3).unwrap();
        assert!(vt.same_subspace(&expected));
    }

    #[test]
    fn complement_of_full_and_zero() {
        assert_eq!(orthogonal_complement(&SubspaceBasis::full(3)).dim(), 0);
        assert_eq!(orthogonal_complement(&SubspaceBasis::zero(3)).dim(), 3);
    }

    #[test]
    fn dependent_columns_rejected() {
        assert_eq!(
            SubspaceBasis::from_columns(&cols(&[&[1, 2], &[2, 4]]), 2),
            Err(Error::DependentColumns)
        );
    }

    #[test]
    fn reversible_pair_collapses_to_one_direction() {
        let net = parse_network("A + B <=> C").unwrap();
        let s = stoichiometric_subspace(&net);
        assert_eq!(s.dim(), 1);
        let expected = SubspaceBasis::from_columns(&cols(&[&[-1, -1, 1]]), 3).unwrap();
        assert!(s.same_subspace(&expected));
    }

    #[test]
    fn structural_deficiency_requires_t_equals_l() {
        let net = parse_network("A -> B\nA -> C").unwrap();
        assert!(matches!(
            structural_deficiencies(&net),
            Err(Error::StructuralFormulaInapplicable { terminal: 2, linkage: 1 })
        ));
    }

    #[test]
    fn direct_deficiency_when_t_differs_from_l() {
        // One linkage class with two terminal classes: m = 3, s = 2.
        let net = parse_network("A -> B\nA -> C").unwrap();
        let r = direct_deficiencies(&net, &[int(1), int(1)]).unwrap();
        assert_eq!(r.delta, 0);
        assert_eq!(r.method, DeficiencyMethod::Direct);
    }
}

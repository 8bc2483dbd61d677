//! Chirotopes of vector configurations and the sign-set equality test built
//! on them.

use std::collections::HashMap;

use crate::error::Result;
use crate::matrix::{signum, RationalMatrix};
use crate::signs::{enumerate_sign_vectors, Sign};
use crate::subspace::SubspaceBasis;

/// Signs of all `d x d` minors of the row configuration `w¹,…,wⁿ` of a basis.
///
/// Indices are 0-based. Only increasing tuples are stored; other orderings are
/// obtained by alternation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chirotope {
    n: usize,
    d: usize,
    signs: HashMap<Vec<usize>, Sign>,
}

impl Chirotope {
    pub fn rank(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `sign det(w^{i₁}, …, w^{i_d})` for an arbitrary ordered tuple.
    pub fn sign(&self, tuple: &[usize]) -> Sign {
        assert_eq!(tuple.len(), self.d, "tuple length must equal the rank");
        let mut sorted = tuple.to_vec();
        // Parity of the sorting permutation.
        let mut odd = false;
        for i in 0..sorted.len() {
            for j in 0..sorted.len() - 1 - i {
                if sorted[j] > sorted[j + 1] {
                    sorted.swap(j, j + 1);
                    odd = !odd;
                }
            }
        }
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Sign::Zero;
        }
        let s = self.signs.get(&sorted).copied().unwrap_or(Sign::Zero);
        if odd {
            -s
        } else {
            s
        }
    }

    /// Increasing tuples with their signs, in lexicographic order.
    pub fn entries(&self) -> Vec<(Vec<usize>, Sign)> {
        let mut out: Vec<(Vec<usize>, Sign)> =
            self.signs.iter().map(|(k, v)| (k.clone(), *v)).collect();
        out.sort();
        out
    }

    /// Equal as oriented matroids: same size and rank, and the same signs up
    /// to one global flip.
    pub fn equivalent(&self, other: &Chirotope) -> bool {
        if self.n != other.n || self.d != other.d {
            return false;
        }
        let same = self.signs.iter().all(|(t, s)| other.signs.get(t) == Some(s));
        let flipped = self
            .signs
            .iter()
            .all(|(t, s)| other.signs.get(t) == Some(&-*s));
        same || flipped
    }
}

/// All increasing `k`-subsets of `0..n`, lexicographically.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        let Some(i) = (0..k).rev().find(|&i| current[i] < n - k + i) else {
            return out;
        };
        current[i] += 1;
        for j in i + 1..k {
            current[j] = current[j - 1] + 1;
        }
    }
}

pub fn chirotope_of(b: &SubspaceBasis) -> Chirotope {
    let m = b.matrix();
    let (n, d) = (m.rows(), m.cols());
    let signs = combinations(n, d)
        .into_iter()
        .map(|tuple| {
            let minor: RationalMatrix = m.select_rows(&tuple);
            let s = Sign::from_i8(signum(&minor.determinant()));
            (tuple, s)
        })
        .collect();
    Chirotope { n, d, signs }
}

/// `σ(im B₁) = σ(im B₂)`, decided by comparing chirotopes.
pub fn sign_sets_equal(b1: &SubspaceBasis, b2: &SubspaceBasis) -> bool {
    if b1.ambient_dim() != b2.ambient_dim() || b1.dim() != b2.dim() {
        return false;
    }
    let equal = chirotope_of(b1).equivalent(&chirotope_of(b2));
    #[cfg(debug_assertions)]
    if b1.ambient_dim() <= 8 {
        debug_assert_eq!(
            Some(equal),
            sign_sets_equal_by_enumeration(b1, b2, 8).ok(),
            "chirotope and enumeration disagree"
        );
    }
    equal
}

/// The same question answered by enumerating both sign sets.
pub fn sign_sets_equal_by_enumeration(
    b1: &SubspaceBasis,
    b2: &SubspaceBasis,
    limit: usize,
) -> Result<bool> {
    if b1.ambient_dim() != b2.ambient_dim() {
        return Ok(false);
    }
    Ok(enumerate_sign_vectors(b1, limit)? == enumerate_sign_vectors(b2, limit)?)
}

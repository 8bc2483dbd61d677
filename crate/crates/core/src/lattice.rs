//! Face lattices of polyhedral cones, read off the nonnegative sign vectors
//! of a subspace, and the search for order isomorphisms between two of them
//! that respect componentwise dominance.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::matrix::RationalMatrix;
use crate::signs::{enumerate_nonnegative, SignVector};
use crate::subspace::SubspaceBasis;

/// `σ(im V)_≥` ordered by `0 < +`.
///
/// Element `τ` is the face of the cone generated by the rows `wᵏ` of `V` on
/// which the generators with `τ_k = 0` lie; its grade is the rank of those
/// generators (the face dimension).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceLattice {
    elements: Vec<SignVector>,
    grades: Vec<usize>,
}

impl FaceLattice {
    pub fn elements(&self) -> &[SignVector] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn grade(&self, i: usize) -> usize {
        self.grades[i]
    }

    pub fn contains(&self, v: &SignVector) -> bool {
        self.elements.contains(v)
    }

    /// `elements[i] ≤ elements[j]`.
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.elements[j].dominates(&self.elements[i])
    }

    /// Index of the zero vector (the whole cone).
    pub fn bottom(&self) -> Option<usize> {
        self.elements.iter().position(SignVector::is_zero)
    }

    /// Index of the element dominating all others (the minimal face).
    pub fn top(&self) -> Option<usize> {
        (0..self.len()).find(|&i| (0..self.len()).all(|j| self.leq(j, i)))
    }

    /// Grade relative to the smallest grade present; invariant under lattice
    /// isomorphism.
    fn level(&self, i: usize) -> usize {
        self.grades[i] - self.grades.iter().min().copied().unwrap_or(0)
    }
}

pub fn face_lattice(b: &SubspaceBasis, limit: usize) -> Result<FaceLattice> {
    let set = enumerate_nonnegative(b, limit)?;
    let m = b.matrix();
    let elements: Vec<SignVector> = set.iter().cloned().collect();
    let grades = elements
        .iter()
        .map(|tau| {
            let zeros = tau.zero_set();
            if zeros.is_empty() {
                0
            } else {
                RationalMatrix::from_rows(zeros.iter().map(|&k| m.row(k).to_vec()).collect(), m.cols()).rank()
            }
        })
        .collect();
    Ok(FaceLattice { elements, grades })
}

/// Searches for a lattice isomorphism `Φ: F̃ → F` with `τ̃ ≥ Φ(τ̃)` for every
/// element. Exhaustive backtracking, pruned by grade and dominance.
pub fn find_dominant_lattice_iso(
    source: &FaceLattice,
    target: &FaceLattice,
) -> Option<BTreeMap<SignVector, SignVector>> {
    if source.len() != target.len() {
        return None;
    }
    let mut order: Vec<usize> = (0..source.len()).collect();
    order.sort_by_key(|&i| (source.level(i), source.elements[i].clone()));

    let candidates: Vec<Vec<usize>> = (0..source.len())
        .map(|i| {
            (0..target.len())
                .filter(|&j| {
                    target.level(j) == source.level(i)
                        && source.elements[i].dominates(&target.elements[j])
                })
                .collect()
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return None;
    }

    let mut assignment: Vec<Option<usize>> = vec![None; source.len()];
    let mut used = vec![false; target.len()];
    if backtrack(source, target, &order, 0, &candidates, &mut assignment, &mut used) {
        Some(
            assignment
                .iter()
                .enumerate()
                .map(|(i, j)| {
                    (
                        source.elements[i].clone(),
                        target.elements[j.expect("complete assignment")].clone(),
                    )
                })
                .collect(),
        )
    } else {
        None
    }
}

fn backtrack(
    source: &FaceLattice,
    target: &FaceLattice,
    order: &[usize],
    depth: usize,
    candidates: &[Vec<usize>],
    assignment: &mut [Option<usize>],
    used: &mut [bool],
) -> bool {
    let Some(&i) = order.get(depth) else {
        return true;
    };
    for &j in &candidates[i] {
        if used[j] {
            continue;
        }
        let consistent = order[..depth].iter().all(|&a| {
            let fa = assignment[a].expect("assigned earlier");
            source.leq(a, i) == target.leq(fa, j) && source.leq(i, a) == target.leq(j, fa)
        });
        if !consistent {
            continue;
        }
        assignment[i] = Some(j);
        used[j] = true;
        if backtrack(source, target, order, depth + 1, candidates, assignment, used) {
            return true;
        }
        assignment[i] = None;
        used[j] = false;
    }
    false
}

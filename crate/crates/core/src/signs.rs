//! Sign vectors of subspaces.
//!
//! `σ(im B)` is enumerated exactly: a sign pattern `τ` is realizable iff the
//! system `⟨λ, wᵏ⟩ ≥ 1` (τ_k = +), `≤ −1` (τ_k = −), `= 0` (τ_k = 0) over the
//! rows `wᵏ` of `B` is feasible, which the rational simplex decides without
//! tolerances. The search assigns coordinates one at a time and discards a
//! prefix as soon as it becomes infeasible.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, Relation};
use crate::matrix::{primitive_ray, signum, Rational, RationalMatrix};
use crate::subspace::SubspaceBasis;

/// Default largest ambient dimension for which sign vectors are enumerated.
pub const DEFAULT_ENUM_LIMIT: usize = 14;

/// Environment variable overriding [`DEFAULT_ENUM_LIMIT`].
pub const ENUM_LIMIT_ENV: &str = "GMAK_ENUM_LIMIT";

/// Reads the enumeration limit from `GMAK_ENUM_LIMIT`, falling back to the default.
pub fn enum_limit_from_env() -> usize {
    std::env::var(ENUM_LIMIT_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ENUM_LIMIT)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Zero,
    Plus,
}

impl Sign {
    pub fn from_i8(s: i8) -> Sign {
        match s.signum() {
            -1 => Sign::Minus,
            0 => Sign::Zero,
            _ => Sign::Plus,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Minus => -1,
            Sign::Zero => 0,
            Sign::Plus => 1,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Zero => '0',
            Sign::Plus => '+',
        }
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        Sign::from_i8(-self.as_i8())
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;

    fn mul(self, other: Sign) -> Sign {
        Sign::from_i8(self.as_i8() * other.as_i8())
    }
}

/// An element of `{−, 0, +}ⁿ`. Displays as e.g. `--+`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector(Vec<Sign>);

impl SignVector {
    pub fn new(entries: Vec<Sign>) -> Self {
        SignVector(entries)
    }

    pub fn zero(n: usize) -> Self {
        SignVector(vec![Sign::Zero; n])
    }

    pub fn all_plus(n: usize) -> Self {
        SignVector(vec![Sign::Plus; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Sign] {
        &self.0
    }

    pub fn get(&self, k: usize) -> Sign {
        self.0[k]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&s| s == Sign::Zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&s| s != Sign::Minus)
    }

    pub fn negated(&self) -> Self {
        SignVector(self.0.iter().map(|&s| -s).collect())
    }

    pub fn zero_set(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.0[k] == Sign::Zero).collect()
    }

    /// Componentwise `self ≥ other` for the order `0 < +` on nonnegative vectors:
    /// every `+` of `other` is a `+` of `self`.
    pub fn dominates(&self, other: &SignVector) -> bool {
        self.0
            .iter()
            .zip(&other.0)
            .all(|(a, b)| *b != Sign::Plus || *a == Sign::Plus)
    }

    /// Bitmasks of the positive and negative coordinates (first 64 only).
    fn masks(&self) -> (u64, u64) {
        let mut plus = 0u64;
        let mut minus = 0u64;
        for (k, s) in self.0.iter().enumerate().take(64) {
            match s {
                Sign::Plus => plus |= 1 << k,
                Sign::Minus => minus |= 1 << k,
                Sign::Zero => {}
            }
        }
        (plus, minus)
    }

    /// All `3ⁿ` sign vectors of length `n`, in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = SignVector> {
        let total = 3usize.pow(n as u32);
        (0..total).map(move |mut code| {
            let mut entries = vec![Sign::Zero; n];
            for k in (0..n).rev() {
                entries[k] = [Sign::Minus, Sign::Zero, Sign::Plus][code % 3];
                code /= 3;
            }
            SignVector(entries)
        })
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.iter().try_for_each(|s| write!(f, "{}", s.symbol()))
    }
}

impl FromStr for SignVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '-' => Ok(Sign::Minus),
                '0' => Ok(Sign::Zero),
                '+' => Ok(Sign::Plus),
                other => Err(Error::InvalidArgument(format!("invalid sign {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(SignVector)
    }
}

impl Serialize for SignVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Componentwise sign of an exact vector.
pub fn sign_of(x: &[Rational]) -> SignVector {
    SignVector(x.iter().map(|v| Sign::from_i8(signum(v))).collect())
}

/// `ς ⊥ τ`: all products vanish, or both a `−` and a `+` product occur.
pub fn orthogonal_pair(a: &SignVector, b: &SignVector) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let mut plus = false;
    let mut minus = false;
    for (x, y) in a.0.iter().zip(&b.0) {
        match *x * *y {
            Sign::Plus => plus = true,
            Sign::Minus => minus = true,
            Sign::Zero => {}
        }
    }
    Ok(plus == minus)
}

/// A finite set of sign vectors of common length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignVectorSet {
    ambient_dim: usize,
    vectors: BTreeSet<SignVector>,
}

impl SignVectorSet {
    pub fn new(ambient_dim: usize, vectors: impl IntoIterator<Item = SignVector>) -> Self {
        let vectors: BTreeSet<SignVector> = vectors.into_iter().collect();
        debug_assert!(vectors.iter().all(|v| v.len() == ambient_dim));
        SignVectorSet {
            ambient_dim,
            vectors,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, v: &SignVector) -> bool {
        self.vectors.contains(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = &SignVector> {
        self.vectors.iter()
    }

    pub fn intersection(&self, other: &SignVectorSet) -> SignVectorSet {
        SignVectorSet::new(
            self.ambient_dim,
            self.vectors.intersection(&other.vectors).cloned(),
        )
    }

    /// Elements in `{0, +}ⁿ`.
    pub fn nonnegative(&self) -> SignVectorSet {
        SignVectorSet::new(
            self.ambient_dim,
            self.vectors.iter().filter(|v| v.is_nonnegative()).cloned(),
        )
    }

    /// `Σ^⊥ = {ς : ς ⊥ τ for all τ ∈ Σ}`, by brute force over `{−,0,+}ⁿ`.
    pub fn orthogonal_set(&self) -> SignVectorSet {
        let n = self.ambient_dim;
        if n > 64 {
            return SignVectorSet::new(
                n,
                SignVector::all(n).filter(|s| {
                    self.vectors
                        .iter()
                        .all(|t| orthogonal_pair(s, t).expect("equal lengths"))
                }),
            );
        }
        let masks: Vec<(u64, u64)> = self.vectors.iter().map(SignVector::masks).collect();
        SignVectorSet::new(
            n,
            SignVector::all(n).filter(|s| {
                let (sp, sm) = s.masks();
                masks.iter().all(|&(tp, tm)| {
                    let pos = (sp & tp) | (sm & tm);
                    let neg = (sp & tm) | (sm & tp);
                    (pos == 0) == (neg == 0)
                })
            }),
        )
    }

    pub fn is_closed_under_negation(&self) -> bool {
        self.vectors.iter().all(|v| self.vectors.contains(&v.negated()))
    }
}

fn check_limit(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::EnumerationLimit { n, limit });
    }
    Ok(())
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Row configuration `w¹,…,wⁿ` of a basis matrix together with the
/// incremental feasibility search over partial sign patterns.
struct Configuration {
    rows: Vec<Vec<Rational>>,
    d: usize,
}

impl Configuration {
    fn new(b: &SubspaceBasis) -> Self {
        let m = b.matrix();
        Configuration {
            rows: (0..m.rows()).map(|k| m.row(k).to_vec()).collect(),
            d: m.cols(),
        }
    }

    fn program(&self, pattern: &[(usize, Sign)]) -> LinearProgram {
        let mut lp = LinearProgram::new(self.d);
        for &(k, s) in pattern {
            let (rel, rhs) = match s {
                Sign::Plus => (Relation::Ge, Rational::one()),
                Sign::Minus => (Relation::Le, -Rational::one()),
                Sign::Zero => (Relation::Eq, Rational::zero()),
            };
            lp.constrain(self.rows[k].clone(), rel, rhs);
        }
        lp
    }

    fn feasible_point(&self, pattern: &[(usize, Sign)]) -> Option<Vec<Rational>> {
        self.program(pattern).solve().point()
    }

    /// Whether row `k` lies in the span of the rows in `zeros`; such a
    /// coordinate vanishes on every λ orthogonal to those rows.
    fn forced_zero(&self, zeros: &[usize], k: usize) -> bool {
        if self.rows[k].iter().all(Zero::is_zero) {
            return true;
        }
        if zeros.is_empty() {
            return false;
        }
        let base = RationalMatrix::from_rows(zeros.iter().map(|&z| self.rows[z].clone()).collect(), self.d);
        let mut ext: Vec<Vec<Rational>> = zeros.iter().map(|&z| self.rows[z].clone()).collect();
        ext.push(self.rows[k].clone());
        RationalMatrix::from_rows(ext, self.d).rank() == base.rank()
    }

    /// Depth-first enumeration of realizable patterns over `choices`.
    fn enumerate(&self, choices: &[Sign]) -> Vec<SignVector> {
        let n = self.rows.len();
        let mut out = Vec::new();
        let mut pattern = Vec::with_capacity(n);
        let witness = vec![Rational::zero(); self.d];
        self.descend(choices, &mut pattern, witness, &mut out);
        debug_assert!(out.iter().all(|v| v.len() == n));
        out
    }

    fn descend(
        &self,
        choices: &[Sign],
        pattern: &mut Vec<(usize, Sign)>,
        witness: Vec<Rational>,
        out: &mut Vec<SignVector>,
    ) {
        let k = pattern.len();
        if k == self.rows.len() {
            out.push(SignVector(pattern.iter().map(|&(_, s)| s).collect()));
            return;
        }
        let zeros: Vec<usize> = pattern
            .iter()
            .filter(|(_, s)| *s == Sign::Zero)
            .map(|&(i, _)| i)
            .collect();
        if self.forced_zero(&zeros, k) {
            if choices.contains(&Sign::Zero) {
                pattern.push((k, Sign::Zero));
                self.descend(choices, pattern, witness, out);
                pattern.pop();
            }
            return;
        }
        // The current witness already realizes one extension.
        let value = dot(&witness, &self.rows[k]);
        let free_sign = Sign::from_i8(signum(&value));
        for &s in choices {
            pattern.push((k, s));
            let next = if s == free_sign {
                let scale = if value.is_zero() || value.abs() >= Rational::one() {
                    Rational::one()
                } else {
                    value.abs().recip()
                };
                Some(witness.iter().map(|x| x * &scale).collect())
            } else {
                self.feasible_point(pattern)
            };
            if let Some(next) = next {
                self.descend(choices, pattern, next, out);
            }
            pattern.pop();
        }
    }
}

/// `σ(im B)`: every realizable sign vector of the column space of `B`.
pub fn enumerate_sign_vectors(b: &SubspaceBasis, limit: usize) -> Result<SignVectorSet> {
    check_limit(b.ambient_dim(), limit)?;
    let config = Configuration::new(b);
    let vectors = config.enumerate(&[Sign::Minus, Sign::Zero, Sign::Plus]);
    Ok(SignVectorSet::new(b.ambient_dim(), vectors))
}

/// Whether `τ ∈ σ(im B)`.
pub fn is_realizable(b: &SubspaceBasis, tau: &SignVector) -> bool {
    realize(b, tau).is_some()
}

/// A vector `x ∈ im B` with `σ(x) = τ`, minimizing `‖x‖₁` subject to
/// `|x_k| ≥ 1` on the support of `τ`.
pub fn realize(b: &SubspaceBasis, tau: &SignVector) -> Option<Vec<Rational>> {
    assert_eq!(tau.len(), b.ambient_dim(), "sign vector length");
    let config = Configuration::new(b);
    let pattern: Vec<(usize, Sign)> = tau.entries().iter().copied().enumerate().collect();
    let mut lp = config.program(&pattern);
    let mut objective = vec![Rational::zero(); config.d];
    for (k, s) in tau.entries().iter().enumerate() {
        let w = Rational::from_integer(s.as_i8().into());
        if w.is_zero() {
            continue;
        }
        for (o, x) in objective.iter_mut().zip(&config.rows[k]) {
            *o += x * &w;
        }
    }
    lp.minimize(objective);
    let lambda = lp.solve().point()?;
    Some(b.matrix().mul_vec(&lambda))
}

/// A strictly positive vector of `im B` (scaled to a primitive integer vector),
/// if one exists. It minimizes the coordinate sum subject to every
/// coordinate being at least 1.
pub fn positive_vector(b: &SubspaceBasis) -> Option<Vec<Rational>> {
    let n = b.ambient_dim();
    if b.dim() == 0 {
        return if n == 0 { Some(Vec::new()) } else { None };
    }
    let x = realize(b, &SignVector::all_plus(n))?;
    Some(primitive_ray(&x))
}

/// Whether `(+,…,+) ∈ σ(im B)`. Applied to a basis of `S⊥` this says the
/// network is conservative.
pub fn is_conservative(b_sperp: &SubspaceBasis) -> bool {
    positive_vector(b_sperp).is_some()
}

/// `σ(im B) ∩ {0,+}ⁿ` as a plain set.
pub fn enumerate_nonnegative(b: &SubspaceBasis, limit: usize) -> Result<SignVectorSet> {
    check_limit(b.ambient_dim(), limit)?;
    let config = Configuration::new(b);
    let vectors = config.enumerate(&[Sign::Zero, Sign::Plus]);
    Ok(SignVectorSet::new(b.ambient_dim(), vectors))
}

/// Checks `σ(B⊥) = σ(B)⊥` by enumerating both sides.
///
/// Returns `Ok(true)` when they agree; a disagreement signals a bug and is
/// reported with the offending sign vector.
pub fn duality_check(b: &SubspaceBasis, limit: usize) -> Result<bool> {
    let direct = enumerate_sign_vectors(&crate::subspace::orthogonal_complement(b), limit)?;
    let dual = enumerate_sign_vectors(b, limit)?.orthogonal_set();
    if let Some(bad) = direct
        .iter()
        .find(|v| !dual.contains(v))
        .or_else(|| dual.iter().find(|v| !direct.contains(v)))
    {
        return Err(Error::InvalidArgument(format!(
            "sign duality violated at {bad}"
        )));
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::int;

    fn basis(cols: &[&[i64]], n: usize) -> SubspaceBasis {
        let cols: Vec<Vec<Rational>> = cols
            .iter()
            .map(|c| c.iter().map(|&x| int(x)).collect())
            .collect();
        SubspaceBasis::from_columns(&cols, n).unwrap()
    }

    fn set(items: &[&str]) -> BTreeSet<SignVector> {
        items.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn sign_of_examples() {
        assert_eq!(sign_of(&[int(-1), int(-1), int(1)]).to_string(), "--+");
        assert!(sign_of(&[int(0), int(0)]).is_zero());
        assert_eq!(
            sign_of(&[crate::matrix::rat(1, 3), int(0), int(-2)]).to_string(),
            "+0-"
        );
    }

    #[test]
    fn orthogonality_examples() {
        let p = |s: &str| s.parse::<SignVector>().unwrap();
        assert!(orthogonal_pair(&p("+0-"), &p("0+0")).unwrap());
        assert!(orthogonal_pair(&p("++"), &p("+-")).unwrap());
        assert!(!orthogonal_pair(&p("+0"), &p("+0")).unwrap());
        assert!(orthogonal_pair(&p("+0"), &p("+00")).is_err());
    }

    #[test]
    fn one_dimensional_subspaces() {
        let s = enumerate_sign_vectors(&basis(&[&[-1, -1, 1]], 3), 14).unwrap();
        assert_eq!(s.vectors, set(&["000", "--+", "++-"]));
        let e1 = enumerate_sign_vectors(&basis(&[&[1, 0]], 2), 14).unwrap();
        assert_eq!(e1.vectors, set(&["00", "+0", "-0"]));
    }

    #[test]
    fn whole_space_and_zero_space() {
        let all = enumerate_sign_vectors(&SubspaceBasis::full(3), 14).unwrap();
        assert_eq!(all.len(), 27);
        let zero = enumerate_sign_vectors(&SubspaceBasis::zero(3), 14).unwrap();
        assert_eq!(zero.vectors, set(&["000"]));
        assert!(duality_check(&SubspaceBasis::zero(3), 14).unwrap());
    }

    #[test]
    fn limit_enforced() {
        let err = enumerate_sign_vectors(&SubspaceBasis::full(5), 4).unwrap_err();
        assert_eq!(err, Error::EnumerationLimit { n: 5, limit: 4 });
    }

    #[test]
    fn realize_minimizes_l1() {
        let b = basis(&[&[1, 0, 1], &[1, 1, 0]], 3);
        let x = realize(&b, &"--+".parse().unwrap()).unwrap();
        assert_eq!(x, vec![int(-1), int(-2), int(1)]);
        assert!(realize(&b, &"+-+".parse().unwrap()).is_some());
        assert!(realize(&b, &"0+0".parse().unwrap()).is_none());
    }

    #[test]
    fn conservation_witness() {
        let v = basis(&[&[1, 0, 1], &[0, 1, 1]], 3);
        assert_eq!(positive_vector(&v), Some(vec![int(1), int(1), int(2)]));
        assert!(!is_conservative(&SubspaceBasis::zero(1)));
    }
}

//! The map `F(λ) = Σ c*_k e^{⟨λ,w̃ᵏ⟩} wᵏ` and a damped Newton solver for
//! `F(λ) = γ`, used to locate complex balancing equilibria in a given
//! stoichiometric compatibility class.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::equilibria::BALANCE_TOL;
use crate::error::{Error, Result};
use crate::kinetics::PowerLawSystem;
use crate::network::GeneralizedNetwork;
use crate::subspace::{
    kinetic_order_subspace, orthogonal_complement, stoichiometric_subspace, SubspaceBasis,
};

/// Exponents above this are treated as overflow.
pub const EXPONENT_CAP: f64 = 700.0;

/// Half-width of the box random Newton starts are drawn from.
pub const START_BOX: f64 = 5.0;

#[derive(Clone, Debug)]
pub struct BirchMap {
    cstar: Vec<f64>,
    /// Rows `wᵏ`, `n × d`.
    v: DMatrix<f64>,
    /// Rows `w̃ᵏ`, `n × d̃`.
    vt: DMatrix<f64>,
}

fn full_column_rank(m: &DMatrix<f64>) -> bool {
    if m.ncols() == 0 {
        return true;
    }
    if m.nrows() < m.ncols() {
        return false;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let tol = 1e-12 * sv.max() * m.nrows() as f64;
    sv.iter().all(|&s| s > tol)
}

impl BirchMap {
    pub fn new(cstar: Vec<f64>, v: DMatrix<f64>, vt: DMatrix<f64>) -> Result<Self> {
        let n = cstar.len();
        for m in [&v, &vt] {
            if m.nrows() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.nrows(),
                });
            }
            if !full_column_rank(m) {
                return Err(Error::DependentColumns);
            }
        }
        if let Some(index) = cstar.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::ZeroConcentration { index });
        }
        Ok(BirchMap { cstar, v, vt })
    }

    /// Uses the columns of exact bases of `S⊥` and `S̃⊥`.
    pub fn from_subspaces(cstar: Vec<f64>, v: &SubspaceBasis, vt: &SubspaceBasis) -> Result<Self> {
        Self::new(cstar, v.matrix().to_f64(), vt.matrix().to_f64())
    }

    pub fn d(&self) -> usize {
        self.v.ncols()
    }

    pub fn d_tilde(&self) -> usize {
        self.vt.ncols()
    }

    pub fn cstar(&self) -> &[f64] {
        &self.cstar
    }

    fn check_lambda(&self, lambda: &[f64]) -> Result<()> {
        if lambda.len() != self.d_tilde() {
            return Err(Error::DimensionMismatch {
                expected: self.d_tilde(),
                found: lambda.len(),
            });
        }
        if lambda.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite λ".into()));
        }
        Ok(())
    }

    /// `c* ∘ exp(Ṽλ)`, the concentration vector belonging to `λ`.
    pub fn point(&self, lambda: &[f64]) -> Result<Vec<f64>> {
        self.check_lambda(lambda)?;
        let exponents = &self.vt * DVector::from_column_slice(lambda);
        exponents
            .iter()
            .zip(&self.cstar)
            .map(|(&e, &c)| {
                if e > EXPONENT_CAP {
                    Err(Error::ExponentOverflow { value: e })
                } else {
                    Ok(c * e.exp())
                }
            })
            .collect()
    }

    pub fn evaluate(&self, lambda: &[f64]) -> Result<DVector<f64>> {
        let c = self.point(lambda)?;
        Ok(self.v.tr_mul(&DVector::from_vec(c)))
    }

    /// Entry `(i, j)` is `Σ_k c*_k e^{⟨λ,w̃ᵏ⟩} w̃ᵏ_j wᵏ_i`.
    pub fn jacobian(&self, lambda: &[f64]) -> Result<DMatrix<f64>> {
        let c = self.point(lambda)?;
        let mut scaled = self.vt.clone();
        for (k, ck) in c.iter().enumerate() {
            scaled.row_mut(k).scale_mut(*ck);
        }
        Ok(self.v.tr_mul(&scaled))
    }

    /// `γ = Vᵀ c′`.
    pub fn target_of(&self, cprime: &[f64]) -> Result<DVector<f64>> {
        if cprime.len() != self.cstar.len() {
            return Err(Error::DimensionMismatch {
                expected: self.cstar.len(),
                found: cprime.len(),
            });
        }
        Ok(self.v.tr_mul(&DVector::from_column_slice(cprime)))
    }

    /// Damped Newton for `F(λ) = γ` (Gauss–Newton when `d ≠ d̃`).
    pub fn solve(
        &self,
        gamma: &DVector<f64>,
        start: &[f64],
        options: &NewtonOptions,
    ) -> std::result::Result<NewtonSolution, NewtonFailure> {
        if gamma.len() != self.d() {
            return Err(NewtonFailure::Invalid(format!(
                "target has length {}, expected {}",
                gamma.len(),
                self.d()
            )));
        }
        let threshold = options.tol * gamma.amax();
        let mut lambda = DVector::from_column_slice(start);
        let mut residual = match self.evaluate(lambda.as_slice()) {
            Ok(f) => f - gamma,
            Err(e) => return Err(NewtonFailure::Invalid(e.to_string())),
        };
        for iteration in 0..=options.max_iter {
            if residual.amax() <= threshold {
                return Ok(NewtonSolution {
                    lambda: lambda.as_slice().to_vec(),
                    iterations: iteration,
                    residual: residual.amax(),
                });
            }
            if iteration == options.max_iter {
                break;
            }
            if self.d_tilde() == 0 {
                return Err(NewtonFailure::Stalled {
                    iteration,
                    residual: residual.amax(),
                });
            }
            let jac = self
                .jacobian(lambda.as_slice())
                .map_err(|e| NewtonFailure::Invalid(e.to_string()))?;
            let svd = jac.svd(true, true);
            let eps = 1e-14 * svd.singular_values.max();
            let step = svd
                .solve(&(-&residual), eps)
                .map_err(|e| NewtonFailure::Invalid(e.to_string()))?;
            let norm = residual.norm();
            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..=options.max_halvings {
                let trial = &lambda + &step * t;
                if let Ok(f) = self.evaluate(trial.as_slice()) {
                    let r = f - gamma;
                    if r.norm() < norm {
                        accepted = Some((trial, r));
                        break;
                    }
                }
                t *= 0.5;
            }
            match accepted {
                Some((l, r)) => {
                    lambda = l;
                    residual = r;
                }
                None => {
                    return Err(NewtonFailure::Stalled {
                        iteration,
                        residual: residual.amax(),
                    })
                }
            }
        }
        Err(NewtonFailure::MaxIterations {
            residual: residual.amax(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct NewtonOptions {
    pub max_iter: usize,
    pub max_halvings: usize,
    /// Convergence when `‖F(λ) − γ‖∞ ≤ tol · ‖γ‖∞`.
    pub tol: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            max_iter: 100,
            max_halvings: 40,
            tol: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonSolution {
    pub lambda: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NewtonFailure {
    /// No step length decreased the residual.
    Stalled { iteration: usize, residual: f64 },
    MaxIterations { residual: f64 },
    Invalid(String),
}

impl fmt::Display for NewtonFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NewtonFailure::Stalled { iteration, residual } => {
                write!(f, "line search failed at iteration {iteration} (residual {residual:e})")
            }
            NewtonFailure::MaxIterations { residual } => {
                write!(f, "no convergence within the iteration limit (residual {residual:e})")
            }
            NewtonFailure::Invalid(msg) => f.write_str(msg),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StartFailure {
    pub start: usize,
    pub reason: String,
}

/// Equilibria found in one compatibility class.
#[derive(Clone, Debug, Serialize)]
pub struct ClassSolutions {
    pub gamma: Vec<f64>,
    pub equilibria: Vec<Vec<f64>>,
    /// `‖A Ψ̃(c)‖∞` relative to the largest outflow, per equilibrium.
    pub balance_residuals: Vec<f64>,
    /// `‖Vᵀ(c − c′)‖∞` relative to `max(1, ‖γ‖∞)`, per equilibrium.
    pub class_residuals: Vec<f64>,
    pub starts: usize,
    pub failures: Vec<StartFailure>,
}

pub const DEDUP_TOL: f64 = 1e-6;
pub const CLASS_TOL: f64 = 1e-8;

fn sup_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |a, b| a.max(b.abs()))
}

/// Multi-start Newton on `F(λ) = Vᵀc′`. The first start is `λ = 0`, the
/// others are uniform in `[−5, 5]^{d̃}` from a ChaCha generator seeded with
/// `seed`. Solutions are deduplicated and sorted by their first coordinate.
pub fn solve_in_class(
    net: &GeneralizedNetwork,
    rates: &[f64],
    cstar: &[f64],
    cprime: &[f64],
    starts: usize,
    seed: u64,
) -> Result<ClassSolutions> {
    let sys = PowerLawSystem::new(net, rates)?;
    let n = net.species_count();
    for x in [cstar, cprime] {
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: x.len(),
            });
        }
    }
    if let Some(index) = cprime.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::ZeroConcentration { index });
    }
    if cstar.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidEquilibrium("c* must be strictly positive".into()));
    }
    let residual = sys.relative_balance_residual(cstar)?;
    if residual > BALANCE_TOL {
        return Err(Error::InvalidEquilibrium(format!(
            "c* is not complex balancing (relative residual {residual:e})"
        )));
    }

    let v = orthogonal_complement(&stoichiometric_subspace(net));
    let vt = orthogonal_complement(&kinetic_order_subspace(net));
    if v.dim() == 0 && vt.dim() > 0 {
        return Err(Error::HypothesisNotMet(
            "the compatibility class is the whole orthant, so equilibria are not isolated".into(),
        ));
    }
    let map = BirchMap::from_subspaces(cstar.to_vec(), &v, &vt)?;
    let gamma = map.target_of(cprime)?;
    let class_scale = gamma.amax().max(1.0);
    let options = NewtonOptions::default();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ClassSolutions {
        gamma: gamma.as_slice().to_vec(),
        equilibria: Vec::new(),
        balance_residuals: Vec::new(),
        class_residuals: Vec::new(),
        starts,
        failures: Vec::new(),
    };
    let mut found: Vec<(Vec<f64>, f64, f64)> = Vec::new();
    for i in 0..starts {
        let start: Vec<f64> = if i == 0 {
            vec![0.0; map.d_tilde()]
        } else {
            (0..map.d_tilde())
                .map(|_| rng.random_range(-START_BOX..=START_BOX))
                .collect()
        };
        let sol = match map.solve(&gamma, &start, &options) {
            Ok(s) => s,
            Err(e) => {
                out.failures.push(StartFailure {
                    start: i,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let c = map.point(&sol.lambda)?;
        let diff: Vec<f64> = c.iter().zip(cprime).map(|(a, b)| a - b).collect();
        let class_res = sup_norm(map.v.tr_mul(&DVector::from_vec(diff)).as_slice()) / class_scale;
        let balance_res = sys.relative_balance_residual(&c)?;
        if class_res > CLASS_TOL || balance_res > BALANCE_TOL {
            out.failures.push(StartFailure {
                start: i,
                reason: format!(
                    "verification failed (class residual {class_res:e}, balance residual {balance_res:e})"
                ),
            });
            continue;
        }
        let duplicate = found.iter().any(|(other, _, _)| {
            let dist = sup_norm(&c.iter().zip(other).map(|(a, b)| a - b).collect::<Vec<_>>());
            dist <= DEDUP_TOL * (1.0 + sup_norm(other))
        });
        if !duplicate {
            found.push((c, balance_res, class_res));
        }
    }
    found.sort_by(|a, b| {
        let ka = a.0.first().copied().unwrap_or(0.0);
        let kb = b.0.first().copied().unwrap_or(0.0);
        ka.total_cmp(&kb)
    });
    for (c, b, r) in found {
        out.equilibria.push(c);
        out.balance_residuals.push(b);
        out.class_residuals.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_network;

    fn worked_map() -> BirchMap {
        let v = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
        BirchMap::new(vec![1.0; 3], v.clone(), v).unwrap()
    }

    #[test]
    fn value_and_jacobian_at_origin() {
        let map = worked_map();
        assert_eq!(map.evaluate(&[0.0, 0.0]).unwrap().as_slice(), &[2.0, 2.0]);
        let j = map.jacobian(&[0.0, 0.0]).unwrap();
        assert_eq!(j, DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]));
    }

    #[test]
    fn overflow_is_reported() {
        let map = worked_map();
        assert!(matches!(
            map.evaluate(&[400.0, 400.0]),
            Err(Error::ExponentOverflow { .. })
        ));
    }

    #[test]
    fn newton_inverts_the_map() {
        let map = worked_map();
        let gamma = map.evaluate(&[0.7, -1.3]).unwrap();
        let sol = map.solve(&gamma, &[0.0, 0.0], &NewtonOptions::default()).unwrap();
        assert!((sol.lambda[0] - 0.7).abs() < 1e-9);
        assert!((sol.lambda[1] + 1.3).abs() < 1e-9);
    }

    #[test]
    fn rejects_dependent_configuration() {
        let v = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 1.0, 2.0, 1.0, 2.0]);
        assert!(matches!(
            BirchMap::new(vec![1.0; 3], v.clone(), v),
            Err(Error::DependentColumns)
        ));
    }

    #[test]
    fn classical_pair_has_one_equilibrium() {
        let net = parse_network("A + B <=> C").unwrap();
        let sols = solve_in_class(&net, &[1.0, 1.0], &[1.0; 3], &[1.0; 3], 16, 0).unwrap();
        assert_eq!(sols.equilibria.len(), 1);
        // (2 − x)² = x with x < 2 forces c_C = 1.
        for x in &sols.equilibria[0] {
            assert!((x - 1.0).abs() < 1e-9);
        }
        assert!(sols.failures.is_empty());
    }

    #[test]
    fn rejects_non_equilibrium_cstar() {
        let net = parse_network("A + B <=> C").unwrap();
        assert!(matches!(
            solve_in_class(&net, &[1.0, 1.0], &[1.0, 1.0, 2.0], &[1.0; 3], 4, 0),
            Err(Error::InvalidEquilibrium(_))
        ));
    }
}

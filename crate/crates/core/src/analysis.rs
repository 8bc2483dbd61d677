//! Sign-vector conditions for existence and uniqueness of complex balancing
//! equilibria, and the construction of multistationary rate constants.

use nalgebra::DVector;
use num_traits::Zero;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::chirotope::sign_sets_equal;
use crate::equilibria::BALANCE_TOL;
use crate::error::{Error, Result};
use crate::graph::{circulation_rates, decompose};
use crate::kinetics::PowerLawSystem;
use crate::lattice::{face_lattice, find_dominant_lattice_iso};
use crate::matrix::{format_rational, int, to_f64, Rational};
use crate::network::GeneralizedNetwork;
use crate::signs::{enumerate_sign_vectors, positive_vector, realize, SignVector};
use crate::subspace::{
    direct_deficiencies, kinetic_order_subspace, orthogonal_complement, stoichiometric_subspace,
    structural_deficiencies, DeficiencyReport, SubspaceBasis,
};

/// Deficiencies by `m − l − s` when `t = l`, otherwise by the direct
/// definition with the network's rates (unit rates if none are given).
pub fn deficiencies(net: &GeneralizedNetwork) -> Result<DeficiencyReport> {
    let d = decompose(net);
    if d.t() == d.l() {
        return structural_deficiencies(net);
    }
    let rates = net
        .rates()
        .unwrap_or_else(|| vec![int(1); net.reaction_count()]);
    direct_deficiencies(net, &rates)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniquenessCheck {
    /// `σ(S) ∩ σ(S̃⊥) = {0}`.
    pub unique: bool,
    /// The smallest nonzero common sign vector, ordering `− < 0 < +`.
    pub witness: Option<SignVector>,
}

pub fn check_uniqueness_subspaces(
    s: &SubspaceBasis,
    s_tilde: &SubspaceBasis,
    limit: usize,
) -> Result<UniquenessCheck> {
    let left = enumerate_sign_vectors(s, limit)?;
    let right = enumerate_sign_vectors(&orthogonal_complement(s_tilde), limit)?;
    let witness = left
        .intersection(&right)
        .iter()
        .find(|v| !v.is_zero())
        .cloned();
    Ok(UniquenessCheck {
        unique: witness.is_none(),
        witness,
    })
}

pub fn check_uniqueness(net: &GeneralizedNetwork, limit: usize) -> Result<UniquenessCheck> {
    check_uniqueness_subspaces(
        &stoichiometric_subspace(net),
        &kinetic_order_subspace(net),
        limit,
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalysisVerdict {
    pub weakly_reversible: bool,
    pub deficiency_zero: bool,
    pub kinetic_deficiency_zero: bool,
    /// `σ(S) = σ(S̃)`.
    pub sign_sets_equal: bool,
    /// `(+,…,+) ∈ σ(S⊥)`.
    pub conservative: bool,
    /// `σ(S) ∩ σ(S̃⊥) = {0}`.
    pub uniqueness: bool,
    /// A dominant isomorphism between the face lattices exists and the
    /// cone generated by the rows of a basis of `S⊥` is pointed.
    pub surjectivity_hypothesis: bool,
    /// Every compatibility class meets the equilibrium set in exactly one point.
    pub genthm_applies: bool,
    pub witness_sign_vector: Option<SignVector>,
}

/// All sign-vector conditions, together with a positive vector of `S⊥`
/// when one exists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Analysis {
    pub verdict: AnalysisVerdict,
    pub deficiencies: DeficiencyReport,
    pub conservation_witness: Option<Vec<Rational>>,
}

pub fn analyze(net: &GeneralizedNetwork, limit: usize) -> Result<Analysis> {
    let graph = decompose(net);
    let def = deficiencies(net)?;
    let s = stoichiometric_subspace(net);
    let st = kinetic_order_subspace(net);
    let v = orthogonal_complement(&s);
    let vt = orthogonal_complement(&st);

    let equal = sign_sets_equal(&s, &st);
    let witness = positive_vector(&v);
    let conservative = witness.is_some();
    let uniqueness = check_uniqueness_subspaces(&s, &st, limit)?;
    let surjectivity_hypothesis = conservative && {
        let source = face_lattice(&vt, limit)?;
        let target = face_lattice(&v, limit)?;
        find_dominant_lattice_iso(&source, &target).is_some()
    };
    let verdict = AnalysisVerdict {
        weakly_reversible: graph.weakly_reversible,
        deficiency_zero: def.delta == 0,
        kinetic_deficiency_zero: def.delta_tilde == 0,
        sign_sets_equal: equal,
        conservative,
        uniqueness: uniqueness.unique,
        surjectivity_hypothesis,
        genthm_applies: equal && conservative,
        witness_sign_vector: uniqueness.witness,
    };
    Ok(Analysis {
        verdict,
        deficiencies: def,
        conservation_witness: witness,
    })
}

pub fn check_genthm(net: &GeneralizedNetwork, limit: usize) -> Result<AnalysisVerdict> {
    Ok(analyze(net, limit)?.verdict)
}

/// Rate constants with two distinct complex balancing equilibria in one
/// stoichiometric compatibility class.
#[derive(Clone, Debug)]
pub struct MultistationarityWitness {
    pub sign_vector: SignVector,
    /// `u ∈ S` with `σ(u) = τ`.
    pub u: Vec<Rational>,
    /// `ṽ¹ ∈ S̃⊥` with `σ(ṽ¹) = τ`.
    pub v1: Vec<Rational>,
    pub rates: Vec<f64>,
    pub cstar: Vec<f64>,
    /// `Vᵀ c′`, the class both equilibria lie in.
    pub gamma: Vec<f64>,
    pub equilibria: [Vec<f64>; 2],
    /// `‖A Ψ̃(c)‖∞` for each equilibrium.
    pub residuals: [f64; 2],
    /// `‖Vᵀ(c¹ − c²)‖∞`.
    pub class_residual: f64,
}

impl MultistationarityWitness {
    pub fn to_json(&self, net: &GeneralizedNetwork) -> Value {
        let rates: Map<String, Value> = (0..net.reaction_count())
            .map(|i| (net.reaction_label(i), json!(self.rates[i])))
            .collect();
        let strings = |v: &[Rational]| v.iter().map(format_rational).collect::<Vec<_>>();
        json!({
            "sign_vector": self.sign_vector.to_string(),
            "u": strings(&self.u),
            "v1": strings(&self.v1),
            "rates": rates,
            "cstar": self.cstar,
            "class": { "gamma": self.gamma },
            "equilibria": self.equilibria,
            "residuals": self.residuals,
            "class_residual": self.class_residual,
        })
    }
}

fn sup_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |a, b| a.max(b.abs()))
}

/// Follows the constructive argument: from `τ ∈ σ(S) ∩ σ(S̃⊥)` take
/// `u ∈ S`, `ṽ¹ ∈ S̃⊥` with sign `τ`, put `ṽ² = ṽ¹/2` and solve
/// `u = c* ∘ (e^{ṽ¹} − e^{ṽ²})` for `c*`, then scale a circulation so that
/// `c*` is complex balancing.
pub fn multistationarity_witness(
    net: &GeneralizedNetwork,
    limit: usize,
) -> Result<MultistationarityWitness> {
    if !decompose(net).weakly_reversible {
        return Err(Error::HypothesisNotMet(
            "the network is not weakly reversible".into(),
        ));
    }
    let s = stoichiometric_subspace(net);
    let st = kinetic_order_subspace(net);
    let check = check_uniqueness_subspaces(&s, &st, limit)?;
    let Some(tau) = check.witness else {
        return Err(Error::HypothesisNotMet(
            "σ(S) ∩ σ(S̃⊥) = {0}, so every class has at most one complex balancing equilibrium"
                .into(),
        ));
    };
    let sperp_tilde = orthogonal_complement(&st);
    let internal = || Error::InvalidEquilibrium(format!("sign vector {tau} is not realizable"));
    let u = realize(&s, &tau).ok_or_else(internal)?;
    let v1 = realize(&sperp_tilde, &tau).ok_or_else(internal)?;

    let uf: Vec<f64> = u.iter().map(to_f64).collect();
    let v1f: Vec<f64> = v1.iter().map(to_f64).collect();
    let cstar: Vec<f64> = uf
        .iter()
        .zip(&v1f)
        .map(|(&uk, &vk)| {
            if vk == 0.0 {
                1.0
            } else {
                uk / (vk.exp() - (vk / 2.0).exp())
            }
        })
        .collect();

    let kappa = circulation_rates(net)?;
    let n = net.species_count();
    let rates: Vec<f64> = net
        .reactions()
        .iter()
        .zip(&kappa)
        .map(|(r, &k)| {
            let monomial: f64 = net.kinetic_complexes()[r.source]
                .terms()
                .map(|(s, e)| cstar[s].powf(to_f64(e)))
                .product();
            k as f64 / monomial
        })
        .collect();

    let c1: Vec<f64> = (0..n).map(|k| cstar[k] * v1f[k].exp()).collect();
    let c2: Vec<f64> = (0..n).map(|k| cstar[k] * (v1f[k] / 2.0).exp()).collect();

    let sys = PowerLawSystem::new(net, &rates)?;
    let mut residuals = [0.0; 2];
    for (i, c) in [&c1, &c2].into_iter().enumerate() {
        residuals[i] = sup_norm(&sys.complex_balance(c)?);
        let relative = sys.relative_balance_residual(c)?;
        if relative > BALANCE_TOL {
            return Err(Error::InvalidEquilibrium(format!(
                "constructed equilibrium {} has balance residual {relative:e}",
                i + 1
            )));
        }
    }
    let v = orthogonal_complement(&s).matrix().to_f64();
    let diff = DVector::from_iterator(n, c1.iter().zip(&c2).map(|(a, b)| a - b));
    let class_residual = if v.ncols() == 0 {
        0.0
    } else {
        v.tr_mul(&diff).amax()
    };
    let scale = sup_norm(&c1).max(1.0);
    if class_residual > 1e-8 * scale {
        return Err(Error::InvalidEquilibrium(format!(
            "constructed equilibria differ by a vector outside S (residual {class_residual:e})"
        )));
    }
    let gamma = v.tr_mul(&DVector::from_column_slice(&c1)).as_slice().to_vec();
    debug_assert!(u.iter().zip(&v1).all(|(a, b)| a.is_zero() == b.is_zero()));
    Ok(MultistationarityWitness {
        sign_vector: tau,
        u,
        v1,
        rates,
        cstar,
        gamma,
        equilibria: [c1, c2],
        residuals,
        class_residual,
    })
}

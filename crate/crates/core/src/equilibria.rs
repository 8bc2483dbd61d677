//! The Laplacian `A`, its positive kernel, the monomial map `Ψ̃`, complex
//! balancing equilibria and the pseudo-reaction transform.

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::decompose;
use crate::kinetics::PowerLawSystem;
use crate::matrix::{primitive_ray, to_f64, Rational, RationalMatrix};
use crate::network::{check_rates, Complex, GeneralizedNetwork, Reaction};
use crate::subspace::{kernel_basis, kinetic_order_subspace, orthogonal_complement, SubspaceBasis};

/// Tolerance on `‖A Ψ̃(c)‖∞ / scale` for accepting a complex balancing equilibrium.
pub const BALANCE_TOL: f64 = 1e-9;

/// `A_{y'y} = k_{y→y'}` for `y ≠ y'` and `A_{yy} = −Σ_{y'} k_{y→y'}`.
pub fn laplacian(net: &GeneralizedNetwork, rates: &[Rational]) -> Result<RationalMatrix> {
    check_rates(net, rates)?;
    let m = net.complex_count();
    let mut a = RationalMatrix::zeros(m, m);
    for (r, k) in net.reactions().iter().zip(rates) {
        a[(r.target, r.source)] += k;
        a[(r.source, r.source)] -= k;
    }
    Ok(a)
}

pub fn laplacian_f64(net: &GeneralizedNetwork, rates: &[f64]) -> Result<DMatrix<f64>> {
    crate::network::check_rates_f64(net, rates)?;
    let m = net.complex_count();
    let mut a = DMatrix::zeros(m, m);
    for (r, &k) in net.reactions().iter().zip(rates) {
        a[(r.target, r.source)] += k;
        a[(r.source, r.source)] -= k;
    }
    Ok(a)
}

/// One nonnegative primitive integer vector per terminal strong linkage
/// class, supported exactly on that class; together they span `ker A`.
pub fn kernel_positive_basis(
    net: &GeneralizedNetwork,
    rates: &[Rational],
) -> Result<Vec<Vec<Rational>>> {
    let a = laplacian(net, rates)?;
    let m = net.complex_count();
    let d = decompose(net);
    let mut out = Vec::with_capacity(d.t());
    for class in d.terminal_classes() {
        let block = a.select_rows(class).select_columns(class);
        let kernel = kernel_basis(&block);
        if kernel.dim() != 1 {
            return Err(Error::KernelDimension {
                expected: 1,
                found: kernel.dim(),
            });
        }
        let mut ray = primitive_ray(&kernel.matrix().column(0));
        if ray.iter().any(Signed::is_negative) {
            ray.iter_mut().for_each(|x| *x = -x.clone());
        }
        if !ray.iter().all(Signed::is_positive) {
            return Err(Error::KernelDimension {
                expected: 1,
                found: kernel.dim(),
            });
        }
        let mut chi = vec![Rational::zero(); m];
        for (&y, v) in class.iter().zip(ray) {
            chi[y] = v;
        }
        out.push(chi);
    }
    let found = kernel_basis(&a).dim();
    if found != d.t() {
        return Err(Error::KernelDimension {
            expected: d.t(),
            found,
        });
    }
    Ok(out)
}

/// `Ψ̃(c)`, the monomials `c^{ỹ}` indexed by complexes.
pub fn psi_tilde(net: &GeneralizedNetwork, c: &[f64]) -> Result<Vec<f64>> {
    let n = net.species_count();
    if c.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c.len(),
        });
    }
    if let Some(index) = c.iter().position(|&x| !(x >= 0.0 && x.is_finite())) {
        return Err(Error::NegativeConcentration { index });
    }
    Ok(net
        .kinetic_complexes()
        .iter()
        .map(|k| k.terms().map(|(s, e)| c[s].powf(to_f64(e))).product())
        .collect())
}

/// Solves `⟨ỹ, x⟩ − μ_{L(y)} = ln χ_{L(y),y}` and returns `c* = eˣ`.
///
/// Returns `Ok(None)` when that system is inconsistent, which can only
/// happen for positive kinetic deficiency. Consistency is decided exactly.
pub fn find_complex_balancing(
    net: &GeneralizedNetwork,
    rates: &[Rational],
) -> Result<Option<Vec<f64>>> {
    let d = decompose(net);
    if !d.weakly_reversible {
        return Err(Error::NotWeaklyReversible);
    }
    let chi = kernel_positive_basis(net, rates)?;
    let n = net.species_count();
    let m = net.complex_count();
    let l = d.l();

    // In a weakly reversible network terminal classes are the linkage classes,
    // both ordered by smallest member.
    let value: Vec<Rational> = (0..m).map(|y| chi[d.linkage_of[y]][y].clone()).collect();

    let mut system = RationalMatrix::zeros(m, n + l);
    for (y, k) in net.kinetic_complexes().iter().enumerate() {
        for (s, e) in k.terms() {
            system[(y, s)] = e.clone();
        }
        system[(y, n + d.linkage_of[y])] = -Rational::one();
    }
    // b ∈ im M  ⇔  ⟨z, ln χ⟩ = 0 for every z ∈ ker Mᵀ  ⇔  Π χ^z = 1.
    for z in kernel_basis(&system.transpose()).vectors() {
        let z = primitive_ray(&z);
        let mut product = Rational::one();
        for (zy, chi_y) in z.iter().zip(&value) {
            if zy.is_zero() {
                continue;
            }
            let e: i32 = zy
                .to_integer()
                .try_into()
                .map_err(|_| Error::InvalidArgument("exponent too large".into()))?;
            product *= chi_y.pow(e);
        }
        if !product.is_one() {
            return Ok(None);
        }
    }

    let mf = system.to_f64();
    let rhs = DVector::from_iterator(m, value.iter().map(|v| to_f64(v).ln()));
    let svd = mf.svd(true, true);
    let eps = 1e-12 * svd.singular_values.max().max(1.0);
    let sol = svd
        .solve(&rhs, eps)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let cstar: Vec<f64> = (0..n).map(|s| sol[s].exp()).collect();

    let rates_f: Vec<f64> = rates.iter().map(to_f64).collect();
    let sys = PowerLawSystem::new(net, &rates_f)?;
    let residual = sys.relative_balance_residual(&cstar)?;
    if residual > BALANCE_TOL {
        return Err(Error::InvalidEquilibrium(format!(
            "complex balance residual {residual:e} exceeds tolerance"
        )));
    }
    Ok(Some(cstar))
}

/// The set `{c* ∘ e^ṽ | ṽ ∈ S̃⊥}` of all complex balancing equilibria.
#[derive(Clone, Debug)]
pub struct EquilibriumSetDescriptor {
    pub cstar: Vec<f64>,
    pub sperp_tilde_basis: SubspaceBasis,
}

impl EquilibriumSetDescriptor {
    pub fn new(net: &GeneralizedNetwork, cstar: Vec<f64>) -> Result<Self> {
        if cstar.len() != net.species_count() {
            return Err(Error::DimensionMismatch {
                expected: net.species_count(),
                found: cstar.len(),
            });
        }
        if let Some(index) = cstar.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::ZeroConcentration { index });
        }
        Ok(EquilibriumSetDescriptor {
            cstar,
            sperp_tilde_basis: orthogonal_complement(&kinetic_order_subspace(net)),
        })
    }

    /// `c* ∘ exp(Σ λ_j ṽʲ)`.
    pub fn point(&self, lambda: &[f64]) -> Result<Vec<f64>> {
        let b = self.sperp_tilde_basis.matrix().to_f64();
        if lambda.len() != b.ncols() {
            return Err(Error::DimensionMismatch {
                expected: b.ncols(),
                found: lambda.len(),
            });
        }
        let shift = &b * DVector::from_column_slice(lambda);
        Ok(self
            .cstar
            .iter()
            .zip(shift.iter())
            .map(|(c, v)| c * v.exp())
            .collect())
    }

    /// Distance of `ln c − ln c*` from `S̃⊥`, in the max norm.
    pub fn membership_residual(&self, c: &[f64]) -> Result<f64> {
        if let Some(index) = c.iter().position(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::ZeroConcentration { index });
        }
        let b = self.sperp_tilde_basis.matrix().to_f64();
        let diff = DVector::from_iterator(
            c.len(),
            c.iter().zip(&self.cstar).map(|(x, y)| x.ln() - y.ln()),
        );
        if b.ncols() == 0 {
            return Ok(diff.amax());
        }
        let svd = b.clone().svd(true, true);
        let coeff = svd
            .solve(&diff, 1e-12)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok((&b * coeff - diff).amax())
    }
}

/// Replaces every reaction `y → y'` by `ỹ → ỹ + (y' − y)` with classical
/// kinetics. Rates carry over.
pub fn pseudo_reaction_transform(net: &GeneralizedNetwork) -> Result<GeneralizedNetwork> {
    let mut complexes: Vec<Complex> = Vec::new();
    let index_of = |c: Complex, complexes: &mut Vec<Complex>| -> usize {
        match complexes.iter().position(|x| *x == c) {
            Some(i) => i,
            None => {
                complexes.push(c);
                complexes.len() - 1
            }
        }
    };
    let mut reactions = Vec::with_capacity(net.reaction_count());
    for (i, r) in net.reactions().iter().enumerate() {
        let kinetic = &net.kinetic_complexes()[r.source];
        let source = &net.complexes()[r.source];
        let target = &net.complexes()[r.target];
        let species: std::collections::BTreeSet<usize> = kinetic
            .terms()
            .chain(source.terms())
            .chain(target.terms())
            .map(|(s, _)| s)
            .collect();
        let mut terms = Vec::new();
        for s in species {
            let v = kinetic.coefficient(s) + target.coefficient(s) - source.coefficient(s);
            if v.is_negative() {
                return Err(Error::TransformInapplicable(format!(
                    "reaction {} (species {})",
                    net.reaction_label(i),
                    net.species()[s].name
                )));
            }
            terms.push((s, v));
        }
        let new_target = Complex::from_terms(terms)?;
        let s = index_of(kinetic.clone(), &mut complexes);
        let t = index_of(new_target, &mut complexes);
        reactions.push(Reaction {
            source: s,
            target: t,
            rate: r.rate.clone(),
        });
    }
    let names: Vec<String> = net.species().iter().map(|s| s.name.clone()).collect();
    let kinetic = complexes.clone();
    Ok(GeneralizedNetwork::new(names, complexes, kinetic, reactions)?)
}

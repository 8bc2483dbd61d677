//! Floating-point evaluation of power-law rate functions.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matrix::to_f64;
use crate::network::{check_rates_f64, GeneralizedNetwork};

#[derive(Clone, Debug)]
struct FloatReaction {
    source: usize,
    target: usize,
    rate: f64,
    /// Nonzero entries of `y' − y`.
    change: Vec<(usize, f64)>,
}

/// A generalized mass-action system with rates fixed, in `f64`.
#[derive(Clone, Debug)]
pub struct PowerLawSystem {
    n: usize,
    m: usize,
    /// Nonzero exponents `ỹ_s` of each kinetic complex.
    exponents: Vec<Vec<(usize, f64)>>,
    reactions: Vec<FloatReaction>,
}

impl PowerLawSystem {
    pub fn new(net: &GeneralizedNetwork, rates: &[f64]) -> Result<Self> {
        check_rates_f64(net, rates)?;
        let n = net.species_count();
        let exponents = net
            .kinetic_complexes()
            .iter()
            .map(|c| c.terms().map(|(s, v)| (s, to_f64(v))).collect())
            .collect();
        let reactions = net
            .reactions()
            .iter()
            .zip(net.reaction_vectors())
            .zip(rates)
            .map(|((r, change), &rate)| FloatReaction {
                source: r.source,
                target: r.target,
                rate,
                change: change
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !num_traits::Zero::is_zero(*v))
                    .map(|(s, v)| (s, to_f64(v)))
                    .collect(),
            })
            .collect();
        Ok(PowerLawSystem {
            n,
            m: net.complex_count(),
            exponents,
            reactions,
        })
    }

    pub fn species_count(&self) -> usize {
        self.n
    }

    pub fn rates(&self) -> Vec<f64> {
        self.reactions.iter().map(|r| r.rate).collect()
    }

    fn check_state(&self, c: &[f64]) -> Result<()> {
        if c.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: c.len(),
            });
        }
        if let Some(index) = c.iter().position(|&x| !(x >= 0.0 && x.is_finite())) {
            return Err(Error::NegativeConcentration { index });
        }
        Ok(())
    }

    /// `Ψ̃(c)`: the monomial `c^{ỹ}` of every complex, with `0⁰ = 1`.
    pub fn monomials(&self, c: &[f64]) -> Result<Vec<f64>> {
        self.check_state(c)?;
        Ok(self
            .exponents
            .iter()
            .map(|terms| terms.iter().map(|&(s, e)| c[s].powf(e)).product())
            .collect())
    }

    /// Reaction fluxes `k_{y→y'} c^{ỹ}`.
    pub fn fluxes(&self, c: &[f64]) -> Result<Vec<f64>> {
        let psi = self.monomials(c)?;
        Ok(self.reactions.iter().map(|r| r.rate * psi[r.source]).collect())
    }

    /// `r̃(c) = Σ k c^{ỹ} (y' − y)`.
    pub fn formation_rate(&self, c: &[f64]) -> Result<Vec<f64>> {
        let fluxes = self.fluxes(c)?;
        let mut out = vec![0.0; self.n];
        for (r, f) in self.reactions.iter().zip(fluxes) {
            for &(s, v) in &r.change {
                out[s] += f * v;
            }
        }
        Ok(out)
    }

    /// `∂r̃_s/∂c_σ = Σ k c^{ỹ} (ỹ_σ / c_σ) (y' − y)_s`, requiring `c_σ > 0`
    /// wherever a positive exponent occurs.
    pub fn jacobian(&self, c: &[f64]) -> Result<DMatrix<f64>> {
        let psi = self.monomials(c)?;
        let mut jac = DMatrix::zeros(self.n, self.n);
        for r in &self.reactions {
            let flux = r.rate * psi[r.source];
            for &(sigma, e) in &self.exponents[r.source] {
                // d/dc (c^e) for c = 0 only exists when e >= 1.
                let partial = if c[sigma] > 0.0 {
                    flux * e / c[sigma]
                } else if e == 1.0 {
                    r.rate
                        * self.exponents[r.source]
                            .iter()
                            .filter(|&&(s, _)| s != sigma)
                            .map(|&(s, ee)| c[s].powf(ee))
                            .product::<f64>()
                } else if e > 1.0 {
                    0.0
                } else {
                    return Err(Error::ZeroConcentration { index: sigma });
                };
                for &(s, v) in &r.change {
                    jac[(s, sigma)] += partial * v;
                }
            }
        }
        Ok(jac)
    }

    /// `A Ψ̃(c)`: net inflow minus outflow at each complex.
    pub fn complex_balance(&self, c: &[f64]) -> Result<Vec<f64>> {
        let fluxes = self.fluxes(c)?;
        let mut out = vec![0.0; self.m];
        for (r, f) in self.reactions.iter().zip(fluxes) {
            out[r.target] += f;
            out[r.source] -= f;
        }
        Ok(out)
    }

    /// Largest total outflow at any complex; the natural scale of `A Ψ̃(c)`.
    pub fn flux_scale(&self, c: &[f64]) -> Result<f64> {
        let fluxes = self.fluxes(c)?;
        let mut out = vec![0.0; self.m];
        for (r, f) in self.reactions.iter().zip(fluxes) {
            out[r.source] += f;
        }
        Ok(out.into_iter().fold(0.0, f64::max))
    }

    /// `‖A Ψ̃(c)‖∞` divided by [`flux_scale`](Self::flux_scale).
    pub fn relative_balance_residual(&self, c: &[f64]) -> Result<f64> {
        let balance = self.complex_balance(c)?;
        let scale = self.flux_scale(c)?;
        let abs = balance.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        Ok(if scale > 0.0 { abs / scale } else { abs })
    }
}

//! Generalized chemical reaction networks: species, complexes, kinetic
//! complexes and reactions, plus the complex matrices built from them.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result, ValidationError};
use crate::matrix::{format_rational, to_f64, Rational, RationalMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Species {
    pub name: String,
    pub index: usize,
}

/// A formal nonnegative combination of species, stored sparsely.
///
/// Zero coefficients are never stored, so two complexes are equal exactly when
/// their coefficient vectors are.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Complex {
    coefficients: BTreeMap<usize, Rational>,
}

impl Complex {
    /// The empty complex `0`.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a complex from `(species index, coefficient)` pairs. Repeated
    /// species are summed; zero coefficients are dropped.
    pub fn from_terms<I>(terms: I) -> std::result::Result<Self, ValidationError>
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut coefficients: BTreeMap<usize, Rational> = BTreeMap::new();
        for (species, coeff) in terms {
            if coeff.is_negative() {
                return Err(ValidationError::NegativeCoefficient(format!("#{species}")));
            }
            *coefficients.entry(species).or_insert_with(Rational::zero) += coeff;
        }
        coefficients.retain(|_, c| !c.is_zero());
        Ok(Complex { coefficients })
    }

    pub fn coefficient(&self, species: usize) -> Rational {
        self.coefficients
            .get(&species)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Nonzero terms in species order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.coefficients.iter().map(|(&s, c)| (s, c))
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Dense coefficient vector of length `n`.
    pub fn to_vec(&self, n: usize) -> Vec<Rational> {
        (0..n).map(|s| self.coefficient(s)).collect()
    }

    pub fn to_f64_vec(&self, n: usize) -> Vec<f64> {
        (0..n).map(|s| to_f64(&self.coefficient(s))).collect()
    }

    fn max_species(&self) -> Option<usize> {
        self.coefficients.keys().next_back().copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Reaction {
    pub source: usize,
    pub target: usize,
    pub rate: Option<Rational>,
}

/// A reaction network with a kinetic complex attached to every complex.
///
/// `kinetic_complexes[i]` is the exponent vector of the power-law rate of
/// every reaction leaving `complexes[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralizedNetwork {
    species: Vec<Species>,
    complexes: Vec<Complex>,
    kinetic_complexes: Vec<Complex>,
    reactions: Vec<Reaction>,
}

impl GeneralizedNetwork {
    /// Validates and assembles a network.
    pub fn new(
        species_names: Vec<String>,
        complexes: Vec<Complex>,
        kinetic_complexes: Vec<Complex>,
        reactions: Vec<Reaction>,
    ) -> std::result::Result<Self, ValidationError> {
        let mut seen = HashSet::new();
        for name in &species_names {
            if !is_identifier(name) || !seen.insert(name.as_str()) {
                return Err(ValidationError::InvalidSpecies(name.clone()));
            }
        }
        let species: Vec<Species> = species_names
            .into_iter()
            .enumerate()
            .map(|(index, name)| Species { name, index })
            .collect();
        let net = GeneralizedNetwork {
            species,
            complexes,
            kinetic_complexes,
            reactions,
        };
        net.validate()?;
        Ok(net)
    }

    fn validate(&self) -> std::result::Result<(), ValidationError> {
        let n = self.species.len();
        let m = self.complexes.len();
        if self.kinetic_complexes.len() != m {
            return Err(ValidationError::LengthMismatch {
                complexes: m,
                kinetic: self.kinetic_complexes.len(),
            });
        }
        for c in self.complexes.iter().chain(&self.kinetic_complexes) {
            if let Some(s) = c.max_species() {
                if s >= n {
                    return Err(ValidationError::UnknownSpecies(s));
                }
            }
        }
        let mut by_complex = HashMap::new();
        for (i, c) in self.complexes.iter().enumerate() {
            if by_complex.insert(c, i).is_some() {
                return Err(ValidationError::DuplicateComplex(self.complex_label(i)));
            }
        }
        let mut by_kinetic: HashMap<&Complex, usize> = HashMap::new();
        for (i, c) in self.kinetic_complexes.iter().enumerate() {
            if let Some(&first) = by_kinetic.get(c) {
                return Err(ValidationError::DuplicateKineticComplex {
                    first: self.complex_label(first),
                    second: self.complex_label(i),
                    kinetic: self.kinetic_label(i),
                });
            }
            by_kinetic.insert(c, i);
        }
        let mut used = vec![false; m];
        let mut pairs = HashSet::new();
        for r in &self.reactions {
            for idx in [r.source, r.target] {
                if idx >= m {
                    return Err(ValidationError::UnknownComplex(idx));
                }
                used[idx] = true;
            }
            let label = self.reaction_label_raw(r.source, r.target);
            if r.source == r.target {
                return Err(ValidationError::SelfLoop(label));
            }
            if !pairs.insert((r.source, r.target)) {
                return Err(ValidationError::DuplicateReaction(label));
            }
            if let Some(k) = &r.rate {
                if !k.is_positive() {
                    return Err(ValidationError::NonPositiveRate(label));
                }
            }
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(ValidationError::OrphanComplex(self.complex_label(i)));
        }
        Ok(())
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn species_names(&self) -> Vec<&str> {
        self.species.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn complexes(&self) -> &[Complex] {
        &self.complexes
    }

    pub fn kinetic_complexes(&self) -> &[Complex] {
        &self.kinetic_complexes
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    /// Number of species `n`.
    pub fn species_count(&self) -> usize {
        self.species.len()
    }

    /// Number of complexes `m`.
    pub fn complex_count(&self) -> usize {
        self.complexes.len()
    }

    pub fn reaction_count(&self) -> usize {
        self.reactions.len()
    }

    /// True when every complex is its own kinetic complex.
    pub fn is_classical(&self) -> bool {
        self.complexes == self.kinetic_complexes
    }

    /// Rate constants in reaction order, if every reaction has one.
    pub fn rates(&self) -> Option<Vec<Rational>> {
        self.reactions.iter().map(|r| r.rate.clone()).collect()
    }

    /// Returns a copy with the given rate constants attached.
    pub fn with_rates(&self, rates: &[Rational]) -> Result<Self> {
        check_rates(self, rates)?;
        let mut net = self.clone();
        for (r, k) in net.reactions.iter_mut().zip(rates) {
            r.rate = Some(k.clone());
        }
        Ok(net)
    }

    /// `Y`: the `n x m` matrix whose column `y` holds the coefficients of complex `y`.
    pub fn complex_matrix(&self) -> RationalMatrix {
        let columns: Vec<Vec<Rational>> = self
            .complexes
            .iter()
            .map(|c| c.to_vec(self.species_count()))
            .collect();
        RationalMatrix::from_columns(&columns, self.species_count())
    }

    /// `Ỹ`: as [`complex_matrix`](Self::complex_matrix) over kinetic complexes.
    pub fn kinetic_matrix(&self) -> RationalMatrix {
        let columns: Vec<Vec<Rational>> = self
            .kinetic_complexes
            .iter()
            .map(|c| c.to_vec(self.species_count()))
            .collect();
        RationalMatrix::from_columns(&columns, self.species_count())
    }

    /// Reaction vectors `y' - y`, one per reaction.
    pub fn reaction_vectors(&self) -> Vec<Vec<Rational>> {
        let n = self.species_count();
        self.reactions
            .iter()
            .map(|r| {
                let src = self.complexes[r.source].to_vec(n);
                let dst = self.complexes[r.target].to_vec(n);
                dst.into_iter().zip(src).map(|(a, b)| a - b).collect()
            })
            .collect()
    }

    /// Kinetic reaction vectors `ỹ' - ỹ`, one per reaction.
    pub fn kinetic_reaction_vectors(&self) -> Vec<Vec<Rational>> {
        let n = self.species_count();
        self.reactions
            .iter()
            .map(|r| {
                let src = self.kinetic_complexes[r.source].to_vec(n);
                let dst = self.kinetic_complexes[r.target].to_vec(n);
                dst.into_iter().zip(src).map(|(a, b)| a - b).collect()
            })
            .collect()
    }

    pub fn format_complex(&self, complex: &Complex) -> String {
        if complex.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (s, c)) in complex.terms().enumerate() {
            if i > 0 {
                out.push_str(" + ");
            }
            if c != &Rational::from_integer(1.into()) {
                let _ = write!(out, "{} ", format_rational(c));
            }
            out.push_str(&self.species[s].name);
        }
        out
    }

    pub fn complex_label(&self, i: usize) -> String {
        self.format_complex(&self.complexes[i])
    }

    pub fn kinetic_label(&self, i: usize) -> String {
        self.format_complex(&self.kinetic_complexes[i])
    }

    pub fn reaction_label(&self, r: usize) -> String {
        let r = &self.reactions[r];
        self.reaction_label_raw(r.source, r.target)
    }

    fn reaction_label_raw(&self, source: usize, target: usize) -> String {
        let label = |i: usize| {
            self.complexes
                .get(i)
                .map_or_else(|| format!("#{i}"), |c| self.format_complex(c))
        };
        format!("{} -> {}", label(source), label(target))
    }

    /// Serializes to the line-oriented text format accepted by
    /// [`parse_network`](crate::parse::parse_network).
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "species {}", self.species_names().join(", "));
        for r in 0..self.reactions.len() {
            let _ = writeln!(out, "{}", self.reaction_label(r));
        }
        for i in 0..self.complexes.len() {
            if self.complexes[i] != self.kinetic_complexes[i] {
                let _ = writeln!(out, "{} ~ {}", self.complex_label(i), self.kinetic_label(i));
            }
        }
        for (i, r) in self.reactions.iter().enumerate() {
            if let Some(k) = &r.rate {
                let _ = writeln!(out, "rate {} = {}", self.reaction_label(i), format_rational(k));
            }
        }
        out
    }

    /// JSON export with exact `p/q` coefficient strings.
    pub fn to_json(&self) -> Value {
        let complex_json = |c: &Complex| -> Value {
            let map: serde_json::Map<String, Value> = c
                .terms()
                .map(|(s, v)| (self.species[s].name.clone(), Value::String(format_rational(v))))
                .collect();
            Value::Object(map)
        };
        json!({
            "species": self.species_names(),
            "complexes": self.complexes.iter().map(complex_json).collect::<Vec<_>>(),
            "kinetic_complexes": self.kinetic_complexes.iter().map(complex_json).collect::<Vec<_>>(),
            "reactions": self.reactions.iter().map(|r| json!({
                "source": r.source,
                "target": r.target,
                "rate": r.rate.as_ref().map(format_rational),
            })).collect::<Vec<_>>(),
        })
    }
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Checks a rate vector against a network: one positive entry per reaction.
pub fn check_rates(net: &GeneralizedNetwork, rates: &[Rational]) -> Result<()> {
    if rates.len() != net.reaction_count() {
        return Err(Error::RateCount {
            expected: net.reaction_count(),
            found: rates.len(),
        });
    }
    if let Some(index) = rates.iter().position(|k| !k.is_positive()) {
        return Err(Error::NonPositiveRate { index });
    }
    Ok(())
}

/// Floating-point counterpart of [`check_rates`].
pub fn check_rates_f64(net: &GeneralizedNetwork, rates: &[f64]) -> Result<()> {
    if rates.len() != net.reaction_count() {
        return Err(Error::RateCount {
            expected: net.reaction_count(),
            found: rates.len(),
        });
    }
    if let Some(index) = rates.iter().position(|&k| !(k > 0.0 && k.is_finite())) {
        return Err(Error::NonPositiveRate { index });
    }
    Ok(())
}

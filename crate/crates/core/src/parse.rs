//! Reader for the line-oriented network text format.
//!
//! ```text
//! # comment
//! species A, B, C            # optional; fixes the species order
//! A + 2 B <=> B + C          # reversible pair
//! A + 2 B ~ A + B            # kinetic complex of A + 2 B
//! rate A + 2 B -> B + C = 3/2
//! ```
//!
//! Coefficients are integers, fractions `p/q` or decimals; an omitted
//! coefficient is 1 and the empty complex is written `0`.

use std::collections::HashMap;

use num_traits::{Signed, Zero};

use crate::error::{ParseError, ValidationError};
use crate::matrix::{parse_rational, Rational};
use crate::network::{is_identifier, Complex, GeneralizedNetwork, Reaction};

struct Term {
    name: String,
    coeff: Rational,
}

/// A complex as written, before species indices are assigned.
type RawComplex = Vec<Term>;

enum Item {
    Species(Vec<String>),
    Reaction {
        source: RawComplex,
        target: RawComplex,
        reversible: bool,
    },
    Kinetic {
        complex: RawComplex,
        kinetic: RawComplex,
    },
    Rate {
        source: RawComplex,
        target: RawComplex,
        value: Rational,
    },
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn invalid(line: usize, source: ValidationError) -> ParseError {
    ParseError::Invalid { line, source }
}

/// Parses and validates a network.
pub fn parse_network(text: &str) -> Result<GeneralizedNetwork, ParseError> {
    let mut items = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        items.push((line_no, parse_line(content, line_no)?));
    }
    assemble(items)
}

fn parse_line(content: &str, line: usize) -> Result<Item, ParseError> {
    let trimmed = content.trim_start();
    let offset = content.len() - trimmed.len();

    if let Some(rest) = keyword(trimmed, "species") {
        if !rest.contains(['-', '<', '~', '=']) {
            let names = rest
                .split(|c: char| c == ',' || c.is_whitespace() || c == ':')
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect::<Vec<_>>();
            for name in &names {
                if !is_identifier(name) {
                    let col = offset + trimmed.find(name.as_str()).unwrap_or(0) + 1;
                    return Err(syntax(line, col, format!("invalid species name {name:?}")));
                }
            }
            return Ok(Item::Species(names));
        }
    }

    if let Some(rest) = keyword(trimmed, "rate") {
        if let Some(eq) = rest.rfind('=') {
            let rest_offset = content.len() - rest.len();
            let (lhs, value_text) = (&rest[..eq], &rest[eq + 1..]);
            let value_col = rest_offset + eq + 2;
            let value = parse_rational(value_text)
                .ok_or_else(|| syntax(line, value_col, format!("invalid rate {:?}", value_text.trim())))?;
            let Some(arrow) = lhs.find("->") else {
                return Err(syntax(line, rest_offset + 1, "rate line needs `<complex> -> <complex>`"));
            };
            if lhs.contains("<=>") {
                return Err(syntax(line, rest_offset + 1, "rate lines name a single irreversible reaction"));
            }
            let source = parse_complex(&lhs[..arrow], rest_offset, line)?;
            let target = parse_complex(&lhs[arrow + 2..], rest_offset + arrow + 2, line)?;
            return Ok(Item::Rate {
                source,
                target,
                value,
            });
        }
    }

    if let Some(pos) = content.find("<=>") {
        let source = parse_complex(&content[..pos], 0, line)?;
        let target = parse_complex(&content[pos + 3..], pos + 3, line)?;
        return Ok(Item::Reaction {
            source,
            target,
            reversible: true,
        });
    }
    if let Some(pos) = content.find("->") {
        let source = parse_complex(&content[..pos], 0, line)?;
        let target = parse_complex(&content[pos + 2..], pos + 2, line)?;
        return Ok(Item::Reaction {
            source,
            target,
            reversible: false,
        });
    }
    if let Some(pos) = content.find('~') {
        let complex = parse_complex(&content[..pos], 0, line)?;
        let kinetic = parse_complex(&content[pos + 1..], pos + 1, line)?;
        return Ok(Item::Kinetic { complex, kinetic });
    }
    Err(syntax(
        line,
        offset + 1,
        "expected a reaction (`->`, `<=>`), a kinetic association (`~`), a rate or a species line",
    ))
}

fn keyword<'a>(text: &'a str, word: &str) -> Option<&'a str> {
    let rest = text.strip_prefix(word)?;
    match rest.chars().next() {
        Some(c) if c.is_whitespace() || c == ':' => Some(rest),
        _ => None,
    }
}

/// Parses `segment`, which starts at byte `start` of the line.
fn parse_complex(segment: &str, start: usize, line: usize) -> Result<RawComplex, ParseError> {
    if segment.trim().is_empty() {
        return Err(syntax(line, start + 1, "empty complex (write `0` for the zero complex)"));
    }
    if segment.trim() == "0" {
        return Ok(Vec::new());
    }
    let mut terms = Vec::new();
    let mut pos = start;
    for part in segment.split('+') {
        terms.push(parse_term(part, pos, line)?);
        pos += part.len() + 1;
    }
    Ok(terms)
}

fn parse_term(part: &str, start: usize, line: usize) -> Result<Term, ParseError> {
    let lead = part.len() - part.trim_start().len();
    let body = part.trim();
    let col = start + lead + 1;
    if body.is_empty() {
        return Err(syntax(line, col, "missing term around `+`"));
    }
    if body.starts_with('-') {
        return Err(invalid(line, ValidationError::NegativeCoefficient(body.to_string())));
    }
    let coeff_len = body
        .find(|c: char| !(c.is_ascii_digit() || c == '.' || c == '/'))
        .unwrap_or(body.len());
    let (coeff_text, name) = (&body[..coeff_len], body[coeff_len..].trim_start());
    let coeff = if coeff_text.is_empty() {
        Rational::from_integer(1.into())
    } else {
        parse_rational(coeff_text)
            .ok_or_else(|| syntax(line, col, format!("invalid coefficient {coeff_text:?}")))?
    };
    if name.is_empty() {
        return Err(syntax(line, col, format!("expected a species name in {body:?}")));
    }
    if !is_identifier(name) {
        let name_col = col + body.len() - name.len();
        return Err(syntax(line, name_col, format!("invalid species name {name:?}")));
    }
    Ok(Term {
        name: name.to_string(),
        coeff,
    })
}

struct Builder {
    species: Vec<String>,
    index: HashMap<String, usize>,
}

impl Builder {
    fn declare(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.species.push(name.to_string());
        self.index.insert(name.to_string(), self.species.len() - 1);
        self.species.len() - 1
    }

    fn complex(&mut self, raw: &RawComplex, line: usize) -> Result<Complex, ParseError> {
        let terms: Vec<(usize, Rational)> = raw
            .iter()
            .map(|t| (self.declare(&t.name), t.coeff.clone()))
            .collect();
        Complex::from_terms(terms).map_err(|e| invalid(line, e))
    }

    fn lookup(&self, raw: &RawComplex) -> Option<Complex> {
        let terms: Option<Vec<(usize, Rational)>> = raw
            .iter()
            .map(|t| self.index.get(&t.name).map(|&i| (i, t.coeff.clone())))
            .collect();
        Complex::from_terms(terms?).ok()
    }
}

fn assemble(items: Vec<(usize, Item)>) -> Result<GeneralizedNetwork, ParseError> {
    let mut b = Builder {
        species: Vec::new(),
        index: HashMap::new(),
    };
    for (line, item) in &items {
        if let Item::Species(names) = item {
            for name in names {
                if b.index.contains_key(name) {
                    return Err(invalid(*line, ValidationError::InvalidSpecies(name.clone())));
                }
                b.declare(name);
            }
        }
    }

    let mut complexes: Vec<Complex> = Vec::new();
    let mut complex_ids: HashMap<Complex, usize> = HashMap::new();
    let mut reactions: Vec<Reaction> = Vec::new();
    let mut reaction_ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut register = |c: Complex, complexes: &mut Vec<Complex>| -> usize {
        *complex_ids.entry(c.clone()).or_insert_with(|| {
            complexes.push(c);
            complexes.len() - 1
        })
    };

    // Species first appearance follows line order across reaction and kinetic lines.
    let mut kinetic_lines = Vec::new();
    for (line, item) in &items {
        match item {
            Item::Reaction {
                source,
                target,
                reversible,
            } => {
                let s = b.complex(source, *line)?;
                let t = b.complex(target, *line)?;
                let si = register(s, &mut complexes);
                let ti = register(t, &mut complexes);
                let mut pairs = vec![(si, ti)];
                if *reversible {
                    pairs.push((ti, si));
                }
                for (from, to) in pairs {
                    if from == to {
                        let label = format!(
                            "{} -> {}",
                            render(&b, &complexes[from]),
                            render(&b, &complexes[to])
                        );
                        return Err(invalid(*line, ValidationError::SelfLoop(label)));
                    }
                    if reaction_ids.contains_key(&(from, to)) {
                        let label = format!(
                            "{} -> {}",
                            render(&b, &complexes[from]),
                            render(&b, &complexes[to])
                        );
                        return Err(invalid(*line, ValidationError::DuplicateReaction(label)));
                    }
                    reaction_ids.insert((from, to), reactions.len());
                    reactions.push(Reaction {
                        source: from,
                        target: to,
                        rate: None,
                    });
                }
            }
            Item::Kinetic { complex, kinetic } => {
                let c = b.complex(complex, *line)?;
                let k = b.complex(kinetic, *line)?;
                kinetic_lines.push((*line, c, k));
            }
            _ => {}
        }
    }

    let mut kinetic: Vec<Option<Complex>> = vec![None; complexes.len()];
    for (line, c, k) in kinetic_lines {
        let Some(&i) = complex_ids.get(&c) else {
            return Err(invalid(line, ValidationError::OrphanComplex(render(&b, &c))));
        };
        if kinetic[i].is_some() {
            return Err(invalid(line, ValidationError::DuplicateAssociation(render(&b, &c))));
        }
        kinetic[i] = Some(k);
    }
    let kinetic: Vec<Complex> = kinetic
        .into_iter()
        .zip(&complexes)
        .map(|(k, c)| k.unwrap_or_else(|| c.clone()))
        .collect();

    for (line, item) in &items {
        if let Item::Rate {
            source,
            target,
            value,
        } = item
        {
            let label = || format!("{} -> {}", render_raw(source), render_raw(target));
            let id = b
                .lookup(source)
                .zip(b.lookup(target))
                .and_then(|(s, t)| Some((*complex_ids.get(&s)?, *complex_ids.get(&t)?)))
                .and_then(|pair| reaction_ids.get(&pair).copied())
                .ok_or_else(|| invalid(*line, ValidationError::UnknownReaction(label())))?;
            if !value.is_positive() || value.is_zero() {
                return Err(invalid(*line, ValidationError::NonPositiveRate(label())));
            }
            if reactions[id].rate.is_some() {
                return Err(invalid(*line, ValidationError::DuplicateRate(label())));
            }
            reactions[id].rate = Some(value.clone());
        }
    }

    Ok(GeneralizedNetwork::new(b.species, complexes, kinetic, reactions)?)
}

fn render(b: &Builder, c: &Complex) -> String {
    if c.is_empty() {
        return "0".into();
    }
    c.terms()
        .map(|(s, v)| {
            if v == &Rational::from_integer(1.into()) {
                b.species[s].clone()
            } else {
                format!("{} {}", v, b.species[s])
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

fn render_raw(c: &RawComplex) -> String {
    if c.is_empty() {
        return "0".into();
    }
    c.iter()
        .map(|t| format!("{} {}", t.coeff, t.name))
        .collect::<Vec<_>>()
        .join(" + ")
}

//! Report assembly and the fixed-width text rendering.

use std::fmt::Write;

use gmak::matrix::format_rational;
use gmak::{
    analyze, decompose, kinetic_order_subspace, orthogonal_complement, stoichiometric_subspace,
    AnalysisVerdict, DeficiencyReport, GeneralizedNetwork, Rational, Result, SubspaceBasis,
};
use serde::Serialize;

#[derive(Serialize)]
pub struct NetworkSection {
    pub species: Vec<String>,
    pub n: usize,
    pub m: usize,
    pub reactions: usize,
    pub classical: bool,
    pub reaction_list: Vec<String>,
    pub kinetic_complexes: Vec<String>,
}

#[derive(Serialize)]
pub struct GraphSection {
    pub l: usize,
    pub t: usize,
    pub weakly_reversible: bool,
    pub linkage_classes: Vec<Vec<String>>,
    pub terminal_classes: Vec<Vec<String>>,
}

#[derive(Serialize)]
pub struct SubspaceSection {
    pub s: usize,
    pub s_tilde: usize,
    pub stoichiometric_basis: Vec<Vec<String>>,
    pub kinetic_order_basis: Vec<Vec<String>>,
    pub conservation_basis: Vec<Vec<String>>,
    pub kinetic_conservation_basis: Vec<Vec<String>>,
}

#[derive(Serialize)]
pub struct SignsSection {
    pub sign_sets_equal: bool,
    pub conservative: bool,
    pub conservation_witness: Option<Vec<String>>,
    pub uniqueness: bool,
    pub uniqueness_witness: Option<String>,
    pub surjectivity_hypothesis: bool,
}

#[derive(Serialize)]
pub struct Report {
    pub network: NetworkSection,
    pub graph: GraphSection,
    pub subspaces: SubspaceSection,
    pub deficiency: DeficiencyReport,
    pub signs: SignsSection,
    pub verdict: AnalysisVerdict,
}

pub fn rationals(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn basis_strings(b: &SubspaceBasis) -> Vec<Vec<String>> {
    b.vectors().iter().map(|v| rationals(v)).collect()
}

pub fn network_section(net: &GeneralizedNetwork) -> NetworkSection {
    NetworkSection {
        species: net.species_names().iter().map(|s| s.to_string()).collect(),
        n: net.species_count(),
        m: net.complex_count(),
        reactions: net.reaction_count(),
        classical: net.is_classical(),
        reaction_list: (0..net.reaction_count()).map(|i| net.reaction_label(i)).collect(),
        kinetic_complexes: (0..net.complex_count()).map(|i| net.kinetic_label(i)).collect(),
    }
}

pub fn graph_section(net: &GeneralizedNetwork) -> GraphSection {
    let d = decompose(net);
    let labels = |class: &[usize]| class.iter().map(|&y| net.complex_label(y)).collect();
    GraphSection {
        l: d.l(),
        t: d.t(),
        weakly_reversible: d.weakly_reversible,
        linkage_classes: d.linkage_classes.iter().map(|c| labels(c)).collect(),
        terminal_classes: d.terminal_classes().into_iter().map(labels).collect(),
    }
}

pub fn build(net: &GeneralizedNetwork, limit: usize) -> Result<Report> {
    let analysis = analyze(net, limit)?;
    let s = stoichiometric_subspace(net);
    let st = kinetic_order_subspace(net);
    let v = analysis.verdict.clone();
    Ok(Report {
        network: network_section(net),
        graph: graph_section(net),
        subspaces: SubspaceSection {
            s: s.dim(),
            s_tilde: st.dim(),
            stoichiometric_basis: basis_strings(&s),
            kinetic_order_basis: basis_strings(&st),
            conservation_basis: basis_strings(&orthogonal_complement(&s)),
            kinetic_conservation_basis: basis_strings(&orthogonal_complement(&st)),
        },
        deficiency: analysis.deficiencies,
        signs: SignsSection {
            sign_sets_equal: v.sign_sets_equal,
            conservative: v.conservative,
            conservation_witness: analysis.conservation_witness.as_deref().map(rationals),
            uniqueness: v.uniqueness,
            uniqueness_witness: v.witness_sign_vector.as_ref().map(ToString::to_string),
            surjectivity_hypothesis: v.surjectivity_hypothesis,
        },
        verdict: analysis.verdict,
    })
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn vectors(vs: &[Vec<String>]) -> String {
    if vs.is_empty() {
        return "{}".into();
    }
    vs.iter()
        .map(|v| format!("({})", v.join(", ")))
        .collect::<Vec<_>>()
        .join(" ")
}

macro_rules! row {
    ($out:expr, $label:expr, $($arg:tt)*) => {
        let _ = writeln!($out, "  {:<30} {}", $label, format!($($arg)*));
    };
}

pub fn render(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NETWORK");
    row!(out, "species", "{} ({})", r.network.n, r.network.species.join(", "));
    row!(out, "complexes", "{}", r.network.m);
    row!(out, "reactions", "{}", r.network.reactions);
    for (i, label) in r.network.reaction_list.iter().enumerate() {
        row!(out, format!("  r{}", i + 1), "{label}");
    }
    row!(out, "classical kinetics", "{}", yes(r.network.classical));

    let _ = writeln!(out, "GRAPH");
    row!(out, "linkage classes l", "{}", r.graph.l);
    row!(out, "terminal classes t", "{}", r.graph.t);
    row!(out, "weakly reversible", "{}", yes(r.graph.weakly_reversible));

    let _ = writeln!(out, "SUBSPACES");
    row!(out, "dim S", "{}", r.subspaces.s);
    row!(out, "dim S~", "{}", r.subspaces.s_tilde);
    row!(out, "basis of S", "{}", vectors(&r.subspaces.stoichiometric_basis));
    row!(out, "basis of S~", "{}", vectors(&r.subspaces.kinetic_order_basis));
    row!(out, "basis of S-perp", "{}", vectors(&r.subspaces.conservation_basis));
    row!(out, "basis of S~-perp", "{}", vectors(&r.subspaces.kinetic_conservation_basis));

    let _ = writeln!(out, "DEFICIENCY");
    row!(out, "delta", "{}", r.deficiency.delta);
    row!(out, "kinetic delta", "{}", r.deficiency.delta_tilde);
    row!(
        out,
        "method",
        "{}",
        match r.deficiency.method {
            gmak::DeficiencyMethod::Structural => "m - l - s",
            gmak::DeficiencyMethod::Direct => "dim(ker Y n im A)",
        }
    );

    let _ = writeln!(out, "SIGN CONDITIONS");
    row!(out, "sign(S) = sign(S~)", "{}", yes(r.signs.sign_sets_equal));
    row!(
        out,
        "conservative",
        "{}{}",
        yes(r.signs.conservative),
        r.signs
            .conservation_witness
            .as_ref()
            .map(|w| format!(" ({})", w.join(", ")))
            .unwrap_or_default()
    );
    row!(
        out,
        "sign(S) n sign(S~-perp) = {0}",
        "{}{}",
        yes(r.signs.uniqueness),
        r.signs
            .uniqueness_witness
            .as_ref()
            .map(|w| format!(" (witness {w})"))
            .unwrap_or_default()
    );
    row!(out, "face lattice condition", "{}", yes(r.signs.surjectivity_hypothesis));

    let _ = writeln!(out, "VERDICT");
    row!(out, "unique equilibrium per class", "{}", yes(r.verdict.genthm_applies));
    out
}

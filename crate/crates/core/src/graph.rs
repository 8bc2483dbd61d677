//! Linkage classes, strong linkage classes and terminal classes of the complex
//! graph, and positive circulations on weakly reversible networks.

use std::collections::VecDeque;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::network::GeneralizedNetwork;

/// Partitions of the complexes induced by the reaction digraph.
///
/// Every class lists complex ids in increasing order and the classes of each
/// partition are sorted by their smallest member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkageDecomposition {
    pub linkage_classes: Vec<Vec<usize>>,
    pub strong_linkage_classes: Vec<Vec<usize>>,
    /// Indices into `strong_linkage_classes` of the terminal classes.
    pub terminal: Vec<usize>,
    /// Linkage class of each complex.
    pub linkage_of: Vec<usize>,
    /// Strong linkage class of each complex.
    pub strong_of: Vec<usize>,
    pub weakly_reversible: bool,
}

impl LinkageDecomposition {
    /// Number of linkage classes `l`.
    pub fn l(&self) -> usize {
        self.linkage_classes.len()
    }

    /// Number of terminal strong linkage classes `t`.
    pub fn t(&self) -> usize {
        self.terminal.len()
    }

    pub fn terminal_classes(&self) -> Vec<&[usize]> {
        self.terminal
            .iter()
            .map(|&i| self.strong_linkage_classes[i].as_slice())
            .collect()
    }
}

fn complex_graph(net: &GeneralizedNetwork) -> DiGraph<(), usize> {
    let mut g = DiGraph::with_capacity(net.complex_count(), net.reaction_count());
    for _ in 0..net.complex_count() {
        g.add_node(());
    }
    for (i, r) in net.reactions().iter().enumerate() {
        g.add_edge(NodeIndex::new(r.source), NodeIndex::new(r.target), i);
    }
    g
}

/// Groups `labels` (one per complex) into sorted classes and relabels them
/// so classes are ordered by smallest member.
fn normalize(labels: &[usize]) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut remap = std::collections::HashMap::new();
    let mut of = vec![0; labels.len()];
    for (node, &label) in labels.iter().enumerate() {
        let id = *remap.entry(label).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[id].push(node);
        of[node] = id;
    }
    (classes, of)
}

pub fn decompose(net: &GeneralizedNetwork) -> LinkageDecomposition {
    let m = net.complex_count();
    let g = complex_graph(net);

    let mut uf = UnionFind::new(m);
    for r in net.reactions() {
        uf.union(r.source, r.target);
    }
    let roots: Vec<usize> = (0..m).map(|i| uf.find(i)).collect();
    let (linkage_classes, linkage_of) = normalize(&roots);

    let mut scc_label = vec![0; m];
    for (id, comp) in tarjan_scc(&g).into_iter().enumerate() {
        for node in comp {
            scc_label[node.index()] = id;
        }
    }
    let (strong_linkage_classes, strong_of) = normalize(&scc_label);

    let mut has_exit = vec![false; strong_linkage_classes.len()];
    for r in net.reactions() {
        if strong_of[r.source] != strong_of[r.target] {
            has_exit[strong_of[r.source]] = true;
        }
    }
    let terminal: Vec<usize> = (0..strong_linkage_classes.len())
        .filter(|&i| !has_exit[i])
        .collect();
    let weakly_reversible = strong_linkage_classes.len() == linkage_classes.len();

    LinkageDecomposition {
        linkage_classes,
        strong_linkage_classes,
        terminal,
        linkage_of,
        strong_of,
        weakly_reversible,
    }
}

/// Positive integer rates `k` with `Σ k_{y→y'} (ω_{y'} − ω_y) = 0`.
///
/// Each reaction `y → y'` not yet on a chosen cycle is closed into a directed
/// cycle by a shortest path `y' ⇝ y`; `k` counts how many of these cycles use
/// each reaction.
pub fn circulation_rates(net: &GeneralizedNetwork) -> Result<Vec<u64>> {
    let m = net.complex_count();
    let mut out_edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
    for (i, r) in net.reactions().iter().enumerate() {
        out_edges[r.source].push((r.target, i));
    }
    let mut counts = vec![0u64; net.reaction_count()];
    for (i, r) in net.reactions().iter().enumerate() {
        if counts[i] > 0 {
            continue;
        }
        let path = shortest_path(&out_edges, r.target, r.source).ok_or(Error::NotWeaklyReversible)?;
        counts[i] += 1;
        for edge in path {
            counts[edge] += 1;
        }
    }
    Ok(counts)
}

/// Reaction ids along a BFS shortest path `from ⇝ to`.
fn shortest_path(out_edges: &[Vec<(usize, usize)>], from: usize, to: usize) -> Option<Vec<usize>> {
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; out_edges.len()];
    let mut seen = vec![false; out_edges.len()];
    let mut queue = VecDeque::from([from]);
    seen[from] = true;
    while let Some(node) = queue.pop_front() {
        if node == to {
            let mut path = Vec::new();
            let mut cur = to;
            while let Some((prev, edge)) = parent[cur] {
                path.push(edge);
                cur = prev;
            }
            path.reverse();
            return Some(path);
        }
        for &(next, edge) in &out_edges[node] {
            if !seen[next] {
                seen[next] = true;
                parent[next] = Some((node, edge));
                queue.push_back(next);
            }
        }
    }
    None
}

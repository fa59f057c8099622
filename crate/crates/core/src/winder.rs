//! Winder desirability (`≤_W`) and existential (`≺_W`) relations, strong
//! acyclicity, and an exploratory extension probe.

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use rayon::prelude::*;
use serde::Serialize;

use crate::complex::SimplicialComplex;
use crate::error::{Error, Result};
use crate::order::{qp_axiom_report, QPOrder};
use crate::subset::{full_mask, same_n, Subset};
use crate::ternary::TernaryIndex;

/// Largest `n` for pairwise Winder queries.
pub const MAX_WINDER_ATOMS: usize = 12;
/// Largest `n` for building the full `≺_W` digraph.
pub const MAX_DIGRAPH_ATOMS: usize = 10;

fn check_n(n: usize, limit: usize, what: &'static str) -> Result<()> {
    if n > limit {
        return Err(Error::TooLarge { n, limit, what });
    }
    Ok(())
}

/// Is there `Z ⊆ [n] ∖ (P ∪ Q)` with `P ∪ Z ∈ Δ` and `Q ∪ Z ∉ Δ`?
/// `P` and `Q` are disjoint.
fn separated(complex: &SimplicialComplex, p: u64, q: u64) -> bool {
    let n = complex.n();
    let rest = full_mask(n) & !p & !q;
    let mut z = 0u64;
    loop {
        let pz = Subset::from_bits_unchecked(n, p | z);
        let qz = Subset::from_bits_unchecked(n, q | z);
        if complex.contains(&pz) && !complex.contains(&qz) {
            return true;
        }
        if z == rest {
            return false;
        }
        z = z.wrapping_sub(rest) & rest;
    }
}

/// `A ≤_W B`: for every `Z` avoiding `A Δ B`, `(A∖B) ∪ Z ∉ Δ` implies
/// `(B∖A) ∪ Z ∉ Δ`.
pub fn winder_leq(complex: &SimplicialComplex, a: &Subset, b: &Subset) -> Result<bool> {
    same_n(a, b)?;
    check_n(complex.n(), MAX_WINDER_ATOMS, "Winder relations")?;
    if a.n() != complex.n() {
        return Err(Error::DimensionMismatch { left: complex.n(), right: a.n() });
    }
    let p = a.bits() & !b.bits();
    let q = b.bits() & !a.bits();
    Ok(!separated(complex, q, p))
}

/// `A ≺_W B`: not `B ≤_W A`.
pub fn winder_prec(complex: &SimplicialComplex, a: &Subset, b: &Subset) -> Result<bool> {
    Ok(!winder_leq(complex, b, a)?)
}

/// `≺_W` on disjoint pairs, indexed by the base-3 index of `χ(Q, P)`:
/// entry set iff `P ≺_W Q` for `P = A∖B`, `Q = B∖A`.
struct PairRelation {
    index: TernaryIndex,
    prec: Vec<bool>,
}

impl PairRelation {
    fn build(complex: &SimplicialComplex) -> Self {
        let index = TernaryIndex::new(complex.n());
        let prec: Vec<bool> = (0..index.size)
            .into_par_iter()
            .map(|k| {
                let x = index.vector(k);
                // x = χ(Q, P): positive part Q, negative part P.
                separated(complex, x.neg_mask(), x.pos_mask())
            })
            .collect();
        PairRelation { index, prec }
    }

    fn prec(&self, a: u64, b: u64) -> bool {
        self.prec[self.index.index_of_masks(b & !a, a & !b)]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Acyclicity {
    Acyclic,
    /// `cycle[0] ≺_W cycle[1] ≺_W … ≺_W cycle[0]`, shortest within the
    /// first nontrivial strongly connected component.
    Cycle { cycle: Vec<Subset> },
}

/// Decides whether `≺_W` has a directed cycle on `2^[n]`.
pub fn is_strongly_acyclic(complex: &SimplicialComplex) -> Result<Acyclicity> {
    let n = complex.n();
    check_n(n, MAX_DIGRAPH_ATOMS, "the Winder digraph")?;
    let rel = PairRelation::build(complex);
    let size = 1usize << n;
    let edges: Vec<(u32, u32)> = (0..size as u64)
        .into_par_iter()
        .flat_map_iter(|a| {
            let rel = &rel;
            (0..size as u64).filter(move |&b| rel.prec(a, b)).map(move |b| (a as u32, b as u32))
        })
        .collect();
    let mut graph: DiGraph<(), ()> = DiGraph::with_capacity(size, edges.len());
    for _ in 0..size {
        graph.add_node(());
    }
    graph.extend_with_edges(edges.iter().copied());
    let mut components: Vec<Vec<NodeIndex>> = tarjan_scc(&graph).into_iter().filter(|c| c.len() > 1).collect();
    if components.is_empty() {
        return Ok(Acyclicity::Acyclic);
    }
    for c in components.iter_mut() {
        c.sort();
    }
    components.sort();
    let component = &components[0];
    let cycle = shortest_cycle(&graph, component);
    Ok(Acyclicity::Cycle {
        cycle: cycle.into_iter().map(|v| Subset::from_bits_unchecked(n, v.index() as u64)).collect(),
    })
}

/// Shortest cycle through any vertex of a strongly connected component,
/// by breadth-first search from each vertex inside the component.
fn shortest_cycle(graph: &DiGraph<(), ()>, component: &[NodeIndex]) -> Vec<NodeIndex> {
    let inside: std::collections::HashSet<NodeIndex> = component.iter().copied().collect();
    let mut best: Option<Vec<NodeIndex>> = None;
    for &start in component {
        let mut parent: std::collections::HashMap<NodeIndex, NodeIndex> = Default::default();
        let mut queue = std::collections::VecDeque::from([start]);
        let mut found = None;
        'bfs: while let Some(v) = queue.pop_front() {
            let mut next: Vec<NodeIndex> = graph.neighbors(v).filter(|w| inside.contains(w)).collect();
            next.sort();
            for w in next {
                if w == start {
                    found = Some(v);
                    break 'bfs;
                }
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(w) {
                    e.insert(v);
                    queue.push_back(w);
                }
            }
        }
        let Some(mut last) = found else { continue };
        let mut path = vec![last];
        while last != start {
            last = parent[&last];
            path.push(last);
        }
        path.reverse();
        if best.as_ref().is_none_or(|b| path.len() < b.len()) {
            best = Some(path);
        }
        if best.as_ref().map(Vec::len) == Some(2) {
            break;
        }
    }
    best.expect("a nontrivial strongly connected component has a cycle")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtensionProbe {
    pub strongly_acyclic: bool,
    /// Whether layering the `≺_W` digraph produced a valid order that has
    /// the complex as an initial segment.
    pub extended: bool,
    pub detail: String,
    /// Number of layers of the candidate order, if one was built.
    pub layers: Option<usize>,
}

/// Exploratory: for a strongly acyclic complex, groups `2^[n]` into layers
/// by longest `≺_W` path from the sources, reads the layers as a ranking,
/// and reports whether that ranking is a qualitative probability order
/// with the complex as an initial segment. Failure proves nothing.
pub fn probe_extension(complex: &SimplicialComplex) -> Result<ExtensionProbe> {
    let n = complex.n();
    check_n(n, MAX_DIGRAPH_ATOMS, "the Winder digraph")?;
    if let Acyclicity::Cycle { cycle } = is_strongly_acyclic(complex)? {
        return Ok(ExtensionProbe {
            strongly_acyclic: false,
            extended: false,
            detail: format!("≺_W has a cycle of length {}", cycle.len()),
            layers: None,
        });
    }
    let rel = PairRelation::build(complex);
    let size = 1usize << n;
    let mut indegree = vec![0usize; size];
    let mut succ: Vec<Vec<u32>> = vec![Vec::new(); size];
    for a in 0..size as u64 {
        for b in 0..size as u64 {
            if rel.prec(a, b) {
                succ[a as usize].push(b as u32);
                indegree[b as usize] += 1;
            }
        }
    }
    let mut level = vec![0usize; size];
    let mut ready: Vec<usize> = (0..size).filter(|&v| indegree[v] == 0).collect();
    while let Some(v) = ready.pop() {
        for &w in &succ[v] {
            let w = w as usize;
            level[w] = level[w].max(level[v] + 1);
            indegree[w] -= 1;
            if indegree[w] == 0 {
                ready.push(w);
            }
        }
    }
    let depth = level.iter().copied().max().unwrap_or(0) + 1;
    let mut classes: Vec<Vec<Subset>> = vec![Vec::new(); depth];
    for (v, &l) in level.iter().enumerate() {
        classes[l].push(Subset::from_bits_unchecked(n, v as u64));
    }
    let order = QPOrder::from_classes(n, classes)?;
    let report = qp_axiom_report(&order)?;
    if !report.holds() {
        return Ok(ExtensionProbe {
            strongly_acyclic: true,
            extended: false,
            detail: "layered ranking fails the order axioms".into(),
            layers: Some(depth),
        });
    }
    // The complex must be a union of the lowest classes.
    let segment = complex.faces().map(|f| order.rank_of(&f)).max();
    let cut = complex.nonfaces().map(|f| order.rank_of(&f)).min();
    let is_segment = match (segment, cut) {
        (Some(top), Some(bottom)) => top < bottom,
        _ => true,
    };
    Ok(ExtensionProbe {
        strongly_acyclic: true,
        extended: is_segment,
        detail: if is_segment {
            "layered ranking is a valid order with the complex as an initial segment".into()
        } else {
            "layered ranking is a valid order but the complex is not an initial segment of it".into()
        },
        layers: Some(depth),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: usize, atoms: &[u64]) -> Subset {
        Subset::from_atoms(n, atoms.iter().copied()).unwrap()
    }

    #[test]
    fn reflexive_and_symmetric_cases() {
        let c = SimplicialComplex::from_predicate(3, |x| x.len() <= 1).unwrap();
        let a = s(3, &[1, 2]);
        assert!(winder_leq(&c, &a, &a).unwrap());
        assert!(!winder_prec(&c, &a, &a).unwrap());
        assert!(winder_leq(&c, &s(3, &[2]), &s(3, &[1])).unwrap());
        assert!(winder_leq(&c, &s(3, &[1]), &s(3, &[2])).unwrap());
    }

    #[test]
    fn face_precedes_nonface() {
        let c = SimplicialComplex::from_generators(4, &[s(4, &[1, 2]), s(4, &[3])]).unwrap();
        assert!(winder_prec(&c, &s(4, &[1, 2]), &s(4, &[4])).unwrap());
    }

    #[test]
    fn full_simplex_is_acyclic() {
        let c = SimplicialComplex::full(3).unwrap();
        assert_eq!(is_strongly_acyclic(&c).unwrap(), Acyclicity::Acyclic);
        let probe = probe_extension(&c).unwrap();
        assert!(probe.strongly_acyclic);
    }

    #[test]
    fn disjoint_edges_have_a_two_cycle() {
        // {1,2} ≺_W {1,3} via Z = {1}... and back via the other edge.
        let c = SimplicialComplex::from_generators(4, &[s(4, &[1, 2]), s(4, &[3, 4])]).unwrap();
        match is_strongly_acyclic(&c).unwrap() {
            Acyclicity::Cycle { cycle } => {
                assert_eq!(cycle.len(), 2);
                let (a, b) = (cycle[0], cycle[1]);
                assert!(winder_prec(&c, &a, &b).unwrap() && winder_prec(&c, &b, &a).unwrap());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn size_guard() {
        let c = SimplicialComplex::full(11).unwrap();
        assert!(is_strongly_acyclic(&c).is_err());
    }
}

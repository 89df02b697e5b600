use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bn::{dot_id, Dag};
use crate::error::Result;

/// Parents, children and co-parents of a target node. The three sets are
/// disjoint: a co-parent that is also a parent or child is listed only there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkovBlanket {
    pub target: String,
    pub parents: Vec<String>,
    pub children: Vec<String>,
    pub spouses: Vec<String>,
    /// Edges of the original graph among the target and its blanket.
    pub edges: Vec<(String, String)>,
}

impl MarkovBlanket {
    /// Blanket members in graph node order.
    pub fn members(&self) -> Vec<&str> {
        self.parents.iter().chain(&self.children).chain(&self.spouses).map(String::as_str).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty() && self.children.is_empty() && self.spouses.is_empty()
    }

    pub fn len(&self) -> usize {
        self.parents.len() + self.children.len() + self.spouses.len()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph MarkovBlanket {\n");
        out.push_str(&format!("  {} [peripheries=2];\n", dot_id(&self.target)));
        for m in self.members() {
            out.push_str(&format!("  {};\n", dot_id(m)));
        }
        for (p, c) in &self.edges {
            out.push_str(&format!("  {} -> {};\n", dot_id(p), dot_id(c)));
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn blanket_indices(dag: &Dag, t: usize) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let parents = dag.parents(t).to_vec();
    let children = dag.children(t).to_vec();
    let spouses: BTreeSet<usize> = children
        .iter()
        .flat_map(|&c| dag.parents(c).iter().copied())
        .filter(|&p| p != t && !parents.contains(&p) && !children.contains(&p))
        .collect();
    (parents, children, spouses.into_iter().collect())
}

pub fn markov_blanket(dag: &Dag, target: &str) -> Result<MarkovBlanket> {
    let t = dag.index_of(target)?;
    let (parents, children, spouses) = blanket_indices(dag, t);
    let mut keep: BTreeSet<usize> = parents.iter().chain(&children).chain(&spouses).copied().collect();
    keep.insert(t);
    let name = |v: &usize| dag.name(*v).to_string();
    Ok(MarkovBlanket {
        target: target.to_string(),
        parents: parents.iter().map(name).collect(),
        children: children.iter().map(name).collect(),
        spouses: spouses.iter().map(name).collect(),
        edges: induced_edges(dag, &keep),
    })
}

/// Nodes within `depth` blanket hops of `target`, target included. Depth 1
/// is the blanket itself; depth 2 adds the blankets of its members.
pub fn blanket_closure(dag: &Dag, target: &str, depth: usize) -> Result<BTreeSet<usize>> {
    let t = dag.index_of(target)?;
    let mut set = BTreeSet::from([t]);
    let mut frontier = vec![t];
    for _ in 0..depth {
        let mut next = Vec::new();
        for v in frontier {
            let (p, c, s) = blanket_indices(dag, v);
            for m in p.into_iter().chain(c).chain(s) {
                if set.insert(m) {
                    next.push(m);
                }
            }
        }
        frontier = next;
    }
    Ok(set)
}

pub(crate) fn induced_edges(dag: &Dag, keep: &BTreeSet<usize>) -> Vec<(String, String)> {
    dag.edges()
        .into_iter()
        .filter(|(p, c)| keep.contains(p) && keep.contains(c))
        .map(|(p, c)| (dag.name(p).to_string(), dag.name(c).to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: &[&str]) -> Vec<String> {
        n.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn isolated_target() {
        let d = Dag::from_named_edges(names(&["A", "B", "T"]), &[("A", "B")]).unwrap();
        let mb = markov_blanket(&d, "T").unwrap();
        assert!(mb.is_empty());
        assert!(mb.edges.is_empty());
    }

    #[test]
    fn v_structure() {
        let d = Dag::from_named_edges(names(&["X1", "X2", "Y"]), &[("X1", "Y"), ("X2", "Y")]).unwrap();
        let y = markov_blanket(&d, "Y").unwrap();
        assert_eq!(y.parents, names(&["X1", "X2"]));
        assert!(y.children.is_empty() && y.spouses.is_empty());
        let x1 = markov_blanket(&d, "X1").unwrap();
        assert_eq!(x1.children, names(&["Y"]));
        assert_eq!(x1.spouses, names(&["X2"]));
        assert_eq!(x1.edges.len(), 2);
    }

    #[test]
    fn chain_and_closure() {
        let d = Dag::from_named_edges(names(&["A", "B", "C", "D"]), &[("A", "B"), ("B", "C"), ("C", "D")]).unwrap();
        let b = markov_blanket(&d, "B").unwrap();
        assert_eq!(b.members(), vec!["A", "C"]);
        assert_eq!(b.edges, vec![("A".into(), "B".into()), ("B".into(), "C".into())]);
        assert_eq!(blanket_closure(&d, "B", 1).unwrap(), BTreeSet::from([0, 1, 2]));
        assert_eq!(blanket_closure(&d, "B", 2).unwrap(), BTreeSet::from([0, 1, 2, 3]));
        assert!(markov_blanket(&d, "Z").is_err());
    }

    #[test]
    fn spouse_that_is_also_a_parent_is_listed_once() {
        // A -> T, A -> C, T -> C: A is a parent and a co-parent of C
        let d = Dag::from_named_edges(names(&["A", "T", "C"]), &[("A", "T"), ("A", "C"), ("T", "C")]).unwrap();
        let mb = markov_blanket(&d, "T").unwrap();
        assert_eq!(mb.parents, names(&["A"]));
        assert_eq!(mb.children, names(&["C"]));
        assert!(mb.spouses.is_empty());
        assert!(mb.to_dot().contains("\"T\" [peripheries=2];"));
    }
}

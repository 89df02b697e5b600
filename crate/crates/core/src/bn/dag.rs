use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Directed acyclic graph over named variables. Parent and child lists are
/// kept sorted by node index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dag {
    nodes: Vec<String>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct DagDocument {
    nodes: Vec<String>,
    edges: Vec<(String, String)>,
}

impl Dag {
    pub fn empty(nodes: Vec<String>) -> Self {
        let n = nodes.len();
        Self { nodes, parents: vec![Vec::new(); n], children: vec![Vec::new(); n] }
    }

    pub fn from_edges(nodes: Vec<String>, edges: &[(usize, usize)]) -> Result<Self> {
        let mut dag = Self::empty(nodes);
        for &(p, c) in edges {
            dag.add_edge(p, c)?;
        }
        Ok(dag)
    }

    pub fn from_named_edges(nodes: Vec<String>, edges: &[(&str, &str)]) -> Result<Self> {
        let mut dag = Self::empty(nodes);
        for (p, c) in edges {
            let (p, c) = (dag.index_of(p)?, dag.index_of(c)?);
            dag.add_edge(p, c)?;
        }
        Ok(dag)
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.nodes[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.nodes.iter().position(|n| n == name).ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn parents(&self, i: usize) -> &[usize] {
        &self.parents[i]
    }

    pub fn children(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn has_edge(&self, parent: usize, child: usize) -> bool {
        self.parents[child].binary_search(&parent).is_ok()
    }

    /// Edges sorted by (parent, child).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> =
            (0..self.len()).flat_map(|p| self.children[p].iter().map(move |&c| (p, c))).collect();
        e.sort_unstable();
        e
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    /// True if a directed path `from ~> to` exists, optionally ignoring one edge.
    pub fn reaches(&self, from: usize, to: usize, skip: Option<(usize, usize)>) -> bool {
        if from == to {
            return true;
        }
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([from]);
        seen[from] = true;
        while let Some(u) = queue.pop_front() {
            for &w in &self.children[u] {
                if skip == Some((u, w)) || seen[w] {
                    continue;
                }
                if w == to {
                    return true;
                }
                seen[w] = true;
                queue.push_back(w);
            }
        }
        false
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::InvalidGraph(format!("node index {i} out of range")));
        }
        Ok(())
    }

    pub fn add_edge(&mut self, parent: usize, child: usize) -> Result<()> {
        self.check_index(parent)?;
        self.check_index(child)?;
        if parent == child {
            return Err(Error::InvalidGraph(format!("self-loop on `{}`", self.nodes[parent])));
        }
        if self.has_edge(parent, child) {
            return Err(Error::InvalidGraph(format!("duplicate edge {} -> {}", self.nodes[parent], self.nodes[child])));
        }
        if self.reaches(child, parent, None) {
            return Err(Error::InvalidGraph(format!(
                "edge {} -> {} closes a cycle",
                self.nodes[parent], self.nodes[child]
            )));
        }
        insert_sorted(&mut self.parents[child], parent);
        insert_sorted(&mut self.children[parent], child);
        debug_assert!(self.is_acyclic());
        Ok(())
    }

    pub fn remove_edge(&mut self, parent: usize, child: usize) -> Result<()> {
        self.check_index(parent)?;
        self.check_index(child)?;
        match self.parents[child].binary_search(&parent) {
            Ok(pos) => {
                self.parents[child].remove(pos);
                let cpos = self.children[parent].binary_search(&child).expect("adjacency in sync");
                self.children[parent].remove(cpos);
                Ok(())
            }
            Err(_) => Err(Error::InvalidGraph(format!("no edge {} -> {}", self.nodes[parent], self.nodes[child]))),
        }
    }

    /// Turns `parent -> child` into `child -> parent`.
    pub fn reverse_edge(&mut self, parent: usize, child: usize) -> Result<()> {
        if !self.has_edge(parent, child) {
            return Err(Error::InvalidGraph(format!(
                "no edge {} -> {}",
                self.nodes.get(parent).map_or("?", String::as_str),
                self.nodes.get(child).map_or("?", String::as_str)
            )));
        }
        if self.reaches(parent, child, Some((parent, child))) {
            return Err(Error::InvalidGraph("reversal closes a cycle".into()));
        }
        self.remove_edge(parent, child)?;
        self.add_edge(child, parent)
    }

    /// Kahn's algorithm; ties go to the lowest index.
    pub fn topological_order(&self) -> Vec<usize> {
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: std::collections::BTreeSet<usize> = (0..self.len()).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(self.len());
        while let Some(u) = ready.pop_first() {
            order.push(u);
            for &c in &self.children[u] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        order
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().len() == self.len()
    }

    pub fn to_json(&self) -> String {
        let doc = DagDocument {
            nodes: self.nodes.clone(),
            edges: self.edges().into_iter().map(|(p, c)| (self.nodes[p].clone(), self.nodes[c].clone())).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("dag serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DagDocument = serde_json::from_str(text)?;
        let edges: Vec<(&str, &str)> = doc.edges.iter().map(|(p, c)| (p.as_str(), c.as_str())).collect();
        Self::from_named_edges(doc.nodes.clone(), &edges)
    }

    /// Plain DOT: nodes and directed edges.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph G {\n");
        for n in &self.nodes {
            out.push_str(&format!("  {};\n", dot_id(n)));
        }
        for (p, c) in self.edges() {
            out.push_str(&format!("  {} -> {};\n", dot_id(&self.nodes[p]), dot_id(&self.nodes[c])));
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn dot_id(name: &str) -> String {
    format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
}

fn insert_sorted(v: &mut Vec<usize>, x: usize) {
    let pos = v.binary_search(&x).unwrap_or_else(|p| p);
    v.insert(pos, x);
}

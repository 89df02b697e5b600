use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::score::family_counts;
use super::Dag;
use crate::discretizer::DiscreteDataset;
use crate::error::{Error, Result};

pub const DEFAULT_ALPHA: f64 = 1.0;

/// `P(child | parents)`. Row `j` enumerates parent assignments row-major
/// (first parent most significant); each row holds one distribution over
/// the child alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct Cpt {
    pub child: usize,
    pub parents: Vec<usize>,
    pub cardinality: usize,
    pub table: Vec<f64>,
}

impl Cpt {
    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.table.chunks(self.cardinality)
    }

    pub fn row(&self, config: usize) -> &[f64] {
        &self.table[config * self.cardinality..(config + 1) * self.cardinality]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BayesianNetwork {
    dag: Dag,
    alphabets: Vec<Vec<String>>,
    cpts: Vec<Cpt>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct NodeDocument {
    pub name: String,
    pub states: Vec<String>,
    pub parents: Vec<String>,
    pub cpt: Vec<Vec<f64>>,
}

/// Structured-text form: nodes in order with states, parents and CPT rows,
/// plus the edge list.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct NetworkDocument {
    pub nodes: Vec<NodeDocument>,
    pub edges: Vec<(String, String)>,
}

impl BayesianNetwork {
    pub const ROW_TOLERANCE: f64 = 1e-9;

    pub fn new(dag: Dag, alphabets: Vec<Vec<String>>, cpts: Vec<Cpt>) -> Result<Self> {
        if alphabets.len() != dag.len() || cpts.len() != dag.len() {
            return Err(Error::InvalidGraph("one alphabet and one CPT per node required".into()));
        }
        for (i, cpt) in cpts.iter().enumerate() {
            if cpt.child != i || cpt.parents != dag.parents(i) {
                return Err(Error::InvalidGraph(format!("CPT of `{}` disagrees with the graph", dag.name(i))));
            }
            if cpt.cardinality != alphabets[i].len() || cpt.cardinality == 0 {
                return Err(Error::InvalidGraph(format!("CPT of `{}` has the wrong width", dag.name(i))));
            }
            let q: usize = cpt.parents.iter().map(|&p| alphabets[p].len()).product();
            if cpt.table.len() != q * cpt.cardinality {
                return Err(Error::InvalidGraph(format!("CPT of `{}` has the wrong row count", dag.name(i))));
            }
            for row in cpt.rows() {
                let s: f64 = row.iter().sum();
                if row.iter().any(|p| !p.is_finite() || *p < 0.0) || (s - 1.0).abs() > Self::ROW_TOLERANCE {
                    return Err(Error::InvalidGraph(format!("CPT row of `{}` is not a distribution", dag.name(i))));
                }
            }
        }
        Ok(Self { dag, alphabets, cpts })
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn alphabets(&self) -> &[Vec<String>] {
        &self.alphabets
    }

    pub fn alphabet(&self, var: usize) -> &[String] {
        &self.alphabets[var]
    }

    pub fn cardinality(&self, var: usize) -> usize {
        self.alphabets[var].len()
    }

    pub fn cpt(&self, var: usize) -> &Cpt {
        &self.cpts[var]
    }

    pub fn cpts(&self) -> &[Cpt] {
        &self.cpts
    }

    pub fn len(&self) -> usize {
        self.dag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dag.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.dag.index_of(name)
    }

    /// Parent configuration index of a full assignment.
    pub fn config_of(&self, var: usize, assignment: &[usize]) -> usize {
        self.cpts[var].parents.iter().fold(0, |acc, &p| acc * self.alphabets[p].len() + assignment[p])
    }

    /// Forward (ancestral) sampling into a dataset with the same alphabets.
    pub fn sample(&self, n_rows: usize, seed: u64) -> Result<DiscreteDataset> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let order = self.dag.topological_order();
        let mut columns = vec![Vec::with_capacity(n_rows); self.len()];
        let mut assignment = vec![0usize; self.len()];
        for _ in 0..n_rows {
            for &v in &order {
                let row = self.cpts[v].row(self.config_of(v, &assignment));
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut pick = row.len() - 1;
                for (k, p) in row.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        pick = k;
                        break;
                    }
                }
                assignment[v] = pick;
                columns[v].push(pick);
            }
        }
        DiscreteDataset::new(self.dag.nodes().to_vec(), self.alphabets.clone(), columns, None)
    }

    pub fn to_document(&self) -> NetworkDocument {
        let nodes = (0..self.len())
            .map(|i| NodeDocument {
                name: self.dag.name(i).to_string(),
                states: self.alphabets[i].clone(),
                parents: self.cpts[i].parents.iter().map(|&p| self.dag.name(p).to_string()).collect(),
                cpt: self.cpts[i].rows().map(<[f64]>::to_vec).collect(),
            })
            .collect();
        let edges = self
            .dag
            .edges()
            .into_iter()
            .map(|(p, c)| (self.dag.name(p).to_string(), self.dag.name(c).to_string()))
            .collect();
        NetworkDocument { nodes, edges }
    }

    pub fn from_document(doc: &NetworkDocument) -> Result<Self> {
        let names: Vec<String> = doc.nodes.iter().map(|n| n.name.clone()).collect();
        let mut dag = Dag::empty(names);
        for node in &doc.nodes {
            let c = dag.index_of(&node.name)?;
            for p in &node.parents {
                let p = dag.index_of(p)?;
                dag.add_edge(p, c)?;
            }
        }
        let alphabets: Vec<Vec<String>> = doc.nodes.iter().map(|n| n.states.clone()).collect();
        let mut cpts = Vec::with_capacity(doc.nodes.len());
        for (i, node) in doc.nodes.iter().enumerate() {
            let declared: Vec<usize> = node.parents.iter().map(|p| dag.index_of(p)).collect::<Result<_>>()?;
            if declared != dag.parents(i) {
                return Err(Error::InvalidGraph(format!("parents of `{}` must be listed in node order", node.name)));
            }
            cpts.push(Cpt {
                child: i,
                parents: declared,
                cardinality: node.states.len(),
                table: node.cpt.iter().flatten().copied().collect(),
            });
        }
        Self::new(dag, alphabets, cpts)
    }
}

/// Estimates every CPT as `(count + alpha) / (row total + alpha * r)`.
/// Unobserved parent configurations get a uniform row.
pub fn fit_parameters(data: &DiscreteDataset, dag: &Dag, alpha: f64) -> Result<BayesianNetwork> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::Config(format!("alpha must be non-negative, got {alpha}")));
    }
    if dag.nodes() != data.names() {
        return Err(Error::Schema("graph and dataset variables differ".into()));
    }
    let mut cpts = Vec::with_capacity(dag.len());
    for child in 0..dag.len() {
        let parents = dag.parents(child).to_vec();
        let r = data.cardinality(child);
        let q: usize = parents.iter().map(|&p| data.cardinality(p)).product();
        let uniform = 1.0 / r as f64;
        let mut table = vec![uniform; q * r];
        let counts = family_counts(data, child, &parents);
        counts.for_each_row(|j, row| {
            let total: f64 = row.iter().map(|&c| f64::from(c)).sum();
            let denom = total + alpha * r as f64;
            for (k, &c) in row.iter().enumerate() {
                table[j * r + k] = (f64::from(c) + alpha) / denom;
            }
        });
        cpts.push(Cpt { child, parents, cardinality: r, table });
    }
    BayesianNetwork::new(dag.clone(), data.alphabets().to_vec(), cpts)
}

//! Full joint enumeration. Exponential; for checking the eliminator on small
//! networks.

use super::Factor;
use crate::bn::BayesianNetwork;
use crate::error::{Error, Result};

pub const MAX_JOINT_CELLS: u128 = 1_000_000;

/// Joint table over all variables in node order, each cell the product of
/// the CPT entries it selects.
pub fn brute_force_joint(bn: &BayesianNetwork) -> Result<Factor> {
    let cards: Vec<usize> = (0..bn.len()).map(|v| bn.cardinality(v)).collect();
    let cells = cards.iter().map(|&c| c as u128).product::<u128>();
    if cells > MAX_JOINT_CELLS {
        return Err(Error::JointTooLarge(cells));
    }
    let size = cells as usize;
    let mut values = Vec::with_capacity(size);
    let mut assignment = vec![0usize; bn.len()];
    for _ in 0..size {
        let p: f64 = (0..bn.len()).map(|v| bn.cpt(v).row(bn.config_of(v, &assignment))[assignment[v]]).product();
        values.push(p);
        for d in (0..assignment.len()).rev() {
            assignment[d] += 1;
            if assignment[d] < cards[d] {
                break;
            }
            assignment[d] = 0;
        }
    }
    Ok(Factor { scope: (0..bn.len()).collect(), cards, values })
}

/// `P(query | evidence)` read straight off a full joint table by summing
/// the consistent cells.
pub fn conditional_from_joint(joint: &Factor, query: usize, evidence: &[(usize, usize)]) -> Result<Vec<f64>> {
    let qpos =
        joint.scope.iter().position(|&v| v == query).ok_or_else(|| Error::UnknownVariable(format!("#{query}")))?;
    let mut out = vec![0.0; joint.cards[qpos]];
    let mut assignment = vec![0usize; joint.scope.len()];
    for &value in &joint.values {
        let consistent =
            evidence.iter().all(|&(v, c)| joint.scope.iter().position(|&s| s == v).is_some_and(|p| assignment[p] == c));
        if consistent {
            out[assignment[qpos]] += value;
        }
        for d in (0..assignment.len()).rev() {
            assignment[d] += 1;
            if assignment[d] < joint.cards[d] {
                break;
            }
            assignment[d] = 0;
        }
    }
    let total: f64 = out.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::ZeroProbabilityEvidence);
    }
    Ok(out.into_iter().map(|v| v / total).collect())
}

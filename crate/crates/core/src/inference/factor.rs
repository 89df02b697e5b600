use crate::bn::BayesianNetwork;

/// Dense non-negative table over an ordered scope. The last scope variable
/// varies fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub scope: Vec<usize>,
    pub cards: Vec<usize>,
    pub values: Vec<f64>,
}

impl Factor {
    pub fn scalar(v: f64) -> Self {
        Self { scope: Vec::new(), cards: Vec::new(), values: vec![v] }
    }

    /// `P(var | parents)` with scope `parents ++ [var]`; the CPT layout is
    /// already row-major in that order.
    pub fn from_cpt(bn: &BayesianNetwork, var: usize) -> Self {
        let cpt = bn.cpt(var);
        let mut scope = cpt.parents.clone();
        scope.push(var);
        let cards = scope.iter().map(|&v| bn.cardinality(v)).collect();
        Self { scope, cards, values: cpt.table.clone() }
    }

    pub fn contains(&self, var: usize) -> bool {
        self.scope.contains(&var)
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.scope.len()];
        for i in (0..self.scope.len().saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.cards[i + 1];
        }
        s
    }

    pub fn product(&self, other: &Factor) -> Factor {
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        for (i, &v) in other.scope.iter().enumerate() {
            if !scope.contains(&v) {
                scope.push(v);
                cards.push(other.cards[i]);
            }
        }
        let size: usize = cards.iter().product();
        // stride of each result variable inside each operand (0 when absent)
        let sa = self.strides();
        let sb = other.strides();
        let stride_in = |f: &Factor, s: &[usize], v: usize| f.scope.iter().position(|&x| x == v).map_or(0, |i| s[i]);
        let a_str: Vec<usize> = scope.iter().map(|&v| stride_in(self, &sa, v)).collect();
        let b_str: Vec<usize> = scope.iter().map(|&v| stride_in(other, &sb, v)).collect();

        let mut values = Vec::with_capacity(size);
        let mut digits = vec![0usize; scope.len()];
        let (mut ia, mut ib) = (0usize, 0usize);
        for _ in 0..size {
            values.push(self.values[ia] * other.values[ib]);
            // odometer increment, last variable fastest
            for d in (0..scope.len()).rev() {
                digits[d] += 1;
                ia += a_str[d];
                ib += b_str[d];
                if digits[d] < cards[d] {
                    break;
                }
                ia -= a_str[d] * cards[d];
                ib -= b_str[d] * cards[d];
                digits[d] = 0;
            }
        }
        Factor { scope, cards, values }
    }

    /// Sums `var` out. A factor without `var` is returned unchanged.
    pub fn sum_out(&self, var: usize) -> Factor {
        self.collapse(var, None)
    }

    /// Fixes `var = value` and drops it from the scope.
    pub fn reduce(&self, var: usize, value: usize) -> Factor {
        self.collapse(var, Some(value))
    }

    fn collapse(&self, var: usize, keep: Option<usize>) -> Factor {
        let Some(pos) = self.scope.iter().position(|&v| v == var) else {
            return self.clone();
        };
        let card = self.cards[pos];
        let inner: usize = self.cards[pos + 1..].iter().product();
        let outer: usize = self.cards[..pos].iter().product();
        let mut values = vec![0.0; outer * inner];
        for o in 0..outer {
            for k in 0..card {
                if keep.is_some_and(|v| v != k) {
                    continue;
                }
                let src = (o * card + k) * inner;
                for i in 0..inner {
                    values[o * inner + i] += self.values[src + i];
                }
            }
        }
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(pos);
        cards.remove(pos);
        Factor { scope, cards, values }
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Value at a full assignment indexed by variable id.
    pub fn at(&self, assignment: &[usize]) -> f64 {
        let idx = self.scope.iter().zip(&self.cards).fold(0, |acc, (&v, &c)| acc * c + assignment[v]);
        self.values[idx]
    }
}

//! Dense two-phase simplex method with Bland's rule.
//!
//! Small and slow, but exact on the rational backend. Used for simplex
//! intersection checks, max-norm distances and the convex-hull oracle.

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<S: Scalar> {
    Optimal { x: Vec<S>, value: S },
    Infeasible,
    Unbounded,
}

impl<S: Scalar> LpOutcome<S> {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

struct Tableau<S: Scalar> {
    rows: Vec<Vec<S>>,
    rhs: Vec<S>,
    basis: Vec<usize>,
}

impl<S: Scalar> Tableau<S> {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v = v.clone() / p.clone();
        }
        self.rhs[row] = self.rhs[row].clone() / p;
        for r in 0..self.rows.len() {
            if r == row || self.rows[r][col].is_zero() {
                continue;
            }
            let f = self.rows[r][col].clone();
            for c in 0..self.rows[r].len() {
                if self.rows[row][c].is_zero() {
                    continue;
                }
                let sub = f.clone() * self.rows[row][c].clone();
                self.rows[r][c] = self.rows[r][c].clone() - sub;
            }
            let sub = f * self.rhs[row].clone();
            self.rhs[r] = self.rhs[r].clone() - sub;
        }
        self.basis[row] = col;
    }

    fn reduced_cost(&self, cost: &[S], col: usize) -> S {
        let mut r = cost[col].clone();
        for (i, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() && !self.rows[i][col].is_zero() {
                r = r - cost[b].clone() * self.rows[i][col].clone();
            }
        }
        r
    }

    /// Returns `false` if unbounded.
    fn optimize(&mut self, cost: &[S], allowed: usize) -> bool {
        loop {
            let entering = (0..allowed).find(|&j| {
                !self.basis.contains(&j) && self.reduced_cost(cost, j) < -S::tolerance()
            });
            let Some(col) = entering else { return true };
            let mut best: Option<(usize, S)> = None;
            for r in 0..self.rows.len() {
                let a = &self.rows[r][col];
                if !a.is_strictly_positive() {
                    continue;
                }
                let ratio = self.rhs[r].clone() / a.clone();
                let better = match &best {
                    None => true,
                    Some((br, bv)) => {
                        ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br])
                    }
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            let Some((row, _)) = best else { return false };
            self.pivot(row, col);
        }
    }
}

/// Minimises `c.x` subject to `A x = b`, `x >= 0`.
pub fn minimize<S: Scalar>(a: &[Vec<S>], b: &[S], c: &[S]) -> LpOutcome<S> {
    let m = a.len();
    let n = c.len();
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let flip = b[i] < S::zero();
        let mut full: Vec<S> = row
            .iter()
            .map(|v| if flip { -v.clone() } else { v.clone() })
            .collect();
        full.extend((0..m).map(|k| if k == i { S::one() } else { S::zero() }));
        rows.push(full);
        rhs.push(if flip { -b[i].clone() } else { b[i].clone() });
    }
    let mut tab = Tableau {
        rows,
        rhs,
        basis: (n..n + m).collect(),
    };

    let mut phase1 = vec![S::zero(); n + m];
    for v in phase1.iter_mut().skip(n) {
        *v = S::one();
    }
    tab.optimize(&phase1, n + m);
    let infeasibility = tab
        .basis
        .iter()
        .zip(&tab.rhs)
        .filter(|(&bcol, _)| bcol >= n)
        .fold(S::zero(), |acc, (_, v)| acc + v.clone());
    if infeasibility.is_strictly_positive() {
        return LpOutcome::Infeasible;
    }
    // drive artificials out of the basis where possible
    for r in 0..m {
        if tab.basis[r] >= n {
            if let Some(col) =
                (0..n).find(|&j| !tab.rows[r][j].is_negligible() && !tab.basis.contains(&j))
            {
                tab.pivot(r, col);
            }
        }
    }
    let mut phase2 = c.to_vec();
    phase2.extend(std::iter::repeat_n(S::zero(), m));
    if !tab.optimize(&phase2, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![S::zero(); n];
    for (r, &bcol) in tab.basis.iter().enumerate() {
        if bcol < n {
            x[bcol] = tab.rhs[r].clone();
        }
    }
    let value = x
        .iter()
        .zip(c)
        .fold(S::zero(), |acc, (xi, ci)| acc + xi.clone() * ci.clone());
    LpOutcome::Optimal { x, value }
}

/// Feasibility of `A x = b`, `x >= 0`; returns a witness.
pub fn feasible_point<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Option<Vec<S>> {
    let n = a.first().map_or(0, |r| r.len());
    match minimize(a, b, &vec![S::zero(); n]) {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

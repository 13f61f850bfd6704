//! Exact sparse elimination for the corner-Dirichlet Laplacian
//! `4 f(x) − Σ_{w~x, w non-corner} f(w)` on the non-corner vertices.
//!
//! Unknowns are eliminated finest level first (all vertices new at level
//! `n`, then level `n − 1`, …). Eliminating the three new vertices inside a
//! coarser cell only couples that cell's corners, so fill-in stays within
//! cells and entries stay small.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gasket::GasketGraph;
use crate::potential::rat::Rat;

#[derive(Debug, Clone)]
pub struct DirichletSolver {
    vertex_count: usize,
    /// elimination position of each vertex; `None` for corners
    position: Vec<Option<usize>>,
    vertex_at: Vec<usize>,
    /// multipliers below the pivot, per eliminated column
    lower: Vec<Vec<(usize, Rat)>>,
    /// strictly-upper entries of each pivot row
    upper: Vec<Vec<(usize, Rat)>>,
    pivot: Vec<Rat>,
}

impl DirichletSolver {
    pub fn new(g: &GasketGraph) -> Self {
        let mut vertex_at: Vec<usize> = (0..g.vertex_count()).filter(|&v| !g.is_corner(v)).collect();
        vertex_at.sort_by_key(|&v| (std::cmp::Reverse(g.vertex_level(v)), v));
        let mut position = vec![None; g.vertex_count()];
        for (p, &v) in vertex_at.iter().enumerate() {
            position[v] = Some(p);
        }

        let k = vertex_at.len();
        let mut rows: Vec<BTreeMap<usize, Rat>> = vertex_at
            .iter()
            .map(|&v| {
                let mut row = BTreeMap::new();
                row.insert(position[v].expect("non-corner"), Rat::from_int(4));
                for w in g.neighbors(v) {
                    if let Some(pw) = position[w] {
                        row.insert(pw, Rat::from_int(-1));
                    }
                }
                row
            })
            .collect();

        let mut lower = Vec::with_capacity(k);
        let mut upper = Vec::with_capacity(k);
        let mut pivot = Vec::with_capacity(k);
        for p in 0..k {
            let row = std::mem::take(&mut rows[p]);
            let piv = row[&p].clone();
            let tail: Vec<(usize, Rat)> = row.into_iter().filter(|(j, _)| *j > p).collect();
            let mut col = Vec::new();
            // the pattern stays symmetric, so column p's nonzeros below the
            // pivot are the rows named in row p's tail
            for (i, _) in &tail {
                let Some(a_ip) = rows[*i].remove(&p) else { continue };
                let l = &a_ip / &piv;
                for (j, a_pj) in &tail {
                    let entry = rows[*i].entry(*j).or_insert_with(Rat::zero);
                    *entry -= &l * a_pj;
                    if entry.is_zero() {
                        rows[*i].remove(j);
                    }
                }
                col.push((*i, l));
            }
            lower.push(col);
            upper.push(tail);
            pivot.push(piv);
        }
        DirichletSolver { vertex_count: g.vertex_count(), position, vertex_at, lower, upper, pivot }
    }

    pub fn unknowns(&self) -> usize {
        self.vertex_at.len()
    }

    pub fn position(&self, v: usize) -> Option<usize> {
        self.position[v]
    }

    pub fn vertex_at(&self, p: usize) -> usize {
        self.vertex_at[p]
    }

    /// Solves in elimination order; `b` is indexed by position and
    /// `first_nonzero` lets forward substitution skip a leading zero block.
    fn solve_positions(&self, mut y: Vec<Rat>, first_nonzero: usize) -> Vec<Rat> {
        let k = self.unknowns();
        for p in first_nonzero..k {
            if y[p].is_zero() {
                continue;
            }
            let yp = y[p].clone();
            for (i, l) in &self.lower[p] {
                y[*i] -= l * &yp;
            }
        }
        for p in (0..k).rev() {
            let mut acc = std::mem::take(&mut y[p]);
            for (j, u) in &self.upper[p] {
                if !y[*j].is_zero() {
                    acc -= u * &y[*j];
                }
            }
            y[p] = acc / &self.pivot[p];
        }
        y
    }

    /// Solves the Dirichlet system with right-hand side `rhs` on non-corner
    /// vertices (corner entries of `rhs` are ignored); the result vanishes
    /// at the corners.
    pub fn solve(&self, rhs: &[Rat]) -> Result<Vec<Rat>> {
        if rhs.len() != self.vertex_count {
            return Err(Error::LengthMismatch { expected: self.vertex_count, actual: rhs.len() });
        }
        let b = self.vertex_at.iter().map(|&v| rhs[v].clone()).collect();
        let x = self.solve_positions(b, 0);
        let mut out = vec![Rat::zero(); self.vertex_count];
        for (p, val) in x.into_iter().enumerate() {
            out[self.vertex_at[p]] = val;
        }
        Ok(out)
    }

    /// Column `p` of the inverse, in elimination order.
    pub fn inverse_column(&self, p: usize) -> Vec<Rat> {
        let mut e = vec![Rat::zero(); self.unknowns()];
        e[p] = Rat::one();
        self.solve_positions(e, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gasket::build_gasket;
    use crate::sandpile::{laplacian_apply, LaplacianKind};

    #[test]
    fn level_one_inverse() {
        let g = build_gasket(1).unwrap();
        let s = DirichletSolver::new(&g);
        assert_eq!(s.unknowns(), 3);
        for p in 0..3 {
            let col = s.inverse_column(p);
            for (q, v) in col.iter().enumerate() {
                let expected = if p == q { Rat::new(3, 10) } else { Rat::new(1, 10) };
                assert_eq!(*v, expected);
            }
        }
    }

    #[test]
    fn solve_satisfies_the_system() {
        let g = build_gasket(4).unwrap();
        let s = DirichletSolver::new(&g);
        let rhs: Vec<Rat> = (0..g.vertex_count()).map(|v| Rat::from_int((v % 7) as i64 - 3)).collect();
        let x = s.solve(&rhs).unwrap();
        let lap = laplacian_apply(&g, &x, LaplacianKind::Effective).unwrap();
        for v in 0..g.vertex_count() {
            if g.is_corner(v) {
                assert!(x[v].is_zero());
            } else {
                assert_eq!(lap[v], rhs[v]);
            }
        }
        assert!(s.solve(&rhs[1..]).is_err());
    }
}

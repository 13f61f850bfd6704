//! The corner-stopped Green function `g_n`, `h_n`, convolutions and the
//! identity decomposition `I_n = −⅓ d_n + ⁸⁄₃ h_n`.

use num_bigint::BigInt;
use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::gasket::{build_gasket, corner_distance, GasketGraph, TriCoord};
use crate::potential::dirichlet::DirichletSolver;
use crate::potential::rat::Rat;
use crate::potential::series::SeriesGreen;
use crate::sandpile::{identity_creutz, identity_recursive, laplacian_apply, LaplacianKind, SandpileConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GreenMode {
    FullMatrix,
    RowOnDemand,
}

#[derive(Debug, Clone)]
struct FullMatrix {
    /// local index of each non-corner vertex
    local: Vec<Option<usize>>,
    size: usize,
    values: Vec<Rat>,
}

/// Exact values of `g_n(x, y)`, the expected number of visits to `y` of
/// simple random walk from `x` stopped at the corners.
#[derive(Debug, Clone)]
pub struct GreenTable {
    graph: GasketGraph,
    series: SeriesGreen,
    full: Option<FullMatrix>,
}

/// Stopped Green function by exact elimination (full matrix).
pub fn green_dirichlet(g: &GasketGraph) -> Result<GreenTable> {
    GreenTable::dirichlet_with_cap(g, Caps::from_env().green_full)
}

/// Stopped Green function evaluated row by row from the spline series.
pub fn green_rows(g: &GasketGraph) -> Result<GreenTable> {
    GreenTable::series_with_cap(g, Caps::from_env().green_series)
}

impl GreenTable {
    pub fn dirichlet_with_cap(g: &GasketGraph, cap: u32) -> Result<Self> {
        let n = g.level();
        if n < 1 {
            return Err(Error::LevelTooSmall { level: n, min: 1 });
        }
        if n > cap {
            return Err(Error::LevelTooLarge { level: n, cap });
        }
        let solver = DirichletSolver::new(g);
        let size = solver.unknowns();
        let mut local = vec![None; g.vertex_count()];
        let mut next = 0;
        for (v, slot) in local.iter_mut().enumerate() {
            if !g.is_corner(v) {
                *slot = Some(next);
                next += 1;
            }
        }
        let mut values = vec![Rat::zero(); size * size];
        for p in 0..size {
            let y = local[solver.vertex_at(p)].expect("non-corner");
            for (q, val) in solver.inverse_column(p).into_iter().enumerate() {
                let x = local[solver.vertex_at(q)].expect("non-corner");
                values[x * size + y] = val;
            }
        }
        Ok(GreenTable {
            graph: g.clone(),
            series: SeriesGreen::new(n.min(14)),
            full: Some(FullMatrix { local, size, values }),
        })
    }

    pub fn series_with_cap(g: &GasketGraph, cap: u32) -> Result<Self> {
        let n = g.level();
        if n < 1 {
            return Err(Error::LevelTooSmall { level: n, min: 1 });
        }
        if n > cap.min(14) {
            return Err(Error::LevelTooLarge { level: n, cap: cap.min(14) });
        }
        Ok(GreenTable { graph: g.clone(), series: SeriesGreen::new(n), full: None })
    }

    pub fn level(&self) -> u32 {
        self.graph.level()
    }

    pub fn mode(&self) -> GreenMode {
        if self.full.is_some() {
            GreenMode::FullMatrix
        } else {
            GreenMode::RowOnDemand
        }
    }

    pub fn graph(&self) -> &GasketGraph {
        &self.graph
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.graph.vertex_count() {
            return Err(Error::VertexOutOfRange(v));
        }
        Ok(())
    }

    /// `g_n(x, y)`.
    pub fn get(&self, x: usize, y: usize) -> Result<Rat> {
        self.check_vertex(x)?;
        self.check_vertex(y)?;
        Ok(match &self.full {
            Some(m) => match (m.local[x], m.local[y]) {
                (Some(i), Some(j)) => m.values[i * m.size + j].clone(),
                _ => Rat::zero(),
            },
            None => self.series.value(self.graph.coord(x), self.graph.coord(y)) * self.series.graph_scale(),
        })
    }

    /// `y ↦ g_n(x, y)` over all vertices.
    pub fn row(&self, x: usize) -> Result<Vec<Rat>> {
        self.check_vertex(x)?;
        Ok(match &self.full {
            Some(m) => {
                let Some(i) = m.local[x] else { return Ok(vec![Rat::zero(); self.graph.vertex_count()]) };
                m.local
                    .iter()
                    .map(|slot| slot.map(|j| m.values[i * m.size + j].clone()).unwrap_or_else(Rat::zero))
                    .collect()
            }
            None => {
                let tx = self.series.terms(self.graph.coord(x));
                let scale = self.series.graph_scale() / self.series.denominator();
                self.graph
                    .vertices()
                    .iter()
                    .map(|&c| Rat::from_bigint(BigInt::from(self.series.scaled_pair(&tx, &self.series.terms(c)))) * &scale)
                    .collect()
            }
        })
    }

    /// `Σ_y g_n(x, y) w(y)` for integer weights.
    pub fn row_dot(&self, x: usize, w: &[i64]) -> Result<Rat> {
        self.check_vertex(x)?;
        if w.len() != self.graph.vertex_count() {
            return Err(Error::LengthMismatch { expected: self.graph.vertex_count(), actual: w.len() });
        }
        Ok(match &self.full {
            Some(_) => self.row(x)?.iter().zip(w).map(|(g, &c)| g * Rat::from_int(c)).sum(),
            None => {
                let tx = self.series.terms(self.graph.coord(x));
                let mut acc = BigInt::from(0);
                let mut chunk: i128 = 0;
                for (&c, &wy) in self.graph.vertices().iter().zip(w) {
                    if wy == 0 {
                        continue;
                    }
                    let s = self.series.scaled_pair(&tx, &self.series.terms(c));
                    match s.checked_mul(wy as i128).and_then(|p| chunk.checked_add(p)) {
                        Some(next) => chunk = next,
                        None => {
                            acc += BigInt::from(chunk) + BigInt::from(s) * BigInt::from(wy);
                            chunk = 0;
                        }
                    }
                }
                acc += BigInt::from(chunk);
                Rat::from_bigint(acc) * self.series.graph_scale() / self.series.denominator()
            }
        })
    }

    /// `h_n(x) = Σ_y g_n(y, x)`.
    ///
    /// In row-on-demand mode this uses the closed form
    /// `h_n(x) = 5^n / 10 · Σ_{k=1}^{n} 5^{1-k} P_k(x)`, `P_k` the sum of the
    /// level-`k` splines of vertices new at level `k`; it follows from the
    /// series because every such spline sums to `3^(n-k)` over `V_n`.
    pub fn h_at(&self, x: usize) -> Result<Rat> {
        self.check_vertex(x)?;
        Ok(match &self.full {
            Some(m) => match m.local[x] {
                Some(j) => (0..m.size).map(|i| &m.values[i * m.size + j]).sum(),
                None => Rat::zero(),
            },
            None => h_closed_form(self.graph.coord(x), self.level()),
        })
    }

    pub fn check_symmetry(&self, pairs: &[(usize, usize)]) -> Result<bool> {
        for &(x, y) in pairs {
            if self.get(x, y)? != self.get(y, x)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Dirichlet property `4 g(x, y) − Σ_{w~x non-corner} g(w, y) = [x = y]`
    /// for every non-corner `x` against the given columns `y`.
    pub fn check_dirichlet(&self, columns: &[usize]) -> Result<bool> {
        let g = &self.graph;
        for &y in columns {
            if g.is_corner(y) {
                continue;
            }
            let col = self.row(y)?;
            let lap = laplacian_apply(g, &col, LaplacianKind::Effective)?;
            for x in 0..g.vertex_count() {
                if g.is_corner(x) {
                    if !col[x].is_zero() {
                        return Ok(false);
                    }
                } else if lap[x] != Rat::from_int(i64::from(x == y)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

pub(crate) fn h_closed_form(x: TriCoord, n: u32) -> Rat {
    // P_k carries the denominator 5^(n-k), which cancels against 5^n / 10 · 5^(1-k)
    let total: i128 = SeriesGreen::new(n).terms(x).levels().iter().flatten().map(|&(_, w)| w as i128).sum();
    Rat::from_bigint(BigInt::from(total)) / Rat::from_int(2)
}

/// `h_n` at every vertex.
pub fn h_field(gt: &GreenTable) -> Vec<Rat> {
    (0..gt.graph.vertex_count()).map(|x| gt.h_at(x).expect("in range")).collect()
}

/// `I(x) = Σ_y g_n(x, y) c(y)`.
pub fn convolve_green(gt: &GreenTable, c: &SandpileConfig) -> Result<Vec<Rat>> {
    if c.level != gt.level() {
        return Err(Error::LevelMismatch { expected: gt.level(), actual: c.level });
    }
    let w: Vec<i64> = c.chips.iter().map(|&v| v as i64).collect();
    (0..gt.graph.vertex_count()).map(|x| gt.row_dot(x, &w)).collect()
}

/// Residual of `I_n + ⅓ d_n − ⁸⁄₃ h_n` on a set of vertices.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub level: u32,
    pub mode: GreenMode,
    pub checked: Vec<usize>,
    pub residual: Vec<Rat>,
    pub max_abs: Rat,
    pub passed: bool,
}

/// Checks the decomposition at every vertex with a full table.
pub fn decompose_check(n: u32) -> Result<DecompositionReport> {
    if n < 2 {
        return Err(Error::LevelTooSmall { level: n, min: 2 });
    }
    let g = build_gasket(n)?;
    let gt = green_dirichlet(&g)?;
    let all: Vec<usize> = (0..g.vertex_count()).collect();
    decompose_on(&gt, &identity_creutz(&g), &all)
}

/// Checks the decomposition on selected rows in row-on-demand mode, against
/// the recursively built identity.
pub fn decompose_check_rows(n: u32, rows: &[usize]) -> Result<DecompositionReport> {
    if n < 2 {
        return Err(Error::LevelTooSmall { level: n, min: 2 });
    }
    let g = build_gasket(n)?;
    let gt = green_rows(&g)?;
    decompose_on(&gt, &identity_recursive(&g)?, rows)
}

/// Residual against an arbitrary configuration in place of the identity.
pub fn decompose_on(gt: &GreenTable, c: &SandpileConfig, rows: &[usize]) -> Result<DecompositionReport> {
    if c.level != gt.level() {
        return Err(Error::LevelMismatch { expected: gt.level(), actual: c.level });
    }
    let d = corner_distance(&gt.graph);
    let w: Vec<i64> = c.chips.iter().map(|&v| v as i64).collect();
    let third = Rat::new(1, 3);
    let eight_thirds = Rat::new(8, 3);
    let mut residual = Vec::with_capacity(rows.len());
    for &x in rows {
        let i = gt.row_dot(x, &w)?;
        let h = gt.h_at(x)?;
        residual.push(i + &third * Rat::from_int(d[x] as i64) - &eight_thirds * h);
    }
    let max_abs = residual.iter().map(Rat::abs).max().unwrap_or_else(Rat::zero);
    Ok(DecompositionReport {
        level: gt.level(),
        mode: gt.mode(),
        checked: rows.to_vec(),
        passed: max_abs.is_zero(),
        residual,
        max_abs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_one_table() {
        let g = build_gasket(1).unwrap();
        let gt = green_dirichlet(&g).unwrap();
        let [m1, m2, _] = g.cutpoints().unwrap();
        assert_eq!(gt.get(m1, m1).unwrap(), Rat::new(3, 10));
        assert_eq!(gt.get(m1, m2).unwrap(), Rat::new(1, 10));
        assert_eq!(gt.get(m1, g.corners()[0]).unwrap(), Rat::zero());
        assert_eq!(gt.get(m1, m1).unwrap() * Rat::new(3, 5), Rat::new(9, 50));
        assert_eq!(gt.h_at(m1).unwrap(), Rat::new(1, 2));
        let twos = SandpileConfig::from_chips(&g, g.vertices().iter().map(|_| 2).collect()).unwrap();
        assert_eq!(convolve_green(&gt, &twos).unwrap()[m1], Rat::one());
    }

    #[test]
    fn modes_agree() {
        let g = build_gasket(3).unwrap();
        let full = green_dirichlet(&g).unwrap();
        let rows = green_rows(&g).unwrap();
        for x in [3, 7, 11] {
            assert_eq!(full.row(x).unwrap(), rows.row(x).unwrap());
            assert_eq!(full.h_at(x).unwrap(), rows.h_at(x).unwrap());
        }
        let h = h_field(&rows);
        let ones: Vec<i64> = vec![1; g.vertex_count()];
        for x in 0..g.vertex_count() {
            assert_eq!(h[x], rows.row_dot(x, &ones).unwrap());
        }
    }

    #[test]
    fn h_is_the_dirichlet_potential() {
        let g = build_gasket(4).unwrap();
        let h = h_field(&green_rows(&g).unwrap());
        let lap = laplacian_apply(&g, &h, LaplacianKind::Effective).unwrap();
        for v in 0..g.vertex_count() {
            if g.is_corner(v) {
                assert!(h[v].is_zero());
            } else {
                assert_eq!(lap[v], Rat::one());
            }
        }
    }

    #[test]
    fn decomposition_small_levels() {
        assert!(decompose_check(2).unwrap().passed);
        assert!(decompose_check(1).is_err());
        let g = build_gasket(2).unwrap();
        let gt = green_dirichlet(&g).unwrap();
        let mut c = identity_creutz(&g);
        let v = (0..g.vertex_count()).find(|&v| c.chips[v] == 2 && !g.is_corner(v)).unwrap_or(3);
        c.chips[v] = if c.chips[v] == 2 { 3 } else { 2 };
        let all: Vec<usize> = (0..g.vertex_count()).collect();
        assert!(!decompose_on(&gt, &c, &all).unwrap().passed);
    }
}

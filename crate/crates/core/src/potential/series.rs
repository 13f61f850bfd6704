//! The Green function of the gasket as a terminating harmonic-spline series.
//!
//! For vertices `x, y` of the level-`N` graph,
//!
//! ```text
//! G(x, y) = Σ_{m=0}^{N-1} Σ_{z, z'} c_m(z, z') Ψ_z^{m+1}(x) Ψ_{z'}^{m+1}(y)
//! ```
//!
//! over vertices `z, z'` new at level `m + 1`, with `c_m(z, z) = 9/50 (3/5)^m`,
//! `c_m(z, z') = 3/50 (3/5)^m` when `z ≠ z'` lie in the same level-`m` cell
//! and `0` otherwise. Terms with `m + 1 > N` vanish on level-`N` vertices.
//!
//! Evaluation is integer-only: `G(x, y) · 50 · 5^(2N-2) = Σ_m 3^(m+1) 5^m T_m`
//! where `T_m` pairs the scaled spline weights of `x` and `y`.

use num_bigint::BigInt;

use crate::gasket::{coord_level, TriCoord};
use crate::potential::rat::Rat;
use crate::potential::spline::spline_support;

/// Spline terms of one vertex: for each level `k = 1..=N`, the new level-`k`
/// vertices whose spline is nonzero there, with numerators over `5^(N-k)`.
#[derive(Debug, Clone)]
pub struct SeriesTerms {
    per_level: Vec<Vec<(TriCoord, i64)>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriesGreen {
    level: u32,
}

impl SeriesTerms {
    /// Entry `k - 1` lists the level-`k` terms.
    pub fn levels(&self) -> &[Vec<(TriCoord, i64)>] {
        &self.per_level
    }
}

impl SeriesGreen {
    pub fn new(level: u32) -> Self {
        assert!(level <= 14, "series weights overflow beyond level 14");
        SeriesGreen { level }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn terms(&self, x: TriCoord) -> SeriesTerms {
        let n = self.level;
        let per_level = (1..=n)
            .map(|k| {
                spline_support(x, n, k)
                    .scaled_terms(n, k)
                    .into_iter()
                    .filter(|(z, _)| coord_level(*z, k) == k)
                    .collect()
            })
            .collect();
        SeriesTerms { per_level }
    }

    /// `G(x, y) · 50 · 5^(2N-2)`, an integer.
    pub fn scaled_pair(&self, x: &SeriesTerms, y: &SeriesTerms) -> i128 {
        let mut total: i128 = 0;
        for (m, (tx, ty)) in x.per_level.iter().zip(&y.per_level).enumerate() {
            if tx.is_empty() || ty.is_empty() {
                continue;
            }
            let mut t_m: i128 = 0;
            for &(z, wz) in tx {
                for &(z2, wz2) in ty {
                    let factor = if z == z2 {
                        3
                    } else if (z.a >> 1, z.b >> 1) == (z2.a >> 1, z2.b >> 1) {
                        1
                    } else {
                        0
                    };
                    t_m += factor * wz as i128 * wz2 as i128;
                }
            }
            total += 3i128.pow(m as u32 + 1) * 5i128.pow(m as u32) * t_m;
        }
        total
    }

    /// Common denominator of [`Self::scaled_pair`], `50 · 5^(2N-2)`.
    pub fn denominator(&self) -> Rat {
        Rat::from_int(50) * Rat::new(5, 1).pow(2 * self.level as i32 - 2)
    }

    /// `G(x, y)` for level-`N` coordinates.
    pub fn value(&self, x: TriCoord, y: TriCoord) -> Rat {
        if self.level == 0 {
            return Rat::zero();
        }
        let s = self.scaled_pair(&self.terms(x), &self.terms(y));
        Rat::from_bigint(BigInt::from(s)) / self.denominator()
    }

    /// `(5/3)^N`, the factor taking `G` to the stopped Green function `g_N`.
    pub fn graph_scale(&self) -> Rat {
        Rat::new(5, 3).pow(self.level as i32)
    }
}

/// `G(x, y)` for vertices of the level-`n` graph given by coordinates.
pub fn green_series(x: TriCoord, y: TriCoord, n: u32) -> Rat {
    SeriesGreen::new(n).value(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gasket::build_gasket;

    #[test]
    fn level_one_constants() {
        let g = build_gasket(1).unwrap();
        let [p1, p2, _] = g.cutpoints().unwrap();
        let (a, b) = (g.coord(p1), g.coord(p2));
        assert_eq!(green_series(a, a, 1), Rat::new(9, 50));
        assert_eq!(green_series(a, b, 1), Rat::new(3, 50));
    }

    #[test]
    fn vanishes_at_corners() {
        let g = build_gasket(3).unwrap();
        for &c in &g.corners() {
            for v in 0..g.vertex_count() {
                assert!(green_series(g.coord(c), g.coord(v), 3).is_zero());
                assert!(green_series(g.coord(v), g.coord(c), 3).is_zero());
            }
        }
    }

    #[test]
    fn coarse_vertices_keep_their_value() {
        // level-1 midpoints read at level 3 still give 9/50
        let m = TriCoord::new(4, 0);
        assert_eq!(green_series(m, m, 3), Rat::new(9, 50));
    }
}

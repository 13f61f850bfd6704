//! Harmonic extension, energy forms and level-`m` harmonic splines.

use crate::error::{Error, Result};
use crate::gasket::{coord_level, GasketGraph, TriCoord};
use crate::potential::rat::Rat;

/// Midpoint values of the harmonic extension of corner values `[c0, c1, c2]`,
/// returned as `[m01, m02, m12]`. The midpoint opposite corner `i` gets
/// `(2·(sum of the other two) + c_i) / 5`.
pub fn harmonic_extend(corners: &[Rat; 3]) -> [Rat; 3] {
    let [c0, c1, c2] = corners;
    let mid = |x: &Rat, y: &Rat, opp: &Rat| (Rat::from_int(2) * (x + y) + opp) / Rat::from_int(5);
    [mid(c0, c1, c2), mid(c0, c2, c1), mid(c1, c2, c0)]
}

/// `E_n(f, h) = (5/3)^n Σ_{x~y} (f(x) − f(y))(h(x) − h(y))`.
pub fn energy_bilinear(g: &GasketGraph, f: &[Rat], h: &[Rat]) -> Result<Rat> {
    for v in [f, h] {
        if v.len() != g.vertex_count() {
            return Err(Error::LengthMismatch { expected: g.vertex_count(), actual: v.len() });
        }
    }
    let sum: Rat = g.edges().map(|(x, y)| (&f[x] - &f[y]) * (&h[x] - &h[y])).sum();
    Ok(sum * Rat::new(5, 3).pow(g.level() as i32))
}

pub fn energy(g: &GasketGraph, f: &[Rat]) -> Result<Rat> {
    energy_bilinear(g, f, f)
}

/// Position of a level-`n` vertex relative to the level-`k` harmonic splines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplineSupport {
    /// The point is itself the level-`k` vertex `v` (coordinates at level `k`).
    Vertex(TriCoord),
    /// The point lies inside the level-`k` cell with corners `[L, R, T]`
    /// (level-`k` coordinates); the spline at corner `i` takes the value
    /// `weights[i] / 5^denom_exp` there.
    Cell { corners: [TriCoord; 3], weights: [i64; 3], denom_exp: u32 },
}

impl SplineSupport {
    /// `(z, numerator)` pairs over the common denominator `5^(n - k)`.
    pub(crate) fn scaled_terms(&self, n: u32, k: u32) -> Vec<(TriCoord, i64)> {
        let e = n - k;
        match self {
            SplineSupport::Vertex(v) => vec![(*v, 5i64.pow(e))],
            SplineSupport::Cell { corners, weights, denom_exp } => {
                let lift = 5i64.pow(e - denom_exp);
                corners.iter().zip(weights).filter(|(_, &w)| w != 0).map(|(&c, &w)| (c, w * lift)).collect()
            }
        }
    }

    pub fn value_at(&self, z: TriCoord) -> Rat {
        match self {
            SplineSupport::Vertex(v) => Rat::from_int(i64::from(*v == z)),
            SplineSupport::Cell { corners, weights, denom_exp } => corners
                .iter()
                .position(|&c| c == z)
                .map(|i| Rat::new(weights[i], 5i64.pow(*denom_exp)))
                .unwrap_or_else(Rat::zero),
        }
    }
}

/// Locates the level-`n` vertex `c` within the level-`k` splines (`k <= n`).
///
/// Descends from the containing level-`k` cell, applying the midpoint rule
/// to the three corner indicator functions at once.
pub fn spline_support(c: TriCoord, n: u32, k: u32) -> SplineSupport {
    assert!(k <= n);
    let e = n - k;
    if coord_level(c, n) <= k {
        return SplineSupport::Vertex(TriCoord::new(c.a >> e, c.b >> e));
    }
    let (anchor_a, anchor_b) = (c.a >> e, c.b >> e);
    let corners = [
        TriCoord::new(anchor_a, anchor_b),
        TriCoord::new(anchor_a + 1, anchor_b),
        TriCoord::new(anchor_a, anchor_b + 1),
    ];
    let mut p = c.a - (anchor_a << e);
    let mut q = c.b - (anchor_b << e);
    let mut side = 1u32 << e;
    // rows: current sub-cell corners L, R, T as combinations of the originals
    let mut m = [[1i64, 0, 0], [0, 1, 0], [0, 0, 1]];
    let mut steps = 0u32;
    let combine = |x: &[i64; 3], y: &[i64; 3], opp: &[i64; 3]| -> [i64; 3] {
        [0, 1, 2].map(|i| 2 * x[i] + 2 * y[i] + opp[i])
    };
    let times5 = |x: &[i64; 3]| x.map(|v| 5 * v);
    loop {
        let hit = match (p, q) {
            (0, 0) => Some(0),
            (pp, 0) if pp == side => Some(1),
            (0, qq) if qq == side => Some(2),
            _ => None,
        };
        if let Some(i) = hit {
            return SplineSupport::Cell { corners, weights: m[i], denom_exp: steps };
        }
        let h = side / 2;
        let [l, r, t] = m;
        let m_lr = combine(&l, &r, &t);
        let m_lt = combine(&l, &t, &r);
        let m_rt = combine(&r, &t, &l);
        if p >= h {
            m = [m_lr, times5(&r), m_rt];
            p -= h;
        } else if q >= h {
            m = [m_lt, m_rt, times5(&t)];
            q -= h;
        } else {
            m = [times5(&l), m_lr, m_lt];
        }
        side = h;
        steps += 1;
    }
}

/// Harmonic splines of level `m`, evaluated at vertices of finer graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplineBasis {
    pub level: u32,
}

impl SplineBasis {
    pub fn new(level: u32) -> Self {
        SplineBasis { level }
    }

    /// `Ψ_z^m(x)` for `z` a level-`m` vertex and `x` a level-`n` vertex.
    pub fn eval(&self, z: TriCoord, x: TriCoord, n: u32) -> Rat {
        spline_support(x, n, self.level).value_at(z)
    }
}

/// Extends `f` on the vertices of `coarse` harmonically to the vertices of `fine`.
pub fn harmonic_extension(coarse: &GasketGraph, f: &[Rat], fine: &GasketGraph) -> Result<Vec<Rat>> {
    if f.len() != coarse.vertex_count() {
        return Err(Error::LengthMismatch { expected: coarse.vertex_count(), actual: f.len() });
    }
    let (k, n) = (coarse.level(), fine.level());
    if k > n {
        return Err(Error::LevelTooLarge { level: k, cap: n });
    }
    let value = |z: TriCoord| &f[coarse.index_of(z).expect("corner of a coarse cell")];
    Ok(fine
        .vertices()
        .iter()
        .map(|&c| match spline_support(c, n, k) {
            SplineSupport::Vertex(v) => value(v).clone(),
            SplineSupport::Cell { corners, weights, denom_exp } => {
                let num: Rat = corners.iter().zip(weights).map(|(&z, w)| value(z) * Rat::from_int(w)).sum();
                num / Rat::from_int(5i64.pow(denom_exp))
            }
        })
        .collect())
}

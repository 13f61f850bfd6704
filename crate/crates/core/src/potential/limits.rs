//! Convergence tables for the three normalizations of `g_n * id_n`.

use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gasket::{build_gasket, corner_distance, nearest_vertex, GasketGraph, Point, TriCoord};
use crate::potential::green::{green_rows, h_closed_form};
use crate::potential::rat::Rat;
use crate::sandpile::identity_recursive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Statement {
    I1,
    I2,
    I3,
}

impl FromStr for Statement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "I1" => Ok(Statement::I1),
            "I2" => Ok(Statement::I2),
            "I3" => Ok(Statement::I3),
            other => Err(Error::Parse(format!("unknown statement {other:?}"))),
        }
    }
}

/// A point of the gasket, optionally known exactly as a vertex of `V_level`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalPoint {
    pub id: String,
    pub point: Point,
    pub dyadic: Option<(u32, TriCoord)>,
}

impl EvalPoint {
    pub fn plane(id: impl Into<String>, x: f64, y: f64) -> Self {
        EvalPoint { id: id.into(), point: Point::new(x, y), dyadic: None }
    }

    /// A vertex of `V_level`, stored at the coarsest level containing it.
    pub fn vertex(id: impl Into<String>, level: u32, c: TriCoord) -> Self {
        let (mut level, mut c) = (level, c);
        while level > 0 && c.a % 2 == 0 && c.b % 2 == 0 {
            c = TriCoord::new(c.a / 2, c.b / 2);
            level -= 1;
        }
        EvalPoint { id: id.into(), point: c.to_point(level), dyadic: Some((level, c)) }
    }

    /// The vertex representing this point on `g` (exact when dyadic and coarse enough).
    pub fn locate(&self, g: &GasketGraph) -> Result<usize> {
        let n = g.level();
        match self.dyadic {
            Some((level, c)) if level <= n => {
                let s = n - level;
                g.index_of(TriCoord::new(c.a << s, c.b << s)).ok_or(Error::NotDyadic { level: n })
            }
            _ => nearest_vertex(g, self.point),
        }
    }
}

/// Named point sets used by the reports.
pub fn preset(name: &str) -> Result<Vec<EvalPoint>> {
    let v = |id: &str, level: u32, a: u32, b: u32| EvalPoint::vertex(id, level, TriCoord::new(a, b));
    Ok(match name {
        "corners" => vec![v("u1", 0, 0, 0), v("u2", 0, 0, 1), v("u3", 0, 1, 0)],
        "midpoints" => vec![v("p1", 1, 0, 1), v("p2", 1, 1, 0), v("p3", 1, 1, 1)],
        "cutpoints" => vec![v("q1", 2, 1, 1), v("q2", 2, 2, 1), v("q3", 2, 1, 2)],
        "dyadic10" => vec![
            v("p1", 1, 0, 1),
            v("p2", 1, 1, 0),
            v("p3", 1, 1, 1),
            v("q1", 2, 1, 1),
            v("q2", 2, 2, 1),
            v("q3", 2, 1, 2),
            v("r1", 3, 1, 0),
            v("r2", 3, 5, 2),
            v("r3", 3, 0, 7),
            v("r4", 3, 3, 1),
        ],
        "nondyadic" => vec![
            EvalPoint::plane("t1", 1.0 / 3.0, 0.0),
            EvalPoint::plane("t2", 1.0 / 5.0, 0.0),
            EvalPoint::plane("t3", 2.0 / 3.0, 0.0),
            EvalPoint::plane("t4", 1.0 / 7.0, 0.0),
            EvalPoint::plane("t5", 0.7, 0.0),
        ],
        other => return Err(Error::Parse(format!("unknown preset {other:?}"))),
    })
}

/// `h_N(x) / (3·5^N)` with the increments against coarser levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegralEstimate {
    pub level: u32,
    pub value: Rat,
    /// `|est_k − est_{k−1}|` for `k` from one above the given level up to `N`
    pub increments: Vec<Rat>,
}

fn h_over_volume(c: TriCoord, level: u32) -> Rat {
    if level == 0 {
        return Rat::zero();
    }
    h_closed_form(c, level) / (Rat::from_int(3) * Rat::new(5, 1).pow(level as i32))
}

/// Approximates `∫ G(x, y) dμ(y)` for `x = c ∈ V_level` at precision `n ≥ level`.
pub fn integral_g(c: TriCoord, level: u32, n: u32) -> Result<IntegralEstimate> {
    if n < level {
        return Err(Error::NotDyadic { level: n });
    }
    let at = |k: u32| h_over_volume(TriCoord::new(c.a << (k - level), c.b << (k - level)), k);
    let mut increments = Vec::new();
    let mut prev = at(level);
    for k in level + 1..=n {
        let cur = at(k);
        increments.push((&cur - &prev).abs());
        prev = cur;
    }
    Ok(IntegralEstimate { level: n, value: prev, increments })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitRow {
    pub point_id: String,
    pub n: u32,
    /// the vertex `x_n` used at this level, in level-`n` coordinates
    pub vertex: TriCoord,
    pub value: Rat,
    pub limit: Rat,
    pub gap: Rat,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitReport {
    pub statement: Statement,
    pub levels: (u32, u32),
    /// precision level of the `∫G` estimates used in the limit column (I1)
    pub reference_level: u32,
    pub points: Vec<EvalPoint>,
    pub rows: Vec<LimitRow>,
}

struct LevelData {
    graph: GasketGraph,
    table: crate::potential::green::GreenTable,
    identity: Vec<i64>,
    distance: Vec<u32>,
}

fn level_data(n: u32) -> Result<LevelData> {
    let graph = build_gasket(n)?;
    let table = green_rows(&graph)?;
    let identity = identity_recursive(&graph)?.chips.iter().map(|&c| c as i64).collect();
    let distance = corner_distance(&graph);
    Ok(LevelData { graph, table, identity, distance })
}

/// Rows of one statement for every point and every level in `levels`.
pub fn limit_report(statement: Statement, points: &[EvalPoint], levels: RangeInclusive<u32>) -> Result<LimitReport> {
    let (lo, hi) = (*levels.start(), *levels.end());
    if lo < 2 {
        return Err(Error::LevelTooSmall { level: lo, min: 2 });
    }
    if hi < lo {
        return Err(Error::Parse(format!("empty level range {lo}..{hi}")));
    }
    if statement == Statement::I3 {
        for p in points {
            match p.dyadic {
                Some((level, _)) if level <= lo => {}
                _ => return Err(Error::NotDyadic { level: lo }),
            }
        }
    }
    let reference_level = hi + 2;
    let data: Vec<LevelData> = levels.clone().map(level_data).collect::<Result<_>>()?;

    let eight = Rat::from_int(8);
    let third = Rat::new(1, 3);
    let g_ref = if statement == Statement::I1 { Some(build_gasket(reference_level)?) } else { None };
    let mut rows = Vec::new();
    for p in points {
        let i1_limit = if let Some(g_ref) = &g_ref {
            let x = p.locate(g_ref)?;
            Some(&eight * integral_g(g_ref.coord(x), reference_level, reference_level)?.value)
        } else {
            None
        };
        let d_limit = if statement == Statement::I3 {
            let top = data.last().expect("nonempty");
            let x = p.locate(&top.graph)?;
            Some(Rat::new(top.distance[x] as i64, 1) / Rat::new(2, 1).pow(hi as i32))
        } else {
            None
        };
        for (n, lv) in levels.clone().zip(&data) {
            let x = p.locate(&lv.graph)?;
            let c = lv.graph.coord(x);
            let i_n = lv.table.row_dot(x, &lv.identity)?;
            let two_n = Rat::new(2, 1).pow(n as i32);
            let d_n = Rat::from_int(lv.distance[x] as i64);
            let (value, limit) = match statement {
                Statement::I1 => (i_n / Rat::new(5, 1).pow(n as i32), i1_limit.clone().expect("set")),
                Statement::I2 => {
                    let h = lv.table.h_at(x)?;
                    ((i_n - Rat::new(8, 3) * h) / &two_n, -(&third * d_n) / &two_n)
                }
                Statement::I3 => {
                    let d = d_limit.clone().expect("set");
                    if &d_n / &two_n != d {
                        return Err(Error::Parse(format!("d_n/2^n not constant at {} for n={n}", p.id)));
                    }
                    let integral = integral_g(c, n, n + 2)?.value;
                    let value = (i_n - &eight * Rat::new(5, 1).pow(n as i32) * integral) / &two_n;
                    (value, -(&third * d))
                }
            };
            let gap = &value - &limit;
            rows.push(LimitRow { point_id: p.id.clone(), n, vertex: c, value, limit, gap });
        }
    }
    Ok(LimitReport { statement, levels: (lo, hi), reference_level, points: points.to_vec(), rows })
}

impl LimitReport {
    /// Rows of one point, in increasing `n`.
    pub fn rows_for<'a>(&'a self, point_id: &'a str) -> impl Iterator<Item = &'a LimitRow> + 'a {
        self.rows.iter().filter(move |r| r.point_id == point_id)
    }

    pub fn to_csv(&self, digits: usize) -> String {
        let mut out = String::from("point_id,n,value_num,value_den,value_dec,limit_dec,gap_dec\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.point_id,
                r.n,
                r.value.numer(),
                r.value.denom(),
                r.value.to_decimal(digits),
                r.limit.to_decimal(digits),
                r.gap.to_decimal(digits)
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statement_parsing() {
        assert_eq!("i2".parse::<Statement>().unwrap(), Statement::I2);
        assert!("I4".parse::<Statement>().is_err());
    }

    #[test]
    fn presets_are_gasket_vertices() {
        let g = build_gasket(3).unwrap();
        for name in ["corners", "midpoints", "cutpoints", "dyadic10"] {
            for p in preset(name).unwrap() {
                assert!(p.locate(&g).is_ok(), "{name} {}", p.id);
            }
        }
        assert!(preset("nowhere").is_err());
    }

    #[test]
    fn corner_integral_vanishes() {
        for n in 0..6 {
            assert!(integral_g(TriCoord::new(0, 0), 0, n).unwrap().value.is_zero());
        }
    }

    #[test]
    fn i2_is_exact() {
        let pts = preset("midpoints").unwrap();
        let rep = limit_report(Statement::I2, &pts, 2..=4).unwrap();
        assert_eq!(rep.rows.len(), 9);
        assert!(rep.rows.iter().all(|r| r.gap.is_zero()));
    }

    #[test]
    fn i3_rejects_plane_points() {
        let pts = preset("nondyadic").unwrap();
        assert!(matches!(limit_report(Statement::I3, &pts, 2..=3), Err(Error::NotDyadic { .. })));
    }

    #[test]
    fn csv_header_and_rows() {
        let rep = limit_report(Statement::I1, &preset("corners").unwrap(), 2..=3).unwrap();
        let csv = rep.to_csv(6);
        assert!(csv.starts_with("point_id,n,value_num,value_den,value_dec,limit_dec,gap_dec\n"));
        assert_eq!(csv.lines().count(), 7);
        assert!(rep.rows.iter().all(|r| r.value.is_zero() && r.limit.is_zero()));
    }
}

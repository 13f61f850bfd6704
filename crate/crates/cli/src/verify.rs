//! Exact verification suites behind `sierpile verify`.

use sierpile::potential::{decompose_check, decompose_check_rows, green_dirichlet, green_series};
use sierpile::sandpile::{
    group_add, identity_creutz, identity_recursive, is_recurrent, laplacian_apply, random_recurrent,
    LaplacianKind,
};
use sierpile::{build_gasket, Caps, Rat, SandpileConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Decomposition,
    Green,
    Sandpile,
    All,
}

/// First failing check: where, what was expected, what was found.
#[derive(Debug)]
pub struct Counterexample {
    pub check: String,
    pub location: String,
    pub expected: String,
    pub actual: String,
}

pub type Outcome = Result<Vec<String>, Counterexample>;

pub struct Options {
    pub max_level: u32,
    pub inject_fault: bool,
    pub caps: Caps,
}

fn fail(check: &str, location: String, expected: impl ToString, actual: impl ToString) -> Counterexample {
    Counterexample { check: check.into(), location, expected: expected.to_string(), actual: actual.to_string() }
}

fn lib(check: &str, e: sierpile::Error) -> Counterexample {
    fail(check, "-".into(), "no error", e)
}

pub fn run(suite: Suite, opts: &Options) -> Outcome {
    let mut lines = Vec::new();
    let suites: &[Suite] = match suite {
        Suite::All => &[Suite::Sandpile, Suite::Green, Suite::Decomposition],
        _ => std::slice::from_ref(&suite),
    };
    for s in suites {
        lines.extend(match s {
            Suite::Decomposition => decomposition(opts)?,
            Suite::Green => green(opts)?,
            Suite::Sandpile => sandpile(opts)?,
            Suite::All => unreachable!(),
        });
    }
    Ok(lines)
}

fn decomposition(opts: &Options) -> Outcome {
    let mut lines = Vec::new();
    for n in 2..=opts.max_level {
        let rep = if n <= opts.caps.green_full {
            decompose_check(n)
        } else {
            let count = build_gasket(n).map_err(|e| lib("decomposition", e))?.vertex_count();
            let rows: Vec<usize> = (0..count).step_by((count / 16).max(1)).collect();
            decompose_check_rows(n, &rows)
        }
        .map_err(|e| lib("decomposition", e))?;
        if let Some(i) = rep.residual.iter().position(|r| !r.is_zero()) {
            return Err(fail("decomposition", format!("n={n} vertex={}", rep.checked[i]), 0, &rep.residual[i]));
        }
        lines.push(format!("decomposition n={n} PASS ({} vertices, {:?})", rep.checked.len(), rep.mode));
    }
    Ok(lines)
}

fn green(opts: &Options) -> Outcome {
    let mut lines = Vec::new();
    for n in 1..=opts.max_level {
        let g = build_gasket(n).map_err(|e| lib("green", e))?;
        let gt = green_dirichlet(&g).map_err(|e| lib("green", e))?;
        let scale = Rat::new(3, 5).pow(n as i32);
        let mut rows: Vec<Vec<Rat>> = (0..g.vertex_count()).map(|x| gt.row(x).expect("in range")).collect();
        if opts.inject_fault && n == 1 {
            let m = g.cutpoints().expect("n >= 1")[0];
            rows[m][m] += Rat::new(1, 10);
        }
        for x in 0..g.vertex_count() {
            for y in 0..g.vertex_count() {
                if rows[x][y] != rows[y][x] {
                    return Err(fail("green symmetry", format!("n={n} x={x} y={y}"), &rows[y][x], &rows[x][y]));
                }
                let series = green_series(g.coord(x), g.coord(y), n);
                let lhs = &scale * &rows[x][y];
                if lhs != series {
                    return Err(fail("green series", format!("n={n} x={x} y={y}"), series, lhs));
                }
            }
            let lap = laplacian_apply(&g, &rows[x], LaplacianKind::Effective).expect("length");
            for y in (0..g.vertex_count()).filter(|&y| !g.is_corner(y)) {
                let expected = Rat::from_int(i64::from(!g.is_corner(x) && x == y));
                if lap[y] != expected {
                    return Err(fail("green dirichlet", format!("n={n} x={x} y={y}"), expected, &lap[y]));
                }
            }
        }
        lines.push(format!("green n={n} PASS ({} pairs)", g.vertex_count() * g.vertex_count()));
    }
    Ok(lines)
}

fn sandpile(opts: &Options) -> Outcome {
    let mut lines = Vec::new();
    for n in 2..=opts.max_level {
        let g = build_gasket(n).map_err(|e| lib("sandpile", e))?;
        let creutz = identity_creutz(&g);
        let rec = identity_recursive(&g).map_err(|e| lib("sandpile", e))?;
        if let Some(v) = (0..g.vertex_count()).find(|&v| creutz.chips[v] != rec.chips[v]) {
            return Err(fail("identity", format!("n={n} vertex={v}"), creutz.chips[v], rec.chips[v]));
        }
        for seed in 0..10 {
            let r = random_recurrent(&g, seed);
            let sum = group_add(&g, &rec, &r).map_err(|e| lib("sandpile", e))?;
            if let Some(v) = (0..g.vertex_count()).find(|&v| sum.chips[v] != r.chips[v]) {
                return Err(fail("neutrality", format!("n={n} seed={seed} vertex={v}"), r.chips[v], sum.chips[v]));
            }
        }
        for (name, c, want) in [
            ("identity", rec.clone(), true),
            ("max-stable", SandpileConfig::max_stable(&g), true),
            ("zero", SandpileConfig::zeros(&g), false),
        ] {
            let got = is_recurrent(&g, &c).map_err(|e| lib("sandpile", e))?;
            if got != want {
                return Err(fail("recurrence", format!("n={n} config={name}"), want, got));
            }
        }
        lines.push(format!("sandpile n={n} PASS"));
    }
    Ok(lines)
}

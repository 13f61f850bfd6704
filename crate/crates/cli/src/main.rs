mod manifest;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sierpile::potential::{limit_report, preset, EvalPoint, Statement};
use sierpile::render::{render_svg, SvgOptions};
use sierpile::sandpile::{identity_creutz, identity_recursive};
use sierpile::{build_gasket, Caps, Error, SandpileConfig, TriCoord};

use manifest::Recorder;

const EXIT_USAGE: u8 = 2;
const EXIT_CHECK: u8 = 3;

#[derive(Parser)]
#[command(name = "sierpile", version, about = "Sandpile identities and Green functions on Sierpinski gasket graphs")]
struct Cli {
    /// Where to write the run manifest (default: next to the first output file)
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the level-n graph and print its size
    Gasket {
        n: u32,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compute the sandpile identity
    Identity {
        n: u32,
        #[arg(long, value_enum, default_value = "recursive")]
        method: Method,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Also write the run-length text form
        #[arg(long)]
        rle: Option<PathBuf>,
    },
    /// Run exact verification suites
    Verify {
        #[arg(value_enum)]
        suite: verify::Suite,
        #[arg(long, default_value_t = 4)]
        max_level: u32,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Convergence tables for I1, I2 or I3
    Limits {
        tag: String,
        /// corners, midpoints, cutpoints, dyadic10 or nondyadic
        #[arg(long, conflicts_with = "points")]
        preset: Option<String>,
        /// File with lines `id,x,y` (plane point) or `id,level,a,b` (vertex)
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value = "2..6")]
        levels: String,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, default_value_t = 12)]
        digits: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Creutz,
    Recursive,
    Both,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Creutz => "creutz",
            Method::Recursive => "recursive",
            Method::Both => "both",
        }
    }
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::LevelTooLarge { .. }
            | Error::LevelTooSmall { .. }
            | Error::NotDyadic { .. }
            | Error::Parse(_)
            | Error::PointOutsideTriangle { .. }
            | Error::InvalidWordSymbol(_) => EXIT_USAGE,
            _ => 1,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let manifest = cli.manifest.as_deref();
    match cli.command {
        Command::Gasket { n, json } => cmd_gasket(n, json.as_deref(), manifest),
        Command::Identity { n, method, svg, json, rle } => {
            cmd_identity(n, method, svg.as_deref(), json.as_deref(), rle.as_deref(), manifest)
        }
        Command::Verify { suite, max_level, inject_fault } => cmd_verify(suite, max_level, inject_fault),
        Command::Limits { tag, preset, points, levels, csv, json, digits } => cmd_limits(
            &tag,
            preset.as_deref(),
            points.as_deref(),
            &levels,
            csv.as_deref(),
            json.as_deref(),
            digits,
            manifest,
        ),
    }
}

fn finish(rec: Recorder, manifest: Option<&Path>) -> Result<(), Failure> {
    if let Some(p) = rec.finish(manifest)? {
        eprintln!("manifest: {}", p.display());
    }
    Ok(())
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn cmd_gasket(n: u32, json: Option<&Path>, manifest: Option<&Path>) -> Result<(), Failure> {
    let g = build_gasket(n)?;
    println!("level={n} vertices={} edges={}", g.vertex_count(), g.edge_count());
    println!("corners={} cutpoints={}", join(&g.corners()), join(&g.cutpoints().map(|c| c.to_vec()).unwrap_or_default()));
    let mut rec = Recorder::new("gasket");
    rec.param("n", n);
    if let Some(path) = json {
        let mut text = serde_json::to_string(&g.to_dump()).expect("dump serializes");
        text.push('\n');
        rec.write(path, &text)?;
    }
    finish(rec, manifest)
}

fn cmd_identity(
    n: u32,
    method: Method,
    svg: Option<&Path>,
    json: Option<&Path>,
    rle: Option<&Path>,
    manifest: Option<&Path>,
) -> Result<(), Failure> {
    let g = build_gasket(n)?;
    if method != Method::Creutz && n < 2 {
        return Err(usage(format!("the recursive construction needs n >= 2, got {n}")));
    }
    let id: SandpileConfig = match method {
        Method::Creutz => identity_creutz(&g),
        Method::Recursive => identity_recursive(&g)?,
        Method::Both => {
            let creutz = identity_creutz(&g);
            let rec = identity_recursive(&g)?;
            if let Some(v) = (0..g.vertex_count()).find(|&v| creutz.chips[v] != rec.chips[v]) {
                let c = g.coord(v);
                println!("MISMATCH vertex={v} coord=({},{}) creutz={} recursive={}", c.a, c.b, creutz.chips[v], rec.chips[v]);
                return Err(Failure { code: EXIT_CHECK, message: "identity algorithms disagree".into() });
            }
            println!("MATCH");
            rec
        }
    };
    let count = |k: u64| id.chips.iter().filter(|&&c| c == k).count();
    println!("level={n} vertices={} three={} two={} total={}", g.vertex_count(), count(3), count(2), id.total());

    let mut rec = Recorder::new("identity");
    rec.param("n", n);
    rec.param("method", method.name());
    if let Some(path) = json {
        let mut text = serde_json::to_string(&id).expect("config serializes");
        text.push('\n');
        rec.write(path, &text)?;
    }
    if let Some(path) = rle {
        rec.write(path, &id.to_rle())?;
    }
    if let Some(path) = svg {
        rec.write(path, &render_svg(&g, &id, SvgOptions::default())?)?;
    }
    finish(rec, manifest)
}

fn cmd_verify(suite: verify::Suite, max_level: u32, inject_fault: bool) -> Result<(), Failure> {
    let caps = Caps::from_env();
    let limit = match suite {
        verify::Suite::Green | verify::Suite::All => caps.green_full,
        verify::Suite::Decomposition => caps.green_series,
        verify::Suite::Sandpile => caps.gasket,
    };
    if max_level > limit {
        return Err(usage(format!("--max-level {max_level} exceeds the cap {limit}")));
    }
    let opts = verify::Options { max_level, inject_fault, caps };
    match verify::run(suite, &opts) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            println!("verify: PASS");
            Ok(())
        }
        Err(cx) => {
            println!("FAIL {}: {}", cx.check, cx.location);
            println!("  expected: {}", cx.expected);
            println!("  actual:   {}", cx.actual);
            Err(Failure { code: EXIT_CHECK, message: format!("{} check failed", cx.check) })
        }
    }
}

fn parse_levels(s: &str) -> Result<(u32, u32), Failure> {
    let bad = || usage(format!("levels must look like a..b, got {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let (a, b): (u32, u32) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn read_points(path: &Path) -> Result<Vec<EvalPoint>, Failure> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = || usage(format!("{}:{}: expected id,x,y or id,level,a,b", path.display(), lineno + 1));
        match fields.as_slice() {
            [id, x, y] => out.push(EvalPoint::plane(*id, x.parse().map_err(|_| bad())?, y.parse().map_err(|_| bad())?)),
            [id, level, a, b] => out.push(EvalPoint::vertex(
                *id,
                level.parse().map_err(|_| bad())?,
                TriCoord::new(a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?),
            )),
            _ => return Err(bad()),
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_limits(
    tag: &str,
    preset_name: Option<&str>,
    points: Option<&Path>,
    levels: &str,
    csv: Option<&Path>,
    json: Option<&Path>,
    digits: usize,
    manifest: Option<&Path>,
) -> Result<(), Failure> {
    let statement: Statement = tag.parse()?;
    let (lo, hi) = parse_levels(levels)?;
    let pts = match (preset_name, points) {
        (Some(name), None) => preset(name)?,
        (None, Some(path)) => read_points(path)?,
        (None, None) => preset("midpoints")?,
        (Some(_), Some(_)) => return Err(usage("--preset and --points are exclusive")),
    };
    let report = limit_report(statement, &pts, lo..=hi)?;
    for p in &pts {
        if let Some(last) = report.rows_for(&p.id).last() {
            println!("{} n={} value={} limit={} gap={}", p.id, last.n, last.value.to_decimal(digits), last.limit.to_decimal(digits), last.gap.to_decimal(digits));
        }
    }
    let mut rec = Recorder::new("limits");
    rec.param("tag", tag.to_ascii_uppercase());
    rec.param("levels", format!("{lo}..{hi}"));
    rec.param("points", preset_name.map(str::to_string).or(points.map(|p| p.display().to_string())).unwrap_or("midpoints".into()));
    rec.param("digits", digits);
    if let Some(path) = csv {
        rec.write(path, &report.to_csv(digits))?;
    }
    if let Some(path) = json {
        let mut text = report.to_json();
        text.push('\n');
        rec.write(path, &text)?;
    }
    finish(rec, manifest)
}

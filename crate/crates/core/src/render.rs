//! SVG figures of chip configurations.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gasket::GasketGraph;
use crate::sandpile::SandpileConfig;

pub const THREE_CHIPS: &str = "#1f4fbf";
pub const TWO_CHIPS: &str = "#bf1f1f";
const ONE_CHIP: &str = "#7f7f7f";
const NO_CHIPS: &str = "#d9d9d9";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgOptions {
    /// pixels per unit edge of the outer triangle
    pub scale: f64,
    pub margin: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions { scale: 800.0, margin: 16.0 }
    }
}

pub fn chip_color(chips: u64) -> &'static str {
    match chips {
        3 => THREE_CHIPS,
        2 => TWO_CHIPS,
        1 => ONE_CHIP,
        _ => NO_CHIPS,
    }
}

/// Dots at the Euclidean embedding of each vertex, radius `0.3·2^-n` edges.
pub fn render_svg(g: &GasketGraph, c: &SandpileConfig, opts: SvgOptions) -> Result<String> {
    if c.level != g.level() {
        return Err(Error::LevelMismatch { expected: g.level(), actual: c.level });
    }
    let s = opts.scale;
    let height = 3f64.sqrt() / 2.0 * s;
    let (w_px, h_px) = (s + 2.0 * opts.margin, height + 2.0 * opts.margin);
    let r = 0.3 * s / f64::from(g.side());
    let mut out = String::new();
    let _ = writeln!(out, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(out, "<!-- sierpile {} -->", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w_px:.2}\" height=\"{h_px:.2}\" viewBox=\"0 0 {w_px:.2} {h_px:.2}\">"
    );
    for (v, &chips) in c.chips.iter().enumerate() {
        let p = g.coord(v).to_point(g.level());
        let cx = opts.margin + p.x * s;
        let cy = opts.margin + height - p.y * s;
        let _ = writeln!(
            out,
            "  <circle data-v=\"{v}\" data-chips=\"{chips}\" cx=\"{cx:.3}\" cy=\"{cy:.3}\" r=\"{r:.3}\" fill=\"{}\"/>",
            chip_color(chips)
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

//! Chip-firing on gasket graphs with the normal boundary: an implicit sink
//! joined to each corner by two edges, so every vertex has degree 4.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::ops::{Mul, Sub};

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gasket::{build_gasket_with_cap, GasketGraph};

/// Degree of every vertex once the sink edges are counted.
pub const EFFECTIVE_DEGREE: u64 = 4;
/// Sink edges at each corner.
pub const SINK_EDGES: u64 = 2;
/// Largest stable chip count.
pub const MAX_STABLE: u64 = EFFECTIVE_DEGREE - 1;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SandpileConfig {
    pub level: u32,
    pub chips: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Odometer {
    pub topples: Vec<u64>,
}

impl Odometer {
    pub fn total(&self) -> u64 {
        self.topples.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.topples.iter().all(|&t| t == 0)
    }
}

impl SandpileConfig {
    pub fn zeros(g: &GasketGraph) -> Self {
        Self::constant(g, 0)
    }

    pub fn constant(g: &GasketGraph, value: u64) -> Self {
        SandpileConfig { level: g.level(), chips: vec![value; g.vertex_count()] }
    }

    /// The maximal stable configuration, 3 chips everywhere.
    pub fn max_stable(g: &GasketGraph) -> Self {
        Self::constant(g, MAX_STABLE)
    }

    pub fn from_chips(g: &GasketGraph, chips: Vec<u64>) -> Result<Self> {
        if chips.len() != g.vertex_count() {
            return Err(Error::LengthMismatch { expected: g.vertex_count(), actual: chips.len() });
        }
        Ok(SandpileConfig { level: g.level(), chips })
    }

    pub fn total(&self) -> u64 {
        self.chips.iter().sum()
    }

    pub fn is_stable(&self) -> bool {
        self.chips.iter().all(|&c| c < EFFECTIVE_DEGREE)
    }

    fn check(&self, g: &GasketGraph) -> Result<()> {
        if self.level != g.level() {
            return Err(Error::LevelMismatch { expected: g.level(), actual: self.level });
        }
        if self.chips.len() != g.vertex_count() {
            return Err(Error::LengthMismatch { expected: g.vertex_count(), actual: self.chips.len() });
        }
        Ok(())
    }

    /// Compact run-length text: a `L<level>` header line, then `value` or
    /// `value*count` tokens in canonical vertex order.
    pub fn to_rle(&self) -> String {
        let mut out = format!("L{}\n", self.level);
        let mut runs = Vec::new();
        let mut iter = self.chips.iter().peekable();
        while let Some(&v) = iter.next() {
            let mut count = 1;
            while iter.peek() == Some(&&v) {
                iter.next();
                count += 1;
            }
            runs.push((v, count));
        }
        for (i, (v, count)) in runs.into_iter().enumerate() {
            if i > 0 {
                out.push(if i % 16 == 0 { '\n' } else { ' ' });
            }
            if count == 1 {
                let _ = write!(out, "{v}");
            } else {
                let _ = write!(out, "{v}*{count}");
            }
        }
        out.push('\n');
        out
    }

    pub fn from_rle(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let header = tokens.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let level = header
            .strip_prefix('L')
            .and_then(|l| l.parse::<u32>().ok())
            .ok_or_else(|| Error::Parse(format!("bad header {header:?}")))?;
        let num = |s: &str| s.parse::<u64>().map_err(|e| Error::Parse(format!("{s:?}: {e}")));
        let mut chips = Vec::new();
        for tok in tokens {
            match tok.split_once('*') {
                Some((v, c)) => {
                    let v = num(v)?;
                    chips.extend(std::iter::repeat_n(v, num(c)? as usize));
                }
                None => chips.push(num(tok)?),
            }
        }
        let expected = (3usize.pow(level + 1) + 3) / 2;
        if chips.len() != expected {
            return Err(Error::LengthMismatch { expected, actual: chips.len() });
        }
        Ok(SandpileConfig { level, chips })
    }
}

/// Which Laplacian [`laplacian_apply`] evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaplacianKind {
    /// Degree 4 everywhere; the sink contributes value-0 neighbours.
    Effective,
    /// Plain combinatorial Laplacian of the graph (corner degree 2).
    SinkFree,
}

/// `(Δf)(v) = deg(v) f(v) - Σ_{w~v} f(w)`.
pub fn laplacian_apply<T>(g: &GasketGraph, f: &[T], kind: LaplacianKind) -> Result<Vec<T>>
where
    T: Clone + Zero + Sub<Output = T> + Mul<Output = T> + From<i32>,
{
    if f.len() != g.vertex_count() {
        return Err(Error::LengthMismatch { expected: g.vertex_count(), actual: f.len() });
    }
    Ok((0..g.vertex_count())
        .map(|v| {
            let deg = match kind {
                LaplacianKind::Effective => EFFECTIVE_DEGREE as i32,
                LaplacianKind::SinkFree => g.degree(v) as i32,
            };
            g.neighbors(v).fold(T::from(deg) * f[v].clone(), |acc, w| acc - f[w].clone())
        })
        .collect())
}

/// Order in which unstable vertices are toppled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheduler {
    /// FIFO queue; each visit topples `⌊chips/4⌋` times at once.
    Fifo,
    /// One toppling at a time at a uniformly random unstable vertex.
    Random { seed: u64 },
}

pub fn stabilize(g: &GasketGraph, c: &SandpileConfig) -> Result<(SandpileConfig, Odometer)> {
    stabilize_with(g, c, Scheduler::Fifo)
}

pub fn stabilize_with(g: &GasketGraph, c: &SandpileConfig, scheduler: Scheduler) -> Result<(SandpileConfig, Odometer)> {
    c.check(g)?;
    let mut chips = c.chips.clone();
    let mut topples = vec![0u64; chips.len()];
    match scheduler {
        Scheduler::Fifo => stabilize_fifo(g, &mut chips, &mut topples),
        Scheduler::Random { seed } => stabilize_random(g, &mut chips, &mut topples, seed),
    }
    Ok((SandpileConfig { level: c.level, chips }, Odometer { topples }))
}

fn stabilize_fifo(g: &GasketGraph, chips: &mut [u64], topples: &mut [u64]) {
    let mut queued = vec![false; chips.len()];
    let mut queue: VecDeque<usize> = (0..chips.len()).filter(|&v| chips[v] >= EFFECTIVE_DEGREE).collect();
    for &v in &queue {
        queued[v] = true;
    }
    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        let k = chips[v] / EFFECTIVE_DEGREE;
        if k == 0 {
            continue;
        }
        chips[v] -= k * EFFECTIVE_DEGREE;
        topples[v] += k;
        for w in g.neighbors(v) {
            chips[w] += k;
            if chips[w] >= EFFECTIVE_DEGREE && !queued[w] {
                queued[w] = true;
                queue.push_back(w);
            }
        }
    }
}

fn stabilize_random(g: &GasketGraph, chips: &mut [u64], topples: &mut [u64], seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unstable: Vec<usize> = (0..chips.len()).filter(|&v| chips[v] >= EFFECTIVE_DEGREE).collect();
    let mut pos = vec![usize::MAX; chips.len()];
    for (i, &v) in unstable.iter().enumerate() {
        pos[v] = i;
    }
    while !unstable.is_empty() {
        let v = unstable[rng.gen_range(0..unstable.len())];
        chips[v] -= EFFECTIVE_DEGREE;
        topples[v] += 1;
        if chips[v] < EFFECTIVE_DEGREE {
            let i = pos[v];
            let last = unstable.pop().expect("non-empty");
            if last != v {
                unstable[i] = last;
                pos[last] = i;
            }
            pos[v] = usize::MAX;
        }
        for w in g.neighbors(v) {
            chips[w] += 1;
            if chips[w] >= EFFECTIVE_DEGREE && pos[w] == usize::MAX {
                pos[w] = unstable.len();
                unstable.push(w);
            }
        }
    }
}

/// Checks `final = initial - Δ_eff · topples` vertexwise and that the chips
/// missing from the total are exactly those sent to the sink.
pub fn conservation_holds(g: &GasketGraph, initial: &SandpileConfig, fin: &SandpileConfig, odo: &Odometer) -> bool {
    let t: Vec<i128> = odo.topples.iter().map(|&x| x as i128).collect();
    let Ok(lap) = laplacian_apply(g, &t, LaplacianKind::Effective) else {
        return false;
    };
    let vertexwise = (0..g.vertex_count()).all(|v| initial.chips[v] as i128 - lap[v] == fin.chips[v] as i128);
    let to_sink: u64 = g.corners().iter().map(|&c| SINK_EDGES * odo.topples[c]).sum();
    vertexwise && initial.total() == fin.total() + to_sink
}

/// `a ⊕ b = (a + b)°`.
pub fn group_add(g: &GasketGraph, a: &SandpileConfig, b: &SandpileConfig) -> Result<SandpileConfig> {
    if a.level != b.level {
        return Err(Error::LevelMismatch { expected: a.level, actual: b.level });
    }
    a.check(g)?;
    let sum = SandpileConfig { level: a.level, chips: a.chips.iter().zip(&b.chips).map(|(x, y)| x + y).collect() };
    Ok(stabilize(g, &sum)?.0)
}

/// Dhar's burning test. Fire starts from the sink; a vertex burns once its
/// chip count reaches the number of its still-unburned neighbours.
pub fn is_recurrent(g: &GasketGraph, c: &SandpileConfig) -> Result<bool> {
    c.check(g)?;
    if let Some(v) = c.chips.iter().position(|&x| x >= EFFECTIVE_DEGREE) {
        return Err(Error::Unstable(v));
    }
    let mut unburned_nbrs: Vec<u64> = (0..g.vertex_count()).map(|v| g.degree(v) as u64).collect();
    let mut burned = vec![false; g.vertex_count()];
    let mut queue: VecDeque<usize> = (0..g.vertex_count()).filter(|&v| c.chips[v] >= unburned_nbrs[v]).collect();
    for &v in &queue {
        burned[v] = true;
    }
    let mut count = queue.len();
    while let Some(v) = queue.pop_front() {
        for w in g.neighbors(v) {
            unburned_nbrs[w] -= 1;
            if !burned[w] && c.chips[w] >= unburned_nbrs[w] {
                burned[w] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    Ok(count == g.vertex_count())
}

/// Creutz's identity `((2σ_max) − (2σ_max)°)°`.
pub fn identity_creutz(g: &GasketGraph) -> SandpileConfig {
    let twice = SandpileConfig::constant(g, 2 * MAX_STABLE);
    let (stab, _) = stabilize(g, &twice).expect("shape matches");
    let diff = SandpileConfig {
        level: g.level(),
        chips: twice.chips.iter().zip(&stab.chips).map(|(a, b)| a - b).collect(),
    };
    stabilize(g, &diff).expect("shape matches").0
}

/// Values of `M_k` on the level-`k` graph. Corner entries are left at 0;
/// callers overwrite them.
fn m_pattern(k: u32) -> Result<(GasketGraph, Vec<u64>)> {
    let g = build_gasket_with_cap(k, u32::MAX)?;
    let mut vals = vec![0u64; g.vertex_count()];
    if k >= 2 {
        let (sub, sub_vals) = m_pattern(k - 1)?;
        for symbol in 1..=3u8 {
            let map = g.cell_map(&[symbol])?;
            for v in 0..sub.vertex_count() {
                if !sub.is_corner(v) {
                    vals[map[v]] = sub_vals[v];
                }
            }
        }
    }
    let [left, bottom, right] = g.cutpoints().expect("k >= 1");
    vals[bottom] = 3;
    vals[right] = 2;
    vals[left] = 3;
    Ok((g, vals))
}

/// The identity assembled from rotated copies of `M_{n-1}`: bottom-left
/// cell `M`, top cell `M⁻` (clockwise), bottom-right cell `M⁺`
/// (counterclockwise), with 2 chips on corners and cutpoints.
pub fn identity_recursive(g: &GasketGraph) -> Result<SandpileConfig> {
    let n = g.level();
    if n < 2 {
        return Err(Error::LevelTooSmall { level: n, min: 2 });
    }
    let (sub, m) = m_pattern(n - 1)?;
    // rotating a configuration by +1 moves the value at v to rotate(v, +1)
    let rotated = |dir: i32| -> Vec<u64> { (0..sub.vertex_count()).map(|v| m[sub.rotate_vertex(v, -dir)]).collect() };
    let parts = [(1u8, m.clone()), (2u8, rotated(-1)), (3u8, rotated(1))];
    let mut chips = vec![0u64; g.vertex_count()];
    for (symbol, vals) in parts {
        let map = g.cell_map(&[symbol])?;
        for v in 0..sub.vertex_count() {
            chips[map[v]] = vals[v];
        }
    }
    for v in g.corners().into_iter().chain(g.cutpoints().expect("n >= 2")) {
        chips[v] = 2;
    }
    Ok(SandpileConfig { level: n, chips })
}

/// Stabilization of `σ_max` plus seeded uniform noise in `0..=3`.
pub fn random_recurrent(g: &GasketGraph, seed: u64) -> SandpileConfig {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chips = (0..g.vertex_count()).map(|_| MAX_STABLE + rng.gen_range(0..=MAX_STABLE)).collect();
    stabilize(g, &SandpileConfig { level: g.level(), chips }).expect("shape matches").0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gasket::build_gasket;
    use crate::gasket::TriCoord;

    #[test]
    fn stable_input_is_unchanged() {
        let g = build_gasket(3).unwrap();
        let c = random_recurrent(&g, 7);
        let (s, odo) = stabilize(&g, &c).unwrap();
        assert_eq!(s, c);
        assert!(odo.is_zero());
    }

    #[test]
    fn single_toppling_at_midpoint() {
        let g = build_gasket(1).unwrap();
        let m = g.cutpoints().unwrap()[1];
        let mut c = SandpileConfig::zeros(&g);
        c.chips[m] = 4;
        let (s, odo) = stabilize(&g, &c).unwrap();
        assert_eq!(odo.total(), 1);
        assert_eq!(odo.topples[m], 1);
        for v in 0..g.vertex_count() {
            let expected = u64::from(g.neighbors(m).any(|w| w == v));
            assert_eq!(s.chips[v], expected);
        }
        assert!(s.is_stable());
    }

    #[test]
    fn corner_toppling_loses_two_chips() {
        let g = build_gasket(1).unwrap();
        let mut c = SandpileConfig::zeros(&g);
        c.chips[g.corners()[0]] = 4;
        let (s, odo) = stabilize(&g, &c).unwrap();
        assert_eq!(s.total(), 2);
        assert!(conservation_holds(&g, &c, &s, &odo));
    }

    #[test]
    fn laplacian_examples() {
        let g = build_gasket(3).unwrap();
        let c = vec![7i64; g.vertex_count()];
        assert!(laplacian_apply(&g, &c, LaplacianKind::SinkFree).unwrap().iter().all(|&x| x == 0));
        let eff = laplacian_apply(&g, &c, LaplacianKind::Effective).unwrap();
        assert_eq!(eff[g.corners()[0]], 14);
        assert!(laplacian_apply(&g, &[1i64, 2], LaplacianKind::SinkFree).is_err());
    }

    #[test]
    fn zero_is_neutral_for_stable_configs() {
        let g = build_gasket(2).unwrap();
        let a = random_recurrent(&g, 3);
        assert_eq!(group_add(&g, &a, &SandpileConfig::zeros(&g)).unwrap(), a);
    }

    #[test]
    fn group_add_rejects_level_mismatch() {
        let g2 = build_gasket(2).unwrap();
        let g3 = build_gasket(3).unwrap();
        let err = group_add(&g2, &SandpileConfig::zeros(&g2), &SandpileConfig::zeros(&g3)).unwrap_err();
        assert_eq!(err, Error::LevelMismatch { expected: 2, actual: 3 });
    }

    #[test]
    fn burning_test_examples() {
        let g = build_gasket(3).unwrap();
        assert!(is_recurrent(&g, &SandpileConfig::max_stable(&g)).unwrap());
        assert!(!is_recurrent(&g, &SandpileConfig::zeros(&g)).unwrap());
        let mut bad = SandpileConfig::zeros(&g);
        bad.chips[5] = 4;
        assert_eq!(is_recurrent(&g, &bad).unwrap_err(), Error::Unstable(5));
    }

    #[test]
    fn identity_level_one_regression() {
        // Frozen from the Creutz algorithm; neutrality checked below.
        let g = build_gasket(1).unwrap();
        let id = identity_creutz(&g);
        assert_eq!(id.chips, vec![2; 6]);
        for seed in 0..10 {
            let r = random_recurrent(&g, seed);
            assert_eq!(group_add(&g, &id, &r).unwrap(), r);
        }
    }

    #[test]
    fn identity_recursive_level_two() {
        let g = build_gasket(2).unwrap();
        let id = identity_recursive(&g).unwrap();
        assert_eq!(id.total(), 36);
        assert_eq!(id, identity_creutz(&g));
        // top cell carries M_1 rotated clockwise: bottom 2, left 3, right 3
        let at = |a, b| id.chips[g.index_of(TriCoord::new(a, b)).unwrap()];
        assert_eq!((at(1, 2), at(0, 3), at(1, 3)), (2, 3, 3));
        // bottom-left cell carries M_1 itself: bottom 3, right 2, left 3
        assert_eq!((at(1, 0), at(1, 1), at(0, 1)), (3, 2, 3));
        assert!(identity_recursive(&build_gasket(1).unwrap()).is_err());
    }

    #[test]
    fn random_recurrent_is_deterministic() {
        let g = build_gasket(3).unwrap();
        assert_eq!(random_recurrent(&g, 11), random_recurrent(&g, 11));
        assert!(is_recurrent(&g, &random_recurrent(&g, 11)).unwrap());
    }

    #[test]
    fn rle_round_trip_and_errors() {
        let g = build_gasket(2).unwrap();
        let id = identity_creutz(&g);
        let text = id.to_rle();
        assert!(text.starts_with("L2\n"));
        assert_eq!(SandpileConfig::from_rle(&text).unwrap(), id);
        assert!(SandpileConfig::from_rle("L2\n3*4").is_err());
        assert!(SandpileConfig::from_rle("X2 1").is_err());
    }
}

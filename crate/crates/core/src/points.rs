//! Sampling the rational curve, translating it into the grid, and point file I/O.
//!
//! Full mode evaluates `γ(t) = (f_1(t)/h(t), ..., f_d(t)/h(t))` at every `t`
//! with `h(t) ≠ 0`. Strict mode restricts to `t = u⁻¹` for
//! `u = 1, ..., ⌊(p−1)/(d+1)⌋`.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{CurveSystem, Mode};

/// Default number of translations above which the search switches to sampling.
pub const DEFAULT_TRANSLATION_BUDGET: u64 = 10_000_000;
/// Default number of sampled translations.
pub const DEFAULT_SAMPLES: u64 = 100_000;

#[derive(Debug, Error)]
pub enum PointsError {
    #[error("curve has {} self-intersections, expected at most one: {pairs:?}", pairs.len())]
    TooManySelfIntersections { pairs: Vec<(u64, u64)> },
    #[error("grid side {n} exceeds the field size {p}")]
    GridLargerThanField { n: u64, p: u64 },
    #[error("grid side must be positive")]
    EmptyGrid,
    #[error("strict evaluation needs a strict-mode system")]
    NotStrictSystem,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("points have inconsistent dimensions: expected {expected}, got {got} on line {line}")]
    Dimension { line: usize, expected: usize, got: usize },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Image of the curve over `F_p`, deduplicated.
#[derive(Debug, Clone)]
pub struct ModularPointSet {
    pub system: CurveSystem,
    pub mode: Mode,
    /// Distinct image points in order of first appearance.
    pub points: Vec<Vec<u64>>,
    /// Parameter `t` producing each entry of `points`.
    pub source_params: Vec<u64>,
    /// Size of the parameter domain after removing the poles of `1/h`.
    pub domain_size: usize,
    /// Pairs `t₁ ≠ t₂` with the same image.
    pub self_intersections: Vec<(u64, u64)>,
}

impl ModularPointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn p(&self) -> u64 {
        self.system.ctx.p()
    }

    pub fn d(&self) -> usize {
        self.system.d()
    }
}

/// Parameters visited in strict mode: `u⁻¹` for `u = 1, ..., ⌊(p−1)/(d+1)⌋`.
pub fn strict_parameters(system: &CurveSystem) -> Vec<u64> {
    let ctx = system.ctx;
    let top = (ctx.p() - 1) / (system.d() as u64 + 1);
    (1..=top).map(|u| ctx.inv(u).expect("u is nonzero")).collect()
}

/// `γ(t)`, or `None` at a pole.
pub fn curve_point(system: &CurveSystem, t: u64) -> Option<Vec<u64>> {
    let ctx = system.ctx;
    let ht = system.h.eval(t);
    let inv = ctx.inv(ht).ok()?;
    Some(system.f.iter().map(|fi| ctx.mul(fi.eval(t), inv)).collect())
}

pub fn eval_curve(system: &CurveSystem, mode: Mode) -> Result<ModularPointSet, PointsError> {
    let params: Vec<u64> = match mode {
        Mode::Full => (0..system.ctx.p()).collect(),
        Mode::Strict => {
            if system.mode != Mode::Strict {
                return Err(PointsError::NotStrictSystem);
            }
            strict_parameters(system)
        }
    };
    let mut seen: HashMap<Vec<u64>, u64> = HashMap::new();
    let mut points = Vec::new();
    let mut source_params = Vec::new();
    let mut self_intersections = Vec::new();
    let mut domain_size = 0;
    for t in params {
        let Some(x) = curve_point(system, t) else {
            continue;
        };
        domain_size += 1;
        match seen.get(&x) {
            Some(&first) => self_intersections.push((first, t)),
            None => {
                seen.insert(x.clone(), t);
                points.push(x);
                source_params.push(t);
            }
        }
    }
    if self_intersections.len() > 1 {
        return Err(PointsError::TooManySelfIntersections { pairs: self_intersections });
    }
    Ok(ModularPointSet {
        system: system.clone(),
        mode,
        points,
        source_params,
        domain_size,
        self_intersections,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TranslationStrategy {
    /// Every translation when `p^d` fits the budget, sampling otherwise.
    Exhaustive,
    /// Always sample.
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationOptions {
    pub strategy: TranslationStrategy,
    pub budget: u64,
    pub samples: u64,
    pub seed: u64,
}

impl Default for TranslationOptions {
    fn default() -> Self {
        TranslationOptions {
            strategy: TranslationStrategy::Exhaustive,
            budget: DEFAULT_TRANSLATION_BUDGET,
            samples: DEFAULT_SAMPLES,
            seed: 0,
        }
    }
}

/// Result of the translation search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationOutcome {
    pub v: Vec<u64>,
    pub count: usize,
    /// `true` when every translation was examined.
    pub exhaustive: bool,
    pub candidates_examined: u64,
    /// `⌈|S|·n^d/p^d⌉`, the average-case count. Guaranteed only when exhaustive.
    pub floor: u64,
}

/// Points of `S + v` inside `{1, ..., n}^d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridPointSet {
    pub d: usize,
    pub n: u64,
    pub translation: Vec<u64>,
    /// Sorted lexicographically.
    pub points: Vec<Vec<u64>>,
}

pub fn first_moment_floor(size: usize, n: u64, p: u64, d: usize) -> u64 {
    let num = BigUint::from(size) * BigUint::from(n).pow(d as u32);
    let den = BigUint::from(p).pow(d as u32);
    let q = Integer::div_ceil(&num, &den);
    u64::try_from(q).expect("floor is at most |S|")
}

/// Representative of a residue in `{1, ..., p}`, matching `[n] = {1̄, ..., n̄}`.
fn grid_value(r: u64, p: u64) -> u64 {
    if r == 0 {
        p
    } else {
        r
    }
}

fn count_in_grid(points: &[Vec<u64>], v: &[u64], n: u64, p: u64) -> usize {
    points
        .iter()
        .filter(|x| x.iter().zip(v).all(|(&a, &b)| grid_value((a + b) % p, p) <= n))
        .count()
}

/// Window counts for every translation, indexed by `v` in row-major order.
///
/// Entry `v` equals `|{s ∈ S : s + v ∈ [n]^d}|`. Computed as cyclic box sums
/// of the indicator of `S`, one axis at a time.
fn all_window_counts(points: &[Vec<u64>], d: usize, p: usize, n: usize) -> Vec<u32> {
    let total = p.pow(d as u32);
    // b[u] = Σ_{k ∈ [1,n]^d} 1_S(u + k); the count for v is b[−v]
    let mut b = vec![0u32; total];
    for x in points {
        let idx = x.iter().fold(0, |acc, &c| acc * p + c as usize);
        b[idx] += 1;
    }
    let mut line = vec![0u32; p];
    let mut stride = 1;
    for _ in 0..d {
        let block = stride * p;
        for base in (0..total).step_by(block) {
            for offset in 0..stride {
                let at = |i: usize| base + offset + i * stride;
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = b[at(i)];
                }
                let mut sum: u32 = (1..=n).map(|k| line[k % p]).sum();
                for u in 0..p {
                    b[at(u)] = sum;
                    sum -= line[(u + 1) % p];
                    sum += line[(u + n + 1) % p];
                }
            }
        }
        stride = block;
    }
    let neg = |c: usize| (p - c) % p;
    let mut counts = vec![0u32; total];
    for (idx, slot) in counts.iter_mut().enumerate() {
        let mut rest = idx;
        let mut mirrored = 0;
        let mut scale = 1;
        for _ in 0..d {
            mirrored += neg(rest % p) * scale;
            rest /= p;
            scale *= p;
        }
        *slot = b[mirrored];
    }
    counts
}

fn unflatten(mut idx: usize, d: usize, p: usize) -> Vec<u64> {
    let mut v = vec![0u64; d];
    for slot in v.iter_mut().rev() {
        *slot = (idx % p) as u64;
        idx /= p;
    }
    v
}

/// Finds `v` maximizing `|(S + v) ∩ [n]^d|`; ties go to the lexicographically
/// smallest `v`.
pub fn best_translation(
    set: &ModularPointSet,
    n: u64,
    options: &TranslationOptions,
) -> Result<(TranslationOutcome, GridPointSet), PointsError> {
    let (p, d) = (set.p(), set.d());
    if n == 0 {
        return Err(PointsError::EmptyGrid);
    }
    if n > p {
        return Err(PointsError::GridLargerThanField { n, p });
    }
    let floor = first_moment_floor(set.len(), n, p, d);
    let space = p.checked_pow(d as u32).filter(|&s| s <= options.budget);
    let (v, count, exhaustive, examined) = match (options.strategy, space) {
        (TranslationStrategy::Exhaustive, Some(space)) => {
            let counts = all_window_counts(&set.points, d, p as usize, n as usize);
            let (idx, &best) = counts
                .iter()
                .enumerate()
                .rev()
                .max_by_key(|&(_, c)| *c)
                .expect("translation space is nonempty");
            (unflatten(idx, d, p as usize), best as usize, true, space)
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            let candidates: Vec<Vec<u64>> = (0..options.samples)
                .map(|_| (0..d).map(|_| rng.gen_range(0..p)).collect())
                .collect();
            let (v, count) = candidates
                .into_par_iter()
                .map(|v| {
                    let c = count_in_grid(&set.points, &v, n, p);
                    (v, c)
                })
                .reduce_with(|a, b| match a.1.cmp(&b.1) {
                    std::cmp::Ordering::Less => b,
                    std::cmp::Ordering::Greater => a,
                    std::cmp::Ordering::Equal => {
                        if a.0 <= b.0 {
                            a
                        } else {
                            b
                        }
                    }
                })
                .unwrap_or_else(|| (vec![0; d], count_in_grid(&set.points, &vec![0; d], n, p)));
            (v, count, false, options.samples)
        }
    };
    let grid = clip(set, &v, n);
    debug_assert_eq!(grid.points.len(), count);
    let outcome = TranslationOutcome { v, count, exhaustive, candidates_examined: examined, floor };
    Ok((outcome, grid))
}

/// `(S + v) ∩ [n]^d` as integer points, each residue read in `{1, ..., p}`.
pub fn clip(set: &ModularPointSet, v: &[u64], n: u64) -> GridPointSet {
    let p = set.p();
    let mut points: Vec<Vec<u64>> = set
        .points
        .iter()
        .map(|x| x.iter().zip(v).map(|(&a, &b)| grid_value((a + b) % p, p)).collect::<Vec<u64>>())
        .filter(|y| y.iter().all(|&c| c <= n))
        .collect();
    points.sort();
    GridPointSet { d: set.d(), n, translation: v.to_vec(), points }
}

/// One point per line, comma-separated.
pub fn to_csv<T: std::fmt::Display>(points: &[Vec<T>]) -> String {
    let mut out = String::new();
    for x in points {
        for (i, c) in x.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write!(out, "{c}").expect("writing to a String");
        }
        out.push('\n');
    }
    out
}

/// A point list with an optional manifest, as stored in JSON point files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointFile {
    pub points: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<serde_json::Value>,
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String, PointsError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn parse_csv(text: &str) -> Result<Vec<Vec<i64>>, PointsError> {
    let mut points = Vec::new();
    let mut dim = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let x = line
            .split(',')
            .map(|c| {
                c.trim().parse::<i64>().map_err(|e| PointsError::Parse {
                    line: i + 1,
                    message: format!("bad coordinate {:?}: {e}", c.trim()),
                })
            })
            .collect::<Result<Vec<i64>, _>>()?;
        match dim {
            None => dim = Some(x.len()),
            Some(k) if k != x.len() => {
                return Err(PointsError::Dimension { line: i + 1, expected: k, got: x.len() })
            }
            _ => {}
        }
        points.push(x);
    }
    Ok(points)
}

/// Reads either format: JSON when the first non-blank character is `{` or `[`.
pub fn parse_points(text: &str) -> Result<PointFile, PointsError> {
    match text.trim_start().chars().next() {
        Some('{') => {
            let file: PointFile = serde_json::from_str(text).map_err(|e| PointsError::Parse {
                line: e.line(),
                message: e.to_string(),
            })?;
            check_dims(&file.points)?;
            Ok(file)
        }
        Some('[') => {
            let points: Vec<Vec<i64>> =
                serde_json::from_str(text).map_err(|e| PointsError::Parse {
                    line: e.line(),
                    message: e.to_string(),
                })?;
            check_dims(&points)?;
            Ok(PointFile { points, manifest: None })
        }
        _ => Ok(PointFile { points: parse_csv(text)?, manifest: None }),
    }
}

fn check_dims(points: &[Vec<i64>]) -> Result<(), PointsError> {
    if let Some(first) = points.first() {
        for (i, x) in points.iter().enumerate() {
            if x.len() != first.len() {
                return Err(PointsError::Dimension { line: i + 1, expected: first.len(), got: x.len() });
            }
        }
    }
    Ok(())
}

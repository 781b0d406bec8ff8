//! Exact incidence counting: the largest number of points on one sphere or
//! hyperplane, over the integers or over `F_p`.
//!
//! A point `x ∈ R^d` lifts to `(x, Σ x_i²)`. Points lie on a common sphere or
//! hyperplane exactly when their lifts lie on a common hyperplane in `d + 1`
//! dimensions, so both questions reduce to "most points on one hyperplane in
//! `m` dimensions", with `m = d + 1` for spheres-or-planes and `m = d` for
//! planes alone. Nothing here uses floating point.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::FieldContext;
use crate::linalg::{
    det_bigint, det_i128_flat, det_mod_p_flat, primitive_kernel_vector, rank_bigint, rank_mod_p,
    rref_mod_p,
};
use crate::poly::DensePolynomial;

/// Largest absolute integer coordinate accepted.
pub const COORDINATE_LIMIT: i64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("predicate takes {expected} points, got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("point {index} has {got} coordinates, expected {expected}")]
    Dimension { index: usize, expected: usize, got: usize },
    #[error("coordinate {value} of point {index} exceeds 2^31 in absolute value")]
    CoordinateOutOfRange { index: usize, value: i64 },
    #[error("{subsets} subsets exceed the budget of {budget}; try fast mode or raise the budget")]
    BudgetExceeded { subsets: u128, budget: u64 },
    #[error("witness {0:?} failed the recheck")]
    WitnessRecheckFailed(Vec<usize>),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ring {
    Integers,
    ModP(FieldContext),
}

impl Ring {
    fn p(&self) -> Option<u64> {
        match self {
            Ring::Integers => None,
            Ring::ModP(ctx) => Some(ctx.p()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    SphereOrPlane,
    PlaneOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyMode {
    /// Every `(m+1)`-subset is tested with one determinant.
    #[default]
    Oracle,
    /// Points are grouped by hyperplane around every `(m−1)`-subset.
    Fast,
}

impl fmt::Display for VerifyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerifyMode::Oracle => "oracle",
            VerifyMode::Fast => "fast",
        })
    }
}

/// Point after the paraboloid lift: the original coordinates followed by
/// `Σ x_i²`, all in the ring (residues are canonical for `F_p`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedPoint {
    pub coords: Vec<i128>,
}

pub fn lift(points: &[Vec<i64>], ring: Ring) -> Vec<LiftedPoint> {
    points
        .iter()
        .map(|x| {
            let coords = match ring {
                Ring::Integers => {
                    let mut c: Vec<i128> = x.iter().map(|&v| v as i128).collect();
                    c.push(x.iter().map(|&v| (v as i128) * (v as i128)).sum());
                    c
                }
                Ring::ModP(ctx) => {
                    let r: Vec<u64> = x.iter().map(|&v| ctx.from_i64(v)).collect();
                    let s = r.iter().fold(0, |acc, &v| ctx.add(acc, ctx.mul(v, v)));
                    r.into_iter().chain([s]).map(i128::from).collect()
                }
            };
            LiftedPoint { coords }
        })
        .collect()
}

/// Largest set of points found on one surface.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Incidence {
    pub count: usize,
    /// Sorted input indices of the points on the surface.
    pub witness: Vec<usize>,
}

impl Incidence {
    /// Larger count wins; equal counts go to the lexicographically smaller witness.
    fn better(self, other: Incidence) -> Incidence {
        match self.count.cmp(&other.count) {
            std::cmp::Ordering::Greater => self,
            std::cmp::Ordering::Less => other,
            std::cmp::Ordering::Equal => {
                if self.witness <= other.witness {
                    self
                } else {
                    other
                }
            }
        }
    }
}

/// Homogeneous rows `(y, 1)` of points `y` in `m`-space, over one ring.
trait Rows: Sync {
    type Key: Eq + Hash + Send;

    fn len(&self) -> usize;
    /// `m + 1`.
    fn width(&self) -> usize;
    /// Determinant of the `(m+1) × (m+1)` matrix of the given rows vanishes.
    fn singular(&self, idx: &[usize]) -> bool;
    fn rank(&self, idx: &[usize]) -> usize;
    /// Normalized normal of the hyperplane through `m` points, if unique.
    fn key(&self, idx: &[usize]) -> Option<Self::Key>;
}

struct IntRows(Vec<Vec<i128>>);

/// Primitive normal vector; machine-width when every entry fits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum IntKey {
    Small(Vec<i128>),
    Big(Vec<BigInt>),
}

impl IntKey {
    fn from_big(v: Vec<BigInt>) -> IntKey {
        let small: Option<Vec<i128>> = v.iter().map(|x| i128::try_from(x).ok()).collect();
        match small {
            Some(s) => IntKey::Small(s),
            None => IntKey::Big(v),
        }
    }
}

/// Signed maximal minors of an `m × (m+1)` matrix in `i128`, normalized like
/// [`primitive_kernel_vector`]. `None` on overflow.
fn small_kernel(rows: &[&[i128]]) -> Option<Option<Vec<i128>>> {
    use num_integer::Integer;
    let m = rows.len();
    let mut v = Vec::with_capacity(m + 1);
    let mut flat = Vec::with_capacity(m * m);
    for skip in 0..=m {
        flat.clear();
        for r in rows {
            flat.extend(r.iter().enumerate().filter(|&(c, _)| c != skip).map(|(_, &x)| x));
        }
        let det = det_i128_flat(&mut flat, m)?;
        v.push(if skip % 2 == 1 { det.checked_neg()? } else { det });
    }
    let g = v.iter().fold(0i128, |g, x| g.gcd(x));
    if g == 0 {
        return Some(None);
    }
    let g = if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) { -g } else { g };
    Some(Some(v.into_iter().map(|x| x / g).collect()))
}

impl Rows for IntRows {
    type Key = IntKey;

    fn len(&self) -> usize {
        self.0.len()
    }

    fn width(&self) -> usize {
        self.0.first().map_or(0, Vec::len)
    }

    fn singular(&self, idx: &[usize]) -> bool {
        let n = idx.len();
        let mut flat: Vec<i128> = Vec::with_capacity(n * n);
        for &i in idx {
            flat.extend_from_slice(&self.0[i]);
        }
        match det_i128_flat(&mut flat, n) {
            Some(det) => det == 0,
            None => {
                let rows: Vec<Vec<i128>> = idx.iter().map(|&i| self.0[i].clone()).collect();
                det_bigint(&rows) == BigInt::from(0)
            }
        }
    }

    fn rank(&self, idx: &[usize]) -> usize {
        let rows: Vec<Vec<i128>> = idx.iter().map(|&i| self.0[i].clone()).collect();
        rank_bigint(&rows)
    }

    fn key(&self, idx: &[usize]) -> Option<IntKey> {
        let refs: Vec<&[i128]> = idx.iter().map(|&i| self.0[i].as_slice()).collect();
        if let Some(small) = small_kernel(&refs) {
            return small.map(IntKey::Small);
        }
        let rows: Vec<Vec<i128>> = idx.iter().map(|&i| self.0[i].clone()).collect();
        primitive_kernel_vector(&rows).map(IntKey::from_big)
    }
}

struct ModRows {
    ctx: FieldContext,
    rows: Vec<Vec<u64>>,
}

impl Rows for ModRows {
    type Key = Vec<u64>;

    fn len(&self) -> usize {
        self.rows.len()
    }

    fn width(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    fn singular(&self, idx: &[usize]) -> bool {
        let n = idx.len();
        let mut flat: Vec<u64> = Vec::with_capacity(n * n);
        for &i in idx {
            flat.extend_from_slice(&self.rows[i]);
        }
        det_mod_p_flat(self.ctx, &mut flat, n) == 0
    }

    fn rank(&self, idx: &[usize]) -> usize {
        rank_mod_p(self.ctx, idx.iter().map(|&i| self.rows[i].clone()).collect())
    }

    fn key(&self, idx: &[usize]) -> Option<Vec<u64>> {
        let ctx = self.ctx;
        let width = self.width();
        let mut m: Vec<Vec<u64>> = idx.iter().map(|&i| self.rows[i].clone()).collect();
        let pivots = rref_mod_p(ctx, &mut m);
        if pivots.len() + 1 != width {
            return None;
        }
        let free = (0..width).find(|c| !pivots.contains(c)).expect("one free column");
        let mut v = vec![0u64; width];
        v[free] = 1;
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = ctx.neg(m[r][free]);
        }
        let lead = *v.iter().find(|&&x| x != 0).expect("kernel vector is nonzero");
        let inv = ctx.inv(lead).expect("lead is nonzero");
        Some(v.into_iter().map(|x| ctx.mul(x, inv)).collect())
    }
}

/// Calls `f` on every `k`-subset of `start..n` in lexicographic order.
fn for_each_combination(start: usize, n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k == 0 {
        f(&[]);
        return;
    }
    if start + k > n {
        return;
    }
    let mut idx: Vec<usize> = (start..start + k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Answers that need no subset search: too few points, or all points on one hyperplane.
fn trivial_maximum<R: Rows>(rows: &R) -> Option<Incidence> {
    let (n, m) = (rows.len(), rows.width() - 1);
    let all: Vec<usize> = (0..n).collect();
    if n <= m || rows.rank(&all) <= m {
        return Some(Incidence { count: n, witness: all });
    }
    None
}

fn baseline(m: usize) -> Incidence {
    Incidence { count: m, witness: (0..m).collect() }
}

fn oracle_max<R: Rows>(rows: &R) -> (Incidence, u64) {
    let (n, m) = (rows.len(), rows.width() - 1);
    if let Some(found) = trivial_maximum(rows) {
        return (found, 0);
    }
    let best = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut best: Option<Incidence> = None;
            let mut subset = vec![first; m + 1];
            for_each_combination(first + 1, n, m, |tail| {
                subset[1..].copy_from_slice(tail);
                if !rows.singular(&subset) || rows.rank(&subset) != m {
                    return;
                }
                // some m of these span the hyperplane; test every point against them
                let span: Vec<usize> = (0..=m)
                    .map(|skip| {
                        subset.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &x)| x).collect::<Vec<usize>>()
                    })
                    .find(|s| rows.rank(s) == m)
                    .expect("a spanning m-subset exists");
                let mut probe = span.clone();
                probe.push(0);
                let witness: Vec<usize> = (0..n)
                    .filter(|&j| {
                        probe[m] = j;
                        span.contains(&j) || rows.singular(&probe)
                    })
                    .collect();
                let found = Incidence { count: witness.len(), witness };
                best = Some(match best.take() {
                    Some(b) => b.better(found),
                    None => found,
                });
            });
            best
        })
        .flatten()
        .reduce(|| baseline(m), Incidence::better);
    (best, binomial(n, m + 1) as u64)
}

fn fast_max<R: Rows>(rows: &R) -> (Incidence, u64) {
    let (n, m) = (rows.len(), rows.width() - 1);
    if let Some(found) = trivial_maximum(rows) {
        return (found, 0);
    }
    // Every hyperplane through more than m points contains an independent
    // (m−1)-subset A; grouping the other points by the hyperplane through
    // A ∪ {j} finds all of its points, with those in aff(A) shared by all groups.
    let best = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut best: Option<Incidence> = None;
            let mut anchor = vec![first; m - 1];
            let mut probe = vec![first; m];
            for_each_combination(first + 1, n, m - 2, |tail| {
                anchor[1..].copy_from_slice(tail);
                probe[..m - 1].copy_from_slice(&anchor);
                let mut groups: HashMap<R::Key, Vec<usize>> = HashMap::new();
                let mut flat: Vec<usize> = anchor.clone();
                for j in (0..n).filter(|j| !anchor.contains(j)) {
                    probe[m - 1] = j;
                    match rows.key(&probe) {
                        Some(key) => groups.entry(key).or_default().push(j),
                        None => flat.push(j),
                    }
                }
                let Some(top) = groups.values().map(Vec::len).max() else {
                    return;
                };
                for group in groups.into_values().filter(|g| g.len() == top) {
                    let mut witness: Vec<usize> = flat.iter().chain(&group).copied().collect();
                    witness.sort_unstable();
                    let found = Incidence { count: witness.len(), witness };
                    best = Some(match best.take() {
                        Some(b) => b.better(found),
                        None => found,
                    });
                }
            });
            best
        })
        .flatten()
        .reduce(|| baseline(m), Incidence::better);
    (best, fast_subsets(n, m) as u64)
}

fn fast_subsets(n: usize, m: usize) -> u128 {
    binomial(n, m - 1) * (n + 1 - m) as u128
}

/// Verifies that the witness points lie on one hyperplane in the lifted space.
fn recheck<R: Rows>(rows: &R, found: &Incidence) -> Result<(), VerifyError> {
    let m = rows.width() - 1;
    if found.witness.len() != found.count || rows.rank(&found.witness) > m {
        return Err(VerifyError::WitnessRecheckFailed(found.witness.clone()));
    }
    Ok(())
}

fn check_input(points: &[Vec<i64>], d: usize, ring: Ring) -> Result<(), VerifyError> {
    for (index, x) in points.iter().enumerate() {
        if x.len() != d {
            return Err(VerifyError::Dimension { index, expected: d, got: x.len() });
        }
        if ring == Ring::Integers {
            if let Some(&value) = x.iter().find(|v| v.abs() > COORDINATE_LIMIT) {
                return Err(VerifyError::CoordinateOutOfRange { index, value });
            }
        }
    }
    Ok(())
}

fn homogeneous(lifted: &[LiftedPoint], predicate: Predicate) -> Vec<Vec<i128>> {
    lifted
        .iter()
        .map(|q| {
            let keep = match predicate {
                Predicate::SphereOrPlane => q.coords.len(),
                Predicate::PlaneOnly => q.coords.len() - 1,
            };
            q.coords[..keep].iter().copied().chain([1]).collect()
        })
        .collect()
}

/// Largest number of the points on one sphere-or-plane (or one plane).
///
/// Returns the incidence and the number of subsets the chosen mode examines.
pub fn max_incidence(
    points: &[Vec<i64>],
    d: usize,
    predicate: Predicate,
    mode: VerifyMode,
    ring: Ring,
    budget: Option<u64>,
) -> Result<(Incidence, u64), VerifyError> {
    check_input(points, d, ring)?;
    let m = match predicate {
        Predicate::SphereOrPlane => d + 1,
        Predicate::PlaneOnly => d,
    };
    if points.len() < m + 1 {
        return Err(VerifyError::TooFewPoints { needed: m + 1, got: points.len() });
    }
    let subsets = match mode {
        VerifyMode::Oracle => binomial(points.len(), m + 1),
        VerifyMode::Fast => fast_subsets(points.len(), m),
    };
    if let Some(budget) = budget {
        if subsets > budget as u128 {
            return Err(VerifyError::BudgetExceeded { subsets, budget });
        }
    }
    let rows = homogeneous(&lift(points, ring), predicate);
    match ring {
        Ring::Integers => run(&IntRows(rows), mode),
        Ring::ModP(ctx) => {
            let rows = rows.into_iter().map(|r| r.into_iter().map(|x| x as u64).collect()).collect();
            run(&ModRows { ctx, rows }, mode)
        }
    }
}

fn run<R: Rows>(rows: &R, mode: VerifyMode) -> Result<(Incidence, u64), VerifyError> {
    let (found, examined) = match mode {
        VerifyMode::Fast if rows.width() > 2 => fast_max(rows),
        _ => oracle_max(rows),
    };
    recheck(rows, &found)?;
    Ok((found, examined))
}

/// `d + 2` points lie on one sphere or hyperplane.
pub fn cospherical_or_coplanar(subset: &[Vec<i64>], ring: Ring) -> Result<bool, VerifyError> {
    subset_singular(subset, ring, Predicate::SphereOrPlane)
}

/// `d + 1` points lie on one hyperplane.
pub fn coplanar(subset: &[Vec<i64>], ring: Ring) -> Result<bool, VerifyError> {
    subset_singular(subset, ring, Predicate::PlaneOnly)
}

fn subset_singular(subset: &[Vec<i64>], ring: Ring, predicate: Predicate) -> Result<bool, VerifyError> {
    let d = subset.first().map_or(0, Vec::len);
    let expected = match predicate {
        Predicate::SphereOrPlane => d + 2,
        Predicate::PlaneOnly => d + 1,
    };
    if subset.len() != expected || d == 0 {
        return Err(VerifyError::WrongArity { expected, got: subset.len() });
    }
    check_input(subset, d, ring)?;
    let rows = homogeneous(&lift(subset, ring), predicate);
    let all: Vec<usize> = (0..subset.len()).collect();
    Ok(match ring {
        Ring::Integers => IntRows(rows).singular(&all),
        Ring::ModP(ctx) => {
            let rows = rows.into_iter().map(|r| r.into_iter().map(|x| x as u64).collect()).collect();
            ModRows { ctx, rows }.singular(&all)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub mode: VerifyMode,
    /// Also compute the most points on one plane.
    pub plane_only: bool,
    /// Maximum number of subsets to examine.
    pub budget: Option<u64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { mode: VerifyMode::Oracle, plane_only: false, budget: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub d: usize,
    pub points: usize,
    pub ring: String,
    pub p: Option<u64>,
    pub mode: VerifyMode,
    pub max_on_sphere_or_plane: Incidence,
    pub max_on_plane: Option<Incidence>,
    pub subsets_examined: u64,
    pub elapsed_ms: u64,
}

impl VerificationReport {
    /// No `d + 2` points on a sphere or plane, and no `d + 1` on a plane when checked.
    pub fn passed(&self) -> bool {
        self.max_on_sphere_or_plane.count <= self.d + 1
            && self.max_on_plane.as_ref().is_none_or(|i| i.count <= self.d)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ring = match self.p {
            Some(p) => format!("F_{p}"),
            None => "integers".to_string(),
        };
        writeln!(f, "{} points in dimension {} over {ring}, {} mode", self.points, self.d, self.mode)?;
        writeln!(
            f,
            "max on a sphere or plane: {} (bound {})",
            self.max_on_sphere_or_plane.count,
            self.d + 1
        )?;
        if let Some(plane) = &self.max_on_plane {
            writeln!(f, "max on a plane: {} (bound {})", plane.count, self.d)?;
        }
        writeln!(f, "subsets examined: {}, {} ms", self.subsets_examined, self.elapsed_ms)?;
        write!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

pub fn verify(
    points: &[Vec<i64>],
    d: usize,
    ring: Ring,
    options: VerifyOptions,
) -> Result<VerificationReport, VerifyError> {
    let start = Instant::now();
    let (sphere, mut examined) =
        max_incidence(points, d, Predicate::SphereOrPlane, options.mode, ring, options.budget)?;
    let plane = if options.plane_only {
        let (plane, more) =
            max_incidence(points, d, Predicate::PlaneOnly, options.mode, ring, options.budget)?;
        examined += more;
        Some(plane)
    } else {
        None
    };
    Ok(VerificationReport {
        d,
        points: points.len(),
        ring: if ring.p().is_some() { "modp" } else { "int" }.to_string(),
        p: ring.p(),
        mode: options.mode,
        max_on_sphere_or_plane: sphere,
        max_on_plane: plane,
        subsets_examined: examined,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// For a nice `P` of degree `k` with `k` distinct nonzero roots, checks
/// `Σ r⁻¹ = 0`.
pub fn vieta_check(poly: &DensePolynomial, roots: &[u64]) -> Result<bool, VerifyError> {
    let ctx = *poly.ctx();
    let fail = |msg: String| Err(VerifyError::PreconditionViolated(msg));
    if !poly.is_nice() {
        return fail(format!("linear coefficient is {}, not 0", poly.linear_coefficient()));
    }
    if poly.degree() != Some(roots.len()) {
        return fail(format!("degree {:?} differs from the {} roots", poly.degree(), roots.len()));
    }
    for (i, &r) in roots.iter().enumerate() {
        if ctx.reduce(r) == 0 {
            return fail(format!("root {i} is zero"));
        }
        if roots[..i].iter().any(|&s| ctx.reduce(s) == ctx.reduce(r)) {
            return fail(format!("root {r} repeats"));
        }
        if poly.eval(ctx.reduce(r)) != 0 {
            return fail(format!("P({r}) ≠ 0"));
        }
    }
    let sum = roots.iter().fold(0, |acc, &r| ctx.add(acc, ctx.inv(ctx.reduce(r)).expect("nonzero")));
    Ok(sum == 0)
}

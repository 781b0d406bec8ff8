//! Construction of the polynomial system `f_1, ..., f_d, g, h` over `F_p` with
//!
//! * identity: `f_1² + ... + f_d² = g·h`,
//! * degree: `deg f_i = d`, `deg g = d − 1`, `deg h = d + 1`,
//! * independence: the `d + 2` polynomials are linearly independent,
//! * vanish (strict mode): `f_1, ..., f_d, h` have no linear term.
//!
//! The `f_i` interpolate the rows of a banded matrix `A` whose columns have
//! vanishing sum of squares, at the nodes `λ_i = i − 1`. Every property is
//! re-checked at runtime by [`validate_system`].

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{next_admissible_prime, FieldContext, FieldError, PrimeThreshold};
use crate::linalg::det_mod_p;
use crate::poly::{node_product, rank_of_span, DensePolynomial, PolyError};

/// Retry limit when strict-mode tweaks degenerate.
pub const MAX_PRIME_RETRIES: usize = 20;

/// Values of `ν_2` scanned by the extended tweak.
const MAX_SECOND_NU: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// No `d + 2` points on a sphere or plane.
    Full,
    /// Additionally no `d + 1` points on a plane.
    Strict,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Full => "full",
            Mode::Strict => "strict",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("interpolation check failed: f_{i}(λ_{j}) != a_{i},{j}")]
    InterpolationCheckFailed { i: usize, j: usize },
    #[error("leading coefficient of the sum of squares is {found}, expected d = {expected}")]
    LeadingCoefficient { found: u64, expected: u64 },
    #[error("no basis polynomial g_j with j >= 2 lies outside the span of the f_i")]
    NoValidG,
    #[error("selected g_{index} has no linear term")]
    GIsNice { index: usize },
    #[error("the niceness tweak degenerates at p = {p}: {report}")]
    DegenerateTweak { p: u64, report: ValidationReport },
    #[error("tweak requires an untweaked full-mode system")]
    AlreadyTweaked,
    #[error("tweak formula disagrees with exact division")]
    TweakFormulaMismatch,
    #[error("constructed system failed validation: {0}")]
    ValidationFailed(ValidationReport),
    #[error("gave up after {} degenerate primes: {:?}", rejected.len(), rejected)]
    RetriesExhausted { rejected: Vec<u64> },
}

/// The banded `d × d` matrix: ones on the diagonal, `α` below it, `±α` in the
/// top-right corner.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionMatrix {
    pub entries: Vec<Vec<u64>>,
    /// `+1` or `−1`, the sign of the corner entry.
    pub sign_choice: i8,
}

impl ConstructionMatrix {
    /// Prefers `+α` in the corner and flips to `−α` when that makes `A` singular.
    pub fn build(ctx: &FieldContext) -> Self {
        let d = ctx.d();
        let alpha = ctx.alpha();
        let banded = |corner: u64| {
            let mut a = vec![vec![0u64; d]; d];
            for (i, row) in a.iter_mut().enumerate() {
                row[i] = 1;
                if i > 0 {
                    row[i - 1] = alpha;
                }
            }
            a[0][d - 1] = corner;
            a
        };
        let plus = ConstructionMatrix { entries: banded(alpha), sign_choice: 1 };
        if plus.determinant(ctx) != 0 {
            return plus;
        }
        let minus = ConstructionMatrix { entries: banded(ctx.neg(alpha)), sign_choice: -1 };
        assert_ne!(minus.determinant(ctx), 0, "both corner signs singular");
        minus
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn determinant(&self, ctx: &FieldContext) -> u64 {
        det_mod_p(*ctx, &mut self.entries.clone())
    }

    pub fn column_square_sums(&self, ctx: &FieldContext) -> Vec<u64> {
        (0..self.dim())
            .map(|j| {
                self.entries
                    .iter()
                    .fold(0, |acc, row| ctx.add(acc, ctx.mul(row[j], row[j])))
            })
            .collect()
    }
}

/// Which `g` the niceness adjustment was solved against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TweakVariant {
    /// `g = g_j` with `j ≥ 2`, so `g(0) = 0` and `ν` solves a linear equation.
    Standard,
    /// Any admissible `g_j`, with `ν_1 t g` on `f_1` and `ν_2 t g` on `f_2`.
    Extended,
}

/// Whether strict-mode construction may fall back to [`TweakVariant::Extended`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TweakPolicy {
    StandardOnly,
    #[default]
    WithFallback,
}

/// The coefficients `μ_1..μ_d` and `ν` of the niceness adjustment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tweak {
    pub mu: Vec<u64>,
    pub nu: u64,
    /// Coefficient of `t g` added to `f_2`; always zero in the standard variant.
    pub second_nu: u64,
    pub variant: TweakVariant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveSystem {
    pub ctx: FieldContext,
    pub mode: Mode,
    pub matrix: ConstructionMatrix,
    /// Interpolation nodes `λ_i = i − 1`.
    pub lambda: Vec<u64>,
    pub f: Vec<DensePolynomial>,
    pub g: DensePolynomial,
    pub h: DensePolynomial,
    /// 1-based index `j` of the basis polynomial chosen as `g = g_j`.
    pub g_index: usize,
    pub tweak: Option<Tweak>,
}

/// The Lagrange-type basis `g_j = ∏_{k≠j} (t − λ_k)`.
pub fn basis_polynomials(
    ctx: &FieldContext,
    lambda: &[u64],
) -> Result<Vec<DensePolynomial>, PolyError> {
    (0..lambda.len())
        .map(|j| node_product(*ctx, lambda, Some(j)))
        .collect()
}

pub fn nodes(ctx: &FieldContext) -> Vec<u64> {
    (0..ctx.d() as u64).collect()
}

/// `f_i = Σ_j a_ij / g_j(λ_j) · g_j + ∏_j (t − λ_j)`, so that `f_i(λ_j) = a_ij`.
pub fn build_f_family(
    matrix: &ConstructionMatrix,
    ctx: &FieldContext,
) -> Result<Vec<DensePolynomial>, CurveError> {
    let lambda = nodes(ctx);
    let basis = basis_polynomials(ctx, &lambda)?;
    let full = node_product(*ctx, &lambda, None)?;
    let scaled: Vec<DensePolynomial> = basis
        .iter()
        .zip(&lambda)
        .map(|(gj, &lj)| Ok(gj.scale(ctx.inv(gj.eval(lj))?)))
        .collect::<Result<_, FieldError>>()?;

    let mut family = Vec::with_capacity(ctx.d());
    for (i, row) in matrix.entries.iter().enumerate() {
        let fi = row
            .iter()
            .zip(&scaled)
            .fold(full.clone(), |acc, (&a, gj)| &acc + &gj.scale(a));
        for (j, &lj) in lambda.iter().enumerate() {
            if fi.eval(lj) != row[j] {
                return Err(CurveError::InterpolationCheckFailed { i: i + 1, j: j + 1 });
            }
        }
        family.push(fi);
    }
    Ok(family)
}

/// The first `g_j`, `j ≥ 2`, outside the span of the `f_i`; returns it with its 1-based index.
pub fn select_g(
    family: &[DensePolynomial],
    basis: &[DensePolynomial],
) -> Result<(DensePolynomial, usize), CurveError> {
    let d = family.len();
    for (j, gj) in basis.iter().enumerate().skip(1) {
        let mut span = family.to_vec();
        span.push(gj.clone());
        if rank_of_span(&span, d)? == d + 1 {
            assert_eq!(gj.eval(0), 0, "g_j for j >= 2 contains the factor t");
            if gj.is_nice() {
                return Err(CurveError::GIsNice { index: j + 1 });
            }
            return Ok((gj.clone(), j + 1));
        }
    }
    Err(CurveError::NoValidG)
}

pub fn sum_of_squares(family: &[DensePolynomial]) -> DensePolynomial {
    let ctx = *family[0].ctx();
    family
        .iter()
        .fold(DensePolynomial::zero(ctx), |acc, f| &acc + &(f * f))
}

/// `h = (f_1² + ... + f_d²) / g`, which must divide exactly.
pub fn compute_h(
    family: &[DensePolynomial],
    g: &DensePolynomial,
) -> Result<DensePolynomial, CurveError> {
    let ctx = *g.ctx();
    let sum = sum_of_squares(family);
    let expected = ctx.reduce(family.len() as u64);
    if sum.degree() != Some(2 * family.len()) || sum.leading_coefficient() != expected {
        return Err(CurveError::LeadingCoefficient { found: sum.leading_coefficient(), expected });
    }
    Ok(sum.exact_div(g)?)
}

impl CurveSystem {
    /// Runs the construction at a fixed prime.
    pub fn build(ctx: FieldContext, mode: Mode) -> Result<Self, CurveError> {
        Self::build_with_policy(ctx, mode, TweakPolicy::default())
    }

    pub fn build_with_policy(
        ctx: FieldContext,
        mode: Mode,
        policy: TweakPolicy,
    ) -> Result<Self, CurveError> {
        let full = Self::build_full(ctx)?;
        match (mode, policy) {
            (Mode::Full, _) => Ok(full),
            (Mode::Strict, TweakPolicy::StandardOnly) => full.apply_nice_tweak(),
            (Mode::Strict, TweakPolicy::WithFallback) => match full.apply_nice_tweak() {
                Err(CurveError::DegenerateTweak { .. }) => full.apply_alternative_tweak(),
                other => other,
            },
        }
    }

    fn build_full(ctx: FieldContext) -> Result<Self, CurveError> {
        let matrix = ConstructionMatrix::build(&ctx);
        let lambda = nodes(&ctx);
        let f = build_f_family(&matrix, &ctx)?;
        let basis = basis_polynomials(&ctx, &lambda)?;
        let (g, g_index) = select_g(&f, &basis)?;
        let h = compute_h(&f, &g)?;
        let system = CurveSystem { ctx, mode: Mode::Full, matrix, lambda, f, g, h, g_index, tweak: None };
        let report = validate_system(&system);
        if !report.passed() {
            return Err(CurveError::ValidationFailed(report));
        }
        Ok(system)
    }

    /// Adds multiples of `g` to the `f_i` (and `ν t g` to `f_1`) so that every
    /// `f_i` and the new `h` lose their linear terms.
    pub fn apply_nice_tweak(&self) -> Result<CurveSystem, CurveError> {
        if self.mode != Mode::Full || self.tweak.is_some() {
            return Err(CurveError::AlreadyTweaked);
        }
        let ctx = self.ctx;
        let g = &self.g;
        let g_lin_inv = ctx
            .inv(g.linear_coefficient())
            .map_err(|_| CurveError::GIsNice { index: self.g_index })?;
        assert_eq!(g.eval(0), 0);
        let mu: Vec<u64> = self
            .f
            .iter()
            .map(|fi| ctx.neg(ctx.mul(fi.linear_coefficient(), g_lin_inv)))
            .collect();

        // h + Σ μ_i (2 f_i + μ_i g), whose linear coefficient fixes ν
        let base = self.f.iter().zip(&mu).fold(self.h.clone(), |acc, (fi, &m)| {
            &acc + &(&fi.scale(2) + &g.scale(m)).scale(m)
        });
        debug_assert_eq!(self.f[0].eval(0), 1);
        let half = ctx.inv(2)?;
        let nu = ctx.neg(ctx.mul(base.linear_coefficient(), half));

        let t = DensePolynomial::t(ctx);
        let mut f: Vec<DensePolynomial> = self
            .f
            .iter()
            .zip(&mu)
            .map(|(fi, &m)| fi + &g.scale(m))
            .collect();
        let nu_t = t.scale(nu);
        f[0] = &f[0] + &(&nu_t * g);

        let h = sum_of_squares(&f).exact_div(g)?;
        // second route: h̃ = base + 2 (f_1 + μ_1 g) ν t + ν² t² g
        let shifted_f1 = &self.f[0] + &g.scale(mu[0]);
        let closed_form = &(&base + &(&shifted_f1 * &nu_t).scale(2)) + &(&(&nu_t * &nu_t) * g);
        if closed_form != h {
            return Err(CurveError::TweakFormulaMismatch);
        }

        let tweaked = CurveSystem {
            ctx,
            mode: Mode::Strict,
            matrix: self.matrix.clone(),
            lambda: self.lambda.clone(),
            f,
            g: g.clone(),
            h,
            g_index: self.g_index,
            tweak: Some(Tweak { mu, nu, second_nu: 0, variant: TweakVariant::Standard }),
        };
        let report = validate_system(&tweaked);
        if !report.passed() {
            return Err(CurveError::DegenerateTweak { p: ctx.p(), report });
        }
        Ok(tweaked)
    }

    /// Extended niceness adjustment, used when the standard variant degenerates.
    ///
    /// Every `f_i` may receive `(μ_i + ν_i t) g` for any basis polynomial
    /// `g = g_j` outside the span of the `f_i`. The `μ_i` cancel the linear
    /// terms of the `f_i`; for each `ν_2` in `0, 1, ...` (all other `ν_i = 0`
    /// for `i ≥ 3`) the linear coefficient of the new `h` is a quadratic in
    /// `ν_1`, whose roots are tried in increasing order. The first candidate
    /// passing [`validate_system`] wins. At `d = 2` the standard variant loses `h`
    /// at every prime, so this is the only route there.
    pub fn apply_alternative_tweak(&self) -> Result<CurveSystem, CurveError> {
        if self.mode != Mode::Full || self.tweak.is_some() {
            return Err(CurveError::AlreadyTweaked);
        }
        let ctx = self.ctx;
        let d = self.d();
        let basis = basis_polynomials(&ctx, &self.lambda)?;
        let mut last_report = None;
        for (j, gj) in basis.iter().enumerate() {
            if gj.is_nice() {
                continue;
            }
            let mut span = self.f.clone();
            span.push(gj.clone());
            if rank_of_span(&span, d)? != d + 1 {
                continue;
            }
            for second_nu in 0..ctx.p().min(MAX_SECOND_NU) {
                for nu in self.alternative_nu_candidates(gj, second_nu)? {
                    let candidate = self.tweak_against(gj, j + 1, nu, second_nu)?;
                    let report = validate_system(&candidate);
                    if report.passed() {
                        return Ok(candidate);
                    }
                    last_report = Some(report);
                }
            }
        }
        let report = last_report.unwrap_or_else(|| ValidationReport {
            checks: vec![Check {
                name: "vanish".to_string(),
                passed: false,
                detail: "no extended adjustment makes h nice".to_string(),
            }],
        });
        Err(CurveError::DegenerateTweak { p: ctx.p(), report })
    }

    fn tweak_against(
        &self,
        g: &DensePolynomial,
        g_index: usize,
        nu: u64,
        second_nu: u64,
    ) -> Result<CurveSystem, CurveError> {
        let ctx = self.ctx;
        let g_lin_inv = ctx.inv(g.linear_coefficient())?;
        let g0 = g.eval(0);
        let t = DensePolynomial::t(ctx);
        let mut mu = Vec::with_capacity(self.f.len());
        let mut f = Vec::with_capacity(self.f.len());
        for (i, fi) in self.f.iter().enumerate() {
            let nu_i = match i {
                0 => nu,
                1 => second_nu,
                _ => 0,
            };
            // [t]((μ + ν t) g) = μ [t]g + ν g(0)
            let lin = ctx.add(fi.linear_coefficient(), ctx.mul(nu_i, g0));
            let mu_i = ctx.neg(ctx.mul(lin, g_lin_inv));
            let shift = &DensePolynomial::constant(ctx, mu_i) + &t.scale(nu_i);
            f.push(fi + &(&shift * g));
            mu.push(mu_i);
        }
        let h = sum_of_squares(&f).exact_div(g)?;
        Ok(CurveSystem {
            ctx,
            mode: Mode::Strict,
            matrix: self.matrix.clone(),
            lambda: self.lambda.clone(),
            f,
            g: g.clone(),
            h,
            g_index,
            tweak: Some(Tweak { mu, nu, second_nu, variant: TweakVariant::Extended }),
        })
    }

    /// Roots in `ν_1` of the linear coefficient of the adjusted `h`, ascending.
    fn alternative_nu_candidates(
        &self,
        g: &DensePolynomial,
        second_nu: u64,
    ) -> Result<Vec<u64>, CurveError> {
        let ctx = self.ctx;
        let phi = |nu: u64| -> Result<u64, CurveError> {
            Ok(self.tweak_against(g, 0, nu, second_nu)?.h.linear_coefficient())
        };
        let (v0, v1, v2) = (phi(0)?, phi(1)?, phi(2)?);
        // φ(ν) = a ν² + b ν + c through the three samples
        let a = ctx.mul(ctx.add(ctx.sub(v2, ctx.mul(2, v1)), v0), ctx.inv(2)?);
        let b = ctx.sub(ctx.sub(v1, v0), a);
        let c = v0;
        let mut roots = Vec::new();
        if a == 0 {
            if b != 0 {
                roots.push(ctx.neg(ctx.mul(c, ctx.inv(b)?)));
            }
        } else {
            let disc = ctx.sub(ctx.mul(b, b), ctx.mul(4, ctx.mul(a, c)));
            if let Some(s) = crate::field::sqrt_mod(disc, ctx.p()) {
                let inv_2a = ctx.inv(ctx.mul(2, a))?;
                for root in [ctx.add(ctx.neg(b), s), ctx.sub(ctx.neg(b), s)] {
                    roots.push(ctx.mul(root, inv_2a));
                }
            }
        }
        roots.sort_unstable();
        roots.dedup();
        debug_assert!(roots.iter().all(|&r| phi(r).ok() == Some(0)));
        Ok(roots)
    }

    pub fn d(&self) -> usize {
        self.ctx.d()
    }

    pub fn manifest(&self) -> SystemManifest {
        SystemManifest {
            p: self.ctx.p(),
            alpha: self.ctx.alpha(),
            d: self.d(),
            mode: self.mode,
            lambda: self.lambda.clone(),
            g_index: self.g_index,
            sign_choice: self.matrix.sign_choice,
            f: self.f.iter().map(|f| f.coeffs().to_vec()).collect(),
            g: self.g.coeffs().to_vec(),
            h: self.h.coeffs().to_vec(),
            mu: self.tweak.as_ref().map(|t| t.mu.clone()),
            nu: self.tweak.as_ref().map(|t| t.nu),
            second_nu: self.tweak.as_ref().map(|t| t.second_nu),
            tweak_variant: self.tweak.as_ref().map(|t| t.variant),
        }
    }
}

/// Result of building a system by prime search, with the primes skipped on the way.
#[derive(Debug, Clone)]
pub struct Construction {
    pub system: CurveSystem,
    pub rejected_primes: Vec<u64>,
}

/// Builds at the smallest admissible prime `≥ n`; in strict mode a degenerate
/// tweak moves on to the next admissible prime, at most [`MAX_PRIME_RETRIES`] times.
pub fn construct_for_grid(
    n: u64,
    d: usize,
    mode: Mode,
    threshold: PrimeThreshold,
) -> Result<Construction, CurveError> {
    construct_for_grid_with(n, d, mode, threshold, TweakPolicy::default())
}

pub fn construct_for_grid_with(
    n: u64,
    d: usize,
    mode: Mode,
    threshold: PrimeThreshold,
    policy: TweakPolicy,
) -> Result<Construction, CurveError> {
    let mut ctx = FieldContext::for_grid(n, d, threshold)?;
    let mut rejected = Vec::new();
    loop {
        match CurveSystem::build_with_policy(ctx, mode, policy) {
            Ok(system) => return Ok(Construction { system, rejected_primes: rejected }),
            Err(CurveError::DegenerateTweak { p, .. }) => {
                rejected.push(p);
                if rejected.len() > MAX_PRIME_RETRIES {
                    return Err(CurveError::RetriesExhausted { rejected });
                }
                ctx = FieldContext::new(next_admissible_prime(p)?, d)?;
            }
            Err(e) => return Err(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let failing: Vec<String> = self
            .failures()
            .map(|c| format!("{} ({})", c.name, c.detail))
            .collect();
        if failing.is_empty() {
            write!(f, "all {} checks pass", self.checks.len())
        } else {
            write!(f, "failing: {}", failing.join("; "))
        }
    }
}

fn degree_str(f: &DensePolynomial) -> String {
    f.degree().map_or("-inf".to_string(), |d| d.to_string())
}

/// Recomputes every structural property from the coefficients alone.
pub fn validate_system(system: &CurveSystem) -> ValidationReport {
    let d = system.d();
    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| {
        checks.push(Check { name: name.to_string(), passed, detail });
    };

    let diff = &sum_of_squares(&system.f) - &(&system.g * &system.h);
    push(
        "identity",
        diff.is_zero(),
        if diff.is_zero() {
            "sum of f_i^2 equals g*h".to_string()
        } else {
            format!("sum of f_i^2 - g*h = {diff}")
        },
    );

    let f_degrees: Vec<String> = system.f.iter().map(degree_str).collect();
    let degree_ok = system.f.len() == d
        && system.f.iter().all(|f| f.degree() == Some(d))
        && system.g.degree() == Some(d - 1)
        && system.h.degree() == Some(d + 1);
    push(
        "degree",
        degree_ok,
        format!(
            "deg f = [{}], deg g = {}, deg h = {}",
            f_degrees.join(", "),
            degree_str(&system.g),
            degree_str(&system.h)
        ),
    );

    let mut all = system.f.clone();
    all.push(system.g.clone());
    all.push(system.h.clone());
    let independence = match rank_of_span(&all, d + 1) {
        Ok(rank) => (rank == d + 2, format!("rank {rank} of {}", d + 2)),
        Err(e) => (false, e.to_string()),
    };
    push("independence", independence.0, independence.1);

    let alternative = system
        .tweak
        .as_ref()
        .is_some_and(|t| t.variant == TweakVariant::Extended);
    let is_basis = (1..=d).contains(&system.g_index)
        && node_product(system.ctx, &system.lambda, Some(system.g_index - 1)).ok().as_ref()
            == Some(&system.g);
    let g_ok = is_basis && (alternative || (system.g.eval(0) == 0 && system.g_index >= 2));
    push(
        "g_choice",
        g_ok,
        format!("g = g_{}, g(0) = {}", system.g_index, system.g.eval(0)),
    );

    if system.mode == Mode::Strict {
        let not_nice: Vec<String> = system
            .f
            .iter()
            .enumerate()
            .filter(|(_, f)| !f.is_nice())
            .map(|(i, _)| format!("f_{}", i + 1))
            .chain((!system.h.is_nice()).then(|| "h".to_string()))
            .collect();
        let vanish = not_nice.is_empty() && !system.g.is_nice();
        let detail = if vanish {
            "f_i and h nice, g not nice".to_string()
        } else if system.g.is_nice() {
            "g has no linear term".to_string()
        } else {
            format!("not nice: {}", not_nice.join(", "))
        };
        push("vanish", vanish, detail);
    }
    ValidationReport { checks }
}

/// Serializable description of a built system, coefficients listed from `t^0` upward.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemManifest {
    pub p: u64,
    pub alpha: u64,
    pub d: usize,
    pub mode: Mode,
    pub lambda: Vec<u64>,
    pub g_index: usize,
    pub sign_choice: i8,
    pub f: Vec<Vec<u64>>,
    pub g: Vec<u64>,
    pub h: Vec<u64>,
    pub mu: Option<Vec<u64>>,
    pub nu: Option<u64>,
    pub second_nu: Option<u64>,
    pub tweak_variant: Option<TweakVariant>,
}

//! Dense univariate polynomials over `F_p`.
//!
//! Everything the curve construction needs has degree at most `d + 1 ≤ 12`
//! (products reach `2d + 2`), so the representation is a plain coefficient
//! vector and multiplication is schoolbook.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::field::FieldContext;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("operands live in different fields (p = {0} vs p = {1})")]
    ContextMismatch(u64, u64),
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("division is not exact, remainder {remainder}")]
    InexactDivision { remainder: DensePolynomial },
    #[error("interpolation nodes are not distinct")]
    DuplicateNodes,
    #[error("polynomial of degree {degree} exceeds the bound {bound}")]
    DegreeBoundExceeded { degree: usize, bound: usize },
}

/// Coefficients `c_0, c_1, ...` of `c_0 + c_1 t + ...` with trailing zeros trimmed.
/// The zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensePolynomial {
    coeffs: Vec<u64>,
    ctx: FieldContext,
}

impl DensePolynomial {
    /// Builds a polynomial from arbitrary `u64` coefficients, reducing them mod `p`.
    pub fn new(ctx: FieldContext, coeffs: impl IntoIterator<Item = u64>) -> Self {
        let coeffs = coeffs.into_iter().map(|c| ctx.reduce(c)).collect();
        let mut poly = DensePolynomial { coeffs, ctx };
        poly.trim();
        poly
    }

    /// Builds a polynomial from signed coefficients.
    pub fn from_signed(ctx: FieldContext, coeffs: &[i64]) -> Self {
        DensePolynomial::new(ctx, coeffs.iter().map(|&c| ctx.from_i64(c)))
    }

    pub fn zero(ctx: FieldContext) -> Self {
        DensePolynomial { coeffs: Vec::new(), ctx }
    }

    pub fn constant(ctx: FieldContext, c: u64) -> Self {
        DensePolynomial::new(ctx, [c])
    }

    /// The monomial `t`.
    pub fn t(ctx: FieldContext) -> Self {
        DensePolynomial::new(ctx, [0, 1])
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn ctx(&self) -> &FieldContext {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Coefficient of `t^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coefficient(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn linear_coefficient(&self) -> u64 {
        self.coeff(1)
    }

    /// A polynomial is nice when its coefficient of `t` vanishes.
    pub fn is_nice(&self) -> bool {
        self.linear_coefficient() == 0
    }

    pub fn eval(&self, t0: u64) -> u64 {
        let t0 = self.ctx.reduce(t0);
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| self.ctx.add(self.ctx.mul(acc, t0), c))
    }

    fn check_ctx(&self, other: &DensePolynomial) -> Result<(), PolyError> {
        if self.ctx.p() != other.ctx.p() {
            return Err(PolyError::ContextMismatch(self.ctx.p(), other.ctx.p()));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &DensePolynomial) -> Result<DensePolynomial, PolyError> {
        self.check_ctx(other)?;
        let ctx = self.ctx;
        let len = self.coeffs.len().max(other.coeffs.len());
        Ok(DensePolynomial::new(
            ctx,
            (0..len).map(|i| ctx.add(self.coeff(i), other.coeff(i))),
        ))
    }

    pub fn checked_sub(&self, other: &DensePolynomial) -> Result<DensePolynomial, PolyError> {
        self.check_ctx(other)?;
        let ctx = self.ctx;
        let len = self.coeffs.len().max(other.coeffs.len());
        Ok(DensePolynomial::new(
            ctx,
            (0..len).map(|i| ctx.sub(self.coeff(i), other.coeff(i))),
        ))
    }

    pub fn checked_mul(&self, other: &DensePolynomial) -> Result<DensePolynomial, PolyError> {
        self.check_ctx(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(DensePolynomial::zero(self.ctx));
        }
        let ctx = self.ctx;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = ctx.add(out[i + j], ctx.mul(a, b));
            }
        }
        Ok(DensePolynomial::new(ctx, out))
    }

    pub fn scale(&self, c: u64) -> DensePolynomial {
        let ctx = self.ctx;
        let c = ctx.reduce(c);
        DensePolynomial::new(ctx, self.coeffs.iter().map(|&a| ctx.mul(a, c)))
    }

    /// Euclidean division, returning `(quotient, remainder)`.
    pub fn div_rem(
        &self,
        den: &DensePolynomial,
    ) -> Result<(DensePolynomial, DensePolynomial), PolyError> {
        self.check_ctx(den)?;
        let den_deg = den.degree().ok_or(PolyError::DivisionByZero)?;
        let ctx = self.ctx;
        let lead_inv = ctx
            .inv(den.leading_coefficient())
            .expect("leading coefficient is nonzero");
        let mut rem = self.coeffs.clone();
        let Some(num_deg) = self.degree().filter(|&n| n >= den_deg) else {
            return Ok((DensePolynomial::zero(ctx), self.clone()));
        };
        let mut quot = vec![0u64; num_deg - den_deg + 1];
        for k in (0..quot.len()).rev() {
            let c = ctx.mul(rem[k + den_deg], lead_inv);
            quot[k] = c;
            if c == 0 {
                continue;
            }
            for (j, &b) in den.coeffs.iter().enumerate() {
                rem[k + j] = ctx.sub(rem[k + j], ctx.mul(c, b));
            }
        }
        rem.truncate(den_deg);
        Ok((DensePolynomial::new(ctx, quot), DensePolynomial::new(ctx, rem)))
    }

    /// Quotient `q` with `self = den · q`, or the nonzero remainder as an error.
    pub fn exact_div(&self, den: &DensePolynomial) -> Result<DensePolynomial, PolyError> {
        let (q, r) = self.div_rem(den)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(PolyError::InexactDivision { remainder: r })
        }
    }

    /// Signed view of the coefficients, each in `(-p/2, p/2]`.
    pub fn balanced_coeffs(&self) -> Vec<i64> {
        let p = self.ctx.p();
        self.coeffs
            .iter()
            .map(|&c| if c > p / 2 { c as i64 - p as i64 } else { c as i64 })
            .collect()
    }
}

/// `∏ (t − λ_k)` over all nodes except position `skip` (0-based), if given.
pub fn node_product(
    ctx: FieldContext,
    nodes: &[u64],
    skip: Option<usize>,
) -> Result<DensePolynomial, PolyError> {
    let reduced: Vec<u64> = nodes.iter().map(|&x| ctx.reduce(x)).collect();
    for (i, a) in reduced.iter().enumerate() {
        if reduced[i + 1..].contains(a) {
            return Err(PolyError::DuplicateNodes);
        }
    }
    let mut acc = DensePolynomial::constant(ctx, 1);
    for (k, &lambda) in reduced.iter().enumerate() {
        if Some(k) == skip {
            continue;
        }
        acc = &acc * &DensePolynomial::new(ctx, [ctx.neg(lambda), 1]);
    }
    Ok(acc)
}

/// Rank over `F_p` of the coefficient matrix whose rows are the given
/// polynomials and whose columns are the coefficients of `t^0 ..= t^bound`.
pub fn rank_of_span(polys: &[DensePolynomial], bound: usize) -> Result<usize, PolyError> {
    let Some(first) = polys.first() else {
        return Ok(0);
    };
    let ctx = *first.ctx();
    for f in polys {
        first.check_ctx(f)?;
        if let Some(deg) = f.degree().filter(|&deg| deg > bound) {
            return Err(PolyError::DegreeBoundExceeded { degree: deg, bound });
        }
    }
    let rows: Vec<Vec<u64>> = polys
        .iter()
        .map(|f| (0..=bound).map(|i| f.coeff(i)).collect())
        .collect();
    Ok(crate::linalg::rank_mod_p(ctx, rows))
}

/// Renders as `c0 + c1*t + c2*t^2 (mod p)`, every coefficient up to the degree.
impl fmt::Display for DensePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0 (mod {})", self.ctx.p());
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*t")?,
                _ => write!(f, "{c}*t^{i}")?,
            }
        }
        write!(f, " (mod {})", self.ctx.p())
    }
}

// Operator forms panic on mismatched fields; use the `checked_*` methods when
// operands may come from different contexts.
impl Add for &DensePolynomial {
    type Output = DensePolynomial;
    fn add(self, rhs: &DensePolynomial) -> DensePolynomial {
        self.checked_add(rhs).expect("polynomial add")
    }
}

impl Sub for &DensePolynomial {
    type Output = DensePolynomial;
    fn sub(self, rhs: &DensePolynomial) -> DensePolynomial {
        self.checked_sub(rhs).expect("polynomial sub")
    }
}

impl Mul for &DensePolynomial {
    type Output = DensePolynomial;
    fn mul(self, rhs: &DensePolynomial) -> DensePolynomial {
        self.checked_mul(rhs).expect("polynomial mul")
    }
}

impl Neg for &DensePolynomial {
    type Output = DensePolynomial;
    fn neg(self) -> DensePolynomial {
        let ctx = self.ctx;
        DensePolynomial::new(ctx, self.coeffs.iter().map(|&c| ctx.neg(c)))
    }
}

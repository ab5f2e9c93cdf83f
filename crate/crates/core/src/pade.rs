//! [L/M] Padé approximants by the linear-system ("matrix") method.
//!
//! The denominator `b` (normalized so `b[0] = 1`) solves the M×M system that
//! makes the coefficients of orders `L+1..=L+M` of `f·b` vanish; the numerator
//! is then the truncated product `a[i] = sum_{m<=i} b[m] f[i-m]`.
//!
//! Before solving, the series variable is rescaled by a power of two so the
//! coefficients have unit geometric growth. The rescaling is exact in binary
//! arithmetic and keeps the singularity test meaningful for series whose
//! coefficients grow like `R^k`.

use rayon::prelude::*;
use rug::Float;
use thiserror::Error;

use crate::kernel::{BigComplex, KernelError, PrecisionContext};
use crate::series::{horner, ExpansionPoint, PowerSeries};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PadeError {
    #[error("[{l}/{m}] needs {need} series coefficients, only {have} available")]
    TooFewCoefficients { l: usize, m: usize, need: usize, have: usize },
    #[error("[{l}/{m}] linear system is singular at working precision; [{l}/{max_m}] is solvable")]
    Degenerate { l: usize, m: usize, max_m: usize },
    #[error("evaluation too close to a pole: numerator {num:.12}, denominator {den:.12}")]
    NearPole { num: BigComplex, den: BigComplex },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PadeApproximant {
    num: Vec<BigComplex>,
    den: Vec<BigComplex>,
    expansion: ExpansionPoint,
    ctx: PrecisionContext,
}

impl PadeApproximant {
    /// Wraps explicit coefficients; `den[0]` must be 1.
    pub fn from_coefficients(
        num: Vec<BigComplex>,
        den: Vec<BigComplex>,
        expansion: ExpansionPoint,
        ctx: PrecisionContext,
    ) -> Option<Self> {
        if num.is_empty() || den.first() != Some(&ctx.one()) {
            return None;
        }
        Some(PadeApproximant { num, den, expansion, ctx })
    }

    pub fn l(&self) -> usize {
        self.num.len() - 1
    }

    pub fn m(&self) -> usize {
        self.den.len() - 1
    }

    pub fn numerator(&self) -> &[BigComplex] {
        &self.num
    }

    pub fn denominator(&self) -> &[BigComplex] {
        &self.den
    }

    pub fn expansion(&self) -> ExpansionPoint {
        self.expansion
    }

    pub fn ctx(&self) -> PrecisionContext {
        self.ctx
    }

    /// Value at the series variable `t` (use `1/z` for expansions at
    /// infinity). Fails when the denominator has cancelled to below
    /// `2^(-bits/2)` of its term scale.
    pub fn evaluate(&self, t: &BigComplex) -> Result<BigComplex, PadeError> {
        let t = t.with_prec(self.ctx.bits());
        let n = horner(&self.num, &t);
        let d = horner(&self.den, &t);
        let scale = term_scale(&self.den, &t);
        let floor = Float::with_val(self.ctx.bits(), &scale * &self.ctx.pow2(-(self.ctx.bits() as i32) / 2));
        if d.abs() <= floor {
            return Err(PadeError::NearPole { num: n, den: d });
        }
        Ok(n.checked_div(&d)?)
    }

    /// Value at a point `z` of the function's own plane.
    pub fn value_at(&self, z: &BigComplex) -> Result<BigComplex, PadeError> {
        let t = self.expansion.variable_at(&z.with_prec(self.ctx.bits()))?;
        self.evaluate(&t)
    }

    /// Maclaurin coefficients of `num/den` through order `n`.
    pub fn reexpand(&self, n: usize) -> Vec<BigComplex> {
        let mut c: Vec<BigComplex> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut s = self.num.get(k).cloned().unwrap_or_else(|| self.ctx.zero());
            for j in 1..=k.min(self.m()) {
                s = &s - &(&self.den[j] * &c[k - j]);
            }
            c.push(s);
        }
        c
    }
}

/// First order at which `pa` and `series` disagree (the accuracy-through-order
/// of the approximant plus one), capped at the series length. Coefficients
/// are compared after the growth rescaling used by [`build`], relative to the
/// largest rescaled coefficient, at `2^(-bits/2)`.
pub fn contact_order(pa: &PadeApproximant, series: &PowerSeries) -> usize {
    let n = series.len();
    let ctx = series.ctx();
    let e = growth_exponent(series.coeffs());
    let r = pa.reexpand(n - 1);
    let diffs: Vec<BigComplex> = (0..n)
        .map(|k| shift(&(&r[k] - &series.coeffs()[k]), -e * k as i64))
        .collect();
    let scale = series
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| shift(c, -e * k as i64).abs())
        .fold(Float::new(ctx.bits()), |m, a| if a > m { a } else { m });
    let tol = Float::with_val(ctx.bits(), &scale * &ctx.pow2(-(ctx.bits() as i32) / 2));
    diffs.iter().position(|d| d.abs() > tol).unwrap_or(n)
}

/// `sum |c_k| |t|^k`
fn term_scale(coeffs: &[BigComplex], t: &BigComplex) -> Float {
    let r = t.abs();
    let mut acc = Float::new(t.prec());
    for c in coeffs.iter().rev() {
        acc *= &r;
        acc += c.abs();
    }
    acc
}

/// Exponent `e` with `2^e` close to the geometric growth rate of `f[1..=n]`.
fn growth_exponent(coeffs: &[BigComplex]) -> i64 {
    let mut best: Option<f64> = None;
    for (k, c) in coeffs.iter().enumerate().skip(1) {
        if c.is_zero() {
            continue;
        }
        // log2|c| / k without leaving arbitrary-precision range
        let l = Float::with_val(64, c.abs().log2_ref()).to_f64() / k as f64;
        best = Some(best.map_or(l, |b: f64| b.max(l)));
    }
    best.map_or(0, |b| b.round() as i64)
}

/// Builds `[l/m]` from the first `l+m+1` coefficients of `series`.
pub fn build(series: &PowerSeries, l: usize, m: usize) -> Result<PadeApproximant, PadeError> {
    let need = l + m + 1;
    if series.len() < need {
        return Err(PadeError::TooFewCoefficients { l, m, need, have: series.len() });
    }
    let ctx = series.ctx();
    let e = growth_exponent(&series.coeffs()[..need]);
    let scaled: Vec<BigComplex> = series.coeffs()[..need]
        .iter()
        .enumerate()
        .map(|(k, c)| shift(c, -e * k as i64))
        .collect();
    let b_scaled = match solve_denominator(&scaled, l, m, ctx) {
        Some(b) => b,
        None => {
            let max_m = largest_solvable(&scaled, l, m, ctx);
            return Err(PadeError::Degenerate { l, m, max_m });
        }
    };
    let a_scaled: Vec<BigComplex> = (0..=l)
        .map(|i| {
            let mut s = ctx.zero();
            for j in 0..=i.min(m) {
                s = &s + &(&b_scaled[j] * &scaled[i - j]);
            }
            s
        })
        .collect();
    let num = a_scaled.iter().enumerate().map(|(i, c)| shift(c, e * i as i64)).collect();
    let den = b_scaled.iter().enumerate().map(|(j, c)| shift(c, e * j as i64)).collect();
    Ok(PadeApproximant {
        num,
        den,
        expansion: series.expansion(),
        ctx,
    })
}

/// Builds `[l/m]`, falling back to the largest solvable `[l/m']` when the
/// system is degenerate. Returns the approximant actually built.
pub fn build_reducing(series: &PowerSeries, l: usize, m: usize) -> Result<PadeApproximant, PadeError> {
    match build(series, l, m) {
        Err(PadeError::Degenerate { max_m, .. }) => build(series, l, max_m),
        other => other,
    }
}

/// `[m/m+1]` for every requested `m`, built concurrently from one series.
pub fn near_diagonal_sequence(series: &PowerSeries, degrees: &[usize]) -> Vec<Result<PadeApproximant, PadeError>> {
    degrees.par_iter().map(|&m| build(series, m, m + 1)).collect()
}

fn shift(c: &BigComplex, exp: i64) -> BigComplex {
    let p = c.prec();
    let e = exp as i32;
    BigComplex::from_parts(p, &(Float::with_val(p, c.re()) << e), &(Float::with_val(p, c.im()) << e))
}

fn largest_solvable(f: &[BigComplex], l: usize, m: usize, ctx: PrecisionContext) -> usize {
    (1..m).rev().find(|&mm| solve_denominator(f, l, mm, ctx).is_some()).unwrap_or(0)
}

/// Solves for `b[0..=m]` with `b[0] = 1`; `None` when numerically singular.
fn solve_denominator(f: &[BigComplex], l: usize, m: usize, ctx: PrecisionContext) -> Option<Vec<BigComplex>> {
    let coeff = |k: isize| -> BigComplex {
        if k < 0 {
            ctx.zero()
        } else {
            f[k as usize].clone()
        }
    };
    // rows k = 1..=m: sum_j b[j] f[l+k-j] = -f[l+k]
    let mut a: Vec<Vec<BigComplex>> = (1..=m)
        .map(|k| (1..=m).map(|j| coeff(l as isize + k as isize - j as isize)).collect())
        .collect();
    let mut rhs: Vec<BigComplex> = (1..=m).map(|k| -coeff((l + k) as isize)).collect();
    let x = gauss_full_pivot(&mut a, &mut rhs, ctx)?;
    let mut b = Vec::with_capacity(m + 1);
    b.push(ctx.one());
    b.extend(x);
    Some(b)
}

/// Gaussian elimination with complete pivoting. A pivot below
/// `2^(-7 bits / 8)` of the largest matrix entry is treated as singular.
pub(crate) fn gauss_full_pivot(
    a: &mut [Vec<BigComplex>],
    rhs: &mut [BigComplex],
    ctx: PrecisionContext,
) -> Option<Vec<BigComplex>> {
    let n = rhs.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let bits = ctx.bits() as i32;
    let mut col_perm: Vec<usize> = (0..n).collect();
    let mut scale = Float::new(ctx.bits());
    for row in a.iter() {
        for v in row {
            let s = v.norm_sqr();
            if s > scale {
                scale = s;
            }
        }
    }
    if scale.is_zero() {
        return None;
    }
    // compare squared magnitudes
    let threshold = Float::with_val(ctx.bits(), &scale * &ctx.pow2(-2 * (bits - bits / 8)));

    for k in 0..n {
        let (mut pr, mut pc) = (k, k);
        let mut best = Float::new(ctx.bits());
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, v) in row.iter().enumerate().skip(k) {
                let s = v.norm_sqr();
                if s > best {
                    best = s;
                    pr = i;
                    pc = j;
                }
            }
        }
        if best <= threshold {
            return None;
        }
        a.swap(k, pr);
        rhs.swap(k, pr);
        if pc != k {
            for row in a.iter_mut() {
                row.swap(k, pc);
            }
            col_perm.swap(k, pc);
        }
        let inv = a[k][k].recip().ok()?;
        let (upper, lower) = a.split_at_mut(k + 1);
        let pivot_row = &upper[k];
        let pivot_rhs = rhs[k].clone();
        for (offset, row) in lower.iter_mut().enumerate() {
            if row[k].is_zero() {
                continue;
            }
            let factor = &row[k] * &inv;
            for j in k + 1..n {
                row[j] = &row[j] - &(&factor * &pivot_row[j]);
            }
            row[k] = ctx.zero();
            let i = k + 1 + offset;
            rhs[i] = &rhs[i] - &(&factor * &pivot_rhs);
        }
    }

    let mut y = vec![ctx.zero(); n];
    for k in (0..n).rev() {
        let mut s = rhs[k].clone();
        for j in k + 1..n {
            s = &s - &(&a[k][j] * &y[j]);
        }
        y[k] = s.checked_div(&a[k][k]).ok()?;
    }
    let mut x = vec![ctx.zero(); n];
    for (k, v) in y.into_iter().enumerate() {
        x[col_perm[k]] = v;
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn series(c: PrecisionContext, coeffs: &[f64]) -> PowerSeries {
        PowerSeries::new(ExpansionPoint::Zero, coeffs.iter().map(|&x| c.real(x)).collect(), c).unwrap()
    }

    fn near(a: &BigComplex, b: &BigComplex, tol: f64) -> bool {
        (a - b).abs_f64() <= tol
    }

    #[test]
    fn geometric_zero_one() {
        let c = ctx();
        let pa = build(&series(c, &[1.0; 8]), 0, 1).unwrap();
        assert_eq!(pa.numerator(), &[c.one()]);
        assert_eq!(pa.denominator(), &[c.one(), c.real(-1.0)]);
        assert_eq!(pa.evaluate(&c.real(0.5)).unwrap(), c.real(2.0));
    }

    #[test]
    fn exponential_one_one() {
        let c = ctx();
        let pa = build(&series(c, &[1.0, 1.0, 0.5]), 1, 1).unwrap();
        assert!(near(&pa.numerator()[0], &c.one(), 1e-150));
        assert!(near(&pa.numerator()[1], &c.real(0.5), 1e-150));
        assert!(near(&pa.denominator()[1], &c.real(-0.5), 1e-150));
        assert_eq!(pa.evaluate(&c.zero()).unwrap(), c.one());
    }

    #[test]
    fn powers_of_two() {
        let c = ctx();
        let pa = build(&series(c, &[1.0, 2.0, 4.0, 8.0]), 0, 1).unwrap();
        assert!(near(&pa.denominator()[1], &c.real(-2.0), 1e-150));
        assert!(near(&pa.numerator()[0], &c.one(), 1e-150));
    }

    #[test]
    fn too_few_coefficients() {
        let c = ctx();
        assert_eq!(
            build(&series(c, &[1.0, 1.0]), 1, 1),
            Err(PadeError::TooFewCoefficients { l: 1, m: 1, need: 3, have: 2 })
        );
    }

    #[test]
    fn degenerate_system_reports_solvable_order() {
        let c = ctx();
        // 1/(1 - t): every [l/m] with m >= 2 has rank-one rows
        let s = series(c, &[1.0; 12]);
        assert_eq!(build(&s, 3, 4), Err(PadeError::Degenerate { l: 3, m: 4, max_m: 1 }));
        let reduced = build_reducing(&s, 3, 4).unwrap();
        assert_eq!(reduced.m(), 1);
        let want = c.real(4.0).checked_div(&c.real(3.0)).unwrap();
        assert!(near(&reduced.evaluate(&c.real(0.25)).unwrap(), &want, 1e-150));
    }

    #[test]
    fn zero_series_reduces_to_zero_function() {
        let c = ctx();
        let s = series(c, &[0.0; 6]);
        let pa = build_reducing(&s, 2, 3).unwrap();
        assert_eq!(pa.m(), 0);
        assert!(pa.evaluate(&c.real(0.7)).unwrap().is_zero());
    }

    #[test]
    fn near_pole_is_reported() {
        let c = ctx();
        let pa = build(&series(c, &[1.0; 4]), 0, 1).unwrap();
        assert!(matches!(pa.evaluate(&c.one()), Err(PadeError::NearPole { .. })));
    }

    #[test]
    fn sequence_keeps_going_past_failures() {
        let c = ctx();
        let s = series(c, &[1.0, 0.5, 0.3, 0.2, 0.1, 0.07, 0.01]);
        assert!(near_diagonal_sequence(&s, &[]).is_empty());
        let seq = near_diagonal_sequence(&s, &[1, 5, 2]);
        assert_eq!(seq.len(), 3);
        assert!(seq[0].is_ok());
        assert!(matches!(seq[1], Err(PadeError::TooFewCoefficients { .. })));
        assert_eq!(seq[2].as_ref().unwrap().m(), 3);
    }

    #[test]
    fn growth_scaling_handles_large_radius() {
        let c = ctx();
        // 1/(1 - 1000 t) with coefficients 1000^k
        let coeffs: Vec<f64> = (0..6).map(|k| 1000f64.powi(k)).collect();
        let pa = build_reducing(&series(c, &coeffs), 1, 2).unwrap();
        assert_eq!(pa.m(), 1);
        assert!(near(&pa.denominator()[1], &c.real(-1000.0), 1e-140));
    }

    #[test]
    fn contact_order_of_exp() {
        let c = ctx();
        let mut f = vec![1.0];
        for k in 1..12 {
            f.push(f[k - 1] / k as f64);
        }
        // the f64 coefficients are exact data for this series
        let s = series(c, &f);
        let pa = build(&s, 3, 4).unwrap();
        assert_eq!(contact_order(&pa, &s), 8);
        let s_short = series(c, &f[..6]);
        assert_eq!(contact_order(&build(&s_short, 2, 2).unwrap(), &s_short), 5);
    }

    #[test]
    fn contact_order_gains_from_parity() {
        let c = ctx();
        // odd series: tan-like coefficients 1, 1/3, 2/15 on w, w^3, w^5
        let f = [0.0, 1.0, 0.0, 1.0 / 3.0, 0.0, 2.0 / 15.0, 0.0, 17.0 / 315.0, 0.0, 62.0 / 2835.0];
        let s = series(c, &f);
        let pa = build(&s, 3, 2).unwrap();
        assert!(contact_order(&pa, &s) >= 7);
    }
}

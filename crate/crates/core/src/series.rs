//! Truncated power series of logarithmic test functions
//!
//! A [`LogRatioSpec`] describes
//!
//! ```text
//! h(z) = sum_a Ln(z - a) - sum_b Ln(z - b)
//! ```
//!
//! with numerator branch points `a` and denominator branch points `b`. Equal
//! counts make `h` analytic at infinity with `h(inf) = 0`, so it can be
//! developed in `w = 1/z` as well as around the origin.

use std::fmt;
use std::str::FromStr;

use rug::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{BigComplex, KernelError, PrecisionContext};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("invalid function spec: {0}")]
    InvalidSpec(String),
    #[error("series order must be at least 1")]
    EmptyOrder,
    #[error("branch point at the origin; cannot expand about zero")]
    RootAtOrigin,
    #[error("evaluation at branch point {0}")]
    AtBranchPoint(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpansionPoint {
    Zero,
    Infinity,
}

impl ExpansionPoint {
    /// The series variable at `z`: `z` itself for zero, `1/z` for infinity.
    pub fn variable_at(self, z: &BigComplex) -> Result<BigComplex, KernelError> {
        match self {
            ExpansionPoint::Zero => Ok(z.clone()),
            ExpansionPoint::Infinity => z.recip(),
        }
    }
}

impl FromStr for ExpansionPoint {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "zero" | "0" => Ok(ExpansionPoint::Zero),
            "infinity" | "inf" => Ok(ExpansionPoint::Infinity),
            other => Err(format!("unknown expansion point {other:?} (expected zero or infinity)")),
        }
    }
}

impl fmt::Display for ExpansionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExpansionPoint::Zero => "zero",
            ExpansionPoint::Infinity => "infinity",
        })
    }
}

/// Coefficients `f[0..=N]` of a function developed at zero (`f[k]` multiplies
/// `z^k`) or at infinity (`f[k]` multiplies `z^-k`).
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    expansion: ExpansionPoint,
    coeffs: Vec<BigComplex>,
    ctx: PrecisionContext,
}

impl PowerSeries {
    pub fn new(
        expansion: ExpansionPoint,
        coeffs: Vec<BigComplex>,
        ctx: PrecisionContext,
    ) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::EmptyOrder);
        }
        let coeffs = coeffs.into_iter().map(|c| c.with_prec(ctx.bits())).collect();
        Ok(PowerSeries {
            expansion,
            coeffs,
            ctx,
        })
    }

    pub fn expansion(&self) -> ExpansionPoint {
        self.expansion
    }

    pub fn coeffs(&self) -> &[BigComplex] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn ctx(&self) -> PrecisionContext {
        self.ctx
    }

    /// Coefficient of order `k`, zero for negative orders.
    pub fn coeff(&self, k: isize) -> Option<&BigComplex> {
        if k < 0 {
            None
        } else {
            self.coeffs.get(k as usize)
        }
    }

    pub fn map_coeffs(&self, f: impl FnMut(usize, &BigComplex) -> BigComplex) -> PowerSeries {
        let mut f = f;
        PowerSeries {
            expansion: self.expansion,
            coeffs: self.coeffs.iter().enumerate().map(|(k, c)| f(k, c)).collect(),
            ctx: self.ctx,
        }
    }

    /// Partial sum at the series variable `t`.
    pub fn partial_sum(&self, t: &BigComplex) -> BigComplex {
        horner(&self.coeffs, t)
    }
}

pub(crate) fn horner(coeffs: &[BigComplex], t: &BigComplex) -> BigComplex {
    let mut acc = t.ctx().zero();
    for c in coeffs.iter().rev() {
        acc = &(&acc * t) + c;
    }
    acc
}

/// The four branch-point configurations of the Chebotarev-point study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseId {
    A,
    B,
    C,
    D,
}

impl CaseId {
    pub const ALL: [CaseId; 4] = [CaseId::A, CaseId::B, CaseId::C, CaseId::D];
}

impl FromStr for CaseId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(CaseId::A),
            "B" => Ok(CaseId::B),
            "C" => Ok(CaseId::C),
            "D" => Ok(CaseId::D),
            other => Err(format!("unknown case {other:?} (expected A, B, C or D)")),
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRatioSpec {
    num_roots: Vec<BigComplex>,
    den_roots: Vec<BigComplex>,
}

impl LogRatioSpec {
    pub fn new(num_roots: Vec<BigComplex>, den_roots: Vec<BigComplex>) -> Result<Self, SeriesError> {
        if num_roots.len() != den_roots.len() {
            return Err(SeriesError::InvalidSpec(format!(
                "{} numerator roots but {} denominator roots; counts must match",
                num_roots.len(),
                den_roots.len()
            )));
        }
        Ok(LogRatioSpec {
            num_roots,
            den_roots,
        })
    }

    pub fn num_roots(&self) -> &[BigComplex] {
        &self.num_roots
    }

    pub fn den_roots(&self) -> &[BigComplex] {
        &self.den_roots
    }

    /// Branch points of the case table: numerator `a1, a3, a5`,
    /// denominator `a2, a4, a6`.
    pub fn case(case: CaseId, ctx: PrecisionContext) -> Self {
        let (im, extra): (&str, Option<(&str, &str)>) = match case {
            CaseId::A => ("3", None),
            CaseId::B => ("1.5", None),
            CaseId::C => ("1.5", Some(("-1.6", "1.6"))),
            CaseId::D => ("1.5", Some(("-0.7", "1.6"))),
        };
        let neg_im = format!("-{im}");
        let p = |re: &str, im: &str| ctx.parse(re, im).expect("literal case table");
        let mut num = vec![p("2", im), p("2", &neg_im)];
        let mut den = vec![p("-2", im), p("-2", &neg_im)];
        if let Some((a5, a6)) = extra {
            num.push(p(a5, "0"));
            den.push(p(a6, "0"));
        }
        LogRatioSpec {
            num_roots: num,
            den_roots: den,
        }
    }

    /// `ln((z - 1)/(z + 1))`, whose minimal cut is the segment [-1, 1].
    pub fn unit_segment(ctx: PrecisionContext) -> Self {
        LogRatioSpec {
            num_roots: vec![ctx.real(1.0)],
            den_roots: vec![ctx.real(-1.0)],
        }
    }

    /// Parses `{"num_roots": [[re, im], ...], "den_roots": [...]}`. Entries may
    /// be JSON numbers or decimal strings.
    pub fn from_json(text: &str, ctx: PrecisionContext) -> Result<Self, SeriesError> {
        let file: SpecFile = serde_json::from_str(text).map_err(|e| SeriesError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let convert = |roots: &[[Scalar; 2]]| -> Result<Vec<BigComplex>, SeriesError> {
            roots
                .iter()
                .map(|[re, im]| Ok(ctx.parse(&re.text(), &im.text())?))
                .collect()
        };
        LogRatioSpec::new(convert(&file.num_roots)?, convert(&file.den_roots)?)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let enc = |roots: &[BigComplex]| -> Vec<[String; 2]> {
            roots
                .iter()
                .map(|r| {
                    [
                        crate::kernel::fmt_real(r.re(), 40),
                        crate::kernel::fmt_real(r.im(), 40),
                    ]
                })
                .collect()
        };
        serde_json::json!({ "num_roots": enc(&self.num_roots), "den_roots": enc(&self.den_roots) })
    }

    /// Branch points lying exactly on the real axis, numerator first.
    pub fn real_branch_points(&self) -> Vec<f64> {
        self.num_roots
            .iter()
            .chain(&self.den_roots)
            .filter(|r| r.im().is_zero())
            .map(|r| r.re().to_f64())
            .collect()
    }

    fn roots(&self) -> impl Iterator<Item = &BigComplex> {
        self.num_roots.iter().chain(&self.den_roots)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    num_roots: Vec<[Scalar; 2]>,
    den_roots: Vec<[Scalar; 2]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RationalFile {
    expansion: String,
    num: Vec<[Scalar; 2]>,
    den: Vec<[Scalar; 2]>,
}

/// A JSON number or a decimal string, kept as text so no precision is lost
/// to an `f64` round trip.
#[derive(Deserialize)]
#[serde(untagged)]
pub(crate) enum Scalar {
    Number(serde_json::Number),
    Text(String),
}

impl Scalar {
    pub(crate) fn text(&self) -> String {
        match self {
            Scalar::Number(n) => n.to_string(),
            Scalar::Text(s) => s.clone(),
        }
    }
}

/// `coeff[k] = -(1/k) * (sum_a a^k - sum_b b^k)` for `k = 1..=n`, with the
/// given roots (already inverted for expansions about zero).
fn log_coefficients(num: &[BigComplex], den: &[BigComplex], n: usize, ctx: PrecisionContext) -> Vec<BigComplex> {
    let mut num_pow: Vec<BigComplex> = num.iter().map(|r| r.with_prec(ctx.bits())).collect();
    let mut den_pow: Vec<BigComplex> = den.iter().map(|r| r.with_prec(ctx.bits())).collect();
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let mut s = ctx.zero();
        for p in &num_pow {
            s = &s + p;
        }
        for p in &den_pow {
            s = &s - p;
        }
        let scale = -Float::with_val(ctx.bits(), 1) / k as u32;
        out.push(s.scale(&scale));
        for (p, r) in num_pow.iter_mut().zip(num) {
            *p = &*p * r;
        }
        for (p, r) in den_pow.iter_mut().zip(den) {
            *p = &*p * r;
        }
    }
    out
}

/// Coefficients of `h` in powers of `1/z`; `f[0] = 0`.
pub fn expand_at_infinity(spec: &LogRatioSpec, n: usize, ctx: PrecisionContext) -> Result<PowerSeries, SeriesError> {
    if n < 1 {
        return Err(SeriesError::EmptyOrder);
    }
    let num: Vec<_> = spec.num_roots.iter().map(|r| r.with_prec(ctx.bits())).collect();
    let den: Vec<_> = spec.den_roots.iter().map(|r| r.with_prec(ctx.bits())).collect();
    let mut coeffs = vec![ctx.zero()];
    coeffs.extend(log_coefficients(&num, &den, n, ctx));
    PowerSeries::new(ExpansionPoint::Infinity, coeffs, ctx)
}

/// Coefficients of `h` in powers of `z`, with `f[0]` from per-factor
/// principal logarithms `Ln(-a)`.
pub fn expand_at_zero(spec: &LogRatioSpec, n: usize, ctx: PrecisionContext) -> Result<PowerSeries, SeriesError> {
    if n < 1 {
        return Err(SeriesError::EmptyOrder);
    }
    if spec.roots().any(BigComplex::is_zero) {
        return Err(SeriesError::RootAtOrigin);
    }
    let inv = |roots: &[BigComplex]| -> Result<Vec<BigComplex>, KernelError> {
        roots.iter().map(|r| r.with_prec(ctx.bits()).recip()).collect()
    };
    let mut f0 = ctx.zero();
    for a in &spec.num_roots {
        f0 = &f0 + (-a.with_prec(ctx.bits())).ln()?;
    }
    for b in &spec.den_roots {
        f0 = &f0 - (-b.with_prec(ctx.bits())).ln()?;
    }
    let mut coeffs = vec![f0];
    coeffs.extend(log_coefficients(&inv(&spec.num_roots)?, &inv(&spec.den_roots)?, n, ctx));
    PowerSeries::new(ExpansionPoint::Zero, coeffs, ctx)
}

/// Direct evaluation with per-factor principal logarithms. Off the cuts of
/// the individual factors this agrees with the continuation from infinity
/// along the real axis for conjugate-symmetric specs.
pub fn eval_reference(spec: &LogRatioSpec, z: &BigComplex) -> Result<BigComplex, SeriesError> {
    let ctx = z.ctx();
    let sum_logs = |roots: &[BigComplex]| -> Result<BigComplex, SeriesError> {
        let mut acc = ctx.zero();
        for r in roots {
            let d = z - &r.with_prec(ctx.bits());
            if d.is_zero() {
                return Err(SeriesError::AtBranchPoint(format!("{:.10}", r)));
            }
            acc = &acc + &d.ln()?;
        }
        Ok(acc)
    };
    Ok(&sum_logs(&spec.num_roots)? - &sum_logs(&spec.den_roots)?)
}

/// `N(t)/D(t)` with coefficients in the series variable `t` of `expansion`.
/// Rational inputs have no branch points, so their near-diagonal approximants
/// reproduce them exactly once the degrees suffice.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    expansion: ExpansionPoint,
    num: Vec<BigComplex>,
    den: Vec<BigComplex>,
}

impl RationalFunction {
    pub fn new(expansion: ExpansionPoint, num: Vec<BigComplex>, den: Vec<BigComplex>) -> Result<Self, SeriesError> {
        match den.first() {
            Some(d0) if !d0.is_zero() => Ok(RationalFunction { expansion, num, den }),
            _ => Err(SeriesError::InvalidSpec(
                "rational function needs a nonzero constant denominator term".into(),
            )),
        }
    }

    /// Parses `{"expansion": "zero" | "infinity", "num": [[re, im], ...],
    /// "den": [...]}` with coefficients in ascending powers of the series
    /// variable.
    pub fn from_json(text: &str, ctx: PrecisionContext) -> Result<Self, SeriesError> {
        let file: RationalFile = serde_json::from_str(text).map_err(|e| SeriesError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let expansion = file.expansion.parse::<ExpansionPoint>().map_err(SeriesError::InvalidSpec)?;
        let convert = |cs: &[[Scalar; 2]]| -> Result<Vec<BigComplex>, SeriesError> {
            cs.iter().map(|[re, im]| Ok(ctx.parse(&re.text(), &im.text())?)).collect()
        };
        RationalFunction::new(expansion, convert(&file.num)?, convert(&file.den)?)
    }

    pub fn num(&self) -> &[BigComplex] {
        &self.num
    }

    pub fn den(&self) -> &[BigComplex] {
        &self.den
    }

    pub fn expansion(&self) -> ExpansionPoint {
        self.expansion
    }

    /// Series of `N/D` through order `n` by long division.
    pub fn series(&self, n: usize, ctx: PrecisionContext) -> Result<PowerSeries, SeriesError> {
        let d0_inv = self.den[0].with_prec(ctx.bits()).recip()?;
        let mut c: Vec<BigComplex> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut s = self.num.get(k).map_or(ctx.zero(), |a| a.with_prec(ctx.bits()));
            for j in 1..=k.min(self.den.len() - 1) {
                s = &s - &(&self.den[j] * &c[k - j]);
            }
            c.push(&s * &d0_inv);
        }
        PowerSeries::new(self.expansion, c, ctx)
    }

    /// Value at the point `z` of the function's plane.
    pub fn eval(&self, z: &BigComplex) -> Result<BigComplex, SeriesError> {
        let t = self.expansion.variable_at(z)?;
        let ctx = z.ctx();
        let num: Vec<_> = self.num.iter().map(|c| c.with_prec(ctx.bits())).collect();
        let den: Vec<_> = self.den.iter().map(|c| c.with_prec(ctx.bits())).collect();
        Ok(horner(&num, &t).checked_div(&horner(&den, &t))?)
    }
}

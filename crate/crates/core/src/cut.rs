//! Diagnostics computed from approximant root sets and approximation errors.
//!
//! Portraits are computed in the approximant's own variable, the `Alpha`
//! plane, and mapped by `r -> 1/r` into the `InverseAlpha` plane on request.
//! For series developed at infinity the inverse plane is the plane of the
//! function's argument, where the branch points live.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{BigComplex, PrecisionContext};
use crate::pade::{self, PadeApproximant, PadeError};
use crate::roots::{self, RootError};
use crate::series::{self, LogRatioSpec, PowerSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CutError {
    #[error(transparent)]
    Roots(#[from] RootError),
    #[error(transparent)]
    Pade(#[from] PadeError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(
        "approximation error {error:e} at degree {degree} is below the precision floor {floor:e}; \
         raise the precision or lower the degrees"
    )]
    PrecisionFloor { degree: usize, error: f64, floor: f64 },
    #[error("only {found} real poles; at least {needed} are needed")]
    InsufficientSample { found: usize, needed: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Plane {
    Alpha,
    InverseAlpha,
}

impl FromStr for Plane {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "alpha" => Ok(Plane::Alpha),
            "inverse_alpha" | "inverse" => Ok(Plane::InverseAlpha),
            other => Err(format!("unknown plane {other:?} (expected alpha or inverse-alpha)")),
        }
    }
}

impl fmt::Display for Plane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Plane::Alpha => "alpha",
            Plane::InverseAlpha => "inverse_alpha",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootPortrait {
    pub poles: Vec<BigComplex>,
    pub zeros: Vec<BigComplex>,
    pub plane: Plane,
    /// `m` of the `[m/m+1]` the roots came from.
    pub degree: usize,
    pub excluded_at_infinity: usize,
}

impl RootPortrait {
    /// Reciprocal map into `plane`; roots within `2^(-bits/2)` of the origin
    /// go to infinity and are only counted.
    pub fn to_plane(&self, plane: Plane, ctx: PrecisionContext) -> RootPortrait {
        if plane == self.plane {
            return self.clone();
        }
        let tiny = ctx.pow2(-(ctx.bits() as i32) / 2);
        let mut excluded = self.excluded_at_infinity;
        let mut invert = |roots: &[BigComplex]| -> Vec<BigComplex> {
            roots
                .iter()
                .filter_map(|r| {
                    if r.abs() < tiny {
                        excluded += 1;
                        None
                    } else {
                        r.recip().ok()
                    }
                })
                .collect()
        };
        let poles = invert(&self.poles);
        let zeros = invert(&self.zeros);
        RootPortrait {
            poles,
            zeros,
            plane,
            degree: self.degree,
            excluded_at_infinity: excluded,
        }
    }

    fn all_roots(&self) -> impl Iterator<Item = &BigComplex> {
        self.poles.iter().chain(&self.zeros)
    }

    /// Largest distance between any two roots.
    pub fn diameter(&self) -> f64 {
        let pts: Vec<Complex64> = self.all_roots().map(BigComplex::to_c64).collect();
        let mut d: f64 = 0.0;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                d = d.max((a - b).norm());
            }
        }
        d
    }

    pub fn max_abs_im(&self) -> f64 {
        self.all_roots().map(|r| r.im().to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.poles.len() + self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Roots of the numerator (zeros) and denominator (poles) of `pa`, reported in
/// `out_plane`.
pub fn portrait(pa: &PadeApproximant, out_plane: Plane, tol: f64) -> Result<RootPortrait, CutError> {
    let ctx = pa.ctx();
    let zeros = polynomial_roots(pa.numerator(), ctx, tol)?;
    let poles = polynomial_roots(pa.denominator(), ctx, tol)?;
    let native = RootPortrait {
        poles,
        zeros,
        plane: Plane::Alpha,
        degree: pa.l(),
        excluded_at_infinity: 0,
    };
    Ok(native.to_plane(out_plane, ctx))
}

fn polynomial_roots(coeffs: &[BigComplex], ctx: PrecisionContext, tol: f64) -> Result<Vec<BigComplex>, CutError> {
    if coeffs.iter().all(BigComplex::is_zero) {
        return Ok(Vec::new());
    }
    Ok(roots::roots(coeffs, ctx, tol)?.roots)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Doublet {
    pub pole: BigComplex,
    pub zero: BigComplex,
}

/// `1e-8 (1 + median root modulus)`. Interlaced genuine poles and zeros near
/// a branch point stay far wider apart than this at degrees up to a few
/// hundred, while noise doublets at working precision are much closer.
pub fn default_pair_tol(p: &RootPortrait) -> f64 {
    let mut moduli: Vec<f64> = p.all_roots().map(BigComplex::abs_f64).collect();
    if moduli.is_empty() {
        return 1e-8;
    }
    moduli.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    1e-8 * (1.0 + moduli[moduli.len() / 2])
}

fn polar_key(z: &BigComplex) -> (f64, f64) {
    let c = z.to_c64();
    (c.norm(), c.arg())
}

fn sorted_by_modulus(roots: &[BigComplex]) -> Vec<BigComplex> {
    let mut v = roots.to_vec();
    v.sort_by(|a, b| polar_key(a).partial_cmp(&polar_key(b)).unwrap_or(Ordering::Equal));
    v
}

/// Greedily pairs each pole (in modulus-then-angle order) with the nearest
/// unpaired zero closer than `pair_tol`. A non-positive tolerance pairs
/// nothing.
pub fn froissart_filter(p: &RootPortrait, pair_tol: f64) -> (RootPortrait, Vec<Doublet>) {
    let poles = sorted_by_modulus(&p.poles);
    let zeros = sorted_by_modulus(&p.zeros);
    let mut zero_used = vec![false; zeros.len()];
    let mut clean_poles = Vec::new();
    let mut doublets = Vec::new();
    for pole in poles {
        let mut best: Option<(usize, f64)> = None;
        for (j, zero) in zeros.iter().enumerate() {
            if zero_used[j] {
                continue;
            }
            let d = (&pole - zero).abs_f64();
            if d < pair_tol && best.map_or(true, |(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        match best {
            Some((j, _)) => {
                zero_used[j] = true;
                doublets.push(Doublet {
                    pole,
                    zero: zeros[j].clone(),
                });
            }
            None => clean_poles.push(pole),
        }
    }
    let clean_zeros = zeros
        .into_iter()
        .zip(zero_used)
        .filter_map(|(z, used)| (!used).then_some(z))
        .collect();
    (
        RootPortrait {
            poles: clean_poles,
            zeros: clean_zeros,
            plane: p.plane,
            degree: p.degree,
            excluded_at_infinity: p.excluded_at_infinity,
        },
        doublets,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extent {
    pub min: f64,
    pub max: f64,
}

/// Range of real parts of the poles within `band` of the real axis.
pub fn real_axis_extent(p: &RootPortrait, band: f64) -> Option<Extent> {
    let xs: Vec<f64> = p
        .poles
        .iter()
        .filter(|r| r.im().to_f64().abs() < band)
        .map(|r| r.re().to_f64())
        .collect();
    if xs.is_empty() {
        return None;
    }
    Some(Extent {
        min: xs.iter().copied().fold(f64::INFINITY, f64::min),
        max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reachability {
    Reachable,
    Blocked,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReachabilityVerdict {
    pub target: f64,
    pub status: Reachability,
    pub blocking_abscissa: Option<f64>,
}

/// Walks the real axis from infinity on the target's side (from `+inf` for a
/// target of 0) toward `target` and reports the first pole-band crossing.
pub fn reachability(p: &RootPortrait, target: f64, band: f64) -> ReachabilityVerdict {
    let crossing = real_axis_extent(p, band).and_then(|e| {
        if target < 0.0 {
            (e.min < target).then_some(e.min)
        } else {
            (e.max > target).then_some(e.max)
        }
    });
    ReachabilityVerdict {
        target,
        status: if crossing.is_some() {
            Reachability::Blocked
        } else {
            Reachability::Reachable
        },
        blocking_abscissa: crossing,
    }
}

/// Approximation error against degree, with the fitted linear convergence
/// factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub point: [f64; 2],
    pub degrees: Vec<usize>,
    pub errors: Vec<f64>,
    /// Order of contact of each approximant actually built with the series.
    pub contact_orders: Vec<usize>,
    /// Factor per series coefficient: `exp(s/2)` for slope `s` of `ln e`
    /// against the effective degree, half the order of contact. For a
    /// nondegenerate `[m/m+1]` that is `m + 1`, so `s` is the slope per step
    /// of `m`.
    pub g_est: f64,
    /// Factor per unit of effective degree: `exp(s)`.
    pub g_per_degree_step: f64,
    /// `cap / |point|` when a cut capacity was supplied.
    pub g_pred: Option<f64>,
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

fn check_degrees(degrees: &[usize]) -> Result<(), CutError> {
    if degrees.len() < 3 {
        return Err(CutError::InvalidArgument("at least three degrees are required".into()));
    }
    if degrees.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CutError::InvalidArgument("degrees must be strictly increasing".into()));
    }
    Ok(())
}

/// Convergence factor of the `[m/m+1]` of `series` at `point`, measured
/// against `reference`. Degenerate systems are rebuilt at the largest
/// solvable denominator degree, and the fit runs against the order of contact
/// of what was built, so block structure (odd or even series) does not bias
/// the slope. The series should extend a few orders past `2m + 2`; a contact
/// order is capped at the series length. When every error sits below the
/// precision floor the function is reproduced exactly and the factor is 0.
pub fn convergence_factor_for<F>(
    series: &PowerSeries,
    reference: F,
    point: &BigComplex,
    degrees: &[usize],
    capacity: Option<f64>,
) -> Result<ConvergenceReport, CutError>
where
    F: Fn(&BigComplex) -> Result<BigComplex, SeriesError> + Sync,
{
    check_degrees(degrees)?;
    let ctx = series.ctx();
    let z = point.with_prec(ctx.bits());
    let exact = reference(&z)?;
    let measured: Vec<(Float, usize)> = degrees
        .par_iter()
        .map(|&m| -> Result<(Float, usize), CutError> {
            let pa = pade::build_reducing(series, m, m + 1)?;
            Ok(((&pa.value_at(&z)? - &exact).abs(), pade::contact_order(&pa, series)))
        })
        .collect::<Result<_, _>>()?;
    let (errors, orders): (Vec<Float>, Vec<usize>) = measured.into_iter().unzip();
    let floor = ctx.pow2(-(ctx.bits() as i32) + 32);
    let below: Vec<usize> = (0..errors.len()).filter(|&i| errors[i] < floor).collect();
    let g_pred = capacity.map(|cap| cap / point.abs_f64());
    let report = |g_est: f64, g_step: f64| ConvergenceReport {
        point: [point.re().to_f64(), point.im().to_f64()],
        degrees: degrees.to_vec(),
        errors: errors.iter().map(Float::to_f64).collect(),
        contact_orders: orders.clone(),
        g_est,
        g_per_degree_step: g_step,
        g_pred,
    };
    if below.len() == errors.len() {
        return Ok(report(0.0, 0.0));
    }
    if let Some(&i) = below.first() {
        return Err(CutError::PrecisionFloor {
            degree: degrees[i],
            error: errors[i].to_f64(),
            floor: floor.to_f64(),
        });
    }
    let xs: Vec<f64> = orders.iter().map(|&n| n as f64 / 2.0).collect();
    if xs.windows(2).all(|w| w[0] == w[1]) {
        return Err(CutError::InvalidArgument(
            "all approximants coincide; choose degrees that differ by more than one".into(),
        ));
    }
    let ys: Vec<f64> = errors.iter().map(|e| Float::with_val(64, e.ln_ref()).to_f64()).collect();
    let s = ls_slope(&xs, &ys);
    Ok(report((s / 2.0).exp(), s.exp()))
}

/// Convergence factor for a logarithmic spec developed at infinity.
pub fn convergence_factor(
    spec: &LogRatioSpec,
    point: &BigComplex,
    degrees: &[usize],
    ctx: PrecisionContext,
    capacity: Option<f64>,
) -> Result<ConvergenceReport, CutError> {
    let top = degrees.iter().copied().max().unwrap_or(0);
    let series = series::expand_at_infinity(spec, 2 * top + 8, ctx)?;
    convergence_factor_for(&series, |z| series::eval_reference(spec, z), point, degrees, capacity)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn square(half_width: f64) -> Rect {
        Rect {
            x_min: -half_width,
            x_max: half_width,
            y_min: -half_width,
            y_max: half_width,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Badness {
    /// Bad grid points times cell area.
    pub area: f64,
    pub bad_points: usize,
    pub evaluated_points: usize,
    /// Points within ten cells of a singularity, not evaluated.
    pub skipped_points: usize,
}

/// Area proxy for the set where `|reference - pa| > eps`, sampled at the
/// centers of a `grid_n × grid_n` grid over `rect`. Failed evaluations
/// (near a pole) count as bad.
pub fn capacity_badness_for<F>(
    reference: F,
    singularities: &[BigComplex],
    pa: &PadeApproximant,
    rect: Rect,
    grid_n: usize,
    eps: f64,
) -> Result<Badness, CutError>
where
    F: Fn(&BigComplex) -> Result<BigComplex, SeriesError> + Sync,
{
    if grid_n < 8 {
        return Err(CutError::InvalidArgument("grid must be at least 8×8".into()));
    }
    if !(rect.x_max > rect.x_min && rect.y_max > rect.y_min) {
        return Err(CutError::InvalidArgument("empty rectangle".into()));
    }
    let ctx = pa.ctx();
    let hx = (rect.x_max - rect.x_min) / grid_n as f64;
    let hy = (rect.y_max - rect.y_min) / grid_n as f64;
    let keep_out = 10.0 * hx.max(hy);
    let sing: Vec<Complex64> = singularities.iter().map(BigComplex::to_c64).collect();
    let eps_big = ctx.float(eps);
    // (bad, evaluated, skipped) per row
    let rows: Vec<(usize, usize, usize)> = (0..grid_n)
        .into_par_iter()
        .map(|j| {
            let y = rect.y_min + (j as f64 + 0.5) * hy;
            let mut counts = (0, 0, 0);
            for i in 0..grid_n {
                let x = rect.x_min + (i as f64 + 0.5) * hx;
                let zc = Complex64::new(x, y);
                if sing.iter().any(|s| (s - zc).norm() < keep_out) {
                    counts.2 += 1;
                    continue;
                }
                counts.1 += 1;
                let z = ctx.complex(x, y);
                let bad = match (reference(&z), pa.value_at(&z)) {
                    (Ok(f), Ok(v)) => (&f - &v).abs() > eps_big,
                    _ => true,
                };
                if bad {
                    counts.0 += 1;
                }
            }
            counts
        })
        .collect();
    let (bad, evaluated, skipped) = rows
        .iter()
        .fold((0, 0, 0), |acc, r| (acc.0 + r.0, acc.1 + r.1, acc.2 + r.2));
    Ok(Badness {
        area: bad as f64 * hx * hy,
        bad_points: bad,
        evaluated_points: evaluated,
        skipped_points: skipped,
    })
}

pub fn capacity_badness(
    spec: &LogRatioSpec,
    pa: &PadeApproximant,
    rect: Rect,
    grid_n: usize,
    eps: f64,
) -> Result<Badness, CutError> {
    let sing: Vec<BigComplex> = spec.num_roots().iter().chain(spec.den_roots()).cloned().collect();
    capacity_badness_for(|z| series::eval_reference(spec, z), &sing, pa, rect, grid_n, eps)
}

/// Arcsine (equilibrium) CDF on [-1, 1].
pub fn arcsine_cdf(x: f64) -> f64 {
    0.5 + x.clamp(-1.0, 1.0).asin() / std::f64::consts::PI
}

/// Kolmogorov–Smirnov distance between the empirical CDF of `xs` and the
/// arcsine CDF.
pub fn ks_arcsine(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = arcsine_cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

pub const MIN_EQUILIBRIUM_SAMPLE: usize = 10;

/// Distance from the real axis within which a root counts as real:
/// `1e-6 (1 + diameter)`.
pub fn real_band(p: &RootPortrait) -> f64 {
    1e-6 * (1.0 + p.diameter())
}

/// True when there is at least one pole and every pole is real in the sense
/// of [`real_band`].
pub fn poles_on_real_axis(p: &RootPortrait) -> bool {
    let band = real_band(p);
    !p.poles.is_empty() && p.poles.iter().all(|r| r.im().to_f64().abs() <= band)
}

/// KS distance of the real poles, rescaled onto [-1, 1] by their extent, from
/// the arcsine law. A pole counts as real within [`real_band`] of the axis.
pub fn equilibrium_check(p: &RootPortrait) -> Result<f64, CutError> {
    let band = real_band(p);
    let xs: Vec<f64> = p
        .poles
        .iter()
        .filter(|r| r.im().to_f64().abs() <= band)
        .map(|r| r.re().to_f64())
        .collect();
    if xs.len() < MIN_EQUILIBRIUM_SAMPLE {
        return Err(CutError::InsufficientSample {
            found: xs.len(),
            needed: MIN_EQUILIBRIUM_SAMPLE,
        });
    }
    Ok(ks_arcsine(&normalize_to_unit(&xs)))
}

/// Affine map of the sample onto [-1, 1]. The outermost of `n` equilibrium
/// points sit at `cos(pi/2n)` of the segment half-width, so the sample range
/// is widened by that factor.
pub fn normalize_to_unit(xs: &[f64]) -> Vec<f64> {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mid = 0.5 * (lo + hi);
    let edge = (std::f64::consts::PI / (2.0 * xs.len() as f64)).cos();
    let half = 0.5 * (hi - lo) / edge;
    if half <= 0.0 {
        return vec![0.0; xs.len()];
    }
    xs.iter().map(|x| (x - mid) / half).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{ExpansionPoint, RationalFunction};

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn portrait_of(poles: &[(f64, f64)], zeros: &[(f64, f64)], plane: Plane) -> RootPortrait {
        let c = ctx();
        RootPortrait {
            poles: poles.iter().map(|&(r, i)| c.complex(r, i)).collect(),
            zeros: zeros.iter().map(|&(r, i)| c.complex(r, i)).collect(),
            plane,
            degree: 1,
            excluded_at_infinity: 0,
        }
    }

    #[test]
    fn plane_mapping() {
        let c = ctx();
        let p = portrait_of(&[(0.5, 0.0), (0.0, 0.0)], &[], Plane::Alpha);
        let q = p.to_plane(Plane::InverseAlpha, c);
        assert_eq!(q.poles, vec![c.real(2.0)]);
        assert_eq!(q.excluded_at_infinity, 1);
        assert_eq!(q.to_plane(Plane::InverseAlpha, c), q);
    }

    #[test]
    fn doublet_is_removed() {
        let c = ctx();
        let mut p = portrait_of(&[(0.3, 0.3)], &[], Plane::Alpha);
        p.zeros.push(&c.complex(0.3, 0.3) + &BigComplex::from_real(c.parse_real("1e-30").unwrap()));
        let (clean, doublets) = froissart_filter(&p, 1e-6);
        assert!(clean.is_empty());
        assert_eq!(doublets.len(), 1);
        let (clean, doublets) = froissart_filter(&portrait_of(&[], &[], Plane::Alpha), 1e-6);
        assert!(clean.is_empty() && doublets.is_empty());
    }

    #[test]
    fn filter_pairs_nearest_zero_independent_of_order() {
        let poles = [(1.0, 0.0), (2.0, 0.0)];
        let zeros = [(2.0 + 1e-9, 0.0), (1.0 + 1e-8, 0.0), (5.0, 0.0)];
        let (a, da) = froissart_filter(&portrait_of(&poles, &zeros, Plane::Alpha), 1e-6);
        let mut rev_zeros = zeros;
        rev_zeros.reverse();
        let (b, db) = froissart_filter(&portrait_of(&[poles[1], poles[0]], &rev_zeros, Plane::Alpha), 1e-6);
        assert_eq!(a, b);
        assert_eq!(da, db);
        assert_eq!(da.len(), 2);
        assert_eq!(a.zeros.len(), 1);
    }

    #[test]
    fn extent_and_reachability() {
        let p = portrait_of(&[(-1.5, 0.01), (0.3, -0.02), (1.2, 0.0), (0.0, 2.0)], &[], Plane::InverseAlpha);
        let e = real_axis_extent(&p, 0.05).unwrap();
        assert_eq!((e.min, e.max), (-1.5, 1.2));
        assert!(real_axis_extent(&p, 0.001).is_some());
        assert!(real_axis_extent(&portrait_of(&[(0.0, 2.0)], &[], Plane::Alpha), 0.5).is_none());

        let v = reachability(&p, -0.7, 0.05);
        assert_eq!(v.status, Reachability::Blocked);
        assert_eq!(v.blocking_abscissa, Some(-1.5));
        let v = reachability(&p, 0.0, 0.05);
        assert_eq!(v.blocking_abscissa, Some(1.2));
        let v = reachability(&p, 2.0, 0.05);
        assert_eq!(v.status, Reachability::Reachable);
        assert_eq!(v.blocking_abscissa, None);
    }

    #[test]
    fn ks_controls() {
        let n = 200;
        let uniform: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * (i as f64 + 0.5) / n as f64).collect();
        let d = ks_arcsine(&normalize_to_unit(&uniform));
        // sup |asin(x)/pi - x/2| at x = sqrt(1 - 4/pi^2)
        let x = (1.0 - 4.0 / std::f64::consts::PI.powi(2)).sqrt();
        let exact = (x.asin() / std::f64::consts::PI - x / 2.0).abs();
        assert!((d - exact).abs() < 1.0 / n as f64 + 1e-3);

        let quantiles: Vec<f64> = (0..n)
            .map(|i| (std::f64::consts::PI * ((i as f64 + 0.5) / n as f64 - 0.5)).sin())
            .collect();
        assert!(ks_arcsine(&normalize_to_unit(&quantiles)) < 1.0 / n as f64);
    }

    #[test]
    fn equilibrium_needs_enough_real_poles() {
        let p = portrait_of(&[(0.1, 0.0), (0.2, 0.0), (0.0, 1.0)], &[], Plane::InverseAlpha);
        assert_eq!(
            equilibrium_check(&p),
            Err(CutError::InsufficientSample { found: 2, needed: 10 })
        );
    }

    #[test]
    fn rational_input_has_zero_factor_and_badness() {
        let c = ctx();
        // w / (1 - w/2) developed at infinity: z-plane value 1/(z - 1/2)
        let g = RationalFunction::new(
            ExpansionPoint::Infinity,
            vec![c.zero(), c.one()],
            vec![c.one(), c.real(-0.5)],
        )
        .unwrap();
        let s = g.series(40, c).unwrap();
        let report = convergence_factor_for(&s, |z| g.eval(z), &c.real(4.0), &[3, 6, 9], None).unwrap();
        assert_eq!(report.g_est, 0.0);
        let pa = pade::build_reducing(&s, 1, 1).unwrap();
        let bad = capacity_badness_for(|z| g.eval(z), &[c.real(0.5)], &pa, Rect::square(2.0), 16, 1e-20).unwrap();
        assert_eq!(bad.bad_points, 0);
        assert!(bad.skipped_points > 0);
    }

    #[test]
    fn degree_validation() {
        let c = ctx();
        let spec = LogRatioSpec::unit_segment(c);
        assert!(convergence_factor(&spec, &c.real(4.0), &[3, 4], c, None).is_err());
        assert!(convergence_factor(&spec, &c.real(4.0), &[5, 4, 6], c, None).is_err());
    }

    #[test]
    fn convergence_fit_is_stationary_for_odd_series() {
        let c = ctx();
        let spec = LogRatioSpec::unit_segment(c);
        let z = c.real(4.0);
        let a = convergence_factor(&spec, &z, &[10, 15, 20, 25], c, Some(0.5)).unwrap();
        let b = convergence_factor(&spec, &z, &[15, 20, 25, 30], c, Some(0.5)).unwrap();
        let oracle = 1.0 / (4.0 + 15f64.sqrt());
        assert!((a.g_est - oracle).abs() < 1e-3, "{a:?}");
        assert!((a.g_est - b.g_est).abs() < 1e-3);
        assert_eq!(a.g_pred, Some(0.125));
        assert_eq!(a.contact_orders, vec![21, 33, 41, 53]);
    }
}


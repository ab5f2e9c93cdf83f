//! All roots of a polynomial by Aberth–Ehrlich simultaneous iteration.
//!
//! Coefficients are given in ascending order, `c[0] + c[1] x + ... + c[n] x^n`.

use rug::Float;
use thiserror::Error;

use crate::kernel::{BigComplex, PrecisionContext};

pub const MAX_ITERATIONS: usize = 2000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("polynomial has no nonzero coefficient")]
    ZeroPolynomial,
    #[error("no convergence after {iterations} iterations; worst scaled residual {worst_residual:e}")]
    NoConvergence { iterations: usize, worst_residual: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<BigComplex>,
    /// Largest scaled residual `|p(r)| / sum |c_k r^k|` over the roots.
    pub residual_bound: f64,
    /// Leading coefficients dropped as negligible before solving.
    pub degree_reduction: usize,
}

/// Default tolerance `2^(-bits/2)`.
pub fn default_tol(ctx: PrecisionContext) -> f64 {
    2f64.powi(-(ctx.bits() as i32) / 2)
}

pub fn roots(coeffs: &[BigComplex], ctx: PrecisionContext, tol: f64) -> Result<RootSet, RootError> {
    let coeffs: Vec<BigComplex> = coeffs.iter().map(|c| c.with_prec(ctx.bits())).collect();
    let largest = coeffs
        .iter()
        .map(BigComplex::abs)
        .fold(Float::new(ctx.bits()), |m, a| if a > m { a } else { m });
    if largest.is_zero() {
        return Err(RootError::ZeroPolynomial);
    }
    let negligible = Float::with_val(ctx.bits(), &largest * &ctx.pow2(-(ctx.bits() as i32) / 2));
    let mut top = coeffs.len() - 1;
    while coeffs[top].abs() < negligible {
        top -= 1;
    }
    let degree_reduction = coeffs.len() - 1 - top;
    // exact zero roots are peeled off; Newton steps cannot certify them
    let low = coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0);
    let poly = &coeffs[low..=top];

    let mut found: Vec<BigComplex> = vec![ctx.zero(); low];
    if poly.len() > 1 {
        found.extend(aberth(poly, ctx, tol)?);
    }
    let residual_bound = found
        .iter()
        .map(|r| scaled_residual(&coeffs[..=top], r))
        .fold(0.0, f64::max);
    Ok(RootSet {
        roots: found,
        residual_bound,
        degree_reduction,
    })
}

/// `|p(r)| / sum |c_k| |r|^k`
pub fn scaled_residual(coeffs: &[BigComplex], r: &BigComplex) -> f64 {
    let p = eval(coeffs, r);
    let abs_r = r.abs();
    let mut scale = Float::new(r.prec());
    for c in coeffs.iter().rev() {
        scale *= &abs_r;
        scale += c.abs();
    }
    if scale.is_zero() {
        return 0.0;
    }
    Float::with_val(r.prec(), p.abs() / &scale).to_f64()
}

fn eval(coeffs: &[BigComplex], x: &BigComplex) -> BigComplex {
    let mut acc = x.ctx().zero();
    for c in coeffs.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

/// `p(x)` and `p'(x)` together.
fn eval_with_derivative(coeffs: &[BigComplex], x: &BigComplex) -> (BigComplex, BigComplex) {
    let ctx = x.ctx();
    let mut p = ctx.zero();
    let mut dp = ctx.zero();
    for c in coeffs.iter().rev() {
        dp = &(&dp * x) + &p;
        p = &(&p * x) + c;
    }
    (p, dp)
}

/// Initial radius: the geometric mean of the root moduli `|c0/cn|^(1/n)`,
/// kept inside the Cauchy bounds.
fn initial_radius(coeffs: &[BigComplex]) -> f64 {
    let n = coeffs.len() - 1;
    let log2 = |c: &BigComplex| Float::with_val(64, c.abs().log2_ref()).to_f64();
    let lead = log2(&coeffs[n]);
    let mean = (log2(&coeffs[0]) - lead) / n as f64;
    // Cauchy: every root has |x| <= 1 + max |c_k / c_n|
    let upper = coeffs[..n].iter().map(|c| log2(c) - lead).fold(f64::NEG_INFINITY, f64::max);
    let upper = (1.0 + upper.exp2()).log2();
    mean.min(upper).exp2()
}

fn aberth(poly: &[BigComplex], ctx: PrecisionContext, tol: f64) -> Result<Vec<BigComplex>, RootError> {
    let n = poly.len() - 1;
    let radius = initial_radius(poly);
    // deterministic angular jitter keeps starts off any symmetry axis
    let mut z: Vec<BigComplex> = (0..n)
        .map(|k| {
            let jitter = ((k as f64 * 0.618_033_988_75).fract() - 0.5) * 0.1;
            let theta = std::f64::consts::TAU * (k as f64 + 0.25 + jitter) / n as f64 + 0.4;
            ctx.complex(radius * theta.cos(), radius * theta.sin())
        })
        .collect();
    let deriv: Vec<BigComplex> = poly[1..]
        .iter()
        .enumerate()
        .map(|(k, c)| c.scale(&ctx.float((k + 1) as f64)))
        .collect();
    let mut done = vec![false; n];
    let tol_f = ctx.float(tol);

    for _ in 0..MAX_ITERATIONS {
        let mut all_done = true;
        for i in 0..n {
            if done[i] {
                continue;
            }
            let p = eval(poly, &z[i]);
            if p.is_zero() {
                done[i] = true;
                continue;
            }
            let dp = eval(&deriv, &z[i]);
            let ratio = match p.checked_div(&dp) {
                Ok(r) => r,
                Err(_) => {
                    // stationary point: nudge and retry next sweep
                    z[i] = &z[i] + &ctx.complex(radius * 1e-3, radius * 1e-3);
                    all_done = false;
                    continue;
                }
            };
            let mut repulsion = ctx.zero();
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    if let Ok(r) = (&z[i] - zj).recip() {
                        repulsion = &repulsion + &r;
                    }
                }
            }
            let denom = &ctx.one() - &(&ratio * &repulsion);
            let step = ratio.checked_div(&denom).unwrap_or(ratio);
            z[i] = &z[i] - &step;
            let size = Float::with_val(ctx.bits(), z[i].abs().max(&Float::with_val(ctx.bits(), 1)));
            if step.abs() <= Float::with_val(ctx.bits(), &tol_f * &size) {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            // two clean polishing sweeps
            for _ in 0..2 {
                for i in 0..n {
                    let (p, dp) = eval_with_derivative(poly, &z[i]);
                    if let Ok(step) = p.checked_div(&dp) {
                        let mut repulsion = ctx.zero();
                        for (j, zj) in z.iter().enumerate() {
                            if j != i {
                                if let Ok(r) = (&z[i] - zj).recip() {
                                    repulsion = &repulsion + &r;
                                }
                            }
                        }
                        let denom = &ctx.one() - &(&step * &repulsion);
                        let step = step.checked_div(&denom).unwrap_or(step);
                        z[i] = &z[i] - &step;
                    }
                }
            }
            let worst = z.iter().map(|r| scaled_residual(poly, r)).fold(0.0, f64::max);
            if worst < tol {
                return Ok(z);
            }
            return Err(RootError::NoConvergence {
                iterations: MAX_ITERATIONS,
                worst_residual: worst,
            });
        }
    }
    let worst = z.iter().map(|r| scaled_residual(poly, r)).fold(0.0, f64::max);
    Err(RootError::NoConvergence {
        iterations: MAX_ITERATIONS,
        worst_residual: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn sorted(rs: &RootSet) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = rs.roots.iter().map(BigComplex::to_c64).collect();
        v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        v
    }

    fn poly(c: PrecisionContext, xs: &[f64]) -> Vec<BigComplex> {
        xs.iter().map(|&x| c.real(x)).collect()
    }

    #[test]
    fn quadratic_complex_pair() {
        let c = ctx();
        let rs = roots(&poly(c, &[13.0, -4.0, 1.0]), c, default_tol(c)).unwrap();
        let v = sorted(&rs);
        assert!((v[0] - Complex64::new(2.0, -3.0)).norm() < 1e-60);
        assert!((v[1] - Complex64::new(2.0, 3.0)).norm() < 1e-60);
        assert!(rs.residual_bound < default_tol(c));
    }

    #[test]
    fn difference_of_squares() {
        let c = ctx();
        let v = sorted(&roots(&poly(c, &[-1.0, 0.0, 1.0]), c, default_tol(c)).unwrap());
        assert!((v[0] + 1.0).norm() < 1e-60 && (v[1] - 1.0).norm() < 1e-60);
    }

    #[test]
    fn cubic_with_integer_roots() {
        let c = ctx();
        let v = sorted(&roots(&poly(c, &[-6.0, 11.0, -6.0, 1.0]), c, default_tol(c)).unwrap());
        for (r, want) in v.iter().zip([1.0, 2.0, 3.0]) {
            assert!((r - want).norm() < 1e-60);
        }
    }

    #[test]
    fn leading_negligible_coefficients_are_stripped() {
        let c = ctx();
        let mut p = poly(c, &[-1.0, 0.0, 1.0]);
        p.push(BigComplex::from_real(c.pow2(-400)));
        let rs = roots(&p, c, default_tol(c)).unwrap();
        assert_eq!(rs.degree_reduction, 1);
        assert_eq!(rs.roots.len(), 2);
    }

    #[test]
    fn exact_zero_roots() {
        let c = ctx();
        let rs = roots(&poly(c, &[0.0, 0.0, -4.0, 1.0]), c, default_tol(c)).unwrap();
        let v = sorted(&rs);
        assert_eq!(v.len(), 3);
        assert_eq!(v[0], Complex64::new(0.0, 0.0));
        assert!((v[2] - 4.0).norm() < 1e-60);
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        let c = ctx();
        assert_eq!(roots(&poly(c, &[0.0, 0.0]), c, 1e-10), Err(RootError::ZeroPolynomial));
        assert!(roots(&poly(c, &[3.0]), c, 1e-10).unwrap().roots.is_empty());
    }

    #[test]
    fn degree_one_hundred_unit_roots() {
        let c = ctx();
        // x^100 - 1
        let mut p = vec![c.real(-1.0)];
        p.extend((1..100).map(|_| c.zero()));
        p.push(c.one());
        let rs = roots(&p, c, default_tol(c)).unwrap();
        assert_eq!(rs.roots.len(), 100);
        for r in &rs.roots {
            assert!((r.abs_f64() - 1.0).abs() < 1e-60);
        }
    }
}

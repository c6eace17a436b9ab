//! Denominator roots and the growth-rate bounds they imply.
//!
//! Two independent tools are combined: a double-precision Aberth iteration
//! gives the global picture (all roots, so the smallest modulus can be shown
//! to be unique), and exact rational bisection gives the certified digits of
//! the dominant real root.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::series::{IntPolynomial, RationalFunction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("polynomial of degree {0:?} has no roots to find")]
    DegreeTooLow(Option<usize>),
    #[error("root iteration did not converge after {iterations} steps; last iterates {iterates:?}")]
    NoConvergence {
        iterations: usize,
        iterates: Vec<(f64, f64)>,
    },
    #[error("root {root:?} has residual {residual:e}, above tolerance {tolerance:e}")]
    Residual {
        root: (f64, f64),
        residual: f64,
        tolerance: f64,
    },
    #[error("roots are not closed under conjugation: {0:?} has no partner")]
    NotConjugateClosed((f64, f64)),
    #[error("polynomial has the same sign at both ends of [{lo}, {hi}]")]
    NoSignChange { lo: String, hi: String },
    #[error("no sign change at k/64 for k = 1..=63")]
    NoBracket,
    #[error("polynomial has a repeated root")]
    NotSquareFree,
    #[error("smallest-modulus root {0:?} is not a positive real below 1")]
    SmallestNotRealInUnit((f64, f64)),
    #[error("cannot certify a unique root of smallest modulus: |first| = {first}, |second| = {second}")]
    NotUniqueSmallest { first: f64, second: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    pub max_iterations: usize,
    /// Aberth stops once every correction is below `step_tol * max(1, |z|)`.
    pub step_tol: f64,
    /// Allowed `|p(z)|` relative to `sum |a_i| |z|^i`.
    pub residual_tol: f64,
    /// Bisection width for the dominant real root.
    pub tol_alpha: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            max_iterations: 1000,
            step_tol: 1e-15,
            residual_tol: 1e-10,
            tol_alpha: 1e-11,
        }
    }
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn magnitude_scale(coeffs: &[f64], z: Complex64) -> f64 {
    let r = z.norm();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.abs())
}

/// Approximates all `deg p` complex roots by Aberth-Ehrlich iteration.
pub fn all_roots(p: &IntPolynomial) -> Result<Vec<Complex64>, RootError> {
    all_roots_with(p, &RootOptions::default())
}

pub fn all_roots_with(p: &IntPolynomial, opts: &RootOptions) -> Result<Vec<Complex64>, RootError> {
    let degree = match p.degree() {
        Some(d) if d >= 1 => d,
        other => return Err(RootError::DegreeTooLow(other)),
    };
    let coeffs = p.to_f64();
    let deriv: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * i as f64)
        .collect();

    // Circle through the geometric mean of the root moduli, with an angular
    // offset so no start sits on the real axis.
    let radius = (coeffs[0].abs() / coeffs[degree].abs())
        .powf(1.0 / degree as f64)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / degree as f64 + 0.4;
            Complex64::from_polar(radius, theta)
        })
        .collect();

    let mut converged = false;
    for _ in 0..opts.max_iterations {
        let mut max_step = 0.0f64;
        for i in 0..degree {
            let value = horner(&coeffs, z[i]);
            if value == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = value / horner(&deriv, z[i]);
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if !step.is_finite() {
                continue;
            }
            z[i] -= step;
            max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
        }
        if max_step <= opts.step_tol {
            converged = true;
            break;
        }
    }

    let iterates = || z.iter().map(|c| (c.re, c.im)).collect::<Vec<_>>();
    for &root in &z {
        let residual = horner(&coeffs, root).norm();
        let tolerance = opts.residual_tol * magnitude_scale(&coeffs, root);
        if !residual.is_finite() {
            return Err(RootError::NoConvergence {
                iterations: opts.max_iterations,
                iterates: iterates(),
            });
        }
        if residual > tolerance {
            if !converged {
                return Err(RootError::NoConvergence {
                    iterations: opts.max_iterations,
                    iterates: iterates(),
                });
            }
            return Err(RootError::Residual {
                root: (root.re, root.im),
                residual,
                tolerance,
            });
        }
    }

    // Real coefficients: every non-real root must come with its conjugate.
    let pair_tol = 1e-6;
    let mut used = vec![false; degree];
    for i in 0..degree {
        if used[i] {
            continue;
        }
        let target = z[i].conj();
        let scale = z[i].norm().max(1.0);
        let partner = (0..degree)
            .filter(|&j| !used[j] && (j != i || z[i].im.abs() <= pair_tol * scale))
            .min_by(|&a, &b| {
                (z[a] - target)
                    .norm()
                    .partial_cmp(&(z[b] - target).norm())
                    .unwrap_or(Ordering::Equal)
            });
        match partner {
            Some(j) if (z[j] - target).norm() <= pair_tol * scale => {
                used[i] = true;
                used[j] = true;
            }
            _ => return Err(RootError::NotConjugateClosed((z[i].re, z[i].im))),
        }
    }

    z.sort_by(|a, b| {
        a.norm()
            .partial_cmp(&b.norm())
            .unwrap_or(Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
    });
    Ok(z)
}

/// A certified real root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootEstimate {
    pub value: f64,
    /// The true root lies within `value ± radius`.
    pub radius: f64,
    /// The root is strictly smaller in modulus than every other root, with
    /// room to spare given `radius`.
    pub unique_smallest: bool,
    /// `min |other root| / |value|` over all remaining roots.
    pub modulus_gap: f64,
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite tolerance")
}

/// Bisects `[lo, hi]` with exact sign evaluations until the bracket is no wider
/// than `tol`, then attaches the uniqueness certificate from [`all_roots`].
pub fn refine_real_root(
    p: &IntPolynomial,
    lo: &BigRational,
    hi: &BigRational,
    tol: f64,
) -> Result<RootEstimate, RootError> {
    let (mut lo, mut hi) = if lo <= hi {
        (lo.clone(), hi.clone())
    } else {
        (hi.clone(), lo.clone())
    };
    let mut s_lo = p.sign_at(&lo);
    let s_hi = p.sign_at(&hi);
    let exact = if s_lo == Ordering::Equal {
        Some(lo.clone())
    } else if s_hi == Ordering::Equal {
        Some(hi.clone())
    } else if s_lo == s_hi {
        return Err(RootError::NoSignChange {
            lo: lo.to_string(),
            hi: hi.to_string(),
        });
    } else {
        None
    };

    let (value, radius) = match exact {
        Some(r) => {
            let v = r.to_f64().unwrap_or(f64::NAN);
            (v, (v.abs() * f64::EPSILON).max(f64::MIN_POSITIVE))
        }
        None => {
            let tol = rational(tol);
            let two = BigRational::from(BigInt::from(2));
            while &hi - &lo > tol {
                let mid = (&lo + &hi) / &two;
                match p.sign_at(&mid) {
                    Ordering::Equal => {
                        lo = mid.clone();
                        hi = mid;
                        break;
                    }
                    s if s == s_lo => {
                        lo = mid;
                        s_lo = s;
                    }
                    _ => hi = mid,
                }
            }
            let mid = (&lo + &hi) / &two;
            let v = mid.to_f64().unwrap_or(f64::NAN);
            let half_width = ((&hi - &lo) / &two).to_f64().unwrap_or(f64::NAN);
            // f64 rounding of the midpoint adds at most one ulp
            (v, half_width + v.abs() * f64::EPSILON + f64::MIN_POSITIVE)
        }
    };

    let roots = all_roots(p)?;
    let target = Complex64::new(value, 0.0);
    let nearest = (0..roots.len())
        .min_by(|&a, &b| {
            (roots[a] - target)
                .norm()
                .partial_cmp(&(roots[b] - target).norm())
                .unwrap_or(Ordering::Equal)
        })
        .expect("degree >= 1");
    let modulus_gap = roots
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != nearest)
        .map(|(_, r)| r.norm() / value.abs())
        .fold(f64::INFINITY, f64::min);
    let unique_smallest = modulus_gap > 1.0 + 10.0 * radius / value.abs();
    Ok(RootEstimate {
        value,
        radius,
        unique_smallest,
        modulus_gap,
    })
}

/// First sign change of `p` on the grid `k/64`, `k = 1..=63`, as an exact
/// bracket `[(k-1)/64, k/64]` (or a degenerate one if `p` vanishes on the grid).
pub fn first_sign_change(p: &IntPolynomial) -> Result<(BigRational, BigRational), RootError> {
    let grid = |k: i64| BigRational::new(BigInt::from(k), BigInt::from(64));
    let mut prev = p.sign_at(&grid(0));
    for k in 1..=63 {
        let x = grid(k);
        let s = p.sign_at(&x);
        if s == Ordering::Equal {
            return Ok((x.clone(), x));
        }
        if prev != Ordering::Equal && s != prev {
            return Ok((grid(k - 1), x));
        }
        prev = s;
    }
    Err(RootError::NoBracket)
}

/// The bound implied by a pair-counting generating function: `(1/alpha)^2`,
/// where `alpha` is the unique smallest-modulus root of the denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthBound {
    pub alpha: RootEstimate,
    /// `1 / alpha`, the exponential growth rate of the coefficients.
    pub growth_rate: f64,
    /// `(1 / alpha)^2`.
    pub bound: f64,
    /// Propagated error on `bound`.
    pub bound_radius: f64,
}

pub fn growth_bound(f: &RationalFunction) -> Result<GrowthBound, RootError> {
    growth_bound_with(f, &RootOptions::default())
}

pub fn growth_bound_with(f: &RationalFunction, opts: &RootOptions) -> Result<GrowthBound, RootError> {
    let den = f.denominator();
    if !den.is_square_free() {
        return Err(RootError::NotSquareFree);
    }
    let roots = all_roots_with(den, opts)?;
    let smallest = roots[0];
    let scale = smallest.norm();
    if smallest.im.abs() > 1e-9 * scale || !(smallest.re > 0.0 && smallest.re < 1.0) {
        return Err(RootError::SmallestNotRealInUnit((smallest.re, smallest.im)));
    }
    let (lo, hi) = first_sign_change(den)?;
    let alpha = refine_real_root(den, &lo, &hi, opts.tol_alpha)?;
    let matches_smallest = (alpha.value - smallest.re).abs() <= 1e-6 * scale.max(1e-300);
    if !alpha.unique_smallest || !matches_smallest {
        return Err(RootError::NotUniqueSmallest {
            first: scale,
            second: roots.get(1).map_or(f64::INFINITY, |r| r.norm()),
        });
    }
    let growth_rate = 1.0 / alpha.value;
    let bound = growth_rate * growth_rate;
    // d/da a^-2 = -2 a^-3
    let bound_radius = 2.0 * alpha.radius / alpha.value.powi(3) + bound * f64::EPSILON;
    Ok(GrowthBound {
        alpha,
        growth_rate,
        bound,
        bound_radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::gf;

    fn p(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn quadratic_roots() {
        let r = all_roots(&p(&[1, -3, 1])).unwrap();
        let sqrt5 = 5f64.sqrt();
        assert!((r[0].re - (3.0 - sqrt5) / 2.0).abs() < 1e-12 && r[0].im.abs() < 1e-12);
        assert!((r[1].re - (3.0 + sqrt5) / 2.0).abs() < 1e-12);
        let r = all_roots(&p(&[1, -4, 1])).unwrap();
        let sqrt3 = 3f64.sqrt();
        assert!((r[0].re - (2.0 - sqrt3)).abs() < 1e-12);
        assert!((r[1].re - (2.0 + sqrt3)).abs() < 1e-12);
        let r = all_roots(&p(&[-1, 1])).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_pairs_and_errors() {
        // x^2 + 1
        let r = all_roots(&p(&[1, 0, 1])).unwrap();
        assert!((r[0].norm() - 1.0).abs() < 1e-12 && (r[0].im + r[1].im).abs() < 1e-12);
        assert_eq!(all_roots(&p(&[3])), Err(RootError::DegreeTooLow(Some(0))));
        assert_eq!(all_roots(&IntPolynomial::zero()), Err(RootError::DegreeTooLow(None)));
    }

    #[test]
    fn all_roots_of_gf_denominators_have_small_residuals() {
        for f in [gf::h(), gf::k(), gf::t()] {
            let den = f.denominator();
            let roots = all_roots(den).unwrap();
            assert_eq!(roots.len(), den.degree().unwrap());
        }
    }

    #[test]
    fn bisection_examples() {
        let est = refine_real_root(&p(&[1, -3, 1]), &q(0, 1), &q(1, 1), 1e-12).unwrap();
        assert!((est.value - (3.0 - 5f64.sqrt()) / 2.0).abs() <= est.radius + 1e-15);
        assert!(est.radius > 0.0 && est.radius <= 1e-12);
        assert!(est.unique_smallest);

        let h = gf::h();
        let est = refine_real_root(h.denominator(), &q(1, 4), &q(3, 10), 1e-11).unwrap();
        assert!((est.value - 0.2695867676).abs() < 1e-9);
        assert!(est.unique_smallest);

        let k = gf::k();
        let est = refine_real_root(k.denominator(), &q(1, 4), &q(3, 10), 1e-7).unwrap();
        assert!((est.value - 0.26978).abs() < 1e-5);
    }

    #[test]
    fn bisection_rejects_equal_signs_and_finds_exact_roots() {
        let err = refine_real_root(&p(&[1, -3, 1]), &q(1, 1), &q(2, 1), 1e-9).unwrap_err();
        assert!(matches!(err, RootError::NoSignChange { .. }));
        // 2x - 1 vanishes at 1/2 exactly
        let est = refine_real_root(&p(&[-1, 2]), &q(1, 2), &q(1, 1), 1e-9).unwrap();
        assert_eq!(est.value, 0.5);
        assert!(est.radius > 0.0);
    }

    #[test]
    fn non_dominant_bracket_is_not_certified() {
        // larger root of x^2 - 3x + 1
        let est = refine_real_root(&p(&[1, -3, 1]), &q(2, 1), &q(3, 1), 1e-9).unwrap();
        assert!(!est.unique_smallest);
        assert!(est.modulus_gap < 1.0);
    }

    #[test]
    fn baseline_bound() {
        let g = growth_bound(&gf::nocb_words()).unwrap();
        assert!((g.bound - (7.0 + 4.0 * 3f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn growth_bound_rejects_repeated_and_tied_roots() {
        let sq = RationalFunction::new(IntPolynomial::one(), &p(&[1, -3, 1]) * &p(&[1, -3, 1])).unwrap();
        assert_eq!(growth_bound(&sq).unwrap_err(), RootError::NotSquareFree);
        // 1 - 4x^2 has roots +-1/2 of equal modulus
        let tie = RationalFunction::from_i64(&[1], &[1, 0, -4]).unwrap();
        assert!(matches!(
            growth_bound(&tie).unwrap_err(),
            RootError::NotUniqueSmallest { .. } | RootError::SmallestNotRealInUnit(_)
        ));
        // 1 + 4x^2: smallest roots are +-i/2
        let complex = RationalFunction::from_i64(&[1], &[1, 0, 4]).unwrap();
        assert!(matches!(
            growth_bound(&complex).unwrap_err(),
            RootError::SmallestNotRealInUnit(_)
        ));
    }

    #[test]
    fn first_sign_change_brackets() {
        let (lo, hi) = first_sign_change(gf::h().denominator()).unwrap();
        assert_eq!((lo, hi), (q(17, 64), q(18, 64)));
        assert_eq!(first_sign_change(&p(&[1, 0, 1])), Err(RootError::NoBracket));
        let (lo, hi) = first_sign_change(&p(&[-1, 2])).unwrap();
        assert_eq!((lo.clone(), hi), (q(1, 2), q(1, 2)));
    }

    #[test]
    fn estimate_json_shape() {
        let est = RootEstimate {
            value: 0.25,
            radius: 1e-12,
            unique_smallest: true,
            modulus_gap: 2.0,
        };
        let v = serde_json::to_value(est).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"value": 0.25, "radius": 1e-12, "unique_smallest": true, "modulus_gap": 2.0})
        );
    }
}

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

use super::{canonical_rep, is_cyclotomic_type, split_cyclotomic, LaurentPolyZ};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Mahler measure `M(h) = log |a_d| + sum log max(1, |alpha_j|)`.
///
/// `exact` is set when every root is a root of unity; then `M = log exact`.
/// Otherwise `numeric` is certified to lie within `error_bound` of the true
/// value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MahlerMeasure {
    #[serde(with = "crate::bigjson::opt")]
    pub exact: Option<BigInt>,
    pub numeric: f64,
    pub error_bound: f64,
}

pub fn mahler_measure(p: &LaurentPolyZ, tol: f64) -> Result<MahlerMeasure> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if is_cyclotomic_type(p)? {
        let lead = canonical_rep(p)?.into_poly().leading_coeff().unwrap().abs();
        let numeric = arith::log_abs(&lead);
        return Ok(MahlerMeasure { exact: Some(lead), numeric, error_bound: 0.0 });
    }
    let lead_log = arith::log_abs(p.leading_coeff().unwrap());
    let (rest, _) = split_cyclotomic(&p.primitive_part());
    let (roots, roots_err) = root_sum(&rest)?;
    let numeric = lead_log + roots;
    let error_bound = roots_err + 4.0 * f64::EPSILON * numeric.abs().max(1.0);
    if error_bound.is_nan() || error_bound > tol {
        return Err(Error::ToleranceNotReached { tol, achieved: error_bound });
    }
    Ok(MahlerMeasure { exact: None, numeric, error_bound })
}

fn derivative(p: &LaurentPolyZ) -> LaurentPolyZ {
    let q = p.polynomial_part();
    let coeffs = q.coeffs().iter().enumerate().skip(1).map(|(k, c)| c * BigInt::from(k)).collect();
    LaurentPolyZ::new(0, coeffs)
}

/// `sum log max(1, |alpha|)` over the roots of `p` with multiplicity, and an
/// error bound. Multiplicities are peeled off with `p = (p / g) * g`,
/// `g = gcd(p, p')`, so root finding only sees squarefree polynomials.
fn root_sum(p: &LaurentPolyZ) -> Result<(f64, f64)> {
    let p = p.polynomial_part();
    if p.span() == 0 {
        return Ok((0.0, 0.0));
    }
    let g = p.gcd(&derivative(&p))?;
    if g.span() == 0 {
        return squarefree_root_sum(&p);
    }
    let sqfree = p.div_exact(&g).expect("gcd divides");
    let (a, ea) = squarefree_root_sum(&sqfree)?;
    let (b, eb) = root_sum(&g)?;
    Ok((a + b, ea + eb))
}

fn horner(a: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for &c in a.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn squarefree_root_sum(p: &LaurentPolyZ) -> Result<(f64, f64)> {
    let n = p.span();
    let coeffs: Vec<f64> = p
        .coeffs()
        .iter()
        .map(|c| c.to_f64().filter(|x| x.is_finite()))
        .collect::<Option<_>>()
        .ok_or(Error::ToleranceNotReached { tol: 0.0, achieved: f64::INFINITY })?;
    let lead = coeffs[n];
    let a: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    if n == 1 {
        let r = a[0].abs();
        let v = r.max(1.0).ln();
        return Ok((v, 4.0 * f64::EPSILON * (1.0 + v)));
    }
    let roots = aberth(&a);
    certify(&a, &roots)
}

fn aberth(a: &[f64]) -> Vec<Complex64> {
    let n = a.len() - 1;
    let radius =
        (0..n).filter(|&k| a[k] != 0.0).map(|k| a[k].abs().powf(1.0 / (n - k) as f64)).fold(0.0f64, f64::max).max(0.5);
    let mut z: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / n as f64 + 0.4)).collect();
    for _ in 0..2000 {
        let mut biggest = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner(a, z[i]);
            if p == Complex64::zero() {
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if w.is_finite() {
                z[i] -= w;
                biggest = biggest.max(w.norm() / z[i].norm().max(1.0));
            }
        }
        if biggest < 1e-15 {
            break;
        }
    }
    z
}

/// Inclusion disks `D(z_i, n |W_i|)` with Weierstrass corrections
/// `W_i = p(z_i) / prod_{j != i} (z_i - z_j)`; when pairwise disjoint each
/// contains exactly one root.
fn certify(a: &[f64], z: &[Complex64]) -> Result<(f64, f64)> {
    let n = z.len();
    let u = f64::EPSILON;
    let mut radii = Vec::with_capacity(n);
    for i in 0..n {
        let (p, _) = horner(a, z[i]);
        let mag = z[i].norm();
        let abs_sum: f64 = a.iter().rev().fold(0.0, |acc, c| acc * mag + c.abs());
        let eval_err = (2 * n + 6) as f64 * u * abs_sum * 1.01;
        let denom: f64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).norm()).product();
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::ToleranceNotReached { tol: 0.0, achieved: f64::INFINITY });
        }
        let w = (p.norm() + eval_err) / denom * (1.0 + (4 * n) as f64 * u);
        radii.push(n as f64 * w);
    }
    for i in 0..n {
        for j in i + 1..n {
            if (z[i] - z[j]).norm() * (1.0 - 4.0 * u) <= radii[i] + radii[j] {
                return Err(Error::ToleranceNotReached { tol: 0.0, achieved: f64::INFINITY });
            }
        }
    }
    let mut mid = 0.0;
    let mut half_width = 0.0;
    for i in 0..n {
        let m = z[i].norm();
        let lo = (m - radii[i]).max(1.0).ln();
        let hi = (m + radii[i]).max(1.0).ln();
        mid += (lo + hi) / 2.0;
        half_width += (hi - lo) / 2.0 + 2.0 * u * hi.max(1.0);
    }
    Ok((mid, half_width))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laurent::cyclotomic_poly;
    use proptest::prelude::*;

    fn z(c: &[i64]) -> LaurentPolyZ {
        LaurentPolyZ::from_i64s(0, c)
    }

    #[test]
    fn cyclotomic_type_is_exact() {
        let m = mahler_measure(&z(&[2, 2]), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(m.exact, Some(BigInt::from(2)));
        assert!((m.numeric - 2f64.ln()).abs() < 1e-15);
        let m = mahler_measure(&z(&[-1, 1]), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(m.exact, Some(BigInt::from(1)));
        assert_eq!(m.numeric, 0.0);
    }

    #[test]
    fn golden_ratio_square() {
        let m = mahler_measure(&z(&[1, -3, 1]), DEFAULT_TOLERANCE).unwrap();
        let expected = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        assert!(m.exact.is_none());
        assert!((m.numeric - expected).abs() < 1e-9);
        assert!(m.error_bound <= DEFAULT_TOLERANCE);
    }

    #[test]
    fn repeated_and_mixed_factors() {
        // 3 (t^2 - 3t + 1)^2 (t + 1) (2t - 5)
        let p = &(&z(&[1, -3, 1]).pow(2) * &z(&[1, 1])) * &z(&[-15, 6]);
        let m = mahler_measure(&p, DEFAULT_TOLERANCE).unwrap();
        let expected = 2.0 * ((3.0 + 5f64.sqrt()) / 2.0).ln() + 3f64.ln() + 5f64.ln();
        assert!((m.numeric - expected).abs() < 1e-9, "{} vs {expected}", m.numeric);
    }

    #[test]
    fn lehmer_polynomial() {
        let lehmer = z(&[1, 1, 0, -1, -1, -1, -1, -1, 0, 1, 1]);
        let m = mahler_measure(&lehmer, DEFAULT_TOLERANCE).unwrap();
        assert!((m.numeric - 1.176_280_818_259_917_5f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn unreachable_tolerance_is_reported() {
        let r = mahler_measure(&z(&[1, -3, 1]), 1e-30);
        assert!(matches!(r, Err(Error::ToleranceNotReached { .. })));
        assert_eq!(mahler_measure(&LaurentPolyZ::zero(), 1e-9), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn exact_value_is_leading_coefficient() {
        let p = &cyclotomic_poly(12).scale(&BigInt::from(-7)) * &cyclotomic_poly(5);
        let m = mahler_measure(&p, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(m.exact, Some(BigInt::from(7)));
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPolyZ> {
        prop::collection::vec(-6i64..=6, 2..6).prop_map(|c| z(&c)).prop_filter("nonzero", |p| !p.is_zero())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn measure_is_additive(p in arb_poly(), q in arb_poly()) {
            let tol = DEFAULT_TOLERANCE;
            let (Ok(mp), Ok(mq), Ok(mpq)) =
                (mahler_measure(&p, tol), mahler_measure(&q, tol), mahler_measure(&(&p * &q), tol))
            else {
                return Err(TestCaseError::fail("certification failed"));
            };
            prop_assert!((mpq.numeric - mp.numeric - mq.numeric).abs() <= 2.0 * tol);
        }
    }
}

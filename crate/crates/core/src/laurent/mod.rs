//! Laurent polynomials in one variable `t` over the integers and over an
//! exact field, with the normalizations used for Alexander polynomials.

mod field;
mod mahler;

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

pub use field::{gcd_over_field, reduce_mod_p, LaurentPolyK};
pub use mahler::{mahler_measure, MahlerMeasure, DEFAULT_TOLERANCE};

/// An element of `Z[t, t^-1]`, stored as `t^min_exp * (c_0 + c_1 t + ...)`
/// with nonzero first and last coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "RawPoly", into = "RawPoly")]
pub struct LaurentPolyZ {
    min_exp: i64,
    coeffs: Vec<BigInt>,
}

#[derive(Serialize, Deserialize)]
struct RawPoly {
    min_exp: i64,
    #[serde(with = "crate::bigjson::vec")]
    coeffs: Vec<BigInt>,
}

impl From<LaurentPolyZ> for RawPoly {
    fn from(p: LaurentPolyZ) -> Self {
        RawPoly { min_exp: p.min_exp, coeffs: p.coeffs }
    }
}

impl From<RawPoly> for LaurentPolyZ {
    fn from(r: RawPoly) -> Self {
        LaurentPolyZ::new(r.min_exp, r.coeffs)
    }
}

impl LaurentPolyZ {
    /// Builds `t^min_exp * sum coeffs[k] t^k`, trimming zero coefficients.
    pub fn new(min_exp: i64, coeffs: Vec<BigInt>) -> Self {
        let mut p = LaurentPolyZ { min_exp, coeffs };
        p.trim();
        p
    }

    pub fn from_i64s(min_exp: i64, coeffs: &[i64]) -> Self {
        Self::new(min_exp, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        LaurentPolyZ { min_exp: 0, coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(0, vec![c])
    }

    /// `c * t^e`.
    pub fn monomial(c: BigInt, e: i64) -> Self {
        Self::new(e, vec![c])
    }

    /// `t^e`.
    pub fn t_pow(e: i64) -> Self {
        Self::monomial(BigInt::one(), e)
    }

    /// `t^e - 1`.
    pub fn t_pow_minus_one(e: i64) -> Self {
        &Self::t_pow(e) - &Self::one()
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead_zeros = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead_zeros == self.coeffs.len() {
            self.coeffs.clear();
            self.min_exp = 0;
            return;
        }
        if lead_zeros > 0 {
            self.coeffs.drain(..lead_zeros);
            self.min_exp += lead_zeros as i64;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True for `+-t^j`.
    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].abs().is_one()
    }

    pub fn min_exp(&self) -> i64 {
        self.min_exp
    }

    /// Highest exponent; `min_exp - 1` for the zero polynomial.
    pub fn max_exp(&self) -> i64 {
        self.min_exp + self.coeffs.len() as i64 - 1
    }

    /// Width `max_exp - min_exp`: the degree of the polynomial part.
    pub fn span(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficients as machine integers, if they all fit.
    pub fn coeffs_i64(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| c.to_i64()).collect()
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        let k = e - self.min_exp;
        if k < 0 || k as usize >= self.coeffs.len() {
            BigInt::zero()
        } else {
            self.coeffs[k as usize].clone()
        }
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// Multiplies by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        LaurentPolyZ { min_exp: self.min_exp + k, coeffs: self.coeffs.clone() }
    }

    /// Polynomial part `t^-min_exp * self`, which has nonzero constant term.
    pub fn polynomial_part(&self) -> Self {
        self.shift(-self.min_exp)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.min_exp, self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Value at `t = 1`.
    pub fn eval_at_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// Value at a nonzero rational point.
    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        let scale = if self.min_exp >= 0 {
            num_traits::pow(x.clone(), self.min_exp as usize)
        } else {
            num_traits::pow(x.recip(), self.min_exp.unsigned_abs() as usize)
        };
        acc * scale
    }

    /// gcd of the coefficients (non-negative; zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        arith::gcd_all(self.coeffs.iter())
    }

    /// `self / content`, with positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.coeffs.last().unwrap().is_negative() {
            c = -c;
        }
        Self::new(self.min_exp, self.coeffs.iter().map(|x| x / &c).collect())
    }

    /// Exact quotient in `Z[t, t^-1]`, or `None` if `other` does not divide `self`.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let (q, r) = poly_divrem_z(&self.coeffs, &other.coeffs)?;
        if !r.is_empty() {
            return None;
        }
        Some(Self::new(self.min_exp - other.min_exp, q))
    }

    /// gcd in `Z[t, t^-1]`, normalized by [`canonical_rep`]; the gcd with
    /// zero is the canonical form of the other argument.
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Err(Error::BothZero),
            (true, false) => return Ok(canonical_rep(other)?.into_poly()),
            (false, true) => return Ok(canonical_rep(self)?.into_poly()),
            _ => {}
        }
        let c = self.content().gcd(&other.content());
        let mut a = self.primitive_part().polynomial_part().coeffs;
        let mut b = other.primitive_part().polynomial_part().coeffs;
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_empty() && b.len() > 1 {
            let r = pseudo_rem(&a, &b);
            a = b;
            b = primitive_vec(&r);
        }
        let g = if b.is_empty() { a } else { vec![BigInt::one()] };
        let g = LaurentPolyZ::new(0, g).primitive_part().scale(&c);
        Ok(canonical_rep(&g)?.into_poly())
    }

    /// `(t - 1)`-adic valuation at the root `t = 1`.
    pub fn valuation_at_one(&self) -> usize {
        let mut v = 0;
        let mut p = self.clone();
        let t_minus_one = Self::t_pow_minus_one(1);
        while !p.is_zero() && p.eval_at_one().is_zero() {
            p = p.div_exact(&t_minus_one).expect("root at one");
            v += 1;
        }
        v
    }
}

fn primitive_vec(v: &[BigInt]) -> Vec<BigInt> {
    let c = arith::gcd_all(v.iter());
    if c.is_zero() || c.is_one() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &c).collect()
}

/// Pseudo-remainder `lc(b)^k a mod b` over the integers.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let lb = b.last().unwrap();
    while r.len() >= b.len() {
        let lr = r.last().unwrap().clone();
        let shift = r.len() - b.len();
        for x in r.iter_mut() {
            *x *= lb;
        }
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] -= &lr * bj;
        }
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
        r = primitive_vec(&r);
    }
    r
}

/// Division of integer polynomials (lowest coefficient first), `None` when
/// some quotient coefficient is not integral.
fn poly_divrem_z(a: &[BigInt], b: &[BigInt]) -> Option<(Vec<BigInt>, Vec<BigInt>)> {
    let mut r = a.to_vec();
    let lb = b.last().unwrap();
    if r.len() < b.len() {
        return Some((Vec::new(), r));
    }
    let mut q = vec![BigInt::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let (c, rem) = r.last().unwrap().div_rem(lb);
        if !rem.is_zero() {
            return None;
        }
        let shift = r.len() - b.len();
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] -= &c * bj;
        }
        q[shift] = c;
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    Some((q, r))
}

impl Add for &LaurentPolyZ {
    type Output = LaurentPolyZ;
    fn add(self, rhs: &LaurentPolyZ) -> LaurentPolyZ {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let lo = self.min_exp.min(rhs.min_exp);
        let hi = self.max_exp().max(rhs.max_exp());
        let coeffs = (lo..=hi).map(|e| self.coeff(e) + rhs.coeff(e)).collect();
        LaurentPolyZ::new(lo, coeffs)
    }
}

impl Neg for &LaurentPolyZ {
    type Output = LaurentPolyZ;
    fn neg(self) -> LaurentPolyZ {
        LaurentPolyZ { min_exp: self.min_exp, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Sub for &LaurentPolyZ {
    type Output = LaurentPolyZ;
    fn sub(self, rhs: &LaurentPolyZ) -> LaurentPolyZ {
        self + &(-rhs)
    }
}

impl Mul for &LaurentPolyZ {
    type Output = LaurentPolyZ;
    fn mul(self, rhs: &LaurentPolyZ) -> LaurentPolyZ {
        if self.is_zero() || rhs.is_zero() {
            return LaurentPolyZ::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        LaurentPolyZ::new(self.min_exp + rhs.min_exp, out)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for LaurentPolyZ {
            type Output = LaurentPolyZ;
            fn $m(self, rhs: LaurentPolyZ) -> LaurentPolyZ {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for LaurentPolyZ {
    type Output = LaurentPolyZ;
    fn neg(self) -> LaurentPolyZ {
        -&self
    }
}

impl fmt::Display for LaurentPolyZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let e = self.min_exp + k as i64;
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            let var = match e {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{e}"),
            };
            if var.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{var}")?;
            } else {
                write!(f, "{mag}{var}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPolyZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A Laurent polynomial with no negative powers, nonzero constant term and
/// positive leading coefficient: the preferred member of its class modulo
/// the units `+-t^j`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalAlexanderRep {
    poly: LaurentPolyZ,
}

impl CanonicalAlexanderRep {
    pub fn one() -> Self {
        CanonicalAlexanderRep { poly: LaurentPolyZ::one() }
    }

    pub fn poly(&self) -> &LaurentPolyZ {
        &self.poly
    }

    pub fn into_poly(self) -> LaurentPolyZ {
        self.poly
    }

    pub fn degree(&self) -> usize {
        self.poly.span()
    }

    pub fn is_one(&self) -> bool {
        self.poly == LaurentPolyZ::one()
    }
}

impl fmt::Display for CanonicalAlexanderRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly)
    }
}

impl fmt::Debug for CanonicalAlexanderRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.poly)
    }
}

/// The unique associate `+-t^j p` in canonical form.
pub fn canonical_rep(p: &LaurentPolyZ) -> Result<CanonicalAlexanderRep> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let mut q = p.polynomial_part();
    if q.coeffs.last().unwrap().is_negative() {
        q = -q;
    }
    Ok(CanonicalAlexanderRep { poly: q })
}

fn cyclotomic_cache() -> &'static Mutex<HashMap<u64, LaurentPolyZ>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, LaurentPolyZ>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The cyclotomic polynomial `Phi_k`, from `t^k - 1 = prod_{d | k} Phi_d`.
pub fn cyclotomic_poly(k: u64) -> LaurentPolyZ {
    assert!(k >= 1, "cyclotomic_poly needs k >= 1");
    if let Some(p) = cyclotomic_cache().lock().unwrap().get(&k) {
        return p.clone();
    }
    let mut quotient = LaurentPolyZ::t_pow_minus_one(k as i64);
    for d in arith::divisors(k) {
        if d < k {
            quotient = quotient.div_exact(&cyclotomic_poly(d)).expect("Phi_d divides t^k - 1");
        }
    }
    cyclotomic_cache().lock().unwrap().insert(k, quotient.clone());
    quotient
}

/// Orders `k` whose cyclotomic polynomial could divide a polynomial of
/// degree `deg`, i.e. every `k` with `phi(k) <= deg`.
pub(crate) fn cyclotomic_candidates(deg: usize) -> Vec<u64> {
    let bound = 2 * (deg as u64) * (deg as u64) + 2;
    (1..=bound).filter(|&k| arith::totient(k) <= deg as u64).collect()
}

/// Divides out every cyclotomic factor of `p` (with multiplicity); returns
/// the cofactor and the list of `(k, multiplicity)` removed.
pub(crate) fn split_cyclotomic(p: &LaurentPolyZ) -> (LaurentPolyZ, Vec<(u64, usize)>) {
    let mut rest = p.polynomial_part();
    let mut found = Vec::new();
    for k in cyclotomic_candidates(rest.span()) {
        if arith::totient(k) as usize > rest.span() {
            continue;
        }
        let phi = cyclotomic_poly(k);
        let mut mult = 0;
        while rest.span() >= phi.span() {
            match rest.div_exact(&phi) {
                Some(q) => {
                    rest = q;
                    mult += 1;
                }
                None => break,
            }
        }
        if mult > 0 {
            found.push((k, mult));
        }
    }
    (rest, found)
}

/// Whether every root of `p` is a root of unity (constants qualify).
pub fn is_cyclotomic_type(p: &LaurentPolyZ) -> Result<bool> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let prim = p.primitive_part();
    let (rest, _) = split_cyclotomic(&prim);
    Ok(rest.span() == 0)
}

/// Removes every factor `t - 1`.
pub fn strip_unit_roots_at_one(p: &LaurentPolyZ) -> Result<LaurentPolyZ> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let t_minus_one = LaurentPolyZ::t_pow_minus_one(1);
    let mut q = p.clone();
    while q.eval_at_one().is_zero() {
        q = q.div_exact(&t_minus_one).expect("root at one");
    }
    Ok(q)
}

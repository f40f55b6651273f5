//! Exact coefficient fields that contain prescribed roots of unity.
//!
//! A [`FieldSpec`] is either a cyclotomic number field `Q[x]/(Phi_n)` (with
//! `Q` itself as the degree-one case) or a finite field `F_p[x]/(f)`. The
//! algebraic closure is never materialised: every computation asks for the
//! unity order it needs and receives a field that is large enough.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::laurent::cyclotomic_poly;

/// Removes every factor of `p` from `mu`; returns `mu` unchanged when `p = 0`.
pub fn coprime_part(mu: u64, p: u64) -> u64 {
    assert!(mu >= 1, "coprime_part needs mu >= 1");
    if p == 0 {
        return mu;
    }
    let mut m = mu;
    while m.is_multiple_of(p) {
        m /= p;
    }
    m
}

/// Dense polynomials over `F_p`, lowest coefficient first.
pub(crate) mod fp_poly {
    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn inv(a: u64, p: u64) -> u64 {
        super::arith_pow(a, p - 2, p)
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
            }
        }
        trim(&mut out);
        out
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out: Vec<u64> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead_inv = inv(b[db], p);
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![0u64; r.len() - db];
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = (*r.last().unwrap() as u128 * lead_inv as u128 % p as u128) as u64;
            q[shift] = c;
            for (j, &bj) in b.iter().enumerate() {
                let t = (c as u128 * bj as u128 % p as u128) as u64;
                r[shift + j] = (r[shift + j] + p - t) % p;
            }
            trim(&mut r);
        }
        trim(&mut q);
        (q, r)
    }

    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        divrem(a, b, p).1
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        if let Some(&lead) = x.last() {
            let li = inv(lead, p);
            for c in x.iter_mut() {
                *c = (*c as u128 * li as u128 % p as u128) as u64;
            }
        }
        x
    }

    pub fn powmod(base: &[u64], mut exp: u128, modulus: &[u64], p: u64) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut b = rem(base, modulus, p);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = rem(&mul(&acc, &b, p), modulus, p);
            }
            b = rem(&mul(&b, &b, p), modulus, p);
            exp >>= 1;
        }
        acc
    }

    /// Rabin's irreducibility test for a monic polynomial over `F_p`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let k = f.len() - 1;
        if k == 0 {
            return false;
        }
        if k == 1 {
            return true;
        }
        let x = vec![0u64, 1];
        // x^(p^j) mod f for j = 0..=k
        let mut frob = vec![rem(&x, f, p)];
        for _ in 0..k {
            let prev = frob.last().unwrap();
            frob.push(powmod(prev, p as u128, f, p));
        }
        if sub(&frob[k], &rem(&x, f, p), p) != Vec::<u64>::new() {
            return false;
        }
        for (q, _) in crate::arith::factor_u64(k as u64) {
            let j = k / q as usize;
            let g = gcd(&sub(&frob[j], &x, p), f, p);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }
}

fn arith_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc as u128 * base as u128 % p as u128) as u64;
        }
        base = (base as u128 * base as u128 % p as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Dense polynomials over `Q`, lowest coefficient first.
mod q_poly {
    use num_rational::BigRational;
    use num_traits::Zero;

    pub fn trim(a: &mut Vec<BigRational>) {
        while a.last().is_some_and(|c| c.is_zero()) {
            a.pop();
        }
    }

    pub fn mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
        trim(&mut out);
        out
    }

    pub fn divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![BigRational::zero(); r.len() - db];
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = r.last().unwrap() / &b[db];
            for (j, bj) in b.iter().enumerate() {
                r[shift + j] -= &c * bj;
            }
            q[shift] = c;
            r.pop();
            trim(&mut r);
        }
        trim(&mut q);
        (q, r)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Modulus {
    Rational(Vec<BigRational>),
    Modular(Vec<u64>),
}

/// An exact coefficient field: `Q[x]/(Phi_n)` in characteristic zero or
/// `F_p[x]/(f)` with `f` irreducible in characteristic `p`.
pub struct FieldSpec {
    characteristic: u64,
    modulus: Vec<i64>,
    unity_order: u64,
    backing: Modulus,
    generator: OnceLock<Rep>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.characteristic == other.characteristic
            && self.modulus == other.modulus
            && self.unity_order == other.unity_order
    }
}
impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("char", &self.characteristic)
            .field("modulus", &self.modulus)
            .field("unity_order", &self.unity_order)
            .finish()
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.characteristic, self.degree()) {
            (0, 1) => write!(f, "Q"),
            (0, _) => write!(f, "Q(zeta_{})", self.unity_order),
            (p, 1) => write!(f, "F_{p}"),
            (p, k) => write!(f, "F_{p}^{k}"),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct FieldSpecJson {
    #[serde(rename = "char")]
    characteristic: u64,
    modulus: Vec<i64>,
    unity_order: u64,
}

impl Serialize for FieldSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FieldSpecJson {
            characteristic: self.characteristic,
            modulus: self.modulus.clone(),
            unity_order: self.unity_order,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = FieldSpecJson::deserialize(d)?;
        FieldSpec::build(raw.characteristic, raw.modulus, raw.unity_order).map_err(serde::de::Error::custom)
    }
}

impl FieldSpec {
    /// Validating constructor. Characteristic-zero moduli must be the
    /// cyclotomic polynomial of some order (or a monic linear polynomial);
    /// prime-characteristic moduli must pass an irreducibility test.
    pub fn new(characteristic: u64, modulus: Vec<i64>, unity_order: u64) -> Result<Arc<Self>> {
        Self::build(characteristic, modulus, unity_order).map(Arc::new)
    }

    fn build(characteristic: u64, modulus: Vec<i64>, unity_order: u64) -> Result<Self> {
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidField("modulus must be monic of degree >= 1".into()));
        }
        if unity_order == 0 {
            return Err(Error::InvalidField("unity_order must be positive".into()));
        }
        let degree = modulus.len() - 1;
        let backing = if characteristic == 0 {
            if degree > 1 {
                let m = (1..=(4 * degree as u64 * degree as u64 + 6))
                    .find(|&m| {
                        arith::totient(m) == degree as u64
                            && cyclotomic_poly(m).coeffs_i64().as_deref() == Some(&modulus[..])
                    })
                    .ok_or_else(|| Error::InvalidField("characteristic-zero modulus must be cyclotomic".into()))?;
                if !lcm_u64(2, m).is_multiple_of(unity_order) {
                    return Err(Error::InvalidField(format!(
                        "Q(zeta_{m}) does not contain roots of unity of order {unity_order}"
                    )));
                }
            } else if unity_order > 2 {
                return Err(Error::InvalidField(format!("Q does not contain roots of unity of order {unity_order}")));
            }
            Modulus::Rational(modulus.iter().map(|&c| BigRational::from_integer(c.into())).collect())
        } else {
            if !arith::is_prime(characteristic) {
                return Err(Error::InvalidField(format!("{characteristic} is not prime")));
            }
            let p = characteristic;
            let reduced: Vec<u64> = modulus.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
            if reduced.iter().map(|&c| c as i64).collect::<Vec<_>>() != modulus {
                return Err(Error::InvalidField("modulus coefficients must lie in 0..p".into()));
            }
            if !fp_poly::is_irreducible(&reduced, p) {
                return Err(Error::InvalidField(format!("modulus {modulus:?} is reducible mod {p}")));
            }
            let size =
                (p as u128).checked_pow(degree as u32).ok_or_else(|| Error::InvalidField("field too large".into()))?;
            let capacity = size - 1;
            if capacity % coprime_part(unity_order, p) as u128 != 0 {
                return Err(Error::InvalidField(format!(
                    "F_{p}^{degree} has no roots of unity of order {}",
                    coprime_part(unity_order, p)
                )));
            }
            Modulus::Modular(reduced)
        };
        Ok(FieldSpec { characteristic, modulus, unity_order, backing, generator: OnceLock::new() })
    }

    /// The rationals.
    pub fn rationals() -> Arc<Self> {
        Self::new(0, vec![0, 1], 1).expect("Q is valid")
    }

    /// The prime field `F_p`.
    pub fn prime_field(p: u64) -> Result<Arc<Self>> {
        if p == 0 {
            return Ok(Self::rationals());
        }
        Self::new(p, vec![0, 1], 1)
    }

    /// A field of the given characteristic with at least `min_nonzero`
    /// nonzero elements: `Q` for characteristic zero, otherwise `F_{p^k}`
    /// with the lexicographically first irreducible modulus of degree `k`.
    pub fn with_min_size(characteristic: u64, min_nonzero: u64) -> Result<Arc<Self>> {
        if characteristic == 0 {
            return Ok(Self::rationals());
        }
        let p = characteristic;
        if !arith::is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        let mut k = 1u32;
        while (p as u128).pow(k) - 1 < min_nonzero as u128 {
            k += 1;
        }
        let modulus = first_irreducible(p, k as usize, |_| true)?;
        let q = p.checked_pow(k).ok_or_else(|| Error::InvalidField("field too large".into()))?;
        Self::new(p, modulus.iter().map(|&c| c as i64).collect(), q - 1)
    }

    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn modulus(&self) -> &[i64] {
        &self.modulus
    }

    pub fn unity_order(&self) -> u64 {
        self.unity_order
    }

    /// Number of elements, `None` in characteristic zero.
    pub fn size(&self) -> Option<u128> {
        match self.characteristic {
            0 => None,
            p => Some((p as u128).pow(self.degree() as u32)),
        }
    }

    /// Order of the group of roots of unity contained in the field.
    pub fn unity_capacity(&self) -> u64 {
        match self.characteristic {
            0 => {
                if self.degree() == 1 {
                    2
                } else {
                    let m = self.cyclotomic_index();
                    lcm_u64(2, m)
                }
            }
            _ => (self.size().unwrap() - 1) as u64,
        }
    }

    fn cyclotomic_index(&self) -> u64 {
        let d = self.degree() as u64;
        (1..=(4 * d * d + 6))
            .find(|&m| arith::totient(m) == d && cyclotomic_poly(m).coeffs_i64().as_deref() == Some(&self.modulus[..]))
            .unwrap_or(1)
    }
}

fn lcm_u64(a: u64, b: u64) -> u64 {
    a / a.gcd(&b) * b
}

/// Lexicographically first monic polynomial of degree `k` over `F_p` that is
/// irreducible and satisfies `accept`.
fn first_irreducible(p: u64, k: usize, accept: impl Fn(&[u64]) -> bool) -> Result<Vec<u64>> {
    let total = (p as u128).pow(k as u32);
    if total > 50_000_000 {
        return Err(Error::InvalidField(format!("search space F_{p}^{k} too large")));
    }
    for idx in 0..total {
        let mut f = digits(idx, p, k);
        f.push(1);
        if fp_poly::is_irreducible(&f, p) && accept(&f) {
            return Ok(f);
        }
    }
    Err(Error::InvalidField(format!("no irreducible polynomial of degree {k} over F_{p}")))
}

fn digits(mut idx: u128, p: u64, k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        out.push((idx % p as u128) as u64);
        idx /= p as u128;
    }
    out
}

/// Builds a field of the given characteristic containing a primitive root of
/// unity of order `coprime_part(n, characteristic)`.
///
/// In characteristic zero this is `Q[x]/(Phi_n)`. In characteristic `p` the
/// modulus is the lexicographically first monic irreducible factor of
/// `Phi_{n'}` mod `p`, of degree equal to the multiplicative order of `p`
/// modulo `n'`.
pub fn make_splitting_field(characteristic: u64, n: u64) -> Result<Arc<FieldSpec>> {
    if n == 0 {
        return Err(Error::InvalidField("unity order must be positive".into()));
    }
    if characteristic == 0 {
        let phi = cyclotomic_poly(n);
        let modulus = phi
            .coeffs_i64()
            .ok_or_else(|| Error::InvalidField(format!("cyclotomic polynomial of order {n} too large")))?;
        return FieldSpec::new(0, modulus, n);
    }
    let p = characteristic;
    if !arith::is_prime(p) {
        return Err(Error::InvalidField(format!("{p} is not prime")));
    }
    let n_prime = coprime_part(n, p);
    let k = arith::multiplicative_order(p % n_prime.max(1), n_prime) as usize;
    let phi: Vec<u64> = cyclotomic_poly(n_prime)
        .coeffs()
        .iter()
        .map(|c| {
            let r = c.mod_floor(&BigInt::from(p));
            r.to_u64().unwrap()
        })
        .collect();
    let modulus = first_irreducible(p, k.max(1), |f| fp_poly::rem(&phi, f, p).is_empty())?;
    FieldSpec::new(p, modulus.iter().map(|&c| c as i64).collect(), n)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Rep {
    Rational(Vec<BigRational>),
    Modular(Vec<u64>),
}

/// An element of a [`FieldSpec`], stored as a reduced residue polynomial of
/// length `degree` (padded with zeros).
#[derive(Clone)]
pub struct FieldElem {
    field: Arc<FieldSpec>,
    rep: Rep,
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.rep == other.rep && same_field(&self.field, &other.field)
    }
}
impl Eq for FieldElem {}

impl Hash for FieldElem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rep.hash(state);
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = match &self.rep {
            Rep::Rational(v) => v.iter().map(|c| c.to_string()).collect(),
            Rep::Modular(v) => v.iter().map(|c| c.to_string()).collect(),
        };
        if terms.len() == 1 {
            write!(f, "{}", terms[0])
        } else {
            write!(f, "[{}]", terms.join(", "))
        }
    }
}

pub(crate) fn same_field(a: &Arc<FieldSpec>, b: &Arc<FieldSpec>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl FieldElem {
    pub fn zero(field: &Arc<FieldSpec>) -> Self {
        let d = field.degree();
        let rep = match field.backing {
            Modulus::Rational(_) => Rep::Rational(vec![BigRational::zero(); d]),
            Modulus::Modular(_) => Rep::Modular(vec![0; d]),
        };
        FieldElem { field: field.clone(), rep }
    }

    pub fn one(field: &Arc<FieldSpec>) -> Self {
        Self::from_i64(field, 1)
    }

    pub fn from_i64(field: &Arc<FieldSpec>, v: i64) -> Self {
        Self::from_int(field, &BigInt::from(v))
    }

    /// Image of an integer under the canonical map `Z -> field`.
    pub fn from_int(field: &Arc<FieldSpec>, v: &BigInt) -> Self {
        let mut e = Self::zero(field);
        match &mut e.rep {
            Rep::Rational(c) => c[0] = BigRational::from_integer(v.clone()),
            Rep::Modular(c) => {
                let p = BigInt::from(field.characteristic);
                c[0] = v.mod_floor(&p).to_u64().unwrap();
            }
        }
        e
    }

    pub fn from_rational(field: &Arc<FieldSpec>, v: &BigRational) -> Result<Self> {
        match field.characteristic {
            0 => {
                let mut e = Self::zero(field);
                if let Rep::Rational(c) = &mut e.rep {
                    c[0] = v.clone();
                }
                Ok(e)
            }
            _ => {
                let den = Self::from_int(field, v.denom());
                if den.is_zero() {
                    return Err(Error::InvalidInput(format!(
                        "{v} is undefined in characteristic {}",
                        field.characteristic
                    )));
                }
                Ok(Self::from_int(field, v.numer()).div(&den))
            }
        }
    }

    /// Element given by its residue coefficients (lowest first), as
    /// rationals in characteristic zero or integers reduced mod `p`.
    pub fn from_coeffs(field: &Arc<FieldSpec>, coeffs: &[BigRational]) -> Result<Self> {
        let x = Self::generator_class(field);
        let mut acc = Self::zero(field);
        let mut power = Self::one(field);
        for c in coeffs {
            acc = acc.add(&power.mul(&Self::from_rational(field, c)?));
            power = power.mul(&x);
        }
        Ok(acc)
    }

    /// The class of `x` in `K[x]/(modulus)`.
    pub fn generator_class(field: &Arc<FieldSpec>) -> Self {
        let d = field.degree();
        let mut e = Self::zero(field);
        if d == 1 {
            // x = -modulus[0]
            let m0 = -field.modulus[0];
            return Self::from_i64(field, m0);
        }
        match &mut e.rep {
            Rep::Rational(c) => c[1] = BigRational::one(),
            Rep::Modular(c) => c[1] = 1,
        }
        e
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        match &self.rep {
            Rep::Rational(c) => c.iter().all(|x| x.is_zero()),
            Rep::Modular(c) => c.iter().all(|&x| x == 0),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.rep {
            Rep::Rational(c) => c[0].is_one() && c[1..].iter().all(|x| x.is_zero()),
            Rep::Modular(c) => c[0] == 1 && c[1..].iter().all(|&x| x == 0),
        }
    }

    /// Residue coefficients as rationals (integers `0..p` in characteristic `p`).
    pub fn coeffs(&self) -> Vec<BigRational> {
        match &self.rep {
            Rep::Rational(c) => c.clone(),
            Rep::Modular(c) => c.iter().map(|&x| BigRational::from_integer(x.into())).collect(),
        }
    }

    fn with_rep(&self, rep: Rep) -> Self {
        FieldElem { field: self.field.clone(), rep }
    }

    fn check(&self, other: &Self) {
        debug_assert!(same_field(&self.field, &other.field), "field mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        match (&self.rep, &other.rep) {
            (Rep::Rational(a), Rep::Rational(b)) => {
                self.with_rep(Rep::Rational(a.iter().zip(b).map(|(x, y)| x + y).collect()))
            }
            (Rep::Modular(a), Rep::Modular(b)) => {
                let p = self.field.characteristic;
                self.with_rep(Rep::Modular(a.iter().zip(b).map(|(x, y)| (x + y) % p).collect()))
            }
            _ => panic!("field mismatch"),
        }
    }

    pub fn neg(&self) -> Self {
        match &self.rep {
            Rep::Rational(a) => self.with_rep(Rep::Rational(a.iter().map(|x| -x).collect())),
            Rep::Modular(a) => {
                let p = self.field.characteristic;
                self.with_rep(Rep::Modular(a.iter().map(|&x| (p - x) % p).collect()))
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        match (&self.rep, &other.rep, &self.field.backing) {
            (Rep::Rational(a), Rep::Rational(b), Modulus::Rational(m)) => {
                if a.len() == 1 {
                    return self.with_rep(Rep::Rational(vec![&a[0] * &b[0]]));
                }
                let prod = q_poly::mul(a, b);
                let r = if prod.len() >= m.len() { q_poly::divrem(&prod, m).1 } else { prod };
                self.with_rep(Rep::Rational(pad(r, a.len(), BigRational::zero())))
            }
            (Rep::Modular(a), Rep::Modular(b), Modulus::Modular(m)) => {
                let p = self.field.characteristic;
                if a.len() == 1 {
                    return self.with_rep(Rep::Modular(vec![(a[0] as u128 * b[0] as u128 % p as u128) as u64]));
                }
                let prod = fp_poly::mul(a, b, p);
                let r = if prod.len() >= m.len() { fp_poly::rem(&prod, m, p) } else { prod };
                self.with_rep(Rep::Modular(pad(r, a.len(), 0)))
            }
            _ => panic!("field mismatch"),
        }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        match (&self.rep, &self.field.backing) {
            (Rep::Rational(a), Modulus::Rational(m)) => {
                if a.len() == 1 {
                    return self.with_rep(Rep::Rational(vec![a[0].recip()]));
                }
                let inv = q_inverse_mod(a, m);
                self.with_rep(Rep::Rational(pad(inv, a.len(), BigRational::zero())))
            }
            (Rep::Modular(a), Modulus::Modular(_)) => {
                let p = self.field.characteristic;
                if a.len() == 1 {
                    return self.with_rep(Rep::Modular(vec![fp_poly::inv(a[0], p)]));
                }
                let q = self.field.size().unwrap();
                self.pow_u128(q - 2)
            }
            _ => panic!("field mismatch"),
        }
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }

    fn pow_u128(&self, mut exp: u128) -> Self {
        let mut acc = Self::one(&self.field);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Integer power; negative exponents invert (the element must be nonzero).
    pub fn pow(&self, exp: i64) -> Self {
        if exp < 0 {
            self.inv().pow_u128(exp.unsigned_abs() as u128)
        } else {
            self.pow_u128(exp as u128)
        }
    }

    /// Multiplicative order of a nonzero element, `None` if infinite.
    pub fn multiplicative_order(&self) -> Option<u64> {
        if self.is_zero() {
            return None;
        }
        let cap = self.field.unity_capacity();
        if self.field.characteristic == 0 {
            // roots of unity in the field have order dividing the capacity
            if !self.pow(cap as i64).is_one() {
                return None;
            }
        }
        let mut order = cap;
        for (p, _) in arith::factor_u64(cap) {
            while order.is_multiple_of(p) && self.pow((order / p) as i64).is_one() {
                order /= p;
            }
        }
        Some(order)
    }
}

fn pad<T: Clone>(mut v: Vec<T>, len: usize, zero: T) -> Vec<T> {
    v.resize(len, zero);
    v
}

fn q_inverse_mod(a: &[BigRational], m: &[BigRational]) -> Vec<BigRational> {
    // extended Euclid: track s with s*a = r (mod m)
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    q_poly::trim(&mut r1);
    let mut s0: Vec<BigRational> = Vec::new();
    let mut s1: Vec<BigRational> = vec![BigRational::one()];
    while r1.len() > 1 {
        let (q, r) = q_poly::divrem(&r0, &r1);
        let qs = q_poly::mul(&q, &s1);
        let n = s0.len().max(qs.len());
        let mut s2: Vec<BigRational> = (0..n)
            .map(|i| {
                s0.get(i).cloned().unwrap_or_else(BigRational::zero)
                    - qs.get(i).cloned().unwrap_or_else(BigRational::zero)
            })
            .collect();
        q_poly::trim(&mut s2);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s2;
    }
    let c = r1[0].recip();
    let mut out: Vec<BigRational> = s1.iter().map(|x| x * &c).collect();
    if out.len() >= m.len() {
        out = q_poly::divrem(&out, m).1;
    }
    out
}

impl FieldSpec {
    /// A uniformly random nonzero element (finite fields), or a random
    /// nonzero element with small integer residue coefficients (characteristic 0).
    pub fn random_nonzero<R: Rng + ?Sized>(self: &Arc<Self>, rng: &mut R) -> FieldElem {
        match self.characteristic {
            0 => loop {
                let coeffs: Vec<BigRational> = (0..self.degree())
                    .map(|_| BigRational::from_integer(rng.gen_range(-1000i64..=1000).into()))
                    .collect();
                let e = FieldElem { field: self.clone(), rep: Rep::Rational(coeffs) };
                if !e.is_zero() {
                    return e;
                }
            },
            _ => {
                let q = self.size().unwrap();
                let idx = rng.gen_range(1..q);
                self.element(idx)
            }
        }
    }

    /// Element number `idx` of a finite field in base-`p` digit order.
    pub fn element(self: &Arc<Self>, idx: u128) -> FieldElem {
        assert!(self.characteristic != 0, "only finite fields are enumerable");
        let d = digits(idx, self.characteristic, self.degree());
        FieldElem { field: self.clone(), rep: Rep::Modular(d) }
    }

    fn generator(self: &Arc<Self>) -> FieldElem {
        let rep = self
            .generator
            .get_or_init(|| {
                let q = self.size().unwrap();
                let order = (q - 1) as u64;
                let primes: Vec<u64> = arith::factor_u64(order).into_keys().collect();
                for idx in 1..q {
                    let e = self.element(idx);
                    if primes.iter().all(|&l| !e.pow((order / l) as i64).is_one()) {
                        return e.rep;
                    }
                }
                unreachable!("finite field multiplicative group is cyclic")
            })
            .clone();
        FieldElem { field: self.clone(), rep }
    }
}

/// An element of exact multiplicative order `coprime_part(n, char)`.
///
/// Finite fields use the smallest power of the first generator (in element
/// enumeration order); cyclotomic fields use the class of `x` (or `-x` when
/// the requested order only divides twice an odd field index).
pub fn root_of_unity(field: &Arc<FieldSpec>, n: u64) -> Result<FieldElem> {
    let order = coprime_part(n, field.characteristic);
    let capacity = field.unity_capacity();
    if !capacity.is_multiple_of(order) {
        return Err(Error::OrderUnavailable { characteristic: field.characteristic, order });
    }
    if field.characteristic == 0 {
        if order <= 2 {
            return Ok(FieldElem::from_i64(field, if order == 1 { 1 } else { -1 }));
        }
        let m = field.cyclotomic_index();
        let x = FieldElem::generator_class(field);
        if m.is_multiple_of(order) {
            return Ok(x.pow((m / order) as i64));
        }
        return Ok(x.neg().pow((2 * m / order) as i64));
    }
    let g = field.generator();
    Ok(g.pow((capacity / order) as i64))
}

/// Reduction of a big integer modulo a small prime, as an element of `F_p`
/// viewed inside `field`.
pub fn reduce_int(field: &Arc<FieldSpec>, v: &BigInt) -> FieldElem {
    FieldElem::from_int(field, v)
}

impl FieldElem {
    /// Parses a serialized residue: a list of rationals/integers.
    pub fn from_json_coeffs(field: &Arc<FieldSpec>, coeffs: &[String]) -> Result<Self> {
        let parsed: Result<Vec<BigRational>> = coeffs
            .iter()
            .map(|s| s.parse::<BigRational>().map_err(|e| Error::InvalidInput(format!("bad rational '{s}': {e}"))))
            .collect();
        Self::from_coeffs(field, &parsed?)
    }

    /// Residue coefficients as decimal strings (`a/b` for non-integral rationals).
    pub fn to_json_coeffs(&self) -> Vec<String> {
        self.coeffs().iter().map(|c| if c.is_integer() { c.numer().to_string() } else { c.to_string() }).collect()
    }

    /// Absolute value of the constant residue coefficient; used only for
    /// deterministic ordering in reports.
    pub fn sort_key(&self) -> Vec<String> {
        self.coeffs().iter().map(|c| c.abs().to_string()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn coprime_part_examples() {
        assert_eq!(coprime_part(12, 2), 3);
        assert_eq!(coprime_part(5, 0), 5);
        assert_eq!(coprime_part(8, 2), 1);
    }

    #[test]
    fn splitting_field_examples() {
        let q3 = make_splitting_field(0, 3).unwrap();
        assert_eq!(q3.modulus(), &[1, 1, 1]);
        assert_eq!(q3.characteristic(), 0);
        let f4 = make_splitting_field(2, 3).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        assert_eq!(f4.size(), Some(4));
        let f4b = make_splitting_field(2, 6).unwrap();
        assert_eq!(f4b.modulus(), &[1, 1, 1]);
        assert_eq!(f4b.unity_order(), 6);
    }

    #[test]
    fn root_of_unity_examples() {
        let q3 = make_splitting_field(0, 3).unwrap();
        let z = root_of_unity(&q3, 3).unwrap();
        assert_eq!(z, FieldElem::generator_class(&q3));
        assert_eq!(z.multiplicative_order(), Some(3));
        let f4 = make_splitting_field(2, 3).unwrap();
        let w = root_of_unity(&f4, 3).unwrap();
        assert_eq!(w, FieldElem::generator_class(&f4));
        let f2 = FieldSpec::prime_field(2).unwrap();
        assert!(root_of_unity(&f2, 2).unwrap().is_one());
        assert!(matches!(root_of_unity(&f2, 3), Err(Error::OrderUnavailable { .. })));
        let q = FieldSpec::rationals();
        assert_eq!(root_of_unity(&q, 2).unwrap(), FieldElem::from_i64(&q, -1));
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(FieldSpec::new(2, vec![1, 0, 1], 1).is_err()); // x^2+1 = (x+1)^2
        assert!(FieldSpec::new(4, vec![0, 1], 1).is_err());
        assert!(FieldSpec::new(0, vec![1, 0, 0, 1], 1).is_err()); // x^3+1 not cyclotomic
        assert!(FieldSpec::new(2, vec![1, 1, 1], 5).is_err());
        assert!(FieldSpec::new(0, vec![1, 0, 1], 4).is_ok());
    }

    #[test]
    fn serde_roundtrip() {
        let f = make_splitting_field(3, 8).unwrap();
        let s = serde_json::to_string(&*f).unwrap();
        assert!(s.contains("\"char\":3"));
        let back: FieldSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, *f);
    }

    fn check_axioms(field: &Arc<FieldSpec>) {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let one = FieldElem::one(field);
        for _ in 0..1000 {
            let a = field.random_nonzero(&mut rng);
            let b = field.random_nonzero(&mut rng);
            let c = field.random_nonzero(&mut rng);
            assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            assert_eq!(a.inv().mul(&a), one);
        }
    }

    #[test]
    fn field_axioms_on_samples() {
        check_axioms(&FieldSpec::rationals());
        check_axioms(&make_splitting_field(0, 5).unwrap());
        check_axioms(&make_splitting_field(2, 7).unwrap());
        check_axioms(&make_splitting_field(5, 12).unwrap());
        check_axioms(&FieldSpec::with_min_size(3, 100).unwrap());
    }

    #[test]
    fn roots_of_unity_have_exact_order() {
        for (ch, n) in [(0, 12), (0, 5), (0, 6), (2, 12), (3, 8), (5, 6), (7, 9)] {
            let f = make_splitting_field(ch, n).unwrap();
            let order = coprime_part(n, ch);
            let z = root_of_unity(&f, n).unwrap();
            assert!(z.pow(order as i64).is_one());
            for k in 1..order {
                assert!(!z.pow(k as i64).is_one(), "char {ch} n {n} k {k}");
            }
            if ch > 0 {
                assert_eq!((f.size().unwrap() - 1) % order as u128, 0);
            }
        }
    }
}

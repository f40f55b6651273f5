use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fields::{same_field, FieldElem, FieldSpec};

use super::LaurentPolyZ;

/// An element of `K[t, t^-1]` for an exact field `K`, trimmed like
/// [`LaurentPolyZ`].
#[derive(Clone)]
pub struct LaurentPolyK {
    field: Arc<FieldSpec>,
    min_exp: i64,
    coeffs: Vec<FieldElem>,
}

impl PartialEq for LaurentPolyK {
    fn eq(&self, other: &Self) -> bool {
        same_field(&self.field, &other.field) && self.min_exp == other.min_exp && self.coeffs == other.coeffs
    }
}
impl Eq for LaurentPolyK {}

impl fmt::Debug for LaurentPolyK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0 over {}", self.field);
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| format!("({c})t^{}", self.min_exp + k as i64))
            .collect();
        write!(f, "{} over {}", terms.join(" + "), self.field)
    }
}

impl LaurentPolyK {
    pub fn new(field: &Arc<FieldSpec>, min_exp: i64, coeffs: Vec<FieldElem>) -> Self {
        let mut p = LaurentPolyK { field: field.clone(), min_exp, coeffs };
        p.trim();
        p
    }

    pub fn zero(field: &Arc<FieldSpec>) -> Self {
        LaurentPolyK { field: field.clone(), min_exp: 0, coeffs: Vec::new() }
    }

    pub fn constant(c: FieldElem) -> Self {
        let field = c.field().clone();
        Self::new(&field, 0, vec![c])
    }

    /// Image of an integral Laurent polynomial under `Z -> K`.
    pub fn from_z(field: &Arc<FieldSpec>, p: &LaurentPolyZ) -> Self {
        let coeffs = p.coeffs().iter().map(|c| FieldElem::from_int(field, c)).collect();
        Self::new(field, p.min_exp(), coeffs)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.min_exp = 0;
        } else if lead > 0 {
            self.coeffs.drain(..lead);
            self.min_exp += lead as i64;
        }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_exp(&self) -> i64 {
        self.min_exp
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    /// Degree of the polynomial part (`max_exp - min_exp`).
    pub fn span(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn coeff(&self, e: i64) -> FieldElem {
        let k = e - self.min_exp;
        if k < 0 || k as usize >= self.coeffs.len() {
            FieldElem::zero(&self.field)
        } else {
            self.coeffs[k as usize].clone()
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.min_exp.min(other.min_exp);
        let hi = (self.min_exp + self.coeffs.len() as i64).max(other.min_exp + other.coeffs.len() as i64);
        let coeffs = (lo..hi).map(|e| self.coeff(e).add(&other.coeff(e))).collect();
        Self::new(&self.field, lo, coeffs)
    }

    pub fn neg(&self) -> Self {
        LaurentPolyK {
            field: self.field.clone(),
            min_exp: self.min_exp,
            coeffs: self.coeffs.iter().map(|c| c.neg()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.field);
        }
        let mut out = vec![FieldElem::zero(&self.field); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(&self.field, self.min_exp + other.min_exp, out)
    }

    pub fn scale(&self, c: &FieldElem) -> Self {
        Self::new(&self.field, self.min_exp, self.coeffs.iter().map(|x| x.mul(c)).collect())
    }

    /// Polynomial part scaled to be monic; zero stays zero.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.coeffs.last().unwrap().inv();
        Self::new(&self.field, 0, self.coeffs.iter().map(|x| x.mul(&inv)).collect())
    }

    /// Quotient and remainder of the polynomial parts in `K[t]`.
    pub fn divrem(&self, other: &Self) -> (Self, Self) {
        assert!(!other.is_zero(), "division by zero polynomial");
        let mut r: Vec<FieldElem> = self.coeffs.clone();
        let b = &other.coeffs;
        let lead_inv = b.last().unwrap().inv();
        let zero = FieldElem::zero(&self.field);
        let mut q = vec![zero.clone(); r.len().saturating_sub(b.len() - 1).max(1)];
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = r.last().unwrap().mul(&lead_inv);
            for (j, bj) in b.iter().enumerate() {
                r[shift + j] = r[shift + j].sub(&c.mul(bj));
            }
            q[shift] = c;
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        (Self::new(&self.field, 0, q), Self::new(&self.field, 0, r))
    }

    /// Exact quotient in `K[t, t^-1]`, or `None`.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        let (q, r) = self.divrem(other);
        if !r.is_zero() {
            return None;
        }
        if q.is_zero() {
            return Some(q);
        }
        let min_exp = q.min_exp + self.min_exp - other.min_exp;
        Some(LaurentPolyK { min_exp, ..q })
    }

    /// Value at a nonzero field element.
    pub fn eval(&self, x: &FieldElem) -> FieldElem {
        let mut acc = FieldElem::zero(&self.field);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc.mul(&x.pow(self.min_exp))
    }
}

/// Monic gcd of the polynomial parts of `a` and `b` in `K[t]`.
pub fn gcd_over_field(a: &LaurentPolyK, b: &LaurentPolyK) -> Result<LaurentPolyK> {
    if !same_field(&a.field, &b.field) {
        return Err(Error::FieldMismatch);
    }
    if a.is_zero() && b.is_zero() {
        return Err(Error::BothZero);
    }
    let mut x = a.monic();
    let mut y = b.monic();
    while !y.is_zero() {
        let (_, r) = x.divrem(&y);
        x = y;
        y = r.monic();
    }
    Ok(x.monic())
}

/// Coefficientwise reduction into a field of prime characteristic.
pub fn reduce_mod_p(p: &LaurentPolyZ, field: &Arc<FieldSpec>) -> Result<LaurentPolyK> {
    if field.characteristic() == 0 {
        return Err(Error::InvalidField("reduction needs a field of prime characteristic".into()));
    }
    Ok(LaurentPolyK::from_z(field, p))
}

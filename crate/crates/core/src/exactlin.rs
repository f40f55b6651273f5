//! Exact linear algebra: Smith normal form over `Z`, fraction-free rank and
//! determinants over integral domains, gcds of maximal minors over
//! `Z[t, t^-1]` and `K[t, t^-1]`, and the substitution `t -> J_N`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::fields::{FieldElem, FieldSpec};
use crate::laurent::{canonical_rep, gcd_over_field, CanonicalAlexanderRep, LaurentPolyK, LaurentPolyZ};

/// Arithmetic needed by fraction-free elimination.
pub trait Ring: Clone + PartialEq {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn add_elem(&self, other: &Self) -> Self;
    fn sub_elem(&self, other: &Self) -> Self;
    fn mul_elem(&self, other: &Self) -> Self;
    /// Exact quotient; the caller guarantees divisibility.
    fn div_exact_elem(&self, other: &Self) -> Self;
    /// Rough size used to prefer small pivots.
    fn size(&self) -> usize {
        0
    }
}

impl Ring for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_elem(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_elem(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_elem(&self, o: &Self) -> Self {
        self * o
    }
    fn div_exact_elem(&self, o: &Self) -> Self {
        self / o
    }
    fn size(&self) -> usize {
        self.bits() as usize
    }
}

impl Ring for LaurentPolyZ {
    fn zero_like(&self) -> Self {
        LaurentPolyZ::zero()
    }
    fn one_like(&self) -> Self {
        LaurentPolyZ::one()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_elem(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_elem(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_elem(&self, o: &Self) -> Self {
        self * o
    }
    fn div_exact_elem(&self, o: &Self) -> Self {
        self.div_exact(o).expect("fraction-free step is exact")
    }
    fn size(&self) -> usize {
        self.span() * 64 + self.coeffs().iter().map(|c| c.bits() as usize).max().unwrap_or(0)
    }
}

impl Ring for LaurentPolyK {
    fn zero_like(&self) -> Self {
        LaurentPolyK::zero(self.field())
    }
    fn one_like(&self) -> Self {
        LaurentPolyK::constant(FieldElem::one(self.field()))
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_elem(&self, o: &Self) -> Self {
        LaurentPolyK::add(self, o)
    }
    fn sub_elem(&self, o: &Self) -> Self {
        LaurentPolyK::sub(self, o)
    }
    fn mul_elem(&self, o: &Self) -> Self {
        LaurentPolyK::mul(self, o)
    }
    fn div_exact_elem(&self, o: &Self) -> Self {
        self.div_exact(o).expect("fraction-free step is exact")
    }
    fn size(&self) -> usize {
        self.span()
    }
}

impl Ring for FieldElem {
    fn zero_like(&self) -> Self {
        FieldElem::zero(self.field())
    }
    fn one_like(&self) -> Self {
        FieldElem::one(self.field())
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_elem(&self, o: &Self) -> Self {
        FieldElem::add(self, o)
    }
    fn sub_elem(&self, o: &Self) -> Self {
        FieldElem::sub(self, o)
    }
    fn mul_elem(&self, o: &Self) -> Self {
        FieldElem::mul(self, o)
    }
    fn div_exact_elem(&self, o: &Self) -> Self {
        self.div(o)
    }
}

/// A dense row-major matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = Matrix<BigInt>;
pub type LaurentMatrixZ = Matrix<LaurentPolyZ>;
pub type LaurentMatrixK = Matrix<LaurentPolyK>;

impl<T: Clone> Matrix<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from rows; all rows must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!("row {i} has {} entries, expected {cols}", r.len())));
            }
            data.extend(r);
        }
        Ok(Matrix { rows: n, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Clone>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Submatrix on the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }
}

impl<T: Ring> Matrix<T> {
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero_elem())
    }

    /// Matrix product; `zero` is used for empty inner dimensions.
    pub fn mul(&self, other: &Self, zero: &T) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = zero.clone();
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero_elem() {
                    continue;
                }
                let b = other.get(k, j);
                if !b.is_zero_elem() {
                    acc = acc.add_elem(&a.mul_elem(b));
                }
            }
            acc
        }))
    }

    /// Block diagonal sum.
    pub fn block_diag(&self, other: &Self, zero: &T) -> Self {
        Self::from_fn(self.rows + other.rows, self.cols + other.cols, |i, j| match (i < self.rows, j < self.cols) {
            (true, true) => self.get(i, j).clone(),
            (false, false) => other.get(i - self.rows, j - self.cols).clone(),
            _ => zero.clone(),
        })
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.data[i * self.cols + j].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

#[derive(Serialize, Deserialize)]
struct RawLaurentMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<LaurentPolyZ>>,
}

impl Serialize for LaurentMatrixZ {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawLaurentMatrix { rows: self.rows, cols: self.cols, entries: self.to_rows() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentMatrixZ {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawLaurentMatrix::deserialize(d)?;
        if raw.entries.len() != raw.rows {
            return Err(serde::de::Error::custom(format!(
                "matrix declares {} rows but lists {}",
                raw.rows,
                raw.entries.len()
            )));
        }
        Matrix::from_rows(raw.cols, raw.entries).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize)]
struct RawIntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<serde_json::Value>>,
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = (0..self.rows).map(|i| self.row(i).iter().map(crate::bigjson::to_value).collect()).collect();
        RawIntMatrix { rows: self.rows, cols: self.cols, entries }.serialize(s)
    }
}

impl LaurentMatrixZ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, LaurentPolyZ::zero())
    }

    /// Matrix with small integer Laurent entries given as `(min_exp, coeffs)`.
    pub fn from_i64_entries(rows: Vec<Vec<(i64, Vec<i64>)>>) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            cols,
            rows.into_iter().map(|r| r.into_iter().map(|(m, c)| LaurentPolyZ::from_i64s(m, &c)).collect()).collect(),
        )
    }

    /// Coefficientwise image in `K[t, t^-1]`.
    pub fn to_field(&self, field: &Arc<FieldSpec>) -> LaurentMatrixK {
        self.map(|p| LaurentPolyK::from_z(field, p))
    }

    /// Specialization `t -> x`.
    pub fn evaluate(&self, x: &FieldElem) -> Matrix<FieldElem> {
        let field = x.field().clone();
        self.map(|p| LaurentPolyK::from_z(&field, p).eval(x))
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, BigInt::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { BigInt::one() } else { BigInt::zero() })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(cols, rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }
}

/// Outcome of fraction-free elimination with full pivoting.
pub struct Elimination<T> {
    pub rank: usize,
    /// Original indices of the rows/columns of a nonsingular `rank x rank` minor.
    pub pivot_rows: Vec<usize>,
    pub pivot_cols: Vec<usize>,
    /// The nonzero minor on those rows and columns, up to sign.
    pub last_pivot: Option<T>,
    /// Sign of the row and column permutations used.
    pub sign_negative: bool,
}

/// Bareiss fraction-free elimination; every intermediate entry is a minor
/// of the input, so exact division is always possible.
pub fn bareiss<T: Ring>(m: &Matrix<T>) -> Elimination<T> {
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<Vec<T>> = m.to_rows();
    let mut row_idx: Vec<usize> = (0..rows).collect();
    let mut col_idx: Vec<usize> = (0..cols).collect();
    let mut negative = false;
    let mut prev: Option<T> = None;
    let mut rank = 0;
    for k in 0..rows.min(cols) {
        let mut best: Option<(usize, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, x) in row.iter().enumerate().skip(k) {
                if !x.is_zero_elem() {
                    let s = x.size();
                    if best.is_none_or(|(_, _, bs)| s < bs) {
                        best = Some((i, j, s));
                    }
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        if pi != k {
            a.swap(pi, k);
            row_idx.swap(pi, k);
            negative = !negative;
        }
        if pj != k {
            for row in a.iter_mut() {
                row.swap(pj, k);
            }
            col_idx.swap(pj, k);
            negative = !negative;
        }
        let pivot = a[k][k].clone();
        for i in k + 1..rows {
            let (top, bottom) = a.split_at_mut(i);
            let (pivot_row, row) = (&top[k], &mut bottom[0]);
            let factor = row[k].clone();
            for (x, above) in row[k + 1..cols].iter_mut().zip(&pivot_row[k + 1..cols]) {
                let mut v = x.mul_elem(&pivot);
                if !factor.is_zero_elem() && !above.is_zero_elem() {
                    v = v.sub_elem(&factor.mul_elem(above));
                }
                if let Some(p) = &prev {
                    if !v.is_zero_elem() {
                        v = v.div_exact_elem(p);
                    }
                }
                *x = v;
            }
            a[i][k] = pivot.zero_like();
        }
        prev = Some(pivot);
        rank += 1;
    }
    Elimination {
        rank,
        pivot_rows: row_idx[..rank].to_vec(),
        pivot_cols: col_idx[..rank].to_vec(),
        last_pivot: prev,
        sign_negative: negative,
    }
}

/// Rank over the fraction field of the entry ring.
pub fn rank<T: Ring>(m: &Matrix<T>) -> usize {
    bareiss(m).rank
}

/// Determinant of a square matrix (`one` is returned for the empty matrix).
pub fn determinant<T: Ring>(m: &Matrix<T>, one: &T) -> T {
    assert_eq!(m.rows, m.cols, "determinant of a non-square matrix");
    if m.rows == 0 {
        return one.clone();
    }
    let e = bareiss(m);
    if e.rank < m.rows {
        return one.zero_like();
    }
    let d = e.last_pivot.unwrap();
    if e.sign_negative {
        d.zero_like().sub_elem(&d)
    } else {
        d
    }
}

/// Rank of a Laurent matrix over `Q(t)` (characteristic 0) or `F_p(t)`.
pub fn rank_over_fraction_field(m: &LaurentMatrixZ, characteristic: u64) -> Result<usize> {
    if characteristic == 0 {
        return Ok(rank(m));
    }
    let field = FieldSpec::prime_field(characteristic)?;
    Ok(rank(&m.to_field(&field)))
}

/// Elementary divisors of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnfResult {
    #[serde(with = "crate::bigjson::vec")]
    pub divisors: Vec<BigInt>,
    pub rank: usize,
}

/// Order and prime factorization of the torsion subgroup of a cokernel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionSummary {
    pub order: BigInt,
    pub factorization: BTreeMap<BigUint, u32>,
}

impl Serialize for TorsionSummary {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let factors: BTreeMap<String, u32> = self.factorization.iter().map(|(p, e)| (p.to_string(), *e)).collect();
        let mut st = s.serialize_struct("TorsionSummary", 2)?;
        st.serialize_field("order", &crate::bigjson::to_value(&self.order))?;
        st.serialize_field("factorization", &factors)?;
        st.end()
    }
}

/// Smith normal form over `Z`: the diagonal `d_1 | d_2 | ... | d_r` with
/// `d_i >= 1`, where `r` is the rank.
pub fn snf_int(m: &IntMatrix) -> SnfResult {
    let mut a = m.to_rows();
    let (rows, cols) = (m.rows, m.cols);
    let mut diag: Vec<BigInt> = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry of the remaining block
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, x) in row.iter().enumerate().skip(t) {
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.magnitude() < a[bi][bj].magnitude()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        move_pivot(&mut a, t, pi, pj);
        loop {
            let pivot = a[t][t].clone();
            let mut clean = true;
            let support: Vec<usize> = (t + 1..cols).filter(|&j| !a[t][j].is_zero()).collect();
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = round_div(&a[i][t], &pivot);
                let (head, tail) = a.split_at_mut(i);
                let src = &head[t];
                let dst = &mut tail[0];
                dst[t] -= &q * &src[t];
                for &j in &support {
                    dst[j] -= &q * &src[j];
                }
                if !dst[t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = round_div(&a[t][j], &pivot);
                for row in a.iter_mut().skip(t) {
                    if !row[t].is_zero() {
                        let delta = &q * &row[t];
                        row[j] -= delta;
                    }
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
            // a smaller remainder appeared in row or column t: make it the pivot
            let mut best = (t, t);
            for i in t + 1..rows {
                if !a[i][t].is_zero() && a[i][t].magnitude() < a[best.0][best.1].magnitude() {
                    best = (i, t);
                }
            }
            for j in t + 1..cols {
                if !a[t][j].is_zero() && a[t][j].magnitude() < a[best.0][best.1].magnitude() {
                    best = (t, j);
                }
            }
            move_pivot(&mut a, t, best.0, best.1);
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    let r = diag.len();
    for i in 0..r {
        for j in i + 1..r {
            let g = diag[i].gcd(&diag[j]);
            if g != diag[i] {
                let l = diag[i].lcm(&diag[j]);
                diag[i] = g;
                diag[j] = l;
            }
        }
    }
    SnfResult { divisors: diag, rank: r }
}

fn move_pivot(a: &mut [Vec<BigInt>], t: usize, i: usize, j: usize) {
    if i != t {
        a.swap(i, t);
    }
    if j != t {
        for row in a.iter_mut() {
            row.swap(j, t);
        }
    }
}

/// Quotient rounded to the nearest integer, so remainders are at most half
/// the divisor in absolute value.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    let twice: BigInt = &r * 2;
    if twice.magnitude() > b.magnitude() {
        q + 1
    } else {
        q
    }
}

pub fn torsion_from_snf(s: &SnfResult) -> TorsionSummary {
    let order: BigInt = s.divisors.iter().filter(|d| !d.is_one()).product();
    let factorization = arith::factor_big(order.magnitude());
    TorsionSummary { order, factorization }
}

/// Rank of an integer matrix over `F_p`.
pub fn rank_mod_p(m: &IntMatrix, p: u64) -> usize {
    let pb = BigInt::from(p);
    let mut a: Vec<Vec<u64>> = (0..m.rows)
        .map(|i| {
            m.row(i)
                .iter()
                .map(|x| {
                    let r = x.mod_floor(&pb);
                    r.iter_u64_digits().next().unwrap_or(0)
                })
                .collect()
        })
        .collect();
    let mut r = 0;
    for c in 0..m.cols {
        let Some(piv) = (r..m.rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(piv, r);
        let inv = inv_mod(a[r][c], p);
        for x in a[r].iter_mut() {
            *x = mulmod(*x, inv, p);
        }
        for i in 0..m.rows {
            if i != r && a[i][c] != 0 {
                let f = a[i][c];
                let (head, tail) = if i < r {
                    let (h, t) = a.split_at_mut(r);
                    (&mut h[i], &t[0])
                } else {
                    let (h, t) = a.split_at_mut(i);
                    (&mut t[0], &h[r])
                };
                for j in c..m.cols {
                    if tail[j] != 0 {
                        head[j] = (head[j] + p - mulmod(f, tail[j], p)) % p;
                    }
                }
            }
        }
        r += 1;
        if r == m.rows {
            break;
        }
    }
    r
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        e >>= 1;
    }
    acc
}

/// Rank and normalized gcd of maximal minors of a Laurent matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinorGcd {
    pub rank: usize,
    pub delta: CanonicalAlexanderRep,
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Visits every `r x r` minor (row subset, column subset), starting with
/// the given nonsingular one, until `visit` returns `false`.
fn for_each_minor<T: Ring>(
    m: &Matrix<T>,
    r: usize,
    first: (&[usize], &[usize]),
    one: &T,
    mut visit: impl FnMut(T) -> bool,
) {
    let mut fr = first.0.to_vec();
    let mut fc = first.1.to_vec();
    fr.sort_unstable();
    fc.sort_unstable();
    if !visit(determinant(&m.select(&fr, &fc), one)) {
        return;
    }
    let mut rows: Vec<usize> = (0..r).collect();
    loop {
        let mut cols: Vec<usize> = (0..r).collect();
        loop {
            if !(rows == fr && cols == fc) {
                let d = determinant(&m.select(&rows, &cols), one);
                if !d.is_zero_elem() && !visit(d) {
                    return;
                }
            }
            if !next_combination(&mut cols, m.cols) {
                break;
            }
        }
        if !next_combination(&mut rows, m.rows) {
            break;
        }
    }
}

/// gcd of all `rank x rank` minors over `Z[t, t^-1]` in canonical form; the
/// zero matrix (rank 0) has gcd 1 by convention.
pub fn minor_gcd_laurent(m: &LaurentMatrixZ) -> MinorGcd {
    let e = bareiss(m);
    let r = e.rank;
    if r == 0 {
        return MinorGcd { rank: 0, delta: CanonicalAlexanderRep::one() };
    }
    // every r x r minor is divisible by content^r, so reaching it ends the search
    let content = arith::gcd_all(m.entries().flat_map(|p| p.coeffs().iter()));
    let floor = LaurentPolyZ::constant(num_traits::pow(content, r));
    let mut g = LaurentPolyZ::zero();
    for_each_minor(m, r, (&e.pivot_rows, &e.pivot_cols), &LaurentPolyZ::one(), |d| {
        g = g.gcd(&d).expect("nonzero minor");
        g != floor
    });
    MinorGcd { rank: r, delta: canonical_rep(&g).expect("nonzero gcd") }
}

/// Rank and monic gcd of maximal minors over `K[t, t^-1]`.
pub fn minor_gcd_over_field(m: &LaurentMatrixK, field: &Arc<FieldSpec>) -> (usize, LaurentPolyK) {
    let one = LaurentPolyK::constant(FieldElem::one(field));
    let e = bareiss(m);
    let r = e.rank;
    if r == 0 {
        return (0, one);
    }
    let mut g = LaurentPolyK::zero(field);
    for_each_minor(m, r, (&e.pivot_rows, &e.pivot_cols), &one, |d| {
        g = gcd_over_field(&g, &d).expect("nonzero minor");
        g.span() > 0
    });
    (r, g)
}

/// Replaces each entry `h(t)` by the `N x N` integer block `h(J_N)`, where
/// `J_N` is the cyclic shift with `J_N[i][(i + 1) mod N] = 1`.
pub fn cyclic_substitute(m: &LaurentMatrixZ, n: usize) -> IntMatrix {
    assert!(n >= 1, "cover order must be positive");
    let mut out = IntMatrix::zeros(m.rows * n, m.cols * n);
    for bi in 0..m.rows {
        for bj in 0..m.cols {
            let h = m.get(bi, bj);
            for (k, c) in h.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let e = (h.min_exp() + k as i64).rem_euclid(n as i64) as usize;
                for i in 0..n {
                    let idx = (bi * n + i) * out.cols + bj * n + (i + e) % n;
                    out.data[idx] += c;
                }
            }
        }
    }
    out
}

/// An elementary row or column operation over `Z[t, t^-1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ElementaryOp {
    SwapRows {
        i: usize,
        j: usize,
    },
    SwapCols {
        i: usize,
        j: usize,
    },
    /// Multiply a row by a unit `+-t^j`.
    ScaleRow {
        i: usize,
        by: LaurentPolyZ,
    },
    ScaleCol {
        i: usize,
        by: LaurentPolyZ,
    },
    /// `row[target] += by * row[source]`.
    AddRowMultiple {
        target: usize,
        source: usize,
        by: LaurentPolyZ,
    },
    /// `col[target] += by * col[source]`.
    AddColMultiple {
        target: usize,
        source: usize,
        by: LaurentPolyZ,
    },
}

/// Applies a sequence of elementary operations, rejecting non-unit scalings.
pub fn elementary_ops_normalize(m: &LaurentMatrixZ, ops: &[ElementaryOp]) -> Result<LaurentMatrixZ> {
    let mut a = m.clone();
    let check_row = |i: usize, a: &LaurentMatrixZ| {
        if i >= a.rows {
            Err(Error::IllegalOp(format!("row {i} out of range")))
        } else {
            Ok(())
        }
    };
    let check_col = |i: usize, a: &LaurentMatrixZ| {
        if i >= a.cols {
            Err(Error::IllegalOp(format!("column {i} out of range")))
        } else {
            Ok(())
        }
    };
    for op in ops {
        match op {
            ElementaryOp::SwapRows { i, j } => {
                check_row(*i, &a)?;
                check_row(*j, &a)?;
                for c in 0..a.cols {
                    a.data.swap(i * a.cols + c, j * a.cols + c);
                }
            }
            ElementaryOp::SwapCols { i, j } => {
                check_col(*i, &a)?;
                check_col(*j, &a)?;
                for r in 0..a.rows {
                    a.data.swap(r * a.cols + i, r * a.cols + j);
                }
            }
            ElementaryOp::ScaleRow { i, by } | ElementaryOp::ScaleCol { i, by } => {
                if !by.is_unit() {
                    return Err(Error::IllegalOp(format!("{by} is not a unit of Z[t, t^-1]")));
                }
                let is_row = matches!(op, ElementaryOp::ScaleRow { .. });
                if is_row {
                    check_row(*i, &a)?;
                    for c in 0..a.cols {
                        let v = a.get(*i, c) * by;
                        a.set(*i, c, v);
                    }
                } else {
                    check_col(*i, &a)?;
                    for r in 0..a.rows {
                        let v = a.get(r, *i) * by;
                        a.set(r, *i, v);
                    }
                }
            }
            ElementaryOp::AddRowMultiple { target, source, by } => {
                check_row(*target, &a)?;
                check_row(*source, &a)?;
                if target == source {
                    return Err(Error::IllegalOp("row added to itself".into()));
                }
                for c in 0..a.cols {
                    let v = a.get(*target, c) + &(by * a.get(*source, c));
                    a.set(*target, c, v);
                }
            }
            ElementaryOp::AddColMultiple { target, source, by } => {
                check_col(*target, &a)?;
                check_col(*source, &a)?;
                if target == source {
                    return Err(Error::IllegalOp("column added to itself".into()));
                }
                for r in 0..a.rows {
                    let v = a.get(r, *target) + &(by * a.get(r, *source));
                    a.set(r, *target, v);
                }
            }
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(min: i64, c: &[i64]) -> LaurentPolyZ {
        LaurentPolyZ::from_i64s(min, c)
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn snf_examples() {
        let m = IntMatrix::from_i64(&[vec![2, 4], vec![6, 8]]).unwrap();
        assert_eq!(snf_int(&m), SnfResult { divisors: ints(&[2, 4]), rank: 2 });
        assert_eq!(snf_int(&IntMatrix::identity(3)).divisors, ints(&[1, 1, 1]));
        let zero = snf_int(&IntMatrix::zeros(3, 2));
        assert_eq!((zero.divisors.len(), zero.rank), (0, 0));
        let m = IntMatrix::from_i64(&[vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 0]]).unwrap();
        assert_eq!(snf_int(&m).divisors, ints(&[1, 6]));
    }

    #[test]
    fn torsion_examples() {
        let t = torsion_from_snf(&SnfResult { divisors: ints(&[1, 1, 2, 4]), rank: 4 });
        assert_eq!(t.order, BigInt::from(8));
        assert_eq!(t.factorization, BTreeMap::from([(BigUint::from(2u32), 3)]));
        let t = torsion_from_snf(&SnfResult { divisors: ints(&[1, 1, 1]), rank: 3 });
        assert_eq!(t.order, BigInt::one());
        assert!(t.factorization.is_empty());
        let t = torsion_from_snf(&SnfResult { divisors: ints(&[2, 6]), rank: 2 });
        assert_eq!(t.order, BigInt::from(12));
        assert_eq!(t.factorization, BTreeMap::from([(BigUint::from(2u32), 2), (BigUint::from(3u32), 1)]));
    }

    #[test]
    fn rank_examples() {
        let m =
            LaurentMatrixZ::from_rows(2, vec![vec![z(0, &[-1, 1]), z(0, &[])], vec![z(0, &[]), z(0, &[])]]).unwrap();
        assert_eq!(rank_over_fraction_field(&m, 0).unwrap(), 1);
        let col = LaurentMatrixZ::from_rows(1, vec![vec![z(0, &[])], vec![z(0, &[2])]]).unwrap();
        assert_eq!(rank_over_fraction_field(&col, 0).unwrap(), 1);
        assert_eq!(rank_over_fraction_field(&col, 2).unwrap(), 0);
    }

    #[test]
    fn minor_gcd_examples() {
        let m = LaurentMatrixZ::from_rows(
            2,
            vec![vec![z(0, &[-1, 1]), LaurentPolyZ::zero()], vec![LaurentPolyZ::zero(), z(0, &[-1, 0, 1])]],
        )
        .unwrap();
        let g = minor_gcd_laurent(&m);
        assert_eq!(g.rank, 2);
        assert_eq!(g.delta.poly(), &(&z(0, &[-1, 1]) * &z(0, &[-1, 0, 1])));
        let col = LaurentMatrixZ::from_rows(1, vec![vec![LaurentPolyZ::zero()], vec![z(0, &[2])]]).unwrap();
        assert_eq!(minor_gcd_laurent(&col), MinorGcd { rank: 1, delta: canonical_rep(&z(0, &[2])).unwrap() });
        let zero = minor_gcd_laurent(&LaurentMatrixZ::zeros(2, 3));
        assert_eq!(zero, MinorGcd { rank: 0, delta: CanonicalAlexanderRep::one() });
    }

    #[test]
    fn cyclic_substitution_examples() {
        let m = LaurentMatrixZ::from_rows(1, vec![vec![z(0, &[-1, 1])]]).unwrap();
        let s = cyclic_substitute(&m, 3);
        assert_eq!(s, IntMatrix::from_i64(&[vec![-1, 1, 0], vec![0, -1, 1], vec![1, 0, -1]]).unwrap());
        assert_eq!(snf_int(&s).rank, 2);
        let one = LaurentMatrixZ::from_rows(1, vec![vec![LaurentPolyZ::one()]]).unwrap();
        assert_eq!(cyclic_substitute(&one, 4), IntMatrix::identity(4));
        let tn = LaurentMatrixZ::from_rows(1, vec![vec![LaurentPolyZ::t_pow_minus_one(5)]]).unwrap();
        assert!(cyclic_substitute(&tn, 5).is_zero());
        let inv = LaurentMatrixZ::from_rows(1, vec![vec![LaurentPolyZ::t_pow(-1)]]).unwrap();
        let j = cyclic_substitute(&LaurentMatrixZ::from_rows(1, vec![vec![LaurentPolyZ::t_pow(1)]]).unwrap(), 4);
        let prod = cyclic_substitute(&inv, 4).mul(&j, &BigInt::zero()).unwrap();
        assert_eq!(prod, IntMatrix::identity(4));
    }

    #[test]
    fn elementary_operations() {
        let m = LaurentMatrixZ::from_rows(
            2,
            vec![vec![z(0, &[-1, 1]), LaurentPolyZ::zero()], vec![LaurentPolyZ::zero(), z(0, &[2])]],
        )
        .unwrap();
        let before = minor_gcd_laurent(&m);
        let swapped = elementary_ops_normalize(&m, &[ElementaryOp::SwapRows { i: 0, j: 1 }]).unwrap();
        assert_eq!(minor_gcd_laurent(&swapped), before);
        let added = elementary_ops_normalize(
            &m,
            &[ElementaryOp::AddRowMultiple { target: 1, source: 0, by: LaurentPolyZ::t_pow(1) }],
        )
        .unwrap();
        assert_eq!(minor_gcd_laurent(&added), before);
        let scaled = elementary_ops_normalize(&m, &[ElementaryOp::ScaleRow { i: 0, by: z(0, &[2]) }]);
        assert!(matches!(scaled, Err(Error::IllegalOp(_))));
        let unit = elementary_ops_normalize(&m, &[ElementaryOp::ScaleCol { i: 1, by: z(-3, &[-1]) }]).unwrap();
        assert_eq!(minor_gcd_laurent(&unit), before);
    }

    #[test]
    fn rank_mod_p_matches_expectations() {
        let m = IntMatrix::from_i64(&[vec![2, 4], vec![6, 8]]).unwrap();
        assert_eq!(rank_mod_p(&m, 2), 0);
        assert_eq!(rank_mod_p(&m, 3), 2);
        let m = IntMatrix::from_i64(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]).unwrap();
        assert_eq!(rank_mod_p(&m, 5), 2);
    }

    #[test]
    fn determinant_with_pivoting_sign() {
        let m = IntMatrix::from_i64(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(determinant(&m, &BigInt::one()), BigInt::from(-1));
        let m = IntMatrix::from_i64(&[vec![2, 3, 1], vec![4, 1, 5], vec![7, 2, 2]]).unwrap();
        assert_eq!(determinant(&m, &BigInt::one()), BigInt::from(2 * (2 - 10) - 3 * (8 - 35) + (8 - 7)));
    }

    #[test]
    fn json_roundtrip() {
        let m = LaurentMatrixZ::from_rows(2, vec![vec![z(0, &[-1, 1]), z(-2, &[3])]]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.starts_with("{\"rows\":1,\"cols\":2,\"entries\":"));
        let back: LaurentMatrixZ = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let bad = r#"{"rows":2,"cols":1,"entries":[[{"min_exp":0,"coeffs":[1]}]]}"#;
        assert!(serde_json::from_str::<LaurentMatrixZ>(bad).is_err());
    }
}

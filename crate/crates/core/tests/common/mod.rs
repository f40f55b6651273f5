#![allow(dead_code)]

use alexcover::covers::EquivariantComplex;
use alexcover::exactlin::{ElementaryOp, IntMatrix, LaurentMatrixZ, Matrix};
use alexcover::fox::{equivariant_complex_from_presentation, orbifold_presentation, OrbifoldData};
use alexcover::LaurentPolyZ;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;

/// Determinant by cofactor expansion along the first row.
pub fn cofactor_det(m: &[Vec<BigInt>]) -> BigInt {
    match m.len() {
        0 => BigInt::one(),
        1 => m[0][0].clone(),
        n => (0..n)
            .filter(|&j| !m[0][j].is_zero())
            .map(|j| {
                let minor: Vec<Vec<BigInt>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let term = &m[0][j] * cofactor_det(&minor);
                if j % 2 == 0 {
                    term
                } else {
                    -term
                }
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// gcd of all `k x k` minors of an integer matrix (0 if all vanish).
pub fn determinantal_divisor(m: &IntMatrix, k: usize) -> BigInt {
    let mut g = BigInt::zero();
    for rows in subsets(m.rows(), k) {
        for cols in subsets(m.cols(), k) {
            let sub: Vec<Vec<BigInt>> =
                rows.iter().map(|&r| cols.iter().map(|&c| m.get(r, c).clone()).collect()).collect();
            g = g.gcd(&cofactor_det(&sub));
        }
    }
    g
}

pub fn orbifold_complex(g: usize, r: usize, mu: &[u64]) -> EquivariantComplex {
    let d = OrbifoldData::new(g, r, mu.to_vec()).unwrap();
    equivariant_complex_from_presentation(&orbifold_presentation(&d).unwrap(), &d.default_epimorphism()).unwrap()
}

pub fn random_int_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    Matrix::from_fn(rows, cols, |_, _| BigInt::from(rng.gen_range(-bound..=bound)))
}

pub fn random_laurent<R: Rng>(rng: &mut R, max_span: usize, bound: i64) -> LaurentPolyZ {
    let len = rng.gen_range(1..=max_span + 1);
    let coeffs: Vec<i64> = (0..len).map(|_| rng.gen_range(-bound..=bound)).collect();
    LaurentPolyZ::from_i64s(rng.gen_range(-2..=2), &coeffs)
}

pub fn random_laurent_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> LaurentMatrixZ {
    Matrix::from_fn(
        rows,
        cols,
        |_, _| if rng.gen_bool(0.25) { LaurentPolyZ::zero() } else { random_laurent(rng, 2, 3) },
    )
}

/// A random sequence of invertible row and column operations.
pub fn random_ops<R: Rng>(rng: &mut R, rows: usize, cols: usize, len: usize) -> Vec<ElementaryOp> {
    (0..len)
        .map(|_| {
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            let unit = LaurentPolyZ::monomial(BigInt::from(sign), rng.gen_range(-2..=2));
            let on_rows = rng.gen_bool(0.5) && rows > 1 || cols < 2;
            let n = if on_rows { rows } else { cols };
            let i = rng.gen_range(0..n);
            let j = (i + rng.gen_range(1..n.max(2))) % n;
            match (rng.gen_range(0..3), on_rows) {
                (0, true) => ElementaryOp::SwapRows { i, j },
                (0, false) => ElementaryOp::SwapCols { i, j },
                (1, true) => ElementaryOp::ScaleRow { i, by: unit },
                (1, false) => ElementaryOp::ScaleCol { i, by: unit },
                (_, true) => ElementaryOp::AddRowMultiple { target: i, source: j, by: random_laurent(rng, 2, 3) },
                (_, false) => ElementaryOp::AddColMultiple { target: i, source: j, by: random_laurent(rng, 2, 3) },
            }
        })
        .filter(|op| match op {
            ElementaryOp::AddRowMultiple { target, source, .. }
            | ElementaryOp::AddColMultiple { target, source, .. } => target != source,
            _ => true,
        })
        .collect()
}

/// Checks `d_i | d_{i+1}` and `d_1 ... d_k = gcd of k x k minors`.
pub fn check_snf_against_minors(m: &IntMatrix) -> Result<(), String> {
    let snf = alexcover::exactlin::snf_int(m);
    for w in snf.divisors.windows(2) {
        if !w[1].is_multiple_of(&w[0]) {
            return Err(format!("{} does not divide {}", w[0], w[1]));
        }
    }
    let mut prod = BigInt::one();
    for k in 1..=m.rows().min(m.cols()) {
        let expected = determinantal_divisor(m, k);
        let got = if k <= snf.divisors.len() {
            prod *= &snf.divisors[k - 1];
            prod.clone()
        } else {
            BigInt::zero()
        };
        if got != expected {
            return Err(format!("k = {k}: product of divisors {got}, gcd of minors {expected}"));
        }
    }
    Ok(())
}

/// Degree of `gcd(t^N - 1, h)` over `Q`, computed with rational polynomial
/// arithmetic independent of the matrix code.
pub fn gcd_degree_with_unity(h: &LaurentPolyZ, n: usize) -> usize {
    use alexcover::laurent::gcd_over_field;
    use alexcover::{FieldSpec, LaurentPolyK};
    let q = FieldSpec::rationals();
    let tn = LaurentPolyK::from_z(&q, &LaurentPolyZ::t_pow_minus_one(n as i64));
    gcd_over_field(&tn, &LaurentPolyK::from_z(&q, h)).unwrap().span()
}

/// Degree of the product of cyclotomic factors of `h`, with multiplicity.
pub fn cyclotomic_degree(h: &LaurentPolyZ) -> usize {
    let mut rest = h.polynomial_part();
    let mut degree = 0;
    for k in 1..=(4 * rest.span() * rest.span() + 2) as u64 {
        let phi = alexcover::laurent::cyclotomic_poly(k);
        if phi.span() > rest.span() {
            continue;
        }
        while let Some(q) = rest.div_exact(&phi) {
            degree += phi.span();
            rest = q;
        }
    }
    degree
}

/// Pencil equivariant complex fixtures `(d, n)` with modest degrees.
pub fn pencil_fixtures() -> Vec<Vec<i64>> {
    vec![
        vec![1, 1, 1],
        vec![1, 2, 3],
        vec![1, 1, -2],
        vec![2, 3, -5],
        vec![1, 1, 1, 1],
        vec![1, -1, 2, 1],
        vec![1, 2, -1, -2],
        vec![1, 1, 1, 1, 1],
        vec![2, -1, 1, -1, -1],
        vec![1, 2, 3, 4, 5],
    ]
}

pub fn orbifold_fixtures() -> Vec<(usize, usize, Vec<u64>)> {
    vec![
        (0, 2, vec![2]),
        (0, 2, vec![3]),
        (0, 2, vec![2, 3]),
        (0, 3, vec![2, 2]),
        (1, 1, vec![]),
        (1, 1, vec![2]),
        (1, 0, vec![2, 3]),
        (1, 0, vec![2, 2]),
        (2, 0, vec![3]),
        (0, 3, vec![4]),
    ]
}

//! Invariants of infinite cyclic covers computed from an equivariant chain
//! complex over `Z[t, t^-1]`, and the finite cyclic covers used to check
//! them.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::exactlin::{self, IntMatrix, LaurentMatrixZ, Matrix, SnfResult, TorsionSummary};
use crate::fields::{FieldElem, FieldSpec};
use crate::fox::OrbifoldData;
use crate::laurent::{mahler_measure, CanonicalAlexanderRep, LaurentPolyZ, MahlerMeasure, DEFAULT_TOLERANCE};

/// A finite free chain complex over `Z[t, t^-1]`. `boundaries[i]` is the
/// `ranks[i] x ranks[i + 1]` matrix of the map from degree `i + 1` to
/// degree `i` (acting on column vectors).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivariantComplex {
    ranks: Vec<usize>,
    boundaries: Vec<LaurentMatrixZ>,
}

#[derive(Deserialize)]
struct RawComplex {
    ranks: Vec<usize>,
    boundaries: Vec<LaurentMatrixZ>,
}

impl<'de> Deserialize<'de> for EquivariantComplex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawComplex::deserialize(d)?;
        EquivariantComplex::new(raw.ranks, raw.boundaries).map_err(serde::de::Error::custom)
    }
}

impl EquivariantComplex {
    pub fn new(ranks: Vec<usize>, boundaries: Vec<LaurentMatrixZ>) -> Result<Self> {
        if ranks.is_empty() || boundaries.len() + 1 != ranks.len() {
            return Err(Error::InvalidComplex(format!(
                "{} ranks need {} boundary maps, got {}",
                ranks.len(),
                ranks.len().saturating_sub(1),
                boundaries.len()
            )));
        }
        for (i, b) in boundaries.iter().enumerate() {
            if b.rows() != ranks[i] || b.cols() != ranks[i + 1] {
                return Err(Error::InvalidComplex(format!(
                    "boundary {i} is {}x{}, expected {}x{}",
                    b.rows(),
                    b.cols(),
                    ranks[i],
                    ranks[i + 1]
                )));
            }
        }
        for i in 1..boundaries.len() {
            let prod = boundaries[i - 1].mul(&boundaries[i], &LaurentPolyZ::zero())?;
            if !prod.is_zero() {
                return Err(Error::InvalidComplex(format!("boundary {} composed with boundary {i} is nonzero", i - 1)));
            }
        }
        Ok(EquivariantComplex { ranks, boundaries })
    }

    /// The complex `0 -> R --(h)--> R -> 0` concentrated in degrees 1, 2,
    /// whose degree-1 Alexander polynomial is `h`.
    pub fn synthetic(h: LaurentPolyZ) -> Self {
        let b1 = Matrix::from_fn(1, 1, |_, _| h.clone());
        EquivariantComplex { ranks: vec![0, 1, 1], boundaries: vec![LaurentMatrixZ::zeros(0, 1), b1] }
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn boundaries(&self) -> &[LaurentMatrixZ] {
        &self.boundaries
    }

    pub fn top_degree(&self) -> usize {
        self.ranks.len() - 1
    }

    fn check_degree(&self, i: usize) -> Result<()> {
        if i > self.top_degree() {
            return Err(Error::DegreeOutOfRange { degree: i, top: self.top_degree() });
        }
        Ok(())
    }

    /// The map into degree `i`, if any.
    fn incoming(&self, i: usize) -> Option<&LaurentMatrixZ> {
        self.boundaries.get(i)
    }

    /// The map out of degree `i`, if any.
    fn outgoing(&self, i: usize) -> Option<&LaurentMatrixZ> {
        i.checked_sub(1).map(|k| &self.boundaries[k])
    }
}

/// `Delta_i`: the gcd of the maximal minors of the map into degree `i`.
pub fn alexander_poly(cx: &EquivariantComplex, i: usize) -> Result<CanonicalAlexanderRep> {
    cx.check_degree(i)?;
    Ok(match cx.incoming(i) {
        Some(b) => exactlin::minor_gcd_laurent(b).delta,
        None => CanonicalAlexanderRep::one(),
    })
}

/// Rank of `H_i` over the fraction field of `K[t]`, where only the
/// characteristic of `K` matters.
pub fn alpha(cx: &EquivariantComplex, i: usize, characteristic: u64) -> Result<usize> {
    cx.check_degree(i)?;
    let rank = |m: Option<&LaurentMatrixZ>| m.map_or(Ok(0), |b| exactlin::rank_over_fraction_field(b, characteristic));
    Ok(cx.ranks[i] - rank(cx.incoming(i))? - rank(cx.outgoing(i))?)
}

/// Homology of one degree of a finite cyclic cover.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeHomology {
    pub degree: usize,
    /// Betti number keyed by characteristic.
    pub betti: BTreeMap<u64, usize>,
    /// Elementary divisors greater than one of the torsion subgroup.
    #[serde(skip_serializing_if = "Option::is_none", with = "opt_divisors")]
    pub divisors: Option<Vec<BigInt>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torsion: Option<TorsionSummary>,
}

mod opt_divisors {
    use num_bigint::BigInt;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &Option<Vec<BigInt>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(d) => crate::bigjson::vec::serialize(d, s),
            None => s.serialize_none(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverHomologyReport {
    pub n: usize,
    pub degrees: Vec<DegreeHomology>,
}

impl CoverHomologyReport {
    pub fn degree(&self, i: usize) -> &DegreeHomology {
        &self.degrees[i]
    }
}

/// Ranks over each characteristic and the Smith form of one substituted
/// boundary map.
struct SubstitutedMap {
    rank: BTreeMap<u64, usize>,
    snf: Option<SnfResult>,
}

fn substituted(b: &LaurentMatrixZ, n: usize, chars: &[u64], integral: bool) -> SubstitutedMap {
    let m = exactlin::cyclic_substitute(b, n);
    let snf = (integral || chars.contains(&0)).then(|| exactlin::snf_int(&m));
    let rank = chars
        .iter()
        .map(|&p| (p, if p == 0 { snf.as_ref().unwrap().rank } else { exactlin::rank_mod_p(&m, p) }))
        .collect();
    SubstitutedMap { rank, snf: snf.filter(|_| integral) }
}

fn degree_homology(
    cx: &EquivariantComplex,
    i: usize,
    n: usize,
    maps: &[SubstitutedMap],
    chars: &[u64],
    integral: bool,
) -> DegreeHomology {
    let rank_into = |p: u64| maps.get(i).map_or(0, |m| m.rank[&p]);
    let rank_out = |p: u64| i.checked_sub(1).map_or(0, |k| maps[k].rank[&p]);
    let betti = chars.iter().map(|&p| (p, cx.ranks[i] * n - rank_into(p) - rank_out(p))).collect();
    let divisors: Option<Vec<BigInt>> = integral.then(|| match maps.get(i).and_then(|m| m.snf.as_ref()) {
        Some(s) => s.divisors.iter().filter(|d| !d.is_one()).cloned().collect(),
        None => Vec::new(),
    });
    let torsion =
        divisors.as_ref().map(|d| exactlin::torsion_from_snf(&SnfResult { divisors: d.clone(), rank: d.len() }));
    DegreeHomology { degree: i, betti, divisors, torsion }
}

/// Homology of the `N`-fold cyclic cover `C ⊗ Z[t]/(t^N - 1)` in every
/// degree: Betti numbers in each requested characteristic and, with
/// `with_integral`, the torsion subgroups over `Z`.
pub fn cover_homology(
    cx: &EquivariantComplex,
    n: usize,
    characteristics: &[u64],
    with_integral: bool,
) -> Result<CoverHomologyReport> {
    if n == 0 {
        return Err(Error::InvalidInput("cover order must be positive".into()));
    }
    check_characteristics(characteristics)?;
    let maps: Vec<SubstitutedMap> =
        cx.boundaries.iter().map(|b| substituted(b, n, characteristics, with_integral)).collect();
    let degrees =
        (0..=cx.top_degree()).map(|i| degree_homology(cx, i, n, &maps, characteristics, with_integral)).collect();
    Ok(CoverHomologyReport { n, degrees })
}

fn check_characteristics(chars: &[u64]) -> Result<()> {
    match chars.iter().find(|&&p| p != 0 && !arith::is_prime(p)) {
        Some(p) => Err(Error::InvalidField(format!("{p} is not prime"))),
        None => Ok(()),
    }
}

/// One cover in a limit scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub n: usize,
    pub betti: usize,
    pub betti_ratio: f64,
    #[serde(with = "crate::bigjson")]
    pub torsion_order: BigInt,
    /// `log |tor H_i| / N`.
    pub torsion_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitReport {
    pub degree: usize,
    pub characteristic: u64,
    pub rows: Vec<ScanRow>,
    pub alpha_exact: usize,
    pub alexander: CanonicalAlexanderRep,
    pub mahler_exact: MahlerMeasure,
    /// `|betti(N) - alpha N| <= c` for every `N`.
    pub betti_defect_bound: usize,
    /// The integer `betti(N)/N` has settled on over the last quartile, if any.
    pub stabilized_alpha: Option<usize>,
}

/// Homology in degree `i` of the covers `N = 1..=n_max`, with the limits
/// they approach computed independently from the complex itself.
pub fn limit_scan(cx: &EquivariantComplex, i: usize, n_max: usize, characteristic: u64) -> Result<LimitReport> {
    cx.check_degree(i)?;
    check_characteristics(&[characteristic])?;
    if n_max < 4 {
        return Err(Error::InvalidInput("a limit scan needs at least 4 covers".into()));
    }
    let chars = [characteristic];
    let mut rows: Vec<ScanRow> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let into = cx.incoming(i).map(|b| substituted(b, n, &chars, true));
            let out = cx.outgoing(i).map(|b| substituted(b, n, &chars, false));
            let r = |m: &Option<SubstitutedMap>| m.as_ref().map_or(0, |m| m.rank[&characteristic]);
            let betti = cx.ranks[i] * n - r(&into) - r(&out);
            let torsion_order: BigInt =
                into.as_ref().and_then(|m| m.snf.as_ref()).map_or_else(BigInt::one, |s| s.divisors.iter().product());
            ScanRow {
                n,
                betti,
                betti_ratio: betti as f64 / n as f64,
                torsion_ratio: arith::log_abs(&torsion_order) / n as f64,
                torsion_order,
            }
        })
        .collect();
    rows.sort_by_key(|r| r.n);

    let alpha_exact = alpha(cx, i, characteristic)?;
    let alexander = alexander_poly(cx, i)?;
    let mahler_exact = mahler_measure(alexander.poly(), DEFAULT_TOLERANCE)?;
    let betti_defect_bound = defect_bound(cx, i, characteristic)?;
    let quartile = &rows[rows.len() - rows.len() / 4..];
    let candidate = quartile.last().map(|r| r.betti_ratio.round() as usize).unwrap_or(0);
    let settled = quartile.iter().all(|r| {
        r.betti_ratio.round() as usize == candidate && r.betti.abs_diff(candidate * r.n) <= betti_defect_bound
    });
    Ok(LimitReport {
        degree: i,
        characteristic,
        rows,
        alpha_exact,
        alexander,
        mahler_exact,
        betti_defect_bound,
        stabilized_alpha: settled.then_some(candidate),
    })
}

/// Degrees of the torsion parts of `H_i` and `H_{i-1}` over `K[t]`, which
/// bound how far `betti(N)` can stray from `alpha N`.
fn defect_bound(cx: &EquivariantComplex, i: usize, characteristic: u64) -> Result<usize> {
    let field = if characteristic == 0 { FieldSpec::rationals() } else { FieldSpec::prime_field(characteristic)? };
    let degree = |m: Option<&LaurentMatrixZ>| {
        m.map_or(0, |b| exactlin::minor_gcd_over_field(&b.to_field(&field), &field).1.span())
    };
    Ok(degree(cx.incoming(i)) + degree(cx.outgoing(i)))
}

/// Local-system homology at randomly chosen points `t = x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenericDimension {
    /// The minimum over all samples.
    pub value: usize,
    /// Whether at least `trials - 1` samples gave `value`.
    pub stable: bool,
    pub samples: Vec<usize>,
    pub seed: u64,
}

/// `dim H_i(C ⊗ K_x)` for `trials` distinct random nonzero `x` in `field`.
pub fn generic_local_system_dim(
    cx: &EquivariantComplex,
    i: usize,
    field: &Arc<FieldSpec>,
    trials: usize,
    seed: u64,
) -> Result<GenericDimension> {
    cx.check_degree(i)?;
    if trials == 0 {
        return Err(Error::InvalidInput("at least one trial is needed".into()));
    }
    let needed = trials as u64 + 3;
    if let Some(size) = field.size() {
        if size - 1 < needed as u128 {
            return Err(Error::FieldTooSmall { needed, available: (size - 1) as u64 });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<FieldElem> = Vec::with_capacity(trials);
    while points.len() < trials {
        let x = field.random_nonzero(&mut rng);
        if !points.contains(&x) {
            points.push(x);
        }
    }
    let samples: Vec<usize> = points
        .iter()
        .map(|x| {
            let r = |m: Option<&LaurentMatrixZ>| m.map_or(0, |b| exactlin::rank(&b.evaluate(x)));
            cx.ranks[i] - r(cx.incoming(i)) - r(cx.outgoing(i))
        })
        .collect();
    let value = *samples.iter().min().unwrap();
    let agreeing = samples.iter().filter(|&&s| s == value).count();
    Ok(GenericDimension { value, stable: agreeing + 1 >= trials, samples, seed })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PTorsionWitness {
    pub alpha_rational: usize,
    pub alpha_mod_p: usize,
    /// First cover order with `p`-torsion in degree `i` or `i - 1`.
    pub found: Option<usize>,
}

/// Scans `N = 1..=n_max` for `p`-torsion in `H_i` or `H_{i-1}` of the cover.
pub fn p_torsion_witness(cx: &EquivariantComplex, i: usize, p: u64, n_max: usize) -> Result<PTorsionWitness> {
    cx.check_degree(i)?;
    if !arith::is_prime(p) {
        return Err(Error::InvalidField(format!("{p} is not prime")));
    }
    let alpha_rational = alpha(cx, i, 0)?;
    let alpha_mod_p = alpha(cx, i, p)?;
    let pb = BigInt::from(p);
    let maps: Vec<&LaurentMatrixZ> = cx.incoming(i).into_iter().chain(cx.outgoing(i)).collect();
    let found = (1..=n_max).find(|&n| {
        maps.iter().any(|b| {
            let s = exactlin::snf_int(&exactlin::cyclic_substitute(b, n));
            s.divisors.iter().any(|d| d.is_multiple_of(&pb))
        })
    });
    Ok(PTorsionWitness { alpha_rational, alpha_mod_p, found })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParallelConnection {
    pub big_matrix: IntMatrix,
    #[serde(with = "crate::bigjson::vec")]
    pub big_divisors: Vec<BigInt>,
    #[serde(with = "crate::bigjson::vec")]
    pub small_divisors: Vec<BigInt>,
    pub surjection_ok: bool,
}

/// Builds the block matrix with `m1 - 1` diagonal copies of `a` and a
/// `(t - 1) id` coupling column (rows are sources), substitutes `t = J_m`,
/// and checks that the torsion of its cokernel surjects onto the torsion of
/// the cokernel of `a(J_m)`.
pub fn parallel_connection_check(a: &LaurentMatrixZ, m: usize, m1: usize) -> Result<ParallelConnection> {
    if m1 < 3 {
        return Err(Error::MultiplicityTooSmall(m1 as u64));
    }
    if m == 0 {
        return Err(Error::InvalidInput("cover order must be positive".into()));
    }
    let (r, c) = (a.rows(), a.cols());
    let copies = m1 - 1;
    let coupling = LaurentPolyZ::t_pow_minus_one(1);
    let big = Matrix::from_fn(copies * r, copies * c + r, |i, j| {
        let (block, local) = (i / r, i % r);
        if j < copies * c {
            if j / c == block {
                a.get(local, j % c).clone()
            } else {
                LaurentPolyZ::zero()
            }
        } else if j - copies * c == local {
            coupling.clone()
        } else {
            LaurentPolyZ::zero()
        }
    });
    let big_matrix = exactlin::cyclic_substitute(&big, m);
    let nontrivial = |s: SnfResult| s.divisors.into_iter().filter(|d| !d.is_one()).collect::<Vec<_>>();
    let big_divisors = nontrivial(exactlin::snf_int(&big_matrix));
    let small_divisors = nontrivial(exactlin::snf_int(&exactlin::cyclic_substitute(a, m)));
    let surjection_ok = surjects(&big_divisors, &small_divisors);
    Ok(ParallelConnection { big_matrix, big_divisors, small_divisors, surjection_ok })
}

/// Whether a finite abelian group with invariant factors `big` maps onto
/// one with invariant factors `small`: for every prime `q` and `j >= 1`, at
/// least as many factors of `big` as of `small` are divisible by `q^j`.
pub fn surjects(big: &[BigInt], small: &[BigInt]) -> bool {
    let mut primes: BTreeMap<num_bigint::BigUint, u32> = BTreeMap::new();
    for d in small {
        for (q, e) in arith::factor_big(d.magnitude()) {
            let top = primes.entry(q).or_insert(0);
            *top = (*top).max(e);
        }
    }
    primes.into_iter().all(|(q, top)| {
        let q = BigInt::from(q);
        (1..=top).all(|j| {
            let qj = num_traits::pow(q.clone(), j as usize);
            let count = |v: &[BigInt]| v.iter().filter(|d| d.is_multiple_of(&qj)).count();
            count(big) >= count(small)
        })
    })
}

/// Closed-form degree-1 invariants of an orbifold group with its default
/// epimorphism.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PredictedInvariants {
    pub alpha1: usize,
    /// `exp` of the torsion growth rate.
    #[serde(with = "crate::bigjson")]
    pub mahler1_exact: BigInt,
    /// A constant always dividing `Delta_1`.
    pub delta1_divisor: LaurentPolyZ,
}

pub fn predicted_invariants(d: &OrbifoldData, characteristic: u64) -> Result<PredictedInvariants> {
    d.validate()?;
    let divisible = if characteristic == 0 { 0 } else { d.mu.iter().filter(|&&m| m % characteristic == 0).count() };
    let alpha1 = 2 * d.g + d.r + divisible - 2;
    let product = d.mu_product();
    Ok(PredictedInvariants { alpha1, delta1_divisor: LaurentPolyZ::constant(product.clone()), mahler1_exact: product })
}

/// Whether the polynomial `d` divides `p` in `Z[t, t^-1]`.
pub fn divides(d: &LaurentPolyZ, p: &LaurentPolyZ) -> bool {
    if d.is_zero() {
        return p.is_zero();
    }
    p.div_exact(d).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fox::{equivariant_complex_from_presentation, orbifold_presentation};
    use num_traits::Zero;
    use proptest::prelude::*;

    fn z(m: i64, c: &[i64]) -> LaurentPolyZ {
        LaurentPolyZ::from_i64s(m, c)
    }

    fn orbifold(g: usize, r: usize, mu: &[u64]) -> EquivariantComplex {
        let d = OrbifoldData::new(g, r, mu.to_vec()).unwrap();
        equivariant_complex_from_presentation(&orbifold_presentation(&d).unwrap(), &d.default_epimorphism()).unwrap()
    }

    fn pencil3(n: [i64; 3]) -> EquivariantComplex {
        let s = n.iter().sum();
        let d1 = Matrix::from_fn(1, 3, |_, j| {
            if j == 0 {
                LaurentPolyZ::t_pow_minus_one(s)
            } else {
                LaurentPolyZ::t_pow_minus_one(n[j - 1])
            }
        });
        let d2 = Matrix::from_fn(3, 2, |i, j| match i {
            0 => -&LaurentPolyZ::t_pow_minus_one(n[j]),
            _ if i == j + 1 => LaurentPolyZ::t_pow_minus_one(s),
            _ => LaurentPolyZ::zero(),
        });
        EquivariantComplex::new(vec![1, 3, 2], vec![d1, d2]).unwrap()
    }

    #[test]
    fn alexander_polynomials() {
        assert_eq!(alexander_poly(&orbifold(0, 2, &[2]), 1).unwrap().poly(), &z(0, &[2]));
        assert_eq!(alexander_poly(&orbifold(1, 0, &[2, 3]), 1).unwrap().poly(), &z(0, &[-6, 6]));
        let expected = &z(0, &[-1, 1]) * &z(0, &[-1, 0, 0, 1]);
        assert_eq!(alexander_poly(&pencil3([1, 1, 1]), 1).unwrap().poly(), &expected);
        assert!(alexander_poly(&pencil3([1, 1, 1]), 2).unwrap().is_one());
        assert!(matches!(alexander_poly(&pencil3([1, 1, 1]), 3), Err(Error::DegreeOutOfRange { .. })));
    }

    #[test]
    fn alpha_values() {
        for p in [0, 2, 3, 5] {
            assert_eq!(alpha(&pencil3([1, 1, -2]), 1, p).unwrap(), 1);
        }
        let cx = orbifold(0, 2, &[2]);
        assert_eq!(alpha(&cx, 1, 2).unwrap(), 1);
        assert_eq!(alpha(&cx, 1, 0).unwrap(), 0);
        let zero = EquivariantComplex::new(vec![2, 3], vec![LaurentMatrixZ::zeros(2, 3)]).unwrap();
        assert_eq!(alpha(&zero, 0, 0).unwrap(), 2);
        assert_eq!(alpha(&zero, 1, 3).unwrap(), 3);
    }

    #[test]
    fn invalid_complexes() {
        let d = Matrix::from_fn(1, 1, |_, _| z(0, &[-1, 1]));
        assert!(matches!(
            EquivariantComplex::new(vec![1, 1, 1], vec![d.clone(), d.clone()]),
            Err(Error::InvalidComplex(_))
        ));
        assert!(matches!(EquivariantComplex::new(vec![1, 2], vec![d.clone()]), Err(Error::InvalidComplex(_))));
        assert!(matches!(EquivariantComplex::new(vec![1, 1], vec![]), Err(Error::InvalidComplex(_))));
        let json = r#"{"ranks":[1,1],"boundaries":[{"rows":1,"cols":1,"entries":[[{"min_exp":0,"coeffs":[-1,1]}]]}]}"#;
        let cx: EquivariantComplex = serde_json::from_str(json).unwrap();
        assert_eq!(cx.boundaries()[0], d);
        assert_eq!(serde_json::from_str::<EquivariantComplex>(&serde_json::to_string(&cx).unwrap()).unwrap(), cx);
    }

    #[test]
    fn finite_covers() {
        let rep = cover_homology(&orbifold(0, 2, &[2]), 4, &[0, 2], true).unwrap();
        let h1 = rep.degree(1);
        let order = &h1.torsion.as_ref().unwrap().order;
        assert!(order > &BigInt::one() && (order & (order - 1u32)).is_zero());
        assert!(h1.betti[&0] <= h1.betti[&2]);
        let rep = cover_homology(&EquivariantComplex::synthetic(z(0, &[2])), 5, &[0], true).unwrap();
        assert_eq!(rep.degree(1).divisors.as_ref().unwrap(), &vec![BigInt::from(2); 5]);
        assert_eq!(rep.degree(1).torsion.as_ref().unwrap().order, BigInt::from(32));
        assert_eq!(rep.degree(1).betti[&0], 0);
        assert_eq!(rep.degree(2).betti[&0], 0);
        // the 3-fold cover is (Milnor fiber) x C*, a 3-punctured torus times C*
        let rep = cover_homology(&pencil3([1, 1, 1]), 3, &[0], true).unwrap();
        assert_eq!(rep.degree(1).betti[&0], 5);
        assert!(matches!(cover_homology(&pencil3([1, 1, 1]), 3, &[4], false), Err(Error::InvalidField(_))));
    }

    #[test]
    fn limits() {
        let scan = limit_scan(&orbifold(0, 2, &[2]), 1, 12, 0).unwrap();
        assert!((scan.rows.last().unwrap().torsion_ratio - 2f64.ln()).abs() < 1e-12);
        assert_eq!(scan.mahler_exact.exact, Some(BigInt::from(2)));
        assert_eq!(scan.stabilized_alpha, Some(0));
        let scan = limit_scan(&pencil3([1, 1, 1]), 1, 12, 0).unwrap();
        assert!(scan.rows.iter().all(|r| r.torsion_ratio == 0.0));
        assert_eq!(scan.stabilized_alpha, Some(scan.alpha_exact));
        let scan = limit_scan(&EquivariantComplex::synthetic(z(0, &[1, -3, 1])), 1, 24, 0).unwrap();
        let target = ((3.0 + 5f64.sqrt()) / 2.0).ln();
        assert!((scan.mahler_exact.numeric - target).abs() < 1e-9);
        assert!((scan.rows.last().unwrap().torsion_ratio - target).abs() < 0.05);
        assert!(scan
            .rows
            .iter()
            .all(|r| r.n == 0 || r.betti.abs_diff(scan.alpha_exact * r.n) <= scan.betti_defect_bound));
    }

    #[test]
    fn generic_dimensions() {
        let q = FieldSpec::rationals();
        let g = generic_local_system_dim(&pencil3([1, 1, -2]), 1, &q, 7, 0).unwrap();
        assert_eq!((g.value, g.stable), (1, true));
        let f16 = FieldSpec::with_min_size(2, 15).unwrap();
        assert_eq!(generic_local_system_dim(&orbifold(0, 2, &[2]), 1, &f16, 7, 3).unwrap().value, 1);
        let zero = EquivariantComplex::new(vec![2, 3], vec![LaurentMatrixZ::zeros(2, 3)]).unwrap();
        assert!(generic_local_system_dim(&zero, 1, &q, 5, 1).unwrap().samples.iter().all(|&s| s == 3));
        let f5 = FieldSpec::prime_field(5).unwrap();
        assert!(matches!(generic_local_system_dim(&zero, 1, &f5, 5, 1), Err(Error::FieldTooSmall { .. })));
    }

    #[test]
    fn torsion_witnesses() {
        let w = p_torsion_witness(&orbifold(0, 2, &[2]), 1, 2, 8).unwrap();
        assert_eq!((w.alpha_rational, w.alpha_mod_p), (0, 1));
        assert!(w.found.is_some_and(|n| n <= 8));
        let w = p_torsion_witness(&EquivariantComplex::synthetic(z(0, &[2])), 1, 2, 3).unwrap();
        assert_eq!(w.found, Some(1));
        let w = p_torsion_witness(&pencil3([1, 1, -2]), 1, 5, 30).unwrap();
        assert_eq!(w.found, None);
    }

    #[test]
    fn parallel_connection_examples() {
        let two = Matrix::from_fn(1, 1, |_, _| z(0, &[2]));
        let pc = parallel_connection_check(&two, 2, 3).unwrap();
        assert!(pc.surjection_ok);
        assert_eq!(pc.big_matrix.rows(), 4);
        assert_eq!(pc.big_matrix.cols(), 6);
        let id = Matrix::from_fn(2, 2, |i, j| if i == j { LaurentPolyZ::one() } else { LaurentPolyZ::zero() });
        let pc = parallel_connection_check(&id, 4, 3).unwrap();
        assert!(pc.surjection_ok && pc.big_divisors.is_empty() && pc.small_divisors.is_empty());
        assert_eq!(parallel_connection_check(&two, 2, 2), Err(Error::MultiplicityTooSmall(2)));
    }

    #[test]
    fn surjection_criterion() {
        let b = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert!(surjects(&b(&[4]), &b(&[2])));
        assert!(!surjects(&b(&[2]), &b(&[4])));
        assert!(!surjects(&b(&[4]), &b(&[2, 2])));
        assert!(surjects(&b(&[6, 6]), &b(&[2, 3])));
        assert!(surjects(&b(&[]), &b(&[])));
    }

    #[test]
    fn predictions() {
        let d = OrbifoldData::new(0, 2, vec![2]).unwrap();
        let p = predicted_invariants(&d, 2).unwrap();
        assert_eq!((p.alpha1, p.mahler1_exact.clone()), (1, BigInt::from(2)));
        assert_eq!(predicted_invariants(&d, 0).unwrap().alpha1, 0);
        let p = predicted_invariants(&OrbifoldData::new(1, 1, vec![]).unwrap(), 3).unwrap();
        assert_eq!((p.alpha1, p.mahler1_exact), (1, BigInt::one()));
    }

    fn arb_laurent() -> impl Strategy<Value = LaurentPolyZ> {
        (-1i64..=1, prop::collection::vec(-3i64..=3, 1..3)).prop_map(|(m, c)| z(m, &c))
    }

    fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = LaurentMatrixZ> {
        prop::collection::vec(arb_laurent(), rows * cols)
            .prop_map(move |v| Matrix::from_fn(rows, cols, |i, j| v[i * cols + j].clone()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn parallel_connection_surjects(
            a in (1usize..=2, 1usize..=2).prop_flat_map(|(r, c)| arb_matrix(r, c)),
            m in 1usize..=6,
            m1 in 3usize..=4,
        ) {
            prop_assert!(parallel_connection_check(&a, m, m1).unwrap().surjection_ok);
        }

        #[test]
        fn block_triangular_divisibility(
            a in arb_matrix(2, 2),
            b in arb_matrix(1, 1),
            c in arb_matrix(2, 1),
        ) {
            let whole = Matrix::from_fn(3, 3, |i, j| match (i < 2, j < 2) {
                (true, true) => a.get(i, j).clone(),
                (true, false) => c.get(i, 0).clone(),
                (false, true) => LaurentPolyZ::zero(),
                (false, false) => b.get(0, 0).clone(),
            });
            let g = exactlin::minor_gcd_laurent(&whole);
            let ga = exactlin::minor_gcd_laurent(&a);
            let gb = exactlin::minor_gcd_laurent(&b);
            if g.rank == ga.rank + gb.rank {
                let prod = ga.delta.poly() * gb.delta.poly();
                prop_assert!(divides(g.delta.poly(), &prod));
            }
        }

        #[test]
        fn rational_betti_at_most_modular(h in arb_laurent(), k in arb_laurent(), n in 1usize..=6) {
            let d1 = Matrix::from_fn(1, 1, |_, _| h.clone());
            let cx = EquivariantComplex::new(vec![1, 1, 0], vec![d1, LaurentMatrixZ::zeros(1, 0)]).unwrap();
            let cx2 = EquivariantComplex::synthetic(&h * &k);
            for cx in [cx, cx2] {
                let rep = cover_homology(&cx, n, &[0, 2, 3, 5], true).unwrap();
                for d in &rep.degrees {
                    for p in [2u64, 3, 5] {
                        prop_assert!(d.betti[&0] <= d.betti[&p]);
                        if d.betti[&0] < d.betti[&p] {
                            let has = |deg: &DegreeHomology| deg.divisors.as_ref().unwrap().iter().any(|x| x.is_multiple_of(&BigInt::from(p)));
                            let below = d.degree.checked_sub(1).map(|k| has(rep.degree(k))).unwrap_or(false);
                            prop_assert!(has(d) || below);
                        }
                    }
                }
            }
        }
    }
}

//! Covers of spaces whose homology is known independently: surfaces,
//! graphs, torus knots and knot complements.

mod common;

use alexcover::covers::{alexander_poly, alpha, cover_homology};
use alexcover::fox::{equivariant_complex_from_presentation, EpimorphismToZ, GroupPresentation, Word};
use alexcover::laurent::canonical_rep;
use alexcover::LaurentPolyZ;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;

fn presentation(generators: usize, relators: &[&[(usize, i64)]]) -> GroupPresentation {
    GroupPresentation::new(generators, relators.iter().map(|r| Word::from_powers(r)).collect()).unwrap()
}

fn knot_complex(p: &GroupPresentation, nu: &[i64]) -> alexcover::covers::EquivariantComplex {
    equivariant_complex_from_presentation(p, &EpimorphismToZ::new(nu.to_vec())).unwrap()
}

fn trefoil() -> GroupPresentation {
    presentation(2, &[&[(0, 1), (1, 1), (0, 1), (1, -1), (0, -1), (1, -1)]])
}

/// `w x w^-1 y^-1` with `w = x^-1 y x y^-1`.
fn figure_eight() -> GroupPresentation {
    let w = Word::from_powers(&[(0, -1), (1, 1), (0, 1), (1, -1)]);
    let r = w.concat(&Word::generator(0)).concat(&w.inverse()).concat(&Word::from_powers(&[(1, -1)]));
    GroupPresentation::new(2, vec![r]).unwrap()
}

fn z(c: &[i64]) -> LaurentPolyZ {
    LaurentPolyZ::from_i64s(0, c)
}

#[test]
fn knot_alexander_polynomials() {
    let cases = [(trefoil(), vec![1, 1], z(&[1, -1, 1])), (figure_eight(), vec![1, 1], z(&[1, -3, 1]))];
    for (p, nu, expected) in cases {
        let cx = knot_complex(&p, &nu);
        assert_eq!(alexander_poly(&cx, 1).unwrap(), canonical_rep(&expected).unwrap());
        assert_eq!(alexander_poly(&cx, 0).unwrap(), canonical_rep(&z(&[-1, 1])).unwrap());
    }
}

/// `<x, y | x^p = y^q>` with `nu = (q, p)` has
/// `Delta_1 = (t^pq - 1)(t - 1) / ((t^p - 1)(t^q - 1))`.
#[test]
fn torus_knot_family() {
    for (p, q) in [(2i64, 3i64), (2, 5), (2, 7), (3, 4), (3, 5), (4, 5)] {
        let g = presentation(2, &[&[(0, p), (1, -q)]]);
        let cx = knot_complex(&g, &[q, p]);
        let num = &LaurentPolyZ::t_pow_minus_one(p * q) * &LaurentPolyZ::t_pow_minus_one(1);
        let den = &LaurentPolyZ::t_pow_minus_one(p) * &LaurentPolyZ::t_pow_minus_one(q);
        let expected = num.div_exact(&den).unwrap();
        assert_eq!(alexander_poly(&cx, 1).unwrap(), canonical_rep(&expected).unwrap(), "T({p},{q})");
        for ch in [0, 2, 3, 5] {
            assert_eq!(alpha(&cx, 1, ch).unwrap(), 0);
        }
    }
}

/// `prod_{zeta^N = 1, zeta != 1} |Delta(zeta)|` in floating point.
fn resultant_estimate(delta: &LaurentPolyZ, n: usize) -> f64 {
    let coeffs: Vec<f64> = delta.coeffs().iter().map(|c| c.to_f64().unwrap()).collect();
    (1..n)
        .map(|k| {
            let zeta = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64);
            coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * zeta + c).norm()
        })
        .product()
}

#[test]
fn knot_cover_torsion_is_a_resultant() {
    for (name, p) in [("trefoil", trefoil()), ("figure eight", figure_eight())] {
        let cx = knot_complex(&p, &[1, 1]);
        let delta = alexander_poly(&cx, 1).unwrap().into_poly();
        for n in 1..=12 {
            let estimate = resultant_estimate(&delta, n);
            let rep = cover_homology(&cx, n, &[0], true).unwrap();
            let d1 = rep.degree(1);
            if estimate < 0.5 {
                assert!(d1.betti[&0] > 1, "{name}, N = {n}");
                continue;
            }
            assert_eq!(d1.betti[&0], 1, "{name}, N = {n}");
            let order = &d1.torsion.as_ref().unwrap().order;
            assert_eq!(order, &BigInt::from(estimate.round() as i64), "{name}, N = {n}, estimate {estimate}");
        }
    }
}

#[test]
fn trefoil_six_fold_cover_has_free_rank() {
    let cx = knot_complex(&trefoil(), &[1, 1]);
    let rep = cover_homology(&cx, 6, &[0, 2], true).unwrap();
    assert_eq!(rep.degree(1).betti[&0], 3);
}

/// A connected `N`-fold cover of a closed genus `g` surface has genus
/// `N(g - 1) + 1`.
#[test]
fn surface_covers() {
    for g in 1..=3 {
        let cx = common::orbifold_complex(g, 0, &[]);
        for n in 1..=8 {
            let rep = cover_homology(&cx, n, &[0, 2, 3], true).unwrap();
            for p in [0, 2, 3] {
                assert_eq!(rep.degree(0).betti[&p], 1);
                assert_eq!(rep.degree(1).betti[&p], 2 * n * (g - 1) + 2, "g = {g}, N = {n}");
                assert_eq!(rep.degree(2).betti[&p], 1);
            }
            assert!(rep.degree(1).divisors.as_ref().unwrap().is_empty());
        }
        assert_eq!(alpha(&cx, 1, 0).unwrap(), 2 * g - 2);
    }
}

/// Free groups: the `N`-fold cover of a wedge of `k` circles is a graph
/// with Euler characteristic `N(1 - k)`.
#[test]
fn graph_covers() {
    for (g, r) in [(0usize, 2usize), (0, 3), (1, 1), (1, 2), (2, 1)] {
        let k = 2 * g + r - 1;
        let cx = common::orbifold_complex(g, r, &[]);
        for n in 1..=8 {
            let rep = cover_homology(&cx, n, &[0, 5], true).unwrap();
            assert_eq!(rep.degree(1).betti[&0], n * (k - 1) + 1, "(g, r) = ({g}, {r}), N = {n}");
            assert_eq!(rep.degree(1).betti[&5], n * (k - 1) + 1);
        }
    }
}

#[test]
fn free_product_with_cyclic_group() {
    let cx = common::orbifold_complex(0, 2, &[3]);
    for n in 1..=10 {
        let rep = cover_homology(&cx, n, &[0, 3], true).unwrap();
        let d1 = rep.degree(1);
        assert_eq!(d1.betti[&0], 1);
        assert_eq!(d1.betti[&3], n + 1);
        assert_eq!(d1.divisors.as_ref().unwrap(), &vec![BigInt::from(3); n]);
    }
}

//! Line arrangements in the projective plane and pencils of lines through
//! a point: intersection lattices, Aomoto complexes, multinets, and the
//! multiplicity constructions for Milnor fibers.

use std::collections::{BTreeMap, HashSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::covers::EquivariantComplex;
use crate::error::{Error, Result};
use crate::exactlin::{self, IntMatrix, LaurentMatrixZ, Matrix};
use crate::fields::{make_splitting_field, root_of_unity, FieldElem, FieldSpec};
use crate::fox::OrbifoldData;
use crate::laurent::LaurentPolyZ;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ambient {
    /// Lines `ax + by = 0` through the origin of `C^2`.
    P1,
    /// Lines `ax + by + cz = 0` in the projective plane.
    P2,
}

impl Ambient {
    fn dim(self) -> usize {
        match self {
            Ambient::P1 => 2,
            Ambient::P2 => 3,
        }
    }
}

/// Lines given by their coefficient vectors, optionally with one line
/// declared to be the line at infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineArrangement {
    ambient: Ambient,
    field: Arc<FieldSpec>,
    lines: Vec<Vec<FieldElem>>,
    infinity: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Coord {
    Int(i64),
    Text(String),
    Coeffs(Vec<String>),
}

#[derive(Serialize)]
struct ArrangementOut<'a> {
    ambient: Ambient,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<&'a FieldSpec>,
    lines: Vec<Vec<Coord>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    infinity: Option<usize>,
}

#[derive(Deserialize)]
struct RawArrangement {
    ambient: Ambient,
    #[serde(default)]
    field: Option<FieldSpec>,
    lines: Vec<Vec<Coord>>,
    #[serde(default)]
    infinity: Option<usize>,
}

fn parse_coord(field: &Arc<FieldSpec>, c: Coord) -> Result<FieldElem> {
    match c {
        Coord::Int(v) => Ok(FieldElem::from_i64(field, v)),
        Coord::Text(s) => FieldElem::from_json_coeffs(field, &[s]),
        Coord::Coeffs(v) => FieldElem::from_json_coeffs(field, &v),
    }
}

fn coord_of(x: &FieldElem) -> Coord {
    let coeffs = x.to_json_coeffs();
    match coeffs.as_slice() {
        [] => Coord::Int(0),
        [c] => c.parse::<i64>().map_or_else(|_| Coord::Text(c.clone()), Coord::Int),
        _ => Coord::Coeffs(coeffs),
    }
}

impl Serialize for LineArrangement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let field = (*self.field != *FieldSpec::rationals()).then_some(&*self.field);
        ArrangementOut {
            ambient: self.ambient,
            field,
            lines: self.lines.iter().map(|l| l.iter().map(coord_of).collect()).collect(),
            infinity: self.infinity,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LineArrangement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawArrangement::deserialize(d)?;
        let field = raw.field.map_or_else(FieldSpec::rationals, Arc::new);
        let lines = raw
            .lines
            .into_iter()
            .map(|l| l.into_iter().map(|c| parse_coord(&field, c)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        LineArrangement::new(raw.ambient, &field, lines, raw.infinity).map_err(serde::de::Error::custom)
    }
}

fn proportional(a: &[FieldElem], b: &[FieldElem]) -> bool {
    (0..a.len()).all(|i| (i + 1..a.len()).all(|j| a[i].mul(&b[j]) == a[j].mul(&b[i])))
}

fn dot(a: &[FieldElem], b: &[FieldElem]) -> FieldElem {
    a.iter().zip(b).fold(FieldElem::zero(a[0].field()), |acc, (x, y)| acc.add(&x.mul(y)))
}

fn cross(a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    (0..3).map(|i| a[(i + 1) % 3].mul(&b[(i + 2) % 3]).sub(&a[(i + 2) % 3].mul(&b[(i + 1) % 3]))).collect()
}

/// Scales so that the first nonzero coordinate is 1.
fn normalize(v: Vec<FieldElem>) -> Vec<FieldElem> {
    let lead = v.iter().find(|x| !x.is_zero()).expect("nonzero vector").inv();
    v.iter().map(|x| x.mul(&lead)).collect()
}

impl LineArrangement {
    pub fn new(
        ambient: Ambient,
        field: &Arc<FieldSpec>,
        lines: Vec<Vec<FieldElem>>,
        infinity: Option<usize>,
    ) -> Result<Self> {
        for (k, l) in lines.iter().enumerate() {
            if l.len() != ambient.dim() {
                return Err(Error::InvalidInput(format!(
                    "line {k} has {} coordinates, expected {}",
                    l.len(),
                    ambient.dim()
                )));
            }
            if l.iter().all(|x| x.is_zero()) {
                return Err(Error::DegenerateInput(format!("line {k} has all coordinates zero")));
            }
            if l.iter().any(|x| x.field() != field) {
                return Err(Error::FieldMismatch);
            }
        }
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                if proportional(&lines[i], &lines[j]) {
                    return Err(Error::DegenerateInput(format!("lines {i} and {j} coincide")));
                }
            }
        }
        if let Some(k) = infinity {
            if ambient != Ambient::P2 || k >= lines.len() {
                return Err(Error::InvalidInput(format!("line {k} cannot be the line at infinity")));
            }
        }
        Ok(LineArrangement { ambient, field: field.clone(), lines, infinity })
    }

    /// Lines with integer coefficients over `Q`.
    pub fn from_integers(ambient: Ambient, lines: &[Vec<i64>], infinity: Option<usize>) -> Result<Self> {
        let q = FieldSpec::rationals();
        let lines = lines.iter().map(|l| l.iter().map(|&v| FieldElem::from_i64(&q, v)).collect()).collect();
        Self::new(ambient, &q, lines, infinity)
    }

    /// `d` distinct lines `x = j y` through the origin of `C^2`.
    pub fn pencil(d: usize) -> Result<Self> {
        let lines: Vec<Vec<i64>> = (0..d as i64).map(|j| vec![1, -j]).collect();
        Self::from_integers(Ambient::P1, &lines, None)
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn lines(&self) -> &[Vec<FieldElem>] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn infinity(&self) -> Option<usize> {
        self.infinity
    }

    pub fn with_infinity(&self, infinity: Option<usize>) -> Result<Self> {
        Self::new(self.ambient, &self.field, self.lines.clone(), infinity)
    }

    /// Indices of the lines carrying cohomology classes: all lines except
    /// the line at infinity.
    pub fn affine_lines(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| Some(k) != self.infinity).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionPoint {
    /// Normalized coordinates (empty for the common point of a pencil).
    pub coords: Vec<FieldElem>,
    /// Incident lines, ascending.
    pub lines: Vec<usize>,
}

impl IntersectionPoint {
    pub fn multiplicity(&self) -> usize {
        self.lines.len()
    }
}

impl Serialize for IntersectionPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("IntersectionPoint", 2)?;
        st.serialize_field("coords", &self.coords.iter().map(coord_of).collect::<Vec<_>>())?;
        st.serialize_field("lines", &self.lines)?;
        st.end()
    }
}

/// All intersection points, in order of first appearance among the pairs
/// `(i, j)`, `i < j`, taken lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionData {
    pub points: Vec<IntersectionPoint>,
}

impl IntersectionData {
    /// Index of the point where lines `i != j` meet.
    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.points
            .iter()
            .position(|p| p.lines.binary_search(&i).is_ok() && p.lines.binary_search(&j).is_ok())
            .expect("every pair of lines meets")
    }
}

pub fn intersection_points(arr: &LineArrangement) -> Result<IntersectionData> {
    if arr.len() < 2 {
        return Err(Error::InvalidInput("an arrangement needs at least two lines".into()));
    }
    if arr.ambient == Ambient::P1 {
        return Ok(IntersectionData {
            points: vec![IntersectionPoint { coords: Vec::new(), lines: (0..arr.len()).collect() }],
        });
    }
    let mut points: Vec<IntersectionPoint> = Vec::new();
    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    for i in 0..arr.len() {
        for j in i + 1..arr.len() {
            if seen.contains(&(i, j)) {
                continue;
            }
            let coords = normalize(cross(&arr.lines[i], &arr.lines[j]));
            let lines: Vec<usize> = (0..arr.len()).filter(|&k| dot(&arr.lines[k], &coords).is_zero()).collect();
            for (a, &x) in lines.iter().enumerate() {
                for &y in &lines[a + 1..] {
                    seen.insert((x, y));
                }
            }
            points.push(IntersectionPoint { coords, lines });
        }
    }
    Ok(IntersectionData { points })
}

/// Degree `<= 2` Aomoto complex `H^0 -> H^1 -> H^2` of multiplication by
/// `omega = sum nu_k a_k`. Matrices act on row vectors: `h0_to_h1` is
/// `1 x b1` and `h1_to_h2` is `b1 x b2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AomotoComplexZ {
    pub nu: Vec<i64>,
    /// Line index of each `H^1` basis element.
    pub h1_lines: Vec<usize>,
    /// Intersection point of each `H^2` basis element.
    pub h2_points: Vec<usize>,
    pub h0_to_h1: IntMatrix,
    pub h1_to_h2: IntMatrix,
}

/// The Aomoto complex of the complement: with a line at infinity, the
/// affine complement (points on that line are dropped); otherwise the
/// complement of the cone, using every intersection point. The `H^2` basis
/// at a point with lines `i_1 < ... < i_m` is `a_{i_1} a_{i_l}`, `l >= 2`,
/// with `a_i a_j = a_{i_1} a_j - a_{i_1} a_i`.
pub fn aomoto_complex(arr: &LineArrangement, nu: &[i64]) -> Result<AomotoComplexZ> {
    let h1_lines = arr.affine_lines();
    if nu.len() != h1_lines.len() {
        return Err(Error::InvalidInput(format!("{} weights for {} lines", nu.len(), h1_lines.len())));
    }
    if nu.iter().fold(0i64, |g, &x| g.gcd(&x)) != 1 {
        return Err(Error::NotEpimorphism(format!("weights {nu:?} are not coprime")));
    }
    let position: BTreeMap<usize, usize> = h1_lines.iter().enumerate().map(|(k, &l)| (l, k)).collect();
    let points = if arr.len() >= 2 { intersection_points(arr)?.points } else { Vec::new() };
    let mut h2_points = Vec::new();
    let mut columns: Vec<Vec<i64>> = Vec::new();
    for (x, p) in points.iter().enumerate() {
        if arr.infinity.is_some_and(|k| p.lines.contains(&k)) {
            continue;
        }
        let local: Vec<usize> = p.lines.iter().map(|l| position[l]).collect();
        // column for basis element a_{i_1} a_{i_l}
        let base = local.len();
        let mut block = vec![vec![0i64; base - 1]; h1_lines.len()];
        let product = |i: usize, j: usize| -> Vec<i64> {
            // coordinates of a_{local[i]} a_{local[j]} in the local basis
            let mut v = vec![0i64; base - 1];
            match (i, j) {
                _ if i == j => {}
                (0, j) => v[j - 1] = 1,
                (i, 0) => v[i - 1] = -1,
                (i, j) => {
                    v[j - 1] += 1;
                    v[i - 1] -= 1;
                }
            }
            v
        };
        for i in 0..base {
            for j in 0..base {
                let w = nu[local[j]];
                if w == 0 {
                    continue;
                }
                // a_k -> omega a_k, so row k collects nu_j a_j a_k
                for (c, v) in product(j, i).into_iter().enumerate() {
                    block[local[i]][c] += w * v;
                }
            }
        }
        for c in 0..base - 1 {
            h2_points.push(x);
            columns.push(block.iter().map(|row| row[c]).collect());
        }
    }
    let b1 = h1_lines.len();
    let h1_to_h2 = Matrix::from_fn(b1, columns.len(), |r, c| BigInt::from(columns[c][r]));
    let h0_to_h1 = Matrix::from_fn(1, b1, |_, k| BigInt::from(nu[k]));
    Ok(AomotoComplexZ { nu: nu.to_vec(), h1_lines, h2_points, h0_to_h1, h1_to_h2 })
}

/// Aomoto Betti numbers per characteristic and the torsion order `tau_1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BetaTau {
    pub beta0: BTreeMap<u64, usize>,
    pub beta1: BTreeMap<u64, usize>,
    #[serde(with = "crate::bigjson")]
    pub tau1: BigInt,
    #[serde(with = "crate::bigjson::vec")]
    pub tau1_divisors: Vec<BigInt>,
}

pub fn beta_tau(cx: &AomotoComplexZ, characteristics: &[u64]) -> Result<BetaTau> {
    if let Some(p) = characteristics.iter().find(|&&p| p != 0 && !crate::arith::is_prime(p)) {
        return Err(Error::InvalidField(format!("{p} is not prime")));
    }
    let rank = |m: &IntMatrix, p: u64| if p == 0 { exactlin::rank(m) } else { exactlin::rank_mod_p(m, p) };
    let b1 = cx.h1_lines.len();
    let mut beta0 = BTreeMap::new();
    let mut beta1 = BTreeMap::new();
    for &p in characteristics {
        let r0 = rank(&cx.h0_to_h1, p);
        let r1 = rank(&cx.h1_to_h2, p);
        beta0.insert(p, 1 - r0);
        beta1.insert(p, b1 - r0 - r1);
    }
    let snf = exactlin::snf_int(&cx.h1_to_h2);
    let tau1_divisors: Vec<BigInt> = snf.divisors.into_iter().filter(|d| !d.is_one()).collect();
    let tau1 = tau1_divisors.iter().product();
    Ok(BetaTau { beta0, beta1, tau1, tau1_divisors })
}

/// The equivariant complex of the complement of `d` concurrent lines with
/// weights `n`: ranks `[1, d, d - 1]`, `d_1 = (t^S - 1, t^{n_1} - 1, ...,
/// t^{n_{d-1}} - 1)` with `S = sum n`, and `d_2` with first row
/// `1 - t^{n_j}` and `t^S - 1` on the shifted diagonal.
pub fn pencil_complex(d: usize, n: &[i64]) -> Result<EquivariantComplex> {
    if d < 2 || n.len() != d {
        return Err(Error::InvalidInput(format!("a pencil needs d >= 2 weights, got d = {d}, {} weights", n.len())));
    }
    if n.iter().fold(0i64, |g, &x| g.gcd(&x)) != 1 {
        return Err(Error::NotEpimorphism(format!("weights {n:?} are not coprime")));
    }
    let s: i64 = n.iter().sum();
    let d1 = Matrix::from_fn(1, d, |_, j| LaurentPolyZ::t_pow_minus_one(if j == 0 { s } else { n[j - 1] }));
    let d2: LaurentMatrixZ = Matrix::from_fn(d, d - 1, |i, j| match i {
        0 => -&LaurentPolyZ::t_pow_minus_one(n[j]),
        _ if i == j + 1 => LaurentPolyZ::t_pow_minus_one(s),
        _ => LaurentPolyZ::zero(),
    });
    EquivariantComplex::new(vec![1, d, d - 1], vec![d1, d2])
}

/// A partition of the lines into classes with weights and a base locus of
/// intersection points (indices into [`intersection_points`]).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multinet {
    pub classes: Vec<Vec<usize>>,
    pub weights: Vec<u64>,
    pub base_locus: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultinetVerdict {
    pub valid: bool,
    /// Failed conditions among `a`..`e`.
    pub violated: Vec<char>,
    pub kappa: Option<u64>,
}

fn class_of(mn: &Multinet, lines: usize) -> Result<Vec<usize>> {
    let mut class = vec![usize::MAX; lines];
    for (c, members) in mn.classes.iter().enumerate() {
        for &h in members {
            if h >= lines || class[h] != usize::MAX {
                return Err(Error::InvalidInput(format!("line {h} is out of range or in two classes")));
            }
            class[h] = c;
        }
    }
    if class.contains(&usize::MAX) {
        return Err(Error::InvalidInput("the classes do not cover every line".into()));
    }
    Ok(class)
}

/// Checks the multinet axioms against freshly computed incidences:
/// (a) equal class weights, (b) lines of different classes meet in the
/// base locus, (c) equal class weights through each base point, (d) each
/// class is connected through intersections off the base locus, (e) the
/// weights are coprime.
pub fn verify_multinet(arr: &LineArrangement, mn: &Multinet) -> Result<MultinetVerdict> {
    if arr.ambient != Ambient::P2 {
        return Err(Error::InvalidInput("multinets live on arrangements in the projective plane".into()));
    }
    if mn.classes.len() < 3 {
        return Err(Error::InvalidInput(format!("a multinet needs at least 3 classes, got {}", mn.classes.len())));
    }
    if mn.weights.len() != arr.len() || mn.weights.contains(&0) {
        return Err(Error::InvalidInput("one positive weight per line is required".into()));
    }
    let class = class_of(mn, arr.len())?;
    let data = intersection_points(arr)?;
    if let Some(&x) = mn.base_locus.iter().find(|&&x| x >= data.points.len()) {
        return Err(Error::InvalidInput(format!("base point {x} does not exist")));
    }
    let in_base: HashSet<usize> = mn.base_locus.iter().copied().collect();
    let class_weight = |c: usize, lines: &mut dyn Iterator<Item = usize>| -> u64 {
        lines.filter(|&h| class[h] == c).map(|h| mn.weights[h]).sum()
    };
    let mut violated = Vec::new();

    let sums: Vec<u64> = (0..mn.classes.len()).map(|c| class_weight(c, &mut (0..arr.len()))).collect();
    if sums.iter().any(|&s| s != sums[0]) {
        violated.push('a');
    }
    let cross_ok =
        (0..arr.len()).all(|i| (i + 1..arr.len()).all(|j| class[i] == class[j] || in_base.contains(&data.meet(i, j))));
    if !cross_ok {
        violated.push('b');
    }
    let balanced = mn.base_locus.iter().all(|&x| {
        let lines = &data.points[x].lines;
        let w: Vec<u64> = (0..mn.classes.len()).map(|c| class_weight(c, &mut lines.iter().copied())).collect();
        w.iter().all(|&v| v == w[0])
    });
    if !balanced {
        violated.push('c');
    }
    let connected = mn.classes.iter().all(|members| {
        let Some(&start) = members.first() else { return true };
        let mut reached = vec![start];
        let mut stack = vec![start];
        while let Some(h) = stack.pop() {
            for &k in members {
                if !reached.contains(&k) && !in_base.contains(&data.meet(h, k)) {
                    reached.push(k);
                    stack.push(k);
                }
            }
        }
        reached.len() == members.len()
    });
    if !connected {
        violated.push('d');
    }
    if mn.weights.iter().fold(0u64, |g, &w| g.gcd(&w)) != 1 {
        violated.push('e');
    }
    let valid = violated.is_empty();
    Ok(MultinetVerdict { valid, violated, kappa: valid.then(|| sums[0]) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NetCertificate {
    pub assumption_ok: bool,
    /// First failing hypothesis among `a`, `b`, `c`.
    pub failed: Option<char>,
    /// Deletion order found for the third class, as (line, base point).
    pub deletions: Vec<(usize, usize)>,
    pub nu: Vec<i64>,
    #[serde(with = "crate::bigjson::opt")]
    pub tau1: Option<BigInt>,
    pub no_parallel_component: bool,
}

/// Repeatedly deletes a line of the third class together with a base
/// point lying on no other remaining line of that class; succeeds when the
/// class is exhausted. Tries points in order and backtracks.
fn deletion_order(third: &[usize], base: &[usize], data: &IntersectionData) -> Option<Vec<(usize, usize)>> {
    fn search(
        lines: &mut Vec<usize>,
        points: &mut Vec<usize>,
        data: &IntersectionData,
        dead: &mut HashSet<(Vec<usize>, Vec<usize>)>,
        order: &mut Vec<(usize, usize)>,
    ) -> bool {
        if lines.is_empty() {
            return true;
        }
        if dead.contains(&(lines.clone(), points.clone())) {
            return false;
        }
        for pi in 0..points.len() {
            let x = points[pi];
            let on: Vec<usize> = lines.iter().copied().filter(|h| data.points[x].lines.contains(h)).collect();
            if let [h] = on[..] {
                let li = lines.iter().position(|&k| k == h).unwrap();
                lines.remove(li);
                points.remove(pi);
                order.push((h, x));
                if search(lines, points, data, dead, order) {
                    return true;
                }
                order.pop();
                points.insert(pi, x);
                lines.insert(li, h);
            }
        }
        dead.insert((lines.clone(), points.clone()));
        false
    }
    let mut lines = third.to_vec();
    let mut points = base.to_vec();
    lines.sort_unstable();
    points.sort_unstable();
    let mut order = Vec::new();
    search(&mut lines, &mut points, data, &mut HashSet::new(), &mut order).then_some(order)
}

/// For a 3-net: checks that the first two classes have unit weights, that
/// their intersections off the base locus are double points, and that the
/// third class can be dismantled; then computes `tau_1` for `nu = 1` on
/// the first two classes and `-2 n_H` on the third. `tau_1 = 1` rules out
/// a translated component from this multinet.
pub fn check_assumption_and_certificate(arr: &LineArrangement, mn: &Multinet) -> Result<NetCertificate> {
    if mn.classes.len() != 3 {
        return Err(Error::NotAThreeNet(mn.classes.len()));
    }
    let verdict = verify_multinet(arr, mn)?;
    if !verdict.valid {
        return Err(Error::InvalidInput(format!("not a multinet: violates {:?}", verdict.violated)));
    }
    let data = intersection_points(arr)?;
    let in_base: HashSet<usize> = mn.base_locus.iter().copied().collect();
    let nu: Vec<i64> =
        (0..arr.len()).map(|h| if mn.classes[2].contains(&h) { -2 * mn.weights[h] as i64 } else { 1 }).collect();
    let fail = |c: char| NetCertificate {
        assumption_ok: false,
        failed: Some(c),
        deletions: Vec::new(),
        nu: nu.clone(),
        tau1: None,
        no_parallel_component: false,
    };
    if mn.classes[..2].iter().flatten().any(|&h| mn.weights[h] != 1) {
        return Ok(fail('a'));
    }
    let simple_crossings = mn.classes[..2].iter().all(|members| {
        members.iter().all(|&h| {
            members.iter().filter(|&&k| k > h).all(|&k| {
                let x = data.meet(h, k);
                in_base.contains(&x) || data.points[x].multiplicity() == 2
            })
        })
    });
    if !simple_crossings {
        return Ok(fail('b'));
    }
    let Some(deletions) = deletion_order(&mn.classes[2], &mn.base_locus, &data) else {
        return Ok(fail('c'));
    };
    let central = arr.with_infinity(None)?;
    let bt = beta_tau(&aomoto_complex(&central, &nu)?, &[])?;
    Ok(NetCertificate {
        assumption_ok: true,
        failed: None,
        deletions,
        nu,
        no_parallel_component: bt.tau1.is_one(),
        tau1: Some(bt.tau1),
    })
}

/// The monomial arrangement `(x^m - y^m)(x^m - z^m)(y^m - z^m)` over
/// `Q(zeta_m)` and its standard 3-net, whose base locus is the `m^2`
/// points where lines of different classes meet.
pub fn ceva(m: u64) -> Result<(LineArrangement, Multinet)> {
    if m < 2 {
        return Err(Error::InvalidInput("the monomial arrangement needs m >= 2".into()));
    }
    let field = make_splitting_field(0, m)?;
    let zeta = root_of_unity(&field, m)?;
    let (zero, one) = (FieldElem::zero(&field), FieldElem::one(&field));
    let mut lines = Vec::new();
    for (a, b) in [(0, 1), (0, 2), (1, 2)] {
        for j in 0..m {
            let mut l = vec![zero.clone(); 3];
            l[a] = one.clone();
            l[b] = zeta.pow(j as i64).neg();
            lines.push(l);
        }
    }
    let arr = LineArrangement::new(Ambient::P2, &field, lines, None)?;
    let m = m as usize;
    let classes = (0..3).map(|c| (c * m..(c + 1) * m).collect()).collect();
    let data = intersection_points(&arr)?;
    let base_locus = (0..data.points.len())
        .filter(|&x| data.points[x].lines.iter().any(|&h| h / m != data.points[x].lines[0] / m))
        .collect();
    Ok((arr, Multinet { classes, weights: vec![1; 3 * m], base_locus }))
}

/// The deleted B_3 arrangement `z x y (x - y)(x - z)(y - z)(x - y - z)(x - y + z)`
/// with `z` at infinity.
pub fn deleted_b3() -> LineArrangement {
    let lines = [[0, 0, 1], [1, 0, 0], [0, 1, 0], [1, -1, 0], [1, 0, -1], [0, 1, -1], [1, -1, -1], [1, -1, 1]];
    let lines: Vec<Vec<i64>> = lines.iter().map(|l| l.to_vec()).collect();
    LineArrangement::from_integers(Ambient::P2, &lines, Some(0)).expect("distinct lines")
}

/// The arrangement `y z (x^mu - y^mu)(x^mu - z^mu)(y^mu - z^mu)` over
/// `Q(zeta_mu)` and its orbifold type `(0, 2, (mu))`.
pub fn deleted_monomial_arrangement(mu: u64) -> Result<(LineArrangement, OrbifoldData)> {
    let (monomial, _) = ceva(mu)?;
    let field = monomial.field.clone();
    let (zero, one) = (FieldElem::zero(&field), FieldElem::one(&field));
    let y = vec![zero.clone(), one.clone(), zero.clone()];
    let z = vec![zero.clone(), zero, one];
    let mut lines = vec![y, z];
    lines.extend(monomial.lines);
    let arr = LineArrangement::new(Ambient::P2, &field, lines, None)?;
    Ok((arr, OrbifoldData::new(0, 2, vec![mu])?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicityVector {
    pub m: Vec<u64>,
    pub total: u64,
}

/// Lifts residues `chi` modulo `n` to positive multiplicities
/// `m_l = chi_l + n q_l` with `p` not dividing `sum m / n`, choosing the
/// lexicographically smallest `q >= 0`.
pub fn lift_multiplicity(chi: &[i64], n: u64, p: u64) -> Result<MultiplicityVector> {
    if n == 0 || !crate::arith::is_prime(p) {
        return Err(Error::InvalidInput(format!("need n >= 1 and p prime, got n = {n}, p = {p}")));
    }
    let ni = n as i64;
    if chi.is_empty() || chi.iter().sum::<i64>().rem_euclid(ni) != 0 {
        return Err(Error::InvalidInput(format!("{n} does not divide the sum of the residues")));
    }
    let mut m: Vec<u64> = chi.iter().map(|&c| c.rem_euclid(ni) as u64).map(|r| if r == 0 { n } else { r }).collect();
    let mut total: u64 = m.iter().sum();
    if (total / n).is_multiple_of(p) {
        *m.last_mut().unwrap() += n;
        total += n;
    }
    Ok(MultiplicityVector { m, total })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::{alexander_poly, alpha};
    use crate::laurent::{mahler_measure, strip_unit_roots_at_one, DEFAULT_TOLERANCE};

    fn z(c: &[i64]) -> LaurentPolyZ {
        LaurentPolyZ::from_i64s(0, c)
    }

    #[test]
    fn intersection_lattices() {
        let pencil = intersection_points(&LineArrangement::pencil(4).unwrap()).unwrap();
        assert_eq!(pencil.points.len(), 1);
        assert_eq!(pencil.points[0].multiplicity(), 4);
        let (ceva2, _) = ceva(2).unwrap();
        let data = intersection_points(&ceva2).unwrap();
        let mut mults: Vec<usize> = data.points.iter().map(|p| p.multiplicity()).collect();
        mults.sort_unstable();
        assert_eq!(mults, vec![2, 2, 2, 3, 3, 3, 3]);
        let b3 = intersection_points(&deleted_b3()).unwrap();
        let pairs: usize = b3.points.iter().map(|p| p.multiplicity() * (p.multiplicity() - 1) / 2).sum();
        assert_eq!(pairs, 28);
        let repeated = LineArrangement::from_integers(Ambient::P2, &[vec![1, 0, 0], vec![2, 0, 0]], None);
        assert!(matches!(repeated, Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn pencil_aomoto() {
        let cx = aomoto_complex(&LineArrangement::pencil(3).unwrap(), &[1, 2, 3]).unwrap();
        assert_eq!((cx.h1_to_h2.rows(), cx.h1_to_h2.cols()), (3, 2));
        let bt = beta_tau(&cx, &[0, 2, 3]).unwrap();
        assert_eq!(bt.tau1, BigInt::from(6));
        assert_eq!((bt.beta1[&0], bt.beta1[&2], bt.beta1[&3]), (0, 1, 1));
        let bt = beta_tau(&aomoto_complex(&LineArrangement::pencil(3).unwrap(), &[1, 1, -2]).unwrap(), &[0, 2, 3, 5])
            .unwrap();
        assert_eq!(bt.tau1, BigInt::one());
        assert!(bt.beta1.values().all(|&b| b == 1));
        let single = LineArrangement::from_integers(Ambient::P2, &[vec![1, 0, 0]], None).unwrap();
        let cx = aomoto_complex(&single, &[1]).unwrap();
        assert_eq!(cx.h1_to_h2.cols(), 0);
        assert!(matches!(
            aomoto_complex(&LineArrangement::pencil(3).unwrap(), &[2, 2, 4]),
            Err(Error::NotEpimorphism(_))
        ));
    }

    #[test]
    fn deleted_b3_aomoto() {
        let cx = aomoto_complex(&deleted_b3(), &[1, -1, 0, -1, 1, 2, -2]).unwrap();
        let bt = beta_tau(&cx, &[0, 2, 3, 5]).unwrap();
        assert_eq!(bt.tau1, BigInt::from(4));
        assert_eq!((bt.beta1[&0], bt.beta1[&2], bt.beta1[&3], bt.beta1[&5]), (0, 1, 0, 0));
    }

    #[test]
    fn h2_rank_matches_multiplicities() {
        for arr in [deleted_b3(), ceva(2).unwrap().0, ceva(3).unwrap().0, deleted_monomial_arrangement(3).unwrap().0] {
            let data = intersection_points(&arr).unwrap();
            let expected: usize = data
                .points
                .iter()
                .filter(|p| arr.infinity().is_none_or(|k| !p.lines.contains(&k)))
                .map(|p| p.multiplicity() - 1)
                .sum();
            let mut nu = vec![0; arr.affine_lines().len()];
            nu[0] = 1;
            assert_eq!(aomoto_complex(&arr, &nu).unwrap().h1_to_h2.cols(), expected);
        }
    }

    #[test]
    fn pencil_complexes() {
        let p = alexander_poly(&pencil_complex(3, &[1, 1, 1]).unwrap(), 1).unwrap();
        assert_eq!(p.poly(), &(&z(&[-1, 1]) * &z(&[-1, 0, 0, 1])));
        assert_eq!(alexander_poly(&pencil_complex(3, &[1, 1, -2]).unwrap(), 1).unwrap().poly(), &z(&[-1, 1]));
        let cx = pencil_complex(2, &[1, -1]).unwrap();
        assert_eq!(alexander_poly(&cx, 1).unwrap().poly(), &z(&[-1, 1]));
        assert_eq!(alpha(&cx, 1, 0).unwrap(), 0);
        assert!(matches!(pencil_complex(3, &[2, 2, 2]), Err(Error::NotEpimorphism(_))));
    }

    #[test]
    fn pencil_invariants_against_aomoto() {
        let fixtures: [&[i64]; 5] = [&[1, 1, 1], &[1, 2, 3], &[1, 1, -2], &[1, -1], &[2, 3, 1, 1]];
        for n in fixtures {
            let d = n.len();
            let cx = pencil_complex(d, n).unwrap();
            let bt =
                beta_tau(&aomoto_complex(&LineArrangement::pencil(d).unwrap(), n).unwrap(), &[0, 2, 3, 5]).unwrap();
            for p in [0, 2, 3, 5] {
                assert!(alpha(&cx, 1, p).unwrap() <= bt.beta1[&p]);
            }
            let delta = alexander_poly(&cx, 1).unwrap();
            let m = mahler_measure(delta.poly(), DEFAULT_TOLERANCE).unwrap();
            assert!(bt.tau1.is_multiple_of(&m.exact.unwrap()));
            let at_one = strip_unit_roots_at_one(delta.poly()).unwrap().eval_at_one();
            assert!(bt.tau1.is_multiple_of(&at_one));
            if n.iter().sum::<i64>() != 0 {
                assert_eq!(at_one.magnitude(), bt.tau1.magnitude(), "{n:?}");
            }
        }
    }

    #[test]
    fn multinets() {
        let (arr, mn) = ceva(2).unwrap();
        let v = verify_multinet(&arr, &mn).unwrap();
        assert!(v.valid, "{v:?}");
        assert_eq!(v.kappa, Some(2));
        let cert = check_assumption_and_certificate(&arr, &mn).unwrap();
        assert!(cert.assumption_ok);
        assert_eq!(cert.nu, vec![1, 1, 1, 1, -2, -2]);
        assert_eq!(cert.tau1, Some(BigInt::one()));
        assert!(cert.no_parallel_component);

        let mut moved = mn.clone();
        let h = moved.classes[0].pop().unwrap();
        moved.classes[1].push(h);
        assert!(verify_multinet(&arr, &moved).unwrap().violated.contains(&'a'));

        let pencil =
            LineArrangement::from_integers(Ambient::P2, &[vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0]], None).unwrap();
        let mn = Multinet { classes: vec![vec![0], vec![1], vec![2]], weights: vec![1; 3], base_locus: vec![0] };
        assert!(verify_multinet(&pencil, &mn).unwrap().valid);

        let (arr3, mn3) = ceva(3).unwrap();
        assert!(verify_multinet(&arr3, &mn3).unwrap().valid);
        let cert = check_assumption_and_certificate(&arr3, &mn3).unwrap();
        assert!(!cert.assumption_ok);
        assert_eq!(cert.failed, Some('b'));
    }

    #[test]
    fn construction_helpers() {
        let (arr, ty) = deleted_monomial_arrangement(2).unwrap();
        assert_eq!((arr.len(), ty), (8, OrbifoldData::new(0, 2, vec![2]).unwrap()));
        assert_eq!(deleted_monomial_arrangement(3).unwrap().0.len(), 11);
        let chi = [2, 4, 1, 1, 5, 5, 6, 6];
        let mv = lift_multiplicity(&chi, 6, 2).unwrap();
        assert_eq!(mv.total, 30);
        assert_eq!(mv.m, vec![2, 4, 1, 1, 5, 5, 6, 6]);
        let mv = lift_multiplicity(&[0, 0, 0, 0], 3, 2).unwrap();
        assert_eq!(mv.m, vec![3, 3, 3, 6]);
        assert!(matches!(lift_multiplicity(&[1, 1], 3, 2), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn arrangement_json() {
        let arr = deleted_b3();
        let json = serde_json::to_string(&arr).unwrap();
        assert_eq!(serde_json::from_str::<LineArrangement>(&json).unwrap(), arr);
        let (c3, _) = ceva(3).unwrap();
        let back: LineArrangement = serde_json::from_str(&serde_json::to_string(&c3).unwrap()).unwrap();
        assert_eq!(back, c3);
        assert!(serde_json::from_str::<LineArrangement>(r#"{"ambient":"P2","lines":[[1,0]]}"#).is_err());
    }
}

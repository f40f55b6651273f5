//! Finitely presented groups, Fox free differential calculus, and the
//! chain complexes and twisted homology they induce.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::covers::EquivariantComplex;
use crate::error::{Error, Result};
use crate::exactlin::{self, LaurentMatrixZ, Matrix};
use crate::fields::{coprime_part, FieldElem, FieldSpec};
use crate::laurent::LaurentPolyZ;

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: usize,
    /// `1` or `-1`.
    pub exp: i8,
}

/// A freely reduced word in the generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Word from `(generator, power)` pairs; powers may be any integer.
    pub fn from_powers(powers: &[(usize, i64)]) -> Self {
        let mut w = Word::identity();
        for &(gen, e) in powers {
            let exp = if e > 0 { 1 } else { -1 };
            for _ in 0..e.unsigned_abs() {
                w.push(Letter { gen, exp });
            }
        }
        w
    }

    pub fn generator(gen: usize) -> Self {
        Word(vec![Letter { gen, exp: 1 }])
    }

    fn push(&mut self, l: Letter) {
        match self.0.last() {
            Some(last) if last.gen == l.gen && last.exp == -l.exp => {
                self.0.pop();
            }
            _ => self.0.push(l),
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut w = self.clone();
        for &l in &other.0 {
            w.push(l);
        }
        w
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| Letter { gen: l.gen, exp: -l.exp }).collect())
    }

    /// Commutator `a b a^-1 b^-1`.
    pub fn commutator(a: &Word, b: &Word) -> Word {
        a.concat(b).concat(&a.inverse()).concat(&b.inverse())
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.gen).max()
    }

    /// Image under a homomorphism to an abelian group written additively.
    pub fn abelian_image(&self, images: &[i64]) -> i64 {
        self.0.iter().map(|l| l.exp as i64 * images[l.gen]).sum()
    }

    /// Image under a homomorphism to the units of a field.
    pub fn evaluate(&self, values: &[FieldElem], one: &FieldElem) -> FieldElem {
        self.0.iter().fold(one.clone(), |acc, l| acc.mul(&values[l.gen].pow(l.exp as i64)))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            if l.exp == 1 {
                write!(f, "g{}", l.gen)?;
            } else {
                write!(f, "g{}^-1", l.gen)?;
            }
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<(usize, i64)> = self.0.iter().map(|l| (l.gen, l.exp as i64)).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(usize, i64)>::deserialize(d)?;
        if pairs.iter().any(|&(_, e)| e == 0) {
            return Err(serde::de::Error::custom("letter exponents must be nonzero"));
        }
        Ok(Word::from_powers(&pairs))
    }
}

/// A finite formal integer combination of words (an element of `Z[F]`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupRingElem(BTreeMap<Word, i64>);

impl GroupRingElem {
    pub fn zero() -> Self {
        GroupRingElem(BTreeMap::new())
    }

    pub fn word(w: Word) -> Self {
        let mut m = BTreeMap::new();
        m.insert(w, 1);
        GroupRingElem(m)
    }

    pub fn add_term(&mut self, w: Word, c: i64) {
        let e = self.0.entry(w.clone()).or_insert(0);
        *e += c;
        if *e == 0 {
            self.0.remove(&w);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.0 {
            out.add_term(w.clone(), *c);
        }
        out
    }

    /// Left multiplication by a word.
    pub fn left_mul(&self, u: &Word) -> Self {
        let mut out = GroupRingElem::zero();
        for (w, c) in &self.0 {
            out.add_term(u.concat(w), *c);
        }
        out
    }

    /// Right multiplication by a word.
    pub fn right_mul(&self, u: &Word) -> Self {
        let mut out = GroupRingElem::zero();
        for (w, c) in &self.0 {
            out.add_term(w.concat(u), *c);
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &i64)> {
        self.0.iter()
    }

    /// Image in `Z[t, t^-1]` under `g -> t^{images[g]}`.
    pub fn specialize(&self, images: &[i64]) -> LaurentPolyZ {
        self.0.iter().fold(LaurentPolyZ::zero(), |acc, (w, c)| {
            &acc + &LaurentPolyZ::monomial(BigInt::from(*c), w.abelian_image(images))
        })
    }

    /// Image in a field under a character.
    pub fn evaluate(&self, values: &[FieldElem], one: &FieldElem) -> FieldElem {
        self.0.iter().fold(FieldElem::zero(one.field()), |acc, (w, c)| {
            acc.add(&w.evaluate(values, one).mul(&FieldElem::from_i64(one.field(), *c)))
        })
    }
}

/// Fox derivative `dw/d(gen)`, determined by `d(uv) = du + u dv`,
/// `d(gen) = 1`, `d(gen^-1) = -gen^-1` and `d(other) = 0`.
pub fn fox_derivative(w: &Word, gen: usize) -> GroupRingElem {
    let mut out = GroupRingElem::zero();
    let mut prefix = Word::identity();
    for &l in &w.0 {
        if l.gen == gen {
            if l.exp == 1 {
                out.add_term(prefix.clone(), 1);
            } else {
                let mut p = prefix.clone();
                p.push(l);
                out.add_term(p, -1);
            }
        }
        prefix.push(l);
    }
    out
}

/// A finite presentation `<g_0, ..., g_{n-1} | relators>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupPresentation {
    #[serde(rename = "generators")]
    num_generators: usize,
    relators: Vec<Word>,
}

#[derive(Deserialize)]
struct RawPresentation {
    generators: usize,
    relators: Vec<Word>,
}

impl<'de> Deserialize<'de> for GroupPresentation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawPresentation::deserialize(d)?;
        GroupPresentation::new(raw.generators, raw.relators).map_err(serde::de::Error::custom)
    }
}

impl GroupPresentation {
    pub fn new(num_generators: usize, relators: Vec<Word>) -> Result<Self> {
        if num_generators == 0 {
            return Err(Error::InvalidInput("a presentation needs at least one generator".into()));
        }
        for (k, r) in relators.iter().enumerate() {
            if r.max_generator().is_some_and(|g| g >= num_generators) {
                return Err(Error::InvalidInput(format!("relator {k} uses a generator outside 0..{num_generators}")));
            }
        }
        Ok(GroupPresentation { num_generators, relators })
    }

    pub fn num_generators(&self) -> usize {
        self.num_generators
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// The Fox Jacobian, `jacobian[g][r] = d(relator r)/d(generator g)`.
    pub fn fox_jacobian(&self) -> Vec<Vec<GroupRingElem>> {
        (0..self.num_generators).map(|g| self.relators.iter().map(|r| fox_derivative(r, g)).collect()).collect()
    }
}

/// A homomorphism `G -> Z` given by generator images.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpimorphismToZ {
    pub images: Vec<i64>,
}

impl EpimorphismToZ {
    pub fn new(images: Vec<i64>) -> Self {
        EpimorphismToZ { images }
    }

    /// Checks that the map is well defined on `pres` and onto `Z`.
    pub fn validate(&self, pres: &GroupPresentation) -> Result<()> {
        if self.images.len() != pres.num_generators {
            return Err(Error::InvalidEpimorphism(format!(
                "{} images for {} generators",
                self.images.len(),
                pres.num_generators
            )));
        }
        for (k, r) in pres.relators.iter().enumerate() {
            if r.abelian_image(&self.images) != 0 {
                return Err(Error::InvalidEpimorphism(format!("relator {k} does not map to 0")));
            }
        }
        let g = self.images.iter().fold(0i64, |acc, &x| acc.gcd(&x));
        if g != 1 {
            return Err(Error::InvalidEpimorphism(format!("images generate {g}Z, not Z")));
        }
        Ok(())
    }
}

/// The presentation 2-complex of the infinite cyclic cover: ranks
/// `[1, #generators, #relators]`, `d1 = (t^{nu(g)} - 1)` and `d2` the
/// specialized Fox Jacobian.
pub fn equivariant_complex_from_presentation(
    pres: &GroupPresentation,
    nu: &EpimorphismToZ,
) -> Result<EquivariantComplex> {
    nu.validate(pres)?;
    let n = pres.num_generators;
    let d1 = LaurentMatrixZ::from_fn(1, n, |_, g| LaurentPolyZ::t_pow_minus_one(nu.images[g]));
    let jac = pres.fox_jacobian();
    let d2 = LaurentMatrixZ::from_fn(n, pres.relators.len(), |g, r| jac[g][r].specialize(&nu.images));
    EquivariantComplex::new(vec![1, n, pres.relators.len()], vec![d1, d2])
}

/// A rank-one local system: a nonzero field value per generator such that
/// every relator evaluates to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    pub field: Arc<FieldSpec>,
    pub values: Vec<FieldElem>,
}

impl Character {
    pub fn new(pres: &GroupPresentation, field: &Arc<FieldSpec>, values: Vec<FieldElem>) -> Result<Self> {
        let ch = Character { field: field.clone(), values };
        ch.validate(pres)?;
        Ok(ch)
    }

    pub fn validate(&self, pres: &GroupPresentation) -> Result<()> {
        if self.values.len() != pres.num_generators {
            return Err(Error::CharacterInvalid(format!(
                "{} values for {} generators",
                self.values.len(),
                pres.num_generators
            )));
        }
        if let Some(k) = self.values.iter().position(|v| v.is_zero()) {
            return Err(Error::CharacterInvalid(format!("value of generator {k} is zero")));
        }
        let one = FieldElem::one(&self.field);
        for (k, r) in pres.relators.iter().enumerate() {
            if !r.evaluate(&self.values, &one).is_one() {
                return Err(Error::CharacterInvalid(format!("relator {k} does not evaluate to 1")));
            }
        }
        Ok(())
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|v| v.is_one())
    }
}

/// Boundary maps of the presentation complex twisted by `rho`:
/// `(d2, d1)` with `d2` of size `#generators x #relators` and `d1` the row
/// `(rho(g) - 1)`.
pub fn specialize_character(
    pres: &GroupPresentation,
    rho: &Character,
) -> Result<(Matrix<FieldElem>, Matrix<FieldElem>)> {
    rho.validate(pres)?;
    let one = FieldElem::one(&rho.field);
    let jac = pres.fox_jacobian();
    let d2 = Matrix::from_fn(pres.num_generators, pres.relators.len(), |g, r| jac[g][r].evaluate(&rho.values, &one));
    let d1 = Matrix::from_fn(1, pres.num_generators, |_, g| rho.values[g].sub(&one));
    Ok((d2, d1))
}

/// `dim H_1` of the presentation complex with coefficients twisted by `rho`.
pub fn twisted_h1_dim(pres: &GroupPresentation, rho: &Character) -> Result<usize> {
    let (d2, d1) = specialize_character(pres, rho)?;
    Ok(pres.num_generators - exactlin::rank(&d1) - exactlin::rank(&d2))
}

/// An orbifold type `(g, r, mu)`: genus, number of punctures and the
/// orders of the cone points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbifoldData {
    pub g: usize,
    pub r: usize,
    pub mu: Vec<u64>,
}

impl OrbifoldData {
    pub fn new(g: usize, r: usize, mu: Vec<u64>) -> Result<Self> {
        let d = OrbifoldData { g, r, mu };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.g == 0 && self.r <= 1 {
            return Err(Error::InvalidType(format!("(g, r) = ({}, {}) is excluded", self.g, self.r)));
        }
        if let Some(m) = self.mu.iter().find(|&&m| m < 2) {
            return Err(Error::InvalidType(format!("cone order {m} must be at least 2")));
        }
        Ok(())
    }

    pub fn s(&self) -> usize {
        self.mu.len()
    }

    /// Number of free (or surface) generators before the cone generators.
    pub fn free_generators(&self) -> usize {
        if self.r > 0 {
            2 * self.g + self.r - 1
        } else {
            2 * self.g
        }
    }

    /// The epimorphism sending the first free or surface generator to 1
    /// and all other generators to 0.
    pub fn default_epimorphism(&self) -> EpimorphismToZ {
        let mut images = vec![0; self.free_generators() + self.s()];
        images[0] = 1;
        EpimorphismToZ::new(images)
    }

    pub fn mu_product(&self) -> BigInt {
        self.mu.iter().map(|&m| BigInt::from(m)).product()
    }
}

/// The orbifold fundamental group: `F_n * Z_{mu_1} * ... * Z_{mu_s}` with
/// `n = 2g + r - 1` when `r > 0`; otherwise generators
/// `x_1, y_1, ..., x_g, y_g, c_1, ..., c_s` with the surface relator
/// `[x_1, y_1] ... [x_g, y_g] c_1 ... c_s` first, then `c_j^{mu_j}`.
pub fn orbifold_presentation(d: &OrbifoldData) -> Result<GroupPresentation> {
    d.validate()?;
    let n = d.free_generators();
    let mut relators = Vec::new();
    if d.r == 0 {
        let mut surface = Word::identity();
        for i in 0..d.g {
            surface = surface.concat(&Word::commutator(&Word::generator(2 * i), &Word::generator(2 * i + 1)));
        }
        for j in 0..d.s() {
            surface = surface.concat(&Word::generator(n + j));
        }
        relators.push(surface);
    }
    for (j, &m) in d.mu.iter().enumerate() {
        relators.push(Word::from_powers(&[(n + j, m as i64)]));
    }
    GroupPresentation::new(n + d.s(), relators)
}

/// Number of cone coordinates `lambda_j = 1` with `p` not dividing `mu_j`
/// (every trivial coordinate counts in characteristic 0).
pub fn ell_count(lambdas: &[FieldElem], mu: &[u64], characteristic: u64) -> usize {
    lambdas.iter().zip(mu).filter(|(l, &m)| l.is_one() && (characteristic == 0 || m % characteristic != 0)).count()
}

/// Closed-form `dim H^1` of the orbifold group with coefficients in a rank
/// one local system, from whether the character is trivial and its count
/// `ell`.
pub fn orbifold_h1_dim_formula(d: &OrbifoldData, rho_trivial: bool, ell: usize, characteristic: u64) -> Result<usize> {
    d.validate()?;
    let s = d.s();
    if ell > s {
        return Err(Error::InvalidProfile(format!("ell = {ell} exceeds s = {s}")));
    }
    let coprime = d.mu.iter().filter(|&&m| coprime_part(m, characteristic) == m).count();
    if rho_trivial && ell != coprime {
        return Err(Error::InvalidProfile(format!("the trivial character has ell = {coprime}, not {ell}")));
    }
    let g2 = 2 * d.g;
    let value = match (d.r > 0, rho_trivial) {
        (true, true) => Some(g2 + d.r - 1 + s - ell),
        (true, false) => (g2 + d.r + s).checked_sub(2 + ell),
        (false, true) if ell == s => Some(g2),
        (false, true) => Some(g2 + s - 1 - ell),
        (false, false) => (g2 + s).checked_sub(2 + ell),
    };
    value.ok_or_else(|| Error::InvalidProfile("profile not realized by any character".into()))
}

//! Finite fields `F_q` with table-driven arithmetic, and the vector space `F_q^n`.
//!
//! Elements are identified with their canonical index in `0..q`. For a prime
//! field the index is the residue. For `q = p^k` with `k > 1` the index packs
//! the polynomial coefficients base `p`, constant term first, so that
//! `c_0 + c_1 x + ... + c_{k-1} x^{k-1}` has index `c_0 + c_1 p + ...`.
//! Products are reduced modulo the smallest monic irreducible polynomial of
//! degree `k` in the same packed order.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: usize = 256;

/// Default cap on the number of vectors any exhaustive scan may visit.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 10_000_000;

/// Largest supported dimension (coordinate sets are stored as `u32` masks).
pub const MAX_DIMENSION: usize = 32;

/// An element of `F_q`, by canonical index.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct FieldElement(u8);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Caller guarantees `index < q`.
    #[inline]
    pub(crate) fn from_index_unchecked(index: usize) -> Self {
        debug_assert!(index < MAX_ORDER);
        FieldElement(index as u8)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug)]
struct Tables {
    p: usize,
    k: usize,
    q: usize,
    /// Monic reduction polynomial, coefficients `c_0..=c_k`; empty for prime fields.
    modulus: Vec<usize>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

/// A finite field `F_q`, `q = p^k`. Cheap to clone.
#[derive(Clone)]
pub struct FieldSpec(Arc<Tables>);

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.0.q == other.0.q
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.q)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.k == 1 {
            write!(f, "F_{}", self.0.q)
        } else {
            write!(
                f,
                "F_{} = F_{}[x]/({})",
                self.0.q,
                self.0.p,
                self.modulus_string()
            )
        }
    }
}

/// Results of the basic field operations on a pair of elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Arithmetic {
    pub sum: FieldElement,
    pub difference: FieldElement,
    pub product: FieldElement,
    pub negation: FieldElement,
    /// Inverse of the first operand; `None` when it is zero.
    pub inverse: Option<FieldElement>,
}

impl FieldSpec {
    /// Builds `F_q`. Fails unless `q` is a prime power `<= MAX_ORDER`.
    pub fn new(q: usize) -> Result<Self> {
        if !(2..=MAX_ORDER).contains(&q) {
            return Err(Error::InvalidField(format!(
                "q = {q} outside 2..={MAX_ORDER}"
            )));
        }
        let p = smallest_prime_factor(q);
        let mut k = 0;
        let mut rest = q;
        while rest.is_multiple_of(p) {
            rest /= p;
            k += 1;
        }
        if rest != 1 {
            return Err(Error::InvalidField(format!("q = {q} is not a prime power")));
        }
        Self::prime_power(p, k)
    }

    pub fn prime_power(p: usize, k: usize) -> Result<Self> {
        if p < 2 || smallest_prime_factor(p) != p {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(Error::InvalidField(
                "extension degree must be at least 1".into(),
            ));
        }
        let q = p
            .checked_pow(k as u32)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or_else(|| Error::InvalidField(format!("{p}^{k} exceeds {MAX_ORDER}")))?;
        let modulus = if k == 1 {
            Vec::new()
        } else {
            find_irreducible(p, k)
        };
        Ok(FieldSpec(Arc::new(build_tables(p, k, q, modulus))))
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.0.p
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.0.k
    }

    #[inline]
    pub fn q(&self) -> usize {
        self.0.q
    }

    pub fn is_prime_field(&self) -> bool {
        self.0.k == 1
    }

    /// Reduction polynomial coefficients `c_0..=c_k`, `None` for a prime field.
    pub fn modulus(&self) -> Option<&[usize]> {
        (self.0.k > 1).then_some(self.0.modulus.as_slice())
    }

    /// Human-readable reduction polynomial, e.g. `x^2 + x + 1`.
    pub fn modulus_string(&self) -> String {
        match self.modulus() {
            None => format!("x - 0 (prime field, integers mod {})", self.0.p),
            Some(c) => poly_to_string(c),
        }
    }

    pub fn element(&self, index: usize) -> Result<FieldElement> {
        if index < self.0.q {
            Ok(FieldElement::from_index_unchecked(index))
        } else {
            Err(Error::ElementOutOfRange { index, q: self.0.q })
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.0.q).map(FieldElement::from_index_unchecked)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.0.add[a.index() * self.0.q + b.index()])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.0.mul[a.index() * self.0.q + b.index()])
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.0.neg[a.index()])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            Err(Error::InverseOfZero)
        } else {
            Ok(FieldElement(self.0.inv[a.index()]))
        }
    }

    /// All field operations on `(a, b)` at once.
    pub fn arithmetic(&self, a: FieldElement, b: FieldElement) -> Result<Arithmetic> {
        self.check(a)?;
        self.check(b)?;
        Ok(Arithmetic {
            sum: self.add(a, b),
            difference: self.sub(a, b),
            product: self.mul(a, b),
            negation: self.neg(a),
            inverse: self.inv(a).ok(),
        })
    }

    pub fn check(&self, a: FieldElement) -> Result<()> {
        if a.index() < self.0.q {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange {
                index: a.index(),
                q: self.0.q,
            })
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Accepts `9`, `3^2`, `q=9`, `q=3^2` and `9=3^2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.strip_prefix("q=").unwrap_or(s);
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad field specification {s:?}")))
        };
        let power = |t: &str| -> Result<FieldSpec> {
            match t.split_once('^') {
                Some((p, k)) => FieldSpec::prime_power(parse(p)?, parse(k)?),
                None => FieldSpec::new(parse(t)?),
            }
        };
        match s.split_once('=') {
            Some((q, pk)) => {
                let field = power(pk)?;
                if field.q() != parse(q)? {
                    return Err(Error::Parse(format!("{s:?}: q does not equal p^k")));
                }
                Ok(field)
            }
            None => power(s),
        }
    }
}

fn smallest_prime_factor(n: usize) -> usize {
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return d;
        }
        d += 1;
    }
    n
}

/// Coefficients base `p` of `index`, constant term first, length `k`.
fn digits(index: usize, p: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut x = index;
    for _ in 0..k {
        out.push(x % p);
        x /= p;
    }
    out
}

fn pack(coeffs: &[usize], p: usize) -> usize {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Remainder of `a` modulo the monic polynomial `m` over `F_p`.
fn poly_rem(a: &[usize], m: &[usize], p: usize) -> Vec<usize> {
    let deg_m = m.len() - 1;
    let mut r = a.to_vec();
    while r.len() > deg_m {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - deg_m;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p * p - lead * c % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn is_irreducible(f: &[usize], p: usize) -> bool {
    let k = f.len() - 1;
    for deg in 1..=k / 2 {
        for low in 0..p.pow(deg as u32) {
            let mut d = digits(low, p, deg);
            d.push(1);
            if poly_rem(f, &d, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Smallest monic irreducible polynomial of degree `k` over `F_p` in packed order.
fn find_irreducible(p: usize, k: usize) -> Vec<usize> {
    (0..p.pow(k as u32))
        .map(|low| {
            let mut f = digits(low, p, k);
            f.push(1);
            f
        })
        .find(|f| is_irreducible(f, p))
        .expect("an irreducible polynomial of every degree exists")
}

fn poly_to_string(c: &[usize]) -> String {
    let mut terms = Vec::new();
    for (i, &coeff) in c.iter().enumerate().rev() {
        if coeff == 0 {
            continue;
        }
        let var = match i {
            0 => String::new(),
            1 => "x".to_string(),
            _ => format!("x^{i}"),
        };
        terms.push(match (coeff, i) {
            (_, 0) => coeff.to_string(),
            (1, _) => var,
            _ => format!("{coeff}{var}"),
        });
    }
    terms.join(" + ")
}

fn build_tables(p: usize, k: usize, q: usize, modulus: Vec<usize>) -> Tables {
    let mut add = vec![0u8; q * q];
    let mut mul = vec![0u8; q * q];
    let digit_table: Vec<Vec<usize>> = (0..q).map(|a| digits(a, p, k)).collect();
    for a in 0..q {
        for b in 0..q {
            let da = &digit_table[a];
            let db = &digit_table[b];
            let sum: Vec<usize> = da.iter().zip(db).map(|(x, y)| (x + y) % p).collect();
            add[a * q + b] = pack(&sum, p) as u8;
            let product = if k == 1 {
                a * b % p
            } else {
                let mut prod = vec![0usize; 2 * k - 1];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut r = poly_rem(&prod, &modulus, p);
                r.resize(k, 0);
                pack(&r, p)
            };
            mul[a * q + b] = product as u8;
        }
    }
    let neg: Vec<u8> = (0..q)
        .map(|a| (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u8)
        .collect();
    let inv: Vec<u8> = (0..q)
        .map(|a| {
            if a == 0 {
                0
            } else {
                (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u8
            }
        })
        .collect();
    Tables {
        p,
        k,
        q,
        modulus,
        add,
        mul,
        neg,
        inv,
    }
}

/// An `n`-tuple over `F_q`. Coordinates are 0-based in the API.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<FieldElement>);

impl Vector {
    pub fn new(coords: Vec<FieldElement>) -> Self {
        Vector(coords)
    }

    pub fn coords(&self) -> &[FieldElement] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn into_coords(self) -> Vec<FieldElement> {
        self.0
    }

    /// Indices of nonzero coordinates as a bit mask.
    pub fn support_mask(&self) -> u32 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(0u32, |m, (i, _)| m | (1 << i))
    }

    /// Index of the last nonzero coordinate, if any.
    pub fn top(&self) -> Option<usize> {
        self.0.iter().rposition(|c| !c.is_zero())
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = FieldElement;
    fn index(&self, i: usize) -> &FieldElement {
        &self.0[i]
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// The ambient space `F_q^n`.
///
/// Vectors are ranked by `sum u_i q^i`, so the first coordinate varies fastest;
/// this is the enumeration order and the order used for canonical witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Space {
    field: FieldSpec,
    n: usize,
}

impl Space {
    pub fn new(field: FieldSpec, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_DIMENSION {
            return Err(Error::Domain(format!(
                "dimension {n} outside 1..={MAX_DIMENSION}"
            )));
        }
        Ok(Space { field, n })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `q^n`, or `None` on overflow.
    pub fn size(&self) -> Option<u64> {
        (self.field.q() as u64).checked_pow(self.n as u32)
    }

    /// `q^n` as long as it does not exceed `budget`.
    pub fn size_within(&self, budget: u64) -> Result<u64> {
        match self.size() {
            Some(s) if s <= budget => Ok(s),
            Some(s) => Err(Error::BudgetExceeded {
                requested: s as u128,
                limit: budget,
            }),
            None => Err(Error::BudgetExceeded {
                requested: (self.field.q() as u128).saturating_pow(self.n as u32),
                limit: budget,
            }),
        }
    }

    pub fn zero(&self) -> Vector {
        Vector(vec![FieldElement::ZERO; self.n])
    }

    /// Builds a vector from element indices.
    pub fn vector(&self, indices: &[usize]) -> Result<Vector> {
        if indices.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: indices.len(),
            });
        }
        indices
            .iter()
            .map(|&i| self.field.element(i))
            .collect::<Result<Vec<_>>>()
            .map(Vector)
    }

    pub fn check(&self, v: &Vector) -> Result<()> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        v.0.iter().try_for_each(|&c| self.field.check(c))
    }

    /// Unit vector `a * e_i`.
    pub fn unit(&self, i: usize, a: FieldElement) -> Vector {
        let mut v = self.zero();
        v.0[i] = a;
        v
    }

    pub fn add(&self, u: &Vector, v: &Vector) -> Vector {
        Vector(
            u.0.iter()
                .zip(&v.0)
                .map(|(&a, &b)| self.field.add(a, b))
                .collect(),
        )
    }

    pub fn sub(&self, u: &Vector, v: &Vector) -> Vector {
        Vector(
            u.0.iter()
                .zip(&v.0)
                .map(|(&a, &b)| self.field.sub(a, b))
                .collect(),
        )
    }

    pub fn neg(&self, u: &Vector) -> Vector {
        Vector(u.0.iter().map(|&a| self.field.neg(a)).collect())
    }

    pub fn scale(&self, lambda: FieldElement, u: &Vector) -> Vector {
        Vector(u.0.iter().map(|&a| self.field.mul(lambda, a)).collect())
    }

    pub fn rank(&self, v: &Vector) -> u64 {
        let q = self.field.q() as u64;
        v.0.iter()
            .rev()
            .fold(0u64, |acc, c| acc * q + c.index() as u64)
    }

    pub fn unrank(&self, mut rank: u64) -> Vector {
        let q = self.field.q() as u64;
        let mut coords = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            coords.push(FieldElement::from_index_unchecked((rank % q) as usize));
            rank /= q;
        }
        Vector(coords)
    }

    /// All `q^n` vectors in rank order, provided `q^n <= budget`.
    pub fn vectors(&self, budget: u64) -> Result<Vectors> {
        let total = self.size_within(budget)?;
        Ok(Vectors {
            q: self.field.q(),
            current: Some(self.zero()),
            remaining: total,
        })
    }
}

/// Iterator over `F_q^n` in rank order.
#[derive(Clone, Debug)]
pub struct Vectors {
    q: usize,
    current: Option<Vector>,
    remaining: u64,
}

impl Iterator for Vectors {
    type Item = Vector;

    fn next(&mut self) -> Option<Vector> {
        let out = self.current.take()?;
        self.remaining -= 1;
        if self.remaining > 0 {
            let mut next = out.clone();
            for c in next.0.iter_mut() {
                if c.index() + 1 < self.q {
                    *c = FieldElement::from_index_unchecked(c.index() + 1);
                    break;
                }
                *c = FieldElement::ZERO;
            }
            self.current = Some(next);
        }
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = if self.current.is_some() {
            self.remaining as usize
        } else {
            0
        };
        (left, Some(left))
    }
}

impl ExactSizeIterator for Vectors {}

/// Every vector of `F_q^n`, each exactly once, in rank order.
pub fn enumerate_vectors(field: &FieldSpec, n: usize, budget: u64) -> Result<Vectors> {
    Space::new(field.clone(), n)?.vectors(budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn el(f: &FieldSpec, i: usize) -> FieldElement {
        f.element(i).unwrap()
    }

    #[test]
    fn prime_field_examples() {
        let f5 = FieldSpec::new(5).unwrap();
        assert_eq!(f5.add(el(&f5, 2), el(&f5, 4)), el(&f5, 1));
        assert_eq!(f5.inv(el(&f5, 3)).unwrap(), el(&f5, 2));
        assert_eq!(f5.inv(FieldElement::ZERO), Err(Error::InverseOfZero));
    }

    #[test]
    fn f4_omega_squared_is_omega_plus_one() {
        let f4 = FieldSpec::new(4).unwrap();
        // x^2 + x + 1 is the only irreducible quadratic over F_2.
        assert_eq!(f4.modulus(), Some(&[1, 1, 1][..]));
        let omega = el(&f4, 2);
        // x * x = x^2 = x + 1, packed as 1 + 1*2 = 3.
        assert_eq!(f4.mul(omega, omega), el(&f4, 3));
    }

    #[test]
    fn chosen_moduli() {
        assert_eq!(FieldSpec::new(8).unwrap().modulus_string(), "x^3 + x + 1");
        assert_eq!(FieldSpec::new(9).unwrap().modulus_string(), "x^2 + 1");
        assert_eq!(FieldSpec::new(16).unwrap().modulus_string(), "x^4 + x + 1");
    }

    #[test]
    fn rejects_non_prime_powers() {
        assert!(FieldSpec::new(6).is_err());
        assert!(FieldSpec::new(1).is_err());
        assert!(FieldSpec::new(512).is_err());
        assert!(FieldSpec::prime_power(4, 2).is_err());
    }

    #[test]
    fn out_of_range_element() {
        let f5 = FieldSpec::new(5).unwrap();
        assert_eq!(
            f5.element(5),
            Err(Error::ElementOutOfRange { index: 5, q: 5 })
        );
        assert!(f5
            .arithmetic(FieldElement::from_index_unchecked(7), FieldElement::ONE)
            .is_err());
    }

    #[test]
    fn parse_field_strings() {
        for s in ["9", "3^2", "q=9", "q=3^2", "9=3^2"] {
            assert_eq!(s.parse::<FieldSpec>().unwrap().q(), 9, "{s}");
        }
        assert!("8=3^2".parse::<FieldSpec>().is_err());
        assert!("abc".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn field_axioms_exhaustive() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let f = FieldSpec::new(q).unwrap();
            let els: Vec<_> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), FieldElement::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
                }
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &els {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_order_and_counts() {
        let f2 = FieldSpec::new(2).unwrap();
        let all: Vec<String> = enumerate_vectors(&f2, 2, 100)
            .unwrap()
            .map(|v| v.to_string())
            .collect();
        assert_eq!(all, ["(0,0)", "(1,0)", "(0,1)", "(1,1)"]);
        assert_eq!(
            enumerate_vectors(&FieldSpec::new(3).unwrap(), 1, 100)
                .unwrap()
                .count(),
            3
        );
        let f5 = FieldSpec::new(5).unwrap();
        let it = enumerate_vectors(&f5, 3, 1000).unwrap();
        assert_eq!(it.len(), 125);
        let distinct: HashSet<Vector> = it.collect();
        assert_eq!(distinct.len(), 125);
    }

    #[test]
    fn budget_is_enforced() {
        let f5 = FieldSpec::new(5).unwrap();
        let err = enumerate_vectors(&f5, 3, 100).unwrap_err();
        assert_eq!(
            err,
            Error::BudgetExceeded {
                requested: 125,
                limit: 100
            }
        );
    }

    #[test]
    fn rank_roundtrip_matches_enumeration() {
        let space = Space::new(FieldSpec::new(4).unwrap(), 3).unwrap();
        for (i, v) in space.vectors(1000).unwrap().enumerate() {
            assert_eq!(space.rank(&v), i as u64);
            assert_eq!(space.unrank(i as u64), v);
        }
    }
}

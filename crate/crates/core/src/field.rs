//! Exact arithmetic in GF(p^k) for odd primes `p`.
//!
//! Elements are stored as the base-`p` integer encoding of their coefficient
//! vector over the polynomial basis `1, x, ..., x^{k-1}`: the element
//! `c_0 + c_1 x + ... + c_{k-1} x^{k-1}` is the integer `sum c_i p^i`.
//! Multiplication goes through discrete log tables when the field is small
//! enough and falls back to polynomial multiplication modulo the defining
//! polynomial otherwise.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 8;

/// Fields up to this size get exp/log tables.
const TABLE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("characteristic 2 is not supported")]
    EvenCharacteristic,
    #[error("extension degree {0} outside 1..={MAX_DEGREE}")]
    DegreeOutOfRange(u32),
    #[error("no irreducible polynomial of degree {k} found over GF({p})")]
    NoIrreducibleFound { p: u32, k: u32 },
    #[error("p = {p} divides m = {m}: no primitive m-th root of unity in characteristic p")]
    PDividesM { p: u64, m: u64 },
    #[error("GF({q}) has no element of multiplicative order {m}")]
    OrderUnavailable { q: u64, m: u64 },
    #[error("coefficient list has length {got}, expected {expected}")]
    BadCoefficients { got: usize, expected: usize },
}

/// An element of some [`Field`]. Only meaningful together with its field.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    /// The base-`p` encoding of the coefficient vector.
    pub fn raw(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Shared handle to a field; matrices and dual elements carry one of these.
pub type FieldRef = Arc<Field>;

/// The finite field GF(p^k) = GF(p)[x] / (modulus).
pub struct Field {
    p: u32,
    k: u32,
    q: u32,
    /// Monic modulus, `k + 1` coefficients, constant term first.
    modulus: Vec<u32>,
    /// A generator of the multiplicative group.
    generator: FieldElem,
    /// `exp[i] = generator^i` for `i < q - 1`; empty for large fields.
    exp: Vec<u32>,
    /// `log[a]` for nonzero `a`; empty for large fields.
    log: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.k)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for Field {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Least `k >= 1` with `m | p^k - 1`.
pub fn min_ext_degree(p: u64, m: u64) -> Result<u32, FieldError> {
    if m == 0 || m.is_multiple_of(p) {
        return Err(FieldError::PDividesM { p, m });
    }
    if m == 1 {
        return Ok(1);
    }
    let mut acc = p % m;
    let mut k = 1;
    while acc != 1 {
        acc = acc * (p % m) % m;
        k += 1;
    }
    Ok(k)
}

/// `C(s, m) mod p` by Lucas' theorem.
pub fn binom_mod_p(s: u64, m: u64, p: u64) -> u64 {
    if m > s {
        return 0;
    }
    let (mut s, mut m) = (s, m);
    let mut acc = 1;
    while m > 0 || s > 0 {
        let (sd, md) = (s % p, m % p);
        if md > sd {
            return 0;
        }
        acc = acc * small_binom_mod(sd, md, p) % p;
        s /= p;
        m /= p;
    }
    acc
}

/// `C(a, b) mod p` for `b <= a < p`, via the multiplicative formula.
fn small_binom_mod(a: u64, b: u64, p: u64) -> u64 {
    let mut num = 1;
    let mut den = 1;
    for i in 0..b {
        num = num * ((a - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    num * pow_mod(den, p - 2, p) % p
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

// Dense polynomials over GF(p), constant term first, no trailing zeros.

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = pow_mod(b[db] as u64, p as u64 - 2, p as u64);
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = r[r.len() - 1] as u64 * lead_inv % p as u64;
        for (i, &bi) in b.iter().enumerate() {
            let t = (c * bi as u64) % p as u64;
            let slot = &mut r[shift + i];
            *slot = ((*slot as u64 + p as u64 - t) % p as u64) as u32;
        }
        poly_trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    let prod: Vec<u32> = prod.into_iter().map(|v| v as u32).collect();
    poly_rem(&prod, m, p)
}

fn poly_gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Ben-Or irreducibility test for a monic polynomial of degree `k`:
/// `gcd(x^{p^i} - x, f) = 1` for every `i <= k / 2`.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let k = f.len() - 1;
    if k == 1 {
        return true;
    }
    if f[0] == 0 {
        return false;
    }
    let x = vec![0, 1];
    let mut xp = x.clone();
    for _ in 0..k / 2 {
        // xp <- xp^p mod f
        let mut acc = vec![1u32];
        let mut base = xp.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&acc, &base, f, p);
            }
            base = poly_mulmod(&base, &base, f, p);
            e >>= 1;
        }
        xp = acc;
        let mut diff = xp.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        poly_trim(&mut diff);
        if diff.is_empty() {
            return false;
        }
        let g = poly_gcd(f, &diff, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

impl Field {
    /// GF(p^k) with the lexicographically least monic irreducible modulus,
    /// where coefficient vectors are compared from the `x^{k-1}` coefficient
    /// down to the constant term.
    pub fn new(p: u32, k: u32) -> Result<FieldRef, FieldError> {
        if p == 2 {
            return Err(FieldError::EvenCharacteristic);
        }
        if !is_prime(p as u64) {
            return Err(FieldError::NonPrime(p as u64));
        }
        if k == 0 || k > MAX_DEGREE {
            return Err(FieldError::DegreeOutOfRange(k));
        }
        let q = (p as u64).pow(k);
        if q > u32::MAX as u64 {
            return Err(FieldError::DegreeOutOfRange(k));
        }
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            (0..q)
                .map(|t| {
                    let mut f = Vec::with_capacity(k as usize + 1);
                    let mut t = t;
                    for _ in 0..k {
                        f.push((t % p as u64) as u32);
                        t /= p as u64;
                    }
                    f.push(1);
                    f
                })
                .find(|f| is_irreducible(f, p))
                .ok_or(FieldError::NoIrreducibleFound { p, k })?
        };
        let mut field = Field {
            p,
            k,
            q: q as u32,
            modulus,
            generator: FieldElem::ONE,
            exp: Vec::new(),
            log: Vec::new(),
        };
        field.generator = field.find_generator();
        if q <= TABLE_LIMIT {
            let mut exp = Vec::with_capacity(q as usize - 1);
            let mut log = vec![0u32; q as usize];
            let mut acc = FieldElem::ONE;
            for i in 0..q as u32 - 1 {
                exp.push(acc.0);
                log[acc.0 as usize] = i;
                acc = field.mul_slow(acc, field.generator);
            }
            field.exp = exp;
            field.log = log;
        }
        Ok(Arc::new(field))
    }

    fn find_generator(&self) -> FieldElem {
        let order = self.q as u64 - 1;
        let factors = prime_factors(order);
        (1..self.q)
            .map(FieldElem)
            .find(|&g| factors.iter().all(|&r| self.pow_slow(g, order / r) != FieldElem::ONE))
            .expect("multiplicative group of a finite field is cyclic")
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> FieldElem {
        self.generator
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }

    pub fn one(&self) -> FieldElem {
        FieldElem::ONE
    }

    /// Image of an integer under Z -> GF(p) -> GF(p^k).
    pub fn from_int(&self, v: i64) -> FieldElem {
        FieldElem(v.rem_euclid(self.p as i64) as u32)
    }

    /// Element from its coefficient vector (constant term first, length `k`).
    pub fn from_coeffs(&self, coeffs: &[i64]) -> Result<FieldElem, FieldError> {
        if coeffs.len() != self.k as usize {
            return Err(FieldError::BadCoefficients { got: coeffs.len(), expected: self.k as usize });
        }
        let mut v = 0u32;
        for &c in coeffs.iter().rev() {
            v = v * self.p + c.rem_euclid(self.p as i64) as u32;
        }
        Ok(FieldElem(v))
    }

    pub fn coeffs(&self, a: FieldElem) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.k as usize);
        let mut v = a.0;
        for _ in 0..self.k {
            out.push(v % self.p);
            v /= self.p;
        }
        out
    }

    /// Element with raw encoding `v`, which must be `< q`.
    pub fn elem(&self, v: u32) -> FieldElem {
        assert!(v < self.q, "raw value {v} out of range for {self:?}");
        FieldElem(v)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q).map(FieldElem)
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.k == 1 {
            let s = a.0 + b.0;
            return FieldElem(if s >= self.p { s - self.p } else { s });
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.k {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * scale;
            scale *= self.p;
            x /= self.p;
            y /= self.p;
        }
        FieldElem(out)
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if self.k == 1 {
            return FieldElem(if a.0 == 0 { 0 } else { self.p - a.0 });
        }
        let mut x = a.0;
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.k {
            let d = (self.p - x % self.p) % self.p;
            out += d * scale;
            scale *= self.p;
            x /= self.p;
        }
        FieldElem(out)
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        if self.k == 1 {
            return FieldElem(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32);
        }
        if !self.log.is_empty() {
            let n = self.q - 1;
            let l = self.log[a.0 as usize] + self.log[b.0 as usize];
            return FieldElem(self.exp[(if l >= n { l - n } else { l }) as usize]);
        }
        self.mul_slow(a, b)
    }

    fn mul_slow(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let pa = self.coeffs(a);
        let pb = self.coeffs(b);
        let r = poly_mulmod(&pa, &pb, &self.modulus, self.p);
        let mut v = 0u32;
        for &c in r.iter().rev() {
            v = v * self.p + c;
        }
        FieldElem(v)
    }

    fn pow_slow(&self, a: FieldElem, mut e: u64) -> FieldElem {
        let mut acc = FieldElem::ONE;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        if e == 0 {
            return FieldElem::ONE;
        }
        if a.0 == 0 {
            return FieldElem::ZERO;
        }
        if !self.log.is_empty() {
            let n = (self.q - 1) as u64;
            let l = (self.log[a.0 as usize] as u64 * (e % n)) % n;
            return FieldElem(self.exp[l as usize]);
        }
        let mut acc = FieldElem::ONE;
        let mut base = a;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FieldElem) -> Option<FieldElem> {
        if a.0 == 0 {
            return None;
        }
        if !self.log.is_empty() {
            let n = self.q - 1;
            let l = self.log[a.0 as usize];
            return Some(FieldElem(self.exp[((n - l) % n) as usize]));
        }
        Some(self.pow(a, self.q as u64 - 2))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Option<FieldElem> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: FieldElem) -> Option<u64> {
        if a.is_zero() {
            return None;
        }
        let mut order = self.q as u64 - 1;
        for r in prime_factors(order) {
            while order.is_multiple_of(r) && self.pow(a, order / r) == FieldElem::ONE {
                order /= r;
            }
        }
        Some(order)
    }

    /// A primitive `m`-th root of unity: `generator^{(q-1)/m}`.
    pub fn root_of_unity(&self, m: u64) -> Result<FieldElem, FieldError> {
        let n = self.q as u64 - 1;
        if m == 0 || !n.is_multiple_of(m) {
            return Err(FieldError::OrderUnavailable { q: self.q as u64, m });
        }
        Ok(self.pow(self.generator, n / m))
    }

    /// All `x` with `x^m = 1`.
    pub fn roots_of_unity(&self, m: u64) -> Vec<FieldElem> {
        let d = gcd(m, self.q as u64 - 1);
        let w = self.pow(self.generator, (self.q as u64 - 1) / d);
        let mut out: Vec<FieldElem> = (0..d).map(|i| self.pow(w, i)).collect();
        out.sort();
        out
    }

    pub fn display(&self, a: FieldElem) -> String {
        if self.k == 1 {
            a.0.to_string()
        } else {
            format!("{:?}", self.coeffs(a))
        }
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Convenience constructor matching the usual `build_field(p, k)` call shape.
pub fn build_field(p: u32, k: u32) -> Result<FieldRef, FieldError> {
    Field::new(p, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_basics() {
        let f = build_field(5, 1).unwrap();
        assert_eq!(f.mul(f.from_int(2), f.from_int(3)), f.one());
        let f3 = build_field(3, 1).unwrap();
        assert_eq!(f3.add(f3.from_int(1), f3.from_int(2)), f3.zero());
    }

    #[test]
    fn rejects_bad_characteristic() {
        assert_eq!(build_field(2, 1).unwrap_err(), FieldError::EvenCharacteristic);
        assert_eq!(build_field(9, 1).unwrap_err(), FieldError::NonPrime(9));
        assert_eq!(build_field(5, 0).unwrap_err(), FieldError::DegreeOutOfRange(0));
        assert_eq!(build_field(5, 9).unwrap_err(), FieldError::DegreeOutOfRange(9));
    }

    #[test]
    fn gf25_every_nonzero_element_invertible() {
        let f = build_field(5, 2).unwrap();
        let units: Vec<_> = f.elements().filter(|a| !a.is_zero()).collect();
        assert_eq!(units.len(), 24);
        for a in units {
            let ai = f.inv(a).unwrap();
            assert_eq!(f.mul(a, ai), f.one());
        }
    }

    #[test]
    fn modulus_is_least_irreducible() {
        // Over GF(5), -1 is a square and -2 is not, so x^2 + 2 comes first.
        let f = build_field(5, 2).unwrap();
        assert_eq!(f.modulus(), &[2, 0, 1]);
        // over GF(3): x^2 + 1 is irreducible (-1 is a non-residue).
        let f = build_field(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
        // x^3 + 2x + 1 is the least irreducible cubic over GF(3) in this order.
        let f = build_field(3, 3).unwrap();
        assert_eq!(f.modulus(), &[1, 2, 0, 1]);
    }

    #[test]
    fn slow_and_table_paths_agree() {
        let f = build_field(3, 3).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(f.mul(a, b), f.mul_slow(a, b));
            }
        }
    }

    #[test]
    fn large_field_without_tables() {
        let f = build_field(7, 8).unwrap();
        assert!(f.log.is_empty());
        let a = f.elem(12345);
        let ai = f.inv(a).unwrap();
        assert_eq!(f.mul(a, ai), f.one());
        assert_eq!(f.pow(f.generator(), f.order() as u64 - 1), f.one());
    }

    #[test]
    fn ext_degree_examples() {
        assert_eq!(min_ext_degree(5, 2), Ok(1));
        assert_eq!(min_ext_degree(5, 3), Ok(2));
        assert_eq!(min_ext_degree(3, 3), Err(FieldError::PDividesM { p: 3, m: 3 }));
        assert_eq!(min_ext_degree(3, 16), Ok(4));
    }

    #[test]
    fn roots_of_unity_examples() {
        let f = build_field(5, 1).unwrap();
        assert_eq!(f.root_of_unity(2).unwrap(), f.from_int(4));
        let i = f.root_of_unity(4).unwrap();
        assert!(i == f.from_int(2) || i == f.from_int(3));
        assert_eq!(f.root_of_unity(3), Err(FieldError::OrderUnavailable { q: 5, m: 3 }));
        let g = build_field(5, 2).unwrap();
        let w = g.root_of_unity(3).unwrap();
        assert_eq!(g.mult_order(w), Some(3));
        assert_eq!(g.roots_of_unity(3).len(), 3);
    }

    #[test]
    fn binom_examples() {
        assert_eq!(binom_mod_p(4, 3, 3), 1);
        assert_eq!(binom_mod_p(7, 3, 5), 0);
        for s in 0..30 {
            assert_eq!(binom_mod_p(s, 0, 7), 1);
        }
    }

    #[test]
    fn lucas_matches_pascal_triangle() {
        for p in [3u64, 5] {
            let mut row = vec![1u64];
            for s in 0..=64u64 {
                for (m, &c) in row.iter().enumerate() {
                    assert_eq!(binom_mod_p(s, m as u64, p), c, "C({s},{m}) mod {p}");
                }
                assert_eq!(binom_mod_p(s, s + 1, p), 0);
                let mut next = vec![1u64; row.len() + 1];
                for m in 1..row.len() {
                    next[m] = (row[m - 1] + row[m]) % p;
                }
                row = next;
            }
        }
    }

    #[test]
    fn exhaustive_prime_field_axioms() {
        for p in [3u32, 5, 7] {
            let f = build_field(p, 1).unwrap();
            let els: Vec<_> = f.elements().collect();
            for &a in &els {
                for &b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for &c in &els {
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
                assert_eq!(f.add(a, f.neg(a)), f.zero());
            }
        }
    }

    #[test]
    fn random_triples_in_extension_fields() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(25);
        for (p, k) in [(5, 2), (3, 3)] {
            let f = build_field(p, k).unwrap();
            let q = f.order();
            for _ in 0..500 {
                let [a, b, c] = [0; 3].map(|_| f.elem(rng.gen_range(0..q)));
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn frobenius_is_additive(pk in proptest::sample::select(vec![(3u32, 2u32), (5, 2), (3, 3), (7, 2)]), a in 0u32.., b in 0u32..) {
            let (p, k) = pk;
            let f = build_field(p, k).unwrap();
            let q = f.order();
            let (a, b) = (f.elem(a % q), f.elem(b % q));
            let fr = |x| f.pow(x, p as u64);
            proptest::prop_assert_eq!(fr(f.add(a, b)), f.add(fr(a), fr(b)));
            proptest::prop_assert_eq!(fr(f.mul(a, b)), f.mul(fr(a), fr(b)));
            proptest::prop_assert_eq!(f.pow(a, f.order() as u64), a);
        }
    }
}

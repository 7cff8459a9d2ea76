//! Exact arithmetic in GF(p^r) through discrete-logarithm tables.
//!
//! Elements are handled as [`Elem`], the base-p integer encoding of the
//! coordinate vector `(a_0, ..., a_{r-1})` of `a_0 + a_1 x + ... + a_{r-1} x^{r-1}`.
//! That encoding doubles as the vertex index of every colored graph and as
//! the coordinate vector acted on by matrices. Multiplicative structure is
//! exponent arithmetic through the `log`/`antilog` tables relative to a
//! fixed primitive root.

use std::ops::{Add, BitXor};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 24;

const NO_LOG: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Characteristic, degree and monic modulus `[c_0, ..., c_{r-1}, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub r: u32,
    pub poly: Vec<u32>,
}

/// JSON description of a realized field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub p: u32,
    pub r: u32,
    pub poly: Vec<u32>,
    pub omega: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct FieldTable {
    spec: FieldSpec,
    q: u32,
    omega: Elem,
    log: Vec<u32>,
    antilog: Vec<u32>,
    neg: Vec<u32>,
    place: Vec<u32>,
}

impl PartialEq for FieldTable {
    fn eq(&self, other: &Self) -> bool {
        self.spec == other.spec && self.omega == other.omega
    }
}

impl Eq for FieldTable {}

/// Builds GF(p^r). With no modulus the smallest monic irreducible of
/// degree `r` is used. The primitive root is `x` when `x` is primitive,
/// otherwise the primitive element with the smallest encoding.
pub fn build_field(p: u32, r: u32, poly: Option<&[u32]>) -> Result<FieldTable> {
    FieldTable::build(p, r, poly, None)
}

/// Like [`build_field`] but with an explicitly chosen primitive root,
/// given by its coordinates.
pub fn build_field_with_root(
    p: u32,
    r: u32,
    poly: Option<&[u32]>,
    omega: &[u32],
) -> Result<FieldTable> {
    FieldTable::build(p, r, poly, Some(omega))
}

pub fn is_irreducible(p: u32, poly: &[u32]) -> bool {
    poly::is_irreducible(p, poly)
}

impl FieldTable {
    fn build(p: u32, r: u32, poly: Option<&[u32]>, omega: Option<&[u32]>) -> Result<Self> {
        if !poly::is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if r == 0 {
            return Err(Error::InvalidModulus("degree must be at least 1".into()));
        }
        let q = (p as u64)
            .checked_pow(r)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or(Error::FieldTooLarge { p, r })?;
        let modulus = match poly {
            Some(c) => {
                if c.len() != r as usize + 1 {
                    return Err(Error::InvalidModulus(format!(
                        "expected {} coefficients, got {}",
                        r + 1,
                        c.len()
                    )));
                }
                if c[r as usize] != 1 {
                    return Err(Error::InvalidModulus("modulus must be monic".into()));
                }
                if c.iter().any(|&x| x >= p) {
                    return Err(Error::InvalidModulus(format!("coefficients must lie in 0..{p}")));
                }
                if !poly::is_irreducible(p, c) {
                    return Err(Error::ModulusReducible { p });
                }
                c.to_vec()
            }
            None => poly::smallest_irreducible(p, r),
        };
        let place: Vec<u32> = (0..=r).map(|i| p.pow(i)).collect();
        let q = q as u32;
        let mut table = FieldTable {
            spec: FieldSpec { p, r, poly: modulus },
            q,
            omega: Elem::ONE,
            log: Vec::new(),
            antilog: Vec::new(),
            neg: Vec::new(),
            place,
        };
        let factors = poly::prime_factors(q as u64 - 1);
        let omega = match omega {
            Some(coords) => {
                let w = table.from_coeffs(coords)?;
                if !table.slow_is_primitive(w, &factors) {
                    return Err(Error::NotPrimitive);
                }
                w
            }
            None => {
                let x = Elem(if r > 1 { p } else { 0 });
                if r > 1 && table.slow_is_primitive(x, &factors) {
                    x
                } else {
                    (1..q)
                        .map(Elem)
                        .find(|&w| table.slow_is_primitive(w, &factors))
                        .expect("multiplicative group of a finite field is cyclic")
                }
            }
        };
        table.omega = omega;
        table.fill_tables();
        Ok(table)
    }

    fn fill_tables(&mut self) {
        let q = self.q as usize;
        let mut log = vec![NO_LOG; q];
        let mut antilog = vec![0u32; q - 1];
        let mut cur = Elem::ONE;
        for (i, slot) in antilog.iter_mut().enumerate() {
            *slot = cur.0;
            log[cur.0 as usize] = i as u32;
            cur = self.slow_mul(cur, self.omega);
        }
        debug_assert_eq!(cur, Elem::ONE);
        self.log = log;
        self.antilog = antilog;
        self.neg = (0..self.q).map(|a| self.slow_neg(Elem(a)).0).collect();
    }

    fn slow_neg(&self, a: Elem) -> Elem {
        let p = self.spec.p;
        let coeffs: Vec<u32> = self.coeffs(a).iter().map(|&c| (p - c) % p).collect();
        self.encode(&coeffs)
    }

    /// Schoolbook multiplication modulo the field polynomial; used only
    /// while the log tables are being built.
    fn slow_mul(&self, a: Elem, b: Elem) -> Elem {
        let p = self.spec.p as u64;
        let r = self.spec.r as usize;
        let ca = self.coeffs(a);
        let cb = self.coeffs(b);
        let mut prod = vec![0u64; 2 * r];
        for i in 0..r {
            if ca[i] == 0 {
                continue;
            }
            for j in 0..r {
                prod[i + j] = (prod[i + j] + ca[i] as u64 * cb[j] as u64) % p;
            }
        }
        for top in (r..2 * r).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for i in 0..r {
                let sub = c * self.spec.poly[i] as u64 % p;
                prod[top - r + i] = (prod[top - r + i] + p - sub) % p;
            }
        }
        let coeffs: Vec<u32> = prod[..r].iter().map(|&c| c as u32).collect();
        self.encode(&coeffs)
    }

    fn slow_pow(&self, a: Elem, mut exp: u64) -> Elem {
        let mut acc = Elem::ONE;
        let mut base = a;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            exp >>= 1;
        }
        acc
    }

    fn slow_is_primitive(&self, a: Elem, factors: &[u64]) -> bool {
        if a.is_zero() {
            return false;
        }
        let n = self.q as u64 - 1;
        factors.iter().all(|&l| self.slow_pow(a, n / l) != Elem::ONE)
    }

    fn encode(&self, coeffs: &[u32]) -> Elem {
        Elem(coeffs
            .iter()
            .zip(&self.place)
            .map(|(&c, &w)| c * w)
            .sum())
    }

    pub fn p(&self) -> u32 {
        self.spec.p
    }

    pub fn r(&self) -> u32 {
        self.spec.r
    }

    /// Number of elements.
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Order of the multiplicative group, q - 1.
    pub fn order(&self) -> u32 {
        self.q - 1
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn omega(&self) -> Elem {
        self.omega
    }

    pub fn record(&self) -> FieldRecord {
        FieldRecord {
            p: self.spec.p,
            r: self.spec.r,
            poly: self.spec.poly.clone(),
            omega: self.coeffs(self.omega),
        }
    }

    pub fn from_record(rec: &FieldRecord) -> Result<Self> {
        build_field_with_root(rec.p, rec.r, Some(&rec.poly), &rec.omega)
    }

    /// Coordinates `(a_0, ..., a_{r-1})`.
    pub fn coeffs(&self, a: Elem) -> Vec<u32> {
        let p = self.spec.p;
        let mut v = a.0;
        (0..self.spec.r)
            .map(|_| {
                let c = v % p;
                v /= p;
                c
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Elem> {
        if coeffs.len() != self.spec.r as usize {
            return Err(Error::DimensionMismatch(format!(
                "expected {} coordinates, got {}",
                self.spec.r,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|&c| c >= self.spec.p) {
            return Err(Error::InvalidConfig(format!(
                "coordinates must lie in 0..{}",
                self.spec.p
            )));
        }
        Ok(self.encode(coeffs))
    }

    /// The coordinate of `a` at basis position `i`.
    pub fn digit(&self, a: Elem, i: usize) -> u32 {
        a.0 / self.place[i] % self.spec.p
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q).map(Elem)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = Elem> {
        (1..self.q).map(Elem)
    }

    /// Nonzero elements in order of increasing discrete logarithm.
    pub fn powers(&self) -> impl Iterator<Item = Elem> + '_ {
        self.antilog.iter().map(|&a| Elem(a))
    }

    pub fn dlog(&self, a: Elem) -> Result<u32> {
        match self.log[a.0 as usize] {
            NO_LOG => Err(Error::ZeroHasNoLog),
            e => Ok(e),
        }
    }

    /// `omega^exp`, exponent taken modulo q - 1.
    pub fn antilog(&self, exp: u64) -> Elem {
        Elem(self.antilog[(exp % self.order() as u64) as usize])
    }

    pub fn log_table(&self) -> &[u32] {
        &self.log
    }

    pub fn antilog_table(&self) -> &[u32] {
        &self.antilog
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let p = self.spec.p;
        if p == 2 {
            return Elem(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0;
        let mut w = 1;
        while x > 0 || y > 0 {
            out += (x % p + y % p) % p * w;
            w *= p;
            x /= p;
            y /= p;
        }
        Elem(out)
    }

    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.0 as usize])
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a.is_zero() || b.is_zero() {
            return Elem::ZERO;
        }
        let n = self.order() as u64;
        let e = (self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64) % n;
        Elem(self.antilog[e as usize])
    }

    /// Multiplication by an element of the prime subfield.
    pub fn scale(&self, c: u32, a: Elem) -> Elem {
        let p = self.spec.p;
        let c = c % p;
        if c == 0 {
            return Elem::ZERO;
        }
        let coeffs: Vec<u32> = self.coeffs(a).iter().map(|&x| x * c % p).collect();
        self.encode(&coeffs)
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.order() as u64;
        let e = (n - self.log[a.0 as usize] as u64) % n;
        Ok(Elem(self.antilog[e as usize]))
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, exp: u64) -> Elem {
        if a.is_zero() {
            return if exp == 0 { Elem::ONE } else { Elem::ZERO };
        }
        let n = self.order() as u64;
        let e = (self.log[a.0 as usize] as u64 % n) * (exp % n) % n;
        Elem(self.antilog[e as usize])
    }

    /// `a^{p^s}`.
    pub fn frobenius(&self, a: Elem, s: u32) -> Elem {
        if a.is_zero() {
            return a;
        }
        let n = self.order() as u64;
        let mut mult = 1u64;
        for _ in 0..(s % self.spec.r) {
            mult = mult * self.spec.p as u64 % n;
        }
        let e = self.log[a.0 as usize] as u64 * mult % n;
        Elem(self.antilog[e as usize])
    }

    /// True when the field is GF(2^r) with r <= 8, i.e. elements fit in a byte
    /// and addition is exclusive-or.
    pub fn is_byte_field(&self) -> bool {
        self.spec.p == 2 && self.spec.r <= 8
    }

    pub fn byte(&self, a: Elem) -> Option<Byte> {
        self.is_byte_field().then_some(Byte(a.0 as u8))
    }

    pub fn byte_mul(&self, a: Byte, b: Byte) -> Byte {
        Byte(self.mul(Elem(a.0 as u32), Elem(b.0 as u32)).0 as u8)
    }
}

/// A GF(2^r), r <= 8, element as a byte: bit i is the coefficient of x^i.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Byte(pub u8);

impl Add for Byte {
    type Output = Byte;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Byte) -> Byte {
        Byte(self.0 ^ rhs.0)
    }
}

impl BitXor for Byte {
    type Output = Byte;

    fn bitxor(self, rhs: Byte) -> Byte {
        Byte(self.0 ^ rhs.0)
    }
}

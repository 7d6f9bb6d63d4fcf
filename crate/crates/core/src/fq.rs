//! Exact arithmetic and element indexing for the vector space F_q^n.
//!
//! Elements are flat indices in `[0, q^n)` read as little-endian base-q
//! digit vectors; digits are extracted on the fly so universes of
//! millions of elements iterate cheaply. For non-prime `q = p^e` the
//! digit arithmetic runs on tables built from the least irreducible
//! monic polynomial of degree `e` over F_p (least in the integer
//! encoding of its coefficient vector), so runs are deterministic
//! across platforms.
//!
//! Characteristic gates live here: 3-AP operations need p >= 3 and
//! 4-AP operations need p >= 5, because x = x + 2d in characteristic 2
//! and x = x + 3d in characteristic 3.

use crate::error::{Error, Result};
use std::sync::Arc;

/// Largest `q` for which extension-field digit tables are built.
const MAX_TABLE_Q: u64 = 256;

/// An element of F_q^n, carried as its flat index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem(pub u64);

#[derive(Debug)]
pub(crate) struct DigitTables {
    pub add: Vec<u8>, // q*q, (x, y) -> x + y
    pub sub: Vec<u8>, // q*q, (x, y) -> x - y
    pub mul: Vec<u8>, // q*q field multiplication
}

/// The ambient vector space F_q^n.
#[derive(Clone, Debug)]
pub struct FieldSpace {
    q: u64,
    p_char: u64,
    ext_degree: u32,
    n: u32,
    size: u64,
    /// Integer encoding of the irreducible modulus (base-p digits = coefficients),
    /// `None` for prime q.
    modulus: Option<u64>,
    tables: Option<Arc<DigitTables>>,
}

impl PartialEq for FieldSpace {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q && self.n == other.n
    }
}
impl Eq for FieldSpace {}

/// Decompose `q` as `p^e` with `p` prime, or fail.
fn prime_power(q: u64) -> Result<(u64, u32)> {
    if q < 2 {
        return Err(Error::NotPrimePower(q));
    }
    let mut p = 0u64;
    let mut m = q;
    let mut d = 2u64;
    while d * d <= m {
        if m % d == 0 {
            p = d;
            while m % d == 0 {
                m /= d;
            }
            break;
        }
        d += 1;
    }
    if p == 0 {
        // q itself is prime
        return Ok((q, 1));
    }
    if m != 1 {
        return Err(Error::NotPrimePower(q));
    }
    let mut e = 0u32;
    let mut acc = 1u64;
    while acc < q {
        acc *= p;
        e += 1;
    }
    debug_assert_eq!(acc, q);
    Ok((p, e))
}

// --- polynomial helpers over F_p on little-endian coefficient vectors ---

fn poly_from_int(mut v: u64, p: u64) -> Vec<u64> {
    let mut c = Vec::new();
    while v > 0 {
        c.push(v % p);
        v /= p;
    }
    c
}

fn poly_deg(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

/// Remainder of `a` divided by monic `b` over F_p.
fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let db = poly_deg(b).expect("divisor is nonzero");
    debug_assert_eq!(b[db], 1, "divisor must be monic");
    let mut r = a.to_vec();
    while let Some(dr) = poly_deg(&r) {
        if dr < db {
            break;
        }
        let coef = r[dr];
        let shift = dr - db;
        for i in 0..=db {
            let t = (coef * b[i]) % p;
            r[i + shift] = (r[i + shift] + p - t) % p;
        }
    }
    r
}

fn poly_is_irreducible(f: &[u64], p: u64) -> bool {
    let e = poly_deg(f).unwrap();
    for d in 1..=e / 2 {
        // all monic polynomials of degree d
        let count = p.pow(d as u32);
        for k in 0..count {
            let mut g = poly_from_int(k, p);
            g.resize(d + 1, 0);
            g[d] = 1;
            let r = poly_rem(f, &g, p);
            if poly_deg(&r).is_none() {
                return false;
            }
        }
    }
    true
}

/// Least (by integer encoding) monic irreducible polynomial of degree `e` over F_p.
fn least_irreducible(p: u64, e: u32) -> u64 {
    let lead = p.pow(e);
    for k in 0..lead {
        let mut f = poly_from_int(k, p);
        f.resize(e as usize + 1, 0);
        f[e as usize] = 1;
        if poly_is_irreducible(&f, p) {
            return lead + k;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

/// Multiply two F_{p^e} elements (base-p digit encodings) modulo `f`.
fn gf_mul(x: u64, y: u64, f: &[u64], p: u64) -> u64 {
    let a = poly_from_int(x, p);
    let b = poly_from_int(y, p);
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &ca) in a.iter().enumerate() {
        for (j, &cb) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ca * cb) % p;
        }
    }
    let r = poly_rem(&prod, f, p);
    r.iter()
        .rev()
        .fold(0u64, |acc, &c| acc * p + c)
}

/// Add two F_{p^e} digit encodings (carry-free base-p addition).
fn gf_add(x: u64, y: u64, p: u64) -> u64 {
    let mut out = 0u64;
    let mut pw = 1u64;
    let (mut x, mut y) = (x, y);
    while x > 0 || y > 0 {
        out += ((x % p + y % p) % p) * pw;
        pw *= p;
        x /= p;
        y /= p;
    }
    out
}

fn gf_neg(x: u64, p: u64) -> u64 {
    let mut out = 0u64;
    let mut pw = 1u64;
    let mut x = x;
    while x > 0 {
        out += ((p - x % p) % p) * pw;
        pw *= p;
        x /= p;
    }
    out
}

fn build_tables(q: u64, p: u64, e: u32) -> DigitTables {
    let qs = q as usize;
    let mut add = vec![0u8; qs * qs];
    let mut sub = vec![0u8; qs * qs];
    let mut neg = vec![0u8; qs];
    let mut mul = vec![0u8; qs * qs];
    let f = if e > 1 {
        poly_from_int(least_irreducible(p, e), p)
    } else {
        Vec::new()
    };
    for x in 0..q {
        neg[x as usize] = if e == 1 {
            ((q - x) % q) as u8
        } else {
            gf_neg(x, p) as u8
        };
    }
    for x in 0..q {
        for y in 0..q {
            let (s, m) = if e == 1 {
                ((x + y) % q, (x * y) % q)
            } else {
                (gf_add(x, y, p), gf_mul(x, y, &f, p))
            };
            add[(x * q + y) as usize] = s as u8;
            mul[(x * q + y) as usize] = m as u8;
        }
    }
    for x in 0..q {
        for y in 0..q {
            sub[(x * q + y) as usize] = add[(x * q + neg[y as usize] as u64) as usize];
        }
    }
    DigitTables { add, sub, mul }
}

impl FieldSpace {
    /// Validate `q` and `n` and build the space.
    pub fn make(q: u64, n: u32) -> Result<FieldSpace> {
        if q < 2 {
            return Err(Error::NotPrimePower(q));
        }
        let (p, e) = prime_power(q)?;
        if n < 1 {
            return Err(Error::DomainError("dimension n must be >= 1".into()));
        }
        let mut size: u64 = 1;
        for _ in 0..n {
            size = size
                .checked_mul(q)
                .filter(|&s| s < (1u64 << 63))
                .ok_or(Error::SpaceTooLarge { q, n })?;
        }
        if e > 1 && q > MAX_TABLE_Q {
            return Err(Error::ExtensionFieldTooLarge(q));
        }
        let modulus = (e > 1).then(|| least_irreducible(p, e));
        let tables = (q <= MAX_TABLE_Q).then(|| Arc::new(build_tables(q, p, e)));
        Ok(FieldSpace {
            q,
            p_char: p,
            ext_degree: e,
            n,
            size,
            modulus,
            tables,
        })
    }

    pub fn q(&self) -> u64 {
        self.q
    }
    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn p_char(&self) -> u64 {
        self.p_char
    }
    pub fn ext_degree(&self) -> u32 {
        self.ext_degree
    }
    pub fn size(&self) -> u64 {
        self.size
    }
    /// Integer encoding of the modulus polynomial for manifests; `None` when q is prime.
    pub fn modulus_encoding(&self) -> Option<u64> {
        self.modulus
    }

    /// Gate for k-AP validity: p >= 3 for 3-APs, p >= 5 for 4-APs.
    pub fn require_char_for_ap(&self, k: u8) -> Result<()> {
        let required = match k {
            3 => 3,
            4 => 5,
            _ => return Err(Error::DomainError(format!("unsupported k = {}", k))),
        };
        if self.p_char < required {
            return Err(Error::CharTooSmall {
                required,
                actual: self.p_char,
            });
        }
        Ok(())
    }

    /// Write the base-q digits of `idx` into `out[..n]` (requires q <= 256).
    #[inline]
    pub fn digits_into(&self, mut idx: u64, out: &mut [u8]) {
        for slot in out.iter_mut().take(self.n as usize) {
            *slot = (idx % self.q) as u8;
            idx /= self.q;
        }
    }

    #[inline]
    fn zip_digits(&self, a: u64, b: u64, digit_op: impl Fn(u64, u64) -> u64) -> u64 {
        let (mut a, mut b) = (a, b);
        let mut out = 0u64;
        let mut pw = 1u64;
        for _ in 0..self.n {
            out += digit_op(a % self.q, b % self.q) * pw;
            pw = pw.wrapping_mul(self.q);
            a /= self.q;
            b /= self.q;
        }
        out
    }

    #[inline]
    pub(crate) fn add_idx(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.size && b < self.size);
        match &self.tables {
            Some(t) => self.zip_digits(a, b, |x, y| t.add[(x * self.q + y) as usize] as u64),
            None => self.zip_digits(a, b, |x, y| (x + y) % self.q),
        }
    }

    #[inline]
    pub(crate) fn sub_idx(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.size && b < self.size);
        match &self.tables {
            Some(t) => self.zip_digits(a, b, |x, y| t.sub[(x * self.q + y) as usize] as u64),
            None => self.zip_digits(a, b, |x, y| (x + self.q - y) % self.q),
        }
    }

    #[inline]
    pub(crate) fn neg_idx(&self, a: u64) -> u64 {
        self.sub_idx(0, a)
    }

    /// Multiply every coordinate by the field scalar `c` (an F_q digit).
    pub(crate) fn smul_idx(&self, c: u64, a: u64) -> u64 {
        debug_assert!(c < self.q && a < self.size);
        match &self.tables {
            Some(t) => self.zip_digits(a, 0, |x, _| t.mul[(c * self.q + x) as usize] as u64),
            None => self.zip_digits(a, 0, |x, _| (c * x) % self.q),
        }
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.add_idx(a.0, b.0))
    }
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.sub_idx(a.0, b.0))
    }
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg_idx(a.0))
    }
    pub fn scalar_mul(&self, c: u64, a: Elem) -> Elem {
        Elem(self.smul_idx(c, a.0))
    }
    pub fn zero(&self) -> Elem {
        Elem(0)
    }
}

//! Arithmetic in GF(p^e).
//!
//! Elements are plain integer codes: the polynomial `a_0 + a_1 x + ... + a_{e-1} x^{e-1}`
//! over GF(p) is stored as `a_0 + a_1 p + ... + a_{e-1} p^{e-1}`. The same codes appear
//! in every file format of this crate, so point tuples from published tables can be
//! read without translation.
//!
//! A [`FieldSpec`] owns precomputed addition, negation, log/antilog and Frobenius
//! tables. It is immutable and cheap to clone.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{domain, Error, Result};

/// Largest field order for which tables are built.
pub const MAX_ORDER: u32 = 256;

/// A field element in the integer encoding `sum a_i p^i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(pub u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn code(self) -> u32 {
        self.0 as u32
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

struct Tables {
    p: u32,
    e: u32,
    q: u32,
    poly: Vec<u32>,
    add: Vec<u16>,
    neg: Vec<u16>,
    log: Vec<u16>,
    exp: Vec<u16>,
    frob: Vec<u16>,
}

/// GF(p^e) together with its defining polynomial and lookup tables.
#[derive(Clone)]
pub struct FieldSpec {
    t: Arc<Tables>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.t.p == other.t.p && self.t.e == other.t.e && self.t.poly == other.t.poly
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldSpec({self})")
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} e={}", self.t.p, self.t.e)?;
        if self.t.e > 1 {
            let coeffs: Vec<String> = self.t.poly.iter().map(|c| c.to_string()).collect();
            write!(f, " poly={}", coeffs.join(","))?;
        }
        Ok(())
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` into `(p, e)` with `q = p^e`, if `q` is a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut e = 0;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

// Polynomials over GF(p) as coefficient vectors, lowest degree first.

fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    a
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // p is prime and small: Fermat
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut exp = p - 2;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        exp >>= 1;
    }
    result as u32
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = trim(a.to_vec());
    let b = trim(b.to_vec());
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p);
    while r.len() > db && !(r.len() == 1 && r[0] == 0) {
        let dr = r.len() - 1;
        let factor = r[dr] * lead_inv % p;
        if factor != 0 {
            for i in 0..=db {
                let idx = dr - db + i;
                r[idx] = (r[idx] + p - factor * b[i] % p) % p;
            }
        }
        r.pop();
        r = trim(r);
        if r.len() <= db {
            break;
        }
    }
    r
}

/// Whether the monic polynomial `poly` (coefficients `a_0..a_e`) is irreducible over GF(p).
///
/// Exhaustive search over monic divisors of degree at most `deg/2`; intended for the small
/// degrees used here.
pub fn is_irreducible(p: u32, poly: &[u32]) -> Result<bool> {
    if !is_prime(p) {
        return domain(format!("{p} is not prime"));
    }
    if poly.len() < 2 {
        return domain("polynomial must have degree at least 1");
    }
    if poly.iter().any(|&c| c >= p) {
        return domain(format!("coefficients must lie in [0,{p})"));
    }
    if *poly.last().unwrap() != 1 {
        return domain("polynomial is not monic");
    }
    let deg = poly.len() - 1;
    if deg == 1 {
        return Ok(true);
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for code in 0..count {
            let mut div = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                div.push((c % p as u64) as u32);
                c /= p as u64;
            }
            div.push(1);
            let rem = poly_rem(poly, &div, p);
            if rem.iter().all(|&x| x == 0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn decode(code: u32, p: u32, e: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(e as usize);
    let mut c = code;
    for _ in 0..e {
        out.push(c % p);
        c /= p;
    }
    out
}

fn encode(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Product of two codes by schoolbook multiplication and reduction modulo `poly`.
fn slow_mul(a: u32, b: u32, p: u32, e: u32, poly: &[u32]) -> u32 {
    if e == 1 {
        return a * b % p;
    }
    let (ca, cb) = (decode(a, p, e), decode(b, p, e));
    let mut prod = vec![0u32; 2 * e as usize - 1];
    for (i, &x) in ca.iter().enumerate() {
        for (j, &y) in cb.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    let rem = poly_rem(&prod, poly, p);
    let mut out = rem;
    out.resize(e as usize, 0);
    encode(&out, p)
}

fn default_poly(p: u32, e: u32) -> Vec<u32> {
    match (p, e) {
        (2, 4) => vec![1, 0, 0, 1, 1],
        (5, 2) => vec![2, 1, 1],
        (3, 3) => vec![1, 2, 0, 1],
        _ => {
            let count = p.pow(e);
            (0..count)
                .map(|code| {
                    let mut v = decode(code, p, e);
                    v.push(1);
                    v
                })
                .find(|v| v[0] != 0 && is_irreducible(p, v).unwrap_or(false))
                .expect("an irreducible polynomial exists for every degree")
        }
    }
}

impl FieldSpec {
    /// GF(p^e) defined by the monic irreducible `poly` (coefficients `a_0..a_e`).
    /// For `e = 1` the polynomial is ignored and may be empty.
    pub fn new(p: u32, e: u32, poly: &[u32]) -> Result<Self> {
        if !is_prime(p) {
            return domain(format!("{p} is not prime"));
        }
        if e == 0 {
            return domain("exponent must be positive");
        }
        let q = p
            .checked_pow(e)
            .filter(|&q| q <= MAX_ORDER)
            .ok_or_else(|| Error::Domain(format!("field order {p}^{e} exceeds {MAX_ORDER}")))?;
        let poly = if e == 1 {
            vec![0, 1]
        } else {
            if poly.len() != e as usize + 1 {
                return domain(format!("polynomial needs {} coefficients, got {}", e + 1, poly.len()));
            }
            if !is_irreducible(p, poly)? {
                return domain(format!("polynomial {poly:?} is reducible over GF({p})"));
            }
            poly.to_vec()
        };

        let qs = q as usize;
        let mut add = vec![0u16; qs * qs];
        let mut neg = vec![0u16; qs];
        for a in 0..q {
            let da = decode(a, p, e);
            neg[a as usize] = encode(&da.iter().map(|&x| (p - x) % p).collect::<Vec<_>>(), p) as u16;
            for b in 0..q {
                let db = decode(b, p, e);
                let s: Vec<u32> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % p).collect();
                add[a as usize * qs + b as usize] = encode(&s, p) as u16;
            }
        }

        // primitive element by search
        let order = q - 1;
        let mut log = vec![0u16; qs];
        let mut exp = vec![0u16; 2 * order as usize];
        let generator = (1..q)
            .find(|&g| {
                let mut x = 1;
                for k in 1..=order {
                    x = slow_mul(x, g, p, e, &poly);
                    if x == 1 {
                        return k == order;
                    }
                }
                false
            })
            .expect("multiplicative group is cyclic");
        let mut x = 1u32;
        for k in 0..order {
            exp[k as usize] = x as u16;
            exp[(k + order) as usize] = x as u16;
            log[x as usize] = k as u16;
            x = slow_mul(x, generator, p, e, &poly);
        }

        let frob = (0..q as usize)
            .map(|a| {
                if a == 0 {
                    0
                } else {
                    exp[(log[a] as usize * p as usize) % order as usize]
                }
            })
            .collect();
        let t = Tables {
            p,
            e,
            q,
            poly,
            add,
            neg,
            log,
            exp,
            frob,
        };
        Ok(FieldSpec { t: Arc::new(t) })
    }

    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1, &[])
    }

    /// GF(q) with the default polynomial: the published ones for 16, 25 and 27, otherwise
    /// the first monic irreducible polynomial in code order.
    pub fn from_order(q: u32) -> Result<Self> {
        let (p, e) = prime_power(q).ok_or_else(|| Error::Domain(format!("{q} is not a prime power")))?;
        if e == 1 {
            Self::prime(p)
        } else {
            Self::new(p, e, &default_poly(p, e))
        }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.t.p
    }

    #[inline]
    pub fn e(&self) -> u32 {
        self.t.e
    }

    /// Field order `q = p^e`.
    #[inline]
    pub fn order(&self) -> u32 {
        self.t.q
    }

    pub fn poly(&self) -> &[u32] {
        &self.t.poly
    }

    pub fn element(&self, code: u32) -> Result<FieldElement> {
        if code < self.t.q {
            Ok(FieldElement(code as u16))
        } else {
            domain(format!("element code {code} out of range for GF({})", self.t.q))
        }
    }

    pub fn check(&self, a: FieldElement) -> Result<FieldElement> {
        self.element(a.code())
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.t.q).map(|c| FieldElement(c as u16))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.t.q).map(|c| FieldElement(c as u16))
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(self.t.add[a.0 as usize * self.t.q as usize + b.0 as usize])
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        FieldElement(self.t.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let k = self.t.log[a.0 as usize] as usize + self.t.log[b.0 as usize] as usize;
        FieldElement(self.t.exp[k])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero(self.t.q));
        }
        let order = self.t.q as usize - 1;
        let k = (order - self.t.log[a.0 as usize] as usize) % order;
        Ok(FieldElement(self.t.exp[k]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, n: u64) -> FieldElement {
        if n == 0 {
            return FieldElement::ONE;
        }
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        let order = self.t.q as u64 - 1;
        let k = (self.t.log[a.0 as usize] as u64 * (n % order)) % order;
        FieldElement(self.t.exp[k as usize])
    }

    /// `a^(p^k)`, the k-th power of the Frobenius automorphism.
    pub fn frobenius(&self, a: FieldElement, k: u32) -> FieldElement {
        let mut x = a;
        for _ in 0..k % self.t.e {
            x = FieldElement(self.t.frob[x.0 as usize]);
        }
        x
    }

    pub fn checked_add(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.add(self.check(a)?, self.check(b)?))
    }

    pub fn checked_mul(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(self.check(a)?, self.check(b)?))
    }

    /// Integer `n` mapped into the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.t.p as i64) as u16)
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Parses `p=<p> e=<e> poly=<a0>,...,<ae>`; `poly` may be omitted when `e=1`.
    fn from_str(s: &str) -> Result<Self> {
        let mut p = None;
        let mut e = None;
        let mut poly = Vec::new();
        for tok in s.split_whitespace() {
            let (key, value) = tok
                .split_once('=')
                .ok_or_else(|| Error::Domain(format!("expected key=value, got `{tok}`")))?;
            let num = |v: &str| {
                v.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Domain(format!("bad integer `{v}`")))
            };
            match key {
                "p" => p = Some(num(value)?),
                "e" => e = Some(num(value)?),
                "poly" => poly = value.split(',').map(num).collect::<Result<Vec<_>>>()?,
                other => return domain(format!("unknown field key `{other}`")),
            }
        }
        let p = p.ok_or_else(|| Error::Domain("missing p".into()))?;
        let e = e.unwrap_or(1);
        if e > 1 && poly.is_empty() {
            return domain("poly is required when e > 1");
        }
        FieldSpec::new(p, e, &poly)
    }
}

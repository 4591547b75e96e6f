//! Number field descriptors and prime splitting.
//!
//! Three kinds of field are supported: the rationals, quadratic fields
//! `Q(sqrt{d})` keyed by a squarefree integer d, and cyclotomic fields
//! `Q(zeta{m})`. Every downstream computation is driven by how a rational
//! prime decomposes into prime ideals, which for these abelian fields is
//! determined by congruence data alone: the Kronecker symbol for quadratic
//! fields, the multiplicative order of p mod m for cyclotomic fields.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rational,
    /// Quadratic field Q(sqrt(d)), d squarefree, d != 0, 1.
    Quadratic { d: i64 },
    /// Cyclotomic field Q(zeta_m), m >= 3 and m != 2 (mod 4).
    Cyclotomic { m: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NumberField {
    kind: FieldKind,
    degree: u32,
    /// Fundamental discriminant; quadratic fields only.
    fundamental_discriminant: Option<i64>,
}

/// How a rational prime p decomposes: g primes above p, each with
/// ramification index e and residue degree f, so that e*f*g = degree.
/// All primes above p share one (e, f) in the supported (abelian) fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplittingSignature {
    pub p: u64,
    pub e: u32,
    pub f: u32,
    pub g: u32,
}

impl NumberField {
    pub fn rational() -> Self {
        NumberField {
            kind: FieldKind::Rational,
            degree: 1,
            fundamental_discriminant: None,
        }
    }

    pub fn quadratic(d: i64) -> Result<Self> {
        if d == 0 || d == 1 || !is_squarefree(d) {
            return Err(Error::InvalidField(format!("Q(sqrt{{{d}}})")));
        }
        let disc = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        Ok(NumberField {
            kind: FieldKind::Quadratic { d },
            degree: 2,
            fundamental_discriminant: Some(disc),
        })
    }

    /// m = 2 (mod 4) is rejected: Q(zeta_m) = Q(zeta_{m/2}) there, and we
    /// keep descriptors canonical rather than silently reducing.
    pub fn cyclotomic(m: u64) -> Result<Self> {
        if m < 3 || m % 4 == 2 {
            return Err(Error::InvalidField(format!("Q(zeta{{{m}}})")));
        }
        Ok(NumberField {
            kind: FieldKind::Cyclotomic { m },
            degree: euler_phi(m) as u32,
            fundamental_discriminant: None,
        })
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn fundamental_discriminant(&self) -> Option<i64> {
        self.fundamental_discriminant
    }

    /// Canonical descriptor string: "Q", "Q(sqrt{d})", "Q(zeta{m})".
    pub fn descriptor(&self) -> String {
        self.to_string()
    }

    pub fn ramified_primes(&self) -> Vec<u64> {
        match self.kind {
            FieldKind::Rational => Vec::new(),
            FieldKind::Quadratic { .. } => {
                let disc = self.fundamental_discriminant.unwrap().unsigned_abs();
                prime_factors(disc)
            }
            FieldKind::Cyclotomic { m } => prime_factors(m),
        }
    }

    pub fn split_prime(&self, p: u64) -> Result<SplittingSignature> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let (e, f, g) = match self.kind {
            FieldKind::Rational => (1, 1, 1),
            FieldKind::Quadratic { .. } => {
                let disc = self.fundamental_discriminant.unwrap();
                if disc.unsigned_abs() % p == 0 {
                    (2, 1, 1)
                } else {
                    match kronecker(disc, p as i64) {
                        1 => (1, 1, 2),
                        -1 => (1, 2, 1),
                        _ => unreachable!("p does not divide the discriminant"),
                    }
                }
            }
            FieldKind::Cyclotomic { m } => {
                // m = p^a * m' with p not dividing m':
                // e = phi(p^a), f = ord of p mod m', g = phi(m') / f.
                let mut pa = 1u64;
                let mut m1 = m;
                while m1 % p == 0 {
                    m1 /= p;
                    pa *= p;
                }
                let e = euler_phi(pa) as u32;
                let f = multiplicative_order(p, m1) as u32;
                let g = euler_phi(m1) as u32 / f;
                (e, f, g)
            }
        };
        debug_assert_eq!(e * f * g, self.degree);
        Ok(SplittingSignature { p, e, f, g })
    }
}

impl fmt::Display for NumberField {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FieldKind::Rational => write!(fm, "Q"),
            FieldKind::Quadratic { d } => write!(fm, "Q(sqrt{{{d}}})"),
            FieldKind::Cyclotomic { m } => write!(fm, "Q(zeta{{{m}}})"),
        }
    }
}

impl FromStr for NumberField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "Q" {
            return Ok(NumberField::rational());
        }
        if let Some(body) = s.strip_prefix("Q(sqrt{").and_then(|r| r.strip_suffix("})")) {
            let d: i64 = body
                .parse()
                .map_err(|_| Error::InvalidField(s.to_string()))?;
            return NumberField::quadratic(d);
        }
        if let Some(body) = s.strip_prefix("Q(zeta{").and_then(|r| r.strip_suffix("})")) {
            let m: u64 = body
                .parse()
                .map_err(|_| Error::InvalidField(s.to_string()))?;
            return NumberField::cyclotomic(m);
        }
        Err(Error::InvalidField(s.to_string()))
    }
}

/// Deterministic Miller-Rabin, valid for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            result -= result / p;
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Order of a in (Z/mZ)^*. Returns 1 when m <= 2 or m = 1.
pub fn multiplicative_order(a: u64, m: u64) -> u64 {
    if m <= 2 {
        return 1;
    }
    assert_eq!(gcd(a % m, m), 1, "order requires gcd(a, m) = 1");
    let mut k = 1u64;
    let mut x = a % m;
    while x != 1 {
        x = mul_mod(x, a, m);
        k += 1;
    }
    k
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn is_squarefree(d: i64) -> bool {
    let mut n = d.unsigned_abs();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Kronecker symbol (a|n), extending the Jacobi symbol to all integers n.
pub fn kronecker(mut a: i64, mut n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    let mut result = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    // (a|2) factor for even n.
    let mut v2 = 0u32;
    while n % 2 == 0 {
        n /= 2;
        v2 += 1;
    }
    if v2 % 2 == 1 {
        match a.rem_euclid(8) {
            1 | 7 => {}
            3 | 5 => result = -result,
            _ => return 0,
        }
    }
    a = a.rem_euclid(n);
    while a != 0 {
        let mut v = 0u32;
        while a % 2 == 0 {
            a /= 2;
            v += 1;
        }
        if v % 2 == 1 && matches!(n.rem_euclid(8), 3 | 5) {
            result = -result;
        }
        // quadratic reciprocity for odd a, n
        if a.rem_euclid(4) == 3 && n.rem_euclid(4) == 3 {
            result = -result;
        }
        let t = a;
        a = n.rem_euclid(t);
        n = t;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Simple prime sieve, used by enumeration and table construction.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

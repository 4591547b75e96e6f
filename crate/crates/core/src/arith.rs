//! Arithmetic functions on ideals: generalized Moebius, generalized divisor
//! function sigma_{K,z}, Ramanujan sums C_J(I), coefficient aggregates, and
//! exact coefficientwise verification of the underlying Dirichlet-series
//! identities.
//!
//! Everything with an integer exponent parameter stays in exact i128
//! arithmetic; real/complex exponents take the floating path.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{NumberField, SplittingSignature};
use crate::ideals::{
    for_each_ideal, multiplicative_table, CoefficientTable, Ideal, DEFAULT_MAX_TABLE_N,
};

/// Exponent parameter of the generalized divisor function. Exact when the
/// value is a nonnegative integer; floating otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZParam {
    Exact(u32),
    Real(f64),
    Complex(Complex64),
}

impl ZParam {
    /// Classifies a real exponent: small nonnegative integers stay exact.
    pub fn from_f64(z: f64) -> ZParam {
        if z >= 0.0 && z.fract() == 0.0 && z <= 64.0 {
            ZParam::Exact(z as u32)
        } else {
            ZParam::Real(z)
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ZParam::Exact(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SigmaValue {
    Exact(i128),
    Real(f64),
    Complex(Complex64),
}

impl SigmaValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            SigmaValue::Exact(v) => *v as f64,
            SigmaValue::Real(v) => *v,
            SigmaValue::Complex(v) => v.re,
        }
    }
}

/// mu(I): (-1)^r on squarefree ideals with r distinct primes, 0 otherwise.
pub fn moebius(ideal: &Ideal) -> i128 {
    if !ideal.is_squarefree() {
        return 0;
    }
    if ideal.factors().len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// sigma_z(P^v) = sum_{t=0..v} N(P)^(t z), exact integer path.
fn local_sigma_int(prime_norm: u64, v: u32, z: u32) -> i128 {
    let qz = (prime_norm as i128).checked_pow(z).expect("q^z overflow");
    let mut term = 1i128;
    let mut acc = 1i128;
    for _ in 0..v {
        term = term.checked_mul(qz).expect("sigma overflow");
        acc = acc.checked_add(term).expect("sigma overflow");
    }
    acc
}

fn local_sigma_complex(prime_norm: u64, v: u32, z: Complex64) -> Complex64 {
    let lnq = (prime_norm as f64).ln();
    (0..=v).map(|t| (z * (t as f64 * lnq)).exp()).sum()
}

/// sigma_{K,z}(I) = sum over divisors I_1 | I of N(I_1)^z, computed as a
/// product of prime-power local factors.
pub fn sigma_z(ideal: &Ideal, z: ZParam) -> SigmaValue {
    match z {
        ZParam::Exact(k) => SigmaValue::Exact(
            ideal
                .factors()
                .iter()
                .map(|(p, v)| local_sigma_int(p.norm(), *v, k))
                .product(),
        ),
        ZParam::Real(r) => SigmaValue::Real(
            ideal
                .factors()
                .iter()
                .map(|(p, v)| local_sigma_complex(p.norm(), *v, Complex64::new(r, 0.0)).re)
                .product(),
        ),
        ZParam::Complex(c) => SigmaValue::Complex(
            ideal
                .factors()
                .iter()
                .map(|(p, v)| local_sigma_complex(p.norm(), *v, c))
                .product(),
        ),
    }
}

/// Exact sigma with nonnegative integer exponent.
pub fn sigma_int(ideal: &Ideal, z: u32) -> i128 {
    match sigma_z(ideal, ZParam::Exact(z)) {
        SigmaValue::Exact(v) => v,
        _ => unreachable!(),
    }
}

/// Ramanujan sum C_J(I), default evaluation: product of local factors.
/// With k = v_P(J) >= 1, v = v_P(I), q = N(P), the factor at P is
/// q^(k-1)(q-1) if v >= k, -q^(k-1) if v = k-1, and 0 if v < k-1.
pub fn ramanujan_sum(modulus: &Ideal, arg: &Ideal) -> Result<i128> {
    if modulus.field() != arg.field() {
        return Err(Error::FieldMismatch(
            modulus.field().to_string(),
            arg.field().to_string(),
        ));
    }
    let mut acc = 1i128;
    for &(p, k) in modulus.factors() {
        let v = arg.valuation(&p);
        let q = p.norm() as i128;
        let qk1 = q.checked_pow(k - 1).expect("C_J overflow");
        let factor = if v >= k {
            qk1 * (q - 1)
        } else if v + 1 == k {
            -qk1
        } else {
            return Ok(0);
        };
        acc = acc.checked_mul(factor).expect("C_J overflow");
    }
    Ok(acc)
}

/// Ramanujan sum by the literal divisor sum
/// sum over I_1 | gcd(I,J) of N(I_1) mu(J/I_1); the permanent oracle for
/// the local-factor product above.
pub fn ramanujan_sum_divisor(modulus: &Ideal, arg: &Ideal) -> Result<i128> {
    let g = modulus.gcd(arg)?;
    let mut acc = 0i128;
    for d in g.divisors() {
        let quotient = modulus.div_exact(&d);
        acc += d.norm() as i128 * moebius(&quotient);
    }
    Ok(acc)
}

fn signature_cache(field: &NumberField) -> impl FnMut(u64) -> SplittingSignature + '_ {
    let mut cache: HashMap<u64, SplittingSignature> = HashMap::new();
    move |p| {
        *cache
            .entry(p)
            .or_insert_with(|| field.split_prime(p).expect("sieve primes are prime"))
    }
}

/// Coefficient of the Dirichlet series of mu over ideals at p^v:
/// squarefree ideals above p with norm p^v, signed by parity.
fn local_moebius_coeff(sig: &SplittingSignature, v: u32) -> i128 {
    if v % sig.f != 0 {
        return 0;
    }
    let w = v / sig.f;
    if w > sig.g {
        return 0;
    }
    let b = crate::ideals::binomial(sig.g as u64, w as u64);
    if w % 2 == 0 {
        b
    } else {
        -b
    }
}

/// M_K(t) = sum of mu(J) over ideals with norm <= t, for t <= n_max.
pub fn mertens_table(field: &NumberField, n_max: u64) -> Result<CoefficientTable<i128>> {
    if n_max > DEFAULT_MAX_TABLE_N {
        return Err(Error::ResourceCap(format!(
            "table length {n_max} exceeds {DEFAULT_MAX_TABLE_N}"
        )));
    }
    let mut sig = signature_cache(field);
    let coeffs = multiplicative_table(field, n_max, "mertens", |p, v| {
        local_moebius_coeff(&sig(p), v)
    });
    let mut sums = coeffs.partial_sums();
    sums.tag = "mertens".to_string();
    Ok(sums)
}

/// Coefficient of u^w in the product of g copies of the column vector
/// `col` (a local power series), truncated at degree w.
fn power_coefficient_int(col: &[i128], g: u32, w: usize) -> i128 {
    let mut poly = vec![0i128; w + 1];
    poly[0] = 1;
    for _ in 0..g {
        let mut next = vec![0i128; w + 1];
        for (i, &a) in poly.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in col.iter().enumerate().take(w + 1 - i) {
                next[i + j] += a * b;
            }
        }
        poly = next;
    }
    poly[w]
}

fn power_coefficient_f64(col: &[f64], g: u32, w: usize) -> f64 {
    let mut poly = vec![0f64; w + 1];
    poly[0] = 1.0;
    for _ in 0..g {
        let mut next = vec![0f64; w + 1];
        for (i, &a) in poly.iter().enumerate() {
            for (j, &b) in col.iter().enumerate().take(w + 1 - i) {
                next[i + j] += a * b;
            }
        }
        poly = next;
    }
    poly[w]
}

/// A(n,z) = sum over ideals of norm n of sigma_z(I); exact path.
pub fn divisor_coeff_table_int(
    field: &NumberField,
    n_max: u64,
    z: u32,
) -> Result<CoefficientTable<i128>> {
    if n_max > DEFAULT_MAX_TABLE_N {
        return Err(Error::ResourceCap(format!(
            "table length {n_max} exceeds {DEFAULT_MAX_TABLE_N}"
        )));
    }
    let mut sig = signature_cache(field);
    let mut table = multiplicative_table(field, n_max, "A(n,z)", |p, v| {
        let s = sig(p);
        if v % s.f != 0 {
            return 0;
        }
        let w = (v / s.f) as usize;
        let q = p.pow(s.f);
        let col: Vec<i128> = (0..=w as u32).map(|j| local_sigma_int(q, j, z)).collect();
        power_coefficient_int(&col, s.g, w)
    });
    table.tag = format!("A(n,{z})");
    Ok(table)
}

/// A(n,z) for real z; floating path.
pub fn divisor_coeff_table_real(
    field: &NumberField,
    n_max: u64,
    z: f64,
) -> Result<CoefficientTable<f64>> {
    if n_max > DEFAULT_MAX_TABLE_N {
        return Err(Error::ResourceCap(format!(
            "table length {n_max} exceeds {DEFAULT_MAX_TABLE_N}"
        )));
    }
    let mut sig = signature_cache(field);
    Ok(multiplicative_table(field, n_max, "A(n,z)~", |p, v| {
        let s = sig(p);
        if v % s.f != 0 {
            return 0.0;
        }
        let w = (v / s.f) as usize;
        let q = p.pow(s.f);
        let col: Vec<f64> = (0..=w as u32)
            .map(|j| local_sigma_complex(q, j, Complex64::new(z, 0.0)).re)
            .collect();
        power_coefficient_f64(&col, s.g, w)
    }))
}

/// A(n,z1,z2) = sum over ideals of norm n of sigma_{z1}(I) sigma_{z2}(I).
pub fn pair_coeff_table_int(
    field: &NumberField,
    n_max: u64,
    z1: u32,
    z2: u32,
) -> Result<CoefficientTable<i128>> {
    if n_max > DEFAULT_MAX_TABLE_N {
        return Err(Error::ResourceCap(format!(
            "table length {n_max} exceeds {DEFAULT_MAX_TABLE_N}"
        )));
    }
    let mut sig = signature_cache(field);
    let mut table = multiplicative_table(field, n_max, "A(n,z1,z2)", |p, v| {
        let s = sig(p);
        if v % s.f != 0 {
            return 0;
        }
        let w = (v / s.f) as usize;
        let q = p.pow(s.f);
        let col: Vec<i128> = (0..=w as u32)
            .map(|j| local_sigma_int(q, j, z1) * local_sigma_int(q, j, z2))
            .collect();
        power_coefficient_int(&col, s.g, w)
    });
    table.tag = format!("A(n,{z1},{z2})");
    Ok(table)
}

pub fn pair_coeff_table_real(
    field: &NumberField,
    n_max: u64,
    z1: f64,
    z2: f64,
) -> Result<CoefficientTable<f64>> {
    if n_max > DEFAULT_MAX_TABLE_N {
        return Err(Error::ResourceCap(format!(
            "table length {n_max} exceeds {DEFAULT_MAX_TABLE_N}"
        )));
    }
    let mut sig = signature_cache(field);
    Ok(multiplicative_table(field, n_max, "A(n,z1,z2)~", |p, v| {
        let s = sig(p);
        if v % s.f != 0 {
            return 0.0;
        }
        let w = (v / s.f) as usize;
        let q = p.pow(s.f);
        let col: Vec<f64> = (0..=w as u32)
            .map(|j| {
                local_sigma_complex(q, j, Complex64::new(z1, 0.0)).re
                    * local_sigma_complex(q, j, Complex64::new(z2, 0.0)).re
            })
            .collect();
        power_coefficient_f64(&col, s.g, w)
    }))
}

/// Outcome of a coefficientwise identity check. A failure is a report,
/// not an error.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub field: String,
    pub label: String,
    pub checked: u64,
    pub first_failure: Option<u64>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Coefficientwise form of the Dirichlet-series identity
/// zeta_K(s) * sum_J C_J(I) N(J)^{-s} = sum_{I_1 | I} N(I_1)^{1-s}:
/// for every n <= n_max,
///   sum_{d | n} a_K(n/d) * (sum_{N(J)=d} C_J(I))  ==  sum_{I_1|I, N=n} N(I_1).
pub fn verify_ramanujan_series(
    field: &NumberField,
    ideal: &Ideal,
    n_max: u64,
) -> Result<IdentityReport> {
    assert!(n_max as u128 >= ideal.norm(), "n_max must cover N(I)");
    let a = crate::ideals::ideal_count_table(field, n_max)?;
    // r[d] = sum of C_J(I) over ideals J of norm d
    let mut r = vec![0i128; n_max as usize + 1];
    let f = *field;
    let mut err = None;
    for_each_ideal(field, n_max, &mut |norm, factors| {
        let j = Ideal::from_factors(f, factors);
        match ramanujan_sum(&j, ideal) {
            Ok(c) => r[norm as usize] += c,
            Err(e) => err = Some(e),
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    // lhs[n] = sum_{d | n} a_K(n/d) r[d], via the divisor convolution
    let mut lhs = vec![0i128; n_max as usize + 1];
    for d in 1..=n_max as usize {
        if r[d] == 0 {
            continue;
        }
        let mut n = d;
        while n <= n_max as usize {
            lhs[n] += a[(n / d) as u64] * r[d];
            n += d;
        }
    }
    let mut rhs = vec![0i128; n_max as usize + 1];
    for d in ideal.divisors() {
        let norm = d.norm();
        if norm <= n_max as u128 {
            rhs[norm as usize] += norm as i128;
        }
    }
    let first_failure = (1..=n_max).find(|&n| lhs[n as usize] != rhs[n as usize]);
    Ok(IdentityReport {
        field: field.to_string(),
        label: format!("ramanujan-series N(I)={}", ideal.norm()),
        checked: n_max,
        first_failure,
    })
}

/// Coefficientwise form of sum_I sigma_z(I) N(I)^{-s} = zeta_K(s) zeta_K(s-z):
/// A(n,z) == sum_{d | n} a_K(n/d) d^z a_K(d), exactly, for integer z >= 0.
pub fn verify_sigma_series(field: &NumberField, n_max: u64, z: u32) -> Result<IdentityReport> {
    let a = crate::ideals::ideal_count_table(field, n_max)?;
    let lhs = divisor_coeff_table_int(field, n_max, z)?;
    let mut rhs = vec![0i128; n_max as usize + 1];
    for d in 1..=n_max as usize {
        let ad = a[d as u64];
        if ad == 0 {
            continue;
        }
        let dz = (d as i128).checked_pow(z).expect("d^z overflow");
        let weight = ad.checked_mul(dz).expect("convolution overflow");
        let mut n = d;
        while n <= n_max as usize {
            rhs[n] += a[(n / d) as u64] * weight;
            n += d;
        }
    }
    let first_failure = (1..=n_max).find(|&n| lhs[n] != rhs[n as usize]);
    Ok(IdentityReport {
        field: field.to_string(),
        label: format!("sigma-series z={z}"),
        checked: n_max,
        first_failure,
    })
}

/// Local Euler-factor check at a rational prime p for the pair series
/// sum sigma_{z1} sigma_{z2} / N^s =
/// zeta_K(s) zeta_K(s-z1) zeta_K(s-z2) zeta_K(s-z1-z2) / zeta_K(2s-z1-z2),
/// exact path with z1 = z2 = 0.
///
/// The right side is the series coefficient of u^k (u = N(P)^{-s}) in
/// (1-u^2)^g / (1-u)^{4g}; the left side is computed independently by
/// enumerating exponent tuples on the g primes above p.
pub fn verify_pair_series_local(
    field: &NumberField,
    p: u64,
    k_max: u32,
) -> Result<IdentityReport> {
    let sig = field.split_prime(p)?;
    let km = k_max as usize;
    // RHS series: expand (1-u)^{-4g} then multiply by (1-u^2)^g.
    let geom = vec![1i128; km + 1];
    let mut rhs = vec![0i128; km + 1];
    rhs[0] = 1;
    for _ in 0..4 * sig.g {
        let mut next = vec![0i128; km + 1];
        for (i, &a) in rhs.iter().enumerate() {
            for (j, &b) in geom.iter().enumerate().take(km + 1 - i) {
                next[i + j] += a * b;
            }
        }
        rhs = next;
    }
    // numerator (1-u^2)^g
    let mut num = vec![0i128; km + 1];
    num[0] = 1;
    for _ in 0..sig.g {
        let mut next = vec![0i128; km + 1];
        for (i, &a) in num.iter().enumerate() {
            if a == 0 {
                continue;
            }
            next[i] += a;
            if i + 2 <= km {
                next[i + 2] -= a;
            }
        }
        num = next;
    }
    let mut full = vec![0i128; km + 1];
    for (i, &a) in rhs.iter().enumerate() {
        for (j, &b) in num.iter().enumerate().take(km + 1 - i) {
            full[i + j] += a * b;
        }
    }
    // LHS by enumeration of exponent tuples (j_1..j_g) with sum = k;
    // sigma_0(P^j) = j+1, and sigma_0(I)^2 multiplies over conjugates.
    let mut lhs = vec![0i128; km + 1];
    fn sum_tuples(slots: u32, k: usize) -> i128 {
        if slots == 1 {
            let s0 = (k + 1) as i128;
            return s0 * s0;
        }
        (0..=k)
            .map(|j| {
                let s0 = (j + 1) as i128;
                s0 * s0 * sum_tuples(slots - 1, k - j)
            })
            .sum()
    }
    for k in 0..=km {
        lhs[k] = sum_tuples(sig.g, k);
    }
    let first_failure = (0..=km).find(|&k| lhs[k] != full[k]).map(|k| k as u64);
    Ok(IdentityReport {
        field: field.to_string(),
        label: format!("pair-series-local p={p}"),
        checked: k_max as u64,
        first_failure,
    })
}

/// Floating variant of the local pair-series check for general real
/// exponents; relative tolerance 1e-9.
pub fn verify_pair_series_local_real(
    field: &NumberField,
    p: u64,
    k_max: u32,
    z1: f64,
    z2: f64,
) -> Result<IdentityReport> {
    let sig = field.split_prime(p)?;
    let km = k_max as usize;
    let q = p.pow(sig.f) as f64;
    let mut rhs = vec![0f64; km + 1];
    rhs[0] = 1.0;
    for w in [0.0, z1, z2, z1 + z2] {
        let c = q.powf(w);
        let geom: Vec<f64> = (0..=km).map(|k| c.powi(k as i32)).collect();
        for _ in 0..sig.g {
            let mut next = vec![0f64; km + 1];
            for (i, &a) in rhs.iter().enumerate() {
                for (j, &b) in geom.iter().enumerate().take(km + 1 - i) {
                    next[i + j] += a * b;
                }
            }
            rhs = next;
        }
    }
    // numerator (1 - q^{z1+z2} u^2)^g
    let c2 = q.powf(z1 + z2);
    for _ in 0..sig.g {
        let mut next = vec![0f64; km + 1];
        for (i, &a) in rhs.iter().enumerate() {
            next[i] += a;
            if i + 2 <= km {
                next[i + 2] -= a * c2;
            }
        }
        rhs = next;
    }
    fn sum_tuples_real(slots: u32, k: usize, q: f64, z1: f64, z2: f64) -> f64 {
        let sigma = |j: usize, z: f64| -> f64 { (0..=j).map(|t| q.powf(t as f64 * z)).sum() };
        if slots == 1 {
            return sigma(k, z1) * sigma(k, z2);
        }
        (0..=k)
            .map(|j| sigma(j, z1) * sigma(j, z2) * sum_tuples_real(slots - 1, k - j, q, z1, z2))
            .sum()
    }
    let first_failure = (0..=km)
        .find(|&k| {
            let lhs = sum_tuples_real(sig.g, k, q, z1, z2);
            let scale = lhs.abs().max(rhs[k].abs()).max(1.0);
            (lhs - rhs[k]).abs() > 1e-9 * scale
        })
        .map(|k| k as u64);
    Ok(IdentityReport {
        field: field.to_string(),
        label: format!("pair-series-local~ p={p} z=({z1},{z2})"),
        checked: k_max as u64,
        first_failure,
    })
}

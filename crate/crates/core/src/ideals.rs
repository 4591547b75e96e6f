//! Exact arithmetic in the monoid of nonzero integral ideals.
//!
//! Ideals are stored as their prime-ideal factorization; there is no
//! embedding into field elements. Conjugate primes above a split rational
//! prime are distinguished by a stable index 0..g-1. Everything downstream
//! depends only on norms and exponents, so the labeling cannot leak into
//! results (tested in `arith`).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::ops::Index;

use crate::error::{Error, Result};
use crate::field::{primes_up_to, NumberField, SplittingSignature};

/// Default cap on enumerated ideals / sieve table length for desk scale.
pub const DEFAULT_MAX_IDEALS: u64 = 20_000_000;
pub const DEFAULT_MAX_TABLE_N: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeIdealId {
    pub p: u64,
    /// Distinguishes the g conjugate primes above p; stable but arbitrary.
    pub index: u32,
    pub e: u32,
    pub f: u32,
}

impl PrimeIdealId {
    pub fn norm(&self) -> u64 {
        self.p.pow(self.f)
    }
}

impl PartialOrd for PrimeIdealId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PrimeIdealId {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.p, self.index).cmp(&(other.p, other.index))
    }
}

/// A nonzero integral ideal: sorted sparse exponent map with cached norm.
/// The empty map is the unit ideal O_K (norm 1).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ideal {
    field: NumberField,
    factors: Vec<(PrimeIdealId, u32)>,
    norm: u128,
}

impl Ideal {
    pub fn one(field: NumberField) -> Self {
        Ideal {
            field,
            factors: Vec::new(),
            norm: 1,
        }
    }

    /// Builds an ideal from (prime, exponent) pairs; zero exponents are
    /// dropped, duplicate primes merged, keys sorted.
    pub fn from_factors(field: NumberField, factors: &[(PrimeIdealId, u32)]) -> Self {
        let mut map: Vec<(PrimeIdealId, u32)> = Vec::with_capacity(factors.len());
        for &(p, k) in factors {
            if k == 0 {
                continue;
            }
            if let Some(slot) = map.iter_mut().find(|(q, _)| *q == p) {
                slot.1 += k;
            } else {
                map.push((p, k));
            }
        }
        map.sort_by(|a, b| a.0.cmp(&b.0));
        let norm = map
            .iter()
            .map(|(p, k)| (p.norm() as u128).pow(*k))
            .product();
        Ideal {
            field,
            factors: map,
            norm,
        }
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn factors(&self) -> &[(PrimeIdealId, u32)] {
        &self.factors
    }

    pub fn norm(&self) -> u128 {
        self.norm
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, k)| k == 1)
    }

    pub fn valuation(&self, prime: &PrimeIdealId) -> u32 {
        self.factors
            .iter()
            .find(|(p, _)| p == prime)
            .map_or(0, |&(_, k)| k)
    }

    fn check_same_field(&self, other: &Ideal) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(
                self.field.to_string(),
                other.field.to_string(),
            ));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Ideal) -> Result<Ideal> {
        self.check_same_field(other)?;
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Ok(Ideal::from_factors(self.field, &factors))
    }

    /// Componentwise min of exponents.
    pub fn gcd(&self, other: &Ideal) -> Result<Ideal> {
        self.check_same_field(other)?;
        let mut factors = Vec::new();
        for &(p, k) in &self.factors {
            let k2 = other.valuation(&p);
            if k2 > 0 {
                factors.push((p, k.min(k2)));
            }
        }
        Ok(Ideal::from_factors(self.field, &factors))
    }

    /// Exact quotient; panics if `other` does not divide `self`.
    pub fn div_exact(&self, other: &Ideal) -> Ideal {
        let mut factors = Vec::new();
        for &(p, k) in &self.factors {
            let k2 = other.valuation(&p);
            assert!(k2 <= k, "div_exact: not a divisor");
            if k > k2 {
                factors.push((p, k - k2));
            }
        }
        for (p, _) in &other.factors {
            assert!(self.valuation(p) > 0, "div_exact: not a divisor");
        }
        Ideal::from_factors(self.field, &factors)
    }

    pub fn divides(&self, other: &Ideal) -> bool {
        self.factors
            .iter()
            .all(|&(p, k)| other.valuation(&p) >= k)
    }

    /// All divisors including O_K and self; count = prod(exponent + 1).
    pub fn divisors(&self) -> Vec<Ideal> {
        let mut out = vec![Ideal::one(self.field)];
        for &(p, k) in &self.factors {
            let base = out.clone();
            for j in 1..=k {
                for d in &base {
                    let mut factors = d.factors.clone();
                    factors.push((p, j));
                    out.push(Ideal::from_factors(self.field, &factors));
                }
            }
        }
        out
    }

    /// Sort key: (norm, factorization lex). Deterministic enumeration order.
    pub fn sort_key(&self) -> (u128, Vec<(u64, u32, u32)>) {
        (
            self.norm,
            self.factors
                .iter()
                .map(|(p, k)| (p.p, p.index, *k))
                .collect(),
        )
    }
}

/// All prime ideals of norm <= bound, sorted by (norm, p, index).
pub fn prime_ideals_up_to(field: &NumberField, bound: u64) -> Result<Vec<PrimeIdealId>> {
    let mut out = Vec::new();
    for p in primes_up_to(bound) {
        let sig = field.split_prime(p)?;
        let norm = match p.checked_pow(sig.f) {
            Some(n) => n,
            None => continue,
        };
        if norm > bound {
            continue;
        }
        for index in 0..sig.g {
            out.push(PrimeIdealId {
                p,
                index,
                e: sig.e,
                f: sig.f,
            });
        }
    }
    out.sort_by_key(|q| (q.norm(), q.p, q.index));
    Ok(out)
}

/// Streams every ideal of norm <= bound exactly once, in no particular
/// order. The visitor receives (norm, factors).
pub fn for_each_ideal<F>(field: &NumberField, bound: u64, visit: &mut F) -> Result<()>
where
    F: FnMut(u128, &[(PrimeIdealId, u32)]),
{
    let primes = prime_ideals_up_to(field, bound)?;
    let mut stack: Vec<(PrimeIdealId, u32)> = Vec::new();
    visit(1, &stack);
    fn rec<F>(
        primes: &[PrimeIdealId],
        start: usize,
        norm: u128,
        bound: u128,
        stack: &mut Vec<(PrimeIdealId, u32)>,
        visit: &mut F,
    ) where
        F: FnMut(u128, &[(PrimeIdealId, u32)]),
    {
        for j in start..primes.len() {
            let q = primes[j].norm() as u128;
            if norm * q > bound {
                break; // primes sorted by norm ascending
            }
            let mut n = norm;
            let mut k = 0u32;
            while n * q <= bound {
                n *= q;
                k += 1;
                stack.push((primes[j], k));
                visit(n, stack);
                rec(primes, j + 1, n, bound, stack, visit);
                stack.pop();
            }
        }
    }
    rec(&primes, 0, 1, bound as u128, &mut stack, visit);
    Ok(())
}

/// Exactly all ideals with norm <= bound, each once, sorted by
/// (norm, factorization); includes O_K. Errors when the output would
/// exceed `max_ideals`.
pub fn enumerate_ideals(
    field: &NumberField,
    bound: u64,
    max_ideals: u64,
) -> Result<Vec<Ideal>> {
    let mut out = Vec::new();
    let mut overflow = false;
    for_each_ideal(field, bound, &mut |_norm, factors| {
        if out.len() as u64 >= max_ideals {
            overflow = true;
            return;
        }
        out.push(Ideal::from_factors(*field, factors));
    })?;
    if overflow {
        return Err(Error::ResourceCap(format!(
            "more than {max_ideals} ideals of norm <= {bound} in {field}"
        )));
    }
    out.sort_by_key(|i| i.sort_key());
    Ok(out)
}

/// Array indexed by norm n holding exact (or floating) aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable<T> {
    pub field: String,
    pub tag: String,
    pub n_max: u64,
    values: Vec<T>,
}

impl<T> CoefficientTable<T> {
    pub fn from_values(field: String, tag: String, values: Vec<T>) -> Self {
        assert!(values.len() >= 2, "table must cover n = 1");
        CoefficientTable {
            field,
            tag,
            n_max: (values.len() - 1) as u64,
            values,
        }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn require(&self, n: u64) -> Result<&T> {
        if n > self.n_max {
            return Err(Error::TableCoverage {
                tag: self.tag.clone(),
                have: self.n_max,
                need: n,
            });
        }
        Ok(&self.values[n as usize])
    }
}

impl<T> Index<u64> for CoefficientTable<T> {
    type Output = T;
    fn index(&self, n: u64) -> &T {
        &self.values[n as usize]
    }
}

impl CoefficientTable<i128> {
    pub fn partial_sums(&self) -> CoefficientTable<i128> {
        let mut values = vec![0i128; self.values.len()];
        let mut acc = 0i128;
        for n in 1..self.values.len() {
            acc = acc.checked_add(self.values[n]).expect("partial sum overflow");
            values[n] = acc;
        }
        CoefficientTable::from_values(
            self.field.clone(),
            format!("{}-partial", self.tag),
            values,
        )
    }
}

/// Smallest-prime-factor sieve; spf[n] = 0 marks n prime (or n < 2).
pub fn smallest_prime_factor(n_max: u64) -> Vec<u32> {
    let n = n_max as usize;
    let mut spf = vec![0u32; n + 1];
    let mut i = 2usize;
    while i * i <= n {
        if spf[i] == 0 {
            let mut j = i * i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
        i += 1;
    }
    spf
}

/// Builds the table of a multiplicative function from its prime-power
/// values: local(p, v) is the coefficient at p^v. Deterministic for any
/// internal work partitioning since each entry is computed independently.
pub fn multiplicative_table<T, L>(
    field: &NumberField,
    n_max: u64,
    tag: &str,
    mut local: L,
) -> CoefficientTable<T>
where
    T: Clone + num_traits::One + std::ops::Mul<Output = T>,
    L: FnMut(u64, u32) -> T,
{
    assert!(n_max >= 1);
    let spf = smallest_prime_factor(n_max);
    let mut values: Vec<T> = Vec::with_capacity(n_max as usize + 1);
    values.push(T::one()); // unused slot 0
    values.push(T::one()); // n = 1
    let mut local_cache: HashMap<(u64, u32), T> = HashMap::new();
    for n in 2..=n_max {
        let p = if spf[n as usize] == 0 {
            n
        } else {
            spf[n as usize] as u64
        };
        let mut m = n;
        let mut v = 0u32;
        while m % p == 0 {
            m /= p;
            v += 1;
        }
        let coeff = local_cache
            .entry((p, v))
            .or_insert_with(|| local(p, v))
            .clone();
        let rest = values[m as usize].clone();
        values.push(rest * coeff);
    }
    CoefficientTable::from_values(field.to_string(), tag.to_string(), values)
}

pub fn binomial(n: u64, k: u64) -> i128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    acc
}

/// Number of ideals with norm exactly p^v, given the splitting signature:
/// compositions of v/f into g nonnegative parts.
pub fn local_ideal_count(sig: &SplittingSignature, v: u32) -> i128 {
    if v % sig.f != 0 {
        return 0;
    }
    let w = (v / sig.f) as u64;
    binomial(w + sig.g as u64 - 1, sig.g as u64 - 1)
}

/// a_K(n) = number of ideals of norm exactly n, for all n <= n_max,
/// via multiplicative sieve over prime powers.
pub fn ideal_count_table(field: &NumberField, n_max: u64) -> Result<CoefficientTable<i128>> {
    if n_max > DEFAULT_MAX_TABLE_N {
        return Err(Error::ResourceCap(format!(
            "table length {n_max} exceeds {DEFAULT_MAX_TABLE_N}"
        )));
    }
    let mut sig_cache: HashMap<u64, SplittingSignature> = HashMap::new();
    let f = *field;
    Ok(multiplicative_table(field, n_max, "a_K", move |p, v| {
        let sig = *sig_cache
            .entry(p)
            .or_insert_with(|| f.split_prime(p).expect("sieve primes are prime"));
        local_ideal_count(&sig, v)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::NumberField;

    fn gaussian() -> NumberField {
        NumberField::quadratic(-1).unwrap()
    }

    /// Oracle: ideals of Z[i] correspond one-to-one to Gaussian integers
    /// a+bi with a > 0, b >= 0 (one generator per associate class).
    fn gaussian_ideal_count(n: u64) -> i128 {
        let mut count = 0i128;
        let mut a = 1u64;
        while a * a <= n {
            let rem = n - a * a;
            let b = (rem as f64).sqrt().round() as u64;
            for bb in b.saturating_sub(1)..=b + 1 {
                if a * a + bb * bb == n {
                    count += 1;
                }
            }
            a += 1;
        }
        count
    }

    #[test]
    fn enumerate_rationals() {
        let q = NumberField::rational();
        let ideals = enumerate_ideals(&q, 4, 1000).unwrap();
        let norms: Vec<u128> = ideals.iter().map(|i| i.norm()).collect();
        assert_eq!(norms, [1, 2, 3, 4]);
    }

    #[test]
    fn enumerate_gaussian() {
        let ideals = enumerate_ideals(&gaussian(), 10, 1000).unwrap();
        assert_eq!(ideals.len(), 9);
        let only_unit = enumerate_ideals(&gaussian(), 1, 1000).unwrap();
        assert_eq!(only_unit.len(), 1);
        assert!(only_unit[0].is_one());
    }

    #[test]
    fn enumerate_respects_cap() {
        let q = NumberField::rational();
        assert!(matches!(
            enumerate_ideals(&q, 1000, 10),
            Err(Error::ResourceCap(_))
        ));
    }

    #[test]
    fn count_table_rationals() {
        let q = NumberField::rational();
        let t = ideal_count_table(&q, 100).unwrap();
        for n in 1..=100 {
            assert_eq!(t[n], 1);
        }
    }

    #[test]
    fn count_table_gaussian_examples() {
        let t = ideal_count_table(&gaussian(), 100).unwrap();
        assert_eq!(t[5], 2);
        assert_eq!(t[3], 0);
        assert_eq!(t[25], 3);
        for n in 1..=100u64 {
            assert_eq!(t[n], gaussian_ideal_count(n), "n={n}");
        }
    }

    #[test]
    fn count_table_cyclotomic5() {
        // 11 = 1 mod 5 splits completely; multisets of 1 prime from 4
        let z5 = NumberField::cyclotomic(5).unwrap();
        let t = ideal_count_table(&z5, 20).unwrap();
        assert_eq!(t[11], 4);
        assert_eq!(t[2], 0); // 2 is inert with f=4
        assert_eq!(t[16], 1);
        assert_eq!(t[5], 1); // totally ramified
    }

    #[test]
    fn partial_counts_match_enumeration() {
        for field in [
            NumberField::rational(),
            gaussian(),
            NumberField::quadratic(5).unwrap(),
            NumberField::cyclotomic(5).unwrap(),
        ] {
            let n = 10_000u64;
            let t = ideal_count_table(&field, n).unwrap().partial_sums();
            let mut count = vec![0i128; n as usize + 1];
            for_each_ideal(&field, n, &mut |norm, _| {
                count[norm as usize] += 1;
            })
            .unwrap();
            let mut acc = 0i128;
            for x in 1..=n {
                acc += count[x as usize];
                assert_eq!(t[x], acc, "{field} X={x}");
            }
        }
    }

    #[test]
    fn divisor_listing() {
        let g = gaussian();
        let p2 = prime_ideals_up_to(&g, 5).unwrap();
        // norm-2 prime squared has exponent-chain divisors
        let p = p2[0];
        assert_eq!(p.norm(), 2);
        let i = Ideal::from_factors(g, &[(p, 2)]);
        let divs = i.divisors();
        let mut norms: Vec<u128> = divs.iter().map(|d| d.norm()).collect();
        norms.sort();
        assert_eq!(norms, [1, 2, 4]);
        assert_eq!(Ideal::one(g).divisors().len(), 1);
        // two distinct primes -> 2x2 divisors
        let fives: Vec<_> = p2.iter().filter(|q| q.norm() == 5).collect();
        assert_eq!(fives.len(), 2);
        let i = Ideal::from_factors(g, &[(*fives[0], 1), (*fives[1], 1)]);
        assert_eq!(i.divisors().len(), 4);
    }

    #[test]
    fn gcd_mul_valuation() {
        let g = gaussian();
        let primes = prime_ideals_up_to(&g, 10).unwrap();
        let p = primes.iter().find(|q| q.norm() == 5).unwrap();
        let q = primes.iter().find(|q| q.norm() == 2).unwrap();
        let i = Ideal::from_factors(g, &[(*p, 2), (*q, 1)]);
        let j = Ideal::from_factors(g, &[(*p, 1), (*q, 2)]);
        let gcd = i.gcd(&j).unwrap();
        assert_eq!(gcd.valuation(p), 1);
        assert_eq!(gcd.valuation(q), 1);
        assert_eq!(gcd.norm(), 10);
        assert!(gcd.divides(&i) && gcd.divides(&j));
        assert_eq!(Ideal::one(g).gcd(&i).unwrap(), Ideal::one(g));
        let pp = Ideal::from_factors(g, &[(*p, 1)]);
        let sq = pp.mul(&pp).unwrap();
        assert_eq!(sq.norm(), 25);
        assert_eq!(sq.valuation(p), 2);
    }

    #[test]
    fn field_mismatch_rejected() {
        let a = Ideal::one(NumberField::rational());
        let b = Ideal::one(gaussian());
        assert!(a.mul(&b).is_err());
        assert!(a.gcd(&b).is_err());
    }

    #[test]
    fn norm_is_multiplicative() {
        let g = gaussian();
        let ideals = enumerate_ideals(&g, 40, 10_000).unwrap();
        for i in ideals.iter().take(30) {
            for j in ideals.iter().take(30) {
                let prod = i.mul(j).unwrap();
                assert_eq!(prod.norm(), i.norm() * j.norm());
            }
        }
    }

    #[test]
    fn density_approaches_rho() {
        // (1/X) #{norm <= X} -> pi/4 for Q(i)
        let x = 1_000_000u64;
        let mut count = 0u64;
        for_each_ideal(&gaussian(), x, &mut |_, _| count += 1).unwrap();
        let rho = std::f64::consts::FRAC_PI_4;
        assert!((count as f64 / x as f64 - rho).abs() < 1e-2);
    }
}

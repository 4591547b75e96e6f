//! Dirichlet L-functions on the real line, Dedekind zeta evaluation, and
//! the special constants rho_K, zeta_K(0), zeta_K(2).
//!
//! The cyclotomic zeta_K is assembled from the characters mod m. Some of
//! those characters are imprimitive, so the raw product
//! zeta(s) * prod L(s,chi) carries the wrong Euler factors at primes
//! p | m; we multiply in the exact local corrections derived from the
//! splitting data so that the result matches the ideal Dirichlet series
//! coefficientwise (validated against the a_K sieve).

use num_complex::Complex64;
use num_rational::Ratio;
use serde::Serialize;

use crate::analytic::characters::{dirichlet_characters, kronecker_character, DirichletCharacter};
use crate::analytic::hurwitz::{digamma, hurwitz_zeta, riemann_zeta, POLE_GUARD};
use crate::error::{Error, Result};
use crate::field::{FieldKind, NumberField};

/// L(s, chi) for real s != 1 via the Hurwitz-zeta decomposition
/// L(s,chi) = m^{-s} sum_{a=1..m} chi(a) zeta(s, a/m).
pub fn dirichlet_l(s: f64, chi: &DirichletCharacter) -> Result<Complex64> {
    if chi.is_principal() && s <= 1.0 {
        return Err(Error::PrincipalCharacterPole);
    }
    let m = chi.modulus();
    let mut sum = Complex64::new(0.0, 0.0);
    for a in 1..=m {
        let v = chi.value(a);
        if v.norm_sqr() == 0.0 {
            continue;
        }
        sum += v * hurwitz_zeta(s, a as f64 / m as f64)?;
    }
    Ok(sum * (m as f64).powf(-s))
}

/// L(1, chi) for nonprincipal chi, via the digamma formula
/// L(1,chi) = -(1/m) sum_{a=1..m-1} chi(a) psi(a/m).
pub fn l_at_one(chi: &DirichletCharacter) -> Result<Complex64> {
    if chi.is_principal() {
        return Err(Error::PrincipalCharacterPole);
    }
    let m = chi.modulus();
    let mut sum = Complex64::new(0.0, 0.0);
    for a in 1..m {
        let v = chi.value(a);
        if v.norm_sqr() == 0.0 {
            continue;
        }
        sum += v * digamma(a as f64 / m as f64);
    }
    Ok(-sum / m as f64)
}

/// L(0, chi) through the generalized Bernoulli number
/// B_{1,chi} = (1/m) sum chi(a) a: exactly 0 for even chi, an exact
/// rational for real odd chi, floating otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum LValueAtZero {
    ExactZero,
    Rational(Ratio<i128>),
    Complex(Complex64),
}

impl LValueAtZero {
    pub fn as_complex(&self) -> Complex64 {
        match self {
            LValueAtZero::ExactZero => Complex64::new(0.0, 0.0),
            LValueAtZero::Rational(r) => {
                Complex64::new(*r.numer() as f64 / *r.denom() as f64, 0.0)
            }
            LValueAtZero::Complex(c) => *c,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self, LValueAtZero::ExactZero)
    }
}

pub fn l_at_zero_via_bernoulli(chi: &DirichletCharacter) -> Result<LValueAtZero> {
    if chi.is_principal() {
        return Err(Error::PrincipalCharacterPole);
    }
    if chi.is_even() {
        // a <-> m-a pairing cancels exactly
        return Ok(LValueAtZero::ExactZero);
    }
    let m = chi.modulus();
    if chi.is_real() {
        let mut numer = 0i128;
        for a in 1..m {
            if let Some((k, n)) = chi.exponent(a) {
                numer += if k % n == 0 { a as i128 } else { -(a as i128) };
            }
        }
        // L(0) = -B_{1,chi} = -(1/m) sum chi(a) a
        return Ok(LValueAtZero::Rational(Ratio::new(-numer, m as i128)));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for a in 1..m {
        sum += chi.value(a) * a as f64;
    }
    Ok(LValueAtZero::Complex(-sum / m as f64))
}

fn nonprincipal_characters(m: u64) -> Vec<DirichletCharacter> {
    dirichlet_characters(m)
        .into_iter()
        .filter(|c| !c.is_principal())
        .collect()
}

/// Local Euler-factor correction for the cyclotomic product at s: the raw
/// product has factor (1 - p^{-s})^{-1} at each p | m, the ideal series
/// wants (1 - p^{-fs})^{-g}.
fn cyclotomic_local_correction(field: &NumberField, m: u64, s: f64) -> Result<f64> {
    let mut corr = 1.0f64;
    for p in crate::field::prime_factors(m) {
        let sig = field.split_prime(p)?;
        let pf = p as f64;
        corr *= (1.0 - pf.powf(-s)) / (1.0 - pf.powf(-(sig.f as f64) * s)).powi(sig.g as i32);
    }
    Ok(corr)
}

/// Dedekind zeta at real s != 1, >= 12 significant digits over the
/// argument range used by the main-term formulas.
pub fn dedekind_zeta(field: &NumberField, s: f64) -> Result<f64> {
    if (s - 1.0).abs() < POLE_GUARD {
        return Err(Error::PoleProximity(s));
    }
    match field.kind() {
        FieldKind::Rational => riemann_zeta(s),
        FieldKind::Quadratic { .. } => {
            let chi = kronecker_character(field.fundamental_discriminant().unwrap());
            Ok(riemann_zeta(s)? * dirichlet_l(s, &chi)?.re)
        }
        FieldKind::Cyclotomic { m } => {
            let mut prod = Complex64::new(riemann_zeta(s)?, 0.0);
            for chi in nonprincipal_characters(m) {
                prod *= dirichlet_l(s, &chi)?;
            }
            let corr = cyclotomic_local_correction(field, m, s)?;
            debug_assert!(
                prod.im.abs() <= 1e-9 * prod.re.abs().max(1.0),
                "conjugate characters should pair to a real product"
            );
            Ok(prod.re * corr)
        }
    }
}

/// High-precision constants entering the main-term formulas.
#[derive(Debug, Clone, Serialize)]
pub struct AnalyticConstants {
    pub field: String,
    /// Residue of zeta_K at s = 1 (ideal density).
    pub rho: f64,
    pub zeta0: f64,
    pub zeta2: f64,
    pub digits: u32,
    pub provenance: String,
    /// True when zeta_K(0) vanishes identically (detected exactly through
    /// the Bernoulli route, not by rounding).
    #[serde(skip)]
    pub zeta0_exact_zero: bool,
}

pub fn constants(field: &NumberField) -> Result<AnalyticConstants> {
    let (rho, zeta0, zeta0_exact_zero, provenance) = match field.kind() {
        FieldKind::Rational => (
            1.0,
            -0.5,
            false,
            "rho = 1; zeta(0) = -1/2; zeta(2) via Euler-Maclaurin".to_string(),
        ),
        FieldKind::Quadratic { .. } => {
            let disc = field.fundamental_discriminant().unwrap();
            let chi = kronecker_character(disc);
            let rho = l_at_one(&chi)?.re;
            let l0 = l_at_zero_via_bernoulli(&chi)?;
            let zeta0 = -0.5 * l0.as_complex().re;
            (
                rho,
                zeta0,
                l0.is_exact_zero(),
                format!(
                    "rho = L(1, chi_{disc}) via digamma; zeta_K(0) = zeta(0) L(0, chi) \
                     with L(0, chi) by the Bernoulli route; zeta_K(2) via Hurwitz"
                ),
            )
        }
        FieldKind::Cyclotomic { m } => {
            let chars = nonprincipal_characters(m);
            let mut rho = Complex64::new(1.0, 0.0);
            for chi in &chars {
                rho *= l_at_one(chi)?;
            }
            let mut corr = 1.0f64;
            for p in crate::field::prime_factors(m) {
                let sig = field.split_prime(p)?;
                let pf = p as f64;
                corr *= (1.0 - 1.0 / pf) / (1.0 - pf.powi(-(sig.f as i32))).powi(sig.g as i32);
            }
            // zeta_K(0) vanishes identically as soon as an even nonprincipal
            // character exists; only phi(m) = 2 escapes.
            let has_even = chars.iter().any(|c| c.is_even());
            let (zeta0, exact) = if has_even {
                (0.0, true)
            } else {
                let mut prod = Complex64::new(-0.5, 0.0);
                for chi in &chars {
                    prod *= l_at_zero_via_bernoulli(chi)?.as_complex();
                }
                (prod.re, false)
            };
            (
                rho.re * corr,
                zeta0,
                exact,
                format!(
                    "rho = prod L(1, chi) over nonprincipal chi mod {m} times local \
                     corrections at p | {m}; zeta_K(0) = zeta(0) prod L(0, chi) with \
                     exact-zero detection via character parity; zeta_K(2) via Hurwitz"
                ),
            )
        }
    };
    let zeta2 = dedekind_zeta(field, 2.0)?;
    Ok(AnalyticConstants {
        field: field.to_string(),
        rho,
        zeta0,
        zeta2,
        digits: 13,
        provenance,
        zeta0_exact_zero,
    })
}

//! Hurwitz zeta and digamma on the real line via Euler-Maclaurin.
//!
//! Double precision with compensated summation. The cutoff and correction
//! order are chosen so the Euler-Maclaurin remainder is far below 1e-16
//! relative for the argument ranges used here (|s| <= ~10, a in (0,1]).

use crate::error::{Error, Result};

/// B_2, B_4, ..., B_26.
const BERNOULLI_EVEN: [f64; 13] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
];

/// Distance from s = 1 below which evaluation is refused.
pub const POLE_GUARD: f64 = 1e-6;

/// Hurwitz zeta zeta(s, a) for real s != 1 and a in (0, 1], by direct
/// summation to a cutoff plus Euler-Maclaurin tail corrections.
pub fn hurwitz_zeta(s: f64, a: f64) -> Result<f64> {
    assert!(a > 0.0 && a <= 1.0, "a must lie in (0, 1]");
    if (s - 1.0).abs() < POLE_GUARD {
        return Err(Error::PoleProximity(s));
    }
    let cutoff = 28usize.max((1.5 * s.abs()) as usize + 12);
    // sum_{n=0}^{cutoff-1} (n+a)^{-s}, compensated
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for n in 0..cutoff {
        let term = (n as f64 + a).powf(-s);
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let big = cutoff as f64 + a;
    let mut total = sum + big.powf(1.0 - s) / (s - 1.0) + 0.5 * big.powf(-s);
    // corrections: B_{2j}/(2j)! * s(s+1)...(s+2j-2) * big^{-s-2j+1}
    let mut rising = s; // s(s+1)...(s+2j-2), starts at j=1
    let mut factorial = 2.0f64; // (2j)!
    let mut power = big.powf(-s - 1.0);
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b / factorial * rising * power;
        total += term;
        if term.abs() < 1e-18 * total.abs() {
            break;
        }
        let jj = (2 * j + 2) as f64;
        rising *= (s + jj - 1.0) * (s + jj);
        factorial *= (jj + 1.0) * (jj + 2.0);
        power /= big * big;
    }
    Ok(total)
}

/// Riemann zeta on the real line, s != 1.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    hurwitz_zeta(s, 1.0)
}

/// Digamma for x > 0: downward recurrence into the asymptotic regime,
/// then the standard expansion ln x - 1/(2x) - sum B_{2n}/(2n x^{2n}).
pub fn digamma(mut x: f64) -> f64 {
    assert!(x > 0.0);
    let mut acc = 0.0f64;
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let mut result = x.ln() - 0.5 / x;
    let mut power = inv2;
    for (j, b) in BERNOULLI_EVEN.iter().take(9).enumerate() {
        result -= b / (2.0 * (j as f64 + 1.0)) * power;
        power *= inv2;
    }
    acc + result
}

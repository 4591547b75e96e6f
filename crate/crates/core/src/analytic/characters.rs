//! Dirichlet characters mod m, built from a generator decomposition of
//! the unit group (Z/mZ)^*. Values are exact roots of unity, stored as
//! exponents of e^{2 pi i / L} with L the group exponent.

use num_complex::Complex64;

use crate::field::{euler_phi, gcd, pow_mod};

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletCharacter {
    modulus: u64,
    /// Root-of-unity denominator L: values are e^{2 pi i k / L}.
    root_order: u64,
    /// Exponent k for each residue 0..m; None where gcd(a, m) > 1.
    exps: Vec<Option<u64>>,
    principal: bool,
    even: bool,
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_principal(&self) -> bool {
        self.principal
    }

    /// chi(-1) = +1?
    pub fn is_even(&self) -> bool {
        self.even
    }

    /// Multiplicative order of the character.
    pub fn order(&self) -> u64 {
        let mut g = self.root_order;
        for e in self.exps.iter().flatten() {
            g = gcd(g, *e);
        }
        self.root_order / g
    }

    pub fn value(&self, a: u64) -> Complex64 {
        match self.exps[(a % self.modulus) as usize] {
            None => Complex64::new(0.0, 0.0),
            Some(k) => root_of_unity(k, self.root_order),
        }
    }

    /// Exponent of the root of unity at residue a, when coprime.
    pub fn exponent(&self, a: u64) -> Option<(u64, u64)> {
        self.exps[(a % self.modulus) as usize].map(|k| (k, self.root_order))
    }

    /// Real character (values in {0, +-1})?
    pub fn is_real(&self) -> bool {
        self.order() <= 2
    }

    fn from_exps(modulus: u64, root_order: u64, exps: Vec<Option<u64>>) -> Self {
        let principal = exps.iter().flatten().all(|&k| k == 0);
        let even = if modulus <= 2 {
            true
        } else {
            exps[(modulus - 1) as usize] == Some(0)
        };
        DirichletCharacter {
            modulus,
            root_order,
            exps,
            principal,
            even,
        }
    }
}

fn root_of_unity(k: u64, n: u64) -> Complex64 {
    let k = k % n;
    // exact values on the axes keep real characters exactly +-1
    if 4 * k % n == 0 {
        return match (4 * k / n) % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
    Complex64::new(theta.cos(), theta.sin())
}

/// One cyclic component of (Z/mZ)^*: a generator lifted mod m, its order,
/// and a discrete-log table within its prime-power component.
struct CyclicComponent {
    component_modulus: u64,
    generator_in_component: u64,
    order: u64,
}

impl CyclicComponent {
    fn dlog(&self, a: u64) -> u64 {
        let target = a % self.component_modulus;
        let mut x = 1u64;
        for k in 0..self.order {
            if x == target {
                return k;
            }
            x = x * self.generator_in_component % self.component_modulus;
        }
        panic!("dlog: residue not generated");
    }
}

fn primitive_root_mod_prime_power(p: u64, a: u32) -> u64 {
    let phi_p = p - 1;
    let factors = crate::field::prime_factors(phi_p);
    let mut g = 2u64;
    loop {
        if factors.iter().all(|&q| pow_mod(g, phi_p / q, p) != 1) {
            break;
        }
        g += 1;
    }
    if a == 1 {
        return g;
    }
    // g is primitive mod p; g or g+p is primitive mod p^a
    let p2 = p * p;
    if pow_mod(g % p2, p - 1, p2) == 1 {
        g + p
    } else {
        g
    }
}

fn unit_group_components(m: u64) -> Vec<CyclicComponent> {
    let mut components = Vec::new();
    let mut rest = m;
    // factor of 2
    let mut two = 1u64;
    while rest % 2 == 0 {
        rest /= 2;
        two *= 2;
    }
    match two {
        1 | 2 => {}
        4 => components.push(CyclicComponent {
            component_modulus: 4,
            generator_in_component: 3,
            order: 2,
        }),
        _ => {
            components.push(CyclicComponent {
                component_modulus: two,
                generator_in_component: two - 1,
                order: 2,
            });
            components.push(CyclicComponent {
                component_modulus: two,
                generator_in_component: 5,
                order: two / 4,
            });
        }
    }
    let mut n = rest;
    let mut p = 3u64;
    while p * p <= n {
        if n % p == 0 {
            let mut pa = 1u64;
            let mut a = 0u32;
            while n % p == 0 {
                n /= p;
                pa *= p;
                a += 1;
            }
            components.push(CyclicComponent {
                component_modulus: pa,
                generator_in_component: primitive_root_mod_prime_power(p, a),
                order: euler_phi(pa),
            });
        }
        p += 2;
    }
    if n > 1 {
        components.push(CyclicComponent {
            component_modulus: n,
            generator_in_component: primitive_root_mod_prime_power(n, 1),
            order: n - 1,
        });
    }
    components
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Exponent of residue a against each component. The two generators of
/// (Z/2^t)^* for t >= 3 share a modulus and are non-cyclic jointly, so
/// they are decomposed together as a = (-1)^s 5^k.
fn component_dlogs(components: &[CyclicComponent], a: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(components.len());
    let mut i = 0;
    while i < components.len() {
        let c = &components[i];
        if c.component_modulus >= 8 && c.generator_in_component == c.component_modulus - 1 {
            let md = c.component_modulus;
            let target = a % md;
            let order5 = components[i + 1].order;
            let mut x = 1u64;
            let mut found = None;
            for k in 0..order5 {
                if x == target {
                    found = Some((0, k));
                    break;
                }
                if md - x == target {
                    found = Some((1, k));
                    break;
                }
                x = x * 5 % md;
            }
            let (s, k) = found.expect("odd residue mod 2^t must be +-5^k");
            out.push(s);
            out.push(k);
            i += 2;
        } else {
            out.push(c.dlog(a));
            i += 1;
        }
    }
    out
}

/// All phi(m) Dirichlet characters mod m, deterministic order with the
/// principal character first.
pub fn dirichlet_characters(m: u64) -> Vec<DirichletCharacter> {
    assert!(m >= 1);
    if m <= 2 {
        let exps = (0..m.max(1))
            .map(|a| if m == 1 || a % 2 == 1 { Some(0) } else { None })
            .collect();
        return vec![DirichletCharacter::from_exps(m.max(1), 1, exps)];
    }
    let components = unit_group_components(m);
    let root_order = components.iter().fold(1u64, |l, c| lcm(l, c.order));
    // dlog of every coprime residue against every component
    let residues: Vec<u64> = (0..m).filter(|&a| gcd(a, m) == 1).collect();
    let dlogs: Vec<Vec<u64>> = residues
        .iter()
        .map(|&a| component_dlogs(&components, a))
        .collect();
    let mut out = Vec::with_capacity(euler_phi(m) as usize);
    let mut tuple = vec![0u64; components.len()];
    loop {
        let mut exps = vec![None; m as usize];
        for (ri, &a) in residues.iter().enumerate() {
            let mut k = 0u64;
            for (ci, c) in components.iter().enumerate() {
                k = (k + tuple[ci] % c.order * (root_order / c.order) % root_order
                    * dlogs[ri][ci])
                    % root_order;
            }
            exps[a as usize] = Some(k);
        }
        out.push(DirichletCharacter::from_exps(m, root_order, exps));
        // mixed-radix increment, last component fastest
        let mut i = components.len();
        loop {
            if i == 0 {
                debug_assert_eq!(out.len() as u64, euler_phi(m));
                return out;
            }
            i -= 1;
            tuple[i] += 1;
            if tuple[i] < components[i].order {
                break;
            }
            tuple[i] = 0;
        }
    }
}

/// The quadratic character a -> (disc | a) as a Dirichlet character
/// mod |disc|; disc must be a fundamental discriminant.
pub fn kronecker_character(disc: i64) -> DirichletCharacter {
    let m = disc.unsigned_abs();
    let exps = (0..m)
        .map(|a| match crate::field::kronecker(disc, a as i64) {
            0 => None,
            1 => Some(0),
            _ => Some(1),
        })
        .collect();
    DirichletCharacter::from_exps(m, 2, exps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_orders() {
        assert_eq!(dirichlet_characters(4).len(), 2);
        let chars = dirichlet_characters(5);
        assert_eq!(chars.len(), 4);
        assert!(chars[0].is_principal());
        let mut orders: Vec<u64> = chars.iter().map(|c| c.order()).collect();
        orders.sort();
        assert_eq!(orders, [1, 2, 4, 4]);
        assert_eq!(dirichlet_characters(12).len(), 4);
        assert_eq!(dirichlet_characters(1).len(), 1);
        assert_eq!(dirichlet_characters(40).len(), 16);
    }

    #[test]
    fn complete_multiplicativity() {
        for m in [3u64, 4, 5, 8, 9, 12, 15, 16, 21, 24, 35] {
            for chi in dirichlet_characters(m) {
                assert_eq!(chi.value(1), Complex64::new(1.0, 0.0));
                for a in 1..m {
                    for b in 1..m {
                        let lhs = chi.value(a * b);
                        let rhs = chi.value(a) * chi.value(b);
                        assert!((lhs - rhs).norm() < 1e-12, "m={m} a={a} b={b}");
                    }
                }
            }
        }
    }

    #[test]
    fn orthogonality() {
        for m in [3u64, 4, 5, 8, 12, 15] {
            let chars = dirichlet_characters(m);
            for (i, chi) in chars.iter().enumerate() {
                for (j, psi) in chars.iter().enumerate() {
                    let s: Complex64 = (0..m).map(|a| chi.value(a) * psi.value(a).conj()).sum();
                    let expected = if i == j { euler_phi(m) as f64 } else { 0.0 };
                    assert!(
                        (s - Complex64::new(expected, 0.0)).norm() < 1e-10,
                        "m={m} i={i} j={j} s={s}"
                    );
                }
            }
        }
    }

    #[test]
    fn closed_under_conjugation() {
        for m in [5u64, 7, 9, 15, 16] {
            let chars = dirichlet_characters(m);
            for chi in &chars {
                let found = chars.iter().any(|psi| {
                    (0..m).all(|a| (psi.value(a) - chi.value(a).conj()).norm() < 1e-12)
                });
                assert!(found, "m={m}");
            }
        }
    }

    #[test]
    fn kronecker_mod_four() {
        let chi = kronecker_character(-4);
        assert!(!chi.is_even());
        assert!(!chi.is_principal());
        assert_eq!(chi.value(1).re, 1.0);
        assert_eq!(chi.value(3).re, -1.0);
        assert_eq!(chi.value(2).norm(), 0.0);
        // matches the nonprincipal character mod 4
        let chars = dirichlet_characters(4);
        let nonprincipal = chars.iter().find(|c| !c.is_principal()).unwrap();
        for a in 0..4 {
            assert!((chi.value(a) - nonprincipal.value(a)).norm() < 1e-15);
        }
    }

    #[test]
    fn kronecker_mod_five_is_even() {
        let chi = kronecker_character(5);
        assert!(chi.is_even());
        assert!(chi.is_real());
    }

    #[test]
    fn parity_flags() {
        for m in [5u64, 8, 12, 15] {
            for chi in dirichlet_characters(m) {
                let v = chi.value(m - 1).re;
                assert_eq!(chi.is_even(), v > 0.0, "m={m}");
            }
        }
    }
}

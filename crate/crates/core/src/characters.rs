//! Dirichlet characters mod `q`.
//!
//! The unit group `(Z/qZ)^*` is split into cyclic factors through the CRT over
//! the prime powers of `q`: one factor per odd prime power (a primitive root),
//! and at `2^e` the factor `<-1>` for `e >= 2` plus `<5>` for `e >= 3`.
//! A character is an exponent vector `(a_1, .., a_r)` with `0 <= a_i < ord_i`
//! and `chi(g_i) = exp(2 pi i a_i / ord_i)`. Characters are indexed by the
//! lexicographic order of that vector, so index 0 is always principal.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Serialized identity of a character: `{q, index}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharId {
    pub q: u64,
    pub index: usize,
}

impl fmt::Display for CharId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "chi_{}[{}]", self.q, self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct CyclicFactor {
    /// Generator as a residue mod q (lifted through the CRT).
    generator: u64,
    order: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletCharacter {
    q: u64,
    index: usize,
    orders: Vec<u64>,
    exponents: Vec<u64>,
    /// `values[n mod q]`.
    values: Vec<Complex64>,
    conductor: u64,
    parity: u8,
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn id(&self) -> CharId {
        CharId {
            q: self.q,
            index: self.index,
        }
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    /// `chi(n)` for any integer `n`.
    pub fn value(&self, n: i64) -> Complex64 {
        let r = n.rem_euclid(self.q as i64) as usize;
        self.values[r]
    }

    /// The full value table indexed by residue.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.q
    }

    pub fn is_principal(&self) -> bool {
        self.exponents.iter().all(|&a| a == 0)
    }

    /// `nu = (1 - chi(-1)) / 2`.
    pub fn parity(&self) -> u8 {
        self.parity
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn conjugate(&self) -> DirichletCharacter {
        let exponents: Vec<u64> = self
            .exponents
            .iter()
            .zip(&self.orders)
            .map(|(&a, &o)| (o - a) % o)
            .collect();
        DirichletCharacter {
            q: self.q,
            index: rank(&exponents, &self.orders),
            orders: self.orders.clone(),
            exponents,
            values: self.values.iter().map(|v| v.conj()).collect(),
            conductor: self.conductor,
            parity: self.parity,
        }
    }

    /// `tau(chi) = sum_{m mod q} chi(m) e^{2 pi i m / q}`.
    pub fn gauss_sum(&self) -> Complex64 {
        let q = self.q;
        (0..q)
            .map(|m| self.values[m as usize] * root_of_unity(m, q))
            .sum()
    }

    /// Smallest `n >= 2` with `chi(n) != 0`.
    pub fn first_nonzero_after_one(&self) -> u64 {
        (2..).find(|&n| gcd(n, self.q) == 1).unwrap()
    }
}

/// All `phi(q)` characters mod `q`, principal first.
pub fn enumerate_characters(q: u64) -> Result<Vec<DirichletCharacter>> {
    if q == 0 {
        return Err(Error::domain("modulus must be positive"));
    }
    let factors = unit_group_factors(q);
    let orders: Vec<u64> = factors.iter().map(|f| f.order).collect();
    let dlog = discrete_logs(q, &factors);
    let lcm_order = orders.iter().fold(1u64, |acc, &o| lcm(acc, o));

    let count: u64 = orders.iter().product();
    let mut out = Vec::with_capacity(count as usize);
    let mut exps = vec![0u64; orders.len()];
    for index in 0..count as usize {
        let values: Vec<Complex64> = (0..q as usize)
            .map(|r| match &dlog[r] {
                None => Complex64::new(0.0, 0.0),
                Some(logs) => {
                    // angle = sum a_i e_i / ord_i, as a fraction of lcm_order
                    let num = exps
                        .iter()
                        .zip(logs)
                        .zip(&orders)
                        .fold(0u64, |acc, ((&a, &e), &o)| {
                            (acc + a * e % o * (lcm_order / o)) % lcm_order
                        });
                    root_of_unity(num, lcm_order)
                }
            })
            .collect();
        let parity = if q <= 2 || values[(q - 1) as usize].re > 0.0 {
            0
        } else {
            1
        };
        let conductor = conductor_of(q, &values);
        out.push(DirichletCharacter {
            q,
            index,
            orders: orders.clone(),
            exponents: exps.clone(),
            values,
            conductor,
            parity,
        });
        increment(&mut exps, &orders);
    }
    Ok(out)
}

/// Look up one character by `(q, index)`.
pub fn character(q: u64, index: usize) -> Result<DirichletCharacter> {
    let mut all = enumerate_characters(q)?;
    if index >= all.len() {
        return Err(Error::domain(format!(
            "character index {index} out of range: there are {} characters mod {q}",
            all.len()
        )));
    }
    Ok(all.swap_remove(index))
}

fn increment(exps: &mut [u64], orders: &[u64]) {
    for i in (0..exps.len()).rev() {
        exps[i] += 1;
        if exps[i] < orders[i] {
            return;
        }
        exps[i] = 0;
    }
}

fn rank(exps: &[u64], orders: &[u64]) -> usize {
    exps.iter()
        .zip(orders)
        .fold(0usize, |acc, (&a, &o)| acc * o as usize + a as usize)
}

/// `exp(2 pi i num / den)`, exact at multiples of a quarter turn.
fn root_of_unity(num: u64, den: u64) -> Complex64 {
    let num = num % den;
    if num == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 4 * num % den == 0 {
        return match 4 * num / den {
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let theta = std::f64::consts::TAU * (num as f64 / den as f64);
    Complex64::new(theta.cos(), theta.sin())
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn prime_powers(mut q: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            let mut e = 0;
            while q % p == 0 {
                q /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if q > 1 {
        out.push((q, 1));
    }
    out
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

fn multiplicative_order(g: u64, m: u64) -> u64 {
    let mut x = g % m;
    let mut k = 1;
    while x != 1 {
        x = (x as u128 * g as u128 % m as u128) as u64;
        k += 1;
    }
    k
}

/// Smallest primitive root mod `p^e`, `p` odd.
fn primitive_root_prime_power(p: u64, e: u32) -> u64 {
    let pe = p.pow(e);
    let phi = pe / p * (p - 1);
    (2..pe)
        .find(|&g| g % p != 0 && multiplicative_order(g, pe) == phi)
        .expect("odd prime powers have primitive roots")
}

/// CRT lift: `x = r mod m`, `x = 1 mod q/m`.
fn crt_lift(r: u64, m: u64, q: u64) -> u64 {
    let other = q / m;
    if other == 1 {
        return r % q;
    }
    // x = r + m * k with m k = 1 - r mod other
    let m_inv = (1..other)
        .find(|&y| (m % other) * y % other == 1)
        .expect("coprime moduli");
    let rhs = (1 + other - r % other) % other;
    let k = rhs * m_inv % other;
    (r + m * k) % q
}

fn unit_group_factors(q: u64) -> Vec<CyclicFactor> {
    let mut out = Vec::new();
    for (p, e) in prime_powers(q) {
        let pe = p.pow(e);
        if p == 2 {
            if e >= 2 {
                out.push(CyclicFactor {
                    generator: crt_lift(pe - 1, pe, q),
                    order: 2,
                });
            }
            if e >= 3 {
                out.push(CyclicFactor {
                    generator: crt_lift(5, pe, q),
                    order: 1 << (e - 2),
                });
            }
        } else {
            let g = primitive_root_prime_power(p, e);
            out.push(CyclicFactor {
                generator: crt_lift(g, pe, q),
                order: pe / p * (p - 1),
            });
        }
    }
    out
}

/// Exponent vector of every unit mod `q`, `None` for non-units.
fn discrete_logs(q: u64, factors: &[CyclicFactor]) -> Vec<Option<Vec<u64>>> {
    let mut dlog: Vec<Option<Vec<u64>>> = vec![None; q as usize];
    let orders: Vec<u64> = factors.iter().map(|f| f.order).collect();
    let total: u64 = orders.iter().product();
    let mut exps = vec![0u64; factors.len()];
    for _ in 0..total {
        let n = factors
            .iter()
            .zip(&exps)
            .fold(1 % q, |acc, (f, &a)| {
                (acc as u128 * pow_mod(f.generator, a, q) as u128 % q as u128) as u64
            });
        dlog[n as usize] = Some(exps.clone());
        increment(&mut exps, &orders);
    }
    dlog
}

fn divisors_ascending(q: u64) -> Vec<u64> {
    (1..=q).filter(|d| q % d == 0).collect()
}

fn conductor_of(q: u64, values: &[Complex64]) -> u64 {
    for f in divisors_ascending(q) {
        let induced = (1..q)
            .filter(|&n| gcd(n, q) == 1 && n % f == 1 % f)
            .all(|n| (values[n as usize] - 1.0).norm() < 1e-12);
        if induced {
            return f;
        }
    }
    q
}

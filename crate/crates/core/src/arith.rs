//! Integer utilities: a smallest-prime-factor sieve, the von Mangoldt
//! function, and the divisor convolutions `sum_{X = m n} Lambda(n) log(m)`.

use num_complex::Complex64;

use crate::characters::DirichletCharacter;
use crate::{Error, Result};

pub const DEFAULT_SIEVE_LIMIT: usize = 1_000_000;

/// Smallest prime factor of every integer up to `limit`.
///
/// Built once, then read-only.
#[derive(Debug, Clone)]
pub struct FactorSieve {
    limit: usize,
    spf: Vec<u32>,
}

impl FactorSieve {
    pub fn new(limit: usize) -> Self {
        let limit = limit.max(1);
        let mut spf = vec![0u32; limit + 1];
        let mut primes: Vec<u32> = Vec::new();
        // linear sieve
        for i in 2..=limit {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let ip = i * p as usize;
                if p > si || ip > limit {
                    break;
                }
                spf[ip] = p;
            }
        }
        if limit >= 1 {
            spf[1] = 1;
        }
        FactorSieve { limit, spf }
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    /// Smallest prime factor of `n` (1 for `n = 1`).
    pub fn smallest_prime_factor(&self, n: usize) -> Result<usize> {
        self.check(n)?;
        Ok(self.spf[n] as usize)
    }

    pub fn is_prime(&self, n: usize) -> bool {
        n >= 2 && n <= self.limit && self.spf[n] as usize == n
    }

    fn check(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::domain("argument must be a positive integer"));
        }
        if n > self.limit {
            return Err(Error::domain(format!(
                "{n} exceeds the sieve limit {}",
                self.limit
            )));
        }
        Ok(())
    }

    /// Prime factorization as (prime, exponent) pairs in increasing order.
    pub fn factorize(&self, n: usize) -> Result<Vec<(usize, u32)>> {
        self.check(n)?;
        let mut out: Vec<(usize, u32)> = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.spf[m] as usize;
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        Ok(out)
    }

    /// All positive divisors of `n`, unsorted.
    pub fn divisors(&self, n: usize) -> Result<Vec<usize>> {
        let mut divs = vec![1usize];
        for (p, e) in self.factorize(n)? {
            let len = divs.len();
            let mut pk = 1usize;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        Ok(divs)
    }

    /// `Lambda(n)`: `log p` when `n = p^k`, otherwise 0.
    pub fn von_mangoldt(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        if n == 1 {
            return Ok(0.0);
        }
        let p = self.spf[n] as usize;
        let mut m = n;
        while m % p == 0 {
            m /= p;
        }
        Ok(if m == 1 { (p as f64).ln() } else { 0.0 })
    }

    /// `sum_{X = m n} Lambda(n) log(m)` over ordered factorizations.
    ///
    /// Only prime-power `n` contribute, so the sum runs over `p^j | X`.
    pub fn lambda_log_conv(&self, x: usize) -> Result<f64> {
        let mut acc = 0.0;
        for (p, e) in self.factorize(x)? {
            let logp = (p as f64).ln();
            let mut pj = 1usize;
            for _ in 0..e {
                pj *= p;
                acc += logp * ((x / pj) as f64).ln();
            }
        }
        Ok(acc)
    }

    /// `sum_{k = m n} Lambda(n) conj(chi(n)) conj(chi(m)) log(m)`.
    ///
    /// Enumerates every divisor pair; it does not use complete multiplicativity,
    /// so it can be checked against `conj(chi(k)) * lambda_log_conv(k)`.
    pub fn twisted_lambda_log_conv(&self, k: usize, chi: &DirichletCharacter) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for n in self.divisors(k)? {
            let lam = self.von_mangoldt(n)?;
            if lam == 0.0 {
                continue;
            }
            let m = k / n;
            if m == 1 {
                continue;
            }
            let w = chi.value(n as i64).conj() * chi.value(m as i64).conj();
            acc += w * (lam * (m as f64).ln());
        }
        Ok(acc)
    }
}

impl Default for FactorSieve {
    fn default() -> Self {
        FactorSieve::new(DEFAULT_SIEVE_LIMIT)
    }
}

//! Residue arithmetic, the Legendre character, discrete logarithms and
//! scalar quadratic Gauss sums.
//!
//! Gauss sums use the negative exponent convention throughout:
//!
//! ```text
//! G(k, a) = sum_{n=0}^{k-1} exp(-2 pi i a n^2 / k)
//! ```

use std::collections::HashMap;

use num_complex::Complex;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::summation::TreeSum;

/// A complex Gauss sum or invariant value.
pub type GaussValue<T = f64> = Complex<T>;

/// Deterministic primality by trial division; intended for desk-scale moduli.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors in increasing order.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn mod_pow(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = u128::from(modulus);
    let mut b = u128::from(base) % m;
    let mut acc = 1u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Canonical representative of `x` in `[0, k)`.
pub fn reduce(x: i128, k: u64) -> u64 {
    x.rem_euclid(i128::from(k)) as u64
}

/// Multiplicative inverse of `a` modulo `k`, if it exists.
pub fn mod_inv(a: i128, k: u64) -> Option<u64> {
    let a = reduce(a, k) as i128;
    let g = a.extended_gcd(&i128::from(k));
    if g.gcd != 1 {
        return None;
    }
    Some(reduce(g.x, k))
}

fn require_odd_prime(k: u64) -> Result<()> {
    if k < 3 || k.is_multiple_of(2) || !is_prime(k) {
        return Err(Error::NotOddPrime(k));
    }
    Ok(())
}

/// Residue arithmetic modulo `k = p^e` for an odd prime `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModK {
    k: u64,
    p: u64,
    e: u32,
}

impl ModK {
    /// Factors `k` as a power of an odd prime.
    pub fn new(k: u64) -> Result<Self> {
        if k < 3 || k.is_multiple_of(2) {
            return Err(Error::NotOddPrimePower(k));
        }
        let factors = prime_factors(k);
        if factors.len() != 1 {
            return Err(Error::NotOddPrimePower(k));
        }
        let p = factors[0];
        let mut e = 0;
        let mut rest = k;
        while rest > 1 {
            rest /= p;
            e += 1;
        }
        Ok(Self { k, p, e })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn reduce(&self, x: i128) -> u64 {
        reduce(x, self.k)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        self.reduce(i128::from(a) + i128::from(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (u128::from(a) * u128::from(b) % u128::from(self.k)) as u64
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        mod_inv(i128::from(a), self.k)
    }

    /// p-adic valuation of the residue `x`, capped at `e` (so `0` maps to `e`).
    pub fn valuation(&self, x: u64) -> u32 {
        let mut x = x % self.k;
        if x == 0 {
            return self.e;
        }
        let mut v = 0;
        while x.is_multiple_of(self.p) {
            x /= self.p;
            v += 1;
        }
        v
    }

    /// `p^v` for `v <= e`.
    pub fn prime_power(&self, v: u32) -> u64 {
        self.p.pow(v)
    }
}

/// Legendre symbol `(n / k)` via Euler's criterion `n^((k-1)/2) mod k`.
pub fn legendre_chi(n: i64, k: u64) -> Result<i8> {
    require_odd_prime(k)?;
    Ok(euler_criterion(reduce(i128::from(n), k), k))
}

fn euler_criterion(n: u64, k: u64) -> i8 {
    if n == 0 {
        return 0;
    }
    match mod_pow(n, (k - 1) / 2, k) {
        1 => 1,
        r if r == k - 1 => -1,
        r => unreachable!("Euler criterion gave {r} mod prime {k}"),
    }
}

/// Tabulated Legendre character of an odd prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Character {
    k: u64,
    table: Vec<i8>,
}

impl Character {
    pub fn new(k: u64) -> Result<Self> {
        require_odd_prime(k)?;
        let table = (0..k).map(|n| euler_criterion(n, k)).collect();
        Ok(Self { k, table })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn table(&self) -> &[i8] {
        &self.table
    }

    pub fn chi(&self, n: i64) -> i8 {
        self.table[reduce(i128::from(n), self.k) as usize]
    }
}

fn is_generator_of(g: u64, k: u64, factors: &[u64]) -> bool {
    !g.is_multiple_of(k) && factors.iter().all(|&q| mod_pow(g, (k - 1) / q, k) != 1)
}

/// Smallest generator of the multiplicative group modulo the odd prime `k`.
pub fn primitive_root(k: u64) -> Result<u64> {
    require_odd_prime(k)?;
    let factors = prime_factors(k - 1);
    Ok((2..k)
        .find(|&g| is_generator_of(g, k, &factors))
        .expect("every prime has a primitive root"))
}

/// Baby-step giant-step discrete logarithm: the `x` in `[0, k-1)` with
/// `g^x = n (mod k)`.
pub fn discrete_log(n: i64, g: u64, k: u64) -> Result<u64> {
    require_odd_prime(k)?;
    if !is_generator_of(g, k, &prime_factors(k - 1)) {
        return Err(Error::NotGenerator { g, k });
    }
    let n = reduce(i128::from(n), k);
    if n == 0 {
        return Err(Error::NotCoprime { a: 0, k });
    }
    let order = k - 1;
    let step = (order as f64).sqrt().ceil() as u64;

    let mut baby = HashMap::with_capacity(step as usize);
    let mut cur = 1u64;
    for j in 0..step {
        baby.entry(cur).or_insert(j);
        cur = (u128::from(cur) * u128::from(g) % u128::from(k)) as u64;
    }

    // g^(-step)
    let giant = mod_pow(mod_inv(i128::from(g), k).expect("generator is a unit"), step, k);
    let mut gamma = n;
    for i in 0..=step {
        if let Some(&j) = baby.get(&gamma) {
            return Ok((i * step + j) % order);
        }
        gamma = (u128::from(gamma) * u128::from(giant) % u128::from(k)) as u64;
    }
    unreachable!("a generator reaches every unit")
}

/// `exp(sign * 2 pi i r / q)` with `r` first folded into `(-q/2, q/2]`.
pub(crate) fn root_of_unity<T: Scalar>(r: u64, q: u64, sign: i8) -> Complex<T> {
    let r = r % q;
    let centered = if 2 * r > q { r as i128 - q as i128 } else { r as i128 };
    let angle = T::of(f64::from(sign)) * T::TAU() * T::of_int(centered) / T::of_int(q as i128);
    Complex::from_polar(T::one(), angle)
}

/// Direct `O(k)` evaluation of `G(k, a)`.
///
/// Accepts any modulus `k >= 2`; `a n^2` is reduced exactly before it becomes
/// an angle.
pub fn gauss_sum_brute<T: Scalar>(k: u64, a: i64) -> Result<GaussValue<T>> {
    if k < 2 {
        return Err(Error::ModulusTooSmall { k, min: 2 });
    }
    let a = reduce(i128::from(a), k);
    let m = u128::from(k);
    let sum: TreeSum<Complex<T>> = (0..k)
        .map(|n| {
            let n2 = u128::from(n) * u128::from(n) % m;
            let r = (u128::from(a) * n2 % m) as u64;
            root_of_unity::<T>(r, k, -1)
        })
        .collect();
    Ok(sum.total())
}

/// Closed form `chi(a) * conj(eps_k) * sqrt(k)` for odd prime `k`, where
/// `eps_k` is 1 for `k = 1 mod 4` and `i` for `k = 3 mod 4`.
pub fn gauss_sum_closed<T: Scalar>(k: u64, a: i64) -> Result<GaussValue<T>> {
    require_odd_prime(k)?;
    let chi = euler_criterion(reduce(i128::from(a), k), k);
    if chi == 0 {
        return Err(Error::NotCoprime { a, k });
    }
    let root = T::of_int(i128::from(k)).sqrt() * T::of(f64::from(chi));
    Ok(if k % 4 == 1 {
        Complex::new(root, T::zero())
    } else {
        Complex::new(T::zero(), -root)
    })
}

/// Phase `3 pi (k - 2) / (4 k)` acquired by the unnormalized Wilson-loop sum
/// under a blow-up.
pub fn kirby_phase<T: Scalar>(k: u64) -> Result<T> {
    if k < 2 {
        return Err(Error::ModulusTooSmall { k, min: 2 });
    }
    let k = T::of_int(i128::from(k));
    Ok(T::of(3.0) * T::PI() * (k - T::of(2.0)) / (T::of(4.0) * k))
}

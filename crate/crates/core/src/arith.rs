//! Small-integer number theory: factorization, divisors, valuations, divisor sums.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}

/// `ord_p(n)`; `n` must be non-zero.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0 && p >= 2);
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

pub fn is_squarefree(n: u64) -> bool {
    factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Positive divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factorize(n) {
        let len = ds.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n as usize + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n as usize {
        if sieve[i] {
            let mut j = i * i;
            while j <= n as usize {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&k| sieve[k as usize]).collect()
}

/// `σ_k(n) = Σ_{d | n} d^k`, with `σ_k(0) = 0`.
pub fn sigma(k: u32, n: u64) -> BigInt {
    if n == 0 {
        return BigInt::zero();
    }
    divisors(n)
        .into_iter()
        .map(|d| BigInt::from(d).pow(k))
        .fold(BigInt::zero(), |a, b| a + b)
}

/// `p^e` as a big integer.
pub fn big_pow(p: u64, e: u32) -> BigInt {
    if e == 0 {
        return BigInt::one();
    }
    BigInt::from(p).pow(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization() {
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(97), vec![(97, 1)]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(valuation(48, 2), 4);
        assert!(is_squarefree(30) && !is_squarefree(12));
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }

    #[test]
    fn divisor_sums() {
        assert_eq!(sigma(3, 2), BigInt::from(9));
        assert_eq!(sigma(11, 2), BigInt::from(2049));
        assert_eq!(sigma(3, 5), BigInt::from(126));
        assert_eq!(sigma(1, 0), BigInt::from(0));
    }
}

//! q-analog integers: `[k]_q`, `[k]_q!`, and Gaussian binomials.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// `[k]_q = 1 + q + ... + q^{k-1}`.
pub fn q_integer(k: u64, q: u64) -> BigUint {
    let q = BigUint::from(q);
    let mut acc = BigUint::zero();
    let mut pow = BigUint::one();
    for _ in 0..k {
        acc += &pow;
        pow *= &q;
    }
    acc
}

/// `[k]_q` as a machine integer; panics on overflow (never at desk scale).
pub fn q_int(k: usize, q: u32) -> u64 {
    q_integer(k as u64, q as u64)
        .to_u64()
        .expect("q-integer overflows u64")
}

/// `[k]_q! = [1]_q [2]_q ... [k]_q`.
pub fn q_factorial(k: u64, q: u64) -> BigUint {
    (1..=k).fold(BigUint::one(), |acc, j| acc * q_integer(j, q))
}

/// The Gaussian binomial `(n choose k)_q`, or 0 when `k > n`.
pub fn gaussian_binomial(n: u64, k: u64, q: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let qb = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..k {
        num *= qb.pow((n) as u32) - qb.pow(i as u32);
        den *= qb.pow(k as u32) - qb.pow(i as u32);
    }
    num / den
}

pub fn gauss(n: usize, k: usize, q: u32) -> u64 {
    gaussian_binomial(n as u64, k as u64, q as u64)
        .to_u64()
        .expect("Gaussian binomial overflows u64")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(gaussian_binomial(4, 2, 2), BigUint::from(35u32));
        assert_eq!(gaussian_binomial(5, 2, 2), BigUint::from(155u32));
        assert_eq!(gaussian_binomial(7, 0, 5), BigUint::one());
        assert_eq!(gaussian_binomial(2, 3, 2), BigUint::zero());
        assert_eq!(q_int(3, 2), 7);
        assert_eq!(q_factorial(3, 2), BigUint::from(21u32));
    }

    #[test]
    fn pascal_recurrence() {
        // (n choose k)_q = (n-1 choose k-1)_q + q^k (n-1 choose k)_q
        for q in [2u64, 3, 4, 5] {
            for n in 1..10u64 {
                for k in 1..=n {
                    let lhs = gaussian_binomial(n, k, q);
                    let rhs = gaussian_binomial(n - 1, k - 1, q)
                        + BigUint::from(q).pow(k as u32) * gaussian_binomial(n - 1, k, q);
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn large_values_are_exact() {
        // symmetric and nonzero far past u64 range
        let a = gaussian_binomial(40, 17, 7);
        assert_eq!(a, gaussian_binomial(40, 23, 7));
        assert!(a.bits() > 64);
    }
}

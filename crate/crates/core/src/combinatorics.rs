use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Binomial coefficient; zero when `k > n`.
pub fn binom(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

pub fn binom_f64(n: usize, k: usize) -> f64 {
    binom(n, k) as f64
}

pub fn binom_big(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// All subsets of `{0, .., n-1}` with exactly `k` elements, as bitmasks.
pub fn subsets_of_size(n: usize, k: usize) -> impl Iterator<Item = usize> {
    (0usize..(1 << n)).filter(move |m| m.count_ones() as usize == k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_binomials() {
        assert_eq!(binom(4, 2), 6);
        assert_eq!(binom(10, 3), 120);
        assert_eq!(binom(3, 5), 0);
        assert_eq!(binom(0, 0), 1);
        assert_eq!(binom_big(60, 30).to_string(), "118264581564861424");
    }

    #[test]
    fn subset_counts() {
        for n in 0..8 {
            for k in 0..=n {
                assert_eq!(subsets_of_size(n, k).count() as u64, binom(n, k));
            }
        }
    }
}

//! Digit sums, the p-adic valuation of `n!`, and packages of `p` consecutive
//! integers.

use crate::prime::Prime;

/// Sum of the base-p digits of `n`.
pub fn digit_sum(n: u64, p: Prime) -> u64 {
    let p = p.get();
    let mut rest = n;
    let mut sum = 0;
    while rest > 0 {
        sum += rest % p;
        rest /= p;
    }
    sum
}

/// Exponent of `p` in `n!` via Legendre's formula `(n - s_p(n)) / (p - 1)`.
///
/// The division is checked at runtime: a nonzero remainder would mean the
/// digit sum is wrong, so it panics rather than returning a rounded value.
pub fn vp_factorial(n: u64, p: Prime) -> u64 {
    let numerator = n - digit_sum(n, p);
    let denominator = p.get() - 1;
    assert_eq!(
        numerator % denominator,
        0,
        "n - s_p(n) not divisible by p - 1 (n={n}, p={p})"
    );
    numerator / denominator
}

/// Exponent of `p` in `n!` as `sum_{i>=1} floor(n / p^i)`.
pub fn vp_factorial_oracle(n: u64, p: Prime) -> u64 {
    let n = n as u128;
    let p = p.get() as u128;
    let mut power = p;
    let mut total = 0u128;
    while power <= n {
        total += n / power;
        power *= p;
    }
    total as u64
}

/// The `k`-th package: the `p` integers `k*p ..= k*p + p - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Package {
    pub index: u64,
    pub prime: Prime,
}

impl Package {
    pub fn first(&self) -> u64 {
        self.index * self.prime.get()
    }

    pub fn last(&self) -> u64 {
        self.first() + (self.prime.get() - 1)
    }

    pub fn range(&self) -> std::ops::RangeInclusive<u64> {
        self.first()..=self.last()
    }

    pub fn len(&self) -> u64 {
        self.prime.get()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub fn package_of(n: u64, p: Prime) -> Package {
    Package {
        index: n / p.get(),
        prime: p,
    }
}

/// The valuation shared by every `n!` in package `k`, read off at `n = k*p`.
pub fn package_valuation(k: u64, p: Prime) -> u64 {
    vp_factorial(k * p.get(), p)
}

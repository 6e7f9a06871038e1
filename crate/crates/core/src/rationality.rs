//! Rational numbers and their eventually periodic p-adic expansions.
//!
//! A p-adic integer is rational exactly when its digit expansion is
//! eventually periodic. Both directions are implemented here as algorithms:
//! long division turns `a/b` into digits, and the geometric-series closed form
//! turns a preperiod and period back into `a/b`. [`detect_eventual_period`]
//! searches a finite digit prefix for the shortest period; a failed search
//! within stated bounds is evidence of irrationality, never a proof.

use crate::error::{Error, Result};
use crate::padic::PAdicInt;
use crate::prime::Prime;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// A reduced fraction with positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rational {
    numer: BigInt,
    denom: BigInt,
}

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let (mut numer, mut denom) = (numer.into(), denom.into());
        if denom.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if denom.is_negative() {
            numer = -numer;
            denom = -denom;
        }
        let g = numer.gcd(&denom);
        if !g.is_one() {
            numer /= &g;
            denom /= &g;
        }
        Ok(Rational { numer, denom })
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Rational {
            numer: n.into(),
            denom: BigInt::one(),
        }
    }

    pub fn numer(&self) -> &BigInt {
        &self.numer
    }

    pub fn denom(&self) -> &BigInt {
        &self.denom
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom.is_one() {
            write!(f, "{}", self.numer)
        } else {
            write!(f, "{}/{}", self.numer, self.denom)
        }
    }
}

impl FromStr for Rational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|e| Error::Parse(format!("bad integer {t:?}: {e}")))
        };
        match s.split_once('/') {
            Some((a, b)) => Rational::new(parse(a)?, parse(b)?),
            None => Ok(Rational::integer(parse(s)?)),
        }
    }
}

/// Digits `preperiod` followed by `period` repeated forever, both in
/// expansion order (coefficient of `p^0` first).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EventualPeriod {
    preperiod: Vec<u64>,
    period: Vec<u64>,
}

fn check_digits(digits: &[u64], p: Prime, offset: usize) -> Result<()> {
    match digits.iter().position(|&d| d >= p.get()) {
        Some(i) => Err(Error::DigitOutOfRange {
            digit: digits[i],
            position: offset + i,
            prime: p.get(),
        }),
        None => Ok(()),
    }
}

/// Smallest `t` dividing `block.len()` such that `block` is a repetition of
/// its first `t` digits.
fn primitive_root_len(block: &[u64]) -> usize {
    let n = block.len();
    (1..=n)
        .filter(|t| n.is_multiple_of(*t))
        .find(|&t| block.iter().zip(&block[t..]).all(|(a, b)| a == b))
        .unwrap_or(n)
}

impl EventualPeriod {
    pub fn new(preperiod: Vec<u64>, period: Vec<u64>, p: Prime) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        check_digits(&preperiod, p, 0)?;
        check_digits(&period, p, preperiod.len())?;
        Ok(EventualPeriod { preperiod, period })
    }

    pub fn preperiod(&self) -> &[u64] {
        &self.preperiod
    }

    pub fn period(&self) -> &[u64] {
        &self.period
    }

    /// Digit `i` of the expansion.
    pub fn digit(&self, i: usize) -> u64 {
        match i.checked_sub(self.preperiod.len()) {
            None => self.preperiod[i],
            Some(j) => self.period[j % self.period.len()],
        }
    }

    /// First `n` digits of the expansion.
    pub fn expand(&self, n: usize) -> Vec<u64> {
        (0..n).map(|i| self.digit(i)).collect()
    }

    /// The same expansion with a primitive period and the shortest preperiod.
    pub fn canonical(&self) -> Self {
        let t = primitive_root_len(&self.period);
        let mut period: Vec<u64> = self.period[..t].to_vec();
        let mut preperiod = self.preperiod.clone();
        while let Some(&last) = preperiod.last() {
            if last != period[t - 1] {
                break;
            }
            preperiod.pop();
            period.rotate_right(1);
        }
        EventualPeriod { preperiod, period }
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }
}

fn small_inverse_mod(b: u64, p: u64) -> u64 {
    // Extended Euclid on (b mod p, p); b is a unit mod p.
    let (mut r0, mut r1) = ((b % p) as i128, p as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    debug_assert_eq!(r0, 1);
    s0.rem_euclid(p as i128) as u64
}

/// Digits of `a/b` by p-adic long division: with remainder `r` (initially
/// `a`), emit `d = r * b^-1 mod p`, then set `r = (r - d*b) / p`.
pub fn rational_to_padic(q: &Rational, p: Prime, precision: usize) -> Result<PAdicInt> {
    let pv = p.get();
    let b_mod_p = q
        .denom
        .mod_floor(&BigInt::from(pv))
        .to_u64()
        .expect("below p");
    if b_mod_p == 0 {
        return Err(Error::NotIntegral {
            den: q.denom.to_string(),
            prime: pv,
        });
    }
    PAdicInt::zero(p, precision)?;
    let b_inv = small_inverse_mod(b_mod_p, pv);
    let digits = match (q.numer.to_i64(), q.denom.to_i64()) {
        // |r| stays below max(|a|, b) and d*b < 2^63 * 2^63, so i128 suffices.
        (Some(a), Some(b)) => {
            let (p128, b) = (pv as i128, b as i128);
            let mut r = a as i128;
            (0..precision)
                .map(|_| {
                    let d = (r.rem_euclid(p128) as u128 * b_inv as u128 % pv as u128) as i128;
                    r = (r - d * b) / p128;
                    d as u64
                })
                .collect()
        }
        _ => {
            let big_p = BigInt::from(pv);
            let mut r = q.numer.clone();
            (0..precision)
                .map(|_| {
                    let r_mod = r.mod_floor(&big_p).to_u64().expect("below p");
                    let d = (r_mod as u128 * b_inv as u128 % pv as u128) as u64;
                    r = (&r - &q.denom * d) / &big_p;
                    d
                })
                .collect()
        }
    };
    PAdicInt::from_digits(p, digits)
}

/// Sizes for expanding `a/b`: `(preperiod_bound, period_bound)`.
///
/// The long-division remainder lands in `[-b, 0]` within as many steps as
/// `|a|` has base-p digits, and from there the digits are purely periodic
/// with period dividing the order of `p` mod `b` (so at most `max(b - 1, 1)`).
pub fn expansion_bounds(q: &Rational, p: Prime) -> (usize, usize) {
    let big_p = BigInt::from(p.get());
    let mut rest = q.numer.abs();
    let mut len = 0;
    while !rest.is_zero() {
        rest /= &big_p;
        len += 1;
    }
    let period = (&q.denom - 1u32).to_usize().unwrap_or(usize::MAX).max(1);
    (len, period)
}

/// `A + P p^l / (1 - p^t)` with `A`, `P` the preperiod and period read as
/// base-p integers.
pub fn periodic_to_rational(ep: &EventualPeriod, p: Prime) -> Rational {
    let big_p = BigInt::from(p.get());
    let as_int = |digits: &[u64]| {
        digits
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, &d| acc * &big_p + d)
    };
    let head = as_int(&ep.preperiod);
    let block = as_int(&ep.period);
    let shift = num_traits::pow(big_p.clone(), ep.preperiod.len());
    let denom = BigInt::one() - num_traits::pow(big_p, ep.period.len());
    Rational::new(&head * &denom + block * shift, denom).expect("1 - p^t is nonzero")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Detection {
    Found(EventualPeriod),
    /// Enough digits were examined and no candidate fits the bounds.
    NoneWithinBounds,
    /// No candidate fits, but the input is shorter than
    /// `max_preperiod + min_repeats * max_period`, so the bounds were not fully
    /// exercised.
    InsufficientData,
}

/// Search limits for [`detect_eventual_period`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DetectionBounds {
    pub max_preperiod: usize,
    pub max_period: usize,
    pub min_repeats: usize,
}

impl DetectionBounds {
    pub const DEFAULT_MIN_REPEATS: usize = 3;

    /// Digits needed before a miss counts as `NoneWithinBounds`.
    pub fn required_digits(&self) -> usize {
        self.max_preperiod + self.min_repeats * self.max_period
    }
}

/// JSON shape of a detection result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DetectionSummary {
    pub status: &'static str,
    pub preperiod_len: Option<usize>,
    pub period_len: Option<usize>,
    pub preperiod: Option<Vec<u64>>,
    pub period: Option<Vec<u64>>,
}

impl Detection {
    pub fn status(&self) -> &'static str {
        match self {
            Detection::Found(_) => "found",
            Detection::NoneWithinBounds => "none-within-bounds",
            Detection::InsufficientData => "insufficient-data",
        }
    }

    pub fn summary(&self) -> DetectionSummary {
        let found = match self {
            Detection::Found(ep) => Some(ep),
            _ => None,
        };
        DetectionSummary {
            status: self.status(),
            preperiod_len: found.map(|ep| ep.preperiod.len()),
            period_len: found.map(|ep| ep.period.len()),
            preperiod: found.map(|ep| ep.preperiod.clone()),
            period: found.map(|ep| ep.period.clone()),
        }
    }
}

/// Finds the eventual period of a finite digit prefix, minimizing the period
/// length `t` first and the preperiod length `l` second.
///
/// A candidate `(l, t)` is accepted when `digits[i + t] == digits[i]` for every
/// `l <= i < M - t`, `l <= max_preperiod`, `t <= max_period` and at least
/// `min_repeats` whole periods fit in `[l, M)`.
pub fn detect_eventual_period(
    digits: &[u64],
    p: Prime,
    bounds: DetectionBounds,
) -> Result<Detection> {
    check_digits(digits, p, 0)?;
    let m = digits.len();
    let repeats = bounds.min_repeats.max(1);
    for t in 1..=bounds.max_period.min(m) {
        if repeats * t > m {
            break;
        }
        // Scan down from the end; the first mismatch fixes the least l for t.
        let mut start = 0;
        for i in (0..m - t).rev() {
            if digits[i] != digits[i + t] {
                start = i + 1;
                break;
            }
        }
        if start <= bounds.max_preperiod && m - start >= repeats * t {
            let ep = EventualPeriod {
                preperiod: digits[..start].to_vec(),
                period: digits[start..start + t].to_vec(),
            };
            return Ok(Detection::Found(ep));
        }
    }
    if m < bounds.required_digits() {
        Ok(Detection::InsufficientData)
    } else {
        Ok(Detection::NoneWithinBounds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::modulus;
    use proptest::prelude::*;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a, b).unwrap()
    }

    fn bounds(l: usize, t: usize, r: usize) -> DetectionBounds {
        DetectionBounds {
            max_preperiod: l,
            max_period: t,
            min_repeats: r,
        }
    }

    /// Order of p modulo m by brute force (m coprime to p).
    fn order_mod(pv: u64, m: u64) -> u64 {
        if m == 1 {
            return 1;
        }
        let mut x = pv % m;
        let mut k = 1;
        while x != 1 {
            x = x * pv % m;
            k += 1;
        }
        k
    }

    #[test]
    fn rational_reduces() {
        let r = q(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!("10/5".parse::<Rational>().unwrap(), Rational::integer(2));
        assert_eq!(Rational::new(1, 0), Err(Error::ZeroDenominator));
    }

    #[test]
    fn to_padic_examples() {
        for pr in [2, 3, 5, 7, 101] {
            let one = rational_to_padic(&Rational::integer(1), p(pr), 6).unwrap();
            assert_eq!(one, PAdicInt::one(p(pr), 6).unwrap());
            let minus_one = rational_to_padic(&Rational::integer(-1), p(pr), 6).unwrap();
            assert!(minus_one.digits().iter().all(|&d| d == pr - 1));
        }
        let half = rational_to_padic(&q(1, 2), p(3), 6).unwrap();
        assert_eq!(half.digits(), &[2, 1, 1, 1, 1, 1]);
        assert_eq!(half.to_biguint(), 365u32.into());
    }

    #[test]
    fn to_padic_rejects_non_integral() {
        assert!(matches!(
            rational_to_padic(&q(1, 6), p(3), 4),
            Err(Error::NotIntegral { prime: 3, .. })
        ));
    }

    #[test]
    fn big_path_agrees_with_small_path() {
        let huge = Rational::new(
            BigInt::from(7) * BigInt::from(u64::MAX) + 3,
            BigInt::from(10),
        )
        .unwrap();
        let x = rational_to_padic(&huge, p(3), 80).unwrap();
        let m = BigInt::from(modulus(p(3), 80));
        let lhs = (BigInt::from(x.to_biguint()) * huge.denom()).mod_floor(&m);
        assert_eq!(lhs, huge.numer().mod_floor(&m));
    }

    #[test]
    fn from_period_examples() {
        for pr in [2, 3, 5, 11] {
            let ep = EventualPeriod::new(vec![], vec![pr - 1], p(pr)).unwrap();
            assert_eq!(periodic_to_rational(&ep, p(pr)), Rational::integer(-1));
        }
        let ep = EventualPeriod::new(vec![2], vec![1], p(3)).unwrap();
        assert_eq!(periodic_to_rational(&ep, p(3)), q(1, 2));
        let ep = EventualPeriod::new(vec![], vec![1], p(3)).unwrap();
        assert_eq!(periodic_to_rational(&ep, p(3)), q(-1, 2));
        assert_eq!(
            EventualPeriod::new(vec![], vec![], p(3)),
            Err(Error::EmptyPeriod)
        );
        assert!(EventualPeriod::new(vec![3], vec![1], p(3)).is_err());
    }

    #[test]
    fn canonical_form() {
        let ep = EventualPeriod::new(vec![0, 1, 2, 1, 2], vec![1, 2, 1, 2], p(3)).unwrap();
        let c = ep.canonical();
        assert_eq!(c.preperiod(), &[0]);
        assert_eq!(c.period(), &[1, 2]);
        assert!(c.is_canonical());
        assert_eq!(c.expand(40), ep.expand(40));
    }

    #[test]
    fn detect_examples() {
        let mut digits = vec![2u64];
        digits.extend(std::iter::repeat_n(1, 63));
        let Detection::Found(ep) = detect_eventual_period(&digits, p(3), bounds(8, 8, 3)).unwrap()
        else {
            panic!("period of 1/2 not found");
        };
        assert_eq!((ep.preperiod(), ep.period()), (&[2u64][..], &[1u64][..]));

        let flat = vec![4u64; 30];
        let Detection::Found(ep) = detect_eventual_period(&flat, p(5), bounds(4, 4, 3)).unwrap()
        else {
            panic!("constant sequence not found");
        };
        assert_eq!((ep.preperiod().len(), ep.period()), (0, &[4u64][..]));

        assert!(detect_eventual_period(&[0, 5], p(5), bounds(1, 1, 3)).is_err());
    }

    #[test]
    fn detect_three_valued() {
        // 0,1,0,0,1,0,0,0,1,... has no eventual period.
        let mut digits = Vec::new();
        for gap in 1..40 {
            digits.extend(std::iter::repeat_n(0, gap));
            digits.push(1);
        }
        let m = digits.len();
        assert_eq!(
            detect_eventual_period(&digits, p(2), bounds(m / 4, m / 4, 3)).unwrap(),
            Detection::NoneWithinBounds
        );
        assert_eq!(
            detect_eventual_period(&digits[..20], p(2), bounds(10, 10, 3)).unwrap(),
            Detection::InsufficientData
        );
        assert_eq!(
            Detection::InsufficientData.summary().status,
            "insufficient-data"
        );
        assert_eq!(Detection::NoneWithinBounds.summary().period_len, None);
    }

    #[test]
    fn detect_respects_repeats() {
        // [0,1,2] twice only: needs R=2 to accept t=3.
        let digits = [0, 1, 2, 0, 1, 2];
        assert!(matches!(
            detect_eventual_period(&digits, p(3), bounds(0, 3, 2)).unwrap(),
            Detection::Found(_)
        ));
        assert_eq!(
            detect_eventual_period(&digits, p(3), bounds(0, 3, 3)).unwrap(),
            Detection::InsufficientData
        );
    }

    #[test]
    fn detected_period_divides_order() {
        for pr in [2u64, 3, 5, 7] {
            for b in (1..200i64).filter(|b| b % pr as i64 != 0) {
                for a in [-3 * b - 1, -b, -1, 0, 1, 7, 1000] {
                    let r = q(a, b);
                    let (l, t) = expansion_bounds(&r, p(pr));
                    let n = l + 4 * t + 4;
                    let x = rational_to_padic(&r, p(pr), n).unwrap();
                    let found = detect_eventual_period(x.digits(), p(pr), bounds(l, t, 3)).unwrap();
                    let Detection::Found(ep) = found else {
                        panic!("no period for {r} in Z_{pr}");
                    };
                    let rb = r.denom().to_u64().unwrap();
                    assert_eq!(
                        order_mod(pr, rb) % ep.period().len() as u64,
                        0,
                        "{r} p={pr}"
                    );
                    assert_eq!(periodic_to_rational(&ep, p(pr)), r);
                }
            }
        }
    }

    fn arb_prime() -> impl Strategy<Value = u64> {
        prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])
    }

    proptest! {
        #[test]
        fn residue_check(pr in arb_prime(), a in -10_000i64..=10_000, b in 1i64..=10_000, n in 1usize..200) {
            prop_assume!(b % pr as i64 != 0);
            let r = q(a, b);
            let x = rational_to_padic(&r, p(pr), n).unwrap();
            let m = BigInt::from(modulus(p(pr), n));
            let lhs = (BigInt::from(x.to_biguint()) * r.denom()).mod_floor(&m);
            prop_assert_eq!(lhs, r.numer().mod_floor(&m));
        }

        #[test]
        fn roundtrip_rational(pr in arb_prime(), a in -10_000i64..=10_000, b in 1i64..=2_000) {
            prop_assume!(b % pr as i64 != 0);
            let r = q(a, b);
            let (l, t) = expansion_bounds(&r, p(pr));
            let x = rational_to_padic(&r, p(pr), l + 4 * t).unwrap();
            let found = detect_eventual_period(x.digits(), p(pr), bounds(l, t, 3)).unwrap();
            let Detection::Found(ep) = found else {
                return Err(TestCaseError::fail(format!("no period for {r}")));
            };
            prop_assert!(ep.is_canonical());
            prop_assert_eq!(periodic_to_rational(&ep, p(pr)), r);
        }

        #[test]
        fn roundtrip_period(
            pr in arb_prime(),
            pre in prop::collection::vec(0u64..13, 0..8),
            per in prop::collection::vec(0u64..13, 1..8),
        ) {
            let pre: Vec<u64> = pre.into_iter().map(|d| d % pr).collect();
            let per: Vec<u64> = per.into_iter().map(|d| d % pr).collect();
            let ep = EventualPeriod::new(pre, per, p(pr)).unwrap().canonical();
            let r = periodic_to_rational(&ep, p(pr));
            prop_assert!(r.denom().mod_floor(&BigInt::from(pr)) != BigInt::zero());
            for n in [1usize, 7, 40] {
                let x = rational_to_padic(&r, p(pr), n).unwrap();
                prop_assert_eq!(x.digits().to_vec(), ep.expand(n));
            }
        }
    }
}

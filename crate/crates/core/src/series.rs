//! The two factorial-valuation series, summed exactly mod `p^N`.
//!
//! * `alpha`: `sum_{n>=0} p^{v_p(n!)}`
//! * `factorial`: `sum_{n>=0} n!`
//!
//! Both terms have valuation `v_p(n!)`, which is nondecreasing in `n`, so once
//! it reaches `N` every later term vanishes mod `p^N`. The stop test always
//! uses the Legendre valuation, never the truncated digits: a factorial kept
//! mod `p^N` reads as zero long before its true valuation is known.

use crate::error::Result;
use crate::padic::{CarryTrace, PAdicInt};
use crate::prime::Prime;
use crate::valuation::vp_factorial;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    Alpha,
    Factorial,
}

impl fmt::Display for SeriesKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SeriesKind::Alpha => "alpha",
            SeriesKind::Factorial => "factorial",
        })
    }
}

impl FromStr for SeriesKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "alpha" => Ok(SeriesKind::Alpha),
            "factorial" => Ok(SeriesKind::Factorial),
            other => Err(format!(
                "unknown series {other:?} (expected alpha or factorial)"
            )),
        }
    }
}

/// Smallest `n` with `v_p(n!) >= N`; terms from here on are zero mod `p^N`.
pub fn stop_index(p: Prime, precision: usize) -> u64 {
    let target = precision as u64;
    // v_p((N p)!) >= N, so the answer lies in [0, N p].
    let (mut lo, mut hi) = (0u64, target.saturating_mul(p.get()));
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if vp_factorial(mid, p) >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// One owned partial-sum snapshot `S_n = sum_{m<=n} term(m) mod p^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialSumEvent {
    pub n: u64,
    pub term_valuation: u64,
    pub sum: PAdicInt,
    pub carries: CarryTrace,
    pub digit_count: usize,
}

/// A borrowed view of the running sum right after term `n` was added.
#[derive(Debug)]
pub struct Step<'a> {
    pub n: u64,
    pub term_valuation: u64,
    pub sum: &'a PAdicInt,
    pub carries: CarryTrace,
    pub digit_count: usize,
    /// Digit positions this step may have changed; all others are untouched.
    pub touched: Range<usize>,
}

impl Step<'_> {
    pub fn to_event(&self) -> PartialSumEvent {
        PartialSumEvent {
            n: self.n,
            term_valuation: self.term_valuation,
            sum: self.sum.clone(),
            carries: self.carries.clone(),
            digit_count: self.digit_count,
        }
    }
}

/// Sequential partial-sum engine. Each [`advance`](Self::advance) adds the
/// next term and lends out the running sum, so long streams do not copy
/// `N`-digit snapshots.
pub struct PartialSums {
    kind: SeriesKind,
    prime: Prime,
    sum: PAdicInt,
    factorial: PAdicInt,
    next: u64,
    digit_count: usize,
}

impl PartialSums {
    pub fn new(kind: SeriesKind, prime: Prime, precision: usize) -> Result<Self> {
        Ok(PartialSums {
            kind,
            prime,
            sum: PAdicInt::zero(prime, precision)?,
            factorial: PAdicInt::one(prime, precision)?,
            next: 0,
            digit_count: 0,
        })
    }

    pub fn sum(&self) -> &PAdicInt {
        &self.sum
    }

    /// Index of the term the next call to `advance` will add.
    pub fn next_index(&self) -> u64 {
        self.next
    }

    pub fn advance(&mut self) -> Step<'_> {
        let n = self.next;
        let term_valuation = vp_factorial(n, self.prime);
        let precision = self.sum.precision();
        let (carries, touched) = match self.kind {
            SeriesKind::Alpha => {
                let carries = self.sum.add_power_of_p_assign(term_valuation);
                let start = usize::try_from(term_valuation)
                    .unwrap_or(usize::MAX)
                    .min(precision);
                let end = match carries.positions().last() {
                    Some(&top) => top + 2,
                    None => start + 1,
                }
                .min(precision);
                if start < precision {
                    if end == precision && carries.positions().last() == Some(&(precision - 1)) {
                        // Wrapped past p^N: the leading digits may have vanished.
                        self.digit_count = self.sum.digit_count();
                    } else {
                        self.digit_count = self.digit_count.max(end);
                    }
                }
                (carries, start..end)
            }
            SeriesKind::Factorial => {
                if n > 0 {
                    self.factorial = self.factorial.mul_by_natural(n);
                }
                let (sum, carries) = self
                    .sum
                    .add(&self.factorial)
                    .expect("running sum and term share prime and precision");
                self.sum = sum;
                self.digit_count = self.sum.digit_count();
                (carries, 0..precision)
            }
        };
        self.next += 1;
        Step {
            n,
            term_valuation,
            sum: &self.sum,
            carries,
            digit_count: self.digit_count,
            touched,
        }
    }
}

/// `S_n` for `n = 0..=n_max` as owned snapshots. Meant for short streams;
/// use [`PartialSums`] directly when `n_max * N` is large.
pub fn stream_partial_sums(
    kind: SeriesKind,
    p: Prime,
    precision: usize,
    n_max: u64,
) -> Result<Vec<PartialSumEvent>> {
    let mut engine = PartialSums::new(kind, p, precision)?;
    Ok((0..=n_max).map(|_| engine.advance().to_event()).collect())
}

/// `S_n mod p^N`, adding every term through `n` (no early exit).
pub fn partial_sum(kind: SeriesKind, p: Prime, n: u64, precision: usize) -> Result<PAdicInt> {
    let mut engine = PartialSums::new(kind, p, precision)?;
    for _ in 0..=n {
        engine.advance();
    }
    Ok(engine.sum)
}

/// The limit of the series mod `p^N`.
pub fn sum_series(kind: SeriesKind, p: Prime, precision: usize) -> Result<PAdicInt> {
    let stop = stop_index(p, precision);
    let mut engine = PartialSums::new(kind, p, precision)?;
    while engine.next_index() < stop {
        engine.advance();
    }
    Ok(engine.sum)
}

/// [`sum_series`] with the term range split across `threads` workers.
///
/// Only the alpha series is split; its terms are independent. The factorial
/// series needs the running product and is summed sequentially. The result is
/// identical for every thread count.
pub fn sum_series_with_threads(
    kind: SeriesKind,
    p: Prime,
    precision: usize,
    threads: usize,
) -> Result<PAdicInt> {
    if threads <= 1 || kind == SeriesKind::Factorial {
        return sum_series(kind, p, precision);
    }
    let stop = stop_index(p, precision);
    let chunk = stop.div_ceil(threads as u64).max(1);
    let ranges: Vec<Range<u64>> = (0..stop)
        .step_by(chunk as usize)
        .map(|start| start..(start + chunk).min(stop))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    let zero = PAdicInt::zero(p, precision)?;
    let parts: Vec<PAdicInt> = pool.install(|| {
        ranges
            .into_par_iter()
            .map(|range| {
                let mut acc = zero.clone();
                for n in range {
                    acc.add_power_of_p_assign(vp_factorial(n, p));
                }
                acc
            })
            .collect()
    });
    Ok(parts.iter().fold(zero.clone(), |acc, part| {
        acc.add(part).expect("compatible").0
    }))
}

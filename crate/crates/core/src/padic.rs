//! Truncated p-adic integers: residues mod `p^N` held as base-p digit vectors.
//!
//! Digits are stored least significant first, so `digits[i]` is the
//! coefficient of `p^i`. Rendering goes the other way round (most significant
//! digit first), which is how expansions are usually written down by hand.
//!
//! Building a value from a natural number `>= p^N` reduces it mod `p^N`; this
//! is the ring operation, not an error.

use crate::error::{Error, Result};
use crate::prime::Prime;
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use std::fmt;

/// Positions where a column sum (incoming carry included) reached `p`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CarryTrace {
    positions: Vec<usize>,
}

impl CarryTrace {
    pub fn count(&self) -> usize {
        self.positions.len()
    }

    /// Ascending carry positions.
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// `trimmed` drops leading zeros, `fixed-width` keeps all `N` digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderMode {
    Trimmed,
    FixedWidth,
}

/// `compact` writes one character per digit (`0-9a-z`), `list` writes
/// comma-separated decimal digits and works for any prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderStyle {
    Compact,
    List,
}

/// Largest prime for which [`RenderStyle::Compact`] is available.
pub const COMPACT_MAX_PRIME: u64 = 36;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PAdicInt {
    prime: Prime,
    digits: Vec<u64>,
}

impl fmt::Debug for PAdicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let style = if self.prime.get() <= COMPACT_MAX_PRIME {
            RenderStyle::Compact
        } else {
            RenderStyle::List
        };
        let shown = self
            .render(RenderMode::Trimmed, style)
            .unwrap_or_else(|_| "?".into());
        write!(
            f,
            "PAdicInt({shown}; p={}, N={})",
            self.prime,
            self.precision()
        )
    }
}

fn check_precision(precision: usize) -> Result<()> {
    if precision == 0 {
        Err(Error::ZeroPrecision)
    } else {
        Ok(())
    }
}

impl PAdicInt {
    pub fn zero(prime: Prime, precision: usize) -> Result<Self> {
        check_precision(precision)?;
        Ok(PAdicInt {
            prime,
            digits: vec![0; precision],
        })
    }

    pub fn one(prime: Prime, precision: usize) -> Result<Self> {
        let mut z = Self::zero(prime, precision)?;
        z.digits[0] = 1;
        Ok(z)
    }

    /// Builds a value from LSB-first digits; precision is the slice length.
    pub fn from_digits(prime: Prime, digits: Vec<u64>) -> Result<Self> {
        check_precision(digits.len())?;
        if let Some((position, &digit)) = digits.iter().enumerate().find(|(_, &d)| d >= prime.get())
        {
            return Err(Error::DigitOutOfRange {
                digit,
                position,
                prime: prime.get(),
            });
        }
        Ok(PAdicInt { prime, digits })
    }

    /// The residue of `n` mod `p^N`.
    pub fn from_natural(n: impl Into<BigUint>, prime: Prime, precision: usize) -> Result<Self> {
        check_precision(precision)?;
        let p = BigUint::from(prime.get());
        let mut rest: BigUint = n.into();
        let mut digits = Vec::with_capacity(precision);
        while digits.len() < precision && !rest.is_zero() {
            let (q, r) = rest.div_rem(&p);
            digits.push(r.to_u64().expect("digit below p fits u64"));
            rest = q;
        }
        digits.resize(precision, 0);
        Ok(PAdicInt { prime, digits })
    }

    /// The residue of a signed integer mod `p^N`.
    pub fn from_integer(n: &BigInt, prime: Prime, precision: usize) -> Result<Self> {
        let x = Self::from_natural(n.magnitude().clone(), prime, precision)?;
        Ok(if n.sign() == Sign::Minus { x.neg() } else { x })
    }

    /// `p^k` mod `p^N`: a single digit 1 at position `k`, or zero when `k >= N`.
    pub fn power_of_p(k: u64, prime: Prime, precision: usize) -> Result<Self> {
        let mut z = Self::zero(prime, precision)?;
        if let Ok(k) = usize::try_from(k) {
            if k < precision {
                z.digits[k] = 1;
            }
        }
        Ok(z)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn precision(&self) -> usize {
        self.digits.len()
    }

    /// LSB-first digits.
    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn digit(&self, position: usize) -> u64 {
        self.digits[position]
    }

    pub fn is_zero(&self) -> bool {
        self.digits.iter().all(|&d| d == 0)
    }

    /// One past the highest nonzero digit; zero for the zero element.
    pub fn digit_count(&self) -> usize {
        self.digits
            .iter()
            .rposition(|&d| d != 0)
            .map_or(0, |i| i + 1)
    }

    /// Number of positions (from 0) at which the value is divisible by `p`,
    /// capped at the precision for the zero element.
    pub fn valuation(&self) -> usize {
        self.digits
            .iter()
            .position(|&d| d != 0)
            .unwrap_or(self.precision())
    }

    fn ensure_compatible(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime || self.precision() != other.precision() {
            return Err(Error::Mismatch {
                left_prime: self.prime.get(),
                left_precision: self.precision(),
                right_prime: other.prime.get(),
                right_precision: other.precision(),
            });
        }
        Ok(())
    }

    /// Schoolbook addition mod `p^N` with a log of every overflowing column.
    /// A carry out of the top digit is dropped but still recorded.
    pub fn add(&self, other: &Self) -> Result<(Self, CarryTrace)> {
        self.ensure_compatible(other)?;
        let p = self.prime.get();
        let mut digits = Vec::with_capacity(self.precision());
        let mut trace = CarryTrace::default();
        let mut carry = 0u64;
        for (i, (&a, &b)) in self.digits.iter().zip(&other.digits).enumerate() {
            // a, b < p < 2^63, so the column sum cannot overflow u64.
            let column = a + b + carry;
            if column >= p {
                digits.push(column - p);
                carry = 1;
                trace.positions.push(i);
            } else {
                digits.push(column);
                carry = 0;
            }
        }
        Ok((
            PAdicInt {
                prime: self.prime,
                digits,
            },
            trace,
        ))
    }

    /// In-place `self += p^k`. Equivalent to `add(power_of_p(k))`, but only
    /// touches the digits the carry actually reaches.
    pub fn add_power_of_p_assign(&mut self, k: u64) -> CarryTrace {
        let mut trace = CarryTrace::default();
        let p = self.prime.get();
        let Ok(mut i) = usize::try_from(k) else {
            return trace;
        };
        while i < self.digits.len() {
            let column = self.digits[i] + 1;
            if column >= p {
                self.digits[i] = column - p;
                trace.positions.push(i);
                i += 1;
            } else {
                self.digits[i] = column;
                break;
            }
        }
        trace
    }

    /// Additive inverse mod `p^N`: complement every digit, then add one.
    pub fn neg(&self) -> Self {
        let top = self.prime.get() - 1;
        let mut out = PAdicInt {
            prime: self.prime,
            digits: self.digits.iter().map(|&d| top - d).collect(),
        };
        out.add_power_of_p_assign(0);
        out
    }

    /// `self * m` mod `p^N`, digit by digit with a wide carry.
    pub fn mul_by_natural(&self, m: u64) -> Self {
        let p = self.prime.get() as u128;
        let m = m as u128;
        let mut carry: u128 = 0;
        let digits = self
            .digits
            .iter()
            .map(|&d| {
                // d*m < 2^127 and carry <= m, so this stays inside u128.
                let column = d as u128 * m + carry;
                carry = column / p;
                (column % p) as u64
            })
            .collect();
        PAdicInt {
            prime: self.prime,
            digits,
        }
    }

    /// Reduction to fewer digits (`mod p^precision`).
    pub fn truncate(&self, precision: usize) -> Result<Self> {
        check_precision(precision)?;
        let keep = precision.min(self.precision());
        let mut digits = self.digits[..keep].to_vec();
        digits.resize(precision, 0);
        Ok(PAdicInt {
            prime: self.prime,
            digits,
        })
    }

    /// The canonical representative in `[0, p^N)`.
    pub fn to_biguint(&self) -> BigUint {
        let p = BigUint::from(self.prime.get());
        self.digits
            .iter()
            .rev()
            .fold(BigUint::zero(), |acc, &d| acc * &p + d)
    }

    pub fn render(&self, mode: RenderMode, style: RenderStyle) -> Result<String> {
        if style == RenderStyle::Compact && self.prime.get() > COMPACT_MAX_PRIME {
            return Err(Error::CompactUnsupported(self.prime.get()));
        }
        let shown = match mode {
            RenderMode::FixedWidth => &self.digits[..],
            RenderMode::Trimmed => &self.digits[..self.digit_count().max(1)],
        };
        Ok(match style {
            RenderStyle::Compact => shown
                .iter()
                .rev()
                .map(|&d| std::char::from_digit(d as u32, 36).expect("digit below 36"))
                .collect(),
            RenderStyle::List => shown
                .iter()
                .rev()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join(","),
        })
    }

    /// Parses an MSD-first digit string. Text with commas (or any text when
    /// `p > 36`) is read as a decimal digit list, otherwise as compact; the precision is the number of
    /// digits unless `precision` is given, in which case the value is padded
    /// (or reduced) to it.
    pub fn parse(text: &str, prime: Prime, precision: Option<usize>) -> Result<Self> {
        let text = text.trim();
        let msd_first: Vec<u64> = if text.contains(',') || prime.get() > COMPACT_MAX_PRIME {
            text.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u64>()
                        .map_err(|e| Error::Parse(format!("bad digit {t:?}: {e}")))
                })
                .collect::<Result<_>>()?
        } else {
            text.chars()
                .map(|c| {
                    c.to_digit(36)
                        .map(u64::from)
                        .ok_or_else(|| Error::Parse(format!("bad digit {c:?}")))
                })
                .collect::<Result<_>>()?
        };
        if msd_first.is_empty() {
            return Err(Error::Parse("no digits".into()));
        }
        let mut digits: Vec<u64> = msd_first.into_iter().rev().collect();
        if let Some(n) = precision {
            check_precision(n)?;
            digits.resize(n, 0);
        }
        Self::from_digits(prime, digits)
    }
}

/// `p^N` as a big integer.
pub fn modulus(prime: Prime, precision: usize) -> BigUint {
    num_traits::pow(BigUint::from(prime.get()), precision)
}

/// Header + digits text file. Line one is `p=<prime> order=msd`; line two
/// holds all `N` digits, compact when `p <= 36` and comma-separated otherwise.
pub mod digitfile {
    use super::*;

    pub fn write(value: &PAdicInt) -> String {
        let style = if value.prime().get() <= COMPACT_MAX_PRIME {
            RenderStyle::Compact
        } else {
            RenderStyle::List
        };
        let digits = value
            .render(RenderMode::FixedWidth, style)
            .expect("style chosen to fit the prime");
        format!("p={} order=msd\n{}\n", value.prime(), digits)
    }

    pub fn read(text: &str) -> Result<PAdicInt> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty digit file".into()))?;
        let mut prime = None;
        let mut order_ok = false;
        for field in header.split_whitespace() {
            match field.split_once('=') {
                Some(("p", v)) => {
                    let p: u64 = v
                        .parse()
                        .map_err(|e| Error::Parse(format!("bad prime {v:?}: {e}")))?;
                    prime = Some(Prime::new(p)?);
                }
                Some(("order", "msd")) => order_ok = true,
                Some(("order", other)) => {
                    return Err(Error::Parse(format!("unsupported digit order {other:?}")))
                }
                _ => return Err(Error::Parse(format!("unknown header field {field:?}"))),
            }
        }
        let prime = prime.ok_or_else(|| Error::Parse("header lacks p=<prime>".into()))?;
        if !order_ok {
            return Err(Error::Parse("header lacks order=msd".into()));
        }
        let body = lines
            .next()
            .ok_or_else(|| Error::Parse("digit file has no digit line".into()))?;
        PAdicInt::parse(body, prime, None)
    }
}

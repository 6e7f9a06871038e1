//! Checks on the digit structure of the partial sums `S_n` of
//! `sum p^{v_p(n!)}`, and the JSON report that bundles them.
//!
//! * packages: `v_p(n!)` is constant on each package of `p` consecutive `n`,
//!   the `p` additions in a package overflow exactly one column, and `S_n` at
//!   the end of package `k` has `v + 2` digits;
//! * power prefix: at `n = p^r` (`r >= 3`) the digit count jumps by `r - 1`,
//!   `S_n` starts with a 1 followed by `r - 2` zeros, and those zeros stay
//!   zero in every later partial sum checked and in the limit mod `p^N`;
//! * non-periodicity: a bounded eventual-period search on the limit's digits,
//!   with a rational negative control.
//!
//! Every horizon is a parameter. Insufficient precision or horizon is
//! rejected with the smallest value that would have been accepted.

use crate::error::{Error, Result};
use crate::prime::Prime;
use crate::rationality::{
    detect_eventual_period, rational_to_padic, Detection, DetectionBounds, DetectionSummary,
    Rational,
};
use crate::series::{stop_index, sum_series, PartialSums, SeriesKind};
use crate::valuation::{package_valuation, vp_factorial};
use crate::{FORMAT_VERSION, TOOL_VERSION};
use serde::Serialize;
use serde_json::{json, Value};
use std::ops::Range;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PackageRecord {
    pub k: u64,
    pub valuation: u64,
    pub valuation_constant: bool,
    pub carry_count: usize,
    pub digit_count_end: usize,
    pub digit_count_expected: u64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrefixRecord {
    pub r: u32,
    pub n: u64,
    pub v_top: u64,
    pub v_prev: u64,
    pub jump: i64,
    pub leading_digit: u64,
    /// Consecutive zeros directly below the leading digit of `S_n`.
    pub zero_run: usize,
    /// Zero positions checked for fixity: the `r - 2` just below the top.
    pub zero_positions: Vec<usize>,
    pub freeze_horizon: u64,
    /// First later `m <= freeze_horizon` whose `S_m` disturbed the zeros.
    pub first_disturbed_at: Option<u64>,
    pub frozen_in_limit: bool,
    pub frozen: bool,
    pub pass: bool,
}

/// Smallest precision accepted by [`verify_packages`].
pub fn min_precision_for_packages(p: Prime, k_max: u64) -> u64 {
    package_valuation(k_max, p) + 3
}

/// Smallest precision accepted by [`verify_power_prefix`].
pub fn min_precision_for_prefix(p: Prime, r_max: u32) -> Result<u64> {
    Ok(vp_factorial(power(p, r_max)?, p) + 3)
}

fn power(p: Prime, r: u32) -> Result<u64> {
    p.get().checked_pow(r).ok_or(Error::TooLarge {
        what: "r_max (p^r_max must fit in 64 bits)",
        got: u64::from(r),
        maximum: u64::from(u64::MAX.ilog(p.get())),
    })
}

fn require(what: &'static str, got: u64, minimum: u64) -> Result<()> {
    if got < minimum {
        Err(Error::Insufficient { what, got, minimum })
    } else {
        Ok(())
    }
}

/// One record per package `k = 0..=k_max`, from a single pass over
/// `S_0 ..= S_{(k_max+1)p - 1}`.
pub fn verify_packages(p: Prime, k_max: u64, precision: usize) -> Result<Vec<PackageRecord>> {
    require(
        "precision",
        precision as u64,
        min_precision_for_packages(p, k_max),
    )?;
    let mut engine = PartialSums::new(SeriesKind::Alpha, p, precision)?;
    let mut records = Vec::with_capacity(k_max as usize + 1);
    for k in 0..=k_max {
        let valuation = package_valuation(k, p);
        let mut valuation_constant = true;
        let mut carry_count = 0;
        let mut digit_count_end = 0;
        for _ in 0..p.get() {
            let step = engine.advance();
            valuation_constant &= step.term_valuation == valuation;
            carry_count += step.carries.count();
            digit_count_end = step.digit_count;
        }
        let digit_count_expected = valuation + 2;
        records.push(PackageRecord {
            k,
            valuation,
            valuation_constant,
            carry_count,
            digit_count_end,
            digit_count_expected,
            pass: valuation_constant
                && carry_count == 1
                && digit_count_end as u64 == digit_count_expected,
        });
    }
    Ok(records)
}

struct Watch {
    index: usize,
    zeros: Range<usize>,
}

/// One record per `r = 3..=r_max`, from a single pass over
/// `S_0 ..= S_{freeze_horizon}` plus the limit `sum_series(alpha, p, N)`.
pub fn verify_power_prefix(
    p: Prime,
    r_max: u32,
    precision: usize,
    freeze_horizon: u64,
) -> Result<Vec<PrefixRecord>> {
    require("r_max", u64::from(r_max), 3)?;
    let top_n = power(p, r_max)?;
    require(
        "precision",
        precision as u64,
        min_precision_for_prefix(p, r_max)?,
    )?;
    require("freeze horizon", freeze_horizon, top_n)?;

    let mut engine = PartialSums::new(SeriesKind::Alpha, p, precision)?;
    let mut records: Vec<PrefixRecord> = Vec::new();
    let mut watches: Vec<Watch> = Vec::new();
    let mut next_r = 3u32;
    let mut next_power = power(p, 3)?;
    let mut prev_count = 0usize;

    for n in 0..=freeze_horizon {
        let step = engine.advance();
        debug_assert_eq!(step.n, n);
        for w in &watches {
            let rec = &mut records[w.index];
            if rec.first_disturbed_at.is_some() {
                continue;
            }
            let lo = w.zeros.start.max(step.touched.start);
            let hi = w.zeros.end.min(step.touched.end);
            if (lo..hi).any(|i| step.sum.digit(i) != 0) {
                rec.first_disturbed_at = Some(n);
            }
        }
        if n == next_power {
            let r = next_r;
            let count = step.digit_count;
            let top = count - 1;
            let zero_run = (0..top)
                .rev()
                .take_while(|&i| step.sum.digit(i) == 0)
                .count();
            let wanted = (r - 2) as usize;
            let zeros = top.saturating_sub(wanted)..top;
            let disturbed = zeros.clone().any(|i| step.sum.digit(i) != 0);
            records.push(PrefixRecord {
                r,
                n,
                v_top: step.term_valuation,
                v_prev: vp_factorial(n - 1, p),
                jump: count as i64 - prev_count as i64,
                leading_digit: step.sum.digit(top),
                zero_run,
                zero_positions: zeros.clone().collect(),
                freeze_horizon,
                first_disturbed_at: disturbed.then_some(n),
                frozen_in_limit: false,
                frozen: false,
                pass: false,
            });
            watches.push(Watch {
                index: records.len() - 1,
                zeros,
            });
            if r < r_max {
                next_r += 1;
                next_power *= p.get();
            } else {
                next_power = u64::MAX;
            }
        }
        prev_count = step.digit_count;
    }

    let limit = sum_series(SeriesKind::Alpha, p, precision)?;
    for w in &watches {
        let rec = &mut records[w.index];
        rec.frozen_in_limit = w.zeros.clone().all(|i| limit.digit(i) == 0);
        rec.frozen = rec.first_disturbed_at.is_none() && rec.frozen_in_limit;
        rec.pass = rec.jump == i64::from(rec.r) - 1
            && rec.leading_digit == 1
            && rec.zero_run >= (rec.r - 2) as usize
            && rec.v_top - rec.v_prev == u64::from(rec.r)
            && rec.frozen;
    }
    Ok(records)
}

/// Largest `r >= 3` whose prefix check fits in `precision` digits.
pub fn max_prefix_exponent(p: Prime, precision: usize) -> Option<u32> {
    (3u32..)
        .map_while(|r| {
            let n = p.get().checked_pow(r)?;
            (vp_factorial(n, p) + 3 <= precision as u64).then_some(r)
        })
        .last()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NonperiodicityReport {
    pub prime: u64,
    pub precision: usize,
    pub series: SeriesKind,
    pub bounds: DetectionBounds,
    pub digits_examined: usize,
    pub required_digits: usize,
    pub detection: DetectionSummary,
    pub prefix_records: Vec<PrefixRecord>,
}

impl NonperiodicityReport {
    /// True when the search came back empty with the bounds fully exercised.
    pub fn pass(&self) -> bool {
        self.detection.status == "none-within-bounds" && self.prefix_records.iter().all(|r| r.pass)
    }
}

/// Runs the eventual-period search on `alpha_p mod p^N`. The prefix records
/// (every `r` that fits in `N`, zeros checked through the stop index) are
/// attached as structural corroboration.
pub fn nonperiodicity_report(
    p: Prime,
    precision: usize,
    bounds: DetectionBounds,
) -> Result<NonperiodicityReport> {
    let alpha = sum_series(SeriesKind::Alpha, p, precision)?;
    let detection = detect_eventual_period(alpha.digits(), p, bounds)?;
    let prefix_records = match max_prefix_exponent(p, precision) {
        Some(r_max) => {
            let horizon = stop_index(p, precision).max(power(p, r_max)?);
            verify_power_prefix(p, r_max, precision, horizon)?
        }
        None => Vec::new(),
    };
    Ok(NonperiodicityReport {
        prime: p.get(),
        precision,
        series: SeriesKind::Alpha,
        bounds,
        digits_examined: alpha.precision(),
        required_digits: bounds.required_digits(),
        detection: detection.summary(),
        prefix_records,
    })
}

/// Period search on `sum n! mod p^N`. Status only: nothing is claimed
/// about this series.
pub fn factorial_period_status(
    p: Prime,
    precision: usize,
    bounds: DetectionBounds,
) -> Result<Detection> {
    let sum = sum_series(SeriesKind::Factorial, p, precision)?;
    detect_eventual_period(sum.digits(), p, bounds)
}

/// The rational used as a negative control: `1/2`, or `1/3` in `Z_2`.
pub fn control_rational(p: Prime) -> Rational {
    let den = if p.get() == 2 { 3 } else { 2 };
    Rational::new(1, den).expect("nonzero denominator")
}

/// The detector run on a known rational with the same bounds; it must find
/// the period, otherwise a "none" result elsewhere says nothing.
pub fn negative_control(p: Prime, precision: usize, bounds: DetectionBounds) -> Result<Detection> {
    let x = rational_to_padic(&control_rational(p), p, precision)?;
    detect_eventual_period(x.digits(), p, bounds)
}

/// One entry of a JSON report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub params: Value,
    /// `None` for informational entries that have no pass criterion.
    pub pass: Option<bool>,
    pub records: Vec<Value>,
    pub violations: Vec<Value>,
}

fn to_values<T: Serialize>(items: &[T]) -> Vec<Value> {
    items
        .iter()
        .map(|r| serde_json::to_value(r).expect("records serialize"))
        .collect()
}

impl Check {
    pub fn packages(p: Prime, k_max: u64, precision: usize) -> Result<Self> {
        let records = verify_packages(p, k_max, precision)?;
        let failed: Vec<&PackageRecord> = records.iter().filter(|r| !r.pass).collect();
        Ok(Check {
            name: "packages".into(),
            params: json!({ "k_max": k_max, "precision": precision }),
            pass: Some(failed.is_empty()),
            violations: to_values(&failed),
            records: to_values(&records),
        })
    }

    pub fn power_prefix(
        p: Prime,
        r_max: u32,
        precision: usize,
        freeze_horizon: u64,
    ) -> Result<Self> {
        let records = verify_power_prefix(p, r_max, precision, freeze_horizon)?;
        let failed: Vec<&PrefixRecord> = records.iter().filter(|r| !r.pass).collect();
        Ok(Check {
            name: "power_prefix".into(),
            params: json!({
                "freeze_horizon": freeze_horizon,
                "precision": precision,
                "r_max": r_max,
            }),
            pass: Some(failed.is_empty()),
            violations: to_values(&failed),
            records: to_values(&records),
        })
    }

    pub fn nonperiodicity(p: Prime, precision: usize, bounds: DetectionBounds) -> Result<Self> {
        let report = nonperiodicity_report(p, precision, bounds)?;
        let pass = report.pass();
        let violations = if pass {
            Vec::new()
        } else {
            vec![serde_json::to_value(&report.detection).expect("serializes")]
        };
        Ok(Check {
            name: "nonperiodicity".into(),
            params: json!({ "bounds": bounds, "precision": precision, "series": "alpha" }),
            pass: Some(pass),
            records: vec![serde_json::to_value(&report).expect("serializes")],
            violations,
        })
    }

    pub fn negative_control(p: Prime, precision: usize, bounds: DetectionBounds) -> Result<Self> {
        let detection = negative_control(p, precision, bounds)?;
        let pass = matches!(detection, Detection::Found(_));
        let summary = serde_json::to_value(detection.summary()).expect("serializes");
        Ok(Check {
            name: "negative_control".into(),
            params: json!({
                "bounds": bounds,
                "precision": precision,
                "rational": control_rational(p).to_string(),
            }),
            pass: Some(pass),
            violations: if pass {
                Vec::new()
            } else {
                vec![summary.clone()]
            },
            records: vec![summary],
        })
    }

    pub fn factorial_period(p: Prime, precision: usize, bounds: DetectionBounds) -> Result<Self> {
        let detection = factorial_period_status(p, precision, bounds)?;
        Ok(Check {
            name: "factorial_period_status".into(),
            params: json!({ "bounds": bounds, "precision": precision, "series": "factorial" }),
            pass: None,
            records: vec![serde_json::to_value(detection.summary()).expect("serializes")],
            violations: Vec::new(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub prime: u64,
    pub precision: usize,
    pub checks: Vec<Check>,
    pub tool_version: &'static str,
    pub format_version: u32,
}

impl Report {
    pub fn new(p: Prime, precision: usize, checks: Vec<Check>) -> Self {
        Report {
            prime: p.get(),
            precision,
            checks,
            tool_version: TOOL_VERSION,
            format_version: FORMAT_VERSION,
        }
    }

    /// Passes when no check with a criterion failed.
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass != Some(false))
    }

    /// Pretty JSON with object keys in sorted order.
    pub fn to_json(&self) -> String {
        // Going through `Value` sorts keys: serde_json's map is a BTreeMap.
        let value = serde_json::to_value(self).expect("report serializes");
        serde_json::to_string_pretty(&value).expect("value serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{RenderMode, RenderStyle};
    use crate::series::partial_sum;
    use crate::valuation::vp_factorial_oracle;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn package_examples() {
        let records = verify_packages(p(3), 3, 8).unwrap();
        let k1 = &records[1];
        assert_eq!(
            (k1.valuation, k1.carry_count, k1.digit_count_end),
            (1, 1, 3)
        );
        let k3 = &records[3];
        assert_eq!((k3.valuation, k3.digit_count_end), (4, 6));
        assert!(records.iter().all(|r| r.pass));
        assert!(verify_packages(p(2), 500, 1000)
            .unwrap()
            .iter()
            .all(|r| r.pass));
    }

    #[test]
    fn package_digit_counts_match_scan() {
        for pr in [2, 3, 5, 7] {
            let records = verify_packages(p(pr), 60, 200).unwrap();
            for rec in &records {
                let last = rec.k * pr + pr - 1;
                let sum = partial_sum(SeriesKind::Alpha, p(pr), last, 200).unwrap();
                assert_eq!(rec.digit_count_end, sum.digit_count());
            }
        }
    }

    #[test]
    fn packages_reject_short_precision() {
        let minimum = min_precision_for_packages(p(3), 3);
        assert_eq!(minimum, 7);
        assert_eq!(
            verify_packages(p(3), 3, 6),
            Err(Error::Insufficient {
                what: "precision",
                got: 6,
                minimum: 7
            })
        );
        assert!(verify_packages(p(3), 3, 7).is_ok());
    }

    #[test]
    fn prefix_examples() {
        let rec = &verify_power_prefix(p(3), 3, 16, 200).unwrap()[0];
        assert_eq!(
            (rec.r, rec.n, rec.v_top, rec.v_prev, rec.jump),
            (3, 27, 13, 10, 2)
        );
        assert_eq!(rec.zero_positions, vec![12]);
        assert!(rec.zero_run >= 1 && rec.frozen && rec.pass);

        let records = verify_power_prefix(p(2), 4, 18, 64).unwrap();
        let rec = &records[1];
        assert_eq!((rec.r, rec.v_top, rec.v_prev, rec.jump), (4, 15, 11, 3));
        assert_eq!(rec.zero_positions, vec![13, 14]);
        assert_eq!(rec.v_top, vp_factorial_oracle(16, p(2)));
        assert_eq!(rec.v_prev, vp_factorial_oracle(15, p(2)));
        assert!(records.iter().all(|r| r.pass));

        for pr in [2, 3, 5, 7, 11] {
            let n = pr * pr * pr;
            let horizon = n;
            let precision = min_precision_for_prefix(p(pr), 3).unwrap() as usize;
            let rec = &verify_power_prefix(p(pr), 3, precision, horizon).unwrap()[0];
            assert_eq!(rec.v_top - rec.v_prev, 3);
        }
    }

    #[test]
    fn prefix_leading_digits_match_rendering() {
        let records = verify_power_prefix(p(3), 5, 130, 1000).unwrap();
        for rec in &records {
            let s = partial_sum(SeriesKind::Alpha, p(3), rec.n, 130).unwrap();
            let text = s.render(RenderMode::Trimmed, RenderStyle::Compact).unwrap();
            let expected = format!("1{}", "0".repeat(rec.r as usize - 2));
            assert!(text.starts_with(&expected), "r={} {text}", rec.r);
        }
    }

    #[test]
    fn prefix_rejections() {
        assert!(matches!(
            verify_power_prefix(p(3), 2, 100, 100),
            Err(Error::Insufficient { what: "r_max", .. })
        ));
        assert_eq!(
            verify_power_prefix(p(3), 3, 15, 27),
            Err(Error::Insufficient {
                what: "precision",
                got: 15,
                minimum: 16
            })
        );
        assert_eq!(
            verify_power_prefix(p(3), 3, 16, 26),
            Err(Error::Insufficient {
                what: "freeze horizon",
                got: 26,
                minimum: 27
            })
        );
        assert!(verify_power_prefix(p(3), 60, 100, 100).is_err());
    }

    #[test]
    fn max_exponent() {
        assert_eq!(max_prefix_exponent(p(2), 4096), Some(11));
        assert_eq!(max_prefix_exponent(p(3), 10), None);
        assert_eq!(max_prefix_exponent(p(2), 10), Some(3));
    }

    fn bounds(l: usize, t: usize, r: usize) -> DetectionBounds {
        DetectionBounds {
            max_preperiod: l,
            max_period: t,
            min_repeats: r,
        }
    }

    #[test]
    fn nonperiodicity_small() {
        let report = nonperiodicity_report(p(3), 400, bounds(100, 100, 3)).unwrap();
        assert_eq!(report.detection.status, "none-within-bounds");
        assert!(report.pass());
        assert!(!report.prefix_records.is_empty());

        for pr in [2, 3, 5] {
            let report = nonperiodicity_report(p(pr), 10, bounds(2, 2, 3)).unwrap();
            assert!(
                ["none-within-bounds", "insufficient-data"].contains(&report.detection.status),
                "p={pr}: {:?}",
                report.detection
            );
        }
        let control = negative_control(p(3), 4096, bounds(1024, 512, 3)).unwrap();
        let Detection::Found(ep) = control else {
            panic!("1/2 not detected")
        };
        assert_eq!((ep.preperiod().len(), ep.period().len()), (1, 1));
    }

    #[test]
    fn report_json_is_sorted_and_stable() {
        let b = bounds(20, 20, 3);
        let checks = vec![
            Check::packages(p(3), 10, 30).unwrap(),
            Check::power_prefix(p(3), 3, 30, 100).unwrap(),
            Check::nonperiodicity(p(3), 200, b).unwrap(),
            Check::negative_control(p(3), 200, b).unwrap(),
            Check::factorial_period(p(3), 200, b).unwrap(),
        ];
        let report = Report::new(p(3), 30, checks);
        assert!(report.pass());
        let text = report.to_json();
        assert_eq!(text, report.clone().to_json());
        let value: Value = serde_json::from_str(&text).unwrap();
        let keys: Vec<&String> = value.as_object().unwrap().keys().collect();
        assert_eq!(
            keys,
            [
                "checks",
                "format_version",
                "precision",
                "prime",
                "tool_version"
            ]
        );
        let first = value["checks"][0].as_object().unwrap();
        let keys: Vec<&String> = first.keys().collect();
        assert_eq!(keys, ["name", "params", "pass", "records", "violations"]);
        assert_eq!(value["checks"][4]["pass"], Value::Null);
    }
}

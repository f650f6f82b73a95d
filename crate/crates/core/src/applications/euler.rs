use num::bigint::BigUint;
use num::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::decision::{decide_nonneg_with, CsrVerdict, Options};
use crate::error::{CsrError, Result};
use crate::generators::gen_euler;

/// Number of octaves whose slopes are pooled into each estimate.
const TAIL_OCTAVES: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    pub r: usize,
    pub k_max: usize,
    #[serde(serialize_with = "decimal_strings", deserialize_with = "parse_decimal_strings")]
    pub b_values: Vec<BigUint>,
    pub p1_estimate: f64,
    pub p2_estimate: f64,
    pub csr_verdict: CsrVerdict,
}

fn decimal_strings<S: Serializer>(values: &[BigUint], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(values.iter().map(|v| v.to_string()))
}

fn parse_decimal_strings<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<BigUint>, D::Error> {
    let raw: Vec<String> = Vec::deserialize(d)?;
    raw.iter()
        .map(|t| t.parse::<BigUint>().map_err(serde::de::Error::custom))
        .collect()
}

/// `b_r(k)` for `k = 0..=k_max`: the number of ways to write `k` as
/// `Σ d_j 2^j` with digits `0 ≤ d_j < r`.
pub fn euler_b(r: usize, k_max: usize) -> Result<Vec<BigUint>> {
    if r < 2 {
        return Err(CsrError::Precondition("digit bound r must be at least 2".into()));
    }
    let mut b: Vec<BigUint> = Vec::with_capacity(k_max + 1);
    b.push(BigUint::one());
    for k in 1..=k_max {
        let mut total = BigUint::zero();
        // The lowest digit has the parity of k.
        let mut d = k % 2;
        while d < r && d <= k {
            total += &b[(k - d) / 2];
            d += 2;
        }
        b.push(total);
    }
    Ok(b)
}

/// `log₂` of a positive big integer.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map(f64::log2).unwrap_or(f64::INFINITY);
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    top.to_f64().expect("64-bit value").log2() + shift as f64
}

/// Growth exponents from octave extremes: over each `[2^j, 2^{j+1})` the
/// largest and smallest `log₂ b(k)`; the slopes of these sequences in `j`
/// estimate the upper and lower exponents. Each estimate is the median slope
/// over the last few complete octaves.
pub fn growth_exponents(b: &[BigUint]) -> (f64, f64) {
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    let mut lo = 1usize;
    while 2 * lo <= b.len() {
        let window = &b[lo..2 * lo];
        let logs = window.iter().map(log2_big);
        let (mn, mx) = logs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, c), v| (a.min(v), c.max(v)));
        minima.push(mn);
        maxima.push(mx);
        lo *= 2;
    }
    let tail_median = |seq: &[f64]| -> f64 {
        let slopes: Vec<f64> = seq.windows(2).map(|w| w[1] - w[0]).collect();
        let mut tail: Vec<f64> = slopes.iter().rev().take(TAIL_OCTAVES).copied().collect();
        if tail.is_empty() {
            return 0.0;
        }
        tail.sort_by(f64::total_cmp);
        tail[tail.len() / 2]
    };
    let p2 = tail_median(&maxima);
    let p1 = tail_median(&minima).min(p2);
    (p1, p2)
}

/// Partition counts, their growth exponents and the c.s.r. verdict for the
/// digit matrices; the exponents agree exactly when the verdict is yes.
pub fn euler_report(r: usize, k_max: usize, depth: usize, tol: f64) -> Result<PartitionReport> {
    if r < 3 {
        return Err(CsrError::Precondition("r must be at least 3".into()));
    }
    let b_values = euler_b(r, k_max)?;
    let (p1_estimate, p2_estimate) = growth_exponents(&b_values);
    let family = gen_euler(r)?;
    let csr_verdict = decide_nonneg_with(&family, &Options { depth, tol, ..Options::default() })?;
    Ok(PartitionReport { r, k_max, b_values, p1_estimate, p2_estimate, csr_verdict })
}

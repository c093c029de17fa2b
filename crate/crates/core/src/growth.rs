//! Exact ball growth of F and the comparison with C·ℓ^α and D·ℓ^α.

use std::collections::HashSet;

use astro_float::{BigFloat, Consts, RoundingMode};
use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mealy::{level_cap, TransformationTable};
use crate::rewrite::NormalForm;
use crate::words::{fib_u128, Evaluator, Letter};

/// Working precision in bits for the growth constants.
pub const PRECISION: usize = 256;
const RM: RoundingMode = RoundingMode::ToEven;

/// All normal forms whose maximal index is `peak` (peak ≥ 3).
pub fn normal_forms_with_peak(peak: u32) -> Vec<NormalForm> {
    assert!(peak >= 3, "normal forms with a peak start at index 3");
    let candidates: Vec<u32> = (3..peak.saturating_sub(1)).collect();
    let mut prefixes = Vec::new();
    for mask in 0u64..1 << candidates.len() {
        let chosen: Vec<u32> = candidates.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &j)| j).collect();
        if chosen.windows(2).all(|w| w[0] + 1 < w[1]) {
            prefixes.push(chosen);
        }
    }
    let mut out = Vec::new();
    for eps in 0..2u8 {
        for prefix in &prefixes {
            for tail_mask in 0u64..1 << (peak - 1) {
                let mut idx = prefix.clone();
                idx.push(peak);
                idx.extend((1..peak).rev().filter(|j| tail_mask >> (j - 1) & 1 == 1));
                out.push(NormalForm::new(eps, idx).expect("constructed in normal shape"));
            }
        }
    }
    out
}

/// Every normal form of length ≤ `max_length`, including e and s.
pub fn normal_forms_up_to(max_length: u64) -> Vec<NormalForm> {
    let mut out = vec![NormalForm::identity()];
    if max_length >= 1 {
        out.push(NormalForm::new(1, vec![]).expect("s"));
    }
    let mut peak = 3;
    while fib_u128(peak) <= max_length as u128 + 1 {
        out.extend(
            normal_forms_with_peak(peak)
                .into_iter()
                .filter(|g| crate::rewrite::nf_length_u128(g) <= max_length as u128),
        );
        peak += 1;
    }
    out
}

/// Number of elements of each exact length 0..=max_length.
pub fn sphere_sizes(max_length: usize) -> Vec<u128> {
    let size = max_length + 2;
    let mut sphere = vec![0u128; max_length + 1];
    sphere[0] += 1;
    if max_length >= 1 {
        sphere[1] += 1;
    }
    let mut k = 3u32;
    while fib_u128(k) <= max_length as u128 + 1 {
        let phi_k = fib_u128(k) as usize;
        // prefix[parity of i_1][whether index j+1 was taken]
        let mut prefix = [[vec![0u128; size], vec![0u128; size]], [vec![0u128; size], vec![0u128; size]]];
        prefix[(k % 2) as usize][0][phi_k] = 1;
        for j in (3..=k.saturating_sub(2)).rev() {
            let w = fib_u128(j) as usize;
            let mut next = [[vec![0u128; size], vec![0u128; size]], [vec![0u128; size], vec![0u128; size]]];
            for par in 0..2 {
                for (adj, src) in prefix[par].iter().enumerate() {
                    for (x, &v) in src.iter().enumerate() {
                        if v == 0 {
                            continue;
                        }
                        next[par][0][x] += v;
                        if adj == 0 && x + w < size {
                            next[(j % 2) as usize][1][x + w] += v;
                        }
                    }
                }
            }
            prefix = next;
        }
        for (par, states) in prefix.iter().enumerate() {
            let mut poly: Vec<u128> = (0..size).map(|x| states[0][x] + states[1][x]).collect();
            for i in 1..k {
                let w = fib_u128(i) as usize;
                for x in (w..size).rev() {
                    poly[x] += poly[x - w];
                }
            }
            for (x, &v) in poly.iter().enumerate() {
                if v == 0 {
                    continue;
                }
                if x <= max_length {
                    sphere[x] += v;
                }
                let with_s = if par == 1 { x - 1 } else { x + 1 };
                if with_s <= max_length {
                    sphere[with_s] += v;
                }
            }
        }
        k += 1;
    }
    sphere
}

/// γ(0..=max_length) as machine integers.
pub fn gamma_table(max_length: usize) -> Vec<u128> {
    let mut acc = 0;
    sphere_sizes(max_length)
        .into_iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

/// γ(ℓ), the number of elements of length at most ℓ.
pub fn gamma(length: u64) -> BigUint {
    BigUint::from(*gamma_table(length as usize).last().expect("nonempty"))
}

/// Number of distinct level-`level` tables among {s,f}-words of length ≤ `length`.
fn ball_count_at_level(length: u64, level: u32) -> Result<usize> {
    let mut ev = Evaluator::new(level)?;
    let gens = [ev.letter_table(Letter::S).clone(), ev.letter_table(Letter::F).clone()];
    let identity = ev.identity();
    let mut seen: HashSet<TransformationTable> = HashSet::from([identity.clone()]);
    let mut frontier = vec![identity];
    for _ in 0..length {
        let mut next = Vec::new();
        for t in &frontier {
            for g in &gens {
                let u = t.compose(g)?;
                if seen.insert(u.clone()) {
                    next.push(u);
                }
            }
        }
        frontier = next;
    }
    Ok(seen.len())
}

/// γ(ℓ) by enumerating words and bucketing their tables, raising the level until the
/// count is unchanged over three consecutive levels.
pub fn gamma_bruteforce(length: u64) -> Result<u64> {
    if length > 14 {
        return Err(Error::Precondition("gamma_bruteforce is limited to ℓ ≤ 14".into()));
    }
    let cap = level_cap();
    let mut history = Vec::new();
    for level in 0..=cap {
        history.push(ball_count_at_level(length, level)?);
        if let [.., a, b, c] = history[..] {
            if a == b && b == c {
                return Ok(c as u64);
            }
        }
    }
    Err(Error::NotStabilized(cap))
}

/// High-precision φ, α and the constants C and D of the growth bounds.
pub struct GrowthConstants {
    pub phi: BigFloat,
    pub alpha: BigFloat,
    pub c: BigFloat,
    pub d: BigFloat,
    consts: Consts,
}

impl GrowthConstants {
    pub fn new() -> Self {
        let mut cc = Consts::new().expect("constant cache");
        let p = PRECISION;
        let one = BigFloat::from_u8(1, p);
        let two = BigFloat::from_u8(2, p);
        let sqrt5 = BigFloat::from_u8(5, p).sqrt(p, RM);
        let phi = one.add(&sqrt5, p, RM).div(&two, p, RM);
        let ln2 = two.ln(p, RM, &mut cc);
        let alpha = one.add(&ln2.div(&phi.ln(p, RM, &mut cc), p, RM), p, RM);
        let sqrt5_alpha = sqrt5.pow(&alpha, p, RM, &mut cc);
        let two_phi = two.mul(&phi, p, RM);
        let denom = sqrt5
            .mul(&phi.mul(&phi, p, RM), p, RM)
            .mul(&two_phi.sub(&one, p, RM), p, RM);
        let d = two.mul(&sqrt5_alpha, p, RM).div(&denom, p, RM);
        let c = d.div(&two_phi.pow(&alpha, p, RM, &mut cc), p, RM);
        GrowthConstants { phi, alpha, c, d, consts: cc }
    }

    pub fn alpha_f64(&self) -> f64 {
        to_f64(&self.alpha)
    }

    pub fn c_f64(&self) -> f64 {
        to_f64(&self.c)
    }

    pub fn d_f64(&self) -> f64 {
        to_f64(&self.d)
    }

    /// ℓ^α at full precision.
    pub fn power(&mut self, length: u64) -> BigFloat {
        BigFloat::from_u64(length, PRECISION).pow(&self.alpha, PRECISION, RM, &mut self.consts)
    }

    /// γ / ℓ^α at full precision.
    pub fn ratio(&mut self, length: u64, gamma: u128) -> BigFloat {
        BigFloat::from_u128(gamma, PRECISION).div(&self.power(length), PRECISION, RM)
    }

    /// Decides C·ℓ^α ≤ γ and γ ≤ D·ℓ^α at full precision.
    pub fn bounds_hold(&mut self, length: u64, gamma: u128) -> (bool, bool) {
        let power = self.power(length);
        let g = BigFloat::from_u128(gamma, PRECISION);
        let lower = self.c.mul(&power, PRECISION, RM);
        let upper = self.d.mul(&power, PRECISION, RM);
        let le = |a: &BigFloat, b: &BigFloat| a.cmp(b).is_some_and(|o| o <= 0);
        (le(&lower, &g), le(&g, &upper))
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn decimal(&mut self, x: &BigFloat, digits: usize) -> String {
        format_decimal(x, digits, &mut self.consts)
    }
}

impl Default for GrowthConstants {
    fn default() -> Self {
        Self::new()
    }
}

pub fn to_f64(x: &BigFloat) -> f64 {
    x.to_string().parse().expect("decimal rendering parses")
}

pub(crate) fn format_decimal(x: &BigFloat, digits: usize, cc: &mut Consts) -> String {
    let bits = ((digits as f64) * std::f64::consts::LOG2_10).ceil() as usize + 8;
    let mut y = x.clone();
    y.set_precision(bits.max(64), RM).expect("precision change");
    let s = y.format(astro_float::Radix::Dec, RM, cc).expect("format");
    let Some((mantissa, exp)) = s.split_once('e') else {
        return s;
    };
    let exp: i64 = exp.parse().expect("exponent");
    let (sign, mantissa) = mantissa.strip_prefix('-').map_or(("", mantissa), |m| ("-", m));
    let mut ds: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    ds.truncate(digits);
    let point = exp + 1;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat((-point) as usize), ds)
    } else if point as usize >= ds.len() {
        format!("{}{}", ds, "0".repeat(point as usize - ds.len()))
    } else {
        format!("{}.{}", &ds[..point as usize], &ds[point as usize..])
    };
    format!("{sign}{body}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub length: u64,
    pub gamma: u128,
    pub ratio: f64,
    pub lower_ok: bool,
    pub upper_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationWindow {
    /// Position of the ratio minimum opening the window.
    pub start: u64,
    /// Position of the ratio minimum closing the window.
    pub end: u64,
    pub argmax: u64,
    pub max_ratio: f64,
    pub nearest_fibonacci: u64,
    pub relative_offset: f64,
    pub fibonacci_inside: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub max_length: u64,
    pub alpha: f64,
    pub c: f64,
    pub d: f64,
    pub checkpoints: Vec<BoundCheck>,
    /// Smallest ℓ₀ ≥ 1 such that both bounds hold on [ℓ₀, max_length].
    pub onset: Option<u64>,
    pub sweep_from: u64,
    pub sweep_to: u64,
    pub min_ratio: (u64, f64),
    pub max_ratio: (u64, f64),
    pub windows: Vec<OscillationWindow>,
}

/// A precomputed γ table with helpers for ratios and bound checks.
pub struct GrowthSeries {
    gamma: Vec<u128>,
    constants: GrowthConstants,
}

impl GrowthSeries {
    pub fn new(max_length: u64) -> Result<Self> {
        if max_length > 1_000_000 {
            return Err(Error::Precondition("growth is limited to ℓ ≤ 10⁶".into()));
        }
        Ok(GrowthSeries { gamma: gamma_table(max_length as usize), constants: GrowthConstants::new() })
    }

    pub fn max_length(&self) -> u64 {
        self.gamma.len() as u64 - 1
    }

    pub fn gamma(&self, length: u64) -> u128 {
        self.gamma[length as usize]
    }

    pub fn counts(&self) -> Vec<BigUint> {
        self.gamma.iter().map(|&g| BigUint::from(g)).collect()
    }

    pub fn constants(&mut self) -> &mut GrowthConstants {
        &mut self.constants
    }

    /// γ(ℓ)/ℓ^α at full precision.
    pub fn ratio(&mut self, length: u64) -> BigFloat {
        let g = self.gamma(length);
        self.constants.ratio(length, g)
    }

    fn ratios_f64(&self, from: u64, to: u64) -> Vec<f64> {
        let alpha = self.constants.alpha_f64();
        (from..=to).map(|l| self.gamma(l) as f64 / (l as f64).powf(alpha)).collect()
    }

    /// Bound check that settles near-ties at full precision.
    pub fn check(&mut self, length: u64) -> BoundCheck {
        let g = self.gamma(length);
        let alpha = self.constants.alpha_f64();
        let power = (length as f64).powf(alpha);
        let ratio = g as f64 / power;
        let (c, d) = (self.constants.c_f64(), self.constants.d_f64());
        let close = |x: f64| ((ratio - x) / x).abs() < 1e-9;
        let (lower_ok, upper_ok) = if length == 0 {
            (true, false)
        } else if close(c) || close(d) {
            self.constants.bounds_hold(length, g)
        } else {
            (c <= ratio, ratio <= d)
        };
        BoundCheck { length, gamma: g, ratio, lower_ok, upper_ok }
    }

    pub fn report(&mut self, checkpoints: &[u64], sweep: (u64, u64)) -> Result<GrowthReport> {
        let max = self.max_length();
        let (from, to) = sweep;
        if from < 1 || from > to || to > max {
            return Err(Error::Precondition(format!("sweep range {from}..{to} must lie in 1..={max}")));
        }
        if let Some(&bad) = checkpoints.iter().find(|&&l| l > max) {
            return Err(Error::Precondition(format!("checkpoint {bad} exceeds {max}")));
        }
        let checks = checkpoints.iter().map(|&l| self.check(l)).collect();
        let mut onset = None;
        for l in (1..=max).rev() {
            let c = self.check(l);
            if !(c.lower_ok && c.upper_ok) {
                break;
            }
            onset = Some(l);
        }
        let ratios = self.ratios_f64(from, to);
        let at = |i: usize| (from + i as u64, ratios[i]);
        let imin = (0..ratios.len()).min_by(|&a, &b| ratios[a].total_cmp(&ratios[b])).expect("nonempty");
        let imax = (0..ratios.len()).max_by(|&a, &b| ratios[a].total_cmp(&ratios[b])).expect("nonempty");
        let windows = oscillation_windows(&ratios, from);
        Ok(GrowthReport {
            max_length: max,
            alpha: self.constants.alpha_f64(),
            c: self.constants.c_f64(),
            d: self.constants.d_f64(),
            checkpoints: checks,
            onset,
            sweep_from: from,
            sweep_to: to,
            min_ratio: at(imin),
            max_ratio: at(imax),
            windows,
        })
    }
}

fn fibonacci_numbers_up_to(limit: u64) -> Vec<u64> {
    (2..).map(|k| fib_u128(k) as u64).take_while(|&f| f <= limit).collect()
}

/// Splits the sweep at the ratio minimum inside each Fibonacci interval and reports
/// the maximum of every window between consecutive minima.
fn oscillation_windows(ratios: &[f64], from: u64) -> Vec<OscillationWindow> {
    let to = from + ratios.len() as u64 - 1;
    let fibs = fibonacci_numbers_up_to(2 * to + 2);
    let value = |l: u64| ratios[(l - from) as usize];
    let mut troughs = Vec::new();
    for pair in fibs.windows(2) {
        let (lo, hi) = (pair[0].max(from), (pair[1] - 1).min(to));
        if pair[0] < from || pair[1] - 1 > to || lo > hi {
            continue;
        }
        let t = (lo..=hi).min_by(|&a, &b| value(a).total_cmp(&value(b))).expect("nonempty");
        troughs.push(t);
    }
    troughs
        .windows(2)
        .map(|w| {
            let (start, end) = (w[0], w[1]);
            let argmax = (start..=end).max_by(|&a, &b| value(a).total_cmp(&value(b))).expect("nonempty");
            let nearest = *fibs
                .iter()
                .min_by_key(|&&f| f.abs_diff(argmax))
                .expect("Fibonacci numbers present");
            OscillationWindow {
                start,
                end,
                argmax,
                max_ratio: value(argmax),
                nearest_fibonacci: nearest,
                relative_offset: nearest.abs_diff(argmax) as f64 / nearest as f64,
                fibonacci_inside: fibs.iter().filter(|&&f| start < f && f < end).count(),
            }
        })
        .collect()
}

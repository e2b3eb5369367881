//! Sweep campaigns over the dimension.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use super::config::THRESHOLDS;
use super::family::TestFamily;
use super::report::{growth_failures, MemberRow, PerN, SweepReport};
use crate::cesaro::EvenSphereMeans;
use crate::cube::{check_dimension_cap, lp_norm, CubeFunction, LpExponent};
use crate::error::{invalid, Result};
use crate::krawtchouk::{decay_constant, iterated_difference, to_f64, CesaroOrder, KrawtchoukTable, Rational};
use crate::maximal::{delta_lower_bound_exact, maximal_function, weak_type_quasinorm, MaximalVariant};

/// `T(n, m, r)` for every `r`, by two independent paths.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropMainRow {
    pub n: usize,
    pub m: usize,
    /// Exact sums rounded once.
    pub exact: Vec<f64>,
    /// Float sums from the closed form and the reduced float table.
    pub float: Vec<f64>,
    pub max: f64,
    pub argmax_r: usize,
    /// Largest relative gap between the two paths over `r` with `T > 1e-300`.
    pub max_rel_error: f64,
}

/// `T(n, m, r) = sum_{k=m}^{floor(n/4)} (k+1)^{2m-1} (partial^m kappa_r^n(2k))^2`.
///
/// The exact path differences the exact table `m` times; the float path
/// evaluates `(-4)^m C(n-2m, r-m)/C(n, r) kappa_{r-m}^{n-2m}(2k-2m)` in
/// floating point. At `r = m` the reduced polynomial is `kappa_0 = 1`.
pub fn prop_main_sum(n: usize, m: usize) -> Result<PropMainRow> {
    if m == 0 || n < 3 * m + 1 {
        return Err(invalid(format!("need m >= 1 and n >= 3m+1, got n={n} m={m}")));
    }
    let table = KrawtchoukTable::shared(n)?;
    let reduced = KrawtchoukTable::shared(n - 2 * m)?;
    let weights: Vec<(usize, BigInt)> = (m..=n / 4).map(|k| (k, BigInt::from(k + 1).pow(2 * m as u32 - 1))).collect();

    let rows: Vec<(f64, f64)> = (0..=n)
        .into_par_iter()
        .map(|r| {
            if r < m {
                return (0.0, 0.0);
            }
            let mut exact = Rational::zero();
            let mut float = 0.0f64;
            let scale = 4f64.powi(m as i32) * binomial_f64(n - 2 * m, r - m) / binomial_f64(n, r);
            for (k, w) in &weights {
                let d = iterated_difference(&table, m, r, 2 * k);
                exact += Rational::from(w.clone()) * &d * &d;
                let kappa = if r - m > n - 2 * m { 0.0 } else { reduced.value(r - m, 2 * k - 2 * m) };
                let d = scale * kappa;
                float += ((k + 1) as f64).powi(2 * m as i32 - 1) * d * d;
            }
            (to_f64(&exact), float)
        })
        .collect();

    let exact: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let float: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let (argmax_r, max) = exact
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (r, &v)| if v > best.1 { (r, v) } else { best });
    let max_rel_error = exact
        .iter()
        .zip(&float)
        .filter(|(e, _)| **e > 1e-300)
        .map(|(e, f)| (e - f).abs() / e)
        .fold(0.0, f64::max);
    Ok(PropMainRow {
        n,
        m,
        exact,
        float,
        max,
        argmax_r,
        max_rel_error,
    })
}

fn binomial_f64(a: usize, b: usize) -> f64 {
    if b > a {
        return 0.0;
    }
    (1..=b).fold(1.0, |acc, i| acc * (a - b + i) as f64 / i as f64)
}

/// `max_r T(n, m, r)` over the grid, flagged when the grid maxima spread by
/// more than the saturation factor or the last step grows past its limit.
pub fn prop_main_sweep(n_values: &[usize], m: usize) -> Result<SweepReport> {
    if n_values.is_empty() {
        return Err(invalid("empty n grid"));
    }
    let rows = n_values
        .iter()
        .map(|&n| {
            let row = prop_main_sum(n, m)?;
            let c_n = decay_constant(n)?;
            Ok(PerN::new(n, row.max)
                .with("argmax_r", row.argmax_r)
                .with("max_rel_error", row.max_rel_error)
                .with("decay_c_n", finite_or_null(c_n))
                .with("decay_c_used", c_n.min(1.0 / 12.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = SweepReport::new("prop_main_sum", 0, rows);
    report.m = Some(m);
    let series = report.series();
    let hi = series.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = series.iter().cloned().fold(f64::INFINITY, f64::min);
    let worst_rel = report
        .per_n
        .iter()
        .filter_map(|row| row.argmax["max_rel_error"].as_f64())
        .fold(0.0, f64::max);
    report.diagnostics.insert("spread".into(), hi / lo);
    report.diagnostics.insert("max_rel_error".into(), worst_rel);
    if hi / lo > THRESHOLDS.saturation_factor {
        report
            .failures
            .push(format!("spread {:.4} exceeds saturation factor {}", hi / lo, THRESHOLDS.saturation_factor));
    }
    if series.len() >= 2 {
        let last = series[series.len() - 1] / series[series.len() - 2];
        report.diagnostics.insert("final_step".into(), last);
        if last > THRESHOLDS.final_step_limit {
            report
                .failures
                .push(format!("final step {last:.4} exceeds {}", THRESHOLDS.final_step_limit));
        }
    }
    if worst_rel > THRESHOLDS.exact_float_rel {
        report
            .failures
            .push(format!("exact/float disagreement {worst_rel:e}"));
    }
    Ok(report)
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        x.into()
    } else {
        Value::Null
    }
}

/// Integer coefficients of `N_p` (ascending) with
/// `sum_k k^p t^k = N_p(t) / (1-t)^{p+1}`, from
/// `N_{j+1} = t(1-t) N_j' + (j+1) t N_j`, `N_0 = 1`. `N_p = t^p + p_p`
/// with `deg p_p < p`.
pub fn geometric_polynomial(p: usize) -> Vec<BigInt> {
    let mut coeffs = vec![BigInt::one()];
    for j in 0..p {
        let mut next = vec![BigInt::zero(); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            // t(1-t) * i c t^{i-1} = i c t^i - i c t^{i+1}
            next[i] += c * i;
            next[i + 1] -= c * i;
            // (j+1) t c t^i
            next[i + 1] += c * (j + 1);
        }
        while next.len() > 1 && next.last().is_some_and(Zero::is_zero) {
            next.pop();
        }
        coeffs = next;
    }
    coeffs
}

/// `|N_p(t)/(1-t)^{p+1} - sum_{k<=K} k^p t^k|` with both sides exact, `K`
/// chosen so the geometric tail bound is below the configured tail.
pub fn geometric_series_check(p: usize, t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 0.95) {
        return Err(invalid(format!("t must lie in (0, 0.95], got {t}")));
    }
    let exact = BigRational::from_float(t).ok_or_else(|| invalid("non-finite t"))?;
    geometric_series_check_exact(p, &exact)
}

pub fn geometric_series_check_exact(p: usize, t: &BigRational) -> Result<f64> {
    if !(1..=6).contains(&p) {
        return Err(invalid(format!("p must lie in 1..=6, got {p}")));
    }
    let max_t = BigRational::new(19.into(), 20.into());
    if !t.is_positive() || t > &max_t {
        return Err(invalid(format!("t must lie in (0, 0.95], got {t}")));
    }
    let k_max = truncation_point(p, to_f64(t), THRESHOLDS.series_tail);
    let (a, b) = (t.numer().clone(), t.denom().clone());

    // sum_{k<=K} k^p a^k b^{K-k} over b^K, accumulated without reduction.
    let mut series = BigInt::zero();
    let mut a_pow = BigInt::one();
    for k in 1..=k_max {
        a_pow *= &a;
        series = series * &b + BigInt::from(k).pow(p as u32) * &a_pow;
    }
    let series = BigRational::new(series, b.pow(k_max as u32));

    // N_p(a/b) b^p = sum_j c_j a^j b^{p-j}; closed form = that * b / (b-a)^{p+1}.
    let coeffs = geometric_polynomial(p);
    let numer: BigInt = coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| c * a.pow(j as u32) * b.pow((p - j) as u32))
        .sum();
    let closed = BigRational::new(numer * &b, (&b - &a).pow(p as u32 + 1));
    Ok(to_f64(&(closed - series).abs()))
}

/// Smallest `K` with `a_{K+1} / (1 - rho) < tail`, where `a_k = k^p t^k` and
/// `rho = ((K+2)/(K+1))^p t` bounds every later ratio `a_{k+1}/a_k`.
fn truncation_point(p: usize, t: f64, tail: f64) -> usize {
    let mut k = 1usize;
    loop {
        let rho = ((k + 2) as f64 / (k + 1) as f64).powi(p as i32) * t;
        if rho < 1.0 {
            let next = ((k + 1) as f64).powi(p as i32) * t.powi(k as i32 + 1);
            // Halve the target to absorb rounding in the estimate itself.
            if next / (1.0 - rho) < 0.5 * tail {
                return k;
            }
        }
        k += 1;
    }
}

/// How a maximal function is compared to its input.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RatioNorm {
    /// `||Tf||_p / ||f||_p`.
    Strong(LpExponent),
    /// `||Tf||_{1,inf} / ||f||_1`.
    Weak,
}

impl RatioNorm {
    pub fn label(self) -> String {
        match self {
            Self::Strong(p) => format!("L{p}"),
            Self::Weak => "weak_L1".to_string(),
        }
    }
}

/// Per-`n` family maxima of the maximal-to-input norm ratio.
pub fn ratio_sweep(variant: MaximalVariant, norm: RatioNorm, family: &TestFamily, n_values: &[usize]) -> Result<SweepReport> {
    if family.members.is_empty() || n_values.is_empty() {
        return Err(invalid("empty family or n grid"));
    }
    let mut rows = Vec::with_capacity(n_values.len());
    for &n in n_values {
        check_dimension_cap(n)?;
        let instances = family.expand(n)?;
        let members = instances
            .par_iter()
            .map(|inst| {
                let f = &inst.function;
                let tf = maximal_function(f, variant)?;
                let statistic = match norm {
                    RatioNorm::Strong(p) => {
                        let d = lp_norm(f, p);
                        if d == 0.0 {
                            return Ok(None);
                        }
                        lp_norm(&tf, p) / d
                    }
                    RatioNorm::Weak => {
                        let d = lp_norm(f, LpExponent::ONE);
                        if d == 0.0 {
                            return Ok(None);
                        }
                        weak_type_quasinorm(&tf)?.quasinorm / d
                    }
                };
                Ok(Some(MemberRow {
                    member: inst.label.clone(),
                    statistic,
                }))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect::<Vec<_>>();
        rows.push(best_member_row(n, members));
    }
    let mut report = SweepReport::new("ratio_sweep", family.seed, rows);
    report.parameters.insert("variant".into(), variant.name().into());
    report.parameters.insert("norm".into(), norm.label().into());
    let failures = growth_failures(&norm.label(), &report.n_values, &report.series(), THRESHOLDS.growth_limit);
    report.failures.extend(failures);
    Ok(report)
}

fn best_member_row(n: usize, members: Vec<MemberRow>) -> PerN {
    let best = members
        .iter()
        .fold(None::<&MemberRow>, |best, m| match best {
            Some(b) if b.statistic >= m.statistic => Some(b),
            _ => Some(m),
        })
        .cloned();
    let mut row = match best {
        Some(b) => PerN::new(n, b.statistic).with("member", b.member),
        None => PerN::new(n, 0.0),
    };
    row.members = members;
    row
}

/// Point-mass weak-type bounds with their `sqrt(n)` normalizations and the
/// least-squares slope of `log bound` against `log n`.
pub fn weak_type_growth(n_values: &[usize], q: usize) -> Result<SweepReport> {
    if n_values.len() < 2 {
        return Err(invalid("need at least two grid points for a slope"));
    }
    if q == 2 {
        if let Some(n) = n_values.iter().find(|&&n| n % 2 != 0) {
            return Err(invalid(format!("binary grid must be even, got n={n}")));
        }
    }
    let mut rows = Vec::with_capacity(n_values.len());
    let mut failures = Vec::new();
    for &n in n_values {
        if n == 0 {
            return Err(invalid("n must be positive"));
        }
        let exact = delta_lower_bound_exact(n, q)?;
        let bound = to_f64(&exact);
        let mut row = PerN::new(n, bound)
            .with("numerator", exact.numer().to_string())
            .with("denominator", exact.denom().to_string())
            .with("ratio_sqrt_n", bound / (n as f64).sqrt());
        if q == 2 {
            let stirling = bound / (std::f64::consts::PI * n as f64 / 2.0).sqrt();
            row = row.with("ratio_stirling", stirling);
            if n >= THRESHOLDS.stirling_min_n && (stirling - 1.0).abs() > THRESHOLDS.stirling_tolerance {
                failures.push(format!("n={n}: bound / sqrt(pi n/2) = {stirling:.4}"));
            }
        }
        rows.push(row);
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.statistic.ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    let (lo, hi) = if q == 2 {
        THRESHOLDS.slope_binary
    } else {
        THRESHOLDS.slope_general
    };
    if !(lo..=hi).contains(&slope) {
        failures.push(format!("slope {slope:.4} outside [{lo}, {hi}]"));
    }
    let c = rows
        .iter()
        .map(|r| r.statistic / (r.n as f64).sqrt())
        .fold(f64::INFINITY, f64::min);
    let mut report = SweepReport::new("weak_type_growth", 0, rows);
    report.parameters.insert("q".into(), q.into());
    report.estimated_constant = c;
    report.diagnostics.insert("slope".into(), slope);
    report.failures = failures;
    Ok(report)
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// The pointwise Cesaro-lemma ratios for one function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaRatios {
    /// `max_x S_*^{alpha + i beta} f / S_*^0 |f|` for `alpha = 1/2, 1`.
    pub lemma1: [f64; 2],
    /// `max_x S_*^{-m + i beta} f / sum_{j=1}^{m+1} S_*^{-j} f`.
    pub lemma2: f64,
    /// `max_x (S_*^{-m} f - 2 S_*^{-(m-1)} f)_+ / R_m f`.
    pub lemma3: f64,
}

pub const LEMMA1_ALPHAS: [f64; 2] = [0.5, 1.0];

pub fn lemma_ratios(f: &CubeFunction, m: usize, beta: f64) -> Result<LemmaRatios> {
    if m == 0 {
        return Err(invalid("lemma ratios need m >= 1"));
    }
    let means = EvenSphereMeans::new(f)?;
    let abs_means = EvenSphereMeans::new(&f.abs())?;
    let scale = f.max_abs();
    let order = |alpha: f64| CesaroOrder::new(alpha, beta);
    let star = |order: CesaroOrder| means.cesaro(order).maximal();

    let zero_abs = abs_means.cesaro(CesaroOrder::real(0.0)).maximal();
    let mut lemma1 = [0.0; 2];
    for (slot, alpha) in lemma1.iter_mut().zip(LEMMA1_ALPHAS) {
        *slot = pointwise_ratio(&star(order(alpha)?), &zero_abs, scale);
    }

    let mut denom = CubeFunction::zeros(f.dim())?;
    for j in 1..=m + 1 {
        denom = denom.add(&star(CesaroOrder::integer(-(j as i64))))?;
    }
    let lemma2 = pointwise_ratio(&star(order(-(m as f64))?), &denom, scale);

    let upper = star(CesaroOrder::integer(-(m as i64)));
    let lower = star(CesaroOrder::integer(-(m as i64) + 1));
    let excess = upper.zip_with(&lower, |a, b| (a - 2.0 * b).max(0.0))?;
    let lemma3 = pointwise_ratio(&excess, &means.square_function(m)?, scale);
    Ok(LemmaRatios { lemma1, lemma2, lemma3 })
}

/// `max_x num/den` over points where `den` is not negligible. A numerator
/// that survives where the denominator vanishes gives `+inf`.
fn pointwise_ratio(num: &CubeFunction, den: &CubeFunction, scale: f64) -> f64 {
    let floor = THRESHOLDS.ratio_floor * scale;
    num.values()
        .iter()
        .zip(den.values())
        .map(|(&a, &b)| {
            if b > floor {
                a / b
            } else if a > 1e3 * floor {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
}

pub const LEMMA_LABELS: [&str; 4] = ["lemma1_alpha_0.5", "lemma1_alpha_1", "lemma2", "lemma3"];

impl LemmaRatios {
    pub fn as_array(&self) -> [f64; 4] {
        [self.lemma1[0], self.lemma1[1], self.lemma2, self.lemma3]
    }
}

/// Per-`n` family maxima of the three lemma ratios; each ratio's series is
/// checked separately for growth.
pub fn nevo_stein_ratios(family: &TestFamily, m: usize, beta: f64, n_values: &[usize]) -> Result<SweepReport> {
    if !(1..=3).contains(&m) {
        return Err(invalid(format!("m must lie in 1..=3, got {m}")));
    }
    if !beta.is_finite() {
        return Err(invalid("beta must be finite"));
    }
    if family.members.is_empty() || n_values.is_empty() {
        return Err(invalid("empty family or n grid"));
    }
    let mut rows = Vec::with_capacity(n_values.len());
    let mut series: Vec<Vec<f64>> = vec![Vec::new(); LEMMA_LABELS.len()];
    for &n in n_values {
        check_dimension_cap(n)?;
        let instances = family.expand(n)?;
        let ratios = instances
            .par_iter()
            .filter(|inst| inst.function.max_abs() > 0.0)
            .map(|inst| Ok((inst.label.clone(), lemma_ratios(&inst.function, m, beta)?.as_array())))
            .collect::<Result<Vec<_>>>()?;
        let mut row = PerN::new(n, 0.0);
        for (i, label) in LEMMA_LABELS.iter().enumerate() {
            let (who, best) = ratios
                .iter()
                .map(|(who, r)| (who.as_str(), r[i]))
                .fold(("", 0.0f64), |b, c| if c.1 > b.1 { c } else { b });
            series[i].push(best);
            row = row.with(label, finite_or_null(best)).with(&format!("{label}_member"), who);
            row.statistic = row.statistic.max(best);
        }
        row.members = ratios
            .iter()
            .map(|(who, r)| MemberRow {
                member: who.clone(),
                statistic: r.iter().cloned().fold(0.0, f64::max),
            })
            .collect();
        rows.push(row);
    }
    let mut report = SweepReport::new("nevo_stein_ratios", family.seed, rows);
    report.m = Some(m);
    report.parameters.insert("beta".into(), beta.into());
    for (label, s) in LEMMA_LABELS.iter().zip(&series) {
        let failures = growth_failures(label, &report.n_values, s, THRESHOLDS.growth_limit);
        report.failures.extend(failures);
        report
            .diagnostics
            .insert(format!("{label}_sup"), s.iter().cloned().fold(0.0, f64::max));
    }
    Ok(report)
}

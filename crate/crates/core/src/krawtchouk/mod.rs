//! Normalized binary Krawtchouk polynomials.
//!
//! `kappa_k^n(r)` is the character sum of the sphere kernel `sigma_k` at any
//! frequency of weight `r`:
//!
//! ```text
//! kappa_k^n(r) = sum_j (-1)^j C(r, j) C(n - r, k - j) / C(n, k)
//! ```
//!
//! Tables are held as exact rationals; the `f64` view is obtained by
//! rounding, never by evaluating the alternating sum in floating point
//! (which cancels catastrophically once `n` reaches the low thirties).

mod binomial;

pub use self::binomial::{
    complex_binomial, rational_binomial, CesaroOrder, ComplexBinomialSeq,
};

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Largest dimension accepted by the exact table builders.
pub const MAX_EXACT_DIMENSION: usize = 64;

pub type Rational = BigRational;

/// `C(n, k)` as a big integer; zero when `k < 0` or `k > n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub(crate) fn ratio(num: BigInt, den: BigInt) -> Rational {
    Rational::new(num, den)
}

pub(crate) fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn check_exact_dimension(n: usize) -> Result<()> {
    if n > MAX_EXACT_DIMENSION {
        return Err(Error::DimensionOutOfRange {
            n,
            min: 0,
            max: MAX_EXACT_DIMENSION,
        });
    }
    Ok(())
}

/// A single entry `kappa_k^n(r)` by the alternating sum.
pub fn kappa_exact(n: usize, k: usize, r: usize) -> Result<Rational> {
    check_exact_dimension(n)?;
    if k > n || r > n {
        return Err(Error::IndexOutOfRange {
            index: k.max(r),
            bound: n + 1,
        });
    }
    Ok(alternating_sum(n, k, r))
}

fn alternating_sum(n: usize, k: usize, r: usize) -> Rational {
    let (n, k, r) = (n as i64, k as i64, r as i64);
    let mut num = BigInt::zero();
    for j in 0..=k.min(r) {
        let term = binomial(r, j) * binomial(n - r, k - j);
        if j % 2 == 0 {
            num += term;
        } else {
            num -= term;
        }
    }
    ratio(num, binomial(n, k))
}

/// The `(n+1) x (n+1)` matrix of `kappa_k^n(r)`, entry `(k, r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct KrawtchoukTable {
    n: usize,
    entries: Vec<Rational>,
    float_view: Vec<f64>,
}

#[derive(Serialize)]
struct TableRecord {
    k: usize,
    r: usize,
    numerator: String,
    denominator: String,
    float: f64,
}

#[derive(Serialize)]
struct TableJson {
    n: usize,
    entries: Vec<TableRecord>,
}

impl KrawtchoukTable {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn exact(&self, k: usize, r: usize) -> &Rational {
        &self.entries[k * (self.n + 1) + r]
    }

    pub fn value(&self, k: usize, r: usize) -> f64 {
        self.float_view[k * (self.n + 1) + r]
    }

    /// Row `k` of the float view: the multiplier of `sigma_k` by level.
    pub fn row(&self, k: usize) -> &[f64] {
        let w = self.n + 1;
        &self.float_view[k * w..(k + 1) * w]
    }

    pub fn exact_row(&self, k: usize) -> &[Rational] {
        let w = self.n + 1;
        &self.entries[k * w..(k + 1) * w]
    }

    pub fn float_view(&self) -> &[f64] {
        &self.float_view
    }

    /// Cached, shared table for dimension `n`.
    pub fn shared(n: usize) -> Result<Arc<KrawtchoukTable>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<KrawtchoukTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(t) = cache.lock().unwrap().get(&n) {
            return Ok(Arc::clone(t));
        }
        let table = Arc::new(build_table(n)?);
        cache.lock().unwrap().insert(n, Arc::clone(&table));
        Ok(table)
    }

    /// CSV with header `k,r,numerator,denominator,float`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,r,numerator,denominator,float\n");
        for rec in self.records() {
            out.push_str(&format!(
                "{},{},{},{},{:e}\n",
                rec.k, rec.r, rec.numerator, rec.denominator, rec.float
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let json = TableJson {
            n: self.n,
            entries: self.records().collect(),
        };
        Ok(serde_json::to_string_pretty(&json)?)
    }

    fn records(&self) -> impl Iterator<Item = TableRecord> + '_ {
        let w = self.n + 1;
        (0..w * w).map(move |i| TableRecord {
            k: i / w,
            r: i % w,
            numerator: self.entries[i].numer().to_string(),
            denominator: self.entries[i].denom().to_string(),
            float: self.float_view[i],
        })
    }
}

/// Builds the exact table twice, by the alternating sum and by the
/// three-term recurrence
/// `kappa_1 kappa_k = (k/n) kappa_{k-1} + ((n-k)/n) kappa_{k+1}`
/// (the multiplier form of `sigma_1 * sigma_k`), and insists they agree.
pub fn build_table(n: usize) -> Result<KrawtchoukTable> {
    check_exact_dimension(n)?;
    let w = n + 1;
    let mut by_sum = Vec::with_capacity(w * w);
    for k in 0..w {
        for r in 0..w {
            by_sum.push(alternating_sum(n, k, r));
        }
    }
    let by_recurrence = recurrence_table(n);
    if let Some(i) = (0..w * w).find(|&i| by_sum[i] != by_recurrence[i]) {
        return Err(Error::CrossCheck(format!(
            "kappa_{}^{}({}): sum {} vs recurrence {}",
            i / w,
            n,
            i % w,
            by_sum[i],
            by_recurrence[i]
        )));
    }
    let float_view = by_sum.iter().map(to_f64).collect();
    Ok(KrawtchoukTable {
        n,
        entries: by_sum,
        float_view,
    })
}

fn recurrence_table(n: usize) -> Vec<Rational> {
    let w = n + 1;
    let mut t = vec![Rational::zero(); w * w];
    let big_n = BigInt::from(n);
    for r in 0..w {
        t[r] = Rational::one();
        if n == 0 {
            continue;
        }
        let k1 = ratio(BigInt::from(n as i64 - 2 * r as i64), big_n.clone());
        t[w + r] = k1.clone();
        for k in 1..n {
            let prev = &t[(k - 1) * w + r];
            let cur = &t[k * w + r];
            let next = (Rational::from(big_n.clone()) * &k1 * cur - Rational::from(BigInt::from(k)) * prev)
                / Rational::from(BigInt::from(n - k));
            t[(k + 1) * w + r] = next;
        }
    }
    t
}

/// Residuals `(LHS - RHS)` of the two contiguous relations
///
/// ```text
/// kappa_r^n(l) + kappa_r^n(l-1) = 2 (n-r)/n kappa_r^{n-1}(l-1)
/// kappa_r^n(l) - kappa_r^n(l-1) = -2 r/n kappa_{r-1}^{n-1}(l-1)
/// ```
///
/// for `1 <= r, l <= n`. Both are exactly zero.
pub fn contiguous_residuals(
    table_n: &KrawtchoukTable,
    table_n_minus_1: &KrawtchoukTable,
    r: usize,
    l: usize,
) -> Result<(Rational, Rational)> {
    let n = table_n.dim();
    if table_n_minus_1.dim() + 1 != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: table_n_minus_1.dim() + 1,
        });
    }
    for idx in [r, l] {
        if idx == 0 || idx > n {
            return Err(Error::IndexOutOfRange { index: idx, bound: n + 1 });
        }
    }
    let nn = Rational::from(BigInt::from(n));
    let two = Rational::from(BigInt::from(2));
    let a = table_n.exact(r, l);
    let b = table_n.exact(r, l - 1);
    // kappa_n^{n-1} does not exist; its coefficient (n - r)/n is zero there.
    let plus_rhs = if r < n {
        &two * Rational::from(BigInt::from(n - r)) / &nn * table_n_minus_1.exact(r, l - 1)
    } else {
        Rational::zero()
    };
    let minus_rhs = -(&two * Rational::from(BigInt::from(r)) / &nn) * table_n_minus_1.exact(r - 1, l - 1);
    Ok((a + b - plus_rhs, a - b - minus_rhs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DifferenceMethod {
    /// Apply the step-two backward difference `m` times to table values.
    Iterated,
    /// `(-4)^m C(n-2m, r-m)/C(n, r) kappa_{r-m}^{n-2m}(l-2m)`.
    ClosedForm,
}

/// `partial^m kappa_r^n(l)`, the `m`-fold step-two backward difference in
/// `l`. Zero unless `m <= min(r, l/2)`.
pub fn partial_m(n: usize, m: usize, r: usize, l: usize, method: DifferenceMethod) -> Result<Rational> {
    check_exact_dimension(n)?;
    if r > n || l > n {
        return Err(Error::IndexOutOfRange {
            index: r.max(l),
            bound: n + 1,
        });
    }
    if m > r || 2 * m > l {
        return Ok(Rational::zero());
    }
    match method {
        DifferenceMethod::Iterated => {
            let table = KrawtchoukTable::shared(n)?;
            Ok(iterated_difference(&table, m, r, l))
        }
        DifferenceMethod::ClosedForm => Ok(closed_form_difference(n, m, r, l)),
    }
}

pub(crate) fn iterated_difference(table: &KrawtchoukTable, m: usize, r: usize, l: usize) -> Rational {
    // samples[j] = kappa_r(l - 2j), j = 0..=m; each pass differences
    // neighbours, leaving partial^m at samples[0].
    let mut samples: Vec<Rational> = (0..=m).map(|j| table.exact(r, l - 2 * j).clone()).collect();
    for pass in 0..m {
        for j in 0..m - pass {
            samples[j] = &samples[j] - &samples[j + 1];
        }
    }
    samples.swap_remove(0)
}

fn closed_form_difference(n: usize, m: usize, r: usize, l: usize) -> Rational {
    let reduced = n - 2 * m;
    if r - m > reduced {
        return Rational::zero();
    }
    let coeff = BigInt::from(-4).pow(m as u32) * binomial(reduced as i64, (r - m) as i64);
    ratio(coeff, binomial(n as i64, r as i64)) * alternating_sum(reduced, r - m, l - 2 * m)
}

/// Empirical decay constant
/// `c_n = min (-n ln|kappa_k^n(r)|) / (k r)` over `1 <= k, r <= n/2` with
/// `kappa_k^n(r) != 0`. Returns `+inf` when every candidate vanishes.
pub fn decay_constant(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(invalid(format!("decay constant needs n >= 2, got {n}")));
    }
    let table = KrawtchoukTable::shared(n)?;
    let half = n / 2;
    let mut best = f64::INFINITY;
    for k in 1..=half {
        for r in 1..=half {
            if table.exact(k, r).is_zero() {
                continue;
            }
            let c = -(n as f64) * table.exact(k, r).abs().to_f64().unwrap().ln() / (k * r) as f64;
            best = best.min(c);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(num: i64, den: i64) -> Rational {
        Rational::new(num.into(), den.into())
    }

    /// Brute-force character sum of sigma_k at the point E_r.
    fn brute_kappa(n: usize, k: usize, r: usize) -> Rational {
        let e_r = (1usize << r) - 1;
        let mut num = 0i64;
        let mut count = 0i64;
        for y in 0..1usize << n {
            if y.count_ones() as usize == k {
                count += 1;
                num += if (y & e_r).count_ones() % 2 == 0 { 1 } else { -1 };
            }
        }
        q(num, count)
    }

    #[test]
    fn table_examples() {
        let t4 = build_table(4).unwrap();
        assert_eq!(t4.exact(1, 1), &q(1, 2));
        assert_eq!(t4.exact(1, 1), &brute_kappa(4, 1, 1));
        assert_eq!(t4.exact(2, 2), &q(-1, 3));
        assert_eq!(t4.exact(2, 2), &brute_kappa(4, 2, 2));
        for n in 0..=10 {
            let t = build_table(n).unwrap();
            for r in 0..=n {
                assert!(t.exact(0, r).is_one());
                assert!(t.exact(r, 0).is_one());
            }
        }
    }

    #[test]
    fn table_matches_brute_force() {
        for n in 1..=9 {
            let t = build_table(n).unwrap();
            for k in 0..=n {
                for r in 0..=n {
                    assert_eq!(t.exact(k, r), &brute_kappa(n, k, r), "n={n} k={k} r={r}");
                }
            }
        }
    }

    #[test]
    fn table_range_errors() {
        assert!(build_table(MAX_EXACT_DIMENSION + 1).is_err());
        assert!(kappa_exact(4, 5, 0).is_err());
    }

    #[test]
    fn symmetry_reflection_and_bound() {
        for n in 0..=24 {
            let t = KrawtchoukTable::shared(n).unwrap();
            for k in 0..=n {
                for r in 0..=n {
                    assert_eq!(t.exact(k, r), t.exact(r, k));
                    let reflected = t.exact(k, n - r);
                    let expected = if k % 2 == 0 { t.exact(k, r).clone() } else { -t.exact(k, r) };
                    assert_eq!(reflected, &expected);
                    assert!(t.exact(k, r).abs() <= Rational::one());
                }
            }
        }
    }

    #[test]
    fn contiguous_examples() {
        let cases = [(6, 2, 3), (4, 4, 1), (8, 1, 8)];
        for (n, r, l) in cases {
            let a = build_table(n).unwrap();
            let b = build_table(n - 1).unwrap();
            let (plus, minus) = contiguous_residuals(&a, &b, r, l).unwrap();
            assert!(plus.is_zero() && minus.is_zero(), "n={n} r={r} l={l}");
        }
        let a = build_table(6).unwrap();
        let b = build_table(5).unwrap();
        assert!(contiguous_residuals(&a, &b, 0, 1).is_err());
        assert!(contiguous_residuals(&a, &b, 1, 7).is_err());
        assert!(contiguous_residuals(&a, &a, 1, 1).is_err());
    }

    #[test]
    fn contiguous_exhaustive() {
        for n in 1..=16 {
            let a = KrawtchoukTable::shared(n).unwrap();
            let b = KrawtchoukTable::shared(n - 1).unwrap();
            for r in 1..=n {
                for l in 1..=n {
                    let (p, m) = contiguous_residuals(&a, &b, r, l).unwrap();
                    assert!(p.is_zero() && m.is_zero(), "n={n} r={r} l={l}");
                }
            }
        }
    }

    #[test]
    fn partial_examples() {
        use DifferenceMethod::*;
        let t8 = build_table(8).unwrap();
        assert_eq!(partial_m(8, 0, 3, 4, Iterated).unwrap(), t8.exact(3, 4).clone());
        let one = partial_m(8, 1, 3, 4, Iterated).unwrap();
        assert_eq!(one, t8.exact(3, 4) - t8.exact(3, 2));
        let expected = q(-4, 1) * q(15, 56) * kappa_exact(6, 2, 2).unwrap();
        assert_eq!(one, expected);
        assert_eq!(partial_m(8, 1, 3, 4, ClosedForm).unwrap(), expected);
        assert!(partial_m(8, 5, 3, 4, Iterated).unwrap().is_zero());
        assert!(partial_m(8, 5, 3, 4, ClosedForm).unwrap().is_zero());
        // m <= l/2 is enforced literally at odd l.
        assert!(partial_m(8, 2, 3, 3, ClosedForm).unwrap().is_zero());
        assert!(partial_m(8, 1, 9, 4, Iterated).is_err());
    }

    #[test]
    fn partial_methods_agree_exhaustively() {
        for n in 0..=16 {
            for m in 0..=4 {
                for r in 0..=n {
                    for l in 0..=n {
                        let a = partial_m(n, m, r, l, DifferenceMethod::Iterated).unwrap();
                        let b = partial_m(n, m, r, l, DifferenceMethod::ClosedForm).unwrap();
                        assert_eq!(a, b, "n={n} m={m} r={r} l={l}");
                    }
                }
            }
        }
    }

    #[test]
    fn decay_examples() {
        assert_eq!(decay_constant(2).unwrap(), f64::INFINITY);
        assert!((decay_constant(4).unwrap() - 3f64.ln()).abs() < 1e-12);
        assert!(decay_constant(1).is_err());
    }

    /// Exhaustive oracle for c_16 in exact arithmetic; the frozen value
    /// guards regressions.
    #[test]
    fn decay_constant_n16_regression() {
        let mut best = f64::INFINITY;
        for k in 1..=8 {
            for r in 1..=8 {
                let v = brute_kappa_fast(16, k, r);
                if v != 0.0 {
                    best = best.min(-16.0 * v.abs().ln() / (k * r) as f64);
                }
            }
        }
        let c16 = decay_constant(16).unwrap();
        assert!(c16 > 0.0);
        assert!((c16 - best).abs() < 1e-12);
        assert!((c16 - C16_FROZEN).abs() < 1e-9, "c16 = {c16:.12}");
    }

    const C16_FROZEN: f64 = 1.303539764635;

    fn brute_kappa_fast(n: usize, k: usize, r: usize) -> f64 {
        // Count k-subsets by parity of intersection with {1..r} directly.
        let mut even = 0u64;
        let mut odd = 0u64;
        for y in 0u32..1 << n {
            if y.count_ones() as usize == k {
                if (y & ((1 << r) - 1)).count_ones() % 2 == 0 {
                    even += 1;
                } else {
                    odd += 1;
                }
            }
        }
        (even as f64 - odd as f64) / (even + odd) as f64
    }

    proptest! {
        #[test]
        fn float_view_is_rounded_exact(n in 1usize..30, k in 0usize..30, r in 0usize..30) {
            let (k, r) = (k % (n + 1), r % (n + 1));
            let t = KrawtchoukTable::shared(n).unwrap();
            prop_assert_eq!(t.value(k, r), to_f64(t.exact(k, r)));
        }
    }

    #[test]
    fn csv_export() {
        let csv = build_table(2).unwrap().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("k,r,numerator,denominator,float"));
        assert_eq!(lines.next(), Some("0,0,1,1,1e0"));
        assert_eq!(csv.lines().count(), 10);
        assert!(csv.contains("1,1,0,1,0e0"));
    }
}

//! Complex-order Cesaro means of the even spherical averages.
//!
//! For an order `lambda = alpha + i beta` and `0 <= n <= floor(N/4)`,
//!
//! ```text
//! S_n^lambda f = sum_{k<=n} A_{n-k}^lambda sigma_{2k} * f
//! ```
//!
//! Since `A_j^{-m-1} = (-1)^j C(m, j)`, the negative integer orders are the
//! backward differences `S_n^{-m-1} f = Delta^m sigma_{2n} * f`, and summing
//! those over `k <= n` raises the order by one.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cube::CubeFunction;
use crate::error::{invalid, Error, Result};
use crate::krawtchouk::{binomial, complex_binomial, to_f64, CesaroOrder, KrawtchoukTable, Rational};
use crate::maximal::sphere_means;

/// A complex function on the cube as a pair of real parts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexCubeFunction {
    pub re: CubeFunction,
    pub im: CubeFunction,
}

impl ComplexCubeFunction {
    pub fn from_real(re: CubeFunction) -> Self {
        let im = CubeFunction::from_raw(re.dim(), vec![0.0; re.len()]);
        Self { re, im }
    }

    pub fn dim(&self) -> usize {
        self.re.dim()
    }

    /// Pointwise modulus.
    pub fn modulus(&self) -> CubeFunction {
        let values = self
            .re
            .values()
            .iter()
            .zip(self.im.values())
            .map(|(a, b)| a.hypot(*b))
            .collect();
        CubeFunction::from_raw(self.dim(), values)
    }

    /// `sup_x |self - other|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.re.ensure_same_dim(&other.re)?;
        Ok((0..self.re.len())
            .map(|x| {
                (self.re.values()[x] - other.re.values()[x]).hypot(self.im.values()[x] - other.im.values()[x])
            })
            .fold(0.0, f64::max))
    }
}

/// `sum_i c_i g_i` with complex coefficients and real functions.
fn combine_real(n: usize, terms: &[(Complex64, &CubeFunction)]) -> ComplexCubeFunction {
    let len = 1usize << n;
    let mut re = vec![0.0; len];
    let mut im = vec![0.0; len];
    for (c, g) in terms {
        for (x, &v) in g.values().iter().enumerate() {
            re[x] += c.re * v;
            im[x] += c.im * v;
        }
    }
    ComplexCubeFunction {
        re: CubeFunction::from_raw(n, re),
        im: CubeFunction::from_raw(n, im),
    }
}

/// `sum_i c_i g_i` with complex coefficients and complex functions.
fn combine_complex(n: usize, terms: &[(Complex64, &ComplexCubeFunction)]) -> ComplexCubeFunction {
    let len = 1usize << n;
    let mut re = vec![0.0; len];
    let mut im = vec![0.0; len];
    for (c, g) in terms {
        for x in 0..len {
            let (a, b) = (g.re.values()[x], g.im.values()[x]);
            re[x] += c.re * a - c.im * b;
            im[x] += c.re * b + c.im * a;
        }
    }
    ComplexCubeFunction {
        re: CubeFunction::from_raw(n, re),
        im: CubeFunction::from_raw(n, im),
    }
}

/// The even spherical means `sigma_{2k} * f`, `k = 0..=floor(N/4)`,
/// computed once and shared by every Cesaro order.
#[derive(Clone, Debug)]
pub struct EvenSphereMeans {
    n_cube: usize,
    means: Vec<CubeFunction>,
}

impl EvenSphereMeans {
    pub fn new(f: &CubeFunction) -> Result<Self> {
        let radii: Vec<usize> = (0..=f.dim() / 4).map(|k| 2 * k).collect();
        Ok(Self {
            n_cube: f.dim(),
            means: sphere_means(f, &radii)?,
        })
    }

    /// Largest Cesaro index, `floor(N/4)`.
    pub fn max_index(&self) -> usize {
        self.means.len() - 1
    }

    /// `sigma_{2k} * f`.
    pub fn mean(&self, k: usize) -> &CubeFunction {
        &self.means[k]
    }

    pub fn cesaro(&self, order: CesaroOrder) -> CesaroSequence {
        let top = self.max_index();
        let coeffs = complex_binomial(order, top);
        let terms = (0..=top)
            .into_par_iter()
            .map(|n| {
                let parts: Vec<_> = (0..=n).map(|k| (coeffs.values[n - k], &self.means[k])).collect();
                combine_real(self.n_cube, &parts)
            })
            .collect();
        CesaroSequence {
            n_cube: self.n_cube,
            order,
            terms,
        }
    }

    /// `Delta^m sigma_{2n} * f` by explicit binomial expansion, with
    /// `sigma_{2k} := 0` for `k < 0`.
    pub fn differences(&self, m: usize) -> CesaroSequence {
        let top = self.max_index();
        let terms = (0..=top)
            .into_par_iter()
            .map(|n| {
                let weights: Vec<(Complex64, &CubeFunction)> = (0..=m.min(n))
                    .map(|j| {
                        let c = to_f64(&Rational::from(binomial(m as i64, j as i64)));
                        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                        (Complex64::new(sign * c, 0.0), &self.means[n - j])
                    })
                    .collect();
                combine_real(self.n_cube, &weights)
            })
            .collect();
        CesaroSequence {
            n_cube: self.n_cube,
            order: CesaroOrder::integer(-(m as i64) - 1),
            terms,
        }
    }
}

impl EvenSphereMeans {
    /// [`square_function`] on the cached means.
    pub fn square_function(&self, m: usize) -> Result<CubeFunction> {
        if m == 0 {
            return Err(invalid("square function needs m >= 1"));
        }
        let seq = self.differences(m);
        let mut acc = vec![0.0; 1usize << self.n_cube];
        for (k, term) in seq.terms.iter().enumerate() {
            let w = ((k + 1) as f64).powi(2 * m as i32 - 1);
            for (a, v) in acc.iter_mut().zip(term.re.values()) {
                *a += w * v * v;
            }
        }
        Ok(CubeFunction::from_raw(self.n_cube, acc.into_iter().map(f64::sqrt).collect()))
    }
}

/// `S_0^lambda f, ..., S_{floor(N/4)}^lambda f`.
#[derive(Clone, Debug, Serialize)]
pub struct CesaroSequence {
    pub n_cube: usize,
    pub order: CesaroOrder,
    pub terms: Vec<ComplexCubeFunction>,
}

impl CesaroSequence {
    /// `max_n |S_n^lambda f| / (n+1)^{alpha+1}`; the modulus of the complex
    /// power `(n+1)^{lambda+1}` is `(n+1)^{alpha+1}`.
    pub fn maximal(&self) -> CubeFunction {
        let len = 1usize << self.n_cube;
        let mut best = vec![0.0f64; len];
        for (n, term) in self.terms.iter().enumerate() {
            let scale = ((n + 1) as f64).powf(self.order.alpha + 1.0);
            for (b, v) in best.iter_mut().zip(term.modulus().values()) {
                *b = b.max(v / scale);
            }
        }
        CubeFunction::from_raw(self.n_cube, best)
    }

    /// `sup` over all terms of the pointwise distance to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.terms.len() != other.terms.len() {
            return Err(Error::DimensionMismatch {
                left: self.n_cube,
                right: other.n_cube,
            });
        }
        self.terms
            .iter()
            .zip(&other.terms)
            .map(|(a, b)| a.max_abs_diff(b))
            .try_fold(0.0f64, |m, d| d.map(|d| m.max(d)))
    }
}

pub fn cesaro_mean(f: &CubeFunction, order: CesaroOrder) -> Result<CesaroSequence> {
    Ok(EvenSphereMeans::new(f)?.cesaro(order))
}

/// `Delta^m sigma_{2n} * f` for `n = 0..=floor(N/4)`; equal to the Cesaro
/// means of order `-m-1`.
pub fn difference_means(f: &CubeFunction, m: usize) -> Result<CesaroSequence> {
    Ok(EvenSphereMeans::new(f)?.differences(m))
}

/// `S_*^lambda f = max_n |S_n^lambda f / (n+1)^{lambda+1}|`.
pub fn cesaro_maximal(f: &CubeFunction, order: CesaroOrder) -> Result<CubeFunction> {
    Ok(cesaro_mean(f, order)?.maximal())
}

/// `R_m f = (sum_k (k+1)^{2m-1} |S_k^{-m-1} f|^2)^{1/2}`.
pub fn square_function(f: &CubeFunction, m: usize) -> Result<CubeFunction> {
    EvenSphereMeans::new(f)?.square_function(m)
}

/// Radial symbol of `R_m^* R_m`: `w(r) = sum_k (k+1)^{2m-1} M_k(r)^2` with
/// `M_k` the multiplier of `Delta^m sigma_{2k}`, so that
/// `||R_m f||_2^2 = 2^-n sum_S w(|S|) |f_u(S)|^2`. Exact, then rounded.
pub fn square_function_symbol(n_cube: usize, m: usize) -> Result<Vec<f64>> {
    let table = KrawtchoukTable::shared(n_cube)?;
    let top = n_cube / 4;
    let mut symbol = Vec::with_capacity(n_cube + 1);
    for r in 0..=n_cube {
        let mut total = Rational::from(num_bigint::BigInt::from(0));
        for k in 0..=top {
            let mut mult = Rational::from(num_bigint::BigInt::from(0));
            for j in 0..=m.min(k) {
                let c = Rational::from(binomial(m as i64, j as i64)) * table.exact(2 * (k - j), r);
                if j % 2 == 0 {
                    mult += c;
                } else {
                    mult -= c;
                }
            }
            let weight = Rational::from(num_bigint::BigInt::from(k + 1).pow(2 * m as u32 - 1));
            total += weight * &mult * &mult;
        }
        symbol.push(to_f64(&total));
    }
    Ok(symbol)
}

/// The smallest even radius `r(x) = 2k <= 2 floor(N/4)` with
/// `sigma_{r(x)} * f (x) = S_*^{-1} f(x)`. Values within `1e-12 ||f||_inf`
/// of the maximum count as ties, so rounding noise in the spectral means
/// does not move the choice.
pub fn choice_function(f: &CubeFunction) -> Result<Vec<usize>> {
    f.ensure_nonnegative()?;
    let means = EvenSphereMeans::new(f)?;
    let slack = 1e-12 * f.max_abs();
    Ok((0..f.len())
        .map(|x| {
            let best = (0..=means.max_index())
                .map(|k| means.mean(k).values()[x].abs())
                .fold(0.0, f64::max);
            let k = (0..=means.max_index())
                .find(|&k| means.mean(k).values()[x].abs() >= best - slack)
                .unwrap_or(0);
            2 * k
        })
        .collect())
}

/// Residual of the summation-by-parts identity
///
/// ```text
/// sum_{k<=t} A_{n-k}^{-l+i beta} S_k^{-m-1+l} f
///   = A_{n-t}^{-l+i beta} S_t^{-m+l} f + sum_{k<t} A_{n-k}^{-l-1+i beta} S_k^{-m+l} f
/// ```
///
/// both sides evaluated independently; returns `sup_x |LHS - RHS|`.
pub fn sbp_residual(f: &CubeFunction, n: usize, t: usize, l: usize, m: usize, beta: f64) -> Result<f64> {
    let means = EvenSphereMeans::new(f)?;
    sbp_residual_with(&means, n, t, l, m, beta)
}

pub fn sbp_residual_with(means: &EvenSphereMeans, n: usize, t: usize, l: usize, m: usize, beta: f64) -> Result<f64> {
    if t > n || n > means.max_index() {
        return Err(invalid(format!(
            "need 0 <= t <= n <= {}, got t={t} n={n}",
            means.max_index()
        )));
    }
    if l > m {
        return Err(invalid(format!("need 0 <= l <= m, got l={l} m={m}")));
    }
    let (l, m) = (l as f64, m as f64);
    let outer = complex_binomial(CesaroOrder::new(-l, beta)?, n);
    let outer_lower = complex_binomial(CesaroOrder::new(-l - 1.0, beta)?, n);
    let inner_low = means.cesaro(CesaroOrder::real(-m - 1.0 + l));
    let inner_high = means.cesaro(CesaroOrder::real(-m + l));
    let dim = means.n_cube;

    let lhs_parts: Vec<_> = (0..=t).map(|k| (outer.values[n - k], &inner_low.terms[k])).collect();
    let lhs = combine_complex(dim, &lhs_parts);
    let mut rhs_parts = vec![(outer.values[n - t], &inner_high.terms[t])];
    rhs_parts.extend((0..t).map(|k| (outer_lower.values[n - k], &inner_high.terms[k])));
    let rhs = combine_complex(dim, &rhs_parts);
    lhs.max_abs_diff(&rhs)
}

/// Residual of `S_n^{lambda+delta} f = sum_{k<=n} A_{n-k}^{delta-1} S_k^lambda f`,
/// maximized over `n` and `x`.
pub fn convolution_identity_residual(means: &EvenSphereMeans, lambda: CesaroOrder, delta: Complex64) -> Result<f64> {
    let direct = means.cesaro(lambda.shifted(delta));
    let inner = means.cesaro(lambda);
    let coeffs = complex_binomial(
        CesaroOrder::new(delta.re - 1.0, delta.im)?,
        means.max_index(),
    );
    let mut worst = 0.0f64;
    for n in 0..=means.max_index() {
        let parts: Vec<_> = (0..=n).map(|k| (coeffs.values[n - k], &inner.terms[k])).collect();
        let composed = combine_complex(means.n_cube, &parts);
        worst = worst.max(composed.max_abs_diff(&direct.terms[n])?);
    }
    Ok(worst)
}

/// Residual of `S_n^lambda f - S_{n-1}^lambda f = S_n^{lambda-1} f`
/// (with `S_{-1} := 0`), maximized over `n` and `x`.
pub fn telescoping_residual(means: &EvenSphereMeans, lambda: CesaroOrder) -> Result<f64> {
    let upper = means.cesaro(lambda);
    let lower = means.cesaro(lambda.shifted(Complex64::new(-1.0, 0.0)));
    let one = Complex64::new(1.0, 0.0);
    let mut worst = 0.0f64;
    for n in 0..=means.max_index() {
        let mut parts = vec![(one, &upper.terms[n])];
        if n > 0 {
            parts.push((-one, &upper.terms[n - 1]));
        }
        let diff = combine_complex(means.n_cube, &parts);
        worst = worst.max(diff.max_abs_diff(&lower.terms[n])?);
    }
    Ok(worst)
}

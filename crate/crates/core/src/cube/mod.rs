//! Dense real-valued functions on the Boolean hypercube `{0,1}^n`.
//!
//! A point of the cube is stored as an integer index: bit `i` of the index
//! is coordinate `x(i + 1)`. Every module in the crate shares this
//! convention, so the point `E_r = (1, ..., 1, 0, ..., 0)` with `r` leading
//! ones is the index `2^r - 1`.

mod io;
mod transform;

pub use self::transform::{
    character_sum_transform, convolve, inverse_character_sum_transform, wht_in_place,
    wht_normalized, ConvolutionMethod,
};
pub(crate) use self::transform::apply_level_multiplier;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest dimension a [`CubeFunction`] may have. A function at this size
/// already occupies 8 GiB.
pub const MAX_DIMENSION: usize = 30;

/// Default practical dimension cap used by the harness and the CLI.
pub const DEFAULT_DIMENSION_CAP: usize = 24;

/// Environment variable overriding [`DEFAULT_DIMENSION_CAP`].
pub const DIMENSION_CAP_ENV: &str = "CUBE_HARMONICS_MAX_N";

/// The practical dimension cap: `CUBE_HARMONICS_MAX_N` if set and valid,
/// otherwise [`DEFAULT_DIMENSION_CAP`]. Never exceeds [`MAX_DIMENSION`].
pub fn dimension_cap() -> usize {
    std::env::var(DIMENSION_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map(|n| n.clamp(1, MAX_DIMENSION))
        .unwrap_or(DEFAULT_DIMENSION_CAP)
}

/// Checks `n` against the practical cap (see [`dimension_cap`]).
pub fn check_dimension_cap(n: usize) -> Result<()> {
    let cap = dimension_cap();
    if n == 0 || n > cap {
        return Err(Error::DimensionOutOfRange { n, min: 1, max: cap });
    }
    Ok(())
}

fn check_dimension(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIMENSION {
        return Err(Error::DimensionOutOfRange {
            n,
            min: 1,
            max: MAX_DIMENSION,
        });
    }
    Ok(())
}

/// Hamming weight of the point `x` of the `n`-cube.
pub fn hamming_weight(x: usize, n: usize) -> Result<u32> {
    if n > MAX_DIMENSION || x >= (1usize << n) {
        return Err(Error::IndexOutOfRange {
            index: x,
            bound: 1usize << n.min(MAX_DIMENSION),
        });
    }
    Ok(x.count_ones())
}

/// A real-valued function on the `n`-cube, stored densely with `2^n` values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCubeFunction")]
pub struct CubeFunction {
    n: usize,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawCubeFunction {
    n: usize,
    values: Vec<f64>,
}

impl TryFrom<RawCubeFunction> for CubeFunction {
    type Error = Error;

    fn try_from(raw: RawCubeFunction) -> Result<Self> {
        CubeFunction::new(raw.n, raw.values)
    }
}

impl CubeFunction {
    /// Wraps `values`, checking the length and that every entry is finite.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        check_dimension(n)?;
        let expected = 1usize << n;
        if values.len() != expected {
            return Err(Error::LengthMismatch {
                n,
                expected,
                actual: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { n, values })
    }

    /// Callers guarantee the length; finiteness is debug-checked.
    pub(crate) fn from_raw(n: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), 1usize << n);
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self { n, values }
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::constant(n, 0.0)
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        check_dimension(n)?;
        if !c.is_finite() {
            return Err(Error::NonFinite { index: 0 });
        }
        Ok(Self::from_raw(n, vec![c; 1usize << n]))
    }

    /// The point mass at the origin.
    pub fn delta(n: usize) -> Result<Self> {
        Self::point_mass(n, 0)
    }

    pub fn point_mass(n: usize, x: usize) -> Result<Self> {
        let mut f = Self::zeros(n)?;
        if x >= f.len() {
            return Err(Error::IndexOutOfRange {
                index: x,
                bound: f.len(),
            });
        }
        f.values[x] = 1.0;
        Ok(f)
    }

    /// Builds a function from a closure over point indices.
    pub fn from_fn(n: usize, mut value: impl FnMut(usize) -> f64) -> Result<Self> {
        check_dimension(n)?;
        Self::new(n, (0..1usize << n).map(&mut value).collect())
    }

    /// Indicator of the set of points where `member` holds.
    pub fn indicator(n: usize, mut member: impl FnMut(usize) -> bool) -> Result<Self> {
        Self::from_fn(n, |x| if member(x) { 1.0 } else { 0.0 })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of points, `2^n`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, x: usize) -> Option<f64> {
        self.values.get(x).copied()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// `sup |f|`.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub(crate) fn ensure_nonnegative(&self) -> Result<()> {
        match self.values.iter().position(|&v| v < 0.0) {
            Some(index) => Err(Error::NegativeInput {
                index,
                value: self.values[index],
            }),
            None => Ok(()),
        }
    }

    pub(crate) fn ensure_same_dim(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// Pointwise `|f|`.
    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn map(&self, op: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = self.values.iter().map(|&v| op(v)).collect();
        Self::new(self.n, values).expect("map produced a non-finite value")
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// Pointwise combination of two functions of the same dimension.
    pub fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.ensure_same_dim(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Self::new(self.n, values)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// `max_x |f(x) - g(x)|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.ensure_same_dim(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }
}

/// An `L^p` exponent, `1 <= p <= inf`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct LpExponent(f64);

impl LpExponent {
    pub const ONE: Self = Self(1.0);
    pub const TWO: Self = Self(2.0);
    pub const INFINITY: Self = Self(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        Ok(Self(p))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

impl TryFrom<f64> for LpExponent {
    type Error = Error;

    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<LpExponent> for f64 {
    fn from(p: LpExponent) -> f64 {
        p.0
    }
}

impl std::str::FromStr for LpExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "Inf" => Ok(Self::INFINITY),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("not an exponent: {other}")))
                .and_then(Self::new),
        }
    }
}

impl std::fmt::Display for LpExponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// `L^p` norm with respect to counting measure.
pub fn lp_norm(f: &CubeFunction, p: LpExponent) -> f64 {
    let p = p.get();
    if p.is_infinite() {
        return f.max_abs();
    }
    if p == 1.0 {
        return f.values.iter().map(|v| v.abs()).sum();
    }
    // Scale by the sup norm so large dimensions cannot overflow |f|^p.
    let scale = f.max_abs();
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = f.values.iter().map(|v| (v.abs() / scale).powf(p)).sum();
    scale * sum.powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamming_weight_examples() {
        assert_eq!(hamming_weight(0, 8).unwrap(), 0);
        assert_eq!(hamming_weight((1 << 8) - 1, 8).unwrap(), 8);
        assert_eq!(hamming_weight(0b1011, 4).unwrap(), 3);
        assert!(matches!(
            hamming_weight(16, 4),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn lp_norm_examples() {
        let delta = CubeFunction::delta(4).unwrap();
        assert_eq!(lp_norm(&delta, LpExponent::ONE), 1.0);
        assert_eq!(lp_norm(&delta, LpExponent::TWO), 1.0);
        let one = CubeFunction::constant(4, 1.0).unwrap();
        assert!((lp_norm(&one, LpExponent::TWO) - 4.0).abs() < 1e-15);
        assert_eq!(lp_norm(&one, LpExponent::INFINITY), 1.0);
        assert_eq!(lp_norm(&CubeFunction::zeros(3).unwrap(), LpExponent::TWO), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            CubeFunction::new(3, vec![0.0; 7]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            CubeFunction::new(1, vec![0.0, f64::NAN]),
            Err(Error::NonFinite { index: 1 })
        ));
        assert!(CubeFunction::zeros(0).is_err());
        assert!(CubeFunction::zeros(MAX_DIMENSION + 1).is_err());
        assert!(LpExponent::new(0.5).is_err());
        assert!(LpExponent::new(f64::NAN).is_err());
        assert_eq!("inf".parse::<LpExponent>().unwrap(), LpExponent::INFINITY);
    }

    #[test]
    fn json_round_trip_validates() {
        let f = CubeFunction::from_fn(3, |x| x as f64 * 0.5).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(serde_json::from_str::<CubeFunction>(&s).unwrap(), f);
        assert!(serde_json::from_str::<CubeFunction>(r#"{"n":2,"values":[1,2,3]}"#).is_err());
    }
}

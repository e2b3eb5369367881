//! Maximal operators, the weak-type quasi-norm, the point-mass
//! counterexample and the sphere-avoiding center search.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cube::{apply_level_multiplier, character_sum_transform, lp_norm, CubeFunction, LpExponent};
use crate::error::{invalid, Error, Result};
use crate::krawtchouk::{binomial, to_f64, KrawtchoukTable};
use crate::spherical::{noise_multiplier, noise_time_grid};

/// Which family of averages the supremum runs over.
///
/// Radius ranges use floors when `n` is not divisible: `Half` takes
/// `k <= floor(n/2)`, `Even` takes radii `2k` with `k <= floor(n/4)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaximalVariant {
    /// All radii `0..=n`.
    Full,
    /// Radii `0..=floor(n/2)`.
    Half,
    /// Even radii `2k`, `k <= floor(n/4)`.
    Even,
    /// `sup_K (K+1)^{-1} |sum_{j<=K} sigma_j * f|`, `K <= floor(n/2)`.
    Smooth,
    /// `sup_t |N_t f|` over [`noise_time_grid`].
    Semigroup,
}

impl MaximalVariant {
    pub const ALL: [MaximalVariant; 5] = [Self::Full, Self::Half, Self::Even, Self::Smooth, Self::Semigroup];

    pub fn name(self) -> &'static str {
        match self {
            Self::Full => "full",
            Self::Half => "half",
            Self::Even => "even",
            Self::Smooth => "smooth",
            Self::Semigroup => "semigroup",
        }
    }

    /// Sphere radii for the three spherical variants.
    pub fn radii(self, n: usize) -> Vec<usize> {
        match self {
            Self::Full => (0..=n).collect(),
            Self::Half | Self::Smooth => (0..=n / 2).collect(),
            Self::Even => (0..=n / 4).map(|k| 2 * k).collect(),
            Self::Semigroup => Vec::new(),
        }
    }
}

impl std::str::FromStr for MaximalVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| invalid(format!("unknown maximal variant `{s}`")))
    }
}

fn level_multipliers(n: usize, variant: MaximalVariant) -> Result<Vec<Vec<f64>>> {
    let table = KrawtchoukTable::shared(n)?;
    Ok(match variant {
        MaximalVariant::Full | MaximalVariant::Half | MaximalVariant::Even => {
            variant.radii(n).into_iter().map(|k| table.row(k).to_vec()).collect()
        }
        MaximalVariant::Smooth => {
            let mut acc = vec![0.0; n + 1];
            variant
                .radii(n)
                .into_iter()
                .map(|k| {
                    acc.iter_mut().zip(table.row(k)).for_each(|(a, v)| *a += v);
                    acc.iter().map(|a| a / (k + 1) as f64).collect()
                })
                .collect()
        }
        MaximalVariant::Semigroup => noise_time_grid()
            .into_iter()
            .map(|t| noise_multiplier(n, t).map(|m| m.multiplier))
            .collect::<Result<_>>()?,
    })
}

/// `sigma_k * f` for each requested radius, sharing one forward transform.
pub fn sphere_means(f: &CubeFunction, radii: &[usize]) -> Result<Vec<CubeFunction>> {
    let n = f.dim();
    if let Some(&k) = radii.iter().find(|&&k| k > n) {
        return Err(Error::IndexOutOfRange { index: k, bound: n + 1 });
    }
    let table = KrawtchoukTable::shared(n)?;
    let spectrum = character_sum_transform(f);
    Ok(radii
        .par_iter()
        .map(|&k| apply_level_multiplier(n, spectrum.values(), table.row(k)))
        .collect())
}

fn pointwise_abs_max(n: usize, spectrum: &[f64], multipliers: &[Vec<f64>]) -> CubeFunction {
    let len = spectrum.len();
    // max is exact and commutative, so the reduction order does not matter.
    let values = multipliers
        .par_iter()
        .map(|m| apply_level_multiplier(n, spectrum, m).into_values())
        .reduce(
            || vec![0.0; len],
            |mut acc, v| {
                acc.iter_mut().zip(&v).for_each(|(a, b)| *a = a.max(b.abs()));
                acc
            },
        );
    CubeFunction::from_raw(n, values)
}

/// Pointwise supremum of `|average * f|` over the variant's index set.
pub fn maximal_function(f: &CubeFunction, variant: MaximalVariant) -> Result<CubeFunction> {
    let multipliers = level_multipliers(f.dim(), variant)?;
    let spectrum = character_sum_transform(f);
    Ok(pointwise_abs_max(f.dim(), spectrum.values(), &multipliers))
}

/// The weak-type (1,1) functional `sup_lambda lambda |{g > lambda}|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakTypeReport {
    pub n: usize,
    /// Alphabet size of the group; 2 for the hypercube.
    pub q: usize,
    pub quasinorm: f64,
    /// The level `lambda*` approached from below by the supremum.
    pub argmax_level: f64,
    /// `L^1` norm of the function the maximal operator was applied to.
    pub input_l1: f64,
    /// `quasinorm / input_l1 / sqrt(n)`.
    pub ratio_to_sqrt_n: f64,
}

impl WeakTypeReport {
    /// Re-bases the report on the `L^1` norm of the operator's input.
    pub fn with_input_l1(mut self, l1: f64) -> Self {
        self.input_l1 = l1;
        self.ratio_to_sqrt_n = self.quasinorm / l1 / (self.n as f64).sqrt();
        self
    }

    pub fn ratio(&self) -> f64 {
        self.quasinorm / self.input_l1
    }
}

/// Exact supremum over thresholds of `lambda |{g > lambda}|` for `g >= 0`.
///
/// The counting function jumps only at values of `g`; just below a value
/// `v` the product tends to `v #{g >= v}`, so the supremum is the largest of
/// those products.
pub fn weak_type_quasinorm(g: &CubeFunction) -> Result<WeakTypeReport> {
    g.ensure_nonnegative()?;
    let mut sorted = g.values().to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let (mut best, mut level) = (0.0, 0.0);
    let mut i = 0;
    while i < sorted.len() && sorted[i] > 0.0 {
        let v = sorted[i];
        while i < sorted.len() && sorted[i] == v {
            i += 1;
        }
        let candidate = v * i as f64;
        if candidate > best {
            best = candidate;
            level = v;
        }
    }
    let report = WeakTypeReport {
        n: g.dim(),
        q: 2,
        quasinorm: best,
        argmax_level: level,
        input_l1: 0.0,
        ratio_to_sqrt_n: 0.0,
    };
    Ok(report.with_input_l1(lp_norm(g, LpExponent::ONE)))
}

/// `q^n / max_j (q-1)^j C(n, j)` exactly: the weak-type ratio forced by the
/// point mass on `Z_q^n`, where every point lies on some sphere about the
/// origin and the largest sphere bounds the averages from below.
pub fn delta_lower_bound_exact(n: usize, q: usize) -> Result<BigRational> {
    if q < 2 {
        return Err(invalid(format!("alphabet size must be >= 2, got {q}")));
    }
    let total = BigInt::from(q).pow(n as u32);
    let largest = (0..=n)
        .map(|j| BigInt::from(q - 1).pow(j as u32) * binomial(n as i64, j as i64))
        .max()
        .unwrap_or_else(BigInt::one);
    Ok(BigRational::new(total, largest))
}

pub fn delta_lower_bound(n: usize, q: usize) -> Result<f64> {
    delta_lower_bound_exact(n, q).map(|r| to_f64(&r))
}

/// Result of the sphere-avoiding center search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterReport {
    pub center: usize,
    /// `max_k` fraction of the `k`-sphere about `center` that meets `L`.
    pub value: f64,
    /// `(2^-n sum_x ((1_L)**)^p)^{1/p}`, which the minimum cannot exceed.
    pub averaging_bound: f64,
    pub density: f64,
}

/// Exhaustive search for the center minimizing the full maximal function of
/// the indicator `L`.
pub fn find_center(l: &CubeFunction, p: LpExponent) -> Result<CenterReport> {
    if let Some(index) = l.values().iter().position(|&v| v != 0.0 && v != 1.0) {
        return Err(invalid(format!("set indicator has value {} at {index}", l.values()[index])));
    }
    let members = l.sum();
    if members as usize == l.len() {
        return Err(invalid("the set is the whole cube"));
    }
    let density = members / l.len() as f64;
    if members == 0.0 {
        return Ok(CenterReport {
            center: 0,
            value: 0.0,
            averaging_bound: 0.0,
            density,
        });
    }
    let maximal = maximal_function(l, MaximalVariant::Full)?;
    let (center, value) = maximal
        .values()
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (x, v)| if v < best.1 { (x, v) } else { best });
    let averaging_bound = if p.is_infinite() {
        maximal.max_abs()
    } else {
        lp_norm(&maximal, p) / (l.len() as f64).powf(1.0 / p.get())
    };
    Ok(CenterReport {
        center,
        value,
        averaging_bound,
        density,
    })
}

//! Radial kernels on the cube and their spectral multipliers.
//!
//! A radial kernel is determined by its value on each Hamming sphere, so it
//! is stored as `n + 1` weights. Its character-sum transform is again radial
//! and is computed through the Krawtchouk table:
//!
//! ```text
//! multiplier[r] = sum_j weights[j] C(n, j) kappa_j(r)
//! weights[j]    = 2^-n sum_r C(n, r) multiplier[r] kappa_r(j)
//! ```

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::cube::{apply_level_multiplier, character_sum_transform, CubeFunction};
use crate::error::{invalid, Error, Result};
use crate::krawtchouk::{binomial, ratio, to_f64, KrawtchoukTable, Rational};

/// Weights of a radial function: `weights[j]` is its value at any point of
/// Hamming weight `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub n: usize,
    pub weights: Vec<f64>,
}

/// A radial multiplier, `multiplier[r]` at every frequency of weight `r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralProfile {
    pub n: usize,
    pub multiplier: Vec<f64>,
}

/// Radial profile with exact rational weights.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactProfile {
    pub n: usize,
    pub weights: Vec<Rational>,
}

fn binomial_f64(n: usize, k: usize) -> f64 {
    binomial(n as i64, k as i64).to_f64().unwrap()
}

fn check_same(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch { left, right });
    }
    Ok(())
}

impl RadialProfile {
    pub fn new(n: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != n + 1 {
            return Err(Error::LengthMismatch {
                n,
                expected: n + 1,
                actual: weights.len(),
            });
        }
        if let Some(index) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { n, weights })
    }

    /// `sum_x p(x) = sum_j C(n, j) weights[j]`.
    pub fn mass(&self) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(j, w)| binomial_f64(self.n, j) * w)
            .sum()
    }

    /// The profile as a dense function on the cube.
    pub fn to_cube_function(&self) -> Result<CubeFunction> {
        CubeFunction::from_fn(self.n, |x| self.weights[x.count_ones() as usize])
    }

    /// Exact rational copy; every finite `f64` is a dyadic rational.
    pub fn to_exact(&self) -> ExactProfile {
        ExactProfile {
            n: self.n,
            weights: self
                .weights
                .iter()
                .map(|&w| BigRational::from_float(w).expect("finite weight"))
                .collect(),
        }
    }
}

impl ExactProfile {
    pub fn to_float(&self) -> RadialProfile {
        RadialProfile {
            n: self.n,
            weights: self.weights.iter().map(to_f64).collect(),
        }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: &Rational, other: &Self, b: &Rational) -> Result<Self> {
        check_same(self.n, other.n)?;
        Ok(Self {
            n: self.n,
            weights: self
                .weights
                .iter()
                .zip(&other.weights)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }
}

/// `sigma_k`: the uniform probability measure on the sphere of radius `k`.
pub fn sphere_kernel(n: usize, k: usize) -> Result<RadialProfile> {
    if k > n {
        return Err(Error::IndexOutOfRange { index: k, bound: n + 1 });
    }
    let mut weights = vec![0.0; n + 1];
    weights[k] = 1.0 / binomial_f64(n, k);
    RadialProfile::new(n, weights)
}

pub fn sphere_kernel_exact(n: usize, k: usize) -> Result<ExactProfile> {
    if k > n {
        return Err(Error::IndexOutOfRange { index: k, bound: n + 1 });
    }
    let mut weights = vec![Rational::zero(); n + 1];
    weights[k] = ratio(1.into(), binomial(n as i64, k as i64));
    Ok(ExactProfile { n, weights })
}

/// Character-sum multiplier of a radial profile, `O(n^2)`.
pub fn profile_to_multiplier(p: &RadialProfile, table: &KrawtchoukTable) -> Result<SpectralProfile> {
    check_same(p.n, table.dim())?;
    let n = p.n;
    let masses: Vec<f64> = (0..=n).map(|j| p.weights[j] * binomial_f64(n, j)).collect();
    let multiplier = (0..=n)
        .map(|r| (0..=n).map(|j| masses[j] * table.value(j, r)).sum())
        .collect();
    Ok(SpectralProfile { n, multiplier })
}

pub fn profile_to_multiplier_exact(p: &ExactProfile, table: &KrawtchoukTable) -> Result<Vec<Rational>> {
    check_same(p.n, table.dim())?;
    let n = p.n;
    let masses: Vec<Rational> = (0..=n)
        .map(|j| &p.weights[j] * Rational::from(binomial(n as i64, j as i64)))
        .collect();
    Ok((0..=n)
        .map(|r| {
            (0..=n).fold(Rational::zero(), |acc, j| {
                if masses[j].is_zero() {
                    acc
                } else {
                    acc + &masses[j] * table.exact(j, r)
                }
            })
        })
        .collect())
}

/// Inverts [`profile_to_multiplier_exact`] using the Krawtchouk system.
pub fn multiplier_to_profile_exact(multiplier: &[Rational], table: &KrawtchoukTable) -> Result<ExactProfile> {
    let n = table.dim();
    if multiplier.len() != n + 1 {
        return Err(Error::LengthMismatch {
            n,
            expected: n + 1,
            actual: multiplier.len(),
        });
    }
    let two_n = Rational::from(num_bigint::BigInt::from(1) << n);
    let weighted: Vec<Rational> = (0..=n)
        .map(|r| &multiplier[r] * Rational::from(binomial(n as i64, r as i64)))
        .collect();
    let weights = (0..=n)
        .map(|j| {
            let s = (0..=n).fold(Rational::zero(), |acc, r| {
                if weighted[r].is_zero() {
                    acc
                } else {
                    acc + &weighted[r] * table.exact(r, j)
                }
            });
            s / &two_n
        })
        .collect();
    Ok(ExactProfile { n, weights })
}

/// `p * f`, computed spectrally in `O(n 2^n)`.
pub fn radial_convolve(p: &RadialProfile, f: &CubeFunction) -> Result<CubeFunction> {
    check_same(p.n, f.dim())?;
    let table = KrawtchoukTable::shared(p.n)?;
    let mult = profile_to_multiplier(p, &table)?;
    let spectrum = character_sum_transform(f);
    Ok(apply_level_multiplier(f.dim(), spectrum.values(), &mult.multiplier))
}

/// Radial profile of `p1 * p2`, exactly.
pub fn radial_compose_exact(p1: &ExactProfile, p2: &ExactProfile) -> Result<ExactProfile> {
    check_same(p1.n, p2.n)?;
    let table = KrawtchoukTable::shared(p1.n)?;
    let m1 = profile_to_multiplier_exact(p1, &table)?;
    let m2 = profile_to_multiplier_exact(p2, &table)?;
    let product: Vec<Rational> = m1.iter().zip(&m2).map(|(a, b)| a * b).collect();
    multiplier_to_profile_exact(&product, &table)
}

/// Radial profile of `p1 * p2`. The weights are lifted to exact rationals,
/// composed exactly and rounded once.
pub fn radial_compose(p1: &RadialProfile, p2: &RadialProfile) -> Result<RadialProfile> {
    Ok(radial_compose_exact(&p1.to_exact(), &p2.to_exact())?.to_float())
}

/// Level multiplier `e^{-t r}` of the noise semigroup.
pub fn noise_multiplier(n: usize, t: f64) -> Result<SpectralProfile> {
    if !t.is_finite() || t < 0.0 {
        return Err(invalid(format!("noise time must be finite and >= 0, got {t}")));
    }
    Ok(SpectralProfile {
        n,
        multiplier: (0..=n).map(|r| (-t * r as f64).exp()).collect(),
    })
}

/// `N_t f = sum_S e^{-t|S|} f^(S) chi_S`.
pub fn noise_semigroup(t: f64, f: &CubeFunction) -> Result<CubeFunction> {
    let mult = noise_multiplier(f.dim(), t)?;
    let spectrum = character_sum_transform(f);
    Ok(apply_level_multiplier(f.dim(), spectrum.values(), &mult.multiplier))
}

/// Dyadic time grid used wherever a supremum over `t` is computed:
/// `t = 0` and `t = 2^j` for `j = -8..=6`.
pub fn noise_time_grid() -> Vec<f64> {
    std::iter::once(0.0).chain((-8..=6).map(|j| 2f64.powi(j))).collect()
}

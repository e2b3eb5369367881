//! Complex binomial coefficients `A_n^lambda = (lambda+1)...(lambda+n)/n!`.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A complex Cesaro order `lambda = alpha + i beta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CesaroOrder {
    pub alpha: f64,
    pub beta: f64,
}

impl CesaroOrder {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(invalid(format!("non-finite Cesaro order {alpha} + {beta}i")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn real(alpha: f64) -> Self {
        Self::new(alpha, 0.0).expect("finite order")
    }

    /// The integer order `k`, e.g. `-m-1` for the difference means.
    pub fn integer(k: i64) -> Self {
        Self::real(k as f64)
    }

    pub fn lambda(self) -> Complex64 {
        Complex64::new(self.alpha, self.beta)
    }

    /// `lambda + delta`.
    pub fn shifted(self, delta: Complex64) -> Self {
        Self::new(self.alpha + delta.re, self.beta + delta.im).expect("finite order")
    }
}

impl std::fmt::Display for CesaroOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.beta == 0.0 {
            write!(f, "{}", self.alpha)
        } else {
            write!(f, "{}{:+}i", self.alpha, self.beta)
        }
    }
}

/// `A_0^lambda, ..., A_{n_max}^lambda`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexBinomialSeq {
    pub order: CesaroOrder,
    pub values: Vec<Complex64>,
}

impl ComplexBinomialSeq {
    /// `A_j^lambda`, with `A_j := 0` for negative `j`.
    pub fn get(&self, j: isize) -> Complex64 {
        if j < 0 {
            Complex64::zero()
        } else {
            self.values[j as usize]
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Multiplicative recurrence `A_n = A_{n-1} (lambda + n) / n`, `A_0 = 1`.
pub fn complex_binomial(order: CesaroOrder, n_max: usize) -> ComplexBinomialSeq {
    let lambda = order.lambda();
    let mut values = Vec::with_capacity(n_max + 1);
    let mut a = Complex64::one();
    values.push(a);
    for j in 1..=n_max {
        a = a * (lambda + j as f64) / j as f64;
        values.push(a);
    }
    ComplexBinomialSeq { order, values }
}

/// The same recurrence over the rationals, for rational real `lambda`.
pub fn rational_binomial(lambda: &BigRational, n_max: usize) -> Vec<BigRational> {
    let mut values = Vec::with_capacity(n_max + 1);
    let mut a = BigRational::one();
    values.push(a.clone());
    for j in 1..=n_max {
        let jj = BigRational::from_integer(j.into());
        a = a * (lambda + &jj) / jj;
        values.push(a.clone());
    }
    values
}

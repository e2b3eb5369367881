//! Walsh-Hadamard transforms and group convolution on the cube.

use rayon::prelude::*;

use super::CubeFunction;
use crate::error::Result;

/// Below this length the butterfly runs serially.
const PAR_THRESHOLD: usize = 1 << 14;
/// Stages with span up to this block size run block-locally.
const BLOCK: usize = 1 << 12;

#[inline]
fn butterfly(lo: &mut [f64], hi: &mut [f64]) {
    for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = x + y;
        *b = x - y;
    }
}

fn wht_serial(data: &mut [f64]) {
    let mut half = 1;
    while half < data.len() {
        for chunk in data.chunks_exact_mut(2 * half) {
            let (lo, hi) = chunk.split_at_mut(half);
            butterfly(lo, hi);
        }
        half *= 2;
    }
}

/// Unnormalized in-place Walsh-Hadamard transform,
/// `data[S] <- sum_x data[x] (-1)^{x.S}`.
///
/// `data.len()` must be a power of two. Every output entry is produced by
/// the same sequence of additions whatever the thread count, so results are
/// bit-identical between serial and parallel runs.
pub fn wht_in_place(data: &mut [f64]) {
    let len = data.len();
    assert!(len.is_power_of_two(), "length {len} is not a power of two");
    if len < PAR_THRESHOLD {
        wht_serial(data);
        return;
    }
    data.par_chunks_mut(BLOCK).for_each(wht_serial);
    let mut half = BLOCK;
    while half < len {
        data.par_chunks_mut(2 * half).for_each(|chunk| {
            let (lo, hi) = chunk.split_at_mut(half);
            lo.par_chunks_mut(BLOCK)
                .zip(hi.par_chunks_mut(BLOCK))
                .for_each(|(l, h)| butterfly(l, h));
        });
        half *= 2;
    }
}

/// The self-inverse Fourier transform with `2^{-n/2}`-normalized characters.
pub fn wht_normalized(f: &CubeFunction) -> CubeFunction {
    let mut values = f.values().to_vec();
    wht_in_place(&mut values);
    let scale = (-(f.dim() as f64) / 2.0).exp2();
    values.iter_mut().for_each(|v| *v *= scale);
    CubeFunction::from_raw(f.dim(), values)
}

/// The bare character sum `g_u(S) = sum_y g(y) (-1)^{y.S}`.
///
/// This is the transform under which convolution becomes pointwise
/// multiplication and the sphere kernel of radius `k` becomes the Krawtchouk
/// values `kappa_k(|S|)`.
pub fn character_sum_transform(g: &CubeFunction) -> CubeFunction {
    let mut values = g.values().to_vec();
    wht_in_place(&mut values);
    CubeFunction::from_raw(g.dim(), values)
}

/// Inverse of [`character_sum_transform`]: the same butterfly divided by `2^n`.
pub fn inverse_character_sum_transform(spectrum: &CubeFunction) -> CubeFunction {
    let mut values = spectrum.values().to_vec();
    wht_in_place(&mut values);
    let scale = (-(spectrum.dim() as f64)).exp2();
    values.iter_mut().for_each(|v| *v *= scale);
    CubeFunction::from_raw(spectrum.dim(), values)
}

/// Multiplies a character-sum spectrum by a radial multiplier (indexed by
/// frequency level `|S|`) and transforms back.
pub(crate) fn apply_level_multiplier(n: usize, spectrum: &[f64], multiplier: &[f64]) -> CubeFunction {
    debug_assert_eq!(multiplier.len(), n + 1);
    let scale = (-(n as f64)).exp2();
    let mut values: Vec<f64> = spectrum
        .iter()
        .enumerate()
        .map(|(s, &v)| v * multiplier[s.count_ones() as usize])
        .collect();
    wht_in_place(&mut values);
    values.iter_mut().for_each(|v| *v *= scale);
    CubeFunction::from_raw(n, values)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvolutionMethod {
    /// The double sum, `O(4^n)`.
    Direct,
    /// Transform, multiply, transform back, `O(n 2^n)`.
    Spectral,
}

/// Group convolution `(f * g)(x) = sum_y f(x - y) g(y)`, subtraction mod 2.
pub fn convolve(f: &CubeFunction, g: &CubeFunction, method: ConvolutionMethod) -> Result<CubeFunction> {
    f.ensure_same_dim(g)?;
    let n = f.dim();
    let values = match method {
        ConvolutionMethod::Direct => {
            let (fv, gv) = (f.values(), g.values());
            (0..fv.len())
                .into_par_iter()
                .map(|x| gv.iter().enumerate().map(|(y, &gy)| fv[x ^ y] * gy).sum())
                .collect()
        }
        ConvolutionMethod::Spectral => {
            let mut fs = f.values().to_vec();
            let mut gs = g.values().to_vec();
            wht_in_place(&mut fs);
            wht_in_place(&mut gs);
            fs.iter_mut().zip(&gs).for_each(|(a, b)| *a *= b);
            wht_in_place(&mut fs);
            let scale = (-(n as f64)).exp2();
            fs.iter_mut().for_each(|v| *v *= scale);
            fs
        }
    };
    CubeFunction::new(n, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::{lp_norm, LpExponent};
    use proptest::prelude::*;

    fn naive_wht(v: &[f64]) -> Vec<f64> {
        (0..v.len())
            .map(|s| {
                v.iter()
                    .enumerate()
                    .map(|(x, &fx)| if (x & s).count_ones() % 2 == 0 { fx } else { -fx })
                    .sum()
            })
            .collect()
    }

    fn sphere(n: usize, k: u32) -> CubeFunction {
        let count = (0..1usize << n).filter(|x| x.count_ones() == k).count() as f64;
        CubeFunction::from_fn(n, |x| if x.count_ones() == k { 1.0 / count } else { 0.0 }).unwrap()
    }

    #[test]
    fn normalized_transform_examples() {
        for n in [1, 5, 10] {
            let delta = CubeFunction::delta(n).unwrap();
            let c = (-(n as f64) / 2.0).exp2();
            let hat = wht_normalized(&delta);
            assert!(hat.values().iter().all(|&v| (v - c).abs() < 1e-15));
            let back = wht_normalized(&hat);
            assert!(back.max_abs_diff(&delta).unwrap() < 1e-12);
        }
    }

    #[test]
    fn character_sum_examples() {
        let delta = CubeFunction::delta(6).unwrap();
        assert!(character_sum_transform(&delta).values().iter().all(|&v| v == 1.0));
        let c = CubeFunction::constant(6, 1.0 / 64.0).unwrap();
        let t = character_sum_transform(&c);
        assert_eq!(t.values()[0], 1.0);
        assert!(t.values()[1..].iter().all(|&v| v == 0.0));
        // sigma_1 on the 4-cube evaluated at level r is (4 - 2r)/4.
        let s1 = character_sum_transform(&sphere(4, 1));
        for s in 0..16usize {
            let r = s.count_ones() as f64;
            assert!((s1.values()[s] - (4.0 - 2.0 * r) / 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn parallel_matches_naive_and_serial() {
        let n = 15;
        let f = CubeFunction::from_fn(n, |x| ((x * 2654435761) % 1000) as f64 / 1000.0 - 0.5).unwrap();
        let mut par = f.values().to_vec();
        wht_in_place(&mut par);
        let mut ser = f.values().to_vec();
        wht_serial(&mut ser);
        assert_eq!(par, ser);
        let small = CubeFunction::from_fn(8, |x| (x % 7) as f64).unwrap();
        let fast = character_sum_transform(&small);
        let slow = naive_wht(small.values());
        for (a, b) in fast.values().iter().zip(&slow) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn convolution_examples() {
        let n = 2;
        let s1 = sphere(n, 1);
        let expected = CubeFunction::from_fn(n, |x| match x.count_ones() {
            0 => 0.5,
            2 => 0.5,
            _ => 0.0,
        })
        .unwrap();
        for method in [ConvolutionMethod::Direct, ConvolutionMethod::Spectral] {
            let got = convolve(&s1, &s1, method).unwrap();
            assert!(got.max_abs_diff(&expected).unwrap() < 1e-15);
        }
        let f = CubeFunction::from_fn(5, |x| (x as f64).sin()).unwrap();
        let delta = CubeFunction::delta(5).unwrap();
        let got = convolve(&delta, &f, ConvolutionMethod::Direct).unwrap();
        assert_eq!(got, f);
        assert!(convolve(&f, &CubeFunction::delta(4).unwrap(), ConvolutionMethod::Direct).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn convolution_commutes_and_methods_agree(
            fv in prop::collection::vec(-1.0f64..1.0, 256),
            gv in prop::collection::vec(-1.0f64..1.0, 256),
        ) {
            let f = CubeFunction::new(8, fv).unwrap();
            let g = CubeFunction::new(8, gv).unwrap();
            let fg = convolve(&f, &g, ConvolutionMethod::Direct).unwrap();
            let gf = convolve(&g, &f, ConvolutionMethod::Direct).unwrap();
            let spectral = convolve(&f, &g, ConvolutionMethod::Spectral).unwrap();
            prop_assert!(fg.max_abs_diff(&gf).unwrap() < 1e-12);
            prop_assert!(fg.max_abs_diff(&spectral).unwrap() < 1e-10);
        }

        #[test]
        fn plancherel_and_involution(v in prop::collection::vec(-1.0f64..1.0, 1024)) {
            let f = CubeFunction::new(10, v).unwrap();
            let hat = wht_normalized(&f);
            let l2 = lp_norm(&f, LpExponent::TWO);
            prop_assert!((lp_norm(&hat, LpExponent::TWO) - l2).abs() <= 1e-10 * l2);
            prop_assert!(wht_normalized(&hat).max_abs_diff(&f).unwrap() <= 1e-10);
        }

        #[test]
        fn young_contraction(
            fv in prop::collection::vec(-1.0f64..1.0, 128),
            gv in prop::collection::vec(0.0f64..1.0, 128),
        ) {
            let f = CubeFunction::new(7, fv).unwrap();
            let g = CubeFunction::new(7, gv).unwrap();
            let h = convolve(&g, &f, ConvolutionMethod::Direct).unwrap();
            let g1 = lp_norm(&g, LpExponent::ONE);
            prop_assert!(lp_norm(&h, LpExponent::ONE) <= g1 * lp_norm(&f, LpExponent::ONE) + 1e-12);
            prop_assert!(h.max_abs() <= g1 * f.max_abs() + 1e-12);
        }
    }
}

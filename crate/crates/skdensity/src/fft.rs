//! Minimal n-dimensional FFT on row-major buffers, axis by axis.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// In-place multidimensional DFT of a row-major array with the given shape.
///
/// `inverse = false` applies `sum_j x_j exp(-2 pi i j k / N)` along every
/// axis, `inverse = true` the conjugate kernel. No normalization is applied
/// in either direction.
pub(crate) fn fft_nd(data: &mut [Complex64], shape: &[usize], inverse: bool) {
    let total: usize = shape.iter().product();
    assert_eq!(data.len(), total, "fft_nd: buffer does not match shape");
    let mut planner = FftPlanner::<f64>::new();
    for axis in 0..shape.len() {
        let len = shape[axis];
        if len == 1 {
            continue;
        }
        let fft = if inverse {
            planner.plan_fft_inverse(len)
        } else {
            planner.plan_fft_forward(len)
        };
        let inner: usize = shape[axis + 1..].iter().product();
        let outer: usize = shape[..axis].iter().product();
        if inner == 1 {
            // contiguous lanes: rustfft processes the buffer in chunks
            for chunk in data.chunks_exact_mut(len) {
                fft.process(chunk);
            }
            let _ = outer;
        } else {
            let mut lane = vec![Complex64::default(); len];
            for o in 0..outer {
                let base = o * len * inner;
                for i in 0..inner {
                    for (k, l) in lane.iter_mut().enumerate() {
                        *l = data[base + k * inner + i];
                    }
                    fft.process(&mut lane);
                    for (k, l) in lane.iter().enumerate() {
                        data[base + k * inner + i] = *l;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dft_reference(x: &[Complex64], sign: f64) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        v * Complex64::from_polar(
                            1.0,
                            sign * 2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64,
                        )
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_reference_1d() {
        let x: Vec<Complex64> = (0..8)
            .map(|j| Complex64::new(j as f64, (j * j) as f64 * 0.1))
            .collect();
        let mut fast = x.clone();
        fft_nd(&mut fast, &[8], false);
        for (f, r) in fast.iter().zip(dft_reference(&x, -1.0)) {
            assert_abs_diff_eq!(f.re, r.re, epsilon = 1e-12);
            assert_abs_diff_eq!(f.im, r.im, epsilon = 1e-12);
        }
        let mut inv = x.clone();
        fft_nd(&mut inv, &[8], true);
        for (f, r) in inv.iter().zip(dft_reference(&x, 1.0)) {
            assert_abs_diff_eq!(f.re, r.re, epsilon = 1e-12);
            assert_abs_diff_eq!(f.im, r.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn separable_2d() {
        // A rank-one input keeps rank one under the tensor DFT.
        let u: Vec<Complex64> = (0..4).map(|j| Complex64::new(1.0 + j as f64, 0.3)).collect();
        let v: Vec<Complex64> = (0..8).map(|j| Complex64::new(0.5, j as f64 * 0.2)).collect();
        let mut data: Vec<Complex64> = Vec::with_capacity(32);
        for a in &u {
            for b in &v {
                data.push(a * b);
            }
        }
        fft_nd(&mut data, &[4, 8], false);
        let mut fu = u.clone();
        fft_nd(&mut fu, &[4], false);
        let mut fv = v.clone();
        fft_nd(&mut fv, &[8], false);
        for (i, a) in fu.iter().enumerate() {
            for (j, b) in fv.iter().enumerate() {
                let want = a * b;
                let got = data[i * 8 + j];
                assert_abs_diff_eq!(got.re, want.re, epsilon = 1e-10);
                assert_abs_diff_eq!(got.im, want.im, epsilon = 1e-10);
            }
        }
    }
}

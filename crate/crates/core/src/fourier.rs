//! Minimal discrete Fourier transform over the angular direction.
//!
//! Radix-2 FFT when the angular point count is a power of two, a direct
//! O(m²) DFT otherwise. Only used internally to diagonalize the periodic
//! difference operator in θ.

use std::f64::consts::PI;

fn fft_radix2(re: &mut [f64], im: &mut [f64], inverse: bool) {
    let n = re.len();
    debug_assert!(n.is_power_of_two());
    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            re.swap(i, j);
            im.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * PI / len as f64;
        let (wr, wi) = (ang.cos(), ang.sin());
        let mut i = 0;
        while i < n {
            let mut cr = 1.0;
            let mut ci = 0.0;
            for k in 0..len / 2 {
                let (ur, ui) = (re[i + k], im[i + k]);
                let (vr, vi) = (
                    re[i + k + len / 2] * cr - im[i + k + len / 2] * ci,
                    re[i + k + len / 2] * ci + im[i + k + len / 2] * cr,
                );
                re[i + k] = ur + vr;
                im[i + k] = ui + vi;
                re[i + k + len / 2] = ur - vr;
                im[i + k + len / 2] = ui - vi;
                let ncr = cr * wr - ci * wi;
                ci = cr * wi + ci * wr;
                cr = ncr;
            }
            i += len;
        }
        len <<= 1;
    }
    if inverse {
        let s = 1.0 / n as f64;
        for v in re.iter_mut() {
            *v *= s;
        }
        for v in im.iter_mut() {
            *v *= s;
        }
    }
}

fn dft_naive(re: &mut [f64], im: &mut [f64], inverse: bool) {
    let n = re.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut out_re = vec![0.0; n];
    let mut out_im = vec![0.0; n];
    for (k, (orr, oii)) in out_re.iter_mut().zip(out_im.iter_mut()).enumerate() {
        let mut sr = 0.0;
        let mut si = 0.0;
        for j in 0..n {
            let ang = sign * 2.0 * PI * (k * j % n) as f64 / n as f64;
            let (c, s) = (ang.cos(), ang.sin());
            sr += re[j] * c - im[j] * s;
            si += re[j] * s + im[j] * c;
        }
        *orr = sr;
        *oii = si;
    }
    let s = if inverse { 1.0 / n as f64 } else { 1.0 };
    for i in 0..n {
        re[i] = out_re[i] * s;
        im[i] = out_im[i] * s;
    }
}

/// In-place DFT of one complex row.
pub(crate) fn dft(re: &mut [f64], im: &mut [f64], inverse: bool) {
    if re.len().is_power_of_two() {
        fft_radix2(re, im, inverse);
    } else {
        dft_naive(re, im, inverse);
    }
}

/// Eigenvalue of the periodic second-difference operator `-D_θ²` on mode
/// `k` out of `m`: `(2 - 2 cos(2πk/m)) / h_θ²`.
pub(crate) fn periodic_mode_eigenvalue(k: usize, m: usize, h_theta: f64) -> f64 {
    (2.0 - 2.0 * (2.0 * PI * k as f64 / m as f64).cos()) / (h_theta * h_theta)
}

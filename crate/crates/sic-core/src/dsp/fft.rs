//! Iterative radix-2 FFT.
//!
//! Analysis frames are a power of two by construction, so a plain
//! Cooley-Tukey butterfly is all the pipeline needs.

// Float supplies the f64 math methods in no_std builds; whenever std is
// elsewhere in the crate graph the inherent methods shadow it, so the
// import looks unused there.
#[allow(unused_imports)]
use num_traits::Float;


/// In-place complex FFT over parallel real/imaginary buffers.
///
/// Panics if the buffers differ in length or the length is not a power of
/// two (framing guarantees both).
pub fn fft_in_place(re: &mut [f64], im: &mut [f64]) {
    let n = re.len();
    assert_eq!(n, im.len(), "re/im length mismatch");
    assert!(n.is_power_of_two(), "FFT length must be a power of two");
    if n < 2 {
        return;
    }

    // Bit-reversal permutation.
    let shift = usize::BITS - n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> shift;
        if j > i {
            re.swap(i, j);
            im.swap(i, j);
        }
    }

    let mut len = 2;
    while len <= n {
        let angle = -2.0 * core::f64::consts::PI / len as f64;
        let (w_re, w_im) = (angle.cos(), angle.sin());
        for start in (0..n).step_by(len) {
            let mut cur_re = 1.0;
            let mut cur_im = 0.0;
            for k in 0..len / 2 {
                let even = start + k;
                let odd = start + k + len / 2;
                let t_re = re[odd] * cur_re - im[odd] * cur_im;
                let t_im = re[odd] * cur_im + im[odd] * cur_re;
                re[odd] = re[even] - t_re;
                im[odd] = im[even] - t_im;
                re[even] += t_re;
                im[even] += t_im;
                let next_re = cur_re * w_re - cur_im * w_im;
                cur_im = cur_re * w_im + cur_im * w_re;
                cur_re = next_re;
            }
        }
        len <<= 1;
    }
}

/// One-sided power spectrum `|X_k|^2` for `k = 0..=n/2` of a real signal.
pub fn power_spectrum(signal: &[f64]) -> alloc::vec::Vec<f64> {
    let n = signal.len();
    let mut re = alloc::vec::Vec::from(signal);
    let mut im = alloc::vec![0.0; n];
    fft_in_place(&mut re, &mut im);
    (0..=n / 2).map(|k| re[k] * re[k] + im[k] * im[k]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    /// Naive O(n^2) DFT as the oracle.
    fn dft(signal: &[f64]) -> Vec<(f64, f64)> {
        let n = signal.len();
        (0..n)
            .map(|k| {
                let mut acc = (0.0, 0.0);
                for (t, &x) in signal.iter().enumerate() {
                    let angle = -2.0 * core::f64::consts::PI * (k * t) as f64 / n as f64;
                    acc.0 += x * angle.cos();
                    acc.1 += x * angle.sin();
                }
                acc
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        let signal: Vec<f64> = (0..64)
            .map(|i| (i as f64 * 0.37).sin() + 0.25 * (i as f64 * 1.91).cos())
            .collect();
        let expected = dft(&signal);
        let mut re = signal.clone();
        let mut im = vec![0.0; signal.len()];
        fft_in_place(&mut re, &mut im);
        for (k, &(e_re, e_im)) in expected.iter().enumerate() {
            assert!((re[k] - e_re).abs() < 1e-9, "re mismatch at bin {k}");
            assert!((im[k] - e_im).abs() < 1e-9, "im mismatch at bin {k}");
        }
    }

    #[test]
    fn pure_tone_concentrates_in_one_bin() {
        let n = 256;
        let bin = 19;
        let signal: Vec<f64> = (0..n)
            .map(|i| (2.0 * core::f64::consts::PI * bin as f64 * i as f64 / n as f64).cos())
            .collect();
        let power = power_spectrum(&signal);
        let peak = (0..power.len())
            .max_by(|&a, &b| power[a].total_cmp(&power[b]))
            .unwrap();
        assert_eq!(peak, bin);
    }
}

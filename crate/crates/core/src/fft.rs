//! Iterative radix-2 FFT over `Complex64`, unnormalized in both directions.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    /// `X_n = Σ_j x_j e^{−2πi nj/N}`
    Forward,
    /// `x_j = Σ_n X_n e^{+2πi nj/N}` (no 1/N)
    Inverse,
}

pub(crate) fn fft_in_place(data: &mut [Complex64], direction: Direction) {
    let n = data.len();
    assert!(n.is_power_of_two(), "fft length must be a power of two");
    if n <= 1 {
        return;
    }

    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }

    let sign = match direction {
        Direction::Forward => -1.0,
        Direction::Inverse => 1.0,
    };
    // exact per-index twiddles; repeated multiplication drifts at N ~ 1e4
    let twiddles: Vec<Complex64> = (0..n / 2)
        .map(|j| {
            let theta = sign * 2.0 * PI * j as f64 / n as f64;
            Complex64::new(libm::cos(theta), libm::sin(theta))
        })
        .collect();

    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = twiddles[k * stride];
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn naive_dft(input: &[Complex64]) -> Vec<Complex64> {
        let n = input.len();
        (0..n)
            .map(|k| {
                input
                    .iter()
                    .enumerate()
                    .map(|(j, x)| {
                        let theta = -2.0 * PI * (k * j % n) as f64 / n as f64;
                        x * Complex64::new(libm::cos(theta), libm::sin(theta))
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft() {
        for n in [1usize, 2, 4, 8, 64, 256] {
            let input: Vec<Complex64> = (0..n)
                .map(|j| Complex64::new(libm::sin(0.37 * j as f64), libm::cos(1.1 * j as f64) - 0.2))
                .collect();
            let mut fast = input.clone();
            fft_in_place(&mut fast, Direction::Forward);
            let slow = naive_dft(&input);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).norm() < 1e-10 * n as f64, "n = {n}");
            }
        }
    }

    #[test]
    fn inverse_undoes_forward() {
        let n = 1024;
        let input: Vec<Complex64> = (0..n).map(|j| Complex64::new(j as f64 * 0.01, -1.0)).collect();
        let mut data = input.clone();
        fft_in_place(&mut data, Direction::Forward);
        fft_in_place(&mut data, Direction::Inverse);
        for (a, b) in data.iter().zip(&input) {
            assert!((a / n as f64 - b).norm() < 1e-12);
        }
    }

    #[test]
    fn delta_transforms_to_constant() {
        let mut data = vec![Complex64::new(0.0, 0.0); 16];
        data[0] = Complex64::new(1.0, 0.0);
        fft_in_place(&mut data, Direction::Forward);
        assert!(data.iter().all(|x| (x - Complex64::new(1.0, 0.0)).norm() < 1e-15));
    }
}

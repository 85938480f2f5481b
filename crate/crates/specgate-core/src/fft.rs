//! Complex FFT: iterative radix-2 with a Bluestein fallback for arbitrary
//! lengths. Plans precompute twiddles so repeated transforms (STFT frames)
//! pay no per-call trigonometry.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// Reusable transform plan for a fixed length.
#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    kind: Kind,
}

#[derive(Debug, Clone)]
enum Kind {
    Radix2 {
        // Forward twiddles e^{-2πik/n} for k in 0..n/2.
        twiddles: Vec<Complex64>,
        bit_rev: Vec<u32>,
    },
    Bluestein {
        inner: alloc::boxed::Box<Fft>,
        // chirp[k] = e^{-iπk²/n}
        chirp: Vec<Complex64>,
        // FFT of the zero-padded conjugate chirp, length m.
        kernel_fft: Vec<Complex64>,
    },
}

impl Fft {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "fft length must be positive");
        if n.is_power_of_two() {
            let twiddles = (0..n / 2)
                .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64))
                .collect();
            let bits = n.trailing_zeros();
            let bit_rev = (0..n as u32)
                .map(|i| i.reverse_bits() >> (32 - bits.max(1)))
                .collect::<Vec<_>>();
            let bit_rev = if n == 1 { vec![0] } else { bit_rev };
            Fft {
                n,
                kind: Kind::Radix2 { twiddles, bit_rev },
            }
        } else {
            let m = (2 * n - 1).next_power_of_two();
            let inner = Fft::new(m);
            let chirp: Vec<Complex64> = (0..n)
                .map(|k| {
                    // k² mod 2n keeps the phase argument small and exact.
                    let k2 = (k * k) % (2 * n);
                    Complex64::from_polar(1.0, -PI * k2 as f64 / n as f64)
                })
                .collect();
            let mut kernel = vec![Complex64::new(0.0, 0.0); m];
            for k in 0..n {
                let c = chirp[k].conj();
                kernel[k] = c;
                if k > 0 {
                    kernel[m - k] = c;
                }
            }
            inner.forward(&mut kernel);
            Fft {
                n,
                kind: Kind::Bluestein {
                    inner: alloc::boxed::Box::new(inner),
                    chirp,
                    kernel_fft: kernel,
                },
            }
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In-place forward DFT (no normalization).
    pub fn forward(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.n);
        match &self.kind {
            Kind::Radix2 { twiddles, bit_rev } => radix2(buf, twiddles, bit_rev),
            Kind::Bluestein {
                inner,
                chirp,
                kernel_fft,
            } => {
                let n = self.n;
                let m = inner.len();
                let mut a = vec![Complex64::new(0.0, 0.0); m];
                for k in 0..n {
                    a[k] = buf[k] * chirp[k];
                }
                inner.forward(&mut a);
                for (av, kv) in a.iter_mut().zip(kernel_fft.iter()) {
                    *av *= kv;
                }
                inner.inverse(&mut a);
                for k in 0..n {
                    buf[k] = a[k] * chirp[k];
                }
            }
        }
    }

    /// In-place inverse DFT, normalized by 1/n.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        assert_eq!(buf.len(), self.n);
        for v in buf.iter_mut() {
            *v = v.conj();
        }
        self.forward(buf);
        let scale = 1.0 / self.n as f64;
        for v in buf.iter_mut() {
            *v = v.conj() * scale;
        }
    }
}

fn radix2(buf: &mut [Complex64], twiddles: &[Complex64], bit_rev: &[u32]) {
    let n = buf.len();
    if n == 1 {
        return;
    }
    for i in 0..n {
        let j = bit_rev[i] as usize;
        if i < j {
            buf.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = n / len;
        let mut start = 0;
        while start < n {
            for k in 0..half {
                let w = twiddles[k * step];
                let a = buf[start + k];
                let b = buf[start + k + half] * w;
                buf[start + k] = a + b;
                buf[start + k + half] = a - b;
            }
            start += len;
        }
        len <<= 1;
    }
}

/// One-shot forward DFT.
pub fn fft(input: &[Complex64]) -> Vec<Complex64> {
    let mut buf = input.to_vec();
    Fft::new(input.len()).forward(&mut buf);
    buf
}

/// One-shot inverse DFT (normalized by 1/n).
pub fn ifft(input: &[Complex64]) -> Vec<Complex64> {
    let mut buf = input.to_vec();
    Fft::new(input.len()).inverse(&mut buf);
    buf
}

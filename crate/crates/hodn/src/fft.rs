//! Circulant matrix-vector products via cyclic convolution.
//!
//! A circulant matrix is determined by its first column `omega`; applying it
//! to `eta` is the cyclic convolution `out[i] = sum_n omega[(i - n) mod L] *
//! eta[n]`. Small lengths use the direct O(L^2) product, which also serves
//! as the correctness oracle for the FFT path.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Lengths below this use the direct product; FFT planning overhead and
/// rounding are not worth it for tiny systems.
pub const DIRECT_THRESHOLD: usize = 1024;

/// Plan for repeated convolutions against a fixed kernel `omega`.
pub struct CirculantPlan {
    len: usize,
    kind: PlanKind,
}

enum PlanKind {
    Direct {
        omega: Vec<f64>,
    },
    Fft {
        fwd: Arc<dyn Fft<f64>>,
        inv: Arc<dyn Fft<f64>>,
        omega_hat: Vec<Complex64>,
    },
}

impl CirculantPlan {
    pub fn new(omega: &[f64]) -> Self {
        Self::with_threshold(omega, DIRECT_THRESHOLD)
    }

    pub fn with_threshold(omega: &[f64], threshold: usize) -> Self {
        let len = omega.len();
        if len < threshold {
            return CirculantPlan {
                len,
                kind: PlanKind::Direct {
                    omega: omega.to_vec(),
                },
            };
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(len);
        let inv = planner.plan_fft_inverse(len);
        let mut omega_hat: Vec<Complex64> =
            omega.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        fwd.process(&mut omega_hat);
        CirculantPlan {
            len,
            kind: PlanKind::Fft {
                fwd,
                inv,
                omega_hat,
            },
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `out[i] = sum_n omega[(i - n) mod L] eta[n]`.
    pub fn apply(&self, eta: &[f64]) -> Vec<f64> {
        assert_eq!(eta.len(), self.len);
        match &self.kind {
            PlanKind::Direct { omega } => circulant_apply_direct(omega, eta),
            PlanKind::Fft {
                fwd,
                inv,
                omega_hat,
            } => {
                let mut buf: Vec<Complex64> =
                    eta.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                fwd.process(&mut buf);
                for (b, o) in buf.iter_mut().zip(omega_hat) {
                    *b *= o;
                }
                inv.process(&mut buf);
                // rustfft leaves the 1/L normalization to the caller
                let scale = 1.0 / self.len as f64;
                buf.into_iter().map(|c| c.re * scale).collect()
            }
        }
    }
}

/// Direct cyclic convolution; the reference implementation.
pub fn circulant_apply_direct(omega: &[f64], eta: &[f64]) -> Vec<f64> {
    let l = omega.len();
    assert_eq!(eta.len(), l);
    let mut out = vec![0.0; l];
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (n, &e) in eta.iter().enumerate() {
            acc += omega[(i + l - n) % l] * e;
        }
        *o = acc;
    }
    out
}

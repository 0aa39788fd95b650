//! Thin multidimensional FFT layer over `rustfft`, specialized to the cubic
//! periodic box (all axes share one plan since every side equals `L`).

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::grid::Torus;

pub struct BoxFft {
    dim: usize,
    side: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl BoxFft {
    pub fn new(torus: &Torus) -> Self {
        let mut planner = FftPlanner::new();
        BoxFft {
            dim: torus.dim(),
            side: torus.side(),
            forward: planner.plan_fft_forward(torus.side()),
            inverse: planner.plan_fft_inverse(torus.side()),
        }
    }

    fn transform_axis(&self, data: &mut [Complex64], axis: usize, fft: &Arc<dyn Fft<f64>>) {
        let l = self.side;
        let n = data.len();
        let stride = l.pow(axis as u32);
        let mut line = vec![Complex64::default(); l];
        // lines along `axis`: iterate over blocks of size stride*l, offset within block
        let block = stride * l;
        for base in (0..n).step_by(block) {
            for off in 0..stride {
                let start = base + off;
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + i * stride];
                }
                fft.process(&mut line);
                for (i, &v) in line.iter().enumerate() {
                    data[start + i * stride] = v;
                }
            }
        }
    }

    /// Unnormalized forward transform along every axis.
    pub fn forward(&self, data: &mut [Complex64]) {
        for axis in 0..self.dim {
            self.transform_axis(data, axis, &self.forward);
        }
    }

    /// Inverse transform including the 1/N normalization.
    pub fn inverse(&self, data: &mut [Complex64]) {
        for axis in 0..self.dim {
            self.transform_axis(data, axis, &self.inverse);
        }
        let scale = 1.0 / data.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let t = Torus::new(2, 8).unwrap();
        let fft = BoxFft::new(&t);
        let orig: Vec<Complex64> = (0..t.vertex_count())
            .map(|i| Complex64::new((i as f64 * 0.7).sin(), 0.0))
            .collect();
        let mut data = orig.clone();
        fft.forward(&mut data);
        fft.inverse(&mut data);
        for (a, b) in orig.iter().zip(&data) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn plane_wave_is_an_eigenvector() {
        let t = Torus::new(1, 8).unwrap();
        let fft = BoxFft::new(&t);
        // e^{2πi 3 x / 8} should land on frequency bin 3
        let mut data: Vec<Complex64> = (0..8)
            .map(|x| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 3.0 * x as f64 / 8.0))
            .collect();
        fft.forward(&mut data);
        for (k, v) in data.iter().enumerate() {
            if k == 3 {
                assert!((v.norm() - 8.0).abs() < 1e-10);
            } else {
                assert!(v.norm() < 1e-10);
            }
        }
    }
}

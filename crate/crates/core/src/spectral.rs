//! 2D FFTs and spectral derivatives on a [`GridSpec`].

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::{ComplexField, GridSpec, RealField};
use crate::par;

/// Planned forward/inverse 2D transforms for one grid shape.
///
/// Row transforms run in parallel over rows; columns are handled by
/// transposing through an owned buffer. The inverse is normalized by `1/N`.
pub struct Fft2 {
    grid: GridSpec,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
    transposed: Vec<Complex64>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("grid", &self.grid).finish()
    }
}

impl Fft2 {
    pub fn new(grid: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            grid,
            fwd_x: planner.plan_fft_forward(grid.nx()),
            inv_x: planner.plan_fft_inverse(grid.nx()),
            fwd_y: planner.plan_fft_forward(grid.ny()),
            inv_y: planner.plan_fft_inverse(grid.ny()),
            transposed: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn forward(&mut self, data: &mut [Complex64]) {
        let (x, y) = (self.fwd_x.clone(), self.fwd_y.clone());
        self.transform(data, &*x, &*y);
    }

    pub fn inverse(&mut self, data: &mut [Complex64]) {
        let (x, y) = (self.inv_x.clone(), self.inv_y.clone());
        self.transform(data, &*x, &*y);
        let scale = 1.0 / self.grid.len() as f64;
        par::for_each_indexed_mut(data, |_, z| *z *= scale);
    }

    fn transform(&mut self, data: &mut [Complex64], along_x: &dyn Fft<f64>, along_y: &dyn Fft<f64>) {
        let (nx, ny) = self.grid.shape();
        assert_eq!(data.len(), nx * ny, "field length does not match the planned grid");
        rows(data, nx, along_x);
        transpose(data, &mut self.transposed, nx, ny);
        rows(&mut self.transposed, ny, along_y);
        transpose(&self.transposed, data, ny, nx);
    }

    /// `∇²ψ` evaluated spectrally.
    pub fn laplacian(&mut self, field: &ComplexField) -> ComplexField {
        let k2 = self.grid.k_squared();
        let mut out = field.clone();
        self.forward(out.data_mut());
        par::for_each_indexed_mut(out.data_mut(), |i, z| *z *= -k2[i]);
        self.inverse(out.data_mut());
        out
    }

    /// Spectral gradient `(∂ₓf, ∂ᵧf)` of a real field.
    pub fn gradient(&mut self, field: &RealField) -> (RealField, RealField) {
        let kx = self.grid.wavenumbers_x();
        let ky = self.grid.wavenumbers_y();
        let (nx, ny) = self.grid.shape();
        let mut hat: Vec<Complex64> = field.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut hat);
        let mut dx = hat.clone();
        let mut dy = hat;
        // Nyquist modes have no well-defined odd derivative on a real field.
        par::for_each_indexed_mut(&mut dx, |i, z| {
            let ix = i % nx;
            let k = if ix == nx / 2 { 0.0 } else { kx[ix] };
            *z *= Complex64::new(0.0, k);
        });
        par::for_each_indexed_mut(&mut dy, |i, z| {
            let iy = i / nx;
            let k = if iy == ny / 2 { 0.0 } else { ky[iy] };
            *z *= Complex64::new(0.0, k);
        });
        self.inverse(&mut dx);
        self.inverse(&mut dy);
        let to_real = |v: Vec<Complex64>| {
            RealField::from_vec(self.grid, v.into_iter().map(|z| z.re).collect()).expect("grid length")
        };
        (to_real(dx), to_real(dy))
    }

    /// `∬|∇ψ|² dx dy` via Parseval, summed over a fixed pairwise tree.
    pub fn gradient_energy(&mut self, field: &ComplexField) -> f64 {
        let k2 = self.grid.k_squared();
        let mut hat = field.data().to_vec();
        self.forward(&mut hat);
        let n = self.grid.len() as f64;
        par::pairwise_sum(hat.len(), &|i| k2[i] * hat[i].norm_sqr()) * self.grid.cell_area() / n
    }
}

fn rows(data: &mut [Complex64], len: usize, fft: &dyn Fft<f64>) {
    let scratch_len = fft.get_inplace_scratch_len();
    // Batches of rows keep rayon task overhead small on narrow grids.
    let batch = len * 8;
    par::for_each_chunk_mut_with(
        data,
        batch,
        || vec![Complex64::default(); scratch_len],
        |scratch, _, chunk| fft.process_with_scratch(chunk, scratch),
    );
}

/// `dst[c*rows + r] = src[r*cols + c]` for a `rows × cols` source.
fn transpose(src: &[Complex64], dst: &mut [Complex64], cols: usize, rows: usize) {
    par::for_each_chunk_mut(dst, rows, |c, out| {
        for (r, o) in out.iter_mut().enumerate() {
            *o = src[r * cols + c];
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn forward_inverse_round_trip() {
        let g = GridSpec::new(32, 16, 3.0, 5.0).unwrap();
        let f = ComplexField::from_fn(g, |x, y| Complex64::new((x * 1.3).sin() + y, (x * y).cos()));
        let mut fft = Fft2::new(g);
        let mut data = f.data().to_vec();
        fft.forward(&mut data);
        fft.inverse(&mut data);
        let back = ComplexField::from_vec(g, data).unwrap();
        assert!(back.max_abs_diff(&f) < 1e-13);
    }

    #[test]
    fn plane_wave_lands_in_one_bin() {
        let g = GridSpec::new(32, 16, 2.0 * PI, 2.0 * PI).unwrap();
        let f = ComplexField::from_fn(g, |x, y| Complex64::from_polar(1.0, 3.0 * x - 2.0 * y));
        let mut fft = Fft2::new(g);
        let mut data = f.data().to_vec();
        fft.forward(&mut data);
        let peak = g.index(3, 16 - 2);
        for (i, z) in data.iter().enumerate() {
            if i == peak {
                assert!((z.re - g.len() as f64).abs() < 1e-9);
            } else {
                assert!(z.norm() < 1e-9);
            }
        }
    }

    #[test]
    fn laplacian_of_fourier_mode() {
        let g = GridSpec::square(32, 4.0 * PI).unwrap();
        let (kx, ky) = (1.5, 2.0);
        let f = ComplexField::from_fn(g, |x, y| Complex64::from_polar(1.0, kx * x + ky * y));
        let lap = Fft2::new(g).laplacian(&f);
        for (a, b) in lap.data().iter().zip(f.data()) {
            assert!((a + b * (kx * kx + ky * ky)).norm() < 1e-11);
        }
    }

    #[test]
    fn gradient_of_sine() {
        let g = GridSpec::square(32, 2.0 * PI).unwrap();
        let f = RealField::from_fn(g, |x, y| (2.0 * x).sin() * y.cos());
        let (dx, dy) = Fft2::new(g).gradient(&f);
        for iy in 0..32 {
            for ix in 0..32 {
                let (x, y) = (g.x(ix), g.y(iy));
                assert!((dx.at(ix, iy) - 2.0 * (2.0 * x).cos() * y.cos()).abs() < 1e-11);
                assert!((dy.at(ix, iy) + (2.0 * x).sin() * y.sin()).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn parseval_gradient_energy() {
        let l = 2.0 * PI;
        let g = GridSpec::square(16, l).unwrap();
        let f = ComplexField::from_fn(g, |x, _| Complex64::new(x.cos(), 0.0));
        // ∬ sin²x = l²/2
        let e = Fft2::new(g).gradient_energy(&f);
        assert!((e - l * l / 2.0).abs() < 1e-11);
    }
}

//! Periodic 2D grids and the fields that live on them.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par;

/// Uniform periodic grid, `nx × ny` points covering `[0, lx) × [0, ly)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
}

pub const MIN_POINTS: usize = 16;

impl GridSpec {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if n < MIN_POINTS || !n.is_power_of_two() {
                return Err(Error::Geometry(format!(
                    "{name} must be a power of two ≥ {MIN_POINTS}, got {n}"
                )));
            }
        }
        if !(lx > 0.0 && ly > 0.0 && lx.is_finite() && ly.is_finite()) {
            return Err(Error::Geometry(format!("extents must be positive, got {lx} × {ly}")));
        }
        Ok(GridSpec { nx, ny, lx, ly })
    }

    pub fn square(n: usize, l: f64) -> Result<Self> {
        Self::new(n, n, l, l)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn lx(&self) -> f64 {
        self.lx
    }
    pub fn ly(&self) -> f64 {
        self.ly
    }
    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }
    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }
    pub fn len(&self) -> usize {
        self.nx * self.ny
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }
    pub fn shape(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    #[inline]
    pub fn x(&self, ix: usize) -> f64 {
        ix as f64 * self.dx()
    }

    #[inline]
    pub fn y(&self, iy: usize) -> f64 {
        iy as f64 * self.dy()
    }

    /// Wavenumbers in FFT order: `0, 1, …, n/2−1, −n/2, …, −1` times `2π/l`.
    pub fn wavenumbers_x(&self) -> Vec<f64> {
        wavenumbers(self.nx, self.lx)
    }

    pub fn wavenumbers_y(&self) -> Vec<f64> {
        wavenumbers(self.ny, self.ly)
    }

    /// Largest representable wavenumber magnitude along either axis, `π/min(dx,dy)`.
    pub fn k_max(&self) -> f64 {
        PI / self.dx().min(self.dy())
    }

    /// Squared wavenumber `|k|²` for every grid mode, in FFT layout.
    pub fn k_squared(&self) -> Vec<f64> {
        let kx = self.wavenumbers_x();
        let ky = self.wavenumbers_y();
        let mut out = Vec::with_capacity(self.len());
        for &ky in &ky {
            for &kx in &kx {
                out.push(kx * kx + ky * ky);
            }
        }
        out
    }

    pub(crate) fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self.shape() != other.shape() || self.lx != other.lx || self.ly != other.ly {
            return Err(Error::Shape {
                expected: self.shape(),
                found: other.shape(),
            });
        }
        Ok(())
    }
}

fn wavenumbers(n: usize, l: f64) -> Vec<f64> {
    let dk = 2.0 * PI / l;
    (0..n)
        .map(|i| {
            let m = if i < n / 2 { i as f64 } else { i as f64 - n as f64 };
            m * dk
        })
        .collect()
}

/// Complex envelope sampled on a grid, row-major (`x` fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    grid: GridSpec,
    data: Vec<Complex64>,
}

impl ComplexField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self::uniform(grid, Complex64::new(0.0, 0.0))
    }

    pub fn uniform(grid: GridSpec, value: Complex64) -> Self {
        ComplexField {
            grid,
            data: vec![value; grid.len()],
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for iy in 0..grid.ny() {
            let y = grid.y(iy);
            for ix in 0..grid.nx() {
                data.push(f(grid.x(ix), y));
            }
        }
        ComplexField { grid, data }
    }

    pub fn from_vec(grid: GridSpec, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::Shape {
                expected: grid.shape(),
                found: (data.len(), 1),
            });
        }
        Ok(ComplexField { grid, data })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
    pub fn data(&self) -> &[Complex64] {
        &self.data
    }
    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }
    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> Complex64 {
        self.data[self.grid.index(ix, iy)]
    }

    /// `∬|ψ|² dx dy`, summed over a fixed pairwise tree.
    pub fn norm(&self) -> f64 {
        par::pairwise_sum(self.data.len(), &|i| self.data[i].norm_sqr()) * self.grid.cell_area()
    }

    pub fn max_abs_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Density `|ψ|²` as a real field.
    pub fn density(&self) -> RealField {
        RealField {
            grid: self.grid,
            data: self.data.iter().map(|z| z.norm_sqr()).collect(),
        }
    }

    /// Periodic shift by whole cells: `out(ix+sx, iy+sy) = self(ix, iy)`.
    pub fn shifted(&self, sx: isize, sy: isize) -> Self {
        let (nx, ny) = self.grid.shape();
        let mut out = self.clone();
        for iy in 0..ny {
            let ty = (iy as isize + sy).rem_euclid(ny as isize) as usize;
            for ix in 0..nx {
                let tx = (ix as isize + sx).rem_euclid(nx as isize) as usize;
                out.data[self.grid.index(tx, ty)] = self.data[self.grid.index(ix, iy)];
            }
        }
        out
    }

    /// Largest pointwise `|a−b|`.
    pub fn max_abs_diff(&self, other: &ComplexField) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Real scalar field on a grid (potentials, densities, masks).
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: GridSpec,
    data: Vec<f64>,
}

impl RealField {
    pub fn zeros(grid: GridSpec) -> Self {
        RealField {
            grid,
            data: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for iy in 0..grid.ny() {
            let y = grid.y(iy);
            for ix in 0..grid.nx() {
                data.push(f(grid.x(ix), y));
            }
        }
        RealField { grid, data }
    }

    pub fn from_vec(grid: GridSpec, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::Shape {
                expected: grid.shape(),
                found: (data.len(), 1),
            });
        }
        Ok(RealField { grid, data })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
    pub fn data(&self) -> &[f64] {
        &self.data
    }
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.data[self.grid.index(ix, iy)]
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        RealField {
            grid: self.grid,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(8, 16, 1.0, 1.0).is_err());
        assert!(GridSpec::new(24, 16, 1.0, 1.0).is_err());
        assert!(GridSpec::new(16, 16, 0.0, 1.0).is_err());
        let g = GridSpec::new(32, 16, 4.0, 2.0).unwrap();
        assert_eq!(g.dx(), 0.125);
        assert_eq!(g.dy(), 0.125);
        assert!((g.k_max() - PI / 0.125).abs() < 1e-12);
    }

    #[test]
    fn wavenumber_ordering() {
        let g = GridSpec::square(16, 2.0 * PI).unwrap();
        let k = g.wavenumbers_x();
        assert_eq!(k[0], 0.0);
        assert_eq!(k[1], 1.0);
        assert_eq!(k[7], 7.0);
        assert_eq!(k[8], -8.0);
        assert_eq!(k[15], -1.0);
    }

    #[test]
    fn shift_round_trips() {
        let g = GridSpec::square(16, 1.0).unwrap();
        let f = ComplexField::from_fn(g, |x, y| Complex64::new(x, y * y));
        let s = f.shifted(3, -5);
        assert_eq!(s.at(3, 11), f.at(0, 0));
        assert_eq!(s.shifted(-3, 5), f);
    }

    #[test]
    fn norm_of_uniform_field() {
        let g = GridSpec::new(32, 16, 3.0, 2.0).unwrap();
        let f = ComplexField::uniform(g, Complex64::new(0.0, 2.0));
        assert!((f.norm() - 4.0 * 6.0).abs() < 1e-12);
    }
}

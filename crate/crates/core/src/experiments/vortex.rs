use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::grid::ComplexField;

/// A phase singularity located at the centre of one grid plaquette.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vortex {
    pub x: f64,
    pub y: f64,
    /// Plaquette index of the lower-left corner.
    pub cell: (usize, usize),
    pub charge: i32,
}

/// Vortices found in one snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct VortexSet {
    pub time: f64,
    pub vortices: Vec<Vortex>,
    /// Net winding of the plaquettes left out by the mask.
    pub masked_charge: i32,
}

impl VortexSet {
    pub fn total_charge(&self) -> i32 {
        self.vortices.iter().map(|v| v.charge).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.vortices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.vortices.len()
    }
}

/// Principal-value phase increment from `a` to `b`.
#[inline]
fn dphase(a: num_complex::Complex64, b: num_complex::Complex64) -> f64 {
    (b * a.conj()).arg()
}

/// Winding of every plaquette, indexed like the field.
pub(crate) fn plaquette_charges(field: &ComplexField) -> Vec<i32> {
    let (nx, ny) = field.grid().shape();
    let mut out = vec![0; nx * ny];
    for iy in 0..ny {
        let jy = (iy + 1) % ny;
        for ix in 0..nx {
            let jx = (ix + 1) % nx;
            let (a, b, c, d) = (field.at(ix, iy), field.at(jx, iy), field.at(jx, jy), field.at(ix, jy));
            let w = dphase(a, b) + dphase(b, c) + dphase(c, d) + dphase(d, a);
            out[iy * nx + ix] = (w / (2.0 * PI)).round() as i32;
        }
    }
    out
}

/// Detects vortices everywhere the phase is defined.
///
/// Plaquettes touching a node with `|ψ|` below `10⁻⁶` of the RMS amplitude
/// are treated as masked.
pub fn detect_vortices(field: &ComplexField, time: f64) -> VortexSet {
    let rms_sqr = field.data().iter().map(|z| z.norm_sqr()).sum::<f64>() / field.grid().len() as f64;
    let floor = 1e-12 * rms_sqr;
    let exclude: Vec<bool> = field.data().iter().map(|z| z.norm_sqr() < floor).collect();
    detect_vortices_masked(field, time, &exclude)
}

/// Detects vortices, skipping plaquettes that touch an excluded node.
pub fn detect_vortices_masked(field: &ComplexField, time: f64, exclude: &[bool]) -> VortexSet {
    let grid = field.grid();
    let (nx, ny) = grid.shape();
    assert_eq!(exclude.len(), nx * ny, "mask length must match the grid");
    let charges = plaquette_charges(field);
    let mut vortices = Vec::new();
    let mut masked_charge = 0;
    for iy in 0..ny {
        let jy = (iy + 1) % ny;
        for ix in 0..nx {
            let q = charges[iy * nx + ix];
            if q == 0 {
                continue;
            }
            let jx = (ix + 1) % nx;
            let masked = [(ix, iy), (jx, iy), (jx, jy), (ix, jy)]
                .iter()
                .any(|&(i, j)| exclude[j * nx + i]);
            if masked {
                masked_charge += q;
            } else {
                vortices.push(Vortex {
                    x: grid.x(ix) + 0.5 * grid.dx(),
                    y: grid.y(iy) + 0.5 * grid.dy(),
                    cell: (ix, iy),
                    charge: q,
                });
            }
        }
    }
    VortexSet {
        time,
        vortices,
        masked_charge,
    }
}

/// Phase winding, in units of `2π`, around the boundary of the rectangle of
/// plaquettes starting at `origin` and spanning `size` cells, traversed
/// counterclockwise. Indices wrap periodically.
pub fn boundary_winding(field: &ComplexField, origin: (usize, usize), size: (usize, usize)) -> i32 {
    let (nx, ny) = field.grid().shape();
    let at = |i: usize, j: usize| field.at((origin.0 + i) % nx, (origin.1 + j) % ny);
    let (w, h) = size;
    let mut total = 0.0;
    for i in 0..w {
        total += dphase(at(i, 0), at(i + 1, 0));
    }
    for j in 0..h {
        total += dphase(at(w, j), at(w, j + 1));
    }
    for i in (0..w).rev() {
        total += dphase(at(i + 1, h), at(i, h));
    }
    for j in (0..h).rev() {
        total += dphase(at(0, j + 1), at(0, j));
    }
    (total / (2.0 * PI)).round() as i32
}

/// Distance from a vortex centre to where the azimuthally averaged `|ψ|`
/// first recovers to `ambient/√2`.
pub fn core_radius(field: &ComplexField, vortex: &Vortex, ambient: f64) -> Result<f64> {
    let grid = field.grid();
    let target = ambient / SQRT_2;
    let dr = 0.25 * grid.dx().min(grid.dy());
    let r_max = 0.25 * grid.lx().min(grid.ly());
    const ANGLES: usize = 32;
    let mean_abs = |r: f64| {
        (0..ANGLES)
            .map(|a| {
                let phi = 2.0 * PI * a as f64 / ANGLES as f64;
                interpolate_abs(field, vortex.x + r * phi.cos(), vortex.y + r * phi.sin())
            })
            .sum::<f64>()
            / ANGLES as f64
    };
    let mut prev = (0.0, mean_abs(0.0));
    let mut r = dr;
    while r <= r_max {
        let cur = (r, mean_abs(r));
        if cur.1 >= target {
            let u = (target - prev.1) / (cur.1 - prev.1);
            return Ok(prev.0 + u * (cur.0 - prev.0));
        }
        prev = cur;
        r += dr;
    }
    Err(Error::MeasurementQuality(format!(
        "|ψ| never recovers to {target:.4} within {r_max:.3} of the vortex at ({:.3}, {:.3})",
        vortex.x, vortex.y
    )))
}

/// Bilinear interpolation of `|ψ|` at a periodic position.
fn interpolate_abs(field: &ComplexField, x: f64, y: f64) -> f64 {
    let grid = field.grid();
    let (nx, ny) = grid.shape();
    let fx = (x / grid.dx()).rem_euclid(nx as f64);
    let fy = (y / grid.dy()).rem_euclid(ny as f64);
    let (ix, iy) = (fx.floor() as usize % nx, fy.floor() as usize % ny);
    let (u, v) = (fx - fx.floor(), fy - fy.floor());
    let (jx, jy) = ((ix + 1) % nx, (iy + 1) % ny);
    let a = field.at(ix, iy).norm();
    let b = field.at(jx, iy).norm();
    let c = field.at(ix, jy).norm();
    let d = field.at(jx, jy).norm();
    (1.0 - v) * ((1.0 - u) * a + u * b) + v * ((1.0 - u) * c + u * d)
}

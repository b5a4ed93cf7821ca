use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec};
use crate::meanfield::{linearized_rhs, scaled_dispersion, KerrSign, ScaledParams};

/// Largest grid the dense oracle accepts, in points.
pub const MAX_ORACLE_POINTS: usize = 32 * 32;

/// Spectrum of the dense linearized operator next to the closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct BdgSpectrum {
    /// Eigenfrequencies `±Ω`, ascending, each mode appearing with both signs.
    pub frequencies: Vec<f64>,
    /// Closed-form `±Ω(K)` over the grid wavenumbers, ascending.
    pub theory: Vec<f64>,
    /// Largest relative mismatch over the nonzero modes.
    pub max_rel_err: f64,
}

/// Assembles the real-linear fluctuation operator around the uniform state
/// `ψ₀` as a dense matrix and returns its spectrum.
///
/// The operator acts on `a = p + iq`. Its columns are built by applying the
/// linearized right-hand side to unit vectors in `p` and in `q`. The matrix
/// is block off-diagonal, so its eigenvalues are `±i√μ` with `μ` the
/// eigenvalues of the symmetric block product `−M_pq M_qp`. That product is
/// diagonalized with a symmetric eigensolver.
pub fn dense_bdg_oracle(grid: &GridSpec, amplitude: f64, sign: KerrSign) -> Result<BdgSpectrum> {
    let n = grid.len();
    if n > MAX_ORACLE_POINTS {
        return Err(Error::domain(format!(
            "dense oracle is limited to {MAX_ORACLE_POINTS} points, grid has {n}"
        )));
    }
    if sign == KerrSign::Focusing && amplitude != 0.0 {
        return Err(Error::ModulationalInstability(
            "the focusing background has imaginary long-wavelength frequencies".into(),
        ));
    }
    let params = ScaledParams::dimensionless(0.0, 0.0, 0.0, sign);
    let mut m_pp = DMatrix::<f64>::zeros(n, n);
    let mut m_qp = DMatrix::<f64>::zeros(n, n);
    let mut m_pq = DMatrix::<f64>::zeros(n, n);
    let mut m_qq = DMatrix::<f64>::zeros(n, n);
    let mut unit = ComplexField::zeros(*grid);
    for j in 0..n {
        unit.data_mut()[j] = Complex64::new(1.0, 0.0);
        let col = linearized_rhs(&unit, amplitude, &params)?;
        for (i, z) in col.data().iter().enumerate() {
            m_pp[(i, j)] = z.re;
            m_qp[(i, j)] = z.im;
        }
        unit.data_mut()[j] = Complex64::new(0.0, 1.0);
        let col = linearized_rhs(&unit, amplitude, &params)?;
        for (i, z) in col.data().iter().enumerate() {
            m_pq[(i, j)] = z.re;
            m_qq[(i, j)] = z.im;
        }
        unit.data_mut()[j] = Complex64::new(0.0, 0.0);
    }
    let scale = m_pq.amax().max(m_qp.amax());
    let diagonal = m_pp.amax().max(m_qq.amax());
    if diagonal > 1e-12 * scale {
        return Err(Error::Eigensolver(format!(
            "operator has diagonal blocks of size {diagonal:e}; expected a block off-diagonal form"
        )));
    }
    let product = -(&m_pq * &m_qp);
    let sym = (&product + product.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, 1e-15, 10_000)
        .ok_or_else(|| Error::Eigensolver(format!("symmetric eigensolve of a {n}×{n} block did not converge")))?;

    let mut squared: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    squared.sort_by(f64::total_cmp);
    let mut closed: Vec<f64> = grid.k_squared().iter().map(|&k2| scaled_dispersion(k2.sqrt(), amplitude)).collect();
    closed.sort_by(f64::total_cmp);

    let mut max_rel_err: f64 = 0.0;
    for (&mu, &w) in squared.iter().zip(&closed) {
        if w == 0.0 {
            continue;
        }
        let measured = mu.max(0.0).sqrt();
        max_rel_err = max_rel_err.max((measured - w).abs() / w);
    }
    let both = |v: Vec<f64>| {
        let mut out: Vec<f64> = v.iter().flat_map(|&w| [-w, w]).collect();
        out.sort_by(f64::total_cmp);
        out
    };
    Ok(BdgSpectrum {
        frequencies: both(squared.iter().map(|&mu| mu.max(0.0).sqrt()).collect()),
        theory: both(closed),
        max_rel_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteen_square_matches_closed_form() {
        let grid = GridSpec::square(16, 16.0).unwrap();
        let s = dense_bdg_oracle(&grid, 1.0, KerrSign::Defocusing).unwrap();
        assert!(s.max_rel_err < 1e-8, "{}", s.max_rel_err);
        assert_eq!(s.frequencies.len(), 2 * grid.len());
        // first mode K' = 2π/16
        let k = 2.0 * std::f64::consts::PI / 16.0;
        let target = (k.powi(4) + 2.0 * k * k).sqrt();
        let nearest = s
            .frequencies
            .iter()
            .map(|w| (w - target).abs())
            .fold(f64::INFINITY, f64::min);
        assert!(nearest / target < 1e-8);
    }

    #[test]
    fn spectrum_is_symmetric_under_sign_flip() {
        let grid = GridSpec::square(16, 20.0).unwrap();
        let s = dense_bdg_oracle(&grid, 0.7, KerrSign::Defocusing).unwrap();
        let n = s.frequencies.len();
        for i in 0..n {
            assert_eq!(s.frequencies[i], -s.frequencies[n - 1 - i]);
        }
    }

    #[test]
    fn empty_background_gives_free_particle_spectrum() {
        let grid = GridSpec::square(16, 12.0).unwrap();
        let s = dense_bdg_oracle(&grid, 0.0, KerrSign::Defocusing).unwrap();
        assert!(s.max_rel_err < 1e-10);
        let mut k2: Vec<f64> = grid.k_squared();
        k2.sort_by(f64::total_cmp);
        assert!((s.frequencies.last().unwrap() - k2.last().unwrap()).abs() < 1e-10 * k2.last().unwrap());
    }

    #[test]
    fn rejects_large_grids_and_focusing_backgrounds() {
        let big = GridSpec::square(64, 64.0).unwrap();
        assert!(dense_bdg_oracle(&big, 1.0, KerrSign::Defocusing).is_err());
        let small = GridSpec::square(16, 16.0).unwrap();
        assert!(matches!(
            dense_bdg_oracle(&small, 1.0, KerrSign::Focusing),
            Err(Error::ModulationalInstability(_))
        ));
    }
}

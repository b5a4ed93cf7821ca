use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Least-squares fit of `c0 + c1 cos Ωt + c2 sin Ωt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidFit {
    pub omega: f64,
    pub offset: f64,
    pub amplitude: f64,
    /// Residual power over the power of the fitted oscillation.
    pub residual: f64,
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Fits a single-frequency sinusoid to `(times, values)`.
///
/// The frequency is found by variable projection: for each trial `Ω` the
/// three linear coefficients are solved exactly and the residual is
/// minimized over `Ω` alone. The starting bracket comes from zero crossings,
/// so no model frequency enters the estimate.
pub fn fit_sinusoid(times: &[f64], values: &[f64]) -> Result<SinusoidFit> {
    if times.len() != values.len() || times.len() < 8 {
        return Err(Error::MeasurementQuality(format!(
            "need at least 8 paired samples, got {} times and {} values",
            times.len(),
            values.len()
        )));
    }
    let guess = crossing_frequency(times, values)?;
    // coarse scan inside the main lobe, then golden-section refinement
    let (lo, hi) = (0.8 * guess, 1.2 * guess);
    let n = 40;
    let h = (hi - lo) / n as f64;
    let best = (0..=n)
        .map(|i| lo + i as f64 * h)
        .map(|w| (w, project(times, values, w).1))
        .fold((guess, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let (mut a, mut b) = (best.0 - h, best.0 + h);
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (project(times, values, c).1, project(times, values, d).1);
    while (b - a) > 1e-13 * best.0 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = project(times, values, c).1;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = project(times, values, d).1;
        }
    }
    let omega = 0.5 * (a + b);
    let (coef, residual) = project(times, values, omega);
    let signal: f64 = times
        .iter()
        .map(|&t| {
            let s = coef[1] * (omega * t).cos() + coef[2] * (omega * t).sin();
            s * s
        })
        .sum();
    Ok(SinusoidFit {
        omega,
        offset: coef[0],
        amplitude: coef[1].hypot(coef[2]),
        residual: residual / signal,
    })
}

/// Linear coefficients and residual sum of squares at fixed `omega`.
fn project(times: &[f64], values: &[f64], omega: f64) -> (Vector3<f64>, f64) {
    let mut ata = Matrix3::zeros();
    let mut atb = Vector3::zeros();
    for (&t, &y) in times.iter().zip(values) {
        let row = Vector3::new(1.0, (omega * t).cos(), (omega * t).sin());
        ata += row * row.transpose();
        atb += row * y;
    }
    let coef = ata.lu().solve(&atb).unwrap_or_else(Vector3::zeros);
    let rss = times
        .iter()
        .zip(values)
        .map(|(&t, &y)| {
            let r = y - coef[0] - coef[1] * (omega * t).cos() - coef[2] * (omega * t).sin();
            r * r
        })
        .sum();
    (coef, rss)
}

/// Frequency from the spacing of upward crossings, with hysteresis at half
/// the RMS so that small noise does not add spurious crossings.
fn crossing_frequency(times: &[f64], values: &[f64]) -> Result<f64> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let rms = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let h = 0.5 * rms;
    let mut armed = false;
    let mut ups = Vec::new();
    for i in 1..values.len() {
        let (a, b) = (values[i - 1] - mean, values[i] - mean);
        if b < -h {
            armed = true;
        } else if armed && a <= h && b > h {
            let frac = (h - a) / (b - a);
            ups.push(times[i - 1] + frac * (times[i] - times[i - 1]));
            armed = false;
        }
    }
    if ups.len() < 2 {
        return Err(Error::MeasurementQuality(format!(
            "only {} full oscillations in the window; lengthen the run",
            ups.len()
        )));
    }
    let span = ups[ups.len() - 1] - ups[0];
    Ok(2.0 * std::f64::consts::PI * (ups.len() - 1) as f64 / span)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(omega: f64, phase: f64, n: usize, t_end: f64) -> (Vec<f64>, Vec<f64>) {
        let t: Vec<f64> = (0..n).map(|i| i as f64 * t_end / (n - 1) as f64).collect();
        let y = t.iter().map(|&t| 0.3 + 2.0 * (omega * t + phase).cos()).collect();
        (t, y)
    }

    #[test]
    fn recovers_frequency_of_a_clean_sinusoid() {
        let (t, y) = series(1.234, 0.7, 2000, 40.0);
        let fit = fit_sinusoid(&t, &y).unwrap();
        assert!((fit.omega - 1.234).abs() < 1e-9);
        assert!((fit.offset - 0.3).abs() < 1e-9);
        assert!((fit.amplitude - 2.0).abs() < 1e-9);
        assert!(fit.residual < 1e-18);
    }

    #[test]
    fn noise_shows_up_as_residual() {
        let (t, mut y) = series(0.5, 0.0, 1000, 100.0);
        for (i, v) in y.iter_mut().enumerate() {
            *v += if i % 2 == 0 { 0.2 } else { -0.2 };
        }
        let fit = fit_sinusoid(&t, &y).unwrap();
        assert!((fit.omega - 0.5).abs() < 1e-3);
        assert!(fit.residual > 1e-3);
    }

    #[test]
    fn too_short_a_window_is_a_measurement_error() {
        let (t, y) = series(0.1, 0.3, 100, 10.0);
        assert!(matches!(fit_sinusoid(&t, &y), Err(Error::MeasurementQuality(_))));
    }
}

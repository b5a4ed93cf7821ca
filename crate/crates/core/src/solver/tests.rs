use super::*;
use crate::meanfield::KerrSign;

fn square(n: usize, l: f64) -> GridSpec {
    GridSpec::square(n, l).unwrap()
}

fn bumpy(grid: GridSpec) -> ComplexField {
    let (lx, ly) = (grid.lx(), grid.ly());
    ComplexField::from_fn(grid, |x, y| {
        let a = 2.0 * PI * x / lx;
        let b = 2.0 * PI * y / ly;
        Complex64::new(1.0 + 0.2 * a.cos() * (2.0 * b).sin(), 0.1 * (a + b).sin())
    })
}

#[test]
fn plane_wave_rotates_at_the_kerr_rate() {
    let grid = square(32, 20.0);
    let psi0 = 0.8;
    let dt = 1e-2;
    let n = 500;
    let cfg = RunConfig::new(ComplexField::uniform(grid, Complex64::new(psi0, 0.0)), ScaledParams::conservative(), dt, n);
    let traj = run(&cfg).unwrap();
    let tau = dt * n as f64;
    let exact = Complex64::from_polar(psi0, -psi0 * psi0 * tau);
    let err = traj
        .final_field()
        .data()
        .iter()
        .map(|z| (z - exact).norm())
        .fold(0.0, f64::max);
    assert!(err < 1e-10 * tau, "error {err}");
}

#[test]
fn drive_and_loss_relax_to_the_pump() {
    let grid = square(16, 20.0);
    let (gamma, pump) = (0.5, 1e-6);
    let params = ScaledParams::dimensionless(0.0, gamma, pump, KerrSign::Defocusing);
    let dt = 0.01;
    let cfg = RunConfig::new(ComplexField::zeros(grid), params, dt, 400).with_snapshot_every(100);
    let traj = run(&cfg).unwrap();
    for snap in &traj.snapshots {
        let expected = pump * (1.0 - (-gamma * snap.time).exp());
        for z in snap.field.data() {
            assert!((z.re - expected).abs() < 1e-9 * pump);
            assert!(z.im.abs() < 1e-9 * pump);
        }
    }
}

#[test]
fn resonant_driven_state_is_a_fixed_point() {
    // ρ = δ puts the upper branch within γ²/2δ of the bistability fold
    let grid = square(32, 64.0);
    let params = ScaledParams::dimensionless(1.0, 0.05, 1.0, KerrSign::Defocusing);
    let cfg = RunConfig::new(ComplexField::uniform(grid, Complex64::new(1.0, 0.0)), params, 0.08, 5000);
    let traj = run(&cfg).unwrap();
    let err = traj.final_field().data().iter().map(|z| (z - 1.0).norm()).fold(0.0, f64::max);
    assert!(err < 1e-12, "uniform state drifted by {err:e}");
}

#[test]
fn modulated_drive_follows_the_exact_forced_response() {
    let grid = square(16, 20.0);
    let (gamma, omega, g) = (0.3, 1.7, 1e-6);
    let params = ScaledParams::dimensionless(0.0, gamma, 0.0, KerrSign::Defocusing);
    let drive = Drive {
        base: None,
        modulation: Some(Modulation {
            profile: ComplexField::uniform(grid, Complex64::new(g, 0.0)),
            frequency: omega,
        }),
    };
    let dt = 0.01;
    let n = 300;
    let cfg = RunConfig::new(ComplexField::zeros(grid), params, dt, n).with_drive(drive);
    let traj = run(&cfg).unwrap();
    let t = dt * n as f64;
    // ψ(t) = gγ ∫₀ᵗ e^{−γ(t−s)} cos Ωs ds
    let z = Complex64::new(gamma, omega);
    let exact = g * gamma * ((Complex64::from_polar(1.0, omega * t) - (-gamma * t).exp()) / z).re;
    let got = traj.final_field().at(3, 5);
    assert!((got.re - exact).abs() < 1e-9 * g, "{} vs {exact}", got.re);
}

#[test]
fn gaussian_spreads_by_free_diffraction() {
    let l = 80.0;
    let grid = square(128, l);
    let w0: f64 = 2.0;
    let amp = 1e-4;
    let initial = ComplexField::from_fn(grid, |x, y| {
        let r2 = (x - l / 2.0).powi(2) + (y - l / 2.0).powi(2);
        Complex64::new(amp * (-r2 / (2.0 * w0 * w0)).exp(), 0.0)
    });
    let dt = 5e-3;
    let n = 600;
    let traj = run(&RunConfig::new(initial, ScaledParams::conservative(), dt, n)).unwrap();
    let f = traj.final_field();
    let (mut m0, mut m2) = (0.0, 0.0);
    for iy in 0..grid.ny() {
        for ix in 0..grid.nx() {
            let rho = f.at(ix, iy).norm_sqr();
            let dx = grid.x(ix) - l / 2.0;
            m0 += rho;
            m2 += rho * dx * dx;
        }
    }
    let t = dt * n as f64;
    // ⟨x²⟩ = w²/2 with w² = w0²(1 + (2t/w0²)²)
    let expected = 0.5 * w0 * w0 * (1.0 + (2.0 * t / (w0 * w0)).powi(2));
    assert!((m2 / m0 - expected).abs() / expected < 1e-6, "{} vs {expected}", m2 / m0);
}

#[test]
fn norm_is_conserved_without_loss() {
    let grid = square(32, 80.0);
    let cfg = RunConfig::new(bumpy(grid), ScaledParams::conservative(), 0.01, 2000).with_snapshot_every(500);
    let diag = run_with(&cfg, |_, _, _| Control::Continue).unwrap();
    let n0 = diag[0].norm;
    for d in &diag {
        assert!((d.norm - n0).abs() / n0 < 1e-12);
        assert!(d.energy.is_some());
    }
}

#[test]
fn energy_drift_is_second_order() {
    let grid = square(32, 40.0);
    let drift = |dt: f64, n: usize| {
        let cfg = RunConfig::new(bumpy(grid), ScaledParams::conservative(), dt, n).with_snapshot_every(10);
        let diag = run_with(&cfg, |_, _, _| Control::Continue).unwrap();
        let e0 = diag[0].energy.unwrap();
        diag.iter().map(|d| (d.energy.unwrap() - e0).abs()).fold(0.0, f64::max) / e0.abs()
    };
    let coarse = drift(0.02, 200);
    let fine = drift(0.01, 400);
    let ratio = coarse / fine;
    assert!((3.2..4.8).contains(&ratio), "drift ratio {ratio} ({coarse:e} / {fine:e})");
}

#[test]
fn translation_equivariance() {
    let grid = square(32, 40.0);
    let initial = ComplexField::from_fn(grid, |x, y| {
        Complex64::new(1.0 + 0.3 * (-((x - 12.0).powi(2) + (y - 20.0).powi(2)) / 8.0).exp(), 0.0)
    });
    let run_from = |f: ComplexField| {
        run(&RunConfig::new(f, ScaledParams::conservative(), 0.01, 200).with_snapshot_every(50)).unwrap()
    };
    let base = run_from(initial.clone());
    let moved = run_from(initial.shifted(5, -3));
    for (a, b) in base.snapshots.iter().zip(&moved.snapshots) {
        assert!(a.field.shifted(5, -3).max_abs_diff(&b.field) < 1e-12);
    }
}

#[test]
fn runs_are_bit_identical() {
    let grid = square(32, 40.0);
    let params = ScaledParams::dimensionless(0.2, 0.05, 1.0, KerrSign::Defocusing);
    let cfg = RunConfig::new(bumpy(grid), params, 0.01, 100)
        .with_potential(Potential::Obstacle(ObstacleSpec::fixed((20.0, 20.0), 3.0, 2.0).with_ramp(0.5)));
    let a = run(&cfg).unwrap();
    let b = run(&cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn galilean_boost_of_a_static_obstacle_run() {
    let l = 16.0;
    let grid = square(128, l);
    let k = 2.0 * PI * 2.0 / l;
    let v = 2.0 * k;
    let shift_cells = 8;
    let t_final = shift_cells as f64 * grid.dx() / v;
    let n = 4000;
    let dt = t_final / n as f64;
    let obstacle = ObstacleSpec::fixed((l / 2.0, l / 2.0), 2.0, 0.5);
    let rest = ComplexField::uniform(grid, Complex64::new(1.0, 0.0));
    let static_run = run(&RunConfig::new(rest.clone(), ScaledParams::conservative(), dt, n)
        .with_potential(Potential::Obstacle(obstacle)))
    .unwrap();
    let boosted_initial = ComplexField::from_fn(grid, |x, _| Complex64::from_polar(1.0, k * x));
    let boosted = run(&RunConfig::new(boosted_initial, ScaledParams::conservative(), dt, n)
        .with_potential(Potential::Obstacle(obstacle.with_velocity((v, 0.0)))))
    .unwrap();
    let expected = static_run.final_field().shifted(shift_cells, 0);
    let phase = |x: f64| Complex64::from_polar(1.0, k * x - k * k * t_final);
    let got = boosted.final_field();
    let mut err: f64 = 0.0;
    for iy in 0..grid.ny() {
        for ix in 0..grid.nx() {
            let e = expected.at(ix, iy) * phase(grid.x(ix));
            err = err.max((got.at(ix, iy) - e).norm());
        }
    }
    assert!(err < 1e-6, "boost mismatch {err:e}");
}

#[test]
fn dealiased_run_stays_band_limited() {
    let grid = square(32, 40.0);
    let mut cfg = RunConfig::new(bumpy(grid), ScaledParams::conservative(), 0.01, 50);
    cfg.dealias = true;
    let traj = run(&cfg).unwrap();
    let mut hat = traj.final_field().data().to_vec();
    Fft2::new(grid).forward(&mut hat);
    let kx = grid.wavenumbers_x();
    let cut = 2.0 / 3.0 * PI / grid.dx();
    for (i, z) in hat.iter().enumerate() {
        if kx[i % 32].abs() >= cut {
            assert!(z.norm() < 1e-9);
        }
    }
}

#[test]
fn step_size_contract_is_enforced() {
    let grid = square(32, 20.0);
    let f = ComplexField::uniform(grid, Complex64::new(1.0, 0.0));
    // K²max·dt = 2(π/0.625)²·0.05 ≈ 2.5
    let err = run(&RunConfig::new(f.clone(), ScaledParams::conservative(), 0.05, 1)).unwrap_err();
    assert!(matches!(err, Error::StepSize(_)));
    let loud = ComplexField::uniform(grid, Complex64::new(5.0, 0.0));
    let err = run(&RunConfig::new(loud, ScaledParams::conservative(), 0.005, 1)).unwrap_err();
    assert!(matches!(err, Error::StepSize(_)));
    let mut nan = f;
    nan.data_mut()[7] = Complex64::new(f64::NAN, 0.0);
    let err = run(&RunConfig::new(nan, ScaledParams::conservative(), 0.001, 1)).unwrap_err();
    assert!(matches!(err, Error::Blowup { step: 0, .. }));
}

#[test]
fn focusing_collapse_is_reported_not_propagated() {
    let grid = square(32, 20.0);
    let params = ScaledParams::dimensionless(0.0, 0.0, 0.0, KerrSign::Focusing);
    let peak = ComplexField::from_fn(grid, |x, y| {
        Complex64::new(2.8 * (-((x - 10.0).powi(2) + (y - 10.0).powi(2)) / 2.0).exp(), 0.0)
    });
    let err = run(&RunConfig::new(peak, params, 0.01, 5000)).unwrap_err();
    assert!(matches!(err, Error::StepSize(_) | Error::Blowup { .. }), "{err}");
}

#[test]
fn flowing_background_properties() {
    let grid = GridSpec::new(64, 32, 8.0 * PI * 2f64.sqrt(), 20.0).unwrap();
    let still = flowing_background(&grid, 0.0, 1.0).unwrap();
    assert!(still.data().iter().all(|z| *z == Complex64::new(1.0, 0.0)));
    // quantum is 2·(2π/lx)/√2 = 1/4 here
    let q = speed_ratio_quantum(&grid, 1.0);
    assert!((q - 0.25).abs() < 1e-12);
    let err = flowing_background(&grid, 0.3, 1.0).unwrap_err();
    match err {
        Error::Commensurability { nearest_speed_ratio, .. } => assert!((nearest_speed_ratio - 0.25).abs() < 1e-12),
        other => panic!("unexpected {other}"),
    }
    let f = flowing_background(&grid, 0.75, 1.0).unwrap();
    // phase gradient velocity 2·∂φ/∂x, from the principal-value phase difference
    let mut winding = 0.0;
    for ix in 0..grid.nx() {
        let a = f.at(ix, 3);
        let b = f.at((ix + 1) % grid.nx(), 3);
        winding += (b * a.conj()).arg();
    }
    assert!((winding - 2.0 * PI * 3.0).abs() < 1e-10);
    let v = 2.0 * (f.at(1, 0) * f.at(0, 0).conj()).arg() / grid.dx();
    assert!((v / 2f64.sqrt() - 0.75).abs() < q, "measured ratio {}", v / 2f64.sqrt());
    assert!((v / 2f64.sqrt() - 0.75).abs() < 1e-12);
}

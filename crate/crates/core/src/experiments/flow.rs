use super::dispersion::stable_dt;
use super::vortex::{detect_vortices_masked, VortexSet};
use super::check_domain;
use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec};
use crate::meanfield::{KerrSign, ScaledParams};
use crate::par;
use crate::solver::{flow_wavenumber, flowing_background, run_with, speed_ratio_quantum, Control, ObstacleSpec, Potential, RunConfig};
use crate::spectral::Fft2;

/// Default observation window after the ramp, in scaled time units.
pub const DEFAULT_WINDOW: f64 = 200.0;

/// Obstacle ramp duration in healing times.
const RAMP_HEALING_TIMES: f64 = 10.0;

/// Geometry and timing of a flow-past-obstacle run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSetup {
    pub grid: GridSpec,
    /// Background amplitude `ψ₀`.
    pub amplitude: f64,
    /// Stationary obstacle; its ramp time is set from the healing time.
    pub obstacle: ObstacleSpec,
    /// Observation window after the ramp.
    pub window: f64,
    /// Interval between vortex checks.
    pub check_every: f64,
    /// Time step; `None` picks a stable one.
    pub dt: Option<f64>,
    /// End the run at the first detected vortex.
    pub stop_on_vortex: bool,
}

impl FlowSetup {
    /// Obstacle of `radius` and height `10ψ₀²` at the domain centre.
    pub fn centred(grid: GridSpec, amplitude: f64, radius: f64) -> Self {
        let a2 = amplitude * amplitude;
        let obstacle = ObstacleSpec::fixed((0.5 * grid.lx(), 0.5 * grid.ly()), radius, 10.0 * a2)
            .with_ramp(RAMP_HEALING_TIMES / a2);
        FlowSetup {
            grid,
            amplitude,
            obstacle,
            window: DEFAULT_WINDOW,
            check_every: 1.0,
            dt: None,
            stop_on_vortex: false,
        }
    }

    pub fn ramp_time(&self) -> f64 {
        RAMP_HEALING_TIMES / (self.amplitude * self.amplitude)
    }

    fn validate(&self) -> Result<()> {
        let psi0 = self.amplitude;
        if !(psi0 > 0.0) {
            return Err(Error::domain("amplitude must be positive"));
        }
        let o = &self.obstacle;
        let cell = self.grid.dx().max(self.grid.dy());
        if o.is_moving() {
            return Err(Error::Geometry("the obstacle must be at rest; the fluid carries the flow".into()));
        }
        if o.radius < 4.0 * cell {
            return Err(Error::Geometry(format!(
                "obstacle radius {} is below 4 grid cells ({})",
                o.radius,
                4.0 * cell
            )));
        }
        if o.radius < 1.0 / psi0 {
            return Err(Error::Geometry(format!(
                "obstacle radius {} is below the healing length {}",
                o.radius,
                1.0 / psi0
            )));
        }
        let side = self.grid.lx().min(self.grid.ly());
        if side < 16.0 * o.radius {
            return Err(Error::Geometry(format!(
                "domain side {side} is below 16 obstacle radii ({})",
                16.0 * o.radius
            )));
        }
        if !(o.height > 0.0) {
            return Err(Error::Geometry("obstacle height must be positive".into()));
        }
        if !(self.window > 0.0 && self.check_every > 0.0) {
            return Err(Error::domain("window and check interval must be positive"));
        }
        check_domain(&self.grid, psi0)
    }
}

/// Force on the obstacle at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DragSample {
    pub time: f64,
    pub fx: f64,
    pub fy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult {
    pub speed_ratio: f64,
    /// Total simulated time, ramp included.
    pub duration: f64,
    pub snapshots: Vec<VortexSet>,
    pub drag: Vec<DragSample>,
    pub first_vortex_time: Option<f64>,
    pub final_field: ComplexField,
}

impl FlowResult {
    pub fn peak_vortex_count(&self) -> usize {
        self.snapshots.iter().map(|s| s.len()).max().unwrap_or(0)
    }
}

/// Flows the fluid past the stationary obstacle at `speed_ratio · v_s` and
/// records vortices and drag `∬|ψ|²∇V`.
///
/// The obstacle is ramped on over ten healing times from a uniform flowing
/// state, then observed for `setup.window`. There is no loss or pump. The
/// detuning is chosen so that the far-field flow is stationary.
pub fn obstacle_flow_experiment(speed_ratio: f64, setup: &FlowSetup) -> Result<FlowResult> {
    setup.validate()?;
    if !(speed_ratio >= 0.0) {
        return Err(Error::domain(format!("speed ratio must be non-negative, got {speed_ratio}")));
    }
    let grid = setup.grid;
    let psi0 = setup.amplitude;
    let a2 = psi0 * psi0;
    let k_flow = flow_wavenumber(&grid, speed_ratio, psi0)?;
    let initial = flowing_background(&grid, speed_ratio, psi0)?;
    let params = ScaledParams::dimensionless(a2 + k_flow * k_flow, 0.0, 0.0, KerrSign::Defocusing);
    let obstacle = setup.obstacle.with_ramp(setup.ramp_time());

    // the flow can pile up density in front of the obstacle
    let dt_max = setup.dt.unwrap_or_else(|| stable_dt(&grid, 4.0 * a2));
    let per_check = (setup.check_every / dt_max).ceil() as usize;
    let dt = setup.check_every / per_check as f64;
    let duration = setup.ramp_time() + setup.window;
    let n_steps = (duration / dt).ceil() as usize;
    let config = RunConfig::new(initial, params, dt, n_steps)
        .with_snapshot_every(per_check)
        .with_potential(Potential::Obstacle(obstacle));

    let mut fft = Fft2::new(grid);
    let cell = grid.cell_area();
    let mut snapshots = Vec::new();
    let mut drag = Vec::new();
    let mut first_vortex_time = None;
    let mut last = None;
    run_with(&config, |t, field, _| {
        let v = Potential::Obstacle(obstacle).sample(&grid, t).expect("grid matches");
        let (gx, gy) = fft.gradient(&v);
        let data = field.data();
        let fx = par::pairwise_sum(data.len(), &|i| data[i].norm_sqr() * gx.data()[i]) * cell;
        let fy = par::pairwise_sum(data.len(), &|i| data[i].norm_sqr() * gy.data()[i]) * cell;
        drag.push(DragSample { time: t, fx, fy });
        let floor = 1e-12 * a2;
        let exclude: Vec<bool> = v
            .data()
            .iter()
            .zip(data)
            .map(|(&v, z)| v > a2 || z.norm_sqr() < floor)
            .collect();
        let set = detect_vortices_masked(field, t, &exclude);
        let found = !set.is_empty();
        if found && first_vortex_time.is_none() {
            first_vortex_time = Some(t);
        }
        snapshots.push(set);
        last = Some(field.clone());
        if found && setup.stop_on_vortex {
            Control::Stop
        } else {
            Control::Continue
        }
    })?;
    Ok(FlowResult {
        speed_ratio,
        duration,
        snapshots,
        drag,
        first_vortex_time,
        final_field: last.expect("the observer runs at t = 0"),
    })
}

/// One evaluation of the shedding predicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedTrial {
    pub speed_ratio: f64,
    pub vortex_count: usize,
    pub first_vortex_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalVelocityResult {
    /// Fastest tested speed ratio with no vortex in the window.
    pub v_lower: f64,
    /// Slowest tested speed ratio that shed a vortex.
    pub v_upper: f64,
    pub first_shedding_time: f64,
    /// Every tested speed, in the order tested.
    pub trials: Vec<SpeedTrial>,
    pub bisection_steps: usize,
    /// Observation window used for every trial.
    pub window: f64,
}

/// Minimum number of bisection steps between the starting bracket ends.
pub const MIN_BISECTION_STEPS: usize = 5;

/// Brackets the onset of vortex shedding by bisection on the speed ratio.
///
/// The predicate is "any vortex detected within the window". Speeds are
/// restricted to the multiples of the grid's speed quantum, so bisection
/// ends when the bracket is one quantum wide.
pub fn critical_velocity_scan(setup: &FlowSetup, lower: f64, upper: f64) -> Result<CriticalVelocityResult> {
    setup.validate()?;
    if !(0.0 < lower && lower < upper && upper <= 1.5) {
        return Err(Error::Bracket(format!("need 0 < lower < upper ≤ 1.5, got [{lower}, {upper}]")));
    }
    let q = speed_ratio_quantum(&setup.grid, setup.amplitude);
    let index = |v: f64| -> Result<usize> {
        let m = v / q;
        if (m - m.round()).abs() > 1e-9 * m.max(1.0) {
            return Err(Error::Commensurability {
                k_flow: v * crate::meanfield::scaled_sound_speed(setup.amplitude) / 2.0,
                nearest_speed_ratio: m.round() * q,
            });
        }
        Ok(m.round() as usize)
    };
    let (mut lo, mut hi) = (index(lower)?, index(upper)?);
    let needed = ((hi - lo) as f64).log2().ceil() as usize;
    if needed < MIN_BISECTION_STEPS {
        return Err(Error::Geometry(format!(
            "speed quantum {q:.4} allows only {needed} bisection steps in [{lower}, {upper}]; enlarge the domain along x"
        )));
    }
    let probe = FlowSetup {
        stop_on_vortex: true,
        ..*setup
    };
    let trial = |i: usize| -> Result<SpeedTrial> {
        let r = obstacle_flow_experiment(i as f64 * q, &probe)?;
        Ok(SpeedTrial {
            speed_ratio: r.speed_ratio,
            vortex_count: r.peak_vortex_count(),
            first_vortex_time: r.first_vortex_time,
        })
    };
    let (a, b) = par::join(|| trial(lo), || trial(hi));
    let (a, b) = (a?, b?);
    let mut trials = vec![a, b];
    if a.vortex_count > 0 {
        return Err(Error::Bracket(format!(
            "vortices already shed at the lower speed ratio {} (first at t = {:?})",
            a.speed_ratio, a.first_vortex_time
        )));
    }
    if b.vortex_count == 0 {
        return Err(Error::Bracket(format!(
            "no vortex shed at the upper speed ratio {} within {} time units",
            b.speed_ratio, setup.window
        )));
    }
    let mut upper_trial = b;
    let mut steps = 0;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let t = trial(mid)?;
        trials.push(t);
        steps += 1;
        if t.vortex_count > 0 {
            hi = mid;
            upper_trial = t;
        } else {
            lo = mid;
        }
    }
    Ok(CriticalVelocityResult {
        v_lower: lo as f64 * q,
        v_upper: hi as f64 * q,
        first_shedding_time: upper_trial.first_vortex_time.expect("upper trial shed a vortex"),
        trials,
        bisection_steps: steps,
        window: setup.window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> FlowSetup {
        let grid = GridSpec::square(64, 80.0).unwrap();
        FlowSetup {
            window: 4.0,
            ..FlowSetup::centred(grid, 1.0, 5.0)
        }
    }

    #[test]
    fn static_fluid_sheds_nothing_and_feels_no_net_force() {
        let r = obstacle_flow_experiment(0.0, &small()).unwrap();
        assert!(r.snapshots.iter().all(|s| s.is_empty()));
        assert!(r.first_vortex_time.is_none());
        let last = r.drag.last().unwrap();
        assert!(last.fx.abs() < 1e-8 && last.fy.abs() < 1e-8, "{last:?}");
        assert!((r.duration - 14.0).abs() < 1e-12);
        assert_eq!(r.snapshots.len(), 15);
    }

    #[test]
    fn geometry_preconditions() {
        let s = small();
        let tiny = FlowSetup {
            obstacle: ObstacleSpec { radius: 2.0, ..s.obstacle },
            ..s
        };
        assert!(matches!(obstacle_flow_experiment(0.0, &tiny), Err(Error::Geometry(_))));
        let fat = FlowSetup {
            obstacle: ObstacleSpec { radius: 6.0, ..s.obstacle },
            ..s
        };
        assert!(matches!(obstacle_flow_experiment(0.0, &fat), Err(Error::Geometry(_))));
        let moving = FlowSetup {
            obstacle: s.obstacle.with_velocity((0.1, 0.0)),
            ..s
        };
        assert!(matches!(obstacle_flow_experiment(0.0, &moving), Err(Error::Geometry(_))));
        let cramped = FlowSetup {
            grid: GridSpec::square(64, 64.0).unwrap(),
            obstacle: ObstacleSpec { radius: 4.0, ..s.obstacle },
            ..s
        };
        assert!(matches!(obstacle_flow_experiment(0.0, &cramped), Err(Error::DomainTooSmall(_))));
    }

    #[test]
    fn incommensurate_speeds_name_the_nearest_valid_one() {
        let err = obstacle_flow_experiment(0.123, &small()).unwrap_err();
        assert!(matches!(err, Error::Commensurability { .. }), "{err}");
        let err = critical_velocity_scan(&small(), 0.1, 1.5).unwrap_err();
        assert!(matches!(err, Error::Commensurability { .. } | Error::Geometry(_)), "{err}");
    }
}

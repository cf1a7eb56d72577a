//! Schrödinger evolution along a driven loop and extraction of the
//! geometric phase from the evolved state.

use std::f64::consts::{PI, TAU};

use crate::berry::nondegenerate_band;
use crate::error::{Error, Result};
use crate::gauge::Gauge;
use crate::linalg::{
    expi_hermitian, inner, smallest_singular_value, unitarize, ComplexMatrix, ComplexVector, C64,
};
use crate::models::{BandSelector, HermitianModel, DEFAULT_BAND_TOL};
use crate::paths::ParameterPath;
use crate::quadrature::simpson;
use crate::wilczek_zee::{degenerate_band, wz_holonomy_link, LinkOptions};

/// Fidelity below which a result is marked non-adiabatic.
pub const ADIABATIC_FIDELITY: f64 = 0.99;
const UNIT_NORM_TOL: f64 = 1e-8;

/// A loop traversed in physical time `T` with `steps` propagation steps.
#[derive(Clone, Debug, PartialEq)]
pub struct DriveSchedule {
    path: ParameterPath,
    total_time: f64,
    steps: usize,
}

impl DriveSchedule {
    pub fn new(path: ParameterPath, total_time: f64, steps: usize) -> Result<Self> {
        if !(total_time.is_finite() && total_time > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "total time must be positive, got {total_time}"
            )));
        }
        if steps < path.len() {
            return Err(Error::InvalidArgument(format!(
                "{steps} steps cannot resolve a path of {} points",
                path.len()
            )));
        }
        Ok(Self {
            path,
            total_time,
            steps,
        })
    }

    pub fn path(&self) -> &ParameterPath {
        &self.path
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.total_time / self.steps as f64
    }

    /// Parameter point at physical time `t ∈ [0, T]`; the path's own time
    /// parameter is stretched linearly onto `[0, T]`.
    pub fn point_at(&self, t: f64) -> Vec<f64> {
        let times = self.path.times();
        let (t0, t1) = (times[0], times[times.len() - 1]);
        self.path.point_at(t0 + (t / self.total_time) * (t1 - t0))
    }

    pub fn time_grid(&self) -> Vec<f64> {
        let dt = self.dt();
        (0..=self.steps)
            .map(|i| {
                if i == self.steps {
                    self.total_time
                } else {
                    i as f64 * dt
                }
            })
            .collect()
    }
}

/// `(−π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let y = x - TAU * ((x + PI) / TAU).floor();
    if y <= -PI {
        y + TAU
    } else {
        y
    }
}

/// Propagates `psi0` with the exact exponential of the midpoint Hamiltonian
/// on every step.
pub fn evolve(
    model: &HermitianModel,
    schedule: &DriveSchedule,
    psi0: &ComplexVector,
) -> Result<ComplexVector> {
    if psi0.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            actual: psi0.len(),
        });
    }
    if (psi0.norm() - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::InvalidArgument(format!(
            "initial state norm {} is not 1",
            psi0.norm()
        )));
    }
    let columns = evolve_columns(
        model,
        schedule,
        &ComplexMatrix::from_columns(&[psi0.to_vec()])?,
    )?;
    ComplexVector::new(columns.column(0))
}

/// Propagates each column of `frame` (dim × r).
pub fn evolve_frame(
    model: &HermitianModel,
    schedule: &DriveSchedule,
    frame: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if frame.rows() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            actual: frame.rows(),
        });
    }
    evolve_columns(model, schedule, frame)
}

fn evolve_columns(
    model: &HermitianModel,
    schedule: &DriveSchedule,
    frame: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let grid = schedule.time_grid();
    let mut state = frame.clone();
    for w in grid.windows(2) {
        let h = model.eval_hamiltonian(&schedule.point_at(0.5 * (w[0] + w[1])))?;
        state = expi_hermitian(&h, w[1] - w[0])?.checked_mul(&state)?;
    }
    Ok(state)
}

/// Band energies on the schedule's time grid.
pub fn band_energies(
    model: &HermitianModel,
    band: &BandSelector,
    schedule: &DriveSchedule,
) -> Result<Vec<f64>> {
    schedule
        .time_grid()
        .iter()
        .map(|&t| {
            let frame = model.eigenframe(&schedule.point_at(t), DEFAULT_BAND_TOL)?;
            let range = frame.resolve(band)?;
            Ok(frame.band_energy(&range))
        })
        .collect()
}

/// `−∫₀ᵀ E(t) dt` by composite Simpson over the time grid.
pub fn dynamical_phase(
    model: &HermitianModel,
    band: &BandSelector,
    schedule: &DriveSchedule,
) -> Result<f64> {
    let energies = band_energies(model, band, schedule)?;
    Ok(-simpson(&schedule.time_grid(), &energies)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionResult {
    pub final_state: ComplexVector,
    pub dynamical_phase: f64,
    /// `arg (φ(λ₀), ψ(T))`.
    pub total_phase: f64,
    /// `total_phase − dynamical_phase`, wrapped into `(−π, π]`.
    pub geometric_phase: f64,
    /// `|(φ(λ(T)), ψ(T))|`.
    pub fidelity: f64,
    pub non_adiabatic: bool,
}

/// Starts in the band eigenvector at `λ(0)` (in `gauge`), evolves once
/// around the loop and splits the acquired phase.
pub fn extract_geometric_phase(
    model: &HermitianModel,
    band: &BandSelector,
    schedule: &DriveSchedule,
    gauge: &dyn Gauge,
) -> Result<EvolutionResult> {
    let path = schedule.path();
    if !path.is_closed() {
        return Err(Error::InvalidPath(
            "geometric phase extraction needs a closed loop".into(),
        ));
    }
    let start = &path.points()[0];
    let phi0 = gauge
        .fix(
            start,
            &nondegenerate_band(model, band, start, DEFAULT_BAND_TOL)?,
        )?
        .column(0);
    let psi0 = ComplexVector::new(phi0.clone())?;
    let final_state = evolve(model, schedule, &psi0)?;
    let dynamical = dynamical_phase(model, band, schedule)?;

    let overlap = inner(&phi0, &final_state)?;
    let end = schedule.point_at(schedule.total_time());
    let phi_end = nondegenerate_band(model, band, &end, DEFAULT_BAND_TOL)?.column(0);
    let fidelity = inner(&phi_end, &final_state)?.norm();
    let total_phase = overlap.arg();
    Ok(EvolutionResult {
        final_state,
        dynamical_phase: dynamical,
        total_phase,
        geometric_phase: wrap_phase(total_phase - dynamical),
        fidelity,
        non_adiabatic: fidelity < ADIABATIC_FIDELITY,
    })
}

/// Evolution of a degenerate band frame compared with its Wilczek–Zee
/// holonomy.
#[derive(Clone, Debug, PartialEq)]
pub struct NonAbelianEvolutionReport {
    pub final_frame: ComplexMatrix,
    pub dynamical_phase: f64,
    /// `polar(Φ₀†Ψ(T)) · e^{−i·dynamical_phase}`.
    pub holonomy_estimate: ComplexMatrix,
    pub link_holonomy: ComplexMatrix,
    /// Frobenius distance between the two holonomies.
    pub deviation: f64,
    /// Smallest singular value of `Φ₀†Ψ(T)`.
    pub fidelity: f64,
    pub non_adiabatic: bool,
}

pub fn compare_with_holonomy(
    model: &HermitianModel,
    band: &BandSelector,
    schedule: &DriveSchedule,
    gauge: &dyn Gauge,
) -> Result<NonAbelianEvolutionReport> {
    let path = schedule.path();
    if !path.is_closed() {
        return Err(Error::InvalidPath(
            "holonomy comparison needs a closed loop".into(),
        ));
    }
    let start = &path.points()[0];
    let base = gauge.fix(
        start,
        &degenerate_band(model, band, start, DEFAULT_BAND_TOL)?,
    )?;
    let final_frame = evolve_frame(model, schedule, &base)?;
    let dynamical = dynamical_phase(model, band, schedule)?;
    let overlap = base.adjoint().checked_mul(&final_frame)?;
    let fidelity = smallest_singular_value(&overlap)?;
    let holonomy_estimate = unitarize(&overlap)?.scale(C64::from_polar(1.0, -dynamical));
    let link_holonomy = wz_holonomy_link(model, band, path, &LinkOptions::default(), gauge)?.matrix;
    let deviation = (&holonomy_estimate - &link_holonomy).frobenius_norm();
    Ok(NonAbelianEvolutionReport {
        final_frame,
        dynamical_phase: dynamical,
        holonomy_estimate,
        link_holonomy,
        deviation,
        fidelity,
        non_adiabatic: fidelity < ADIABATIC_FIDELITY,
    })
}

//! Non-Abelian (Wilczek–Zee) connection and holonomy of an r-fold
//! degenerate band.
//!
//! Conventions: the band frame is `Φ = (φ¹ … φʳ)`, the connection is
//! `(Aₖ)_ab = −(φ_a, ∂ₖφ_b)` (anti-Hermitian), and the holonomy `W` solves
//! `dW/ds = λ̇ᵏ Aₖ W`, `W(0) = 1`, so that the adiabatically transported
//! frame after one loop is `Φ(λ₀) W` (up to the dynamical phase).
//!
//! Two routes are provided: an ordered product of polar-unitarized frame
//! overlaps ([`wz_holonomy_link`]) and RK4 integration of the matrix ODE
//! with a finite-difference connection ([`wz_holonomy_ode`]).

use crate::berry::FiniteDifference;
use crate::error::{Error, Result};
use crate::gauge::Gauge;
use crate::linalg::{smallest_singular_value, unitarize, ComplexMatrix, C64};
use crate::models::{BandSelector, HermitianModel, DEFAULT_BAND_TOL};
use crate::paths::ParameterPath;

/// Accepted anti-Hermiticity defect of a finite-difference connection.
const ANTI_HERMITIAN_TOL: f64 = 1e-8;
/// Unitarity tolerance for [`gauge_transform`] inputs.
const UNITARY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct NonAbelianConnectionSample {
    pub point: Vec<f64>,
    /// One r×r anti-Hermitian matrix per parameter direction.
    pub components: Vec<ComplexMatrix>,
    /// Largest `‖Aₖ + Aₖ†‖` before the anti-Hermitian part was taken.
    pub anti_hermiticity_defect: f64,
}

impl NonAbelianConnectionSample {
    /// `vᵏ Aₖ`.
    pub fn along(&self, v: &[f64]) -> ComplexMatrix {
        let r = self.components[0].rows();
        self.components
            .iter()
            .zip(v)
            .fold(ComplexMatrix::zeros(r, r), |acc, (a, &x)| {
                &acc + &a.scale_real(x)
            })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WilczekZeeHolonomy {
    /// r×r unitary `U⁻¹_WZ`.
    pub matrix: ComplexMatrix,
    pub path: ParameterPath,
    pub band: BandSelector,
    pub refinements: usize,
}

impl WilczekZeeHolonomy {
    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn det(&self) -> C64 {
        self.matrix.det().expect("holonomy is square")
    }

    /// `arg det W`: the Abelian (trace-part) holonomy of the band.
    pub fn det_phase(&self) -> f64 {
        self.det().arg()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn unitarity_defect(&self) -> f64 {
        self.matrix.unitarity_defect()
    }
}

/// Band columns at `point`, checked to have the selector's multiplicity.
pub(crate) fn degenerate_band(
    model: &HermitianModel,
    band: &BandSelector,
    point: &[f64],
    band_tol: f64,
) -> Result<ComplexMatrix> {
    model.eigenframe(point, band_tol)?.band_columns(band)
}

/// `(Aₖ)_ab = −(φ_a, ∂ₖφ_b)` by central differences, frames held in `gauge`.
///
/// The steps `h` and `h/2` are Richardson-combined, which cancels the O(h²)
/// Hermitian part a plain central difference leaves behind.
pub fn wz_connection_fd(
    model: &HermitianModel,
    band: &BandSelector,
    point: &[f64],
    fd: &FiniteDifference,
    gauge: &dyn Gauge,
) -> Result<NonAbelianConnectionSample> {
    let h = fd.step_at(point)?;
    let frame_at = |p: &[f64]| -> Result<ComplexMatrix> {
        gauge.fix(p, &degenerate_band(model, band, p, fd.band_tol)?)
    };
    let center_adj = frame_at(point)?.adjoint();
    let mut shifted = point.to_vec();
    let mut central = |k: usize, step: f64| -> Result<ComplexMatrix> {
        shifted[k] = point[k] + step;
        let plus = frame_at(&shifted)?;
        shifted[k] = point[k] - step;
        let minus = frame_at(&shifted)?;
        shifted[k] = point[k];
        Ok((&plus - &minus).scale_real(0.5 / step))
    };
    let mut components = Vec::with_capacity(point.len());
    let mut defect: f64 = 0.0;
    for k in 0..point.len() {
        let coarse = central(k, h)?;
        let fine = central(k, 0.5 * h)?;
        let derivative = (&fine.scale_real(4.0) - &coarse).scale_real(1.0 / 3.0);
        let a = -&center_adj.checked_mul(&derivative)?;
        defect = defect.max(a.anti_hermiticity_defect());
        components.push(a.anti_hermitian_part());
    }
    if defect > ANTI_HERMITIAN_TOL {
        return Err(Error::Resolution {
            refinements: 0,
            reason: format!(
                "connection anti-Hermiticity defect {defect:.3e}; frame not smooth at this step"
            ),
        });
    }
    Ok(NonAbelianConnectionSample {
        point: point.to_vec(),
        components,
        anti_hermiticity_defect: defect,
    })
}

/// `A'ₖ = U Aₖ U⁻¹ + (∂ₖU) U⁻¹`.
pub fn gauge_transform(
    sample: &NonAbelianConnectionSample,
    u: &ComplexMatrix,
    du: &[ComplexMatrix],
) -> Result<NonAbelianConnectionSample> {
    let defect = u.unitarity_defect();
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary(defect));
    }
    if du.len() != sample.components.len() {
        return Err(Error::DimensionMismatch {
            expected: sample.components.len(),
            actual: du.len(),
        });
    }
    let u_inv = u.adjoint();
    let components = sample
        .components
        .iter()
        .zip(du)
        .map(|(a, d)| Ok(&u.checked_mul(a)?.checked_mul(&u_inv)? + &d.checked_mul(&u_inv)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(NonAbelianConnectionSample {
        point: sample.point.clone(),
        components,
        anti_hermiticity_defect: sample.anti_hermiticity_defect,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkOptions {
    pub band_tol: f64,
    pub max_refinements: usize,
    /// Loops are refined while some overlap has a smaller singular value.
    pub min_singular_value: f64,
}

impl Default for LinkOptions {
    fn default() -> Self {
        Self {
            band_tol: DEFAULT_BAND_TOL,
            max_refinements: 8,
            min_singular_value: 0.9,
        }
    }
}

/// Ordered product `W = ∏ᵢ polar(Mᵢ)` with `(Mᵢ)_ab = (φ_a(λᵢ₊₁), φ_b(λᵢ))`,
/// later links multiplying from the left.
///
/// Only the base-point frame is put into `gauge`; intermediate frames cancel
/// in the product. The closing link ends on the base frame itself.
pub fn wz_holonomy_link(
    model: &HermitianModel,
    band: &BandSelector,
    path: &ParameterPath,
    opts: &LinkOptions,
    gauge: &dyn Gauge,
) -> Result<WilczekZeeHolonomy> {
    if !path.is_closed() {
        return Err(Error::InvalidPath("holonomy needs a closed loop".into()));
    }
    let mut current = path.clone();
    let mut last_sigma = 0.0;
    for refinements in 0..=opts.max_refinements {
        match link_product(model, band, &current, opts, gauge)? {
            Ok(matrix) => {
                return Ok(WilczekZeeHolonomy {
                    matrix,
                    path: current,
                    band: *band,
                    refinements,
                });
            }
            Err(sigma) => {
                last_sigma = sigma;
                if refinements < opts.max_refinements {
                    current = current.refine(2)?;
                }
            }
        }
    }
    Err(Error::Resolution {
        refinements: opts.max_refinements,
        reason: format!(
            "frame overlap singular value {last_sigma:.3e} below {}",
            opts.min_singular_value
        ),
    })
}

/// Inner `Err(σ)` reports an under-resolved link.
fn link_product(
    model: &HermitianModel,
    band: &BandSelector,
    path: &ParameterPath,
    opts: &LinkOptions,
    gauge: &dyn Gauge,
) -> Result<std::result::Result<ComplexMatrix, f64>> {
    let n = path.len() - 1;
    let points = path.points();
    let base = gauge.fix(
        &points[0],
        &degenerate_band(model, band, &points[0], opts.band_tol)?,
    )?;
    let r = base.cols();
    let mut w = ComplexMatrix::identity(r);
    let mut prev = base.clone();
    for i in 1..=n {
        let next = if i == n {
            base.clone()
        } else {
            degenerate_band(model, band, &points[i], opts.band_tol)?
        };
        let overlap = next.adjoint().checked_mul(&prev)?;
        let sigma = smallest_singular_value(&overlap)?;
        if sigma < opts.min_singular_value {
            return Ok(Err(sigma));
        }
        w = unitarize(&overlap)?.checked_mul(&w)?;
        prev = next;
    }
    Ok(Ok(w))
}

/// RK4 integration of `dW/ds = λ̇ᵏ Aₖ(λ(s)) W` along the piecewise-linear
/// loop, re-unitarized after every step. `steps` is spread evenly over the
/// segments (at least one per segment).
pub fn holonomy_ode<F>(
    path: &ParameterPath,
    steps: usize,
    mut connection: F,
) -> Result<ComplexMatrix>
where
    F: FnMut(&[f64]) -> Result<NonAbelianConnectionSample>,
{
    let points = path.points();
    let segments = path.segments();
    let per_segment = steps.div_ceil(segments).max(1);
    let h = 1.0 / per_segment as f64;

    let first = connection(&points[0])?;
    let r = first.components[0].rows();
    let mut w = ComplexMatrix::identity(r);
    let mut at_start = first;
    for i in 0..segments {
        let (a, b) = (&points[i], &points[i + 1]);
        let delta: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
        let lerp = |s: f64| -> Vec<f64> { a.iter().zip(&delta).map(|(x, d)| x + s * d).collect() };
        for j in 0..per_segment {
            let s = j as f64 * h;
            let k_start = at_start.along(&delta);
            let mid = connection(&lerp(s + 0.5 * h))?.along(&delta);
            let end_sample = connection(&lerp(s + h))?;
            let k_end = end_sample.along(&delta);

            let k1 = k_start.checked_mul(&w)?;
            let k2 = mid.checked_mul(&(&w + &k1.scale_real(0.5 * h)))?;
            let k3 = mid.checked_mul(&(&w + &k2.scale_real(0.5 * h)))?;
            let k4 = k_end.checked_mul(&(&w + &k3.scale_real(h)))?;
            let incr = &(&(&k1 + &k2.scale_real(2.0)) + &k3.scale_real(2.0)) + &k4;
            w = unitarize(&(&w + &incr.scale_real(h / 6.0)))?;
            at_start = end_sample;
        }
    }
    Ok(w)
}

/// [`holonomy_ode`] with the finite-difference connection of `band` in `gauge`.
pub fn wz_holonomy_ode(
    model: &HermitianModel,
    band: &BandSelector,
    path: &ParameterPath,
    steps: usize,
    fd: &FiniteDifference,
    gauge: &dyn Gauge,
) -> Result<WilczekZeeHolonomy> {
    if !path.is_closed() {
        return Err(Error::InvalidPath("holonomy needs a closed loop".into()));
    }
    let matrix = holonomy_ode(path, steps, |p| wz_connection_fd(model, band, p, fd, gauge))?;
    Ok(WilczekZeeHolonomy {
        matrix,
        path: path.clone(),
        band: *band,
        refinements: 0,
    })
}

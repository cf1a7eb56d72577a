//! Abelian Berry connection `Aₖ = i(φ, ∂ₖφ)`, its curvature, and the Berry
//! phase of a closed loop, by two independent routes: a product of overlap
//! links along the loop, and a surface integral of the curvature over a cap.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::gauge::{Gauge, ReferenceGauge};
use crate::linalg::{inner_unchecked, ComplexMatrix, C64, ONE};
use crate::models::{BandSelector, HermitianModel, DEFAULT_BAND_TOL};
use crate::paths::{self, from_spherical, ParameterPath, SphericalPoint};
use crate::quadrature::gauss_legendre_interval;

/// Richardson discrepancy above which a finite-difference sample is flagged.
const RICHARDSON_FLAG: f64 = 1e-6;
/// Imaginary residue of `i(φ, ∂φ)` tolerated before it is discarded.
const IMAGINARY_RESIDUE_TOL: f64 = 1e-8;

/// Central-difference settings shared by the connection and curvature routines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiniteDifference {
    /// Step `h`; `None` uses `1e-4 (1 + |λ|)`.
    pub step: Option<f64>,
    pub band_tol: f64,
}

impl Default for FiniteDifference {
    fn default() -> Self {
        Self {
            step: None,
            band_tol: DEFAULT_BAND_TOL,
        }
    }
}

impl FiniteDifference {
    pub fn with_step(step: f64) -> Self {
        Self {
            step: Some(step),
            ..Self::default()
        }
    }

    pub fn step_at(&self, point: &[f64]) -> Result<f64> {
        let h = self.step.unwrap_or_else(|| 1e-4 * (1.0 + norm(point)));
        if !(h > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "finite-difference step must be positive, got {h}"
            )));
        }
        Ok(h)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AbelianConnectionSample {
    pub point: Vec<f64>,
    pub components: Vec<f64>,
    /// `max |A(h) - A(h/2)|` over components.
    pub richardson_delta: f64,
    /// Largest discarded imaginary part.
    pub imaginary_residue: f64,
}

impl AbelianConnectionSample {
    /// Richardson discrepancy or discarded imaginary part is too large to
    /// trust the sample at the requested accuracy.
    pub fn flagged(&self) -> bool {
        self.richardson_delta > RICHARDSON_FLAG || self.imaginary_residue > IMAGINARY_RESIDUE_TOL
    }

    /// `(A_|λ|, A_θ, A_φ)`: components along the spherical coordinate vectors.
    pub fn spherical_components(&self) -> Result<[f64; 3]> {
        let s = paths::to_spherical(&self.point)?;
        let (t_theta, t_phi) = s.tangents();
        let a = &self.components;
        Ok([dot(a, &s.radial()), dot(a, &t_theta), dot(a, &t_phi)])
    }
}

/// Antisymmetric `F_kl`, upper triangle stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct AbelianCurvatureSample {
    pub point: Vec<f64>,
    n: usize,
    upper: Vec<f64>,
}

impl AbelianCurvatureSample {
    pub fn new(point: Vec<f64>, full: &[Vec<f64>]) -> Self {
        let n = full.len();
        let mut upper = Vec::with_capacity(n * (n - 1) / 2);
        for k in 0..n {
            for l in k + 1..n {
                upper.push(full[k][l]);
            }
        }
        Self { point, n, upper }
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        match k.cmp(&l) {
            std::cmp::Ordering::Equal => 0.0,
            std::cmp::Ordering::Less => self.upper[self.offset(k, l)],
            std::cmp::Ordering::Greater => -self.upper[self.offset(l, k)],
        }
    }

    fn offset(&self, k: usize, l: usize) -> usize {
        k * self.n - k * (k + 1) / 2 + (l - k - 1)
    }

    /// `F_kl uᵏ vˡ`.
    pub fn contract(&self, u: &[f64], v: &[f64]) -> f64 {
        let mut s = 0.0;
        for k in 0..self.n {
            for l in 0..self.n {
                s += self.get(k, l) * u[k] * v[l];
            }
        }
        s
    }

    /// `F_θφ` at the sample point.
    pub fn theta_phi(&self) -> Result<f64> {
        let s = paths::to_spherical(&self.point)?;
        let (t_theta, t_phi) = s.tangents();
        Ok(self.contract(&t_theta, &t_phi))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BerryPhaseResult {
    /// Accumulated phase in radians, not reduced mod 2π.
    pub phase: f64,
    pub phase_factor: C64,
    /// The loop actually evaluated (after any automatic refinement).
    pub path: ParameterPath,
    pub band: BandSelector,
    pub refinements: usize,
    /// Basis component held real positive along the loop, when one was usable.
    pub reference_component: Option<usize>,
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Band columns at `point`, checked to be a single nondegenerate state.
pub(crate) fn nondegenerate_band(
    model: &HermitianModel,
    band: &BandSelector,
    point: &[f64],
    band_tol: f64,
) -> Result<ComplexMatrix> {
    if band.multiplicity() != 1 {
        return Err(Error::DegenerateBand {
            multiplicity: band.multiplicity(),
        });
    }
    let frame = model.eigenframe(point, band_tol)?;
    frame.band_columns(band).map_err(|e| match e {
        Error::MultiplicityMismatch { actual, .. } if actual > 1 => Error::DegenerateBand {
            multiplicity: actual,
        },
        other => other,
    })
}

fn connection_at_step(
    model: &HermitianModel,
    band: &BandSelector,
    point: &[f64],
    h: f64,
    band_tol: f64,
    gauge: &dyn Gauge,
) -> Result<(Vec<f64>, f64)> {
    let center = gauge
        .fix(point, &nondegenerate_band(model, band, point, band_tol)?)?
        .column(0);
    let mut components = Vec::with_capacity(point.len());
    let mut residue: f64 = 0.0;
    let mut shifted = point.to_vec();
    for k in 0..point.len() {
        shifted[k] = point[k] + h;
        let plus = gauge
            .fix(
                &shifted,
                &nondegenerate_band(model, band, &shifted, band_tol)?,
            )?
            .column(0);
        shifted[k] = point[k] - h;
        let minus = gauge
            .fix(
                &shifted,
                &nondegenerate_band(model, band, &shifted, band_tol)?,
            )?
            .column(0);
        shifted[k] = point[k];
        let derivative: Vec<C64> = plus
            .iter()
            .zip(&minus)
            .map(|(p, m)| (p - m) / (2.0 * h))
            .collect();
        let a = C64::new(0.0, 1.0) * inner_unchecked(&center, &derivative);
        residue = residue.max(a.im.abs());
        components.push(a.re);
    }
    Ok((components, residue))
}

/// `Aₖ = i(φ, ∂ₖφ)` in Cartesian parameter components, with the frame
/// held in `gauge` across the difference stencil.
pub fn connection_fd(
    model: &HermitianModel,
    band: &BandSelector,
    point: &[f64],
    fd: &FiniteDifference,
    gauge: &dyn Gauge,
) -> Result<AbelianConnectionSample> {
    let h = fd.step_at(point)?;
    let (components, residue) = connection_at_step(model, band, point, h, fd.band_tol, gauge)?;
    let (half, _) = connection_at_step(model, band, point, h / 2.0, fd.band_tol, gauge)?;
    let richardson_delta = components
        .iter()
        .zip(&half)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(AbelianConnectionSample {
        point: point.to_vec(),
        components,
        richardson_delta,
        imaginary_residue: residue,
    })
}

/// `F_kl = ∂ₖA_l − ∂_lAₖ` by central differences of [`connection_fd`].
pub fn curvature_fd(
    model: &HermitianModel,
    band: &BandSelector,
    point: &[f64],
    fd: &FiniteDifference,
    gauge: &dyn Gauge,
) -> Result<AbelianCurvatureSample> {
    let h = fd.step_at(point)?;
    let n = point.len();
    let mut grads = vec![vec![0.0; n]; n]; // grads[k][l] = ∂ₖ A_l
    let mut shifted = point.to_vec();
    for k in 0..n {
        shifted[k] = point[k] + h;
        let (plus, _) = connection_at_step(model, band, &shifted, h, fd.band_tol, gauge)?;
        shifted[k] = point[k] - h;
        let (minus, _) = connection_at_step(model, band, &shifted, h, fd.band_tol, gauge)?;
        shifted[k] = point[k];
        for l in 0..n {
            grads[k][l] = (plus[l] - minus[l]) / (2.0 * h);
        }
    }
    let full: Vec<Vec<f64>> = (0..n)
        .map(|k| (0..n).map(|l| grads[k][l] - grads[l][k]).collect())
        .collect();
    Ok(AbelianCurvatureSample::new(point.to_vec(), &full))
}

/// Options for [`berry_phase_line`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineOptions {
    pub band_tol: f64,
    /// Maximum number of loop doublings when a link phase reaches π/2.
    pub max_refinements: usize,
}

impl Default for LineOptions {
    fn default() -> Self {
        Self {
            band_tol: DEFAULT_BAND_TOL,
            max_refinements: 8,
        }
    }
}

/// Berry phase `Θ = −Σᵢ arg(φᵢ, φᵢ₊₁)` of a closed loop.
///
/// The last link closes onto the very first eigenvector, so the result does
/// not depend on the eigensolver's phase convention.
pub fn berry_phase_line(
    model: &HermitianModel,
    band: &BandSelector,
    path: &ParameterPath,
    opts: &LineOptions,
) -> Result<BerryPhaseResult> {
    if !path.is_closed() {
        return Err(Error::InvalidPath("Berry phase needs a closed loop".into()));
    }
    let mut current = path.clone();
    for refinements in 0..=opts.max_refinements {
        let states = band_states(model, band, &current, opts.band_tol)?;
        let (states, reference_component) = smooth_states(states);
        match link_phase(&states) {
            Some((phase, phase_factor)) => {
                return Ok(BerryPhaseResult {
                    phase,
                    phase_factor,
                    path: current,
                    band: *band,
                    refinements,
                    reference_component,
                });
            }
            None if refinements < opts.max_refinements => current = current.refine(2)?,
            None => break,
        }
    }
    Err(Error::Resolution {
        refinements: opts.max_refinements,
        reason: "a link phase still exceeds pi/2".into(),
    })
}

fn band_states(
    model: &HermitianModel,
    band: &BandSelector,
    path: &ParameterPath,
    band_tol: f64,
) -> Result<Vec<Vec<C64>>> {
    path.points()[..path.len() - 1]
        .iter()
        .map(|p| nondegenerate_band(model, band, p, band_tol).map(|c| c.column(0)))
        .collect()
}

/// Rephases loop states so one basis component stays real positive.
///
/// The last component is preferred when it stays clear of zero, which
/// matches the usual lower-component convention for spin-½; otherwise the
/// component with the largest minimum modulus along the loop is used. If
/// every component vanishes somewhere, states are left in the solver gauge.
fn smooth_states(mut states: Vec<Vec<C64>>) -> (Vec<Vec<C64>>, Option<usize>) {
    const PREFERRED_FLOOR: f64 = 1e-3;
    const SINGULAR_FLOOR: f64 = 1e-6;
    let dim = states[0].len();
    let min_modulus = |j: usize| {
        states
            .iter()
            .map(|s| s[j].norm())
            .fold(f64::INFINITY, f64::min)
    };
    let chosen = if min_modulus(dim - 1) >= PREFERRED_FLOOR {
        Some(dim - 1)
    } else {
        (0..dim)
            .rev()
            .map(|j| (j, min_modulus(j)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .filter(|&(_, m)| m >= SINGULAR_FLOOR)
            .map(|(j, _)| j)
    };
    if let Some(j) = chosen {
        for s in states.iter_mut() {
            let rot = s[j].conj() / s[j].norm();
            for z in s.iter_mut() {
                *z *= rot;
            }
        }
    }
    (states, chosen)
}

/// `Some((phase, factor))`, or `None` when some link is too coarse.
/// The last link closes onto the first state.
fn link_phase(states: &[Vec<C64>]) -> Option<(f64, C64)> {
    let n = states.len();
    let mut phase = 0.0;
    let mut factor = ONE;
    for i in 0..n {
        let z = inner_unchecked(&states[i], &states[(i + 1) % n]);
        let arg = z.arg();
        if z.norm() == 0.0 || arg.abs() >= std::f64::consts::FRAC_PI_2 {
            return None;
        }
        phase -= arg;
        factor *= z.conj() / z.norm();
    }
    Some((phase, factor / factor.norm()))
}

/// Cap quadrature settings for [`berry_phase_surface`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceOptions {
    /// Gauss–Legendre nodes in θ.
    pub theta_nodes: usize,
    /// Uniform nodes in φ.
    pub phi_nodes: usize,
    /// Largest accepted estimated quadrature error, radians.
    pub tolerance: f64,
    pub fd: FiniteDifference,
}

impl Default for SurfaceOptions {
    fn default() -> Self {
        Self {
            theta_nodes: 24,
            phi_nodes: 16,
            tolerance: 1e-6,
            fd: FiniteDifference::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurfacePhase {
    /// `½∬ F_kl dλᵏ∧dλˡ` over the north cap, radians.
    pub phase: f64,
    /// Difference to the same rule at half resolution.
    pub estimated_error: f64,
}

/// Surface integral of the curvature over the north cap `θ' < theta` of
/// radius `radius`: the Stokes route to the Berry phase of the circle at `theta`.
pub fn berry_phase_surface(
    model: &HermitianModel,
    band: &BandSelector,
    radius: f64,
    theta: f64,
    opts: &SurfaceOptions,
) -> Result<SurfacePhase> {
    if model.n_params() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            actual: model.n_params(),
        });
    }
    if !(theta > 0.0 && theta < std::f64::consts::PI) || !(radius > 0.0) {
        return Err(Error::ChartSingularity(format!(
            "cap theta = {theta}, radius = {radius}"
        )));
    }
    if opts.theta_nodes < 2 || opts.phi_nodes < 2 {
        return Err(Error::InvalidArgument(
            "cap mesh needs at least 2 nodes per direction".into(),
        ));
    }
    let fine = cap_integral(
        model,
        band,
        radius,
        theta,
        opts.theta_nodes,
        opts.phi_nodes,
        &opts.fd,
    )?;
    let coarse = cap_integral(
        model,
        band,
        radius,
        theta,
        opts.theta_nodes / 2,
        opts.phi_nodes / 2,
        &opts.fd,
    )?;
    let estimated_error = (fine - coarse).abs();
    if estimated_error > opts.tolerance {
        return Err(Error::QuadratureTolerance {
            tol: opts.tolerance,
            estimate: estimated_error,
        });
    }
    Ok(SurfacePhase {
        phase: fine,
        estimated_error,
    })
}

fn cap_integral(
    model: &HermitianModel,
    band: &BandSelector,
    radius: f64,
    theta: f64,
    n_theta: usize,
    n_phi: usize,
    fd: &FiniteDifference,
) -> Result<f64> {
    let dphi = TAU / n_phi as f64;
    let mut total = 0.0;
    for (t, wt) in gauss_legendre_interval(n_theta, 0.0, theta) {
        for j in 0..n_phi {
            let sp = SphericalPoint {
                radius,
                theta: t,
                phi: (j as f64 + 0.5) * dphi,
            };
            let point = from_spherical(&sp);
            let cols = nondegenerate_band(model, band, &point, fd.band_tol)?;
            let gauge = ReferenceGauge::pivoted(&cols);
            let f = curvature_fd(model, band, &point, fd, &gauge)?;
            let (u, v) = sp.tangents();
            total += wt * dphi * f.contract(&u, &v);
        }
    }
    Ok(total)
}

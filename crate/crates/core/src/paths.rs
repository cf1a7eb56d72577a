//! Parameter-space curves stored as explicit point sequences, the spherical
//! chart on R³, and solid angles of loops seen from the origin.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Closure tolerance for the first and last points of a loop.
const CLOSURE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ParameterPath {
    points: Vec<Vec<f64>>,
    times: Vec<f64>,
    closed: bool,
}

impl ParameterPath {
    pub fn new(points: Vec<Vec<f64>>, times: Vec<f64>, closed: bool) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPath(format!(
                "need at least 2 points, got {}",
                points.len()
            )));
        }
        if times.len() != points.len() {
            return Err(Error::InvalidPath(format!(
                "{} points but {} time stamps",
                points.len(),
                times.len()
            )));
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::InvalidPath(
                "points must have at least one coordinate".into(),
            ));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: p.len(),
            });
        }
        if points
            .iter()
            .flatten()
            .chain(&times)
            .any(|x| !x.is_finite())
        {
            return Err(Error::NonFinite("path"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidPath(
                "times must be strictly increasing".into(),
            ));
        }
        if closed {
            let gap = distance(&points[0], &points[points.len() - 1]);
            if gap > CLOSURE_TOL {
                return Err(Error::InvalidPath(format!(
                    "closed path endpoints differ by {gap:.3e}"
                )));
            }
        }
        Ok(Self {
            points,
            times,
            closed,
        })
    }

    /// Closed loop through `points` (the first point is repeated at the end
    /// if needed) with uniform times on `[0, 1]`.
    pub fn closed_from_points(mut points: Vec<Vec<f64>>) -> Result<Self> {
        if let (Some(first), Some(last)) = (points.first(), points.last()) {
            if distance(first, last) > CLOSURE_TOL {
                points.push(first.clone());
            } else {
                let first = first.clone();
                *points.last_mut().expect("non-empty") = first;
            }
        }
        let n = points.len();
        let times = uniform_times(n);
        Self::new(points, times, true)
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of parameter coordinates per point.
    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn segments(&self) -> usize {
        self.points.len() - 1
    }

    pub fn arc_length(&self) -> f64 {
        self.points.windows(2).map(|w| distance(&w[0], &w[1])).sum()
    }

    /// Same curve traversed backwards; times are mirrored onto the same span.
    pub fn reversed(&self) -> Self {
        let (t0, t1) = (self.times[0], self.times[self.times.len() - 1]);
        Self {
            points: self.points.iter().rev().cloned().collect(),
            times: self.times.iter().rev().map(|t| t0 + t1 - t).collect(),
            closed: self.closed,
        }
    }

    /// Inserts `factor - 1` evenly spaced points inside every segment.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        if factor < 2 {
            return Err(Error::InvalidArgument(format!(
                "refinement factor must be >= 2, got {factor}"
            )));
        }
        let mut points = Vec::with_capacity(self.segments() * factor + 1);
        let mut times = Vec::with_capacity(points.capacity());
        for i in 0..self.segments() {
            let (a, b) = (&self.points[i], &self.points[i + 1]);
            let (ta, tb) = (self.times[i], self.times[i + 1]);
            points.push(a.clone());
            times.push(ta);
            for j in 1..factor {
                let s = j as f64 / factor as f64;
                points.push(lerp(a, b, s));
                times.push(ta + s * (tb - ta));
            }
        }
        points.push(self.points[self.points.len() - 1].clone());
        times.push(self.times[self.times.len() - 1]);
        Ok(Self {
            points,
            times,
            closed: self.closed,
        })
    }

    /// Loop followed by `other`, both closed at the same base point.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if !(self.closed && other.closed) {
            return Err(Error::InvalidPath(
                "only closed loops can be concatenated".into(),
            ));
        }
        if distance(&self.points[0], &other.points[0]) > CLOSURE_TOL {
            return Err(Error::InvalidPath("loops do not share a base point".into()));
        }
        let mut points = self.points.clone();
        points.extend(other.points.iter().skip(1).cloned());
        Self::closed_from_points(points)
    }

    /// The loop traversed `k` times.
    pub fn repeat(&self, k: usize) -> Result<Self> {
        let mut out = self.clone();
        for _ in 1..k {
            out = out.concat(self)?;
        }
        Ok(out)
    }

    /// Position at path time `t`, by linear interpolation between samples.
    /// Times outside the span are clamped.
    pub fn point_at(&self, t: f64) -> Vec<f64> {
        let n = self.times.len();
        if t <= self.times[0] {
            return self.points[0].clone();
        }
        if t >= self.times[n - 1] {
            return self.points[n - 1].clone();
        }
        let i = self.times.partition_point(|&x| x <= t) - 1;
        let s = (t - self.times[i]) / (self.times[i + 1] - self.times[i]);
        lerp(&self.points[i], &self.points[i + 1], s)
    }
}

/// Closed loop at constant `radius` and polar angle `theta` in R³,
/// `n` segments with `φᵢ = 2πi/n` and `tᵢ = i/n`.
pub fn circle_loop(radius: f64, theta: f64, n: usize) -> Result<ParameterPath> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "circle needs n >= 3 segments, got {n}"
        )));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::ChartSingularity(format!(
            "theta = {theta} outside (0, pi)"
        )));
    }
    let mut points: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            from_spherical(&SphericalPoint {
                radius,
                theta,
                phi: TAU * i as f64 / n as f64,
            })
            .to_vec()
        })
        .collect();
    points.push(points[0].clone());
    ParameterPath::new(points, uniform_times(n + 1), true)
}

/// Closed circle `center + radius (cos φ u + sin φ v)` in any dimension.
/// `u` and `v` should be orthonormal.
pub fn circle_in_plane(
    center: &[f64],
    u: &[f64],
    v: &[f64],
    radius: f64,
    n: usize,
) -> Result<ParameterPath> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "circle needs n >= 3 segments, got {n}"
        )));
    }
    if u.len() != center.len() || v.len() != center.len() {
        return Err(Error::DimensionMismatch {
            expected: center.len(),
            actual: u.len().min(v.len()),
        });
    }
    let mut points: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let (s, c) = (TAU * i as f64 / n as f64).sin_cos();
            (0..center.len())
                .map(|k| center[k] + radius * (c * u[k] + s * v[k]))
                .collect()
        })
        .collect();
    points.push(points[0].clone());
    ParameterPath::new(points, uniform_times(n + 1), true)
}

/// Degenerate loop sitting at one point for `n` steps.
pub fn constant_loop(point: &[f64], n: usize) -> Result<ParameterPath> {
    ParameterPath::new(vec![point.to_vec(); n + 1], uniform_times(n + 1), true)
}

fn uniform_times(n: usize) -> Vec<f64> {
    let last = (n - 1).max(1) as f64;
    (0..n).map(|i| i as f64 / last).collect()
}

fn lerp(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Point of R³ in spherical coordinates, off the polar axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphericalPoint {
    pub radius: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SphericalPoint {
    /// `∂λ/∂θ` and `∂λ/∂φ` at this point.
    pub fn tangents(&self) -> ([f64; 3], [f64; 3]) {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        let r = self.radius;
        (
            [r * ct * cp, r * ct * sp, -r * st],
            [-r * st * sp, r * st * cp, 0.0],
        )
    }

    /// Unit radial direction.
    pub fn radial(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Standard spherical coordinates; `φ` is reported in `(-π, π]`.
pub fn to_spherical(point: &[f64]) -> Result<SphericalPoint> {
    if point.len() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            actual: point.len(),
        });
    }
    let [x, y, z] = [point[0], point[1], point[2]];
    let radius = (x * x + y * y + z * z).sqrt();
    let rho = x.hypot(y);
    if radius == 0.0 || rho <= 1e-12 * radius {
        return Err(Error::ChartSingularity(format!(
            "point ({x}, {y}, {z}) lies on the polar axis"
        )));
    }
    Ok(SphericalPoint {
        radius,
        theta: rho.atan2(z),
        phi: y.atan2(x),
    })
}

pub fn from_spherical(p: &SphericalPoint) -> [f64; 3] {
    let (st, ct) = p.theta.sin_cos();
    let (sp, cp) = p.phi.sin_cos();
    [p.radius * st * cp, p.radius * st * sp, p.radius * ct]
}

/// Signed solid angle subtended at the origin by a closed loop in R³.
///
/// Sum of signed spherical-triangle areas (north pole, pᵢ, pᵢ₊₁). Loops
/// circling the north pole counterclockwise seen from above are positive.
/// Totals beyond ±2π are wrapped back by multiples of 4π.
pub fn solid_angle(path: &ParameterPath) -> Result<f64> {
    if !path.is_closed() {
        return Err(Error::InvalidPath("solid angle needs a closed loop".into()));
    }
    if path.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            actual: path.dim(),
        });
    }
    let mut units = Vec::with_capacity(path.len());
    for p in path.points() {
        let s = to_spherical(p)?;
        units.push(s.radial());
    }
    let north = [0.0, 0.0, 1.0];
    let mut total = 0.0;
    for w in units.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if distance(a, b) == 0.0 {
            return Err(Error::InvalidPath("zero-length segment".into()));
        }
        let num = dot(&north, &cross(a, b));
        let den = 1.0 + dot(&north, a) + dot(&north, b) + dot(a, b);
        total += 2.0 * num.atan2(den);
    }
    Ok(wrap_solid_angle(total))
}

fn wrap_solid_angle(x: f64) -> f64 {
    const SLACK: f64 = 1e-9;
    let mut x = x;
    while x > TAU + SLACK {
        x -= 2.0 * TAU;
    }
    while x < -TAU - SLACK {
        x += 2.0 * TAU;
    }
    x
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

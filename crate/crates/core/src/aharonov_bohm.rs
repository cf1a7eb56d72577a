//! Aharonov–Bohm phases: time-dependent scalar potentials on two beams
//! (electric) and a finite-radius flux tube in the plane (magnetic).

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre_interval, simpson};

pub type Point2 = [f64; 2];

/// Pulses must return to zero at both ends to this tolerance.
const PULSE_END_TOL: f64 = 1e-9;
const ON_CONTOUR_TOL: f64 = 1e-12;
const WINDING_ROUNDING_TOL: f64 = 1e-9;
const SEGMENT_QUAD_TOL: f64 = 1e-14;
const SEGMENT_MAX_DEPTH: usize = 40;

/// A sampled potential `A₀(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sampled {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl Sampled {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                actual: values.len(),
            });
        }
        if times.len() < 3 {
            return Err(Error::InvalidArgument(
                "a pulse needs at least three samples".into(),
            ));
        }
        if times.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("pulse samples"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "pulse times must be strictly increasing".into(),
            ));
        }
        Ok(Self { times, values })
    }

    pub fn from_fn(times: &[f64], f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(times.to_vec(), times.iter().map(|&t| f(t)).collect())
    }

    pub fn integral(&self) -> f64 {
        simpson(&self.times, &self.values).expect("grid validated on construction")
    }
}

/// Scalar potentials applied to the upper and lower beam while they are
/// shielded, on a shared time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PulsePair {
    upper: Sampled,
    lower: Sampled,
    charge: f64,
}

impl PulsePair {
    pub fn new(upper: Sampled, lower: Sampled, charge: f64) -> Result<Self> {
        if upper.times != lower.times {
            return Err(Error::InvalidArgument(
                "upper and lower pulses must share one time grid".into(),
            ));
        }
        if !charge.is_finite() {
            return Err(Error::NonFinite("charge"));
        }
        for (name, pulse) in [("upper", &upper), ("lower", &lower)] {
            let (first, last) = (pulse.values[0], pulse.values[pulse.values.len() - 1]);
            if first.abs() > PULSE_END_TOL || last.abs() > PULSE_END_TOL {
                return Err(Error::InvalidArgument(format!(
                    "{name} pulse must vanish at both ends (got {first:e}, {last:e})"
                )));
            }
        }
        Ok(Self {
            upper,
            lower,
            charge,
        })
    }

    pub fn upper(&self) -> &Sampled {
        &self.upper
    }

    pub fn lower(&self) -> &Sampled {
        &self.lower
    }

    pub fn charge(&self) -> f64 {
        self.charge
    }

    pub fn times(&self) -> &[f64] {
        &self.upper.times
    }
}

/// `e(∫A₀_lower − ∫A₀_upper) dt`: the closed contour runs forward along the
/// lower beam and back along the upper one.
pub fn electric_ab_phase(pulses: &PulsePair) -> f64 {
    pulses.charge * (pulses.lower.integral() - pulses.upper.integral())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InteriorProfile {
    /// Uniform field inside the tube.
    Uniform,
    /// Field `∝ (1 − ρ²/R²)²`, vanishing smoothly at the wall.
    Bump,
}

/// Straight flux tube along the out-of-plane axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolenoidProfile {
    radius: f64,
    flux: f64,
    center: Point2,
    interior: InteriorProfile,
}

impl SolenoidProfile {
    pub fn new(radius: f64, flux: f64, center: Point2, interior: InteriorProfile) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "solenoid radius must be positive, got {radius}"
            )));
        }
        if !flux.is_finite() || center.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("solenoid"));
        }
        Ok(Self {
            radius,
            flux,
            center,
            interior,
        })
    }

    pub fn uniform(radius: f64, flux: f64, center: Point2) -> Result<Self> {
        Self::new(radius, flux, center, InteriorProfile::Uniform)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn flux(&self) -> f64 {
        self.flux
    }

    pub fn center(&self) -> Point2 {
        self.center
    }

    pub fn interior(&self) -> InteriorProfile {
        self.interior
    }

    /// Flux through the disk of radius `rho` about the axis.
    pub fn enclosed_flux(&self, rho: f64) -> f64 {
        let u2 = (rho / self.radius).powi(2);
        if u2 >= 1.0 {
            return self.flux;
        }
        match self.interior {
            InteriorProfile::Uniform => self.flux * u2,
            InteriorProfile::Bump => self.flux * (1.0 - (1.0 - u2).powi(3)),
        }
    }

    /// Out-of-plane field strength.
    pub fn field(&self, x: Point2) -> f64 {
        let u2 = ((x[0] - self.center[0]).powi(2) + (x[1] - self.center[1]).powi(2))
            / self.radius.powi(2);
        if u2 >= 1.0 {
            return 0.0;
        }
        let area = PI * self.radius * self.radius;
        match self.interior {
            InteriorProfile::Uniform => self.flux / area,
            InteriorProfile::Bump => 3.0 * self.flux * (1.0 - u2).powi(2) / area,
        }
    }
}

/// Azimuthal potential `A = Φ(ρ)/(2πρ) e_φ`; zero on the axis.
pub fn solenoid_vector_potential(s: &SolenoidProfile, x: Point2) -> Point2 {
    let (dx, dy) = (x[0] - s.center[0], x[1] - s.center[1]);
    let rho2 = dx * dx + dy * dy;
    if rho2 == 0.0 {
        return [0.0, 0.0];
    }
    let k = s.enclosed_flux(rho2.sqrt()) / (TAU * rho2);
    [-k * dy, k * dx]
}

/// Closed polyline; the last vertex repeats the first.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarContour {
    vertices: Vec<Point2>,
}

impl PlanarContour {
    pub fn new(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidPath(
                "a contour needs at least two segments".into(),
            ));
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("contour vertices"));
        }
        let (a, b) = (vertices[0], vertices[vertices.len() - 1]);
        if dist(a, b) > 1e-12 * (1.0 + a[0].abs().max(a[1].abs())) {
            return Err(Error::InvalidPath("contour is not closed".into()));
        }
        Ok(Self { vertices })
    }

    /// Closes `vertices` by repeating the first one.
    pub fn polygon(mut vertices: Vec<Point2>) -> Result<Self> {
        if let Some(&first) = vertices.first() {
            vertices.push(first);
        }
        Self::new(vertices)
    }

    /// `n` vertices per turn; negative `turns` run clockwise.
    pub fn circle(center: Point2, radius: f64, n: usize, turns: i32) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) || n < 3 || turns == 0 {
            return Err(Error::InvalidPath(format!(
                "bad circle (radius {radius}, n {n}, turns {turns})"
            )));
        }
        let total = n * turns.unsigned_abs() as usize;
        let sign = f64::from(turns.signum());
        let mut vertices: Vec<Point2> = (0..total)
            .map(|i| {
                let a = sign * TAU * (i % n) as f64 / n as f64;
                [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
            })
            .collect();
        vertices.push(vertices[0]);
        Self::new(vertices)
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    /// Whether any two non-adjacent segments touch or overlap.
    pub fn is_self_intersecting(&self) -> bool {
        let segs: Vec<_> = self.segments().collect();
        let n = segs.len();
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    if collinear_overlap(segs[i], segs[j]) {
                        return true;
                    }
                } else if segments_touch(segs[i], segs[j]) {
                    return true;
                }
            }
        }
        false
    }
}

fn dist(a: Point2, b: Point2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn point_segment_distance(p: Point2, (a, b): (Point2, Point2)) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    if len2 == 0.0 {
        return dist(p, a);
    }
    let s = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0);
    dist(p, [a[0] + s * d[0], a[1] + s * d[1]])
}

fn on_segment(p: Point2, s: (Point2, Point2), scale: f64) -> bool {
    point_segment_distance(p, s) <= ON_CONTOUR_TOL * scale
}

fn segments_touch(s: (Point2, Point2), t: (Point2, Point2)) -> bool {
    let scale = 1.0 + dist(s.0, s.1).max(dist(t.0, t.1));
    let d1 = cross(t.0, t.1, s.0);
    let d2 = cross(t.0, t.1, s.1);
    let d3 = cross(s.0, s.1, t.0);
    let d4 = cross(s.0, s.1, t.1);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    on_segment(s.0, t, scale)
        || on_segment(s.1, t, scale)
        || on_segment(t.0, s, scale)
        || on_segment(t.1, s, scale)
}

/// Adjacent segments share an endpoint; they overlap only if one folds back.
fn collinear_overlap(s: (Point2, Point2), t: (Point2, Point2)) -> bool {
    let scale = 1.0 + dist(s.0, s.1).max(dist(t.0, t.1));
    let (shared, s_far, t_far) = if dist(s.1, t.0) <= ON_CONTOUR_TOL * scale {
        (s.1, s.0, t.1)
    } else {
        (s.0, s.1, t.0)
    };
    on_segment(t_far, (shared, s_far), scale) && dist(t_far, shared) > ON_CONTOUR_TOL * scale
        || on_segment(s_far, (shared, t_far), scale) && dist(s_far, shared) > ON_CONTOUR_TOL * scale
}

/// Signed number of turns of `gamma` about `p`.
pub fn winding_number(gamma: &PlanarContour, p: Point2) -> Result<i64> {
    let mut total = 0.0;
    for (a, b) in gamma.segments() {
        if point_segment_distance(p, (a, b)) <= ON_CONTOUR_TOL {
            return Err(Error::InvalidArgument(format!(
                "point ({}, {}) lies on the contour",
                p[0], p[1]
            )));
        }
        let u = [a[0] - p[0], a[1] - p[1]];
        let v = [b[0] - p[0], b[1] - p[1]];
        total += (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1]);
    }
    let turns = total / TAU;
    let rounded = turns.round();
    if (turns - rounded).abs() > WINDING_ROUNDING_TOL {
        return Err(Error::InvalidArgument(format!(
            "winding {turns} is not an integer"
        )));
    }
    Ok(rounded as i64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MagneticPhase {
    pub phase: f64,
    /// Some segment passes through the tube; the result is then not
    /// quantized in units of `eΦ`.
    pub crosses_tube: bool,
}

/// `e∮A·dl` over the contour.
pub fn magnetic_ab_phase(s: &SolenoidProfile, gamma: &PlanarContour, charge: f64) -> MagneticPhase {
    let crosses_tube = gamma
        .segments()
        .any(|seg| point_segment_distance(s.center, seg) < s.radius);
    MagneticPhase {
        phase: magnetic_ab_phase_with(|x| solenoid_vector_potential(s, x), gamma, charge),
        crosses_tube,
    }
}

/// `e∮A·dl` for an arbitrary potential, by 5-point Gauss–Legendre on each
/// segment, bisected until the two levels agree.
pub fn magnetic_ab_phase_with(
    potential: impl Fn(Point2) -> Point2,
    gamma: &PlanarContour,
    charge: f64,
) -> f64 {
    let rule = gauss_legendre_interval(5, 0.0, 1.0);
    let gauss = |a: Point2, b: Point2| -> f64 {
        let d = [b[0] - a[0], b[1] - a[1]];
        rule.iter()
            .map(|&(s, w)| {
                let pot = potential([a[0] + s * d[0], a[1] + s * d[1]]);
                w * (pot[0] * d[0] + pot[1] * d[1])
            })
            .sum()
    };
    fn adaptive(
        gauss: &impl Fn(Point2, Point2) -> f64,
        a: Point2,
        b: Point2,
        whole: f64,
        depth: usize,
    ) -> f64 {
        let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        let (left, right) = (gauss(a, m), gauss(m, b));
        if depth == 0 || (left + right - whole).abs() <= SEGMENT_QUAD_TOL * (1.0 + whole.abs()) {
            return left + right;
        }
        adaptive(gauss, a, m, left, depth - 1) + adaptive(gauss, m, b, right, depth - 1)
    }
    let total: f64 = gamma
        .segments()
        .map(|(a, b)| adaptive(&gauss, a, b, gauss(a, b), SEGMENT_MAX_DEPTH))
        .sum();
    charge * total
}

/// Flux of the tube field through the region bounded by `gamma`, weighted
/// by winding number, from a triangulated polar mesh of the tube disk with
/// `mesh` rings and `mesh` sectors (centroid rule per triangle).
pub fn magnetic_flux_surface(
    s: &SolenoidProfile,
    gamma: &PlanarContour,
    mesh: usize,
) -> Result<f64> {
    if mesh < 2 {
        return Err(Error::InvalidArgument(
            "flux mesh needs at least 2 rings".into(),
        ));
    }
    if gamma.is_self_intersecting() {
        return Err(Error::InvalidPath(
            "self-intersecting contour bounds no surface".into(),
        ));
    }
    let disk_clear = gamma
        .segments()
        .all(|seg| point_segment_distance(s.center, seg) > s.radius);
    let constant_winding = if disk_clear {
        Some(winding_number(gamma, s.center)? as f64)
    } else {
        None
    };
    if constant_winding == Some(0.0) {
        return Ok(0.0);
    }
    let weight = |p: Point2| -> Result<f64> {
        match constant_winding {
            Some(w) => Ok(w),
            None => Ok(winding_number(gamma, p).map(|w| w as f64).unwrap_or(0.0)),
        }
    };
    let c = s.center;
    let at = |ring: usize, sector: usize| -> Point2 {
        let r = s.radius * ring as f64 / mesh as f64;
        let a = TAU * sector as f64 / mesh as f64;
        [c[0] + r * a.cos(), c[1] + r * a.sin()]
    };
    let mut total = 0.0;
    let mut triangle = |p: Point2, q: Point2, r: Point2| -> Result<()> {
        let area = 0.5 * cross(p, q, r).abs();
        let centroid = [(p[0] + q[0] + r[0]) / 3.0, (p[1] + q[1] + r[1]) / 3.0];
        total += area * s.field(centroid) * weight(centroid)?;
        Ok(())
    };
    for j in 0..mesh {
        triangle(c, at(1, j), at(1, j + 1))?;
    }
    for i in 1..mesh {
        for j in 0..mesh {
            let (p00, p01, p10, p11) = (at(i, j), at(i, j + 1), at(i + 1, j), at(i + 1, j + 1));
            triangle(p00, p10, p11)?;
            triangle(p00, p11, p01)?;
        }
    }
    Ok(total)
}

/// Two-beam interference intensity `(1 + cos Θ)/2`.
pub fn fringe_intensity(theta: f64) -> f64 {
    0.5 * (1.0 + theta.cos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(n: usize, t0: f64) -> Vec<f64> {
        (0..=n).map(|i| t0 * i as f64 / n as f64).collect()
    }

    /// Independent oracle: adaptive Simpson on the exact function.
    fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn rec(
            f: &impl Fn(f64) -> f64,
            a: f64,
            b: f64,
            fa: f64,
            fm: f64,
            fb: f64,
            whole: f64,
            tol: f64,
            d: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if d == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, d - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, d - 1)
        }
        let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
        rec(
            f,
            a,
            b,
            fa,
            fm,
            fb,
            (b - a) / 6.0 * (fa + 4.0 * fm + fb),
            tol,
            50,
        )
    }

    fn zero_pulse(t: &[f64]) -> Sampled {
        Sampled::from_fn(t, |_| 0.0).unwrap()
    }

    #[test]
    fn rectangle_pulse() {
        let t = grid(1000, 1.0);
        // Jumps sampled at the mean of the one-sided limits.
        let lower = Sampled::from_fn(&t, |x| {
            if (x - 0.2).abs() < 1e-12 || (x - 0.8).abs() < 1e-12 {
                0.5
            } else if x > 0.2 && x < 0.8 {
                1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let p = PulsePair::new(zero_pulse(&t), lower.clone(), 1.0).unwrap();
        assert!((electric_ab_phase(&p) - 0.6).abs() < 1e-12);
        let p2 = PulsePair::new(zero_pulse(&t), lower, 2.0).unwrap();
        assert!((electric_ab_phase(&p2) - 2.0 * electric_ab_phase(&p)).abs() < 1e-15);
    }

    #[test]
    fn smooth_pulses_match_oracle() {
        let t0 = 3.0;
        let upper = |t: f64| 0.7 * (PI * t / t0).sin().powi(2);
        let lower = |t: f64| (t * (t0 - t)).powi(2) * (-(t - 1.0).powi(2)).exp();
        let t = grid(2000, t0);
        let p = PulsePair::new(
            Sampled::from_fn(&t, upper).unwrap(),
            Sampled::from_fn(&t, lower).unwrap(),
            1.3,
        )
        .unwrap();
        let oracle = 1.3
            * (adaptive_simpson(&lower, 0.0, t0, 1e-13) - adaptive_simpson(&upper, 0.0, t0, 1e-13));
        assert!((electric_ab_phase(&p) - oracle).abs() <= 1e-8);
        // ∫ 0.7 sin² over a full period is 0.35·t0.
        assert!((p.upper().integral() - 0.35 * t0).abs() <= 1e-8);
    }

    #[test]
    fn pulse_validation() {
        let t = grid(10, 1.0);
        let short = grid(12, 1.0);
        assert!(PulsePair::new(zero_pulse(&t), zero_pulse(&short), 1.0).is_err());
        let open = Sampled::from_fn(&t, |x| x).unwrap();
        assert!(PulsePair::new(zero_pulse(&t), open, 1.0).is_err());
        assert!(Sampled::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0]).is_err());
        assert!(Sampled::new(vec![0.0, 1.0, 1.0], vec![0.0; 3]).is_err());
    }

    #[test]
    fn electric_gauge_shift() {
        let t0 = 2.0;
        let t = grid(4000, t0);
        let base = |t: f64| (PI * t / t0).sin().powi(2);
        // ȧ on each beam; both integrate to zero, so a(0) = a(t0) on each.
        let a_dot_lower =
            |t: f64| 0.8 * (TAU * t / t0).sin() * (TAU / t0) * (PI * t / t0).sin().powi(2);
        let a_dot_upper = |t: f64| -1.1 * (2.0 * TAU * t / t0).sin() * (PI * t / t0).sin().powi(2);
        let plain =
            PulsePair::new(zero_pulse(&t), Sampled::from_fn(&t, base).unwrap(), 1.0).unwrap();
        let shifted = PulsePair::new(
            Sampled::from_fn(&t, a_dot_upper).unwrap(),
            Sampled::from_fn(&t, |x| base(x) + a_dot_lower(x)).unwrap(),
            1.0,
        )
        .unwrap();
        assert!((electric_ab_phase(&shifted) - electric_ab_phase(&plain)).abs() <= 1e-10);
    }

    fn tube() -> SolenoidProfile {
        SolenoidProfile::uniform(0.1, 1.7, [0.0, 0.0]).unwrap()
    }

    #[test]
    fn potential_magnitude_and_axis() {
        let s = SolenoidProfile::uniform(0.1, TAU, [0.0, 0.0]).unwrap();
        let a = solenoid_vector_potential(&s, [1.0, 0.0]);
        assert!((a[0]).abs() < 1e-15 && (a[1] - 1.0).abs() < 1e-15);
        assert_eq!(solenoid_vector_potential(&s, [0.0, 0.0]), [0.0, 0.0]);
        let inside = solenoid_vector_potential(&s, [0.05, 0.0]);
        assert!((inside[1] - TAU * 0.05 / (TAU * 0.01)).abs() < 1e-12);
        let c = PlanarContour::circle([0.0, 0.0], 1.0, 64, 1).unwrap();
        assert!((magnetic_ab_phase(&s, &c, 1.0).phase - TAU).abs() <= 1e-10);
    }

    #[test]
    fn potential_is_continuous_at_the_wall() {
        for profile in [InteriorProfile::Uniform, InteriorProfile::Bump] {
            let s = SolenoidProfile::new(0.3, 2.0, [0.1, -0.2], profile).unwrap();
            let a = solenoid_vector_potential(&s, [0.4 - 1e-12, -0.2]);
            let b = solenoid_vector_potential(&s, [0.4 + 1e-12, -0.2]);
            assert!((a[1] - b[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn curl_vanishes_outside_and_matches_field_inside() {
        for profile in [InteriorProfile::Uniform, InteriorProfile::Bump] {
            let s = SolenoidProfile::new(0.2, 1.7, [0.3, 0.1], profile).unwrap();
            let h = 1e-4;
            // Fourth-order central differences.
            let d = |f: &dyn Fn(f64) -> f64, x: f64| {
                (8.0 * (f(x + h) - f(x - h)) - (f(x + 2.0 * h) - f(x - 2.0 * h))) / (12.0 * h)
            };
            let curl = |x: Point2| {
                d(&|u| solenoid_vector_potential(&s, [u, x[1]])[1], x[0])
                    - d(&|v| solenoid_vector_potential(&s, [x[0], v])[0], x[1])
            };
            for x in [[1.0, 0.0], [0.3, 0.5], [-0.4, -0.7], [0.55, 0.1]] {
                assert!(curl(x).abs() <= 1e-8, "{profile:?} {x:?} {}", curl(x));
            }
            for x in [[0.35, 0.12], [0.3, 0.2], [0.2, 0.05]] {
                assert!((curl(x) - s.field(x)).abs() <= 1e-5 * (1.0 + s.field(x)));
            }
        }
    }

    #[test]
    fn enclosing_contour_gives_flux() {
        let c = PlanarContour::polygon(vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
            .unwrap();
        let r = magnetic_ab_phase(&tube(), &c, 1.0);
        assert!((r.phase - 1.7).abs() <= 1e-6, "{}", r.phase);
        assert!(!r.crosses_tube);
    }

    #[test]
    fn quantization_over_windings() {
        let s = tube();
        for turns in [-1, 1, 2, 3] {
            let c = PlanarContour::circle([0.2, -0.1], 0.6, 40, turns).unwrap();
            let w = winding_number(&c, s.center()).unwrap();
            assert_eq!(w, i64::from(turns));
            let phase = magnetic_ab_phase(&s, &c, 1.0).phase;
            assert!((phase - 1.7 * w as f64).abs() <= 1e-6);
        }
        let away = PlanarContour::circle([2.0, 2.0], 0.5, 17, 1).unwrap();
        assert!(magnetic_ab_phase(&s, &away, 1.0).phase.abs() <= 1e-6);
    }

    #[test]
    fn non_convex_contours_are_quantized() {
        let s = tube();
        let star: Vec<Point2> = (0..10)
            .map(|i| {
                let r = if i % 2 == 0 { 1.0 } else { 0.25 };
                let a = TAU * i as f64 / 10.0 + 0.1;
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        let c = PlanarContour::polygon(star).unwrap();
        assert!((magnetic_ab_phase(&s, &c, 1.0).phase - 1.7).abs() <= 1e-6);
        // A "C" that wraps around the tube without enclosing it.
        let c_shape = PlanarContour::polygon(vec![
            [0.3, -0.5],
            [0.3, -0.3],
            [-0.3, -0.3],
            [-0.3, 0.3],
            [0.3, 0.3],
            [0.3, 0.5],
            [-0.5, 0.5],
            [-0.5, -0.5],
        ])
        .unwrap();
        assert_eq!(winding_number(&c_shape, s.center()).unwrap(), 0);
        assert!(magnetic_ab_phase(&s, &c_shape, 1.0).phase.abs() <= 1e-6);
    }

    #[test]
    fn crossing_the_tube_is_flagged() {
        let s = tube();
        let c = PlanarContour::polygon(vec![[0.05, -1.0], [1.0, -1.0], [1.0, 1.0], [0.05, 1.0]])
            .unwrap();
        let r = magnetic_ab_phase(&s, &c, 1.0);
        assert!(r.crosses_tube);
        assert!(r.phase > 0.0 && r.phase < 1.7);
    }

    #[test]
    fn shrinking_contours_lose_their_phase() {
        let s = tube();
        for r in [0.5, 0.1, 0.01] {
            let c = PlanarContour::circle([1.2, 0.4], r, 32, 1).unwrap();
            assert!(magnetic_ab_phase(&s, &c, 1.0).phase.abs() <= 1e-8);
        }
    }

    #[test]
    fn interior_profile_does_not_matter_outside() {
        let bump = SolenoidProfile::new(0.1, 1.7, [0.0, 0.0], InteriorProfile::Bump).unwrap();
        for c in [
            PlanarContour::circle([0.2, -0.1], 0.6, 40, 1).unwrap(),
            PlanarContour::circle([0.2, -0.1], 0.6, 40, 2).unwrap(),
            PlanarContour::circle([1.0, 1.0], 0.3, 40, 1).unwrap(),
        ] {
            let a = magnetic_ab_phase(&tube(), &c, 1.0).phase;
            let b = magnetic_ab_phase(&bump, &c, 1.0).phase;
            assert!((a - b).abs() <= 1e-6);
        }
    }

    #[test]
    fn gradient_shift_leaves_phase_unchanged() {
        let s = tube();
        let c = PlanarContour::circle([0.1, 0.0], 0.8, 50, 1).unwrap();
        // a = 0.35 sin 2x sin y + 0.2xy − 0.1 cos 3y
        let grad_a = |x: Point2| -> Point2 {
            [
                0.7 * (2.0 * x[0]).cos() * x[1].sin() + 0.2 * x[1],
                0.35 * (2.0 * x[0]).sin() * x[1].cos() + 0.2 * x[0] + 0.3 * (3.0 * x[1]).sin(),
            ]
        };
        let plain = magnetic_ab_phase(&s, &c, 1.0).phase;
        let shifted = magnetic_ab_phase_with(
            |x| {
                let a = solenoid_vector_potential(&s, x);
                let g = grad_a(x);
                [a[0] + g[0], a[1] + g[1]]
            },
            &c,
            1.0,
        );
        assert!((plain - shifted).abs() <= 1e-8, "{}", plain - shifted);
    }

    #[test]
    fn surface_flux_matches_line_integral() {
        for profile in [InteriorProfile::Uniform, InteriorProfile::Bump] {
            let s = SolenoidProfile::new(0.1, 1.7, [0.0, 0.0], profile).unwrap();
            let c = PlanarContour::circle([0.2, -0.1], 0.6, 40, 1).unwrap();
            let flux = magnetic_flux_surface(&s, &c, 512).unwrap();
            assert!((flux - 1.7).abs() / 1.7 <= 1e-3, "{flux}");
            let line = magnetic_ab_phase(&s, &c, 1.0).phase;
            assert!((flux - line).abs() / line.abs() <= 1e-3);
            let away = PlanarContour::circle([2.0, 0.0], 0.5, 40, 1).unwrap();
            assert!(magnetic_flux_surface(&s, &away, 64).unwrap().abs() <= 1e-6);
        }
    }

    #[test]
    fn surface_flux_converges_when_contour_cuts_the_tube() {
        let s = tube();
        let c =
            PlanarContour::polygon(vec![[0.0, -1.0], [1.0, -1.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let line = magnetic_ab_phase(&s, &c, 1.0).phase;
        assert!((line - 0.85).abs() < 1e-6);
        let coarse = (magnetic_flux_surface(&s, &c, 32).unwrap() - line).abs();
        let fine = (magnetic_flux_surface(&s, &c, 128).unwrap() - line).abs();
        assert!(fine < coarse && fine / line <= 1e-2, "{coarse} {fine}");
    }

    #[test]
    fn surface_of_self_intersecting_contour_is_an_error() {
        let twice = PlanarContour::circle([0.0, 0.0], 1.0, 16, 2).unwrap();
        assert!(matches!(
            magnetic_flux_surface(&tube(), &twice, 16),
            Err(Error::InvalidPath(_))
        ));
        let bowtie =
            PlanarContour::polygon(vec![[-1.0, -1.0], [1.0, 1.0], [1.0, -1.0], [-1.0, 1.0]])
                .unwrap();
        assert!(bowtie.is_self_intersecting());
        let square =
            PlanarContour::polygon(vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
                .unwrap();
        assert!(!square.is_self_intersecting());
    }

    #[test]
    fn winding_examples() {
        let unit = PlanarContour::circle([0.0, 0.0], 1.0, 100, 1).unwrap();
        assert_eq!(winding_number(&unit, [0.0, 0.0]).unwrap(), 1);
        assert_eq!(winding_number(&unit, [3.0, 0.0]).unwrap(), 0);
        let twice = PlanarContour::circle([0.0, 0.0], 1.0, 100, 2).unwrap();
        assert_eq!(winding_number(&twice, [0.1, 0.2]).unwrap(), 2);
        assert!(winding_number(&unit, [1.0, 0.0]).is_err());
    }

    #[test]
    fn contour_validation() {
        assert!(PlanarContour::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]).is_err());
        assert!(PlanarContour::circle([0.0, 0.0], 1.0, 10, 0).is_err());
        assert!(SolenoidProfile::uniform(0.0, 1.0, [0.0, 0.0]).is_err());
    }

    #[test]
    fn fringe_examples() {
        assert_eq!(fringe_intensity(0.0), 1.0);
        assert!(fringe_intensity(PI).abs() < 1e-16);
        assert!((fringe_intensity(PI / 2.0) - 0.5).abs() < 1e-16);
    }

    proptest! {
        #[test]
        fn fringe_is_even_and_periodic(theta in -50.0f64..50.0) {
            prop_assert_eq!(fringe_intensity(theta), fringe_intensity(-theta));
            // θ + 2π is itself rounded, so periodicity holds to that rounding.
            prop_assert!((fringe_intensity(theta + TAU) - fringe_intensity(theta)).abs() <= 1e-14);
            let f = fringe_intensity(theta);
            prop_assert!((0.0..=1.0).contains(&f));
        }

        #[test]
        fn random_circles_are_quantized(
            cx in -2.0f64..2.0, cy in -2.0f64..2.0, r in 0.2f64..3.0, turns in -2i32..=2, n in 8usize..60,
        ) {
            prop_assume!(turns != 0);
            let s = tube();
            let c = PlanarContour::circle([cx, cy], r, n, turns).unwrap();
            let min_dist = c.segments().map(|seg| point_segment_distance(s.center(), seg)).fold(f64::INFINITY, f64::min);
            prop_assume!(min_dist > s.radius());
            let w = winding_number(&c, s.center()).unwrap();
            prop_assert!((magnetic_ab_phase(&s, &c, 1.0).phase - 1.7 * w as f64).abs() <= 1e-6);
        }
    }
}

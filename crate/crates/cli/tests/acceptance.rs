//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, PI, TAU};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use geophase_cli::{parse_config, run, RunOptions};
use geophase_core::adiabatic::{extract_geometric_phase, wrap_phase, DriveSchedule};
use geophase_core::aharonov_bohm::{
    electric_ab_phase, magnetic_ab_phase, magnetic_flux_surface, InteriorProfile, PlanarContour,
    PulsePair, Sampled, SolenoidProfile,
};
use geophase_core::berry::{
    berry_phase_line, berry_phase_surface, connection_fd, curvature_fd, FiniteDifference,
    LineOptions, SurfaceOptions,
};
use geophase_core::gauge::{ReferenceGauge, SmoothUnitaryField, SolverGauge, Twisted};
use geophase_core::linalg::{ComplexMatrix, C64};
use geophase_core::models::{
    degenerate_example_model, spin_half_model, BandSelector, HermitianModel, DEFAULT_BAND_TOL,
};
use geophase_core::paths::{
    circle_in_plane, circle_loop, from_spherical, ParameterPath, SphericalPoint,
};
use geophase_core::wilczek_zee::{
    gauge_transform, holonomy_ode, wz_connection_fd, wz_holonomy_link, wz_holonomy_ode, LinkOptions,
};

type Outcome = Result<String, String>;

const THETAS: [f64; 4] = [FRAC_PI_6, FRAC_PI_3, FRAC_PI_2, 2.0 * FRAC_PI_3];

fn core<T>(r: geophase_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Band 1 is `+|λ|`, band 0 is `−|λ|`.
fn plus() -> BandSelector {
    BandSelector::index(1, 1)
}

fn minus() -> BandSelector {
    BandSelector::index(0, 1)
}

fn sphere(theta: f64, phi: f64) -> [f64; 3] {
    from_spherical(&SphericalPoint {
        radius: 1.0,
        theta,
        phi,
    })
}

fn phase_distance(a: f64, b: f64) -> f64 {
    wrap_phase(a - b).abs()
}

fn connection_goldens() -> Outcome {
    let model = spin_half_model();
    let gauge = ReferenceGauge::last(2, 1);
    let fd = FiniteDifference::with_step(1e-4);
    let mut worst: f64 = 0.0;
    for theta in THETAS {
        let p = sphere(theta, 0.7);
        let (c, s) = ((theta / 2.0).cos().powi(2), (theta / 2.0).sin().powi(2));
        for (band, expected) in [(plus(), c), (minus(), s)] {
            let a = core(connection_fd(&model, &band, &p, &fd, &gauge))?;
            let [ar, at, aphi] = core(a.spherical_components())?;
            worst = worst
                .max(ar.abs())
                .max(at.abs())
                .max((aphi - expected).abs());
        }
    }
    ensure(
        worst <= 1e-6,
        format!("max deviation {worst:.2e} (tol 1e-6)"),
    )
}

fn curvature_goldens() -> Outcome {
    let model = spin_half_model();
    let gauge = ReferenceGauge::last(2, 1);
    let fd = FiniteDifference::with_step(1e-4);
    let mut worst: f64 = 0.0;
    for theta in THETAS {
        let p = sphere(theta, 1.9);
        for (band, sign) in [(plus(), -1.0), (minus(), 1.0)] {
            let f = core(curvature_fd(&model, &band, &p, &fd, &gauge))?;
            let got = core(f.theta_phi())?;
            worst = worst.max((got - sign * 0.5 * theta.sin()).abs());
        }
    }
    ensure(
        worst <= 1e-4,
        format!("max deviation {worst:.2e} (tol 1e-4)"),
    )
}

fn solid_angle_law() -> Outcome {
    let model = spin_half_model();
    let mut worst: f64 = 0.0;
    let mut conj: f64 = 0.0;
    for theta in THETAS {
        let l = core(circle_loop(1.0, theta, 2000))?;
        let up = core(berry_phase_line(
            &model,
            &plus(),
            &l,
            &LineOptions::default(),
        ))?;
        let down = core(berry_phase_line(
            &model,
            &minus(),
            &l,
            &LineOptions::default(),
        ))?;
        let omega = TAU * (1.0 - theta.cos());
        worst = worst.max((up.phase_factor - C64::from_polar(1.0, -omega / 2.0)).norm());
        conj = conj.max((up.phase_factor - down.phase_factor.conj()).norm());
    }
    ensure(
        worst <= 1e-5 && conj <= 1e-5,
        format!("factor deviation {worst:.2e}, conjugacy {conj:.2e} (tol 1e-5)"),
    )
}

fn stokes_consistency() -> Outcome {
    let model = spin_half_model();
    let mut worst: f64 = 0.0;
    for theta in [FRAC_PI_6, FRAC_PI_2, 2.0 * FRAC_PI_3] {
        let l = core(circle_loop(1.0, theta, 2000))?;
        let line = core(berry_phase_line(
            &model,
            &plus(),
            &l,
            &LineOptions::default(),
        ))?;
        let surf = core(berry_phase_surface(
            &model,
            &plus(),
            1.0,
            theta,
            &SurfaceOptions::default(),
        ))?;
        worst = worst.max((line.phase_factor - C64::from_polar(1.0, surf.phase)).norm());
    }
    ensure(
        worst <= 1e-4,
        format!("max factor gap {worst:.2e} (tol 1e-4)"),
    )
}

fn tilted_loop(n: usize) -> Result<ParameterPath, String> {
    core(circle_in_plane(
        &[0.2, 0.0, 0.5, 0.3, 0.0],
        &[1.0, 0.0, 0.0, 0.0, 0.0],
        &[0.0, 0.6, 0.0, 0.0, 0.8],
        1.0,
        n,
    ))
}

fn planar_loop(n: usize) -> Result<ParameterPath, String> {
    let mut u = vec![0.0; 5];
    let mut v = vec![0.0; 5];
    u[0] = 1.0;
    v[1] = 1.0;
    core(circle_in_plane(&[0.0; 5], &u, &v, 1.0, n))
}

fn pivoted_at_base(
    model: &HermitianModel,
    band: &BandSelector,
    l: &ParameterPath,
) -> Result<ReferenceGauge, String> {
    let frame = core(model.eigenframe(&l.points()[0], DEFAULT_BAND_TOL))?;
    Ok(ReferenceGauge::pivoted(&core(frame.band_columns(band))?))
}

fn wilczek_zee() -> Outcome {
    let model = degenerate_example_model();
    let band = BandSelector::index(0, 2);
    let fd = FiniteDifference::default();

    let mut unitarity: f64 = 0.0;
    let mut link_ode: f64 = 0.0;
    for l in [planar_loop(2000)?, tilted_loop(2000)?] {
        let g = pivoted_at_base(&model, &band, &l)?;
        let link = core(wz_holonomy_link(
            &model,
            &band,
            &l,
            &LinkOptions::default(),
            &g,
        ))?;
        let ode = core(wz_holonomy_ode(&model, &band, &l, 4000, &fd, &g))?;
        unitarity = unitarity
            .max(link.unitarity_defect())
            .max(ode.unitarity_defect());
        link_ode = link_ode.max((&link.matrix - &ode.matrix).frobenius_norm());
    }

    let spin = spin_half_model();
    let equator = core(circle_loop(1.0, FRAC_PI_3, 2000))?;
    let w = core(wz_holonomy_link(
        &spin,
        &plus(),
        &equator,
        &LinkOptions::default(),
        &SolverGauge,
    ))?;
    let b = core(berry_phase_line(
        &spin,
        &plus(),
        &equator,
        &LineOptions::default(),
    ))?;
    let rank_one = (w.matrix[(0, 0)] - b.phase_factor).norm();

    // A' = U A U⁻¹ + ∂U U⁻¹ must conjugate the holonomy by U at the base point.
    let l = tilted_loop(400)?;
    let g = pivoted_at_base(&model, &band, &l)?;
    let field = SmoothUnitaryField::random(23, 5, 2, 0.6);
    let base = core(wz_holonomy_ode(&model, &band, &l, 1600, &fd, &g))?.matrix;
    let transformed = core(holonomy_ode(&l, 1600, |p| {
        let a = wz_connection_fd(&model, &band, p, &fd, &g)?;
        gauge_transform(&a, &field.value(p), &field.derivatives(p, 1e-5))
    }))?;
    let u0 = field.value(&l.points()[0]);
    let covariance = (&transformed - &(&(&u0 * &base) * &u0.adjoint())).frobenius_norm();

    // Changing the frame by G conjugates the link holonomy by G at the base.
    let l = tilted_loop(800)?;
    let plain = core(wz_holonomy_link(
        &model,
        &band,
        &l,
        &LinkOptions::default(),
        &SolverGauge,
    ))?;
    let twisted = core(wz_holonomy_link(
        &model,
        &band,
        &l,
        &LinkOptions::default(),
        &Twisted::new(SolverGauge, |p| field.value(p)),
    ))?;
    let g0: ComplexMatrix = field.value(&l.points()[0]);
    let frame_change =
        (&twisted.matrix - &(&(&g0.adjoint() * &plain.matrix) * &g0)).frobenius_norm();
    let covariance = covariance.max(frame_change);

    ensure(
        unitarity <= 1e-8 && link_ode <= 1e-4 && rank_one <= 1e-6 && covariance <= 1e-5,
        format!(
            "unitarity {unitarity:.2e} (1e-8), link vs ode {link_ode:.2e} (1e-4), \
             rank one {rank_one:.2e} (1e-6), covariance {covariance:.2e} (1e-5)"
        ),
    )
}

fn adiabatic_limit() -> Outcome {
    let model = spin_half_model();
    let l = core(circle_loop(1.0, FRAC_PI_2, 2000))?;
    let predicted = core(berry_phase_line(
        &model,
        &plus(),
        &l,
        &LineOptions::default(),
    ))?
    .phase;
    let gauge = ReferenceGauge::last(2, 1);
    let error = |t: f64, steps: usize| -> Result<f64, String> {
        let schedule = core(DriveSchedule::new(l.clone(), t, steps))?;
        let r = core(extract_geometric_phase(&model, &plus(), &schedule, &gauge))?;
        Ok(phase_distance(r.geometric_phase, predicted))
    };
    let e200 = error(200.0, 20_000)?;
    let e800 = error(800.0, 80_000)?;
    let ratio = e200 / e800;
    ensure(
        e200 <= 0.05 && ratio >= 3.0,
        format!(
            "error {e200:.4} at T=200 (tol 0.05), {e800:.4} at T=800, ratio {ratio:.2} (min 3)"
        ),
    )
}

fn electric_ab() -> Outcome {
    let (t0, charge) = (3.0, 1.3);
    let n = 4000;
    let t: Vec<f64> = (0..=n).map(|i| t0 * i as f64 / n as f64).collect();
    let s2 = move |x: f64| (PI * x / t0).sin().powi(2);
    let upper = move |x: f64| 0.7 * s2(x);
    let lower = move |x: f64| 1.2 * s2(x).powi(2);
    // ∫sin² = t0/2, ∫sin⁴ = 3t0/8 over the window.
    let closed_form = charge * (1.2 * 3.0 * t0 / 8.0 - 0.7 * t0 / 2.0);
    let pair = |u: &dyn Fn(f64) -> f64, l: &dyn Fn(f64) -> f64| -> Result<PulsePair, String> {
        core(PulsePair::new(
            core(Sampled::from_fn(&t, u))?,
            core(Sampled::from_fn(&t, l))?,
            charge,
        ))
    };
    let plain = electric_ab_phase(&pair(&upper, &lower)?);
    let quadrature = (plain - closed_form).abs();

    // Both beams get a(t0) − a(0) = c, by differently shaped ȧ.
    let c = 0.9;
    let a_dot_upper = move |x: f64| 2.0 * c / t0 * s2(x);
    let a_dot_lower = move |x: f64| 8.0 * c / (3.0 * t0) * s2(x).powi(2);
    let shifted = electric_ab_phase(&pair(&|x| upper(x) + a_dot_upper(x), &|x| {
        lower(x) + a_dot_lower(x)
    })?);
    let gauge = (shifted - plain).abs();
    ensure(
        quadrature <= 1e-8 && gauge <= 1e-10,
        format!("closed form {quadrature:.2e} (1e-8), gauge shift {gauge:.2e} (1e-10)"),
    )
}

fn magnetic_ab() -> Outcome {
    let flux = 1.7;
    let tube = core(SolenoidProfile::uniform(0.1, flux, [0.0, 0.0]))?;
    let bump = core(SolenoidProfile::new(
        0.1,
        flux,
        [0.0, 0.0],
        InteriorProfile::Bump,
    ))?;
    let contours = [
        (-1, core(PlanarContour::circle([0.2, -0.1], 0.6, 48, -1))?),
        (0, core(PlanarContour::circle([1.5, 1.0], 0.4, 48, 1))?),
        (1, core(PlanarContour::circle([0.2, -0.1], 0.6, 48, 1))?),
        (2, core(PlanarContour::circle([0.0, 0.0], 0.8, 48, 2))?),
    ];
    let mut line: f64 = 0.0;
    let mut stokes: f64 = 0.0;
    let mut profile: f64 = 0.0;
    for (winding, gamma) in &contours {
        let expected = flux * *winding as f64;
        let phase = magnetic_ab_phase(&tube, gamma, 1.0).phase;
        line = line.max((phase - expected).abs());
        profile = profile.max((magnetic_ab_phase(&bump, gamma, 1.0).phase - phase).abs());
        // A doubly traversed circle bounds no embedded surface.
        if !gamma.is_self_intersecting() {
            let surface = core(magnetic_flux_surface(&tube, gamma, 512))?;
            stokes = stokes.max((surface - expected).abs() / flux);
        }
    }
    ensure(
        line <= 1e-6 && stokes <= 1e-3 && profile <= 1e-6,
        format!(
            "line {line:.2e} (1e-6), stokes {stokes:.2e} rel (1e-3), profile {profile:.2e} (1e-6)"
        ),
    )
}

fn shrinking_loops() -> Outcome {
    let model = spin_half_model();
    let l = core(circle_loop(1.0, 0.01, 400))?;
    let berry = (core(berry_phase_line(
        &model,
        &plus(),
        &l,
        &LineOptions::default(),
    ))?
    .phase_factor
        - C64::new(1.0, 0.0))
    .norm();

    let tube = core(SolenoidProfile::uniform(0.1, 1.7, [0.0, 0.0]))?;
    let mut ab: f64 = 0.0;
    for r in [0.5, 0.1, 1e-2, 1e-3, 1e-4] {
        let gamma = core(PlanarContour::circle([0.9, 0.4], r, 64, 1))?;
        ab = ab.max(magnetic_ab_phase(&tube, &gamma, 1.0).phase.abs());
    }
    ensure(
        berry <= 1e-3 && ab <= 1e-8,
        format!("berry |factor-1| {berry:.2e} (1e-3), ab {ab:.2e} (1e-8)"),
    )
}

fn determinism() -> Outcome {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let mut configs: Vec<_> = std::fs::read_dir(root.join("configs"))
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    configs.sort();
    if configs.is_empty() {
        return Err("no configs found".into());
    }
    let mut mismatched = Vec::new();
    for path in &configs {
        let stem = path.file_stem().unwrap().to_string_lossy();
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        let cfg = parse_config(&text).map_err(|e| format!("{stem}: {e}"))?;
        let table = run(&cfg, RunOptions::default()).map_err(|e| format!("{stem}: {e}"))?;
        let csv = table.to_csv().map_err(|e| e.to_string())?;
        let golden = std::fs::read_to_string(root.join("golden").join(format!("{stem}.csv")))
            .map_err(|e| format!("{stem}: {e}"))?;
        if csv != golden {
            mismatched.push(stem.into_owned());
        }
    }
    ensure(
        mismatched.is_empty(),
        format!(
            "{} configs, mismatched: [{}]",
            configs.len(),
            mismatched.join(", ")
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("connection golden values", connection_goldens),
        ("curvature golden values", curvature_goldens),
        ("solid-angle law", solid_angle_law),
        ("stokes consistency", stokes_consistency),
        ("wilczek-zee holonomy", wilczek_zee),
        ("adiabatic limit", adiabatic_limit),
        ("electric aharonov-bohm", electric_ab),
        ("magnetic aharonov-bohm", magnetic_ab),
        ("shrinking loops", shrinking_loops),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

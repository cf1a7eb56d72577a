//! Dispatch of validated experiments to geophase-core.

use rayon::prelude::*;

use geophase_core::adiabatic::{extract_geometric_phase, DriveSchedule};
use geophase_core::aharonov_bohm::{
    electric_ab_phase, fringe_intensity, magnetic_ab_phase, magnetic_flux_surface, winding_number,
};
use geophase_core::berry::{berry_phase_line, berry_phase_surface, LineOptions};
use geophase_core::gauge::ReferenceGauge;
use geophase_core::models::{BandSelector, HermitianModel, DEFAULT_BAND_TOL};
use geophase_core::paths::circle_loop;
use geophase_core::wilczek_zee::{wz_holonomy_link, wz_holonomy_ode, WilczekZeeHolonomy};
use geophase_core::Error as CoreError;

use crate::config::{Experiment, ExperimentConfig, Kind, LoopSpec, WzMethod};
use crate::table::{Cell, ResultTable};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const BERRY_COLUMNS: [&str; 6] = [
    "loop_id",
    "theta",
    "n_points",
    "phase_rad",
    "re_factor",
    "im_factor",
];
pub const ADIABATIC_COLUMNS: [&str; 6] = [
    "T",
    "steps",
    "total_phase",
    "dynamical_phase",
    "geometric_phase",
    "fidelity",
];
pub const AB_ELECTRIC_COLUMNS: [&str; 3] = ["pulse_id", "phase_rad", "fringe"];
pub const AB_MAGNETIC_COLUMNS: [&str; 5] = [
    "contour_id",
    "winding",
    "phase_rad",
    "flux_surface",
    "fringe",
];

/// `loop_id, r, u{a}{b}_re, u{a}{b}_im …, det_phase, trace_re, trace_im`.
pub fn wz_columns(r: usize) -> Vec<String> {
    let mut cols = vec!["loop_id".to_owned(), "r".to_owned()];
    for a in 0..r {
        for b in 0..r {
            cols.push(format!("u{a}{b}_re"));
            cols.push(format!("u{a}{b}_im"));
        }
    }
    cols.extend(["det_phase", "trace_re", "trace_im"].map(String::from));
    cols
}

#[derive(Debug, thiserror::Error)]
#[error("{kind} run failed (config {digest}): {source}")]
pub struct RunError {
    pub kind: Kind,
    pub digest: String,
    #[source]
    pub source: CoreError,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Adds a `timestamp` metadata line (UTC, RFC 3339).
    pub timestamp: bool,
}

pub fn run(config: &ExperimentConfig, opts: RunOptions) -> Result<ResultTable, RunError> {
    let wrap = |source| RunError {
        kind: config.kind,
        digest: config.digest.clone(),
        source,
    };
    let mut table = dispatch(config).map_err(wrap)?;
    let mut meta = vec![
        ("config_digest".to_owned(), config.digest.clone()),
        ("kind".to_owned(), config.kind.name().to_owned()),
        ("version".to_owned(), format!("geophase {VERSION}")),
    ];
    if opts.timestamp {
        meta.push((
            "timestamp".to_owned(),
            chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        ));
    }
    meta.append(&mut table.metadata);
    table.metadata = meta;
    Ok(table)
}

fn dispatch(config: &ExperimentConfig) -> Result<ResultTable, CoreError> {
    let id = config.id.as_str();
    match &config.experiment {
        Experiment::BerryLine {
            model,
            band,
            loop_,
            options,
        } => {
            let mut t = ResultTable::new(&BERRY_COLUMNS);
            t.push_row(berry_row(model, band, loop_, options, id)?);
            Ok(t)
        }
        Experiment::Sweep {
            model,
            band,
            radius,
            points,
            thetas,
            options,
        } => {
            let rows = thetas
                .par_iter()
                .enumerate()
                .map(|(i, &theta)| {
                    let loop_ = LoopSpec {
                        path: circle_loop(*radius, theta, *points)?,
                        theta: Some(theta),
                    };
                    berry_row(model, band, &loop_, options, &format!("{id}-{i}"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut t = ResultTable::new(&BERRY_COLUMNS);
            rows.into_iter().for_each(|r| t.push_row(r));
            Ok(t)
        }
        Experiment::BerrySurface {
            model,
            band,
            radius,
            theta,
            options,
        } => {
            let s = berry_phase_surface(model, band, *radius, *theta, options)?;
            let mut t = ResultTable::new(&BERRY_COLUMNS);
            t.push_meta(
                "estimated_error",
                crate::table::format_float(s.estimated_error),
            );
            t.push_row(vec![
                id.into(),
                (*theta).into(),
                (options.theta_nodes * options.phi_nodes).into(),
                s.phase.into(),
                s.phase.cos().into(),
                s.phase.sin().into(),
            ]);
            Ok(t)
        }
        Experiment::WzHolonomy {
            model,
            band,
            loop_,
            method,
            steps,
            link,
            fd,
        } => {
            let base = model
                .eigenframe(&loop_.path.points()[0], link.band_tol)?
                .band_columns(band)?;
            let gauge = ReferenceGauge::pivoted(&base);
            let w = match method {
                WzMethod::Link => wz_holonomy_link(model, band, &loop_.path, link, &gauge)?,
                WzMethod::Ode => wz_holonomy_ode(model, band, &loop_.path, *steps, fd, &gauge)?,
            };
            Ok(wz_table(&w, id))
        }
        Experiment::Adiabatic {
            model,
            band,
            loop_,
            schedules,
        } => {
            let gauge = ReferenceGauge::pivoted(
                &model
                    .eigenframe(&loop_.path.points()[0], DEFAULT_BAND_TOL)?
                    .band_columns(band)?,
            );
            let results = schedules
                .par_iter()
                .map(|s| {
                    let schedule = DriveSchedule::new(loop_.path.clone(), s.total_time, s.steps)?;
                    extract_geometric_phase(model, band, &schedule, &gauge)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut t = ResultTable::new(&ADIABATIC_COLUMNS);
            for (s, r) in schedules.iter().zip(results) {
                if r.non_adiabatic {
                    t.push_meta(
                        "warning",
                        format!(
                            "T={} is not adiabatic (fidelity {:.6})",
                            s.total_time, r.fidelity
                        ),
                    );
                }
                t.push_row(vec![
                    s.total_time.into(),
                    s.steps.into(),
                    r.total_phase.into(),
                    r.dynamical_phase.into(),
                    r.geometric_phase.into(),
                    r.fidelity.into(),
                ]);
            }
            Ok(t)
        }
        Experiment::AbElectric { pulses } => {
            let mut t = ResultTable::new(&AB_ELECTRIC_COLUMNS);
            for (pid, p) in pulses {
                let phase = electric_ab_phase(p);
                t.push_row(vec![
                    pid.as_str().into(),
                    phase.into(),
                    fringe_intensity(phase).into(),
                ]);
            }
            Ok(t)
        }
        Experiment::AbMagnetic {
            charge,
            solenoid,
            contours,
            mesh,
        } => {
            let rows = contours
                .par_iter()
                .map(|(cid, contour)| {
                    let line = magnetic_ab_phase(solenoid, contour, *charge);
                    let winding = winding_number(contour, solenoid.center())?;
                    let flux = if contour.is_self_intersecting() {
                        None
                    } else {
                        Some(magnetic_flux_surface(solenoid, contour, *mesh)?)
                    };
                    let row: Vec<Cell> = vec![
                        cid.as_str().into(),
                        winding.into(),
                        line.phase.into(),
                        flux.into(),
                        fringe_intensity(line.phase).into(),
                    ];
                    Ok::<_, CoreError>((row, line.crosses_tube.then(|| cid.clone())))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut t = ResultTable::new(&AB_MAGNETIC_COLUMNS);
            for (row, crossing) in rows {
                if let Some(cid) = crossing {
                    t.push_meta(
                        "warning",
                        format!("contour {cid} passes through the tube; phase is not quantized"),
                    );
                }
                t.push_row(row);
            }
            Ok(t)
        }
    }
}

fn berry_row(
    model: &HermitianModel,
    band: &BandSelector,
    loop_: &LoopSpec,
    options: &LineOptions,
    id: &str,
) -> Result<Vec<Cell>, CoreError> {
    let r = berry_phase_line(model, band, &loop_.path, options)?;
    Ok(vec![
        id.into(),
        loop_.theta.into(),
        r.path.segments().into(),
        r.phase.into(),
        r.phase_factor.re.into(),
        r.phase_factor.im.into(),
    ])
}

fn wz_table(w: &WilczekZeeHolonomy, id: &str) -> ResultTable {
    let r = w.rank();
    let cols = wz_columns(r);
    let mut t = ResultTable {
        header: cols,
        rows: Vec::new(),
        metadata: Vec::new(),
    };
    let mut row: Vec<Cell> = vec![id.into(), r.into()];
    for a in 0..r {
        for b in 0..r {
            row.push(w.matrix[(a, b)].re.into());
            row.push(w.matrix[(a, b)].im.into());
        }
    }
    let trace = w.trace();
    row.extend([w.det_phase().into(), trace.re.into(), trace.im.into()]);
    t.push_meta("refinements", w.refinements.to_string());
    t.push_row(row);
    t
}

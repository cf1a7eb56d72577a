//! Experiment configuration: JSON documents validated into typed
//! experiments. Validation collects every problem instead of stopping at
//! the first one.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use geophase_core::aharonov_bohm::{
    InteriorProfile, PlanarContour, PulsePair, Sampled, SolenoidProfile,
};
use geophase_core::berry::{FiniteDifference, LineOptions, SurfaceOptions};
use geophase_core::linalg::{ComplexMatrix, HermitianMatrix, C64};
use geophase_core::models::{
    degenerate_example_model, spin_half_model, BandSelector, HermitianModel, DEFAULT_BAND_TOL,
};
use geophase_core::paths::{circle_in_plane, circle_loop, ParameterPath};
use geophase_core::wilczek_zee::LinkOptions;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    BerryLine,
    BerrySurface,
    WzHolonomy,
    Adiabatic,
    AbElectric,
    AbMagnetic,
    Sweep,
}

impl Kind {
    pub const ALL: [Kind; 7] = [
        Kind::BerryLine,
        Kind::BerrySurface,
        Kind::WzHolonomy,
        Kind::Adiabatic,
        Kind::AbElectric,
        Kind::AbMagnetic,
        Kind::Sweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::BerryLine => "berry-line",
            Kind::BerrySurface => "berry-surface",
            Kind::WzHolonomy => "wz-holonomy",
            Kind::Adiabatic => "adiabatic",
            Kind::AbElectric => "ab-electric",
            Kind::AbMagnetic => "ab-magnetic",
            Kind::Sweep => "sweep",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Kind::BerryLine => "Berry phase of a closed loop from eigenvector overlaps",
            Kind::BerrySurface => "Berry phase as the curvature flux through a spherical cap",
            Kind::WzHolonomy => "Wilczek-Zee holonomy of a degenerate band (link product or ODE)",
            Kind::Adiabatic => "geometric phase extracted from Schrodinger evolution around a loop",
            Kind::AbElectric => "electric Aharonov-Bohm phase of sampled pulse pairs",
            Kind::AbMagnetic => "magnetic Aharonov-Bohm phase and flux for planar contours",
            Kind::Sweep => "berry-line over a list of polar angles",
        }
    }

    pub fn parse(s: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Top-level keys accepted besides `kind`, `id`, `output`, `description`.
    fn keys(self) -> &'static [&'static str] {
        match self {
            Kind::BerryLine => &["model", "band", "loop", "numeric"],
            Kind::BerrySurface => &["model", "band", "surface", "numeric"],
            Kind::WzHolonomy => &["model", "band", "loop", "numeric"],
            Kind::Adiabatic => &["model", "band", "loop", "schedules"],
            Kind::AbElectric => &["charge", "pulses"],
            Kind::AbMagnetic => &["charge", "solenoid", "contours", "numeric"],
            Kind::Sweep => &["model", "band", "loop", "thetas", "numeric"],
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WzMethod {
    Link,
    Ode,
}

/// A closed loop plus the polar angle it was built from, when it has one.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopSpec {
    pub path: ParameterPath,
    pub theta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub total_time: f64,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Experiment {
    BerryLine {
        model: HermitianModel,
        band: BandSelector,
        loop_: LoopSpec,
        options: LineOptions,
    },
    BerrySurface {
        model: HermitianModel,
        band: BandSelector,
        radius: f64,
        theta: f64,
        options: SurfaceOptions,
    },
    WzHolonomy {
        model: HermitianModel,
        band: BandSelector,
        loop_: LoopSpec,
        method: WzMethod,
        steps: usize,
        link: LinkOptions,
        fd: FiniteDifference,
    },
    Adiabatic {
        model: HermitianModel,
        band: BandSelector,
        loop_: LoopSpec,
        schedules: Vec<Schedule>,
    },
    AbElectric {
        pulses: Vec<(String, PulsePair)>,
    },
    AbMagnetic {
        charge: f64,
        solenoid: SolenoidProfile,
        contours: Vec<(String, PlanarContour)>,
        mesh: usize,
    },
    Sweep {
        model: HermitianModel,
        band: BandSelector,
        radius: f64,
        points: usize,
        thetas: Vec<f64>,
        options: LineOptions,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub id: String,
    pub output: Option<PathBuf>,
    /// SHA-256 of the canonical (key-sorted, compact) JSON document.
    pub digest: String,
    pub experiment: Experiment,
}

/// Every validation problem found in a document.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{} configuration error(s):\n  {}", .0.len(), .0.join("\n  "))]
pub struct ConfigErrors(pub Vec<String>);

pub fn digest(value: &Value) -> String {
    // serde_json maps are ordered by key, so this text is canonical.
    let canonical = serde_json::to_string(value).expect("JSON values serialize");
    format!("{:x}", Sha256::digest(canonical.as_bytes()))
}

pub fn parse_config(document: &str) -> Result<ExperimentConfig, ConfigErrors> {
    let value: Value = serde_json::from_str(document)
        .map_err(|e| ConfigErrors(vec![format!("malformed JSON: {e}")]))?;
    parse_value(&value)
}

pub fn parse_value(value: &Value) -> Result<ExperimentConfig, ConfigErrors> {
    let mut c = Checker {
        errors: Vec::new(),
        kind: "?",
    };
    let Some(root) = value.as_object() else {
        return Err(ConfigErrors(vec!["document must be a JSON object".into()]));
    };
    let kind = match root.get("kind") {
        None => return Err(ConfigErrors(vec!["missing required field `kind`".into()])),
        Some(Value::String(s)) => match Kind::parse(s) {
            Some(k) => k,
            None => {
                let known: Vec<_> = Kind::ALL.iter().map(|k| k.name()).collect();
                return Err(ConfigErrors(vec![format!(
                    "unknown kind `{s}` (expected one of {})",
                    known.join(", ")
                )]));
            }
        },
        Some(_) => return Err(ConfigErrors(vec!["`kind` must be a string".into()])),
    };
    c.kind = kind.name();
    let mut allowed = vec!["kind", "id", "output", "description"];
    allowed.extend_from_slice(kind.keys());
    c.unknown_keys(root, "", &allowed);

    let id = match root.get("id") {
        Some(v) => c.string(v, "id").unwrap_or_default(),
        None => kind.name().to_owned(),
    };
    let output = root
        .get("output")
        .and_then(|v| c.string(v, "output"))
        .map(PathBuf::from);
    if let Some(v) = root.get("description") {
        c.string(v, "description");
    }

    let experiment = match kind {
        Kind::BerryLine => berry_line(&mut c, root),
        Kind::BerrySurface => berry_surface(&mut c, root),
        Kind::WzHolonomy => wz_holonomy(&mut c, root),
        Kind::Adiabatic => adiabatic(&mut c, root),
        Kind::AbElectric => ab_electric(&mut c, root),
        Kind::AbMagnetic => ab_magnetic(&mut c, root),
        Kind::Sweep => sweep(&mut c, root),
    };
    match experiment {
        Some(experiment) if c.errors.is_empty() => Ok(ExperimentConfig {
            kind,
            id,
            output,
            digest: digest(value),
            experiment,
        }),
        _ => {
            if c.errors.is_empty() {
                c.errors.push("configuration is incomplete".into());
            }
            Err(ConfigErrors(c.errors))
        }
    }
}

struct Checker {
    errors: Vec<String>,
    kind: &'static str,
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_owned()
    } else {
        format!("{path}.{key}")
    }
}

impl Checker {
    fn err(&mut self, msg: String) {
        self.errors.push(msg);
    }

    fn unknown_keys(&mut self, map: &Map<String, Value>, path: &str, allowed: &[&str]) {
        for key in map.keys() {
            if !allowed.contains(&key.as_str()) {
                self.err(format!(
                    "unknown key `{}` (allowed: {})",
                    join(path, key),
                    allowed.join(", ")
                ));
            }
        }
    }

    fn object<'v>(
        &mut self,
        v: &'v Value,
        path: &str,
        allowed: &[&str],
    ) -> Option<&'v Map<String, Value>> {
        match v.as_object() {
            Some(m) => {
                self.unknown_keys(m, path, allowed);
                Some(m)
            }
            None => {
                self.err(format!("`{path}` must be an object"));
                None
            }
        }
    }

    fn required<'v>(
        &mut self,
        map: &'v Map<String, Value>,
        path: &str,
        key: &str,
    ) -> Option<&'v Value> {
        let v = map.get(key);
        if v.is_none() {
            self.err(format!(
                "missing required field `{}` for kind {}",
                join(path, key),
                self.kind
            ));
        }
        v
    }

    fn number(&mut self, v: &Value, path: &str) -> Option<f64> {
        match v.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                self.err(format!("`{path}` must be a finite number"));
                None
            }
        }
    }

    fn positive(&mut self, v: &Value, path: &str) -> Option<f64> {
        let x = self.number(v, path)?;
        if x > 0.0 {
            Some(x)
        } else {
            self.err(format!("`{path}` must be positive, got {x}"));
            None
        }
    }

    fn count(&mut self, v: &Value, path: &str, min: usize) -> Option<usize> {
        match v.as_u64() {
            Some(n) if n as usize >= min => Some(n as usize),
            _ => {
                self.err(format!("`{path}` must be an integer ≥ {min}"));
                None
            }
        }
    }

    fn string(&mut self, v: &Value, path: &str) -> Option<String> {
        match v.as_str() {
            Some(s) => Some(s.to_owned()),
            None => {
                self.err(format!("`{path}` must be a string"));
                None
            }
        }
    }

    fn array<'v>(&mut self, v: &'v Value, path: &str, min: usize) -> Option<&'v Vec<Value>> {
        match v.as_array() {
            Some(a) if a.len() >= min => Some(a),
            Some(_) => {
                self.err(format!("`{path}` needs at least {min} entries"));
                None
            }
            None => {
                self.err(format!("`{path}` must be an array"));
                None
            }
        }
    }

    fn vector(&mut self, v: &Value, path: &str) -> Option<Vec<f64>> {
        let a = self.array(v, path, 1)?;
        let xs: Vec<Option<f64>> = a
            .iter()
            .enumerate()
            .map(|(i, x)| self.number(x, &format!("{path}[{i}]")))
            .collect();
        xs.into_iter().collect()
    }

    fn opt_positive(
        &mut self,
        map: Option<&Map<String, Value>>,
        path: &str,
        key: &str,
        default: f64,
    ) -> f64 {
        match map.and_then(|m| m.get(key)) {
            Some(v) => self.positive(v, &join(path, key)).unwrap_or(default),
            None => default,
        }
    }

    fn opt_count(
        &mut self,
        map: Option<&Map<String, Value>>,
        path: &str,
        key: &str,
        min: usize,
        default: usize,
    ) -> usize {
        match map.and_then(|m| m.get(key)) {
            Some(v) => self.count(v, &join(path, key), min).unwrap_or(default),
            None => default,
        }
    }

    /// Polar angle strictly inside (0, π): the poles are coordinate singularities.
    fn polar_angle(&mut self, v: &Value, path: &str) -> Option<f64> {
        let theta = self.number(v, path)?;
        if theta > 0.0 && theta < PI {
            Some(theta)
        } else {
            self.err(format!(
                "`{path}` = {theta}: chart singularity, the polar angle must lie strictly between 0 and π"
            ));
            None
        }
    }
}

fn complex_entry(c: &mut Checker, v: &Value, path: &str) -> Option<C64> {
    match v {
        Value::Number(_) => c.number(v, path).map(|re| C64::new(re, 0.0)),
        Value::Array(a) if a.len() == 2 => {
            let re = c.number(&a[0], &format!("{path}[0]"));
            let im = c.number(&a[1], &format!("{path}[1]"));
            Some(C64::new(re?, im?))
        }
        _ => {
            c.err(format!("`{path}` must be a number or a [re, im] pair"));
            None
        }
    }
}

fn hermitian(c: &mut Checker, v: &Value, path: &str) -> Option<HermitianMatrix> {
    let rows = c.array(v, path, 1)?;
    let mut parsed = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let rp = format!("{path}[{i}]");
        let entries = c.array(row, &rp, 1)?;
        let row: Option<Vec<C64>> = entries
            .iter()
            .enumerate()
            .map(|(j, e)| complex_entry(c, e, &format!("{rp}[{j}]")))
            .collect();
        parsed.push(row?);
    }
    let m = match ComplexMatrix::from_rows(&parsed) {
        Ok(m) if m.is_square() => m,
        _ => {
            c.err(format!("`{path}` must be a square matrix"));
            return None;
        }
    };
    match HermitianMatrix::new(m) {
        Ok(h) => Some(h),
        Err(e) => {
            c.err(format!("`{path}`: {e}"));
            None
        }
    }
}

fn model(c: &mut Checker, root: &Map<String, Value>) -> Option<HermitianModel> {
    let m = c.required(root, "", "model")?;
    let m = c.object(m, "model", &["builtin", "generators", "offset"])?;
    match (m.get("builtin"), m.get("generators")) {
        (Some(b), None) => {
            if m.contains_key("offset") {
                c.err("`model.offset` only applies to custom generators".into());
            }
            match c.string(b, "model.builtin")?.as_str() {
                "spin-half" => Some(spin_half_model()),
                "gamma-5" => Some(degenerate_example_model()),
                other => {
                    c.err(format!(
                        "unknown builtin model `{other}` (expected spin-half or gamma-5)"
                    ));
                    None
                }
            }
        }
        (None, Some(g)) => {
            let gens = c.array(g, "model.generators", 1)?;
            let gens: Option<Vec<_>> = gens
                .iter()
                .enumerate()
                .map(|(i, g)| hermitian(c, g, &format!("model.generators[{i}]")))
                .collect();
            let offset = match m.get("offset") {
                Some(o) => Some(hermitian(c, o, "model.offset")?),
                None => None,
            };
            match HermitianModel::new(gens?, offset) {
                Ok(model) => Some(model),
                Err(e) => {
                    c.err(format!("`model`: {e}"));
                    None
                }
            }
        }
        _ => {
            c.err("`model` needs exactly one of `builtin` or `generators`".into());
            None
        }
    }
}

fn band(c: &mut Checker, root: &Map<String, Value>) -> Option<BandSelector> {
    let b = c.required(root, "", "band")?;
    let b = c.object(b, "band", &["index", "energy", "multiplicity"])?;
    let multiplicity = match b.get("multiplicity") {
        Some(v) => c.count(v, "band.multiplicity", 1)?,
        None => 1,
    };
    match (b.get("index"), b.get("energy")) {
        (Some(i), None) => Some(BandSelector::Index {
            index: c.count(i, "band.index", 0)?,
            multiplicity,
        }),
        (None, Some(e)) => Some(BandSelector::Energy {
            energy: c.number(e, "band.energy")?,
            multiplicity,
        }),
        _ => {
            c.err("`band` needs exactly one of `index` or `energy`".into());
            None
        }
    }
}

fn loop_spec(
    c: &mut Checker,
    root: &Map<String, Value>,
    n_params: Option<usize>,
) -> Option<LoopSpec> {
    let l = c.required(root, "", "loop")?;
    let l = c.object(
        l,
        "loop",
        &[
            "type", "radius", "theta", "points", "center", "u", "v", "vertices",
        ],
    )?;
    let ty = c.required(l, "loop", "type")?;
    let ty = c.string(ty, "loop.type")?;
    let spec = match ty.as_str() {
        "circle" => {
            c.unknown_keys(l, "loop", &["type", "radius", "theta", "points"]);
            let radius = c
                .required(l, "loop", "radius")
                .and_then(|v| c.positive(v, "loop.radius"));
            let theta = c
                .required(l, "loop", "theta")
                .and_then(|v| c.polar_angle(v, "loop.theta"));
            let points = c
                .required(l, "loop", "points")
                .and_then(|v| c.count(v, "loop.points", 3));
            let (radius, theta, points) = (radius?, theta?, points?);
            LoopSpec {
                path: circle_loop(radius, theta, points).ok()?,
                theta: Some(theta),
            }
        }
        "plane-circle" => {
            c.unknown_keys(l, "loop", &["type", "radius", "points", "center", "u", "v"]);
            let radius = c
                .required(l, "loop", "radius")
                .and_then(|v| c.positive(v, "loop.radius"));
            let points = c
                .required(l, "loop", "points")
                .and_then(|v| c.count(v, "loop.points", 3));
            let center = c
                .required(l, "loop", "center")
                .and_then(|v| c.vector(v, "loop.center"));
            let u = c
                .required(l, "loop", "u")
                .and_then(|v| c.vector(v, "loop.u"));
            let v = c
                .required(l, "loop", "v")
                .and_then(|v| c.vector(v, "loop.v"));
            let (radius, points, center, u, v) = (radius?, points?, center?, u?, v?);
            match circle_in_plane(&center, &u, &v, radius, points) {
                Ok(path) => LoopSpec { path, theta: None },
                Err(e) => {
                    c.err(format!("`loop`: {e}"));
                    return None;
                }
            }
        }
        "polyline" => {
            c.unknown_keys(l, "loop", &["type", "vertices"]);
            let vs = c.required(l, "loop", "vertices")?;
            let vs = c.array(vs, "loop.vertices", 2)?;
            let vs: Option<Vec<Vec<f64>>> = vs
                .iter()
                .enumerate()
                .map(|(i, v)| c.vector(v, &format!("loop.vertices[{i}]")))
                .collect();
            match ParameterPath::closed_from_points(vs?) {
                Ok(path) => LoopSpec { path, theta: None },
                Err(e) => {
                    c.err(format!("`loop.vertices`: {e}"));
                    return None;
                }
            }
        }
        other => {
            c.err(format!(
                "unknown loop type `{other}` (expected circle, plane-circle or polyline)"
            ));
            return None;
        }
    };
    if let Some(n) = n_params {
        if spec.path.dim() != n {
            c.err(format!(
                "loop lives in {} dimensions but the model has {n} parameters",
                spec.path.dim()
            ));
            return None;
        }
    }
    Some(spec)
}

fn numeric<'v>(
    c: &mut Checker,
    root: &'v Map<String, Value>,
    allowed: &[&str],
) -> Option<&'v Map<String, Value>> {
    root.get("numeric")
        .and_then(|v| c.object(v, "numeric", allowed))
}

fn line_options(c: &mut Checker, num: Option<&Map<String, Value>>) -> LineOptions {
    let d = LineOptions::default();
    LineOptions {
        band_tol: c.opt_positive(num, "numeric", "band_tol", d.band_tol),
        max_refinements: c.opt_count(num, "numeric", "max_refinements", 0, d.max_refinements),
    }
}

fn fd_options(
    c: &mut Checker,
    num: Option<&Map<String, Value>>,
    band_tol: f64,
) -> FiniteDifference {
    let step = num
        .and_then(|m| m.get("fd_step"))
        .and_then(|v| c.positive(v, "numeric.fd_step"));
    FiniteDifference { step, band_tol }
}

fn berry_line(c: &mut Checker, root: &Map<String, Value>) -> Option<Experiment> {
    let model = model(c, root);
    let band = band(c, root);
    let loop_ = loop_spec(c, root, model.as_ref().map(HermitianModel::n_params));
    let num = numeric(c, root, &["band_tol", "max_refinements"]);
    let options = line_options(c, num);
    Some(Experiment::BerryLine {
        model: model?,
        band: band?,
        loop_: loop_?,
        options,
    })
}

fn three_parameter(c: &mut Checker, model: &Option<HermitianModel>) {
    if let Some(m) = model {
        if m.n_params() != 3 {
            c.err(format!(
                "kind {} needs a 3-parameter model, got {}",
                c.kind,
                m.n_params()
            ));
        }
    }
}

fn berry_surface(c: &mut Checker, root: &Map<String, Value>) -> Option<Experiment> {
    let model = model(c, root);
    three_parameter(c, &model);
    let band = band(c, root);
    let surface = c
        .required(root, "", "surface")
        .and_then(|v| c.object(v, "surface", &["radius", "theta"]));
    let (radius, theta) = match surface {
        Some(s) => (
            c.required(s, "surface", "radius")
                .and_then(|v| c.positive(v, "surface.radius")),
            c.required(s, "surface", "theta")
                .and_then(|v| c.polar_angle(v, "surface.theta")),
        ),
        None => (None, None),
    };
    let num = numeric(
        c,
        root,
        &[
            "theta_nodes",
            "phi_nodes",
            "tolerance",
            "fd_step",
            "band_tol",
        ],
    );
    let d = SurfaceOptions::default();
    let band_tol = c.opt_positive(num, "numeric", "band_tol", DEFAULT_BAND_TOL);
    let options = SurfaceOptions {
        theta_nodes: c.opt_count(num, "numeric", "theta_nodes", 2, d.theta_nodes),
        phi_nodes: c.opt_count(num, "numeric", "phi_nodes", 2, d.phi_nodes),
        tolerance: c.opt_positive(num, "numeric", "tolerance", d.tolerance),
        fd: fd_options(c, num, band_tol),
    };
    Some(Experiment::BerrySurface {
        model: model?,
        band: band?,
        radius: radius?,
        theta: theta?,
        options,
    })
}

fn wz_holonomy(c: &mut Checker, root: &Map<String, Value>) -> Option<Experiment> {
    let model = model(c, root);
    let band = band(c, root);
    let loop_ = loop_spec(c, root, model.as_ref().map(HermitianModel::n_params));
    let num = numeric(
        c,
        root,
        &["method", "steps", "band_tol", "max_refinements", "fd_step"],
    );
    let method = match num.and_then(|m| m.get("method")) {
        None => Some(WzMethod::Link),
        Some(v) => match c.string(v, "numeric.method").as_deref() {
            Some("link") => Some(WzMethod::Link),
            Some("ode") => Some(WzMethod::Ode),
            Some(other) => {
                c.err(format!(
                    "unknown `numeric.method` `{other}` (expected link or ode)"
                ));
                None
            }
            None => None,
        },
    };
    let steps = match (method, num.and_then(|m| m.get("steps"))) {
        (_, Some(v)) => c.count(v, "numeric.steps", 1),
        (Some(WzMethod::Ode), None) => {
            c.err(format!(
                "missing required field `numeric.steps` for kind {} with method ode",
                c.kind
            ));
            None
        }
        _ => Some(0),
    };
    let d = LinkOptions::default();
    let band_tol = c.opt_positive(num, "numeric", "band_tol", d.band_tol);
    let link = LinkOptions {
        band_tol,
        max_refinements: c.opt_count(num, "numeric", "max_refinements", 0, d.max_refinements),
        ..d
    };
    let fd = fd_options(c, num, band_tol);
    Some(Experiment::WzHolonomy {
        model: model?,
        band: band?,
        loop_: loop_?,
        method: method?,
        steps: steps?,
        link,
        fd,
    })
}

fn adiabatic(c: &mut Checker, root: &Map<String, Value>) -> Option<Experiment> {
    let model = model(c, root);
    let band = band(c, root);
    let loop_ = loop_spec(c, root, model.as_ref().map(HermitianModel::n_params));
    let list = c
        .required(root, "", "schedules")
        .and_then(|v| c.array(v, "schedules", 1));
    let mut schedules = Some(Vec::new());
    for (i, s) in list.into_iter().flatten().enumerate() {
        let path = format!("schedules[{i}]");
        let Some(s) = c.object(s, &path, &["total_time", "steps"]) else {
            schedules = None;
            continue;
        };
        let t = c
            .required(s, &path, "total_time")
            .and_then(|v| c.positive(v, &join(&path, "total_time")));
        let n = c
            .required(s, &path, "steps")
            .and_then(|v| c.count(v, &join(&path, "steps"), 1));
        if let (Some(lp), Some(n)) = (&loop_, n) {
            if n < lp.path.len() {
                c.err(format!(
                    "`{path}.steps` = {n} is fewer than the {} loop points",
                    lp.path.len()
                ));
            }
        }
        match (t, n, schedules.as_mut()) {
            (Some(total_time), Some(steps), Some(v)) => v.push(Schedule { total_time, steps }),
            _ => schedules = None,
        }
    }
    Some(Experiment::Adiabatic {
        model: model?,
        band: band?,
        loop_: loop_?,
        schedules: schedules.filter(|s| !s.is_empty())?,
    })
}

fn charge(c: &mut Checker, root: &Map<String, Value>) -> Option<f64> {
    c.required(root, "", "charge")
        .and_then(|v| c.number(v, "charge"))
}

fn ab_electric(c: &mut Checker, root: &Map<String, Value>) -> Option<Experiment> {
    let charge = charge(c, root);
    let list = c
        .required(root, "", "pulses")
        .and_then(|v| c.array(v, "pulses", 1));
    let mut pulses = Some(Vec::new());
    for (i, p) in list.into_iter().flatten().enumerate() {
        let path = format!("pulses[{i}]");
        let parsed = (|| {
            let p = c.object(p, &path, &["id", "times", "upper", "lower"])?;
            let id = match p.get("id") {
                Some(v) => c.string(v, &join(&path, "id")),
                None => Some(format!("pulse{i}")),
            };
            let times = c
                .required(p, &path, "times")
                .and_then(|v| c.vector(v, &join(&path, "times")));
            let upper = c
                .required(p, &path, "upper")
                .and_then(|v| c.vector(v, &join(&path, "upper")));
            let lower = c
                .required(p, &path, "lower")
                .and_then(|v| c.vector(v, &join(&path, "lower")));
            let (id, times, upper, lower, charge) = (id?, times?, upper?, lower?, charge?);
            let pair = Sampled::new(times.clone(), upper)
                .and_then(|u| Ok((u, Sampled::new(times, lower)?)))
                .and_then(|(u, l)| PulsePair::new(u, l, charge));
            match pair {
                Ok(pair) => Some((id, pair)),
                Err(e) => {
                    c.err(format!("`{path}`: {e}"));
                    None
                }
            }
        })();
        match (parsed, pulses.as_mut()) {
            (Some(p), Some(v)) => v.push(p),
            _ => pulses = None,
        }
    }
    Some(Experiment::AbElectric {
        pulses: pulses.filter(|p| !p.is_empty())?,
    })
}

fn point2(c: &mut Checker, v: &Value, path: &str) -> Option<[f64; 2]> {
    let xs = c.vector(v, path)?;
    match xs.as_slice() {
        &[x, y] => Some([x, y]),
        _ => {
            c.err(format!("`{path}` must be a 2D point"));
            None
        }
    }
}

fn ab_magnetic(c: &mut Checker, root: &Map<String, Value>) -> Option<Experiment> {
    let charge = charge(c, root);
    let solenoid = (|| {
        let s = c.required(root, "", "solenoid")?;
        let s = c.object(s, "solenoid", &["radius", "flux", "center", "interior"])?;
        let radius = c
            .required(s, "solenoid", "radius")
            .and_then(|v| c.positive(v, "solenoid.radius"));
        let flux = c
            .required(s, "solenoid", "flux")
            .and_then(|v| c.number(v, "solenoid.flux"));
        let center = match s.get("center") {
            Some(v) => point2(c, v, "solenoid.center"),
            None => Some([0.0, 0.0]),
        };
        let interior = match s.get("interior").map(|v| c.string(v, "solenoid.interior")) {
            None => Some(InteriorProfile::Uniform),
            Some(Some(name)) if name == "uniform" => Some(InteriorProfile::Uniform),
            Some(Some(name)) if name == "bump" => Some(InteriorProfile::Bump),
            Some(Some(name)) => {
                c.err(format!(
                    "unknown `solenoid.interior` `{name}` (expected uniform or bump)"
                ));
                None
            }
            Some(None) => None,
        };
        SolenoidProfile::new(radius?, flux?, center?, interior?).ok()
    })();
    let list = c
        .required(root, "", "contours")
        .and_then(|v| c.array(v, "contours", 1));
    let mut contours = Some(Vec::new());
    for (i, g) in list.into_iter().flatten().enumerate() {
        let path = format!("contours[{i}]");
        let parsed = (|| {
            let g = c.object(
                g,
                &path,
                &[
                    "id", "type", "center", "radius", "points", "turns", "vertices",
                ],
            )?;
            let id = match g.get("id") {
                Some(v) => c.string(v, &join(&path, "id")),
                None => Some(format!("contour{i}")),
            };
            let ty = c.required(g, &path, "type")?;
            let ty = c.string(ty, &join(&path, "type"))?;
            let contour = match ty.as_str() {
                "circle" => {
                    c.unknown_keys(
                        g,
                        &path,
                        &["id", "type", "center", "radius", "points", "turns"],
                    );
                    let center = c
                        .required(g, &path, "center")
                        .and_then(|v| point2(c, v, &join(&path, "center")));
                    let radius = c
                        .required(g, &path, "radius")
                        .and_then(|v| c.positive(v, &join(&path, "radius")));
                    let points = c
                        .required(g, &path, "points")
                        .and_then(|v| c.count(v, &join(&path, "points"), 3));
                    let turns = match g.get("turns") {
                        Some(v) => match v.as_i64() {
                            Some(t) if t != 0 && t.abs() <= 1000 => Some(t as i32),
                            _ => {
                                c.err(format!("`{path}.turns` must be a nonzero integer"));
                                None
                            }
                        },
                        None => Some(1),
                    };
                    PlanarContour::circle(center?, radius?, points?, turns?)
                }
                "polygon" => {
                    c.unknown_keys(g, &path, &["id", "type", "vertices"]);
                    let vs = c.required(g, &path, "vertices")?;
                    let vs = c.array(vs, &join(&path, "vertices"), 2)?;
                    let vs: Option<Vec<[f64; 2]>> = vs
                        .iter()
                        .enumerate()
                        .map(|(j, v)| point2(c, v, &format!("{path}.vertices[{j}]")))
                        .collect();
                    PlanarContour::polygon(vs?)
                }
                other => {
                    c.err(format!(
                        "unknown `{path}.type` `{other}` (expected circle or polygon)"
                    ));
                    return None;
                }
            };
            match contour {
                Ok(contour) => Some((id?, contour)),
                Err(e) => {
                    c.err(format!("`{path}`: {e}"));
                    None
                }
            }
        })();
        match (parsed, contours.as_mut()) {
            (Some(p), Some(v)) => v.push(p),
            _ => contours = None,
        }
    }
    let num = numeric(c, root, &["mesh"]);
    let mesh = c.opt_count(num, "numeric", "mesh", 2, 512);
    Some(Experiment::AbMagnetic {
        charge: charge?,
        solenoid: solenoid?,
        contours: contours.filter(|v| !v.is_empty())?,
        mesh,
    })
}

fn sweep(c: &mut Checker, root: &Map<String, Value>) -> Option<Experiment> {
    let model = model(c, root);
    three_parameter(c, &model);
    let band = band(c, root);
    let l = c
        .required(root, "", "loop")
        .and_then(|v| c.object(v, "loop", &["type", "radius", "points"]));
    let (radius, points) = match l {
        Some(l) => {
            if let Some(t) = l.get("type").and_then(|t| c.string(t, "loop.type")) {
                if t != "circle" {
                    c.err(format!("sweep loops must be of type circle, got `{t}`"));
                }
            }
            (
                c.required(l, "loop", "radius")
                    .and_then(|v| c.positive(v, "loop.radius")),
                c.required(l, "loop", "points")
                    .and_then(|v| c.count(v, "loop.points", 3)),
            )
        }
        None => (None, None),
    };
    let list = c
        .required(root, "", "thetas")
        .and_then(|v| c.array(v, "thetas", 1));
    let thetas: Option<Vec<f64>> = list.map(|a| {
        a.iter()
            .enumerate()
            .map(|(i, t)| c.polar_angle(t, &format!("thetas[{i}]")))
            .collect()
    })?;
    let num = numeric(c, root, &["band_tol", "max_refinements"]);
    let options = line_options(c, num);
    Some(Experiment::Sweep {
        model: model?,
        band: band?,
        radius: radius?,
        points: points?,
        thetas: thetas?,
        options,
    })
}

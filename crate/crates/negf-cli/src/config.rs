//! Declarative run configuration: TOML parsing, exhaustive validation
//! (every error reported, unknown keys rejected), and default resolution.

use std::collections::BTreeSet;
use std::path::PathBuf;

use negf_core::cmatrix::CMat;
use negf_core::density::{ContourSpec, ScfSettings};
use negf_core::model::{presets, Alignment, DeviceSpec, DistanceLaw, LeadSpec, ModelSpec, Numerics};
use negf_core::Complex64;
use serde::Serialize;
use toml::Value;

/// Fully resolved run configuration; every default expanded.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub model_desc: ModelDescription,
    pub physics: Physics,
    pub contour: ContourSpec,
    pub scf: ScfSettings,
    pub warm_start: bool,
    pub output: OutputSettings,
    pub tasks: Vec<Task>,
}

/// How the model was specified, echoed into the manifest.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelDescription {
    Preset { name: String },
    Explicit,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Physics {
    pub kt: f64,
    pub eta: f64,
    pub mu: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Physics {
            kt: 0.025,
            eta: 1e-6,
            mu: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputSettings {
    pub dir: PathBuf,
    pub precision: usize,
}

impl Default for OutputSettings {
    fn default() -> Self {
        OutputSettings {
            dir: PathBuf::from("out"),
            precision: 9,
        }
    }
}

/// One requested computation.
#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Transmission {
        alignment: Alignment,
        distance: f64,
        e_min: f64,
        e_max: f64,
        n_energies: usize,
    },
    Dos {
        alignment: Alignment,
        distance: f64,
        e_min: f64,
        e_max: f64,
        n_energies: usize,
    },
    Conductance {
        alignment: Alignment,
        distance: f64,
    },
    Moment {
        d_min: f64,
        d_max: f64,
        n_distances: usize,
        alignments: Vec<Alignment>,
    },
    Mr {
        d_min: f64,
        d_max: f64,
        n_distances: usize,
    },
    Iv {
        alignment: Alignment,
        distance: f64,
        v_min: f64,
        v_max: f64,
        n_biases: usize,
        n_energy_points: usize,
    },
    DistanceSweep {
        d_min: f64,
        d_max: f64,
        n_distances: usize,
        alignments: Vec<Alignment>,
    },
}

impl Task {
    pub fn kind(&self) -> &'static str {
        match self {
            Task::Transmission { .. } => "transmission",
            Task::Dos { .. } => "dos",
            Task::Conductance { .. } => "conductance",
            Task::Moment { .. } => "moment",
            Task::Mr { .. } => "mr",
            Task::Iv { .. } => "iv",
            Task::DistanceSweep { .. } => "distance_sweep",
        }
    }

    pub fn file_name(&self) -> &'static str {
        match self {
            Task::Transmission { .. } => "transmission.csv",
            Task::Dos { .. } => "dos.csv",
            Task::Conductance { .. } => "conductance.csv",
            Task::Moment { .. } => "moment_vs_d.csv",
            Task::Mr { .. } => "mr_vs_d.csv",
            Task::Iv { .. } => "iv.csv",
            Task::DistanceSweep { .. } => "distance_sweep.csv",
        }
    }
}

impl RunConfig {
    pub fn numerics(&self) -> Numerics {
        Numerics {
            eta: self.physics.eta,
            ..Numerics::default()
        }
    }
}

/// Parse and validate; on failure every detected problem is returned.
pub fn parse_config(text: &str) -> Result<RunConfig, Vec<String>> {
    let value: Value = toml::from_str(text).map_err(|e| vec![format!("toml syntax: {e}")])?;
    let mut errors = Vec::new();
    let root = match value.as_table() {
        Some(t) => t,
        None => return Err(vec!["configuration root must be a table".into()]),
    };
    check_keys(
        root.keys(),
        &["model", "physics", "contour", "scf", "output", "task"],
        "",
        &mut errors,
    );

    let physics = parse_physics(root.get("physics"), &mut errors);
    let contour = parse_contour(root.get("contour"), &mut errors);
    let (scf, warm_start) = parse_scf(root.get("scf"), &mut errors);
    let output = parse_output(root.get("output"), &mut errors);
    let model = parse_model(root.get("model"), &physics, &mut errors);
    let tasks = parse_tasks(root.get("task"), &mut errors);

    if let Some(ref m) = model {
        validate_tasks_against_model(&tasks, &m.0, &mut errors);
    }

    if errors.is_empty() {
        let (model, model_desc) = model.expect("validated");
        Ok(RunConfig {
            model,
            model_desc,
            physics,
            contour,
            scf,
            warm_start,
            output,
            tasks,
        })
    } else {
        errors.sort();
        errors.dedup();
        Err(errors)
    }
}

fn check_keys<'a, I: Iterator<Item = &'a String>>(
    keys: I,
    allowed: &[&str],
    section: &str,
    errors: &mut Vec<String>,
) {
    let allowed: BTreeSet<&str> = allowed.iter().copied().collect();
    for key in keys {
        if !allowed.contains(key.as_str()) {
            let loc = if section.is_empty() { String::new() } else { format!("{section}.") };
            errors.push(format!("unknown key `{loc}{key}`"));
        }
    }
}

fn get_f64(table: &toml::value::Table, key: &str, section: &str, errors: &mut Vec<String>) -> Option<f64> {
    match table.get(key) {
        None => None,
        Some(Value::Float(x)) => Some(*x),
        Some(Value::Integer(n)) => Some(*n as f64),
        Some(other) => {
            errors.push(format!("{section}.{key}: expected a number, got {}", other.type_str()));
            None
        }
    }
}

fn get_usize(table: &toml::value::Table, key: &str, section: &str, errors: &mut Vec<String>) -> Option<usize> {
    match table.get(key) {
        None => None,
        Some(Value::Integer(n)) if *n >= 0 => Some(*n as usize),
        Some(other) => {
            errors.push(format!(
                "{section}.{key}: expected a nonnegative integer, got {other}"
            ));
            None
        }
    }
}

fn get_bool(table: &toml::value::Table, key: &str, section: &str, errors: &mut Vec<String>) -> Option<bool> {
    match table.get(key) {
        None => None,
        Some(Value::Boolean(b)) => Some(*b),
        Some(other) => {
            errors.push(format!("{section}.{key}: expected a boolean, got {}", other.type_str()));
            None
        }
    }
}

fn require_positive(name: &str, value: f64, errors: &mut Vec<String>) -> f64 {
    if !(value > 0.0) || !value.is_finite() {
        errors.push(format!("{name}: must be > 0 (got {value})"));
    }
    value
}

fn parse_physics(section: Option<&Value>, errors: &mut Vec<String>) -> Physics {
    let mut physics = Physics::default();
    let Some(value) = section else { return physics };
    let Some(table) = value.as_table() else {
        errors.push("[physics] must be a table".into());
        return physics;
    };
    check_keys(table.keys(), &["kt", "eta", "mu"], "physics", errors);
    if let Some(kt) = get_f64(table, "kt", "physics", errors) {
        physics.kt = require_positive("physics.kt", kt, errors);
    }
    if let Some(eta) = get_f64(table, "eta", "physics", errors) {
        physics.eta = require_positive("physics.eta", eta, errors);
    }
    if let Some(mu) = get_f64(table, "mu", "physics", errors) {
        if !mu.is_finite() {
            errors.push(format!("physics.mu: must be finite (got {mu})"));
        }
        physics.mu = mu;
    }
    physics
}

fn parse_contour(section: Option<&Value>, errors: &mut Vec<String>) -> ContourSpec {
    let mut contour = ContourSpec::default();
    let Some(value) = section else { return contour };
    let Some(table) = value.as_table() else {
        errors.push("[contour] must be a table".into());
        return contour;
    };
    check_keys(
        table.keys(),
        &["n_circle", "n_line", "n_poles", "e_bottom"],
        "contour",
        errors,
    );
    if let Some(n) = get_usize(table, "n_circle", "contour", errors) {
        contour.n_circle = n;
    }
    if let Some(n) = get_usize(table, "n_line", "contour", errors) {
        contour.n_line = n;
    }
    if let Some(n) = get_usize(table, "n_poles", "contour", errors) {
        contour.n_poles = n;
    }
    if let Some(e) = get_f64(table, "e_bottom", "contour", errors) {
        contour.e_bottom = Some(e);
    }
    if let Err(e) = contour.validate() {
        errors.push(format!("contour: {e}"));
    }
    contour
}

fn parse_scf(section: Option<&Value>, errors: &mut Vec<String>) -> (ScfSettings, bool) {
    let mut scf = ScfSettings::default();
    let mut warm_start = false;
    let Some(value) = section else { return (scf, warm_start) };
    let Some(table) = value.as_table() else {
        errors.push("[scf] must be a table".into());
        return (scf, warm_start);
    };
    check_keys(
        table.keys(),
        &["mixing", "tol", "max_iter", "init_moment", "warm_start"],
        "scf",
        errors,
    );
    if let Some(x) = get_f64(table, "mixing", "scf", errors) {
        scf.mixing = x;
    }
    if let Some(x) = get_f64(table, "tol", "scf", errors) {
        scf.tol = x;
    }
    if let Some(n) = get_usize(table, "max_iter", "scf", errors) {
        scf.max_iter = n;
    }
    if let Some(x) = get_f64(table, "init_moment", "scf", errors) {
        scf.init_moment = x;
    }
    if let Some(b) = get_bool(table, "warm_start", "scf", errors) {
        warm_start = b;
    }
    if let Err(e) = scf.validate() {
        errors.push(format!("scf: {e}"));
    }
    (scf, warm_start)
}

fn parse_output(section: Option<&Value>, errors: &mut Vec<String>) -> OutputSettings {
    let mut output = OutputSettings::default();
    let Some(value) = section else { return output };
    let Some(table) = value.as_table() else {
        errors.push("[output] must be a table".into());
        return output;
    };
    check_keys(table.keys(), &["dir", "precision"], "output", errors);
    match table.get("dir") {
        Some(Value::String(s)) => output.dir = PathBuf::from(s),
        Some(other) => errors.push(format!("output.dir: expected a string, got {}", other.type_str())),
        None => {}
    }
    if let Some(p) = get_usize(table, "precision", "output", errors) {
        if !(1..=17).contains(&p) {
            errors.push(format!("output.precision: must be in 1..=17 (got {p})"));
        } else {
            output.precision = p;
        }
    }
    output
}

fn parse_complex_entry(v: &Value, at: &str, errors: &mut Vec<String>) -> Complex64 {
    match v {
        Value::Float(x) => Complex64::new(*x, 0.0),
        Value::Integer(n) => Complex64::new(*n as f64, 0.0),
        Value::Array(pair) if pair.len() == 2 => {
            let mut parts = [0.0; 2];
            for (slot, item) in parts.iter_mut().zip(pair.iter()) {
                match item {
                    Value::Float(x) => *slot = *x,
                    Value::Integer(n) => *slot = *n as f64,
                    other => {
                        errors.push(format!("{at}: complex entry components must be numbers, got {}", other.type_str()));
                        return Complex64::new(0.0, 0.0);
                    }
                }
            }
            Complex64::new(parts[0], parts[1])
        }
        other => {
            errors.push(format!(
                "{at}: expected a number or a [re, im] pair, got {}",
                other.type_str()
            ));
            Complex64::new(0.0, 0.0)
        }
    }
}

fn parse_matrix(table: &toml::value::Table, key: &str, section: &str, errors: &mut Vec<String>) -> Option<CMat> {
    let value = table.get(key)?;
    let Some(rows) = value.as_array() else {
        errors.push(format!("{section}.{key}: expected an array of rows"));
        return None;
    };
    let mut parsed: Vec<Vec<Complex64>> = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let Some(entries) = row.as_array() else {
            errors.push(format!("{section}.{key}: row {i} must be an array"));
            return None;
        };
        parsed.push(
            entries
                .iter()
                .map(|e| parse_complex_entry(e, &format!("{section}.{key}[{i}]"), errors))
                .collect(),
        );
    }
    match CMat::from_rows(&parsed) {
        Ok(m) => Some(m),
        Err(e) => {
            errors.push(format!("{section}.{key}: {e}"));
            None
        }
    }
}

fn parse_lead(table: &toml::value::Table, section: &str, mu: f64, errors: &mut Vec<String>) -> Option<LeadSpec> {
    check_keys(
        table.keys(),
        &["h00", "h01", "exchange", "magnetization_sign"],
        section,
        errors,
    );
    let h00 = parse_matrix(table, "h00", section, errors);
    let h01 = parse_matrix(table, "h01", section, errors);
    let exchange = get_f64(table, "exchange", section, errors).unwrap_or(0.0);
    let sign = match table.get("magnetization_sign") {
        None => 1i8,
        Some(Value::Integer(1)) => 1,
        Some(Value::Integer(-1)) => -1,
        Some(other) => {
            errors.push(format!("{section}.magnetization_sign: must be 1 or -1, got {other}"));
            1
        }
    };
    let (Some(h00), Some(h01)) = (h00, h01) else {
        if !table.contains_key("h00") {
            errors.push(format!("{section}.h00: required"));
        }
        if !table.contains_key("h01") {
            errors.push(format!("{section}.h01: required"));
        }
        return None;
    };
    match LeadSpec::new(h00, h01, exchange, mu, sign) {
        Ok(lead) => Some(lead),
        Err(e) => {
            errors.push(format!("{section}: {e}"));
            None
        }
    }
}

fn parse_model(
    section: Option<&Value>,
    physics: &Physics,
    errors: &mut Vec<String>,
) -> Option<(ModelSpec, ModelDescription)> {
    let Some(value) = section else {
        errors.push("[model] section is required".into());
        return None;
    };
    let Some(table) = value.as_table() else {
        errors.push("[model] must be a table".into());
        return None;
    };
    check_keys(
        table.keys(),
        &["preset", "left_lead", "right_lead", "device", "distance_law"],
        "model",
        errors,
    );

    let preset_name = match table.get("preset") {
        Some(Value::String(s)) => Some(s.clone()),
        Some(other) => {
            errors.push(format!("model.preset: expected a string, got {}", other.type_str()));
            None
        }
        None => None,
    };
    let has_explicit = ["left_lead", "right_lead", "device", "distance_law"]
        .iter()
        .any(|k| table.contains_key(*k));

    if let Some(name) = preset_name {
        if has_explicit {
            errors.push("model: give either `preset` or explicit lead/device tables, not both".into());
            return None;
        }
        return match presets::by_name(&name) {
            Some(mut spec) => {
                spec.left.mu = physics.mu;
                spec.right.mu = physics.mu;
                Some((spec, ModelDescription::Preset { name }))
            }
            None => {
                errors.push(format!(
                    "model.preset: unknown preset `{name}` (available: {})",
                    presets::names().join(", ")
                ));
                None
            }
        };
    }

    // explicit model path
    let mut ok = true;
    let left = match table.get("left_lead").and_then(Value::as_table) {
        Some(t) => parse_lead(t, "model.left_lead", physics.mu, errors),
        None => {
            errors.push("model.left_lead: required for an explicit model".into());
            ok = false;
            None
        }
    };
    let right = match table.get("right_lead").and_then(Value::as_table) {
        Some(t) => parse_lead(t, "model.right_lead", physics.mu, errors),
        None => {
            errors.push("model.right_lead: required for an explicit model".into());
            ok = false;
            None
        }
    };
    let law = match table.get("distance_law").and_then(Value::as_table) {
        Some(t) => {
            check_keys(t.keys(), &["t0", "beta", "d0"], "model.distance_law", errors);
            let t0 = get_f64(t, "t0", "model.distance_law", errors).unwrap_or(1.0);
            let beta = get_f64(t, "beta", "model.distance_law", errors).unwrap_or(1.0);
            let d0 = get_f64(t, "d0", "model.distance_law", errors).unwrap_or(2.05);
            match DistanceLaw::new(t0, beta, d0) {
                Ok(law) => Some(law),
                Err(e) => {
                    errors.push(format!("model.distance_law: {e}"));
                    None
                }
            }
        }
        None => {
            errors.push("model.distance_law: required for an explicit model".into());
            ok = false;
            None
        }
    };
    let device = match table.get("device").and_then(Value::as_table) {
        Some(t) => {
            check_keys(
                t.keys(),
                &["hamiltonian", "central_index", "u_hubbard", "coupling_left", "coupling_right"],
                "model.device",
                errors,
            );
            let h = parse_matrix(t, "hamiltonian", "model.device", errors);
            let central = get_usize(t, "central_index", "model.device", errors).unwrap_or(0);
            let u = get_f64(t, "u_hubbard", "model.device", errors).unwrap_or(0.0);
            let cl = parse_matrix(t, "coupling_left", "model.device", errors);
            let cr = parse_matrix(t, "coupling_right", "model.device", errors);
            match (h, cl, cr) {
                (Some(h), Some(cl), Some(cr)) => match DeviceSpec::new(h, central, u, cl, cr) {
                    Ok(dev) => Some(dev),
                    Err(e) => {
                        errors.push(format!("model.device: {e}"));
                        None
                    }
                },
                _ => {
                    for key in ["hamiltonian", "coupling_left", "coupling_right"] {
                        if !t.contains_key(key) {
                            errors.push(format!("model.device.{key}: required"));
                        }
                    }
                    None
                }
            }
        }
        None => {
            errors.push("model.device: required for an explicit model".into());
            ok = false;
            None
        }
    };
    let _ = ok;
    match (device, left, right, law) {
        (Some(device), Some(left), Some(right), Some(law)) => Some((
            ModelSpec {
                device,
                left,
                right,
                law,
            },
            ModelDescription::Explicit,
        )),
        _ => None,
    }
}

fn parse_alignment(v: &Value, at: &str, errors: &mut Vec<String>) -> Option<Alignment> {
    match v.as_str() {
        Some("pc") | Some("PC") => Some(Alignment::Pc),
        Some("apc") | Some("APC") => Some(Alignment::Apc),
        _ => {
            errors.push(format!("{at}: expected \"pc\" or \"apc\", got {v}"));
            None
        }
    }
}

fn parse_alignments(table: &toml::value::Table, at: &str, errors: &mut Vec<String>) -> Vec<Alignment> {
    match table.get("alignments") {
        None => vec![Alignment::Pc, Alignment::Apc],
        Some(Value::Array(items)) if !items.is_empty() => {
            let mut out = Vec::new();
            for (i, item) in items.iter().enumerate() {
                if let Some(a) = parse_alignment(item, &format!("{at}.alignments[{i}]"), errors) {
                    if out.contains(&a) {
                        errors.push(format!("{at}.alignments: duplicate entry"));
                    } else {
                        out.push(a);
                    }
                }
            }
            out
        }
        Some(other) => {
            errors.push(format!("{at}.alignments: expected a nonempty array, got {other}"));
            vec![Alignment::Pc, Alignment::Apc]
        }
    }
}

fn parse_range(
    table: &toml::value::Table,
    at: &str,
    min_key: &str,
    max_key: &str,
    n_key: &str,
    default_n: usize,
    errors: &mut Vec<String>,
) -> (f64, f64, usize) {
    let lo = get_f64(table, min_key, at, errors).unwrap_or_else(|| {
        errors.push(format!("{at}.{min_key}: required"));
        0.0
    });
    let hi = get_f64(table, max_key, at, errors).unwrap_or_else(|| {
        errors.push(format!("{at}.{max_key}: required"));
        0.0
    });
    let n = get_usize(table, n_key, at, errors).unwrap_or(default_n);
    if n == 0 {
        errors.push(format!("{at}.{n_key}: must be >= 1"));
    }
    if n > 1 && !(lo < hi) {
        errors.push(format!(
            "{at}: range must be strictly increasing ({min_key} = {lo}, {max_key} = {hi})"
        ));
    }
    if !lo.is_finite() || !hi.is_finite() {
        errors.push(format!("{at}: range endpoints must be finite"));
    }
    (lo, hi, n.max(1))
}

fn parse_tasks(section: Option<&Value>, errors: &mut Vec<String>) -> Vec<Task> {
    let Some(value) = section else {
        errors.push("at least one [[task]] is required".into());
        return Vec::new();
    };
    let Some(items) = value.as_array() else {
        errors.push("task: expected an array of tables ([[task]])".into());
        return Vec::new();
    };
    let mut tasks = Vec::new();
    let mut seen = BTreeSet::new();
    for (idx, item) in items.iter().enumerate() {
        let at = format!("task[{idx}]");
        let Some(table) = item.as_table() else {
            errors.push(format!("{at}: must be a table"));
            continue;
        };
        let kind = match table.get("kind").and_then(Value::as_str) {
            Some(k) => k.to_string(),
            None => {
                errors.push(format!("{at}.kind: required string"));
                continue;
            }
        };
        if !seen.insert(kind.clone()) {
            errors.push(format!(
                "{at}: duplicate task kind `{kind}` (each kind writes a fixed file name and may appear once)"
            ));
            continue;
        }
        let single_alignment = |table: &toml::value::Table, errors: &mut Vec<String>| {
            table
                .get("alignment")
                .and_then(|v| parse_alignment(v, &format!("{at}.alignment"), errors))
                .unwrap_or(Alignment::Pc)
        };
        let single_distance = |table: &toml::value::Table, errors: &mut Vec<String>| {
            match get_f64(table, "distance", &at, errors) {
                Some(d) if d.is_finite() => d,
                Some(d) => {
                    errors.push(format!("{at}.distance: must be finite (got {d})"));
                    d
                }
                None => {
                    errors.push(format!("{at}.distance: required"));
                    2.05
                }
            }
        };
        match kind.as_str() {
            "transmission" | "dos" => {
                check_keys(
                    table.keys(),
                    &["kind", "alignment", "distance", "e_min", "e_max", "n_energies"],
                    &at,
                    errors,
                );
                let alignment = single_alignment(table, errors);
                let distance = single_distance(table, errors);
                let (e_min, e_max, n_energies) =
                    parse_range(table, &at, "e_min", "e_max", "n_energies", 201, errors);
                let task = if kind == "transmission" {
                    Task::Transmission {
                        alignment,
                        distance,
                        e_min,
                        e_max,
                        n_energies,
                    }
                } else {
                    Task::Dos {
                        alignment,
                        distance,
                        e_min,
                        e_max,
                        n_energies,
                    }
                };
                tasks.push(task);
            }
            "conductance" => {
                check_keys(table.keys(), &["kind", "alignment", "distance"], &at, errors);
                tasks.push(Task::Conductance {
                    alignment: single_alignment(table, errors),
                    distance: single_distance(table, errors),
                });
            }
            "moment" => {
                check_keys(
                    table.keys(),
                    &["kind", "d_min", "d_max", "n_distances", "alignments"],
                    &at,
                    errors,
                );
                let (d_min, d_max, n_distances) =
                    parse_range(table, &at, "d_min", "d_max", "n_distances", 30, errors);
                tasks.push(Task::Moment {
                    d_min,
                    d_max,
                    n_distances,
                    alignments: parse_alignments(table, &at, errors),
                });
            }
            "mr" => {
                check_keys(
                    table.keys(),
                    &["kind", "d_min", "d_max", "n_distances"],
                    &at,
                    errors,
                );
                let (d_min, d_max, n_distances) =
                    parse_range(table, &at, "d_min", "d_max", "n_distances", 30, errors);
                tasks.push(Task::Mr {
                    d_min,
                    d_max,
                    n_distances,
                });
            }
            "iv" => {
                check_keys(
                    table.keys(),
                    &["kind", "alignment", "distance", "v_min", "v_max", "n_biases", "n_energy_points"],
                    &at,
                    errors,
                );
                let alignment = single_alignment(table, errors);
                let distance = single_distance(table, errors);
                let (v_min, v_max, n_biases) =
                    parse_range(table, &at, "v_min", "v_max", "n_biases", 41, errors);
                let n_energy_points = get_usize(table, "n_energy_points", &at, errors).unwrap_or(200);
                if n_energy_points < 2 {
                    errors.push(format!("{at}.n_energy_points: must be >= 2"));
                }
                tasks.push(Task::Iv {
                    alignment,
                    distance,
                    v_min,
                    v_max,
                    n_biases,
                    n_energy_points,
                });
            }
            "distance_sweep" => {
                check_keys(
                    table.keys(),
                    &["kind", "d_min", "d_max", "n_distances", "alignments"],
                    &at,
                    errors,
                );
                let (d_min, d_max, n_distances) =
                    parse_range(table, &at, "d_min", "d_max", "n_distances", 30, errors);
                tasks.push(Task::DistanceSweep {
                    d_min,
                    d_max,
                    n_distances,
                    alignments: parse_alignments(table, &at, errors),
                });
            }
            other => {
                errors.push(format!(
                    "{at}.kind: unknown kind `{other}` (expected transmission, dos, conductance, moment, mr, iv, distance_sweep)"
                ));
            }
        }
    }
    if tasks.is_empty() && errors.is_empty() {
        errors.push("at least one [[task]] is required".into());
    }
    tasks
}

/// Dimensional fail-fast checks before any computation starts.
fn validate_tasks_against_model(tasks: &[Task], model: &ModelSpec, errors: &mut Vec<String>) {
    let n = model.device.n_sites();
    if model.device.coupling_left.rows() != model.left.n_orb() {
        errors.push(format!(
            "model: coupling_left has {} rows but the left lead has {} orbitals",
            model.device.coupling_left.rows(),
            model.left.n_orb()
        ));
    }
    if model.device.coupling_right_template.rows() != model.right.n_orb() {
        errors.push(format!(
            "model: coupling_right has {} rows but the right lead has {} orbitals",
            model.device.coupling_right_template.rows(),
            model.right.n_orb()
        ));
    }
    let _ = (tasks, n);
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[model]
preset = "copc-analog"

[[task]]
kind = "conductance"
alignment = "pc"
distance = 2.05
"#;

    #[test]
    fn minimal_config_resolves_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.contour.n_poles, 16);
        assert_eq!(cfg.contour.n_circle, 16);
        assert_eq!(cfg.contour.n_line, 16);
        assert_eq!(cfg.physics.kt, 0.025);
        assert_eq!(cfg.physics.eta, 1e-6);
        assert_eq!(cfg.scf.max_iter, 500);
        assert_eq!(cfg.output.precision, 9);
        assert!(!cfg.warm_start);
        assert_eq!(cfg.tasks.len(), 1);
    }

    #[test]
    fn invalid_fields_are_all_reported() {
        let text = r#"
[model]
preset = "no-such-preset"

[physics]
kt = -1.0
etaa = 1.0

[[task]]
kind = "iv"
alignment = "pc"
distance = 2.05
v_min = 0.2
v_max = -0.2
n_biases = 5
"#;
        let errs = parse_config(text).unwrap_err();
        let text = errs.join("\n");
        assert!(text.contains("physics.kt"), "{text}");
        assert!(text.contains("unknown key `physics.etaa`"), "{text}");
        assert!(text.contains("unknown preset"), "{text}");
        assert!(text.contains("strictly increasing"), "{text}");
        assert!(errs.len() >= 4);
    }

    #[test]
    fn unknown_keys_are_errors_not_warnings() {
        let text = r#"
[model]
preset = "pristine-chain"
extra = 1

[[task]]
kind = "conductance"
alignment = "pc"
distance = 2.05
"#;
        let errs = parse_config(text).unwrap_err();
        assert!(errs.iter().any(|e| e.contains("unknown key `model.extra`")));
    }

    #[test]
    fn duplicate_task_kinds_rejected() {
        let text = r#"
[model]
preset = "pristine-chain"

[[task]]
kind = "conductance"
alignment = "pc"
distance = 2.05

[[task]]
kind = "conductance"
alignment = "apc"
distance = 3.0
"#;
        let errs = parse_config(text).unwrap_err();
        assert!(errs.iter().any(|e| e.contains("duplicate task kind")));
    }

    #[test]
    fn explicit_model_parses_and_checks_hermiticity() {
        let text = r#"
[model.left_lead]
h00 = [[0.0]]
h01 = [[-1.0]]
exchange = 0.0

[model.right_lead]
h00 = [[0.0]]
h01 = [[-1.0]]
exchange = 0.0

[model.device]
hamiltonian = [[0.0, 0.5], [0.4, 0.0]]
central_index = 0
u_hubbard = 0.0
coupling_left = [[-1.0, 0.0]]
coupling_right = [[0.0, -1.0]]

[model.distance_law]
t0 = 1.0
beta = 1.0
d0 = 2.05

[[task]]
kind = "conductance"
alignment = "pc"
distance = 2.05
"#;
        let errs = parse_config(text).unwrap_err();
        assert!(errs.iter().any(|e| e.contains("not Hermitian")), "{errs:?}");

        let fixed = text.replace("[[0.0, 0.5], [0.4, 0.0]]", "[[0.0, 0.5], [0.5, 0.0]]");
        let cfg = parse_config(&fixed).unwrap();
        assert_eq!(cfg.model.device.n_sites(), 2);
        assert!(matches!(cfg.model_desc, ModelDescription::Explicit));
    }

    #[test]
    fn complex_entries_accept_pairs() {
        let text = r#"
[model.left_lead]
h00 = [[0.0]]
h01 = [[[-1.0, 0.25]]]
exchange = 0.0

[model.right_lead]
h00 = [[0.0]]
h01 = [[-1.0]]
exchange = 0.0

[model.device]
hamiltonian = [[0.0]]
central_index = 0
u_hubbard = 0.0
coupling_left = [[-1.0]]
coupling_right = [[-1.0]]

[model.distance_law]
t0 = 1.0
beta = 1.0
d0 = 2.05

[[task]]
kind = "conductance"
alignment = "pc"
distance = 2.05
"#;
        let cfg = parse_config(text).unwrap();
        let h01 = &cfg.model.left.h01;
        assert_eq!(h01[(0, 0)], Complex64::new(-1.0, 0.25));
    }
}

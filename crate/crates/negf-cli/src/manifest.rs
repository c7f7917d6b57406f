//! Run manifest: resolved configuration, per-task timing and convergence,
//! written as JSON next to the data files. Timestamps live only here.

use serde::Serialize;

use crate::config::{ModelDescription, OutputSettings, Physics, RunConfig};
use negf_core::cmatrix::CMat;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub engine_version: &'static str,
    pub created_unix_ms: u128,
    pub threads_requested: usize,
    pub status: String,
    pub resolved: ResolvedConfig,
    pub tasks: Vec<TaskReport>,
}

#[derive(Debug, Serialize)]
pub struct ResolvedConfig {
    pub model: ModelDescription,
    pub model_detail: ModelDetail,
    pub physics: Physics,
    pub contour: ContourReport,
    pub scf: ScfReport,
    pub warm_start: bool,
    pub output: OutputSettings,
    /// Conversion used for SI current columns, siemens per (e²/h).
    pub conductance_quantum_siemens: f64,
}

#[derive(Debug, Serialize)]
pub struct ModelDetail {
    pub n_sites: usize,
    pub central_index: usize,
    pub u_hubbard: f64,
    pub device_hamiltonian: Vec<Vec<[f64; 2]>>,
    pub coupling_left: Vec<Vec<[f64; 2]>>,
    pub coupling_right_template: Vec<Vec<[f64; 2]>>,
    pub left_lead: LeadReport,
    pub right_lead: LeadReport,
    pub distance_law: LawReport,
}

#[derive(Debug, Serialize)]
pub struct LeadReport {
    pub h00: Vec<Vec<[f64; 2]>>,
    pub h01: Vec<Vec<[f64; 2]>>,
    pub exchange: f64,
    pub mu: f64,
    pub magnetization_sign: i8,
}

#[derive(Debug, Serialize)]
pub struct LawReport {
    pub t0: f64,
    pub beta: f64,
    pub d0: f64,
}

#[derive(Debug, Serialize)]
pub struct ContourReport {
    pub n_circle: usize,
    pub n_line: usize,
    pub n_poles: usize,
    pub kt: f64,
    /// Fixed bottom if configured; otherwise the automatic policy applies
    /// per model (lowest spectral bound minus 5 eV).
    pub e_bottom: Option<f64>,
    pub e_bottom_policy: &'static str,
}

#[derive(Debug, Serialize)]
pub struct ScfReport {
    pub mixing: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub init_moment: f64,
}

#[derive(Debug, Serialize)]
pub struct TaskReport {
    pub kind: String,
    pub file: String,
    pub status: String,
    pub wall_ms: u128,
    pub rows_written: usize,
    pub rows_failed: usize,
    pub notes: Vec<String>,
}

fn matrix_json(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn resolved_config(config: &RunConfig) -> ResolvedConfig {
    let model = &config.model;
    ResolvedConfig {
        model: config.model_desc.clone(),
        model_detail: ModelDetail {
            n_sites: model.device.n_sites(),
            central_index: model.device.central_index,
            u_hubbard: model.device.u_hubbard,
            device_hamiltonian: matrix_json(&model.device.h_dev),
            coupling_left: matrix_json(&model.device.coupling_left),
            coupling_right_template: matrix_json(&model.device.coupling_right_template),
            left_lead: LeadReport {
                h00: matrix_json(&model.left.h00),
                h01: matrix_json(&model.left.h01),
                exchange: model.left.exchange,
                mu: model.left.mu,
                magnetization_sign: model.left.magnetization_sign,
            },
            right_lead: LeadReport {
                h00: matrix_json(&model.right.h00),
                h01: matrix_json(&model.right.h01),
                exchange: model.right.exchange,
                mu: model.right.mu,
                magnetization_sign: model.right.magnetization_sign,
            },
            distance_law: LawReport {
                t0: model.law.t0,
                beta: model.law.beta,
                d0: model.law.d0,
            },
        },
        physics: config.physics,
        contour: ContourReport {
            n_circle: config.contour.n_circle,
            n_line: config.contour.n_line,
            n_poles: config.contour.n_poles,
            kt: config.contour.kt,
            e_bottom: config.contour.e_bottom,
            e_bottom_policy: if config.contour.e_bottom.is_some() {
                "fixed"
            } else {
                "auto: min spectral bound - 5 eV"
            },
        },
        scf: ScfReport {
            mixing: config.scf.mixing,
            tol: config.scf.tol,
            max_iter: config.scf.max_iter,
            init_moment: config.scf.init_moment,
        },
        warm_start: config.warm_start,
        output: OutputSettings {
            dir: config.output.dir.clone(),
            precision: config.output.precision,
        },
        conductance_quantum_siemens: negf_core::observables::G0_SIEMENS,
    }
}

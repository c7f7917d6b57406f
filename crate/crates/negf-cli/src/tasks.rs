//! Task execution: parallel evaluation over energies, bias points, and
//! sweep rows with a deterministic, order-preserving gather, plus the CSV
//! writers. The contour boundary kT is taken from the physics section so
//! every task shares one electronic temperature.

use std::fmt::Write as _;

use rayon::prelude::*;

use negf_core::density::{scf_moment, ContourSpec, ScfSettings};
use negf_core::model::{Alignment, ModelSpec, SpinChannel};
use negf_core::observables::{
    conductance, converged_model, current_record, linspace, magnetoresistance,
};
use negf_core::transport::{dos_record, transmission_record};

use crate::config::{RunConfig, Task};
use crate::format::format_num;

pub struct TaskOutput {
    pub csv: String,
    pub rows_written: usize,
    pub rows_failed: usize,
    pub notes: Vec<String>,
    /// Whole-task failure; the CSV is not written.
    pub fatal: Option<String>,
}

impl TaskOutput {
    fn fatal(message: String) -> Self {
        TaskOutput {
            csv: String::new(),
            rows_written: 0,
            rows_failed: 0,
            notes: Vec::new(),
            fatal: Some(message),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.fatal.is_none() && self.rows_failed == 0
    }
}

pub fn execute(task: &Task, config: &RunConfig) -> TaskOutput {
    match task {
        Task::Transmission {
            alignment,
            distance,
            e_min,
            e_max,
            n_energies,
        } => spectral_task(config, *alignment, *distance, *e_min, *e_max, *n_energies, true),
        Task::Dos {
            alignment,
            distance,
            e_min,
            e_max,
            n_energies,
        } => spectral_task(config, *alignment, *distance, *e_min, *e_max, *n_energies, false),
        Task::Conductance { alignment, distance } => conductance_task(config, *alignment, *distance),
        Task::Moment {
            d_min,
            d_max,
            n_distances,
            alignments,
        } => moment_task(config, *d_min, *d_max, *n_distances, alignments),
        Task::Mr {
            d_min,
            d_max,
            n_distances,
        } => mr_task(config, *d_min, *d_max, *n_distances),
        Task::Iv {
            alignment,
            distance,
            v_min,
            v_max,
            n_biases,
            n_energy_points,
        } => iv_task(
            config,
            *alignment,
            *distance,
            *v_min,
            *v_max,
            *n_biases,
            *n_energy_points,
        ),
        Task::DistanceSweep {
            d_min,
            d_max,
            n_distances,
            alignments,
        } => distance_sweep_task(config, *d_min, *d_max, *n_distances, alignments),
    }
}

fn model_at(
    config: &RunConfig,
    alignment: Alignment,
    distance: f64,
    scf: &ScfSettings,
) -> Result<(negf_core::model::JunctionModel, negf_core::density::MomentResult), negf_core::Error> {
    let ModelSpec {
        device,
        left,
        right,
        law,
    } = &config.model;
    converged_model(
        device,
        left,
        right,
        alignment,
        distance,
        law,
        scf,
        &contour_of(config),
        config.numerics(),
    )
}

fn contour_of(config: &RunConfig) -> ContourSpec {
    ContourSpec {
        kt: config.physics.kt,
        ..config.contour
    }
}

fn spectral_task(
    config: &RunConfig,
    alignment: Alignment,
    distance: f64,
    e_min: f64,
    e_max: f64,
    n_energies: usize,
    want_transmission: bool,
) -> TaskOutput {
    let prec = config.output.precision;
    let (model, moment) = match model_at(config, alignment, distance, &config.scf) {
        Ok(pair) => pair,
        Err(e) => return TaskOutput::fatal(format!("mean-field convergence failed: {e}")),
    };
    let energies = linspace(e_min, e_max, n_energies);
    let n_sites = model.n_sites();

    let mut csv = String::new();
    if want_transmission {
        let mut header = String::from("energy_ev,spin,transmission");
        for k in 1..=n_sites {
            let _ = write!(header, ",channel_{k}");
        }
        csv.push_str(&header);
        csv.push('\n');
    } else {
        let mut header = String::from("energy_ev,spin,dos_total");
        for k in 1..=n_sites {
            let _ = write!(header, ",site_{k}");
        }
        csv.push_str(&header);
        csv.push('\n');
    }

    let rows: Vec<Result<String, String>> = energies
        .par_iter()
        .map(|&e| -> Result<String, String> {
            let mut out = String::new();
            if want_transmission {
                let rec = transmission_record(&model, e).map_err(|err| format!("E = {e}: {err}"))?;
                for spin in SpinChannel::BOTH {
                    let _ = write!(
                        out,
                        "{},{},{}",
                        format_num(e, prec),
                        spin.label(),
                        format_num(*rec.t_spin.get(spin), prec)
                    );
                    for value in rec.channels.get(spin) {
                        let _ = write!(out, ",{}", format_num(*value, prec));
                    }
                    out.push('\n');
                }
            } else {
                let rec = dos_record(&model, e).map_err(|err| format!("E = {e}: {err}"))?;
                for spin in SpinChannel::BOTH {
                    let _ = write!(
                        out,
                        "{},{},{}",
                        format_num(e, prec),
                        spin.label(),
                        format_num(*rec.total.get(spin), prec)
                    );
                    for value in rec.per_site.get(spin) {
                        let _ = write!(out, ",{}", format_num(*value, prec));
                    }
                    out.push('\n');
                }
            }
            Ok(out)
        })
        .collect();

    let mut written = 0;
    let mut failed = 0;
    let mut notes = vec![format!(
        "alignment {}, d = {} A, scf {} in {} iterations",
        alignment.label(),
        distance,
        if moment.converged { "converged" } else { "NOT converged" },
        moment.iterations
    )];
    for row in rows {
        match row {
            Ok(text) => {
                csv.push_str(&text);
                written += 1;
            }
            Err(e) => {
                failed += 1;
                notes.push(format!("row failed: {e}"));
            }
        }
    }
    TaskOutput {
        csv,
        rows_written: written,
        rows_failed: failed,
        notes,
        fatal: None,
    }
}

fn conductance_task(config: &RunConfig, alignment: Alignment, distance: f64) -> TaskOutput {
    let prec = config.output.precision;
    let (model, moment) = match model_at(config, alignment, distance, &config.scf) {
        Ok(pair) => pair,
        Err(e) => return TaskOutput::fatal(format!("mean-field convergence failed: {e}")),
    };
    match conductance(&model) {
        Ok(g) => {
            let mut csv = String::from("alignment,distance_angstrom,g_up,g_down,g_total\n");
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                alignment.label(),
                format_num(distance, prec),
                format_num(g.g_spin.up, prec),
                format_num(g.g_spin.down, prec),
                format_num(g.g_total, prec)
            );
            TaskOutput {
                csv,
                rows_written: 1,
                rows_failed: 0,
                notes: vec![format!(
                    "scf {} in {} iterations",
                    if moment.converged { "converged" } else { "NOT converged" },
                    moment.iterations
                )],
                fatal: None,
            }
        }
        Err(e) => TaskOutput::fatal(format!("conductance failed: {e}")),
    }
}

fn moment_task(
    config: &RunConfig,
    d_min: f64,
    d_max: f64,
    n_distances: usize,
    alignments: &[Alignment],
) -> TaskOutput {
    let prec = config.output.precision;
    let distances = linspace(d_min, d_max, n_distances);
    let spec = &config.model;
    let contour = contour_of(config);
    let numerics = config.numerics();

    type MomentRow = Vec<Result<(Alignment, f64, bool, usize), String>>;
    let evaluate = |d: f64, scf: &ScfSettings| -> MomentRow {
        alignments
            .iter()
            .map(|&alignment| {
                scf_moment(
                    &spec.device,
                    &spec.left,
                    &spec.right,
                    alignment,
                    d,
                    &spec.law,
                    scf,
                    &contour,
                    numerics,
                )
                .map(|m| (alignment, m.moment_central, m.converged, m.iterations))
                .map_err(|e| format!("d = {d}, {}: {e}", alignment.label()))
            })
            .collect()
    };

    let rows: Vec<(f64, MomentRow)> = if config.warm_start {
        // warm starting chains the initial moment along the sweep;
        // evaluation is sequential by construction
        let mut out = Vec::with_capacity(distances.len());
        let mut scf = config.scf;
        for &d in &distances {
            let row = evaluate(d, &scf);
            if let Some(Ok((_, m, _, _))) = row.first() {
                scf.init_moment = m.clamp(-1.0, 1.0);
            }
            out.push((d, row));
        }
        out
    } else {
        distances
            .par_iter()
            .map(|&d| (d, evaluate(d, &config.scf)))
            .collect()
    };

    let mut csv = String::from("d_angstrom,alignment,moment,converged\n");
    let mut written = 0;
    let mut failed = 0;
    let mut notes = Vec::new();
    if config.warm_start {
        notes.push("warm_start on: rows evaluated sequentially".into());
    }
    let mut unconverged = 0usize;
    for (d, row) in rows {
        for item in row {
            match item {
                Ok((alignment, moment, converged, _iters)) => {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{}",
                        format_num(d, prec),
                        alignment.label(),
                        format_num(moment, prec),
                        converged
                    );
                    if !converged {
                        unconverged += 1;
                    }
                    written += 1;
                }
                Err(e) => {
                    failed += 1;
                    notes.push(format!("row failed: {e}"));
                }
            }
        }
    }
    if unconverged > 0 {
        notes.push(format!("{unconverged} rows flagged unconverged"));
    }
    TaskOutput {
        csv,
        rows_written: written,
        rows_failed: failed,
        notes,
        fatal: None,
    }
}

fn mr_task(config: &RunConfig, d_min: f64, d_max: f64, n_distances: usize) -> TaskOutput {
    let prec = config.output.precision;
    let distances = linspace(d_min, d_max, n_distances);
    let spec = &config.model;
    let contour = contour_of(config);
    let numerics = config.numerics();

    let rows: Vec<(f64, Result<(f64, f64, f64), String>)> = distances
        .par_iter()
        .map(|&d| {
            let result = magnetoresistance(
                &spec.device,
                &spec.left,
                &spec.right,
                d,
                &spec.law,
                &config.scf,
                &contour,
                numerics,
            )
            .map(|r| (r.g_pc, r.g_apc, r.mr))
            .map_err(|e| format!("d = {d}: {e}"));
            (d, result)
        })
        .collect();

    let mut csv = String::from("d_angstrom,g_pc,g_apc,mr\n");
    let mut written = 0;
    let mut failed = 0;
    let mut notes = Vec::new();
    for (d, row) in rows {
        match row {
            Ok((g_pc, g_apc, mr)) => {
                let _ = writeln!(
                    csv,
                    "{},{},{},{}",
                    format_num(d, prec),
                    format_num(g_pc, prec),
                    format_num(g_apc, prec),
                    format_num(mr, prec)
                );
                written += 1;
            }
            Err(e) => {
                failed += 1;
                notes.push(format!("row failed: {e}"));
            }
        }
    }
    TaskOutput {
        csv,
        rows_written: written,
        rows_failed: failed,
        notes,
        fatal: None,
    }
}

#[allow(clippy::too_many_arguments)]
fn iv_task(
    config: &RunConfig,
    alignment: Alignment,
    distance: f64,
    v_min: f64,
    v_max: f64,
    n_biases: usize,
    n_energy_points: usize,
) -> TaskOutput {
    let prec = config.output.precision;
    let (model, moment) = match model_at(config, alignment, distance, &config.scf) {
        Ok(pair) => pair,
        Err(e) => return TaskOutput::fatal(format!("mean-field convergence failed: {e}")),
    };
    let biases = linspace(v_min, v_max, n_biases);
    let kt = config.physics.kt;

    let rows: Vec<Result<String, String>> = biases
        .par_iter()
        .map(|&v| {
            current_record(&model, v, n_energy_points, kt)
                .map(|rec| {
                    format!(
                        "{},{},{},{},{}\n",
                        format_num(v, prec),
                        format_num(rec.i_spin.up, prec),
                        format_num(rec.i_spin.down, prec),
                        format_num(rec.i_total, prec),
                        format_num(rec.i_total_si, prec)
                    )
                })
                .map_err(|e| format!("V = {v}: {e}"))
        })
        .collect();

    let mut csv = String::from("v_volts,i_up,i_down,i_total,i_total_si_amperes\n");
    let mut written = 0;
    let mut failed = 0;
    let mut notes = vec![format!(
        "alignment {}, d = {} A, scf {} in {} iterations",
        alignment.label(),
        distance,
        if moment.converged { "converged" } else { "NOT converged" },
        moment.iterations
    )];
    for row in rows {
        match row {
            Ok(text) => {
                csv.push_str(&text);
                written += 1;
            }
            Err(e) => {
                failed += 1;
                notes.push(format!("row failed: {e}"));
            }
        }
    }
    TaskOutput {
        csv,
        rows_written: written,
        rows_failed: failed,
        notes,
        fatal: None,
    }
}

fn distance_sweep_task(
    config: &RunConfig,
    d_min: f64,
    d_max: f64,
    n_distances: usize,
    alignments: &[Alignment],
) -> TaskOutput {
    let prec = config.output.precision;
    let distances = linspace(d_min, d_max, n_distances);
    let spec = &config.model;
    let contour = contour_of(config);
    let numerics = config.numerics();

    type GRow = Vec<Result<(Alignment, f64, f64, f64), String>>;
    let rows: Vec<(f64, GRow)> = distances
        .par_iter()
        .map(|&d| {
            let row = alignments
                .iter()
                .map(|&alignment| {
                    converged_model(
                        &spec.device,
                        &spec.left,
                        &spec.right,
                        alignment,
                        d,
                        &spec.law,
                        &config.scf,
                        &contour,
                        numerics,
                    )
                    .and_then(|(model, _)| conductance(&model))
                    .map(|g| (alignment, g.g_spin.up, g.g_spin.down, g.g_total))
                    .map_err(|e| format!("d = {d}, {}: {e}", alignment.label()))
                })
                .collect();
            (d, row)
        })
        .collect();

    let mut csv = String::from("d_angstrom,alignment,g_up,g_down,g_total\n");
    let mut written = 0;
    let mut failed = 0;
    let mut notes = Vec::new();
    for (d, row) in rows {
        for item in row {
            match item {
                Ok((alignment, up, down, total)) => {
                    let _ = writeln!(
                        csv,
                        "{},{},{},{},{}",
                        format_num(d, prec),
                        alignment.label(),
                        format_num(up, prec),
                        format_num(down, prec),
                        format_num(total, prec)
                    );
                    written += 1;
                }
                Err(e) => {
                    failed += 1;
                    notes.push(format!("row failed: {e}"));
                }
            }
        }
    }
    TaskOutput {
        csv,
        rows_written: written,
        rows_failed: failed,
        notes,
        fatal: None,
    }
}

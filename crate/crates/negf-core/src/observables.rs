//! Bias-window current integration, zero-bias conductance,
//! magnetoresistance vs distance, and sweep drivers.
//!
//! Currents are bookkept per spin in natural units of `(e/h)·eV`; the SI
//! conversion `e²/h = 3.874e-5 S` applies when the integration variable is
//! read in volts. Finite-bias transmission is approximated by the zero-bias
//! `T(E)` (coherent, non-self-consistent).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::density::{scf_moment, ContourSpec, MomentResult, ScfSettings};
use crate::error::Error;
use crate::model::{
    Alignment, DeviceSpec, DistanceLaw, JunctionModel, LeadSpec, Numerics, SpinChannel,
    SpinResolved,
};
use crate::transport::transmission;
use crate::Result;

/// Conductance quantum per spin channel, `e²/h`, in siemens.
pub const G0_SIEMENS: f64 = 3.874045865e-5;
/// Parallel conductance below this guard makes the MR ratio undefined.
pub const MR_GUARD_G0: f64 = 1e-14;

/// A bias point: `μ_L = μ + eV/2`, `μ_R = μ − eV/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasPoint {
    pub v: f64,
    pub mu_l: f64,
    pub mu_r: f64,
}

impl BiasPoint {
    pub fn new(mu: f64, v: f64) -> Self {
        BiasPoint {
            v,
            mu_l: mu + 0.5 * v,
            mu_r: mu - 0.5 * v,
        }
    }
}

/// Spin-resolved current at one bias point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IVRecord {
    pub v: f64,
    /// Per-spin currents in natural units, `(e/h)·eV`.
    pub i_spin: SpinResolved<f64>,
    pub i_total: f64,
    /// Total current in amperes.
    pub i_total_si: f64,
}

/// Spin-polarized Landauer current
/// `I_σ(V) = (e/h) ∫ T_σ(E) [f(E, μ_L) − f(E, μ_R)] dE`,
/// trapezoid on `n_points` uniform energies spanning the bias window padded
/// by `10 kT` on both sides. Natural units of `(e/h)·eV`.
pub fn current(
    model: &JunctionModel,
    spin: SpinChannel,
    v: f64,
    n_points: usize,
    kt: f64,
) -> Result<f64> {
    if n_points < 2 {
        return Err(Error::InvalidParameter(format!(
            "current: n_points must be >= 2, got {n_points}"
        )));
    }
    if !(kt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "current: kT must be > 0, got {kt}"
        )));
    }
    let bias = BiasPoint::new(model.mu, v);
    let lo = bias.mu_l.min(bias.mu_r) - 10.0 * kt;
    let hi = bias.mu_l.max(bias.mu_r) + 10.0 * kt;
    let h = (hi - lo) / (n_points as f64 - 1.0);
    let mut acc = 0.0;
    for k in 0..n_points {
        let e = lo + h * k as f64;
        let window =
            crate::density::fermi(e, bias.mu_l, kt) - crate::density::fermi(e, bias.mu_r, kt);
        let t = transmission(model, spin, e)?;
        let trap = if k == 0 || k == n_points - 1 { 0.5 } else { 1.0 };
        acc += trap * h * t * window;
    }
    Ok(acc)
}

/// Currents for both spins at one bias point.
pub fn current_record(
    model: &JunctionModel,
    v: f64,
    n_points: usize,
    kt: f64,
) -> Result<IVRecord> {
    let i_up = current(model, SpinChannel::Up, v, n_points, kt)?;
    let i_down = current(model, SpinChannel::Down, v, n_points, kt)?;
    let i_total = i_up + i_down;
    Ok(IVRecord {
        v,
        i_spin: SpinResolved::new(i_up, i_down),
        i_total,
        i_total_si: i_total * G0_SIEMENS,
    })
}

/// Zero-bias conductance per spin in units of `e²/h`: `G_σ = T_σ(E_F)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConductanceRecord {
    pub g_spin: SpinResolved<f64>,
    pub g_total: f64,
}

pub fn conductance(model: &JunctionModel) -> Result<ConductanceRecord> {
    let g_up = transmission(model, SpinChannel::Up, model.mu)?;
    let g_down = transmission(model, SpinChannel::Down, model.mu)?;
    Ok(ConductanceRecord {
        g_spin: SpinResolved::new(g_up, g_down),
        g_total: g_up + g_down,
    })
}

/// Magnetoresistance of one distance point, with the converged moments and
/// conductances of both alignments.
#[derive(Debug, Clone, PartialEq)]
pub struct MrRecord {
    pub d: f64,
    pub g_pc: f64,
    pub g_apc: f64,
    /// `(G_APC − G_PC) / G_PC`, dimensionless.
    pub mr: f64,
    pub pc: MomentResult,
    pub apc: MomentResult,
}

/// Full pipeline at one distance: the mean field is converged separately
/// for each alignment, then the zero-bias conductances form
/// `MR = (G_APC − G_PC)/G_PC`.
#[allow(clippy::too_many_arguments)]
pub fn magnetoresistance(
    dev: &DeviceSpec,
    left: &LeadSpec,
    right: &LeadSpec,
    d: f64,
    law: &DistanceLaw,
    scf: &ScfSettings,
    contour: &ContourSpec,
    numerics: Numerics,
) -> Result<MrRecord> {
    let mut results = Vec::with_capacity(2);
    for alignment in [Alignment::Pc, Alignment::Apc] {
        let moment = scf_moment(dev, left, right, alignment, d, law, scf, contour, numerics)?;
        let model =
            crate::model::assemble_junction(dev, left, right, alignment, d, law, moment.field)?
                .with_numerics(numerics);
        let g = conductance(&model)?;
        results.push((moment, g.g_total));
    }
    let (pc, g_pc) = results.remove(0);
    let (apc, g_apc) = results.remove(0);
    if g_pc <= MR_GUARD_G0 {
        return Err(Error::UndefinedMagnetoresistance { g_pc });
    }
    let mr = (g_apc - g_pc) / g_pc;
    Ok(MrRecord {
        d,
        g_pc,
        g_apc,
        mr,
        pc,
        apc,
    })
}

/// Converge the mean field at `(alignment, d)` and return the model frozen
/// at that field together with the loop outcome.
#[allow(clippy::too_many_arguments)]
pub fn converged_model(
    dev: &DeviceSpec,
    left: &LeadSpec,
    right: &LeadSpec,
    alignment: Alignment,
    d: f64,
    law: &DistanceLaw,
    scf: &ScfSettings,
    contour: &ContourSpec,
    numerics: Numerics,
) -> Result<(JunctionModel, MomentResult)> {
    let moment = scf_moment(dev, left, right, alignment, d, law, scf, contour, numerics)?;
    let model = crate::model::assemble_junction(dev, left, right, alignment, d, law, moment.field)?
        .with_numerics(numerics);
    Ok((model, moment))
}

/// Tabulated observable rows against one swept parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub parameter: String,
    pub rows: Vec<SweepRow>,
}

/// One row of a sweep; failed rows carry the error text instead of values.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub values: BTreeMap<String, f64>,
    pub error: Option<String>,
}

/// Which observable a distance sweep tabulates per row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceObservable {
    /// Converged central moment and convergence flag per alignment.
    Moment,
    /// Spin-resolved conductance per alignment.
    Conductance,
    /// Magnetoresistance with both total conductances.
    Magnetoresistance,
}

/// Evaluate one distance row (independently recomputable).
#[allow(clippy::too_many_arguments)]
pub fn distance_row(
    dev: &DeviceSpec,
    left: &LeadSpec,
    right: &LeadSpec,
    d: f64,
    law: &DistanceLaw,
    observable: DistanceObservable,
    alignments: &[Alignment],
    scf: &ScfSettings,
    contour: &ContourSpec,
    numerics: Numerics,
) -> SweepRow {
    let mut values = BTreeMap::new();
    let mut run = || -> Result<()> {
        match observable {
            DistanceObservable::Moment => {
                for alignment in alignments {
                    let m =
                        scf_moment(dev, left, right, *alignment, d, law, scf, contour, numerics)?;
                    let tag = match alignment {
                        Alignment::Pc => "pc",
                        Alignment::Apc => "apc",
                    };
                    values.insert(format!("moment_{tag}"), m.moment_central);
                    values
                        .insert(format!("converged_{tag}"), if m.converged { 1.0 } else { 0.0 });
                }
            }
            DistanceObservable::Conductance => {
                for alignment in alignments {
                    let (model, _) = converged_model(
                        dev, left, right, *alignment, d, law, scf, contour, numerics,
                    )?;
                    let g = conductance(&model)?;
                    let tag = match alignment {
                        Alignment::Pc => "pc",
                        Alignment::Apc => "apc",
                    };
                    values.insert(format!("g_up_{tag}"), g.g_spin.up);
                    values.insert(format!("g_down_{tag}"), g.g_spin.down);
                    values.insert(format!("g_total_{tag}"), g.g_total);
                }
            }
            DistanceObservable::Magnetoresistance => {
                let rec = magnetoresistance(dev, left, right, d, law, scf, contour, numerics)?;
                values.insert("g_pc".to_string(), rec.g_pc);
                values.insert("g_apc".to_string(), rec.g_apc);
                values.insert("mr".to_string(), rec.mr);
            }
        }
        Ok(())
    };
    match run() {
        Ok(()) => SweepRow {
            param: d,
            values,
            error: None,
        },
        Err(e) => SweepRow {
            param: d,
            values: BTreeMap::new(),
            error: Some(e.to_string()),
        },
    }
}

/// Distance sweep: one row per point, rows sorted by distance. Per-row
/// errors are recorded in the row and the sweep continues. With
/// `warm_start` the loop at each distance starts from the previous
/// converged moment (sequential semantics; off by default, keeping every
/// row independently recomputable).
#[allow(clippy::too_many_arguments)]
pub fn sweep_distance(
    dev: &DeviceSpec,
    left: &LeadSpec,
    right: &LeadSpec,
    distances: &[f64],
    law: &DistanceLaw,
    observable: DistanceObservable,
    alignments: &[Alignment],
    scf: &ScfSettings,
    contour: &ContourSpec,
    numerics: Numerics,
    warm_start: bool,
) -> Result<SweepResult> {
    check_monotone(distances)?;
    let mut rows = Vec::with_capacity(distances.len());
    let mut warm = *scf;
    for &d in distances {
        let row = distance_row(
            dev, left, right, d, law, observable, alignments, &warm, contour, numerics,
        );
        if warm_start && observable == DistanceObservable::Moment {
            if let Some(m) = row
                .values
                .get("moment_pc")
                .or_else(|| row.values.get("moment_apc"))
            {
                warm.init_moment = m.clamp(-1.0, 1.0);
            }
        }
        rows.push(row);
    }
    rows.sort_by(|a, b| a.param.partial_cmp(&b.param).unwrap());
    Ok(SweepResult {
        parameter: "d_angstrom".to_string(),
        rows,
    })
}

/// Evaluate one bias row on a fixed (already converged) model.
pub fn bias_row(model: &JunctionModel, v: f64, n_points: usize, kt: f64) -> SweepRow {
    match current_record(model, v, n_points, kt) {
        Ok(rec) => {
            let mut values = BTreeMap::new();
            values.insert("i_up".to_string(), rec.i_spin.up);
            values.insert("i_down".to_string(), rec.i_spin.down);
            values.insert("i_total".to_string(), rec.i_total);
            values.insert("i_total_si".to_string(), rec.i_total_si);
            SweepRow {
                param: v,
                values,
                error: None,
            }
        }
        Err(e) => SweepRow {
            param: v,
            values: BTreeMap::new(),
            error: Some(e.to_string()),
        },
    }
}

/// Bias sweep on a fixed model, rows sorted by voltage.
pub fn sweep_bias(
    model: &JunctionModel,
    biases: &[f64],
    n_points: usize,
    kt: f64,
) -> Result<SweepResult> {
    check_monotone(biases)?;
    let mut rows: Vec<SweepRow> = biases
        .iter()
        .map(|&v| bias_row(model, v, n_points, kt))
        .collect();
    rows.sort_by(|a, b| a.param.partial_cmp(&b.param).unwrap());
    Ok(SweepResult {
        parameter: "v_volts".to_string(),
        rows,
    })
}

fn check_monotone(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidParameter(
            "sweep needs at least one point".into(),
        ));
    }
    for pair in values.windows(2) {
        if !(pair[1] > pair[0]) {
            return Err(Error::InvalidParameter(format!(
                "sweep values must be strictly increasing ({} then {})",
                pair[0], pair[1]
            )));
        }
    }
    Ok(())
}

/// R² of the least-squares line through an I-V data set.
pub fn linear_fit_r2(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 3 {
        return 1.0;
    }
    let mean_x: f64 = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y: f64 = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
        syy += (y - mean_y) * (y - mean_y);
    }
    if syy == 0.0 || sxx == 0.0 {
        return 1.0;
    }
    let slope = sxy / sxx;
    let ss_res = syy - slope * sxy;
    1.0 - (ss_res / syy).max(0.0)
}

/// Uniform grid: `n` points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![lo];
    }
    let h = (hi - lo) / (n as f64 - 1.0);
    (0..n).map(|k| lo + h * k as f64).collect()
}

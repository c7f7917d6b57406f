//! Equilibrium density matrix via complex-contour integration, Fermi
//! statistics, and the mean-field self-consistency loop producing the
//! central-site magnetic moment.
//!
//! The occupation integral `ρ = -(1/π) Im ∫ G^R(E) f(E) dE` is deformed off
//! the real axis into three pieces: a semicircular arc rising from
//! `e_bottom` (below all spectral weight) to the line `Im z = 2π kT
//! n_poles`, a segment of that line running past the chemical potential,
//! and the residues of the Fermi function at the enclosed Matsubara poles
//! `z_j = μ + iπkT(2j-1)`. At that line height the Fermi function is real,
//! so the line integral is evaluated with a Gauss rule built for the Fermi
//! weight itself; the arc uses Gauss-Legendre in the angle.

use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::cmatrix::CMat;
use crate::error::Error;
use crate::fmath;
use crate::greens::{device_gf, lead_self_energies, ComplexEnergy};
use crate::model::{
    assemble_junction, Alignment, DeviceSpec, DistanceLaw, JunctionModel, LeadSpec, Numerics,
    SpinChannel, SpinResolved,
};
use crate::quad::{gauss_legendre_on, gauss_weight_rule};
use crate::Result;

/// Occupation drift beyond which the contour bottom is judged to sit above
/// spectral weight.
pub const CONTOUR_DRIFT_TOL: f64 = 1e-4;

/// Fermi-Dirac occupation, overflow-safe (the exponent argument is clamped
/// to ±500).
pub fn fermi(e: f64, mu: f64, kt: f64) -> f64 {
    debug_assert!(kt > 0.0);
    let x = ((e - mu) / kt).clamp(-500.0, 500.0);
    1.0 / (1.0 + fmath::exp(x))
}

/// Fermi-Dirac function continued to complex energies, computed in the
/// half-plane-stable form.
pub fn fermi_complex(z: Complex64, mu: f64, kt: f64) -> Complex64 {
    let w = (z - Complex64::new(mu, 0.0)) / Complex64::new(kt, 0.0);
    let re = w.re.clamp(-500.0, 500.0);
    let w = Complex64::new(re, w.im);
    let one = Complex64::new(1.0, 0.0);
    if w.re > 0.0 {
        let e = (-w).exp();
        e / (one + e)
    } else {
        one / (one + w.exp())
    }
}

/// Quadrature layout of the equilibrium contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub n_circle: usize,
    pub n_line: usize,
    pub n_poles: usize,
    /// Contour start below all spectral weight; `None` selects the automatic
    /// bound (lowest device eigenvalue and lead band bottoms minus 5 eV).
    pub e_bottom: Option<f64>,
    /// Electronic temperature, eV.
    pub kt: f64,
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec {
            n_circle: 16,
            n_line: 16,
            n_poles: 16,
            e_bottom: None,
            kt: 0.025,
        }
    }
}

impl ContourSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_circle < 1 || self.n_line < 1 || self.n_poles < 1 {
            return Err(Error::InvalidParameter(
                "contour point counts must all be >= 1".into(),
            ));
        }
        if self.n_line > 64 {
            return Err(Error::InvalidParameter(format!(
                "n_line = {} exceeds the supported maximum of 64",
                self.n_line
            )));
        }
        if !(self.kt > 0.0) {
            return Err(Error::InvalidParameter(format!("kT must be > 0, got {}", self.kt)));
        }
        Ok(())
    }

    pub fn doubled(&self) -> ContourSpec {
        ContourSpec {
            n_circle: self.n_circle * 2,
            n_line: (self.n_line * 2).min(64),
            n_poles: self.n_poles * 2,
            e_bottom: self.e_bottom,
            kt: self.kt,
        }
    }
}

/// Discretized contour: weighted sample points plus Matsubara poles, such
/// that `∫ G f dz ≈ Σ_i w_i G(z_i) - 2πi kT Σ_j G(z_j)`.
#[derive(Debug, Clone)]
pub struct Contour {
    pub points: Vec<(Complex64, Complex64)>,
    pub poles: Vec<Complex64>,
    pub kt: f64,
}

impl Contour {
    /// Lay out the contour for chemical potential `mu` starting at
    /// `e_bottom`.
    pub fn build(spec: &ContourSpec, mu: f64, e_bottom: f64) -> Result<Contour> {
        spec.validate()?;
        let kt = spec.kt;
        let delta = 2.0 * core::f64::consts::PI * kt * spec.n_poles as f64;
        let x_start = mu - 30.0 * kt;
        let x_end = mu + 30.0 * kt;
        if e_bottom >= x_start - 1.0 {
            return Err(Error::InvalidParameter(format!(
                "e_bottom = {e_bottom} must lie at least 1 eV below mu - 30 kT = {x_start}"
            )));
        }

        // semicircular arc through (e_bottom, 0) and (x_start, delta),
        // centered on the real axis
        let center = (x_start * x_start + delta * delta - e_bottom * e_bottom)
            / (2.0 * (x_start - e_bottom));
        let radius = center - e_bottom;
        let theta_end = fmath::atan2(delta, x_start - center);
        let mut points = Vec::with_capacity(spec.n_circle + spec.n_line);
        let (thetas, t_weights) =
            gauss_legendre_on(spec.n_circle, theta_end, core::f64::consts::PI);
        for (theta, w) in thetas.iter().zip(t_weights.iter()) {
            let phase = Complex64::new(fmath::cos(*theta), fmath::sin(*theta));
            let z = Complex64::new(center, 0.0) + phase * radius;
            // the contour descends in theta, hence the sign flip on
            // dz = i R e^{iθ} dθ
            let wz = Complex64::new(0.0, -radius * w) * phase * fermi_complex(z, mu, kt);
            points.push((z, wz));
        }

        // line at Im = delta: the Fermi factor is exactly real there and
        // becomes the quadrature weight
        let (xs, ws) = gauss_weight_rule(
            spec.n_line,
            x_start,
            x_end,
            &[mu - 8.0 * kt, mu + 8.0 * kt],
            |x| fermi(x, mu, kt),
        )?;
        for (x, w) in xs.iter().zip(ws.iter()) {
            points.push((Complex64::new(*x, delta), Complex64::new(*w, 0.0)));
        }

        let poles = (1..=spec.n_poles)
            .map(|j| Complex64::new(mu, core::f64::consts::PI * kt * (2.0 * j as f64 - 1.0)))
            .collect();
        Ok(Contour { points, poles, kt })
    }
}

/// Automatic contour bottom: the lowest device eigenvalue and lead band
/// bottoms over both spins, minus a 5 eV safety margin.
pub fn auto_e_bottom(model: &JunctionModel) -> Result<f64> {
    let mut bound = f64::INFINITY;
    for spin in SpinChannel::BOTH {
        let evals = model.h_dev_eff.get(spin).hermitian_eigenvalues()?;
        if let Some(&min) = evals.first() {
            bound = bound.min(min);
        }
    }
    bound = bound.min(model.left.band_bottom_bound()?);
    bound = bound.min(model.right.band_bottom_bound()?);
    Ok(bound - 5.0)
}

/// Equilibrium density matrix `ρ_σ` of the device for one spin channel at
/// zero bias, by contour integration. Hermitian, PSD up to quadrature
/// error; site occupations on the diagonal.
pub fn equilibrium_density(
    model: &JunctionModel,
    spin: SpinChannel,
    spec: &ContourSpec,
) -> Result<CMat> {
    let e_bottom = match spec.e_bottom {
        Some(e) => e,
        None => auto_e_bottom(model)?,
    };
    let contour = Contour::build(spec, model.mu, e_bottom)?;
    density_on_contour(model, spin, &contour)
}

fn density_on_contour(
    model: &JunctionModel,
    spin: SpinChannel,
    contour: &Contour,
) -> Result<CMat> {
    let n = model.n_sites();
    let mut acc = CMat::zeros(n, n);
    for (z, w) in contour.points.iter() {
        let g = resolvent_at(model, spin, *z)?;
        acc = acc.add(&g.scale(*w));
    }
    let pole_prefactor = Complex64::new(0.0, -2.0 * core::f64::consts::PI * contour.kt);
    for zj in contour.poles.iter() {
        let g = resolvent_at(model, spin, *zj)?;
        acc = acc.add(&g.scale(pole_prefactor));
    }
    // ρ = -(1/2πi) (M - M†), Hermitian by construction
    let anti = acc.sub(&acc.conj_transpose());
    Ok(anti.scale(Complex64::new(0.0, 1.0 / (2.0 * core::f64::consts::PI))))
}

fn resolvent_at(model: &JunctionModel, spin: SpinChannel, z: Complex64) -> Result<CMat> {
    let ze = ComplexEnergy::new(z.re, z.im);
    let (sl, sr) = lead_self_energies(model, spin, ze)?;
    device_gf(model, spin, ze, &sl, &sr)
}

/// Site occupations for both spins from the contour density.
pub fn occupations(model: &JunctionModel, spec: &ContourSpec) -> Result<SpinResolved<Vec<f64>>> {
    let mut out = SpinResolved::new(Vec::new(), Vec::new());
    for spin in SpinChannel::BOTH {
        let rho = equilibrium_density(model, spin, spec)?;
        *out.get_mut(spin) = (0..rho.rows()).map(|i| rho[(i, i)].re).collect();
    }
    Ok(out)
}

/// Occupations with a refinement guard: a doubled-resolution contour whose
/// bottom sits 2 eV deeper must reproduce them within
/// [`CONTOUR_DRIFT_TOL`]. Deepening the bottom picks up any spectral weight
/// a too-high `e_bottom` left outside the contour (pure resolution doubling
/// cannot see weight outside the enclosed region), so a drift beyond the
/// tolerance flags an untrustworthy result.
pub fn occupations_verified(
    model: &JunctionModel,
    spec: &ContourSpec,
) -> Result<SpinResolved<Vec<f64>>> {
    let base = occupations(model, spec)?;
    let mut check = spec.doubled();
    let e_bottom = match spec.e_bottom {
        Some(e) => e,
        None => auto_e_bottom(model)?,
    };
    check.e_bottom = Some(e_bottom - 2.0);
    let fine = occupations(model, &check)?;
    let mut drift: f64 = 0.0;
    for spin in SpinChannel::BOTH {
        for (a, b) in base.get(spin).iter().zip(fine.get(spin).iter()) {
            drift = drift.max(fmath::abs(a - b));
        }
    }
    if drift > CONTOUR_DRIFT_TOL {
        return Err(Error::SpectrumBound {
            drift,
            tol: CONTOUR_DRIFT_TOL,
        });
    }
    Ok(base)
}

/// Dense real-axis reference for the occupation integral:
/// `-(1/π) Im G^R(E + iη) f(E)` on a uniform trapezoid grid over
/// `[e_bottom, mu + 30 kT]`. Independent of the contour layout; used to
/// validate it.
pub fn real_axis_occupations(
    model: &JunctionModel,
    spin: SpinChannel,
    spec: &ContourSpec,
    n_points: usize,
    eta: f64,
) -> Result<Vec<f64>> {
    let e_bottom = match spec.e_bottom {
        Some(e) => e,
        None => auto_e_bottom(model)?,
    };
    let e_top = model.mu + 30.0 * spec.kt;
    let n = model.n_sites();
    let h = (e_top - e_bottom) / (n_points as f64 - 1.0);
    let inv_pi = 1.0 / core::f64::consts::PI;
    let mut acc = alloc::vec![0.0; n];
    for k in 0..n_points {
        let e = e_bottom + h * k as f64;
        let ze = ComplexEnergy::new(e, eta);
        let (sl, sr) = lead_self_energies(model, spin, ze)?;
        let g = device_gf(model, spin, ze, &sl, &sr)?;
        let trap = if k == 0 || k == n_points - 1 { 0.5 } else { 1.0 };
        let f = fermi(e, model.mu, spec.kt);
        for (i, slot) in acc.iter_mut().enumerate() {
            *slot += trap * h * (-inv_pi * g[(i, i)].im) * f;
        }
    }
    Ok(acc)
}

/// Settings of the mean-field self-consistency loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScfSettings {
    /// Linear mixing of the central-site occupation pair, in (0, 1].
    pub mixing: f64,
    /// Convergence threshold on the central occupation residual per spin.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial central-site spin imbalance n_up - n_down.
    pub init_moment: f64,
}

impl Default for ScfSettings {
    fn default() -> Self {
        ScfSettings {
            mixing: 0.3,
            tol: 1e-6,
            max_iter: 500,
            init_moment: 0.5,
        }
    }
}

impl ScfSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.mixing > 0.0 && self.mixing <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "scf mixing must be in (0, 1], got {}",
                self.mixing
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scf tol must be > 0, got {}",
                self.tol
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("scf max_iter must be >= 1".into()));
        }
        if !(-1.0..=1.0).contains(&self.init_moment) {
            return Err(Error::InvalidParameter(format!(
                "scf init_moment must lie in [-1, 1], got {}",
                self.init_moment
            )));
        }
        Ok(())
    }
}

/// Outcome of the self-consistency loop.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentResult {
    /// Site occupations per spin, evaluated at the final field.
    pub n: SpinResolved<Vec<f64>>,
    /// Central-site spin imbalance n_up - n_down, μ_B.
    pub moment_central: f64,
    pub converged: bool,
    pub iterations: usize,
    /// The central-site input field the loop settled on.
    pub field: SpinResolved<f64>,
}

/// Mean-field fixed point of the central-site occupations: the central
/// onsite energy per spin carries `U n_{-σ}`, occupations are recomputed
/// from the contour density, and the input field is linearly mixed toward
/// the output until the central residual drops below `tol`.
///
/// Non-convergence is not fatal: the last iterate is returned with
/// `converged = false`.
#[allow(clippy::too_many_arguments)]
pub fn scf_moment(
    dev: &DeviceSpec,
    left: &LeadSpec,
    right: &LeadSpec,
    alignment: Alignment,
    d: f64,
    law: &DistanceLaw,
    scf: &ScfSettings,
    contour: &ContourSpec,
    numerics: Numerics,
) -> Result<MomentResult> {
    scf.validate()?;
    contour.validate()?;
    let c = dev.central_index;
    let mut field = SpinResolved::new(
        (0.5 + 0.5 * scf.init_moment).clamp(0.0, 1.0),
        (0.5 - 0.5 * scf.init_moment).clamp(0.0, 1.0),
    );

    let mut last: Option<(SpinResolved<Vec<f64>>, SpinResolved<f64>)> = None;
    for iteration in 1..=scf.max_iter {
        let model =
            assemble_junction(dev, left, right, alignment, d, law, field)?.with_numerics(numerics);
        let occ = if iteration == 1 {
            occupations_verified(&model, contour)?
        } else {
            occupations(&model, contour)?
        };
        let out = SpinResolved::new(occ.up[c], occ.down[c]);
        let residual = fmath::abs(out.up - field.up).max(fmath::abs(out.down - field.down));
        if residual <= scf.tol {
            let moment = occ.up[c] - occ.down[c];
            return Ok(MomentResult {
                n: occ,
                moment_central: moment,
                converged: true,
                iterations: iteration,
                field,
            });
        }
        field.up += scf.mixing * (out.up - field.up);
        field.down += scf.mixing * (out.down - field.down);
        last = Some((occ, field));
    }
    let (occ, field) = last.expect("max_iter >= 1 guarantees one iteration");
    let moment = occ.up[c] - occ.down[c];
    Ok(MomentResult {
        n: occ,
        moment_central: moment,
        converged: false,
        iterations: scf.max_iter,
        field,
    })
}

/// Result of starting the loop from opposite initial moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HysteresisReport {
    pub moment_from_plus: f64,
    pub moment_from_minus: f64,
    /// Converged moments differ beyond `threshold`: the mean field is
    /// bistable at this point.
    pub bistable: bool,
    pub threshold: f64,
}

/// Probe for mean-field bistability: run the loop from `+|init|` and
/// `-|init|` and compare the converged moments.
#[allow(clippy::too_many_arguments)]
pub fn hysteresis_probe(
    dev: &DeviceSpec,
    left: &LeadSpec,
    right: &LeadSpec,
    alignment: Alignment,
    d: f64,
    law: &DistanceLaw,
    scf: &ScfSettings,
    contour: &ContourSpec,
    numerics: Numerics,
    threshold: f64,
) -> Result<HysteresisReport> {
    let mut plus = *scf;
    plus.init_moment = fmath::abs(scf.init_moment);
    let mut minus = *scf;
    minus.init_moment = -fmath::abs(scf.init_moment);
    let from_plus = scf_moment(dev, left, right, alignment, d, law, &plus, contour, numerics)?;
    let from_minus = scf_moment(dev, left, right, alignment, d, law, &minus, contour, numerics)?;
    let gap = fmath::abs(from_plus.moment_central - from_minus.moment_central);
    Ok(HysteresisReport {
        moment_from_plus: from_plus.moment_central,
        moment_from_minus: from_minus.moment_central,
        bistable: gap >= threshold,
        threshold,
    })
}

/// Bisection for the distance at which the converged central moment
/// changes sign. Returns `None` when the endpoint moments share a sign.
#[allow(clippy::too_many_arguments)]
pub fn find_moment_sign_change(
    dev: &DeviceSpec,
    left: &LeadSpec,
    right: &LeadSpec,
    alignment: Alignment,
    law: &DistanceLaw,
    scf: &ScfSettings,
    contour: &ContourSpec,
    numerics: Numerics,
    d_lo: f64,
    d_hi: f64,
    d_tol: f64,
) -> Result<Option<f64>> {
    if !(d_lo < d_hi) || !(d_tol > 0.0) {
        return Err(Error::InvalidParameter(
            "find_moment_sign_change: need d_lo < d_hi and d_tol > 0".into(),
        ));
    }
    let moment_at = |d: f64| -> Result<f64> {
        Ok(
            scf_moment(dev, left, right, alignment, d, law, scf, contour, numerics)?
                .moment_central,
        )
    };
    let mut lo = d_lo;
    let mut hi = d_hi;
    let mut m_lo = moment_at(lo)?;
    let m_hi = moment_at(hi)?;
    if m_lo == 0.0 {
        return Ok(Some(lo));
    }
    if m_hi == 0.0 {
        return Ok(Some(hi));
    }
    if (m_lo > 0.0) == (m_hi > 0.0) {
        return Ok(None);
    }
    while hi - lo > d_tol {
        let mid = 0.5 * (lo + hi);
        let m_mid = moment_at(mid)?;
        if m_mid == 0.0 {
            return Ok(Some(mid));
        }
        if (m_mid > 0.0) == (m_lo > 0.0) {
            lo = mid;
            m_lo = m_mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

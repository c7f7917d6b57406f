//! Lead surface Green's functions by layer-doubling decimation, lead
//! self-energies and broadening matrices, and the retarded device Green's
//! function.

use alloc::string::ToString;
use num_complex::Complex64;

use crate::cmatrix::CMat;
use crate::error::Error;
use crate::model::{JunctionModel, Side, SpinChannel};
use crate::Result;

/// Tolerance below which the broadening may dip negative before it is an
/// error (a bad surface-GF branch).
pub const PSD_TOL: f64 = 1e-8;

/// Complex energy argument; the imaginary part must be strictly positive
/// (retarded evaluation uses `im = η`, contour points carry larger parts).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEnergy(Complex64);

impl ComplexEnergy {
    pub fn new(re: f64, im: f64) -> Self {
        assert!(im > 0.0, "ComplexEnergy requires Im(z) > 0, got {im}");
        ComplexEnergy(Complex64::new(re, im))
    }

    /// Real-axis retarded point `E + iη`.
    pub fn retarded(e: f64, eta: f64) -> Self {
        ComplexEnergy::new(e, eta)
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

/// Surface Green's function of a semi-infinite periodic lead.
///
/// Solves the fixed point `g_s = [z·I − h00 − h01 g_s h01†]⁻¹` by
/// layer-doubling decimation; every iteration doubles the effective depth
/// of the lead, so convergence is exponential away from band edges.
///
/// Decimation degrades when `z − h_eff` passes near an eigenvalue of a
/// decimated block at small `Im z` (worst at `Im z → 0` right on a lead
/// level, where the first bulk resolvent blows up). The iteration is
/// therefore seeded at a safely regularized imaginary part and the result
/// is polished by Newton steps on the fixed-point map at the true `z`;
/// the residual contract holds for the returned matrix either way.
///
/// The accepted residual is `tol · max(1, ‖g_s‖_F)`: near a surface
/// resonance the resolvent is large and the residual of the fixed-point
/// equation cannot even be evaluated below the conditioning floor of
/// double precision, so the tolerance scales with the solution norm.
pub fn surface_gf(
    h00: &CMat,
    h01: &CMat,
    z: ComplexEnergy,
    tol: f64,
    max_iter: usize,
) -> Result<CMat> {
    if !h00.is_square() || h00.rows() != h01.rows() || !h01.is_square() {
        return Err(Error::DimensionMismatch(
            "surface_gf: h00 and h01 must be square with equal size".to_string(),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("surface_gf: tol must be > 0".into()));
    }
    let zv = z.value();
    let scale = (h00.frobenius_norm() + 2.0 * h01.frobenius_norm()).max(1.0);
    let safe_im = 1e-4 * scale;
    let z_seed = if zv.im >= safe_im {
        zv
    } else {
        Complex64::new(zv.re, safe_im)
    };

    let mut g = decimation_seed(h00, h01, z_seed, tol.min(1e-9), max_iter)?;
    let mut residual = fixed_point_residual(&g, h00, h01, zv)?;
    if residual <= tol * g.frobenius_norm().max(1.0) {
        return Ok(g);
    }
    if let Some(polished) = newton_polish(g.clone(), h00, h01, zv, tol, max_iter.min(60))? {
        return Ok(polished);
    }

    // Stubborn cases (z near a critical point of the lead spectrum):
    // continue the solution down in Im z, polishing at each level.
    let mut im = safe_im * 10.0;
    g = decimation_seed(h00, h01, Complex64::new(zv.re, im), tol.min(1e-9), max_iter)?;
    while im > zv.im {
        im = (im * 0.2).max(zv.im);
        let z_level = Complex64::new(zv.re, im);
        g = match newton_polish(g.clone(), h00, h01, z_level, tol, max_iter.min(60))? {
            Some(next) => next,
            None => decimation_seed(h00, h01, z_level, tol.min(1e-9), max_iter)?,
        };
    }
    residual = fixed_point_residual(&g, h00, h01, zv)?;
    if residual <= tol * g.frobenius_norm().max(1.0) {
        return Ok(g);
    }
    Err(Error::DecimationNotConverged {
        residual,
        tol,
        iterations: max_iter,
    })
}

/// Newton iteration on `R(g) = g − (z − h00 − h01 g h01†)⁻¹`; returns the
/// refined matrix once the residual meets `tol`, or `None` when the budget
/// runs out (near-singular Jacobian at a spectral critical point).
fn newton_polish(
    mut g: CMat,
    h00: &CMat,
    h01: &CMat,
    z: Complex64,
    tol: f64,
    budget: usize,
) -> Result<Option<CMat>> {
    let n = h00.rows();
    for _ in 0..budget {
        let embedded = h01.matmul(&g).matmul(&h01.conj_transpose());
        let f = h00.add(&embedded).z_minus(z).inverse()?;
        let r = g.sub(&f);
        if r.frobenius_norm() <= tol * g.frobenius_norm().max(1.0) {
            return Ok(Some(g));
        }
        let p = f.matmul(h01);
        let q = h01.conj_transpose().matmul(&f);
        // dg − P dg Q = −R, vectorized row-major into an n²×n² system
        let dim = n * n;
        let mut big = CMat::zeros(dim, dim);
        let mut rhs = CMat::zeros(dim, 1);
        for i in 0..n {
            for l in 0..n {
                let row = i * n + l;
                rhs[(row, 0)] = -r[(i, l)];
                for j in 0..n {
                    for k in 0..n {
                        let col = j * n + k;
                        let mut entry = -p[(i, j)] * q[(k, l)];
                        if i == j && k == l {
                            entry += Complex64::new(1.0, 0.0);
                        }
                        big[(row, col)] = entry;
                    }
                }
            }
        }
        let dg = big.solve(&rhs)?;
        for j in 0..n {
            for k in 0..n {
                g[(j, k)] += dg[(j * n + k, 0)];
            }
        }
    }
    let residual = fixed_point_residual(&g, h00, h01, z)?;
    Ok(if residual <= tol * g.frobenius_norm().max(1.0) {
        Some(g)
    } else {
        None
    })
}

/// Plain layer-doubling decimation, best effort: returns the current
/// iterate when the budget runs out instead of failing.
fn decimation_seed(
    h00: &CMat,
    h01: &CMat,
    z: Complex64,
    tol: f64,
    max_iter: usize,
) -> Result<CMat> {
    let mut eps_s = h00.clone();
    let mut eps = h00.clone();
    let mut alpha = h01.clone();
    let mut beta = h01.conj_transpose();

    for _ in 0..max_iter {
        let g_surf = eps_s.z_minus(z).inverse()?;
        let residual = fixed_point_residual(&g_surf, h00, h01, z)?;
        if residual <= tol * g_surf.frobenius_norm().max(1.0) {
            return Ok(g_surf);
        }
        let g_bulk = eps.z_minus(z).inverse()?;
        let agb = alpha.matmul(&g_bulk).matmul(&beta);
        let bga = beta.matmul(&g_bulk).matmul(&alpha);
        eps_s = eps_s.add(&agb);
        eps = eps.add(&agb).add(&bga);
        alpha = alpha.matmul(&g_bulk).matmul(&alpha);
        beta = beta.matmul(&g_bulk).matmul(&beta);
    }
    eps_s.z_minus(z).inverse()
}

/// ‖g − [z − h00 − h01 g h01†]⁻¹‖_F.
pub fn fixed_point_residual(g: &CMat, h00: &CMat, h01: &CMat, z: Complex64) -> Result<f64> {
    let embedded = h01.matmul(g).matmul(&h01.conj_transpose());
    let rhs = h00.add(&embedded).z_minus(z).inverse()?;
    Ok(g.sub(&rhs).frobenius_norm())
}

/// Retarded lead self-energy embedded into the device space.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfEnergy {
    pub sigma: CMat,
    pub spin: SpinChannel,
    pub side: Side,
}

/// `Σ = v† g_s v`, with `v` the lead→device coupling block
/// (`n_orb_lead × n_sites`); device sites not touched by `v` stay zero.
pub fn self_energy(g_s: &CMat, v: &CMat, spin: SpinChannel, side: Side) -> Result<SelfEnergy> {
    if g_s.rows() != v.rows() || !g_s.is_square() {
        return Err(Error::DimensionMismatch(
            "self_energy: g_s must be square with v.rows() rows".to_string(),
        ));
    }
    let sigma = v.conj_transpose().matmul(g_s).matmul(v);
    Ok(SelfEnergy { sigma, spin, side })
}

/// Broadening matrix `Γ = i(Σ − Σ†)`; Hermitian positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct Broadening {
    pub gamma: CMat,
    pub spin: SpinChannel,
    pub side: Side,
}

/// Build `Γ` and verify positive semidefiniteness; a violation beyond
/// [`PSD_TOL`] signals a wrong surface-GF branch and is a loud error.
pub fn broadening(se: &SelfEnergy) -> Result<Broadening> {
    let gamma = se
        .sigma
        .sub(&se.sigma.conj_transpose())
        .scale(Complex64::new(0.0, 1.0));
    let evals = gamma.hermitian_eigenvalues()?;
    if let Some(&min) = evals.first() {
        if min < -PSD_TOL {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min,
                tol: PSD_TOL,
            });
        }
    }
    Ok(Broadening {
        gamma,
        spin: se.spin,
        side: se.side,
    })
}

/// Both lead self-energies of a junction at `z` for one spin.
pub fn lead_self_energies(
    model: &JunctionModel,
    spin: SpinChannel,
    z: ComplexEnergy,
) -> Result<(SelfEnergy, SelfEnergy)> {
    let mut out = [None, None];
    for (slot, side) in [Side::Left, Side::Right].iter().enumerate() {
        let (h00, h01) = model.lead_blocks(*side, spin);
        let g_s = surface_gf(
            &h00,
            &h01,
            z,
            model.numerics.decimation_tol,
            model.numerics.decimation_max_iter,
        )?;
        out[slot] = Some(self_energy(&g_s, model.coupling(*side, spin), spin, *side)?);
    }
    Ok((out[0].take().unwrap(), out[1].take().unwrap()))
}

/// Retarded device Green's function
/// `G^R = [z·I − h_dev_eff_σ − Σ_L − Σ_R]⁻¹`; the advanced one is its
/// conjugate transpose.
pub fn device_gf(
    model: &JunctionModel,
    spin: SpinChannel,
    z: ComplexEnergy,
    sigma_l: &SelfEnergy,
    sigma_r: &SelfEnergy,
) -> Result<CMat> {
    let h = model.h_dev_eff.get(spin);
    let n = h.rows();
    if sigma_l.sigma.rows() != n || sigma_r.sigma.rows() != n {
        return Err(Error::DimensionMismatch(
            "device_gf: self-energies must live in the device space".to_string(),
        ));
    }
    h.add(&sigma_l.sigma).add(&sigma_r.sigma).z_minus(z.value()).inverse()
}

/// Convenience: device Green's function with freshly computed self-energies.
pub fn device_gf_full(
    model: &JunctionModel,
    spin: SpinChannel,
    z: ComplexEnergy,
) -> Result<CMat> {
    let (sl, sr) = lead_self_energies(model, spin, z)?;
    device_gf(model, spin, z, &sl, &sr)
}

/// Closed-form surface Green's function of a single-orbital chain with
/// onsite `eps` and hopping `t`, retarded branch. Used as an analytic
/// oracle in tests.
pub fn chain_surface_gf_closed_form(e: f64, eps: f64, t: f64) -> Complex64 {
    let delta = e - eps;
    let t2 = t * t;
    let disc = delta * delta - 4.0 * t2;
    if disc < 0.0 {
        Complex64::new(delta / (2.0 * t2), -crate::fmath::sqrt(-disc) / (2.0 * t2))
    } else {
        let root = crate::fmath::sqrt(disc);
        let sign = if delta >= 0.0 { 1.0 } else { -1.0 };
        Complex64::new((delta - sign * root) / (2.0 * t2), 0.0)
    }
}

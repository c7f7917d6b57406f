//! Energy-resolved transmission, eigenchannel decomposition, and device
//! density of states.

use alloc::vec::Vec;

use crate::error::Error;
use crate::greens::{broadening, device_gf, lead_self_energies, ComplexEnergy};
use crate::model::{JunctionModel, SpinChannel, SpinResolved};
use crate::Result;

/// Imaginary residue allowed on the transmission trace.
pub const TRACE_IM_TOL: f64 = 1e-10;
/// Asymmetry allowed on the eigenchannel matrix before symmetrization.
pub const CHANNEL_ASYM_TOL: f64 = 1e-8;

/// Energy-resolved transmission with its eigenchannel decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionRecord {
    /// Energy relative to the equilibrium chemical potential, eV.
    pub energy: f64,
    pub t_spin: SpinResolved<f64>,
    /// Eigenchannel transmissions, descending, one list per spin.
    pub channels: SpinResolved<Vec<f64>>,
}

/// Energy-resolved density of states, total and per site, states/eV.
#[derive(Debug, Clone, PartialEq)]
pub struct DosRecord {
    pub energy: f64,
    pub total: SpinResolved<f64>,
    pub per_site: SpinResolved<Vec<f64>>,
}

/// `T_σ(E) = Tr[Γ_L G^R Γ_R G^A]`.
pub fn transmission(model: &JunctionModel, spin: SpinChannel, e: f64) -> Result<f64> {
    let z = ComplexEnergy::retarded(e, model.numerics.eta);
    let (sl, sr) = lead_self_energies(model, spin, z)?;
    let g = device_gf(model, spin, z, &sl, &sr)?;
    let gl = broadening(&sl)?.gamma;
    let gr = broadening(&sr)?.gamma;
    let ga = g.conj_transpose();
    let tr = gl.matmul(&g).matmul(&gr).matmul(&ga).trace();
    if tr.im.abs() > TRACE_IM_TOL {
        return Err(Error::ImaginaryResidue {
            residue: tr.im.abs(),
            tol: TRACE_IM_TOL,
        });
    }
    // tiny negative values are roundoff on a nonnegative quantity
    Ok(tr.re.max(0.0))
}

/// Eigenchannel transmissions: eigenvalues of the Hermitian matrix
/// `Γ_L^{1/2} G^R Γ_R G^A Γ_L^{1/2}`, sorted descending.
pub fn eigenchannels(model: &JunctionModel, spin: SpinChannel, e: f64) -> Result<Vec<f64>> {
    let z = ComplexEnergy::retarded(e, model.numerics.eta);
    let (sl, sr) = lead_self_energies(model, spin, z)?;
    let g = device_gf(model, spin, z, &sl, &sr)?;
    let gl = broadening(&sl)?.gamma;
    let gr = broadening(&sr)?.gamma;
    let gl_half = gl.psd_sqrt(crate::greens::PSD_TOL)?;
    let ga = g.conj_transpose();
    let m = gl_half.matmul(&g).matmul(&gr).matmul(&ga).matmul(&gl_half);
    let asym = m.sub(&m.conj_transpose()).frobenius_norm();
    if asym > CHANNEL_ASYM_TOL {
        return Err(Error::AsymmetryResidue {
            residue: asym,
            tol: CHANNEL_ASYM_TOL,
        });
    }
    let mut evals = m.hermitian_part().hermitian_eigenvalues()?;
    evals.reverse(); // descending
    Ok(evals)
}

/// Transmission and channels for both spins at one energy.
pub fn transmission_record(model: &JunctionModel, e: f64) -> Result<TransmissionRecord> {
    let t_up = transmission(model, SpinChannel::Up, e)?;
    let t_down = transmission(model, SpinChannel::Down, e)?;
    let ch_up = eigenchannels(model, SpinChannel::Up, e)?;
    let ch_down = eigenchannels(model, SpinChannel::Down, e)?;
    Ok(TransmissionRecord {
        energy: e,
        t_spin: SpinResolved::new(t_up, t_down),
        channels: SpinResolved::new(ch_up, ch_down),
    })
}

/// Per-site density of states `-(1/π) Im G^R_ii` for one spin.
pub fn dos(model: &JunctionModel, spin: SpinChannel, e: f64) -> Result<Vec<f64>> {
    let z = ComplexEnergy::retarded(e, model.numerics.eta);
    let (sl, sr) = lead_self_energies(model, spin, z)?;
    let g = device_gf(model, spin, z, &sl, &sr)?;
    let inv_pi = 1.0 / core::f64::consts::PI;
    Ok((0..g.rows()).map(|i| -inv_pi * g[(i, i)].im).collect())
}

/// Density of states for both spins at one energy.
pub fn dos_record(model: &JunctionModel, e: f64) -> Result<DosRecord> {
    let up = dos(model, SpinChannel::Up, e)?;
    let down = dos(model, SpinChannel::Down, e)?;
    let total = SpinResolved::new(up.iter().sum(), down.iter().sum());
    Ok(DosRecord {
        energy: e,
        total,
        per_site: SpinResolved::new(up, down),
    })
}

/// Number of propagating channels of a single-orbital chain lead at energy
/// `e` for one spin: open iff `|e - ε ∓ Δ/2| < 2|t|`.
pub fn chain_open_channels(
    eps: f64,
    hopping: f64,
    exchange: f64,
    majority_up: bool,
    spin: SpinChannel,
    e: f64,
) -> usize {
    let is_majority = match spin {
        SpinChannel::Up => majority_up,
        SpinChannel::Down => !majority_up,
    };
    let shift = if is_majority { -0.5 } else { 0.5 } * exchange;
    let center = eps + shift;
    if crate::fmath::abs(e - center) < 2.0 * crate::fmath::abs(hopping) {
        1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmatrix::CMat;
    use crate::greens::{self_energy, SelfEnergy};
    use crate::model::{presets, Alignment, DeviceSpec, DistanceLaw, LeadSpec, ModelSpec, Side};
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn pristine_model() -> JunctionModel {
        presets::pristine_chain()
            .assemble(Alignment::Pc, 2.05, SpinResolved::uniform(0.0))
            .unwrap()
    }

    #[test]
    fn pristine_chain_transmits_unity_in_band() {
        let mut model = pristine_model();
        model.numerics.eta = 1e-10;
        for e in [-1.8, -1.0, -0.3, 0.0, 0.5, 1.2, 1.9] {
            let t = transmission(&model, SpinChannel::Up, e).unwrap();
            assert_abs_diff_eq!(t, 1.0, epsilon = 1e-6);
        }
        let t_out = transmission(&model, SpinChannel::Up, 3.0).unwrap();
        assert!(t_out < 1e-6);
    }

    #[test]
    fn breit_wigner_wide_band_values() {
        // single site between near-wide-band leads (|t_lead| = 20), Γ
        // extracted from the computed self-energies; η far below Γ so the
        // residual lead-induced level shift stays under the tolerance
        let lead = LeadSpec::chain(0.0, 20.0, 0.0, 0.0, 1).unwrap();
        let tau = (0.005f64 * 20.0 / 2.0).sqrt(); // Γ_side = 2τ²/|t| = 0.005
        let device = DeviceSpec::new(
            CMat::scalar(Complex64::new(0.0, 0.0)),
            0,
            0.0,
            CMat::scalar(Complex64::new(tau, 0.0)),
            CMat::scalar(Complex64::new(tau, 0.0)),
        )
        .unwrap();
        let spec = ModelSpec {
            device,
            left: lead.clone(),
            right: lead,
            law: DistanceLaw::new(1.0, 1.0, 2.05).unwrap(),
        };
        let mut model = spec
            .assemble(Alignment::Pc, 2.05, SpinResolved::uniform(0.0))
            .unwrap();
        model.numerics.eta = 1e-9;

        let z = ComplexEnergy::retarded(0.0, model.numerics.eta);
        let (sl, sr) = crate::greens::lead_self_energies(&model, SpinChannel::Up, z).unwrap();
        let gamma_l = -2.0 * sl.sigma[(0, 0)].im;
        let gamma_r = -2.0 * sr.sigma[(0, 0)].im;
        let half_sum = 0.5 * (gamma_l + gamma_r);

        let t0 = transmission(&model, SpinChannel::Up, 0.0).unwrap();
        assert_abs_diff_eq!(t0, 1.0, epsilon = 1e-4);
        // T at one total width off resonance: Γ_LΓ_R/(E² + ((Γ_L+Γ_R)/2)²)
        let e = gamma_l + gamma_r;
        let t = transmission(&model, SpinChannel::Up, e).unwrap();
        let bw = gamma_l * gamma_r / (e * e + half_sum * half_sum);
        assert_abs_diff_eq!(t, bw, epsilon = 1e-4);
        assert_abs_diff_eq!(bw, 0.2, epsilon = 1e-4);
    }

    #[test]
    fn single_site_channel_equals_transmission() {
        let model = pristine_model();
        for e in [-1.2, 0.0, 0.8] {
            let t = transmission(&model, SpinChannel::Up, e).unwrap();
            let ch = eigenchannels(&model, SpinChannel::Up, e).unwrap();
            assert_eq!(ch.len(), 1);
            assert_abs_diff_eq!(ch[0], t, epsilon = 1e-10);
        }
    }

    #[test]
    fn channels_sum_to_transmission_on_preset() {
        let spec = presets::copc_analog();
        let model = spec
            .assemble(Alignment::Apc, 2.3, SpinResolved::new(0.62, 0.35))
            .unwrap();
        for spin in SpinChannel::BOTH {
            for e in [-0.9, -0.2, 0.0, 0.4, 1.0] {
                let t = transmission(&model, spin, e).unwrap();
                let ch = eigenchannels(&model, spin, e).unwrap();
                let sum: f64 = ch.iter().sum();
                assert_abs_diff_eq!(sum, t, epsilon = 1e-9);
                for (k, c) in ch.iter().enumerate() {
                    assert!(*c >= -1e-10 && *c <= 1.0 + 1e-10, "channel {k} = {c}");
                    if k > 0 {
                        assert!(ch[k - 1] >= *c - 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn reciprocity_of_trace_formula() {
        let spec = presets::copc_analog();
        let model = spec
            .assemble(Alignment::Pc, 2.8, SpinResolved::new(0.7, 0.3))
            .unwrap();
        for spin in SpinChannel::BOTH {
            for e in [-0.6, 0.0, 0.7] {
                let z = ComplexEnergy::retarded(e, model.numerics.eta);
                let (sl, sr) = crate::greens::lead_self_energies(&model, spin, z).unwrap();
                let g = crate::greens::device_gf(&model, spin, z, &sl, &sr).unwrap();
                let ga = g.conj_transpose();
                let gl = crate::greens::broadening(&sl).unwrap().gamma;
                let gr = crate::greens::broadening(&sr).unwrap().gamma;
                let t_lr = gl.matmul(&g).matmul(&gr).matmul(&ga).trace().re;
                let t_rl = gr.matmul(&g).matmul(&gl).matmul(&ga).trace().re;
                assert_abs_diff_eq!(t_lr, t_rl, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn spin_symmetry_without_polarization() {
        let mut spec = presets::copc_analog();
        spec.left.exchange = 0.0;
        spec.right.exchange = 0.0;
        spec.device.u_hubbard = 0.0;
        let model = spec
            .assemble(Alignment::Pc, 3.0, SpinResolved::uniform(0.5))
            .unwrap();
        for e in [-1.0, -0.2, 0.0, 0.6] {
            let t_up = transmission(&model, SpinChannel::Up, e).unwrap();
            let t_down = transmission(&model, SpinChannel::Down, e).unwrap();
            assert_eq!(t_up, t_down);
            let d = dos_record(&model, e).unwrap();
            assert_eq!(d.total.up, d.total.down);
        }
    }

    #[test]
    fn transmission_bounded_by_open_channels() {
        let spec = presets::copc_analog();
        let mut model = spec
            .assemble(Alignment::Pc, 2.05, SpinResolved::new(0.8, 0.25))
            .unwrap();
        // η leaks an evanescent tail of the same order through closed
        // channels, so it sits below the 1e-9 bound slack here
        model.numerics.eta = 1e-10;
        // grid offset keeps 0.05 eV away from the exchange-split band edges
        // (all at multiples of 0.1 eV for this preset), where the
        // open-channel count jumps and finite η leaks an evanescent tail
        let eps_l = spec.left.h00[(0, 0)].re;
        let t_l = spec.left.h01[(0, 0)].re;
        let eps_r = spec.right.h00[(0, 0)].re;
        let t_r = spec.right.h01[(0, 0)].re;
        let mut e = -2.95;
        while e <= 3.0 {
            for spin in SpinChannel::BOTH {
                let n_left = chain_open_channels(eps_l, t_l, spec.left.exchange, true, spin, e);
                let n_right = chain_open_channels(eps_r, t_r, spec.right.exchange, true, spin, e);
                let bound = n_left.min(n_right) as f64;
                let t = transmission(&model, spin, e).unwrap();
                assert!(t <= bound + 1e-9, "T = {t} > {bound} at E = {e}, {spin:?}");
            }
            e += 0.1;
        }
    }

    #[test]
    fn dos_lorentzian_peak_and_sum_rule() {
        // wide-band single site via synthetic self-energies: G = 1/(E + iΓ)
        let model = pristine_model();
        let gamma = 0.2;
        let sl = SelfEnergy {
            sigma: CMat::scalar(Complex64::new(0.0, -0.5 * gamma)),
            spin: SpinChannel::Up,
            side: Side::Left,
        };
        let sr = SelfEnergy {
            sigma: CMat::scalar(Complex64::new(0.0, -0.5 * gamma)),
            spin: SpinChannel::Up,
            side: Side::Right,
        };
        let z = ComplexEnergy::retarded(0.0, 1e-12);
        let g = crate::greens::device_gf(&model, SpinChannel::Up, z, &sl, &sr).unwrap();
        let peak = -(1.0 / core::f64::consts::PI) * g[(0, 0)].im;
        assert_abs_diff_eq!(peak, 1.0 / (core::f64::consts::PI * gamma), epsilon = 1e-9);

        // isolated level broadened only by η integrates to one electron
        let eta = 1e-3;
        let mut lone = pristine_model();
        lone.numerics.eta = eta;
        let zero_l = SelfEnergy {
            sigma: CMat::zeros(1, 1),
            spin: SpinChannel::Up,
            side: Side::Left,
        };
        let zero_r = SelfEnergy {
            sigma: CMat::zeros(1, 1),
            spin: SpinChannel::Up,
            side: Side::Right,
        };
        let window = 1000.0 * eta;
        let n_pts = 40001usize;
        let h = 2.0 * window / (n_pts as f64 - 1.0);
        let mut acc = 0.0;
        for k in 0..n_pts {
            let e = -window + h * (k as f64);
            let zk = ComplexEnergy::retarded(e, eta);
            let gk = crate::greens::device_gf(&lone, SpinChannel::Up, zk, &zero_l, &zero_r)
                .unwrap();
            let w = if k == 0 || k == n_pts - 1 { 0.5 } else { 1.0 };
            acc += w * h * (-(1.0 / core::f64::consts::PI) * gk[(0, 0)].im);
        }
        assert_abs_diff_eq!(acc, 1.0, epsilon = 1e-3);
    }

    #[test]
    fn global_spin_rotation_leaves_transmission_invariant() {
        // swapping up/down everywhere and reversing both lead
        // magnetizations relabels the channels without changing physics
        let spec = presets::copc_analog();
        let model = spec
            .assemble(Alignment::Apc, 2.35, SpinResolved::new(0.68, 0.27))
            .unwrap();
        let mut flipped_spec = spec.clone();
        flipped_spec.left.magnetization_sign = -1;
        flipped_spec.right.magnetization_sign = -1;
        let flipped = flipped_spec
            .assemble(Alignment::Apc, 2.35, SpinResolved::new(0.27, 0.68))
            .unwrap();
        for e in [-0.8, -0.2, 0.0, 0.45, 1.1] {
            for spin in SpinChannel::BOTH {
                let t = transmission(&model, spin, e).unwrap();
                let t_flipped = transmission(&flipped, spin.other(), e).unwrap();
                assert_abs_diff_eq!(t, t_flipped, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn dos_record_total_is_site_sum() {
        let spec = presets::copc_analog();
        let model = spec
            .assemble(Alignment::Apc, 2.4, SpinResolved::new(0.6, 0.4))
            .unwrap();
        let rec = dos_record(&model, 0.1).unwrap();
        for spin in SpinChannel::BOTH {
            let sum: f64 = rec.per_site.get(spin).iter().sum();
            assert_abs_diff_eq!(*rec.total.get(spin), sum, epsilon = 1e-9);
            for v in rec.per_site.get(spin) {
                assert!(*v >= -1e-10);
            }
        }
    }
}

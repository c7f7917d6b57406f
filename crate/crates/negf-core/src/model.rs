//! Tight-binding junction models: exchange-split semi-infinite leads, a
//! molecular device region with one interacting central site, and a tip
//! whose coupling decays exponentially with tip-molecule distance.

use alloc::format;
use alloc::vec;
use num_complex::Complex64;

use crate::cmatrix::CMat;
use crate::error::Error;
use crate::fmath;
use crate::Result;

/// Hermiticity tolerance enforced on model matrices, in eV.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Collinear spin channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinChannel {
    Up,
    Down,
}

impl SpinChannel {
    pub const BOTH: [SpinChannel; 2] = [SpinChannel::Up, SpinChannel::Down];

    /// The opposite channel; an involution.
    pub fn other(self) -> SpinChannel {
        match self {
            SpinChannel::Up => SpinChannel::Down,
            SpinChannel::Down => SpinChannel::Up,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SpinChannel::Up => "up",
            SpinChannel::Down => "down",
        }
    }
}

/// A pair of values indexed by spin channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinResolved<T> {
    pub up: T,
    pub down: T,
}

impl<T> SpinResolved<T> {
    pub fn new(up: T, down: T) -> Self {
        SpinResolved { up, down }
    }

    pub fn uniform(value: T) -> Self
    where
        T: Clone,
    {
        SpinResolved {
            up: value.clone(),
            down: value,
        }
    }

    pub fn get(&self, spin: SpinChannel) -> &T {
        match spin {
            SpinChannel::Up => &self.up,
            SpinChannel::Down => &self.down,
        }
    }

    pub fn get_mut(&mut self, spin: SpinChannel) -> &mut T {
        match spin {
            SpinChannel::Up => &mut self.up,
            SpinChannel::Down => &mut self.down,
        }
    }

    /// Swap the two channels.
    pub fn flipped(self) -> Self {
        SpinResolved {
            up: self.down,
            down: self.up,
        }
    }

    pub fn map<U, F: FnMut(&T) -> U>(&self, mut f: F) -> SpinResolved<U> {
        SpinResolved {
            up: f(&self.up),
            down: f(&self.down),
        }
    }
}

/// Which lead of the two-terminal setup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Relative magnetization of tip and substrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alignment {
    /// Parallel configuration: tip and substrate majority spins coincide.
    Pc,
    /// Antiparallel configuration: the tip exchange field is reversed.
    Apc,
}

impl Alignment {
    pub fn label(self) -> &'static str {
        match self {
            Alignment::Pc => "PC",
            Alignment::Apc => "APC",
        }
    }
}

/// Principal-layer description of a semi-infinite periodic electrode.
///
/// `h00` is the intra-layer block, `h01` the coupling toward the device.
/// A Stoner-like exchange splitting shifts the majority spin by `-Δ/2` and
/// the minority spin by `+Δ/2`; `magnetization_sign = +1` makes spin-up the
/// majority, `-1` spin-down.
#[derive(Debug, Clone, PartialEq)]
pub struct LeadSpec {
    pub h00: CMat,
    pub h01: CMat,
    pub exchange: f64,
    pub mu: f64,
    pub magnetization_sign: i8,
}

impl LeadSpec {
    pub fn new(h00: CMat, h01: CMat, exchange: f64, mu: f64, magnetization_sign: i8) -> Result<Self> {
        let n = h00.rows();
        if n == 0 || !h00.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "lead h00 must be square and nonempty, got {}x{}",
                h00.rows(),
                h00.cols()
            )));
        }
        if h01.rows() != n || h01.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "lead h01 must match h00 ({n}x{n}), got {}x{}",
                h01.rows(),
                h01.cols()
            )));
        }
        h00.check_hermitian(HERMITICITY_TOL)?;
        if exchange < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lead exchange must be >= 0, got {exchange}"
            )));
        }
        if magnetization_sign != 1 && magnetization_sign != -1 {
            return Err(Error::InvalidParameter(
                "magnetization_sign must be +1 or -1".into(),
            ));
        }
        Ok(LeadSpec {
            h00,
            h01,
            exchange,
            mu,
            magnetization_sign,
        })
    }

    /// Single-orbital lead with onsite energy `eps` and hopping `t`.
    pub fn chain(eps: f64, t: f64, exchange: f64, mu: f64, magnetization_sign: i8) -> Result<Self> {
        LeadSpec::new(
            CMat::scalar(Complex64::new(eps, 0.0)),
            CMat::scalar(Complex64::new(t, 0.0)),
            exchange,
            mu,
            magnetization_sign,
        )
    }

    pub fn n_orb(&self) -> usize {
        self.h00.rows()
    }

    /// Conservative lower bound on the lead band bottom over both spins:
    /// `min eig(h00) - Δ/2 - 2 ||h01||_F`.
    pub fn band_bottom_bound(&self) -> Result<f64> {
        let evals = self.h00.hermitian_eigenvalues()?;
        let min = evals.first().copied().unwrap_or(0.0);
        Ok(min - 0.5 * self.exchange - 2.0 * self.h01.frobenius_norm())
    }
}

/// Effective per-spin lead blocks with the exchange shift applied.
///
/// `flip` reverses the lead magnetization (used for the tip in APC).
pub fn build_lead(spec: &LeadSpec, spin: SpinChannel, flip: bool) -> (CMat, CMat) {
    let majority_up = (spec.magnetization_sign == 1) != flip;
    let is_majority = match spin {
        SpinChannel::Up => majority_up,
        SpinChannel::Down => !majority_up,
    };
    let shift = if is_majority {
        -0.5 * spec.exchange
    } else {
        0.5 * spec.exchange
    };
    let n = spec.n_orb();
    let mut h00 = spec.h00.clone();
    for i in 0..n {
        h00[(i, i)] += Complex64::new(shift, 0.0);
    }
    (h00, spec.h01.clone())
}

/// Tip-molecule coupling amplitude as a function of distance:
/// `t0 · exp(-beta (d - d0))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceLaw {
    pub t0: f64,
    pub beta: f64,
    pub d0: f64,
}

impl DistanceLaw {
    pub fn new(t0: f64, beta: f64, d0: f64) -> Result<Self> {
        if !(t0 > 0.0) || !(beta > 0.0) || !d0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "distance law needs t0 > 0, beta > 0, finite d0 (got t0={t0}, beta={beta}, d0={d0})"
            )));
        }
        Ok(DistanceLaw { t0, beta, d0 })
    }
}

/// Evaluate the distance law; strictly positive and strictly decreasing in d.
pub fn distance_to_coupling(d: f64, law: &DistanceLaw) -> f64 {
    law.t0 * fmath::exp(-law.beta * (d - law.d0))
}

/// The molecular device region: a spin-independent Hamiltonian, one
/// interacting central site, and coupling matrices to both leads (the
/// right/tip coupling is a template later scaled by the distance law).
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceSpec {
    pub h_dev: CMat,
    pub central_index: usize,
    pub u_hubbard: f64,
    pub coupling_left: CMat,
    pub coupling_right_template: CMat,
}

impl DeviceSpec {
    pub fn new(
        h_dev: CMat,
        central_index: usize,
        u_hubbard: f64,
        coupling_left: CMat,
        coupling_right_template: CMat,
    ) -> Result<Self> {
        let n = h_dev.rows();
        if n == 0 || !h_dev.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "device Hamiltonian must be square and nonempty, got {}x{}",
                h_dev.rows(),
                h_dev.cols()
            )));
        }
        h_dev.check_hermitian(HERMITICITY_TOL)?;
        if central_index >= n {
            return Err(Error::InvalidParameter(format!(
                "central_index {central_index} out of range for {n} sites"
            )));
        }
        if u_hubbard < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "u_hubbard must be >= 0, got {u_hubbard}"
            )));
        }
        for (name, v) in [("coupling_left", &coupling_left), ("coupling_right", &coupling_right_template)]
        {
            if v.cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "{name} must have {n} columns, got {}",
                    v.cols()
                )));
            }
        }
        Ok(DeviceSpec {
            h_dev,
            central_index,
            u_hubbard,
            coupling_left,
            coupling_right_template,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.h_dev.rows()
    }
}

/// Numerical knobs for Green's-function evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    /// Retarded infinitesimal for real-axis evaluation, eV.
    pub eta: f64,
    /// Frobenius residual target of the decimation fixed point.
    pub decimation_tol: f64,
    pub decimation_max_iter: usize,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            eta: 1e-6,
            decimation_tol: 1e-10,
            decimation_max_iter: 200,
        }
    }
}

/// Fully assembled two-terminal system for one (alignment, distance) point.
#[derive(Debug, Clone, PartialEq)]
pub struct JunctionModel {
    pub h_dev_eff: SpinResolved<CMat>,
    pub left: LeadSpec,
    pub right: LeadSpec,
    pub v_left: SpinResolved<CMat>,
    pub v_right: SpinResolved<CMat>,
    pub alignment: Alignment,
    pub distance: f64,
    pub mu: f64,
    pub numerics: Numerics,
}

impl JunctionModel {
    pub fn n_sites(&self) -> usize {
        self.h_dev_eff.up.rows()
    }

    pub fn lead(&self, side: Side) -> &LeadSpec {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// Whether the exchange field of a lead is reversed for this model.
    pub fn lead_flip(&self, side: Side) -> bool {
        side == Side::Right && self.alignment == Alignment::Apc
    }

    /// Effective per-spin principal-layer blocks of one lead.
    pub fn lead_blocks(&self, side: Side, spin: SpinChannel) -> (CMat, CMat) {
        build_lead(self.lead(side), spin, self.lead_flip(side))
    }

    pub fn coupling(&self, side: Side, spin: SpinChannel) -> &CMat {
        match side {
            Side::Left => self.v_left.get(spin),
            Side::Right => self.v_right.get(spin),
        }
    }

    pub fn with_numerics(mut self, numerics: Numerics) -> Self {
        self.numerics = numerics;
        self
    }
}

/// Assemble a junction at distance `d`.
///
/// The frozen mean field enters the central-site onsite energy as
/// `U n_{-σ}`; APC reverses the tip exchange only; the tip coupling is the
/// template scaled by the distance law.
pub fn assemble_junction(
    dev: &DeviceSpec,
    left: &LeadSpec,
    right: &LeadSpec,
    alignment: Alignment,
    d: f64,
    law: &DistanceLaw,
    frozen_field: SpinResolved<f64>,
) -> Result<JunctionModel> {
    if !d.is_finite() {
        return Err(Error::InvalidParameter(format!("distance must be finite, got {d}")));
    }
    let n = dev.n_sites();
    if dev.coupling_left.rows() != left.n_orb() {
        return Err(Error::DimensionMismatch(format!(
            "coupling_left rows {} != left lead orbitals {}",
            dev.coupling_left.rows(),
            left.n_orb()
        )));
    }
    if dev.coupling_right_template.rows() != right.n_orb() {
        return Err(Error::DimensionMismatch(format!(
            "coupling_right rows {} != right lead orbitals {}",
            dev.coupling_right_template.rows(),
            right.n_orb()
        )));
    }
    if left.mu != right.mu {
        return Err(Error::InvalidParameter(format!(
            "leads must share the chemical potential at zero bias (left {} vs right {})",
            left.mu, right.mu
        )));
    }

    let mut h_eff = SpinResolved::new(dev.h_dev.clone(), dev.h_dev.clone());
    for spin in SpinChannel::BOTH {
        let opposite = *frozen_field.get(spin.other());
        let shift = dev.u_hubbard * opposite;
        h_eff.get_mut(spin)[(dev.central_index, dev.central_index)] +=
            Complex64::new(shift, 0.0);
        h_eff.get(spin).check_hermitian(HERMITICITY_TOL)?;
    }

    let scale = Complex64::new(distance_to_coupling(d, law), 0.0);
    let v_right = dev.coupling_right_template.scale(scale);
    let _ = n;
    Ok(JunctionModel {
        h_dev_eff: h_eff,
        left: left.clone(),
        right: right.clone(),
        v_left: SpinResolved::uniform(dev.coupling_left.clone()),
        v_right: SpinResolved::uniform(v_right),
        alignment,
        distance: d,
        mu: left.mu,
        numerics: Numerics::default(),
    })
}

/// A named model: device, leads, and distance law.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub device: DeviceSpec,
    pub left: LeadSpec,
    pub right: LeadSpec,
    pub law: DistanceLaw,
}

impl ModelSpec {
    pub fn assemble(
        &self,
        alignment: Alignment,
        d: f64,
        frozen_field: SpinResolved<f64>,
    ) -> Result<JunctionModel> {
        assemble_junction(
            &self.device,
            &self.left,
            &self.right,
            alignment,
            d,
            &self.law,
            frozen_field,
        )
    }
}

/// Demonstration presets.
pub mod presets {
    use super::*;

    /// Nonmagnetic single-site device embedded in a perfect chain; transmits
    /// one unit per spin across the whole band.
    pub fn pristine_chain() -> ModelSpec {
        let lead = LeadSpec::chain(0.0, -1.0, 0.0, 0.0, 1).expect("valid chain lead");
        let device = DeviceSpec::new(
            CMat::scalar(Complex64::new(0.0, 0.0)),
            0,
            0.0,
            CMat::scalar(Complex64::new(-1.0, 0.0)),
            CMat::scalar(Complex64::new(-1.0, 0.0)),
        )
        .expect("valid pristine device");
        ModelSpec {
            device,
            left: lead.clone(),
            right: lead,
            law: DistanceLaw::new(1.0, 1.0, 2.05).expect("valid law"),
        }
    }

    /// Magnetic-molecule junction analog: exchange-split substrate and tip
    /// chains around a three-site device chain
    /// (substrate — anchor — magnetic center — anchor — tip) with an
    /// interacting central site.
    ///
    /// The substrate exchange, fed through the left anchor, pins a positive
    /// central moment; the tip field arrives through the right anchor and
    /// competes with it only when the distance law makes the tip coupling
    /// strong. Calibrated so that under the antiparallel alignment the
    /// central moment reverses sign near d* ≈ 2.5 Å while the parallel
    /// alignment keeps a positive moment over 2.05-6.0 Å, with the
    /// magnetoresistance negative at contact, positive in tunneling, and
    /// near zero at d*.
    pub fn copc_analog() -> ModelSpec {
        copc_analog_with(CopcParams::default())
    }

    /// Tunable parameters of the `copc-analog` preset.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct CopcParams {
        pub lead_onsite: f64,
        pub lead_hopping: f64,
        pub exchange_substrate: f64,
        pub exchange_tip: f64,
        pub mu: f64,
        /// Onsite energies of the substrate-side and tip-side anchors.
        pub anchor_onsite_left: f64,
        pub anchor_onsite_right: f64,
        pub center_onsite: f64,
        /// Hopping between the substrate-side anchor and the center.
        pub hopping_left: f64,
        /// Hopping between the center and the tip-side anchor.
        pub hopping_right: f64,
        /// Substrate coupling per device site.
        pub substrate_couplings: [f64; 3],
        /// Tip coupling template per device site (scaled by the distance law).
        pub tip_couplings: [f64; 3],
        pub u_hubbard: f64,
        pub t0: f64,
        pub beta: f64,
        pub d0: f64,
    }

    impl Default for CopcParams {
        fn default() -> Self {
            CopcParams {
                lead_onsite: -0.3,
                lead_hopping: -1.0,
                exchange_substrate: 1.6,
                exchange_tip: 2.0,
                mu: 0.0,
                anchor_onsite_left: -0.6,
                anchor_onsite_right: -0.45,
                center_onsite: -1.0,
                hopping_left: -0.5,
                hopping_right: -0.7,
                substrate_couplings: [-0.7, 0.0, 0.0],
                tip_couplings: [0.0, 0.0, -0.55],
                u_hubbard: 2.0,
                t0: 1.0,
                beta: 1.0,
                d0: 2.05,
            }
        }
    }

    pub fn copc_analog_with(p: CopcParams) -> ModelSpec {
        let left = LeadSpec::chain(p.lead_onsite, p.lead_hopping, p.exchange_substrate, p.mu, 1)
            .expect("valid substrate lead");
        let right = LeadSpec::chain(p.lead_onsite, p.lead_hopping, p.exchange_tip, p.mu, 1)
            .expect("valid tip lead");
        let h_dev = CMat::from_real_rows(&[
            vec![p.anchor_onsite_left, p.hopping_left, 0.0],
            vec![p.hopping_left, p.center_onsite, p.hopping_right],
            vec![0.0, p.hopping_right, p.anchor_onsite_right],
        ])
        .expect("valid device rows");
        let coupling_left =
            CMat::from_real_rows(&[p.substrate_couplings.to_vec()]).expect("valid left coupling");
        let coupling_right =
            CMat::from_real_rows(&[p.tip_couplings.to_vec()]).expect("valid template");
        let device = DeviceSpec::new(h_dev, 1, p.u_hubbard, coupling_left, coupling_right)
            .expect("valid copc-analog device");
        ModelSpec {
            device,
            left,
            right,
            law: DistanceLaw::new(p.t0, p.beta, p.d0).expect("valid law"),
        }
    }

    /// Look up a preset by its CLI name.
    pub fn by_name(name: &str) -> Option<ModelSpec> {
        match name {
            "pristine-chain" => Some(pristine_chain()),
            "copc-analog" => Some(copc_analog()),
            _ => None,
        }
    }

    pub fn names() -> &'static [&'static str] {
        &["pristine-chain", "copc-analog"]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn spin_other_is_involution() {
        for s in SpinChannel::BOTH {
            assert_eq!(s.other().other(), s);
            assert_ne!(s.other(), s);
        }
    }

    #[test]
    fn distance_law_examples() {
        let law = DistanceLaw::new(1.0, 1.0, 2.05).unwrap();
        assert_abs_diff_eq!(distance_to_coupling(2.05, &law), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            distance_to_coupling(2.05 + core::f64::consts::LN_2, &law),
            0.5,
            epsilon = 1e-15
        );
        // direct evaluation of the exponential at d = 5.0
        assert_abs_diff_eq!(
            distance_to_coupling(5.0, &law),
            (-2.95f64).exp(),
            epsilon = 1e-15
        );
        assert!((distance_to_coupling(5.0, &law) - 0.0523).abs() < 2e-4);
    }

    #[test]
    fn coupling_strictly_decreasing() {
        let law = DistanceLaw::new(0.8, 1.3, 2.0).unwrap();
        let mut prev = f64::INFINITY;
        let mut d = 0.0;
        while d < 8.0 {
            let c = distance_to_coupling(d, &law);
            assert!(c > 0.0 && c < prev);
            prev = c;
            d += 0.37;
        }
    }

    #[test]
    fn build_lead_exchange_shift() {
        // no exchange: identical blocks for both spins
        let lead0 = LeadSpec::chain(0.3, -1.0, 0.0, 0.0, 1).unwrap();
        let (up, _) = build_lead(&lead0, SpinChannel::Up, false);
        let (down, _) = build_lead(&lead0, SpinChannel::Down, false);
        assert_eq!(up, down);

        // Δ = 1, spin up majority: h00_up = -0.5
        let lead = LeadSpec::chain(0.0, -1.0, 1.0, 0.0, 1).unwrap();
        let (h_up, _) = build_lead(&lead, SpinChannel::Up, false);
        assert_abs_diff_eq!(h_up[(0, 0)].re, -0.5, epsilon = 1e-15);
        // flip reverses the shift
        let (h_up_flipped, _) = build_lead(&lead, SpinChannel::Up, true);
        assert_abs_diff_eq!(h_up_flipped[(0, 0)].re, 0.5, epsilon = 1e-15);
        // magnetization_sign = -1 makes spin-down the majority
        let lead_neg = LeadSpec::chain(0.0, -1.0, 1.0, 0.0, -1).unwrap();
        let (h_down_neg, _) = build_lead(&lead_neg, SpinChannel::Down, false);
        assert_abs_diff_eq!(h_down_neg[(0, 0)].re, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn assemble_spin_degenerate_when_unpolarized() {
        let spec = presets::pristine_chain();
        let model = spec
            .assemble(Alignment::Pc, 2.05, SpinResolved::uniform(0.0))
            .unwrap();
        assert_eq!(model.h_dev_eff.up, model.h_dev_eff.down);
    }

    #[test]
    fn apc_swaps_tip_blocks_between_spins_only() {
        let spec = presets::copc_analog();
        let pc = spec
            .assemble(Alignment::Pc, 3.0, SpinResolved::uniform(0.5))
            .unwrap();
        let apc = spec
            .assemble(Alignment::Apc, 3.0, SpinResolved::uniform(0.5))
            .unwrap();
        for spin in SpinChannel::BOTH {
            // left lead identical in both alignments
            assert_eq!(
                pc.lead_blocks(Side::Left, spin),
                apc.lead_blocks(Side::Left, spin)
            );
            // right lead blocks swapped between spins
            assert_eq!(
                pc.lead_blocks(Side::Right, spin),
                apc.lead_blocks(Side::Right, spin.other())
            );
        }
    }

    #[test]
    fn pc_apc_bit_identical_when_tip_unpolarized() {
        let mut spec = presets::copc_analog();
        spec.right.exchange = 0.0;
        let field = SpinResolved::new(0.7, 0.3);
        let pc = spec.assemble(Alignment::Pc, 2.5, field).unwrap();
        let apc = spec.assemble(Alignment::Apc, 2.5, field).unwrap();
        for spin in SpinChannel::BOTH {
            assert_eq!(
                pc.lead_blocks(Side::Right, spin),
                apc.lead_blocks(Side::Right, spin)
            );
            assert_eq!(pc.h_dev_eff.get(spin), apc.h_dev_eff.get(spin));
            assert_eq!(pc.coupling(Side::Right, spin), apc.coupling(Side::Right, spin));
        }
    }

    #[test]
    fn tip_coupling_scales_with_distance_law() {
        let spec = presets::copc_analog();
        let d0 = spec.law.d0;
        let m0 = spec
            .assemble(Alignment::Pc, d0, SpinResolved::uniform(0.5))
            .unwrap();
        let m1 = spec
            .assemble(
                Alignment::Pc,
                d0 + (10.0f64).ln() / spec.law.beta,
                SpinResolved::uniform(0.5),
            )
            .unwrap();
        let r = m1.v_right.up[(0, 2)].re / m0.v_right.up[(0, 2)].re;
        assert_abs_diff_eq!(r, 0.1, epsilon = 1e-12);
    }

    #[test]
    fn assembled_hamiltonians_hermitian() {
        let spec = presets::copc_analog();
        for align in [Alignment::Pc, Alignment::Apc] {
            let m = spec
                .assemble(align, 2.4, SpinResolved::new(0.81, 0.22))
                .unwrap();
            for spin in SpinChannel::BOTH {
                assert!(m.h_dev_eff.get(spin).hermiticity_defect() <= HERMITICITY_TOL);
            }
        }
    }

    #[test]
    fn mean_field_shift_on_central_site() {
        let spec = presets::copc_analog();
        let field = SpinResolved::new(0.9, 0.1);
        let m = spec.assemble(Alignment::Pc, 2.4, field).unwrap();
        let u = spec.device.u_hubbard;
        let c = spec.device.central_index;
        let base = spec.device.h_dev[(c, c)].re;
        assert_abs_diff_eq!(m.h_dev_eff.up[(c, c)].re, base + u * 0.1, epsilon = 1e-14);
        assert_abs_diff_eq!(m.h_dev_eff.down[(c, c)].re, base + u * 0.9, epsilon = 1e-14);
    }

    #[test]
    fn rejects_mismatched_coupling() {
        let spec = presets::copc_analog();
        let bad_left = LeadSpec::new(
            CMat::zeros(2, 2),
            CMat::zeros(2, 2),
            0.0,
            0.0,
            1,
        )
        .unwrap();
        let err = assemble_junction(
            &spec.device,
            &bad_left,
            &spec.right,
            Alignment::Pc,
            3.0,
            &spec.law,
            SpinResolved::uniform(0.5),
        );
        assert!(matches!(err, Err(Error::DimensionMismatch(_))));
    }
}

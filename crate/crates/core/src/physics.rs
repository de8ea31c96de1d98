//! Closed-form single-atom and superatom quantities: transverse relaxation
//! rates, blockade radius, the saturable collective Rydberg population and
//! the complex polarizabilities of the two-level and EIT branches.
//!
//! All rates and detunings are angular frequencies in rad/s, lengths in μm,
//! densities in μm⁻³. Every function here is pure.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhysicsError {
    #[error("invalid atomic system: {0}")]
    InvalidSystem(String),
    #[error("blockade radius diverges for omega_c = 0")]
    NoBlockade,
}

/// Fixed physical constants of a run: decay rates, laser linewidths, the
/// van der Waals coefficient and the control-field parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomicSystem {
    /// Population decay rate of the intermediate state, rad/s.
    pub gamma_e_pop: f64,
    /// Population decay rate of the Rydberg state, rad/s.
    pub gamma_r_pop: f64,
    /// One-photon laser linewidth, rad/s.
    pub linewidth_1ph: f64,
    /// Two-photon laser linewidth, rad/s.
    pub linewidth_2ph: f64,
    /// Van der Waals coefficient, rad/s·μm⁶ (repulsive, > 0).
    pub c6: f64,
    /// Control Rabi frequency, rad/s (real, ≥ 0).
    pub omega_c: f64,
    /// Control detuning, rad/s.
    pub delta_c: f64,
}

impl AtomicSystem {
    /// Validates the parameter set. `omega_c = 0` is allowed (two-level
    /// limit); the blockade-derived quantities reject it separately.
    pub fn new(
        gamma_e_pop: f64,
        gamma_r_pop: f64,
        linewidth_1ph: f64,
        linewidth_2ph: f64,
        c6: f64,
        omega_c: f64,
        delta_c: f64,
    ) -> Result<Self, PhysicsError> {
        let sys = Self {
            gamma_e_pop,
            gamma_r_pop,
            linewidth_1ph,
            linewidth_2ph,
            c6,
            omega_c,
            delta_c,
        };
        sys.validate()?;
        Ok(sys)
    }

    fn validate(&self) -> Result<(), PhysicsError> {
        let err = |msg: &str| Err(PhysicsError::InvalidSystem(msg.to_string()));
        if !(self.gamma_e_pop > 0.0) {
            return err("gamma_e_pop must be > 0");
        }
        if !(self.gamma_r_pop >= 0.0) {
            return err("gamma_r_pop must be >= 0");
        }
        if !(self.linewidth_1ph >= 0.0) || !(self.linewidth_2ph >= 0.0) {
            return err("laser linewidths must be >= 0");
        }
        if !(self.c6 > 0.0) {
            return err("c6 must be > 0 (repulsive van der Waals)");
        }
        if !(self.omega_c >= 0.0) {
            return err("omega_c must be >= 0");
        }
        if !self.delta_c.is_finite() {
            return err("delta_c must be finite");
        }
        if self.gamma_r() >= self.gamma_e() {
            return err("transverse rate of the Rydberg coherence must stay below that of the optical coherence");
        }
        Ok(())
    }

    /// Transverse relaxation rate of the optical coherence:
    /// half the population decay plus the one-photon laser linewidth.
    pub fn gamma_e(&self) -> f64 {
        self.gamma_e_pop / 2.0 + self.linewidth_1ph
    }

    /// Transverse relaxation rate of the two-photon coherence.
    pub fn gamma_r(&self) -> f64 {
        self.gamma_r_pop / 2.0 + self.linewidth_2ph
    }

    /// Both transverse rates as a `(gamma_e, gamma_r)` pair.
    pub fn transverse_rates(&self) -> (f64, f64) {
        (self.gamma_e(), self.gamma_r())
    }

    pub fn omega_c_sq(&self) -> f64 {
        self.omega_c * self.omega_c
    }

    /// Half-width of the transparency window, w = |Ω_c|²/γ_e.
    pub fn eit_half_width(&self) -> f64 {
        self.omega_c_sq() / self.gamma_e()
    }

    /// Distance at which the van der Waals shift equals the EIT linewidth:
    /// (C₆ γ_e / |Ω_c|²)^(1/6).
    pub fn blockade_radius(&self) -> Result<f64, PhysicsError> {
        if self.omega_c == 0.0 {
            return Err(PhysicsError::NoBlockade);
        }
        Ok((self.c6 / self.eit_half_width()).powf(1.0 / 6.0))
    }

    /// Volume of one blockade sphere, (4π/3) R³.
    pub fn superatom_volume(&self) -> Result<f64, PhysicsError> {
        let r = self.blockade_radius()?;
        Ok(4.0 * std::f64::consts::PI / 3.0 * r.powi(3))
    }

    /// Number density of superatoms, (3/4π)·√(|Ω_c|²/(γ_e C₆)).
    /// Identical to the inverse blockade volume.
    pub fn superatom_density(&self) -> Result<f64, PhysicsError> {
        if self.omega_c == 0.0 {
            return Err(PhysicsError::NoBlockade);
        }
        let ratio = self.omega_c_sq() / (self.gamma_e() * self.c6);
        Ok(3.0 / (4.0 * std::f64::consts::PI) * ratio.sqrt())
    }

    /// Mean-field shift of the two-photon resonance induced by Rydberg
    /// excitations outside the local blockade sphere: (w/8)·Σ_RR.
    pub fn mean_field_shift(&self, sigma_rr_uncond: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&sigma_rr_uncond));
        self.eit_half_width() / 8.0 * sigma_rr_uncond
    }
}

/// Probe detuning together with the derived two-photon detuning.
/// Always constructed from a system so that `delta_2 = delta_p + delta_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetuningPoint {
    pub delta_p: f64,
    pub delta_2: f64,
}

impl DetuningPoint {
    pub fn for_probe(sys: &AtomicSystem, delta_p: f64) -> Self {
        Self {
            delta_p,
            delta_2: delta_p + sys.delta_c,
        }
    }
}

/// Dimensionless complex polarizability. Im lies in [0, 1] for any physical
/// parameter combination: 1 on exact two-level resonance, 0 at perfect
/// transparency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polarizability(pub Complex64);

impl Polarizability {
    pub fn value(self) -> Complex64 {
        self.0
    }

    pub fn im(self) -> f64 {
        self.0.im
    }

    pub fn re(self) -> f64 {
        self.0.re
    }
}

/// Collective Rydberg population of a superatom of `n_sa` atoms driven at
/// squared probe Rabi frequency `i_p`, including saturation:
///
///   Σ_RR = |Ω_c|² n_sa i_p / ( |Ω_c|² n_sa i_p + [|Ω_c|² − Δ_p Δ₂]² + Δ₂² γ_e² )
///
/// Callers pass `i_p` multiplied by g² when the population conditioned on a
/// photon being present is wanted. Returns 0 for a vanishing denominator
/// (no drive, no excitation).
pub fn sigma_rr(sys: &AtomicSystem, d: &DetuningPoint, n_sa: f64, i_p: f64) -> f64 {
    debug_assert!(n_sa > 0.0);
    debug_assert!(i_p >= 0.0);
    let oc2 = sys.omega_c_sq();
    let drive = oc2 * n_sa * i_p;
    let line = (oc2 - d.delta_p * d.delta_2).powi(2) + (d.delta_2 * sys.gamma_e()).powi(2);
    let den = drive + line;
    if den == 0.0 {
        return 0.0;
    }
    drive / den
}

/// Polarizability of a bare two-level atom, iγ_e/(γ_e − iΔ_p).
pub fn alpha_tla(sys: &AtomicSystem, d: &DetuningPoint) -> Polarizability {
    let ge = sys.gamma_e();
    let den = Complex64::new(ge, -d.delta_p);
    Polarizability(Complex64::new(0.0, ge) / den)
}

/// EIT polarizability with the external-superatom mean-field shift,
/// iγ_e/(γ_e − iΔ_p + |Ω_c|²·[γ_r − i(Δ₂ − ⟨ŝ⟩)]⁻¹).
///
/// For Ω_c = 0 this reduces exactly to the two-level branch; in the ideal
/// limit γ_r = 0, Δ₂ = ⟨ŝ⟩ the medium is perfectly transparent and the
/// result is exactly zero.
pub fn alpha_eit(sys: &AtomicSystem, d: &DetuningPoint, mean_shift: f64) -> Polarizability {
    if sys.omega_c == 0.0 {
        return alpha_tla(sys, d);
    }
    let ge = sys.gamma_e();
    let inner = Complex64::new(sys.gamma_r(), -(d.delta_2 - mean_shift));
    if inner == Complex64::new(0.0, 0.0) {
        return Polarizability(Complex64::new(0.0, 0.0));
    }
    let den = Complex64::new(ge, -d.delta_p) + sys.omega_c_sq() / inner;
    Polarizability(Complex64::new(0.0, ge) / den)
}

/// Polarizability conditioned on the excitation probability of the local
/// superatom: p·α_TLA + (1 − p)·α_EIT.
pub fn alpha_conditional(
    a_tla: Polarizability,
    a_eit: Polarizability,
    p_exc: f64,
) -> Polarizability {
    debug_assert!((0.0..=1.0).contains(&p_exc));
    Polarizability(a_tla.0 * p_exc + a_eit.0 * (1.0 - p_exc))
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::TAU;

    /// Parameter set of the cold-Rb run used throughout the tests.
    pub(crate) fn rb_system() -> AtomicSystem {
        AtomicSystem::new(
            3.8e7,
            5e3,
            TAU * 5.7e4,
            TAU * 1.1e5,
            TAU * 1.4e11,
            TAU * 2.25e6,
            -TAU * 1e5,
        )
        .unwrap()
    }

    // Reference values computed with 50-digit arithmetic (mpmath) from the
    // same closed forms.
    const GAMMA_E_REF: f64 = 1.9358141562509236e7;
    const GAMMA_R_REF: f64 = 6.9365038378975451e5;
    const R_SA_REF: f64 = 6.6334755401958599;
    const V_SA_REF: f64 = 1222.6777401055954;
    const N_SA_REF: f64 = 14.672132881267145;
    const ALPHA_EIT_D20_RE: f64 = -1.2864505630944113e-4;
    const ALPHA_EIT_D20_IM: f64 = 6.295605999093809e-2;

    #[test]
    fn transverse_rates_match_reference() {
        let sys = rb_system();
        let (ge, gr) = sys.transverse_rates();
        assert_relative_eq!(ge, GAMMA_E_REF, max_relative = 1e-14);
        assert_relative_eq!(gr, GAMMA_R_REF, max_relative = 1e-14);
    }

    #[test]
    fn transverse_rates_radiative_limit() {
        let sys = AtomicSystem::new(3.8e7, 5e3, 0.0, 0.0, TAU * 1.4e11, TAU * 2.25e6, 0.0).unwrap();
        assert_eq!(sys.gamma_e(), 3.8e7 / 2.0);
        assert_eq!(sys.gamma_r(), 5e3 / 2.0);
    }

    #[test]
    fn blockade_radius_matches_reference() {
        let sys = rb_system();
        let r = sys.blockade_radius().unwrap();
        assert_relative_eq!(r, R_SA_REF, max_relative = 1e-13);
        assert_abs_diff_eq!(r, 6.6, epsilon = 0.1);
    }

    #[test]
    fn blockade_radius_scaling_laws() {
        let sys = rb_system();
        let r = sys.blockade_radius().unwrap();
        // 2^6 times stronger interaction doubles the radius
        let strong = AtomicSystem {
            c6: sys.c6 * 64.0,
            ..sys
        };
        assert_relative_eq!(
            strong.blockade_radius().unwrap(),
            2.0 * r,
            max_relative = 1e-12
        );
        // doubling the control Rabi frequency shrinks it by 4^(1/6)
        let driven = AtomicSystem {
            omega_c: sys.omega_c * 2.0,
            ..sys
        };
        assert_relative_eq!(
            driven.blockade_radius().unwrap(),
            r / 4f64.powf(1.0 / 6.0),
            max_relative = 1e-12
        );
    }

    #[test]
    fn blockade_rejects_zero_control_field() {
        let sys = AtomicSystem {
            omega_c: 0.0,
            ..rb_system()
        };
        assert_eq!(sys.blockade_radius(), Err(PhysicsError::NoBlockade));
        assert_eq!(sys.superatom_density(), Err(PhysicsError::NoBlockade));
    }

    #[test]
    fn superatom_density_consistent_with_radius() {
        let sys = rb_system();
        let v_sa = sys.superatom_volume().unwrap();
        assert_relative_eq!(v_sa, V_SA_REF, max_relative = 1e-13);
        // closed form against the sphere-volume route
        let rho_sa = sys.superatom_density().unwrap();
        assert_relative_eq!(rho_sa * v_sa, 1.0, max_relative = 1e-12);
        // mean atom number per superatom at the homogeneous density
        let n_sa = 1.2e7 * 1e-9 * v_sa;
        assert_relative_eq!(n_sa, N_SA_REF, max_relative = 1e-13);
        assert_abs_diff_eq!(n_sa, 14.7, epsilon = 0.5);
    }

    #[test]
    fn sigma_rr_limits() {
        let sys = rb_system();
        let d = DetuningPoint::for_probe(&sys, TAU * 1e5);
        assert_eq!(sigma_rr(&sys, &d, 14.7, 0.0), 0.0);
        let saturated = sigma_rr(&sys, &d, 14.7, 1e22);
        assert!(saturated > 1.0 - 1e-8 && saturated < 1.0);
    }

    #[test]
    fn sigma_rr_two_photon_resonance_reduction() {
        // On two-photon resonance: n i / (n i + |Ω_c|²)
        let sys = rb_system();
        let d = DetuningPoint::for_probe(&sys, -sys.delta_c);
        assert_eq!(d.delta_2, 0.0);
        let n_sa = 14.672132881267145;
        for i_p in [1e10, 1e12, 1e14] {
            let expect = n_sa * i_p / (n_sa * i_p + sys.omega_c_sq());
            assert_relative_eq!(sigma_rr(&sys, &d, n_sa, i_p), expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn sigma_rr_degenerate_denominator_is_zero() {
        // i_p = 0 with |Ω_c|² = Δ_p Δ₂ and Δ₂ = 0 only happens for Ω_c = 0
        let sys = AtomicSystem {
            omega_c: 0.0,
            ..rb_system()
        };
        let d = DetuningPoint::for_probe(&sys, -sys.delta_c);
        assert_eq!(sigma_rr(&sys, &d, 14.7, 0.0), 0.0);
    }

    #[test]
    fn sigma_rr_monotone_in_intensity() {
        let sys = rb_system();
        let d = DetuningPoint::for_probe(&sys, TAU * 3e5);
        let mut last = 0.0;
        for k in 0..60 {
            let i_p = 1e8 * 10f64.powf(k as f64 * 0.2);
            let p = sigma_rr(&sys, &d, 14.7, i_p);
            assert!(p > last && p < 1.0);
            last = p;
        }
    }

    #[test]
    fn sigma_rr_reduces_to_lorentzian_at_weak_drive() {
        // At Δ_p = 0 and vanishing drive the population follows a Lorentzian
        // of half-width w in the two-photon detuning.
        let sys_base = rb_system();
        let w = sys_base.eit_half_width();
        let n_sa = 14.672132881267145;
        let i_p = 1e-6 * sys_base.omega_c_sq() / n_sa;
        for k in -40..=40i32 {
            let d2 = w * k as f64 / 40.0;
            let sys = AtomicSystem {
                delta_c: d2,
                ..sys_base
            };
            let d = DetuningPoint::for_probe(&sys, 0.0);
            let exact = sigma_rr(&sys, &d, n_sa, i_p);
            let lorentzian = n_sa * i_p
                / (sys.omega_c_sq() + d2 * d2 * sys.gamma_e().powi(2) / sys.omega_c_sq());
            assert_relative_eq!(exact, lorentzian, max_relative = 0.01);
        }
    }

    #[test]
    fn alpha_tla_resonance_and_symmetry() {
        let sys = rb_system();
        let ge = sys.gamma_e();
        let on_res = alpha_tla(&sys, &DetuningPoint::for_probe(&sys, 0.0));
        assert_abs_diff_eq!(on_res.im(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(on_res.re(), 0.0, epsilon = 1e-15);
        let half = alpha_tla(&sys, &DetuningPoint::for_probe(&sys, ge));
        assert_relative_eq!(half.im(), 0.5, max_relative = 1e-14);
        // Im even, Re odd in the probe detuning
        for dp in [0.3 * ge, 1.7 * ge, 12.0 * ge] {
            let plus = alpha_tla(&sys, &DetuningPoint::for_probe(&sys, dp));
            let minus = alpha_tla(&sys, &DetuningPoint::for_probe(&sys, -dp));
            assert_relative_eq!(plus.im(), minus.im(), max_relative = 1e-14);
            assert_relative_eq!(plus.re(), -minus.re(), max_relative = 1e-14);
        }
    }

    #[test]
    fn alpha_eit_reference_value_on_two_photon_resonance() {
        let sys = rb_system();
        let d = DetuningPoint::for_probe(&sys, -sys.delta_c);
        let a = alpha_eit(&sys, &d, 0.0);
        assert_relative_eq!(a.im(), ALPHA_EIT_D20_IM, max_relative = 1e-12);
        assert_relative_eq!(a.re(), ALPHA_EIT_D20_RE, max_relative = 1e-12);
    }

    #[test]
    fn alpha_eit_ideal_dark_state_is_transparent() {
        let sys = AtomicSystem::new(3.8e7, 0.0, 0.0, 0.0, TAU * 1.4e11, TAU * 2.25e6, 0.0).unwrap();
        let d = DetuningPoint::for_probe(&sys, 0.0);
        assert_eq!(alpha_eit(&sys, &d, 0.0).value(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn alpha_eit_without_control_field_is_two_level() {
        let sys = AtomicSystem {
            omega_c: 0.0,
            ..rb_system()
        };
        for dp in [0.0, 1e6, -3e7] {
            let d = DetuningPoint::for_probe(&sys, dp);
            assert_eq!(alpha_eit(&sys, &d, 0.0), alpha_tla(&sys, &d));
        }
    }

    #[test]
    fn mean_field_shift_is_linear() {
        let sys = rb_system();
        assert_eq!(sys.mean_field_shift(0.0), 0.0);
        let full = sys.mean_field_shift(1.0);
        assert_relative_eq!(full, 1.2905389734643087e6, max_relative = 1e-13);
        assert!(full > 0.0);
        assert_relative_eq!(sys.mean_field_shift(0.5), full / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn alpha_conditional_mixes_convexly() {
        let sys = rb_system();
        let d = DetuningPoint::for_probe(&sys, TAU * 2e5);
        let at = alpha_tla(&sys, &d);
        let ae = alpha_eit(&sys, &d, 0.0);
        assert_eq!(alpha_conditional(at, ae, 0.0), ae);
        assert_eq!(alpha_conditional(at, ae, 1.0), at);
        let mid = alpha_conditional(at, ae, 0.5);
        assert_relative_eq!(mid.im(), (at.im() + ae.im()) / 2.0, max_relative = 1e-15);
        assert_relative_eq!(mid.re(), (at.re() + ae.re()) / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn branch_contrast_changes_sign_between_window_and_doublet() {
        // Conditional absorption dominates inside the transparency window;
        // around the Autler-Townes doublet the EIT branch absorbs more.
        let sys = rb_system();
        let contrast = |d2: f64| {
            let d = DetuningPoint {
                delta_p: d2,
                delta_2: d2,
            };
            alpha_tla(&sys, &d).im() - alpha_eit(&sys, &d, 0.0).im()
        };
        assert!(contrast(0.0) > 0.0);
        assert!(contrast(0.2 * sys.eit_half_width()) > 0.0);
        assert!(contrast(sys.omega_c) < 0.0);
        assert!(contrast(-sys.omega_c) < 0.0);
        // a sign change exists on the way to the doublet
        let mut saw_flip = false;
        let mut prev = contrast(0.0);
        for k in 1..=300 {
            let cur = contrast(sys.omega_c * k as f64 / 300.0);
            if prev > 0.0 && cur < 0.0 {
                saw_flip = true;
            }
            prev = cur;
        }
        assert!(saw_flip);
    }

    #[test]
    fn invalid_systems_are_rejected() {
        assert!(AtomicSystem::new(0.0, 0.0, 0.0, 0.0, 1e11, 1e6, 0.0).is_err());
        assert!(AtomicSystem::new(3.8e7, -1.0, 0.0, 0.0, 1e11, 1e6, 0.0).is_err());
        assert!(AtomicSystem::new(3.8e7, 0.0, 0.0, 0.0, -1e11, 1e6, 0.0).is_err());
        assert!(AtomicSystem::new(3.8e7, 0.0, 0.0, 0.0, 1e11, -1e6, 0.0).is_err());
        // gamma_r would exceed gamma_e
        assert!(AtomicSystem::new(3.8e7, 1e9, 0.0, 0.0, 1e11, 1e6, 0.0).is_err());
    }
}

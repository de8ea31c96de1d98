//! Parameter sweeps over probe detuning and input intensity, extraction of
//! the transparency-line observables, and the derived scalar quantities of
//! a run.

use crate::medium::{MediumError, MediumProfile, SuperatomGrid};
use crate::physics::{alpha_tla, AtomicSystem, DetuningPoint, PhysicsError};
use crate::propagation::{
    run_realizations_in_stream, FieldState, PropagationConfig, PropagationError,
};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("no transparency line found in the search window")]
    NoEitLine,
    #[error(transparent)]
    Medium(#[from] MediumError),
    #[error(transparent)]
    Physics(#[from] PhysicsError),
}

/// Grid of probe detunings and input Rabi frequencies to scan.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Probe detunings, rad/s, strictly increasing.
    pub delta_p_values: Vec<f64>,
    /// Input probe Rabi frequencies, rad/s, all > 0.
    pub omega_p_inputs: Vec<f64>,
    /// Realizations per point in stochastic mode.
    pub n_realizations: usize,
    /// Input two-photon correlation; 1 for a coherent probe.
    pub g2_input: f64,
}

impl SweepSpec {
    /// 201 detunings spanning ±15 MHz, the visible range of the canonical
    /// transmission spectra.
    pub fn default_detunings() -> Vec<f64> {
        linspace(-TAU * 15e6, TAU * 15e6, 201)
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.delta_p_values.is_empty() {
            return Err(ExperimentError::InvalidSweep("no detunings".into()));
        }
        if !self.delta_p_values.windows(2).all(|w| w[0] < w[1]) {
            return Err(ExperimentError::InvalidSweep(
                "delta_p_values must be strictly increasing".into(),
            ));
        }
        if self.omega_p_inputs.is_empty() || !self.omega_p_inputs.iter().all(|&o| o > 0.0) {
            return Err(ExperimentError::InvalidSweep(
                "omega_p_inputs must be non-empty and > 0".into(),
            ));
        }
        if self.n_realizations == 0 {
            return Err(ExperimentError::InvalidSweep(
                "n_realizations must be >= 1".into(),
            ));
        }
        if !(self.g2_input >= 0.0) {
            return Err(ExperimentError::InvalidSweep(
                "g2_input must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![start];
    }
    (0..n)
        .map(|k| start + (end - start) * k as f64 / (n - 1) as f64)
        .collect()
}

/// Outcome of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointStats {
    pub transmission: f64,
    pub transmission_stderr: f64,
    pub g2_out: f64,
    pub g2_stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub intensity_idx: usize,
    pub detuning_idx: usize,
    /// Input probe Rabi frequency, rad/s.
    pub omega_p_in: f64,
    /// Probe detuning, rad/s.
    pub delta_p: f64,
    /// Per-point failures are recorded, not fatal to the sweep.
    pub result: Result<PointStats, String>,
}

/// All sweep points, ordered by (intensity, detuning).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub points: Vec<SweepPoint>,
}

impl SpectrumResult {
    /// Transmission curve (delta_p, T) for one input intensity, skipping
    /// failed points.
    pub fn transmission_curve(&self, intensity_idx: usize) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter(|p| p.intensity_idx == intensity_idx)
            .filter_map(|p| p.result.as_ref().ok().map(|s| (p.delta_p, s.transmission)))
            .collect()
    }

    pub fn g2_curve(&self, intensity_idx: usize) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter(|p| p.intensity_idx == intensity_idx)
            .filter_map(|p| p.result.as_ref().ok().map(|s| (p.delta_p, s.g2_out)))
            .collect()
    }
}

/// Runs every (intensity, detuning) point of the sweep. Points are
/// independent; stochastic seeds derive from
/// (config seed, intensity index, detuning index, realization index), so the
/// output does not depend on scheduling order.
pub fn run_sweep(
    spec: &SweepSpec,
    sys: &AtomicSystem,
    medium: &MediumProfile,
    cfg: &PropagationConfig,
) -> Result<SpectrumResult, ExperimentError> {
    spec.validate()?;
    let grid = SuperatomGrid::build(medium, sys)?;
    let mut jobs: Vec<(usize, usize)> = Vec::new();
    for i in 0..spec.omega_p_inputs.len() {
        for k in 0..spec.delta_p_values.len() {
            jobs.push((i, k));
        }
    }
    let points: Vec<SweepPoint> = jobs
        .into_par_iter()
        .map(|(i, k)| {
            let omega_p = spec.omega_p_inputs[i];
            let delta_p = spec.delta_p_values[k];
            let d = DetuningPoint::for_probe(sys, delta_p);
            let input = FieldState::input(omega_p * omega_p, spec.g2_input);
            let result = run_realizations_in_stream(
                &input,
                &grid,
                sys,
                &d,
                cfg,
                spec.n_realizations,
                i as u64,
                k as u64,
            )
            .map(|stats| PointStats {
                transmission: stats.transmission,
                transmission_stderr: stats.transmission_stderr,
                g2_out: stats.g2_out,
                g2_stderr: stats.g2_stderr,
            })
            .map_err(|e: PropagationError| e.to_string());
            SweepPoint {
                intensity_idx: i,
                detuning_idx: k,
                omega_p_in: omega_p,
                delta_p,
                result,
            }
        })
        .collect();
    Ok(SpectrumResult { points })
}

/// Peak transmission, linewidth and peak position of the transparency line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineObservables {
    /// Peak transmission near the line center.
    pub t_max: f64,
    /// Full width at half maximum of the transmission peak measured above
    /// the two-level background, rad/s.
    pub fwhm: f64,
    /// Probe detuning at the maximum, rad/s (parabolic refinement).
    pub delta_p_max: f64,
}

/// Extracts the line observables from a transmission curve.
///
/// The peak is searched within |Δ₂| < `window` (defaults to Ω_c). The FWHM
/// is measured on the peak height above the two-level background
/// exp(−κL·Im α_TLA), since the transparency feature sits inside an
/// absorption dip; crossings are located by linear interpolation.
pub fn extract_line(
    sys: &AtomicSystem,
    optical_depth: f64,
    curve: &[(f64, f64)],
    window: Option<f64>,
) -> Result<LineObservables, ExperimentError> {
    let window = window.unwrap_or(sys.omega_c);
    if curve.len() < 3 || !(window > 0.0) {
        return Err(ExperimentError::NoEitLine);
    }
    let background = |delta_p: f64| {
        let d = DetuningPoint::for_probe(sys, delta_p);
        (-optical_depth * alpha_tla(sys, &d).im()).exp()
    };
    let height: Vec<f64> = curve.iter().map(|&(dp, t)| t - background(dp)).collect();

    let in_window: Vec<usize> = (0..curve.len())
        .filter(|&i| (curve[i].0 + sys.delta_c).abs() < window)
        .collect();
    let &peak_idx = in_window
        .iter()
        .max_by(|&&a, &&b| curve[a].1.total_cmp(&curve[b].1))
        .ok_or(ExperimentError::NoEitLine)?;
    // the feature must actually rise above the two-level background
    if height[peak_idx] <= 0.0 {
        return Err(ExperimentError::NoEitLine);
    }
    let t_max = curve[peak_idx].1;

    // parabolic refinement of the peak position over the three
    // points around the discrete maximum
    let delta_p_max = if peak_idx == 0 || peak_idx == curve.len() - 1 {
        curve[peak_idx].0
    } else {
        let (x0, y0) = curve[peak_idx - 1];
        let (x1, y1) = curve[peak_idx];
        let (x2, y2) = curve[peak_idx + 1];
        let denom = y0 - 2.0 * y1 + y2;
        if denom == 0.0 {
            x1
        } else {
            x1 + 0.25 * (y0 - y2) / denom * (x2 - x0)
        }
    };

    let half = height[peak_idx] / 2.0;
    let cross = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
        let mut prev = peak_idx;
        for i in range {
            if height[i] <= half {
                let (x0, h0) = (curve[i].0, height[i]);
                let (x1, h1) = (curve[prev].0, height[prev]);
                // linear interpolation between the bracketing samples
                return Some(x0 + (half - h0) * (x1 - x0) / (h1 - h0));
            }
            prev = i;
        }
        None
    };
    let left = cross(&mut (0..peak_idx).rev()).ok_or(ExperimentError::NoEitLine)?;
    let right = cross(&mut (peak_idx + 1..curve.len())).ok_or(ExperimentError::NoEitLine)?;
    let fwhm = right - left;
    if !(fwhm > 0.0) {
        return Err(ExperimentError::NoEitLine);
    }
    Ok(LineObservables {
        t_max,
        fwhm,
        delta_p_max,
    })
}

/// Derived scalar quantities of a run: coarse-graining scales, group
/// velocity, saturation intensity and the antibunching time window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedQuantities {
    /// Transverse relaxation rate of the optical coherence, rad/s.
    pub gamma_e: f64,
    /// Transverse relaxation rate of the two-photon coherence, rad/s.
    pub gamma_r: f64,
    /// Transparency-window half-width w = |Ω_c|²/γ_e, rad/s.
    pub eit_half_width: f64,
    /// Blockade radius, μm.
    pub r_sa_um: f64,
    /// Blockade-sphere volume, μm³.
    pub v_sa_um3: f64,
    /// Superatom number density, μm⁻³.
    pub rho_sa_um3: f64,
    /// Mean atomic density of the medium, μm⁻³.
    pub rho_mean_um3: f64,
    /// Mean atom number per superatom.
    pub n_sa_mean: f64,
    /// Mean absorption coefficient, μm⁻¹.
    pub kappa_mean_um: f64,
    /// Resonant optical depth κ̄L.
    pub optical_depth: f64,
    /// Probe group velocity in the transparency window, m/s.
    pub group_velocity_m_s: f64,
    /// Saturation intensity as a squared Rabi frequency, rad²/s².
    pub i_p_max: f64,
    /// Saturation intensity expressed as an input Rabi frequency, rad/s.
    pub omega_p_max_equiv: f64,
    /// Photon number density per unit squared Rabi frequency, μm⁻³/(rad/s)².
    pub photon_density_per_ip: f64,
    /// Photon density at the saturation intensity, μm⁻³ (equals the
    /// superatom density).
    pub photon_density_at_sat_um3: f64,
    /// Antibunching time window 2R_sa/v, s.
    pub antibunching_window_s: f64,
}

/// Computes every derived scalar for the given system and medium.
pub fn derived_quantities(
    sys: &AtomicSystem,
    medium: &MediumProfile,
) -> Result<DerivedQuantities, ExperimentError> {
    let r_sa = sys.blockade_radius()?;
    let v_sa = 4.0 * PI / 3.0 * r_sa.powi(3);
    let rho_sa = sys.superatom_density()?;
    let rho_mean = medium.mean_density();
    let kappa_mean = medium.kappa_mean();
    // group velocity v = 2|Ω_c|²/(κ̄ γ_e), converted from μm/s to m/s
    let v_group_um_s = 2.0 * sys.omega_c_sq() / (kappa_mean * sys.gamma_e());
    let i_p_max = 4.0 * rho_sa / rho_mean * sys.omega_c_sq();
    let photon_density_per_ip = rho_mean / (4.0 * sys.omega_c_sq());
    Ok(DerivedQuantities {
        gamma_e: sys.gamma_e(),
        gamma_r: sys.gamma_r(),
        eit_half_width: sys.eit_half_width(),
        r_sa_um: r_sa,
        v_sa_um3: v_sa,
        rho_sa_um3: rho_sa,
        rho_mean_um3: rho_mean,
        n_sa_mean: rho_mean * v_sa,
        kappa_mean_um: kappa_mean,
        optical_depth: medium.optical_depth,
        group_velocity_m_s: v_group_um_s * 1e-6,
        i_p_max,
        omega_p_max_equiv: i_p_max.sqrt(),
        photon_density_per_ip,
        photon_density_at_sat_um3: photon_density_per_ip * i_p_max,
        antibunching_window_s: 2.0 * r_sa / v_group_um_s,
    })
}

impl std::fmt::Display for DerivedQuantities {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mhz = |x: f64| x / (TAU * 1e6);
        writeln!(f, "gamma_e                  = {:.6e} rad/s", self.gamma_e)?;
        writeln!(f, "gamma_r                  = {:.6e} rad/s", self.gamma_r)?;
        writeln!(
            f,
            "eit_half_width           = {:.6e} rad/s ({:.4} MHz / 2pi)",
            self.eit_half_width,
            mhz(self.eit_half_width)
        )?;
        writeln!(f, "blockade_radius          = {:.4} um", self.r_sa_um)?;
        writeln!(f, "superatom_volume         = {:.4e} um^3", self.v_sa_um3)?;
        writeln!(
            f,
            "superatom_density        = {:.4e} um^-3",
            self.rho_sa_um3
        )?;
        writeln!(
            f,
            "mean_density             = {:.4e} um^-3",
            self.rho_mean_um3
        )?;
        writeln!(f, "n_sa_mean                = {:.3}", self.n_sa_mean)?;
        writeln!(
            f,
            "kappa_mean               = {:.6e} um^-1",
            self.kappa_mean_um
        )?;
        writeln!(f, "optical_depth            = {:.4}", self.optical_depth)?;
        writeln!(
            f,
            "group_velocity           = {:.4e} m/s",
            self.group_velocity_m_s
        )?;
        writeln!(
            f,
            "i_p_max                  = {:.4e} rad^2/s^2 (Omega_p/2pi = {:.4} MHz)",
            self.i_p_max,
            mhz(self.omega_p_max_equiv)
        )?;
        writeln!(
            f,
            "photon_density_per_i_p   = {:.4e} um^-3 per (rad/s)^2",
            self.photon_density_per_ip
        )?;
        writeln!(
            f,
            "photon_density_at_sat    = {:.4e} um^-3",
            self.photon_density_at_sat_um3
        )?;
        write!(
            f,
            "antibunching_window      = {:.4e} s ({:.3} ns)",
            self.antibunching_window_s,
            self.antibunching_window_s * 1e9
        )
    }
}

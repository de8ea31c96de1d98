//! Spatial integration of the coupled steady-state equations for the probe
//! intensity and its equal-position two-photon correlation across the
//! superatom chain.
//!
//! Within each cell the excitation probabilities and polarizabilities are
//! frozen at the entry values; both evolution equations are then linear in
//! their own variable and are advanced by exact exponential factors, with
//! the absorption coefficient sampled at sub-interval midpoints.
//!
//! Two modes are provided. `Stochastic` draws a binary excitation for every
//! superatom from the conditional population and averages observables over
//! independent realizations; `Continuous` propagates the probability-weighted
//! polarizability directly. Realizations use ChaCha8 streams keyed by
//! `(seed, intensity index, detuning index, realization index)` packed
//! little-endian into the 32-byte cipher key, so results are reproducible
//! across platforms and independent of scheduling.

use crate::medium::{GridCell, MediumError, SuperatomGrid};
use crate::physics::{
    alpha_conditional, alpha_eit, alpha_tla, sigma_rr, AtomicSystem, DetuningPoint,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PropagationError {
    #[error(
        "non-finite field state at z = {z} μm (i_p = {i_p}, g2 = {g2}); pathological parameters"
    )]
    NonFinite { z: f64, i_p: f64, g2: f64 },
    #[error(transparent)]
    Medium(#[from] MediumError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagationMode {
    /// Sample a binary Rydberg excitation per superatom and average over
    /// realizations.
    Stochastic,
    /// Probability-weighted polarizability; the infinite-realization limit.
    Continuous,
}

/// Which excitation probability drives the correlation decay in continuous
/// mode. The stochastic sampler draws from the photon-conditioned
/// population, so `Conditional` reproduces its many-realization mean;
/// `Unconditional` uses the plain intensity-driven population instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum G2Weight {
    Conditional,
    Unconditional,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationConfig {
    pub mode: PropagationMode,
    /// Master seed for the stochastic mode.
    pub seed: u64,
    /// Sub-intervals per superatom cell for the κ(z) sampling.
    pub substeps: u32,
    /// When false, the correlation is pinned to g² = 1 everywhere and the
    /// conditional population reduces to the unconditional one.
    pub g2_feedback: bool,
    pub g2_weight: G2Weight,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        Self {
            mode: PropagationMode::Continuous,
            seed: 0,
            substeps: 4,
            g2_feedback: true,
            g2_weight: G2Weight::Conditional,
        }
    }
}

/// Probe state at a position: squared probe Rabi frequency (rad²/s²) and the
/// equal-position two-photon correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldState {
    pub i_p: f64,
    pub g2: f64,
    pub z: f64,
}

impl FieldState {
    /// Input state at the medium entry, z = 0.
    pub fn input(i_p: f64, g2: f64) -> Self {
        debug_assert!(i_p >= 0.0 && g2 >= 0.0);
        Self { i_p, g2, z: 0.0 }
    }
}

/// Per-cell diagnostics recorded while stepping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellRecord {
    pub z_mid: f64,
    /// Conditional excitation probability used for the branch decision.
    pub p_excited: f64,
    /// Sampled binary excitation; `None` in continuous mode.
    pub sampled: Option<bool>,
    pub alpha_used: Complex64,
    /// Intensity at the cell exit.
    pub i_p: f64,
    /// Correlation at the cell exit.
    pub g2: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PropagationTrace {
    pub cells: Vec<CellRecord>,
}

/// Advances the state across the cell at `cell_index`, returning the exit
/// state and the cell diagnostics. Probabilities and polarizabilities are
/// frozen at the cell entry.
pub fn step_cell<R: Rng + ?Sized>(
    state: &FieldState,
    grid: &SuperatomGrid,
    cell_index: usize,
    sys: &AtomicSystem,
    d: &DetuningPoint,
    cfg: &PropagationConfig,
    rng: &mut R,
) -> Result<(FieldState, CellRecord), PropagationError> {
    let cell: &GridCell = &grid.cells[cell_index];
    debug_assert!((state.z - cell.z_start).abs() <= 1e-9 * grid.profile().length.max(1.0));

    let g2_drive = if cfg.g2_feedback { state.g2 } else { 1.0 };
    let p_uncond = sigma_rr(sys, d, cell.n_sa, state.i_p);
    let p_cond = sigma_rr(sys, d, cell.n_sa, state.i_p * g2_drive);
    let shift = sys.mean_field_shift(p_uncond);
    let a_tla = alpha_tla(sys, d);
    let a_eit = alpha_eit(sys, d, shift);
    let contrast = a_tla.im() - a_eit.im();

    let (alpha_eff, g2_weight, sampled) = match cfg.mode {
        PropagationMode::Stochastic => {
            let excited = rng.random::<f64>() < p_cond;
            let alpha = if excited { a_tla } else { a_eit };
            (alpha, excited as u8 as f64, Some(excited))
        }
        PropagationMode::Continuous => {
            let weight = match cfg.g2_weight {
                G2Weight::Conditional => p_cond,
                G2Weight::Unconditional => p_uncond,
            };
            (alpha_conditional(a_tla, a_eit, p_cond), weight, None)
        }
    };

    let mut i_p = state.i_p;
    let mut g2 = state.g2;
    let n_sub = cfg.substeps.max(1);
    let dz = cell.width() / n_sub as f64;
    for k in 0..n_sub {
        let z_sub = cell.z_start + (k as f64 + 0.5) * dz;
        let kappa = grid.kappa_at(z_sub)?;
        i_p *= (-kappa * alpha_eff.im() * dz).exp();
        if cfg.g2_feedback {
            g2 *= (-kappa * g2_weight * contrast * dz).exp();
        }
    }

    let next = FieldState {
        i_p,
        g2,
        z: cell.z_end,
    };
    if !next.i_p.is_finite() || !next.g2.is_finite() {
        return Err(PropagationError::NonFinite {
            z: next.z,
            i_p: next.i_p,
            g2: next.g2,
        });
    }
    let record = CellRecord {
        z_mid: cell.z_mid(),
        p_excited: p_cond,
        sampled,
        alpha_used: alpha_eff.value(),
        i_p,
        g2,
    };
    Ok((next, record))
}

/// Folds `step_cell` over the whole chain. `input.z` must be 0.
pub fn propagate<R: Rng + ?Sized>(
    input: &FieldState,
    grid: &SuperatomGrid,
    sys: &AtomicSystem,
    d: &DetuningPoint,
    cfg: &PropagationConfig,
    rng: &mut R,
) -> Result<(FieldState, PropagationTrace), PropagationError> {
    assert_eq!(input.z, 0.0, "propagation starts at the medium entry");
    let mut state = *input;
    let mut trace = PropagationTrace {
        cells: Vec::with_capacity(grid.cells.len()),
    };
    for index in 0..grid.cells.len() {
        let (next, record) = step_cell(&state, grid, index, sys, d, cfg, rng)?;
        trace.cells.push(record);
        state = next;
    }
    Ok((state, trace))
}

/// Mean and standard error of transmission and exit correlation over
/// independent realizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealizationStats {
    pub transmission: f64,
    pub transmission_stderr: f64,
    pub g2_out: f64,
    pub g2_stderr: f64,
    pub n_realizations: usize,
}

/// Deterministic per-realization generator: the 32-byte ChaCha8 key is the
/// little-endian concatenation of the master seed and the three stream
/// indices.
pub fn realization_rng(
    seed: u64,
    intensity_idx: u64,
    detuning_idx: u64,
    realization_idx: u64,
) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&intensity_idx.to_le_bytes());
    key[16..24].copy_from_slice(&detuning_idx.to_le_bytes());
    key[24..32].copy_from_slice(&realization_idx.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Sample mean and standard error of the mean.
fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// `run_realizations` with explicit stream indices, used by sweeps so that
/// every (intensity, detuning) point owns an independent set of streams.
#[allow(clippy::too_many_arguments)]
pub fn run_realizations_in_stream(
    input: &FieldState,
    grid: &SuperatomGrid,
    sys: &AtomicSystem,
    d: &DetuningPoint,
    cfg: &PropagationConfig,
    n_real: usize,
    intensity_idx: u64,
    detuning_idx: u64,
) -> Result<RealizationStats, PropagationError> {
    assert!(n_real >= 1);
    let runs = match cfg.mode {
        // every continuous realization is identical; run once
        PropagationMode::Continuous => 1,
        PropagationMode::Stochastic => n_real,
    };
    let exits: Vec<(f64, f64)> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let mut rng = realization_rng(cfg.seed, intensity_idx, detuning_idx, r as u64);
            propagate(input, grid, sys, d, cfg, &mut rng)
                .map(|(state, _)| (state.i_p / input.i_p, state.g2))
        })
        .collect::<Result<_, _>>()?;

    let ts: Vec<f64> = exits.iter().map(|x| x.0).collect();
    let gs: Vec<f64> = exits.iter().map(|x| x.1).collect();
    let (transmission, transmission_stderr) = mean_and_stderr(&ts);
    let (g2_out, g2_stderr) = mean_and_stderr(&gs);
    Ok(RealizationStats {
        transmission,
        transmission_stderr,
        g2_out,
        g2_stderr,
        n_realizations: runs,
    })
}

/// Averaged transmission and exit correlation over `n_real` independent
/// realizations. Continuous mode ignores `n_real` beyond requiring ≥ 1.
pub fn run_realizations(
    input: &FieldState,
    grid: &SuperatomGrid,
    sys: &AtomicSystem,
    d: &DetuningPoint,
    cfg: &PropagationConfig,
    n_real: usize,
) -> Result<RealizationStats, PropagationError> {
    run_realizations_in_stream(input, grid, sys, d, cfg, n_real, 0, 0)
}

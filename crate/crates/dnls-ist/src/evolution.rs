//! Time evolution in the spectral domain and the end-to-end transform
//! pipeline.
//!
//! The flow acts on reflection data as an exact multiplier: each coefficient
//! picks up the phase `e^{4iz²t}` while its modulus — and hence every
//! admissibility constant — is frozen. Evolving is therefore trivial; all the
//! numerical work lives in the direct and inverse transforms at the two ends.
//!
//! The phase oscillates faster as `|z|` grows, so a fixed spectral grid
//! undersamples it beyond some horizon. Two diagnostics quantify this:
//! a literal worst-case check at the grid edge (`8·Z·t·dz` versus `π`) and an
//! effective-support variant that replaces `Z` with the largest `|z|` where
//! the reflection data is non-negligible. Both produce warnings, not errors:
//! the reconstruction integrand is weighted by `|r|`, which has usually
//! decayed to round-off long before the edge.

use crate::cauchy::CauchyOps;
use crate::direct_scattering::{
    scattering_coefficients, spectral_health, SpectralHealthReport,
};
use crate::error::{Error, Result};
use crate::grids::{SampledPotential, SpectralGrid};
use crate::rh_inverse::{
    reconstruct, validate_reflection, ReconstructOptions, ReconstructedPotential, ReflectionPair,
    ReflectionTolerances,
};
use crate::{tol, C64, I};

/// Reflection data pushed forward to a fixed time.
#[derive(Debug, Clone)]
pub struct EvolvedReflection {
    /// Time the data corresponds to.
    pub time: f64,
    /// The evolved pair; `c0_sq` is inherited unchanged because the flow
    /// preserves `conj(r₊)·r₋` node-wise.
    pub pair: ReflectionPair,
}

/// Apply the exact spectral flow `r±(t; z) = r±(0; z)·e^{4iz²t}`.
pub fn evolve_scattering(r: &ReflectionPair, t: f64) -> EvolvedReflection {
    let phase = |z: f64| (4.0 * I * z * z * t).exp();
    let r_plus: Vec<C64> = r
        .grid
        .nodes()
        .iter()
        .zip(&r.r_plus)
        .map(|(&z, v)| v * phase(z))
        .collect();
    let r_minus: Vec<C64> = r
        .grid
        .nodes()
        .iter()
        .zip(&r.r_minus)
        .map(|(&z, v)| v * phase(z))
        .collect();
    EvolvedReflection {
        time: t,
        pair: ReflectionPair {
            grid: r.grid,
            r_plus,
            r_minus,
            c0_sq: r.c0_sq,
        },
    }
}

/// Resolution diagnostics for the evolved phase `e^{4iz²t}` on a given grid.
#[derive(Debug, Clone)]
pub struct PhaseResolutionReport {
    /// Evolution time the report refers to.
    pub time: f64,
    /// Worst-case per-node phase increment at the grid edge, `8·Z·|t|·dz`.
    pub edge_increment: f64,
    /// Same increment evaluated at the effective support radius of `|r₊|`.
    pub effective_increment: f64,
    /// Largest `|z|` where `|r₊|` exceeds its relative floor.
    pub effective_half_width: f64,
    /// Threshold the increments are compared against (`π·safety`).
    pub threshold: f64,
    /// Human-readable warnings (empty when both increments resolve).
    pub warnings: Vec<String>,
}

impl PhaseResolutionReport {
    /// True when the phase is resolved over the effective support of the
    /// data (the operationally meaningful condition).
    pub fn effectively_resolved(&self) -> bool {
        self.effective_increment < self.threshold
    }
}

/// Check how well a grid samples the time-`t` phase for the given data.
///
/// `safety` scales the π threshold (1.0 = literal Nyquist).
pub fn phase_resolution(r: &ReflectionPair, t: f64, safety: f64) -> PhaseResolutionReport {
    let grid = &r.grid;
    let dz = grid.dz();
    let edge_increment = 8.0 * grid.half_width * t.abs() * dz;
    let peak = r.r_plus.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    let floor = peak * tol::EFFECTIVE_SUPPORT_REL_FLOOR;
    let mut z_eff: f64 = 0.0;
    for (j, v) in r.r_plus.iter().enumerate() {
        if v.norm() > floor {
            z_eff = z_eff.max(grid.node(j).abs());
        }
    }
    let effective_increment = 8.0 * z_eff * t.abs() * dz;
    let threshold = std::f64::consts::PI * safety;
    let mut warnings = Vec::new();
    if edge_increment >= threshold {
        warnings.push(format!(
            "edge phase increment {edge_increment:.3} ≥ {threshold:.3}: \
             the flow phase is undersampled at the outermost grid nodes"
        ));
    }
    if effective_increment >= threshold {
        warnings.push(format!(
            "phase increment {effective_increment:.3} ≥ {threshold:.3} at the data's \
             effective support |z| ≤ {z_eff:.2}: evolved reflection data is \
             unresolved where it is non-negligible; refine the spectral grid"
        ));
    }
    PhaseResolutionReport {
        time: t,
        edge_increment,
        effective_increment,
        effective_half_width: z_eff,
        threshold,
        warnings,
    }
}

/// Controls for the end-to-end transform pipeline.
#[derive(Debug, Clone)]
pub struct PipelineOptions {
    /// Floor on `min |a|` along the real line (spectral resonance guard).
    pub a_floor: f64,
    /// Rectangle height for the winding count; `None` uses the grid width.
    pub winding_height: Option<f64>,
    /// Zero-padding factor for the singular-integral operators.
    pub pad_factor: usize,
    /// Nyquist safety factor for phase-resolution reports.
    pub nyquist_safety: f64,
    /// Inverse-transform controls.
    pub reconstruct: ReconstructOptions,
    /// Tolerances applied when the forward output is validated as inverse
    /// input.
    pub reflection_tols: ReflectionTolerances,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            a_floor: tol::A_FLOOR_DEFAULT,
            winding_height: None,
            pad_factor: tol::PAD_FACTOR_DEFAULT,
            nyquist_safety: tol::NYQUIST_SAFETY_DEFAULT,
            reconstruct: ReconstructOptions::default(),
            reflection_tols: ReflectionTolerances::default(),
        }
    }
}

/// One reconstructed snapshot of the flow.
#[derive(Debug, Clone)]
pub struct FlowSnapshot {
    /// Snapshot time.
    pub time: f64,
    /// Reconstructed potential at that time.
    pub potential: ReconstructedPotential,
    /// Phase-resolution diagnostics for the evolved data.
    pub resolution: PhaseResolutionReport,
}

/// Output of [`ist_propagate`].
#[derive(Debug)]
pub struct FlowOutput {
    /// Forward-transform health certificate for the initial datum.
    pub health: SpectralHealthReport,
    /// The time-zero reflection pair (validated).
    pub initial_reflection: ReflectionPair,
    /// Limit of the transmission coefficient (phase diagnostic).
    pub a_inf: C64,
    /// One snapshot per requested time, in input order.
    pub snapshots: Vec<FlowSnapshot>,
}

/// Propagate an initial potential to each requested time through the full
/// transform pipeline: direct scattering → health gate → exact spectral flow
/// → RH reconstruction.
///
/// Fails with [`Error::EigenvalueDetected`] when the winding count reports
/// upper-half-plane zeros of the transmission denominator (the reflection
/// data alone no longer determines the flow), and with
/// [`Error::ResonanceDetected`] when `|a|` dips below the floor on the real
/// line.
pub fn ist_propagate(
    u0: &SampledPotential,
    zgrid: &SpectralGrid,
    times: &[f64],
    opts: &PipelineOptions,
) -> Result<FlowOutput> {
    let data = scattering_coefficients(u0, zgrid, opts.a_floor)?;
    let health = spectral_health(u0, &data, opts.winding_height)?;
    if health.winding_number_upper_half > 0 {
        return Err(Error::EigenvalueDetected {
            winding: health.winding_number_upper_half,
        });
    }
    let initial = validate_reflection(
        zgrid,
        data.r_plus.clone(),
        data.r_minus.clone(),
        &opts.reflection_tols,
    )?;
    let ops = CauchyOps::new(zgrid, opts.pad_factor)?;
    let mut snapshots = Vec::with_capacity(times.len());
    for &t in times {
        let evolved = evolve_scattering(&initial, t);
        let resolution = phase_resolution(&evolved.pair, t, opts.nyquist_safety);
        let potential = reconstruct(&evolved.pair, &u0.grid, &ops, &opts.reconstruct)?;
        snapshots.push(FlowSnapshot {
            time: t,
            potential,
            resolution,
        });
    }
    Ok(FlowOutput {
        health,
        initial_reflection: initial,
        a_inf: data.a_inf,
        snapshots,
    })
}

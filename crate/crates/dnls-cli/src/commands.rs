//! Command implementations: forward, inverse, evolve, roundtrip, compare,
//! validate.
//!
//! Every command reads one JSON configuration, writes diffable CSV/JSON
//! artifacts into the output directory, prints a one-line summary per result,
//! and reports failures through typed errors that the binary maps onto exit
//! codes (2 = validation, 3 = solver, 4 = hypothesis violation).

use crate::config::RunConfig;
use crate::io;
use anyhow::Context;
use dnls_ist::cauchy::CauchyOps;
use dnls_ist::direct_scattering::{
    scattering_coefficients, small_norm_criterion, spectral_health, ScatteringData,
};
use dnls_ist::evolution::{evolve_scattering, ist_propagate, phase_resolution, PipelineOptions};
use dnls_ist::grids::SpectralGrid;
use dnls_ist::pde_reference::{conserved_quantities, step_dnls, PdeState, StepOptions};
use dnls_ist::rh_inverse::{
    delta_factor, phase_consistency_defect, reconstruct, validate_reflection, ReconstructOptions,
    ReflectionPair, ReflectionTolerances, RhSolverOptions,
};
use dnls_ist::{fourier, C64};
use serde::Serialize;
use std::fmt;
use std::path::Path;

/// A configured tolerance was exceeded; maps to exit code 2.
#[derive(Debug)]
pub struct GateFailure(pub String);

impl fmt::Display for GateFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for GateFailure {}

fn gate_err(msg: String) -> anyhow::Error {
    anyhow::Error::new(GateFailure(msg))
}

fn ensure_out(out: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(out)
        .with_context(|| format!("cannot create output directory {}", out.display()))
}

fn rel_l2(a: &[C64], b: &[C64], dx: f64) -> f64 {
    let num: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        * dx;
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum::<f64>() * dx;
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

fn solver_options(cfg: &RunConfig) -> RhSolverOptions {
    RhSolverOptions {
        gmres_tol: cfg.tolerances.solver,
        ..RhSolverOptions::default()
    }
}

fn reconstruct_options(cfg: &RunConfig) -> ReconstructOptions {
    ReconstructOptions {
        overlap_half_width: cfg.engine.overlap_half_width,
        solver: solver_options(cfg),
    }
}

fn reflection_tols(cfg: &RunConfig) -> ReflectionTolerances {
    ReflectionTolerances {
        relation_tol: cfg.tolerances.reflection_relation,
        edge_floor: cfg.tolerances.reflection_edge_floor,
    }
}

fn pipeline_options(cfg: &RunConfig) -> PipelineOptions {
    PipelineOptions {
        a_floor: cfg.tolerances.a_floor,
        winding_height: cfg.engine.winding_height,
        pad_factor: cfg.engine.pad_factor,
        nyquist_safety: cfg.engine.nyquist_safety,
        reconstruct: reconstruct_options(cfg),
        reflection_tols: reflection_tols(cfg),
    }
}

fn step_options(cfg: &RunConfig) -> StepOptions {
    StepOptions {
        dt: cfg.engine.pde_dt,
        cfl: cfg.engine.pde_cfl,
    }
}

/// Wronskian unitarity defect in the reflection form
/// `sup | |a|²·(1 + Re(conj(r₊)·r₋)) − 1 |` (works for file data too).
fn unitarity_defect(a: &[C64], r_plus: &[C64], r_minus: &[C64]) -> f64 {
    a.iter()
        .zip(r_plus.iter().zip(r_minus))
        .map(|(av, (rp, rm))| (av.norm_sqr() * (1.0 + (rp.conj() * rm).re) - 1.0).abs())
        .fold(0.0, f64::max)
}

fn parity_defect(grid: &SpectralGrid, r_plus: &[C64], r_minus: &[C64]) -> f64 {
    grid.nodes()
        .iter()
        .zip(r_plus.iter().zip(r_minus))
        .map(|(&z, (rp, rm))| (rm - 4.0 * z * rp).norm())
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// forward
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ForwardReport {
    unitarity_defect: f64,
    unitarity_gate: f64,
    parity_defect: f64,
    min_abs_a_real_line: f64,
    a_floor: f64,
    winding_number_upper_half: i64,
    small_norm_lhs: f64,
    small_norm_satisfied: bool,
    c0_sq: f64,
    a_inf: [f64; 2],
    mass: f64,
    pass: bool,
}

pub fn cmd_forward(cfg: &RunConfig, out: &Path) -> anyhow::Result<()> {
    ensure_out(out)?;
    let (xg, zg) = cfg.make_grids()?;
    let u = cfg.sample_potential(&xg)?;
    let data = scattering_coefficients(&u, &zg, cfg.tolerances.a_floor)?;
    let health = spectral_health(&u, &data, cfg.engine.winding_height)?;
    let small = small_norm_criterion(&u);
    let unitarity = unitarity_defect(&data.a, &data.r_plus, &data.r_minus);
    let parity = parity_defect(&zg, &data.r_plus, &data.r_minus);
    let mass = u.integrate_real(&u.abs2());
    let pass = unitarity < cfg.tolerances.unitarity && health.winding_number_upper_half == 0;
    let report = ForwardReport {
        unitarity_defect: unitarity,
        unitarity_gate: cfg.tolerances.unitarity,
        parity_defect: parity,
        min_abs_a_real_line: health.min_abs_a_real_line,
        a_floor: cfg.tolerances.a_floor,
        winding_number_upper_half: health.winding_number_upper_half,
        small_norm_lhs: small.lhs,
        small_norm_satisfied: small.satisfied,
        c0_sq: data.c0_sq,
        a_inf: [data.a_inf.re, data.a_inf.im],
        mass,
        pass,
    };
    io::write_scattering_csv(
        &out.join("scattering.csv"),
        &zg,
        &data.a,
        &data.r_plus,
        &data.r_minus,
    )?;
    io::write_json(&out.join("forward_report.json"), &report)?;
    println!(
        "forward: unitarity {unitarity:.3e} (gate {:.1e}), winding {}, min|a| {:.3e}, c0_sq {:.6}",
        cfg.tolerances.unitarity, health.winding_number_upper_half, health.min_abs_a_real_line,
        data.c0_sq
    );
    if health.winding_number_upper_half > 0 {
        return Err(dnls_ist::Error::EigenvalueDetected {
            winding: health.winding_number_upper_half,
        }
        .into());
    }
    if unitarity >= cfg.tolerances.unitarity {
        return Err(gate_err(format!(
            "unitarity defect {unitarity:.3e} exceeds gate {:.3e}",
            cfg.tolerances.unitarity
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// inverse
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct InverseReport {
    c0_sq: f64,
    gluing_defect: f64,
    gluing_gate: f64,
    pass: bool,
}

pub fn cmd_inverse(cfg: &RunConfig, scattering: &Path, out: &Path) -> anyhow::Result<()> {
    ensure_out(out)?;
    let (xg, zg) = cfg.make_grids()?;
    let file = io::read_scattering_csv(scattering, &zg)?;
    let pair = validate_reflection(&zg, file.r_plus, file.r_minus, &reflection_tols(cfg))?;
    let ops = CauchyOps::new(&zg, cfg.engine.pad_factor)?;
    let rec = reconstruct(&pair, &xg, &ops, &reconstruct_options(cfg))?;
    let pass = rec.gluing_defect < cfg.tolerances.gluing;
    let report = InverseReport {
        c0_sq: pair.c0_sq,
        gluing_defect: rec.gluing_defect,
        gluing_gate: cfg.tolerances.gluing,
        pass,
    };
    io::write_potential_csv(&out.join("potential_rec.csv"), &xg, &rec.values)?;
    io::write_json(&out.join("inverse_report.json"), &report)?;
    println!(
        "inverse: gluing defect {:.3e} (gate {:.1e}), c0_sq {:.6}",
        rec.gluing_defect, cfg.tolerances.gluing, pair.c0_sq
    );
    if !pass {
        return Err(gate_err(format!(
            "gluing defect {:.3e} exceeds gate {:.3e}",
            rec.gluing_defect, cfg.tolerances.gluing
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// evolve
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SnapshotReport {
    index: usize,
    time: f64,
    file: String,
    gluing_defect: f64,
    phase_consistency_defect: f64,
    resolution_warnings: Vec<String>,
    /// Only present with `--compare` at nonnegative times.
    #[serde(skip_serializing_if = "Option::is_none")]
    cross_solver_rel_l2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conserved_ist_rel_drift: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    conserved_pde_rel_drift: Option<[f64; 3]>,
}

#[derive(Serialize)]
struct EvolveReport {
    winding_number_upper_half: i64,
    min_abs_a_real_line: f64,
    c0_sq: f64,
    conserved_initial: [f64; 3],
    cross_solver_gate: f64,
    snapshots: Vec<SnapshotReport>,
    pass: bool,
}

pub fn cmd_evolve(cfg: &RunConfig, out: &Path, compare: bool) -> anyhow::Result<()> {
    ensure_out(out)?;
    let (xg, zg) = cfg.make_grids()?;
    let u0 = cfg.sample_potential(&xg)?;
    let flow = ist_propagate(&u0, &zg, &cfg.times, &pipeline_options(cfg))?;
    let conserved0 = conserved_quantities(&xg, &u0.values)?;

    // Reference-solver states are stepped incrementally through the sorted
    // nonnegative times.
    let mut pde_results: Vec<Option<Vec<C64>>> = vec![None; cfg.times.len()];
    if compare {
        let mut order: Vec<usize> = (0..cfg.times.len())
            .filter(|&j| cfg.times[j] >= 0.0)
            .collect();
        order.sort_by(|&i, &j| cfg.times[i].partial_cmp(&cfg.times[j]).unwrap());
        let mut state = PdeState::new(&u0);
        for j in order {
            state = step_dnls(&state, cfg.times[j], &step_options(cfg))?;
            pde_results[j] = Some(state.values.clone());
        }
    }

    let mut snapshots = Vec::new();
    let mut pass = true;
    for (j, snap) in flow.snapshots.iter().enumerate() {
        let file = format!("state_{j:03}.csv");
        io::write_potential_csv(&out.join(&file), &xg, &snap.potential.values)?;
        let mass = snap
            .potential
            .values
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            * xg.dx();
        let mut cross = None;
        let mut drift_ist = None;
        let mut drift_pde = None;
        if let Some(pde) = &pde_results[j] {
            let err = rel_l2(&snap.potential.values, pde, xg.dx());
            if err >= cfg.tolerances.cross_solver {
                pass = false;
            }
            let rel = |after: [f64; 3]| {
                let mut d = [0.0f64; 3];
                for k in 0..3 {
                    d[k] = (after[k] - conserved0[k]).abs() / conserved0[k].abs().max(1e-30);
                }
                d
            };
            drift_ist = Some(rel(conserved_quantities(&xg, &snap.potential.values)?));
            drift_pde = Some(rel(conserved_quantities(&xg, pde)?));
            cross = Some(err);
        }
        for w in &snap.resolution.warnings {
            eprintln!("warning: t = {}: {w}", snap.time);
        }
        snapshots.push(SnapshotReport {
            index: j,
            time: snap.time,
            file,
            gluing_defect: snap.potential.gluing_defect,
            phase_consistency_defect: phase_consistency_defect(mass, flow.a_inf),
            resolution_warnings: snap.resolution.warnings.clone(),
            cross_solver_rel_l2: cross,
            conserved_ist_rel_drift: drift_ist,
            conserved_pde_rel_drift: drift_pde,
        });
    }
    let report = EvolveReport {
        winding_number_upper_half: flow.health.winding_number_upper_half,
        min_abs_a_real_line: flow.health.min_abs_a_real_line,
        c0_sq: flow.initial_reflection.c0_sq,
        conserved_initial: conserved0,
        cross_solver_gate: cfg.tolerances.cross_solver,
        snapshots,
        pass,
    };
    io::write_json(&out.join("evolve_report.json"), &report)?;
    for s in &report.snapshots {
        match s.cross_solver_rel_l2 {
            Some(err) => println!(
                "evolve t = {}: gluing {:.3e}, cross-solver rel L² {err:.3e} (gate {:.1e})",
                s.time, s.gluing_defect, cfg.tolerances.cross_solver
            ),
            None => println!("evolve t = {}: gluing {:.3e}", s.time, s.gluing_defect),
        }
    }
    if !pass {
        return Err(gate_err(format!(
            "cross-solver error exceeds gate {:.3e}",
            cfg.tolerances.cross_solver
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// roundtrip
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct RoundtripReport {
    rel_l2_error: f64,
    roundtrip_gate: f64,
    gluing_defect: f64,
    gluing_gate: f64,
    phase_consistency_defect: f64,
    parity_defect: f64,
    c0_sq: f64,
    pass: bool,
}

pub fn cmd_roundtrip(cfg: &RunConfig, out: &Path) -> anyhow::Result<()> {
    ensure_out(out)?;
    let (xg, zg) = cfg.make_grids()?;
    let u0 = cfg.sample_potential(&xg)?;
    let flow = ist_propagate(&u0, &zg, &[0.0], &pipeline_options(cfg))?;
    let rec = &flow.snapshots[0].potential;
    let err = rel_l2(&rec.values, &u0.values, xg.dx());
    let mass = rec.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * xg.dx();
    let parity = parity_defect(
        &zg,
        &flow.initial_reflection.r_plus,
        &flow.initial_reflection.r_minus,
    );
    let pass = err < cfg.tolerances.roundtrip && rec.gluing_defect < cfg.tolerances.gluing;
    let report = RoundtripReport {
        rel_l2_error: err,
        roundtrip_gate: cfg.tolerances.roundtrip,
        gluing_defect: rec.gluing_defect,
        gluing_gate: cfg.tolerances.gluing,
        phase_consistency_defect: phase_consistency_defect(mass, flow.a_inf),
        parity_defect: parity,
        c0_sq: flow.initial_reflection.c0_sq,
        pass,
    };
    io::write_potential_csv(&out.join("potential_in.csv"), &xg, &u0.values)?;
    io::write_potential_csv(&out.join("potential_rec.csv"), &xg, &rec.values)?;
    io::write_json(&out.join("roundtrip_report.json"), &report)?;
    println!(
        "roundtrip: rel L² {err:.3e} (gate {:.1e}), gluing {:.3e} (gate {:.1e})",
        cfg.tolerances.roundtrip, rec.gluing_defect, cfg.tolerances.gluing
    );
    if !pass {
        return Err(gate_err(format!(
            "roundtrip error {err:.3e} / gluing {:.3e} exceed gates ({:.1e}, {:.1e})",
            rec.gluing_defect, cfg.tolerances.roundtrip, cfg.tolerances.gluing
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CompareReport {
    rel_l2: f64,
    sup_difference: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    gate: Option<f64>,
    pass: bool,
}

pub fn cmd_compare(
    cfg: &RunConfig,
    a_path: &Path,
    b_path: &Path,
    tol: Option<f64>,
    out: Option<&Path>,
) -> anyhow::Result<()> {
    let (xg, _) = cfg.make_grids()?;
    let a = io::read_potential_csv(a_path, &xg)?;
    let b = io::read_potential_csv(b_path, &xg)?;
    let rel = rel_l2(&a, &b, xg.dx());
    let sup = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    let pass = tol.map_or(true, |t| rel < t);
    let report = CompareReport {
        rel_l2: rel,
        sup_difference: sup,
        gate: tol,
        pass,
    };
    if let Some(out) = out {
        ensure_out(out)?;
        io::write_json(&out.join("compare_report.json"), &report)?;
    }
    println!("compare: rel L² {rel:.6e}, sup {sup:.6e}");
    if !pass {
        return Err(gate_err(format!(
            "difference {rel:.3e} exceeds gate {:.3e}",
            tol.unwrap()
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SuiteResult {
    name: String,
    measured: f64,
    gate: f64,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
}

impl SuiteResult {
    fn new(name: &str, measured: f64, gate: f64) -> Self {
        SuiteResult {
            name: name.into(),
            measured,
            gate,
            pass: measured < gate,
            note: None,
        }
    }

    fn with_note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }

    fn skipped(name: &str, note: String) -> Self {
        SuiteResult {
            name: name.into(),
            measured: 0.0,
            gate: f64::INFINITY,
            pass: true,
            note: Some(note),
        }
    }
}

#[derive(Serialize)]
struct ValidateReport {
    suites: Vec<SuiteResult>,
    pass: bool,
}

fn sup_abs(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Gate model for window-truncated Lorentzian closed forms: the interior
/// defect scales like `1/Z²` (truncated-tail principal value) plus the
/// analyticity-strip discretization term `e^{−2π/dz}` (poles at distance 1).
fn lorentzian_gate(zg: &SpectralGrid) -> f64 {
    let z = zg.half_width;
    let dz = zg.dz();
    (1.0 / (z * z)).max(10.0 * (-2.0 * std::f64::consts::PI / dz).exp()).max(1e-8)
}

pub fn cmd_validate(cfg: &RunConfig, scattering: Option<&Path>, out: &Path) -> anyhow::Result<()> {
    ensure_out(out)?;
    let (xg, zg) = cfg.make_grids()?;
    let mut suites: Vec<SuiteResult> = Vec::new();

    // --- Projection algebra: P⁺ − P⁻ = I, to round-off, structurally. ---
    let ops = CauchyOps::new(&zg, cfg.engine.pad_factor)?;
    {
        let f: Vec<C64> = zg
            .nodes()
            .iter()
            .map(|&z| C64::new((0.3 * z).sin() + 0.2, (0.7 * z).cos()))
            .collect();
        let plus = ops.plemelj_plus(&f);
        let minus = ops.plemelj_minus(&f);
        let defect = f
            .iter()
            .enumerate()
            .map(|(j, v)| (plus[j] - minus[j] - v).norm())
            .fold(0.0, f64::max);
        suites.push(SuiteResult::new("projection_identity", defect, 1e-12));
    }

    // --- Hilbert isometry on a grid-scaled analytic packet. ---
    {
        let dz = zg.dz();
        let k0 = (std::f64::consts::PI / (4.0 * dz)).min(10.0);
        let width = zg.half_width / 4.0;
        let f: Vec<C64> = zg
            .nodes()
            .iter()
            .map(|&z| C64::new(0.0, k0 * z).exp() * (-z * z / (2.0 * width * width)).exp())
            .collect();
        // The operator zeroes the padded k = 0 and Nyquist bins; the energy
        // the packet carries there bounds the unavoidable isometry defect
        // and widens the gate on coarse grids (documented relaxation).
        let m = zg.point_count * cfg.engine.pad_factor;
        let mut buf = vec![C64::new(0.0, 0.0); m];
        let lo = (m - zg.point_count) / 2;
        buf[lo..lo + zg.point_count].copy_from_slice(&f);
        fourier::fft_in_place(&mut buf);
        let total: f64 = buf.iter().map(|v| v.norm_sqr()).sum();
        let lost = (buf[0].norm_sqr() + buf[m / 2].norm_sqr()) / total.max(1e-300);
        let h = ops.hilbert(&f);
        let nf = f.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let nh = h.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let defect = (nh - nf).abs() / nf.max(1e-300);
        let gate = (10.0 * lost.sqrt()).max(1e-6);
        suites.push(
            SuiteResult::new("hilbert_isometry", defect, gate).with_note(format!(
                "gate includes unresolved-mode energy fraction {lost:.3e} of the test packet"
            )),
        );
    }

    // --- Lorentzian closed forms at the window-truncation accuracy. ---
    {
        let f: Vec<C64> = zg
            .nodes()
            .iter()
            .map(|&z| C64::new(1.0 / (1.0 + z * z), 0.0))
            .collect();
        let h = ops.hilbert(&f);
        let half = zg.half_width / 2.0;
        let mut defect = 0.0f64;
        for (j, &z) in zg.nodes().iter().enumerate() {
            if z.abs() <= half {
                defect = defect.max((h[j] - C64::new(-z / (1.0 + z * z), 0.0)).norm());
            }
        }
        let gate = lorentzian_gate(&zg);
        suites.push(SuiteResult::new("lorentzian_closed_form", defect, gate).with_note(
            format!(
                "window-truncation-limited gate over |z| ≤ {half}; Z = {}",
                zg.half_width
            ),
        ));
    }

    // --- Scattering data: either from file or generated from the config.
    // The admissibility checks (reality, c0_sq > 0, the linear relation) are
    // resolution-independent and enforced here; edge decay is measured as
    // its own suite below with a resolution-aware gate, so coarse grids can
    // still run the algebraic suites.
    let u = cfg.sample_potential(&xg)?;
    let open_tols = ReflectionTolerances {
        relation_tol: cfg.tolerances.reflection_relation,
        edge_floor: f64::MAX,
    };
    let (a_col, pair): (Vec<C64>, ReflectionPair) = match scattering {
        Some(path) => {
            let file = io::read_scattering_csv(path, &zg)?;
            let pair = validate_reflection(&zg, file.r_plus, file.r_minus, &open_tols)?;
            (file.a, pair)
        }
        None => {
            let data: ScatteringData =
                scattering_coefficients(&u, &zg, cfg.tolerances.a_floor)?;
            let pair = validate_reflection(
                &zg,
                data.r_plus.clone(),
                data.r_minus.clone(),
                &open_tols,
            )?;
            (data.a, pair)
        }
    };

    // --- Reflection edge decay with a truncation-noise model: the marcher
    // leaves O(h⁴) noise in the coefficients, so the configured floor is
    // relaxed by (h/h_ref)⁴ on grids coarser than the reference spacing
    // h_ref = 40/1024 (documented relaxation for coarse-grid runs). ---
    {
        let edge = |v: &[C64]| v[0].norm().max(v[v.len() - 1].norm());
        let measured = edge(&pair.r_plus).max(edge(&pair.r_minus));
        let h_ref = 40.0 / 1024.0;
        let relax = (xg.dx() / h_ref).powi(4).max(1.0);
        let gate = cfg.tolerances.reflection_edge_floor * relax;
        suites.push(
            SuiteResult::new("reflection_edge_decay", measured, gate).with_note(format!(
                "gate = configured floor × max(1, (h/h_ref)⁴) with relaxation {relax:.1}"
            )),
        );
    }

    // --- Wronskian unitarity + parity. ---
    suites.push(SuiteResult::new(
        "unitarity",
        unitarity_defect(&a_col, &pair.r_plus, &pair.r_minus),
        cfg.tolerances.unitarity,
    ));
    suites.push(SuiteResult::new(
        "parity_relation",
        parity_defect(&zg, &pair.r_plus, &pair.r_minus),
        cfg.tolerances.reflection_relation,
    ));

    // --- δ-factorization identities (exact discretely at any grid size). ---
    {
        let d = delta_factor(&pair, &ops)?;
        let mut defect = 0.0f64;
        for j in 0..zg.point_count {
            let jump = d.delta_plus[j] / d.delta_minus[j]
                - (1.0 + pair.r_plus[j].conj() * pair.r_minus[j]);
            let modulus = (d.delta_plus[j] * d.delta_minus[j]).norm() - 1.0;
            defect = defect.max(jump.norm()).max(modulus.abs());
        }
        suites.push(SuiteResult::new(
            "delta_identities",
            defect,
            dnls_ist::tol::DELTA_IDENTITY_GATE,
        ));
    }

    // --- Positivity: quadratic-form lower bound at every node. ---
    {
        let c_minus = {
            let mut sup_r_lambda = 0.0f64;
            for (j, &z) in zg.nodes().iter().enumerate() {
                if z > 0.0 {
                    let r_lam_sq = 4.0 * z * pair.r_plus[j].norm_sqr();
                    sup_r_lambda = sup_r_lambda.max(r_lam_sq.sqrt());
                }
            }
            (1.0 + sup_r_lambda).powi(-2).min(pair.c0_sq)
        };
        let mut min_eig = f64::INFINITY;
        for (j, &z) in zg.nodes().iter().enumerate() {
            if z > 0.0 {
                let r = (4.0 * z).sqrt() * pair.r_plus[j].norm();
                let mu_minus = ((1.0 + r * r / 4.0).sqrt() - r / 2.0).powi(2);
                min_eig = min_eig.min(mu_minus);
            } else if z < 0.0 {
                min_eig = min_eig.min(1.0 + (pair.r_plus[j].conj() * pair.r_minus[j]).re);
            }
        }
        // Positivity holds when every node eigenvalue clears C₋ (up to
        // round-off slack); report the margin as C₋ − min + slack < slack·2.
        let slack = dnls_ist::tol::POSITIVITY_EQUALITY_SLACK;
        let breach = (c_minus - min_eig).max(0.0);
        suites.push(
            SuiteResult::new("positivity_lower_bound", breach, slack).with_note(format!(
                "C₋ = {c_minus:.6}, min node eigenvalue = {min_eig:.6}"
            )),
        );
    }

    // --- Evolution algebra: modulus isometry + group law. ---
    {
        let t1 = 0.37;
        let t2 = -0.81;
        let e1 = evolve_scattering(&pair, t1);
        let e21 = evolve_scattering(&e1.pair, t2);
        let direct = evolve_scattering(&pair, t1 + t2);
        let mut defect = 0.0f64;
        for j in 0..zg.point_count {
            defect = defect
                .max((e1.pair.r_plus[j].norm() - pair.r_plus[j].norm()).abs())
                .max((e21.pair.r_plus[j] - direct.pair.r_plus[j]).norm());
        }
        suites.push(SuiteResult::new(
            "evolution_algebra",
            defect,
            dnls_ist::tol::EVOLUTION_ALGEBRA_GATE,
        ));
        let res = phase_resolution(&pair, cfg.times.first().copied().unwrap_or(0.5), 1.0);
        if !res.warnings.is_empty() {
            for w in &res.warnings {
                eprintln!("note: {w}");
            }
        }
    }

    // --- Zero-data reconstruction sanity. ---
    {
        let zeros = vec![C64::new(0.0, 0.0); zg.point_count];
        let zero_pair = validate_reflection(
            &zg,
            zeros.clone(),
            zeros,
            &ReflectionTolerances::default(),
        )?;
        let rec = reconstruct(&zero_pair, &xg, &ops, &reconstruct_options(cfg))?;
        suites.push(SuiteResult::new(
            "zero_reflection_reconstruction",
            sup_abs(&rec.values),
            1e-12,
        ));
    }

    // --- Reference-solver conservation over a short horizon. ---
    if xg.point_count >= 64 && sup_abs(&u.values) > 0.0 {
        let t_short = 0.05;
        let before = conserved_quantities(&xg, &u.values)?;
        let state = step_dnls(&PdeState::new(&u), t_short, &step_options(cfg))?;
        let after = conserved_quantities(&xg, &state.values)?;
        let mut worst = 0.0f64;
        for k in 0..3 {
            let rel = (after[k] - before[k]).abs() / before[k].abs().max(1e-30);
            worst = worst.max(rel / dnls_ist::tol::CONSERVED_DRIFT_GATES[k]);
        }
        // `worst` is the drift in units of its per-quantity gate.
        suites.push(
            SuiteResult::new("pde_conservation", worst, 1.0).with_note(format!(
                "largest conserved-quantity drift over t = {t_short}, in units of its gate"
            )),
        );
    } else {
        suites.push(SuiteResult::skipped(
            "pde_conservation",
            "skipped: zero potential or spatial grid below 64 points".into(),
        ));
    }

    let pass = suites.iter().all(|s| s.pass);
    let report = ValidateReport { suites, pass };
    io::write_json(&out.join("validate_report.json"), &report)?;
    for s in &report.suites {
        println!(
            "validate: {:<32} {}  (measured {:.3e}, gate {:.3e})",
            s.name,
            if s.pass { "ok" } else { "FAIL" },
            s.measured,
            s.gate
        );
    }
    if !pass {
        return Err(gate_err("one or more validation suites failed".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// shared helpers for tests
// ---------------------------------------------------------------------------

/// Potential description used by a handful of unit tests.
#[cfg(test)]
pub fn test_config() -> RunConfig {
    use crate::config::PotentialSpec;
    let mut cfg = RunConfig::default();
    cfg.grids.nx = 256;
    cfg.grids.nz = 512;
    cfg.potential = PotentialSpec::Gaussian {
        amplitude: 0.3,
        width: 1.0,
        center: 0.0,
        chirp: 0.0,
    };
    cfg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rel_l2_and_unitarity_helpers() {
        let a = vec![C64::new(1.0, 0.0); 4];
        let b = vec![C64::new(1.0, 0.1); 4];
        let r = rel_l2(&a, &b, 0.5);
        assert!((r - 0.1 / (1.01f64).sqrt()).abs() < 1e-12);
        // Perfect unitarity data.
        let aa = vec![C64::new(1.0, 0.0); 3];
        let rp = vec![C64::new(0.0, 0.0); 3];
        let rm = vec![C64::new(0.0, 0.0); 3];
        assert_eq!(unitarity_defect(&aa, &rp, &rm), 0.0);
    }

    #[test]
    fn validate_runs_clean_on_a_small_grid() {
        let cfg = test_config();
        let dir = tempfile::tempdir().unwrap();
        cmd_validate(&cfg, None, dir.path()).unwrap();
        let report: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.path().join("validate_report.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(report["pass"], serde_json::Value::Bool(true));
    }
}

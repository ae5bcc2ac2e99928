//! Inverse problem: Riemann–Hilbert (RH) reconstruction of the potential
//! from reflection data.
//!
//! The RH problem couples boundary values across the real `z`-line through
//! the jump data `r₊, r₋` and the oscillatory factors `e^{±2izx}`. Two
//! equivalent singular-integral systems are solved, each well-conditioned on
//! one spatial half-line:
//!
//! * **positive system** (adapted to `x → +∞`), unknown columns
//!   `μ₋ = e₁ + P⁻(r₋ e^{2izx} η₊)`, `η₊ = e₂ + P⁺(conj(r₊) e^{−2izx} μ₋)`;
//! * **negative system** (adapted to `x → −∞`), identical in shape but with
//!   the δ-dressed data `r±,δ = conj(δ₊)·conj(δ₋)·r±` and the roles of
//!   `P⁺`/`P⁻` exchanged: `μ₊,δ = e₁ + P⁺(r₋,δ e^{2izx} η₋,δ)`,
//!   `η₋,δ = e₂ + P⁻(conj(r₊,δ) e^{−2izx} μ₊,δ)`.
//!
//! The scalar factors `δ± = exp(P± log(1 + conj(r₊) r₋))` solve the scalar
//! jump `δ₊ = (1 + conj(r₊) r₋) δ₋` and remove the growth that would
//! otherwise make the first system unstable for `x < 0`.
//!
//! In both systems the reconstruction reads off the same +∞-gauge profile
//!
//! ```text
//!   v(x) = (2/πi) ∫ conj(r₊)(z)·e^{−2izx}·μ⁽¹⁾(x; z) dz,
//!   u(x) = v(x)·exp(+i∫_x^{+∞} |v|²),
//! ```
//!
//! with `μ⁽¹⁾` the first component of `μ₋` (positive system) or `μ₊,δ`
//! (negative system, dressed `conj(r₊,δ)` in the integrand). The two
//! half-line reconstructions are glued with a raised-cosine blend on an
//! overlap window around `x = 0`; their sup-difference there (the *gluing
//! defect*) is a free quality certificate.

use crate::cauchy::CauchyOps;
use crate::error::{Error, Result};
use crate::gmres::{gmres, LinearOperator};
use crate::grids::{SpatialGrid, SpectralGrid};
use crate::{fourier, tol, C64, I};
use rayon::prelude::*;

// ---------------------------------------------------------------------------
// Reflection data validation
// ---------------------------------------------------------------------------

/// An admissible pair of reflection coefficients on a spectral grid.
#[derive(Debug, Clone)]
pub struct ReflectionPair {
    /// Grid the coefficients are sampled on.
    pub grid: SpectralGrid,
    /// `r₊(z)`.
    pub r_plus: Vec<C64>,
    /// `r₋(z) = 4z·r₊(z)`.
    pub r_minus: Vec<C64>,
    /// Defocusing admissibility constant `min_{z<0}(1 + Re(conj(r₊)·r₋))`.
    pub c0_sq: f64,
}

/// Tolerances for [`validate_reflection`].
#[derive(Debug, Clone, Copy)]
pub struct ReflectionTolerances {
    /// Absolute tolerance on the pointwise relation `r₋ − 4z·r₊`.
    pub relation_tol: f64,
    /// Decay floor demanded of `|r±|` at the window edges.
    pub edge_floor: f64,
}

impl Default for ReflectionTolerances {
    fn default() -> Self {
        ReflectionTolerances {
            relation_tol: tol::REFLECTION_RELATION_GATE,
            edge_floor: 1e-6,
        }
    }
}

/// Validate raw reflection samples and package them as a [`ReflectionPair`].
///
/// Checks, in order: lengths and finiteness; edge decay; the exact relation
/// `r₋ = 4z·r₊`; reality of the quadratic combination `conj(r₊)·r₋` (its
/// imaginary part must vanish — it equals `±|r(λ)|²`); and strict positivity
/// of `c0_sq` (defocusing admissibility on the negative half-line).
pub fn validate_reflection(
    grid: &SpectralGrid,
    r_plus: Vec<C64>,
    r_minus: Vec<C64>,
    tols: &ReflectionTolerances,
) -> Result<ReflectionPair> {
    if r_plus.len() != grid.point_count || r_minus.len() != grid.point_count {
        return Err(Error::InadmissibleReflection(format!(
            "sample counts ({}, {}) do not match the grid ({})",
            r_plus.len(),
            r_minus.len(),
            grid.point_count
        )));
    }
    if r_plus
        .iter()
        .chain(&r_minus)
        .any(|v| !v.re.is_finite() || !v.im.is_finite())
    {
        return Err(Error::InadmissibleReflection(
            "reflection data contains non-finite values".into(),
        ));
    }
    for (name, r) in [("r₊", &r_plus), ("r₋", &r_minus)] {
        let edge = r[0].norm().max(r[r.len() - 1].norm());
        if edge >= tols.edge_floor {
            return Err(Error::InadmissibleReflection(format!(
                "{name} does not decay at the window edges: {edge:.3e} ≥ {:.3e}",
                tols.edge_floor
            )));
        }
    }
    let mut relation: f64 = 0.0;
    let mut im_defect: f64 = 0.0;
    for (j, &z) in grid.nodes().iter().enumerate() {
        relation = relation.max((r_minus[j] - 4.0 * z * r_plus[j]).norm());
        im_defect = im_defect.max((r_plus[j].conj() * r_minus[j]).im.abs());
    }
    if relation > tols.relation_tol {
        return Err(Error::InadmissibleReflection(format!(
            "relation r₋ = 4z·r₊ violated by {relation:.3e} (tol {:.3e})",
            tols.relation_tol
        )));
    }
    if im_defect > tol::DELTA_IDENTITY_GATE {
        return Err(Error::InadmissibleReflection(format!(
            "conj(r₊)·r₋ is not real: max |Im| = {im_defect:.3e}"
        )));
    }
    let zero = grid.zero_index();
    let c0_sq = (0..zero)
        .map(|j| 1.0 + (r_plus[j].conj() * r_minus[j]).re)
        .fold(f64::INFINITY, f64::min);
    if c0_sq <= 0.0 {
        return Err(Error::InadmissibleReflection(format!(
            "defocusing positivity fails on the negative half-line: c0_sq = {c0_sq:.6}"
        )));
    }
    Ok(ReflectionPair {
        grid: *grid,
        r_plus,
        r_minus,
        c0_sq,
    })
}

// ---------------------------------------------------------------------------
// δ factorization
// ---------------------------------------------------------------------------

/// The scalar RH factorization data.
#[derive(Debug, Clone)]
pub struct DeltaFactor {
    /// Grid everything lives on.
    pub grid: SpectralGrid,
    /// Boundary value from the upper half plane.
    pub delta_plus: Vec<C64>,
    /// Boundary value from the lower half plane.
    pub delta_minus: Vec<C64>,
    /// Dressed reflection `r₊,δ = conj(δ₊ δ₋)·r₊`.
    pub r_plus_delta: Vec<C64>,
    /// Dressed reflection `r₋,δ = conj(δ₊ δ₋)·r₋`.
    pub r_minus_delta: Vec<C64>,
}

/// Compute `δ± = exp(P± log(1 + conj(r₊) r₋))` and the dressed reflection
/// coefficients.
pub fn delta_factor(r: &ReflectionPair, ops: &CauchyOps) -> Result<DeltaFactor> {
    if *ops.grid() != r.grid {
        return Err(Error::InvalidInput(
            "Cauchy operators live on a different grid than the reflection data".into(),
        ));
    }
    // The argument of the logarithm is 1 + conj(r₊)·r₋ ≥ c0_sq > 0 and real,
    // so the real log is well defined node-wise (validate_reflection has
    // already enforced reality and positivity).
    let w: Vec<C64> = r
        .r_plus
        .iter()
        .zip(&r.r_minus)
        .map(|(rp, rm)| C64::new((rp.conj() * rm).re.ln_1p(), 0.0))
        .collect();
    let delta_plus: Vec<C64> = ops.plemelj_plus(&w).into_iter().map(|v| v.exp()).collect();
    let delta_minus: Vec<C64> = ops.plemelj_minus(&w).into_iter().map(|v| v.exp()).collect();
    let dress: Vec<C64> = delta_plus
        .iter()
        .zip(&delta_minus)
        .map(|(dp, dm)| (dp * dm).conj())
        .collect();
    let r_plus_delta: Vec<C64> = r.r_plus.iter().zip(&dress).map(|(v, d)| v * d).collect();
    let r_minus_delta: Vec<C64> = r.r_minus.iter().zip(&dress).map(|(v, d)| v * d).collect();
    Ok(DeltaFactor {
        grid: r.grid,
        delta_plus,
        delta_minus,
        r_plus_delta,
        r_minus_delta,
    })
}

// ---------------------------------------------------------------------------
// Singular-integral solves
// ---------------------------------------------------------------------------

/// Iteration controls for the RH solves.
#[derive(Debug, Clone, Copy)]
pub struct RhSolverOptions {
    /// Sup-norm change per sweep at which the fixed point stops.
    pub neumann_tol: f64,
    /// Sweep cap for the fixed point before falling back to GMRES.
    pub neumann_max_sweeps: usize,
    /// Contraction estimate (`sup|r₊|·sup|r₋|`) above which GMRES is used
    /// directly.
    pub neumann_threshold: f64,
    /// GMRES relative-residual tolerance.
    pub gmres_tol: f64,
    /// GMRES restart length.
    pub gmres_restart: usize,
    /// GMRES outer-cycle cap.
    pub gmres_max_outer: usize,
}

impl Default for RhSolverOptions {
    fn default() -> Self {
        RhSolverOptions {
            neumann_tol: tol::NEUMANN_TOL,
            neumann_max_sweeps: tol::NEUMANN_MAX_SWEEPS,
            neumann_threshold: tol::NEUMANN_THRESHOLD,
            gmres_tol: tol::RH_SOLVER_TOL,
            gmres_restart: tol::GMRES_RESTART,
            gmres_max_outer: tol::GMRES_MAX_OUTER,
        }
    }
}

/// Which half-line system is being solved (determines the projection roles).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum HalfLine {
    Positive,
    Negative,
}

/// Shared per-`x` system context: dressed coefficients and phases.
struct SystemCtx<'a> {
    ops: &'a CauchyOps,
    half: HalfLine,
    /// Coefficient in the `q`-equation: `conj(r₊)` (possibly dressed).
    cq: &'a [C64],
    /// Coefficient in the `p`-equation: `r₋` (possibly dressed).
    cp: &'a [C64],
    /// `e^{2izx}` per node.
    e2: Vec<C64>,
    /// `e^{−2izx}` per node.
    em2: Vec<C64>,
}

impl<'a> SystemCtx<'a> {
    fn new(ops: &'a CauchyOps, half: HalfLine, cq: &'a [C64], cp: &'a [C64], x: f64) -> Self {
        let e2: Vec<C64> = ops
            .grid()
            .nodes()
            .iter()
            .map(|&z| (2.0 * I * z * x).exp())
            .collect();
        let em2: Vec<C64> = e2.iter().map(|v| v.conj()).collect();
        SystemCtx {
            ops,
            half,
            cq,
            cp,
            e2,
            em2,
        }
    }

    fn proj_q(&self, f: &[C64]) -> Vec<C64> {
        match self.half {
            HalfLine::Positive => self.ops.plemelj_plus(f),
            HalfLine::Negative => self.ops.plemelj_minus(f),
        }
    }

    fn proj_p(&self, f: &[C64]) -> Vec<C64> {
        match self.half {
            HalfLine::Positive => self.ops.plemelj_minus(f),
            HalfLine::Negative => self.ops.plemelj_plus(f),
        }
    }

    /// `q`-equation input: `cq ∘ e^{−2izx} ∘ g`.
    fn q_input(&self, g: &[C64]) -> Vec<C64> {
        g.iter()
            .zip(self.cq.iter().zip(&self.em2))
            .map(|(gv, (c, e))| c * e * gv)
            .collect()
    }

    /// `p`-equation input: `cp ∘ e^{2izx} ∘ g`.
    fn p_input(&self, g: &[C64]) -> Vec<C64> {
        g.iter()
            .zip(self.cp.iter().zip(&self.e2))
            .map(|(gv, (c, e))| c * e * gv)
            .collect()
    }

    fn contraction_estimate(&self) -> f64 {
        let sup = |v: &[C64]| v.iter().map(|x| x.norm()).fold(0.0f64, f64::max);
        sup(self.cq) * sup(self.cp)
    }
}

/// Which affine system of the 2×2 column pair is being solved.
///
/// `First`: unknowns `(μ⁽¹⁾ − 1, η⁽¹⁾)` — the pair driven by the `e₁`
/// boundary condition. `Second`: unknowns `(μ⁽²⁾, η⁽²⁾ − 1)` — driven by
/// `e₂`. Both share the same linear operator and differ in the right-hand
/// side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColumnPair {
    First,
    Second,
}

struct RhOperator<'a> {
    ctx: &'a SystemCtx<'a>,
}

impl LinearOperator for RhOperator<'_> {
    fn dim(&self) -> usize {
        2 * self.ctx.e2.len()
    }
    fn apply(&self, x: &[C64], out: &mut [C64]) {
        let n = self.ctx.e2.len();
        let (p, q) = x.split_at(n);
        let pq = self.ctx.proj_p(&self.ctx.p_input(q));
        let qp = self.ctx.proj_q(&self.ctx.q_input(p));
        for j in 0..n {
            out[j] = p[j] - pq[j];
            out[n + j] = q[j] - qp[j];
        }
    }
}

/// Solve one affine column pair. Returns `(p, q, sweeps_or_iters)` where the
/// affine shifts are *not* included (`μ⁽¹⁾ = 1 + p` etc.).
fn solve_pair(
    ctx: &SystemCtx<'_>,
    which: ColumnPair,
    opts: &RhSolverOptions,
) -> Result<(Vec<C64>, Vec<C64>, usize)> {
    let n = ctx.e2.len();
    let ones = vec![C64::new(1.0, 0.0); n];
    let contraction = ctx.contraction_estimate();
    if contraction < opts.neumann_threshold {
        // Gauss–Seidel-style alternating fixed point.
        let mut p = vec![C64::new(0.0, 0.0); n];
        let mut q = vec![C64::new(0.0, 0.0); n];
        for sweep in 1..=opts.neumann_max_sweeps {
            let (p_new, q_new) = match which {
                ColumnPair::First => {
                    let one_plus_p: Vec<C64> = ones.iter().zip(&p).map(|(o, pv)| o + pv).collect();
                    let q_new = ctx.proj_q(&ctx.q_input(&one_plus_p));
                    let p_new = ctx.proj_p(&ctx.p_input(&q_new));
                    (p_new, q_new)
                }
                ColumnPair::Second => {
                    let one_plus_q: Vec<C64> = ones.iter().zip(&q).map(|(o, qv)| o + qv).collect();
                    let p_new = ctx.proj_p(&ctx.p_input(&one_plus_q));
                    let q_new = ctx.proj_q(&ctx.q_input(&p_new));
                    (p_new, q_new)
                }
            };
            let change = p_new
                .iter()
                .zip(&p)
                .chain(q_new.iter().zip(&q))
                .map(|(a, b)| (a - b).norm())
                .fold(0.0f64, f64::max);
            p = p_new;
            q = q_new;
            if change < opts.neumann_tol {
                return Ok((p, q, sweep));
            }
        }
        // Contraction estimate was optimistic — fall through to GMRES.
    }
    let op = RhOperator { ctx };
    let mut rhs = vec![C64::new(0.0, 0.0); 2 * n];
    match which {
        ColumnPair::First => {
            let q_rhs = ctx.proj_q(&ctx.q_input(&ones));
            rhs[n..].copy_from_slice(&q_rhs);
        }
        ColumnPair::Second => {
            let p_rhs = ctx.proj_p(&ctx.p_input(&ones));
            rhs[..n].copy_from_slice(&p_rhs);
        }
    }
    let (sol, stats) = gmres(
        &op,
        &rhs,
        None,
        opts.gmres_tol,
        opts.gmres_restart,
        opts.gmres_max_outer,
    )?;
    let (p, q) = sol.split_at(n);
    Ok((p.to_vec(), q.to_vec(), stats.iterations))
}

/// Self-consistency residual of a solved first/second column pair: plug the
/// solution back into its fixed-point equations and take the sup defect.
fn pair_residual(ctx: &SystemCtx<'_>, which: ColumnPair, p: &[C64], q: &[C64]) -> f64 {
    let n = p.len();
    let ones = vec![C64::new(1.0, 0.0); n];
    let (p_rhs, q_rhs) = match which {
        ColumnPair::First => {
            let one_plus_p: Vec<C64> = ones.iter().zip(p).map(|(o, pv)| o + pv).collect();
            let q_rhs = ctx.proj_q(&ctx.q_input(&one_plus_p));
            let p_rhs = ctx.proj_p(&ctx.p_input(q));
            (p_rhs, q_rhs)
        }
        ColumnPair::Second => {
            let one_plus_q: Vec<C64> = ones.iter().zip(q).map(|(o, qv)| o + qv).collect();
            let p_rhs = ctx.proj_p(&ctx.p_input(&one_plus_q));
            let q_rhs = ctx.proj_q(&ctx.q_input(p));
            (p_rhs, q_rhs)
        }
    };
    p.iter()
        .zip(&p_rhs)
        .chain(q.iter().zip(&q_rhs))
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max)
}

/// Solution of one RH system at a fixed spatial point.
///
/// Column pairs not solved by the producing call are `None` (e.g. the
/// positive-system solver leaves the δ-dressed columns empty).
#[derive(Debug, Clone)]
pub struct RhSolution {
    /// Spatial evaluation point.
    pub x: f64,
    /// `μ₋(x; z)` column (positive system).
    pub mu_minus: Option<Vec<[C64; 2]>>,
    /// `η₊(x; z)` column (positive system).
    pub eta_plus: Option<Vec<[C64; 2]>>,
    /// `μ₊,δ(x; z)` column (negative system).
    pub mu_plus_delta: Option<Vec<[C64; 2]>>,
    /// `η₋,δ(x; z)` column (negative system).
    pub eta_minus_delta: Option<Vec<[C64; 2]>>,
    /// Sup-norm fixed-point residual over all solved columns.
    pub residual: f64,
}

fn assemble_columns(
    ctx: &SystemCtx<'_>,
    opts: &RhSolverOptions,
) -> Result<(Vec<[C64; 2]>, Vec<[C64; 2]>, f64)> {
    let n = ctx.e2.len();
    let (p1, q1, _) = solve_pair(ctx, ColumnPair::First, opts)?;
    let (p2, q2, _) = solve_pair(ctx, ColumnPair::Second, opts)?;
    let res = pair_residual(ctx, ColumnPair::First, &p1, &q1)
        .max(pair_residual(ctx, ColumnPair::Second, &p2, &q2));
    let mut mu = Vec::with_capacity(n);
    let mut eta = Vec::with_capacity(n);
    for j in 0..n {
        mu.push([C64::new(1.0, 0.0) + p1[j], p2[j]]);
        eta.push([q1[j], C64::new(1.0, 0.0) + q2[j]]);
    }
    Ok((mu, eta, res))
}

/// Solve the positive-half-line system at `x`, returning the full
/// `(μ₋, η₊)` column pair.
pub fn solve_rh_positive(
    r: &ReflectionPair,
    x: f64,
    ops: &CauchyOps,
    opts: &RhSolverOptions,
) -> Result<RhSolution> {
    let cq: Vec<C64> = r.r_plus.iter().map(|v| v.conj()).collect();
    let ctx = SystemCtx::new(ops, HalfLine::Positive, &cq, &r.r_minus, x);
    let (mu, eta, residual) = assemble_columns(&ctx, opts)?;
    Ok(RhSolution {
        x,
        mu_minus: Some(mu),
        eta_plus: Some(eta),
        mu_plus_delta: None,
        eta_minus_delta: None,
        residual,
    })
}

/// Solve the δ-dressed negative-half-line system at `x`, returning the full
/// `(μ₊,δ, η₋,δ)` column pair.
pub fn solve_rh_negative(
    r: &ReflectionPair,
    delta: &DeltaFactor,
    x: f64,
    ops: &CauchyOps,
    opts: &RhSolverOptions,
) -> Result<RhSolution> {
    if delta.grid != r.grid {
        return Err(Error::InvalidInput(
            "δ factor grid does not match the reflection grid".into(),
        ));
    }
    let cq: Vec<C64> = delta.r_plus_delta.iter().map(|v| v.conj()).collect();
    let ctx = SystemCtx::new(ops, HalfLine::Negative, &cq, &delta.r_minus_delta, x);
    let (mu, eta, residual) = assemble_columns(&ctx, opts)?;
    Ok(RhSolution {
        x,
        mu_minus: None,
        eta_plus: None,
        mu_plus_delta: Some(mu),
        eta_minus_delta: Some(eta),
        residual,
    })
}

// ---------------------------------------------------------------------------
// Reconstruction
// ---------------------------------------------------------------------------

/// Options for [`reconstruct`].
#[derive(Debug, Clone, Copy)]
pub struct ReconstructOptions {
    /// Half-width of the gluing window around `x = 0`; defaults to
    /// `min(2, L/8)`.
    pub overlap_half_width: Option<f64>,
    /// Solver controls for the per-`x` singular systems.
    pub solver: RhSolverOptions,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions {
            overlap_half_width: None,
            solver: RhSolverOptions::default(),
        }
    }
}

/// A reconstructed potential with its gluing certificate.
#[derive(Debug, Clone)]
pub struct ReconstructedPotential {
    /// Spatial grid of the samples.
    pub grid: SpatialGrid,
    /// Reconstructed `u(x_j)`.
    pub values: Vec<C64>,
    /// Sup-difference of the two half-line reconstructions over the overlap
    /// window.
    pub gluing_defect: f64,
}

/// First-component-only solve returning the gauge profile value
/// `v(x) = (2/πi)·dz·Σ cq ∘ e^{−2izx} ∘ μ⁽¹⁾`.
fn profile_value(ctx: &SystemCtx<'_>, opts: &RhSolverOptions, dz: f64) -> Result<C64> {
    let (p, _q, _) = solve_pair(ctx, ColumnPair::First, opts)?;
    let mut acc = C64::new(0.0, 0.0);
    for (j, pv) in p.iter().enumerate() {
        acc += ctx.cq[j] * ctx.em2[j] * (1.0 + pv);
    }
    Ok(acc * dz * 2.0 / (std::f64::consts::PI * I))
}

/// Reconstruct the potential on a spatial grid from admissible reflection
/// data.
///
/// Solves the positive system for `x ≥ −x_ov` and the δ-dressed negative
/// system for `x ≤ +x_ov`, blends them with a raised cosine on the overlap,
/// and restores the physical gauge with the right-tail quadratic phase.
pub fn reconstruct(
    r: &ReflectionPair,
    xgrid: &SpatialGrid,
    ops: &CauchyOps,
    opts: &ReconstructOptions,
) -> Result<ReconstructedPotential> {
    let delta = delta_factor(r, ops)?;
    let x_ov = opts
        .overlap_half_width
        .unwrap_or_else(|| (xgrid.half_width / 8.0).min(2.0));
    if x_ov <= 0.0 || x_ov >= xgrid.half_width {
        return Err(Error::InvalidInput(format!(
            "overlap half-width {x_ov} must lie strictly inside the domain"
        )));
    }
    let dz = r.grid.dz();
    let cq_pos: Vec<C64> = r.r_plus.iter().map(|v| v.conj()).collect();
    let cq_neg: Vec<C64> = delta.r_plus_delta.iter().map(|v| v.conj()).collect();

    let nodes = xgrid.nodes();
    // Each x is solved cold (no cross-x warm starts), which keeps the output
    // bit-identical for every thread count.
    let per_node: Vec<Result<(Option<C64>, Option<C64>)>> = nodes
        .par_iter()
        .map(|&x| {
            let v_pos = if x >= -x_ov {
                let ctx = SystemCtx::new(ops, HalfLine::Positive, &cq_pos, &r.r_minus, x);
                Some(profile_value(&ctx, &opts.solver, dz)?)
            } else {
                None
            };
            let v_neg = if x <= x_ov {
                let ctx =
                    SystemCtx::new(ops, HalfLine::Negative, &cq_neg, &delta.r_minus_delta, x);
                Some(profile_value(&ctx, &opts.solver, dz)?)
            } else {
                None
            };
            Ok((v_pos, v_neg))
        })
        .collect();

    let n = nodes.len();
    let mut v = vec![C64::new(0.0, 0.0); n];
    let mut gluing_defect: f64 = 0.0;
    for (j, r_node) in per_node.into_iter().enumerate() {
        let (v_pos, v_neg) = r_node?;
        let x = nodes[j];
        v[j] = match (v_pos, v_neg) {
            (Some(vp), None) => vp,
            (None, Some(vn)) => vn,
            (Some(vp), Some(vn)) => {
                gluing_defect = gluing_defect.max((vp - vn).norm());
                // Raised-cosine weight: 1 at x = −x_ov (all negative-system)
                // → 0 at x = +x_ov (all positive-system).
                let w = 0.5 * (1.0 + (std::f64::consts::PI * (x + x_ov) / (2.0 * x_ov)).cos());
                w * vn + (1.0 - w) * vp
            }
            (None, None) => unreachable!("overlap windows cover the line"),
        };
    }

    // Physical gauge: u = v·exp(+i·∫_x^{edge} |v|²).
    let abs2: Vec<f64> = v.iter().map(|c| c.norm_sqr()).collect();
    let tail = fourier::cumulative_trapezoid_from_right(&abs2, xgrid.dx());
    let values: Vec<C64> = v
        .iter()
        .zip(&tail)
        .map(|(vv, &t)| vv * C64::new(0.0, t).exp())
        .collect();

    Ok(ReconstructedPotential {
        grid: *xgrid,
        values,
        gluing_defect,
    })
}

/// Phase-consistency defect between a reconstructed mass and the transmission
/// limit: distance of `‖u‖² + 2·arg(a_inf)` from the nearest multiple of 4π.
pub fn phase_consistency_defect(mass: f64, a_inf: C64) -> f64 {
    let target = mass + 2.0 * a_inf.arg();
    let period = 4.0 * std::f64::consts::PI;
    let k = (target / period).round();
    (target - k * period).abs()
}

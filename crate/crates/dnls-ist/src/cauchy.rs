//! Hilbert transform and Plemelj boundary projections as FFT multiplier
//! operators, plus offline evaluation of the Cauchy integral.
//!
//! For `f` decaying on the real line, the Cauchy transform
//! `C(f)(w) = (1/2πi)∫ f(s)/(s−w) ds` has boundary values
//! `P^±f = C(f)(z ± i0)` satisfying the Plemelj relations
//!
//! ```text
//!   P⁺ − P⁻ = I,      P⁺ + P⁻ = −iH,      H f = (1/π) p.v.∫ f(s)/(z−s) ds.
//! ```
//!
//! Discretely, samples on the open grid `[−Z, Z)` are embedded in the center
//! of a zero-padded buffer (`pad_factor × Nz` points) and multiplied in
//! Fourier space by
//!
//! ```text
//!   H:  i·sgn(k),     P⁺: (1 + sgn(k))/2,     P⁻: −(1 − sgn(k))/2,
//! ```
//!
//! with `sgn(0) = sgn(k_Nyquist) = 0`. The completeness identity
//! `P⁺ − P⁻ = I` then holds *exactly* for every choice of `sgn` (the two
//! multipliers sum to 1 bin-wise), while the half-bins at `k = 0` and Nyquist
//! split evenly — the standard principal-value convention. Zero-padding
//! suppresses the circular wrap of the slowly-decaying Cauchy kernel; the pad
//! factor trades memory for image suppression and is configurable.

use crate::error::{Error, Result};
use crate::grids::SpectralGrid;
use crate::{fourier, C64};

/// A complex-valued function sampled on a [`SpectralGrid`].
#[derive(Debug, Clone)]
pub struct GridFunction {
    /// The grid the samples live on.
    pub grid: SpectralGrid,
    /// Samples `f(z_j)`.
    pub values: Vec<C64>,
}

impl GridFunction {
    /// Wrap samples, checking the length.
    pub fn new(grid: SpectralGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.point_count {
            return Err(Error::InvalidInput(format!(
                "sample count {} does not match grid point count {}",
                values.len(),
                grid.point_count
            )));
        }
        Ok(GridFunction { grid, values })
    }

    /// Enforce the endpoint-decay floor required by the singular operators.
    pub fn check_endpoint_decay(&self, floor: f64) -> Result<()> {
        let first = self.values.first().map(|v| v.norm()).unwrap_or(0.0);
        let last = self.values.last().map(|v| v.norm()).unwrap_or(0.0);
        let worst = first.max(last);
        if worst >= floor {
            return Err(Error::InvalidInput(format!(
                "function does not decay at the spectral window edges: \
                 |f(edge)| = {worst:.3e} ≥ floor {floor:.3e}"
            )));
        }
        Ok(())
    }
}

/// Precomputed multiplier operators on one spectral grid.
pub struct CauchyOps {
    grid: SpectralGrid,
    pad_factor: usize,
    /// Padded transform length `pad_factor · Nz`.
    m: usize,
    /// Offset of the data window inside the padded buffer (centered).
    lo: usize,
    /// `sgn(k)` per padded bin, with the zero and Nyquist bins zeroed.
    sign: Vec<f64>,
}

/// Which multiplier to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Multiplier {
    Hilbert,
    PlemeljPlus,
    PlemeljMinus,
}

impl CauchyOps {
    /// Build operators for a grid with the given zero-padding factor (≥ 1).
    pub fn new(grid: &SpectralGrid, pad_factor: usize) -> Result<Self> {
        if pad_factor == 0 {
            return Err(Error::InvalidInput("pad factor must be ≥ 1".into()));
        }
        let m = grid
            .point_count
            .checked_mul(pad_factor)
            .ok_or_else(|| Error::InvalidInput("padded length overflows".into()))?;
        let lo = (m - grid.point_count) / 2;
        let mut sign = vec![0.0; m];
        for (i, s) in sign.iter_mut().enumerate() {
            let mode = fourier::mode_index(i, m);
            if i == 0 || (m % 2 == 0 && i == m / 2) {
                *s = 0.0;
            } else {
                *s = if mode > 0 { 1.0 } else { -1.0 };
            }
        }
        Ok(CauchyOps {
            grid: *grid,
            pad_factor,
            m,
            lo,
            sign,
        })
    }

    /// The grid these operators act on.
    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    /// Configured zero-padding factor.
    pub fn pad_factor(&self) -> usize {
        self.pad_factor
    }

    fn apply(&self, values: &[C64], which: Multiplier) -> Vec<C64> {
        assert_eq!(
            values.len(),
            self.grid.point_count,
            "operator input length mismatch"
        );
        let mut buf = vec![C64::new(0.0, 0.0); self.m];
        buf[self.lo..self.lo + values.len()].copy_from_slice(values);
        fourier::fft_in_place(&mut buf);
        for (v, &s) in buf.iter_mut().zip(&self.sign) {
            let factor = match which {
                Multiplier::Hilbert => C64::new(0.0, s),
                Multiplier::PlemeljPlus => C64::new(0.5 * (1.0 + s), 0.0),
                Multiplier::PlemeljMinus => C64::new(-0.5 * (1.0 - s), 0.0),
            };
            *v *= factor;
        }
        fourier::ifft_in_place(&mut buf);
        buf[self.lo..self.lo + values.len()].to_vec()
    }

    /// Discrete Hilbert transform (multiplier `i·sgn(k)`).
    pub fn hilbert(&self, values: &[C64]) -> Vec<C64> {
        self.apply(values, Multiplier::Hilbert)
    }

    /// Upper boundary projection `P⁺` (multiplier `(1+sgn)/2`).
    pub fn plemelj_plus(&self, values: &[C64]) -> Vec<C64> {
        self.apply(values, Multiplier::PlemeljPlus)
    }

    /// Lower boundary projection `P⁻` (multiplier `−(1−sgn)/2`).
    pub fn plemelj_minus(&self, values: &[C64]) -> Vec<C64> {
        self.apply(values, Multiplier::PlemeljMinus)
    }

    /// Validated entry points taking a [`GridFunction`] and enforcing the
    /// endpoint-decay precondition before applying the operator.
    pub fn hilbert_checked(&self, f: &GridFunction, floor: f64) -> Result<Vec<C64>> {
        self.check_compatible(f)?;
        f.check_endpoint_decay(floor)?;
        Ok(self.hilbert(&f.values))
    }

    /// `P⁺` with precondition checks (see [`Self::hilbert_checked`]).
    pub fn plemelj_plus_checked(&self, f: &GridFunction, floor: f64) -> Result<Vec<C64>> {
        self.check_compatible(f)?;
        f.check_endpoint_decay(floor)?;
        Ok(self.plemelj_plus(&f.values))
    }

    /// `P⁻` with precondition checks (see [`Self::hilbert_checked`]).
    pub fn plemelj_minus_checked(&self, f: &GridFunction, floor: f64) -> Result<Vec<C64>> {
        self.check_compatible(f)?;
        f.check_endpoint_decay(floor)?;
        Ok(self.plemelj_minus(&f.values))
    }

    fn check_compatible(&self, f: &GridFunction) -> Result<()> {
        if f.grid != self.grid {
            return Err(Error::InvalidInput(
                "grid function does not live on the operator's grid".into(),
            ));
        }
        Ok(())
    }
}

/// Cauchy integral at a point strictly off the real line, by periodic
/// trapezoid quadrature over the sample window:
/// `C(f)(w) = (1/2πi)·dz·Σ f(z_j)/(z_j − w)`.
///
/// For `w` in the upper half plane this continues `P⁺f`; in the lower half
/// plane, `P⁻f`. Accuracy is limited by the window truncation of `f` and by
/// the distance `|Im w|` relative to the node spacing (the quadrature is
/// spectrally accurate once `|Im w| ≳ a few·dz`).
pub fn cauchy_offline(f: &GridFunction, w: C64) -> Result<C64> {
    if w.im == 0.0 {
        return Err(Error::InvalidInput(
            "offline Cauchy evaluation requires Im w ≠ 0 (use the Plemelj projections on the line)"
                .into(),
        ));
    }
    let dz = f.grid.dz();
    let mut acc = C64::new(0.0, 0.0);
    for (j, &v) in f.values.iter().enumerate() {
        let s = f.grid.node(j);
        acc += v / (C64::new(s, 0.0) - w);
    }
    Ok(acc * dz / (2.0 * std::f64::consts::PI * crate::I))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grids::make_grids;
    use crate::tol;

    fn production_ops() -> (SpectralGrid, CauchyOps) {
        let (_, zg) = make_grids(20.0, 1024, 40.0, 2048).unwrap();
        let ops = CauchyOps::new(&zg, 8).unwrap();
        (zg, ops)
    }

    fn lorentzian(zg: &SpectralGrid) -> Vec<C64> {
        zg.nodes()
            .iter()
            .map(|&z| C64::new(1.0 / (1.0 + z * z), 0.0))
            .collect()
    }

    #[test]
    fn completeness_identity_is_structural() {
        // P⁺ − P⁻ = I to round-off for an oscillatory r-type function whose
        // tails do NOT vanish at machine precision — the identity does not
        // depend on decay.
        let (zg, ops) = production_ops();
        let f: Vec<C64> = zg
            .nodes()
            .iter()
            .map(|&z| C64::new(-(z / 25.0).powi(2), -2.0 * z * 3.7).exp() * 0.3)
            .collect();
        let plus = ops.plemelj_plus(&f);
        let minus = ops.plemelj_minus(&f);
        let worst = plus
            .iter()
            .zip(&minus)
            .zip(&f)
            .map(|((p, m), v)| (p - m - v).norm())
            .fold(0.0f64, f64::max);
        assert!(
            worst < tol::PROJECTION_COMPLETENESS_GATE,
            "completeness defect {worst:.3e}"
        );
    }

    #[test]
    fn projections_commute_and_are_contractions() {
        let (zg, ops) = production_ops();
        let f: Vec<C64> = zg
            .nodes()
            .iter()
            .map(|&z| C64::new(-0.5 * z * z, 10.0 * z).exp())
            .collect();
        let pm = ops.plemelj_minus(&ops.plemelj_plus(&f));
        let mp = ops.plemelj_plus(&ops.plemelj_minus(&f));
        let comm = pm
            .iter()
            .zip(&mp)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(comm < 1e-12, "commutator {comm:.3e}");
        let norm = |v: &[C64]| (v.iter().map(|x| x.norm_sqr()).sum::<f64>()).sqrt();
        let nf = norm(&f);
        assert!(norm(&ops.plemelj_plus(&f)) <= nf * (1.0 + 1e-12));
        assert!(norm(&ops.plemelj_minus(&f)) <= nf * (1.0 + 1e-12));
    }

    #[test]
    fn hilbert_is_an_isometry_on_mean_free_data() {
        // One-sided analytic wavepacket: mean and Nyquist content ~e^{−50}.
        let (zg, ops) = production_ops();
        let f: Vec<C64> = zg
            .nodes()
            .iter()
            .map(|&z| C64::new(-0.5 * z * z, 10.0 * z).exp())
            .collect();
        let h = ops.hilbert(&f);
        let norm = |v: &[C64]| (v.iter().map(|x| x.norm_sqr()).sum::<f64>()).sqrt();
        let rel = (norm(&h) - norm(&f)).abs() / norm(&f);
        assert!(rel < tol::HILBERT_ISOMETRY_GATE, "isometry defect {rel:.3e}");
        // The same packet has one-sided spectrum, so P⁺ reproduces it.
        let p = ops.plemelj_plus(&f);
        let worst = p
            .iter()
            .zip(&f)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-8, "one-sided projection defect {worst:.3e}");
        // And H² = −I on the same data.
        let hh = ops.hilbert(&h);
        let worst2 = hh
            .iter()
            .zip(&f)
            .map(|(a, b)| (a + b).norm())
            .fold(0.0f64, f64::max);
        assert!(worst2 < 1e-8, "H² defect {worst2:.3e}");
    }

    #[test]
    fn lorentzian_closed_forms_at_window_truncation_accuracy() {
        // On the Z = 40 window the truncated tails of 1/(1+z²) leave an
        // irreducible O(f(Z)) ≈ 1e-3 defect right at the window edge and
        // ~8e-5 over the interior half |z| ≤ Z/2, irrespective of grid
        // refinement or padding; this test pins that honest window-limited
        // accuracy. The 1e-6 closed-form matching lives on the large window
        // (acceptance suite).
        let (zg, ops) = production_ops();
        let f = lorentzian(&zg);
        let h = ops.hilbert(&f);
        let half = zg.half_width / 2.0;
        let mut worst = 0.0f64;
        let mut worst_interior = 0.0f64;
        for (j, &z) in zg.nodes().iter().enumerate() {
            let exact = -z / (1.0 + z * z);
            let err = (h[j] - C64::new(exact, 0.0)).norm();
            worst = worst.max(err);
            if z.abs() <= half {
                worst_interior = worst_interior.max(err);
            }
        }
        assert!(
            worst_interior < tol::WINDOWED_LORENTZIAN_TOL,
            "interior H defect {worst_interior:.3e}"
        );
        assert!(worst < 2e-3, "edge H defect {worst:.3e}");
        let p = ops.plemelj_plus(&f);
        let mut worst_p = 0.0f64;
        for (j, &z) in zg.nodes().iter().enumerate() {
            if z.abs() > half {
                continue;
            }
            let exact = crate::I / (2.0 * C64::new(z, 1.0));
            worst_p = worst_p.max((p[j] - exact).norm());
        }
        assert!(worst_p < tol::WINDOWED_LORENTZIAN_TOL, "P⁺ defect {worst_p:.3e}");
    }

    #[test]
    fn offline_cauchy_matches_residue_value() {
        // C(1/(1+s²))(2i) = 1/6 (residues at s = i inside, pole of the kernel
        // at 2i): window truncation affects this at ~1e-5.
        let (zg, _) = production_ops();
        let f = GridFunction::new(zg, lorentzian(&zg)).unwrap();
        let c = cauchy_offline(&f, C64::new(0.0, 2.0)).unwrap();
        assert!(
            (c - C64::new(1.0 / 6.0, 0.0)).norm() < 5e-5,
            "C(f)(2i) = {c}"
        );
        // Lower half plane: C(f)(−2i) continues P⁻f = −(1 − …): closed form
        // −i/(2(w−i)) at w = −2i gives −1/6.
        let c2 = cauchy_offline(&f, C64::new(0.0, -2.0)).unwrap();
        assert!(
            (c2 - C64::new(-1.0 / 6.0, 0.0)).norm() < 5e-5,
            "C(f)(−2i) = {c2}"
        );
        assert!(cauchy_offline(&f, C64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn plemelj_plus_is_a_boundary_value_of_the_offline_continuation() {
        // Vertical approach: C(f)(z + iε) → P⁺f(z). Compare at a few probe
        // points via the closed-form continuation i/(2(w+i)) of the
        // Lorentzian, and via the quadrature itself at decreasing heights
        // with Richardson extrapolation in ε.
        let (_, zbig) = make_grids(20.0, 64, 100.0, 65536).unwrap();
        let f = GridFunction::new(zbig, lorentzian(&zbig)).unwrap();
        let ops = CauchyOps::new(&zbig, 8).unwrap();
        let p = ops.plemelj_plus(&f.values);
        for &zp in &[0.0, 1.5, -5.0] {
            let jp = ((zp + zbig.half_width) / zbig.dz()).round() as usize;
            let z_node = zbig.node(jp);
            // Closed-form boundary value.
            let exact = crate::I / (2.0 * C64::new(z_node, 1.0));
            assert!((p[jp] - exact).norm() < 1e-5, "P⁺ at {z_node}: {}", p[jp]);
            // Richardson extrapolation of the offline values along ε.
            let heights = [0.16, 0.08, 0.04, 0.02];
            let vals: Vec<C64> = heights
                .iter()
                .map(|&e| cauchy_offline(&f, C64::new(z_node, e)).unwrap())
                .collect();
            // Neville's scheme to ε = 0 (polynomial in ε of degree 3).
            let mut t = vals.clone();
            for lev in 1..heights.len() {
                for i in 0..heights.len() - lev {
                    let e0 = heights[i];
                    let e1 = heights[i + lev];
                    t[i] = (t[i + 1] * e0 - t[i] * e1) / (e0 - e1);
                }
            }
            assert!(
                (t[0] - p[jp]).norm() < 1e-5,
                "vertical approach limit {} vs P⁺ {}",
                t[0],
                p[jp]
            );
        }
    }

    #[test]
    fn grid_function_validation() {
        let (zg, ops) = production_ops();
        assert!(GridFunction::new(zg, vec![C64::new(0.0, 0.0); 3]).is_err());
        let f = GridFunction::new(zg, lorentzian(&zg)).unwrap();
        // Lorentzian edge value 1/1601 ≈ 6e-4 ≥ 1e-8: rejected by the
        // checked entry point…
        assert!(ops.hilbert_checked(&f, tol::CAUCHY_EDGE_FLOOR).is_err());
        // …but a decayed gaussian passes.
        let g = GridFunction::new(
            zg,
            zg.nodes()
                .iter()
                .map(|&z| C64::new((-0.1 * z * z).exp(), 0.0))
                .collect(),
        )
        .unwrap();
        assert!(ops.hilbert_checked(&g, tol::CAUCHY_EDGE_FLOOR).is_ok());
    }
}

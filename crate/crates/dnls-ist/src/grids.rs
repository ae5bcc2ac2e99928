//! Grids, sampled potentials, profiles and norms.
//!
//! Both grids are uniform and *open* (FFT-style): they include the left
//! endpoint, exclude the right one, and contain the origin as an exact node.
//! The spatial grid discretizes `[−L, L)` with `Nx` points; the spectral grid
//! discretizes `[−Z, Z)` in the squared spectral variable `z` with `Nz`
//! points. Even point counts place the origin at index `N/2` exactly, which
//! the scattering assembly (special-cased `z = 0` node) and the overlap
//! gluing rely on.

use crate::error::{Error, Result};
use crate::{fourier, C64};
use serde::{Deserialize, Serialize};

/// Uniform open spatial grid on `[−L, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    /// Half-width `L` of the symmetric domain.
    pub half_width: f64,
    /// Number of nodes `Nx` (even, ≥ 8).
    pub point_count: usize,
}

impl SpatialGrid {
    /// Node spacing `dx = 2L/Nx`.
    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.point_count as f64
    }

    /// Node `x_j = −L + j·dx`.
    pub fn node(&self, j: usize) -> f64 {
        -self.half_width + self.dx() * j as f64
    }

    /// All nodes in order.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.point_count).map(|j| self.node(j)).collect()
    }

    /// Index of the origin node (`x = 0` exactly).
    pub fn zero_index(&self) -> usize {
        self.point_count / 2
    }
}

/// Uniform open spectral grid on `[−Z, Z)` in `z = λ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    /// Half-width `Z`.
    pub half_width: f64,
    /// Number of nodes `Nz` (even, ≥ 8).
    pub point_count: usize,
}

impl SpectralGrid {
    /// Node spacing `dz = 2Z/Nz`.
    pub fn dz(&self) -> f64 {
        2.0 * self.half_width / self.point_count as f64
    }

    /// Node `z_j = −Z + j·dz`.
    pub fn node(&self, j: usize) -> f64 {
        -self.half_width + self.dz() * j as f64
    }

    /// All nodes in order.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.point_count).map(|j| self.node(j)).collect()
    }

    /// Index of the origin node (`z = 0` exactly).
    pub fn zero_index(&self) -> usize {
        self.point_count / 2
    }
}

fn check_axis(name: &str, half_width: f64, count: usize) -> Result<()> {
    if !(half_width.is_finite() && half_width > 0.0) {
        return Err(Error::InvalidGrid(format!(
            "{name} half-width must be positive and finite, got {half_width}"
        )));
    }
    if count < 8 || count % 2 != 0 {
        return Err(Error::InvalidGrid(format!(
            "{name} point count must be even and ≥ 8, got {count}"
        )));
    }
    Ok(())
}

/// Build the spatial/spectral grid pair, validating shape invariants.
pub fn make_grids(l: f64, nx: usize, z: f64, nz: usize) -> Result<(SpatialGrid, SpectralGrid)> {
    check_axis("spatial", l, nx)?;
    check_axis("spectral", z, nz)?;
    Ok((
        SpatialGrid {
            half_width: l,
            point_count: nx,
        },
        SpectralGrid {
            half_width: z,
            point_count: nz,
        },
    ))
}

/// Analytic initial-data profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// Identically zero (useful for degenerate-path tests).
    Zero,
    /// `A·exp(−((x−c)/w)² + i·q·(x−c)²)` — a (possibly chirped) gaussian.
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: f64,
        #[serde(default)]
        chirp: f64,
    },
    /// `A·sech(x/w)`.
    Sech { amplitude: f64, width: f64 },
}

impl Profile {
    /// Profile value at `x`.
    pub fn value(&self, x: f64) -> C64 {
        match *self {
            Profile::Zero => C64::new(0.0, 0.0),
            Profile::Gaussian {
                amplitude,
                width,
                center,
                chirp,
            } => {
                let s = x - center;
                let phase = C64::new(-(s / width).powi(2), chirp * s * s);
                amplitude * phase.exp()
            }
            Profile::Sech { amplitude, width } => C64::new(amplitude / (x / width).cosh(), 0.0),
        }
    }

    /// Analytic derivative at `x`.
    pub fn derivative(&self, x: f64) -> C64 {
        match *self {
            Profile::Zero => C64::new(0.0, 0.0),
            Profile::Gaussian {
                amplitude: _,
                width,
                center,
                chirp,
            } => {
                let s = x - center;
                let factor = C64::new(-2.0 * s / (width * width), 2.0 * chirp * s);
                factor * self.value(x)
            }
            Profile::Sech { amplitude, width } => {
                let t = (x / width).tanh();
                C64::new(-amplitude * t / ((x / width).cosh() * width), 0.0)
            }
        }
    }
}

/// A potential sampled on a [`SpatialGrid`] together with its derivative.
#[derive(Debug, Clone)]
pub struct SampledPotential {
    /// The grid the samples live on.
    pub grid: SpatialGrid,
    /// `u(x_j)`.
    pub values: Vec<C64>,
    /// `∂ₓu(x_j)` — analytic for closed-form profiles, spectral for raw
    /// samples.
    pub derivative: Vec<C64>,
}

impl SampledPotential {
    /// `|u(x_j)|²` as a real vector (used by phases and conserved
    /// quantities).
    pub fn abs2(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Periodic-trapezoid integral `dx·Σ f_j` of a real sample vector on the
    /// same grid.
    pub fn integrate_real(&self, f: &[f64]) -> f64 {
        f.iter().sum::<f64>() * self.grid.dx()
    }
}

fn check_edges(values: &[C64], edge_floor: f64) -> Result<()> {
    let first = values.first().map(|v| v.norm()).unwrap_or(0.0);
    let last = values.last().map(|v| v.norm()).unwrap_or(0.0);
    let worst = first.max(last);
    if worst >= edge_floor {
        return Err(Error::InvalidInput(format!(
            "potential does not decay at the grid edges: |u(edge)| = {worst:.3e} ≥ floor {edge_floor:.3e}; \
             enlarge the domain or loosen the edge floor"
        )));
    }
    Ok(())
}

/// Sample an analytic profile on a grid, enforcing the edge-decay floor.
pub fn sample_potential(
    profile: &Profile,
    grid: &SpatialGrid,
    edge_floor: f64,
) -> Result<SampledPotential> {
    let values: Vec<C64> = grid.nodes().iter().map(|&x| profile.value(x)).collect();
    check_edges(&values, edge_floor)?;
    let derivative: Vec<C64> = grid.nodes().iter().map(|&x| profile.derivative(x)).collect();
    Ok(SampledPotential {
        grid: *grid,
        values,
        derivative,
    })
}

/// Wrap raw samples (e.g. read from a file) as a potential; the derivative is
/// computed spectrally.
pub fn potential_from_samples(
    grid: &SpatialGrid,
    values: Vec<C64>,
    edge_floor: f64,
) -> Result<SampledPotential> {
    if values.len() != grid.point_count {
        return Err(Error::InvalidInput(format!(
            "sample count {} does not match grid point count {}",
            values.len(),
            grid.point_count
        )));
    }
    if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::InvalidInput(
            "samples contain non-finite values".into(),
        ));
    }
    check_edges(&values, edge_floor)?;
    let derivative = fourier::spectral_derivative(&values, grid.half_width);
    Ok(SampledPotential {
        grid: *grid,
        values,
        derivative,
    })
}

/// The norm bundle attached to a sampled potential.
///
/// `l2_weighted` is `‖⟨x⟩u‖_{L²}` with `⟨x⟩ = (1+x²)^{1/2}`; `h11` is the
/// weighted-Sobolev norm `(‖⟨x⟩u‖² + ‖⟨x⟩∂ₓu‖²)^{1/2}`; `dxl1` is
/// `‖∂ₓu‖_{L¹}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBundle {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub linf: f64,
    pub l2_weighted: f64,
    pub h11: f64,
    pub dxl1: f64,
}

/// Compute the full norm bundle by periodic-trapezoid quadrature.
pub fn norms(u: &SampledPotential) -> NormBundle {
    let dx = u.grid.dx();
    let mut l1 = 0.0;
    let mut l2sq = 0.0;
    let mut l3cu = 0.0;
    let mut linf: f64 = 0.0;
    let mut w2sq = 0.0;
    let mut wd2sq = 0.0;
    let mut dxl1 = 0.0;
    for (j, (v, d)) in u.values.iter().zip(&u.derivative).enumerate() {
        let x = u.grid.node(j);
        let m = v.norm();
        let w = 1.0 + x * x;
        l1 += m;
        l2sq += m * m;
        l3cu += m * m * m;
        linf = linf.max(m);
        w2sq += w * m * m;
        wd2sq += w * d.norm_sqr();
        dxl1 += d.norm();
    }
    NormBundle {
        l1: l1 * dx,
        l2: (l2sq * dx).sqrt(),
        l3: (l3cu * dx).cbrt(),
        linf,
        l2_weighted: (w2sq * dx).sqrt(),
        h11: ((w2sq + wd2sq) * dx).sqrt(),
        dxl1: dxl1 * dx,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn production_grid() -> SpatialGrid {
        make_grids(20.0, 1024, 40.0, 2048).unwrap().0
    }

    #[test]
    fn grids_contain_origin_and_tile_the_domain() {
        let (xg, zg) = make_grids(20.0, 1024, 40.0, 2048).unwrap();
        assert_eq!(xg.node(xg.zero_index()), 0.0);
        assert_eq!(zg.node(zg.zero_index()), 0.0);
        assert!((xg.dx() * xg.point_count as f64 - 2.0 * xg.half_width).abs() < 1e-14);
        // Open grid: last node is one spacing short of +L.
        let last = xg.node(xg.point_count - 1);
        assert!((last - (xg.half_width - xg.dx())).abs() < 1e-12);
    }

    #[test]
    fn bad_grids_are_rejected() {
        assert!(make_grids(0.0, 1024, 40.0, 2048).is_err());
        assert!(make_grids(20.0, 7, 40.0, 2048).is_err());
        assert!(make_grids(20.0, 1024, 40.0, 1001).is_err());
        assert!(make_grids(-3.0, 1024, 40.0, 2048).is_err());
    }

    #[test]
    fn gaussian_profile_samples_and_decays() {
        let g = production_grid();
        let p = Profile::Gaussian {
            amplitude: 0.3,
            width: 1.0,
            center: 0.0,
            chirp: 0.0,
        };
        let u = sample_potential(&p, &g, 1e-10).unwrap();
        assert_eq!(u.values.len(), 1024);
        let mid = u.values[g.zero_index()];
        assert!((mid.re - 0.3).abs() < 1e-15 && mid.im == 0.0);
        // Analytic vs spectral derivative agree to spectral accuracy.
        let spect = fourier::spectral_derivative(&u.values, g.half_width);
        let worst = u
            .derivative
            .iter()
            .zip(&spect)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-10, "derivative mismatch {worst:.3e}");
    }

    #[test]
    fn sech_on_small_domain_fails_edge_floor() {
        let (g, _) = make_grids(2.0, 64, 40.0, 2048).unwrap();
        let p = Profile::Sech {
            amplitude: 1.0,
            width: 1.0,
        };
        // sech(2) ≈ 0.266 ≫ 1e-8: must be rejected.
        let err = sample_potential(&p, &g, 1e-8).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn chirped_gaussian_matches_closed_form() {
        let g = production_grid();
        let p = Profile::Gaussian {
            amplitude: 0.2,
            width: 1.0,
            center: 0.0,
            chirp: 0.5,
        };
        let u = sample_potential(&p, &g, 1e-10).unwrap();
        let x = g.node(700);
        let expect = 0.2 * C64::new(-x * x, 0.5 * x * x).exp();
        assert!((u.values[700] - expect).norm() < 1e-15);
    }

    #[test]
    fn norm_homogeneity_and_gaussian_values() {
        let g = production_grid();
        let p = Profile::Gaussian {
            amplitude: 0.3,
            width: 1.0,
            center: 0.0,
            chirp: 0.0,
        };
        let u = sample_potential(&p, &g, 1e-10).unwrap();
        let n = norms(&u);
        // ‖u‖₂² = 0.09·√(π/2).
        let l2sq_exact = 0.09 * (std::f64::consts::PI / 2.0).sqrt();
        assert!((n.l2 * n.l2 - l2sq_exact).abs() < 1e-12, "l2² {}", n.l2 * n.l2);
        // ‖u‖₁ = 0.3·√π.
        assert!((n.l1 - 0.3 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!((n.linf - 0.3).abs() < 1e-15);
        // Homogeneity: scaling the samples scales every norm linearly.
        for &c in &[0.5, 2.0, 7.5] {
            let scaled = SampledPotential {
                grid: u.grid,
                values: u.values.iter().map(|v| v * c).collect(),
                derivative: u.derivative.iter().map(|v| v * c).collect(),
            };
            let ns = norms(&scaled);
            for (a, b) in [
                (ns.l1, n.l1),
                (ns.l2, n.l2),
                (ns.l3, n.l3),
                (ns.linf, n.linf),
                (ns.l2_weighted, n.l2_weighted),
                (ns.h11, n.h11),
                (ns.dxl1, n.dxl1),
            ] {
                assert!((a - c * b).abs() <= 1e-12 * a.max(1.0), "{a} vs {}", c * b);
            }
        }
        // Interpolation inequality ‖u‖₂² ≤ ‖u‖₁·‖u‖_∞.
        assert!(n.l2 * n.l2 <= n.l1 * n.linf * (1.0 + 1e-14));
    }

    #[test]
    fn raw_samples_require_matching_length_and_decay() {
        let g = production_grid();
        let short = vec![C64::new(0.0, 0.0); 12];
        assert!(potential_from_samples(&g, short, 1e-10).is_err());
        let constant = vec![C64::new(0.5, 0.0); g.point_count];
        assert!(potential_from_samples(&g, constant, 1e-10).is_err());
        let p = Profile::Gaussian {
            amplitude: 0.3,
            width: 1.0,
            center: 0.0,
            chirp: 0.0,
        };
        let vals: Vec<C64> = g.nodes().iter().map(|&x| p.value(x)).collect();
        let u = potential_from_samples(&g, vals, 1e-10).unwrap();
        // Spectral derivative should track the analytic one closely.
        let worst = u
            .derivative
            .iter()
            .enumerate()
            .map(|(j, d)| (d - p.derivative(g.node(j))).norm())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-10, "{worst:.3e}");
    }
}

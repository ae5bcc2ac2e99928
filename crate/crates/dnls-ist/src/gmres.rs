//! Matrix-free restarted GMRES for complex linear systems.
//!
//! Used as the robust fallback for the Riemann–Hilbert singular-integral
//! systems when the Neumann fixed point is not contractive. The operator is
//! abstract (each application costs two FFT-multiplier sweeps in the RH
//! case); the solver is the textbook restarted GMRES with modified
//! Gram–Schmidt Arnoldi and complex Givens rotations on the Hessenberg
//! column, tracking the residual norm for free.

use crate::error::{Error, Result};
use crate::C64;

/// Abstract complex linear operator.
pub trait LinearOperator: Sync {
    /// Dimension of the (square) operator.
    fn dim(&self) -> usize;
    /// `out = A·x`.
    fn apply(&self, x: &[C64], out: &mut [C64]);
}

/// Convergence report for one solve.
#[derive(Debug, Clone, Copy)]
pub struct GmresStats {
    /// Total inner iterations (operator applications minus the initial one).
    pub iterations: usize,
    /// Final relative residual `‖b − Ax‖/‖b‖`.
    pub relative_residual: f64,
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    // Hermitian inner product ⟨a, b⟩ = Σ conj(a)·b.
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Solve `A x = b` to relative residual `tol`.
///
/// `restart` is the Krylov subspace size per outer cycle; `max_outer` bounds
/// the number of cycles. Returns the solution and stats, or a solver-failure
/// error if the residual never reaches `tol`.
pub fn gmres(
    op: &dyn LinearOperator,
    b: &[C64],
    x0: Option<&[C64]>,
    tol: f64,
    restart: usize,
    max_outer: usize,
) -> Result<(Vec<C64>, GmresStats)> {
    let n = op.dim();
    assert_eq!(b.len(), n, "rhs length mismatch");
    let b_norm = norm(b);
    let mut x = match x0 {
        Some(v) => {
            assert_eq!(v.len(), n);
            v.to_vec()
        }
        None => vec![C64::new(0.0, 0.0); n],
    };
    if b_norm == 0.0 {
        return Ok((
            vec![C64::new(0.0, 0.0); n],
            GmresStats {
                iterations: 0,
                relative_residual: 0.0,
            },
        ));
    }

    let mut total_iters = 0usize;
    let mut scratch = vec![C64::new(0.0, 0.0); n];
    for _outer in 0..max_outer {
        // r = b − A x
        op.apply(&x, &mut scratch);
        let mut r: Vec<C64> = b.iter().zip(&scratch).map(|(bb, ax)| bb - ax).collect();
        let r_norm = norm(&r);
        if r_norm / b_norm < tol {
            return Ok((
                x,
                GmresStats {
                    iterations: total_iters,
                    relative_residual: r_norm / b_norm,
                },
            ));
        }
        for v in r.iter_mut() {
            *v /= r_norm;
        }
        let mut basis: Vec<Vec<C64>> = vec![r];
        // Hessenberg columns after Givens reduction (upper triangular R).
        let mut rcols: Vec<Vec<C64>> = Vec::with_capacity(restart);
        let mut cs: Vec<f64> = Vec::with_capacity(restart);
        let mut sn: Vec<C64> = Vec::with_capacity(restart);
        let mut g: Vec<C64> = vec![C64::new(0.0, 0.0); restart + 1];
        g[0] = C64::new(r_norm, 0.0);
        let mut k_used = 0usize;
        let mut converged = false;

        for k in 0..restart {
            total_iters += 1;
            op.apply(&basis[k], &mut scratch);
            let mut w = scratch.clone();
            let mut h = vec![C64::new(0.0, 0.0); k + 2];
            for (i, vi) in basis.iter().enumerate() {
                let hik = dot(vi, &w);
                h[i] = hik;
                for (wv, bv) in w.iter_mut().zip(vi) {
                    *wv -= hik * bv;
                }
            }
            let h_next = norm(&w);
            h[k + 1] = C64::new(h_next, 0.0);
            // Apply accumulated rotations to the new column.
            for i in 0..k {
                let t = cs[i] * h[i] + sn[i] * h[i + 1];
                h[i + 1] = -sn[i].conj() * h[i] + cs[i] * h[i + 1];
                h[i] = t;
            }
            // New rotation eliminating h[k+1].
            let (c, s) = {
                let a = h[k];
                let bb = h[k + 1];
                let an = a.norm();
                let bn = bb.norm();
                if bn == 0.0 {
                    (1.0, C64::new(0.0, 0.0))
                } else if an == 0.0 {
                    (0.0, bb.conj() / bn)
                } else {
                    let t = (an * an + bn * bn).sqrt();
                    (an / t, (a / an) * bb.conj() / t)
                }
            };
            let hk = c * h[k] + s * h[k + 1];
            h[k] = hk;
            h[k + 1] = C64::new(0.0, 0.0);
            let gk = g[k];
            g[k] = c * gk + s * g[k + 1];
            g[k + 1] = -s.conj() * gk + c * g[k + 1];
            cs.push(c);
            sn.push(s);
            rcols.push(h[..=k].to_vec());
            k_used = k + 1;

            let rel = g[k + 1].norm() / b_norm;
            if rel < tol {
                converged = true;
                break;
            }
            if h_next == 0.0 {
                // Lucky breakdown: exact solution in the current subspace.
                converged = true;
                break;
            }
            for v in w.iter_mut() {
                *v /= h_next;
            }
            basis.push(w);
        }

        // Back-substitute R y = g and update x.
        let mut y = vec![C64::new(0.0, 0.0); k_used];
        for i in (0..k_used).rev() {
            let mut acc = g[i];
            for j in i + 1..k_used {
                acc -= rcols[j][i] * y[j];
            }
            y[i] = acc / rcols[i][i];
        }
        for (i, yi) in y.iter().enumerate() {
            for (xv, bv) in x.iter_mut().zip(&basis[i]) {
                *xv += yi * bv;
            }
        }

        if converged {
            op.apply(&x, &mut scratch);
            let res = b
                .iter()
                .zip(&scratch)
                .map(|(bb, ax)| (bb - ax).norm_sqr())
                .sum::<f64>()
                .sqrt();
            return Ok((
                x,
                GmresStats {
                    iterations: total_iters,
                    relative_residual: res / b_norm,
                },
            ));
        }
    }
    Err(Error::SolverFailure(format!(
        "GMRES did not converge within {max_outer} restart cycles of length {restart}"
    )))
}

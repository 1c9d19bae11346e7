//! The ground-state functional `F(phi)`, the top of the spectrum of
//! `H = d^2/dx^2 / 2 + phi` with Dirichlet walls, and the sharp
//! Gagliardo–Nirenberg bound `F(phi) <= (3/4)^{2/3} ||phi||^{4/3} / 2`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{l2_norm_space, Potential, SpaceGrid};
use crate::rearrange::is_symmetric_decreasing;
use crate::tridiag;

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub value: f64,
    /// Nonnegative, unit `L^2` norm.
    pub eigenfunction: Potential,
}

fn same_grid(a: &Potential, b: &Potential) -> Result<()> {
    if a.grid() != b.grid() {
        return Err(Error::Grid("potentials live on different grids".into()));
    }
    Ok(())
}

/// `(int phi g^2 - (1/2) int g'^2) / ||g||^2`.
///
/// The kinetic term is the forward-difference energy `sum (g_{i+1} - g_i)^2 / dx`,
/// which is exactly the quadratic form of the matrix used by
/// [`ground_state`], so the quotient of the computed eigenfunction equals the
/// computed eigenvalue.
pub fn rayleigh(g: &Potential, phi: &Potential) -> Result<f64> {
    same_grid(g, phi)?;
    let grid = g.grid();
    let v = g.values();
    let norm2 = grid.integrate(&v.iter().map(|a| a * a).collect::<Vec<_>>());
    if !(norm2 > 0.0) {
        return Err(Error::domain("rayleigh quotient of the zero function"));
    }
    let potential = grid.integrate(&v.iter().zip(phi.values()).map(|(a, p)| p * a * a).collect::<Vec<_>>());
    let kinetic: f64 = v.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / grid.dx();
    Ok((potential - 0.5 * kinetic) / norm2)
}

/// Top eigenpair of the tridiagonal discretization on interior nodes
/// (diagonal `phi_i - 1/dx^2`, off-diagonal `1/(2 dx^2)`).
///
/// The eigenvalue comes from Sturm bisection and the eigenvector from inverse
/// iteration shifted just above it, which cannot lock onto a lower level.
pub fn ground_state(phi: &Potential) -> Result<GroundState> {
    let grid = *phi.grid();
    let n = grid.n_points();
    let dx2 = grid.dx() * grid.dx();
    let vals = phi.values();
    let diag: Vec<f64> = vals[1..n - 1].iter().map(|p| p - 1.0 / dx2).collect();
    let off = 0.5 / dx2;
    let value = tridiag::largest_eigenvalue(&diag, off);
    let (v, residual) = tridiag::eigenvector(&diag, off, value, 50);
    let scale = 1.0 / dx2 + vals.iter().fold(0.0f64, |a, p| a.max(p.abs()));
    if !(residual <= 1e-8 * scale) {
        return Err(Error::Eigen(format!(
            "inverse iteration residual {residual:e} at eigenvalue {value}"
        )));
    }
    let mut g = vec![0.0; n];
    for (dst, src) in g[1..n - 1].iter_mut().zip(&v) {
        // Perron vector: negative entries are round-off in the far tail.
        *dst = src.max(0.0);
    }
    let norm = (g.iter().map(|a| a * a).sum::<f64>() * grid.dx()).sqrt();
    g.iter_mut().for_each(|a| *a /= norm);
    Ok(GroundState {
        value,
        eigenfunction: Potential::new(grid, g)?,
    })
}

/// `(1/2) (3/4)^{2/3} ||phi||_2^{4/3}`.
pub fn potbd_bound(phi: &Potential) -> f64 {
    0.5 * 0.75f64.powf(2.0 / 3.0) * l2_norm_space(phi).powf(4.0 / 3.0)
}

/// Central-difference derivative with one-sided stencils at the walls.
fn derivative(grid: &SpaceGrid, v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let dx = grid.dx();
    (0..n)
        .map(|i| match i {
            0 => (v[1] - v[0]) / dx,
            i if i == n - 1 => (v[n - 1] - v[n - 2]) / dx,
            i => (v[i + 1] - v[i - 1]) / (2.0 * dx),
        })
        .collect()
}

/// `||g||_4 / (||g'||_2^{1/4} ||g||_2^{3/4})`; at most `3^{-1/8}` in the
/// continuum, with equality for `a sech(b (x - v))`.
pub fn gns_ratio(g: &Potential) -> Result<f64> {
    let grid = g.grid();
    let v = g.values();
    let l4 = grid.integrate(&v.iter().map(|a| a.powi(4)).collect::<Vec<_>>()).powf(0.25);
    let l2 = l2_norm_space(g);
    let d = derivative(grid, v);
    let dl2 = grid.integrate(&d.iter().map(|a| a * a).collect::<Vec<_>>()).sqrt();
    if !(l2 > 0.0 && dl2 > 0.0) {
        return Err(Error::domain("gns ratio needs a nonzero, nonconstant function"));
    }
    Ok(l4 / (dl2.powf(0.25) * l2.powf(0.75)))
}

/// `sech^2(x)`.
pub fn rho_star(grid: SpaceGrid) -> Potential {
    Potential::from_fn(grid, sech2)
}

/// `(3/4)^{2/3} sech^2((3/4)^{1/3} x)`, the unit-norm optimizer.
pub fn r_star(grid: SpaceGrid) -> Potential {
    let a = 0.75f64.cbrt();
    Potential::from_fn(grid, |x| a * a * sech2(a * x))
}

pub(crate) fn sech2(x: f64) -> f64 {
    let c = x.cosh();
    1.0 / (c * c)
}

/// Cubic (four-point Lagrange) interpolation, zero outside the grid.
fn interpolate_cubic(grid: &SpaceGrid, v: &[f64], x: f64) -> f64 {
    let n = v.len();
    let u = (x + grid.half_width()) / grid.dx();
    if !(u >= 0.0 && u <= (n - 1) as f64) {
        return 0.0;
    }
    let i = (u.floor() as usize).clamp(1, n.saturating_sub(3).max(1));
    if n < 4 {
        return grid.interpolate(v, x);
    }
    let s = u - i as f64;
    let (a, b, c, d) = (v[i - 1], v[i], v[i + 1], v[i + 2]);
    -s * (s - 1.0) * (s - 2.0) / 6.0 * a + (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0 * b - (s + 1.0) * s * (s - 2.0) / 2.0 * c
        + (s + 1.0) * s * (s - 1.0) / 6.0 * d
}

/// `alpha^2 phi(alpha x)` on the same grid with `alpha = ||phi||^{-2/3}`,
/// which has unit norm and `F` scaled by `alpha^2`.
pub fn normalize_rescale(phi: &Potential) -> Result<Potential> {
    let norm = l2_norm_space(phi);
    if !(norm > 0.0) {
        return Err(Error::domain("cannot normalize the zero potential"));
    }
    let alpha = norm.powf(-2.0 / 3.0);
    let grid = *phi.grid();
    Ok(Potential::from_fn(grid, |x| {
        alpha * alpha * interpolate_cubic(&grid, phi.values(), alpha * x)
    }))
}

/// `|F(phi + d psi) - F(phi)| / (d ||psi||)` for each `d` (zero when
/// `psi = 0`).
pub fn lipschitz_probe(phi: &Potential, psi: &Potential, deltas: &[f64]) -> Result<Vec<f64>> {
    same_grid(phi, psi)?;
    let norm = l2_norm_space(psi);
    if norm == 0.0 {
        return Ok(vec![0.0; deltas.len()]);
    }
    let base = ground_state(phi)?.value;
    deltas
        .iter()
        .map(|&d| {
            if d == 0.0 {
                return Err(Error::domain("lipschitz probe needs nonzero steps"));
            }
            let moved = Potential::new(*phi.grid(), phi.values().iter().zip(psi.values()).map(|(a, b)| a + d * b).collect())?;
            Ok((ground_state(&moved)?.value - base).abs() / (d.abs() * norm))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stability {
    /// `1 - F(phi) / bound(phi)`.
    pub defect: f64,
    /// `||alpha^2 phi(alpha .) - r_star||_2`.
    pub distance: f64,
}

/// Measures how far a symmetric decreasing `phi` is from equality in the
/// sharp bound, and how far its normalized rescaling is from `r_star`.
pub fn stability_probe(phi: &Potential) -> Result<Stability> {
    let flag = is_symmetric_decreasing(phi);
    if !flag.is_sd {
        return Err(Error::domain(format!(
            "stability probe needs a symmetric decreasing potential (violation {:e})",
            flag.max_violation
        )));
    }
    if phi.values().iter().any(|&v| v < 0.0) {
        return Err(Error::domain("stability probe needs a nonnegative potential"));
    }
    let bound = potbd_bound(phi);
    if !(bound > 0.0) {
        return Err(Error::domain("stability probe needs a nonzero potential"));
    }
    let defect = 1.0 - ground_state(phi)?.value / bound;
    let scaled = normalize_rescale(phi)?;
    let r = r_star(*phi.grid());
    let diff = Potential::new(*phi.grid(), scaled.values().iter().zip(r.values()).map(|(a, b)| a - b).collect())?;
    Ok(Stability {
        defect,
        distance: l2_norm_space(&diff),
    })
}

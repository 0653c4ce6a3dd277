//! Weighted-symmetric finite-difference approximation of the reduced
//! radial-angular operator on a truncated `(r, θ)` strip, plus the
//! positivity and mass-bound checks built on top of it.
//!
//! The operator `A_h = W⁻¹K` (K the flux-form stiffness+potential matrix,
//! W the diagonal `Σ̄ sinθ · dr·dθ` quadrature weights) is stored in its
//! symmetrized similarity transform `S = W^{-1/2} K W^{-1/2}`, which has
//! the same spectrum and keeps every solve real-symmetric banded.

use crate::banded::SymBanded;
use crate::error::{Error, Result};
use crate::geometry::{
    b_coefficient, mu_bounds, potential_vs, scalars, special_s, KerrParams, ModeSpec, Point,
};
use crate::lanczos::smallest_eigenvalue;
use crate::legendre::{assoc_legendre, assoc_legendre_dtheta};
use nalgebra::DVector;
use std::f64::consts::PI;

/// Uniform tensor grid of interior nodes, zero-Dirichlet on all four sides.
///
/// `r_min = r_+ + eps_h`; nodes sit at `r_min + (i+1)·dr` and `(j+1)·dθ`,
/// ordered θ-fastest, so the symmetrized operator has bandwidth `ntheta`.
#[derive(Debug, Clone, Copy)]
pub struct Grid {
    pub r_min: f64,
    pub r_max: f64,
    pub nr: usize,
    pub ntheta: usize,
    pub dr: f64,
    pub dtheta: f64,
}

/// Default horizon offset, in units of M.
pub const DEFAULT_EPS_H: f64 = 1e-3;
/// Default outer cutoff, in units of M.
pub const DEFAULT_R_MAX: f64 = 20.0;

impl Grid {
    pub fn new(p: &KerrParams, eps_h: f64, r_max: f64, nr: usize, ntheta: usize) -> Result<Self> {
        if !(eps_h > 0.0) {
            return Err(Error::InvalidParameter(format!("eps_h must be > 0, got {eps_h}")));
        }
        let r_min = p.r_plus + eps_h;
        if !(r_max > r_min) {
            return Err(Error::InvalidParameter(format!(
                "r_max = {r_max} must exceed r_min = {r_min}"
            )));
        }
        if nr < 3 || ntheta < 3 {
            return Err(Error::InvalidParameter(format!(
                "need Nr, Ntheta >= 3, got {nr}x{ntheta}"
            )));
        }
        Ok(Self {
            r_min,
            r_max,
            nr,
            ntheta,
            dr: (r_max - r_min) / (nr as f64 + 1.0),
            dtheta: PI / (ntheta as f64 + 1.0),
        })
    }

    /// `eps_h = 1e-3·M`, `r_max = 20·M`.
    pub fn standard(p: &KerrParams, nr: usize, ntheta: usize) -> Result<Self> {
        Self::new(p, DEFAULT_EPS_H * p.mass, DEFAULT_R_MAX * p.mass, nr, ntheta)
    }

    #[inline]
    pub fn r_node(&self, i: usize) -> f64 {
        self.r_min + (i as f64 + 1.0) * self.dr
    }

    #[inline]
    pub fn theta_node(&self, j: usize) -> f64 {
        (j as f64 + 1.0) * self.dtheta
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ntheta + j
    }

    pub fn n(&self) -> usize {
        self.nr * self.ntheta
    }
}

/// Assembled operator pair `(A_h, B_h)` with its quadrature weights.
#[derive(Debug, Clone)]
pub struct DiscretizedSystem {
    pub grid: Grid,
    pub params: KerrParams,
    pub mode: ModeSpec,
    /// `S = W^{-1/2} K W^{-1/2}`, real symmetric, spectrum of `A_h`.
    pub sym: SymBanded,
    /// Diagonal of `B_h` (node values of b); commutes with W.
    pub b_diag: DVector<f64>,
    /// Diagonal of W: `Σ̄ sinθ · dr·dθ` per node.
    pub weights: DVector<f64>,
    /// ∞-norm of S; tolerance scale for the positivity checks.
    pub scale: f64,
}

/// Outcome of a shifted-positivity check.
#[derive(Debug, Clone, Copy)]
pub struct PositivityReport {
    pub s_used: f64,
    pub mu_used: f64,
    pub min_eigenvalue: f64,
    pub tol_pos: f64,
    pub passed: bool,
    pub nr: usize,
    pub ntheta: usize,
}

struct NodeData {
    /// `sinθ·V` with `V = −m²a²/Δ + m²/sin²θ + μ²Σ`.
    potential: f64,
    weight: f64,
    b: f64,
}

pub fn assemble(p: &KerrParams, mode: &ModeSpec, g: &Grid) -> Result<DiscretizedSystem> {
    let delta_at = |r: f64| r * r - 2.0 * p.mass * r + p.spin * p.spin;
    if delta_at(g.r_min) <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "grid touches the horizon: Delta(r_min) = {} <= 0",
            delta_at(g.r_min)
        )));
    }
    let n = g.n();
    let cell = g.dr * g.dtheta;
    let mf = mode.m as f64;
    let mu2 = mode.mu * mode.mu;

    let nodes: Vec<NodeData> = crate::par::map_range(n, |idx| {
        let (i, j) = (idx / g.ntheta, idx % g.ntheta);
        let q = Point { r: g.r_node(i), theta: g.theta_node(j) };
        let sc = scalars(p, &q);
        let sin_th = q.theta.sin();
        let v = -mf * mf * p.spin * p.spin / sc.delta
            + mf * mf / (sin_th * sin_th)
            + mu2 * sc.sigma;
        NodeData {
            potential: sin_th * v * cell,
            weight: sc.sigma_bar_1 * sin_th * cell,
            b: b_coefficient(p, mode.m, &q),
        }
    });

    if nodes.iter().any(|d| !d.potential.is_finite() || !d.weight.is_finite() || !d.b.is_finite())
    {
        return Err(Error::NonFinite("discretization coefficients".into()));
    }
    if nodes.iter().any(|d| d.weight <= 0.0) {
        return Err(Error::InvalidParameter("nonpositive quadrature weight".into()));
    }

    // Flux-form stiffness K: radial fluxes use Δ at half-nodes, angular
    // fluxes sinθ at half-nodes; Dirichlet ghosts add only to diagonals.
    let mut k = SymBanded::zeros(n, g.ntheta);
    for i in 0..g.nr {
        let r = g.r_node(i);
        let d_lo = delta_at(r - 0.5 * g.dr) / (g.dr * g.dr) * cell;
        let d_hi = delta_at(r + 0.5 * g.dr) / (g.dr * g.dr) * cell;
        for j in 0..g.ntheta {
            let idx = g.index(i, j);
            let theta = g.theta_node(j);
            let sin_th = theta.sin();
            let s_lo = (theta - 0.5 * g.dtheta).sin() / (g.dtheta * g.dtheta) * cell;
            let s_hi = (theta + 0.5 * g.dtheta).sin() / (g.dtheta * g.dtheta) * cell;

            k.add_at(idx, idx, sin_th * (d_lo + d_hi) + s_lo + s_hi + nodes[idx].potential);
            if i + 1 < g.nr {
                k.add_at(idx, g.index(i + 1, j), -sin_th * d_hi);
            }
            if j + 1 < g.ntheta {
                k.add_at(idx, idx + 1, -s_hi);
            }
        }
    }

    // Symmetrize: S = W^{-1/2} K W^{-1/2}.
    let mut sym = k;
    for d in 0..=sym.bw {
        for i in 0..sym.bands[d].len() {
            sym.bands[d][i] /= (nodes[i].weight * nodes[i + d].weight).sqrt();
        }
    }
    let scale = sym.norm_inf().max(1.0);
    Ok(DiscretizedSystem {
        grid: *g,
        params: *p,
        mode: *mode,
        sym,
        b_diag: DVector::from_iterator(n, nodes.iter().map(|d| d.b)),
        weights: DVector::from_iterator(n, nodes.iter().map(|d| d.weight)),
        scale,
    })
}

impl DiscretizedSystem {
    /// `S + s·B_h − s²·I` — B_h is diagonal, so the similarity transform
    /// that symmetrizes `A_h` leaves the shift untouched.
    pub fn shifted(&self, s: f64) -> SymBanded {
        let diag = DVector::from_iterator(
            self.b_diag.len(),
            self.b_diag.iter().map(|&b| s * b - s * s),
        );
        self.sym.with_diagonal_shift(Some(&diag), 0.0)
    }

    /// `S + ¼B_h²`.
    pub fn plus_quarter_b_squared(&self) -> SymBanded {
        let diag = DVector::from_iterator(
            self.b_diag.len(),
            self.b_diag.iter().map(|&b| 0.25 * b * b),
        );
        self.sym.with_diagonal_shift(Some(&diag), 0.0)
    }
}

/// Smallest eigenvalue of `A_h + s·B_h − s²` in the weighted inner product.
pub fn min_eigenvalue_shifted(sys: &DiscretizedSystem, s: f64) -> Result<f64> {
    Ok(smallest_eigenvalue(&sys.shifted(s))?.value)
}

/// Assemble at `μ = mu_new(p, m)`, shift by `s = m·a/(2Mr_+)`, and check
/// that the shifted operator is nonnegative up to `1e-8·scale`.
pub fn verify_mass_bound(p: &KerrParams, m: i64, g: &Grid) -> Result<PositivityReport> {
    let mu = mu_bounds(p, m).mu_new;
    let mode = ModeSpec::new(m, mu)?;
    let sys = assemble(p, &mode, g)?;
    let s = m as f64 * special_s(p);
    let min_eigenvalue = min_eigenvalue_shifted(&sys, s)?;
    let tol_pos = 1e-8 * sys.scale;
    Ok(PositivityReport {
        s_used: s,
        mu_used: mu,
        min_eigenvalue,
        tol_pos,
        passed: min_eigenvalue >= -tol_pos,
        nr: g.nr,
        ntheta: g.ntheta,
    })
}

/// W-weighted quadratic form of `A₀ + sB − s²` on the separable function
/// `f(r)·P_l^{|m|}(cos θ)`.
///
/// The radial derivative is a half-node difference of the sampled profile
/// (Dirichlet ghosts), the angular derivative of the Legendre factor is
/// analytic, and the zeroth-order coefficient is the shifted potential.
pub fn legendre_quadratic_form(
    p: &KerrParams,
    mode: &ModeSpec,
    g: &Grid,
    s: f64,
    f_radial: &[f64],
    l: u32,
) -> Result<f64> {
    let m_abs = mode.m.unsigned_abs() as u32;
    if l < m_abs {
        return Err(Error::InvalidParameter(format!(
            "Legendre degree l = {l} below azimuthal order |m| = {m_abs}"
        )));
    }
    if f_radial.len() != g.nr {
        return Err(Error::DimensionMismatch(format!(
            "radial profile has {} samples for an Nr = {} grid",
            f_radial.len(),
            g.nr
        )));
    }
    let delta_at = |r: f64| r * r - 2.0 * p.mass * r + p.spin * p.spin;
    let cell = g.dr * g.dtheta;
    let f_at = |i: isize| -> f64 {
        if i < 0 || i as usize >= g.nr {
            0.0
        } else {
            f_radial[i as usize]
        }
    };

    let theta_terms: Vec<(f64, f64, f64)> = (0..g.ntheta)
        .map(|j| {
            let theta = g.theta_node(j);
            let pl = assoc_legendre(l, m_abs, theta.cos());
            let dpl = assoc_legendre_dtheta(l, m_abs, theta);
            (theta, pl, dpl)
        })
        .collect();

    let mut q = 0.0;
    for j in 0..g.ntheta {
        let (theta, pl, dpl) = theta_terms[j];
        let sin_th = theta.sin();
        // Radial Dirichlet energy on half-node edges.
        for i in 0..=g.nr {
            let df = (f_at(i as isize) - f_at(i as isize - 1)) / g.dr;
            // Edge between node i−1 and node i sits at r_min + (i+1/2)·dr.
            let r_edge = g.r_min + (i as f64 + 0.5) * g.dr;
            q += sin_th * delta_at(r_edge) * (df * pl).powi(2) * cell;
        }
        for i in 0..g.nr {
            let fi = f_radial[i];
            let r = g.r_node(i);
            let qpt = Point { r, theta };
            let v = potential_vs(p, mode, s, &qpt);
            let m2 = (mode.m as f64).powi(2);
            let coeff = v.form1 + m2 / (sin_th * sin_th);
            q += sin_th * ((fi * dpl).powi(2) + coeff * (fi * pl).powi(2)) * cell;
        }
    }
    if !q.is_finite() {
        return Err(Error::NonFinite("quadratic form".into()));
    }
    Ok(q)
}

/// Smooth bump supported on `(lo, hi)`, zero outside; handy radial profile.
pub fn bump_profile(g: &Grid, lo: f64, hi: f64) -> Vec<f64> {
    (0..g.nr)
        .map(|i| {
            let x = (2.0 * g.r_node(i) - lo - hi) / (hi - lo);
            if x.abs() < 1.0 {
                (-1.0 / (1.0 - x * x)).exp()
            } else {
                0.0
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::mu_bounds;

    #[test]
    fn grid_invariants() {
        let p = KerrParams::new(1.0, 0.5).unwrap();
        let g = Grid::standard(&p, 10, 8).unwrap();
        assert!(g.r_min > p.r_plus);
        assert!(g.r_node(0) > g.r_min && g.r_node(9) < g.r_max);
        assert!(g.theta_node(0) > 0.0 && g.theta_node(7) < PI);
        assert!(Grid::standard(&p, 2, 8).is_err());
        assert!(Grid::new(&p, 0.0, 20.0, 10, 8).is_err());
        assert!(Grid::new(&p, 1e-3, 1.0, 10, 8).is_err());
    }

    #[test]
    fn schwarzschild_axisymmetric_is_positive() {
        let p = KerrParams::new(1.0, 0.0).unwrap();
        let mode = ModeSpec::new(0, 0.0).unwrap();
        let g = Grid::standard(&p, 20, 10).unwrap();
        let sys = assemble(&p, &mode, &g).unwrap();
        assert_eq!(sys.b_diag.amax(), 0.0);
        let min = min_eigenvalue_shifted(&sys, 0.0).unwrap();
        assert!(min >= -1e-10, "min eig {min}");
    }

    #[test]
    fn b_vanishes_for_m0_or_a0() {
        let g = Grid::standard(&KerrParams::new(1.0, 0.9).unwrap(), 8, 6).unwrap();
        let p = KerrParams::new(1.0, 0.9).unwrap();
        let sys = assemble(&p, &ModeSpec::new(0, 0.2).unwrap(), &g).unwrap();
        assert!(sys.b_diag.iter().all(|&b| b == 0.0));
        let p0 = KerrParams::new(1.0, 0.0).unwrap();
        let g0 = Grid::standard(&p0, 8, 6).unwrap();
        let sys = assemble(&p0, &ModeSpec::new(3, 0.2).unwrap(), &g0).unwrap();
        assert!(sys.b_diag.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn b_diag_sign_matches_ma() {
        let p = KerrParams::new(1.0, 0.7).unwrap();
        let g = Grid::standard(&p, 8, 6).unwrap();
        let pos = assemble(&p, &ModeSpec::new(2, 0.0).unwrap(), &g).unwrap();
        assert!(pos.b_diag.iter().all(|&b| b > 0.0));
        let neg = assemble(&p, &ModeSpec::new(-2, 0.0).unwrap(), &g).unwrap();
        assert!(neg.b_diag.iter().all(|&b| b < 0.0));
    }

    #[test]
    fn weighted_symmetry_against_direct_stencil() {
        // Apply A_h = W^{-1/2} S W^{1/2} to a delta and compare with the raw
        // (non-symmetrized) finite-difference stencil of the operator.
        let p = KerrParams::new(1.0, 0.5).unwrap();
        let mode = ModeSpec::new(1, 0.3).unwrap();
        let g = Grid::standard(&p, 9, 7).unwrap();
        let sys = assemble(&p, &mode, &g).unwrap();
        let s_dense = sys.sym.to_dense();
        let n = g.n();
        // W·A_h must be symmetric: W A_h = W^{1/2} S W^{1/2}.
        let mut wa = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                wa[(i, j)] = sys.weights[i].sqrt() * s_dense[(i, j)] * sys.weights[j].sqrt();
            }
        }
        let dev = (&wa - wa.transpose()).amax();
        assert!(dev <= 1e-10 * wa.amax());

        // Spot-check a diagonal entry of A_h against the stencil.
        let (i, j) = (4, 3);
        let idx = g.index(i, j);
        let a_ii = s_dense[(idx, idx)]; // diagonal untouched by similarity
        let r = g.r_node(i);
        let theta = g.theta_node(j);
        let q = Point { r, theta };
        let sc = scalars(&p, &q);
        let delta_at = |r: f64| r * r - 2.0 * p.mass * r + p.spin * p.spin;
        let mf = mode.m as f64;
        let v = -mf * mf * p.spin * p.spin / sc.delta
            + mf * mf / theta.sin().powi(2)
            + mode.mu * mode.mu * sc.sigma;
        let expected = ((delta_at(r - 0.5 * g.dr) + delta_at(r + 0.5 * g.dr)) / (g.dr * g.dr)
            + ((theta - 0.5 * g.dtheta).sin() + (theta + 0.5 * g.dtheta).sin())
                / (theta.sin() * g.dtheta * g.dtheta)
            + v)
            / sc.sigma_bar_1;
        assert!((a_ii - expected).abs() <= 1e-10 * expected.abs());
    }

    #[test]
    fn discrete_semibound_matches_alpha() {
        let p = KerrParams::new(1.0, 0.5).unwrap();
        let mode = ModeSpec::new(1, 0.0).unwrap();
        let g = Grid::standard(&p, 40, 20).unwrap();
        let sys = assemble(&p, &mode, &g).unwrap();
        let min = min_eigenvalue_shifted(&sys, 0.0).unwrap();
        let alpha = mu_bounds(&p, 1).alpha;
        assert!((alpha + 0.017949).abs() < 1e-5);
        assert!(min >= alpha - 1e-6, "min eig {min} vs alpha {alpha}");
    }

    #[test]
    fn quarter_b_squared_positivity() {
        let p = KerrParams::new(1.0, 0.9).unwrap();
        let mode = ModeSpec::new(2, 0.0).unwrap();
        let g = Grid::standard(&p, 30, 15).unwrap();
        let sys = assemble(&p, &mode, &g).unwrap();
        let min = smallest_eigenvalue(&sys.plus_quarter_b_squared()).unwrap().value;
        assert!(min >= -1e-8 * sys.scale, "min {min} scale {}", sys.scale);
    }

    #[test]
    fn grid_refinement_consistency() {
        let p = KerrParams::new(1.0, 0.5).unwrap();
        let mode = ModeSpec::new(0, 0.0).unwrap();
        let coarse = assemble(&p, &mode, &Grid::standard(&p, 40, 20).unwrap()).unwrap();
        let fine = assemble(&p, &mode, &Grid::standard(&p, 80, 40).unwrap()).unwrap();
        let e_c = min_eigenvalue_shifted(&coarse, 0.0).unwrap();
        let e_f = min_eigenvalue_shifted(&fine, 0.0).unwrap();
        assert!((e_c - e_f).abs() < 0.05 * e_c.abs(), "coarse {e_c} fine {e_f}");
    }

    #[test]
    fn lanczos_path_matches_dense_path() {
        let p = KerrParams::new(1.0, 0.5).unwrap();
        let mode = ModeSpec::new(1, 0.2).unwrap();
        // 30×15 = 450 forces the banded Lanczos path.
        let sys = assemble(&p, &mode, &Grid::standard(&p, 30, 15).unwrap()).unwrap();
        let lan = min_eigenvalue_shifted(&sys, 0.1).unwrap();
        let dense = sys
            .shifted(0.1)
            .to_dense()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert!((lan - dense).abs() <= 1e-7 * dense.abs().max(1.0), "lanczos {lan} dense {dense}");
    }

    #[test]
    fn mass_bound_verification() {
        let p = KerrParams::new(1.0, 0.5).unwrap();
        let g = Grid::standard(&p, 40, 20).unwrap();
        let rep = verify_mass_bound(&p, 1, &g).unwrap();
        assert!(rep.passed, "min eig {} tol {}", rep.min_eigenvalue, rep.tol_pos);
        assert!((rep.mu_used - 0.19284).abs() < 1e-5);
        let rep0 = verify_mass_bound(&p, 0, &g).unwrap();
        assert!(rep0.passed);
        assert_eq!(rep0.s_used, 0.0);
        assert_eq!(rep0.mu_used, 0.0);
    }

    #[test]
    fn legendre_form_examples() {
        let p = KerrParams::new(1.0, 0.5).unwrap();
        let g = Grid::standard(&p, 60, 30).unwrap();

        let zero = vec![0.0; g.nr];
        let mode = ModeSpec::new(1, 0.3).unwrap();
        assert_eq!(legendre_quadratic_form(&p, &mode, &g, 0.1, &zero, 1).unwrap(), 0.0);

        let bump = bump_profile(&g, 3.0, 6.0);
        let mu_new = mu_bounds(&p, 1).mu_new;
        let mode = ModeSpec::new(1, mu_new).unwrap();
        let s = special_s(&p);
        let q = legendre_quadratic_form(&p, &mode, &g, s, &bump, 1).unwrap();
        assert!(q >= -1e-6, "quadratic form {q}");

        let p0 = KerrParams::new(1.0, 0.0).unwrap();
        let g0 = Grid::standard(&p0, 60, 30).unwrap();
        let bump0 = bump_profile(&g0, 3.0, 6.0);
        let mode0 = ModeSpec::new(0, 0.0).unwrap();
        let q0 = legendre_quadratic_form(&p0, &mode0, &g0, 0.0, &bump0, 0).unwrap();
        assert!(q0 > 0.0);

        assert!(legendre_quadratic_form(&p, &ModeSpec::new(2, 0.0).unwrap(), &g, 0.0, &bump, 1)
            .is_err());
    }
}

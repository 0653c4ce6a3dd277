//! Closed-form Kerr geometry in Boyer-Lindquist coordinates.
//!
//! Everything here is an exact pointwise evaluation on the exterior strip
//! `Ω_s = (r_+, ∞) × (0, π)`: metric components, the scalars Δ, Σ, Σ̄, the
//! first-order coefficient `b` of the reduced Klein-Gordon equation, norms
//! of the Killing fields `∂_t + s ∂_φ`, region membership predicates and
//! the mass-bound thresholds. All functions are pure and safe to call from
//! parallel sweeps.

use crate::error::{Error, Result};
use rand::Rng;

/// Points closer than this to the horizon or the poles are rejected:
/// every formula below divides by Δ or sin²θ.
pub const DOMAIN_MARGIN: f64 = 1e-10;

/// Black-hole mass and spin with derived horizon radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KerrParams {
    pub mass: f64,
    pub spin: f64,
    pub r_plus: f64,
    pub r_minus: f64,
}

impl KerrParams {
    /// `mass > 0`, `0 ≤ spin ≤ mass`. The extremal case `spin == mass` is
    /// permitted; horizon radii coincide there.
    pub fn new(mass: f64, spin: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::InvalidParameter(format!("mass must be > 0, got {mass}")));
        }
        if !(0.0..=mass).contains(&spin) {
            return Err(Error::InvalidParameter(format!(
                "spin must satisfy 0 <= a <= M, got a={spin}, M={mass}"
            )));
        }
        let root = (mass * mass - spin * spin).sqrt();
        Ok(Self { mass, spin, r_plus: mass + root, r_minus: mass - root })
    }
}

/// Azimuthal mode number and field mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    pub m: i64,
    pub mu: f64,
}

impl ModeSpec {
    pub fn new(m: i64, mu: f64) -> Result<Self> {
        if !(mu >= 0.0) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("field mass must be >= 0, got {mu}")));
        }
        Ok(Self { m, mu })
    }
}

/// A point strictly inside `Ω_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub r: f64,
    pub theta: f64,
}

impl Point {
    /// Rejects points within [`DOMAIN_MARGIN`] of the horizon or the poles.
    pub fn new(p: &KerrParams, r: f64, theta: f64) -> Result<Self> {
        if !r.is_finite() || r - p.r_plus <= DOMAIN_MARGIN {
            return Err(Error::OutsideDomain(format!(
                "r = {r} is not strictly outside the horizon r_+ = {}",
                p.r_plus
            )));
        }
        if !theta.is_finite()
            || theta <= DOMAIN_MARGIN
            || std::f64::consts::PI - theta <= DOMAIN_MARGIN
        {
            return Err(Error::OutsideDomain(format!("theta = {theta} is not inside (0, pi)")));
        }
        Ok(Self { r, theta })
    }
}

/// Δ, Σ and the three equivalent algebraic forms of Σ̄.
#[derive(Debug, Clone, Copy)]
pub struct Scalars {
    pub delta: f64,
    pub sigma: f64,
    /// `Σ + 2Mr + 4M²r²/Δ` — the canonical form.
    pub sigma_bar_1: f64,
    /// `(r² + a²)²/Δ − a² sin²θ`.
    pub sigma_bar_2: f64,
    /// `[(r² + a²)Σ + 2Ma²r sin²θ]/Δ`.
    pub sigma_bar_3: f64,
}

pub fn scalars(p: &KerrParams, q: &Point) -> Scalars {
    let (m, a) = (p.mass, p.spin);
    let (r, theta) = (q.r, q.theta);
    let sin2 = theta.sin().powi(2);
    let cos2 = theta.cos().powi(2);
    let delta = r * r - 2.0 * m * r + a * a;
    let sigma = r * r + a * a * cos2;
    let ra2 = r * r + a * a;
    Scalars {
        delta,
        sigma,
        sigma_bar_1: sigma + 2.0 * m * r + 4.0 * m * m * r * r / delta,
        sigma_bar_2: ra2 * ra2 / delta - a * a * sin2,
        sigma_bar_3: (ra2 * sigma + 2.0 * m * a * a * r * sin2) / delta,
    }
}

/// Covariant and contravariant metric components plus `ρ = Δ sin²θ`.
#[derive(Debug, Clone, Copy)]
pub struct MetricComponents {
    pub g_tt: f64,
    pub g_tphi: f64,
    pub g_rr: f64,
    pub g_thth: f64,
    pub g_phph: f64,
    pub gi_tt: f64,
    pub gi_tphi: f64,
    pub gi_rr: f64,
    pub gi_thth: f64,
    pub gi_phph: f64,
    pub rho: f64,
}

pub fn metric_components(p: &KerrParams, q: &Point) -> MetricComponents {
    let s = scalars(p, q);
    let (m, a) = (p.mass, p.spin);
    let (r, theta) = (q.r, q.theta);
    let sin2 = theta.sin().powi(2);
    let g_tt = 1.0 - 2.0 * m * r / s.sigma;
    MetricComponents {
        g_tt,
        g_tphi: 2.0 * m * a * r * sin2 / s.sigma,
        g_rr: -s.sigma / s.delta,
        g_thth: -s.sigma,
        g_phph: -s.delta * s.sigma_bar_1 * sin2 / s.sigma,
        gi_tt: s.sigma_bar_1 / s.sigma,
        gi_tphi: 2.0 * m * a * r / (s.delta * s.sigma),
        gi_rr: -s.delta / s.sigma,
        gi_thth: -1.0 / s.sigma,
        gi_phph: -g_tt / (s.delta * sin2),
        rho: s.delta * sin2,
    }
}

/// First-order coefficient `b = 4mMar/(ΔΣ̄)` of the reduced equation.
///
/// `m = 0` and `a = 0` short-circuit to exactly zero.
pub fn b_coefficient(p: &KerrParams, m: i64, q: &Point) -> f64 {
    if m == 0 || p.spin == 0.0 {
        return 0.0;
    }
    let s = scalars(p, q);
    4.0 * m as f64 * p.mass * p.spin * q.r / (s.delta * s.sigma_bar_1)
}

/// `s` for which `∂_t + s ∂_φ` extends positively to the horizon:
/// `a/(2Mr_+)`, the horizon angular velocity.
pub fn special_s(p: &KerrParams) -> f64 {
    p.spin / (2.0 * p.mass * p.r_plus)
}

/// Norm of the Killing field `∂_t + s ∂_φ`.
#[derive(Debug, Clone, Copy)]
pub struct KillingNorm {
    /// `g_tt + 2s g_tφ + s² g_φφ`.
    pub direct: f64,
    /// Horizon-factored expression, defined only at `s = special_s`.
    pub factored: Option<f64>,
    /// The bracket of the factored form without its Δ prefactor. The
    /// boundary sign claim lives in this quantity, so it is reported
    /// separately from the full product.
    pub factored_bracket: Option<f64>,
}

pub fn killing_norm(p: &KerrParams, s: f64, q: &Point) -> KillingNorm {
    let g = metric_components(p, q);
    let direct = g.g_tt + 2.0 * s * g.g_tphi + s * s * g.g_phph;
    let s_star = special_s(p);
    let at_special = if s_star == 0.0 {
        s == 0.0
    } else {
        (s - s_star).abs() <= 1e-12 * s_star.abs()
    };
    if !at_special {
        return KillingNorm { direct, factored: None, factored_bracket: None };
    }
    let sc = scalars(p, q);
    let (m, a) = (p.mass, p.spin);
    let sin2 = q.theta.sin().powi(2);
    let two_m_rp = 2.0 * m * p.r_plus;
    let horizon_term = 1.0 + 2.0 * m / (q.r - p.r_minus);
    let bracket = (two_m_rp - a * a * sin2).powi(2)
        - a * a * sc.delta * sin2 * horizon_term * horizon_term;
    let factored = sc.delta / (4.0 * m * m * p.r_plus * p.r_plus * sc.sigma) * bracket;
    KillingNorm { direct, factored: Some(factored), factored_bracket: Some(bracket) }
}

/// Ergoregion and Ω_e2 membership.
#[derive(Debug, Clone, Copy)]
pub struct RegionMembership {
    pub in_ergoregion: bool,
    pub in_omega_e2: bool,
}

pub fn region_membership(p: &KerrParams, q: &Point) -> RegionMembership {
    let sc = scalars(p, q);
    let a = p.spin;
    let sin_th = q.theta.sin();
    let in_ergoregion = a * a * sin_th * sin_th - sc.delta > 0.0;
    let in_omega_e2 = if a == 0.0 {
        true
    } else {
        let expr = 2.0 * p.mass * p.r_plus
            - a * a * sin_th * sin_th
            - a * sc.delta.sqrt() * sin_th * (1.0 + 2.0 * p.mass / (q.r - p.r_minus));
        expr > 0.0
    };
    RegionMembership { in_ergoregion, in_omega_e2 }
}

/// Shifted potential `V_s` in its two algebraic forms.
#[derive(Debug, Clone, Copy)]
pub struct PotentialVs {
    /// `−m²a²/Δ + μ²Σ + s·4mMar/Δ − s²Σ̄`.
    pub form1: f64,
    /// `Vs1 + Vs2`.
    pub form2: f64,
    /// `−(2sMr − ma)²/Δ`.
    pub vs1: f64,
    /// `(μ² − s²)Σ − 2s²Mr`.
    pub vs2: f64,
}

pub fn potential_vs(p: &KerrParams, mode: &ModeSpec, s: f64, q: &Point) -> PotentialVs {
    let sc = scalars(p, q);
    let (big_m, a) = (p.mass, p.spin);
    let m = mode.m as f64;
    let mu2 = mode.mu * mode.mu;
    let r = q.r;
    let form1 = -m * m * a * a / sc.delta + mu2 * sc.sigma + s * 4.0 * m * big_m * a * r / sc.delta
        - s * s * sc.sigma_bar_1;
    let vs1 = -(2.0 * s * big_m * r - m * a).powi(2) / sc.delta;
    let vs2 = (mu2 - s * s) * sc.sigma - 2.0 * s * s * big_m * r;
    PotentialVs { form1, form2: vs1 + vs2, vs1, vs2 }
}

/// Residual of the pointwise identity
/// `(1/Σ̄)(−m²a²/Δ + m²/sin²θ) + b²/4 = m²Σ²/(ΔΣ̄²sin²θ)`.
pub fn positivity_identity_residual(p: &KerrParams, m: i64, q: &Point) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let sc = scalars(p, q);
    let mf = m as f64;
    let a = p.spin;
    let sin2 = q.theta.sin().powi(2);
    let b = b_coefficient(p, m, q);
    let lhs = (-mf * mf * a * a / sc.delta + mf * mf / sin2) / sc.sigma_bar_1 + 0.25 * b * b;
    let rhs = mf * mf * sc.sigma * sc.sigma
        / (sc.delta * sc.sigma_bar_1 * sc.sigma_bar_1 * sin2);
    (lhs - rhs).abs()
}

/// Left side of the positivity identity, which is nonnegative pointwise.
pub fn positivity_identity_lhs(p: &KerrParams, m: i64, q: &Point) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let sc = scalars(p, q);
    let mf = m as f64;
    let sin2 = q.theta.sin().powi(2);
    let b = b_coefficient(p, m, q);
    (-mf * mf * p.spin * p.spin / sc.delta + mf * mf / sin2) / sc.sigma_bar_1 + 0.25 * b * b
}

/// Residual of the zeroth-order coefficient of `A₀ + msB − (ms)²` computed
/// once from the reduced-equation coefficients and once from the Killing
/// norm via `(m² g(ξ,ξ) + μ²ρ)/(−g_φφ)` with `ξ = ∂_t + s ∂_φ`.
pub fn connection_identity_residual(p: &KerrParams, mode: &ModeSpec, s: f64, q: &Point) -> f64 {
    if mode.m == 0 && mode.mu == 0.0 {
        return 0.0;
    }
    let sc = scalars(p, q);
    let g = metric_components(p, q);
    let m = mode.m as f64;
    let mu2 = mode.mu * mode.mu;
    let sin2 = q.theta.sin().powi(2);
    let b = b_coefficient(p, mode.m, q);
    let ms = m * s;
    let route1 = (-m * m * p.spin * p.spin / sc.delta + m * m / sin2 + mu2 * sc.sigma)
        / sc.sigma_bar_1
        + ms * b
        - ms * ms;
    let xi_norm = g.g_tt + 2.0 * s * g.g_tphi + s * s * g.g_phph;
    let route2 = (m * m * xi_norm + mu2 * g.rho) / (-g.g_phph);
    (route1 - route2).abs()
}

/// Mass-bound thresholds and the semibound constant α.
#[derive(Debug, Clone, Copy)]
pub struct MuBounds {
    /// `|m|a/(2Mr_+)·√(1 + 2M/r_+ + a²/r_+²)`.
    pub mu_old: f64,
    /// `|m|a/(2Mr_+)·√(1 + 2M/r_+)` — the improved threshold.
    pub mu_new: f64,
    /// `−m²a²/(4M²r_+²)` — lower bound of the reduced operator.
    pub alpha: f64,
}

pub fn mu_bounds(p: &KerrParams, m: i64) -> MuBounds {
    let pref = m.unsigned_abs() as f64 * p.spin / (2.0 * p.mass * p.r_plus);
    let two_m_over_rp = 2.0 * p.mass / p.r_plus;
    MuBounds {
        mu_old: pref * (1.0 + two_m_over_rp + (p.spin / p.r_plus).powi(2)).sqrt(),
        mu_new: pref * (1.0 + two_m_over_rp).sqrt(),
        alpha: -(m as f64 * p.spin / (2.0 * p.mass * p.r_plus)).powi(2),
    }
}

/// Sample a random admissible point with `r ∈ (r_+ + margin, r_max)`.
pub fn sample_point<R: Rng>(p: &KerrParams, r_max: f64, rng: &mut R) -> Point {
    loop {
        let u: f64 = rng.random_range(1e-6..1.0);
        // Bias samples toward the horizon where the identities are stiffest.
        let r = p.r_plus + (r_max - p.r_plus) * u * u;
        let theta = rng.random_range(1e-6..std::f64::consts::PI - 1e-6);
        if let Ok(q) = Point::new(p, r, theta) {
            return q;
        }
    }
}

/// Sample a point inside the ergoregion (requires `a > 0`).
pub fn sample_ergoregion_point<R: Rng>(p: &KerrParams, rng: &mut R) -> Point {
    assert!(p.spin > 0.0, "ergoregion is empty for a = 0");
    loop {
        let theta: f64 = rng.random_range(0.05..std::f64::consts::PI - 0.05);
        let cos2 = theta.cos().powi(2);
        let disc = p.mass * p.mass - p.spin * p.spin * cos2;
        if disc <= 0.0 {
            continue;
        }
        // Stationary limit surface r_e(θ) solves Δ = a² sin²θ.
        let r_e = p.mass + disc.sqrt();
        if r_e - p.r_plus <= 10.0 * DOMAIN_MARGIN {
            continue;
        }
        let u: f64 = rng.random_range(1e-4..1.0 - 1e-4);
        let r = p.r_plus + u * (r_e - p.r_plus);
        if let Ok(q) = Point::new(p, r, theta) {
            if region_membership(p, &q).in_ergoregion {
                return q;
            }
        }
    }
}

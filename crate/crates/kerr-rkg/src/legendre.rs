//! Associated Legendre polynomials `P_l^m` (Condon-Shortley phase) and the
//! θ-derivative of `P_l^m(cos θ)`, used as the angular basis of the
//! quadratic-form quadrature.

/// `P_l^m(x)` for `l ≥ m ≥ 0`, `|x| < 1`.
pub fn assoc_legendre(l: u32, m: u32, x: f64) -> f64 {
    assert!(l >= m, "require l >= m, got l={l} m={m}");
    let somx2 = ((1.0 - x) * (1.0 + x)).sqrt();
    let mut pmm = 1.0;
    let mut fact = 1.0;
    for _ in 0..m {
        pmm *= -fact * somx2;
        fact += 2.0;
    }
    if l == m {
        return pmm;
    }
    let mut pmmp1 = x * (2.0 * m as f64 + 1.0) * pmm;
    if l == m + 1 {
        return pmmp1;
    }
    let mut pll = 0.0;
    for ll in (m + 2)..=l {
        let llf = ll as f64;
        let mf = m as f64;
        pll = (x * (2.0 * llf - 1.0) * pmmp1 - (llf + mf - 1.0) * pmm) / (llf - mf);
        pmm = pmmp1;
        pmmp1 = pll;
    }
    pll
}

/// `d/dθ [P_l^m(cos θ)]` for θ strictly inside `(0, π)`.
pub fn assoc_legendre_dtheta(l: u32, m: u32, theta: f64) -> f64 {
    let x = theta.cos();
    let sin_th = theta.sin();
    let lf = l as f64;
    let mf = m as f64;
    let p_l = assoc_legendre(l, m, x);
    // (x² − 1) dP/dx = l·x·P_l − (l+m)·P_{l−1}; d/dθ = −sinθ·dP/dx.
    if l == m {
        // P_{l−1}^m = 0 here.
        return lf * x * p_l / sin_th;
    }
    let p_lm1 = assoc_legendre(l - 1, m, x);
    (lf * x * p_l - (lf + mf) * p_lm1) / sin_th
}

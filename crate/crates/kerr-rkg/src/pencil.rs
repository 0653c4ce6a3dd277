//! Finite-dimensional quadratic operator pencils `λ ↦ Ã − λB − λ²` and the
//! conserved quadratic forms of the second-order equation
//! `u″ + iBu′ + Ãu = 0`.
//!
//! Mode convention: `u(t) = e^{iλt}ψ`, so a pencil root with `Im λ < 0` is
//! an exponentially growing mode and `growth_rate = max(0, max −Im λ)`.

use crate::error::{Error, Result};
use crate::C64;
use nalgebra::{DMatrix, DVector};

/// Hermitian matrix validated on construction.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    mat: DMatrix<C64>,
}

impl HermitianOperator {
    /// Accepts matrices equal to their conjugate transpose to rel. 1e-12.
    pub fn new(mat: DMatrix<C64>) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian operator must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let scale = mat.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        let mut dev = 0.0f64;
        for i in 0..mat.nrows() {
            for j in 0..mat.ncols() {
                dev = dev.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
            }
        }
        if dev > 1e-12 * scale.max(1.0) {
            return Err(Error::NotHermitian { dev, scale });
        }
        Ok(Self { mat })
    }

    pub fn from_real(mat: DMatrix<f64>) -> Result<Self> {
        Self::new(mat.map(|x| C64::new(x, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
}

/// The 2n pencil eigenvalues with their stability classification.
#[derive(Debug, Clone)]
pub struct PencilSpectrum {
    /// Sorted by (Re, Im).
    pub eigenvalues: Vec<C64>,
    pub classification: Stability,
    /// `max(0, max −Im λ)` under the `e^{iλt}` convention.
    pub growth_rate: f64,
    /// Imaginary-part threshold actually used for the classification.
    pub tol_imag: f64,
}

/// State `(u, u′)` of the second-order equation at time `t`.
#[derive(Debug, Clone)]
pub struct QuadraticState {
    pub u: DVector<C64>,
    pub du: DVector<C64>,
    pub t: f64,
}

impl QuadraticState {
    pub fn new(u: DVector<C64>, du: DVector<C64>, t: f64) -> Result<Self> {
        if u.len() != du.len() {
            return Err(Error::DimensionMismatch(format!(
                "u has length {}, u' has length {}",
                u.len(),
                du.len()
            )));
        }
        if u.iter().chain(du.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("quadratic state".into()));
        }
        Ok(Self { u, du, t })
    }
}

fn check_dims(atil: &HermitianOperator, b: &HermitianOperator) -> Result<usize> {
    if atil.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "Atil is {}x{0}, B is {1}x{1}",
            atil.dim(),
            b.dim()
        )));
    }
    Ok(atil.dim())
}

/// All 2n roots of `det(Ã − λB − λ²)` via the companion linearization
/// `[[0, I], [Ã, −B]]` acting on `(ψ, λψ)`.
pub fn pencil_eigenvalues(atil: &HermitianOperator, b: &HermitianOperator) -> Result<PencilSpectrum> {
    let n = check_dims(atil, b)?;
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let mut comp = DMatrix::from_element(2 * n, 2 * n, zero);
    for i in 0..n {
        comp[(i, n + i)] = one;
        for j in 0..n {
            comp[(n + i, j)] = atil.mat[(i, j)];
            comp[(n + i, n + j)] = -b.mat[(i, j)];
        }
    }
    let schur = nalgebra::Schur::try_new(comp, 1e-14, 0)
        .ok_or_else(|| Error::EigenFailure("complex Schur iteration did not converge".into()))?;
    let t = schur.unpack().1;
    let mut eigenvalues: Vec<C64> = (0..2 * n).map(|i| t[(i, i)]).collect();
    eigenvalues.sort_by(|a, b| {
        a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap())
    });
    let spectral_radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let tol_imag = 1e-8 * spectral_radius.max(1.0);
    let max_abs_im = eigenvalues.iter().map(|z| z.im.abs()).fold(0.0f64, f64::max);
    let classification = if max_abs_im <= tol_imag { Stability::Stable } else { Stability::Unstable };
    let growth_rate = eigenvalues.iter().map(|z| -z.im).fold(0.0f64, f64::max).max(0.0);
    let growth_rate = if classification == Stability::Stable { 0.0 } else { growth_rate };
    Ok(PencilSpectrum { eigenvalues, classification, growth_rate, tol_imag })
}

/// `det(Ã − λB − λ²·I)` evaluated directly.
pub fn char_poly_value(atil: &HermitianOperator, b: &HermitianOperator, lambda: C64) -> Result<C64> {
    let n = check_dims(atil, b)?;
    let mut m = atil.mat.clone();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] -= lambda * b.mat[(i, j)];
        }
        m[(i, i)] -= lambda * lambda;
    }
    Ok(m.determinant())
}

/// Coefficients of `det(Ã − λB − λ²·I)`, leading power of λ first
/// (degree 2n). For n ≤ 2 the polynomial determinant is expanded
/// exactly; larger pencils go through interpolation at integer nodes.
pub fn char_poly_coefficients(
    atil: &HermitianOperator,
    b: &HermitianOperator,
) -> Result<Vec<C64>> {
    let n = check_dims(atil, b)?;
    let zero = C64::new(0.0, 0.0);
    match n {
        1 => Ok(vec![-C64::new(1.0, 0.0), -b.mat[(0, 0)], atil.mat[(0, 0)]]),
        2 => {
            // Entry polynomials [c0, c1, c2] in λ.
            let entry = |i: usize, j: usize| {
                let diag = if i == j { C64::new(1.0, 0.0) } else { zero };
                [atil.mat[(i, j)], -b.mat[(i, j)], -diag]
            };
            let conv = |p: [C64; 3], q: [C64; 3]| {
                let mut out = [zero; 5];
                for (i, pi) in p.iter().enumerate() {
                    for (j, qj) in q.iter().enumerate() {
                        out[i + j] += pi * qj;
                    }
                }
                out
            };
            let d0 = conv(entry(0, 0), entry(1, 1));
            let d1 = conv(entry(0, 1), entry(1, 0));
            let mut asc: Vec<C64> = (0..5).map(|k| d0[k] - d1[k]).collect();
            asc.reverse();
            Ok(asc)
        }
        _ => {
            // Interpolate at 2n+1 integer nodes.
            let deg = 2 * n;
            let nodes: Vec<f64> = (0..=deg).map(|k| k as f64 - n as f64).collect();
            let mut vand = DMatrix::from_element(deg + 1, deg + 1, zero);
            let mut rhs = DVector::from_element(deg + 1, zero);
            for (row, &x) in nodes.iter().enumerate() {
                let mut p = C64::new(1.0, 0.0);
                for col in (0..=deg).rev() {
                    vand[(row, col)] = p;
                    p *= C64::new(x, 0.0);
                }
                rhs[row] = char_poly_value(atil, b, C64::new(x, 0.0))?;
            }
            vand.lu()
                .solve(&rhs)
                .map(|v| v.iter().cloned().collect())
                .ok_or_else(|| Error::SolveFailure("singular Vandermonde system".into()))
        }
    }
}

/// Example with negative energy yet only real pencil eigenvalues:
/// `Ã = diag(1, −1)`, `B = [[3, 1], [1, 3]]`.
pub fn example_stable() -> (HermitianOperator, HermitianOperator) {
    let atil = HermitianOperator::from_real(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]))
        .expect("hermitian");
    let b = HermitianOperator::from_real(DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 3.0]))
        .expect("hermitian");
    (atil, b)
}

/// Example with a strictly positive `Ã + B²/4` but a growing mode:
/// `Ã = diag(1, −1)`, `B = [[23/10, 1], [1, 23/10]]`.
pub fn example_unstable() -> (HermitianOperator, HermitianOperator) {
    let atil = HermitianOperator::from_real(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]))
        .expect("hermitian");
    let b = HermitianOperator::from_real(DMatrix::from_row_slice(2, 2, &[2.3, 1.0, 1.0, 2.3]))
        .expect("hermitian");
    (atil, b)
}

/// Conserved energy `E_u = ‖u′‖² + ⟨u, Ãu⟩`.
pub fn energy(atil: &HermitianOperator, state: &QuadraticState) -> Result<f64> {
    if atil.dim() != state.u.len() {
        return Err(Error::DimensionMismatch("energy: operator vs state".into()));
    }
    let au = &atil.mat * &state.u;
    Ok(state.du.norm_squared() + state.u.dotc(&au).re)
}

/// Shifted energy `E_{s,u} = ‖u′ + isu‖² + ⟨u, (Ã + sB − s²)u⟩`.
pub fn shifted_energy(
    atil: &HermitianOperator,
    b: &HermitianOperator,
    s: f64,
    state: &QuadraticState,
) -> Result<f64> {
    let n = check_dims(atil, b)?;
    if n != state.u.len() {
        return Err(Error::DimensionMismatch("shifted_energy: operator vs state".into()));
    }
    let shifted_du = &state.du + &state.u * C64::new(0.0, s);
    let mut op = &atil.mat + &b.mat * C64::new(s, 0.0);
    for i in 0..n {
        op[(i, i)] -= C64::new(s * s, 0.0);
    }
    let ou = &op * &state.u;
    Ok(shifted_du.norm_squared() + state.u.dotc(&ou).re)
}

/// Conserved current `j_{u,v} = ⟨u|v′⟩ − ⟨u′|v⟩ + i⟨u|Bv⟩`.
pub fn current(
    b: &HermitianOperator,
    state_u: &QuadraticState,
    state_v: &QuadraticState,
) -> Result<C64> {
    if b.dim() != state_u.u.len() || b.dim() != state_v.u.len() {
        return Err(Error::DimensionMismatch("current: operator vs states".into()));
    }
    let bv = &b.mat * &state_v.u;
    Ok(state_u.u.dotc(&state_v.du) - state_u.du.dotc(&state_v.u)
        + C64::new(0.0, 1.0) * state_u.u.dotc(&bv))
}

/// Result of scanning `s ↦ min eig(Ã + sB − s²)` over a grid.
#[derive(Debug, Clone, Copy)]
pub struct StabilityScan {
    pub best_s: f64,
    pub min_eig_at_best: f64,
    /// True iff some grid point makes the shifted operator nonnegative,
    /// which certifies the absence of growing modes.
    pub certificate: bool,
}

pub fn stability_search(
    atil: &HermitianOperator,
    b: &HermitianOperator,
    s_grid: &[f64],
) -> Result<StabilityScan> {
    let n = check_dims(atil, b)?;
    if s_grid.is_empty() {
        return Err(Error::InvalidParameter("stability_search: empty grid".into()));
    }
    let evals = crate::par::map_slice(s_grid, |&s| {
        let mut op = &atil.mat + &b.mat * C64::new(s, 0.0);
        for i in 0..n {
            op[(i, i)] -= C64::new(s * s, 0.0);
        }
        op.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
    });
    let mut best_idx = 0;
    for i in 1..s_grid.len() {
        let better = evals[i] > evals[best_idx]
            || (evals[i] == evals[best_idx] && s_grid[i].abs() < s_grid[best_idx].abs());
        if better {
            best_idx = i;
        }
    }
    Ok(StabilityScan {
        best_s: s_grid[best_idx],
        min_eig_at_best: evals[best_idx],
        certificate: evals[best_idx] >= 0.0,
    })
}

/// `A(t) = exp(itB/2)·(Ã + B²/4)·exp(−itB/2)`, computed through the
/// Hermitian eigendecomposition of B. Its spectrum is t-independent.
pub fn conjugated_family(
    atil: &HermitianOperator,
    b: &HermitianOperator,
    t: f64,
) -> Result<HermitianOperator> {
    let n = check_dims(atil, b)?;
    let core = &atil.mat + (&b.mat * &b.mat) * C64::new(0.25, 0.0);
    if t == 0.0 {
        return HermitianOperator::new(core);
    }
    let eig = b.mat.clone().symmetric_eigen();
    let q = eig.eigenvectors;
    let phases = DVector::from_fn(n, |i, _| C64::new(0.0, 0.5 * t * eig.eigenvalues[i]).exp());
    // exp(itB/2) = Q diag(phases) Q^H
    let mut expo = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                expo[(i, j)] += q[(i, k)] * phases[k] * q[(j, k)].conj();
            }
        }
    }
    let rotated = &expo * core * expo.adjoint();
    // Hermitize away the roundoff from the triple product.
    let herm = (&rotated + rotated.adjoint()) * C64::new(0.5, 0.0);
    HermitianOperator::new(herm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cvec(parts: &[(f64, f64)]) -> DVector<C64> {
        DVector::from_iterator(parts.len(), parts.iter().map(|&(re, im)| C64::new(re, im)))
    }

    fn real_roots(spec: &PencilSpectrum) -> Vec<f64> {
        spec.eigenvalues
            .iter()
            .filter(|z| z.im.abs() <= spec.tol_imag)
            .map(|z| z.re)
            .collect()
    }

    #[test]
    fn scalar_pencil() {
        let atil = HermitianOperator::from_real(DMatrix::from_row_slice(1, 1, &[1.0])).unwrap();
        let b = HermitianOperator::from_real(DMatrix::from_row_slice(1, 1, &[0.0])).unwrap();
        let spec = pencil_eigenvalues(&atil, &b).unwrap();
        assert_eq!(spec.classification, Stability::Stable);
        assert_relative_eq!(spec.eigenvalues[0].re, -1.0, max_relative = 1e-12);
        assert_relative_eq!(spec.eigenvalues[1].re, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn stable_example_four_real_roots() {
        let (atil, b) = example_stable();
        let spec = pencil_eigenvalues(&atil, &b).unwrap();
        assert_eq!(spec.classification, Stability::Stable);
        assert_eq!(spec.growth_rate, 0.0);
        let roots = real_roots(&spec);
        assert_eq!(roots.len(), 4);
        let intervals = [(-5.0, -4.0), (-4.0, -1.0), (-1.0, 0.0), (0.0, 1.0)];
        for ((lo, hi), root) in intervals.iter().zip(roots.iter()) {
            assert!(lo < root && root < hi, "root {root} not in ({lo},{hi})");
        }
    }

    #[test]
    fn unstable_example_complex_pair() {
        let (atil, b) = example_unstable();
        let spec = pencil_eigenvalues(&atil, &b).unwrap();
        assert_eq!(spec.classification, Stability::Unstable);
        let real: Vec<f64> = real_roots(&spec);
        assert_eq!(real.len(), 2);
        assert!(real[0] > -4.0 && real[0] < -3.0);
        assert!(real[1] > 0.0 && real[1] < 1.0);
        let complex: Vec<&C64> =
            spec.eigenvalues.iter().filter(|z| z.im.abs() > spec.tol_imag).collect();
        assert_eq!(complex.len(), 2);
        assert_relative_eq!(complex[0].re, complex[1].re, max_relative = 1e-8);
        assert!((complex[0].im + complex[1].im).abs() <= 1e-8 * complex[0].im.abs());
        assert!(spec.growth_rate > 0.0);
    }

    #[test]
    fn roots_satisfy_char_poly() {
        for (atil, b) in [example_stable(), example_unstable()] {
            let spec = pencil_eigenvalues(&atil, &b).unwrap();
            let coeffs = char_poly_coefficients(&atil, &b).unwrap();
            let scale: f64 = coeffs.iter().map(|c| c.norm()).sum();
            for &lam in &spec.eigenvalues {
                let v = char_poly_value(&atil, &b, lam).unwrap();
                assert!(v.norm() <= 1e-6 * scale, "|p({lam})| = {}", v.norm());
            }
        }
    }

    #[test]
    fn char_poly_values() {
        let (atil, b) = example_stable();
        let p0 = char_poly_value(&atil, &b, C64::new(0.0, 0.0)).unwrap();
        assert_relative_eq!(p0.re, -1.0, max_relative = 1e-12);
        let (atil, b) = example_unstable();
        let p0 = char_poly_value(&atil, &b, C64::new(0.0, 0.0)).unwrap();
        assert_relative_eq!(p0.re, -1.0, max_relative = 1e-12);
        let crit = (-69.0 + 1329f64.sqrt()) / 40.0;
        let pc = char_poly_value(&atil, &b, C64::new(crit, 0.0)).unwrap();
        assert!(pc.re < 0.0 && pc.im.abs() < 1e-12);
    }

    #[test]
    fn char_poly_coefficients_match_paper_quartics() {
        let (atil, b) = example_stable();
        let c = char_poly_coefficients(&atil, &b).unwrap();
        let expected = [1.0, 6.0, 8.0, 0.0, -1.0];
        for (got, want) in c.iter().zip(expected.iter()) {
            assert_eq!(got.re, *want);
            assert_eq!(got.im, 0.0);
        }
        let (atil, b) = example_unstable();
        let c = char_poly_coefficients(&atil, &b).unwrap();
        let expected = [1.0, 4.6, 4.29, 0.0, -1.0];
        for (got, want) in c.iter().zip(expected.iter()) {
            assert!((got.re - want).abs() <= 1e-12);
            assert_eq!(got.im, 0.0);
        }
    }

    #[test]
    fn example_operator_properties() {
        let (atil, b) = example_stable();
        let beigs = b.matrix().clone().symmetric_eigen().eigenvalues;
        let mut be: Vec<f64> = beigs.iter().cloned().collect();
        be.sort_by(f64::total_cmp);
        assert_relative_eq!(be[0], 2.0, max_relative = 1e-12);
        assert_relative_eq!(be[1], 4.0, max_relative = 1e-12);

        let core = atil.matrix() + (b.matrix() * b.matrix()) * C64::new(0.25, 0.0);
        let ce = core.symmetric_eigen().eigenvalues;
        let mut cv: Vec<f64> = ce.iter().cloned().collect();
        cv.sort_by(f64::total_cmp);
        assert_relative_eq!(cv[0], (5.0 - 13f64.sqrt()) / 2.0, max_relative = 1e-12);
        assert_relative_eq!(cv[1], (5.0 + 13f64.sqrt()) / 2.0, max_relative = 1e-12);
        assert!(cv[0] > 0.0);

        let comm = atil.matrix() * b.matrix() - b.matrix() * atil.matrix();
        assert!(comm.norm() > 0.1);

        let (atil, b) = example_unstable();
        let core = atil.matrix() + (b.matrix() * b.matrix()) * C64::new(0.25, 0.0);
        assert_relative_eq!(core[(0, 0)].re, 2.5725, max_relative = 1e-12);
        assert_relative_eq!(core[(0, 1)].re, 1.15, max_relative = 1e-12);
        assert_relative_eq!(core[(1, 1)].re, 0.5725, max_relative = 1e-12);
        let det = core[(0, 0)] * core[(1, 1)] - core[(0, 1)] * core[(1, 0)];
        assert!((det.re - 0.15025625).abs() < 1e-10 && det.re > 0.0);
    }

    #[test]
    fn energy_examples() {
        let (atil, _) = example_stable();
        let st = QuadraticState::new(cvec(&[(0.0, 0.0), (1.0, 0.0)]), cvec(&[(0.0, 0.0), (0.0, 0.0)]), 0.0)
            .unwrap();
        assert_relative_eq!(energy(&atil, &st).unwrap(), -1.0, max_relative = 1e-12);

        let zero = QuadraticState::new(cvec(&[(0.0, 0.0), (0.0, 0.0)]), cvec(&[(0.0, 0.0), (0.0, 0.0)]), 0.0)
            .unwrap();
        assert_eq!(energy(&atil, &zero).unwrap(), 0.0);

        let ident = HermitianOperator::from_real(DMatrix::identity(2, 2)).unwrap();
        let st = QuadraticState::new(cvec(&[(1.0, 0.0), (0.0, 0.0)]), cvec(&[(0.0, 0.0), (1.0, 0.0)]), 0.0)
            .unwrap();
        assert_relative_eq!(energy(&ident, &st).unwrap(), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn shifted_energy_examples() {
        let (atil, b) = example_stable();
        let st = QuadraticState::new(cvec(&[(1.0, 0.0), (0.0, 0.0)]), cvec(&[(0.0, 0.0), (0.0, 0.0)]), 0.0)
            .unwrap();
        assert_relative_eq!(
            shifted_energy(&atil, &b, 0.0, &st).unwrap(),
            energy(&atil, &st).unwrap(),
            max_relative = 1e-12
        );
        // |i|² + (1 + 3 − 1) = 4
        assert_relative_eq!(shifted_energy(&atil, &b, 1.0, &st).unwrap(), 4.0, max_relative = 1e-12);
    }

    #[test]
    fn current_examples() {
        let n2zero = HermitianOperator::from_real(DMatrix::zeros(2, 2)).unwrap();
        let rest = QuadraticState::new(cvec(&[(1.0, 0.0), (0.0, 0.0)]), cvec(&[(0.0, 0.0), (0.0, 0.0)]), 0.0)
            .unwrap();
        assert_eq!(current(&n2zero, &rest, &rest).unwrap(), C64::new(0.0, 0.0));

        let moving = QuadraticState::new(cvec(&[(0.0, 0.0), (0.0, 0.0)]), cvec(&[(1.0, 0.0), (0.0, 0.0)]), 0.0)
            .unwrap();
        assert_eq!(current(&n2zero, &rest, &moving).unwrap(), C64::new(1.0, 0.0));

        let (_, b) = example_stable();
        let j = current(&b, &rest, &rest).unwrap();
        assert_relative_eq!(j.im, 3.0, max_relative = 1e-12);
        assert!(j.re.abs() < 1e-14);
    }

    #[test]
    fn stability_search_examples() {
        let ident = HermitianOperator::from_real(DMatrix::identity(2, 2)).unwrap();
        let zero = HermitianOperator::from_real(DMatrix::zeros(2, 2)).unwrap();
        let scan = stability_search(&ident, &zero, &[0.0]).unwrap();
        assert!(scan.certificate);
        assert_relative_eq!(scan.min_eig_at_best, 1.0, max_relative = 1e-12);

        let (atil, b) = example_unstable();
        let grid: Vec<f64> = (0..401).map(|i| -5.0 + 10.0 * i as f64 / 400.0).collect();
        let scan = stability_search(&atil, &b, &grid).unwrap();
        assert!(!scan.certificate);

        let azero = HermitianOperator::from_real(DMatrix::zeros(2, 2)).unwrap();
        let btwo = HermitianOperator::from_real(DMatrix::identity(2, 2) * 2.0).unwrap();
        let scan = stability_search(&azero, &btwo, &[1.0]).unwrap();
        assert!(scan.certificate);
        assert_relative_eq!(scan.min_eig_at_best, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn certificate_implies_stable_classification() {
        // Ã = I, B arbitrary symmetric: s = 0 certifies, pencil must be Stable.
        let atil = HermitianOperator::from_real(DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 2.0]))
            .unwrap();
        let b = HermitianOperator::from_real(DMatrix::from_row_slice(2, 2, &[0.5, 0.1, 0.1, 0.9]))
            .unwrap();
        let scan = stability_search(&atil, &b, &[0.0]).unwrap();
        assert!(scan.certificate);
        let spec = pencil_eigenvalues(&atil, &b).unwrap();
        assert_eq!(spec.classification, Stability::Stable);
    }

    #[test]
    fn conjugated_family_at_zero_and_scalar_b() {
        let (atil, b) = example_stable();
        let a0 = conjugated_family(&atil, &b, 0.0).unwrap();
        let core = atil.matrix() + (b.matrix() * b.matrix()) * C64::new(0.25, 0.0);
        assert!((a0.matrix() - &core).norm() == 0.0);

        let beta = 0.7;
        let bscalar = HermitianOperator::from_real(DMatrix::identity(2, 2) * beta).unwrap();
        let at = conjugated_family(&atil, &bscalar, 2.3).unwrap();
        let expected = atil.matrix() + DMatrix::identity(2, 2).map(|x: f64| C64::new(x, 0.0)) * C64::new(beta * beta / 4.0, 0.0);
        assert!((at.matrix() - expected).norm() < 1e-12);
    }

    #[test]
    fn conjugated_family_spectrum_invariant() {
        let (atil, b) = example_unstable();
        let base = conjugated_family(&atil, &b, 0.0).unwrap();
        let mut base_eigs: Vec<f64> =
            base.matrix().clone().symmetric_eigen().eigenvalues.iter().cloned().collect();
        base_eigs.sort_by(f64::total_cmp);
        assert!(base_eigs[0] > 0.0, "family should be strictly positive");
        for k in 0..10 {
            let t = -4.0 + 0.9 * k as f64;
            let at = conjugated_family(&atil, &b, t).unwrap();
            let mut eigs: Vec<f64> =
                at.matrix().clone().symmetric_eigen().eigenvalues.iter().cloned().collect();
            eigs.sort_by(f64::total_cmp);
            for (x, y) in eigs.iter().zip(base_eigs.iter()) {
                assert_relative_eq!(x, y, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = DMatrix::from_row_slice(2, 2, &[
            C64::new(1.0, 0.0),
            C64::new(2.0, 1.0),
            C64::new(2.0, 1.0), // should be 2 − i
            C64::new(3.0, 0.0),
        ]);
        assert!(HermitianOperator::new(m).is_err());
    }
}

//! Dense linear algebra kernels: eigenvalues, singular values and resolvent
//! solves for the complex matrices the laboratory produces.
//!
//! Nothing here knows about operators or bands.  The public surface is
//! three calls:
//!
//! * [`eig`]: spectra of general complex matrices, with exact-symmetry
//!   dispatch: matrices that are bitwise real symmetric or Hermitian take a
//!   tridiagonalization + implicit QL route, everything else goes through
//!   balancing, Householder Hessenberg reduction and explicit-shift complex
//!   QR.  Optional right eigenvectors come from the accumulated Schur form.
//! * [`svd_values`]: singular values through the Gram matrix on the
//!   smaller support side, good to roughly ‖M‖·√ε, which is ample for the
//!   Schatten sums it feeds.
//! * [`resolvent_apply`]: row-block solves X (M − λ)⁻¹ through a banded or
//!   dense LU with partial pivoting, with a backward-error check.
//!
//! Matrix sizes are capped (default 3000, env `BANDGAP_LAB_MAX_N`) so a
//! mistyped truncation size fails fast instead of thrashing the machine.

mod banded;
mod matrix;
mod qr;
mod tridiag;

use std::sync::OnceLock;

use num_complex::Complex64;

pub use matrix::FiniteMatrix;
pub(crate) use banded::AnyLu;
pub(crate) use matrix::C_ZERO;
#[cfg(test)]
use matrix::C_ONE;

use crate::{Error, Result};

/// Default residual tolerance for eigenvector verification.
pub const DEFAULT_EIG_TOL: f64 = 1e-8;

/// QR sweep budget per matrix is 40·N.
const SWEEPS_PER_ROW: usize = 40;

static MAX_N: OnceLock<usize> = OnceLock::new();

/// Largest matrix order the kernels accept.  Defaults to 3000; the
/// `BANDGAP_LAB_MAX_N` environment variable (read once) overrides it.
pub fn max_size() -> usize {
    *MAX_N.get_or_init(|| {
        std::env::var("BANDGAP_LAB_MAX_N")
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .unwrap_or(3000)
    })
}

fn check_size(n: usize) -> Result<()> {
    if n > max_size() {
        return Err(Error::InvalidParam(format!(
            "matrix order {n} exceeds the configured maximum {} (set BANDGAP_LAB_MAX_N to raise it)",
            max_size()
        )));
    }
    Ok(())
}

/// Eigenvalue decomposition result.
#[derive(Clone, Debug)]
pub struct EigResult {
    /// Eigenvalues in the solver's deflation order (not sorted).
    pub eigenvalues: Vec<Complex64>,
    /// Right eigenvectors as matrix columns, aligned with `eigenvalues`.
    pub vectors: Option<FiniteMatrix>,
    /// Achieved accuracy diagnostic: with vectors, max_k ‖Mv_k − λ_k v_k‖ /
    /// ‖M‖_F; without, the trace-defect |Σλ − tr M| / (N·‖M‖_F).
    pub residual: f64,
    /// QR sweeps consumed (0 on the selfadjoint fast path).
    pub sweeps: usize,
}

/// Eigenvalues (and optionally right eigenvectors) of a dense complex
/// matrix.
///
/// Exactly Hermitian inputs without vector requests ride the
/// tridiagonalization fast path and come back real.  The general path caps
/// itself at 40·N QR sweeps and reports non-convergence as
/// [`Error::NumericalFailure`].  Two postconditions are enforced on every
/// path: the eigenvalue sum must match the trace to 1e-8·N·‖M‖_F, and
/// requested eigenvectors must achieve residuals below 1e-8·‖M‖_F.
pub fn eig(m: &FiniteMatrix, want_vectors: bool) -> Result<EigResult> {
    let n = m.size();
    check_size(n)?;
    if n == 0 {
        return Ok(EigResult { eigenvalues: vec![], vectors: None, residual: 0.0, sweeps: 0 });
    }

    if !want_vectors && m.is_real_symmetric() {
        let mut a: Vec<f64> = m.as_slice().iter().map(|z| z.re).collect();
        let (d, e) = tridiag::real_sym_tridiagonalize(&mut a, n);
        let vals = tridiag::tridiag_eigenvalues(d, &e)?;
        let eigenvalues: Vec<Complex64> = vals.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
        return finish_without_vectors(m, eigenvalues, 0);
    }
    if !want_vectors && m.is_hermitian() {
        let mut a: Vec<Complex64> = m.as_slice().to_vec();
        let (d, e) = tridiag::hermitian_tridiagonalize(&mut a, n);
        let vals = tridiag::tridiag_eigenvalues(d, &e)?;
        let eigenvalues: Vec<Complex64> = vals.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
        return finish_without_vectors(m, eigenvalues, 0);
    }

    let mut h: Vec<Complex64> = m.as_slice().to_vec();
    let scale = qr::balance(&mut h, n);
    let reflectors = qr::hessenberg(&mut h, n);
    let cap = SWEEPS_PER_ROW * n;

    if !want_vectors {
        let (eigenvalues, sweeps) = qr::schur(&mut h, n, None, cap)?;
        return finish_without_vectors(m, eigenvalues, sweeps);
    }

    let mut z = qr::accumulate_q(&reflectors, n);
    let (eigenvalues, sweeps) = qr::schur(&mut h, n, Some(&mut z), cap)?;
    let mut vraw = qr::schur_vectors(&h, &z, n);
    // Undo the balancing similarity and renormalize.
    for (i, si) in scale.iter().enumerate() {
        for c in 0..n {
            vraw[i * n + c] *= *si;
        }
    }
    let mut vectors = FiniteMatrix::zeros(n);
    for k in 0..n {
        let nrm = (0..n).map(|r| vraw[r * n + k].norm_sqr()).sum::<f64>().sqrt();
        let inv = if nrm > 0.0 { 1.0 / nrm } else { 1.0 };
        for r in 0..n {
            vectors.set(r, k, vraw[r * n + k] * inv);
        }
    }

    let mnorm = m.frobenius_norm();
    let mut worst = 0.0f64;
    for (k, lam) in eigenvalues.iter().enumerate() {
        let v: Vec<Complex64> = (0..n).map(|r| vectors.get(r, k)).collect();
        let mv = m.matvec(&v);
        let res = mv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b * lam).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(res);
    }
    let residual = if mnorm > 0.0 { worst / mnorm } else { worst };
    if residual > DEFAULT_EIG_TOL {
        return Err(Error::NumericalFailure(format!(
            "eigenvector residual {residual:.3e} exceeds {DEFAULT_EIG_TOL:.1e}"
        )));
    }
    check_trace(m, &eigenvalues)?;
    Ok(EigResult { eigenvalues, vectors: Some(vectors), residual, sweeps })
}

fn finish_without_vectors(
    m: &FiniteMatrix,
    eigenvalues: Vec<Complex64>,
    sweeps: usize,
) -> Result<EigResult> {
    check_trace(m, &eigenvalues)?;
    let n = m.size();
    let mnorm = m.frobenius_norm();
    let sum: Complex64 = eigenvalues.iter().sum();
    let defect = (sum - m.trace()).norm();
    let residual = if mnorm > 0.0 { defect / (n as f64 * mnorm) } else { defect };
    Ok(EigResult { eigenvalues, vectors: None, residual, sweeps })
}

fn check_trace(m: &FiniteMatrix, eigenvalues: &[Complex64]) -> Result<()> {
    let n = m.size();
    let sum: Complex64 = eigenvalues.iter().sum();
    let defect = (sum - m.trace()).norm();
    let allowed = 1e-8 * (n as f64) * m.frobenius_norm();
    if defect > allowed && defect > 1e-300 {
        return Err(Error::NumericalFailure(format!(
            "eigenvalue sum drifted from trace by {defect:.3e} (allowed {allowed:.3e})"
        )));
    }
    Ok(())
}

/// Singular values, descending.  Formed through the Gram matrix on the
/// smaller side of the nonzero support, so windowed perturbations and
/// row-supported relative operators cost O(s³) rather than O(N³).
pub fn svd_values(m: &FiniteMatrix) -> Result<Vec<f64>> {
    let n = m.size();
    check_size(n)?;
    // Row and column support.
    let mut rows: Vec<usize> = Vec::new();
    let mut cols_seen = vec![false; n];
    for i in 0..n {
        let row = m.row(i);
        let mut any = false;
        for (j, v) in row.iter().enumerate() {
            if *v != C_ZERO {
                any = true;
                cols_seen[j] = true;
            }
        }
        if any {
            rows.push(i);
        }
    }
    let cols: Vec<usize> = (0..n).filter(|&j| cols_seen[j]).collect();
    if rows.is_empty() {
        return Ok(vec![0.0; n]);
    }

    let use_rows = rows.len() <= cols.len();
    let idx = if use_rows { &rows } else { &cols };
    let s = idx.len();
    let mut gram = vec![C_ZERO; s * s];
    for a in 0..s {
        for b in a..s {
            let mut acc = C_ZERO;
            if use_rows {
                let ra = m.row(idx[a]);
                let rb = m.row(idx[b]);
                for &c in &cols {
                    acc += ra[c] * rb[c].conj();
                }
            } else {
                for &r in &rows {
                    acc += m.get(r, idx[a]).conj() * m.get(r, idx[b]);
                }
            }
            gram[a * s + b] = acc;
            gram[b * s + a] = acc.conj();
        }
    }
    for i in 0..s {
        let d = gram[i * s + i];
        gram[i * s + i] = Complex64::new(d.re.max(0.0), 0.0);
    }
    let (d, e) = tridiag::hermitian_tridiagonalize(&mut gram, s);
    let vals = tridiag::tridiag_eigenvalues(d, &e)?;
    let mut sv: Vec<f64> = vals.into_iter().map(|x| x.max(0.0).sqrt()).collect();
    sv.resize(n, 0.0);
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// X (M − λ)⁻¹ for a block of row vectors X, via one LU factorization of
/// the (transposed, shifted) matrix.  The factorization is banded whenever
/// M is; the achieved backward error ‖Y(M−λ) − X‖ is checked against
/// machine-precision expectations and failure reports as
/// [`Error::NearSingular`].
pub fn resolvent_apply(
    m: &FiniteMatrix,
    lambda: Complex64,
    x: &[Vec<Complex64>],
) -> Result<Vec<Vec<Complex64>>> {
    let n = m.size();
    check_size(n)?;
    for row in x {
        if row.len() != n {
            return Err(Error::InvalidParam(format!(
                "row block width {} does not match matrix order {n}",
                row.len()
            )));
        }
    }
    let (kl, ku) = m.bandwidths();
    // Transposed view: solve (M − λ)ᵀ yᵀ = xᵀ row by row.
    let shift = lambda;
    let lu = AnyLu::factor_with(n, ku, kl, |i, j| {
        let v = m.get(j, i);
        if i == j {
            v - shift
        } else {
            v
        }
    })?;

    let mut out = Vec::with_capacity(x.len());
    let mnorm = m.frobenius_norm() + lambda.norm() * (n as f64).sqrt();
    for row in x {
        let mut y = row.clone();
        lu.solve_in_place(&mut y);
        // Backward error: ‖y(M−λ) − x‖ should be at machine level relative
        // to ‖M‖‖y‖ + ‖x‖ regardless of conditioning.
        let ynorm = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let xnorm = row.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let mut err = 0.0f64;
        for c in 0..n {
            let ilo = c.saturating_sub(ku);
            let ihi = (c + kl).min(n - 1);
            let mut acc = C_ZERO;
            for i in ilo..=ihi {
                acc += y[i] * m.get(i, c);
            }
            acc -= y[c] * shift;
            acc -= row[c];
            err = err.max(acc.norm());
        }
        let allowed = 100.0 * (n as f64) * f64::EPSILON * (mnorm * ynorm + xnorm);
        if err > allowed && err > 1e-300 {
            return Err(Error::NearSingular(format!(
                "resolvent solve backward error {err:.3e} exceeds {allowed:.3e} at λ = {lambda}"
            )));
        }
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted_re(mut v: Vec<Complex64>) -> Vec<f64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re));
        v.into_iter().map(|z| z.re).collect()
    }

    /// Characteristic polynomial coefficients by Faddeev–LeVerrier:
    /// p(λ) = λⁿ + c₁λⁿ⁻¹ + … + cₙ.  Independent of the QR machinery.
    fn char_poly(m: &FiniteMatrix) -> Vec<Complex64> {
        let n = m.size();
        let mut coeffs = vec![C_ONE];
        let mut mk = m.clone();
        let mut ck;
        for k in 1..=n {
            ck = -mk.trace() / (k as f64);
            coeffs.push(ck);
            if k < n {
                mk = m.matmul(&mk.shift_diagonal(ck));
            }
        }
        coeffs
    }

    fn poly_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
        coeffs.iter().fold(C_ZERO, |acc, c| acc * z + c)
    }

    fn poly_derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
        let deg = coeffs.len() - 1;
        coeffs[..deg]
            .iter()
            .enumerate()
            .map(|(i, c)| c * ((deg - i) as f64))
            .collect()
    }

    #[test]
    fn eig_diagonal_is_exact() {
        let m = FiniteMatrix::from_fn(3, |i, j| {
            if i == j {
                c(i as f64 + 1.0, 0.0)
            } else {
                C_ZERO
            }
        });
        let r = eig(&m, false).unwrap();
        assert_eq!(sorted_re(r.eigenvalues), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn eig_symmetric_swap() {
        let mut m = FiniteMatrix::zeros(2);
        m.set(0, 1, C_ONE);
        m.set(1, 0, C_ONE);
        let r = eig(&m, false).unwrap();
        let v = sorted_re(r.eigenvalues);
        assert_abs_diff_eq!(v[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eig_nonsymmetric_jordan_block_plus() {
        // [[1, 1], [0, 1]] has a double eigenvalue 1; QR must not choke.
        let mut m = FiniteMatrix::zeros(2);
        m.set(0, 0, C_ONE);
        m.set(0, 1, C_ONE);
        m.set(1, 1, C_ONE);
        let r = eig(&m, false).unwrap();
        for lam in r.eigenvalues {
            assert_abs_diff_eq!(lam.re, 1.0, epsilon = 1e-8);
            assert_abs_diff_eq!(lam.im, 0.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn eig_matches_char_poly_on_random_5x5() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let m = FiniteMatrix::from_fn(5, |_, _| {
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let coeffs = char_poly(&m);
            let dcoeffs = poly_derivative(&coeffs);
            let r = eig(&m, false).unwrap();
            for lam in &r.eigenvalues {
                let p = poly_eval(&coeffs, *lam);
                let dp = poly_eval(&dcoeffs, *lam);
                // Newton correction as a distance-to-root estimate.
                let corr = if dp.norm() > 1e-12 { (p / dp).norm() } else { p.norm() };
                assert!(
                    corr < 1e-6,
                    "eigenvalue {lam} sits {corr:.2e} from a characteristic root"
                );
            }
        }
    }

    #[test]
    fn eig_vectors_satisfy_residual_bound() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let m = FiniteMatrix::from_fn(12, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let r = eig(&m, true).unwrap();
        assert!(r.residual <= DEFAULT_EIG_TOL);
        let v = r.vectors.unwrap();
        // Spot-check one eigenpair explicitly.
        let k = 3;
        let vk: Vec<Complex64> = (0..12).map(|i| v.get(i, k)).collect();
        let mv = m.matvec(&vk);
        let lam = r.eigenvalues[k];
        let res: f64 = mv
            .iter()
            .zip(&vk)
            .map(|(a, b)| (a - b * lam).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(res <= 1e-8 * m.frobenius_norm());
    }

    #[test]
    fn eig_hermitian_complex_fast_path_is_real() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let n = 24;
        let mut m = FiniteMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                if i == j {
                    m.set(i, j, c(rng.gen_range(-1.0..1.0), 0.0));
                } else {
                    let v = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    m.set(i, j, v);
                    m.set(j, i, v.conj());
                }
            }
        }
        assert!(m.is_hermitian());
        let fast = eig(&m, false).unwrap();
        assert_eq!(fast.sweeps, 0);
        assert!(fast.eigenvalues.iter().all(|z| z.im == 0.0));
        // Cross-check against the general path via a non-Hermitian marker:
        // perturb by zero but break exact symmetry detection.
        let mut m2 = m.clone();
        m2.set(0, 0, m.get(0, 0) + c(0.0, 1e-300));
        let slow = eig(&m2, false).unwrap();
        assert!(slow.sweeps > 0);
        let mut a = sorted_re(fast.eigenvalues);
        let mut b: Vec<f64> = slow.eigenvalues.iter().map(|z| z.re).collect();
        b.sort_by(f64::total_cmp);
        for (x, y) in a.iter_mut().zip(&b) {
            assert_abs_diff_eq!(*x, *y, epsilon = 1e-9 * m.frobenius_norm().max(1.0));
        }
    }

    #[test]
    fn eig_rejects_oversized() {
        assert!(check_size(max_size() + 1).is_err());
        assert!(check_size(max_size()).is_ok());
    }

    #[test]
    fn svd_of_fixed_diagonal() {
        let mut m = FiniteMatrix::zeros(2);
        m.set(0, 0, c(3.0, 0.0));
        m.set(1, 1, c(0.0, -4.0));
        let sv = svd_values(&m).unwrap();
        assert_abs_diff_eq!(sv[0], 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sv[1], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn svd_rank_one() {
        // u v* with ‖u‖ = √2, ‖v‖ = √5, scale 2 → single value 2√10.
        let u = [c(1.0, 0.0), c(0.0, 1.0)];
        let v = [c(2.0, 0.0), c(1.0, 0.0)];
        let m = FiniteMatrix::from_fn(2, |i, j| u[i] * v[j].conj() * 2.0);
        let sv = svd_values(&m).unwrap();
        assert_abs_diff_eq!(sv[0], 2.0 * 10.0f64.sqrt(), epsilon = 1e-12);
        // The Gram route resolves vanishing singular values only to ‖M‖√ε.
        assert!(sv[1] < 1e-6 * sv[0]);
    }

    #[test]
    fn svd_of_unitary_is_ones() {
        // 2x2 rotation embedded with a complex phase: exactly unitary.
        let t = 0.3f64;
        let mut m = FiniteMatrix::zeros(3);
        m.set(0, 0, c(t.cos(), 0.0));
        m.set(0, 1, c(-t.sin(), 0.0));
        m.set(1, 0, c(t.sin(), 0.0));
        m.set(1, 1, c(t.cos(), 0.0));
        m.set(2, 2, c(0.0, 1.0));
        let sv = svd_values(&m).unwrap();
        for s in sv {
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn tridiagonal_free_operator_eigenvalues() {
        // Dirichlet truncation of the free Jacobi matrix: eigenvalues are
        // 2cos(kπ/(n+1)), a classical exact formula.
        let n = 60;
        let m = FiniteMatrix::from_fn(n, |i, j| {
            if i.abs_diff(j) == 1 {
                C_ONE
            } else {
                C_ZERO
            }
        });
        let r = eig(&m, false).unwrap();
        let got = sorted_re(r.eigenvalues);
        let mut want: Vec<f64> = (1..=n)
            .map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert_abs_diff_eq!(*g, *w, epsilon = 1e-10);
        }
    }

    #[test]
    fn resolvent_inverts_shifted_tridiagonal() {
        let n = 50;
        let m = FiniteMatrix::from_fn(n, |i, j| {
            if i.abs_diff(j) == 1 {
                C_ONE
            } else {
                C_ZERO
            }
        });
        let lambda = c(0.5, 0.7);
        let mut x = vec![vec![C_ZERO; n]; 2];
        x[0][3] = C_ONE;
        x[1][10] = c(2.0, -1.0);
        let y = resolvent_apply(&m, lambda, &x).unwrap();
        // Verify rows against a direct dense multiply.
        for (yr, xr) in y.iter().zip(&x) {
            for cidx in 0..n {
                let mut acc = C_ZERO;
                for i in 0..n {
                    acc += yr[i] * m.get(i, cidx);
                }
                acc -= yr[cidx] * lambda;
                assert_abs_diff_eq!(acc.re, xr[cidx].re, epsilon = 1e-11);
                assert_abs_diff_eq!(acc.im, xr[cidx].im, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn resolvent_rejects_spectral_point() {
        // λ = 0 is an eigenvalue of [[0,1],[1,0]]-like odd chains; the free
        // chain of odd length has 0 in its spectrum.
        let n = 51;
        let m = FiniteMatrix::from_fn(n, |i, j| {
            if i.abs_diff(j) == 1 {
                C_ONE
            } else {
                C_ZERO
            }
        });
        let x = vec![vec![C_ONE; n]];
        let r = resolvent_apply(&m, C_ZERO, &x);
        assert!(r.is_err());
    }

    #[test]
    fn dense_lu_fallback_agrees_with_band_path() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 30;
        let m = FiniteMatrix::from_fn(n, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let lambda = c(9.0, 1.0);
        let x = vec![(0..n).map(|i| c(i as f64, -1.0)).collect::<Vec<_>>()];
        // Dense path (bandwidths are ~n).
        let y = resolvent_apply(&m, lambda, &x).unwrap();
        // Residual is already verified inside; check shape only.
        assert_eq!(y.len(), 1);
        assert_eq!(y[0].len(), n);
    }

    #[test]
    fn balance_preserves_eigenvalues_of_graded_matrix() {
        // Wildly graded non-normal matrix: balancing must not change the
        // spectrum; values checked against the characteristic polynomial.
        let mut m = FiniteMatrix::zeros(3);
        m.set(0, 0, c(1.0, 0.0));
        m.set(0, 1, c(1e8, 0.0));
        m.set(1, 0, c(1e-8, 0.0));
        m.set(1, 1, c(2.0, 0.0));
        m.set(1, 2, c(1e6, 0.0));
        m.set(2, 1, c(1e-6, 0.0));
        m.set(2, 2, c(3.0, 0.0));
        let coeffs = char_poly(&m);
        let dcoeffs = poly_derivative(&coeffs);
        let r = eig(&m, false).unwrap();
        for lam in &r.eigenvalues {
            let corr = (poly_eval(&coeffs, *lam) / poly_eval(&dcoeffs, *lam)).norm();
            assert!(corr < 1e-8, "correction {corr:.2e}");
        }
    }

    #[test]
    fn trace_invariant_holds_on_random_40x40() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let n = 40;
        let m = FiniteMatrix::from_fn(n, |_, _| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let r = eig(&m, false).unwrap();
        let sum: Complex64 = r.eigenvalues.iter().sum();
        assert!((sum - m.trace()).norm() <= 1e-8 * (n as f64) * m.frobenius_norm());
    }
}

//! Regularized perturbation determinants and their zeros.
//!
//! For A = A₀ + B the function g_p(λ) = det_⌈p⌉ (A−λ)(A₀−λ)⁻¹ is analytic
//! off the bands, has modulus 1 at infinity, and vanishes exactly at the
//! discrete eigenvalues of A with matching order.  Everything here works on
//! truncations: T(λ) = B(A₀−λ)⁻¹ is assembled through banded resolvent
//! solves, and since B is compactly supported the nonzero spectrum of T
//! equals that of the small compressed block B_SS·R_SS over the support S,
//! which keeps each determinant evaluation cheap even at N = 2000.
//!
//! Zero location uses the argument principle: winding numbers of g_p over
//! candidate circles count zeros with multiplicity, and a modified Newton
//! step polishes the position afterwards.

use num_complex::Complex64;
use serde::Serialize;

use crate::band_geometry::BandSet;
use crate::linalg::{eig, resolvent_apply, FiniteMatrix};
use crate::perturbation::schatten_value;
use crate::{Error, Result};

/// One evaluation of g_p.
#[derive(Clone, Debug, Serialize)]
pub struct DetSample {
    pub lambda: Complex64,
    /// Regularization order ⌈p⌉.
    pub k: u32,
    pub value: Complex64,
    /// log|value|, computed in log space (−∞ at a zero).
    pub log_modulus: f64,
    /// C_p·‖B‖_{S_p}^p / dist^p(λ, 𝔢) with C₁ = 1, C₂ = 1/2; for other p
    /// the constant is 1 and only the ratio is meaningful.
    pub bound_side: f64,
}

/// T(λ) = B·(A₀−λ)⁻¹ in full N×N form.
pub fn relative_operator(
    a0: &FiniteMatrix,
    b: &FiniteMatrix,
    lambda: Complex64,
) -> Result<FiniteMatrix> {
    let n = a0.size();
    if b.size() != n {
        return Err(Error::InvalidParam(format!(
            "size mismatch: operator {n}, perturbation {}",
            b.size()
        )));
    }
    let rows: Vec<Vec<Complex64>> = (0..n).map(|i| b.row(i).to_vec()).collect();
    let out = resolvent_apply(a0, lambda, &rows)?;
    let mut t = FiniteMatrix::zeros(n);
    for (i, r) in out.into_iter().enumerate() {
        for (j, v) in r.into_iter().enumerate() {
            t.set(i, j, v);
        }
    }
    Ok(t)
}

/// det_k(I + T) = ∏_j (1+μ_j)·exp(Σ_{m=1}^{k−1} (−1)^m μ_j^m / m) over the
/// eigenvalues μ_j of T; k = 1 is the plain determinant.  Returns the value
/// and its log-modulus, accumulated in log space so that huge or vanishing
/// products stay meaningful.
pub fn det_regularized(t: &FiniteMatrix, k: u32) -> Result<(Complex64, f64)> {
    if k == 0 {
        return Err(Error::InvalidParam("regularization order must be ≥ 1".into()));
    }
    let mu = eig(t, false)?.eigenvalues;
    let mut log_mod = 0.0f64;
    let mut phase = 0.0f64;
    for m in mu {
        let one_plus = Complex64::new(1.0, 0.0) + m;
        if one_plus.norm() == 0.0 {
            return Ok((Complex64::new(0.0, 0.0), f64::NEG_INFINITY));
        }
        log_mod += one_plus.norm().ln();
        phase += one_plus.arg();
        let mut pow = Complex64::new(1.0, 0.0);
        let mut corr = Complex64::new(0.0, 0.0);
        for j in 1..k {
            pow *= m;
            let sign = if j % 2 == 1 { -1.0 } else { 1.0 };
            corr += pow * (sign / j as f64);
        }
        log_mod += corr.re;
        phase += corr.im;
    }
    let value = Complex64::from_polar(log_mod.exp(), phase);
    Ok((value, log_mod))
}

fn regularization_order(p: f64) -> u32 {
    (p.ceil() as u32).max(1)
}

fn small_k_constant(k: u32) -> f64 {
    match k {
        1 => 1.0,
        2 => 0.5,
        _ => 1.0,
    }
}

/// g_p(λ) on the truncation, through the compressed block.
///
/// Requires λ strictly off the band set and off the truncated spectrum;
/// η-neighborhood filtering is the caller's concern.
pub fn detg(
    a0: &FiniteMatrix,
    b: &FiniteMatrix,
    bands: &BandSet,
    lambda: Complex64,
    p: f64,
) -> Result<DetSample> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidParam(format!("Schatten exponent must be positive, got {p}")));
    }
    let n = a0.size();
    if b.size() != n {
        return Err(Error::InvalidParam(format!(
            "size mismatch: operator {n}, perturbation {}",
            b.size()
        )));
    }
    let dist = bands.dist_to_bands(lambda);
    if dist <= 1e-12 * bands.span() {
        return Err(Error::NearSingular(format!(
            "λ = {lambda} sits on the band set; g_p is only defined off it"
        )));
    }
    let k = regularization_order(p);
    let (value, log_modulus) = match b.support_range() {
        None => (Complex64::new(1.0, 0.0), 0.0),
        Some((lo, hi)) => {
            let sites: Vec<usize> = (lo..hi).collect();
            let m = sites.len();
            let unit_rows: Vec<Vec<Complex64>> = sites
                .iter()
                .map(|&i| {
                    let mut e = vec![Complex64::new(0.0, 0.0); n];
                    e[i] = Complex64::new(1.0, 0.0);
                    e
                })
                .collect();
            let res_rows = resolvent_apply(a0, lambda, &unit_rows)?;
            let mut teff = FiniteMatrix::zeros(m);
            for (i, &si) in sites.iter().enumerate() {
                for (j, &sj) in sites.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (t, &st) in sites.iter().enumerate() {
                        let bv = b.get(si, st);
                        if bv != Complex64::new(0.0, 0.0) {
                            acc += bv * res_rows[t][sj];
                        }
                    }
                    teff.set(i, j, acc);
                }
            }
            det_regularized(&teff, k)?
        }
    };
    let bnorm = schatten_value(b, p).unwrap_or(0.0);
    let bound_side = small_k_constant(k) * bnorm.powf(p) / dist.powf(p);
    Ok(DetSample { lambda, k, value, log_modulus, bound_side })
}

const WINDING_NODES: usize = 256;
const MAX_SHRINKS: usize = 3;

enum Winding {
    Count(usize),
    Unreliable(String),
}

fn winding_once(
    a0: &FiniteMatrix,
    b: &FiniteMatrix,
    bands: &BandSet,
    p: f64,
    center: Complex64,
    radius: f64,
) -> Result<Winding> {
    let mut values = Vec::with_capacity(WINDING_NODES);
    let mut max_mod = 0.0f64;
    for j in 0..WINDING_NODES {
        let th = std::f64::consts::TAU * j as f64 / WINDING_NODES as f64;
        let z = center + Complex64::from_polar(radius, th);
        let s = detg(a0, b, bands, z, p)?;
        max_mod = max_mod.max(s.value.norm());
        values.push(s.value);
    }
    if max_mod == 0.0 {
        return Ok(Winding::Unreliable("g vanished on the whole circle".into()));
    }
    let floor = 1e-8 * max_mod;
    let mut total = 0.0f64;
    for j in 0..WINDING_NODES {
        let a = values[j];
        let bb = values[(j + 1) % WINDING_NODES];
        if a.norm() < floor || bb.norm() < floor {
            return Ok(Winding::Unreliable(format!(
                "circle of radius {radius} passes within the noise floor of a zero"
            )));
        }
        let step = (bb / a).arg();
        if step.abs() > std::f64::consts::FRAC_PI_2 {
            return Ok(Winding::Unreliable(format!(
                "argument jumped by {step:.3} between adjacent nodes at radius {radius}"
            )));
        }
        total += step;
    }
    let w = (total / std::f64::consts::TAU).round();
    if (total - w * std::f64::consts::TAU).abs() > 0.1 {
        return Ok(Winding::Unreliable(format!(
            "argument increment {total:.4} is not close to a multiple of 2π"
        )));
    }
    if w < 0.0 {
        return Ok(Winding::Unreliable(format!(
            "negative winding {w} for an analytic function; radius {radius} unusable"
        )));
    }
    Ok(Winding::Count(w as usize))
}

/// Polish a zero of known multiplicity inside the disk with the modified
/// Newton step z ← z − m·g/g′; falls back to the disk center if the
/// iteration leaves the doubled disk.
fn polish_zero(
    a0: &FiniteMatrix,
    b: &FiniteMatrix,
    bands: &BandSet,
    p: f64,
    center: Complex64,
    radius: f64,
    mult: usize,
) -> Result<Complex64> {
    let g = |z: Complex64| -> Result<Complex64> { Ok(detg(a0, b, bands, z, p)?.value) };
    let h = radius * 1e-4;
    let mut z = center;
    for _ in 0..50 {
        let gz = g(z)?;
        let gp = (g(z + Complex64::new(h, 0.0))? - g(z - Complex64::new(h, 0.0))?)
            / Complex64::new(2.0 * h, 0.0);
        if gp.norm() == 0.0 {
            break;
        }
        let step = gz / gp * mult as f64;
        z -= step;
        if (z - center).norm() > 2.0 * radius {
            return Ok(center);
        }
        if step.norm() <= 1e-10 * (1.0 + z.norm()) {
            return Ok(z);
        }
    }
    Ok(z)
}

/// Count and locate zeros of g_p inside disks around the candidates.
///
/// Each disk must stay clear of the band set.  The winding number over the
/// circle gives the zero count with multiplicity; a circle that runs too
/// close to a zero is retried with half the radius, up to three times.
pub fn zeros_near(
    a0: &FiniteMatrix,
    b: &FiniteMatrix,
    bands: &BandSet,
    p: f64,
    candidates: &[Complex64],
    radius: f64,
) -> Result<Vec<(Complex64, usize)>> {
    if !(radius > 0.0) {
        return Err(Error::InvalidParam("candidate radius must be positive".into()));
    }
    let mut out = Vec::new();
    for &c in candidates {
        if bands.dist_to_bands(c) <= radius {
            return Err(Error::InvalidParam(format!(
                "candidate disk around {c} with radius {radius} touches the band set"
            )));
        }
        let mut r = radius;
        let mut count = None;
        let mut last_reason = String::new();
        for _ in 0..=MAX_SHRINKS {
            match winding_once(a0, b, bands, p, c, r)? {
                Winding::Count(w) => {
                    count = Some(w);
                    break;
                }
                Winding::Unreliable(reason) => {
                    last_reason = reason;
                    r *= 0.5;
                }
            }
        }
        let Some(w) = count else {
            return Err(Error::WindingUnstable { center: c, reason: last_reason });
        };
        if w > 0 {
            let z = polish_zero(a0, b, bands, p, c, r, w)?;
            out.push((z, w));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobi::{FiniteBandOperator, PeriodicJacobiSpec};
    use crate::perturbation::{PerturbationSpec, PerturbationVariant};
    use approx::assert_abs_diff_eq;

    fn free_op() -> FiniteBandOperator {
        FiniteBandOperator::periodic(PeriodicJacobiSpec::new(vec![1.0], vec![0.0]).unwrap())
            .unwrap()
    }

    fn rank_one_at(site: i64, c: Complex64) -> PerturbationSpec {
        PerturbationSpec::new(PerturbationVariant::RankOne { site, amplitude: c }, 1.0, None)
            .unwrap()
    }

    #[test]
    fn zero_perturbation_gives_zero_relative_operator() {
        let a0 = free_op().truncate(12).unwrap();
        let b = FiniteMatrix::zeros(12);
        let t = relative_operator(&a0, &b, Complex64::new(3.0, 0.4)).unwrap();
        assert_eq!(t.max_abs(), 0.0);
    }

    #[test]
    fn rank_one_against_diagonal_operator() {
        // A₀ = diag(d), B = c·e₂e₂*: T must be c/(d₂−λ) at entry (2,2) only.
        let d = [0.4, -1.0, 2.0, 3.3, -0.7];
        let a0 = FiniteMatrix::from_fn(5, |i, j| {
            if i == j {
                Complex64::new(d[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let c = Complex64::new(1.5, -0.5);
        let mut b = FiniteMatrix::zeros(5);
        b.set(2, 2, c);
        let lam = Complex64::new(5.0, 1.0);
        let t = relative_operator(&a0, &b, lam).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let want = if (i, j) == (2, 2) {
                    c / (Complex64::new(d[2], 0.0) - lam)
                } else {
                    Complex64::new(0.0, 0.0)
                };
                assert_abs_diff_eq!((t.get(i, j) - want).norm(), 0.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn relative_operator_obeys_the_ideal_bound() {
        use crate::linalg::svd_values;
        let a0 = free_op().truncate(40).unwrap();
        let spec = PerturbationSpec::new(
            PerturbationVariant::RandomBanded { bandwidth: 1, length: 5, amplitude: 0.7, seed: 3 },
            1.0,
            None,
        )
        .unwrap();
        let b = spec.build(40).unwrap();
        let lam = Complex64::new(3.0, 0.5);
        // Distance to the truncated spectrum via the symmetric eigensolver.
        let evs = eig(&a0, false).unwrap().eigenvalues;
        let dist = evs.iter().map(|m| (lam - m).norm()).fold(f64::INFINITY, f64::min);
        let t = relative_operator(&a0, &b, lam).unwrap();
        for p in [1.0, 2.0] {
            let tn: f64 = svd_values(&t).unwrap().iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p);
            let bn: f64 = svd_values(&b).unwrap().iter().map(|s| s.powf(p)).sum::<f64>().powf(1.0 / p);
            assert!(tn <= bn / dist + 1e-10, "p={p}: ‖T‖={tn} > ‖B‖/dist={}", bn / dist);
        }
    }

    #[test]
    fn det_of_zero_matrix_is_one() {
        let t = FiniteMatrix::zeros(7);
        for k in 1..=3 {
            let (v, lm) = det_regularized(&t, k).unwrap();
            assert_abs_diff_eq!((v - Complex64::new(1.0, 0.0)).norm(), 0.0, epsilon = 1e-14);
            assert_abs_diff_eq!(lm, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn rank_one_second_order_formula() {
        let mu = Complex64::new(0.3, -0.8);
        let mut t = FiniteMatrix::zeros(4);
        t.set(1, 1, mu);
        let (v, lm) = det_regularized(&t, 2).unwrap();
        let want = (Complex64::new(1.0, 0.0) + mu) * (-mu).exp();
        assert_abs_diff_eq!((v - want).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(lm, want.norm().ln(), epsilon = 1e-12);
    }

    #[test]
    fn first_order_matches_plain_lu_determinant() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let n = 6;
            let t = FiniteMatrix::from_fn(n, |_, _| {
                Complex64::new(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8))
            });
            // Independent oracle: Gaussian elimination with partial pivoting
            // on I + T, written out here rather than shared with the library.
            let mut m: Vec<Vec<Complex64>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            t.get(i, j)
                                + if i == j {
                                    Complex64::new(1.0, 0.0)
                                } else {
                                    Complex64::new(0.0, 0.0)
                                }
                        })
                        .collect()
                })
                .collect();
            let mut det = Complex64::new(1.0, 0.0);
            for col in 0..n {
                let piv = (col..n).max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm())).unwrap();
                if piv != col {
                    m.swap(piv, col);
                    det = -det;
                }
                det *= m[col][col];
                for r in col + 1..n {
                    let f = m[r][col] / m[col][col];
                    for cc in col..n {
                        let sub = f * m[col][cc];
                        m[r][cc] -= sub;
                    }
                }
            }
            let (v, _) = det_regularized(&t, 1).unwrap();
            assert!(
                (v - det).norm() <= 1e-8 * det.norm().max(1.0),
                "det mismatch: {v} vs {det}"
            );
        }
    }

    #[test]
    fn detg_of_zero_perturbation_is_one() {
        let op = free_op();
        let a0 = op.truncate(30).unwrap();
        let b = FiniteMatrix::zeros(30);
        let s = detg(&a0, &b, op.bands(), Complex64::new(4.0, 0.0), 1.0).unwrap();
        assert_eq!(s.value, Complex64::new(1.0, 0.0));
        assert_eq!(s.log_modulus, 0.0);
        assert_eq!(s.k, 1);
        assert_eq!(s.bound_side, 0.0);
    }

    #[test]
    fn detg_matches_the_free_resolvent_formula() {
        // g₁(λ) = 1 + c·G₀(λ) with G₀(λ) = −(λ²−4)^{−1/2} for the free
        // Jacobi operator; at λ = 4 this is 1 − c/√12.
        let op = free_op();
        let n = 2000;
        let a0 = op.truncate(n).unwrap();
        let b = rank_one_at(0, Complex64::new(1.5, 0.0)).build(n).unwrap();
        let s = detg(&a0, &b, op.bands(), Complex64::new(4.0, 0.0), 1.0).unwrap();
        let want = 1.0 - 1.5 / 12.0f64.sqrt();
        assert_abs_diff_eq!(s.value.re, want, epsilon = 1e-4);
        assert_abs_diff_eq!(s.value.im, 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(s.log_modulus, s.value.norm().ln(), epsilon = 1e-12);
    }

    #[test]
    fn compressed_and_full_relative_operators_agree() {
        // detg works on the support-compressed block; the full N×N product
        // must give the same value.
        let op = free_op();
        let n = 60;
        let a0 = op.truncate(n).unwrap();
        let spec = PerturbationSpec::new(
            PerturbationVariant::RandomBanded { bandwidth: 2, length: 6, amplitude: 0.6, seed: 9 },
            1.0,
            None,
        )
        .unwrap();
        let b = spec.build(n).unwrap();
        for lam in [Complex64::new(3.2, 0.0), Complex64::new(-1.0, 2.0), Complex64::new(0.3, -1.1)] {
            let s = detg(&a0, &b, op.bands(), lam, 2.0).unwrap();
            let t = relative_operator(&a0, &b, lam).unwrap();
            let (v_full, _) = det_regularized(&t, 2).unwrap();
            assert!(
                (s.value - v_full).norm() <= 1e-9 * v_full.norm().max(1.0),
                "λ={lam}: compressed {} vs full {v_full}",
                s.value
            );
        }
    }

    #[test]
    fn first_order_log_bound_holds_on_samples() {
        use crate::linalg::svd_values;
        use rand::{Rng, SeedableRng};
        let op = free_op();
        let n = 50;
        let a0 = op.truncate(n).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for seed in 0..20u64 {
            let spec = PerturbationSpec::new(
                PerturbationVariant::RandomBanded {
                    bandwidth: 1,
                    length: 4,
                    amplitude: 0.5,
                    seed,
                },
                1.0,
                None,
            )
            .unwrap();
            let b = spec.build(n).unwrap();
            let lam = Complex64::new(rng.gen_range(2.5..6.0), rng.gen_range(-2.0..2.0));
            let s = detg(&a0, &b, op.bands(), lam, 1.0).unwrap();
            let t = relative_operator(&a0, &b, lam).unwrap();
            let s1: f64 = svd_values(&t).unwrap().iter().sum();
            assert!(
                s.log_modulus <= s1 + 1e-10,
                "seed {seed}: log|g₁| = {} exceeds ‖T‖_S₁ = {s1}",
                s.log_modulus
            );
        }
    }

    #[test]
    fn modulus_tends_to_one_at_infinity() {
        let op = free_op();
        let n = 200;
        let a0 = op.truncate(n).unwrap();
        let b = rank_one_at(0, Complex64::new(1.5, 0.0)).build(n).unwrap();
        let mut prev = f64::INFINITY;
        for lam in [1e3, 1e4] {
            let s = detg(&a0, &b, op.bands(), Complex64::new(lam, 0.0), 1.0).unwrap();
            let dev = s.log_modulus.abs();
            assert!(dev <= 10.0 * 1.5 / lam, "log|g| = {dev} too large at λ = {lam}");
            assert!(dev < prev);
            prev = dev;
        }
    }

    #[test]
    fn no_zeros_without_perturbation() {
        let op = free_op();
        let a0 = op.truncate(40).unwrap();
        let b = FiniteMatrix::zeros(40);
        let zeros = zeros_near(
            &a0,
            &b,
            op.bands(),
            1.0,
            &[Complex64::new(2.6, 0.0), Complex64::new(0.0, 1.5)],
            0.3,
        )
        .unwrap();
        assert!(zeros.is_empty());
    }

    #[test]
    fn rank_one_zero_sits_at_the_secular_root() {
        // √(λ²−4) = c with the branch ~λ at ∞ gives λ = √(4+c²) = 2.5 for
        // c = 3/2.
        let op = free_op();
        let n = 400;
        let a0 = op.truncate(n).unwrap();
        let b = rank_one_at(0, Complex64::new(1.5, 0.0)).build(n).unwrap();
        let zeros = zeros_near(&a0, &b, op.bands(), 1.0, &[Complex64::new(2.4, 0.1)], 0.3).unwrap();
        assert_eq!(zeros.len(), 1);
        let (z, w) = zeros[0];
        assert_eq!(w, 1);
        assert_abs_diff_eq!(z.re, 2.5, epsilon = 1e-8);
        assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn decoupled_copies_double_the_zero_count() {
        let op = free_op();
        let n = 400;
        let a0 = op.truncate(n).unwrap();
        let c = Complex64::new(1.5, 0.0);
        let b1 = rank_one_at(-40, c).build(n).unwrap();
        let b2 = rank_one_at(40, c).build(n).unwrap();
        let both = b1.add(&b2);
        let zeros =
            zeros_near(&a0, &both, op.bands(), 1.0, &[Complex64::new(2.5, 0.0)], 0.3).unwrap();
        let total: usize = zeros.iter().map(|(_, w)| w).sum();
        assert_eq!(total, 2, "two far-apart copies must contribute two zeros");
    }

    #[test]
    fn candidate_disk_may_not_touch_the_bands() {
        let op = free_op();
        let a0 = op.truncate(30).unwrap();
        let b = rank_one_at(0, Complex64::new(1.0, 0.0)).build(30).unwrap();
        let err = zeros_near(&a0, &b, op.bands(), 1.0, &[Complex64::new(2.1, 0.0)], 0.3);
        assert!(matches!(err, Err(Error::InvalidParam(_))));
    }

    #[test]
    fn detg_rejects_lambda_on_the_bands() {
        let op = free_op();
        let a0 = op.truncate(30).unwrap();
        let b = rank_one_at(0, Complex64::new(1.0, 0.0)).build(30).unwrap();
        let err = detg(&a0, &b, op.bands(), Complex64::new(0.5, 0.0), 1.0);
        assert!(matches!(err, Err(Error::NearSingular(_))));
    }
}

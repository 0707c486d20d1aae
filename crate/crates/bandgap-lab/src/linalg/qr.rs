//! Dense complex eigensolver: balancing, Householder reduction to upper
//! Hessenberg form, and an explicit-shift QR iteration on the Hessenberg
//! matrix (the classic EISPACK `comqr` scheme, kept cache friendly by
//! deferring the column rotations into one row-major pass per sweep).
//!
//! The reduction skips columns that are already in Hessenberg form and works
//! on the true support of each Householder vector, so banded matrices with a
//! dense window (the shape every perturbed operator here has) reduce in
//! O(N·w²) instead of O(N³).

use num_complex::Complex64;

use super::matrix::{C_ONE, C_ZERO};
use crate::{Error, Result};

/// Osborne balancing in radix-2 arithmetic: rescales rows/columns by exact
/// powers of two until row and column 1-norms agree, which costs no rounding
/// and can rescue wildly graded matrices (companion matrices in particular).
/// Returns the diagonal scaling; eigenvectors must be multiplied back.
pub(super) fn balance(h: &mut [Complex64], n: usize) -> Vec<f64> {
    let mut scale = vec![1.0f64; n];
    const RADIX: f64 = 2.0;
    for _pass in 0..100 {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += h[j * n + i].l1_norm();
                    r += h[i * n + j].l1_norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            while c < r / RADIX {
                f *= RADIX;
                c *= RADIX;
                r /= RADIX;
            }
            while c >= r * RADIX {
                f /= RADIX;
                c /= RADIX;
                r *= RADIX;
            }
            if c + r < 0.95 * s {
                done = false;
                scale[i] *= f;
                let inv = 1.0 / f;
                for j in 0..n {
                    h[i * n + j] *= inv;
                }
                for j in 0..n {
                    h[j * n + i] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
    scale
}

/// One Householder reflector P = I - tau*v*v^H acting on rows
/// `start..start + v.len()`.  tau is real because v is chosen as x - beta*e1
/// with beta = -(x0/|x0|)*‖x‖, which makes P a Hermitian involution.
pub(super) struct Reflector {
    pub start: usize,
    pub v: Vec<Complex64>,
    pub tau: f64,
}

/// In-place reduction to upper Hessenberg form by unitary similarity.
/// Returns the reflectors for later Q accumulation.
pub(super) fn hessenberg(h: &mut [Complex64], n: usize) -> Vec<Reflector> {
    let mut refl = Vec::new();
    if n < 3 {
        return refl;
    }
    let mut w = vec![C_ZERO; n];
    let mut u = vec![C_ZERO; n];
    for j in 0..n - 2 {
        // Support of the column below the subdiagonal.
        let mut last = j + 1;
        for i in j + 2..n {
            if h[i * n + j] != C_ZERO {
                last = i;
            }
        }
        if last == j + 1 {
            continue; // column already reduced
        }
        let len = last - j;
        let mut v: Vec<Complex64> = (0..len).map(|k| h[(j + 1 + k) * n + j]).collect();
        // Work on the column scaled by its largest entry so that squared
        // norms neither underflow (tails ~1e-170 would square to zero and
        // leave junk below the subdiagonal) nor drive tau to infinity.
        // Divide rather than multiply by a reciprocal: 1/vmax overflows
        // once vmax goes subnormal.
        let vmax = v.iter().map(|z| z.l1_norm()).fold(0.0f64, f64::max);
        if vmax == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vmax;
        }
        let alpha = v[0];
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let phase = if alpha == C_ZERO { C_ONE } else { alpha / alpha.norm() };
        let beta = -phase * norm;
        v[0] = alpha - beta;
        let vhv = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if vhv == 0.0 {
            continue;
        }
        let tau = 2.0 / vhv;

        // Left: rows j+1..=last, columns j..n.
        for c in j..n {
            let mut acc = C_ZERO;
            for (k, vk) in v.iter().enumerate() {
                acc += vk.conj() * h[(j + 1 + k) * n + c];
            }
            w[c] = acc * tau;
        }
        for (k, vk) in v.iter().enumerate() {
            let row = &mut h[(j + 1 + k) * n..(j + 2 + k) * n];
            for c in j..n {
                row[c] -= vk * w[c];
            }
        }

        // Right: all rows, columns j+1..=last.
        for r in 0..n {
            let row = &h[r * n..(r + 1) * n];
            let mut acc = C_ZERO;
            for (k, vk) in v.iter().enumerate() {
                acc += row[j + 1 + k] * vk;
            }
            u[r] = acc * tau;
        }
        for r in 0..n {
            if u[r] == C_ZERO {
                continue;
            }
            let row = &mut h[r * n..(r + 1) * n];
            for (k, vk) in v.iter().enumerate() {
                row[j + 1 + k] -= u[r] * vk.conj();
            }
        }

        h[(j + 1) * n + j] = beta * vmax;
        for i in j + 2..=last {
            h[i * n + j] = C_ZERO;
        }
        refl.push(Reflector { start: j + 1, v, tau });
    }
    refl
}

/// Q = P_0 P_1 ... P_m accumulated backwards from the identity.
pub(super) fn accumulate_q(reflectors: &[Reflector], n: usize) -> Vec<Complex64> {
    let mut q = vec![C_ZERO; n * n];
    for i in 0..n {
        q[i * n + i] = C_ONE;
    }
    let mut w = vec![C_ZERO; n];
    for r in reflectors.iter().rev() {
        let rows = r.start..r.start + r.v.len();
        for c in 0..n {
            let mut acc = C_ZERO;
            for (k, vk) in r.v.iter().enumerate() {
                acc += vk.conj() * q[(rows.start + k) * n + c];
            }
            w[c] = acc * r.tau;
        }
        for (k, vk) in r.v.iter().enumerate() {
            let row = &mut q[(rows.start + k) * n..(rows.start + k + 1) * n];
            for c in 0..n {
                row[c] -= vk * w[c];
            }
        }
    }
    q
}

/// Complex Givens rotation: returns (c, s, r) with c real such that
/// [c s; -conj(s) c] * [x; y] = [r; 0].
#[inline]
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64, Complex64) {
    let nx = x.norm();
    let ny = y.norm();
    if ny == 0.0 {
        return (1.0, C_ZERO, x);
    }
    if nx == 0.0 {
        return (0.0, C_ONE, y);
    }
    let h = nx.hypot(ny);
    let c = nx / h;
    let phase = x / nx;
    // Divide y by h directly: 1/h would overflow for subnormal pairs.
    let s = phase * (y.conj() / h);
    let r = phase * h;
    (c, s, r)
}

/// Explicit-shift QR on an upper Hessenberg matrix.  Reduces `h` to upper
/// triangular (Schur) form, optionally accumulating the similarity into `z`.
/// Returns the eigenvalues in deflation order plus the sweep count.
///
/// When `z` is None the rotations are only applied inside the active block:
/// the leading block is block-triangularly decoupled, so entries above it
/// cannot influence any remaining eigenvalue.
pub(super) fn schur(
    h: &mut [Complex64],
    n: usize,
    mut z: Option<&mut [Complex64]>,
    cap: usize,
) -> Result<(Vec<Complex64>, usize)> {
    let mut eigs = vec![C_ZERO; n];
    if n == 0 {
        return Ok((eigs, 0));
    }
    let hnorm = h.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if hnorm == 0.0 {
        return Ok((eigs, 0));
    }
    let mut rot_c = vec![0.0f64; n];
    let mut rot_s = vec![C_ZERO; n];
    let mut hi = n - 1;
    let mut its_here = 0usize;
    let mut sweeps = 0usize;
    loop {
        // Deflation scan: find the start of the trailing irreducible block.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[lo * n + lo - 1].l1_norm();
            let mut tst = h[(lo - 1) * n + lo - 1].l1_norm() + h[lo * n + lo].l1_norm();
            if tst == 0.0 {
                tst = hnorm;
            }
            if sub <= f64::EPSILON * tst {
                h[lo * n + lo - 1] = C_ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eigs[hi] = h[hi * n + hi];
            its_here = 0;
            if hi == 0 {
                break;
            }
            hi -= 1;
            continue;
        }
        if sweeps >= cap {
            return Err(Error::NumericalFailure(format!(
                "QR iteration exceeded {cap} sweeps at block [{lo}, {hi}]"
            )));
        }

        let sigma = if its_here > 0 && its_here % 10 == 0 {
            // Exceptional shift to break rare limit cycles.
            let x = h[hi * n + hi - 1].norm();
            let y = if hi >= 2 && hi - 1 > lo { h[(hi - 1) * n + hi - 2].norm() } else { 0.0 };
            h[hi * n + hi] + 0.75 * (x + y)
        } else {
            // Wilkinson: eigenvalue of the trailing 2x2 closest to the corner.
            let a = h[(hi - 1) * n + hi - 1];
            let b = h[(hi - 1) * n + hi];
            let c = h[hi * n + hi - 1];
            let d = h[hi * n + hi];
            let mid = (a + d) * 0.5;
            let disc = (mid * mid - (a * d - b * c)).sqrt();
            let m1 = mid + disc;
            let m2 = mid - disc;
            if (m1 - d).norm_sqr() <= (m2 - d).norm_sqr() {
                m1
            } else {
                m2
            }
        };

        // Left pass: R = G_{hi-1}..G_lo (H - sigma), rotations recorded.
        for i in lo..=hi {
            h[i * n + i] -= sigma;
        }
        let full = z.is_some();
        let colend = if full { n } else { hi + 1 };
        for j in lo..hi {
            let x = h[j * n + j];
            let y = h[(j + 1) * n + j];
            let (c, s, r) = givens(x, y);
            let (top, bot) = h.split_at_mut((j + 1) * n);
            let row_j = &mut top[j * n + j + 1..j * n + colend];
            let row_j1 = &mut bot[j + 1..colend];
            for (xk, yk) in row_j.iter_mut().zip(row_j1.iter_mut()) {
                let a = *xk;
                let b = *yk;
                *xk = a * c + s * b;
                *yk = b * c - s.conj() * a;
            }
            h[j * n + j] = r;
            h[(j + 1) * n + j] = C_ZERO;
            rot_c[j] = c;
            rot_s[j] = s;
        }

        // Right pass, row major: H <- R G_lo^H .. G_{hi-1}^H.
        let rowstart = if full { 0 } else { lo };
        for i in rowstart..=hi {
            let row = &mut h[i * n..i * n + n];
            let jstart = lo.max(i.saturating_sub(1));
            for j in jstart..hi {
                let x = row[j];
                let y = row[j + 1];
                row[j] = x * rot_c[j] + y * rot_s[j].conj();
                row[j + 1] = y * rot_c[j] - x * rot_s[j];
            }
        }
        if let Some(zm) = z.as_deref_mut() {
            for i in 0..n {
                let row = &mut zm[i * n..i * n + n];
                for j in lo..hi {
                    let x = row[j];
                    let y = row[j + 1];
                    row[j] = x * rot_c[j] + y * rot_s[j].conj();
                    row[j + 1] = y * rot_c[j] - x * rot_s[j];
                }
            }
        }
        for i in lo..=hi {
            h[i * n + i] += sigma;
        }
        its_here += 1;
        sweeps += 1;
    }
    Ok((eigs, sweeps))
}

/// Right eigenvectors from the Schur factorization A = Z T Z^H:
/// back-substitution on T, then one multiply by Z.  Column k of the result
/// is the (unit-norm) eigenvector for T[k][k].
pub(super) fn schur_vectors(t: &[Complex64], zm: &[Complex64], n: usize) -> Vec<Complex64> {
    let tnorm = t.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let smin = f64::EPSILON * tnorm.max(f64::MIN_POSITIVE);
    let mut out = vec![C_ZERO; n * n];
    let mut x = vec![C_ZERO; n];
    for k in 0..n {
        let lam = t[k * n + k];
        x[k] = C_ONE;
        for i in (0..k).rev() {
            let mut s = C_ZERO;
            for j in i + 1..=k {
                s += t[i * n + j] * x[j];
            }
            let mut den = t[i * n + i] - lam;
            if den.norm() < smin {
                den = Complex64::new(smin, 0.0);
            }
            x[i] = -s / den;
            if x[i].norm() > 1e120 {
                // Rescale a run-away chain (near-defective cluster).
                for xi in x[i..=k].iter_mut() {
                    *xi *= 1e-120;
                }
            }
        }
        for r in 0..n {
            let row = &zm[r * n..r * n + n];
            let mut acc = C_ZERO;
            for j in 0..=k {
                acc += row[j] * x[j];
            }
            out[r * n + k] = acc;
        }
        let nrm = out
            .iter()
            .skip(k)
            .step_by(n)
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt();
        if nrm > 0.0 {
            let inv = 1.0 / nrm;
            for r in 0..n {
                out[r * n + k] *= inv;
            }
        }
        for xi in x[0..=k].iter_mut() {
            *xi = C_ZERO;
        }
    }
    out
}

//! LU factorizations backing the resolvent solves.  A truncated band
//! operator shifted by a spectral parameter is narrowly banded, so the
//! workhorse is a band-storage LU with partial pivoting; a dense fallback
//! covers wide matrices.  Both factor through a getter closure so callers
//! can hand in shifted or transposed views without materializing them.

use num_complex::Complex64;

use super::matrix::C_ZERO;
use crate::{Error, Result};

/// Band LU with partial pivoting in LAPACK band storage: an (kl, ku) band
/// matrix factors within kl + (kl + ku) + 1 diagonals, since row swaps push
/// fill at most kl positions above the original band.
pub(crate) struct BandLu {
    n: usize,
    kl: usize,
    kv: usize, // kl + ku: upper bandwidth of U including pivot fill
    ldab: usize,
    ab: Vec<Complex64>,
    ipiv: Vec<usize>,
}

impl BandLu {
    pub fn factor_with(
        n: usize,
        kl: usize,
        ku: usize,
        get: impl Fn(usize, usize) -> Complex64,
    ) -> Result<BandLu> {
        let kv = kl + ku;
        let ldab = kl + kv + 1;
        let mut ab = vec![C_ZERO; ldab * n];
        let mut amax = 0.0f64;
        for j in 0..n {
            let ilo = j.saturating_sub(ku);
            let ihi = (j + kl).min(n - 1);
            for i in ilo..=ihi {
                let v = get(i, j);
                amax = amax.max(v.norm());
                ab[ldab * j + kv + i - j] = v;
            }
        }
        let tiny = (n as f64) * f64::EPSILON * amax;
        let mut ipiv = vec![0usize; n];
        for j in 0..n {
            let km = kl.min(n - 1 - j);
            let mut jp = 0usize;
            let mut pmax = ab[ldab * j + kv].norm();
            for i in 1..=km {
                let v = ab[ldab * j + kv + i].norm();
                if v > pmax {
                    pmax = v;
                    jp = i;
                }
            }
            ipiv[j] = j + jp;
            let piv = ab[ldab * j + kv + jp];
            if piv.norm() <= tiny {
                return Err(Error::NearSingular(format!(
                    "band LU pivot {:.3e} at column {j} (matrix scale {amax:.3e})",
                    piv.norm()
                )));
            }
            if jp != 0 {
                let cend = (j + kv).min(n - 1);
                for c in j..=cend {
                    ab.swap(ldab * c + kv + j - c, ldab * c + kv + j + jp - c);
                }
            }
            if km > 0 {
                let pivinv = piv.finv();
                for i in 1..=km {
                    ab[ldab * j + kv + i] *= pivinv;
                }
                let cend = (j + kv).min(n - 1);
                for c in j + 1..=cend {
                    let ajc = ab[ldab * c + kv + j - c];
                    if ajc != C_ZERO {
                        for i in 1..=km {
                            let m = ab[ldab * j + kv + i];
                            ab[ldab * c + kv + j + i - c] -= m * ajc;
                        }
                    }
                }
            }
        }
        Ok(BandLu { n, kl, kv, ldab, ab, ipiv })
    }

    /// Solve A x = b in place.
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let (n, kl, kv, ldab) = (self.n, self.kl, self.kv, self.ldab);
        debug_assert_eq!(b.len(), n);
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                b.swap(j, p);
            }
            let km = kl.min(n - 1 - j);
            let bj = b[j];
            if bj != C_ZERO {
                for i in 1..=km {
                    b[j + i] -= self.ab[ldab * j + kv + i] * bj;
                }
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            let jend = (i + kv).min(n - 1);
            for j in i + 1..=jend {
                s -= self.ab[ldab * j + kv + i - j] * b[j];
            }
            b[i] = s / self.ab[ldab * i + kv];
        }
    }
}

/// Dense LU with partial pivoting; fallback for matrices that are not
/// usefully banded.
pub(crate) struct DenseLu {
    n: usize,
    lu: Vec<Complex64>,
    ipiv: Vec<usize>,
}

impl DenseLu {
    pub fn factor_with(
        n: usize,
        get: impl Fn(usize, usize) -> Complex64,
    ) -> Result<DenseLu> {
        let mut lu = vec![C_ZERO; n * n];
        let mut amax = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let v = get(i, j);
                amax = amax.max(v.norm());
                lu[i * n + j] = v;
            }
        }
        let tiny = (n as f64) * f64::EPSILON * amax;
        let mut ipiv = vec![0usize; n];
        for k in 0..n {
            let mut p = k;
            let mut pmax = lu[k * n + k].norm();
            for i in k + 1..n {
                let v = lu[i * n + k].norm();
                if v > pmax {
                    pmax = v;
                    p = i;
                }
            }
            ipiv[k] = p;
            if pmax <= tiny {
                return Err(Error::NearSingular(format!(
                    "dense LU pivot {pmax:.3e} at column {k} (matrix scale {amax:.3e})"
                )));
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
            }
            let piv = lu[k * n + k];
            let pivinv = piv.finv();
            for i in k + 1..n {
                let m = lu[i * n + k] * pivinv;
                lu[i * n + k] = m;
                if m != C_ZERO {
                    let (top, bot) = lu.split_at_mut(i * n);
                    let krow = &top[k * n + k + 1..k * n + n];
                    let irow = &mut bot[k + 1..n];
                    for (iv, kv2) in irow.iter_mut().zip(krow) {
                        *iv -= m * kv2;
                    }
                }
            }
        }
        Ok(DenseLu { n, lu, ipiv })
    }

    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        for k in 0..n {
            let p = self.ipiv[k];
            if p != k {
                b.swap(k, p);
            }
        }
        for k in 0..n {
            let bk = b[k];
            if bk != C_ZERO {
                for i in k + 1..n {
                    b[i] -= self.lu[i * n + k] * bk;
                }
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..n {
                s -= self.lu[i * n + j] * b[j];
            }
            b[i] = s / self.lu[i * n + i];
        }
    }
}

/// Either factorization behind one face.
pub(crate) enum AnyLu {
    Band(BandLu),
    Dense(DenseLu),
}

impl AnyLu {
    /// Factor with bandwidth-based dispatch: narrow bands go to band
    /// storage, anything wider than n/4 total goes dense.
    pub fn factor_with(
        n: usize,
        kl: usize,
        ku: usize,
        get: impl Fn(usize, usize) -> Complex64,
    ) -> Result<AnyLu> {
        if kl + ku + 1 <= n / 4 {
            Ok(AnyLu::Band(BandLu::factor_with(n, kl, ku, get)?))
        } else {
            Ok(AnyLu::Dense(DenseLu::factor_with(n, get)?))
        }
    }

    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        match self {
            AnyLu::Band(f) => f.solve_in_place(b),
            AnyLu::Dense(f) => f.solve_in_place(b),
        }
    }
}

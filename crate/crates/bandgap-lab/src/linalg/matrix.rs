use num_complex::Complex64;

pub(crate) const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square complex matrix, row major.
///
/// This is the one concrete matrix type in the crate: truncated operators,
/// perturbations and relative operators all live here.  It stays deliberately
/// small; structure (bandedness, Hermitian symmetry, window support) is
/// detected where it pays off instead of being encoded in the type.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl FiniteMatrix {
    pub fn zeros(n: usize) -> Self {
        FiniteMatrix { n, data: vec![C_ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = C_ONE;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    /// Entrywise sum.  Panics on size mismatch: summing operators of
    /// different truncation sizes is a programming error, not a data error.
    pub fn add(&self, rhs: &FiniteMatrix) -> FiniteMatrix {
        assert_eq!(self.n, rhs.n, "matrix size mismatch in add");
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        FiniteMatrix { n: self.n, data }
    }

    pub fn scale(&self, t: Complex64) -> FiniteMatrix {
        FiniteMatrix { n: self.n, data: self.data.iter().map(|a| a * t).collect() }
    }

    pub fn shift_diagonal(&self, s: Complex64) -> FiniteMatrix {
        let mut m = self.clone();
        for i in 0..self.n {
            m.data[i * self.n + i] += s;
        }
        m
    }

    pub fn conj_transpose(&self) -> FiniteMatrix {
        let n = self.n;
        FiniteMatrix::from_fn(n, |i, j| self.data[j * n + i].conj())
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.n);
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, rhs: &FiniteMatrix) -> FiniteMatrix {
        assert_eq!(self.n, rhs.n, "matrix size mismatch in matmul");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            let arow = &self.data[i * n..(i + 1) * n];
            let orow = &mut out.data[i * n..(i + 1) * n];
            for (k, aik) in arow.iter().enumerate() {
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                let brow = &rhs.data[k * n..(k + 1) * n];
                for j in 0..n {
                    orow[j] += aik * brow[j];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.data[i * self.n + i]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Exact test: all imaginary parts are zero bits and the matrix equals
    /// its transpose.  Constructions in this crate produce exact zeros, so
    /// this dispatch never misfires on rounded data.
    pub fn is_real_symmetric(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in i..n {
                let a = self.data[i * n + j];
                let b = self.data[j * n + i];
                if a.im != 0.0 || b.im != 0.0 || a.re != b.re {
                    return false;
                }
            }
        }
        true
    }

    /// Exact test for M = M*.
    pub fn is_hermitian(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in i..n {
                let a = self.data[i * n + j];
                let b = self.data[j * n + i];
                if a.re != b.re || a.im != -b.im {
                    return false;
                }
            }
        }
        true
    }

    /// Lower and upper bandwidths of the nonzero pattern.
    pub fn bandwidths(&self) -> (usize, usize) {
        let n = self.n;
        let (mut bl, mut bu) = (0usize, 0usize);
        for i in 0..n {
            for j in 0..n {
                if self.data[i * n + j] != C_ZERO {
                    if i > j {
                        bl = bl.max(i - j);
                    } else {
                        bu = bu.max(j - i);
                    }
                }
            }
        }
        (bl, bu)
    }

    /// Smallest index range [lo, hi) covering all nonzero rows and columns.
    /// Returns None for the zero matrix.
    pub fn support_range(&self) -> Option<(usize, usize)> {
        let n = self.n;
        let mut lo = n;
        let mut hi = 0usize;
        for i in 0..n {
            for j in 0..n {
                if self.data[i * n + j] != C_ZERO {
                    lo = lo.min(i.min(j));
                    hi = hi.max(i.max(j) + 1);
                }
            }
        }
        if lo >= hi {
            None
        } else {
            Some((lo, hi))
        }
    }
}

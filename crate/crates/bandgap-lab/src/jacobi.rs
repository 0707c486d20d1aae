//! Periodic Jacobi operators and their band structure.
//!
//! A two-sided Jacobi matrix with period-m coefficients (a_k > 0, b_k real)
//! has purely essential spectrum equal to the preimage Δ⁻¹([−2, 2]) of its
//! discriminant Δ(λ) = tr M(λ), where M is the product of the m transfer
//! matrices across one period.  Δ is a degree-m polynomial with leading
//! coefficient 1/(a_0⋯a_{m−1}); its level sets Δ = ±2 supply the 2m band
//! edges.  Edges are computed as companion-matrix eigenvalues of Δ ∓ 2 with
//! a Newton polish, and a double root at tolerance means a closed gap, which
//! is rejected rather than silently merged.
//!
//! Besides the periodic recipe there is a synthetic one: a diagonal matrix
//! sampling prescribed bands on Chebyshev grids.  It provides finite-band
//! operators with arbitrary band sets when no Jacobi parent is needed.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::band_geometry::BandSet;
use crate::linalg::{eig, FiniteMatrix};
use crate::{Error, Result};

pub use crate::linalg::FiniteMatrix as Matrix;

/// Period-m coefficient data for a two-sided Jacobi operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicJacobiSpec {
    /// Off-diagonal coefficients a_0..a_{m−1}, all strictly positive.
    pub a: Vec<f64>,
    /// Diagonal coefficients b_0..b_{m−1}.
    pub b: Vec<f64>,
}

impl PeriodicJacobiSpec {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::InvalidParam(format!(
                "period mismatch: {} off-diagonal vs {} diagonal coefficients",
                a.len(),
                b.len()
            )));
        }
        if !a.iter().all(|&x| x.is_finite() && x > 0.0) {
            return Err(Error::InvalidParam("off-diagonal coefficients must be positive".into()));
        }
        if !b.iter().all(|&x| x.is_finite()) {
            return Err(Error::InvalidParam("diagonal coefficients must be finite".into()));
        }
        Ok(PeriodicJacobiSpec { a, b })
    }

    pub fn period(&self) -> usize {
        self.a.len()
    }
}

/// Serialized recipe for a finite-band operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum OperatorSpec {
    PeriodicJacobi { a: Vec<f64>, b: Vec<f64> },
    SampledBands { bands: Vec<(f64, f64)> },
}

/// A selfadjoint operator whose spectrum is a known finite union of bands,
/// together with the recipe for materializing finite truncations of it.
#[derive(Clone, Debug)]
pub struct FiniteBandOperator {
    bands: BandSet,
    recipe: Recipe,
}

#[derive(Clone, Debug)]
enum Recipe {
    Periodic(PeriodicJacobiSpec),
    Sampled,
}

impl FiniteBandOperator {
    /// Periodic Jacobi operator; the band set comes out of `band_edges`.
    pub fn periodic(spec: PeriodicJacobiSpec) -> Result<Self> {
        let bands = band_edges(&spec)?;
        Ok(FiniteBandOperator { bands, recipe: Recipe::Periodic(spec) })
    }

    /// Synthetic operator with exactly the given bands.
    pub fn sampled(bands: BandSet) -> Self {
        FiniteBandOperator { bands, recipe: Recipe::Sampled }
    }

    pub fn from_spec(spec: OperatorSpec) -> Result<Self> {
        match spec {
            OperatorSpec::PeriodicJacobi { a, b } => {
                Self::periodic(PeriodicJacobiSpec::new(a, b)?)
            }
            OperatorSpec::SampledBands { bands } => Ok(Self::sampled(BandSet::new(bands)?)),
        }
    }

    pub fn bands(&self) -> &BandSet {
        &self.bands
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.recipe, Recipe::Periodic(_))
    }

    /// Dense N×N truncation.
    ///
    /// Periodic recipe: the Dirichlet section over sites −⌊N/2⌋ .. ⌈N/2⌉−1,
    /// so site 0 sits at matrix row ⌊N/2⌋ and window coordinates have a
    /// fixed anchor as N grows.  Sampled recipe: a diagonal matrix of
    /// Chebyshev nodes distributed over the bands proportionally to length
    /// (at least one per band).  Both are exactly selfadjoint.
    pub fn truncate(&self, n: usize) -> Result<FiniteMatrix> {
        if n == 0 {
            return Err(Error::InvalidParam("truncation size must be positive".into()));
        }
        if n > crate::linalg::max_size() {
            return Err(Error::InvalidParam(format!(
                "truncation size {n} exceeds the configured maximum {}",
                crate::linalg::max_size()
            )));
        }
        match &self.recipe {
            Recipe::Periodic(spec) => {
                let m = spec.period() as i64;
                let lo = -((n / 2) as i64);
                let mut out = FiniteMatrix::zeros(n);
                for r in 0..n {
                    let s = lo + r as i64;
                    out.set(r, r, Complex64::new(spec.b[s.rem_euclid(m) as usize], 0.0));
                    if r + 1 < n {
                        let av = spec.a[s.rem_euclid(m) as usize];
                        out.set(r, r + 1, Complex64::new(av, 0.0));
                        out.set(r + 1, r, Complex64::new(av, 0.0));
                    }
                }
                Ok(out)
            }
            Recipe::Sampled => {
                let nodes = chebyshev_band_nodes(&self.bands, n);
                let mut out = FiniteMatrix::zeros(n);
                for (i, x) in nodes.into_iter().enumerate() {
                    out.set(i, i, Complex64::new(x, 0.0));
                }
                Ok(out)
            }
        }
    }

    /// Row index of lattice site 0 in `truncate(n)` (periodic recipe).
    pub fn center_row(n: usize) -> usize {
        n / 2
    }
}

/// N Chebyshev nodes spread over the bands, ascending; each band receives a
/// share proportional to its width (largest remainder, at least one).
fn chebyshev_band_nodes(bands: &BandSet, n: usize) -> Vec<f64> {
    let widths: Vec<f64> = bands.bands().iter().map(|&(a, b)| b - a).collect();
    let total: f64 = widths.iter().sum();
    let k = bands.count();
    let mut counts = vec![0usize; k];
    for c in counts.iter_mut().take(n) {
        *c = 1;
    }
    if n > k {
        let spare = n - k;
        let mut assigned = k;
        let mut fracs: Vec<(f64, usize)> = Vec::with_capacity(k);
        for (j, w) in widths.iter().enumerate() {
            let share = spare as f64 * w / total;
            counts[j] += share.floor() as usize;
            assigned += share.floor() as usize;
            fracs.push((share - share.floor(), j));
        }
        fracs.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
        let mut left = n - assigned;
        for &(_, j) in &fracs {
            if left == 0 {
                break;
            }
            counts[j] += 1;
            left -= 1;
        }
    }
    let mut nodes = Vec::with_capacity(n);
    for (j, &(a, b)) in bands.bands().iter().enumerate() {
        let kj = counts[j];
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        for i in 0..kj {
            let theta = std::f64::consts::PI * (2.0 * i as f64 + 1.0) / (2.0 * kj as f64);
            nodes.push(mid + half * theta.cos());
        }
    }
    nodes.sort_by(f64::total_cmp);
    nodes
}

/// Transfer-matrix product across one period at spectral parameter λ.
/// det = 1 identically (telescoping of the a-ratios).
pub fn monodromy(spec: &PeriodicJacobiSpec, lambda: f64) -> [[f64; 2]; 2] {
    let m = spec.period();
    let mut acc = [[1.0, 0.0], [0.0, 1.0]];
    for k in 0..m {
        let aprev = spec.a[(k + m - 1) % m];
        let t = [
            [(lambda - spec.b[k]) / spec.a[k], -aprev / spec.a[k]],
            [1.0, 0.0],
        ];
        acc = [
            [
                t[0][0] * acc[0][0] + t[0][1] * acc[1][0],
                t[0][0] * acc[0][1] + t[0][1] * acc[1][1],
            ],
            [
                t[1][0] * acc[0][0] + t[1][1] * acc[1][0],
                t[1][0] * acc[0][1] + t[1][1] * acc[1][1],
            ],
        ];
    }
    acc
}

/// The discriminant Δ(λ) = tr M(λ) as an explicit polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct Discriminant {
    /// Coefficients, ascending degree; degree = period, leading coefficient
    /// 1/(a_0⋯a_{m−1}).
    pub coeffs: Vec<f64>,
}

impl Discriminant {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn eval_real(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * c)
            .collect()
    }
}

fn poly_mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, pi) in p.iter().enumerate() {
        if *pi == 0.0 {
            continue;
        }
        for (j, qj) in q.iter().enumerate() {
            out[i + j] += pi * qj;
        }
    }
    out
}

fn poly_add(p: &[f64], q: &[f64]) -> Vec<f64> {
    let n = p.len().max(q.len());
    (0..n)
        .map(|i| p.get(i).copied().unwrap_or(0.0) + q.get(i).copied().unwrap_or(0.0))
        .collect()
}

/// Symbolic transfer-matrix product: entries are polynomials in λ.
pub fn discriminant(spec: &PeriodicJacobiSpec) -> Discriminant {
    let m = spec.period();
    // acc = identity
    let mut acc: [[Vec<f64>; 2]; 2] = [
        [vec![1.0], vec![0.0]],
        [vec![0.0], vec![1.0]],
    ];
    for k in 0..m {
        let aprev = spec.a[(k + m - 1) % m];
        let t00 = vec![-spec.b[k] / spec.a[k], 1.0 / spec.a[k]]; // (λ − b)/a
        let t01 = vec![-aprev / spec.a[k]];
        let new00 = poly_add(&poly_mul(&t00, &acc[0][0]), &poly_mul(&t01, &acc[1][0]));
        let new01 = poly_add(&poly_mul(&t00, &acc[0][1]), &poly_mul(&t01, &acc[1][1]));
        let new10 = acc[0][0].clone();
        let new11 = acc[0][1].clone();
        acc = [[new00, new01], [new10, new11]];
    }
    let coeffs = poly_add(&acc[0][0], &acc[1][1]);
    Discriminant { coeffs }
}

/// Roots of a real polynomial via companion-matrix eigenvalues plus a
/// Newton polish on the polynomial itself.
fn real_poly_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    if lead == 0.0 {
        return Err(Error::NumericalFailure("vanishing leading coefficient".into()));
    }
    let monic: Vec<f64> = coeffs[..deg].iter().map(|c| c / lead).collect();
    let companion = FiniteMatrix::from_fn(deg, |i, j| {
        if j == deg - 1 {
            Complex64::new(-monic[i], 0.0)
        } else if i == j + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut roots = eig(&companion, false)?.eigenvalues;
    let dcoeffs: Vec<f64> = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c)
        .collect();
    let eval = |z: Complex64, cs: &[f64]| {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in cs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    for r in roots.iter_mut() {
        for _ in 0..12 {
            let p = eval(*r, coeffs);
            let dp = eval(*r, &dcoeffs);
            if dp.norm() == 0.0 {
                break;
            }
            let step = p / dp;
            *r -= step;
            if step.norm() <= 1e-15 * (1.0 + r.norm()) {
                break;
            }
        }
    }
    Ok(roots)
}

/// Band edges from the two level sets Δ = ±2.
///
/// Each polynomial Δ ∓ 2 must have simple real roots; a repeated root (at
/// relative tolerance 1e-8) is a closed gap and comes back as
/// [`Error::DegenerateGap`].  The assembled intervals are midpoint-checked
/// against |Δ| ≤ 2 and validated as a disjoint band set.
pub fn band_edges(spec: &PeriodicJacobiSpec) -> Result<BandSet> {
    let m = spec.period();
    let disc = discriminant(spec);
    let mut all_roots: Vec<f64> = Vec::with_capacity(2 * m);
    for sign in [2.0f64, -2.0] {
        let mut shifted = disc.coeffs.clone();
        shifted[0] -= sign;
        let roots = real_poly_roots(&shifted)?;
        // Scale for the realness / separation tests.
        let spread = roots
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max)
            .max(1.0);
        let mut reals: Vec<f64> = Vec::with_capacity(m);
        for z in &roots {
            if z.im.abs() > 1e-8 * spread {
                return Err(Error::NumericalFailure(format!(
                    "discriminant level set produced a non-real root {z}"
                )));
            }
            reals.push(z.re);
        }
        reals.sort_by(f64::total_cmp);
        for w in reals.windows(2) {
            if (w[1] - w[0]).abs() <= 1e-8 * spread {
                return Err(Error::DegenerateGap { location: 0.5 * (w[0] + w[1]) });
            }
        }
        all_roots.extend(reals);
    }
    all_roots.sort_by(f64::total_cmp);

    let mut bands = Vec::with_capacity(m);
    for w in all_roots.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        if disc.eval_real(mid).abs() <= 2.0 {
            bands.push((w[0], w[1]));
        }
    }
    if bands.len() != m {
        return Err(Error::NumericalFailure(format!(
            "expected {m} bands from the discriminant, assembled {}",
            bands.len()
        )));
    }
    BandSet::new(bands)
}

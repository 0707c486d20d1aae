//! Compactly supported complex perturbations and their Schatten norms.
//!
//! A perturbation lives in site coordinates (the same lattice indexing as
//! [`crate::jacobi::FiniteBandOperator::truncate`]) inside a window
//! [−M, M], so its entries do not depend on the truncation size.  Away
//! from selfadjointness on purpose: amplitudes are complex and the random
//! variant draws independent real and imaginary parts.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{svd_values, FiniteMatrix};
use crate::{Error, Result};

/// The shape of the perturbation, in site coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum PerturbationVariant {
    /// A single diagonal entry `amplitude` at the given site.
    RankOne { site: i64, amplitude: Complex64 },
    /// Diagonal entries amplitude·ratio^k, k = 0..length, the block
    /// centered at site 0 (first entry at site −⌊length/2⌋).
    DiagonalDecay { amplitude: Complex64, ratio: f64, length: usize },
    /// Complex entries amplitude·(u+iv), u,v uniform on (−1,1), filling a
    /// length×length block centered at site 0 on the diagonals with
    /// |i−j| ≤ bandwidth.  Entries are drawn row-major from a counter RNG,
    /// so the matrix is a pure function of (bandwidth, length, amplitude,
    /// seed).
    RandomBanded { bandwidth: usize, length: usize, amplitude: f64, seed: u64 },
}

fn default_scale() -> f64 {
    1.0
}

/// Full recipe for the perturbation B = scale · (variant matrix).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    #[serde(flatten)]
    pub variant: PerturbationVariant,
    /// Overall coupling t ≥ 0 (t = 0 gives the zero perturbation).
    #[serde(default = "default_scale")]
    pub scale: f64,
    /// Half-width M of the support window [−M, M]; defaults to N/10 at
    /// build time.
    #[serde(default)]
    pub window: Option<i64>,
}

impl PerturbationSpec {
    pub fn new(variant: PerturbationVariant, scale: f64, window: Option<i64>) -> Result<Self> {
        let spec = PerturbationSpec { variant, scale, window };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.scale.is_finite() || self.scale < 0.0 {
            return Err(Error::InvalidParam(format!(
                "perturbation scale must be a finite nonnegative real, got {}",
                self.scale
            )));
        }
        match &self.variant {
            PerturbationVariant::RankOne { amplitude, .. } => {
                if !amplitude.re.is_finite() || !amplitude.im.is_finite() {
                    return Err(Error::InvalidParam("rank-one amplitude must be finite".into()));
                }
            }
            PerturbationVariant::DiagonalDecay { amplitude, ratio, length } => {
                if !amplitude.re.is_finite() || !amplitude.im.is_finite() {
                    return Err(Error::InvalidParam("decay amplitude must be finite".into()));
                }
                if !(*ratio > 0.0 && *ratio < 1.0) {
                    return Err(Error::InvalidParam(format!(
                        "decay ratio must lie in (0,1), got {ratio}"
                    )));
                }
                if *length == 0 {
                    return Err(Error::InvalidParam("decay length must be positive".into()));
                }
            }
            PerturbationVariant::RandomBanded { length, amplitude, .. } => {
                if *length == 0 {
                    return Err(Error::InvalidParam("block length must be positive".into()));
                }
                if !amplitude.is_finite() || *amplitude < 0.0 {
                    return Err(Error::InvalidParam(
                        "random-banded amplitude must be finite and nonnegative".into(),
                    ));
                }
            }
        }
        if let Some(m) = self.window {
            if m < 0 {
                return Err(Error::InvalidParam(format!(
                    "window half-width must be nonnegative, got {m}"
                )));
            }
            let (lo, hi) = self.support_range();
            if lo < -m || hi > m {
                return Err(Error::InvalidParam(format!(
                    "support sites {lo}..={hi} stick out of the window [−{m}, {m}]"
                )));
            }
        }
        Ok(())
    }

    /// Smallest site interval containing all (potentially) nonzero entries.
    pub fn support_range(&self) -> (i64, i64) {
        match &self.variant {
            PerturbationVariant::RankOne { site, .. } => (*site, *site),
            PerturbationVariant::DiagonalDecay { length, .. }
            | PerturbationVariant::RandomBanded { length, .. } => {
                let lo = -((length / 2) as i64);
                (lo, lo + *length as i64 - 1)
            }
        }
    }

    /// Effective window half-width for an N-truncation: the declared one,
    /// or N/10 widened just enough to hold the support.
    pub fn window_for(&self, n: usize) -> i64 {
        self.window.unwrap_or_else(|| {
            let (lo, hi) = self.support_range();
            ((n / 10) as i64).max(lo.abs()).max(hi.abs())
        })
    }

    /// Materialize scale·B on the N-truncation lattice.
    ///
    /// Entries are generated in site coordinates, so any two truncations
    /// agree exactly on their common sites.
    pub fn build(&self, n: usize) -> Result<FiniteMatrix> {
        self.validate()?;
        let m = self.window_for(n);
        let fit = ((n as i64) - 1) / 2;
        if m > fit {
            return Err(Error::WindowTooLarge { half_width: m, size: n });
        }
        let (lo, hi) = self.support_range();
        if lo < -m || hi > m {
            return Err(Error::WindowTooLarge { half_width: m, size: n });
        }
        let center = (n / 2) as i64;
        let row_of = |site: i64| (site + center) as usize;
        let mut out = FiniteMatrix::zeros(n);
        let t = self.scale;
        match &self.variant {
            PerturbationVariant::RankOne { site, amplitude } => {
                out.set(row_of(*site), row_of(*site), t * amplitude);
            }
            PerturbationVariant::DiagonalDecay { amplitude, ratio, length } => {
                let first = -((length / 2) as i64);
                let mut v = t * amplitude;
                for k in 0..*length {
                    let r = row_of(first + k as i64);
                    out.set(r, r, v);
                    v *= *ratio;
                }
            }
            PerturbationVariant::RandomBanded { bandwidth, length, amplitude, seed } => {
                let first = -((length / 2) as i64);
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                for i in 0..*length {
                    for j in 0..*length {
                        if i.abs_diff(j) > *bandwidth {
                            continue;
                        }
                        let u: f64 = rng.gen_range(-1.0..1.0);
                        let v: f64 = rng.gen_range(-1.0..1.0);
                        out.set(
                            row_of(first + i as i64),
                            row_of(first + j as i64),
                            Complex64::new(u, v) * (t * amplitude),
                        );
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Singular values and the Schatten p-norm of a finite matrix.
#[derive(Clone, Debug, Serialize)]
pub struct SchattenReport {
    pub p: f64,
    /// Descending, nonnegative.
    pub singular_values: Vec<f64>,
    /// (Σ σ_j^p)^{1/p}.
    pub norm: f64,
}

/// The Schatten gauge (Σ σ_j^p)^{1/p} for any p > 0; for p < 1 this is the
/// standard quasinorm.
pub fn schatten_value(m: &FiniteMatrix, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::InvalidParam(format!("Schatten exponent must be positive, got {p}")));
    }
    let sv = svd_values(m)?;
    let mut acc = 0.0f64;
    for s in &sv {
        if *s > 0.0 {
            acc += s.powf(p);
        }
    }
    Ok(acc.powf(1.0 / p))
}

/// Schatten norm with the full singular value list, for p ≥ 1.
pub fn schatten_norm(m: &FiniteMatrix, p: f64) -> Result<SchattenReport> {
    if !(p >= 1.0) {
        return Err(Error::InvalidParam(format!(
            "Schatten norm needs p ≥ 1 (got {p}); use schatten_value for the quasinorm"
        )));
    }
    let singular_values = svd_values(m)?;
    let mut acc = 0.0f64;
    for s in &singular_values {
        if *s > 0.0 {
            acc += s.powf(p);
        }
    }
    Ok(SchattenReport { p, singular_values, norm: acc.powf(1.0 / p) })
}

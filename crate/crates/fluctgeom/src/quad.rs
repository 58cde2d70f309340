//! Quadrature backends shared by the average functionals: tensor-product
//! composite Simpson grids and seeded Monte Carlo with deterministic
//! chunked accumulation.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scalar::{from_f64, Scalar};

/// Default Gaussian domain truncation, in units of the standard deviation
/// per axis. exp(-8²/2-ish tails) sit far below every quoted tolerance.
pub const DEFAULT_TRUNCATION_SIGMAS: f64 = 8.0;

/// Samples per Monte Carlo accumulation chunk. Chunks are independently
/// seeded from the base seed and a counter, so partial sums combine
/// deterministically regardless of execution order.
const MC_CHUNK: usize = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("grid needs at least 2 points per axis, got {0}")]
    BadPoints(usize),
    #[error("Monte Carlo needs at least 1 sample, got {0}")]
    BadSamples(usize),
    #[error("truncation half-width must be positive and finite, got {0}")]
    BadTruncation(f64),
    #[error("integrand produced a non-finite partial sum")]
    NonFinite,
    #[error("invalid integration domain: {0}")]
    Domain(String),
}

/// Which backend evaluates the average.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    TensorGrid { points: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

/// Backend selection plus the Gaussian truncation half-width (in σ units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub scheme: Scheme,
    pub truncation: f64,
}

impl QuadratureSpec {
    pub fn grid(points: usize) -> Self {
        Self {
            scheme: Scheme::TensorGrid { points },
            truncation: DEFAULT_TRUNCATION_SIGMAS,
        }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        Self {
            scheme: Scheme::MonteCarlo { samples, seed },
            truncation: DEFAULT_TRUNCATION_SIGMAS,
        }
    }

    pub fn with_truncation(mut self, sigmas: f64) -> Self {
        self.truncation = sigmas;
        self
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        match self.scheme {
            Scheme::TensorGrid { points } if points < 2 => Err(QuadError::BadPoints(points)),
            Scheme::MonteCarlo { samples, .. } if samples < 1 => {
                Err(QuadError::BadSamples(samples))
            }
            _ => {
                if !(self.truncation > 0.0 && self.truncation.is_finite()) {
                    Err(QuadError::BadTruncation(self.truncation))
                } else {
                    Ok(())
                }
            }
        }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::grid(513)
    }
}

/// An estimated value with its standard error (zero for grid schemes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub std_err: T,
}

/// Composite Simpson nodes and weights on [lo, hi]. The node count is
/// rounded up to an odd number >= 3.
pub(crate) fn simpson_rule<T: Scalar>(lo: T, hi: T, points: usize) -> (Vec<T>, Vec<T>) {
    let m = {
        let p = points.max(3);
        if p % 2 == 0 {
            p + 1
        } else {
            p
        }
    };
    let h = (hi - lo) / from_f64::<T>((m - 1) as f64);
    let third = h / from_f64::<T>(3.0);
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for i in 0..m {
        nodes.push(lo + h * from_f64::<T>(i as f64));
        let w = if i == 0 || i == m - 1 {
            third
        } else if i % 2 == 1 {
            third * from_f64::<T>(4.0)
        } else {
            third * from_f64::<T>(2.0)
        };
        weights.push(w);
    }
    (nodes, weights)
}

/// ∫ f·w / ∫ w over the tensor product of the given axes, composite
/// Simpson per axis with `points` nodes. Errors if a partial sum goes
/// non-finite (divergent integrand) or the domain is degenerate.
pub(crate) fn grid_ratio_average<T, F, W>(
    axes: &[(T, T)],
    points: usize,
    f: F,
    w: W,
) -> Result<T, QuadError>
where
    T: Scalar,
    F: Fn(&[T]) -> T,
    W: Fn(&[T]) -> T,
{
    if axes.is_empty() {
        return Err(QuadError::Domain("no integration axes".into()));
    }
    for &(lo, hi) in axes {
        if !(lo < hi) {
            return Err(QuadError::Domain("axis bounds must satisfy lo < hi".into()));
        }
    }
    let rules: Vec<(Vec<T>, Vec<T>)> = axes
        .iter()
        .map(|&(lo, hi)| simpson_rule(lo, hi, points))
        .collect();
    let dims = rules.len();
    let counts: Vec<usize> = rules.iter().map(|(n, _)| n.len()).collect();

    let mut idx = vec![0usize; dims];
    let mut point = vec![T::zero(); dims];
    let mut num = T::zero();
    let mut den = T::zero();
    loop {
        let mut wt = T::one();
        for d in 0..dims {
            point[d] = rules[d].0[idx[d]];
            wt *= rules[d].1[idx[d]];
        }
        let density = w(&point);
        num += wt * density * f(&point);
        den += wt * density;
        if !(num.is_finite() && den.is_finite()) {
            return Err(QuadError::NonFinite);
        }

        // odometer increment
        let mut d = 0;
        loop {
            idx[d] += 1;
            if idx[d] < counts[d] {
                break;
            }
            idx[d] = 0;
            d += 1;
            if d == dims {
                if den == T::zero() {
                    return Err(QuadError::NonFinite);
                }
                return Ok(num / den);
            }
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// RNG for a given accumulation chunk, derived from the base seed and the
/// chunk counter.
pub(crate) fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ chunk.wrapping_mul(0xD1B5_4A32_D192_ED03)))
}

/// Monte Carlo mean of `f` over points produced by `draw`, with sample
/// standard error. Accumulation runs in f64 over fixed-size chunks whose
/// partial sums are merged in counter order.
pub(crate) fn mc_mean<T, Fd, Ff>(
    samples: usize,
    seed: u64,
    dim: usize,
    mut draw: Fd,
    f: Ff,
) -> Result<Estimate<T>, QuadError>
where
    T: Scalar,
    Fd: FnMut(&mut ChaCha8Rng, &mut [f64]) -> Result<(), QuadError>,
    Ff: Fn(&[f64]) -> f64,
{
    if samples < 1 {
        return Err(QuadError::BadSamples(samples));
    }
    let mut point = vec![0.0f64; dim];
    let mut total_sum = 0.0f64;
    let mut total_sq = 0.0f64;
    let mut done = 0usize;
    let mut chunk = 0u64;
    while done < samples {
        let take = MC_CHUNK.min(samples - done);
        let mut rng = chunk_rng(seed, chunk);
        let mut sum = 0.0f64;
        let mut sq = 0.0f64;
        for _ in 0..take {
            draw(&mut rng, &mut point)?;
            let y = f(&point);
            sum += y;
            sq += y * y;
        }
        if !(sum.is_finite() && sq.is_finite()) {
            return Err(QuadError::NonFinite);
        }
        total_sum += sum;
        total_sq += sq;
        done += take;
        chunk += 1;
    }
    let n = samples as f64;
    let mean = total_sum / n;
    let var = if samples > 1 {
        ((total_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(Estimate {
        value: from_f64(mean),
        std_err: from_f64((var / n).sqrt()),
    })
}

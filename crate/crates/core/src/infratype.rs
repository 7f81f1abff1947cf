//! Sign minimization and the infratype bound.
//!
//! `X` has infratype `p` with constant `C` when every finite collection
//! admits signs with `‖Σ a_k x_k‖ ≤ C (Σ ‖x_k‖^p)^{1/p}`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{Mode, Space, Vector};

pub const EXACT_THRESHOLD: usize = 20;

/// Gray-code steps between exact recomputations of the running sum.
const RESYNC: u64 = 4096;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignMinimum {
    pub norm: f64,
    /// `±1` per vector; the first sign is fixed to `+1`.
    pub signs: Vec<i8>,
}

/// `min_{a ∈ {±1}^n} ‖Σ a_k x_k‖` by enumerating the `2^{n−1}` patterns with
/// the first sign fixed, one vector flipped per step.
pub fn min_sign_norm(space: &Space, vectors: &[Vector], threshold: usize) -> Result<SignMinimum> {
    let dim = match space.mode() {
        Mode::Dense(d) => d,
        _ => {
            return Err(Error::Unsupported(
                "sign minimization needs a dense space".into(),
            ))
        }
    };
    let n = vectors.len();
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one vector".into()));
    }
    if n > threshold {
        return Err(Error::InvalidArgument(format!(
            "{n} vectors exceed the exhaustive threshold {threshold}"
        )));
    }
    let mut rows: Vec<&[f64]> = Vec::with_capacity(n);
    for v in vectors {
        space.check(v)?;
        rows.push(v.as_dense().expect("checked dense"));
    }
    let exp = space.exponent();
    let mut signs = vec![1i8; n];
    let mut sum: Vec<f64> = (0..dim).map(|j| rows.iter().map(|r| r[j]).sum()).collect();
    let mut best = SignMinimum {
        norm: exp.norm_of(sum.iter().copied()),
        signs: signs.clone(),
    };
    let patterns: u64 = 1 << (n - 1);
    for i in 1..patterns {
        let k = i.trailing_zeros() as usize + 1;
        signs[k] = -signs[k];
        let s = 2.0 * f64::from(signs[k]);
        if i % RESYNC == 0 {
            for (j, acc) in sum.iter_mut().enumerate() {
                *acc = rows
                    .iter()
                    .zip(&signs)
                    .map(|(r, &a)| f64::from(a) * r[j])
                    .sum();
            }
        } else {
            for (acc, x) in sum.iter_mut().zip(rows[k]) {
                *acc += s * x;
            }
        }
        let norm = exp.norm_of(sum.iter().copied());
        if norm < best.norm {
            best = SignMinimum {
                norm,
                signs: signs.clone(),
            };
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfratypeTrial {
    pub trial: usize,
    pub n: usize,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfratypeEstimate {
    pub p: f64,
    /// Largest observed `min-sign-norm / (Σ‖x_k‖^p)^{1/p}`: a lower bound for any valid `C`.
    pub c_hat: f64,
    pub trials: usize,
    pub n_max: usize,
    pub seed: u64,
    pub records: Vec<InfratypeTrial>,
}

impl InfratypeEstimate {
    /// Columns `trial,n,ratio`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,n,ratio\n");
        for r in &self.records {
            out.push_str(&format!("{},{},{}\n", r.trial, r.n, r.ratio));
        }
        out
    }
}

/// Random collection: Gaussian directions with log-normal lengths.
pub fn random_collection(space: &Space, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vector>> {
    let dim = space
        .dimension()
        .ok_or_else(|| Error::Unsupported("random collections need a dense space".into()))?;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let len: f64 = StandardNormal.sample(rng);
        let raw: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        out.push(Vector::dense(raw).scaled(len.exp()));
    }
    Ok(out)
}

pub fn estimate_constant(
    space: &Space,
    p: f64,
    n_max: usize,
    trials: usize,
    seed: u64,
) -> Result<InfratypeEstimate> {
    if p <= 1.0 || !p.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "infratype exponent must exceed 1, got {p}"
        )));
    }
    if n_max == 0 || n_max > EXACT_THRESHOLD {
        return Err(Error::InvalidArgument(format!(
            "n_max must lie in 1..={EXACT_THRESHOLD}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(trials);
    let mut c_hat: f64 = 0.0;
    for trial in 0..trials {
        let n = rng.random_range(1..=n_max);
        let xs = random_collection(space, n, &mut rng)?;
        let m = min_sign_norm(space, &xs, EXACT_THRESHOLD)?;
        let mut denom = 0.0;
        for x in &xs {
            denom += space.norm(x)?.powf(p);
        }
        let denom = denom.powf(1.0 / p);
        let ratio = if denom > 0.0 { m.norm / denom } else { 0.0 };
        c_hat = c_hat.max(ratio);
        records.push(InfratypeTrial { trial, n, ratio });
    }
    Ok(InfratypeEstimate {
        p,
        c_hat,
        trials,
        n_max,
        seed,
        records,
    })
}

/// `C₁ = 2C / (2^{1−1/p} − 1)`.
pub fn shevchenko_constant(c: f64, p: f64) -> Result<f64> {
    if p.is_nan() || p <= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "infratype exponent must exceed 1, got {p}"
        )));
    }
    if c.is_nan() || c <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "infratype constant must be positive, got {c}"
        )));
    }
    Ok(2.0 * c / (2f64.powf(1.0 - 1.0 / p) - 1.0))
}

/// `C₁ M d^{(p−1)/p}`.
pub fn shevchenko_rhs(c: f64, p: f64, m: f64, d: f64) -> Result<f64> {
    let c1 = shevchenko_constant(c, p)?;
    if m.is_nan() || m < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "bound M must be non-negative, got {m}"
        )));
    }
    if !(d > 0.0 && d <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "diameter must lie in (0, 1], got {d}"
        )));
    }
    Ok(c1 * m * d.powf((p - 1.0) / p))
}

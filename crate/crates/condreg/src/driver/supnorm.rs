//! Conditional sup-norm baseline: instead of a weighted ℓp objective, fit
//! exact minimax interpolations through (s+1)-point tuples, call a row an
//! inlier when its absolute residual is at most ε∞, and build the condition
//! from terms whose rows are inliers at rate 1−η. The fit reaching the
//! coverage target with the smallest largest inlier residual wins.

use std::time::Instant;

use crate::condition_search::TermIndex;
use crate::conditions::Dnf;
use crate::dataio::Dataset;
use crate::error::{Error, Result};
use crate::lpsolver::linalg::{psd_solve_min_norm, sym_eigen};
use crate::scalar::Scalar;
use crate::sketch::{binomial, sample_distinct, unrank_subset};

use super::{scan_min, CandidateProvenance, FitResult};

/// Inputs of the sup-norm scan. Mirrors the conditional fit's parameters
/// with the loss exponent replaced by the inlier threshold ε∞.
#[derive(Debug, Clone)]
pub struct SupnormParams {
    /// Number of regression coordinates.
    pub s: usize,
    /// Inlier threshold on absolute residuals.
    pub eps_inf: f64,
    /// Required covered fraction.
    pub mu: f64,
    /// Tuples are drawn from the first m₀ rows.
    pub m0: usize,
    /// Tolerated per-term outlier rate.
    pub eta: f64,
    /// Maximum literals per condition term.
    pub k: usize,
    /// Tuple budget; `None` enumerates every (coordinate, tuple) pair.
    pub budget: Option<u64>,
    pub seed: u64,
}

impl SupnormParams {
    fn validate<T: Scalar>(&self, data: &Dataset<T>) -> Result<()> {
        if self.s == 0 {
            return Err(Error::parameter("sparsity must be at least 1"));
        }
        if self.s > data.d() {
            return Err(Error::parameter(format!(
                "sparsity {} exceeds feature dimension {}",
                self.s,
                data.d()
            )));
        }
        if !(self.eps_inf > 0.0 && self.eps_inf.is_finite()) {
            return Err(Error::parameter("eps_inf must be positive and finite"));
        }
        if !(self.mu > 0.0 && self.mu <= 1.0) {
            return Err(Error::parameter("mu must lie in (0, 1]"));
        }
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return Err(Error::parameter("eta must lie in (0, 1)"));
        }
        if self.m0 < self.s + 1 {
            return Err(Error::parameter(format!(
                "tuple pool m0 = {} cannot host {}-point tuples",
                self.m0,
                self.s + 1
            )));
        }
        if data.m() < self.m0 {
            return Err(Error::parameter(format!(
                "need at least m0 = {} rows, dataset has {}",
                self.m0,
                data.m()
            )));
        }
        Ok(())
    }
}

/// Minimax interpolation through s+1 points restricted to `coords`: for
/// each residual sign pattern (the first sign fixed positive), solve the
/// square system [Y | σ]·(a, h) = z through its normal equations and keep
/// the consistent solution with the smallest |h|, which is the smallest
/// worst-case residual on the tuple. Tuples where no pattern solves
/// consistently (degenerate geometry) return `None`.
fn minimax_fit<T: Scalar>(
    data: &Dataset<T>,
    coords: &[usize],
    tuple: &[usize],
) -> Option<(Vec<T>, T)> {
    let s = coords.len();
    let q = s + 1;
    let rows: Vec<Vec<T>> = tuple
        .iter()
        .map(|&j| {
            let y = data.y().row(j);
            coords.iter().map(|&c| y[c]).collect()
        })
        .collect();
    let zs: Vec<T> = tuple.iter().map(|&j| data.z()[j]).collect();
    let scale = rows
        .iter()
        .flatten()
        .chain(zs.iter())
        .fold(T::one(), |acc, &v| acc.max(v.abs()));
    let tol = scale * T::from_f64_c(1e-7);

    let mut best: Option<(Vec<T>, T)> = None;
    for pattern in 0u32..1 << s {
        let sigma: Vec<T> = (0..q)
            .map(|i| {
                if i > 0 && pattern >> (i - 1) & 1 == 1 {
                    -T::one()
                } else {
                    T::one()
                }
            })
            .collect();
        let mut gram = vec![T::zero(); q * q];
        let mut rhs = vec![T::zero(); q];
        for i in 0..q {
            let mut full = rows[i].clone();
            full.push(sigma[i]);
            for a in 0..q {
                rhs[a] = rhs[a] + full[a] * zs[i];
                for b in 0..q {
                    gram[a * q + b] = gram[a * q + b] + full[a] * full[b];
                }
            }
        }
        let eig = sym_eigen(&gram, q);
        let x = psd_solve_min_norm(&eig, &rhs);
        let consistent = (0..q).all(|i| {
            let pred = rows[i]
                .iter()
                .zip(&x)
                .fold(T::zero(), |acc, (&y, &a)| acc + y * a)
                + sigma[i] * x[s];
            (pred - zs[i]).abs() <= tol
        });
        if !consistent {
            continue;
        }
        let level = x[s].abs();
        if best.as_ref().is_none_or(|(_, b)| level < *b) {
            best = Some((x[..s].to_vec(), level));
        }
    }
    best
}

/// Scans (coordinate subset, (s+1)-row tuple) pairs: exact minimax fit,
/// inlier labelling at ε∞, condition from terms with inlier rate ≥ 1−η,
/// and selection by smallest largest inlier residual among fits covering a
/// μ fraction. `None` when no pair reaches the coverage target.
pub fn fit_supnorm_baseline<T: Scalar>(
    data: &Dataset<T>,
    params: &SupnormParams,
) -> Result<Option<FitResult<T>>> {
    let start = Instant::now();
    params.validate(data)?;
    let index = TermIndex::build(data.x(), params.k)?;
    let n_tuple = binomial(params.m0, params.s + 1);
    let total = binomial(data.d(), params.s)
        .checked_mul(n_tuple)
        .ok_or_else(|| Error::parameter("tuple space too large to index"))?;
    let picks: Option<Vec<u128>> = match params.budget {
        None => None,
        Some(0) => return Err(Error::parameter("tuple budget must be at least 1")),
        Some(b) => Some(sample_distinct(total, b, params.seed)),
    };
    let len = picks.as_ref().map_or(total, |p| p.len() as u128);

    let m = data.m();
    let words = m.div_ceil(64);
    let eps = T::from_f64_c(params.eps_inf);

    struct SupHit<T> {
        idx: u128,
        score: T,
        coords: Vec<usize>,
        values: Vec<T>,
        dnf: Dnf,
        covered: usize,
        tuple: Vec<usize>,
    }

    let best = scan_min(
        len,
        false,
        |i| -> Result<Option<SupHit<T>>> {
            let raw = picks.as_ref().map_or(i, |p| p[i as usize]);
            let coords = unrank_subset(raw / n_tuple, data.d(), params.s);
            let tuple = unrank_subset(raw % n_tuple, params.m0, params.s + 1);
            let Some((values, _)) = minimax_fit(data, &coords, &tuple) else {
                return Ok(None);
            };
            let residuals: Vec<T> = (0..m)
                .map(|j| {
                    let y = data.y().row(j);
                    let pred = coords
                        .iter()
                        .zip(&values)
                        .fold(T::zero(), |acc, (&c, &a)| acc + a * y[c]);
                    (pred - data.z()[j]).abs()
                })
                .collect();
            let mut inlier = vec![0u64; words];
            for (j, r) in residuals.iter().enumerate() {
                if *r <= eps {
                    inlier[j / 64] |= 1 << (j % 64);
                }
            }
            let mut union_bits = vec![0u64; words];
            let mut kept = Vec::new();
            for t in 0..index.terms().len() {
                let size = index.cover(t).len();
                if size == 0 {
                    continue;
                }
                let bits = index.cover_bits(t);
                let inliers: usize = bits
                    .iter()
                    .zip(&inlier)
                    .map(|(c, i)| (c & i).count_ones() as usize)
                    .sum();
                if inliers as f64 >= (1.0 - params.eta) * size as f64 {
                    kept.push(t);
                    for (u, c) in union_bits.iter_mut().zip(bits) {
                        *u |= c;
                    }
                }
            }
            if kept.is_empty() {
                return Ok(None);
            }
            let covered: usize = union_bits.iter().map(|u| u.count_ones() as usize).sum();
            if (covered as f64) < params.mu * m as f64 {
                return Ok(None);
            }
            let mut score = T::zero();
            for (j, r) in residuals.iter().enumerate() {
                if union_bits[j / 64] >> (j % 64) & 1 == 1 && *r <= eps {
                    score = score.max(*r);
                }
            }
            let dnf = Dnf::new(kept.iter().map(|&t| index.terms()[t].clone()).collect());
            Ok(Some(SupHit {
                idx: i,
                score,
                coords,
                values,
                dnf,
                covered,
                tuple,
            }))
        },
        |a, b| a.score < b.score || (a.score == b.score && a.idx < b.idx),
    )?;

    Ok(best.map(|hit| {
        let coverage = hit.covered as f64 / m as f64;
        assert!(coverage >= params.mu, "returned fit misses its coverage bound");
        FitResult {
            coords: hit.coords,
            coefficients: hit.values,
            dnf: hit.dnf,
            p: f64::INFINITY,
            loss: hit.score,
            coverage,
            candidate: CandidateProvenance {
                examples: hit.tuple,
                exponents: Vec::new(),
            },
            seed: params.seed,
            wall_time: start.elapsed(),
        }
    }))
}

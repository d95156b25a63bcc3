//! Synthetic datasets with a planted condition and sparse predictor.
//!
//! Each row first draws whether it belongs to the planted sub-population
//! (probability `p_sat`). Its Boolean attributes are then a uniform
//! satisfying (or falsifying) assignment of the planted DNF, found by
//! rejection sampling; its features are standard Gaussian; and its target is
//! the planted linear form plus Gaussian noise on the sub-population, or
//! pure standard Gaussian noise off it.
//!
//! The planted DNF itself is drawn uniformly from width-k terms, but a draw
//! is only accepted if it is *clean*: no term of the k-DNF space outside the
//! draw is implied by it, and every drawn term covers some assignment none
//! of the others cover. Without this, most random draws contain redundant or
//! implied terms and "recover the planted condition" is not a well-posed
//! target for any search procedure. Cleanliness is decided exactly, with a
//! pool of sampled falsifying assignments as a fast path and the clause-set
//! check of [`sat`] as the authority.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{natural_bound, sat, Dataset, GroundTruth};
use crate::conditions::{enumerate_terms, Dnf, Term};
use crate::error::{Error, Result};
use crate::mat::{BoolMat, RealMat};
use crate::scalar::Scalar;

/// Bounded-retry caps. Generation fails loudly rather than looping forever
/// on adversarial parameters (a near-tautological DNF, say).
const DNF_RETRY_CAP: usize = 1000;
const ROW_RETRY_CAP: usize = 10_000;
const POOL_TARGET: usize = 256;
const POOL_TRY_CAP: usize = 20_000;
const UNIQUE_TRY_CAP: usize = 128;

/// Parameters of one synthetic dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    /// Rows.
    pub m: usize,
    /// Real features.
    pub d: usize,
    /// Boolean attributes.
    pub n: usize,
    /// Planted term count.
    pub g: usize,
    /// Planted term width (every planted term has exactly k literals).
    pub k: usize,
    /// Planted sparsity: the predictor uses s of the d features.
    pub s: usize,
    /// Noise variance on the sub-population; also the variance of the
    /// planted coefficients.
    pub sigma2: f64,
    /// Probability that a row belongs to the planted sub-population.
    pub p_sat: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.m < 1 || self.d < 1 || self.n < 1 {
            return Err(Error::parameter("m, d, n must all be at least 1"));
        }
        if self.k < 1 || self.k > self.n {
            return Err(Error::parameter(format!(
                "term width must satisfy 1 <= k <= n, got k={} n={}",
                self.k, self.n
            )));
        }
        if self.s < 1 || self.s > self.d {
            return Err(Error::parameter(format!(
                "sparsity must satisfy 1 <= s <= d, got s={} d={}",
                self.s, self.d
            )));
        }
        let pool = width_k_count(self.n, self.k);
        if self.g < 1 || self.g as u128 > pool {
            return Err(Error::parameter(format!(
                "cannot plant g={} distinct width-{} terms over {} attributes",
                self.g, self.k, self.n
            )));
        }
        if !(self.p_sat > 0.0 && self.p_sat < 1.0) {
            return Err(Error::parameter("p_sat must lie strictly in (0, 1)"));
        }
        if !(self.sigma2 >= 0.0) {
            return Err(Error::parameter("sigma2 must be nonnegative"));
        }
        Ok(())
    }
}

fn width_k_count(n: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u128 / (j as u128 + 1);
    }
    acc << k
}

/// Generates the dataset and its ground truth, deterministically in the
/// seed. All randomness flows through one stream in a fixed order: DNF
/// draws (with their cleanliness probes), predictor coordinates,
/// coefficients, then per row the membership coin, the attribute rejection
/// draws, the features, and one noise value.
pub fn generate_synthetic<T: Scalar>(spec: &SyntheticSpec) -> Result<(Dataset<T>, GroundTruth<T>)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let dnf = sample_clean_dnf(&mut rng, spec)?;

    let mut coords = rand::seq::index::sample(&mut rng, spec.d, spec.s).into_vec();
    coords.sort_unstable();
    let sigma = spec.sigma2.sqrt();
    let coefficients: Vec<f64> = (0..spec.s)
        .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();

    let mut xs = Vec::with_capacity(spec.m * spec.n);
    let mut ys = Vec::with_capacity(spec.m * spec.d);
    let mut zs = Vec::with_capacity(spec.m);
    for row in 0..spec.m {
        let member = rng.random::<f64>() < spec.p_sat;
        let x = sample_assignment(&mut rng, spec.n, &dnf, member).ok_or(
            Error::RowSamplingExhausted {
                row,
                want: member,
                tries: ROW_RETRY_CAP,
            },
        )?;
        let y: Vec<f64> = (0..spec.d)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let noise: f64 = rng.sample(StandardNormal);
        let z = if member {
            let signal: f64 = coords
                .iter()
                .zip(&coefficients)
                .map(|(&c, &a)| a * y[c])
                .sum();
            signal + sigma * noise
        } else {
            noise
        };
        xs.extend(x);
        ys.extend(y);
        zs.push(z);
    }

    let y = RealMat::from_vec(ys.iter().map(|&v| T::from_f64_c(v)).collect(), spec.m, spec.d)?;
    let z: Vec<T> = zs.iter().map(|&v| T::from_f64_c(v)).collect();
    let b = natural_bound(&y, &z);
    let data = Dataset::new(BoolMat::from_vec(xs, spec.m, spec.n)?, y, z, b)?;
    let truth = GroundTruth {
        dnf,
        coords,
        coefficients: coefficients.iter().map(|&v| T::from_f64_c(v)).collect(),
    };
    Ok((data, truth))
}

fn sample_assignment(
    rng: &mut impl Rng,
    n: usize,
    dnf: &Dnf,
    want: bool,
) -> Option<Vec<bool>> {
    for _ in 0..ROW_RETRY_CAP {
        let x: Vec<bool> = (0..n).map(|_| rng.random()).collect();
        if dnf.satisfied_by(&x) == want {
            return Some(x);
        }
    }
    None
}

fn sample_clean_dnf(rng: &mut impl Rng, spec: &SyntheticSpec) -> Result<Dnf> {
    let pool: Vec<Term> = enumerate_terms(spec.n, spec.k)?
        .into_iter()
        .filter(|t| t.len() == spec.k)
        .collect();
    let foreign_space = enumerate_terms(spec.n, spec.k)?;
    for _ in 0..DNF_RETRY_CAP {
        let picks = rand::seq::index::sample(rng, pool.len(), spec.g);
        let dnf = Dnf::new(picks.iter().map(|i| pool[i].clone()).collect());
        if dnf.len() == spec.g && dnf_is_clean(rng, &dnf, &foreign_space, spec.n) {
            return Ok(dnf);
        }
    }
    Err(Error::DnfSamplingExhausted {
        tries: DNF_RETRY_CAP,
    })
}

/// Clause form of ¬T: at least one literal of the term must fail.
fn negated_term_clause(t: &Term) -> Vec<i32> {
    t.literals()
        .iter()
        .map(|l| {
            let v = l.attribute as i32 + 1;
            if l.negated {
                v
            } else {
                -v
            }
        })
        .collect()
}

/// Variable pre-assignments forcing a term to hold.
fn term_fixings(t: &Term) -> Vec<(usize, bool)> {
    t.literals()
        .iter()
        .map(|l| (l.attribute, !l.negated))
        .collect()
}

/// A draw is clean when (a) it is falsifiable at all, (b) no term of the
/// full k-DNF space outside the draw is implied by it, and (c) every drawn
/// term covers an assignment no other drawn term covers.
fn dnf_is_clean(rng: &mut impl Rng, dnf: &Dnf, foreign_space: &[Term], n: usize) -> bool {
    let not_dnf: Vec<Vec<i32>> = dnf.terms().iter().map(negated_term_clause).collect();

    // (a) Reject tautologies outright; nothing below is meaningful for them.
    if !sat::satisfiable(n, &not_dnf, &[]) {
        return false;
    }

    // Falsifying-assignment pool: the fast path for (b). A term satisfied by
    // some pool member is certainly not implied by the DNF.
    let mut pool: Vec<Vec<bool>> = Vec::with_capacity(POOL_TARGET);
    for _ in 0..POOL_TRY_CAP {
        if pool.len() == POOL_TARGET {
            break;
        }
        let x: Vec<bool> = (0..n).map(|_| rng.random()).collect();
        if !dnf.satisfied_by(&x) {
            pool.push(x);
        }
    }

    // (b) No implied foreign term.
    for t in foreign_space {
        if dnf.terms().contains(t) {
            continue;
        }
        if pool.iter().any(|x| t.satisfied_by(x)) {
            continue;
        }
        if !sat::satisfiable(n, &not_dnf, &term_fixings(t)) {
            return false;
        }
    }

    // (c) Unique coverage for every drawn term.
    for (i, t) in dnf.terms().iter().enumerate() {
        let fixed = term_fixings(t);
        let found = (0..UNIQUE_TRY_CAP).any(|_| {
            let mut x: Vec<bool> = (0..n).map(|_| rng.random()).collect();
            for &(var, value) in &fixed {
                x[var] = value;
            }
            dnf.terms()
                .iter()
                .enumerate()
                .all(|(j, other)| j == i || !other.satisfied_by(&x))
        });
        if found {
            continue;
        }
        let others: Vec<Vec<i32>> = dnf
            .terms()
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, other)| negated_term_clause(other))
            .collect();
        if !sat::satisfiable(n, &others, &fixed) {
            return false;
        }
    }
    true
}

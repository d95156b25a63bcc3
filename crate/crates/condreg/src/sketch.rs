//! Sketch sizing and candidate enumeration for the weighted fitting loop.
//!
//! A candidate is a triple (coordinate subset, weight exponents, example
//! subset): which s of the d regression coordinates to keep, which integer
//! powers of (1+γ) to use as row weights, and which r of the first m₀
//! examples to fit through. The driver solves one small weighted regression
//! per candidate, so everything here is about two things: computing how big
//! the sketch has to be (`required_sketch_size`, `exponent_grid`,
//! `compute_m0`) and walking the candidate space deterministically.
//!
//! Candidates are addressed by a single integer index, decoded on demand.
//! Any contiguous index range can therefore be generated independently,
//! which is what lets the driver split the scan across threads without
//! shared state and still produce identical results at any thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Resolved sizing parameters for one fitting run. Plain data; build it with
/// struct literals (typically from the driver's parameter set) and call
/// [`SketchConfig::validate`] before use.
#[derive(Debug, Clone, PartialEq)]
pub struct SketchConfig {
    /// Number of regression coordinates kept in the fit.
    pub s: usize,
    /// Loss exponent p ≥ 1.
    pub p: f64,
    /// Approximation parameter γ ∈ (0,1].
    pub gamma: f64,
    /// Sketch size: how many examples each candidate fits through.
    pub r: usize,
    /// Inclusive weight-exponent bounds; weights are (1+γ)^q.
    pub q_lo: i32,
    pub q_hi: i32,
    /// Collapse the exponent grid to {0} (unit weights).
    pub fixed_weights: bool,
    /// Example-subset pool size: candidates draw from the first m₀ rows.
    pub m0: usize,
    /// Task parameters: target loss, mass, slack, failure probability, and
    /// the norm bound of the data.
    pub eps: f64,
    pub mu: f64,
    pub eta: f64,
    pub delta: f64,
    pub b: f64,
}

impl SketchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.s < 1 {
            return Err(Error::parameter("sparsity s must be at least 1"));
        }
        if !(self.p >= 1.0) {
            return Err(Error::parameter(format!("p must be >= 1, got {}", self.p)));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::parameter(format!(
                "gamma must lie in (0, 1], got {}",
                self.gamma
            )));
        }
        if self.r < 1 {
            return Err(Error::parameter("sketch size r must be at least 1"));
        }
        if self.q_lo > 0 || self.q_hi < 0 {
            return Err(Error::parameter(format!(
                "exponent grid must contain 0, got [{}, {}]",
                self.q_lo, self.q_hi
            )));
        }
        if self.m0 < self.r {
            return Err(Error::parameter(format!(
                "candidate pool m0={} is smaller than sketch size r={}",
                self.m0, self.r
            )));
        }
        for (name, v) in [
            ("eps", self.eps),
            ("mu", self.mu),
            ("delta", self.delta),
            ("b", self.b),
        ] {
            if !(v > 0.0) {
                return Err(Error::parameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.mu > 1.0 {
            return Err(Error::parameter(format!(
                "mu must lie in (0, 1], got {}",
                self.mu
            )));
        }
        if self.delta >= 1.0 {
            return Err(Error::parameter(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if self.eta < 0.0 {
            return Err(Error::parameter("eta must be nonnegative"));
        }
        Ok(())
    }

    /// The weight-exponent bounds actually used: the formula grid, or {0}
    /// when weights are fixed.
    pub fn effective_grid(&self) -> (i32, i32) {
        if self.fixed_weights {
            (0, 0)
        } else {
            (self.q_lo, self.q_hi)
        }
    }
}

/// One point of the candidate space. Both index lists are strictly
/// increasing; `exponents[i]` applies to `examples[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SketchCandidate {
    pub coords: Vec<usize>,
    pub examples: Vec<usize>,
    pub exponents: Vec<i32>,
}

/// Natural-log with the argument clamped below at e, so the result is ≥ 1.
/// The sizing formulas are asymptotic; clamping keeps them monotone and
/// positive at the small parameter values experiments actually use.
fn ln_clamped(x: f64) -> f64 {
    x.max(std::f64::consts::E).ln()
}

/// Sketch dimension sufficient for a (1±γ)-approximate ℓp sparsification of
/// a t-dimensional subspace, with all leading constants fixed to 1.
pub fn required_sketch_size(p: f64, t: usize, gamma: f64) -> Result<usize> {
    if p < 1.0 {
        return Err(Error::parameter(format!("p must be >= 1, got {p}")));
    }
    if t < 1 {
        return Err(Error::parameter("subspace dimension t must be at least 1"));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::parameter(format!(
            "gamma must lie in (0, 1], got {gamma}"
        )));
    }
    let t_f = t as f64;
    let g2 = gamma * gamma;
    let raw = if p == 1.0 {
        t_f * ln_clamped(t_f) / g2
    } else if p < 2.0 {
        let inner = ln_clamped(t_f / gamma);
        t_f * inner * ln_clamped(inner).powi(2) / g2
    } else if p == 2.0 {
        t_f / g2
    } else {
        ln_clamped(1.0 / gamma) / gamma.powi(5) * t_f.powf(p / 2.0) * ln_clamped(t_f)
    };
    Ok(raw.ceil() as usize)
}

/// Integer exponent bounds for the row weights (1+γ)^q.
///
/// The lower end reflects that weights below γ/r^{1/p} can be dropped, the
/// upper end that sketched entries have magnitude at most (1+γ)√(s+1). Both
/// ends are clamped so the grid always contains 0.
pub fn exponent_grid(p: f64, r: usize, gamma: f64, s: usize) -> (i32, i32) {
    let lo_mag = ((r as f64).ln() - gamma.ln() / p) / gamma;
    let q_lo = -(lo_mag.max(0.0).ceil()) as i32;
    let q_hi = (((s + 1) as f64).ln() / (2.0 * gamma)).ceil() as i32;
    (q_lo, q_hi)
}

/// Pool size m₀ for example-subset candidates:
/// ⌈(1/μ)·((b^{2p}/(γ^{2p}ε^{2p}))·(2pb + √(2 ln(12/δ)))² + ln(3/δ))⌉.
///
/// The formula grows as (b/γε)^{2p} and easily exceeds any practical sample
/// size; callers normally override it, and an overflowing value is reported
/// as an error saying so rather than silently saturating.
pub fn compute_m0(mu: f64, gamma: f64, eps: f64, delta: f64, b: f64, p: f64) -> Result<usize> {
    for (name, v) in [("mu", mu), ("gamma", gamma), ("eps", eps), ("delta", delta), ("b", b)] {
        if !(v > 0.0) {
            return Err(Error::parameter(format!("{name} must be positive, got {v}")));
        }
    }
    if mu >= 1.0 || delta >= 1.0 {
        return Err(Error::parameter("mu and delta must lie in (0, 1)"));
    }
    if p < 1.0 {
        return Err(Error::parameter(format!("p must be >= 1, got {p}")));
    }
    let lead = b.powf(2.0 * p) / (gamma.powf(2.0 * p) * eps.powf(2.0 * p));
    let inner = 2.0 * p * b + (2.0 * (12.0 / delta).ln()).sqrt();
    let value = ((lead * inner * inner + (3.0 / delta).ln()) / mu).ceil();
    if !value.is_finite() || value > u32::MAX as f64 {
        return Err(Error::parameter(format!(
            "m0 formula overflows ({value:e}) for these parameters; \
             supply an explicit m0 override"
        )));
    }
    Ok(value as usize)
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for j in 0..k.min(n - k) {
        acc = acc * (n - j) as u128 / (j as u128 + 1);
    }
    acc
}

/// Lexicographic unranking of the `rank`-th k-subset of {0, …, n−1}.
pub(crate) fn unrank_subset(mut rank: u128, n: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    let mut remaining = k;
    while remaining > 0 {
        // Subsets starting with `next` continue with a (remaining-1)-subset
        // of the elements above it.
        let with_next = binomial(n - next - 1, remaining - 1);
        if rank < with_next {
            out.push(next);
            remaining -= 1;
        } else {
            rank -= with_next;
        }
        next += 1;
    }
    out
}

/// The full candidate space for one (config, dimension) pair: coordinate
/// subsets outermost, exponent tuples next, example subsets innermost, each
/// component in lexicographic order.
#[derive(Debug, Clone)]
pub struct CandidateSpace {
    d: usize,
    s: usize,
    m0: usize,
    r: usize,
    q_lo: i32,
    grid_len: u128,
    n_coord: u128,
    n_example: u128,
    n_exponent: u128,
    total: u128,
}

impl CandidateSpace {
    pub fn new(config: &SketchConfig, d: usize) -> Result<Self> {
        config.validate()?;
        if d < config.s {
            return Err(Error::parameter(format!(
                "cannot choose s={} coordinates out of d={}",
                config.s, d
            )));
        }
        let (q_lo, q_hi) = config.effective_grid();
        let grid_len = (q_hi - q_lo + 1) as u128;
        let n_coord = binomial(d, config.s);
        let n_example = binomial(config.m0, config.r);
        let n_exponent = grid_len
            .checked_pow(config.r as u32)
            .ok_or_else(|| Error::parameter("exponent grid too large to enumerate"))?;
        let total = n_coord
            .checked_mul(n_exponent)
            .and_then(|v| v.checked_mul(n_example))
            .ok_or_else(|| Error::parameter("candidate space exceeds 2^128; use sampled mode"))?;
        Ok(CandidateSpace {
            d,
            s: config.s,
            m0: config.m0,
            r: config.r,
            q_lo,
            grid_len,
            n_coord,
            n_example,
            n_exponent,
            total,
        })
    }

    pub fn total(&self) -> u128 {
        self.total
    }

    pub fn example_pairs(&self) -> u128 {
        self.n_coord * self.n_example
    }

    /// Decodes the candidate at a global index in [0, total).
    pub fn candidate(&self, index: u128) -> SketchCandidate {
        debug_assert!(index < self.total);
        let coord_rank = index / (self.n_exponent * self.n_example);
        let rest = index % (self.n_exponent * self.n_example);
        let exponent_rank = rest / self.n_example;
        let example_rank = rest % self.n_example;
        self.assemble(coord_rank, exponent_rank, example_rank)
    }

    /// Decodes a (coordinate, example) pair index with all exponents 0.
    fn zero_exponent_candidate(&self, pair: u128) -> SketchCandidate {
        let coord_rank = pair / self.n_example;
        let example_rank = pair % self.n_example;
        let zero_rank = ((-self.q_lo) as u128) * tuple_weight(self.grid_len, self.r);
        self.assemble(coord_rank, zero_rank, example_rank)
    }

    fn assemble(&self, coord_rank: u128, exponent_rank: u128, example_rank: u128) -> SketchCandidate {
        let coords = unrank_subset(coord_rank, self.d, self.s);
        let examples = unrank_subset(example_rank, self.m0, self.r);
        let mut exponents = vec![0i32; self.r];
        let mut rem = exponent_rank;
        for slot in exponents.iter_mut().rev() {
            *slot = self.q_lo + (rem % self.grid_len) as i32;
            rem /= self.grid_len;
        }
        SketchCandidate {
            coords,
            examples,
            exponents,
        }
    }
}

/// Positional weight of a repeated digit in an r-digit base-`base` number:
/// (base^{r-1} + … + base + 1). Used to build the all-equal-digit rank.
fn tuple_weight(base: u128, r: usize) -> u128 {
    let mut acc = 0u128;
    let mut pow = 1u128;
    for _ in 0..r {
        acc += pow;
        pow *= base;
    }
    acc
}

/// `budget` distinct indices drawn uniformly from [0, total) with the given
/// seed, sorted ascending; the whole range when the budget covers it.
pub(crate) fn sample_distinct(total: u128, budget: u64, seed: u64) -> Vec<u128> {
    if total <= budget as u128 {
        return (0..total).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::HashSet::with_capacity(budget as usize);
    let mut picks = Vec::with_capacity(budget as usize);
    while picks.len() < budget as usize {
        let v = rng.random_range(0..total);
        if seen.insert(v) {
            picks.push(v);
        }
    }
    picks.sort_unstable();
    picks
}

/// What the driver actually iterates: either the whole space, or a seeded
/// uniform subsample of the (coordinate, example) pairs with unit weights.
#[derive(Debug, Clone)]
pub struct CandidatePlan {
    space: CandidateSpace,
    sampled: Option<Vec<u128>>,
}

impl CandidatePlan {
    /// Every candidate, in index order.
    pub fn full(space: CandidateSpace) -> CandidatePlan {
        CandidatePlan {
            space,
            sampled: None,
        }
    }

    /// `budget` distinct (coordinate, example) pairs drawn uniformly with
    /// the given seed, sorted into index order; exponents are all 0. If the
    /// budget covers the whole pair space, this degrades to exhaustive
    /// unit-weight enumeration.
    pub fn sampled(space: CandidateSpace, budget: u64, seed: u64) -> Result<CandidatePlan> {
        if budget == 0 {
            return Err(Error::parameter("candidate budget must be at least 1"));
        }
        let picks = sample_distinct(space.example_pairs(), budget, seed);
        Ok(CandidatePlan {
            space,
            sampled: Some(picks),
        })
    }

    pub fn len(&self) -> u128 {
        match &self.sampled {
            Some(picks) => picks.len() as u128,
            None => self.space.total(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: u128) -> SketchCandidate {
        match &self.sampled {
            Some(picks) => self.space.zero_exponent_candidate(picks[i as usize]),
            None => self.space.candidate(i),
        }
    }

    pub fn space(&self) -> &CandidateSpace {
        &self.space
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(s: usize, r: usize, m0: usize, q_lo: i32, q_hi: i32) -> SketchConfig {
        SketchConfig {
            s,
            p: 2.0,
            gamma: 1.0,
            r,
            q_lo,
            q_hi,
            fixed_weights: false,
            m0,
            eps: 1.0,
            mu: 0.25,
            eta: 0.1,
            delta: 0.1,
            b: 1.0,
        }
    }

    #[test]
    fn sketch_size_table_values() {
        assert_eq!(required_sketch_size(2.0, 3, 1.0).unwrap(), 3);
        assert_eq!(required_sketch_size(2.0, 3, 0.5).unwrap(), 12);
        assert_eq!(required_sketch_size(1.0, 3, 1.0).unwrap(), 4);
        assert_eq!(required_sketch_size(1.5, 3, 1.0).unwrap(), 4);
        assert_eq!(required_sketch_size(3.0, 3, 1.0).unwrap(), 6);
        assert_eq!(required_sketch_size(1.5, 5, 0.5).unwrap(), 47);
        assert!(required_sketch_size(0.5, 3, 1.0).is_err());
        assert!(required_sketch_size(2.0, 0, 1.0).is_err());
        assert!(required_sketch_size(2.0, 3, 0.0).is_err());
    }

    #[test]
    fn sketch_size_monotonicity() {
        for &p in &[1.0, 1.5, 2.0, 3.0] {
            let mut prev = usize::MAX;
            for &gamma in &[0.1, 0.25, 0.5, 0.75, 1.0] {
                let r = required_sketch_size(p, 4, gamma).unwrap();
                assert!(r <= prev, "p={p} gamma={gamma}");
                prev = r;
            }
            let mut prev = 0;
            for t in 1..=30 {
                let r = required_sketch_size(p, t, 0.5).unwrap();
                assert!(r >= prev, "p={p} t={t}");
                prev = r;
            }
        }
    }

    #[test]
    fn exponent_grid_values() {
        assert_eq!(exponent_grid(2.0, 3, 1.0, 2), (-2, 1));
        // r = 1 and gamma = 1: both log terms vanish or clamp, so the lower
        // bound is exactly 0.
        assert_eq!(exponent_grid(1.0, 1, 1.0, 2).0, 0);
        let cfg = SketchConfig {
            fixed_weights: true,
            ..config(2, 3, 5, -2, 1)
        };
        assert_eq!(cfg.effective_grid(), (0, 0));
    }

    #[test]
    fn m0_formula_values() {
        assert_eq!(compute_m0(0.25, 1.0, 1.0, 0.1, 1.0, 2.0).unwrap(), 215);
        // Huge eps: only the ln(3/delta)/mu term survives.
        assert_eq!(compute_m0(0.25, 1.0, 1e9, 0.1, 1.0, 2.0).unwrap(), 14);
        let err = compute_m0(0.25, 1.0, 1e-300, 0.1, 1.0, 2.0).unwrap_err();
        assert!(err.to_string().contains("override"), "{err}");
    }

    #[test]
    fn m0_monotonicity() {
        let base = compute_m0(0.25, 1.0, 0.5, 0.1, 1.0, 2.0).unwrap();
        assert!(compute_m0(0.25, 1.0, 0.6, 0.1, 1.0, 2.0).unwrap() <= base);
        assert!(compute_m0(0.3, 1.0, 0.5, 0.1, 1.0, 2.0).unwrap() <= base);
        assert!(compute_m0(0.25, 1.0, 0.5, 0.1, 1.2, 2.0).unwrap() >= base);
    }

    #[test]
    fn candidate_counts_match_products() {
        let space = CandidateSpace::new(&config(2, 3, 5, 0, 0), 6).unwrap();
        assert_eq!(space.total(), 150);
        let space = CandidateSpace::new(&config(2, 3, 3, -1, 1), 2).unwrap();
        assert_eq!(space.total(), 27);
    }

    #[test]
    fn candidate_counts_exhaustive_small_grid() {
        for d in 1..=6usize {
            for s in 1..=d {
                for m0 in 1..=8usize {
                    for r in 1..=3.min(m0) {
                        let space = CandidateSpace::new(&config(s, r, m0, -1, 1), d).unwrap();
                        let expect = binomial(d, s) * binomial(m0, r) * 3u128.pow(r as u32);
                        assert_eq!(space.total(), expect, "d={d} s={s} m0={m0} r={r}");
                    }
                }
            }
        }
    }

    #[test]
    fn candidates_are_ordered_and_duplicate_free() {
        let space = CandidateSpace::new(&config(2, 2, 4, -1, 1), 4).unwrap();
        let all: Vec<_> = (0..space.total()).map(|i| space.candidate(i)).collect();
        for c in &all {
            assert!(c.coords.windows(2).all(|w| w[0] < w[1]));
            assert!(c.examples.windows(2).all(|w| w[0] < w[1]));
            assert!(c.exponents.iter().all(|&q| (-1..=1).contains(&q)));
        }
        let keys: Vec<_> = all
            .iter()
            .map(|c| (c.coords.clone(), c.exponents.clone(), c.examples.clone()))
            .collect();
        for w in keys.windows(2) {
            assert!(w[0] < w[1], "enumeration must be strictly increasing");
        }
    }

    #[test]
    fn sampled_plan_is_reproducible_and_distinct() {
        let space = CandidateSpace::new(&config(2, 3, 40, -2, 1), 8).unwrap();
        let a = CandidatePlan::sampled(space.clone(), 100, 7).unwrap();
        let b = CandidatePlan::sampled(space.clone(), 100, 7).unwrap();
        assert_eq!(a.len(), 100);
        let picks_a: Vec<_> = (0..100).map(|i| a.get(i)).collect();
        let picks_b: Vec<_> = (0..100).map(|i| b.get(i)).collect();
        assert_eq!(picks_a, picks_b);
        for c in &picks_a {
            assert!(c.exponents.iter().all(|&q| q == 0));
        }
        let mut dedup = picks_a.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), 100);

        let other = CandidatePlan::sampled(space.clone(), 100, 8).unwrap();
        let picks_other: Vec<_> = (0..100).map(|i| other.get(i)).collect();
        assert_ne!(picks_a, picks_other);

        assert!(CandidatePlan::sampled(space.clone(), 0, 7).is_err());

        // Budget covering the whole pair space: every pair, in order.
        let tiny = CandidateSpace::new(&config(1, 1, 2, -1, 1), 2).unwrap();
        let plan = CandidatePlan::sampled(tiny, 1000, 3).unwrap();
        assert_eq!(plan.len(), 4);
    }

    #[test]
    fn config_validation() {
        assert!(config(2, 3, 5, -2, 1).validate().is_ok());
        assert!(config(2, 3, 2, -2, 1).validate().is_err()); // m0 < r
        assert!(config(0, 3, 5, -2, 1).validate().is_err());
        assert!(config(2, 0, 5, -2, 1).validate().is_err());
        assert!(config(2, 3, 5, 1, 2).validate().is_err()); // grid misses 0
        let mut bad = config(2, 3, 5, -2, 1);
        bad.gamma = 1.5;
        assert!(bad.validate().is_err());
    }
}

//! Searching for a k-DNF condition under row weights.
//!
//! Input is a weighted Boolean sample: rows x⁽ʲ⁾ with nonnegative weights
//! w⁽ʲ⁾ (in the fitting pipeline, the pth power of each row's residual).
//! A good condition covers a μ fraction of the rows while keeping the
//! covered weight small. Two realizations share that contract:
//!
//! * the *threshold* form takes every term whose covered-weight sum is at
//!   most εμm, which is also the primitive the reference-class sweep calls
//!   per (μ, ε) pair;
//! * the *greedy* form builds a cover from terms with small per-row average
//!   weight, repeatedly taking the term with the best added-weight to
//!   new-coverage ratio, which keeps the output near the g-term optimum at
//!   O(g log m) terms.
//!
//! Everything is reentrant and the sample is immutable; callers parallelize
//! over candidates, so no internal threading happens here (float sums stay
//! in one fixed order, which keeps results identical at any thread count).

use serde::{Deserialize, Serialize};

use crate::conditions::{enumerate_terms, Dnf, Term};
use crate::error::{Error, Result};
use crate::mat::BoolMat;
use crate::scalar::Scalar;

/// Rows with weights, plus the declared weight bound.
#[derive(Debug, Clone)]
pub struct WeightedBooleanSample<T> {
    x: BoolMat,
    w: Vec<T>,
    bound: T,
}

impl<T: Scalar> WeightedBooleanSample<T> {
    pub fn new(x: BoolMat, w: Vec<T>, bound: T) -> Result<Self> {
        if x.rows() == 0 {
            return Err(Error::parameter("weighted sample needs at least one row"));
        }
        if w.len() != x.rows() {
            return Err(Error::parameter(format!(
                "{} rows but {} weights",
                x.rows(),
                w.len()
            )));
        }
        if !(bound >= T::zero()) {
            return Err(Error::parameter("weight bound must be nonnegative"));
        }
        if w.iter().any(|v| !(*v >= T::zero() && *v <= bound)) {
            return Err(Error::parameter("weights must lie in [0, bound]"));
        }
        Ok(WeightedBooleanSample { x, w, bound })
    }

    /// Convenience constructor taking the bound as the largest weight.
    pub fn from_rows(x: BoolMat, w: Vec<T>) -> Result<Self> {
        let bound = w.iter().fold(T::zero(), |acc, &v| acc.max(v));
        Self::new(x, w, bound)
    }

    pub fn m(&self) -> usize {
        self.x.rows()
    }

    pub fn x(&self) -> &BoolMat {
        &self.x
    }

    pub fn weights(&self) -> &[T] {
        &self.w
    }

    pub fn bound(&self) -> T {
        self.bound
    }
}

/// Which realization the driver should call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchVariant {
    Threshold,
    Greedy,
}

/// A found condition with its empirical coverage and the factor α by which
/// its conditional mean weight may exceed ε: the output term count for the
/// threshold form, the realized mean-weight ratio for the greedy form.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome<T> {
    pub dnf: Dnf,
    pub covered: usize,
    pub alpha: T,
}

/// Precomputed cover lists: for every term over the sample's attributes, the
/// sorted row indices it satisfies. Built once per dataset and shared by
/// every search call; the weights vary per call, the covers never do.
#[derive(Debug, Clone)]
pub struct TermIndex {
    terms: Vec<Term>,
    covers: Vec<Vec<u32>>,
    cover_bits: Vec<Vec<u64>>,
    m: usize,
    n: usize,
}

impl TermIndex {
    pub fn build(x: &BoolMat, k: usize) -> Result<TermIndex> {
        let terms = enumerate_terms(x.cols(), k)?;
        let words = x.rows().div_ceil(64);
        let mut covers = vec![Vec::new(); terms.len()];
        let mut cover_bits = vec![vec![0u64; words]; terms.len()];
        for (j, row) in x.iter_rows().enumerate() {
            for (t, term) in terms.iter().enumerate() {
                if term.satisfied_by(row) {
                    covers[t].push(j as u32);
                    cover_bits[t][j / 64] |= 1 << (j % 64);
                }
            }
        }
        Ok(TermIndex {
            terms,
            covers,
            cover_bits,
            m: x.rows(),
            n: x.cols(),
        })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub(crate) fn cover(&self, t: usize) -> &[u32] {
        &self.covers[t]
    }

    /// Cover of term `t` as a packed bitmask over rows (bit j = row j).
    pub(crate) fn cover_bits(&self, t: usize) -> &[u64] {
        &self.cover_bits[t]
    }

    fn weight_sums<T: Scalar>(&self, w: &[T]) -> Vec<T> {
        self.covers
            .iter()
            .map(|cover| {
                cover
                    .iter()
                    .fold(T::zero(), |acc, &j| acc + w[j as usize])
            })
            .collect()
    }
}

fn check_search_params(mu: f64, eta: f64) -> Result<()> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::parameter(format!("mu must lie in (0, 1], got {mu}")));
    }
    if !(eta > 0.0) {
        return Err(Error::parameter(format!("eta must be positive, got {eta}")));
    }
    Ok(())
}

/// The terms passing the threshold (weight sum ≤ limit) that cover at least
/// one row, plus their union coverage as a row mask and count.
fn threshold_terms<T: Scalar>(
    index: &TermIndex,
    sums: &[T],
    limit: T,
) -> (Vec<usize>, Vec<bool>, usize) {
    let mut kept = Vec::new();
    let mut mask = vec![false; index.m];
    let mut covered = 0usize;
    for (t, cover) in index.covers.iter().enumerate() {
        if cover.is_empty() || sums[t] > limit {
            continue;
        }
        kept.push(t);
        for &j in cover {
            let j = j as usize;
            if !mask[j] {
                mask[j] = true;
                covered += 1;
            }
        }
    }
    (kept, mask, covered)
}

/// Threshold realization: keep every nonempty term whose covered-weight sum
/// is at most εμm; succeed when the union covers at least (1−η)μm rows.
/// `None` means infeasible at these parameters.
pub fn wtcond_threshold<T: Scalar>(
    sample: &WeightedBooleanSample<T>,
    mu: f64,
    eps: T,
    eta: f64,
    k: usize,
) -> Result<Option<SearchOutcome<T>>> {
    let index = TermIndex::build(sample.x(), k)?;
    wtcond_threshold_indexed(&index, sample.weights(), mu, eps, eta)
}

/// As [`wtcond_threshold`] against a prebuilt index (the hot path: one
/// index, many weight vectors).
pub fn wtcond_threshold_indexed<T: Scalar>(
    index: &TermIndex,
    weights: &[T],
    mu: f64,
    eps: T,
    eta: f64,
) -> Result<Option<SearchOutcome<T>>> {
    check_search_params(mu, eta)?;
    if !(eps >= T::zero()) {
        return Err(Error::parameter("eps must be nonnegative"));
    }
    if weights.len() != index.m {
        return Err(Error::parameter("weight vector does not match index rows"));
    }
    let m = index.m as f64;
    let sums = index.weight_sums(weights);
    let limit = eps * T::from_f64_c(mu * m);
    let (kept, _, covered) = threshold_terms(index, &sums, limit);
    if (covered as f64) < (1.0 - eta) * mu * m {
        return Ok(None);
    }
    let dnf = Dnf::new(kept.iter().map(|&t| index.terms[t].clone()).collect());
    // The per-term sums bound only a sum over terms; the implied factor on
    // the conditional mean is the number of terms kept.
    let alpha = T::from_usize_c(dnf.len());
    Ok(Some(SearchOutcome {
        dnf,
        covered,
        alpha,
    }))
}

/// Greedy realization: among terms whose average covered weight is at most
/// (1+η)ε, repeatedly add the one minimizing added weight per newly covered
/// row (ties to enumeration order).
///
/// The loop aims past the acceptance bar, at (1+η)μm covered rows: the goal
/// is the entire low-weight sub-population, and stopping at the minimum
/// (1−η)μm would leave cheap terms uncollected whenever the population is
/// larger than the target μ. Success is still judged against (1−η)μm.
pub fn wtcond_greedy<T: Scalar>(
    sample: &WeightedBooleanSample<T>,
    mu: f64,
    eps: T,
    eta: f64,
    k: usize,
) -> Result<Option<SearchOutcome<T>>> {
    let index = TermIndex::build(sample.x(), k)?;
    wtcond_greedy_indexed(&index, sample.weights(), mu, eps, eta)
}

/// As [`wtcond_greedy`] against a prebuilt index.
pub fn wtcond_greedy_indexed<T: Scalar>(
    index: &TermIndex,
    weights: &[T],
    mu: f64,
    eps: T,
    eta: f64,
) -> Result<Option<SearchOutcome<T>>> {
    check_search_params(mu, eta)?;
    if !(eps >= T::zero()) {
        return Err(Error::parameter("eps must be nonnegative"));
    }
    if weights.len() != index.m {
        return Err(Error::parameter("weight vector does not match index rows"));
    }
    let m = index.m as f64;
    let need = (1.0 - eta) * mu * m;
    let stop_target = (1.0 + eta) * mu * m;
    let sums = index.weight_sums(weights);
    let avg_limit = eps * T::from_f64_c(1.0 + eta);

    let eligible: Vec<usize> = (0..index.terms.len())
        .filter(|&t| {
            let cover = &index.covers[t];
            !cover.is_empty() && sums[t] <= avg_limit * T::from_usize_c(cover.len())
        })
        .collect();

    // Union coverage can never exceed the total of the list sizes; bail out
    // before the quadratic part when even that bound misses the target.
    let reach: usize = eligible.iter().map(|&t| index.covers[t].len()).sum();
    if (reach as f64) < need {
        return Ok(None);
    }

    let mut mask = vec![false; index.m];
    let mut covered = 0usize;
    let mut covered_weight = T::zero();
    let mut chosen: Vec<usize> = Vec::new();
    let mut used = vec![false; index.terms.len()];

    while (covered as f64) < stop_target {
        let mut best: Option<(usize, T, usize)> = None; // (term, added_w, new_cov)
        for &t in &eligible {
            if used[t] {
                continue;
            }
            let mut added = T::zero();
            let mut fresh = 0usize;
            for &j in &index.covers[t] {
                if !mask[j as usize] {
                    added = added + weights[j as usize];
                    fresh += 1;
                }
            }
            if fresh == 0 {
                continue;
            }
            let better = match best {
                None => true,
                // Compare added/fresh ratios without dividing: a/b < c/d
                // iff a·d < c·b for positive denominators.
                Some((_, bw, bf)) => {
                    added * T::from_usize_c(bf) < bw * T::from_usize_c(fresh)
                }
            };
            if better {
                best = Some((t, added, fresh));
            }
        }
        let Some((t, added, fresh)) = best else {
            break; // nothing eligible covers a new row
        };
        used[t] = true;
        chosen.push(t);
        covered += fresh;
        covered_weight = covered_weight + added;
        for &j in &index.covers[t] {
            mask[j as usize] = true;
        }
    }

    if (covered as f64) < need {
        return Ok(None);
    }
    let dnf = Dnf::new(chosen.iter().map(|&t| index.terms[t].clone()).collect());
    let mean = covered_weight / T::from_usize_c(covered);
    let alpha = if eps > T::zero() {
        mean / eps
    } else if mean == T::zero() {
        T::zero()
    } else {
        T::infinity()
    };
    Ok(Some(SearchOutcome {
        dnf,
        covered,
        alpha,
    }))
}

/// The class a reference-class search settles on: the condition, the final
/// weight level ε̂, and the (μ, coverage) at the moment of the last update.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceClass<T> {
    pub dnf: Dnf,
    pub eps_hat: T,
    pub mu: f64,
    pub covered: usize,
}

/// Sweeps (μ, ε) geometrically from (1, max weight) down to (μ₀, ε₀),
/// building the threshold condition at each pair and keeping the best class
/// containing the query point x*: highest coverage target first, then the
/// smallest weight level at which x* is still covered by a μm-row class.
/// `None` means no class containing x* was found.
pub fn reference_class_search<T: Scalar>(
    sample: &WeightedBooleanSample<T>,
    x_star: &[bool],
    mu0: f64,
    eps0: T,
    eta: f64,
    k: usize,
) -> Result<Option<ReferenceClass<T>>> {
    let index = TermIndex::build(sample.x(), k)?;
    reference_class_search_indexed(&index, sample.weights(), x_star, mu0, eps0, eta)
}

/// As [`reference_class_search`] against a prebuilt index.
pub fn reference_class_search_indexed<T: Scalar>(
    index: &TermIndex,
    weights: &[T],
    x_star: &[bool],
    mu0: f64,
    eps0: T,
    eta: f64,
) -> Result<Option<ReferenceClass<T>>> {
    check_search_params(mu0, eta)?;
    if !(eps0 > T::zero()) {
        return Err(Error::parameter("eps0 must be positive"));
    }
    if x_star.len() != index.n {
        return Err(Error::parameter("query point arity does not match sample"));
    }
    if weights.len() != index.m {
        return Err(Error::parameter("weight vector does not match index rows"));
    }
    let m = index.m as f64;
    let shrink = T::from_f64_c(1.0 / (1.0 + eta));

    // With an all-zero weight vector the natural start max_j w⁽ʲ⁾ would be
    // 0 and no sweep would run; starting no lower than ε₀ keeps one pass.
    let max_w = weights.iter().fold(T::zero(), |acc, &v| acc.max(v));
    let mut eps_hat = max_w.max(eps0);
    let mut best: Option<ReferenceClass<T>> = None;

    let sums = index.weight_sums(weights);
    let mut mu = 1.0;
    while mu >= mu0 {
        let mut eps = eps_hat;
        let floor = eps0 * shrink;
        while eps >= floor {
            let limit = eps * T::from_f64_c(mu * m);
            let (kept, _, covered) = threshold_terms(index, &sums, limit);
            eps = eps * shrink;
            if (covered as f64) >= mu * m && eps < eps_hat {
                let dnf = Dnf::new(kept.iter().map(|&t| index.terms[t].clone()).collect());
                if dnf.satisfied_by(x_star) {
                    eps_hat = eps;
                    best = Some(ReferenceClass {
                        dnf,
                        eps_hat,
                        mu,
                        covered,
                    });
                }
            }
        }
        mu /= 1.0 + eta;
    }
    Ok(best)
}

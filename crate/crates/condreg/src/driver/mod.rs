//! The fitting loop: enumerate sketch candidates, solve each tiny weighted
//! regression, search for a condition over the resulting residual weights,
//! and keep the pair that passes the final loss check.
//!
//! Everything downstream of a dataset lives here: conditional fits,
//! reference-class fits around a query point, holdout evaluation with
//! optional refitting, RC curves over a μ grid, and the sup-norm baseline
//! in [`supnorm`]. Scans are chunked: candidates are evaluated in parallel
//! inside a fixed 1024-wide window and reduced by an explicit (key, index)
//! order, so results are identical at any thread count.

use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::condition_search::{
    reference_class_search_indexed, wtcond_greedy_indexed, wtcond_threshold_indexed,
    ReferenceClass, SearchVariant, TermIndex,
};
use crate::conditions::Dnf;
use crate::dataio::Dataset;
use crate::error::{Error, Result};
use crate::lpsolver::{
    conditional_empirical_loss, residual_weights, solve_weighted_lp, Coefficients,
    WeightedSystem, DEFAULT_TOL,
};
use crate::mat::RealMat;
use crate::scalar::Scalar;
use crate::sketch::{CandidatePlan, CandidateSpace, SketchCandidate, SketchConfig};

mod supnorm;
pub use supnorm::{fit_supnorm_baseline, SupnormParams};

/// How many candidates each parallel window holds.
const SCAN_CHUNK: u128 = 1024;

/// Whether the scan stops at the first passing candidate (the algorithmic
/// default) or keeps going for the smallest conditional loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitMode {
    FirstFound,
    ExhaustiveBest,
}

/// Everything a conditional fit needs beyond the dataset itself.
#[derive(Debug, Clone)]
pub struct FitParams {
    /// Solver-facing sizing: sparsity, exponent grid, pool size, and the
    /// task parameters (ε, μ, η, δ, b).
    pub sketch: SketchConfig,
    /// Maximum literals per condition term.
    pub k: usize,
    /// Acceptance multiplier: a fit passes when its conditional loss is at
    /// most α·ε.
    pub alpha: f64,
    pub mode: FitMode,
    pub variant: SearchVariant,
    /// Candidate budget; `None` enumerates the whole space (use only when
    /// the space is genuinely small), `Some(b)` draws b distinct
    /// unit-weight (coordinate, example) pairs.
    pub budget: Option<u64>,
    /// Seed for the candidate subsample; echoed into the result.
    pub seed: u64,
    /// Run the cheap per-row residual screen before each condition search.
    pub screen: bool,
}

impl FitParams {
    pub fn validate(&self) -> Result<()> {
        self.sketch.validate()?;
        if self.k == 0 {
            return Err(Error::parameter("term width k must be at least 1"));
        }
        if !(self.alpha >= 1.0) {
            return Err(Error::parameter(format!(
                "alpha must be at least 1, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Default acceptance multiplier for the greedy search, shaped like the
/// g·log m growth of its set-cover guarantee.
pub fn default_alpha_greedy(g: usize, m: usize) -> f64 {
    (4.0 * g as f64 * (m as f64).max(2.0).ln()).max(1.0)
}

/// Default acceptance multiplier for the threshold search, shaped like the
/// square root of the term-universe size.
pub fn default_alpha_threshold(n: usize, k: usize) -> f64 {
    (4.0 * (n as f64).powi(k as i32).sqrt()).max(1.0)
}

/// Which candidate produced a fit: the example rows it interpolated and the
/// weight exponents attached to them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateProvenance {
    pub examples: Vec<usize>,
    pub exponents: Vec<i32>,
}

/// A finished fit. Serializes with a fixed field order; the wall time is
/// carried for reporting but excluded so identical runs produce identical
/// bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult<T> {
    pub coords: Vec<usize>,
    pub coefficients: Vec<T>,
    pub dnf: Dnf,
    pub p: f64,
    /// Empirical conditional loss on the training sample, already taken to
    /// the 1/p power (for the sup-norm baseline: the largest inlier
    /// residual, with p recorded as infinity).
    pub loss: T,
    /// Covered fraction of the training sample.
    pub coverage: f64,
    pub candidate: CandidateProvenance,
    pub seed: u64,
    #[serde(skip, default)]
    pub wall_time: Duration,
}

impl<T: Scalar> FitResult<T> {
    /// The fit as solver coefficients (the stored objective is not
    /// meaningful here and is set to zero).
    pub fn to_coefficients(&self) -> Coefficients<T> {
        Coefficients {
            coords: self.coords.clone(),
            values: self.coefficients.clone(),
            objective: T::zero(),
        }
    }
}

/// A reference-class fit: the regression pair plus the class parameters the
/// sweep settled on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceFit<T> {
    pub result: FitResult<T>,
    pub class: ReferenceClass<T>,
}

struct Hit<T> {
    idx: u128,
    loss: T,
    a: Coefficients<T>,
    dnf: Dnf,
    covered: usize,
    candidate: SketchCandidate,
}

/// Chunked deterministic parallel argmin: evaluates indices in fixed 1024
/// windows, keeps the hit `better` prefers, optionally stops at the first
/// nonempty window. `better(a, b)` must be a strict order for determinism.
fn scan_min<H, E, C>(len: u128, stop_at_first: bool, eval: E, better: C) -> Result<Option<H>>
where
    H: Send,
    E: Fn(u128) -> Result<Option<H>> + Sync,
    C: Fn(&H, &H) -> bool,
{
    let mut best: Option<H> = None;
    let mut lo = 0u128;
    while lo < len {
        let hi = (lo + SCAN_CHUNK).min(len);
        let idxs: Vec<u128> = (lo..hi).collect();
        let found: Vec<Option<H>> = idxs
            .par_iter()
            .map(|&i| eval(i))
            .collect::<Result<Vec<_>>>()?;
        for h in found.into_iter().flatten() {
            if best.as_ref().is_none_or(|b| better(&h, b)) {
                best = Some(h);
            }
        }
        if stop_at_first && best.is_some() {
            break;
        }
        lo = hi;
    }
    Ok(best)
}

/// Solves the candidate's weighted system and returns the coefficients
/// (relabelled to dataset coordinates) with the full-sample residual
/// weights. `None` when the solver gave up on this candidate.
fn candidate_coefficients<T: Scalar>(
    data: &Dataset<T>,
    cfg: &SketchConfig,
    cand: &SketchCandidate,
) -> Result<Option<(Coefficients<T>, Vec<T>)>> {
    let rows: Vec<Vec<T>> = cand
        .examples
        .iter()
        .map(|&j| {
            let y = data.y().row(j);
            cand.coords.iter().map(|&c| y[c]).collect()
        })
        .collect();
    let ys = RealMat::from_rows(&rows)?;
    let zs: Vec<T> = cand.examples.iter().map(|&j| data.z()[j]).collect();
    let weights: Vec<T> = cand
        .exponents
        .iter()
        .map(|&q| T::from_f64_c((1.0 + cfg.gamma).powi(q)))
        .collect();
    let sys = WeightedSystem::new(ys, zs, weights, cfg.p, T::from_f64_c(cfg.b))?;
    let a = match solve_weighted_lp(&sys, DEFAULT_TOL) {
        Ok(a) => a.relabel(cand.coords.clone()),
        Err(Error::SolverDidNotConverge { .. }) => {
            log::debug!("skipping candidate: solver did not converge");
            return Ok(None);
        }
        Err(e) => return Err(e),
    };
    let w = residual_weights(&a, data, cfg.p)?;
    Ok(Some((a, w)))
}

fn screen_weights<T: Scalar>(w: &[T], params: &FitParams) -> bool {
    let cfg = &params.sketch;
    let cut = T::from_f64_c((1.0 + cfg.eta) * (params.alpha * cfg.eps).powf(cfg.p));
    let passing = w.iter().filter(|&&v| v <= cut).count();
    passing as f64 >= (1.0 - cfg.eta) * cfg.mu * w.len() as f64
}

/// Cheap necessary-condition filter run before the condition search: enough
/// rows must individually sit at or below (1+η)·(αε)ᵖ, the final check's
/// per-row scale. Any row covered by a term the threshold search keeps
/// carries at most εμm weight, so whenever εμm ≤ (1+η)(αε)ᵖ a successful
/// threshold search implies this screen passes; at larger εμm the screen
/// can prune candidates the search would still accept, which is the
/// documented trade of the sampled default path.
pub fn candidate_screen<T: Scalar>(
    a: &Coefficients<T>,
    data: &Dataset<T>,
    params: &FitParams,
) -> Result<bool> {
    params.validate()?;
    let w = residual_weights(a, data, params.sketch.p)?;
    Ok(screen_weights(&w, params))
}

fn try_candidate<T: Scalar>(
    data: &Dataset<T>,
    params: &FitParams,
    index: &TermIndex,
    cand: SketchCandidate,
    idx: u128,
) -> Result<Option<Hit<T>>> {
    let cfg = &params.sketch;
    let Some((a, w)) = candidate_coefficients(data, cfg, &cand)? else {
        return Ok(None);
    };
    if params.screen && !screen_weights(&w, params) {
        return Ok(None);
    }
    let eps = T::from_f64_c(cfg.eps);
    let found = match params.variant {
        SearchVariant::Threshold => wtcond_threshold_indexed(index, &w, cfg.mu, eps, cfg.eta)?,
        SearchVariant::Greedy => wtcond_greedy_indexed(index, &w, cfg.mu, eps, cfg.eta)?,
    };
    let Some(found) = found else {
        return Ok(None);
    };
    let loss = conditional_empirical_loss(&a, data, &found.dnf, cfg.p)?;
    if !(loss.to_f64_c() <= params.alpha * cfg.eps) {
        return Ok(None);
    }
    Ok(Some(Hit {
        idx,
        loss,
        a,
        dnf: found.dnf,
        covered: found.covered,
        candidate: cand,
    }))
}

fn build_plan(params: &FitParams, d: usize) -> Result<CandidatePlan> {
    let space = CandidateSpace::new(&params.sketch, d)?;
    match params.budget {
        None => Ok(CandidatePlan::full(space)),
        Some(b) => CandidatePlan::sampled(space, b, params.seed),
    }
}

fn check_pool<T: Scalar>(data: &Dataset<T>, cfg: &SketchConfig) -> Result<()> {
    if data.m() < cfg.m0 {
        return Err(Error::parameter(format!(
            "need at least m0 = {} rows, dataset has {}",
            cfg.m0,
            data.m()
        )));
    }
    if cfg.s > data.d() {
        return Err(Error::parameter(format!(
            "sparsity {} exceeds feature dimension {}",
            cfg.s,
            data.d()
        )));
    }
    Ok(())
}

/// Fits a (coefficients, condition) pair: scan candidates, solve, search,
/// and accept the first (or best) pair whose conditional loss on the whole
/// training sample is at most α·ε. `None` means no candidate passed.
pub fn fit_conditional<T: Scalar>(
    data: &Dataset<T>,
    params: &FitParams,
) -> Result<Option<FitResult<T>>> {
    let start = Instant::now();
    params.validate()?;
    let cfg = &params.sketch;
    check_pool(data, cfg)?;
    let index = TermIndex::build(data.x(), params.k)?;
    let plan = build_plan(params, data.d())?;

    let best = scan_min(
        plan.len(),
        params.mode == FitMode::FirstFound,
        |i| try_candidate(data, params, &index, plan.get(i), i),
        |a, b| match params.mode {
            FitMode::FirstFound => a.idx < b.idx,
            FitMode::ExhaustiveBest => {
                a.loss < b.loss || (a.loss == b.loss && a.idx < b.idx)
            }
        },
    )?;
    Ok(best.map(|hit| {
        let coverage = hit.covered as f64 / data.m() as f64;
        assert!(
            coverage >= (1.0 - cfg.eta) * cfg.mu,
            "returned fit misses its coverage bound"
        );
        assert!(
            hit.loss.to_f64_c() <= params.alpha * cfg.eps,
            "returned fit misses its loss bound"
        );
        FitResult {
            coords: hit.a.coords,
            coefficients: hit.a.values,
            dnf: hit.dnf,
            p: cfg.p,
            loss: hit.loss,
            coverage,
            candidate: CandidateProvenance {
                examples: hit.candidate.examples,
                exponents: hit.candidate.exponents,
            },
            seed: params.seed,
            wall_time: start.elapsed(),
        }
    }))
}

/// Fits a regression pair whose condition is a reference class around the
/// query point x*: the candidate loop runs with the reference-class sweep
/// in place of the plain condition search, and among candidates that found
/// a class the smallest conditional loss wins. `None` when no candidate's
/// sweep found a class containing x*.
pub fn fit_reference_class<T: Scalar>(
    data: &Dataset<T>,
    x_star: &[bool],
    mu0: f64,
    eps0: f64,
    params: &FitParams,
) -> Result<Option<ReferenceFit<T>>> {
    let start = Instant::now();
    params.validate()?;
    let cfg = &params.sketch;
    check_pool(data, cfg)?;
    if x_star.len() != data.n() {
        return Err(Error::parameter(format!(
            "query point has {} attributes, dataset has {}",
            x_star.len(),
            data.n()
        )));
    }
    let index = TermIndex::build(data.x(), params.k)?;
    let plan = build_plan(params, data.d())?;

    struct ClassHit<T> {
        idx: u128,
        loss: T,
        a: Coefficients<T>,
        class: ReferenceClass<T>,
        candidate: SketchCandidate,
    }
    let best = scan_min(
        plan.len(),
        false,
        |i| -> Result<Option<ClassHit<T>>> {
            let cand = plan.get(i);
            let Some((a, w)) = candidate_coefficients(data, cfg, &cand)? else {
                return Ok(None);
            };
            let class = reference_class_search_indexed(
                &index,
                &w,
                x_star,
                mu0,
                T::from_f64_c(eps0),
                cfg.eta,
            )?;
            let Some(class) = class else {
                return Ok(None);
            };
            let loss = conditional_empirical_loss(&a, data, &class.dnf, cfg.p)?;
            Ok(Some(ClassHit {
                idx: i,
                loss,
                a,
                class,
                candidate: cand,
            }))
        },
        |a, b| a.loss < b.loss || (a.loss == b.loss && a.idx < b.idx),
    )?;
    Ok(best.map(|hit| {
        assert!(
            hit.class.dnf.satisfied_by(x_star),
            "returned class does not contain the query point"
        );
        let coverage = hit.class.covered as f64 / data.m() as f64;
        ReferenceFit {
            result: FitResult {
                coords: hit.a.coords,
                coefficients: hit.a.values,
                dnf: hit.class.dnf.clone(),
                p: cfg.p,
                loss: hit.loss,
                coverage,
                candidate: CandidateProvenance {
                    examples: hit.candidate.examples,
                    exponents: hit.candidate.exponents,
                },
                seed: params.seed,
                wall_time: start.elapsed(),
            },
            class: hit.class,
        }
    }))
}

/// Scores a fit on a holdout: covered fraction and conditional loss. With
/// `refit = Some(train)`, the coefficients are first re-solved (unit
/// weights, same coordinates) on the training rows the condition selects.
/// Zero holdout coverage reports as `(0.0, None)`.
pub fn evaluate<T: Scalar>(
    fit: &FitResult<T>,
    holdout: &Dataset<T>,
    refit: Option<&Dataset<T>>,
) -> Result<(f64, Option<T>)> {
    if !fit.p.is_finite() {
        return Err(Error::parameter(
            "evaluate needs a finite loss exponent; sup-norm fits are scored by their own scan",
        ));
    }
    let (count, coverage) = fit.dnf.coverage(holdout.x())?;
    if count == 0 {
        return Ok((0.0, None));
    }
    let a = match refit {
        None => fit.to_coefficients(),
        Some(train) => {
            fit.dnf.coverage(train.x())?;
            let rows = train.rows_satisfying(&fit.dnf);
            if rows.is_empty() {
                return Err(Error::parameter(
                    "cannot refit: condition covers no training rows",
                ));
            }
            let sub = train.select_rows(&rows)?;
            let restricted: Vec<Vec<T>> = (0..sub.m())
                .map(|j| {
                    let y = sub.y().row(j);
                    fit.coords.iter().map(|&c| y[c]).collect()
                })
                .collect();
            let sys = WeightedSystem::new(
                RealMat::from_rows(&restricted)?,
                sub.z().to_vec(),
                vec![T::one(); sub.m()],
                fit.p,
                train.b(),
            )?;
            solve_weighted_lp(&sys, DEFAULT_TOL)?.relabel(fit.coords.clone())
        }
    };
    let loss = conditional_empirical_loss(&a, holdout, &fit.dnf, fit.p)?;
    Ok((coverage, Some(loss)))
}

/// One row of an RC curve: the target mass and what the fit at that mass
/// achieved on the holdout (nothing, when the fit was infeasible).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RcRow<T> {
    pub mu: f64,
    pub coverage: Option<f64>,
    pub loss: Option<T>,
    pub feasible: bool,
}

/// Runs one conditional fit per grid entry (descending μ values in (0, 1]),
/// evaluating each feasible fit on the holdout with refitting. Infeasible
/// entries still produce a row.
pub fn rc_curve<T: Scalar>(
    train: &Dataset<T>,
    test: &Dataset<T>,
    mu_grid: &[f64],
    params: &FitParams,
) -> Result<Vec<RcRow<T>>> {
    if mu_grid.is_empty() {
        return Err(Error::parameter("mu grid must not be empty"));
    }
    if mu_grid.iter().any(|&mu| !(mu > 0.0 && mu <= 1.0)) {
        return Err(Error::parameter("mu grid entries must lie in (0, 1]"));
    }
    if mu_grid.windows(2).any(|pair| pair[1] > pair[0]) {
        return Err(Error::parameter("mu grid must be descending"));
    }
    let mut rows = Vec::with_capacity(mu_grid.len());
    for &mu in mu_grid {
        let mut at_mu = params.clone();
        at_mu.sketch.mu = mu;
        match fit_conditional(train, &at_mu)? {
            Some(fit) => {
                let (coverage, loss) = evaluate(&fit, test, Some(train))?;
                rows.push(RcRow {
                    mu,
                    coverage: Some(coverage),
                    loss,
                    feasible: true,
                });
            }
            None => rows.push(RcRow {
                mu,
                coverage: None,
                loss: None,
                feasible: false,
            }),
        }
    }
    Ok(rows)
}

/// Writes an RC curve as CSV with the header `mu,coverage,loss,status`;
/// infeasible rows leave coverage and loss empty.
pub fn write_rc_csv<T: Scalar>(rows: &[RcRow<T>], mut out: impl Write) -> Result<()> {
    writeln!(out, "mu,coverage,loss,status")?;
    for row in rows {
        let coverage = row.coverage.map(|c| c.to_string()).unwrap_or_default();
        let loss = row
            .loss
            .map(|l| l.to_f64_c().to_string())
            .unwrap_or_default();
        let status = if row.feasible { "ok" } else { "infeasible" };
        writeln!(out, "{},{coverage},{loss},{status}", row.mu)?;
    }
    Ok(())
}

//! Weighted ℓp regression on a handful of coordinates under a norm-ball
//! constraint, plus the residual and conditional-loss evaluations built on
//! top of the fitted coefficients.
//!
//! The systems are tiny on purpose: the fitting loop solves one system per
//! sketch candidate, each with r rows and s unknowns where both are single
//! digits. p = 2 is handled in closed form (weighted least squares, with a
//! ridge multiplier found by bisection when the ball constraint is active).
//! Other p ≥ 1 run iteratively reweighted least squares on the smoothed
//! residual (r² + δ²)^{p/2}, damped so the objective never increases, then a
//! projected-gradient polish with backtracking. Projection onto the ℓp ball
//! is by bisection on the dual scalar.

pub(crate) mod linalg;

use linalg::{dot, psd_solve_min_norm, sym_eigen};

use crate::conditions::Dnf;
use crate::dataio::Dataset;
use crate::error::{Error, Result};
use crate::mat::RealMat;
use crate::scalar::Scalar;

/// Default relative convergence tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;
const MAX_ITERATIONS: usize = 500;
/// Allowed overshoot of the norm constraint: ‖a‖_p ≤ b·(1 + NORM_SLACK).
const NORM_SLACK: f64 = 1e-9;
/// The ridge multiplier and ball projections bisect until the norm matches
/// b to this relative precision.
const BALL_TOL: f64 = 1e-10;

/// A coordinate-restricted weighted regression instance: rows (y ∈ ℝˢ, z),
/// per-row positive weights, the loss exponent, and the coefficient bound.
#[derive(Debug, Clone)]
pub struct WeightedSystem<T> {
    ys: RealMat<T>,
    zs: Vec<T>,
    weights: Vec<T>,
    p: f64,
    b: T,
}

impl<T: Scalar> WeightedSystem<T> {
    pub fn new(ys: RealMat<T>, zs: Vec<T>, weights: Vec<T>, p: f64, b: T) -> Result<Self> {
        let m = ys.rows();
        if m == 0 || ys.cols() == 0 {
            return Err(Error::parameter("weighted system needs rows and columns"));
        }
        if zs.len() != m || weights.len() != m {
            return Err(Error::parameter(format!(
                "weighted system shape mismatch: {} rows, {} targets, {} weights",
                m,
                zs.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(*w > T::zero())) {
            return Err(Error::parameter("weights must be strictly positive"));
        }
        if p < 1.0 {
            return Err(Error::parameter(format!("p must be >= 1, got {p}")));
        }
        if !(b > T::zero()) {
            return Err(Error::parameter("coefficient bound b must be positive"));
        }
        Ok(WeightedSystem {
            ys,
            zs,
            weights,
            p,
            b,
        })
    }

    pub fn len(&self) -> usize {
        self.ys.rows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.ys.cols()
    }

    /// The raw objective Σ wⱼ·|⟨a, yⱼ⟩ − zⱼ|ᵖ.
    pub fn objective(&self, a: &[T]) -> T {
        let mut acc = T::zero();
        for j in 0..self.len() {
            let r = dot(a, self.ys.row(j)) - self.zs[j];
            acc = acc + self.weights[j] * power_p(r, self.p);
        }
        acc
    }

    /// Smoothed objective Σ wⱼ·(rⱼ² + δ²)^{p/2} used by the iterations.
    fn smoothed_objective(&self, a: &[T], delta2: T) -> T {
        let half_p = T::from_f64_c(self.p / 2.0);
        let mut acc = T::zero();
        for j in 0..self.len() {
            let r = dot(a, self.ys.row(j)) - self.zs[j];
            acc = acc + self.weights[j] * (r * r + delta2).powf(half_p);
        }
        acc
    }

    /// Gram matrix and right-hand side of the normal equations under
    /// per-row multipliers `omega` (already including the system weights).
    fn normal_equations(&self, omega: &[T]) -> (Vec<T>, Vec<T>) {
        let s = self.dim();
        let mut gram = vec![T::zero(); s * s];
        let mut rhs = vec![T::zero(); s];
        for j in 0..self.len() {
            let y = self.ys.row(j);
            let w = omega[j];
            for i in 0..s {
                let wyi = w * y[i];
                rhs[i] = rhs[i] + wyi * self.zs[j];
                for l in i..s {
                    gram[i * s + l] = gram[i * s + l] + wyi * y[l];
                }
            }
        }
        for i in 0..s {
            for l in 0..i {
                gram[i * s + l] = gram[l * s + i];
            }
        }
        (gram, rhs)
    }
}

/// |r|^p with the common exponents special-cased; powf is measurably slow
/// in the candidate scan.
pub(crate) fn power_p<T: Scalar>(r: T, p: f64) -> T {
    let a = r.abs();
    if p == 2.0 {
        a * a
    } else if p == 1.0 {
        a
    } else {
        a.powf(T::from_f64_c(p))
    }
}

/// Fitted coefficients on named coordinates, with the achieved objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients<T> {
    pub coords: Vec<usize>,
    pub values: Vec<T>,
    pub objective: T,
}

impl<T: Scalar> Coefficients<T> {
    /// Renames the solve-local coordinates 0..s to dataset coordinates.
    pub fn relabel(mut self, coords: Vec<usize>) -> Self {
        assert_eq!(coords.len(), self.values.len());
        self.coords = coords;
        self
    }

    /// ⟨a, Πy⟩ for a full-width feature row.
    pub fn predict(&self, y_full: &[T]) -> T {
        self.coords
            .iter()
            .zip(&self.values)
            .map(|(&c, &a)| a * y_full[c])
            .fold(T::zero(), |acc, v| acc + v)
    }

    pub fn norm_p(&self, p: f64) -> T {
        lp_norm(&self.values, p)
    }
}

fn lp_norm<T: Scalar>(v: &[T], p: f64) -> T {
    if p == 2.0 {
        dot(v, v).sqrt()
    } else if p == 1.0 {
        v.iter().fold(T::zero(), |acc, &x| acc + x.abs())
    } else {
        let sum = v
            .iter()
            .fold(T::zero(), |acc, &x| acc + x.abs().powf(T::from_f64_c(p)));
        sum.powf(T::from_f64_c(1.0 / p))
    }
}

/// Minimizes Σ wⱼ·|⟨a, yⱼ⟩ − zⱼ|ᵖ over ‖a‖_p ≤ b.
pub fn solve_weighted_lp<T: Scalar>(sys: &WeightedSystem<T>, tol: f64) -> Result<Coefficients<T>> {
    solve_weighted_lp_traced(sys, tol).map(|(c, _)| c)
}

/// As [`solve_weighted_lp`], also returning the accepted objective values
/// iteration by iteration (the trace is non-increasing by construction).
pub fn solve_weighted_lp_traced<T: Scalar>(
    sys: &WeightedSystem<T>,
    tol: f64,
) -> Result<(Coefficients<T>, Vec<T>)> {
    if !(tol > 0.0) {
        return Err(Error::parameter("solver tolerance must be positive"));
    }
    if sys.p == 2.0 {
        let a = solve_l2(sys);
        let objective = sys.objective(&a);
        return Ok((
            Coefficients {
                coords: (0..sys.dim()).collect(),
                values: a,
                objective,
            },
            vec![objective],
        ));
    }
    solve_general(sys, tol, MAX_ITERATIONS)
}

/// Closed-form weighted least squares; when the unconstrained minimizer
/// leaves the ℓ2 ball, the KKT ridge multiplier is found by bisection.
fn solve_l2<T: Scalar>(sys: &WeightedSystem<T>) -> Vec<T> {
    let (gram, rhs) = sys.normal_equations(&sys.weights);
    let eig = sym_eigen(&gram, sys.dim());
    let a = psd_solve_min_norm(&eig, &rhs);
    let norm = lp_norm(&a, 2.0);
    if norm <= sys.b * T::from_f64_c(1.0 + NORM_SLACK) {
        return a;
    }

    let proj = eig.project(&rhs);
    let solution_at = |lambda: T| -> Vec<T> {
        let coeff: Vec<T> = proj
            .iter()
            .zip(&eig.values)
            .map(|(&c, &l)| c / (l + lambda))
            .collect();
        eig.combine(&coeff)
    };
    let norm_at = |lambda: T| lp_norm(&solution_at(lambda), 2.0);

    // ‖a(λ)‖₂ decreases in λ; bracket then bisect to the bound.
    let mut lo = T::zero();
    let mut hi = T::one();
    while norm_at(hi) > sys.b {
        hi = hi * T::from_f64_c(2.0);
    }
    let target = sys.b;
    for _ in 0..200 {
        let mid = (lo + hi) * T::from_f64_c(0.5);
        if norm_at(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if (norm_at(hi) - target).abs() <= target * T::from_f64_c(BALL_TOL) {
            break;
        }
    }
    solution_at(hi)
}

/// Damped IRLS followed by projected-gradient polish for general p ≥ 1.
fn solve_general<T: Scalar>(
    sys: &WeightedSystem<T>,
    tol: f64,
    max_iterations: usize,
) -> Result<(Coefficients<T>, Vec<T>)> {
    let s = sys.dim();
    let delta = T::from_f64_c(1e-8) * sys.b;
    let delta2 = delta * delta;
    let tol_t = T::from_f64_c(tol);
    let half = T::from_f64_c(0.5);

    // Start from the (projected) least-squares solution.
    let mut a = {
        let (gram, rhs) = sys.normal_equations(&sys.weights);
        let eig = sym_eigen(&gram, s);
        let init = psd_solve_min_norm(&eig, &rhs);
        project_lp_ball(&init, sys.p, sys.b)
    };
    let mut f = sys.smoothed_objective(&a, delta2);
    let mut trace = vec![f];
    let mut iterations = 0usize;
    let mut last_gap = T::zero();

    // Phase 1: damped IRLS. The reweighted solve may overshoot; pull back
    // toward the previous iterate until the objective does not increase.
    while iterations < max_iterations {
        iterations += 1;
        let exponent = T::from_f64_c(sys.p / 2.0 - 1.0);
        let omega: Vec<T> = (0..sys.len())
            .map(|j| {
                let r = dot(&a, sys.ys.row(j)) - sys.zs[j];
                sys.weights[j] * (r * r + delta2).powf(exponent)
            })
            .collect();
        let (gram, rhs) = sys.normal_equations(&omega);
        let eig = sym_eigen(&gram, s);
        let target = project_lp_ball(&psd_solve_min_norm(&eig, &rhs), sys.p, sys.b);

        let mut step = T::one();
        let mut accepted = None;
        for _ in 0..30 {
            let candidate: Vec<T> = a
                .iter()
                .zip(&target)
                .map(|(&x, &t)| x + step * (t - x))
                .collect();
            let fc = sys.smoothed_objective(&candidate, delta2);
            if fc <= f {
                accepted = Some((candidate, fc));
                break;
            }
            step = step * half;
        }
        let Some((next, fnext)) = accepted else {
            break; // IRLS stalled; hand over to the gradient polish.
        };
        last_gap = (f - fnext) / (T::one() + fnext);
        a = next;
        f = fnext;
        trace.push(f);
        if last_gap <= tol_t {
            break;
        }
    }

    // Phase 2: projected gradient with backtracking. Guarantees we end at a
    // point where no feasible descent step of meaningful size remains.
    let mut step = T::one();
    let mut converged_pg = false;
    while iterations < max_iterations {
        iterations += 1;
        let exponent = T::from_f64_c(sys.p / 2.0 - 1.0);
        let p_t = T::from_f64_c(sys.p);
        let mut grad = vec![T::zero(); s];
        for j in 0..sys.len() {
            let y = sys.ys.row(j);
            let r = dot(&a, y) - sys.zs[j];
            let factor = sys.weights[j] * p_t * r * (r * r + delta2).powf(exponent);
            for i in 0..s {
                grad[i] = grad[i] + factor * y[i];
            }
        }

        let mut accepted = None;
        let mut t = step;
        for _ in 0..60 {
            let trial: Vec<T> = a.iter().zip(&grad).map(|(&x, &g)| x - t * g).collect();
            let candidate = project_lp_ball(&trial, sys.p, sys.b);
            let fc = sys.smoothed_objective(&candidate, delta2);
            if fc <= f {
                accepted = Some((candidate, fc, t));
                break;
            }
            t = t * half;
        }
        let Some((next, fnext, used)) = accepted else {
            converged_pg = true; // no descent direction left at any step size
            break;
        };
        let moved = next
            .iter()
            .zip(&a)
            .map(|(&x, &y)| (x - y).abs())
            .fold(T::zero(), |acc, v| acc.max(v));
        last_gap = (f - fnext) / (T::one() + fnext);
        a = next;
        f = fnext;
        trace.push(f);
        step = used * T::from_f64_c(2.0);
        if last_gap <= tol_t && moved <= tol_t * (T::one() + lp_norm(&a, sys.p)) {
            converged_pg = true;
            break;
        }
    }

    if !converged_pg && iterations >= max_iterations {
        return Err(Error::SolverDidNotConverge {
            iterations,
            gap: last_gap.to_f64_c(),
            best: a.iter().map(|v| v.to_f64_c()).collect(),
        });
    }

    let objective = sys.objective(&a);
    Ok((
        Coefficients {
            coords: (0..s).collect(),
            values: a,
            objective,
        },
        trace,
    ))
}

/// Euclidean projection onto {x : ‖x‖_p ≤ b} by bisection on the dual
/// scalar. Returns the input untouched when it is already inside.
fn project_lp_ball<T: Scalar>(v: &[T], p: f64, b: T) -> Vec<T> {
    let norm = lp_norm(v, p);
    if norm <= b {
        return v.to_vec();
    }
    if p == 2.0 {
        let scale = b / norm;
        return v.iter().map(|&x| x * scale).collect();
    }
    if p == 1.0 {
        // Soft threshold: x_i = sign(v_i)·max(|v_i| − τ, 0) with τ chosen so
        // the ℓ1 norm lands on b. Σ max(|v_i| − τ, 0) is decreasing in τ.
        let mut lo = T::zero();
        let mut hi = v.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()));
        for _ in 0..200 {
            let tau = (lo + hi) * T::from_f64_c(0.5);
            let total = v
                .iter()
                .map(|&x| (x.abs() - tau).max(T::zero()))
                .fold(T::zero(), |acc, t| acc + t);
            if total > b {
                lo = tau;
            } else {
                hi = tau;
            }
            if (hi - lo) <= hi.max(T::epsilon()) * T::from_f64_c(BALL_TOL) {
                break;
            }
        }
        return v
            .iter()
            .map(|&x| x.signum() * (x.abs() - hi).max(T::zero()))
            .collect();
    }

    // General p > 1: KKT gives x_i + λp·x_i^{p−1} = |v_i| on each coordinate
    // (x_i sharing v_i's sign); the norm of x(λ) decreases in λ.
    let p_t = T::from_f64_c(p);
    let pm1 = T::from_f64_c(p - 1.0);
    let coordinate = |vi_abs: T, lambda: T| -> T {
        let mut lo = T::zero();
        let mut hi = vi_abs;
        for _ in 0..100 {
            let u = (lo + hi) * T::from_f64_c(0.5);
            if u + lambda * p_t * u.powf(pm1) > vi_abs {
                hi = u;
            } else {
                lo = u;
            }
        }
        (lo + hi) * T::from_f64_c(0.5)
    };
    let norm_at = |lambda: T| -> T {
        let x: Vec<T> = v.iter().map(|&vi| coordinate(vi.abs(), lambda)).collect();
        lp_norm(&x, p)
    };
    let mut lo = T::zero();
    let mut hi = T::one();
    while norm_at(hi) > b {
        hi = hi * T::from_f64_c(2.0);
    }
    for _ in 0..100 {
        let mid = (lo + hi) * T::from_f64_c(0.5);
        if norm_at(mid) > b {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    v.iter()
        .map(|&vi| vi.signum() * coordinate(vi.abs(), hi))
        .collect()
}

/// Per-row weights w⁽ʲ⁾ = |⟨a, Πy⁽ʲ⁾⟩ − z⁽ʲ⁾|ᵖ over a whole dataset.
pub fn residual_weights<T: Scalar>(
    a: &Coefficients<T>,
    data: &Dataset<T>,
    p: f64,
) -> Result<Vec<T>> {
    if let Some(&c) = a.coords.iter().max() {
        if c >= data.d() {
            return Err(Error::parameter(format!(
                "coefficient coordinate {} out of range for d={}",
                c,
                data.d()
            )));
        }
    }
    Ok((0..data.m())
        .map(|j| power_p(a.predict(data.y().row(j)) - data.z()[j], p))
        .collect())
}

/// Empirical conditional loss (Σ residualᵖ over rows with c(x)=1, divided
/// by their count)^{1/p}. Errors when the condition covers no rows.
pub fn conditional_empirical_loss<T: Scalar>(
    a: &Coefficients<T>,
    data: &Dataset<T>,
    c: &Dnf,
    p: f64,
) -> Result<T> {
    let mut count = 0usize;
    let mut acc = T::zero();
    for j in 0..data.m() {
        if c.satisfied_by(data.x().row(j)) {
            count += 1;
            acc = acc + power_p(a.predict(data.y().row(j)) - data.z()[j], p);
        }
    }
    if count == 0 {
        return Err(Error::parameter(
            "conditional loss undefined: condition covers no rows",
        ));
    }
    let mean = acc / T::from_usize_c(count);
    Ok(mean.powf(T::from_f64_c(1.0 / p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn system(
        rows: &[(&[f64], f64)],
        weights: &[f64],
        p: f64,
        b: f64,
    ) -> WeightedSystem<f64> {
        let s = rows[0].0.len();
        let flat: Vec<f64> = rows.iter().flat_map(|(y, _)| y.iter().copied()).collect();
        WeightedSystem::new(
            RealMat::from_vec(flat, rows.len(), s).unwrap(),
            rows.iter().map(|&(_, z)| z).collect(),
            weights.to_vec(),
            p,
            b,
        )
        .unwrap()
    }

    fn random_system(rng: &mut ChaCha8Rng, m: usize, s: usize, p: f64, b: f64) -> WeightedSystem<f64> {
        let flat: Vec<f64> = (0..m * s).map(|_| rng.random_range(-1.0..1.0)).collect();
        let zs: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let ws: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..2.0)).collect();
        WeightedSystem::new(RealMat::from_vec(flat, m, s).unwrap(), zs, ws, p, b).unwrap()
    }

    #[test]
    fn exact_line_through_two_points() {
        let sys = system(&[(&[1.0], 2.0), (&[2.0], 4.0)], &[1.0, 1.0], 2.0, 10.0);
        let got = solve_weighted_lp(&sys, DEFAULT_TOL).unwrap();
        assert_relative_eq!(got.values[0], 2.0, epsilon = 1e-9);
        assert!(got.objective.abs() < 1e-18);
    }

    #[test]
    fn active_ball_constraint_clips_to_boundary() {
        let sys = system(&[(&[1.0], 2.0), (&[2.0], 4.0)], &[1.0, 1.0], 2.0, 1.0);
        let got = solve_weighted_lp(&sys, DEFAULT_TOL).unwrap();
        assert_relative_eq!(got.values[0], 1.0, epsilon = 1e-6);
        assert!(got.norm_p(2.0) <= 1.0 + 1e-9);
    }

    #[test]
    fn l1_fit_is_the_median() {
        let sys = system(
            &[(&[1.0], 0.0), (&[1.0], 1.0), (&[1.0], 10.0)],
            &[1.0, 1.0, 1.0],
            1.0,
            100.0,
        );
        let got = solve_weighted_lp(&sys, DEFAULT_TOL).unwrap();
        assert_relative_eq!(got.values[0], 1.0, epsilon = 1e-4);
    }

    /// Independent check: dense Gaussian elimination on the weighted normal
    /// equations, no shared code with the solver's eigen path.
    fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for col in 0..n {
            let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
            a.swap(col, piv);
            b.swap(col, piv);
            for row in (col + 1)..n {
                let f = a[row][col] / a[col][col];
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for row in (0..n).rev() {
            let mut acc = b[row];
            for k in (row + 1)..n {
                acc -= a[row][k] * x[k];
            }
            x[row] = acc / a[row][row];
        }
        x
    }

    #[test]
    fn matches_normal_equations_when_unconstrained() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let sys = random_system(&mut rng, 20, 3, 2.0, 1e6);
            let got = solve_weighted_lp(&sys, DEFAULT_TOL).unwrap();

            let mut gram = vec![vec![0.0; 3]; 3];
            let mut rhs = vec![0.0; 3];
            for j in 0..sys.len() {
                let y = sys.ys.row(j);
                for i in 0..3 {
                    rhs[i] += sys.weights[j] * y[i] * sys.zs[j];
                    for l in 0..3 {
                        gram[i][l] += sys.weights[j] * y[i] * y[l];
                    }
                }
            }
            let expect = gauss_solve(gram, rhs);
            for (g, e) in got.values.iter().zip(&expect) {
                assert_relative_eq!(g, e, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn beats_random_feasible_probes_for_all_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for &p in &[1.0, 1.5, 2.0, 3.0] {
            let b = 0.8;
            let sys = random_system(&mut rng, 12, 2, p, b);
            let got = solve_weighted_lp(&sys, DEFAULT_TOL).unwrap();
            let f_star = sys.objective(&got.values);
            let mut probes = 0;
            while probes < 100 {
                let probe: Vec<f64> = (0..2).map(|_| rng.random_range(-b..b)).collect();
                if lp_norm(&probe, p) > b {
                    continue;
                }
                probes += 1;
                let f_probe = sys.objective(&probe);
                assert!(
                    f_star <= f_probe * (1.0 + 1e-9) + 1e-12,
                    "p={p}: solver {f_star} beaten by probe {f_probe}"
                );
            }
        }
    }

    #[test]
    fn trace_is_non_increasing() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for &p in &[1.0, 1.5, 3.0] {
            let sys = random_system(&mut rng, 15, 3, p, 0.5);
            let (_, trace) = solve_weighted_lp_traced(&sys, DEFAULT_TOL).unwrap();
            for w in trace.windows(2) {
                assert!(w[1] <= w[0], "objective rose from {} to {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn solutions_stay_inside_the_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for &p in &[1.0, 1.5, 2.0, 3.0] {
            for _ in 0..10 {
                let b = rng.random_range(0.2..1.5);
                let sys = random_system(&mut rng, 10, 3, p, b);
                let got = solve_weighted_lp(&sys, DEFAULT_TOL).unwrap();
                assert!(
                    got.norm_p(p) <= b * (1.0 + 1e-9),
                    "p={p}: norm {} over bound {b}",
                    got.norm_p(p)
                );
            }
        }
    }

    #[test]
    fn weight_scaling_leaves_the_minimizer_alone() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let base = random_system(&mut rng, 15, 2, 1.5, 0.7);
        let scaled = WeightedSystem::new(
            base.ys.clone(),
            base.zs.clone(),
            base.weights.iter().map(|w| w * 5.0).collect(),
            1.5,
            0.7,
        )
        .unwrap();
        let a = solve_weighted_lp(&base, DEFAULT_TOL).unwrap();
        let b = solve_weighted_lp(&scaled, DEFAULT_TOL).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert_relative_eq!(x, y, epsilon = 1e-6);
        }
        assert_relative_eq!(b.objective, 5.0 * a.objective, max_relative = 1e-9);
    }

    #[test]
    fn degenerate_system_returns_minimum_norm_solution() {
        // Identical columns: any a1 + a2 = 2 fits; minimum norm is (1, 1).
        let sys = system(&[(&[1.0, 1.0], 2.0)], &[1.0], 2.0, 10.0);
        let got = solve_weighted_lp(&sys, DEFAULT_TOL).unwrap();
        assert_relative_eq!(got.values[0], 1.0, epsilon = 1e-9);
        assert_relative_eq!(got.values[1], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn works_in_single_precision() {
        let ys = RealMat::from_vec(vec![1.0f32, 2.0], 2, 1).unwrap();
        let sys = WeightedSystem::new(ys, vec![2.0f32, 4.0], vec![1.0, 1.0], 2.0, 10.0).unwrap();
        let got = solve_weighted_lp(&sys, 1e-5).unwrap();
        assert!((got.values[0] - 2.0).abs() < 1e-4);
    }

    #[test]
    fn iteration_cap_reports_best_iterate() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let sys = random_system(&mut rng, 15, 3, 1.5, 0.5);
        let err = solve_general(&sys, 1e-300, 1).unwrap_err();
        match err {
            Error::SolverDidNotConverge { iterations, best, .. } => {
                assert_eq!(iterations, 1);
                assert_eq!(best.len(), 3);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn projection_lands_on_the_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for &p in &[1.0, 1.5, 2.0, 3.0] {
            for _ in 0..20 {
                let v: Vec<f64> = (0..4).map(|_| rng.random_range(-3.0..3.0)).collect();
                let x = project_lp_ball(&v, p, 1.0);
                let norm = lp_norm(&x, p);
                assert!(norm <= 1.0 + 1e-9, "p={p}: {norm}");
                if lp_norm(&v, p) > 1.0 {
                    assert!(norm >= 1.0 - 1e-6, "projection should land on the boundary");
                }
            }
        }
    }

    #[test]
    fn residual_weight_formulas() {
        use crate::dataio::{generate_synthetic, SyntheticSpec};
        let spec = SyntheticSpec {
            m: 100,
            d: 4,
            n: 6,
            g: 2,
            k: 2,
            s: 2,
            sigma2: 0.0,
            p_sat: 0.3,
            seed: 2,
        };
        let (data, truth) = generate_synthetic::<f64>(&spec).unwrap();

        // Planted coefficients on noiseless member rows: zero weight.
        let planted = Coefficients {
            coords: truth.coords.clone(),
            values: truth.coefficients.clone(),
            objective: 0.0,
        };
        let w = residual_weights(&planted, &data, 2.0).unwrap();
        for j in data.rows_satisfying(&truth.dnf) {
            assert_eq!(w[j], 0.0);
        }

        // Zero predictor: weights are |z|^p.
        let zero = Coefficients {
            coords: vec![0],
            values: vec![0.0],
            objective: 0.0,
        };
        let w = residual_weights(&zero, &data, 2.0).unwrap();
        for j in 0..data.m() {
            assert_eq!(w[j], data.z()[j] * data.z()[j]);
        }

        // p = 2 squares the residual.
        assert_eq!(power_p(-3.0, 2.0), 9.0);

        let bad = Coefficients {
            coords: vec![10],
            values: vec![1.0],
            objective: 0.0,
        };
        assert!(residual_weights(&bad, &data, 2.0).is_err());
    }

    #[test]
    fn conditional_loss_examples() {
        use crate::conditions::{Literal, Term};
        use crate::mat::BoolMat;

        let x = BoolMat::from_rows(&[vec![true], vec![false]]).unwrap();
        let y = RealMat::from_vec(vec![1.0, 1.0], 2, 1).unwrap();
        let data = Dataset::new(x, y, vec![1.0, -1.0], 2.0).unwrap();
        let zero = Coefficients {
            coords: vec![0],
            values: vec![0.0],
            objective: 0.0,
        };

        let tautology = Dnf::new(vec![
            Term::new(vec![Literal::positive(0)]).unwrap(),
            Term::new(vec![Literal::negative(0)]).unwrap(),
        ]);
        // RMS of residuals (1, −1) is exactly 1.
        assert_relative_eq!(
            conditional_empirical_loss(&zero, &data, &tautology, 2.0).unwrap(),
            1.0
        );

        // Only the first row is covered; its residual is 1 − 4 = −3.
        let first = Dnf::new(vec![Term::new(vec![Literal::positive(0)]).unwrap()]);
        let a4 = Coefficients {
            coords: vec![0],
            values: vec![4.0],
            objective: 0.0,
        };
        assert_relative_eq!(
            conditional_empirical_loss(&a4, &data, &first, 1.0).unwrap(),
            3.0
        );

        // Perfect fit on covered rows.
        let exact = Coefficients {
            coords: vec![0],
            values: vec![1.0],
            objective: 0.0,
        };
        assert_eq!(
            conditional_empirical_loss(&exact, &data, &first, 2.0).unwrap(),
            0.0
        );

        // Empty condition: undefined.
        assert!(conditional_empirical_loss(&zero, &data, &Dnf::empty(), 2.0).is_err());
    }

    #[test]
    fn system_validation() {
        let ys = RealMat::from_vec(vec![1.0f64], 1, 1).unwrap();
        assert!(WeightedSystem::new(ys.clone(), vec![1.0], vec![0.0], 2.0, 1.0).is_err());
        assert!(WeightedSystem::new(ys.clone(), vec![1.0], vec![1.0], 0.5, 1.0).is_err());
        assert!(WeightedSystem::new(ys.clone(), vec![1.0], vec![1.0], 2.0, 0.0).is_err());
        assert!(WeightedSystem::new(ys.clone(), vec![1.0, 2.0], vec![1.0], 2.0, 1.0).is_err());
        let sys = WeightedSystem::new(ys, vec![1.0], vec![1.0], 2.0, 1.0).unwrap();
        assert!(solve_weighted_lp(&sys, 0.0).is_err());
    }
}

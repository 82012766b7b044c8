//! Two-phase short-step barrier method with an extra centering step and
//! Diophantine rounding of every iterate.
//!
//! Phase one follows the central path of `ν⟨G, X⟩ − ln det X`, with
//! `G = π_L(X₀⁻¹)`, from `ν = 1` (where `X₀` is exactly central) down to
//! `ν ≤ 1/(18n(1 + R/r))`. Phase two follows the path of
//! `η⟨π_L(C), X⟩ − ln det X` upwards until `n/η ≤ ε`.
//!
//! One iteration at parameter `η`:
//!
//! 1. `x⁺ = x + n_η(x)`, requiring `‖n_η(x)‖²_x ≤ 1/16`;
//! 2. `x'' = x⁺ + n_η(x⁺)` (extra centering), then `‖n_η(x'')‖²_{x''} ≤ 1/1024`;
//! 3. round the coordinates of `x''` at Euclidean tolerance `ε̄`, requiring
//!    the rounded point to be positive definite with `‖n_η‖² ≤ 1/81`;
//! 4. `η ← θη`.
//!
//! All of these conditions are verified with exact rational comparisons.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::barrier::{hessian_solve, newton_direction, newton_proximity, BarrierError, NewtonStep};
use crate::diophantine::{approx_vector, vector_size_bound, DiophantineError};
use crate::exact::{
    bit_size_vector, ceil, ceil_sqrt, format_rational, ln_upper, pow2_floor, rat, sqrt_upper, BitSize, Rational,
};
use crate::linalg::{invert_sym, ldl_pd_check, PdCheck, SymMatrix};
use crate::model::{FeasiblePoint, ModelError, SdpProblem};
use crate::path::{sqrt_slack, PathBounds, PathError};

/// Loop-top proximity threshold `(1/4)²`.
pub fn loop_top_threshold() -> Rational {
    rat(1, 16)
}

/// Post-rounding proximity threshold `(1/9)²`.
pub fn rounded_threshold() -> Rational {
    rat(1, 81)
}

/// Proximity required before rounding, `(1/32)²`.
pub fn centered_threshold() -> Rational {
    rat(1, 1024)
}

/// Maximal number of tolerance halvings when a rounded point fails its checks.
pub const MAX_ROUNDING_RETRIES: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Phase {
    #[serde(rename = "phase1")]
    Auxiliary,
    #[serde(rename = "phase2")]
    Main,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::Auxiliary => f.write_str("phase1"),
            Phase::Main => f.write_str("phase2"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("objective is degenerate: {0}")]
    Path(#[from] PathError),
    #[error("{phase} iteration {k}: {source}")]
    Barrier { phase: Phase, k: u64, source: BarrierError },
    #[error("{phase} iteration {k}: rounding failed: {source}")]
    Rounding { phase: Phase, k: u64, source: RoundError },
    #[error("{phase} iteration {k}: invariant violated: {message}")]
    Invariant { phase: Phase, k: u64, message: String },
    #[error("{phase}: iteration budget of {budget} exhausted before termination")]
    IterationBudget { phase: Phase, budget: u64 },
    #[error("phase-two start is not centered: squared Newton norm {proximity_sq} > 1/16")]
    PhaseTwoPrecondition { proximity_sq: Rational },
}

impl SolveError {
    /// Whether the failure is an exhausted iteration budget.
    pub fn is_budget(&self) -> bool {
        matches!(self, SolveError::IterationBudget { .. })
    }
}

/// How the path parameter evolves and when a phase stops.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfig {
    pub phase: Phase,
    /// Linear cost of the phase; phase one uses `π_L(X₀⁻¹)`.
    pub cost: SymMatrix,
    pub eta1: Rational,
    /// Per-iteration multiplier of the path parameter.
    pub theta: Rational,
    /// Phase one stops at `ν ≤ target`; phase two at `n/η ≤ target`.
    pub target: Rational,
    /// Barrier parameter bound `n`.
    pub theta_f: Rational,
}

impl PhaseConfig {
    pub fn auxiliary(problem: &SdpProblem, gstar: SymMatrix, nu_lo: Rational) -> Self {
        let s = ceil_sqrt(problem.n() as u64) as i64;
        PhaseConfig {
            phase: Phase::Auxiliary,
            cost: gstar,
            eta1: Rational::one(),
            theta: Rational::one() - rat(1, 8 * s),
            target: nu_lo,
            theta_f: rat(problem.n() as i64, 1),
        }
    }

    pub fn main(problem: &SdpProblem, chat: SymMatrix, eta1: Rational) -> Self {
        let s = ceil_sqrt(problem.n() as u64) as i64;
        PhaseConfig {
            phase: Phase::Main,
            cost: chat,
            eta1,
            theta: Rational::one() + rat(1, 8 * s),
            target: problem.epsilon().clone(),
            theta_f: rat(problem.n() as i64, 1),
        }
    }

    pub fn is_finished(&self, eta: &Rational) -> bool {
        match self.phase {
            Phase::Auxiliary => *eta <= self.target,
            Phase::Main => &self.theta_f / eta <= self.target,
        }
    }

    /// `⌈10⌈√n⌉·ln(7n/(6·η₁·target))⌉`, with an upper bound on `ln`.
    pub fn iteration_bound(&self) -> u64 {
        let s = ceil_sqrt(self.theta_f.to_integer().to_u64().unwrap_or(1));
        let arg = rat(7, 6) * &self.theta_f / (&self.eta1 * &self.target);
        if arg <= Rational::one() {
            return 0;
        }
        let bound = rat(10 * s as i64, 1) * ln_upper(&arg);
        ceil(&bound).to_u64().unwrap_or(u64::MAX)
    }
}

/// Loop state of one phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PathState {
    pub k: u64,
    pub eta: Rational,
    pub point: FeasiblePoint,
    /// Squared Newton norm of `point` at `eta`, once evaluated.
    pub proximity_sq: Option<Rational>,
}

/// One line of the per-iteration certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRecord {
    pub k: u64,
    pub phase: Phase,
    #[serde(serialize_with = "ser_rational")]
    pub eta: Rational,
    #[serde(serialize_with = "ser_bits")]
    pub coord_bitsize: BitSize,
    #[serde(serialize_with = "ser_bits")]
    pub matrix_bitsize: BitSize,
    /// Encoding-length ceiling for the rounded coordinates (`0` without rounding).
    #[serde(serialize_with = "ser_bits")]
    pub coord_bound: BitSize,
    /// `‖n_η(x_k)‖²` at the top of the iteration.
    #[serde(serialize_with = "ser_rational")]
    pub loop_top_proximity_sq: Rational,
    /// `‖n_η‖²` after the extra centering step, before rounding.
    #[serde(serialize_with = "ser_rational")]
    pub centered_proximity_sq: Rational,
    /// `‖n_η‖²` at the iterate handed to the next iteration.
    #[serde(serialize_with = "ser_rational")]
    pub proximity_sq: Rational,
    pub rounded: bool,
    #[serde(serialize_with = "ser_rational")]
    pub eps_bar_used: Rational,
    pub retries: u32,
}

fn ser_rational<S: serde::Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(x))
}

fn ser_bits<S: serde::Serializer>(x: &BitSize, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(x.bits())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOptions {
    /// Per-phase cap on iterations, overriding the theoretical budget.
    pub max_iters: Option<u64>,
    /// Disable to observe unrounded bit-size growth.
    pub rounding: bool,
    pub phase1_only: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iters: None,
            rounding: true,
            phase1_only: false,
        }
    }
}

/// Why rounding an iterate failed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoundError {
    #[error(transparent)]
    Diophantine(#[from] DiophantineError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Barrier(#[from] BarrierError),
    #[error("no admissible rounding after {retries} halvings of the tolerance (last tolerance {last})")]
    Exhausted { retries: u32, last: Rational },
    #[error(
        "rounded point leaves the ball of radius R around X0 (coordinate beyond 2R); R is not a valid outer radius"
    )]
    OutsideRadius,
    #[error("rounded coordinates use {size} bits, above the ceiling {bound}")]
    SizeBound { size: BitSize, bound: BitSize },
}

/// A rounded iterate together with its certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct Rounded {
    pub point: FeasiblePoint,
    pub proximity_sq: Rational,
    pub eps_used: Rational,
    pub retries: u32,
    pub coord_bound: BitSize,
}

/// `⌈2R⌉`-based ceiling `d(6 + ⌈log₂(d²⌈2R⌉/ε̄²)⌉)` on rounded coordinates.
pub fn coord_size_bound(problem: &SdpProblem, eps_bar: &Rational) -> BitSize {
    let cap = ceil(&(problem.big_r() * rat(2, 1)));
    vector_size_bound(problem.d(), &cap, eps_bar)
}

/// Rounds the coordinates of `point` at tolerance `eps_bar`, halving the
/// tolerance until the rounded matrix is positive definite with squared
/// Newton norm at most `1/81`.
pub fn round_iterate(
    problem: &SdpProblem,
    point: &FeasiblePoint,
    eta: &Rational,
    cost: &SymMatrix,
    eps_bar: &Rational,
) -> Result<Rounded, RoundError> {
    if problem.d() == 0 {
        return Ok(Rounded {
            point: point.clone(),
            proximity_sq: newton_proximity(problem, point, eta, cost)?,
            eps_used: eps_bar.clone(),
            retries: 0,
            coord_bound: BitSize(0),
        });
    }
    let mut eps = eps_bar.clone().min(Rational::one());
    for retries in 0..=MAX_ROUNDING_RETRIES {
        let coords = approx_vector(point.coords(), &eps)?;
        let candidate = problem.point_from_coords(coords)?;
        if ldl_pd_check(candidate.matrix()).is_pd() {
            let proximity_sq = newton_proximity(problem, &candidate, eta, cost)?;
            if proximity_sq <= rounded_threshold() {
                if !problem.coords_within_cap(candidate.coords()) {
                    return Err(RoundError::OutsideRadius);
                }
                let bound = coord_size_bound(problem, &eps);
                let size = bit_size_vector(candidate.coords());
                if size > bound {
                    return Err(RoundError::SizeBound { size, bound });
                }
                return Ok(Rounded {
                    point: candidate,
                    proximity_sq,
                    eps_used: eps,
                    retries,
                    coord_bound: bound,
                });
            }
        }
        eps /= rat(2, 1);
    }
    Err(RoundError::Exhausted {
        retries: MAX_ROUNDING_RETRIES,
        last: eps * rat(2, 1),
    })
}

/// Largest power of two not above `1/(12·√⟨Ĉ, H(x₁)⁻¹Ĉ⟩)`, with the square
/// root bounded from above.
pub fn initial_eta(problem: &SdpProblem, x1: &FeasiblePoint, chat: &SymMatrix) -> Result<Rational, SolveError> {
    let w = hessian_solve(problem, x1.matrix(), chat).map_err(|source| SolveError::Barrier {
        phase: Phase::Main,
        k: 0,
        source,
    })?;
    let s = chat.inner(&w);
    if !s.is_positive() {
        return Err(SolveError::Path(PathError::DegenerateObjective));
    }
    let denom = rat(12, 1) * sqrt_upper(&s, &sqrt_slack());
    Ok(pow2_floor(&denom.recip()))
}

fn require_pd(point: &SymMatrix) -> Result<(), BarrierError> {
    match ldl_pd_check(point) {
        PdCheck::PositiveDefinite => Ok(()),
        PdCheck::NotPositiveDefinite { pivot_index, pivot } => Err(BarrierError::NotPositiveDefinite {
            index: pivot_index,
            pivot,
        }),
    }
}

/// Drives one phase iteration by iteration.
#[derive(Debug)]
pub struct PhaseRunner<'a> {
    problem: &'a SdpProblem,
    config: PhaseConfig,
    eps_bar: Rational,
    rounding: bool,
    budget: u64,
    state: PathState,
    /// Newton step at the current point and parameter.
    pending: NewtonStep,
}

impl<'a> PhaseRunner<'a> {
    /// Checks `‖n_{η₁}(x₁)‖² ≤ 1/16` before accepting the start.
    pub fn new(
        problem: &'a SdpProblem,
        config: PhaseConfig,
        x1: FeasiblePoint,
        eps_bar: Rational,
        options: &SolveOptions,
    ) -> Result<Self, SolveError> {
        let budget = options.max_iters.unwrap_or_else(|| config.iteration_bound() + 2);
        let phase = config.phase;
        let barrier = |source| SolveError::Barrier { phase, k: 1, source };
        require_pd(x1.matrix()).map_err(barrier)?;
        let pending = newton_direction(problem, &x1, &config.eta1, &config.cost).map_err(barrier)?;
        if pending.proximity_sq > loop_top_threshold() {
            return Err(match phase {
                Phase::Main => SolveError::PhaseTwoPrecondition {
                    proximity_sq: pending.proximity_sq,
                },
                Phase::Auxiliary => SolveError::Invariant {
                    phase,
                    k: 1,
                    message: format!(
                        "start is not centered: squared Newton norm {} > 1/16",
                        pending.proximity_sq
                    ),
                },
            });
        }
        let state = PathState {
            k: 1,
            eta: config.eta1.clone(),
            point: x1,
            proximity_sq: Some(pending.proximity_sq.clone()),
        };
        Ok(PhaseRunner {
            problem,
            config,
            eps_bar,
            rounding: options.rounding,
            budget,
            state,
            pending,
        })
    }

    pub fn config(&self) -> &PhaseConfig {
        &self.config
    }

    pub fn state(&self) -> &PathState {
        &self.state
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn is_finished(&self) -> bool {
        self.config.is_finished(&self.state.eta)
    }

    /// Iterations completed so far.
    pub fn iterations(&self) -> u64 {
        self.state.k - 1
    }

    fn invariant(&self, message: String) -> SolveError {
        SolveError::Invariant {
            phase: self.config.phase,
            k: self.state.k,
            message,
        }
    }

    fn barrier(&self, source: BarrierError) -> SolveError {
        SolveError::Barrier {
            phase: self.config.phase,
            k: self.state.k,
            source,
        }
    }

    fn model(&self, source: ModelError) -> SolveError {
        self.invariant(format!("iterate left the affine space: {source}"))
    }

    fn check_point(&self, point: &FeasiblePoint, what: &str) -> Result<(), SolveError> {
        require_pd(point.matrix()).map_err(|e| self.invariant(format!("{what} not positive definite: {e}")))?;
        if self.problem.apply_a(point.matrix()).as_slice() != self.problem.b() {
            return Err(self.invariant(format!("{what} violates A X = b")));
        }
        Ok(())
    }

    /// Performs one iteration: two Newton steps, rounding, and the update of
    /// the path parameter.
    pub fn step(&mut self) -> Result<TraceRecord, SolveError> {
        if self.iterations() >= self.budget {
            return Err(SolveError::IterationBudget {
                phase: self.config.phase,
                budget: self.budget,
            });
        }
        let top = self.pending.proximity_sq.clone();
        if top > loop_top_threshold() {
            return Err(self.invariant(format!("loop-top squared Newton norm {top} > 1/16")));
        }
        let plus = self
            .state
            .point
            .step(self.problem, &self.pending.direction)
            .map_err(|e| self.model(e))?;
        self.check_point(&plus, "x+")?;
        let plus_step =
            newton_direction(self.problem, &plus, &self.state.eta, &self.config.cost).map_err(|e| self.barrier(e))?;
        let centered = plus
            .step(self.problem, &plus_step.direction)
            .map_err(|e| self.model(e))?;
        self.check_point(&centered, "centered iterate")?;
        let centered_prox = newton_proximity(self.problem, &centered, &self.state.eta, &self.config.cost)
            .map_err(|e| self.barrier(e))?;
        if self.rounding && centered_prox > centered_threshold() {
            return Err(self.invariant(format!("squared Newton norm {centered_prox} > 1/1024 before rounding")));
        }

        let (next, proximity_sq, eps_used, retries, coord_bound) = if self.rounding {
            let r = round_iterate(
                self.problem,
                &centered,
                &self.state.eta,
                &self.config.cost,
                &self.eps_bar,
            )
            .map_err(|source| SolveError::Rounding {
                phase: self.config.phase,
                k: self.state.k,
                source,
            })?;
            (r.point, r.proximity_sq, r.eps_used, r.retries, r.coord_bound)
        } else {
            (centered, centered_prox.clone(), Rational::zero(), 0, BitSize(0))
        };
        self.check_point(&next, "rounded iterate")?;

        let record = TraceRecord {
            k: self.state.k,
            phase: self.config.phase,
            eta: self.state.eta.clone(),
            coord_bitsize: bit_size_vector(next.coords()),
            matrix_bitsize: next.matrix().bit_size(),
            coord_bound,
            loop_top_proximity_sq: top,
            centered_proximity_sq: centered_prox,
            proximity_sq: proximity_sq.clone(),
            rounded: self.rounding,
            eps_bar_used: eps_used,
            retries,
        };

        self.state.eta = &self.state.eta * &self.config.theta;
        self.state.k += 1;
        self.state.point = next;
        self.pending = newton_direction(self.problem, &self.state.point, &self.state.eta, &self.config.cost)
            .map_err(|e| self.barrier(e))?;
        self.state.proximity_sq = Some(self.pending.proximity_sq.clone());
        Ok(record)
    }

    /// Iterates until the termination test holds, appending to `trace`.
    pub fn run(self, trace: &mut Vec<TraceRecord>) -> Result<PhaseOutcome, SolveError> {
        self.run_observed(trace, &mut |_, _| {})
    }

    /// Like [`run`](Self::run), handing every new iterate to `observer`.
    pub fn run_observed(
        mut self,
        trace: &mut Vec<TraceRecord>,
        observer: &mut dyn FnMut(&TraceRecord, &FeasiblePoint),
    ) -> Result<PhaseOutcome, SolveError> {
        while !self.is_finished() {
            let record = self.step()?;
            observer(&record, &self.state.point);
            trace.push(record);
        }
        let proximity_sq = self.pending.proximity_sq.clone();
        if proximity_sq > loop_top_threshold() {
            return Err(self.invariant(format!("terminal squared Newton norm {proximity_sq} > 1/16")));
        }
        Ok(PhaseOutcome {
            iterations: self.iterations(),
            point: self.state.point,
            eta: self.state.eta,
            proximity_sq,
        })
    }
}

/// Terminal state of a phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOutcome {
    pub point: FeasiblePoint,
    /// Path parameter after the last update.
    pub eta: Rational,
    pub iterations: u64,
    /// `‖n_η(point)‖²` at the final `eta`.
    pub proximity_sq: Rational,
}

/// Result of a two-phase solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x_star: FeasiblePoint,
    /// `⟨C, X*⟩` for the original objective.
    pub objective: Rational,
    /// `n/η` at termination; zero when the objective is constant on the feasible set.
    pub gap_bound: Rational,
    pub phase1: PhaseOutcome,
    pub phase2: Option<PhaseOutcome>,
    pub eta1: Option<Rational>,
    pub bounds: Option<PathBounds>,
    pub trace: Vec<TraceRecord>,
}

impl Solution {
    pub fn iterations(&self) -> (u64, u64) {
        (self.phase1.iterations, self.phase2.as_ref().map_or(0, |p| p.iterations))
    }
}

/// Runs both phases and returns the terminal iterate.
pub fn solve(problem: &SdpProblem, options: &SolveOptions) -> Result<Solution, SolveError> {
    solve_observed(problem, options, &mut |_, _| {})
}

/// [`solve`] with a callback receiving every iterate after rounding.
pub fn solve_observed(
    problem: &SdpProblem,
    options: &SolveOptions,
    observer: &mut dyn FnMut(&TraceRecord, &FeasiblePoint),
) -> Result<Solution, SolveError> {
    let (normalized, offset) = problem.normalize_objective();
    let chat = normalized.c().clone();
    let x0 = problem.initial_point();
    if chat.is_zero() {
        let objective = problem.c().inner(x0.matrix());
        let outcome = PhaseOutcome {
            point: x0.clone(),
            eta: Rational::zero(),
            iterations: 0,
            proximity_sq: Rational::zero(),
        };
        return Ok(Solution {
            x_star: x0,
            objective,
            gap_bound: Rational::zero(),
            phase1: outcome,
            phase2: None,
            eta1: None,
            bounds: None,
            trace: Vec::new(),
        });
    }

    let x0_inv = invert_sym(problem.x0()).map_err(|e| SolveError::Barrier {
        phase: Phase::Auxiliary,
        k: 0,
        source: BarrierError::SingularSystem(e),
    })?;
    let gstar = problem.project(&x0_inv);
    let bounds = PathBounds::new(problem, &chat, &gstar)?;
    let mut trace = Vec::new();

    let config1 = PhaseConfig::auxiliary(problem, gstar, bounds.nu_lo.clone());
    let runner = PhaseRunner::new(problem, config1, x0, bounds.eps_bar.clone(), options)?;
    let phase1 = runner.run_observed(&mut trace, observer)?;
    if options.phase1_only {
        let objective = problem.c().inner(phase1.point.matrix());
        return Ok(Solution {
            x_star: phase1.point.clone(),
            objective,
            gap_bound: Rational::zero(),
            phase1,
            phase2: None,
            eta1: None,
            bounds: Some(bounds),
            trace,
        });
    }

    let eta1 = initial_eta(problem, &phase1.point, &chat)?;
    let config2 = PhaseConfig::main(problem, chat.clone(), eta1.clone());
    let runner = PhaseRunner::new(problem, config2, phase1.point.clone(), bounds.eps_bar.clone(), options)?;
    let phase2 = runner.run_observed(&mut trace, observer)?;

    let x_star = phase2.point.clone();
    let objective = problem.c().inner(x_star.matrix());
    if objective != &offset + chat.inner(x_star.matrix()) {
        return Err(SolveError::Invariant {
            phase: Phase::Main,
            k: phase2.iterations,
            message: "objective differs from offset + <pi_L(C), X*>".to_string(),
        });
    }
    let gap_bound = rat(problem.n() as i64, 1) / &phase2.eta;
    Ok(Solution {
        x_star,
        objective,
        gap_bound,
        phase1,
        phase2: Some(phase2),
        eta1: Some(eta1),
        bounds: Some(bounds),
        trace,
    })
}

/// `η₁·θ^(k−1)`.
pub fn eta_at(config: &PhaseConfig, k: u64) -> Rational {
    let mut eta = config.eta1.clone();
    for _ in 1..k {
        eta *= &config.theta;
    }
    eta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::model::SdpData;

    fn min_eig(n: usize, c: SymMatrix, eps: Rational) -> SdpProblem {
        SdpProblem::new(SdpData {
            n,
            c,
            a: vec![SymMatrix::identity(n)],
            b: vec![int(1)],
            x0: SymMatrix::identity(n).scale(&rat(1, n as i64)),
            r: rat(1, 2 * n as i64),
            big_r: int(1),
            epsilon: eps,
        })
        .unwrap()
    }

    #[test]
    fn initial_eta_example() {
        // m = 0, X = I, ⟨C, H⁻¹C⟩ = trace(C²) = 144
        let c = SymMatrix::diag(&[int(12), int(0)]);
        let p = SdpProblem::new(SdpData {
            n: 2,
            c: c.clone(),
            a: vec![],
            b: vec![],
            x0: SymMatrix::identity(2),
            r: rat(1, 2),
            big_r: int(4),
            epsilon: rat(1, 10),
        })
        .unwrap();
        let x1 = p.initial_point();
        assert_eq!(initial_eta(&p, &x1, &c).unwrap(), rat(1, 256));
        let doubled = initial_eta(&p, &x1, &c.scale(&int(2))).unwrap();
        assert_eq!(doubled, rat(1, 512));
        assert!(matches!(
            initial_eta(&p, &x1, &SymMatrix::zeros(2)),
            Err(SolveError::Path(PathError::DegenerateObjective))
        ));
    }

    #[test]
    fn rounding_example() {
        let p = SdpProblem::new(SdpData {
            n: 1,
            c: SymMatrix::diag(&[int(1)]),
            a: vec![],
            b: vec![],
            x0: SymMatrix::identity(1),
            r: rat(1, 2),
            big_r: int(2),
            epsilon: rat(1, 10),
        })
        .unwrap();
        assert_eq!(p.d(), 1);
        let point = p.point_from_coords(vec![rat(31, 100)]).unwrap();
        // at the central point of η⟨C, X⟩ − ln det X the Newton step vanishes
        let x = point.matrix().entries()[0].clone();
        let eta = x.recip();
        let r = round_iterate(&p, &point, &eta, p.c(), &rat(1, 10)).unwrap();
        assert_eq!(r.point.coords(), &[rat(1, 3)]);
        assert_eq!(r.retries, 0);
        assert!(r.proximity_sq <= rounded_threshold());
    }

    #[test]
    fn rounding_keeps_simple_points() {
        let p = min_eig(2, SymMatrix::diag(&[int(1), int(2)]), rat(1, 100));
        let x0 = p.initial_point();
        let (normalized, _) = p.normalize_objective();
        let r = round_iterate(&p, &x0, &Rational::zero(), normalized.c(), &rat(1, 10)).unwrap();
        assert_eq!(r.point, x0);
        assert_eq!(r.proximity_sq, Rational::zero());
    }

    #[test]
    fn phase_one_fixed_point() {
        let p = min_eig(3, SymMatrix::diag(&[int(1), int(2), int(3)]), rat(1, 10));
        let gstar = p.project(&invert_sym(p.x0()).unwrap());
        assert!(gstar.is_zero());
        let config = PhaseConfig::auxiliary(&p, gstar, rat(1, 108));
        let mut runner =
            PhaseRunner::new(&p, config, p.initial_point(), rat(1, 1000), &SolveOptions::default()).unwrap();
        for _ in 0..5 {
            let rec = runner.step().unwrap();
            assert_eq!(rec.proximity_sq, Rational::zero());
            assert_eq!(runner.state().point, p.initial_point());
        }
    }

    #[test]
    fn eta_geometry_and_budget() {
        let p = min_eig(2, SymMatrix::diag(&[int(1), int(2)]), rat(1, 10));
        let gstar = p.project(&invert_sym(p.x0()).unwrap());
        let config = PhaseConfig::auxiliary(&p, gstar, rat(1, 72));
        assert_eq!(config.theta, rat(15, 16));
        let mut runner = PhaseRunner::new(
            &p,
            config.clone(),
            p.initial_point(),
            rat(1, 1000),
            &SolveOptions::default(),
        )
        .unwrap();
        let mut k = 0;
        while !runner.is_finished() {
            let rec = runner.step().unwrap();
            k += 1;
            assert_eq!(rec.k, k);
            assert_eq!(rec.eta, eta_at(&config, k));
        }
        // ν₁θ^k ≤ 1/72 first holds at k = ⌈ln 72 / −ln(15/16)⌉ = 67
        assert_eq!(k, 67);
        assert!(k <= config.iteration_bound());
    }

    #[test]
    fn constant_objective_returns_start() {
        let p = min_eig(2, SymMatrix::identity(2).scale(&int(3)), rat(1, 10));
        let s = solve(&p, &SolveOptions::default()).unwrap();
        assert_eq!(s.x_star, p.initial_point());
        assert_eq!(s.objective, int(3));
        assert_eq!(s.gap_bound, Rational::zero());
        assert!(s.trace.is_empty());
    }

    #[test]
    fn small_min_eigenvalue() {
        let p = min_eig(2, SymMatrix::diag(&[int(1), int(2)]), rat(1, 10));
        let s = solve(&p, &SolveOptions::default()).unwrap();
        assert!(s.gap_bound <= rat(1, 10));
        assert!(s.objective - int(1) <= rat(1, 10));
        assert!(ldl_pd_check(s.x_star.matrix()).is_pd());
        for rec in &s.trace {
            assert!(rec.coord_bitsize <= rec.coord_bound);
            assert!(rec.proximity_sq <= rounded_threshold());
        }
    }

    #[test]
    fn iteration_cap_is_reported() {
        let p = min_eig(2, SymMatrix::diag(&[int(1), int(2)]), rat(1, 10));
        let opts = SolveOptions {
            max_iters: Some(3),
            ..SolveOptions::default()
        };
        let err = solve(&p, &opts).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn understated_outer_radius_is_detected() {
        let mut data = min_eig(2, SymMatrix::diag(&[int(1), int(2)]), rat(1, 10))
            .data()
            .clone();
        data.r = rat(1, 100);
        data.big_r = rat(1, 50);
        let p = SdpProblem::new(data).unwrap();
        let err = solve(&p, &SolveOptions::default()).unwrap_err();
        assert!(
            matches!(
                err,
                SolveError::Rounding {
                    source: RoundError::OutsideRadius,
                    ..
                }
            ),
            "{err}"
        );
    }
}

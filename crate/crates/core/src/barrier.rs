//! Log-determinant barrier geometry restricted to the affine space
//! `{X : A X = b}`.
//!
//! With `L = ker A` and the trace inner product, the barrier `−ln det X` has
//! gradient `−π_L(X⁻¹)` and Hessian `Y ↦ π_L(X⁻¹ Y X⁻¹)` on `L`. The Newton
//! direction of `η⟨C, X⟩ − ln det X` is obtained from an `m × m` system
//!
//! ```text
//! M_ij = trace(X A_i X A_j),   v_i = −b_i + η·trace(A_i X C X),   M y = v,
//! n_η(X) = X (A* y) X + X − η X C X.
//! ```
//!
//! Nothing here ever evaluates a logarithm or a square root.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::exact::Rational;
use crate::linalg::{
    gauss_solve, int_mul, int_trace_mul, integerize, invert_sym, ldl_pd_check, solve_integer, LinalgError, Matrix,
    PdCheck, SymMatrix,
};
use crate::model::{FeasiblePoint, SdpProblem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BarrierError {
    #[error("point is not positive definite: LDL pivot {index} = {pivot}")]
    NotPositiveDefinite { index: usize, pivot: Rational },
    #[error("Newton system is singular ({0}); the constraint matrices must be independent")]
    SingularSystem(LinalgError),
    #[error("argument is not in ker A (constraint {j})")]
    NotInKernel { j: usize },
    #[error("identity check failed: {0}")]
    IdentityViolated(String),
}

/// `M y = v` for the projected Newton direction.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonSystem {
    pub matrix: Matrix,
    pub rhs: Vec<Rational>,
}

/// A Newton direction together with its squared local norm at the base point.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonStep {
    pub direction: SymMatrix,
    /// `‖n_η(X)‖²_X`.
    pub proximity_sq: Rational,
}

/// Base point with its cached exact inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalGeometry {
    x: SymMatrix,
    x_inv: SymMatrix,
}

impl LocalGeometry {
    pub fn new(x: &SymMatrix) -> Result<Self, BarrierError> {
        require_pd(x)?;
        let x_inv = invert_sym(x).map_err(BarrierError::SingularSystem)?;
        Ok(LocalGeometry { x: x.clone(), x_inv })
    }

    pub fn x(&self) -> &SymMatrix {
        &self.x
    }

    pub fn x_inv(&self) -> &SymMatrix {
        &self.x_inv
    }
}

fn require_pd(x: &SymMatrix) -> Result<(), BarrierError> {
    match ldl_pd_check(x) {
        PdCheck::PositiveDefinite => Ok(()),
        PdCheck::NotPositiveDefinite { pivot_index, pivot } => Err(BarrierError::NotPositiveDefinite {
            index: pivot_index,
            pivot,
        }),
    }
}

fn require_kernel(problem: &SdpProblem, y: &SymMatrix) -> Result<(), BarrierError> {
    match problem.apply_a(y).iter().position(|v| !v.is_zero()) {
        Some(j) => Err(BarrierError::NotInKernel { j: j + 1 }),
        None => Ok(()),
    }
}

/// `trace(P Q)` for square matrices.
fn trace_of_product(p: &Matrix, q: &Matrix) -> Rational {
    let n = p.rows();
    let mut acc = Rational::zero();
    for k in 0..n {
        for l in 0..n {
            let a = &p[(k, l)];
            if a.is_zero() {
                continue;
            }
            acc += a * &q[(l, k)];
        }
    }
    acc
}

/// A symmetric matrix as integer entries over one denominator.
struct Scaled {
    n: usize,
    num: Vec<BigInt>,
    den: BigInt,
}

impl Scaled {
    fn of(x: &SymMatrix) -> Self {
        let (num, den) = integerize(x.entries());
        Scaled { n: x.n(), num, den }
    }
}

/// Integer Gram matrix `G_ij = trace(X̃ Ã_i X̃ Ã_j)` together with the
/// products `X̃ Ã_j`, where `X = X̃/dx` and `A_j = Ã_j/s_j`.
struct IntSystem {
    constraints: Vec<Scaled>,
    products: Vec<Vec<BigInt>>,
    gram: Vec<Vec<BigInt>>,
}

fn int_system(problem: &SdpProblem, x: &Scaled) -> IntSystem {
    let n = problem.n();
    let constraints: Vec<Scaled> = problem.constraints().matrices().iter().map(Scaled::of).collect();
    let products: Vec<Vec<BigInt>> = constraints.iter().map(|a| int_mul(&x.num, &a.num, n)).collect();
    let m = products.len();
    let mut gram = vec![vec![BigInt::zero(); m]; m];
    for i in 0..m {
        for j in i..m {
            let v = int_trace_mul(&products[i], &products[j], n);
            gram[j][i] = v.clone();
            gram[i][j] = v;
        }
    }
    IntSystem {
        constraints,
        products,
        gram,
    }
}

/// Gram-type matrix `M_ij = trace(X A_i X A_j)`.
fn system_matrix(problem: &SdpProblem, x: &SymMatrix) -> Matrix {
    let xs = Scaled::of(x);
    let sys = int_system(problem, &xs);
    let m = sys.gram.len();
    let dx2 = &xs.den * &xs.den;
    let mut out = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            let den = &dx2 * &sys.constraints[i].den * &sys.constraints[j].den;
            out.set(i, j, Rational::new(sys.gram[i][j].clone(), den));
        }
    }
    out
}

/// Assembles `M` and `v` at `X`.
pub fn newton_system(problem: &SdpProblem, x: &SymMatrix, eta: &Rational, cost: &SymMatrix) -> NewtonSystem {
    let xcx = x.sandwich(cost);
    let rhs = problem
        .apply_a(&xcx)
        .into_iter()
        .zip(problem.b())
        .map(|(t, b)| eta * t - b)
        .collect();
    NewtonSystem {
        matrix: system_matrix(problem, x),
        rhs,
    }
}

/// Projected Newton direction `n_η(X)` for `η⟨cost, X⟩ − ln det X`.
///
/// `X` must satisfy `A X = b`; `cost` need not lie in `L`.
pub fn newton_direction(
    problem: &SdpProblem,
    point: &FeasiblePoint,
    eta: &Rational,
    cost: &SymMatrix,
) -> Result<NewtonStep, BarrierError> {
    newton_step_at(problem, point.matrix(), eta, cost)
}

/// Squared local norm `‖n_η(X)‖²_X` alone, without assembling the direction.
pub fn newton_proximity(
    problem: &SdpProblem,
    point: &FeasiblePoint,
    eta: &Rational,
    cost: &SymMatrix,
) -> Result<Rational, BarrierError> {
    let parts = newton_parts(problem, point.matrix(), eta, cost)?;
    Ok(parts.proximity_sq())
}

/// `K X = Q / t` with `K = A*y − ηC`, plus what is needed to rebuild `n_η(X)`.
struct NewtonParts {
    x: Scaled,
    q: Vec<BigInt>,
    t: BigInt,
    dk: BigInt,
    constraints: Vec<Scaled>,
}

impl NewtonParts {
    // ‖n‖²_X = trace((KX)²) + 2 trace(KX) + n
    fn proximity_sq(&self) -> Rational {
        let n = self.x.n;
        let tr_q: BigInt = (0..n).map(|i| self.q[i * n + i].clone()).sum();
        let num = int_trace_mul(&self.q, &self.q, n)
            + BigInt::from(2) * tr_q * &self.t
            + BigInt::from(n as u64) * &self.t * &self.t;
        Rational::new(num, &self.t * &self.t)
    }
}

// Everything is carried as integers over explicit denominators. With
// X = X̃/dx, A_j = Ã_j/s_j, C = C̃/dc, η = e/f and b = b̃/db, the substitution
// y_j = s_j·u_j/σ (σ = f·dc·db) turns M y = v into the integer system G u = w
// with w_i = e·db·trace(Ã_i X̃ C̃ X̃) − f·dc·b̃_i·s_i·dx².
fn newton_parts(
    problem: &SdpProblem,
    x: &SymMatrix,
    eta: &Rational,
    cost: &SymMatrix,
) -> Result<NewtonParts, BarrierError> {
    let n = x.n();
    let xs = Scaled::of(x);
    let cs = Scaled::of(cost);
    let (bn, db) = integerize(problem.b());
    let (e, f) = (eta.numer(), eta.denom());
    let sys = int_system(problem, &xs);
    let cx = int_mul(&cs.num, &xs.num, n);
    let dx2 = &xs.den * &xs.den;
    let w: Vec<BigInt> = sys
        .products
        .iter()
        .zip(&sys.constraints)
        .zip(&bn)
        .map(|((p, a), bi)| e * &db * int_trace_mul(p, &cx, n) - f * &cs.den * bi * &a.den * &dx2)
        .collect();
    let (u, det) = solve_integer(&sys.gram, &w).map_err(BarrierError::SingularSystem)?;

    // K = A*y − ηC = K̃ / dk
    let scale = e * &det * &db;
    let mut k: Vec<BigInt> = cs.num.iter().map(|c| -(c * &scale)).collect();
    for (uj, a) in u.iter().zip(&sys.constraints) {
        if uj.is_zero() {
            continue;
        }
        for (kv, av) in k.iter_mut().zip(&a.num) {
            if !av.is_zero() {
                *kv += uj * av;
            }
        }
    }
    let dk = &det * f * &cs.den * &db;
    let q = int_mul(&k, &xs.num, n);
    let t = &dk * &xs.den;
    Ok(NewtonParts {
        x: xs,
        q,
        t,
        dk,
        constraints: sys.constraints,
    })
}

pub(crate) fn newton_step_at(
    problem: &SdpProblem,
    x: &SymMatrix,
    eta: &Rational,
    cost: &SymMatrix,
) -> Result<NewtonStep, BarrierError> {
    let parts = newton_parts(problem, x, eta, cost)?;
    let n = x.n();
    let xs = &parts.x;
    // n = X K X + X = (X̃ K̃ X̃ + dk·dx·X̃)/(dx²·dk)
    let xq = int_mul(&xs.num, &parts.q, n);
    let den = &xs.den * &xs.den * &parts.dk;
    let dir_num: Vec<BigInt> = xq.iter().zip(&xs.num).map(|(a, b)| a + &parts.t * b).collect();
    for (j, a) in parts.constraints.iter().enumerate() {
        if !int_trace_mul(&a.num, &dir_num, n).is_zero() {
            return Err(BarrierError::IdentityViolated(format!(
                "Newton direction leaves ker A at constraint {}",
                j + 1
            )));
        }
    }
    let entries: Vec<Rational> = dir_num.into_iter().map(|v| Rational::new(v, den.clone())).collect();
    let direction = SymMatrix::symmetrize(Matrix::from_vec(n, n, entries).expect("square"));
    Ok(NewtonStep {
        direction,
        proximity_sq: parts.proximity_sq(),
    })
}

/// `g(X) = −π_L(X⁻¹)`.
pub fn gradient(problem: &SdpProblem, x: &SymMatrix) -> Result<SymMatrix, BarrierError> {
    let geometry = LocalGeometry::new(x)?;
    Ok(problem.project(geometry.x_inv()).neg())
}

/// Solves `H(X) W = Ĉ` on `L`: `W = XĈX + X(A*y)X` with
/// `M y = −(trace(A_i X Ĉ X))_i`. The defining identity
/// `π_L(X⁻¹ W X⁻¹) = Ĉ` is verified before returning.
pub fn hessian_solve(problem: &SdpProblem, x: &SymMatrix, chat: &SymMatrix) -> Result<SymMatrix, BarrierError> {
    require_kernel(problem, chat)?;
    let geometry = LocalGeometry::new(x)?;
    let xcx = x.sandwich(chat);
    let rhs: Vec<Rational> = problem.apply_a(&xcx).into_iter().map(|t| -t).collect();
    let y = gauss_solve(&system_matrix(problem, x), &rhs).map_err(BarrierError::SingularSystem)?;
    let w = xcx.add(&x.sandwich(&problem.apply_a_star(&y)));
    require_kernel(problem, &w)
        .map_err(|_| BarrierError::IdentityViolated("Hessian solution leaves ker A".to_string()))?;
    let back = problem.project(&geometry.x_inv().sandwich(&w));
    if back != *chat {
        return Err(BarrierError::IdentityViolated(
            "pi_L(X^-1 W X^-1) differs from the right-hand side".to_string(),
        ));
    }
    Ok(w)
}

/// `‖Y‖²_X = trace(X⁻¹ Y X⁻¹ Y)` for `Y ∈ L`.
pub fn local_norm_sq(problem: &SdpProblem, geometry: &LocalGeometry, y: &SymMatrix) -> Result<Rational, BarrierError> {
    require_kernel(problem, y)?;
    let p = geometry.x_inv().mul(y);
    Ok(trace_of_product(&p, &p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::model::SdpData;

    fn trace_problem(n: usize, c: SymMatrix) -> SdpProblem {
        SdpProblem::new(SdpData {
            n,
            c,
            a: vec![SymMatrix::identity(n)],
            b: vec![int(1)],
            x0: SymMatrix::identity(n).scale(&rat(1, n as i64)),
            r: rat(1, 2 * n as i64),
            big_r: int(1),
            epsilon: rat(1, 100),
        })
        .unwrap()
    }

    fn free_problem(n: usize) -> SdpProblem {
        SdpProblem::new(SdpData {
            n,
            c: SymMatrix::zeros(n),
            a: vec![],
            b: vec![],
            x0: SymMatrix::identity(n),
            r: rat(1, 2),
            big_r: int(1),
            epsilon: rat(1, 100),
        })
        .unwrap()
    }

    #[test]
    fn gradient_examples() {
        let p = free_problem(2);
        assert_eq!(
            gradient(&p, &SymMatrix::identity(2)).unwrap(),
            SymMatrix::identity(2).neg()
        );

        let p = trace_problem(2, SymMatrix::zeros(2));
        let half = SymMatrix::identity(2).scale(&rat(1, 2));
        assert!(gradient(&p, &half).unwrap().is_zero());
        let x = SymMatrix::diag(&[rat(1, 3), rat(2, 3)]);
        assert_eq!(gradient(&p, &x).unwrap(), SymMatrix::diag(&[rat(-3, 4), rat(3, 4)]));
        assert!(matches!(
            gradient(&p, &SymMatrix::diag(&[int(1), int(0)])),
            Err(BarrierError::NotPositiveDefinite { index: 2, .. })
        ));
    }

    #[test]
    fn unconstrained_direction() {
        let p = free_problem(2);
        let x = p.initial_point();
        let step = newton_direction(&p, &x, &int(1), &SymMatrix::zeros(2)).unwrap();
        assert_eq!(step.direction, SymMatrix::identity(2));
        // ‖I‖²_I = trace(I) = 2
        assert_eq!(step.proximity_sq, int(2));
    }

    #[test]
    fn phase_one_anchor_is_a_fixed_point() {
        let c = SymMatrix::from_rows(vec![vec![int(1), rat(1, 2)], vec![rat(1, 2), int(2)]]).unwrap();
        let mut data = trace_problem(2, c).data().clone();
        data.x0 = SymMatrix::diag(&[rat(1, 4), rat(3, 4)]);
        let p = SdpProblem::new(data).unwrap();
        let cost = p.project(&crate::linalg::invert_sym(p.x0()).unwrap());
        let step = newton_direction(&p, &p.initial_point(), &int(1), &cost).unwrap();
        assert!(step.direction.is_zero());
        assert_eq!(step.proximity_sq, int(0));
    }

    #[test]
    fn hand_evaluated_system() {
        // C = diag(1, 2), π_L(C) = diag(−1/2, 1/2), X = I/2, η = 1
        let p = trace_problem(2, SymMatrix::diag(&[int(1), int(2)]));
        let chat = p.project(p.c());
        assert_eq!(chat, SymMatrix::diag(&[rat(-1, 2), rat(1, 2)]));
        let x = p.initial_point();
        let sys = newton_system(&p, x.matrix(), &int(1), &chat);
        // M₁₁ = trace(X²) = 1/2; v₁ = −1 + trace(XĈX) = −1
        assert_eq!(sys.matrix.entries(), &[rat(1, 2)]);
        assert_eq!(sys.rhs, vec![int(-1)]);
        let step = newton_direction(&p, &x, &int(1), &chat).unwrap();
        // y = −2: n = −2·X² + X − XĈX = −I/2 + I/2 − Ĉ/4
        assert_eq!(step.direction, SymMatrix::diag(&[rat(1, 8), rat(-1, 8)]));
        assert_eq!(step.direction.trace(), int(0));
    }

    #[test]
    fn hessian_solve_examples() {
        let p = free_problem(2);
        let x = SymMatrix::diag(&[int(2), int(3)]);
        let c = SymMatrix::unit(2, 0, 1);
        assert_eq!(hessian_solve(&p, &x, &c).unwrap(), x.sandwich(&c));
        let p = trace_problem(3, SymMatrix::zeros(3));
        assert!(hessian_solve(&p, p.x0(), &SymMatrix::zeros(3)).unwrap().is_zero());
        assert_eq!(
            hessian_solve(&p, p.x0(), &SymMatrix::identity(3)),
            Err(BarrierError::NotInKernel { j: 1 })
        );
    }

    #[test]
    fn local_norm_examples() {
        let p = trace_problem(2, SymMatrix::zeros(2));
        let g = LocalGeometry::new(&SymMatrix::identity(2).scale(&rat(1, 2))).unwrap();
        assert_eq!(local_norm_sq(&p, &g, &SymMatrix::zeros(2)).unwrap(), int(0));
        let y = SymMatrix::diag(&[rat(1, 4), rat(-1, 4)]);
        assert_eq!(local_norm_sq(&p, &g, &y).unwrap(), rat(1, 2));
        let identity = LocalGeometry::new(&SymMatrix::identity(2)).unwrap();
        let y = SymMatrix::from_rows(vec![vec![int(1), int(3)], vec![int(3), int(-1)]]).unwrap();
        assert_eq!(local_norm_sq(&p, &identity, &y).unwrap(), y.norm_sq());
    }
}

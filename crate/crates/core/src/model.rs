//! Problem instances and feasible points.
//!
//! An instance is `min ⟨C, X⟩` over `X ⪰ 0` with `⟨A_j, X⟩ = b_j`, together
//! with a strictly feasible `X₀` and radii `0 < r ≤ R` such that the ball of
//! radius `r` around `X₀` in the affine hull lies in the feasible set, which
//! in turn lies in the ball of radius `R`. Every feasible point is stored as
//! `X = X₀ + Σ x_i B_i` over an orthogonal basis `B_i` of `L = ker A`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::exact::{common_denominator, Rational};
use crate::linalg::{
    integerize, ldl_pd_check, nullspace_orthobasis, ConstraintMap, LinalgError, OrthoBasis, PdCheck, SymMatrix,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("matrix order must be at least 1")]
    EmptyProblem,
    #[error("{what} has order {found}, expected {expected}")]
    WrongOrder {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("b has {found} entries but there are {expected} constraints")]
    WrongRhsLength { expected: usize, found: usize },
    #[error("A is not surjective: {0}")]
    DependentConstraints(LinalgError),
    #[error("<A{j},X0> != b{j}: <A{j},X0> = {lhs}, b{j} = {rhs}")]
    InfeasibleStart { j: usize, lhs: Rational, rhs: Rational },
    #[error("X0 not positive definite: LDL pivot {index} = {pivot}")]
    StartNotInterior { index: usize, pivot: Rational },
    #[error("radii must satisfy 0 < r <= R (r = {r}, R = {big_r})")]
    BadRadii { r: Rational, big_r: Rational },
    #[error("epsilon must be positive (got {0})")]
    BadEpsilon(Rational),
    #[error("coordinate vector has {found} entries, expected {expected}")]
    WrongDimension { expected: usize, found: usize },
    #[error("matrix is not of the form X0 + (element of ker A): residual at constraint {j}")]
    NotInAffineSpace { j: usize },
}

/// Raw, unvalidated instance data.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpData {
    pub n: usize,
    pub c: SymMatrix,
    pub a: Vec<SymMatrix>,
    pub b: Vec<Rational>,
    pub x0: SymMatrix,
    pub r: Rational,
    pub big_r: Rational,
    pub epsilon: Rational,
}

/// A validated instance. Every input assumption that can be checked exactly
/// is checked at construction.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    data: SdpData,
    constraints: ConstraintMap,
    basis: OrthoBasis,
}

impl SdpProblem {
    pub fn new(data: SdpData) -> Result<Self, ModelError> {
        let n = data.n;
        if n == 0 {
            return Err(ModelError::EmptyProblem);
        }
        let order = |what: &str, m: &SymMatrix| {
            if m.n() != n {
                Err(ModelError::WrongOrder {
                    what: what.to_string(),
                    expected: n,
                    found: m.n(),
                })
            } else {
                Ok(())
            }
        };
        order("C", &data.c)?;
        order("X0", &data.x0)?;
        for (j, aj) in data.a.iter().enumerate() {
            order(&format!("A{}", j + 1), aj)?;
        }
        if data.b.len() != data.a.len() {
            return Err(ModelError::WrongRhsLength {
                expected: data.a.len(),
                found: data.b.len(),
            });
        }
        if !data.r.is_positive() || data.r > data.big_r {
            return Err(ModelError::BadRadii {
                r: data.r.clone(),
                big_r: data.big_r.clone(),
            });
        }
        if !data.epsilon.is_positive() {
            return Err(ModelError::BadEpsilon(data.epsilon.clone()));
        }
        let constraints = ConstraintMap::new(n, data.a.clone()).map_err(ModelError::DependentConstraints)?;
        let basis = nullspace_orthobasis(&data.a, n).map_err(ModelError::DependentConstraints)?;
        for (j, (lhs, rhs)) in constraints.apply(&data.x0).into_iter().zip(&data.b).enumerate() {
            if lhs != *rhs {
                return Err(ModelError::InfeasibleStart {
                    j: j + 1,
                    lhs,
                    rhs: rhs.clone(),
                });
            }
        }
        if let PdCheck::NotPositiveDefinite { pivot_index, pivot } = ldl_pd_check(&data.x0) {
            return Err(ModelError::StartNotInterior {
                index: pivot_index,
                pivot,
            });
        }
        Ok(SdpProblem {
            data,
            constraints,
            basis,
        })
    }

    pub fn data(&self) -> &SdpData {
        &self.data
    }

    pub fn n(&self) -> usize {
        self.data.n
    }

    pub fn m(&self) -> usize {
        self.data.a.len()
    }

    /// Dimension `d` of `L = ker A`.
    pub fn d(&self) -> usize {
        self.basis.dim()
    }

    pub fn c(&self) -> &SymMatrix {
        &self.data.c
    }

    pub fn b(&self) -> &[Rational] {
        &self.data.b
    }

    pub fn x0(&self) -> &SymMatrix {
        &self.data.x0
    }

    pub fn r(&self) -> &Rational {
        &self.data.r
    }

    pub fn big_r(&self) -> &Rational {
        &self.data.big_r
    }

    pub fn epsilon(&self) -> &Rational {
        &self.data.epsilon
    }

    pub fn constraints(&self) -> &ConstraintMap {
        &self.constraints
    }

    pub fn basis(&self) -> &OrthoBasis {
        &self.basis
    }

    /// `(A X)_j = ⟨A_j, X⟩`.
    pub fn apply_a(&self, x: &SymMatrix) -> Vec<Rational> {
        self.constraints.apply(x)
    }

    /// `A* y = Σ y_j A_j`.
    pub fn apply_a_star(&self, y: &[Rational]) -> SymMatrix {
        self.constraints.adjoint(y)
    }

    pub fn project(&self, y: &SymMatrix) -> SymMatrix {
        self.constraints.project(y)
    }

    /// Replaces `C` by `π_L(C)`. The returned offset `⟨C − π_L(C), X₀⟩` must
    /// be added to objective values computed with the new `C`.
    pub fn normalize_objective(&self) -> (SdpProblem, Rational) {
        let projected = self.project(&self.data.c);
        let offset = self.data.c.sub(&projected).inner(&self.data.x0);
        let mut normalized = self.clone();
        normalized.data.c = projected;
        (normalized, offset)
    }

    /// `X₀ + Σ x_i B_i`.
    pub fn coords_to_matrix(&self, coords: &[Rational]) -> Result<SymMatrix, ModelError> {
        if coords.len() != self.d() {
            return Err(ModelError::WrongDimension {
                expected: self.d(),
                found: coords.len(),
            });
        }
        Ok(self
            .basis
            .elements()
            .iter()
            .zip(coords)
            .fold(self.data.x0.clone(), |acc, (bi, xi)| acc.add_scaled(xi, bi)))
    }

    /// Coordinates of a direction `Y ∈ L`: `y_i = ⟨Y, B_i⟩ / ⟨B_i, B_i⟩`.
    pub fn direction_coords(&self, y: &SymMatrix) -> Result<Vec<Rational>, ModelError> {
        // integerize y once; its entries can be much longer than those of A_j, B_i
        let (ys, dy) = integerize(y.entries());
        let dot = |m: &SymMatrix| -> BigInt {
            let (ms, _) = integerize(m.entries());
            ys.iter()
                .zip(&ms)
                .filter(|(_, b)| !b.is_zero())
                .map(|(a, b)| a * b)
                .sum()
        };
        if let Some(j) = self.constraints.matrices().iter().position(|a| !dot(a).is_zero()) {
            return Err(ModelError::NotInAffineSpace { j: j + 1 });
        }
        Ok(self
            .basis
            .elements()
            .iter()
            .zip(self.basis.normsq())
            .map(|(bi, nn)| {
                let db = common_denominator(bi.entries());
                Rational::new(dot(bi), &dy * db) / nn
            })
            .collect())
    }

    /// Inverse of [`coords_to_matrix`](Self::coords_to_matrix).
    pub fn matrix_to_coords(&self, x: &SymMatrix) -> Result<Vec<Rational>, ModelError> {
        self.direction_coords(&x.sub(&self.data.x0))
    }

    pub fn initial_point(&self) -> FeasiblePoint {
        FeasiblePoint {
            coords: vec![Rational::zero(); self.d()],
            matrix: self.data.x0.clone(),
        }
    }

    pub fn point_from_coords(&self, coords: Vec<Rational>) -> Result<FeasiblePoint, ModelError> {
        let matrix = self.coords_to_matrix(&coords)?;
        Ok(FeasiblePoint { coords, matrix })
    }

    pub fn point_from_matrix(&self, matrix: SymMatrix) -> Result<FeasiblePoint, ModelError> {
        let coords = self.matrix_to_coords(&matrix)?;
        Ok(FeasiblePoint { coords, matrix })
    }

    /// `2R`-cap check `|x_i| ≤ 2R` on coordinates, via squares.
    pub fn coords_within_cap(&self, coords: &[Rational]) -> bool {
        let cap = &self.data.big_r * Rational::from_integer(BigInt::from(2));
        let cap_sq = &cap * &cap;
        coords.iter().all(|x| x * x <= cap_sq)
    }
}

/// A point of the affine space `X₀ + L`, held both as coordinates and as
/// the assembled matrix. Coordinates are authoritative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasiblePoint {
    coords: Vec<Rational>,
    matrix: SymMatrix,
}

impl FeasiblePoint {
    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    /// `X + Y` for a direction `Y ∈ L`.
    pub fn step(&self, problem: &SdpProblem, direction: &SymMatrix) -> Result<FeasiblePoint, ModelError> {
        let delta = problem.direction_coords(direction)?;
        let coords = self.coords.iter().zip(&delta).map(|(x, d)| x + d).collect();
        Ok(FeasiblePoint {
            coords,
            matrix: self.matrix.add(direction),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    pub(crate) fn trace_constrained(n: usize, c: SymMatrix) -> SdpData {
        SdpData {
            n,
            c,
            a: vec![SymMatrix::identity(n)],
            b: vec![int(1)],
            x0: SymMatrix::identity(n).scale(&rat(1, n as i64)),
            r: rat(1, 2 * n as i64),
            big_r: int(1),
            epsilon: rat(1, 100),
        }
    }

    #[test]
    fn validation_accepts_and_rejects() {
        let ok = SdpData {
            n: 1,
            c: SymMatrix::identity(1),
            a: vec![SymMatrix::identity(1)],
            b: vec![int(1)],
            x0: SymMatrix::identity(1),
            r: rat(1, 2),
            big_r: int(1),
            epsilon: rat(1, 10),
        };
        let p = SdpProblem::new(ok.clone()).unwrap();
        assert_eq!(p.d(), 0);

        let mut bad = ok.clone();
        bad.b = vec![int(2)];
        let err = SdpProblem::new(bad).unwrap_err();
        assert!(matches!(err, ModelError::InfeasibleStart { j: 1, .. }));
        assert!(err.to_string().starts_with("<A1,X0> != b1"));

        let mut bad = trace_constrained(2, SymMatrix::identity(2));
        bad.x0 = SymMatrix::diag(&[rat(4, 3), rat(-1, 3)]);
        assert_eq!(
            SdpProblem::new(bad).unwrap_err().to_string(),
            "X0 not positive definite: LDL pivot 2 = -1/3"
        );

        let mut bad = ok.clone();
        bad.r = int(2);
        assert!(matches!(SdpProblem::new(bad), Err(ModelError::BadRadii { .. })));

        let mut bad = trace_constrained(2, SymMatrix::identity(2));
        bad.a.push(SymMatrix::identity(2).scale(&int(3)));
        bad.b.push(int(3));
        assert!(matches!(SdpProblem::new(bad), Err(ModelError::DependentConstraints(_))));
    }

    #[test]
    fn operator_examples() {
        let p = SdpProblem::new(trace_constrained(2, SymMatrix::identity(2))).unwrap();
        assert_eq!(p.apply_a(p.x0()), p.b());
        assert_eq!(p.apply_a(&SymMatrix::diag(&[rat(1, 3), rat(2, 3)])), vec![int(1)]);
        for bi in p.basis().elements() {
            assert_eq!(p.apply_a(bi), vec![int(0)]);
        }
        assert!(p.apply_a_star(&[int(0)]).is_zero());
        assert_eq!(p.apply_a_star(&[int(2)]), SymMatrix::identity(2).scale(&int(2)));
    }

    #[test]
    fn normalization_examples() {
        let p = SdpProblem::new(trace_constrained(2, SymMatrix::identity(2))).unwrap();
        let (q, offset) = p.normalize_objective();
        assert!(q.c().is_zero());
        assert_eq!(offset, p.x0().trace());

        let in_l = SymMatrix::diag(&[int(1), int(-1)]);
        let p = SdpProblem::new(trace_constrained(2, in_l.clone())).unwrap();
        let (q, offset) = p.normalize_objective();
        assert_eq!(q.c(), &in_l);
        assert_eq!(offset, int(0));

        let mut free = trace_constrained(2, SymMatrix::diag(&[int(1), int(2)]));
        free.a.clear();
        free.b.clear();
        let p = SdpProblem::new(free).unwrap();
        let (q, offset) = p.normalize_objective();
        assert_eq!(q.c(), p.c());
        assert_eq!(offset, int(0));
    }

    #[test]
    fn coordinate_examples() {
        let p = SdpProblem::new(trace_constrained(3, SymMatrix::identity(3))).unwrap();
        assert_eq!(p.matrix_to_coords(p.x0()).unwrap(), vec![int(0); p.d()]);
        let b1 = &p.basis().elements()[0];
        let mut expected = vec![int(0); p.d()];
        expected[0] = int(1);
        assert_eq!(p.matrix_to_coords(&p.x0().add(b1)).unwrap(), expected);
        assert!(matches!(
            p.matrix_to_coords(&SymMatrix::identity(3)),
            Err(ModelError::NotInAffineSpace { j: 1 })
        ));
        assert!(matches!(
            p.coords_to_matrix(&[int(1)]),
            Err(ModelError::WrongDimension { .. })
        ));
    }
}

use super::matrix::IntMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Smith decomposition `U * A * V = S` with `U`, `V` unimodular and `S`
/// diagonal, nonnegative, with each diagonal entry dividing the next.
///
/// The inverses of the transforms are tracked during elimination; several
/// lattice routines need them and recomputing inverses exactly would cost
/// another elimination.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        let n = self.s.rows().min(self.s.cols());
        (0..n).take_while(|&i| !self.s.get(i, i).is_zero()).count()
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.s.rows().min(self.s.cols());
        (0..n).map(|i| self.s.get(i, i).clone()).collect()
    }

    /// Nonzero diagonal entries, i.e. the invariant factors including ones.
    pub fn nonzero_diagonal(&self) -> Vec<BigInt> {
        self.diagonal().into_iter().filter(|d| !d.is_zero()).collect()
    }
}

fn egcd(x: &BigInt, y: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = x.extended_gcd(y);
    let (mut g, mut a, mut b) = (e.gcd, e.x, e.y);
    if g.is_negative() {
        g = -g;
        a = -a;
        b = -b;
    }
    debug_assert_eq!(&a * x + &b * y, g);
    (g, a, b)
}

struct Elim {
    s: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl Elim {
    // Pivot with minimal absolute value in the trailing submatrix, ties
    // broken in row-major order. Deterministic by construction.
    fn select_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(BigInt, usize, usize)> = None;
        for i in t..self.s.rows() {
            for j in t..self.s.cols() {
                let e = self.s.get(i, j);
                if e.is_zero() {
                    continue;
                }
                let a = e.abs();
                match &best {
                    Some((cur, _, _)) if *cur <= a => {}
                    _ => best = Some((a, i, j)),
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        self.s.swap_rows(r1, r2);
        self.u.swap_rows(r1, r2);
        self.u_inv.swap_cols(r1, r2);
    }

    fn swap_cols(&mut self, c1: usize, c2: usize) {
        self.s.swap_cols(c1, c2);
        self.v.swap_cols(c1, c2);
        self.v_inv.swap_rows(c1, c2);
    }

    // Left-multiplies rows (r1, r2) by [[a, b], [c, d]] with det 1.
    fn row_op(&mut self, r1: usize, r2: usize, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) {
        debug_assert!((a * d - b * c).is_one());
        self.s.two_row_transform(r1, r2, a, b, c, d);
        self.u.two_row_transform(r1, r2, a, b, c, d);
        // (u_inv) <- (u_inv) * [[d, -b], [-c, a]] acting on columns r1, r2
        self.u_inv
            .two_col_transform(r1, r2, d, &-c.clone(), &-b.clone(), a);
    }

    fn col_op(&mut self, c1: usize, c2: usize, a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) {
        debug_assert!((a * d - b * c).is_one());
        self.s.two_col_transform(c1, c2, a, b, c, d);
        self.v.two_col_transform(c1, c2, a, b, c, d);
        self.v_inv
            .two_row_transform(c1, c2, d, &-c.clone(), &-b.clone(), a);
    }

    // Clears column t below and above the pivot using gcd row operations.
    fn clear_col(&mut self, t: usize) -> bool {
        let mut changed = false;
        for i in 0..self.s.rows() {
            if i == t || self.s.get(i, t).is_zero() {
                continue;
            }
            let x = self.s.get(t, t).clone();
            let y = self.s.get(i, t).clone();
            if (&y % &x).is_zero() {
                let q = &y / &x;
                self.row_op(t, i, &BigInt::one(), &BigInt::zero(), &-q, &BigInt::one());
            } else {
                let (g, a, b) = egcd(&x, &y);
                let xa = &x / &g;
                let yb = &y / &g;
                self.row_op(t, i, &a, &b, &-yb, &xa);
            }
            changed = true;
        }
        changed
    }

    fn clear_row(&mut self, t: usize) -> bool {
        let mut changed = false;
        for j in 0..self.s.cols() {
            if j == t || self.s.get(t, j).is_zero() {
                continue;
            }
            let x = self.s.get(t, t).clone();
            let y = self.s.get(t, j).clone();
            if (&y % &x).is_zero() {
                let q = &y / &x;
                self.col_op(t, j, &BigInt::one(), &BigInt::zero(), &-q, &BigInt::one());
            } else {
                let (g, a, b) = egcd(&x, &y);
                let xa = &x / &g;
                let yb = &y / &g;
                self.col_op(t, j, &a, &b, &-yb, &xa);
            }
            changed = true;
        }
        changed
    }

    fn diagonalize(&mut self) {
        let rmax = self.s.rows().min(self.s.cols());
        for t in 0..rmax {
            let Some((pi, pj)) = self.select_pivot(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let a = self.clear_col(t);
                let b = self.clear_row(t);
                if !a && !b {
                    break;
                }
            }
        }
    }

    // Enforces d_i | d_{i+1} along the diagonal, then makes entries
    // nonnegative.
    fn normalize_diagonal(&mut self) {
        let r = (0..self.s.rows().min(self.s.cols()))
            .take_while(|&i| !self.s.get(i, i).is_zero())
            .count();
        if r > 1 {
            loop {
                let mut done = true;
                for i in 0..r - 1 {
                    let x = self.s.get(i, i).clone();
                    let y = self.s.get(i + 1, i + 1).clone();
                    if (&y % &x).is_zero() {
                        continue;
                    }
                    done = false;
                    let (g, p, q) = egcd(&x, &y);
                    let a = &x / &g;
                    let b = &y / &g;
                    let tb = &q * &b;
                    let sa = &p * &a;
                    // [[1, 1], [-tb, sa]] * diag(x, y) * [[p, -b], [q, a]]
                    //   = diag(g, x*y/g)
                    self.row_op(i, i + 1, &BigInt::one(), &BigInt::one(), &-tb, &sa);
                    self.col_op(i, i + 1, &p, &q, &-b.clone(), &a);
                }
                if done {
                    break;
                }
            }
        }
        for i in 0..self.s.rows().min(self.s.cols()) {
            if self.s.get(i, i).is_negative() {
                self.s.negate_row(i);
                self.u.negate_row(i);
                self.u_inv.negate_col(i);
            }
        }
    }
}

/// Smith normal form of an integer matrix; total on all inputs.
pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let mut elim = Elim {
        s: a.clone(),
        u: IntMatrix::identity(a.rows()),
        u_inv: IntMatrix::identity(a.rows()),
        v: IntMatrix::identity(a.cols()),
        v_inv: IntMatrix::identity(a.cols()),
    };
    elim.diagonalize();
    elim.normalize_diagonal();
    debug_assert!(elim.s.is_diagonal());
    SmithForm {
        u: elim.u,
        s: elim.s,
        v: elim.v,
        u_inv: elim.u_inv,
        v_inv: elim.v_inv,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(a: &IntMatrix) -> SmithForm {
        let f = smith_normal_form(a);
        assert_eq!(f.u.mul(a).mul(&f.v), f.s, "U*A*V = S");
        assert!(f.u.mul(&f.u_inv).is_identity());
        assert!(f.v.mul(&f.v_inv).is_identity());
        assert!(f.s.is_diagonal());
        let d = f.diagonal();
        for i in 0..d.len() {
            assert!(!d[i].is_negative());
            if i + 1 < d.len() && !d[i].is_zero() && !d[i + 1].is_zero() {
                assert!((&d[i + 1] % &d[i]).is_zero(), "divisibility chain");
            }
            if d[i].is_zero() && i + 1 < d.len() {
                assert!(d[i + 1].is_zero(), "zeros trail the diagonal");
            }
        }
        if a.rows() == a.cols() {
            assert_eq!(f.u.determinant().abs(), BigInt::one());
            assert_eq!(f.v.determinant().abs(), BigInt::one());
        }
        f
    }

    #[test]
    fn identity_is_fixed() {
        let f = check(&IntMatrix::identity(2));
        assert_eq!(f.s, IntMatrix::identity(2));
    }

    #[test]
    fn zero_matrix() {
        let f = check(&IntMatrix::zeros(3, 2));
        assert!(f.s.is_zero());
        assert_eq!(f.rank(), 0);
    }

    #[test]
    fn diag_4_6_normalizes_to_2_12() {
        // invariant factors: gcd(4,6) = 2 and 4*6/2 = 12
        let a = IntMatrix::from_rows(&[vec![4, 0], vec![0, 6]]);
        let f = check(&a);
        assert_eq!(f.diagonal(), vec![BigInt::from(2), BigInt::from(12)]);
    }

    #[test]
    fn rectangular_example() {
        // gcd of entries 2, gcd of 2x2 minors 4, |det| = 624
        let a = IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, 4, 16]]);
        let f = check(&a);
        assert_eq!(
            f.diagonal(),
            vec![BigInt::from(2), BigInt::from(2), BigInt::from(156)]
        );
    }

    #[test]
    fn negative_entries() {
        let a = IntMatrix::from_rows(&[vec![-2, 0], vec![0, -3]]);
        let f = check(&a);
        assert_eq!(f.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
    }
}

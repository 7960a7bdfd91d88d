use super::matrix::{AbGroupStructure, IntMatrix};
use super::smith::{smith_normal_form, SmithForm};
use super::LinalgError;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// Structure of `Z^rows / column-span(A)` read off the Smith form.
pub fn cokernel(a: &IntMatrix) -> AbGroupStructure {
    let f = smith_normal_form(a);
    let diag = f.diagonal();
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    let torsion: Vec<BigInt> = diag.into_iter().filter(|d| *d > BigInt::one()).collect();
    AbGroupStructure::new(a.rows() - rank, torsion)
}

/// Basis of the integer solutions of `A x = 0`, as matrix columns.
pub fn nullspace(a: &IntMatrix) -> IntMatrix {
    let f = smith_normal_form(a);
    let r = f.rank();
    let n = a.cols();
    let idx: Vec<usize> = (r..n).collect();
    let all_rows: Vec<usize> = (0..n).collect();
    f.v.submatrix(&all_rows, &idx)
}

/// One integer solution of `A x = b`, if any.
pub fn solve(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows(), b.len(), "solve shape");
    let f = smith_normal_form(a);
    solve_with_form(&f, a.cols(), b)
}

fn solve_with_form(f: &SmithForm, ncols: usize, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let z = f.u.mul_vec(b);
    let r = f.rank();
    let mut y = vec![BigInt::zero(); ncols];
    for (i, zi) in z.iter().enumerate() {
        if i < r {
            let d = f.s.get(i, i);
            if !(zi % d).is_zero() {
                return None;
            }
            y[i] = zi / d;
        } else if !zi.is_zero() {
            return None;
        }
    }
    Some(f.v.mul_vec(&y))
}

/// Solves `A x = b (mod m)`; `m = 0` means solve over the integers.
/// The returned solution is reduced into `[0, m)` when `m > 0`.
pub fn solve_mod(
    a: &IntMatrix,
    b: &[BigInt],
    m: &BigInt,
) -> Result<Option<Vec<BigInt>>, LinalgError> {
    if a.rows() != b.len() {
        return Err(LinalgError::DimensionMismatch(format!(
            "matrix has {} rows but right-hand side has {} entries",
            a.rows(),
            b.len()
        )));
    }
    if m.is_zero() {
        return Ok(solve(a, b));
    }
    let scaled = IntMatrix::identity(a.rows()).scale(m);
    let aug = a.hstack(&scaled);
    Ok(solve(&aug, b).map(|x| {
        x.into_iter()
            .take(a.cols())
            .map(|e| e.mod_floor(m))
            .collect()
    }))
}

/// Basis (full column rank) of the lattice spanned by the columns of `g`.
pub fn lattice_basis(g: &IntMatrix) -> IntMatrix {
    let f = smith_normal_form(g);
    let r = f.rank();
    IntMatrix::from_fn(g.rows(), r, |i, j| f.u_inv.get(i, j) * f.s.get(j, j))
}

pub fn in_lattice(g: &IntMatrix, x: &[BigInt]) -> bool {
    solve(g, x).is_some()
}

/// Generators of `{x : f(x) in column-span(target)}`.
pub fn preimage_lattice(f: &IntMatrix, target: &IntMatrix) -> IntMatrix {
    assert_eq!(f.rows(), target.rows(), "preimage shape");
    let ns = nullspace(&f.hstack(target));
    let rows: Vec<usize> = (0..f.cols()).collect();
    let cols: Vec<usize> = (0..ns.cols()).collect();
    ns.submatrix(&rows, &cols)
}

/// Generators of the intersection of two column-span lattices.
pub fn lattice_intersection(g1: &IntMatrix, g2: &IntMatrix) -> IntMatrix {
    assert_eq!(g1.rows(), g2.rows(), "intersection shape");
    let ns = nullspace(&g1.hstack(&g2.scale(&BigInt::from(-1))));
    let rows: Vec<usize> = (0..g1.cols()).collect();
    let cols: Vec<usize> = (0..ns.cols()).collect();
    let coeffs = ns.submatrix(&rows, &cols);
    g1.mul(&coeffs)
}

/// Quotient of two nested sublattices of `Z^n`, with a canonical coordinate
/// map on it.
///
/// Given generators `num` and `den` with `span(den) <= span(num)`, this
/// computes the abelian group `span(num)/span(den)` together with explicit
/// generator representatives and a projection taking any element of
/// `span(num)` to canonical residue coordinates. Coordinates are listed in
/// Smith order: torsion generators first (ascending invariant factor), then
/// free generators.
#[derive(Clone, Debug)]
pub struct LatticeQuotient {
    ambient_dim: usize,
    basis: IntMatrix,
    basis_form: SmithForm,
    u_y: IntMatrix,
    diag: Vec<BigInt>,
    kept: Vec<usize>,
    structure: AbGroupStructure,
    reps: Vec<Vec<BigInt>>,
}

impl LatticeQuotient {
    pub fn new(num: &IntMatrix, den: &IntMatrix) -> Result<Self, LinalgError> {
        assert_eq!(num.rows(), den.rows(), "quotient shape");
        let ambient_dim = num.rows();
        let basis = lattice_basis(num);
        let basis_form = smith_normal_form(&basis);
        let r = basis.cols();

        // express the denominator generators in the numerator basis
        let mut y_cols: Vec<Vec<BigInt>> = Vec::with_capacity(den.cols());
        for j in 0..den.cols() {
            let col = den.col(j);
            match solve_with_form(&basis_form, r, &col) {
                Some(y) => y_cols.push(y),
                None => return Err(LinalgError::NotASublattice),
            }
        }
        let y = IntMatrix::from_cols(r, &y_cols);
        let fy = smith_normal_form(&y);
        let mut diag = vec![BigInt::zero(); r];
        for (i, d) in fy.diagonal().into_iter().enumerate() {
            diag[i] = d;
        }

        let gen_ambient = basis.mul(&fy.u_inv);
        let mut kept = Vec::new();
        let mut torsion = Vec::new();
        let mut free_rank = 0usize;
        for (i, d) in diag.iter().enumerate() {
            if d.is_one() {
                continue;
            }
            kept.push(i);
            if d.is_zero() {
                free_rank += 1;
            } else {
                torsion.push(d.clone());
            }
        }
        let reps: Vec<Vec<BigInt>> = kept.iter().map(|&i| gen_ambient.col(i)).collect();
        let structure = AbGroupStructure::new(free_rank, torsion);
        Ok(LatticeQuotient {
            ambient_dim,
            basis,
            basis_form,
            u_y: fy.u,
            diag,
            kept,
            structure,
            reps,
        })
    }

    pub fn structure(&self) -> &AbGroupStructure {
        &self.structure
    }

    /// Representatives (in ambient coordinates) of the canonical generators,
    /// in the same order as `project` coordinates.
    pub fn reps(&self) -> &[Vec<BigInt>] {
        &self.reps
    }

    /// Invariant factor of each kept generator; 0 marks a free generator.
    pub fn invariants(&self) -> Vec<BigInt> {
        self.kept.iter().map(|&i| self.diag[i].clone()).collect()
    }

    pub fn coords_len(&self) -> usize {
        self.kept.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Canonical residue coordinates of the class of `x`.
    ///
    /// Fails with `NotInSpan` when `x` is not in the numerator lattice; that
    /// always indicates a caller bug, not bad user input.
    pub fn project(&self, x: &[BigInt]) -> Result<Vec<BigInt>, LinalgError> {
        assert_eq!(x.len(), self.ambient_dim, "project shape");
        let y = solve_with_form(&self.basis_form, self.basis.cols(), x)
            .ok_or(LinalgError::NotInSpan)?;
        let z = self.u_y.mul_vec(&y);
        Ok(self
            .kept
            .iter()
            .map(|&i| {
                if self.diag[i].is_zero() {
                    z[i].clone()
                } else {
                    z[i].mod_floor(&self.diag[i])
                }
            })
            .collect())
    }

    pub fn is_zero_class(&self, x: &[BigInt]) -> Result<bool, LinalgError> {
        Ok(self.project(x)?.iter().all(|c| c.is_zero()))
    }

    /// Element of the numerator lattice with the given canonical coordinates.
    pub fn element_from_coords(&self, coords: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(coords.len(), self.kept.len(), "coordinate count");
        let mut x = vec![BigInt::zero(); self.ambient_dim];
        for (c, rep) in coords.iter().zip(self.reps.iter()) {
            for (xi, ri) in x.iter_mut().zip(rep.iter()) {
                *xi += c * ri;
            }
        }
        x
    }
}

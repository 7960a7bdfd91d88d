//! Small dense linear algebra over the prime field F_p, used for divisor
//! spaces and section-class bookkeeping where p is a small prime.

/// Row-major matrix over F_p with entries reduced into `[0, p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpMat {
    pub p: u64,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(a % p != 0, "inverse of zero mod {p}");
    pow_mod(a % p, p - 2, p)
}

impl FpMat {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        FpMat {
            p,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn from_fn(p: u64, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> u64) -> Self {
        let mut m = FpMat::zeros(p, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.entries[i * self.cols + j] = v % self.p;
    }

    /// Row echelon reduction; returns (reduced matrix, pivot columns).
    fn rref(&self) -> (FpMat, Vec<usize>) {
        let mut m = self.clone();
        let p = m.p;
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..m.cols {
            if r >= m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            for j in 0..m.cols {
                let (a, b) = (m.get(r, j), m.get(pr, j));
                m.set(r, j, b);
                m.set(pr, j, a);
            }
            let inv = inv_mod(m.get(r, c), p);
            for j in 0..m.cols {
                let v = m.get(r, j) * inv % p;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c) == 0 {
                    continue;
                }
                let f = m.get(i, c);
                for j in 0..m.cols {
                    let v = (m.get(i, j) + (p - f) * m.get(r, j)) % p;
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right nullspace, one `Vec` per basis vector.
    pub fn nullspace(&self) -> Vec<Vec<u64>> {
        let (m, pivots) = self.rref();
        let p = self.p;
        let mut basis = Vec::new();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = vec![0u64; self.cols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                let coeff = m.get(r, free);
                if coeff != 0 {
                    v[pc] = (p - coeff) % p;
                }
            }
            basis.push(v);
        }
        basis
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_nullspace_mod_3() {
        let m = FpMat::from_fn(3, 2, 3, |i, j| [[1, 2, 0], [0, 1, 0]][i][j]);
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns, vec![vec![0, 0, 1]]);
        // (1,2,0) and (2,1,0) coincide mod 3 up to the scalar 2
        let s = FpMat::from_fn(3, 2, 3, |i, j| [[1, 2, 0], [2, 1, 0]][i][j]);
        assert_eq!(s.rank(), 1);
    }

    #[test]
    fn singular_mod_2() {
        let m = FpMat::from_fn(2, 2, 2, |i, j| [[1, 1], [1, 1]][i][j]);
        assert_eq!(m.rank(), 1);
        assert_eq!(m.nullspace(), vec![vec![1, 1]]);
    }

    #[test]
    fn inverse_mod_5() {
        for a in 1..5 {
            assert_eq!(a * inv_mod(a, 5) % 5, 1);
        }
    }
}

//! Inhomogeneous bar-resolution oracle.
//!
//! Cochains in degree n are tables G^n -> M stored as stacked coordinate
//! blocks, one block per tuple of group elements. The oracle reduces the
//! module mod p^3 first, then computes kernels and images of the bar
//! differentials with the same lattice machinery as the production engine.
//! It is deliberately independent of the periodic resolution: no Norm or
//! sigma-minus-one shortcut appears here.

use super::{CohomError, GModule};
use crate::linalg::{preimage_lattice, IntMatrix, LatticeQuotient};
use num_bigint::BigInt;
use num_traits::Zero;

const TABLE_GUARD: usize = 1 << 20;

fn block_diag(copies: usize, m: &IntMatrix) -> IntMatrix {
    IntMatrix::from_fn(copies * m.rows(), copies * m.cols(), |i, j| {
        let (bi, ri) = (i / m.rows(), i % m.rows());
        let (bj, cj) = (j / m.cols(), j % m.cols());
        if bi == bj {
            m.get(ri, cj).clone()
        } else {
            BigInt::zero()
        }
    })
}

fn sigma_powers(m: &GModule) -> Vec<IntMatrix> {
    let p = m.p as usize;
    let mut out = Vec::with_capacity(p);
    out.push(IntMatrix::identity(m.ncoords));
    for k in 1..p {
        out.push(m.sigma.mul(&out[k - 1]));
    }
    out
}

// adds `sign * block` into the (row_block, col_block) position of `target`
fn add_block(target: &mut IntMatrix, n: usize, row_block: usize, col_block: usize, block: &IntMatrix, sign: i64) {
    let s = BigInt::from(sign);
    for i in 0..n {
        for j in 0..n {
            let v = block.get(i, j);
            if v.is_zero() {
                continue;
            }
            let cur = target.get(row_block * n + i, col_block * n + j) + v * &s;
            target.set(row_block * n + i, col_block * n + j, cur);
        }
    }
}

fn d0_matrix(m: &GModule) -> IntMatrix {
    let p = m.p as usize;
    let n = m.ncoords;
    let powers = sigma_powers(m);
    let id = IntMatrix::identity(n);
    let mut out = IntMatrix::zeros(p * n, n);
    for k in 0..p {
        add_block(&mut out, n, k, 0, &powers[k], 1);
        add_block(&mut out, n, k, 0, &id, -1);
    }
    out
}

fn d1_matrix(m: &GModule) -> IntMatrix {
    let p = m.p as usize;
    let n = m.ncoords;
    let powers = sigma_powers(m);
    let id = IntMatrix::identity(n);
    let mut out = IntMatrix::zeros(p * p * n, p * n);
    for a in 0..p {
        for b in 0..p {
            let row = a * p + b;
            // (d f)(a, b) = sigma^a f(b) - f(a+b) + f(a)
            add_block(&mut out, n, row, b, &powers[a], 1);
            add_block(&mut out, n, row, (a + b) % p, &id, -1);
            add_block(&mut out, n, row, a, &id, 1);
        }
    }
    out
}

fn d2_matrix(m: &GModule) -> IntMatrix {
    let p = m.p as usize;
    let n = m.ncoords;
    let powers = sigma_powers(m);
    let id = IntMatrix::identity(n);
    let mut out = IntMatrix::zeros(p * p * p * n, p * p * n);
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                let row = (a * p + b) * p + c;
                // (d F)(a,b,c) = sigma^a F(b,c) - F(a+b,c) + F(a,b+c) - F(a,b)
                add_block(&mut out, n, row, b * p + c, &powers[a], 1);
                add_block(&mut out, n, row, ((a + b) % p) * p + c, &id, -1);
                add_block(&mut out, n, row, a * p + (b + c) % p, &id, 1);
                add_block(&mut out, n, row, a * p + b, &id, -1);
            }
        }
    }
    out
}

/// Cohomology computed from the bar complex of the mod-p^3 reduction.
#[derive(Clone, Debug)]
pub struct BarCohomology {
    pub degree: u8,
    /// the finite module the oracle actually ran on
    pub module: GModule,
    quot: LatticeQuotient,
}

impl BarCohomology {
    pub fn structure(&self) -> &crate::linalg::AbGroupStructure {
        self.quot.structure()
    }

    /// Class coordinates of a cocycle table (length p^degree * ncoords).
    pub fn project_table(&self, table: &[BigInt]) -> Result<Vec<BigInt>, CohomError> {
        Ok(self.quot.project(table)?)
    }

    pub fn is_zero_table(&self, table: &[BigInt]) -> Result<bool, CohomError> {
        Ok(self.project_table(table)?.iter().all(|c| c.is_zero()))
    }
}

fn reduced(m: &GModule) -> GModule {
    let q = (m.p * m.p * m.p) as i64;
    m.reduce(q)
}

/// H^1 from the bar complex; the module is reduced mod p^3 first.
pub fn bar_h1(m: &GModule) -> Result<BarCohomology, CohomError> {
    let p = m.p as usize;
    let table = p * p * m.ncoords;
    if table > TABLE_GUARD {
        return Err(CohomError::ModuleTooLarge(table));
    }
    let module = reduced(m);
    let n = module.ncoords;
    let rel_c2 = block_diag(p * p, &module.relations);
    let num = preimage_lattice(&d1_matrix(&module), &rel_c2);
    let rel_c1 = block_diag(p, &module.relations);
    let den = d0_matrix(&module).hstack(&rel_c1);
    let quot = LatticeQuotient::new(&num, &den)?;
    debug_assert_eq!(num.rows(), p * n);
    Ok(BarCohomology {
        degree: 1,
        module,
        quot,
    })
}

/// H^2 from the bar complex; the module is reduced mod p^3 first.
pub fn bar_h2(m: &GModule) -> Result<BarCohomology, CohomError> {
    let p = m.p as usize;
    let table = p * p * p * m.ncoords;
    if table > TABLE_GUARD {
        return Err(CohomError::ModuleTooLarge(table));
    }
    let module = reduced(m);
    let rel_c3 = block_diag(p * p * p, &module.relations);
    let num = preimage_lattice(&d2_matrix(&module), &rel_c3);
    let rel_c2 = block_diag(p * p, &module.relations);
    let den = d1_matrix(&module).hstack(&rel_c2);
    let quot = LatticeQuotient::new(&num, &den)?;
    Ok(BarCohomology {
        degree: 2,
        module,
        quot,
    })
}

/// Inhomogeneous 1-cocycle table of a periodic degree-1 representative:
/// f(g^k) = (1 + sigma + ... + sigma^{k-1}) a.
pub fn one_cocycle_table(m: &GModule, a: &[BigInt]) -> Vec<BigInt> {
    let p = m.p as usize;
    let n = m.ncoords;
    let mut out = vec![BigInt::zero(); p * n];
    let mut acc = vec![BigInt::zero(); n];
    let mut power = a.to_vec();
    for k in 1..p {
        for (x, y) in acc.iter_mut().zip(power.iter()) {
            *x += y;
        }
        out[k * n..(k + 1) * n].clone_from_slice(&acc);
        power = m.sigma.mul_vec(&power);
    }
    out
}

/// Inhomogeneous 2-cocycle table of a periodic degree-2 representative: the
/// extension cocycle F(g^i, g^j) = b when i + j >= p, else 0.
pub fn two_cocycle_from_periodic(m: &GModule, b: &[BigInt]) -> Vec<BigInt> {
    let p = m.p as usize;
    let n = m.ncoords;
    let mut out = vec![BigInt::zero(); p * p * n];
    for i in 0..p {
        for j in 0..p {
            if i + j >= p {
                let block = i * p + j;
                out[block * n..(block + 1) * n].clone_from_slice(b);
            }
        }
    }
    out
}

/// Bar cup product of two 1-cocycle tables with respect to a pairing:
/// (u cup v)(g, h) = pairing(u(g), g * v(h)).
pub fn bar_cup_table(
    m: &GModule,
    u: &[BigInt],
    v: &[BigInt],
    target_dim: usize,
    pairing: &dyn Fn(&[BigInt], &[BigInt]) -> Vec<BigInt>,
) -> Vec<BigInt> {
    let p = m.p as usize;
    let n = m.ncoords;
    let powers = sigma_powers(m);
    let mut out = vec![BigInt::zero(); p * p * target_dim];
    for a in 0..p {
        let ua = &u[a * n..(a + 1) * n];
        for b in 0..p {
            let vb = powers[a].mul_vec(&v[b * n..(b + 1) * n]);
            let val = pairing(ua, &vb);
            let block = a * p + b;
            out[block * target_dim..(block + 1) * target_dim].clone_from_slice(&val);
        }
    }
    out
}

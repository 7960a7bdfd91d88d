//! Cohomology of G = Z/p with coefficients in finitely generated G-modules.
//!
//! The production engine uses the periodic resolution for cyclic groups:
//! H^1 = ker(Norm)/im(sigma - 1) and H^2 = ker(sigma - 1)/im(Norm), computed
//! integrally on a presentation of the module. A slow bar-resolution engine
//! (`bar`) recomputes the same groups from inhomogeneous cochain tables and
//! serves as the cross-validation oracle for both the groups and the cup
//! product.

mod bar;

pub use bar::{
    bar_cup_table, bar_h1, bar_h2, one_cocycle_table, two_cocycle_from_periodic, BarCohomology,
};

use crate::linalg::{in_lattice, preimage_lattice, IntMatrix, LatticeQuotient, LinalgError};
use crate::nilq::wedge_matrix;
use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CohomError {
    #[error("module action does not satisfy sigma^p = 1")]
    BadAction,
    #[error("module relations are not preserved by the action")]
    UnstableRelations,
    #[error("cocycle condition fails for a degree-{0} representative")]
    NotACocycle(u8),
    #[error("modules do not match")]
    ModuleMismatch,
    #[error("module too large for the bar oracle: {0} cochain table entries")]
    ModuleTooLarge(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Finitely generated abelian group `Z^n / relations` with an action of
/// Z/p given by the matrix of a chosen generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GModule {
    pub p: u64,
    pub ncoords: usize,
    /// columns generate the relation lattice; may have zero columns
    pub relations: IntMatrix,
    pub sigma: IntMatrix,
}

impl GModule {
    pub fn new(p: u64, sigma: IntMatrix, relations: IntMatrix) -> Result<Self, CohomError> {
        let n = sigma.rows();
        assert_eq!(sigma.cols(), n, "square action matrix");
        assert_eq!(relations.rows(), n, "relation rows");
        // sigma must map the relation lattice into itself
        for j in 0..relations.cols() {
            let img = sigma.mul_vec(&relations.col(j));
            if !in_lattice(&relations, &img) {
                return Err(CohomError::UnstableRelations);
            }
        }
        // sigma^p = 1 on the module
        let power = sigma.pow(p as usize);
        let diff = power.sub(&IntMatrix::identity(n));
        for j in 0..n {
            let col = diff.col(j);
            if col.iter().any(|x| !x.is_zero()) && !in_lattice(&relations, &col) {
                return Err(CohomError::BadAction);
            }
        }
        Ok(GModule {
            p,
            ncoords: n,
            relations,
            sigma,
        })
    }

    /// Torsion-free module: the action matrix must satisfy sigma^p = 1
    /// exactly.
    pub fn lattice(p: u64, sigma: IntMatrix) -> Result<Self, CohomError> {
        let n = sigma.rows();
        GModule::new(p, sigma, IntMatrix::zeros(n, 0))
    }

    pub fn trivial_lattice(p: u64, rank: usize) -> Self {
        GModule::lattice(p, IntMatrix::identity(rank)).expect("identity action")
    }

    /// Trivial action on (Z/q)^rank.
    pub fn trivial_finite(p: u64, rank: usize, q: i64) -> Self {
        let rel = IntMatrix::identity(rank).scale(&BigInt::from(q));
        GModule::new(p, IntMatrix::identity(rank), rel).expect("identity action")
    }

    /// The regular representation Z[G]: the generator permutes the basis
    /// cyclically.
    pub fn regular_representation(p: u64) -> Self {
        let n = p as usize;
        let sigma = IntMatrix::from_fn(n, n, |i, j| {
            if i == (j + 1) % n {
                BigInt::from(1)
            } else {
                BigInt::zero()
            }
        });
        GModule::lattice(p, sigma).expect("permutation action")
    }

    /// The same module with coefficients reduced modulo q.
    pub fn reduce(&self, q: i64) -> GModule {
        let qi = IntMatrix::identity(self.ncoords).scale(&BigInt::from(q));
        GModule::new(self.p, self.sigma.clone(), self.relations.hstack(&qi))
            .expect("reduction preserves the action")
    }

    /// Wedge square of a torsion-free module.
    pub fn wedge_square(&self) -> GModule {
        assert_eq!(self.relations.cols(), 0, "wedge square of a lattice");
        GModule::lattice(self.p, wedge_matrix(&self.sigma)).expect("induced action")
    }

    pub fn norm_matrix(&self) -> IntMatrix {
        let mut acc = IntMatrix::identity(self.ncoords);
        let mut out = IntMatrix::identity(self.ncoords);
        for _ in 1..self.p {
            acc = self.sigma.mul(&acc);
            out = out.add(&acc);
        }
        out
    }

    pub fn sigma_minus_one(&self) -> IntMatrix {
        self.sigma.sub(&IntMatrix::identity(self.ncoords))
    }

    pub fn act(&self, power: usize, x: &[BigInt]) -> Vec<BigInt> {
        let mut out = x.to_vec();
        for _ in 0..power {
            out = self.sigma.mul_vec(&out);
        }
        out
    }

    pub fn is_same_shape(&self, other: &GModule) -> bool {
        self.p == other.p && self.ncoords == other.ncoords && self.sigma == other.sigma
    }

    /// Explicit cocycle representative in this module; degree 1 means
    /// Norm(rep) = 0, degree 2 means (sigma - 1) rep = 0, both modulo the
    /// relations.
    pub fn coh_class(&self, degree: u8, rep: Vec<BigInt>) -> Result<CohClass, CohomError> {
        assert_eq!(rep.len(), self.ncoords);
        let image = match degree {
            1 => self.norm_matrix().mul_vec(&rep),
            2 => self.sigma_minus_one().mul_vec(&rep),
            _ => panic!("degree must be 1 or 2"),
        };
        let ok = image.iter().all(|x| x.is_zero()) || in_lattice(&self.relations, &image);
        if !ok {
            return Err(CohomError::NotACocycle(degree));
        }
        Ok(CohClass { degree, rep })
    }
}

/// Cocycle representative of a cohomology class in the periodic resolution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohClass {
    pub degree: u8,
    pub rep: Vec<BigInt>,
}

/// A computed cohomology group with explicit generator representatives and a
/// canonical coordinate map.
#[derive(Clone, Debug)]
pub struct CohomologyGroup {
    pub degree: u8,
    quot: LatticeQuotient,
}

impl CohomologyGroup {
    pub fn structure(&self) -> &crate::linalg::AbGroupStructure {
        self.quot.structure()
    }

    pub fn reps(&self) -> &[Vec<BigInt>] {
        self.quot.reps()
    }

    pub fn coords_len(&self) -> usize {
        self.quot.coords_len()
    }

    /// Canonical coordinates of the class of a cocycle representative.
    pub fn project(&self, rep: &[BigInt]) -> Vec<BigInt> {
        self.quot
            .project(rep)
            .expect("representative satisfies the cocycle condition")
    }

    pub fn is_zero(&self, rep: &[BigInt]) -> bool {
        self.project(rep).iter().all(|c| c.is_zero())
    }

    pub fn rep_from_coords(&self, coords: &[BigInt]) -> Vec<BigInt> {
        self.quot.element_from_coords(coords)
    }

    pub fn invariants(&self) -> Vec<BigInt> {
        self.quot.invariants()
    }

    /// All class coordinate tuples, when the group is finite and small.
    pub fn enumerate_coords(&self) -> Option<Vec<Vec<BigInt>>> {
        let order = self.structure().order()?;
        if order > BigInt::from(1u64 << 16) {
            return None;
        }
        let inv = self.invariants();
        let mut out: Vec<Vec<BigInt>> = vec![Vec::new()];
        for d in inv {
            let d: i64 = (&d).try_into().expect("small invariant factor");
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for prefix in &out {
                for v in 0..d {
                    let mut row = prefix.clone();
                    row.push(BigInt::from(v));
                    next.push(row);
                }
            }
            out = next;
        }
        Some(out)
    }
}

fn assert_p_torsion(structure: &crate::linalg::AbGroupStructure, p: u64) {
    assert_eq!(structure.free_rank, 0, "cohomology of Z/p is torsion");
    let p = BigInt::from(p);
    for d in &structure.torsion {
        assert!(d <= &p && (&p % d).is_zero(), "annihilated by p");
    }
}

/// H^0: the invariants of the module.
pub fn h0(m: &GModule) -> CohomologyGroup {
    let num = preimage_lattice(&m.sigma_minus_one(), &m.relations);
    let quot = LatticeQuotient::new(&num, &m.relations).expect("relations are invariant");
    CohomologyGroup { degree: 0, quot }
}

/// H^1 = ker(Norm) / im(sigma - 1), with explicit representatives.
pub fn h1(m: &GModule) -> CohomologyGroup {
    let num = preimage_lattice(&m.norm_matrix(), &m.relations);
    let den = m.sigma_minus_one().hstack(&m.relations);
    let quot = LatticeQuotient::new(&num, &den).expect("coboundaries are cocycles");
    assert_p_torsion(quot.structure(), m.p);
    CohomologyGroup { degree: 1, quot }
}

/// H^2 = ker(sigma - 1) / im(Norm), with explicit representatives.
pub fn h2(m: &GModule) -> CohomologyGroup {
    let num = preimage_lattice(&m.sigma_minus_one(), &m.relations);
    let den = m.norm_matrix().hstack(&m.relations);
    let quot = LatticeQuotient::new(&num, &den).expect("norms are invariant");
    assert_p_torsion(quot.structure(), m.p);
    CohomologyGroup { degree: 2, quot }
}

/// Cochain-level cup product of two degree-1 periodic representatives with
/// respect to an arbitrary bilinear pairing: the representative of the
/// product is the sum of pairing(sigma^i a, sigma^j b) over 0 <= i < j < p.
pub fn cup_periodic(
    m: &GModule,
    a: &[BigInt],
    b: &[BigInt],
    target_dim: usize,
    pairing: &dyn Fn(&[BigInt], &[BigInt]) -> Vec<BigInt>,
) -> Vec<BigInt> {
    let p = m.p as usize;
    let mut powers_a = Vec::with_capacity(p);
    let mut powers_b = Vec::with_capacity(p);
    powers_a.push(a.to_vec());
    powers_b.push(b.to_vec());
    for k in 1..p {
        powers_a.push(m.sigma.mul_vec(&powers_a[k - 1]));
        powers_b.push(m.sigma.mul_vec(&powers_b[k - 1]));
    }
    let mut out = vec![BigInt::zero(); target_dim];
    for i in 0..p {
        for j in i + 1..p {
            let term = pairing(&powers_a[i], &powers_b[j]);
            for (o, t) in out.iter_mut().zip(term.iter()) {
                *o += t;
            }
        }
    }
    out
}

/// Cup product of two degree-1 classes over the abelianization, with values
/// in the class-2 layer via the commutator pairing.
pub fn cup_v(
    h_module: &GModule,
    quotient: &crate::nilq::Class2Quotient,
    y: &CohClass,
    z: &CohClass,
) -> Result<CohClass, CohomError> {
    if y.degree != 1 || z.degree != 1 {
        return Err(CohomError::NotACocycle(2));
    }
    if y.rep.len() != h_module.ncoords || z.rep.len() != h_module.ncoords {
        return Err(CohomError::ModuleMismatch);
    }
    let rep = cup_periodic(h_module, &y.rep, &z.rep, quotient.layer_rank, &|u, v| {
        quotient.bracket(u, v)
    });
    Ok(CohClass { degree: 2, rep })
}

/// Cup product into the wedge square of a torsion-free module.
pub fn cup_wedge(l_module: &GModule, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let dim = l_module.ncoords;
    cup_periodic(l_module, a, b, crate::nilq::binom2(dim), &|u, v| {
        crate::nilq::wedge_of(dim, u, v)
    })
}

/// The induced map `H^1 /\ H^1 -> H^2(G, L /\ L)` evaluated on a linear
/// combination of wedges of degree-1 classes; returns the degree-2 class.
pub fn wedge_map(
    l_module: &GModule,
    combo: &[(i64, CohClass, CohClass)],
) -> Result<CohClass, CohomError> {
    let dim = l_module.ncoords;
    let mut rep = vec![BigInt::zero(); crate::nilq::binom2(dim)];
    for (c, y, z) in combo {
        if y.degree != 1 || z.degree != 1 {
            return Err(CohomError::NotACocycle(2));
        }
        if y.rep.len() != dim || z.rep.len() != dim {
            return Err(CohomError::ModuleMismatch);
        }
        let term = cup_wedge(l_module, &y.rep, &z.rep);
        let c = BigInt::from(*c);
        for (o, t) in rep.iter_mut().zip(term.iter()) {
            *o += &c * t;
        }
    }
    Ok(CohClass { degree: 2, rep })
}

/// Order of the kernel of the map induced on H^2 by a surjection of
/// coefficient modules (given by `proj`, which must intertwine the actions).
pub fn h2_kernel_order_of_projection(
    source: &GModule,
    target: &GModule,
    proj: &IntMatrix,
) -> BigInt {
    assert_eq!(proj.rows(), target.ncoords);
    assert_eq!(proj.cols(), source.ncoords);
    debug_assert_eq!(
        proj.mul(&source.sigma),
        target.sigma.mul(proj),
        "projection intertwines the actions"
    );
    // classes x in H^2(source) with proj(x) a norm in the target
    let invariants = preimage_lattice(&source.sigma_minus_one(), &source.relations);
    let target_norms = target.norm_matrix().hstack(&target.relations);
    let pre = preimage_lattice(proj, &target_norms);
    let num = crate::linalg::lattice_intersection(&invariants, &pre);
    let den = source.norm_matrix().hstack(&source.relations);
    let quot = LatticeQuotient::new(&num, &den).expect("norms land in the kernel");
    quot.structure()
        .order()
        .expect("kernel of an induced map between finite groups is finite")
}

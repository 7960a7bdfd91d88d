//! Class-2 nilpotent quotients of the surface subgroup.
//!
//! The quotient is presented as the abelianization H (rank 2g, torsion-free)
//! together with a central layer isomorphic to the wedge square of H modulo
//! the single primitive relation vector contributed by the surface relation.
//! Group arithmetic uses the collected normal form: an element is a pair
//! (h, l) and products pick up a correction from the collection cocycle
//! beta(e_i, e_j) = e_i /\ e_j for i > j, else 0.

use crate::fpgroup::{GroupError, SubgroupData, Word};
use crate::linalg::{
    cokernel, lattice_basis, nullspace, smith_normal_form, solve, AbGroupStructure, IntMatrix,
};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Class2Error {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("class-2 layer does not have the expected shape: {0}")]
    LayerShape(String),
    #[error("abelianization rank {0} is too small for a surface group")]
    RankTooSmall(usize),
}

pub fn binom2(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Index of the basis vector `e_a /\ e_b` (a < b) of the wedge square of
/// `Z^dim`.
pub fn wedge_index(dim: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < dim);
    a * (2 * dim - a - 1) / 2 + b - a - 1
}

/// Wedge of two coordinate vectors, in the basis above.
pub fn wedge_of(dim: usize, u: &[BigInt], v: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); binom2(dim)];
    for a in 0..dim {
        if u[a].is_zero() && v[a].is_zero() {
            continue;
        }
        for b in a + 1..dim {
            let c = &u[a] * &v[b] - &u[b] * &v[a];
            if !c.is_zero() {
                out[wedge_index(dim, a, b)] = c;
            }
        }
    }
    out
}

/// Matrix of the induced map on wedge squares for a linear map `m`.
pub fn wedge_matrix(m: &IntMatrix) -> IntMatrix {
    let dim_in = m.cols();
    let dim_out = m.rows();
    let cols: Vec<Vec<BigInt>> = (0..dim_in)
        .flat_map(|a| (a + 1..dim_in).map(move |b| (a, b)))
        .map(|(a, b)| wedge_of(dim_out, &m.col(a), &m.col(b)))
        .collect();
    IntMatrix::from_cols(binom2(dim_out), &cols)
}

/// Element of the free class-2 nilpotent group on `dim` generators, in
/// collected form: linear part in `Z^dim`, quadratic part in its wedge
/// square.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FreeClass2 {
    pub dim: usize,
    pub linear: Vec<BigInt>,
    pub quad: Vec<BigInt>,
}

impl FreeClass2 {
    pub fn identity(dim: usize) -> Self {
        FreeClass2 {
            dim,
            linear: vec![BigInt::zero(); dim],
            quad: vec![BigInt::zero(); binom2(dim)],
        }
    }

    fn beta(dim: usize, v: &[BigInt], u: &[BigInt]) -> Vec<BigInt> {
        // beta(v, u) = sum over i > j of v_i u_j (e_i /\ e_j)
        let mut out = vec![BigInt::zero(); binom2(dim)];
        for i in 0..dim {
            if v[i].is_zero() {
                continue;
            }
            for j in 0..i {
                if u[j].is_zero() {
                    continue;
                }
                out[wedge_index(dim, j, i)] -= &v[i] * &u[j];
            }
        }
        out
    }

    pub fn mul(&self, other: &FreeClass2) -> FreeClass2 {
        debug_assert_eq!(self.dim, other.dim);
        let corr = Self::beta(self.dim, &self.linear, &other.linear);
        FreeClass2 {
            dim: self.dim,
            linear: add_vec(&self.linear, &other.linear),
            quad: add3(&self.quad, &other.quad, &corr),
        }
    }

    pub fn inverse(&self) -> FreeClass2 {
        let corr = Self::beta(self.dim, &self.linear, &self.linear);
        FreeClass2 {
            dim: self.dim,
            linear: self.linear.iter().map(|x| -x).collect(),
            quad: self
                .quad
                .iter()
                .zip(corr.iter())
                .map(|(q, c)| c - q)
                .collect(),
        }
    }

    pub fn pow(&self, k: i64) -> FreeClass2 {
        let base = if k >= 0 { self.clone() } else { self.inverse() };
        let mut acc = FreeClass2::identity(self.dim);
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Image of a free-group word under the canonical map to the free
    /// class-2 group.
    pub fn eval_word(dim: usize, w: &Word) -> FreeClass2 {
        let mut acc = FreeClass2::identity(dim);
        for &l in w.letters() {
            let j = l.unsigned_abs() as usize - 1;
            let sign = if l > 0 { 1i64 } else { -1i64 };
            // multiply by (sign * e_j, 0) in place
            for i in j + 1..dim {
                if acc.linear[i].is_zero() {
                    continue;
                }
                let c = &acc.linear[i] * sign;
                acc.quad[wedge_index(dim, j, i)] -= c;
            }
            acc.linear[j] += sign;
        }
        acc
    }
}

fn add_vec(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    a.iter().zip(b.iter()).map(|(x, y)| x + y).collect()
}

fn add3(a: &[BigInt], b: &[BigInt], c: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .zip(b.iter())
        .zip(c.iter())
        .map(|((x, y), z)| x + y + z)
        .collect()
}

fn sub_vec(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    a.iter().zip(b.iter()).map(|(x, y)| x - y).collect()
}

/// The central layer of the class-2 quotient: the wedge square of H modulo
/// the span of the relation vector omega.
#[derive(Clone, Debug)]
pub struct Layer2 {
    pub ambient_rank: usize,
    pub relation_vector: Vec<BigInt>,
    pub sigma_wedge: IntMatrix,
    pub quotient_structure: AbGroupStructure,
}

/// Element of the class-2 quotient in collected coordinates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Class2Element {
    pub h_part: Vec<BigInt>,
    pub l_part: Vec<BigInt>,
}

/// The class-2 quotient of the kernel subgroup, with every map needed to
/// push words and automorphisms through it.
#[derive(Clone, Debug)]
pub struct Class2Quotient {
    pub h_rank: usize,
    pub layer: Layer2,
    pub layer_rank: usize,
    pub sigma: IntMatrix,
    pub sigma_l: IntMatrix,
    /// wedge(H) -> layer coordinates
    pub proj_l: IntMatrix,
    /// layer coordinates -> wedge(H), right inverse of proj_l
    pub lift_l: IntMatrix,
    phi: IntMatrix,
    section_x: IntMatrix,
    n_letters: usize,
    rel_matrix: IntMatrix,
    relators_n2: Vec<FreeClass2>,
    /// proj_l composed with wedge(phi): wedge(Z^N) -> layer
    proj_wedge_phi: IntMatrix,
    /// wedge(section_x) composed with lift_l: layer -> wedge(Z^N)
    lift_wedge: IntMatrix,
    /// projected bracket values proj_l(eps_a /\ eps_b) for a < b
    bracket_cols: Vec<Vec<BigInt>>,
    /// collection corrections c(h) in wedge(Z^N): terms for x_i with itself
    /// and for pairs x_i, x_j (i < j)
    beta_x_diag: Vec<Vec<BigInt>>,
    beta_x_pairs: Vec<Vec<BigInt>>,
}

/// Builds the class-2 quotient from the kernel presentation and the
/// conjugation action on its abelianization.
///
/// The quotient is computed by the general normal-closure rule: each relator
/// contributes its collected image and, for normality, the wedge of its
/// linear part with every generator. The result is then asserted to be the
/// wedge square of H modulo one primitive vector fixed by the action.
pub fn build_class2(sub: &SubgroupData, sigma: &IntMatrix) -> Result<Class2Quotient, Class2Error> {
    let ab = sub.abelianization()?;
    let n = sub.schreier_generators.len();
    let h_rank = ab.h_rank;
    if h_rank < 2 {
        return Err(Class2Error::RankTooSmall(h_rank));
    }
    assert_eq!(sigma.rows(), h_rank, "action matrix shape");

    let relators_n2: Vec<FreeClass2> = sub
        .subgroup_relators
        .iter()
        .map(|r| FreeClass2::eval_word(n, r))
        .collect();

    let wedge_phi = wedge_matrix(&ab.phi);

    // products of relators over each nullspace combination land in the
    // wedge part; their images in wedge(H) span the relation module
    let kernel = nullspace(&ab.relator_matrix);
    let mut span_cols: Vec<Vec<BigInt>> = Vec::new();
    for j in 0..kernel.cols() {
        let coeffs = kernel.col(j);
        let mut prod = FreeClass2::identity(n);
        for (r, c) in relators_n2.iter().zip(coeffs.iter()) {
            let e: i64 = c.try_into().expect("relator multiplicity fits i64");
            if e != 0 {
                prod = prod.mul(&r.pow(e));
            }
        }
        if !prod.linear.iter().all(|x| x.is_zero()) {
            return Err(Class2Error::LayerShape(
                "relator combination has nonzero linear part".into(),
            ));
        }
        span_cols.push(wedge_phi.mul_vec(&prod.quad));
    }
    let wedge_h_rank = binom2(h_rank);
    let span = IntMatrix::from_cols(wedge_h_rank, &span_cols);
    let span_snf = smith_normal_form(&span);
    if span_snf.rank() != 1 || !span_snf.s.get(0, 0).is_one() {
        return Err(Class2Error::LayerShape(format!(
            "relation module has invariant factors {:?}, expected a single primitive vector",
            span_snf.nonzero_diagonal()
        )));
    }
    let mut omega = lattice_basis(&span).col(0);
    if let Some(first) = omega.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            omega = omega.iter().map(|x| -x).collect();
        }
    }

    let sigma_wedge = wedge_matrix(sigma);
    if sigma_wedge.mul_vec(&omega) != omega {
        return Err(Class2Error::LayerShape(
            "relation vector is not fixed by the induced action".into(),
        ));
    }

    let omega_col = IntMatrix::from_cols(wedge_h_rank, &[omega.clone()]);
    let quotient_structure = cokernel(&omega_col);
    if quotient_structure != AbGroupStructure::free(wedge_h_rank - 1) {
        return Err(Class2Error::LayerShape(format!(
            "layer is {} but a free group of rank {} was expected",
            quotient_structure,
            wedge_h_rank - 1
        )));
    }

    // coordinates on the layer: Smith transform sending omega to e_1
    let f = smith_normal_form(&omega_col);
    let mut u = f.u;
    let mut u_inv = f.u_inv;
    if !u.mul_vec(&omega)[0].is_one() {
        u.negate_row(0);
        u_inv.negate_col(0);
    }
    assert!(u
        .mul_vec(&omega)
        .iter()
        .enumerate()
        .all(|(i, x)| if i == 0 { x.is_one() } else { x.is_zero() }));
    let layer_rank = wedge_h_rank - 1;
    let all: Vec<usize> = (0..wedge_h_rank).collect();
    let rest: Vec<usize> = (1..wedge_h_rank).collect();
    let proj_l = u.submatrix(&rest, &all);
    let lift_l = u_inv.submatrix(&all, &rest);
    let m = u.mul(&sigma_wedge).mul(&u_inv);
    for i in 1..wedge_h_rank {
        assert!(m.get(i, 0).is_zero(), "action descends to the layer");
    }
    let sigma_l = m.submatrix(&rest, &rest);
    let p = sub.theta.p;
    assert!(sigma_l.pow(p as usize).is_identity(), "layer action has order p");

    let proj_wedge_phi = proj_l.mul(&wedge_phi);
    let lift_wedge = wedge_matrix(&ab.section).mul(&lift_l);

    let mut bracket_cols = Vec::with_capacity(binom2(h_rank));
    for a in 0..h_rank {
        for b in a + 1..h_rank {
            bracket_cols.push(proj_l.col(wedge_index(h_rank, a, b)));
        }
    }

    let xs: Vec<Vec<BigInt>> = (0..h_rank).map(|i| ab.section.col(i)).collect();
    let beta_x_diag: Vec<Vec<BigInt>> = xs.iter().map(|x| FreeClass2::beta(n, x, x)).collect();
    let mut beta_x_pairs = Vec::with_capacity(binom2(h_rank));
    for i in 0..h_rank {
        for j in i + 1..h_rank {
            beta_x_pairs.push(FreeClass2::beta(n, &xs[i], &xs[j]));
        }
    }

    Ok(Class2Quotient {
        h_rank,
        layer: Layer2 {
            ambient_rank: wedge_h_rank,
            relation_vector: omega,
            sigma_wedge,
            quotient_structure,
        },
        layer_rank,
        sigma: sigma.clone(),
        sigma_l,
        proj_l,
        lift_l,
        phi: ab.phi,
        section_x: ab.section,
        n_letters: n,
        rel_matrix: ab.relator_matrix,
        relators_n2,
        proj_wedge_phi,
        lift_wedge,
        bracket_cols,
        beta_x_diag,
        beta_x_pairs,
    })
}

impl Class2Quotient {
    pub fn identity(&self) -> Class2Element {
        Class2Element {
            h_part: vec![BigInt::zero(); self.h_rank],
            l_part: vec![BigInt::zero(); self.layer_rank],
        }
    }

    pub fn element(&self, h_part: Vec<BigInt>, l_part: Vec<BigInt>) -> Class2Element {
        assert_eq!(h_part.len(), self.h_rank);
        assert_eq!(l_part.len(), self.layer_rank);
        Class2Element { h_part, l_part }
    }

    pub fn from_h(&self, h_part: Vec<BigInt>) -> Class2Element {
        self.element(h_part, vec![BigInt::zero(); self.layer_rank])
    }

    pub fn n_letters(&self) -> usize {
        self.n_letters
    }

    /// Collection cocycle on H, projected to the layer.
    pub fn beta(&self, h: &[BigInt], h2: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.layer_rank];
        for i in 0..self.h_rank {
            if h[i].is_zero() {
                continue;
            }
            for j in 0..i {
                if h2[j].is_zero() {
                    continue;
                }
                // e_i /\ e_j = -(e_j /\ e_i) for i > j
                let c = &h[i] * &h2[j];
                let col = &self.bracket_cols[wedge_index(self.h_rank, j, i)];
                for (o, v) in out.iter_mut().zip(col.iter()) {
                    *o -= &c * v;
                }
            }
        }
        out
    }

    pub fn multiply(&self, x: &Class2Element, y: &Class2Element) -> Class2Element {
        let corr = self.beta(&x.h_part, &y.h_part);
        Class2Element {
            h_part: add_vec(&x.h_part, &y.h_part),
            l_part: add3(&x.l_part, &y.l_part, &corr),
        }
    }

    pub fn inverse(&self, x: &Class2Element) -> Class2Element {
        let corr = self.beta(&x.h_part, &x.h_part);
        Class2Element {
            h_part: x.h_part.iter().map(|v| -v).collect(),
            l_part: x
                .l_part
                .iter()
                .zip(corr.iter())
                .map(|(q, c)| c - q)
                .collect(),
        }
    }

    pub fn commutator(&self, x: &Class2Element, y: &Class2Element) -> Class2Element {
        let a = self.multiply(x, y);
        let b = self.multiply(&a, &self.inverse(x));
        self.multiply(&b, &self.inverse(y))
    }

    pub fn pow(&self, x: &Class2Element, k: i64) -> Class2Element {
        let base = if k >= 0 { x.clone() } else { self.inverse(x) };
        let mut acc = self.identity();
        for _ in 0..k.unsigned_abs() {
            acc = self.multiply(&acc, &base);
        }
        acc
    }

    /// Image of `y /\ z` in the layer; bilinear and alternating in (y, z).
    pub fn bracket(&self, y: &[BigInt], z: &[BigInt]) -> Vec<BigInt> {
        let w = wedge_of(self.h_rank, y, z);
        self.proj_l.mul_vec(&w)
    }

    /// Collection correction c(h) for the chosen lifts of the H basis, as an
    /// element of wedge(Z^N).
    fn c_collect(&self, h: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); binom2(self.n_letters)];
        let two = BigInt::from(2);
        for i in 0..self.h_rank {
            if h[i].is_zero() {
                continue;
            }
            // binomial(h_i, 2)
            let c = (&h[i] * (&h[i] - BigInt::one())) / &two;
            if !c.is_zero() {
                for (o, v) in out.iter_mut().zip(self.beta_x_diag[i].iter()) {
                    *o += &c * v;
                }
            }
            for j in i + 1..self.h_rank {
                if h[j].is_zero() {
                    continue;
                }
                let c = &h[i] * &h[j];
                let col = &self.beta_x_pairs[wedge_index(self.h_rank, i, j)];
                for (o, v) in out.iter_mut().zip(col.iter()) {
                    *o += &c * v;
                }
            }
        }
        out
    }

    /// Canonical coordinates of a free class-2 element modulo the relator
    /// subgroup.
    pub fn normalize(&self, elt: &FreeClass2) -> Class2Element {
        assert_eq!(elt.dim, self.n_letters);
        let h = self.phi.mul_vec(&elt.linear);
        let xh = self.section_x.mul_vec(&h);
        let diff = sub_vec(&elt.linear, &xh);
        let coeffs = solve(&self.rel_matrix, &diff)
            .expect("kernel element expressed in relators; abelianization is torsion-free");
        let mut prod = FreeClass2::identity(self.n_letters);
        for (r, c) in self.relators_n2.iter().zip(coeffs.iter()) {
            let e: i64 = c.try_into().expect("relator multiplicity fits i64");
            if e != 0 {
                prod = prod.mul(&r.pow(e));
            }
        }
        let reduced = elt.mul(&prod.inverse());
        debug_assert_eq!(reduced.linear, xh);
        let rem = sub_vec(&reduced.quad, &self.c_collect(&h));
        let l = self.proj_wedge_phi.mul_vec(&rem);
        Class2Element { h_part: h, l_part: l }
    }

    /// Image of a kernel word (in Schreier letters) in the class-2 quotient.
    pub fn class_of_schreier_word(&self, w: &Word) -> Class2Element {
        self.normalize(&FreeClass2::eval_word(self.n_letters, w))
    }

    /// Free class-2 representative of an element, inverse to `normalize`.
    pub fn free_representative(&self, x: &Class2Element) -> FreeClass2 {
        let linear = self.section_x.mul_vec(&x.h_part);
        let quad = add_vec(
            &self.c_collect(&x.h_part),
            &self.lift_wedge.mul_vec(&x.l_part),
        );
        FreeClass2 {
            dim: self.n_letters,
            linear,
            quad,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpgroup::conjugation_action_on_abelianization;
    use crate::fpgroup::{reidemeister_schreier, Homomorphism2Cyclic, Presentation};

    fn surface_setup(p: u64, h: usize, mon: &[u64]) -> (SubgroupData, IntMatrix) {
        let n = mon.len();
        let count = 2 * h + n;
        let mut labels = Vec::new();
        for i in 0..h {
            labels.push(format!("a{}", i + 1));
            labels.push(format!("b{}", i + 1));
        }
        for i in 0..n {
            labels.push(format!("c{}", i + 1));
        }
        let mut relators = Vec::new();
        for i in 0..n {
            relators.push(Word::generator(2 * h + i).pow(p as i64));
        }
        let mut long = Word::empty();
        for i in 0..h {
            let a = Word::generator(2 * i);
            let b = Word::generator(2 * i + 1);
            long = long
                .concat(&a)
                .concat(&b)
                .concat(&a.inverse())
                .concat(&b.inverse());
        }
        for i in 0..n {
            long = long.concat(&Word::generator(2 * h + i));
        }
        relators.push(long);
        let pres = Presentation::new(count, relators, labels).unwrap();
        let mut images = vec![0u64; 2 * h];
        images.extend_from_slice(mon);
        let theta = Homomorphism2Cyclic::new(p, images).unwrap();
        let sub = reidemeister_schreier(&pres, &theta).unwrap();
        let lift = Word::generator(sub.designated);
        let sigma = conjugation_action_on_abelianization(&sub, &lift).unwrap();
        (sub, sigma)
    }

    fn bi(v: Vec<i64>) -> Vec<BigInt> {
        v.into_iter().map(BigInt::from).collect()
    }

    #[test]
    fn genus_two_layer() {
        let (sub, sigma) = surface_setup(2, 0, &[1; 6]);
        let q = build_class2(&sub, &sigma).unwrap();
        assert_eq!(q.h_rank, 4);
        assert_eq!(q.layer.ambient_rank, 6);
        assert_eq!(q.layer.quotient_structure, AbGroupStructure::free(5));
        assert_eq!(q.layer_rank, 5);
    }

    #[test]
    fn genus_three_layer() {
        let (sub, sigma) = surface_setup(2, 1, &[1, 1, 1, 1]);
        let q = build_class2(&sub, &sigma).unwrap();
        assert_eq!(q.h_rank, 6);
        assert_eq!(q.layer.ambient_rank, 15);
        assert_eq!(q.layer.quotient_structure, AbGroupStructure::free(14));
    }

    #[test]
    fn genus_one_layer_is_trivial() {
        // double cover of the sphere branched in 4 points: the wedge square
        // has rank 1 and omega spans it
        let (sub, sigma) = surface_setup(2, 0, &[1; 4]);
        let q = build_class2(&sub, &sigma).unwrap();
        assert_eq!(q.h_rank, 2);
        assert_eq!(q.layer.ambient_rank, 1);
        assert_eq!(q.layer_rank, 0);
        assert_eq!(q.layer.quotient_structure, AbGroupStructure::free(0));
    }

    #[test]
    fn relators_normalize_to_identity() {
        let (sub, sigma) = surface_setup(3, 0, &[1, 1, 2, 2]);
        let q = build_class2(&sub, &sigma).unwrap();
        for r in &sub.subgroup_relators {
            let img = q.class_of_schreier_word(r);
            assert_eq!(img, q.identity(), "relator must die in the quotient");
        }
    }

    #[test]
    fn normalize_is_homomorphism() {
        let (sub, sigma) = surface_setup(2, 0, &[1; 6]);
        let q = build_class2(&sub, &sigma).unwrap();
        let words = [
            Word::from_letters(vec![1, 2, -3, 4]),
            Word::from_letters(vec![5, -2, 2, 7, 1]),
            Word::from_letters(vec![-11, 3, 9, -1]),
        ];
        for u in &words {
            for v in &words {
                let lhs = q.class_of_schreier_word(&u.concat(v));
                let rhs = q.multiply(&q.class_of_schreier_word(u), &q.class_of_schreier_word(v));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn multiplication_laws() {
        let (sub, sigma) = surface_setup(2, 0, &[1; 6]);
        let q = build_class2(&sub, &sigma).unwrap();
        let e = q.identity();
        let x = q.element(bi(vec![1, -2, 0, 3]), bi(vec![2, 0, -1, 0, 5]));
        let y = q.element(bi(vec![0, 1, 1, -1]), bi(vec![0, 3, 0, 0, -2]));
        let z = q.element(bi(vec![2, 0, -1, 1]), bi(vec![1, 1, 1, 1, 1]));
        assert_eq!(q.multiply(&e, &x), x);
        assert_eq!(q.multiply(&x, &q.inverse(&x)), e);
        let a = q.multiply(&q.multiply(&x, &y), &z);
        let b = q.multiply(&x, &q.multiply(&y, &z));
        assert_eq!(a, b, "associativity");
    }

    #[test]
    fn bracket_matches_commutator_and_alternates() {
        let (sub, sigma) = surface_setup(2, 0, &[1; 6]);
        let q = build_class2(&sub, &sigma).unwrap();
        let ys: Vec<Vec<BigInt>> = vec![
            bi(vec![1, 0, 0, 0]),
            bi(vec![0, 1, 0, 0]),
            bi(vec![1, -1, 2, 0]),
            bi(vec![0, 2, 1, 1]),
        ];
        for y in &ys {
            assert!(q.bracket(y, y).iter().all(|c| c.is_zero()), "alternating");
            for z in &ys {
                let anti: Vec<BigInt> = q.bracket(z, y).iter().map(|c| -c).collect();
                assert_eq!(q.bracket(y, z), anti, "antisymmetry");
                let comm = q.commutator(&q.from_h(y.clone()), &q.from_h(z.clone()));
                assert!(comm.h_part.iter().all(|c| c.is_zero()));
                assert_eq!(comm.l_part, q.bracket(y, z), "commutator realizes the bracket");
            }
        }
    }

    #[test]
    fn commutator_ignores_layer_parts() {
        let (sub, sigma) = surface_setup(2, 0, &[1; 6]);
        let q = build_class2(&sub, &sigma).unwrap();
        let y = bi(vec![1, 2, 0, -1]);
        let z = bi(vec![0, 1, 3, 1]);
        let a = q.commutator(
            &q.element(y.clone(), bi(vec![7, 0, 0, -4, 2])),
            &q.element(z.clone(), bi(vec![0, 1, 1, 0, 9])),
        );
        let b = q.commutator(&q.from_h(y), &q.from_h(z));
        assert_eq!(a, b, "bracket only depends on the H parts");
    }

    #[test]
    fn layer_action_has_order_p() {
        for (p, h, mon) in [(2u64, 0usize, vec![1u64; 6]), (3, 0, vec![1, 1, 2, 2])] {
            let (sub, sigma) = surface_setup(p, h, &mon);
            let q = build_class2(&sub, &sigma).unwrap();
            assert!(q.layer.sigma_wedge.pow(p as usize).is_identity());
            assert!(q.sigma_l.pow(p as usize).is_identity());
            assert_eq!(
                q.layer.sigma_wedge.mul_vec(&q.layer.relation_vector),
                q.layer.relation_vector
            );
        }
    }

    #[test]
    fn free_representative_round_trips() {
        let (sub, sigma) = surface_setup(2, 0, &[1; 6]);
        let q = build_class2(&sub, &sigma).unwrap();
        let x = q.element(bi(vec![1, 2, -1, 0]), bi(vec![0, -3, 1, 4, 2]));
        let free = q.free_representative(&x);
        assert_eq!(q.normalize(&free), x);
    }
}

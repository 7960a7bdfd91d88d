//! Words, finitely presented groups, and Reidemeister-Schreier extraction of
//! the index-p surface subgroup from an orbifold group presentation.
//!
//! The kernel of a surjection onto Z/p is presented on Schreier generators;
//! the rewrite table translates kernel words of the parent group into those
//! generators. The abelianization of the kernel, with its basis fixed by a
//! deterministic Smith normal form, is the lattice every later module acts
//! on.

use crate::linalg::{smith_normal_form, IntMatrix, SmithForm};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("homomorphism images do not generate Z/{0}")]
    NonSurjective(u64),
    #[error("word does not lie in the kernel of the homomorphism")]
    NotInKernel,
    #[error("relator uses generator index {idx} but the presentation has {count} generators")]
    RelatorIndexOutOfRange { idx: usize, count: usize },
    #[error("kernel abelianization has torsion; the subgroup is not a surface group")]
    KernelTorsion,
    #[error("conjugating element lies in the kernel and induces no Z/p action")]
    LiftInKernel,
    #[error("images must be nonzero residues modulo {0}")]
    ZeroImage(u64),
}

/// Freely reducible word in signed generator letters: letter `+(i+1)` is
/// generator `i`, `-(i+1)` its inverse.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Word {
    letters: Vec<i32>,
}

impl Word {
    pub fn empty() -> Self {
        Word { letters: Vec::new() }
    }

    pub fn generator(idx: usize) -> Self {
        Word {
            letters: vec![(idx as i32) + 1],
        }
    }

    pub fn from_letters(letters: Vec<i32>) -> Self {
        assert!(letters.iter().all(|&l| l != 0), "letters are nonzero");
        Word { letters }
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n >= 0 { self.clone() } else { self.inverse() };
        let mut out = Word::empty();
        for _ in 0..n.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    pub fn conjugate_by(&self, g: &Word) -> Word {
        g.concat(self).concat(&g.inverse())
    }

    /// Largest generator index used, if any.
    pub fn max_index(&self) -> Option<usize> {
        self.letters.iter().map(|l| l.unsigned_abs() as usize - 1).max()
    }

    /// Exponent-sum vector over `count` generators.
    pub fn abelianized(&self, count: usize) -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); count];
        for &l in &self.letters {
            let idx = l.unsigned_abs() as usize - 1;
            if l > 0 {
                v[idx] += 1;
            } else {
                v[idx] -= 1;
            }
        }
        v
    }
}

/// Freely reduced form of a word; cancels adjacent inverse pairs.
pub fn free_reduce(w: &Word) -> Word {
    let mut stack: Vec<i32> = Vec::with_capacity(w.letters.len());
    for &l in &w.letters {
        if stack.last() == Some(&-l) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
    Word { letters: stack }
}

/// Finitely presented group.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub generator_count: usize,
    pub relators: Vec<Word>,
    pub generator_labels: Vec<String>,
}

impl Presentation {
    pub fn new(
        generator_count: usize,
        relators: Vec<Word>,
        generator_labels: Vec<String>,
    ) -> Result<Self, GroupError> {
        assert_eq!(generator_labels.len(), generator_count, "label count");
        for r in &relators {
            if let Some(idx) = r.max_index() {
                if idx >= generator_count {
                    return Err(GroupError::RelatorIndexOutOfRange {
                        idx,
                        count: generator_count,
                    });
                }
            }
        }
        Ok(Presentation {
            generator_count,
            relators,
            generator_labels,
        })
    }
}

/// Surjection onto Z/p given by one residue per generator.
#[derive(Clone, Debug)]
pub struct Homomorphism2Cyclic {
    pub p: u64,
    pub images: Vec<u64>,
}

impl Homomorphism2Cyclic {
    pub fn new(p: u64, images: Vec<u64>) -> Result<Self, GroupError> {
        let images: Vec<u64> = images.into_iter().map(|x| x % p).collect();
        if images.iter().all(|&x| x == 0) {
            return Err(GroupError::NonSurjective(p));
        }
        Ok(Homomorphism2Cyclic { p, images })
    }

    pub fn apply(&self, w: &Word) -> u64 {
        let p = self.p;
        let mut acc: u64 = 0;
        for &l in w.letters() {
            let idx = l.unsigned_abs() as usize - 1;
            let img = self.images[idx];
            if l > 0 {
                acc = (acc + img) % p;
            } else {
                acc = (acc + p - img) % p;
            }
        }
        acc
    }
}

fn inv_mod_u64(a: u64, p: u64) -> u64 {
    // p is a small prime
    let mut acc = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Index-p kernel subgroup data: Schreier transversal, generators, relators
/// and the rewrite table.
#[derive(Clone, Debug)]
pub struct SubgroupData {
    pub parent: Presentation,
    pub theta: Homomorphism2Cyclic,
    /// Index of the designated transversal generator `t` (first generator
    /// with nonzero image; every coset representative is a power of it).
    pub designated: usize,
    pub transversal: Vec<Word>,
    pub schreier_generators: Vec<Word>,
    pub subgroup_relators: Vec<Word>,
    /// `table[k][j]`: Schreier letter produced by generator `j` read at
    /// coset `t^k`; `None` for the tree edges that rewrite to nothing.
    pub table: Vec<Vec<Option<usize>>>,
}

/// Classical Reidemeister-Schreier for the kernel of `theta`.
pub fn reidemeister_schreier(
    pres: &Presentation,
    theta: &Homomorphism2Cyclic,
) -> Result<SubgroupData, GroupError> {
    assert_eq!(pres.generator_count, theta.images.len(), "image count");
    let p = theta.p as usize;
    let designated = theta
        .images
        .iter()
        .position(|&x| x != 0)
        .ok_or(GroupError::NonSurjective(theta.p))?;
    let t_image = theta.images[designated];
    let t_inv = inv_mod_u64(t_image, theta.p);
    // coset of the theta-value v is represented by t^(v * t_image^-1)
    let coset_of_value = |v: u64| -> usize { (v % theta.p * t_inv % theta.p) as usize };
    let value_of_coset = |k: usize| -> u64 { k as u64 * t_image % theta.p };

    let t = Word::generator(designated);
    let transversal: Vec<Word> = (0..p).map(|k| t.pow(k as i64)).collect();

    let mut schreier_generators = Vec::new();
    let mut table = vec![vec![None; pres.generator_count]; p];
    for j in 0..pres.generator_count {
        for k in 0..p {
            let target = coset_of_value(value_of_coset(k) + theta.images[j]);
            let gamma = free_reduce(
                &transversal[k]
                    .concat(&Word::generator(j))
                    .concat(&transversal[target].inverse()),
            );
            if !gamma.is_empty() {
                table[k][j] = Some(schreier_generators.len());
                schreier_generators.push(gamma);
            }
        }
    }

    let sub = SubgroupData {
        parent: pres.clone(),
        theta: theta.clone(),
        designated,
        transversal,
        schreier_generators,
        subgroup_relators: Vec::new(),
        table,
    };

    let mut subgroup_relators = Vec::new();
    for r in &pres.relators {
        for k in 0..p {
            let w = sub.rewrite_from_coset(r, k)?;
            if !w.is_empty() {
                subgroup_relators.push(w);
            }
        }
    }
    Ok(SubgroupData {
        subgroup_relators,
        ..sub
    })
}

impl SubgroupData {
    /// Power k such that t^k represents the coset of theta-value `v`.
    pub fn coset_power_of_value(&self, v: u64) -> usize {
        self.coset_of_value(v)
    }

    fn coset_of_value(&self, v: u64) -> usize {
        let p = self.theta.p;
        let t_inv = inv_mod_u64(self.theta.images[self.designated], p);
        (v % p * t_inv % p) as usize
    }

    fn value_of_coset(&self, k: usize) -> u64 {
        k as u64 * self.theta.images[self.designated] % self.theta.p
    }

    fn rewrite_from_coset(&self, w: &Word, start: usize) -> Result<Word, GroupError> {
        let p = self.theta.p;
        let mut k = start;
        let mut out: Vec<i32> = Vec::new();
        for &l in w.letters() {
            let j = l.unsigned_abs() as usize - 1;
            let img = self.theta.images[j];
            if l > 0 {
                if let Some(s) = self.table[k][j] {
                    out.push(s as i32 + 1);
                }
                k = self.coset_of_value(self.value_of_coset(k) + img);
            } else {
                let k2 = self.coset_of_value(self.value_of_coset(k) + p - img);
                if let Some(s) = self.table[k2][j] {
                    out.push(-(s as i32 + 1));
                }
                k = k2;
            }
        }
        if k != start {
            return Err(GroupError::NotInKernel);
        }
        Ok(free_reduce(&Word::from_letters_unchecked(out)))
    }

    /// Rewrites a kernel word of the parent group into Schreier letters.
    pub fn rewrite_kernel_word(&self, w: &Word) -> Result<Word, GroupError> {
        if self.theta.apply(w) != 0 {
            return Err(GroupError::NotInKernel);
        }
        self.rewrite_from_coset(w, 0)
    }

    /// Expands a word in Schreier letters back to parent letters.
    pub fn expand(&self, w: &Word) -> Word {
        let mut out = Word::empty();
        for &l in w.letters() {
            let idx = l.unsigned_abs() as usize - 1;
            let g = &self.schreier_generators[idx];
            if l > 0 {
                out = out.concat(g);
            } else {
                out = out.concat(&g.inverse());
            }
        }
        free_reduce(&out)
    }

    /// Abelianization of the kernel with its canonical basis.
    pub fn abelianization(&self) -> Result<KernelAbelianization, GroupError> {
        let n = self.schreier_generators.len();
        let cols: Vec<Vec<BigInt>> = self
            .subgroup_relators
            .iter()
            .map(|r| r.abelianized(n))
            .collect();
        let relator_matrix = IntMatrix::from_cols(n, &cols);
        let snf = smith_normal_form(&relator_matrix);
        let diag = snf.nonzero_diagonal();
        if diag.iter().any(|d| !d.is_one()) {
            return Err(GroupError::KernelTorsion);
        }
        let rank_ones = diag.len();
        let h_rank = n - rank_ones;
        let free_rows: Vec<usize> = (rank_ones..n).collect();
        let all: Vec<usize> = (0..n).collect();
        let phi = snf.u.submatrix(&free_rows, &all);
        let section = snf.u_inv.submatrix(&all, &free_rows);
        Ok(KernelAbelianization {
            relator_matrix,
            snf,
            rank_ones,
            h_rank,
            phi,
            section,
        })
    }
}

impl Word {
    fn from_letters_unchecked(letters: Vec<i32>) -> Word {
        Word { letters }
    }
}

/// Torsion-free abelianization H of the kernel, in the basis fixed by the
/// Smith form of the abelianized relator matrix.
#[derive(Clone, Debug)]
pub struct KernelAbelianization {
    pub relator_matrix: IntMatrix,
    pub snf: SmithForm,
    pub rank_ones: usize,
    /// rank of H; equals twice the genus of the covering surface
    pub h_rank: usize,
    /// coordinates map Z^N -> H = Z^{h_rank}
    pub phi: IntMatrix,
    /// right inverse H -> Z^N of `phi`
    pub section: IntMatrix,
}

impl KernelAbelianization {
    /// H-class of a word in Schreier letters.
    pub fn class_of(&self, w: &Word) -> Vec<BigInt> {
        let v = w.abelianized(self.relator_matrix.rows());
        self.phi.mul_vec(&v)
    }
}

/// Matrix of the action induced on H by conjugation with `lift`, which must
/// map to a nonzero residue (hence a generator of Z/p).
pub fn conjugation_action_on_abelianization(
    sub: &SubgroupData,
    lift: &Word,
) -> Result<IntMatrix, GroupError> {
    if sub.theta.apply(lift) == 0 {
        return Err(GroupError::LiftInKernel);
    }
    let ab = sub.abelianization()?;
    conjugation_action_with(sub, &ab, lift)
}

/// Same as `conjugation_action_on_abelianization` with a precomputed
/// abelianization.
pub fn conjugation_action_with(
    sub: &SubgroupData,
    ab: &KernelAbelianization,
    lift: &Word,
) -> Result<IntMatrix, GroupError> {
    if sub.theta.apply(lift) == 0 {
        return Err(GroupError::LiftInKernel);
    }
    let n = sub.schreier_generators.len();
    let mut cols = Vec::with_capacity(n);
    for g in &sub.schreier_generators {
        let conj = g.conjugate_by(lift);
        let rw = sub.rewrite_kernel_word(&conj)?;
        cols.push(rw.abelianized(n));
    }
    let t = IntMatrix::from_cols(n, &cols);
    let m = ab.snf.u.mul(&t).mul(&ab.snf.u_inv);
    let free: Vec<usize> = (ab.rank_ones..n).collect();
    Ok(m.submatrix(&free, &free))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cokernel;

    fn orbifold_presentation_for_test(p: u64, h: usize, mon: &[u64]) -> (Presentation, Homomorphism2Cyclic) {
        // generators a_1, b_1, ..., a_h, b_h, c_1, ..., c_n
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
        (pres, theta)
    }

    #[test]
    fn free_reduce_examples() {
        let g = Word::generator(0);
        assert!(free_reduce(&g.concat(&g.inverse())).is_empty());
        let w = Word::from_letters(vec![1, 2, -2, 1]);
        assert_eq!(free_reduce(&w), Word::from_letters(vec![1, 1]));
        assert!(free_reduce(&Word::empty()).is_empty());
    }

    #[test]
    fn index_two_in_z() {
        // free group on one generator, theta(x) = 1 mod 2
        let pres = Presentation::new(1, vec![], vec!["x".into()]).unwrap();
        let theta = Homomorphism2Cyclic::new(2, vec![1]).unwrap();
        let sub = reidemeister_schreier(&pres, &theta).unwrap();
        assert_eq!(sub.schreier_generators.len(), 1);
        assert_eq!(sub.schreier_generators[0], Word::from_letters(vec![1, 1]));
        assert!(sub.subgroup_relators.is_empty());
        assert_eq!(sub.transversal[0], Word::empty());
    }

    #[test]
    fn schreier_generator_count() {
        for (p, h, mon) in [
            (2u64, 0usize, vec![1u64; 6]),
            (3, 0, vec![1, 1, 2, 2]),
            (2, 1, vec![1, 1]),
            (5, 0, vec![1, 1, 3]),
        ] {
            let (pres, theta) = orbifold_presentation_for_test(p, h, &mon);
            let sub = reidemeister_schreier(&pres, &theta).unwrap();
            let expected = p as usize * pres.generator_count - (p as usize - 1);
            assert_eq!(sub.schreier_generators.len(), expected);
        }
    }

    #[test]
    fn hyperelliptic_kernel_rank_four() {
        // Riemann-Hurwitz: the double cover branched in 6 points has genus 2
        let (pres, theta) = orbifold_presentation_for_test(2, 0, &[1; 6]);
        let sub = reidemeister_schreier(&pres, &theta).unwrap();
        let n = sub.schreier_generators.len();
        let cols: Vec<Vec<BigInt>> = sub.subgroup_relators.iter().map(|r| r.abelianized(n)).collect();
        let structure = cokernel(&IntMatrix::from_cols(n, &cols));
        assert_eq!(structure.free_rank, 4);
        assert!(structure.torsion.is_empty());
        let ab = sub.abelianization().unwrap();
        assert_eq!(ab.h_rank, 4);
    }

    #[test]
    fn degree_three_cover_rank_four() {
        let (pres, theta) = orbifold_presentation_for_test(3, 0, &[1, 1, 2, 2]);
        let sub = reidemeister_schreier(&pres, &theta).unwrap();
        let ab = sub.abelianization().unwrap();
        assert_eq!(ab.h_rank, 4);
    }

    #[test]
    fn rewrite_round_trips() {
        let (pres, theta) = orbifold_presentation_for_test(2, 0, &[1; 6]);
        let sub = reidemeister_schreier(&pres, &theta).unwrap();
        // the empty word
        assert!(sub.rewrite_kernel_word(&Word::empty()).unwrap().is_empty());
        // each Schreier generator rewrites to its own single letter
        for (i, g) in sub.schreier_generators.iter().enumerate() {
            let rw = sub.rewrite_kernel_word(g).unwrap();
            assert_eq!(rw, Word::from_letters(vec![i as i32 + 1]));
        }
        // c1^2 is a Schreier generator and a relator
        let c1sq = Word::generator(0).pow(2);
        let rw = sub.rewrite_kernel_word(&c1sq).unwrap();
        assert_eq!(rw.len(), 1);
        let expanded = sub.expand(&rw);
        assert_eq!(expanded, free_reduce(&c1sq));
        // words outside the kernel are rejected
        assert!(sub.rewrite_kernel_word(&Word::generator(1)).is_err());
    }

    #[test]
    fn subgroup_relators_expand_to_parent_relator_conjugates() {
        let (pres, theta) = orbifold_presentation_for_test(2, 0, &[1; 6]);
        let sub = reidemeister_schreier(&pres, &theta).unwrap();
        // regenerate the (relator, coset) pairs in construction order and
        // match each rewritten relator against the expanded conjugate
        let mut produced = sub.subgroup_relators.iter();
        for r in &pres.relators {
            for k in 0..2usize {
                let conj = r.conjugate_by(&sub.transversal[k]);
                let reduced = free_reduce(&conj);
                let rewritten = sub.rewrite_kernel_word(&conj).unwrap();
                if rewritten.is_empty() {
                    continue;
                }
                let expanded = sub.expand(produced.next().expect("relator list order"));
                assert_eq!(expanded, reduced);
            }
        }
        assert!(produced.next().is_none());
    }

    #[test]
    fn conjugation_action_is_lefschetz_consistent() {
        for (p, h, mon) in [
            (2u64, 0usize, vec![1u64; 6]),
            (3, 0, vec![1, 1, 2, 2]),
            (2, 1, vec![1, 1]),
        ] {
            let n_points = mon.len() as i64;
            let (pres, theta) = orbifold_presentation_for_test(p, h, &mon);
            let sub = reidemeister_schreier(&pres, &theta).unwrap();
            let lift = Word::generator(sub.designated);
            let sigma = conjugation_action_on_abelianization(&sub, &lift).unwrap();
            // order p, and trace(sigma^k) = 2 - |fixed points| for all k != 0
            assert!(sigma.pow(p as usize).is_identity());
            for k in 1..p as usize {
                assert_eq!(sigma.pow(k).trace(), BigInt::from(2 - n_points));
            }
        }
    }

    #[test]
    fn kernel_words_rejected_as_lifts() {
        let (pres, theta) = orbifold_presentation_for_test(2, 0, &[1; 6]);
        let sub = reidemeister_schreier(&pres, &theta).unwrap();
        let kernel_word = Word::generator(0).pow(2);
        assert!(matches!(
            conjugation_action_on_abelianization(&sub, &kernel_word),
            Err(GroupError::LiftInKernel)
        ));
    }
}

//! Geometric front end: branch data, the orbifold presentation, fixed-point
//! sections, the divisor model of the abelianised section map, and the
//! statement verifiers.
//!
//! A branch datum fixes a degree-p cyclic cover of a genus-h surface
//! branched in n points with local monodromies e_i. The pipeline builds the
//! orbifold group, extracts the surface subgroup, and wires its homology
//! into the extension and cohomology machinery. Fixed points correspond one
//! to one to the conical generators; the Lefschetz trace of the induced
//! action is checked against the fixed-point count on every build.

use crate::fpgroup::{
    conjugation_action_with, reidemeister_schreier, GroupError, Homomorphism2Cyclic,
    KernelAbelianization, Presentation, SubgroupData, Word,
};
use crate::gcohom::{CohClass, CohomError, GModule};
use crate::jaclattice::{component_group_order, expected_order, GLattice};
use crate::linalg::{FpMat, IntMatrix};
use crate::nilq::{build_class2, Class2Element, Class2Error};
use crate::sections::{
    lifts_to_level2, Level1Extension, Level2Extension, ReducedLevel2, SectionError, SectionRep,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BranchDataError {
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("monodromy {value} at position {index} is not a unit modulo p")]
    MonodromyOutOfRange { index: usize, value: u64 },
    #[error("monodromies sum to {sum} mod p, expected 0")]
    MonodromySum { sum: u64 },
    #[error("expected {expected} handle images, got {got}")]
    HandleCount { expected: usize, got: usize },
    #[error("images do not generate Z/p")]
    NotSurjective,
    #[error("cover genus {0} is smaller than 1")]
    GenusTooSmall(i64),
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Branch(#[from] BranchDataError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Class2(#[from] Class2Error),
    #[error(transparent)]
    Section(#[from] SectionError),
    #[error(transparent)]
    Cohom(#[from] CohomError),
    #[error("verifier not applicable: {0}")]
    NotApplicable(&'static str),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// The geometric input: a prime-order cyclic cover described by its
/// quotient genus, local monodromies at the branch points, and the images
/// of the handle generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchData {
    pub p: u64,
    pub quotient_genus: usize,
    pub monodromies: Vec<u64>,
    pub handle_images: Vec<u64>,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl BranchData {
    pub fn new(
        p: u64,
        quotient_genus: usize,
        monodromies: Vec<u64>,
        handle_images: Vec<u64>,
    ) -> Result<Self, BranchDataError> {
        let data = BranchData {
            p,
            quotient_genus,
            monodromies,
            handle_images,
        };
        data.validate_and_genus()?;
        Ok(data)
    }

    pub fn n(&self) -> usize {
        self.monodromies.len()
    }

    /// Checks every invariant and returns the genus of the covering curve
    /// from the Euler characteristic relation
    /// `2 - 2g = p(2 - 2h) - n(p - 1)`.
    pub fn validate_and_genus(&self) -> Result<usize, BranchDataError> {
        if !is_prime(self.p) {
            return Err(BranchDataError::NotPrime(self.p));
        }
        for (index, &value) in self.monodromies.iter().enumerate() {
            if value == 0 || value >= self.p {
                return Err(BranchDataError::MonodromyOutOfRange { index, value });
            }
        }
        if self.handle_images.len() != 2 * self.quotient_genus {
            return Err(BranchDataError::HandleCount {
                expected: 2 * self.quotient_genus,
                got: self.handle_images.len(),
            });
        }
        let sum = self.monodromies.iter().sum::<u64>() % self.p;
        if sum != 0 {
            return Err(BranchDataError::MonodromySum { sum });
        }
        if self.monodromies.is_empty() && self.handle_images.iter().all(|&x| x % self.p == 0) {
            return Err(BranchDataError::NotSurjective);
        }
        let p = self.p as i64;
        let h = self.quotient_genus as i64;
        let n = self.monodromies.len() as i64;
        let chi = p * (2 - 2 * h) - n * (p - 1);
        debug_assert_eq!((2 - chi) % 2, 0, "cover Euler characteristic is even");
        let genus = (2 - chi) / 2;
        if genus < 1 {
            return Err(BranchDataError::GenusTooSmall(genus));
        }
        Ok(genus as usize)
    }
}

/// Labels of the fixed points, one per conical generator.
#[derive(Clone, Debug)]
pub struct FixedPointSet {
    pub labels: Vec<String>,
}

impl FixedPointSet {
    fn for_branch_count(n: usize) -> Self {
        FixedPointSet {
            labels: (1..=n).map(|i| format!("y{i}")).collect(),
        }
    }
}

/// Degree-zero divisor with F_p coefficients supported on the fixed points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpDiv0 {
    pub p: u64,
    pub coefficients: Vec<u64>,
}

impl FpDiv0 {
    pub fn new(p: u64, coefficients: Vec<u64>) -> Result<Self, BranchDataError> {
        let coefficients: Vec<u64> = coefficients.into_iter().map(|c| c % p).collect();
        let sum = coefficients.iter().sum::<u64>() % p;
        if sum != 0 {
            return Err(BranchDataError::MonodromySum { sum });
        }
        Ok(FpDiv0 { p, coefficients })
    }

    /// The divisor y_i - y_j.
    pub fn difference(p: u64, n: usize, i: usize, j: usize) -> Self {
        let mut coefficients = vec![0u64; n];
        coefficients[i] = (coefficients[i] + 1) % p;
        coefficients[j] = (coefficients[j] + p - 1) % p;
        FpDiv0 { p, coefficients }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(|&c| c == 0)
    }

    pub fn full_support(&self) -> bool {
        self.coefficients.iter().all(|&c| c != 0)
    }
}

/// Generator of the kernel of the abelianised section map on divisors.
#[derive(Clone, Debug)]
pub struct KernelR {
    pub generator: FpDiv0,
}

/// Standard presentation of the orbifold group: generators a_1, b_1, ...,
/// a_h, b_h, c_1, ..., c_n; relators c_i^p and the long product of handle
/// commutators and conical generators.
pub fn orbifold_presentation(
    data: &BranchData,
) -> Result<(Presentation, Homomorphism2Cyclic), PipelineError> {
    data.validate_and_genus()?;
    let h = data.quotient_genus;
    let n = data.n();
    let count = 2 * h + n;
    let mut labels = Vec::with_capacity(count);
    for i in 0..h {
        labels.push(format!("a{}", i + 1));
        labels.push(format!("b{}", i + 1));
    }
    for i in 0..n {
        labels.push(format!("c{}", i + 1));
    }
    let mut relators = Vec::with_capacity(n + 1);
    for i in 0..n {
        relators.push(Word::generator(2 * h + i).pow(data.p as i64));
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
    let pres = Presentation::new(count, relators, labels)?;
    let mut images = data.handle_images.clone();
    images.extend_from_slice(&data.monodromies);
    let theta = Homomorphism2Cyclic::new(data.p, images)?;
    Ok((pres, theta))
}

fn inv_mod(a: u64, p: u64) -> u64 {
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

/// Everything computed once per branch datum: presentation, subgroup,
/// action, level-1 extension and the fixed-point sections.
pub struct CurveContext {
    pub data: BranchData,
    pub genus: usize,
    pub fixed_points: FixedPointSet,
    pub presentation: Presentation,
    pub theta: Homomorphism2Cyclic,
    pub sub: SubgroupData,
    pub ab: KernelAbelianization,
    pub sigma: IntMatrix,
    pub ext1: Level1Extension,
    /// level-1 fixed-point sections, one per branch point
    pub fixed_sections: Vec<SectionRep>,
    /// H^1 coordinates of the difference class of each fixed-point section
    /// against the designated base (the first fixed point)
    pub section_coords: Vec<Vec<u64>>,
}

impl CurveContext {
    pub fn build(data: &BranchData) -> Result<Self, PipelineError> {
        let genus = data.validate_and_genus()?;
        let (presentation, theta) = orbifold_presentation(data)?;
        let sub = reidemeister_schreier(&presentation, &theta)?;
        let ab = sub.abelianization()?;
        if ab.h_rank != 2 * genus {
            return Err(PipelineError::Internal(format!(
                "homology rank {} does not match twice the genus {}",
                ab.h_rank, genus
            )));
        }
        let t = Word::generator(sub.designated);
        let sigma = conjugation_action_with(&sub, &ab, &t)?;
        let p = data.p;
        let n = data.n();
        // Lefschetz consistency: every nontrivial power has trace 2 - n
        let expected_trace = BigInt::from(2i64 - n as i64);
        for k in 1..p as usize {
            if sigma.pow(k).trace() != expected_trace {
                return Err(PipelineError::Internal(format!(
                    "trace of the action power {k} does not equal 2 - {n}"
                )));
            }
        }
        let h_module = GModule::lattice(p, sigma.clone())?;
        let t_power = sub.rewrite_kernel_word(&t.pow(p as i64))?;
        let cocycle_elt = ab.class_of(&t_power);
        let ext1 = Level1Extension::new(h_module, cocycle_elt)?;

        let mut ctx = CurveContext {
            data: data.clone(),
            genus,
            fixed_points: FixedPointSet::for_branch_count(n),
            presentation,
            theta,
            sub,
            ab,
            sigma,
            ext1,
            fixed_sections: Vec::new(),
            section_coords: Vec::new(),
        };
        let mut fixed_sections = Vec::with_capacity(n);
        for i in 0..n {
            let parts = ctx.fixed_point_words(i, p as usize, |w| {
                let (h, _) = ctx.level1_of_word(w)?;
                Ok(h)
            })?;
            let section = SectionRep { parts };
            if !ctx.ext1.is_section(&section) {
                return Err(PipelineError::Internal(format!(
                    "fixed-point images for y{} are not multiplicative",
                    i + 1
                )));
            }
            fixed_sections.push(section);
        }
        ctx.fixed_sections = fixed_sections;
        let mut section_coords = Vec::with_capacity(n);
        for i in 0..n {
            let d = ctx
                .ext1
                .difference_class(&ctx.fixed_sections[i], &ctx.fixed_sections[0])?;
            let coords = ctx.ext1.class_coords(&d);
            section_coords.push(coords_to_u64(&coords));
        }
        ctx.section_coords = section_coords;
        Ok(ctx)
    }

    pub fn n(&self) -> usize {
        self.data.n()
    }

    pub fn p(&self) -> u64 {
        self.data.p
    }

    /// F_p-dimension of H^1(G, H).
    pub fn h1_dimension(&self) -> usize {
        self.ext1.h1_group.coords_len()
    }

    fn word_c(&self, i: usize) -> Word {
        Word::generator(2 * self.data.quotient_genus + i)
    }

    /// Exponent m_i with psi(c_i^{m_i}) equal to the distinguished
    /// generator of G.
    fn section_exponent(&self, i: usize) -> u64 {
        let p = self.data.p;
        let t_value = self.theta.images[self.sub.designated];
        t_value * inv_mod(self.data.monodromies[i], p) % p
    }

    fn fixed_point_words<T>(
        &self,
        i: usize,
        p: usize,
        mut f: impl FnMut(&Word) -> Result<T, PipelineError>,
    ) -> Result<Vec<T>, PipelineError> {
        let m = self.section_exponent(i);
        let c = self.word_c(i);
        (0..p)
            .map(|k| f(&c.pow((m * k as u64) as i64)))
            .collect()
    }

    /// (kernel class, grade) coordinates of an arbitrary orbifold word in
    /// the level-1 extension.
    fn level1_of_word(&self, w: &Word) -> Result<(Vec<BigInt>, usize), PipelineError> {
        let v = self.theta.apply(w);
        let k = self.sub.coset_power_of_value(v);
        let t = Word::generator(self.sub.designated);
        let u = w.concat(&t.pow(k as i64).inverse());
        let rw = self.sub.rewrite_kernel_word(&u)?;
        Ok((self.ab.class_of(&rw), k))
    }

    /// The level-1 section fixing the i-th fixed point (0-based).
    pub fn fixed_point_section(&self, i: usize) -> &SectionRep {
        &self.fixed_sections[i]
    }

    /// The abelianised section map on a degree-zero divisor: expand in
    /// differences against the base point and sum the difference classes.
    pub fn s_ab(&self, d: &FpDiv0) -> Result<CohClass, PipelineError> {
        if self.n() < 2 {
            return Err(PipelineError::NotApplicable(
                "divisor map needs at least two fixed points",
            ));
        }
        assert_eq!(d.coefficients.len(), self.n());
        assert_eq!(d.p, self.data.p);
        let ncoords = self.ext1.module.ncoords;
        let base = &self.fixed_sections[0].parts[1];
        let mut rep = vec![BigInt::zero(); ncoords];
        for (i, &c) in d.coefficients.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let c = BigInt::from(c);
            for ((r, a), b) in rep
                .iter_mut()
                .zip(self.fixed_sections[i].parts[1].iter())
                .zip(base.iter())
            {
                *r += &c * (a - b);
            }
        }
        Ok(self.ext1.module.coh_class(1, rep)?)
    }

    pub fn s_ab_coords(&self, d: &FpDiv0) -> Result<Vec<u64>, PipelineError> {
        let class = self.s_ab(d)?;
        Ok(coords_to_u64(&self.ext1.class_coords(&class)))
    }

    /// Matrix of the divisor map over F_p: column i is the class of
    /// y_i - y_1.
    fn s_ab_matrix(&self) -> FpMat {
        let p = self.data.p;
        let dim = self.h1_dimension();
        let n = self.n();
        FpMat::from_fn(p, dim, n, |r, c| self.section_coords[c][r])
    }

    /// The kernel of the divisor map: asserted one-dimensional with full
    /// support.
    pub fn kernel_r(&self) -> Result<KernelR, PipelineError> {
        if self.n() < 2 {
            return Err(PipelineError::NotApplicable(
                "kernel needs at least two fixed points",
            ));
        }
        let p = self.data.p;
        let n = self.n();
        let m = self.s_ab_matrix();
        // restrict to degree-zero divisors by stacking the all-ones row
        let stacked = FpMat::from_fn(p, m.rows() + 1, n, |r, c| {
            if r < m.rows() {
                m.get(r, c)
            } else {
                1
            }
        });
        let kernel = stacked.nullspace();
        if kernel.len() != 1 {
            return Err(PipelineError::Internal(format!(
                "divisor-map kernel has dimension {}, expected 1",
                kernel.len()
            )));
        }
        let mut gen = kernel[0].clone();
        // normalize: first nonzero coefficient equal to 1
        let lead = gen.iter().find(|&&c| c != 0).copied().unwrap_or(0);
        if lead != 0 {
            let s = inv_mod(lead, p);
            for c in gen.iter_mut() {
                *c = *c * s % p;
            }
        }
        let divisor = FpDiv0::new(p, gen).map_err(PipelineError::Branch)?;
        if !divisor.full_support() {
            return Err(PipelineError::Internal(
                "divisor-map kernel generator does not have full support".into(),
            ));
        }
        Ok(KernelR { generator: divisor })
    }

    /// Surjectivity and kernel shape of the divisor map against the
    /// independently computed H^1.
    pub fn verify_divisor_map(&self) -> Result<SurjectivityReport, PipelineError> {
        if self.n() < 2 {
            return Err(PipelineError::NotApplicable(
                "divisor-map verification needs n >= 2",
            ));
        }
        let dim = self.h1_dimension();
        let elementary = self
            .ext1
            .h1_group
            .structure()
            .is_elementary_abelian(self.data.p);
        let rank = self.s_ab_matrix().rank();
        let surjective = elementary && rank == dim;
        let dimension_matches = dim == self.n() - 2;
        let kernel = self.kernel_r();
        let (kernel_ok, generator) = match kernel {
            Ok(k) => (true, Some(k.generator)),
            Err(_) => (false, None),
        };
        Ok(SurjectivityReport {
            pass: surjective && dimension_matches && kernel_ok,
            h1_dimension: dim,
            map_rank: rank,
            dimension_matches,
            kernel_generator: generator,
        })
    }

    /// Pairwise distinctness of the fixed-point classes against the
    /// predicted injectivity criterion (two fixed points collapse, more
    /// never do).
    pub fn verify_fixed_point_injectivity(&self) -> Result<InjectivityReport, PipelineError> {
        let n = self.n();
        if n < 2 {
            return Err(PipelineError::NotApplicable(
                "injectivity verification needs n >= 2",
            ));
        }
        let mut injective = true;
        let mut collisions = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let d = FpDiv0::difference(self.data.p, n, i, j);
                let coords = self.s_ab_coords(&d)?;
                if coords.iter().all(|&c| c == 0) {
                    injective = false;
                    collisions.push((i + 1, j + 1));
                }
            }
        }
        let expected = n != 2;
        Ok(InjectivityReport {
            pass: injective == expected,
            injective,
            expected,
            collisions,
        })
    }

    /// Builds the level-2 extension with the base splitting at the first
    /// fixed point, plus its finite mod-p^3 engine.
    pub fn level2(&self) -> Result<(Level2Extension, ReducedLevel2), PipelineError> {
        if self.n() == 0 {
            return Err(PipelineError::NotApplicable(
                "level-2 base splitting needs a fixed point",
            ));
        }
        let quotient = build_class2(&self.sub, &self.sigma)?;
        let mut ext2 = Level2Extension::new(&self.sub, quotient)?;
        let p = self.data.p as usize;
        let base = self.fixed_point_words(0, p, |w| self.level2_of_word(&ext2, w))?;
        ext2.set_base_section(base)?;
        let reduced = ReducedLevel2::new(&ext2);
        Ok((ext2, reduced))
    }

    fn level2_of_word(
        &self,
        ext2: &Level2Extension,
        w: &Word,
    ) -> Result<Class2Element, PipelineError> {
        let v = self.theta.apply(w);
        let k = self.sub.coset_power_of_value(v);
        let t = Word::generator(self.sub.designated);
        let u = w.concat(&t.pow(k as i64).inverse());
        let rw = self.sub.rewrite_kernel_word(&u)?;
        Ok(ext2.quotient.class_of_schreier_word(&rw))
    }

    /// Level-2 images of the i-th fixed-point section.
    pub fn fixed_point_section_level2(
        &self,
        ext2: &Level2Extension,
        i: usize,
    ) -> Result<Vec<Class2Element>, PipelineError> {
        let p = self.data.p as usize;
        let parts = self.fixed_point_words(i, p, |w| self.level2_of_word(ext2, w))?;
        if !ext2.is_section2(&parts) {
            return Err(PipelineError::Internal(format!(
                "level-2 images for y{} are not multiplicative",
                i + 1
            )));
        }
        Ok(parts)
    }

    /// The level-2 statement for involutions: the image of the fixed-point
    /// section map equals the set of liftable classes, computed three ways
    /// (boundary obstruction, witness search, and the basis classification).
    pub fn verify_liftable_classes(&self) -> Result<LiftableReport, PipelineError> {
        if self.data.p != 2 {
            return Err(PipelineError::NotApplicable(
                "the level-2 statement is verified for p = 2",
            ));
        }
        if self.n() < 2 {
            return Err(PipelineError::NotApplicable(
                "the level-2 statement needs fixed points",
            ));
        }
        let (ext2, reduced) = self.level2()?;
        let n = self.n();
        let h1 = &self.ext1.h1_group;
        let all_coords = h1
            .enumerate_coords()
            .expect("H^1 is a small elementary abelian group");
        let class_count = all_coords.len();

        let mut liftable = BTreeSet::new();
        let mut witness_liftable = BTreeSet::new();
        for coords in &all_coords {
            let rep = h1.rep_from_coords(coords);
            let y = self.ext1.module.coh_class(1, rep)?;
            let result = lifts_to_level2(&ext2, &reduced, &y)?;
            let key = key_of(&coords_to_u64(coords));
            if result.liftable {
                liftable.insert(key.clone());
            }
            if result.witness.is_some() {
                witness_liftable.insert(key);
            }
        }

        let image: BTreeSet<String> = self.section_coords.iter().map(|c| key_of(c)).collect();

        // predicted classification: zero, the basis classes of the first
        // n - 2 differences, and their full sum
        let dim = self.h1_dimension();
        let p = self.data.p;
        let mut predicted = BTreeSet::new();
        predicted.insert(key_of(&vec![0; dim]));
        let mut full = vec![0u64; dim];
        for i in 1..n - 1 {
            predicted.insert(key_of(&self.section_coords[i]));
            for (f, c) in full.iter_mut().zip(self.section_coords[i].iter()) {
                *f = (*f + c) % p;
            }
        }
        predicted.insert(key_of(&full));

        let pass = liftable == witness_liftable && liftable == image && liftable == predicted;
        Ok(LiftableReport {
            pass,
            class_count,
            liftable: liftable.into_iter().collect(),
            image: image.into_iter().collect(),
            predicted: predicted.into_iter().collect(),
        })
    }

    /// For free actions: the level-1 splitting obstruction must be nonzero,
    /// confirmed by the exhaustive splitting search.
    pub fn verify_free_action(&self) -> Result<FreeActionReport, PipelineError> {
        if self.n() != 0 {
            return Err(PipelineError::NotApplicable(
                "the free-action check applies to n = 0",
            ));
        }
        let (_, coords) = self.ext1.splitting_obstruction();
        let obstruction_nonzero = coords.iter().any(|c| !c.is_zero());
        let search_found_section = self.ext1.splitting_search();
        Ok(FreeActionReport {
            pass: obstruction_nonzero && !search_found_section,
            obstruction_nonzero,
            search_found_section,
        })
    }

    /// Component group of the fixed locus on the Jacobian against the
    /// divisor-model count and the section count.
    pub fn jacobian_crosscheck(&self) -> Result<JacobianReport, PipelineError> {
        if self.n() < 2 {
            return Err(PipelineError::NotApplicable(
                "component-group comparison needs n >= 2",
            ));
        }
        let lattice = GLattice::new(self.data.p, self.sigma.clone())?;
        let order = component_group_order(&lattice);
        let expected = expected_order(self.data.p, self.n());
        let classes = self.ext1.enumerate_section_classes()?;
        let pass = order == expected && BigInt::from(classes.len()) == order;
        Ok(JacobianReport {
            pass,
            order: order.to_string(),
            expected: expected.to_string(),
            section_classes: classes.len(),
        })
    }

    /// Number of conjugacy classes of level-1 sections, when the extension
    /// splits.
    pub fn section_class_count(&self) -> Result<usize, PipelineError> {
        Ok(self.ext1.enumerate_section_classes()?.len())
    }
}

fn coords_to_u64(coords: &[BigInt]) -> Vec<u64> {
    coords
        .iter()
        .map(|c| {
            let v: u64 = c.try_into().expect("canonical residues are small");
            v
        })
        .collect()
}

fn key_of(coords: &[u64]) -> String {
    coords
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join("")
}

#[derive(Clone, Debug)]
pub struct SurjectivityReport {
    pub pass: bool,
    pub h1_dimension: usize,
    pub map_rank: usize,
    pub dimension_matches: bool,
    pub kernel_generator: Option<FpDiv0>,
}

#[derive(Clone, Debug)]
pub struct InjectivityReport {
    pub pass: bool,
    pub injective: bool,
    pub expected: bool,
    pub collisions: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct LiftableReport {
    pub pass: bool,
    pub class_count: usize,
    pub liftable: Vec<String>,
    pub image: Vec<String>,
    pub predicted: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct FreeActionReport {
    pub pass: bool,
    pub obstruction_nonzero: bool,
    pub search_found_section: bool,
}

#[derive(Clone, Debug)]
pub struct JacobianReport {
    pub pass: bool,
    pub order: String,
    pub expected: String,
    pub section_classes: usize,
}

#[derive(Clone, Debug)]
pub struct QuadraticityReport {
    pub pass: bool,
    pub pairs_checked: usize,
    pub failures: usize,
    pub exhaustive: bool,
}

/// Checks the quadratic expansion of the boundary obstruction,
/// `delta2(y + z) = delta2(y) + delta2(z) + (y cup z)`, over all pairs of
/// H^1 classes (or a seeded sample when the group is large). Classes are
/// compared in the cohomology of the mod-p^3 layer, where the integral
/// obstruction group embeds.
///
/// The obstruction only depends on the class, so its values are cached per
/// class; the cup term is bilinear, so it is expanded over a basis table.
pub fn quadraticity_check(
    ctx: &CurveContext,
    samples: usize,
    seed: u64,
) -> Result<QuadraticityReport, PipelineError> {
    if ctx.n() == 0 {
        return Err(PipelineError::NotApplicable(
            "quadraticity needs a base splitting",
        ));
    }
    let (_, reduced) = ctx.level2()?;
    let h1 = &ctx.ext1.h1_group;
    let order = h1
        .structure()
        .order()
        .expect("H^1 of the surface lattice is finite");
    let exhaustive = order <= BigInt::from(256);
    let invariants = reduced.h2_layer_red.invariants();
    let p = ctx.p();
    let dim = h1.coords_len();
    let basis_reps: Vec<Vec<BigInt>> = h1.reps().to_vec();

    // cup classes of all basis pairs; the cup of two classes expands
    // bilinearly over this table
    let cup_table: Vec<Vec<Vec<BigInt>>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| reduced.cup_red_coords(&basis_reps[i], &basis_reps[j]))
                .collect()
        })
        .collect();
    let cup_of = |a: &[u64], b: &[u64]| -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); invariants.len()];
        for i in 0..dim {
            if a[i] == 0 {
                continue;
            }
            for j in 0..dim {
                if b[j] == 0 {
                    continue;
                }
                let c = BigInt::from(a[i] * b[j]);
                for (o, v) in out.iter_mut().zip(cup_table[i][j].iter()) {
                    *o += &c * v;
                }
            }
        }
        out
    };

    let mut delta_cache: std::collections::BTreeMap<Vec<u64>, Vec<BigInt>> =
        std::collections::BTreeMap::new();
    let mut delta_of = |coords: &[u64]| -> Vec<BigInt> {
        if let Some(v) = delta_cache.get(coords) {
            return v.clone();
        }
        let big: Vec<BigInt> = coords.iter().map(|&c| BigInt::from(c)).collect();
        let rep = h1.rep_from_coords(&big);
        let v = reduced.delta2_red_coords(&rep);
        delta_cache.insert(coords.to_vec(), v.clone());
        v
    };

    let mut pairs_checked = 0usize;
    let mut failures = 0usize;
    let mut check_pair = |a: &[u64], b: &[u64]| -> bool {
        let sum: Vec<u64> = a.iter().zip(b.iter()).map(|(x, y)| (x + y) % p).collect();
        let lhs = delta_of(&sum);
        let da = delta_of(a);
        let db = delta_of(b);
        let cup = cup_of(a, b);
        for i in 0..lhs.len() {
            let mut rhs = &da[i] + &db[i] + &cup[i];
            if !invariants[i].is_zero() {
                rhs = rhs.mod_floor(&invariants[i]);
            }
            if lhs[i] != rhs {
                return false;
            }
        }
        true
    };

    if exhaustive {
        let all: Vec<Vec<u64>> = h1
            .enumerate_coords()
            .expect("small group")
            .iter()
            .map(|c| c.iter().map(|x| u64::try_from(x).expect("residue")).collect())
            .collect();
        for a in &all {
            for b in &all {
                pairs_checked += 1;
                if !check_pair(a, b) {
                    failures += 1;
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let a: Vec<u64> = (0..dim).map(|_| rng.gen_range(0..p)).collect();
            let b: Vec<u64> = (0..dim).map(|_| rng.gen_range(0..p)).collect();
            pairs_checked += 1;
            if !check_pair(&a, &b) {
                failures += 1;
            }
        }
    }
    Ok(QuadraticityReport {
        pass: failures == 0,
        pairs_checked,
        failures,
        exhaustive,
    })
}


#[cfg(test)]
mod tests {
    use super::*;

    fn hyperelliptic() -> BranchData {
        BranchData::new(2, 0, vec![1; 6], vec![]).unwrap()
    }

    #[test]
    fn genus_formula_examples() {
        assert_eq!(
            BranchData::new(2, 1, vec![1, 1], vec![0, 0]).unwrap().validate_and_genus().unwrap(),
            2
        );
        assert_eq!(hyperelliptic().validate_and_genus().unwrap(), 2);
        assert_eq!(
            BranchData::new(3, 0, vec![1, 1, 2, 2], vec![]).unwrap().validate_and_genus().unwrap(),
            2
        );
    }

    #[test]
    fn validation_rejections() {
        // monodromy sum 1+1+2 = 4 = 1 mod 3
        assert!(matches!(
            BranchData::new(3, 0, vec![1, 1, 2], vec![]),
            Err(BranchDataError::MonodromySum { .. })
        ));
        // zero monodromy
        assert!(matches!(
            BranchData::new(3, 0, vec![0, 1, 2], vec![]),
            Err(BranchDataError::MonodromyOutOfRange { .. })
        ));
        // not prime
        assert!(matches!(
            BranchData::new(4, 0, vec![1, 1, 1, 1], vec![]),
            Err(BranchDataError::NotPrime(4))
        ));
        // genus 0 cover: double cover of the sphere branched twice
        assert!(matches!(
            BranchData::new(2, 0, vec![1, 1], vec![]),
            Err(BranchDataError::GenusTooSmall(0))
        ));
        // no surjection for a free datum with zero handle images
        assert!(matches!(
            BranchData::new(2, 1, vec![], vec![0, 0]),
            Err(BranchDataError::NotSurjective)
        ));
        // wrong handle count
        assert!(matches!(
            BranchData::new(2, 1, vec![1, 1], vec![0]),
            Err(BranchDataError::HandleCount { .. })
        ));
    }

    #[test]
    fn presentation_shapes() {
        let (pres, theta) = orbifold_presentation(&hyperelliptic()).unwrap();
        assert_eq!(pres.generator_count, 6);
        assert_eq!(pres.relators.len(), 7);
        assert_eq!(theta.images, vec![1; 6]);
        let free = BranchData::new(2, 2, vec![], vec![1, 0, 0, 0]).unwrap();
        let (pres, theta) = orbifold_presentation(&free).unwrap();
        assert_eq!(pres.generator_count, 4);
        assert_eq!(pres.relators.len(), 1);
        assert_eq!(theta.images, vec![1, 0, 0, 0]);
    }

    #[test]
    fn hyperelliptic_pipeline() {
        let ctx = CurveContext::build(&hyperelliptic()).unwrap();
        assert_eq!(ctx.genus, 2);
        assert_eq!(ctx.h1_dimension(), 4);
        assert_eq!(ctx.section_class_count().unwrap(), 16);
        let divisor_report = ctx.verify_divisor_map().unwrap();
        assert!(divisor_report.pass, "{divisor_report:?}");
        assert_eq!(divisor_report.map_rank, 4);
        let injectivity_report = ctx.verify_fixed_point_injectivity().unwrap();
        assert!(injectivity_report.pass && injectivity_report.injective);
        let jac = ctx.jacobian_crosscheck().unwrap();
        assert!(jac.pass, "{jac:?}");
        assert_eq!(jac.order, "16");
        // kernel of the divisor map: the all-ones divisor
        let k = ctx.kernel_r().unwrap();
        assert_eq!(k.generator.coefficients, vec![1; 6]);
    }

    #[test]
    fn two_fixed_points_collapse() {
        let data = BranchData::new(2, 1, vec![1, 1], vec![0, 0]).unwrap();
        let ctx = CurveContext::build(&data).unwrap();
        assert_eq!(ctx.h1_dimension(), 0);
        assert_eq!(ctx.section_class_count().unwrap(), 1);
        let injectivity_report = ctx.verify_fixed_point_injectivity().unwrap();
        assert!(injectivity_report.pass && !injectivity_report.injective, "{injectivity_report:?}");
        let divisor_report = ctx.verify_divisor_map().unwrap();
        assert!(divisor_report.pass, "{divisor_report:?}");
    }

    #[test]
    fn degree_three_pipeline() {
        let data = BranchData::new(3, 0, vec![1, 1, 2, 2], vec![]).unwrap();
        let ctx = CurveContext::build(&data).unwrap();
        assert_eq!(ctx.h1_dimension(), 2);
        assert_eq!(ctx.section_class_count().unwrap(), 9);
        let divisor_report = ctx.verify_divisor_map().unwrap();
        assert!(divisor_report.pass, "{divisor_report:?}");
        let injectivity_report = ctx.verify_fixed_point_injectivity().unwrap();
        assert!(injectivity_report.pass && injectivity_report.injective);
        let k = ctx.kernel_r().unwrap();
        assert!(k.generator.full_support());
        let jac = ctx.jacobian_crosscheck().unwrap();
        assert!(jac.pass);
        assert_eq!(jac.order, "9");
    }

    #[test]
    fn free_action_obstruction() {
        for p in [2u64, 3] {
            let mut handles = vec![0u64; 4];
            handles[0] = 1;
            let data = BranchData::new(p, 2, vec![], handles).unwrap();
            let ctx = CurveContext::build(&data).unwrap();
            let report = ctx.verify_free_action().unwrap();
            assert!(report.pass, "{report:?}");
        }
    }

    #[test]
    fn fixed_point_data_has_zero_obstruction() {
        let ctx = CurveContext::build(&hyperelliptic()).unwrap();
        let (_, coords) = ctx.ext1.splitting_obstruction();
        assert!(coords.iter().all(|c| c.is_zero()));
    }

    #[test]
    fn divisor_map_linearity() {
        let ctx = CurveContext::build(&hyperelliptic()).unwrap();
        let p = 2;
        let d1 = FpDiv0::difference(p, 6, 1, 0);
        let d2 = FpDiv0::difference(p, 6, 3, 2);
        let sum = FpDiv0::new(
            p,
            d1.coefficients
                .iter()
                .zip(d2.coefficients.iter())
                .map(|(a, b)| (a + b) % p)
                .collect(),
        )
        .unwrap();
        let c1 = ctx.s_ab_coords(&d1).unwrap();
        let c2 = ctx.s_ab_coords(&d2).unwrap();
        let cs = ctx.s_ab_coords(&sum).unwrap();
        let combined: Vec<u64> = c1.iter().zip(c2.iter()).map(|(a, b)| (a + b) % p).collect();
        assert_eq!(cs, combined);
        let zero = FpDiv0::new(p, vec![0; 6]).unwrap();
        assert!(ctx.s_ab_coords(&zero).unwrap().iter().all(|&c| c == 0));
    }

    #[test]
    fn hyperelliptic_liftable_classes() {
        let ctx = CurveContext::build(&hyperelliptic()).unwrap();
        let report = ctx.verify_liftable_classes().unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.class_count, 16);
        assert_eq!(report.liftable.len(), 6, "zero, four basis classes, full sum");
    }

    #[test]
    fn small_liftable_cases() {
        // two fixed points: the single class lifts
        let data = BranchData::new(2, 1, vec![1, 1], vec![0, 0]).unwrap();
        let ctx = CurveContext::build(&data).unwrap();
        let report = ctx.verify_liftable_classes().unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.class_count, 1);
        assert_eq!(report.liftable.len(), 1);
        // four fixed points on the genus-1 cover: every class lifts
        let data = BranchData::new(2, 0, vec![1; 4], vec![]).unwrap();
        let ctx = CurveContext::build(&data).unwrap();
        let report = ctx.verify_liftable_classes().unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.class_count, 4);
        assert_eq!(report.liftable.len(), 4);
    }

    #[test]
    fn boundary_obstruction_examples() {
        let ctx = CurveContext::build(&hyperelliptic()).unwrap();
        let (ext2, _) = ctx.level2().unwrap();
        let module = &ctx.ext1.module;
        let zero_rep = vec![BigInt::from(0); 4];

        // the trivial class lifts: the base splitting is its own lift
        let zero = module.coh_class(1, zero_rep).unwrap();
        assert!(ext2.delta2_coords(&zero).iter().all(|c| c == &BigInt::from(0)));

        // every fixed-point difference class lifts
        let base = &ctx.fixed_sections[0];
        let mut diffs = Vec::new();
        for i in 0..6 {
            let d = ctx.ext1.difference_class(&ctx.fixed_sections[i], base).unwrap();
            assert!(
                ext2.delta2_coords(&d).iter().all(|c| c == &BigInt::from(0)),
                "fixed-point class {i} must lift"
            );
            diffs.push(d);
        }

        // the sum of two distinct fixed-point classes does not lift, and
        // its obstruction is exactly the cup of the two classes
        let sum_rep: Vec<BigInt> = diffs[1]
            .rep
            .iter()
            .zip(diffs[2].rep.iter())
            .map(|(a, b)| a + b)
            .collect();
        let sum = module.coh_class(1, sum_rep).unwrap();
        let obstruction = ext2.delta2_coords(&sum);
        assert!(obstruction.iter().any(|c| c != &BigInt::from(0)));
        let cup = crate::gcohom::cup_v(module, &ext2.quotient, &diffs[1], &diffs[2]).unwrap();
        assert_eq!(ext2.h2_layer.project(&cup.rep), obstruction);

        // the obstruction only depends on the class: shift the
        // representative by a coboundary
        let m: Vec<BigInt> = vec![1, -2, 0, 3].into_iter().map(BigInt::from).collect();
        let shifted_rep: Vec<BigInt> = sum
            .rep
            .iter()
            .zip(module.sigma_minus_one().mul_vec(&m).iter())
            .map(|(a, b)| a + b)
            .collect();
        let shifted = module.coh_class(1, shifted_rep).unwrap();
        assert_eq!(ext2.delta2_coords(&shifted), obstruction);
    }

    #[test]
    fn cup_bilinearity_and_antisymmetry_on_layer_classes() {
        // p = 3 so that the sign in antisymmetry is visible
        let data = BranchData::new(3, 0, vec![1, 1, 2, 2], vec![]).unwrap();
        let ctx = CurveContext::build(&data).unwrap();
        let (ext2, _) = ctx.level2().unwrap();
        let module = &ctx.ext1.module;
        let reps = ctx.ext1.h1_group.reps().to_vec();
        let zero = module.coh_class(1, vec![BigInt::from(0); module.ncoords]).unwrap();
        for a in &reps {
            let ya = module.coh_class(1, a.clone()).unwrap();
            let z = crate::gcohom::cup_v(module, &ext2.quotient, &zero, &ya).unwrap();
            assert!(ext2.h2_layer.is_zero(&z.rep), "cup with zero vanishes");
            for b in &reps {
                let yb = module.coh_class(1, b.clone()).unwrap();
                let ab = crate::gcohom::cup_v(module, &ext2.quotient, &ya, &yb).unwrap();
                let ba = crate::gcohom::cup_v(module, &ext2.quotient, &yb, &ya).unwrap();
                // the pairing is antisymmetric, which cancels the sign from
                // the odd degrees: the product is symmetric on classes
                let diff: Vec<BigInt> = ab.rep.iter().zip(ba.rep.iter()).map(|(x, y)| x - y).collect();
                assert!(ext2.h2_layer.is_zero(&diff), "bracket cup is symmetric");
            }
        }
    }

    #[test]
    fn quadraticity_small() {
        let ctx = CurveContext::build(&hyperelliptic()).unwrap();
        let report = quadraticity_check(&ctx, 0, 7).unwrap();
        assert!(report.exhaustive);
        assert!(report.pass, "{report:?}");
        assert_eq!(report.pairs_checked, 256);
    }

    #[test]
    fn quadraticity_odd_primes() {
        // argument order in the cup matters at odd p; p = 2 cannot see it
        let data = BranchData::new(3, 0, vec![1, 1, 2, 2], vec![]).unwrap();
        let ctx = CurveContext::build(&data).unwrap();
        let report = quadraticity_check(&ctx, 0, 7).unwrap();
        assert!(report.exhaustive);
        assert!(report.pass, "{report:?}");
        assert_eq!(report.pairs_checked, 81);

        let data = BranchData::new(5, 0, vec![1, 1, 3], vec![]).unwrap();
        let ctx = CurveContext::build(&data).unwrap();
        let report = quadraticity_check(&ctx, 0, 7).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.pairs_checked, 25);
    }

    #[test]
    fn degree_five_pipeline() {
        let data = BranchData::new(5, 0, vec![1, 1, 3], vec![]).unwrap();
        let ctx = CurveContext::build(&data).unwrap();
        assert_eq!(ctx.genus, 2);
        assert_eq!(ctx.h1_dimension(), 1);
        assert_eq!(ctx.section_class_count().unwrap(), 5);
        assert!(ctx.verify_divisor_map().unwrap().pass);
        assert!(ctx.verify_fixed_point_injectivity().unwrap().pass);
        assert!(ctx.jacobian_crosscheck().unwrap().pass);
    }
}

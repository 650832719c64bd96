//! Modules over the integral group ring of a finite abelian group, and
//! their Σ-torsion: elements killed by a group-ring element whose
//! augmentation is invertible in the coefficient ring.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::zlinalg::{
    factorize, lattice_intersection, lattice_preimage, left_kernel, row_lattice_basis,
    AbelianInvariants, IntMatrix, QuotientGroup, RSpec,
};

/// `⊕ Z/d_i` with elements stored as tuples in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAbelianGroup {
    moduli: Vec<u64>,
    order: usize,
}

impl FiniteAbelianGroup {
    pub fn new(moduli: Vec<u64>) -> Self {
        assert!(moduli.iter().all(|&d| d >= 1));
        let order = moduli.iter().product::<u64>() as usize;
        FiniteAbelianGroup { moduli, order }
    }

    pub fn trivial() -> Self {
        Self::new(Vec::new())
    }

    pub fn from_invariants(a: &AbelianInvariants) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::UnsupportedQuotient(format!("{a} is infinite")));
        }
        Ok(Self::new(a.torsion.clone()))
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn num_generators(&self) -> usize {
        self.moduli.len()
    }

    pub fn element(&self, mut i: usize) -> Vec<u64> {
        let mut t = vec![0u64; self.moduli.len()];
        for k in (0..self.moduli.len()).rev() {
            let d = self.moduli[k] as usize;
            t[k] = (i % d) as u64;
            i /= d;
        }
        t
    }

    pub fn index_of(&self, t: &[i64]) -> usize {
        let mut i = 0usize;
        for (k, &d) in self.moduli.iter().enumerate() {
            i = i * d as usize + t[k].rem_euclid(d as i64) as usize;
        }
        i
    }

    pub fn generator(&self, k: usize) -> usize {
        let mut t = vec![0i64; self.moduli.len()];
        t[k] = 1;
        self.index_of(&t)
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (x, y) = (self.element(a), self.element(b));
        let s: Vec<i64> = x.iter().zip(&y).map(|(p, q)| (p + q) as i64).collect();
        self.index_of(&s)
    }

    pub fn neg(&self, a: usize) -> usize {
        let s: Vec<i64> = self.element(a).iter().map(|&v| -(v as i64)).collect();
        self.index_of(&s)
    }

    pub fn element_order(&self, a: usize) -> u64 {
        self.element(a)
            .iter()
            .zip(&self.moduli)
            .fold(1u64, |acc, (&v, &d)| acc.lcm(&(d / v.gcd(&d))))
    }

    /// Elements whose order is prime to `p`.
    pub fn prime_to_part(&self, p: u64) -> Vec<usize> {
        (0..self.order).filter(|&a| self.element_order(a) % p != 0).collect()
    }
}

/// An element of `Z[A]`: coefficient of each group element by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupRingElem {
    pub coefficients: Vec<BigInt>,
}

impl GroupRingElem {
    pub fn zero(a: &FiniteAbelianGroup) -> Self {
        GroupRingElem { coefficients: vec![BigInt::zero(); a.order()] }
    }

    pub fn group_element(a: &FiniteAbelianGroup, g: usize) -> Self {
        let mut e = Self::zero(a);
        e.coefficients[g] = BigInt::one();
        e
    }

    pub fn augmentation(&self) -> BigInt {
        self.coefficients.iter().sum()
    }

    pub fn mul(&self, other: &GroupRingElem, a: &FiniteAbelianGroup) -> GroupRingElem {
        let mut out = Self::zero(a);
        for (i, x) in self.coefficients.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coefficients.iter().enumerate() {
                if !y.is_zero() {
                    out.coefficients[a.add(i, j)] += x * y;
                }
            }
        }
        out
    }

    /// Render as `3 + -1*t` using generator labels for the coordinates.
    pub fn describe(&self, a: &FiniteAbelianGroup, labels: &[String]) -> String {
        let mut terms = Vec::new();
        for (i, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let t = a.element(i);
            let mono: Vec<String> = t
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0)
                .map(|(k, &v)| {
                    let name = labels.get(k).cloned().unwrap_or_else(|| format!("a{k}"));
                    if v == 1 {
                        name
                    } else {
                        format!("{name}^{v}")
                    }
                })
                .collect();
            terms.push(match (mono.is_empty(), c.is_one()) {
                (true, _) => c.to_string(),
                (false, true) => mono.join("*"),
                (false, false) => format!("{c}*{}", mono.join("*")),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

/// Matrix of multiplication by `r` on `Z[A]` in the element basis, acting
/// on row vectors.
pub fn regular_rep(r: &GroupRingElem, a: &FiniteAbelianGroup) -> IntMatrix {
    let n = a.order();
    let mut m = IntMatrix::zeros(n, n);
    for b in 0..n {
        for (g, c) in r.coefficients.iter().enumerate() {
            if !c.is_zero() {
                *m.entry_mut(b, a.add(b, g)) += c;
            }
        }
    }
    m
}

/// A finitely generated `Z[A]`-module `Z^m / rowspan(relations)` where the
/// `k`-th generator of `A` acts by `x ↦ x T_k`.
#[derive(Clone, Debug)]
pub struct GroupRingModule {
    group: FiniteAbelianGroup,
    rank: usize,
    relations: IntMatrix,
    actions: Vec<IntMatrix>,
    labels: Vec<String>,
    quotient: QuotientGroup,
}

impl GroupRingModule {
    /// Checks that each action preserves the relations, that the actions
    /// commute and that `T_k^{d_k}` acts as the identity on the quotient.
    pub fn new(
        group: FiniteAbelianGroup,
        rank: usize,
        relations: IntMatrix,
        actions: Vec<IntMatrix>,
    ) -> Result<Self> {
        if actions.len() != group.num_generators() {
            return Err(Error::InvalidInput("one action matrix per generator is required".into()));
        }
        if actions.iter().any(|t| t.rows() != rank || t.cols() != rank)
            || (relations.rows() > 0 && relations.cols() != rank)
        {
            return Err(Error::InvalidInput("action matrix has the wrong shape".into()));
        }
        let relations = if relations.rows() == 0 { IntMatrix::zeros(0, rank) } else { relations };
        let q = QuotientGroup::new(&relations, rank);
        let in_span = |v: &[BigInt]| q.is_zero(v);
        for t in &actions {
            for r in relations.row_iter() {
                if !in_span(&t.apply_row(r)) {
                    return Err(Error::InvalidInput("action does not preserve relations".into()));
                }
            }
        }
        let basis = IntMatrix::identity(rank);
        for (k, t) in actions.iter().enumerate() {
            let mut p = IntMatrix::identity(rank);
            for _ in 0..group.moduli()[k] {
                p = p.mul(t);
            }
            for j in 0..t.cols().min(rank) {
                for s in &actions {
                    let e = basis.row(j);
                    let lhs = s.apply_row(&t.apply_row(e));
                    let rhs = t.apply_row(&s.apply_row(e));
                    let diff: Vec<BigInt> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
                    if !in_span(&diff) {
                        return Err(Error::InvalidInput("actions do not commute".into()));
                    }
                }
                let e = basis.row(j);
                let diff: Vec<BigInt> = p.apply_row(e).iter().zip(e).map(|(a, b)| a - b).collect();
                if !in_span(&diff) {
                    return Err(Error::InvalidInput("action has the wrong order".into()));
                }
            }
        }
        let labels = (0..group.num_generators()).map(|k| format!("a{k}")).collect();
        Ok(GroupRingModule { group, rank, relations, actions, labels, quotient: q })
    }

    /// `Z[A]^copies` with the regular action, modulo the `A`-orbits of the
    /// given elements.
    pub fn cyclic_presentation(
        group: FiniteAbelianGroup,
        copies: usize,
        relators: &[Vec<GroupRingElem>],
    ) -> Result<Self> {
        let n = group.order();
        let rank = n * copies;
        let mut rows = IntMatrix::zeros(0, rank);
        for r in relators {
            for g in 0..n {
                let shift = GroupRingElem::group_element(&group, g);
                let mut row = vec![BigInt::zero(); rank];
                for (c, part) in r.iter().enumerate() {
                    let prod = part.mul(&shift, &group);
                    for (i, v) in prod.coefficients.into_iter().enumerate() {
                        row[c * n + i] = v;
                    }
                }
                rows.push_row(row);
            }
        }
        let actions = (0..group.num_generators())
            .map(|k| {
                let g = GroupRingElem::group_element(&group, group.generator(k));
                let block = regular_rep(&g, &group);
                let mut t = IntMatrix::zeros(rank, rank);
                for c in 0..copies {
                    for i in 0..n {
                        for j in 0..n {
                            t.set(c * n + i, c * n + j, block.get(i, j).clone());
                        }
                    }
                }
                t
            })
            .collect();
        Self::new(group, rank, rows, actions)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        self.labels = labels;
        self
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn actions(&self) -> &[IntMatrix] {
        &self.actions
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Underlying abelian group.
    pub fn invariants(&self) -> AbelianInvariants {
        self.quotient.invariants()
    }

    /// Matrix of the group element with the given index.
    pub fn action_of(&self, g: usize) -> IntMatrix {
        let t = self.group.element(g);
        let mut m = IntMatrix::identity(self.rank);
        for (k, &e) in t.iter().enumerate() {
            for _ in 0..e {
                m = m.mul(&self.actions[k]);
            }
        }
        m
    }

    /// Matrix of a group-ring element.
    pub fn ring_action(&self, r: &GroupRingElem) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rank, self.rank);
        for (g, c) in r.coefficients.iter().enumerate() {
            if !c.is_zero() {
                m = m.add(&self.action_of(g).scale(c));
            }
        }
        m
    }

    /// Whether every generator acts as the identity on the quotient.
    pub fn has_trivial_action(&self) -> bool {
        let q = &self.quotient;
        self.actions.iter().all(|t| {
            (0..self.rank).all(|j| {
                let mut d = t.row_vec(j);
                d[j] -= 1;
                q.is_zero(&d)
            })
        })
    }

    /// Sum of the actions of the listed group elements.
    fn norm_matrix(&self, elems: &[usize]) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rank, self.rank);
        for &g in elems {
            m = m.add(&self.action_of(g));
        }
        m
    }

    fn s_torsion_lattice(&self, r: RSpec) -> IntMatrix {
        self.quotient.s_torsion_lattice(r)
    }

    /// `{x : N_B x ∈ S-torsion}` for `B` the part of `A` of order prime to
    /// `p` (all of `A` when `p` is `None`).
    fn localized_torsion_lattice(&self, p: Option<u64>) -> IntMatrix {
        let (elems, r) = match p {
            Some(p) => (self.group.prime_to_part(p), RSpec::ZLocP(p)),
            None => ((0..self.group.order()).collect(), RSpec::Q),
        };
        let norm = self.norm_matrix(&elems);
        lattice_preimage(&norm, &self.s_torsion_lattice(r))
    }

    /// Row basis of the preimage in `Z^rank` of the Σ-torsion submodule.
    pub fn sigma_torsion_lattice(&self, r: RSpec) -> Result<IntMatrix> {
        match r.validate()? {
            RSpec::ZModP(p) => Err(Error::UnsupportedCoefficients(format!(
                "Σ-torsion over Z/{p} is handled by the mod-p series"
            ))),
            RSpec::Q => Ok(self.localized_torsion_lattice(None)),
            RSpec::ZLocP(p) => Ok(self.localized_torsion_lattice(Some(p))),
            RSpec::Z => {
                // an element is Σ-torsion over Z iff it is so over every
                // localization; only primes dividing |A| or the torsion
                // order can differ from the rational answer
                let mut primes: Vec<u64> = factorize(self.group.order() as u64)
                    .into_iter()
                    .map(|(p, _)| p)
                    .collect();
                for d in self.invariants().torsion {
                    primes.extend(factorize(d).into_iter().map(|(p, _)| p));
                }
                primes.sort_unstable();
                primes.dedup();
                let mut t = self.localized_torsion_lattice(None);
                for p in primes {
                    t = lattice_intersection(&t, &self.localized_torsion_lattice(Some(p)), self.rank);
                }
                Ok(t)
            }
        }
    }

    /// Decide whether `x` is Σ-torsion directly from its annihilator ideal,
    /// returning an annihilating element with invertible augmentation.
    pub fn is_sigma_torsion(&self, x: &[BigInt], r: RSpec) -> Result<Option<GroupRingElem>> {
        let r = r.validate()?;
        if !r.is_subring_of_q() {
            return Err(Error::UnsupportedCoefficients(r.to_string()));
        }
        let n = self.group.order();
        if self.is_zero(x) {
            return Ok(Some(GroupRingElem::group_element(&self.group, 0)));
        }
        let mut stacked = IntMatrix::zeros(0, self.rank);
        for g in 0..n {
            stacked.push_row(self.action_of(g).apply_row(x));
        }
        if self.relations.rows() > 0 {
            stacked = stacked.vstack(&self.relations);
        }
        let ker = left_kernel(&stacked);
        // ε over the annihilator ideal is gZ; combine a witness with ε = g
        let mut g = BigInt::zero();
        let mut witness = vec![BigInt::zero(); n];
        for row in ker.row_iter() {
            let eps: BigInt = row[..n].iter().sum();
            if eps.is_zero() {
                continue;
            }
            let e = g.extended_gcd(&eps);
            for (w, v) in witness.iter_mut().zip(&row[..n]) {
                *w = &*w * &e.x + v * &e.y;
            }
            g = e.gcd;
        }
        if g.is_negative() {
            g = -g;
            for w in witness.iter_mut() {
                *w = -&*w;
            }
        }
        let ok = match r {
            RSpec::Q => !g.is_zero(),
            RSpec::ZLocP(p) => !g.is_zero() && !g.is_multiple_of(&BigInt::from(p)),
            RSpec::Z => g.is_one(),
            RSpec::ZModP(_) => unreachable!(),
        };
        Ok(ok.then_some(GroupRingElem { coefficients: witness }))
    }

    /// Whether `x` is zero in the module.
    pub fn is_zero(&self, x: &[BigInt]) -> bool {
        self.quotient.is_zero(x)
    }
}

/// How well a Σ-torsion quotient has been cross-checked against the
/// annihilator test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "snake_case")]
pub enum Certification {
    /// Every generator of the torsion submodule has an annihilating
    /// witness and no nonzero element of the quotient does.
    Certified,
    /// The sweep could not be completed.
    Uncertified(String),
}

impl Certification {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certification::Certified)
    }
}

/// `M / Σ-torsion` together with the torsion submodule and its check.
#[derive(Clone, Debug)]
pub struct SigmaQuotient {
    pub invariants: AbelianInvariants,
    /// Row basis of the preimage of the Σ-torsion in `Z^rank`.
    pub torsion_lattice: IntMatrix,
    pub certification: Certification,
}

/// Default bound on the number of quotient elements checked one by one.
pub const DEFAULT_SWEEP_CAP: u64 = 1_000_000;

/// Compute `M / Σ-torsion` and cross-check it with the annihilator test on
/// the torsion generators and on every element of the finite part of the
/// quotient (up to `sweep_cap` elements).
pub fn sigma_torsion_quotient(m: &GroupRingModule, r: RSpec, sweep_cap: u64) -> Result<SigmaQuotient> {
    let t = m.sigma_torsion_lattice(r)?;
    let qt = QuotientGroup::new(&t, m.rank());
    let invariants = qt.invariants();
    let certification = certify(m, r, &t, &qt, sweep_cap)?;
    Ok(SigmaQuotient { invariants, torsion_lattice: t, certification })
}

fn certify(
    m: &GroupRingModule,
    r: RSpec,
    t: &IntMatrix,
    qt: &QuotientGroup,
    sweep_cap: u64,
) -> Result<Certification> {
    for row in t.row_iter() {
        if m.is_sigma_torsion(row, r)?.is_none() {
            return Ok(Certification::Uncertified(
                "a torsion generator has no annihilating witness".into(),
            ));
        }
    }
    // every Σ-torsion element has torsion image under the full norm, so
    // the true torsion lies in the rational lattice; if that has the same
    // rank, all candidates are torsion in the quotient and get swept
    let rational = m.localized_torsion_lattice(None);
    let rank_t = row_lattice_basis(t, m.rank()).rows();
    if rational.rows() != rank_t {
        return Ok(Certification::Uncertified(
            "quotient has free directions not covered by the sweep".into(),
        ));
    }
    let Some(elems) = qt.torsion_elements(sweep_cap) else {
        return Ok(Certification::Uncertified(format!(
            "finite part of the quotient exceeds {sweep_cap} elements"
        )));
    };
    for x in elems.iter().skip(1) {
        if m.is_sigma_torsion(x, r)?.is_some() {
            return Ok(Certification::Uncertified(
                "a nonzero quotient element is Σ-torsion".into(),
            ));
        }
    }
    Ok(Certification::Certified)
}

/// Σ-torsion quotient when `A` acts trivially: the Σ-torsion is the
/// S-torsion, since `s` acts as `ε(s)`.
pub fn trivial_action_quotient(invariants: &AbelianInvariants, r: RSpec) -> Result<AbelianInvariants> {
    crate::zlinalg::s_torsion_quotient(invariants, r)
}

/// Small integers as `BigInt` vectors.
pub fn big_vec(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// `ε` of a witness as `i64`, for reports.
pub fn augmentation_i64(w: &GroupRingElem) -> Option<i64> {
    w.augmentation().to_i64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn zpz2_module(p: i64) -> GroupRingModule {
        // Z/p with the generator of Z/2 acting by -1
        GroupRingModule::new(
            FiniteAbelianGroup::new(vec![2]),
            1,
            IntMatrix::from_rows(&[vec![p]]),
            vec![IntMatrix::from_rows(&[vec![-1]])],
        )
        .unwrap()
    }

    #[test]
    fn group_indexing() {
        let a = FiniteAbelianGroup::new(vec![2, 4]);
        assert_eq!(a.order(), 8);
        assert_eq!(a.element(5), vec![1, 1]);
        assert_eq!(a.index_of(&[1, 1]), 5);
        assert_eq!(a.add(5, 7), a.index_of(&[0, 0]));
        assert_eq!(a.add(5, 6), a.index_of(&[0, 3]));
        assert_eq!(a.element_order(a.index_of(&[1, 2])), 2);
        assert_eq!(a.prime_to_part(2), vec![0]);
        assert_eq!(FiniteAbelianGroup::new(vec![6]).prime_to_part(2), vec![0, 2, 4]);
    }

    #[test]
    fn regular_representation() {
        let z2 = FiniteAbelianGroup::new(vec![2]);
        let t = GroupRingElem::group_element(&z2, 1);
        assert_eq!(regular_rep(&t, &z2), IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]));
        let w = GroupRingElem { coefficients: big_vec(&[2, -1]) };
        assert_eq!(w.augmentation(), BigInt::one());
        assert_eq!(regular_rep(&w, &z2), IntMatrix::from_rows(&[vec![2, -1], vec![-1, 2]]));
        let one = GroupRingElem::group_element(&z2, 0);
        assert_eq!(regular_rep(&one, &z2), IntMatrix::identity(2));
        let zero = GroupRingElem::zero(&z2);
        assert!(zero.augmentation().is_zero());
        let a = FiniteAbelianGroup::new(vec![2, 2]);
        let d = GroupRingElem { coefficients: big_vec(&[0, 3, -3, 0]) };
        assert!(d.augmentation().is_zero());
        assert_eq!(d.describe(&a, &["x".into(), "y".into()]), "3*y + -3*x");
    }

    #[test]
    fn zero_has_trivial_witness() {
        let m = zpz2_module(5);
        let w = m.is_sigma_torsion(&big_vec(&[5]), RSpec::Q).unwrap().unwrap();
        assert_eq!(w, GroupRingElem::group_element(m.group(), 0));
    }

    proptest! {
        #[test]
        fn regular_rep_is_multiplicative(
            x in prop::collection::vec(-5i64..=5, 6),
            y in prop::collection::vec(-5i64..=5, 6),
        ) {
            let a = FiniteAbelianGroup::new(vec![6]);
            let x = GroupRingElem { coefficients: big_vec(&x) };
            let y = GroupRingElem { coefficients: big_vec(&y) };
            let prod = x.mul(&y, &a);
            prop_assert_eq!(regular_rep(&prod, &a), regular_rep(&x, &a).mul(&regular_rep(&y, &a)));
            let sum = GroupRingElem {
                coefficients: x.coefficients.iter().zip(&y.coefficients).map(|(p, q)| p + q).collect(),
            };
            prop_assert_eq!(regular_rep(&sum, &a), regular_rep(&x, &a).add(&regular_rep(&y, &a)));
            prop_assert_eq!(prod.augmentation(), x.augmentation() * y.augmentation());
        }
    }

    #[test]
    fn inverting_sign_action() {
        for p in [3, 5, 7] {
            let m = zpz2_module(p);
            let w = m.is_sigma_torsion(&big_vec(&[1]), RSpec::Z).unwrap().expect("Σ-torsion");
            assert_eq!(w.augmentation(), BigInt::one());
            assert!(m.is_zero(&m.ring_action(&w).apply_row(&big_vec(&[1]))));
            let q = sigma_torsion_quotient(&m, RSpec::Z, 100).unwrap();
            assert!(q.invariants.is_trivial());
            assert!(q.certification.is_certified());
        }
    }

    #[test]
    fn trivial_action_examples() {
        // Z/6 with trivial Z/2 action: over Z(2) the 3-part dies
        let m = GroupRingModule::new(
            FiniteAbelianGroup::new(vec![2]),
            1,
            IntMatrix::from_rows(&[vec![6]]),
            vec![IntMatrix::identity(1)],
        )
        .unwrap();
        assert!(m.has_trivial_action());
        let q = sigma_torsion_quotient(&m, RSpec::ZLocP(2), 100).unwrap();
        assert_eq!(q.invariants.torsion, vec![2]);
        assert_eq!(q.invariants, trivial_action_quotient(&m.invariants(), RSpec::ZLocP(2)).unwrap());
        let q = sigma_torsion_quotient(&m, RSpec::Z, 100).unwrap();
        assert_eq!(q.invariants.torsion, vec![6]);
        let q = sigma_torsion_quotient(&m, RSpec::Q, 100).unwrap();
        assert!(q.invariants.is_trivial());
    }

    #[test]
    fn regular_module_over_rationals() {
        // Z[Z/3] itself: the Σ-torsion over Q is the augmentation ideal
        let a = FiniteAbelianGroup::new(vec![3]);
        let m = GroupRingModule::cyclic_presentation(a, 1, &[]).unwrap();
        let q = sigma_torsion_quotient(&m, RSpec::Q, 100).unwrap();
        assert_eq!(q.invariants, AbelianInvariants::free(1));
        assert!(q.certification.is_certified());
        // Z(3)[Z/3] is local, so nothing is Σ-torsion
        let q = sigma_torsion_quotient(&m, RSpec::ZLocP(3), 100).unwrap();
        assert_eq!(q.invariants, AbelianInvariants::free(3));
        // over Z(2) the augmentation ideal dies again
        let q = sigma_torsion_quotient(&m, RSpec::ZLocP(2), 100).unwrap();
        assert_eq!(q.invariants, AbelianInvariants::free(1));
    }

    #[test]
    fn rejects_bad_actions() {
        let bad = GroupRingModule::new(
            FiniteAbelianGroup::new(vec![2]),
            1,
            IntMatrix::zeros(0, 1),
            vec![IntMatrix::from_rows(&[vec![2]])],
        );
        assert!(bad.is_err());
        assert!(matches!(
            zpz2_module(3).sigma_torsion_lattice(RSpec::ZModP(3)),
            Err(Error::UnsupportedCoefficients(_))
        ));
    }

    /// Σ-torsion of a finite module by exhausting `(Z/e)[A]`.
    fn brute_force(m: &GroupRingModule, x: &[BigInt], e: u64, r: RSpec) -> bool {
        let n = m.group().order();
        let mut g = BigInt::from(e);
        let mut c = vec![0u64; n];
        loop {
            let elem = GroupRingElem { coefficients: c.iter().map(|&v| BigInt::from(v)).collect() };
            if m.is_zero(&m.ring_action(&elem).apply_row(x)) {
                g = g.gcd(&elem.augmentation());
            }
            let mut k = 0;
            loop {
                if k == n {
                    return match r {
                        RSpec::Z => g.is_one(),
                        RSpec::ZLocP(p) => !g.is_multiple_of(&BigInt::from(p)),
                        _ => unreachable!(),
                    };
                }
                c[k] += 1;
                if c[k] < e {
                    break;
                }
                c[k] = 0;
                k += 1;
            }
        }
    }

    fn random_module(seed: u64) -> (GroupRingModule, u64) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let moduli: Vec<u64> = match rng.gen_range(0..4) {
            0 => vec![2],
            1 => vec![3],
            2 => vec![4],
            _ => vec![2, 2],
        };
        let a = FiniteAbelianGroup::new(moduli);
        let e = rng.gen_range(2..=4u64);
        let n = a.order();
        let mut rels = vec![vec![GroupRingElem {
            coefficients: (0..n).map(|i| BigInt::from(if i == 0 { e } else { 0 })).collect(),
        }]];
        for _ in 0..rng.gen_range(0..2) {
            rels.push(vec![GroupRingElem {
                coefficients: (0..n).map(|_| BigInt::from(rng.gen_range(-2..=2))).collect(),
            }]);
        }
        (GroupRingModule::cyclic_presentation(a, 1, &rels).unwrap(), e)
    }

    #[test]
    fn structural_torsion_matches_exhaustive_search() {
        for seed in 0..30 {
            let (m, e) = random_module(seed);
            for r in [RSpec::Z, RSpec::ZLocP(2), RSpec::ZLocP(3)] {
                let t = m.sigma_torsion_lattice(r).unwrap();
                let qt = QuotientGroup::new(&t, m.rank());
                let q = QuotientGroup::new(m.relations(), m.rank());
                for x in q.torsion_elements(10_000).unwrap() {
                    let expected = brute_force(&m, &x, e, r);
                    assert_eq!(qt.is_zero(&x), expected, "seed {seed} {r} {x:?}");
                    assert_eq!(m.is_sigma_torsion(&x, r).unwrap().is_some(), expected);
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn quotient_is_certified(seed in 0u64..10_000) {
            let (m, _) = random_module(seed);
            for r in [RSpec::Z, RSpec::Q, RSpec::ZLocP(2)] {
                let q = sigma_torsion_quotient(&m, r, 10_000).unwrap();
                prop_assert!(q.certification.is_certified(), "{:?}", q.certification);
                // the torsion submodule contains the relations
                let qt = QuotientGroup::new(&q.torsion_lattice, m.rank());
                for row in m.relations().row_iter() {
                    prop_assert!(qt.is_zero(row));
                }
                // idempotent: the quotient has no Σ-torsion left
                let again = GroupRingModule::new(
                    m.group().clone(),
                    m.rank(),
                    q.torsion_lattice.clone(),
                    m.actions().to_vec(),
                )
                .unwrap();
                let q2 = sigma_torsion_quotient(&again, r, 10_000).unwrap();
                prop_assert_eq!(&q2.invariants, &q.invariants);
            }
        }
    }
}

//! Fox calculus and twisted first homology `H_1(π; Z[A])` for a quotient
//! map `φ: π → A`, i.e. the abelianization of `ker φ` with its `A`-action.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groupring::{FiniteAbelianGroup, GroupRingElem, GroupRingModule};
use crate::presentations::{FinitePresentation, GroupHom, TargetElement, TargetGroup, Word};
use crate::zlinalg::{
    is_prime, left_kernel, smith_normal_form, AbelianInvariants, IntMatrix, QuotientGroup, RSpec,
};

/// Terms of `∂w/∂x_gen` in the free group ring: `(sign, u)` stands for
/// `sign · u`.
pub fn fox_terms(w: &Word, gen: usize) -> Vec<(i64, Word)> {
    let mut out = Vec::new();
    let mut prefix = Word::identity();
    for &l in w.letters() {
        let next = prefix.mul(&Word::from_letters([l]));
        if l.gen == gen {
            if l.inverse {
                out.push((-1, next.clone()));
            } else {
                out.push((1, prefix.clone()));
            }
        }
        prefix = next;
    }
    out
}

fn finite_target(phi: &GroupHom) -> Result<FiniteAbelianGroup> {
    match phi.target() {
        TargetGroup::Abelian(a) if a.is_finite() => FiniteAbelianGroup::from_invariants(a),
        TargetGroup::Abelian(a) => Err(Error::UnsupportedQuotient(format!(
            "twisted homology over the infinite group {a}"
        ))),
        TargetGroup::Perm(_) => {
            Err(Error::UnsupportedQuotient("twisted homology needs an abelian quotient".into()))
        }
    }
}

fn element_index(a: &FiniteAbelianGroup, e: &TargetElement) -> usize {
    match e {
        TargetElement::Abelian(v) => a.index_of(v),
        TargetElement::Perm(_) => unreachable!("abelian target"),
    }
}

/// `∂w/∂x_gen` pushed forward to `Z[A]`.
pub fn fox_derivative(w: &Word, gen: usize, phi: &GroupHom) -> Result<GroupRingElem> {
    let a = finite_target(phi)?;
    let mut out = GroupRingElem::zero(&a);
    for (sign, u) in fox_terms(w, gen) {
        out.coefficients[element_index(&a, &phi.eval(&u))] += sign;
    }
    Ok(out)
}

/// Fox derivatives of every relator, with the boundary entries
/// `φ(x_i) - 1`.
#[derive(Clone, Debug)]
pub struct FoxMatrix {
    pub group: FiniteAbelianGroup,
    /// `entries[relator][generator]`.
    pub entries: Vec<Vec<GroupRingElem>>,
    pub boundary: Vec<GroupRingElem>,
}

impl FoxMatrix {
    pub fn new(pres: &FinitePresentation, phi: &GroupHom) -> Result<Self> {
        let a = finite_target(phi)?;
        let n = pres.num_generators();
        let entries = pres
            .relators()
            .iter()
            .map(|r| (0..n).map(|i| fox_derivative(r, i, phi)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let boundary = (0..n)
            .map(|i| {
                let mut e = GroupRingElem::group_element(&a, element_index(&a, &phi.images()[i]));
                e.coefficients[0] -= 1;
                e
            })
            .collect();
        Ok(FoxMatrix { group: a, entries, boundary })
    }

    /// `Σ_i (∂r/∂x_i)(φ(x_i) - 1) = 0` for every relator.
    pub fn fox_identity_holds(&self) -> bool {
        self.entries.iter().all(|row| {
            let mut acc = GroupRingElem::zero(&self.group);
            for (d, b) in row.iter().zip(&self.boundary) {
                let p = d.mul(b, &self.group);
                for (x, y) in acc.coefficients.iter_mut().zip(p.coefficients) {
                    *x += y;
                }
            }
            acc.coefficients.iter().all(Zero::is_zero)
        })
    }
}

/// `H_1(π; Z[A])` for a surjection onto a finite abelian group, as the
/// homology of the chain complex of the covering 2-complex.
///
/// Basis element `(i, a)` of `C_1` is the lift of the edge `x_i` starting
/// at vertex `a`; `A` acts by translating vertices.
pub fn h1_twisted(pres: &FinitePresentation, phi: &GroupHom) -> Result<GroupRingModule> {
    let a = finite_target(phi)?;
    if !phi.is_surjective() {
        return Err(Error::NotSurjective);
    }
    let fox = FoxMatrix::new(pres, phi)?;
    debug_assert!(fox.fox_identity_holds());
    let n = pres.num_generators();
    let big_n = a.order();
    let dim1 = n * big_n;
    let gen_idx: Vec<usize> = phi.images().iter().map(|e| element_index(&a, e)).collect();

    let mut d1 = IntMatrix::zeros(dim1, big_n);
    for i in 0..n {
        for v in 0..big_n {
            *d1.entry_mut(i * big_n + v, a.add(v, gen_idx[i])) += 1;
            *d1.entry_mut(i * big_n + v, v) -= 1;
        }
    }
    let snf = smith_normal_form(&d1);
    let r = snf.rank();
    let rank = dim1 - r;
    let coords = |x: &[BigInt]| -> Vec<BigInt> { snf.u_inv.apply_row(x)[r..].to_vec() };

    let mut rels = IntMatrix::zeros(0, rank);
    for row in &fox.entries {
        for v in 0..big_n {
            let mut x = vec![BigInt::zero(); dim1];
            for (i, d) in row.iter().enumerate() {
                for (b, c) in d.coefficients.iter().enumerate() {
                    if !c.is_zero() {
                        x[i * big_n + a.add(v, b)] += c;
                    }
                }
            }
            rels.push_row(coords(&x));
        }
    }
    let actions = (0..a.num_generators())
        .map(|k| {
            let g = a.generator(k);
            let mut t = IntMatrix::zeros(0, rank);
            for j in r..dim1 {
                let basis = snf.u.row(j);
                let mut shifted = vec![BigInt::zero(); dim1];
                for i in 0..n {
                    for v in 0..big_n {
                        shifted[i * big_n + a.add(v, g)] = basis[i * big_n + v].clone();
                    }
                }
                t.push_row(coords(&shifted));
            }
            t
        })
        .collect();
    GroupRingModule::new(a, rank, rels, actions)
}

/// `H_1(ker φ)` when `A = π/π^(1)` is free abelian of rank `r` and acts
/// trivially on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrivialActionH1 {
    /// `A = Z^r`.
    pub quotient: AbelianInvariants,
    /// The abelian group `H_1(ker φ)`.
    pub module: AbelianInvariants,
    /// Cokernel of `H_2(π) → H_2(A) = Λ²A`.
    pub wedge_cokernel: AbelianInvariants,
    /// Kernel of `H_1(π) → A`.
    pub abelian_kernel: AbelianInvariants,
    /// Number of nontrivial characters at which the module was checked to
    /// vanish, as trivial action requires.
    pub characters_checked: usize,
}

/// Twisted homology for `φ: π → H_1(π)/S-torsion` when that quotient is
/// `Z^r`, assuming trivial action.
///
/// With trivial action `H_1(ker φ)` equals its coinvariants, so the
/// five-term exact sequence makes it an extension of
/// `ker(H_1 π → A)` by `coker(H_2 π → Λ²A)`. The image of `H_2 π` is read
/// off from integer combinations of relators with zero exponent sums,
/// through the signed area they sweep in `A ⊗ R`. The extension is
/// reported only when one side vanishes. Trivial action itself is checked
/// by requiring `H_1(π; F_χ) = 0` at several nontrivial characters `χ`,
/// which is necessary but not sufficient.
pub fn trivial_action_h1(pres: &FinitePresentation, r: RSpec) -> Result<TrivialActionH1> {
    let n = pres.num_generators();
    let rel = pres.relation_matrix();
    let q = QuotientGroup::new(&rel, n);
    let h1 = q.invariants();
    let a = crate::zlinalg::s_torsion_quotient(&h1, r)?;
    if !a.torsion.is_empty() || a.rank == 0 {
        return Err(Error::UnsupportedQuotient(format!(
            "the free-abelian route needs π/π^(1) = Z^r, got {a}"
        )));
    }
    let rank = a.rank;
    let free = q.free_coordinates();
    let proj: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut e = vec![BigInt::zero(); n];
            e[i] = 1.into();
            let y = q.reduce(&e);
            free.iter().map(|&k| y[k].to_i64().expect("coordinate overflow")).collect()
        })
        .collect();

    let pairs: Vec<(usize, usize)> =
        (0..rank).flat_map(|i| (i + 1..rank).map(move |j| (i, j))).collect();
    let doubled_area = |w: &Word| -> Vec<BigInt> {
        let mut acc = vec![BigInt::zero(); pairs.len()];
        let mut pos = vec![0i64; rank];
        for l in w.letters() {
            let step: Vec<i64> = proj[l.gen].iter().map(|v| v * l.sign()).collect();
            for (k, &(i, j)) in pairs.iter().enumerate() {
                acc[k] += pos[i] * step[j] - pos[j] * step[i];
            }
            for (p, s) in pos.iter_mut().zip(&step) {
                *p += s;
            }
        }
        acc
    };
    let areas: Vec<Vec<BigInt>> = pres.relators().iter().map(doubled_area).collect();
    let mut image = IntMatrix::zeros(0, pairs.len());
    if rel.rows() > 0 {
        for k in left_kernel(&rel).row_iter() {
            let mut v = vec![BigInt::zero(); pairs.len()];
            for (c, ar) in k.iter().zip(&areas) {
                for (x, y) in v.iter_mut().zip(ar) {
                    *x += c * y;
                }
            }
            let two = BigInt::from(2);
            debug_assert!(v.iter().all(|x| x.is_multiple_of(&two)));
            image.push_row(v.into_iter().map(|x| x / &two).collect());
        }
    }
    let wedge_cokernel = QuotientGroup::new(&image, pairs.len()).invariants();
    let abelian_kernel = AbelianInvariants { torsion: h1.torsion.clone(), rank: 0 };
    let module = if wedge_cokernel.is_trivial() {
        abelian_kernel.clone()
    } else if abelian_kernel.is_trivial() {
        wedge_cokernel.clone()
    } else {
        return Err(Error::UnsupportedQuotient(format!(
            "H_1(π^(1)) is an undetermined extension of {abelian_kernel} by {wedge_cokernel}"
        )));
    };

    let characters_checked = check_characters(pres, &proj, rank)?;
    Ok(TrivialActionH1 { quotient: a, module, wedge_cokernel, abelian_kernel, characters_checked })
}

fn pow_mod(b: u64, e: u64, m: u64) -> u64 {
    let mut r = 1u128;
    let mut b = b as u128 % m as u128;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m as u128;
        }
        b = b * b % m as u128;
        e >>= 1;
    }
    r as u64
}

fn rank_mod(m: &IntMatrix, p: u64) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    let p = BigInt::from(p);
    smith_normal_form(m)
        .diagonal()
        .iter()
        .filter(|d| !d.is_zero() && !d.is_multiple_of(&p))
        .count()
}

/// Characters `A = Z^r → F_ℓ^*`: each coordinate separately and all
/// together, sent to a few field elements of small order.
fn check_characters(pres: &FinitePresentation, proj: &[Vec<i64>], rank: usize) -> Result<usize> {
    let n = pres.num_generators();
    let mut checked = 0;
    for ell in [101u64, 103, 109] {
        debug_assert!(is_prime(ell));
        for zeta in [ell - 1, 2, 3] {
            let mut choices: Vec<Vec<u64>> = (0..rank)
                .map(|j| (0..rank).map(|k| if k == j { zeta } else { 1 }).collect())
                .collect();
            choices.push(vec![zeta; rank]);
            for chi in choices {
                let value = |w: &Word| -> u64 {
                    let mut acc = 1u64;
                    for l in w.letters() {
                        for (k, &v) in proj[l.gen].iter().enumerate() {
                            let e = (v * l.sign()).rem_euclid((ell - 1) as i64) as u64;
                            acc = acc * pow_mod(chi[k], e, ell) % ell;
                        }
                    }
                    acc
                };
                let mut m = IntMatrix::zeros(0, n);
                for r in pres.relators() {
                    let row: Vec<BigInt> = (0..n)
                        .map(|i| {
                            let s = fox_terms(r, i).iter().fold(0i64, |acc, (sign, u)| {
                                (acc + sign * value(u) as i64).rem_euclid(ell as i64)
                            });
                            BigInt::from(s)
                        })
                        .collect();
                    m.push_row(row);
                }
                if rank_mod(&m, ell) != n - 1 {
                    return Err(Error::UnsupportedAction(format!(
                        "H_1(π^(1)) does not vanish at a nontrivial character mod {ell}; \
                         the action of π/π^(1) is not trivial"
                    )));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

/// Whether an element of an abelian group with trivial `A`-action, in
/// canonical coordinates (torsion first, then free), is Σ-torsion: since
/// `s` acts as `ε(s)`, this is S-torsion.
pub fn trivial_action_is_sigma_torsion(m: &AbelianInvariants, x: &[i64], r: RSpec) -> bool {
    let t = m.torsion.len();
    if x[t..].iter().any(|&v| v != 0) {
        return false;
    }
    x[..t].iter().zip(&m.torsion).all(|(&v, &d)| {
        let ord = d / (v.rem_euclid(d as i64) as u64).gcd(&d);
        r.is_unit(&BigInt::from(ord))
    })
}

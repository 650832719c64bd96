//! Lower terms of the R-local derived series, the mod-p derived series,
//! and consistency checks between them.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::enumerator::{
    reidemeister_schreier, small_generating_set, CosetTable, FiniteGroup, SubgroupPresentation,
};
use crate::error::{Error, Result};
use crate::groupring::{
    sigma_torsion_quotient, Certification, FiniteAbelianGroup, GroupRingModule,
    DEFAULT_SWEEP_CAP,
};
use crate::homology::{h1_twisted, trivial_action_h1};
use crate::presentations::{
    abelianization_map, direct_product, FinitePresentation, GroupHom, TargetElement, Word,
};
use crate::zlinalg::{factorize, AbelianInvariants, QuotientGroup, RSpec};

/// One term `π^(n)` of a series.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesTerm {
    pub depth: usize,
    pub description: String,
    /// Order of the term when a finite realization is available.
    pub order: Option<u64>,
    /// The term itself, when it is abelian and its elements are known.
    pub structure: Option<AbelianInvariants>,
    /// Its abelianization, when computed.
    pub abelianization: Option<AbelianInvariants>,
    /// A generating set as words in the ambient generators.
    pub generators: Vec<String>,
    #[serde(skip)]
    pub elements: Option<Vec<usize>>,
    #[serde(skip)]
    pub generator_words: Vec<Word>,
}

impl SeriesTerm {
    fn bare(depth: usize, description: impl Into<String>) -> Self {
        SeriesTerm {
            depth,
            description: description.into(),
            order: None,
            structure: None,
            abelianization: None,
            generators: Vec::new(),
            elements: None,
            generator_words: Vec::new(),
        }
    }
}

/// An annihilating group-ring element for a Σ-torsion module element.
#[derive(Clone, Debug, Serialize)]
pub struct TorsionWitness {
    /// The module element as a word in the ambient generators.
    pub element: String,
    pub witness: String,
    pub augmentation: String,
    /// `t·x = 0` and `ε(t)` invertible, rechecked.
    pub verified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesReport {
    pub coefficient: RSpec,
    pub presentation: String,
    pub route: String,
    /// `π^(0) = π, π^(1), …`.
    pub terms: Vec<SeriesTerm>,
    /// `π^(n)/π^(n+1)`.
    pub quotients: Vec<AbelianInvariants>,
    /// Words mapping to the canonical generators of each quotient.
    pub quotient_generators: Vec<Vec<String>>,
    /// First `n` with `π^(n) = π^(n+1)` or `π^(n)` trivial.
    pub stabilized_at: Option<usize>,
    pub certified: bool,
    pub witnesses: Vec<TorsionWitness>,
    /// Coset enumeration hit its cap, so no finite realization was used.
    pub cap_exceeded: bool,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub realization: Option<FiniteGroup>,
}

impl SeriesReport {
    /// Whether the word lies in `π^(n)`, using the finite realization.
    pub fn term_contains(&self, n: usize, w: &Word) -> Option<bool> {
        let g = self.realization.as_ref()?;
        let elems = self.terms.get(n)?.elements.as_ref()?;
        Some(elems.binary_search(&g.element(w)).is_ok())
    }
}

fn surviving_modulus(r: RSpec, d: u64) -> u64 {
    match r {
        RSpec::Z => d,
        RSpec::Q => 1,
        RSpec::ZLocP(p) | RSpec::ZModP(p) => {
            let mut c = 1;
            let mut d = d;
            while d % p == 0 {
                d /= p;
                c *= p;
            }
            c
        }
    }
}

/// `π → H_1(π)/S-torsion`, in canonical coordinates of the target.
pub fn local_abelian_quotient(pres: &FinitePresentation, r: RSpec) -> Result<GroupHom> {
    let ab = abelianization_map(pres);
    let h1 = pres.abelianization();
    let keep: Vec<(usize, u64)> = h1
        .torsion
        .iter()
        .enumerate()
        .map(|(i, &d)| (i, surviving_modulus(r, d)))
        .filter(|&(_, c)| c > 1)
        .collect();
    let t = h1.torsion.len();
    let target = AbelianInvariants { torsion: keep.iter().map(|&(_, c)| c).collect(), rank: h1.rank };
    let images = ab
        .images()
        .iter()
        .map(|e| match e {
            TargetElement::Abelian(v) => {
                let mut out: Vec<i64> = keep.iter().map(|&(i, c)| v[i].rem_euclid(c as i64)).collect();
                out.extend_from_slice(&v[t..]);
                out
            }
            _ => unreachable!(),
        })
        .collect();
    debug_assert_eq!(target, crate::zlinalg::s_torsion_quotient(&h1, r).unwrap());
    GroupHom::to_abelian(pres.clone(), target, images)
}

fn is_zero_elem(e: &TargetElement) -> bool {
    match e {
        TargetElement::Abelian(v) => v.iter().all(|&x| x == 0),
        TargetElement::Perm(p) => p.iter().enumerate().all(|(i, &j)| i == j),
    }
}

/// Invariants of an abelian subgroup from its element orders.
pub fn abelian_structure(g: &FiniteGroup, elems: &[usize]) -> Option<AbelianInvariants> {
    let gens = small_generating_set(g, elems);
    for (i, &a) in gens.iter().enumerate() {
        for &b in &gens[i + 1..] {
            if g.mul(a, b) != g.mul(b, a) {
                return None;
            }
        }
    }
    let orders: Vec<u64> = elems.iter().map(|&e| g.element_order(e)).collect();
    let mut cyclic = Vec::new();
    for (p, e) in factorize(elems.len() as u64) {
        // levels[j] = log_p #{x : x^(p^j) = 1}
        let levels: Vec<u32> = (0..=e)
            .map(|j| {
                let pj = p.pow(j);
                let mut c = orders.iter().filter(|&&o| pj % o == 0).count() as u64;
                let mut l = 0;
                while c > 1 {
                    c /= p;
                    l += 1;
                }
                l
            })
            .collect();
        // at_least[j-1] = number of cyclic factors of order at least p^j
        let at_least: Vec<u32> = levels.windows(2).map(|w| w[1] - w[0]).collect();
        for j in 0..at_least.len() {
            let next = at_least.get(j + 1).copied().unwrap_or(0);
            for _ in 0..(at_least[j] - next) {
                cyclic.push(p.pow(j as u32 + 1));
            }
        }
    }
    Some(AbelianInvariants::from_cyclic_orders(&cyclic, 0))
}

fn describe_elements(g: &FiniteGroup, elems: &[usize]) -> (Vec<Word>, Vec<String>) {
    let gens = small_generating_set(g, elems);
    let words: Vec<Word> = gens.iter().map(|&e| g.word(e).clone()).collect();
    let names = words.iter().map(|w| g.presentation().word_display(w).to_string()).collect();
    (words, names)
}

fn fill_from_elements(term: &mut SeriesTerm, g: &FiniteGroup, elems: Vec<usize>) {
    term.order = Some(elems.len() as u64);
    term.structure = abelian_structure(g, &elems);
    let (words, names) = describe_elements(g, &elems);
    term.generator_words = words;
    term.generators = names;
    term.elements = Some(elems);
}

/// The finite realization when `H_1` is finite and enumeration closes, and
/// whether the cap was hit.
fn try_realize(pres: &FinitePresentation, cap: usize, warnings: &mut Vec<String>) -> (Option<FiniteGroup>, bool) {
    if pres.abelianization().rank > 0 {
        return (None, false);
    }
    match FiniteGroup::new(pres, cap) {
        Ok(g) => (Some(g), false),
        Err(e) => {
            warnings.push(format!("no finite realization: {e}"));
            (None, matches!(e, Error::CapExceeded(_)))
        }
    }
}

/// The R-S module `H_1(ker φ)` with `A` acting by conjugation.
fn rewriting_module(
    pres: &FinitePresentation,
    phi: &GroupHom,
    a: &FiniteAbelianGroup,
    cap: usize,
) -> Result<(SubgroupPresentation, GroupRingModule, Vec<String>)> {
    let table = CosetTable::from_hom(phi, cap)?;
    let sp = reidemeister_schreier(pres, &table);
    let reps: Vec<Word> = (0..table.index()).map(|c| sp.representative(c).clone()).collect();
    let mut actions = Vec::new();
    let mut labels = Vec::new();
    for k in 0..a.num_generators() {
        let gk = a.generator(k);
        let c = reps
            .iter()
            .position(|w| match phi.eval(w) {
                TargetElement::Abelian(v) => a.index_of(&v) == gk,
                _ => false,
            })
            .expect("φ is onto");
        actions.push(sp.conjugation_matrix(&reps[c])?);
        let name = (0..pres.num_generators())
            .find(|&i| phi.images()[i] == TargetElement::Abelian(a.element(gk).iter().map(|&v| v as i64).collect()))
            .map(|i| pres.generators()[i].clone())
            .unwrap_or_else(|| pres.word_display(&reps[c]).to_string());
        labels.push(name);
    }
    let m = sp.num_generators();
    let module = GroupRingModule::new(a.clone(), m, sp.relation_matrix(), actions)?
        .with_labels(labels.clone());
    Ok((sp, module, labels))
}

fn module_element_word(sp: &SubgroupPresentation, x: &[BigInt]) -> Word {
    let mut w = Word::identity();
    for (j, c) in x.iter().enumerate() {
        let e = c.to_i64().expect("coefficient overflow");
        if e != 0 {
            w = w.mul(&sp.generator_word(j).pow(e));
        }
    }
    w
}

fn short_word(g: Option<&FiniteGroup>, pres: &FinitePresentation, w: &Word) -> String {
    match g {
        Some(g) => pres.word_display(g.word(g.element(w))).to_string(),
        None => pres.word_display(w).to_string(),
    }
}

/// Lifts of the canonical generators of a quotient group (coordinates
/// with modulus other than 1).
fn canonical_lifts(q: &QuotientGroup) -> Vec<Vec<BigInt>> {
    q.moduli()
        .iter()
        .enumerate()
        .filter(|(_, d)| *d != &BigInt::from(1))
        .map(|(i, _)| {
            let mut y = vec![BigInt::from(0); q.dim()];
            y[i] = BigInt::from(1);
            q.lift(&y)
        })
        .collect()
}

/// Words for the canonical generators of `H_1(π)/S-torsion`.
fn abelian_generators(pres: &FinitePresentation, r: RSpec, g: Option<&FiniteGroup>) -> Vec<String> {
    let n = pres.num_generators();
    let q = QuotientGroup::new(&pres.relation_matrix(), n);
    q.moduli()
        .iter()
        .enumerate()
        .filter(|(_, d)| {
            num_traits::Zero::is_zero(*d) || surviving_modulus(r, d.to_u64().expect("modulus exceeds u64")) > 1
        })
        .map(|(i, _)| {
            let mut y = vec![BigInt::from(0); n];
            y[i] = BigInt::from(1);
            let x = q.lift(&y);
            let mut w = Word::identity();
            for (k, c) in x.iter().enumerate() {
                w = w.mul(&Word::power_of_gen(k, c.to_i64().expect("exponent overflow")));
            }
            short_word(g, pres, &w)
        })
        .collect()
}

/// R-local derived series to the given depth, for `R = Z`, `Q` or `Z_(p)`.
///
/// `π/π^(1)` is `H_1(π)` modulo S-torsion. When it is finite, `π^(1)` is
/// presented by rewriting and `π^(1)/π^(2)` is `H_1(π^(1))` modulo its
/// Σ-torsion as a `Z[π/π^(1)]`-module. When it is `Z^r`, the trivial-action
/// route is used. Beyond depth 2 terms are only reported once the series
/// has become constant.
pub fn local_series(pres: &FinitePresentation, r: RSpec, depth: usize, cap: usize) -> Result<SeriesReport> {
    let r = r.validate()?;
    if !r.is_subring_of_q() {
        return Err(Error::UnsupportedCoefficients(format!(
            "local series needs R inside Q; use the mod-p series for {r}"
        )));
    }
    if depth == 0 {
        return Err(Error::InvalidInput("depth must be at least 1".into()));
    }
    let mut warnings = Vec::new();
    let (g, cap_exceeded) = try_realize(pres, cap, &mut warnings);
    let h1 = pres.abelianization();
    let phi = local_abelian_quotient(pres, r)?;
    let a_inv = crate::zlinalg::s_torsion_quotient(&h1, r)?;

    let mut t0 = SeriesTerm::bare(0, "π");
    t0.abelianization = Some(h1.clone());
    t0.generator_words = (0..pres.num_generators()).map(Word::gen).collect();
    t0.generators = pres.generators().to_vec();
    if let Some(g) = &g {
        t0.order = Some(g.order() as u64);
        t0.structure = abelian_structure(g, &(0..g.order()).collect::<Vec<_>>());
        t0.elements = Some((0..g.order()).collect());
    }
    let mut terms = vec![t0];
    let mut quotients = vec![a_inv.clone()];
    let mut quotient_generators = vec![abelian_generators(pres, r, g.as_ref())];
    let mut witnesses = Vec::new();
    let mut certified = true;
    let mut route = String::new();

    let mut t1 = SeriesTerm::bare(1, format!("ker(π → {a_inv})"));
    if let Some(g) = &g {
        let elems: Vec<usize> =
            (0..g.order()).filter(|&e| is_zero_elem(&phi.eval(g.word(e)))).collect();
        fill_from_elements(&mut t1, g, elems);
    }

    if a_inv.is_finite() {
        route.push_str("finite abelian quotient, rewriting");
        if a_inv.is_trivial() {
            t1.description = "π".into();
        }
        let a = FiniteAbelianGroup::from_invariants(&a_inv)?;
        if depth >= 2 {
            let (sp, module, labels) = rewriting_module(pres, &phi, &a, cap)?;
            t1.abelianization = Some(module.invariants());
            if g.is_none() {
                let gens: Vec<Word> = (0..sp.num_generators()).map(|j| sp.generator_word(j)).collect();
                t1.generators = gens.iter().map(|w| pres.word_display(w).to_string()).collect();
                t1.generator_words = gens;
            }
            let q = sigma_torsion_quotient(&module, r, DEFAULT_SWEEP_CAP)?;
            if let Certification::Uncertified(why) = &q.certification {
                certified = false;
                warnings.push(format!("Σ-torsion quotient uncertified: {why}"));
            }
            // the covering chain complex must give the same quotient
            let fox_module = h1_twisted(pres, &phi)?;
            let q_fox = sigma_torsion_quotient(&fox_module, r, 0)?;
            if q_fox.invariants != q.invariants || fox_module.invariants() != module.invariants() {
                certified = false;
                warnings.push("Fox and rewriting routes disagree".into());
            }
            quotients.push(q.invariants.clone());

            let qt = QuotientGroup::new(&q.torsion_lattice, module.rank());
            quotient_generators.push(
                canonical_lifts(&qt)
                    .iter()
                    .map(|x| short_word(g.as_ref(), pres, &module_element_word(&sp, x)))
                    .collect(),
            );
            // one witness per row not already in the submodule spanned by
            // the earlier ones
            let mut span = module.relations().clone();
            for row in q.torsion_lattice.row_iter() {
                if QuotientGroup::new(&span, module.rank()).is_zero(row) {
                    continue;
                }
                for g in 0..module.group().order() {
                    span.push_row(module.action_of(g).apply_row(row));
                }
                if let Some(w) = module.is_sigma_torsion(row, r)? {
                    let killed = module.ring_action(&w).apply_row(row);
                    let verified = module.is_zero(&killed) && r.is_unit(&w.augmentation());
                    witnesses.push(TorsionWitness {
                        element: short_word(g.as_ref(), pres, &module_element_word(&sp, row)),
                        witness: w.describe(&a, &labels),
                        augmentation: w.augmentation().to_string(),
                        verified,
                    });
                }
            }

            let mut t2 = SeriesTerm::bare(2, format!("ker(π^(1) → {})", q.invariants));
            if q.invariants.is_trivial() {
                t2.description = "π^(1)".into();
            }
            if let (Some(g), Some(e1)) = (&g, &t1.elements) {
                let mut elems = Vec::new();
                for &e in e1 {
                    let w = sp.rewrite(g.word(e))?;
                    let x: Vec<BigInt> =
                        w.exponent_sums(sp.num_generators()).into_iter().map(BigInt::from).collect();
                    if qt.is_zero(&x) {
                        elems.push(e);
                    }
                }
                fill_from_elements(&mut t2, g, elems);
            } else {
                warnings.push("π^(2) is described but not enumerated".into());
            }
            terms.push(t1);
            terms.push(t2);
        } else {
            terms.push(t1);
        }
    } else {
        route.push_str("free abelian quotient, trivial action");
        if depth >= 2 {
            let h = trivial_action_h1(pres, r)?;
            t1.abelianization = Some(h.module.clone());
            t1.description = format!("ker(π → {a_inv}), abelianization {}", h.module);
            let q = crate::zlinalg::s_torsion_quotient(&h.module, r)?;
            warnings.push(format!(
                "trivial action of π/π^(1) checked at {} characters only",
                h.characters_checked
            ));
            certified = false;
            let t2 = SeriesTerm::bare(
                2,
                if q == h.module {
                    "[π^(1), π^(1)]".to_string()
                } else {
                    "preimage of the S-torsion of H_1(π^(1))".to_string()
                },
            );
            quotients.push(q);
            quotient_generators.push(Vec::new());
            terms.push(t1);
            terms.push(t2);
        } else {
            terms.push(t1);
        }
    }

    let stabilized_at = if quotients[0].is_trivial() || terms[0].order == Some(1) {
        Some(0)
    } else if quotients.get(1).is_some_and(|q| q.is_trivial()) || terms[1].order == Some(1) {
        Some(1)
    } else if terms.get(2).is_some_and(|t| t.order == Some(1)) {
        Some(2)
    } else {
        None
    };
    if stabilized_at == Some(0) {
        warnings.push(if h1.is_trivial() { "perfect".into() } else { "π^(1) = π".into() });
    }
    // extend or truncate to the requested depth
    match stabilized_at {
        Some(s) => {
            while terms.len() <= depth {
                let mut t = terms[s].clone();
                t.depth = terms.len();
                terms.push(t);
            }
            while quotients.len() < depth {
                quotients.push(AbelianInvariants::trivial());
                quotient_generators.push(Vec::new());
            }
        }
        None if depth > 2 => {
            return Err(Error::UnsupportedQuotient(
                "terms below π^(2) need a nonabelian quotient group ring".into(),
            ))
        }
        None => {}
    }
    terms.truncate(depth + 1);
    quotients.truncate(depth);
    quotient_generators.truncate(depth);
    for (n, t) in terms.iter_mut().enumerate() {
        t.depth = n;
    }
    Ok(SeriesReport {
        coefficient: r,
        presentation: pres.to_string(),
        route,
        terms,
        quotients,
        quotient_generators,
        stabilized_at: stabilized_at.filter(|&s| s <= depth),
        certified,
        witnesses,
        cap_exceeded,
        warnings,
        realization: g,
    })
}

/// The derived series with `⟨[H,H], H^p⟩` at each step, on the finite
/// realization.
pub fn modp_derived_series(pres: &FinitePresentation, p: u64, max_depth: usize, cap: usize) -> Result<SeriesReport> {
    let r = RSpec::ZModP(p).validate()?;
    let g = FiniteGroup::new(pres, cap)?;
    let mut h: Vec<usize> = (0..g.order()).collect();
    let mut terms = Vec::new();
    let mut quotients = Vec::new();
    let mut stabilized_at = None;
    let mut t = SeriesTerm::bare(0, "π");
    t.abelianization = Some(pres.abelianization());
    fill_from_elements(&mut t, &g, h.clone());
    terms.push(t);
    for n in 0..max_depth {
        let next = g.derived_subgroup(&h, p);
        let index = (h.len() / next.len()) as u64;
        let mut k = 0;
        let mut i = index;
        while i % p == 0 {
            i /= p;
            k += 1;
        }
        if i != 1 {
            return Err(Error::InvalidInput(format!("index {index} of a mod-{p} term is not a power of {p}")));
        }
        quotients.push(AbelianInvariants { torsion: vec![p; k], rank: 0 });
        let mut t = SeriesTerm::bare(n + 1, format!("⟨[π^{n}, π^{n}], (π^{n})^{p}⟩"));
        fill_from_elements(&mut t, &g, next.clone());
        terms.push(t);
        if next == h || next.len() == 1 {
            stabilized_at = Some(if next == h { n } else { n + 1 });
            break;
        }
        h = next;
    }
    if terms.len() == 1 || terms[0].order == Some(1) {
        stabilized_at = stabilized_at.or(Some(0));
    }
    Ok(SeriesReport {
        coefficient: r,
        presentation: pres.to_string(),
        route: "mod-p closure".into(),
        terms,
        quotient_generators: Vec::new(),
        quotients,
        stabilized_at,
        certified: true,
        witnesses: Vec::new(),
        cap_exceeded: false,
        warnings: Vec::new(),
        realization: Some(g),
    })
}

/// Dispatch on the coefficient ring.
pub fn series(pres: &FinitePresentation, r: RSpec, depth: usize, cap: usize) -> Result<SeriesReport> {
    match r {
        RSpec::ZModP(p) => modp_derived_series(pres, p, depth, cap),
        _ => local_series(pres, r, depth, cap),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub holds: bool,
    pub details: Vec<String>,
}

/// Whether the series of `G × H` is the product of the series of `G` and
/// `H`, quotient by quotient and term by term.
pub fn check_product_formula(
    p1: &FinitePresentation,
    p2: &FinitePresentation,
    r: RSpec,
    depth: usize,
    cap: usize,
) -> Result<CheckReport> {
    let s1 = series(p1, r, depth, cap)?;
    let s2 = series(p2, r, depth, cap)?;
    let s12 = series(&direct_product(p1, p2), r, depth, cap)?;
    let mut details = Vec::new();
    let n = s12.quotients.len().min(s1.quotients.len()).min(s2.quotients.len());
    for k in 0..n {
        let expected = s1.quotients[k].direct_sum(&s2.quotients[k]);
        if s12.quotients[k] != expected {
            details.push(format!("quotient {k}: product {} vs factors {expected}", s12.quotients[k]));
        }
    }
    for k in 0..s12.terms.len().min(s1.terms.len()).min(s2.terms.len()) {
        let (a, b, c) = (&s12.terms[k], &s1.terms[k], &s2.terms[k]);
        if let (Some(x), Some(y), Some(z)) = (a.order, b.order, c.order) {
            if x != y * z {
                details.push(format!("term {k}: order {x} vs {y}·{z}"));
            }
        }
        if let (Some(x), Some(y), Some(z)) = (&a.structure, &b.structure, &c.structure) {
            if *x != y.direct_sum(z) {
                details.push(format!("term {k}: {x} vs {y} + {z}"));
            }
        }
        if let (Some(x), Some(y), Some(z)) = (&a.abelianization, &b.abelianization, &c.abelianization) {
            if *x != y.direct_sum(z) {
                details.push(format!("term {k} abelianization: {x} vs {y} + {z}"));
            }
        }
    }
    // stabilization of a product may lie beyond what the engine can see,
    // so only a detected disagreement counts
    let expected = max_opt(s1.stabilized_at, s2.stabilized_at);
    if s12.stabilized_at.is_some() && s12.stabilized_at != expected {
        details.push(format!(
            "stabilization: product {:?}, factors {:?} and {:?}",
            s12.stabilized_at, s1.stabilized_at, s2.stabilized_at
        ));
    }
    Ok(CheckReport { holds: details.is_empty(), details })
}

fn max_opt(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    Some(a?.max(b?))
}

fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

fn is_normal(g: &FiniteGroup, h: &[usize]) -> bool {
    let set: HashSet<usize> = h.iter().copied().collect();
    (0..g.presentation().num_generators()).all(|i| {
        let x = g.generator(i);
        let xi = g.inverse(x);
        h.iter().all(|&e| set.contains(&g.mul(g.mul(xi, e), x)))
    })
}

/// `{x ∈ H : the image of x in H/[H,H] has order invertible in R}`.
fn r_derived_step(g: &FiniteGroup, h: &[usize], r: RSpec) -> Vec<usize> {
    let d = g.derived_subgroup(h, 0);
    let set: HashSet<usize> = d.iter().copied().collect();
    h.iter()
        .copied()
        .filter(|&x| {
            let mut k = 1u64;
            let mut y = x;
            while !set.contains(&y) {
                y = g.mul(y, x);
                k += 1;
            }
            r.is_unit(&BigInt::from(k))
        })
        .collect()
}

/// Containments inside the finite realization, for `n ≤ depth`:
/// derived `⊆` R-derived `⊆` local `π^(n)`, and `Z_(p)`-derived `⊆` mod-p.
/// Also checks that the local terms are normal and the mod-p quotients
/// elementary abelian.
pub fn check_inclusion_chain(
    pres: &FinitePresentation,
    p: u64,
    r: RSpec,
    depth: usize,
    cap: usize,
) -> Result<CheckReport> {
    let local = local_series(pres, r, depth, cap)?;
    let modp = modp_derived_series(pres, p, depth, cap)?;
    let g = local
        .realization
        .as_ref()
        .ok_or_else(|| Error::UnsupportedQuotient("inclusion checks need a finite realization".into()))?;
    let mut details = Vec::new();
    let all: Vec<usize> = (0..g.order()).collect();
    let (mut derived, mut r_derived, mut p_derived) = (all.clone(), all.clone(), all.clone());
    for n in 0..=depth {
        let Some(loc) = local.terms.get(n).and_then(|t| t.elements.as_ref()) else {
            details.push(format!("term {n} of the local series is not enumerated"));
            continue;
        };
        if !is_normal(g, loc) {
            details.push(format!("local term {n} is not normal"));
        }
        if !is_subset(&derived, &r_derived) {
            details.push(format!("derived term {n} ⊄ R-derived term"));
        }
        if !is_subset(&r_derived, loc) {
            details.push(format!("R-derived term {n} ⊄ local term"));
        }
        let mp = modp.terms.get(n).or(modp.terms.last()).and_then(|t| t.elements.as_ref()).unwrap();
        if !is_subset(&p_derived, mp) {
            details.push(format!("Z_({p})-derived term {n} ⊄ mod-{p} term"));
        }
        derived = g.derived_subgroup(&derived, 0);
        r_derived = r_derived_step(g, &r_derived, r);
        p_derived = r_derived_step(g, &p_derived, RSpec::ZLocP(p));
    }
    for (n, q) in modp.quotients.iter().enumerate() {
        if !q.is_trivial() && !q.is_elementary_abelian(p) {
            details.push(format!("mod-{p} quotient {n} = {q} is not elementary abelian"));
        }
    }
    Ok(CheckReport { holds: details.is_empty(), details })
}

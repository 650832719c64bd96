//! Coset enumeration, finite group realizations and Reidemeister–Schreier
//! rewriting.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::presentations::{FinitePresentation, GroupHom, Letter, TargetElement, Word};
use crate::zlinalg::IntMatrix;

/// Default cap on live cosets.
pub const DEFAULT_MAX_COSETS: usize = 100_000;

/// The cap in effect: `LOCSERIES_MAX_COSETS` if set and valid, otherwise
/// [`DEFAULT_MAX_COSETS`].
pub fn max_cosets_from_env() -> usize {
    std::env::var("LOCSERIES_MAX_COSETS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&v: &usize| v > 0)
        .unwrap_or(DEFAULT_MAX_COSETS)
}

const NONE: usize = usize::MAX;

/// A complete coset table with cosets numbered in breadth-first order from
/// the subgroup coset 0. Column `2i` is generator `i`, column `2i+1` its
/// inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    ngens: usize,
    table: Vec<usize>,
    parent: Vec<Option<(usize, Letter)>>,
}

struct Enumeration {
    ncols: usize,
    table: Vec<usize>,
    forward: Vec<usize>,
    live: usize,
    cap: usize,
    queue: Vec<usize>,
}

impl Enumeration {
    fn new(ncols: usize, cap: usize) -> Self {
        Enumeration {
            ncols,
            table: vec![NONE; ncols],
            forward: vec![0],
            live: 1,
            cap,
            queue: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.forward.len()
    }

    fn get(&self, c: usize, col: usize) -> usize {
        self.table[c * self.ncols + col]
    }

    fn set(&mut self, c: usize, col: usize, v: usize) {
        self.table[c * self.ncols + col] = v;
    }

    fn is_live(&self, c: usize) -> bool {
        self.forward[c] == c
    }

    fn define(&mut self, c: usize, col: usize) -> Result<()> {
        if self.live >= self.cap {
            return Err(Error::CapExceeded(self.cap));
        }
        let b = self.len();
        self.forward.push(b);
        self.table.extend(std::iter::repeat(NONE).take(self.ncols));
        self.live += 1;
        self.set(c, col, b);
        self.set(b, col ^ 1, c);
        Ok(())
    }

    fn rep(&mut self, c: usize) -> usize {
        let mut r = c;
        while self.forward[r] != r {
            r = self.forward[r];
        }
        let mut k = c;
        while self.forward[k] != r {
            let next = self.forward[k];
            self.forward[k] = r;
            k = next;
        }
        r
    }

    fn merge(&mut self, a: usize, b: usize) {
        let f = self.rep(a);
        let h = self.rep(b);
        if f != h {
            let (lo, hi) = if f < h { (f, h) } else { (h, f) };
            self.forward[hi] = lo;
            self.queue.push(hi);
            self.live -= 1;
        }
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let g = self.queue[i];
            i += 1;
            for col in 0..self.ncols {
                let d = self.get(g, col);
                if d == NONE {
                    continue;
                }
                self.set(d, col ^ 1, NONE);
                let mu = self.rep(g);
                let nu = self.rep(d);
                let m_col = self.get(mu, col);
                if m_col != NONE {
                    self.merge(nu, m_col);
                } else {
                    let n_inv = self.get(nu, col ^ 1);
                    if n_inv != NONE {
                        self.merge(mu, n_inv);
                    } else {
                        self.set(mu, col, nu);
                        self.set(nu, col ^ 1, mu);
                    }
                }
            }
        }
    }

    fn scan_and_fill(&mut self, alpha: usize, w: &[usize]) -> Result<()> {
        if w.is_empty() {
            return Ok(());
        }
        let mut f = alpha;
        let mut b = alpha;
        let mut i = 0usize;
        let mut j = w.len() - 1;
        loop {
            while i <= j && self.get(f, w[i]) != NONE {
                f = self.get(f, w[i]);
                i += 1;
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i && self.get(b, w[j] ^ 1) != NONE {
                b = self.get(b, w[j] ^ 1);
                if j == 0 {
                    // whole word traced backwards
                    self.coincidence(f, b);
                    return Ok(());
                }
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            }
            if i == j {
                self.set(f, w[i], b);
                self.set(b, w[i] ^ 1, f);
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }
}

fn columns(w: &Word) -> Vec<usize> {
    w.letters().iter().map(|l| l.column()).collect()
}

impl CosetTable {
    /// Enumerate the cosets of the subgroup generated by `subgroup` in the
    /// group presented by `pres`.
    pub fn enumerate(pres: &FinitePresentation, subgroup: &[Word], max_cosets: usize) -> Result<Self> {
        let ncols = 2 * pres.num_generators();
        let mut e = Enumeration::new(ncols, max_cosets.max(1));
        let rels: Vec<Vec<usize>> = pres.relators().iter().map(columns).collect();
        for h in subgroup {
            e.scan_and_fill(0, &columns(h))?;
        }
        let mut alpha = 0;
        while alpha < e.len() {
            if e.is_live(alpha) {
                for r in &rels {
                    if !e.is_live(alpha) {
                        break;
                    }
                    e.scan_and_fill(alpha, r)?;
                }
                for col in 0..ncols {
                    if !e.is_live(alpha) {
                        break;
                    }
                    if e.get(alpha, col) == NONE {
                        e.define(alpha, col)?;
                    }
                }
            }
            alpha += 1;
        }
        let live: Vec<usize> = (0..e.len()).filter(|&c| e.is_live(c)).collect();
        let mut flat = vec![NONE; e.len() * ncols];
        for &c in &live {
            for col in 0..ncols {
                let v = e.get(c, col);
                flat[c * ncols + col] = e.rep(v);
            }
        }
        Ok(Self::standardize(pres.num_generators(), &flat, e.len()))
    }

    /// Renumber the cosets reachable from 0 in breadth-first order.
    fn standardize(ngens: usize, flat: &[usize], len: usize) -> Self {
        let ncols = 2 * ngens;
        let mut new_id = vec![NONE; len];
        let mut order = vec![0usize];
        let mut parent = vec![None];
        new_id[0] = 0;
        let mut k = 0;
        while k < order.len() {
            let c = order[k];
            for col in 0..ncols {
                let d = flat[c * ncols + col];
                if d != NONE && new_id[d] == NONE {
                    new_id[d] = order.len();
                    order.push(d);
                    parent.push(Some((k, Letter::new(col / 2, col % 2 == 1))));
                }
            }
            k += 1;
        }
        let mut table = vec![NONE; order.len() * ncols];
        for (i, &c) in order.iter().enumerate() {
            for col in 0..ncols {
                table[i * ncols + col] = new_id[flat[c * ncols + col]];
            }
        }
        CosetTable { ngens, table, parent }
    }

    /// Cosets of `ker φ`, read off from the image of `φ` in a finite
    /// target. Works whether or not the source group is finite.
    pub fn from_hom(phi: &GroupHom, max_cosets: usize) -> Result<Self> {
        let target = phi.target();
        let n = phi.source().num_generators();
        let gen_images: Vec<(TargetElement, TargetElement)> = phi
            .images()
            .iter()
            .map(|g| (g.clone(), target.inverse(g)))
            .collect();
        let mut index: HashMap<TargetElement, usize> = HashMap::new();
        let mut elems = vec![target.identity()];
        index.insert(target.identity(), 0);
        let mut flat: Vec<usize> = Vec::new();
        let mut k = 0;
        while k < elems.len() {
            let e = elems[k].clone();
            for (g, gi) in &gen_images {
                for img in [g, gi] {
                    let prod = target.mul(&e, img);
                    let id = match index.get(&prod) {
                        Some(&i) => i,
                        None => {
                            if elems.len() >= max_cosets {
                                return Err(Error::CapExceeded(max_cosets));
                            }
                            let i = elems.len();
                            index.insert(prod.clone(), i);
                            elems.push(prod);
                            i
                        }
                    };
                    flat.push(id);
                }
            }
            k += 1;
        }
        Ok(Self::standardize(n, &flat, elems.len()))
    }

    pub fn index(&self) -> usize {
        self.parent.len()
    }

    pub fn num_generators(&self) -> usize {
        self.ngens
    }

    pub fn act(&self, c: usize, l: Letter) -> usize {
        self.table[c * 2 * self.ngens + l.column()]
    }

    pub fn trace(&self, c: usize, w: &Word) -> usize {
        w.letters().iter().fold(c, |c, &l| self.act(c, l))
    }

    /// The breadth-first spanning tree edge into `c`: `parent · letter = c`.
    pub fn tree_edge(&self, c: usize) -> Option<(usize, Letter)> {
        self.parent[c]
    }

    /// The transversal word `t_c` with `0 · t_c = c`.
    pub fn representative(&self, c: usize) -> Word {
        let mut letters = Vec::new();
        let mut k = c;
        while let Some((p, l)) = self.parent[k] {
            letters.push(l);
            k = p;
        }
        letters.reverse();
        Word::from_letters(letters)
    }

    pub fn representatives(&self) -> Vec<Word> {
        let mut reps: Vec<Word> = Vec::with_capacity(self.index());
        reps.push(Word::identity());
        for c in 1..self.index() {
            let (p, l) = self.parent[c].unwrap();
            reps.push(Word::from_letters(reps[p].letters().iter().copied().chain([l])));
        }
        reps
    }

    /// Permutation of the cosets induced by each generator.
    pub fn permutations(&self) -> PermRealization {
        let gens = (0..self.ngens)
            .map(|g| (0..self.index()).map(|c| self.act(c, Letter::new(g, false))).collect())
            .collect();
        PermRealization::new(self.index(), gens)
    }
}

/// A group generated by permutations acting on the right of `0..degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermRealization {
    degree: usize,
    generators: Vec<Vec<usize>>,
}

impl PermRealization {
    pub fn new(degree: usize, generators: Vec<Vec<usize>>) -> Self {
        assert!(generators.iter().all(|g| g.len() == degree));
        PermRealization { degree, generators }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Vec<usize>] {
        &self.generators
    }
}

/// Order of a permutation group by closing the generators under
/// multiplication; `CapExceeded` beyond `cap` elements.
pub fn group_order(p: &PermRealization, cap: u64) -> Result<u64> {
    let id: Vec<usize> = (0..p.degree).collect();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    while let Some(e) = queue.pop_front() {
        for g in &p.generators {
            let prod: Vec<usize> = e.iter().map(|&i| g[i]).collect();
            if !seen.contains(&prod) {
                if seen.len() as u64 >= cap {
                    return Err(Error::CapExceeded(cap as usize));
                }
                seen.insert(prod.clone());
                queue.push_back(prod);
            }
        }
    }
    Ok(seen.len() as u64)
}

/// Order of a finitely presented group by enumerating cosets of the
/// trivial subgroup.
pub fn presentation_order(pres: &FinitePresentation, max_cosets: usize) -> Result<usize> {
    Ok(CosetTable::enumerate(pres, &[], max_cosets)?.index())
}

/// A finite group given by its regular coset table. Element `c` is the
/// coset `0 · t_c`; the identity is 0.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    pres: FinitePresentation,
    table: CosetTable,
    reps: Vec<Word>,
}

impl FiniteGroup {
    pub fn new(pres: &FinitePresentation, max_cosets: usize) -> Result<Self> {
        let table = CosetTable::enumerate(pres, &[], max_cosets)?;
        let reps = table.representatives();
        Ok(FiniteGroup { pres: pres.clone(), table, reps })
    }

    pub fn order(&self) -> usize {
        self.table.index()
    }

    pub fn presentation(&self) -> &FinitePresentation {
        &self.pres
    }

    pub fn table(&self) -> &CosetTable {
        &self.table
    }

    pub fn word(&self, e: usize) -> &Word {
        &self.reps[e]
    }

    pub fn element(&self, w: &Word) -> usize {
        self.table.trace(0, w)
    }

    pub fn generator(&self, g: usize) -> usize {
        self.table.act(0, Letter::new(g, false))
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table.trace(a, &self.reps[b])
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.table.trace(0, &self.reps[a].inverse())
    }

    pub fn commutator(&self, a: usize, b: usize) -> usize {
        let ab = self.mul(a, b);
        let ai = self.inverse(a);
        let bi = self.inverse(b);
        self.mul(self.mul(ab, ai), bi)
    }

    pub fn power(&self, a: usize, e: u64) -> usize {
        let mut acc = 0;
        for _ in 0..e {
            acc = self.mul(acc, a);
        }
        acc
    }

    pub fn element_order(&self, a: usize) -> u64 {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Sorted elements of the subgroup generated by `gens`.
    pub fn subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let gens: Vec<usize> = gens.iter().copied().filter(|&g| g != 0).collect();
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut out = vec![0];
        let mut k = 0;
        while k < out.len() {
            let e = out[k];
            for &g in &gens {
                let p = self.mul(e, g);
                if !seen[p] {
                    seen[p] = true;
                    out.push(p);
                }
            }
            k += 1;
        }
        out.sort_unstable();
        out
    }

    /// Sorted elements of `⟨[H,H], H^p⟩` (`p = 0` gives `[H,H]`).
    pub fn derived_subgroup(&self, h: &[usize], p: u64) -> Vec<usize> {
        // [H,H] is generated by commutators of generators of H, conjugated
        // within H; closing over all commutators of elements avoids that.
        let gens = small_generating_set(self, h);
        let mut words: Vec<usize> = Vec::new();
        for &a in &gens {
            for &b in &gens {
                words.push(self.commutator(a, b));
            }
            if p > 0 {
                words.push(self.power(a, p));
            }
        }
        let mut sub = self.subgroup(&words);
        // normal closure in H
        loop {
            let mut extra = Vec::new();
            let set: HashSet<usize> = sub.iter().copied().collect();
            for &g in &gens {
                let gi = self.inverse(g);
                for &w in &words {
                    let c = self.mul(self.mul(gi, w), g);
                    if !set.contains(&c) {
                        extra.push(c);
                    }
                }
            }
            if extra.is_empty() {
                return sub;
            }
            words.extend(extra);
            sub = self.subgroup(&words);
        }
    }
}

/// Greedy generating set of a subgroup given by its elements.
pub fn small_generating_set(g: &FiniteGroup, h: &[usize]) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut span = vec![0usize];
    for &x in h {
        if span.binary_search(&x).is_err() {
            gens.push(x);
            span = g.subgroup(&gens);
        }
    }
    gens
}

/// A presentation of a finite-index subgroup on its Schreier generators.
#[derive(Clone, Debug)]
pub struct SubgroupPresentation {
    table: CosetTable,
    reps: Vec<Word>,
    /// `(c, x)` for each nontrivial Schreier generator `t_c x t_{cx}^-1`.
    schreier: Vec<(usize, usize)>,
    index_of: HashMap<(usize, usize), usize>,
    presentation: FinitePresentation,
}

/// Reidemeister–Schreier presentation of the subgroup whose cosets are
/// given by `table`.
pub fn reidemeister_schreier(pres: &FinitePresentation, table: &CosetTable) -> SubgroupPresentation {
    let n = pres.num_generators();
    let k = table.index();
    let mut trivial = HashSet::new();
    for c in 1..k {
        let (p, l) = table.tree_edge(c).unwrap();
        if l.inverse {
            trivial.insert((c, l.gen));
        } else {
            trivial.insert((p, l.gen));
        }
    }
    let mut schreier = Vec::new();
    let mut index_of = HashMap::new();
    for c in 0..k {
        for x in 0..n {
            if !trivial.contains(&(c, x)) {
                index_of.insert((c, x), schreier.len());
                schreier.push((c, x));
            }
        }
    }
    let reps = table.representatives();
    let names: Vec<String> = schreier
        .iter()
        .map(|&(c, x)| format!("s{}_{}", c, pres.generators()[x]))
        .collect();
    let mut sp = SubgroupPresentation {
        table: table.clone(),
        reps,
        schreier,
        index_of,
        presentation: FinitePresentation::new(Vec::new(), Vec::new()).unwrap(),
    };
    let mut rels = Vec::with_capacity(k * pres.relators().len());
    for r in pres.relators() {
        for c in 0..k {
            let (w, end) = sp.rewrite_from(c, r);
            debug_assert_eq!(end, c);
            rels.push(w);
        }
    }
    sp.presentation = FinitePresentation::new(names, rels).expect("valid subgroup presentation");
    sp
}

impl SubgroupPresentation {
    pub fn presentation(&self) -> &FinitePresentation {
        &self.presentation
    }

    pub fn table(&self) -> &CosetTable {
        &self.table
    }

    pub fn num_generators(&self) -> usize {
        self.schreier.len()
    }

    /// `(c, x)` of each Schreier generator.
    pub fn schreier_pairs(&self) -> &[(usize, usize)] {
        &self.schreier
    }

    /// The Schreier generator as a word in the ambient generators.
    pub fn generator_word(&self, j: usize) -> Word {
        let (c, x) = self.schreier[j];
        let d = self.table.act(c, Letter::new(x, false));
        self.reps[c].mul(&Word::gen(x)).mul(&self.reps[d].inverse())
    }

    pub fn representative(&self, c: usize) -> &Word {
        &self.reps[c]
    }

    fn rewrite_from(&self, start: usize, w: &Word) -> (Word, usize) {
        let mut c = start;
        let mut out = Vec::new();
        for &l in w.letters() {
            if l.inverse {
                let d = self.table.act(c, l);
                if let Some(&j) = self.index_of.get(&(d, l.gen)) {
                    out.push(Letter::new(j, true));
                }
                c = d;
            } else {
                if let Some(&j) = self.index_of.get(&(c, l.gen)) {
                    out.push(Letter::new(j, false));
                }
                c = self.table.act(c, l);
            }
        }
        (Word::from_letters(out), c)
    }

    /// Rewrite a word of the subgroup in Schreier generators.
    pub fn rewrite(&self, w: &Word) -> Result<Word> {
        let (out, end) = self.rewrite_from(0, w);
        if end != 0 {
            return Err(Error::NotInSubgroup);
        }
        Ok(out)
    }

    /// Abelianized relation matrix of the subgroup.
    pub fn relation_matrix(&self) -> IntMatrix {
        self.presentation.relation_matrix()
    }

    /// Matrix of `h ↦ g^-1 h g` on the free abelian group on the Schreier
    /// generators, rows indexed by generators. `g` must normalize the
    /// subgroup.
    pub fn conjugation_matrix(&self, g: &Word) -> Result<IntMatrix> {
        let m = self.num_generators();
        let gi = g.inverse();
        let mut rows = Vec::with_capacity(m);
        for j in 0..m {
            let w = gi.mul(&self.generator_word(j)).mul(g);
            rows.push(self.rewrite(&w)?.exponent_sums(m));
        }
        Ok(if rows.is_empty() { IntMatrix::zeros(0, 0) } else { IntMatrix::from_rows(&rows) })
    }
}

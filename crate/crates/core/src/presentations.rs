//! Free group words, finite presentations, homomorphisms defined on
//! generators, and the catalog of groups used by the regression suite.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::enumerator::PermRealization;
use crate::error::{Error, Result};
use crate::zlinalg::{abelian_invariants, AbelianInvariants, IntMatrix, QuotientGroup};

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: usize, inverse: bool) -> Self {
        Letter { gen, inverse }
    }

    pub fn inv(self) -> Self {
        Letter { gen: self.gen, inverse: !self.inverse }
    }

    /// Column index in a coset table: `2*gen` for the generator, `2*gen+1`
    /// for its inverse.
    pub fn column(self) -> usize {
        2 * self.gen + usize::from(self.inverse)
    }

    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }
}

/// A freely reduced word in a free group.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn gen(g: usize) -> Self {
        Word(vec![Letter::new(g, false)])
    }

    /// `g^e`.
    pub fn power_of_gen(g: usize, e: i64) -> Self {
        let l = Letter::new(g, e < 0);
        Word(vec![l; e.unsigned_abs() as usize])
    }

    /// Build from letters, freely reducing.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// From `(generator, ±1)` pairs.
    pub fn from_pairs(pairs: &[(usize, i64)]) -> Self {
        Word::from_letters(pairs.iter().flat_map(|&(g, e)| {
            std::iter::repeat(Letter::new(g, e < 0)).take(e.unsigned_abs() as usize)
        }))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn mul(&self, other: &Word) -> Word {
        word_multiply(self, other)
    }

    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn conjugate_by(&self, g: &Word) -> Word {
        g.mul(self).mul(&g.inverse())
    }

    /// `[u, v] = u v u^-1 v^-1`.
    pub fn commutator(u: &Word, v: &Word) -> Word {
        u.mul(v).mul(&u.inverse()).mul(&v.inverse())
    }

    /// Remove matching first/last letters until cyclically reduced.
    pub fn cyclically_reduced(&self) -> Word {
        let mut s = 0;
        let mut e = self.0.len();
        while e - s >= 2 && self.0[s] == self.0[e - 1].inv() {
            s += 1;
            e -= 1;
        }
        Word(self.0[s..e].to_vec())
    }

    /// Exponent sum of each generator.
    pub fn exponent_sums(&self, ngens: usize) -> Vec<i64> {
        let mut v = vec![0i64; ngens];
        for l in &self.0 {
            v[l.gen] += l.sign();
        }
        v
    }

    pub fn max_gen(&self) -> Option<usize> {
        self.0.iter().map(|l| l.gen).max()
    }

    /// The same word with every generator index shifted by `offset`.
    pub fn shifted(&self, offset: usize) -> Word {
        Word(self.0.iter().map(|l| Letter::new(l.gen + offset, l.inverse)).collect())
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> WordDisplay<'a> {
        WordDisplay { word: self, names }
    }
}

/// Freely reduced product.
pub fn word_multiply(u: &Word, v: &Word) -> Word {
    let mut out = u.0.clone();
    let mut rest = v.0.iter().peekable();
    while let (Some(last), Some(&&next)) = (out.last(), rest.peek()) {
        if *last == next.inv() {
            out.pop();
            rest.next();
        } else {
            break;
        }
    }
    out.extend(rest);
    Word(out)
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [String],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters = self.word.letters();
        if letters.is_empty() {
            return write!(f, "1");
        }
        let mut i = 0;
        let mut first = true;
        while i < letters.len() {
            let l = letters[i];
            let mut j = i;
            while j < letters.len() && letters[j] == l {
                j += 1;
            }
            let run = (j - i) as i64 * l.sign();
            if !first {
                write!(f, " ")?;
            }
            first = false;
            let name = self
                .names
                .get(l.gen)
                .cloned()
                .unwrap_or_else(|| format!("g{}", l.gen));
            if run == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{run}")?;
            }
            i = j;
        }
        Ok(())
    }
}

/// A finite presentation `⟨gens | rels⟩`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinitePresentation {
    generators: Vec<String>,
    relators: Vec<Word>,
}

impl FinitePresentation {
    /// Relators are freely and cyclically reduced; trivial ones are dropped.
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if generators[..i].contains(g) {
                return Err(Error::InvalidInput(format!("duplicate generator {g:?}")));
            }
        }
        let n = generators.len();
        let mut rels = Vec::with_capacity(relators.len());
        for r in relators {
            if r.max_gen().is_some_and(|g| g >= n) {
                return Err(Error::InvalidInput(
                    "relator uses a generator index out of range".into(),
                ));
            }
            let r = Word::from_letters(r.0).cyclically_reduced();
            if !r.is_empty() {
                rels.push(r);
            }
        }
        Ok(FinitePresentation { generators, relators: rels })
    }

    /// Presentation on generators named `x0, x1, ...`.
    pub fn with_gens(n: usize, relators: Vec<Word>) -> Result<Self> {
        Self::new((0..n).map(|i| format!("x{i}")).collect(), relators)
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Rows are relators, columns generators.
    pub fn relation_matrix(&self) -> IntMatrix {
        let n = self.num_generators();
        let rows: Vec<Vec<i64>> = self.relators.iter().map(|r| r.exponent_sums(n)).collect();
        if rows.is_empty() {
            IntMatrix::zeros(0, n)
        } else {
            IntMatrix::from_rows(&rows)
        }
    }

    pub fn abelianization(&self) -> AbelianInvariants {
        abelian_invariants(&self.relation_matrix())
    }

    pub fn word_display<'a>(&'a self, w: &'a Word) -> WordDisplay<'a> {
        w.display(&self.generators)
    }

    pub fn generator_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == name)
    }
}

impl fmt::Display for FinitePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gens: {}; rels: ", self.generators.join(","))?;
        for (i, r) in self.relators.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", r.display(&self.generators))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Text format

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Colon,
    Semi,
    Comma,
    Caret,
    Eq,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Minus,
    Plus,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let push = |tok, out: &mut Vec<Spanned>| {
                out.push(Spanned { tok, line: li + 1, column })
            };
            match c {
                '#' => break,
                c if c.is_whitespace() => {}
                ':' => push(Tok::Colon, &mut out),
                ';' => push(Tok::Semi, &mut out),
                ',' => push(Tok::Comma, &mut out),
                '^' => push(Tok::Caret, &mut out),
                '=' => push(Tok::Eq, &mut out),
                '(' => push(Tok::LParen, &mut out),
                ')' => push(Tok::RParen, &mut out),
                '[' => push(Tok::LBracket, &mut out),
                ']' => push(Tok::RBracket, &mut out),
                '-' => push(Tok::Minus, &mut out),
                '+' => push(Tok::Plus, &mut out),
                c if c.is_ascii_digit() => {
                    let start = i;
                    while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                        i += 1;
                    }
                    let s: String = chars[start..=i].iter().collect();
                    let v = s.parse().map_err(|_| Error::Syntax {
                        line: li + 1,
                        column,
                        message: format!("integer {s} out of range"),
                    })?;
                    push(Tok::Int(v), &mut out);
                }
                c if c.is_alphabetic() || c == '_' => {
                    let start = i;
                    while i + 1 < chars.len()
                        && (chars[i + 1].is_alphanumeric() || chars[i + 1] == '_' || chars[i + 1] == '\'')
                    {
                        i += 1;
                    }
                    push(Tok::Ident(chars[start..=i].iter().collect()), &mut out);
                }
                other => {
                    return Err(Error::Syntax {
                        line: li + 1,
                        column,
                        message: format!("unexpected character {other:?}"),
                    })
                }
            }
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    gens: Vec<String>,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map_or(self.end, |s| (s.line, s.column))
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let (line, column) = self.here();
        Err(Error::Syntax { line, column, message: message.into() })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                self.expect(Tok::Colon, "':'")
            }
            _ => self.err(format!("expected '{kw}:'")),
        }
    }

    fn resolve(&self, name: &str, line: usize, column: usize) -> Result<Vec<Letter>> {
        if let Some(i) = self.gens.iter().position(|g| g == name) {
            return Ok(vec![Letter::new(i, false)]);
        }
        let single = |c: char| -> Option<Letter> {
            let s = c.to_string();
            if let Some(i) = self.gens.iter().position(|g| *g == s) {
                return Some(Letter::new(i, false));
            }
            if c.is_uppercase() {
                let lower = c.to_lowercase().to_string();
                if let Some(i) = self.gens.iter().position(|g| *g == lower) {
                    return Some(Letter::new(i, true));
                }
            }
            None
        };
        let chars: Vec<char> = name.chars().collect();
        if chars.len() == 1 {
            if let Some(l) = single(chars[0]) {
                return Ok(vec![l]);
            }
        } else if self.gens.iter().all(|g| g.chars().count() == 1) {
            // juxtaposed single-letter generators, e.g. "xy"
            if let Some(ls) = chars.iter().map(|&c| single(c)).collect::<Option<Vec<_>>>() {
                return Ok(ls);
            }
        }
        Err(Error::UndeclaredGenerator { name: name.to_string(), line, column })
    }

    fn integer(&mut self) -> Result<i64> {
        let neg = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                true
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(if neg { -v } else { v })
            }
            _ => self.err("expected integer exponent"),
        }
    }

    fn atom(&mut self) -> Result<Word> {
        let (line, column) = self.here();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(Word::from_letters(self.resolve(&name, line, column)?))
            }
            Some(Tok::Int(1)) => {
                self.pos += 1;
                Ok(Word::identity())
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let w = self.word()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(w)
            }
            Some(Tok::LBracket) => {
                self.pos += 1;
                let u = self.word()?;
                self.expect(Tok::Comma, "',' in commutator")?;
                let v = self.word()?;
                self.expect(Tok::RBracket, "']'")?;
                Ok(Word::commutator(&u, &v))
            }
            _ => self.err("expected generator, '(' or '['"),
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Ident(_)) | Some(Tok::LParen) | Some(Tok::LBracket) | Some(Tok::Int(1))
        )
    }

    fn word(&mut self) -> Result<Word> {
        let mut w = Word::identity();
        if !self.starts_factor() {
            return self.err("expected a word");
        }
        while self.starts_factor() {
            // "rels" keyword cannot appear inside a word; stop at section keywords
            if let Some(Tok::Ident(s)) = self.peek() {
                if (s == "rels" || s == "gens")
                    && self.toks.get(self.pos + 1).map(|t| &t.tok) == Some(&Tok::Colon)
                {
                    break;
                }
            }
            let mut f = self.atom()?;
            if self.peek() == Some(&Tok::Caret) {
                self.pos += 1;
                f = f.pow(self.integer()?);
            }
            w = w.mul(&f);
        }
        Ok(w)
    }

    fn relator_item(&mut self) -> Result<Vec<Word>> {
        let mut parts = vec![self.word()?];
        while self.peek() == Some(&Tok::Eq) {
            self.pos += 1;
            parts.push(self.word()?);
        }
        if parts.len() == 1 {
            return Ok(parts);
        }
        Ok(parts.windows(2).map(|p| p[0].mul(&p[1].inverse())).collect())
    }
}

/// Parse `gens: x,y; rels: y^2 x^-2, x^2 (x y)^-2`.
///
/// Words are sequences of generators, `g^k`, parenthesized subwords with
/// exponents and commutators `[u,v]`. An uppercase letter stands for the
/// inverse of the matching lowercase generator, `1` is the empty word, and
/// `u = v` is shorthand for the relator `u v^-1`.
pub fn parse_presentation(text: &str) -> Result<FinitePresentation> {
    let toks = tokenize(text)?;
    let end = toks.last().map_or((1, 1), |t| (t.line, t.column + 1));
    let mut p = Parser { toks, pos: 0, gens: Vec::new(), end };
    p.keyword("gens")?;
    loop {
        let (line, column) = p.here();
        match p.peek().cloned() {
            Some(Tok::Ident(name)) => {
                p.pos += 1;
                if p.gens.contains(&name) {
                    return Err(Error::Syntax {
                        line,
                        column,
                        message: format!("generator {name:?} declared twice"),
                    });
                }
                p.gens.push(name);
            }
            _ => {
                if p.gens.is_empty() {
                    return Err(Error::EmptyGenerators);
                }
                return p.err("expected generator name");
            }
        }
        match p.peek() {
            Some(Tok::Comma) => p.pos += 1,
            _ => break,
        }
    }
    p.expect(Tok::Semi, "';' after generator list")?;
    p.keyword("rels")?;
    let mut rels = Vec::new();
    if p.starts_factor() {
        rels.extend(p.relator_item()?);
        while p.peek() == Some(&Tok::Comma) {
            p.pos += 1;
            rels.extend(p.relator_item()?);
        }
    }
    if p.peek() == Some(&Tok::Semi) {
        p.pos += 1;
    }
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    FinitePresentation::new(p.gens, rels)
}

/// Parse a comma-separated list of words in the generators of `pres`.
pub fn parse_words(pres: &FinitePresentation, text: &str) -> Result<Vec<Word>> {
    let toks = tokenize(text)?;
    let end = toks.last().map_or((1, 1), |t| (t.line, t.column + 1));
    let mut p = Parser { toks, pos: 0, gens: pres.generators().to_vec(), end };
    let mut words = Vec::new();
    if p.peek().is_none() {
        return Ok(words);
    }
    words.push(p.word()?);
    while p.peek() == Some(&Tok::Comma) {
        p.pos += 1;
        words.push(p.word()?);
    }
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    Ok(words)
}

// ---------------------------------------------------------------------------
// Catalog

/// Families available through [`catalog`].
pub const CATALOG_FAMILIES: &[&str] = &[
    "q8n",
    "p48",
    "p120",
    "dihedral2k",
    "p8_3k",
    "cyclic",
    "zp_semidirect_z2",
    "example2",
    "free",
];

fn gens(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn want_params(name: &str, params: &[i64], n: usize) -> Result<()> {
    if params.len() != n {
        return Err(Error::InvalidParameter(format!(
            "{name} takes {n} parameter(s), got {}",
            params.len()
        )));
    }
    Ok(())
}

/// Presentations of the groups the regression suite computes with.
///
/// `q8n(n)`, `p48`, `p120`, `dihedral2k(k, n)`, `p8_3k(k)`, `cyclic(d)`,
/// `zp_semidirect_z2(p)`, `example2` and `free(r)`.
pub fn catalog(name: &str, params: &[i64]) -> Result<FinitePresentation> {
    let x = Word::gen(0);
    let y = Word::gen(1);
    let z = Word::gen(2);
    let xy = x.mul(&y);
    match name {
        "q8n" => {
            want_params(name, params, 1)?;
            let n = params[0];
            if n < 1 {
                return Err(Error::InvalidParameter("q8n needs n >= 1".into()));
            }
            // y^{2n} = x^2 = (xy)^2
            FinitePresentation::new(
                gens(&["x", "y"]),
                vec![y.pow(2 * n).mul(&x.pow(-2)), x.pow(2).mul(&xy.pow(-2))],
            )
        }
        "p48" | "p120" => {
            want_params(name, params, 0)?;
            let e = if name == "p48" { 4 } else { 5 };
            // x^2 = (xy)^3 = y^e, x^4 = 1
            FinitePresentation::new(
                gens(&["x", "y"]),
                vec![
                    x.pow(2).mul(&xy.pow(-3)),
                    xy.pow(3).mul(&y.pow(-e)),
                    x.pow(4),
                ],
            )
        }
        "dihedral2k" => {
            want_params(name, params, 2)?;
            let (k, n) = (params[0], params[1]);
            if !(1..=20).contains(&k) || n < 0 {
                return Err(Error::InvalidParameter("dihedral2k needs 1 <= k <= 20, n >= 0".into()));
            }
            // xyx^{-1} = y^{-1}
            FinitePresentation::new(
                gens(&["x", "y"]),
                vec![
                    x.pow(1 << k),
                    y.pow(2 * n + 1),
                    x.mul(&y).mul(&x.inverse()).mul(&y),
                ],
            )
        }
        "p8_3k" => {
            want_params(name, params, 1)?;
            let k = params[0];
            if !(1..=6).contains(&k) {
                return Err(Error::InvalidParameter("p8_3k needs 1 <= k <= 6".into()));
            }
            let zi = z.inverse();
            FinitePresentation::new(
                gens(&["x", "y", "z"]),
                vec![
                    x.pow(2).mul(&xy.pow(-2)),
                    xy.pow(2).mul(&y.pow(-2)),
                    zi.mul(&x).mul(&z).mul(&y.inverse()),
                    zi.mul(&y).mul(&z).mul(&xy.inverse()),
                    z.pow(3i64.pow(k as u32)),
                ],
            )
        }
        "cyclic" => {
            want_params(name, params, 1)?;
            let d = params[0];
            if d < 1 {
                return Err(Error::InvalidParameter("cyclic needs d >= 1".into()));
            }
            FinitePresentation::new(gens(&["x"]), vec![x.pow(d)])
        }
        "zp_semidirect_z2" => {
            want_params(name, params, 1)?;
            let p = params[0];
            if p <= 1 || p % 2 == 0 {
                return Err(Error::InvalidParameter(
                    "zp_semidirect_z2 needs an odd p > 1".into(),
                ));
            }
            let (r, t) = (Word::gen(0), Word::gen(1));
            FinitePresentation::new(
                gens(&["r", "t"]),
                vec![r.pow(p), t.pow(2), t.mul(&r).mul(&t.inverse()).mul(&r)],
            )
        }
        "example2" => {
            want_params(name, params, 0)?;
            // A ⋊ Z with A = Z[t^±]/(t-1)^2 on the basis a = 1, c = t - 1.
            // The relator (t-1)^2 has augmentation 0.
            let (a, c, t) = (Word::gen(0), Word::gen(1), Word::gen(2));
            let ti = t.inverse();
            FinitePresentation::new(
                gens(&["a", "c", "t"]),
                vec![
                    Word::commutator(&a, &c),
                    t.mul(&a).mul(&ti).mul(&c.inverse()).mul(&a.inverse()),
                    t.mul(&c).mul(&ti).mul(&c.inverse()),
                ],
            )
        }
        "free" => {
            want_params(name, params, 1)?;
            let r = params[0];
            if !(0..=64).contains(&r) {
                return Err(Error::InvalidParameter("free needs 0 <= r <= 64".into()));
            }
            let names = match r {
                1 => gens(&["a"]),
                2 => gens(&["a", "b"]),
                _ => (0..r).map(|i| format!("x{i}")).collect(),
            };
            FinitePresentation::new(names, Vec::new())
        }
        other => Err(Error::UnknownFamily(other.to_string())),
    }
}

/// Parse `catalog:q8n(3)`, `q8n(3)`, `p120` or `q8n(1)*cyclic(3)`.
pub fn parse_catalog_ref(s: &str) -> Result<FinitePresentation> {
    let s = s.trim();
    let s = s.strip_prefix("catalog:").unwrap_or(s);
    let mut factors = s.split('*').map(str::trim);
    let first = factors.next().unwrap_or("");
    let mut pres = parse_catalog_factor(first)?;
    for f in factors {
        pres = direct_product(&pres, &parse_catalog_factor(f)?);
    }
    Ok(pres)
}

fn parse_catalog_factor(s: &str) -> Result<FinitePresentation> {
    let (name, params) = match s.find('(') {
        Some(i) => {
            let inner = s[i + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::InvalidInput(format!("unbalanced parentheses in {s:?}")))?;
            let params = inner
                .split(',')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(|p| {
                    p.parse::<i64>()
                        .map_err(|_| Error::InvalidParameter(format!("bad parameter {p:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            (&s[..i], params)
        }
        None => (s, Vec::new()),
    };
    catalog(name.trim(), &params)
}

/// `G × H`: disjoint generators, both relator sets, and every commutator
/// between a generator of `G` and one of `H`.
pub fn direct_product(g: &FinitePresentation, h: &FinitePresentation) -> FinitePresentation {
    let ng = g.num_generators();
    let mut names = g.generators.clone();
    for n in &h.generators {
        let mut name = n.clone();
        while names.contains(&name) {
            name.push('\'');
        }
        names.push(name);
    }
    let mut rels = g.relators.clone();
    rels.extend(h.relators.iter().map(|r| r.shifted(ng)));
    for i in 0..ng {
        for j in 0..h.num_generators() {
            rels.push(Word::commutator(&Word::gen(i), &Word::gen(ng + j)));
        }
    }
    FinitePresentation::new(names, rels).expect("product of valid presentations is valid")
}

// ---------------------------------------------------------------------------
// Homomorphisms

/// A target for homomorphisms defined on generators.
#[derive(Clone, Debug, PartialEq)]
pub enum TargetGroup {
    /// `⊕ Z/d_i ⊕ Z^rank`; elements are coordinate vectors, torsion
    /// coordinates first.
    Abelian(AbelianInvariants),
    /// The group generated by a set of permutations.
    Perm(PermRealization),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TargetElement {
    Abelian(Vec<i64>),
    /// Image of each point under right action.
    Perm(Vec<usize>),
}

impl TargetGroup {
    pub fn identity(&self) -> TargetElement {
        match self {
            TargetGroup::Abelian(a) => TargetElement::Abelian(vec![0; a.torsion.len() + a.rank]),
            TargetGroup::Perm(p) => TargetElement::Perm((0..p.degree()).collect()),
        }
    }

    fn normalize(&self, e: TargetElement) -> TargetElement {
        match (self, e) {
            (TargetGroup::Abelian(a), TargetElement::Abelian(mut v)) => {
                for (x, &d) in v.iter_mut().zip(&a.torsion) {
                    *x = x.rem_euclid(d as i64);
                }
                TargetElement::Abelian(v)
            }
            (_, e) => e,
        }
    }

    /// `a` then `b`.
    pub fn mul(&self, a: &TargetElement, b: &TargetElement) -> TargetElement {
        match (a, b) {
            (TargetElement::Abelian(x), TargetElement::Abelian(y)) => self.normalize(
                TargetElement::Abelian(x.iter().zip(y).map(|(p, q)| p + q).collect()),
            ),
            (TargetElement::Perm(x), TargetElement::Perm(y)) => {
                TargetElement::Perm(x.iter().map(|&i| y[i]).collect())
            }
            _ => panic!("mixed target element kinds"),
        }
    }

    pub fn inverse(&self, a: &TargetElement) -> TargetElement {
        match a {
            TargetElement::Abelian(x) => {
                self.normalize(TargetElement::Abelian(x.iter().map(|v| -v).collect()))
            }
            TargetElement::Perm(x) => {
                let mut inv = vec![0; x.len()];
                for (i, &j) in x.iter().enumerate() {
                    inv[j] = i;
                }
                TargetElement::Perm(inv)
            }
        }
    }

    fn accepts(&self, e: &TargetElement) -> bool {
        match (self, e) {
            (TargetGroup::Abelian(a), TargetElement::Abelian(v)) => {
                v.len() == a.torsion.len() + a.rank
            }
            (TargetGroup::Perm(p), TargetElement::Perm(v)) => {
                v.len() == p.degree() && {
                    let mut seen = vec![false; v.len()];
                    v.iter().all(|&i| i < seen.len() && !std::mem::replace(&mut seen[i], true))
                }
            }
            _ => false,
        }
    }

    pub fn order(&self) -> Option<u64> {
        match self {
            TargetGroup::Abelian(a) => a.order(),
            TargetGroup::Perm(p) => crate::enumerator::group_order(p, 1 << 22).ok(),
        }
    }
}

/// A homomorphism from a finitely presented group, given on generators.
#[derive(Clone, Debug)]
pub struct GroupHom {
    source: FinitePresentation,
    target: TargetGroup,
    images: Vec<TargetElement>,
}

impl GroupHom {
    /// Checks that every relator maps to the identity.
    pub fn new(
        source: FinitePresentation,
        target: TargetGroup,
        images: Vec<TargetElement>,
    ) -> Result<Self> {
        if images.len() != source.num_generators() {
            return Err(Error::InvalidInput(format!(
                "{} generator images for {} generators",
                images.len(),
                source.num_generators()
            )));
        }
        if let Some(bad) = images.iter().find(|e| !target.accepts(e)) {
            return Err(Error::InvalidInput(format!("image {bad:?} is not in the target")));
        }
        let images = images.into_iter().map(|e| target.normalize(e)).collect();
        let hom = GroupHom { source, target, images };
        let id = hom.target.identity();
        for r in hom.source.relators() {
            if hom.eval(r) != id {
                return Err(Error::InvalidHom(hom.source.word_display(r).to_string()));
            }
        }
        Ok(hom)
    }

    /// Abelian-target homomorphism from integer coordinate images.
    pub fn to_abelian(
        source: FinitePresentation,
        target: AbelianInvariants,
        images: Vec<Vec<i64>>,
    ) -> Result<Self> {
        Self::new(
            source,
            TargetGroup::Abelian(target),
            images.into_iter().map(TargetElement::Abelian).collect(),
        )
    }

    pub fn source(&self) -> &FinitePresentation {
        &self.source
    }

    pub fn target(&self) -> &TargetGroup {
        &self.target
    }

    pub fn images(&self) -> &[TargetElement] {
        &self.images
    }

    pub fn eval(&self, w: &Word) -> TargetElement {
        let mut acc = self.target.identity();
        for l in w.letters() {
            let img = &self.images[l.gen];
            let f = if l.inverse { self.target.inverse(img) } else { img.clone() };
            acc = self.target.mul(&acc, &f);
        }
        acc
    }

    pub fn is_surjective(&self) -> bool {
        match &self.target {
            TargetGroup::Abelian(a) => {
                let k = a.torsion.len() + a.rank;
                let mut rows: Vec<Vec<i64>> = self
                    .images
                    .iter()
                    .map(|e| match e {
                        TargetElement::Abelian(v) => v.clone(),
                        _ => unreachable!(),
                    })
                    .collect();
                for (i, &d) in a.torsion.iter().enumerate() {
                    let mut r = vec![0; k];
                    r[i] = d as i64;
                    rows.push(r);
                }
                if rows.is_empty() {
                    return k == 0;
                }
                abelian_invariants(&IntMatrix::from_rows(&rows)).is_trivial()
            }
            TargetGroup::Perm(p) => {
                let gens: Vec<Vec<usize>> = self
                    .images
                    .iter()
                    .map(|e| match e {
                        TargetElement::Perm(v) => v.clone(),
                        _ => unreachable!(),
                    })
                    .collect();
                let sub = PermRealization::new(p.degree(), gens);
                match (
                    crate::enumerator::group_order(&sub, 1 << 22),
                    crate::enumerator::group_order(p, 1 << 22),
                ) {
                    (Ok(a), Ok(b)) => a == b,
                    _ => false,
                }
            }
        }
    }
}

/// The abelianization map `π → H_1(π)`, with the target in canonical
/// coordinates (torsion first, then free).
pub fn abelianization_map(pres: &FinitePresentation) -> GroupHom {
    let rel = pres.relation_matrix();
    let n = pres.num_generators();
    let q = QuotientGroup::new(&rel, n);
    let inv = q.invariants();
    let tors = q.torsion_coordinates();
    let free_coords = q.free_coordinates();
    let images = (0..n)
        .map(|i| {
            let mut e = vec![num_bigint::BigInt::from(0); n];
            e[i] = num_bigint::BigInt::from(1);
            let y = q.reduce(&e);
            let mut v: Vec<i64> = tors
                .iter()
                .map(|(pos, _)| num_traits::ToPrimitive::to_i64(&y[*pos]).unwrap())
                .collect();
            v.extend(
                free_coords
                    .iter()
                    .map(|&pos| num_traits::ToPrimitive::to_i64(&y[pos]).expect("coordinate overflow")),
            );
            TargetElement::Abelian(v)
        })
        .collect();
    GroupHom::new(pres.clone(), TargetGroup::Abelian(inv), images)
        .expect("abelianization respects relators")
}

/// Compose `φ: π → A` with a surjection of abelian groups given on the
/// canonical generators of `A`.
pub fn compose_abelian(
    phi: &GroupHom,
    target: AbelianInvariants,
    generator_images: &[Vec<i64>],
) -> Result<GroupHom> {
    let images = phi
        .images()
        .iter()
        .map(|e| match e {
            TargetElement::Abelian(v) => {
                let mut out = vec![0i64; target.torsion.len() + target.rank];
                for (c, gi) in v.iter().zip(generator_images) {
                    for (o, g) in out.iter_mut().zip(gi) {
                        *o += c * g;
                    }
                }
                Ok(out)
            }
            _ => Err(Error::InvalidInput("composition needs an abelian source map".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    GroupHom::to_abelian(phi.source().clone(), target, images)
}

/// Map from generator name to index.
pub fn generator_map(pres: &FinitePresentation) -> HashMap<String, usize> {
    pres.generators()
        .iter()
        .enumerate()
        .map(|(i, g)| (g.clone(), i))
        .collect()
}

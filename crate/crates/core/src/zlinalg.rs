//! Exact integer linear algebra.
//!
//! Matrices are dense and row-major over arbitrary-precision integers.
//! Lattices are always represented by the row span of a matrix, and a
//! finitely generated abelian group is the cokernel `Z^cols / rowspan`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix rows");
            for (j, v) in row.iter().enumerate() {
                m.data[i * c + j] = v.clone().into();
            }
        }
        m
    }

    /// A `rows x cols` matrix built from an existing flat row-major buffer.
    pub fn from_flat(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols);
        IntMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vec(&self, i: usize) -> Vec<BigInt> {
        self.row(i).to_vec()
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[BigInt]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.to_i64()).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![BigInt::zero(); self.cols];
        for (k, xk) in x.iter().enumerate() {
            if xk.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let b = self.get(k, j);
                if !b.is_zero() {
                    *o += xk * b;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        IntMatrix::from_flat(self.rows, self.cols, data)
    }

    pub fn scale(&self, c: &BigInt) -> IntMatrix {
        IntMatrix::from_flat(
            self.rows,
            self.cols,
            self.data.iter().map(|a| a * c).collect(),
        )
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &IntMatrix) -> IntMatrix {
        if self.rows == 0 {
            return IntMatrix { rows: other.rows, cols: other.cols, data: other.data.clone() };
        }
        if other.rows == 0 {
            return self.clone();
        }
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        IntMatrix::from_flat(self.rows + other.rows, self.cols, data)
    }

    pub fn push_row(&mut self, row: Vec<BigInt>) {
        if self.rows == 0 && self.cols == 0 {
            self.cols = row.len();
        }
        assert_eq!(row.len(), self.cols);
        self.data.extend(row);
        self.rows += 1;
    }

    /// Keep only the listed columns, in order.
    pub fn select_cols(&self, cols: &[usize]) -> IntMatrix {
        let mut out = Self::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (jj, &j) in cols.iter().enumerate() {
                out.data[i * cols.len() + jj] = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> IntMatrix {
        let mut out = Self::zeros(0, self.cols);
        out.rows = 0;
        for &i in rows {
            out.data.extend(self.row(i).iter().cloned());
            out.rows += 1;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Determinant by fraction-free Bareiss elimination. Panics if not square.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1).clone()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += c * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = self.get(src, j) * c;
            if !v.is_zero() {
                self.data[dst * self.cols + j] += v;
            }
        }
    }

    /// col[dst] += c * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = self.get(i, src) * c;
            if !v.is_zero() {
                self.data[i * self.cols + dst] += v;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j).clone();
            self.set(i, j, v);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, j).clone();
            self.set(i, j, v);
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// `U * M * V = D` with `U`, `V` unimodular and `D` in Smith form.
///
/// The inverses of `U` and `V` are carried along since cokernel and
/// kernel computations need them.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SmithForm {
    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        let k = self.d.rows().min(self.d.cols());
        (0..k).take_while(|&i| !self.d.get(i, i).is_zero()).count()
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.d.rows().min(self.d.cols());
        (0..k).map(|i| self.d.get(i, i).clone()).collect()
    }
}

struct SnfState {
    d: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl SnfState {
    fn row_add(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.d.add_row_multiple(dst, src, c);
        self.u.add_row_multiple(dst, src, c);
        let neg = -c;
        self.u_inv.add_col_multiple(src, dst, &neg);
    }

    fn col_add(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.d.add_col_multiple(dst, src, c);
        self.v.add_col_multiple(dst, src, c);
        let neg = -c;
        self.v_inv.add_row_multiple(src, dst, &neg);
    }

    fn row_swap(&mut self, a: usize, b: usize) {
        self.d.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn col_swap(&mut self, a: usize, b: usize) {
        self.d.swap_cols(a, b);
        self.v.swap_cols(a, b);
        self.v_inv.swap_rows(a, b);
    }

    fn row_negate(&mut self, i: usize) {
        self.d.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }
}

/// Smith normal form over Z.
///
/// Pivot: smallest nonzero absolute value in the remaining block, ties
/// broken by (row, col) order.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = (m.rows(), m.cols());
    let mut st = SnfState {
        d: m.clone(),
        u: IntMatrix::identity(rows),
        u_inv: IntMatrix::identity(rows),
        v: IntMatrix::identity(cols),
        v_inv: IntMatrix::identity(cols),
    };
    let k = rows.min(cols);
    for t in 0..k {
        let Some((pi, pj)) = min_pivot(&st.d, t) else {
            break;
        };
        st.row_swap(t, pi);
        st.col_swap(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if st.d.get(i, t).is_zero() {
                    continue;
                }
                let q = st.d.get(i, t).div_floor(st.d.get(t, t));
                st.row_add(i, t, &-q);
                if !st.d.get(i, t).is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if st.d.get(t, j).is_zero() {
                    continue;
                }
                let q = st.d.get(t, j).div_floor(st.d.get(t, t));
                st.col_add(j, t, &-q);
                if !st.d.get(t, j).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // a smaller remainder now sits in row or column t
                let (pi, pj) = min_pivot_cross(&st.d, t);
                st.row_swap(t, pi);
                st.col_swap(t, pj);
                continue;
            }
            // row and column t are clear; enforce divisibility of the block
            let p = st.d.get(t, t).clone();
            let bad = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !st.d.get(i, j).is_multiple_of(&p))
            });
            match bad {
                Some(i) => {
                    st.row_add(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if st.d.get(t, t).is_negative() {
            st.row_negate(t);
        }
    }
    SmithForm {
        u: st.u,
        u_inv: st.u_inv,
        d: st.d,
        v: st.v,
        v_inv: st.v_inv,
    }
}

fn min_pivot(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let v = d.get(i, j);
            if v.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if d.get(bi, bj).abs() <= v.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

fn min_pivot_cross(d: &IntMatrix, t: usize) -> (usize, usize) {
    let mut best = (t, t);
    let mut best_abs = d.get(t, t).abs();
    for i in t + 1..d.rows() {
        let v = d.get(i, t).abs();
        if !v.is_zero() && (best_abs.is_zero() || v < best_abs) {
            best = (i, t);
            best_abs = v;
        }
    }
    for j in t + 1..d.cols() {
        let v = d.get(t, j).abs();
        if !v.is_zero() && (best_abs.is_zero() || v < best_abs) {
            best = (t, j);
            best_abs = v;
        }
    }
    best
}

/// Invariant factors and free rank of a finitely generated abelian group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub struct AbelianInvariants {
    pub torsion: Vec<u64>,
    pub rank: usize,
}

impl AbelianInvariants {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        AbelianInvariants { torsion: Vec::new(), rank }
    }

    /// Canonical invariants of `Z^rank ⊕ ⊕ Z/c_i` for arbitrary positive `c_i`.
    pub fn from_cyclic_orders(orders: &[u64], rank: usize) -> Self {
        // p-primary decomposition, then reassemble the divisibility chain
        let mut prime_powers: std::collections::BTreeMap<u64, Vec<u64>> = Default::default();
        for &c in orders {
            assert!(c > 0, "cyclic order must be positive");
            for (p, e) in factorize(c) {
                prime_powers.entry(p).or_default().push(p.pow(e));
            }
        }
        let len = prime_powers.values().map(Vec::len).max().unwrap_or(0);
        let mut torsion = vec![1u64; len];
        for powers in prime_powers.values_mut() {
            powers.sort_unstable();
            let off = len - powers.len();
            for (i, q) in powers.iter().enumerate() {
                torsion[off + i] *= q;
            }
        }
        AbelianInvariants { torsion, rank }
    }

    /// Invariants from a Smith diagonal (entries may be 0 or 1), given the
    /// number of generators.
    pub fn from_diagonal(diag: &[BigInt], generators: usize) -> Self {
        let mut torsion = Vec::new();
        let mut nonzero = 0;
        for d in diag {
            if d.is_zero() {
                continue;
            }
            nonzero += 1;
            if !d.is_one() {
                torsion.push(d.to_u64().expect("invariant factor exceeds u64"));
            }
        }
        AbelianInvariants { torsion, rank: generators - nonzero }
    }

    pub fn is_trivial(&self) -> bool {
        self.torsion.is_empty() && self.rank == 0
    }

    pub fn is_finite(&self) -> bool {
        self.rank == 0
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> u64 {
        self.torsion.iter().product()
    }

    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<u64> {
        self.is_finite().then(|| self.torsion_order())
    }

    /// Direct sum, canonicalized.
    pub fn direct_sum(&self, other: &AbelianInvariants) -> Self {
        let mut orders = self.torsion.clone();
        orders.extend(&other.torsion);
        Self::from_cyclic_orders(&orders, self.rank + other.rank)
    }

    pub fn is_elementary_abelian(&self, p: u64) -> bool {
        self.rank == 0 && self.torsion.iter().all(|&d| d == p)
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z{d}")).collect();
        match self.rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        write!(f, "{}", parts.join(" x "))
    }
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

/// The coefficient ring R of the series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "p")]
pub enum RSpec {
    /// The integers; units are ±1.
    Z,
    /// The rationals.
    Q,
    /// Z localized at the prime p: integers prime to p are inverted.
    ZLocP(u64),
    /// The field Z/p.
    ZModP(u64),
}

impl RSpec {
    pub fn validate(self) -> Result<Self> {
        match self {
            RSpec::ZLocP(p) | RSpec::ZModP(p) if !is_prime(p) => {
                Err(Error::InvalidInput(format!("coefficient prime {p} is not prime")))
            }
            _ => Ok(self),
        }
    }

    /// Whether the integer `s` is invertible in R.
    pub fn is_unit(self, s: &BigInt) -> bool {
        match self {
            RSpec::Z => s.abs().is_one(),
            RSpec::Q => !s.is_zero(),
            RSpec::ZLocP(p) | RSpec::ZModP(p) => !s.is_zero() && !s.is_multiple_of(&BigInt::from(p)),
        }
    }

    /// For an integer modulus `d > 0`, the part of `Z/d` that survives
    /// killing S-torsion, i.e. the largest divisor `c | d` with `Z/d ->> Z/c`
    /// having S-torsion kernel. `d = 0` (a free summand) survives unless
    /// R is a field of positive characteristic (not handled here).
    fn surviving_modulus(self, d: u64) -> u64 {
        match self {
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

    pub fn prime(self) -> Option<u64> {
        match self {
            RSpec::ZLocP(p) | RSpec::ZModP(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_subring_of_q(self) -> bool {
        !matches!(self, RSpec::ZModP(_))
    }

    /// Parse the CLI forms `Z`, `Q`, `Zloc:p`, `Zp:p`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let r = match s {
            "Z" => RSpec::Z,
            "Q" => RSpec::Q,
            _ => {
                let (kind, p) = s
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidInput(format!("unknown coefficient ring {s:?}")))?;
                let p: u64 = p
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad prime in {s:?}")))?;
                match kind.trim() {
                    "Zloc" => RSpec::ZLocP(p),
                    "Zp" => RSpec::ZModP(p),
                    _ => return Err(Error::InvalidInput(format!("unknown coefficient ring {s:?}"))),
                }
            }
        };
        r.validate()
    }
}

impl fmt::Display for RSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RSpec::Z => write!(f, "Z"),
            RSpec::Q => write!(f, "Q"),
            RSpec::ZLocP(p) => write!(f, "Zloc:{p}"),
            RSpec::ZModP(p) => write!(f, "Zp:{p}"),
        }
    }
}

/// Cokernel invariants of a relation matrix whose rows are relations and
/// whose columns are indexed by generators.
pub fn abelian_invariants(relations: &IntMatrix) -> AbelianInvariants {
    if relations.rows() == 0 {
        return AbelianInvariants::free(relations.cols());
    }
    let snf = smith_normal_form(relations);
    AbelianInvariants::from_diagonal(&snf.diagonal(), relations.cols())
}

/// Quotient of a finitely generated abelian group by its S-torsion, for
/// R a subring of Q.
pub fn s_torsion_quotient(a: &AbelianInvariants, r: RSpec) -> Result<AbelianInvariants> {
    if !r.is_subring_of_q() {
        return Err(Error::UnsupportedCoefficients(format!(
            "S-torsion quotient needs R inside Q, got {r}"
        )));
    }
    let orders: Vec<u64> = a
        .torsion
        .iter()
        .map(|&d| r.surviving_modulus(d))
        .filter(|&c| c > 1)
        .collect();
    Ok(AbelianInvariants::from_cyclic_orders(&orders, a.rank))
}

/// Generators of `{v : M v = 0}` over `Z` (modulus 0) or over `Z/modulus`.
///
/// Vectors are columns of the input's right kernel; entries are reduced
/// into `[0, modulus)` when a modulus is given.
pub fn kernel_mod(m: &IntMatrix, modulus: u64) -> Vec<Vec<BigInt>> {
    let cols = m.cols();
    if m.rows() == 0 {
        return (0..cols)
            .map(|j| {
                let mut e = vec![BigInt::zero(); cols];
                e[j] = BigInt::one();
                e
            })
            .filter(|v| modulus != 1 || v.iter().all(Zero::is_zero))
            .collect();
    }
    let snf = smith_normal_form(m);
    let diag = snf.diagonal();
    let n = BigInt::from(modulus);
    let mut out = Vec::new();
    for j in 0..cols {
        let d = diag.get(j).cloned().unwrap_or_else(BigInt::zero);
        let scale = if modulus == 0 {
            if d.is_zero() {
                BigInt::one()
            } else {
                continue;
            }
        } else {
            let g = d.gcd(&n);
            &n / g
        };
        if modulus != 0 && scale == n {
            continue;
        }
        let mut v: Vec<BigInt> = (0..cols).map(|i| snf.v.get(i, j) * &scale).collect();
        if modulus != 0 {
            for x in v.iter_mut() {
                *x = x.mod_floor(&n);
            }
        }
        out.push(v);
    }
    out
}

/// Basis (as rows) of the lattice spanned by the rows of `gens`, in `Z^dim`.
pub fn row_lattice_basis(gens: &IntMatrix, dim: usize) -> IntMatrix {
    if gens.rows() == 0 {
        return IntMatrix::zeros(0, dim);
    }
    assert_eq!(gens.cols(), dim);
    let snf = smith_normal_form(gens);
    let mut basis = IntMatrix::zeros(0, dim);
    basis.cols = dim;
    for (i, d) in snf.diagonal().iter().enumerate() {
        if d.is_zero() {
            break;
        }
        basis.push_row(snf.v_inv.row(i).iter().map(|x| x * d).collect());
    }
    basis
}

/// Basis (as rows) of the left kernel `{x : x M = 0}`.
pub fn left_kernel(m: &IntMatrix) -> IntMatrix {
    let rows = m.rows();
    let mut out = IntMatrix::zeros(0, rows);
    out.cols = rows;
    if rows == 0 {
        return out;
    }
    if m.cols() == 0 {
        return IntMatrix::identity(rows);
    }
    let snf = smith_normal_form(m);
    let r = snf.rank();
    for i in r..rows {
        out.push_row(snf.u.row_vec(i));
    }
    out
}

/// `{x ∈ Z^m : x F ∈ rowspan(B)}` as a row basis, where `F` is `m x n` and
/// `B` has `n` columns.
pub fn lattice_preimage(f: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let m = f.rows();
    let stacked = f.vstack(&b.scale(&BigInt::from(-1)));
    let ker = left_kernel(&stacked);
    let proj = ker.select_cols(&(0..m).collect::<Vec<_>>());
    row_lattice_basis(&proj, m)
}

/// Intersection of two row lattices in `Z^dim`.
pub fn lattice_intersection(a: &IntMatrix, b: &IntMatrix, dim: usize) -> IntMatrix {
    if a.rows() == 0 || b.rows() == 0 {
        return IntMatrix::zeros(0, dim);
    }
    let stacked = a.vstack(&b.scale(&BigInt::from(-1)));
    let ker = left_kernel(&stacked);
    let coeffs = ker.select_cols(&(0..a.rows()).collect::<Vec<_>>());
    row_lattice_basis(&coeffs.mul(a), dim)
}

/// The abelian group `Z^dim / L` with canonical coordinates.
///
/// With `U L V = D`, an element `x` has coordinates `y = x V`; the class of
/// `x` is determined by `y_i mod d_i` (`d_i = 0` meaning a free coordinate).
#[derive(Clone, Debug)]
pub struct QuotientGroup {
    dim: usize,
    v: IntMatrix,
    v_inv: IntMatrix,
    moduli: Vec<BigInt>,
}

impl QuotientGroup {
    pub fn new(relations: &IntMatrix, dim: usize) -> Self {
        if relations.rows() == 0 {
            return QuotientGroup {
                dim,
                v: IntMatrix::identity(dim),
                v_inv: IntMatrix::identity(dim),
                moduli: vec![BigInt::zero(); dim],
            };
        }
        assert_eq!(relations.cols(), dim);
        let snf = smith_normal_form(relations);
        let mut moduli = snf.diagonal();
        moduli.resize(dim, BigInt::zero());
        QuotientGroup { dim, v: snf.v, v_inv: snf.v_inv, moduli }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn invariants(&self) -> AbelianInvariants {
        AbelianInvariants::from_diagonal(&self.moduli, self.dim)
    }

    /// Canonical coordinates; torsion coordinates are reduced into `[0, d)`,
    /// coordinates with `d = 1` are always 0.
    pub fn reduce(&self, x: &[BigInt]) -> Vec<BigInt> {
        let y = self.v.apply_row(x);
        y.into_iter()
            .zip(&self.moduli)
            .map(|(yi, d)| if d.is_zero() { yi } else { yi.mod_floor(d) })
            .collect()
    }

    pub fn is_zero(&self, x: &[BigInt]) -> bool {
        self.reduce(x).iter().all(Zero::is_zero)
    }

    /// Whether `x` has finite order in the quotient.
    pub fn is_torsion(&self, x: &[BigInt]) -> bool {
        let y = self.v.apply_row(x);
        y.iter().zip(&self.moduli).all(|(yi, d)| !d.is_zero() || yi.is_zero())
    }

    /// Lift canonical coordinates back to `Z^dim`.
    pub fn lift(&self, y: &[BigInt]) -> Vec<BigInt> {
        self.v_inv.apply_row(y)
    }

    /// Torsion moduli greater than one with their coordinate positions.
    pub fn torsion_coordinates(&self) -> Vec<(usize, BigInt)> {
        self.moduli
            .iter()
            .enumerate()
            .filter(|(_, d)| !d.is_zero() && !d.is_one())
            .map(|(i, d)| (i, d.clone()))
            .collect()
    }

    /// Positions of the free coordinates.
    pub fn free_coordinates(&self) -> Vec<usize> {
        (0..self.dim).filter(|&i| self.moduli[i].is_zero()).collect()
    }

    /// Modulus of each canonical coordinate; 0 for free coordinates.
    pub fn moduli(&self) -> &[BigInt] {
        &self.moduli
    }

    /// Lifts of every element of the torsion subgroup, in lexicographic
    /// coordinate order. `None` when more than `cap` elements.
    pub fn torsion_elements(&self, cap: u64) -> Option<Vec<Vec<BigInt>>> {
        let coords = self.torsion_coordinates();
        let mut total: u64 = 1;
        for (_, d) in &coords {
            total = total.checked_mul(d.to_u64()?)?;
            if total > cap {
                return None;
            }
        }
        let mut out = Vec::with_capacity(total as usize);
        let mut y = vec![BigInt::zero(); self.dim];
        loop {
            out.push(self.lift(&y));
            let mut k = coords.len();
            loop {
                if k == 0 {
                    return Some(out);
                }
                k -= 1;
                let (pos, d) = &coords[k];
                y[*pos] += 1;
                if &y[*pos] < d {
                    break;
                }
                y[*pos] = BigInt::zero();
            }
        }
    }

    /// Row basis of the preimage in `Z^dim` of the S-torsion subgroup.
    pub fn s_torsion_lattice(&self, r: RSpec) -> IntMatrix {
        let mut rows = IntMatrix::zeros(0, self.dim);
        rows.cols = self.dim;
        for (i, d) in self.moduli.iter().enumerate() {
            if d.is_zero() {
                continue;
            }
            let di = d.to_u64().expect("modulus exceeds u64");
            let c = match r {
                RSpec::Z => di,
                RSpec::Q => 1,
                RSpec::ZLocP(p) | RSpec::ZModP(p) => {
                    let mut c = 1;
                    let mut d = di;
                    while d % p == 0 {
                        d /= p;
                        c *= p;
                    }
                    c
                }
            };
            // coordinate y_i ranges over c Z
            rows.push_row(self.v_inv.row(i).iter().map(|x| x * BigInt::from(c)).collect());
        }
        rows
    }

    /// Row basis of the preimage of the torsion subgroup.
    pub fn torsion_lattice(&self) -> IntMatrix {
        self.s_torsion_lattice(RSpec::Q)
    }
}

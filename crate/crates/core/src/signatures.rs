//! Levine–Tristram signatures and ρ-invariants of knots from Seifert matrices.
//!
//! The signature at `ω = e^{iθ}` is that of the hermitian form
//! `(1−ω)A + (1−ω̄)Aᵀ`, computed numerically from a real symmetric
//! realification. Where the form degenerates we use the two-sided average.
//! Degenerate angles are located exactly through the Alexander polynomial
//! `det(tA − Aᵀ)`, which lets ρ over `Z_d` come out as an exact rational.

use std::f64::consts::PI;
use std::path::Path;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zlinalg::IntMatrix;

/// Relative eigenvalue threshold below which the form counts as degenerate.
pub const EIGEN_TOL: f64 = 1e-9;
/// Offset used for the two-sided average at degenerate angles.
pub const SINGULAR_DELTA: f64 = 1e-6;

/// Integer Seifert matrix `A` with `det(A − Aᵀ) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeifertMatrix {
    matrix: Vec<Vec<i64>>,
}

impl SeifertMatrix {
    pub fn new(matrix: Vec<Vec<i64>>) -> Result<Self> {
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidSeifert("matrix is not square".into()));
        }
        if n % 2 == 1 {
            return Err(Error::InvalidSeifert(format!("odd size {n}")));
        }
        let s = SeifertMatrix { matrix };
        let d = s.skew().determinant();
        if !d.is_one() {
            return Err(Error::InvalidSeifert(format!("det(A - A^T) = {d}, expected 1")));
        }
        Ok(s)
    }

    /// The unknot.
    pub fn empty() -> Self {
        SeifertMatrix { matrix: Vec::new() }
    }

    /// Right-handed trefoil `[[-1, 1], [0, -1]]`.
    pub fn trefoil() -> Self {
        SeifertMatrix { matrix: vec![vec![-1, 1], vec![0, -1]] }
    }

    /// Figure-eight knot `[[-1, 1], [0, 1]]`.
    pub fn figure_eight() -> Self {
        SeifertMatrix { matrix: vec![vec![-1, 1], vec![0, 1]] }
    }

    /// `−Aᵀ`, a Seifert matrix of the mirror image.
    pub fn mirror(&self) -> Self {
        let n = self.size();
        let matrix = (0..n).map(|i| (0..n).map(|j| -self.matrix[j][i]).collect()).collect();
        SeifertMatrix { matrix }
    }

    pub fn size(&self) -> usize {
        self.matrix.len()
    }

    pub fn genus(&self) -> usize {
        self.size() / 2
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    fn to_int(&self) -> IntMatrix {
        if self.size() == 0 {
            IntMatrix::zeros(0, 0)
        } else {
            IntMatrix::from_rows(&self.matrix)
        }
    }

    fn skew(&self) -> IntMatrix {
        let n = self.size();
        let rows: Vec<Vec<i64>> =
            (0..n).map(|i| (0..n).map(|j| self.matrix[i][j] - self.matrix[j][i]).collect()).collect();
        if n == 0 {
            IntMatrix::zeros(0, 0)
        } else {
            IntMatrix::from_rows(&rows)
        }
    }

    /// Reads `{"matrix": [[...], ...]}` or comma-separated rows; `#` starts a
    /// comment in the CSV form.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            #[derive(Deserialize)]
            struct Doc {
                matrix: Vec<Vec<i64>>,
            }
            let doc: Doc = serde_json::from_str(text)
                .map_err(|e| Error::InvalidSeifert(format!("bad JSON: {e}")))?;
            return Self::new(doc.matrix);
        }
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut matrix = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::InvalidSeifert(format!("bad CSV: {e}")))?;
            if record.iter().all(str::is_empty) {
                continue;
            }
            let row = record
                .iter()
                .map(|f| f.parse::<i64>().map_err(|_| Error::InvalidSeifert(format!("bad entry {f:?}"))))
                .collect::<Result<Vec<_>>>()?;
            matrix.push(row);
        }
        Self::new(matrix)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Coefficients of `det(tA − Aᵀ)` in degrees `0..=2g`, constant term
    /// first (some of the outer ones may vanish).
    pub fn alexander_polynomial(&self) -> Vec<BigInt> {
        let n = self.size();
        let a = self.to_int();
        let at = a.transpose();
        let points: Vec<(BigRational, BigRational)> = (0..=n as i64)
            .map(|t| {
                let m = a.scale(&BigInt::from(t)).add(&at.scale(&BigInt::from(-1)));
                (BigRational::from_integer(t.into()), BigRational::from_integer(m.determinant()))
            })
            .collect();
        let mut out: Vec<BigInt> = interpolate(&points).into_iter().map(|c| c.to_integer()).collect();
        out.resize(n + 1, BigInt::zero());
        out
    }
}

/// Block sum `A ⊕ B`, a Seifert matrix of the connected sum.
pub fn connected_sum(a: &SeifertMatrix, b: &SeifertMatrix) -> SeifertMatrix {
    let (n, m) = (a.size(), b.size());
    let mut matrix = vec![vec![0i64; n + m]; n + m];
    for i in 0..n {
        matrix[i][..n].copy_from_slice(&a.matrix[i]);
    }
    for i in 0..m {
        matrix[n + i][n..].copy_from_slice(&b.matrix[i]);
    }
    SeifertMatrix { matrix }
}

/// `k`-fold connected sum of `a` with itself.
pub fn connected_power(a: &SeifertMatrix, k: usize) -> SeifertMatrix {
    (0..k).fold(SeifertMatrix::empty(), |acc, _| connected_sum(&acc, a))
}

// Polynomials are coefficient vectors, constant term first.
type Poly = Vec<BigRational>;

fn q(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn trim(p: &mut Poly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Newton interpolation through the given points.
fn interpolate(points: &[(BigRational, BigRational)]) -> Poly {
    let n = points.len();
    let mut coef: Vec<BigRational> = points.iter().map(|p| p.1.clone()).collect();
    for j in 1..n {
        for i in (j..n).rev() {
            coef[i] = (&coef[i] - &coef[i - 1]) / (&points[i].0 - &points[i - j].0);
        }
    }
    let mut out: Poly = Vec::new();
    for i in (0..n).rev() {
        // out = out * (t - x_i) + coef[i]
        out = poly_mul(&out, &vec![-points[i].0.clone(), q(1)]);
        if out.is_empty() {
            out.push(BigRational::zero());
        }
        out[0] += &coef[i];
    }
    trim(&mut out);
    out
}

fn eval(p: &Poly, x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Quotient and remainder of `a` by a nonzero `b`.
fn poly_divmod(a: &Poly, b: &Poly) -> (Poly, Poly) {
    let mut r = a.clone();
    trim(&mut r);
    let lead = b.last().expect("division by zero polynomial");
    let mut quo = vec![BigRational::zero(); r.len().saturating_sub(b.len()) + 1];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let f = r.last().unwrap() / lead;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &f * c;
        }
        quo[shift] = f;
        r.pop();
        trim(&mut r);
    }
    trim(&mut quo);
    (quo, r)
}

fn poly_rem(a: &Poly, b: &Poly) -> Poly {
    poly_divmod(a, b).1
}

fn derivative(p: &Poly) -> Poly {
    let mut d: Poly = p.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64)).collect();
    trim(&mut d);
    d
}

fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    let (mut a, mut b) = (a.clone(), b.clone());
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    if let Some(l) = a.last().cloned() {
        for c in a.iter_mut() {
            *c /= &l;
        }
    }
    a
}

/// `p / gcd(p, p')`.
fn squarefree(p: &Poly) -> Poly {
    let g = poly_gcd(p, &derivative(p));
    if g.len() <= 1 {
        return p.clone();
    }
    poly_divmod(p, &g).0
}

struct Sturm {
    chain: Vec<Poly>,
}

impl Sturm {
    fn new(p: &Poly) -> Self {
        let mut chain = vec![p.clone()];
        let mut next = derivative(p);
        while !next.is_empty() {
            let r = poly_rem(chain.last().unwrap(), &next);
            chain.push(next);
            next = r.into_iter().map(|c| -c).collect();
        }
        Sturm { chain }
    }

    fn variations(&self, x: &BigRational) -> usize {
        let signs: Vec<i32> = self
            .chain
            .iter()
            .map(|p| {
                let v = eval(p, x);
                if v.is_positive() {
                    1
                } else if v.is_negative() {
                    -1
                } else {
                    0
                }
            })
            .filter(|&s| s != 0)
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Number of distinct roots in `(lo, hi]`.
    fn count(&self, lo: &BigRational, hi: &BigRational) -> usize {
        self.variations(lo) - self.variations(hi)
    }
}

/// Rewrites a symmetric `Σ c_k t^k` of degree `2g` as `t^g P(t + 1/t)`.
fn symmetric_to_x(c: &[BigInt]) -> Poly {
    let n = c.len().saturating_sub(1);
    let g = n / 2;
    // v[k] = t^k + t^{-k} as a polynomial in x
    let mut v: Vec<Poly> = vec![vec![q(2)], vec![q(0), q(1)]];
    for k in 2..=g {
        let mut next = poly_mul(&v[k - 1], &vec![q(0), q(1)]);
        for (i, a) in v[k - 2].iter().enumerate() {
            next[i] -= a;
        }
        v.push(next);
    }
    let mut p: Poly = vec![BigRational::from_integer(c.get(g).cloned().unwrap_or_default())];
    for k in 1..=g {
        let ck = BigRational::from_integer(c[g + k].clone());
        if p.len() < v[k].len() {
            p.resize(v[k].len(), BigRational::zero());
        }
        for (i, a) in v[k].iter().enumerate() {
            p[i] += &ck * a;
        }
    }
    trim(&mut p);
    p
}

/// The `m`-th cyclotomic polynomial, `Π_{d|m} (t^d − 1)^{μ(m/d)}`.
fn cyclotomic(m: u64) -> Poly {
    let binomial = |d: u64| {
        let mut p: Poly = vec![BigRational::zero(); d as usize + 1];
        p[0] = q(-1);
        p[d as usize] = q(1);
        p
    };
    let (mut num, mut den): (Poly, Poly) = (vec![q(1)], vec![q(1)]);
    for d in (1..=m).filter(|d| m % d == 0) {
        let f = crate::zlinalg::factorize(m / d);
        if f.iter().any(|&(_, e)| e > 1) {
            continue;
        }
        if f.len() % 2 == 0 {
            num = poly_mul(&num, &binomial(d));
        } else {
            den = poly_mul(&den, &binomial(d));
        }
    }
    poly_divmod(&num, &den).0
}

fn euler_phi(m: u64) -> u64 {
    crate::zlinalg::factorize(m).into_iter().fold(m, |acc, (p, _)| acc / p * (p - 1))
}

/// Orders `m` of the roots of unity that are roots of `delta`.
fn cyclotomic_orders(delta: &[BigInt]) -> Vec<u64> {
    let deg = delta.len().saturating_sub(1) as u64;
    if deg == 0 {
        return Vec::new();
    }
    let p: Poly = delta.iter().cloned().map(BigRational::from_integer).collect();
    // φ(m) ≥ √(m/2), so φ(m) ≤ deg forces m ≤ 2 deg²
    (1..=2 * deg * deg)
        .filter(|&m| euler_phi(m) <= deg && poly_rem(&p, &cyclotomic(m)).is_empty())
        .collect()
}

/// Signature of the realified form at `θ`, and whether some eigenvalue of
/// the normalized matrix is within [`EIGEN_TOL`] of zero.
fn raw_signature(a: &SeifertMatrix, theta: f64) -> (i64, bool) {
    let n = a.size();
    if n == 0 {
        return (0, false);
    }
    let (c, s) = (theta.cos(), theta.sin());
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let (aij, aji) = (a.matrix[i][j] as f64, a.matrix[j][i] as f64);
            let x = (1.0 - c) * (aij + aji);
            let y = s * (aji - aij);
            m[(i, j)] = x;
            m[(n + i, n + j)] = x;
            m[(i, n + j)] = -y;
            m[(n + i, j)] = y;
        }
    }
    let scale = m.amax();
    if scale == 0.0 {
        return (0, true);
    }
    m /= scale;
    let eig = m.symmetric_eigenvalues();
    let pos = eig.iter().filter(|&&l| l > EIGEN_TOL).count() as i64;
    let neg = eig.iter().filter(|&&l| l < -EIGEN_TOL).count() as i64;
    // the realification doubles every eigenvalue
    ((pos - neg) / 2, pos + neg < 2 * n as i64)
}

/// Value of `σ` at an angle together with the degeneracy flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub value: i64,
    pub singular: bool,
}

fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t >= 2.0 * PI {
        0.0
    } else {
        t
    }
}

/// `(σ(θ−δ) + σ(θ+δ))/2` and whether halving `δ` leaves it unchanged.
fn two_sided(a: &SeifertMatrix, theta: f64) -> (i64, bool) {
    let mut delta = SINGULAR_DELTA;
    // widen until both sides are nondegenerate (high-multiplicity roots)
    while delta < 1e-2 && (raw_signature(a, theta - delta).1 || raw_signature(a, theta + delta).1) {
        delta *= 4.0;
    }
    let avg = |d: f64| (raw_signature(a, theta - d).0 + raw_signature(a, theta + d).0) / 2;
    let v = avg(delta);
    (v, avg(delta / 2.0) == v)
}

/// Levine–Tristram signature at `ω = e^{iθ}`, averaged over both sides
/// where the form is degenerate.
pub fn levine_tristram(a: &SeifertMatrix, theta: f64) -> Signature {
    let theta = normalize_angle(theta);
    if theta == 0.0 || a.size() == 0 {
        // the form vanishes identically at ω = 1
        return Signature { value: 0, singular: false };
    }
    let (v, singular) = raw_signature(a, theta);
    if !singular {
        return Signature { value: v, singular };
    }
    Signature { value: two_sided(a, theta).0, singular: true }
}

/// Left Riemann sum of `σ` at `θ = 2πj/samples`; an oracle for
/// [`rho_integral`]. Each jump of size `Δ` contributes at most `|Δ|/samples`
/// of error.
pub fn riemann_rho(a: &SeifertMatrix, samples: usize) -> f64 {
    let total: i64 = (0..samples)
        .map(|j| raw_signature(a, 2.0 * PI * j as f64 / samples as f64).0)
        .sum();
    total as f64 / samples as f64
}

/// A root `e^{±iθ}` of the Alexander polynomial with `0 < θ < π`.
#[derive(Clone, Debug)]
struct CircleRoot {
    theta: f64,
    radius: f64,
    /// `θ / 2π` when the root is a root of unity.
    turns: Option<BigRational>,
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Unit-circle roots in the upper half plane, each located to within `tol`,
/// and whether they are all roots of unity (and so known exactly).
fn circle_roots(a: &SeifertMatrix, tol: f64) -> (Vec<CircleRoot>, bool) {
    let delta = a.alexander_polynomial();
    if a.size() == 0 {
        return (Vec::new(), true);
    }
    let f = squarefree(&symmetric_to_x(&delta));
    let sturm = Sturm::new(&f);
    let theta_of = |x: &BigRational| (to_f64(x) / 2.0).clamp(-1.0, 1.0).acos();
    let mut isolated = Vec::new();
    let mut stack = vec![(q(-2), q(2))];
    while let Some((lo, hi)) = stack.pop() {
        let n = sturm.count(&lo, &hi);
        if n == 0 {
            continue;
        }
        let mid = (&lo + &hi) / q(2);
        if n > 1 {
            stack.push((lo, mid.clone()));
            stack.push((mid, hi));
            continue;
        }
        let (mut lo, mut hi) = (lo, hi);
        while theta_of(&lo) - theta_of(&hi) > tol {
            let mid = (&lo + &hi) / q(2);
            if sturm.count(&lo, &mid) == 1 {
                if eval(&f, &mid).is_zero() {
                    lo = mid.clone();
                    hi = mid;
                    break;
                }
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let (t0, t1) = (theta_of(&hi), theta_of(&lo));
        isolated.push(CircleRoot { theta: (t0 + t1) / 2.0, radius: (t1 - t0) / 2.0, turns: None });
    }
    isolated.sort_by(|x, y| x.theta.total_cmp(&y.theta));

    let mut exact: Vec<BigRational> = Vec::new();
    for m in cyclotomic_orders(&delta) {
        for k in 1..m {
            if 2 * k < m && k.gcd(&m) == 1 {
                exact.push(BigRational::new(k.into(), m.into()));
            }
        }
    }
    exact.sort();
    let matches = exact.len() == isolated.len()
        && exact.iter().zip(&isolated).all(|(t, r)| {
            (2.0 * PI * to_f64(t) - r.theta).abs() <= r.radius + 1e-9
        });
    if matches {
        for (t, r) in exact.into_iter().zip(isolated.iter_mut()) {
            r.theta = 2.0 * PI * to_f64(&t);
            r.radius = 0.0;
            r.turns = Some(t);
        }
    }
    (isolated, matches)
}

/// A jump of the signature function.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Jump {
    pub angle: f64,
    /// `angle / 2π` as a fraction when the jump is at a root of unity.
    pub turns: Option<String>,
    pub left: i64,
    pub right: i64,
}

/// `σ` on the circle as a step function.
#[derive(Clone, Debug, Serialize)]
pub struct StepFunction {
    pub base: i64,
    pub jumps: Vec<Jump>,
    pub tolerance: f64,
    pub exact: bool,
    #[serde(skip)]
    breaks: Vec<Breakpoint>,
    #[serde(skip)]
    values: Vec<i64>,
}

#[derive(Clone, Debug)]
struct Breakpoint {
    theta: f64,
    radius: f64,
    turns: Option<BigRational>,
}

impl StepFunction {
    /// `σ(θ)`; at breakpoints the average of the neighbouring values.
    pub fn evaluate(&self, theta: f64) -> i64 {
        let theta = normalize_angle(theta);
        if theta == 0.0 {
            return 0;
        }
        for (i, b) in self.breaks.iter().enumerate() {
            if (theta - b.theta).abs() <= b.radius.max(1e-12) {
                return (self.values[i] + self.values[i + 1]) / 2;
            }
            if theta < b.theta {
                return self.values[i];
            }
        }
        *self.values.last().unwrap()
    }

    /// Normalized integral over the circle, exact when every breakpoint is a
    /// root of unity.
    fn integral(&self) -> (f64, Option<BigRational>, f64) {
        let mut value = 0.0;
        let mut prev = 0.0;
        for (i, b) in self.breaks.iter().enumerate() {
            value += self.values[i] as f64 * (b.theta - prev);
            prev = b.theta;
        }
        value += *self.values.last().unwrap() as f64 * (2.0 * PI - prev);
        value /= 2.0 * PI;
        let bound: f64 = self
            .breaks
            .iter()
            .enumerate()
            .map(|(i, b)| (self.values[i + 1] - self.values[i]).abs() as f64 * b.radius / (2.0 * PI))
            .sum();
        if !self.exact {
            return (value, None, bound);
        }
        let mut exact = BigRational::zero();
        let mut prev = BigRational::zero();
        for (i, b) in self.breaks.iter().enumerate() {
            let t = b.turns.clone().expect("exact breakpoint");
            exact += BigRational::from_integer(self.values[i].into()) * (&t - &prev);
            prev = t;
        }
        exact += BigRational::from_integer((*self.values.last().unwrap()).into()) * (q(1) - prev);
        (to_f64(&exact), Some(exact), 0.0)
    }
}

/// `σ` on the whole circle. Breakpoints are the unit-circle Alexander roots;
/// the value on each arc is read at its midpoint.
pub fn signature_function(a: &SeifertMatrix, tol: f64) -> Result<StepFunction> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let (roots, exact) = circle_roots(a, tol);
    let mut breaks: Vec<Breakpoint> = roots
        .iter()
        .map(|r| Breakpoint { theta: r.theta, radius: r.radius, turns: r.turns.clone() })
        .collect();
    for r in roots.iter().rev() {
        breaks.push(Breakpoint {
            theta: 2.0 * PI - r.theta,
            radius: r.radius,
            turns: r.turns.as_ref().map(|t| q(1) - t),
        });
    }
    let mut edges = vec![0.0];
    edges.extend(breaks.iter().map(|b| b.theta));
    edges.push(2.0 * PI);
    let values: Vec<i64> =
        edges.windows(2).map(|w| raw_signature(a, (w[0] + w[1]) / 2.0).0).collect();
    let jumps = breaks
        .iter()
        .enumerate()
        .filter(|(i, _)| values[*i] != values[i + 1])
        .map(|(i, b)| Jump {
            angle: b.theta,
            turns: b.turns.as_ref().map(ToString::to_string),
            left: values[i],
            right: values[i + 1],
        })
        .collect();
    Ok(StepFunction { base: values[0], jumps, tolerance: tol, exact, breaks, values })
}

/// Coefficient system for a ρ-invariant of zero-surgery on a knot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RhoCoefficient {
    /// The abelianization onto `Z`: the normalized integral of `σ`.
    Z,
    /// The map onto `Z_d`: the average of `σ` over the `d`-th roots of unity.
    Cyclic(u64),
}

impl RhoCoefficient {
    /// Parses `Z` or `Zd:<d>`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "Z" {
            return Ok(RhoCoefficient::Z);
        }
        let d = s
            .strip_prefix("Zd:")
            .and_then(|d| d.parse::<u64>().ok())
            .ok_or_else(|| Error::InvalidParameter(format!("expected Z or Zd:<d>, got {s:?}")))?;
        if d == 0 {
            return Err(Error::InvalidParameter("d must be at least 1".into()));
        }
        Ok(RhoCoefficient::Cyclic(d))
    }
}

impl std::fmt::Display for RhoCoefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RhoCoefficient::Z => write!(f, "Z"),
            RhoCoefficient::Cyclic(d) => write!(f, "Zd:{d}"),
        }
    }
}

/// One summand of a root-of-unity average.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evaluation {
    pub k: u64,
    pub angle: f64,
    pub signature: i64,
    pub singular: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RhoReport {
    pub coefficient: String,
    pub value: f64,
    /// Exact rational value when it is known.
    pub exact: Option<String>,
    pub error_bound: f64,
    pub genus: usize,
    pub evaluations: Vec<Evaluation>,
    pub signature_function: Option<StepFunction>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub exact_value: Option<BigRational>,
}

/// ρ for the abelianization onto `Z`.
pub fn rho_integral(a: &SeifertMatrix, tol: f64) -> Result<RhoReport> {
    let sf = signature_function(a, tol)?;
    let (value, exact, error_bound) = sf.integral();
    let mut warnings = Vec::new();
    if exact.is_none() {
        warnings.push(format!("jump angles located to within {tol}; value carries an error bound"));
    }
    Ok(RhoReport {
        coefficient: RhoCoefficient::Z.to_string(),
        value,
        exact: exact.as_ref().map(ToString::to_string),
        error_bound,
        genus: a.genus(),
        evaluations: Vec::new(),
        signature_function: Some(sf),
        warnings,
        exact_value: exact,
    })
}

/// ρ for the map onto `Z_d`, computed exactly. A summand is singular when
/// `ζ_d^k` is an Alexander root, decided by cyclotomic division.
pub fn rho_cyclic(a: &SeifertMatrix, d: u64) -> Result<RhoReport> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    let orders = cyclotomic_orders(&a.alexander_polynomial());
    let mut warnings = Vec::new();
    let mut evaluations = Vec::new();
    let mut total = 0i64;
    for k in 0..d {
        let theta = 2.0 * PI * k as f64 / d as f64;
        let order = d / k.gcd(&d);
        let singular = orders.contains(&order);
        let value = if k == 0 || a.size() == 0 {
            0
        } else if singular {
            let (v, agreed) = two_sided(a, theta);
            if !agreed {
                warnings.push(format!("two-sided average at k = {k} unstable under halving"));
            }
            v
        } else {
            let (v, degenerate) = raw_signature(a, theta);
            if degenerate {
                warnings.push(format!("form at k = {k} is numerically degenerate but not an Alexander root"));
                two_sided(a, theta).0
            } else {
                v
            }
        };
        if singular {
            warnings.push(format!("ζ_{d}^{k} is an Alexander root; using the two-sided average"));
        }
        total += value;
        evaluations.push(Evaluation { k, angle: theta, signature: value, singular });
    }
    let exact = BigRational::new(total.into(), d.into());
    Ok(RhoReport {
        coefficient: RhoCoefficient::Cyclic(d).to_string(),
        value: to_f64(&exact),
        exact: Some(exact.to_string()),
        error_bound: 0.0,
        genus: a.genus(),
        evaluations,
        signature_function: None,
        warnings,
        exact_value: Some(exact),
    })
}

pub fn rho(a: &SeifertMatrix, coeff: RhoCoefficient, tol: f64) -> Result<RhoReport> {
    match coeff {
        RhoCoefficient::Z => rho_integral(a, tol),
        RhoCoefficient::Cyclic(d) => rho_cyclic(a, d),
    }
}

/// `K_i`, the `i`-fold connected sum of the base knot, with its ρ-invariant.
#[derive(Clone, Debug, Serialize)]
pub struct FamilyMember {
    pub index: usize,
    pub seifert: SeifertMatrix,
    pub rho: RhoReport,
}

/// Knots `K_0 = unknot, K_1, …, K_{N−1}` with pairwise distinct ρ over
/// `Z_d`, built as connected sums of a base knot with nonzero ρ.
pub fn distinguish_family(base: &SeifertMatrix, n: usize, d: u64) -> Result<Vec<FamilyMember>> {
    if n < 2 {
        return Err(Error::InvalidParameter("the family needs at least two knots".into()));
    }
    let base_rho = rho_cyclic(base, d)?;
    if base_rho.exact_value.as_ref().is_some_and(Zero::is_zero) {
        return Err(Error::BaseHasZeroRho(d));
    }
    let mut family = Vec::with_capacity(n);
    let mut seifert = SeifertMatrix::empty();
    for index in 0..n {
        let rho = rho_cyclic(&seifert, d)?;
        family.push(FamilyMember { index, seifert: seifert.clone(), rho });
        seifert = connected_sum(&seifert, base);
    }
    let mut values: Vec<&BigRational> = family.iter().filter_map(|m| m.rho.exact_value.as_ref()).collect();
    values.sort();
    values.dedup();
    if values.len() != n {
        return Err(Error::InvalidInput("family values are not pairwise distinct".into()));
    }
    Ok(family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn rat(s: &str) -> Option<String> {
        Some(s.to_string())
    }

    /// `S + L` with `S` symmetric and `L − Lᵀ` the standard symplectic
    /// form, then conjugated by a unimodular matrix.
    fn seifert_from(g: usize, sym: &[i64], ops: &[(usize, usize, i64)]) -> SeifertMatrix {
        let n = 2 * g;
        let mut a = vec![vec![0i64; n]; n];
        let mut it = sym.iter().cycle();
        for i in 0..n {
            for j in i..n {
                let v = *it.next().unwrap();
                a[i][j] += v;
                if i != j {
                    a[j][i] += v;
                }
            }
        }
        for b in 0..g {
            a[2 * b][2 * b + 1] += 1;
        }
        // A ↦ Eᵀ A E for E = I + c e_{ij}
        for &(i, j, c) in ops {
            let (i, j) = (i % n, j % n);
            if i == j {
                continue;
            }
            for row in a.iter_mut() {
                row[j] += c * row[i];
            }
            let ri = a[i].clone();
            for (x, y) in a[j].iter_mut().zip(&ri) {
                *x += c * y;
            }
        }
        SeifertMatrix::new(a).expect("valid by construction")
    }

    fn arb_seifert(max_g: usize) -> impl Strategy<Value = SeifertMatrix> {
        (1..=max_g).prop_flat_map(|g| {
            (
                prop::collection::vec(-2i64..=2, 1..12),
                prop::collection::vec((0usize..8, 0usize..8, -1i64..=1), 0..4),
            )
                .prop_map(move |(sym, ops)| seifert_from(g, &sym, &ops))
        })
    }

    #[test]
    fn validation() {
        assert!(SeifertMatrix::new(vec![vec![1, 0], vec![0, 1]]).is_err());
        assert!(SeifertMatrix::new(vec![vec![1]]).is_err());
        assert!(SeifertMatrix::new(vec![vec![1, 2]]).is_err());
        assert!(SeifertMatrix::new(vec![]).is_ok());
        assert!(SeifertMatrix::new(vec![vec![-1, 1], vec![0, -1]]).is_ok());
    }

    #[test]
    fn parsing() {
        let j = SeifertMatrix::parse(r#"{"matrix": [[-1, 1], [0, -1]]}"#).unwrap();
        let c = SeifertMatrix::parse("# trefoil\n-1, 1\n0, -1\n").unwrap();
        assert_eq!(j, SeifertMatrix::trefoil());
        assert_eq!(c, j);
        assert!(matches!(SeifertMatrix::parse("1,0\n0,1"), Err(Error::InvalidSeifert(_))));
        assert!(matches!(SeifertMatrix::parse("1,x"), Err(Error::InvalidSeifert(_))));
    }

    #[test]
    fn alexander_polynomials() {
        assert_eq!(SeifertMatrix::trefoil().alexander_polynomial(), ints(&[1, -1, 1]));
        assert_eq!(SeifertMatrix::figure_eight().alexander_polynomial(), ints(&[-1, 3, -1]));
        assert_eq!(SeifertMatrix::empty().alexander_polynomial(), ints(&[1]));
        // Alexander polynomial t, a unit
        let u = SeifertMatrix::new(vec![vec![2, -1], vec![-2, 1]]).unwrap();
        assert_eq!(u.alexander_polynomial(), ints(&[0, 1, 0]));
        assert!(signature_function(&u, 1e-9).unwrap().jumps.is_empty());
        assert_eq!(rho_integral(&u, 1e-9).unwrap().exact, rat("0"));
    }

    #[test]
    fn cyclotomic_polynomials() {
        let c = |m| cyclotomic(m).into_iter().map(|x| x.to_integer()).collect::<Vec<_>>();
        assert_eq!(c(1), ints(&[-1, 1]));
        assert_eq!(c(6), ints(&[1, -1, 1]));
        assert_eq!(c(12), ints(&[1, 0, -1, 0, 1]));
        assert_eq!(c(9), ints(&[1, 0, 0, 1, 0, 0, 1]));
        assert_eq!(cyclotomic_orders(&ints(&[1, -1, 1])), vec![6]);
    }

    #[test]
    fn trefoil_signatures() {
        let t = SeifertMatrix::trefoil();
        assert_eq!(levine_tristram(&t, PI), Signature { value: -2, singular: false });
        assert_eq!(levine_tristram(&t, 0.0).value, 0);
        assert_eq!(levine_tristram(&SeifertMatrix::empty(), 1.0).value, 0);
        let s = levine_tristram(&t, PI / 3.0);
        assert!(s.singular);
        assert_eq!(s.value, -1);
        let tt = connected_sum(&t, &t);
        assert_eq!(levine_tristram(&tt, PI).value, -4);
    }

    #[test]
    fn trefoil_step_function() {
        let t = SeifertMatrix::trefoil();
        let sf = signature_function(&t, 1e-9).unwrap();
        assert!(sf.exact);
        assert_eq!(sf.base, 0);
        assert_eq!(sf.jumps.len(), 2);
        assert_eq!(sf.jumps[0].turns, rat("1/6"));
        assert_eq!(sf.jumps[1].turns, rat("5/6"));
        assert!((sf.jumps[0].angle - PI / 3.0).abs() < 1e-12);
        assert_eq!((sf.jumps[0].left, sf.jumps[0].right), (0, -2));
        assert_eq!(sf.evaluate(PI), -2);
        let tt = signature_function(&connected_sum(&t, &t), 1e-9).unwrap();
        assert_eq!(tt.jumps.len(), 2);
        assert_eq!(tt.evaluate(PI), -4);
        assert!(signature_function(&SeifertMatrix::empty(), 1e-9).unwrap().jumps.is_empty());
        assert!(signature_function(&t, 0.0).is_err());
    }

    #[test]
    fn integral_rho() {
        let t = SeifertMatrix::trefoil();
        let r = rho_integral(&t, 1e-9).unwrap();
        assert_eq!(r.exact, rat("-4/3"));
        assert!((r.value + 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(rho_integral(&SeifertMatrix::empty(), 1e-9).unwrap().exact, rat("0"));
        let tm = connected_sum(&t, &t.mirror());
        assert_eq!(rho_integral(&tm, 1e-9).unwrap().exact, rat("0"));
        assert_eq!(rho_integral(&SeifertMatrix::figure_eight(), 1e-9).unwrap().exact, rat("0"));
    }

    #[test]
    fn cyclic_rho() {
        let t = SeifertMatrix::trefoil();
        assert_eq!(rho_cyclic(&t, 1).unwrap().exact, rat("0"));
        assert_eq!(rho_cyclic(&t, 2).unwrap().exact, rat("-1"));
        assert_eq!(rho_cyclic(&t, 4).unwrap().exact, rat("-3/2"));
        let r6 = rho_cyclic(&t, 6).unwrap();
        assert_eq!(r6.exact, rat("-4/3"));
        let singular: Vec<u64> = r6.evaluations.iter().filter(|e| e.singular).map(|e| e.k).collect();
        assert_eq!(singular, vec![1, 5]);
        assert!(rho_cyclic(&t, 0).is_err());
    }

    #[test]
    fn coefficient_parsing() {
        assert_eq!(RhoCoefficient::parse("Z").unwrap(), RhoCoefficient::Z);
        assert_eq!(RhoCoefficient::parse("Zd:4").unwrap(), RhoCoefficient::Cyclic(4));
        assert!(RhoCoefficient::parse("Zd:0").is_err());
        assert!(RhoCoefficient::parse("Q").is_err());
    }

    #[test]
    fn families() {
        let t = SeifertMatrix::trefoil();
        let f = distinguish_family(&t, 4, 2).unwrap();
        let vals: Vec<_> = f.iter().map(|m| m.rho.exact.clone().unwrap()).collect();
        assert_eq!(vals, ["0", "-1", "-2", "-3"]);
        assert_eq!(f[0].seifert.size(), 0);
        assert_eq!(distinguish_family(&t, 3, 1).unwrap_err(), Error::BaseHasZeroRho(1));
        let f4 = distinguish_family(&t, 2, 4).unwrap();
        assert_eq!(f4[1].rho.exact, rat("-3/2"));
        assert!(distinguish_family(&t, 1, 2).is_err());
    }

    #[test]
    fn irrational_jumps_carry_error_bounds() {
        // Δ = 2t² − 3t + 2 has unit-circle roots at cos θ = 3/4, not roots of unity
        let a = SeifertMatrix::new(vec![vec![2, 1], vec![0, 1]]).unwrap();
        assert_eq!(a.alexander_polynomial(), ints(&[2, -3, 2]));
        let r = rho_integral(&a, 1e-8).unwrap();
        assert!(r.exact.is_none());
        assert!(r.error_bound < 1e-8);
        let oracle = riemann_rho(&a, 20_000);
        assert!((r.value - oracle).abs() < 1e-3, "{} vs {oracle}", r.value);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn signature_properties(a in arb_seifert(2), b in arb_seifert(2), theta in 0.01f64..3.13) {
            prop_assert_eq!(levine_tristram(&a, 0.0).value, 0);
            let s = levine_tristram(&a, theta);
            prop_assert_eq!(s, levine_tristram(&a, 2.0 * PI - theta));
            prop_assert!(s.value.abs() <= 2 * a.genus() as i64);
            if !s.singular {
                prop_assert_eq!(s.value % 2, 0);
            }
            let sb = levine_tristram(&b, theta);
            let sab = levine_tristram(&connected_sum(&a, &b), theta);
            if !s.singular && !sb.singular {
                prop_assert_eq!(sab.value, s.value + sb.value);
            }
        }

        #[test]
        fn rho_properties(a in arb_seifert(2), b in arb_seifert(1), d in 1u64..7) {
            let g = a.genus() as f64;
            let ra = rho_integral(&a, 1e-9).unwrap();
            prop_assert!(ra.value.abs() <= 2.0 * g + 1e-12);
            let rb = rho_integral(&b, 1e-9).unwrap();
            let rab = rho_integral(&connected_sum(&a, &b), 1e-9).unwrap();
            let slack = ra.error_bound + rb.error_bound + rab.error_bound + 1e-9;
            prop_assert!((rab.value - ra.value - rb.value).abs() <= slack);

            let ca = rho_cyclic(&a, d).unwrap();
            let cb = rho_cyclic(&b, d).unwrap();
            let cab = rho_cyclic(&connected_sum(&a, &b), d).unwrap();
            prop_assert_eq!(
                cab.exact_value.clone().unwrap(),
                ca.exact_value.clone().unwrap() + cb.exact_value.clone().unwrap()
            );
            let sf = ra.signature_function.as_ref().unwrap();
            let avg: i64 = (0..d).map(|k| sf.evaluate(2.0 * PI * k as f64 / d as f64)).sum();
            prop_assert_eq!(
                ca.exact_value.unwrap(),
                BigRational::new(avg.into(), d.into())
            );
        }
    }
}

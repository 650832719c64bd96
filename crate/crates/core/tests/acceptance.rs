//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use locseries::enumerator::{reidemeister_schreier, CosetTable, DEFAULT_MAX_COSETS};
use locseries::homology::h1_twisted;
use locseries::presentations::{catalog, parse_catalog_ref, Word};
use locseries::series::{
    check_inclusion_chain, check_product_formula, local_abelian_quotient, modp_derived_series, series,
};
use locseries::signatures::{
    connected_sum, distinguish_family, levine_tristram, rho_cyclic, rho_integral, riemann_rho,
    signature_function, SeifertMatrix,
};
use locseries::suite::{load_fixtures, Check, DEFAULT_FIXTURES};
use locseries::zlinalg::{smith_normal_form, AbelianInvariants, IntMatrix, RSpec};

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn inv(s: &str) -> AbelianInvariants {
    if s == "0" {
        return AbelianInvariants::trivial();
    }
    let mut torsion = Vec::new();
    let mut rank = 0;
    for part in s.split(" x ") {
        if let Some(r) = part.strip_prefix("Z^") {
            rank += r.parse::<usize>().unwrap();
        } else if part == "Z" {
            rank += 1;
        } else {
            torsion.push(part[1..].parse().unwrap());
        }
    }
    AbelianInvariants::from_cyclic_orders(&torsion, rank)
}

fn within(limit: Duration, start: Instant, what: &str) -> Outcome {
    let t = start.elapsed();
    ensure!(t < limit, "{what} took {t:?}, limit {limit:?}");
    Ok(())
}

fn y_power(e: i64) -> Word {
    Word::power_of_gen(1, e)
}

fn criterion_1() -> Outcome {
    for n in 1..=3u64 {
        let start = Instant::now();
        let g = catalog("q8n", &[n as i64]).map_err(|e| e.to_string())?;
        let r = n.trailing_zeros();
        let n0 = n >> r;
        let rep = series(&g, RSpec::ZLocP(2), 2, DEFAULT_MAX_COSETS).map_err(|e| e.to_string())?;
        ensure!(rep.quotients[0] == inv("Z2 x Z2"), "q8n({n}): first quotient {}", rep.quotients[0]);
        let expect = AbelianInvariants::from_cyclic_orders(&[1 << (r + 1)], 0);
        ensure!(rep.quotients[1] == expect, "q8n({n}): second quotient {}", rep.quotients[1]);
        let term2 = &rep.terms[2];
        ensure!(term2.order == Some(n0), "q8n({n}): |pi^(2)| = {:?}", term2.order);
        let cyclic = AbelianInvariants::from_cyclic_orders(&[n0], 0);
        ensure!(term2.structure.as_ref() == Some(&cyclic), "q8n({n}): pi^(2) = {:?}", term2.structure);
        // The named generator y^{2^{r+2}} lies in pi^(2) and generates it.
        let y = y_power(1 << (r + 2));
        ensure!(rep.term_contains(2, &y) == Some(true), "q8n({n}): y^{} not in pi^(2)", 1 << (r + 2));
        let fg = rep.realization.as_ref().ok_or("no realization")?;
        ensure!(fg.element_order(fg.element(&y)) == n0, "q8n({n}): y^{} has the wrong order", 1 << (r + 2));
        within(Duration::from_secs(5), start, &format!("q8n({n}) over Z_(2)"))?;

        let start = Instant::now();
        let rep = series(&g, RSpec::ZLocP(3), 2, DEFAULT_MAX_COSETS).map_err(|e| e.to_string())?;
        ensure!(rep.quotients.iter().all(AbelianInvariants::is_trivial), "q8n({n}) over Z_(3) not constant");
        let order = 8 * n;
        ensure!(
            rep.terms.iter().all(|t| t.order == Some(order)),
            "q8n({n}) over Z_(3): term orders {:?}",
            rep.terms.iter().map(|t| t.order).collect::<Vec<_>>()
        );
        within(Duration::from_secs(5), start, &format!("q8n({n}) over Z_(3)"))?;
    }
    Ok(())
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let p120 = catalog("p120", &[]).map_err(|e| e.to_string())?;
    for r in [RSpec::Z, RSpec::Q, RSpec::ZLocP(2), RSpec::ZLocP(3), RSpec::ZLocP(5)] {
        let rep = series(&p120, r, 2, DEFAULT_MAX_COSETS).map_err(|e| e.to_string())?;
        ensure!(rep.quotients.iter().all(AbelianInvariants::is_trivial), "P120 over {r}: {:?}", rep.quotients);
        ensure!(rep.terms.iter().all(|t| t.order == Some(120)), "P120 over {r}: a term is proper");
        ensure!(rep.stabilized_at == Some(0), "P120 over {r}: stabilized_at {:?}", rep.stabilized_at);
    }
    for (k, n) in [(1i64, 1i64), (2, 1), (1, 2)] {
        let g = catalog("dihedral2k", &[k, n]).map_err(|e| e.to_string())?;
        let rep = series(&g, RSpec::ZLocP(2), 2, DEFAULT_MAX_COSETS).map_err(|e| e.to_string())?;
        let top = AbelianInvariants::from_cyclic_orders(&[1 << k], 0);
        ensure!(rep.quotients[0] == top, "D({k},{n}): quotient {}", rep.quotients[0]);
        let odd = (2 * n + 1) as u64;
        let cyc = AbelianInvariants::from_cyclic_orders(&[odd], 0);
        ensure!(rep.terms[1].structure.as_ref() == Some(&cyc), "D({k},{n}): pi^(1) = {:?}", rep.terms[1].structure);
        ensure!(rep.quotients[1].is_trivial(), "D({k},{n}): second quotient {}", rep.quotients[1]);
        ensure!(rep.stabilized_at == Some(1), "D({k},{n}): stabilized_at {:?}", rep.stabilized_at);
    }
    let g = catalog("p8_3k", &[1]).map_err(|e| e.to_string())?;
    let rep = series(&g, RSpec::ZLocP(3), 2, DEFAULT_MAX_COSETS).map_err(|e| e.to_string())?;
    ensure!(rep.quotients[0] == inv("Z3"), "P'24: quotient {}", rep.quotients[0]);
    ensure!(rep.stabilized_at == Some(1), "P'24: stabilized_at {:?}", rep.stabilized_at);
    ensure!(rep.terms[1].order == Some(8), "P'24: |pi^(1)| = {:?}", rep.terms[1].order);
    within(Duration::from_secs(10), start, "criterion 2")
}

fn criterion_3() -> Outcome {
    for p in [3i64, 5, 7] {
        let g = catalog("zp_semidirect_z2", &[p]).map_err(|e| e.to_string())?;
        let rep = series(&g, RSpec::Z, 2, DEFAULT_MAX_COSETS).map_err(|e| e.to_string())?;
        let zp = AbelianInvariants::from_cyclic_orders(&[p as u64], 0);
        ensure!(rep.quotients[0] == inv("Z2"), "p = {p}: quotient {}", rep.quotients[0]);
        ensure!(rep.quotients[1].is_trivial(), "p = {p}: pi^(1) != pi^(2)");
        ensure!(rep.terms[1].structure.as_ref() == Some(&zp), "p = {p}: pi^(1) = {:?}", rep.terms[1].structure);
        ensure!(rep.terms[2].structure.as_ref() == Some(&zp), "p = {p}: pi^(2) = {:?}", rep.terms[2].structure);
        ensure!(rep.certified, "p = {p}: not certified");
        ensure!(!rep.witnesses.is_empty(), "p = {p}: no witness");
        for w in &rep.witnesses {
            ensure!(w.verified, "p = {p}: witness {} not verified", w.witness);
            ensure!(w.augmentation == "1", "p = {p}: witness {} augments to {}", w.witness, w.augmentation);
        }
    }
    Ok(())
}

type Affine = [[i64; 3]; 3];

fn affine_mul(x: &Affine, y: &Affine) -> Affine {
    let mut z = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            z[i][j] = (0..3).map(|k| x[i][k] * y[k][j]).sum();
        }
    }
    z
}

/// Inverse of a unimodular affine map `[[T, v], [0, 1]]` with `T` 2×2.
fn affine_inv(x: &Affine) -> Affine {
    let det = x[0][0] * x[1][1] - x[0][1] * x[1][0];
    assert!(det.abs() == 1);
    let t = [[x[1][1] * det, -x[0][1] * det], [-x[1][0] * det, x[0][0] * det]];
    let v = [
        -(t[0][0] * x[0][2] + t[0][1] * x[1][2]),
        -(t[1][0] * x[0][2] + t[1][1] * x[1][2]),
    ];
    [[t[0][0], t[0][1], v[0]], [t[1][0], t[1][1], v[1]], [0, 0, 1]]
}

fn affine_eval(images: &[Affine], w: &Word) -> Affine {
    let mut acc = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    for l in w.letters() {
        let g = if l.inverse { affine_inv(&images[l.gen]) } else { images[l.gen] };
        acc = affine_mul(&acc, &g);
    }
    acc
}

fn criterion_4() -> Outcome {
    let g = catalog("example2", &[]).map_err(|e| e.to_string())?;
    for r in [RSpec::Z, RSpec::Q] {
        let rep = series(&g, r, 2, DEFAULT_MAX_COSETS).map_err(|e| e.to_string())?;
        ensure!(rep.route.contains("trivial action"), "{r}: route {}", rep.route);
        ensure!(rep.quotients[0] == inv("Z^2"), "{r}: quotient {}", rep.quotients[0]);
        ensure!(rep.quotients[1] == inv("Z"), "{r}: second quotient {}", rep.quotients[1]);
        let ab = rep.terms[1].abelianization.as_ref();
        ensure!(ab == Some(&inv("Z")), "{r}: H1(pi^(1)) = {ab:?}");
    }

    // pi^(2) = 0. With a, c, t the generators, the relators are [a,c],
    // t a t^-1 = a c and t c t^-1 = c, so c is central and pi/<c> is free
    // abelian on a, t; hence pi^(1) = <c>. The affine action a -> +(1,0),
    // c -> +(0,1), t -> [[1,0],[1,1]] satisfies the relators and c acts with
    // infinite order, so <c> is infinite cyclic. A surjection Z -> Z is
    // injective, so pi^(2) = ker(pi^(1) -> pi^(1)/pi^(2) = Z) = 0.
    let a: Affine = [[1, 0, 1], [0, 1, 0], [0, 0, 1]];
    let c: Affine = [[1, 0, 0], [0, 1, 1], [0, 0, 1]];
    let t: Affine = [[1, 0, 0], [1, 1, 0], [0, 0, 1]];
    let images = [a, c, t];
    let id = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    for rel in g.relators() {
        ensure!(affine_eval(&images, rel) == id, "relator {} fails in the affine group", g.word_display(rel));
    }
    let (aw, cw, tw) = (Word::gen(0), Word::gen(1), Word::gen(2));
    let tc = tw.mul(&cw).mul(&tw.inverse()).mul(&cw.inverse());
    for w in [Word::commutator(&aw, &cw), tc] {
        ensure!(g.relators().contains(&w), "{} is not a relator", g.word_display(&w));
    }
    // Deleting c leaves relators that are empty or commutators of a and t.
    let killed: Vec<Word> = g
        .relators()
        .iter()
        .map(|r| Word::from_letters(r.letters().iter().copied().filter(|l| l.gen != 1)))
        .filter(|w| !w.is_empty())
        .collect();
    ensure!(!killed.is_empty(), "pi/<c> is free");
    for w in &killed {
        let w = w.cyclically_reduced();
        let commutator = w.len() == 4 && w.exponent_sums(3) == vec![0, 0, 0] && w.max_gen() == Some(2);
        ensure!(commutator, "{} is not a commutator of a and t", g.word_display(&w));
    }
    let c_image = |k: i64| affine_eval(&images, &Word::power_of_gen(1, k));
    ensure!((1..=64).all(|k| c_image(k) != id), "c has finite order in the affine group");
    ensure!(c_image(5)[1][2] == 5, "c does not act by translation");
    Ok(())
}

fn criterion_5() -> Outcome {
    let pairs: &[(&str, &str, RSpec)] = &[
        ("zp_semidirect_z2(3)", "cyclic(5)", RSpec::Z),
        ("zp_semidirect_z2(5)", "cyclic(3)", RSpec::Z),
        ("zp_semidirect_z2(3)", "cyclic(2)", RSpec::Z),
        ("dihedral2k(1,1)", "cyclic(2)", RSpec::ZLocP(2)),
        ("dihedral2k(2,1)", "cyclic(3)", RSpec::ZLocP(2)),
        ("dihedral2k(1,2)", "cyclic(4)", RSpec::ZLocP(2)),
        ("q8n(1)", "cyclic(3)", RSpec::ZLocP(2)),
        ("q8n(1)", "cyclic(2)", RSpec::ZLocP(3)),
        ("p8_3k(1)", "cyclic(2)", RSpec::ZLocP(3)),
        ("p120", "cyclic(2)", RSpec::ZLocP(2)),
        ("cyclic(6)", "cyclic(4)", RSpec::Z),
        ("cyclic(4)", "cyclic(9)", RSpec::ZLocP(3)),
    ];
    let mut ok = 0;
    for (l, r, coeff) in pairs {
        let (gl, gr) = (parse_catalog_ref(l).unwrap(), parse_catalog_ref(r).unwrap());
        let rep = check_product_formula(&gl, &gr, *coeff, 2, DEFAULT_MAX_COSETS).map_err(|e| format!("{l} x {r}: {e}"))?;
        ensure!(rep.holds, "{l} x {r} over {coeff}: {}", rep.details.join("; "));
        ok += 1;
    }
    ensure!(ok >= 10, "only {ok} pairs");
    Ok(())
}

fn criterion_6() -> Outcome {
    for name in ["q8n(1)", "dihedral2k(1,1)"] {
        let g = parse_catalog_ref(name).unwrap();
        let rep = modp_derived_series(&g, 2, 4, DEFAULT_MAX_COSETS).map_err(|e| e.to_string())?;
        ensure!(
            rep.quotients.iter().all(|q| q.is_elementary_abelian(2)),
            "{name}: mod-2 quotients {:?}",
            rep.quotients.iter().map(ToString::to_string).collect::<Vec<_>>()
        );
        ensure!(!rep.quotients[0].is_trivial(), "{name}: first mod-2 quotient is trivial");
        let chain = check_inclusion_chain(&g, 2, RSpec::ZLocP(2), 2, DEFAULT_MAX_COSETS).map_err(|e| e.to_string())?;
        ensure!(chain.holds, "{name}: {}", chain.details.join("; "));
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    let fixtures = load_fixtures(DEFAULT_FIXTURES).map_err(|e| e.to_string())?;
    let mut groups: Vec<String> = Vec::new();
    for f in &fixtures {
        let names: Vec<&String> = match &f.check {
            Check::Series { group, .. }
            | Check::ModpSeries { group, .. }
            | Check::Inclusion { group, .. }
            | Check::DualPath { group, .. } => vec![group],
            Check::Product { left, right, .. } => vec![left, right],
            _ => vec![],
        };
        for n in names {
            if !groups.contains(n) {
                groups.push(n.clone());
            }
        }
    }
    let mut checked = 0;
    for name in &groups {
        let g = parse_catalog_ref(name).unwrap();
        for r in [RSpec::Z, RSpec::Q, RSpec::ZLocP(2), RSpec::ZLocP(3), RSpec::ZLocP(5)] {
            let phi = local_abelian_quotient(&g, r).map_err(|e| e.to_string())?;
            match phi.target().order() {
                Some(k) if k <= 16 => {}
                _ => continue,
            }
            let table = CosetTable::from_hom(&phi, DEFAULT_MAX_COSETS).map_err(|e| e.to_string())?;
            let rs = reidemeister_schreier(&g, &table).presentation().abelianization();
            let fox = h1_twisted(&g, &phi).map_err(|e| format!("{name} over {r}: {e}"))?.invariants();
            ensure!(rs == fox, "{name} over {r}: rewriting {rs}, Fox {fox}");
            checked += 1;
        }
    }
    ensure!(checked >= 20, "only {checked} cases checked");
    Ok(())
}

/// A random Seifert matrix of genus `g`: a symmetric part plus the standard
/// symplectic block, conjugated by random elementary operations.
fn random_seifert(rng: &mut ChaCha8Rng, g: usize) -> SeifertMatrix {
    let n = 2 * g;
    let mut a = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(-3..=3);
            a[i][j] += v;
            if i != j {
                a[j][i] += v;
            }
        }
    }
    for k in 0..g {
        a[2 * k][2 * k + 1] += 1;
    }
    for _ in 0..rng.gen_range(0..4) {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if i == j {
            continue;
        }
        let s = if rng.gen_bool(0.5) { 1 } else { -1 };
        // A -> P^T A P with P = I + s e_ij.
        for r in 0..n {
            a[r][j] += s * a[r][i];
        }
        for c in 0..n {
            a[j][c] += s * a[i][c];
        }
    }
    SeifertMatrix::new(a).expect("random matrix is a Seifert matrix")
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1f);
    for _ in 0..50 {
        let g = rng.gen_range(1..=3);
        let a = random_seifert(&mut rng, g);
        let s = levine_tristram(&a, 0.0);
        ensure!(s.value == 0 && !s.singular, "sigma(1) = {} for {:?}", s.value, a.rows());
        // Delta(1) = 1, so sigma also vanishes up to the first jump.
        let f = signature_function(&a, 1e-9).map_err(|e| e.to_string())?;
        let first = f.jumps.first().map_or(std::f64::consts::PI, |j| j.angle);
        ensure!(f.evaluate(first / 2.0) == 0, "sigma near 1 is {} for {:?}", f.evaluate(first / 2.0), a.rows());
    }

    let trefoil = SeifertMatrix::trefoil();
    let rz = rho_integral(&trefoil, 1e-9).map_err(|e| e.to_string())?;
    ensure!(rz.exact_value == Some(rat(-4, 3)), "rho_Z(trefoil) exact = {:?}", rz.exact);
    let oracle = riemann_rho(&trefoil, 1_000_000);
    ensure!((rz.value - oracle).abs() < 1e-6, "rho_Z = {} but the oracle gives {oracle}", rz.value);
    ensure!((oracle + 4.0 / 3.0).abs() < 1e-6, "oracle {oracle} is not -4/3");
    for (d, v) in [(2, rat(-1, 1)), (4, rat(-3, 2))] {
        let r = rho_cyclic(&trefoil, d).map_err(|e| e.to_string())?;
        ensure!(r.exact_value == Some(v.clone()), "rho_Z{d}(trefoil) = {:?}, want {v}", r.exact);
    }

    for _ in 0..100 {
        let (ga, gb) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let (a, b) = (random_seifert(&mut rng, ga), random_seifert(&mut rng, gb));
        let sum = connected_sum(&a, &b);
        let theta = rng.gen_range(0.01..std::f64::consts::TAU - 0.01);
        let (sa, sb, ss) = (levine_tristram(&a, theta), levine_tristram(&b, theta), levine_tristram(&sum, theta));
        let conj = levine_tristram(&a, std::f64::consts::TAU - theta);
        ensure!(sa.value == conj.value, "sigma(w) = {} but sigma(conj w) = {}", sa.value, conj.value);
        ensure!(ss.value == sa.value + sb.value, "signature not additive at {theta}");
        let mirrored = levine_tristram(&a.mirror(), theta);
        ensure!(mirrored.value == -sa.value, "mirror signature {} vs {}", mirrored.value, sa.value);

        let d = rng.gen_range(2..=7);
        let (ca, cb, cs) = (
            rho_cyclic(&a, d).map_err(|e| e.to_string())?,
            rho_cyclic(&b, d).map_err(|e| e.to_string())?,
            rho_cyclic(&sum, d).map_err(|e| e.to_string())?,
        );
        let (ca, cb, cs) = (ca.exact_value.unwrap(), cb.exact_value.unwrap(), cs.exact_value.unwrap());
        ensure!(cs == &ca + &cb, "rho_Z{d} not additive: {cs} vs {ca} + {cb}");
        let cm = rho_cyclic(&a.mirror(), d).map_err(|e| e.to_string())?.exact_value.unwrap();
        ensure!(cm == -ca, "rho_Z{d} of the mirror is {cm}");

        let (ia, ib, is) = (
            rho_integral(&a, 1e-9).map_err(|e| e.to_string())?,
            rho_integral(&b, 1e-9).map_err(|e| e.to_string())?,
            rho_integral(&sum, 1e-9).map_err(|e| e.to_string())?,
        );
        let slack = ia.error_bound + ib.error_bound + is.error_bound + 1e-9;
        ensure!((is.value - ia.value - ib.value).abs() <= slack, "rho_Z not additive: {} vs {} + {}", is.value, ia.value, ib.value);
        if let (Some(x), Some(y), Some(z)) = (&ia.exact_value, &ib.exact_value, &is.exact_value) {
            ensure!(z == &(x + y), "exact rho_Z not additive");
        }
    }
    within(Duration::from_secs(30), start, "criterion 8")
}

fn criterion_9() -> Outcome {
    let family = distinguish_family(&SeifertMatrix::trefoil(), 10, 2).map_err(|e| e.to_string())?;
    ensure!(family.len() == 10, "{} members", family.len());
    for (k, m) in family.iter().enumerate() {
        let want = rat(-(k as i64), 1);
        ensure!(m.rho.exact_value.as_ref() == Some(&want), "member {k}: rho = {:?}", m.rho.exact);
    }
    for i in 0..family.len() {
        for j in 0..i {
            ensure!(family[i].rho.exact_value != family[j].rho.exact_value, "members {i} and {j} agree");
        }
    }
    Ok(())
}

fn minor_gcd(m: &IntMatrix, k: usize) -> BigInt {
    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        (k - 1..n)
            .flat_map(|last| {
                subsets(last, k - 1).into_iter().map(move |mut s| {
                    s.push(last);
                    s
                })
            })
            .collect()
    }
    let mut g = BigInt::zero();
    for rows in subsets(m.rows(), k) {
        let sub = m.select_rows(&rows);
        for cols in subsets(m.cols(), k) {
            g = g.gcd(&sub.select_cols(&cols).determinant());
        }
    }
    g
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5f0);
    for case in 0..500 {
        let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let rows: Vec<Vec<i64>> = (0..r)
            .map(|_| {
                (0..c)
                    .map(|_| if rng.gen_bool(0.2) { 0 } else { rng.gen_range(-20..=20) })
                    .collect()
            })
            .collect();
        let m = IntMatrix::from_rows(&rows);
        let snf = smith_normal_form(&m);
        ensure!(snf.u.mul(&m).mul(&snf.v) == snf.d, "case {case}: U M V != D");
        ensure!(snf.d.is_diagonal(), "case {case}: D is not diagonal");
        ensure!(snf.u.determinant().abs().is_one(), "case {case}: det U = {}", snf.u.determinant());
        ensure!(snf.v.determinant().abs().is_one(), "case {case}: det V = {}", snf.v.determinant());
        ensure!(snf.u.mul(&snf.u_inv) == IntMatrix::identity(r), "case {case}: U_inv is wrong");
        ensure!(snf.v.mul(&snf.v_inv) == IntMatrix::identity(c), "case {case}: V_inv is wrong");
        let diag = snf.diagonal();
        ensure!(diag.iter().all(|x| !x.is_negative()), "case {case}: negative invariant");
        for w in diag.windows(2) {
            let divides = if w[0].is_zero() { w[1].is_zero() } else { (&w[1] % &w[0]).is_zero() };
            ensure!(divides, "case {case}: {} does not divide {}", w[0], w[1]);
        }
        // d_1 ... d_k = gcd of the k×k minors.
        let mut prod = BigInt::one();
        for (k, d) in diag.iter().enumerate() {
            prod *= d;
            ensure!(minor_gcd(&m, k + 1) == prod, "case {case}: minor gcd mismatch at k = {}", k + 1);
        }
    }
    within(Duration::from_secs(10), start, "criterion 10")
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("q8n local series", criterion_1),
        ("perfect, dihedral and P' series", criterion_2),
        ("Z_p x| Z_2 torsion witnesses", criterion_3),
        ("example2 trivial-action path", criterion_4),
        ("product formula", criterion_5),
        ("mod-p inclusion chain", criterion_6),
        ("dual-path homology oracle", criterion_7),
        ("signature and rho values", criterion_8),
        ("distinguishing family", criterion_9),
        ("Smith normal form properties", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS  {:>2}  {name}  ({t:.2}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL  {:>2}  {name}  ({t:.2}s): {e}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

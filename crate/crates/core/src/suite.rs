//! Regression fixtures for the worked examples and the runner behind
//! `locseries paper-suite`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homology::h1_twisted;
use crate::presentations::{parse_catalog_ref, FinitePresentation};
use crate::enumerator::{reidemeister_schreier, CosetTable};
use crate::series::{check_inclusion_chain, check_product_formula, local_abelian_quotient, modp_derived_series, series};
use crate::signatures::{distinguish_family, rho, RhoCoefficient, SeifertMatrix};
use crate::zlinalg::RSpec;

/// The built-in fixture set.
pub const DEFAULT_FIXTURES: &str = include_str!("../fixtures/regression.json");

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(flatten)]
    pub check: Check,
}

/// What a fixture runs and the values it expects. Abelian groups are
/// compared through their display form, e.g. `Z2 x Z4` or `0`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Check {
    Series {
        group: String,
        coeff: String,
        depth: usize,
        quotients: Vec<String>,
        #[serde(default)]
        term_orders: Option<Vec<Option<u64>>>,
        #[serde(default)]
        stabilized_at: Option<usize>,
        #[serde(default)]
        certified: Option<bool>,
        #[serde(default)]
        witnesses: Option<Vec<String>>,
    },
    ModpSeries {
        group: String,
        p: u64,
        depth: usize,
        quotients: Vec<String>,
        #[serde(default)]
        stabilized_at: Option<usize>,
    },
    Product {
        left: String,
        right: String,
        coeff: String,
        depth: usize,
    },
    Inclusion {
        group: String,
        p: u64,
        coeff: String,
        depth: usize,
    },
    DualPath {
        group: String,
        coeff: String,
    },
    Rho {
        seifert: Vec<Vec<i64>>,
        coeff: String,
        #[serde(default)]
        sum: Option<usize>,
        #[serde(default)]
        exact: Option<String>,
        #[serde(default)]
        value: Option<f64>,
        #[serde(default)]
        tol: Option<f64>,
    },
    Distinguish {
        seifert: Vec<Vec<i64>>,
        n: usize,
        d: u64,
        #[serde(default)]
        values: Option<Vec<String>>,
        #[serde(default)]
        error: Option<String>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct FixtureResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

pub fn load_fixtures(text: &str) -> Result<Vec<Fixture>> {
    serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("bad fixture file: {e}")))
}

fn group(s: &str) -> Result<FinitePresentation> {
    parse_catalog_ref(s)
}

fn compare<T: PartialEq + std::fmt::Debug>(what: &str, expected: &T, got: &T, diffs: &mut Vec<String>) {
    if expected != got {
        diffs.push(format!("{what}: expected {expected:?}, got {got:?}"));
    }
}

fn run_check(check: &Check, cap: usize) -> Result<Vec<String>> {
    let mut diffs = Vec::new();
    match check {
        Check::Series { group: g, coeff, depth, quotients, term_orders, stabilized_at, certified, witnesses } => {
            let rep = series(&group(g)?, RSpec::parse(coeff)?, *depth, cap)?;
            let got: Vec<String> = rep.quotients.iter().map(ToString::to_string).collect();
            compare("quotients", quotients, &got, &mut diffs);
            if let Some(orders) = term_orders {
                let got: Vec<Option<u64>> = rep.terms.iter().map(|t| t.order).collect();
                compare("term orders", orders, &got, &mut diffs);
            }
            if stabilized_at.is_some() {
                compare("stabilized_at", stabilized_at, &rep.stabilized_at, &mut diffs);
            }
            if let Some(c) = certified {
                compare("certified", c, &rep.certified, &mut diffs);
            }
            if let Some(ws) = witnesses {
                let got: Vec<String> = rep.witnesses.iter().map(|w| w.witness.clone()).collect();
                compare("witnesses", ws, &got, &mut diffs);
                if !rep.witnesses.iter().all(|w| w.verified) {
                    diffs.push("a witness failed verification".into());
                }
            }
        }
        Check::ModpSeries { group: g, p, depth, quotients, stabilized_at } => {
            let rep = modp_derived_series(&group(g)?, *p, *depth, cap)?;
            let got: Vec<String> = rep.quotients.iter().map(ToString::to_string).collect();
            compare("quotients", quotients, &got, &mut diffs);
            if stabilized_at.is_some() {
                compare("stabilized_at", stabilized_at, &rep.stabilized_at, &mut diffs);
            }
        }
        Check::Product { left, right, coeff, depth } => {
            let rep = check_product_formula(&group(left)?, &group(right)?, RSpec::parse(coeff)?, *depth, cap)?;
            if !rep.holds {
                diffs.extend(rep.details);
            }
        }
        Check::Inclusion { group: g, p, coeff, depth } => {
            let rep = check_inclusion_chain(&group(g)?, *p, RSpec::parse(coeff)?, *depth, cap)?;
            if !rep.holds {
                diffs.extend(rep.details);
            }
        }
        Check::DualPath { group: g, coeff } => {
            let pres = group(g)?;
            let r = RSpec::parse(coeff)?;
            let phi = local_abelian_quotient(&pres, r)?;
            let table = CosetTable::from_hom(&phi, cap)?;
            let sp = reidemeister_schreier(&pres, &table);
            let rs = sp.presentation().abelianization();
            let fox = h1_twisted(&pres, &phi)?;
            compare("H1 invariants", &rs.to_string(), &fox.invariants().to_string(), &mut diffs);
        }
        Check::Rho { seifert, coeff, sum, exact, value, tol } => {
            let base = SeifertMatrix::new(seifert.clone())?;
            let a = crate::signatures::connected_power(&base, sum.unwrap_or(1));
            let tol = tol.unwrap_or(1e-9);
            let rep = rho(&a, RhoCoefficient::parse(coeff)?, tol)?;
            if let Some(e) = exact {
                compare("exact value", &Some(e.clone()), &rep.exact, &mut diffs);
            }
            if let Some(v) = value {
                if (rep.value - v).abs() > tol.max(rep.error_bound) + 1e-12 {
                    diffs.push(format!("value: expected {v}, got {}", rep.value));
                }
            }
        }
        Check::Distinguish { seifert, n, d, values, error } => {
            let base = SeifertMatrix::new(seifert.clone())?;
            match (distinguish_family(&base, *n, *d), error) {
                (Ok(family), None) => {
                    let got: Vec<String> =
                        family.iter().map(|m| m.rho.exact.clone().unwrap_or_default()).collect();
                    if let Some(v) = values {
                        compare("values", v, &got, &mut diffs);
                    }
                }
                (Ok(_), Some(e)) => diffs.push(format!("expected error {e}, got success")),
                (Err(err), Some(e)) => {
                    let name = format!("{err:?}");
                    if !name.starts_with(e.as_str()) {
                        diffs.push(format!("expected error {e}, got {err}"));
                    }
                }
                (Err(err), None) => return Err(err),
            }
        }
    }
    Ok(diffs)
}

/// Runs one fixture; errors count as failures.
pub fn run_fixture(f: &Fixture, cap: usize) -> FixtureResult {
    let (passed, detail) = match run_check(&f.check, cap) {
        Ok(d) if d.is_empty() => (true, String::new()),
        Ok(d) => (false, d.join("; ")),
        Err(e) => (false, format!("error: {e}")),
    };
    FixtureResult { name: f.name.clone(), passed, detail }
}

/// Runs every fixture whose name contains `only` (all when `None`), in
/// file order.
pub fn run_suite(fixtures: &[Fixture], only: Option<&str>, cap: usize) -> Vec<FixtureResult> {
    fixtures
        .iter()
        .filter(|f| only.map_or(true, |o| f.name.contains(o)))
        .map(|f| run_fixture(f, cap))
        .collect()
}

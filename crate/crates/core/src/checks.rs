//! Seeded property suites over a monoid instance.
//!
//! Each suite returns a [`SuiteReport`]. Work is spread over the current
//! rayon pool, but every result is collected in a fixed order, so reports are
//! identical for any number of workers.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{dirichlet_inverse, mobius, phi_int, ArithFn, DownsetTable};
use crate::element::Element;
use crate::error::{Error, Result};
use crate::fields::NumberField;
use crate::monoid::{AtomView, Monoid};
use crate::notation::format_element;
use crate::ramanujan::{
    apostol_identity_a, apostol_identity_b, divisor_sum_identity, holder_from_parts,
    index_sum_identity, ramanujan_sum,
};
use crate::series::inner_identity;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Th1,
    Th2,
    Apostol,
    Holder,
    Oracle,
    Algebra,
    Inner,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Th1 => "th1",
            Suite::Th2 => "th2",
            Suite::Apostol => "apostol",
            Suite::Holder => "holder",
            Suite::Oracle => "oracle",
            Suite::Algebra => "algebra",
            Suite::Inner => "inner",
            Suite::All => "all",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "th1" => Suite::Th1,
            "th2" => Suite::Th2,
            "apostol" => Suite::Apostol,
            "holder" => Suite::Holder,
            "oracle" => Suite::Oracle,
            "algebra" => Suite::Algebra,
            "inner" => Suite::Inner,
            "all" => Suite::All,
            _ => return Err(Error::InvalidArgument(format!("unknown suite `{s}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CheckConfig {
    /// Norm bound; each suite has its own default.
    pub bound: Option<u64>,
    /// Random trials for the randomized suites.
    pub trials: Option<u64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub context: String,
    pub lhs: String,
    pub rhs: String,
}

/// At most this many failures are listed in a report.
pub const MAX_LISTED_FAILURES: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub instance: String,
    pub bound: Option<u64>,
    pub trials: u64,
    pub failure_count: u64,
    pub failures: Vec<Failure>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<SuiteReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    fn new(
        suite: Suite,
        monoid: &Monoid,
        bound: Option<u64>,
        trials: u64,
        failures: Vec<Failure>,
    ) -> Self {
        let failure_count = failures.len() as u64;
        let failures = failures.into_iter().take(MAX_LISTED_FAILURES).collect();
        Self {
            suite: suite.name().into(),
            instance: monoid.name(),
            bound,
            trials,
            failure_count,
            failures,
            parts: Vec::new(),
        }
    }
}

fn is_integers(monoid: &Monoid) -> bool {
    matches!(monoid.field(), Some(NumberField::Rationals))
}

fn default_bound(suite: Suite, monoid: &Monoid) -> u64 {
    match suite {
        Suite::Th1 | Suite::Holder if is_integers(monoid) => 2000,
        Suite::Th1 | Suite::Holder => 500,
        Suite::Th2 => 300,
        Suite::Oracle => 200,
        Suite::Inner => 500,
        _ => 0,
    }
}

fn default_trials(suite: Suite) -> u64 {
    match suite {
        Suite::Apostol => 1000,
        Suite::Algebra => 500,
        _ => 0,
    }
}

/// Runs a suite. `All` runs every suite that applies to the instance (the
/// exponential-sum oracle only exists for the rational integers).
pub fn run_suite(monoid: &Monoid, suite: Suite, config: &CheckConfig) -> Result<SuiteReport> {
    let bound = config.bound.unwrap_or_else(|| default_bound(suite, monoid));
    let trials = config.trials.unwrap_or_else(|| default_trials(suite));
    let report = match suite {
        Suite::Th1 => {
            let (n, f) = th1(monoid, bound);
            SuiteReport::new(suite, monoid, Some(bound), n, f)
        }
        Suite::Th2 => {
            let (n, f) = th2(monoid, bound);
            SuiteReport::new(suite, monoid, Some(bound), n, f)
        }
        Suite::Holder => {
            let (n, f) = holder(monoid, bound);
            SuiteReport::new(suite, monoid, Some(bound), n, f)
        }
        Suite::Oracle => {
            if !is_integers(monoid) {
                return Err(Error::InvalidArgument(
                    "the exponential-sum oracle needs the z instance".into(),
                ));
            }
            let (n, f) = oracle(monoid, bound);
            SuiteReport::new(suite, monoid, Some(bound), n, f)
        }
        Suite::Inner => {
            let (n, f) = inner(monoid, bound);
            SuiteReport::new(suite, monoid, Some(bound), n, f)
        }
        Suite::Apostol => SuiteReport::new(
            suite,
            monoid,
            None,
            trials,
            apostol(monoid, trials, config.seed),
        ),
        Suite::Algebra => SuiteReport::new(
            suite,
            monoid,
            None,
            trials,
            algebra(monoid, trials, config.seed),
        ),
        Suite::All => {
            let mut suites = vec![Suite::Th1, Suite::Th2, Suite::Apostol, Suite::Holder];
            if is_integers(monoid) {
                suites.push(Suite::Oracle);
            }
            suites.extend([Suite::Algebra, Suite::Inner]);
            let parts = suites
                .into_iter()
                .map(|s| run_suite(monoid, s, config))
                .collect::<Result<Vec<_>>>()?;
            SuiteReport {
                suite: "all".into(),
                instance: monoid.name(),
                bound: config.bound,
                trials: parts.iter().map(|p| p.trials).sum(),
                failure_count: parts.iter().map(|p| p.failure_count).sum(),
                failures: parts
                    .iter()
                    .flat_map(|p| p.failures.iter().cloned())
                    .take(MAX_LISTED_FAILURES)
                    .collect(),
                parts,
            }
        }
    };
    Ok(report)
}

fn failure(
    view: &AtomView,
    what: &str,
    elems: &[(&str, &Element)],
    lhs: impl ToString,
    rhs: impl ToString,
) -> Failure {
    let params: Vec<String> = elems
        .iter()
        .map(|(n, e)| format!("{n}={}", format_element(view, e)))
        .collect();
    Failure {
        context: format!("{what} {}", params.join(" ")),
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
    }
}

fn th1(monoid: &Monoid, bound: u64) -> (u64, Vec<Failure>) {
    let view = monoid.extend(bound as f64);
    let ks = view.enumerate_up_to(bound as f64);
    let failures = ks
        .par_iter()
        .filter_map(|k| {
            let r = divisor_sum_identity(&view, k);
            (!r.pass).then(|| failure(&view, "th1", &[("K", k)], r.lhs, r.rhs))
        })
        .collect();
    (ks.len() as u64, failures)
}

fn th2(monoid: &Monoid, bound: u64) -> (u64, Vec<Failure>) {
    let view = monoid.extend(bound as f64);
    let elems = view.enumerate_up_to(bound as f64);
    let failures: Vec<Failure> = elems
        .par_iter()
        .flat_map_iter(|m| {
            let view = &view;
            elems.iter().filter_map(move |n| {
                let r = index_sum_identity(view, m, n);
                (!r.pass).then(|| failure(view, "th2", &[("M", m), ("N", n)], r.lhs, r.rhs))
            })
        })
        .collect();
    ((elems.len() * elems.len()) as u64, failures)
}

/// The local closed form of `C_K(M)` and its dependence on `gcd(M, K)` only.
fn holder(monoid: &Monoid, bound: u64) -> (u64, Vec<Failure>) {
    let view = monoid.extend(bound as f64);
    let elems = view.enumerate_up_to(bound as f64);
    let phi: HashMap<&Element, BigInt> = elems.iter().map(|e| (e, phi_int(&view, e, 1))).collect();
    let failures: Vec<Failure> = elems
        .par_iter()
        .flat_map_iter(|k| {
            let (view, phi) = (&view, &phi);
            elems.iter().filter_map(move |m| {
                let g = m.gcd(k);
                let rest = k.sub(&g).expect("gcd <= k");
                let c = ramanujan_sum(view, k, m);
                let closed = holder_from_parts(phi[k].clone(), phi[&rest].clone(), mobius(&rest));
                let via_gcd = ramanujan_sum(view, k, &g);
                if closed.as_ref() != Some(&c) || via_gcd != c {
                    let shown = closed.map_or("undefined".to_string(), |v| v.to_string());
                    Some(failure(view, "holder", &[("K", k), ("M", m)], c, shown))
                } else {
                    None
                }
            })
        })
        .collect();
    ((elems.len() * elems.len()) as u64, failures)
}

/// Largest pre-rounding deviation accepted between the divisor sum and the
/// exponential sum.
pub const ORACLE_TOLERANCE: f64 = 1e-6;

/// `sum_{h mod k, (h, k) = 1} exp(2 pi i m h / k)`.
pub fn exponential_sum(k: u64, m: u64) -> Complex64 {
    (1..=k)
        .filter(|&h| num_integer::gcd(h, k) == 1)
        .map(|h| {
            Complex64::from_polar(
                1.0,
                2.0 * std::f64::consts::PI * ((m % k) * h % k) as f64 / k as f64,
            )
        })
        .sum()
}

fn oracle(monoid: &Monoid, bound: u64) -> (u64, Vec<Failure>) {
    let view = monoid.extend(bound as f64);
    let by_norm: Vec<Element> = view.enumerate_up_to(bound as f64);
    let failures: Vec<Failure> = (1..=bound)
        .into_par_iter()
        .flat_map_iter(|k| {
            let (view, by_norm) = (&view, &by_norm);
            (1..=bound).filter_map(move |m| {
                let (ke, me) = (&by_norm[k as usize - 1], &by_norm[m as usize - 1]);
                let c = ramanujan_sum(view, ke, me);
                let z = exponential_sum(k, m);
                let rounded = z.re.round();
                let dev = (z - Complex64::new(rounded, 0.0)).norm();
                (dev >= ORACLE_TOLERANCE || BigInt::from(rounded as i64) != c).then(|| Failure {
                    context: format!("oracle k={k} m={m}"),
                    lhs: c.to_string(),
                    rhs: format!("{z}"),
                })
            })
        })
        .collect();
    (bound * bound, failures)
}

fn inner(monoid: &Monoid, bound: u64) -> (u64, Vec<Failure>) {
    monoid.extend(bound as f64);
    let failures = (1..=bound)
        .into_par_iter()
        .filter_map(|y| {
            let v = inner_identity(monoid, y as f64);
            (v != 1).then(|| Failure {
                context: format!("inner y={y}"),
                lhs: v.to_string(),
                rhs: "1".into(),
            })
        })
        .collect();
    (bound, failures)
}

/// Atoms random elements are drawn from.
const RANDOM_ATOMS: usize = 8;

fn trial_rng(seed: u64, stream: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream.wrapping_mul(1 << 32) ^ trial);
    rng
}

/// At most 4 distinct atoms among the first few, exponents 1 to 3.
pub fn random_element(rng: &mut impl Rng, view: &AtomView) -> Element {
    let available: Vec<u32> = view
        .atoms()
        .iter()
        .take(RANDOM_ATOMS)
        .map(|a| a.id)
        .collect();
    let count = rng.gen_range(0..=4.min(available.len()));
    let chosen: Vec<u32> = available.choose_multiple(rng, count).copied().collect();
    Element::from_pairs(chosen.into_iter().map(|a| (a, rng.gen_range(1..=3))))
}

fn random_divisor(rng: &mut impl Rng, e: &Element) -> Element {
    Element::from_pairs(e.pairs().iter().map(|&(a, k)| (a, rng.gen_range(0..=k))))
}

/// Integer values in `[-5, 5]` on the divisors of `root`.
fn random_table(rng: &mut impl Rng, view: &AtomView, root: &Element) -> HashMap<Element, i64> {
    view.divisors(root)
        .into_iter()
        .map(|d| (d, rng.gen_range(-5..=5)))
        .collect()
}

fn apostol(monoid: &Monoid, trials: u64, seed: u64) -> Vec<Failure> {
    let view = monoid.extend(100.0);
    (0..trials)
        .into_par_iter()
        .flat_map_iter(|t| {
            let mut rng = trial_rng(seed, 1, t);
            let root = random_element(&mut rng, &view);
            let (k, m, n) = (
                random_divisor(&mut rng, &root),
                random_divisor(&mut rng, &root),
                random_divisor(&mut rng, &root),
            );
            let f = ArithFn::from_map(random_table(&mut rng, &view, &root));
            let g = ArithFn::from_map(random_table(&mut rng, &view, &root));
            let h = ArithFn::from_map(random_table(&mut rng, &view, &root));
            let a = apostol_identity_a(&view, &f, &g, &h, &k, &n);
            let b = apostol_identity_b(&view, &f, &g, &h, &m, &n);
            let mut out = Vec::new();
            if !a.pass {
                out.push(failure(
                    &view,
                    &format!("apostol-a trial={t}"),
                    &[("K", &k), ("N", &n)],
                    a.lhs,
                    a.rhs,
                ));
            }
            if !b.pass {
                out.push(failure(
                    &view,
                    &format!("apostol-b trial={t}"),
                    &[("M", &m), ("N", &n)],
                    b.lhs,
                    b.rhs,
                ));
            }
            out
        })
        .collect()
}

/// Convolution laws on random downsets: commutativity, associativity,
/// `delta` as identity, `mu * 1 = delta`, Moebius inversion, and Dirichlet
/// inverses.
fn algebra(monoid: &Monoid, trials: u64, seed: u64) -> Vec<Failure> {
    let view = monoid.extend(100.0);
    (0..trials)
        .into_par_iter()
        .flat_map_iter(|t| {
            let mut rng = trial_rng(seed, 2, t);
            let root = random_element(&mut rng, &view);
            let table = |rng: &mut ChaCha8Rng| {
                DownsetTable::from_arith(
                    &ArithFn::from_map(random_table(rng, &view, &root)),
                    &view,
                    &root,
                )
            };
            let (f, g, h) = (table(&mut rng), table(&mut rng), table(&mut rng));
            let one = DownsetTable::from_arith(&ArithFn::<i64>::one(), &view, &root);
            let mu = DownsetTable::from_arith(&ArithFn::<i64>::mobius(), &view, &root);
            let delta = DownsetTable::from_arith(&ArithFn::<i64>::delta(), &view, &root);
            let conv =
                |a: &DownsetTable<i64>, b: &DownsetTable<i64>| a.convolve(b).expect("same root");

            let mut out = Vec::new();
            let mut law = |name: &str, lhs: &DownsetTable<i64>, rhs: &DownsetTable<i64>| {
                if lhs != rhs {
                    out.push(failure(
                        &view,
                        &format!("{name} trial={t}"),
                        &[("root", &root)],
                        format!("{lhs:?}"),
                        format!("{rhs:?}"),
                    ));
                }
            };
            law("commutativity", &conv(&f, &g), &conv(&g, &f));
            law(
                "associativity",
                &conv(&conv(&f, &g), &h),
                &conv(&f, &conv(&g, &h)),
            );
            law("identity", &conv(&delta, &f), &f);
            law("mu*1", &conv(&mu, &one), &delta);
            law("inversion", &conv(&conv(&g, &one), &mu), &g);

            // f(0) must be a unit of Z
            let sign: i64 = if rng.gen_bool(0.5) { 1 } else { -1 };
            let unit_f = f.map_values(|v| *v);
            let mut values: HashMap<Element, i64> = unit_f.iter().map(|(d, v)| (d, *v)).collect();
            values.insert(Element::zero(), sign);
            let unit_fn = ArithFn::from_map(values);
            let unit_table = DownsetTable::from_arith(&unit_fn, &view, &root);
            let inverse = dirichlet_inverse(&unit_fn, &view, &root).expect("unit at the identity");
            law("inverse", &conv(&unit_table, &inverse), &delta);
            out
        })
        .collect()
}

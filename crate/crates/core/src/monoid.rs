//! Atom tables and norm-bounded enumeration of monoid elements.

use std::cmp::Ordering;
use std::sync::{Arc, RwLock};

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::element::Element;
use crate::error::{Error, Result};
use crate::fields::NumberField;
use crate::sieve::PrimeSieve;

/// A point `p` of `X`, i.e. the generator `A_p` of the monoid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Atom {
    pub id: u32,
    /// `N(A_p) >= 2`.
    pub norm: u64,
    pub label: String,
    /// The rational prime the atom lies above.
    pub prime: u64,
}

/// An atom as produced by an [`AtomSource`], before it is assigned an id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AtomSeed {
    pub norm: u64,
    pub label: String,
}

/// Known density data for `[x] = c x + O(x^alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityMeta {
    pub c: Option<f64>,
    pub alpha: Option<f64>,
}

impl DensityMeta {
    pub fn new(c: Option<f64>, alpha: Option<f64>) -> Self {
        if let Some(a) = alpha {
            assert!((0.0..1.0).contains(&a), "alpha must lie in [0, 1), got {a}");
        }
        if let Some(c) = c {
            assert!(c > 0.0, "density constant must be positive, got {c}");
        }
        Self { c, alpha }
    }

    pub fn unknown() -> Self {
        Self {
            c: None,
            alpha: None,
        }
    }
}

/// A countable set of atoms, described prime by prime.
///
/// Every atom must lie above exactly one rational prime `p` and have norm a
/// power of `p` (at least `p`). This covers the rational integers and all
/// number fields; the table extends itself by sieving rational primes.
pub trait AtomSource: Send + Sync {
    /// Short instance selector, e.g. `z` or `q:-1`.
    fn name(&self) -> String;

    fn density(&self) -> DensityMeta;

    /// Atoms above the rational prime `p`.
    fn atoms_above(&self, p: u64) -> Vec<AtomSeed>;
}

#[derive(Debug, Clone)]
struct TableState {
    sieve: PrimeSieve,
    atoms: Arc<Vec<Atom>>,
    bound: u64,
    // atoms above sieved primes whose norm exceeds the current bound
    pending: Vec<Atom>,
}

/// A monoid instance: an atom source together with its lazily extended,
/// append-only atom table.
pub struct Monoid {
    source: Box<dyn AtomSource>,
    field: Option<NumberField>,
    state: RwLock<TableState>,
}

impl std::fmt::Debug for Monoid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Monoid")
            .field("name", &self.source.name())
            .field("bound", &self.atoms().bound())
            .finish()
    }
}

impl Monoid {
    pub fn new(source: Box<dyn AtomSource>) -> Self {
        Self::with_field(source, None)
    }

    pub(crate) fn with_field(source: Box<dyn AtomSource>, field: Option<NumberField>) -> Self {
        Self {
            source,
            field,
            state: RwLock::new(TableState {
                sieve: PrimeSieve::new(),
                atoms: Arc::new(Vec::new()),
                bound: 1,
                pending: Vec::new(),
            }),
        }
    }

    pub fn name(&self) -> String {
        self.source.name()
    }

    pub fn density(&self) -> DensityMeta {
        self.source.density()
    }

    /// The number field this instance realizes, if any.
    pub fn field(&self) -> Option<&NumberField> {
        self.field.as_ref()
    }

    /// Snapshot of the atoms materialized so far.
    pub fn atoms(&self) -> AtomView {
        let state = self.state.read().expect("atom table lock poisoned");
        AtomView {
            atoms: Arc::clone(&state.atoms),
            bound: state.bound,
        }
    }

    /// Extends the table so that every atom of norm `<= x` is present, and
    /// returns a snapshot covering at least `x`.
    pub fn extend(&self, x: f64) -> AtomView {
        let n = norm_bound(x);
        {
            let state = self.state.read().expect("atom table lock poisoned");
            if state.bound >= n {
                return AtomView {
                    atoms: Arc::clone(&state.atoms),
                    bound: state.bound,
                };
            }
        }
        let mut state = self.state.write().expect("atom table lock poisoned");
        if state.bound < n {
            let TableState {
                sieve,
                atoms,
                bound,
                pending,
            } = &mut *state;
            for &p in sieve.extend_to(n) {
                pending.extend(self.source.atoms_above(p).into_iter().map(|seed| {
                    assert!(
                        seed.norm >= p,
                        "atom norm {} below its prime {p}",
                        seed.norm
                    );
                    Atom {
                        id: 0,
                        norm: seed.norm,
                        label: seed.label,
                        prime: p,
                    }
                }));
            }
            let (mut fresh, rest): (Vec<Atom>, Vec<Atom>) =
                pending.drain(..).partition(|a| a.norm <= n);
            *pending = rest;
            fresh.sort_by(|a, b| a.norm.cmp(&b.norm).then_with(|| a.label.cmp(&b.label)));
            let table = Arc::make_mut(atoms);
            for mut atom in fresh {
                atom.id = u32::try_from(table.len()).expect("atom id overflow");
                table.push(atom);
            }
            *bound = n;
        }
        AtomView {
            atoms: Arc::clone(&state.atoms),
            bound: state.bound,
        }
    }

    /// Looks up an atom by label, extending the table as far as `p^2` for the
    /// prime embedded in the label.
    pub fn find_label(&self, label: &str) -> Result<Atom> {
        let digits: String = label
            .chars()
            .skip(1)
            .take_while(|c| c.is_ascii_digit())
            .collect();
        let p: u64 = digits
            .parse()
            .map_err(|_| Error::UnknownLabel(label.to_string()))?;
        let view = self.extend(p.saturating_mul(p) as f64);
        view.atoms()
            .iter()
            .find(|a| a.label == label)
            .cloned()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Atoms lying above the rational prime `p`.
    pub fn atoms_above(&self, p: u64) -> Vec<Atom> {
        let view = self.extend(p.saturating_mul(p) as f64);
        view.atoms()
            .iter()
            .filter(|a| a.prime == p)
            .cloned()
            .collect()
    }

    pub fn enumerate_up_to(&self, x: f64) -> Vec<Element> {
        self.extend(x).enumerate_up_to(x)
    }

    pub fn count_up_to(&self, x: f64) -> u64 {
        self.extend(x).count_up_to(x)
    }

    pub fn norm_table(&self, x: f64) -> NormTable {
        self.extend(x).norm_table(x)
    }
}

/// `floor(x)` as a norm bound; `x < 1` maps to 0.
pub fn norm_bound(x: f64) -> u64 {
    if x.is_nan() || x < 1.0 {
        0
    } else if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        x.floor() as u64
    }
}

/// Immutable snapshot of an atom table. Every atom of norm `<= bound()` is
/// present.
#[derive(Debug, Clone)]
pub struct AtomView {
    atoms: Arc<Vec<Atom>>,
    bound: u64,
}

impl AtomView {
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, id: u32) -> &Atom {
        &self.atoms[id as usize]
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    /// Atoms of norm `<= n`, a prefix of the table.
    fn atoms_up_to(&self, n: u64) -> &[Atom] {
        let k = self.atoms.partition_point(|a| a.norm <= n);
        &self.atoms[..k]
    }

    fn check_covers(&self, n: u64) {
        assert!(
            n <= self.bound,
            "atom table covers norms <= {}, requested {n}",
            self.bound
        );
    }

    /// `N(e)`, the product of atom norms raised to their exponents.
    pub fn norm(&self, e: &Element) -> BigUint {
        let mut out = BigUint::one();
        for &(a, k) in e.pairs() {
            out *= BigUint::from(self.atom(a).norm).pow(k);
        }
        out
    }

    /// `N(e)` if it fits in a `u64`.
    pub fn norm_u64(&self, e: &Element) -> Option<u64> {
        e.pairs().iter().try_fold(1u64, |acc, &(a, k)| {
            acc.checked_mul(self.atom(a).norm.checked_pow(k)?)
        })
    }

    /// `N(e)` as a float.
    pub fn norm_f64(&self, e: &Element) -> f64 {
        e.pairs()
            .iter()
            .map(|&(a, k)| (self.atom(a).norm as f64).powi(k as i32))
            .product()
    }

    /// Canonical element order: norm, then lexicographic exponent vector.
    pub fn canonical_cmp(&self, a: &Element, b: &Element) -> Ordering {
        match (self.norm_u64(a), self.norm_u64(b)) {
            (Some(x), Some(y)) => x.cmp(&y),
            _ => self.norm(a).cmp(&self.norm(b)),
        }
        .then_with(|| a.lex_cmp(b))
    }

    /// All `d <= e` in canonical order.
    pub fn divisors(&self, e: &Element) -> Vec<Element> {
        let mut out = Vec::with_capacity(e.divisor_count() as usize);
        for_each_divisor(e, |d| out.push(d.clone()));
        out.sort_by(|a, b| self.canonical_cmp(a, b));
        out
    }

    /// Every element of norm `<= x`, each once, in canonical order.
    pub fn enumerate_up_to(&self, x: f64) -> Vec<Element> {
        let n = norm_bound(x);
        if n == 0 {
            return Vec::new();
        }
        self.check_covers(n);
        let mut found: Vec<(u64, Element)> = Vec::new();
        walk_up_to(self.atoms_up_to(n), n, u32::MAX, |pairs, norm| {
            found.push((norm, Element::from_sorted(pairs.to_vec())))
        });
        found.sort_by(|(m, a), (n, b)| m.cmp(n).then_with(|| a.lex_cmp(b)));
        found.into_iter().map(|(_, e)| e).collect()
    }

    /// `[x]`, the number of elements of norm `<= x`.
    pub fn count_up_to(&self, x: f64) -> u64 {
        let n = norm_bound(x);
        if n == 0 {
            return 0;
        }
        self.check_covers(n);
        let mut count = 0u64;
        walk_up_to(self.atoms_up_to(n), n, u32::MAX, |_, _| count += 1);
        count
    }

    /// Visits every element of norm `<= x` (unordered) with its norm. The slice
    /// is the element's sorted `(atom, exponent)` pairs; `max_exp` caps every
    /// exponent (1 restricts to squarefree elements).
    pub fn for_each_up_to(&self, x: f64, max_exp: u32, mut visit: impl FnMut(&[(u32, u32)], u64)) {
        let n = norm_bound(x);
        if n == 0 {
            return;
        }
        self.check_covers(n);
        walk_up_to(self.atoms_up_to(n), n, max_exp, &mut visit);
    }

    /// Per-norm element counts for norms `<= x`.
    pub fn norm_table(&self, x: f64) -> NormTable {
        let n = norm_bound(x);
        let mut counts = vec![0u32; n as usize + 1];
        let mut mobius = vec![0i32; n as usize + 1];
        if n > 0 {
            self.check_covers(n);
            let atoms = self.atoms_up_to(n);
            walk_up_to(atoms, n, u32::MAX, |_, norm| counts[norm as usize] += 1);
            walk_up_to(atoms, n, 1, |pairs, norm| {
                mobius[norm as usize] += if pairs.len() % 2 == 0 { 1 } else { -1 }
            });
        }
        let mut cumulative = Vec::with_capacity(counts.len());
        let mut acc = 0u64;
        for &c in &counts {
            acc += c as u64;
            cumulative.push(acc);
        }
        let mut mertens = Vec::with_capacity(mobius.len());
        let mut acc = 0i64;
        for &m in &mobius {
            acc += m as i64;
            mertens.push(acc);
        }
        NormTable {
            counts,
            cumulative,
            mobius,
            mertens,
        }
    }
}

/// Visits every divisor of `e` (mixed-radix order, not canonical).
pub fn for_each_divisor(e: &Element, mut visit: impl FnMut(&Element)) {
    let pairs = e.pairs();
    let mut current: Vec<u32> = vec![0; pairs.len()];
    loop {
        let d = Element::from_pairs(pairs.iter().zip(&current).map(|(&(a, _), &k)| (a, k)));
        visit(&d);
        let mut i = 0;
        loop {
            if i == pairs.len() {
                return;
            }
            if current[i] < pairs[i].1 {
                current[i] += 1;
                break;
            }
            current[i] = 0;
            i += 1;
        }
    }
}

/// Depth-first exponent search over norm-sorted atoms, pruning as soon as the
/// partial product exceeds `limit`.
fn walk_up_to(atoms: &[Atom], limit: u64, max_exp: u32, mut visit: impl FnMut(&[(u32, u32)], u64)) {
    fn go(
        atoms: &[Atom],
        limit: u64,
        max_exp: u32,
        start: usize,
        norm: u64,
        stack: &mut Vec<(u32, u32)>,
        visit: &mut dyn FnMut(&[(u32, u32)], u64),
    ) {
        visit(stack, norm);
        for (i, atom) in atoms.iter().enumerate().skip(start) {
            let q = atom.norm;
            if norm > limit / q {
                break;
            }
            let mut n = norm * q;
            let mut e = 1;
            loop {
                stack.push((atom.id, e));
                go(atoms, limit, max_exp, i + 1, n, stack, visit);
                stack.pop();
                if e >= max_exp || n > limit / q {
                    break;
                }
                n *= q;
                e += 1;
            }
        }
    }
    if limit == 0 {
        return;
    }
    let mut stack = Vec::new();
    go(atoms, limit, max_exp, 0, 1, &mut stack, &mut visit);
}

/// Exact per-norm data up to a bound `x`: element counts, their prefix sums
/// `[t]`, and the Moebius-weighted counts with their prefix sums.
#[derive(Debug, Clone)]
pub struct NormTable {
    counts: Vec<u32>,
    cumulative: Vec<u64>,
    mobius: Vec<i32>,
    mertens: Vec<i64>,
}

impl NormTable {
    pub fn limit(&self) -> u64 {
        (self.counts.len() - 1) as u64
    }

    /// Number of elements of norm exactly `n`.
    pub fn count_exact(&self, n: u64) -> u32 {
        self.counts
            .get(n as usize)
            .copied()
            .unwrap_or_else(|| panic!("norm {n} beyond table"))
    }

    /// `[t]` for `t <= limit()`.
    pub fn count_up_to(&self, t: f64) -> u64 {
        let n = norm_bound(t);
        assert!(
            n <= self.limit(),
            "query {n} beyond table limit {}",
            self.limit()
        );
        self.cumulative[n as usize]
    }

    /// `sum_{N(A) = n} mu(A)`.
    pub fn mobius_exact(&self, n: u64) -> i32 {
        self.mobius[n as usize]
    }

    /// `sum_{N(A) <= t} mu(A)`.
    pub fn mertens(&self, t: f64) -> i64 {
        let n = norm_bound(t);
        assert!(
            n <= self.limit(),
            "query {n} beyond table limit {}",
            self.limit()
        );
        self.mertens[n as usize]
    }

    /// `(n, count)` for every norm value `n >= 1` that occurs.
    pub fn occupied(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &c)| c > 0)
            .map(|(n, &c)| (n as u64, c))
    }
}

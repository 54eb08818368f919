//! The Dirichlet convolution algebra of functions on `I_X`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;

use crate::element::Element;
use crate::error::{Error, Result};
use crate::monoid::{for_each_divisor, AtomView};
use crate::ring::Ring;

type Evaluator<R> = dyn Fn(&AtomView, &Element) -> R + Send + Sync;

/// A function `I_X -> R`. Evaluation is pure; the atom view supplies norms.
pub struct ArithFn<R> {
    eval: Arc<Evaluator<R>>,
}

impl<R> Clone for ArithFn<R> {
    fn clone(&self) -> Self {
        Self {
            eval: Arc::clone(&self.eval),
        }
    }
}

impl<R> fmt::Debug for ArithFn<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ArithFn")
    }
}

impl<R: Ring> ArithFn<R> {
    pub fn new(f: impl Fn(&AtomView, &Element) -> R + Send + Sync + 'static) -> Self {
        Self { eval: Arc::new(f) }
    }

    pub fn eval(&self, view: &AtomView, e: &Element) -> R {
        (self.eval)(view, e)
    }

    /// The constant function `1`.
    pub fn one() -> Self {
        Self::new(|_, _| R::one())
    }

    /// The convolution identity `delta`.
    pub fn delta() -> Self {
        Self::new(|_, e| if e.is_zero() { R::one() } else { R::zero() })
    }

    /// The norm `N`.
    pub fn norm() -> Self {
        Self::new(|view, e| R::from_bigint(&BigInt::from(view.norm(e))))
    }

    pub fn mobius() -> Self {
        Self::new(|_, e| R::from_i64(mobius(e) as i64))
    }

    /// `chi_A`: 1 on the divisors of `a`, 0 elsewhere.
    pub fn indicator(a: Element) -> Self {
        Self::new(move |_, e| if e.leq(&a) { R::one() } else { R::zero() })
    }

    /// Table lookup, zero outside the table.
    pub fn from_map(values: HashMap<Element, R>) -> Self {
        Self::new(move |_, e| values.get(e).cloned().unwrap_or_else(R::zero))
    }

    /// `f * g`, evaluated lazily by divisor sums.
    pub fn convolve(&self, other: &Self) -> Self {
        let (f, g) = (self.clone(), other.clone());
        Self::new(move |view, e| convolve(&f, &g, view, e))
    }

    /// Pointwise product.
    pub fn times(&self, other: &Self) -> Self {
        let (f, g) = (self.clone(), other.clone());
        Self::new(move |view, e| f.eval(view, e) * g.eval(view, e))
    }
}

impl ArithFn<f64> {
    pub fn von_mangoldt() -> Self {
        Self::new(von_mangoldt)
    }
}

/// `mu(e)`: `(-1)^(number of atoms)` when every exponent is 1, else 0.
pub fn mobius(e: &Element) -> i8 {
    if !e.is_squarefree() {
        0
    } else if e.atom_count().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `Lambda(e)`: `log N(A_p)` when `e` is a positive multiple of a single
/// atom `p`, else 0.
pub fn von_mangoldt(view: &AtomView, e: &Element) -> f64 {
    match e.pairs() {
        [(a, _)] => (view.atom(*a).norm as f64).ln(),
        _ => 0.0,
    }
}

/// `Lambda(e)` as the divisor sum `sum_{D <= e} mu(e - D) log N(D)`.
pub fn von_mangoldt_divisor_sum(view: &AtomView, e: &Element) -> f64 {
    let mut total = 0.0;
    for_each_divisor(e, |d| {
        let rest = e.sub(d).expect("divisor");
        let m = mobius(&rest);
        if m != 0 {
            let log_norm: f64 = d
                .pairs()
                .iter()
                .map(|&(a, k)| k as f64 * (view.atom(a).norm as f64).ln())
                .sum();
            total += m as f64 * log_norm;
        }
    });
    total
}

/// `(f * g)(e) = sum_{D <= e} f(D) g(e - D)`.
pub fn convolve<R: Ring>(f: &ArithFn<R>, g: &ArithFn<R>, view: &AtomView, e: &Element) -> R {
    let mut total = R::zero();
    for_each_divisor(e, |d| {
        let rest = e.sub(d).expect("divisor");
        total = total.clone() + f.eval(view, d) * g.eval(view, &rest);
    });
    total
}

/// Values of a function on the divisors of a fixed root element.
///
/// Divisors are indexed in mixed radix over the root's exponents, so that
/// `index(A - D) = index(A) - index(D)` whenever `D <= A`.
#[derive(Clone, PartialEq)]
pub struct DownsetTable<R> {
    root: Element,
    strides: Vec<usize>,
    values: Vec<R>,
}

impl<R: fmt::Debug> fmt::Debug for DownsetTable<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DownsetTable")
            .field("root", &self.root)
            .field("values", &self.values)
            .finish()
    }
}

impl<R: Ring> DownsetTable<R> {
    /// Tabulates `f` on the divisors of `root`.
    pub fn from_fn(root: &Element, mut f: impl FnMut(&Element) -> R) -> Self {
        let strides = strides(root);
        let len = root.divisor_count() as usize;
        let mut values = Vec::with_capacity(len);
        for i in 0..len {
            values.push(f(&decode(root, &strides, i)));
        }
        Self {
            root: root.clone(),
            strides,
            values,
        }
    }

    pub fn from_arith(f: &ArithFn<R>, view: &AtomView, root: &Element) -> Self {
        Self::from_fn(root, |d| f.eval(view, d))
    }

    pub fn root(&self) -> &Element {
        &self.root
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn index(&self, e: &Element) -> Option<usize> {
        if !e.leq(&self.root) {
            return None;
        }
        Some(
            self.root
                .pairs()
                .iter()
                .zip(&self.strides)
                .map(|(&(a, _), &s)| e.exponent(a) as usize * s)
                .sum(),
        )
    }

    pub fn get(&self, e: &Element) -> Option<&R> {
        self.index(e).map(|i| &self.values[i])
    }

    /// `(divisor, value)` pairs in mixed-radix order.
    pub fn iter(&self) -> impl Iterator<Item = (Element, &R)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (decode(&self.root, &self.strides, i), v))
    }

    /// Convolution of two tables over the same root.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if self.root != other.root {
            return Err(Error::Precondition(
                "convolving tables over different roots".into(),
            ));
        }
        let exps: Vec<u32> = self.root.pairs().iter().map(|&(_, k)| k).collect();
        let mut values = Vec::with_capacity(self.values.len());
        for a in 0..self.values.len() {
            let digits = digits_of(a, &self.strides, &exps);
            let mut total = R::zero();
            for_each_sub_index(&digits, &self.strides, |d| {
                total = total.clone() + self.values[d].clone() * other.values[a - d].clone();
            });
            values.push(total);
        }
        Ok(Self {
            root: self.root.clone(),
            strides: self.strides.clone(),
            values,
        })
    }

    /// Value at `gcd(e, root)`, with `e` given by its sorted pairs.
    pub(crate) fn at_gcd(&self, pairs: &[(u32, u32)]) -> &R {
        let mut index = 0;
        for (&(a, k), &s) in self.root.pairs().iter().zip(&self.strides) {
            if let Ok(i) = pairs.binary_search_by_key(&a, |&(b, _)| b) {
                index += pairs[i].1.min(k) as usize * s;
            }
        }
        &self.values[index]
    }

    pub fn map_values<S: Ring>(&self, f: impl Fn(&R) -> S) -> DownsetTable<S> {
        DownsetTable {
            root: self.root.clone(),
            strides: self.strides.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }
}

/// `g` with `(f * g)(d) = delta(d)` for every `d <= root`, via
/// `g(0) = 1/f(0)` and `g(A) = -(1/f(0)) sum_{0 < D <= A} f(D) g(A - D)`.
pub fn dirichlet_inverse<R: Ring>(
    f: &ArithFn<R>,
    view: &AtomView,
    root: &Element,
) -> Result<DownsetTable<R>> {
    let f_table = DownsetTable::from_arith(f, view, root);
    let inv0 = f_table.values[0]
        .unit_inverse()
        .ok_or_else(|| Error::NotInvertible(format!("{:?}", f_table.values[0])))?;
    let exps: Vec<u32> = root.pairs().iter().map(|&(_, k)| k).collect();
    let strides = f_table.strides.clone();
    let mut g: Vec<R> = Vec::with_capacity(f_table.len());
    g.push(inv0.clone());
    for a in 1..f_table.len() {
        let digits = digits_of(a, &strides, &exps);
        let mut total = R::zero();
        for_each_sub_index(&digits, &strides, |d| {
            if d > 0 {
                total = total.clone() + f_table.values[d].clone() * g[a - d].clone();
            }
        });
        g.push(-(inv0.clone() * total));
    }
    Ok(DownsetTable {
        root: root.clone(),
        strides,
        values: g,
    })
}

fn strides(root: &Element) -> Vec<usize> {
    let mut out = Vec::with_capacity(root.atom_count());
    let mut s = 1usize;
    for &(_, k) in root.pairs() {
        out.push(s);
        s *= k as usize + 1;
    }
    out
}

fn digits_of(mut index: usize, strides: &[usize], exps: &[u32]) -> Vec<u32> {
    let mut digits = vec![0; strides.len()];
    for i in (0..strides.len()).rev() {
        digits[i] = (index / strides[i]) as u32;
        index %= strides[i];
    }
    debug_assert!(digits.iter().zip(exps).all(|(d, e)| d <= e));
    digits
}

fn decode(root: &Element, strides: &[usize], index: usize) -> Element {
    let exps: Vec<u32> = root.pairs().iter().map(|&(_, k)| k).collect();
    let digits = digits_of(index, strides, &exps);
    Element::from_pairs(root.pairs().iter().zip(digits).map(|(&(a, _), k)| (a, k)))
}

/// Visits the indices of every `D` with `D <= A`, where `A` has the given
/// digits.
fn for_each_sub_index(digits: &[u32], strides: &[usize], mut visit: impl FnMut(usize)) {
    let mut current = vec![0u32; digits.len()];
    let mut index = 0usize;
    loop {
        visit(index);
        let mut i = 0;
        loop {
            if i == digits.len() {
                return;
            }
            if current[i] < digits[i] {
                current[i] += 1;
                index += strides[i];
                break;
            }
            index -= current[i] as usize * strides[i];
            current[i] = 0;
            i += 1;
        }
    }
}

/// Jordan-type totient `phi_k(e) = sum_{D <= e} mu(e - D) N(D)^k`, exact.
pub fn phi_int(view: &AtomView, e: &Element, k: u32) -> BigInt {
    let mut total = BigInt::from(0);
    for_each_divisor(e, |d| {
        let m = mobius(&e.sub(d).expect("divisor"));
        if m != 0 {
            total += BigInt::from(m) * BigInt::from(view.norm(d)).pow(k);
        }
    });
    total
}

/// `phi_s(e) = sum_{D <= e} mu(e - D) N(D)^s` for complex `s`.
pub fn phi_s(view: &AtomView, e: &Element, s: Complex64) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for_each_divisor(e, |d| {
        let m = mobius(&e.sub(d).expect("divisor"));
        if m != 0 {
            let log_norm: f64 = d
                .pairs()
                .iter()
                .map(|&(a, k)| k as f64 * (view.atom(a).norm as f64).ln())
                .sum();
            total += m as f64 * (s * log_norm).exp();
        }
    });
    total
}

/// Both sides of the generalized partial summation formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbelSum {
    /// `sum_{N(A) <= x} g(A) F(N(A))`.
    pub direct: f64,
    /// `S(x) F(x) - int_1^x S(t) F'(t) dt`.
    pub partial_summation: f64,
    pub residual: f64,
}

/// Evaluates both sides of the partial summation formula for `g` and a `C^1`
/// function `F` on `[1, x]`.
///
/// `S(t)` is constant between consecutive norms, so on each such segment
/// `int S(t) F'(t) dt = S * (F(b) - F(a))` exactly; only `F` is evaluated.
pub fn abel_sum(
    view: &AtomView,
    g: &ArithFn<f64>,
    big_f: impl Fn(f64) -> f64,
    x: f64,
) -> Result<AbelSum> {
    if !(x >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "partial summation needs x >= 1, got {x}"
        )));
    }
    let elements = view.enumerate_up_to(x);
    let mut direct = 0.0;
    // (norm, sum of g over that norm)
    let mut levels: Vec<(f64, f64)> = Vec::new();
    for e in &elements {
        let n = view.norm_f64(e);
        let v = g.eval(view, e);
        direct += v * big_f(n);
        match levels.last_mut() {
            Some((m, acc)) if *m == n => *acc += v,
            _ => levels.push((n, v)),
        }
    }
    let mut running = 0.0;
    let mut integral = 0.0;
    for (i, &(n, v)) in levels.iter().enumerate() {
        running += v;
        let next = levels.get(i + 1).map_or(x, |&(m, _)| m);
        integral += running * (big_f(next) - big_f(n));
    }
    let partial_summation = running * big_f(x) - integral;
    Ok(AbelSum {
        direct,
        partial_summation,
        residual: (direct - partial_summation).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{quadratic_field, rational_integers};
    use crate::monoid::Monoid;
    use num_rational::BigRational;
    use num_traits::{ToPrimitive, Zero};

    fn z_elem(z: &Monoid, n: u64) -> Element {
        let view = z.extend(n as f64);
        let mut pairs = Vec::new();
        for (p, k) in crate::sieve::factorize(n) {
            let id = view.atoms().iter().position(|a| a.norm == p).unwrap() as u32;
            pairs.push((id, k));
        }
        Element::from_pairs(pairs)
    }

    #[test]
    fn mobius_examples() {
        let z = rational_integers();
        assert_eq!(mobius(&Element::zero()), 1);
        assert_eq!(mobius(&z_elem(&z, 30)), -1);
        assert_eq!(mobius(&z_elem(&z, 4)), 0);
        assert_eq!(mobius(&z_elem(&z, 6)), 1);
    }

    #[test]
    fn von_mangoldt_examples() {
        let z = rational_integers();
        let view = z.extend(100.0);
        assert_eq!(von_mangoldt(&view, &Element::zero()), 0.0);
        assert_eq!(von_mangoldt_divisor_sum(&view, &Element::zero()), 0.0);
        let eight = z_elem(&z, 8);
        assert!((von_mangoldt(&view, &eight) - 2f64.ln()).abs() < 1e-15);
        assert!((von_mangoldt_divisor_sum(&view, &eight) - 2f64.ln()).abs() < 1e-12);
        assert_eq!(von_mangoldt(&view, &z_elem(&z, 6)), 0.0);
        assert!(von_mangoldt_divisor_sum(&view, &z_elem(&z, 6)).abs() < 1e-12);
    }

    #[test]
    fn von_mangoldt_evaluators_agree() {
        for monoid in [rational_integers(), quadratic_field(-1).unwrap()] {
            let view = monoid.extend(1e4);
            for e in view.enumerate_up_to(1e4) {
                let tol = 1e-12 * e.divisor_count() as f64;
                let (a, b) = (von_mangoldt(&view, &e), von_mangoldt_divisor_sum(&view, &e));
                assert!((a - b).abs() <= tol, "{} {e:?}: {a} vs {b}", monoid.name());
            }
        }
    }

    #[test]
    fn convolution_examples() {
        let z = rational_integers();
        let view = z.extend(100.0);
        let one = ArithFn::<i64>::one();
        let mu = ArithFn::<i64>::mobius();
        let norm = ArithFn::<i64>::norm();
        for n in 1..=100 {
            let e = z_elem(&z, n);
            let expect = if n == 1 { 1 } else { 0 };
            assert_eq!(convolve(&mu, &one, &view, &e), expect);
        }
        assert_eq!(convolve(&one, &one, &view, &z_elem(&z, 12)), 6);
        assert_eq!(convolve(&norm, &mu, &view, &z_elem(&z, 6)), 2);
        let lazy = norm.convolve(&mu);
        assert_eq!(lazy.eval(&view, &z_elem(&z, 12)), 4);
    }

    #[test]
    fn inverse_examples() {
        let z = rational_integers();
        let view = z.extend(1000.0);
        let root = z_elem(&z, 360);
        let inv_one = dirichlet_inverse(&ArithFn::<i64>::one(), &view, &root).unwrap();
        for (d, v) in inv_one.iter() {
            assert_eq!(*v, mobius(&d) as i64, "{d:?}");
        }
        let inv_delta = dirichlet_inverse(&ArithFn::<i64>::delta(), &view, &root).unwrap();
        assert!(inv_delta
            .iter()
            .all(|(d, &v)| v == if d.is_zero() { 1 } else { 0 }));

        let p = Element::atom(2); // the prime 5
        let inv_norm = dirichlet_inverse(&ArithFn::<i64>::norm(), &view, &p).unwrap();
        assert_eq!(inv_norm.get(&p), Some(&-5));

        let twice = ArithFn::<i64>::new(|_, _| 2);
        assert!(matches!(
            dirichlet_inverse(&twice, &view, &root),
            Err(Error::NotInvertible(_))
        ));
        // over the rationals 2 is a unit
        let twice_q = ArithFn::<BigRational>::new(|_, _| BigRational::from_i64(2));
        let inv = dirichlet_inverse(&twice_q, &view, &root).unwrap();
        let back = DownsetTable::from_arith(&twice_q, &view, &root)
            .convolve(&inv)
            .unwrap();
        assert!(back.iter().all(|(d, v)| *v
            == if d.is_zero() {
                BigRational::from_i64(1)
            } else {
                BigRational::zero()
            }));
    }

    #[test]
    fn table_convolution_matches_lazy() {
        let z = rational_integers();
        let view = z.extend(1000.0);
        let root = z_elem(&z, 720);
        let f = ArithFn::<i64>::new(|v, e| v.norm_u64(e).unwrap() as i64 % 7 - 3);
        let g = ArithFn::<i64>::mobius();
        let table = DownsetTable::from_arith(&f, &view, &root)
            .convolve(&DownsetTable::from_arith(&g, &view, &root))
            .unwrap();
        for (d, v) in table.iter() {
            assert_eq!(*v, convolve(&f, &g, &view, &d));
        }
        assert_eq!(table.get(&z_elem(&z, 7)), None);
    }

    #[test]
    fn phi_examples() {
        let z = rational_integers();
        let view = z.extend(100.0);
        for n in 1..=30 {
            let e = z_elem(&z, n);
            assert_eq!(phi_int(&view, &e, 0), BigInt::from((n == 1) as i32));
        }
        assert_eq!(phi_int(&view, &z_elem(&z, 6), 1), BigInt::from(2));
        assert_eq!(phi_int(&view, &z_elem(&z, 2), 2), BigInt::from(3));
        let c = phi_s(&view, &z_elem(&z, 6), Complex64::new(1.0, 0.0));
        assert!((c - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        // phi_s(p) = p^s - 1
        let s = Complex64::new(0.5, 2.0);
        let expect = (s * 3f64.ln()).exp() - 1.0;
        assert!((phi_s(&view, &z_elem(&z, 3), s) - expect).norm() < 1e-12);
    }

    #[test]
    fn phi_one_is_norm_times_mu() {
        let z = rational_integers();
        let view = z.extend(1e4);
        let norm = ArithFn::<BigInt>::norm();
        let mu = ArithFn::<BigInt>::mobius();
        for e in view.enumerate_up_to(1e4) {
            assert_eq!(phi_int(&view, &e, 1), convolve(&norm, &mu, &view, &e));
        }
    }

    #[test]
    fn abel_sum_examples() {
        let z = rational_integers();
        let view = z.extend(100.0);
        let one = ArithFn::<f64>::one();

        let r = abel_sum(&view, &one, |t| t.sqrt() + 3.0, 1.0).unwrap();
        assert_eq!(r.direct, 4.0);
        assert_eq!(r.residual, 0.0);

        let r = abel_sum(&view, &one, |t| 1.0 / t, 10.0).unwrap();
        let h10 = BigRational::new(BigInt::from(7381), BigInt::from(2520))
            .to_f64()
            .unwrap();
        assert!((r.direct - h10).abs() < 1e-14);
        assert!((r.partial_summation - h10).abs() < 1e-12);
        assert!(r.residual < 1e-12);

        let r = abel_sum(&view, &one, f64::ln, 100.0).unwrap();
        let log_factorial: f64 = (1..=100).map(|k| (k as f64).ln()).sum();
        assert!((r.direct - log_factorial).abs() < 1e-9);
        assert!((r.direct - 363.739375555563).abs() < 1e-9);
        assert!(r.residual < 1e-9);

        // a non-integral cut and a signed coefficient
        let r = abel_sum(&view, &ArithFn::mobius(), |t| t.powf(-0.5), 57.3).unwrap();
        assert!(r.residual < 1e-12);
        assert!(abel_sum(&view, &one, f64::ln, 0.5).is_err());
    }
}

//! Generalized Ramanujan sums `C_K(M) = sum_{D <= M, K} N(D) mu(K - D)` and
//! the identities they satisfy.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::arith::{convolve, mobius, phi_int, ArithFn};
use crate::element::Element;
use crate::monoid::{for_each_divisor, AtomView};
use crate::ring::Ring;

/// `C_K(M)`.
pub fn ramanujan_sum(view: &AtomView, k: &Element, m: &Element) -> BigInt {
    let g = m.gcd(k);
    match ramanujan_sum_i128(view, k, &g) {
        Some(v) => BigInt::from(v),
        None => ramanujan_sum_big(view, k, &g),
    }
}

/// Definitional sum over `D <= g` where `g = gcd(M, K)`, skipping the terms
/// with `mu(K - D) = 0`: only `D(p) in {K(p) - 1, K(p)}` contribute.
fn contributing_divisors(k: &Element, g: &Element, mut visit: impl FnMut(&Element, i8)) {
    let ranges: Vec<(u32, u32, u32)> = k
        .pairs()
        .iter()
        .map(|&(a, e)| (a, e - 1, g.exponent(a)))
        .filter(|&(_, lo, hi)| lo <= hi)
        .collect();
    // atoms of K whose exponent in g is below K(p) - 1 kill every term
    if ranges.len() < k.atom_count() {
        return;
    }
    let mut current: Vec<u32> = ranges.iter().map(|&(_, lo, _)| lo).collect();
    loop {
        let d = Element::from_pairs(ranges.iter().zip(&current).map(|(&(a, _, _), &x)| (a, x)));
        let m = mobius(&k.sub(&d).expect("d <= k"));
        visit(&d, m);
        let mut i = 0;
        loop {
            if i == ranges.len() {
                return;
            }
            if current[i] < ranges[i].2 {
                current[i] += 1;
                break;
            }
            current[i] = ranges[i].1;
            i += 1;
        }
    }
}

pub(crate) fn ramanujan_sum_i128(view: &AtomView, k: &Element, g: &Element) -> Option<i128> {
    // every D <= K has N(D) <= N(K)
    view.norm_u64(k)?;
    let mut total = 0i128;
    contributing_divisors(k, g, |d, m| {
        total += m as i128 * view.norm_u64(d).expect("d <= k") as i128
    });
    Some(total)
}

fn ramanujan_sum_big(view: &AtomView, k: &Element, g: &Element) -> BigInt {
    let mut total = BigInt::zero();
    contributing_divisors(k, g, |d, m| {
        total += BigInt::from(m) * BigInt::from(view.norm(d))
    });
    total
}

/// `S_{f,g}(M, K) = sum_{D <= M, K} f(D) g(K - D)`.
pub fn s_fg<R: Ring>(
    view: &AtomView,
    f: &ArithFn<R>,
    g: &ArithFn<R>,
    m: &Element,
    k: &Element,
) -> R {
    let mut total = R::zero();
    for_each_divisor(&m.gcd(k), |d| {
        total = total.clone() + f.eval(view, d) * g.eval(view, &k.sub(d).expect("d <= k"));
    });
    total
}

/// Outcome of evaluating both sides of an identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport<V> {
    pub lhs: V,
    pub rhs: V,
    pub pass: bool,
    pub context: String,
}

impl<V: PartialEq> IdentityReport<V> {
    fn exact(lhs: V, rhs: V, context: String) -> Self {
        let pass = lhs == rhs;
        Self {
            lhs,
            rhs,
            pass,
            context,
        }
    }
}

/// `sum_{D <= K} C_K(D)` against `N(K) prod_{p | K} (1 - 2/N(A_p))`.
pub fn divisor_sum_identity(view: &AtomView, k: &Element) -> IdentityReport<BigRational> {
    let mut lhs = BigInt::zero();
    for_each_divisor(k, |d| lhs += ramanujan_sum(view, k, d));
    let mut rhs = BigRational::from_integer(BigInt::from(view.norm(k)));
    for a in k.support() {
        let n = BigInt::from(view.atom(a).norm);
        rhs *= BigRational::new(&n - 2, n);
    }
    IdentityReport::exact(BigRational::from_integer(lhs), rhs, format!("K={k:?}"))
}

/// `sum_{D <= N} C_D(M)` against `N(N)` if `N <= M`, else 0.
pub fn index_sum_identity(view: &AtomView, m: &Element, n: &Element) -> IdentityReport<BigInt> {
    let mut lhs = BigInt::zero();
    for_each_divisor(n, |d| lhs += ramanujan_sum(view, d, m));
    let rhs = if n.leq(m) {
        BigInt::from(view.norm(n))
    } else {
        BigInt::zero()
    };
    IdentityReport::exact(lhs, rhs, format!("M={m:?} N={n:?}"))
}

/// With `K` fixed:
/// `sum_{D <= N} S_{f,g}(D, K) h(N - D) = sum_{D <= N, K} f(D) g(K - D) (1 * h)(N - D)`.
pub fn apostol_identity_a<R: Ring>(
    view: &AtomView,
    f: &ArithFn<R>,
    g: &ArithFn<R>,
    h: &ArithFn<R>,
    k: &Element,
    n: &Element,
) -> IdentityReport<R> {
    let mut lhs = R::zero();
    for_each_divisor(n, |d| {
        lhs = lhs.clone() + s_fg(view, f, g, d, k) * h.eval(view, &n.sub(d).expect("d <= n"));
    });
    let one_h = ArithFn::one().convolve(h);
    let mut rhs = R::zero();
    for_each_divisor(&n.gcd(k), |d| {
        let term = f.eval(view, d)
            * g.eval(view, &k.sub(d).expect("d <= k"))
            * one_h.eval(view, &n.sub(d).expect("d <= n"));
        rhs = rhs.clone() + term;
    });
    IdentityReport::exact(lhs, rhs, format!("K={k:?} N={n:?}"))
}

/// With `M` fixed:
/// `sum_{D <= N} S_{f,g}(M, D) h(N - D) = sum_{D <= N, M} f(D) (g * h)(N - D)`.
pub fn apostol_identity_b<R: Ring>(
    view: &AtomView,
    f: &ArithFn<R>,
    g: &ArithFn<R>,
    h: &ArithFn<R>,
    m: &Element,
    n: &Element,
) -> IdentityReport<R> {
    let mut lhs = R::zero();
    for_each_divisor(n, |d| {
        lhs = lhs.clone() + s_fg(view, f, g, m, d) * h.eval(view, &n.sub(d).expect("d <= n"));
    });
    let mut rhs = R::zero();
    for_each_divisor(&n.gcd(m), |d| {
        rhs = rhs.clone() + f.eval(view, d) * convolve(g, h, view, &n.sub(d).expect("d <= n"));
    });
    IdentityReport::exact(lhs, rhs, format!("M={m:?} N={n:?}"))
}

/// The local closed form `mu(K - G) phi_1(K) / phi_1(K - G)` with
/// `G = gcd(M, K)`, when the division is exact.
pub fn holder_form(view: &AtomView, k: &Element, m: &Element) -> Option<BigInt> {
    let g = m.gcd(k);
    let rest = k.sub(&g).expect("gcd <= k");
    holder_from_parts(phi_int(view, k, 1), phi_int(view, &rest, 1), mobius(&rest))
}

pub(crate) fn holder_from_parts(phi_k: BigInt, phi_rest: BigInt, mu_rest: i8) -> Option<BigInt> {
    if phi_rest.is_zero() {
        return None;
    }
    let (q, r) = phi_k.div_rem(&phi_rest);
    r.is_zero().then(|| q * BigInt::from(mu_rest))
}

/// Exact `C_K(G)` on every `G <= K`, for fast lookups keyed by gcd.
pub(crate) fn ramanujan_row(view: &AtomView, k: &Element) -> crate::arith::DownsetTable<i128> {
    crate::arith::DownsetTable::from_fn(k, |g| {
        ramanujan_sum_i128(view, k, g).expect("norm of K fits in u64")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{quadratic_field, rational_integers};
    use crate::monoid::Monoid;
    use num_complex::Complex64;
    use num_traits::One;

    fn z_elem(view: &AtomView, n: u64) -> Element {
        Element::from_pairs(crate::sieve::factorize(n).into_iter().map(|(p, k)| {
            (
                view.atoms().iter().position(|a| a.norm == p).unwrap() as u32,
                k,
            )
        }))
    }

    /// `sum_{h mod k, (h,k)=1} exp(2 pi i m h / k)`.
    fn exponential_sum(k: u64, m: u64) -> Complex64 {
        (1..=k)
            .filter(|&h| num_integer::gcd(h, k) == 1)
            .map(|h| {
                Complex64::from_polar(
                    1.0,
                    2.0 * std::f64::consts::PI * ((m * h) % k) as f64 / k as f64,
                )
            })
            .sum()
    }

    fn label(monoid: &Monoid, l: &str) -> u32 {
        monoid.find_label(l).unwrap().id
    }

    #[test]
    fn ramanujan_examples() {
        let z = rational_integers();
        let view = z.extend(1000.0);
        let zero = Element::zero();
        for m in 1..=20 {
            assert_eq!(
                ramanujan_sum(&view, &zero, &z_elem(&view, m)),
                BigInt::one()
            );
        }
        for k in 1..=30 {
            let ke = z_elem(&view, k);
            assert_eq!(ramanujan_sum(&view, &ke, &zero), BigInt::from(mobius(&ke)));
        }
        assert_eq!(
            ramanujan_sum(&view, &z_elem(&view, 6), &z_elem(&view, 4)),
            BigInt::from(-1)
        );

        let gi = quadratic_field(-1).unwrap();
        let r = label(&gi, "p2r");
        let view = gi.atoms();
        assert_eq!(
            ramanujan_sum(&view, &Element::atom(r), &Element::atom_power(r, 2)),
            BigInt::one()
        );
    }

    #[test]
    fn classical_table_matches_exponential_sums() {
        let z = rational_integers();
        let view = z.extend(200.0);
        for k in 1..=60u64 {
            for m in 1..=60u64 {
                let expect = exponential_sum(k, m);
                let got = ramanujan_sum(&view, &z_elem(&view, k), &z_elem(&view, m));
                assert!(expect.im.abs() < 1e-9);
                assert_eq!(BigInt::from(expect.re.round() as i64), got, "c_{k}({m})");
            }
        }
    }

    #[test]
    fn big_path_agrees_with_small_path() {
        let z = rational_integers();
        let view = z.extend(100.0);
        let k = Element::from_pairs([(0, 3), (1, 2), (4, 1)]);
        for m in view.enumerate_up_to(100.0) {
            let g = m.gcd(&k);
            assert_eq!(
                BigInt::from(ramanujan_sum_i128(&view, &k, &g).unwrap()),
                ramanujan_sum_big(&view, &k, &g)
            );
        }
        // norm beyond u64 takes the big-integer route
        let huge = Element::from_pairs([(0, 70), (1, 1)]);
        let m = Element::from_pairs([(0, 70)]);
        // C_{2^70 3}(2^70) = 2^70 mu(3) + 2^69 mu(2*3)
        let expect: BigInt = (BigInt::one() << 69usize) - (BigInt::one() << 70usize);
        assert_eq!(ramanujan_sum(&view, &huge, &m), expect);
    }

    #[test]
    fn s_fg_examples() {
        let z = rational_integers();
        let view = z.extend(100.0);
        let norm = ArithFn::<BigInt>::norm();
        let mu = ArithFn::<BigInt>::mobius();
        let one = ArithFn::<BigInt>::one();
        for k in 1..=36 {
            for m in 1..=36 {
                let (ke, me) = (z_elem(&view, k), z_elem(&view, m));
                assert_eq!(
                    s_fg(&view, &norm, &mu, &me, &ke),
                    ramanujan_sum(&view, &ke, &me)
                );
                let tau = (1..=num_integer::gcd(k, m))
                    .filter(|d| num_integer::gcd(k, m) % d == 0)
                    .count();
                assert_eq!(s_fg(&view, &one, &one, &me, &ke), BigInt::from(tau));
            }
        }
        let f = ArithFn::<i64>::new(|v, e| v.norm_u64(e).unwrap() as i64 + 3);
        let g = ArithFn::<i64>::new(|v, e| 2 * v.norm_u64(e).unwrap() as i64 - 1);
        let k = z_elem(&view, 45);
        assert_eq!(s_fg(&view, &f, &g, &Element::zero(), &k), 4 * 89);
    }

    #[test]
    fn divisor_sum_examples() {
        let z = rational_integers();
        let view = z.extend(100.0);
        let r = divisor_sum_identity(&view, &Element::zero());
        assert!(r.pass && r.lhs == BigRational::one());
        let r = divisor_sum_identity(&view, &z_elem(&view, 9));
        assert!(r.pass);
        assert_eq!(r.lhs, BigRational::from_integer(BigInt::from(3)));

        let gi = quadratic_field(-1).unwrap();
        let two = Element::atom_power(label(&gi, "p2r"), 2);
        let r = divisor_sum_identity(&gi.atoms(), &two);
        assert!(r.pass && r.lhs.is_zero());
    }

    #[test]
    fn index_sum_examples() {
        let z = rational_integers();
        let view = z.extend(100.0);
        let zero = Element::zero();
        let r = index_sum_identity(&view, &z_elem(&view, 17), &zero);
        assert!(r.pass && r.lhs.is_one());
        let r = index_sum_identity(&view, &z_elem(&view, 8), &z_elem(&view, 4));
        assert!(r.pass && r.lhs == BigInt::from(4));
        let r = index_sum_identity(&view, &z_elem(&view, 6), &z_elem(&view, 4));
        assert!(r.pass && r.lhs.is_zero());
    }

    #[test]
    fn apostol_examples() {
        let z = rational_integers();
        let view = z.extend(100.0);
        let norm = ArithFn::<i64>::norm();
        let mu = ArithFn::<i64>::mobius();
        let one = ArithFn::<i64>::one();
        let six = z_elem(&view, 6);
        let r = apostol_identity_a(&view, &norm, &mu, &one, &six, &six);
        assert!(r.pass);
        assert_eq!(r.lhs, 0);

        let f = ArithFn::<i64>::new(|v, e| (v.norm_u64(e).unwrap() as i64 * 7) % 11 - 5);
        let g = ArithFn::<i64>::new(|v, e| (v.norm_u64(e).unwrap() as i64 * 3) % 5 - 2);
        let h = ArithFn::<i64>::new(|v, e| (v.norm_u64(e).unwrap() as i64) % 4 - 1);
        for k in [1, 2, 4, 6, 12] {
            for n in [1, 2, 3, 4, 6, 12] {
                let (ke, ne) = (z_elem(&view, k), z_elem(&view, n));
                assert!(apostol_identity_a(&view, &f, &g, &h, &ke, &ne).pass);
                let delta = ArithFn::delta();
                let r = apostol_identity_a(&view, &f, &g, &delta, &ke, &ne);
                assert!(r.pass);
                assert_eq!(r.lhs, s_fg(&view, &f, &g, &ne, &ke));
            }
        }
        let (m, n) = (z_elem(&view, 10), z_elem(&view, 30));
        assert!(apostol_identity_b(&view, &f, &g, &h, &m, &n).pass);
        let r = apostol_identity_b(&view, &f, &g, &h, &Element::zero(), &n);
        assert!(r.pass);
        assert_eq!(
            r.lhs,
            f.eval(&view, &Element::zero()) * convolve(&g, &h, &view, &n)
        );
        // f = N, g = mu, h = 1 reproduces index_sum_identity
        for (m, n) in [(8, 4), (6, 4), (12, 6), (5, 25)] {
            let (me, ne) = (z_elem(&view, m), z_elem(&view, n));
            let b = apostol_identity_b(&view, &norm, &mu, &one, &me, &ne);
            let t = index_sum_identity(&view, &me, &ne);
            assert_eq!(BigInt::from(b.lhs), t.lhs);
        }
    }

    #[test]
    fn holder_examples() {
        let z = rational_integers();
        let view = z.extend(1000.0);
        for k in 1..=120 {
            for m in 1..=120 {
                let (ke, me) = (z_elem(&view, k), z_elem(&view, m));
                assert_eq!(
                    holder_form(&view, &ke, &me),
                    Some(ramanujan_sum(&view, &ke, &me)),
                    "c_{k}({m})"
                );
            }
        }
        assert_eq!(holder_from_parts(BigInt::from(5), BigInt::from(2), 1), None);
        assert_eq!(holder_from_parts(BigInt::from(5), BigInt::zero(), 1), None);
    }
}

//! Truncated series and counting experiments.
//!
//! Float reductions run in increasing norm order over a [`NormTable`], so
//! their results do not depend on enumeration order or thread count.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::arith::mobius;
use crate::element::Element;
use crate::error::{Error, Result};
use crate::monoid::{for_each_divisor, norm_bound, Monoid, NormTable};
use crate::ramanujan::ramanujan_row;

/// `H(t) = sum_{N(C) <= t} 1/N(C)` for every integer `t` up to the table
/// limit.
pub fn harmonic_prefix(table: &NormTable) -> Vec<f64> {
    let mut out = Vec::with_capacity(table.limit() as usize + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for n in 1..=table.limit() {
        acc += table.count_exact(n) as f64 / n as f64;
        out.push(acc);
    }
    out
}

/// `sum_{N(C) <= x} 1/N(C)` in floating point.
pub fn harmonic_partial(monoid: &Monoid, x: f64) -> f64 {
    harmonic_prefix(&monoid.norm_table(x))
        .last()
        .copied()
        .unwrap_or(0.0)
}

/// `sum_{N(C) <= x} 1/N(C)` as an exact rational.
pub fn harmonic_partial_exact(monoid: &Monoid, x: f64) -> BigRational {
    let table = monoid.norm_table(x);
    let mut acc = BigRational::zero();
    for (n, c) in table.occupied() {
        acc += BigRational::new(BigInt::from(c), BigInt::from(n));
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ResidueMode {
    /// `sum_{D <= K} mu(K - D) H(x / N(D))`.
    Grouped,
    /// `sum_{N(M) <= x} C_K(M) / N(M)`.
    Direct,
}

/// Partial sums of `sum_M C_K(M)/N(M)`, which tends to `-c Lambda(K)`.
///
/// Both modes compute the same finite sum over `N(M) <= x`: grouping the
/// terms by the divisor `D` of `K` gives
/// `sum_{D <= K} mu(K - D) N(D) sum_{N(D + C) <= x} 1/N(D + C)`
/// `= sum_{D <= K} mu(K - D) H(x / N(D))`.
pub fn residue_series(monoid: &Monoid, k: &Element, x: f64, mode: ResidueMode) -> Result<f64> {
    if k.is_zero() {
        return Err(Error::InvalidArgument(
            "the residue series needs K != 0".into(),
        ));
    }
    let view = monoid.extend(x);
    match mode {
        ResidueMode::Grouped => {
            let prefix = harmonic_prefix(&view.norm_table(x));
            let mut total = 0.0;
            for d in view.divisors(k) {
                let m = mobius(&k.sub(&d).expect("divisor"));
                if m != 0 {
                    let t = norm_bound(x / view.norm_f64(&d));
                    total += m as f64 * prefix[t as usize];
                }
            }
            Ok(total)
        }
        ResidueMode::Direct => {
            let row = ramanujan_row(&view, k);
            let mut total = 0.0;
            for e in view.enumerate_up_to(x) {
                let c = *row.at_gcd(e.pairs());
                if c != 0 {
                    total += c as f64 / view.norm_f64(&e);
                }
            }
            Ok(total)
        }
    }
}

/// A truncated zeta sum together with the estimated size of its tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaTruncation<V> {
    pub value: V,
    /// `c x^(1 - sigma) / (sigma - 1)` when `c` is known and `sigma > 1`.
    pub tail: Option<f64>,
}

fn zeta_tail(monoid: &Monoid, sigma: f64, x: f64) -> Option<f64> {
    let c = monoid.density().c?;
    (sigma > 1.0 && x >= 1.0).then(|| c * x.powf(1.0 - sigma) / (sigma - 1.0))
}

/// `sum_{N(A) <= x} N(A)^(-s)` for real `s`.
pub fn zeta_partial(monoid: &Monoid, s: f64, x: f64) -> ZetaTruncation<f64> {
    let table = monoid.norm_table(x);
    let value = table
        .occupied()
        .map(|(n, c)| c as f64 * (n as f64).powf(-s))
        .sum();
    ZetaTruncation {
        value,
        tail: zeta_tail(monoid, s, x),
    }
}

/// `sum_{N(A) <= x} N(A)^(-s)` for complex `s`.
pub fn zeta_partial_complex(monoid: &Monoid, s: Complex64, x: f64) -> ZetaTruncation<Complex64> {
    let table = monoid.norm_table(x);
    let value = table
        .occupied()
        .map(|(n, c)| c as f64 * (-s * (n as f64).ln()).exp())
        .sum();
    ZetaTruncation {
        value,
        tail: zeta_tail(monoid, s.re, x),
    }
}

/// `sum_{N(M) <= x} C_K(M)`, exact.
pub fn fixed_k_partial(monoid: &Monoid, k: &Element, x: f64) -> i128 {
    let view = monoid.extend(x);
    let row = ramanujan_row(&view, k);
    let mut total = 0i128;
    view.for_each_up_to(x, u32::MAX, |pairs, _| total += *row.at_gcd(pairs));
    total
}

/// `sum_{N(M) <= x} C_K(M)` regrouped as `sum_{D <= K} N(D) mu(K - D) [x / N(D)]`.
pub fn fixed_k_partial_regrouped(monoid: &Monoid, k: &Element, x: f64) -> i128 {
    let view = monoid.extend(x);
    let table = view.norm_table(x);
    let mut total = 0i128;
    for_each_divisor(k, |d| {
        let m = mobius(&k.sub(d).expect("divisor"));
        if m != 0 {
            let n = view.norm_f64(d);
            if n <= x {
                total += m as i128
                    * view.norm_u64(d).expect("fits") as i128
                    * table.count_up_to(x / n) as i128;
            }
        }
    });
    total
}

/// `S(x, y) = sum_{N(M) <= x, N(K) <= y} C_K(M)` by the definitional double sum.
pub fn double_sum_direct(monoid: &Monoid, x: f64, y: f64) -> i128 {
    let view = monoid.extend(x.max(y));
    let ms: Vec<Vec<(u32, u32)>> = {
        let mut out = Vec::new();
        view.for_each_up_to(x, u32::MAX, |pairs, _| out.push(pairs.to_vec()));
        out
    };
    let mut total = 0i128;
    view.for_each_up_to(y, u32::MAX, |k, _| {
        let row = ramanujan_row(&view, &Element::from_pairs(k.iter().copied()));
        total += ms.iter().map(|m| *row.at_gcd(m)).sum::<i128>();
    });
    total
}

/// `S(x, y)` regrouped over pairs `(D, A)` with `N(D) N(A) <= y`:
/// `sum N(D) mu(A) [x / N(D)] = sum_{n <= y} n #{N(D) = n} [x / n] M(y / n)`,
/// where `M(t) = sum_{N(A) <= t} mu(A)`.
pub fn double_sum_regrouped(monoid: &Monoid, x: f64, y: f64) -> i128 {
    let table = monoid.norm_table(x.max(y));
    let (xb, yb) = (norm_bound(x), norm_bound(y));
    if xb == 0 {
        return 0;
    }
    let mut total = 0i128;
    for n in 1..=yb {
        let c = table.count_exact(n);
        if c == 0 {
            continue;
        }
        let mert = table.mertens((yb / n) as f64);
        if mert == 0 {
            continue;
        }
        total += n as i128 * c as i128 * table.count_up_to((xb / n) as f64) as i128 * mert as i128;
    }
    total
}

/// Pair-term budget below which [`double_sum`] also runs the direct sum.
pub const DIRECT_PAIR_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticsReport {
    pub x: f64,
    pub y: f64,
    /// Exact `S(x, y)`.
    pub s: i128,
    /// The definitional evaluation, when it was run.
    pub s_direct: Option<i128>,
    /// `S / x`.
    pub c_hat: f64,
    pub main_term: Option<f64>,
    /// `T(x, y) = S - c x`.
    pub residual: Option<f64>,
    /// `x^alpha y^(2 - alpha)`.
    pub bound: Option<f64>,
}

/// `S(x, y)` with its main term and residual.
pub fn double_sum(monoid: &Monoid, x: f64, y: f64) -> AsymptoticsReport {
    let s = double_sum_regrouped(monoid, x, y);
    let pairs = monoid.count_up_to(x).saturating_mul(monoid.count_up_to(y));
    let s_direct = (pairs <= DIRECT_PAIR_LIMIT).then(|| double_sum_direct(monoid, x, y));
    let density = monoid.density();
    let main_term = density.c.map(|c| c * x);
    AsymptoticsReport {
        x,
        y,
        s,
        s_direct,
        c_hat: s as f64 / x,
        main_term,
        residual: main_term.map(|m| s as f64 - m),
        bound: density.alpha.map(|a| x.powf(a) * y.powf(2.0 - a)),
    }
}

/// Least-squares fit `log|T| ~ a log x + b log y + const` over reports with
/// a non-zero residual. Diagnostic only.
pub fn fit_residual_exponents(reports: &[AsymptoticsReport]) -> Option<(f64, f64)> {
    let rows: Vec<[f64; 4]> = reports
        .iter()
        .filter_map(|r| {
            let t = r.residual?.abs();
            (t > 0.0).then(|| [r.x.ln(), r.y.ln(), 1.0, t.ln()])
        })
        .collect();
    if rows.len() < 3 {
        return None;
    }
    // normal equations for three unknowns
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for r in &rows {
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += r[i] * r[j];
            }
            atb[i] += r[i] * r[3];
        }
    }
    let sol = solve3(ata, atb)?;
    Some((sol[0], sol[1]))
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in 0..3 {
            if row != col {
                let factor = a[row][col] / a[col][col];
                for k in col..3 {
                    a[row][k] -= factor * a[col][k];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    Some([b[0] / a[0][0], b[1] / a[1][1], b[2] / a[2][2]])
}

/// `sum_{D, A : N(D + A) <= y} mu(A)`, enumerated over squarefree `A` with
/// the `D` counted by `[y / N(A)]`. Equal to 1 for every `y >= 1`.
pub fn inner_identity(monoid: &Monoid, y: f64) -> i64 {
    let view = monoid.extend(y);
    let table = view.norm_table(y);
    let mut total = 0i64;
    view.for_each_up_to(y, 1, |pairs, n| {
        let sign = if pairs.len() % 2 == 0 { 1 } else { -1 };
        total += sign * table.count_up_to(y / n as f64) as i64;
    });
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityFit {
    pub c_hat: f64,
    /// Slope of `log|[x] - c_hat x|` against `log x`, if at least two
    /// samples have a non-zero remainder.
    pub alpha_hat: Option<f64>,
}

/// Estimates `c` and `alpha` in `[x] = c x + O(x^alpha)` from `(x, [x])`
/// samples with increasing `x`.
///
/// `c_hat` is the `x`-weighted mean of `[x]/x` over the larger half of the
/// samples.
pub fn density_fit(samples: &[(f64, u64)]) -> Result<DensityFit> {
    if samples.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "density fit needs at least 3 samples, got {}",
            samples.len()
        )));
    }
    if samples.windows(2).any(|w| !(w[0].0 < w[1].0)) || samples[0].0 < 1.0 {
        return Err(Error::InvalidArgument(
            "sample bounds must be increasing and at least 1".into(),
        ));
    }
    let top = &samples[samples.len() / 2..];
    let weight: f64 = top.iter().map(|&(x, _)| x).sum();
    let c_hat = top.iter().map(|&(_, n)| n as f64).sum::<f64>() / weight;

    let points: Vec<(f64, f64)> = samples
        .iter()
        .filter_map(|&(x, n)| {
            let r = (n as f64 - c_hat * x).abs();
            (r > 0.0).then(|| (x.ln(), r.ln()))
        })
        .collect();
    let alpha_hat = (points.len() >= 2).then(|| {
        let k = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
        let my = points.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    Ok(DensityFit { c_hat, alpha_hat })
}

/// `(x, [x])` at `x = 10, 100, ...` up to `max_x`, plus `max_x` itself.
pub fn count_samples(monoid: &Monoid, max_x: f64) -> Vec<(f64, u64)> {
    let table = monoid.norm_table(max_x);
    decades(max_x)
        .into_iter()
        .map(|x| (x, table.count_up_to(x)))
        .collect()
}

/// `10, 100, ...` below `max_x`, followed by `max_x`.
pub fn decades(max_x: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut x = 10.0;
    while x < max_x {
        out.push(x);
        x *= 10.0;
    }
    if max_x >= 1.0 {
        out.push(max_x);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{quadratic_field, rational_integers};
    use num_traits::One;
    use std::f64::consts::PI;

    fn z_elem(monoid: &Monoid, n: u64) -> Element {
        let view = monoid.extend(n as f64);
        Element::from_pairs(crate::sieve::factorize(n).into_iter().map(|(p, k)| {
            (
                view.atoms().iter().position(|a| a.norm == p).unwrap() as u32,
                k,
            )
        }))
    }

    #[test]
    fn harmonic_examples() {
        let z = rational_integers();
        assert_eq!(harmonic_partial_exact(&z, 1.0), BigRational::one());
        assert_eq!(
            harmonic_partial_exact(&z, 3.0),
            BigRational::new(BigInt::from(11), BigInt::from(6))
        );
        assert!((harmonic_partial(&z, 3.0) - 11.0 / 6.0).abs() < 1e-15);
        let gi = quadratic_field(-1).unwrap();
        assert_eq!(
            harmonic_partial_exact(&gi, 2.0),
            BigRational::new(BigInt::from(3), BigInt::from(2))
        );
        assert_eq!(harmonic_partial(&gi, 0.5), 0.0);
    }

    #[test]
    fn residue_modes_agree_with_exact_partial_sum() {
        // both modes are the same finite sum; compare against exact rationals
        for monoid in [rational_integers(), quadratic_field(-1).unwrap()] {
            let view = monoid.extend(2000.0);
            for k in view.enumerate_up_to(60.0).into_iter().skip(1) {
                let mut exact = BigRational::zero();
                for m in view.enumerate_up_to(2000.0) {
                    let c = crate::ramanujan::ramanujan_sum(&view, &k, &m);
                    exact += BigRational::new(c, BigInt::from(view.norm(&m)));
                }
                let exact = num_traits::ToPrimitive::to_f64(&exact).unwrap();
                let grouped = residue_series(&monoid, &k, 2000.0, ResidueMode::Grouped).unwrap();
                let direct = residue_series(&monoid, &k, 2000.0, ResidueMode::Direct).unwrap();
                assert!(
                    (grouped - exact).abs() < 1e-10,
                    "{k:?}: {grouped} vs {exact}"
                );
                assert!((direct - exact).abs() < 1e-10, "{k:?}: {direct} vs {exact}");
            }
        }
    }

    #[test]
    fn residue_examples() {
        let z = rational_integers();
        let v = residue_series(&z, &z_elem(&z, 6), 1e4, ResidueMode::Grouped).unwrap();
        assert!(v.abs() < 1e-2, "{v}");
        let v = residue_series(&z, &z_elem(&z, 2), 1e6, ResidueMode::Grouped).unwrap();
        assert!((v + 2f64.ln()).abs() < 1e-3, "{v}");
        assert!(residue_series(&z, &Element::zero(), 10.0, ResidueMode::Grouped).is_err());

        let gi = quadratic_field(-1).unwrap();
        let r = gi.find_label("p2r").unwrap().id;
        let v = residue_series(&gi, &Element::atom(r), 1e6, ResidueMode::Grouped).unwrap();
        assert!((v + PI / 4.0 * 2f64.ln()).abs() < 5e-3, "{v}");
    }

    #[test]
    fn zeta_examples() {
        let z = rational_integers();
        assert_eq!(zeta_partial(&z, 2.0, 1.0).value, 1.0);
        let t = zeta_partial(&z, 2.0, 1e6);
        assert!((t.value - PI * PI / 6.0).abs() < 1e-5);
        assert!((t.value + t.tail.unwrap() - PI * PI / 6.0).abs() < 1e-9);

        // (sigma - 1) Z(sigma) -> c as sigma -> 1+, linear extrapolation
        let sigmas = [1.5, 1.2, 1.1, 1.05, 1.02, 1.01];
        let pts: Vec<(f64, f64)> = sigmas
            .iter()
            .map(|&s| {
                let t = zeta_partial(&z, s, 1e6);
                (s - 1.0, (s - 1.0) * (t.value + t.tail.unwrap()))
            })
            .collect();
        let (a, b) = (pts[4], pts[5]);
        let at_one = b.1 - b.0 * (a.1 - b.1) / (a.0 - b.0);
        assert!((at_one - 1.0).abs() < 0.05, "{at_one}");

        let c = zeta_partial_complex(&z, Complex64::new(2.0, 0.0), 1e4);
        assert!((c.value.re - zeta_partial(&z, 2.0, 1e4).value).abs() < 1e-12);
        assert!(c.value.im.abs() < 1e-12);
    }

    #[test]
    fn fixed_k_examples() {
        let z = rational_integers();
        assert_eq!(fixed_k_partial(&z, &Element::zero(), 1000.0), 1000);
        assert_eq!(fixed_k_partial(&z, &z_elem(&z, 2), 10.0), 0);
        assert_eq!(fixed_k_partial(&z, &z_elem(&z, 6), 6.0), 0);
        for monoid in [rational_integers(), quadratic_field(-5).unwrap()] {
            for k in monoid.enumerate_up_to(40.0) {
                for x in [1.0, 7.5, 100.0, 999.0] {
                    assert_eq!(
                        fixed_k_partial(&monoid, &k, x),
                        fixed_k_partial_regrouped(&monoid, &k, x)
                    );
                }
            }
        }
    }

    #[test]
    fn double_sum_examples() {
        let z = rational_integers();
        assert_eq!(double_sum_direct(&z, 3.0, 2.0), 2);
        assert_eq!(double_sum_regrouped(&z, 3.0, 2.0), 2);
        assert_eq!(double_sum_regrouped(&z, 50.0, 1.5), 50);
        let gi = quadratic_field(-1).unwrap();
        assert_eq!(double_sum_direct(&gi, 2.0, 2.0), 2);
        assert_eq!(double_sum_regrouped(&gi, 2.0, 2.0), 2);

        let report = double_sum(&z, 1000.0, 20.0);
        assert_eq!(report.s_direct, Some(report.s));
        assert_eq!(report.bound, Some(400.0));
        assert!(report.residual.unwrap().abs() <= 400.0);
        assert_eq!(double_sum(&z, 1e6, 10.0).s_direct, None);
    }

    #[test]
    fn double_sum_routes_agree() {
        for monoid in [
            rational_integers(),
            quadratic_field(-1).unwrap(),
            quadratic_field(3).unwrap(),
        ] {
            for (x, y) in [
                (1.0, 1.0),
                (10.0, 10.0),
                (123.4, 17.9),
                (500.0, 60.0),
                (0.5, 4.0),
            ] {
                assert_eq!(
                    double_sum_direct(&monoid, x, y),
                    double_sum_regrouped(&monoid, x, y),
                    "{} {x} {y}",
                    monoid.name()
                );
            }
        }
    }

    #[test]
    fn inner_identity_holds() {
        for monoid in [rational_integers(), quadratic_field(-23).unwrap()] {
            for y in 1..=200 {
                assert_eq!(inner_identity(&monoid, y as f64), 1);
            }
        }
    }

    #[test]
    fn density_fits() {
        let z = rational_integers();
        let fit = density_fit(&count_samples(&z, 1e6)).unwrap();
        assert!((fit.c_hat - 1.0).abs() < 1e-6);
        assert_eq!(fit.alpha_hat, None);

        let gi = quadratic_field(-1).unwrap();
        let fit = density_fit(&count_samples(&gi, 1e6)).unwrap();
        assert!((fit.c_hat - PI / 4.0).abs() < 0.01);

        let q23 = quadratic_field(-23).unwrap();
        let fit = density_fit(&count_samples(&q23, 1e6)).unwrap();
        let c = 3.0 * PI / 23f64.sqrt();
        assert!((fit.c_hat - c).abs() < 0.02 * c);

        assert!(density_fit(&[(10.0, 10), (100.0, 100)]).is_err());
        assert!(density_fit(&[(10.0, 10), (5.0, 5), (100.0, 100)]).is_err());
    }

    #[test]
    fn decade_grid() {
        assert_eq!(decades(1000.0), vec![10.0, 100.0, 1000.0]);
        assert_eq!(decades(2500.0), vec![10.0, 100.0, 1000.0, 2500.0]);
        assert_eq!(decades(5.0), vec![5.0]);
    }
}

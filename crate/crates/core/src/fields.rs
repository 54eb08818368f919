//! Concrete instances: the rational integers and quadratic number fields.
//!
//! Prime ideals of a quadratic field `Q(sqrt d)` are described prime by prime
//! through the Kronecker symbol `(D_K / p)`: a split prime contributes two
//! atoms of norm `p`, an inert prime one atom of norm `p^2`, and a ramified
//! prime one atom of norm `p`.
//!
//! The residue `c_F` of the Dedekind zeta function at `s = 1` is
//! `2^r1 (2 pi)^r2 R h / (W sqrt|D|)`. For imaginary fields `h` is computed
//! exactly by counting reduced binary quadratic forms; for real fields the
//! regulator is exact (continued fractions) and `h` is recovered from the
//! ideal count.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::monoid::{AtomSeed, AtomSource, DensityMeta, Monoid};
use crate::sieve::{factorize, is_prime};

/// Number fields with a built-in atom source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NumberField {
    Rationals,
    Quadratic(QuadraticField),
}

/// `Q(sqrt d)` for squarefree `d`, `d != 0, 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct QuadraticField {
    pub d: i64,
    pub discriminant: i64,
}

impl QuadraticField {
    pub fn new(d: i64) -> Result<Self> {
        if d == 0 || d == 1 {
            return Err(Error::InvalidField(d, "d must differ from 0 and 1"));
        }
        if !is_squarefree(d) {
            return Err(Error::InvalidField(d, "d must be squarefree"));
        }
        let discriminant = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        Ok(Self { d, discriminant })
    }

    /// The field with the given fundamental discriminant.
    pub fn from_discriminant(disc: i64) -> Result<Self> {
        let d = if disc.rem_euclid(4) == 1 {
            disc
        } else if disc % 4 == 0 && matches!((disc / 4).rem_euclid(4), 2 | 3) {
            disc / 4
        } else {
            return Err(Error::InvalidArgument(format!(
                "{disc} is not a fundamental discriminant"
            )));
        };
        Self::new(d).map_err(|_| {
            Error::InvalidArgument(format!("{disc} is not a fundamental discriminant"))
        })
    }

    pub fn degree(&self) -> u32 {
        2
    }

    /// `(r1, r2)`.
    pub fn signature(&self) -> (u32, u32) {
        if self.d > 0 {
            (2, 0)
        } else {
            (0, 1)
        }
    }

    pub fn is_imaginary(&self) -> bool {
        self.d < 0
    }

    /// Number of roots of unity in the field.
    pub fn roots_of_unity(&self) -> u32 {
        match self.discriminant {
            -3 => 6,
            -4 => 4,
            _ => 2,
        }
    }
}

fn is_squarefree(d: i64) -> bool {
    factorize(d.unsigned_abs()).iter().all(|&(_, e)| e == 1)
}

struct IntegerAtoms;

impl AtomSource for IntegerAtoms {
    fn name(&self) -> String {
        "z".into()
    }

    fn density(&self) -> DensityMeta {
        DensityMeta::new(Some(1.0), Some(0.0))
    }

    fn atoms_above(&self, p: u64) -> Vec<AtomSeed> {
        vec![AtomSeed {
            norm: p,
            label: format!("p{p}"),
        }]
    }
}

struct QuadraticAtoms {
    field: QuadraticField,
    density: DensityMeta,
}

impl AtomSource for QuadraticAtoms {
    fn name(&self) -> String {
        format!("q:{}", self.field.d)
    }

    fn density(&self) -> DensityMeta {
        self.density
    }

    fn atoms_above(&self, p: u64) -> Vec<AtomSeed> {
        split_prime(self.field.discriminant, p)
            .expect("sieved value is prime")
            .atoms
    }
}

/// The positive integers, with the rational primes as atoms.
pub fn rational_integers() -> Monoid {
    Monoid::with_field(Box::new(IntegerAtoms), Some(NumberField::Rationals))
}

/// Non-zero ideals of the ring of integers of `Q(sqrt d)`.
pub fn quadratic_field(d: i64) -> Result<Monoid> {
    let field = QuadraticField::new(d)?;
    let c = if field.is_imaginary() {
        let inv = imaginary_invariants(&field)?;
        Some(cf_from_formula(&inv))
    } else {
        None
    };
    let density = DensityMeta::new(c, Some(1.0 - 1.0 / field.degree() as f64));
    Ok(Monoid::with_field(
        Box::new(QuadraticAtoms { field, density }),
        Some(NumberField::Quadratic(field)),
    ))
}

/// Kronecker symbol `(a / n)`.
pub fn kronecker(a: i64, n: i64) -> i32 {
    // (2 / b) for odd b, indexed by b mod 8
    const TAB2: [i32; 8] = [0, 1, 0, -1, 0, -1, 0, 1];
    let (mut a, mut b) = (a as i128, n as i128);
    if b == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    if a % 2 == 0 && b % 2 == 0 {
        return 0;
    }
    let v = b.trailing_zeros();
    b >>= v;
    let mut k = if v % 2 == 0 {
        1
    } else {
        TAB2[(a & 7) as usize]
    };
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    loop {
        // b is odd and positive
        if a == 0 {
            return if b == 1 { k } else { 0 };
        }
        let v = a.trailing_zeros();
        a >>= v;
        if v % 2 == 1 {
            k *= TAB2[(b & 7) as usize];
        }
        if a & b & 2 != 0 {
            k = -k;
        }
        let r = a.abs();
        a = b % r;
        b = r;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

/// How a rational prime decomposes in the quadratic field of discriminant
/// `disc`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplittingRecord {
    pub prime: u64,
    pub kind: Splitting,
    pub atoms: Vec<AtomSeed>,
}

impl SplittingRecord {
    /// `sum e * f` over the primes above `p`; always the field degree.
    pub fn degree_sum(&self) -> u32 {
        let e = if self.kind == Splitting::Ramified {
            2
        } else {
            1
        };
        self.atoms
            .iter()
            .map(|a| {
                let f = if a.norm == self.prime { 1 } else { 2 };
                e * f
            })
            .sum()
    }
}

pub fn split_prime(disc: i64, p: u64) -> Result<SplittingRecord> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let (kind, atoms) = match kronecker(disc, p as i64) {
        1 => (
            Splitting::Split,
            vec![
                AtomSeed {
                    norm: p,
                    label: format!("p{p}a"),
                },
                AtomSeed {
                    norm: p,
                    label: format!("p{p}b"),
                },
            ],
        ),
        -1 => (
            Splitting::Inert,
            vec![AtomSeed {
                norm: p * p,
                label: format!("p{p}"),
            }],
        ),
        _ => (
            Splitting::Ramified,
            vec![AtomSeed {
                norm: p,
                label: format!("p{p}r"),
            }],
        ),
    };
    Ok(SplittingRecord {
        prime: p,
        kind,
        atoms,
    })
}

/// Class number of a negative fundamental discriminant, by counting reduced
/// forms `(a, b, c)` with `b^2 - 4ac = disc`, `|b| <= a <= c`, and `b >= 0`
/// whenever `|b| = a` or `a = c`.
pub fn class_number_imaginary(disc: i64) -> Result<u64> {
    if disc >= 0 {
        return Err(Error::InvalidArgument(format!(
            "discriminant {disc} is not negative"
        )));
    }
    QuadraticField::from_discriminant(disc)?;
    Ok(reduced_forms(disc).len() as u64)
}

/// Reduced forms of a negative discriminant.
pub fn reduced_forms(disc: i64) -> Vec<(i64, i64, i64)> {
    let mut forms = Vec::new();
    let abs = -disc;
    let mut a = 1i64;
    while 3 * a * a <= abs {
        for b in -a + 1..=a {
            if (b - disc).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (a == c && b < 0) {
                continue;
            }
            forms.push((a, b, c));
        }
        a += 1;
    }
    forms
}

/// The fundamental unit `(u + v sqrt d) / k` of a real quadratic field, with
/// `k = 2` when `d = 1 mod 4` and `k = 1` otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FundamentalUnit {
    pub d: i64,
    pub u: BigInt,
    pub v: BigInt,
    pub denominator: u32,
}

impl FundamentalUnit {
    /// `u^2 - d v^2`, one of `+-1` (or `+-4` when the denominator is 2).
    pub fn norm_equation(&self) -> BigInt {
        &self.u * &self.u - BigInt::from(self.d) * &self.v * &self.v
    }

    /// `log epsilon`.
    pub fn log(&self) -> f64 {
        // u ~ v sqrt d, so log(u + v sqrt d) = log u + log(1 + v sqrt d / u)
        let log_u = ln_big(&self.u);
        let log_ratio = ln_big(&self.v) + 0.5 * (self.d as f64).ln() - log_u;
        log_u + log_ratio.exp().ln_1p() - (self.denominator as f64).ln()
    }
}

fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        x.to_f64().expect("finite").ln()
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// Walks the continued fraction of `sqrt d` (or `(1 + sqrt d)/2` when
/// `d = 1 mod 4`) and returns the first convergent that yields a unit.
pub fn fundamental_unit(d: i64) -> Result<FundamentalUnit> {
    let field = QuadraticField::new(d)?;
    if field.is_imaginary() {
        return Err(Error::InvalidArgument(format!("Q(sqrt {d}) is imaginary")));
    }
    let half = d.rem_euclid(4) == 1;
    let root = d.isqrt();
    let (mut p, mut q) = if half { (1i64, 2i64) } else { (0, 1) };
    let (mut h, mut h_prev) = (BigInt::from(1), BigInt::from(0));
    let (mut k, mut k_prev) = (BigInt::from(0), BigInt::from(1));
    let target = BigInt::from(if half { 4 } else { 1 });
    loop {
        let a = (p + root) / q;
        let h_next = BigInt::from(a) * &h + &h_prev;
        let k_next = BigInt::from(a) * &k + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        // h - k (1 - sqrt d)/2 = ((2h - k) + k sqrt d)/2 in the half case
        let u = if half {
            BigInt::from(2) * &h - &k
        } else {
            h.clone()
        };
        let unit = FundamentalUnit {
            d,
            u,
            v: k.clone(),
            denominator: if half { 2 } else { 1 },
        };
        if unit.norm_equation().abs() == target {
            return Ok(unit);
        }
        p = a * q - p;
        q = (d - p * p) / q;
    }
}

/// Regulator of the real quadratic field with fundamental discriminant
/// `disc > 0`.
pub fn regulator_real(disc: i64) -> Result<f64> {
    if disc <= 0 {
        return Err(Error::InvalidArgument(format!(
            "discriminant {disc} is not positive"
        )));
    }
    let field = QuadraticField::from_discriminant(disc)?;
    Ok(fundamental_unit(field.d)?.log())
}

/// The quantities entering the class number formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldInvariants {
    pub r1: u32,
    pub r2: u32,
    pub regulator: f64,
    pub h: u64,
    pub w: u32,
    pub abs_disc: u64,
}

/// `c_F = 2^r1 (2 pi)^r2 R h / (W sqrt|D|)`.
pub fn cf_from_formula(inv: &FieldInvariants) -> f64 {
    2f64.powi(inv.r1 as i32) * (2.0 * PI).powi(inv.r2 as i32) * inv.regulator * inv.h as f64
        / (inv.w as f64 * (inv.abs_disc as f64).sqrt())
}

fn imaginary_invariants(field: &QuadraticField) -> Result<FieldInvariants> {
    Ok(FieldInvariants {
        r1: 0,
        r2: 1,
        regulator: 1.0,
        h: class_number_imaginary(field.discriminant)?,
        w: field.roots_of_unity(),
        abs_disc: field.discriminant.unsigned_abs(),
    })
}

/// Invariants with `h` left at 1, i.e. everything but the class number.
fn invariants_without_h(field: &NumberField) -> Result<FieldInvariants> {
    Ok(match field {
        NumberField::Rationals => FieldInvariants {
            r1: 1,
            r2: 0,
            regulator: 1.0,
            h: 1,
            w: 2,
            abs_disc: 1,
        },
        NumberField::Quadratic(q) => {
            let (r1, r2) = q.signature();
            let regulator = if q.is_imaginary() {
                1.0
            } else {
                regulator_real(q.discriminant)?
            };
            FieldInvariants {
                r1,
                r2,
                regulator,
                h: 1,
                w: q.roots_of_unity(),
                abs_disc: q.discriminant.unsigned_abs(),
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassNumberEstimate {
    pub estimate: f64,
    pub rounded: u64,
}

/// Largest distance from an integer accepted by [`h_from_counting`].
pub const CLASS_NUMBER_TOLERANCE: f64 = 0.4;

/// Recovers `h` from the ideal count `[x] ~ c_F x` through the class number
/// formula.
pub fn h_from_counting(monoid: &Monoid, x: f64) -> Result<ClassNumberEstimate> {
    let field = monoid.field().ok_or_else(|| {
        Error::InvalidArgument(format!("instance {} is not a number field", monoid.name()))
    })?;
    if !(x >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "counting bound {x} is below 1"
        )));
    }
    let base = invariants_without_h(field)?;
    let density = monoid.count_up_to(x) as f64 / x;
    let estimate = density / cf_from_formula(&base);
    let rounded = estimate.round();
    if rounded < 1.0 || (estimate - rounded).abs() > CLASS_NUMBER_TOLERANCE {
        return Err(Error::Inconclusive {
            estimate,
            tolerance: CLASS_NUMBER_TOLERANCE,
        });
    }
    Ok(ClassNumberEstimate {
        estimate,
        rounded: rounded as u64,
    })
}

/// Full invariants of a built-in field. Real quadratic class numbers come
/// from [`h_from_counting`] at bound `x`.
pub fn field_invariants(monoid: &Monoid, x: f64) -> Result<FieldInvariants> {
    let field = monoid.field().ok_or_else(|| {
        Error::InvalidArgument(format!("instance {} is not a number field", monoid.name()))
    })?;
    match field {
        NumberField::Rationals => invariants_without_h(field),
        NumberField::Quadratic(q) if q.is_imaginary() => imaginary_invariants(q),
        NumberField::Quadratic(_) => {
            let h = h_from_counting(monoid, x)?.rounded;
            Ok(FieldInvariants {
                h,
                ..invariants_without_h(field)?
            })
        }
    }
}

/// Parses an instance selector: `z` or `q:<d>`.
pub fn instance(selector: &str) -> Result<Monoid> {
    match selector {
        "z" | "Z" => Ok(rational_integers()),
        s => {
            let d = s
                .strip_prefix("q:")
                .and_then(|d| d.parse::<i64>().ok())
                .ok_or_else(|| {
                    Error::InvalidArgument(format!("unknown instance `{s}` (expected z or q:<d>)"))
                })?;
            quadratic_field(d)
        }
    }
}

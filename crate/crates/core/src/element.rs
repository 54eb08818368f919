//! Elements of the free abelian monoid `I_X`.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finitely supported exponent map `atom id -> exponent`.
///
/// Stored as `(atom_id, exponent)` pairs sorted by atom id, with every stored
/// exponent positive. The empty map is the identity of the monoid (the unit
/// ideal in a number field).
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Element {
    exps: Vec<(u32, u32)>,
}

impl Element {
    pub fn zero() -> Self {
        Self { exps: Vec::new() }
    }

    /// The element `A_p` supported on a single atom with exponent 1.
    pub fn atom(id: u32) -> Self {
        Self {
            exps: vec![(id, 1)],
        }
    }

    pub fn atom_power(id: u32, exp: u32) -> Self {
        Self::from_pairs([(id, exp)])
    }

    /// Builds an element from arbitrary `(atom, exponent)` pairs. Repeated atoms
    /// are summed and zero exponents dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut exps: Vec<(u32, u32)> = pairs.into_iter().filter(|&(_, e)| e > 0).collect();
        exps.sort_unstable_by_key(|&(a, _)| a);
        exps.dedup_by(|later, kept| {
            if later.0 == kept.0 {
                kept.1 += later.1;
                true
            } else {
                false
            }
        });
        Self { exps }
    }

    /// Wraps pairs already sorted by strictly increasing atom id with positive
    /// exponents.
    pub(crate) fn from_sorted(exps: Vec<(u32, u32)>) -> Self {
        debug_assert!(exps.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(exps.iter().all(|&(_, e)| e > 0));
        Self { exps }
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.exps
    }

    pub fn is_zero(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponent(&self, atom: u32) -> u32 {
        match self.exps.binary_search_by_key(&atom, |&(a, _)| a) {
            Ok(i) => self.exps[i].1,
            Err(_) => 0,
        }
    }

    /// Atom ids with non-zero exponent, increasing.
    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.exps.iter().map(|&(a, _)| a)
    }

    /// Number of distinct atoms (`omega`).
    pub fn atom_count(&self) -> usize {
        self.exps.len()
    }

    /// Sum of the exponents (`Omega`).
    pub fn degree(&self) -> u64 {
        self.exps.iter().map(|&(_, e)| e as u64).sum()
    }

    pub fn max_atom(&self) -> Option<u32> {
        self.exps.last().map(|&(a, _)| a)
    }

    pub fn is_squarefree(&self) -> bool {
        self.exps.iter().all(|&(_, e)| e == 1)
    }

    /// Number of divisors, `prod (e_i + 1)`.
    pub fn divisor_count(&self) -> u64 {
        self.exps.iter().map(|&(_, e)| e as u64 + 1).product()
    }

    /// Pointwise order: `self <= other` iff every exponent of `self` is at most
    /// the matching exponent of `other`.
    pub fn leq(&self, other: &Self) -> bool {
        let mut theirs = other.exps.iter().peekable();
        'outer: for &(a, e) in &self.exps {
            while let Some(&&(b, f)) = theirs.peek() {
                match b.cmp(&a) {
                    Ordering::Less => {
                        theirs.next();
                    }
                    Ordering::Equal => {
                        if e > f {
                            return false;
                        }
                        continue 'outer;
                    }
                    Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }

    pub fn add(&self, other: &Self) -> Self {
        merge(&self.exps, &other.exps, |a, b| a + b)
    }

    /// `self - other`; requires `other <= self`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if !other.leq(self) {
            return Err(Error::Precondition(format!(
                "cannot subtract {other:?} from {self:?}: not below it"
            )));
        }
        Ok(merge(&self.exps, &other.exps, |a, b| a - b))
    }

    /// Pointwise minimum, the greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        merge(&self.exps, &other.exps, u32::min)
    }

    /// Pointwise maximum.
    pub fn lcm(&self, other: &Self) -> Self {
        merge(&self.exps, &other.exps, u32::max)
    }

    /// `gcd(self, other) == 0`.
    pub fn is_coprime(&self, other: &Self) -> bool {
        self.gcd(other).is_zero()
    }

    /// Lexicographic comparison of the dense exponent vectors
    /// `(e_0, e_1, e_2, ...)`.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.exps.get(i), other.exps.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(a, e)), Some(&(b, f))) => match a.cmp(&b) {
                    // self has a non-zero entry where other has zero
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match e.cmp(&f) {
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        ord => return ord,
                    },
                },
            }
        }
    }
}

fn merge(a: &[(u32, u32)], b: &[(u32, u32)], op: impl Fn(u32, u32) -> u32) -> Element {
    let mut out = Vec::with_capacity(a.len().max(b.len()));
    let (mut i, mut j) = (0, 0);
    loop {
        let (atom, x, y) = match (a.get(i), b.get(j)) {
            (None, None) => break,
            (Some(&(p, e)), None) => {
                i += 1;
                (p, e, 0)
            }
            (None, Some(&(q, f))) => {
                j += 1;
                (q, 0, f)
            }
            (Some(&(p, e)), Some(&(q, f))) => match p.cmp(&q) {
                Ordering::Less => {
                    i += 1;
                    (p, e, 0)
                }
                Ordering::Greater => {
                    j += 1;
                    (q, 0, f)
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (p, e, f)
                }
            },
        };
        let v = op(x, y);
        if v > 0 {
            out.push((atom, v));
        }
    }
    Element { exps: out }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.exps.iter().map(|(a, e)| format!("a{a}^{e}")).collect();
        f.write_str(&parts.join("+"))
    }
}

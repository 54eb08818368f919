//! Textual element notation: `1`, a positive integer, or a product of atom
//! labels with optional exponents such as `p2^3*p5a`.

use crate::element::Element;
use crate::error::{Error, Result};
use crate::fields::NumberField;
use crate::monoid::{AtomView, Monoid};
use crate::sieve::factorize;

/// Parses an element of `monoid`.
///
/// A positive integer `n` denotes the element generated by `n`: in the
/// rational integers that is `n` itself, in a quadratic field the principal
/// ideal `(n)`, whose factorization follows from the splitting of each prime.
pub fn parse_element(monoid: &Monoid, text: &str) -> Result<Element> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::InvalidArgument("empty element".into()));
    }
    if text.chars().all(|c| c.is_ascii_digit()) {
        let n: u64 = text
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("integer `{text}` out of range")))?;
        return integer_element(monoid, n);
    }
    let mut pairs = Vec::new();
    for factor in text.split('*') {
        let factor = factor.trim();
        let (label, exp) = match factor.split_once('^') {
            Some((l, e)) => {
                let e: u32 = e
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad exponent in `{factor}`")))?;
                (l.trim(), e)
            }
            None => (factor, 1),
        };
        if label == "1" {
            continue;
        }
        if !label.starts_with('p') {
            return Err(Error::UnknownLabel(label.to_string()));
        }
        pairs.push((monoid.find_label(label)?.id, exp));
    }
    Ok(Element::from_pairs(pairs))
}

fn integer_element(monoid: &Monoid, n: u64) -> Result<Element> {
    if n == 0 {
        return Err(Error::InvalidArgument("0 is not an element".into()));
    }
    let mut pairs = Vec::new();
    for (p, k) in factorize(n) {
        let above = monoid.atoms_above(p);
        if above.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "no atoms above {p} in {}",
                monoid.name()
            )));
        }
        for atom in above {
            // (p) = prod P^e with e = 2 for a ramified prime of norm p
            let e = if matches!(monoid.field(), Some(NumberField::Quadratic(_)))
                && atom.label.ends_with('r')
            {
                2
            } else {
                1
            };
            pairs.push((atom.id, e * k));
        }
    }
    Ok(Element::from_pairs(pairs))
}

/// Canonical text form: factors in atom order, `^1` omitted, `1` for zero.
pub fn format_element(view: &AtomView, e: &Element) -> String {
    if e.is_zero() {
        return "1".into();
    }
    e.pairs()
        .iter()
        .map(|&(a, k)| {
            let label = &view.atom(a).label;
            if k == 1 {
                label.clone()
            } else {
                format!("{label}^{k}")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

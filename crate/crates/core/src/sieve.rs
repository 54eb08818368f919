//! Incremental (segmented) sieve of Eratosthenes.

/// Sieve that grows on demand. Each call to [`PrimeSieve::extend_to`] sieves
/// only the new segment, using the base primes already found.
#[derive(Debug, Clone, Default)]
pub struct PrimeSieve {
    primes: Vec<u64>,
    limit: u64,
}

const SEGMENT: u64 = 1 << 18;

impl PrimeSieve {
    pub fn new() -> Self {
        Self::default()
    }

    /// All primes `<= limit()`, increasing.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Extends the sieve to cover `n` and returns the primes that were newly
    /// found, i.e. those in `(old_limit, n]`.
    pub fn extend_to(&mut self, n: u64) -> &[u64] {
        let first_new = self.primes.len();
        if n <= self.limit {
            return &self.primes[first_new..];
        }
        let root = n.isqrt();
        if root > self.limit && root < n {
            // base primes for the segment
            self.extend_to(root);
        }
        let base_end = self.primes.len();
        let mut lo = self.limit + 1;
        let mut marks = Vec::new();
        while lo <= n {
            let hi = (lo + SEGMENT - 1).min(n);
            marks.clear();
            marks.resize((hi - lo + 1) as usize, true);
            for &p in &self.primes[..base_end] {
                if p * p > hi {
                    break;
                }
                let start = (p * p).max(lo.div_ceil(p) * p);
                let mut m = start;
                while m <= hi {
                    marks[(m - lo) as usize] = false;
                    m += p;
                }
            }
            for (i, &is_prime) in marks.iter().enumerate() {
                let v = lo + i as u64;
                if is_prime && v >= 2 {
                    self.primes.push(v);
                }
            }
            lo = hi + 1;
        }
        self.limit = n;
        &self.primes[first_new..]
    }
}

/// Trial-division factorization into `(prime, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_primes(n: u64) -> Vec<u64> {
        (2..=n)
            .filter(|&k| (2..k).take_while(|d| d * d <= k).all(|d| k % d != 0))
            .collect()
    }

    #[test]
    fn incremental_matches_naive() {
        let mut sieve = PrimeSieve::new();
        let mut seen = Vec::new();
        for bound in [1, 2, 3, 10, 11, 97, 100, 1000, 5000, 300_000] {
            seen.extend_from_slice(sieve.extend_to(bound));
        }
        assert_eq!(seen, sieve.primes());
        assert_eq!(&sieve.primes()[..168], naive_primes(1000).as_slice());
        assert_eq!(sieve.primes().len(), 25_997);
    }

    #[test]
    fn extend_below_limit_is_noop() {
        let mut sieve = PrimeSieve::new();
        sieve.extend_to(100);
        assert!(sieve.extend_to(50).is_empty());
        assert_eq!(sieve.limit(), 100);
    }

    #[test]
    fn factorization() {
        assert_eq!(factorize(1), vec![]);
        assert_eq!(factorize(12), vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(999_983), vec![(999_983, 1)]);
        assert!(is_prime(2) && is_prime(97) && !is_prime(1) && !is_prime(91));
    }
}

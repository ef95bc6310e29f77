//! Polynomial hashing of small integer sets: `h_X(S) = sum X^e mod P`.
//!
//! Powers come from a `c x γ` table with `γ^c >= σ`, so `X^e` is a product
//! of `c` table entries picked by the base-`γ` digits of `e`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::seqcore::{Fingerprint, Rank};

/// Moduli must stay below this so that `a * b` fits in `u128` comfortably
/// and sums of two residues never overflow `u64`.
pub const MAX_MODULUS: u64 = 1 << 62;

/// Candidate budget of [`find_prime`].
pub const DEFAULT_PRIME_BUDGET: usize = 100_000;

/// Resampling budget of [`find_injective`].
pub const DEFAULT_INJECTIVE_BUDGET: usize = 1_000;

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// A uniformly sampled prime in `[lo, hi]`.
pub fn find_prime<R: Rng + ?Sized>(lo: u64, hi: u64, rng: &mut R) -> Result<u64> {
    find_prime_with_budget(lo, hi, DEFAULT_PRIME_BUDGET, rng)
}

pub fn find_prime_with_budget<R: Rng + ?Sized>(
    lo: u64,
    hi: u64,
    budget: usize,
    rng: &mut R,
) -> Result<u64> {
    let lo = lo.max(2);
    if hi < lo {
        return Err(Error::RetryLimitExceeded(0));
    }
    for _ in 0..budget {
        let candidate = rng.gen_range(lo..=hi);
        if is_prime(candidate) {
            return Ok(candidate);
        }
    }
    Err(Error::RetryLimitExceeded(budget))
}

/// Modulus, evaluation point and power table of one hash function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HashParams {
    p: u64,
    x: u64,
    sigma: usize,
    c: usize,
    gamma: usize,
    /// `table[d][j] = X^(d * γ^j) mod P`.
    table: Vec<Vec<u64>>,
}

/// Smallest `γ >= 1` with `γ^c >= σ`.
pub fn digit_base(sigma: usize, c: usize) -> usize {
    let mut gamma = (sigma as f64).powf(1.0 / c as f64).floor().max(1.0) as usize;
    while (gamma as u128).pow(c as u32) < sigma as u128 {
        gamma += 1;
    }
    gamma
}

impl HashParams {
    pub fn new(p: u64, x: u64, sigma: usize, c: usize) -> Self {
        assert!((2..MAX_MODULUS).contains(&p), "modulus out of range");
        assert!(c >= 1);
        let gamma = digit_base(sigma, c);
        let x = x % p;
        let mut table = vec![vec![0u64; c]; gamma];
        // step[j] = X^(γ^j)
        let mut step = x;
        for j in 0..c {
            let mut acc = 1 % p;
            for row in table.iter_mut() {
                row[j] = acc;
                acc = mul_mod(acc, step, p);
            }
            step = pow_mod(step, gamma as u64, p);
        }
        HashParams {
            p,
            x,
            sigma,
            c,
            gamma,
            table,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn point(&self) -> u64 {
        self.x
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn depth(&self) -> usize {
        self.c
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn table(&self, d: usize, j: usize) -> u64 {
        self.table[d][j]
    }

    /// `X^e mod P` as a product of `c` table entries.
    pub fn power(&self, e: Rank) -> Result<u64> {
        if e as usize >= self.sigma {
            return Err(Error::RankOutOfRange {
                rank: e,
                sigma: self.sigma,
            });
        }
        Ok(self.power_unchecked(e))
    }

    #[inline]
    pub(crate) fn power_unchecked(&self, e: Rank) -> u64 {
        let mut rest = e as usize;
        let mut acc = 1 % self.p;
        for j in 0..self.c {
            acc = mul_mod(acc, self.table[rest % self.gamma][j], self.p);
            rest /= self.gamma;
        }
        acc
    }

    pub fn hash_set(&self, set: impl IntoIterator<Item = Rank>) -> Result<u64> {
        set.into_iter()
            .try_fold(0, |h, e| Ok(add_mod(h, self.power(e)?, self.p)))
    }

    pub fn hash_fingerprint(&self, f: &Fingerprint) -> Result<u64> {
        self.hash_set(f.iter())
    }
}

/// Hash parameters mapping every set of `collection` to a distinct value,
/// with `P` in `[m^2 σ, 2 m^2 σ]`. Also returns the number of points tried.
pub fn find_injective<R: Rng + ?Sized>(
    collection: &[Fingerprint],
    sigma: usize,
    rng: &mut R,
) -> Result<(HashParams, usize)> {
    let mut sorted: Vec<&Fingerprint> = collection.iter().collect();
    sorted.sort();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicateSets);
    }
    let m = collection.len() as u128;
    let lo = (m * m * sigma.max(1) as u128).max(2);
    let hi = 2 * lo;
    if hi >= MAX_MODULUS as u128 {
        return Err(Error::ModulusTooLarge(hi));
    }
    let p = find_prime(lo as u64, hi as u64, rng)?;
    let mut seen = std::collections::HashSet::with_capacity(collection.len());
    for attempt in 1..=DEFAULT_INJECTIVE_BUDGET {
        let params = HashParams::new(p, rng.gen_range(1..p), sigma, 1);
        seen.clear();
        let mut ok = true;
        for f in collection {
            if !seen.insert(params.hash_fingerprint(f)?) {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok((params, attempt));
        }
    }
    Err(Error::RetryLimitExceeded(DEFAULT_INJECTIVE_BUDGET))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn trial_division(n: u64) -> bool {
        n >= 2
            && (2..)
                .take_while(|d| d * d <= n)
                .all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn primality_matches_trial_division() {
        for n in 0..20_000 {
            assert_eq!(is_prime(n), trial_division(n), "{n}");
        }
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2, 3, 5, 7
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn prime_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let p = find_prime(16, 32, &mut rng).unwrap();
            assert!([17, 19, 23, 29, 31].contains(&p));
            let q = find_prime(2, 4, &mut rng).unwrap();
            assert!(q == 2 || q == 3);
        }
        assert_eq!(
            find_prime_with_budget(24, 28, 30, &mut rng),
            Err(Error::RetryLimitExceeded(30))
        );
    }

    #[test]
    fn direct_evaluation() {
        let params = HashParams::new(17, 2, 4, 1);
        assert_eq!(params.hash_set([0, 1, 3]).unwrap(), 11);
        assert_eq!(params.hash_set([]).unwrap(), 0);
        let ones = HashParams::new(17, 1, 40, 2);
        assert_eq!(ones.hash_set(0..20).unwrap(), 3);
        assert!(matches!(
            params.hash_set([4]),
            Err(Error::RankOutOfRange { rank: 4, sigma: 4 })
        ));
    }

    #[test]
    fn decomposition() {
        let params = HashParams::new(1_000_003, 12345, 16, 2);
        assert_eq!(params.gamma(), 4);
        let expect = mul_mod(params.table(1, 0), params.table(3, 1), 1_000_003);
        assert_eq!(params.power(13).unwrap(), expect);
        assert_eq!(params.power(0).unwrap(), 1);
        for c in 1..=4 {
            let params = HashParams::new(998_244_353, 3, 256, c);
            for e in 0..256 {
                assert_eq!(params.power(e).unwrap(), pow_mod(3, e as u64, 998_244_353));
                for d in 0..params.gamma() {
                    for j in 0..c {
                        let exp = d as u64 * (params.gamma() as u64).pow(j as u32);
                        assert_eq!(params.table(d, j), pow_mod(3, exp, 998_244_353));
                    }
                }
            }
        }
    }

    #[test]
    fn digit_bases() {
        assert_eq!(digit_base(16, 2), 4);
        assert_eq!(digit_base(17, 2), 5);
        assert_eq!(digit_base(1, 3), 1);
        assert_eq!(digit_base(1000, 3), 10);
        assert_eq!(digit_base(1001, 3), 11);
    }

    #[test]
    fn injective_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = Fingerprint::from_ranks([0, 1], 4);
        assert_eq!(
            find_injective(&[a.clone(), a.clone()], 4, &mut rng).unwrap_err(),
            Error::DuplicateSets
        );
        assert_eq!(find_injective(&[], 4, &mut rng).unwrap().1, 1);
        let (params, attempts) = find_injective(&[a], 4, &mut rng).unwrap();
        assert_eq!(attempts, 1);
        assert!(is_prime(params.modulus()));
    }
}

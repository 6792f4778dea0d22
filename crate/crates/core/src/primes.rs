//! Prime tables built by a segmented, odd-only sieve of Eratosthenes.
//!
//! A [`PrimeTable`] holds every prime up to its limit and answers index and
//! neighbour queries by binary search. Tables are immutable; a larger table
//! is produced with [`PrimeTable::extended`], which only sieves the new range.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_bigint::BigInt;
use rayon::prelude::*;
use thiserror::Error;

use crate::numeric::{Interval, PRIME_GAP_THRESHOLD};

/// Largest limit a table may have; primes are stored as `u32`.
pub const MAX_TABLE_LIMIT: u64 = u32::MAX as u64;

const CACHE_MAGIC: &[u8; 5] = b"RBSV1";

#[derive(Debug, Error)]
pub enum PrimeError {
    #[error("prime limit must be at least 2, got {0}")]
    LimitTooSmall(u64),
    #[error("prime limit {requested} exceeds the configured budget {budget}")]
    Budget { requested: u64, budget: u64 },
    #[error("prime index {index} is outside the table (it holds {len} primes)")]
    IndexOutOfRange { index: u64, len: u64 },
    #[error("{0} is not a prime in the table")]
    NotPrime(u64),
    #[error("no prime {direction} {x} within the table limit {limit}")]
    NoNeighbour {
        direction: &'static str,
        x: u64,
        limit: u64,
    },
    #[error("the prime gap bound is only asserted for x >= {threshold}, got {x}")]
    BelowThreshold { x: u64, threshold: u64 },
    #[error("table limit {have} is too small; need at least {need}")]
    TableTooSmall { need: u64, have: u64 },
    #[error("sieve cache: {0}")]
    Io(#[from] io::Error),
    #[error("sieve cache is malformed: {0}")]
    BadCache(&'static str),
}

/// Sieve tuning and resource limits.
#[derive(Debug, Clone, Copy)]
pub struct SieveConfig {
    /// Odd numbers per segment.
    pub segment_size: usize,
    /// Refuse to build tables above this limit.
    pub max_limit: u64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            segment_size: 1 << 20,
            max_limit: 2_000_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u32>,
}

/// Primes up to `n` by a plain sieve; used for the base primes of a segment.
fn small_primes(n: u64) -> Vec<u32> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u32);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Odd primes in `[lo, hi]` (inclusive) given all primes up to `isqrt(hi)`.
fn sieve_odd_segment(lo: u64, hi: u64, base: &[u32]) -> Vec<u32> {
    let lo = if lo.is_multiple_of(2) { lo + 1 } else { lo }.max(3);
    if lo > hi {
        return Vec::new();
    }
    let count = ((hi - lo) / 2 + 1) as usize;
    let mut composite = vec![false; count];
    for &p in base.iter().skip(1) {
        let p = p as u64;
        if p * p > hi {
            break;
        }
        let mut start = (p * p).max(lo.div_ceil(p) * p);
        if start.is_multiple_of(2) {
            start += p;
        }
        let mut k = ((start - lo) / 2) as usize;
        while k < count {
            composite[k] = true;
            k += p as usize;
        }
    }
    composite
        .iter()
        .enumerate()
        .filter(|(_, &c)| !c)
        .map(|(k, _)| (lo + 2 * k as u64) as u32)
        .collect()
}

/// All primes in `(from, to]`, sieved in parallel segments and merged in order.
fn sieve_range(from: u64, to: u64, cfg: &SieveConfig) -> Vec<u32> {
    if to <= from {
        return Vec::new();
    }
    let base = small_primes(to.isqrt());
    let span = 2 * cfg.segment_size.max(64) as u64;
    let starts: Vec<u64> = (from + 1..=to).step_by(span as usize).collect();
    let chunks: Vec<Vec<u32>> = starts
        .par_iter()
        .map(|&lo| sieve_odd_segment(lo, (lo + span - 1).min(to), &base))
        .collect();
    let mut out = Vec::with_capacity(chunks.iter().map(Vec::len).sum::<usize>() + 1);
    if from < 2 && to >= 2 {
        out.push(2);
    }
    for c in chunks {
        out.extend(c);
    }
    out
}

impl PrimeTable {
    pub fn build(limit: u64) -> Result<Self, PrimeError> {
        Self::build_with(limit, &SieveConfig::default())
    }

    pub fn build_with(limit: u64, cfg: &SieveConfig) -> Result<Self, PrimeError> {
        if limit < 2 {
            return Err(PrimeError::LimitTooSmall(limit));
        }
        check_budget(limit, cfg)?;
        Ok(PrimeTable {
            limit,
            primes: sieve_range(1, limit, cfg),
        })
    }

    /// A table covering `limit`, reusing the primes already found.
    pub fn extended(&self, limit: u64, cfg: &SieveConfig) -> Result<Self, PrimeError> {
        if limit <= self.limit {
            return Ok(self.clone());
        }
        check_budget(limit, cfg)?;
        let mut primes = self.primes.clone();
        primes.extend(sieve_range(self.limit, limit, cfg));
        Ok(PrimeTable { limit, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn len(&self) -> u64 {
        self.primes.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn largest(&self) -> u64 {
        *self.primes.last().expect("table holds 2") as u64
    }

    /// The `i`-th prime, 1-based.
    pub fn nth_prime(&self, i: u64) -> Result<u64, PrimeError> {
        if i == 0 || i > self.len() {
            return Err(PrimeError::IndexOutOfRange {
                index: i,
                len: self.len(),
            });
        }
        Ok(self.primes[(i - 1) as usize] as u64)
    }

    /// 1-based index of the prime `p`.
    pub fn prime_index(&self, p: u64) -> Result<u64, PrimeError> {
        if p > self.limit {
            return Err(PrimeError::TableTooSmall {
                need: p,
                have: self.limit,
            });
        }
        self.primes
            .binary_search(&(p as u32))
            .map(|k| k as u64 + 1)
            .map_err(|_| PrimeError::NotPrime(p))
    }

    pub fn is_prime(&self, n: u64) -> Result<bool, PrimeError> {
        if n > self.limit {
            return Err(PrimeError::TableTooSmall {
                need: n,
                have: self.limit,
            });
        }
        Ok(self.primes.binary_search(&(n as u32)).is_ok())
    }

    /// Smallest prime greater than `x`.
    pub fn next_prime(&self, x: u64) -> Result<u64, PrimeError> {
        let k = if x >= u32::MAX as u64 {
            self.primes.len()
        } else {
            self.primes.partition_point(|&p| p as u64 <= x)
        };
        self.primes.get(k).map(|&p| p as u64).ok_or(PrimeError::NoNeighbour {
            direction: "above",
            x,
            limit: self.limit,
        })
    }

    /// Largest prime smaller than `x`.
    pub fn prev_prime(&self, x: u64) -> Result<u64, PrimeError> {
        let err = PrimeError::NoNeighbour {
            direction: "below",
            x,
            limit: self.limit,
        };
        // Primes in (limit, x) are unknown to the table.
        if x < 3 || x > self.limit + 1 {
            return Err(err);
        }
        let k = self.primes.partition_point(|&p| (p as u64) < x);
        if k == 0 {
            return Err(err);
        }
        Ok(self.primes[k - 1] as u64)
    }

    /// Upper end of the prime-gap window above `x`: the floor of a certified
    /// lower bound for `x (1 + 1/(5000 (log x)^2))`.
    pub fn gap_window_end(x: u64) -> u64 {
        let prec = 96;
        let xi = Interval::from_u64(x, prec);
        let l = xi.ln().expect("x >= 2");
        let denom = l.mul(&l).mul_u64(5000);
        let w = xi.div(&denom).expect("positive denominator");
        let end = xi.add(&w);
        let f: BigInt = end.lo().floor();
        u64::try_from(f).expect("window end fits u64")
    }

    /// True when a prime lies in `(x, x (1 + 1/(5000 (log x)^2))]`.
    ///
    /// The window's upper end is rounded down, so `true` is conservative.
    /// Windows above the table limit are sieved directly, which needs the
    /// table to reach the square root of the window end.
    pub fn prime_gap_holds(&self, x: u64) -> Result<bool, PrimeError> {
        if x < PRIME_GAP_THRESHOLD {
            return Err(PrimeError::BelowThreshold {
                x,
                threshold: PRIME_GAP_THRESHOLD,
            });
        }
        let end = Self::gap_window_end(x);
        if end <= self.limit {
            return Ok(self.next_prime(x).is_ok_and(|q| q <= end));
        }
        let root = end.isqrt();
        if root > self.limit {
            return Err(PrimeError::TableTooSmall {
                need: root,
                have: self.limit,
            });
        }
        let base_len = self.primes.partition_point(|&p| (p as u64) <= root);
        Ok(!sieve_odd_segment(x + 1, end, &self.primes[..base_len]).is_empty())
    }

    /// Writes the odd-number bitmap: magic, little-endian limit, then bit `k`
    /// (LSB first within each byte) set iff `2k + 1` is prime.
    pub fn save(&self, path: &Path) -> Result<(), PrimeError> {
        let bits = self.limit.div_ceil(2);
        let mut map = vec![0u8; bits.div_ceil(8) as usize];
        for &p in self.primes.iter().skip(1) {
            let k = (p as u64 - 1) / 2;
            map[(k / 8) as usize] |= 1 << (k % 8);
        }
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&self.limit.to_le_bytes())?;
        w.write_all(&map)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, PrimeError> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 5];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(PrimeError::BadCache("wrong magic bytes"));
        }
        let mut lim = [0u8; 8];
        r.read_exact(&mut lim)?;
        let limit = u64::from_le_bytes(lim);
        if !(2..=MAX_TABLE_LIMIT).contains(&limit) {
            return Err(PrimeError::BadCache("limit out of range"));
        }
        let bits = limit.div_ceil(2);
        let mut map = Vec::new();
        r.read_to_end(&mut map)?;
        if map.len() as u64 != bits.div_ceil(8) {
            return Err(PrimeError::BadCache("bitmap length does not match limit"));
        }
        let mut primes = vec![2u32];
        for k in 0..bits {
            if map[(k / 8) as usize] >> (k % 8) & 1 == 1 {
                if k == 0 {
                    return Err(PrimeError::BadCache("1 marked prime"));
                }
                primes.push((2 * k + 1) as u32);
            }
        }
        Ok(PrimeTable { limit, primes })
    }
}

fn check_budget(limit: u64, cfg: &SieveConfig) -> Result<(), PrimeError> {
    let budget = cfg.max_limit.min(MAX_TABLE_LIMIT);
    if limit > budget {
        return Err(PrimeError::Budget {
            requested: limit,
            budget,
        });
    }
    Ok(())
}

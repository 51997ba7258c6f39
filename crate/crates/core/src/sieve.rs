//! Segmented sieve producing the von Mangoldt function Λ(n) and prime lists.
//!
//! Λ(n) = ln p when n = p^k for a prime p and k ≥ 1, and 0 otherwise. The
//! sieve works in segments of [`DEFAULT_SEGMENT`] integers: composites are
//! struck out with the base primes up to √hi, survivors are primes, and the
//! higher powers p², p³, … of every base prime are flagged afterwards. The
//! logarithm is evaluated once per prime and copied to its powers.

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use bitvec::prelude::*;
use rayon::prelude::*;

use crate::error::{check_range, Error, Result};

/// Largest integer the sieve will handle.
pub const MAX_SIEVE_LIMIT: u64 = 2_000_000_000;

/// Default segment length, in integers.
pub const DEFAULT_SEGMENT: usize = 1 << 20;

/// All primes up to `limit`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeList {
    pub limit: u64,
    pub primes: Vec<u64>,
}

impl PrimeList {
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }
}

/// Λ over the half-open interval `[lo, hi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MangoldtBlock {
    lo: u64,
    hi: u64,
    lam: Vec<f64>,
    flags: BitVec<u64, Lsb0>,
}

impl MangoldtBlock {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.lam.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lam.is_empty()
    }

    /// `lam()[i]` is Λ(lo + i).
    pub fn lam(&self) -> &[f64] {
        &self.lam
    }

    /// Bit `i` is set iff lo + i is a prime power.
    pub fn prime_power_flags(&self) -> &BitSlice<u64, Lsb0> {
        &self.flags
    }

    /// Λ(n) for `n` inside the block.
    pub fn get(&self, n: u64) -> Option<f64> {
        (self.lo..self.hi)
            .contains(&n)
            .then(|| self.lam[(n - self.lo) as usize])
    }

    /// `(n, Λ(n))` for every prime power n in the block, ascending.
    pub fn prime_powers(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.flags
            .iter_ones()
            .map(move |i| (self.lo + i as u64, self.lam[i]))
    }

    /// Appends `other`, which must start where `self` ends.
    pub fn concat(mut self, other: &MangoldtBlock) -> Result<MangoldtBlock> {
        if other.lo != self.hi {
            return Err(Error::InvalidArgument(format!(
                "cannot append block starting at {} to block ending at {}",
                other.lo, self.hi
            )));
        }
        self.lam.extend_from_slice(&other.lam);
        self.flags.extend_from_bitslice(&other.flags);
        self.hi = other.hi;
        Ok(self)
    }

    /// Serializes as `lo: u64, hi: u64` followed by one `(flag: u8, Λ: f64)`
    /// record per integer, all little-endian.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&self.lo.to_le_bytes())?;
        w.write_all(&self.hi.to_le_bytes())?;
        for (i, lam) in self.lam.iter().enumerate() {
            w.write_all(&[self.flags[i] as u8])?;
            w.write_all(&lam.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R, path: &Path) -> Result<MangoldtBlock> {
        let bad = |reason: String| Error::BlockFormat {
            path: path.to_path_buf(),
            reason,
        };
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let lo = u64::from_le_bytes(word);
        r.read_exact(&mut word)?;
        let hi = u64::from_le_bytes(word);
        if lo < 2 || hi <= lo || hi - lo > u32::MAX as u64 {
            return Err(bad(format!("invalid header lo={lo} hi={hi}")));
        }
        let len = (hi - lo) as usize;
        let mut lam = Vec::with_capacity(len);
        let mut flags = BitVec::with_capacity(len);
        let mut record = [0u8; 9];
        for i in 0..len {
            r.read_exact(&mut record)
                .map_err(|e| bad(format!("truncated at record {i}: {e}")))?;
            let flag = match record[0] {
                0 => false,
                1 => true,
                other => return Err(bad(format!("flag byte {other} at record {i}"))),
            };
            let value = f64::from_le_bytes(record[1..].try_into().unwrap());
            if flag != (value > 0.0) {
                return Err(bad(format!("flag/value mismatch at n = {}", lo + i as u64)));
            }
            flags.push(flag);
            lam.push(value);
        }
        if r.read(&mut record[..1])? != 0 {
            return Err(bad("trailing bytes".into()));
        }
        Ok(MangoldtBlock { lo, hi, lam, flags })
    }
}

/// Segmented sieve holding the base primes needed up to `limit`.
///
/// Immutable after construction, so one instance can feed any number of
/// threads.
#[derive(Debug, Clone)]
pub struct MangoldtSieve {
    limit: u64,
    segment: usize,
    base: Vec<u64>,
}

impl MangoldtSieve {
    /// Sieve able to produce blocks for any `n <= limit`.
    pub fn new(limit: u64) -> Result<Self> {
        check_range("limit", limit as f64, 2.0, MAX_SIEVE_LIMIT as f64)?;
        let root = isqrt(limit);
        Ok(Self {
            limit,
            segment: DEFAULT_SEGMENT,
            base: simple_sieve(root),
        })
    }

    pub fn with_segment_size(mut self, segment: usize) -> Self {
        self.segment = segment.max(1);
        self
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn segment_size(&self) -> usize {
        self.segment
    }

    /// Λ over `[lo, hi)`. The block length may not exceed the segment size.
    pub fn block(&self, lo: u64, hi: u64) -> Result<MangoldtBlock> {
        self.check_block(lo, hi)?;
        let len = (hi - lo) as usize;
        let composite = self.mark_composites(lo, hi);
        let mut lam = vec![0.0f64; len];
        let mut flags = bitvec![u64, Lsb0; 0; len];
        for (i, &c) in composite.iter().enumerate() {
            if !c {
                lam[i] = ((lo + i as u64) as f64).ln();
                flags.set(i, true);
            }
        }
        for &p in self.base.iter().take_while(|&&p| p * p < hi) {
            let ln_p = (p as f64).ln();
            let mut pk = p * p;
            while pk < hi {
                if pk >= lo {
                    let i = (pk - lo) as usize;
                    lam[i] = ln_p;
                    flags.set(i, true);
                }
                match pk.checked_mul(p) {
                    Some(next) => pk = next,
                    None => break,
                }
            }
        }
        Ok(MangoldtBlock { lo, hi, lam, flags })
    }

    /// Primes in `[lo, hi)`, ascending.
    pub fn primes_in(&self, lo: u64, hi: u64) -> Result<Vec<u64>> {
        self.check_block(lo, hi)?;
        let composite = self.mark_composites(lo, hi);
        Ok(composite
            .iter()
            .enumerate()
            .filter(|(_, &c)| !c)
            .map(|(i, _)| lo + i as u64)
            .collect())
    }

    /// Number of primes in `[lo, hi)`.
    pub fn count_primes_in(&self, lo: u64, hi: u64) -> Result<u64> {
        self.check_block(lo, hi)?;
        let composite = self.mark_composites(lo, hi);
        Ok(composite.iter().filter(|&&c| !c).count() as u64)
    }

    /// Splits `[lo, hi)` into segment-sized ranges.
    pub fn segments(&self, lo: u64, hi: u64) -> Vec<(u64, u64)> {
        let step = self.segment as u64;
        let mut out = Vec::new();
        let mut a = lo;
        while a < hi {
            let b = hi.min(a + step);
            out.push((a, b));
            a = b;
        }
        out
    }

    /// Maps `f` over the blocks covering `[lo, hi)` in parallel and returns
    /// the results in ascending block order.
    pub fn map_blocks<R, F>(&self, lo: u64, hi: u64, f: F) -> Result<Vec<R>>
    where
        R: Send,
        F: Fn(&MangoldtBlock) -> R + Sync + Send,
    {
        self.segments(lo, hi)
            .into_par_iter()
            .map(|(a, b)| self.block(a, b).map(|blk| f(&blk)))
            .collect()
    }

    fn check_block(&self, lo: u64, hi: u64) -> Result<()> {
        if lo < 2 || hi <= lo {
            return Err(Error::InvalidArgument(format!(
                "block bounds must satisfy 2 <= lo < hi, got [{lo}, {hi})"
            )));
        }
        if hi - lo > self.segment as u64 {
            return Err(Error::InvalidArgument(format!(
                "block length {} exceeds segment size {}",
                hi - lo,
                self.segment
            )));
        }
        if hi - 1 > self.limit {
            return Err(Error::OutOfBounds {
                name: "hi - 1",
                value: (hi - 1) as f64,
                min: 2.0,
                max: self.limit as f64,
            });
        }
        Ok(())
    }

    fn mark_composites(&self, lo: u64, hi: u64) -> Vec<bool> {
        let mut composite = vec![false; (hi - lo) as usize];
        for &p in self.base.iter().take_while(|&&p| p * p < hi) {
            let first = (p * p).max(lo.div_ceil(p) * p);
            let mut m = first;
            while m < hi {
                composite[(m - lo) as usize] = true;
                m += p;
            }
        }
        composite
    }
}

/// Primes up to `limit`.
pub fn sieve_primes(limit: u64) -> Result<PrimeList> {
    let sieve = MangoldtSieve::new(limit)?;
    let parts = sieve
        .segments(2, limit + 1)
        .into_par_iter()
        .map(|(a, b)| sieve.primes_in(a, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(PrimeList {
        limit,
        primes: parts.concat(),
    })
}

/// Λ(n) by trial division. Λ(1) = 0.
pub fn mangoldt(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("Λ(n) is defined for n >= 1".into()));
    }
    check_range("n", n as f64, 1.0, MAX_SIEVE_LIMIT as f64)?;
    if n == 1 {
        return Ok(0.0);
    }
    let p = smallest_factor(n);
    let mut m = n;
    while m % p == 0 {
        m /= p;
    }
    Ok(if m == 1 { (p as f64).ln() } else { 0.0 })
}

/// Λ over `[lo, hi)` with a fresh sieve sized for `hi`.
pub fn mangoldt_block(lo: u64, hi: u64) -> Result<MangoldtBlock> {
    if lo < 2 || hi <= lo {
        return Err(Error::InvalidArgument(format!(
            "block bounds must satisfy 2 <= lo < hi, got [{lo}, {hi})"
        )));
    }
    MangoldtSieve::new(hi - 1)?.block(lo, hi)
}

/// On-disk cache of blocks named `mangoldt_<lo>_<hi>.blk`.
#[derive(Debug, Clone)]
pub struct BlockCache {
    dir: PathBuf,
}

impl BlockCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// Cache rooted at `$TAUBER_CACHE_DIR`, if set.
    pub fn from_env() -> Option<Self> {
        std::env::var_os("TAUBER_CACHE_DIR").map(Self::new)
    }

    pub fn path_for(&self, lo: u64, hi: u64) -> PathBuf {
        self.dir.join(format!("mangoldt_{lo}_{hi}.blk"))
    }

    pub fn load(&self, lo: u64, hi: u64) -> Result<Option<MangoldtBlock>> {
        let path = self.path_for(lo, hi);
        if !path.exists() {
            return Ok(None);
        }
        let block = MangoldtBlock::read_from(BufReader::new(fs::File::open(&path)?), &path)?;
        if block.lo != lo || block.hi != hi {
            return Err(Error::BlockFormat {
                path,
                reason: format!("header [{}, {}) does not match name", block.lo, block.hi),
            });
        }
        Ok(Some(block))
    }

    pub fn store(&self, block: &MangoldtBlock) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(block.lo, block.hi);
        let tmp = path.with_extension("blk.tmp");
        block.write_to(BufWriter::new(fs::File::create(&tmp)?))?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    pub fn load_or_compute(&self, sieve: &MangoldtSieve, lo: u64, hi: u64) -> Result<MangoldtBlock> {
        if let Some(block) = self.load(lo, hi)? {
            return Ok(block);
        }
        let block = sieve.block(lo, hi)?;
        self.store(&block)?;
        Ok(block)
    }
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

pub(crate) fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut i = 2;
    while i * i <= n {
        if !composite[i] {
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| !composite[k]).map(|k| k as u64).collect()
}

fn smallest_factor(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 2;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln(x: u64) -> f64 {
        (x as f64).ln()
    }

    #[test]
    fn small_prime_lists() {
        assert_eq!(sieve_primes(10).unwrap().primes, vec![2, 3, 5, 7]);
        assert_eq!(sieve_primes(2).unwrap().primes, vec![2]);
        assert!(sieve_primes(1).is_err());
        assert!(sieve_primes(MAX_SIEVE_LIMIT + 1).is_err());
    }

    #[test]
    fn pointwise_mangoldt() {
        assert_eq!(mangoldt(8).unwrap(), ln(2));
        assert!((mangoldt(8).unwrap() - 0.693_147_2).abs() < 1e-7);
        assert_eq!(mangoldt(12).unwrap(), 0.0);
        assert!((mangoldt(7).unwrap() - 1.945_910_1).abs() < 1e-7);
        assert_eq!(mangoldt(1).unwrap(), 0.0);
        assert!(matches!(mangoldt(0), Err(Error::Domain(_))));
    }

    #[test]
    fn tiny_blocks() {
        let b = mangoldt_block(2, 11).unwrap();
        let flagged: Vec<u64> = b.prime_powers().map(|(n, _)| n).collect();
        assert_eq!(flagged, vec![2, 3, 4, 5, 7, 8, 9]);
        assert_eq!(b.get(6), Some(0.0));
        assert_eq!(b.get(10), Some(0.0));
        assert_eq!(b.get(9), Some(ln(3)));

        let b = mangoldt_block(14, 16).unwrap();
        assert_eq!(b.lam(), &[0.0, 0.0]);
        assert!(b.prime_power_flags().not_any());

        let b = mangoldt_block(2, 3).unwrap();
        assert_eq!(b.lam(), &[ln(2)]);
    }

    #[test]
    fn bad_block_bounds() {
        assert!(matches!(mangoldt_block(5, 5), Err(Error::InvalidArgument(_))));
        assert!(matches!(mangoldt_block(9, 3), Err(Error::InvalidArgument(_))));
        assert!(matches!(mangoldt_block(1, 3), Err(Error::InvalidArgument(_))));
        let s = MangoldtSieve::new(1000).unwrap().with_segment_size(16);
        assert!(s.block(2, 100).is_err());
        assert!(s.block(990, 1002).is_err());
    }

    #[test]
    fn segments_cover_range() {
        let s = MangoldtSieve::new(100).unwrap().with_segment_size(7);
        let segs = s.segments(2, 30);
        assert_eq!(segs.first(), Some(&(2, 9)));
        assert_eq!(segs.last(), Some(&(23, 30)));
        assert!(segs.windows(2).all(|w| w[0].1 == w[1].0));
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = BlockCache::new(dir.path());
        let sieve = MangoldtSieve::new(5000).unwrap();
        let block = cache.load_or_compute(&sieve, 1000, 2000).unwrap();
        let path = cache.path_for(1000, 2000);
        assert_eq!(path.file_name().unwrap(), "mangoldt_1000_2000.blk");
        assert_eq!(fs::metadata(&path).unwrap().len(), 16 + 9 * 1000);
        assert_eq!(cache.load(1000, 2000).unwrap().unwrap(), block);
    }

    #[test]
    fn corrupt_cache_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cache = BlockCache::new(dir.path());
        let block = mangoldt_block(2, 20).unwrap();
        let path = cache.store(&block).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes.truncate(bytes.len() - 3);
        fs::write(&path, &bytes).unwrap();
        assert!(matches!(cache.load(2, 20), Err(Error::BlockFormat { .. })));
    }
}

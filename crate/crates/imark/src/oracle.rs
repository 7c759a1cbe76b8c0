//! Definitional SG computation: an ascending dynamic-programming pass over
//! positions 0..=N with bit-packed storage and bit-exact persistence.

use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::game::{GameSpec, MAX_POSITION};

/// Default memory budget for table construction: 1 GiB of packed payload.
pub const DEFAULT_MEMORY_BUDGET: u64 = 1 << 30;

const MAGIC: [u8; 4] = *b"IMRK";
const FORMAT_VERSION: u8 = 1;
// keep set-size fields from triggering absurd allocations on corrupt input
const MAX_SET_LEN: u32 = 1 << 16;

/// Outcome of a position under normal play: P-positions are exactly the
/// positions with SG value 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    P,
    N,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::P => "P",
            Outcome::N => "N",
        })
    }
}

/// Smallest nonnegative integer absent from `values`.
pub fn mex(values: &[u64]) -> u64 {
    if values.len() < 256 {
        let mut mask = [0u64; 4];
        for &v in values {
            if v < 256 {
                mask[(v / 64) as usize] |= 1 << (v % 64);
            }
        }
        return mex_from_mask(&mask);
    }
    // values may be large and dense; mex is still at most len
    let mut seen = vec![false; values.len() + 1];
    for &v in values {
        if (v as usize) < seen.len() {
            seen[v as usize] = true;
        }
    }
    seen.iter().position(|&b| !b).unwrap() as u64
}

fn mex_from_mask(mask: &[u64; 4]) -> u64 {
    for (i, &w) in mask.iter().enumerate() {
        if w != u64::MAX {
            return i as u64 * 64 + (!w).trailing_zeros() as u64;
        }
    }
    256
}

/// Packing width for a given SG bound: the smallest of 2, 4, or 8 bits
/// that can hold every value.
fn packing_width(bound: u64) -> Result<u8> {
    match bound {
        0..=3 => Ok(2),
        4..=15 => Ok(4),
        16..=255 => Ok(8),
        _ => Err(Error::PreconditionViolated(format!(
            "SG bound {bound} exceeds 8-bit packing"
        ))),
    }
}

/// Packed payload size in bytes for positions 0..=n_max.
fn payload_len(n_max: u64, bits: u8) -> u64 {
    let total_bits = (n_max as u128 + 1) * bits as u128;
    total_bits.div_ceil(8) as u64
}

#[inline]
fn get_packed(data: &[u8], bits: u8, n: u64) -> u64 {
    match bits {
        2 => ((data[(n / 4) as usize] >> ((n % 4) * 2)) & 0b11) as u64,
        4 => ((data[(n / 2) as usize] >> ((n % 2) * 4)) & 0x0f) as u64,
        _ => data[n as usize] as u64,
    }
}

#[inline]
fn set_packed(data: &mut [u8], bits: u8, n: u64, v: u64) {
    match bits {
        2 => {
            let byte = &mut data[(n / 4) as usize];
            let shift = (n % 4) * 2;
            *byte = (*byte & !(0b11 << shift)) | ((v as u8) << shift);
        }
        4 => {
            let byte = &mut data[(n / 2) as usize];
            let shift = (n % 2) * 4;
            *byte = (*byte & !(0x0f << shift)) | ((v as u8) << shift);
        }
        _ => data[n as usize] = v as u8,
    }
}

/// Bit-packed SG values for positions 0..=n_max of one game.
///
/// Construction is a single ascending pass: every option of n is strictly
/// below n, so each value is a mex over already-computed entries. Tables
/// are immutable for readers and extendable in place to a larger range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SgTable {
    spec: GameSpec,
    n_max: u64,
    bits: u8,
    data: Vec<u8>,
}

impl SgTable {
    /// Builds the table for positions 0..=n_max under the default budget.
    pub fn build(spec: GameSpec, n_max: u64) -> Result<Self> {
        Self::build_with_budget(spec, n_max, DEFAULT_MEMORY_BUDGET)
    }

    /// Builds the table with an explicit payload budget in bytes.
    pub fn build_with_budget(spec: GameSpec, n_max: u64, budget: u64) -> Result<Self> {
        if n_max > MAX_POSITION {
            return Err(Error::OutOfRange {
                n: n_max,
                max: MAX_POSITION,
            });
        }
        let bits = packing_width(spec.sg_bound())?;
        let len = payload_len(n_max, bits);
        if len > budget {
            return Err(Error::ResourceLimit {
                needed: len,
                budget,
            });
        }
        let mut table = SgTable {
            spec,
            n_max,
            bits,
            data: vec![0u8; len as usize],
        };
        table.fill(0);
        Ok(table)
    }

    /// Extends coverage to new_n (no-op when already covered), reusing the
    /// existing prefix: options only ever look backward.
    pub fn extend(&mut self, new_n: u64) -> Result<()> {
        self.extend_with_budget(new_n, DEFAULT_MEMORY_BUDGET)
    }

    pub fn extend_with_budget(&mut self, new_n: u64, budget: u64) -> Result<()> {
        if new_n <= self.n_max {
            return Ok(());
        }
        if new_n > MAX_POSITION {
            return Err(Error::OutOfRange {
                n: new_n,
                max: MAX_POSITION,
            });
        }
        let len = payload_len(new_n, self.bits);
        if len > budget {
            return Err(Error::ResourceLimit {
                needed: len,
                budget,
            });
        }
        self.data.resize(len as usize, 0);
        let lo = self.n_max + 1;
        self.n_max = new_n;
        self.fill(lo);
        Ok(())
    }

    fn fill(&mut self, lo: u64) {
        for n in lo..=self.n_max {
            let v = self.recompute(n);
            set_packed(&mut self.data, self.bits, n, v);
        }
    }

    /// mex over the stored values of n's options; sg_bound < 256 is
    /// guaranteed by the packing widths, so a 256-bit mask suffices.
    fn recompute(&self, n: u64) -> u64 {
        let mut mask = [0u64; 4];
        for &s in self.spec.subtractions() {
            if let Some(w) = n.checked_sub(s) {
                let v = get_packed(&self.data, self.bits, w);
                mask[(v / 64) as usize] |= 1 << (v % 64);
            }
        }
        if n > 0 {
            for &d in self.spec.divisors() {
                if n.is_multiple_of(d) {
                    let v = get_packed(&self.data, self.bits, n / d);
                    mask[(v / 64) as usize] |= 1 << (v % 64);
                }
            }
        }
        mex_from_mask(&mask)
    }

    pub fn spec(&self) -> &GameSpec {
        &self.spec
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    pub fn bits_per_value(&self) -> u8 {
        self.bits
    }

    /// SG value of position n.
    pub fn sg(&self, n: u64) -> Result<u64> {
        if n > self.n_max {
            return Err(Error::OutOfRange { n, max: self.n_max });
        }
        Ok(get_packed(&self.data, self.bits, n))
    }

    pub(crate) fn sg_unchecked(&self, n: u64) -> u64 {
        get_packed(&self.data, self.bits, n)
    }

    /// Outcome of position n: P exactly when the SG value is 0.
    pub fn outcome(&self, n: u64) -> Result<Outcome> {
        Ok(if self.sg(n)? == 0 {
            Outcome::P
        } else {
            Outcome::N
        })
    }

    /// All values in position order, unpacked.
    pub fn values(&self) -> impl Iterator<Item = u64> + '_ {
        (0..=self.n_max).map(move |n| get_packed(&self.data, self.bits, n))
    }

    /// Writes the table in the versioned binary format (see README).
    pub fn save_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(&MAGIC)?;
        w.write_all(&[FORMAT_VERSION, self.bits])?;
        w.write_all(&(self.spec.subtractions().len() as u32).to_le_bytes())?;
        w.write_all(&(self.spec.divisors().len() as u32).to_le_bytes())?;
        for &s in self.spec.subtractions() {
            w.write_all(&s.to_le_bytes())?;
        }
        for &d in self.spec.divisors() {
            w.write_all(&d.to_le_bytes())?;
        }
        w.write_all(&self.n_max.to_le_bytes())?;
        w.write_all(&self.data)?;
        Ok(())
    }

    /// Saves atomically: writes a sibling temp file, then renames over the
    /// destination.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("imrk.tmp");
        {
            let mut w = BufWriter::new(File::create(&tmp)?);
            self.save_to(&mut w)?;
            w.flush()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Reads a table back, validating structure (magic, version, widths,
    /// spec, length) and spot-checking self-consistency before returning.
    pub fn load_from(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        read_or_corrupt(r, &mut magic, "header")?;
        if magic != MAGIC {
            return Err(Error::CorruptFile("bad magic".into()));
        }
        let mut head = [0u8; 2];
        read_or_corrupt(r, &mut head, "header")?;
        let [version, bits] = head;
        if version != FORMAT_VERSION {
            return Err(Error::CorruptFile(format!("unsupported version {version}")));
        }
        if !matches!(bits, 2 | 4 | 8) {
            return Err(Error::CorruptFile(format!("invalid width {bits}")));
        }
        let s_len = read_u32(r)?;
        let d_len = read_u32(r)?;
        if s_len > MAX_SET_LEN || d_len > MAX_SET_LEN {
            return Err(Error::CorruptFile("implausible set size".into()));
        }
        let s = read_u64s(r, s_len as usize, "subtraction set")?;
        let d = read_u64s(r, d_len as usize, "divisor set")?;
        let spec =
            GameSpec::new(&s, &d).map_err(|e| Error::CorruptFile(format!("invalid spec: {e}")))?;
        if spec.subtractions() != s || spec.divisors() != d {
            return Err(Error::CorruptFile(
                "set elements not sorted and deduplicated".into(),
            ));
        }
        if packing_width(spec.sg_bound())? != bits {
            return Err(Error::CorruptFile(format!(
                "width {bits} does not match the spec's SG bound"
            )));
        }
        let n_max = read_u64(r, "position count")?;
        if n_max > MAX_POSITION {
            return Err(Error::CorruptFile(format!("n_max {n_max} too large")));
        }
        let len = payload_len(n_max, bits);
        let mut data = vec![0u8; len as usize];
        read_or_corrupt(r, &mut data, "payload")?;
        let mut probe = [0u8; 1];
        if r.read(&mut probe)? != 0 {
            return Err(Error::CorruptFile("trailing data after payload".into()));
        }
        let table = SgTable {
            spec,
            n_max,
            bits,
            data,
        };
        table.spot_check()?;
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        Self::load_from(&mut r)
    }

    /// Deterministic self-consistency sample: the whole tail window plus a
    /// fixed-stride sweep of the prefix. Catches payload corruption that
    /// structural checks cannot (there is no checksum).
    fn spot_check(&self) -> Result<()> {
        let tail_lo = self.n_max.saturating_sub(512);
        for n in tail_lo..=self.n_max {
            self.check_at(n)?;
        }
        let stride = ((self.n_max + 1) / 1024).max(1);
        let mut n = 0;
        while n < tail_lo {
            self.check_at(n)?;
            n += stride;
        }
        Ok(())
    }

    fn check_at(&self, n: u64) -> Result<()> {
        if self.recompute(n) != self.sg_unchecked(n) {
            return Err(Error::CorruptFile(format!(
                "self-consistency failure at position {n}"
            )));
        }
        Ok(())
    }
}

fn read_or_corrupt(r: &mut impl Read, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| {
        if e.kind() == io::ErrorKind::UnexpectedEof {
            Error::CorruptFile(format!("truncated {what}"))
        } else {
            Error::Io(e)
        }
    })
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    read_or_corrupt(r, &mut buf, "header")?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64(r: &mut impl Read, what: &str) -> Result<u64> {
    let mut buf = [0u8; 8];
    read_or_corrupt(r, &mut buf, what)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_u64s(r: &mut impl Read, count: usize, what: &str) -> Result<Vec<u64>> {
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(read_u64(r, what)?);
    }
    Ok(out)
}

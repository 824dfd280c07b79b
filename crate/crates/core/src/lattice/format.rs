//! Binary lattice files.
//!
//! A 64-byte little-endian header is followed by `(re, im)` f64 pairs in
//! row-major lattice order:
//!
//! | bytes  | content                                             |
//! |--------|-----------------------------------------------------|
//! | 0..4   | magic `OKG1`                                        |
//! | 4..8   | u32 format version (1)                              |
//! | 8..12  | u32 dimension `d`                                   |
//! | 12..16 | u32 points per axis `n`                             |
//! | 16..24 | f64 box length `L`                                  |
//! | 24..28 | u32 domain: 0 physical, 1 frequency, 2 series       |
//! | 28..32 | reserved, zero                                      |
//! | 32..40 | u64 record count (1, or number of snapshots)        |
//! | 40..64 | zero                                                |
//!
//! A series stores each snapshot as an f64 time followed by its coefficients.

use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use super::{Field, GridSpec, Spectrum, TimeSeriesField};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"OKG1";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Physical = 0,
    Frequency = 1,
    Series = 2,
}

/// A decoded lattice file.
#[derive(Clone, Debug, PartialEq)]
pub enum LatticeData {
    Physical(Field),
    Frequency(Spectrum),
    Series(TimeSeriesField),
}

fn header(grid: &GridSpec, domain: Domain, count: u64) -> Vec<u8> {
    let mut h = Vec::with_capacity(HEADER_LEN);
    h.extend_from_slice(MAGIC);
    h.extend_from_slice(&VERSION.to_le_bytes());
    h.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    h.extend_from_slice(&(grid.n() as u32).to_le_bytes());
    h.extend_from_slice(&grid.length().to_le_bytes());
    h.extend_from_slice(&(domain as u32).to_le_bytes());
    h.extend_from_slice(&0u32.to_le_bytes());
    h.extend_from_slice(&count.to_le_bytes());
    h.resize(HEADER_LEN, 0);
    h
}

fn push_values(out: &mut Vec<u8>, values: &[Complex64]) {
    for z in values {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
}

pub fn encode(data: &LatticeData) -> Vec<u8> {
    match data {
        LatticeData::Physical(f) => {
            let mut out = header(f.grid(), Domain::Physical, 1);
            push_values(&mut out, f.values());
            out
        }
        LatticeData::Frequency(s) => {
            let mut out = header(s.grid(), Domain::Frequency, 1);
            push_values(&mut out, s.values());
            out
        }
        LatticeData::Series(u) => {
            let mut out = header(u.grid(), Domain::Series, u.len() as u64);
            for (t, s) in u.times().iter().zip(u.snapshots()) {
                out.extend_from_slice(&t.to_le_bytes());
                push_values(&mut out, s.values());
            }
            out
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let slice = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::Format("truncated file".into()))?;
        self.pos = end;
        Ok(slice.try_into().expect("slice length"))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }

    fn values(&mut self, count: usize) -> Result<Vec<Complex64>> {
        (0..count)
            .map(|_| Ok(Complex64::new(self.f64()?, self.f64()?)))
            .collect()
    }
}

pub fn decode(bytes: &[u8]) -> Result<LatticeData> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(Error::Format("missing OKG1 header".into()));
    }
    let mut r = Reader { bytes, pos: 4 };
    let version = r.u32()?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let dim = r.u32()? as usize;
    let n = r.u32()? as usize;
    let length = r.f64()?;
    let grid = GridSpec::new(dim, n, length)?;
    let domain = r.u32()?;
    let _reserved = r.u32()?;
    let count = u64::from_le_bytes(r.take()?) as usize;
    r.pos = HEADER_LEN;
    let expected = match domain {
        0 | 1 => HEADER_LEN + 16 * grid.len(),
        2 => HEADER_LEN + count * (8 + 16 * grid.len()),
        d => return Err(Error::Format(format!("unknown domain flag {d}"))),
    };
    if bytes.len() != expected {
        return Err(Error::Format(format!("expected {expected} bytes, found {}", bytes.len())));
    }
    match domain {
        0 => Ok(LatticeData::Physical(Field::new(grid, r.values(grid.len())?)?)),
        1 => Ok(LatticeData::Frequency(Spectrum::new(grid, r.values(grid.len())?)?)),
        _ => {
            let mut times = Vec::with_capacity(count);
            let mut snaps = Vec::with_capacity(count);
            for _ in 0..count {
                times.push(r.f64()?);
                snaps.push(Spectrum::new(grid, r.values(grid.len())?)?);
            }
            Ok(LatticeData::Series(TimeSeriesField::new(grid, times, snaps)?))
        }
    }
}

/// Writes to a sibling temporary file and renames it over `path`.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Format(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write(path: &Path, data: &LatticeData) -> Result<()> {
    atomic_write(path, &encode(data))
}

pub fn read(path: &Path) -> Result<LatticeData> {
    decode(&fs::read(path)?)
}

/// Reads a file holding a single spectrum; physical data is transformed.
pub fn read_spectrum(path: &Path) -> Result<Spectrum> {
    match read(path)? {
        LatticeData::Frequency(s) => Ok(s),
        LatticeData::Physical(f) => Ok(super::forward(&f)),
        LatticeData::Series(_) => Err(Error::Format("expected a single spectrum, found a series".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_grid() -> GridSpec {
        GridSpec::new(2, 4, 3.5).unwrap()
    }

    #[test]
    fn header_is_64_bytes_with_magic() {
        let s = Spectrum::zeros(sample_grid());
        let b = encode(&LatticeData::Frequency(s));
        assert_eq!(&b[..4], b"OKG1");
        assert_eq!(b.len(), 64 + 16 * 16);
        assert_eq!(u32::from_le_bytes(b[24..28].try_into().unwrap()), 1);
    }

    #[test]
    fn round_trips_all_domains() {
        let g = sample_grid();
        let s = Spectrum::from_fn(g, |xi| Complex64::new(xi[0], -xi[1] * 0.5));
        let f = super::super::inverse(&s);
        let u = TimeSeriesField::new(g, vec![0.0, 0.25], vec![s.clone(), s.scaled(2.0)]).unwrap();
        for d in [
            LatticeData::Frequency(s),
            LatticeData::Physical(f),
            LatticeData::Series(u),
        ] {
            assert_eq!(decode(&encode(&d)).unwrap(), d);
        }
    }

    #[test]
    fn rejects_corruption() {
        let s = Spectrum::zeros(sample_grid());
        let mut b = encode(&LatticeData::Frequency(s));
        assert!(decode(&b[..100]).is_err());
        b[0] = b'X';
        assert!(decode(&b).is_err());
    }
}

use crate::error::{Error, Result};

use super::{GridSpec, Spectrum};

/// Spectra sampled at strictly increasing times on one lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeriesField {
    grid: GridSpec,
    times: Vec<f64>,
    snapshots: Vec<Spectrum>,
}

impl TimeSeriesField {
    pub fn new(grid: GridSpec, times: Vec<f64>, snapshots: Vec<Spectrum>) -> Result<Self> {
        if times.len() != snapshots.len() {
            return Err(Error::SizeMismatch {
                expected: times.len(),
                found: snapshots.len(),
            });
        }
        if times.is_empty() {
            return Err(Error::InvalidParameter("empty time series".into()));
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("times must be finite and strictly increasing".into()));
        }
        if let Some(s) = snapshots.iter().find(|s| s.grid() != &grid) {
            return Err(Error::GridMismatch(format!("snapshot on {:?}, series on {:?}", s.grid(), grid)));
        }
        Ok(Self {
            grid,
            times,
            snapshots,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn snapshots(&self) -> &[Spectrum] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn into_parts(self) -> (GridSpec, Vec<f64>, Vec<Spectrum>) {
        (self.grid, self.times, self.snapshots)
    }

    pub fn map_snapshots(&self, f: impl Fn(&Spectrum) -> Spectrum) -> Result<Self> {
        let snaps: Vec<Spectrum> = self.snapshots.iter().map(f).collect();
        let grid = *snaps[0].grid();
        Self::new(grid, self.times.clone(), snaps)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.times != other.times {
            return Err(Error::InvalidParameter("time grids differ".into()));
        }
        let snaps = self
            .snapshots
            .iter()
            .zip(&other.snapshots)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.grid, self.times.clone(), snaps)
    }
}

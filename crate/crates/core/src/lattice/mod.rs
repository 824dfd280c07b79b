//! Periodic lattice `[0, L)^d` with `n` points per axis, its unitary DFT and
//! frequency-support bookkeeping.
//!
//! Lattice index `i` on an axis maps to the integer frequency `k = i` for
//! `i < n/2` and `k = i - n` otherwise; the physical frequency is `2πk/L`.
//! Coefficients satisfy `c_k = n^{-d/2} Σ_m f(x_m) e^{-2πi k·m/n}`.

mod fft;
pub mod format;
mod series;

pub use series::TimeSeriesField;

use num_complex::Complex64;
use rustfft::FftDirection;
use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    dim: usize,
    n: usize,
    length: f64,
}

impl GridSpec {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("n = {n} is not a power of two >= 4")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("length {length} must be positive")));
        }
        if n.checked_pow(dim as u32).is_none() {
            return Err(Error::InvalidGrid("lattice too large".into()));
        }
        Ok(Self { dim, n, length })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of lattice points, `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Quadrature weight `(L/n)^d` of the discrete `L^p` norms.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn freq_step(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.length
    }

    /// Largest per-axis physical frequency, `πn/L`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI * self.n as f64 / self.length
    }

    /// Largest `ℓ1` frequency on the lattice, `d·πn/L`.
    pub fn max_l1_frequency(&self) -> f64 {
        self.dim as f64 * self.nyquist()
    }

    /// Same lattice, different box length.
    pub fn with_length(&self, length: f64) -> Result<Self> {
        Self::new(self.dim, self.n, length)
    }

    pub fn freq_index(&self, i: usize) -> isize {
        if i < self.n / 2 {
            i as isize
        } else {
            i as isize - self.n as isize
        }
    }

    /// Inverse of [`freq_index`](Self::freq_index); `None` outside `[-n/2, n/2)`.
    pub fn lattice_index(&self, k: isize) -> Option<usize> {
        let half = (self.n / 2) as isize;
        if k >= half || k < -half {
            None
        } else if k >= 0 {
            Some(k as usize)
        } else {
            Some((k + self.n as isize) as usize)
        }
    }

    pub fn multi_index(&self, flat: usize) -> [usize; MAX_DIM] {
        let mut out = [0; MAX_DIM];
        let mut rem = flat;
        for a in (0..self.dim).rev() {
            out[a] = rem % self.n;
            rem /= self.n;
        }
        out
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().take(self.dim).fold(0, |acc, &i| acc * self.n + i)
    }

    pub fn wave_indices(&self, flat: usize) -> [isize; MAX_DIM] {
        let m = self.multi_index(flat);
        let mut out = [0; MAX_DIM];
        for a in 0..self.dim {
            out[a] = self.freq_index(m[a]);
        }
        out
    }

    pub fn wavevector(&self, flat: usize) -> [f64; MAX_DIM] {
        let k = self.wave_indices(flat);
        let h = self.freq_step();
        let mut out = [0.0; MAX_DIM];
        for a in 0..self.dim {
            out[a] = h * k[a] as f64;
        }
        out
    }

    /// Sample position `x_m = m L / n`.
    pub fn position(&self, flat: usize) -> [f64; MAX_DIM] {
        let m = self.multi_index(flat);
        let dx = self.spacing();
        let mut out = [0.0; MAX_DIM];
        for a in 0..self.dim {
            out[a] = dx * m[a] as f64;
        }
        out
    }

    /// Calls `f(flat, ξ)` for every lattice frequency in row-major order.
    pub fn for_each_frequency(&self, mut f: impl FnMut(usize, &[f64])) {
        let h = self.freq_step();
        let axis: Vec<f64> = (0..self.n).map(|i| h * self.freq_index(i) as f64).collect();
        let mut xi = [0.0; MAX_DIM];
        for flat in 0..self.len() {
            let m = self.multi_index(flat);
            for a in 0..self.dim {
                xi[a] = axis[m[a]];
            }
            f(flat, &xi[..self.dim]);
        }
    }

    pub fn frequency_map<T>(&self, mut f: impl FnMut(&[f64]) -> T) -> Vec<T> {
        let mut out = Vec::with_capacity(self.len());
        self.for_each_frequency(|_, xi| out.push(f(xi)));
        out
    }

    fn check_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

pub fn l1_norm(xi: &[f64]) -> f64 {
    xi.iter().map(|x| x.abs()).sum()
}

pub fn l2_norm(xi: &[f64]) -> f64 {
    xi.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Japanese bracket `⟨ξ⟩ = (1 + |ξ|²)^{1/2}` with the Euclidean norm.
pub fn bracket(xi: &[f64]) -> f64 {
    (1.0 + xi.iter().map(|x| x * x).sum::<f64>()).sqrt()
}

/// `ℓ1` length of the physical frequency of integer wave vector `k`.
pub fn l1_frequency(k: &[isize], grid: &GridSpec) -> f64 {
    let h = grid.freq_step();
    k.iter().map(|&ki| (h * ki as f64).abs()).sum()
}

macro_rules! lattice_array {
    ($name:ident, $field:ident) => {
        #[derive(Clone, Debug, PartialEq)]
        pub struct $name {
            grid: GridSpec,
            $field: Vec<Complex64>,
        }

        impl $name {
            pub fn new(grid: GridSpec, $field: Vec<Complex64>) -> Result<Self> {
                if $field.len() != grid.len() {
                    return Err(Error::SizeMismatch {
                        expected: grid.len(),
                        found: $field.len(),
                    });
                }
                Ok(Self { grid, $field })
            }

            pub fn zeros(grid: GridSpec) -> Self {
                Self {
                    grid,
                    $field: vec![Complex64::new(0.0, 0.0); grid.len()],
                }
            }

            pub fn grid(&self) -> &GridSpec {
                &self.grid
            }

            pub fn values(&self) -> &[Complex64] {
                &self.$field
            }

            pub fn values_mut(&mut self) -> &mut [Complex64] {
                &mut self.$field
            }

            pub fn into_values(self) -> Vec<Complex64> {
                self.$field
            }

            /// Reinterprets the same values on a lattice of equal `d` and `n`.
            pub fn on_grid(&self, grid: GridSpec) -> Result<Self> {
                if grid.dim() != self.grid.dim() || grid.n() != self.grid.n() {
                    return Err(Error::GridMismatch(format!(
                        "companion grid must share d and n: {:?} vs {:?}",
                        self.grid, grid
                    )));
                }
                Ok(Self {
                    grid,
                    $field: self.$field.clone(),
                })
            }

            pub fn scaled(&self, a: f64) -> Self {
                Self {
                    grid: self.grid,
                    $field: self.$field.iter().map(|z| z * a).collect(),
                }
            }

            pub fn add(&self, other: &Self) -> Result<Self> {
                self.grid.check_same(&other.grid)?;
                Ok(Self {
                    grid: self.grid,
                    $field: self.$field.iter().zip(&other.$field).map(|(a, b)| a + b).collect(),
                })
            }

            pub fn sub(&self, other: &Self) -> Result<Self> {
                self.grid.check_same(&other.grid)?;
                Ok(Self {
                    grid: self.grid,
                    $field: self.$field.iter().zip(&other.$field).map(|(a, b)| a - b).collect(),
                })
            }

            /// Plain `ℓ2` norm of the stored values, no quadrature weight.
            pub fn l2_sum(&self) -> f64 {
                self.$field.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
            }

            pub fn max_abs(&self) -> f64 {
                self.$field.iter().map(|z| z.norm()).fold(0.0, f64::max)
            }
        }
    };
}

lattice_array!(Field, samples);
lattice_array!(Spectrum, coeffs);

impl Field {
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let samples = (0..grid.len())
            .map(|i| f(&grid.position(i)[..grid.dim()]))
            .collect();
        Self { grid, samples }
    }

    /// Pointwise map of the samples.
    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn mul(&self, other: &Field) -> Result<Field> {
        self.grid.check_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).collect(),
        })
    }
}

impl Spectrum {
    /// Coefficients given as a function of the physical frequency.
    pub fn from_fn(grid: GridSpec, f: impl FnMut(&[f64]) -> Complex64) -> Self {
        Self {
            grid,
            coeffs: grid.frequency_map(f),
        }
    }

    /// Samples a continuum Fourier transform `f̂(ξ) = ∫ f(x) e^{-ix·ξ} dx`
    /// so that the inverse DFT approximates `f` on the torus:
    /// `c_k = n^{d/2} L^{-d} f̂(ξ_k)`.
    pub fn from_transform(grid: GridSpec, f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let scale = (grid.len() as f64).sqrt() / grid.length().powi(grid.dim() as i32);
        let mut s = Self::from_fn(grid, f);
        for c in s.coeffs.iter_mut() {
            *c *= scale;
        }
        s
    }

    /// Multiplies every coefficient by `m(ξ)`.
    pub fn multiply(&self, m: impl Fn(&[f64]) -> f64) -> Self {
        let mut out = self.clone();
        self.grid.for_each_frequency(|i, xi| out.coeffs[i] *= m(xi));
        out
    }

    pub fn multiply_complex(&self, m: impl Fn(&[f64]) -> Complex64) -> Self {
        let mut out = self.clone();
        self.grid.for_each_frequency(|i, xi| out.coeffs[i] *= m(xi));
        out
    }
}

/// Forward unitary DFT.
pub fn forward(f: &Field) -> Spectrum {
    let mut coeffs = f.samples.clone();
    fft::transform(&mut coeffs, f.grid.dim, f.grid.n, FftDirection::Forward);
    Spectrum {
        grid: f.grid,
        coeffs,
    }
}

/// Inverse unitary DFT.
pub fn inverse(s: &Spectrum) -> Field {
    let mut samples = s.coeffs.clone();
    fft::transform(&mut samples, s.grid.dim, s.grid.n, FftDirection::Inverse);
    Field {
        grid: s.grid,
        samples,
    }
}

/// Frequency regions used for support constraints. Radii use the `ℓ1` norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SupportRegion {
    Full,
    /// Closed first octant `ξ_i >= 0`.
    Octant,
    /// First octant with `|ξ| >= ε0`.
    OctantGap(f64),
    /// `|ξ| >= ε0`.
    Annulus(f64),
    /// `|ξ| <= ρ`.
    Ball(f64),
    /// Integer wave vectors with `max_i |k_i| <= K`.
    IndexBox(usize),
    /// First octant intersected with `IndexBox(K)`.
    OctantBox(usize),
}

impl SupportRegion {
    pub fn contains(&self, k: &[isize], xi: &[f64]) -> bool {
        match *self {
            SupportRegion::Full => true,
            SupportRegion::Octant => k.iter().all(|&ki| ki >= 0),
            SupportRegion::OctantGap(eps) => k.iter().all(|&ki| ki >= 0) && l1_norm(xi) >= eps,
            SupportRegion::Annulus(eps) => l1_norm(xi) >= eps,
            SupportRegion::Ball(rho) => l1_norm(xi) <= rho,
            SupportRegion::IndexBox(kmax) => k.iter().all(|&ki| ki.unsigned_abs() <= kmax),
            SupportRegion::OctantBox(kmax) => k.iter().all(|&ki| ki >= 0 && ki as usize <= kmax),
        }
    }

    fn mask(&self, grid: &GridSpec) -> Vec<bool> {
        let mut out = Vec::with_capacity(grid.len());
        grid.for_each_frequency(|i, xi| {
            let k = grid.wave_indices(i);
            out.push(self.contains(&k[..grid.dim()], xi));
        });
        out
    }
}

/// Zeroes every coefficient outside `region`.
pub fn project(s: &Spectrum, region: SupportRegion) -> Spectrum {
    let mask = region.mask(&s.grid);
    let coeffs = s
        .coeffs
        .iter()
        .zip(mask)
        .map(|(&c, keep)| if keep { c } else { Complex64::new(0.0, 0.0) })
        .collect();
    Spectrum {
        grid: s.grid,
        coeffs,
    }
}

/// `‖(1 - P_R) F‖ / ‖F‖` in coefficient `ℓ2`; zero for the zero spectrum.
pub fn support_mass_outside(s: &Spectrum, region: SupportRegion) -> f64 {
    let mask = region.mask(&s.grid);
    let mut total = 0.0;
    let mut outside = 0.0;
    for (c, keep) in s.coeffs.iter().zip(mask) {
        let m = c.norm_sqr();
        total += m;
        if !keep {
            outside += m;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        (outside / total).sqrt()
    }
}

/// Conjugate-linear `ℓ2` inner product of coefficient vectors.
pub fn inner(a: &Spectrum, b: &Spectrum) -> Result<Complex64> {
    a.grid.check_same(&b.grid)?;
    Ok(a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x * y.conj()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(0, 8, 1.0).is_err());
        assert!(GridSpec::new(4, 8, 1.0).is_err());
        assert!(GridSpec::new(1, 12, 1.0).is_err());
        assert!(GridSpec::new(1, 8, 0.0).is_err());
        assert!(GridSpec::new(1, 8, f64::NAN).is_err());
        let g = GridSpec::new(1, 8, 1.0).unwrap();
        assert!(Field::new(g, vec![c(0.0, 0.0); 7]).is_err());
    }

    #[test]
    fn frequency_ordering_puts_nyquist_negative() {
        let g = GridSpec::new(1, 8, 2.0 * PI).unwrap();
        let ks: Vec<isize> = (0..8).map(|i| g.freq_index(i)).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        for i in 0..8 {
            assert_eq!(g.lattice_index(g.freq_index(i)), Some(i));
        }
        assert_eq!(g.lattice_index(4), None);
    }

    #[test]
    fn delta_transforms_to_constant() {
        let g = GridSpec::new(1, 8, 2.0 * PI).unwrap();
        let mut f = Field::zeros(g);
        f.values_mut()[0] = c(1.0, 0.0);
        let s = forward(&f);
        for z in s.values() {
            assert!((z - c(8f64.sqrt().recip(), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn single_mode_lands_on_its_index() {
        let g = GridSpec::new(2, 16, 2.0 * PI).unwrap();
        let f = Field::from_fn(g, |x| Complex64::from_polar(1.0, 3.0 * x[0] - 2.0 * x[1]));
        let s = forward(&f);
        let at = g.flat_index(&[3, g.lattice_index(-2).unwrap()]);
        for (i, z) in s.values().iter().enumerate() {
            let expect = if i == at { 16.0 } else { 0.0 };
            assert!((z.norm() - expect).abs() < 1e-12, "{i} {z}");
        }
    }

    #[test]
    fn round_trip_three_dimensions() {
        let g = GridSpec::new(3, 8, 3.0).unwrap();
        let f = Field::from_fn(g, |x| c(x[0] * x[1] - x[2], (x[0] + 2.0 * x[2]).sin()));
        let back = inverse(&forward(&f));
        for (a, b) in f.values().iter().zip(back.values()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn l1_additivity_exact_on_octant() {
        let g = GridSpec::new(2, 32, 2.0 * PI).unwrap();
        for a in 0..10isize {
            for b in 0..10isize {
                let k = [a, b];
                let m = [b + 1, 2 * a];
                let s = [a + b + 1, b + 2 * a];
                assert_eq!(
                    l1_frequency(&s, &g),
                    l1_frequency(&k, &g) + l1_frequency(&m, &g)
                );
            }
        }
    }

    #[test]
    fn half_mass_outside_gives_inverse_sqrt_two() {
        let g = GridSpec::new(1, 8, 2.0 * PI).unwrap();
        let mut s = Spectrum::zeros(g);
        s.values_mut()[1] = c(1.0, 0.0);
        s.values_mut()[7] = c(0.0, 1.0);
        let r = support_mass_outside(&s, SupportRegion::Octant);
        assert!((r - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn disjoint_regions_compose_to_zero() {
        let g = GridSpec::new(2, 16, 2.0 * PI).unwrap();
        let s = Spectrum::from_fn(g, |xi| c(1.0 + xi[0], xi[1]));
        let p = project(&project(&s, SupportRegion::Ball(2.0)), SupportRegion::Annulus(3.0));
        assert_eq!(p.max_abs(), 0.0);
    }

    #[test]
    fn companion_grid_requires_same_lattice() {
        let g = GridSpec::new(1, 8, 1.0).unwrap();
        let s = Spectrum::zeros(g);
        assert!(s.on_grid(GridSpec::new(1, 8, 4.0).unwrap()).is_ok());
        assert!(s.on_grid(GridSpec::new(1, 16, 4.0).unwrap()).is_err());
    }
}

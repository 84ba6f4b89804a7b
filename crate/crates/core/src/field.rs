//! Scalar fields on the periodic grid and the forward/inverse transforms.
//!
//! Normalization is unitary in `L^2`: with Fourier-series coefficients
//! `c_k` (so `f(x) = sum_k c_k exp(i k.x)`) the stored spectral value is
//! `F(k) = L^{dim/2} c_k`, which makes the coefficient l2 sum equal the
//! grid-quadrature `L^2` norm exactly (Parseval). Concretely,
//!
//! ```text
//! forward:  F = DFT(f) * L^{dim/2} / n^dim
//! inverse:  f = IDFT(F) / L^{dim/2}
//! ```
//!
//! with the unnormalized DFT/IDFT pair. All operations are pure; inputs are
//! never mutated.

use num_complex::Complex64;
use rustfft::FftPlanner;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan(n: usize, forward: bool) -> Arc<dyn rustfft::Fft<f64>> {
    let mut p = planner().lock().unwrap();
    if forward {
        p.plan_fft_forward(n)
    } else {
        p.plan_fft_inverse(n)
    }
}

/// Unnormalized DFT along every axis of a row-major `[n; dim]` cube.
fn dft_all_axes(data: &mut [Complex64], spec: &GridSpec, forward: bool) {
    let n = spec.points_per_axis();
    let dim = spec.dim();
    let fft = plan(n, forward);
    let mut line = vec![Complex64::default(); n];
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        let outer = n.pow(axis as u32);
        for o in 0..outer {
            for i in 0..stride {
                let base = o * n * stride + i;
                for j in 0..n {
                    line[j] = data[base + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for j in 0..n {
                    data[base + j * stride] = line[j];
                }
            }
        }
    }
}

/// Real scalar samples on the grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    spec: GridSpec,
    data: Vec<f64>,
}

impl RealField {
    pub fn zeros(spec: &GridSpec) -> Self {
        RealField {
            spec: *spec,
            data: vec![0.0; spec.total_points()],
        }
    }

    pub fn from_data(spec: &GridSpec, data: Vec<f64>) -> Result<Self> {
        if data.len() != spec.total_points() {
            return Err(Error::config(format!(
                "field length {} does not match grid with {} points",
                data.len(),
                spec.total_points()
            )));
        }
        Ok(RealField { spec: *spec, data })
    }

    /// Sample `f(x)` at every grid point. Unused coordinates are zero.
    pub fn from_fn(spec: &GridSpec, f: impl Fn([f64; 3]) -> f64) -> Self {
        let mut data = vec![0.0; spec.total_points()];
        for (flat, v) in data.iter_mut().enumerate() {
            let idx = spec.unravel(flat);
            let mut x = [0.0; 3];
            for a in 0..spec.dim() {
                x[a] = spec.coord(idx[a]);
            }
            *v = f(x);
        }
        RealField { spec: *spec, data }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn scale(&self, s: f64) -> RealField {
        RealField {
            spec: self.spec,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &RealField) -> Result<RealField> {
        check_same_grid(&self.spec, &other.spec)?;
        Ok(RealField {
            spec: self.spec,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Pointwise product, no dealiasing.
    pub fn mul(&self, other: &RealField) -> Result<RealField> {
        check_same_grid(&self.spec, &other.spec)?;
        Ok(RealField {
            spec: self.spec,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// Grid maximum of |f|; a lower bound of the continuum sup norm.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub(crate) fn check_same_grid(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a != b {
        return Err(Error::config(format!("grid mismatch: {a:?} vs {b:?}")));
    }
    Ok(())
}

/// Complex Fourier coefficients on the wavenumber lattice.
///
/// Coefficients obtained from a [`RealField`] satisfy Hermitian symmetry
/// `F(-k) = conj(F(k))` to round-off.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    spec: GridSpec,
    data: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(spec: &GridSpec) -> Self {
        SpectralField {
            spec: *spec,
            data: vec![Complex64::default(); spec.total_points()],
        }
    }

    pub fn from_data(spec: &GridSpec, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != spec.total_points() {
            return Err(Error::config(format!(
                "spectral field length {} does not match grid with {} points",
                data.len(),
                spec.total_points()
            )));
        }
        Ok(SpectralField { spec: *spec, data })
    }

    /// Field with a single Fourier mode pair `+m, -m` and `L^2` norm
    /// `amplitude`. For `m = 0` this is a constant field.
    pub fn single_mode(spec: &GridSpec, mode: [i64; 3], amplitude: f64) -> Result<Self> {
        let n = spec.points_per_axis() as i64;
        let mut flat = 0usize;
        let mut is_zero = true;
        for a in 0..spec.dim() {
            let m = mode[a];
            if m <= -n / 2 || m >= n / 2 {
                return Err(Error::config(format!(
                    "mode index {m} out of range for n = {n}"
                )));
            }
            if m != 0 {
                is_zero = false;
            }
            let i = if m >= 0 { m } else { m + n } as usize;
            flat = flat * spec.points_per_axis() + i;
        }
        let mut out = SpectralField::zeros(spec);
        if is_zero {
            out.data[0] = Complex64::new(amplitude, 0.0);
        } else {
            let lat = crate::grid::WavenumberLattice::new(spec);
            let conj = lat.conjugate_index(flat);
            let a = amplitude / std::f64::consts::SQRT_2;
            out.data[flat] = Complex64::new(a, 0.0);
            out.data[conj] = Complex64::new(a, 0.0);
        }
        Ok(out)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// `L^2` norm by the Parseval sum.
    pub fn l2_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn zero_mode(&self) -> Complex64 {
        self.data[0]
    }

    pub fn scale(&self, s: f64) -> SpectralField {
        SpectralField {
            spec: self.spec,
            data: self.data.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField> {
        check_same_grid(&self.spec, &other.spec)?;
        Ok(SpectralField {
            spec: self.spec,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField> {
        check_same_grid(&self.spec, &other.spec)?;
        Ok(SpectralField {
            spec: self.spec,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Worst Hermitian-symmetry defect, `max |F(-k) - conj(F(k))|`.
    pub fn hermitian_defect(&self) -> f64 {
        let lat = crate::grid::WavenumberLattice::new(&self.spec);
        let mut worst = 0.0f64;
        for (flat, c) in self.data.iter().enumerate() {
            let d = (self.data[lat.conjugate_index(flat)] - c.conj()).norm();
            worst = worst.max(d);
        }
        worst
    }
}

/// Forward spectral transform with the unitary-in-`L^2` normalization.
pub fn forward_transform(f: &RealField) -> SpectralField {
    let spec = *f.spec();
    let mut data: Vec<Complex64> = f.data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    dft_all_axes(&mut data, &spec, true);
    let scale = spec.len().powf(spec.dim() as f64 / 2.0) / spec.total_points() as f64;
    for c in &mut data {
        *c *= scale;
    }
    SpectralField { spec, data }
}

/// Inverse spectral transform; the imaginary residue of a Hermitian input
/// is dropped (it is round-off by construction).
pub fn inverse_transform(f: &SpectralField) -> RealField {
    let spec = *f.spec();
    let mut data = f.data.clone();
    dft_all_axes(&mut data, &spec, false);
    let scale = 1.0 / spec.len().powf(spec.dim() as f64 / 2.0);
    RealField {
        spec,
        data: data.iter().map(|c| c.re * scale).collect(),
    }
}

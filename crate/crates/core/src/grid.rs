//! Periodic grid description and the associated wavenumber lattice.
//!
//! The computational domain is the torus `[0, L]^dim` sampled at `n` points
//! per axis. Fourier modes carry wavenumbers `k = 2*pi*m/L` with `m` in the
//! standard FFT ordering `0, 1, ..., n/2, -n/2+1, ..., -1`. The unpaired
//! Nyquist mode `m = n/2` is kept for norms (even multipliers) but excluded
//! from odd derivative multipliers, where it has no Hermitian partner.

use crate::error::{Error, Result};

/// Upper bound on total grid points; keeps accidental huge allocations out.
const MAX_TOTAL_POINTS: usize = 1 << 24;

/// Discretization of the periodic box `[0, L]^dim`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dim: usize,
    n: usize,
    len: f64,
    dealias: f64,
}

impl GridSpec {
    /// `dim` in 1..=3, `n` a power of two >= 8, `len` the box side length.
    /// The dealias fraction defaults to the 2/3 rule.
    pub fn new(dim: usize, n: usize, len: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::config(format!("dim must be 1, 2 or 3, got {dim}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::config(format!(
                "points per axis must be a power of two >= 8, got {n}"
            )));
        }
        if !(len > 0.0) || !len.is_finite() {
            return Err(Error::config(format!("domain length must be positive, got {len}")));
        }
        let total = n.checked_pow(dim as u32).filter(|&t| t <= MAX_TOTAL_POINTS);
        if total.is_none() {
            return Err(Error::config(format!(
                "grid {n}^{dim} exceeds the configured memory budget"
            )));
        }
        Ok(GridSpec {
            dim,
            n,
            len,
            dealias: 2.0 / 3.0,
        })
    }

    /// Truncation fraction of the retained band, in `(0, 1]`. Quadratic
    /// products are alias-free only at 2/3 or below.
    pub fn with_dealias(mut self, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0) || fraction > 1.0 {
            return Err(Error::config(format!(
                "dealias fraction must lie in (0, 1], got {fraction}"
            )));
        }
        self.dealias = fraction;
        Ok(self)
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> f64 {
        self.len
    }

    pub fn total_points(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Grid spacing `L/n`.
    pub fn dx(&self) -> f64 {
        self.len / self.n as f64
    }

    /// Volume element of the quadrature rule, `(L/n)^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    /// Largest resolved wavenumber magnitude per axis, `pi*n/L`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI * self.n as f64 / self.len
    }

    /// Signed integer mode index for flat axis position `i`.
    pub fn mode_index(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }

    /// Physical coordinate of grid point `i` along one axis.
    pub fn coord(&self, i: usize) -> f64 {
        self.dx() * i as f64
    }

    /// Decompose a flat row-major index into per-axis indices.
    pub fn unravel(&self, flat: usize) -> [usize; 3] {
        let n = self.n;
        match self.dim {
            1 => [flat, 0, 0],
            2 => [flat / n, flat % n, 0],
            _ => [flat / (n * n), (flat / n) % n, flat % n],
        }
    }

    /// Visit every flat index with its per-axis indices, axis-major and
    /// without per-point division.
    pub fn for_each_index(&self, mut f: impl FnMut(usize, [usize; 3])) {
        let n = self.n;
        let mut flat = 0;
        match self.dim {
            1 => {
                for i0 in 0..n {
                    f(flat, [i0, 0, 0]);
                    flat += 1;
                }
            }
            2 => {
                for i0 in 0..n {
                    for i1 in 0..n {
                        f(flat, [i0, i1, 0]);
                        flat += 1;
                    }
                }
            }
            _ => {
                for i0 in 0..n {
                    for i1 in 0..n {
                        for i2 in 0..n {
                            f(flat, [i0, i1, i2]);
                            flat += 1;
                        }
                    }
                }
            }
        }
    }

    /// Per-axis-index keep flags of the dealiasing rule.
    pub fn axis_keep_flags(&self) -> Vec<bool> {
        let lim = self.dealias_limit();
        (0..self.n).map(|i| self.mode_index(i).abs() <= lim).collect()
    }

    /// Largest per-axis mode index kept by the dealiasing rule
    /// (`floor(dealias * n/2)`; `n/3` under the default 2/3 rule).
    pub fn dealias_limit(&self) -> i64 {
        (self.dealias * self.n as f64 / 2.0).floor() as i64
    }

    /// True when the mode with per-axis signed indices `m` survives the
    /// 2/3-rule truncation.
    pub fn keep_dealiased(&self, m: &[i64]) -> bool {
        let lim = self.dealias_limit();
        m.iter().take(self.dim).all(|&mi| mi.abs() <= lim)
    }
}

/// Precomputed wavenumbers for a grid.
///
/// `freq` is the signed wavenumber used by even multipliers (norms,
/// Laplacian); `deriv_freq` zeroes the Nyquist plane so odd multipliers
/// (gradients) preserve Hermitian symmetry.
#[derive(Debug, Clone)]
pub struct WavenumberLattice {
    spec: GridSpec,
    axis_freq: Vec<f64>,
    axis_deriv_freq: Vec<f64>,
    k_sq: Vec<f64>,
}

impl WavenumberLattice {
    pub fn new(spec: &GridSpec) -> Self {
        let n = spec.points_per_axis();
        let base = 2.0 * std::f64::consts::PI / spec.len();
        let mut axis_freq = Vec::with_capacity(n);
        let mut axis_deriv_freq = Vec::with_capacity(n);
        for i in 0..n {
            let m = spec.mode_index(i);
            axis_freq.push(base * m as f64);
            // m == n/2 is its own conjugate partner; i*k there breaks symmetry
            axis_deriv_freq.push(if m == (n as i64) / 2 { 0.0 } else { base * m as f64 });
        }
        let total = spec.total_points();
        let mut k_sq = vec![0.0; total];
        for (flat, slot) in k_sq.iter_mut().enumerate() {
            let idx = spec.unravel(flat);
            let mut s = 0.0;
            for (a, &i) in idx.iter().take(spec.dim()).enumerate() {
                let _ = a;
                let f = axis_freq[i];
                s += f * f;
            }
            *slot = s;
        }
        WavenumberLattice {
            spec: *spec,
            axis_freq,
            axis_deriv_freq,
            k_sq,
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// |xi|^2 of the mode at flat index `flat`.
    pub fn k_sq(&self, flat: usize) -> f64 {
        self.k_sq[flat]
    }

    pub fn k_mag(&self, flat: usize) -> f64 {
        self.k_sq[flat].sqrt()
    }

    pub fn k_sq_slice(&self) -> &[f64] {
        &self.k_sq
    }

    /// Signed wavenumber along `axis` at axis index `i`.
    pub fn axis_freq(&self, axis: usize, i: usize) -> f64 {
        debug_assert!(axis < self.spec.dim());
        self.axis_freq[i]
    }

    /// Wavenumber used by first-derivative multipliers (Nyquist zeroed).
    pub fn axis_deriv_freq(&self, axis: usize, i: usize) -> f64 {
        debug_assert!(axis < self.spec.dim());
        self.axis_deriv_freq[i]
    }

    /// Flat index of the Hermitian-conjugate mode `-m`.
    pub fn conjugate_index(&self, flat: usize) -> usize {
        let n = self.spec.points_per_axis();
        let idx = self.spec.unravel(flat);
        let mut out = 0;
        for &i in idx.iter().take(self.spec.dim()) {
            let j = if i == 0 { 0 } else { n - i };
            out = out * n + j;
        }
        out
    }
}

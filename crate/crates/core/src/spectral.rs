//! Fourier-multiplier operators, smooth frequency cutoffs, and norms.
//!
//! The fractional operator here is the multiplier `|xi|^gamma`. On the
//! torus the zero mode has no continuum counterpart for negative powers;
//! its handling is an explicit policy, not a silent default.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{inverse_transform, RealField, SpectralField};
use crate::grid::{GridSpec, WavenumberLattice};

/// What `lambda_power` does with the zero mode when `gamma < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroMode {
    /// Project the mean out (set the zero mode to 0). A discretization
    /// artifact of the torus, recorded in reports.
    #[default]
    Project,
    /// Reject fields with a nonzero mean.
    Strict,
}

const ZERO_MEAN_TOL: f64 = 1e-12;

/// Apply `|xi|^gamma` to every coefficient. `gamma = 0` is the identity.
pub fn lambda_power(f: &SpectralField, gamma: f64, policy: ZeroMode) -> Result<SpectralField> {
    let lat = WavenumberLattice::new(f.spec());
    let mut out = f.clone();
    if gamma == 0.0 {
        return Ok(out);
    }
    if gamma < 0.0 {
        let mean = f.zero_mode().norm();
        match policy {
            ZeroMode::Project => out.data_mut()[0] = Complex64::default(),
            ZeroMode::Strict => {
                if mean > ZERO_MEAN_TOL * (1.0 + f.l2_norm()) {
                    return Err(Error::domain(format!(
                        "negative-order multiplier |xi|^{gamma} needs a zero-mean field \
                         (zero mode magnitude {mean:.3e}); enable zero-mode projection"
                    )));
                }
                out.data_mut()[0] = Complex64::default();
            }
        }
    }
    for (flat, c) in out.data_mut().iter_mut().enumerate() {
        if flat == 0 {
            if gamma > 0.0 {
                *c = Complex64::default();
            }
            continue;
        }
        *c *= lat.k_sq(flat).powf(gamma / 2.0);
    }
    Ok(out)
}

/// Spectral gradient: component `j` is the multiplier `i*xi_j`.
/// The unpaired Nyquist plane is excluded (see [`WavenumberLattice`]).
pub fn gradient(f: &SpectralField) -> Vec<SpectralField> {
    let spec = *f.spec();
    let lat = WavenumberLattice::new(&spec);
    (0..spec.dim())
        .map(|axis| {
            let mut out = f.clone();
            let data = out.data_mut();
            spec.for_each_index(|flat, idx| {
                let k = lat.axis_deriv_freq(axis, idx[axis]);
                data[flat] *= Complex64::new(0.0, k);
            });
            out
        })
        .collect()
}

/// Spectral Laplacian, the multiplier `-|xi|^2` built from the derivative
/// wavenumbers so that `laplacian = div(gradient)` holds exactly.
pub fn laplacian(f: &SpectralField) -> SpectralField {
    let spec = *f.spec();
    let lat = WavenumberLattice::new(&spec);
    let mut out = f.clone();
    let data = out.data_mut();
    let dim = spec.dim();
    spec.for_each_index(|flat, idx| {
        let mut ksq = 0.0;
        for a in 0..dim {
            let k = lat.axis_deriv_freq(a, idx[a]);
            ksq += k * k;
        }
        data[flat] *= -ksq;
    });
    out
}

/// Smooth low/high frequency split with plateau radius `R`.
///
/// `psi(|xi|) = 1` for `|xi| <= R`, `cos^2(pi (|xi|-R)/(2R))` on `[R, 2R]`,
/// `0` beyond; `phi = 1 - psi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec {
    radius: f64,
}

impl CutoffSpec {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::config(format!("cutoff radius must be positive, got {radius}")));
        }
        Ok(CutoffSpec { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Low-frequency symbol value at `|xi| = k`.
    pub fn psi(&self, k: f64) -> f64 {
        let r = self.radius;
        if k <= r {
            1.0
        } else if k >= 2.0 * r {
            0.0
        } else {
            let t = std::f64::consts::PI * (k - r) / (2.0 * r);
            let c = t.cos();
            c * c
        }
    }

    /// High-frequency symbol, `1 - psi`.
    pub fn phi(&self, k: f64) -> f64 {
        1.0 - self.psi(k)
    }

    /// A faithful split needs the taper to close below the grid Nyquist.
    /// Returns a warning line when `2R` reaches it; not fatal.
    pub fn resolution_warning(&self, spec: &GridSpec) -> Option<String> {
        let nyq = spec.nyquist();
        if 2.0 * self.radius >= nyq {
            Some(format!(
                "cutoff taper edge 2R = {:.6} reaches the grid Nyquist frequency {:.6}; \
                 the high band is truncated",
                2.0 * self.radius,
                nyq
            ))
        } else {
            None
        }
    }
}

pub fn lowpass(f: &SpectralField, cutoff: &CutoffSpec) -> SpectralField {
    apply_radial(f, |k| cutoff.psi(k))
}

pub fn highpass(f: &SpectralField, cutoff: &CutoffSpec) -> SpectralField {
    apply_radial(f, |k| cutoff.phi(k))
}

fn apply_radial(f: &SpectralField, sym: impl Fn(f64) -> f64) -> SpectralField {
    let lat = WavenumberLattice::new(f.spec());
    let mut out = f.clone();
    for (flat, c) in out.data_mut().iter_mut().enumerate() {
        *c *= sym(lat.k_mag(flat));
    }
    out
}

/// Lebesgue exponents used by the estimates; the sup norm is the grid max.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpExponent {
    Two,
    Three,
    Six,
    Infinity,
}

impl LpExponent {
    pub fn parse(p: &str) -> Result<Self> {
        match p {
            "2" => Ok(LpExponent::Two),
            "3" => Ok(LpExponent::Three),
            "6" => Ok(LpExponent::Six),
            "inf" | "oo" => Ok(LpExponent::Infinity),
            other => Err(Error::config(format!("unsupported Lp exponent {other}"))),
        }
    }

    fn value(&self) -> Option<f64> {
        match self {
            LpExponent::Two => Some(2.0),
            LpExponent::Three => Some(3.0),
            LpExponent::Six => Some(6.0),
            LpExponent::Infinity => None,
        }
    }
}

/// `L^p` norm by grid quadrature; `L^inf` as the grid max (a lower bound
/// of the continuum sup norm).
pub fn lp_norm(f: &RealField, p: LpExponent) -> f64 {
    match p.value() {
        None => f.max_abs(),
        Some(p) => {
            let s: f64 = f.data().iter().map(|v| v.abs().powf(p)).sum();
            (s * f.spec().cell_volume()).powf(1.0 / p)
        }
    }
}

/// Homogeneous norm `|| |xi|^gamma F ||_{l2}`; for `gamma < 0` the field
/// must be zero-mean (or the projection policy applies).
pub fn homogeneous_norm(f: &SpectralField, gamma: f64, policy: ZeroMode) -> Result<f64> {
    Ok(lambda_power(f, gamma, policy)?.l2_norm())
}

/// Inhomogeneous Sobolev norm `(||f||^2 + ||f||_{Hdot^s}^2)^{1/2}`.
/// For `s < 0` the homogeneous part is taken on the mean-free component.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> Result<f64> {
    let hom = homogeneous_norm(f, s, ZeroMode::Project)?;
    Ok((f.l2_norm().powi(2) + hom * hom).sqrt())
}

/// Convenience: `L^p` norm of a spectral field via the inverse transform.
pub fn lp_norm_spectral(f: &SpectralField, p: LpExponent) -> f64 {
    lp_norm(&inverse_transform(f), p)
}

/// Zero-mean random band-limited field generator used across tests and
/// experiments; coefficients are Hermitian-symmetrized so the field is real.
pub fn random_band_field(
    spec: &GridSpec,
    kmin: f64,
    kmax: f64,
    amplitude: f64,
    rng: &mut impl rand::Rng,
) -> SpectralField {
    let lat = WavenumberLattice::new(spec);
    let mut raw = SpectralField::zeros(spec);
    for flat in 0..spec.total_points() {
        let k = lat.k_mag(flat);
        if flat == 0 || k < kmin || k > kmax {
            continue;
        }
        let re = rng.random_range(-1.0..1.0);
        let im = rng.random_range(-1.0..1.0);
        raw.data_mut()[flat] = Complex64::new(re, im);
    }
    // symmetrize: F(k) <- (F(k) + conj(F(-k)))/2
    let mut out = SpectralField::zeros(spec);
    for flat in 0..spec.total_points() {
        let conj = lat.conjugate_index(flat);
        out.data_mut()[flat] = 0.5 * (raw.data()[flat] + raw.data()[conj].conj());
    }
    let norm = out.l2_norm();
    if norm > 0.0 {
        out = out.scale(amplitude / norm);
    }
    out
}

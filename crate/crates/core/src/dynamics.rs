//! State representation and right-hand side of the first-order system
//!
//! ```text
//! u_t = v
//! v_t = w
//! tau w_t = Lap u + beta Lap v - alpha w + (B/A) v w + 2 grad u . grad v
//! ```
//!
//! with `v = u_t`, `w = u_tt` and sound speed normalized to 1. Quadratic
//! products are formed in physical space after 2/3-rule truncation, which
//! makes the discrete product equal to the exact coefficient convolution
//! for band-limited factors.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{check_same_grid, forward_transform, inverse_transform, RealField, SpectralField};
use crate::grid::GridSpec;
use crate::spectral::{gradient, lambda_power, laplacian, ZeroMode};

/// Physical parameters of the model; the sound speed is normalized to 1
/// throughout (lengths and times are expressed in acoustic units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    /// Relaxation time, > 0.
    pub tau: f64,
    /// Sound diffusivity, > 0.
    pub beta: f64,
    /// Damping coefficient of the linearized equation. Fixed at 1 in the
    /// evolution system; adjustable for per-mode analysis only.
    pub alpha: f64,
    /// Nonlinearity parameter B/A (>= 0). Water-like default 5.
    pub b_over_a: f64,
}

impl Params {
    /// Standard parameters in the dissipative regime `0 < tau < beta`.
    pub fn new(tau: f64, beta: f64) -> Result<Self> {
        let p = Params {
            tau,
            beta,
            alpha: 1.0,
            b_over_a: 5.0,
        };
        p.validate(false)?;
        Ok(p)
    }

    pub fn with_b_over_a(mut self, b_over_a: f64) -> Result<Self> {
        if b_over_a < 0.0 {
            return Err(Error::config(format!("B/A must be >= 0, got {b_over_a}")));
        }
        self.b_over_a = b_over_a;
        Ok(self)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    /// Unchecked constructor for instability studies (`tau >= beta`
    /// allowed); positivity of `tau`, `beta` is still enforced.
    pub fn new_unstable_allowed(tau: f64, beta: f64) -> Result<Self> {
        let p = Params {
            tau,
            beta,
            alpha: 1.0,
            b_over_a: 5.0,
        };
        p.validate(true)?;
        Ok(p)
    }

    fn validate(&self, allow_unstable: bool) -> Result<()> {
        if !(self.tau > 0.0) {
            return Err(Error::domain(format!(
                "relaxation time must be positive, got {}; the tau = 0 limit degenerates the system order",
                self.tau
            )));
        }
        if !(self.beta > 0.0) {
            return Err(Error::domain(format!("diffusivity must be positive, got {}", self.beta)));
        }
        // dissipativity alpha - tau c^2 / beta > 0, i.e. alpha beta > tau
        if !allow_unstable && self.alpha * self.beta <= self.tau {
            return Err(Error::domain(format!(
                "dissipativity requires tau < alpha*beta (tau = {}, beta = {}, alpha = {}); \
                 use the unstable-allowed constructor for instability experiments",
                self.tau, self.beta, self.alpha
            )));
        }
        Ok(())
    }

    pub fn is_dissipative(&self) -> bool {
        self.tau > 0.0 && self.alpha * self.beta > self.tau
    }
}

/// Real-space solution triple `(u, v, w) = (u, u_t, u_tt)`.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub u: RealField,
    pub v: RealField,
    pub w: RealField,
}

impl StateVector {
    pub fn new(u: RealField, v: RealField, w: RealField) -> Result<Self> {
        check_same_grid(u.spec(), v.spec())?;
        check_same_grid(u.spec(), w.spec())?;
        Ok(StateVector { u, v, w })
    }

    pub fn zeros(spec: &GridSpec) -> Self {
        StateVector {
            u: RealField::zeros(spec),
            v: RealField::zeros(spec),
            w: RealField::zeros(spec),
        }
    }

    pub fn spec(&self) -> &GridSpec {
        self.u.spec()
    }

    pub fn to_spectral(&self) -> SpectralState {
        SpectralState {
            u: forward_transform(&self.u),
            v: forward_transform(&self.v),
            w: forward_transform(&self.w),
        }
    }
}

/// Spectral-side solution triple; the working representation of the
/// evaluators and steppers.
#[derive(Debug, Clone)]
pub struct SpectralState {
    pub u: SpectralField,
    pub v: SpectralField,
    pub w: SpectralField,
}

impl SpectralState {
    pub fn zeros(spec: &GridSpec) -> Self {
        SpectralState {
            u: SpectralField::zeros(spec),
            v: SpectralField::zeros(spec),
            w: SpectralField::zeros(spec),
        }
    }

    pub fn spec(&self) -> &GridSpec {
        self.u.spec()
    }

    pub fn to_real(&self) -> StateVector {
        StateVector {
            u: inverse_transform(&self.u),
            v: inverse_transform(&self.v),
            w: inverse_transform(&self.w),
        }
    }

    pub fn scale(&self, s: f64) -> SpectralState {
        SpectralState {
            u: self.u.scale(s),
            v: self.v.scale(s),
            w: self.w.scale(s),
        }
    }

    pub fn add(&self, other: &SpectralState) -> Result<SpectralState> {
        Ok(SpectralState {
            u: self.u.add(&other.u)?,
            v: self.v.add(&other.v)?,
            w: self.w.add(&other.w)?,
        })
    }

    pub fn axpy(&self, a: f64, other: &SpectralState) -> Result<SpectralState> {
        Ok(SpectralState {
            u: self.u.add(&other.u.scale(a))?,
            v: self.v.add(&other.v.scale(a))?,
            w: self.w.add(&other.w.scale(a))?,
        })
    }

    pub fn l2_norm(&self) -> f64 {
        (self.u.l2_norm().powi(2) + self.v.l2_norm().powi(2) + self.w.l2_norm().powi(2)).sqrt()
    }
}

/// 2/3-rule truncation applied in place.
pub fn dealias(f: &mut SpectralField) {
    let spec = *f.spec();
    let keep = spec.axis_keep_flags();
    let dim = spec.dim();
    let data = f.data_mut();
    spec.for_each_index(|flat, idx| {
        let kept = keep[idx[0]]
            && (dim < 2 || keep[idx[1]])
            && (dim < 3 || keep[idx[2]]);
        if !kept {
            data[flat] = Complex64::default();
        }
    });
}

/// Dealiased spectral product: both factors are truncated, multiplied on
/// the grid, and the result is truncated again.
pub fn spectral_product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    check_same_grid(a.spec(), b.spec())?;
    let mut at = a.clone();
    let mut bt = b.clone();
    dealias(&mut at);
    dealias(&mut bt);
    let pa = inverse_transform(&at);
    let pb = inverse_transform(&bt);
    let prod = pa.mul(&pb)?;
    let mut out = forward_transform(&prod);
    dealias(&mut out);
    Ok(out)
}

/// The quadratic nonlinearity `N(U) = (B/A) v w + 2 grad u . grad v`,
/// dealiased, as a spectral field.
///
/// All products accumulate on the grid and one forward transform closes
/// the evaluation: 9 transforms per call, the dominant cost of a
/// nonlinear step.
pub fn nonlinear_term(state: &SpectralState, p: &Params) -> Result<SpectralField> {
    let spec = *state.spec();
    let mut ut = state.u.clone();
    let mut vt = state.v.clone();
    let mut wt = state.w.clone();
    dealias(&mut ut);
    dealias(&mut vt);
    dealias(&mut wt);

    let v_phys = inverse_transform(&vt);
    let w_phys = inverse_transform(&wt);
    let mut acc: Vec<f64> = v_phys
        .data()
        .iter()
        .zip(w_phys.data())
        .map(|(v, w)| p.b_over_a * v * w)
        .collect();
    let gu = gradient(&ut);
    let gv = gradient(&vt);
    for a in 0..spec.dim() {
        let du = inverse_transform(&gu[a]);
        let dv = inverse_transform(&gv[a]);
        for ((slot, x), y) in acc.iter_mut().zip(du.data()).zip(dv.data()) {
            *slot += 2.0 * x * y;
        }
    }
    let mut out = forward_transform(&RealField::from_data(&spec, acc)?);
    dealias(&mut out);
    Ok(out)
}

/// Largest derivative order before `|xi|^k` amplification of the retained
/// band exhausts the f64 dynamic range on desk-scale grids.
pub const MAX_DERIVATIVE_ORDER: u32 = 32;

/// `R^(k)`: the k-th order derivative of the nonlinearity, realized as the
/// `|xi|^k` multiplier of [`nonlinear_term`], returned in physical space.
/// Its `L^2` norm matches the multi-index gradient norm convention.
pub fn nonlinear_term_k(state: &SpectralState, p: &Params, k: u32) -> Result<RealField> {
    if k > MAX_DERIVATIVE_ORDER {
        return Err(Error::config(format!(
            "derivative order {k} exceeds the resolution budget ({MAX_DERIVATIVE_ORDER})"
        )));
    }
    let n = nonlinear_term(state, p)?;
    let nk = lambda_power(&n, k as f64, ZeroMode::Project)?;
    Ok(inverse_transform(&nk))
}

/// Right-hand side of the first-order system. With `nonlinear` off the
/// quadratic term is dropped.
pub fn rhs(state: &SpectralState, p: &Params, nonlinear: bool) -> Result<SpectralState> {
    if !(p.tau > 0.0) {
        return Err(Error::domain(
            "tau must be positive; the tau = 0 limit is out of scope",
        ));
    }
    if p.alpha != 1.0 {
        return Err(Error::config(format!(
            "the evolution system fixes alpha = 1 (got {}); general alpha is for per-mode analysis",
            p.alpha
        )));
    }
    let lap_u = laplacian(&state.u);
    let lap_v = laplacian(&state.v);
    let mut wt = lap_u.add(&lap_v.scale(p.beta))?.sub(&state.w)?;
    if nonlinear {
        let n = nonlinear_term(state, p)?;
        wt = wt.add(&n)?;
    }
    Ok(SpectralState {
        u: state.v.clone(),
        v: state.w.clone(),
        w: wt.scale(1.0 / p.tau),
    })
}

/// The derived vector `V = (v + tau w, grad(u + tau v), grad v)` whose
/// `L^2` norm the decay statements bound; `1 + dim + dim` scalar fields.
#[derive(Debug, Clone)]
pub struct VVector {
    pub components: Vec<SpectralField>,
}

/// Assemble `V` from a state.
pub fn compute_v(state: &SpectralState, p: &Params) -> Result<VVector> {
    let mut components = Vec::with_capacity(1 + 2 * state.spec().dim());
    components.push(state.v.add(&state.w.scale(p.tau))?);
    let u_tau_v = state.u.add(&state.v.scale(p.tau))?;
    components.extend(gradient(&u_tau_v));
    components.extend(gradient(&state.v));
    Ok(VVector { components })
}

impl VVector {
    pub fn l2_norm(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.l2_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// `|| grad^ell V ||_{L^2}` under the `|xi|^ell` aggregation convention:
/// the root of the sum of the squared component norms.
pub fn v_norm(state: &SpectralState, p: &Params, ell: u32) -> Result<f64> {
    let v = compute_v(state, p)?;
    let mut sum = 0.0;
    for c in &v.components {
        let g = lambda_power(c, ell as f64, ZeroMode::Project)?;
        sum += g.l2_norm().powi(2);
    }
    Ok(sum.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random_band_field;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid2() -> GridSpec {
        GridSpec::new(2, 16, 2.0 * std::f64::consts::PI).unwrap()
    }

    fn params() -> Params {
        Params::new(0.5, 1.0).unwrap()
    }

    fn random_state(spec: &GridSpec, amp: f64, seed: u64) -> SpectralState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let band = spec.nyquist() * 0.3;
        SpectralState {
            u: random_band_field(spec, 0.5, band, amp, &mut rng),
            v: random_band_field(spec, 0.5, band, amp, &mut rng),
            w: random_band_field(spec, 0.5, band, amp, &mut rng),
        }
    }

    #[test]
    fn params_enforce_dissipativity_by_default() {
        assert!(Params::new(0.5, 1.0).is_ok());
        assert!(Params::new(1.0, 0.5).is_err());
        assert!(Params::new(1.0, 1.0).is_err());
        assert!(Params::new(0.0, 1.0).is_err());
        assert!(Params::new_unstable_allowed(1.0, 0.5).is_ok());
        assert!(Params::new_unstable_allowed(0.0, 0.5).is_err());
    }

    #[test]
    fn zero_state_has_zero_tendency() {
        let spec = grid2();
        let s = SpectralState::zeros(&spec);
        let t = rhs(&s, &params(), true).unwrap();
        assert_eq!(t.l2_norm(), 0.0);
    }

    #[test]
    fn single_mode_linear_w_tendency() {
        // u-only mode with |xi| = 1, tau = 0.5: w-tendency = -|xi|^2 u / tau = -2 u
        let spec = grid2();
        let p = params();
        let s = SpectralState {
            u: SpectralField::single_mode(&spec, [1, 0, 0], 1.0).unwrap(),
            v: SpectralField::zeros(&spec),
            w: SpectralField::zeros(&spec),
        };
        let t = rhs(&s, &p, false).unwrap();
        assert!(t.u.l2_norm() < 1e-15);
        assert!(t.v.l2_norm() < 1e-15);
        let expect = s.u.scale(-2.0);
        assert!(t.w.sub(&expect).unwrap().l2_norm() < 1e-13);
    }

    /// O(n^2) coefficient-convolution oracle for the dealiased product.
    fn convolution_oracle(a: &SpectralField, b: &SpectralField) -> SpectralField {
        let spec = *a.spec();
        let n = spec.points_per_axis() as i64;
        let total = spec.total_points();
        // unnormalized series coefficients c_k = F_k / L^{d/2}
        let norm = spec.len().powf(spec.dim() as f64 / 2.0);
        let mut out = SpectralField::zeros(&spec);
        let wrap = |m: i64| -> Option<usize> {
            // representable signed modes only
            if m < -n / 2 + 1 || m > n / 2 {
                None
            } else {
                Some(if m >= 0 { m } else { m + n } as usize)
            }
        };
        let signed = |i: usize| spec.mode_index(i);
        for ka in 0..total {
            let ia = spec.unravel(ka);
            if a.data()[ka].norm() == 0.0 {
                continue;
            }
            for kb in 0..total {
                if b.data()[kb].norm() == 0.0 {
                    continue;
                }
                let ib = spec.unravel(kb);
                let mut target = Some(0usize);
                for ax in 0..spec.dim() {
                    let m = signed(ia[ax]) + signed(ib[ax]);
                    target = match (target, wrap(m)) {
                        (Some(t), Some(i)) => Some(t * (n as usize) + i),
                        _ => None,
                    };
                }
                if let Some(t) = target {
                    out.data_mut()[t] += a.data()[ka] * b.data()[kb] / norm;
                }
            }
        }
        out
    }

    #[test]
    fn dealiased_product_matches_direct_convolution() {
        let spec = GridSpec::new(3, 8, 2.0 * std::f64::consts::PI).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // factors band-limited within the 2/3 sphere (limit = 2 for n = 8)
        let a = random_band_field(&spec, 0.5, 2.0, 1.0, &mut rng);
        let b = random_band_field(&spec, 0.5, 2.0, 1.0, &mut rng);
        let got = spectral_product(&a, &b).unwrap();
        let mut oracle = convolution_oracle(&a, &b);
        dealias(&mut oracle);
        let err = got.sub(&oracle).unwrap().l2_norm();
        assert!(err <= 1e-12 * oracle.l2_norm(), "err = {err}");
    }

    #[test]
    fn nonlinear_term_k_zero_equals_nonlinearity() {
        let spec = grid2();
        let p = params();
        let s = random_state(&spec, 0.3, 9);
        let n = nonlinear_term(&s, &p).unwrap();
        let r0 = nonlinear_term_k(&s, &p, 0).unwrap();
        let back = forward_transform(&r0);
        assert!(back.sub(&n).unwrap().l2_norm() <= 1e-12 * n.l2_norm());
    }

    #[test]
    fn nonlinear_term_k1_matches_finite_difference_gradient() {
        // 1D fine grid; 4th-order central differences as the oracle
        let spec = GridSpec::new(1, 512, 2.0 * std::f64::consts::PI).unwrap();
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = SpectralState {
            u: random_band_field(&spec, 0.5, 3.0, 1.0, &mut rng),
            v: random_band_field(&spec, 0.5, 3.0, 1.0, &mut rng),
            w: random_band_field(&spec, 0.5, 3.0, 1.0, &mut rng),
        };
        let n_phys = inverse_transform(&nonlinear_term(&s, &p).unwrap());
        let h = spec.dx();
        let data = n_phys.data();
        let len = data.len();
        let mut fd = vec![0.0; len];
        for (i, slot) in fd.iter_mut().enumerate() {
            let at = |o: i64| data[((i as i64 + o).rem_euclid(len as i64)) as usize];
            *slot = (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h);
        }
        let fd_norm = (fd.iter().map(|v| v * v).sum::<f64>() * spec.cell_volume()).sqrt();
        let r1 = nonlinear_term_k(&s, &p, 1).unwrap();
        let r1_norm = (r1.data().iter().map(|v| v * v).sum::<f64>() * spec.cell_volume()).sqrt();
        let rel = (fd_norm - r1_norm).abs() / r1_norm;
        assert!(rel <= 1e-6, "rel = {rel}");
    }

    #[test]
    fn v_vector_single_mode_norm() {
        // v-only mode, |xi| = 1, amplitude 1, tau = 0.5:
        // ||V||^2 = 1 + tau^2 + 1 = 2.25
        let spec = grid2();
        let p = params();
        let s = SpectralState {
            u: SpectralField::zeros(&spec),
            v: SpectralField::single_mode(&spec, [1, 0, 0], 1.0).unwrap(),
            w: SpectralField::zeros(&spec),
        };
        let v = compute_v(&s, &p).unwrap();
        assert!((v.l2_norm() - 1.5).abs() < 1e-13);
        assert!((v_norm(&s, &p, 0).unwrap() - 1.5).abs() < 1e-13);
        let zero = SpectralState::zeros(&spec);
        assert_eq!(v_norm(&zero, &p, 0).unwrap(), 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn linear_rhs_is_additive_and_homogeneous(seed in 0u64..500, a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let spec = GridSpec::new(2, 8, 4.0).unwrap();
            let p = params();
            let s1 = random_state(&spec, 1.0, seed);
            let s2 = random_state(&spec, 1.0, seed + 1000);
            let combo = s1.scale(a).add(&s2.scale(b)).unwrap();
            let lhs = rhs(&combo, &p, false).unwrap();
            let rhs1 = rhs(&s1, &p, false).unwrap();
            let rhs2 = rhs(&s2, &p, false).unwrap();
            let expect = rhs1.scale(a).add(&rhs2.scale(b)).unwrap();
            let err = lhs.axpy(-1.0, &expect).unwrap().l2_norm();
            prop_assert!(err <= 1e-12 * (1.0 + expect.l2_norm()));
        }

        #[test]
        fn nonlinearity_is_quadratic_in_the_state(seed in 0u64..500, lam in 0.1f64..3.0) {
            let spec = GridSpec::new(2, 8, 4.0).unwrap();
            let p = params();
            let s = random_state(&spec, 0.5, seed);
            let n1 = nonlinear_term(&s.scale(lam), &p).unwrap();
            let n2 = nonlinear_term(&s, &p).unwrap().scale(lam * lam);
            let err = n1.sub(&n2).unwrap().l2_norm();
            prop_assert!(err <= 1e-11 * (1.0 + n2.l2_norm()));
        }
    }
}

//! The energy / dissipation functional ladder and the nonlinear-estimate
//! quantities.
//!
//! All evaluators are fused single passes over the wavenumber lattice. The
//! order-k gradient follows the multi-index convention with multinomial
//! weights, so every `||grad^k f||^2` is the Parseval sum of
//! `|xi|^{2k} |fhat|^2` and the inner products pairing two order-k
//! gradients carry the weight `|xi|^{2k}`.
//!
//! Per mode, writing `a = vhat + tau what`, `b = uhat + tau vhat` and
//! `x2 = |xi|^2`, the order-k instantaneous energy is
//!
//! ```text
//! e_k = sum_xi x2^k [ (1+x2)|a|^2 + (x2^2+x2)(|vhat|^2+|b|^2) + |what|^2 ]
//! ```
//!
//! and the dissipation integrand is
//!
//! ```text
//! d_k = sum_xi x2^k [ (x2+x2^2)|vhat|^2 + x2^2 |b|^2 + x2 |a|^2 + |what|^2 ].
//! ```

use crate::dynamics::{nonlinear_term, Params, SpectralState};
use crate::error::{Error, Result};
use crate::field::inverse_transform;
use crate::grid::WavenumberLattice;
use crate::linalg::{generalized_sym_eigs, Mat3};
use crate::spectral::gradient;

/// Per-mode squared magnitudes entering every functional.
#[inline]
fn mode_parts(state: &SpectralState, p: &Params, flat: usize) -> (f64, f64, f64, f64) {
    let u = state.u.data()[flat];
    let v = state.v.data()[flat];
    let w = state.w.data()[flat];
    let a = v + w * p.tau;
    let b = u + v * p.tau;
    (a.norm_sqr(), v.norm_sqr(), b.norm_sqr(), w.norm_sqr())
}

/// Instantaneous order-k energy (squared).
pub fn instantaneous_energy_sq(state: &SpectralState, p: &Params, k: u32) -> f64 {
    let lat = WavenumberLattice::new(state.spec());
    let mut acc = 0.0;
    for flat in 0..state.spec().total_points() {
        let x2 = lat.k_sq(flat);
        let (a2, v2, b2, w2) = mode_parts(state, p, flat);
        acc += x2.powi(k as i32) * ((1.0 + x2) * a2 + (x2 * x2 + x2) * (v2 + b2) + w2);
    }
    acc
}

/// Instantaneous order-k dissipation integrand (squared).
pub fn dissipation_integrand_sq(state: &SpectralState, p: &Params, k: u32) -> f64 {
    let lat = WavenumberLattice::new(state.spec());
    let mut acc = 0.0;
    for flat in 0..state.spec().total_points() {
        let x2 = lat.k_sq(flat);
        let (a2, v2, b2, w2) = mode_parts(state, p, flat);
        acc += x2.powi(k as i32) * ((x2 + x2 * x2) * v2 + x2 * x2 * b2 + x2 * a2 + w2);
    }
    acc
}

/// Negative-order energy (squared): every gradient weight replaced by
/// `|xi|^{-2 gamma}`; the zero mode is projected out (torus artifact).
pub fn negative_energy_sq(state: &SpectralState, p: &Params, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let lat = WavenumberLattice::new(state.spec());
    let mut acc = 0.0;
    for flat in 1..state.spec().total_points() {
        let x2 = lat.k_sq(flat);
        let (a2, v2, b2, w2) = mode_parts(state, p, flat);
        acc += x2.powf(-gamma) * ((1.0 + x2) * a2 + (x2 * x2 + x2) * (v2 + b2) + w2);
    }
    Ok(acc)
}

/// Negative-order dissipation integrand (squared), zero mode projected out.
pub fn negative_dissipation_integrand_sq(
    state: &SpectralState,
    p: &Params,
    gamma: f64,
) -> Result<f64> {
    check_gamma(gamma)?;
    let lat = WavenumberLattice::new(state.spec());
    let mut acc = 0.0;
    for flat in 1..state.spec().total_points() {
        let x2 = lat.k_sq(flat);
        let (a2, v2, b2, w2) = mode_parts(state, p, flat);
        acc += x2.powf(-gamma) * ((x2 + x2 * x2) * v2 + x2 * x2 * b2 + x2 * a2 + w2);
    }
    Ok(acc)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0) {
        return Err(Error::config(format!(
            "negative-order functionals need gamma > 0 (got {gamma}); use the standard energies"
        )));
    }
    Ok(())
}

/// Ratio of the order-k energy to the V-side expression
/// `||grad^k V||^2 + ||grad^{k+1} V||^2 + ||w||^2`.
///
/// At `k = 0` the two sides agree identically under the spectral gradient
/// convention, so the ratio is exactly 1.
pub fn equivalence_ratio(state: &SpectralState, p: &Params, k: u32) -> Result<f64> {
    let num = instantaneous_energy_sq(state, p, k);
    let den = v_side_sq(state, p, k);
    if den == 0.0 {
        return Err(Error::domain("equivalence ratio of the zero state"));
    }
    Ok(num / den)
}

fn v_side_sq(state: &SpectralState, p: &Params, k: u32) -> f64 {
    let lat = WavenumberLattice::new(state.spec());
    let mut acc = 0.0;
    for flat in 0..state.spec().total_points() {
        let x2 = lat.k_sq(flat);
        let (a2, v2, b2, w2) = mode_parts(state, p, flat);
        let vhat_sq = a2 + x2 * (v2 + b2);
        acc += x2.powi(k as i32) * (1.0 + x2) * vhat_sq + w2;
    }
    acc
}

/// Per-mode eigenvalue bounds `[c1, c2]` of the equivalence ratio over the
/// given lattice: generalized eigenvalues of the two quadratic forms at
/// every distinct |xi| > 0. Field-level ratios are convex combinations of
/// per-mode Rayleigh quotients, hence lie in `[c1, c2]`.
pub fn equivalence_bounds(p: &Params, lat: &WavenumberLattice, k: u32) -> (f64, f64) {
    let a_vec = [0.0, 1.0, p.tau];
    let b_vec = [1.0, p.tau, 0.0];
    let e_v = [0.0, 1.0, 0.0];
    let e_w = [0.0, 0.0, 1.0];
    let outer = |x: [f64; 3], s: f64| -> Mat3 {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                m.m[i][j] = s * x[i] * x[j];
            }
        }
        m
    };
    let mut seen = std::collections::HashSet::new();
    let (mut c1, mut c2) = (f64::INFINITY, f64::NEG_INFINITY);
    for flat in 0..lat.spec().total_points() {
        let x2 = lat.k_sq(flat);
        if x2 == 0.0 || !seen.insert(x2.to_bits()) {
            continue;
        }
        let xk = x2.powi(k as i32);
        let num = outer(a_vec, xk * (1.0 + x2))
            .add(&outer(e_v, xk * (x2 * x2 + x2)))
            .add(&outer(b_vec, xk * (x2 * x2 + x2)))
            .add(&outer(e_w, xk));
        let den = outer(a_vec, xk * (1.0 + x2))
            .add(&outer(e_v, xk * (1.0 + x2) * x2))
            .add(&outer(b_vec, xk * (1.0 + x2) * x2))
            .add(&outer(e_w, 1.0));
        let eigs = generalized_sym_eigs(&num, &den);
        c1 = c1.min(eigs[0]);
        c2 = c2.max(eigs[2]);
    }
    (c1, c2)
}

/// The five nonlinear-estimate integrals at order `k >= 1`, as absolute
/// values. With `(U, V, W) = (grad^k u, grad^k v, grad^k w)` and `R^(k)`
/// the order-k derivative of the nonlinearity:
///
/// ```text
/// I1 = |Int R^(k) (V + tau W)|        I2 = |Int grad R^(k) . grad(V + tau W)|
/// I3 = |Int R^(k) Lap(U + tau V)|     I4 = |Int grad R^(k) . grad V|
/// I5 = |Int R^(k) W|
/// ```
///
/// evaluated as `|xi|^{2k}`-weighted spectral inner products, which equal
/// the grid quadrature of the gradient pairings by Parseval.
pub fn i_terms(state: &SpectralState, p: &Params, k: u32) -> Result<[f64; 5]> {
    if k == 0 {
        return Err(Error::config("the estimate ladder starts at k = 1"));
    }
    let n = nonlinear_term(state, p)?;
    let lat = WavenumberLattice::new(state.spec());
    let mut sums = [0.0f64; 5];
    for flat in 0..state.spec().total_points() {
        let x2 = lat.k_sq(flat);
        let xk = x2.powi(k as i32);
        let nh = n.data()[flat];
        let u = state.u.data()[flat];
        let v = state.v.data()[flat];
        let w = state.w.data()[flat];
        let a = v + w * p.tau;
        let b = u + v * p.tau;
        let pair_a = (nh * a.conj()).re;
        sums[0] += xk * pair_a;
        sums[1] += xk * x2 * pair_a;
        sums[2] += -xk * x2 * (nh * b.conj()).re;
        sums[3] += xk * x2 * (nh * v.conj()).re;
        sums[4] += xk * (nh * w.conj()).re;
    }
    Ok(sums.map(f64::abs))
}

/// Instantaneous sup-norm bundle
/// `||v||_inf + ||v+tau w||_inf + ||grad(u+tau v)||_inf + ||grad u||_inf + ||grad v||_inf`
/// on the grid; the running sup over time is kept by [`EnergyTracker`].
pub fn m0_bundle(state: &SpectralState, p: &Params) -> Result<f64> {
    let v_phys = inverse_transform(&state.v);
    let a = state.v.add(&state.w.scale(p.tau))?;
    let a_phys = inverse_transform(&a);
    let b = state.u.add(&state.v.scale(p.tau))?;
    let grad_sup = |f: &crate::field::SpectralField| -> f64 {
        let comps: Vec<_> = gradient(f).iter().map(inverse_transform).collect();
        let total = f.spec().total_points();
        let mut best = 0.0f64;
        for i in 0..total {
            let mag: f64 = comps.iter().map(|c| c.data()[i] * c.data()[i]).sum();
            best = best.max(mag);
        }
        best.sqrt()
    };
    Ok(v_phys.max_abs() + a_phys.max_abs() + grad_sup(&b) + grad_sup(&state.u) + grad_sup(&state.v))
}

/// One observation row of the functional ladder.
#[derive(Debug, Clone)]
pub struct EnergyRow {
    pub t: f64,
    /// Instantaneous squared energies, order 0..=k_max.
    pub e_k_sq: Vec<f64>,
    /// Running sups of `e_k_sq` (the energies proper).
    pub sup_e_k_sq: Vec<f64>,
    /// Instantaneous squared dissipation integrands.
    pub diss_k_sq: Vec<f64>,
    /// Trapezoid-accumulated dissipation integrals.
    pub acc_d_k_sq: Vec<f64>,
    /// Sums over k of the running sups / accumulated integrals.
    pub e_s_sq: f64,
    pub d_s_sq: f64,
    pub e_neg_sq: Option<f64>,
    pub sup_e_neg_sq: Option<f64>,
    pub diss_neg_sq: Option<f64>,
    pub acc_d_neg_sq: Option<f64>,
    /// Running sup-norm bundle.
    pub m0: f64,
    pub i_terms: Option<[f64; 5]>,
}

/// Trajectory observer maintaining running sups and trapezoid-accumulated
/// dissipation integrals at the observation stride.
pub struct EnergyTracker {
    p: Params,
    k_max: u32,
    gamma: Option<f64>,
    i_term_order: Option<u32>,
    rows: Vec<EnergyRow>,
    sup_e: Vec<f64>,
    acc_d: Vec<f64>,
    last: Option<(f64, Vec<f64>, Option<f64>)>,
    sup_neg: f64,
    acc_neg: f64,
    m0: f64,
    error: Option<Error>,
}

impl EnergyTracker {
    pub fn new(p: &Params, k_max: u32, gamma: Option<f64>, i_term_order: Option<u32>) -> Self {
        EnergyTracker {
            p: *p,
            k_max,
            gamma,
            i_term_order,
            rows: Vec::new(),
            sup_e: vec![0.0; (k_max + 1) as usize],
            acc_d: vec![0.0; (k_max + 1) as usize],
            last: None,
            sup_neg: 0.0,
            acc_neg: 0.0,
            m0: 0.0,
            error: None,
        }
    }

    pub fn observe(&mut self, t: f64, state: &SpectralState) {
        if self.error.is_some() {
            return;
        }
        match self.observe_inner(t, state) {
            Ok(row) => self.rows.push(row),
            Err(e) => self.error = Some(e),
        }
    }

    fn observe_inner(&mut self, t: f64, state: &SpectralState) -> Result<EnergyRow> {
        let ks = (self.k_max + 1) as usize;
        let mut e_k_sq = Vec::with_capacity(ks);
        let mut diss_k_sq = Vec::with_capacity(ks);
        for k in 0..=self.k_max {
            e_k_sq.push(instantaneous_energy_sq(state, &self.p, k));
            diss_k_sq.push(dissipation_integrand_sq(state, &self.p, k));
        }
        let neg = match self.gamma {
            Some(g) => Some((
                negative_energy_sq(state, &self.p, g)?,
                negative_dissipation_integrand_sq(state, &self.p, g)?,
            )),
            None => None,
        };

        for (sup, &e) in self.sup_e.iter_mut().zip(&e_k_sq) {
            *sup = sup.max(e);
        }
        if let Some((e, _)) = neg {
            self.sup_neg = self.sup_neg.max(e);
        }
        if let Some((t0, d0, dneg0)) = &self.last {
            let dt = t - t0;
            for (acc, (a, b)) in self.acc_d.iter_mut().zip(d0.iter().zip(&diss_k_sq)) {
                *acc += 0.5 * dt * (a + b);
            }
            if let (Some((_, d)), Some(prev)) = (&neg, dneg0) {
                self.acc_neg += 0.5 * dt * (prev + d);
            }
        }
        self.m0 = self.m0.max(m0_bundle(state, &self.p)?);
        self.last = Some((t, diss_k_sq.clone(), neg.map(|(_, d)| d)));

        let i = match self.i_term_order {
            Some(k) => Some(i_terms(state, &self.p, k)?),
            None => None,
        };
        Ok(EnergyRow {
            t,
            e_k_sq,
            sup_e_k_sq: self.sup_e.clone(),
            diss_k_sq,
            acc_d_k_sq: self.acc_d.clone(),
            e_s_sq: self.sup_e.iter().sum(),
            d_s_sq: self.acc_d.iter().sum(),
            e_neg_sq: neg.map(|(e, _)| e),
            sup_e_neg_sq: self.gamma.map(|_| self.sup_neg),
            diss_neg_sq: neg.map(|(_, d)| d),
            acc_d_neg_sq: self.gamma.map(|_| self.acc_neg),
            m0: self.m0,
            i_terms: i,
        })
    }

    pub fn finish(self) -> Result<Vec<EnergyRow>> {
        match self.error {
            Some(e) => Err(e),
            None => Ok(self.rows),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::SpectralField;
    use crate::grid::GridSpec;
    use crate::spectral::{homogeneous_norm, random_band_field, ZeroMode};
    use crate::stepping::{evolve, Scheme, StepperConfig};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid() -> GridSpec {
        GridSpec::new(2, 16, 2.0 * std::f64::consts::PI).unwrap()
    }

    fn params() -> Params {
        Params::new(0.5, 1.0).unwrap()
    }

    fn random_state(spec: &GridSpec, amp: f64, seed: u64) -> SpectralState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let band = spec.nyquist() * 0.4;
        SpectralState {
            u: random_band_field(spec, 0.5, band, amp, &mut rng),
            v: random_band_field(spec, 0.5, band, amp, &mut rng),
            w: random_band_field(spec, 0.5, band, amp, &mut rng),
        }
    }

    #[test]
    fn zero_state_has_zero_functionals() {
        let spec = grid();
        let p = params();
        let s = SpectralState::zeros(&spec);
        assert_eq!(instantaneous_energy_sq(&s, &p, 0), 0.0);
        assert_eq!(dissipation_integrand_sq(&s, &p, 2), 0.0);
        assert_eq!(negative_energy_sq(&s, &p, 1.0).unwrap(), 0.0);
        assert_eq!(m0_bundle(&s, &p).unwrap(), 0.0);
        assert!(equivalence_ratio(&s, &p, 0).is_err());
    }

    #[test]
    fn u_only_single_mode_energy_is_two() {
        // |xi| = 1, unit amplitude, k = 0: only the Lap(u+tau v) and
        // grad(u+tau v) terms contribute, 1 + 1 = 2
        let spec = grid();
        let p = params();
        let s = SpectralState {
            u: SpectralField::single_mode(&spec, [1, 0, 0], 1.0).unwrap(),
            v: SpectralField::zeros(&spec),
            w: SpectralField::zeros(&spec),
        };
        assert!((instantaneous_energy_sq(&s, &p, 0) - 2.0).abs() < 1e-13);
    }

    /// Compositional oracle: the six norms assembled from the public
    /// multiplier operators, independent of the fused lattice pass.
    fn energy_oracle(state: &SpectralState, p: &Params, k: u32) -> f64 {
        let a = state.v.add(&state.w.scale(p.tau)).unwrap();
        let b = state.u.add(&state.v.scale(p.tau)).unwrap();
        let gk = |f: &SpectralField, ord: f64| -> f64 {
            homogeneous_norm(f, ord, ZeroMode::Project).unwrap().powi(2)
        };
        let kf = k as f64;
        // gamma = 0 keeps the zero mode (identity), matching grad^0
        let h1 = gk(&a, kf) + gk(&a, kf + 1.0);
        let lap = |f: &SpectralField, ord: f64| -> f64 {
            let lap_f = crate::spectral::laplacian(f);
            gk(&lap_f, ord)
        };
        h1 + lap(&state.v, kf)
            + gk(&state.v, kf + 1.0)
            + lap(&b, kf)
            + gk(&b, kf + 1.0)
            + gk(&state.w, kf)
    }

    #[test]
    fn fused_energy_matches_compositional_oracle() {
        let spec = grid();
        let p = params();
        let s = random_state(&spec, 1.3, 4);
        for k in 0..=3u32 {
            let got = instantaneous_energy_sq(&s, &p, k);
            let oracle = energy_oracle(&s, &p, k);
            assert!(
                (got - oracle).abs() <= 1e-12 * oracle,
                "k = {k}: {got} vs {oracle}"
            );
        }
    }

    #[test]
    fn w_only_state_contributions() {
        // w-only: dissipation integrand = ||grad^k w||^2 plus the
        // (v + tau w) gradient term
        let spec = grid();
        let p = params();
        let s = SpectralState {
            u: SpectralField::zeros(&spec),
            v: SpectralField::zeros(&spec),
            w: SpectralField::single_mode(&spec, [2, 0, 0], 1.0).unwrap(),
        };
        // xi = 2: d_0 = |w|^2 + xi^2 tau^2 |w|^2 = 1 + 4 * 0.25 = 2
        let d0 = dissipation_integrand_sq(&s, &p, 0);
        assert!((d0 - 2.0).abs() < 1e-13);
    }

    #[test]
    fn gamma_to_zero_recovers_order_zero_energy() {
        let spec = grid();
        let p = params();
        let s = random_state(&spec, 1.0, 8); // zero-mean by construction
        let e0 = instantaneous_energy_sq(&s, &p, 0);
        let eg = negative_energy_sq(&s, &p, 1e-12).unwrap();
        assert!((e0 - eg).abs() <= 1e-9 * e0);
        assert!(negative_energy_sq(&s, &p, 0.0).is_err());
        assert!(negative_energy_sq(&s, &p, -1.0).is_err());
    }

    /// Radial-quadrature oracle for the negative energy of Gaussian u-data.
    #[test]
    fn gaussian_negative_energy_matches_radial_quadrature() {
        let spec = GridSpec::new(3, 64, 4.0 * std::f64::consts::PI).unwrap();
        let p = params();
        let sigma = 0.5;
        let l = spec.len();
        let f = crate::field::RealField::from_fn(&spec, |x| {
            let mut r2 = 0.0;
            for xi in x.iter() {
                let d = xi - l / 2.0;
                r2 += d * d;
            }
            (-r2 / (2.0 * sigma * sigma)).exp()
        });
        let s = SpectralState {
            u: crate::field::forward_transform(&f),
            v: SpectralField::zeros(&spec),
            w: SpectralField::zeros(&spec),
        };
        let gamma = 1.0;
        let got = negative_energy_sq(&s, &p, gamma).unwrap();
        // u-only: e_neg = Int xi^{-2g} (xi^4 + xi^2) |uhat|^2, with
        // |uhat(xi)| = sigma^3 e^{-sigma^2 xi^2 / 2} for sigma << L,
        // truncated below the volume-equivalent radius of the zero cell.
        let cell = 2.0 * std::f64::consts::PI / l;
        let xi0 = cell * (3.0 / (4.0 * std::f64::consts::PI)).powf(1.0 / 3.0);
        let integrand = |xi: f64| -> f64 {
            let fh2 = sigma.powi(6) * (-sigma * sigma * xi * xi).exp();
            4.0 * std::f64::consts::PI * xi * xi * xi.powf(-2.0 * gamma) * (xi.powi(4) + xi * xi) * fh2
        };
        let steps = 400_000;
        let ximax = 40.0;
        let h = (ximax - xi0) / steps as f64;
        let mut acc = integrand(xi0) + integrand(ximax);
        for i in 1..steps {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * integrand(xi0 + i as f64 * h);
        }
        let oracle = acc * h / 3.0;
        let rel = (got - oracle).abs() / oracle;
        assert!(rel < 0.02, "rel = {rel}");
    }

    #[test]
    fn equivalence_ratio_is_identity_at_order_zero() {
        let spec = grid();
        let p = params();
        for seed in 0..5 {
            let s = random_state(&spec, 0.9, 100 + seed);
            let r = equivalence_ratio(&s, &p, 0).unwrap();
            assert!((r - 1.0).abs() < 1e-12, "seed {seed}: ratio {r}");
        }
    }

    #[test]
    fn equivalence_ratio_v_only_mode_closed_form() {
        // v-only mode at |xi| = 2, k = 1: with a = v and b = tau v,
        //   e_1 = x2 [ (1+x2) + (x2^2+x2)(1+tau^2) ] |v|^2
        //   rhs = x2 (1+x2) (1 + x2(1+tau^2)) |v|^2   (w = 0)
        let spec = grid();
        let p = params();
        let s = SpectralState {
            u: SpectralField::zeros(&spec),
            v: SpectralField::single_mode(&spec, [2, 0, 0], 1.0).unwrap(),
            w: SpectralField::zeros(&spec),
        };
        let x2 = 4.0;
        let t2 = p.tau * p.tau;
        let num = x2 * ((1.0 + x2) + (x2 * x2 + x2) * (1.0 + t2));
        let den = x2 * (1.0 + x2) * (1.0 + x2 * (1.0 + t2));
        let expect = num / den;
        let got = equivalence_ratio(&s, &p, 1).unwrap();
        assert!((got - expect).abs() < 1e-13, "got {got}, expect {expect}");
    }

    #[test]
    fn equivalence_ratio_within_eigenvalue_bounds() {
        let spec = grid();
        let p = params();
        let lat = WavenumberLattice::new(&spec);
        for k in 1..=2u32 {
            let (c1, c2) = equivalence_bounds(&p, &lat, k);
            assert!(c1 > 0.0 && c2.is_finite() && c1 <= c2);
            for seed in 0..40 {
                let s = random_state(&spec, 1.0, 500 + seed);
                let r = equivalence_ratio(&s, &p, k).unwrap();
                assert!(
                    r >= c1 - 1e-9 && r <= c2 + 1e-9,
                    "k = {k}, seed {seed}: ratio {r} outside [{c1}, {c2}]"
                );
            }
        }
    }

    #[test]
    fn i_terms_vanish_for_linear_data() {
        let spec = grid();
        let p = Params::new(0.5, 1.0).unwrap().with_b_over_a(0.0).unwrap();
        // u = 0 kills grad u . grad v; B/A = 0 kills v w
        let s = SpectralState {
            u: SpectralField::zeros(&spec),
            v: random_state(&spec, 1.0, 3).v,
            w: random_state(&spec, 1.0, 4).w,
        };
        let i = i_terms(&s, &p, 1).unwrap();
        assert!(i.iter().all(|&v| v < 1e-14));
        let zero = SpectralState::zeros(&spec);
        assert!(i_terms(&zero, &params(), 1).unwrap().iter().all(|&v| v == 0.0));
        assert!(i_terms(&s, &p, 0).is_err());
    }

    #[test]
    fn i_term_ratios_scale_linearly_with_amplitude() {
        let spec = grid();
        let p = params();
        let base = random_state(&spec, 1.0, 12);
        let mut ratios = Vec::new();
        for lam in [1e-3, 1e-2] {
            let s = base.scale(lam);
            let i = i_terms(&s, &p, 1).unwrap();
            let d = dissipation_integrand_sq(&s, &p, 0) + dissipation_integrand_sq(&s, &p, 1);
            ratios.push(i[0] / d);
        }
        let slope = (ratios[1] / ratios[0]).log10();
        assert!((slope - 1.0).abs() < 0.05, "slope = {slope}");
    }

    #[test]
    fn m0_matches_naive_scan() {
        let spec = grid();
        let p = params();
        let s = random_state(&spec, 1.0, 6);
        let got = m0_bundle(&s, &p).unwrap();

        // naive oracle: same five quantities via raw loops over samples
        let v = inverse_transform(&s.v);
        let a = inverse_transform(&s.v.add(&s.w.scale(p.tau)).unwrap());
        let b = s.u.add(&s.v.scale(p.tau)).unwrap();
        let sup = |f: &crate::field::RealField| {
            let mut m = 0.0f64;
            for &x in f.data() {
                if x.abs() > m {
                    m = x.abs();
                }
            }
            m
        };
        let grad_mag_sup = |f: &SpectralField| {
            let comps: Vec<_> = gradient(f).iter().map(inverse_transform).collect();
            let mut m = 0.0f64;
            for i in 0..spec.total_points() {
                let s: f64 = comps.iter().map(|c| c.data()[i] * c.data()[i]).sum();
                if s.sqrt() > m {
                    m = s.sqrt();
                }
            }
            m
        };
        let oracle = sup(&v) + sup(&a) + grad_mag_sup(&b) + grad_mag_sup(&s.u) + grad_mag_sup(&s.v);
        assert!((got - oracle).abs() <= 1e-12 * oracle);
    }

    #[test]
    fn constant_v_only_m0() {
        // v constant a, w = 0: ||v||_inf + ||v + tau w||_inf = 2a, gradients zero
        let spec = grid();
        let p = params();
        let s = SpectralState {
            u: SpectralField::zeros(&spec),
            v: SpectralField::single_mode(&spec, [0, 0, 0], 1.0).unwrap(),
            w: SpectralField::zeros(&spec),
        };
        // constant field with unit L2 norm has grid value 1/L^{d/2}
        let a = 1.0 / spec.len().powf(spec.dim() as f64 / 2.0);
        let got = m0_bundle(&s, &p).unwrap();
        assert!((got - 2.0 * a).abs() < 1e-13);
    }

    #[test]
    fn tracker_sups_and_integrals_are_monotone() {
        let spec = GridSpec::new(2, 16, std::f64::consts::PI).unwrap();
        let p = params();
        let s0 = random_state(&spec, 1e-2, 5);
        let cfg = StepperConfig::new(Scheme::ExactLinear, 0.05, 4.0, 2).unwrap();
        let mut tracker = EnergyTracker::new(&p, 2, Some(1.0), None);
        evolve(&s0, &p, &cfg, false, |t, s| tracker.observe(t, s)).unwrap();
        let rows = tracker.finish().unwrap();
        assert!(rows.len() > 10);
        for pair in rows.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            for k in 0..=2 {
                assert!(b.sup_e_k_sq[k] >= a.sup_e_k_sq[k]);
                assert!(b.acc_d_k_sq[k] >= a.acc_d_k_sq[k]);
                assert!(b.e_k_sq[k] >= 0.0 && b.diss_k_sq[k] >= 0.0);
            }
            assert!(b.acc_d_neg_sq.unwrap() >= a.acc_d_neg_sq.unwrap());
            assert!(b.m0 >= a.m0);
        }
    }

    #[test]
    fn trapezoid_close_to_simpson_on_smooth_run() {
        let spec = GridSpec::new(2, 16, std::f64::consts::PI).unwrap();
        let p = params();
        let s0 = random_state(&spec, 1e-2, 5);
        let cfg = StepperConfig::new(Scheme::ExactLinear, 0.02, 2.0, 1).unwrap();
        let mut samples: Vec<(f64, f64)> = Vec::new();
        evolve(&s0, &p, &cfg, false, |t, s| {
            samples.push((t, dissipation_integrand_sq(s, &p, 0)));
        })
        .unwrap();
        // trapezoid
        let trap: f64 = samples
            .windows(2)
            .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
            .sum();
        // Simpson on the same (even-count) samples
        let n = samples.len() - 1;
        let m = if n.is_multiple_of(2) { n } else { n - 1 };
        let h = samples[1].0 - samples[0].0;
        let mut simp = samples[0].1 + samples[m].1;
        for (i, s) in samples.iter().take(m).enumerate().skip(1) {
            simp += s.1 * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let mut simp = simp * h / 3.0;
        if m != n {
            simp += 0.5 * (samples[n].0 - samples[m].0) * (samples[m].1 + samples[n].1);
        }
        let rel = (trap - simp).abs() / simp;
        assert!(rel <= 1e-4, "rel = {rel}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn energies_are_quadratic_in_the_state(seed in 0u64..300, lam in 0.25f64..4.0) {
            let spec = GridSpec::new(2, 8, 3.0).unwrap();
            let p = params();
            let s = random_state(&spec, 1.0, seed);
            let scaled = s.scale(lam);
            for k in 0..=2u32 {
                let a = instantaneous_energy_sq(&scaled, &p, k);
                let b = instantaneous_energy_sq(&s, &p, k) * lam * lam;
                prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
            }
            let a = negative_energy_sq(&scaled, &p, 0.7).unwrap();
            let b = negative_energy_sq(&s, &p, 0.7).unwrap() * lam * lam;
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
            // the ratio is scale-invariant
            let r1 = equivalence_ratio(&s, &p, 1).unwrap();
            let r2 = equivalence_ratio(&scaled, &p, 1).unwrap();
            prop_assert!((r1 - r2).abs() <= 1e-12 * r1);
        }
    }
}

//! Time integration: exact per-mode propagation for linear runs, and a
//! Crank-Nicolson / Heun IMEX splitting for nonlinear runs.
//!
//! Per mode with magnitude `xi` the linear system is `z' = A(xi) z` with the
//! companion generator
//!
//! ```text
//!         ( 0          1            0      )
//! A(xi) = ( 0          0            1      )
//!         ( -xi^2/tau  -beta xi^2/tau  -1/tau )
//! ```
//!
//! acting on `(u, v, w)` coefficients. Propagators `exp(dt A)` are computed
//! once per distinct lattice magnitude and cached. The IMEX scheme treats
//! the linear part with the trapezoidal rule and the nonlinearity with a
//! Heun predictor-corrector:
//!
//! ```text
//! z*    = R z^n + dt M N(z^n)           R = (I - dt/2 A)^-1 (I + dt/2 A)
//! z^n+1 = R z^n + dt/2 M (N(z^n)+N(z*)) M = (I - dt/2 A)^-1
//! ```

use std::collections::HashMap;

use num_complex::Complex64;

use crate::dynamics::{nonlinear_term, Params, SpectralState};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::{GridSpec, WavenumberLattice};
use crate::linalg::{expm, Mat3};

/// Ratio over the initial state norm that counts as blow-up.
pub const BLOWUP_FACTOR: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Machine-precision linear dynamics via cached matrix exponentials.
    ExactLinear,
    /// Second-order IMEX: Crank-Nicolson linear part, Heun nonlinearity.
    Imex2,
}

impl Scheme {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "exact-linear" => Ok(Scheme::ExactLinear),
            "imex2" => Ok(Scheme::Imex2),
            other => Err(Error::config(format!("unknown scheme {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StepperConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub t_end: f64,
    /// Steps between observer callbacks.
    pub observe_every: usize,
}

impl StepperConfig {
    pub fn new(scheme: Scheme, dt: f64, t_end: f64, observe_every: usize) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::config(format!("dt must be positive, got {dt}")));
        }
        if !(t_end >= 0.0) || !t_end.is_finite() {
            return Err(Error::config(format!("horizon must be nonnegative, got {t_end}")));
        }
        if observe_every == 0 {
            return Err(Error::config("observer stride must be >= 1"));
        }
        Ok(StepperConfig {
            scheme,
            dt,
            t_end,
            observe_every,
        })
    }

    /// Check `dt` against the spectral radius of the linear generator over
    /// the lattice; returns a warning line when the step leaves the
    /// accuracy region of the scheme (the CN part stays A-stable).
    pub fn stability_note(&self, spec: &GridSpec, p: &Params) -> Option<String> {
        let lat = WavenumberLattice::new(spec);
        let mut rate: f64 = 0.0;
        for flat in 0..spec.total_points() {
            let xi = lat.k_mag(flat);
            for r in crate::modes::char_roots(xi, p) {
                rate = rate.max(r.norm());
            }
        }
        if self.dt * rate > 2.0 {
            Some(format!(
                "dt * max|lambda| = {:.3} exceeds 2; the implicit part remains stable but phase \
                 accuracy of the fastest modes is degraded",
                self.dt * rate
            ))
        } else {
            None
        }
    }
}

/// Companion matrix of the per-mode linear system (general alpha).
pub fn linear_generator(xi_mag: f64, p: &Params) -> Mat3 {
    let x2 = xi_mag * xi_mag;
    Mat3 {
        m: [
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [-x2 / p.tau, -p.beta * x2 / p.tau, -p.alpha / p.tau],
        ],
    }
}

/// `exp(dt A(xi))` by scaling and squaring.
pub fn linear_propagator(xi_mag: f64, p: &Params, dt: f64) -> Mat3 {
    expm(&linear_generator(xi_mag, p).scale(dt))
}

/// Integer squared mode magnitude for every flat index; the cache key for
/// per-mode matrices (all modes with equal `|m|^2` share one matrix).
fn mode_norm_table(spec: &GridSpec) -> Vec<u64> {
    let mut out = Vec::with_capacity(spec.total_points());
    for flat in 0..spec.total_points() {
        let idx = spec.unravel(flat);
        let mut m2: u64 = 0;
        for a in 0..spec.dim() {
            let m = spec.mode_index(idx[a]);
            m2 += (m * m) as u64;
        }
        out.push(m2);
    }
    out
}

/// Per-mode matrices resolved to a flat lookup table.
struct ModeMatrices {
    /// flat index -> position in `mats`
    index: Vec<u32>,
    mats: Vec<Mat3>,
}

impl ModeMatrices {
    fn build(spec: &GridSpec, build: impl Fn(f64) -> Mat3) -> Self {
        let table = mode_norm_table(spec);
        let base = 2.0 * std::f64::consts::PI / spec.len();
        let mut slot: HashMap<u64, u32> = HashMap::new();
        let mut mats = Vec::new();
        let mut index = Vec::with_capacity(table.len());
        for &m2 in &table {
            let id = *slot.entry(m2).or_insert_with(|| {
                let xi = base * (m2 as f64).sqrt();
                mats.push(build(xi));
                (mats.len() - 1) as u32
            });
            index.push(id);
        }
        ModeMatrices { index, mats }
    }

    fn apply(&self, state: &mut SpectralState) {
        let threads = thread_count();
        let SpectralState { u, v, w } = state;
        let (ud, vd, wd) = (u.data_mut(), v.data_mut(), w.data_mut());
        let total = ud.len();
        let chunk = total.div_ceil(threads.max(1));
        let index = &self.index;
        let mats = &self.mats;
        let work = |start: usize, uc: &mut [Complex64], vc: &mut [Complex64], wc: &mut [Complex64]| {
            for i in 0..uc.len() {
                let m = &mats[index[start + i] as usize];
                let out = m.matvec_c([uc[i], vc[i], wc[i]]);
                uc[i] = out[0];
                vc[i] = out[1];
                wc[i] = out[2];
            }
        };
        if threads <= 1 || total < 4096 {
            work(0, ud, vd, wd);
        } else {
            // deterministic: disjoint chunks, no reductions
            std::thread::scope(|s| {
                let mut rest = (ud, vd, wd);
                let mut start = 0;
                while start < total {
                    let len = chunk.min(total - start);
                    let (uc, ur) = rest.0.split_at_mut(len);
                    let (vc, vr) = rest.1.split_at_mut(len);
                    let (wc, wr) = rest.2.split_at_mut(len);
                    rest = (ur, vr, wr);
                    let begin = start;
                    s.spawn(move || work(begin, uc, vc, wc));
                    start += len;
                }
            });
        }
    }
}

/// Worker threads for per-mode application, from `JMGT_THREADS` (default 1).
/// Results are identical for any thread count: the parallel sections only
/// perform disjoint writes.
pub fn thread_count() -> usize {
    std::env::var("JMGT_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(1)
}

/// Outcome of a trajectory run.
#[derive(Debug, Clone)]
pub struct EvolveReport {
    pub steps: usize,
    pub t_final: f64,
    pub warnings: Vec<String>,
}

/// Advance the state to `cfg.t_end`, invoking `observer` at `t = 0`, every
/// `observe_every` steps, and at the final time.
///
/// NaN/Inf or growth beyond [`BLOWUP_FACTOR`] times the initial norm aborts
/// with a diagnostic (likely blow-up or an accuracy violation).
pub fn evolve(
    state0: &SpectralState,
    p: &Params,
    cfg: &StepperConfig,
    nonlinear: bool,
    mut observer: impl FnMut(f64, &SpectralState),
) -> Result<(SpectralState, EvolveReport)> {
    let spec = *state0.spec();
    let mut warnings = Vec::new();
    if let Some(n) = cfg.stability_note(&spec, p) {
        warnings.push(n);
    }
    if matches!(cfg.scheme, Scheme::ExactLinear) && nonlinear {
        return Err(Error::config(
            "exact-linear scheme cannot integrate the nonlinear system",
        ));
    }
    if nonlinear && p.alpha != 1.0 {
        return Err(Error::config("the evolution system fixes alpha = 1"));
    }

    let steps = (cfg.t_end / cfg.dt).round() as usize;
    let dt = if steps > 0 { cfg.t_end / steps as f64 } else { cfg.dt };

    let mut state = state0.clone();
    let norm0 = state.l2_norm();
    observer(0.0, &state);

    match cfg.scheme {
        Scheme::ExactLinear => {
            let prop = ModeMatrices::build(&spec, |xi| linear_propagator(xi, p, dt));
            for step in 1..=steps {
                prop.apply(&mut state);
                let t = step as f64 * dt;
                if step % cfg.observe_every == 0 || step == steps {
                    check_finite(&state, norm0, t)?;
                    observer(t, &state);
                }
            }
        }
        Scheme::Imex2 => {
            let half = dt / 2.0;
            let minus_inv = ModeMatrices::build(&spec, |xi| {
                linear_generator(xi, p)
                    .scale(-half)
                    .add(&Mat3::identity())
                    .inverse()
                    .expect("I - dt/2 A is nonsingular for dissipative parameters")
            });
            let ratio = ModeMatrices::build(&spec, |xi| {
                let a = linear_generator(xi, p);
                let m_minus = a.scale(-half).add(&Mat3::identity());
                let m_plus = a.scale(half).add(&Mat3::identity());
                m_minus.inverse().expect("nonsingular").mul(&m_plus)
            });
            for step in 1..=steps {
                let f_n = forcing(&state, p, nonlinear)?;
                // z_lin = R z^n reused by predictor and corrector
                let mut z_lin = state.clone();
                ratio.apply(&mut z_lin);

                let mut pred_force = f_n.scale(dt);
                minus_inv.apply(&mut pred_force);
                let predictor = z_lin.add(&pred_force)?;

                let f_star = forcing(&predictor, p, nonlinear)?;
                let mut corr_force = f_n.add(&f_star)?.scale(half);
                minus_inv.apply(&mut corr_force);
                state = z_lin.add(&corr_force)?;

                let t = step as f64 * dt;
                if step % cfg.observe_every == 0 || step == steps {
                    check_finite(&state, norm0, t)?;
                    observer(t, &state);
                }
            }
        }
    }

    let t_final = steps as f64 * dt;
    Ok((
        state,
        EvolveReport {
            steps,
            t_final,
            warnings,
        },
    ))
}

/// Nonlinear forcing as a state-shaped tendency `(0, 0, N(U)/tau)`.
fn forcing(state: &SpectralState, p: &Params, nonlinear: bool) -> Result<SpectralState> {
    let spec = *state.spec();
    let w = if nonlinear {
        nonlinear_term(state, p)?.scale(1.0 / p.tau)
    } else {
        SpectralField::zeros(&spec)
    };
    Ok(SpectralState {
        u: SpectralField::zeros(&spec),
        v: SpectralField::zeros(&spec),
        w,
    })
}

fn check_finite(state: &SpectralState, norm0: f64, t: f64) -> Result<()> {
    let n = state.l2_norm();
    if !n.is_finite() {
        return Err(Error::numerical(format!(
            "non-finite state at t = {t}; likely blow-up or a CFL violation"
        )));
    }
    if norm0 > 0.0 && n > BLOWUP_FACTOR * norm0 {
        return Err(Error::numerical(format!(
            "state norm grew by {:.3e} at t = {t}; blow-up detected",
            n / norm0
        )));
    }
    Ok(())
}

/// Single explicit step (convenience over [`evolve`] for one `dt`).
pub fn step(state: &SpectralState, p: &Params, cfg: &StepperConfig, nonlinear: bool) -> Result<SpectralState> {
    let one = StepperConfig::new(cfg.scheme, cfg.dt, cfg.dt, 1)?;
    let (out, _) = evolve(state, p, &one, nonlinear, |_, _| {})?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{highpass, lowpass, random_band_field, CutoffSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params() -> Params {
        Params::new(0.5, 1.0).unwrap()
    }

    fn random_state(spec: &GridSpec, amp: f64, seed: u64) -> SpectralState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let band = spec.nyquist() * 0.5;
        SpectralState {
            u: random_band_field(spec, 0.5, band, amp, &mut rng),
            v: random_band_field(spec, 0.5, band, amp, &mut rng),
            w: random_band_field(spec, 0.5, band, amp, &mut rng),
        }
    }

    #[test]
    fn generator_third_row_at_zero_mode() {
        let a = linear_generator(0.0, &params());
        assert_eq!(a.m[2], [0.0, 0.0, -2.0]);
        assert_eq!(a.m[0], [0.0, 1.0, 0.0]);
        assert_eq!(a.m[1], [0.0, 0.0, 1.0]);
    }

    #[test]
    fn propagator_at_zero_dt_is_identity() {
        let p = linear_propagator(3.0, &params(), 0.0);
        assert!(p.sub(&Mat3::identity()).one_norm() < 1e-15);
    }

    #[test]
    fn zero_mode_w_decays_exponentially() {
        // at xi = 0 the third row decouples: w(t) = w0 exp(-t/tau)
        let p = params();
        let mat = linear_propagator(0.0, &p, 1.7);
        let z = mat.matvec_c([
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ]);
        let expect = (-1.7 / p.tau).exp();
        assert!((z[2].re - expect).abs() < 1e-12);
    }

    /// Complex 3x3 solve for the eigen-decomposition oracle.
    fn solve3(a: [[Complex64; 3]; 3], b: [Complex64; 3]) -> [Complex64; 3] {
        let mut m = a;
        let mut r = b;
        for col in 0..3 {
            let mut piv = col;
            for row in col + 1..3 {
                if m[row][col].norm() > m[piv][col].norm() {
                    piv = row;
                }
            }
            m.swap(col, piv);
            r.swap(col, piv);
            for row in col + 1..3 {
                let f = m[row][col] / m[col][col];
                for k in col..3 {
                    let sub = f * m[col][k];
                    m[row][k] -= sub;
                }
                let sub = f * r[col];
                r[row] -= sub;
            }
        }
        let mut x = [Complex64::default(); 3];
        for row in (0..3).rev() {
            let mut acc = r[row];
            for k in row + 1..3 {
                acc -= m[row][k] * x[k];
            }
            x[row] = acc / m[row][row];
        }
        x
    }

    /// Per-mode analytic solution via the eigenbasis (1, lambda, lambda^2).
    fn eigen_solution(z0: [Complex64; 3], xi: f64, p: &Params, t: f64) -> [Complex64; 3] {
        let roots = crate::modes::char_roots(xi, p);
        let vander = [
            [Complex64::new(1.0, 0.0); 3],
            [roots[0], roots[1], roots[2]],
            [roots[0] * roots[0], roots[1] * roots[1], roots[2] * roots[2]],
        ];
        let coef = solve3(vander, z0);
        let mut out = [Complex64::default(); 3];
        for (i, lam) in roots.iter().enumerate() {
            let decay = (lam * t).exp();
            out[0] += coef[i] * decay;
            out[1] += coef[i] * lam * decay;
            out[2] += coef[i] * lam * lam * decay;
        }
        out
    }

    #[test]
    fn exact_linear_run_matches_eigendecomposition() {
        let spec = GridSpec::new(2, 16, 2.0 * std::f64::consts::PI).unwrap();
        let p = params();
        let s0 = random_state(&spec, 1.0, 21);
        let cfg = StepperConfig::new(Scheme::ExactLinear, 0.25, 3.0, 4).unwrap();
        let (s_end, rep) = evolve(&s0, &p, &cfg, false, |_, _| {}).unwrap();
        assert_eq!(rep.steps, 12);

        let lat = WavenumberLattice::new(&spec);
        let mut err2 = 0.0;
        let mut ref2 = 0.0;
        for flat in 0..spec.total_points() {
            let z0 = [s0.u.data()[flat], s0.v.data()[flat], s0.w.data()[flat]];
            if z0.iter().all(|c| c.norm() == 0.0) {
                continue; // degenerate roots at the empty zero mode
            }
            let expect = eigen_solution(z0, lat.k_mag(flat), &p, 3.0);
            let got = [
                s_end.u.data()[flat],
                s_end.v.data()[flat],
                s_end.w.data()[flat],
            ];
            for i in 0..3 {
                err2 += (got[i] - expect[i]).norm_sqr();
                ref2 += expect[i].norm_sqr();
            }
        }
        assert!((err2 / ref2).sqrt() < 1e-10, "rel = {}", (err2 / ref2).sqrt());
    }

    #[test]
    fn zero_initial_data_stays_zero() {
        let spec = GridSpec::new(2, 8, 1.0).unwrap();
        let s0 = SpectralState::zeros(&spec);
        let cfg = StepperConfig::new(Scheme::Imex2, 0.1, 1.0, 2).unwrap();
        let (s_end, _) = evolve(&s0, &params(), &cfg, true, |_, _| {}).unwrap();
        assert_eq!(s_end.l2_norm(), 0.0);
    }

    #[test]
    fn exact_linear_commutes_with_band_filters() {
        let spec = GridSpec::new(2, 16, 2.0 * std::f64::consts::PI).unwrap();
        let p = params();
        let cutoff = CutoffSpec::new(2.0).unwrap();
        let s0 = random_state(&spec, 1.0, 31);
        let cfg = StepperConfig::new(Scheme::ExactLinear, 0.5, 2.0, 1).unwrap();

        let (evolved, _) = evolve(&s0, &p, &cfg, false, |_, _| {}).unwrap();
        let filter_then = SpectralState {
            u: lowpass(&s0.u, &cutoff),
            v: lowpass(&s0.v, &cutoff),
            w: lowpass(&s0.w, &cutoff),
        };
        let (filter_then_evolve, _) = evolve(&filter_then, &p, &cfg, false, |_, _| {}).unwrap();
        let evolve_then_filter = SpectralState {
            u: lowpass(&evolved.u, &cutoff),
            v: lowpass(&evolved.v, &cutoff),
            w: lowpass(&evolved.w, &cutoff),
        };
        let diff = filter_then_evolve.axpy(-1.0, &evolve_then_filter).unwrap().l2_norm();
        assert!(diff <= 1e-12 * evolved.l2_norm());
        // same for the high band
        let hp = SpectralState {
            u: highpass(&s0.u, &cutoff),
            v: highpass(&s0.v, &cutoff),
            w: highpass(&s0.w, &cutoff),
        };
        let (hp_evolved, _) = evolve(&hp, &p, &cfg, false, |_, _| {}).unwrap();
        let direct = SpectralState {
            u: highpass(&evolved.u, &cutoff),
            v: highpass(&evolved.v, &cutoff),
            w: highpass(&evolved.w, &cutoff),
        };
        assert!(hp_evolved.axpy(-1.0, &direct).unwrap().l2_norm() <= 1e-12 * evolved.l2_norm());
    }

    #[test]
    fn imex_converges_at_second_order() {
        let spec = GridSpec::new(2, 8, 2.0 * std::f64::consts::PI).unwrap();
        let p = params();
        let s0 = random_state(&spec, 0.2, 77);
        let t_end = 0.5;
        let run = |dt: f64| -> SpectralState {
            let cfg = StepperConfig::new(Scheme::Imex2, dt, t_end, usize::MAX).unwrap();
            evolve(&s0, &p, &cfg, true, |_, _| {}).unwrap().0
        };
        let a = run(t_end / 16.0);
        let b = run(t_end / 32.0);
        let c = run(t_end / 64.0);
        let e1 = a.axpy(-1.0, &b).unwrap().l2_norm();
        let e2 = b.axpy(-1.0, &c).unwrap().l2_norm();
        let order = (e1 / e2).log2();
        assert!(order >= 1.9, "observed order {order}");
    }

    #[test]
    fn energy_envelope_decays_for_dissipative_modes() {
        // exact per-mode propagation: long-window decay of the Fourier energy
        let p = params();
        for xi in [0.3, 1.0, 4.0, 20.0] {
            let abscissa = crate::modes::abscissa(xi, &p);
            assert!(abscissa < 0.0);
            let horizon = 8.0 / abscissa.abs();
            let mat = linear_propagator(xi, &p, horizon);
            let mut worst: f64 = 0.0;
            for z0 in [
                [Complex64::new(1.0, 0.0), Complex64::default(), Complex64::default()],
                [Complex64::default(), Complex64::new(1.0, 0.0), Complex64::default()],
                [Complex64::default(), Complex64::default(), Complex64::new(1.0, 0.0)],
            ] {
                let z1 = mat.matvec_c(z0);
                let m0 = crate::modes::ModeTriple {
                    u: z0[0],
                    v: z0[1],
                    w: z0[2],
                    xi_mag: xi,
                };
                let m1 = crate::modes::ModeTriple {
                    u: z1[0],
                    v: z1[1],
                    w: z1[2],
                    xi_mag: xi,
                };
                let e0 = crate::modes::mode_energy(&m0, &p).energy;
                let e1 = crate::modes::mode_energy(&m1, &p).energy;
                if e0 > 0.0 {
                    worst = worst.max(e1 / e0);
                }
            }
            assert!(worst < 0.1, "xi = {xi}: energy ratio {worst}");
        }
    }

    #[test]
    fn blowup_detection_aborts_on_unstable_parameters() {
        // tau > beta: high modes grow; the norm guard must fire
        let spec = GridSpec::new(1, 16, 2.0 * std::f64::consts::PI).unwrap();
        let p = Params::new_unstable_allowed(1.0, 0.25).unwrap();
        let mut s0 = SpectralState::zeros(&spec);
        s0.v = crate::field::SpectralField::single_mode(&spec, [6, 0, 0], 1.0).unwrap();
        let cfg = StepperConfig::new(Scheme::ExactLinear, 50.0, 5000.0, 1).unwrap();
        let err = evolve(&s0, &p, &cfg, false, |_, _| {}).unwrap_err();
        assert!(matches!(err, Error::Numerical(_)), "{err}");
        assert!(format!("{err}").contains("blow-up"));
    }

    #[test]
    fn nan_detection_aborts_with_diagnostic() {
        let spec = GridSpec::new(1, 8, 1.0).unwrap();
        let mut s0 = SpectralState::zeros(&spec);
        s0.u.data_mut()[1] = Complex64::new(f64::NAN, 0.0);
        s0.u.data_mut()[7] = Complex64::new(f64::NAN, 0.0);
        let cfg = StepperConfig::new(Scheme::ExactLinear, 0.1, 0.2, 1).unwrap();
        let err = evolve(&s0, &params(), &cfg, false, |_, _| {}).unwrap_err();
        assert!(matches!(err, Error::Numerical(_)));
    }
}

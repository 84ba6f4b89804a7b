//! Per-frequency linear theory: characteristic roots, stability maps,
//! spectral-abscissa decay envelopes, the Fourier-side energy, a Lyapunov
//! candidate certification, and continuum radial quadrature of `||V(t)||`.
//!
//! Per mode the linearized system has characteristic polynomial
//! `tau L^3 + alpha L^2 + beta xi^2 L + xi^2 = 0`; by Routh-Hurwitz all
//! roots have negative real part exactly when `alpha beta > tau` (and
//! `xi > 0`), the dissipativity condition.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dynamics::Params;
use crate::error::{Error, Result};
use crate::linalg::{cubic_roots, durand_kerner_roots, expm, gauss_legendre_on, generalized_sym_eigs, Mat3};
use crate::spectral::CutoffSpec;
use crate::stepping::linear_generator;

/// Roots below this real part count as strictly stable; the margin absorbs
/// round-off of the root finder so the marginal line `beta = tau` never
/// classifies as stable.
pub const STABILITY_MARGIN: f64 = 1e-8;

/// Roots of the per-mode characteristic polynomial, sorted by real part.
pub fn char_roots(xi_mag: f64, p: &Params) -> [Complex64; 3] {
    let x2 = xi_mag * xi_mag;
    cubic_roots(p.tau, p.alpha, p.beta * x2, x2)
}

/// Independent root path (Durand-Kerner on the same polynomial); the
/// cross-check oracle for [`char_roots`].
pub fn generator_eigenvalues(xi_mag: f64, p: &Params) -> [Complex64; 3] {
    let x2 = xi_mag * xi_mag;
    durand_kerner_roots(p.tau, p.alpha, p.beta * x2, x2)
}

/// Spectral abscissa: the largest real part among the three roots.
pub fn abscissa(xi_mag: f64, p: &Params) -> f64 {
    char_roots(xi_mag, p)
        .iter()
        .map(|r| r.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Routh-Hurwitz stability of the mode polynomial: exact algebraic oracle.
/// Marginal cases (`xi = 0` or `alpha beta = tau`) are not stable.
pub fn hurwitz_stable(tau: f64, beta: f64, alpha: f64, xi_mag: f64) -> bool {
    tau > 0.0 && alpha > 0.0 && beta > 0.0 && xi_mag > 0.0 && alpha * beta > tau
}

/// Stability classification of a `(tau, beta)` grid at sampled frequencies.
#[derive(Debug, Clone)]
pub struct StabilityMap {
    pub taus: Vec<f64>,
    pub betas: Vec<f64>,
    /// Row-major over (tau, beta): computed-stable flag.
    pub stable: Vec<bool>,
    /// Worst (largest) abscissa over the sampled frequencies.
    pub max_re: Vec<f64>,
}

/// Mark `(tau, beta)` stable iff every sampled `xi > 0` has abscissa below
/// `-STABILITY_MARGIN`.
pub fn stability_region(taus: &[f64], betas: &[f64], xis: &[f64], alpha: f64) -> StabilityMap {
    let mut stable = Vec::with_capacity(taus.len() * betas.len());
    let mut max_re = Vec::with_capacity(taus.len() * betas.len());
    for &tau in taus {
        for &beta in betas {
            let p = Params {
                tau,
                beta,
                alpha,
                b_over_a: 0.0,
            };
            let mut worst = f64::NEG_INFINITY;
            for &xi in xis {
                worst = worst.max(abscissa(xi, &p));
            }
            stable.push(worst < -STABILITY_MARGIN);
            max_re.push(worst);
        }
    }
    StabilityMap {
        taus: taus.to_vec(),
        betas: betas.to_vec(),
        stable,
        max_re,
    }
}

/// Abscissa samples on a frequency grid and the largest certified envelope
/// constant `c` with `abscissa(xi) <= -(c/2) xi^2/(1+xi^2)`.
#[derive(Debug, Clone)]
pub struct DecayEnvelope {
    pub xis: Vec<f64>,
    pub abscissas: Vec<f64>,
    /// Largest admissible envelope constant; 0 when violated.
    pub c: f64,
    /// First grid frequency with nonnegative abscissa, if any.
    pub offending_xi: Option<f64>,
}

pub fn abscissa_envelope(p: &Params, xis: &[f64]) -> Result<DecayEnvelope> {
    if !p.is_dissipative() {
        return Err(Error::domain(format!(
            "envelope requires the dissipative regime tau < alpha*beta, got tau = {}, beta = {}",
            p.tau, p.beta
        )));
    }
    let mut abscissas = Vec::with_capacity(xis.len());
    let mut c = f64::INFINITY;
    let mut offending = None;
    for &xi in xis {
        let a = abscissa(xi, p);
        abscissas.push(a);
        if xi > 0.0 {
            if a >= 0.0 {
                offending.get_or_insert(xi);
            } else {
                let weight = xi * xi / (1.0 + xi * xi);
                c = c.min(2.0 * (-a) / weight);
            }
        }
    }
    if offending.is_some() || !c.is_finite() {
        c = 0.0;
    }
    Ok(DecayEnvelope {
        xis: xis.to_vec(),
        abscissas,
        c,
        offending_xi: offending,
    })
}

/// Log-spaced frequency grid, inclusive of both endpoints.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Per-mode complex state.
#[derive(Debug, Clone, Copy)]
pub struct ModeTriple {
    pub u: Complex64,
    pub v: Complex64,
    pub w: Complex64,
    pub xi_mag: f64,
}

impl ModeTriple {
    pub fn from_vec(z: [Complex64; 3], xi_mag: f64) -> Self {
        ModeTriple {
            u: z[0],
            v: z[1],
            w: z[2],
            xi_mag,
        }
    }

    pub fn as_vec(&self) -> [Complex64; 3] {
        [self.u, self.v, self.w]
    }

    /// Squared magnitude of the literal V components,
    /// `|v + tau w|^2 + xi^2 |u + tau v|^2 + xi^2 |v|^2`.
    pub fn v_hat_sq(&self, p: &Params) -> f64 {
        let a = self.v + self.w * p.tau;
        let b = self.u + self.v * p.tau;
        let x2 = self.xi_mag * self.xi_mag;
        a.norm_sqr() + x2 * b.norm_sqr() + x2 * self.v.norm_sqr()
    }

    /// Squared magnitude of the energy-weighted V components; the third
    /// carries the weight `tau (beta - tau)` so that it equals twice the
    /// Fourier energy exactly.
    pub fn v_hat_weighted_sq(&self, p: &Params) -> f64 {
        let a = self.v + self.w * p.tau;
        let b = self.u + self.v * p.tau;
        let x2 = self.xi_mag * self.xi_mag;
        a.norm_sqr() + x2 * b.norm_sqr() + p.tau * (p.beta - p.tau) * x2 * self.v.norm_sqr()
    }
}

/// The Fourier-side energy of a mode (and an optional Lyapunov value).
#[derive(Debug, Clone, Copy)]
pub struct ModeEnergy {
    pub energy: f64,
    pub lyapunov: Option<f64>,
}

/// `E(xi,t) = 1/2 { |v+tau w|^2 + tau(beta-tau) xi^2 |v|^2 + xi^2 |u+tau v|^2 }`.
pub fn mode_energy(m: &ModeTriple, p: &Params) -> ModeEnergy {
    ModeEnergy {
        energy: 0.5 * m.v_hat_weighted_sq(p),
        lyapunov: None,
    }
}

fn cross_weight(xi: f64) -> f64 {
    let x2 = xi * xi;
    x2 / (1.0 + x2)
}

/// One-parameter Lyapunov candidate
/// `L = E + delta * xi^2/(1+xi^2) * Re[(v+tau w) conj(u+tau v)]`.
///
/// The exact functional of the cited construction is not reproduced here;
/// this family is verified against the two claims made about it
/// (equivalence with `E`, and windowed decay at rate `c xi^2/(1+xi^2)`).
pub fn lyapunov_candidate(m: &ModeTriple, p: &Params, delta: f64) -> f64 {
    let a = m.v + m.w * p.tau;
    let b = m.u + m.v * p.tau;
    let cross = (a * b.conj()).re;
    mode_energy(m, p).energy + delta * cross_weight(m.xi_mag) * cross
}

/// Exact equivalence defect of the candidate at one frequency:
/// `kappa = max(lam_max - 1, 1 - lam_min)` over the generalized eigenvalues
/// of the pencil `(M_L, M_E)` of the two quadratic forms.
pub fn lyapunov_kappa(p: &Params, xi: f64, delta: f64) -> f64 {
    if xi == 0.0 || delta == 0.0 {
        return 0.0;
    }
    let x2 = xi * xi;
    let a_vec = [0.0, 1.0, p.tau]; // v + tau w
    let b_vec = [1.0, p.tau, 0.0]; // u + tau v
    let e_v = [0.0, 1.0, 0.0];
    let outer = |x: [f64; 3], y: [f64; 3], s: f64| -> Mat3 {
        let mut m = Mat3::ZERO;
        for i in 0..3 {
            for j in 0..3 {
                m.m[i][j] = s * 0.5 * (x[i] * y[j] + x[j] * y[i]);
            }
        }
        m
    };
    let m_e = outer(a_vec, a_vec, 1.0)
        .add(&outer(e_v, e_v, p.tau * (p.beta - p.tau) * x2))
        .add(&outer(b_vec, b_vec, x2))
        .scale(0.5);
    let m_l = m_e.add(&outer(a_vec, b_vec, delta * cross_weight(xi)));
    let eigs = generalized_sym_eigs(&m_l, &m_e);
    (eigs[2] - 1.0).max(1.0 - eigs[0]).max(0.0)
}

/// Certification result for one frequency.
#[derive(Debug, Clone, Copy)]
pub struct LyapunovRow {
    pub xi: f64,
    pub delta: f64,
    /// Smallest windowed decay rate constant observed along trajectories.
    pub c: f64,
    /// Equivalence defect of the certified candidate.
    pub kappa: f64,
    pub certified: bool,
}

#[derive(Debug, Clone)]
pub struct LyapunovReport {
    pub rows: Vec<LyapunovRow>,
    pub min_c: f64,
    pub max_kappa: f64,
    pub all_certified: bool,
}

/// Search parameters for [`verify_lyapunov`].
#[derive(Debug, Clone, Copy)]
pub struct LyapunovSearch {
    /// Equivalence budget for admissible candidates.
    pub kappa_max: f64,
    /// Trajectories sampled per frequency.
    pub trajectories: usize,
    /// Observation intervals per trajectory.
    pub intervals: usize,
    pub seed: u64,
}

impl Default for LyapunovSearch {
    fn default() -> Self {
        LyapunovSearch {
            kappa_max: 0.5,
            trajectories: 6,
            intervals: 16,
            seed: 0x4a4d4754,
        }
    }
}

/// Verify the candidate family along exactly propagated mode trajectories.
///
/// Per frequency, random initial triples are propagated with the cached
/// matrix exponential over a horizon scaled to the mode's decay time; the
/// discrete-window inequality
///
/// ```text
/// [L(t_i) - L(t_{i+1})] / h  >=  c * xi^2/(1+xi^2) * E(t_i)
/// ```
///
/// is required on every window after the initial quarter of the horizon
/// (the transient, where the instantaneous energy may oscillate). The
/// reported `(delta, c, kappa)` maximizes `c` over a fixed candidate grid
/// subject to `kappa <= kappa_max`.
pub fn verify_lyapunov(p: &Params, xis: &[f64], search: &LyapunovSearch) -> Result<LyapunovReport> {
    if !p.is_dissipative() {
        return Err(Error::domain(
            "Lyapunov verification requires the dissipative regime",
        ));
    }
    let deltas: Vec<f64> = (-15..=15).map(|i| i as f64 * 0.1).collect();
    let mut rows = Vec::with_capacity(xis.len());
    for (k, &xi) in xis.iter().enumerate() {
        if xi <= 0.0 {
            return Err(Error::config("Lyapunov verification needs xi > 0"));
        }
        let roots = char_roots(xi, p);
        let a = abscissa(xi, p);
        if a >= 0.0 {
            rows.push(LyapunovRow {
                xi,
                delta: 0.0,
                c: 0.0,
                kappa: 0.0,
                certified: false,
            });
            continue;
        }
        let omega = roots.iter().map(|r| r.im.abs()).fold(0.0f64, f64::max);
        let mut horizon = 4.0 / a.abs();
        if omega > 0.0 {
            horizon = horizon.max(6.0 * 2.0 * std::f64::consts::PI / omega);
        }
        let h = horizon / search.intervals as f64;
        let prop = expm(&linear_generator(xi, p).scale(h));
        let weight = cross_weight(xi);

        // exact trajectories, stored once, scanned for every candidate
        let mut rng = ChaCha8Rng::seed_from_u64(search.seed.wrapping_add(k as u64));
        let mut trajectories = Vec::with_capacity(search.trajectories);
        for _ in 0..search.trajectories {
            let mut z = [
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            ];
            let mut path = Vec::with_capacity(search.intervals + 1);
            path.push(z);
            for _ in 0..search.intervals {
                z = prop.matvec_c(z);
                path.push(z);
            }
            trajectories.push(path);
        }

        let skip = search.intervals / 4;
        let mut best: Option<(f64, f64, f64)> = None; // (delta, c, kappa)
        for &delta in &deltas {
            let kappa = lyapunov_kappa(p, xi, delta);
            if kappa > search.kappa_max {
                continue;
            }
            let mut c = f64::INFINITY;
            for path in &trajectories {
                for i in skip..search.intervals {
                    let m0 = ModeTriple::from_vec(path[i], xi);
                    let m1 = ModeTriple::from_vec(path[i + 1], xi);
                    let e0 = mode_energy(&m0, p).energy;
                    if e0 < 1e-280 {
                        continue;
                    }
                    let dec = lyapunov_candidate(&m0, p, delta) - lyapunov_candidate(&m1, p, delta);
                    c = c.min(dec / (h * weight * e0));
                }
            }
            if c.is_finite() && best.is_none_or(|(_, bc, _)| c > bc) {
                best = Some((delta, c, kappa));
            }
        }
        let (delta, c, kappa) = best.unwrap_or((0.0, 0.0, 0.0));
        rows.push(LyapunovRow {
            xi,
            delta,
            c,
            kappa,
            certified: c > 0.0,
        });
    }
    let min_c = rows.iter().map(|r| r.c).fold(f64::INFINITY, f64::min);
    let max_kappa = rows.iter().map(|r| r.kappa).fold(0.0f64, f64::max);
    let all_certified = rows.iter().all(|r| r.certified);
    Ok(LyapunovReport {
        rows,
        min_c,
        max_kappa,
        all_certified,
    })
}

/// Surface measure of the sphere of radius `xi` in `dim` dimensions
/// (the two-point set for `dim = 1`).
pub fn surface_measure(dim: usize, xi: f64) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI * xi,
        _ => 4.0 * std::f64::consts::PI * xi * xi,
    }
}

/// Radial quadrature nodes on `[0, xi_max]`: geometrically refined panels
/// toward zero (resolving late-time low-frequency saturation) with
/// Gauss-Legendre nodes per panel.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    pub nodes: Vec<(f64, f64)>,
    pub xi_max: f64,
}

impl RadialGrid {
    pub fn new(xi_max: f64, panels: usize, nodes_per_panel: usize) -> Self {
        assert!(xi_max > 0.0 && panels >= 2 && nodes_per_panel >= 2);
        let mut edges = vec![0.0];
        for j in (0..panels).rev() {
            edges.push(xi_max * 0.5f64.powi(j as i32));
        }
        let mut nodes = Vec::new();
        for pair in edges.windows(2) {
            nodes.extend(gauss_legendre_on(pair[0], pair[1], nodes_per_panel));
        }
        RadialGrid { nodes, xi_max }
    }
}

/// Time series of band-resolved `||V(t)||_{L^2}` values.
#[derive(Debug, Clone)]
pub struct VNormSeries {
    pub times: Vec<f64>,
    pub total: Vec<f64>,
    pub low: Vec<f64>,
    pub high: Vec<f64>,
    /// Cross term `2 <V^L, V^H>` of the splitting identity.
    pub cross: Vec<f64>,
}

/// Initial mode triple realizing a radial `|V_0|(xi) = g` profile: the
/// amplitude is split evenly between the `v + tau w` and `grad(u + tau v)`
/// components, with `v = 0`.
pub fn profile_mode(g: f64, xi: f64, p: &Params) -> ModeTriple {
    let s = std::f64::consts::SQRT_2;
    ModeTriple {
        u: Complex64::new(g / (s * xi), 0.0),
        v: Complex64::default(),
        w: Complex64::new(g / (s * p.tau), 0.0),
        xi_mag: xi,
    }
}

/// Propagate a radial profile exactly and integrate `|V(xi,t)|^2` over the
/// continuum lattice, `||V(t)||^2 = Int surface(xi) |V(xi,t)|^2 dxi`.
///
/// The profile must be fully resolved by `grid.xi_max`; a tail probe on
/// `[xi_max, 4 xi_max]` refuses profiles whose truncated mass exceeds
/// `1e-8` of the total.
pub fn radial_norm_evolution(
    profile: &dyn Fn(f64) -> f64,
    grid: &RadialGrid,
    p: &Params,
    dim: usize,
    times: &[f64],
    cutoff: Option<&CutoffSpec>,
) -> Result<VNormSeries> {
    if !(1..=3).contains(&dim) {
        return Err(Error::config(format!("dim must be 1..3, got {dim}")));
    }
    if !p.is_dissipative() {
        return Err(Error::domain("radial evolution requires the dissipative regime"));
    }
    // truncation probe
    let mut total0 = 0.0;
    for &(xi, w) in &grid.nodes {
        let g = profile(xi);
        total0 += w * surface_measure(dim, xi) * g * g;
    }
    if total0 <= 0.0 {
        return Ok(VNormSeries {
            times: times.to_vec(),
            total: vec![0.0; times.len()],
            low: vec![0.0; times.len()],
            high: vec![0.0; times.len()],
            cross: vec![0.0; times.len()],
        });
    }
    let mut tail = 0.0;
    for (xi, w) in gauss_legendre_on(grid.xi_max, 4.0 * grid.xi_max, 64) {
        let g = profile(xi);
        tail += w * surface_measure(dim, xi) * g * g;
    }
    if tail > 1e-8 * total0 {
        return Err(Error::config(format!(
            "radial profile mass beyond xi_max = {} is {:.3e} of the total; enlarge xi_max",
            grid.xi_max,
            tail / total0
        )));
    }

    let mut series = VNormSeries {
        times: times.to_vec(),
        total: vec![0.0; times.len()],
        low: vec![0.0; times.len()],
        high: vec![0.0; times.len()],
        cross: vec![0.0; times.len()],
    };
    for &(xi, w) in &grid.nodes {
        let g = profile(xi);
        if g == 0.0 {
            continue;
        }
        let m0 = profile_mode(g, xi, p);
        let gen = linear_generator(xi, p);
        let (psi2, phi2, cross_w) = match cutoff {
            Some(c) => {
                let psi = c.psi(xi);
                let phi = c.phi(xi);
                (psi * psi, phi * phi, 2.0 * psi * phi)
            }
            None => (1.0, 0.0, 0.0),
        };
        let measure = w * surface_measure(dim, xi);
        for (ti, &t) in times.iter().enumerate() {
            let z = expm(&gen.scale(t)).matvec_c(m0.as_vec());
            let v2 = ModeTriple::from_vec(z, xi).v_hat_sq(p) * measure;
            series.total[ti] += v2;
            series.low[ti] += psi2 * v2;
            series.high[ti] += phi2 * v2;
            series.cross[ti] += cross_w * v2;
        }
    }
    for ti in 0..times.len() {
        series.total[ti] = series.total[ti].sqrt();
        series.low[ti] = series.low[ti].sqrt();
        series.high[ti] = series.high[ti].sqrt();
        // cross kept as a signed squared quantity
    }
    Ok(series)
}

/// Same quadrature applied to the scalar heat semigroup `e^{-t xi^2}`;
/// calibrates the fitting pipeline against `t^{-dim/4}` for flat data.
pub fn heat_norm_evolution(
    profile: &dyn Fn(f64) -> f64,
    grid: &RadialGrid,
    dim: usize,
    times: &[f64],
) -> Vec<f64> {
    times
        .iter()
        .map(|&t| {
            let mut acc = 0.0;
            for &(xi, w) in &grid.nodes {
                let g = profile(xi) * (-t * xi * xi).exp();
                acc += w * surface_measure(dim, xi) * g * g;
            }
            acc.sqrt()
        })
        .collect()
}

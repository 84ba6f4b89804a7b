//! Subcommand implementations. Every command writes its CSV artifacts, a
//! `<command>.summary.csv` of pass/flag assertions, and a run manifest
//! into the output directory.

use std::path::Path;

use anyhow::{bail, Context, Result};
use jmgt_core::dynamics::Params;
use jmgt_core::energy::EnergyRow;
use jmgt_core::experiments::{self, BoundednessConfig, DecayConfig, RadialProfile, TorusConfig};
use jmgt_core::fieldio;
use jmgt_core::grid::GridSpec;
use jmgt_core::inequality::{check_inequality, dilation_scan, empirical_constant, preregistered_suites, TestFunction};
use jmgt_core::modes::{
    self, abscissa_envelope, log_grid, stability_region, verify_lyapunov, LyapunovSearch,
};
use jmgt_core::stepping::{evolve, Scheme, StepperConfig};
use num_rational::Rational64;

use crate::config::Config;
use crate::output::{c_f, c_s, svg_lines, Csv, Manifest, Summary};

/// Typed view of the merged configuration.
pub struct Settings {
    pub grid_dim: usize,
    pub grid_n: usize,
    pub grid_len: f64,
    pub tau: f64,
    pub beta: f64,
    pub alpha: f64,
    pub b_over_a: f64,
    pub dt: f64,
    pub t_end: f64,
    pub stride: usize,
    pub amplitude: f64,
    pub seed: u64,
    pub gamma: f64,
    pub cutoff_radius: f64,
    pub band_lo: f64,
    pub band_hi: f64,
}

impl Settings {
    pub fn from_config(cfg: &Config) -> Result<Settings> {
        Ok(Settings {
            grid_dim: cfg.get_u64("grid.dim")?.unwrap_or(3) as usize,
            grid_n: cfg.get_u64("grid.n")?.unwrap_or(32) as usize,
            grid_len: cfg.get_f64("grid.len")?.unwrap_or(2.0 * std::f64::consts::PI),
            tau: cfg.get_f64("params.tau")?.unwrap_or(0.5),
            beta: cfg.get_f64("params.beta")?.unwrap_or(1.0),
            alpha: cfg.get_f64("params.alpha")?.unwrap_or(1.0),
            b_over_a: cfg.get_f64("params.b_over_a")?.unwrap_or(5.0),
            dt: cfg.get_f64("run.dt")?.unwrap_or(0.02),
            t_end: cfg.get_f64("run.t_end")?.unwrap_or(50.0),
            stride: cfg.get_u64("run.stride")?.unwrap_or(25) as usize,
            amplitude: cfg.get_f64("run.amplitude")?.unwrap_or(1e-3),
            seed: cfg.get_u64("run.seed")?.unwrap_or(7),
            gamma: cfg.get_f64("decay.gamma")?.unwrap_or(1.0),
            cutoff_radius: cfg.get_f64("cutoff.radius")?.unwrap_or(1.0),
            band_lo: cfg.get_f64("data.band_lo")?.unwrap_or(0.5),
            band_hi: cfg.get_f64("data.band_hi")?.unwrap_or(3.5),
        })
    }

    pub fn params(&self) -> Result<Params> {
        // positivity checked here; dissipativity depends on alpha and is
        // each command's concern (instability sweeps are legitimate)
        Ok(Params::new_unstable_allowed(self.tau, self.beta)?
            .with_b_over_a(self.b_over_a)?
            .with_alpha(self.alpha))
    }

    pub fn grid(&self) -> Result<GridSpec> {
        Ok(GridSpec::new(self.grid_dim, self.grid_n, self.grid_len)?)
    }

    pub fn torus(&self) -> Result<TorusConfig> {
        let mut t = TorusConfig::new(self.grid()?, self.params()?);
        t.amplitude = self.amplitude;
        t.seed = self.seed;
        t.dt = self.dt;
        t.t_end = self.t_end;
        t.stride = self.stride;
        t.band = (self.band_lo, self.band_hi);
        Ok(t)
    }
}

pub fn parse_profile(name: &str, gamma: f64, dim: usize) -> Result<RadialProfile> {
    let (head, args) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    Ok(match head {
        "gaussian" => RadialProfile::Gaussian {
            sigma: args.unwrap_or("1.0").parse().context("gaussian width")?,
        },
        "band" => {
            let a = args.unwrap_or("2,6");
            let (lo, hi) = a.split_once(',').context("band needs lo,hi")?;
            RadialProfile::Band {
                lo: lo.parse().context("band lo")?,
                hi: hi.parse().context("band hi")?,
            }
        }
        "powerlaw-lowfreq" => match args {
            Some(a) => RadialProfile::PowerlawLowfreq { a: a.parse().context("powerlaw exponent")? },
            None => RadialProfile::powerlaw_for_gamma(gamma, dim),
        },
        "flat-lowfreq" => RadialProfile::FlatLowfreq,
        other => bail!("unknown profile {other}; expected gaussian[:sigma], band[:lo,hi], powerlaw-lowfreq[:a], flat-lowfreq"),
    })
}

// ---------------------------------------------------------------------------

pub fn cmd_thresholds(s_reg: u32, out: &Path, cfg: &Config) -> Result<bool> {
    let mut manifest = Manifest::new("thresholds", cfg.echo(), None);
    let s0 = experiments::threshold_s0(s_reg).map_err(anyhow::Error::from)?;
    let ceil = experiments::m_ceilings(s_reg);

    let mut head = Csv::new(&["s", "s0", "ceil_m0", "ceil_m1", "ceil_m2", "ceil_m3", "ceil_m4", "ceil_m5"]);
    let mut row = vec![c_s(s_reg), c_s(s0)];
    row.extend(ceil.iter().map(|&v| c_f(v)));
    head.row(row);
    head.write(&out.join("thresholds.csv"))?;

    let mut table = Csv::new(&["k", "l", "m0", "m1", "m2", "m3", "m4", "m5"]);
    for k in 1..=s_reg {
        for l in 0..k {
            let m = experiments::m_exponents(k, l);
            let mut row = vec![c_s(k), c_s(l)];
            row.extend(m.iter().map(|&v| c_f(v)));
            table.row(row);
        }
    }
    table.write(&out.join("m_table.csv"))?;

    println!("s = {s_reg}: s0 = {s0}");
    let mut summary = Summary::default();
    summary.check("s0_computed", s0 as f64, "formula", true);
    summary.write(out, "thresholds")?;
    summary.print("thresholds");
    manifest.line(format!("s = {s_reg}, s0 = {s0}"));
    manifest.write(out)?;
    Ok(summary.all_pass())
}

pub struct ModesArgs {
    pub xi_min: f64,
    pub xi_max: f64,
    pub xi_points: usize,
    pub sweep_steps: usize,
    pub sweep_max: f64,
    pub lyapunov_points: usize,
}

pub fn cmd_modes(st: &Settings, args: &ModesArgs, out: &Path, cfg: &Config) -> Result<bool> {
    let mut manifest = Manifest::new("modes", cfg.echo(), Some(st.seed));
    let p = st.params()?;
    let mut summary = Summary::default();

    // dispersion rows over the log frequency grid; the envelope only
    // exists in the dissipative regime, the roots always do
    let xis = log_grid(args.xi_min, args.xi_max, args.xi_points);
    let env = if p.is_dissipative() {
        Some(abscissa_envelope(&p, &xis).map_err(anyhow::Error::from)?)
    } else {
        summary.note("non-dissipative parameters: envelope and Lyapunov certification skipped");
        None
    };
    let mut disp = Csv::new(&["xi", "re1", "im1", "re2", "im2", "re3", "im3", "abscissa", "envelope_bound"]);
    for (i, &xi) in xis.iter().enumerate() {
        let roots = modes::char_roots(xi, &p);
        let (absc, bound) = match &env {
            Some(e) => (e.abscissas[i], -e.c / 2.0 * xi * xi / (1.0 + xi * xi)),
            None => (modes::abscissa(xi, &p), f64::NAN),
        };
        let mut row = vec![c_f(xi)];
        for r in roots {
            row.push(c_f(r.re));
            row.push(c_f(r.im));
        }
        row.push(c_f(absc));
        row.push(c_f(bound));
        disp.row(row);
    }
    disp.write(&out.join("dispersion.csv"))?;
    if let Some(env) = &env {
        summary.check("envelope_constant_positive", env.c, "> 0", env.c > 0.0);
        if let Some(xi) = env.offending_xi {
            summary.note(format!("envelope violated at xi = {xi}"));
        }
    }

    // stability sweep over (tau, beta) against the algebraic oracle
    let steps = args.sweep_steps;
    let grid: Vec<f64> = (1..=steps).map(|i| args.sweep_max * i as f64 / steps as f64).collect();
    let sample_xis = [0.1, 1.0, 10.0, 100.0];
    let map = stability_region(&grid, &grid, &sample_xis, p.alpha);
    let mut stab = Csv::new(&["tau", "beta", "max_re", "stable", "hurwitz"]);
    // first row: the configured pair itself
    {
        let single = stability_region(&[p.tau], &[p.beta], &sample_xis, p.alpha);
        let hurwitz = modes::hurwitz_stable(p.tau, p.beta, p.alpha, 1.0);
        stab.row(vec![
            c_f(p.tau),
            c_f(p.beta),
            c_f(single.max_re[0]),
            c_s(single.stable[0]),
            c_s(hurwitz),
        ]);
        summary.note(format!(
            "configured pair (tau = {}, beta = {}): stable = {}",
            p.tau, p.beta, single.stable[0]
        ));
    }
    let mut mismatches = 0u64;
    let mut boundary_worst: f64 = 0.0;
    for (i, &tau) in map.taus.iter().enumerate() {
        for (j, &beta) in map.betas.iter().enumerate() {
            let idx = i * map.betas.len() + j;
            let hurwitz = modes::hurwitz_stable(tau, beta, p.alpha, 1.0);
            if map.stable[idx] != hurwitz {
                mismatches += 1;
            }
            if (beta - tau).abs() < 1e-12 {
                boundary_worst = boundary_worst.max(map.max_re[idx].abs());
            }
            stab.row(vec![
                c_f(tau),
                c_f(beta),
                c_f(map.max_re[idx]),
                c_s(map.stable[idx]),
                c_s(hurwitz),
            ]);
        }
    }
    stab.write(&out.join("stability.csv"))?;
    summary.check("stability_map_matches_hurwitz", mismatches as f64, "= 0", mismatches == 0);
    summary.check("boundary_abscissa_abs", boundary_worst, "<= 1e-8", boundary_worst <= 1e-8);

    // Lyapunov certification on a sparse sample
    if p.is_dissipative() {
        let lyap_xis = log_grid(args.xi_min, args.xi_max, args.lyapunov_points);
        let report =
            verify_lyapunov(&p, &lyap_xis, &LyapunovSearch::default()).map_err(anyhow::Error::from)?;
        let mut lyap = Csv::new(&["xi", "delta", "c", "kappa", "certified"]);
        for r in &report.rows {
            lyap.row(vec![c_f(r.xi), c_f(r.delta), c_f(r.c), c_f(r.kappa), c_s(r.certified)]);
        }
        lyap.write(&out.join("lyapunov.csv"))?;
        summary.check("lyapunov_all_certified", report.min_c, "> 0", report.all_certified);
        summary.check("lyapunov_kappa", report.max_kappa, "<= 0.5", report.max_kappa <= 0.5);
    }

    summary.write(out, "modes")?;
    summary.print("modes");
    if let Some(env) = &env {
        manifest.line(format!("envelope c = {}", env.c));
    }
    manifest.write(out)?;
    Ok(summary.all_pass())
}

pub fn cmd_decay(st: &Settings, profile: &str, svg: bool, out: &Path, cfg: &Config) -> Result<bool> {
    let mut manifest = Manifest::new("decay", cfg.echo(), Some(st.seed));
    let p = st.params()?;
    let profile = parse_profile(profile, st.gamma, st.grid_dim)?;
    let mut dcfg = DecayConfig::new(profile, p, st.grid_dim, st.gamma);
    dcfg.cutoff_radius = st.cutoff_radius;
    let report = experiments::decay_experiment(&dcfg).map_err(anyhow::Error::from)?;

    let mut series = Csv::new(&["t", "v_total", "v_low", "v_high", "cross_sq"]);
    for (i, &t) in report.series.times.iter().enumerate() {
        series.row(vec![
            c_f(t),
            c_f(report.series.total[i]),
            c_f(report.series.low[i]),
            c_f(report.series.high[i]),
            c_f(report.series.cross[i]),
        ]);
    }
    series.write(&out.join("decay_series.csv"))?;

    let mut fits = Csv::new(&[
        "band", "model", "exponent", "residual", "window_lo", "window_hi", "inconclusive",
        "ref_gamma", "ref_gamma_half", "ref_dim_quarter", "ref_min_abscissa",
    ]);
    for f in &report.fits {
        fits.row(vec![
            c_s(f.band.label()),
            c_s(f.model.label()),
            c_f(f.exponent),
            c_f(f.residual),
            c_f(f.window.0),
            c_f(f.window.1),
            c_s(f.inconclusive),
            c_f(report.references.gamma),
            c_f(report.references.gamma_half),
            c_f(report.references.dim_quarter),
            c_f(report.references.min_abscissa),
        ]);
    }
    fits.write(&out.join("decay_fits.csv"))?;

    let mut summary = Summary::default();
    summary.check(
        "splitting_identity_defect",
        report.splitting_defect,
        "<= 1e-10",
        report.splitting_defect <= 1e-10,
    );
    for f in &report.fits {
        summary.check(
            &format!("fit_{}_{}_residual", f.band.label(), f.model.label()),
            f.residual,
            "<= 0.02",
            !f.inconclusive,
        );
        summary.note(format!(
            "{} {} exponent = {} (references: gamma = {}, gamma/2 = {}, dim/4 = {}, min|abscissa| = {})",
            f.band.label(),
            f.model.label(),
            f.exponent,
            report.references.gamma,
            report.references.gamma_half,
            report.references.dim_quarter,
            report.references.min_abscissa,
        ));
    }
    if svg {
        svg_lines(
            &out.join("decay.svg"),
            "||V(t)|| by band",
            &[
                ("total", &report.series.times, &report.series.total),
                ("low", &report.series.times, &report.series.low),
                ("high", &report.series.times, &report.series.high),
            ],
            true,
            true,
        )?;
    }
    summary.write(out, "decay")?;
    summary.print("decay");
    manifest.line(format!("profile = {}", dcfg.profile.label()));
    manifest.line("zero-mode policy = project (torus discretization)");
    manifest.write(out)?;
    Ok(summary.all_pass())
}

pub struct SimulateArgs {
    pub scheme: String,
    pub nonlinear: bool,
    pub k_max: u32,
    pub track_gamma: bool,
    pub i_term_order: Option<u32>,
    pub save_fields: bool,
}

fn energy_csv(rows: &[EnergyRow], k_max: u32, gamma: Option<f64>, with_i: bool) -> Csv {
    let mut header: Vec<String> = vec!["t".into()];
    for k in 0..=k_max {
        header.push(format!("e{k}_sq"));
        header.push(format!("sup_e{k}_sq"));
        header.push(format!("diss{k}_sq"));
        header.push(format!("acc_d{k}_sq"));
    }
    header.push("e_s_sq".into());
    header.push("d_s_sq".into());
    if gamma.is_some() {
        header.extend(["e_neg_sq".into(), "sup_e_neg_sq".into(), "diss_neg_sq".into(), "acc_d_neg_sq".into()]);
    }
    header.push("m0".into());
    if with_i {
        for i in 1..=5 {
            header.push(format!("i{i}"));
        }
    }
    let mut csv = Csv::new(&header);
    for row in rows {
        let mut cells = vec![c_f(row.t)];
        for k in 0..=(k_max as usize) {
            cells.push(c_f(row.e_k_sq[k]));
            cells.push(c_f(row.sup_e_k_sq[k]));
            cells.push(c_f(row.diss_k_sq[k]));
            cells.push(c_f(row.acc_d_k_sq[k]));
        }
        cells.push(c_f(row.e_s_sq));
        cells.push(c_f(row.d_s_sq));
        if gamma.is_some() {
            cells.push(c_f(row.e_neg_sq.unwrap_or(0.0)));
            cells.push(c_f(row.sup_e_neg_sq.unwrap_or(0.0)));
            cells.push(c_f(row.diss_neg_sq.unwrap_or(0.0)));
            cells.push(c_f(row.acc_d_neg_sq.unwrap_or(0.0)));
        }
        cells.push(c_f(row.m0));
        if with_i {
            let it = row.i_terms.unwrap_or([0.0; 5]);
            cells.extend(it.iter().map(|&v| c_f(v)));
        }
        csv.row(cells);
    }
    csv
}

pub fn cmd_simulate(st: &Settings, args: &SimulateArgs, svg: bool, out: &Path, cfg: &Config) -> Result<bool> {
    let mut manifest = Manifest::new("simulate", cfg.echo(), Some(st.seed));
    let p = st.params()?;
    let torus = st.torus()?;
    let scheme = Scheme::parse(&args.scheme).map_err(anyhow::Error::from)?;
    let state0 = torus.initial_state();
    let step_cfg = StepperConfig::new(scheme, st.dt, st.t_end, st.stride).map_err(anyhow::Error::from)?;
    let gamma = args.track_gamma.then_some(st.gamma);
    let mut tracker = jmgt_core::energy::EnergyTracker::new(&p, args.k_max, gamma, args.i_term_order);
    let (final_state, rep) = evolve(&state0, &p, &step_cfg, args.nonlinear, |t, s| tracker.observe(t, s))
        .map_err(anyhow::Error::from)?;
    let rows = tracker.finish().map_err(anyhow::Error::from)?;

    energy_csv(&rows, args.k_max, gamma, args.i_term_order.is_some()).write(&out.join("energy.csv"))?;
    if args.save_fields {
        let real = final_state.to_real();
        fieldio::write_field(&out.join("u.field"), &real.u).map_err(anyhow::Error::from)?;
        fieldio::write_field(&out.join("v.field"), &real.v).map_err(anyhow::Error::from)?;
        fieldio::write_field(&out.join("w.field"), &real.w).map_err(anyhow::Error::from)?;
    }
    if svg {
        let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
        let e0: Vec<f64> = rows.iter().map(|r| r.e_k_sq[0]).collect();
        let d0: Vec<f64> = rows.iter().map(|r| r.acc_d_k_sq[0]).collect();
        svg_lines(
            &out.join("energy.svg"),
            "order-0 energy and accumulated dissipation",
            &[("e0_sq", &ts, &e0), ("acc_d0_sq", &ts, &d0)],
            false,
            true,
        )?;
    }
    let mut summary = Summary::default();
    summary.check("steps_completed", rep.steps as f64, ">= 1", rep.steps >= 1);
    for w in &rep.warnings {
        summary.note(w);
    }
    summary.write(out, "simulate")?;
    summary.print("simulate");
    manifest.line(format!("steps = {}, t_final = {}", rep.steps, rep.t_final));
    manifest.line("zero-mode policy = project (torus discretization)");
    manifest.line("dissipation integrals = trapezoid at the observation stride");
    manifest.write(out)?;
    Ok(summary.all_pass())
}

pub struct BoundedArgs {
    pub s: u32,
    pub nonlinear: bool,
    pub companion: bool,
    pub boost: f64,
    pub boost_mode: i64,
    /// Initial-data band; kept well below the boost mode so the companion
    /// leaves the threshold-order energy unchanged.
    pub band: (f64, f64),
}

pub fn cmd_bounded(st: &Settings, args: &BoundedArgs, out: &Path, cfg: &Config) -> Result<bool> {
    let manifest = Manifest::new("bounded", cfg.echo(), Some(st.seed));
    let mut torus = st.torus()?;
    torus.band = args.band;
    let bcfg = BoundednessConfig {
        torus,
        s: args.s,
        nonlinear: args.nonlinear,
        gamma: Some(st.gamma),
        companion_boost: args.companion.then_some((args.boost, args.boost_mode)),
    };
    let (base, companion) = experiments::boundedness_experiment(&bcfg).map_err(anyhow::Error::from)?;

    let mut csv = Csv::new(&["run", "t", "e_s0_sq_running", "e0_sq", "acc_d0_sq", "e_hi_sq"]);
    let s0 = experiments::threshold_s0(args.s).map_err(anyhow::Error::from)? as usize;
    let k_hi = s0 + experiments::HIGH_ORDER_OFFSET as usize;
    let dump = |name: &str, run: &experiments::BoundednessRun, csv: &mut Csv| {
        for row in &run.rows {
            let e_s0: f64 = row.sup_e_k_sq.iter().take(s0 + 1).sum();
            csv.row(vec![
                c_s(name),
                c_f(row.t),
                c_f(e_s0),
                c_f(row.e_k_sq[0]),
                c_f(row.acc_d_k_sq[0]),
                c_f(row.e_k_sq[k_hi]),
            ]);
        }
    };
    dump("base", &base, &mut csv);
    if let Some(c) = &companion {
        dump("companion", c, &mut csv);
    }
    csv.write(&out.join("bounded.csv"))?;

    let mut summary = Summary::default();
    let growth = if base.e_s0_sq_initial > 0.0 {
        (base.e_s0_sq_sup / base.e_s0_sq_initial).sqrt()
    } else {
        1.0
    };
    summary.check("base_e_s0_growth", growth, "<= 2", growth <= 2.0 && !base.blew_up);
    summary.check("base_c_order_zero", base.c_order_zero, "<= 10", base.c_order_zero <= 10.0);
    if let Some(cn) = base.c_negative {
        summary.check("base_c_negative", cn, "<= 10", cn <= 10.0);
    }
    if let Some(c) = &companion {
        let growth_c = if c.e_s0_sq_initial > 0.0 {
            (c.e_s0_sq_sup / c.e_s0_sq_initial).sqrt()
        } else {
            1.0
        };
        let e_s0_match = (c.e_s0_sq_initial / base.e_s0_sq_initial - 1.0).abs();
        let hi_ratio = (c.e_hi_sq_initial / base.e_hi_sq_initial).sqrt();
        summary.check("companion_e_s0_growth", growth_c, "<= 2", growth_c <= 2.0 && !c.blew_up);
        summary.check("companion_e_s0_match", e_s0_match, "<= 0.02", e_s0_match <= 0.02);
        summary.check(
            "companion_high_order_norm_ratio",
            hi_ratio,
            &format!(">= {}", args.boost * 0.99),
            hi_ratio >= args.boost * 0.99,
        );
    }
    for w in base.warnings.iter().chain(companion.iter().flat_map(|c| c.warnings.iter())) {
        summary.note(w);
    }
    summary.write(out, "bounded")?;
    summary.print("bounded");
    manifest.write(out)?;
    Ok(summary.all_pass())
}

pub struct BootstrapArgs {
    pub s: u32,
    pub k: u32,
    pub amplitudes: Vec<f64>,
}

pub fn cmd_bootstrap(st: &Settings, args: &BootstrapArgs, out: &Path, cfg: &Config) -> Result<bool> {
    let manifest = Manifest::new("bootstrap", cfg.echo(), Some(st.seed));
    let torus = st.torus()?;
    let (reports, slopes) =
        experiments::bootstrap_sweep(&torus, args.s, args.k, &args.amplitudes).map_err(anyhow::Error::from)?;

    let mut csv = Csv::new(&[
        "amplitude", "e_s0_initial", "t", "i1", "i2", "i3", "i4", "i5", "diss_pair",
    ]);
    for (amp, rep) in args.amplitudes.iter().zip(&reports) {
        for row in &rep.rows {
            let mut cells = vec![c_f(*amp), c_f(rep.e_s0_initial), c_f(row.t)];
            cells.extend(row.i_terms.iter().map(|&v| c_f(v)));
            cells.push(c_f(row.diss_pair));
            csv.row(cells);
        }
    }
    csv.write(&out.join("bootstrap.csv"))?;

    let mut slope_csv = Csv::new(&["i_term", "slope", "integrated_ratios"]);
    let mut summary = Summary::default();
    for (i, &slope) in slopes.iter().enumerate() {
        let ratios: Vec<String> = reports.iter().map(|r| c_f(r.integrated_ratios[i])).collect();
        slope_csv.row(vec![c_s(i + 1), c_f(slope), ratios.join(";")]);
        summary.check(
            &format!("i{}_ratio_slope", i + 1),
            slope,
            "1.0 +- 0.15",
            (slope - 1.0).abs() <= 0.15,
        );
    }
    slope_csv.write(&out.join("bootstrap_slopes.csv"))?;
    summary.write(out, "bootstrap")?;
    summary.print("bootstrap");
    manifest.write(out)?;
    Ok(summary.all_pass())
}

pub fn cmd_inequalities(suite_filter: Option<&str>, out: &Path, cfg: &Config) -> Result<bool> {
    let manifest = Manifest::new("inequalities", cfg.echo(), None);
    let family_grid = GridSpec::new(3, 64, 2.0 * std::f64::consts::PI).map_err(anyhow::Error::from)?;
    let scan_grid = GridSpec::new(3, 128, 4.0 * std::f64::consts::PI).map_err(anyhow::Error::from)?;
    let mut summary = Summary::default();

    let mut rows = Csv::new(&["suite", "inequality", "params", "function", "lambda", "ratio"]);
    let mut constants = Csv::new(&["suite", "c_hat", "witness", "dilation_drift"]);

    // the exact single-mode equality of the negative-index instance
    let neg = jmgt_core::inequality::InequalitySpec::Neg {
        l: Rational64::from_integer(0),
        gamma: Rational64::from_integer(1),
        theta: Rational64::new(1, 2),
    };
    let single = jmgt_core::field::SpectralField::single_mode(&family_grid, [2, 0, 0], 1.0)
        .map_err(anyhow::Error::from)?;
    let single_ratio = check_inequality(&neg, &single).map_err(anyhow::Error::from)?;
    summary.check(
        "neg_single_mode_ratio",
        single_ratio,
        "= 1 (1e-12)",
        (single_ratio - 1.0).abs() < 1e-12,
    );
    rows.row(vec![
        c_s("builtin"),
        c_s("NEG"),
        neg.params_label(),
        c_s("single-mode(|xi|=2)"),
        c_f(1.0),
        c_f(single_ratio),
    ]);

    for suite in preregistered_suites() {
        if let Some(f) = suite_filter {
            if suite.name != f {
                continue;
            }
        }
        let (c_hat, witness) =
            empirical_constant(&suite.spec, &suite.family, &family_grid).map_err(anyhow::Error::from)?;
        for f in &suite.family {
            let field = f.realize(&family_grid).map_err(anyhow::Error::from)?;
            let ratio = check_inequality(&suite.spec, &field).map_err(anyhow::Error::from)?;
            rows.row(vec![
                c_s(&suite.name),
                c_s(suite.spec.id()),
                suite.spec.params_label(),
                f.label(),
                c_f(1.0),
                c_f(ratio),
            ]);
        }
        // dilation scan on the widest smooth member that survives the scan range
        let scan_fn = suite
            .family
            .iter()
            .find(|f| matches!(f, TestFunction::GaussianBump { sigma } | TestFunction::GaussianDeriv { sigma } if *sigma >= 0.5));
        let mut drift = 0.0f64;
        if let Some(f) = scan_fn {
            let scan = dilation_scan(&suite.spec, f, &scan_grid, &suite.lambdas).map_err(anyhow::Error::from)?;
            let base = scan
                .iter()
                .find(|(l, _)| *l == 1.0)
                .map(|(_, r)| *r)
                .unwrap_or(scan[0].1);
            for (lam, ratio) in &scan {
                drift = drift.max((ratio - base).abs() / base);
                rows.row(vec![
                    c_s(&suite.name),
                    c_s(suite.spec.id()),
                    suite.spec.params_label(),
                    f.label(),
                    c_f(*lam),
                    c_f(*ratio),
                ]);
            }
        }
        constants.row(vec![c_s(&suite.name), c_f(c_hat), witness.clone(), c_f(drift)]);
        summary.check(&format!("{}_c_finite", suite.name), c_hat, "finite", c_hat.is_finite() && c_hat > 0.0);
        summary.check(&format!("{}_dilation_drift", suite.name), drift, "<= 0.05", drift <= 0.05);
    }
    rows.write(&out.join("inequalities.csv"))?;
    constants.write(&out.join("inequality_constants.csv"))?;
    summary.write(out, "inequalities")?;
    summary.print("inequalities");
    manifest.write(out)?;
    Ok(summary.all_pass())
}

/// Aggregate the `*.summary.csv` files in the output directory.
pub fn cmd_report(out: &Path) -> Result<bool> {
    let mut all_pass = true;
    let mut lines = Vec::new();
    let mut entries: Vec<_> = std::fs::read_dir(out)
        .with_context(|| format!("reading {}", out.display()))?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.file_name().is_some_and(|n| n.to_string_lossy().ends_with(".summary.csv")))
        .collect();
    entries.sort();
    if entries.is_empty() {
        bail!("no summary files under {}; run a subcommand first", out.display());
    }
    for path in entries {
        let name = path.file_name().unwrap().to_string_lossy().replace(".summary.csv", "");
        let text = std::fs::read_to_string(&path)?;
        for line in text.lines().skip(1) {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() < 4 {
                continue;
            }
            let pass = cells[3] == "pass";
            all_pass &= pass;
            lines.push(format!(
                "[{}] {name}: {} = {} (threshold {})",
                if pass { "pass" } else { "FLAG" },
                cells[0],
                cells[1],
                cells[2]
            ));
        }
    }
    let body = lines.join("\n") + "\n";
    std::fs::write(out.join("report.txt"), &body)?;
    print!("{body}");
    println!("overall: {}", if all_pass { "pass" } else { "FLAGGED" });
    Ok(all_pass)
}

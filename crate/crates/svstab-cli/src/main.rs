//! svstab: spectral stability of Saint-Venant hydraulic shocks and roll
//! waves. Exit codes: 0 success, 2 when a stability scan finds an unstable
//! verdict (script-friendly), 1 on error.

mod config;
mod sweep;

use clap::{Args, Parser, Subcommand};
use config::{params_json, parse_range, resolve_f64, resolve_usize, Config};
use serde_json::json;
use std::path::PathBuf;
use svstab::brock::{brock_table, classify, fit_way, one_d_verdict, rescale, OneDVerdict};
use svstab::error::Result;
use svstab::essential::{
    bounded_freq_weight_check, collision_curve, optimal_weight, weight_window, WeightWindow,
};
use svstab::evans::hydro::{scan_shock, ShockContourSpec};
use svstab::evans::roll::{scan_roll, RollContourSpec, RollEvans};
use svstab::highfreq::{hf_index, hf_verdict, shock_turning_ranges, TurningFamily};
use svstab::io::{write_csv, write_json, Manifest};
use svstab::lowfreq::{lf_indices, taylor_coeffs, weierstrass_coeffs, TaylorOptions};
use svstab::model::thresholds;
use svstab::oblique::{oblique_shoot, vs_max, ShootOutcome};
use svstab::profiles::{classify_shock, roll_wave, shock_profile};
use svstab::sim::diagnostics::{phase_check, run_dambreak, run_rollwave};
use svstab::sim::{BcX, BcY, Bump, Initial, SimConfig};
use svstab::surface::{channel_verdict, follow_surface, ChannelBc, SurfaceGrid};

#[derive(Parser)]
#[command(name = "svstab", version, about)]
struct Cli {
    /// Optional config file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (also SVSTAB_WORKERS)
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory for artifacts
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct wave profiles (shock, roll, oblique) and export samples
    Profile(ProfileArgs),
    /// Endstate dispersion analysis: thresholds, weight windows, collisions
    Spectrum(SpectrumArgs),
    /// Evans / Evans-Lopatinsky winding scans
    Evans(EvansArgs),
    /// Low-frequency Taylor bundle, Weierstrass coefficients, indices
    Lowfreq(LowfreqArgs),
    /// Stability-boundary continuation in the (F, H-) plane
    Diagram(DiagramArgs),
    /// Critical channel width and lattice verdicts
    Channel(ChannelArgs),
    /// Finite-volume time evolution experiments
    Sim(SimArgs),
    /// Brock table pipeline: rescaling, fits, classification
    Brock(BrockArgs),
    /// High-frequency turning-point index scan
    Highfreq(HighfreqArgs),
}

#[derive(Args)]
struct ProfileArgs {
    /// shock | roll | oblique
    kind: String,
    #[arg(long)]
    froude: Option<f64>,
    /// H_R for shocks (alternative to --nu)
    #[arg(long)]
    hr: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    hminus: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    /// vs - (-tan theta) offset for oblique shooting
    #[arg(long)]
    vs_offset: Option<f64>,
    #[arg(long)]
    resolution: Option<usize>,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    froude: Option<f64>,
    #[arg(long)]
    hr: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    /// weight; "opt" selects the optimal midpoint
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    kmax: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    /// trace the gamma-collision curve over this eta range (start:step:end)
    #[arg(long)]
    collision_eta: Option<String>,
}

#[derive(Args)]
struct EvansArgs {
    /// shock | roll
    kind: String,
    #[arg(long)]
    froude: Option<f64>,
    #[arg(long)]
    hr: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    hminus: Option<f64>,
    /// transverse frequencies, e.g. 0:0.2:6
    #[arg(long)]
    eta: Option<String>,
    /// Floquet numbers xi X for roll scans, e.g. -3:0.5:3
    #[arg(long)]
    xix: Option<String>,
    #[arg(long)]
    r_inner: Option<f64>,
    #[arg(long)]
    r_outer: Option<f64>,
    /// grid sweep over F values (paired against --hr-list), checkpointed
    #[arg(long)]
    f_list: Option<String>,
    #[arg(long)]
    hr_list: Option<String>,
    /// resume a checkpointed sweep in --out
    #[arg(long, default_value_t = false)]
    resume: bool,
    /// dump contour samples as CSV
    #[arg(long, default_value_t = false)]
    dump_contours: bool,
}

#[derive(Args)]
struct LowfreqArgs {
    #[arg(long)]
    froude: Option<f64>,
    #[arg(long)]
    hminus: Option<f64>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, default_value_t = false)]
    no_convergence_check: bool,
}

#[derive(Args)]
struct DiagramArgs {
    /// level-set functional: ind1 | ind2 | ind3 | lambda-r
    #[arg(long)]
    kind: String,
    /// level value c of the traced set
    #[arg(long, default_value_t = 0.0)]
    level: f64,
    #[arg(long)]
    seed_f: f64,
    #[arg(long)]
    seed_hminus: f64,
    #[arg(long)]
    f_min: Option<f64>,
    #[arg(long)]
    f_max: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    max_steps: Option<usize>,
}

#[derive(Args)]
struct ChannelArgs {
    #[arg(long)]
    froude: Option<f64>,
    #[arg(long)]
    hminus: Option<f64>,
    #[arg(long)]
    width: Option<f64>,
    /// wall | periodic
    #[arg(long, default_value = "wall")]
    bc: String,
    #[arg(long)]
    eta_max: Option<f64>,
    #[arg(long)]
    n_eta: Option<usize>,
    #[arg(long)]
    n_xi: Option<usize>,
}

#[derive(Args)]
struct SimArgs {
    /// dambreak | rollwave | flat | oblique
    kind: String,
    #[arg(long)]
    froude: Option<f64>,
    #[arg(long)]
    hr: Option<f64>,
    #[arg(long)]
    hminus: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    length: Option<f64>,
    #[arg(long)]
    width: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    cfl: Option<f64>,
    /// wall | periodic transverse boundary
    #[arg(long, default_value = "wall")]
    bc_y: String,
    #[arg(long)]
    bump_amplitude: Option<f64>,
    /// enable the long experiments (flapping runs to t ~ 1000)
    #[arg(long, default_value_t = false)]
    long: bool,
    /// predicted (tau*, xi* X) for the phase check of flapping runs
    #[arg(long)]
    tau_star: Option<f64>,
    #[arg(long)]
    xix_star: Option<f64>,
    #[arg(long)]
    sample_dt: Option<f64>,
}

#[derive(Args)]
struct BrockArgs {
    /// brock | converted | tway1..tway6
    #[arg(long, default_value = "converted")]
    table: String,
    /// also compute 1d verdicts for integrable fits (slower)
    #[arg(long, default_value_t = false)]
    classify: bool,
    /// compute the critical channel width for this case id (needs --table twayN)
    #[arg(long)]
    l_star_case: Option<usize>,
}

#[derive(Args)]
struct HighfreqArgs {
    #[arg(long)]
    froude: Option<f64>,
    #[arg(long)]
    hr: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    #[arg(long)]
    grid: Option<usize>,
}

fn main() {
    let cli = Cli::parse();
    let workers = cli
        .workers
        .or_else(|| std::env::var("SVSTAB_WORKERS").ok().and_then(|v| v.parse().ok()));
    if let Some(n) = workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .ok();
    }
    let cfg = match &cli.config {
        Some(path) => match Config::load(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                std::process::exit(1);
            }
        },
        None => Config::default(),
    };
    let code = match run(cli, cfg) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    };
    std::process::exit(code);
}

fn nu_from(hr: Option<f64>, nu: Option<f64>) -> Result<f64> {
    match (hr, nu) {
        (Some(h), None) => Ok((1.0 / h).sqrt()),
        (None, Some(n)) => Ok(n),
        (Some(_), Some(_)) => Err(svstab::error::Error::Config(
            "--hr and --nu are mutually exclusive".into(),
        )),
        (None, None) => Err(svstab::error::Error::Config(
            "one of --hr or --nu is required".into(),
        )),
    }
}

fn run(cli: Cli, cfg: Config) -> Result<i32> {
    let out = cli.out.clone();
    match cli.command {
        Command::Profile(a) => cmd_profile(a, &cfg, &out),
        Command::Spectrum(a) => cmd_spectrum(a, &cfg, &out),
        Command::Evans(a) => cmd_evans(a, &cfg, &out),
        Command::Lowfreq(a) => cmd_lowfreq(a, &cfg, &out),
        Command::Diagram(a) => cmd_diagram(a, &cfg, &out),
        Command::Channel(a) => cmd_channel(a, &cfg, &out),
        Command::Sim(a) => cmd_sim(a, &cfg, &out),
        Command::Brock(a) => cmd_brock(a, &cfg, &out),
        Command::Highfreq(a) => cmd_highfreq(a, &cfg, &out),
    }
}

fn cmd_profile(a: ProfileArgs, cfg: &Config, out: &PathBuf) -> Result<i32> {
    let res = resolve_usize(a.resolution, cfg.get_usize("profile", "resolution"), 400);
    match a.kind.as_str() {
        "shock" => {
            let froude = resolve_f64(a.froude, cfg.get_f64("profile", "froude"), 2.05);
            let nu = nu_from(a.hr, a.nu)?;
            let p = shock_profile(froude, nu, res)?;
            let rows: Vec<Vec<String>> = p
                .samples
                .iter()
                .map(|&(x, h)| {
                    vec![format!("{x:.12e}"), format!("{h:.12e}"), format!("{:.12e}", p.momentum(h))]
                })
                .collect();
            write_csv(&out.join("profile.csv"), &["x", "H", "Q"], &rows)?;
            write_json(
                &out.join("profile.json"),
                &json!({
                    "kind": format!("{:?}", p.kind),
                    "s": p.s, "q": p.q, "h_star": p.h_star,
                    "sonic": p.hs_singular,
                    "classify": format!("{:?}", classify_shock(froude, nu)?),
                }),
            )?;
            Manifest::new(
                "profile shock",
                params_json(&[("froude", json!(froude)), ("nu", json!(nu))]),
                json!({}),
            )
            .write(out)?;
            println!("shock profile ({:?}) written to {}", p.kind, out.display());
            Ok(0)
        }
        "roll" => {
            let froude = resolve_f64(a.froude, cfg.get_f64("profile", "froude"), 6.0);
            let hminus = resolve_f64(a.hminus, cfg.get_f64("profile", "hminus"), 0.28);
            let w = roll_wave(froude, hminus, res)?;
            let rows: Vec<Vec<String>> = w
                .samples
                .iter()
                .map(|&(x, h)| {
                    vec![format!("{x:.12e}"), format!("{h:.12e}"), format!("{:.12e}", w.momentum(h))]
                })
                .collect();
            write_csv(&out.join("profile.csv"), &["x", "H", "Q"], &rows)?;
            write_json(
                &out.join("profile.json"),
                &json!({
                    "h_plus": w.h_plus, "period": w.period, "c": w.c,
                    "sonic_x": w.sonic_x,
                }),
            )?;
            println!(
                "roll wave X = {:.6}, H+ = {:.6} written to {}",
                w.period,
                w.h_plus,
                out.display()
            );
            Ok(0)
        }
        "oblique" => {
            let froude = resolve_f64(a.froude, cfg.get_f64("profile", "froude"), 2.5);
            let theta = resolve_f64(a.theta, cfg.get_f64("profile", "theta"), -0.1);
            let vs = -theta.tan() + a.vs_offset.unwrap_or(4e-4);
            match oblique_shoot(froude, theta, vs, 1e-6)? {
                ShootOutcome::Wave(w) => {
                    let rows: Vec<Vec<String>> = w
                        .orbit
                        .iter()
                        .map(|&(x, u, v)| {
                            vec![
                                format!("{x:.10e}"),
                                format!("{u:.10e}"),
                                format!("{v:.10e}"),
                                format!("{:.10e}", w.params.height(u)),
                            ]
                        })
                        .collect();
                    write_csv(&out.join("oblique.csv"), &["x", "u", "v", "h"], &rows)?;
                    write_json(
                        &out.join("oblique.json"),
                        &json!({
                            "period": w.period, "x_minus": w.x_minus, "x_plus": w.x_plus,
                            "rh_residual": w.rh_residual, "s": w.params.s, "q0": w.params.q0,
                            "vs_max": vs_max(froude, theta, 1e-6, 1e-6)?,
                        }),
                    )?;
                    println!("oblique wave period = {:.4}", w.period);
                    Ok(0)
                }
                ShootOutcome::NoWave { best_residual } => {
                    println!("no oblique wave (best residual {best_residual:.3e})");
                    Ok(2)
                }
            }
        }
        other => Err(svstab::error::Error::Config(format!(
            "unknown profile kind {other}"
        ))),
    }
}

fn cmd_spectrum(a: SpectrumArgs, cfg: &Config, out: &PathBuf) -> Result<i32> {
    let froude = resolve_f64(a.froude, cfg.get_f64("spectrum", "froude"), 2.2);
    let nu = nu_from(a.hr, a.nu)?;
    let t = thresholds(nu)?;
    let window = weight_window(froude, nu)?;
    let mu = match a.mu.as_deref() {
        Some("opt") => optimal_weight(froude, nu)?.mu,
        Some(v) => v
            .parse()
            .map_err(|_| svstab::error::Error::Config(format!("bad --mu {v}")))?,
        None => match window {
            WeightWindow::Window { lo, hi } => 0.5 * (lo + hi),
            _ => 0.0,
        },
    };
    let kmax = resolve_f64(a.kmax, cfg.get_f64("spectrum", "kmax"), 50.0);
    let step = resolve_f64(a.step, cfg.get_f64("spectrum", "step"), 0.1);
    let check = bounded_freq_weight_check(froude, nu, mu, kmax, step)?;
    let mut result = json!({
        "thresholds": t,
        "weight_window": window,
        "mu": mu,
        "bounded_check": check,
    });
    if let Some(spec) = &a.collision_eta {
        let etas = parse_range(spec)?;
        let (lo, hi) = (etas[0], *etas.last().unwrap());
        let curve = collision_curve(froude, 1.0 / (nu * nu), lo, hi, etas.len().max(16))?;
        let rows: Vec<Vec<String>> = curve
            .samples
            .iter()
            .map(|s| {
                vec![
                    format!("{:.10e}", s.eta),
                    format!("{:.10e}", s.lambda_re),
                    format!("{:.10e}", s.lambda_im),
                    format!("{}", s.double_below_third),
                ]
            })
            .collect();
        write_csv(
            &out.join("collision.csv"),
            &["eta", "re_lambda", "im_lambda", "double_below_third"],
            &rows,
        )?;
        result["collision_intercept"] = json!(curve.imaginary_intercept);
    }
    write_json(&out.join("spectrum.json"), &result)?;
    Manifest::new(
        "spectrum",
        params_json(&[("froude", json!(froude)), ("nu", json!(nu)), ("mu", json!(mu))]),
        json!({"kmax": kmax, "step": step}),
    )
    .write(out)?;
    let stable = check.stable;
    println!(
        "bounded-frequency check: {} (max Re = {:.3e} at (k, eta) = ({:.2}, {:.2}))",
        if stable { "stable" } else { "unstable" },
        check.max_re,
        check.argmax.0,
        check.argmax.1
    );
    Ok(if stable { 0 } else { 2 })
}

fn cmd_evans(a: EvansArgs, cfg: &Config, out: &PathBuf) -> Result<i32> {
    match a.kind.as_str() {
        "shock" => {
            let eta_spec = a
                .eta
                .or_else(|| cfg.get_str("evans", "eta"))
                .unwrap_or_else(|| "0:0.2:6".into());
            let etas = parse_range(&eta_spec)?;
            let spec = ShockContourSpec {
                r_inner: resolve_f64(a.r_inner, cfg.get_f64("evans", "r_inner"), 0.1),
                r_outer: resolve_f64(a.r_outer, cfg.get_f64("evans", "r_outer"), 30.0),
                ..Default::default()
            };
            // sweep mode when lists are given, single otherwise
            let pairs: Vec<(f64, f64)> = match (&a.f_list, &a.hr_list) {
                (Some(fl), Some(hl)) => {
                    let fs = parse_range(fl)?;
                    let hs = parse_range(hl)?;
                    fs.iter()
                        .flat_map(|f| hs.iter().map(move |h| (*f, *h)))
                        .collect()
                }
                _ => {
                    let froude = resolve_f64(a.froude, cfg.get_f64("evans", "froude"), 2.05);
                    let hr = a.hr.ok_or_else(|| {
                        svstab::error::Error::Config("--hr required for shock scans".into())
                    })?;
                    vec![(froude, hr)]
                }
            };
            let mut ck = sweep::Checkpoint::open(out)?;
            let mut any_unstable = false;
            let mut rows = Vec::new();
            for (froude, hr) in pairs {
                let key = sweep::Checkpoint::key(&[
                    format!("{froude:.6}"),
                    format!("{hr:.6}"),
                    eta_spec.clone(),
                    format!("{}-{}", spec.r_inner, spec.r_outer),
                ]);
                let report_val = if a.resume && ck.get(&key).is_some() {
                    ck.get(&key).unwrap().clone()
                } else {
                    let nu = (1.0 / hr).sqrt();
                    let report = scan_shock(froude, nu, &etas, &spec)?;
                    if a.dump_contours {
                        for s in &report.scans {
                            let rows: Vec<Vec<String>> = s
                                .lambda
                                .iter()
                                .zip(&s.values)
                                .map(|(l, v)| {
                                    vec![
                                        format!("{:.10e}", l.re),
                                        format!("{:.10e}", l.im),
                                        format!("{:.10e}", v.re),
                                        format!("{:.10e}", v.im),
                                    ]
                                })
                                .collect();
                            write_csv(
                                &out.join(format!(
                                    "contour_F{froude:.3}_HR{hr:.3}_eta{:.3}.csv",
                                    s.eta
                                )),
                                &["re_lambda", "im_lambda", "re_d", "im_d"],
                                &rows,
                            )?;
                        }
                    }
                    let val = json!({
                        "froude": froude, "hr": hr,
                        "windings": report.scans.iter().map(|s| (s.eta, s.winding)).collect::<Vec<_>>(),
                        "all_zero": report.all_zero,
                        "essential_unstable": report.essential_unstable,
                    });
                    ck.record(&key, &val)?;
                    val
                };
                let all_zero = report_val["all_zero"].as_bool().unwrap_or(false);
                let essential = report_val["essential_unstable"].as_bool().unwrap_or(false);
                if !all_zero || essential {
                    any_unstable = true;
                }
                rows.push(vec![
                    format!("{froude}"),
                    format!("{hr}"),
                    format!("{all_zero}"),
                    format!("{essential}"),
                ]);
                println!(
                    "(F, H_R) = ({froude}, {hr}): {}",
                    if essential {
                        "2d essentially unstable (F >= F_2d)".into()
                    } else if all_zero {
                        "no unstable point spectra (all windings 0)".to_string()
                    } else {
                        "NONZERO WINDING".to_string()
                    }
                );
            }
            write_csv(
                &out.join("shock_scan.csv"),
                &["froude", "hr", "all_zero", "essential_unstable"],
                &rows,
            )?;
            Manifest::new("evans shock", json!({"eta": eta_spec}), json!({"contour": spec}))
                .write(out)?;
            Ok(if any_unstable { 2 } else { 0 })
        }
        "roll" => {
            let froude = resolve_f64(a.froude, cfg.get_f64("evans", "froude"), 6.0);
            let hminus = resolve_f64(a.hminus, cfg.get_f64("evans", "hminus"), 0.28);
            let etas = parse_range(&a.eta.unwrap_or_else(|| "0:1:6".into()))?;
            let xixs = parse_range(&a.xix.unwrap_or_else(|| "-3:0.5:3".into()))?;
            let wave = roll_wave(froude, hminus, 64)?;
            let xis: Vec<f64> = xixs.iter().map(|x| x / wave.period).collect();
            let spec = RollContourSpec {
                radius: resolve_f64(a.r_outer, cfg.get_f64("evans", "r_outer"), 5.0),
                ..Default::default()
            };
            let report = scan_roll(&wave, &etas, &xis, &spec)?;
            let rows: Vec<Vec<String>> = report
                .table
                .iter()
                .map(|(e, x, w)| {
                    vec![format!("{e}"), format!("{:.6}", x * wave.period), format!("{w}")]
                })
                .collect();
            write_csv(&out.join("roll_scan.csv"), &["eta", "xiX", "winding"], &rows)?;
            println!(
                "roll scan: {}",
                if report.all_zero {
                    "no unstable Floquet spectra at sampled frequencies"
                } else {
                    "NONZERO WINDING FOUND"
                }
            );
            Ok(if report.all_zero { 0 } else { 2 })
        }
        other => Err(svstab::error::Error::Config(format!(
            "unknown evans kind {other}"
        ))),
    }
}

fn cmd_lowfreq(a: LowfreqArgs, cfg: &Config, out: &PathBuf) -> Result<i32> {
    let froude = resolve_f64(a.froude, cfg.get_f64("lowfreq", "froude"), 6.0);
    let hminus = resolve_f64(a.hminus, cfg.get_f64("lowfreq", "hminus"), 0.28);
    let ev = RollEvans::from_params(froude, hminus)?;
    let opts = TaylorOptions {
        nodes: resolve_usize(a.nodes, cfg.get_usize("lowfreq", "nodes"), 256),
        radius: resolve_f64(a.radius, cfg.get_f64("lowfreq", "radius"), 0.05),
        convergence_check: !a.no_convergence_check,
        ..Default::default()
    };
    let bundle = taylor_coeffs(&ev, &opts)?;
    let w = weierstrass_coeffs(&bundle)?;
    let idx = lf_indices(&w, 1e-7)?;
    let dump = json!({
        "lambda_r": ev.lambda_r,
        "structural_residual": bundle.structural_residual,
        "convergence_residual": bundle.convergence_residual,
        "weierstrass": w,
        "indices": idx,
        "a": bundle.a.iter().map(|(k, v)| (format!("{k:?}"), (v.re, v.im))).collect::<Vec<_>>(),
    });
    write_json(&out.join("lowfreq.json"), &dump)?;
    Manifest::new(
        "lowfreq",
        params_json(&[("froude", json!(froude)), ("hminus", json!(hminus))]),
        json!({"nodes": opts.nodes, "radius": opts.radius}),
    )
    .write(out)?;
    println!(
        "ind1..ind5 = [{:.4e}, {:.4e}, {:.4e}, {:.4e}, {:.4e}] => {:?}",
        idx.ind1, idx.ind2, idx.ind3, idx.ind4, idx.ind5, idx.verdict
    );
    Ok(match idx.verdict {
        svstab::lowfreq::LowFreqVerdict::Unstable => 2,
        _ => 0,
    })
}

fn cmd_diagram(a: DiagramArgs, cfg: &Config, out: &PathBuf) -> Result<i32> {
    let _ = cfg;
    let kind = a.kind.clone();
    let functional = move |p: [f64; 2]| -> Option<f64> {
        let (froude, hminus) = (p[0], p[1]);
        let ev = RollEvans::from_params(froude, hminus).ok()?;
        match kind.as_str() {
            "lambda-r" => Some(ev.lambda_r),
            k @ ("ind1" | "ind2" | "ind3") => {
                let opts = TaylorOptions {
                    nodes: 48,
                    convergence_check: false,
                    ..Default::default()
                };
                let bundle = taylor_coeffs(&ev, &opts).ok()?;
                let w = weierstrass_coeffs(&bundle).ok()?;
                let idx = lf_indices(&w, 1e-9).ok()?;
                Some(match k {
                    "ind1" => idx.ind1,
                    "ind2" => idx.ind2,
                    _ => idx.ind3,
                })
            }
            _ => None,
        }
    };
    let g = move |p: [f64; 2]| functional(p).map(|v| v - a.level);
    let opts = svstab::continuation::ContinuationOptions {
        step: a.step.unwrap_or(0.05),
        max_steps: a.max_steps.unwrap_or(120),
        ftol: 1e-8,
        bounds: [
            a.f_min.unwrap_or(2.05),
            a.f_max.unwrap_or(16.0),
            1e-3,
            0.999,
        ],
        scales: [1.0, 0.05],
    };
    let branch = svstab::continuation::trace_level_set(&g, [a.seed_f, a.seed_hminus], &opts)?;
    let rows: Vec<Vec<String>> = branch
        .points
        .iter()
        .map(|p| vec![format!("{:.8}", p[0]), format!("{:.8}", p[1])])
        .collect();
    write_csv(&out.join("boundary.csv"), &["froude", "hminus"], &rows)?;
    write_json(
        &out.join("boundary.json"),
        &json!({"kind": a.kind, "level": a.level, "points": branch.points.len(), "stopped": branch.stopped}),
    )?;
    println!(
        "traced {} points{}",
        branch.points.len(),
        branch
            .stopped
            .map(|s| format!(" (stopped: {s})"))
            .unwrap_or_default()
    );
    Ok(0)
}

fn cmd_channel(a: ChannelArgs, cfg: &Config, out: &PathBuf) -> Result<i32> {
    let froude = resolve_f64(a.froude, cfg.get_f64("channel", "froude"), 6.0);
    let hminus = resolve_f64(a.hminus, cfg.get_f64("channel", "hminus"), 0.28);
    let width = resolve_f64(a.width, cfg.get_f64("channel", "width"), 0.18);
    let bc = match a.bc.as_str() {
        "wall" => ChannelBc::Wall,
        "periodic" => ChannelBc::Periodic,
        other => {
            return Err(svstab::error::Error::Config(format!(
                "bc must be wall or periodic, got {other}"
            )))
        }
    };
    let ev = RollEvans::from_params(froude, hminus)?;
    let grid = SurfaceGrid {
        eta_max: resolve_f64(a.eta_max, cfg.get_f64("channel", "eta_max"), 25.0),
        n_eta: resolve_usize(a.n_eta, cfg.get_usize("channel", "n_eta"), 97),
        n_xi: resolve_usize(a.n_xi, cfg.get_usize("channel", "n_xi"), 72),
    };
    let surface = follow_surface(&ev, &grid, &[])?;
    let verdict = channel_verdict(&surface, width, bc);
    write_json(
        &out.join("channel.json"),
        &json!({"surface_critical": surface.critical, "unstable_eta": surface.unstable_eta, "verdict": verdict}),
    )?;
    // surface CSV for plotting
    let mut rows = Vec::new();
    for (i, &eta) in surface.eta.iter().enumerate() {
        for (k, &xx) in surface.xi_x.iter().enumerate() {
            rows.push(vec![
                format!("{eta:.6}"),
                format!("{xx:.6}"),
                format!("{:.8e}", surface.re_max[i][k]),
                format!("{:.8e}", surface.im_at_max[i][k]),
            ]);
        }
    }
    write_csv(&out.join("surface.csv"), &["eta", "xiX", "re_lambda", "im_lambda"], &rows)?;
    Manifest::new(
        "channel",
        params_json(&[
            ("froude", json!(froude)),
            ("hminus", json!(hminus)),
            ("width", json!(width)),
        ]),
        json!({"grid": {"eta_max": grid.eta_max, "n_eta": grid.n_eta, "n_xi": grid.n_xi}}),
    )
    .write(out)?;
    if let Some(c) = &surface.critical {
        println!(
            "critical: tau* = {:.4}, eta* = {:.4}, xi*X = {:.4}, L* = {:.4}",
            c.tau, c.eta, c.xi_x, c.l_star
        );
    }
    println!(
        "channel width {width} ({:?}): {} {}",
        bc,
        if verdict.stable { "stable" } else { "unstable" },
        verdict
            .first_unstable_mode
            .map(|n| format!("(first unstable mode n = {n})"))
            .unwrap_or_default()
    );
    Ok(if verdict.stable { 0 } else { 2 })
}

fn cmd_sim(a: SimArgs, cfg: &Config, out: &PathBuf) -> Result<i32> {
    let froude = resolve_f64(a.froude, cfg.get_f64("sim", "froude"), 1.5);
    let bc_y = match a.bc_y.as_str() {
        "wall" => BcY::Wall,
        "periodic" => BcY::Periodic,
        other => {
            return Err(svstab::error::Error::Config(format!(
                "bc_y must be wall or periodic, got {other}"
            )))
        }
    };
    let sample_dt = a.sample_dt.unwrap_or(0.5);
    match a.kind.as_str() {
        "dambreak" | "flat" => {
            let hr = a.hr.unwrap_or(0.7);
            let length = a.length.unwrap_or(20.0);
            let width = a.width.unwrap_or(5.0);
            let s = (1.0 - hr.powf(1.5)) / (1.0 - hr);
            let bump = Some(Bump {
                amplitude: a.bump_amplitude.unwrap_or(0.1),
                radius: 0.5,
                x0: length * 0.35,
                y0: width * 0.5,
            });
            let initial = if a.kind == "dambreak" {
                Initial::DamBreak { h_right: hr, bump }
            } else {
                Initial::Flat { h: 1.0, bump }
            };
            let config = SimConfig {
                froude,
                frame_speed: if a.kind == "dambreak" { s } else { 0.0 },
                theta: 0.0,
                length,
                width,
                nx: a.nx.unwrap_or(400),
                ny: a.ny.unwrap_or(64),
                cfl: a.cfl.unwrap_or(0.45),
                t_end: a.t_end.unwrap_or(200.0),
                bc_x: BcX::Extrapolate,
                bc_y,
                second_order: true,
                initial,
            };
            let report = run_dambreak(&config, sample_dt)?;
            let rows: Vec<Vec<String>> = report
                .transverse_energy
                .iter()
                .map(|(t, e)| vec![format!("{t:.4}"), format!("{e:.8e}")])
                .collect();
            write_csv(&out.join("transverse_energy.csv"), &["t", "ke_transverse"], &rows)?;
            write_json(&out.join("dambreak.json"), &report)?;
            println!(
                "verdict: {:?} (front speed {:.4}, RH speed {:.4})",
                report.verdict, report.front_speed, report.rh_speed
            );
            Ok(match report.verdict {
                svstab::sim::diagnostics::DamBreakVerdict::PlanarStable => 0,
                _ => 2,
            })
        }
        "rollwave" => {
            let hminus = a.hminus.unwrap_or(0.28);
            let wave = roll_wave(froude, hminus, 256)?;
            let t_end = a.t_end.unwrap_or(if a.long { 420.0 } else { 80.0 });
            let config = SimConfig {
                froude,
                frame_speed: wave.c,
                theta: 0.0,
                length: a.length.unwrap_or(3.0 * wave.period),
                width: a.width.unwrap_or(0.18),
                nx: a.nx.unwrap_or(384),
                ny: a.ny.unwrap_or(20),
                cfl: a.cfl.unwrap_or(0.45),
                t_end,
                bc_x: BcX::Periodic,
                bc_y,
                second_order: true,
                initial: Initial::RollWave {
                    h_minus: hminus,
                    bump: Some(Bump {
                        amplitude: a.bump_amplitude.unwrap_or(0.01),
                        radius: 0.4 * wave.period.min(a.width.unwrap_or(0.18)),
                        x0: 1.5 * wave.period,
                        y0: 0.25 * a.width.unwrap_or(0.18),
                    }),
                },
            };
            let report = run_rollwave(&config, a.sample_dt.unwrap_or(0.05), 5.0)?;
            write_json(&out.join("rollwave.json"), &report)?;
            println!(
                "verdict: {:?} (amplitude {:.3e}, period {:?})",
                report.verdict, report.amplitude, report.flapping_period
            );
            if let (Some(tau), Some(xx)) = (a.tau_star, a.xix_star) {
                if let Some(pc) = phase_check(&report.track, tau, xx, 3) {
                    write_json(&out.join("phase_check.json"), &pc)?;
                    println!(
                        "phase check: period residual {:.3}, antisymmetry {:.3}, R^2 {:.3}",
                        pc.period_residual, pc.antisymmetry_residual, pc.r_squared
                    );
                }
            }
            Ok(match report.verdict {
                svstab::sim::diagnostics::RollVerdict::Stable => 0,
                _ => 2,
            })
        }
        "oblique" => {
            let theta = a.theta.unwrap_or(-0.1);
            let config = SimConfig {
                froude,
                frame_speed: 0.0,
                theta,
                length: a.length.unwrap_or(20.0),
                width: a.width.unwrap_or(1.0),
                nx: a.nx.unwrap_or(400),
                ny: a.ny.unwrap_or(20),
                cfl: a.cfl.unwrap_or(0.45),
                t_end: a.t_end.unwrap_or(50.0),
                bc_x: BcX::Periodic,
                bc_y: BcY::Periodic,
                second_order: true,
                initial: Initial::ObliqueEquilibrium {
                    h: 1.0,
                    bump: Some(Bump {
                        amplitude: a.bump_amplitude.unwrap_or(1.0),
                        radius: 0.5,
                        x0: 4.0,
                        y0: 0.5,
                    }),
                },
            };
            let mut sim = svstab::sim::Simulator::new(config)?;
            sim.run_to(a.t_end.unwrap_or(50.0))?;
            // dump the final mid-row height slice
            let j = sim.state.ny / 2 + 2;
            let (xr, _) = sim.state.interior();
            let rows: Vec<Vec<String>> = xr
                .map(|i| {
                    let k = sim.state.idx(i, j);
                    vec![
                        format!("{:.6}", sim.state.x_center(i)),
                        format!("{:.8e}", sim.state.h[k]),
                    ]
                })
                .collect();
            write_csv(&out.join("oblique_slice.csv"), &["x", "h"], &rows)?;
            println!("oblique simulation finished at t = {:.2}", sim.state.t);
            Ok(0)
        }
        other => Err(svstab::error::Error::Config(format!(
            "unknown sim kind {other}"
        ))),
    }
}

fn cmd_brock(a: BrockArgs, _cfg: &Config, out: &PathBuf) -> Result<i32> {
    let table = brock_table();
    match a.table.as_str() {
        "brock" => {
            let rows: Vec<Vec<String>> = table
                .iter()
                .map(|r| {
                    vec![
                        r.case.to_string(),
                        format!("{}", r.s0),
                        r.finish.clone(),
                        format!("{}", r.hn_inch),
                        format!("{}", r.froude),
                        format!("{}", r.t_prime),
                        format!("{}", r.c_over_sqrt_ghn),
                        format!("{}", r.h_max),
                        r.h_min.map(|v| v.to_string()).unwrap_or_default(),
                    ]
                })
                .collect();
            write_csv(
                &out.join("brock_table6.csv"),
                &["case", "s0", "finish", "hn_inch", "froude", "t_prime", "c_over_sqrt_ghn", "h_max", "h_min"],
                &rows,
            )?;
            println!("table written");
            Ok(0)
        }
        "converted" => {
            let mut recs: Vec<_> = table.iter().map(rescale).collect();
            recs.sort_by(|a, b| {
                a.froude
                    .partial_cmp(&b.froude)
                    .unwrap()
                    .then(a.channel_width.partial_cmp(&b.channel_width).unwrap())
            });
            let rows: Vec<Vec<String>> = recs
                .iter()
                .map(|r| {
                    vec![
                        r.case.to_string(),
                        format!("{:.9}", r.channel_width),
                        format!("{:.2}", r.froude),
                        r.h_min.map(|v| format!("{v:.9}")).unwrap_or_default(),
                        format!("{:.9}", r.h_max),
                        format!("{:.9}", r.wavelength),
                        format!("{:.8}", r.speed),
                    ]
                })
                .collect();
            write_csv(
                &out.join("converted.csv"),
                &["case", "channel_width", "froude", "h_min", "h_max", "wavelength", "speed"],
                &rows,
            )?;
            println!("converted table written to {}", out.display());
            Ok(0)
        }
        way_name if way_name.starts_with("tway") => {
            let way: usize = way_name[4..]
                .parse()
                .map_err(|_| svstab::error::Error::Config(format!("bad table {way_name}")))?;
            let mut rows = Vec::new();
            let mut any_channel_unstable = false;
            for rec in &table {
                let r = rescale(rec);
                match fit_way(&r, way) {
                    Ok(fit) => {
                        let mut cols = vec![
                            rec.case.to_string(),
                            format!("{:.9}", r.channel_width),
                            format!("{:.2}", r.froude),
                            format!("{:.9}", fit.h_minus_over_hs),
                            format!("{}", fit.integrable),
                        ];
                        for (label, value, err) in &fit.predictions {
                            cols.push(format!("{label}={value:.9}"));
                            cols.push(
                                err.map(|e| format!("{:.2}%", e * 100.0)).unwrap_or_default(),
                            );
                        }
                        if a.classify && fit.integrable {
                            let verdict = one_d_verdict(r.froude, fit.h_minus_over_hs)?;
                            cols.push(format!("{verdict:?}"));
                            if a.l_star_case == Some(rec.case)
                                && verdict == OneDVerdict::Stable
                            {
                                let ev =
                                    RollEvans::from_params(r.froude, fit.h_minus_over_hs)?;
                                let grid = SurfaceGrid {
                                    eta_max: 45.0,
                                    n_eta: 120,
                                    n_xi: 72,
                                };
                                let surface = follow_surface(&ev, &grid, &[])?;
                                let l_sonic = surface.critical.as_ref().map(|c| c.l_star);
                                let cls = classify(&r, &fit, l_sonic)?;
                                cols.push(format!("L*={:?}", cls.l_star_physical));
                                if cls.channel_stable == Some(false) {
                                    any_channel_unstable = true;
                                    cols.push("channel-unstable".into());
                                }
                            }
                        }
                        rows.push(cols);
                    }
                    Err(e) => {
                        rows.push(vec![rec.case.to_string(), format!("error: {e}")]);
                    }
                }
            }
            write_csv(
                &out.join(format!("{way_name}.csv")),
                &["case", "channel_width", "froude", "hminus_over_hs", "integrable", "pred1", "err1", "pred2", "err2", "oned", "lstar", "channel"],
                &rows,
            )?;
            println!("{way_name} written to {}", out.display());
            Ok(if any_channel_unstable { 2 } else { 0 })
        }
        other => Err(svstab::error::Error::Config(format!(
            "unknown table {other}"
        ))),
    }
}

fn cmd_highfreq(a: HighfreqArgs, cfg: &Config, out: &PathBuf) -> Result<i32> {
    let froude = resolve_f64(a.froude, cfg.get_f64("highfreq", "froude"), 1.0);
    let nu = nu_from(a.hr, a.nu)?;
    let grid = resolve_usize(a.grid, cfg.get_usize("highfreq", "grid"), 200);
    let profile = shock_profile(froude, nu, 128)?;
    let verdict = hf_verdict(&profile, grid)?;
    // per-tau index curve for decreasing discontinuous profiles
    if profile.kind == svstab::profiles::ShockKind::DecreasingDiscontinuous {
        let ranges = shock_turning_ranges(&profile);
        let r1 = ranges
            .iter()
            .find(|r| r.family == TurningFamily::Tau1)
            .unwrap();
        let mut rows = Vec::new();
        for i in 1..grid {
            let tau = r1.lo + (r1.hi - r1.lo) * i as f64 / grid as f64;
            let ind = hf_index(&profile, tau)?;
            rows.push(vec![format!("{tau:.8}"), format!("{ind:.8}")]);
        }
        write_csv(&out.join("hf_index.csv"), &["tau1", "index"], &rows)?;
    }
    write_json(&out.join("hf_verdict.json"), &verdict)?;
    println!("high-frequency: {}", verdict.detail);
    Ok(if verdict.stable { 0 } else { 2 })
}

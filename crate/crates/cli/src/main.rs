use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use lgpoly::acceptance::{self, CriterionResult};
use lgpoly::fredholm::{
    ansatz_gap, gap_csv, laplace_contours, laplace_det, mp_check, smoothed_det, smoothed_det_ygrid, step_det,
    step_det_contour, DetOptions, KernelContours,
};
use lgpoly::phase::sign_grid;
use lgpoly::polymer::{mc_laplace, mc_summary, sim_csv_row, SIM_CSV_HEADER};
use lgpoly::rate::{rate_table, rate_table_csv, solve_b, RateQuery};
use lgpoly::{ContourSpec, DetResult, Error, QuadratureSpec, SimConfig};

const EXIT_CRITERION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

/// Rate function, Fredholm determinants and Monte Carlo for the log-Gamma polymer.
///
/// CSV floats carry 17 significant digits; every command is deterministic
/// given its flags (and seed) and independent of --threads.
#[derive(Parser, Debug)]
#[command(name = "lgpoly", version)]
struct Cli {
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct QuadArgs {
    /// Chebyshev-I nodes for the endpoint equation H(b) = 0.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(8..=100_000))]
    m_cheb1: u32,
    /// Chebyshev-II nodes for f(s, θ).
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(8..=100_000))]
    m_cheb2: u32,
    /// Gauss–Legendre nodes per panel for the s-integral of f.
    #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u32).range(8..=100_000))]
    m_legendre: u32,
    /// Panels for the s-integral of f.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(8..=100_000))]
    panels: u32,
}

impl QuadArgs {
    fn spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            m_cheb1: self.m_cheb1 as usize,
            m_cheb2: self.m_cheb2 as usize,
            m_legendre: self.m_legendre as usize,
            panels: self.panels as usize,
        }
    }
}

#[derive(Args, Debug)]
struct KernelArgs {
    /// Nodes on the circle Σ around −2n (default 256, or 16n for n > 16).
    #[arg(long, value_parser = clap::value_parser!(u32).range(8..=100_000))]
    sigma_m: Option<u32>,
    /// Gauss–Legendre nodes per panel on the v-contour.
    #[arg(long, value_parser = clap::value_parser!(u32).range(4..=1_000))]
    v_m: Option<u32>,
    /// Length of the y-grid beyond s (Nyström routes; default 4).
    #[arg(long)]
    y_cut: Option<f64>,
    /// 16-node panels on the y-grid (default max(16, n)).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=10_000))]
    y_panels: Option<u32>,
    /// Skip the doubled-resolution rerun (refine_delta is then null).
    #[arg(long)]
    no_refine: bool,
}

impl KernelArgs {
    fn options(&self, base: Option<KernelContours>) -> DetOptions {
        let contours = base.map(|mut c| {
            if let (Some(m), ContourSpec::Circle { m: cm, .. }) = (self.sigma_m, &mut c.sigma) {
                *cm = m as usize;
            }
            if let Some(m) = self.v_m {
                match &mut c.v {
                    ContourSpec::VLine { m: vm, .. } | ContourSpec::Wedge { m: vm, .. } => *vm = m as usize,
                    _ => {}
                }
            }
            c
        });
        DetOptions {
            contours,
            y_cut: self.y_cut,
            panels: self.y_panels.map(|p| p as usize),
            refine: !self.no_refine,
        }
    }

    fn customised(&self) -> bool {
        self.sigma_m.is_some() || self.v_m.is_some()
    }
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Route {
    /// Nyström grid in y.
    Grid,
    /// The y-integral done in closed form; matrix on the Σ circle.
    Contour,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rate function F(s, θ) = −∫_s^{s*} f(t, θ) dt on an s-grid, where s* = −θψ(θ),
    /// f = (b²/π) ∫₀¹ ih′(bu)√(1 − u²) du and b solves H(b) = 0 (see b-solve).
    /// CSV: s,theta,b,f,F,residual_H,refine_delta.
    RateTable {
        #[arg(long)]
        s_min: f64,
        #[arg(long)]
        s_max: f64,
        /// Number of equally spaced s values (inclusive of both ends).
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=100_000))]
        points: u32,
        #[arg(long)]
        theta: f64,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Endpoint b(s, θ): the positive root of H(b) = ∫₀¹ ih′(bu)/√(1 − u²) du with
    /// ih′(x) = (θ/2)[ψ(θ(1 − ix/2)) + ψ(θ(1 + ix/2))] + s; at θ = 0, b = 2√(1/s² − 1).
    /// JSON: s, theta, b, residual_H.
    BSolve {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        theta: f64,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Sign of Re h(ζ; s, 0) = log|2 + iζ| − log|2 − iζ| + s·Im ζ on a
    /// rectangular grid (row-major, Im outer). CSV: re,im,sign.
    PhaseGrid {
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = -4.0, allow_hyphen_values = true)]
        re_min: f64,
        #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
        re_max: f64,
        #[arg(long, default_value_t = -4.0, allow_hyphen_values = true)]
        im_min: f64,
        #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
        im_max: f64,
        #[arg(long, default_value_t = 81, value_parser = clap::value_parser!(u32).range(2..=10_000))]
        nx: u32,
        #[arg(long, default_value_t = 81, value_parser = clap::value_parser!(u32).range(2..=10_000))]
        ny: u32,
    },
    /// E exp(−u Z_n(θ)) = det(I + K)_{L²(Σ)} with
    /// K(v, v′) = (2πi)⁻² ∫_ℓ π u^{w−v}/sin(π(v − w)) · W(w)/W(v) · dw/(w − v′),
    /// W(z) = Γ(θ − z)ⁿ/Γ(θ + z)ⁿ, Σ a circle around −θ, ℓ a vertical line.
    /// JSON: value_re, value_im, imag_residual, refine_delta, dims.
    FredholmLaplace {
        #[arg(long)]
        u: f64,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4096))]
        n: u32,
        #[arg(long)]
        theta: f64,
        /// Radius of Σ (default min(θ, 1/2)/2).
        #[arg(long)]
        sigma_radius: Option<f64>,
        #[arg(long, value_parser = clap::value_parser!(u32).range(8..=100_000))]
        sigma_m: Option<u32>,
        /// Real part of ℓ (default midway between Σ and min(θ, 1 − θ − r)).
        #[arg(long, allow_hyphen_values = true)]
        line_c: Option<f64>,
        /// |Im w| cut-off on ℓ (default 40).
        #[arg(long)]
        v_cut: Option<f64>,
        #[arg(long, value_parser = clap::value_parser!(u32).range(4..=1_000))]
        line_m: Option<u32>,
        /// Panel width on ℓ (default 0.25).
        #[arg(long)]
        panel_width: Option<f64>,
    },
    /// Q = det(1 − L̂)_{L²(s,∞)} of the rescaled kernel
    /// L̂(y, y′) = (2πi)⁻² ∮_Σ du ∫ dv Ŵ(v)e^{−vy} / (Ŵ(u)e^{−uy′}(v − u)),
    /// Ŵ(z) = Γ(θ(1 − z/2n))ⁿ/Γ(θ(1 + z/2n))ⁿ; with --smoothed the indicator of
    /// (s, ∞) is replaced by σ(y) = 1/(1 + e^{−(2n/θ)(y − s)}). JSON as fredholm-laplace.
    FredholmQ {
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4096))]
        n: u32,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        smoothed: bool,
        /// Discretisation route.
        #[arg(long, value_enum, default_value_t = Route::Grid)]
        route: Route,
        #[command(flatten)]
        kernel: KernelArgs,
    },
    /// log Q, log Q̃ (smoothed) and |log Q̃ − log Q|/n² for each n.
    /// CSV: n,logQ,logQtilde,gap_over_n2.
    AnsatzGap {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        theta: f64,
        #[arg(long, value_delimiter = ',', default_value = "4,8,16", value_parser = clap::value_parser!(u32).range(1..=4096))]
        n_list: Vec<u32>,
        #[command(flatten)]
        kernel: KernelArgs,
    },
    /// Monte Carlo for log Z_n = log Σ_paths Π d_{ij}, d_{ij} inverse-Gamma of shape 2θ,
    /// over up-right paths on {1..n}². CSV: n,theta,samples,seed,mean_logZ,var_logZ,stderr.
    Simulate {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4096))]
        n: u32,
        #[arg(long)]
        theta: f64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=100_000_000))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Monte Carlo estimate of E exp(−u Z_n(θ)) with its standard error. JSON: estimate, stderr.
    McLaplace {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4096))]
        n: u32,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        u: f64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=100_000_000))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// (1/n) L̂(y, y) at θ = 0 against the Marchenko–Pastur density (2/π)√((1 − y)/y).
    /// CSV: y,kernel_over_n,mp_density.
    MpCheck {
        #[arg(long, default_value_t = 40, value_parser = clap::value_parser!(u32).range(1..=4096))]
        n: u32,
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75,1.5")]
        y: Vec<f64>,
    },
    /// Runs the acceptance criteria and prints one PASS/FAIL line each; exits 1
    /// unless every criterion passes.
    Verify {
        /// Write a JSON array of {criterion_id, pass, measured, expected, tolerance, ...}.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Run only these criteria (comma separated).
        #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u32).range(1..=10))]
        only: Vec<u32>,
    },
}

enum Failure {
    Usage(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Config(_) | Error::Contour(_) | Error::UnsupportedOrder(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn det_json(d: &DetResult) -> String {
    let refine = if d.refine_delta.is_nan() {
        serde_json::Value::Null
    } else {
        json!(d.refine_delta)
    };
    let v = json!({
        "value_re": d.value.re,
        "value_im": d.value.im,
        "imag_residual": d.imag_residual,
        "refine_delta": refine,
        "dims": d.dims,
    });
    format!("{}\n", serde_json::to_string_pretty(&v).expect("serializable"))
}

fn finite(name: &str, x: f64) -> Result<f64, Failure> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(usage(format!("--{name} must be finite")))
    }
}

/// Output text plus whether all criteria passed (only meaningful for `verify`).
fn execute(cmd: &Command) -> Result<(String, bool), Failure> {
    let text = match cmd {
        Command::RateTable {
            s_min,
            s_max,
            points,
            theta,
            quad,
        } => {
            let (a, b) = (finite("s-min", *s_min)?, finite("s-max", *s_max)?);
            if *points > 1 && a >= b {
                return Err(usage("--s-min must be below --s-max"));
            }
            let q = quad.spec();
            q.validate()?;
            // reject θ outside the supported range before tabulating
            RateQuery {
                s: a,
                theta: *theta,
                quad: q,
            }
            .validate()
            .or_else(|e| match e {
                Error::Domain(m) if m.starts_with("s ") => Ok(()),
                other => Err(other),
            })?;
            let k = *points as usize;
            let grid: Vec<f64> = (0..k)
                .map(|i| {
                    if k == 1 {
                        a
                    } else {
                        (a * (k - 1 - i) as f64 + b * i as f64) / (k - 1) as f64
                    }
                })
                .collect();
            rate_table_csv(&rate_table(&grid, *theta, q))
        }
        Command::BSolve { s, theta, quad } => {
            let q = RateQuery {
                s: *s,
                theta: *theta,
                quad: quad.spec(),
            };
            let (b, residual) = solve_b(&q)?;
            let v = json!({ "s": s, "theta": theta, "b": b, "residual_H": residual });
            format!("{}\n", serde_json::to_string_pretty(&v).expect("serializable"))
        }
        Command::PhaseGrid {
            s,
            re_min,
            re_max,
            im_min,
            im_max,
            nx,
            ny,
        } => {
            finite("s", *s)?;
            sign_grid(*s, (*re_min, *re_max), (*im_min, *im_max), *nx as usize, *ny as usize)?.to_csv()
        }
        Command::FredholmLaplace {
            u,
            n,
            theta,
            sigma_radius,
            sigma_m,
            line_c,
            v_cut,
            line_m,
            panel_width,
        } => {
            let (mut sigma, mut ell) = laplace_contours(*theta);
            if let ContourSpec::Circle { radius, m, .. } = &mut sigma {
                if let Some(r) = sigma_radius {
                    *radius = finite("sigma-radius", *r)?;
                }
                if let Some(k) = sigma_m {
                    *m = *k as usize;
                }
            }
            if let ContourSpec::VLine {
                c,
                v_cut: vc,
                m,
                first,
                max_width,
                ..
            } = &mut ell
            {
                if let Some(x) = line_c {
                    *c = finite("line-c", *x)?;
                } else if sigma_radius.is_some() {
                    let r = if let ContourSpec::Circle { radius, .. } = sigma {
                        radius
                    } else {
                        unreachable!()
                    };
                    *c = 0.5 * ((-theta + r) + theta.min(1.0 - theta - r));
                }
                if let Some(x) = v_cut {
                    *vc = finite("v-cut", *x)?;
                }
                if let Some(k) = line_m {
                    *m = *k as usize;
                }
                if let Some(w) = panel_width {
                    *first = finite("panel-width", *w)?;
                    *max_width = *w;
                }
            }
            sigma.validate()?;
            ell.validate()?;
            det_json(&laplace_det(*u, *n as usize, *theta, &sigma, &ell)?)
        }
        Command::FredholmQ {
            s,
            n,
            theta,
            smoothed,
            route,
            kernel,
        } => {
            let n = *n as usize;
            finite("s", *s)?;
            let base = if kernel.customised() {
                Some(if *smoothed && *route == Route::Contour {
                    KernelContours::smoothed_default(n, *theta, *s)?
                } else {
                    KernelContours::wedge_default(n, s.abs().max(1e-4))
                })
            } else {
                None
            };
            let opts = kernel.options(base);
            let d = match (smoothed, route) {
                (false, Route::Grid) => step_det(*s, n, *theta, &opts)?,
                (false, Route::Contour) => step_det_contour(*s, n, *theta, &opts)?,
                (true, Route::Contour) => smoothed_det(*s, n, *theta, &opts)?,
                (true, Route::Grid) => smoothed_det_ygrid(*s, n, *theta, &opts)?,
            };
            det_json(&d)
        }
        Command::AnsatzGap {
            s,
            theta,
            n_list,
            kernel,
        } => {
            if kernel.customised() {
                return Err(usage("--sigma-m/--v-m are not supported by ansatz-gap"));
            }
            let ns: Vec<usize> = n_list.iter().map(|&k| k as usize).collect();
            gap_csv(&ansatz_gap(*s, *theta, &ns, &kernel.options(None))?)
        }
        Command::Simulate {
            n,
            theta,
            samples,
            seed,
        } => {
            let cfg = SimConfig {
                n: *n as usize,
                theta: *theta,
                samples: *samples,
                seed: *seed,
            };
            let summary = mc_summary(&cfg)?;
            format!("{SIM_CSV_HEADER}\n{}\n", sim_csv_row(&cfg, &summary))
        }
        Command::McLaplace {
            n,
            theta,
            u,
            samples,
            seed,
        } => {
            let e = mc_laplace(*n as usize, *theta, *u, *samples, *seed)?;
            let v = json!({ "n": n, "theta": theta, "u": u, "samples": samples, "seed": seed, "estimate": e.estimate, "stderr": e.stderr });
            format!("{}\n", serde_json::to_string_pretty(&v).expect("serializable"))
        }
        Command::MpCheck { n, y } => {
            if y.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(usage("--y values must be positive"));
            }
            let mut out = String::from("y,kernel_over_n,mp_density\n");
            for r in mp_check(*n as usize, y)? {
                out.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e}\n",
                    r.y, r.kernel_over_n, r.mp_density
                ));
            }
            out
        }
        Command::Verify { report, only } => {
            let ids: Vec<u32> = if only.is_empty() {
                acceptance::CRITERIA.to_vec()
            } else {
                only.clone()
            };
            let results: Vec<CriterionResult> = ids.iter().map(|&id| acceptance::run(id)).collect();
            let mut out = String::new();
            for r in &results {
                out.push_str(&r.line());
                out.push('\n');
            }
            let all = results.iter().all(|r| r.pass);
            out.push_str(&format!(
                "{}/{} criteria passed\n",
                results.iter().filter(|r| r.pass).count(),
                results.len()
            ));
            if let Some(path) = report {
                let body = serde_json::to_string_pretty(&results).expect("serializable");
                fs::write(path, body + "\n").map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            }
            return Ok((out, all));
        }
    };
    Ok((text, true))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k as usize).build_global() {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let (text, ok) = match execute(&cli.command) {
        Ok(r) => r,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("numerical failure: {m}");
            return ExitCode::from(EXIT_NUMERIC);
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_USAGE);
            }
        }
        None => print!("{text}"),
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CRITERION)
    }
}

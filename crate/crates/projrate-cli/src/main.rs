//! `projrate`: seeded, reproducible runs of the rate-function, sampling, and
//! moment machinery, with the full configuration embedded in every output.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use projrate_cli::{
    emit, parse_f64_list, parse_grid, parse_moment, parse_usize_list, partition_label,
    Cell, CliError, CliResult, Format, Row, RunConfig,
};
use projrate_core::geometry::{haar_frame, project};
use projrate_core::mgf::{LogMGFOracle, PGaussDist};
use projrate_core::montecarlo::{
    estimate_tail, gaussian_approx_stat, ldp_slope_table, tightness_check, Method,
    TailConfig, Target,
};
use projrate_core::rates::{
    lambda_d, lambda_d_grad, legendre_j, rate_ball, rate_max, rate_norm2, RateResult,
};
use projrate_core::stream::seeded;
use projrate_core::weingarten::{haar_moment, moment_match_check, weingarten_table};

#[derive(Parser)]
#[command(
    name = "projrate",
    about = "Rate functions and tail sampling for random projections of l_p balls",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Rate-function curves over level grids.
    Rate(RateArgs),
    /// Draws from the p-generalized sphere, ball, Haar frames, projections.
    Sample(SampleArgs),
    /// Tail probability estimation and slope tables.
    Tail(TailArgs),
    /// Exact Haar-frame moments and Weingarten table dumps.
    Weingarten(WeingartenArgs),
    /// Consistency diagnostics: limits, tightness, moments, duality.
    Check(CheckArgs),
}

/// Flags shared by every subcommand.
#[derive(Args)]
struct CommonArgs {
    /// Config source: a TOML file mirroring the flags, or a previous output
    /// file (its embedded header is reused). Flags win over the file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path; stdout when omitted. Relative paths resolve against
    /// $PROJRATE_OUT_DIR when that variable is set.
    #[arg(long)]
    output: Option<String>,
    /// Output encoding.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct RateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Ball exponent p > 1.
    #[arg(long)]
    p: Option<f64>,
    /// Which rate to tabulate: norm2, ball, max, or j.
    #[arg(long)]
    statistic: Option<String>,
    /// Single norm level.
    #[arg(long)]
    r: Option<f64>,
    /// Norm-level grid start:stop:step (or a comma list).
    #[arg(long)]
    r_grid: Option<String>,
    /// Second-coordinate grid for the joint rate J(r, s).
    #[arg(long)]
    s_grid: Option<String>,
    /// Projection section point for the ball rate, as a comma list.
    #[arg(long)]
    w: Option<String>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// What to draw: sphere, ball, frame, or projection.
    #[arg(long)]
    what: Option<String>,
    /// Ball exponent p > 1 (not used for frames).
    #[arg(long)]
    p: Option<f64>,
    /// Ambient dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Projection dimension (frames and projections).
    #[arg(long)]
    k: Option<usize>,
    /// Number of draws.
    #[arg(long)]
    count: Option<usize>,
    /// Radial law for projections: sphere or ball.
    #[arg(long)]
    target: Option<String>,
    /// Seed for the coordinate stream.
    #[arg(long)]
    seed: Option<u64>,
    /// Seed for the frame stream.
    #[arg(long)]
    frame_seed: Option<u64>,
}

#[derive(Args)]
struct TailArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Ball exponent p > 1.
    #[arg(long)]
    p: Option<f64>,
    /// Ambient dimension (single-estimate mode).
    #[arg(long)]
    n: Option<usize>,
    /// Projection dimension (single-estimate mode).
    #[arg(long)]
    k: Option<usize>,
    /// Norm threshold of the tail event.
    #[arg(long)]
    r: Option<f64>,
    /// Monte Carlo sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Estimator: naive or tilted.
    #[arg(long)]
    method: Option<String>,
    /// Underlying law: sphere or ball.
    #[arg(long)]
    target: Option<String>,
    /// Slope-table mode: comma list of ambient dimensions.
    #[arg(long)]
    n_list: Option<String>,
    /// Slope-table mode: projection growth exponent, k = ceil(n^gamma).
    #[arg(long)]
    gamma: Option<f64>,
    /// Seed for the sample stream.
    #[arg(long)]
    seed: Option<u64>,
    /// Seed for the quenched frame.
    #[arg(long)]
    frame_seed: Option<u64>,
    /// Worker count for sample generation (recorded in the output header).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct WeingartenArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Moment query, a product of entry powers such as a11^4 or a11^2*a2_2^2.
    #[arg(long)]
    moment: Option<String>,
    /// Dump the full Gram/Weingarten table of half-degree d instead.
    #[arg(long)]
    d: Option<usize>,
    /// Matrix dimension n.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Which diagnostic: gaussian-approx, tightness, moment-match, duality.
    #[arg(long)]
    what: Option<String>,
    /// Ball exponent p > 1.
    #[arg(long)]
    p: Option<f64>,
    /// Ambient dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Projection dimension.
    #[arg(long)]
    k: Option<usize>,
    /// Direction radius D for the limit comparison.
    #[arg(long)]
    scale: Option<f64>,
    /// Radial tilt coordinate c.
    #[arg(long)]
    c: Option<f64>,
    /// Number of random directions.
    #[arg(long)]
    directions: Option<usize>,
    /// Monte Carlo sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Row-moment degree along the direction u.
    #[arg(long)]
    alpha: Option<usize>,
    /// Row-moment degree of the single coordinate.
    #[arg(long)]
    beta: Option<usize>,
    /// Column index (0-based) of the single coordinate.
    #[arg(long)]
    col: Option<usize>,
    /// Direction vector u as a comma list of k numbers.
    #[arg(long)]
    u: Option<String>,
    /// Number of random duality trials.
    #[arg(long)]
    trials: Option<usize>,
    /// Seed for the auxiliary stream.
    #[arg(long)]
    seed: Option<u64>,
    /// Seed for the quenched frame.
    #[arg(long)]
    frame_seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0u8,
                _ => 2u8,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let (config, rows) = match cli.cmd {
        Cmd::Rate(a) => run_rate(a)?,
        Cmd::Sample(a) => run_sample(a)?,
        Cmd::Tail(a) => run_tail(a)?,
        Cmd::Weingarten(a) => run_weingarten(a)?,
        Cmd::Check(a) => run_check(a)?,
    };
    emit(&config, &rows)
}

fn req<T: Clone>(v: &Option<T>, name: &str) -> CliResult<T> {
    v.clone()
        .ok_or_else(|| CliError::Config(format!("missing required flag --{name}")))
}

/// Merge flag values over an optional config file and pin the subcommand.
fn resolve(mut cfg: RunConfig, sub: &str, file: &Option<PathBuf>) -> CliResult<RunConfig> {
    cfg.subcommand = sub.to_string();
    if let Some(path) = file {
        let from_file = RunConfig::from_file(path)?;
        cfg = cfg.or(&from_file);
    }
    Ok(cfg)
}

fn parse_method(s: &str) -> CliResult<Method> {
    match s {
        "naive" => Ok(Method::Naive),
        "tilted" => Ok(Method::Tilted),
        other => Err(CliError::Config(format!("unknown method '{other}'"))),
    }
}

fn parse_target(s: &str) -> CliResult<Target> {
    match s {
        "sphere" => Ok(Target::Sphere),
        "ball" => Ok(Target::Ball),
        other => Err(CliError::Config(format!("unknown target '{other}'"))),
    }
}

fn rate_row(p: f64, r: f64, s: Option<f64>, res: &RateResult) -> Row {
    let (v_star, c_star) = match res.argmax {
        Some((v, c)) => (Cell::F(v), Cell::F(c)),
        None => (Cell::S(String::new()), Cell::S(String::new())),
    };
    let s_cell = match s.or(res.s_opt) {
        Some(s) => Cell::F(s),
        None => Cell::S(String::new()),
    };
    vec![
        ("p", Cell::F(p)),
        ("r", Cell::F(r)),
        ("s", s_cell),
        ("value", Cell::F(res.value)),
        ("v_star", v_star),
        ("c_star", c_star),
        ("status", Cell::S(res.status.as_str().to_string())),
    ]
}

fn run_rate(a: RateArgs) -> CliResult<(RunConfig, Vec<Row>)> {
    let cfg = RunConfig {
        p: a.p,
        statistic: a.statistic,
        r: a.r,
        r_grid: a.r_grid,
        s_grid: a.s_grid,
        w: a.w,
        output: a.common.output,
        format: a.common.format,
        ..RunConfig::default()
    };
    let mut cfg = resolve(cfg, "rate", &a.common.config)?;
    cfg.format.get_or_insert(Format::Csv);
    let statistic = cfg.statistic.get_or_insert_with(|| "norm2".to_string()).clone();
    let p = req(&cfg.p, "p")?;
    let oracle = LogMGFOracle::new(p)?;
    let rs = match (&cfg.r_grid, cfg.r) {
        (Some(grid), _) => parse_grid(grid)?,
        (None, Some(r)) => vec![r],
        (None, None) => return Err(CliError::Config("need --r or --r-grid".into())),
    };
    let mut rows = Vec::new();
    match statistic.as_str() {
        "norm2" => {
            for &r in &rs {
                rows.push(rate_row(p, r, None, &rate_norm2(r, p, &oracle)?));
            }
        }
        "max" => {
            for &r in &rs {
                rows.push(rate_row(p, r, None, &rate_max(r, p, &oracle)?));
            }
        }
        "ball" => {
            let w = match &cfg.w {
                Some(list) => parse_f64_list(list)?,
                None => vec![0.0],
            };
            for &r in &rs {
                rows.push(rate_row(p, r, None, &rate_ball(&w, r, p, &oracle)?));
            }
        }
        "j" => {
            let s_grid = req(&cfg.s_grid, "s-grid")?;
            let ss = parse_grid(&s_grid)?;
            for &r in &rs {
                for &s in &ss {
                    rows.push(rate_row(p, r, Some(s), &legendre_j(r, s, &oracle)?));
                }
            }
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown statistic '{other}' (norm2, ball, max, j)"
            )))
        }
    }
    Ok((cfg, rows))
}

fn run_sample(a: SampleArgs) -> CliResult<(RunConfig, Vec<Row>)> {
    let cfg = RunConfig {
        what: a.what,
        p: a.p,
        n: a.n,
        k: a.k,
        count: a.count,
        target: a.target,
        seed: a.seed,
        frame_seed: a.frame_seed,
        output: a.common.output,
        format: a.common.format,
        ..RunConfig::default()
    };
    let mut cfg = resolve(cfg, "sample", &a.common.config)?;
    cfg.format.get_or_insert(Format::Csv);
    let what = req(&cfg.what, "what")?;
    let n = req(&cfg.n, "n")?;
    let count = *cfg.count.get_or_insert(1);
    let seed = *cfg.seed.get_or_insert(0);
    let frame_seed = *cfg.frame_seed.get_or_insert(0);
    let mut rows = Vec::new();
    match what.as_str() {
        "sphere" | "ball" => {
            let p = req(&cfg.p, "p")?;
            let dist = PGaussDist::new(p)?;
            let mut rng = seeded(seed, 0);
            for draw in 0..count {
                let y = if what == "sphere" {
                    dist.sample_sphere(n, &mut rng)
                } else {
                    dist.sample_ball(n, &mut rng)
                };
                for (i, &v) in y.iter().enumerate() {
                    rows.push(vec![
                        ("draw", Cell::I(draw)),
                        ("coord", Cell::I(i)),
                        ("value", Cell::F(v)),
                    ]);
                }
            }
        }
        "frame" => {
            let k = req(&cfg.k, "k")?;
            let mut rng = seeded(frame_seed, 1);
            for draw in 0..count {
                let frame = haar_frame(n, k, &mut rng)?;
                for i in 0..n {
                    for j in 0..k {
                        rows.push(vec![
                            ("draw", Cell::I(draw)),
                            ("row", Cell::I(i)),
                            ("col", Cell::I(j)),
                            ("value", Cell::F(frame.entry(i, j))),
                        ]);
                    }
                }
            }
        }
        "projection" => {
            let p = req(&cfg.p, "p")?;
            let k = req(&cfg.k, "k")?;
            let target = cfg.target.get_or_insert_with(|| "sphere".to_string()).clone();
            parse_target(&target)?;
            let dist = PGaussDist::new(p)?;
            let mut frame_rng = seeded(frame_seed, 1);
            let frame = haar_frame(n, k, &mut frame_rng)?;
            let mut rng = seeded(seed, 0);
            for draw in 0..count {
                let y = if target == "sphere" {
                    dist.sample_sphere(n, &mut rng)
                } else {
                    dist.sample_ball(n, &mut rng)
                };
                let w = project(&frame, &y)?;
                for (j, &v) in w.iter().enumerate() {
                    rows.push(vec![
                        ("draw", Cell::I(draw)),
                        ("coord", Cell::I(j)),
                        ("value", Cell::F(v)),
                    ]);
                }
            }
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown sample kind '{other}' (sphere, ball, frame, projection)"
            )))
        }
    }
    Ok((cfg, rows))
}

fn run_tail(a: TailArgs) -> CliResult<(RunConfig, Vec<Row>)> {
    let cfg = RunConfig {
        p: a.p,
        n: a.n,
        k: a.k,
        r: a.r,
        samples: a.samples,
        method: a.method,
        target: a.target,
        n_list: a.n_list,
        gamma: a.gamma,
        seed: a.seed,
        frame_seed: a.frame_seed,
        threads: a.threads,
        output: a.common.output,
        format: a.common.format,
        ..RunConfig::default()
    };
    let mut cfg = resolve(cfg, "tail", &a.common.config)?;
    cfg.format.get_or_insert(Format::Json);
    let p = req(&cfg.p, "p")?;
    let r = req(&cfg.r, "r")?;
    let samples = *cfg.samples.get_or_insert(100_000);
    let method = parse_method(cfg.method.get_or_insert_with(|| "tilted".to_string()))?;
    let target = parse_target(cfg.target.get_or_insert_with(|| "ball".to_string()))?;
    let seed = *cfg.seed.get_or_insert(0);
    let frame_seed = *cfg.frame_seed.get_or_insert(0);
    let threads = *cfg.threads.get_or_insert(1);
    let oracle = LogMGFOracle::new(p)?;
    let mut rows = Vec::new();
    if let Some(list) = &cfg.n_list {
        let n_list = parse_usize_list(list)?;
        let gamma = req(&cfg.gamma, "gamma")?;
        let table = ldp_slope_table(
            &n_list, gamma, p, r, samples, target, seed, frame_seed, &oracle,
        )?;
        for row in table {
            rows.push(vec![
                ("n", Cell::I(row.n)),
                ("k", Cell::I(row.k)),
                ("log_rate", Cell::F(row.log_rate)),
                ("stderr", Cell::F(row.stderr)),
                ("rate_prediction", Cell::F(row.rate_prediction)),
            ]);
        }
    } else {
        let n = req(&cfg.n, "n")?;
        let k = req(&cfg.k, "k")?;
        let tail_cfg = TailConfig {
            n,
            k,
            p,
            r,
            samples,
            method,
            target,
            seed,
            frame_seed,
            workers: threads,
        };
        let est = estimate_tail(&tail_cfg, &oracle)?;
        rows.push(vec![
            ("method", Cell::S(est.method.as_str().to_string())),
            ("n", Cell::I(est.n)),
            ("k", Cell::I(est.k)),
            ("p", Cell::F(est.p)),
            ("r", Cell::F(est.r)),
            ("p_hat", Cell::F(est.p_hat)),
            ("log_rate", Cell::F(est.log_rate)),
            ("stderr", Cell::F(est.stderr)),
            ("ess", Cell::F(est.ess)),
            ("seed", Cell::U(est.seed)),
            ("frame_seed", Cell::U(est.frame_seed)),
        ]);
    }
    Ok((cfg, rows))
}

fn run_weingarten(a: WeingartenArgs) -> CliResult<(RunConfig, Vec<Row>)> {
    let cfg = RunConfig {
        moment: a.moment,
        d: a.d,
        n: a.n,
        output: a.common.output,
        format: a.common.format,
        ..RunConfig::default()
    };
    let mut cfg = resolve(cfg, "weingarten", &a.common.config)?;
    cfg.format.get_or_insert(Format::Csv);
    let n = req(&cfg.n, "n")?;
    let mut rows = Vec::new();
    match (&cfg.moment, cfg.d) {
        (Some(spec), _) => {
            let q = parse_moment(spec)?;
            let value = haar_moment(&q.rows, &q.cols, n)?;
            rows.push(vec![
                ("moment", Cell::S(spec.clone())),
                ("n", Cell::I(n)),
                ("degree", Cell::I(q.rows.len())),
                ("value", Cell::F(value)),
            ]);
        }
        (None, Some(d)) => {
            let table = weingarten_table(d, n)?;
            let parts = table.partitions();
            for i in 0..table.size() {
                for j in 0..table.size() {
                    let coset = table
                        .coset(i, j)
                        .iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join("+");
                    rows.push(vec![
                        ("i", Cell::I(i)),
                        ("j", Cell::I(j)),
                        ("row_partition", Cell::S(partition_label(&parts[i]))),
                        ("col_partition", Cell::S(partition_label(&parts[j]))),
                        ("coset", Cell::S(coset)),
                        ("gram", Cell::F(table.gram_entry(i, j))),
                        ("wg", Cell::F(table.wg_entry(i, j))),
                    ]);
                }
            }
        }
        (None, None) => {
            return Err(CliError::Config("need --moment or --d for a table dump".into()))
        }
    }
    Ok((cfg, rows))
}

fn run_check(a: CheckArgs) -> CliResult<(RunConfig, Vec<Row>)> {
    let cfg = RunConfig {
        what: a.what,
        p: a.p,
        n: a.n,
        k: a.k,
        scale: a.scale,
        c: a.c,
        directions: a.directions,
        samples: a.samples,
        alpha: a.alpha,
        beta: a.beta,
        col: a.col,
        u: a.u,
        trials: a.trials,
        seed: a.seed,
        frame_seed: a.frame_seed,
        output: a.common.output,
        format: a.common.format,
        ..RunConfig::default()
    };
    let mut cfg = resolve(cfg, "check", &a.common.config)?;
    cfg.format.get_or_insert(Format::Json);
    let what = req(&cfg.what, "what")?;
    let mut rows = Vec::new();
    match what.as_str() {
        "gaussian-approx" => {
            let p = req(&cfg.p, "p")?;
            let n = req(&cfg.n, "n")?;
            let k = req(&cfg.k, "k")?;
            let scale = *cfg.scale.get_or_insert(1.0);
            let c = *cfg.c.get_or_insert(0.0);
            let directions = *cfg.directions.get_or_insert(100);
            let seed = *cfg.seed.get_or_insert(0);
            let frame_seed = *cfg.frame_seed.get_or_insert(0);
            let oracle = LogMGFOracle::new(p)?;
            let sup = gaussian_approx_stat(
                n, k, scale, c, directions, p, seed, frame_seed, &oracle,
            )?;
            rows.push(vec![
                ("n", Cell::I(n)),
                ("k", Cell::I(k)),
                ("scale", Cell::F(scale)),
                ("c", Cell::F(c)),
                ("directions", Cell::I(directions)),
                ("p", Cell::F(p)),
                ("sup_deviation", Cell::F(sup)),
            ]);
        }
        "tightness" => {
            let p = req(&cfg.p, "p")?;
            let n = req(&cfg.n, "n")?;
            let k = req(&cfg.k, "k")?;
            let samples = *cfg.samples.get_or_insert(100_000);
            let seed = *cfg.seed.get_or_insert(0);
            let frame_seed = *cfg.frame_seed.get_or_insert(0);
            let oracle = LogMGFOracle::new(p)?;
            let rep = tightness_check(n, k, samples, seed, frame_seed, &oracle)?;
            let mut row = vec![
                ("n", Cell::I(rep.n)),
                ("k", Cell::I(rep.k)),
                ("p", Cell::F(rep.p)),
                ("samples", Cell::I(rep.samples)),
                ("mean", Cell::F(rep.mean)),
                ("mean_target", Cell::F(rep.mean_target)),
                ("mean_se", Cell::F(rep.mean_se)),
                ("mean_within_3se", Cell::B(rep.mean_within_3se)),
                ("gamma_hat", Cell::F(rep.gamma_hat)),
            ];
            let labels = [
                ("exceed1_t", "exceed1_p_hat", "exceed1_log_rate", "exceed1_stderr"),
                ("exceed2_t", "exceed2_p_hat", "exceed2_log_rate", "exceed2_stderr"),
            ];
            for (pt, (lt, lp, ll, ls)) in rep.exceedances.iter().zip(labels) {
                row.push((lt, Cell::F(pt.t)));
                row.push((lp, Cell::F(pt.p_hat)));
                row.push((ll, Cell::F(pt.log_rate)));
                row.push((ls, Cell::F(pt.stderr)));
            }
            rows.push(row);
        }
        "moment-match" => {
            let n = req(&cfg.n, "n")?;
            let k = req(&cfg.k, "k")?;
            let alpha = req(&cfg.alpha, "alpha")?;
            let beta = req(&cfg.beta, "beta")?;
            let col = *cfg.col.get_or_insert(0);
            let u_spec = req(&cfg.u, "u")?;
            let u = parse_f64_list(&u_spec)?;
            let m = moment_match_check(alpha, beta, col, &u, n, k)?;
            rows.push(vec![
                ("alpha", Cell::I(alpha)),
                ("beta", Cell::I(beta)),
                ("col", Cell::I(col)),
                ("n", Cell::I(n)),
                ("k", Cell::I(k)),
                ("exact", Cell::F(m.exact)),
                ("gaussian", Cell::F(m.gaussian)),
                ("ratio", Cell::F(m.ratio)),
            ]);
        }
        "duality" => {
            let p = req(&cfg.p, "p")?;
            let trials = *cfg.trials.get_or_insert(100);
            let seed = *cfg.seed.get_or_insert(0);
            let oracle = LogMGFOracle::new(p)?;
            let mut rng = seeded(seed, 0);
            for trial in 0..trials {
                let d = 0.05 + 1.75 * rand_unit(&mut rng);
                let c_hi = oracle.t_bound() - 0.05;
                let c = -1.2 + (c_hi + 1.2) * rand_unit(&mut rng);
                let (r, s) = lambda_d_grad(d, c, &oracle)?;
                let res = legendre_j(r, s, &oracle)?;
                let (v, cc) = res.argmax.unwrap_or((f64::NAN, f64::NAN));
                let dual = d * r + c * s - lambda_d(d, c, &oracle)?;
                rows.push(vec![
                    ("trial", Cell::I(trial)),
                    ("d", Cell::F(d)),
                    ("c", Cell::F(c)),
                    ("r", Cell::F(r)),
                    ("s", Cell::F(s)),
                    ("value", Cell::F(res.value)),
                    ("dual", Cell::F(dual)),
                    ("argmax_err", Cell::F((v - d).abs().max((cc - c).abs()))),
                    ("value_err", Cell::F((res.value - dual).abs())),
                ]);
            }
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown check '{other}' (gaussian-approx, tightness, moment-match, duality)"
            )))
        }
    }
    Ok((cfg, rows))
}

fn rand_unit(rng: &mut projrate_core::stream::Stream) -> f64 {
    use rand::Rng as _;
    rng.random::<f64>()
}

//! `eopk`: build elliptic orthogonal polynomial families, export their
//! recurrence coefficients, kernels and zeros, and run the verification suite.
//!
//! Exit codes: 0 success, 1 verification failed, 2 invalid input,
//! 3 numerical breakdown.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eop_core::cd_kernel::{correlation_kernel, CdKernel};
use eop_core::quadrature::compute_moments;
use eop_core::recurrence::{extract_five_term, extract_seven_term, FiveTermCoefficients, SevenTermCoefficients};
use eop_core::verify::{run_verify, VerifyConfig, SCHEMA_VERSION};
use eop_core::zeros::{zero_set, DEFAULT_GRID};
use eop_core::{Accumulation, EopFamily, Error, WeightSpec};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "eopk",
    version,
    about = "Elliptic orthogonal polynomials on the rectangular torus"
)]
struct Cli {
    /// Im(tau) of the lattice Z + tau Z
    #[arg(long, global = true, default_value_t = 1.0)]
    tau: f64,
    /// weight: unity | exp_p:<a> | exp_pp:<b> | prod(<w>,<w>)
    #[arg(long, global = true, default_value = "unity")]
    weight: String,
    /// highest degree N (at most 20)
    #[arg(long, global = true, default_value_t = 8)]
    nmax: usize,
    /// Gauss-Legendre nodes on the A-cycle
    #[arg(long, global = true, default_value_t = 256)]
    quad: usize,
    /// output directory, created if missing
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// seed for random test points
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// verify only: kick one recurrence coefficient to check that the harness notices
    #[arg(long, global = true)]
    perturb: bool,
    /// verify only: force the symmetric-weight checks (rejects asymmetric weights)
    #[arg(long, global = true)]
    symmetric_suite: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Five- and seven-term coefficients, norms and moments
    Coeffs,
    /// K_n(x, y) on a square grid over the A-cycle
    Kernel {
        /// kernel order; members are pi_j with j <= n - 1, j != 1
        #[arg(long)]
        n: usize,
        /// points per side
        #[arg(long, default_value_t = 128)]
        grid: usize,
    },
    /// Zeros of pi_2 .. pi_N
    Zeros {
        /// initial scan resolution on the A-cycle
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
    },
    /// Run the invariant suite and write verify.json
    Verify,
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Io(PathBuf, std::io::Error),
    VerifyFailed(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::VerifyFailed(_) => 1,
            Failure::Core(e) if e.is_numerical() => 3,
            Failure::Core(_) | Failure::Io(..) => 2,
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.filter(|v| v.is_finite()).map(num).unwrap_or_default()
}

fn write_file(dir: &Path, name: &str, body: &str) -> Outcome<()> {
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| Failure::Io(path, e))
}

struct Context {
    tau: f64,
    weight: WeightSpec,
    nmax: usize,
    quad: usize,
    out: PathBuf,
    seed: u64,
}

impl Context {
    fn from_cli(cli: &Cli) -> Outcome<Self> {
        let weight: WeightSpec = cli.weight.parse()?;
        fs::create_dir_all(&cli.out).map_err(|e| Failure::Io(cli.out.clone(), e))?;
        Ok(Context {
            tau: cli.tau,
            weight,
            nmax: cli.nmax,
            quad: cli.quad,
            out: cli.out.clone(),
            seed: cli.seed,
        })
    }

    fn family(&self) -> Outcome<EopFamily> {
        Ok(EopFamily::build(self.tau, &self.weight, self.nmax, self.quad)?)
    }
}

#[derive(Serialize)]
struct CoeffsFile<'a> {
    schema: u32,
    tau_im: f64,
    weight: &'a WeightSpec,
    n_max: usize,
    quad_order: usize,
    precision: Accumulation,
    /// degrees of the nonzero members, aligned with `h`
    degrees: Vec<usize>,
    h: Vec<f64>,
    five_term: Option<FiveTermCoefficients>,
    seven_term: Option<SevenTermCoefficients>,
}

fn cmd_coeffs(ctx: &Context) -> Outcome<()> {
    let fam = ctx.family()?;
    let n = fam.max_degree();
    // both need a minimum degree; absent rather than an error below it
    let c5 = if n >= 4 { Some(extract_five_term(&fam)?) } else { None };
    let c7 = if n >= 5 { Some(extract_seven_term(&fam)?) } else { None };

    let file = CoeffsFile {
        schema: SCHEMA_VERSION,
        tau_im: ctx.tau,
        weight: &ctx.weight,
        n_max: n,
        quad_order: fam.rule().order(),
        precision: fam.accumulation(),
        degrees: fam.degrees(),
        h: fam.norms().to_vec(),
        five_term: c5.clone(),
        seven_term: c7.clone(),
    };
    let json = serde_json::to_string_pretty(&file).map_err(|e| Error::Serialization(e.to_string()))?;
    write_file(&ctx.out, "coeffs.json", &(json + "\n"))?;

    let mut csv = String::from("n,h,a,b,c,p,q,r,s\n");
    for i in 0..=n {
        // pi_1 vanishes: only a_1 = <wp pi_0, pi_2> means anything in that row
        let h = if i == 1 { None } else { Some(fam.h(i)?) };
        let keep = |name: char| i != 1 || name == 'a';
        let five = |name: char, f: fn(&FiveTermCoefficients, i64) -> f64| {
            opt(c5.as_ref().filter(|_| keep(name)).map(|c| f(c, i as i64)))
        };
        let seven =
            |f: fn(&SevenTermCoefficients, i64) -> f64| opt(c7.as_ref().filter(|_| keep('p')).map(|c| f(c, i as i64)));
        writeln!(
            csv,
            "{i},{},{},{},{},{},{},{},{}",
            opt(h),
            five('a', FiveTermCoefficients::a),
            five('b', FiveTermCoefficients::b),
            five('c', FiveTermCoefficients::c),
            seven(SevenTermCoefficients::p),
            seven(SevenTermCoefficients::q),
            seven(SevenTermCoefficients::r),
            seven(SevenTermCoefficients::s),
        )
        .expect("write to String");
    }
    write_file(&ctx.out, "coeffs.csv", &csv)?;

    let moments = compute_moments(fam.lattice(), fam.rule(), fam.weight(), n / 2)?;
    let mut csv = String::from("k,nu,nuhat,hankel,hankel_hat\n");
    for k in 0..moments.nu.len() {
        writeln!(
            csv,
            "{k},{},{},{},{}",
            num(moments.nu[k]),
            num(moments.nuhat[k]),
            opt(moments.hankel.get(k).copied()),
            opt(moments.hankel_hat.get(k).copied()),
        )
        .expect("write to String");
    }
    write_file(&ctx.out, "moments.csv", &csv)?;
    eprintln!("wrote coeffs.json, coeffs.csv, moments.csv to {}", ctx.out.display());
    Ok(())
}

fn cmd_kernel(ctx: &Context, n: usize, grid: usize) -> Outcome<()> {
    if grid < 2 {
        return Err(Error::InvalidParameter(format!("grid must be at least 2, got {grid}")).into());
    }
    let fam = ctx.family()?;
    if n == 0 || n + 1 > fam.max_degree() {
        return Err(Error::InvalidDegree {
            degree: n,
            reason: "kernel order needs 1 <= n and n + 1 <= nmax",
        }
        .into());
    }
    let lat = fam.lattice();
    let ts: Vec<f64> = (0..grid).map(|i| i as f64 / grid as f64).collect();
    let mut k = vec![0.0; grid * grid];
    // K_n is the weighted CD kernel of one order higher; the closed form
    // needs that order to be at least 4, below it the sum is exact anyway
    if n + 1 >= 4 {
        let cd = CdKernel::new(&fam, n + 1)?;
        let pts = ts
            .iter()
            .map(|&t| cd.point(lat.gamma_point(t)))
            .collect::<eop_core::Result<Vec<_>>>()?;
        for i in 0..grid {
            for j in i..grid {
                let v = cd.kernel_cd_at(&pts[i], &pts[j])?.value * (pts[i].w * pts[j].w).sqrt();
                k[i * grid + j] = v;
                k[j * grid + i] = v;
            }
        }
    } else {
        for i in 0..grid {
            for j in i..grid {
                let v = correlation_kernel(&fam, n, lat.gamma_point(ts[i]), lat.gamma_point(ts[j]))?;
                k[i * grid + j] = v;
                k[j * grid + i] = v;
            }
        }
    }
    let mut csv = String::with_capacity(grid * grid * 72);
    csv.push_str("t_x,t_y,k\n");
    for i in 0..grid {
        for j in 0..grid {
            writeln!(csv, "{},{},{}", num(ts[i]), num(ts[j]), num(k[i * grid + j])).expect("write to String");
        }
    }
    write_file(&ctx.out, "kernel.csv", &csv)?;
    eprintln!("wrote kernel.csv ({grid} x {grid}) to {}", ctx.out.display());
    Ok(())
}

fn cmd_zeros(ctx: &Context, grid: usize) -> Outcome<()> {
    let fam = ctx.family()?;
    let lat = fam.lattice();
    let mut csv = String::from("degree,kind,t,re,im,residual,margin\n");
    for n in 2..=fam.max_degree() {
        let zs = zero_set(&fam, n, grid)?;
        for ((&t, &r), &m) in zs.gamma_zeros.iter().zip(&zs.residuals).zip(&zs.margins) {
            let z = lat.gamma_point(t);
            writeln!(
                csv,
                "{n},gamma,{},{},{},{},{}",
                num(t),
                num(z.re),
                num(z.im),
                num(r),
                num(m)
            )
            .expect("write to String");
        }
        if let (Some(x), Some(r)) = (zs.real_zero, zs.real_residual) {
            writeln!(csv, "{n},real,{},{},{},{},", num(x), num(x), num(0.0), num(r)).expect("write to String");
        }
    }
    write_file(&ctx.out, "zeros.csv", &csv)?;
    eprintln!("wrote zeros.csv to {}", ctx.out.display());
    Ok(())
}

fn cmd_verify(ctx: &Context, perturb: bool, symmetric_suite: bool) -> Outcome<()> {
    let cfg = VerifyConfig {
        tau_im: ctx.tau,
        weight: ctx.weight.clone(),
        n_max: ctx.nmax,
        quad_order: ctx.quad,
        seed: ctx.seed,
        perturb,
        symmetric_suite,
    };
    let report = run_verify(&cfg)?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Serialization(e.to_string()))?;
    write_file(&ctx.out, "verify.json", &(json + "\n"))?;
    print!("{}", report.summary());
    if report.passed {
        Ok(())
    } else {
        Err(Failure::VerifyFailed(report.failed))
    }
}

fn run(cli: &Cli) -> Outcome<()> {
    if (cli.perturb || cli.symmetric_suite) && !matches!(cli.command, Command::Verify) {
        return Err(Error::InvalidParameter("--perturb and --symmetric-suite only apply to verify".into()).into());
    }
    let ctx = Context::from_cli(cli)?;
    match cli.command {
        Command::Coeffs => cmd_coeffs(&ctx),
        Command::Kernel { n, grid } => cmd_kernel(&ctx, n, grid),
        Command::Zeros { grid } => cmd_zeros(&ctx, grid),
        Command::Verify => cmd_verify(&ctx, cli.perturb, cli.symmetric_suite),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Core(e) => eprintln!("eopk: {e}"),
                Failure::Io(p, e) => eprintln!("eopk: {}: {e}", p.display()),
                Failure::VerifyFailed(k) => eprintln!("eopk: {k} check(s) failed"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}

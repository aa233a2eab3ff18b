use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cohomest::cohomology::{coefficient_residual, f_parts};
use cohomest::diophantine::{golden_mean, DiophantinePair, Frequency};
use cohomest::experiments::{
    assign_pair, breakdown, emit_csv, reproduce_table, sweep_delta, sweep_omega, write_csv, CellStatus, CsvRow,
    DeltaRule, OmegaSource, PairMethod, SweepSpec, TableCaps, SWEEP_MAX_POINTS_2D,
};
use cohomest::russmann::{adhoc_parts, classic_constant, f_enclosure, RussmannParams};
use cohomest::testfam::{exact_norm_v0, exact_norm_vs, exact_norm_vsplus, FamilyKind, FamilySpec, Scheme};
use cohomest::torusfn::{
    dump_coefficients, grid_size_for, norm_enclosure, GridSpec, DEFAULT_MAX_POINTS_1D, DEFAULT_MAX_POINTS_2D,
};
use cohomest::{Error, PrecisionContext, Result, XReal};

#[derive(Parser, Debug)]
#[command(name = "cohomest", version, about = "Sup-norms, cohomological equations and Rüssmann estimates on the torus")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Working precision in significant digits (15–31).
    #[arg(long, global = true, default_value_t = 30)]
    prec: u32,
    #[arg(long, global = true, default_value_t = 1)]
    dim: usize,
    #[arg(long, global = true, value_enum, default_value_t = Family::V0)]
    family: Family,
    /// Decay exponent `s`.
    #[arg(long, global = true, default_value = "0")]
    s: String,
    #[arg(long, global = true, default_value = "1")]
    rhohat: String,
    /// Strip width; sweeps accept a comma-separated list.
    #[arg(long, global = true)]
    rho: Option<String>,
    /// Width loss; sweeps accept a comma-separated list.
    #[arg(long, global = true)]
    delta: Option<String>,
    /// `golden`, a decimal, `singrid:<j>` or `<w1>,<w2>`.
    #[arg(long, global = true)]
    omega: Option<String>,
    #[arg(long, global = true)]
    gamma: Option<String>,
    #[arg(long, global = true)]
    tau: Option<String>,
    /// Diophantine-constant method (1: continued fractions, 2: interval exclusion).
    #[arg(long, global = true)]
    method: Option<u8>,
    /// Rüssmann cutoff.
    #[arg(long = "L", global = true)]
    cutoff: Option<i64>,
    /// Seed of random coefficient draws; selects random unit-disk coefficients.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Target truncation error for the grid choice.
    #[arg(long, global = true, default_value_t = 1e-30)]
    eps: f64,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Maximum number of grid points.
    #[arg(long = "cap-grid", global = true)]
    cap_grid: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Validated sup-norm of a test function on the strip.
    Norm,
    /// Classic and ad hoc Rüssmann constants.
    Cr,
    /// Solve the cohomological equation and report F.
    Solve,
    /// Overestimation factors I_R = I1·I2·I3.
    Breakdown,
    /// Sweep over δ at fixed ω.
    SweepDelta {
        /// gnuplot script plotting the CSV.
        #[arg(long)]
        plot_script: Option<PathBuf>,
    },
    /// Sweep over the singrid frequencies at fixed ρ, δ.
    SweepOmega {
        #[arg(long, default_value_t = 0)]
        grid_first: u32,
        #[arg(long, default_value_t = 10_000)]
        grid_count: u32,
        #[arg(long, default_value_t = 1)]
        grid_stride: u32,
        #[arg(long)]
        plot_script: Option<PathBuf>,
    },
    /// Recompute a reference table and judge every cell.
    Tables {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        table: u8,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    V0,
    Vs,
    Vsplus,
    Fam3,
    Fam1Spike,
}

fn real(name: &str, s: &str) -> Result<XReal> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("--{name}: not a real number: {s:?}")))
}

fn reals(name: &str, s: &str) -> Result<Vec<XReal>> {
    s.split(',').map(|p| real(name, p)).collect()
}

fn required<'a>(name: &str, v: &'a Option<String>) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| Error::Domain(format!("--{name} is required")))
}

impl Cli {
    fn ctx(&self) -> Result<PrecisionContext> {
        PrecisionContext::new(self.prec)
    }

    fn rho_hat(&self) -> Result<XReal> {
        real("rhohat", &self.rhohat)
    }

    fn single(&self, name: &str, v: &Option<String>) -> Result<XReal> {
        real(name, required(name, v)?)
    }

    fn frequency(&self) -> Result<Frequency> {
        match &self.omega {
            Some(s) => Frequency::parse(s),
            None if self.dim == 1 => Ok(Frequency::golden()),
            None => Err(Error::Domain("--omega is required in dimension 2".into())),
        }
    }

    fn scheme(&self) -> Scheme {
        match self.seed {
            Some(seed) => Scheme::RandomDisk(seed),
            None if self.dim == 2 && self.family == Family::Vsplus => Scheme::PositiveOrthant,
            None => Scheme::Ones,
        }
    }

    fn pair_method(&self, w: &Frequency) -> Result<PairMethod> {
        let tau = self.tau.as_deref().map(|t| real("tau", t)).transpose()?;
        if let Some(g) = &self.gamma {
            let tau = tau.ok_or_else(|| Error::Domain("--gamma needs --tau".into()))?;
            return Ok(PairMethod::Given(DiophantinePair::new(real("gamma", g)?, tau)?));
        }
        match self.method {
            Some(1) => Ok(PairMethod::Method1),
            Some(2) => Ok(PairMethod::Method2(tau)),
            Some(m) => Err(Error::Domain(format!("--method must be 1 or 2, got {m}"))),
            None if w.dim() == 1 && w.comps()[0] == golden_mean() && tau.is_none() => {
                Ok(PairMethod::Given(DiophantinePair::golden()))
            }
            None => Ok(PairMethod::Method2(tau)),
        }
    }

    fn family(&self) -> Result<FamilySpec> {
        let rh = self.rho_hat()?;
        let s = real("s", &self.s)?;
        match self.family {
            Family::V0 if self.dim == 1 && self.seed.is_none() => Ok(FamilySpec::v0(rh)),
            Family::V0 => FamilySpec::fam1(self.dim, XReal::ZERO, rh, self.scheme()),
            Family::Vs => FamilySpec::fam1(self.dim, s, rh, self.scheme()),
            Family::Vsplus => {
                if self.dim != 2 {
                    return Err(Error::Domain("vsplus is two-dimensional; pass --dim 2".into()));
                }
                FamilySpec::fam1(2, s, rh, self.scheme())
            }
            Family::Fam3 => {
                let w = self.frequency()?;
                let pair = match self.pair_method(&w)? {
                    PairMethod::Given(p) => Some(p),
                    _ => None,
                };
                FamilySpec::fam3(rh, self.scheme(), w, pair)
            }
            Family::Fam1Spike => {
                let seed = self.seed.unwrap_or(0);
                FamilySpec::fam1(self.dim, s, rh, Scheme::RandomDisk(seed))?
                    .with_spike(GridSpec::uniform(self.dim, 8)?, seed)
            }
        }
    }

    fn cap(&self, n: usize) -> usize {
        self.cap_grid.unwrap_or(if n == 1 { DEFAULT_MAX_POINTS_1D } else { DEFAULT_MAX_POINTS_2D })
    }

    fn grid(&self, fam: &FamilySpec, rho: XReal) -> Result<GridSpec> {
        grid_size_for(fam.n, fam.rho_hat.to_f64(), rho.to_f64(), fam.s.to_f64(), self.eps, self.cap(fam.n))
    }
}

fn show(ctx: &PrecisionContext, key: &str, x: XReal) {
    println!("{key:<14} {}", x.to_sci_string(ctx.digits() as usize));
}

fn closed_form(fam: &FamilySpec, rho: XReal, ctx: &PrecisionContext) -> Option<XReal> {
    if fam.kind != FamilyKind::Fam1 {
        return None;
    }
    match (fam.n, fam.scheme) {
        (1, Scheme::Ones) if fam.s == XReal::ZERO => exact_norm_v0(rho, fam.rho_hat).ok(),
        (1, Scheme::Ones) => exact_norm_vs(fam.s, rho, fam.rho_hat, ctx).ok(),
        (2, Scheme::PositiveOrthant) => exact_norm_vsplus(fam.s, rho, fam.rho_hat, ctx).ok(),
        _ => None,
    }
}

fn cmd_norm(cli: &Cli, ctx: &PrecisionContext) -> Result<()> {
    let fam = cli.family()?;
    let rho = cli.single("rho", &cli.rho)?;
    let enc = norm_enclosure(&fam, rho, cli.eps, cli.cap(fam.n), ctx)?;
    println!("{:<14} {}", "grid", enc.grid.sizes().iter().map(|s| s.to_string()).collect::<Vec<_>>().join("x"));
    show(ctx, "norm", enc.approx.value);
    show(ctx, "lower", enc.interval.lo);
    show(ctx, "upper", enc.interval.hi);
    show(ctx, "rho_tilde", enc.rho_tilde);
    show(ctx, "error_bound", enc.error_bound);
    if let Some(exact) = closed_form(&fam, rho, ctx) {
        show(ctx, "exact", exact);
        show(ctx, "rel_error", ((enc.approx.value - exact) / exact).abs());
    }
    Ok(())
}

fn cmd_cr(cli: &Cli, ctx: &PrecisionContext) -> Result<()> {
    let w = cli.frequency()?;
    let delta = cli.single("delta", &cli.delta)?;
    let pair = assign_pair(&w, cli.pair_method(&w)?, cli.cutoff.unwrap_or(1), ctx)?;
    let p = match cli.cutoff {
        Some(l) => RussmannParams::new(cohomest::diophantine::FrequencyEnclosure::tight(&w), pair, delta, l)?,
        None => RussmannParams::with_default_cutoff(&w, pair, delta)?,
    };
    let a = adhoc_parts(&p)?;
    show(ctx, "gamma", pair.gamma);
    show(ctx, "tau", pair.tau);
    println!("{:<14} {}", "L", a.cutoff);
    show(ctx, "c_R_lower", a.value.lo);
    show(ctx, "c_R_upper", a.value.hi);
    show(ctx, "c_R_tail", a.tail.hi);
    if pair.tau >= XReal::from(w.dim()) {
        show(ctx, "c_R0", classic_constant(w.dim(), pair.tau)?);
    }
    Ok(())
}

fn cmd_solve(cli: &Cli, ctx: &PrecisionContext) -> Result<()> {
    let fam = cli.family()?;
    let w = cli.frequency()?;
    let rho = cli.single("rho", &cli.rho)?;
    let delta = cli.single("delta", &cli.delta)?;
    let grid = cli.grid(&fam, rho)?;
    let v = fam.coefficients_on_grid(&grid, ctx)?;
    let parts = f_parts(&v, rho, delta, &w, ctx)?;
    let res = coefficient_residual(&parts.u, &v, &w)?;
    println!("{:<14} {}", "grid", grid.sizes().iter().map(|s| s.to_string()).collect::<Vec<_>>().join("x"));
    show(ctx, "norm_v", parts.norm_v.value);
    show(ctx, "norm_u", parts.norm_u.value);
    show(ctx, "F", parts.value());
    show(ctx, "residual", res.relative());
    if let Some(path) = &cli.out {
        dump_coefficients(&parts.u, ctx, path)?;
    }
    Ok(())
}

fn cmd_breakdown(cli: &Cli, ctx: &PrecisionContext) -> Result<()> {
    let fam = cli.family()?;
    let w = cli.frequency()?;
    let rho = cli.single("rho", &cli.rho)?;
    let delta = cli.single("delta", &cli.delta)?;
    let pair = assign_pair(&w, cli.pair_method(&w)?, cli.cutoff.unwrap_or(1), ctx)?;
    let grid = cli.grid(&fam, rho)?;
    let v = fam.coefficients_on_grid(&grid, ctx)?;
    let bd = breakdown(&v, rho, delta, &w, &pair, ctx)?;
    let p = RussmannParams::with_default_cutoff(&w, pair, delta)?;
    let c_r = adhoc_parts(&p)?.value.hi;
    for (k, x) in [("I_R", bd.i_r), ("I1", bd.i1), ("I2", bd.i2), ("I3", bd.i3)] {
        show(ctx, k, x);
    }
    for (j, f) in bd.fractions.iter().enumerate() {
        show(ctx, &format!("fraction{}", j + 1), *f);
    }
    show(ctx, "F", bd.f);
    show(ctx, "adhoc_ratio", c_r / (p.scale() * bd.f));
    if pair.tau >= XReal::from(w.dim()) {
        show(ctx, "classic_ratio", classic_constant(w.dim(), pair.tau)? / (p.scale() * bd.f));
    }
    // validated F, when the grid is fine enough for the aliasing bound
    if let Ok(fe) = f_enclosure(&fam, &p, rho, grid, None, ctx) {
        show(ctx, "F_lower", fe.interval.lo);
        show(ctx, "F_upper", fe.interval.hi);
    }
    Ok(())
}

fn write_rows<R: CsvRow>(cli: &Cli, rows: &[R], ctx: &PrecisionContext) -> Result<()> {
    match &cli.out {
        Some(path) => emit_csv(rows, path, ctx),
        None => write_csv(rows, io::stdout().lock(), ctx.digits() as usize).map_err(|source| Error::Csv {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn write_plot_script(path: &Path, data: &Path, x: &str, series: &[(&str, &str)]) -> Result<()> {
    let mut s = String::from("set datafile separator ','\nset key autotitle columnhead\nset logscale y\n");
    let plots: Vec<String> = series
        .iter()
        .map(|(col, colour)| format!("'{}' using '{x}':'{col}' with lines lc rgb '{colour}'", data.display()))
        .collect();
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    fs::write(path, s).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn sweep_spec(cli: &Cli, omega: OmegaSource, n2_defaults: (&str, &str)) -> Result<SweepSpec> {
    let fam = cli.family()?;
    let (rho_d, delta_d) = if fam.n == 2 { n2_defaults } else { ("0.5", "0.1") };
    let rhos = reals("rho", cli.rho.as_deref().unwrap_or(rho_d))?;
    let deltas = match &cli.delta {
        Some(d) => DeltaRule::Explicit(reals("delta", d)?),
        None => DeltaRule::Explicit(reals("delta", delta_d)?),
    };
    let method = match &omega {
        OmegaSource::Single(w) => cli.pair_method(w)?,
        _ => match cli.method {
            Some(1) => PairMethod::Method1,
            _ => PairMethod::Method2(cli.tau.as_deref().map(|t| real("tau", t)).transpose()?),
        },
    };
    let mut spec = SweepSpec::new(fam, rhos, deltas, omega, method);
    spec.eps = cli.eps;
    spec.cutoff = cli.cutoff;
    spec.max_points = cli.cap_grid.unwrap_or(if spec.family.n == 1 { spec.max_points } else { SWEEP_MAX_POINTS_2D });
    Ok(spec)
}

fn cmd_sweep_delta(cli: &Cli, plot: &Option<PathBuf>, ctx: &PrecisionContext) -> Result<()> {
    let w = cli.frequency()?;
    let mut spec = sweep_spec(cli, OmegaSource::Single(w), ("0.9", "0.18"))?;
    if cli.delta.is_none() {
        spec.deltas = DeltaRule::Fractions { first: 1, last: 100 };
    }
    let rows = sweep_delta(&spec, ctx)?;
    write_rows(cli, &rows, ctx)?;
    if let (Some(p), Some(data)) = (plot, &cli.out) {
        write_plot_script(p, data, "delta", &[("adhoc_ratio", "red"), ("classic_ratio", "green"), ("I_R", "blue")])?;
    }
    Ok(())
}

fn cmd_sweep_omega(
    cli: &Cli,
    (first, count, stride): (u32, u32, u32),
    plot: &Option<PathBuf>,
    ctx: &PrecisionContext,
) -> Result<()> {
    let omega = match &cli.omega {
        Some(s) => OmegaSource::Single(Frequency::parse(s)?),
        None => OmegaSource::Singrid { first, count, stride },
    };
    let spec = sweep_spec(cli, omega, ("0.9", "0.18"))?;
    let rows = sweep_omega(&spec, ctx)?;
    let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
    write_rows(cli, &rows, ctx)?;
    if failed > 0 {
        eprintln!("{failed} of {} frequencies failed; see the status column", rows.len());
    }
    if let (Some(p), Some(data)) = (plot, &cli.out) {
        let x = if spec.family.n == 1 { "omega1" } else { "omega2" };
        write_plot_script(p, data, x, &[("I_R", "red"), ("classic_ratio", "green")])?;
    }
    Ok(())
}

fn cmd_tables(cli: &Cli, which: u8, ctx: &PrecisionContext) -> Result<ExitCode> {
    let mut caps = TableCaps::default_for(which);
    if let Some(c) = cli.cap_grid {
        caps = TableCaps { one_d: c, two_d: c };
    }
    let cells = reproduce_table(which, caps, ctx)?;
    write_rows(cli, &cells, ctx)?;
    let count = |f: fn(&CellStatus) -> bool| cells.iter().filter(|c| f(&c.status)).count();
    let (pass, fail, skip) = (
        count(|s| *s == CellStatus::Pass),
        count(|s| *s == CellStatus::Fail),
        count(|s| matches!(s, CellStatus::Skipped(_))),
    );
    eprintln!("table {which}: {pass} pass, {fail} fail, {skip} skipped");
    Ok(if fail > 0 {
        ExitCode::from(1)
    } else if skip > 0 {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    })
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let ctx = cli.ctx()?;
    match &cli.cmd {
        Cmd::Norm => cmd_norm(cli, &ctx)?,
        Cmd::Cr => cmd_cr(cli, &ctx)?,
        Cmd::Solve => cmd_solve(cli, &ctx)?,
        Cmd::Breakdown => cmd_breakdown(cli, &ctx)?,
        Cmd::SweepDelta { plot_script } => cmd_sweep_delta(cli, plot_script, &ctx)?,
        Cmd::SweepOmega {
            grid_first,
            grid_count,
            grid_stride,
            plot_script,
        } => cmd_sweep_omega(cli, (*grid_first, *grid_count, *grid_stride), plot_script, &ctx)?,
        Cmd::Tables { table } => return cmd_tables(cli, *table, &ctx),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

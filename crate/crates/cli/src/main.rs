use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use nodal_directions::harness::{emit_nodal_svg, render_disk_svg, run_monte_carlo, ExperimentConfig};
use nodal_directions::{
    count_directional_points, enumerate_circle, kac_rice_breakdown, sample_arithmetic_wave,
    CountOptions, Direction64, DiskEigenfunction64, Eigenfunction64, Fixture, RectangleSpec64,
    SeparableCount,
};

#[derive(Parser)]
#[command(name = "nodal-dir", version, about = "Directional nodal points of toral eigenfunctions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lattice points on the circle of radius √n and μ̂ₙ(4)
    Lattice {
        #[arg(long)]
        n: u64,
    },
    /// Closed-form expected number of directional points
    Expect {
        #[arg(long)]
        n: u64,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
    },
    /// Count directional points of one eigenfunction
    Count {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        dir: DirArgs,
        #[arg(long)]
        grid_cells: Option<usize>,
        /// Write the eigenfunction in text form
        #[arg(long)]
        dump: Option<PathBuf>,
        /// List the points
        #[arg(long)]
        verbose: bool,
    },
    /// Monte Carlo campaign against the Kac–Rice expectation
    Mc {
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        dir: DirArgs,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        grid_cells: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        serial: bool,
        /// Write wall_time_ms as 0 for reproducible files
        #[arg(long)]
        no_timing: bool,
    },
    /// Directional count for the disk eigenfunction J_m(j_{m,k} r) cos(mφ)
    Disk {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 0.123_456_789, allow_hyphen_values = true)]
        zeta_angle: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        phase: f64,
        /// Nodal portrait of the disk eigenfunction
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Directional count for sin(mx) sin(ny) on [0,π]×[0,π/α]
    Rect {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 0.123_456_789, allow_hyphen_values = true)]
        zeta_angle: f64,
    },
    /// SVG nodal portrait on the unit torus
    Plot {
        #[command(flatten)]
        source: Source,
        #[arg(long, allow_hyphen_values = true, conflicts_with = "rational")]
        theta: Option<f64>,
        #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
        rational: Option<(i64, i64)>,
        #[arg(long)]
        grid_cells: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Source {
    /// fig1, fig2, fig3, grid(M,N) or cosline(M)
    #[arg(long, conflicts_with_all = ["load", "n"])]
    fixture: Option<Fixture>,
    #[arg(long, conflicts_with = "n")]
    load: Option<PathBuf>,
    /// Sample an arithmetic random wave with this n
    #[arg(long)]
    n: Option<u64>,
    #[arg(long, default_value_t = 0, requires = "n")]
    seed: u64,
}

impl Source {
    fn build(&self) -> Result<Eigenfunction64> {
        if let Some(fx) = self.fixture {
            return Ok(fx.build()?);
        }
        if let Some(path) = &self.load {
            return Ok(Eigenfunction64::load(path)?);
        }
        let n = self.n.context("one of --fixture, --load or --n is required")?;
        let circle = enumerate_circle(n)?;
        let mut rng = nodal_directions::harness::sample_rng(self.seed, 0);
        Ok(sample_arithmetic_wave(&circle, &mut rng))
    }
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct DirArgs {
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Integer direction K1,K2
    #[arg(long, value_parser = parse_rational, allow_hyphen_values = true)]
    rational: Option<(i64, i64)>,
}

impl DirArgs {
    fn direction(&self) -> Result<Direction64> {
        direction(self.theta, self.rational)
    }
}

fn direction(theta: Option<f64>, rational: Option<(i64, i64)>) -> Result<Direction64> {
    match (theta, rational) {
        (_, Some((k1, k2))) => Ok(Direction64::from_rational(k1, k2)?),
        (Some(t), None) => Ok(Direction64::from_angle(t)?),
        (None, None) => bail!("one of --theta or --rational is required"),
    }
}

fn parse_rational(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected K1,K2, got `{s}`"))?;
    let p = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("`{t}`: {e}"));
    Ok((p(a)?, p(b)?))
}

/// Decimal with at most 12 fractional digits and no trailing zeros.
fn short(x: f64) -> String {
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn print_count(c: SeparableCount) {
    match c {
        SeparableCount::Infinite => println!("count: infinite"),
        SeparableCount::Finite {
            count,
            singular_coincidence,
        } => {
            println!("count: {count}");
            if singular_coincidence {
                println!("warning: direction runs along a nodal diameter; points coincide with singular crossings");
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Lattice { n } => {
            let circle = enumerate_circle(n)?;
            let sm = circle.spectral_measure(8);
            println!("n: {n}");
            println!("r2: {}", circle.r2());
            let pts: Vec<String> = circle
                .points()
                .iter()
                .map(|p| format!("({},{})", p.lambda1, p.lambda2))
                .collect();
            println!("points: {}", pts.join(" "));
            println!("mu4: {}", sm.mu4());
            println!("class: {:?}", sm.class);
        }
        Command::Expect { n, theta } => {
            let b = kac_rice_breakdown(n, theta)?;
            println!("{}", short(b.expectation));
            println!("n: {}", b.n);
            println!("theta: {}", b.theta);
            println!("mu4: {}", b.mu4);
            println!("radicand: {}", b.radicand);
            println!("phi0: {}", b.phi0);
            println!("jexp: {}", b.jexp);
            println!("density: {}", b.density);
            println!("expectation: {}", b.expectation);
            println!("conditioned_expectation: {}", 2.0 * b.expectation);
            println!("degenerate: {}", b.degenerate);
        }
        Command::Count {
            source,
            dir,
            grid_cells,
            dump,
            verbose,
        } => {
            let f = source.build()?;
            if let Some(path) = dump {
                f.save(&path)?;
            }
            let zeta = dir.direction()?;
            let opts = CountOptions {
                grid_cells,
                ..CountOptions::default()
            };
            let r = count_directional_points(&f, &zeta, &opts)?;
            println!("count: {}", r.count);
            println!("n: {}", r.n);
            println!("theta: {}", r.direction.theta());
            println!("grid_cells: {}", r.grid_cells);
            println!("geodesics: {}", r.geodesics.len());
            for g in &r.geodesics {
                println!("  normal=({},{}) offset={:.12}", g.normal.0, g.normal.1, g.offset);
            }
            println!("singular_suspects: {}", r.singular_suspects.len());
            println!("bezout_bound: {} (within: {})", r.bezout_bound, r.within_bezout);
            if let Some(gb) = r.geodesic_bound {
                println!("geodesic_bound: {gb} (within: {})", r.within_geodesic_bound);
            }
            println!("inconclusive: {}", r.inconclusive);
            if verbose {
                for p in &r.points {
                    println!("  x=({:.12}, {:.12}) |grad|={:.6e}", p.x[0], p.x[1], p.grad_norm);
                }
            }
        }
        Command::Mc {
            n,
            dir,
            samples,
            seed,
            grid_cells,
            out,
            serial,
            no_timing,
        } => {
            let mut cfg = ExperimentConfig::new(n, dir.direction()?, samples, seed);
            cfg.grid_cells = grid_cells;
            cfg.output = out;
            cfg.parallel = !serial;
            cfg.record_timing = !no_timing;
            let s = run_monte_carlo(&cfg)?;
            println!("n: {}", s.n);
            println!("theta: {}", s.theta);
            println!("samples: {} (used {}, singular excluded {})", s.samples, s.used, s.excluded_singular);
            println!("mean: {}", s.mean);
            println!("std_error: {}", s.std_error);
            println!("prediction: {}", s.prediction);
            println!("z: {}", s.z_score);
            println!("conditioned_prediction: {}", s.conditioned_prediction);
            println!("conditioned_z: {}", s.conditioned_z_score);
            println!("max_count: {}", s.max_count);
            println!("bezout_violations: {}", s.bezout_violations);
        }
        Command::Disk {
            m,
            k,
            zeta_angle,
            phase,
            svg,
        } => {
            let e = DiskEigenfunction64::new(m, k, phase)?;
            println!("j_mk: {}", e.j_mk);
            println!("eigenvalue: {}", e.eigenvalue());
            print_count(e.directional_count(zeta_angle));
            if let Some(path) = svg {
                std::fs::write(&path, render_disk_svg(&e, 401))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
        Command::Rect { alpha, m, n, zeta_angle } => {
            let r = RectangleSpec64::new(alpha, m, n)?;
            println!("eigenvalue: {}", r.eigenvalue());
            print_count(r.directional_count(zeta_angle));
        }
        Command::Plot {
            source,
            theta,
            rational,
            grid_cells,
            out,
        } => {
            let f = source.build()?;
            let zeta = if theta.is_some() || rational.is_some() {
                Some(direction(theta, rational)?)
            } else {
                None
            };
            emit_nodal_svg(&f, zeta.as_ref(), grid_cells, &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

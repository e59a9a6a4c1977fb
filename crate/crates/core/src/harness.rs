//! Monte Carlo campaigns, CSV persistence and SVG nodal portraits.
//!
//! Every sample draws from its own generator, seeded from `(seed, index)`
//! by the SplitMix64 counter construction, so a campaign produces the same
//! records whether it runs serially or on the rayon pool.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::{Polyline, SampledGrid};
use crate::direction_count::{
    count_directional_points, default_grid_cells, nodal_polylines, CountOptions, Direction,
    DirectionalCountReport,
};
use crate::eigenfunction::{sample_arithmetic_wave, ToralEigenfunction};
use crate::error::{Error, Result};
use crate::kac_rice::{conditioned_expected_count, expected_count};
use crate::lattice_circle::{enumerate_circle, LatticeCircle};
use crate::separable::DiskEigenfunction;

pub const CSV_HEADER: &str = "sample_index,derived_seed,n,theta,count,num_geodesics,singular_flag,wall_time_ms";

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The `index`-th output of a SplitMix64 stream started at `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))))
}

/// Generator for sample `index` of a campaign seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, index))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: u64,
    pub direction: Direction<f64>,
    pub samples: usize,
    pub seed: u64,
    pub grid_cells: Option<usize>,
    pub output: Option<PathBuf>,
    pub parallel: bool,
    /// When false, `wall_time_ms` is written as 0 so output files are
    /// byte-reproducible.
    pub record_timing: bool,
}

impl ExperimentConfig {
    pub fn new(n: u64, direction: Direction<f64>, samples: usize, seed: u64) -> Self {
        Self {
            n,
            direction,
            samples,
            seed,
            grid_cells: None,
            output: None,
            parallel: true,
            record_timing: true,
        }
    }

    pub fn validate(&self) -> Result<LatticeCircle> {
        if self.samples == 0 {
            return Err(Error::InvalidConfig("samples must be at least 1".into()));
        }
        enumerate_circle(self.n)
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub sample_index: u64,
    pub derived_seed: u64,
    pub n: u64,
    pub theta: f64,
    pub count: u64,
    pub num_geodesics: u64,
    pub singular_flag: bool,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloSummary {
    pub n: u64,
    pub theta: f64,
    pub samples: usize,
    /// Samples entering the mean (singular ones excluded).
    pub used: usize,
    pub excluded_singular: usize,
    pub mean: f64,
    pub std_error: f64,
    /// [`expected_count`]
    pub prediction: f64,
    pub z_score: f64,
    /// [`conditioned_expected_count`]
    pub conditioned_prediction: f64,
    pub conditioned_z_score: f64,
    pub max_count: u64,
    pub bezout_violations: usize,
    pub odd_counts: usize,
    #[serde(skip)]
    pub records: Vec<ExperimentRecord>,
}

/// Samples one wave for index `i` and counts its directional points.
pub fn run_sample(
    cfg: &ExperimentConfig,
    circle: &LatticeCircle,
    index: u64,
) -> Result<(ExperimentRecord, DirectionalCountReport<f64>)> {
    let start = Instant::now();
    let derived_seed = derive_seed(cfg.seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(derived_seed);
    let f: ToralEigenfunction<f64> = sample_arithmetic_wave(circle, &mut rng);
    let opts = CountOptions {
        grid_cells: cfg.grid_cells,
        ..CountOptions::default()
    };
    let report = count_directional_points(&f, &cfg.direction, &opts)?;
    let wall = if cfg.record_timing {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    let record = ExperimentRecord {
        sample_index: index,
        derived_seed,
        n: cfg.n,
        theta: cfg.direction.theta(),
        count: report.count as u64,
        num_geodesics: report.geodesics.len() as u64,
        singular_flag: report.inconclusive,
        wall_time_ms: wall,
    };
    Ok((record, report))
}

/// Runs the campaign and compares the mean count with the closed-form
/// expectation. Writes the CSV when `cfg.output` is set.
pub fn run_monte_carlo(cfg: &ExperimentConfig) -> Result<MonteCarloSummary> {
    let circle = cfg.validate()?;
    let one = |i: usize| run_sample(cfg, &circle, i as u64).map(|(r, _)| r);
    let records: Vec<ExperimentRecord> = if cfg.parallel {
        (0..cfg.samples).into_par_iter().map(one).collect::<Result<_>>()?
    } else {
        (0..cfg.samples).map(one).collect::<Result<_>>()?
    };

    let used: Vec<f64> = records
        .iter()
        .filter(|r| !r.singular_flag)
        .map(|r| r.count as f64)
        .collect();
    let m = used.len() as f64;
    let mean = if used.is_empty() { f64::NAN } else { used.iter().sum::<f64>() / m };
    let var = if used.len() > 1 {
        used.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (m - 1.0)
    } else {
        0.0
    };
    let std_error = (var / m).sqrt();
    let prediction = expected_count(cfg.n, cfg.direction.theta())?;
    let conditioned_prediction = conditioned_expected_count(cfg.n, cfg.direction.theta())?;
    let z = |p: f64| {
        if std_error > 0.0 {
            (mean - p) / std_error
        } else if mean == p {
            0.0
        } else {
            f64::INFINITY.copysign(mean - p)
        }
    };
    let bezout = 8 * cfg.n;
    let summary = MonteCarloSummary {
        n: cfg.n,
        theta: cfg.direction.theta(),
        samples: cfg.samples,
        used: used.len(),
        excluded_singular: records.len() - used.len(),
        mean,
        std_error,
        prediction,
        z_score: z(prediction),
        conditioned_prediction,
        conditioned_z_score: z(conditioned_prediction),
        max_count: records.iter().map(|r| r.count).max().unwrap_or(0),
        bezout_violations: records.iter().filter(|r| r.count > bezout).count(),
        odd_counts: records
            .iter()
            .filter(|r| !r.singular_flag && r.num_geodesics == 0 && r.count % 2 == 1)
            .count(),
        records,
    };
    if let Some(path) = &cfg.output {
        write_csv_file(path, &summary.records)?;
    }
    Ok(summary)
}

pub fn write_csv<W: Write>(writer: W, records: &[ExperimentRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record(CSV_HEADER.split(','))?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<ExperimentRecord>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header = rdr.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unexpected CSV header `{header}`"),
        });
    }
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn write_csv_file(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(std::io::BufWriter::new(file), records)
}

pub fn read_csv_file(path: &Path) -> Result<Vec<ExperimentRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(std::io::BufReader::new(file))
}

// SVG output: 1000×1000 viewBox, y axis pointing up.

const SVG_SIZE: f64 = 1000.0;

fn svg_open(out: &mut String) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 1000 1000" width="1000" height="1000">"#
    )
    .unwrap();
    writeln!(out, r#"<rect x="0" y="0" width="1000" height="1000" fill="white" stroke="black" stroke-width="1"/>"#)
        .unwrap();
}

fn to_svg(p: [f64; 2]) -> (f64, f64) {
    (SVG_SIZE * p[0], SVG_SIZE * (1.0 - p[1]))
}

fn write_path(out: &mut String, run: &[[f64; 2]], map: impl Fn([f64; 2]) -> (f64, f64)) {
    if run.len() < 2 {
        return;
    }
    let coords: Vec<String> = run
        .iter()
        .map(|&p| {
            let (x, y) = map(p);
            format!("{x:.2},{y:.2}")
        })
        .collect();
    writeln!(
        out,
        r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        coords.join(" ")
    )
    .unwrap();
}

/// Splits torus polylines where they wrap across the unit square.
pub fn unwrap_runs(line: &Polyline<f64>) -> Vec<Vec<[f64; 2]>> {
    let mut runs = Vec::new();
    let mut cur: Vec<[f64; 2]> = Vec::new();
    let mut pts = line.points.clone();
    if line.closed && !pts.is_empty() {
        pts.push(pts[0]);
    }
    for p in pts {
        if let Some(q) = cur.last() {
            if (p[0] - q[0]).abs() > 0.5 || (p[1] - q[1]).abs() > 0.5 {
                runs.push(std::mem::take(&mut cur));
            }
        }
        cur.push(p);
    }
    if !cur.is_empty() {
        runs.push(cur);
    }
    runs.retain(|r| r.len() >= 2);
    runs
}

/// Nodal portrait of `f` on the unit square. With a direction, the
/// directional points are drawn as filled circles and detected geodesics as
/// dashed lines.
pub fn render_nodal_svg(f: &ToralEigenfunction<f64>, zeta: Option<&Direction<f64>>, grid_cells: Option<usize>) -> Result<String> {
    let n = f
        .n()
        .or_else(|| f.terms().map(|(l, _)| l.norm_sq() as u64).max())
        .unwrap_or(1);
    let cells = grid_cells.unwrap_or_else(|| default_grid_cells(n));
    let lines = nodal_polylines(f, cells);
    let mut out = String::new();
    svg_open(&mut out);
    writeln!(out, r#"<g id="nodal">"#).unwrap();
    for line in &lines {
        for run in unwrap_runs(line) {
            write_path(&mut out, &run, to_svg);
        }
    }
    writeln!(out, "</g>").unwrap();

    if let Some(z) = zeta {
        let opts = CountOptions {
            grid_cells: Some(cells),
            ..CountOptions::default()
        };
        let report = count_directional_points(f, z, &opts)?;
        writeln!(out, r#"<defs><clipPath id="square"><rect x="0" y="0" width="1000" height="1000"/></clipPath></defs>"#)
            .unwrap();
        writeln!(out, r#"<g id="geodesics" clip-path="url(#square)">"#).unwrap();
        for g in &report.geodesics {
            let (k1, k2) = g.normal;
            let kk = (k1 * k1 + k2 * k2) as f64;
            let (v1, v2) = g.direction;
            let vl = ((v1 * v1 + v2 * v2) as f64).sqrt();
            let reach = k1.abs() + k2.abs() + 1;
            for shift in -reach..=reach {
                let c = g.offset + shift as f64;
                let p = [c * k1 as f64 / kk, c * k2 as f64 / kk];
                let a = to_svg([p[0] - 4.0 * v1 as f64 / vl, p[1] - 4.0 * v2 as f64 / vl]);
                let b = to_svg([p[0] + 4.0 * v1 as f64 / vl, p[1] + 4.0 * v2 as f64 / vl]);
                writeln!(
                    out,
                    r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="blue" stroke-width="2" stroke-dasharray="12,8"/>"#,
                    a.0, a.1, b.0, b.1
                )
                .unwrap();
            }
        }
        writeln!(out, "</g>").unwrap();
        writeln!(out, r#"<g id="points">"#).unwrap();
        for p in &report.points {
            let (x, y) = to_svg(p.x);
            writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="red"/>"#).unwrap();
        }
        writeln!(out, "</g>").unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    Ok(out)
}

pub fn emit_nodal_svg(
    f: &ToralEigenfunction<f64>,
    zeta: Option<&Direction<f64>>,
    grid_cells: Option<usize>,
    path: &Path,
) -> Result<()> {
    let svg = render_nodal_svg(f, zeta, grid_cells)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}

/// Nodal portrait of a disk eigenfunction, sampled on a Cartesian grid and
/// clipped to the unit disk.
pub fn render_disk_svg(e: &DiskEigenfunction<f64>, vertices: usize) -> String {
    let grid = SampledGrid::rectangle([-1.0, -1.0], [1.0, 1.0], vertices, vertices, |p| e.value(p));
    let lines = grid.march(Some(&|p| e.value(p)));
    let map = |p: [f64; 2]| (SVG_SIZE * (p[0] + 1.0) / 2.0, SVG_SIZE * (1.0 - p[1]) / 2.0);
    let mut out = String::new();
    svg_open(&mut out);
    writeln!(out, r#"<circle cx="500" cy="500" r="500" fill="none" stroke="gray" stroke-width="2"/>"#).unwrap();
    writeln!(out, r#"<g id="nodal">"#).unwrap();
    for line in &lines {
        let mut pts = line.points.clone();
        if line.closed && !pts.is_empty() {
            pts.push(pts[0]);
        }
        let mut run = Vec::new();
        for p in pts {
            if p[0].hypot(p[1]) <= 1.0 {
                run.push(p);
            } else {
                write_path(&mut out, &run, map);
                run.clear();
            }
        }
        write_path(&mut out, &run, map);
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, "</svg>").unwrap();
    out
}

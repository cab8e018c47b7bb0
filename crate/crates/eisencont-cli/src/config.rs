//! Run configuration: a TOML file with four sections, overridable from the command line.

use std::path::{Path, PathBuf};

use clap::Args;
use eisencont::par::Parallelism;
use eisencont::sl2::Sl2Config;
use eisencont::specfn::{KernelShape, RadialKernel};
use eisencont::C64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridBlock,
    pub kernel: KernelBlock,
    pub continuation: ContinuationBlock,
    pub output: OutputBlock,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridBlock {
    pub c: f64,
    pub c0: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
    /// Weight exponent `N`.
    pub n_weight: u32,
    pub lagrange_order: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelBlock {
    pub radius: f64,
    /// `"poly<k>"` for `(1 - (u/r)^2)^k`, or `"bump"`.
    pub shape: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContinuationBlock {
    /// Random test covectors for the constant-term equations.
    pub n_test: usize,
    pub seed: u64,
    pub band: [f64; 2],
    /// Anchor of the Fredholm splitting, `[re, im]`.
    pub s0: C64,
    /// Points in `Re s > 1` where uniqueness is sampled.
    pub unq_points: Vec<C64>,
    pub rank_tol: f64,
    pub cond_cap: f64,
    pub residual_tol: f64,
    pub denominator_floor: f64,
    pub fit_tol: f64,
    pub parallelism: Parallelism,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// Human-readable text (CSV for `mscan`).
    #[default]
    Plain,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub format: Format,
    /// Write here instead of stdout.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl Default for GridBlock {
    fn default() -> Self {
        let d = Sl2Config::default();
        GridBlock { c: d.c, c0: d.c0, y_max: d.y_max, nx: d.nx, ny: d.ny, n_weight: d.n_weight, lagrange_order: d.lagrange_order }
    }
}

impl Default for KernelBlock {
    fn default() -> Self {
        let k = Sl2Config::default().kernel;
        KernelBlock { radius: k.radius, shape: shape_name(k.shape) }
    }
}

impl Default for ContinuationBlock {
    fn default() -> Self {
        let d = Sl2Config::default();
        ContinuationBlock {
            n_test: d.n_test,
            seed: d.seed,
            band: d.band,
            s0: d.s0,
            unq_points: d.unq_points,
            rank_tol: d.rank_tol,
            cond_cap: d.cond_cap,
            residual_tol: d.residual_tol,
            denominator_floor: d.denominator_floor,
            fit_tol: d.fit_tol,
            parallelism: d.parallelism,
        }
    }
}

fn shape_name(s: KernelShape) -> String {
    match s {
        KernelShape::Poly { power } => format!("poly{power}"),
        KernelShape::Bump => "bump".into(),
    }
}

fn parse_shape(s: &str) -> Result<KernelShape, CliError> {
    if s == "bump" {
        return Ok(KernelShape::Bump);
    }
    s.strip_prefix("poly")
        .and_then(|k| k.parse().ok())
        .map(|power| KernelShape::Poly { power })
        .ok_or_else(|| CliError::Usage(format!("unknown kernel shape {s:?} (expected poly<k> or bump)")))
}

/// Command-line overrides; every flag wins over the file.
#[derive(Args, Clone, Debug, Default)]
pub struct Overrides {
    #[arg(long, global = true)]
    pub c: Option<f64>,
    #[arg(long, global = true)]
    pub c0: Option<f64>,
    #[arg(long, global = true)]
    pub y_max: Option<f64>,
    #[arg(long, global = true)]
    pub nx: Option<usize>,
    #[arg(long, global = true)]
    pub ny: Option<usize>,
    #[arg(long, global = true)]
    pub n_weight: Option<u32>,
    #[arg(long, global = true)]
    pub radius: Option<f64>,
    /// poly<k> or bump
    #[arg(long, global = true)]
    pub kernel: Option<String>,
    #[arg(long, global = true)]
    pub n_test: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// rayon or sequential
    #[arg(long, global = true)]
    pub parallelism: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// File (if any), then flags, then validation.
    pub fn resolve(path: Option<&Path>, o: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match path {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        let g = &mut cfg.grid;
        macro_rules! set {
            ($dst:expr, $src:expr) => {
                if let Some(v) = $src.clone() {
                    $dst = v;
                }
            };
        }
        set!(g.c, o.c);
        set!(g.c0, o.c0);
        set!(g.y_max, o.y_max);
        set!(g.nx, o.nx);
        set!(g.ny, o.ny);
        set!(g.n_weight, o.n_weight);
        set!(cfg.kernel.radius, o.radius);
        set!(cfg.kernel.shape, o.kernel);
        set!(cfg.continuation.n_test, o.n_test);
        set!(cfg.continuation.seed, o.seed);
        if let Some(p) = &o.parallelism {
            cfg.continuation.parallelism = match p.as_str() {
                "rayon" => Parallelism::Rayon,
                "sequential" => Parallelism::Sequential,
                _ => return Err(CliError::Usage(format!("unknown parallelism {p:?} (expected rayon or sequential)"))),
            };
        }
        set!(cfg.output.format, o.format);
        if o.json {
            cfg.output.format = Format::Json;
        }
        if o.out.is_some() {
            cfg.output.path = o.out.clone();
        }
        cfg.to_sl2()?.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }

    pub fn to_sl2(&self) -> Result<Sl2Config, CliError> {
        let (g, c) = (&self.grid, &self.continuation);
        Ok(Sl2Config {
            c: g.c,
            c0: g.c0,
            y_max: g.y_max,
            nx: g.nx,
            ny: g.ny,
            n_weight: g.n_weight,
            kernel: RadialKernel { radius: self.kernel.radius, shape: parse_shape(&self.kernel.shape)? },
            lagrange_order: g.lagrange_order,
            n_test: c.n_test,
            seed: c.seed,
            band: c.band,
            s0: c.s0,
            unq_points: c.unq_points.clone(),
            rank_tol: c.rank_tol,
            cond_cap: c.cond_cap,
            residual_tol: c.residual_tol,
            denominator_floor: c.denominator_floor,
            fit_tol: c.fit_tol,
            parallelism: c.parallelism,
        })
    }

    pub fn seed(&self) -> u64 {
        self.continuation.seed
    }

    /// The effective configuration as `# `-prefixed TOML lines.
    pub fn echo(&self) -> String {
        let body = toml::to_string(self).expect("config serialises");
        let mut out = format!("# eisencont {} effective config (seed {})\n", env!("CARGO_PKG_VERSION"), self.seed());
        for line in body.lines() {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}

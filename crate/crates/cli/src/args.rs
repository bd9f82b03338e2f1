use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use squid_core::field::{Dtype, GridIndex, RegionSelection};
use squid_core::glyph::{
    BodyShape, GlyphKind, DEFAULT_EXPONENT, DEFAULT_SEGMENTS, DEFAULT_USER_SCALE,
};

#[derive(Debug, Parser)]
#[command(
    name = "squid",
    version,
    about = "Ensemble vector field uncertainty glyphs"
)]
pub struct Cli {
    /// Worker threads for per-location computation [default: all cores]
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the rotating synthetic ensemble
    GenSynthetic(GenSynthetic),
    /// Resample a single-run brick into an ensemble dataset
    IngestBrick(IngestBrick),
    /// Member depths per location
    Depth(DepthArgs),
    /// Uncertainty summaries per location
    Summarize(SummarizeArgs),
    /// Glyph scene as OBJ or JSON
    Glyphs(GlyphArgs),
    /// Maximum magnitude variation per time step
    Magvar(MagvarArgs),
    /// Member detail and outlier-filtered summary at one location
    Point(PointArgs),
    /// Serve datasets over HTTP
    Serve(ServeArgs),
}

fn dtype(s: &str) -> Result<Dtype, String> {
    s.parse().map_err(|e: squid_core::Error| e.to_string())
}

fn triple(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<&str> = s.split([',', ':']).map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!(
            "expected three comma-separated integers, got {s:?}"
        ));
    }
    let mut out = [0; 3];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p
            .parse()
            .map_err(|_| format!("bad integer {p:?} in {s:?}"))?;
    }
    Ok(out)
}

fn region(s: &str) -> Result<RegionSelection, String> {
    s.parse().map_err(|e: squid_core::Error| e.to_string())
}

fn glyph_kind(s: &str) -> Result<GlyphKind, String> {
    s.parse().map_err(|e: squid_core::Error| e.to_string())
}

fn body(s: &str) -> Result<BodyShape, String> {
    s.parse().map_err(|e: squid_core::Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct GenSynthetic {
    #[arg(long, default_value_t = 10)]
    pub nx: usize,
    #[arg(long, default_value_t = 10)]
    pub ny: usize,
    #[arg(long, default_value_t = 5)]
    pub nt: usize,
    #[arg(long, default_value_t = 20)]
    pub members: usize,
    /// Uniform noise amplitude per component
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,
    #[arg(long)]
    pub seed: u64,
    /// Storage type: f32 or f64
    #[arg(long, default_value = "f32", value_parser = dtype)]
    pub dtype: Dtype,
    /// Output dataset directory
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct IngestBrick {
    /// Brick manifest (brick.json)
    #[arg(long)]
    pub manifest: PathBuf,
    /// Output grid step per axis, e.g. 5,5,1
    #[arg(long, value_parser = triple, conflicts_with = "dims", required_unless_present = "dims")]
    pub stride: Option<[usize; 3]>,
    /// Output grid size per axis, e.g. 40,40,100
    #[arg(long, value_parser = triple)]
    pub dims: Option<[usize; 3]>,
    /// Neighborhood size per axis; its cells become the members
    #[arg(long, value_parser = triple)]
    pub patch: [usize; 3],
    #[arg(long, default_value = "f32", value_parser = dtype)]
    pub dtype: Dtype,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Selection {
    /// Dataset directory
    #[arg(long)]
    pub dataset: PathBuf,
    /// Time step
    #[arg(long, default_value_t = 0)]
    pub t: usize,
    /// Inclusive region i0:i1,j0:j1,k0:k1 [default: whole grid]
    #[arg(long, value_parser = region, conflicts_with = "ijk")]
    pub region: Option<RegionSelection>,
    /// Single location i,j,k
    #[arg(long, value_parser = triple)]
    pub ijk: Option<[usize; 3]>,
}

impl Selection {
    pub fn region(&self) -> Option<RegionSelection> {
        self.region
            .or_else(|| self.ijk.map(|[i, j, k]| RegionSelection::single(i, j, k)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DepthFormat {
    /// location,member,depth,count
    Long,
    /// One row per location, one column per member
    Heatmap,
    Json,
}

#[derive(Debug, Args)]
pub struct DepthArgs {
    #[command(flatten)]
    pub sel: Selection,
    #[arg(long, value_enum, default_value_t = DepthFormat::Long)]
    pub format: DepthFormat,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    #[command(flatten)]
    pub sel: Selection,
    #[arg(long, value_enum, default_value_t = TableFormat::Json)]
    pub format: TableFormat,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SceneFormat {
    Obj,
    Json,
}

#[derive(Debug, Args)]
pub struct GlyphArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub t: usize,
    /// squid, cone, comet or tailed-disc
    #[arg(long = "type", default_value = "squid", value_parser = glyph_kind)]
    pub kind: GlyphKind,
    #[arg(long, value_parser = region)]
    pub region: Option<RegionSelection>,
    /// Superellipse exponent (>= 1)
    #[arg(long, default_value_t = DEFAULT_EXPONENT)]
    pub exponent: f64,
    /// Cross-section segments (>= 8)
    #[arg(long, default_value_t = DEFAULT_SEGMENTS)]
    pub segments: usize,
    /// Largest glyph length as a fraction of the grid cell
    #[arg(long, default_value_t = DEFAULT_USER_SCALE)]
    pub scale: f64,
    /// Squid body: tapered or shaft
    #[arg(long, default_value = "tapered", value_parser = body)]
    pub body: BodyShape,
    #[arg(long, value_enum, default_value_t = SceneFormat::Obj)]
    pub format: SceneFormat,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MagvarArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Also report per-location variation at this time step
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
    /// Series output (CSV: t,max_delta_h)
    #[arg(long)]
    pub out: PathBuf,
    /// Per-location CSV for --t (CSV format only)
    #[arg(long, requires = "t")]
    pub slice_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub t: usize,
    /// Location i,j,k
    #[arg(long, value_parser = triple)]
    pub ijk: [usize; 3],
    /// Number of lowest-depth members to drop
    #[arg(long, default_value_t = 0)]
    pub outliers: usize,
    #[arg(long, value_enum, default_value_t = TableFormat::Json)]
    pub format: TableFormat,
    #[arg(long)]
    pub out: PathBuf,
}

impl PointArgs {
    pub fn index(&self) -> GridIndex {
        let [i, j, k] = self.ijk;
        GridIndex::new(i, j, k, self.t)
    }
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Directory whose subdirectories are datasets
    #[arg(long)]
    pub data_dir: PathBuf,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    /// Allowed browser origin for CORS ("*" for any)
    #[arg(long)]
    pub cors_origin: Option<String>,
}

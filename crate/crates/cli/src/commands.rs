use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use squid_core::field::{
    brick_to_ensemble, generate_synthetic, load_brick, load_dataset, write_dataset, EnsembleField,
    RegionSelection, ResamplePlan, SyntheticParams,
};
use squid_core::glyph::{GlyphScene, SceneRequest};
use squid_core::point::{depth_heatmap, point_detail};
use squid_core::summary::{magvar, summarize_region, summarize_time, write_summaries_csv};
use squid_core::Error;
use squid_server::Registry;

use crate::args::*;
use crate::CliError;

type CmdResult = Result<Vec<PathBuf>, CliError>;

pub fn execute(cli: Cli) -> CmdResult {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::GenSynthetic(a) => gen_synthetic(a),
        Command::IngestBrick(a) => ingest_brick(a),
        Command::Depth(a) => depth(a),
        Command::Summarize(a) => summarize(a),
        Command::Glyphs(a) => glyphs(a),
        Command::Magvar(a) => magnitude_variation(a),
        Command::Point(a) => point(a),
        Command::Serve(a) => serve(a),
    })
}

fn write_file<F, E>(path: &Path, body: F) -> Result<PathBuf, CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<(), E>,
    E: std::fmt::Display,
{
    let out = |message: String| CliError::Output {
        path: path.to_path_buf(),
        message,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| out(e.to_string()))?;
    }
    let mut w = BufWriter::new(File::create(path).map_err(|e| out(e.to_string()))?);
    body(&mut w).map_err(|e| out(e.to_string()))?;
    w.flush().map_err(|e| out(e.to_string()))?;
    Ok(path.to_path_buf())
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<PathBuf, CliError> {
    write_file(path, |w| w.write_all(bytes))
}

/// Writes the dataset and reads it back to confirm it loads.
fn save_dataset(field: &EnsembleField, dir: &Path) -> CmdResult {
    write_dataset(field, dir)?;
    load_dataset(dir)?;
    Ok(vec![dir.to_path_buf()])
}

fn gen_synthetic(a: GenSynthetic) -> CmdResult {
    let p = SyntheticParams {
        nx: a.nx,
        ny: a.ny,
        nt: a.nt,
        n_members: a.members,
        noise_amp: a.noise,
        seed: a.seed,
    };
    let field = generate_synthetic(&p)?.with_dtype(a.dtype);
    save_dataset(&field, &a.out)
}

fn ingest_brick(a: IngestBrick) -> CmdResult {
    let brick = load_brick(&a.manifest)?;
    let plan = match (a.stride, a.dims) {
        (Some(stride), _) => ResamplePlan::from_stride(brick.dims, stride, a.patch)?,
        (None, Some(dims)) => ResamplePlan::from_target_dims(brick.dims, dims, a.patch)?,
        (None, None) => {
            return Err(CliError::Usage(
                "one of --stride or --dims is required".into(),
            ))
        }
    };
    let field = brick_to_ensemble(&brick, &plan)?.with_dtype(a.dtype);
    save_dataset(&field, &a.out)
}

fn selected_region(field: &EnsembleField, sel: &Selection) -> RegionSelection {
    sel.region()
        .unwrap_or_else(|| RegionSelection::full(field.dims()))
}

fn depth(a: DepthArgs) -> CmdResult {
    let field = load_dataset(&a.sel.dataset)?;
    let m = depth_heatmap(&field, &selected_region(&field, &a.sel), a.sel.t)?;
    let path = match a.format {
        DepthFormat::Long => write_file(&a.out, |w| m.write_csv(w))?,
        DepthFormat::Heatmap => write_file(&a.out, |w| m.write_heatmap_csv(w))?,
        DepthFormat::Json => write_file(&a.out, |w| serde_json::to_writer(w, &m))?,
    };
    Ok(vec![path])
}

fn summarize(a: SummarizeArgs) -> CmdResult {
    let field = load_dataset(&a.sel.dataset)?;
    let rows = summarize_region(&field, &selected_region(&field, &a.sel), a.sel.t)?;
    let path = match a.format {
        TableFormat::Json => write_file(&a.out, |w| serde_json::to_writer(w, &rows))?,
        TableFormat::Csv => write_file(&a.out, |w| write_summaries_csv(&rows, w))?,
    };
    Ok(vec![path])
}

fn glyphs(a: GlyphArgs) -> CmdResult {
    let field = load_dataset(&a.dataset)?;
    field.check_time(a.t)?;
    let req = SceneRequest {
        t: a.t,
        region: a.region,
        kind: a.kind,
        exponent: a.exponent,
        segments: a.segments,
        user_scale: a.scale,
        body: a.body,
    };
    let scene = GlyphScene::build(&field, &summarize_time(&field, a.t)?, &req)?;
    for g in &scene.glyphs {
        g.mesh.validate().map_err(|d| {
            Error::Degenerate(format!(
                "glyph at {} failed mesh validation: {d:?}",
                g.location
            ))
        })?;
    }
    let path = match a.format {
        SceneFormat::Json => write_bytes(&a.out, scene.to_json().as_bytes())?,
        SceneFormat::Obj => write_file(&a.out, |w| scene.write_obj(w))?,
    };
    Ok(vec![path])
}

fn magnitude_variation(a: MagvarArgs) -> CmdResult {
    let field = load_dataset(&a.dataset)?;
    let mv = magvar(&field, a.t)?;
    match a.format {
        TableFormat::Json => {
            if a.slice_out.is_some() {
                return Err(CliError::Usage(
                    "--slice-out applies to CSV output only".into(),
                ));
            }
            Ok(vec![write_file(&a.out, |w| serde_json::to_writer(w, &mv))?])
        }
        TableFormat::Csv => {
            let mut paths = vec![write_file(&a.out, |w| mv.write_series_csv(w))?];
            if let Some(p) = &a.slice_out {
                paths.push(write_file(p, |w| mv.write_slice_csv(w))?);
            }
            Ok(paths)
        }
    }
}

fn point(a: PointArgs) -> CmdResult {
    let field = load_dataset(&a.dataset)?;
    let analysis = point_detail(&field, a.index(), a.outliers)?;
    let path = match a.format {
        TableFormat::Json => write_file(&a.out, |w| serde_json::to_writer(w, &analysis))?,
        TableFormat::Csv => write_file(&a.out, |w| analysis.write_csv(w))?,
    };
    Ok(vec![path])
}

fn serve(a: ServeArgs) -> CmdResult {
    let (registry, skipped) = Registry::scan(&a.data_dir)?;
    for s in &skipped {
        eprintln!("warning: skipping {}: {}", s.path.display(), s.error);
    }
    eprintln!(
        "serving {} dataset(s) on http://{}:{}",
        registry.len(),
        a.host,
        a.port
    );
    let addr = SocketAddr::new(a.host, a.port);
    let rt = tokio::runtime::Runtime::new().map_err(|e| io_error(&a.data_dir, e))?;
    rt.block_on(squid_server::serve(
        registry,
        addr,
        a.cors_origin.as_deref(),
    ))
    .map_err(|e| io_error(Path::new(&addr.to_string()), e))?;
    Ok(Vec::new())
}

fn io_error(path: &Path, source: io::Error) -> CliError {
    CliError::Core(Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

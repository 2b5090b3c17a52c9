use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use thermfuse::depth::{
    aggregate_depth, fuse_cloud, parse_cloud, parse_depth_samples, parse_scan, scan_to_fused,
    write_cloud, write_depth_samples, write_scan,
};
use thermfuse::hotspot::{detect_blobs, Blob, Hotspot};
use thermfuse::pipeline::{fixed2, locate_hotspots, write_fusion_log, RunConfig};
use thermfuse::sim::{
    parse_scene, render_thermal, scene_ground_truth, simulate_cloud, simulate_depth_1d,
    simulate_scan2d,
};
use thermfuse::thermal::{
    apply_colormap, decode_raw_to_celsius, load_frame, write_celsius_csv, write_pgm, write_ppm,
};
use thermfuse::{RawThermalFrame, ScanParams};

use crate::{watch, CliError, Command};

pub const BLOB_HEADER: &str = "blob,area,centroid_x,centroid_y,peak_c,mean_c";
pub const HOTSPOT_HEADER: &str =
    "blob,area,centroid_x,centroid_y,peak_c,mean_c,x_c_mm,y_c_mm,z_c_mm,x_w_mm,y_w_mm,z_w_mm,d_mm";

pub fn dispatch(
    command: &Command,
    cfg: &RunConfig,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    match command {
        Command::Decode { ppm, t_min, t_max } => {
            decode(cfg, ppm.as_deref(), *t_min, *t_max, stdout)
        }
        Command::Detect => detect(cfg, stdout),
        Command::Localize1d { depth_samples } => localize1d(cfg, depth_samples.as_deref(), stdout),
        Command::Fuse2d { scan } => fuse2d(cfg, scan, stdout, stderr),
        Command::Fuse3d { cloud } => fuse3d(cfg, cloud, stdout, stderr),
        Command::Simulate {
            scene,
            width,
            height,
            grid,
            samples,
        } => simulate(cfg, scene, (*width, *height), *grid, *samples),
        Command::Watch { max_polls } => watch::run_watch(cfg, *max_polls, stdout, stderr),
    }
}

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|e| CliError::Failed(format!("cannot open {}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Failed(format!("cannot create {}: {e}", path.display())))
}

/// Runs `body` against the `--out` file, or stdout when none is set.
fn with_output(
    cfg: &RunConfig,
    stdout: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> Result<(), CliError>,
) -> Result<(), CliError> {
    match &cfg.output {
        Some(path) => {
            let mut file = create(path)?;
            body(&mut file)?;
            file.flush()?;
            Ok(())
        }
        None => {
            body(stdout)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

pub fn read_frame(path: &Path) -> Result<RawThermalFrame, CliError> {
    load_frame(open(path)?).map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))
}

fn input_frame(cfg: &RunConfig) -> Result<RawThermalFrame, CliError> {
    read_frame(cfg.require_input()?)
}

fn decode(
    cfg: &RunConfig,
    ppm: Option<&Path>,
    t_min: Option<f64>,
    t_max: Option<f64>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    let celsius = decode_raw_to_celsius(&input_frame(cfg)?);
    if let Some(path) = ppm {
        let (lo, hi) = celsius.min_max();
        let image = apply_colormap(&celsius, t_min.unwrap_or(lo), t_max.unwrap_or(hi))?;
        let mut file = create(path)?;
        write_ppm(&image, &mut file)?;
        file.flush()?;
    }
    with_output(cfg, stdout, |out| Ok(write_celsius_csv(&celsius, out)?))
}

fn blob_columns(index: usize, b: &Blob) -> String {
    format!(
        "{index},{},{},{},{},{}",
        b.area,
        fixed2(b.centroid.x),
        fixed2(b.centroid.y),
        fixed2(b.peak_t),
        fixed2(b.mean_t)
    )
}

fn detect(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let threshold = cfg.require_threshold()?;
    let celsius = decode_raw_to_celsius(&input_frame(cfg)?);
    let blobs = detect_blobs(&celsius, threshold);
    log::info!("{} blob(s) above {threshold} °C", blobs.len());
    with_output(cfg, stdout, |out| {
        writeln!(out, "{BLOB_HEADER}")?;
        for (i, b) in blobs.iter().enumerate() {
            writeln!(out, "{}", blob_columns(i, b))?;
        }
        Ok(())
    })
}

pub fn write_hotspots(hotspots: &[Hotspot], out: &mut dyn Write) -> Result<(), CliError> {
    writeln!(out, "{HOTSPOT_HEADER}")?;
    for (i, h) in hotspots.iter().enumerate() {
        let cols = [
            h.camera.x, h.camera.y, h.camera.z, h.world.x, h.world.y, h.world.z, h.range_d,
        ]
        .map(fixed2)
        .join(",");
        writeln!(out, "{},{cols}", blob_columns(i, &h.blob))?;
    }
    Ok(())
}

/// Depth from a samples file when given, otherwise `--depth`.
fn resolve_depth(cfg: &RunConfig, samples: Option<&Path>) -> Result<f64, CliError> {
    match samples {
        Some(path) => {
            let samples = parse_depth_samples(open(path)?)
                .map_err(|e| CliError::Failed(format!("{}: {e}", path.display())))?;
            let agg = aggregate_depth(&samples)?;
            log::info!(
                "depth {:.2} ± {:.2} mm from {} samples",
                agg.mean,
                agg.std,
                agg.n
            );
            Ok(agg.mean)
        }
        None => Ok(cfg.require_depth()?),
    }
}

pub fn locate(
    cfg: &RunConfig,
    frame: &RawThermalFrame,
    depth: f64,
) -> Result<Vec<Hotspot>, CliError> {
    let k = cfg.require_intrinsics()?;
    let threshold = cfg.require_threshold()?;
    Ok(locate_hotspots(
        frame,
        threshold,
        depth,
        &k,
        cfg.pose_or_origin(),
    )?)
}

fn localize1d(
    cfg: &RunConfig,
    samples: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<(), CliError> {
    cfg.require_intrinsics()?;
    cfg.require_threshold()?;
    let depth = resolve_depth(cfg, samples)?;
    let hotspots = locate(cfg, &input_frame(cfg)?, depth)?;
    with_output(cfg, stdout, |out| write_hotspots(&hotspots, out))
}

fn fuse2d(
    cfg: &RunConfig,
    scan_path: &Path,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let k = cfg.require_intrinsics()?;
    let fov = cfg.fov()?;
    let celsius = decode_raw_to_celsius(&input_frame(cfg)?);
    let scan = parse_scan(open(scan_path)?)
        .map_err(|e| CliError::Failed(format!("{}: {e}", scan_path.display())))?;
    let fusion = scan_to_fused(&scan, &fov, &k, &celsius);
    let s = fusion.summary;
    writeln!(
        stderr,
        "scan: {} steps, {} in view, {} fused, {} outside frame",
        scan.ranges().len(),
        s.in_fov,
        s.fused,
        s.excluded_bounds
    )?;
    with_output(cfg, stdout, |out| {
        Ok(write_fusion_log(&fusion.records, out)?)
    })
}

fn fuse3d(
    cfg: &RunConfig,
    cloud_path: &Path,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let k = cfg.require_intrinsics()?;
    let filt = cfg.cloud_filter()?;
    let celsius = decode_raw_to_celsius(&input_frame(cfg)?);
    let cloud = parse_cloud(open(cloud_path)?)
        .map_err(|e| CliError::Failed(format!("{}: {e}", cloud_path.display())))?;
    let fusion = fuse_cloud(&cloud, &filt, &k, &celsius);
    let s = fusion.summary;
    writeln!(
        stderr,
        "cloud: {} points, {} fused, {} weak, {} behind camera, {} outside frame",
        s.total(),
        s.fused,
        s.excluded_intensity,
        s.excluded_depth,
        s.excluded_bounds
    )?;
    with_output(cfg, stdout, |out| {
        Ok(write_fusion_log(&fusion.records, out)?)
    })
}

pub const SIM_FRAME: &str = "frame.pgm";
pub const SIM_SCAN: &str = "scan.csv";
pub const SIM_CLOUD: &str = "cloud.csv";
pub const SIM_DEPTH: &str = "depth1d.csv";
pub const SIM_TRUTH: &str = "truth.csv";

fn simulate(
    cfg: &RunConfig,
    scene_path: &Path,
    (width, height): (usize, usize),
    grid: (usize, usize),
    samples: usize,
) -> Result<(), CliError> {
    let k = cfg.require_intrinsics()?;
    let dir: PathBuf = cfg
        .output
        .clone()
        .ok_or_else(|| CliError::Usage("simulate needs --out <DIR>".into()))?;
    let (scene, mut noise) = parse_scene(open(scene_path)?)
        .map_err(|e| CliError::Failed(format!("{}: {e}", scene_path.display())))?;
    if let Some(seed) = cfg.seed {
        noise = noise.with_seed(seed);
    }
    fs::create_dir_all(&dir)?;

    let frame = render_thermal(&scene, &k, width, height, &noise)?;
    let mut f = create(&dir.join(SIM_FRAME))?;
    write_pgm(&frame, &mut f)?;
    f.flush()?;

    let scan = simulate_scan2d(&scene, ScanParams::default(), &noise)?;
    let mut f = create(&dir.join(SIM_SCAN))?;
    write_scan(&scan, &mut f)?;
    f.flush()?;

    let cloud = simulate_cloud(&scene, grid, &noise);
    let mut f = create(&dir.join(SIM_CLOUD))?;
    write_cloud(&cloud, &mut f)?;
    f.flush()?;

    // A scene with nothing on the optical axis has no single-beam reading.
    match simulate_depth_1d(&scene, samples, &noise) {
        Ok(depth) => {
            let mut f = create(&dir.join(SIM_DEPTH))?;
            write_depth_samples(&depth, &mut f)?;
            f.flush()?;
        }
        Err(e) => log::warn!("skipping {SIM_DEPTH}: {e}"),
    }

    let mut f = create(&dir.join(SIM_TRUTH))?;
    writeln!(f, "x_w_mm,y_w_mm,z_w_mm,peak_c")?;
    for g in scene_ground_truth(&scene) {
        let l = g.location;
        writeln!(
            f,
            "{},{},{},{}",
            fixed2(l.x),
            fixed2(l.y),
            fixed2(l.z),
            fixed2(g.peak_c)
        )?;
    }
    f.flush()?;
    log::info!("wrote simulation fixtures to {}", dir.display());
    Ok(())
}

//! Command-line front-end.
//!
//! Every successful command that writes files also writes a JSON run
//! manifest next to its primary output (`<out>.manifest.json`, or
//! `manifest.json` inside an output directory) recording the command line,
//! a hash of the array configuration, seeds and a SHA-256 of every output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analysis::{analyze_store, export_froxel_patch, reports_to_csv, DEFAULT_PATCH_MAGNIFY};
use crate::binning::{bin_lightfield, cdf_to_csv, fristogram, LightField};
use crate::error::{Error, Result};
use crate::filters::{reduce, FroxelStat, ReducedField};
use crate::lfgeom::{BaselineMode, CameraArrayConfig, CameraId, FroxelIndex};
use crate::lfio::{
    read_config, read_lightfield_dir, read_ppm, write_lightfield_dir, write_pgm_mask, write_ppm,
    ColorRaster,
};
use crate::metrics::{quality, QualityReport};
use crate::noise::{add_noise, NoiseParams, RNG_ALGORITHM};
use crate::scenegen::{random_scene, render, SceneSpec};
use crate::synth::{synthesize, ViewRequest};

#[derive(Parser, Debug)]
#[command(name = "fristogram", version, about = "Froxel analysis of camera-array light fields")]
#[command(arg_required_else_help = true)]
struct Cli {
    /// Worker threads (outputs are identical for every value).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Render a synthetic scene into a light-field directory.
    GenScene(GenSceneArgs),
    /// Add Gaussian or salt-and-pepper noise to the images of a light field.
    AddNoise(AddNoiseArgs),
    /// Assign rays to froxels and write per-froxel ray counts.
    Bin(LfArgs),
    /// Write the ray-count histogram and optionally its CDF.
    Fristogram(FristogramArgs),
    /// Per-froxel colour statistics and Lambertian labels.
    Analyze(AnalyzeArgs),
    /// Reduce every froxel to one ray with a mean or median filter.
    Reduce(ReduceArgs),
    /// Render a view on the array plane from a reduced field.
    Synthesize(SynthesizeArgs),
    /// PSNR and SSIM between two images or two light-field directories.
    Metrics(MetricsArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BaselineArg {
    Neighbor,
    Full,
}

impl From<BaselineArg> for BaselineMode {
    fn from(b: BaselineArg) -> Self {
        match b {
            BaselineArg::Neighbor => BaselineMode::Neighbor,
            BaselineArg::Full => BaselineMode::FullArray,
        }
    }
}

#[derive(Args, Debug)]
struct LfArgs {
    /// Light-field directory (array.json, cam_<t>_<s>.ppm, depth_<t>_<s>.pfm).
    #[arg(long)]
    lf: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Override the baseline mode of array.json.
    #[arg(long, value_enum)]
    baseline_mode: Option<BaselineArg>,
}

#[derive(Args, Debug)]
struct GenSceneArgs {
    /// Scene description (JSON). Without it a random scene is drawn from --seed.
    #[arg(long)]
    scene: Option<PathBuf>,
    /// Array configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NoiseArg {
    Gaussian,
    Sap,
}

#[derive(Args, Debug)]
struct AddNoiseArgs {
    #[arg(long)]
    lf: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    noise: NoiseArg,
    #[arg(long, default_value_t = 0.0)]
    mean: f64,
    #[arg(long, default_value_t = 0.01)]
    sigma2: f64,
    #[arg(long, default_value_t = 0.05)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct FristogramArgs {
    #[command(flatten)]
    lf: LfArgs,
    /// Also write the CDF over non-empty froxels.
    #[arg(long)]
    cdf: Option<PathBuf>,
    /// Count empty froxels of the bounded frustum as ray count 0.
    #[arg(long)]
    include_empty: bool,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    lf: LfArgs,
    #[arg(long, default_value_t = crate::analysis::DEFAULT_TAU)]
    tau: f64,
    /// Froxel `u,v,k` to export as a camera-grid patch.
    #[arg(long, value_parser = parse_froxel, requires = "patch_out")]
    patch: Option<FroxelIndex>,
    #[arg(long)]
    patch_out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FilterArg {
    Mean,
    Median,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[command(flatten)]
    lf: LfArgs,
    #[arg(long, value_enum)]
    filter: FilterArg,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("target").required(true).args(["viewpoint", "camera"])))]
struct SynthesizeArgs {
    /// Reduced field (.frxl).
    #[arg(long)]
    field: PathBuf,
    /// Target position `x,y` on the array plane in mm.
    #[arg(long, value_parser = parse_pair_f64, allow_hyphen_values = true)]
    viewpoint: Option<(f64, f64)>,
    /// Target at an existing camera `s,t`.
    #[arg(long, value_parser = parse_pair_u32)]
    camera: Option<(u32, u32)>,
    #[arg(long)]
    out: PathBuf,
    /// Hole mask (PGM, 0 = hole).
    #[arg(long)]
    mask: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    /// Reference image (.ppm) or light-field directory.
    #[arg(long = "ref")]
    reference: PathBuf,
    #[arg(long)]
    test: PathBuf,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn split_pair(s: &str) -> std::result::Result<(&str, &str), String> {
    s.split_once(',').ok_or_else(|| format!("expected two comma-separated values, got `{s}`"))
}

fn parse_pair_f64(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = split_pair(s)?;
    let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    Ok((p(a)?, p(b)?))
}

fn parse_pair_u32(s: &str) -> std::result::Result<(u32, u32), String> {
    let (a, b) = split_pair(s)?;
    let p = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("`{t}`: {e}"));
    Ok((p(a)?, p(b)?))
}

fn parse_froxel(s: &str) -> std::result::Result<FroxelIndex, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected u,v,k, got `{s}`"));
    }
    let u = parts[0].parse().map_err(|e| format!("u: {e}"))?;
    let v = parts[1].parse().map_err(|e| format!("v: {e}"))?;
    let k = parts[2].parse().map_err(|e| format!("k: {e}"))?;
    Ok(FroxelIndex { u, v, k })
}

#[derive(Serialize)]
struct OutputEntry {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct RunManifest {
    command_line: Vec<String>,
    library_version: &'static str,
    config_hash: Option<String>,
    seeds: Vec<u64>,
    rng: Option<&'static str>,
    outputs: Vec<OutputEntry>,
}

/// Collected side data of a command, turned into the manifest.
struct Outcome {
    manifest_path: Option<PathBuf>,
    config: Option<CameraArrayConfig>,
    seeds: Vec<u64>,
    rng: bool,
    outputs: Vec<PathBuf>,
}

impl Outcome {
    fn new(manifest_path: Option<PathBuf>) -> Self {
        Outcome { manifest_path, config: None, seeds: vec![], rng: false, outputs: vec![] }
    }

    fn write(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        fs::write(path, bytes)?;
        self.outputs.push(path.to_path_buf());
        Ok(())
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_manifest(argv: &[String], outcome: &Outcome) -> Result<()> {
    let Some(path) = &outcome.manifest_path else {
        return Ok(());
    };
    let outputs = outcome
        .outputs
        .iter()
        .map(|p| {
            Ok(OutputEntry { path: p.display().to_string(), sha256: sha256_hex(&fs::read(p)?) })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = RunManifest {
        command_line: argv.to_vec(),
        library_version: env!("CARGO_PKG_VERSION"),
        config_hash: outcome
            .config
            .as_ref()
            .map(|c| sha256_hex(&serde_json::to_vec(c).expect("config serializes"))),
        seeds: outcome.seeds.clone(),
        rng: outcome.rng.then_some(RNG_ALGORITHM),
        outputs,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn sidecar(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn load_lf(args: &LfArgs) -> Result<LightField> {
    let mut lf = read_lightfield_dir(&args.lf)?;
    if let Some(mode) = args.baseline_mode {
        lf.cfg.baseline_mode = mode.into();
        lf.validate()?;
    }
    Ok(lf)
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn gen_scene(a: &GenSceneArgs) -> Result<Outcome> {
    let cfg = read_config(&read_text(&a.config)?)?;
    let spec: SceneSpec = match &a.scene {
        Some(p) => serde_json::from_str(&read_text(p)?)?,
        None => random_scene(&cfg, a.seed),
    };
    let lf = render(&spec, &cfg)?;
    let mut o = Outcome::new(Some(a.out.join("manifest.json")));
    o.outputs = write_lightfield_dir(&lf, &a.out)?;
    let scene_path = a.out.join("scene.json");
    o.write(&scene_path, (serde_json::to_string_pretty(&spec)? + "\n").as_bytes())?;
    if a.scene.is_none() {
        o.seeds.push(a.seed);
    }
    o.config = Some(cfg);
    Ok(o)
}

fn add_noise_cmd(a: &AddNoiseArgs) -> Result<Outcome> {
    let lf = read_lightfield_dir(&a.lf)?;
    let params = match a.noise {
        NoiseArg::Gaussian => NoiseParams::gaussian(a.mean, a.sigma2, a.seed),
        NoiseArg::Sap => NoiseParams::salt_pepper(a.density, a.seed),
    };
    let noisy = add_noise(&lf, &params)?;
    let mut o = Outcome::new(Some(a.out.join("manifest.json")));
    o.outputs = write_lightfield_dir(&noisy, &a.out)?;
    o.seeds.push(a.seed);
    o.rng = true;
    o.config = Some(lf.cfg);
    Ok(o)
}

fn bin_cmd(a: &LfArgs) -> Result<Outcome> {
    let lf = load_lf(a)?;
    let store = bin_lightfield(&lf)?;
    let mut csv = String::from("u,v,k,n\n");
    for idx in store.sorted_keys() {
        let n = store.get(&idx).map_or(0, <[_]>::len);
        writeln!(csv, "{},{},{},{n}", idx.u, idx.v, idx.k).unwrap();
    }
    let mut o = Outcome::new(Some(sidecar(&a.out)));
    o.write(&a.out, csv.as_bytes())?;
    println!(
        "assigned={} rejected={} nonempty_froxels={}",
        store.assigned,
        store.rejected,
        store.len()
    );
    o.config = Some(lf.cfg);
    Ok(o)
}

fn fristogram_cmd(a: &FristogramArgs) -> Result<Outcome> {
    let lf = load_lf(&a.lf)?;
    let store = bin_lightfield(&lf)?;
    let fg = fristogram(&store, a.include_empty)?;
    let mut o = Outcome::new(Some(sidecar(&a.lf.out)));
    o.write(&a.lf.out, fg.to_csv().as_bytes())?;
    if let Some(p) = &a.cdf {
        o.write(p, cdf_to_csv(&fg.cdf()?).as_bytes())?;
    }
    let factor = fg.reduction_factor().map_or("nan".to_string(), |f| format!("{f:.6}"));
    println!(
        "total_rays={} rejected={} nonempty_froxels={} reduction_factor={factor}",
        fg.total_rays, store.rejected, fg.nonempty_froxels
    );
    o.config = Some(lf.cfg);
    Ok(o)
}

fn analyze_cmd(a: &AnalyzeArgs) -> Result<Outcome> {
    if !(a.tau.is_finite() && a.tau >= 0.0) {
        return Err(Error::Domain(format!("tau must be >= 0, got {}", a.tau)));
    }
    let lf = load_lf(&a.lf)?;
    let store = bin_lightfield(&lf)?;
    let reports = analyze_store(&store, a.tau);
    let mut o = Outcome::new(Some(sidecar(&a.lf.out)));
    o.write(&a.lf.out, reports_to_csv(&reports).as_bytes())?;
    if let (Some(idx), Some(path)) = (a.patch, &a.patch_out) {
        let samples = store
            .get(&idx)
            .ok_or_else(|| Error::Empty(format!("froxel ({}, {}, {}) holds no rays", idx.u, idx.v, idx.k)))?;
        let tile = export_froxel_patch(samples, &lf.cfg, DEFAULT_PATCH_MAGNIFY)?;
        o.write(path, &write_ppm(&tile, false))?;
    }
    let non = reports
        .iter()
        .filter(|r| r.label.label == crate::analysis::Lambertian::NonLambertian)
        .count();
    println!("froxels={} non_lambertian={non} tau={}", reports.len(), a.tau);
    o.config = Some(lf.cfg);
    Ok(o)
}

fn reduce_cmd(a: &ReduceArgs) -> Result<Outcome> {
    let lf = load_lf(&a.lf)?;
    let store = bin_lightfield(&lf)?;
    let stat = match a.filter {
        FilterArg::Mean => FroxelStat::Mean,
        FilterArg::Median => FroxelStat::Median,
    };
    let rf = reduce(&store, stat);
    let mut o = Outcome::new(Some(sidecar(&a.lf.out)));
    o.write(&a.lf.out, &rf.to_bytes())?;
    println!("input_rays={} reduced_rays={}", store.assigned, rf.len());
    o.config = Some(lf.cfg);
    Ok(o)
}

fn synthesize_cmd(a: &SynthesizeArgs) -> Result<Outcome> {
    let rf = ReducedField::from_bytes(&fs::read(&a.field)?)?;
    let req = match (a.viewpoint, a.camera) {
        (Some((x, y)), _) => ViewRequest::at(x, y),
        (None, Some((s, t))) => ViewRequest::at_camera(&rf, CameraId::new(s, t))?,
        (None, None) => unreachable!("clap enforces one target"),
    };
    let view = synthesize(&rf, &req)?;
    let mut o = Outcome::new(Some(sidecar(&a.out)));
    o.write(&a.out, &write_ppm(&view.image, false))?;
    if let Some(mask) = &a.mask {
        o.write(mask, &write_pgm_mask(rf.cfg.width_px, rf.cfg.height_px, &view.holes))?;
    }
    println!("holes={}", view.hole_count());
    o.config = Some(rf.cfg);
    Ok(o)
}

fn metrics_cmd(a: &MetricsArgs) -> Result<Outcome> {
    let mut report = String::new();
    if a.reference.is_dir() && a.test.is_dir() {
        let r = read_lightfield_dir(&a.reference)?;
        let t = read_lightfield_dir(&a.test)?;
        if r.cfg.num_views() != t.cfg.num_views() {
            return Err(Error::DimensionMismatch("light fields differ in view count".into()));
        }
        let per_view: Vec<(CameraId, QualityReport)> = r
            .cfg
            .cameras()
            .map(|cam| {
                let n = cam.linear_index(&r.cfg);
                Ok((cam, quality(&r.images[n], &t.images[n])?))
            })
            .collect::<Result<_>>()?;
        for (cam, q) in &per_view {
            writeln!(report, "view={},{} {q}", cam.s, cam.t).unwrap();
        }
        let n = per_view.len() as f64;
        let mean = QualityReport {
            psnr_db: per_view.iter().map(|(_, q)| q.psnr_db).sum::<f64>() / n,
            ssim: per_view.iter().map(|(_, q)| q.ssim).sum::<f64>() / n,
        };
        writeln!(report, "mean {mean}").unwrap();
    } else {
        let load = |p: &Path| -> Result<ColorRaster> { read_ppm(&fs::read(p)?) };
        let q = quality(&load(&a.reference)?, &load(&a.test)?)?;
        writeln!(report, "{q}").unwrap();
    }
    print!("{report}");
    let mut o = Outcome::new(a.out.as_ref().map(|p| sidecar(p)));
    if let Some(p) = &a.out {
        o.write(p, report.as_bytes())?;
    }
    Ok(o)
}

fn dispatch(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::GenScene(a) => gen_scene(a),
        Command::AddNoise(a) => add_noise_cmd(a),
        Command::Bin(a) => bin_cmd(a),
        Command::Fristogram(a) => fristogram_cmd(a),
        Command::Analyze(a) => analyze_cmd(a),
        Command::Reduce(a) => reduce_cmd(a),
        Command::Synthesize(a) => synthesize_cmd(a),
        Command::Metrics(a) => metrics_cmd(a),
    }
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code: 0 on success, 1 on processing errors, 2 on usage errors.
pub fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return 2;
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return 1;
        }
    };
    let result = pool.install(|| dispatch(&cli.command)).and_then(|o| write_manifest(argv, &o));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

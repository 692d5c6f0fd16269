use std::path::{Path, PathBuf};
use std::time::Instant;

use qslr_core::imaging::{
    add_channel_noise, load_image, load_mask, psnr, psnr_on, sample_mask, save_image, save_mask, ssim,
    ColorImage, ObservationMask, PSNR_CAP,
};
use qslr_core::pipeline::{restore_denoise, restore_inpaint, Representation, Restoration};
use qslr_core::presets::Task;
use qslr_core::solvers::{check_assumption_1, check_assumption_2, CheckOptions, IterationTrace};
use qslr_core::QslrError;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::manifest::{InputRecord, Manifest};
use crate::Failure;

fn cap(p: f64) -> f64 {
    if p.is_nan() {
        p
    } else {
        p.min(PSNR_CAP)
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

/// Bytes for the manifest hash plus the decoded image.
fn read_image(path: &Path) -> Result<(Vec<u8>, ColorImage), Failure> {
    let bytes = read_bytes(path)?;
    Ok((bytes, load_image(path)?))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<(), Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Failure::solver(e.to_string()))?;
    s.push('\n');
    write_text(path, &s)
}

struct Outputs {
    dir: PathBuf,
    written: Vec<String>,
}

impl Outputs {
    fn new(dir: &Path) -> Result<Self, Failure> {
        std::fs::create_dir_all(dir).map_err(|e| Failure::io(format!("{}: {e}", dir.display())))?;
        Ok(Outputs {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.written.push(name.to_string());
        self.dir.join(name)
    }

    fn image(&mut self, name: &str, img: &ColorImage) -> Result<(), Failure> {
        let p = self.path(name);
        Ok(save_image(&p, img)?)
    }

    fn traces(&mut self, rep: Representation, traces: &[IterationTrace]) -> Result<(), Failure> {
        let names: &[&str] = match (rep, traces.len()) {
            (_, 0) => &[],
            (Representation::Rgb, 3) => &["trace_r.csv", "trace_g.csv", "trace_b.csv"],
            _ => &["trace.csv"],
        };
        for (name, t) in names.iter().zip(traces) {
            let p = self.path(name);
            write_text(&p, &t.to_csv())?;
        }
        Ok(())
    }
}

/// On divergence, keep the partial trace before reporting.
fn solver_result(res: qslr_core::Result<Restoration>, out: &mut Outputs) -> Result<Restoration, Failure> {
    match res {
        Ok(r) => Ok(r),
        Err(e) => {
            if let QslrError::Divergence { trace, .. } = &e {
                let p = out.path("trace.csv");
                write_text(&p, &trace.to_csv())?;
            }
            Err(e.into())
        }
    }
}

fn wall_ms(cfg: &ExperimentConfig, t0: Instant) -> f64 {
    if cfg.solver.record_timing {
        t0.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    }
}

fn ssim_or_none(a: &ColorImage, b: &ColorImage) -> Option<f64> {
    ssim(a, b).ok()
}

#[derive(Serialize)]
struct DenoiseMetrics {
    psnr: f64,
    ssim: Option<f64>,
    iters: usize,
    wall_ms: f64,
    input_psnr: f64,
    converged: bool,
    nss_failures: usize,
}

#[derive(Serialize)]
struct InpaintMetrics {
    psnr: f64,
    ssim: Option<f64>,
    iters: usize,
    wall_ms: f64,
    /// PSNR over the missing pixels only
    missing_psnr: Option<f64>,
    zero_fill_psnr: f64,
    observed_fraction: f64,
    converged: bool,
    final_gap1: Option<f64>,
    final_gap2: Option<f64>,
}

fn input_of(cfg: &ExperimentConfig) -> Result<&Path, Failure> {
    cfg.input
        .as_deref()
        .ok_or_else(|| Failure::config("an input image is required (--input or \"input\")"))
}

pub fn denoise(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let input = input_of(cfg)?;
    let (bytes, clean) = read_image(input)?;
    let mut inputs = vec![InputRecord::new("input", input, &bytes)];
    let noisy = match &cfg.noisy {
        Some(p) => {
            let (b, img) = read_image(p)?;
            inputs.push(InputRecord::new("noisy", p, &b));
            img
        }
        None => add_channel_noise(&clean, cfg.noise_tau(), cfg.seed),
    };
    let mut out = Outputs::new(&cfg.out_dir)?;
    out.image("noisy.png", &noisy.clamped())?;

    let t0 = Instant::now();
    let res = solver_result(restore_denoise(&noisy, &cfg.solver, &cfg.pipeline()), &mut out)?;
    let ms = wall_ms(cfg, t0);

    let output = cfg.output_path();
    save_image(&output, &res.image)?;
    out.written.push(output.display().to_string());
    out.traces(cfg.representation, &res.traces)?;
    let metrics = DenoiseMetrics {
        psnr: cap(psnr(&res.image, &clean)?),
        ssim: ssim_or_none(&res.image, &clean),
        iters: res.iters,
        wall_ms: ms,
        input_psnr: cap(psnr(&noisy, &clean)?),
        converged: !res.traces.is_empty() && res.traces.iter().all(|t| t.converged),
        nss_failures: res.nss_failures,
    };
    let p = out.path("metrics.json");
    write_json(&p, &metrics)?;
    finish(cfg, "denoise", inputs, out)
}

pub fn inpaint(cfg: &ExperimentConfig) -> Result<(), Failure> {
    let input = input_of(cfg)?;
    let (bytes, clean) = read_image(input)?;
    let mut inputs = vec![InputRecord::new("input", input, &bytes)];
    let mask = match &cfg.mask {
        Some(p) => {
            let b = read_bytes(p)?;
            inputs.push(InputRecord::new("mask", p, &b));
            load_mask(p)?
        }
        None => sample_mask(clean.dims(), cfg.chi, cfg.seed)?,
    };
    let observed = clean.masked(&mask)?;
    let mut out = Outputs::new(&cfg.out_dir)?;
    out.image("observed.png", &observed)?;
    let p = out.path("mask.png");
    save_mask(&p, &mask)?;

    let t0 = Instant::now();
    let res = solver_result(restore_inpaint(&observed, &mask, &cfg.solver, &cfg.pipeline()), &mut out)?;
    let ms = wall_ms(cfg, t0);

    let output = cfg.output_path();
    save_image(&output, &res.image)?;
    out.written.push(output.display().to_string());
    out.traces(cfg.representation, &res.traces)?;
    let missing: ObservationMask = mask.complement();
    let last = res.traces.first().and_then(|t| t.last());
    let metrics = InpaintMetrics {
        psnr: cap(psnr(&res.image, &clean)?),
        ssim: ssim_or_none(&res.image, &clean),
        iters: res.iters,
        wall_ms: ms,
        missing_psnr: if missing.count() == 0 {
            None
        } else {
            Some(cap(psnr_on(&res.image, &clean, &missing)?))
        },
        zero_fill_psnr: cap(psnr(&observed, &clean)?),
        observed_fraction: mask.observed_fraction(),
        converged: !res.traces.is_empty() && res.traces.iter().all(|t| t.converged),
        final_gap1: last.map(|r| r.gap1),
        final_gap2: last.map(|r| r.gap2),
    };
    let p = out.path("metrics.json");
    write_json(&p, &metrics)?;
    finish(cfg, "inpaint", inputs, out)
}

fn finish(cfg: &ExperimentConfig, command: &'static str, inputs: Vec<InputRecord>, mut out: Outputs) -> Result<(), Failure> {
    let p = out.dir.join("manifest.json");
    out.written.push("manifest.json".into());
    let m = Manifest {
        tool: "qslr",
        version: env!("CARGO_PKG_VERSION"),
        command,
        config: cfg,
        inputs,
        outputs: out.written.clone(),
    };
    write_json(&p, &m)?;
    println!("wrote {} files to {}", out.written.len(), out.dir.display());
    Ok(())
}

pub fn check(cfg: &ExperimentConfig, task: Task, opts: &CheckOptions) -> bool {
    let report = match task {
        Task::Denoise => check_assumption_1(&cfg.solver, opts),
        Task::Inpaint => check_assumption_2(&cfg.solver, opts),
    };
    print!("{}", report.render());
    report.pass
}

pub fn plotdata(trace: &Path, output: Option<&Path>) -> Result<(), Failure> {
    let text = std::fs::read_to_string(trace).map_err(|e| Failure::io(format!("{}: {e}", trace.display())))?;
    let t = IterationTrace::from_csv(&text)?;
    let mut s = String::from("k,increment\n");
    for (k, v) in t.plot_rows() {
        s.push_str(&format!("{k},{v:e}\n"));
    }
    match output {
        Some(p) => write_text(p, &s),
        None => {
            print!("{s}");
            Ok(())
        }
    }
}

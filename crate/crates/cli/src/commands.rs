use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use foresight_core::detector::{run_detector_decisions, write_alarm_log};
use foresight_core::evalkit::{
    evaluate, label_windows, write_labels, write_pr_csv, write_reaction_sweep_csv, write_roc_csv, EvalOptions,
};
use foresight_core::gammafit::{estimate_threshold, fit_gamma_mle, read_calibration, write_calibration};
use foresight_core::reconstruct::io::{
    read_error_series, read_frames, read_model, write_error_series, write_frames, write_model,
};
use foresight_core::reconstruct::train_on_streams;
use foresight_core::scenario::{generate_scenario, read_misbehaviour_csv, write_intensity_csv, write_misbehaviour_csv};
use foresight_core::smoothing::ar_filter;
use foresight_core::{Calibration, ErrorSeries, FrameStream, ReconstructorModel};

use crate::config::PipelineConfig;
use crate::error::{CliError, CliResult};

const DEFAULT_FRAME_RATE_HZ: f64 = 10.0;

/// Resolves artifact paths inside the work directory.
struct Work<'a> {
    cfg: &'a PipelineConfig,
}

impl<'a> Work<'a> {
    fn new(cfg: &'a PipelineConfig) -> CliResult<Self> {
        let dir = &cfg.paths.work_dir;
        if !dir.is_dir() {
            return Err(CliError::Usage(format!("output directory {} does not exist", dir.display())));
        }
        Ok(Self { cfg })
    }

    fn file(&self, name: &str) -> PathBuf {
        self.cfg.paths.work_dir.join(name)
    }

    fn stream_file(&self, stream: &str, suffix: &str) -> PathBuf {
        self.file(&format!("{stream}.{suffix}"))
    }

    fn frame_rate(&self, stream: &str) -> f64 {
        self.cfg.simulate.scenarios.get(stream).map_or(DEFAULT_FRAME_RATE_HZ, |s| s.frame_rate_hz)
    }

    fn series_suffix(&self) -> &'static str {
        if self.cfg.smoothing.use_raw {
            "errors.csv"
        } else {
            "smoothed.csv"
        }
    }

    fn load_frames(&self, stream: &str) -> CliResult<FrameStream> {
        let path = self.stream_file(stream, "frm");
        read_frames(open(&path)?, self.frame_rate(stream)).map_err(|e| CliError::at(&path, e))
    }

    fn load_model(&self) -> CliResult<ReconstructorModel> {
        let path = self.file(&self.cfg.paths.model);
        read_model(open(&path)?).map_err(|e| CliError::at(&path, e))
    }

    fn load_calibration(&self) -> CliResult<Calibration> {
        let path = self.file(&self.cfg.paths.calibration);
        read_calibration(open(&path)?).map_err(|e| CliError::at(&path, e))
    }

    /// Raw and smoothed error series of one stream under `model`.
    fn errors(&self, model: &ReconstructorModel, stream: &str) -> CliResult<(ErrorSeries, ErrorSeries)> {
        let frames = self.load_frames(stream)?;
        let raw = model.error_series(&frames).map_err(|e| CliError::during(format!("stream {stream}"), e))?;
        let smoothed =
            ar_filter(&raw, &self.cfg.smoothing.ar).map_err(|e| CliError::during(format!("stream {stream}"), e))?;
        Ok((raw, smoothed))
    }
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::at(path, e.into()))
}

/// Creates `path`, runs `write`, and flushes.
fn write_file(path: &Path, write: impl FnOnce(&mut BufWriter<File>) -> foresight_core::Result<()>) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::at(path, e.into()))?;
    let mut w = BufWriter::new(file);
    write(&mut w).map_err(|e| CliError::at(path, e))?;
    w.flush().map_err(|e| CliError::at(path, e.into()))
}

fn require(streams: &[String], section: &str) -> CliResult<()> {
    if streams.is_empty() {
        return Err(CliError::Usage(format!("{section}.streams is empty")));
    }
    Ok(())
}

pub fn simulate(cfg: &PipelineConfig) -> CliResult<()> {
    let work = Work::new(cfg)?;
    if cfg.simulate.scenarios.is_empty() {
        return Err(CliError::Usage("simulate.scenarios is empty".into()));
    }
    for (name, spec) in &cfg.simulate.scenarios {
        let mut spec = spec.clone();
        spec.track_seed = spec.track_seed.wrapping_add(cfg.seed);
        let sc = generate_scenario::<f64>(&spec).map_err(|e| CliError::during(format!("scenario {name}"), e))?;
        write_file(&work.stream_file(name, "frm"), |w| write_frames(w, &sc.stream))?;
        write_file(&work.stream_file(name, "misbehaviour.csv"), |w| write_misbehaviour_csv(&sc.log, w))?;
        write_file(&work.stream_file(name, "intensity.csv"), |w| write_intensity_csv(&sc.intensity, w))?;
        println!("simulate: {name}: {} frames, {} misbehaviours", sc.stream.len(), sc.log.count());
    }
    Ok(())
}

pub fn train(cfg: &PipelineConfig) -> CliResult<()> {
    let work = Work::new(cfg)?;
    require(&cfg.train.streams, "train")?;
    let streams = cfg.train.streams.iter().map(|s| work.load_frames(s)).collect::<CliResult<Vec<_>>>()?;
    let hyper = cfg.train.hyper(cfg.seed);
    let outcome =
        train_on_streams(&streams, cfg.train.kind, &hyper, false).map_err(|e| CliError::during("training", e))?;
    write_file(&work.file(&cfg.paths.model), |w| write_model(w, &outcome.model))?;
    println!(
        "train: {:?} {:?}, mean error {:.6e} -> {:.6e}",
        cfg.train.kind,
        outcome.model.layer_sizes(),
        outcome.initial_error,
        outcome.final_error
    );
    Ok(())
}

pub fn fit(cfg: &PipelineConfig) -> CliResult<()> {
    let work = Work::new(cfg)?;
    require(&cfg.fit.streams, "fit")?;
    let model = work.load_model()?;
    let mut samples = Vec::new();
    for stream in &cfg.fit.streams {
        let (raw, smoothed) = work.errors(&model, stream)?;
        samples.extend_from_slice(if cfg.smoothing.use_raw { raw.values() } else { smoothed.values() });
    }
    let params = fit_gamma_mle(&samples).map_err(|e| CliError::during("gamma fit", e))?;
    let threshold = estimate_threshold(&params, cfg.fit.epsilon).map_err(|e| CliError::during("threshold", e))?;
    let cal = Calibration { params, threshold, samples: samples.len() };
    write_file(&work.file(&cfg.paths.calibration), |w| write_calibration(w, &cal))?;
    println!(
        "fit: alpha={:.6} rate={:.6} epsilon={} theta={:.6e} ({} samples)",
        params.shape(),
        params.rate(),
        threshold.epsilon,
        threshold.theta,
        samples.len()
    );
    Ok(())
}

pub fn detect(cfg: &PipelineConfig) -> CliResult<()> {
    let work = Work::new(cfg)?;
    require(&cfg.detect.streams, "detect")?;
    let model = work.load_model()?;
    let theta = work.load_calibration()?.threshold.theta;
    let h = cfg.healing_h();
    for stream in &cfg.detect.streams {
        let (raw, smoothed) = work.errors(&model, stream)?;
        write_file(&work.stream_file(stream, "errors.csv"), |w| write_error_series(w, &raw))?;
        write_file(&work.stream_file(stream, "smoothed.csv"), |w| write_error_series(w, &smoothed))?;
        let input = if cfg.smoothing.use_raw { &raw } else { &smoothed };
        let (state, decisions) = run_detector_decisions(input, theta, h);
        write_file(&work.stream_file(stream, "alarms.csv"), |w| write_alarm_log(w, input.start_index(), &decisions))?;
        println!("detect: {stream}: {} alarms", state.alarms.len());
    }
    Ok(())
}

pub fn label(cfg: &PipelineConfig) -> CliResult<()> {
    let work = Work::new(cfg)?;
    require(&cfg.eval.streams, "eval")?;
    for stream in &cfg.eval.streams {
        let path = work.stream_file(stream, "misbehaviour.csv");
        let log = read_misbehaviour_csv(open(&path)?).map_err(|e| CliError::at(&path, e))?;
        let labels = label_windows(log.flags(), &cfg.label).map_err(|e| CliError::during("labelling", e))?;
        write_file(&work.stream_file(stream, "labels.csv"), |w| write_labels(w, &labels))?;
        println!("label: {stream}: {} windows", labels.len());
    }
    Ok(())
}

pub fn eval(cfg: &PipelineConfig) -> CliResult<()> {
    let work = Work::new(cfg)?;
    require(&cfg.eval.streams, "eval")?;
    let theta = work.load_calibration()?.threshold.theta;
    let mut logs = Vec::with_capacity(cfg.eval.streams.len());
    let mut series = Vec::with_capacity(cfg.eval.streams.len());
    for stream in &cfg.eval.streams {
        let path = work.stream_file(stream, "misbehaviour.csv");
        logs.push(read_misbehaviour_csv(open(&path)?).map_err(|e| CliError::at(&path, e))?);
        let path = work.stream_file(stream, work.series_suffix());
        series.push(read_error_series::<f64, _>(open(&path)?).map_err(|e| CliError::at(&path, e))?);
    }
    let inputs: Vec<(&[bool], &ErrorSeries)> = logs.iter().map(|l| l.flags()).zip(series.iter()).collect();
    let opts = EvalOptions {
        labelling: cfg.label,
        thresholds: cfg.eval.thresholds.clone(),
        n_thresholds: cfg.eval.n_thresholds,
        alarm_source: cfg.eval.alarm_source,
        reaction_sweep: cfg.eval.reaction_sweep.clone(),
    };
    let report = evaluate(&inputs, theta, &opts).map_err(|e| CliError::during("evaluation", e))?;

    write_file(&work.file(&cfg.paths.report), |w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        writeln!(w)?;
        Ok(())
    })?;
    write_file(&work.file(&cfg.paths.roc), |w| write_roc_csv(w, &report.roc_points))?;
    write_file(&work.file(&cfg.paths.pr), |w| write_pr_csv(w, &report.pr_points))?;
    write_file(&work.file(&cfg.paths.reaction_sweep), |w| write_reaction_sweep_csv(w, &report.reaction_sweep))?;

    let show = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.3}"));
    println!(
        "eval: {} anomalous / {} normal windows; TPR {} FPR {} F1 {}; AUC-ROC {} AUC-PR {}; frame exceedance {}",
        report.anomalous_windows,
        report.normal_windows,
        show(report.metrics.tpr),
        show(report.metrics.fpr),
        show(report.metrics.f1),
        show(report.auc_roc),
        show(report.auc_pr),
        show(report.frame_exceedance_rate),
    );
    Ok(())
}

pub fn pipeline(cfg: &PipelineConfig) -> CliResult<()> {
    simulate(cfg)?;
    train(cfg)?;
    fit(cfg)?;
    detect(cfg)?;
    eval(cfg)
}

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::labels::{WindowKind, WindowLabel};
use super::metrics::Metrics;
use super::score::{score_windows, Counts};
use crate::detector::{exceedances, run_detector_decisions};
use crate::error::{Error, Result};
use crate::reconstruct::ErrorSeries;
use crate::scalar::Scalar;

/// Which frames count as alarms when scoring a threshold.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlarmSource {
    /// Every frame at or above the threshold.
    #[default]
    Exceedance,
    /// Only `Alarm` decisions of the cooldown detector.
    Detector,
}

/// One evaluated stream: its windows and the series the detector thresholds.
#[derive(Debug, Clone, Copy)]
pub struct Episode<'a, T> {
    pub labels: &'a [WindowLabel],
    pub series: &'a ErrorSeries<T>,
}

/// Counts summed over all episodes at one threshold.
pub fn score_episodes<T: Scalar>(
    episodes: &[Episode<'_, T>],
    theta: T,
    h: usize,
    source: AlarmSource,
) -> Result<Counts> {
    let mut total = Counts::default();
    for ep in episodes {
        let alarms = match source {
            AlarmSource::Exceedance => exceedances(ep.series, theta),
            AlarmSource::Detector => run_detector_decisions(ep.series, theta, h).0.alarms,
        };
        total += score_windows(ep.labels, &alarms, h)?;
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub threshold: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curves {
    /// `(fpr, tpr)`, ordered by increasing fpr.
    pub roc_points: Vec<CurvePoint>,
    /// `(recall, precision)`, ordered by increasing recall.
    pub pr_points: Vec<CurvePoint>,
    pub auc_roc: Option<f64>,
    pub auc_pr: Option<f64>,
    /// Counts at each threshold, in input order.
    pub counts: Vec<(f64, Counts)>,
}

fn trapezoid(points: &[(f64, f64)]) -> f64 {
    points.windows(2).map(|p| (p[1].0 - p[0].0) * (p[1].1 + p[0].1) / 2.0).sum()
}

/// Sweeps `thetas`, scoring every episode at each one.
///
/// ROC is anchored at `(0,0)` and `(1,1)`; PR at recall 0 with the precision
/// of the lowest-recall point and at recall 1 with the positive prevalence.
/// Areas use the trapezoid rule. AUCs are `None` when there are no anomalous
/// or no normal windows.
pub fn sweep_curves<T: Scalar>(
    episodes: &[Episode<'_, T>],
    thetas: &[T],
    h: usize,
    source: AlarmSource,
) -> Result<Curves> {
    if thetas.is_empty() {
        return Err(Error::InvalidConfig("threshold sweep needs at least one threshold".into()));
    }
    let counts = thetas
        .par_iter()
        .map(|&t| score_episodes(episodes, t, h, source).map(|c| (t.as_f64(), c)))
        .collect::<Result<Vec<_>>>()?;

    let (positives, negatives) =
        episodes.iter().flat_map(|e| e.labels.iter()).fold((0u64, 0u64), |(p, n), w| match w.kind {
            WindowKind::Anomalous => (p + 1, n),
            WindowKind::Normal => (p, n + 1),
            _ => (p, n),
        });

    let mut roc_points = Vec::new();
    let mut pr_points = Vec::new();
    for &(threshold, c) in &counts {
        let m = Metrics::from(&c);
        if let (Some(fpr), Some(tpr)) = (m.fpr, m.tpr) {
            roc_points.push(CurvePoint { threshold, x: fpr, y: tpr });
        }
        if let (Some(recall), Some(precision)) = (m.tpr, m.precision) {
            pr_points.push(CurvePoint { threshold, x: recall, y: precision });
        }
    }
    let by_x_then_threshold =
        |a: &CurvePoint, b: &CurvePoint| a.x.total_cmp(&b.x).then(b.threshold.total_cmp(&a.threshold));
    roc_points.sort_by(by_x_then_threshold);
    pr_points.sort_by(by_x_then_threshold);

    let (auc_roc, auc_pr) = if positives == 0 || negatives == 0 {
        (None, None)
    } else {
        let mut roc = vec![(0.0, 0.0)];
        roc.extend(roc_points.iter().map(|p| (p.x, p.y)));
        roc.push((1.0, 1.0));

        let prevalence = positives as f64 / (positives + negatives) as f64;
        let start = pr_points.first().map_or(prevalence, |p| p.y);
        let mut pr = vec![(0.0, start)];
        pr.extend(pr_points.iter().map(|p| (p.x, p.y)));
        pr.push((1.0, prevalence));
        (Some(trapezoid(&roc)), Some(trapezoid(&pr)))
    };

    Ok(Curves { roc_points, pr_points, auc_roc, auc_pr, counts })
}

/// Evenly spaced quantiles of the pooled series values (duplicates removed).
pub fn quantile_thresholds<T: Scalar>(episodes: &[Episode<'_, T>], count: usize) -> Vec<T> {
    let mut pooled: Vec<T> =
        episodes.iter().flat_map(|e| e.series.values().iter().copied()).filter(|v| *v > T::zero()).collect();
    if pooled.is_empty() || count == 0 {
        return Vec::new();
    }
    pooled.sort_by(|a, b| a.partial_cmp(b).expect("finite errors"));
    let last = pooled.len() - 1;
    let mut out: Vec<T> = (0..count)
        .map(|i| {
            let q = if count == 1 { 0.5 } else { i as f64 / (count - 1) as f64 };
            pooled[(q * last as f64).round() as usize]
        })
        .collect();
    out.dedup();
    out
}

pub fn write_roc_csv<W: Write>(w: W, points: &[CurvePoint]) -> Result<()> {
    write_curve(w, ["threshold", "fpr", "tpr"], points)
}

pub fn write_pr_csv<W: Write>(w: W, points: &[CurvePoint]) -> Result<()> {
    write_curve(w, ["threshold", "recall", "precision"], points)
}

fn write_curve<W: Write>(w: W, header: [&str; 3], points: &[CurvePoint]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for p in points {
        out.write_record([p.threshold.to_string(), p.x.to_string(), p.y.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evalkit::labels::{label_windows, LabellingConfig};
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w(start: usize, length: usize, kind: WindowKind) -> WindowLabel {
        WindowLabel { start, length, kind }
    }

    /// Alternating normal/anomalous windows with a per-window error level.
    fn layout(levels: &[(WindowKind, f64)]) -> (Vec<WindowLabel>, ErrorSeries<f64>) {
        let mut labels = Vec::new();
        let mut values = Vec::new();
        for (i, &(kind, level)) in levels.iter().enumerate() {
            labels.push(w(i * 30, 30, kind));
            values.extend(std::iter::repeat_n(level, 30));
        }
        (labels, ErrorSeries::new(values, 0).unwrap())
    }

    #[test]
    fn separable_scores_give_unit_auc() {
        let levels: Vec<_> = (0..40)
            .map(|i| {
                if i % 4 == 3 {
                    (WindowKind::Anomalous, 0.5 + i as f64 * 0.01)
                } else {
                    (WindowKind::Normal, 0.1 + i as f64 * 0.001)
                }
            })
            .collect();
        let (labels, series) = layout(&levels);
        let ep = [Episode { labels: &labels, series: &series }];
        let thetas = quantile_thresholds(&ep, 200);
        let c = sweep_curves(&ep, &thetas, 1, AlarmSource::Exceedance).unwrap();
        assert!((c.auc_roc.unwrap() - 1.0).abs() < 1e-9, "{:?}", c.auc_roc);
        assert!((c.auc_pr.unwrap() - 1.0).abs() < 1e-9, "{:?} {:?}", c.auc_pr, c.pr_points);
    }

    #[test]
    fn label_independent_scores_give_chance_auc() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut kinds: Vec<WindowKind> =
            (0..4000).map(|i| if i % 3 == 0 { WindowKind::Anomalous } else { WindowKind::Normal }).collect();
        kinds.shuffle(&mut rng);
        let levels: Vec<_> = kinds.into_iter().map(|k| (k, rng.random_range(0.01..1.0))).collect();
        let (labels, series) = layout(&levels);
        let ep = [Episode { labels: &labels, series: &series }];
        let thetas = quantile_thresholds(&ep, 100);
        let c = sweep_curves(&ep, &thetas, 1, AlarmSource::Exceedance).unwrap();
        let auc = c.auc_roc.unwrap();
        assert!((0.45..=0.55).contains(&auc), "{auc}");
    }

    #[test]
    fn single_threshold_is_anchored() {
        let (labels, series) =
            layout(&[(WindowKind::Normal, 0.2), (WindowKind::Anomalous, 0.6), (WindowKind::Normal, 0.7)]);
        let ep = [Episode { labels: &labels, series: &series }];
        let c = sweep_curves(&ep, &[0.5], 1, AlarmSource::Exceedance).unwrap();
        assert_eq!(c.roc_points.len(), 1);
        let (roc, pr) = (c.auc_roc.unwrap(), c.auc_pr.unwrap());
        assert!((0.0..=1.0).contains(&roc) && (0.0..=1.0).contains(&pr));
        // (0,0) -> (0.5,1) -> (1,1)
        assert!((roc - 0.75).abs() < 1e-12);
        assert!(sweep_curves(&ep, &[] as &[f64], 1, AlarmSource::Exceedance).is_err());
    }

    #[test]
    fn no_anomalous_windows_means_no_auc() {
        let labels = label_windows(&[false; 300], &LabellingConfig::default()).unwrap();
        let series = ErrorSeries::new(vec![0.1; 300], 0).unwrap();
        let ep = [Episode { labels: &labels, series: &series }];
        let c = sweep_curves(&ep, &[0.05, 0.2], 60, AlarmSource::Detector).unwrap();
        assert!(c.auc_roc.is_none() && c.auc_pr.is_none());
        assert!(c.roc_points.is_empty());
    }
}

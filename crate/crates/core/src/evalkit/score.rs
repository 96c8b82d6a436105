use serde::{Deserialize, Serialize};

use super::labels::{WindowKind, WindowLabel};
use crate::error::{Error, Result};

/// Window-level confusion counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    /// Normal windows with an alarm that were dropped by the consecutive
    /// false-positive rule.
    pub excluded: u64,
}

impl std::ops::AddAssign for Counts {
    fn add_assign(&mut self, o: Self) {
        self.tp += o.tp;
        self.fp += o.fp;
        self.tn += o.tn;
        self.fn_ += o.fn_;
        self.excluded += o.excluded;
    }
}

/// Scores alarms against labelled windows.
///
/// An anomalous window with at least one alarm is a TP, otherwise a FN. A
/// normal window without alarms is a TN. A normal window with alarms is a FP
/// unless its first alarm lies within `h` frames of the first alarm of the
/// previously counted FP window, in which case it is excluded. Other window
/// kinds never contribute.
pub fn score_windows(labels: &[WindowLabel], alarms: &[usize], h: usize) -> Result<Counts> {
    if let Some(i) = alarms.windows(2).position(|p| p[1] < p[0]) {
        return Err(Error::InvalidConfig(format!("alarms must be sorted ascending (index {})", i + 1)));
    }
    let first_alarm_in = |w: &WindowLabel| {
        let i = alarms.partition_point(|&a| a < w.start);
        alarms.get(i).copied().filter(|&a| a < w.end())
    };

    let mut ordered: Vec<&WindowLabel> = labels.iter().collect();
    ordered.sort_by_key(|w| w.start);

    let mut c = Counts::default();
    let mut last_fp: Option<usize> = None;
    for w in ordered {
        match (w.kind, first_alarm_in(w)) {
            (WindowKind::Anomalous, Some(_)) => c.tp += 1,
            (WindowKind::Anomalous, None) => c.fn_ += 1,
            (WindowKind::Normal, None) => c.tn += 1,
            (WindowKind::Normal, Some(first)) => {
                if last_fp.is_some_and(|prev| first - prev <= h) {
                    c.excluded += 1;
                } else {
                    c.fp += 1;
                    last_fp = Some(first);
                }
            }
            _ => {}
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evalkit::labels::{label_windows, LabellingConfig};

    fn w(start: usize, length: usize, kind: WindowKind) -> WindowLabel {
        WindowLabel { start, length, kind }
    }

    #[test]
    fn alarm_inside_anomalous_window() {
        let labels = [w(120, 30, WindowKind::Anomalous)];
        assert_eq!(score_windows(&labels, &[130], 60).unwrap(), Counts { tp: 1, ..Default::default() });
        assert_eq!(score_windows(&labels, &[], 60).unwrap(), Counts { fn_: 1, ..Default::default() });
    }

    #[test]
    fn reaction_and_healing_alarms_are_ignored() {
        let mut m = vec![false; 400];
        m[200] = true;
        let labels = label_windows(&m, &LabellingConfig::default()).unwrap();
        let quiet = score_windows(&labels, &[], 60).unwrap();
        let noisy = score_windows(&labels, &[150, 170, 199, 200, 201, 230, 260, 350, 399], 60).unwrap();
        assert_eq!(quiet, noisy);
    }

    #[test]
    fn consecutive_false_positives_count_once() {
        let labels = [w(0, 30, WindowKind::Normal), w(30, 30, WindowKind::Normal), w(60, 30, WindowKind::Normal)];
        let c = score_windows(&labels, &[0, 30, 60], 60).unwrap();
        assert_eq!((c.fp, c.tn, c.excluded), (1, 0, 2));
        let c = score_windows(&labels, &[0, 61], 60).unwrap();
        assert_eq!((c.fp, c.tn, c.excluded), (2, 1, 0));
    }

    #[test]
    fn unsorted_alarms_rejected() {
        assert!(score_windows(&[], &[5, 3], 60).is_err());
    }
}

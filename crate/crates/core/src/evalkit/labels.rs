use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LabellingConfig {
    /// Anomalous window length `a`.
    pub window_a: usize,
    /// Normal window length `b`.
    pub window_b: usize,
    /// Reaction period `r`.
    pub reaction_r: usize,
    /// Healing period `h`.
    pub healing_h: usize,
}

impl Default for LabellingConfig {
    fn default() -> Self {
        Self { window_a: 30, window_b: 30, reaction_r: 50, healing_h: 60 }
    }
}

impl LabellingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_a == 0 || self.window_b == 0 || self.reaction_r == 0 || self.healing_h == 0 {
            return Err(Error::InvalidConfig(format!("all labelling lengths must be >= 1: {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowKind {
    Anomalous,
    Normal,
    Reaction,
    Healing,
    Unlabelled,
}

impl WindowKind {
    pub fn as_str(self) -> &'static str {
        match self {
            WindowKind::Anomalous => "anomalous",
            WindowKind::Normal => "normal",
            WindowKind::Reaction => "reaction",
            WindowKind::Healing => "healing",
            WindowKind::Unlabelled => "unlabelled",
        }
    }
}

impl std::str::FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "anomalous" => WindowKind::Anomalous,
            "normal" => WindowKind::Normal,
            "reaction" => WindowKind::Reaction,
            "healing" => WindowKind::Healing,
            "unlabelled" => WindowKind::Unlabelled,
            other => return Err(Error::InvalidConfig(format!("unknown window kind {other:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowLabel {
    pub start: usize,
    pub length: usize,
    pub kind: WindowKind,
}

impl WindowLabel {
    /// One past the last frame.
    pub fn end(&self) -> usize {
        self.start + self.length
    }

    pub fn contains(&self, frame: usize) -> bool {
        frame >= self.start && frame < self.end()
    }
}

/// Frame-level occupancy used while windows are being placed.
struct Occupancy<'a> {
    misbehaviour: &'a [bool],
    kind: Vec<Option<WindowKind>>,
}

impl<'a> Occupancy<'a> {
    fn new(misbehaviour: &'a [bool]) -> Self {
        Self { misbehaviour, kind: vec![None; misbehaviour.len()] }
    }

    /// `[start, start + len)` is inside the stream, misbehaviour-free and not
    /// yet claimed by any window.
    fn is_free(&self, start: usize, len: usize) -> bool {
        start + len <= self.misbehaviour.len()
            && (start..start + len).all(|j| !self.misbehaviour[j] && self.kind[j].is_none())
    }

    fn claim(&mut self, start: usize, len: usize, kind: WindowKind, out: &mut Vec<WindowLabel>) {
        self.kind[start..start + len].fill(Some(kind));
        out.push(WindowLabel { start, length: len, kind });
    }
}

/// Labels frame windows around recorded misbehaviours.
///
/// Precedence is healing, then reaction, then anomalous, then normal; a
/// lower-precedence window that would touch an already claimed or
/// misbehaviour frame is dropped, never truncated. Normal windows tile
/// backwards from each anomalous window and, after the last misbehaviour,
/// forwards with starts up to `n − r − a − 1`. Remaining frames are returned
/// as maximal `Unlabelled` runs, so the output partitions `[0, n)`.
pub fn label_windows(misbehaviour: &[bool], cfg: &LabellingConfig) -> Result<Vec<WindowLabel>> {
    cfg.validate()?;
    let n = misbehaviour.len();
    let LabellingConfig { window_a: a, window_b: b, reaction_r: r, healing_h: h } = *cfg;
    let events: Vec<usize> = misbehaviour.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i).collect();
    let mut occ = Occupancy::new(misbehaviour);
    let mut labels = Vec::new();

    // healing: up to h frames after each event, cut short by the next event
    for (i, &t) in events.iter().enumerate() {
        let limit = events.get(i + 1).copied().unwrap_or(n);
        let end = (t + 1 + h).min(limit);
        if end > t + 1 {
            occ.claim(t + 1, end - t - 1, WindowKind::Healing, &mut labels);
        }
    }

    let mut reactions = Vec::new();
    for &t in &events {
        if t >= r && occ.is_free(t - r, r) {
            occ.claim(t - r, r, WindowKind::Reaction, &mut labels);
            reactions.push(t - r);
        }
    }

    let mut anomalies = Vec::new();
    for &s in &reactions {
        if s >= a && occ.is_free(s - a, a) {
            occ.claim(s - a, a, WindowKind::Anomalous, &mut labels);
            anomalies.push(s - a);
        }
    }

    for &s in &anomalies {
        let mut next = s;
        while next >= b && occ.is_free(next - b, b) {
            occ.claim(next - b, b, WindowKind::Normal, &mut labels);
            next -= b;
        }
    }

    // trailing normal windows after the last event
    let first = events.last().map_or(0, |&t| t + 1);
    if let Some(max_start) = n.checked_sub(r + a + 1) {
        let mut start = first;
        while start <= max_start {
            if occ.is_free(start, b) {
                occ.claim(start, b, WindowKind::Normal, &mut labels);
            }
            start += b;
        }
    }

    let mut j = 0;
    while j < n {
        if occ.kind[j].is_none() {
            let start = j;
            while j < n && occ.kind[j].is_none() {
                j += 1;
            }
            labels.push(WindowLabel { start, length: j - start, kind: WindowKind::Unlabelled });
        } else {
            j += 1;
        }
    }

    labels.sort_by_key(|w| w.start);
    Ok(labels)
}

/// `start,length,kind` CSV.
pub fn write_labels<W: Write>(w: W, labels: &[WindowLabel]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["start", "length", "kind"])?;
    for l in labels {
        out.write_record([l.start.to_string().as_str(), l.length.to_string().as_str(), l.kind.as_str()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_labels<R: Read>(r: R) -> Result<Vec<WindowLabel>> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(r);
    if rdr.headers()?.iter().collect::<Vec<_>>() != ["start", "length", "kind"] {
        return Err(Error::Format { offset: 0, message: "expected header `start,length,kind`".into() });
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let offset = rec.position().map(|p| p.byte()).unwrap_or(0);
        let bad = || Error::Format { offset, message: "malformed label row".into() };
        let start = rec.get(0).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let length = rec.get(1).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        let kind = rec.get(2).and_then(|v| v.parse().ok()).ok_or_else(bad)?;
        out.push(WindowLabel { start, length, kind });
    }
    Ok(out)
}

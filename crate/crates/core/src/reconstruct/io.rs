//! File formats: `FRM1` frame streams, model JSON and error-series CSV.

use std::io::{BufReader, Read, Write};

use serde::{Deserialize, Serialize};

use super::frame::{ErrorSeries, FrameStream, FrameTensor};
use super::model::{Activation, DenseLayer, ReconstructorKind, ReconstructorModel};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const FRAME_MAGIC: &[u8; 4] = b"FRM1";
const HEADER_LEN: u64 = 20;

/// Writes `FRM1`: magic, little-endian `u32` count/width/height/channels,
/// then every pixel as little-endian `f32`, frame-major.
pub fn write_frames<T: Scalar, W: Write>(mut w: W, stream: &FrameStream<T>) -> Result<()> {
    let (width, height, channels) = stream.dims().unwrap_or((0, 0, 0));
    w.write_all(FRAME_MAGIC)?;
    for v in [stream.len(), width, height, channels] {
        let v = u32::try_from(v).map_err(|_| Error::InvalidConfig(format!("{v} does not fit in u32")))?;
        w.write_all(&v.to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(width * height * channels * 4);
    for frame in stream.frames() {
        buf.clear();
        for &p in frame.pixels() {
            buf.extend_from_slice(&(p.as_f64() as f32).to_le_bytes());
        }
        w.write_all(&buf)?;
    }
    w.flush()?;
    Ok(())
}

fn read_exact_at<R: Read>(r: &mut R, buf: &mut [u8], offset: u64, what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::format(offset, format!("unexpected end of file reading {what}")),
        _ => Error::Io(e),
    })
}

/// Reads an `FRM1` stream. Every format violation reports the byte offset at
/// which it was detected.
pub fn read_frames<T: Scalar, R: Read>(r: R, frame_rate_hz: f64) -> Result<FrameStream<T>> {
    let mut r = BufReader::new(r);
    let mut magic = [0u8; 4];
    read_exact_at(&mut r, &mut magic, 0, "magic")?;
    if &magic != FRAME_MAGIC {
        return Err(Error::format(0, format!("bad magic {:?}, expected \"FRM1\"", String::from_utf8_lossy(&magic))));
    }
    let mut header = [0u32; 4];
    for (i, slot) in header.iter_mut().enumerate() {
        let mut b = [0u8; 4];
        read_exact_at(&mut r, &mut b, 4 + 4 * i as u64, "header")?;
        *slot = u32::from_le_bytes(b);
    }
    let [count, width, height, channels] = header.map(|v| v as usize);
    if count > 0 && (width == 0 || height == 0 || channels == 0) {
        return Err(Error::format(8, format!("zero frame dimension {width}x{height}x{channels}")));
    }
    let frame_len = width * height * channels;
    let mut bytes = vec![0u8; frame_len * 4];
    let mut frames = Vec::with_capacity(count);
    let mut offset = HEADER_LEN;
    for f in 0..count {
        read_exact_at(&mut r, &mut bytes, offset, &format!("frame {f}"))?;
        let mut pixels = Vec::with_capacity(frame_len);
        for (i, chunk) in bytes.chunks_exact(4).enumerate() {
            let v = f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::format(offset + 4 * i as u64, format!("pixel value {v} outside [0, 1]")));
            }
            pixels.push(T::lit(f64::from(v)));
        }
        frames.push(FrameTensor::new(width, height, channels, pixels)?);
        offset += bytes.len() as u64;
    }
    let mut extra = [0u8; 1];
    if r.read(&mut extra)? != 0 {
        return Err(Error::format(offset, "trailing bytes after last frame"));
    }
    FrameStream::new(frames, frame_rate_hz)
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    kind: ReconstructorKind,
    layer_sizes: Vec<usize>,
    history_k: usize,
    activation: Activation,
    weights: Vec<Vec<Vec<f64>>>,
    biases: Vec<Vec<f64>>,
}

/// Model JSON; weight matrices as row-major nested arrays.
pub fn write_model<T: Scalar, W: Write>(mut w: W, model: &ReconstructorModel<T>) -> Result<()> {
    let doc = ModelDoc {
        kind: model.kind(),
        layer_sizes: model.layer_sizes(),
        history_k: model.history_k(),
        activation: model.activation(),
        weights: model
            .layers()
            .iter()
            .map(|l| l.weights().chunks(l.inputs()).map(|row| row.iter().map(|v| v.as_f64()).collect()).collect())
            .collect(),
        biases: model.layers().iter().map(|l| l.biases().iter().map(|v| v.as_f64()).collect()).collect(),
    };
    serde_json::to_writer(&mut w, &doc)?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn read_model<T: Scalar, R: Read>(r: R) -> Result<ReconstructorModel<T>> {
    let doc: ModelDoc = serde_json::from_reader(BufReader::new(r))?;
    if doc.layer_sizes.len() != doc.weights.len() + 1 || doc.weights.len() != doc.biases.len() {
        return Err(Error::InvalidConfig(format!(
            "layer_sizes has {} entries for {} weight matrices and {} bias vectors",
            doc.layer_sizes.len(),
            doc.weights.len(),
            doc.biases.len()
        )));
    }
    let mut layers = Vec::with_capacity(doc.weights.len());
    for (i, (rows, bias)) in doc.weights.into_iter().zip(doc.biases).enumerate() {
        let (inputs, outputs) = (doc.layer_sizes[i], doc.layer_sizes[i + 1]);
        if rows.len() != outputs || rows.iter().any(|r| r.len() != inputs) {
            return Err(Error::InvalidConfig(format!("weight matrix {i} is not {outputs}x{inputs}")));
        }
        let weights = rows.into_iter().flatten().map(T::lit).collect();
        layers.push(DenseLayer::new(inputs, outputs, weights, bias.into_iter().map(T::lit).collect())?);
    }
    ReconstructorModel::from_layers(doc.kind, doc.activation, doc.history_k, layers)
}

/// `frame_index,error` CSV, one row per value.
pub fn write_error_series<T: Scalar, W: Write>(w: W, series: &ErrorSeries<T>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["frame_index", "error"])?;
    for (idx, v) in series.iter_indexed() {
        out.write_record([idx.to_string(), v.as_f64().to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Reads `frame_index,error` CSV. Indices must be consecutive.
pub fn read_error_series<T: Scalar, R: Read>(r: R) -> Result<ErrorSeries<T>> {
    let rows = read_two_column_csv(r, "frame_index", "error")?;
    let start = rows.first().map(|r| r.0).unwrap_or(0);
    let mut values = Vec::with_capacity(rows.len());
    for (j, &(idx, v, offset)) in rows.iter().enumerate() {
        if idx != start + j {
            return Err(Error::format(
                offset,
                format!("frame_index {idx} breaks the consecutive run starting at {start}"),
            ));
        }
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::format(offset, format!("error value {v} is negative or not finite")));
        }
        values.push(T::lit(v));
    }
    ErrorSeries::new(values, start)
}

/// Parses a two-column CSV with the given header into
/// `(index, value, byte_offset)` rows.
pub(crate) fn read_two_column_csv<R: Read>(r: R, first: &str, second: &str) -> Result<Vec<(usize, f64, u64)>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 || &headers[0] != first || &headers[1] != second {
        return Err(Error::format(
            0,
            format!("expected header `{first},{second}`, found `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let offset = rec.position().map(|p| p.byte()).unwrap_or(0);
        if rec.len() != 2 {
            return Err(Error::format(offset, format!("expected 2 fields, found {}", rec.len())));
        }
        let idx: usize =
            rec[0].trim().parse().map_err(|_| Error::format(offset, format!("bad {first} {:?}", &rec[0])))?;
        let val: f64 =
            rec[1].trim().parse().map_err(|_| Error::format(offset, format!("bad {second} {:?}", &rec[1])))?;
        rows.push((idx, val, offset));
    }
    Ok(rows)
}

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::reconstruct::io::read_two_column_csv;

use super::MisbehaviourLog;

/// CSV `frame_index,misbehaviour` with `0`/`1` flags.
pub fn write_misbehaviour_csv<W: Write>(log: &MisbehaviourLog, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["frame_index", "misbehaviour"])?;
    for (t, &f) in log.flags().iter().enumerate() {
        wr.write_record([t.to_string(), u8::from(f).to_string()])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_misbehaviour_csv<R: Read>(r: R) -> Result<MisbehaviourLog> {
    let rows = read_two_column_csv(r, "frame_index", "misbehaviour")?;
    let mut flags = Vec::with_capacity(rows.len());
    for (t, (idx, flag, offset)) in rows.into_iter().enumerate() {
        if idx != t {
            return Err(Error::format(offset, format!("expected frame_index {t}, found {idx}")));
        }
        flags.push(match flag {
            0.0 => false,
            1.0 => true,
            other => return Err(Error::format(offset, format!("misbehaviour flag must be 0 or 1, found {other}"))),
        });
    }
    Ok(MisbehaviourLog::new(flags))
}

/// CSV `frame_index,intensity`.
pub fn write_intensity_csv<W: Write>(intensity: &[f64], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["frame_index", "intensity"])?;
    for (t, v) in intensity.iter().enumerate() {
        wr.write_record([t.to_string(), format!("{v:.16e}")])?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_intensity_csv<R: Read>(r: R) -> Result<Vec<f64>> {
    let rows = read_two_column_csv(r, "frame_index", "intensity")?;
    rows.into_iter()
        .enumerate()
        .map(|(t, (idx, v, offset))| {
            if idx != t {
                return Err(Error::format(offset, format!("expected frame_index {t}, found {idx}")));
            }
            Ok(v)
        })
        .collect()
}

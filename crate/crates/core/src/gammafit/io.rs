use std::io::{Read, Write};

use serde::Deserialize;

use super::{GammaParams, ThresholdSpec};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Persisted calibration: fitted parameters plus the derived threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration<T> {
    pub params: GammaParams<T>,
    pub threshold: ThresholdSpec<T>,
    pub samples: usize,
}

#[derive(Deserialize)]
struct Raw {
    alpha: f64,
    rate: f64,
    epsilon: f64,
    theta: f64,
    #[serde(default)]
    samples: usize,
}

/// 17 significant digits, exponent form; always a valid JSON number.
fn lit17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_calibration<T: Scalar, W: Write>(mut w: W, cal: &Calibration<T>) -> Result<()> {
    writeln!(
        w,
        "{{\"alpha\": {}, \"rate\": {}, \"epsilon\": {}, \"theta\": {}, \"samples\": {}}}",
        lit17(cal.params.shape().as_f64()),
        lit17(cal.params.rate().as_f64()),
        lit17(cal.threshold.epsilon.as_f64()),
        lit17(cal.threshold.theta.as_f64()),
        cal.samples
    )?;
    Ok(())
}

pub fn read_calibration<T: Scalar, R: Read>(r: R) -> Result<Calibration<T>> {
    let raw: Raw = serde_json::from_reader(r)?;
    let params = GammaParams::new(T::lit(raw.alpha), T::lit(raw.rate))?;
    if !(raw.epsilon > 0.0 && raw.epsilon < 1.0) || !(raw.theta > 0.0) {
        return Err(Error::InvalidConfig(format!("calibration has epsilon={} theta={}", raw.epsilon, raw.theta)));
    }
    Ok(Calibration {
        params,
        threshold: ThresholdSpec { epsilon: T::lit(raw.epsilon), theta: T::lit(raw.theta) },
        samples: raw.samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digit_literals_round_trip() {
        let params = GammaParams::new(15.000_000_000_000_002_f64, 392.1).unwrap();
        let cal = Calibration {
            params,
            threshold: ThresholdSpec { epsilon: 0.01, theta: 0.064_913_496_570_812_62 },
            samples: 1234,
        };
        let mut buf = Vec::new();
        write_calibration(&mut buf, &cal).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("\"alpha\": 1.5000000000000002e1"), "{text}");
        let back: Calibration<f64> = read_calibration(buf.as_slice()).unwrap();
        assert_eq!(back, cal);
    }

    #[test]
    fn rejects_bad_epsilon() {
        let text = r#"{"alpha": 2.0, "rate": 1.0, "epsilon": 1.5, "theta": 1.0}"#;
        assert!(read_calibration::<f64, _>(text.as_bytes()).is_err());
    }
}

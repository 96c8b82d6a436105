use crate::error::{Error, Result};
use crate::scalar::{from_usize, Scalar};

/// One image: `width × height × channels` values in `[0, 1]`, row-major,
/// channel-last.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameTensor<T> {
    width: usize,
    height: usize,
    channels: usize,
    pixels: Vec<T>,
}

impl<T: Scalar> FrameTensor<T> {
    pub fn new(width: usize, height: usize, channels: usize, pixels: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 || channels == 0 {
            return Err(Error::InvalidFrame(format!("zero dimension {width}x{height}x{channels}")));
        }
        let expected = width * height * channels;
        if pixels.len() != expected {
            return Err(Error::DimensionMismatch {
                expected: format!("{expected} pixels"),
                found: format!("{} pixels", pixels.len()),
            });
        }
        if let Some(i) = pixels.iter().position(|&p| !(p >= T::zero() && p <= T::one())) {
            return Err(Error::InvalidFrame(format!("pixel {i} = {} outside [0, 1]", pixels[i])));
        }
        Ok(Self { width, height, channels, pixels })
    }

    /// Builds a frame from arbitrary values, clamping each into `[0, 1]`
    /// (NaN maps to 0).
    pub fn from_clamped(width: usize, height: usize, channels: usize, mut pixels: Vec<T>) -> Result<Self> {
        for p in pixels.iter_mut() {
            *p = if p.is_nan() { T::zero() } else { p.max(T::zero()).min(T::one()) };
        }
        Self::new(width, height, channels, pixels)
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: T) -> Result<Self> {
        Self::new(width, height, channels, vec![value; width * height * channels])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.width, self.height, self.channels)
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[T] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<T> {
        self.pixels
    }

    /// Value at column `x`, row `y`, channel `c`.
    pub fn get(&self, x: usize, y: usize, c: usize) -> T {
        self.pixels[(y * self.width + x) * self.channels + c]
    }
}

/// Mean pixel-wise squared error between two frames of identical shape.
pub fn reconstruction_error<T: Scalar>(x: &FrameTensor<T>, x_prime: &FrameTensor<T>) -> Result<T> {
    if x.dims() != x_prime.dims() {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", x.dims()),
            found: format!("{:?}", x_prime.dims()),
        });
    }
    Ok(mean_squared_diff(&x.pixels, &x_prime.pixels))
}

pub(crate) fn mean_squared_diff<T: Scalar>(a: &[T], b: &[T]) -> T {
    let sum = a.iter().zip(b).fold(T::zero(), |acc, (&p, &q)| {
        let d = p - q;
        acc + d * d
    });
    sum / from_usize::<T>(a.len())
}

/// Ordered frames sharing one shape; index `i` is discrete time `t = i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameStream<T> {
    frames: Vec<FrameTensor<T>>,
    frame_rate_hz: f64,
}

impl<T: Scalar> FrameStream<T> {
    pub fn new(frames: Vec<FrameTensor<T>>, frame_rate_hz: f64) -> Result<Self> {
        if !(frame_rate_hz > 0.0 && frame_rate_hz.is_finite()) {
            return Err(Error::InvalidConfig(format!("frame rate must be positive, got {frame_rate_hz}")));
        }
        if let Some(first) = frames.first() {
            if let Some((i, f)) = frames.iter().enumerate().find(|(_, f)| f.dims() != first.dims()) {
                return Err(Error::DimensionMismatch {
                    expected: format!("{:?}", first.dims()),
                    found: format!("{:?} at frame {i}", f.dims()),
                });
            }
        }
        Ok(Self { frames, frame_rate_hz })
    }

    pub fn frames(&self) -> &[FrameTensor<T>] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frame_rate_hz(&self) -> f64 {
        self.frame_rate_hz
    }

    /// `(width, height, channels)`, or `None` for an empty stream.
    pub fn dims(&self) -> Option<(usize, usize, usize)> {
        self.frames.first().map(FrameTensor::dims)
    }

    pub fn into_frames(self) -> Vec<FrameTensor<T>> {
        self.frames
    }
}

/// Time-indexed non-negative reconstruction errors; `values[j]` belongs to
/// frame `start_index + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSeries<T> {
    values: Vec<T>,
    start_index: usize,
}

impl<T: Scalar> ErrorSeries<T> {
    pub fn new(values: Vec<T>, start_index: usize) -> Result<Self> {
        if let Some(i) = values.iter().position(|&v| !(v >= T::zero()) || !v.is_finite()) {
            return Err(Error::Domain(format!("error value {i} = {} is negative or not finite", values[i])));
        }
        Ok(Self { values, start_index })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn start_index(&self) -> usize {
        self.start_index
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(frame_index, value)` pairs.
    pub fn iter_indexed(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.values.iter().enumerate().map(move |(j, &v)| (self.start_index + j, v))
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }
}

use super::{FormatError, GrayscaleImage};

/// Real-valued image with row-major values, e.g. a specified output before
/// quantization.
#[derive(Debug, Clone, PartialEq)]
pub struct RealImage {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl RealImage {
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    /// Column-major traversal.
    pub fn flatten_columns(&self) -> Vec<f64> {
        column_major(self.width, self.height, |i| self.values[i])
    }

    /// Rounds to the nearest integer and clamps to `[0, 255]`.
    pub fn quantize(&self) -> GrayscaleImage {
        let pixels = self
            .values
            .iter()
            .map(|v| v.round().clamp(0.0, 255.0) as u8)
            .collect();
        GrayscaleImage::new(self.width, self.height, pixels).expect("dimensions already checked")
    }
}

impl From<&GrayscaleImage> for RealImage {
    fn from(img: &GrayscaleImage) -> Self {
        RealImage {
            width: img.width(),
            height: img.height(),
            values: img.pixels().iter().map(|&v| f64::from(v)).collect(),
        }
    }
}

fn column_major<T>(width: usize, height: usize, at: impl Fn(usize) -> T) -> Vec<T> {
    let mut out = Vec::with_capacity(width * height);
    for x in 0..width {
        for y in 0..height {
            out.push(at(y * width + x));
        }
    }
    out
}

/// Concatenates the image columns into a single vector.
pub fn flatten_columns(img: &GrayscaleImage) -> Vec<f64> {
    column_major(img.width(), img.height(), |i| f64::from(img.pixels()[i]))
}

/// Inverse of [`flatten_columns`]: rebuilds a `width x height` image from
/// column-major values.
pub fn reshape_columns(
    values: &[f64],
    width: usize,
    height: usize,
) -> Result<RealImage, FormatError> {
    if width == 0 || height == 0 || values.len() != width * height {
        return Err(FormatError::DimensionMismatch {
            width,
            height,
            expected: width * height,
            found: values.len(),
        });
    }
    let mut out = vec![0.0; values.len()];
    for (k, &v) in values.iter().enumerate() {
        let (x, y) = (k / height, k % height);
        out[y * width + x] = v;
    }
    Ok(RealImage {
        width,
        height,
        values: out,
    })
}

/// Returns a copy of `img` with a `w x h` rectangle at `(x0, y0)` set to `value`.
pub fn inscribe_rectangle(
    img: &GrayscaleImage,
    x0: usize,
    y0: usize,
    w: usize,
    h: usize,
    value: u8,
) -> Result<GrayscaleImage, FormatError> {
    let fits = w >= 1
        && h >= 1
        && x0.checked_add(w).is_some_and(|x1| x1 <= img.width())
        && y0.checked_add(h).is_some_and(|y1| y1 <= img.height());
    if !fits {
        return Err(FormatError::OutOfBounds {
            x0,
            y0,
            w,
            h,
            width: img.width(),
            height: img.height(),
        });
    }
    if value > img.maxval() {
        return Err(FormatError::CorruptHeader(format!(
            "sample {value} exceeds maxval {}",
            img.maxval()
        )));
    }
    let mut out = img.clone();
    let width = img.width();
    let pixels = out.pixels_mut();
    for y in y0..y0 + h {
        pixels[y * width + x0..y * width + x0 + w].fill(value);
    }
    Ok(out)
}

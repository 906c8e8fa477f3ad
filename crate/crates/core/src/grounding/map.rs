use std::io::Write;
use std::path::Path;

use super::GroundingError;

/// Dense row-major score grid with entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundingMap {
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl GroundingMap {
    pub fn new(height: usize, width: usize, values: Vec<f64>) -> Result<Self, GroundingError> {
        if height == 0 || width == 0 {
            return Err(GroundingError::InvalidDims(format!("{height}x{width}")));
        }
        if values.len() != height * width {
            return Err(GroundingError::InvalidDims(format!(
                "{height}x{width} map given {} values",
                values.len()
            )));
        }
        if let Some(&v) = values.iter().find(|v| !v.is_finite()) {
            return Err(GroundingError::NonFinite(v));
        }
        if let Some(&v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(GroundingError::OutOfRange(v));
        }
        Ok(GroundingMap { height, width, values })
    }

    pub fn filled(height: usize, width: usize, value: f64) -> Self {
        assert!(height > 0 && width > 0, "map dimensions must be positive");
        assert!((0.0..=1.0).contains(&value), "map value {value} outside [0, 1]");
        GroundingMap {
            height,
            width,
            values: vec![value; height * width],
        }
    }

    pub fn zeros(height: usize, width: usize) -> Self {
        Self::filled(height, width, 0.0)
    }

    pub fn ones(height: usize, width: usize) -> Self {
        Self::filled(height, width, 1.0)
    }

    /// Builds a map from a per-pixel function; values are clamped to `[0, 1]`.
    pub fn from_fn(height: usize, width: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(height > 0 && width > 0, "map dimensions must be positive");
        let mut values = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                let v = f(r, c);
                assert!(v.is_finite(), "non-finite map value at ({r}, {c})");
                values.push(v.clamp(0.0, 1.0));
            }
        }
        GroundingMap { height, width, values }
    }

    /// Binary map from a row-major mask.
    pub fn from_mask(height: usize, width: usize, mask: &[bool]) -> Self {
        assert_eq!(mask.len(), height * width);
        GroundingMap {
            height,
            width,
            values: mask.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect(),
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    fn check_dims(&self, other: &GroundingMap) -> Result<(), GroundingError> {
        if self.dims() == other.dims() {
            Ok(())
        } else {
            Err(GroundingError::DimMismatch {
                expected: self.dims(),
                found: other.dims(),
            })
        }
    }

    fn zip_with(&self, other: &GroundingMap, f: impl Fn(f64, f64) -> f64) -> Result<GroundingMap, GroundingError> {
        self.check_dims(other)?;
        Ok(GroundingMap {
            height: self.height,
            width: self.width,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Pixelwise minimum.
    pub fn intersect(&self, other: &GroundingMap) -> Result<GroundingMap, GroundingError> {
        self.zip_with(other, f64::min)
    }

    /// Pixelwise maximum.
    pub fn union(&self, other: &GroundingMap) -> Result<GroundingMap, GroundingError> {
        self.zip_with(other, f64::max)
    }

    /// Pixelwise product.
    pub fn hadamard(&self, other: &GroundingMap) -> Result<GroundingMap, GroundingError> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Bilinear resampling with corner-aligned sample positions: output pixel
    /// `i` reads source coordinate `i * (src - 1) / (dst - 1)`. A single output
    /// row or column samples the source midpoint.
    pub fn resample(&self, new_height: usize, new_width: usize) -> GroundingMap {
        assert!(new_height > 0 && new_width > 0, "resample target must be positive");
        if (new_height, new_width) == self.dims() {
            return self.clone();
        }
        let axis = |src: usize, dst: usize| -> Vec<(usize, usize, f64)> {
            (0..dst)
                .map(|i| {
                    let s = if dst == 1 {
                        (src - 1) as f64 / 2.0
                    } else {
                        i as f64 * (src - 1) as f64 / (dst - 1) as f64
                    };
                    let i0 = (s.floor() as usize).min(src - 1);
                    let i1 = (i0 + 1).min(src - 1);
                    (i0, i1, s - i0 as f64)
                })
                .collect()
        };
        let rows = axis(self.height, new_height);
        let cols = axis(self.width, new_width);
        let mut values = Vec::with_capacity(new_height * new_width);
        for &(r0, r1, fr) in &rows {
            for &(c0, c1, fc) in &cols {
                let top = self.get(r0, c0) * (1.0 - fc) + self.get(r0, c1) * fc;
                let bottom = self.get(r1, c0) * (1.0 - fc) + self.get(r1, c1) * fc;
                values.push((top * (1.0 - fr) + bottom * fr).clamp(0.0, 1.0));
            }
        }
        GroundingMap {
            height: new_height,
            width: new_width,
            values,
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Row-major index of the maximum; the first one on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        best
    }

    pub fn threshold(&self, t: f64) -> Vec<bool> {
        self.values.iter().map(|&v| v >= t).collect()
    }

    /// Binary PGM (P5), value × 255 rounded.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.values.iter().map(|&v| (v * 255.0).round() as u8));
        out
    }

    pub fn write_pgm(&self, path: &Path) -> Result<(), GroundingError> {
        let mut f = std::fs::File::create(path).map_err(|e| GroundingError::Io(format!("{}: {e}", path.display())))?;
        f.write_all(&self.to_pgm())
            .map_err(|e| GroundingError::Io(format!("{}: {e}", path.display())))
    }
}

/// Min-max rescaling of a raw score grid; a range at or below 1e-9 yields
/// the all-zero map.
pub fn normalize(height: usize, width: usize, raw: &[f64]) -> Result<GroundingMap, GroundingError> {
    if height == 0 || width == 0 || raw.len() != height * width {
        return Err(GroundingError::InvalidDims(format!(
            "{height}x{width} grid given {} values",
            raw.len()
        )));
    }
    if let Some(&v) = raw.iter().find(|v| !v.is_finite()) {
        return Err(GroundingError::NonFinite(v));
    }
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    let values = if range > 1e-9 {
        raw.iter().map(|&v| ((v - lo) / range).clamp(0.0, 1.0)).collect()
    } else {
        vec![0.0; raw.len()]
    };
    Ok(GroundingMap { height, width, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(h: usize, w: usize, v: &[f64]) -> GroundingMap {
        GroundingMap::new(h, w, v.to_vec()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(GroundingMap::new(0, 1, vec![]).is_err());
        assert!(GroundingMap::new(1, 2, vec![0.0]).is_err());
        assert!(matches!(GroundingMap::new(1, 1, vec![f64::NAN]), Err(GroundingError::NonFinite(_))));
        assert!(matches!(GroundingMap::new(1, 1, vec![1.5]), Err(GroundingError::OutOfRange(_))));
    }

    #[test]
    fn algebra_identities() {
        let b = m(1, 3, &[0.2, 0.9, 0.0]);
        assert_eq!(GroundingMap::ones(1, 3).intersect(&b).unwrap(), b);
        assert_eq!(GroundingMap::zeros(1, 3).union(&b).unwrap(), b);
        assert_eq!(b.union(&b).unwrap(), b);
        assert!(matches!(
            b.intersect(&GroundingMap::ones(3, 1)),
            Err(GroundingError::DimMismatch { .. })
        ));
    }

    #[test]
    fn corner_aligned_upsample() {
        let r = m(1, 2, &[0.0, 1.0]).resample(1, 4);
        let expected = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0];
        for (a, b) in r.values().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
        let c = GroundingMap::filled(3, 5, 0.4).resample(7, 2);
        assert!(c.values().iter().all(|&v| (v - 0.4).abs() < 1e-12));
        let x = m(2, 2, &[0.1, 0.2, 0.3, 0.4]);
        assert_eq!(x.resample(2, 2), x);
    }

    #[test]
    fn normalize_rules() {
        assert_eq!(normalize(1, 2, &[2.0, 4.0]).unwrap().values(), &[0.0, 1.0]);
        assert!(normalize(2, 2, &[3.0; 4]).unwrap().is_zero());
        assert!(matches!(normalize(1, 1, &[f64::INFINITY]), Err(GroundingError::NonFinite(_))));
    }

    #[test]
    fn argmax_prefers_first() {
        let x = m(2, 2, &[0.0, 0.5, 0.5, 0.1]);
        assert_eq!(x.argmax(), 1);
    }

    #[test]
    fn pgm_encoding() {
        let pgm = m(1, 2, &[0.0, 0.5]).to_pgm();
        assert!(pgm.starts_with(b"P5\n2 1\n255\n"));
        assert_eq!(&pgm[pgm.len() - 2..], &[0, 128]);
    }
}

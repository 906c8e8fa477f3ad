//! Feature/embedding grounding: a `1×1`-convolution projection of per-pixel
//! features is correlated with a concept vector broadcast over the image.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::map::{normalize, GroundingMap};
use super::{GroundingBackend, GroundingError, Resolution};
use crate::dsl::ConceptToken;
use crate::world::{attribute_vocabulary, Scene};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, GroundingError> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(GroundingError::InvalidDims(format!(
                "{rows}x{cols} matrix given {} values",
                data.len()
            )));
        }
        if let Some(&v) = data.iter().find(|v| !v.is_finite()) {
            return Err(GroundingError::NonFinite(v));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Matrix { rows: n, cols: n, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    /// `out = self · x`.
    fn mul_into(&self, x: &[f64], out: &mut [f64]) {
        for (r, o) in out.iter_mut().enumerate() {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            *o = acc;
        }
    }
}

/// Per-pixel feature vectors, row-major by pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMap {
    height: usize,
    width: usize,
    dim: usize,
    values: Vec<f64>,
}

impl FeatureMap {
    pub fn new(height: usize, width: usize, dim: usize, values: Vec<f64>) -> Result<Self, GroundingError> {
        if height == 0 || width == 0 || dim == 0 || values.len() != height * width * dim {
            return Err(GroundingError::InvalidDims(format!(
                "{height}x{width}x{dim} features given {} values",
                values.len()
            )));
        }
        if let Some(&v) = values.iter().find(|v| !v.is_finite()) {
            return Err(GroundingError::NonFinite(v));
        }
        Ok(FeatureMap {
            height,
            width,
            dim,
            values,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pixel(&self, row: usize, col: usize) -> &[f64] {
        let start = (row * self.width + col) * self.dim;
        &self.values[start..start + self.dim]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConceptEmbedding {
    values: Vec<f64>,
}

impl ConceptEmbedding {
    pub fn new(values: Vec<f64>) -> Result<Self, GroundingError> {
        if values.is_empty() {
            return Err(GroundingError::InvalidDims("empty embedding".into()));
        }
        if let Some(&v) = values.iter().find(|v| !v.is_finite()) {
            return Err(GroundingError::NonFinite(v));
        }
        Ok(ConceptEmbedding { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// `cv: D1 → D2` and `cl: D2 → D2`, stored as `D2×D1` and `D2×D2` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionWeights {
    cv: Matrix,
    cl: Matrix,
}

impl ProjectionWeights {
    pub fn new(cv: Matrix, cl: Matrix) -> Result<Self, GroundingError> {
        if cl.rows != cl.cols || cl.cols != cv.rows {
            return Err(GroundingError::InvalidDims(format!(
                "cv is {}x{}, cl is {}x{}",
                cv.rows, cv.cols, cl.rows, cl.cols
            )));
        }
        Ok(ProjectionWeights { cv, cl })
    }

    pub fn identity(dim: usize) -> Self {
        ProjectionWeights {
            cv: Matrix::identity(dim),
            cl: Matrix::identity(dim),
        }
    }

    pub fn cv(&self) -> &Matrix {
        &self.cv
    }

    pub fn cl(&self) -> &Matrix {
        &self.cl
    }

    pub fn feature_dim(&self) -> usize {
        self.cv.cols
    }

    pub fn embedding_dim(&self) -> usize {
        self.cl.rows
    }

    /// Text form: a `cv ROWS COLS` header followed by ROWS lines of COLS
    /// numbers, then the same for `cl`. `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self, GroundingError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let mut read = |name: &str| -> Result<Matrix, GroundingError> {
            let (n, header) = lines.next().ok_or_else(|| GroundingError::Format {
                line: 0,
                message: format!("missing {name} header"),
            })?;
            let fmt = |message: String| GroundingError::Format { line: n, message };
            let parts: Vec<&str> = header.split_whitespace().collect();
            if parts.len() != 3 || parts[0] != name {
                return Err(fmt(format!("expected `{name} ROWS COLS`")));
            }
            let rows: usize = parts[1].parse().map_err(|_| fmt("bad row count".into()))?;
            let cols: usize = parts[2].parse().map_err(|_| fmt("bad column count".into()))?;
            let mut data = Vec::with_capacity(rows * cols);
            for _ in 0..rows {
                let (n, line) = lines.next().ok_or_else(|| fmt(format!("{name}: missing rows")))?;
                let row = parse_floats(line).map_err(|message| GroundingError::Format { line: n, message })?;
                if row.len() != cols {
                    return Err(GroundingError::Format {
                        line: n,
                        message: format!("{name}: expected {cols} values, found {}", row.len()),
                    });
                }
                data.extend(row);
            }
            Matrix::new(rows, cols, data)
        };
        let cv = read("cv")?;
        let cl = read("cl")?;
        Self::new(cv, cl)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, m) in [("cv", &self.cv), ("cl", &self.cl)] {
            let _ = writeln!(out, "{name} {} {}", m.rows, m.cols);
            for r in 0..m.rows {
                let row: Vec<String> = (0..m.cols).map(|c| format!("{:?}", m.get(r, c))).collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
        out
    }

    pub fn from_path(path: &Path) -> Result<Self, GroundingError> {
        let text = std::fs::read_to_string(path).map_err(|e| GroundingError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

fn parse_floats(line: &str) -> Result<Vec<f64>, String> {
    line.split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

/// Unnormalized scores: `raw(i,j) = Σ_d e_d · (Cl · Cv · F(i,j))_d`.
pub fn ground_embedding_raw(
    features: &FeatureMap,
    embedding: &ConceptEmbedding,
    weights: &ProjectionWeights,
) -> Result<Vec<f64>, GroundingError> {
    if features.dim != weights.feature_dim() {
        return Err(GroundingError::DimMismatch {
            expected: (weights.feature_dim(), 1),
            found: (features.dim, 1),
        });
    }
    if embedding.dim() != weights.embedding_dim() {
        return Err(GroundingError::DimMismatch {
            expected: (weights.embedding_dim(), 1),
            found: (embedding.dim(), 1),
        });
    }
    let d2 = weights.embedding_dim();
    let mut y = vec![0.0; d2];
    let mut z = vec![0.0; d2];
    let mut raw = Vec::with_capacity(features.height * features.width);
    for p in features.values.chunks_exact(features.dim) {
        weights.cv.mul_into(p, &mut y);
        weights.cl.mul_into(&y, &mut z);
        let mut acc = 0.0;
        for (e, v) in embedding.values.iter().zip(&z) {
            acc += e * v;
        }
        raw.push(acc);
    }
    Ok(raw)
}

/// Min-max normalized [`ground_embedding_raw`].
pub fn ground_embedding(
    features: &FeatureMap,
    embedding: &ConceptEmbedding,
    weights: &ProjectionWeights,
) -> Result<GroundingMap, GroundingError> {
    let raw = ground_embedding_raw(features, embedding, weights)?;
    normalize(features.height, features.width, &raw)
}

/// Word → embedding vector.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    /// One-hot vectors over `vocabulary`, in order.
    pub fn one_hot(vocabulary: &[String]) -> Self {
        let dim = vocabulary.len();
        let vectors = vocabulary
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let mut v = vec![0.0; dim];
                v[i] = 1.0;
                (w.clone(), v)
            })
            .collect();
        EmbeddingTable { dim, vectors }
    }

    /// Lines of `word<TAB>v1 v2 ...`; every vector has the same length.
    pub fn parse(text: &str) -> Result<Self, GroundingError> {
        let mut table = EmbeddingTable::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fmt = |message: String| GroundingError::Format { line: i + 1, message };
            let (word, rest) = line.split_once('\t').ok_or_else(|| fmt("expected word<TAB>values".into()))?;
            let v = parse_floats(rest).map_err(fmt)?;
            if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
                return Err(fmt("embedding needs finite values".into()));
            }
            if table.dim != 0 && v.len() != table.dim {
                return Err(fmt(format!("expected {} values, found {}", table.dim, v.len())));
            }
            table.dim = v.len();
            table.vectors.insert(word.trim().to_string(), v);
        }
        if table.vectors.is_empty() {
            return Err(GroundingError::Format {
                line: 0,
                message: "empty embedding table".into(),
            });
        }
        Ok(table)
    }

    pub fn from_path(path: &Path) -> Result<Self, GroundingError> {
        let text = std::fs::read_to_string(path).map_err(|e| GroundingError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (w, v) in &self.vectors {
            let vals: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
            let _ = writeln!(out, "{w}\t{}", vals.join(" "));
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The word's vector; unknown words embed to zero.
    pub fn embed(&self, word: &str) -> ConceptEmbedding {
        let values = self.vectors.get(word).cloned().unwrap_or_else(|| vec![0.0; self.dim.max(1)]);
        ConceptEmbedding { values }
    }
}

/// Grounds concepts by correlating synthetic attribute-indicator features
/// with concept embeddings.
///
/// The feature at a pixel is the indicator vector of every attribute carried
/// by any object covering it (occluded objects included), plus optional
/// Gaussian noise seeded from the scene seed.
#[derive(Debug, Clone)]
pub struct EmbeddingBackend {
    vocabulary: Vec<String>,
    table: EmbeddingTable,
    weights: ProjectionWeights,
    noise_sigma: f64,
}

impl EmbeddingBackend {
    pub fn new(
        vocabulary: Vec<String>,
        table: EmbeddingTable,
        weights: ProjectionWeights,
        noise_sigma: f64,
    ) -> Result<Self, GroundingError> {
        if weights.feature_dim() != vocabulary.len() {
            return Err(GroundingError::DimMismatch {
                expected: (vocabulary.len(), 1),
                found: (weights.feature_dim(), 1),
            });
        }
        if table.dim() != weights.embedding_dim() {
            return Err(GroundingError::DimMismatch {
                expected: (weights.embedding_dim(), 1),
                found: (table.dim(), 1),
            });
        }
        if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
            return Err(GroundingError::NonFinite(noise_sigma));
        }
        Ok(EmbeddingBackend {
            vocabulary,
            table,
            weights,
            noise_sigma,
        })
    }

    /// One-hot embeddings and identity projections over the default attribute
    /// vocabulary, noise-free.
    pub fn identity() -> Self {
        let vocabulary = attribute_vocabulary();
        let n = vocabulary.len();
        EmbeddingBackend {
            table: EmbeddingTable::one_hot(&vocabulary),
            vocabulary,
            weights: ProjectionWeights::identity(n),
            noise_sigma: 0.0,
        }
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn features(&self, scene: &Scene, res: Resolution) -> FeatureMap {
        let index: BTreeMap<&str, usize> = self.vocabulary.iter().enumerate().map(|(i, w)| (w.as_str(), i)).collect();
        let dim = self.vocabulary.len();
        let mut values = vec![0.0; res.height * res.width * dim];
        for obj in &scene.objects {
            let attrs: Vec<usize> = scene
                .effective_attributes(obj)
                .iter()
                .filter_map(|a| index.get(a.as_str()).copied())
                .collect();
            for p in obj.footprint_pixels(scene, res.height, res.width) {
                for &a in &attrs {
                    values[p * dim + a] = 1.0;
                }
            }
        }
        if self.noise_sigma > 0.0 {
            let normal = Normal::new(0.0, self.noise_sigma).expect("validated sigma");
            let mut rng = ChaCha8Rng::seed_from_u64(scene.seed);
            for v in &mut values {
                *v += normal.sample(&mut rng);
            }
        }
        FeatureMap {
            height: res.height,
            width: res.width,
            dim,
            values,
        }
    }
}

impl GroundingBackend for EmbeddingBackend {
    fn ground(&self, scene: &Scene, concept: &ConceptToken, res: Resolution) -> Result<GroundingMap, GroundingError> {
        let features = self.features(scene, res);
        ground_embedding(&features, &self.table.embed(concept.word()), &self.weights)
    }
}

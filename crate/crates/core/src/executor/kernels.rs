//! Binary-mask morphology and the geometric relation kernels.

use std::collections::VecDeque;

use super::ExecError;
use crate::dsl::ConceptToken;
use crate::grounding::GroundingMap;

/// Threshold at which a grounding value counts as part of an object.
pub const MASK_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationKind {
    /// Interior of the reference.
    Inside,
    /// The reference footprint itself.
    On,
    Left,
    Right,
    Front,
    Back,
}

/// Relation words and their geometric surrogates.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationConfig {
    pub containment: Vec<String>,
    pub support: Vec<String>,
    /// Erosion radius (pixels) of the containment kernel.
    pub erosion: usize,
}

impl Default for RelationConfig {
    fn default() -> Self {
        RelationConfig {
            containment: ["in", "into", "inside"].map(String::from).to_vec(),
            support: ["on", "top"].map(String::from).to_vec(),
            erosion: 1,
        }
    }
}

impl RelationConfig {
    pub fn classify(&self, rel: &ConceptToken) -> Result<RelationKind, ExecError> {
        let w = rel.word();
        if self.containment.iter().any(|c| c == w) {
            return Ok(RelationKind::Inside);
        }
        if self.support.iter().any(|c| c == w) {
            return Ok(RelationKind::On);
        }
        match w {
            "left" => Ok(RelationKind::Left),
            "right" => Ok(RelationKind::Right),
            "front" => Ok(RelationKind::Front),
            "back" => Ok(RelationKind::Back),
            _ => Err(ExecError::UnknownRelation(w.to_string())),
        }
    }
}

const NEIGHBOURS: [(isize, isize); 8] = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];

fn neighbours(h: usize, w: usize, p: usize) -> impl Iterator<Item = usize> {
    let (r, c) = ((p / w) as isize, (p % w) as isize);
    NEIGHBOURS.iter().filter_map(move |&(dr, dc)| {
        let (nr, nc) = (r + dr, c + dc);
        (nr >= 0 && nc >= 0 && (nr as usize) < h && (nc as usize) < w).then(|| nr as usize * w + nc as usize)
    })
}

/// 8-connected component labels (1-based, row-major discovery order) and the
/// component count.
pub fn label_components(h: usize, w: usize, mask: &[bool]) -> (Vec<usize>, usize) {
    let mut labels = vec![0; h * w];
    let mut n = 0;
    let mut queue = VecDeque::new();
    for start in 0..h * w {
        if !mask[start] || labels[start] != 0 {
            continue;
        }
        n += 1;
        labels[start] = n;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            for q in neighbours(h, w, p) {
                if mask[q] && labels[q] == 0 {
                    labels[q] = n;
                    queue.push_back(q);
                }
            }
        }
    }
    (labels, n)
}

/// Pixels of the 8-connected component of `mask` containing `seed`.
pub fn component_of(h: usize, w: usize, mask: &[bool], seed: usize) -> Vec<usize> {
    if !mask[seed] {
        return Vec::new();
    }
    let mut seen = vec![false; h * w];
    let mut out = vec![seed];
    seen[seed] = true;
    let mut i = 0;
    while i < out.len() {
        let p = out[i];
        for q in neighbours(h, w, p) {
            if mask[q] && !seen[q] {
                seen[q] = true;
                out.push(q);
            }
        }
        i += 1;
    }
    out.sort_unstable();
    out
}

/// Chessboard distance from each mask pixel to the nearest pixel outside
/// the mask (the grid border counts as outside); 0 off the mask.
pub fn chessboard_distance(h: usize, w: usize, mask: &[bool]) -> Vec<u32> {
    let big = (h + w) as u32;
    let mut d: Vec<u32> = mask.iter().map(|&m| if m { big } else { 0 }).collect();
    let at = |d: &[u32], r: isize, c: isize| -> u32 {
        if r < 0 || c < 0 || r as usize >= h || c as usize >= w {
            0
        } else {
            d[r as usize * w + c as usize]
        }
    };
    for r in 0..h as isize {
        for c in 0..w as isize {
            let p = r as usize * w + c as usize;
            if d[p] == 0 {
                continue;
            }
            let m = [at(&d, r - 1, c - 1), at(&d, r - 1, c), at(&d, r - 1, c + 1), at(&d, r, c - 1)]
                .into_iter()
                .min()
                .expect("nonempty");
            d[p] = d[p].min(m + 1);
        }
    }
    for r in (0..h as isize).rev() {
        for c in (0..w as isize).rev() {
            let p = r as usize * w + c as usize;
            if d[p] == 0 {
                continue;
            }
            let m = [at(&d, r + 1, c + 1), at(&d, r + 1, c), at(&d, r + 1, c - 1), at(&d, r, c + 1)]
                .into_iter()
                .min()
                .expect("nonempty");
            d[p] = d[p].min(m + 1);
        }
    }
    d
}

/// Distance transform scaled to peak at 1 within each component.
pub fn component_normalized_distance(h: usize, w: usize, mask: &[bool]) -> Vec<f64> {
    let d = chessboard_distance(h, w, mask);
    let (labels, n) = label_components(h, w, mask);
    let mut peak = vec![0u32; n + 1];
    for (p, &l) in labels.iter().enumerate() {
        peak[l] = peak[l].max(d[p]);
    }
    labels
        .iter()
        .zip(&d)
        .map(|(&l, &v)| if l == 0 { 0.0 } else { v as f64 / peak[l] as f64 })
        .collect()
}

/// Keeps pixels whose whole `radius` chessboard neighbourhood is on the mask.
pub fn erode(h: usize, w: usize, mask: &[bool], radius: usize) -> Vec<bool> {
    let d = chessboard_distance(h, w, mask);
    d.iter().map(|&v| v as usize > radius).collect()
}

/// Value-weighted centroid in pixel-centre coordinates `(row, col)`.
pub fn weighted_centroid(map: &GroundingMap) -> Option<(f64, f64)> {
    let (h, w) = map.dims();
    let (mut s, mut sr, mut sc) = (0.0, 0.0, 0.0);
    for r in 0..h {
        for c in 0..w {
            let v = map.get(r, c);
            s += v;
            sr += v * (r as f64 + 0.5);
            sc += v * (c as f64 + 0.5);
        }
    }
    (s > 0.0).then(|| (sr / s, sc / s))
}

/// The kernel `K(reference, relation)` at the reference map's resolution.
/// Containment kernels peak at component centres and are zeroed on
/// `occupied` pixels; directional kernels are open half-planes through the
/// reference's weighted centroid.
pub fn relation_kernel(
    reference: &GroundingMap,
    kind: RelationKind,
    cfg: &RelationConfig,
    occupied: Option<&[bool]>,
) -> GroundingMap {
    let (h, w) = reference.dims();
    let mask = reference.threshold(MASK_THRESHOLD);
    match kind {
        RelationKind::Inside => {
            let core = erode(h, w, &mask, cfg.erosion);
            let mut k = component_normalized_distance(h, w, &core);
            if let Some(occ) = occupied {
                for (v, &o) in k.iter_mut().zip(occ) {
                    if o {
                        *v = 0.0;
                    }
                }
            }
            GroundingMap::new(h, w, k).expect("kernel values lie in [0, 1]")
        }
        RelationKind::On => GroundingMap::from_mask(h, w, &mask),
        dir => {
            let Some((cr, cc)) = weighted_centroid(reference) else {
                return GroundingMap::zeros(h, w);
            };
            GroundingMap::from_fn(h, w, |r, c| {
                let (y, x) = (r as f64 + 0.5, c as f64 + 0.5);
                let keep = match dir {
                    RelationKind::Left => x < cc,
                    RelationKind::Right => x > cc,
                    RelationKind::Back => y < cr,
                    _ => y > cr,
                };
                if keep {
                    1.0
                } else {
                    0.0
                }
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(rows: &[&str]) -> (usize, usize, Vec<bool>) {
        let h = rows.len();
        let w = rows[0].len();
        (h, w, rows.iter().flat_map(|r| r.chars().map(|c| c == '#')).collect())
    }

    #[test]
    fn distance_transform() {
        let (h, w, m) = mask(&[".....", ".###.", ".###.", ".###.", "....."]);
        let d = chessboard_distance(h, w, &m);
        assert_eq!(d[12], 2);
        assert_eq!(d[6], 1);
        assert_eq!(d[0], 0);
        let (h, w, m) = mask(&["###", "###"]);
        assert_eq!(chessboard_distance(h, w, &m), vec![1; 6]);
    }

    #[test]
    fn components_are_8_connected() {
        let (h, w, m) = mask(&["#..", ".#.", "..#", "#.."]);
        let (labels, n) = label_components(h, w, &m);
        assert_eq!(n, 2);
        assert_eq!(labels[0], labels[4]);
        assert_ne!(labels[0], labels[9]);
        assert_eq!(component_of(h, w, &m, 8), vec![0, 4, 8]);
    }

    #[test]
    fn erosion_shrinks_by_radius() {
        let (h, w, m) = mask(&[".....", ".###.", ".###.", ".###.", "....."]);
        let e = erode(h, w, &m, 1);
        assert_eq!(e.iter().filter(|&&b| b).count(), 1);
        assert!(e[12]);
    }

    #[test]
    fn left_half_plane_on_8x8() {
        let reference = GroundingMap::from_fn(8, 8, |r, c| if (3..5).contains(&r) && (4..6).contains(&c) { 1.0 } else { 0.0 });
        let k = relation_kernel(&reference, RelationKind::Left, &RelationConfig::default(), None);
        for r in 0..8 {
            for c in 0..8 {
                assert_eq!(k.get(r, c), if c < 5 { 1.0 } else { 0.0 }, "({r}, {c})");
            }
        }
        let front = relation_kernel(&reference, RelationKind::Front, &RelationConfig::default(), None);
        assert_eq!(front.get(4, 0), 1.0);
        assert_eq!(front.get(3, 0), 0.0);
    }

    #[test]
    fn containment_kernel_is_interior_and_peaked() {
        let reference = GroundingMap::from_fn(9, 9, |r, c| if (1..8).contains(&r) && (1..8).contains(&c) { 1.0 } else { 0.0 });
        let k = relation_kernel(&reference, RelationKind::Inside, &RelationConfig::default(), None);
        assert_eq!(k.get(1, 1), 0.0);
        assert!(k.get(2, 2) > 0.0);
        assert_eq!(k.get(4, 4), 1.0);
        let mut occ = vec![false; 81];
        occ[4 * 9 + 4] = true;
        let k = relation_kernel(&reference, RelationKind::Inside, &RelationConfig::default(), Some(&occ));
        assert_eq!(k.get(4, 4), 0.0);
    }

    #[test]
    fn unknown_relation() {
        let cfg = RelationConfig::default();
        assert!(matches!(
            cfg.classify(&ConceptToken::relation("between").unwrap()),
            Err(ExecError::UnknownRelation(_))
        ));
        assert_eq!(cfg.classify(&ConceptToken::relation("into").unwrap()).unwrap(), RelationKind::Inside);
    }
}

//! Iterated function systems of contractive similitudes.
//!
//! A similitude scales every distance by a fixed ratio in (0,1); a finite
//! family of them determines a unique compact attractor K with
//! K = S_1(K) ∪ ... ∪ S_p(K). This module holds the map algebra (application,
//! word composition), the similarity-dimension solver for Σ α_k^s = 1, the
//! cut-set enumeration I(R) that partitions K into cells of diameter ≤ |K|·R,
//! anchor points on those cells, and the affine normalization that places K
//! inside the unit cube for all downstream analysis.

use crate::error::{Error, Result};
use serde::Deserialize;
use std::collections::HashSet;

/// One contraction map x ↦ ratio·O·x + t with O orthogonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Similitude {
    pub ratio: f64,
    /// Row-major d×d orthogonal matrix.
    pub matrix: Vec<f64>,
    pub translation: Vec<f64>,
}

impl Similitude {
    pub fn new(ratio: f64, matrix: Vec<f64>, translation: Vec<f64>) -> Result<Self> {
        let d = translation.len();
        if d == 0 {
            return Err(Error::input("translation must have dimension >= 1"));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::input(format!(
                "contraction ratio must lie strictly in (0,1), got {ratio}"
            )));
        }
        if matrix.len() != d * d {
            return Err(Error::input(format!(
                "matrix must be {d}x{d} to match translation dimension"
            )));
        }
        // M * M^T = I within 1e-9 entrywise.
        for r in 0..d {
            for c in 0..d {
                let mut dot = 0.0;
                for k in 0..d {
                    dot += matrix[r * d + k] * matrix[c * d + k];
                }
                let expect = if r == c { 1.0 } else { 0.0 };
                if (dot - expect).abs() > 1e-9 {
                    return Err(Error::input(format!(
                        "matrix is not orthogonal: (M M^T)[{r}][{c}] = {dot}"
                    )));
                }
            }
        }
        Ok(Similitude { ratio, matrix, translation })
    }

    /// Identity rotation with the given ratio and translation.
    pub fn axis_aligned(ratio: f64, translation: Vec<f64>) -> Result<Self> {
        let d = translation.len();
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            m[i * d + i] = 1.0;
        }
        Similitude::new(ratio, m, translation)
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    /// ratio·O·x + t.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let d = self.dim();
        if x.len() != d {
            return Err(Error::input(format!(
                "point has dimension {}, map expects {d}",
                x.len()
            )));
        }
        let mut out = self.translation.clone();
        for r in 0..d {
            let mut acc = 0.0;
            for c in 0..d {
                acc += self.matrix[r * d + c] * x[c];
            }
            out[r] += self.ratio * acc;
        }
        Ok(out)
    }

    /// Composition self ∘ other, i.e. x ↦ self(other(x)).
    pub fn compose(&self, other: &Similitude) -> Result<Similitude> {
        let d = self.dim();
        if other.dim() != d {
            return Err(Error::input("cannot compose maps of different dimensions"));
        }
        let mut m = vec![0.0; d * d];
        for r in 0..d {
            for c in 0..d {
                let mut acc = 0.0;
                for k in 0..d {
                    acc += self.matrix[r * d + k] * other.matrix[k * d + c];
                }
                m[r * d + c] = acc;
            }
        }
        let t = self.apply(&other.translation)?;
        Ok(Similitude { ratio: self.ratio * other.ratio, matrix: m, translation: t })
    }

    /// The unique fixed point, solving (I - ratio·O) x = t.
    pub fn fixed_point(&self) -> Vec<f64> {
        let d = self.dim();
        let mut a = vec![0.0; d * d];
        for r in 0..d {
            for c in 0..d {
                a[r * d + c] = -self.ratio * self.matrix[r * d + c];
            }
            a[r * d + r] += 1.0;
        }
        // Gaussian elimination with partial pivoting; I - ratio·O is always
        // invertible since ratio < 1.
        let mut b = self.translation.clone();
        for col in 0..d {
            let mut piv = col;
            for r in col + 1..d {
                if a[r * d + col].abs() > a[piv * d + col].abs() {
                    piv = r;
                }
            }
            if piv != col {
                for c in 0..d {
                    a.swap(col * d + c, piv * d + c);
                }
                b.swap(col, piv);
            }
            let diag = a[col * d + col];
            for r in col + 1..d {
                let f = a[r * d + col] / diag;
                if f != 0.0 {
                    for c in col..d {
                        a[r * d + c] -= f * a[col * d + c];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
        for col in (0..d).rev() {
            let mut acc = b[col];
            for c in col + 1..d {
                acc -= a[col * d + c] * b[c];
            }
            b[col] = acc / a[col * d + col];
        }
        b
    }
}

/// An ordered family of similitudes sharing one ambient dimension.
#[derive(Debug, Clone)]
pub struct IfsSystem {
    pub name: String,
    pub dimension: usize,
    pub maps: Vec<Similitude>,
    /// User assertion that the open set condition holds; recorded in
    /// reports, never verified algorithmically.
    pub declared_osc: bool,
}

impl IfsSystem {
    pub fn new(
        name: impl Into<String>,
        dimension: usize,
        maps: Vec<Similitude>,
        declared_osc: bool,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::input("dimension must be >= 1"));
        }
        if maps.is_empty() {
            return Err(Error::input("an IFS needs at least one map"));
        }
        for (i, m) in maps.iter().enumerate() {
            if m.dim() != dimension {
                return Err(Error::input(format!(
                    "map {} has dimension {}, system declares {dimension}",
                    i + 1,
                    m.dim()
                )));
            }
        }
        Ok(IfsSystem { name: name.into(), dimension, maps, declared_osc })
    }

    pub fn map_count(&self) -> usize {
        self.maps.len()
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.maps.iter().map(|m| m.ratio).collect()
    }

    /// Similarity dimension of this system (root of the Moran equation).
    pub fn dimension_value(&self, tol: f64) -> Result<f64> {
        moran_dimension(&self.ratios(), tol)
    }

    /// Default anchor base: the fixed point of the first map.
    pub fn default_base(&self) -> Vec<f64> {
        self.maps[0].fixed_point()
    }

    /// Affine change of coordinates placing the attractor in the unit cube.
    ///
    /// K is contained in the closed ball of radius R around the centroid c of
    /// the maps' fixed points, with R = max_i |S_i(c) - c| / (1 - ratio_i):
    /// that ball is mapped into itself by every S_i, so it contains the
    /// invariant set. Mapping the ball onto the cube's inscribed ball keeps
    /// diam K <= 1.
    pub fn normalization(&self) -> Normalization {
        let d = self.dimension;
        let mut centroid = vec![0.0; d];
        for m in &self.maps {
            let fp = m.fixed_point();
            for k in 0..d {
                centroid[k] += fp[k];
            }
        }
        for v in centroid.iter_mut() {
            *v /= self.maps.len() as f64;
        }
        let mut radius: f64 = 0.0;
        for m in &self.maps {
            let img = m.apply(&centroid).expect("centroid has system dimension");
            let mut dist2 = 0.0;
            for k in 0..d {
                dist2 += (img[k] - centroid[k]).powi(2);
            }
            radius = radius.max(dist2.sqrt() / (1.0 - m.ratio));
        }
        if 2.0 * radius < 1e-12 {
            // One-point attractor: center it, keep unit scale.
            let offset = centroid.iter().map(|c| c - 0.5).collect();
            return Normalization { offset, scale: 1.0 };
        }
        let offset = centroid.iter().map(|c| c - radius).collect();
        Normalization { offset, scale: 2.0 * radius }
    }
}

/// Invertible map x ↦ (x - offset)/scale used for all analysis coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalization {
    pub offset: Vec<f64>,
    pub scale: f64,
}

impl Normalization {
    pub fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.offset).map(|(v, o)| (v - o) / self.scale).collect()
    }

    pub fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(&self.offset).map(|(v, o)| v * self.scale + o).collect()
    }
}

/// A finite word over the alphabet {1, ..., p} together with its contraction
/// ratio, the exact product of the letter ratios.
#[derive(Debug, Clone, PartialEq)]
pub struct Word {
    pub letters: Vec<u16>,
    pub ratio: f64,
}

impl Word {
    pub fn empty() -> Self {
        Word { letters: Vec::new(), ratio: 1.0 }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Digits concatenated, e.g. "121"; empty word renders as "".
    pub fn label(&self) -> String {
        self.letters.iter().map(|l| l.to_string()).collect()
    }
}

/// Compose the maps named by a word, left letter applied last:
/// S_w = S_{w1} ∘ S_{w2} ∘ ... ∘ S_{wn}. The empty word gives the identity
/// (represented with ratio exactly 1, identity rotation, zero translation,
/// even though 1 is not a legal standalone contraction ratio).
pub fn compose_word(ifs: &IfsSystem, w: &Word) -> Result<Similitude> {
    let d = ifs.dimension;
    let mut m = vec![0.0; d * d];
    for i in 0..d {
        m[i * d + i] = 1.0;
    }
    let mut acc = Similitude { ratio: 1.0, matrix: m, translation: vec![0.0; d] };
    for &letter in &w.letters {
        let idx = letter as usize;
        if idx == 0 || idx > ifs.maps.len() {
            return Err(Error::input(format!(
                "word letter {idx} outside 1..={}",
                ifs.maps.len()
            )));
        }
        acc = acc.compose(&ifs.maps[idx - 1])?;
    }
    Ok(acc)
}

/// Solve Σ ratios_k^s = 1 for s >= 0.
///
/// F(s) = Σ r^s - 1 is strictly decreasing from p-1 at s = 0, so the root is
/// bracketed by [0, log p / log(1/max ratio) + 1]. Bisection to width 1e-13
/// followed by a few Newton polish steps (kept inside the bracket).
pub fn moran_dimension(ratios: &[f64], tol: f64) -> Result<f64> {
    if ratios.is_empty() {
        return Err(Error::input("ratio list must be non-empty"));
    }
    if !(tol > 0.0) {
        return Err(Error::input("tolerance must be positive"));
    }
    for &r in ratios {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::input(format!("ratio {r} outside (0,1)")));
        }
    }
    let f = |s: f64| ratios.iter().map(|r| r.powf(s)).sum::<f64>() - 1.0;
    if ratios.len() == 1 {
        return Ok(0.0);
    }
    let rmax = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let mut lo = 0.0;
    let mut hi = (ratios.len() as f64).ln() / (1.0 / rmax).ln() + 1.0;
    debug_assert!(f(lo) > 0.0 && f(hi) < 0.0);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut s = 0.5 * (lo + hi);
    for _ in 0..5 {
        let fs = f(s);
        let dfs: f64 = ratios.iter().map(|r| r.powf(s) * r.ln()).sum();
        if dfs == 0.0 {
            break;
        }
        let next = s - fs / dfs;
        if next.is_finite() && next >= lo - 1e-12 && next <= hi + 1e-12 {
            s = next;
        } else {
            break;
        }
    }
    if f(s).abs() > tol {
        return Err(Error::Internal(format!(
            "similarity-dimension residual {} above tolerance {tol}",
            f(s).abs()
        )));
    }
    Ok(s)
}

/// The stopping family I(R): all words whose ratio first drops to <= R.
#[derive(Debug, Clone)]
pub struct CutSet {
    pub resolution: f64,
    pub words: Vec<Word>,
}

impl CutSet {
    /// Σ α_i^s over the family, the s-power partition of unity.
    pub fn partition_of_unity(&self, s: f64) -> f64 {
        let mut sum = 0.0;
        let mut comp = 0.0;
        for w in &self.words {
            let term = w.ratio.powf(s);
            let y = term - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        sum
    }

    /// Measured sandwich constant C = max(#I·R^s, 1/(#I·R^s)); for
    /// equal-ratio systems this stays near 1, in general it is reported as a
    /// diagnostic and never asserted.
    pub fn cardinality_constant(&self, s: f64) -> f64 {
        let x = self.words.len() as f64 * self.resolution.powf(s);
        x.max(1.0 / x)
    }
}

pub const DEFAULT_CUT_SET_CAP: usize = 10_000_000;

/// Enumerate I(R) by depth-first expansion in lexicographic word order.
///
/// A word is emitted as soon as its ratio product drops to <= R; its parent's
/// ratio is > R by construction, so the stopping rule holds per word. Ratios
/// are accumulated as plain left-to-right products, which keeps the
/// boundary classification exact for dyadic-style inputs.
///
/// The convention I(1) = the p length-1 words keeps the family non-trivial
/// at R = 1, where the strict parent inequality would otherwise fail.
pub fn cut_set(ifs: &IfsSystem, r: f64) -> Result<CutSet> {
    cut_set_capped(ifs, r, DEFAULT_CUT_SET_CAP)
}

pub fn cut_set_capped(ifs: &IfsSystem, r: f64, cap: usize) -> Result<CutSet> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::input(format!("resolution must lie in (0,1], got {r}")));
    }
    let p = ifs.maps.len();
    let mut words = Vec::new();
    // Stack of (letters, ratio) still to expand; children pushed in reverse
    // so the pop order is lexicographic.
    let mut stack: Vec<(Vec<u16>, f64)> = Vec::new();
    for k in (1..=p).rev() {
        stack.push((vec![k as u16], ifs.maps[k - 1].ratio));
    }
    while let Some((letters, ratio)) = stack.pop() {
        if ratio <= r || r >= 1.0 {
            if words.len() == cap {
                return Err(Error::Resource(format!(
                    "cut set at resolution {r} exceeds the cardinality cap {cap}"
                )));
            }
            words.push(Word { letters, ratio });
        } else {
            for k in (1..=p).rev() {
                let mut child = letters.clone();
                child.push(k as u16);
                stack.push((child, ratio * ifs.maps[k - 1].ratio));
            }
        }
    }
    Ok(CutSet { resolution: r, words })
}

/// S_w(base); when base lies on the attractor the result lies in the cell
/// K_w = S_w(K).
pub fn anchor_point(ifs: &IfsSystem, w: &Word, base: &[f64]) -> Result<Vec<f64>> {
    if base.len() != ifs.dimension {
        return Err(Error::input(format!(
            "base point has dimension {}, system expects {}",
            base.len(),
            ifs.dimension
        )));
    }
    let mut x = base.to_vec();
    // Apply right-to-left: S_w(x) = S_{w1}(S_{w2}(...S_{wn}(x))).
    for &letter in w.letters.iter().rev() {
        let idx = letter as usize;
        if idx == 0 || idx > ifs.maps.len() {
            return Err(Error::input(format!(
                "word letter {idx} outside 1..={}",
                ifs.maps.len()
            )));
        }
        x = ifs.maps[idx - 1].apply(&x)?;
    }
    Ok(x)
}

/// One anchor per cut-set word at resolution R; an |K|·R-dense sample of K.
pub fn sample_attractor(ifs: &IfsSystem, r: f64, base: &[f64]) -> Result<Vec<Vec<f64>>> {
    let cs = cut_set(ifs, r)?;
    cs.words.iter().map(|w| anchor_point(ifs, w, base)).collect()
}

/// Exhaustively verify prefix-freeness and covering: every word of length
/// `depth` has exactly one prefix in the family. Intended for tests and
/// small families (p^depth enumeration).
pub fn check_prefix_free_covering(ifs: &IfsSystem, cs: &CutSet, depth: usize) -> Result<()> {
    let set: HashSet<&[u16]> = cs.words.iter().map(|w| w.letters.as_slice()).collect();
    if set.len() != cs.words.len() {
        return Err(Error::Internal("cut set contains duplicate words".into()));
    }
    for w in &cs.words {
        if w.len() > depth {
            return Err(Error::input(format!(
                "check depth {depth} shorter than longest cut-set word {}",
                w.len()
            )));
        }
    }
    let p = ifs.maps.len();
    let total = (p as u128).pow(depth as u32);
    if total > 2_000_000 {
        return Err(Error::Resource(format!(
            "exhaustive covering check over {total} words refused"
        )));
    }
    let mut current = vec![1u16; depth];
    loop {
        let mut hits = 0;
        for l in 0..=depth {
            if set.contains(&current[..l]) {
                hits += 1;
            }
        }
        if hits != 1 {
            return Err(Error::Internal(format!(
                "word {:?} has {hits} prefixes in the cut set, expected exactly 1",
                current
            )));
        }
        // Odometer increment over {1..p}^depth.
        let mut pos = depth;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            if (current[pos] as usize) < p {
                current[pos] += 1;
                for v in current.iter_mut().skip(pos + 1) {
                    *v = 1;
                }
                break;
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IfsFile {
    name: String,
    dimension: usize,
    maps: Vec<MapSpec>,
    osc: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MapSpec {
    ratio: f64,
    #[serde(default)]
    matrix: Option<Vec<Vec<f64>>>,
    translation: Vec<f64>,
}

/// Load a system from its JSON description:
/// `{ "name": str, "dimension": int, "maps": [ { "ratio": float,
/// "matrix": [[float]] (optional, default identity), "translation": [float] } ],
/// "osc": bool }`.
pub fn load_ifs_json(text: &str) -> Result<IfsSystem> {
    let file: IfsFile =
        serde_json::from_str(text).map_err(|e| Error::input(format!("IFS file: {e}")))?;
    let d = file.dimension;
    let mut maps = Vec::with_capacity(file.maps.len());
    for (i, spec) in file.maps.into_iter().enumerate() {
        if spec.translation.len() != d {
            return Err(Error::input(format!(
                "map {}: translation has dimension {}, system declares {d}",
                i + 1,
                spec.translation.len()
            )));
        }
        let sim = match spec.matrix {
            None => Similitude::axis_aligned(spec.ratio, spec.translation)?,
            Some(rows) => {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(Error::input(format!("map {}: matrix must be {d}x{d}", i + 1)));
                }
                let flat: Vec<f64> = rows.into_iter().flatten().collect();
                Similitude::new(spec.ratio, flat, spec.translation)?
            }
        };
        maps.push(sim);
    }
    IfsSystem::new(file.name, d, maps, file.osc)
}

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn cantor() -> IfsSystem {
        IfsSystem::new(
            "cantor",
            1,
            vec![
                Similitude::axis_aligned(1.0 / 3.0, vec![0.0]).unwrap(),
                Similitude::axis_aligned(1.0 / 3.0, vec![2.0 / 3.0]).unwrap(),
            ],
            true,
        )
        .unwrap()
    }

    fn segment() -> IfsSystem {
        IfsSystem::new(
            "segment",
            1,
            vec![
                Similitude::axis_aligned(0.5, vec![0.0]).unwrap(),
                Similitude::axis_aligned(0.5, vec![0.5]).unwrap(),
            ],
            true,
        )
        .unwrap()
    }

    #[test]
    fn apply_fixed_points_and_arithmetic() {
        let ifs = cantor();
        assert_eq!(ifs.maps[0].apply(&[0.0]).unwrap(), vec![0.0]);
        assert_eq!(ifs.maps[1].apply(&[1.0]).unwrap(), vec![1.0]);
        let y = ifs.maps[0].apply(&[0.9]).unwrap()[0];
        assert!((y - 0.3).abs() < 1e-15);
        assert!(ifs.maps[0].apply(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn rejects_bad_ratio_and_matrix() {
        assert!(Similitude::axis_aligned(1.0, vec![0.0]).is_err());
        assert!(Similitude::axis_aligned(0.0, vec![0.0]).is_err());
        assert!(Similitude::new(0.5, vec![1.0, 0.0, 0.0, 0.9], vec![0.0, 0.0]).is_err());
        // A rotation is accepted.
        let th = 0.7f64;
        let rot = vec![th.cos(), -th.sin(), th.sin(), th.cos()];
        assert!(Similitude::new(0.5, rot, vec![0.1, 0.2]).is_ok());
    }

    #[test]
    fn word_composition_matches_hand_results() {
        let ifs = cantor();
        let id = compose_word(&ifs, &Word::empty()).unwrap();
        assert_eq!(id.ratio, 1.0);
        assert_eq!(id.apply(&[0.37]).unwrap(), vec![0.37]);

        let w12 = Word { letters: vec![1, 2], ratio: 1.0 / 9.0 };
        let s = compose_word(&ifs, &w12).unwrap();
        assert!((s.ratio - 1.0 / 9.0).abs() < 1e-15);
        // x/9 + 2/9
        assert!((s.apply(&[0.0]).unwrap()[0] - 2.0 / 9.0).abs() < 1e-15);
        assert!((s.apply(&[1.0]).unwrap()[0] - 3.0 / 9.0).abs() < 1e-15);

        let seg = segment();
        let w21 = Word { letters: vec![2, 1], ratio: 0.25 };
        let s = compose_word(&seg, &w21).unwrap();
        // x/4 + 1/2
        assert!((s.ratio - 0.25).abs() < 1e-15);
        assert!((s.apply(&[0.0]).unwrap()[0] - 0.5).abs() < 1e-15);
        assert!((s.apply(&[1.0]).unwrap()[0] - 0.75).abs() < 1e-15);

        let bad = Word { letters: vec![3], ratio: 0.5 };
        assert!(compose_word(&ifs, &bad).is_err());
    }

    #[test]
    fn scaling_exactness_random_words() {
        let th = 0.31f64;
        let rot = vec![th.cos(), -th.sin(), th.sin(), th.cos()];
        let ifs = IfsSystem::new(
            "planar",
            2,
            vec![
                Similitude::new(0.4, rot.clone(), vec![0.0, 0.1]).unwrap(),
                Similitude::axis_aligned(0.35, vec![0.6, 0.0]).unwrap(),
                Similitude::new(0.25, rot, vec![0.2, 0.7]).unwrap(),
            ],
            true,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let len = rng.gen_range(0..=12);
            let letters: Vec<u16> = (0..len).map(|_| rng.gen_range(1..=3)).collect();
            let mut ratio = 1.0;
            for &l in &letters {
                ratio *= ifs.maps[l as usize - 1].ratio;
            }
            let w = Word { letters, ratio };
            let s = compose_word(&ifs, &w).unwrap();
            let x = vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let y = vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let dxy = euclid(&x, &y);
            if dxy < 1e-9 {
                continue;
            }
            let dimg = euclid(&s.apply(&x).unwrap(), &s.apply(&y).unwrap());
            assert!(
                (dimg / dxy - w.ratio).abs() <= 1e-9 * w.ratio.max(1e-300),
                "scaling breached: {} vs {}",
                dimg / dxy,
                w.ratio
            );
        }
    }

    #[test]
    fn moran_closed_forms() {
        let s = moran_dimension(&[1.0 / 3.0, 1.0 / 3.0], 1e-12).unwrap();
        assert!((s - 2f64.ln() / 3f64.ln()).abs() < 1e-9);
        let s = moran_dimension(&[0.5, 0.5, 0.5], 1e-12).unwrap();
        assert!((s - 3f64.ln() / 2f64.ln()).abs() < 1e-9);
        assert_eq!(moran_dimension(&[0.7], 1e-12).unwrap(), 0.0);
        assert!(moran_dimension(&[], 1e-12).is_err());
        assert!(moran_dimension(&[0.5, 1.1], 1e-12).is_err());
        assert!(moran_dimension(&[0.5, 0.5], 0.0).is_err());
    }

    #[test]
    fn moran_monotone_in_each_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.gen_range(2..6);
            let ratios: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..0.6)).collect();
            let s0 = moran_dimension(&ratios, 1e-12).unwrap();
            let k = rng.gen_range(0..n);
            let mut bumped = ratios.clone();
            bumped[k] = (bumped[k] + 0.05).min(0.95);
            let s1 = moran_dimension(&bumped, 1e-12).unwrap();
            assert!(s1 > s0, "raising a ratio must raise the dimension");
        }
    }

    #[test]
    fn cut_set_hand_cases() {
        let ifs = cantor();
        let cs = cut_set(&ifs, 0.5).unwrap();
        assert_eq!(cs.words.len(), 2);
        assert!(cs.words.iter().all(|w| w.len() == 1));

        let cs = cut_set(&ifs, 0.2).unwrap();
        assert_eq!(cs.words.len(), 4);
        assert!(cs.words.iter().all(|w| w.len() == 2));

        let mixed = IfsSystem::new(
            "mixed",
            1,
            vec![
                Similitude::axis_aligned(0.5, vec![0.0]).unwrap(),
                Similitude::axis_aligned(0.25, vec![0.75]).unwrap(),
            ],
            true,
        )
        .unwrap();
        let cs = cut_set(&mixed, 0.25).unwrap();
        let labels: Vec<String> = cs.words.iter().map(|w| w.label()).collect();
        assert_eq!(labels, vec!["11", "12", "2"]);

        // R = 1 convention: the p length-1 words.
        let cs = cut_set(&ifs, 1.0).unwrap();
        assert_eq!(cs.words.len(), 2);
        assert!(cs.words.iter().all(|w| w.len() == 1));

        assert!(cut_set(&ifs, 0.0).is_err());
        assert!(cut_set(&ifs, 1.5).is_err());
        assert!(matches!(
            cut_set_capped(&ifs, 0.001, 10),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn cut_set_structure_and_partition() {
        let ifs = cantor();
        let s = ifs.dimension_value(1e-12).unwrap();
        for k in 1..=8 {
            let mut r = 1.0;
            for _ in 0..k {
                r *= 1.0 / 3.0;
            }
            let cs = cut_set(&ifs, r).unwrap();
            assert_eq!(cs.words.len(), 1usize << k);
            assert!((cs.partition_of_unity(s) - 1.0).abs() < 1e-9);
            let max_len = cs.words.iter().map(Word::len).max().unwrap();
            check_prefix_free_covering(&ifs, &cs, max_len + 1).unwrap();
        }
        // Stopping rule explicitly: ratio <= R < parent ratio.
        let cs = cut_set(&ifs, 0.1).unwrap();
        for w in &cs.words {
            assert!(w.ratio <= 0.1);
            assert!(w.ratio * 3.0 > 0.1);
        }
    }

    #[test]
    fn anchors_and_samples() {
        let ifs = cantor();
        let base = ifs.default_base();
        assert_eq!(base, vec![0.0]);
        let w = Word { letters: vec![2], ratio: 1.0 / 3.0 };
        assert!((anchor_point(&ifs, &w, &base).unwrap()[0] - 2.0 / 3.0).abs() < 1e-15);
        let w = Word { letters: vec![2, 1], ratio: 1.0 / 9.0 };
        assert!((anchor_point(&ifs, &w, &base).unwrap()[0] - 2.0 / 3.0).abs() < 1e-15);

        let pts = sample_attractor(&ifs, 0.5, &base).unwrap();
        assert_eq!(pts, vec![vec![0.0], vec![2.0 / 3.0]]);
        let pts = sample_attractor(&ifs, 1.0, &base).unwrap();
        assert_eq!(pts, vec![vec![0.0], vec![2.0 / 3.0]]);

        let seg = segment();
        let pts = sample_attractor(&seg, 0.25, &seg.default_base()).unwrap();
        assert_eq!(pts, vec![vec![0.0], vec![0.25], vec![0.5], vec![0.75]]);
    }

    #[test]
    fn normalization_unit_cube() {
        let ifs = cantor();
        let norm = ifs.normalization();
        assert!((norm.scale - 1.0).abs() < 1e-12);
        assert!(norm.offset[0].abs() < 1e-12);

        // Shifted/scaled variant normalizes onto the same coordinates.
        let shifted = IfsSystem::new(
            "cantor-shifted",
            1,
            vec![
                Similitude::axis_aligned(1.0 / 3.0, vec![4.0]).unwrap(),
                Similitude::axis_aligned(1.0 / 3.0, vec![4.0 + 10.0 * 2.0 / 3.0]).unwrap(),
            ],
            true,
        )
        .unwrap();
        let n2 = shifted.normalization();
        let base = shifted.default_base();
        let w = Word { letters: vec![2], ratio: 1.0 / 3.0 };
        let a = anchor_point(&shifted, &w, &base).unwrap();
        let u = n2.to_unit(&a);
        assert!((u[0] - 2.0 / 3.0).abs() < 1e-12);
        let back = n2.from_unit(&u);
        assert!((back[0] - a[0]).abs() < 1e-9);

        // One-point attractor stays centered.
        let point = IfsSystem::new(
            "point",
            1,
            vec![Similitude::axis_aligned(0.5, vec![0.0]).unwrap()],
            true,
        )
        .unwrap();
        let np = point.normalization();
        assert_eq!(np.scale, 1.0);
        assert!((np.to_unit(&[0.0])[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn loader_round_trip_and_validation() {
        let text = r#"{
            "name": "cantor",
            "dimension": 1,
            "maps": [
                { "ratio": 0.3333333333333333, "translation": [0.0] },
                { "ratio": 0.3333333333333333, "translation": [0.6666666666666666] }
            ],
            "osc": true
        }"#;
        let ifs = load_ifs_json(text).unwrap();
        assert_eq!(ifs.map_count(), 2);
        assert!(ifs.declared_osc);

        let bad = text.replace("\"osc\": true", "\"osc\": true, \"extra\": 1");
        assert!(load_ifs_json(&bad).is_err());

        let nonorth = r#"{
            "name": "x", "dimension": 2,
            "maps": [ { "ratio": 0.5, "matrix": [[1.0, 0.0], [0.0, 0.9]], "translation": [0.0, 0.0] } ],
            "osc": false
        }"#;
        assert!(load_ifs_json(nonorth).is_err());
    }
}

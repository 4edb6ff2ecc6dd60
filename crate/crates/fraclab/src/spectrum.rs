//! Multifractal analysis pipeline: dyadic histograms, the Lq partition
//! spectrum and its Legendre transform, a coarse large-deviation spectrum,
//! local Holder regression, lower s-density, greedy packing numbers with the
//! box-dimension fit, and the finite-scale verifiers for anchor-ball mass
//! bounds, the formalism identities, and cascade mass scaling.
//!
//! Every liminf/limsup quantity is reported twice: a window extremum over
//! the analyzed levels (the finite-scale stand-in for the limit) and a
//! least-squares scaling fit. Consumers that need a single number should
//! bind the fit; the extremum qualifies it.

use crate::cascade::{cascade_to_atomic, CascadeTree};
use crate::error::{Error, Result};
use crate::ifs::{euclid, sample_attractor, IfsSystem};
use crate::measure::{ball_mass, kahan_sum, AtomicMeasure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Box indices are built with exact f64 floor arithmetic; 40 doublings keep
/// coordinate*2^j well inside the integer-exact range.
pub const MAX_HISTOGRAM_LEVEL: u32 = 40;

/// Masses of a measure aggregated over the half-open dyadic grid at one
/// level: box k covers prod_i [k_i 2^-j, (k_i+1) 2^-j), with coordinate
/// exactly 1 assigned to the top box. Only nonempty boxes are stored; their
/// masses are positive and sum to the total mass of the input.
#[derive(Debug, Clone)]
pub struct DyadicHistogram {
    pub level: u32,
    boxes: BTreeMap<Vec<i64>, f64>,
}

impl DyadicHistogram {
    pub fn boxes(&self) -> &BTreeMap<Vec<i64>, f64> {
        &self.boxes
    }

    pub fn nonempty_count(&self) -> usize {
        self.boxes.len()
    }

    pub fn total_mass(&self) -> f64 {
        kahan_sum(self.boxes.values().copied())
    }
}

pub fn dyadic_histogram(mu: &AtomicMeasure, j: u32) -> Result<DyadicHistogram> {
    if j > MAX_HISTOGRAM_LEVEL {
        return Err(Error::input(format!(
            "histogram level {j} exceeds the cap {MAX_HISTOGRAM_LEVEL}"
        )));
    }
    let scale = 2f64.powi(j as i32);
    let top = (1i64 << j) - 1;
    let mut boxes: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
    for (pt, m) in mu.atoms() {
        let mut key = Vec::with_capacity(pt.len());
        for &x in pt {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::input(format!(
                    "coordinate {x} lies outside the unit cube; normalize the measure first"
                )));
            }
            key.push(if x == 1.0 { top } else { (x * scale).floor() as i64 });
        }
        *boxes.entry(key).or_insert(0.0) += m;
    }
    Ok(DyadicHistogram { level: j, boxes })
}

/// Largest absolute mass discrepancy when the finer histogram is aggregated
/// onto the coarser grid; refinement consistency means this stays below
/// 1e-12.
pub fn refinement_gap(coarse: &DyadicHistogram, fine: &DyadicHistogram) -> Result<f64> {
    if fine.level < coarse.level {
        return Err(Error::input("refinement check needs fine.level >= coarse.level"));
    }
    let shift = fine.level - coarse.level;
    let div = 1i64 << shift;
    let mut agg: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
    for (k, &m) in &fine.boxes {
        let parent: Vec<i64> = k.iter().map(|&c| c.div_euclid(div)).collect();
        *agg.entry(parent).or_insert(0.0) += m;
    }
    let mut worst: f64 = 0.0;
    for (k, &m) in &coarse.boxes {
        worst = worst.max((m - agg.get(k).copied().unwrap_or(0.0)).abs());
    }
    for (k, &m) in &agg {
        if !coarse.boxes.contains_key(k) {
            worst = worst.max(m.abs());
        }
    }
    Ok(worst)
}

/// Sum of box masses raised to the power q; q = 0 counts nonempty boxes and
/// q = 1 returns the total mass.
pub fn partition_sum(h: &DyadicHistogram, q: f64) -> f64 {
    if q == 0.0 {
        h.nonempty_count() as f64
    } else if q == 1.0 {
        h.total_mass()
    } else {
        kahan_sum(h.boxes.values().map(|m| m.powf(q)))
    }
}

/// Signed slack of the concavity bound sum mu(Q)^q <= (#boxes)^(1-q): the
/// returned gap is <= 0 up to rounding for every measure and q in [0, 1].
pub fn concavity_bound_gap(h: &DyadicHistogram, q: f64) -> f64 {
    partition_sum(h, q) - (h.nonempty_count() as f64).powf(1.0 - q)
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct FitMeta {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fitted line.
    pub residual: f64,
}

/// Ordinary least squares; None when fewer than two points or the x values
/// carry no variance.
pub fn least_squares(pairs: &[(f64, f64)]) -> Option<FitMeta> {
    let n = pairs.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let xbar = pairs.iter().map(|p| p.0).sum::<f64>() / nf;
    let ybar = pairs.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = pairs.iter().map(|p| (p.0 - xbar) * (p.0 - xbar)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pairs.iter().map(|p| (p.0 - xbar) * (p.1 - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let mse = pairs
        .iter()
        .map(|p| {
            let e = p.1 - (intercept + slope * p.0);
            e * e
        })
        .sum::<f64>()
        / nf;
    Some(FitMeta { slope, intercept, residual: mse.sqrt() })
}

/// Inclusive window of histogram levels.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct LevelWindow {
    pub lo: u32,
    pub hi: u32,
}

impl LevelWindow {
    pub fn new(lo: u32, hi: u32) -> Result<Self> {
        if lo < 1 || lo > hi || hi > MAX_HISTOGRAM_LEVEL {
            return Err(Error::input(format!(
                "level window must satisfy 1 <= lo <= hi <= {MAX_HISTOGRAM_LEVEL}, got {lo}..{hi}"
            )));
        }
        Ok(LevelWindow { lo, hi })
    }

    pub fn levels(&self) -> impl Iterator<Item = u32> {
        self.lo..=self.hi
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SpectrumPoint {
    pub x: f64,
    /// Headline value: regression slope where a fit exists, otherwise the
    /// window statistic.
    pub value: f64,
    /// Window minimum of the per-level values (finite-scale liminf proxy).
    pub window_min: Option<f64>,
    /// Raw per-level values (j, value at level j), when applicable.
    pub per_level: Vec<(u32, f64)>,
    pub fit: Option<FitMeta>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SpectrumCurve {
    pub axis: String,
    pub points: Vec<SpectrumPoint>,
    /// Set when the analysis window reaches below the atom-resolution floor
    /// of the input measure, where box statistics describe the
    /// discretization instead of the measure.
    pub resolution_flagged: bool,
}

impl SpectrumCurve {
    pub fn new(axis: &str, points: Vec<SpectrumPoint>, resolution_flagged: bool) -> Result<Self> {
        for w in points.windows(2) {
            if !(w[0].x < w[1].x) {
                return Err(Error::input("curve x values must be strictly increasing"));
            }
        }
        for p in &points {
            let finite = p.x.is_finite()
                && p.value.is_finite()
                && p.window_min.map_or(true, f64::is_finite)
                && p.per_level.iter().all(|(_, v)| v.is_finite());
            if !finite {
                return Err(Error::input(format!("non-finite curve value at x = {}", p.x)));
            }
        }
        Ok(SpectrumCurve { axis: axis.to_string(), points, resolution_flagged })
    }
}

fn finer_than_resolution(mu: &AtomicMeasure, hi: u32) -> bool {
    let floor = mu.resolution_floor();
    floor > 0.0 && 2f64.powi(-(hi as i32)) < floor
}

/// Lq partition spectrum. For each q the per-level values are
/// T_j(q) = -log2(partition_sum)/j; the headline value is the least-squares
/// slope of -log2(partition_sum) against j, and the window minimum of T_j is
/// kept as the liminf proxy.
pub fn tau_estimate(mu: &AtomicMeasure, window: LevelWindow, q_grid: &[f64]) -> Result<SpectrumCurve> {
    if q_grid.is_empty() {
        return Err(Error::input("tau estimation needs a non-empty q grid"));
    }
    let hists: Vec<DyadicHistogram> =
        window.levels().map(|j| dyadic_histogram(mu, j)).collect::<Result<_>>()?;
    let mut points = Vec::with_capacity(q_grid.len());
    for &q in q_grid {
        let mut per_level = Vec::with_capacity(hists.len());
        let mut log_pairs = Vec::with_capacity(hists.len());
        for h in &hists {
            let a = -partition_sum(h, q).log2();
            per_level.push((h.level, a / h.level as f64));
            log_pairs.push((h.level as f64, a));
        }
        let fit = least_squares(&log_pairs);
        let window_min = per_level.iter().map(|&(_, t)| t).fold(f64::INFINITY, f64::min);
        let value = fit.map_or(window_min, |f| f.slope);
        points.push(SpectrumPoint { x: q, value, window_min: Some(window_min), per_level, fit });
    }
    SpectrumCurve::new("q", points, finer_than_resolution(mu, window.hi))
}

/// Grid-exact Legendre transform min over sampled q of (q h - tau(q)),
/// evaluated on the headline values of the tau curve.
pub fn legendre_transform(tau: &SpectrumCurve, h_grid: &[f64]) -> Result<SpectrumCurve> {
    if tau.points.is_empty() || h_grid.is_empty() {
        return Err(Error::input("legendre transform needs non-empty tau and h grids"));
    }
    let points = h_grid
        .iter()
        .map(|&h| {
            let value = tau
                .points
                .iter()
                .map(|p| p.x * h - p.value)
                .fold(f64::INFINITY, f64::min);
            SpectrumPoint { x: h, value, window_min: None, per_level: Vec::new(), fit: None }
        })
        .collect();
    SpectrumCurve::new("h", points, false)
}

/// Coarse (large-deviation) spectrum. At level j a box with mass m has
/// exponent -log2(m)/j; bin h collects exponents in (h-eps, h+eps] and
/// contributes f_j(h) = log2(count)/j. The headline value per bin is the
/// window maximum. Bins that would rest on a single box are suppressed
/// unless that box is the whole histogram.
pub fn coarse_spectrum(
    mu: &AtomicMeasure,
    window: LevelWindow,
    h_bins: &[f64],
    eps: f64,
) -> Result<SpectrumCurve> {
    if !(eps > 0.0) {
        return Err(Error::input(format!("coarse spectrum needs eps > 0, got {eps}")));
    }
    let mut samples: Vec<Vec<(u32, f64)>> = vec![Vec::new(); h_bins.len()];
    for j in window.levels() {
        let hist = dyadic_histogram(mu, j)?;
        let exponents: Vec<f64> =
            hist.boxes.values().map(|m| -m.log2() / j as f64).collect();
        let keep_floor = 2usize.min(hist.nonempty_count());
        for (bin, &h) in h_bins.iter().enumerate() {
            let count = exponents.iter().filter(|&&x| x > h - eps && x <= h + eps).count();
            if count >= keep_floor && count > 0 {
                samples[bin].push((j, (count as f64).log2() / j as f64));
            }
        }
    }
    let points = h_bins
        .iter()
        .zip(samples)
        .filter(|(_, s)| !s.is_empty())
        .map(|(&h, per_level)| {
            let value = per_level.iter().map(|&(_, v)| v).fold(f64::NEG_INFINITY, f64::max);
            SpectrumPoint { x: h, value, window_min: None, per_level, fit: None }
        })
        .collect();
    SpectrumCurve::new("h", points, finer_than_resolution(mu, window.hi))
}

/// Local mass-scaling regression at one point. Radii must stay above the
/// atom-resolution floor so the estimate reflects the measure rather than
/// its discretization; masses are non-increasing as the radii shrink.
#[derive(Debug, Clone, serde::Serialize)]
pub struct HolderEstimate {
    pub point: Vec<f64>,
    pub radii: Vec<f64>,
    /// (ln r, ln mass) pairs in the input radius order.
    pub log_pairs: Vec<(f64, f64)>,
    /// Least-squares slope of ln mass against ln r.
    pub slope: f64,
    /// Minimum consecutive chord slope: the finite-scale liminf proxy.
    pub min_chord: f64,
}

fn validated_ball_masses(
    mu: &AtomicMeasure,
    x: &[f64],
    radii: &[f64],
) -> Result<Vec<f64>> {
    if radii.len() < 2 {
        return Err(Error::input("scaling estimates need at least two radii"));
    }
    for w in radii.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::input("radii must be strictly decreasing"));
        }
    }
    let smallest = *radii.last().unwrap();
    if !(smallest > 0.0) {
        return Err(Error::input("radii must be positive"));
    }
    let floor = mu.resolution_floor();
    if floor > 0.0 && smallest <= floor {
        return Err(Error::input(format!(
            "radius {smallest} is not above the atom-resolution floor {floor}; \
             rebuild the measure at finer resolution or drop the smallest radii"
        )));
    }
    radii
        .iter()
        .map(|&r| {
            let m = ball_mass(mu, x, r)?;
            if m == 0.0 {
                return Err(Error::Estimation(format!(
                    "ball of radius {r} carries no mass: the point is off the support at that scale"
                )));
            }
            Ok(m)
        })
        .collect()
}

pub fn local_holder(mu: &AtomicMeasure, x: &[f64], radii: &[f64]) -> Result<HolderEstimate> {
    let masses = validated_ball_masses(mu, x, radii)?;
    let log_pairs: Vec<(f64, f64)> =
        radii.iter().zip(&masses).map(|(&r, &m)| (r.ln(), m.ln())).collect();
    let slope = least_squares(&log_pairs).expect("two distinct radii give a fit").slope;
    let min_chord = log_pairs
        .windows(2)
        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
        .fold(f64::INFINITY, f64::min);
    Ok(HolderEstimate { point: x.to_vec(), radii: radii.to_vec(), log_pairs, slope, min_chord })
}

/// Finite-scale lower s-density proxy: the minimum over the given radii of
/// (2r)^-s * mass of the closed ball B(a, r).
pub fn lower_density(lambda: &AtomicMeasure, a: &[f64], s: f64, radii: &[f64]) -> Result<f64> {
    if !s.is_finite() {
        return Err(Error::input(format!("density exponent must be finite, got {s}")));
    }
    let masses = validated_ball_masses(lambda, a, radii)?;
    Ok(radii
        .iter()
        .zip(&masses)
        .map(|(&r, &m)| (2.0 * r).powf(-s) * m)
        .fold(f64::INFINITY, f64::min))
}

/// Greedy maximal family of points with pairwise distance > 2r, kept in
/// input order. The count is the packing-number proxy at radius r: every
/// rejected input point sits within 2r of a kept one.
pub fn packing_centers(points: &[Vec<f64>], r: f64) -> Result<Vec<Vec<f64>>> {
    if points.is_empty() {
        return Err(Error::input("packing needs at least one point"));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::input(format!("packing radius must be positive, got {r}")));
    }
    let dim = points[0].len();
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for p in points {
        if p.len() != dim {
            return Err(Error::input("packing points must share one dimension"));
        }
        if kept.iter().all(|k| euclid(k, p) > 2.0 * r) {
            kept.push(p.clone());
        }
    }
    Ok(kept)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct BoxDimensionEstimate {
    pub estimate: f64,
    pub fit: FitMeta,
    /// Packing count per requested radius.
    pub counts: Vec<(f64, usize)>,
    /// Resolution of the attractor sample backing the counts.
    pub sample_resolution: f64,
    pub sample_size: usize,
}

/// Upper box dimension via packing counts: slope of ln(count) against
/// -ln r over the given radii. The attractor is sampled ten times finer
/// than the smallest radius so the greedy counts are faithful.
pub fn upper_box_dimension(ifs: &IfsSystem, r_list: &[f64]) -> Result<BoxDimensionEstimate> {
    if r_list.len() < 2 {
        return Err(Error::input("box dimension needs at least two radii"));
    }
    for w in r_list.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::input("radii must be strictly decreasing"));
        }
    }
    let smallest = *r_list.last().unwrap();
    if !(smallest > 0.0 && r_list[0].is_finite()) {
        return Err(Error::input("radii must be positive and finite"));
    }
    let sample_resolution = smallest / 10.0;
    let base = ifs.default_base();
    let norm = ifs.normalization();
    let sample = sample_attractor(ifs, sample_resolution, &base)?;
    let unit: Vec<Vec<f64>> = sample.iter().map(|p| norm.to_unit(p)).collect();
    let mut counts = Vec::with_capacity(r_list.len());
    let mut pairs = Vec::with_capacity(r_list.len());
    for &r in r_list {
        let n = packing_centers(&unit, r)?.len();
        counts.push((r, n));
        pairs.push((-(r.ln()), (n as f64).ln()));
    }
    let fit = least_squares(&pairs).expect("two distinct radii give a fit");
    Ok(BoxDimensionEstimate {
        estimate: fit.slope,
        fit,
        counts,
        sample_resolution,
        sample_size: unit.len(),
    })
}

/// Anchor-ball mass verification at one scale. For every cut-set anchor x at
/// resolution 2^-J the ratio mu(B(x, 2*2^-theta*J)) * 2^(s(1+eps)J) is
/// computed; the minimum plays the role of the empirical lower-bound
/// constant and must be positive for the mass bound to hold at this scale.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AnchorMassReport {
    pub theta: f64,
    pub level_j: u32,
    pub s: f64,
    pub eps: f64,
    pub ball_radius: f64,
    /// 2^(s(1+eps)J), the normalization applied to every ball mass.
    pub scale_factor: f64,
    pub anchor_count: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub positive: bool,
}

pub fn verify_anchor_mass(
    mu: &AtomicMeasure,
    ifs: &IfsSystem,
    theta: f64,
    j: u32,
    s: f64,
    eps: f64,
) -> Result<AnchorMassReport> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::input(format!("theta must be positive, got {theta}")));
    }
    if !(s > 0.0 && s.is_finite()) || !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::input("anchor mass check needs s > 0 and eps >= 0"));
    }
    if j == 0 {
        return Err(Error::input("anchor mass check needs J >= 1"));
    }
    let theta_scale = 2f64.powf(-theta * j as f64);
    let floor = mu.resolution_floor();
    if floor > 0.0 && floor >= theta_scale {
        return Err(Error::input(format!(
            "measure resolution floor {floor} is not finer than 2^-theta*J = {theta_scale}; \
             rebuild the measure at finer resolution"
        )));
    }
    let anchors = crate::cascade::level_anchor_family(ifs, j)?;
    let ball_radius = 2.0 * theta_scale;
    let scale_factor = 2f64.powf(s * (1.0 + eps) * j as f64);
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = f64::NEG_INFINITY;
    for (_, anchor) in &anchors {
        let ratio = ball_mass(mu, anchor, ball_radius)? * scale_factor;
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
    }
    Ok(AnchorMassReport {
        theta,
        level_j: j,
        s,
        eps,
        ball_radius,
        scale_factor,
        anchor_count: anchors.len(),
        min_ratio,
        max_ratio,
        positive: min_ratio > 0.0,
    })
}

/// Combined formalism verification: tau against the line s(q-1), the
/// Legendre transform against the diagonal h, and the exact concavity bound
/// partition_sum(q) <= (#boxes)^(1-q) at every level and grid q.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FormalismReport {
    pub s: f64,
    pub tol: f64,
    pub tau: SpectrumCurve,
    pub tau_dev_max: f64,
    pub legendre: SpectrumCurve,
    pub legendre_dev_max: f64,
    pub concavity_ok: bool,
    /// Worst value of partition_sum - bound; <= 1e-12 when the bound holds.
    pub concavity_worst_gap: f64,
    pub pass: bool,
}

pub fn verify_formalism(
    mu: &AtomicMeasure,
    s: f64,
    q_grid: &[f64],
    h_grid: &[f64],
    window: LevelWindow,
    tol: f64,
) -> Result<FormalismReport> {
    if q_grid.is_empty() || h_grid.is_empty() {
        return Err(Error::input("formalism verification needs non-empty grids"));
    }
    if let Some(&q) = q_grid.iter().find(|&&q| !(0.0..=1.0).contains(&q)) {
        return Err(Error::input(format!(
            "formalism q grid must stay within [0, 1], got {q}"
        )));
    }
    if !(s > 0.0 && s.is_finite()) || !(tol > 0.0) {
        return Err(Error::input("formalism verification needs s > 0 and tol > 0"));
    }
    let tau = tau_estimate(mu, window, q_grid)?;
    let tau_dev_max = tau
        .points
        .iter()
        .map(|p| (p.value - s * (p.x - 1.0)).abs())
        .fold(0.0, f64::max);
    let legendre = legendre_transform(&tau, h_grid)?;
    let legendre_dev_max = legendre
        .points
        .iter()
        .map(|p| (p.value - p.x).abs())
        .fold(0.0, f64::max);
    let mut concavity_worst_gap = f64::NEG_INFINITY;
    for j in window.levels() {
        let hist = dyadic_histogram(mu, j)?;
        for &q in q_grid {
            concavity_worst_gap = concavity_worst_gap.max(concavity_bound_gap(&hist, q));
        }
    }
    let concavity_ok = concavity_worst_gap <= 1e-12;
    let pass = tau_dev_max <= tol && legendre_dev_max <= tol && concavity_ok;
    Ok(FormalismReport {
        s,
        tol,
        tau,
        tau_dev_max,
        legendre,
        legendre_dev_max,
        concavity_ok,
        concavity_worst_gap,
        pass,
    })
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct LevelScaling {
    /// 1-based stage index p.
    pub stage: usize,
    pub j: u32,
    pub cells: usize,
    /// Range of per-cell exponents -log2(mass)/J.
    pub exponent_min: f64,
    pub exponent_max: f64,
    /// Stage window [s(1-2/p), s(1+1/p)].
    pub window_lo: f64,
    pub window_hi: f64,
    pub cells_in_window: usize,
    /// max(|exponent_min - s|, |exponent_max - s|).
    pub deviation_from_s: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CascadeScalingReport {
    pub s: f64,
    pub theta: f64,
    pub levels: Vec<LevelScaling>,
    /// Exponent s/theta - 2/(p-1) used for the sampled-ball bound, with p
    /// the deepest built stage.
    pub ball_exponent: f64,
    /// max over sampled balls of mass(B) / |B|^ball_exponent: the empirical
    /// constant of the mass bound.
    pub empirical_c: f64,
    pub sampled_balls: usize,
    pub seed: u64,
}

/// Mass-scaling diagnostics for a cascade: per-cell exponents with the
/// per-stage window check (informational away from the asymptotic regime),
/// plus an empirical constant from seeded random balls against the deepest
/// level of the cascade.
pub fn cascade_scaling_check(tree: &CascadeTree, s: f64, seed: u64) -> Result<CascadeScalingReport> {
    if tree.depth() < 2 {
        return Err(Error::input("cascade scaling check needs depth >= 2"));
    }
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::input(format!("scaling check needs s > 0, got {s}")));
    }
    let mut levels = Vec::with_capacity(tree.depth());
    for (idx, level) in tree.levels.iter().enumerate() {
        let p = idx + 1;
        let jf = level.j as f64;
        let exps: Vec<f64> = level.balls.iter().map(|b| -b.mass.log2() / jf).collect();
        let exponent_min = exps.iter().copied().fold(f64::INFINITY, f64::min);
        let exponent_max = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let window_lo = s * (1.0 - 2.0 / p as f64);
        let window_hi = s * (1.0 + 1.0 / p as f64);
        let cells_in_window =
            exps.iter().filter(|&&e| e >= window_lo && e <= window_hi).count();
        levels.push(LevelScaling {
            stage: p,
            j: level.j,
            cells: level.balls.len(),
            exponent_min,
            exponent_max,
            window_lo,
            window_hi,
            cells_in_window,
            deviation_from_s: (exponent_min - s).abs().max((exponent_max - s).abs()),
        });
    }

    let depth = tree.depth();
    let ball_exponent = s / tree.theta - 2.0 / (depth as f64 - 1.0);
    let atomic = cascade_to_atomic(tree, depth)?;
    let atoms = atomic.atoms();
    let r_min = tree.levels[depth - 1].ball_radius;
    let r_max = 1.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampled_balls = 100usize;
    let mut empirical_c = f64::NEG_INFINITY;
    for _ in 0..sampled_balls {
        let center = &atoms[rng.gen_range(0..atoms.len())].0;
        let t: f64 = rng.gen();
        let r = (r_min.ln() + t * (r_max.ln() - r_min.ln())).exp();
        let m = ball_mass(&atomic, center, r)?;
        empirical_c = empirical_c.max(m / (2.0 * r).powf(ball_exponent));
    }
    Ok(CascadeScalingReport {
        s,
        theta: tree.theta,
        levels,
        ball_exponent,
        empirical_c,
        sampled_balls,
        seed,
    })
}

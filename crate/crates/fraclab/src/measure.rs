//! Finitely supported probability measures and the measure families built
//! from an IFS: the natural self-similar approximant, Dirac and packing
//! perturbations with their parameter schedules, typical approximants, and a
//! seeded random reference generator standing in for a dense sequence of
//! comparison measures.
//!
//! Every builder emits atoms in the normalized unit-cube coordinates of the
//! owning system (see `IfsSystem::normalization`), so measures from different
//! builders compare directly under the bounded-Lipschitz metric and the
//! dyadic histogram machinery.

use crate::error::{Error, Result};
use crate::ifs::{anchor_point, cut_set, euclid, sample_attractor, IfsSystem, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::f64::consts::E;

/// Compensated (Neumaier) summation; keeps mass bookkeeping at the 1e-12
/// invariant even for large atom counts.
pub(crate) fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// A probability measure with finite support: sorted, deduplicated
/// (point, mass) pairs with positive masses summing to 1 within 1e-12.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    atoms: Vec<(Vec<f64>, f64)>,
}

const MASS_TOL: f64 = 1e-12;

fn canonical_coord(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

impl AtomicMeasure {
    /// Build from raw pairs: coincident points are merged by summing masses,
    /// atoms are sorted lexicographically by coordinates, and the total mass
    /// must already be 1 within 1e-12.
    pub fn from_atoms(raw: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::input("a measure needs at least one atom"));
        }
        let d = raw[0].0.len();
        if d == 0 {
            return Err(Error::input("atoms must have dimension >= 1"));
        }
        let mut cleaned: Vec<(Vec<f64>, f64)> = Vec::with_capacity(raw.len());
        for (pt, mass) in raw {
            if pt.len() != d {
                return Err(Error::input("all atoms must share one dimension"));
            }
            if !pt.iter().all(|v| v.is_finite()) || !mass.is_finite() {
                return Err(Error::input("atom coordinates and masses must be finite"));
            }
            if mass <= 0.0 {
                return Err(Error::input(format!("atom mass must be positive, got {mass}")));
            }
            cleaned.push((pt.into_iter().map(canonical_coord).collect(), mass));
        }
        cleaned.sort_by(|a, b| {
            a.0.iter()
                .zip(&b.0)
                .map(|(x, y)| x.partial_cmp(y).expect("finite coords"))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut merged: Vec<(Vec<f64>, f64)> = Vec::with_capacity(cleaned.len());
        for (pt, mass) in cleaned {
            match merged.last_mut() {
                Some((prev, m)) if *prev == pt => *m += mass,
                _ => merged.push((pt, mass)),
            }
        }
        let total = kahan_sum(merged.iter().map(|(_, m)| *m));
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::input(format!(
                "measure is not normalized: total mass {total}"
            )));
        }
        Ok(AtomicMeasure { atoms: merged })
    }

    /// Point mass at `a`.
    pub fn dirac(a: &[f64]) -> Result<Self> {
        AtomicMeasure::from_atoms(vec![(a.to_vec(), 1.0)])
    }

    pub fn atoms(&self) -> &[(Vec<f64>, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].0.len()
    }

    pub fn total_mass(&self) -> f64 {
        kahan_sum(self.atoms.iter().map(|(_, m)| *m))
    }

    /// Smallest inter-atom distance, the scale below which this measure no
    /// longer resolves anything; 0 for a single atom (a Dirac is exact at
    /// every scale). Sorted order makes the one-dimensional case linear.
    pub fn resolution_floor(&self) -> f64 {
        if self.atoms.len() < 2 {
            return 0.0;
        }
        if self.dim() == 1 {
            let mut best = f64::INFINITY;
            for pair in self.atoms.windows(2) {
                best = best.min(pair[1].0[0] - pair[0].0[0]);
            }
            best
        } else {
            let mut best = f64::INFINITY;
            for i in 0..self.atoms.len() {
                for j in i + 1..self.atoms.len() {
                    best = best.min(euclid(&self.atoms[i].0, &self.atoms[j].0));
                }
            }
            best
        }
    }

    /// Serialize as rows [coord_1, ..., coord_d, mass].
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.atoms
            .iter()
            .map(|(pt, m)| {
                let mut row = pt.clone();
                row.push(*m);
                row
            })
            .collect()
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::input("atom table is empty"));
        }
        let width = rows[0].len();
        if width < 2 {
            return Err(Error::input("atom rows need at least one coordinate and a mass"));
        }
        let mut atoms = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != width {
                return Err(Error::input("ragged atom table"));
            }
            atoms.push((row[..width - 1].to_vec(), row[width - 1]));
        }
        AtomicMeasure::from_atoms(atoms)
    }
}

/// Mass of the closed ball B(center, radius).
pub fn ball_mass(mu: &AtomicMeasure, center: &[f64], radius: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(Error::input(format!("ball radius must be positive, got {radius}")));
    }
    if center.len() != mu.dim() {
        return Err(Error::input("ball center dimension does not match the measure"));
    }
    Ok(kahan_sum(mu.atoms.iter().filter_map(|(pt, m)| {
        if euclid(pt, center) <= radius {
            Some(*m)
        } else {
            None
        }
    })))
}

/// weight·mu + (1-weight)·nu on the merged atom union.
pub fn mixture(weight: f64, mu: &AtomicMeasure, nu: &AtomicMeasure) -> Result<AtomicMeasure> {
    if !(0.0..=1.0).contains(&weight) {
        return Err(Error::input(format!("mixture weight {weight} outside [0,1]")));
    }
    if mu.dim() != nu.dim() {
        return Err(Error::input("mixture components have different dimensions"));
    }
    if weight == 0.0 {
        return Ok(nu.clone());
    }
    if weight == 1.0 {
        return Ok(mu.clone());
    }
    let mut raw: Vec<(Vec<f64>, f64)> = Vec::with_capacity(mu.len() + nu.len());
    for (pt, m) in &mu.atoms {
        raw.push((pt.clone(), weight * m));
    }
    for (pt, m) in &nu.atoms {
        raw.push((pt.clone(), (1.0 - weight) * m));
    }
    AtomicMeasure::from_atoms(raw)
}

/// The self-similar approximant at resolution R: one atom per cut-set word
/// at its anchor, with mass ratio^s.
pub fn natural_measure(ifs: &IfsSystem, r: f64) -> Result<AtomicMeasure> {
    let s = ifs.dimension_value(1e-13)?;
    let cs = cut_set(ifs, r)?;
    let norm = ifs.normalization();
    let base = ifs.default_base();
    let mut atoms = Vec::with_capacity(cs.words.len());
    for w in &cs.words {
        let a = anchor_point(ifs, w, &base)?;
        atoms.push((norm.to_unit(&a), w.ratio.powf(s)));
    }
    AtomicMeasure::from_atoms(atoms)
}

/// Labels tying a schedule to the construction it drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    /// Dirac-perturbation schedule (d_n, beta_n, alpha_n, c_n, r_n).
    DiracPerturbation,
    /// Same sequences used for the lower-density experiments.
    DensityPerturbation,
    /// Packing-mixture schedule (alpha_n = 2^-sqrt(n), r_n = 2^-(s+2)n).
    PackingMixture,
    /// Typical-approximant schedule (beta_n = J_n/n, radius 2^-(s J_n^2)).
    TypicalApproximant,
}

impl ScheduleKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScheduleKind::DiracPerturbation => "dirac_perturbation",
            ScheduleKind::DensityPerturbation => "density_perturbation",
            ScheduleKind::PackingMixture => "packing_mixture",
            ScheduleKind::TypicalApproximant => "typical_approximant",
        }
    }
}

/// One index of a construction schedule: named sequence values at n.
#[derive(Debug, Clone)]
pub struct Schedule {
    pub tag: ScheduleKind,
    pub n: u32,
    pub values: BTreeMap<&'static str, f64>,
}

impl Schedule {
    pub fn value(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }

    /// Dirac-perturbation schedule at index n, driven by the small parameter
    /// d in (0, e^-e): beta = 1/ln|ln d|, alpha = d^beta, r = d^(theta s),
    /// c = d^(theta s / 2), with theta > 2/s required.
    pub fn dirac_perturbation(n: u32, d: f64, theta: f64, s: f64) -> Result<Schedule> {
        Schedule::perturbation(ScheduleKind::DiracPerturbation, n, d, theta, s)
    }

    /// Same sequences under the density tag.
    pub fn density_perturbation(n: u32, d: f64, theta: f64, s: f64) -> Result<Schedule> {
        Schedule::perturbation(ScheduleKind::DensityPerturbation, n, d, theta, s)
    }

    fn perturbation(tag: ScheduleKind, n: u32, d: f64, theta: f64, s: f64) -> Result<Schedule> {
        if !(s > 0.0) {
            return Err(Error::Schedule(format!("dimension s must be positive, got {s}")));
        }
        if !(theta > 2.0 / s) {
            return Err(Error::Schedule(format!(
                "theta = {theta} must exceed 2/s = {}",
                2.0 / s
            )));
        }
        let dmax = (-E).exp();
        if !(d > 0.0 && d < dmax) {
            return Err(Error::Schedule(format!(
                "parameter d = {d} outside (0, e^-e) = (0, {dmax})"
            )));
        }
        let beta = 1.0 / d.ln().abs().ln();
        let alpha = d.powf(beta);
        let r = d.powf(theta * s);
        let c = d.powf(theta * s / 2.0);
        let mut values = BTreeMap::new();
        values.insert("d_n", d);
        values.insert("beta_n", beta);
        values.insert("alpha_n", alpha);
        values.insert("r_n", r);
        values.insert("c_n", c);
        values.insert("theta", theta);
        values.insert("s", s);
        Ok(Schedule { tag, n, values })
    }

    /// Packing-mixture schedule: alpha_n = 2^-sqrt(n), r_n = 2^-(s+2)n.
    pub fn packing_mixture(n: u32, s: f64) -> Result<Schedule> {
        if n == 0 {
            return Err(Error::Schedule("packing schedule index must be >= 1".into()));
        }
        if !(s > 0.0) {
            return Err(Error::Schedule(format!("dimension s must be positive, got {s}")));
        }
        let alpha = 2f64.powf(-(n as f64).sqrt());
        let r = 2f64.powf(-(s + 2.0) * n as f64);
        let mut values = BTreeMap::new();
        values.insert("alpha_n", alpha);
        values.insert("r_n", r);
        values.insert("s", s);
        Ok(Schedule { tag: ScheduleKind::PackingMixture, n, values })
    }

    /// Typical-approximant schedule: beta_n = J_n/n with the approximation
    /// ball radius 2^-(s J_n^2).
    pub fn typical_approximant(n: u32, j: u32, s: f64) -> Result<Schedule> {
        if n == 0 || j == 0 {
            return Err(Error::Schedule("typical schedule needs n >= 1 and J >= 1".into()));
        }
        if j > n {
            return Err(Error::input(format!(
                "beta = J/n = {j}/{n} exceeds 1; need n >= J"
            )));
        }
        if !(s > 0.0) {
            return Err(Error::Schedule(format!("dimension s must be positive, got {s}")));
        }
        let beta = j as f64 / n as f64;
        let radius = 2f64.powf(-s * (j as f64) * (j as f64));
        let mut values = BTreeMap::new();
        values.insert("beta_n", beta);
        values.insert("J_n", j as f64);
        values.insert("approx_radius", radius);
        values.insert("s", s);
        Ok(Schedule { tag: ScheduleKind::TypicalApproximant, n, values })
    }
}

/// Validate a materialized schedule run: indices strictly increase, every
/// decreasing-by-construction sequence strictly decreases, and J_n (when
/// present) strictly increases.
pub fn check_schedule_run(run: &[Schedule]) -> Result<()> {
    const DECREASING: [&str; 6] = ["d_n", "beta_n", "alpha_n", "c_n", "r_n", "approx_radius"];
    for pair in run.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.tag != b.tag {
            return Err(Error::Schedule("schedule run mixes construction kinds".into()));
        }
        if b.n <= a.n {
            return Err(Error::Schedule("schedule indices must strictly increase".into()));
        }
        for key in DECREASING {
            if let (Some(x), Some(y)) = (a.value(key), b.value(key)) {
                if y >= x {
                    return Err(Error::Schedule(format!(
                        "{key} fails to strictly decrease: {x} then {y} at n = {}",
                        b.n
                    )));
                }
            }
        }
        if let (Some(x), Some(y)) = (a.value("J_n"), b.value("J_n")) {
            if y <= x {
                return Err(Error::Schedule(format!(
                    "J_n must strictly increase: {x} then {y} at n = {}",
                    b.n
                )));
            }
        }
    }
    Ok(())
}

/// mu_n = alpha_n·delta_a + (1-alpha_n)·nu for a Dirac schedule.
pub fn dirac_perturbation(
    a: &[f64],
    nu: &AtomicMeasure,
    sched: &Schedule,
) -> Result<AtomicMeasure> {
    if !matches!(sched.tag, ScheduleKind::DiracPerturbation | ScheduleKind::DensityPerturbation) {
        return Err(Error::input(format!(
            "dirac perturbation needs a perturbation schedule, got {}",
            sched.tag.as_str()
        )));
    }
    let alpha = sched
        .value("alpha_n")
        .ok_or_else(|| Error::Schedule("schedule misses alpha_n".into()))?;
    mixture(alpha, &AtomicMeasure::dirac(a)?, nu)
}

/// mu_n = alpha_n·Pi_n + (1-alpha_n)·nu, where Pi_n is uniform on a greedy
/// maximal packing of the attractor at radius 2^-n and alpha_n = 2^-sqrt(n).
pub fn packing_mixture(
    ifs: &IfsSystem,
    n: u32,
    nu: &AtomicMeasure,
    s: f64,
) -> Result<AtomicMeasure> {
    let sched = Schedule::packing_mixture(n, s)?;
    let alpha = sched.value("alpha_n").expect("packing schedule has alpha_n");
    let r = 2f64.powf(-(n as f64));
    let norm = ifs.normalization();
    let base = ifs.default_base();
    // Sample ten times finer than the packing radius so the greedy count is a
    // faithful packing-number proxy.
    let sample = sample_attractor(ifs, (r / 10.0).min(1.0), &base)?;
    let unit: Vec<Vec<f64>> = sample.iter().map(|p| norm.to_unit(p)).collect();
    let centers = crate::spectrum::packing_centers(&unit, r)?;
    if centers.is_empty() {
        return Err(Error::Internal("attractor sample produced an empty packing".into()));
    }
    let w = 1.0 / centers.len() as f64;
    let pi = AtomicMeasure::from_atoms(centers.into_iter().map(|c| (c, w)).collect())?;
    mixture(alpha, &pi, nu)
}

/// mu_n = beta_n·lambda_(J_n) + (1-beta_n)·nu with beta_n = J_n/n.
pub fn typical_approximant(
    ifs: &IfsSystem,
    n: u32,
    j: u32,
    nu: &AtomicMeasure,
) -> Result<AtomicMeasure> {
    let s = ifs.dimension_value(1e-13)?;
    let sched = Schedule::typical_approximant(n, j, s)?;
    let beta = sched.value("beta_n").expect("typical schedule has beta_n");
    let lambda = natural_measure(ifs, 2f64.powf(-(j as f64)))?;
    mixture(beta, &lambda, nu)
}

pub const DEFAULT_RANDOM_WORD_DEPTH: usize = 8;

/// Seeded stand-in for an arbitrary comparison measure: `size` anchors at
/// uniform random words of the given depth, masses drawn flat on the simplex
/// (normalized exponentials). Deterministic for a fixed seed; coincident
/// anchors merge, so the atom count may come out below `size`.
pub fn random_reference_measure(
    ifs: &IfsSystem,
    size: usize,
    depth: usize,
    seed: u64,
) -> Result<AtomicMeasure> {
    if size == 0 {
        return Err(Error::input("random reference measure needs size >= 1"));
    }
    if depth == 0 {
        return Err(Error::input("random word depth must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = ifs.map_count() as u16;
    let norm = ifs.normalization();
    let base = ifs.default_base();
    let mut points = Vec::with_capacity(size);
    for _ in 0..size {
        let letters: Vec<u16> = (0..depth).map(|_| rng.gen_range(1..=p)).collect();
        let mut ratio = 1.0;
        for &l in &letters {
            ratio *= ifs.maps[l as usize - 1].ratio;
        }
        let w = Word { letters, ratio };
        points.push(norm.to_unit(&anchor_point(ifs, &w, &base)?));
    }
    let weights: Vec<f64> = (0..size).map(|_| -rng.gen_range(1e-12..1.0f64).ln()).collect();
    let total = kahan_sum(weights.iter().copied());
    AtomicMeasure::from_atoms(
        points
            .into_iter()
            .zip(weights)
            .map(|(pt, w)| (pt, w / total))
            .collect(),
    )
}

/// Whether x lies within 2^-(theta J) of some anchor (membership in the
/// closed-ball union around the scale-J anchor family).
pub fn lambda_theta_membership(x: &[f64], anchors: &[Vec<f64>], theta: f64, j: u32) -> bool {
    let threshold = 2f64.powf(-theta * j as f64);
    anchors.iter().any(|a| euclid(a, x) <= threshold)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::Similitude;

    fn cantor() -> IfsSystem {
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
    fn atoms_merge_sort_and_validate() {
        let mu = AtomicMeasure::from_atoms(vec![
            (vec![0.5], 0.25),
            (vec![0.0], 0.25),
            (vec![0.5], 0.5),
        ])
        .unwrap();
        assert_eq!(mu.len(), 2);
        assert_eq!(mu.atoms()[0].0, vec![0.0]);
        assert!((mu.atoms()[1].1 - 0.75).abs() < 1e-15);
        assert!((mu.total_mass() - 1.0).abs() < 1e-15);

        assert!(AtomicMeasure::from_atoms(vec![(vec![0.0], 0.5)]).is_err());
        assert!(AtomicMeasure::from_atoms(vec![(vec![0.0], -1.0), (vec![1.0], 2.0)]).is_err());
        assert!(AtomicMeasure::from_atoms(vec![(vec![0.0], 1.0), (vec![0.0, 1.0], 0.0)]).is_err());
        assert!(AtomicMeasure::from_atoms(vec![(vec![f64::NAN], 1.0)]).is_err());
    }

    #[test]
    fn row_round_trip() {
        let mu = AtomicMeasure::from_atoms(vec![(vec![0.25, 0.5], 0.4), (vec![0.0, 0.0], 0.6)])
            .unwrap();
        let rows = mu.to_rows();
        let back = AtomicMeasure::from_rows(&rows).unwrap();
        assert_eq!(mu, back);
        assert!(AtomicMeasure::from_rows(&[vec![1.0]]).is_err());
    }

    #[test]
    fn mixture_hand_cases() {
        let d0 = AtomicMeasure::dirac(&[0.0]).unwrap();
        let d1 = AtomicMeasure::dirac(&[1.0]).unwrap();
        let mix = mixture(0.3, &d0, &d1).unwrap();
        assert_eq!(mix.len(), 2);
        assert!((mix.atoms()[0].1 - 0.3).abs() < 1e-15);
        assert!((mix.atoms()[1].1 - 0.7).abs() < 1e-15);
        assert_eq!(mixture(0.0, &d0, &d1).unwrap(), d1);
        assert_eq!(mixture(1.0, &d0, &d1).unwrap(), d0);
        assert!(mixture(1.5, &d0, &d1).is_err());
        assert!(mixture(-0.1, &d0, &d1).is_err());
    }

    #[test]
    fn natural_measure_hand_cases() {
        let ifs = cantor();
        let mu = natural_measure(&ifs, 0.5).unwrap();
        assert_eq!(mu.len(), 2);
        for (pt, m) in mu.atoms() {
            assert!((m - 0.5).abs() < 1e-12);
            assert!(pt[0] == 0.0 || (pt[0] - 2.0 / 3.0).abs() < 1e-15);
        }
        let mu = natural_measure(&ifs, 0.2).unwrap();
        assert_eq!(mu.len(), 4);
        for (_, m) in mu.atoms() {
            assert!((m - 0.25).abs() < 1e-12);
        }
        let mu = natural_measure(&ifs, 1.0).unwrap();
        assert_eq!(mu.len(), 2);
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn perturbation_schedule_formulas() {
        let s = 2f64.ln() / 3f64.ln();
        let theta = 3.0 / s; // theta*s = 3 > 2
        let d = (-(E * E)).exp(); // beta = 1/ln(e^2 -> |ln d| = e^2) = 1/2
        // d = e^-e^2 < e^-e, valid.
        let sched = Schedule::dirac_perturbation(1, d, theta, s).unwrap();
        assert!((sched.value("beta_n").unwrap() - 0.5).abs() < 1e-12);
        assert!((sched.value("alpha_n").unwrap() - d.sqrt()).abs() < 1e-15);
        assert!((sched.value("r_n").unwrap() - d.powi(3)).abs() < 1e-18);
        assert!((sched.value("c_n").unwrap() - d.powf(1.5)).abs() < 1e-16);

        assert!(Schedule::dirac_perturbation(1, 0.5, theta, s).is_err()); // d too big
        assert!(Schedule::dirac_perturbation(1, d, 1.0 / s, s).is_err()); // theta <= 2/s
    }

    #[test]
    fn packing_and_typical_schedules() {
        let s = 1.0;
        let sched = Schedule::packing_mixture(4, s).unwrap();
        assert!((sched.value("alpha_n").unwrap() - 0.25).abs() < 1e-15);
        assert!((sched.value("r_n").unwrap() - 2f64.powi(-12)).abs() < 1e-18);

        let sched = Schedule::typical_approximant(16, 8, s).unwrap();
        assert!((sched.value("beta_n").unwrap() - 0.5).abs() < 1e-15);
        assert!((sched.value("approx_radius").unwrap() - 2f64.powi(-64)).abs() < 1e-30);
        assert!(Schedule::typical_approximant(4, 8, s).is_err()); // beta > 1
    }

    #[test]
    fn schedule_runs_must_strictly_decrease() {
        let s = 2f64.ln() / 3f64.ln();
        let theta = 4.0 / s;
        let good: Vec<Schedule> = [1e-5, 1e-7, 1e-9]
            .iter()
            .enumerate()
            .map(|(i, &d)| Schedule::dirac_perturbation(i as u32 + 1, d, theta, s).unwrap())
            .collect();
        check_schedule_run(&good).unwrap();

        let bad: Vec<Schedule> = [1e-5, 1e-5]
            .iter()
            .enumerate()
            .map(|(i, &d)| Schedule::dirac_perturbation(i as u32 + 1, d, theta, s).unwrap())
            .collect();
        assert!(check_schedule_run(&bad).is_err());

        let run: Vec<Schedule> = (1..4)
            .map(|n| Schedule::packing_mixture(n, 0.8).unwrap())
            .collect();
        check_schedule_run(&run).unwrap();
    }

    #[test]
    fn dirac_perturbation_mixes() {
        let s = 2f64.ln() / 3f64.ln();
        let theta = 4.0 / s;
        let sched = Schedule::dirac_perturbation(1, 1e-4, theta, s).unwrap();
        let alpha = sched.value("alpha_n").unwrap();
        let nu = AtomicMeasure::dirac(&[1.0]).unwrap();
        let mu = dirac_perturbation(&[0.0], &nu, &sched).unwrap();
        assert_eq!(mu.len(), 2);
        assert!((mu.atoms()[0].1 - alpha).abs() < 1e-15);
        assert!((mu.atoms()[1].1 - (1.0 - alpha)).abs() < 1e-15);

        let wrong = Schedule::packing_mixture(2, s).unwrap();
        assert!(dirac_perturbation(&[0.0], &nu, &wrong).is_err());
    }

    #[test]
    fn packing_mixture_uniform_component() {
        let seg = segment();
        let nu = AtomicMeasure::dirac(&[0.25]).unwrap();
        let mu = packing_mixture(&seg, 2, &nu, 1.0).unwrap();
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
        let alpha = 2f64.powf(-(2f64).sqrt());
        // Uniform packing atoms all carry alpha/L; the nu atom carries the rest.
        let nu_mass: f64 = mu
            .atoms()
            .iter()
            .filter(|(pt, _)| (pt[0] - 0.25).abs() < 1e-12)
            .map(|(_, m)| *m)
            .sum();
        assert!((nu_mass - (1.0 - alpha)).abs() < 1e-12);
        let packing_masses: Vec<f64> = mu
            .atoms()
            .iter()
            .filter(|(pt, _)| (pt[0] - 0.25).abs() >= 1e-12)
            .map(|(_, m)| *m)
            .collect();
        assert!(!packing_masses.is_empty());
        let first = packing_masses[0];
        assert!(packing_masses.iter().all(|m| (m - first).abs() < 1e-15));
    }

    #[test]
    fn typical_approximant_beta_one_is_lambda() {
        let ifs = cantor();
        let nu = AtomicMeasure::dirac(&[0.5]).unwrap();
        let mu = typical_approximant(&ifs, 4, 4, &nu).unwrap();
        let lambda = natural_measure(&ifs, 2f64.powi(-4)).unwrap();
        assert_eq!(mu, lambda);
        assert!(typical_approximant(&ifs, 4, 8, &nu).is_err());
    }

    #[test]
    fn random_reference_is_deterministic() {
        let ifs = cantor();
        let a = random_reference_measure(&ifs, 20, 8, 7).unwrap();
        let b = random_reference_measure(&ifs, 20, 8, 7).unwrap();
        assert_eq!(a, b);
        let c = random_reference_measure(&ifs, 20, 8, 8).unwrap();
        assert_ne!(a, c);
        assert!((a.total_mass() - 1.0).abs() < 1e-12);
        let single = random_reference_measure(&ifs, 1, 8, 0).unwrap();
        assert_eq!(single.len(), 1);
        assert!(random_reference_measure(&ifs, 0, 8, 0).is_err());
    }

    #[test]
    fn ball_mass_hand_cases() {
        let ifs = cantor();
        let mu = natural_measure(&ifs, 0.2).unwrap();
        // Atoms at 0, 2/9, 2/3, 8/9 with mass 1/4 each.
        assert!((ball_mass(&mu, &[0.0], 0.15).unwrap() - 0.25).abs() < 1e-12);
        assert!((ball_mass(&mu, &[0.0], 0.3).unwrap() - 0.5).abs() < 1e-12);
        assert!((ball_mass(&mu, &[0.0], 2.0).unwrap() - 1.0).abs() < 1e-12);
        // Closed ball: an atom exactly on the boundary counts.
        let pair =
            AtomicMeasure::from_atoms(vec![(vec![0.0], 0.5), (vec![0.25], 0.5)]).unwrap();
        assert!((ball_mass(&pair, &[0.0], 0.25).unwrap() - 1.0).abs() < 1e-15);
        assert!((ball_mass(&pair, &[0.0], 0.249).unwrap() - 0.5).abs() < 1e-15);
        let d = AtomicMeasure::dirac(&[0.3]).unwrap();
        assert!((ball_mass(&d, &[0.3], 1e-9).unwrap() - 1.0).abs() < 1e-15);
        assert!(ball_mass(&d, &[0.3], 0.0).is_err());
    }

    #[test]
    fn membership_thresholds() {
        let anchors = vec![vec![0.0], vec![0.5]];
        assert!(lambda_theta_membership(&[0.0], &anchors, 1.0, 4));
        assert!(lambda_theta_membership(&[0.5 + 2f64.powi(-4)], &anchors, 1.0, 4));
        assert!(!lambda_theta_membership(&[0.5 + 2.0 * 2f64.powi(-4)], &anchors, 1.0, 4));
    }

    #[test]
    fn resolution_floor_cases() {
        let d = AtomicMeasure::dirac(&[0.3]).unwrap();
        assert_eq!(d.resolution_floor(), 0.0);
        let mu = AtomicMeasure::from_atoms(vec![
            (vec![0.0], 0.5),
            (vec![0.4], 0.25),
            (vec![0.5], 0.25),
        ])
        .unwrap();
        assert!((mu.resolution_floor() - 0.1).abs() < 1e-15);
        let planar = AtomicMeasure::from_atoms(vec![
            (vec![0.0, 0.0], 0.5),
            (vec![0.3, 0.4], 0.5),
        ])
        .unwrap();
        assert!((planar.resolution_floor() - 0.5).abs() < 1e-15);
    }
}

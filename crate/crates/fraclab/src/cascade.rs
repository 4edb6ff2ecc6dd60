//! Finite-depth cascade measures: nested families of anchor-centered balls
//! carrying a mass that splits uniformly over the children selected inside
//! each parent.
//!
//! Level 1 takes a greedy maximal family of disjoint balls of radius
//! 2^-J_1 centered at cut-set anchors. To refine a parent centered at x with
//! level radius 2^-theta*J_p, the candidate pool collects the finer cut-set
//! anchors whose cells can meet B(x, r_p), with
//! r_p = 2^-theta*J_p - |K|·2^-J_{p+1}; a greedy maximal sub-family with
//! centers 2·2^-J_{p+1} apart becomes the children, each inheriting an equal
//! share of the parent mass. All selections scan candidates in lexicographic
//! word order, so trees are deterministic.

use crate::error::{Error, Result};
use crate::ifs::{anchor_point, cut_set, euclid, IfsSystem, Word};
use crate::measure::AtomicMeasure;

/// After unit normalization the attractor diameter is at most 1; the bound
/// is used wherever the construction needs |K|, which keeps every
/// containment test conservative.
pub const DIAMETER_BOUND: f64 = 1.0;

#[derive(Debug, Clone)]
pub struct CascadeBall {
    pub word: Vec<u16>,
    pub word_ratio: f64,
    /// Normalized unit-cube coordinates.
    pub center: Vec<f64>,
    pub mass: f64,
    /// Index into the previous level; None at level 1.
    pub parent: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct CascadeLevel {
    /// The scale exponent J of this level.
    pub j: u32,
    /// Ball radius 2^-theta*J.
    pub ball_radius: f64,
    /// Separation radius 2^-J: sibling centers stay >= 2 of these apart.
    pub selection_radius: f64,
    /// Candidate radius r_p used to build this level; None at level 1.
    pub r_p: Option<f64>,
    pub balls: Vec<CascadeBall>,
    /// Candidate pool size per parent ball of the previous level; empty at
    /// level 1.
    pub pool_sizes: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct CascadeTree {
    pub theta: f64,
    pub level_schedule: Vec<u32>,
    pub levels: Vec<CascadeLevel>,
    /// Per transition p -> p+1: whether the strict growth regime
    /// J_{p+1} > max((p+1)·theta·J_p, e^J_p) holds. The construction is
    /// valid either way; the flag qualifies asymptotic mass diagnostics.
    pub growth_condition: Vec<bool>,
}

impl CascadeTree {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }
}

/// The default desk schedule: J_{p+1} = ceil(2·theta·J_p).
pub fn geometric_levels(theta: f64, j1: u32, depth: usize) -> Result<Vec<u32>> {
    if !(theta >= 1.0) {
        return Err(Error::input(format!("theta must be >= 1, got {theta}")));
    }
    if j1 == 0 || depth == 0 {
        return Err(Error::input("geometric schedule needs J_1 >= 1 and depth >= 1"));
    }
    let mut levels = Vec::with_capacity(depth);
    let mut j = j1;
    for _ in 0..depth {
        levels.push(j);
        let next = (2.0 * theta * j as f64).ceil();
        if next > u32::MAX as f64 {
            return Err(Error::Schedule("geometric schedule overflows".into()));
        }
        j = next as u32;
    }
    Ok(levels)
}

/// Cut-set words and their normalized anchors at resolution 2^-j, in
/// lexicographic order. Shared by the builder and by independent
/// re-derivations in tests.
pub fn level_anchor_family(ifs: &IfsSystem, j: u32) -> Result<Vec<(Word, Vec<f64>)>> {
    let cs = cut_set(ifs, 2f64.powf(-(j as f64)))?;
    let norm = ifs.normalization();
    let base = ifs.default_base();
    cs.words
        .into_iter()
        .map(|w| {
            let a = anchor_point(ifs, &w, &base)?;
            Ok((w, norm.to_unit(&a)))
        })
        .collect()
}

fn greedy_separated<'a>(
    candidates: impl Iterator<Item = &'a (Word, Vec<f64>)>,
    min_separation: f64,
) -> Vec<usize> {
    let mut selected: Vec<usize> = Vec::new();
    let mut centers: Vec<&Vec<f64>> = Vec::new();
    for (idx, (_, center)) in candidates.enumerate() {
        if centers.iter().all(|c| euclid(c, center) >= min_separation) {
            selected.push(idx);
            centers.push(center);
        }
    }
    selected
}

/// Build a cascade over the first `depth` entries of `levels`.
pub fn build_cascade(
    ifs: &IfsSystem,
    theta: f64,
    levels: &[u32],
    depth: usize,
) -> Result<CascadeTree> {
    if !(theta >= 1.0) {
        return Err(Error::input(format!("theta must be >= 1, got {theta}")));
    }
    if depth == 0 {
        return Err(Error::input("cascade depth must be >= 1"));
    }
    if depth > levels.len() {
        return Err(Error::input(format!(
            "depth {depth} exceeds the {} scheduled levels",
            levels.len()
        )));
    }
    let levels = &levels[..depth];
    for pair in levels.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::input("level schedule must be strictly increasing"));
        }
    }
    if levels[0] == 0 {
        return Err(Error::input("level exponents must be >= 1"));
    }

    let mut tree_levels: Vec<CascadeLevel> = Vec::with_capacity(depth);
    let mut growth = Vec::with_capacity(depth.saturating_sub(1));

    // Level 1: greedy maximal disjoint balls of radius 2^-J_1.
    let j1 = levels[0];
    let family = level_anchor_family(ifs, j1)?;
    let sel_radius = 2f64.powf(-(j1 as f64));
    let picks = greedy_separated(family.iter(), 2.0 * sel_radius);
    if picks.is_empty() {
        return Err(Error::Construction("no level-1 balls selected".into()));
    }
    let share = 1.0 / picks.len() as f64;
    let balls: Vec<CascadeBall> = picks
        .iter()
        .map(|&i| CascadeBall {
            word: family[i].0.letters.clone(),
            word_ratio: family[i].0.ratio,
            center: family[i].1.clone(),
            mass: share,
            parent: None,
        })
        .collect();
    tree_levels.push(CascadeLevel {
        j: j1,
        ball_radius: 2f64.powf(-theta * j1 as f64),
        selection_radius: sel_radius,
        r_p: None,
        balls,
        pool_sizes: Vec::new(),
    });

    for p in 1..depth {
        let j_prev = levels[p - 1];
        let j_next = levels[p];
        let parent_radius = 2f64.powf(-theta * j_prev as f64);
        let r_p = parent_radius - DIAMETER_BOUND * 2f64.powf(-(j_next as f64));
        if r_p <= 0.0 {
            return Err(Error::Schedule(format!(
                "candidate radius r_p is not positive between levels J = {j_prev} and J = {j_next} (theta = {theta})"
            )));
        }
        if r_p < 0.5 * parent_radius {
            return Err(Error::Schedule(format!(
                "schedule violates the growth direction between J = {j_prev} and J = {j_next}: r_p = {r_p} below half the parent radius {parent_radius}"
            )));
        }
        growth.push(
            (j_next as f64) > ((p as f64 + 1.0) * theta * j_prev as f64).max((j_prev as f64).exp()),
        );

        let family = level_anchor_family(ifs, j_next)?;
        let sel_radius = 2f64.powf(-(j_next as f64));
        let parents = &tree_levels[p - 1].balls;
        let mut balls = Vec::new();
        let mut pool_sizes = Vec::with_capacity(parents.len());
        for (pi, parent) in parents.iter().enumerate() {
            // Superset of the cells meeting B(parent, r_p): a cell K_w lies
            // inside the closed ball of radius |K|·ratio(w) around its anchor.
            let pool: Vec<&(Word, Vec<f64>)> = family
                .iter()
                .filter(|(w, c)| {
                    euclid(c, &parent.center) <= r_p + DIAMETER_BOUND * w.ratio
                })
                .collect();
            pool_sizes.push(pool.len());
            let picks = greedy_separated(pool.iter().copied(), 2.0 * sel_radius);
            if picks.is_empty() {
                return Err(Error::Construction(format!(
                    "parent {} at level {} received no children",
                    Word { letters: parent.word.clone(), ratio: parent.word_ratio }.label(),
                    p
                )));
            }
            let share = parent.mass / picks.len() as f64;
            for &i in &picks {
                balls.push(CascadeBall {
                    word: pool[i].0.letters.clone(),
                    word_ratio: pool[i].0.ratio,
                    center: pool[i].1.clone(),
                    mass: share,
                    parent: Some(pi),
                });
            }
        }
        tree_levels.push(CascadeLevel {
            j: j_next,
            ball_radius: 2f64.powf(-theta * j_next as f64),
            selection_radius: sel_radius,
            r_p: Some(r_p),
            balls,
            pool_sizes,
        });
    }

    Ok(CascadeTree {
        theta,
        level_schedule: levels.to_vec(),
        levels: tree_levels,
        growth_condition: growth,
    })
}

/// The measure carried by one level: an atom at each ball center.
pub fn cascade_to_atomic(tree: &CascadeTree, level: usize) -> Result<AtomicMeasure> {
    if level == 0 || level > tree.depth() {
        return Err(Error::input(format!(
            "level {level} outside 1..={}",
            tree.depth()
        )));
    }
    let lv = &tree.levels[level - 1];
    AtomicMeasure::from_atoms(
        lv.balls.iter().map(|b| (b.center.clone(), b.mass)).collect(),
    )
}

/// Structural invariants: uniform root split, exact uniform child splits,
/// per-level conservation, sibling separation, and the pool containment
/// predicate linking children to their parents.
pub fn check_tree_invariants(tree: &CascadeTree) -> Result<()> {
    let root = &tree.levels[0];
    let share = 1.0 / root.balls.len() as f64;
    for b in &root.balls {
        if b.mass != share {
            return Err(Error::Internal("root masses are not uniform".into()));
        }
    }
    for (li, lv) in tree.levels.iter().enumerate() {
        let total = crate::measure::kahan_sum(lv.balls.iter().map(|b| b.mass));
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Internal(format!(
                "level {} mass {total} deviates from 1",
                li + 1
            )));
        }
        if li == 0 {
            continue;
        }
        let parents = &tree.levels[li - 1].balls;
        let r_p = lv.r_p.expect("levels past the first carry r_p");
        let mut child_count = vec![0usize; parents.len()];
        for b in &lv.balls {
            child_count[b.parent.expect("levels past the first carry parents")] += 1;
        }
        for b in &lv.balls {
            let parent = &parents[b.parent.unwrap()];
            if b.mass != parent.mass / child_count[b.parent.unwrap()] as f64 {
                return Err(Error::Internal("child mass is not an exact uniform split".into()));
            }
            if euclid(&b.center, &parent.center) > r_p + DIAMETER_BOUND * b.word_ratio {
                return Err(Error::Internal(
                    "child center escapes its parent's candidate region".into(),
                ));
            }
        }
        for pi in 0..parents.len() {
            let siblings: Vec<&CascadeBall> =
                lv.balls.iter().filter(|b| b.parent == Some(pi)).collect();
            for a in 0..siblings.len() {
                for b in a + 1..siblings.len() {
                    if euclid(&siblings[a].center, &siblings[b].center)
                        < 2.0 * lv.selection_radius
                    {
                        return Err(Error::Internal("sibling separation breached".into()));
                    }
                }
            }
        }
    }
    Ok(())
}

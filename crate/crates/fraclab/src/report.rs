//! Run plumbing: grid and measure-spec parsing, measure construction from
//! structured specs, CSV serialization, and the JSON report envelope. Every
//! run's report embeds the fully resolved inputs so identical config and
//! seed reproduce byte-identical bodies.

use crate::cascade::{build_cascade, cascade_to_atomic, geometric_levels, CascadeTree};
use crate::error::{Error, Result};
use crate::ifs::IfsSystem;
use crate::measure::{
    dirac_perturbation, natural_measure, packing_mixture, random_reference_measure,
    typical_approximant, AtomicMeasure, Schedule, DEFAULT_RANDOM_WORD_DEPTH,
};
use crate::spectrum::{LevelWindow, SpectrumCurve};
use serde_json::{json, Map, Value};
use std::path::{Path, PathBuf};

pub const DEFAULT_NU_SIZE: usize = 16;

/// Inclusive increasing grid: `a:b:n` (n >= 2 points, a < b), a comma list,
/// or a single value.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::input("empty grid"));
    }
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::input(format!("grid '{text}' is not of the form a:b:n")));
        }
        let a: f64 = parts[0]
            .parse()
            .map_err(|_| Error::input(format!("grid start '{}' is not a number", parts[0])))?;
        let b: f64 = parts[1]
            .parse()
            .map_err(|_| Error::input(format!("grid end '{}' is not a number", parts[1])))?;
        let n: usize = parts[2]
            .parse()
            .map_err(|_| Error::input(format!("grid count '{}' is not an integer", parts[2])))?;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::input(format!("grid '{text}': start < end required")));
        }
        if n < 2 {
            return Err(Error::input(format!("grid '{text}': count >= 2 required")));
        }
        let step = (b - a) / (n - 1) as f64;
        return Ok((0..n)
            .map(|i| if i == n - 1 { b } else { a + step * i as f64 })
            .collect());
    }
    let vals: Vec<f64> = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::input(format!("grid entry '{t}' is not a number")))
        })
        .collect::<Result<_>>()?;
    for w in vals.windows(2) {
        if !(w[0] < w[1]) {
            return Err(Error::input(format!("grid '{text}' must be strictly increasing")));
        }
    }
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::input(format!("grid '{text}' has non-finite entries")));
    }
    Ok(vals)
}

/// Strictly decreasing radius list: `pow:B:M1:M2` (radii B^-m for
/// m = M1..=M2) or a comma list.
pub fn parse_radii(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if let Some(rest) = text.strip_prefix("pow:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::input(format!("radii '{text}' is not of the form pow:B:M1:M2")));
        }
        let base: f64 = parts[0]
            .parse()
            .map_err(|_| Error::input(format!("radii base '{}' is not a number", parts[0])))?;
        let m1: i32 = parts[1]
            .parse()
            .map_err(|_| Error::input(format!("radii exponent '{}' is not an integer", parts[1])))?;
        let m2: i32 = parts[2]
            .parse()
            .map_err(|_| Error::input(format!("radii exponent '{}' is not an integer", parts[2])))?;
        if !(base > 1.0 && base.is_finite()) {
            return Err(Error::input(format!("radii base must exceed 1, got {base}")));
        }
        if m2 < m1 {
            return Err(Error::input(format!("radii '{text}': M1 <= M2 required")));
        }
        return Ok((m1..=m2).map(|m| base.powi(-m)).collect());
    }
    let vals: Vec<f64> = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::input(format!("radius '{t}' is not a number")))
        })
        .collect::<Result<_>>()?;
    if vals.is_empty() {
        return Err(Error::input("empty radius list"));
    }
    for w in vals.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::input(format!("radii '{text}' must be strictly decreasing")));
        }
    }
    if !vals.iter().all(|v| v.is_finite() && *v > 0.0) {
        return Err(Error::input(format!("radii '{text}' must be positive and finite")));
    }
    Ok(vals)
}

/// Histogram level window `lo:hi`, or a single level `j`.
pub fn parse_window(text: &str) -> Result<LevelWindow> {
    let text = text.trim();
    let (lo, hi) = match text.split_once(':') {
        Some((a, b)) => {
            let lo: u32 = a
                .parse()
                .map_err(|_| Error::input(format!("level '{a}' is not an integer")))?;
            let hi: u32 = b
                .parse()
                .map_err(|_| Error::input(format!("level '{b}' is not an integer")))?;
            (lo, hi)
        }
        None => {
            let j: u32 = text
                .parse()
                .map_err(|_| Error::input(format!("level '{text}' is not an integer")))?;
            (j, j)
        }
    };
    LevelWindow::new(lo, hi)
}

/// Comma-separated point coordinates.
pub fn parse_point(text: &str) -> Result<Vec<f64>> {
    let coords: Vec<f64> = text
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::input(format!("coordinate '{t}' is not a number")))
        })
        .collect::<Result<_>>()?;
    if coords.is_empty() || coords.iter().any(|c| !c.is_finite()) {
        return Err(Error::input(format!("point '{text}' must be finite coordinates")));
    }
    Ok(coords)
}

#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct NaturalSpec {
    resolution: f64,
    #[allow(dead_code)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct DiracMixSpec {
    n: u32,
    d: f64,
    theta: f64,
    point: Option<Vec<f64>>,
    nu_size: Option<usize>,
    nu_depth: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct PackingMixSpec {
    n: u32,
    nu_size: Option<usize>,
    nu_depth: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct TypicalSpec {
    n: u32,
    j: u32,
    nu_size: Option<usize>,
    nu_depth: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct CascadeSpec {
    theta: f64,
    levels: Option<Vec<u32>>,
    j1: Option<u32>,
    depth: Option<usize>,
    /// Which level to atomize; defaults to the deepest.
    level: Option<usize>,
    #[allow(dead_code)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomicSpec {
    rows: Vec<Vec<f64>>,
    #[allow(dead_code)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomSpec {
    size: usize,
    depth: Option<usize>,
    seed: Option<u64>,
}

/// A parsed measure specification, not yet bound to an IFS.
#[derive(Debug, Clone)]
pub enum MeasureKind {
    Natural(f64),
    DiracMix { n: u32, d: f64, theta: f64, point: Option<Vec<f64>>, nu_size: usize, nu_depth: usize, seed: Option<u64> },
    PackingMix { n: u32, nu_size: usize, nu_depth: usize, seed: Option<u64> },
    Typical { n: u32, j: u32, nu_size: usize, nu_depth: usize, seed: Option<u64> },
    Cascade { theta: f64, levels: Option<Vec<u32>>, j1: Option<u32>, depth: Option<usize>, level: Option<usize> },
    Atomic(Vec<Vec<f64>>),
    Random { size: usize, depth: usize, seed: Option<u64> },
}

/// Parse a JSON measure spec `{ "kind": ..., ... }`. Unknown keys are
/// rejected per kind.
pub fn parse_measure_spec(text: &str) -> Result<MeasureKind> {
    let mut value: Value = serde_json::from_str(text)?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| Error::input("measure spec must be a JSON object"))?;
    let kind = obj
        .remove("kind")
        .and_then(|k| k.as_str().map(str::to_string))
        .ok_or_else(|| Error::input("measure spec needs a string field 'kind'"))?;
    let rest = Value::Object(std::mem::take(obj));
    let detail = |e: serde_json::Error| Error::input(format!("measure spec '{kind}': {e}"));
    Ok(match kind.as_str() {
        "natural" => {
            let s: NaturalSpec = serde_json::from_value(rest).map_err(detail)?;
            MeasureKind::Natural(s.resolution)
        }
        "dirac_mix" => {
            let s: DiracMixSpec = serde_json::from_value(rest).map_err(detail)?;
            MeasureKind::DiracMix {
                n: s.n,
                d: s.d,
                theta: s.theta,
                point: s.point,
                nu_size: s.nu_size.unwrap_or(DEFAULT_NU_SIZE),
                nu_depth: s.nu_depth.unwrap_or(DEFAULT_RANDOM_WORD_DEPTH),
                seed: s.seed,
            }
        }
        "packing_mix" => {
            let s: PackingMixSpec = serde_json::from_value(rest).map_err(detail)?;
            MeasureKind::PackingMix {
                n: s.n,
                nu_size: s.nu_size.unwrap_or(DEFAULT_NU_SIZE),
                nu_depth: s.nu_depth.unwrap_or(DEFAULT_RANDOM_WORD_DEPTH),
                seed: s.seed,
            }
        }
        "typical" => {
            let s: TypicalSpec = serde_json::from_value(rest).map_err(detail)?;
            MeasureKind::Typical {
                n: s.n,
                j: s.j,
                nu_size: s.nu_size.unwrap_or(DEFAULT_NU_SIZE),
                nu_depth: s.nu_depth.unwrap_or(DEFAULT_RANDOM_WORD_DEPTH),
                seed: s.seed,
            }
        }
        "cascade" => {
            let s: CascadeSpec = serde_json::from_value(rest).map_err(detail)?;
            MeasureKind::Cascade {
                theta: s.theta,
                levels: s.levels,
                j1: s.j1,
                depth: s.depth,
                level: s.level,
            }
        }
        "atomic" => {
            let s: AtomicSpec = serde_json::from_value(rest).map_err(detail)?;
            MeasureKind::Atomic(s.rows)
        }
        "random" => {
            let s: RandomSpec = serde_json::from_value(rest).map_err(detail)?;
            MeasureKind::Random {
                size: s.size,
                depth: s.depth.unwrap_or(DEFAULT_RANDOM_WORD_DEPTH),
                seed: s.seed,
            }
        }
        other => {
            return Err(Error::input(format!(
                "unknown measure kind '{other}' (expected natural, dirac_mix, packing_mix, \
                 typical, cascade, atomic, or random)"
            )))
        }
    })
}

/// A measure argument on the command line: inline JSON spec, a path to a
/// JSON spec file, or a path to a CSV atom file.
pub fn resolve_measure_arg(arg: &str) -> Result<MeasureKind> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') {
        return parse_measure_spec(arg);
    }
    let text = std::fs::read_to_string(arg)
        .map_err(|e| Error::input(format!("cannot read measure file '{arg}': {e}")))?;
    if Path::new(arg).extension().is_some_and(|e| e == "csv") {
        let mu = parse_measure_csv(&text)?;
        return Ok(MeasureKind::Atomic(mu.to_rows()));
    }
    parse_measure_spec(&text)
}

fn resolve_cascade_schedule(
    theta: f64,
    levels: &Option<Vec<u32>>,
    j1: Option<u32>,
    depth: Option<usize>,
) -> Result<(Vec<u32>, usize)> {
    match (levels, j1) {
        (Some(levels), None) => {
            let p = depth.unwrap_or(levels.len());
            Ok((levels.clone(), p))
        }
        (None, Some(j1)) => {
            let p = depth.ok_or_else(|| {
                Error::input("cascade spec with 'j1' needs an explicit 'depth'")
            })?;
            Ok((geometric_levels(theta, j1, p)?, p))
        }
        _ => Err(Error::input("cascade spec needs exactly one of 'levels' or 'j1'")),
    }
}

/// Build the cascade tree described by a `cascade` measure kind.
pub fn build_cascade_from_kind(ifs: &IfsSystem, kind: &MeasureKind) -> Result<CascadeTree> {
    let MeasureKind::Cascade { theta, levels, j1, depth, .. } = kind else {
        return Err(Error::input("not a cascade measure spec"));
    };
    let (schedule, p) = resolve_cascade_schedule(*theta, levels, *j1, *depth)?;
    build_cascade(ifs, *theta, &schedule, p)
}

/// Materialize a measure spec against an IFS. Returns the measure together
/// with construction diagnostics (schedule values, cascade flags) for the
/// report envelope.
pub fn build_measure(
    ifs: &IfsSystem,
    kind: &MeasureKind,
    default_seed: u64,
) -> Result<(AtomicMeasure, Value)> {
    match kind {
        MeasureKind::Natural(resolution) => {
            let mu = natural_measure(ifs, *resolution)?;
            Ok((mu, json!({ "resolution": resolution })))
        }
        MeasureKind::DiracMix { n, d, theta, point, nu_size, nu_depth, seed } => {
            let s = ifs.dimension_value(1e-13)?;
            let sched = Schedule::dirac_perturbation(*n, *d, *theta, s)?;
            let seed = seed.unwrap_or(default_seed);
            let nu = random_reference_measure(ifs, *nu_size, *nu_depth, seed)?;
            let a = match point {
                Some(p) => p.clone(),
                None => ifs.normalization().to_unit(&ifs.default_base()),
            };
            let mu = dirac_perturbation(&a, &nu, &sched)?;
            Ok((mu, json!({ "schedule": sched.values, "point": a, "seed": seed, "s": s })))
        }
        MeasureKind::PackingMix { n, nu_size, nu_depth, seed } => {
            let s = ifs.dimension_value(1e-13)?;
            let sched = Schedule::packing_mixture(*n, s)?;
            let seed = seed.unwrap_or(default_seed);
            let nu = random_reference_measure(ifs, *nu_size, *nu_depth, seed)?;
            let mu = packing_mixture(ifs, *n, &nu, s)?;
            Ok((mu, json!({ "schedule": sched.values, "seed": seed, "s": s })))
        }
        MeasureKind::Typical { n, j, nu_size, nu_depth, seed } => {
            let s = ifs.dimension_value(1e-13)?;
            let sched = Schedule::typical_approximant(*n, *j, s)?;
            let seed = seed.unwrap_or(default_seed);
            let nu = random_reference_measure(ifs, *nu_size, *nu_depth, seed)?;
            let mu = typical_approximant(ifs, *n, *j, &nu)?;
            Ok((mu, json!({ "schedule": sched.values, "seed": seed, "s": s })))
        }
        MeasureKind::Cascade { level, .. } => {
            let tree = build_cascade_from_kind(ifs, kind)?;
            let at = level.unwrap_or(tree.depth());
            let mu = cascade_to_atomic(&tree, at)?;
            let diag = json!({
                "level_schedule": tree.level_schedule,
                "growth_condition": tree.growth_condition,
                "atomized_level": at,
                "cells_per_level": tree.levels.iter().map(|l| l.balls.len()).collect::<Vec<_>>(),
            });
            Ok((mu, diag))
        }
        MeasureKind::Atomic(rows) => {
            let mu = AtomicMeasure::from_rows(rows)?;
            let count = mu.len();
            Ok((mu, json!({ "atoms": count })))
        }
        MeasureKind::Random { size, depth, seed } => {
            let seed = seed.unwrap_or(default_seed);
            let mu = random_reference_measure(ifs, *size, *depth, seed)?;
            Ok((mu, json!({ "size": size, "depth": depth, "seed": seed })))
        }
    }
}

/// CSV rows `coord,...,mass`, one atom per line, no header.
pub fn measure_csv(mu: &AtomicMeasure) -> String {
    let mut out = String::new();
    for row in mu.to_rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_measure_csv(text: &str) -> Result<AtomicMeasure> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|t| {
                t.trim().parse::<f64>().map_err(|_| {
                    Error::input(format!("measure CSV line {}: '{t}' is not a number", lineno + 1))
                })
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    AtomicMeasure::from_rows(&rows)
}

/// CSV for a spectrum curve: per-point summary columns. Per-level raw values
/// stay in the JSON report.
pub fn curve_csv(curve: &SpectrumCurve) -> String {
    let mut out = String::from("x,value,window_min,fit_slope,fit_intercept,fit_residual\n");
    for p in &curve.points {
        let wm = p.window_min.map(|v| format!("{v}")).unwrap_or_default();
        let (fs, fi, fr) = match p.fit {
            Some(f) => (format!("{}", f.slope), format!("{}", f.intercept), format!("{}", f.residual)),
            None => (String::new(), String::new(), String::new()),
        };
        out.push_str(&format!("{},{},{wm},{fs},{fi},{fr}\n", p.x, p.value));
    }
    out
}

/// The JSON report envelope shared by every subcommand.
pub fn render_envelope(command: &str, inputs: Value, results: Value, diagnostics: Value) -> String {
    let mut body = Map::new();
    body.insert("command".to_string(), Value::String(command.to_string()));
    body.insert("inputs".to_string(), inputs);
    body.insert("results".to_string(), results);
    body.insert("diagnostics".to_string(), diagnostics);
    let mut text = serde_json::to_string_pretty(&Value::Object(body)).expect("report serializes");
    text.push('\n');
    text
}

/// Resolve an output path against FRACLAB_OUT_DIR for relative paths.
pub fn resolve_out_path(out: &str) -> PathBuf {
    let p = Path::new(out);
    if p.is_relative() {
        if let Ok(dir) = std::env::var("FRACLAB_OUT_DIR") {
            if !dir.is_empty() {
                return Path::new(&dir).join(p);
            }
        }
    }
    p.to_path_buf()
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

    #[test]
    fn grid_parsing() {
        let g = parse_grid("0:1:11").unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[10], 1.0);
        assert!((g[5] - 0.5).abs() < 1e-15);

        assert_eq!(parse_grid("0.25").unwrap(), vec![0.25]);
        assert_eq!(parse_grid("0,0.5,1").unwrap(), vec![0.0, 0.5, 1.0]);

        let err = parse_grid("1:0:5").unwrap_err().to_string();
        assert!(err.contains("start < end"), "{err}");
        assert!(parse_grid("0:1:1").is_err());
        assert!(parse_grid("0.5,0.25").is_err());
        assert!(parse_grid("a:b:3").is_err());
        assert!(parse_grid("").is_err());
    }

    #[test]
    fn radii_parsing() {
        let r = parse_radii("pow:3:2:4").unwrap();
        assert_eq!(r.len(), 3);
        assert!((r[0] - 1.0 / 9.0).abs() < 1e-15);
        assert!((r[2] - 1.0 / 81.0).abs() < 1e-15);

        assert_eq!(parse_radii("0.5,0.25").unwrap(), vec![0.5, 0.25]);
        assert!(parse_radii("0.25,0.5").is_err());
        assert!(parse_radii("pow:1:2:4").is_err());
        assert!(parse_radii("pow:3:4:2").is_err());
        assert!(parse_radii("-0.5").is_err());
    }

    #[test]
    fn window_and_point_parsing() {
        let w = parse_window("6:12").unwrap();
        assert_eq!((w.lo, w.hi), (6, 12));
        let w = parse_window("7").unwrap();
        assert_eq!((w.lo, w.hi), (7, 7));
        assert!(parse_window("12:6").is_err());
        assert!(parse_window("0:3").is_err());

        assert_eq!(parse_point("0.5").unwrap(), vec![0.5]);
        assert_eq!(parse_point("0.1, 0.2").unwrap(), vec![0.1, 0.2]);
        assert!(parse_point("x").is_err());
    }

    #[test]
    fn measure_spec_parsing_and_building() {
        let ifs = cantor();

        let k = parse_measure_spec(r#"{ "kind": "natural", "resolution": 0.2 }"#).unwrap();
        let (mu, _) = build_measure(&ifs, &k, 0).unwrap();
        assert_eq!(mu.len(), 4);

        let k = parse_measure_spec(r#"{ "kind": "typical", "n": 8, "j": 4, "seed": 3 }"#).unwrap();
        let (mu, diag) = build_measure(&ifs, &k, 0).unwrap();
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
        assert_eq!(diag["seed"], serde_json::json!(3));

        let k = parse_measure_spec(r#"{ "kind": "random", "size": 5 }"#).unwrap();
        let (a, _) = build_measure(&ifs, &k, 11).unwrap();
        let (b, _) = build_measure(&ifs, &k, 11).unwrap();
        assert_eq!(a.atoms(), b.atoms());

        let k = parse_measure_spec(
            r#"{ "kind": "cascade", "theta": 1.0, "levels": [2, 4, 8] }"#,
        )
        .unwrap();
        let (mu, diag) = build_measure(&ifs, &k, 0).unwrap();
        assert_eq!(mu.len(), 16);
        assert_eq!(diag["cells_per_level"], serde_json::json!([2, 4, 16]));

        let k = parse_measure_spec(r#"{ "kind": "atomic", "rows": [[0.0, 0.5], [1.0, 0.5]] }"#)
            .unwrap();
        let (mu, _) = build_measure(&ifs, &k, 0).unwrap();
        assert_eq!(mu.len(), 2);

        // dirac_mix with a valid schedule: d < e^-e, theta > 2/s.
        let k = parse_measure_spec(
            r#"{ "kind": "dirac_mix", "n": 1, "d": 1e-4, "theta": 4.0, "seed": 5 }"#,
        )
        .unwrap();
        let (mu, diag) = build_measure(&ifs, &k, 0).unwrap();
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
        assert!(diag["schedule"]["alpha_n"].as_f64().unwrap() > 0.0);

        let k = parse_measure_spec(r#"{ "kind": "packing_mix", "n": 2, "seed": 1 }"#).unwrap();
        let (mu, _) = build_measure(&ifs, &k, 0).unwrap();
        assert!((mu.total_mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measure_spec_rejects_bad_shapes() {
        assert!(parse_measure_spec(r#"{ "kind": "nope" }"#).is_err());
        assert!(parse_measure_spec(r#"{ "resolution": 0.2 }"#).is_err());
        assert!(parse_measure_spec(r#"[1, 2]"#).is_err());
        // Unknown key within a kind.
        let err = parse_measure_spec(r#"{ "kind": "natural", "resolution": 0.2, "extra": 1 }"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("extra"), "{err}");
        // Cascade needs exactly one schedule source.
        let k = parse_measure_spec(r#"{ "kind": "cascade", "theta": 1.0 }"#).unwrap();
        assert!(build_measure(&cantor(), &k, 0).is_err());
        let k = parse_measure_spec(
            r#"{ "kind": "cascade", "theta": 1.0, "levels": [2, 4], "j1": 2 }"#,
        )
        .unwrap();
        assert!(build_measure(&cantor(), &k, 0).is_err());
    }

    #[test]
    fn measure_csv_round_trips_exactly() {
        let ifs = cantor();
        let (mu, _) = build_measure(
            &ifs,
            &parse_measure_spec(r#"{ "kind": "random", "size": 7, "seed": 2 }"#).unwrap(),
            0,
        )
        .unwrap();
        let text = measure_csv(&mu);
        let back = parse_measure_csv(&text).unwrap();
        assert_eq!(mu.atoms(), back.atoms());
        assert!(parse_measure_csv("0.5,abc\n").is_err());
    }

    #[test]
    fn envelope_is_deterministic() {
        let a = render_envelope("dim", json!({"ifs": "cantor"}), json!({"s": 0.63}), json!({}));
        let b = render_envelope("dim", json!({"ifs": "cantor"}), json!({"s": 0.63}), json!({}));
        assert_eq!(a, b);
        assert!(a.ends_with('\n'));
        let v: Value = serde_json::from_str(&a).unwrap();
        assert_eq!(v["command"], "dim");
    }

    #[test]
    fn out_path_uses_env_dir_for_relative_paths() {
        // Relative path without the env var set stays as-is.
        std::env::remove_var("FRACLAB_OUT_DIR");
        assert_eq!(resolve_out_path("report.json"), PathBuf::from("report.json"));
        assert_eq!(resolve_out_path("/tmp/x.json"), PathBuf::from("/tmp/x.json"));
    }
}

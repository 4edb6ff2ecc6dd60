use clap::{Args, Parser, Subcommand, ValueEnum};
use fraclab::cascade::check_tree_invariants;
use fraclab::error::{Error, Result};
use fraclab::ifs::{cut_set, load_ifs_json, IfsSystem};
use fraclab::metric::{bl_distance, witness_integral_gap};
use fraclab::report::{
    build_cascade_from_kind, build_measure, curve_csv, measure_csv, parse_grid, parse_point,
    parse_radii, parse_window, render_envelope, resolve_measure_arg, resolve_out_path,
    MeasureKind,
};
use fraclab::spectrum::{
    cascade_scaling_check, coarse_spectrum, legendre_transform, local_holder, tau_estimate,
    upper_box_dimension, verify_anchor_mass, verify_formalism,
};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "fraclab",
    version,
    about = "Analysis toolkit for self-similar sets and measures on them"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct Common {
    /// IFS description file (JSON).
    #[arg(long)]
    ifs: PathBuf,
    /// Seed for randomized constructions (measure specs without their own).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write output to this file instead of stdout; relative paths are
    /// joined with FRACLAB_OUT_DIR when that variable is set.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Similarity dimension: the root of the Moran equation.
    Dim {
        #[command(flatten)]
        common: Common,
    },
    /// Stopping-time word family at a resolution, with anchors.
    Cutset {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        resolution: f64,
    },
    /// Materialize a measure spec into an atom list.
    BuildMeasure {
        #[command(flatten)]
        common: Common,
        /// Inline JSON spec, a JSON spec file, or a CSV atom file.
        #[arg(long)]
        measure: String,
    },
    /// Bounded-Lipschitz distance between two measures.
    BlDist {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        mu: String,
        #[arg(long)]
        nu: String,
    },
    /// Lq partition spectrum estimate over a level window.
    Tau {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        measure: String,
        /// q grid (a:b:n, comma list, or single value).
        #[arg(long, default_value = "0:1:11")]
        q: String,
        /// Histogram level window lo:hi.
        #[arg(long, default_value = "6:12")]
        levels: String,
        /// Also write an SVG plot of the curve here.
        #[arg(long)]
        svg: Option<String>,
    },
    /// Legendre transform of the tau estimate.
    Legendre {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        measure: String,
        #[arg(long, default_value = "0:1:11")]
        q: String,
        #[arg(long, default_value = "6:12")]
        levels: String,
        /// h grid for the transform.
        #[arg(long, default_value = "0:1:21")]
        h: String,
        #[arg(long)]
        svg: Option<String>,
    },
    /// Coarse large-deviation spectrum.
    Coarse {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        measure: String,
        #[arg(long, default_value = "6:12")]
        levels: String,
        /// Exponent bin centers.
        #[arg(long, default_value = "0:1.6:33")]
        h: String,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long)]
        svg: Option<String>,
    },
    /// Local mass-scaling exponent at a point.
    Holder {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        measure: String,
        /// Point coordinates, comma separated.
        #[arg(long)]
        point: String,
        /// Strictly decreasing radii (pow:B:M1:M2 or comma list).
        #[arg(long)]
        radii: String,
    },
    /// Packing-based upper box dimension of the attractor.
    Boxdim {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        radii: String,
    },
    /// Build a cascade tree and report its structure.
    Cascade {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        theta: f64,
        /// Explicit strictly increasing J schedule, comma separated.
        #[arg(long)]
        levels: Option<String>,
        /// First J of the default geometric schedule (needs --depth).
        #[arg(long)]
        j1: Option<u32>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Check cascade invariants and mass scaling.
    CascadeCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        levels: Option<String>,
        #[arg(long)]
        j1: Option<u32>,
        #[arg(long)]
        depth: Option<usize>,
        /// Reference exponent; defaults to the similarity dimension.
        #[arg(long)]
        s: Option<f64>,
    },
    /// Verify the anchor-ball mass lower bound at one scale.
    VerifyLemma {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        measure: String,
        #[arg(long)]
        theta: f64,
        /// Cut-set scale exponent J (anchors at resolution 2^-J).
        #[arg(long, value_name = "J")]
        level_j: u32,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long)]
        s: Option<f64>,
    },
    /// Verify the spectrum identities and the concavity bound.
    VerifyFormalism {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        measure: String,
        #[arg(long, default_value = "0:1:11")]
        q: String,
        #[arg(long, default_value = "0.1:0.6:11")]
        h: String,
        #[arg(long, default_value = "6:12")]
        levels: String,
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
        #[arg(long)]
        s: Option<f64>,
    },
}

fn load_ifs(common: &Common) -> Result<IfsSystem> {
    let text = std::fs::read_to_string(&common.ifs).map_err(|e| {
        Error::input(format!("cannot read IFS file '{}': {e}", common.ifs.display()))
    })?;
    load_ifs_json(&text)
}

fn base_inputs(common: &Common, ifs: &IfsSystem) -> Value {
    json!({
        "ifs_path": common.ifs.display().to_string(),
        "ifs_name": ifs.name,
        "seed": common.seed,
    })
}

fn merge_inputs(mut base: Value, extra: Value) -> Value {
    if let (Some(b), Some(e)) = (base.as_object_mut(), extra.as_object()) {
        for (k, v) in e {
            b.insert(k.clone(), v.clone());
        }
    }
    base
}

fn emit(common: &Common, body: String) -> Result<()> {
    match &common.out {
        Some(path) => {
            let p = resolve_out_path(path);
            std::fs::write(&p, body)?;
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn emit_svg(path: &str, curve: &fraclab::spectrum::SpectrumCurve, title: &str) -> Result<()> {
    let doc = fraclab::svg::render_curve(curve, title);
    std::fs::write(resolve_out_path(path), doc)?;
    Ok(())
}

fn measure_from_arg(
    ifs: &IfsSystem,
    arg: &str,
    seed: u64,
) -> Result<(fraclab::measure::AtomicMeasure, Value)> {
    let kind = resolve_measure_arg(arg)?;
    build_measure(ifs, &kind, seed)
}

fn dimension_or(ifs: &IfsSystem, s: Option<f64>) -> Result<f64> {
    match s {
        Some(v) => Ok(v),
        None => ifs.dimension_value(1e-13),
    }
}

fn curve_text(name: &str, curve: &fraclab::spectrum::SpectrumCurve) -> String {
    let mut out = String::new();
    for p in &curve.points {
        let _ = writeln!(out, "{name}({:.4}) = {:.6}", p.x, p.value);
    }
    if curve.resolution_flagged {
        out.push_str("note: window reaches below the measure's resolution floor\n");
    }
    out
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Dim { common } => {
            let ifs = load_ifs(&common)?;
            let s = ifs.dimension_value(1e-13)?;
            let inputs = merge_inputs(base_inputs(&common, &ifs), json!({"tol": 1e-13}));
            let results = json!({ "s": s, "ratios": ifs.ratios() });
            let body = match common.format {
                Format::Text => format!("s = {s:.10}\n"),
                Format::Json => render_envelope("dim", inputs, results, json!({})),
                Format::Csv => format!("s\n{s}\n"),
            };
            emit(&common, body)?;
            Ok(0)
        }

        Command::Cutset { common, resolution } => {
            let ifs = load_ifs(&common)?;
            let s = ifs.dimension_value(1e-13)?;
            let cs = cut_set(&ifs, resolution)?;
            let norm = ifs.normalization();
            let base = ifs.default_base();
            let rows: Vec<(String, f64, Vec<f64>)> = cs
                .words
                .iter()
                .map(|w| {
                    let a = fraclab::ifs::anchor_point(&ifs, w, &base)?;
                    Ok((w.label(), w.ratio, norm.to_unit(&a)))
                })
                .collect::<Result<_>>()?;
            let partition = cs.partition_of_unity(s);
            let inputs =
                merge_inputs(base_inputs(&common, &ifs), json!({"resolution": resolution}));
            const WORD_CAP: usize = 10_000;
            let listed: Vec<Value> = rows
                .iter()
                .take(WORD_CAP)
                .map(|(label, ratio, anchor)| json!({"word": label, "ratio": ratio, "anchor": anchor}))
                .collect();
            let results = json!({
                "count": rows.len(),
                "partition_of_unity": partition,
                "cardinality_constant": cs.cardinality_constant(s),
                "s": s,
                "words": listed,
                "words_truncated": rows.len() > WORD_CAP,
            });
            let body = match common.format {
                Format::Text => format!(
                    "count = {}\npartition_of_unity = {partition:.12}\n",
                    rows.len()
                ),
                Format::Json => render_envelope("cutset", inputs, results, json!({})),
                Format::Csv => {
                    let mut out = String::from("word,ratio,anchor\n");
                    for (label, ratio, anchor) in &rows {
                        let coords: Vec<String> =
                            anchor.iter().map(|c| format!("{c}")).collect();
                        let _ = writeln!(out, "{label},{ratio},{}", coords.join(" "));
                    }
                    out
                }
            };
            emit(&common, body)?;
            Ok(0)
        }

        Command::BuildMeasure { common, measure } => {
            let ifs = load_ifs(&common)?;
            let (mu, diag) = measure_from_arg(&ifs, &measure, common.seed)?;
            let inputs = merge_inputs(base_inputs(&common, &ifs), json!({"measure": measure}));
            let results = json!({
                "count": mu.len(),
                "total_mass": mu.total_mass(),
                "atoms": mu.to_rows(),
            });
            let body = match common.format {
                Format::Text => {
                    format!("atoms = {}\ntotal_mass = {:.12}\n", mu.len(), mu.total_mass())
                }
                Format::Json => render_envelope("build-measure", inputs, results, diag),
                Format::Csv => measure_csv(&mu),
            };
            emit(&common, body)?;
            Ok(0)
        }

        Command::BlDist { common, mu, nu } => {
            let ifs = load_ifs(&common)?;
            let (a, diag_a) = measure_from_arg(&ifs, &mu, common.seed)?;
            let (b, diag_b) = measure_from_arg(&ifs, &nu, common.seed)?;
            let (value, witness) = bl_distance(&a, &b)?;
            let gap = witness_integral_gap(&witness, &a, &b);
            let inputs =
                merge_inputs(base_inputs(&common, &ifs), json!({"mu": mu, "nu": nu}));
            let witness_rows: Vec<Vec<f64>> = witness
                .support
                .iter()
                .zip(&witness.values)
                .map(|(x, v)| {
                    let mut row = x.clone();
                    row.push(*v);
                    row
                })
                .collect();
            let results = json!({
                "distance": value,
                "witness": witness_rows,
            });
            let diagnostics = json!({
                "mu": diag_a,
                "nu": diag_b,
                "witness_violation": witness.max_violation(),
                "witness_integral_gap": gap,
                "attainment_error": (gap - value).abs(),
            });
            let body = match common.format {
                Format::Text => format!("distance = {value}\n"),
                Format::Json => render_envelope("bl-dist", inputs, results, diagnostics),
                Format::Csv => format!("distance\n{value}\n"),
            };
            emit(&common, body)?;
            Ok(0)
        }

        Command::Tau { common, measure, q, levels, svg } => {
            let ifs = load_ifs(&common)?;
            let (mu, diag) = measure_from_arg(&ifs, &measure, common.seed)?;
            let q_grid = parse_grid(&q)?;
            let window = parse_window(&levels)?;
            let curve = tau_estimate(&mu, window, &q_grid)?;
            if let Some(path) = &svg {
                emit_svg(path, &curve, "Lq spectrum estimate")?;
            }
            let inputs = merge_inputs(
                base_inputs(&common, &ifs),
                json!({"measure": measure, "q": q_grid, "levels": [window.lo, window.hi]}),
            );
            let diagnostics = json!({
                "measure": diag,
                "resolution_flagged": curve.resolution_flagged,
            });
            let body = match common.format {
                Format::Text => curve_text("tau", &curve),
                Format::Json => {
                    render_envelope("tau", inputs, serde_json::to_value(&curve)?, diagnostics)
                }
                Format::Csv => curve_csv(&curve),
            };
            emit(&common, body)?;
            Ok(0)
        }

        Command::Legendre { common, measure, q, levels, h, svg } => {
            let ifs = load_ifs(&common)?;
            let (mu, diag) = measure_from_arg(&ifs, &measure, common.seed)?;
            let q_grid = parse_grid(&q)?;
            let h_grid = parse_grid(&h)?;
            let window = parse_window(&levels)?;
            let tau = tau_estimate(&mu, window, &q_grid)?;
            let curve = legendre_transform(&tau, &h_grid)?;
            if let Some(path) = &svg {
                emit_svg(path, &curve, "Legendre transform of tau")?;
            }
            let inputs = merge_inputs(
                base_inputs(&common, &ifs),
                json!({
                    "measure": measure, "q": q_grid, "h": h_grid,
                    "levels": [window.lo, window.hi],
                }),
            );
            let results = json!({
                "tau": serde_json::to_value(&tau)?,
                "legendre": serde_json::to_value(&curve)?,
            });
            let diagnostics =
                json!({"measure": diag, "resolution_flagged": tau.resolution_flagged});
            let body = match common.format {
                Format::Text => curve_text("tau_star", &curve),
                Format::Json => render_envelope("legendre", inputs, results, diagnostics),
                Format::Csv => curve_csv(&curve),
            };
            emit(&common, body)?;
            Ok(0)
        }

        Command::Coarse { common, measure, levels, h, eps, svg } => {
            let ifs = load_ifs(&common)?;
            let (mu, diag) = measure_from_arg(&ifs, &measure, common.seed)?;
            let h_bins = parse_grid(&h)?;
            let window = parse_window(&levels)?;
            let curve = coarse_spectrum(&mu, window, &h_bins, eps)?;
            if let Some(path) = &svg {
                emit_svg(path, &curve, "coarse spectrum")?;
            }
            let inputs = merge_inputs(
                base_inputs(&common, &ifs),
                json!({
                    "measure": measure, "h": h_bins, "eps": eps,
                    "levels": [window.lo, window.hi],
                }),
            );
            let diagnostics =
                json!({"measure": diag, "resolution_flagged": curve.resolution_flagged});
            let body = match common.format {
                Format::Text => curve_text("f", &curve),
                Format::Json => {
                    render_envelope("coarse", inputs, serde_json::to_value(&curve)?, diagnostics)
                }
                Format::Csv => curve_csv(&curve),
            };
            emit(&common, body)?;
            Ok(0)
        }

        Command::Holder { common, measure, point, radii } => {
            let ifs = load_ifs(&common)?;
            let (mu, diag) = measure_from_arg(&ifs, &measure, common.seed)?;
            let x = parse_point(&point)?;
            let r = parse_radii(&radii)?;
            let est = local_holder(&mu, &x, &r)?;
            let inputs = merge_inputs(
                base_inputs(&common, &ifs),
                json!({"measure": measure, "point": x, "radii": r}),
            );
            let body = match common.format {
                Format::Text => {
                    format!("slope = {}\nmin_chord = {}\n", est.slope, est.min_chord)
                }
                Format::Json => render_envelope(
                    "holder",
                    inputs,
                    serde_json::to_value(&est)?,
                    json!({"measure": diag}),
                ),
                Format::Csv => {
                    let mut out = String::from("ln_r,ln_mass\n");
                    for (lr, lm) in &est.log_pairs {
                        let _ = writeln!(out, "{lr},{lm}");
                    }
                    out
                }
            };
            emit(&common, body)?;
            Ok(0)
        }

        Command::Boxdim { common, radii } => {
            let ifs = load_ifs(&common)?;
            let r = parse_radii(&radii)?;
            let est = upper_box_dimension(&ifs, &r)?;
            let inputs = merge_inputs(base_inputs(&common, &ifs), json!({"radii": r}));
            let body = match common.format {
                Format::Text => format!("estimate = {}\n", est.estimate),
                Format::Json => {
                    render_envelope("boxdim", inputs, serde_json::to_value(&est)?, json!({}))
                }
                Format::Csv => {
                    let mut out = String::from("r,count\n");
                    for (rv, n) in &est.counts {
                        let _ = writeln!(out, "{rv},{n}");
                    }
                    out
                }
            };
            emit(&common, body)?;
            Ok(0)
        }

        Command::Cascade { common, theta, levels, j1, depth } => {
            let ifs = load_ifs(&common)?;
            let kind = cascade_kind(theta, &levels, j1, depth)?;
            let tree = build_cascade_from_kind(&ifs, &kind)?;
            check_tree_invariants(&tree)?;
            let inputs = merge_inputs(
                base_inputs(&common, &ifs),
                json!({"theta": theta, "levels": tree.level_schedule, "depth": tree.depth()}),
            );
            let results = tree_summary(&tree);
            let body = match common.format {
                Format::Text => {
                    let cells: Vec<usize> =
                        tree.levels.iter().map(|l| l.balls.len()).collect();
                    format!(
                        "levels = {:?}\ncells = {cells:?}\ngrowth_condition = {:?}\n",
                        tree.level_schedule, tree.growth_condition
                    )
                }
                Format::Json => render_envelope("cascade", inputs, results, json!({})),
                Format::Csv => {
                    let mut out = String::from("level,j,cells,ball_radius,r_p\n");
                    for (i, l) in tree.levels.iter().enumerate() {
                        let rp = l.r_p.map(|v| format!("{v}")).unwrap_or_default();
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{rp}",
                            i + 1,
                            l.j,
                            l.balls.len(),
                            l.ball_radius
                        );
                    }
                    out
                }
            };
            emit(&common, body)?;
            Ok(0)
        }

        Command::CascadeCheck { common, theta, levels, j1, depth, s } => {
            let ifs = load_ifs(&common)?;
            let kind = cascade_kind(theta, &levels, j1, depth)?;
            let tree = build_cascade_from_kind(&ifs, &kind)?;
            let s = dimension_or(&ifs, s)?;
            let invariants = check_tree_invariants(&tree);
            let invariants_ok = invariants.is_ok();
            let invariant_error = invariants.err().map(|e| e.to_string());
            let scaling = cascade_scaling_check(&tree, s, common.seed)?;
            let deepest = scaling.levels.last().expect("depth >= 2");
            let deepest_in_window = deepest.cells_in_window == deepest.cells;
            let inputs = merge_inputs(
                base_inputs(&common, &ifs),
                json!({"theta": theta, "levels": tree.level_schedule, "s": s}),
            );
            let results = json!({
                "invariants_ok": invariants_ok,
                "invariant_error": invariant_error,
                "scaling": serde_json::to_value(&scaling)?,
            });
            let diagnostics = json!({
                "deepest_in_window": deepest_in_window,
                "growth_condition": tree.growth_condition,
            });
            let body = match common.format {
                Format::Text => {
                    let mut out = format!(
                        "invariants = {}\n",
                        if invariants_ok { "ok" } else { "VIOLATED" }
                    );
                    for l in &scaling.levels {
                        let _ = writeln!(
                            out,
                            "stage {} (J = {}): exponents [{:.6}, {:.6}], window [{:.6}, {:.6}], in window {}/{}",
                            l.stage, l.j, l.exponent_min, l.exponent_max,
                            l.window_lo, l.window_hi, l.cells_in_window, l.cells
                        );
                    }
                    let _ = writeln!(out, "empirical_c = {}", scaling.empirical_c);
                    out
                }
                Format::Json => render_envelope("cascade-check", inputs, results, diagnostics),
                Format::Csv => {
                    let mut out = String::from(
                        "stage,j,cells,exponent_min,exponent_max,window_lo,window_hi,in_window\n",
                    );
                    for l in &scaling.levels {
                        let _ = writeln!(
                            out,
                            "{},{},{},{},{},{},{},{}",
                            l.stage, l.j, l.cells, l.exponent_min, l.exponent_max,
                            l.window_lo, l.window_hi, l.cells_in_window
                        );
                    }
                    out
                }
            };
            emit(&common, body)?;
            Ok(if invariants_ok { 0 } else { 1 })
        }

        Command::VerifyLemma { common, measure, theta, level_j, eps, s } => {
            let ifs = load_ifs(&common)?;
            let (mu, diag) = measure_from_arg(&ifs, &measure, common.seed)?;
            let s = dimension_or(&ifs, s)?;
            let report = verify_anchor_mass(&mu, &ifs, theta, level_j, s, eps)?;
            let inputs = merge_inputs(
                base_inputs(&common, &ifs),
                json!({
                    "measure": measure, "theta": theta, "level_j": level_j,
                    "eps": eps, "s": s,
                }),
            );
            let pass = report.positive;
            let body = match common.format {
                Format::Text => format!(
                    "anchors = {}\nmin_ratio = {}\nmax_ratio = {}\n{}\n",
                    report.anchor_count,
                    report.min_ratio,
                    report.max_ratio,
                    if pass { "PASS" } else { "FAIL" }
                ),
                Format::Json => render_envelope(
                    "verify-lemma",
                    inputs,
                    serde_json::to_value(&report)?,
                    json!({"measure": diag}),
                ),
                Format::Csv => format!(
                    "anchors,min_ratio,max_ratio,positive\n{},{},{},{}\n",
                    report.anchor_count, report.min_ratio, report.max_ratio, report.positive
                ),
            };
            emit(&common, body)?;
            Ok(if pass { 0 } else { 1 })
        }

        Command::VerifyFormalism { common, measure, q, h, levels, tol, s } => {
            let ifs = load_ifs(&common)?;
            let (mu, diag) = measure_from_arg(&ifs, &measure, common.seed)?;
            let q_grid = parse_grid(&q)?;
            let h_grid = parse_grid(&h)?;
            let window = parse_window(&levels)?;
            let s = dimension_or(&ifs, s)?;
            let report = verify_formalism(&mu, s, &q_grid, &h_grid, window, tol)?;
            let inputs = merge_inputs(
                base_inputs(&common, &ifs),
                json!({
                    "measure": measure, "q": q_grid, "h": h_grid,
                    "levels": [window.lo, window.hi], "tol": tol, "s": s,
                }),
            );
            let pass = report.pass;
            let body = match common.format {
                Format::Text => format!(
                    "tau_dev_max = {}\nlegendre_dev_max = {}\nconcavity = {}\n{}\n",
                    report.tau_dev_max,
                    report.legendre_dev_max,
                    if report.concavity_ok { "ok" } else { "VIOLATED" },
                    if pass { "PASS" } else { "FAIL" }
                ),
                Format::Json => render_envelope(
                    "verify-formalism",
                    inputs,
                    serde_json::to_value(&report)?,
                    json!({"measure": diag}),
                ),
                Format::Csv => format!(
                    "tau_dev_max,legendre_dev_max,concavity_ok,pass\n{},{},{},{}\n",
                    report.tau_dev_max, report.legendre_dev_max, report.concavity_ok, pass
                ),
            };
            emit(&common, body)?;
            Ok(if pass { 0 } else { 1 })
        }
    }
}

fn cascade_kind(
    theta: f64,
    levels: &Option<String>,
    j1: Option<u32>,
    depth: Option<usize>,
) -> Result<MeasureKind> {
    let parsed_levels = match levels {
        Some(text) => Some(
            text.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::input(format!("level '{t}' is not an integer")))
                })
                .collect::<Result<Vec<u32>>>()?,
        ),
        None => None,
    };
    Ok(MeasureKind::Cascade { theta, levels: parsed_levels, j1, depth, level: None })
}

fn tree_summary(tree: &fraclab::cascade::CascadeTree) -> Value {
    let levels: Vec<Value> = tree
        .levels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            json!({
                "stage": i + 1,
                "j": l.j,
                "cells": l.balls.len(),
                "ball_radius": l.ball_radius,
                "selection_radius": l.selection_radius,
                "r_p": l.r_p,
                "pool_sizes": l.pool_sizes,
            })
        })
        .collect();
    json!({
        "theta": tree.theta,
        "level_schedule": tree.level_schedule,
        "growth_condition": tree.growth_condition,
        "levels": levels,
    })
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    };
    std::process::exit(code);
}

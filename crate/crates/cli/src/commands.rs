use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};

use forge_core::encoder::{encode as encode_trace, encode_discrete_trace, SelectionBudget};
use forge_core::presentations::{abelianization, free_power, FinitePresentation};
use forge_core::quotients::{
    has_nontrivial_quotient_upto, search_order_targeted, word_survives_upto, OrderSpec, SearchBudget,
    SearchReport,
};
use forge_core::report::{run_encode_and_probe, RunReport, Status};
use forge_core::squarecx::format::{parse_complex, write_complex};
use forge_core::squarecx::{
    build_s_of_p, check_link_condition, pi1_presentation, EdgeLoop, Origin, SquareComplex,
};
use forge_core::stallings::format::{parse_base, parse_graph, write_graph};
use forge_core::stallings::{
    core, fibre_product, fold_with_stats, malnormal_family_check, translate_family_check, BaseGraph,
    FamilyReport, GraphImmersion, RelabelingAction,
};
use forge_core::words::Word;

use crate::{GraphArgs, Outcome, SearchArgs};

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn done(report: RunReport) -> Result<Outcome> {
    Ok(Outcome {
        report,
        artifact: None,
    })
}

fn with_artifact(mut report: RunReport, out: Option<PathBuf>, text: String) -> Result<Outcome> {
    if let Some(path) = &out {
        report.artifact(&path.display().to_string());
    }
    Ok(Outcome {
        report,
        artifact: Some((out, text)),
    })
}

fn load_presentation(path: &Path, report: &mut RunReport) -> Result<FinitePresentation> {
    let text = read(path)?;
    report.input("presentation", &text);
    FinitePresentation::parse(&text).with_context(|| format!("in {}", path.display()))
}

struct LoadedGraph {
    immersion: GraphImmersion,
    folds: usize,
    base_ref: Option<String>,
}

fn load_base(graph_path: &Path, base_ref: Option<&str>, over: Option<&Path>) -> Result<(PathBuf, String)> {
    let path = match (over, base_ref) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(r)) => graph_path.parent().unwrap_or(Path::new(".")).join(r),
        (None, None) => bail!("{} names no base graph; pass --base", graph_path.display()),
    };
    let text = read(&path)?;
    Ok((path, text))
}

/// Reads a graph file and folds it over `base` (loaded from the file's
/// `base` line when not given).
fn load_graph(
    path: &Path,
    base: Option<&Arc<BaseGraph>>,
    base_override: Option<&Path>,
    report: &mut RunReport,
) -> Result<(LoadedGraph, Arc<BaseGraph>)> {
    let text = read(path)?;
    report.input(&format!("graph {}", path.display()), &text);
    let file = parse_graph(&text).with_context(|| format!("in {}", path.display()))?;
    let base = match base {
        Some(b) => b.clone(),
        None => {
            let (bpath, btext) = load_base(path, file.base_ref.as_deref(), base_override)?;
            report.input("base", &btext);
            Arc::new(parse_base(&btext).with_context(|| format!("in {}", bpath.display()))?)
        }
    };
    let map = file.bind(base.clone()).with_context(|| format!("in {}", path.display()))?;
    let (immersion, stats) = fold_with_stats(&map);
    Ok((
        LoadedGraph {
            immersion,
            folds: stats.folds,
            base_ref: file.base_ref.clone(),
        },
        base,
    ))
}

fn describe_components(report: &mut RunReport, y: &GraphImmersion) {
    report
        .detail("vertices", y.domain().vertex_count())
        .detail("edges", y.domain().edge_count());
    for (i, c) in y.rank().iter().enumerate() {
        report.detail(
            &format!("component {i}"),
            format!("vertices {}, edges {}, rank {}", c.vertices, c.edges, c.rank),
        );
    }
}

pub fn fold(input: &GraphArgs, trim: bool, out: Option<PathBuf>) -> Result<Outcome> {
    let mut report = RunReport::new(if trim { "core" } else { "fold" });
    let (g, _) = load_graph(&input.graph, None, input.base.as_deref(), &mut report)?;
    let y = if trim { core(&g.immersion) } else { g.immersion };
    report.status = Status::Certified;
    report.detail("folds", g.folds);
    describe_components(&mut report, &y);
    let text = write_graph(&y, g.base_ref.as_deref());
    with_artifact(report, out, text)
}

pub fn fibre(first: &Path, second: &Path, base: Option<&Path>) -> Result<Outcome> {
    let mut report = RunReport::new("fibre");
    let (a, b_graph) = load_graph(first, None, base, &mut report)?;
    let (b, _) = load_graph(second, Some(&b_graph), base, &mut report)?;
    let p = fibre_product(&a.immersion, &b.immersion)?;
    report.status = Status::Certified;
    report
        .detail("vertices", p.graph.vertex_count())
        .detail("edges", p.graph.edge_count())
        .detail("components", p.components.len());
    for (i, c) in p.components.iter().enumerate() {
        report.detail(
            &format!("component {i}"),
            format!(
                "vertices {}, edges {}, rank {}, tree {}, diagonal {}",
                c.vertices,
                c.edges,
                c.rank,
                yes(c.is_tree),
                yes(c.is_diagonal)
            ),
        );
    }
    done(report)
}

fn describe_family(report: &mut RunReport, family: &FamilyReport) {
    report.status = if family.certified() {
        Status::Certified
    } else {
        Status::Refuted
    };
    for pair in &family.pairs {
        let bad = pair
            .components
            .iter()
            .filter(|c| !c.is_tree && !c.is_diagonal)
            .count();
        report.detail(
            &format!("pair {} {}", pair.first, pair.second),
            format!("components {}, non-tree off-diagonal {bad}", pair.components.len()),
        );
    }
    if let Some(w) = &family.witness {
        report
            .detail("witness pair", format!("{} {}", w.first, w.second))
            .detail("witness component", w.component)
            .detail("witness rank", w.rank)
            .detail("witness element", &w.element)
            .detail("witness conjugator", &w.conjugator);
    }
}

pub fn malnormal(graphs: &[PathBuf], base: Option<&Path>, rotations: bool) -> Result<Outcome> {
    let mut report = RunReport::new("malnormal");
    let (first, x) = load_graph(&graphs[0], None, base, &mut report)?;
    let mut family = vec![first.immersion];
    for g in &graphs[1..] {
        family.push(load_graph(g, Some(&x), base, &mut report)?.0.immersion);
    }
    if rotations {
        if family.len() != 1 {
            bail!("--rotations takes a single graph");
        }
        let action = RelabelingAction::cyclic_rotation(&x)?;
        let r = translate_family_check(&x, &family[0], action.elements())?;
        report.detail("translates", r.translates);
        describe_family(&mut report, &r.family);
    } else {
        report.detail("family", family.len());
        describe_family(&mut report, &malnormal_family_check(&family)?);
    }
    done(report)
}

pub fn abel(path: &Path) -> Result<Outcome> {
    let mut report = RunReport::new("abel");
    let p = load_presentation(path, &mut report)?;
    let a = abelianization(&p);
    report.status = Status::Certified;
    let torsion: Vec<String> = a.torsion.iter().map(|d| d.to_string()).collect();
    report
        .detail("betti", a.betti)
        .detail("torsion", if torsion.is_empty() { "none".into() } else { torsion.join(" ") })
        .detail("abelianization", &a);
    done(report)
}

pub fn freepow(path: &Path, n: usize, out: Option<PathBuf>) -> Result<Outcome> {
    let mut report = RunReport::new("freepow");
    let p = load_presentation(path, &mut report)?;
    let q = free_power(&p, n)?;
    report.status = Status::Certified;
    report
        .detail("copies", n)
        .detail("generators", q.generator_count())
        .detail("relators", q.relator_count());
    with_artifact(report, out, q.to_text())
}

pub fn encode(
    path: &Path,
    word: &str,
    modulus: u32,
    budget: Option<u64>,
    discrete: bool,
    out: Option<PathBuf>,
) -> Result<Outcome> {
    let mut report = RunReport::new("encode");
    let p = load_presentation(path, &mut report)?;
    report.input("word", word);
    let w = Word::parse(word)?;
    let trace = if discrete {
        encode_discrete_trace(&p, &w)?
    } else {
        let mut selection = SelectionBudget::default();
        if let Some(k) = budget {
            selection.max_candidates = k;
        }
        encode_trace(&p, &w, modulus, &selection)?
    };
    report.status = Status::Certified;
    report.detail("variant", &trace.variant);
    if !discrete {
        report.detail("modulus", trace.modulus);
    }
    report.detail("short circuit", yes(trace.short_circuit));
    for s in &trace.stages {
        report.detail(
            &format!("stage {}", s.stage),
            format!(
                "generators {}, relators {}, abelianization {}",
                s.generators, s.relators, s.abelianization
            ),
        );
    }
    if let Some(c) = &trace.certificate {
        report
            .detail("tuple", trace.tuple_uv.join(", "))
            .detail("certificate", if c.is_valid() { "valid" } else { "invalid" })
            .detail("candidates examined", trace.candidates_examined);
    }
    report.detail("trace digest", trace.digest());
    let json = trace.to_json();
    with_artifact(report, out, json + "\n")
}

fn search_budget(max_degree: usize, args: &SearchArgs) -> Result<SearchBudget> {
    let mut budget = SearchBudget::new(max_degree, args.max_nodes)?;
    if let Some(secs) = args.time_limit {
        if !(secs.is_finite() && secs > 0.0) {
            bail!("--time-limit must be positive");
        }
        budget = budget.with_time_limit(Duration::from_secs_f64(secs));
    }
    Ok(budget)
}

fn describe_search(report: &mut RunReport, r: &SearchReport) {
    report.status = r.status().into();
    for d in &r.degrees {
        report.detail(
            &format!("degree {}", d.degree),
            format!("nodes {}, complete {}", d.nodes, yes(d.complete)),
        );
    }
    if let Some(q) = &r.witness {
        report.detail("witness", q);
    }
    report.detail("search", r.summary());
}

fn parse_orders(text: &str) -> Result<(u64, Vec<u64>)> {
    let (kappa, rest) = text
        .split_once(':')
        .ok_or_else(|| anyhow!("--orders expects `κ:e1,e2,...`"))?;
    let kappa = kappa.trim().parse().context("bad κ in --orders")?;
    let exponents = rest
        .split(',')
        .map(|e| e.trim().parse::<u64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .context("bad exponent in --orders")?;
    Ok((kappa, exponents))
}

pub fn quotients(
    path: &Path,
    max_degree: usize,
    word: Option<&str>,
    orders: Option<&str>,
    targets: Option<&str>,
    args: &SearchArgs,
) -> Result<Outcome> {
    let mut report = RunReport::new("quotients");
    let p = load_presentation(path, &mut report)?;
    let budget = search_budget(max_degree, args)?;
    let result = if let Some(word) = word {
        report.input("word", word);
        let w = p.alphabet().parse_word(word)?;
        word_survives_upto(&p, &w, &budget)?
    } else if let Some(orders) = orders {
        let (kappa, exponents) = parse_orders(orders)?;
        let targets: Vec<Word> = match targets {
            Some(t) => t
                .split(',')
                .map(|s| p.alphabet().parse_word(s.trim()))
                .collect::<forge_core::Result<_>>()?,
            None => {
                if p.generator_count() < exponents.len() {
                    bail!("more exponents than generators; pass --targets");
                }
                p.generators()[..exponents.len()]
                    .iter()
                    .map(Word::generator)
                    .collect()
            }
        };
        report.detail(
            "targets",
            targets.iter().map(Word::to_string).collect::<Vec<_>>().join(", "),
        );
        let spec = OrderSpec::new(targets, kappa, exponents)?;
        search_order_targeted(&p, &spec, &budget)?
    } else {
        has_nontrivial_quotient_upto(&p, &budget)?
    };
    describe_search(&mut report, &result);
    done(report)
}

fn load_complex(path: &Path, label: &str, report: &mut RunReport) -> Result<SquareComplex> {
    let text = read(path)?;
    report.input(label, &text);
    parse_complex(&text).with_context(|| format!("in {}", path.display()))
}

fn describe_complex(report: &mut RunReport, c: &SquareComplex) {
    report
        .detail("vertices", c.vertex_count())
        .detail("edges", c.edge_count())
        .detail("squares", c.square_count())
        .detail("euler characteristic", c.euler_characteristic());
}

pub fn sqc_check(path: &Path) -> Result<Outcome> {
    let mut report = RunReport::new("sqc check");
    let c = load_complex(path, "complex", &mut report)?;
    describe_complex(&mut report, &c);
    let links = check_link_condition(&c);
    report.status = if links.holds() {
        Status::Certified
    } else {
        Status::Refuted
    };
    report.detail("link condition", yes(links.holds()));
    for v in &links.violations {
        report.detail("violation", v);
    }
    done(report)
}

pub fn sqc_build(pres: &Path, complex: &Path, gamma: &str, out: Option<PathBuf>) -> Result<Outcome> {
    let mut report = RunReport::new("sqc build");
    let p = load_presentation(pres, &mut report)?;
    let x = load_complex(complex, "complex", &mut report)?;
    report.input("gamma", gamma);
    let gamma = EdgeLoop::parse(&x, gamma)?;
    let s = build_s_of_p(&p, &x, &gamma)?;
    describe_complex(&mut report, &s.complex);
    report
        .detail(
            "expected euler characteristic",
            s.expected_euler_characteristic(p.generator_count(), &x),
        )
        .detail("expected squares", s.expected_squares(&x));
    let count = |o: fn(usize) -> Origin| -> usize {
        (0..p.relator_count())
            .map(|j| s.provenance.squares.iter().filter(|&&x| x == o(j)).count())
            .sum()
    };
    report
        .detail("copy squares", count(Origin::Copy))
        .detail("cylinder squares", count(Origin::Cylinder));
    let links = check_link_condition(&s.complex);
    report.status = if links.holds() {
        Status::Certified
    } else {
        Status::Refuted
    };
    report.detail("link condition", yes(links.holds()));
    for v in &links.violations {
        report.detail("violation", v);
    }
    with_artifact(report, out, write_complex(&s.complex))
}

pub fn sqc_pi1(path: &Path, out: Option<PathBuf>) -> Result<Outcome> {
    let mut report = RunReport::new("sqc pi1");
    let c = load_complex(path, "complex", &mut report)?;
    let p = pi1_presentation(&c)?;
    report.status = Status::Certified;
    report
        .detail("generators", p.generator_count())
        .detail("relators", p.relator_count())
        .detail("abelianization", abelianization(&p));
    with_artifact(report, out, p.to_text())
}

pub fn probe(path: &Path, word: &str, max_degree: usize, modulus: u32, args: &SearchArgs) -> Result<Outcome> {
    let text = read(path)?;
    let p = FinitePresentation::parse(&text).with_context(|| format!("in {}", path.display()))?;
    let w = Word::parse(word)?;
    let budget = search_budget(max_degree, args)?;
    done(run_encode_and_probe(
        &p,
        &w,
        modulus,
        &SelectionBudget::default(),
        &budget,
    ))
}

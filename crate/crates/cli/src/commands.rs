//! Subcommand bodies. Each returns the rendered output and its exit code.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use hecke_cells::cells::{
    cross_check, find_descriptor, region_descriptors, region_manifest, CellDescriptor, CellError,
    ResolvedCell,
};
use hecke_cells::conjectures::{
    bimodule_commutes, check_all, check_distinguished, hypothesis_audit, required_table_radius,
    ConjectureContext, ConjectureError,
};
use hecke_cells::coxeter::{GroupError, GroupType, Universe};
use hecke_cells::decomposition::{
    verify_assumption, verify_corollary_dec, verify_theorem_dec, CellContext, DecompError,
};
use hecke_cells::hecke::{HeckeAlgebra, HeckeError, Weights};
use hecke_cells::identities::{case_labels, regress_identities, special_c_forms};
use hecke_cells::klbasis::{AValues, KlError, KlTable};
use hecke_cells::report::{render_all, Report, Status};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{BasisArg, Check, Command, Format, RunConfig};
use crate::output::{exit_code, severity, worst, ResultEntry};
use crate::Failure;

pub struct Output {
    pub text: String,
    pub code: u8,
}

const DEFAULT_BALL: usize = 4;
const DEFAULT_INNER: usize = 6;
const DEFAULT_SEARCH: usize = 6;
const DEFAULT_ASSUMPTION_LEN: usize = 8;
const DEFAULT_DEC_LEN: usize = 10;
const DEFAULT_CONJ_RADIUS: usize = 8;
const DEFAULT_BIMODULE_TABLE: usize = 14;
const BIMODULE_XY_LEN: usize = 3;
const BIMODULE_W_LEN: usize = 8;

pub fn run(cfg: &RunConfig, cmd: &Command) -> Result<Output, Failure> {
    match cmd {
        Command::Ball => ball(cfg),
        Command::Kl { w } => kl(cfg, w),
        Command::Mult { x, y } => mult(cfg, x, y),
        Command::Cells => cells(cfg),
        Command::Avalue { w } => avalue(cfg, w),
        Command::Verify { what } => verify(cfg, *what),
        Command::Report => report(cfg),
    }
}

fn group_err(e: GroupError) -> Failure {
    match e {
        GroupError::OutOfBall { .. } => Failure::out_of_ball(e.to_string()),
        _ => Failure::config(e.to_string()),
    }
}

fn kl_err(e: KlError) -> Failure {
    if e.is_out_of_ball() {
        Failure::out_of_ball(e.to_string())
    } else {
        Failure::config(e.to_string())
    }
}

fn hecke_err(e: HeckeError) -> Failure {
    match e {
        HeckeError::Group(g) => group_err(g),
        e => Failure::config(e.to_string()),
    }
}

fn decomp_err(e: DecompError) -> Failure {
    if e.is_out_of_ball() {
        Failure::out_of_ball(e.to_string())
    } else {
        Failure::config(e.to_string())
    }
}

fn cell_err(e: CellError) -> Failure {
    match e {
        CellError::Group(g) => group_err(g),
        e => Failure::config(e.to_string()),
    }
}

fn conj_err(e: ConjectureError) -> Failure {
    match e {
        ConjectureError::Kl(k) => kl_err(k),
        e => Failure::config(e.to_string()),
    }
}

/// Length of a word after checking that it names an element.
fn word_length(ty: GroupType, word: &str) -> Result<usize, Failure> {
    let u = Universe::new(ty, 0);
    let m = u.system().parse(word).map_err(group_err)?;
    Ok(u.system().length(&m))
}

fn table(w: Weights, radius: usize) -> Result<KlTable, Failure> {
    KlTable::new(w, radius).map_err(kl_err)
}

fn render(cfg: &RunConfig, text: String, results: Value, code: u8) -> Output {
    let text = match cfg.format {
        Format::Text => text,
        Format::Json => {
            let doc = json!({ "config": cfg, "results": results });
            serde_json::to_string_pretty(&doc).expect("serialisable") + "\n"
        }
    };
    Output { text, code }
}

fn reports_output(cfg: &RunConfig, reports: &[Report]) -> Output {
    let entries: Vec<ResultEntry> = reports.iter().map(ResultEntry::from).collect();
    render(
        cfg,
        render_all(reports),
        serde_json::to_value(entries).expect("serialisable"),
        exit_code(reports),
    )
}

fn ball(cfg: &RunConfig) -> Result<Output, Failure> {
    let r = cfg.radius.unwrap_or(DEFAULT_BALL);
    let u = Universe::new(cfg.ty, r);
    let sizes = u.growth();
    let line = sizes
        .iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    Ok(render(
        cfg,
        format!("{line}\n"),
        json!([{ "id": "ball", "radius": r, "sizes": sizes }]),
        0,
    ))
}

fn kl(cfg: &RunConfig, word: &str) -> Result<Output, Failure> {
    let len = word_length(cfg.ty, word)?;
    let t = table(cfg.w, len)?;
    let u = t.universe();
    let w = u.parse(word).map_err(group_err)?;
    let c = t.c_elem(w).map_err(kl_err)?;
    let text = c.render(u);
    let name = u.format(w);
    Ok(render(
        cfg,
        format!("C[{name}] = {text}\n"),
        json!([{ "id": "kl", "element": name, "expansion": text }]),
        0,
    ))
}

fn mult(cfg: &RunConfig, xw: &str, yw: &str) -> Result<Output, Failure> {
    let len = word_length(cfg.ty, xw)? + word_length(cfg.ty, yw)?;
    let (lhs, text) = match cfg.basis {
        BasisArg::T => {
            let u = Arc::new(Universe::new(cfg.ty, len));
            let alg = HeckeAlgebra::new(u.clone(), cfg.w).map_err(hecke_err)?;
            let x = u.parse(xw).map_err(group_err)?;
            let y = u.parse(yw).map_err(group_err)?;
            let p = alg.mul_t(x, y).map_err(hecke_err)?;
            (
                format!("T[{}]*T[{}]", u.format(x), u.format(y)),
                p.render(&u),
            )
        }
        BasisArg::C => {
            let t = table(cfg.w, len)?;
            let u = t.universe();
            let x = u.parse(xw).map_err(group_err)?;
            let y = u.parse(yw).map_err(group_err)?;
            let p = t.c_product(x, y).map_err(kl_err)?;
            (
                format!("C[{}]*C[{}]", u.format(x), u.format(y)),
                p.render(u),
            )
        }
    };
    Ok(render(
        cfg,
        format!("{lhs} = {text}\n"),
        json!([{ "id": "mult", "product": lhs, "expansion": text }]),
        0,
    ))
}

/// `max l(d) + 2` over the cells listed for the weights.
fn slack(descs: &[CellDescriptor]) -> usize {
    descs
        .iter()
        .flat_map(|d| d.pieces.iter())
        .map(|p| p.d.len())
        .max()
        .unwrap_or(0)
        + 2
}

fn cells(cfg: &RunConfig) -> Result<Output, Failure> {
    let descs = region_descriptors(&cfg.w);
    let inner = cfg.inner_radius.unwrap_or(DEFAULT_INNER);
    let slack = slack(&descs);
    let radius = cfg.radius.unwrap_or(inner + slack);
    if inner + slack > radius {
        return Err(Failure::config(format!(
            "inner radius {inner} plus slack {slack} exceeds radius {radius}"
        )));
    }
    let t = table(cfg.w, radius)?;
    let reports = cross_check(&t, &descs, inner).map_err(kl_err)?;
    let u = t.universe();
    let encoded: Vec<ResolvedCell> = descs
        .iter()
        .map(|d| ResolvedCell::resolve(d, u, inner))
        .collect::<Result<_, _>>()
        .map_err(cell_err)?;
    let mut text = String::new();
    let mut listed = Vec::new();
    for (d, c) in descs.iter().zip(&encoded) {
        text.push_str(&format!(
            "# encoded {} ({} elements up to length {inner})\n",
            d.dump(),
            c.len()
        ));
        listed.push(json!({ "cell": d.dump(), "elements": c.len() }));
    }
    text.push_str(&render_all(&reports));
    let entries: Vec<ResultEntry> = reports.iter().map(ResultEntry::from).collect();
    let mut out = render(
        cfg,
        text,
        serde_json::to_value(entries).expect("serialisable"),
        exit_code(&reports),
    );
    if cfg.format == Format::Json {
        let doc = json!({ "config": cfg, "encoded": listed, "results": reports.iter().map(ResultEntry::from).collect::<Vec<_>>() });
        out.text = serde_json::to_string_pretty(&doc).expect("serialisable") + "\n";
    }
    Ok(out)
}

fn avalue(cfg: &RunConfig, word: &str) -> Result<Output, Failure> {
    let len = word_length(cfg.ty, word)?;
    let r = cfg.radius.unwrap_or(DEFAULT_SEARCH.max(len));
    let t = table(cfg.w, required_table_radius(r))?;
    let u = t.universe();
    let z = u.parse(word).map_err(group_err)?;
    let av = AValues::compute(&t, r).map_err(kl_err)?;
    let rep = av.report(z);
    let mut text = if rep.stabilized {
        format!(
            "a({}) = {} (stable from search radius {r} to {})\n",
            rep.element,
            rep.value,
            r + 2
        )
    } else if len > r {
        format!(
            "a({}): length {len} exceeds the search radius {r}\n",
            rep.element
        )
    } else {
        format!(
            "a({}) >= {} (not stable at search radius {r})\n",
            rep.element, rep.value
        )
    };
    if let Some(wit) = av.witness(z) {
        text.push_str(&format!(
            "# witness: deg h(C[{}], C[{}]) = {}\n",
            u.format(wit.x),
            u.format(wit.y),
            wit.degree
        ));
    }
    let code = match (rep.stabilized, len > r) {
        (true, _) => 0,
        (false, true) => 3,
        (false, false) => 1,
    };
    Ok(render(
        cfg,
        text,
        json!([{ "id": "avalue", "report": rep }]),
        code,
    ))
}

/// The (cell label, weights) pairs a check runs on.
fn selection(cfg: &RunConfig) -> Result<Vec<(String, Weights)>, Failure> {
    let out: Vec<(String, Weights)> = match (&cfg.region, cfg.explicit_weights) {
        (Some(label), _) => {
            find_descriptor(&cfg.w, label).map_err(cell_err)?;
            vec![(label.clone(), cfg.w)]
        }
        (None, true) => region_descriptors(&cfg.w)
            .into_iter()
            .map(|d| (d.label, cfg.w))
            .collect(),
        (None, false) => region_manifest(cfg.ty)
            .into_iter()
            .map(|(l, w)| (l.to_string(), w))
            .collect(),
    };
    if out.is_empty() {
        return Err(Failure::config("the selection is empty".into()));
    }
    Ok(out)
}

/// Weight manifests a weight-level check runs on: the given weights, the
/// region's, or every manifest of the type.
fn weight_selection(cfg: &RunConfig) -> Vec<(String, Weights)> {
    if cfg.explicit_weights || cfg.region.is_some() {
        let label = cfg.region.clone().unwrap_or_else(|| cfg.w.to_string());
        return vec![(label, cfg.w)];
    }
    region_manifest(cfg.ty)
        .into_iter()
        .map(|(l, w)| (l.to_string(), w))
        .collect()
}

fn identity_radius(ty: GroupType) -> usize {
    match ty {
        GroupType::C2 => 14,
        GroupType::G2 => 21,
    }
}

/// Groups labels by weights so each table is built once.
fn by_weights(sel: Vec<(String, Weights)>) -> Vec<(Weights, Vec<String>)> {
    let mut groups: Vec<(Weights, Vec<String>)> = Vec::new();
    for (label, w) in sel {
        match groups.iter_mut().find(|(g, _)| *g == w) {
            Some((_, v)) => v.push(label),
            None => groups.push((w, vec![label])),
        }
    }
    groups
}

fn cell_checks(cfg: &RunConfig, what: Check) -> Result<Vec<Report>, Failure> {
    let mut reports = Vec::new();
    for (w, labels) in by_weights(selection(cfg)?) {
        let descs: Vec<CellDescriptor> = labels
            .iter()
            .map(|l| find_descriptor(&w, l))
            .collect::<Result<_, _>>()
            .map_err(cell_err)?;
        let max_d = descs
            .iter()
            .flat_map(|d| d.pieces.iter())
            .map(|p| p.d.len())
            .max()
            .unwrap_or(0);
        let len = cfg.max_len.unwrap_or(match what {
            // with a long d the scope of ass:i.d is empty below l(d) + 6
            Check::Assumptions => DEFAULT_ASSUMPTION_LEN.max(max_d + 6),
            _ => DEFAULT_DEC_LEN,
        });
        let radius = cfg.radius.unwrap_or(len + max_d + 2);
        let t = table(w, radius)?;
        for d in &descs {
            let ctx = CellContext::new(&t, d).map_err(decomp_err)?;
            reports.extend(match what {
                Check::Assumptions => verify_assumption(&ctx, len),
                Check::Decomposition => verify_theorem_dec(&ctx, len),
                Check::Corollary => verify_corollary_dec(&ctx, len),
                _ => unreachable!("not a cell check"),
            });
        }
    }
    Ok(reports)
}

fn forms(cfg: &RunConfig) -> Result<Vec<Report>, Failure> {
    let radius = cfg.radius.unwrap_or(12);
    let mut reports = Vec::new();
    for (w, _) in by_weights(weight_selection(cfg)) {
        let t = table(w, radius)?;
        reports.extend(special_c_forms(&t));
    }
    if reports.is_empty() {
        return Err(Failure::config(
            "no closed form applies to the selected weights".into(),
        ));
    }
    Ok(reports)
}

fn identities(cfg: &RunConfig) -> Result<Vec<Report>, Failure> {
    let prefix = format!("{}:", cfg.ty);
    let mut sel = Vec::new();
    for label in case_labels().into_iter().filter(|l| l.starts_with(&prefix)) {
        if cfg.region.as_deref().is_some_and(|r| r != label) {
            continue;
        }
        let w = if cfg.explicit_weights {
            cfg.w
        } else {
            match hecke_cells::cells::manifest_weights(label) {
                Some(w) => w,
                None => continue,
            }
        };
        if find_descriptor(&w, label).is_ok() {
            sel.push((label.to_string(), w));
        }
    }
    if sel.is_empty() {
        return Err(Failure::config(
            "no recorded identities for the selection".into(),
        ));
    }
    let radius = cfg.radius.unwrap_or(identity_radius(cfg.ty));
    let mut reports = Vec::new();
    for (w, labels) in by_weights(sel) {
        let t = table(w, radius)?;
        for l in labels {
            reports.push(regress_identities(&t, &l).map_err(decomp_err)?);
        }
    }
    Ok(reports)
}

fn conjecture_checks(cfg: &RunConfig, what: Check) -> Result<Vec<Report>, Failure> {
    let r = cfg.radius.unwrap_or(DEFAULT_CONJ_RADIUS);
    let t = table(cfg.w, required_table_radius(r))?;
    let ctx = ConjectureContext::new(&t, r).map_err(conj_err)?;
    Ok(match what {
        Check::Conjectures => check_all(&ctx, &cfg.conjectures),
        _ => {
            let mut v = hypothesis_audit(&ctx);
            v.extend(check_distinguished(&ctx));
            v
        }
    })
}

fn bimodule(cfg: &RunConfig) -> Result<Vec<Report>, Failure> {
    let radius = cfg.radius.unwrap_or(DEFAULT_BIMODULE_TABLE);
    let w_len = cfg.max_len.unwrap_or(BIMODULE_W_LEN);
    let mut reports = Vec::new();
    for (w, labels) in by_weights(selection(cfg)?) {
        let t = table(w, radius)?;
        for l in labels {
            let d = find_descriptor(&w, &l).map_err(cell_err)?;
            let cell = ResolvedCell::resolve(&d, t.universe(), radius).map_err(cell_err)?;
            reports.push(bimodule_commutes(&t, &cell, BIMODULE_XY_LEN, w_len));
        }
    }
    Ok(reports)
}

fn run_check(cfg: &RunConfig, what: Check) -> Result<Vec<Report>, Failure> {
    match what {
        Check::Assumptions | Check::Decomposition | Check::Corollary => cell_checks(cfg, what),
        Check::Forms => forms(cfg),
        Check::Identities => identities(cfg),
        Check::Conjectures | Check::Involutions => conjecture_checks(cfg, what),
        Check::Bimodule => bimodule(cfg),
    }
}

fn verify(cfg: &RunConfig, what: Check) -> Result<Output, Failure> {
    let reports = run_check(cfg, what)?;
    Ok(reports_output(cfg, &reports))
}

#[derive(Serialize)]
struct MatrixRow {
    region: String,
    weights: String,
    statuses: BTreeMap<String, String>,
}

const MATRIX_COLUMNS: [&str; 5] = [
    "assumptions",
    "decomposition",
    "corollary",
    "forms",
    "identities",
];

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::fs(format!("{}: {e}", path.display())))
}

/// Runs the cell-level checks for each region and writes the matrix and
/// per-cell a-value tables.
fn report(cfg: &RunConfig) -> Result<Output, Failure> {
    let dir = cfg
        .out_dir
        .as_ref()
        .ok_or_else(|| Failure::config("report needs --out-dir".into()))?;
    let regions: Vec<(String, Weights)> = region_manifest(cfg.ty)
        .into_iter()
        .filter(|(l, _)| cfg.region.as_deref().is_none_or(|r| r == *l))
        .map(|(l, w)| (l.to_string(), w))
        .collect();
    if regions.is_empty() {
        return Err(Failure::config(format!(
            "no region of type {} matches {}",
            cfg.ty,
            cfg.region.as_deref().unwrap_or("")
        )));
    }
    fs::create_dir_all(dir.join("avalues"))
        .map_err(|e| Failure::fs(format!("{}: {e}", dir.display())))?;
    let search = cfg.radius.unwrap_or(DEFAULT_CONJ_RADIUS);
    let mut rows = Vec::new();
    let mut all = Vec::new();
    for (label, w) in &regions {
        let mut sub = cfg.clone();
        sub.region = Some(label.clone());
        sub.w = *w;
        sub.explicit_weights = true;
        sub.radius = None;
        let mut statuses = BTreeMap::new();
        for (name, what) in MATRIX_COLUMNS.iter().zip([
            Check::Assumptions,
            Check::Decomposition,
            Check::Corollary,
            Check::Forms,
            Check::Identities,
        ]) {
            let status = match run_check(&sub, what) {
                Ok(reps) => {
                    let s = worst(&reps).map_or("-".to_string(), |s| s.to_string());
                    all.extend(reps);
                    s
                }
                Err(f) if f.code == 2 => "-".to_string(),
                Err(f) => return Err(f),
            };
            statuses.insert(name.to_string(), status);
        }
        rows.push(MatrixRow {
            region: label.clone(),
            weights: w.to_string(),
            statuses,
        });
        write(
            &dir.join("avalues")
                .join(format!("{}.txt", label.replace(':', "_"))),
            &avalue_table(*w, search)?,
        )?;
    }
    let mut text = format!("region weights {}\n", MATRIX_COLUMNS.join(" "));
    for row in &rows {
        let cols: Vec<&str> = MATRIX_COLUMNS
            .iter()
            .map(|c| row.statuses[*c].as_str())
            .collect();
        text.push_str(&format!(
            "{} {} {}\n",
            row.region,
            row.weights,
            cols.join(" ")
        ));
    }
    write(&dir.join(format!("matrix-{}.txt", cfg.ty)), &text)?;
    let json = serde_json::to_string_pretty(&json!({ "config": cfg, "rows": rows }))
        .expect("serialisable");
    write(&dir.join(format!("matrix-{}.json", cfg.ty)), &(json + "\n"))?;
    let code = if all
        .iter()
        .any(|r| severity(r.status) > severity(Status::Mismatch))
    {
        exit_code(&all)
    } else {
        0
    };
    Ok(render(
        cfg,
        text,
        serde_json::to_value(&rows).expect("serialisable"),
        code,
    ))
}

/// `element a stable` for each listed cell, elements up to the search radius.
fn avalue_table(w: Weights, search: usize) -> Result<String, Failure> {
    let t = table(w, required_table_radius(search))?;
    let u = t.universe();
    let av = AValues::compute(&t, search).map_err(kl_err)?;
    let mut out = format!("# weights {w}, search radius {search}\n");
    for d in region_descriptors(&w) {
        let cell = ResolvedCell::resolve(&d, u, search).map_err(cell_err)?;
        out.push_str(&format!("{}\n", d.label));
        for z in cell.members() {
            let r = av.report(z);
            let a = if r.stabilized {
                r.value.to_string()
            } else {
                format!(">={}", r.value)
            };
            out.push_str(&format!("  {} {a}\n", u.format(z)));
        }
    }
    Ok(out)
}

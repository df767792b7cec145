//! Report sections. Each stage yields a JSON value and a text rendering.

use hollowtree::bintab::{moments, CountTable};
use hollowtree::graph::{classify, prime_decomposition, Graph, GraphFile};
use hollowtree::infer::{
    decomposed_tests, fit_hollow_tree, ipf_fit, lambda_tstats, screen_3factor, select_structure, symmetrize_table, FitReport, IpfOptions,
    Model, ScreenMethod, Selection, TstatMethod,
};
use hollowtree::io::{DecompositionJson, FitJson, MatrixJson, SelectionJson};
use hollowtree::lincalc::concentration_and_theta;
use hollowtree::{Error, NodeSet, Result};
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt::Write;

pub struct Section {
    pub json: Value,
    pub text: String,
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report types serialize")
}

fn label(s: NodeSet) -> String {
    if s.is_empty() {
        "const".into()
    } else {
        s.labels().iter().map(|l| l.to_string()).collect::<Vec<_>>().join("")
    }
}

fn sets(v: &[NodeSet]) -> String {
    v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")
}

fn matrix_text(name: &str, m: &MatrixJson) -> String {
    let mut out = format!("{name}\n");
    for row in m.data.chunks(m.cols.max(1)) {
        let row: Vec<String> = row.iter().map(|x| format!("{x:>8.3}")).collect();
        let _ = writeln!(out, "{}", row.join(""));
    }
    out
}

pub fn decompose(g: &Graph) -> Result<Section> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let dec = prime_decomposition(g)?;
    let class = classify(g)?;
    let j = DecompositionJson::new(&dec, class);
    let mut text = String::new();
    let _ = writeln!(text, "primes:  {}", sets(&j.primes));
    let _ = writeln!(text, "cutsets: {}", sets(&j.cutsets));
    let _ = writeln!(text, "scheme:  {}", sets(&j.scheme));
    let _ = writeln!(text, "final:   {}", j.final_prime);
    let _ = writeln!(text, "class:   {class:?}");
    Ok(Section { json: to_value(&j), text })
}

pub fn classify_graph(g: &Graph) -> Result<Section> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let class = classify(g)?;
    Ok(Section {
        json: json!({ "class": class, "hollow": class.is_hollow() }),
        text: format!("class: {class:?}\nhollow: {}\n", class.is_hollow()),
    })
}

pub fn screen(counts: &CountTable, method: ScreenMethod) -> Result<Section> {
    let r = screen_3factor(counts, method)?;
    let mut text = String::from("triple,xi,t\n");
    for row in &r.rows {
        let _ = writeln!(text, "{},{:.6},{:.4}", label(row.triple), row.xi, row.t);
    }
    let _ = writeln!(text, "# close to Ising (all |t| < 2): {}", r.close_to_ising);
    Ok(Section { json: to_value(&r), text })
}

pub fn symmetrize(counts: &CountTable, opts: IpfOptions) -> Result<Section> {
    let p = symmetrize_table(counts, opts)?;
    let rho = moments(&p)?.rho;
    let theta = concentration_and_theta(&rho)?.theta;
    let (rho, theta) = (MatrixJson::from(&rho), MatrixJson::from(&theta));
    let json = json!({ "probs": p.probs(), "rho": rho, "theta": theta });
    let text = matrix_text("correlations", &rho) + &matrix_text("partial correlations", &theta);
    Ok(Section { json, text })
}

pub fn select(counts: &CountTable, threshold: f64, opts: IpfOptions) -> Result<(Section, Selection)> {
    let s = select_structure(counts, threshold, opts)?;
    let j = SelectionJson::new(&s, threshold);
    let mut text = format!("threshold {threshold}\n");
    let removed: Vec<String> = j.removed.iter().map(|[a, b]| format!("{a}{b}")).collect();
    let kept: Vec<String> = j.graph.edges.iter().map(|[a, b]| format!("{a}{b}")).collect();
    let _ = writeln!(text, "removed: {}", removed.join(" "));
    let _ = writeln!(text, "edges:   {}", kept.join(" "));
    match s.class {
        Some(c) => {
            let _ = writeln!(text, "class:   {c:?}");
        }
        None => text.push_str("class:   disconnected\n"),
    }
    text += &matrix_text("partial correlations before", &j.theta_before);
    text += &matrix_text("partial correlations after", &j.theta_after);
    Ok((Section { json: to_value(&j), text }, s))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Route {
    /// Prime-by-prime fit for hollow trees, IPF otherwise.
    Auto,
    Ipf,
    Hollow,
}

fn is_hollow(g: &Graph) -> Result<bool> {
    Ok(g.is_connected() && classify(g)?.is_hollow())
}

pub fn run_fit(counts: &CountTable, g: &Graph, model: Model, route: Route, tstat: TstatMethod, opts: IpfOptions) -> Result<(FitReport, &'static str)> {
    let hollow = match route {
        Route::Ipf => false,
        Route::Hollow => true,
        Route::Auto => is_hollow(g)?,
    };
    let (mut fit, name) = if hollow {
        (fit_hollow_tree(counts, g, model, opts)?, "hollow_tree")
    } else {
        (ipf_fit(counts, g, model, opts)?, "ipf")
    };
    if tstat != TstatMethod::default() {
        fit.tstats = lambda_tstats(&fit, tstat)?;
    }
    Ok((fit, name))
}

pub fn fit_text(f: &FitReport) -> String {
    let text = format!("model {:?}  n {}  chi2 {:.2}  df {}  iterations {}\n", f.model, f.n, f.chi2, f.df, f.iterations);
    let mut head = format!("{:<8}", "term");
    let mut lam = format!("{:<8}", "lambda");
    let mut t = format!("{:<8}", "t");
    for &s in &f.free_terms {
        let _ = write!(head, "{:>9}", label(s));
        let _ = write!(lam, "{:>9.3}", f.lambda.get(s));
        match f.tstats.iter().find(|(u, _)| *u == s) {
            Some((_, v)) => {
                let _ = write!(t, "{v:>9.2}");
            }
            None => {
                let _ = write!(t, "{:>9}", "-");
            }
        }
    }
    format!("{text}{head}\n{lam}\n{t}\n")
}

pub fn fit_section(f: &FitReport, route: &str) -> Section {
    let mut json = to_value(&FitJson::from(f));
    json["route"] = json!(route);
    Section { json, text: fit_text(f) }
}

/// General and palindromic fits on `g`, with the deviance of the complete
/// pairwise model and the increase caused by the missing edges.
pub fn fit_both(counts: &CountTable, g: &Graph, route: Route, tstat: TstatMethod, opts: IpfOptions) -> Result<Section> {
    let (gen, r1) = run_fit(counts, g, Model::General, route, tstat, opts)?;
    let (pal, r2) = run_fit(counts, g, Model::Palindromic, route, tstat, opts)?;
    let full = ipf_fit(counts, &Graph::complete(g.d()), Model::General, opts)?;
    let added_chi2 = gen.chi2 - full.chi2;
    let added_df = gen.df - full.df;
    let json = json!({
        "graph": GraphFile::from(g),
        "general": fit_section(&gen, r1).json,
        "palindromic": fit_section(&pal, r2).json,
        "complete": { "chi2": full.chi2, "df": full.df },
        "missing_edges": { "chi2": added_chi2, "df": added_df },
    });
    let mut text = format!("complete pairwise model: chi2 {:.2} on {} df\n", full.chi2, full.df);
    let _ = writeln!(text, "missing edges:           chi2 {:.2} on {} df", added_chi2, added_df);
    text += &fit_text(&gen);
    text += &fit_text(&pal);
    Ok(Section { json, text })
}

pub fn tests(counts: &CountTable, g: &Graph, opts: IpfOptions) -> Result<Section> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let scheme = prime_decomposition(g)?.scheme;
    let tests = decomposed_tests(counts, g, &scheme, opts)?;
    let total: f64 = tests.iter().map(|t| t.statistic).sum();
    let total_df: usize = tests.iter().map(|t| t.df).sum();
    let overall = ipf_fit(counts, g, Model::General, opts)?;
    let json = json!({
        "scheme": scheme,
        "tests": tests,
        "total": { "statistic": total, "df": total_df },
        "deviance": { "statistic": overall.chi2, "df": overall.df },
    });
    let mut text = String::new();
    for t in &tests {
        let _ = writeln!(text, "{:<28} chi2 {:>8.2}  df {:>3}  p {:.4}", t.label(), t.statistic, t.df, t.p_value);
    }
    let _ = writeln!(text, "{:<28} chi2 {:>8.2}  df {:>3}", "total", total, total_df);
    let _ = writeln!(text, "{:<28} chi2 {:>8.2}  df {:>3}", "general Ising deviance", overall.chi2, overall.df);
    Ok(Section { json, text })
}

//! Parameter sweeps over a seeded corpus, CSV output and regression
//! baselines.
//!
//! A plan is plain text with `[section]` headers and `key = value` lines;
//! `#` starts a comment. The `[corpus]` section takes `seed` plus the
//! [`CorpusSpec`] keys. Every other section is named after a verifier and
//! lists comma-separated values per parameter; the sweep runs their
//! cartesian product.
//!
//! ```text
//! [corpus]
//! seed = 1
//! grids = 1x3-8, 2x2-4
//! count = 200
//!
//! [endpoint]
//! eps = 0.1, 0.5, 1
//! ```

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::corpus::{corpus_generate, CorpusSpec, Instance};
use super::{has_explicit_bound, run_verifier, verifier_params, Inputs, Params, VerificationReport};
use crate::error::{Error, Result};

/// Factor applied to a frozen baseline ratio to obtain the asserted bound.
pub const BASELINE_SLACK: f64 = 1.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanSection {
    pub verifier: String,
    /// Parameter name and its values, in plan order.
    pub grid: Vec<(String, Vec<f64>)>,
}

impl PlanSection {
    /// Cartesian product of the parameter lists; the last parameter varies
    /// fastest.
    pub fn points(&self) -> Vec<Params> {
        let mut out = vec![Params::new()];
        for (k, vals) in &self.grid {
            out = out.into_iter().flat_map(|p| vals.iter().map(move |&v| p.clone().with(k, v))).collect();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Plan {
    pub seed: u64,
    pub corpus: CorpusSpec,
    pub sections: Vec<PlanSection>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

impl Plan {
    pub fn parse(text: &str) -> Result<Plan> {
        let mut seed = None;
        let mut corpus = CorpusSpec::default();
        let mut sections: Vec<PlanSection> = Vec::new();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim().to_string();
                if name != "corpus" {
                    verifier_params(&name).map_err(|_| parse_err(line_no, format!("unknown verifier {name:?}")))?;
                    sections.push(PlanSection { verifier: name.clone(), grid: Vec::new() });
                }
                current = Some(name);
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| parse_err(line_no, "expected key = value"))?;
            let (k, v) = (k.trim(), v.trim());
            match current.as_deref() {
                None => return Err(parse_err(line_no, "setting outside of a section")),
                Some("corpus") => {
                    if k == "seed" {
                        seed = Some(v.parse().map_err(|_| parse_err(line_no, format!("bad seed {v:?}")))?);
                    } else {
                        corpus.set(k, v).map_err(|e| parse_err(line_no, e.to_string()))?;
                    }
                }
                Some(verifier) => {
                    let allowed = verifier_params(verifier).expect("checked at the header");
                    if !allowed.contains(&k) {
                        return Err(parse_err(line_no, format!("verifier {verifier} has no parameter {k:?}")));
                    }
                    let vals = v
                        .split(',')
                        .map(|x| x.trim().parse::<f64>())
                        .collect::<std::result::Result<Vec<f64>, _>>()
                        .map_err(|_| parse_err(line_no, format!("bad number list {v:?}")))?;
                    let section = sections.last_mut().expect("section pushed at the header");
                    if section.grid.iter().any(|(name, _)| name == k) {
                        return Err(parse_err(line_no, format!("duplicate parameter {k:?}")));
                    }
                    section.grid.push((k.to_string(), vals));
                }
            }
        }
        let seed = seed.ok_or_else(|| parse_err(0, "the [corpus] section needs a seed"))?;
        for s in &sections {
            for need in verifier_params(&s.verifier)? {
                if *need != "tau" && !s.grid.iter().any(|(k, _)| k == need) {
                    return Err(parse_err(0, format!("verifier {} needs parameter {need}", s.verifier)));
                }
            }
        }
        Ok(Plan { seed, corpus, sections })
    }
}

/// Max ratio per verifier id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Baselines(pub BTreeMap<String, f64>);

impl Baselines {
    pub fn load(path: &Path) -> Result<Baselines> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("baselines serialize") + "\n"
    }

    /// The bound asserted for `verifier`, when it has a baseline.
    pub fn bound(&self, verifier: &str) -> Option<f64> {
        self.0.get(verifier).map(|b| b * BASELINE_SLACK)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub instance_index: usize,
    pub instance: String,
    pub report: VerificationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Max ratio per verifier over this run.
    pub max_ratios: Baselines,
}

const PARAM_COLUMNS: [&str; 4] = ["p", "delta", "eps", "tau"];

impl SweepResult {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.report.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| !r.report.pass)
    }

    /// One CSV row per (verifier, instance, parameter point).
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        let mut header = vec!["verifier", "instance_index", "instance"];
        header.extend(PARAM_COLUMNS);
        header.extend(["lhs", "rhs", "ratio", "bound", "pass", "checks"]);
        w.write_record(&header).map_err(csv_err)?;
        for row in &self.rows {
            let r = &row.report;
            let mut rec = vec![r.id.clone(), row.instance_index.to_string(), row.instance.clone()];
            for c in PARAM_COLUMNS {
                rec.push(r.params.get(c).map(|v| v.to_string()).unwrap_or_default());
            }
            rec.push(r.lhs.to_string());
            rec.push(r.rhs.to_string());
            rec.push(r.ratio.to_string());
            rec.push(r.bound.map(|v| v.to_string()).unwrap_or_default());
            rec.push(r.pass.to_string());
            let checks: Vec<String> = r.checks.iter().map(|c| format!("{}={}", c.name, c.value)).collect();
            rec.push(checks.join(";"));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn run_instance(section: &PlanSection, points: &[Params], inst: &Instance, baselines: Option<&Baselines>) -> Result<Vec<SweepRow>> {
    let family = super::default_family(&inst.f)?;
    let sigma_family;
    let family = if section.verifier == "cor16a" {
        sigma_family = super::default_family(&inst.f.abs().mul(&inst.sigma)?)?;
        &sigma_family
    } else {
        &family
    };
    let inputs = Inputs { f: &inst.f, w: &inst.w, sigma: Some(&inst.sigma), family: Some(family) };
    points
        .iter()
        .map(|params| {
            let mut report = run_verifier(&section.verifier, inputs, params)
                .map_err(|e| Error::param(format!("{} on {}: {e}", section.verifier, inst.descriptor())))?;
            report.instance = inst.descriptor();
            if !has_explicit_bound(&section.verifier) {
                if let Some(b) = baselines.and_then(|b| b.bound(&section.verifier)) {
                    report = report.with_bound(b);
                }
            }
            Ok(SweepRow { instance_index: inst.index, instance: inst.descriptor(), report })
        })
        .collect()
}

/// Runs every plan section over the whole corpus. Rows come out ordered by
/// (section, instance, parameter point) regardless of scheduling.
pub fn run_sweep(plan: &Plan, baselines: Option<&Baselines>) -> Result<SweepResult> {
    let corpus = corpus_generate(plan.seed, &plan.corpus)?;
    let mut rows = Vec::new();
    for section in &plan.sections {
        let points = section.points();
        let chunks = corpus
            .instances
            .par_iter()
            .map(|inst| run_instance(section, &points, inst, baselines))
            .collect::<Result<Vec<_>>>()?;
        rows.extend(chunks.into_iter().flatten());
    }
    let mut max_ratios = Baselines::default();
    for r in &rows {
        let e = max_ratios.0.entry(r.report.id.clone()).or_insert(0.0);
        *e = e.max(r.report.ratio);
    }
    Ok(SweepResult { rows, max_ratios })
}

#[cfg(test)]
mod tests {
    use super::*;

    const PLAN: &str = "
# small plan
[corpus]
seed = 11
grids = 1x2-5
weights = cascade:4, power
functions = spike, random
count = 6

[endpoint]
eps = 0.2, 0.6, 1.0

[fs]
";

    #[test]
    fn parse_plan() {
        let plan = Plan::parse(PLAN).unwrap();
        assert_eq!(plan.seed, 11);
        assert_eq!(plan.corpus.count, 6);
        assert_eq!(plan.sections.len(), 2);
        assert_eq!(plan.sections[0].points().len(), 3);
        assert_eq!(plan.sections[1].points(), vec![Params::new()]);
    }

    #[test]
    fn plan_errors() {
        assert!(matches!(Plan::parse("[corpus]\nseed=1\n[bogus]\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(Plan::parse("[corpus]\nseed=1\n[fs]\np = 2\n"), Err(Error::Parse { line: 4, .. })));
        assert!(Plan::parse("[corpus]\ncount=3\n").is_err());
        assert!(Plan::parse("[corpus]\nseed=1\n[lp]\np=2\n").is_err());
        assert!(Plan::parse("seed=1\n").is_err());
        assert!(Plan::parse("[corpus]\nseed=1\nshape=round\n").is_err());
    }

    #[test]
    fn ordered_and_deterministic() {
        let plan = Plan::parse(PLAN).unwrap();
        let a = run_sweep(&plan, None).unwrap();
        let b = run_sweep(&plan, None).unwrap();
        assert_eq!(a.csv_string(), b.csv_string());
        assert_eq!(a.rows.len(), 6 * 3 + 6);
        let ep: Vec<(usize, f64)> =
            a.rows.iter().filter(|r| r.report.id == "endpoint").map(|r| (r.instance_index, r.report.params["eps"])).collect();
        assert!(ep.windows(2).all(|w| w[0] < w[1]));
        assert!(a.all_pass());
    }

    #[test]
    fn baselines_bound_anonymous_verifiers() {
        let plan = Plan::parse(PLAN).unwrap();
        let first = run_sweep(&plan, None).unwrap();
        let frozen = first.max_ratios.clone();
        let again = run_sweep(&plan, Some(&frozen)).unwrap();
        assert!(again.all_pass());
        assert!(again.rows.iter().filter(|r| r.report.id == "endpoint").all(|r| r.report.bound.is_some()));
        let tight = Baselines(frozen.0.iter().map(|(k, v)| (k.clone(), v / 2.0)).collect());
        let strict = run_sweep(&plan, Some(&tight)).unwrap();
        assert!(!strict.all_pass());
        assert!(strict.failures().all(|r| r.report.id == "endpoint"));
        let json = frozen.to_json();
        assert_eq!(serde_json::from_str::<Baselines>(&json).unwrap(), frozen);
    }
}

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sparsedom::dyadic::dgf;
use sparsedom::maximal::{dyadic_maximal, orlicz_maximal};
use sparsedom::norms::{lp_norm, weak_norm};
use sparsedom::orlicz::{luxemburg_norm, parse_young};
use sparsedom::rdf::{rdf_build, DEFAULT_TOL};
use sparsedom::sparse::{is_sparse, ladder_ratio, sparse_from_cz_with_ratio};
use sparsedom::verify::{corpus_generate, run_sweep, run_verifier, Baselines, CorpusSpec, Inputs, Params, Plan};
use sparsedom::weights::{reverse_holder_check, weight_constants, DEFAULT_TAU};
use sparsedom::Cube;

use crate::io::{emit, json, read_dgf, read_family, write_atomic};
use crate::{CliError, Outcome};

#[derive(Debug, Parser)]
#[command(name = "sparsedom", version, about = "Dyadic maximal, sparse and weighted-inequality toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded corpus of DGF1 files plus a manifest.
    Gen {
        #[arg(long)]
        seed: u64,
        /// Generator mix, e.g. "grids=1x8,2x4;weights=power,cascade:4;functions=spike;count=20".
        #[arg(long, default_value = "")]
        spec: String,
        /// Output directory (created if missing).
        #[arg(long)]
        out: PathBuf,
    },
    /// Weighted L^p and weak L^{p,∞} norms, optionally a Luxemburg norm on one cube.
    Norm {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Weight for the Lebesgue norms.
        #[arg(long)]
        w: Option<PathBuf>,
        /// Young function for a Luxemburg norm, e.g. "logbump:p=2,a=1.5".
        #[arg(long)]
        young: Option<String>,
        /// Cube for the Luxemburg norm as LEVEL:I[,J[,K]]; defaults to the root.
        #[arg(long)]
        cube: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dyadic (or Orlicz, with --young) maximal function, written as DGF1.
    Maximal {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        young: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sparse family from iterated Calderón–Zygmund decompositions.
    Sparse {
        #[arg(long = "in")]
        input: PathBuf,
        /// Base level λ₀ of the ladder λ₀ a^k.
        #[arg(long)]
        lambda: f64,
        /// Ladder ratio a; defaults to 2^{n+1} + 1.
        #[arg(long)]
        ratio: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A₁, A_p, A∞ constants and the reverse Hölder check of a weight.
    Constants {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_TAU)]
        tau: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rubio de Francia iteration R(h) and its three properties.
    Rdf {
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        v: PathBuf,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        /// JSON summary.
        #[arg(long)]
        out: Option<PathBuf>,
        /// R(h) itself as DGF1.
        #[arg(long)]
        r_out: Option<PathBuf>,
    },
    /// Run one verifier on one instance.
    Verify(VerifyArgs),
    /// Run a plan over a seeded corpus and write one CSV row per check.
    Sweep {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Baseline file: asserted against, or written with --update-baselines.
        #[arg(long)]
        baselines: Option<PathBuf>,
        /// Write the max ratio per verifier to --baselines instead of checking.
        #[arg(long, requires = "baselines")]
        update_baselines: bool,
    },
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// lemma41, endpoint, lp, cor14, fs, two_weight_max or cor16a.
    pub id: String,
    #[arg(long)]
    pub f: PathBuf,
    /// Weight w (u for the two-weight verifiers).
    #[arg(long)]
    pub w: PathBuf,
    #[arg(long)]
    pub sigma: Option<PathBuf>,
    /// Sparse family JSON; built from f when omitted.
    #[arg(long)]
    pub family: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Bound to assert for verifiers without an explicit constant.
    #[arg(long)]
    pub bound: Option<f64>,
    /// Baseline file supplying the bound (baseline × 1.05).
    #[arg(long, conflicts_with = "bound")]
    pub baselines: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Usage(msg()))
    }
}

/// Range checks done before any file is touched.
fn validate(cmd: &Command) -> Result<(), CliError> {
    let pos = |name: &str, v: f64| require(v > 0.0 && v.is_finite(), || format!("--{name} must be positive, got {v}"));
    let above_one = |name: &str, v: f64| require(v > 1.0 && v.is_finite(), || format!("--{name} must exceed 1, got {v}"));
    let unit = |name: &str, v: f64| require(v > 0.0 && v <= 1.0, || format!("--{name} must lie in (0,1], got {v}"));
    match cmd {
        Command::Norm { p, .. } => require(*p >= 1.0 && p.is_finite(), || format!("--p must be >= 1, got {p}")),
        Command::Sparse { lambda, ratio, .. } => {
            pos("lambda", *lambda)?;
            ratio.map_or(Ok(()), |r| pos("ratio", r))
        }
        Command::Constants { p, tau, .. } => {
            pos("tau", *tau)?;
            p.map_or(Ok(()), |p| above_one("p", p))
        }
        Command::Rdf { s, tol, .. } => {
            above_one("s", *s)?;
            pos("tol", *tol)
        }
        Command::Verify(a) => {
            a.p.map_or(Ok(()), |v| above_one("p", v))?;
            a.delta.map_or(Ok(()), |v| unit("delta", v))?;
            a.eps.map_or(Ok(()), |v| unit("eps", v))?;
            a.tau.map_or(Ok(()), |v| pos("tau", v))?;
            a.bound.map_or(Ok(()), |v| pos("bound", v))
        }
        _ => Ok(()),
    }
}

fn parse_cube(s: &str) -> Result<Cube, CliError> {
    let bad = || CliError::Usage(format!("bad cube {s:?}, expected LEVEL:I[,J[,K]]"));
    let (level, idx) = s.split_once(':').ok_or_else(bad)?;
    let level: u32 = level.trim().parse().map_err(|_| bad())?;
    let idx = idx.split(',').map(|x| x.trim().parse::<u32>()).collect::<Result<Vec<_>, _>>().map_err(|_| bad())?;
    require(idx.len() <= 3, || format!("cube {s:?} has more than 3 coordinates"))?;
    Ok(Cube::new(level, &idx))
}

fn outcome(pass: bool) -> Outcome {
    if pass {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    validate(&cli.command)?;
    match cli.command {
        Command::Gen { seed, spec, out } => gen(seed, &spec, &out),
        Command::Norm { input, p, w, young, cube, out } => {
            norm(&input, p, w.as_deref(), young.as_deref(), cube.as_deref(), out.as_deref())
        }
        Command::Maximal { input, young, out } => {
            let f = read_dgf(&input)?;
            let m = match young {
                Some(y) => orlicz_maximal(&f, &parse_young(&y)?)?,
                None => dyadic_maximal(&f),
            };
            emit(out.as_deref(), &dgf::write_string(&m.output))?;
            Ok(Outcome::Pass)
        }
        Command::Sparse { input, lambda, ratio, out } => {
            let f = read_dgf(&input)?;
            let a = ratio.unwrap_or_else(|| ladder_ratio(f.grid().dim()));
            let fam = sparse_from_cz_with_ratio(&f, lambda, a)?;
            let check = is_sparse(&fam);
            emit(out.as_deref(), &json(&fam.to_json()))?;
            if let Some(v) = &check.violation {
                eprintln!("sparseness violated: {}", serde_json::to_string(v).unwrap_or_default());
            }
            Ok(outcome(check.ok))
        }
        Command::Constants { input, p, tau, out } => {
            let w = read_dgf(&input)?;
            #[derive(Serialize)]
            struct Report {
                constants: sparsedom::weights::WeightConstants,
                reverse_holder: sparsedom::weights::ReverseHolderReport,
            }
            let report = Report { constants: weight_constants(&w, p)?, reverse_holder: reverse_holder_check(&w, tau)? };
            emit(out.as_deref(), &json(&report))?;
            Ok(outcome(report.reverse_holder.passes))
        }
        Command::Rdf { h, v, s, tol, out, r_out } => {
            let (h, v) = (read_dgf(&h)?, read_dgf(&v)?);
            let r = rdf_build(&h, &v, s, tol)?;
            if let Some(path) = r_out {
                write_atomic(&path, dgf::write_string(&r.r).as_bytes())?;
            }
            emit(out.as_deref(), &json(&r.summary(s)))?;
            Ok(outcome(r.property_a && r.property_b && r.a1.is_finite()))
        }
        Command::Verify(args) => verify(args),
        Command::Sweep { plan, out, baselines, update_baselines } => {
            sweep(&plan, &out, baselines.as_deref(), update_baselines)
        }
    }
}

fn gen(seed: u64, spec: &str, out: &Path) -> Result<Outcome, CliError> {
    let spec: CorpusSpec = spec.parse().map_err(|e: sparsedom::Error| CliError::Usage(e.to_string()))?;
    let corpus = corpus_generate(seed, &spec)?;
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    #[derive(Serialize)]
    struct Entry {
        index: usize,
        descriptor: String,
        f: String,
        w: String,
        sigma: String,
        degenerate: bool,
    }
    #[derive(Serialize)]
    struct Manifest {
        seed: u64,
        spec: String,
        instances: Vec<Entry>,
    }
    let mut entries = Vec::new();
    for inst in &corpus.instances {
        let name = |part: &str| format!("{:04}_{part}.dgf", inst.index);
        for (part, g) in [("f", &inst.f), ("w", &inst.w), ("sigma", &inst.sigma)] {
            write_atomic(&out.join(name(part)), dgf::write_string(g).as_bytes())?;
        }
        entries.push(Entry {
            index: inst.index,
            descriptor: inst.descriptor(),
            f: name("f"),
            w: name("w"),
            sigma: name("sigma"),
            degenerate: inst.degenerate,
        });
    }
    let manifest = Manifest { seed, spec: spec.to_string(), instances: entries };
    write_atomic(&out.join("manifest.json"), json(&manifest).as_bytes())?;
    Ok(Outcome::Pass)
}

fn norm(
    input: &Path,
    p: f64,
    w: Option<&Path>,
    young: Option<&str>,
    cube: Option<&str>,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let f = read_dgf(input)?;
    let w = w.map(read_dgf).transpose()?;
    #[derive(Serialize)]
    struct Report {
        p: f64,
        lp: f64,
        weak: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        luxemburg: Option<Lux>,
    }
    #[derive(Serialize)]
    struct Lux {
        young: String,
        cube: Cube,
        value: f64,
        iterations: u32,
    }
    let luxemburg = match young {
        Some(y) => {
            let a = parse_young(y)?;
            let q = cube.map(parse_cube).transpose()?.unwrap_or(Cube::ROOT);
            let r = luxemburg_norm(&f, &q, &a)?;
            Some(Lux { young: a.to_string(), cube: q, value: r.value, iterations: r.iterations })
        }
        None => {
            require(cube.is_none(), || "--cube needs --young".to_string())?;
            None
        }
    };
    let report =
        Report { p, lp: lp_norm(&f, p, w.as_ref())?, weak: weak_norm(&f, p, w.as_ref())?, luxemburg };
    emit(out, &json(&report))?;
    Ok(Outcome::Pass)
}

fn verify(a: VerifyArgs) -> Result<Outcome, CliError> {
    let mut params = Params::new();
    for (k, v) in [("p", a.p), ("delta", a.delta), ("eps", a.eps), ("tau", a.tau)] {
        if let Some(v) = v {
            params = params.with(k, v);
        }
    }
    // reject unknown ids and parameters before reading any input
    sparsedom::verify::verifier_params(&a.id).map_err(|e| CliError::Usage(e.to_string()))?;
    let f = read_dgf(&a.f)?;
    let w = read_dgf(&a.w)?;
    let sigma = a.sigma.as_deref().map(read_dgf).transpose()?;
    let family = a.family.as_deref().map(read_family).transpose()?;
    let inputs = Inputs { f: &f, w: &w, sigma: sigma.as_ref(), family: family.as_ref() };
    let mut report = run_verifier(&a.id, inputs, &params).map_err(|e| match e {
        sparsedom::Error::Unknown { .. } | sparsedom::Error::InvalidParameter(_) => CliError::Usage(e.to_string()),
        other => CliError::Core(other),
    })?;
    report.instance = a.f.display().to_string();
    let bound = match (&a.bound, &a.baselines) {
        (Some(b), _) => Some(*b),
        (None, Some(path)) => Baselines::load(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?.bound(&a.id),
        _ => None,
    };
    if let Some(b) = bound {
        report = report.with_bound(b);
    }
    emit(a.out.as_deref(), &json(&report))?;
    Ok(outcome(report.pass))
}

fn sweep(plan: &Path, out: &Path, baselines: Option<&Path>, update: bool) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(plan).map_err(|e| CliError::io(plan, e))?;
    let plan = Plan::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", plan.display())))?;
    let frozen = match baselines {
        Some(path) if !update => {
            Some(Baselines::load(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?)
        }
        _ => None,
    };
    let result = run_sweep(&plan, frozen.as_ref())?;
    write_atomic(out, result.csv_string().as_bytes())?;
    if update {
        let path = baselines.expect("clap enforces --baselines");
        write_atomic(path, result.max_ratios.to_json().as_bytes())?;
    }
    let failed: Vec<_> = result.failures().collect();
    for r in failed.iter().take(20) {
        eprintln!("FAIL {} {} ratio={} bound={:?}", r.report.id, r.instance, r.report.ratio, r.report.bound);
    }
    eprintln!("{} rows, {} failing", result.rows.len(), failed.len());
    Ok(outcome(failed.is_empty()))
}

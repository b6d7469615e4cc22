//! Seeded test corpora: weights, densities and their grids.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dyadic::{Cube, DyadicGrid, GridFunction};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum WeightGen {
    /// `(|x − x₀| + h)^a` with `a ∈ (−0.9n, 3]`.
    Power,
    /// Multiplicative cascade with factors in `[1/m, m]`.
    Cascade(f64),
    Constant,
    /// A cascade with one dyadic cube zeroed out.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FunctionGen {
    /// `c·χ_cell`
    Spike,
    /// Piecewise constant on a random level with heavy-tailed values.
    Random,
    Constant,
}

impl fmt::Display for WeightGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightGen::Power => write!(f, "power"),
            WeightGen::Cascade(m) => write!(f, "cascade:{m}"),
            WeightGen::Constant => write!(f, "const"),
            WeightGen::Degenerate => write!(f, "degenerate"),
        }
    }
}

impl fmt::Display for FunctionGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FunctionGen::Spike => "spike",
            FunctionGen::Random => "random",
            FunctionGen::Constant => "const",
        };
        f.write_str(s)
    }
}

impl FromStr for WeightGen {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "power" => Ok(WeightGen::Power),
            "const" => Ok(WeightGen::Constant),
            "degenerate" => Ok(WeightGen::Degenerate),
            other => match other.strip_prefix("cascade:") {
                Some(m) => {
                    let m: f64 = m.parse().map_err(|_| Error::param(format!("bad cascade factor in {other:?}")))?;
                    if !(m >= 1.0 && m.is_finite()) {
                        return Err(Error::param(format!("cascade factor must be >= 1, got {m}")));
                    }
                    Ok(WeightGen::Cascade(m))
                }
                None => Err(Error::Unknown { kind: "weight generator", name: other.to_string() }),
            },
        }
    }
}

impl FromStr for FunctionGen {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "spike" => Ok(FunctionGen::Spike),
            "random" => Ok(FunctionGen::Random),
            "const" => Ok(FunctionGen::Constant),
            other => Err(Error::Unknown { kind: "function generator", name: other.to_string() }),
        }
    }
}

/// Grid shape drawn per instance: dimension and an inclusive depth range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridShape {
    pub dim: usize,
    pub min_depth: u32,
    pub max_depth: u32,
}

impl FromStr for GridShape {
    type Err = Error;
    /// `NxL` or `NxLO-HI`, e.g. `1x8` or `2x2-4`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::param(format!("bad grid shape {s:?}, expected NxL or NxLO-HI"));
        let (n, d) = s.trim().split_once('x').ok_or_else(bad)?;
        let dim: usize = n.parse().map_err(|_| bad())?;
        let (lo, hi) = match d.split_once('-') {
            Some((a, b)) => (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?),
            None => {
                let v: u32 = d.parse().map_err(|_| bad())?;
                (v, v)
            }
        };
        if !(1..=3).contains(&dim) || lo > hi || dim as u32 * hi > 24 {
            return Err(bad());
        }
        Ok(GridShape { dim, min_depth: lo, max_depth: hi })
    }
}

impl fmt::Display for GridShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.min_depth == self.max_depth {
            write!(f, "{}x{}", self.dim, self.min_depth)
        } else {
            write!(f, "{}x{}-{}", self.dim, self.min_depth, self.max_depth)
        }
    }
}

/// What to generate. Instance `i` cycles through grids, then weights, then
/// functions, so every combination appears once `count` is large enough.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusSpec {
    pub grids: Vec<GridShape>,
    pub weights: Vec<WeightGen>,
    pub functions: Vec<FunctionGen>,
    pub count: usize,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec {
            grids: vec![GridShape { dim: 1, min_depth: 3, max_depth: 8 }, GridShape { dim: 2, min_depth: 2, max_depth: 4 }],
            weights: vec![WeightGen::Power, WeightGen::Cascade(2.0), WeightGen::Cascade(4.0)],
            functions: vec![FunctionGen::Spike, FunctionGen::Random],
            count: 200,
        }
    }
}

fn list<T: FromStr<Err = Error>>(v: &str) -> Result<Vec<T>> {
    let items = v.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect::<Result<Vec<T>>>()?;
    if items.is_empty() {
        return Err(Error::param("empty generator list"));
    }
    Ok(items)
}

impl CorpusSpec {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "grids" => self.grids = list(value)?,
            "weights" => self.weights = list(value)?,
            "functions" => self.functions = list(value)?,
            "count" => {
                self.count = value.trim().parse().map_err(|_| Error::param(format!("bad count {value:?}")))?;
            }
            other => return Err(Error::Unknown { kind: "corpus key", name: other.to_string() }),
        }
        Ok(())
    }
}

impl FromStr for CorpusSpec {
    type Err = Error;
    /// `key=value` pairs separated by `;`, for example
    /// `grids=1x8,2x4;weights=cascade:4;functions=spike;count=50`.
    fn from_str(s: &str) -> Result<Self> {
        let mut spec = CorpusSpec::default();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| Error::param(format!("expected key=value, got {part:?}")))?;
            spec.set(k.trim(), v)?;
        }
        Ok(spec)
    }
}

impl fmt::Display for CorpusSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<String>| v.join(",");
        write!(
            f,
            "grids={};weights={};functions={};count={}",
            join(self.grids.iter().map(ToString::to_string).collect()),
            join(self.weights.iter().map(ToString::to_string).collect()),
            join(self.functions.iter().map(ToString::to_string).collect()),
            self.count
        )
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub index: usize,
    pub seed: u64,
    pub weight_gen: WeightGen,
    pub function_gen: FunctionGen,
    pub f: GridFunction,
    /// Also used as `u` by the two-weight verifiers.
    pub w: GridFunction,
    pub sigma: GridFunction,
    pub degenerate: bool,
}

impl Instance {
    pub fn grid(&self) -> &DyadicGrid {
        self.f.grid()
    }

    pub fn descriptor(&self) -> String {
        let g = self.grid();
        format!(
            "seed={}#{} n={} depth={} w={} f={}",
            self.seed,
            self.index,
            g.dim(),
            g.depth(),
            self.weight_gen,
            self.function_gen
        )
    }
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub seed: u64,
    pub spec: CorpusSpec,
    pub instances: Vec<Instance>,
}

/// Builds the corpus; instance `i` draws from its own ChaCha stream, so the
/// result does not depend on thread count or generation order.
pub fn corpus_generate(seed: u64, spec: &CorpusSpec) -> Result<Corpus> {
    if spec.grids.is_empty() || spec.weights.is_empty() || spec.functions.is_empty() {
        return Err(Error::param("corpus spec needs at least one grid, weight and function generator"));
    }
    let instances = (0..spec.count).into_par_iter().map(|i| instance(seed, spec, i)).collect::<Result<Vec<_>>>()?;
    Ok(Corpus { seed, spec: spec.clone(), instances })
}

fn instance(seed: u64, spec: &CorpusSpec, i: usize) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    let ng = spec.grids.len();
    let nw = spec.weights.len();
    let shape = spec.grids[i % ng];
    let weight_gen = spec.weights[(i / ng) % nw];
    let function_gen = spec.functions[(i / (ng * nw)) % spec.functions.len()];
    let depth = rng.gen_range(shape.min_depth..=shape.max_depth);
    let grid = DyadicGrid::unit(shape.dim, depth)?;
    let w = weight(&grid, weight_gen, &mut rng)?;
    let sigma = weight(&grid, weight_gen, &mut rng)?;
    let f = function(&grid, function_gen, &mut rng)?;
    Ok(Instance {
        index: i,
        seed,
        weight_gen,
        function_gen,
        f,
        w,
        sigma,
        degenerate: weight_gen == WeightGen::Degenerate,
    })
}

pub fn weight(grid: &DyadicGrid, gen: WeightGen, rng: &mut ChaCha8Rng) -> Result<GridFunction> {
    let values = match gen {
        WeightGen::Constant => vec![rng.gen_range(0.5..2.0); grid.cell_count()],
        WeightGen::Power => {
            let n = grid.dim();
            let a = rng.gen_range(-0.9 * n as f64..3.0);
            let x0: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let h = grid.cube_side(&grid.cell(0)) * rng.gen_range(0.5..2.0);
            GridFunction::from_centers(grid, |x| {
                let d = x.iter().zip(&x0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                (d + h).powf(a)
            })
            .into_values()
        }
        WeightGen::Cascade(m) => cascade(grid, m, rng),
        WeightGen::Degenerate => {
            let mut v = cascade(grid, 4.0, rng);
            let level = rng.gen_range(1..=grid.depth().max(1)).min(grid.depth());
            let idx: Vec<u32> = (0..grid.dim()).map(|_| rng.gen_range(0..1u32 << level)).collect();
            for c in grid.cells_in(&Cube::new(level, &idx)) {
                v[c] = 0.0;
            }
            v
        }
    };
    GridFunction::weight(grid, values)
}

/// Each child multiplies its parent's mass density by `e^U`, `U` uniform
/// on `[−ln m, ln m]`. `m = 1` gives a constant.
fn cascade(grid: &DyadicGrid, m: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let spread = m.ln();
    let n = grid.dim();
    let mut level = vec![1.0f64];
    for _ in 0..grid.depth() {
        let mut next = Vec::with_capacity(level.len() << n);
        for &v in &level {
            for _ in 0..1usize << n {
                let u = if spread > 0.0 { rng.gen_range(-spread..=spread) } else { 0.0 };
                next.push(v * u.exp());
            }
        }
        level = next;
    }
    // `level` is in Morton order
    let lex = grid.lex_of_morton();
    let mut out = vec![0.0; level.len()];
    for (m, v) in level.into_iter().enumerate() {
        out[lex[m] as usize] = v;
    }
    out
}

pub fn function(grid: &DyadicGrid, gen: FunctionGen, rng: &mut ChaCha8Rng) -> Result<GridFunction> {
    let n = grid.dim();
    let values = match gen {
        FunctionGen::Constant => vec![rng.gen_range(0.5..2.0); grid.cell_count()],
        FunctionGen::Spike => {
            let c = rng.gen_range(-2.0f64..2.0).exp();
            let mut v = vec![0.0; grid.cell_count()];
            v[rng.gen_range(0..grid.cell_count())] = c;
            v
        }
        FunctionGen::Random => {
            let level = rng.gen_range(0..=grid.depth());
            let blocks: Vec<f64> = (0..grid.cubes_at(level))
                .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(1e-3f64..1.0).powf(-1.0 / 1.5) })
                .collect();
            let mut v = vec![0.0; grid.cell_count()];
            let all_zero = blocks.iter().all(|&b| b == 0.0);
            for (b, &val) in blocks.iter().enumerate() {
                let q = Cube::from_lex(level, n, b);
                let val = if all_zero && b == 0 { 1.0 } else { val };
                for c in grid.cells_in(&q) {
                    v[c] = val;
                }
            }
            v
        }
    };
    GridFunction::new(grid, values)
}

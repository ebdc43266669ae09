//! Flat `key = value` description of a benchmark batch.
//!
//! ```text
//! # lines starting with '#' are ignored
//! tsp = data/tsplib/gr17.tsp            # optimum by Held-Karp
//! tsp = data/tsplib/gr24.tsp 1272       # known optimum
//! pls = instances/square.pls
//! generate_pls = 20 25 238-250 1        # count, order, hole range, seed
//! strategies = lds, dbs
//! time_limit = 300                      # seconds per run
//! node_limit = 1000000
//! parallel = false
//! ```
//!
//! Generated squares are balanced; instance `i` gets seed `seed + i` and
//! cycles through the hole range.

use std::path::{Path, PathBuf};
use std::time::Duration;

use super::experiment::{Instance, Limits, OptimumSource, Strategy};
use super::{generate_pls, parse_pls_file, parse_tsplib_file, BenchError};

#[derive(Debug, Clone, PartialEq)]
pub struct PlsBatch {
    pub count: usize,
    pub order: usize,
    pub holes: (usize, usize),
    pub seed: u64,
}

impl PlsBatch {
    pub fn holes_of(&self, i: usize) -> usize {
        let (lo, hi) = self.holes;
        lo + i % (hi - lo + 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub tsp: Vec<(PathBuf, OptimumSource)>,
    pub pls: Vec<PathBuf>,
    pub generated: Vec<PlsBatch>,
    pub strategies: Vec<Strategy>,
    pub limits: Limits,
    pub parallel: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            tsp: Vec::new(),
            pls: Vec::new(),
            generated: Vec::new(),
            strategies: vec![Strategy::Lds, Strategy::Dbs],
            limits: Limits::default(),
            parallel: false,
        }
    }
}

fn err(line: usize, msg: impl Into<String>) -> BenchError {
    BenchError::Parse { line, msg: msg.into() }
}

fn num<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T, BenchError> {
    s.parse().map_err(|_| err(line, format!("bad {what} {s:?}")))
}

impl BenchConfig {
    /// Relative instance paths are resolved against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self, BenchError> {
        let mut cfg = BenchConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected key = value, got {content:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let words: Vec<&str> = value.split_whitespace().collect();
            match key {
                "tsp" => {
                    let optimum = match words.as_slice() {
                        [_] => OptimumSource::Auto,
                        [_, "auto"] => OptimumSource::Auto,
                        [_, "none"] => OptimumSource::None,
                        [_, v] => OptimumSource::Known(num(v, line, "optimum")?),
                        _ => return Err(err(line, "tsp takes a path and an optional optimum")),
                    };
                    cfg.tsp.push((base.join(words[0]), optimum));
                }
                "pls" => cfg.pls.push(base.join(value)),
                "generate_pls" => {
                    let [count, order, holes, seed] = words.as_slice() else {
                        return Err(err(line, "generate_pls takes count, order, holes and seed"));
                    };
                    let holes = match holes.split_once('-') {
                        Some((lo, hi)) => (num(lo, line, "holes")?, num(hi, line, "holes")?),
                        None => {
                            let h = num(holes, line, "holes")?;
                            (h, h)
                        }
                    };
                    if holes.0 > holes.1 {
                        return Err(err(line, "empty hole range"));
                    }
                    cfg.generated.push(PlsBatch {
                        count: num(count, line, "count")?,
                        order: num(order, line, "order")?,
                        holes,
                        seed: num(seed, line, "seed")?,
                    });
                }
                "strategies" => {
                    cfg.strategies = value
                        .split(',')
                        .map(Strategy::parse)
                        .collect::<Result<_, _>>()
                        .map_err(|e| err(line, e.to_string()))?;
                }
                "time_limit" => {
                    let secs: f64 = num(value, line, "time limit")?;
                    if !(secs > 0.0 && secs.is_finite()) {
                        return Err(err(line, "time limit must be positive"));
                    }
                    cfg.limits.time = Duration::from_secs_f64(secs);
                }
                "node_limit" => cfg.limits.nodes = Some(num(value, line, "node limit")?),
                "parallel" => cfg.parallel = num(value, line, "flag")?,
                other => return Err(err(line, format!("unknown key {other:?}"))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| BenchError::Io(path.display().to_string(), e.to_string()))?;
        BenchConfig::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Reads and generates every instance, in declaration order by kind.
    pub fn instances(&self) -> Result<Vec<Instance>, BenchError> {
        let mut out = Vec::new();
        for (path, optimum) in &self.tsp {
            out.push(Instance::Tsp {
                instance: parse_tsplib_file(path)?,
                optimum: *optimum,
            });
        }
        for path in &self.pls {
            let instance = parse_pls_file(path)?;
            let name = path.file_stem().map_or_else(|| instance.name(), |s| s.to_string_lossy().into_owned());
            out.push(Instance::Pls { name, instance });
        }
        for batch in &self.generated {
            out.extend(generate_batch(batch)?);
        }
        Ok(out)
    }
}

/// The balanced squares of a batch, named `bpls.orderN.holesH.sS`.
pub fn generate_batch(batch: &PlsBatch) -> Result<Vec<Instance>, BenchError> {
    (0..batch.count)
        .map(|i| {
            let seed = batch.seed + i as u64;
            let instance = generate_pls(batch.order, batch.holes_of(i), true, seed)?;
            Ok(Instance::Pls {
                name: format!("{}.s{seed}", instance.name()),
                instance,
            })
        })
        .collect()
}

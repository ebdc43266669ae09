//! Cumulative success curves of whole-tree strategies.

use std::fmt::Write;
use std::ops::ControlFlow;

use super::{dbs_leaves, lds_leaves, prob_dbs, prob_lds, AnalysisError, KahanSum, ProbabilityModel};

/// A strategy seen as a sequence of steps, each adding a block of leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    /// One step per discrepancy wave.
    Lds,
    /// One step per first subproblem with `c = 1..=b` values per variable.
    DbsFirst,
    /// Subdomains of `cell` consecutive values, subproblems taken by
    /// discrepancy; one step per subproblem discrepancy.
    DbsLds { cell: usize },
}

impl Schedule {
    pub fn name(&self) -> String {
        match self {
            Schedule::Lds => "lds".to_string(),
            Schedule::DbsFirst => "dbs".to_string(),
            Schedule::DbsLds { cell } => format!("dbs({cell})+lds"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub strategy: String,
    pub leaves: u64,
    pub cum_prob: f64,
}

fn convolve_power(weights: &[f64], sizes: &[u64], n: usize) -> (Vec<f64>, Vec<u64>) {
    let mut w = vec![1.0];
    let mut s = vec![1u64];
    for _ in 0..n {
        let len = w.len() + weights.len() - 1;
        let mut nw = vec![KahanSum::default(); len];
        let mut ns = vec![0u64; len];
        for (i, (&a, &c)) in w.iter().zip(&s).enumerate() {
            for (j, (&x, &y)) in weights.iter().zip(sizes).enumerate() {
                nw[i + j].add(a * x);
                ns[i + j] += c * y;
            }
        }
        w = nw.into_iter().map(KahanSum::value).collect();
        s = ns;
    }
    (w, s)
}

/// Cumulative `(leaves, probability)` after each step of `schedule`.
pub fn cumulative_success(schedule: Schedule, model: &ProbabilityModel) -> Result<Vec<(u64, f64)>, AnalysisError> {
    let (b, n) = (model.width(), model.depth());
    let mut out = Vec::new();
    match schedule {
        Schedule::Lds => {
            let (mut leaves, mut prob) = (0u64, KahanSum::default());
            for k in 0..=model.max_discrepancy() {
                leaves += lds_leaves(k, n, b)?;
                prob.add(prob_lds(k, model)?);
                out.push((leaves, prob.value()));
            }
        }
        Schedule::DbsFirst => {
            for c in 1..=b {
                out.push((dbs_leaves(c, n), prob_dbs(c, model)?));
            }
        }
        Schedule::DbsLds { cell } => {
            if cell == 0 || cell > b {
                return Err(AnalysisError::WidthOutOfRange { c: cell, b });
            }
            let masses: Vec<f64> = model
                .p()
                .chunks(cell)
                .map(|c| c.iter().copied().collect::<KahanSum>().value())
                .collect();
            let sizes: Vec<u64> = model.p().chunks(cell).map(|c| c.len() as u64).collect();
            let (w, s) = convolve_power(&masses, &sizes, n);
            let (mut leaves, mut prob) = (0u64, KahanSum::default());
            for (x, c) in w.into_iter().zip(s) {
                leaves += c;
                prob.add(x);
                out.push((leaves, prob.value()));
            }
        }
    }
    Ok(out)
}

/// The three strategies compared on a model: LDS, the first subproblems of
/// DBS, and DBS with 2-value subdomains explored by discrepancy.
pub fn standard_curves(model: &ProbabilityModel) -> Result<Vec<CurvePoint>, AnalysisError> {
    let mut points = Vec::new();
    for schedule in [Schedule::Lds, Schedule::DbsFirst, Schedule::DbsLds { cell: 2.min(model.width()) }] {
        let name = schedule.name();
        for (i, (leaves, cum_prob)) in cumulative_success(schedule, model)?.into_iter().enumerate() {
            let strategy = match schedule {
                Schedule::DbsFirst => format!("dbs({})", i + 1),
                _ => name.clone(),
            };
            points.push(CurvePoint {
                strategy,
                leaves,
                cum_prob,
            });
        }
    }
    Ok(points)
}

/// `strategy,leaves,cum_prob` rows with LF line endings.
pub fn curves_csv(points: &[CurvePoint]) -> String {
    let mut s = String::from("strategy,leaves,cum_prob\n");
    for p in points {
        writeln!(s, "{},{},{:.17}", p.strategy, p.leaves, p.cum_prob).unwrap();
    }
    s
}

/// Order in which a strategy reaches the leaves of the whole tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeafOrder {
    /// By discrepancy, depth-first within a discrepancy.
    Lds,
    /// Subproblems over `cell`-value subdomains by discrepancy (depth-first
    /// within a discrepancy), leaves of a subproblem depth-first.
    DbsLds { cell: usize },
}

struct Walker<'f> {
    n: usize,
    labels: Vec<u8>,
    visit: &'f mut dyn FnMut(&[u8]) -> ControlFlow<()>,
}

impl Walker<'_> {
    /// Paths of width `width` and label sum exactly `left` below `depth`.
    fn wave(&mut self, cells: &mut Vec<u8>, width: usize, left: usize, inner: &mut dyn FnMut(&mut Self, &[u8]) -> ControlFlow<()>) -> ControlFlow<()> {
        let depth = cells.len();
        if depth == self.n {
            return inner(self, cells);
        }
        let slots = self.n - depth - 1;
        for t in 0..width.min(left + 1) {
            if left - t <= slots * (width - 1) {
                cells.push(t as u8);
                let flow = self.wave(cells, width, left - t, inner);
                cells.pop();
                flow?;
            }
        }
        ControlFlow::Continue(())
    }

    fn product(&mut self, ranges: &[(usize, usize)]) -> ControlFlow<()> {
        let depth = self.labels.len();
        if depth == self.n {
            return (self.visit)(&self.labels);
        }
        let (lo, hi) = ranges[depth];
        for t in lo..hi {
            self.labels.push(t as u8);
            let flow = self.product(ranges);
            self.labels.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// Calls `visit` with the labels of every leaf of a width `b`, depth `n`
/// tree, in the order of `order`, until it breaks.
pub fn for_each_leaf(order: LeafOrder, b: usize, n: usize, visit: &mut dyn FnMut(&[u8]) -> ControlFlow<()>) {
    assert!((1..=256).contains(&b) && n >= 1);
    let mut walker = Walker {
        n,
        labels: Vec::with_capacity(n),
        visit,
    };
    let mut cells = Vec::with_capacity(n);
    let _ = match order {
        LeafOrder::Lds => (|| {
            for k in 0..=n * (b - 1) {
                walker.wave(&mut cells, b, k, &mut |w, path| (w.visit)(path))?;
            }
            ControlFlow::Continue(())
        })(),
        LeafOrder::DbsLds { cell } => (|| {
            assert!(cell >= 1);
            let width = b.div_ceil(cell);
            for k in 0..=n * (width - 1) {
                walker.wave(&mut cells, width, k, &mut |w, sub| {
                    let ranges: Vec<(usize, usize)> = sub
                        .iter()
                        .map(|&t| (t as usize * cell, ((t as usize + 1) * cell).min(b)))
                        .collect();
                    w.labels.clear();
                    w.product(&ranges)
                })?;
            }
            ControlFlow::Continue(())
        })(),
    };
}

/// Cumulative success after exactly `budgets[i]` leaves of `order`;
/// `budgets` must be increasing.
pub fn success_at_budgets(order: LeafOrder, model: &ProbabilityModel, budgets: &[u64]) -> Vec<f64> {
    assert!(budgets.windows(2).all(|w| w[0] < w[1]));
    let mut out = Vec::with_capacity(budgets.len());
    let mut sum = KahanSum::default();
    let mut count = 0u64;
    let p = model.p();
    if budgets.is_empty() {
        return out;
    }
    for_each_leaf(order, model.width(), model.depth(), &mut |labels| {
        sum.add(labels.iter().map(|&l| p[l as usize]).product());
        count += 1;
        while out.len() < budgets.len() && budgets[out.len()] == count {
            out.push(sum.value());
        }
        if out.len() == budgets.len() {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    while out.len() < budgets.len() {
        out.push(sum.value());
    }
    out
}

/// About `count` distinct, roughly log-spaced integers in `1..=max`.
pub fn log_budgets(max: u64, count: usize) -> Vec<u64> {
    assert!(max >= 1 && count >= 2);
    let top = (max as f64).ln();
    let mut v: Vec<u64> = (0..count)
        .map(|i| ((top * i as f64 / (count - 1) as f64).exp().round() as u64).clamp(1, max))
        .collect();
    v.dedup();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{make_distribution, random_model_seeded, DistributionSpec, Family};

    #[test]
    fn uniform_curves_are_diagonal() {
        let m = ProbabilityModel::new(3, vec![0.25; 4]).unwrap();
        for s in [Schedule::Lds, Schedule::DbsFirst, Schedule::DbsLds { cell: 2 }] {
            for (leaves, prob) in cumulative_success(s, &m).unwrap() {
                assert!((prob - leaves as f64 / 64.0).abs() < 1e-12, "{s:?}");
            }
        }
    }

    #[test]
    fn complete_schedules_end_at_one() {
        let m = make_distribution(&DistributionSpec::new(Family::binomial()), 8, 8).unwrap();
        for s in [Schedule::Lds, Schedule::DbsFirst, Schedule::DbsLds { cell: 2 }, Schedule::DbsLds { cell: 3 }] {
            let c = cumulative_success(s, &m).unwrap();
            assert!(c.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 <= w[1].1 + 1e-15));
            let last = c.last().unwrap();
            assert_eq!(last.0, 8u64.pow(8));
            assert!((last.1 - 1.0).abs() < 1e-9, "{s:?}");
        }
    }

    #[test]
    fn streaming_agrees_with_steps() {
        let m = random_model_seeded(4, 4, 3);
        for (order, schedule) in [
            (LeafOrder::Lds, Schedule::Lds),
            (LeafOrder::DbsLds { cell: 2 }, Schedule::DbsLds { cell: 2 }),
            (LeafOrder::DbsLds { cell: 3 }, Schedule::DbsLds { cell: 3 }),
        ] {
            let steps = cumulative_success(schedule, &m).unwrap();
            let budgets: Vec<u64> = steps.iter().map(|s| s.0).collect();
            let streamed = success_at_budgets(order, &m, &budgets);
            for (s, x) in steps.iter().zip(streamed) {
                assert!((s.1 - x).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lds_order_visits_each_leaf_once() {
        let mut seen = std::collections::BTreeSet::new();
        for_each_leaf(LeafOrder::DbsLds { cell: 2 }, 3, 3, &mut |l| {
            assert!(seen.insert(l.to_vec()));
            ControlFlow::Continue(())
        });
        assert_eq!(seen.len(), 27);
    }

    #[test]
    fn csv_format() {
        let m = ProbabilityModel::new(1, vec![0.6, 0.4]).unwrap();
        let csv = curves_csv(&standard_curves(&m).unwrap());
        assert!(csv.starts_with("strategy,leaves,cum_prob\nlds,1,0.59999"));
        assert!(!csv.contains('\r'));
        assert!(csv.contains("dbs(2),2,1.0"));
    }

    #[test]
    fn budgets_are_log_spaced() {
        let b = log_budgets(8u64.pow(8), 512);
        assert_eq!(b[0], 1);
        assert_eq!(*b.last().unwrap(), 8u64.pow(8));
        assert!(b.windows(2).all(|w| w[0] < w[1]));
        assert!(b.len() > 400);
    }
}

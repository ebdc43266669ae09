//! Partial latin square completion: generator, text format, model with
//! row and column `alldifferent`, occurrence evaluator and checker.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::csp::{Domain, DomainStore, Problem, VarId};
use crate::propagators::AllDifferent;
use crate::ranking::{rank_by_counts, RankedValues, ValueEvaluator};

use super::BenchError;

/// An `n x n` grid; 0 marks a hole, filled cells hold `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlsInstance {
    pub grid: Vec<Vec<i32>>,
    /// Hole counts of all rows and of all columns differ by at most one.
    pub balanced: bool,
}

impl PlsInstance {
    /// Rejects out-of-range symbols and repeated symbols in a row or column.
    pub fn new(grid: Vec<Vec<i32>>) -> Result<Self, BenchError> {
        let n = grid.len();
        if n == 0 || n > 255 {
            return Err(BenchError::Invalid(format!("order {n} outside 1..=255")));
        }
        for (r, row) in grid.iter().enumerate() {
            if row.len() != n {
                return Err(BenchError::Invalid(format!("row {r} has {} cells, expected {n}", row.len())));
            }
            for (c, &v) in row.iter().enumerate() {
                if v < 0 || v as usize > n {
                    return Err(BenchError::Invalid(format!("symbol {v} at row {r}, column {c} outside 0..={n}")));
                }
            }
        }
        for r in 0..n {
            let mut first: Vec<Option<usize>> = vec![None; n + 1];
            for c in 0..n {
                let v = grid[r][c] as usize;
                if v == 0 {
                    continue;
                }
                if let Some(c0) = first[v] {
                    return Err(BenchError::Duplicate(format!(
                        "symbol {v} repeated in row {r} (columns {c0} and {c})"
                    )));
                }
                first[v] = Some(c);
            }
        }
        for c in 0..n {
            let mut first: Vec<Option<usize>> = vec![None; n + 1];
            for r in 0..n {
                let v = grid[r][c] as usize;
                if v == 0 {
                    continue;
                }
                if let Some(r0) = first[v] {
                    return Err(BenchError::Duplicate(format!(
                        "symbol {v} repeated in column {c} (rows {r0} and {r})"
                    )));
                }
                first[v] = Some(r);
            }
        }
        let balanced = is_balanced(&grid);
        Ok(PlsInstance { grid, balanced })
    }

    pub fn order(&self) -> usize {
        self.grid.len()
    }

    pub fn holes(&self) -> usize {
        self.grid.iter().flatten().filter(|&&v| v == 0).count()
    }

    /// Name in the `bpls.orderN.holesH` / `pls.orderN.holesH` scheme.
    pub fn name(&self) -> String {
        let prefix = if self.balanced { "bpls" } else { "pls" };
        format!("{prefix}.order{}.holes{}", self.order(), self.holes())
    }
}

fn spread(counts: impl Iterator<Item = usize>) -> usize {
    let (lo, hi) = counts.fold((usize::MAX, 0), |(lo, hi), x| (lo.min(x), hi.max(x)));
    hi - lo
}

fn is_balanced(grid: &[Vec<i32>]) -> bool {
    let n = grid.len();
    let rows = (0..n).map(|r| grid[r].iter().filter(|&&v| v == 0).count());
    let cols = (0..n).map(|c| (0..n).filter(|&r| grid[r][c] == 0).count());
    spread(rows) <= 1 && spread(cols) <= 1
}

/// Random latin square: a cyclic square with shuffled rows, columns and
/// symbols, then `n^3` steps of the Jacobson-Matthews chain.
pub fn random_latin_square(n: usize, rng: &mut impl Rng) -> Vec<Vec<i32>> {
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..n).collect();
    let mut syms: Vec<i32> = (1..=n as i32).collect();
    rows.shuffle(rng);
    cols.shuffle(rng);
    syms.shuffle(rng);
    let sq: Vec<Vec<i32>> = (0..n)
        .map(|r| (0..n).map(|c| syms[(rows[r] + cols[c]) % n]).collect())
        .collect();
    if n < 3 {
        return sq;
    }
    let mut cube = IncidenceCube::new(&sq);
    cube.shuffle(n * n * n, rng);
    cube.square()
}

/// Latin square as a 0/1 cube over (row, column, symbol); an improper
/// state holds exactly one -1 entry.
struct IncidenceCube {
    n: usize,
    cells: Vec<i8>,
    improper: Option<(usize, usize, usize)>,
}

impl IncidenceCube {
    fn new(sq: &[Vec<i32>]) -> Self {
        let n = sq.len();
        let mut cells = vec![0i8; n * n * n];
        for (r, row) in sq.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                cells[(r * n + c) * n + (v as usize - 1)] = 1;
            }
        }
        IncidenceCube { n, cells, improper: None }
    }

    fn at(&mut self, r: usize, c: usize, s: usize) -> &mut i8 {
        &mut self.cells[(r * self.n + c) * self.n + s]
    }

    /// Indices `k` along one axis with entry 1, the other two fixed.
    fn ones(&self, f: impl Fn(usize) -> usize) -> Vec<usize> {
        (0..self.n).filter(|&k| self.cells[f(k)] == 1).collect()
    }

    fn step(&mut self, rng: &mut impl Rng) {
        let n = self.n;
        let (r, c, s) = match self.improper {
            Some(cell) => cell,
            None => loop {
                let (r, c, s) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
                if *self.at(r, c, s) == 0 {
                    break (r, c, s);
                }
            },
        };
        let pick = |v: Vec<usize>, rng: &mut dyn rand::RngCore| v[rng.gen_range(0..v.len())];
        let r2 = pick(self.ones(|k| (k * n + c) * n + s), rng);
        let c2 = pick(self.ones(|k| (r * n + k) * n + s), rng);
        let s2 = pick(self.ones(|k| (r * n + c) * n + k), rng);
        *self.at(r, c, s) += 1;
        *self.at(r, c2, s2) += 1;
        *self.at(r2, c, s2) += 1;
        *self.at(r2, c2, s) += 1;
        *self.at(r, c, s2) -= 1;
        *self.at(r, c2, s) -= 1;
        *self.at(r2, c, s) -= 1;
        *self.at(r2, c2, s2) -= 1;
        self.improper = (*self.at(r2, c2, s2) == -1).then_some((r2, c2, s2));
    }

    /// At least `steps` moves, continued until the cube is proper again.
    fn shuffle(&mut self, steps: usize, rng: &mut impl Rng) {
        for _ in 0..steps {
            self.step(rng);
        }
        while self.improper.is_some() {
            self.step(rng);
        }
    }

    fn square(&self) -> Vec<Vec<i32>> {
        let n = self.n;
        (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| (0..n).find(|&s| self.cells[(r * n + c) * n + s] == 1).unwrap() as i32 + 1)
                    .collect()
            })
            .collect()
    }
}

/// Hole pattern with every row and column holding `holes / n` or
/// `holes / n + 1` holes, randomized by checkerboard switches.
fn balanced_holes(n: usize, holes: usize, rng: &mut impl Rng) -> Vec<Vec<bool>> {
    let (q, extra) = (holes / n, holes % n);
    let mut mask = vec![vec![false; n]; n];
    for (r, row) in mask.iter_mut().enumerate() {
        for k in 0..q {
            row[(r + k) % n] = true;
        }
        if r < extra {
            row[(r + q) % n] = true;
        }
    }
    let mut rows: Vec<usize> = (0..n).collect();
    let mut cols: Vec<usize> = (0..n).collect();
    rows.shuffle(rng);
    cols.shuffle(rng);
    let mut out: Vec<Vec<bool>> = (0..n).map(|r| (0..n).map(|c| mask[rows[r]][cols[c]]).collect()).collect();
    if n >= 2 {
        for _ in 0..8 * n * n {
            let (r1, r2) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let (c1, c2) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if out[r1][c1] && out[r2][c2] && !out[r1][c2] && !out[r2][c1] {
                out[r1][c1] = false;
                out[r2][c2] = false;
                out[r1][c2] = true;
                out[r2][c1] = true;
            }
        }
    }
    out
}

/// Blanks `holes` cells of a random latin square. Deterministic per seed.
pub fn generate_pls(order: usize, holes: usize, balanced: bool, seed: u64) -> Result<PlsInstance, BenchError> {
    if order == 0 || order > 255 {
        return Err(BenchError::Invalid(format!("order {order} outside 1..=255")));
    }
    if holes > order * order {
        return Err(BenchError::Invalid(format!("{holes} holes exceed {} cells", order * order)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = random_latin_square(order, &mut rng);
    if balanced {
        let mask = balanced_holes(order, holes, &mut rng);
        for (row, m) in grid.iter_mut().zip(&mask) {
            for (cell, &h) in row.iter_mut().zip(m) {
                if h {
                    *cell = 0;
                }
            }
        }
    } else {
        for i in index::sample(&mut rng, order * order, holes) {
            grid[i / order][i % order] = 0;
        }
    }
    PlsInstance::new(grid)
}

pub fn parse_pls(text: &str) -> Result<PlsInstance, BenchError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (first_no, first) = lines.next().ok_or(BenchError::Missing("order"))?;
    let n: usize = first.trim().parse().map_err(|_| BenchError::Parse {
        line: first_no + 1,
        msg: format!("bad order {:?}", first.trim()),
    })?;
    let mut grid = Vec::with_capacity(n);
    for (no, line) in lines.by_ref().take(n) {
        let row = line
            .split_whitespace()
            .map(|t| {
                t.parse::<i32>().map_err(|_| BenchError::Parse {
                    line: no + 1,
                    msg: format!("bad cell {t:?}"),
                })
            })
            .collect::<Result<Vec<i32>, _>>()?;
        if row.len() != n {
            return Err(BenchError::Parse {
                line: no + 1,
                msg: format!("{} cells, expected {n}", row.len()),
            });
        }
        grid.push(row);
    }
    if grid.len() != n {
        return Err(BenchError::Parse {
            line: text.lines().count(),
            msg: format!("{} rows, expected {n}", grid.len()),
        });
    }
    if let Some((no, _)) = lines.next() {
        return Err(BenchError::Parse {
            line: no + 1,
            msg: "trailing content".into(),
        });
    }
    PlsInstance::new(grid)
}

pub fn parse_pls_file(path: impl AsRef<Path>) -> Result<PlsInstance, BenchError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| BenchError::Io(path.display().to_string(), e.to_string()))?;
    parse_pls(&text)
}

pub fn emit_pls(instance: &PlsInstance) -> String {
    let mut s = format!("{}\n", instance.order());
    for row in &instance.grid {
        let cells: Vec<String> = row.iter().map(i32::to_string).collect();
        let _ = writeln!(s, "{}", cells.join(" "));
    }
    s
}

pub fn emit_pls_file(instance: &PlsInstance, path: impl AsRef<Path>) -> Result<(), BenchError> {
    let path = path.as_ref();
    std::fs::write(path, emit_pls(instance)).map_err(|e| BenchError::Io(path.display().to_string(), e.to_string()))
}

pub struct PlsModel {
    pub problem: Problem,
    /// Cell `(r, c)` is `cells[r * n + c]`.
    pub cells: Vec<VarId>,
    pub order: usize,
}

/// One variable per cell over `1..=n`, pre-filled cells fixed, and
/// `alldifferent` on every row and column.
pub fn pls_model(instance: &PlsInstance) -> PlsModel {
    let n = instance.order();
    let mut problem = Problem::new();
    let cells: Vec<VarId> = instance
        .grid
        .iter()
        .flatten()
        .map(|&v| match v {
            0 => problem.add_var_range(1, n as i32),
            v => problem.add_var(Domain::from_values(&[v])),
        })
        .collect();
    for r in 0..n {
        let row: Vec<VarId> = (0..n).map(|c| cells[r * n + c]).collect();
        problem.post(Box::new(AllDifferent::new(row))).expect("variables exist");
    }
    for c in 0..n {
        let col: Vec<VarId> = (0..n).map(|r| cells[r * n + c]).collect();
        problem.post(Box::new(AllDifferent::new(col))).expect("variables exist");
    }
    PlsModel {
        problem,
        cells,
        order: n,
    }
}

/// Ranks a symbol by its number of occurrences among the fixed cells of the
/// current node.
pub struct OccurrenceEvaluator {
    cells: Vec<VarId>,
    order: usize,
    cache: Option<(u64, Vec<usize>)>,
}

impl OccurrenceEvaluator {
    pub fn new(model: &PlsModel) -> Self {
        OccurrenceEvaluator {
            cells: model.cells.clone(),
            order: model.order,
            cache: None,
        }
    }
}

impl ValueEvaluator for OccurrenceEvaluator {
    fn rank(&mut self, store: &DomainStore, var: VarId) -> RankedValues {
        if self.cache.as_ref().is_none_or(|c| c.0 != store.stamp()) {
            let mut counts = vec![0usize; self.order + 1];
            for &x in &self.cells {
                if let Some(v) = store.value(x) {
                    counts[v as usize] += 1;
                }
            }
            self.cache = Some((store.stamp(), counts));
        }
        rank_by_counts(&self.cache.as_ref().unwrap().1, store.domain(var).iter())
    }
}

/// Checks that `solution` (row-major) completes `instance` into a latin
/// square.
pub fn verify_latin(instance: &PlsInstance, solution: &[i32]) -> Result<(), BenchError> {
    let n = instance.order();
    if solution.len() != n * n {
        return Err(BenchError::BadSolution(format!("{} cells, expected {}", solution.len(), n * n)));
    }
    for r in 0..n {
        for c in 0..n {
            let (given, v) = (instance.grid[r][c], solution[r * n + c]);
            if given != 0 && given != v {
                return Err(BenchError::BadSolution(format!("cell ({r},{c}) changed from {given} to {v}")));
            }
        }
    }
    let is_perm = |vals: &mut dyn Iterator<Item = i32>| {
        let mut seen = vec![false; n + 1];
        for v in vals {
            if v < 1 || v as usize > n || std::mem::replace(&mut seen[v as usize], true) {
                return false;
            }
        }
        true
    };
    for i in 0..n {
        if !is_perm(&mut (0..n).map(|c| solution[i * n + c])) {
            return Err(BenchError::BadSolution(format!("row {i} is not a permutation")));
        }
        if !is_perm(&mut (0..n).map(|r| solution[r * n + i])) {
            return Err(BenchError::BadSolution(format!("column {i} is not a permutation")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = "4\n2 4 3 1\n1 3 2 4\n4 2 1 3\n3 1 4 2\n";

    #[test]
    fn printed_square_parses() {
        let p = parse_pls(EXAMPLE).unwrap();
        assert_eq!(p.holes(), 0);
        assert!(verify_latin(&p, &p.grid.concat()).is_ok());
    }

    #[test]
    fn zero_is_a_hole_and_round_trips() {
        let p = parse_pls("3\n1 0 3\n0 0 0\n3 0 2\n").unwrap();
        assert_eq!(p.holes(), 5);
        assert_eq!(parse_pls(&emit_pls(&p)).unwrap(), p);
    }

    #[test]
    fn duplicates_are_located() {
        let err = parse_pls("3\n1 0 3\n0 0 0\n3 0 3\n").unwrap_err();
        assert!(err.to_string().contains("row 2"), "{err}");
        let err = parse_pls("3\n1 0 3\n1 0 0\n0 0 0\n").unwrap_err();
        assert!(err.to_string().contains("column 0"), "{err}");
    }

    #[test]
    fn malformed_rows() {
        assert!(matches!(parse_pls("3\n1 0\n0 0 0\n0 0 0\n"), Err(BenchError::Parse { line: 2, .. })));
        assert!(matches!(parse_pls("2\n1 x\n0 0\n"), Err(BenchError::Parse { line: 2, .. })));
    }

    #[test]
    fn full_squares_are_latin() {
        for seed in 0..5 {
            for n in [1, 2, 5, 8] {
                let p = generate_pls(n, 0, true, seed).unwrap();
                assert_eq!(p.holes(), 0);
                verify_latin(&p, &p.grid.concat()).unwrap();
            }
        }
    }

    #[test]
    fn balanced_hole_counts() {
        let p = generate_pls(25, 238, true, 7).unwrap();
        assert_eq!(p.holes(), 238);
        assert_eq!(p.name(), "bpls.order25.holes238");
        for r in 0..25 {
            let h = p.grid[r].iter().filter(|&&v| v == 0).count();
            assert!(h == 9 || h == 10);
            let h = (0..25).filter(|&q| p.grid[q][r] == 0).count();
            assert!(h == 9 || h == 10);
        }
    }

    #[test]
    fn deterministic_and_seed_dependent() {
        assert_eq!(generate_pls(10, 30, true, 1).unwrap(), generate_pls(10, 30, true, 1).unwrap());
        assert_ne!(generate_pls(10, 30, true, 1).unwrap(), generate_pls(10, 30, true, 2).unwrap());
        assert_eq!(generate_pls(6, 10, false, 3).unwrap().holes(), 10);
        assert!(generate_pls(4, 17, true, 0).is_err());
    }

    #[test]
    fn shuffled_square_leaves_the_cyclic_class() {
        // a cyclic square of odd order has no 2x2 subsquare; switches create them
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sq = random_latin_square(7, &mut rng);
        let p = PlsInstance::new(sq.clone()).unwrap();
        verify_latin(&p, &sq.concat()).unwrap();
        let mut intercalates = 0;
        for r1 in 0..7 {
            for r2 in r1 + 1..7 {
                for c1 in 0..7 {
                    for c2 in c1 + 1..7 {
                        if sq[r1][c1] == sq[r2][c2] && sq[r1][c2] == sq[r2][c1] {
                            intercalates += 1;
                        }
                    }
                }
            }
        }
        assert!(intercalates > 0);
    }

    #[test]
    fn occurrence_ranking_counts_fixed_cells() {
        let p = parse_pls("3\n1 0 0\n0 0 1\n0 0 2\n").unwrap();
        let m = pls_model(&p);
        let mut ev = OccurrenceEvaluator::new(&m);
        let ranked = ev.rank(m.problem.store(), m.cells[1]);
        assert_eq!(ranked.values().collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(ranked.rank_of(1), Some(2.0));
    }
}

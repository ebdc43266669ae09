use thiserror::Error;

use super::RankedValues;

#[derive(Debug, Error, PartialEq)]
pub enum RankingError {
    #[error("cutoffs must be positive and strictly increasing, got {0:?}")]
    BadCutoffs(Vec<usize>),
    #[error("fractions must be positive and sum to 1, got {0:?}")]
    BadFractions(Vec<f64>),
    #[error("cell size must be positive")]
    ZeroCellSize,
}

/// An ordered cover of a domain by disjoint cells, best-ranked cell first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainPartition {
    cells: Vec<Vec<i32>>,
}

impl DomainPartition {
    /// Empty cells are dropped.
    pub fn new(cells: Vec<Vec<i32>>) -> Self {
        DomainPartition {
            cells: cells.into_iter().filter(|c| !c.is_empty()).collect(),
        }
    }

    pub fn cells(&self) -> &[Vec<i32>] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn into_cells(self) -> Vec<Vec<i32>> {
        self.cells
    }
}

/// How close two ranks must be to share a plateau.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    Absolute(f64),
    /// Scaled by the larger magnitude of the two ranks, floored at 1.
    Relative(f64),
}

impl Tolerance {
    pub fn close(self, a: f64, b: f64) -> bool {
        let diff = (a - b).abs();
        match self {
            Tolerance::Absolute(eps) => diff <= eps,
            Tolerance::Relative(eps) => diff <= eps * a.abs().max(b.abs()).max(1.0),
        }
    }
}

/// Consecutive values whose ranks are within `tol` share a cell.
pub fn partition_plateau(ranked: &RankedValues, tol: Tolerance) -> DomainPartition {
    let mut cells: Vec<Vec<i32>> = Vec::new();
    let mut prev: Option<f64> = None;
    for &(v, r) in ranked.entries() {
        match prev {
            Some(p) if tol.close(p, r) => cells.last_mut().unwrap().push(v),
            _ => cells.push(vec![v]),
        }
        prev = Some(r);
    }
    DomainPartition::new(cells)
}

/// Two cells: the best plateau, then everything else.
pub fn partition_best_plateau(ranked: &RankedValues, tol: Tolerance) -> DomainPartition {
    let mut cells = partition_plateau(ranked, tol).into_cells();
    if cells.len() > 2 {
        let rest: Vec<i32> = cells.drain(1..).flatten().collect();
        cells.push(rest);
    }
    DomainPartition::new(cells)
}

/// Cells sliced at the cutoffs: the best `c_0` values, then values
/// `c_0+1..=c_1`, and so on. Cutoffs past the domain size truncate; values
/// beyond the last cutoff form one final cell.
pub fn partition_star(ranked: &RankedValues, cutoffs: &[usize]) -> DomainPartition {
    let values: Vec<i32> = ranked.values().collect();
    let mut cells = Vec::new();
    let mut start = 0;
    for &c in cutoffs {
        let end = c.min(values.len());
        if end > start {
            cells.push(values[start..end].to_vec());
            start = end;
        }
    }
    if start < values.len() {
        cells.push(values[start..].to_vec());
    }
    DomainPartition::new(cells)
}

/// Cell sizes proportional to `fractions`; every cell but the last takes the
/// ceiling of its share, the last takes what is left.
pub fn partition_percentile(ranked: &RankedValues, fractions: &[f64]) -> DomainPartition {
    let values: Vec<i32> = ranked.values().collect();
    let m = values.len();
    let mut cells = Vec::new();
    let mut start = 0;
    for (i, &f) in fractions.iter().enumerate() {
        let end = if i + 1 == fractions.len() {
            m
        } else {
            (start + ((f * m as f64) - 1e-9).ceil().max(0.0) as usize).min(m)
        };
        cells.push(values[start..end].to_vec());
        start = end;
    }
    DomainPartition::new(cells)
}

/// One value per cell: plain value branching.
pub fn partition_singletons(ranked: &RankedValues) -> DomainPartition {
    DomainPartition::new(ranked.values().map(|v| vec![v]).collect())
}

/// Consecutive cells of `size` values, the last possibly smaller.
pub fn partition_chunks(ranked: &RankedValues, size: usize) -> DomainPartition {
    assert!(size > 0, "cell size must be positive");
    let values: Vec<i32> = ranked.values().collect();
    DomainPartition::new(values.chunks(size).map(<[i32]>::to_vec).collect())
}

/// A partitioning rule, applied to the ranked values of the chosen variable.
#[derive(Debug, Clone, PartialEq)]
pub enum Partitioner {
    Singletons,
    Plateau(Tolerance),
    BestPlateau(Tolerance),
    Star(Vec<usize>),
    Percentile(Vec<f64>),
    Chunks(usize),
}

impl Partitioner {
    pub fn star(cutoffs: Vec<usize>) -> Result<Self, RankingError> {
        if cutoffs.is_empty() || cutoffs[0] == 0 || cutoffs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(RankingError::BadCutoffs(cutoffs));
        }
        Ok(Partitioner::Star(cutoffs))
    }

    pub fn percentile(fractions: Vec<f64>) -> Result<Self, RankingError> {
        let sum: f64 = fractions.iter().sum();
        if fractions.is_empty() || fractions.iter().any(|&f| f <= 0.0 || !f.is_finite()) || (sum - 1.0).abs() > 1e-9 {
            return Err(RankingError::BadFractions(fractions));
        }
        Ok(Partitioner::Percentile(fractions))
    }

    pub fn chunks(size: usize) -> Result<Self, RankingError> {
        if size == 0 {
            return Err(RankingError::ZeroCellSize);
        }
        Ok(Partitioner::Chunks(size))
    }

    pub fn partition(&self, ranked: &RankedValues) -> DomainPartition {
        match self {
            Partitioner::Singletons => partition_singletons(ranked),
            Partitioner::Plateau(tol) => partition_plateau(ranked, *tol),
            Partitioner::BestPlateau(tol) => partition_best_plateau(ranked, *tol),
            Partitioner::Star(cutoffs) => partition_star(ranked, cutoffs),
            Partitioner::Percentile(fractions) => partition_percentile(ranked, fractions),
            Partitioner::Chunks(size) => partition_chunks(ranked, *size),
        }
    }
}

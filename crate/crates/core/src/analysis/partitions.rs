use super::{AnalysisError, KahanSum, ProbabilityModel};

/// One multiset of branch labels and the number of distinct paths (orderings)
/// that realize it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionEntry {
    /// Labels in non-increasing order.
    pub parts: Vec<usize>,
    pub multiplicity: u64,
}

/// All label multisets of `n` parts in `0..b` summing to `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSet {
    pub k: usize,
    pub n: usize,
    pub b: usize,
    pub entries: Vec<PartitionEntry>,
}

impl PartitionSet {
    /// Number of paths of discrepancy `k`.
    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    /// Every ordered composition, in lexicographic order.
    pub fn compositions(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(self.n);
        fn rec(cur: &mut Vec<usize>, left: usize, n: usize, b: usize, out: &mut Vec<Vec<usize>>) {
            if cur.len() == n {
                if left == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            let slots = n - cur.len() - 1;
            for t in 0..b.min(left + 1) {
                if left - t <= slots * (b - 1) {
                    cur.push(t);
                    rec(cur, left - t, n, b, out);
                    cur.pop();
                }
            }
        }
        rec(&mut cur, self.k, self.n, self.b, &mut out);
        out
    }
}

fn multiplicity(parts: &[usize]) -> u64 {
    let mut m: u128 = (1..=parts.len() as u128).product();
    let mut i = 0;
    while i < parts.len() {
        let j = parts[i..].iter().take_while(|&&x| x == parts[i]).count();
        m /= (1..=j as u128).product::<u128>();
        i += j;
    }
    u64::try_from(m).expect("multiplicity overflows u64")
}

/// Label multisets of discrepancy `k` on a tree of width `b`, depth `n`.
pub fn enumerate_partitions(k: usize, n: usize, b: usize) -> Result<PartitionSet, AnalysisError> {
    if b == 0 || n == 0 {
        return Err(AnalysisError::EmptyModel);
    }
    if k > n * (b - 1) {
        return Err(AnalysisError::DiscrepancyOutOfRange { k, max: n * (b - 1) });
    }
    let mut entries = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(cur: &mut Vec<usize>, left: usize, cap: usize, n: usize, out: &mut Vec<PartitionEntry>) {
        if cur.len() == n {
            if left == 0 {
                out.push(PartitionEntry {
                    parts: cur.clone(),
                    multiplicity: multiplicity(cur),
                });
            }
            return;
        }
        let slots = n - cur.len();
        for t in (0..=cap.min(left)).rev() {
            // the remaining parts are at most t each
            if left - t <= (slots - 1) * t {
                cur.push(t);
                rec(cur, left - t, t, n, out);
                cur.pop();
            }
        }
    }
    rec(&mut cur, k, b - 1, n, &mut entries);
    Ok(PartitionSet { k, n, b, entries })
}

/// Success probability of the first decomposition subproblem with `c`
/// values per variable: `(p_1 + ... + p_c)^n`.
pub fn prob_dbs(c: usize, model: &ProbabilityModel) -> Result<f64, AnalysisError> {
    if c == 0 || c > model.width() {
        return Err(AnalysisError::WidthOutOfRange { c, b: model.width() });
    }
    let head = model.p()[..c].iter().copied().collect::<KahanSum>().value();
    Ok(head.powi(model.depth() as i32))
}

/// Leaves of the first decomposition subproblem, `c^n`.
pub fn dbs_leaves(c: usize, n: usize) -> u64 {
    (c as u64).pow(n as u32)
}

/// Success probability of the paths of discrepancy exactly `k`.
pub fn prob_lds(k: usize, model: &ProbabilityModel) -> Result<f64, AnalysisError> {
    let set = enumerate_partitions(k, model.depth(), model.width())?;
    Ok(set
        .entries
        .iter()
        .map(|e| model.leaf_mass(&e.parts.iter().map(|&t| t as i64).collect::<Vec<_>>()) * e.multiplicity as f64)
        .collect::<KahanSum>()
        .value())
}

/// Success probability of all paths of discrepancy at most `k`.
pub fn prob_lds_upto(k: usize, model: &ProbabilityModel) -> Result<f64, AnalysisError> {
    let mut s = KahanSum::default();
    for d in 0..=k {
        s.add(prob_lds(d, model)?);
    }
    Ok(s.value())
}

/// Number of paths of discrepancy exactly `k`.
pub fn lds_leaves(k: usize, n: usize, b: usize) -> Result<u64, AnalysisError> {
    Ok(enumerate_partitions(k, n, b)?.total())
}

pub fn lds_leaves_upto(k: usize, n: usize, b: usize) -> Result<u64, AnalysisError> {
    (0..=k).map(|d| lds_leaves(d, n, b)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> ProbabilityModel {
        ProbabilityModel::new(2, vec![0.5, 0.3, 0.2]).unwrap()
    }

    #[test]
    fn zero_discrepancy_is_the_first_leaf() {
        let set = enumerate_partitions(0, 4, 3).unwrap();
        assert_eq!(set.entries.len(), 1);
        assert_eq!(set.entries[0].parts, vec![0; 4]);
        assert_eq!(set.total(), 1);
        let m = example();
        assert!((prob_lds(0, &m).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn unit_discrepancy_has_n_paths() {
        for n in 1..6 {
            let set = enumerate_partitions(1, n, 2).unwrap();
            assert_eq!(set.entries.len(), 1);
            assert_eq!(set.total(), n as u64);
        }
    }

    #[test]
    fn two_by_three_discrepancy_two() {
        let set = enumerate_partitions(2, 2, 3).unwrap();
        assert_eq!(set.total(), 3);
        assert_eq!(set.compositions(), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    }

    #[test]
    fn documented_values() {
        let m = example();
        assert!((prob_dbs(2, &m).unwrap() - 0.64).abs() < 1e-15);
        assert!((prob_lds(1, &m).unwrap() - 0.30).abs() < 1e-15);
        assert_eq!(prob_dbs(3, &m).unwrap(), 1.0);
        assert!((prob_dbs(1, &m).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn waves_cover_the_tree() {
        for b in 1..=5 {
            for n in 1..=5 {
                let total: u64 = (0..=n * (b - 1)).map(|k| lds_leaves(k, n, b).unwrap()).sum();
                assert_eq!(total, (b as u64).pow(n as u32));
            }
        }
        let m = ProbabilityModel::new(3, vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let all = prob_lds_upto(9, &m).unwrap();
        assert!((all - 1.0).abs() < 1e-12);
    }

    #[test]
    fn out_of_range_discrepancy() {
        assert!(enumerate_partitions(7, 3, 3).is_err());
        assert!(prob_dbs(0, &example()).is_err());
    }
}

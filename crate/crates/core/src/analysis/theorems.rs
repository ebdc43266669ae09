//! Numerical checks of the relations between the broadening, discrepancy
//! and decomposition strategies.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ranking::Partitioner;
use crate::search::{SearchConfig, Selector};

use super::brute::{trace_synthetic, trace_synthetic_ib};
use super::{
    dbs_leaves, lds_leaves_upto, make_distribution, prob_dbs, prob_lds_upto, random_model, AnalysisError,
    DistributionSpec, Family, ProbabilityModel,
};

/// Tolerance of the probability comparisons.
pub const THEOREM_TOLERANCE: f64 = 1e-12;

/// Both sides of a checked inequality `lhs >= rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// Sides agree within [`THEOREM_TOLERANCE`].
    pub equal: bool,
}

impl TheoremCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        TheoremCheck {
            lhs,
            rhs,
            holds: lhs >= rhs - THEOREM_TOLERANCE,
            equal: (lhs - rhs).abs() <= THEOREM_TOLERANCE,
        }
    }

    /// `lhs` exceeds `rhs` by more than rounding noise.
    pub fn strict(&self) -> bool {
        self.lhs - self.rhs > 4.0 * f64::EPSILON
    }
}

fn precondition(msg: String) -> AnalysisError {
    AnalysisError::Precondition(msg)
}

/// Mean success per leaf of the first decomposition subproblems (every
/// `c~ <= c`, worst case taken) against the paths of discrepancy at most
/// `k`. Requires a best plateau of exactly `c` branches.
pub fn check_theorem2(model: &ProbabilityModel, c: usize, k: usize) -> Result<TheoremCheck, AnalysisError> {
    let (b, n) = (model.width(), model.depth());
    if c == 0 || c > b {
        return Err(precondition(format!("c = {c} outside 1..={b}")));
    }
    if k > model.max_discrepancy() {
        return Err(precondition(format!("k = {k} above {}", model.max_discrepancy())));
    }
    if model.best_plateau() != c {
        return Err(precondition(format!(
            "best plateau has {} branches, not {c}",
            model.best_plateau()
        )));
    }
    let lhs = (1..=c)
        .map(|ct| Ok(prob_dbs(ct, model)? / dbs_leaves(ct, n) as f64))
        .collect::<Result<Vec<f64>, AnalysisError>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let rhs = prob_lds_upto(k, model)? / lds_leaves_upto(k, n, b)? as f64;
    Ok(TheoremCheck::new(lhs, rhs))
}

/// Success of the first subproblem with `c` values per variable against the
/// paths of discrepancy at most `k`, when those are no more than `c^n`.
pub fn check_theorem3(model: &ProbabilityModel, c: usize, k: usize) -> Result<TheoremCheck, AnalysisError> {
    let (b, n) = (model.width(), model.depth());
    if n < 2 {
        return Err(precondition("depth must be at least 2".into()));
    }
    if c == 0 || c > b {
        return Err(precondition(format!("c = {c} outside 1..={b}")));
    }
    if k > model.max_discrepancy() {
        return Err(precondition(format!("k = {k} above {}", model.max_discrepancy())));
    }
    if !model.is_strictly_decreasing() {
        return Err(precondition("probabilities are not strictly decreasing".into()));
    }
    let p = model.p();
    if c < b && p[0].powi(n as i32 - 1) * p[c] >= p[c - 1].powi(n as i32) {
        return Err(precondition(format!("p_1^(n-1) p_(c+1) >= p_c^n for c = {c}")));
    }
    let budget = lds_leaves_upto(k, n, b)?;
    if budget > dbs_leaves(c, n) {
        return Err(precondition(format!("{budget} paths of discrepancy <= {k} exceed {c}^{n}")));
    }
    Ok(TheoremCheck::new(prob_dbs(c, model)?, prob_lds_upto(k, model)?))
}

/// One of the pairs where the strict inequality is claimed to become an
/// equality, evaluated whether or not the leaf budget admits it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualityPair {
    pub c: usize,
    pub k: usize,
    pub dbs: f64,
    pub lds: f64,
    pub equal: bool,
    /// Whether the paths of discrepancy at most `k` fit in `c^n` leaves.
    pub admissible: bool,
}

pub fn theorem3_equality_pairs(model: &ProbabilityModel) -> Result<Vec<EqualityPair>, AnalysisError> {
    let (b, n) = (model.width(), model.depth());
    let top = model.max_discrepancy();
    let mut pairs = vec![(1, 0)];
    if b >= 2 && top >= 1 {
        pairs.push((b - 1, top - 1));
    }
    pairs.push((b, top));
    pairs
        .into_iter()
        .map(|(c, k)| {
            let dbs = prob_dbs(c, model)?;
            let lds = prob_lds_upto(k, model)?;
            Ok(EqualityPair {
                c,
                k,
                dbs,
                lds,
                equal: (dbs - lds).abs() <= THEOREM_TOLERANCE,
                admissible: lds_leaves_upto(k, n, b)? <= dbs_leaves(c, n),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Check {
    pub cutoffs: Vec<usize>,
    /// For each cutoff index `t >= 1`: whether the subproblems with largest
    /// label `t` hold exactly the leaves new to pass `t`.
    pub per_cutoff: Vec<bool>,
    pub dbs_leaves: u64,
    pub ib_leaves: u64,
    pub holds: bool,
}

/// Compares decomposition search with the sliced partitioner and
/// preference ordering against iterative broadening on the unconstrained
/// tree, by exact leaf sets.
pub fn check_theorem1(b: usize, n: usize, cutoffs: &[usize]) -> Result<Theorem1Check, AnalysisError> {
    if cutoffs.is_empty() || cutoffs.windows(2).any(|w| w[0] >= w[1]) || cutoffs[0] == 0 || *cutoffs.last().unwrap() > b {
        return Err(precondition(format!("cutoffs {cutoffs:?} must increase within 1..={b}")));
    }
    let ib = trace_synthetic_ib(b, n, cutoffs)?;
    let config = SearchConfig::dbs(Partitioner::Star(cutoffs.to_vec())).with_selector(Selector::LdsPreference);
    let dbs = trace_synthetic(b, n, &config)?;
    let mut per_cutoff = Vec::new();
    for t in 1..cutoffs.len() {
        let mut from_dbs: BTreeSet<&Vec<i32>> = BTreeSet::new();
        let mut duplicated = false;
        for i in 0..dbs.subproblems.len() {
            if dbs.subproblems[i].0.iter().copied().max() == Some(t as u8) {
                for leaf in dbs.subproblem_leaves(i) {
                    duplicated |= !from_dbs.insert(leaf);
                }
            }
        }
        let now: BTreeSet<&Vec<i32>> = ib.iteration_leaves(t).iter().collect();
        let before: BTreeSet<&Vec<i32>> = ib.iteration_leaves(t - 1).iter().collect();
        let fresh: BTreeSet<&Vec<i32>> = now.difference(&before).copied().collect();
        per_cutoff.push(!duplicated && from_dbs == fresh);
    }
    let dbs_leaves = dbs.leaves.len() as u64;
    let ib_leaves = ib.leaves.len() as u64;
    let holds = per_cutoff.iter().all(|&x| x) && (cutoffs.len() < 2 || dbs_leaves < ib_leaves);
    Ok(Theorem1Check {
        cutoffs: cutoffs.to_vec(),
        per_cutoff,
        dbs_leaves,
        ib_leaves,
        holds,
    })
}

/// Outcome of [`verify_theorems`].
#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub theorem1_points: usize,
    pub theorem2_points: usize,
    pub theorem3_points: usize,
    /// Grid points skipped because the model violates a precondition.
    pub skipped: usize,
    pub failures: Vec<String>,
    /// Every evaluated equality pair of the strict-model comparison.
    pub equality_pairs: Vec<(usize, usize, EqualityPair)>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn merge(&mut self, other: VerificationReport) {
        self.theorem1_points += other.theorem1_points;
        self.theorem2_points += other.theorem2_points;
        self.theorem3_points += other.theorem3_points;
        self.skipped += other.skipped;
        self.failures.extend(other.failures);
        self.equality_pairs.extend(other.equality_pairs);
    }
}

const RANDOM_MODELS: u64 = 12;

fn plateau_models(b: usize, n: usize, seed: u64) -> Vec<ProbabilityModel> {
    let mut bases: Vec<ProbabilityModel> = [Family::Linear, Family::poisson(), Family::binomial()]
        .iter()
        .filter_map(|&f| make_distribution(&DistributionSpec::new(f), b, n).ok())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    bases.extend((0..RANDOM_MODELS).map(|_| random_model(b, n, &mut rng)));
    let mut out = Vec::new();
    for base in &bases {
        for c in 1..=b {
            let mut p = base.p().to_vec();
            let mean = p[..c].iter().sum::<f64>() / c as f64;
            p[..c].iter_mut().for_each(|x| *x = mean);
            if let Ok(m) = ProbabilityModel::from_weights(n, p) {
                out.push(m);
            }
        }
    }
    out
}

fn strict_models(b: usize, n: usize, seed: u64) -> Vec<ProbabilityModel> {
    let mut out = Vec::new();
    let geometric: Vec<f64> = (0..b).map(|j| 0.5f64.powi(j as i32)).collect();
    out.extend(ProbabilityModel::from_weights(n, geometric));
    out.extend(make_distribution(&DistributionSpec::new(Family::Linear), b, n));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    out.extend((0..RANDOM_MODELS).map(|_| random_model(b, n, &mut rng)));
    out.retain(ProbabilityModel::is_strictly_decreasing);
    out
}

fn verify_point(b: usize, n: usize) -> VerificationReport {
    let mut r = VerificationReport::default();
    let seed = (b * 100 + n) as u64;

    if (2..=4).contains(&b) && n <= 4 {
        let mut chains = vec![(1..=b).collect::<Vec<_>>(), vec![1, b]];
        if b == 4 {
            chains.push(vec![1, 2, 4]);
        }
        chains.dedup();
        for cutoffs in chains {
            r.theorem1_points += 1;
            match check_theorem1(b, n, &cutoffs) {
                Ok(c) if c.holds => {}
                Ok(c) => r.failures.push(format!("theorem 1, b={b} n={n}: {c:?}")),
                Err(e) => r.failures.push(format!("theorem 1, b={b} n={n}: {e}")),
            }
        }
    }

    for (mi, model) in plateau_models(b, n, seed).iter().enumerate() {
        let c = model.best_plateau();
        for k in 0..=model.max_discrepancy() {
            match check_theorem2(model, c, k) {
                Ok(check) => {
                    r.theorem2_points += 1;
                    if !check.holds {
                        r.failures.push(format!("theorem 2, b={b} n={n} model {mi} c={c} k={k}: {check:?}"));
                    }
                    if k < c && !check.equal {
                        r.failures.push(format!("theorem 2 equality, b={b} n={n} model {mi} c={c} k={k}: {check:?}"));
                    }
                }
                Err(_) => r.skipped += 1,
            }
        }
    }

    if n >= 2 {
        for (mi, model) in strict_models(b, n, seed + 1).iter().enumerate() {
            let top = model.max_discrepancy();
            for c in 1..=b {
                for k in 0..=top {
                    match check_theorem3(model, c, k) {
                        Ok(check) => {
                            r.theorem3_points += 1;
                            let pair = (c == 1 && k == 0) || (c == b && k == top);
                            if !check.holds {
                                r.failures.push(format!("theorem 3, b={b} n={n} model {mi} c={c} k={k}: {check:?}"));
                            } else if pair && !check.equal {
                                r.failures.push(format!("theorem 3 equality, b={b} n={n} model {mi} c={c} k={k}: {check:?}"));
                            } else if !pair && !check.strict() {
                                r.failures.push(format!("theorem 3 strictness, b={b} n={n} model {mi} c={c} k={k}: {check:?}"));
                            }
                        }
                        Err(_) => r.skipped += 1,
                    }
                }
            }
            if let Ok(pairs) = theorem3_equality_pairs(model) {
                r.equality_pairs.extend(pairs.into_iter().map(|p| (b, n, p)));
            }
        }
    }
    r
}

/// Checks all three relations over every width `2..=max_b` and depth
/// `1..=max_n`. Points whose model violates a precondition are skipped.
pub fn verify_theorems(max_b: usize, max_n: usize) -> VerificationReport {
    let grid: Vec<(usize, usize)> = (2..=max_b).flat_map(|b| (1..=max_n).map(move |n| (b, n))).collect();
    let parts: Vec<VerificationReport> = grid.par_iter().map(|&(b, n)| verify_point(b, n)).collect();
    let mut report = VerificationReport::default();
    for p in parts {
        report.merge(p);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_leaf_pair_is_equal() {
        let m = ProbabilityModel::from_weights(3, vec![0.5, 0.3, 0.15, 0.05]).unwrap();
        let c = check_theorem3(&m, 1, 0).unwrap();
        assert!(c.equal && c.holds);
        let whole = check_theorem3(&m, 4, 9).unwrap();
        assert!((whole.lhs - 1.0).abs() < 1e-12 && whole.equal);
    }

    #[test]
    fn geometric_grid_holds() {
        let p: Vec<f64> = (0..4).map(|j| 0.5f64.powi(j)).collect();
        let m = ProbabilityModel::from_weights(3, p).unwrap();
        let mut checked = 0;
        for c in 1..=4 {
            for k in 0..=9 {
                if let Ok(check) = check_theorem3(&m, c, k) {
                    assert!(check.holds, "c={c} k={k}");
                    checked += 1;
                }
            }
        }
        assert!(checked >= 4);
    }

    #[test]
    fn plateau_means() {
        let m = ProbabilityModel::from_weights(3, vec![0.3, 0.3, 0.3, 0.1]).unwrap();
        for k in 0..3 {
            assert!(check_theorem2(&m, 3, k).unwrap().equal);
        }
        let c = check_theorem2(&m, 3, 5).unwrap();
        assert!(c.holds && c.strict());
        assert!(check_theorem2(&m, 2, 0).is_err());
    }

    #[test]
    fn middle_pair_is_outside_the_budget() {
        let m = ProbabilityModel::from_weights(3, vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let pairs = theorem3_equality_pairs(&m).unwrap();
        assert_eq!((pairs[1].c, pairs[1].k), (3, 8));
        assert!(!pairs[1].admissible);
        // (1 - p_b)^n against 1 - p_b^n
        assert!((pairs[1].dbs - 0.9f64.powi(3)).abs() < 1e-12);
        assert!((pairs[1].lds - (1.0 - 0.1f64.powi(3))).abs() < 1e-12);
    }

    #[test]
    fn broadening_emulation() {
        let c = check_theorem1(4, 3, &[1, 2, 4]).unwrap();
        assert!(c.holds);
        assert_eq!(c.ib_leaves, 73);
        assert_eq!(c.dbs_leaves, 64);
    }

    #[test]
    fn small_grid_verifies() {
        let r = verify_theorems(4, 3);
        assert!(r.passed(), "{:?}", r.failures);
        assert!(r.theorem2_points > 0 && r.theorem3_points > 0 && r.theorem1_points > 0);
    }
}

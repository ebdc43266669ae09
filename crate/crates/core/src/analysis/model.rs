use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::AnalysisError;

const SUM_TOLERANCE: f64 = 1e-12;

/// Compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(self) -> f64 {
        self.sum
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut k = KahanSum::default();
        iter.into_iter().for_each(|x| k.add(x));
        k
    }
}

/// An ordered tree of width `b` and depth `n` where branch `j` (0-based
/// label) of every node leads to success with probability `p[j]`,
/// independently per level.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityModel {
    b: usize,
    n: usize,
    p: Vec<f64>,
}

impl ProbabilityModel {
    /// `p` must be non-increasing, nonnegative and sum to 1.
    pub fn new(n: usize, p: Vec<f64>) -> Result<Self, AnalysisError> {
        if p.is_empty() || n == 0 {
            return Err(AnalysisError::EmptyModel);
        }
        if p.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(AnalysisError::NegativeProbability);
        }
        if p.windows(2).any(|w| w[0] < w[1]) {
            return Err(AnalysisError::NotSorted);
        }
        let sum = p.iter().copied().collect::<KahanSum>().value();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(AnalysisError::NotNormalized(sum));
        }
        Ok(ProbabilityModel { b: p.len(), n, p })
    }

    /// Sorts and rescales arbitrary nonnegative weights into a model.
    pub fn from_weights(n: usize, mut weights: Vec<f64>) -> Result<Self, AnalysisError> {
        if weights.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(AnalysisError::NegativeProbability);
        }
        let total = weights.iter().copied().collect::<KahanSum>().value();
        if !(total > 0.0) {
            return Err(AnalysisError::Degenerate);
        }
        weights.sort_by(|a, b| b.total_cmp(a));
        weights.iter_mut().for_each(|w| *w /= total);
        ProbabilityModel::new(n, weights)
    }

    pub fn width(&self) -> usize {
        self.b
    }

    pub fn depth(&self) -> usize {
        self.n
    }

    /// Branch probabilities, best branch first.
    pub fn p(&self) -> &[f64] {
        &self.p
    }

    /// Success mass of the leaf reached by `labels`.
    pub fn leaf_mass<T: Copy + Into<i64>>(&self, labels: &[T]) -> f64 {
        labels.iter().map(|&l| self.p[l.into() as usize]).product()
    }

    /// Number of leaves, `b^n`, if it fits.
    pub fn leaf_count(&self) -> Option<u64> {
        (self.b as u64).checked_pow(self.n as u32)
    }

    pub fn max_discrepancy(&self) -> usize {
        self.n * (self.b - 1)
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.p.windows(2).all(|w| w[0] > w[1])
    }

    /// Size of the leading run of equal probabilities.
    pub fn best_plateau(&self) -> usize {
        self.p.iter().take_while(|&&x| x == self.p[0]).count()
    }
}

/// Shape of the branch success distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `p_j` proportional to `b - j + 1`.
    Linear,
    /// `p_j` proportional to `lambda^(j-1) / (j-1)!`.
    Poisson { lambda: f64 },
    /// `p_j` proportional to `C(b-1, j-1) q^(j-1) (1-q)^(b-j)`.
    Binomial { q: f64 },
}

impl Family {
    pub fn poisson() -> Self {
        Family::Poisson { lambda: 2.0 }
    }

    pub fn binomial() -> Self {
        Family::Binomial { q: 0.35 }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "linear" => Some(Family::Linear),
            "poisson" => Some(Family::poisson()),
            "binomial" => Some(Family::binomial()),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Linear => "linear",
            Family::Poisson { .. } => "poisson",
            Family::Binomial { .. } => "binomial",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionSpec {
    pub family: Family,
    /// `(count, size)`: replace consecutive runs of `size` probabilities by
    /// their mean, giving `count` plateaus.
    pub plateaus: Option<(usize, usize)>,
}

impl DistributionSpec {
    pub fn new(family: Family) -> Self {
        DistributionSpec {
            family,
            plateaus: None,
        }
    }

    pub fn with_plateaus(mut self, count: usize, size: usize) -> Self {
        self.plateaus = Some((count, size));
        self
    }
}

fn ln_factorial(k: usize) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

/// Branch probabilities of `spec` for width `b`, normalized and sorted
/// best first, as a model of depth `n`.
pub fn make_distribution(spec: &DistributionSpec, b: usize, n: usize) -> Result<ProbabilityModel, AnalysisError> {
    if b == 0 {
        return Err(AnalysisError::EmptyModel);
    }
    let weights: Vec<f64> = match spec.family {
        Family::Linear => (1..=b).map(|j| (b - j + 1) as f64).collect(),
        Family::Poisson { lambda } => {
            if !(lambda >= 0.0) {
                return Err(AnalysisError::BadParameter("lambda", lambda));
            }
            (1..=b)
                .map(|j| {
                    let t = j - 1;
                    let pow = if t == 0 { 1.0 } else { lambda.powi(t as i32) };
                    (-lambda).exp() * pow / ln_factorial(t).exp()
                })
                .collect()
        }
        Family::Binomial { q } => {
            if !(0.0..=1.0).contains(&q) {
                return Err(AnalysisError::BadParameter("q", q));
            }
            (1..=b)
                .map(|j| {
                    let t = j - 1;
                    let choose = (ln_factorial(b - 1) - ln_factorial(t) - ln_factorial(b - 1 - t)).exp();
                    let hit = if t == 0 { 1.0 } else { q.powi(t as i32) };
                    let miss = if b - j == 0 { 1.0 } else { (1.0 - q).powi((b - j) as i32) };
                    choose * hit * miss
                })
                .collect()
        }
    };
    let model = ProbabilityModel::from_weights(n, weights)?;
    match spec.plateaus {
        None => Ok(model),
        Some((count, size)) => {
            if count * size != b || size == 0 {
                return Err(AnalysisError::BadPlateaus { count, size, b });
            }
            let mut p = model.p.clone();
            for run in p.chunks_mut(size) {
                let mean = run.iter().sum::<f64>() / size as f64;
                run.iter_mut().for_each(|x| *x = mean);
            }
            ProbabilityModel::from_weights(n, p)
        }
    }
}

/// A model with independent uniform weights, almost surely strictly
/// decreasing after sorting.
pub fn random_model(b: usize, n: usize, rng: &mut impl Rng) -> ProbabilityModel {
    let w: Vec<f64> = (0..b).map(|_| rng.gen_range(0.01..1.0)).collect();
    ProbabilityModel::from_weights(n, w).expect("positive weights")
}

/// Like [`random_model`] with a fresh generator seeded by `seed`.
pub fn random_model_seeded(b: usize, n: usize, seed: u64) -> ProbabilityModel {
    random_model(b, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_closed_form() {
        let m = make_distribution(&DistributionSpec::new(Family::Linear), 8, 8).unwrap();
        for (j, &p) in m.p().iter().enumerate() {
            assert!((p - (8 - j) as f64 / 36.0).abs() < 1e-15);
        }
    }

    #[test]
    fn plateau_variant_has_four_pairs() {
        for family in [Family::Linear, Family::poisson(), Family::binomial()] {
            let m = make_distribution(&DistributionSpec::new(family).with_plateaus(4, 2), 8, 8).unwrap();
            let p = m.p();
            for run in p.chunks(2) {
                assert_eq!(run[0], run[1]);
            }
            for w in p.chunks(2).collect::<Vec<_>>().windows(2) {
                assert!(w[0][0] > w[1][0], "{family:?}");
            }
        }
    }

    #[test]
    fn small_lambda_concentrates_mass() {
        let m = make_distribution(&DistributionSpec::new(Family::Poisson { lambda: 1e-9 }), 5, 3).unwrap();
        assert!(m.p()[0] > 1.0 - 1e-8);
    }

    #[test]
    fn rejects_bad_models() {
        assert_eq!(ProbabilityModel::new(2, vec![0.2, 0.8]), Err(AnalysisError::NotSorted));
        assert!(matches!(ProbabilityModel::new(2, vec![0.5, 0.4]), Err(AnalysisError::NotNormalized(_))));
        assert_eq!(ProbabilityModel::from_weights(2, vec![0.0, 0.0]), Err(AnalysisError::Degenerate));
        assert!(make_distribution(&DistributionSpec::new(Family::Linear).with_plateaus(3, 2), 8, 8).is_err());
    }

    #[test]
    fn leaf_masses_sum_to_one() {
        let m = random_model_seeded(3, 4, 9);
        let mut total = KahanSum::default();
        for leaf in 0..81u32 {
            let labels: Vec<u32> = (0..4).map(|i| leaf / 3u32.pow(i) % 3).collect();
            total.add(m.leaf_mass(&labels));
        }
        assert!((total.value() - 1.0).abs() < 1e-12);
    }
}

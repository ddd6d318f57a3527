use serde::ser::Serializer;
use serde::Serialize;

use super::{InfoError, MAX_XOR_BITS, NORM_TOL};

/// A distribution over the label set {0, 1, ..., k-1}. Probabilities are
/// non-negative and sum to 1 within `NORM_TOL`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dist {
    probs: Vec<f64>,
}

impl Dist {
    pub fn from_probs(probs: Vec<f64>) -> Result<Self, InfoError> {
        if let Some(&bad) = probs.iter().find(|p| **p < 0.0) {
            return Err(InfoError::NegativeProb(bad));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(InfoError::NotNormalized(sum));
        }
        Ok(Dist { probs })
    }

    pub fn uniform(k: usize) -> Self {
        Dist {
            probs: vec![1.0 / k as f64; k],
        }
    }

    pub fn point_mass(k: usize, at: usize) -> Self {
        let mut probs = vec![0.0; k];
        probs[at] = 1.0;
        Dist { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn p(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn max_prob(&self) -> f64 {
        self.probs.iter().copied().fold(0.0, f64::max)
    }

    pub fn support_size(&self) -> usize {
        self.probs.iter().filter(|p| **p > 0.0).count()
    }
}

/// A joint distribution over named axes; probabilities are stored row-major
/// with the first axis slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDist {
    axis_names: Vec<String>,
    shape: Vec<usize>,
    probs: Vec<f64>,
}

impl JointDist {
    pub fn new(
        axis_names: Vec<String>,
        shape: Vec<usize>,
        probs: Vec<f64>,
    ) -> Result<Self, InfoError> {
        if axis_names.len() != shape.len() {
            return Err(InfoError::ShapeMismatch(axis_names.len(), shape.len()));
        }
        let total: usize = shape.iter().product();
        if probs.len() != total {
            return Err(InfoError::ShapeMismatch(total, probs.len()));
        }
        if let Some(&bad) = probs.iter().find(|p| **p < 0.0) {
            return Err(InfoError::NegativeProb(bad));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(InfoError::NotNormalized(sum));
        }
        Ok(JointDist {
            axis_names,
            shape,
            probs,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn axis_names(&self) -> &[String] {
        &self.axis_names
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        assert_eq!(idx.len(), self.shape.len());
        let mut flat = 0;
        for (i, &v) in idx.iter().enumerate() {
            assert!(v < self.shape[i]);
            flat = flat * self.shape[i] + v;
        }
        flat
    }

    pub fn p(&self, idx: &[usize]) -> f64 {
        self.probs[self.flat_index(idx)]
    }

    /// Marginal distribution of one axis.
    pub fn marginal(&self, axis: usize) -> Dist {
        let k = self.shape[axis];
        let inner: usize = self.shape[axis + 1..].iter().product();
        let outer: usize = self.shape[..axis].iter().product();
        let mut probs = vec![0.0; k];
        for o in 0..outer {
            for (v, pv) in probs.iter_mut().enumerate() {
                let base = (o * k + v) * inner;
                *pv += self.probs[base..base + inner].iter().sum::<f64>();
            }
        }
        Dist { probs }
    }
}

#[derive(Serialize)]
struct Axis<'a> {
    name: &'a str,
    size: usize,
}

#[derive(Serialize)]
struct TableRepr<'a> {
    axes: Vec<Axis<'a>>,
    probs: &'a [f64],
}

impl Serialize for Dist {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TableRepr {
            axes: vec![Axis {
                name: "x",
                size: self.probs.len(),
            }],
            probs: &self.probs,
        }
        .serialize(serializer)
    }
}

impl Serialize for JointDist {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TableRepr {
            axes: self
                .axis_names
                .iter()
                .zip(&self.shape)
                .map(|(name, &size)| Axis { name, size })
                .collect(),
            probs: &self.probs,
        }
        .serialize(serializer)
    }
}

/// Min-entropy of a distribution: -log2 of the largest probability.
pub fn min_entropy(p: &Dist) -> f64 {
    -p.max_prob().log2()
}

/// Shannon entropy in bits.
pub fn shannon_entropy(p: &Dist) -> f64 {
    p.probs()
        .iter()
        .filter(|q| **q > 0.0)
        .map(|q| -q * q.log2())
        .sum()
}

/// Guessing probability of the first axis given all remaining axes:
/// sum over side-information values of the largest joint probability.
pub fn pguess_classical(joint: &JointDist) -> f64 {
    let k = joint.shape[0];
    let rest: usize = joint.shape[1..].iter().product();
    (0..rest)
        .map(|y| {
            (0..k)
                .map(|x| joint.probs[x * rest + y])
                .fold(0.0, f64::max)
        })
        .sum()
}

/// Conditional min-entropy of the first axis given the rest.
pub fn cond_min_entropy(joint: &JointDist) -> f64 {
    -pguess_classical(joint).log2()
}

/// Statistical (variational) distance between two distributions on the
/// same label set.
pub fn stat_distance(p: &Dist, q: &Dist) -> Result<f64, InfoError> {
    if p.len() != q.len() {
        return Err(InfoError::LabelMismatch(p.len(), q.len()));
    }
    Ok(0.5
        * p.probs()
            .iter()
            .zip(q.probs())
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>())
}

/// Bias of a bit: |P(0) - P(1)|.
pub fn bias(p: &Dist) -> Result<f64, InfoError> {
    if p.len() != 2 {
        return Err(InfoError::NotBinary(p.len()));
    }
    Ok((p.p(0) - p.p(1)).abs())
}

/// The XOR-lemma bound on the distance from uniform of a distribution over
/// {0,1}^n: half the root of the summed squared biases of all non-trivial
/// parities. Always an upper bound on stat_distance(P, uniform).
pub fn xor_lemma_bound(p: &Dist) -> Result<f64, InfoError> {
    let len = p.len();
    if !len.is_power_of_two() {
        return Err(InfoError::ShapeMismatch(len.next_power_of_two(), len));
    }
    let n = len.trailing_zeros() as usize;
    if n > MAX_XOR_BITS {
        return Err(InfoError::TooLarge(n, MAX_XOR_BITS));
    }
    // Walsh-Hadamard transform: w[f] = sum_x (-1)^{f.x} P(x) = bias of the
    // parity f.X (signed).
    let mut w = p.probs().to_vec();
    let mut h = 1;
    while h < len {
        for i in (0..len).step_by(h * 2) {
            for j in i..i + h {
                let (a, b) = (w[j], w[j + h]);
                w[j] = a + b;
                w[j + h] = a - b;
            }
        }
        h *= 2;
    }
    Ok(0.5 * w[1..].iter().map(|b| b * b).sum::<f64>().sqrt())
}

/// Hoeffding tail bound for the mean of n independent bits deviating by at
/// least t above its expectation: exp(-2 n t^2).
pub fn hoeffding_bound(n: usize, t: f64) -> Result<f64, InfoError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(InfoError::OutOfRange("deviation t must lie in [0, 1]"));
    }
    Ok((-2.0 * n as f64 * t * t).exp())
}

/// Privacy-amplification bound: distance from uniform of an ell-bit
/// universal hash output given min-entropy hmin in the source.
pub fn pa_bound(hmin: f64, ell: usize) -> f64 {
    0.5 * (-(hmin - ell as f64) / 2.0).exp2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_dist(rng: &mut ChaCha8Rng, k: usize) -> Dist {
        let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..1.0)).collect();
        let sum: f64 = raw.iter().sum();
        Dist::from_probs(raw.into_iter().map(|p| p / sum).collect()).unwrap()
    }

    #[test]
    fn min_entropy_hand_values() {
        for n in 1..10 {
            assert!((min_entropy(&Dist::uniform(1 << n)) - n as f64).abs() < 1e-12);
        }
        assert_eq!(min_entropy(&Dist::point_mass(5, 2)), 0.0);
        let p = Dist::from_probs(vec![0.75, 0.25]).unwrap();
        assert!((min_entropy(&p) - (4.0f64 / 3.0).log2()).abs() < 1e-12);
    }

    #[test]
    fn shannon_entropy_hand_values() {
        assert!((shannon_entropy(&Dist::uniform(8)) - 3.0).abs() < 1e-12);
        assert_eq!(shannon_entropy(&Dist::point_mass(4, 0)), 0.0);
        // H(1/4) = 2 - (3/4) log2 3.
        let p = Dist::from_probs(vec![0.25, 0.75]).unwrap();
        assert!((shannon_entropy(&p) - (2.0 - 0.75 * 3.0f64.log2())).abs() < 1e-12);
    }

    #[test]
    fn guessing_probability_cases() {
        // X = Y uniform bits: pguess = 1.
        let copy = JointDist::new(
            vec!["x".into(), "y".into()],
            vec![2, 2],
            vec![0.5, 0.0, 0.0, 0.5],
        )
        .unwrap();
        assert!((pguess_classical(&copy) - 1.0).abs() < 1e-12);
        assert!(cond_min_entropy(&copy).abs() < 1e-12);
        // Independent: pguess = max_x P(x).
        let indep = JointDist::new(
            vec!["x".into(), "y".into()],
            vec![2, 2],
            vec![0.35, 0.35, 0.15, 0.15],
        )
        .unwrap();
        assert!((pguess_classical(&indep) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn guessing_probability_matches_conditional_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let raw: Vec<f64> = (0..9).map(|_| rng.gen_range(0.0..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            let probs: Vec<f64> = raw.into_iter().map(|p| p / sum).collect();
            let joint =
                JointDist::new(vec!["x".into(), "y".into()], vec![3, 3], probs.clone()).unwrap();
            // Independent evaluation through P(y) max_x P(x|y).
            let mut expect = 0.0;
            for y in 0..3 {
                let py: f64 = (0..3).map(|x| probs[x * 3 + y]).sum();
                let best = (0..3).map(|x| probs[x * 3 + y] / py).fold(0.0, f64::max);
                expect += py * best;
            }
            assert!((pguess_classical(&joint) - expect).abs() < 1e-12);
            // pguess >= max_x P_X(x).
            assert!(pguess_classical(&joint) >= joint.marginal(0).max_prob() - 1e-12);
        }
    }

    #[test]
    fn marginals_are_valid_distributions() {
        let joint = JointDist::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![2, 3, 2],
            vec![
                0.05, 0.05, 0.10, 0.00, 0.05, 0.15, 0.10, 0.10, 0.05, 0.15, 0.10, 0.10,
            ],
        )
        .unwrap();
        for axis in 0..3 {
            let m = joint.marginal(axis);
            assert_eq!(m.len(), joint.shape()[axis]);
            assert!((m.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        // Hand value: P(b=2) = 0.05 + 0.15 + 0.10 + 0.10 = 0.40.
        assert!((joint.marginal(1).p(2) - 0.40).abs() < 1e-12);
    }

    #[test]
    fn stat_distance_cases() {
        let u = Dist::uniform(2);
        let pm = Dist::point_mass(2, 0);
        assert_eq!(stat_distance(&u, &u).unwrap(), 0.0);
        assert!((stat_distance(&pm, &u).unwrap() - 0.5).abs() < 1e-12);
        let a = Dist::from_probs(vec![1.0, 0.0, 0.0]).unwrap();
        let b = Dist::from_probs(vec![0.0, 0.5, 0.5]).unwrap();
        assert!((stat_distance(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        assert!(stat_distance(&u, &a).is_err());
    }

    #[test]
    fn bias_of_xor_is_product_of_biases() {
        assert_eq!(bias(&Dist::uniform(2)).unwrap(), 0.0);
        assert_eq!(bias(&Dist::point_mass(2, 1)).unwrap(), 1.0);
        assert!(bias(&Dist::uniform(3)).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..100 {
            let p1 = rng.gen_range(0.0..1.0);
            let p2 = rng.gen_range(0.0..1.0);
            let d1 = Dist::from_probs(vec![p1, 1.0 - p1]).unwrap();
            let d2 = Dist::from_probs(vec![p2, 1.0 - p2]).unwrap();
            // Convolution over {0,1}: P(z) = sum_{a^b=z} P1(a) P2(b).
            let z0 = p1 * p2 + (1.0 - p1) * (1.0 - p2);
            let xor = Dist::from_probs(vec![z0, 1.0 - z0]).unwrap();
            let expect = bias(&d1).unwrap() * bias(&d2).unwrap();
            assert!((bias(&xor).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn xor_lemma_bound_cases() {
        let u = Dist::uniform(16);
        assert!(xor_lemma_bound(&u).unwrap().abs() < 1e-12);
        let pm = Dist::point_mass(2, 0);
        assert!((xor_lemma_bound(&pm).unwrap() - 0.5).abs() < 1e-12);
        assert!((stat_distance(&pm, &Dist::uniform(2)).unwrap() - 0.5).abs() < 1e-12);
        assert!(xor_lemma_bound(&Dist::uniform(3)).is_err());
        assert!(xor_lemma_bound(&Dist::uniform(1 << 13)).is_err());
    }

    #[test]
    fn xor_lemma_bound_dominates_distance_to_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..1000 {
            let n = rng.gen_range(1..=8);
            let p = random_dist(&mut rng, 1 << n);
            let sd = stat_distance(&p, &Dist::uniform(1 << n)).unwrap();
            let bound = xor_lemma_bound(&p).unwrap();
            assert!(sd <= bound + 1e-12, "sd {sd} > bound {bound}");
        }
    }

    #[test]
    fn hoeffding_values_and_tail() {
        assert!((hoeffding_bound(100, 0.1).unwrap() - (-2.0f64).exp()).abs() < 1e-12);
        assert_eq!(hoeffding_bound(64, 0.0).unwrap(), 1.0);
        assert!(hoeffding_bound(10, -0.1).is_err());
        assert!(hoeffding_bound(10, 1.5).is_err());
        // Empirical upper tail of Bernoulli(1/2) means at n = 64, t = 1/4:
        // the mean exceeds 3/4 only when a u64 has >= 48 set bits.
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let trials = 1_000_000u32;
        let hits = (0..trials)
            .filter(|_| rng.gen::<u64>().count_ones() >= 48)
            .count();
        let bound = hoeffding_bound(64, 0.25).unwrap();
        assert!((hits as f64 / trials as f64) <= bound * 1.5);
    }

    #[test]
    fn pa_bound_values() {
        assert!((pa_bound(10.0, 4) - 1.0 / 16.0).abs() < 1e-15);
        assert!((pa_bound(6.0, 6) - 0.5).abs() < 1e-15);
        // Monotone: more entropy, smaller bound.
        assert!(pa_bound(12.0, 4) < pa_bound(10.0, 4));
    }

    #[test]
    fn serialization_shape() {
        let d = Dist::uniform(2);
        assert_eq!(
            serde_json::to_string(&d).unwrap(),
            r#"{"axes":[{"name":"x","size":2}],"probs":[0.5,0.5]}"#
        );
        let j = JointDist::new(
            vec!["w".into(), "z".into()],
            vec![1, 2],
            vec![0.25, 0.75],
        )
        .unwrap();
        assert_eq!(
            serde_json::to_string(&j).unwrap(),
            r#"{"axes":[{"name":"w","size":1},{"name":"z","size":2}],"probs":[0.25,0.75]}"#
        );
    }

    #[test]
    fn construction_guards() {
        assert!(matches!(
            Dist::from_probs(vec![0.5, 0.6]),
            Err(InfoError::NotNormalized(_))
        ));
        assert!(matches!(
            Dist::from_probs(vec![1.5, -0.5]),
            Err(InfoError::NegativeProb(_))
        ));
        assert!(JointDist::new(vec!["x".into()], vec![2, 2], vec![0.25; 4]).is_err());
        assert!(JointDist::new(vec!["x".into()], vec![3], vec![0.25; 4]).is_err());
    }
}

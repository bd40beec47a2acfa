use rand::Rng;

use crate::error::{Error, Result};
use crate::util::{ceil_fraction, rng};

/// Rows kept by gradient-based one-side sampling and the weight applied to
/// each row's gradient statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct GossSample {
    pub indices: Vec<usize>,
    pub weights: Vec<f64>,
}

/// Keeps the `ceil(a*N)` largest-|gradient| rows with weight 1 plus
/// `ceil(b*N)` uniformly drawn rows from the rest with weight `(1-a)/b`.
pub fn goss_subsample(gradients: &[f64], a: f64, b: f64, seed: u64) -> Result<GossSample> {
    goss_with_rng(gradients, a, b, &mut rng(seed))
}

pub(crate) fn goss_with_rng<R: Rng>(
    gradients: &[f64],
    a: f64,
    b: f64,
    rng: &mut R,
) -> Result<GossSample> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::param(format!("GOSS fractions must be positive (a={a}, b={b})")));
    }
    if a + b > 1.0 + 1e-12 {
        return Err(Error::param(format!("GOSS needs a + b <= 1 (a={a}, b={b})")));
    }
    let n = gradients.len();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal magnitudes keep index order
    order.sort_by(|&i, &j| gradients[j].abs().total_cmp(&gradients[i].abs()));

    let top = ceil_fraction(a, n).min(n);
    let rest = &mut order[top..];
    let take = ceil_fraction(b, n).min(rest.len());
    // partial Fisher-Yates over the tail
    for k in 0..take {
        let j = rng.gen_range(k..rest.len());
        rest.swap(k, j);
    }
    rest[..take].sort_unstable();

    let amplify = (1.0 - a) / b;
    let mut indices = Vec::with_capacity(top + take);
    let mut weights = Vec::with_capacity(top + take);
    indices.extend_from_slice(&order[..top]);
    weights.resize(top, 1.0);
    indices.extend_from_slice(&order[top..top + take]);
    weights.resize(top + take, amplify);
    Ok(GossSample { indices, weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn keeps_largest_gradients() {
        let g = [9.0, 1.0, 8.0, 2.0, 7.0, 3.0, 6.0, 4.0, 5.0, 0.0];
        let s = goss_subsample(&g, 0.2, 0.1, 3).unwrap();
        assert_eq!(s.indices.len(), 3);
        assert_eq!(&s.indices[..2], &[0, 2]);
        assert_eq!(&s.weights[..2], &[1.0, 1.0]);
        assert!(![0, 2].contains(&s.indices[2]));
        assert!((s.weights[2] - 8.0).abs() < 1e-12);
    }

    #[test]
    fn full_selection_at_boundary() {
        let g: Vec<f64> = (0..10).map(|i| i as f64 - 4.5).collect();
        let s = goss_subsample(&g, 0.2, 0.8, 1).unwrap();
        let mut idx = s.indices.clone();
        idx.sort_unstable();
        assert_eq!(idx, (0..10).collect::<Vec<_>>());
        assert!(s.weights[2..].iter().all(|&w| (w - 1.0).abs() < 1e-12));
    }

    #[test]
    fn rejects_oversized_fractions() {
        assert!(goss_subsample(&[1.0; 4], 0.6, 0.5, 0).is_err());
        assert!(goss_subsample(&[1.0; 4], 0.0, 0.5, 0).is_err());
    }

    #[test]
    fn seeded_selection_repeats() {
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let g: Vec<f64> = (0..200).map(|_| r.gen::<f64>() - 0.5).collect();
        assert_eq!(
            goss_subsample(&g, 0.3, 0.2, 77).unwrap(),
            goss_subsample(&g, 0.3, 0.2, 77).unwrap()
        );
    }
}

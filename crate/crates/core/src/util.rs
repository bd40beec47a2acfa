use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `ceil(fraction * n)` that does not round exact products up because of
/// representation error (`0.1 * 35140` must give 3514, not 3515).
pub(crate) fn ceil_fraction(fraction: f64, n: usize) -> usize {
    let x = fraction * n as f64;
    let r = x.round();
    let k = if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r
    } else {
        x.ceil()
    };
    k.max(0.0) as usize
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

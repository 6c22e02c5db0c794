use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use pfdim_core::measure::{MeasureSpace, SetSystem};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::CliError;

/// Chance that a point beyond the required minimum joins a set.
const EXTRA_POINT: f64 = 0.1;

/// `n` random subsets of `m` uniformly weighted points, each of measure at
/// least `eps`: a random `ceil(eps·m)` points plus a few extra.
pub fn dense_system(m: usize, n: usize, eps: &BigRational, seed: u64) -> Result<(MeasureSpace, SetSystem), CliError> {
    if m == 0 || n == 0 {
        return Err(CliError::Config("--random needs M >= 1 and N >= 1".into()));
    }
    if eps.is_zero() || *eps > BigRational::from_integer(1.into()) || *eps < BigRational::zero() {
        return Err(CliError::Config(format!("--random: EPS must lie in (0, 1], got {eps}")));
    }
    let need = (eps * BigRational::from_integer(m.into()))
        .ceil()
        .to_integer()
        .to_usize()
        .expect("at most m");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets: Vec<Vec<usize>> = (0..n)
        .map(|_| {
            let mut order: Vec<usize> = (0..m).collect();
            order.shuffle(&mut rng);
            let mut set: Vec<usize> = order[..need].to_vec();
            set.extend(order[need..].iter().filter(|_| rng.gen_bool(EXTRA_POINT)));
            set.sort_unstable();
            set
        })
        .collect();
    let space = MeasureSpace::uniform(m).map_err(CliError::config)?;
    let sys = SetSystem::new(m, &sets).map_err(CliError::config)?;
    Ok((space, sys))
}

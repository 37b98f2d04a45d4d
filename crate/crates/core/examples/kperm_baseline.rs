//! Classical k-permutation minwise hashing next to a single-permutation sketch
//! of the same length.

use oph::datamodel::{intersect_stats, padded_dim, PairSpec};
use oph::estimate::{estimate_r_kperm, estimate_r_mat, pair_stats};
use oph::montecarlo::synth_pair;
use oph::permutation::generate_permutation;
use oph::rng::derive_seed;
use oph::sketch::{sketch_fixed, sketch_kperm_minwise};

fn main() -> oph::Result<()> {
    let d = 1u64 << 14;
    let k = 128usize;
    let (s1, s2) = synth_pair(&PairSpec::new(400, 300, 200, d)?, 1)?;
    let r = intersect_stats(&s1, &s2)?.resemblance();
    let reps = 200;
    let (mut se_k, mut se_one) = (0.0, 0.0);
    for rep in 0..reps {
        let perms = (0..k as u64)
            .map(|j| generate_permutation(derive_seed(rep, &[j]), d))
            .collect::<oph::Result<Vec<_>>>()?;
        let rk = estimate_r_kperm(&sketch_kperm_minwise(&s1, &perms)?, &sketch_kperm_minwise(&s2, &perms)?)?;
        let perm = generate_permutation(derive_seed(rep, &[u64::MAX]), padded_dim(d, k as u64))?;
        let st = pair_stats(&sketch_fixed(&s1, &perm, k)?, &sketch_fixed(&s2, &perm, k)?)?;
        se_k += (rk - r).powi(2);
        se_one += (estimate_r_mat(&st) - r).powi(2);
    }
    println!("R={r:.4} k={k}, {reps} replicates");
    println!("  k permutations: MSE {:.3e} ({} permutations per sketch)", se_k / reps as f64, k);
    println!("  one permutation: MSE {:.3e} (1 permutation per sketch)", se_one / reps as f64);
    println!("  R(1-R)/k = {:.3e}", r * (1.0 - r) / k as f64);
    Ok(())
}

//! Compares the matched-bin, zero-coded and random-coded resemblance estimates
//! with the true value on a synthetic pair.

use oph::datamodel::{intersect_stats, padded_dim, PairSpec};
use oph::estimate::{estimate_r_mat, estimate_r_random, estimate_r_zero, pair_stats};
use oph::montecarlo::synth_pair;
use oph::permutation::generate_permutation;
use oph::sketch::sketch_fixed;

fn main() -> oph::Result<()> {
    let pair = PairSpec::new(300, 250, 150, 1 << 14)?;
    let (s1, s2) = synth_pair(&pair, 7)?;
    let truth = intersect_stats(&s1, &s2)?.resemblance();
    println!("true R = {truth:.4}");
    for k in [64usize, 256, 1024] {
        let perm = generate_permutation(11, padded_dim(1 << 14, k as u64))?;
        let (s1, s2) = (s1.with_dim(perm.dim())?, s2.with_dim(perm.dim())?);
        let a = sketch_fixed(&s1, &perm, k)?;
        let b = sketch_fixed(&s2, &perm, k)?;
        let st = pair_stats(&a, &b)?;
        println!(
            "k={k:5} N_emp={:4} N_mat={:4} R_mat={:.4} R_0={:.4} R_random={:.4}",
            st.n_emp,
            st.n_mat,
            estimate_r_mat(&st),
            estimate_r_zero(&st),
            estimate_r_random(&a, &b, 0, 1, 99)?
        );
    }
    Ok(())
}

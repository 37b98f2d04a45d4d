//! Monte Carlo check of the closed-form moments on one of the word pairs.

use oph::montecarlo::{run_validation, word_pairs, McConfig, McScheme};

fn main() -> oph::Result<()> {
    let (name, pair) = word_pairs().into_iter().find(|(n, _)| n == "CREDIT-CARD").unwrap();
    let cfg = McConfig {
        name,
        pair,
        ks: vec![16, 256, 4096],
        replicates: 2000,
        scheme: McScheme::Fixed,
        master_seed: 1,
    };
    let rep = run_validation(&cfg)?;
    println!("{} D_eff={} R={:.4}", cfg.name, rep.d_eff, cfg.pair.resemblance());
    for row in &rep.rows {
        println!(
            "k={:5} {:10} empirical {:+.4e} theory {:+.4e} z={:+.2}",
            row.k,
            row.stat.name(),
            row.empirical,
            row.theory,
            row.z()
        );
    }
    Ok(())
}

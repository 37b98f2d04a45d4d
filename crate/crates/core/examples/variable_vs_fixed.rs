//! Fixed-length bins against hash-grouped variable-length bins: the fixed
//! scheme has fewer empty bins because it samples without replacement.

use oph::datamodel::PairSpec;
use oph::montecarlo::{run_validation, McConfig, McScheme, Stat};
use oph::theory::{self, TheoryInput};

fn main() -> oph::Result<()> {
    let pair = PairSpec::new(60, 50, 30, 1 << 12)?;
    println!("f={} D=2^12", pair.union());
    for k in [32u64, 64, 128] {
        let t = TheoryInput::from_pair(&pair, k)?;
        let fixed = theory::e_nemp(&t) / k as f64;
        let variable = theory::nemp_moments_variable(&t).mean_ratio;
        println!("k={k:4} theory E(N_emp)/k fixed {fixed:.5} variable {variable:.5}");
    }
    for scheme in [McScheme::Fixed, McScheme::Variable] {
        let cfg = McConfig {
            name: "demo".into(),
            pair,
            ks: vec![32, 64, 128],
            replicates: 4000,
            scheme,
            master_seed: 3,
        };
        let rep = run_validation(&cfg)?;
        for k in [32, 64, 128] {
            let row = rep.row(k, Stat::NempMean).unwrap();
            println!("{:8} k={k:4} simulated {:.5} (se {:.5})", cfg.scheme.name(), row.empirical, row.std_err);
        }
    }
    Ok(())
}

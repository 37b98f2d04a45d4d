//! Full distribution of the number of jointly empty bins, exact and in floating
//! point, with the conditioning diagnostics of the float evaluation.

use oph::theory::{dist::dist_nemp, TheoryInput};

fn main() -> oph::Result<()> {
    let t = TheoryInput::from_union(1 << 10, 16, 24)?;
    let ex = dist_nemp(&t, true)?;
    let fl = dist_nemp(&t, false)?;
    println!("D=1024 k=16 f=24");
    for (j, (a, b)) in ex.probs_f64().iter().zip(fl.probs_f64()).enumerate() {
        if *a > 1e-12 {
            println!("  P(N_emp={j:2}) exact {a:.10e} float {b:.10e}");
        }
    }
    println!("  mean {:.6}", ex.mean());

    let hard = TheoryInput::from_union(1 << 20, 4096, 2048)?;
    let d = dist_nemp(&hard, false)?;
    println!("D=2^20 k=4096 f=2048 ill-conditioned: {}", d.is_ill_conditioned());
    match dist_nemp(&hard, true) {
        Ok(_) => println!("  exact evaluation succeeded"),
        Err(e) => println!("  exact evaluation refused: {e}"),
    }
    Ok(())
}

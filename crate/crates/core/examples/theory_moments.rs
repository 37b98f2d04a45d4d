//! Closed-form moments of the empty and matched bin counts, in floating point
//! and as exact rationals.

use oph::theory::{self, exact, TheoryInput, VarMode};

fn main() -> oph::Result<()> {
    let t = TheoryInput::new(16, 4, 4, 3, 1)?;
    println!("D=16 k=4 f1=4 f2=3 a=1");
    println!("  E(N_emp)     = {} ~ {:.6}", exact::e_nemp(&t), theory::e_nemp(&t));
    println!("  E(N_mat)     = {} ~ {:.6}", exact::e_nmat(&t), theory::e_nmat(&t));
    println!("  Var(N_emp)   = {}", exact::var_nemp(&t));
    println!("  Cov(mat,emp) = {}", exact::cov_nmat_nemp(&t));

    let big = TheoryInput::new(1 << 20, 1024, 800, 700, 500)?;
    let r = big.resemblance();
    let k = big.k as f64;
    println!("D=2^20 k=1024 f=1000 R={r:.3}");
    println!("  E(N_emp)/k        = {:.6e}", theory::e_nemp(&big) / k);
    println!("  Var(R_mat)        = {:.6e}", theory::var_rmat(&big, VarMode::Approximation)?);
    println!("  k-perm R(1-R)/k   = {:.6e}", r * (1.0 - r) / k);
    println!("  g(f=1000, k=1024) = {:.6}", theory::g_ratio(1000, 1024)?);
    Ok(())
}

//! b-bit truncation and one-hot expansion under zero and random coding. The
//! inner product of two expanded vectors tracks the resemblance.

use oph::datamodel::{intersect_stats, PairSpec};
use oph::encoding::{bbit, expand, inner_product, Coding};
use oph::montecarlo::synth_pair;
use oph::sketch::{sketch_all, Scheme};

fn main() -> oph::Result<()> {
    let pair = PairSpec::new(500, 500, 300, 1 << 16)?;
    let (s1, s2) = synth_pair(&pair, 3)?;
    println!("R = {:.4}", intersect_stats(&s1, &s2)?.resemblance());
    let sk = sketch_all(&[s1, s2], Scheme::FixedLength, 512, 5)?;
    for b in [1u8, 2, 4, 8] {
        let u = bbit(&sk[0], b)?;
        let v = bbit(&sk[1], b)?;
        let zero = inner_product(&expand(&u, Coding::Zero, 0), &expand(&v, Coding::Zero, 0))?;
        // each vector draws its own random codes for empty bins
        let rand = inner_product(&expand(&u, Coding::Random, 1), &expand(&v, Coding::Random, 2))?;
        println!("b={b}: dim {:7} zero-coded <u,v>={zero:.4} random-coded {rand:.4}", 512u64 << b);
    }
    Ok(())
}

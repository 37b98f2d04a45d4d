//! Banded LSH over b-bit sketch signatures: index 2000 random sets plus planted
//! near-duplicates and look the duplicates up.

use oph::datamodel::BinarySet;
use oph::lsh::build_index;
use oph::rng::SeededRng;

fn main() -> oph::Result<()> {
    let d = 1u64 << 18;
    let mut rng = SeededRng::new(2024);
    let mut data = Vec::new();
    for _ in 0..2000 {
        data.push(BinarySet::from_unsorted(rng.sample_distinct(d, 300), d)?);
    }
    let index = build_index(&data, 8, 2, 8, 77)?;
    println!("{} sets, {} tables of {} bits", index.len(), index.num_tables(), 2 * 8);

    let (mut found, mut candidates) = (0, 0);
    for target in 0..100usize {
        // drop 10 elements and add 10 fresh ones
        let mut idx = data[target].indices()[10..].to_vec();
        idx.extend(rng.sample_distinct(d, 10));
        idx.sort_unstable();
        idx.dedup();
        let q = BinarySet::new(idx, d)?;
        let hits = index.query(&q)?;
        candidates += hits.len();
        if hits.binary_search(&(target as u32)).is_ok() {
            found += 1;
        }
    }
    println!("recall {found}/100, mean candidates per query {:.1}", candidates as f64 / 100.0);
    Ok(())
}

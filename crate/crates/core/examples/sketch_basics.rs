//! Fixed-length sketches of three small sets, using the identity permutation so
//! the sets can be read directly as permuted positions.

use oph::datamodel::BinarySet;
use oph::permutation::PermutationSpec;
use oph::sketch::{sketch_fixed, Slot};

fn show(slots: &[Slot]) -> String {
    let cells: Vec<String> = slots
        .iter()
        .map(|s| s.value().map_or("*".to_string(), |v| v.to_string()))
        .collect();
    format!("[{}]", cells.join(", "))
}

fn main() -> oph::Result<()> {
    let identity = PermutationSpec::from_vec(0, (0..16).collect())?;
    let sets = [
        vec![2, 4, 7, 13],
        vec![0, 6, 13],
        vec![0, 1, 10, 12],
    ];
    for (i, idx) in sets.iter().enumerate() {
        let s = BinarySet::new(idx.clone(), 16)?;
        let sk = sketch_fixed(&s, &identity, 4)?;
        println!("S{} = {:?} -> {} ({} empty)", i + 1, idx, show(sk.slots()), sk.num_empty());
    }
    Ok(())
}

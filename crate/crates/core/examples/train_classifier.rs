//! Logistic regression on raw binary features and on 8-bit sketch expansions
//! of the same data.

use oph::datamodel::BinarySet;
use oph::encoding::{bbit, expand, Coding, ExpandedVector};
use oph::learner::{accuracy, train_logreg};
use oph::rng::SeededRng;
use oph::sketch::{sketch_all, Scheme};

fn main() -> oph::Result<()> {
    let d = 1u64 << 14;
    let mut rng = SeededRng::new(5);
    let pool = rng.sample_distinct(d, 1400);
    let protos = [&pool[..1200], &pool[200..1400]];
    let mut sets = Vec::new();
    let mut labels = Vec::new();
    for i in 0..600 {
        let class = i % 2;
        let mut idx: Vec<u64> = protos[class].iter().copied().filter(|_| rng.unit_f64() < 0.5).collect();
        idx.extend(rng.sample_distinct(d, 800));
        sets.push(BinarySet::from_unsorted(idx, d)?);
        labels.push(if class == 0 { 1.0 } else { -1.0 });
    }
    let (train, test) = (0..400, 400..600);

    let raw: Vec<ExpandedVector> = sets.iter().map(ExpandedVector::from_binary_set).collect();
    let sk = sketch_all(&sets, Scheme::FixedLength, 256, 8)?;
    let hashed = sk
        .iter()
        .map(|s| bbit(s, 8).map(|b| expand(&b, Coding::Zero, 0)))
        .collect::<oph::Result<Vec<_>>>()?;

    for (name, x) in [("raw", &raw), ("k=256 b=8", &hashed)] {
        let m = train_logreg(&x[train.clone()], &labels[train.clone()], 1.0, 20, 1)?;
        println!(
            "{name:10} dim {:6} train acc {:.3} test acc {:.3}",
            m.dim(),
            accuracy(&m, &x[train.clone()], &labels[train.clone()])?,
            accuracy(&m, &x[test.clone()], &labels[test.clone()])?
        );
    }
    Ok(())
}

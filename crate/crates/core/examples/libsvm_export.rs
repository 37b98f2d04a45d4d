//! Parses a small libsvm file, sketches it and writes the expanded features
//! back out in libsvm format.

use oph::datamodel::parse_libsvm;
use oph::encoding::{bbit, expand, export_libsvm, Coding};
use oph::sketch::{sketch_all, Scheme};

const INPUT: &str = "+1 3:1 17:1 40:1 41:1 90:1\n-1 2:1 17:1 55:1 70:1\n+1 3:1 40:1 41:1 91:1\n";

fn main() -> oph::Result<()> {
    let data = parse_libsvm(INPUT.as_bytes(), true, Some(128))?;
    let sketches = sketch_all(&data.sets, Scheme::FixedLength, 8, 42)?;
    let vectors = sketches
        .iter()
        .map(|s| bbit(s, 2).map(|b| expand(&b, Coding::Zero, 0)))
        .collect::<oph::Result<Vec<_>>>()?;
    print!("{}", export_libsvm(&vectors, &data.labels, None)?);
    print!("{}", export_libsvm(&vectors, &data.labels, Some(8))?);
    Ok(())
}

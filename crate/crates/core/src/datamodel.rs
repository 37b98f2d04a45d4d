//! Binary data vectors, exact pair statistics and text ingestion.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{invalid, Error, Result};

/// A binary data vector: the sorted locations of its nonzeros in `[0, dim)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinarySet {
    indices: Vec<u64>,
    dim: u64,
}

impl BinarySet {
    /// Builds a set from strictly increasing indices, all below `dim`.
    pub fn new(indices: Vec<u64>, dim: u64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(invalid(format!(
                    "indices must be strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        if let Some(&last) = indices.last() {
            if last >= dim {
                return Err(Error::OutOfRange { index: last, dim });
            }
        }
        Ok(Self { indices, dim })
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(mut indices: Vec<u64>, dim: u64) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        Self::new(indices, dim)
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: u64) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Same set viewed in a larger space (used when padding `D` to a multiple of `k`).
    pub fn with_dim(&self, dim: u64) -> Result<Self> {
        if dim < self.dim {
            return Err(invalid(format!(
                "cannot shrink dimension from {} to {dim}",
                self.dim
            )));
        }
        Ok(Self {
            indices: self.indices.clone(),
            dim,
        })
    }
}

/// Smallest multiple of `k` that is `>= dim`.
pub fn padded_dim(dim: u64, k: u64) -> u64 {
    dim.div_ceil(k) * k
}

/// Sizes describing a pair of sets: `f1 = |S1|`, `f2 = |S2|`, `a = |S1 ∩ S2|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairSpec {
    pub f1: u64,
    pub f2: u64,
    pub a: u64,
    pub d: u64,
}

impl PairSpec {
    pub fn new(f1: u64, f2: u64, a: u64, d: u64) -> Result<Self> {
        if a > f1.min(f2) {
            return Err(invalid(format!("intersection {a} exceeds min(f1, f2)")));
        }
        if f1 + f2 - a > d {
            return Err(invalid(format!(
                "union size {} exceeds D = {d}",
                f1 + f2 - a
            )));
        }
        Ok(Self { f1, f2, a, d })
    }

    /// Union size `f = f1 + f2 - a`.
    pub fn union(&self) -> u64 {
        self.f1 + self.f2 - self.a
    }

    /// Resemblance `a / f`; zero when both sets are empty.
    pub fn resemblance(&self) -> f64 {
        let f = self.union();
        if f == 0 {
            0.0
        } else {
            self.a as f64 / f as f64
        }
    }
}

/// Exact sizes and intersection of two sets (the ground-truth resemblance).
pub fn intersect_stats(s1: &BinarySet, s2: &BinarySet) -> Result<PairSpec> {
    if s1.dim != s2.dim {
        return Err(Error::DimensionMismatch {
            left: s1.dim,
            right: s2.dim,
        });
    }
    let (x, y) = (&s1.indices, &s2.indices);
    let (mut i, mut j, mut a) = (0, 0, 0u64);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                a += 1;
                i += 1;
                j += 1;
            }
        }
    }
    Ok(PairSpec {
        f1: x.len() as u64,
        f2: y.len() as u64,
        a,
        d: s1.dim,
    })
}

/// A labeled binary dataset read from libsvm/svmlight text.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSets {
    pub sets: Vec<BinarySet>,
    pub labels: Vec<f64>,
    pub dim: u64,
}

/// Parses `label idx:val ...` lines with 1-based ascending indices.
///
/// Blank lines and `#` comments are skipped and `qid:` tokens ignored. A
/// feature is a member when its value is nonzero; without
/// `treat_nonzero_as_one` any value other than 0 or 1 is rejected. `D` is the
/// maximum index seen unless `dim_override` is given.
pub fn parse_libsvm<R: BufRead>(
    reader: R,
    treat_nonzero_as_one: bool,
    dim_override: Option<u64>,
) -> Result<LabeledSets> {
    let mut rows: Vec<Vec<u64>> = Vec::new();
    let mut labels = Vec::new();
    let mut max_index = 0u64;
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: lineno,
            message,
        };
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a token");
        let label: f64 = label_tok
            .parse()
            .map_err(|_| err(format!("bad label {label_tok:?}")))?;
        let mut row = Vec::new();
        let mut prev = 0u64;
        for tok in tokens {
            if tok.starts_with("qid:") {
                continue;
            }
            let (idx, val) = tok
                .split_once(':')
                .ok_or_else(|| err(format!("expected idx:val, got {tok:?}")))?;
            let idx: u64 = idx
                .parse()
                .map_err(|_| err(format!("bad index {idx:?}")))?;
            if idx == 0 {
                return Err(err("indices are 1-based; found 0".into()));
            }
            if idx <= prev {
                return Err(err(format!("indices not ascending ({prev} then {idx})")));
            }
            prev = idx;
            let val: f64 = val
                .parse()
                .map_err(|_| err(format!("bad value {val:?}")))?;
            if val == 0.0 {
                continue;
            }
            if !treat_nonzero_as_one && val != 1.0 {
                return Err(err(format!(
                    "non-binary value {val} (enable nonzero-as-one to binarize)"
                )));
            }
            row.push(idx - 1);
            max_index = max_index.max(idx);
        }
        rows.push(row);
        labels.push(label);
    }
    let dim = match dim_override {
        Some(d) if d < max_index => {
            return Err(invalid(format!(
                "dimension override {d} is smaller than max index {max_index}"
            )))
        }
        Some(d) => d,
        None => max_index.max(1),
    };
    let sets = rows
        .into_iter()
        .map(|r| BinarySet::new(r, dim))
        .collect::<Result<Vec<_>>>()?;
    Ok(LabeledSets { sets, labels, dim })
}

/// Formats a label the way libsvm files usually carry them (`+1`, `-1`, `0`).
pub(crate) fn format_label(label: f64) -> String {
    if label.fract() == 0.0 && label.abs() < 1e15 {
        if label > 0.0 {
            format!("+{}", label as i64)
        } else {
            format!("{}", label as i64)
        }
    } else {
        format!("{label}")
    }
}

/// Writes binary sets as libsvm text (1-based indices, value 1).
pub fn write_libsvm(sets: &[BinarySet], labels: &[f64]) -> String {
    let mut out = String::new();
    for (i, s) in sets.iter().enumerate() {
        out.push_str(&format_label(labels.get(i).copied().unwrap_or(0.0)));
        for &idx in s.indices() {
            let _ = write!(out, " {}:1", idx + 1);
        }
        out.push('\n');
    }
    out
}

/// Parses the plain set format: `id: i1 i2 i3 ...`, 0-based indices, one set
/// per line. Indices may appear in any order; duplicates are merged.
pub fn parse_set_file<R: BufRead>(reader: R, dim: Option<u64>) -> Result<Vec<(String, BinarySet)>> {
    let mut rows = Vec::new();
    let mut max_index = 0u64;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (id, rest) = content.split_once(':').ok_or_else(|| Error::Parse {
            line: lineno + 1,
            message: "expected `id: i1 i2 ...`".into(),
        })?;
        let mut idx = Vec::new();
        for tok in rest.split_whitespace() {
            let v: u64 = tok.parse().map_err(|_| Error::Parse {
                line: lineno + 1,
                message: format!("bad index {tok:?}"),
            })?;
            max_index = max_index.max(v + 1);
            idx.push(v);
        }
        rows.push((id.trim().to_string(), idx));
    }
    let dim = match dim {
        Some(d) if d < max_index => {
            return Err(invalid(format!(
                "dimension {d} is smaller than max index + 1 = {max_index}"
            )))
        }
        Some(d) => d,
        None => max_index.max(1),
    };
    rows.into_iter()
        .map(|(id, idx)| Ok((id, BinarySet::from_unsorted(idx, dim)?)))
        .collect()
}

pub fn write_set_file(sets: &[(String, BinarySet)]) -> String {
    let mut out = String::new();
    for (id, s) in sets {
        out.push_str(id);
        out.push(':');
        for &i in s.indices() {
            let _ = write!(out, " {i}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(idx: &[u64], d: u64) -> BinarySet {
        BinarySet::new(idx.to_vec(), d).unwrap()
    }

    #[test]
    fn libsvm_basic() {
        let data = parse_libsvm("+1 1:1 3:1\n-1 2:1\n".as_bytes(), false, None).unwrap();
        assert_eq!(data.sets[0].indices(), &[0, 2]);
        assert_eq!(data.sets[1].indices(), &[1]);
        assert_eq!(data.labels, vec![1.0, -1.0]);
        assert_eq!(data.dim, 3);
    }

    #[test]
    fn libsvm_binarizes() {
        let data = parse_libsvm("+1 5:0.7".as_bytes(), true, None).unwrap();
        assert_eq!(data.sets[0].indices(), &[4]);
        assert!(parse_libsvm("+1 5:0.7".as_bytes(), false, None).is_err());
    }

    #[test]
    fn libsvm_skips_blank_lines() {
        let data = parse_libsvm("\n+1 1:1\n\n   \n".as_bytes(), false, None).unwrap();
        assert_eq!(data.sets.len(), 1);
    }

    #[test]
    fn libsvm_errors_carry_line_numbers() {
        match parse_libsvm("+1 1:1\n-1 3:1 2:1\n".as_bytes(), false, None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse_libsvm("+1 1:1\nfoo\n".as_bytes(), false, None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_libsvm("+1 1-1".as_bytes(), false, None).is_err());
        assert!(parse_libsvm("+1 0:1".as_bytes(), false, None).is_err());
    }

    #[test]
    fn libsvm_dim_override() {
        let data = parse_libsvm("+1 3:1".as_bytes(), false, Some(16)).unwrap();
        assert_eq!(data.sets[0].dim(), 16);
        assert!(parse_libsvm("+1 30:1".as_bytes(), false, Some(16)).is_err());
    }

    #[test]
    fn small_pair_stats() {
        let s1 = set(&[2, 4, 7, 13], 16);
        let s2 = set(&[0, 6, 13], 16);
        let p = intersect_stats(&s1, &s2).unwrap();
        assert_eq!((p.f1, p.f2, p.a), (4, 3, 1));
        assert!((p.resemblance() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn identical_and_disjoint() {
        let s = set(&[1, 5, 9], 10);
        let p = intersect_stats(&s, &s).unwrap();
        assert_eq!((p.a, p.f1, p.f2), (3, 3, 3));
        assert_eq!(p.resemblance(), 1.0);
        let t = set(&[0, 2], 10);
        assert_eq!(intersect_stats(&s, &t).unwrap().resemblance(), 0.0);
        assert!(intersect_stats(&s, &set(&[1], 11)).is_err());
    }

    #[test]
    fn set_validation() {
        assert!(BinarySet::new(vec![3, 3], 10).is_err());
        assert!(BinarySet::new(vec![4, 3], 10).is_err());
        assert!(BinarySet::new(vec![10], 10).is_err());
        assert_eq!(
            BinarySet::from_unsorted(vec![5, 1, 5], 10).unwrap().indices(),
            &[1, 5]
        );
        assert!(PairSpec::new(3, 3, 4, 10).is_err());
        assert!(PairSpec::new(6, 6, 1, 10).is_err());
    }

    #[test]
    fn set_file_roundtrip() {
        let text = "a: 3 1 2\nb: 7\n";
        let sets = parse_set_file(text.as_bytes(), Some(8)).unwrap();
        assert_eq!(sets[0].1.indices(), &[1, 2, 3]);
        let again = parse_set_file(write_set_file(&sets).as_bytes(), Some(8)).unwrap();
        assert_eq!(sets, again);
    }

    #[test]
    fn labels_format() {
        assert_eq!(format_label(1.0), "+1");
        assert_eq!(format_label(-1.0), "-1");
        assert_eq!(format_label(0.0), "0");
        assert_eq!(format_label(0.5), "0.5");
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_set(d: u64) -> impl Strategy<Value = BinarySet> {
            proptest::collection::btree_set(0..d, 1..40)
                .prop_map(move |s| BinarySet::new(s.into_iter().collect(), d).unwrap())
        }

        proptest! {
            #[test]
            fn libsvm_roundtrip_is_idempotent(sets in proptest::collection::vec(arb_set(200), 1..10)) {
                let labels: Vec<f64> = (0..sets.len()).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
                let text = write_libsvm(&sets, &labels);
                let parsed = parse_libsvm(text.as_bytes(), false, Some(200)).unwrap();
                prop_assert_eq!(&parsed.sets, &sets);
                let text2 = write_libsvm(&parsed.sets, &parsed.labels);
                prop_assert_eq!(text, text2);
            }

            #[test]
            fn intersect_is_symmetric(a in arb_set(64), b in arb_set(64)) {
                let p = intersect_stats(&a, &b).unwrap();
                let q = intersect_stats(&b, &a).unwrap();
                prop_assert_eq!((p.f1, p.f2, p.a), (q.f2, q.f1, q.a));
                prop_assert_eq!(p.union(), q.union());
                prop_assert_eq!(p.resemblance(), q.resemblance());
            }
        }
    }
}

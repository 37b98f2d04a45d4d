//! b-bit truncation and expansion of sketches into sparse feature vectors.
//!
//! Bin `j` holding the b-bit value `v` becomes a single one at position
//! `j·2^b + (2^b - 1 - v)` of a `2^b·k` vector. Under zero coding an empty bin
//! leaves its whole block at zero and the vector is scaled by
//! `1/√(k - n_emp)`, so the inner product of two expansions is
//! `N_mat / (√(k - N_emp1)·√(k - N_emp2))` whenever `b` is wide enough to avoid
//! truncation collisions.

use std::fmt::Write as _;
use std::io::{Read, Write};

use crate::datamodel::{format_label, BinarySet};
use crate::error::{invalid, Error, Result};
use crate::rng::mix64;
use crate::sketch::{self, OphSketch, RecordHeader, Scheme, Slot};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BBitSketch {
    b: u8,
    scheme: Scheme,
    d_eff: u64,
    seeds: Vec<u64>,
    slots: Vec<Slot>,
}

fn check_b(b: u8) -> Result<()> {
    if !(1..=32).contains(&b) {
        return Err(invalid(format!("b must be in [1, 32], got {b}")));
    }
    Ok(())
}

impl BBitSketch {
    /// A b-bit sketch without provenance metadata.
    pub fn new(b: u8, slots: Vec<Slot>) -> Result<Self> {
        check_b(b)?;
        if let Some(v) = slots.iter().filter_map(|s| s.value()).find(|&v| v >> b != 0) {
            return Err(invalid(format!("value {v} does not fit in {b} bits")));
        }
        Ok(Self {
            b,
            scheme: Scheme::FixedLength,
            d_eff: 0,
            seeds: Vec::new(),
            slots,
        })
    }

    pub fn b(&self) -> u8 {
        self.b
    }

    pub fn k(&self) -> usize {
        self.slots.len()
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn d_eff(&self) -> u64 {
        self.d_eff
    }

    pub fn seeds(&self) -> &[u64] {
        &self.seeds
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn num_empty(&self) -> usize {
        self.slots.iter().filter(|s| s.is_empty()).count()
    }
}

/// Keeps the lowest `b` bits of every non-empty slot.
pub fn bbit(sk: &OphSketch, b: u8) -> Result<BBitSketch> {
    check_b(b)?;
    let mask = (1u64 << b) - 1;
    Ok(BBitSketch {
        b,
        scheme: sk.scheme(),
        d_eff: sk.d_eff(),
        seeds: sk.seeds().to_vec(),
        slots: sk
            .slots()
            .iter()
            .map(|s| match s {
                Slot::Value(v) => Slot::Value(v & mask),
                Slot::Empty => Slot::Empty,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coding {
    /// Empty bins expand to all-zero blocks; weight `1/√(k - n_emp)`.
    Zero,
    /// Empty bins get a uniform value in `[0, 2^b)`; weight `1/√k`.
    Random,
}

/// Sparse vector with one shared weight on every nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpandedVector {
    dim: u64,
    positions: Vec<u64>,
    weight: f64,
}

impl ExpandedVector {
    pub fn new(dim: u64, positions: Vec<u64>, weight: f64) -> Result<Self> {
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("positions must be strictly increasing"));
        }
        if let Some(&p) = positions.last() {
            if p >= dim {
                return Err(Error::OutOfRange { index: p, dim });
            }
        }
        Ok(Self {
            dim,
            positions,
            weight,
        })
    }

    /// The raw binary features scaled to unit norm.
    pub fn from_binary_set(s: &BinarySet) -> Self {
        let weight = if s.is_empty() {
            0.0
        } else {
            1.0 / (s.len() as f64).sqrt()
        };
        Self {
            dim: s.dim(),
            positions: s.indices().to_vec(),
            weight,
        }
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    pub fn positions(&self) -> &[u64] {
        &self.positions
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn nnz(&self) -> usize {
        self.positions.len()
    }

    /// Recovers the b-bit slots from a zero-coded expansion.
    pub fn decode(&self, b: u8) -> Result<Vec<Slot>> {
        check_b(b)?;
        let width = 1u64 << b;
        if !self.dim.is_multiple_of(width) {
            return Err(invalid(format!("dimension {} is not a multiple of 2^{b}", self.dim)));
        }
        let mut slots = vec![Slot::Empty; (self.dim / width) as usize];
        for &p in &self.positions {
            let j = (p / width) as usize;
            if !slots[j].is_empty() {
                return Err(invalid(format!("block {j} has more than one nonzero")));
            }
            slots[j] = Slot::Value(width - 1 - p % width);
        }
        Ok(slots)
    }
}

/// Expands a b-bit sketch. `rng_seed` keys the random-coding draws per bin, so
/// callers pass a seed already specific to the vector.
pub fn expand(bsk: &BBitSketch, coding: Coding, rng_seed: u64) -> ExpandedVector {
    let width = 1u64 << bsk.b;
    let mask = width - 1;
    let mut positions = Vec::with_capacity(bsk.k());
    for (j, s) in bsk.slots.iter().enumerate() {
        let v = match (s, coding) {
            (Slot::Value(v), _) => *v,
            (Slot::Empty, Coding::Zero) => continue,
            (Slot::Empty, Coding::Random) => mix64(rng_seed, j as u64) & mask,
        };
        positions.push(j as u64 * width + (mask - v));
    }
    let weight = match positions.len() {
        0 => 0.0,
        n => 1.0 / (n as f64).sqrt(),
    };
    ExpandedVector {
        dim: width * bsk.k() as u64,
        positions,
        weight,
    }
}

/// `w_u · w_v · |positions(u) ∩ positions(v)|`.
pub fn inner_product(u: &ExpandedVector, v: &ExpandedVector) -> Result<f64> {
    if u.dim != v.dim {
        return Err(Error::DimensionMismatch {
            left: u.dim,
            right: v.dim,
        });
    }
    let (a, b) = (&u.positions, &v.positions);
    let (mut i, mut j, mut shared) = (0, 0, 0u64);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    Ok(u.weight * v.weight * shared as f64)
}

/// Formats `x` with `digits` significant digits, trailing zeros removed.
fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// libsvm text with 1-based indices and the vector weight as every value.
/// Values use the shortest round-trip decimal unless `digits` asks for a fixed
/// number of significant digits. An empty label list writes label 0.
pub fn export_libsvm(vectors: &[ExpandedVector], labels: &[f64], digits: Option<usize>) -> Result<String> {
    if !labels.is_empty() && labels.len() != vectors.len() {
        return Err(invalid(format!(
            "{} labels for {} vectors",
            labels.len(),
            vectors.len()
        )));
    }
    if let Some(first) = vectors.first() {
        if let Some(v) = vectors.iter().find(|v| v.dim != first.dim) {
            return Err(Error::DimensionMismatch {
                left: first.dim,
                right: v.dim,
            });
        }
    }
    if digits == Some(0) {
        return Err(invalid("digits must be positive"));
    }
    let mut out = String::new();
    for (i, v) in vectors.iter().enumerate() {
        out.push_str(&format_label(labels.get(i).copied().unwrap_or(0.0)));
        let value = match digits {
            Some(d) => format_significant(v.weight, d),
            None => format!("{}", v.weight),
        };
        for &p in &v.positions {
            let _ = write!(out, " {}:{}", p + 1, value);
        }
        out.push('\n');
    }
    Ok(out)
}

/// Writes b-bit sketches in the sketch file format with the `b` field set.
pub fn write_bbit_sketches<W: Write>(w: &mut W, sketches: &[BBitSketch]) -> Result<()> {
    sketch::write_file_header(w, sketches.len())?;
    for s in sketches {
        let h = RecordHeader {
            scheme: s.scheme,
            k: s.k(),
            d_eff: s.d_eff,
            b: s.b,
            seeds: s.seeds.clone(),
        };
        sketch::write_record(w, &h, &s.slots)?;
    }
    Ok(())
}

pub fn read_bbit_sketches<R: Read>(r: &mut R) -> Result<Vec<BBitSketch>> {
    let n = sketch::read_file_header(r)?;
    let mut out = Vec::with_capacity(n.min(1 << 20));
    for _ in 0..n {
        let (h, slots) = sketch::read_record(r)?;
        if h.b == 0 {
            return Err(Error::Format("record holds full sketch values, not b-bit".into()));
        }
        let mut s = BBitSketch::new(h.b, slots).map_err(|e| Error::Format(e.to_string()))?;
        s.scheme = h.scheme;
        s.d_eff = h.d_eff;
        s.seeds = h.seeds;
        out.push(s);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datamodel::parse_libsvm;
    use crate::estimate::{estimate_r_zero, pair_stats};
    use crate::permutation::generate_permutation;
    use crate::rng::SeededRng;
    use crate::sketch::sketch_fixed;
    use proptest::prelude::*;

    use Slot::{Empty, Value};

    #[test]
    fn truncation_example() {
        let sk = OphSketch::from_parts(
            Scheme::FixedLength,
            3 << 15,
            vec![1],
            vec![Value(12013), Value(25964), Value(20191)],
        )
        .unwrap();
        let b = bbit(&sk, 2).unwrap();
        assert_eq!(b.slots(), &[Value(1), Value(0), Value(3)]);
        let wide = bbit(&sk, 15).unwrap();
        assert_eq!(wide.slots(), sk.slots());
        assert!(bbit(&sk, 0).is_err());
        assert!(bbit(&sk, 33).is_err());
    }

    #[test]
    fn worked_expansions() {
        let s = BBitSketch::new(2, vec![Value(1), Value(0), Value(3), Empty]).unwrap();
        let e = expand(&s, Coding::Zero, 0);
        assert_eq!(e.positions(), &[2, 7, 8]);
        assert_eq!(e.dim(), 16);
        assert_eq!(e.weight(), 1.0 / 3f64.sqrt());
        let s = BBitSketch::new(2, vec![Value(1), Value(0), Value(3)]).unwrap();
        let e = expand(&s, Coding::Zero, 0);
        assert_eq!(e.positions(), &[2, 7, 8]);
        assert_eq!(e.dim(), 12);
        assert_eq!(e.weight(), 1.0 / 3f64.sqrt());
    }

    #[test]
    fn random_coding_fills_every_bin() {
        let s = BBitSketch::new(2, vec![Value(1), Empty, Empty, Value(3)]).unwrap();
        let e = expand(&s, Coding::Random, 42);
        assert_eq!(e.nnz(), 4);
        assert_eq!(e.weight(), 0.5);
        assert_eq!(e, expand(&s, Coding::Random, 42));
        let d = e.decode(2).unwrap();
        assert_eq!((d[0], d[3]), (Value(1), Value(3)));
    }

    #[test]
    fn export_format() {
        let s = BBitSketch::new(2, vec![Value(1), Value(0), Value(3), Empty]).unwrap();
        let e = expand(&s, Coding::Zero, 0);
        let txt = export_libsvm(std::slice::from_ref(&e), &[1.0], Some(8)).unwrap();
        assert_eq!(txt, "+1 3:0.57735027 8:0.57735027 9:0.57735027\n");
        let txt = export_libsvm(std::slice::from_ref(&e), &[], None).unwrap();
        assert!(txt.starts_with("0 3:0.5773502691896"));
        let back = parse_libsvm(txt.as_bytes(), true, Some(16)).unwrap();
        assert_eq!(back.sets[0].indices(), e.positions());
        assert!(export_libsvm(&[e], &[1.0, 2.0], None).is_err());
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(1.0, 8), "1");
        assert_eq!(format_significant(0.126, 2), "0.13");
        assert_eq!(format_significant(0.001234567, 3), "0.00123");
    }

    #[test]
    fn dim_mismatch() {
        let a = ExpandedVector::new(8, vec![1], 1.0).unwrap();
        let b = ExpandedVector::new(16, vec![1], 1.0).unwrap();
        assert!(inner_product(&a, &b).is_err());
        assert!(ExpandedVector::new(8, vec![3, 3], 1.0).is_err());
        assert!(ExpandedVector::new(8, vec![8], 1.0).is_err());
    }

    #[test]
    fn file_round_trip() {
        let a = BBitSketch::new(4, vec![Value(1), Empty, Value(15)]).unwrap();
        let b = BBitSketch::new(4, vec![Empty, Empty, Value(0)]).unwrap();
        let mut buf = Vec::new();
        write_bbit_sketches(&mut buf, &[a.clone(), b.clone()]).unwrap();
        assert_eq!(read_bbit_sketches(&mut buf.as_slice()).unwrap(), vec![a, b]);
        let mut full = Vec::new();
        crate::sketch::write_sketches(&mut full, &[]).unwrap();
        assert!(read_bbit_sketches(&mut full.as_slice()).unwrap().is_empty());
    }

    fn random_set(rng: &mut SeededRng, d: u64) -> BinarySet {
        let f = 1 + rng.below(40) as usize;
        BinarySet::from_unsorted(rng.sample_distinct(d, f), d).unwrap()
    }

    #[test]
    fn zero_coding_matches_estimator() {
        let mut rng = SeededRng::new(5);
        for t in 0..50 {
            let p = generate_permutation(t, 1024).unwrap();
            let s1 = random_set(&mut rng, 1024);
            let s2 = random_set(&mut rng, 1024);
            let (a, b) = (sketch_fixed(&s1, &p, 32).unwrap(), sketch_fixed(&s2, &p, 32).unwrap());
            let st = pair_stats(&a, &b).unwrap();
            let ea = expand(&bbit(&a, 20).unwrap(), Coding::Zero, 0);
            let eb = expand(&bbit(&b, 20).unwrap(), Coding::Zero, 0);
            let ip = inner_product(&ea, &eb).unwrap();
            assert!((ip - estimate_r_zero(&st)).abs() <= 1e-12);
            assert!((inner_product(&ea, &ea).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn positions_decode_back(b in 1u8..=8, vals in proptest::collection::vec(proptest::option::of(0u64..256), 1..40)) {
            let mask = (1u64 << b) - 1;
            let slots: Vec<Slot> = vals.iter().map(|v| v.map_or(Empty, |x| Value(x & mask))).collect();
            let s = BBitSketch::new(b, slots.clone()).unwrap();
            let e = expand(&s, Coding::Zero, 0);
            prop_assert_eq!(e.nnz(), s.k() - s.num_empty());
            prop_assert_eq!(e.decode(b).unwrap(), slots);
            let r = expand(&s, Coding::Random, 9);
            prop_assert_eq!(r.nnz(), s.k());
            let ip = inner_product(&e, &r).unwrap();
            prop_assert!(ip.abs() <= 1.0 + 1e-12);
        }
    }
}

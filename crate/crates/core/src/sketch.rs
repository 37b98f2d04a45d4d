//! One permutation hashing sketches and the classical k-permutation baseline.
//!
//! A fixed-length sketch permutes `Ω` once, splits the permuted space into `k`
//! equal bins and keeps, per bin, the smallest permuted element re-indexed
//! relative to the bin start. The variable-length scheme groups elements into
//! bins with a keyed hash and keeps raw permuted minima. The m-permutation
//! scheme concatenates `m` fixed-length sketches of `k/m` bins each.
//!
//! # Binary format
//!
//! ```text
//! file   := "OPHS" version:u8(=1) count:u64 record{count}
//! record := scheme:u8 (0 fixed, 1 variable, 2 m-perm) m:u32 k:u32 d_eff:u64
//!           b:u8 (0 = full values) nseeds:u32 seed:u64{nseeds}
//!           presence:u8{ceil(k/8)}  (bit j%8 of byte j/8 set = slot j non-empty)
//!           value{popcount}         (u64 when b = 0, u32 otherwise)
//! ```
//! All integers are little-endian.

use std::io::{Read, Write};

use crate::codec;
use crate::datamodel::BinarySet;
use crate::error::{invalid, Error, Result};
use crate::permutation::{generate_permutation, PermutationSpec};
use crate::rng::{derive_seed, mix64};

/// One bin of a sketch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Empty,
    Value(u64),
}

impl Slot {
    pub fn value(self) -> Option<u64> {
        match self {
            Slot::Empty => None,
            Slot::Value(v) => Some(v),
        }
    }

    pub fn is_empty(self) -> bool {
        matches!(self, Slot::Empty)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    FixedLength,
    VariableLength,
    /// `m` concatenated fixed-length sketches.
    MPerm(usize),
}

impl Scheme {
    pub fn name(&self) -> String {
        match self {
            Scheme::FixedLength => "fixed".into(),
            Scheme::VariableLength => "variable".into(),
            Scheme::MPerm(m) => format!("mperm{m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OphSketch {
    k: usize,
    d_eff: u64,
    scheme: Scheme,
    seeds: Vec<u64>,
    slots: Vec<Slot>,
}

impl OphSketch {
    /// Assembles a sketch from its parts, checking slot values against the bin
    /// capacity of the scheme.
    pub fn from_parts(scheme: Scheme, d_eff: u64, seeds: Vec<u64>, slots: Vec<Slot>) -> Result<Self> {
        let k = slots.len();
        if k == 0 {
            return Err(invalid("a sketch needs at least one slot"));
        }
        let cap = capacity(scheme, k, d_eff)?;
        for s in &slots {
            if let Slot::Value(v) = s {
                if *v >= cap {
                    return Err(invalid(format!("slot value {v} exceeds bin capacity {cap}")));
                }
            }
        }
        if slots.iter().all(|s| s.is_empty()) {
            return Err(invalid("a sketch of a nonempty set has a non-empty slot"));
        }
        Ok(Self {
            k,
            d_eff,
            scheme,
            seeds,
            slots,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d_eff(&self) -> u64 {
        self.d_eff
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
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

    /// Size of the value domain of one slot.
    pub fn bin_capacity(&self) -> u64 {
        capacity(self.scheme, self.k, self.d_eff).expect("validated at construction")
    }

    /// Whether two sketches were built with identical parameters and seeds.
    pub fn check_compatible(&self, other: &OphSketch) -> Result<()> {
        if self.scheme != other.scheme {
            return Err(Error::Incompatible(format!(
                "schemes differ ({} vs {})",
                self.scheme.name(),
                other.scheme.name()
            )));
        }
        if self.k != other.k || self.d_eff != other.d_eff {
            return Err(Error::Incompatible(format!(
                "(k, D_eff) differ: ({}, {}) vs ({}, {})",
                self.k, self.d_eff, other.k, other.d_eff
            )));
        }
        if self.seeds != other.seeds {
            return Err(Error::Incompatible("seeds differ".into()));
        }
        Ok(())
    }

    pub(crate) fn with_slots(&self, slots: Vec<Slot>) -> Self {
        debug_assert_eq!(slots.len(), self.k);
        Self {
            slots,
            ..self.clone()
        }
    }
}

fn capacity(scheme: Scheme, k: usize, d_eff: u64) -> Result<u64> {
    let k = k as u64;
    match scheme {
        Scheme::FixedLength => {
            if !d_eff.is_multiple_of(k) {
                return Err(invalid(format!("k = {k} does not divide D_eff = {d_eff}")));
            }
            Ok(d_eff / k)
        }
        Scheme::VariableLength => Ok(d_eff),
        Scheme::MPerm(m) => {
            let m = m as u64;
            if m == 0 || !k.is_multiple_of(m) {
                return Err(invalid(format!("m = {m} does not divide k = {k}")));
            }
            let kp = k / m;
            if !d_eff.is_multiple_of(kp) {
                return Err(invalid(format!("k/m = {kp} does not divide D_eff = {d_eff}")));
            }
            Ok(d_eff / kp)
        }
    }
}

/// Bin minima of already-permuted values: bin `v / cap`, stored as `v % cap`.
pub(crate) fn fixed_slots<I: IntoIterator<Item = u64>>(permuted: I, k: usize, cap: u64) -> Vec<Slot> {
    let mut mins = vec![u64::MAX; k];
    for v in permuted {
        let bin = (v / cap) as usize;
        if v < mins[bin] {
            mins[bin] = v;
        }
    }
    mins.into_iter()
        .enumerate()
        .map(|(j, m)| {
            if m == u64::MAX {
                Slot::Empty
            } else {
                Slot::Value(m - j as u64 * cap)
            }
        })
        .collect()
}

fn check_input(s: &BinarySet, perm: &PermutationSpec) -> Result<()> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    if s.dim() > perm.dim() {
        return Err(Error::DimensionMismatch {
            left: s.dim(),
            right: perm.dim(),
        });
    }
    Ok(())
}

/// Fixed-length one permutation sketch with `k` bins. `k` must divide the
/// permutation's dimension, which becomes `D_eff`; the set may live in a
/// smaller space (padding indices are simply never occupied).
pub fn sketch_fixed(s: &BinarySet, perm: &PermutationSpec, k: usize) -> Result<OphSketch> {
    check_input(s, perm)?;
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let d_eff = perm.dim();
    if !d_eff.is_multiple_of(k as u64) {
        return Err(invalid(format!(
            "k = {k} does not divide D_eff = {d_eff}; pad D to {}",
            crate::datamodel::padded_dim(d_eff, k as u64)
        )));
    }
    let cap = d_eff / k as u64;
    let slots = fixed_slots(s.indices().iter().map(|&i| perm.apply_unchecked(i)), k, cap);
    Ok(OphSketch {
        k,
        d_eff,
        scheme: Scheme::FixedLength,
        seeds: vec![perm.seed()],
        slots,
    })
}

/// Bin of element `i` under the variable-length scheme.
#[inline]
pub fn variable_bin(bin_seed: u64, i: u64, k: usize) -> usize {
    (mix64(bin_seed, i) % k as u64) as usize
}

/// Variable-length sketch: elements are grouped into bins by a keyed hash and
/// each slot keeps the raw permuted minimum of its group.
pub fn sketch_variable(
    s: &BinarySet,
    bin_seed: u64,
    perm: &PermutationSpec,
    k: usize,
) -> Result<OphSketch> {
    check_input(s, perm)?;
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let mut mins = vec![u64::MAX; k];
    for &i in s.indices() {
        let bin = variable_bin(bin_seed, i, k);
        let v = perm.apply_unchecked(i);
        if v < mins[bin] {
            mins[bin] = v;
        }
    }
    let slots = mins
        .into_iter()
        .map(|m| if m == u64::MAX { Slot::Empty } else { Slot::Value(m) })
        .collect();
    Ok(OphSketch {
        k,
        d_eff: perm.dim(),
        scheme: Scheme::VariableLength,
        seeds: vec![bin_seed, perm.seed()],
        slots,
    })
}

/// Concatenation of `m = perms.len()` fixed-length sketches with `k/m` bins
/// each. With one permutation this is exactly [`sketch_fixed`].
pub fn sketch_m_perm(s: &BinarySet, perms: &[PermutationSpec], k: usize) -> Result<OphSketch> {
    let m = perms.len();
    if m == 0 {
        return Err(invalid("need at least one permutation"));
    }
    if k == 0 || !k.is_multiple_of(m) {
        return Err(invalid(format!("m = {m} does not divide k = {k}")));
    }
    if m == 1 {
        return sketch_fixed(s, &perms[0], k);
    }
    let d_eff = perms[0].dim();
    if perms.iter().any(|p| p.dim() != d_eff) {
        return Err(invalid("all permutations must share one dimension"));
    }
    let kp = k / m;
    let mut slots = Vec::with_capacity(k);
    for p in perms {
        slots.extend(sketch_fixed(s, p, kp)?.slots);
    }
    Ok(OphSketch {
        k,
        d_eff,
        scheme: Scheme::MPerm(m),
        seeds: perms.iter().map(|p| p.seed()).collect(),
        slots,
    })
}

/// Sketches every set with permutations derived from `seed`. The space is the
/// largest set dimension, padded to a multiple of the bin count for the
/// fixed-length and m-permutation schemes.
pub fn sketch_all(sets: &[BinarySet], scheme: Scheme, k: usize, seed: u64) -> Result<Vec<OphSketch>> {
    if k == 0 {
        return Err(invalid("k must be at least 1"));
    }
    let dim = sets.iter().map(BinarySet::dim).max().unwrap_or(1).max(1);
    match scheme {
        Scheme::FixedLength => {
            let perm = generate_permutation(seed, crate::datamodel::padded_dim(dim, k as u64))?;
            sets.iter().map(|s| sketch_fixed(s, &perm, k)).collect()
        }
        Scheme::VariableLength => {
            let perm = generate_permutation(seed, dim)?;
            let bin_seed = derive_seed(seed, &[u64::MAX]);
            sets.iter().map(|s| sketch_variable(s, bin_seed, &perm, k)).collect()
        }
        Scheme::MPerm(m) => {
            if m == 0 || !k.is_multiple_of(m) {
                return Err(invalid(format!("m = {m} does not divide k = {k}")));
            }
            let d = crate::datamodel::padded_dim(dim, (k / m) as u64);
            let perms = (0..m as u64)
                .map(|t| generate_permutation(derive_seed(seed, &[t]), d))
                .collect::<Result<Vec<_>>>()?;
            sets.iter().map(|s| sketch_m_perm(s, &perms, k)).collect()
        }
    }
}

/// Minima of a set under `k` independent permutations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinwiseVector {
    values: Vec<u64>,
    seeds: Vec<u64>,
    dim: u64,
}

impl MinwiseVector {
    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn seeds(&self) -> &[u64] {
        &self.seeds
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }
}

pub fn sketch_kperm_minwise(s: &BinarySet, perms: &[PermutationSpec]) -> Result<MinwiseVector> {
    if perms.is_empty() {
        return Err(invalid("k must be at least 1"));
    }
    let dim = perms[0].dim();
    let mut values = Vec::with_capacity(perms.len());
    for p in perms {
        check_input(s, p)?;
        if p.dim() != dim {
            return Err(invalid("all permutations must share one dimension"));
        }
        let min = s
            .indices()
            .iter()
            .map(|&i| p.apply_unchecked(i))
            .min()
            .expect("nonempty set");
        values.push(min);
    }
    Ok(MinwiseVector {
        values,
        seeds: perms.iter().map(|p| p.seed()).collect(),
        dim,
    })
}

// ---- binary format -------------------------------------------------------

const MAGIC: &[u8; 4] = b"OPHS";
const VERSION: u8 = 1;
const MAX_SLOTS: u64 = 1 << 28;

pub(crate) struct RecordHeader {
    pub scheme: Scheme,
    pub k: usize,
    pub d_eff: u64,
    pub b: u8,
    pub seeds: Vec<u64>,
}

pub(crate) fn write_file_header<W: Write>(w: &mut W, count: usize) -> Result<()> {
    w.write_all(MAGIC)?;
    codec::put_u8(w, VERSION)?;
    codec::put_u64(w, count as u64)
}

pub(crate) fn read_file_header<R: Read>(r: &mut R) -> Result<usize> {
    codec::expect_magic(r, MAGIC)?;
    let version = codec::get_u8(r)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported sketch file version {version}")));
    }
    codec::checked_len(codec::get_u64(r)?, 1 << 40, "sketch count")
}

pub(crate) fn write_record<W: Write>(w: &mut W, h: &RecordHeader, slots: &[Slot]) -> Result<()> {
    let (code, m) = match h.scheme {
        Scheme::FixedLength => (0u8, 1u32),
        Scheme::VariableLength => (1, 1),
        Scheme::MPerm(m) => (2, m as u32),
    };
    codec::put_u8(w, code)?;
    codec::put_u32(w, m)?;
    codec::put_u32(w, h.k as u32)?;
    codec::put_u64(w, h.d_eff)?;
    codec::put_u8(w, h.b)?;
    codec::put_u32(w, h.seeds.len() as u32)?;
    for &s in &h.seeds {
        codec::put_u64(w, s)?;
    }
    let mut bitmap = vec![0u8; slots.len().div_ceil(8)];
    for (j, s) in slots.iter().enumerate() {
        if !s.is_empty() {
            bitmap[j / 8] |= 1 << (j % 8);
        }
    }
    w.write_all(&bitmap)?;
    for v in slots.iter().filter_map(|s| s.value()) {
        if h.b == 0 {
            codec::put_u64(w, v)?;
        } else {
            codec::put_u32(w, v as u32)?;
        }
    }
    Ok(())
}

pub(crate) fn read_record<R: Read>(r: &mut R) -> Result<(RecordHeader, Vec<Slot>)> {
    let code = codec::get_u8(r)?;
    let m = codec::get_u32(r)? as usize;
    let scheme = match code {
        0 => Scheme::FixedLength,
        1 => Scheme::VariableLength,
        2 => Scheme::MPerm(m),
        other => return Err(Error::Format(format!("unknown scheme code {other}"))),
    };
    let k = codec::checked_len(codec::get_u32(r)? as u64, MAX_SLOTS, "slot")?;
    let d_eff = codec::get_u64(r)?;
    let b = codec::get_u8(r)?;
    if b > 32 {
        return Err(Error::Format(format!("b = {b} out of range")));
    }
    let nseeds = codec::checked_len(codec::get_u32(r)? as u64, MAX_SLOTS, "seed")?;
    let seeds = (0..nseeds).map(|_| codec::get_u64(r)).collect::<Result<Vec<_>>>()?;
    let mut bitmap = vec![0u8; k.div_ceil(8)];
    r.read_exact(&mut bitmap)
        .map_err(|_| Error::Format("truncated presence bitmap".into()))?;
    let mut slots = Vec::with_capacity(k);
    for j in 0..k {
        if bitmap[j / 8] & (1 << (j % 8)) != 0 {
            let v = if b == 0 {
                codec::get_u64(r)?
            } else {
                codec::get_u32(r)? as u64
            };
            slots.push(Slot::Value(v));
        } else {
            slots.push(Slot::Empty);
        }
    }
    Ok((
        RecordHeader {
            scheme,
            k,
            d_eff,
            b,
            seeds,
        },
        slots,
    ))
}

pub fn write_sketches<W: Write>(w: &mut W, sketches: &[OphSketch]) -> Result<()> {
    write_file_header(w, sketches.len())?;
    for s in sketches {
        let h = RecordHeader {
            scheme: s.scheme,
            k: s.k,
            d_eff: s.d_eff,
            b: 0,
            seeds: s.seeds.clone(),
        };
        write_record(w, &h, &s.slots)?;
    }
    Ok(())
}

pub fn read_sketches<R: Read>(r: &mut R) -> Result<Vec<OphSketch>> {
    let n = read_file_header(r)?;
    let mut out = Vec::with_capacity(n.min(1 << 20));
    for _ in 0..n {
        let (h, slots) = read_record(r)?;
        if h.b != 0 {
            return Err(Error::Format("record holds b-bit values, not full sketches".into()));
        }
        out.push(OphSketch::from_parts(h.scheme, h.d_eff, h.seeds, slots)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutation::generate_permutation;

    fn identity(d: u64) -> PermutationSpec {
        PermutationSpec::from_vec(0, (0..d as u32).collect()).unwrap()
    }

    fn set(idx: &[u64], d: u64) -> BinarySet {
        BinarySet::new(idx.to_vec(), d).unwrap()
    }

    use Slot::{Empty, Value};

    #[test]
    fn three_small_sets_sketch() {
        let p = identity(16);
        let s1 = sketch_fixed(&set(&[2, 4, 7, 13], 16), &p, 4).unwrap();
        let s2 = sketch_fixed(&set(&[0, 6, 13], 16), &p, 4).unwrap();
        let s3 = sketch_fixed(&set(&[0, 1, 10, 12], 16), &p, 4).unwrap();
        assert_eq!(s1.slots(), &[Value(2), Value(0), Empty, Value(1)]);
        assert_eq!(s2.slots(), &[Value(0), Value(2), Empty, Value(1)]);
        assert_eq!(s3.slots(), &[Value(0), Empty, Value(2), Value(0)]);
    }

    #[test]
    fn single_bin_is_minimum() {
        let p = generate_permutation(4, 64).unwrap();
        let s = set(&[3, 9, 40], 64);
        let sk = sketch_fixed(&s, &p, 1).unwrap();
        let min = s.indices().iter().map(|&i| p.apply(i).unwrap()).min().unwrap();
        assert_eq!(sk.slots(), &[Value(min)]);
    }

    #[test]
    fn fixed_errors() {
        let p = identity(16);
        assert!(matches!(
            sketch_fixed(&set(&[], 16), &p, 4),
            Err(Error::EmptySet)
        ));
        assert!(sketch_fixed(&set(&[1], 16), &p, 5).is_err());
        assert!(sketch_fixed(&set(&[1], 17), &p, 4).is_err());
    }

    #[test]
    fn padded_space() {
        // D = 10 padded to 12 for k = 4
        let p = generate_permutation(1, 12).unwrap();
        let sk = sketch_fixed(&set(&[0, 5, 9], 10), &p, 4).unwrap();
        assert_eq!(sk.d_eff(), 12);
        assert_eq!(sk.bin_capacity(), 3);
    }

    #[test]
    fn variable_single_element() {
        let p = generate_permutation(2, 100).unwrap();
        let sk = sketch_variable(&set(&[17], 100), 77, &p, 10).unwrap();
        assert_eq!(sk.num_empty(), 9);
        assert_eq!(sk.slots()[variable_bin(77, 17, 10)], Value(p.apply(17).unwrap()));
    }

    #[test]
    fn variable_shared_element_agrees() {
        let p = generate_permutation(2, 100).unwrap();
        let a = sketch_variable(&set(&[17], 100), 5, &p, 8).unwrap();
        let b = sketch_variable(&set(&[17, 99], 100), 5, &p, 8).unwrap();
        let j = variable_bin(5, 17, 8);
        if variable_bin(5, 99, 8) != j || p.apply(17).unwrap() < p.apply(99).unwrap() {
            assert_eq!(a.slots()[j], b.slots()[j]);
        }
    }

    #[test]
    fn variable_empty_probability() {
        // Pr(slot empty) = (1 - 1/k)^f for f = 20, k = 10
        let d = 1000;
        let s = set(&(0..20).map(|i| i * 37).collect::<Vec<_>>(), d);
        let p = generate_permutation(0, d).unwrap();
        let trials = 10_000;
        let mut empty = 0usize;
        for seed in 0..trials {
            let sk = sketch_variable(&s, seed, &p, 10).unwrap();
            empty += sk.slots()[0].is_empty() as usize;
        }
        let expect = 0.9f64.powi(20);
        let phat = empty as f64 / trials as f64;
        let se = (expect * (1.0 - expect) / trials as f64).sqrt();
        assert!((phat - expect).abs() < 3.0 * se, "{phat} vs {expect}");
    }

    #[test]
    fn m_perm_degenerate_cases() {
        let d = 64;
        let s = set(&[1, 7, 30, 44, 63], d);
        let p = generate_permutation(9, d).unwrap();
        assert_eq!(
            sketch_m_perm(&s, std::slice::from_ref(&p), 8).unwrap(),
            sketch_fixed(&s, &p, 8).unwrap()
        );
        let perms: Vec<_> = (0..8).map(|i| generate_permutation(100 + i, d).unwrap()).collect();
        let sk = sketch_m_perm(&s, &perms, 8).unwrap();
        assert_eq!(sk.num_empty(), 0);
        assert_eq!(sk.bin_capacity(), d);
        let mv = sketch_kperm_minwise(&s, &perms).unwrap();
        let vals: Vec<u64> = sk.slots().iter().map(|x| x.value().unwrap()).collect();
        assert_eq!(vals, mv.values());
        assert!(sketch_m_perm(&s, &perms[..3], 8).is_err());
    }

    #[test]
    fn m_perm_reduces_joint_empties() {
        let d = 1 << 12;
        let (k, trials) = (4, 10_000u64);
        let s1 = set(&[5, 100, 2000], d);
        let s2 = set(&[5, 300, 4000], d);
        let mut empty1 = 0usize;
        let mut empty2 = 0usize;
        for t in 0..trials {
            let p = generate_permutation(t, d).unwrap();
            let q = generate_permutation(t + 1_000_000, d).unwrap();
            let a = sketch_fixed(&s1, &p, k).unwrap();
            let b = sketch_fixed(&s2, &p, k).unwrap();
            empty1 += joint_empty(&a, &b);
            let pq = [p, q];
            let a = sketch_m_perm(&s1, &pq, k).unwrap();
            let b = sketch_m_perm(&s2, &pq, k).unwrap();
            empty2 += joint_empty(&a, &b);
        }
        assert!(empty2 < empty1, "m=2 {empty2} vs m=1 {empty1}");
    }

    fn joint_empty(a: &OphSketch, b: &OphSketch) -> usize {
        a.slots()
            .iter()
            .zip(b.slots())
            .filter(|(x, y)| x.is_empty() && y.is_empty())
            .count()
    }

    #[test]
    fn kperm_basics() {
        let d = 32;
        let perms: Vec<_> = (0..5).map(|i| generate_permutation(i, d).unwrap()).collect();
        let full = set(&(0..d).collect::<Vec<_>>(), d);
        let v = sketch_kperm_minwise(&full, &perms[..1]).unwrap();
        assert_eq!(v.values(), &[0]);
        let s = set(&[3, 4], d);
        assert_eq!(
            sketch_kperm_minwise(&s, &perms).unwrap(),
            sketch_kperm_minwise(&s.clone(), &perms).unwrap()
        );
        assert!(sketch_kperm_minwise(&set(&[], d), &perms).is_err());
    }

    #[test]
    fn kperm_collision_rate_is_resemblance() {
        let d = 16;
        let s1 = set(&[2, 4, 7, 13], d);
        let s2 = set(&[0, 6, 13], d);
        let n = 100_000u64;
        let mut hits = 0u64;
        for t in 0..n {
            let p = generate_permutation(t, d).unwrap();
            let a = sketch_kperm_minwise(&s1, std::slice::from_ref(&p)).unwrap();
            let b = sketch_kperm_minwise(&s2, std::slice::from_ref(&p)).unwrap();
            hits += (a.values() == b.values()) as u64;
        }
        let r = 1.0 / 6.0;
        let se = (r * (1.0 - r) / n as f64).sqrt();
        let phat = hits as f64 / n as f64;
        assert!((phat - r).abs() < 3.0 * se, "{phat}");
    }

    #[test]
    fn file_roundtrip() {
        let d = 64;
        let p = generate_permutation(1, d).unwrap();
        let a = sketch_fixed(&set(&[1, 2, 3], d), &p, 8).unwrap();
        let b = sketch_variable(&set(&[9, 50], d), 3, &p, 5).unwrap();
        let mut buf = Vec::new();
        write_sketches(&mut buf, &[a.clone(), b.clone()]).unwrap();
        let back = read_sketches(&mut buf.as_slice()).unwrap();
        assert_eq!(back, vec![a, b]);
        assert!(read_sketches(&mut &buf[..buf.len() - 1]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_case() -> impl Strategy<Value = (u64, usize, Vec<u64>, Vec<u64>, u64)> {
            (0u32..=4, 1u32..=6).prop_flat_map(|(log_k, log_cap)| {
                let k = 1usize << log_k;
                let d = (k as u64) << log_cap;
                (
                    Just(d),
                    Just(k),
                    proptest::collection::btree_set(0..d, 1..20).prop_map(|s| s.into_iter().collect()),
                    proptest::collection::btree_set(0..d, 1..20).prop_map(|s| s.into_iter().collect()),
                    any::<u64>(),
                )
            })
        }

        proptest! {
            #[test]
            fn bins_hold_true_minima((d, k, x, y, seed) in arb_case()) {
                let p = generate_permutation(seed, d).unwrap();
                let sx = set(&x, d);
                let sk = sketch_fixed(&sx, &p, k).unwrap();
                let cap = d / k as u64;
                let permuted: Vec<u64> = x.iter().map(|&i| p.apply(i).unwrap()).collect();
                for (j, slot) in sk.slots().iter().enumerate() {
                    let lo = j as u64 * cap;
                    let brute = permuted.iter().copied().filter(|v| *v >= lo && *v < lo + cap).min();
                    prop_assert_eq!(slot.value().map(|v| v + lo), brute);
                }
                // jointly empty bins are the bins missed by the union
                let sy = set(&y, d);
                let sk2 = sketch_fixed(&sy, &p, k).unwrap();
                let mut occupied = vec![false; k];
                for &i in x.iter().chain(y.iter()) {
                    occupied[(p.apply(i).unwrap() / cap) as usize] = true;
                }
                let brute_emp = occupied.iter().filter(|o| !**o).count();
                prop_assert_eq!(joint_empty(&sk, &sk2), brute_emp);
            }
        }
    }
}

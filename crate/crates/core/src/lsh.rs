//! Banded LSH over one permutation b-bit signatures.
//!
//! Each of the `L` tables sketches every vector with its own permutation,
//! truncates the `k` bins to `b` bits and concatenates them (bin 0 in the most
//! significant bits) into a `B = b·k`-bit bucket address. Empty bins
//! contribute `b` zero bits. A query returns the union of its buckets.

use std::collections::HashMap;
use std::io::{Read, Write};

use crate::codec;
use crate::datamodel::{padded_dim, BinarySet};
use crate::error::{invalid, Error, Result};
use crate::permutation::{generate_permutation, PermutationSpec};
use crate::rng::derive_seed;
use crate::sketch::{sketch_fixed, Slot};

/// Signatures up to this many bits are stored with direct-addressed buckets.
pub const DIRECT_MAX_BITS: u32 = 20;

const MAGIC: &[u8; 4] = b"OPHL";
const VERSION: u8 = 1;

fn check_shape(b: u8, k: usize) -> Result<u32> {
    if b == 0 || k == 0 {
        return Err(invalid("b and k must be positive"));
    }
    let bits = b as u64 * k as u64;
    if bits > 64 {
        return Err(invalid(format!("b·k = {bits} exceeds 64 bits")));
    }
    Ok(bits as u32)
}

pub fn table_seed(master_seed: u64, table: usize) -> u64 {
    derive_seed(master_seed, &[table as u64])
}

/// Packs b-bit slot values MSB-first; empty slots become zero bits.
pub fn signature_from_slots(slots: &[Slot], b: u8) -> Result<u64> {
    check_shape(b, slots.len())?;
    let mask = if b == 64 { u64::MAX } else { (1u64 << b) - 1 };
    let mut sig = 0u64;
    for s in slots {
        sig = sig.checked_shl(b as u32).unwrap_or(0) | (s.value().unwrap_or(0) & mask);
    }
    Ok(sig)
}

/// Signature of `s` under the permutation `perm` (dimension divisible by `k`).
pub fn signature_with(s: &BinarySet, perm: &PermutationSpec, b: u8, k: usize) -> Result<u64> {
    check_shape(b, k)?;
    let sk = sketch_fixed(s, perm, k)?;
    signature_from_slots(sk.slots(), b)
}

/// Signature of `s` under the permutation of `[0, padded D)` seeded by
/// `table_seed`. Builds the permutation on every call; indexes cache theirs.
pub fn build_signature(s: &BinarySet, table_seed: u64, b: u8, k: usize) -> Result<u64> {
    check_shape(b, k)?;
    let perm = generate_permutation(table_seed, padded_dim(s.dim(), k as u64))?;
    signature_with(s, &perm, b, k)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Table {
    /// CSR buckets: ids of bucket `x` are `ids[offsets[x]..offsets[x + 1]]`.
    Direct { offsets: Vec<u32>, ids: Vec<u32> },
    Hashed(HashMap<u64, Vec<u32>>),
}

impl Table {
    fn from_signatures(sigs: &[u64], bits: u32) -> Self {
        if bits <= DIRECT_MAX_BITS {
            let n_buckets = 1usize << bits;
            let mut offsets = vec![0u32; n_buckets + 1];
            for &s in sigs {
                offsets[s as usize + 1] += 1;
            }
            for x in 0..n_buckets {
                offsets[x + 1] += offsets[x];
            }
            let mut fill = offsets.clone();
            let mut ids = vec![0u32; sigs.len()];
            for (id, &s) in sigs.iter().enumerate() {
                ids[fill[s as usize] as usize] = id as u32;
                fill[s as usize] += 1;
            }
            Table::Direct { offsets, ids }
        } else {
            let mut map: HashMap<u64, Vec<u32>> = HashMap::new();
            for (id, &s) in sigs.iter().enumerate() {
                map.entry(s).or_default().push(id as u32);
            }
            Table::Hashed(map)
        }
    }

    fn bucket(&self, sig: u64) -> &[u32] {
        match self {
            Table::Direct { offsets, ids } => {
                let x = sig as usize;
                if x + 1 >= offsets.len() {
                    return &[];
                }
                &ids[offsets[x] as usize..offsets[x + 1] as usize]
            }
            Table::Hashed(map) => map.get(&sig).map_or(&[], |v| v.as_slice()),
        }
    }

    fn total(&self) -> usize {
        match self {
            Table::Direct { ids, .. } => ids.len(),
            Table::Hashed(map) => map.values().map(Vec::len).sum(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LshIndex {
    b: u8,
    k: usize,
    dim: u64,
    seeds: Vec<u64>,
    tables: Vec<Table>,
    len: usize,
    perms: Vec<PermutationSpec>,
}

/// Builds `l` tables over `data`; table `ℓ` uses `table_seed(master_seed, ℓ)`.
pub fn build_index(data: &[BinarySet], l: usize, b: u8, k: usize, master_seed: u64) -> Result<LshIndex> {
    let bits = check_shape(b, k)?;
    if l == 0 {
        return Err(invalid("L must be at least 1"));
    }
    if data.len() > u32::MAX as usize {
        return Err(invalid("too many vectors for 32-bit ids"));
    }
    let raw_dim = data.iter().map(BinarySet::dim).max().unwrap_or(k as u64).max(1);
    let dim = padded_dim(raw_dim, k as u64);
    let seeds: Vec<u64> = (0..l).map(|t| table_seed(master_seed, t)).collect();
    let perms = seeds
        .iter()
        .map(|&s| generate_permutation(s, dim))
        .collect::<Result<Vec<_>>>()?;
    let mut tables = Vec::with_capacity(l);
    for perm in &perms {
        let sigs = data
            .iter()
            .map(|s| signature_with(s, perm, b, k))
            .collect::<Result<Vec<_>>>()?;
        tables.push(Table::from_signatures(&sigs, bits));
    }
    Ok(LshIndex {
        b,
        k,
        dim,
        seeds,
        tables,
        len: data.len(),
        perms,
    })
}

impl LshIndex {
    /// Index over precomputed signatures, `sigs[ℓ][id]`. Such an index can only
    /// be queried by signature.
    pub fn from_signatures(sigs: &[Vec<u64>], b: u8, k: usize) -> Result<Self> {
        let bits = check_shape(b, k)?;
        let len = sigs.first().map_or(0, Vec::len);
        if sigs.is_empty() || sigs.iter().any(|t| t.len() != len) {
            return Err(invalid("every table needs one signature per vector"));
        }
        if bits < 64 && sigs.iter().flatten().any(|&s| s >> bits != 0) {
            return Err(invalid(format!("signature exceeds {bits} bits")));
        }
        Ok(Self {
            b,
            k,
            dim: 0,
            seeds: Vec::new(),
            tables: sigs.iter().map(|t| Table::from_signatures(t, bits)).collect(),
            len,
            perms: Vec::new(),
        })
    }

    pub fn num_tables(&self) -> usize {
        self.tables.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn b(&self) -> u8 {
        self.b
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    pub fn seeds(&self) -> &[u64] {
        &self.seeds
    }

    pub fn bucket(&self, table: usize, sig: u64) -> &[u32] {
        self.tables[table].bucket(sig)
    }

    /// Number of stored ids in `table`; equals [`len`](Self::len).
    pub fn table_size(&self, table: usize) -> usize {
        self.tables[table].total()
    }

    /// Per-table signatures of `q`.
    pub fn signatures(&self, q: &BinarySet) -> Result<Vec<u64>> {
        if self.perms.len() != self.tables.len() {
            return Err(invalid("index was built from raw signatures"));
        }
        if q.dim() > self.dim {
            return Err(Error::DimensionMismatch {
                left: q.dim(),
                right: self.dim,
            });
        }
        self.perms
            .iter()
            .map(|p| signature_with(q, p, self.b, self.k))
            .collect()
    }

    /// Sorted, deduplicated union of the buckets addressed by `sigs`.
    pub fn query_by_signatures(&self, sigs: &[u64]) -> Result<Vec<u32>> {
        if sigs.len() != self.tables.len() {
            return Err(invalid(format!(
                "{} signatures for {} tables",
                sigs.len(),
                self.tables.len()
            )));
        }
        let mut out: Vec<u32> = self
            .tables
            .iter()
            .zip(sigs)
            .flat_map(|(t, &s)| t.bucket(s).iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    pub fn query(&self, q: &BinarySet) -> Result<Vec<u32>> {
        let sigs = self.signatures(q)?;
        self.query_by_signatures(&sigs)
    }

    /// Header with L, b, k, D and seeds, then each table's buckets. Loading
    /// rebuilds the permutations from the seeds.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        if self.perms.len() != self.tables.len() {
            return Err(invalid("index was built from raw signatures"));
        }
        w.write_all(MAGIC)?;
        codec::put_u8(w, VERSION)?;
        codec::put_u32(w, self.tables.len() as u32)?;
        codec::put_u8(w, self.b)?;
        codec::put_u32(w, self.k as u32)?;
        codec::put_u64(w, self.dim)?;
        codec::put_u64(w, self.len as u64)?;
        for &s in &self.seeds {
            codec::put_u64(w, s)?;
        }
        for t in &self.tables {
            match t {
                Table::Direct { offsets, ids } => {
                    codec::put_u8(w, 0)?;
                    for &o in offsets {
                        codec::put_u32(w, o)?;
                    }
                    for &i in ids {
                        codec::put_u32(w, i)?;
                    }
                }
                Table::Hashed(map) => {
                    codec::put_u8(w, 1)?;
                    let mut keys: Vec<_> = map.keys().copied().collect();
                    keys.sort_unstable();
                    codec::put_u64(w, keys.len() as u64)?;
                    for key in keys {
                        let ids = &map[&key];
                        codec::put_u64(w, key)?;
                        codec::put_u32(w, ids.len() as u32)?;
                        for &i in ids {
                            codec::put_u32(w, i)?;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        codec::expect_magic(r, MAGIC)?;
        let version = codec::get_u8(r)?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported index version {version}")));
        }
        let l = codec::checked_len(codec::get_u32(r)? as u64, 1 << 16, "table")?;
        let b = codec::get_u8(r)?;
        let k = codec::get_u32(r)? as usize;
        let bits = check_shape(b, k).map_err(|e| Error::Format(e.to_string()))?;
        let dim = codec::get_u64(r)?;
        let len = codec::checked_len(codec::get_u64(r)?, u32::MAX as u64, "vector")?;
        let seeds = (0..l).map(|_| codec::get_u64(r)).collect::<Result<Vec<_>>>()?;
        let mut tables = Vec::with_capacity(l);
        for _ in 0..l {
            let t = match codec::get_u8(r)? {
                0 if bits <= DIRECT_MAX_BITS => {
                    let offsets = (0..=(1usize << bits))
                        .map(|_| codec::get_u32(r))
                        .collect::<Result<Vec<_>>>()?;
                    if offsets.windows(2).any(|w| w[0] > w[1]) || offsets.last() != Some(&(len as u32)) {
                        return Err(Error::Format("corrupt bucket offsets".into()));
                    }
                    let ids = (0..len).map(|_| codec::get_u32(r)).collect::<Result<Vec<_>>>()?;
                    Table::Direct { offsets, ids }
                }
                1 => {
                    let n = codec::checked_len(codec::get_u64(r)?, len as u64, "bucket")?;
                    let mut map = HashMap::with_capacity(n);
                    for _ in 0..n {
                        let key = codec::get_u64(r)?;
                        let c = codec::checked_len(codec::get_u32(r)? as u64, len as u64, "bucket size")?;
                        let ids = (0..c).map(|_| codec::get_u32(r)).collect::<Result<Vec<_>>>()?;
                        map.insert(key, ids);
                    }
                    Table::Hashed(map)
                }
                other => return Err(Error::Format(format!("bad table layout {other}"))),
            };
            if t.total() != len {
                return Err(Error::Format("table does not hold every vector once".into()));
            }
            tables.push(t);
        }
        let perms = seeds
            .iter()
            .map(|&s| generate_permutation(s, dim))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            b,
            k,
            dim,
            seeds,
            tables,
            len,
            perms,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use Slot::{Empty, Value};

    #[test]
    fn signature_bits() {
        assert_eq!(signature_from_slots(&[Value(0), Value(0)], 2).unwrap(), 0);
        assert_eq!(signature_from_slots(&[Value(3), Value(3)], 2).unwrap(), 15);
        assert_eq!(signature_from_slots(&[Value(1), Empty], 2).unwrap(), 0b0100);
        assert_eq!(signature_from_slots(&[Value(7), Value(0)], 2).unwrap(), 0b1100);
        assert!(signature_from_slots(&[Value(0); 17], 4).is_err());
        assert_eq!(signature_from_slots(&[Value(u64::MAX)], 64).unwrap(), u64::MAX);
    }

    #[test]
    fn bucket_union_narrative() {
        let n = 150;
        let mut t1 = vec![1u64; n];
        let mut t2 = vec![2u64; n];
        for id in [6, 15, 26] {
            t1[id] = 0;
        }
        for id in [6, 79, 110, 143] {
            t2[id] = 15;
        }
        let idx = LshIndex::from_signatures(&[t1, t2], 2, 2).unwrap();
        assert!(idx.bucket(0, 0).contains(&6));
        assert!(idx.bucket(1, 15).contains(&6));
        assert_eq!(idx.query_by_signatures(&[0, 15]).unwrap(), vec![6, 15, 26, 79, 110, 143]);
        assert!(idx.query_by_signatures(&[3, 3]).unwrap().is_empty());
    }

    fn corpus(n: usize, d: u64, seed: u64) -> Vec<BinarySet> {
        let mut rng = SeededRng::new(seed);
        (0..n)
            .map(|_| {
                let f = 5 + rng.below(30) as usize;
                BinarySet::from_unsorted(rng.sample_distinct(d, f), d).unwrap()
            })
            .collect()
    }

    #[test]
    fn every_vector_once_per_table_and_self_hit() {
        let data = corpus(200, 1000, 3);
        let idx = build_index(&data, 3, 2, 4, 11).unwrap();
        for t in 0..3 {
            assert_eq!(idx.table_size(t), 200);
        }
        for (id, s) in data.iter().enumerate() {
            assert!(idx.query(s).unwrap().contains(&(id as u32)));
        }
        let sig = build_signature(&data[0], idx.seeds()[1], 2, 4).unwrap();
        assert_eq!(sig, idx.signatures(&data[0]).unwrap()[1]);
    }

    #[test]
    fn identical_sets_share_buckets() {
        let s = BinarySet::new(vec![1, 5, 9, 40], 64).unwrap();
        let idx = build_index(&[s.clone(), s.clone()], 1, 3, 4, 0).unwrap();
        assert_eq!(idx.query(&s).unwrap(), vec![0, 1]);
    }

    #[test]
    fn recall_grows_with_tables() {
        let data = corpus(300, 2000, 8);
        let small = build_index(&data, 2, 2, 4, 5).unwrap();
        let big = build_index(&data, 6, 2, 4, 5).unwrap();
        for q in data.iter().take(30) {
            let a = small.query(q).unwrap();
            let b = big.query(q).unwrap();
            assert!(a.iter().all(|x| b.binary_search(x).is_ok()));
        }
    }

    #[test]
    fn hashed_tables_and_round_trip() {
        let data = corpus(100, 500, 1);
        for (b, k) in [(2u8, 4usize), (8, 4)] {
            let idx = build_index(&data, 2, b, k, 99).unwrap();
            let mut buf = Vec::new();
            idx.write_to(&mut buf).unwrap();
            let back = LshIndex::read_from(&mut buf.as_slice()).unwrap();
            assert_eq!(back.tables, idx.tables);
            for q in data.iter().take(10) {
                assert_eq!(back.query(q).unwrap(), idx.query(q).unwrap());
            }
        }
    }

    #[test]
    fn rejects_wide_signatures() {
        let data = corpus(2, 100, 1);
        assert!(build_index(&data, 1, 8, 9, 0).is_err());
        assert!(build_index(&data, 0, 2, 2, 0).is_err());
    }
}

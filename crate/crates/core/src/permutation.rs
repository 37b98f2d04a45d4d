//! Seeded permutations of `Ω = {0, …, D-1}`.
//!
//! [`PermutationMode::Explicit`] stores a full permutation vector produced by a
//! Fisher–Yates shuffle driven by [`SeededRng`]; it is exact and is what every
//! theory comparison uses. [`PermutationMode::UniversalHash`] maps
//! `x ↦ ((a·x + b) mod p) mod D` for very large spaces where a vector cannot be
//! stored. That map is generally not a bijection on `[0, D)`, so results built
//! on it are approximate.

use std::io::{Read, Write};

use crate::codec;
use crate::error::{invalid, Error, Result};
use crate::rng::SeededRng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PermutationMode {
    Explicit(Vec<u32>),
    UniversalHash { a: u64, b: u64, p: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationSpec {
    seed: u64,
    dim: u64,
    mode: PermutationMode,
}

/// Largest space an explicit permutation vector may cover.
pub const MAX_EXPLICIT_DIM: u64 = 1 << 32;

/// Fisher–Yates permutation of `[0, dim)`; identical seeds give identical
/// permutations on every platform.
pub fn generate_permutation(seed: u64, dim: u64) -> Result<PermutationSpec> {
    if dim == 0 {
        return Err(invalid("permutation dimension must be at least 1"));
    }
    if dim > MAX_EXPLICIT_DIM {
        return Err(invalid(format!(
            "explicit permutations support D <= 2^32, got {dim}; use universal hashing"
        )));
    }
    let mut rng = SeededRng::new(seed);
    let mut map: Vec<u32> = (0..dim).map(|i| i as u32).collect();
    rng.shuffle(&mut map);
    Ok(PermutationSpec {
        seed,
        dim,
        mode: PermutationMode::Explicit(map),
    })
}

/// Universal-hash approximation with `p` the smallest prime `>= dim`.
pub fn generate_universal(seed: u64, dim: u64) -> Result<PermutationSpec> {
    if dim == 0 {
        return Err(invalid("permutation dimension must be at least 1"));
    }
    let p = next_prime(dim.max(2))
        .ok_or_else(|| invalid(format!("no 64-bit prime >= {dim}")))?;
    let mut rng = SeededRng::new(seed);
    let a = 1 + rng.below(p - 1);
    let b = rng.below(p);
    Ok(PermutationSpec {
        seed,
        dim,
        mode: PermutationMode::UniversalHash { a, b, p },
    })
}

/// Smallest prime `>= n`, by trial division.
pub fn next_prime(n: u64) -> Option<u64> {
    (n..=u64::MAX).find(|&c| is_prime(c))
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut i = 5u64;
    while (i as u128) * (i as u128) <= n as u128 {
        if n.is_multiple_of(i) || n.is_multiple_of(i + 2) {
            return false;
        }
        i += 6;
    }
    true
}

impl PermutationSpec {
    /// Wraps an explicit permutation vector after checking it is a bijection.
    pub fn from_vec(seed: u64, map: Vec<u32>) -> Result<Self> {
        let dim = map.len() as u64;
        if dim == 0 {
            return Err(invalid("permutation dimension must be at least 1"));
        }
        let mut seen = vec![false; map.len()];
        for &v in &map {
            let slot = seen
                .get_mut(v as usize)
                .ok_or(Error::OutOfRange { index: v as u64, dim })?;
            if *slot {
                return Err(invalid(format!("value {v} appears twice; not a bijection")));
            }
            *slot = true;
        }
        Ok(Self {
            seed,
            dim,
            mode: PermutationMode::Explicit(map),
        })
    }

    /// Universal hash with caller-chosen parameters.
    pub fn universal(seed: u64, dim: u64, a: u64, b: u64, p: u64) -> Result<Self> {
        if dim == 0 || p < dim || !is_prime(p) {
            return Err(invalid(format!("need prime p >= D, got p = {p}, D = {dim}")));
        }
        if a == 0 || a >= p || b >= p {
            return Err(invalid("need 1 <= a < p and 0 <= b < p"));
        }
        Ok(Self {
            seed,
            dim,
            mode: PermutationMode::UniversalHash { a, b, p },
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> u64 {
        self.dim
    }

    pub fn mode(&self) -> &PermutationMode {
        &self.mode
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.mode, PermutationMode::Explicit(_))
    }

    /// The permutation vector, when explicit.
    pub fn as_slice(&self) -> Option<&[u32]> {
        match &self.mode {
            PermutationMode::Explicit(m) => Some(m),
            PermutationMode::UniversalHash { .. } => None,
        }
    }

    pub fn apply(&self, i: u64) -> Result<u64> {
        if i >= self.dim {
            return Err(Error::OutOfRange {
                index: i,
                dim: self.dim,
            });
        }
        Ok(self.apply_unchecked(i))
    }

    /// `apply` without the range check; `i` must be below `dim`.
    #[inline]
    pub fn apply_unchecked(&self, i: u64) -> u64 {
        match &self.mode {
            PermutationMode::Explicit(m) => m[i as usize] as u64,
            PermutationMode::UniversalHash { a, b, p } => {
                let h = ((*a as u128 * i as u128 + *b as u128) % *p as u128) as u64;
                h % self.dim
            }
        }
    }

    /// Inverse permutation vector (explicit mode only).
    pub fn inverse(&self) -> Result<Vec<u32>> {
        let m = self
            .as_slice()
            .ok_or_else(|| invalid("universal-hash maps have no inverse"))?;
        let mut inv = vec![0u32; m.len()];
        for (i, &v) in m.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        Ok(inv)
    }

    /// Writes the permutation vector as little-endian `u32` entries, no header.
    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        let m = self
            .as_slice()
            .ok_or_else(|| invalid("only explicit permutations can be serialized"))?;
        for &v in m {
            codec::put_u32(w, v)?;
        }
        Ok(())
    }

    /// Reads a flat little-endian `u32` permutation vector.
    pub fn read_from<R: Read>(seed: u64, r: &mut R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() % 4 != 0 {
            return Err(Error::Format(format!(
                "permutation file length {} is not a multiple of 4",
                bytes.len()
            )));
        }
        let map = bytes
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        Self::from_vec(seed, map)
    }
}

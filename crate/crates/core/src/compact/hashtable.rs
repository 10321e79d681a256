//! Open-addressing hashtables carved out of one shared slab.
//!
//! A vertex with degree `D` owns a span of `2D` slots and uses the first
//! `p1 = next_pow2(D) - 1` of them. Probing starts at `k mod p1` and, in the
//! default hybrid scheme, steps by a quadratically growing `δ` perturbed by
//! `k mod p2` with `p2 = 2(p1 + 1) - 1`. After `2·p1` probes the sequence
//! falls back to unit steps so the last `p1` probes visit every slot.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU32, Ordering};

use rayon::prelude::*;

use crate::atomic::{AtomicF32, AtomicF64};
use crate::error::LouvainError;
use crate::graph::SENTINEL_ID;

/// Smallest power of two strictly greater than `x`.
pub fn next_pow2(x: usize) -> Option<usize> {
    x.checked_add(1)?.checked_next_power_of_two()
}

/// Table capacity for `d` distinct keys.
pub fn capacity_for(d: usize) -> usize {
    next_pow2(d).expect("degree overflows the table size") - 1
}

/// Secondary modulus for capacity `p1`.
pub fn secondary_modulus(p1: usize) -> usize {
    2 * (p1 + 1) - 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Probing {
    Linear,
    Quadratic,
    Double,
    #[default]
    QuadraticDouble,
}

impl FromStr for Probing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "linear" => Ok(Self::Linear),
            "quadratic" => Ok(Self::Quadratic),
            "double" => Ok(Self::Double),
            "quadratic-double" => Ok(Self::QuadraticDouble),
            _ => Err(format!("unknown probing scheme {s:?}")),
        }
    }
}

impl fmt::Display for Probing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Linear => "linear",
            Self::Quadratic => "quadratic",
            Self::Double => "double",
            Self::QuadraticDouble => "quadratic-double",
        })
    }
}

/// Width of the stored hashtable values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ValueBits {
    #[default]
    F32,
    F64,
}

impl FromStr for ValueBits {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "32" => Ok(Self::F32),
            "64" => Ok(Self::F64),
            _ => Err(format!("value bits must be 32 or 64, got {s:?}")),
        }
    }
}

/// A real type storable in a slab slot.
pub trait SlotValue: Copy + Send + Sync + 'static {
    type Atomic: Send + Sync + Default;

    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
    fn load(a: &Self::Atomic) -> Self;
    fn store(a: &Self::Atomic, v: Self);
    fn fetch_add(a: &Self::Atomic, v: Self);
}

impl SlotValue for f32 {
    type Atomic = AtomicF32;

    fn from_f64(v: f64) -> Self {
        v as f32
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
    #[inline]
    fn load(a: &AtomicF32) -> Self {
        a.load()
    }
    #[inline]
    fn store(a: &AtomicF32, v: Self) {
        a.store(v)
    }
    #[inline]
    fn fetch_add(a: &AtomicF32, v: Self) {
        a.fetch_add(v);
    }
}

impl SlotValue for f64 {
    type Atomic = AtomicF64;

    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn load(a: &AtomicF64) -> Self {
        a.load()
    }
    #[inline]
    fn store(a: &AtomicF64, v: Self) {
        a.store(v)
    }
    #[inline]
    fn fetch_add(a: &AtomicF64, v: Self) {
        a.fetch_add(v);
    }
}

/// Key and value storage shared by all tables.
pub struct HashSlab<V: SlotValue> {
    keys: Vec<AtomicU32>,
    values: Vec<V::Atomic>,
    probing: Probing,
}

impl<V: SlotValue> HashSlab<V> {
    pub fn new(slots: usize, probing: Probing) -> Self {
        Self {
            keys: (0..slots).into_par_iter().map(|_| AtomicU32::new(SENTINEL_ID)).collect(),
            values: (0..slots).into_par_iter().map(|_| V::Atomic::default()).collect(),
            probing,
        }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// The table for up to `distinct` keys starting at slot `start`. Its span
    /// is `2 * distinct` slots.
    pub fn view(&self, start: usize, distinct: usize) -> TableView<'_, V> {
        let span = 2 * distinct;
        let p1 = capacity_for(distinct);
        debug_assert!(p1 <= span);
        TableView {
            keys: &self.keys[start..start + p1],
            values: &self.values[start..start + p1],
            p1,
            p2: secondary_modulus(p1),
            probing: self.probing,
        }
    }
}

/// One table inside a [`HashSlab`].
pub struct TableView<'a, V: SlotValue> {
    keys: &'a [AtomicU32],
    values: &'a [V::Atomic],
    p1: usize,
    p2: usize,
    probing: Probing,
}

impl<'a, V: SlotValue> TableView<'a, V> {
    pub fn capacity(&self) -> usize {
        self.p1
    }

    pub fn secondary(&self) -> usize {
        self.p2
    }

    pub fn max_retries(&self) -> usize {
        3 * self.p1
    }

    pub fn clear(&self) {
        for (k, v) in self.keys.iter().zip(self.values) {
            k.store(SENTINEL_ID, Ordering::Relaxed);
            V::store(v, V::from_f64(0.0));
        }
    }

    /// Clears with the current rayon pool.
    pub fn par_clear(&self) {
        self.keys
            .par_iter()
            .zip(self.values)
            .for_each(|(k, v)| {
                k.store(SENTINEL_ID, Ordering::Relaxed);
                V::store(v, V::from_f64(0.0));
            });
    }

    /// Slots visited for key `k`, in order, up to the retry limit.
    pub fn probe_sequence(&self, k: u32) -> impl Iterator<Item = usize> + '_ {
        let p1 = self.p1 as u64;
        let r = k as u64 % self.p2 as u64;
        let (fallback, probing) = (2 * p1, self.probing);
        let mut i = if p1 == 0 { 0 } else { k as u64 % p1 };
        let mut delta = 1u64;
        (0..self.max_retries() as u64).map(move |t| {
            let slot = i as usize;
            let step = if t + 1 >= fallback {
                1
            } else {
                match probing {
                    Probing::Linear => 1,
                    Probing::Quadratic => {
                        let s = delta;
                        delta = 2 * delta % p1;
                        s
                    }
                    Probing::Double => r.max(1),
                    Probing::QuadraticDouble => {
                        let s = delta;
                        delta = (2 * delta + r) % p1;
                        s
                    }
                }
            };
            i = (i + step) % p1;
            slot
        })
    }

    /// Adds `v` to the value of key `k`, inserting it if absent. With
    /// `shared`, other threads may touch this view concurrently.
    #[inline]
    pub fn accumulate(&self, k: u32, v: f64, shared: bool) -> Result<usize, LouvainError> {
        let v = V::from_f64(v);
        for slot in self.probe_sequence(k) {
            let key = &self.keys[slot];
            let cur = key.load(Ordering::Relaxed);
            if cur == k {
                self.add(slot, v, shared);
                return Ok(slot);
            }
            if cur != SENTINEL_ID {
                continue;
            }
            if !shared {
                key.store(k, Ordering::Relaxed);
                V::store(&self.values[slot], v);
                return Ok(slot);
            }
            match key.compare_exchange(SENTINEL_ID, k, Ordering::AcqRel, Ordering::Acquire) {
                Ok(_) => {
                    V::fetch_add(&self.values[slot], v);
                    return Ok(slot);
                }
                Err(actual) if actual == k => {
                    V::fetch_add(&self.values[slot], v);
                    return Ok(slot);
                }
                Err(_) => {}
            }
        }
        Err(LouvainError::HashtableFailed {
            key: k,
            capacity: self.p1,
        })
    }

    #[inline]
    fn add(&self, slot: usize, v: V, shared: bool) {
        let a = &self.values[slot];
        if shared {
            V::fetch_add(a, v);
        } else {
            V::store(a, V::from_f64(V::load(a).to_f64() + v.to_f64()));
        }
    }

    /// Value stored for `k`, zero when absent.
    pub fn get(&self, k: u32) -> f64 {
        for slot in self.probe_sequence(k) {
            match self.keys[slot].load(Ordering::Relaxed) {
                cur if cur == k => return V::load(&self.values[slot]).to_f64(),
                SENTINEL_ID => return 0.0,
                _ => {}
            }
        }
        0.0
    }

    /// Live entry with the largest value, lowest key on ties;
    /// `(SENTINEL_ID, 0)` when empty.
    pub fn max(&self) -> (u32, f64) {
        let mut best = (SENTINEL_ID, 0.0);
        for (k, v) in self.entries() {
            if best.0 == SENTINEL_ID || v > best.1 || (v == best.1 && k < best.0) {
                best = (k, v);
            }
        }
        best
    }

    /// Live entries in slot order.
    pub fn entries(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.keys.iter().zip(self.values).filter_map(|(k, v)| {
            let k = k.load(Ordering::Relaxed);
            (k != SENTINEL_ID).then(|| (k, V::load(v).to_f64()))
        })
    }

    pub(crate) fn slots(&self) -> usize {
        self.keys.len()
    }

    pub(crate) fn entry_at(&self, slot: usize) -> Option<(u32, f64)> {
        let k = self.keys[slot].load(Ordering::Relaxed);
        (k != SENTINEL_ID).then(|| (k, V::load(&self.values[slot]).to_f64()))
    }
}

//! Floating-point atomics built on integer compare-and-swap.

use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

#[derive(Debug, Default)]
#[repr(transparent)]
pub struct AtomicF64(AtomicU64);

impl AtomicF64 {
    pub fn new(v: f64) -> Self {
        Self(AtomicU64::new(v.to_bits()))
    }

    #[inline]
    pub fn load(&self) -> f64 {
        f64::from_bits(self.0.load(Ordering::Relaxed))
    }

    #[inline]
    pub fn store(&self, v: f64) {
        self.0.store(v.to_bits(), Ordering::Relaxed)
    }

    #[inline]
    pub fn fetch_add(&self, v: f64) -> f64 {
        let mut cur = self.0.load(Ordering::Relaxed);
        loop {
            let new = (f64::from_bits(cur) + v).to_bits();
            match self
                .0
                .compare_exchange_weak(cur, new, Ordering::AcqRel, Ordering::Relaxed)
            {
                Ok(old) => return f64::from_bits(old),
                Err(actual) => cur = actual,
            }
        }
    }
}

#[derive(Debug, Default)]
#[repr(transparent)]
pub struct AtomicF32(AtomicU32);

impl AtomicF32 {
    pub fn new(v: f32) -> Self {
        Self(AtomicU32::new(v.to_bits()))
    }

    #[inline]
    pub fn load(&self) -> f32 {
        f32::from_bits(self.0.load(Ordering::Relaxed))
    }

    #[inline]
    pub fn store(&self, v: f32) {
        self.0.store(v.to_bits(), Ordering::Relaxed)
    }

    #[inline]
    pub fn fetch_add(&self, v: f32) -> f32 {
        let mut cur = self.0.load(Ordering::Relaxed);
        loop {
            let new = (f32::from_bits(cur) + v).to_bits();
            match self
                .0
                .compare_exchange_weak(cur, new, Ordering::AcqRel, Ordering::Relaxed)
            {
                Ok(old) => return f32::from_bits(old),
                Err(actual) => cur = actual,
            }
        }
    }
}

/// Indexed read access shared by plain and atomic arrays, so scans can run
/// against either a frozen membership or the live one being updated.
pub trait ReadAt<T> {
    fn read(&self, i: usize) -> T;
}

impl ReadAt<u32> for [u32] {
    #[inline]
    fn read(&self, i: usize) -> u32 {
        self[i]
    }
}

impl ReadAt<u32> for [AtomicU32] {
    #[inline]
    fn read(&self, i: usize) -> u32 {
        self[i].load(Ordering::Relaxed)
    }
}

impl ReadAt<f64> for [f64] {
    #[inline]
    fn read(&self, i: usize) -> f64 {
        self[i]
    }
}

impl ReadAt<f64> for [AtomicF64] {
    #[inline]
    fn read(&self, i: usize) -> f64 {
        self[i].load()
    }
}

pub(crate) fn atomic_u32_vec(values: impl IntoIterator<Item = u32>) -> Vec<AtomicU32> {
    values.into_iter().map(AtomicU32::new).collect()
}

pub(crate) fn atomic_f64_vec(values: &[f64]) -> Vec<AtomicF64> {
    values.iter().map(|&v| AtomicF64::new(v)).collect()
}

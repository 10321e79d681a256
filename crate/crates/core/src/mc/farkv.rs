use crate::atomic::ReadAt;
use crate::graph::CsrGraph;
use crate::quality::delta_modularity;

/// Collision-free per-worker hashtable: a list of live keys plus a dense
/// value array indexed by key.
///
/// A zero value marks an absent key, so only positive weights may be added.
/// Each worker allocates its own instance; the key list, value array and the
/// instance itself are separate heap blocks so workers never share cache
/// lines through this structure.
#[derive(Debug)]
pub struct FarKv {
    keys: Vec<u32>,
    values: Box<[f64]>,
}

impl FarKv {
    pub fn new(capacity: usize) -> Box<Self> {
        Box::new(Self {
            keys: Vec::new(),
            values: vec![0.0; capacity].into_boxed_slice(),
        })
    }

    #[inline]
    pub fn add(&mut self, key: u32, w: f64) {
        debug_assert!(w > 0.0);
        let v = &mut self.values[key as usize];
        if *v == 0.0 {
            self.keys.push(key);
        }
        *v += w;
    }

    #[inline]
    pub fn get(&self, key: u32) -> f64 {
        self.values[key as usize]
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Live keys in insertion order.
    pub fn keys(&self) -> &[u32] {
        &self.keys
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.keys.iter().map(|&k| (k, self.values[k as usize]))
    }

    /// Zeroes only the listed slots.
    #[inline]
    pub fn clear(&mut self) {
        for &k in &self.keys {
            self.values[k as usize] = 0.0;
        }
        self.keys.clear();
    }
}

/// Accumulates the weight from `i` to each neighboring community into `h`.
/// Without `include_self`, the self-loop arcs of `i` are skipped. Zero-weight
/// arcs carry nothing and are skipped too.
#[inline]
pub fn scan_communities<L: ReadAt<u32> + ?Sized>(
    h: &mut FarKv,
    g: &CsrGraph,
    membership: &L,
    i: usize,
    include_self: bool,
) {
    let (edges, weights) = g.arcs(i);
    for (&j, &w) in edges.iter().zip(weights) {
        if (!include_self && j as usize == i) || w <= 0.0 {
            continue;
        }
        h.add(membership.read(j as usize), w as f64);
    }
}

/// Picks the linked community with the largest modularity gain for `i`,
/// lowest id on ties. Returns `(c_i, 0)` when no move has positive gain.
#[inline]
pub fn best_community<S: ReadAt<f64> + ?Sized>(
    h: &FarKv,
    c_i: u32,
    k_i: f64,
    sigma: &S,
    m: f64,
) -> (u32, f64) {
    let k_i_to_d = h.get(c_i);
    let sigma_d = sigma.read(c_i as usize);
    let mut best = (c_i, 0.0);
    for (c, k_i_to_c) in h.iter() {
        if c == c_i {
            continue;
        }
        let gain = delta_modularity(k_i_to_c, k_i_to_d, k_i, sigma.read(c as usize), sigma_d, m);
        if gain > best.1 || (gain == best.1 && gain > 0.0 && c < best.0) {
            best = (c, gain);
        }
    }
    best
}

use rayon::prelude::*;

use crate::error::LouvainError;
use crate::quality::Membership;

/// Maps community ids onto `[0, |Γ|)`, assigning new ids in ascending order
/// of the old ones. Returns the renumbered membership and `|Γ|`.
pub fn renumber_communities(c: &[u32]) -> (Membership, usize) {
    let mut out = c.to_vec();
    let count = renumber_in_place(&mut out);
    (Membership::from(out), count)
}

pub(crate) fn renumber_in_place(c: &mut [u32]) -> usize {
    let Some(max) = c.par_iter().copied().max() else { return 0 };
    let mut rank = vec![0u32; max as usize + 1];
    for &x in c.iter() {
        rank[x as usize] = 1;
    }
    let mut next = 0u32;
    for r in rank.iter_mut() {
        let present = *r;
        *r = next;
        next += present;
    }
    c.par_iter_mut().for_each(|x| *x = rank[*x as usize]);
    next as usize
}

/// Composes a top-level membership with the next level: `out[i] = next[c[i]]`.
pub fn lookup_dendrogram(c: &[u32], next: &[u32]) -> Result<Membership, LouvainError> {
    let mut out = c.to_vec();
    lookup_in_place(&mut out, next)?;
    Ok(Membership::from(out))
}

pub(crate) fn lookup_in_place(c: &mut [u32], next: &[u32]) -> Result<(), LouvainError> {
    if let Some(&bad) = c.par_iter().find_any(|&&x| x as usize >= next.len()) {
        return Err(LouvainError::Invariant(format!(
            "dendrogram lookup of community {bad} in a level of {} vertices",
            next.len()
        )));
    }
    c.par_iter_mut().for_each(|x| *x = next[*x as usize]);
    Ok(())
}

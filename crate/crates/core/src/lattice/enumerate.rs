use std::collections::BTreeSet;

use crate::error::LatticeError;

use super::{FiniteLattice, MonotoneFn};

/// Largest lattice for which [`monotone_functions`] enumerates.
pub const MAX_ENUMERATION: usize = 6;

/// Every lattice with at most `max` elements, one per isomorphism class.
///
/// Each class has a labelling where `0` is the bottom, `n-1` the top and the
/// order refines the index order, so only those labellings are generated.
pub fn all_lattices_up_to(max: usize) -> Result<Vec<FiniteLattice>, LatticeError> {
    if max > 7 {
        return Err(LatticeError::Input(format!("lattice enumeration is limited to 7 elements, got {max}")));
    }
    let mut out = Vec::new();
    for n in 1..=max {
        let middle: Vec<(usize, usize)> = (1..n.saturating_sub(1)).flat_map(|i| (i + 1..n - 1).map(move |j| (i, j))).collect();
        let mut seen = BTreeSet::new();
        for mask in 0u64..(1u64 << middle.len()) {
            let mut leq = vec![vec![false; n]; n];
            for i in 0..n {
                leq[i][i] = true;
                leq[0][i] = true;
                leq[i][n - 1] = true;
            }
            for (k, &(i, j)) in middle.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    leq[i][j] = true;
                }
            }
            let names = (0..n).map(|k| k.to_string()).collect();
            let Ok(lat) = FiniteLattice::from_order(names, leq) else { continue };
            if seen.insert(canonical(&lat)) {
                out.push(lat);
            }
        }
    }
    Ok(out)
}

fn canonical(lat: &FiniteLattice) -> Vec<bool> {
    let n = lat.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<bool>> = None;
    permute(&mut perm, 0, &mut |p| {
        let code: Vec<bool> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| lat.leq(p[a], p[b])).collect();
        if best.as_ref().is_none_or(|b| code < *b) {
            best = Some(code);
        }
    });
    best.unwrap_or_default()
}

fn permute(p: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

/// All monotone endofunctions of `lat`, by backtracking along a linear extension.
pub fn monotone_functions(lat: &FiniteLattice) -> Result<Vec<MonotoneFn>, LatticeError> {
    if lat.len() > MAX_ENUMERATION {
        return Err(LatticeError::Input(format!(
            "enumerating monotone functions is limited to {MAX_ENUMERATION} elements, got {}",
            lat.len()
        )));
    }
    let mut order: Vec<usize> = lat.elements().collect();
    order.sort_by_key(|&x| lat.elements().filter(|&y| lat.leq(y, x)).count());
    let mut table = vec![usize::MAX; lat.len()];
    let mut out = Vec::new();
    extend(lat, &order, 0, &mut table, &mut out);
    Ok(out)
}

fn extend(lat: &FiniteLattice, order: &[usize], k: usize, table: &mut Vec<usize>, out: &mut Vec<MonotoneFn>) {
    if k == order.len() {
        out.push(MonotoneFn { table: table.clone() });
        return;
    }
    let x = order[k];
    for v in lat.elements() {
        if order[..k].iter().all(|&y| !lat.leq(y, x) || lat.leq(table[y], v)) {
            table[x] = v;
            extend(lat, order, k + 1, table, out);
        }
    }
    table[x] = usize::MAX;
}

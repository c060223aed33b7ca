use std::cell::RefCell;
use std::collections::HashMap;

use num_bigint::BigInt;

use crate::budget::Budget;
use crate::error::{check_budget, Result};
use crate::numeric::Rational;

thread_local! {
    static MEMO: RefCell<HashMap<Vec<u32>, i64>> = RefCell::new(HashMap::new());
}

/// `Σ (-1)^{|F|}` over connected spanning edge sets `F` of the graph with
/// neighbor bitmasks `adj`.
///
/// Grouping all edge sets by the component containing the lowest vertex
/// gives `g(S) = Σ_{T ⊆ S, min S ∈ T} c(T) g(S \ T)`, where `g(S)` is the
/// signed count of all edge sets inside `S` (1 if `S` is independent, else
/// 0). Solving for `c` costs `O(3^m)`.
pub fn connected_spanning_signed_count(adj: &[u32]) -> i64 {
    let m = adj.len();
    if m == 0 {
        return 0;
    }
    if let Some(c) = MEMO.with(|memo| memo.borrow().get(adj).copied()) {
        return c;
    }
    let full = (1usize << m) - 1;
    let mut independent = vec![true; 1 << m];
    for s in 1..=full {
        let low = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        independent[s] = independent[rest] && adj[low] as usize & rest == 0;
    }
    let mut c = vec![0i64; 1 << m];
    for s in 1..=full {
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        let mut value = i64::from(independent[s]);
        // Proper subsets T of s containing the lowest vertex.
        let mut sub = rest;
        loop {
            let t = sub | low;
            if t != s && independent[s ^ t] {
                value -= c[t];
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        c[s] = value;
    }
    let result = c[full];
    MEMO.with(|memo| memo.borrow_mut().insert(adj.to_vec(), result));
    result
}

fn factorial(m: usize) -> BigInt {
    (1..=m).fold(BigInt::from(1), |acc, i| acc * i)
}

/// The Ursell function `φ(H) = (1/|V|!) Σ_{F spanning, connected} (-1)^{|F|}`.
pub fn ursell(adj: &[u32], budget: &Budget) -> Result<Rational> {
    check_budget("Ursell graph vertices", adj.len() as u64, budget.ursell_vertices as u64)?;
    Ok(Rational::new(
        BigInt::from(connected_spanning_signed_count(adj)),
        factorial(adj.len()),
    ))
}

/// The Ursell function by literal enumeration of all edge subsets.
pub fn ursell_by_edge_subsets(adj: &[u32], max_edges: usize) -> Result<Rational> {
    let m = adj.len();
    let edges: Vec<(usize, usize)> = (0..m)
        .flat_map(|u| (u + 1..m).filter(move |&v| adj[u] >> v & 1 == 1).map(move |v| (u, v)))
        .collect();
    check_budget("Ursell graph edges", edges.len() as u64, max_edges as u64)?;
    let mut total = 0i64;
    for f in 0u64..1 << edges.len() {
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            parent[x] = r;
            r
        }
        let mut components = m;
        for (i, &(u, v)) in edges.iter().enumerate() {
            if f >> i & 1 == 1 {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru != rv {
                    parent[ru] = rv;
                    components -= 1;
                }
            }
        }
        if components == 1 {
            total += if f.count_ones() % 2 == 0 { 1 } else { -1 };
        }
    }
    Ok(Rational::new(BigInt::from(total), factorial(m)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn complete(m: usize) -> Vec<u32> {
        let all = (1u32 << m) - 1;
        (0..m).map(|v| all & !(1 << v)).collect()
    }

    #[test]
    fn spot_values() {
        let b = Budget::default();
        assert_eq!(ursell(&[0], &b).unwrap(), r(1, 1));
        assert_eq!(ursell(&[0b10, 0b01], &b).unwrap(), r(-1, 2));
        assert_eq!(ursell(&complete(3), &b).unwrap(), r(1, 3));
        assert_eq!(ursell(&[0b010, 0b101, 0b010], &b).unwrap(), r(1, 6));
        // Disconnected graphs have no connected spanning subgraph.
        assert_eq!(ursell(&[0, 0], &b).unwrap(), r(0, 1));
    }

    #[test]
    fn complete_graphs() {
        let b = Budget::default();
        // c(K_m) = (-1)^{m-1} (m-1)!, so φ(K_m) = (-1)^{m-1}/m.
        for m in 1..=9 {
            let sign = if m % 2 == 1 { 1 } else { -1 };
            assert_eq!(ursell(&complete(m), &b).unwrap(), r(sign, m as i64));
        }
        assert!(ursell(&complete(10), &b).unwrap_err().is_budget());
    }

    #[test]
    fn recurrence_matches_edge_enumeration() {
        // Every graph on 4 labelled vertices.
        let pairs: Vec<(usize, usize)> = (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v))).collect();
        for mask in 0u32..1 << pairs.len() {
            let mut adj = vec![0u32; 4];
            for (i, &(u, v)) in pairs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    adj[u] |= 1 << v;
                    adj[v] |= 1 << u;
                }
            }
            assert_eq!(
                ursell(&adj, &Budget::default()).unwrap(),
                ursell_by_edge_subsets(&adj, 20).unwrap()
            );
        }
    }
}

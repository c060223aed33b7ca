use std::fs;

use super::{two_color, BipartiteGraph, Side};
use crate::error::{Error, Result};

/// Builds a graph from a generator spec:
///
/// * `hypercube:d`: `Q^d`, vertices numbered by coordinate vector with the
///   first coordinate most significant, sides by coordinate parity;
/// * `torus:m^t`: `Z_m^t` for even `m` (for `m = 2` the doubled edges
///   collapse and the result is `Q^t`);
/// * `middle-layer:d`: the middle two layers of `Q^d`, `d` odd;
/// * `cycle:m`: the even cycle `C_m`, with vertex `i` odd when `i` is even
///   (labels `1..=m` in the usual numbering);
/// * `cartesian:<spec>x<spec>`: Cartesian product of two generated graphs;
/// * `file:<path>`: an edge-list file.
pub fn generate_graph(spec: &str) -> Result<BipartiteGraph> {
    let spec = spec.trim();
    let (kind, arg) = spec
        .split_once(':')
        .ok_or_else(|| Error::spec(spec, "expected `<family>:<argument>`"))?;
    match kind {
        "hypercube" => hypercube(parse_count(spec, arg)?).map_err(|e| rename(e, spec)),
        "torus" => {
            let (m, t) = arg
                .split_once('^')
                .ok_or_else(|| Error::spec(spec, "torus spec is `torus:m^t`"))?;
            torus(parse_count(spec, m)?, parse_count(spec, t)?).map_err(|e| rename(e, spec))
        }
        "middle-layer" => middle_layer(parse_count(spec, arg)?).map_err(|e| rename(e, spec)),
        "cycle" => cycle(parse_count(spec, arg)?).map_err(|e| rename(e, spec)),
        "cartesian" => {
            // Factor specs may themselves contain `x`; take the first split
            // where both halves parse.
            for (i, _) in arg.match_indices('x') {
                let (left, right) = (&arg[..i], &arg[i + 1..]);
                if let (Ok(a), Ok(b)) = (generate_graph(left), generate_graph(right)) {
                    return cartesian(&a, &b, spec);
                }
            }
            Err(Error::spec(spec, "expected `cartesian:<spec>x<spec>` with two valid factors"))
        }
        "file" => {
            let text = fs::read_to_string(arg)?;
            parse_edge_list(&text, spec)
        }
        _ => Err(Error::spec(spec, format!("unknown graph family `{kind}`"))),
    }
}

fn parse_count(spec: &str, text: &str) -> Result<usize> {
    text.trim()
        .parse::<usize>()
        .map_err(|_| Error::spec(spec, format!("`{text}` is not a non-negative integer")))
}

fn rename(err: Error, spec: &str) -> Error {
    match err {
        Error::InvalidGraph(reason) => Error::spec(spec, reason),
        other => other,
    }
}

fn hypercube(d: usize) -> Result<BipartiteGraph> {
    if d == 0 || d > 30 {
        return Err(Error::InvalidGraph("hypercube dimension must be in 1..=30".into()));
    }
    let n = 1usize << d;
    let adjacency = (0..n)
        .map(|v| (0..d).map(|i| v ^ (1 << i)).collect())
        .collect();
    let sides = (0..n).map(|v| parity_side(v.count_ones() as usize)).collect();
    let top = 1 << (d - 1);
    let flip = (0..n).map(|v| v ^ top).collect();
    BipartiteGraph::new(format!("hypercube:{d}"), adjacency, sides)?.with_flip(flip)
}

fn parity_side(sum: usize) -> Side {
    if sum % 2 == 0 {
        Side::Even
    } else {
        Side::Odd
    }
}

fn torus(m: usize, t: usize) -> Result<BipartiteGraph> {
    if m < 2 || m % 2 != 0 {
        return Err(Error::InvalidGraph("torus side length must be even and at least 2".into()));
    }
    if t == 0 {
        return Err(Error::InvalidGraph("torus dimension must be positive".into()));
    }
    let n = m
        .checked_pow(t as u32)
        .filter(|&n| n <= 1 << 26)
        .ok_or_else(|| Error::InvalidGraph("torus is too large".into()))?;
    // Coordinates with the first one most significant.
    let stride = |i: usize| m.pow((t - 1 - i) as u32);
    let coord = |v: usize, i: usize| (v / stride(i)) % m;
    let mut adjacency = Vec::with_capacity(n);
    let mut sides = Vec::with_capacity(n);
    for v in 0..n {
        let mut nbrs = Vec::with_capacity(2 * t);
        let mut sum = 0;
        for i in 0..t {
            let x = coord(v, i);
            sum += x;
            let up = v - x * stride(i) + ((x + 1) % m) * stride(i);
            let down = v - x * stride(i) + ((x + m - 1) % m) * stride(i);
            nbrs.push(up);
            if down != up {
                nbrs.push(down);
            }
        }
        adjacency.push(nbrs);
        sides.push(parity_side(sum));
    }
    let flip = (0..n)
        .map(|v| {
            let x = coord(v, 0);
            v - x * stride(0) + ((x + 1) % m) * stride(0)
        })
        .collect();
    BipartiteGraph::new(format!("torus:{m}^{t}"), adjacency, sides)?.with_flip(flip)
}

fn middle_layer(d: usize) -> Result<BipartiteGraph> {
    if d % 2 == 0 || d > 21 {
        return Err(Error::InvalidGraph("middle-layer dimension must be odd and at most 21".into()));
    }
    let k = d / 2;
    // Coordinate vectors read with the first coordinate most significant,
    // so increasing masks are in lexicographic order.
    let masks: Vec<u32> = (0u32..1 << d)
        .filter(|m| {
            let ones = m.count_ones() as usize;
            ones == k || ones == k + 1
        })
        .collect();
    let index: std::collections::HashMap<u32, usize> =
        masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let full = (1u32 << d) - 1;
    // Flipping one coordinate moves between adjacent layers; keep the moves
    // that stay inside the middle two.
    let adjacency = masks
        .iter()
        .map(|&m| {
            (0..d)
                .filter_map(|i| index.get(&(m ^ (1 << i))).copied())
                .collect()
        })
        .collect();
    let sides = masks.iter().map(|m| parity_side(m.count_ones() as usize)).collect();
    let flip = masks.iter().map(|&m| index[&(!m & full)]).collect();
    BipartiteGraph::new(format!("middle-layer:{d}"), adjacency, sides)?.with_flip(flip)
}

fn cycle(m: usize) -> Result<BipartiteGraph> {
    if m < 4 || m % 2 != 0 {
        return Err(Error::InvalidGraph("cycle length must be even and at least 4".into()));
    }
    let adjacency = (0..m).map(|i| vec![(i + 1) % m, (i + m - 1) % m]).collect();
    let sides = (0..m)
        .map(|i| if i % 2 == 0 { Side::Odd } else { Side::Even })
        .collect();
    let flip = (0..m).map(|i| (i + 1) % m).collect();
    BipartiteGraph::new(format!("cycle:{m}"), adjacency, sides)?.with_flip(flip)
}

fn cartesian(a: &BipartiteGraph, b: &BipartiteGraph, spec: &str) -> Result<BipartiteGraph> {
    let (na, nb) = (a.n(), b.n());
    let mut adjacency = Vec::with_capacity(na * nb);
    let mut sides = Vec::with_capacity(na * nb);
    for x in 0..na {
        for y in 0..nb {
            let mut nbrs: Vec<usize> = a.neighbors(x).iter().map(|&u| u * nb + y).collect();
            nbrs.extend(b.neighbors(y).iter().map(|&w| x * nb + w));
            adjacency.push(nbrs);
            sides.push(if a.side_of(x) == b.side_of(y) {
                Side::Even
            } else {
                Side::Odd
            });
        }
    }
    let flip: Option<Vec<usize>> = match (a.flip_automorphism(), b.flip_automorphism()) {
        (Some(fa), _) => Some((0..na * nb).map(|v| fa[v / nb] * nb + v % nb).collect()),
        (None, Some(fb)) => Some((0..na * nb).map(|v| (v / nb) * nb + fb[v % nb]).collect()),
        (None, None) => None,
    };
    let g = BipartiteGraph::new(spec.to_string(), adjacency, sides).map_err(|e| rename(e, spec))?;
    match flip {
        Some(f) => g.with_flip(f),
        None => Ok(g),
    }
}

/// Parses the edge-list format: header `n d`, then `u v` per edge, 0-indexed.
/// Blank lines and `#` comments are ignored. Sides come from a 2-coloring.
pub fn parse_edge_list(text: &str, name: &str) -> Result<BipartiteGraph> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .enumerate()
        .filter(|(_, l)| !l.is_empty());
    let bad = |line: usize, why: &str| Error::InvalidGraph(format!("line {}: {why}", line + 1));
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::InvalidGraph("empty graph file".into()))?;
    let nums: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| bad(hline, "header must be `n d`")))
        .collect::<Result<_>>()?;
    let [n, d] = nums[..] else {
        return Err(bad(hline, "header must be `n d`"));
    };
    let mut adjacency = vec![Vec::new(); n];
    let mut edges = 0;
    for (i, line) in lines {
        let pair: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(i, "edge must be `u v`")))
            .collect::<Result<_>>()?;
        let [u, v] = pair[..] else {
            return Err(bad(i, "edge must be `u v`"));
        };
        if u >= n || v >= n {
            return Err(bad(i, "vertex index out of range"));
        }
        adjacency[u].push(v);
        adjacency[v].push(u);
        edges += 1;
    }
    if edges * 2 != n * d {
        return Err(Error::InvalidGraph(format!(
            "header promises a {d}-regular graph on {n} vertices but the file has {edges} edges"
        )));
    }
    let sides = two_color(&adjacency)?;
    let g = BipartiteGraph::new(name.to_string(), adjacency, sides)?;
    if g.degree() != d {
        return Err(Error::InvalidGraph(format!(
            "header degree {d} does not match actual degree {}",
            g.degree()
        )));
    }
    Ok(g)
}

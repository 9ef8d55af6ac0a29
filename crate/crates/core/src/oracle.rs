//! Reference implementations that share nothing with the fast paths
//! beyond the k-freeness predicates.

use crate::error::{Error, Result};
use crate::forest::{Forest, Selection};

pub const EXHAUSTIVE_RK_MAX_N: u64 = 20;
pub const PSEUDOFOREST_MAX_N: u64 = 1_000_000;
pub const EXHAUSTIVE_TILDE_MAX_N: u64 = 18;
pub const EXHAUSTIVE_SELECTION_MAX_NODES: usize = 16;

/// Largest k-free subset of `Z/nZ` by enumerating all `2^n` subsets.
pub fn oracle_rk_exhaustive(k: u64, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Zero);
    }
    if n > EXHAUSTIVE_RK_MAX_N {
        return Err(Error::TooLarge {
            what: "n",
            value: n,
            limit: EXHAUSTIVE_RK_MAX_N,
        });
    }
    let n = n as usize;
    let image_bit: Vec<u32> = (0..n)
        .map(|x| 1u32 << ((k as u128 * x as u128) % n as u128))
        .collect();
    // image[mask] = bitmask of {kx : x in mask}, built from mask minus its lowest bit
    let mut image = vec![0u32; 1 << n];
    let mut best = 0u32;
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        image[mask] = image[mask & (mask - 1)] | image_bit[low];
        if image[mask] & mask as u32 == 0 {
            best = best.max(mask.count_ones());
        }
    }
    Ok(u64::from(best))
}

/// Largest component size accepted by [`oracle_rk_exhaustive_components`].
pub const EXHAUSTIVE_COMPONENT_MAX: usize = 24;

/// Exhaustive search split over the connected components of the conflict
/// graph `{x, kx}`: the constraint never links two components, so the
/// optimum is the sum of per-component optima, each found by enumerating
/// every subset of the component.
pub fn oracle_rk_exhaustive_components(k: u64, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::Zero);
    }
    if n > PSEUDOFOREST_MAX_N {
        return Err(Error::TooLarge {
            what: "n",
            value: n,
            limit: PSEUDOFOREST_MAX_N,
        });
    }
    let size = n as usize;
    let succ = |x: usize| ((k as u128 * x as u128) % n as u128) as usize;
    // union-find over x ~ kx
    let mut parent: Vec<usize> = (0..size).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for x in 0..size {
        let (a, b) = (find(&mut parent, x), find(&mut parent, succ(x)));
        parent[a] = b;
    }
    let mut components: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for x in 0..size {
        let r = find(&mut parent, x);
        components.entry(r).or_default().push(x);
    }
    let mut total = 0u64;
    for members in components.values() {
        if members.len() > EXHAUSTIVE_COMPONENT_MAX {
            return Err(Error::TooLarge {
                what: "component size",
                value: members.len() as u64,
                limit: EXHAUSTIVE_COMPONENT_MAX as u64,
            });
        }
        let local = |x: usize| members.binary_search(&x).expect("same component");
        let image_bit: Vec<u32> = members.iter().map(|&x| 1u32 << local(succ(x))).collect();
        let mut image = vec![0u32; 1 << members.len()];
        let mut best = 0u32;
        for mask in 1usize..(1 << members.len()) {
            let low = mask.trailing_zeros() as usize;
            image[mask] = image[mask & (mask - 1)] | image_bit[low];
            if image[mask] & mask as u32 == 0 {
                best = best.max(mask.count_ones());
            }
        }
        total += u64::from(best);
    }
    Ok(total)
}

/// The functional graph `x ↦ kx mod n`: every vertex has out-degree one,
/// every component one cycle.
#[derive(Debug, Clone)]
pub struct PseudoforestGraph {
    pub n: u64,
    pub k: u64,
    successor: Vec<u32>,
    on_cycle: Vec<bool>,
    /// Vertices off the cycles in leaf-first order.
    peel_order: Vec<u32>,
}

impl PseudoforestGraph {
    pub fn new(k: u64, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Zero);
        }
        if n > PSEUDOFOREST_MAX_N {
            return Err(Error::TooLarge {
                what: "n",
                value: n,
                limit: PSEUDOFOREST_MAX_N,
            });
        }
        let size = n as usize;
        let successor: Vec<u32> = (0..n).map(|x| ((k % n) * x % n) as u32).collect();
        let mut indegree = vec![0u32; size];
        for &s in &successor {
            indegree[s as usize] += 1;
        }
        let mut peel_order: Vec<u32> = (0..size as u32)
            .filter(|&x| indegree[x as usize] == 0)
            .collect();
        let mut head = 0;
        while head < peel_order.len() {
            let s = successor[peel_order[head] as usize] as usize;
            indegree[s] -= 1;
            if indegree[s] == 0 {
                peel_order.push(s as u32);
            }
            head += 1;
        }
        let mut on_cycle = vec![true; size];
        for &x in &peel_order {
            on_cycle[x as usize] = false;
        }
        Ok(Self {
            n,
            k,
            successor,
            on_cycle,
            peel_order,
        })
    }

    pub fn successor(&self, x: u64) -> u64 {
        u64::from(self.successor[x as usize])
    }

    /// Cycles, each starting at its smallest vertex, ordered by that vertex.
    pub fn cycles(&self) -> Vec<Vec<u64>> {
        let mut seen = vec![false; self.successor.len()];
        let mut out = Vec::new();
        for x in 0..self.successor.len() {
            if !self.on_cycle[x] || seen[x] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut y = x;
            while !seen[y] {
                seen[y] = true;
                cycle.push(y as u64);
                y = self.successor[y] as usize;
            }
            out.push(cycle);
        }
        out
    }

    /// Vertices with `kx = x`; they can never be in a k-free set.
    pub fn forbidden_count(&self) -> u64 {
        self.successor
            .iter()
            .enumerate()
            .filter(|&(x, &s)| x == s as usize)
            .count() as u64
    }

    /// Maximum independent set of the conflict graph with edges `{x, kx}`
    /// and fixed points excluded: tree DP into each cycle, then both
    /// choices for one cycle vertex.
    pub fn max_independent_set(&self) -> u64 {
        const NEG: i64 = i64::MIN / 4;
        let size = self.successor.len();
        let mut excl = vec![0i64; size];
        let mut incl = vec![1i64; size];
        for x in 0..size {
            if self.successor[x] as usize == x {
                incl[x] = NEG;
            }
        }
        for &x in &self.peel_order {
            let x = x as usize;
            let p = self.successor[x] as usize;
            excl[p] += excl[x].max(incl[x]);
            incl[p] += excl[x];
        }

        let mut total = 0i64;
        for cycle in self.cycles() {
            let c: Vec<usize> = cycle.iter().map(|&v| v as usize).collect();
            total += match c.len() {
                1 => excl[c[0]].max(incl[c[0]]),
                2 => (excl[c[0]] + excl[c[1]])
                    .max(incl[c[0]] + excl[c[1]])
                    .max(excl[c[0]] + incl[c[1]]),
                _ => {
                    // path DP over c[1..], with c[0] either out or in
                    let path = |first_in: bool| -> i64 {
                        let (mut out, mut inn) =
                            (excl[c[1]], if first_in { NEG } else { incl[c[1]] });
                        for (idx, &v) in c.iter().enumerate().skip(2) {
                            let last = idx == c.len() - 1;
                            let new_in = if last && first_in { NEG } else { out + incl[v] };
                            let new_out = out.max(inn) + excl[v];
                            (out, inn) = (new_out, new_in);
                        }
                        let tail = out.max(inn);
                        if first_in {
                            tail + incl[c[0]]
                        } else {
                            tail + excl[c[0]]
                        }
                    };
                    path(false).max(path(true))
                }
            };
        }
        total as u64
    }
}

/// `R_k(n)` as a maximum independent set on the functional graph.
pub fn oracle_rk_pseudoforest(k: u64, n: u64) -> Result<u64> {
    Ok(PseudoforestGraph::new(k, n)?.max_independent_set())
}

/// Smallest inclusion-maximal k-free subset of `[1, n]`, by enumerating
/// all `2^n` subsets.
pub fn oracle_tilde_exhaustive(k: u64, n: u64) -> Result<u64> {
    if k < 2 {
        return Err(Error::KTooSmall { k, min: 2 });
    }
    if n > EXHAUSTIVE_TILDE_MAX_N {
        return Err(Error::TooLarge {
            what: "n",
            value: n,
            limit: EXHAUSTIVE_TILDE_MAX_N,
        });
    }
    if n == 0 {
        return Ok(0);
    }
    let n = n as usize;
    let full = (1u32 << n) - 1;
    // bit x-1 stands for x
    let up: Vec<u32> = (1..=n)
        .map(|x| {
            if x * (k as usize) <= n {
                1 << (x * k as usize - 1)
            } else {
                0
            }
        })
        .collect();
    let down: Vec<u32> = (1..=n)
        .map(|x| {
            if x % k as usize == 0 {
                1 << (x / k as usize - 1)
            } else {
                0
            }
        })
        .collect();
    let mut times = vec![0u32; 1 << n];
    let mut over = vec![0u32; 1 << n];
    let mut best = u32::MAX;
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        times[mask] = times[rest] | up[low];
        over[mask] = over[rest] | down[low];
        let m = mask as u32;
        if times[mask] & m != 0 {
            continue;
        }
        let blocked = times[mask] | over[mask];
        if (full & !m) & !blocked == 0 {
            best = best.min(m.count_ones());
        }
    }
    Ok(u64::from(best))
}

/// Outcome of the exhaustive selection search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExhaustiveSelection {
    pub selection: Selection,
    pub unique: bool,
}

/// The valuation-maximizing vertex set with no parent-child pair and no
/// zero-valued vertex, over all subsets of the forest.
pub fn oracle_selection_exhaustive(forest: &Forest) -> Result<ExhaustiveSelection> {
    let nodes = forest.nodes();
    if nodes.len() > EXHAUSTIVE_SELECTION_MAX_NODES {
        return Err(Error::TooLarge {
            what: "forest nodes",
            value: nodes.len() as u64,
            limit: EXHAUSTIVE_SELECTION_MAX_NODES as u64,
        });
    }
    let position = |m: u64| {
        nodes
            .iter()
            .position(|node| node.m == m)
            .expect("node of forest")
    };
    let parent_bit: Vec<u32> = nodes
        .iter()
        .map(|node| node.parent.map_or(0, |p| 1u32 << position(p)))
        .collect();
    let zero_mask: u32 = nodes
        .iter()
        .enumerate()
        .filter(|(_, node)| node.alpha == 0)
        .map(|(i, _)| 1u32 << i)
        .sum();

    let mut best: Option<(u64, u32)> = None;
    let mut ties = 0usize;
    for mask in 0u32..(1u32 << nodes.len()) {
        if mask & zero_mask != 0 {
            continue;
        }
        let valid = (0..nodes.len()).all(|i| mask & (1 << i) == 0 || mask & parent_bit[i] == 0);
        if !valid {
            continue;
        }
        let total: u64 = (0..nodes.len())
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| nodes[i].alpha)
            .sum();
        match best {
            Some((b, _)) if total < b => {}
            Some((b, _)) if total == b => ties += 1,
            _ => {
                best = Some((total, mask));
                ties = 0;
            }
        }
    }
    let (total, mask) = best.expect("the empty set is always valid");
    let chosen = (0..nodes.len())
        .filter(|&i| mask & (1 << i) != 0)
        .map(|i| nodes[i].m)
        .collect();
    Ok(ExhaustiveSelection {
        selection: Selection { chosen, total },
        unique: ties == 0,
    })
}

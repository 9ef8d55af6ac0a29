//! The divisor forest of `(k, n)` and the bottom-up greedy selection that
//! yields `R_k(n)` together with a witness set.
//!
//! Vertices are the divisors `m` of `n`; the parent of `m` is `k ⋆ m`, the
//! divisor whose stratum is the image of `A_m` under multiplication by `k`.
//! Roots are the strata fixed by that map. A non-root vertex is worth its
//! whole stratum, `φ(n/m)`; a root is worth the largest k-free subset of
//! its stratum, which alternates along each cycle.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::arith;
use crate::closed_form::{Method, RkValue};
use crate::error::{Error, Result};
use crate::strata::{self, KFreeSet, ModulusContext};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorNode {
    pub m: u64,
    /// Exponents of `m`, aligned with the primes of `n`.
    pub exponents: Vec<u32>,
    /// Roots have level 1.
    pub level: u32,
    pub parent: Option<u64>,
    /// Ascending.
    pub children: Vec<u64>,
    pub alpha: u64,
    pub is_root: bool,
    pub is_leaf: bool,
    /// Index of the tree (into [`Forest::roots`]) containing this node.
    pub tree: usize,
}

#[derive(Debug, Clone)]
pub struct Forest {
    ctx: ModulusContext,
    nodes: Vec<DivisorNode>,
    index: HashMap<u64, usize>,
    roots: Vec<u64>,
}

impl Forest {
    pub fn ctx(&self) -> &ModulusContext {
        &self.ctx
    }

    /// Nodes ascending by divisor.
    pub fn nodes(&self) -> &[DivisorNode] {
        &self.nodes
    }

    pub fn node(&self, m: u64) -> Option<&DivisorNode> {
        self.index.get(&m).map(|&i| &self.nodes[i])
    }

    /// Roots ascending; tree `t` is rooted at `roots()[t]`.
    pub fn roots(&self) -> &[u64] {
        &self.roots
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes of tree `t`, ascending.
    pub fn tree_nodes(&self, t: usize) -> impl Iterator<Item = &DivisorNode> {
        self.nodes.iter().filter(move |node| node.tree == t)
    }
}

/// A set of forest vertices and its total valuation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Selection {
    /// Ascending.
    pub chosen: Vec<u64>,
    pub total: u64,
}

impl Selection {
    pub fn contains(&self, m: u64) -> bool {
        self.chosen.binary_search(&m).is_ok()
    }
}

/// Largest k-free subset size of the root stratum `A_m`:
/// `φ(d)/l · (l - l mod 2)/2` with `d = n/m` and `l` the order of `k` mod `d`.
pub fn root_valuation(m: u64, ctx: &ModulusContext) -> Result<u64> {
    let exps = ctx.exponents(m)?;
    if !ctx.is_root_exponents(&exps) {
        return Err(Error::NotRoot { m });
    }
    let cofactor = ctx.cofactor_factorization(&exps);
    let d = ctx.n() / m;
    let phi = arith::euler_phi(&cofactor)?;
    let l = arith::multiplicative_order_factored(ctx.k() % d, d, &cofactor)?;
    if phi % l != 0 {
        return Err(Error::NotIntegral("root valuation"));
    }
    Ok(phi / l * ((l - (l & 1)) / 2))
}

pub fn build_forest(ctx: &ModulusContext) -> Result<Forest> {
    let divisors = ctx.divisor_exponents();
    let index: HashMap<u64, usize> = divisors
        .iter()
        .enumerate()
        .map(|(i, (m, _))| (*m, i))
        .collect();

    let mut nodes = Vec::with_capacity(divisors.len());
    for (m, exps) in &divisors {
        let parent_value = ctx.value_of(&ctx.star_exponents(exps, 1));
        let is_root = parent_value == *m;
        // level - 1 = min j with j·k_i >= n_i - m_i for every shared prime
        let depth = exps
            .iter()
            .enumerate()
            .filter_map(|(i, &e)| ctx.shared_at(i).map(|sp| (sp.n_exp - e).div_ceil(sp.k_exp)))
            .max()
            .unwrap_or(0);
        let alpha = if is_root {
            root_valuation(*m, ctx)?
        } else {
            arith::euler_phi(&ctx.cofactor_factorization(exps))?
        };
        nodes.push(DivisorNode {
            m: *m,
            exponents: exps.clone(),
            level: depth + 1,
            parent: (!is_root).then_some(parent_value),
            children: Vec::new(),
            alpha,
            is_root,
            is_leaf: false,
            tree: 0,
        });
    }

    for i in 0..nodes.len() {
        if let Some(p) = nodes[i].parent {
            let m = nodes[i].m;
            nodes[index[&p]].children.push(m);
        }
    }
    let roots: Vec<u64> = nodes.iter().filter(|n| n.is_root).map(|n| n.m).collect();
    let root_tree: HashMap<u64, usize> = roots.iter().enumerate().map(|(t, &r)| (r, t)).collect();
    // parents are larger divisors, so a descending pass sees them first
    for i in (0..nodes.len()).rev() {
        nodes[i].is_leaf = nodes[i].children.is_empty();
        nodes[i].tree = match nodes[i].parent {
            Some(p) => nodes[index[&p]].tree,
            None => root_tree[&nodes[i].m],
        };
    }

    Ok(Forest {
        ctx: ctx.clone(),
        nodes,
        index,
        roots,
    })
}

/// Bottom-up greedy selection, tree by tree: from the deepest level up, a
/// vertex is taken iff its valuation is nonzero and none of its children
/// was taken.
pub fn select_optimal(forest: &Forest) -> Result<Selection> {
    let mut taken = vec![false; forest.nodes.len()];
    let mut trees: Vec<Vec<usize>> = vec![Vec::new(); forest.roots.len()];
    for (i, node) in forest.nodes.iter().enumerate() {
        trees[node.tree].push(i);
    }
    for mut members in trees {
        members.sort_by_key(|&i| std::cmp::Reverse(forest.nodes[i].level));
        for i in members {
            let node = &forest.nodes[i];
            let child_taken = node.children.iter().any(|c| taken[forest.index[c]]);
            taken[i] = node.alpha != 0 && !child_taken;
        }
    }
    let mut selection = Selection::default();
    for (node, _) in forest.nodes.iter().zip(&taken).filter(|(_, &t)| t) {
        selection.chosen.push(node.m);
        selection.total = selection
            .total
            .checked_add(node.alpha)
            .ok_or(Error::Overflow("selection total"))?;
    }
    Ok(selection)
}

/// `R_k(n)` through the divisor forest. `k ≡ 0 (mod n)` is answered
/// directly: every residue maps to 0, so all nonzero residues can be kept.
pub fn rk_general(ctx: &ModulusContext) -> Result<RkValue> {
    let value = if ctx.k() == 0 {
        ctx.n() - 1
    } else {
        select_optimal(&build_forest(ctx)?)?.total
    };
    Ok(RkValue::new(value, Method::Forest))
}

/// A k-free set of maximum size: whole strata for the selected non-roots,
/// and every other cycle position (never both ends) in selected roots.
pub fn construct_max_kfree(ctx: &ModulusContext) -> Result<KFreeSet> {
    if ctx.k() == 0 {
        return Ok(KFreeSet::new(ctx.k(), ctx.n(), (1..ctx.n()).collect()));
    }
    let forest = build_forest(ctx)?;
    let selection = select_optimal(&forest)?;
    let mut elements = Vec::with_capacity(usize::try_from(selection.total).unwrap_or(0));
    for &m in &selection.chosen {
        let node = forest.node(m).expect("selected node exists");
        if node.is_root {
            for cycle in strata::root_stratum_cycles(m, ctx)? {
                let picks = cycle.len() / 2;
                elements.extend(cycle.iter().step_by(2).take(picks));
            }
        } else {
            elements.extend(strata::stratum_elements(m, ctx)?);
        }
    }
    Ok(KFreeSet::new(ctx.k(), ctx.n(), elements))
}

fn node_label(forest: &Forest, node: &DivisorNode) -> String {
    let f = arith::Factorization::from_pairs(
        forest
            .ctx
            .n_factorization()
            .primes()
            .zip(&node.exponents)
            .map(|(p, &e)| (p, e)),
    );
    format!("{f} (α={})", node.alpha)
}

/// Graphviz rendering: one cluster per tree, edges parent → child, nodes
/// ascending by divisor. Vertices in `selection` are drawn boxed.
pub fn forest_to_dot(forest: &Forest, selection: Option<&Selection>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph forest {{");
    let _ = writeln!(
        out,
        "  label=\"k={} n={}\";",
        forest.ctx.k(),
        forest.ctx.n()
    );
    let _ = writeln!(out, "  node [shape=plaintext];");
    for (t, &root) in forest.roots.iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{t} {{");
        let _ = writeln!(out, "    label=\"tree {t} (root {root})\";");
        for node in forest.tree_nodes(t) {
            let boxed = selection.is_some_and(|s| s.contains(node.m));
            let shape = if boxed { ", shape=box" } else { "" };
            let _ = writeln!(
                out,
                "    d{} [label=\"{}\"{shape}];",
                node.m,
                node_label(forest, node)
            );
        }
        for node in forest.tree_nodes(t) {
            for child in &node.children {
                let _ = writeln!(out, "    d{} -> d{child};", node.m);
            }
        }
        let _ = writeln!(out, "  }}");
    }
    let _ = writeln!(out, "}}");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(k: u64, n: u64) -> ModulusContext {
        ModulusContext::new(k, n).unwrap()
    }

    #[test]
    fn worked_example_forest() {
        let c = ctx(15, 826875);
        let f = build_forest(&c).unwrap();
        assert_eq!(f.len(), 60);
        assert_eq!(f.roots(), &[16875, 16875 * 7, 16875 * 49]);
        assert_eq!(rk_general(&c).unwrap().value, 775180);
        // the drawn tree: 3^2·5^3 is a chosen child of the root 3^3·5^4
        let s = select_optimal(&f).unwrap();
        for m in [
            9 * 125,
            9 * 625,
            9 * 25,
            27 * 25,
            5,
            25,
            125,
            625,
            1,
            3,
            9,
            27,
        ] {
            assert!(s.contains(m), "{m} should be chosen");
        }
        for m in [16875, 27 * 125, 3 * 25, 3 * 125, 3 * 625, 15, 45, 135] {
            assert!(!s.contains(m), "{m} should not be chosen");
        }
    }

    #[test]
    fn coprime_forest_is_isolated_roots() {
        let f = build_forest(&ctx(2, 45)).unwrap();
        assert_eq!(f.roots().len(), 6);
        assert!(f
            .nodes()
            .iter()
            .all(|n| n.is_root && n.is_leaf && n.level == 1));
    }

    #[test]
    fn small_paths() {
        let f = build_forest(&ctx(2, 12)).unwrap();
        assert_eq!(f.roots(), &[4, 12]);
        assert_eq!(f.node(1).unwrap().parent, Some(2));
        assert_eq!(f.node(2).unwrap().parent, Some(4));
        assert_eq!(f.node(3).unwrap().parent, Some(6));
        assert_eq!(f.node(6).unwrap().parent, Some(12));
        let s = select_optimal(&f).unwrap();
        assert_eq!(s.chosen, vec![1, 3, 4]);
        assert_eq!(s.total, 7);
        let s = select_optimal(&build_forest(&ctx(12, 16)).unwrap()).unwrap();
        assert_eq!(s.chosen, vec![1, 2]);
        assert_eq!(s.total, 12);
    }

    #[test]
    fn rk_general_examples() {
        assert_eq!(rk_general(&ctx(1, 100)).unwrap().value, 0);
        assert_eq!(rk_general(&ctx(2, 12)).unwrap().value, 7);
        assert_eq!(rk_general(&ctx(6, 6)).unwrap().value, 5);
        assert_eq!(rk_general(&ctx(5, 1)).unwrap().value, 0);
    }

    #[test]
    fn multiple_of_n_matches_forest() {
        // k ≡ 0 is bypassed, k = n through the forest must agree
        for n in 1..=200u64 {
            let c = ctx(n, n);
            let direct = rk_general(&c).unwrap().value;
            let via_forest = select_optimal(&build_forest(&c).unwrap()).unwrap().total;
            assert_eq!(direct, n - 1);
            assert_eq!(via_forest, n - 1, "n={n}");
        }
    }

    #[test]
    fn root_valuation_examples() {
        assert_eq!(root_valuation(4, &ctx(2, 12)).unwrap(), 1);
        assert_eq!(root_valuation(12, &ctx(2, 12)).unwrap(), 0);
        assert_eq!(root_valuation(1, &ctx(2, 7)).unwrap(), 2);
        assert_eq!(root_valuation(1, &ctx(2, 12)), Err(Error::NotRoot { m: 1 }));
    }

    #[test]
    fn witness_examples() {
        let w = construct_max_kfree(&ctx(2, 12)).unwrap();
        assert_eq!(w.elements, vec![1, 3, 4, 5, 7, 9, 11]);
        assert!(w.verify().unwrap());
        assert!(construct_max_kfree(&ctx(1, 9)).unwrap().is_empty());
        let w = construct_max_kfree(&ctx(2, 7)).unwrap();
        assert_eq!(w.elements, vec![1, 3]);
    }

    #[test]
    fn dot_shapes() {
        let c = ctx(15, 826875);
        let f = build_forest(&c).unwrap();
        let s = select_optimal(&f).unwrap();
        let dot = forest_to_dot(&f, Some(&s));
        assert_eq!(dot.matches("subgraph cluster_").count(), 3);
        assert_eq!(dot.matches("[label=").count(), 60);
        assert_eq!(dot.matches("shape=box").count(), s.chosen.len());
        assert!(dot.contains("d16875 [label=\"3^3·5^4 (α=18)\"]"));
        assert!(dot.contains("d826875 [label=\"3^3·5^4·7^2 (α=0)\"]"));

        let f = build_forest(&ctx(2, 7)).unwrap();
        let dot = forest_to_dot(&f, None);
        assert_eq!(dot.matches("subgraph cluster_").count(), 2);
        assert_eq!(dot.matches("->").count(), 0);

        let f = build_forest(&ctx(2, 8)).unwrap();
        let dot = forest_to_dot(&f, None);
        assert_eq!(dot.matches("subgraph cluster_").count(), 1);
        assert_eq!(dot.matches("->").count(), 3);
        assert!(
            dot.contains("d8 -> d4;") && dot.contains("d4 -> d2;") && dot.contains("d2 -> d1;")
        );
    }
}

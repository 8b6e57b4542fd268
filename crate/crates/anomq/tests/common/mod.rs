//! Independent oracles shared by the integration suites. Everything here
//! recomputes results from first principles, without touching the library's
//! search or edit-distance code paths.

// Each test target compiles this module separately and uses a subset of it.
#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

/// A graph up to isomorphism: vertex count plus the lexicographically
/// smallest edge list over all vertex relabelings.
pub type CanonState = (usize, Vec<(u8, u8)>);

fn permutations(n: usize) -> Vec<Vec<u8>> {
    fn rec(prefix: &mut Vec<u8>, remaining: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if remaining.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..remaining.len() {
            let v = remaining.remove(i);
            prefix.push(v);
            rec(prefix, remaining, out);
            prefix.pop();
            remaining.insert(i, v);
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut (0..n as u8).collect(), &mut out);
    out
}

pub fn canon(n: usize, edges: &[(u8, u8)]) -> CanonState {
    let mut best: Option<Vec<(u8, u8)>> = None;
    for perm in permutations(n) {
        let mut mapped: Vec<(u8, u8)> = edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (perm[u as usize], perm[v as usize]);
                (a.min(b), a.max(b))
            })
            .collect();
        mapped.sort_unstable();
        if best.as_ref().is_none_or(|b| &mapped < b) {
            best = Some(mapped);
        }
    }
    (n, best.unwrap_or_default())
}

/// Breadth-first edit-sequence search over the space of all graphs with at
/// most `cap` vertices, taken up to isomorphism. Moves are the four unit
/// edits: toggle an edge, insert an isolated vertex, delete an isolated
/// vertex. Distances are therefore true minimum edit-sequence lengths,
/// provided optimal paths never need more than `cap` vertices.
pub struct EditSpace {
    cap: usize,
    index: HashMap<CanonState, usize>,
    adj: Vec<Vec<usize>>,
}

impl EditSpace {
    pub fn build(cap: usize) -> Self {
        let mut space = EditSpace {
            cap,
            index: HashMap::new(),
            adj: Vec::new(),
        };
        let start = canon(0, &[]);
        space.intern(start.clone());
        let mut queue = VecDeque::from([start]);
        while let Some(state) = queue.pop_front() {
            let id = space.index[&state];
            for next in space.neighbors(&state) {
                let nid = if let Some(&nid) = space.index.get(&next) {
                    nid
                } else {
                    let nid = space.intern(next.clone());
                    queue.push_back(next);
                    nid
                };
                if !space.adj[id].contains(&nid) {
                    space.adj[id].push(nid);
                    space.adj[nid].push(id);
                }
            }
        }
        space
    }

    fn intern(&mut self, state: CanonState) -> usize {
        let id = self.adj.len();
        self.index.insert(state, id);
        self.adj.push(Vec::new());
        id
    }

    fn neighbors(&self, state: &CanonState) -> Vec<CanonState> {
        let (n, edges) = state;
        let mut out = Vec::new();
        // Toggle every vertex pair.
        for i in 0..*n as u8 {
            for j in (i + 1)..*n as u8 {
                let mut next = edges.clone();
                match next.iter().position(|&e| e == (i, j)) {
                    Some(pos) => {
                        next.remove(pos);
                    }
                    None => next.push((i, j)),
                }
                out.push(canon(*n, &next));
            }
        }
        // Insert an isolated vertex.
        if *n < self.cap {
            out.push(canon(n + 1, edges));
        }
        // Delete an isolated vertex (relabel the tail down).
        for v in 0..*n as u8 {
            let isolated = edges.iter().all(|&(a, b)| a != v && b != v);
            if isolated {
                let relabeled: Vec<(u8, u8)> = edges
                    .iter()
                    .map(|&(a, b)| {
                        let f = |x: u8| if x > v { x - 1 } else { x };
                        (f(a), f(b))
                    })
                    .collect();
                out.push(canon(n - 1, &relabeled));
                break; // isolated vertices are interchangeable after canon
            }
        }
        out
    }

    pub fn distance(&self, a: &CanonState, b: &CanonState) -> usize {
        assert!(a.0 <= self.cap && b.0 <= self.cap);
        let (sa, sb) = (self.index[a], self.index[b]);
        let mut dist = vec![usize::MAX; self.adj.len()];
        dist[sa] = 0;
        let mut queue = VecDeque::from([sa]);
        while let Some(u) = queue.pop_front() {
            if u == sb {
                return dist[u];
            }
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        panic!("edit space is connected; target must be reachable");
    }
}

/// Exhaustive edit distance over *all* injective partial vertex maps (not
/// just maximal ones), scoring each map as vertex edits plus unmatched
/// edges. No pruning, no ordering heuristics.
#[allow(clippy::too_many_arguments)]
pub fn ged_partial_maps(na: usize, ea: &[(u8, u8)], nb: usize, eb: &[(u8, u8)]) -> usize {
    fn matched(assign: &[Option<u8>], ea: &[(u8, u8)], eb: &[(u8, u8)]) -> usize {
        ea.iter()
            .filter(|&&(u, v)| {
                if let (Some(x), Some(y)) = (assign[u as usize], assign[v as usize]) {
                    eb.contains(&(x.min(y), x.max(y)))
                } else {
                    false
                }
            })
            .count()
    }
    fn rec(
        i: usize,
        na: usize,
        nb: usize,
        assign: &mut Vec<Option<u8>>,
        used: &mut Vec<bool>,
        ea: &[(u8, u8)],
        eb: &[(u8, u8)],
        best: &mut usize,
    ) {
        if i == na {
            let k = assign.iter().filter(|a| a.is_some()).count();
            let m = matched(assign, ea, eb);
            let cost = (na - k) + (nb - k) + ea.len() + eb.len() - 2 * m;
            *best = (*best).min(cost);
            return;
        }
        assign.push(None);
        rec(i + 1, na, nb, assign, used, ea, eb, best);
        assign.pop();
        for t in 0..nb as u8 {
            if used[t as usize] {
                continue;
            }
            used[t as usize] = true;
            assign.push(Some(t));
            rec(i + 1, na, nb, assign, used, ea, eb, best);
            assign.pop();
            used[t as usize] = false;
        }
    }
    let mut best = usize::MAX;
    rec(
        0,
        na,
        nb,
        &mut Vec::new(),
        &mut vec![false; nb],
        ea,
        eb,
        &mut best,
    );
    best
}

/// Exhaustive maximization of a nonparametric scan statistic over every
/// non-empty subset of the p-values. Returns the best value.
pub fn exhaustive_subset_max(pvals: &[f64], spec: &anomq::ScoreSpec) -> f64 {
    let n = pvals.len();
    assert!(n <= 20, "exhaustive scan is exponential");
    let mut best = f64::NEG_INFINITY;
    for mask in 1u32..(1 << n) {
        let subset: Vec<f64> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| pvals[i])
            .collect();
        let sv = anomq::stats::npss_score(&subset, spec).unwrap();
        if sv.value > best {
            best = sv.value;
        }
    }
    best
}

/// Erdos-Renyi edge list.
pub fn er_edges(rng: &mut impl rand::Rng, n: usize, p: f64) -> Vec<(u32, u32)> {
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges
}

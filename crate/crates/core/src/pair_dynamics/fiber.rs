//! Pairs of tiles from tilings with the same image in the maximal equicontinuous
//! factor.
//!
//! Seeds are the overlaps of a tiling with its translates by return vectors. A state
//! on a cycle of their closure is the limit of overlaps whose translation vector
//! shrinks in the contracting direction, so the forward closure of the cyclic states
//! is exactly the set of overlaps of fiber pairs.

use std::collections::{BTreeSet, VecDeque};

use super::{overlap_closure, Caps, OverlapGraph, OverlapState};
use crate::error::{Error, Result};
use crate::geometry::{self, Coords, Geometry};
use crate::subst::{Substitution, Symbol};

/// Number of doublings of the return-vector bound tried before giving up.
const MAX_DOUBLINGS: usize = 5;

#[derive(Clone, Debug)]
pub struct FiberSet {
    /// Fiber states; forward closed.
    pub graph: OverlapGraph,
    /// States lying on a cycle.
    pub cyclic: Vec<bool>,
    /// Return-vector bound at which the set stabilised.
    pub return_bound: f64,
    pub seed_count: usize,
    /// Size of the full seed closure at the final bound.
    pub explored: usize,
}

/// One state of a witness path.
pub type WitnessStep = OverlapState;

#[derive(Clone, Debug)]
pub struct FiberCertificate {
    pub state: OverlapState,
    pub fiber: bool,
    /// From a state on a cycle of fiber states down to `state`. Empty for a
    /// coincidence, which is its own diagonal.
    pub witness_path: Option<Vec<WitnessStep>>,
}

fn seeds_for_bound(s: &Substitution, g: &Geometry, bound: f64) -> Result<Vec<OverlapState>> {
    let window = bound + 2.0 * g.max_length;
    let len = (2.0 * window / g.min_length).ceil() as usize + 2;
    let patches = s.language(len)?;
    let mut returns: BTreeSet<Coords> = BTreeSet::new();
    let mut pairs: BTreeSet<(Symbol, Symbol, Coords)> = BTreeSet::new();
    for w in &patches {
        let pos = g.positions(w);
        let x: Vec<f64> = pos.iter().map(|p| g.value(p)).collect();
        for r in 0..w.len() {
            for t in r..w.len() {
                let dx = x[t] - x[r];
                if dx > window + 1e-9 {
                    break;
                }
                let diff = geometry::sub(&pos[t], &pos[r]);
                if w[r] == w[t] && dx <= bound + 1e-9 {
                    returns.insert(geometry::neg(&diff));
                    returns.insert(diff.clone());
                }
                pairs.insert((w[r], w[t], diff.clone()));
                pairs.insert((w[t], w[r], geometry::neg(&diff)));
            }
        }
    }
    let mut ys: Vec<(f64, Coords)> = returns.into_iter().map(|y| (g.value(&y), y)).collect();
    ys.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut seeds = BTreeSet::new();
    for (a, b, diff) in pairs {
        let dv = g.value(&diff);
        let lo = dv - g.lengths_f64[a.0] - 1e-9;
        let hi = dv + g.lengths_f64[b.0] + 1e-9;
        let start = ys.partition_point(|(v, _)| *v < lo);
        for (v, y) in &ys[start..] {
            if *v > hi {
                break;
            }
            let st = OverlapState::new(a, b, geometry::sub(&diff, y));
            if st.is_valid(g) {
                seeds.insert(st);
            }
        }
    }
    Ok(seeds.into_iter().collect())
}

fn fiber_at_bound(s: &Substitution, g: &Geometry, bound: f64, caps: &Caps) -> Result<(OverlapGraph, Vec<bool>, usize, usize)> {
    let seeds = seeds_for_bound(s, g, bound)?;
    let full = overlap_closure(g, &seeds, caps).map_err(|e| e.in_stage("fiber"))?;
    let cyclic = full.cyclic_states();
    let sources: Vec<usize> = (0..full.len()).filter(|&i| cyclic[i]).collect();
    let keep = full.reachable_from(&sources);
    let graph = full.restrict(&keep);
    let cyc = graph.cyclic_states();
    Ok((graph, cyc, seeds.len(), full.len()))
}

impl FiberSet {
    pub fn compute(s: &Substitution, g: &Geometry, caps: &Caps) -> Result<FiberSet> {
        let mut bound = 2.0 * g.max_length;
        let mut prev: Option<(OverlapGraph, Vec<bool>, usize, usize)> = None;
        for _ in 0..=MAX_DOUBLINGS {
            let cur = fiber_at_bound(s, g, bound, caps)?;
            if let Some(p) = &prev {
                if p.0.states == cur.0.states {
                    return Ok(FiberSet {
                        graph: cur.0,
                        cyclic: cur.1,
                        return_bound: bound,
                        seed_count: cur.2,
                        explored: cur.3,
                    });
                }
            }
            prev = Some(cur);
            bound *= 2.0;
        }
        Err(Error::NotCertified {
            stage: "fiber".into(),
            message: format!("fiber set did not stabilise up to return bound {bound}"),
        })
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    pub fn contains(&self, st: &OverlapState) -> bool {
        self.graph.index_of(st).is_some()
    }

    pub fn states(&self) -> &[OverlapState] {
        &self.graph.states
    }

    /// Fiber states whose refinements never produce a coincidence.
    pub fn coincidence_free(&self) -> Vec<bool> {
        self.graph.reaches_coincidence().iter().map(|r| !r).collect()
    }

    /// Fiber states that are densely stably equivalent.
    pub fn dense(&self) -> Vec<bool> {
        self.graph.densely_reaches_coincidence()
    }

    pub fn certificate(&self, st: &OverlapState) -> FiberCertificate {
        if st.is_coincidence() {
            return FiberCertificate {
                state: st.clone(),
                fiber: true,
                witness_path: Some(Vec::new()),
            };
        }
        let Some(target) = self.graph.index_of(st) else {
            return FiberCertificate {
                state: st.clone(),
                fiber: false,
                witness_path: None,
            };
        };
        let n = self.graph.len();
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for i in 0..n {
            if self.cyclic[i] {
                parent[i] = i;
                queue.push_back(i);
            }
        }
        while let Some(v) = queue.pop_front() {
            if v == target {
                break;
            }
            for &u in &self.graph.edges[v] {
                if parent[u] == usize::MAX {
                    parent[u] = v;
                    queue.push_back(u);
                }
            }
        }
        let mut path = vec![target];
        let mut v = target;
        while parent[v] != v {
            v = parent[v];
            path.push(v);
        }
        path.reverse();
        FiberCertificate {
            state: st.clone(),
            fiber: true,
            witness_path: Some(path.into_iter().map(|i| self.graph.states[i].clone()).collect()),
        }
    }
}

/// Membership of a single state in the fiber set of `s`.
pub fn fiber_pair(s: &Substitution, g: &Geometry, st: &OverlapState, caps: &Caps) -> Result<FiberCertificate> {
    if !st.is_valid(g) {
        return Err(Error::Internal(format!("invalid overlap state {st:?}")));
    }
    Ok(FiberSet::compute(s, g, caps)?.certificate(st))
}

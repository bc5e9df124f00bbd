//! Finite graphs on pairs of overlapping positioned tiles.

mod asymptotic;
mod fiber;
mod rank;

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{self, Coords, Geometry};
use crate::subst::{Substitution, Symbol};

pub use asymptotic::{fixed_tiling_asymptotic_cycles, AsymptoticStructure, FixedTiling};
pub use fiber::{fiber_pair, FiberCertificate, FiberSet, WitnessStep};
pub(crate) use rank::rank_from_fiber;
pub use rank::{coincidence_rank, coincidence_rank_of_proper, CoincidenceRank, TileTuple};

/// Limits on the finite searches. Exceeding one is an error, never a truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// States in any one closure.
    pub states: usize,
    /// Breadth-first layers in any one closure.
    pub depth: usize,
    /// Largest tuple size tried for the coincidence rank.
    pub tuple: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            states: 20000,
            depth: 64,
            tuple: 8,
        }
    }
}

/// Tile `lower` at `[0, ω_lower]` and tile `upper` at `[v, v + ω_upper]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct OverlapState {
    pub lower: Symbol,
    pub upper: Symbol,
    pub offset: Coords,
}

impl OverlapState {
    pub fn new(lower: Symbol, upper: Symbol, offset: Coords) -> Self {
        OverlapState { lower, upper, offset }
    }

    pub fn is_coincidence(&self) -> bool {
        self.lower == self.upper && geometry::is_zero(&self.offset)
    }

    /// The same pair seen from the other tile.
    pub fn swapped(&self) -> OverlapState {
        OverlapState {
            lower: self.upper,
            upper: self.lower,
            offset: geometry::neg(&self.offset),
        }
    }

    pub fn is_valid(&self, g: &Geometry) -> bool {
        g.sign(&geometry::add(&self.offset, g.length(self.upper))) == Ordering::Greater
            && g.cmp(g.length(self.lower), &self.offset) == Ordering::Greater
    }

    pub fn label(&self, s: &Substitution, g: &Geometry) -> String {
        format!("{}/{}@{}", s.name_of(self.lower), s.name_of(self.upper), g.format(&self.offset))
    }
}

/// Children of two overlapping laid-out words, as overlap states, left to right.
/// `lower` starts at 0 and `upper` at `shift`.
pub fn overlaps_of_words(
    g: &Geometry,
    lower: &[Symbol],
    upper: &[Symbol],
    shift: &[i128],
) -> Vec<OverlapState> {
    indexed_overlaps(g, lower, upper, shift).into_iter().map(|(_, _, st)| st).collect()
}

/// As [`overlaps_of_words`], with the index of the lower and upper letter of each.
pub fn indexed_overlaps(
    g: &Geometry,
    lower: &[Symbol],
    upper: &[Symbol],
    shift: &[i128],
) -> Vec<(usize, usize, OverlapState)> {
    let pl = g.positions(lower);
    let pu: Vec<Coords> = g.positions(upper).iter().map(|p| geometry::add(p, shift)).collect();
    let mut out = Vec::new();
    let (mut k, mut l) = (0, 0);
    while k < lower.len() && l < upper.len() {
        let (x0, x1) = (&pl[k], &pl[k + 1]);
        let (y0, y1) = (&pu[l], &pu[l + 1]);
        if g.cmp(y0, x1) == Ordering::Less && g.cmp(x0, y1) == Ordering::Less {
            out.push((k, l, OverlapState::new(lower[k], upper[l], geometry::sub(y0, x0))));
        }
        match g.cmp(x1, y1) {
            Ordering::Less => k += 1,
            Ordering::Greater => l += 1,
            Ordering::Equal => {
                k += 1;
                l += 1;
            }
        }
    }
    out
}

/// Inflate both tiles, lay out their rule images and list the overlapping children.
pub fn substitute_overlap(g: &Geometry, st: &OverlapState) -> Vec<OverlapState> {
    let shift = g.mul_lambda(&st.offset);
    overlaps_of_words(g, &g.rules[st.lower.0], &g.rules[st.upper.0], &shift)
}

/// Reachable closure of a seed set under [`substitute_overlap`]. States are sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapGraph {
    pub states: Vec<OverlapState>,
    pub edges: Vec<Vec<usize>>,
}

impl OverlapGraph {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, st: &OverlapState) -> Option<usize> {
        self.states.binary_search(st).ok()
    }

    pub fn coincidences(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.states[i].is_coincidence()).collect()
    }

    fn reverse_edges(&self) -> Vec<Vec<usize>> {
        let mut rev = vec![Vec::new(); self.len()];
        for (i, es) in self.edges.iter().enumerate() {
            for &j in es {
                rev[j].push(i);
            }
        }
        rev
    }

    /// States from which one of `targets` is reachable (targets included).
    pub fn can_reach(&self, targets: &[usize]) -> Vec<bool> {
        let rev = self.reverse_edges();
        let mut seen = vec![false; self.len()];
        let mut queue: VecDeque<usize> = targets.iter().copied().collect();
        for &t in targets {
            seen[t] = true;
        }
        while let Some(v) = queue.pop_front() {
            for &u in &rev[v] {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        seen
    }

    /// States reachable from `sources` (sources included).
    pub fn reachable_from(&self, sources: &[usize]) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut queue: VecDeque<usize> = sources.iter().copied().collect();
        for &t in sources {
            seen[t] = true;
        }
        while let Some(v) = queue.pop_front() {
            for &u in &self.edges[v] {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        seen
    }

    /// Stable equivalence: some coincidence is reachable.
    pub fn reaches_coincidence(&self) -> Vec<bool> {
        self.can_reach(&self.coincidences())
    }

    /// Every reachable state still reaches a coincidence. Reachable states stand for
    /// the subintervals of iterated refinements of the overlap, so this says that
    /// points which are eventually coincident are dense in it.
    pub fn densely_reaches_coincidence(&self) -> Vec<bool> {
        let good = self.reaches_coincidence();
        let bad: Vec<usize> = (0..self.len()).filter(|&i| !good[i]).collect();
        let tainted = self.can_reach(&bad);
        tainted.iter().map(|t| !t).collect()
    }

    /// States lying on a cycle.
    pub fn cyclic_states(&self) -> Vec<bool> {
        let sccs = strongly_connected_components(&self.edges);
        let mut out = vec![false; self.len()];
        for comp in sccs {
            let cyclic = comp.len() > 1 || self.edges[comp[0]].contains(&comp[0]);
            if cyclic {
                for v in comp {
                    out[v] = true;
                }
            }
        }
        out
    }

    /// Sub-graph on the states flagged in `keep`, which must be forward closed.
    pub fn restrict(&self, keep: &[bool]) -> OverlapGraph {
        let mut map = vec![usize::MAX; self.len()];
        let mut states = Vec::new();
        for i in 0..self.len() {
            if keep[i] {
                map[i] = states.len();
                states.push(self.states[i].clone());
            }
        }
        let edges = (0..self.len())
            .filter(|&i| keep[i])
            .map(|i| self.edges[i].iter().filter(|&&j| keep[j]).map(|&j| map[j]).collect())
            .collect();
        OverlapGraph { states, edges }
    }

    pub fn to_dot(&self, s: &Substitution, g: &Geometry) -> String {
        let mut out = String::from("digraph overlaps {\n");
        for (i, st) in self.states.iter().enumerate() {
            let shape = if st.is_coincidence() { "doublecircle" } else { "ellipse" };
            let _ = writeln!(out, "  n{i} [label=\"{}\", shape={shape}];", st.label(s, g));
        }
        for (i, es) in self.edges.iter().enumerate() {
            for j in es {
                let _ = writeln!(out, "  n{i} -> n{j};");
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Tarjan's algorithm, iterative. Components are listed in reverse topological order.
pub fn strongly_connected_components(edges: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = edges.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if *next < edges[v].len() {
                let w = edges[v][*next];
                *next += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// Generic breadth-first closure with a state cap; the result is sorted so it does
/// not depend on scheduling.
pub(crate) fn closure<S, F>(seeds: Vec<S>, caps: &Caps, stage: &str, step: F) -> Result<(Vec<S>, Vec<Vec<usize>>)>
where
    S: Clone + Ord + std::hash::Hash + Send + Sync,
    F: Fn(&S) -> Vec<S> + Sync,
{
    let mut ids: HashMap<S, usize> = HashMap::new();
    let mut states: Vec<S> = Vec::new();
    let mut succ: Vec<Vec<S>> = Vec::new();
    let mut frontier = Vec::new();
    for s in seeds {
        if !ids.contains_key(&s) {
            ids.insert(s.clone(), states.len());
            frontier.push(states.len());
            states.push(s);
        }
    }
    let cap = caps.states;
    let over = || Error::CapExceeded {
        stage: stage.to_string(),
        what: "states".into(),
        limit: cap,
    };
    if states.len() > cap {
        return Err(over());
    }
    let mut layers = 0;
    while !frontier.is_empty() {
        layers += 1;
        if layers > caps.depth {
            return Err(Error::CapExceeded {
                stage: stage.to_string(),
                what: "depth".into(),
                limit: caps.depth,
            });
        }
        let images: Vec<Vec<S>> = frontier.par_iter().map(|&i| step(&states[i])).collect();
        let mut next = Vec::new();
        for (&i, img) in frontier.iter().zip(images) {
            for t in &img {
                if !ids.contains_key(t) {
                    ids.insert(t.clone(), states.len());
                    next.push(states.len());
                    states.push(t.clone());
                    if states.len() > cap {
                        return Err(over());
                    }
                }
            }
            if succ.len() <= i {
                succ.resize(i + 1, Vec::new());
            }
            succ[i] = img;
        }
        frontier = next;
    }
    succ.resize(states.len(), Vec::new());
    let mut order: Vec<usize> = (0..states.len()).collect();
    order.sort_by(|&a, &b| states[a].cmp(&states[b]));
    let mut rank = vec![0; states.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    let sorted: Vec<S> = order.iter().map(|&i| states[i].clone()).collect();
    let edges = order
        .iter()
        .map(|&i| {
            let mut e: Vec<usize> = succ[i].iter().map(|t| rank[ids[t]]).collect();
            e.sort_unstable();
            e.dedup();
            e
        })
        .collect();
    Ok((sorted, edges))
}

pub fn overlap_closure(g: &Geometry, seeds: &[OverlapState], caps: &Caps) -> Result<OverlapGraph> {
    for st in seeds {
        if !st.is_valid(g) {
            return Err(Error::Internal(format!("invalid overlap seed {st:?}")));
        }
    }
    let (states, edges) = closure(seeds.to_vec(), caps, "overlap_closure", |st| substitute_overlap(g, st))?;
    Ok(OverlapGraph { states, edges })
}

/// Offset-zero pairs of distinct prototiles.
pub fn aligned_seeds(g: &Geometry, size: usize) -> Vec<OverlapState> {
    let mut out = Vec::new();
    for i in 0..size {
        for j in 0..size {
            if i != j {
                out.push(OverlapState::new(Symbol(i), Symbol(j), g.zero()));
            }
        }
    }
    out
}

pub fn stably_equivalent(g: &Geometry, st: &OverlapState, caps: &Caps) -> Result<bool> {
    let graph = overlap_closure(g, std::slice::from_ref(st), caps)?;
    let i = graph.index_of(st).unwrap();
    Ok(graph.reaches_coincidence()[i])
}

pub fn densely_stably_equivalent(g: &Geometry, st: &OverlapState, caps: &Caps) -> Result<bool> {
    let graph = overlap_closure(g, std::slice::from_ref(st), caps)?;
    let i = graph.index_of(st).unwrap();
    Ok(graph.densely_reaches_coincidence()[i])
}

#[cfg(test)]
mod tests;

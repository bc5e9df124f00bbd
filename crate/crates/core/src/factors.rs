//! Quotient substitutions: stacks, ordered rpd pairs and their unordered fold.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde_json::{json, Map, Value};

use crate::algebra::{eventual_rank, perron_data, IntMatrix, PerronData, RankField};
use crate::error::{Error, Precondition, Result};
use crate::geometry::{self, Coords, Geometry};
use crate::pair_dynamics::{
    rank_from_fiber, strongly_connected_components, substitute_overlap, Caps, CoincidenceRank, FiberSet,
    OverlapState,
};
use crate::subst::{Substitution, Symbol, Word};

/// Positioned tiles over one cell, positions relative to the cell's left end.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Stack {
    pub members: Vec<(Symbol, Coords)>,
    pub length: Coords,
}

impl Stack {
    pub fn is_singleton(&self) -> bool {
        self.members.len() == 1
    }
}

/// One piece of a prototile: stack letter and left end inside the tile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub stack: Symbol,
    pub start: Coords,
}

#[derive(Clone, Debug)]
pub struct StackSystem {
    pub base: Substitution,
    pub stacks: Vec<Stack>,
    pub phi_s: Substitution,
    /// Decomposition of every prototile of `base` into stack cells.
    pub sigma: Vec<Vec<Cell>>,
    pub rank: CoincidenceRank,
    pub perron: PerronData,
    pub geometry: Geometry,
}

impl StackSystem {
    pub fn is_trivial(&self) -> bool {
        self.stacks.iter().all(Stack::is_singleton)
    }

    pub fn sidecar_json(&self) -> Value {
        let g = &self.geometry;
        let mut sigma = Map::new();
        for (i, cells) in self.sigma.iter().enumerate() {
            let list: Vec<Value> = cells
                .iter()
                .map(|c| json!({"stack": self.phi_s.name_of(c.stack), "start": g.coord_strings(&c.start)}))
                .collect();
            sigma.insert(self.base.name_of(Symbol(i)).to_string(), Value::Array(list));
        }
        let stacks: Vec<Value> = self
            .stacks
            .iter()
            .enumerate()
            .map(|(k, st)| {
                json!({
                    "name": self.phi_s.name_of(Symbol(k)),
                    "length": g.coord_strings(&st.length),
                    "members": st.members.iter().map(|(c, x)| json!([self.base.name_of(*c), g.coord_strings(x)])).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({"sigma": sigma, "stacks": stacks, "trivial": self.is_trivial()})
    }
}

fn covers(g: &Geometry, start: &[i128], len: &[i128], lo: &[i128], hi: &[i128]) -> bool {
    g.cmp(start, lo) != Ordering::Greater && g.cmp(&geometry::add(start, len), hi) != Ordering::Less
}

/// Cells of prototile `i` where the chain class of `(i, 0)` under `related` is
/// constant, with the class on each cell in absolute positions.
fn prototile_cells(
    g: &Geometry,
    related: &[Vec<(Symbol, Coords)>],
    i: Symbol,
    cap: usize,
) -> Result<Vec<(Coords, Coords, Vec<(Symbol, Coords)>)>> {
    let mut cuts: Vec<Coords> = vec![g.zero(), g.length(i).clone()];
    loop {
        let mut new_cuts: Vec<Coords> = Vec::new();
        let mut cells = Vec::new();
        for w in cuts.windows(2) {
            let (lo, hi) = (&w[0], &w[1]);
            let mut members: BTreeSet<(Symbol, Coords)> = BTreeSet::new();
            members.insert((i, g.zero()));
            let mut queue: VecDeque<(Symbol, Coords)> = VecDeque::from([(i, g.zero())]);
            while let Some((c, y)) = queue.pop_front() {
                for (c2, v) in &related[c.0] {
                    let y2 = geometry::add(&y, v);
                    if members.contains(&(*c2, y2.clone())) {
                        continue;
                    }
                    let len = g.length(*c2);
                    if covers(g, &y2, len, lo, hi) {
                        members.insert((*c2, y2.clone()));
                        queue.push_back((*c2, y2));
                        if members.len() > cap {
                            return Err(Error::CapExceeded {
                                stage: "build_stacks".into(),
                                what: "stack members".into(),
                                limit: cap,
                            });
                        }
                    } else {
                        let end = geometry::add(&y2, len);
                        let inside = |p: &Coords| g.cmp(p, lo) == Ordering::Greater && g.cmp(p, hi) == Ordering::Less;
                        // partial cover of the cell: split it at the partner's ends
                        if g.cmp(&y2, hi) == Ordering::Less && g.cmp(&end, lo) == Ordering::Greater {
                            for p in [y2, end] {
                                if inside(&p) {
                                    new_cuts.push(p);
                                }
                            }
                        }
                    }
                }
            }
            cells.push((lo.clone(), hi.clone(), members.into_iter().collect::<Vec<_>>()));
        }
        if new_cuts.is_empty() {
            // merge neighbours with the same class
            let mut merged: Vec<(Coords, Coords, Vec<(Symbol, Coords)>)> = Vec::new();
            for c in cells {
                if let Some(last) = merged.last_mut() {
                    if last.2 == c.2 {
                        last.1 = c.1;
                        continue;
                    }
                }
                merged.push(c);
            }
            return Ok(merged);
        }
        cuts.extend(new_cuts);
        cuts.sort_by(|a, b| g.cmp(a, b));
        cuts.dedup_by(|a, b| g.cmp(a, b) == Ordering::Equal);
        if cuts.len() > cap {
            return Err(Error::CapExceeded {
                stage: "build_stacks".into(),
                what: "cut points".into(),
                limit: cap,
            });
        }
    }
}

/// Right-neighbour relation between consecutive overlaps of fiber pairs: adjacent
/// children of a fiber state, closed under refinement across the shared end.
fn consecutive_overlaps(g: &Geometry, fiber: &FiberSet) -> Vec<Vec<usize>> {
    let graph = &fiber.graph;
    let kids: Vec<Vec<usize>> = graph
        .states
        .iter()
        .map(|st| {
            substitute_overlap(g, st)
                .iter()
                .map(|q| graph.index_of(q).expect("fiber set is forward closed"))
                .collect()
        })
        .collect();
    let mut next: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); graph.len()];
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    for ks in &kids {
        for w in ks.windows(2) {
            if next[w[0]].insert(w[1]) {
                queue.push_back((w[0], w[1]));
            }
        }
    }
    while let Some((x, y)) = queue.pop_front() {
        let (a, b) = (*kids[x].last().unwrap(), kids[y][0]);
        if next[a].insert(b) {
            queue.push_back((a, b));
        }
    }
    next.into_iter().map(|s| s.into_iter().collect()).collect()
}

/// Fiber states occurring in a pair of tilings that agree on a dense set: dense
/// states on a bi-infinite chain of dense consecutive overlaps.
fn related_states(g: &Geometry, fiber: &FiberSet) -> Vec<bool> {
    let next = consecutive_overlaps(g, fiber);
    let mut prev: Vec<Vec<usize>> = vec![Vec::new(); next.len()];
    for (i, ns) in next.iter().enumerate() {
        for &j in ns {
            prev[j].push(i);
        }
    }
    let mut keep = fiber.dense();
    loop {
        let mut changed = false;
        for i in 0..keep.len() {
            if keep[i] && (!next[i].iter().any(|&j| keep[j]) || !prev[i].iter().any(|&j| keep[j])) {
                keep[i] = false;
                changed = true;
            }
        }
        if !changed {
            return keep;
        }
    }
}

fn stack_name(base: &Substitution, g: &Geometry, st: &Stack) -> String {
    if st.is_singleton() {
        return base.name_of(st.members[0].0).to_string();
    }
    let parts: Vec<String> = st
        .members
        .iter()
        .map(|(c, x)| format!("{}@{}", base.name_of(*c), g.format(x)))
        .collect();
    format!("[{}]", parts.join("+"))
}

fn require_analysable(s: &Substitution) -> Result<PerronData> {
    if !s.is_primitive() {
        return Err(Precondition::NotPrimitive(s.name().into()).into());
    }
    s.require_aperiodic()?;
    if !s.is_proper() {
        return Err(Precondition::NotProper(s.name().into()).into());
    }
    let p = perron_data(&s.abelianization())?;
    if !p.pisot {
        return Err(Precondition::NotPisot(s.name().into()).into());
    }
    Ok(p)
}

/// Quotient by the closure of the relation "fiber pair and densely stably
/// equivalent on the overlap".
pub fn build_stacks(s: &Substitution, caps: &Caps) -> Result<StackSystem> {
    let perron = require_analysable(s)?;
    let g = Geometry::new(s, &perron)?;
    let fiber = FiberSet::compute(s, &g, caps)?;
    let rank = rank_from_fiber(s, &g, &fiber, caps)?;
    if rank.pure_discrete {
        return Err(Precondition::PureDiscrete(s.name().into()).into());
    }
    let dense = related_states(&g, &fiber);
    let mut related: Vec<Vec<(Symbol, Coords)>> = vec![Vec::new(); s.size()];
    for (k, st) in fiber.states().iter().enumerate() {
        if dense[k] && !st.is_coincidence() {
            related[st.lower.0].push((st.upper, st.offset.clone()));
        }
    }
    // cells of every prototile, then stack letters from normalised classes
    let mut letters: BTreeMap<Stack, usize> = BTreeMap::new();
    let mut raw: Vec<Vec<(Coords, Coords, Stack)>> = Vec::new();
    for i in s.symbols() {
        let cells = prototile_cells(&g, &related, i, caps.states)?;
        let mut row = Vec::new();
        for (lo, hi, members) in cells {
            let mut m: Vec<(Symbol, Coords)> = members.iter().map(|(c, y)| (*c, geometry::sub(y, &lo))).collect();
            m.sort_by(|a, b| g.cmp(&a.1, &b.1).then(a.0.cmp(&b.0)));
            let st = Stack {
                members: m,
                length: geometry::sub(&hi, &lo),
            };
            letters.entry(st.clone()).or_insert(0);
            row.push((lo, hi, st));
        }
        raw.push(row);
    }
    // canonical order: singletons by base letter, then the rest by name
    let mut stacks: Vec<Stack> = letters.keys().cloned().collect();
    stacks.sort_by_key(|st| (!st.is_singleton(), st.members[0].0, stack_name(s, &g, st)));
    for (k, st) in stacks.iter().enumerate() {
        letters.insert(st.clone(), k);
    }
    let sigma: Vec<Vec<Cell>> = raw
        .iter()
        .map(|row| {
            row.iter()
                .map(|(lo, _, st)| Cell {
                    stack: Symbol(letters[st]),
                    start: lo.clone(),
                })
                .collect()
        })
        .collect();
    // read the inflated cell through the decomposition of the children
    let mut rules: Vec<Option<Word>> = vec![None; stacks.len()];
    for (i, row) in raw.iter().enumerate() {
        let mut pieces: Vec<(Coords, Coords, Symbol)> = Vec::new();
        for (child, off) in s.rule(Symbol(i)).iter().zip(&g.child_offsets[i]) {
            for (lo, hi, st) in &raw[child.0] {
                pieces.push((geometry::add(off, lo), geometry::add(off, hi), Symbol(letters[st])));
            }
        }
        for (lo, hi, st) in row {
            let (a, b) = (g.mul_lambda(lo), g.mul_lambda(hi));
            let start = pieces.iter().position(|p| g.cmp(&p.0, &a) == Ordering::Equal);
            let end = pieces.iter().position(|p| g.cmp(&p.1, &b) == Ordering::Equal);
            let (Some(x), Some(y)) = (start, end) else {
                return Err(Error::Internal(format!(
                    "inflated stack {} is not a union of stack cells",
                    stack_name(s, &g, st)
                )));
            };
            let word: Word = pieces[x..=y].iter().map(|p| p.2).collect();
            let k = letters[st];
            match &rules[k] {
                Some(w) if w != &word => {
                    return Err(Error::Internal(format!(
                        "stack {} has two different images",
                        stack_name(s, &g, st)
                    )))
                }
                _ => rules[k] = Some(word),
            }
        }
    }
    let names: Vec<String> = stacks.iter().map(|st| stack_name(s, &g, st)).collect();
    let rules: Vec<Word> = rules.into_iter().map(|r| r.expect("every stack occurs")).collect();
    let phi_s = Substitution::new(format!("{}-s", s.name()), names, rules)?;
    Ok(StackSystem {
        base: s.clone(),
        stacks,
        phi_s,
        sigma,
        rank,
        perron,
        geometry: g,
    })
}

#[derive(Clone, Debug)]
pub struct RpdPairSystem {
    pub psi_op: Substitution,
    pub iota: Vec<Symbol>,
    pub psi_p: Substitution,
    /// Letter of `psi_p` for each letter of `psi_op`.
    pub fold: Vec<Symbol>,
    /// The overlap state behind each letter of `psi_op`.
    pub pairs: Vec<OverlapState>,
    pub source: Substitution,
    pub x_block: IntMatrix,
    pub y_block: IntMatrix,
}

impl RpdPairSystem {
    pub fn sidecar_json(&self) -> Value {
        let mut fold = Map::new();
        for (i, f) in self.fold.iter().enumerate() {
            fold.insert(self.psi_op.name_of(Symbol(i)).to_string(), Value::String(self.psi_p.name_of(*f).to_string()));
        }
        let mut iota = Map::new();
        for (i, j) in self.iota.iter().enumerate() {
            iota.insert(self.psi_op.name_of(Symbol(i)).to_string(), Value::String(self.psi_op.name_of(*j).to_string()));
        }
        json!({
            "fold": fold,
            "iota": iota,
            "X": self.x_block.to_i64_rows(),
            "Y": self.y_block.to_i64_rows(),
        })
    }

    /// Letters of `psi_op` in pair order: one representative per `iota` orbit, then
    /// the partners in the same order.
    pub fn pair_order(&self) -> Vec<usize> {
        let reps: Vec<usize> = (0..self.iota.len()).filter(|&i| self.iota[i].0 > i).collect();
        let mut perm = reps.clone();
        perm.extend(reps.iter().map(|&i| self.iota[i].0));
        perm
    }
}

/// Ordered and unordered substitutions on the coincidence-free fiber pairs of the
/// stack substitution.
pub fn build_rpd_pairs(ss: &StackSystem, caps: &Caps) -> Result<RpdPairSystem> {
    let psi = &ss.phi_s;
    let perron = require_analysable(psi)?;
    let g = Geometry::new(psi, &perron)?;
    let fiber = FiberSet::compute(psi, &g, caps)?;
    let rank = rank_from_fiber(psi, &g, &fiber, caps)?;
    if rank.cr != 2 {
        return Err(Precondition::CoincidenceRankNotTwo(rank.cr).into());
    }
    if !ss.is_trivial() {
        // the quotient must not collapse further
        let again = build_stacks(psi, caps)?;
        if !again.is_trivial() {
            return Err(Precondition::StackRelationNotTrivial(psi.name().into()).into());
        }
    }
    let free = fiber.coincidence_free();
    let keep: Vec<bool> = free.clone();
    let graph = fiber.graph.restrict(&keep);
    // recurrent part: the unique closed strongly connected component
    let comps = strongly_connected_components(&graph.edges);
    let mut comp_of = vec![0; graph.len()];
    for (k, c) in comps.iter().enumerate() {
        for &v in c {
            comp_of[v] = k;
        }
    }
    let closed: Vec<&Vec<usize>> = comps
        .iter()
        .enumerate()
        .filter(|(k, c)| c.iter().all(|&v| graph.edges[v].iter().all(|&u| comp_of[u] == *k)))
        .map(|(_, c)| c)
        .collect();
    if closed.len() != 1 {
        return Err(Error::Internal(format!(
            "expected one recurrent class of rpd pairs, found {}",
            closed.len()
        )));
    }
    let pairs: Vec<OverlapState> = closed[0].iter().map(|&v| graph.states[v].clone()).collect();
    let index: BTreeMap<&OverlapState, usize> = pairs.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut rules = Vec::new();
    for p in &pairs {
        let word: Option<Word> = substitute_overlap(&g, p).iter().map(|q| index.get(q).map(|&i| Symbol(i))).collect();
        rules.push(word.ok_or_else(|| Error::Internal("rpd pair refines outside its class".into()))?);
    }
    let iota: Vec<Symbol> = pairs
        .iter()
        .map(|p| index.get(&p.swapped()).map(|&i| Symbol(i)))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Internal("rpd pairs are not closed under swapping".into()))?;
    let op_names: Vec<String> = pairs.iter().map(|p| p.label(psi, &g)).collect();
    let psi_op = Substitution::new(format!("{}-op", psi.name()), op_names, rules)?;

    // fold: representative of each orbit is the smaller state
    let reps: Vec<usize> = (0..pairs.len()).filter(|&i| iota[i].0 > i).collect();
    let mut fold = vec![Symbol(0); pairs.len()];
    for (k, &r) in reps.iter().enumerate() {
        fold[r] = Symbol(k);
        fold[iota[r].0] = Symbol(k);
    }
    let p_names: Vec<String> = reps
        .iter()
        .map(|&r| {
            let p = &pairs[r];
            format!("{}|{}@{}", psi.name_of(p.lower), psi.name_of(p.upper), g.format(&p.offset))
        })
        .collect();
    let p_rules: Vec<Word> = reps
        .iter()
        .map(|&r| psi_op.rule(Symbol(r)).iter().map(|c| fold[c.0]).collect())
        .collect();
    let psi_p = Substitution::new(format!("{}-p", psi.name()), p_names, p_rules)?;

    // validations
    for i in 0..pairs.len() {
        let mapped: Word = psi_op.rule(Symbol(i)).iter().map(|c| iota[c.0]).collect();
        if &mapped != psi_op.rule(iota[i]) {
            return Err(Error::Internal("ordered pair substitution is not swap equivariant".into()));
        }
    }
    if psi_op.size() != 2 * psi_p.size() {
        return Err(Error::Internal("fold is not two to one".into()));
    }
    let m = psi_op.abelianization();
    let mut perm = reps.clone();
    perm.extend(reps.iter().map(|&r| iota[r].0));
    let pm = m.permuted(&perm);
    let h = reps.len();
    let x = pm.block(0..h, 0..h);
    let y = pm.block(0..h, h..2 * h);
    if pm.block(h..2 * h, 0..h) != y || pm.block(h..2 * h, h..2 * h) != x {
        return Err(Error::Internal("ordered pair matrix lacks the block form".into()));
    }
    if psi_p.abelianization() != x.add(&y) {
        return Err(Error::Internal("unordered pair matrix differs from X+Y".into()));
    }
    Ok(RpdPairSystem {
        psi_op,
        iota,
        psi_p,
        fold,
        pairs,
        source: psi.clone(),
        x_block: x,
        y_block: y,
    })
}

/// Full pipeline to the unordered pair substitution, checked to be pure discrete.
pub fn maximal_pure_discrete_factor(s: &Substitution, caps: &Caps) -> Result<(StackSystem, RpdPairSystem)> {
    let proper = if s.is_proper() {
        s.clone()
    } else {
        crate::properize::properize(s)?.proper
    };
    let ss = build_stacks(&proper, caps)?;
    let rp = build_rpd_pairs(&ss, caps)?;
    let check = crate::pair_dynamics::coincidence_rank(&rp.psi_p, caps)?;
    if !check.pure_discrete {
        return Err(Error::Internal(format!(
            "unordered pair factor has coincidence rank {}",
            check.cr
        )));
    }
    Ok((ss, rp))
}

/// Search for a letter bijection carrying the rules of `a` onto those of `b`.
/// Returns `perm` with letter `i` of `a` sent to `perm[i]` of `b`.
pub fn isomorphic_up_to_relabeling(a: &Substitution, b: &Substitution) -> Option<Vec<usize>> {
    let n = a.size();
    if n != b.size() {
        return None;
    }
    let mut al: Vec<usize> = a.rules().iter().map(Vec::len).collect();
    let mut bl: Vec<usize> = b.rules().iter().map(Vec::len).collect();
    al.sort_unstable();
    bl.sort_unstable();
    if al != bl {
        return None;
    }
    fn consistent(a: &Substitution, b: &Substitution, map: &[Option<usize>]) -> bool {
        for (i, m) in map.iter().enumerate() {
            let Some(j) = m else { continue };
            let ra = a.rule(Symbol(i));
            let rb = b.rule(Symbol(*j));
            if ra.len() != rb.len() {
                return false;
            }
            for (x, y) in ra.iter().zip(rb) {
                if let Some(mx) = map[x.0] {
                    if mx != y.0 {
                        return false;
                    }
                }
            }
        }
        true
    }
    fn search(a: &Substitution, b: &Substitution, map: &mut Vec<Option<usize>>, used: &mut Vec<bool>, i: usize) -> bool {
        if i == map.len() {
            return true;
        }
        for j in 0..map.len() {
            if used[j] {
                continue;
            }
            map[i] = Some(j);
            used[j] = true;
            if consistent(a, b, map) && search(a, b, map, used, i + 1) {
                return true;
            }
            map[i] = None;
            used[j] = false;
        }
        false
    }
    let mut map = vec![None; n];
    let mut used = vec![false; n];
    if search(a, b, &mut map, &mut used, 0) {
        Some(map.into_iter().map(Option::unwrap).collect())
    } else {
        None
    }
}

/// Evrank check used by the pipeline: rank over the rationals of the ordered pair
/// matrix.
pub fn op_evrank(rp: &RpdPairSystem) -> usize {
    eventual_rank(&rp.psi_op.abelianization(), RankField::Rationals)
}

/// Merge letters with identical images until none remain. Each merge is a
/// conjugacy of tiling spaces: the substitution is injective on an aperiodic space,
/// so two letters with one image are never both needed. Returns the reduced
/// substitution and the class of every original letter.
pub fn merge_equal_images(s: &Substitution) -> Result<(Substitution, Vec<Symbol>)> {
    let mut class: Vec<usize> = (0..s.size()).collect();
    loop {
        let mut by_image: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut next = class.clone();
        let mut changed = false;
        for i in 0..s.size() {
            if class[i] != i {
                continue;
            }
            let img: Vec<usize> = s.rule(Symbol(i)).iter().map(|c| class[c.0]).collect();
            match by_image.get(&img) {
                Some(&j) => {
                    next[i] = j;
                    changed = true;
                }
                None => {
                    by_image.insert(img, i);
                }
            }
        }
        if !changed {
            break;
        }
        // follow chains so every letter points at a surviving representative
        for i in 0..next.len() {
            let mut r = next[i];
            while next[r] != r {
                r = next[r];
            }
            class[i] = r;
        }
        for i in 0..class.len() {
            class[i] = class[class[i]];
        }
    }
    let reps: Vec<usize> = (0..s.size()).filter(|&i| class[i] == i).collect();
    let index: BTreeMap<usize, usize> = reps.iter().enumerate().map(|(k, &r)| (r, k)).collect();
    let map: Vec<Symbol> = class.iter().map(|r| Symbol(index[r])).collect();
    let names: Vec<String> = reps.iter().map(|&r| s.name_of(Symbol(r)).to_string()).collect();
    let rules: Vec<Word> = reps
        .iter()
        .map(|&r| s.rule(Symbol(r)).iter().map(|c| map[c.0]).collect())
        .collect();
    Ok((Substitution::new(format!("{}-reduced", s.name()), names, rules)?, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::properize::properize;

    fn sub(name: &str, rules: &[(&str, &str)]) -> Substitution {
        Substitution::from_rules(name, rules).unwrap()
    }

    fn proper(name: &str, rules: &[(&str, &str)]) -> Substitution {
        properize(&sub(name, rules)).unwrap().proper
    }

    #[test]
    fn thue_morse_stacks_are_singletons() {
        let s = proper("tm", &[("a", "ab"), ("b", "ba")]);
        let ss = build_stacks(&s, &Caps::default()).unwrap();
        assert!(ss.is_trivial());
        assert_eq!(ss.phi_s.rules(), s.rules());
        assert_eq!(ss.phi_s.names(), s.names());
        assert_eq!(ss.rank.cr, 2);
    }

    #[test]
    fn stack_cells_fill_each_prototile() {
        let s = proper("abb", &[("a", "abb"), ("b", "baa")]);
        let ss = build_stacks(&s, &Caps::default()).unwrap();
        let g = &ss.geometry;
        for (i, cells) in ss.sigma.iter().enumerate() {
            let mut pos = g.zero();
            for c in cells {
                assert_eq!(c.start, pos);
                pos = geometry::add(&pos, &ss.stacks[c.stack.0].length);
            }
            assert_eq!(&pos, g.length(Symbol(i)));
        }
    }

    #[test]
    fn pure_discrete_input_is_refused() {
        let s = proper("fib", &[("a", "ab"), ("b", "a")]);
        match build_stacks(&s, &Caps::default()) {
            Err(Error::Precondition(Precondition::PureDiscrete(_))) => {}
            other => panic!("expected pure discrete refusal, got {other:?}"),
        }
    }

    #[test]
    fn improper_input_is_refused() {
        let s = sub("tm", &[("a", "ab"), ("b", "ba")]);
        assert!(matches!(
            build_stacks(&s, &Caps::default()),
            Err(Error::Precondition(Precondition::NotProper(_)))
        ));
    }

    #[test]
    fn thue_morse_factor_is_period_doubling() {
        let (_, rp) = maximal_pure_discrete_factor(&sub("tm", &[("a", "ab"), ("b", "ba")]), &Caps::default()).unwrap();
        assert_eq!(rp.psi_op.size(), 2 * rp.psi_p.size());
        for i in 0..rp.iota.len() {
            assert_ne!(rp.iota[i].0, i);
            assert_eq!(rp.iota[rp.iota[i].0].0, i);
            assert_eq!(rp.fold[i], rp.fold[rp.iota[i].0]);
        }
        let (reduced, _) = merge_equal_images(&rp.psi_p).unwrap();
        let pd = proper("pd", &[("a", "ab"), ("b", "aa")]);
        assert!(isomorphic_up_to_relabeling(&reduced, &pd).is_some());
    }

    #[test]
    fn odd_norm_factor_is_pure_discrete() {
        let (_, rp) = maximal_pure_discrete_factor(&sub("abb", &[("a", "abb"), ("b", "baa")]), &Caps::default()).unwrap();
        let cr = crate::pair_dynamics::coincidence_rank(&rp.psi_p, &Caps::default()).unwrap();
        assert_eq!(cr.cr, 1);
        assert_eq!(rp.psi_op.abelianization().permuted(&rp.pair_order()).block(0..rp.psi_p.size(), 0..rp.psi_p.size()), rp.x_block);
    }

    #[test]
    fn relabeling_search() {
        let fib = sub("fib", &[("a", "ab"), ("b", "a")]);
        let swapped = sub("fib2", &[("x", "y"), ("y", "yx")]);
        assert_eq!(isomorphic_up_to_relabeling(&fib, &swapped), Some(vec![1, 0]));
        let tm = sub("tm", &[("a", "ab"), ("b", "ba")]);
        let pd = sub("pd", &[("a", "ab"), ("b", "aa")]);
        assert_eq!(isomorphic_up_to_relabeling(&tm, &pd), None);
        assert_eq!(isomorphic_up_to_relabeling(&tm, &fib), None);
    }

    #[test]
    fn merging_identical_images() {
        let s = sub("m", &[("a", "abc"), ("b", "ac"), ("c", "ac")]);
        let (r, map) = merge_equal_images(&s).unwrap();
        assert_eq!(r.size(), 2);
        assert_eq!(map, vec![Symbol(0), Symbol(1), Symbol(1)]);
        assert_eq!(r.rule(Symbol(0)), &vec![Symbol(0), Symbol(1), Symbol(1)]);
    }
}

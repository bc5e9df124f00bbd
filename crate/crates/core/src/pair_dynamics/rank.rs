//! Coincidence rank from families of mutually fiber-related tiles over a point.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde_json::{json, Value};

use super::{closure, strongly_connected_components, Caps, FiberSet, OverlapState};
use crate::algebra::perron_data;
use crate::error::{Error, Precondition, Result};
use crate::geometry::{self, Coords, Geometry};
use crate::properize::properize;
use crate::subst::{Substitution, Symbol};

/// Positioned tiles sorted by position then letter, translated so the first sits at 0.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TileTuple {
    pub members: Vec<(Symbol, Coords)>,
}

impl TileTuple {
    pub fn canonical(g: &Geometry, mut members: Vec<(Symbol, Coords)>) -> TileTuple {
        members.sort_by(|a, b| g.cmp(&a.1, &b.1).then(a.0.cmp(&b.0)));
        let base = members[0].1.clone();
        for m in &mut members {
            m.1 = geometry::sub(&m.1, &base);
        }
        TileTuple { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Two members are the same tile at the same place.
    pub fn collapsed(&self) -> bool {
        self.members.windows(2).any(|w| w[0] == w[1])
    }

    /// Common support `(left, right)` if its interior is nonempty.
    pub fn support(&self, g: &Geometry) -> Option<(Coords, Coords)> {
        let mut left = self.members[0].1.clone();
        let mut right = geometry::add(&self.members[0].1, g.length(self.members[0].0));
        for (c, x) in &self.members[1..] {
            if g.cmp(x, &left) == Ordering::Greater {
                left = x.clone();
            }
            let end = geometry::add(x, g.length(*c));
            if g.cmp(&end, &right) == Ordering::Less {
                right = end;
            }
        }
        (g.cmp(&left, &right) == Ordering::Less).then_some((left, right))
    }

    pub fn label(&self, s: &Substitution, g: &Geometry) -> String {
        let parts: Vec<String> = self
            .members
            .iter()
            .map(|(c, x)| format!("{}@{}", s.name_of(*c), g.format(x)))
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// Refine a tuple under one substitution step: one child tuple per piece of the
/// inflated common support cut at every child boundary.
pub fn substitute_tuple(g: &Geometry, t: &TileTuple) -> Vec<TileTuple> {
    if t.collapsed() {
        return Vec::new();
    }
    let Some((left, right)) = t.support(g) else {
        return Vec::new();
    };
    let (left, right) = (g.mul_lambda(&left), g.mul_lambda(&right));
    // children of every member: (start, end, letter)
    let kids: Vec<Vec<(Coords, Coords, Symbol)>> = t
        .members
        .iter()
        .map(|(c, x)| {
            let base = g.mul_lambda(x);
            g.rules[c.0]
                .iter()
                .zip(&g.child_offsets[c.0])
                .map(|(k, off)| {
                    let s = geometry::add(&base, off);
                    let e = geometry::add(&s, g.length(*k));
                    (s, e, *k)
                })
                .collect()
        })
        .collect();
    let mut cuts: Vec<Coords> = vec![left.clone(), right.clone()];
    for ks in &kids {
        for (s, _, _) in ks {
            if g.cmp(s, &left) == Ordering::Greater && g.cmp(s, &right) == Ordering::Less {
                cuts.push(s.clone());
            }
        }
    }
    cuts.sort_by(|a, b| g.cmp(a, b));
    cuts.dedup_by(|a, b| g.cmp(a, b) == Ordering::Equal);
    let mut out = Vec::with_capacity(cuts.len());
    for w in cuts.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let members = kids
            .iter()
            .map(|ks| {
                let (s, _, k) = ks
                    .iter()
                    .find(|(s, e, _)| g.cmp(s, lo) != Ordering::Greater && g.cmp(e, hi) != Ordering::Less)
                    .expect("children tile the inflated support");
                (*k, s.clone())
            })
            .collect();
        out.push(TileTuple::canonical(g, members));
    }
    out
}

#[derive(Clone, Debug)]
pub struct RankLevel {
    pub k: usize,
    pub candidates: usize,
    pub explored: usize,
    pub realizable: usize,
    pub good: usize,
}

#[derive(Clone, Debug)]
pub struct CoincidenceRank {
    pub cr: usize,
    pub pure_discrete: bool,
    /// A coincidence-free family of size `cr`, when `cr > 1`.
    pub witness: Option<TileTuple>,
    pub levels: Vec<RankLevel>,
    pub fiber_states: usize,
    pub certificate: String,
    /// Substitution the analysis ran on.
    pub analysed: Substitution,
}

impl CoincidenceRank {
    pub fn to_json(&self, g: Option<&Geometry>) -> Value {
        json!({
            "cr": self.cr,
            "pure_discrete": self.pure_discrete,
            "fiber_states": self.fiber_states,
            "certificate": self.certificate,
            "analysed_on": self.analysed.name(),
            "witness": match (&self.witness, g) {
                (Some(t), Some(g)) => Value::String(t.label(&self.analysed, g)),
                (Some(_), None) => Value::String("not applicable: no geometry".into()),
                (None, _) => Value::String("not applicable: coincidence rank is 1".into()),
            },
            "levels": self.levels.iter().map(|l| json!({
                "k": l.k,
                "candidates": l.candidates,
                "explored": l.explored,
                "realizable": l.realizable,
                "coincidence_free": l.good,
            })).collect::<Vec<_>>(),
        })
    }
}

/// All canonical `k`-tuples of distinct non-coincident tiles that are pairwise fiber
/// related and share an interior point.
fn candidate_tuples(g: &Geometry, fiber: &FiberSet, k: usize, cap: usize) -> Result<Vec<TileTuple>> {
    let size = g.lengths.len();
    let mut neighbours: Vec<Vec<(Symbol, Coords)>> = vec![Vec::new(); size];
    for st in fiber.states() {
        if !st.is_coincidence() {
            neighbours[st.lower.0].push((st.upper, st.offset.clone()));
        }
    }
    let related = |a: &(Symbol, Coords), b: &(Symbol, Coords)| {
        let st = OverlapState::new(a.0, b.0, geometry::sub(&b.1, &a.1));
        !st.is_coincidence() && fiber.contains(&st)
    };
    let mut out = BTreeSet::new();
    for anchor in 0..size {
        let base = (Symbol(anchor), g.zero());
        let nb = &neighbours[anchor];
        // cliques among the neighbours, in index order
        let mut stack: Vec<(Vec<usize>, usize)> = vec![(Vec::new(), 0)];
        while let Some((chosen, from)) = stack.pop() {
            if chosen.len() + 1 == k {
                let mut members = vec![base.clone()];
                members.extend(chosen.iter().map(|&i| nb[i].clone()));
                let t = TileTuple::canonical(g, members);
                if t.support(g).is_some() {
                    out.insert(t);
                    if out.len() > cap {
                        return Err(Error::CapExceeded {
                            stage: "coincidence_rank".into(),
                            what: format!("candidate {k}-tuples"),
                            limit: cap,
                        });
                    }
                }
                continue;
            }
            for i in from..nb.len() {
                if chosen.iter().all(|&j| related(&nb[j], &nb[i])) {
                    let mut next = chosen.clone();
                    next.push(i);
                    let probe = TileTuple::canonical(
                        g,
                        std::iter::once(base.clone()).chain(next.iter().map(|&j| nb[j].clone())).collect(),
                    );
                    if probe.support(g).is_some() {
                        stack.push((next, i + 1));
                    }
                }
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Coincidence rank of `s` computed directly on its own tiles.
pub fn coincidence_rank_of_proper(s: &Substitution, caps: &Caps) -> Result<CoincidenceRank> {
    let p = perron_data(&s.abelianization())?;
    if !p.pisot {
        return Err(Precondition::NotPisot(s.name().into()).into());
    }
    let g = Geometry::new(s, &p)?;
    let fiber = FiberSet::compute(s, &g, caps)?;
    rank_from_fiber(s, &g, &fiber, caps)
}

pub(crate) fn rank_from_fiber(s: &Substitution, g: &Geometry, fiber: &FiberSet, caps: &Caps) -> Result<CoincidenceRank> {
    let mut levels = Vec::new();
    let mut best: Option<TileTuple> = None;
    let mut cr = 1;
    for k in 2..=caps.tuple {
        let cands = candidate_tuples(g, fiber, k, caps.states)?;
        if cands.is_empty() {
            levels.push(RankLevel { k, candidates: 0, explored: 0, realizable: 0, good: 0 });
            break;
        }
        let (tuples, edges) = closure(cands.clone(), caps, "coincidence_rank", |t| substitute_tuple(g, t))
            .map_err(|e| e.in_stage(&format!("{k}-tuples")))?;
        let n = tuples.len();
        let mut cyclic = vec![false; n];
        for comp in strongly_connected_components(&edges) {
            if comp.len() > 1 || edges[comp[0]].contains(&comp[0]) {
                for v in comp {
                    cyclic[v] = true;
                }
            }
        }
        let realizable = forward(&edges, &cyclic);
        let collapsed: Vec<bool> = tuples.iter().map(|t| t.collapsed()).collect();
        let tainted = backward(&edges, &collapsed);
        let good: Vec<usize> = (0..n).filter(|&i| realizable[i] && !tainted[i]).collect();
        levels.push(RankLevel {
            k,
            candidates: cands.len(),
            explored: n,
            realizable: realizable.iter().filter(|&&r| r).count(),
            good: good.len(),
        });
        if good.is_empty() {
            break;
        }
        cr = k;
        best = Some(tuples[good[0]].clone());
        if k == caps.tuple {
            return Err(Error::CapExceeded {
                stage: "coincidence_rank".into(),
                what: "tuple size".into(),
                limit: caps.tuple,
            });
        }
    }
    let certificate = if cr == 1 {
        "every realizable pair of fiber tiles refines to a coincidence".to_string()
    } else {
        format!(
            "a realizable coincidence-free family of {cr} tiles exists and none of {} tiles",
            cr + 1
        )
    };
    Ok(CoincidenceRank {
        cr,
        pure_discrete: cr == 1,
        witness: best,
        levels,
        fiber_states: fiber.len(),
        certificate,
        analysed: s.clone(),
    })
}

fn forward(edges: &[Vec<usize>], sources: &[bool]) -> Vec<bool> {
    let mut seen = sources.to_vec();
    let mut stack: Vec<usize> = (0..edges.len()).filter(|&i| sources[i]).collect();
    while let Some(v) = stack.pop() {
        for &u in &edges[v] {
            if !seen[u] {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    seen
}

fn backward(edges: &[Vec<usize>], targets: &[bool]) -> Vec<bool> {
    let mut rev = vec![Vec::new(); edges.len()];
    for (i, es) in edges.iter().enumerate() {
        for &j in es {
            rev[j].push(i);
        }
    }
    forward(&rev, targets)
}

/// Coincidence rank of a primitive aperiodic Pisot substitution, computed on its
/// proper rewrite.
pub fn coincidence_rank(s: &Substitution, caps: &Caps) -> Result<CoincidenceRank> {
    if !s.is_primitive() {
        return Err(Precondition::NotPrimitive(s.name().into()).into());
    }
    s.require_aperiodic()?;
    let p = perron_data(&s.abelianization())?;
    if !p.pisot {
        return Err(Precondition::NotPisot(s.name().into()).into());
    }
    let proper = if s.is_proper() { s.clone() } else { properize(s)?.proper };
    coincidence_rank_of_proper(&proper, caps)
}

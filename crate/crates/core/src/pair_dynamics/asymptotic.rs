//! Asymptotic pairs among tilings fixed by a power of the substitution.
//!
//! Two tilings that agree on a half-line form, up to a common translation, a pair
//! permuted by the substitution, so some power fixes both exactly about one common
//! centre. Such a tiling is pinned down by the tile chain through its centre: a pair
//! of letters meeting at the centre, or a letter returning inside its own image.
//! Whether two of them agree on a half-line is decided by refining their overlaps.

use std::collections::BTreeSet;

use num_integer::Integer;
use serde_json::{json, Value};

use super::{indexed_overlaps, overlap_closure, Caps, OverlapState};
use crate::algebra::perron_data;
use crate::error::{Error, Precondition, Result};
use crate::geometry::{self, Coords, Geometry};
use crate::subst::{Substitution, Symbol};

/// A tile returning to itself after `k` inflations: child index taken at each step.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Chain {
    tiles: Vec<Symbol>,
    digits: Vec<usize>,
    /// Position of the returning copy inside the `k`-fold inflated tile.
    offset: Coords,
}

impl Chain {
    fn new(g: &Geometry, start: Symbol, digits: Vec<usize>) -> Chain {
        let mut tiles = vec![start];
        let mut offset = g.zero();
        for &d in &digits {
            let t = *tiles.last().unwrap();
            offset = geometry::add(&g.mul_lambda(&offset), &g.child_offsets[t.0][d]);
            tiles.push(g.rules[t.0][d]);
        }
        Chain { tiles, digits, offset }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixedTiling {
    /// Letters `left` and `right` meet at the centre.
    Boundary { left: Symbol, right: Symbol },
    /// The centre is inside `tile`, at the copy of `tile` with index `index` in its
    /// `k`-th image.
    Interior { tile: Symbol, index: usize },
}

impl FixedTiling {
    pub fn label(&self, s: &Substitution) -> String {
        match self {
            FixedTiling::Boundary { left, right } => format!("{}.{}", s.name_of(*left), s.name_of(*right)),
            FixedTiling::Interior { tile, index } => format!("{}[{}]", s.name_of(*tile), index),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AsymptoticStructure {
    /// Power of the substitution fixing every listed tiling.
    pub k: usize,
    pub tilings: Vec<FixedTiling>,
    /// Pairs agreeing on a right half-line.
    pub forward: Vec<(usize, usize)>,
    /// Pairs agreeing on a left half-line.
    pub backward: Vec<(usize, usize)>,
    /// Alternating cycles through at least four tilings. A pair asymptotic in both
    /// directions is listed under `bi_asymptotic` in the JSON, not as a cycle.
    pub cycles: Vec<Vec<usize>>,
}

impl AsymptoticStructure {
    pub fn to_json(&self, s: &Substitution) -> Value {
        let l = |i: &usize| self.tilings[*i].label(s);
        let both: Vec<[String; 2]> = self
            .forward
            .iter()
            .filter(|p| self.backward.contains(p))
            .map(|(a, b)| [l(a), l(b)])
            .collect();
        json!({
            "power": self.k,
            "fixed_tilings": self.tilings.iter().map(|t| t.label(s)).collect::<Vec<_>>(),
            "forward_asymptotic": self.forward.iter().map(|(a, b)| [l(a), l(b)]).collect::<Vec<_>>(),
            "backward_asymptotic": self.backward.iter().map(|(a, b)| [l(a), l(b)]).collect::<Vec<_>>(),
            "bi_asymptotic": both,
            "cycles": self.cycles.iter().map(|c| c.iter().map(l).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// Chains through the centre from the right and from the left.
fn chains(g: &Geometry, t: &FixedTiling, k: usize) -> (Chain, Chain) {
    match *t {
        FixedTiling::Boundary { left, right } => {
            let plus = Chain::new(g, right, vec![0; k]);
            let mut digits = Vec::with_capacity(k);
            let mut c = left;
            for _ in 0..k {
                let r = &g.rules[c.0];
                digits.push(r.len() - 1);
                c = r[r.len() - 1];
            }
            (plus, Chain::new(g, left, digits))
        }
        FixedTiling::Interior { tile, index } => {
            // split the index in the k-th image into one child index per step
            let mut digits = Vec::with_capacity(k);
            let mut t = tile;
            let mut idx = index;
            for depth in (0..k).rev() {
                for (d, c) in g.rules[t.0].iter().enumerate() {
                    let len = image_length(g, *c, depth);
                    if idx < len {
                        digits.push(d);
                        t = *c;
                        break;
                    }
                    idx -= len;
                }
            }
            let ch = Chain::new(g, tile, digits);
            (ch.clone(), ch)
        }
    }
}

fn image_length(g: &Geometry, c: Symbol, depth: usize) -> usize {
    let mut counts = vec![0usize; g.rules.len()];
    counts[c.0] = 1;
    for _ in 0..depth {
        let mut next = vec![0usize; counts.len()];
        for (i, &n) in counts.iter().enumerate() {
            for x in &g.rules[i] {
                next[x.0] += n;
            }
        }
        counts = next;
    }
    counts.iter().sum()
}

/// Overlaps of the pair beyond the centre state after `k` refinements, on the right
/// (`right = true`) or on the left. `None` when the tiles share no lattice.
fn beyond_centre(g: &Geometry, a: &Chain, b: &Chain, k: usize, right: bool) -> Result<Option<Vec<OverlapState>>> {
    let Some(v) = g.fixed_point_of_affine(&geometry::sub(&b.offset, &a.offset), k) else {
        return Ok(None);
    };
    let start = OverlapState::new(a.tiles[0], b.tiles[0], v);
    if !start.is_valid(g) {
        return Err(Error::Internal("centre tiles of fixed tilings do not overlap".into()));
    }
    let mut st = start.clone();
    let mut out = Vec::new();
    for m in 0..k {
        let kids = indexed_overlaps(g, &g.rules[st.lower.0], &g.rules[st.upper.0], &g.mul_lambda(&st.offset));
        let pos = kids
            .iter()
            .position(|(i, j, _)| *i == a.digits[m] && *j == b.digits[m])
            .ok_or_else(|| Error::Internal("centre tiles lost under refinement".into()))?;
        if right {
            out.extend(kids[pos + 1..].iter().map(|x| x.2.clone()));
        } else {
            out.extend(kids[..pos].iter().map(|x| x.2.clone()));
        }
        st = kids[pos].2.clone();
    }
    if st != start {
        return Err(Error::Internal("centre overlap is not fixed".into()));
    }
    Ok(Some(out))
}

/// Every state refines to coincidences within finitely many steps.
fn eventually_coincident(g: &Geometry, states: &[OverlapState], caps: &Caps) -> Result<bool> {
    if states.iter().all(OverlapState::is_coincidence) {
        return Ok(true);
    }
    let graph = overlap_closure(g, states, caps).map_err(|e| e.in_stage("asymptotic"))?;
    let keep: Vec<bool> = graph.states.iter().map(|s| !s.is_coincidence()).collect();
    let sub = graph.restrict(&keep);
    // a cycle of non-coincident overlaps keeps some points apart forever
    Ok(!sub.cyclic_states().iter().any(|&c| c))
}

/// Asymptotic pairs and alternating cycles among the tilings fixed by the power of
/// `s` that fixes all of its periodic words.
pub fn fixed_tiling_asymptotic_cycles(s: &Substitution, caps: &Caps) -> Result<AsymptoticStructure> {
    if !s.is_primitive() {
        return Err(Precondition::NotPrimitive(s.name().into()).into());
    }
    s.require_aperiodic()?;
    let p = perron_data(&s.abelianization())?;
    // overlap closures are finite only for a Pisot dilation
    if !p.pisot {
        return Err(Precondition::NotPisot(s.name().into()).into());
    }
    let g = Geometry::new(s, &p)?;
    let seeds = s.periodic_biinfinite_words()?;
    let k = seeds.iter().fold(1usize, |acc, sd| acc.lcm(&sd.period));
    let mut tilings: Vec<FixedTiling> = seeds
        .iter()
        .map(|sd| FixedTiling::Boundary {
            left: sd.left,
            right: sd.right,
        })
        .collect();
    for i in s.symbols() {
        let img = s.iterate(&[i], k);
        for (index, c) in img.iter().enumerate().take(img.len().saturating_sub(1)).skip(1) {
            if *c == i {
                tilings.push(FixedTiling::Interior { tile: i, index });
            }
        }
    }
    let ch: Vec<(Chain, Chain)> = tilings.iter().map(|t| chains(&g, t, k)).collect();
    let n = tilings.len();
    let mut forward = Vec::new();
    let mut backward = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if let Some(r) = beyond_centre(&g, &ch[a].0, &ch[b].0, k, true)? {
                if eventually_coincident(&g, &r, caps)? {
                    forward.push((a, b));
                }
            }
            if let Some(l) = beyond_centre(&g, &ch[a].1, &ch[b].1, k, false)? {
                if eventually_coincident(&g, &l, caps)? {
                    backward.push((a, b));
                }
            }
        }
    }
    let fw: BTreeSet<(usize, usize)> = forward.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
    let bw: BTreeSet<(usize, usize)> = backward.iter().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
    let cycles = crate::subst::alternating_cycles_by(n, |i, j, f| if f { fw.contains(&(i, j)) } else { bw.contains(&(i, j)) });
    Ok(AsymptoticStructure {
        k,
        tilings,
        forward,
        backward,
        cycles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::properize::properize;

    fn sub(name: &str, rules: &[(&str, &str)]) -> Substitution {
        Substitution::from_rules(name, rules).unwrap()
    }

    fn structure(s: &Substitution) -> AsymptoticStructure {
        fixed_tiling_asymptotic_cycles(s, &Caps::default()).unwrap()
    }

    #[test]
    fn thue_morse_seeds_form_a_square() {
        let s = sub("tm", &[("a", "ab"), ("b", "ba")]);
        let a = structure(&s);
        assert_eq!(a.cycles.len(), 1);
        let mut labels: Vec<String> = a.cycles[0].iter().map(|&i| a.tilings[i].label(&s)).collect();
        labels.sort();
        assert_eq!(labels, ["a.a", "a.b", "b.a", "b.b"]);
        assert_eq!(s.asymptotic_cycles().unwrap().len(), 1);
    }

    #[test]
    fn proper_thue_morse_keeps_its_cycle() {
        let p = properize(&sub("tm", &[("a", "ab"), ("b", "ba")])).unwrap().proper;
        // the single seed of a proper substitution cannot carry a cycle by itself
        assert!(p.asymptotic_cycles().unwrap().is_empty());
        let a = structure(&p);
        assert!(!a.cycles.is_empty());
        assert!(a.cycles.iter().all(|c| c.len() >= 4));
    }

    #[test]
    fn fibonacci_has_no_cycle() {
        let f = sub("fib", &[("a", "ab"), ("b", "a")]);
        for s in [f.clone(), properize(&f).unwrap().proper] {
            let a = structure(&s);
            assert!(a.cycles.is_empty(), "{}", s.name());
        }
        // the two fixed points a.a and b.a differ in two places only
        let a = structure(&f);
        let j = a.to_json(&f);
        assert_eq!(j["bi_asymptotic"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn asymptotic_pairs_are_symmetric_under_reversal() {
        let s = sub("abb", &[("a", "abb"), ("b", "baa")]);
        let a = structure(&s);
        let rev: Vec<_> = s.rules().iter().map(|w| w.iter().rev().copied().collect()).collect();
        let r = structure(&Substitution::new("abb-rev", s.names().to_vec(), rev).unwrap());
        assert_eq!(a.forward.len(), r.backward.len());
        assert_eq!(a.backward.len(), r.forward.len());
        assert_eq!(a.cycles.len(), r.cycles.len());
    }
}

//! Rewriting a substitution as a proper one on return words.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::subst::{Substitution, Symbol, Word};

/// Largest power searched for an anchor pair or for properness of the induced rule.
const POWER_BOUND: usize = 720;

#[derive(Clone, Debug)]
pub struct ProperRewrite {
    pub proper: Substitution,
    /// Total power of the original substitution realised by one step of `proper`.
    pub power: usize,
    /// Power used to pick the anchor pair.
    pub anchor_power: usize,
    /// Original word for each letter of `proper`.
    pub word_alphabet: Vec<Word>,
    pub anchor: (Symbol, Symbol),
}

impl ProperRewrite {
    /// Flatten a word over the proper alphabet back to the original alphabet.
    pub fn decode(&self, w: &[Symbol]) -> Word {
        w.iter().flat_map(|c| self.word_alphabet[c.0].iter().copied()).collect()
    }

    pub fn to_json(&self, original: &Substitution) -> Value {
        let mut letters = Map::new();
        for (i, w) in self.word_alphabet.iter().enumerate() {
            letters.insert(
                self.proper.name_of(Symbol(i)).to_string(),
                Value::String(original.word_string(w)),
            );
        }
        json!({
            "power": self.power,
            "anchor_power": self.anchor_power,
            "anchor": [original.name_of(self.anchor.0), original.name_of(self.anchor.1)],
            "letters": letters,
            "substitution": self.proper.to_json(),
        })
    }
}

pub fn is_proper(s: &Substitution) -> bool {
    s.is_proper()
}

fn iterate_map(map: &[Symbol], c: Symbol, n: usize) -> Symbol {
    (0..n).fold(c, |c, _| map[c.0])
}

/// Smallest `n`, then a preferred pair `(a, b)`: `φ^n(a)` starts with `a`, `φ^n(b)` ends
/// with `b`, and `ba` is allowed. Pairs of distinct letters are preferred, each class
/// ordered by letter index.
pub fn find_anchor(s: &Substitution) -> Result<(usize, Symbol, Symbol)> {
    let two = s.language(2)?;
    let f = s.first_letters();
    let g = s.last_letters();
    for n in 1..=POWER_BOUND {
        let mut same = None;
        for a in s.symbols().filter(|&a| iterate_map(&f, a, n) == a) {
            for b in s.symbols().filter(|&b| iterate_map(&g, b, n) == b) {
                if !two.contains(&vec![b, a]) {
                    continue;
                }
                if a != b {
                    return Ok((n, a, b));
                }
                same.get_or_insert((n, a, b));
            }
        }
        if let Some(x) = same {
            return Ok(x);
        }
    }
    Err(Error::Internal(format!(
        "no anchor pair for `{}` up to power {POWER_BOUND}",
        s.name()
    )))
}

fn has_junction(w: &[Symbol], a: Symbol, b: Symbol) -> bool {
    w.windows(2).any(|x| x[0] == b && x[1] == a)
}

/// Every word `w` that starts with `a`, ends with `b`, contains no `ba`, and has
/// `bwa` allowed.
pub fn return_words(s: &Substitution, a: Symbol, b: Symbol) -> Result<Vec<Word>> {
    // once every factor of length m contains a junction, each `bwa` has length at
    // most m + 1 and so sits inside some factor of that length
    let mut m = 4;
    let lang = loop {
        let lang = s.language(m + 1)?;
        if lang.iter().all(|w| has_junction(&w[..m], a, b)) {
            break lang;
        }
        m *= 2;
        if m > 1 << 14 {
            return Err(Error::Internal("junctions are not syndetic".into()));
        }
    };
    let mut out = BTreeSet::new();
    for x in lang {
        let cuts: Vec<usize> = (0..x.len() - 1).filter(|&i| x[i] == b && x[i + 1] == a).collect();
        for p in cuts.windows(2) {
            out.insert(x[p[0] + 1..=p[1]].to_vec());
        }
    }
    Ok(out.into_iter().collect())
}

/// Cut a word at every `ba` junction, returning the pieces.
fn split_at_junctions(w: &[Symbol], a: Symbol, b: Symbol) -> Vec<Word> {
    let mut pieces = Vec::new();
    let mut start = 0;
    for i in 0..w.len().saturating_sub(1) {
        if w[i] == b && w[i + 1] == a {
            pieces.push(w[start..=i].to_vec());
            start = i + 1;
        }
    }
    pieces.push(w[start..].to_vec());
    pieces
}

pub fn properize(s: &Substitution) -> Result<ProperRewrite> {
    s.language(1)?;
    s.require_aperiodic()?;
    let (n, a, b) = find_anchor(s)?;
    let words = return_words(s, a, b)?;
    let index: BTreeMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let names: Vec<String> = (0..words.len()).map(|i| format!("p{i}")).collect();
    let sn = s.power(n);
    let mut rules = Vec::new();
    for w in &words {
        let img = sn.apply(w);
        let mut rule = Vec::new();
        for piece in split_at_junctions(&img, a, b) {
            let Some(&i) = index.get(&piece) else {
                return Err(Error::Internal(format!(
                    "image piece {} is not a return word",
                    s.word_string(&piece)
                )));
            };
            rule.push(Symbol(i));
        }
        rules.push(rule);
    }
    let base = Substitution::new(format!("{}-proper", s.name()), names, rules)?;
    for k in 1..=POWER_BOUND {
        let cand = base.power(k);
        if cand.is_proper() {
            return Ok(ProperRewrite {
                proper: cand.with_name(format!("{}-proper", s.name())),
                power: n * k,
                anchor_power: n,
                word_alphabet: words,
                anchor: (a, b),
            });
        }
    }
    Err(Error::Internal("induced substitution never becomes proper".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sub(rules: &[(&str, &str)]) -> Substitution {
        Substitution::from_rules("t", rules).unwrap()
    }

    #[test]
    fn fibonacci_rewrite() {
        let s = sub(&[("a", "ab"), ("b", "a")]);
        let r = properize(&s).unwrap();
        assert_eq!((r.power, r.anchor), (2, (Symbol(0), Symbol(1))));
        let words: Vec<String> = r.word_alphabet.iter().map(|w| s.word_string(w)).collect();
        assert_eq!(words, ["aab", "ab"]);
        assert_eq!(r.proper.word_string(r.proper.rule(Symbol(0))), "p1 p0 p0");
        assert_eq!(r.proper.word_string(r.proper.rule(Symbol(1))), "p1 p0");
        assert!(r.proper.is_proper());
    }

    #[test]
    fn proper_input_keeps_power_one() {
        let s = sub(&[("a", "aab"), ("b", "ab")]);
        let r = properize(&s).unwrap();
        assert_eq!(r.power, 1);
        assert!(r.proper.is_proper());
    }

    #[test]
    fn thue_morse_rewrite_decodes() {
        let s = sub(&[("a", "ab"), ("b", "ba")]);
        let r = properize(&s).unwrap();
        assert_eq!(r.anchor_power, 2);
        let sp = s.power(r.power);
        for c in r.proper.symbols() {
            assert_eq!(r.decode(r.proper.rule(c)), sp.apply(&r.word_alphabet[c.0]));
        }
    }

    #[test]
    fn split_pieces() {
        let s = sub(&[("a", "ab"), ("b", "a")]);
        let w = s.parse_word("abaabab").unwrap();
        let p: Vec<String> = split_at_junctions(&w, Symbol(0), Symbol(1)).iter().map(|x| s.word_string(x)).collect();
        assert_eq!(p, ["ab", "aab", "ab"]);
    }
}

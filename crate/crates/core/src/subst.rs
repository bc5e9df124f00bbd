//! Alphabets, words and substitutions.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use serde_json::{Map, Value};

use crate::algebra::IntMatrix;
use crate::error::{Error, Precondition, Result};

/// Index of a letter in its alphabet.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Symbol(pub usize);

impl Symbol {
    pub fn index(self) -> usize {
        self.0
    }
}

pub type Word = Vec<Symbol>;

/// Default bound for the complexity scan in [`Substitution::is_aperiodic`].
pub const APERIODICITY_BOUND: usize = 64;

#[derive(Clone, PartialEq, Eq)]
pub struct Substitution {
    name: String,
    names: Vec<String>,
    rules: Vec<Word>,
}

impl fmt::Debug for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.name)?;
        for (i, r) in self.rules.iter().enumerate() {
            write!(f, " {}->{}", self.names[i], self.word_string(r))?;
        }
        Ok(())
    }
}

/// A bi-infinite word fixed by `φ^period`, written `left.right` around the origin.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct BiInfiniteSeed {
    pub left: Symbol,
    pub right: Symbol,
    pub period: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Aperiodicity {
    pub aperiodic: bool,
    /// Smallest `n` with `p(n) <= n`, when one exists below the bound.
    pub witness: Option<usize>,
}

impl Substitution {
    pub fn new(name: impl Into<String>, names: Vec<String>, rules: Vec<Word>) -> Result<Self> {
        let name = name.into();
        if names.is_empty() {
            return Err(Error::Invalid("empty alphabet".into()));
        }
        if names.len() != rules.len() {
            return Err(Error::Invalid("one rule per letter required".into()));
        }
        let mut seen = HashSet::new();
        for n in &names {
            if n.is_empty() || !seen.insert(n.as_str()) {
                return Err(Error::Invalid(format!("letter name `{n}` is empty or repeated")));
            }
        }
        for (i, r) in rules.iter().enumerate() {
            if r.is_empty() {
                return Err(Error::Invalid(format!("rule for `{}` is empty", names[i])));
            }
            if let Some(c) = r.iter().find(|c| c.0 >= names.len()) {
                return Err(Error::Invalid(format!("rule for `{}` uses unknown letter {}", names[i], c.0)));
            }
        }
        Ok(Substitution { name, names, rules })
    }

    /// Build from single-character letters, e.g. `[("a", "ab"), ("b", "a")]`.
    pub fn from_rules(name: &str, rules: &[(&str, &str)]) -> Result<Self> {
        let names: Vec<String> = rules.iter().map(|(a, _)| a.to_string()).collect();
        let mut words = Vec::new();
        for (a, w) in rules {
            let word = parse_word_with(&names, w)
                .ok_or_else(|| Error::Invalid(format!("rule for `{a}` uses an unknown letter")))?;
            words.push(word);
        }
        Substitution::new(name, names, words)
    }

    /// Parse `{"name": ..., "rules": {letter: word, ...}}`. A word is a string of
    /// single-character letters or an array of letter names.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Substitution::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Invalid("top level must be an object".into()))?;
        let name = match obj.get("name") {
            Some(Value::String(s)) => s.clone(),
            Some(_) => return Err(Error::Invalid("`name` must be a string".into())),
            None => "unnamed".to_string(),
        };
        let rules = obj
            .get("rules")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Invalid("`rules` must be an object".into()))?;
        let names: Vec<String> = rules.keys().cloned().collect();
        let mut words = Vec::new();
        for (letter, image) in rules {
            let word = match image {
                Value::String(s) => {
                    if s.is_empty() {
                        return Err(Error::Invalid(format!("rule for `{letter}` is empty")));
                    }
                    parse_word_with(&names, s)
                }
                Value::Array(items) => items
                    .iter()
                    .map(|x| x.as_str().and_then(|n| names.iter().position(|m| m == n)).map(Symbol))
                    .collect(),
                _ => None,
            }
            .ok_or_else(|| Error::Invalid(format!("rule for `{letter}` uses an unknown letter")))?;
            words.push(word);
        }
        Substitution::new(name, names, words)
    }

    pub fn to_json(&self) -> Value {
        let single = self.names.iter().all(|n| n.chars().count() == 1);
        let mut rules = Map::new();
        for (i, r) in self.rules.iter().enumerate() {
            let image = if single {
                Value::String(self.word_string(r))
            } else {
                Value::Array(r.iter().map(|c| Value::String(self.names[c.0].clone())).collect())
            };
            rules.insert(self.names[i].clone(), image);
        }
        let mut m = Map::new();
        m.insert("name".into(), Value::String(self.name.clone()));
        m.insert("rules".into(), Value::Object(rules));
        Value::Object(m)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (0..self.size()).map(Symbol)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name_of(&self, c: Symbol) -> &str {
        &self.names[c.0]
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.names.iter().position(|n| n == name).map(Symbol)
    }

    pub fn rule(&self, c: Symbol) -> &Word {
        &self.rules[c.0]
    }

    pub fn rules(&self) -> &[Word] {
        &self.rules
    }

    pub fn parse_word(&self, s: &str) -> Option<Word> {
        parse_word_with(&self.names, s)
    }

    pub fn word_string(&self, w: &[Symbol]) -> String {
        let single = self.names.iter().all(|n| n.chars().count() == 1);
        let parts: Vec<&str> = w.iter().map(|c| self.names[c.0].as_str()).collect();
        parts.join(if single { "" } else { " " })
    }

    pub fn apply(&self, w: &[Symbol]) -> Word {
        w.iter().flat_map(|c| self.rules[c.0].iter().copied()).collect()
    }

    pub fn iterate(&self, w: &[Symbol], k: usize) -> Word {
        let mut w = w.to_vec();
        for _ in 0..k {
            w = self.apply(&w);
        }
        w
    }

    /// `self ∘ other`, i.e. `c ↦ self(other(c))`.
    pub fn compose(&self, other: &Substitution) -> Result<Substitution> {
        if self.size() != other.size() {
            return Err(Error::Invalid("composition needs a common alphabet".into()));
        }
        let rules = other.rules.iter().map(|r| self.apply(r)).collect();
        Substitution::new(format!("{}*{}", self.name, other.name), self.names.clone(), rules)
    }

    pub fn power(&self, k: usize) -> Substitution {
        assert!(k >= 1);
        let rules = self.symbols().map(|c| self.iterate(&[c], k)).collect();
        Substitution {
            name: if k == 1 { self.name.clone() } else { format!("{}^{k}", self.name) },
            names: self.names.clone(),
            rules,
        }
    }

    /// Entry `(i, j)` counts the occurrences of `i` in the rule for `j`.
    pub fn abelianization(&self) -> IntMatrix {
        let m = self.size();
        let mut rows = vec![vec![BigInt::from(0); m]; m];
        for (j, r) in self.rules.iter().enumerate() {
            for c in r {
                rows[c.0][j] += 1;
            }
        }
        IntMatrix::from_rows(rows)
    }

    pub fn is_primitive(&self) -> bool {
        let m = self.size();
        // boolean reachability powers
        let base: Vec<Vec<bool>> = (0..m)
            .map(|i| (0..m).map(|j| self.rules[j].contains(&Symbol(i))).collect())
            .collect();
        let mut p = base.clone();
        for _ in 0..(m - 1) * (m - 1) + 1 {
            if p.iter().all(|r| r.iter().all(|&x| x)) {
                return true;
            }
            p = (0..m)
                .map(|i| (0..m).map(|j| (0..m).any(|k| p[i][k] && base[k][j])).collect())
                .collect();
        }
        p.iter().all(|r| r.iter().all(|&x| x))
    }

    fn require_primitive(&self) -> Result<()> {
        if self.is_primitive() {
            Ok(())
        } else {
            Err(Precondition::NotPrimitive(self.name.clone()).into())
        }
    }

    /// All length-`k` words of the language.
    pub fn language(&self, k: usize) -> Result<BTreeSet<Word>> {
        self.require_primitive()?;
        if k == 0 {
            return Ok(BTreeSet::from([Vec::new()]));
        }
        if self.size() == 1 {
            // primitive with one letter: the only bi-infinite word is constant
            return Ok(BTreeSet::from([vec![Symbol(0); k]]));
        }
        if k <= 8 {
            return Ok(self.language_by_closure(k));
        }
        // every image under a suitable power has length at least 2, so a factor of
        // length k starting inside the image of u[0] ends inside the image of u
        let mut r = 1;
        while self.symbols().any(|c| self.iterate(&[c], r).len() < 2) {
            r += 1;
        }
        let j = k.div_ceil(2) + 1;
        let mut set = BTreeSet::new();
        for u in self.language(j)? {
            let first = self.iterate(&u[..1], r).len();
            let img = self.iterate(&u, r);
            for o in 0..first {
                set.insert(img[o..o + k].to_vec());
            }
        }
        Ok(set)
    }

    /// Length-`k` factors of a long iterate, closed under one substitution step.
    fn language_by_closure(&self, k: usize) -> BTreeSet<Word> {
        let mut set = BTreeSet::new();
        let mut w = vec![Symbol(0)];
        while w.len() < k {
            w = self.apply(&w);
        }
        let mut frontier: Vec<Word> = Vec::new();
        for f in w.windows(k) {
            if set.insert(f.to_vec()) {
                frontier.push(f.to_vec());
            }
        }
        while let Some(u) = frontier.pop() {
            let img = self.apply(&u);
            for f in img.windows(k) {
                if !set.contains(f) {
                    set.insert(f.to_vec());
                    frontier.push(f.to_vec());
                }
            }
        }
        set
    }

    /// Factor complexity `p(n)` for `n = 1..=bound`.
    pub fn complexity(&self, bound: usize) -> Result<Vec<usize>> {
        let long = self.language(bound)?;
        Ok((1..=bound)
            .map(|n| long.iter().map(|w| &w[..n]).collect::<BTreeSet<_>>().len())
            .collect())
    }

    pub fn is_aperiodic_with_bound(&self, bound: usize) -> Result<Aperiodicity> {
        let p = self.complexity(bound)?;
        let witness = p.iter().enumerate().find(|(i, &c)| c <= i + 1).map(|(i, _)| i + 1);
        Ok(Aperiodicity {
            aperiodic: witness.is_none(),
            witness,
        })
    }

    pub fn is_aperiodic(&self) -> Result<Aperiodicity> {
        self.is_aperiodic_with_bound(APERIODICITY_BOUND)
    }

    pub fn require_aperiodic(&self) -> Result<()> {
        let a = self.is_aperiodic()?;
        match a.witness {
            None => Ok(()),
            Some(w) => Err(Precondition::Periodic {
                name: self.name.clone(),
                witness: w,
            }
            .into()),
        }
    }

    pub fn first_letters(&self) -> Vec<Symbol> {
        self.rules.iter().map(|r| r[0]).collect()
    }

    pub fn last_letters(&self) -> Vec<Symbol> {
        self.rules.iter().map(|r| *r.last().unwrap()).collect()
    }

    /// All letters begin with a common letter and end with a common letter.
    pub fn is_proper(&self) -> bool {
        let f = self.first_letters();
        let l = self.last_letters();
        f.iter().all(|&c| c == f[0]) && l.iter().all(|&c| c == l[0])
    }

    /// One seed per bi-infinite word that is fixed by some power of the substitution.
    pub fn periodic_biinfinite_words(&self) -> Result<Vec<BiInfiniteSeed>> {
        let two = self.language(2)?;
        let f = self.first_letters();
        let g = self.last_letters();
        let mut out = Vec::new();
        for l in self.symbols() {
            let Some(pl) = cycle_length(&g, l) else { continue };
            for r in self.symbols() {
                let Some(pr) = cycle_length(&f, r) else { continue };
                if two.contains(&vec![l, r]) {
                    out.push(BiInfiniteSeed {
                        left: l,
                        right: r,
                        period: pl.lcm(&pr),
                    });
                }
            }
        }
        Ok(out)
    }

    /// Simple cycles in the seed graph that alternate between forward asymptotic
    /// pairs (same right half) and backward asymptotic pairs (same left half).
    pub fn asymptotic_cycles(&self) -> Result<Vec<Vec<BiInfiniteSeed>>> {
        let seeds = self.periodic_biinfinite_words()?;
        Ok(alternating_cycles(&seeds))
    }

    pub fn seed_string(&self, s: &BiInfiniteSeed) -> String {
        format!("{}.{}", self.name_of(s.left), self.name_of(s.right))
    }

    /// Rename letters by `perm`: new letter `i` is old letter `perm[i]`.
    pub fn relabeled(&self, perm: &[usize], names: Vec<String>) -> Result<Substitution> {
        let mut inverse = vec![0; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        let rules = perm
            .iter()
            .map(|&p| self.rules[p].iter().map(|c| Symbol(inverse[c.0])).collect())
            .collect();
        Substitution::new(self.name.clone(), names, rules)
    }
}

fn parse_word_with(names: &[String], s: &str) -> Option<Word> {
    s.chars()
        .map(|ch| {
            let mut buf = [0u8; 4];
            let key: &str = ch.encode_utf8(&mut buf);
            names.iter().position(|n| n == key).map(Symbol)
        })
        .collect()
}

fn cycle_length(map: &[Symbol], start: Symbol) -> Option<usize> {
    let mut c = map[start.0];
    for k in 1..=map.len() {
        if c == start {
            return Some(k);
        }
        c = map[c.0];
    }
    None
}

fn alternating_cycles(seeds: &[BiInfiniteSeed]) -> Vec<Vec<BiInfiniteSeed>> {
    let linked = |i: usize, j: usize, forward: bool| {
        if forward {
            seeds[i].right == seeds[j].right
        } else {
            seeds[i].left == seeds[j].left
        }
    };
    alternating_cycles_by(seeds.len(), linked)
        .into_iter()
        .map(|c| c.into_iter().map(|i| seeds[i]).collect())
        .collect()
}

/// Simple cycles of even length that alternate forward and backward links, each
/// rooted at its smallest vertex and starting with a forward link. Cycles with the
/// same edge set are reported once.
pub(crate) fn alternating_cycles_by(n: usize, linked: impl Fn(usize, usize, bool) -> bool) -> Vec<Vec<usize>> {
    fn dfs(
        n: usize,
        linked: &dyn Fn(usize, usize, bool) -> bool,
        path: &mut Vec<usize>,
        forward: bool,
        found: &mut BTreeMap<BTreeSet<(usize, usize)>, Vec<usize>>,
    ) {
        let start = path[0];
        let v = *path.last().unwrap();
        for u in 0..n {
            if u == v || !linked(v, u, forward) {
                continue;
            }
            if u == start && !forward && path.len() >= 4 {
                let k = path.len();
                let edges = (0..k)
                    .map(|w| {
                        let (a, b) = (path[w], path[(w + 1) % k]);
                        (a.min(b), a.max(b))
                    })
                    .collect();
                found.entry(edges).or_insert_with(|| path.clone());
            } else if u > start && !path.contains(&u) {
                path.push(u);
                dfs(n, linked, path, !forward, found);
                path.pop();
            }
        }
    }
    let mut found = BTreeMap::new();
    for start in 0..n {
        dfs(n, &linked, &mut vec![start], true, &mut found);
    }
    found.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tm() -> Substitution {
        Substitution::from_rules("tm", &[("a", "ab"), ("b", "ba")]).unwrap()
    }

    fn fib() -> Substitution {
        Substitution::from_rules("fib", &[("a", "ab"), ("b", "a")]).unwrap()
    }

    fn words(s: &Substitution, ws: &[&str]) -> BTreeSet<Word> {
        ws.iter().map(|w| s.parse_word(w).unwrap()).collect()
    }

    #[test]
    fn long_languages_agree_with_the_closure() {
        let odd = Substitution::from_rules("odd", &[("a", "bcc"), ("b", "a"), ("c", "bb")]).unwrap();
        for s in [tm(), fib(), odd] {
            for k in [9, 10, 17, 40] {
                assert_eq!(s.language(k).unwrap(), s.language_by_closure(k), "{} k={k}", s.name());
            }
        }
        // Sturmian complexity
        assert_eq!(fib().language(100).unwrap().len(), 101);
    }

    #[test]
    fn abelianization_tallies() {
        assert_eq!(tm().abelianization(), IntMatrix::from_i64(&[vec![1, 1], vec![1, 1]]));
        assert_eq!(fib().abelianization(), IntMatrix::from_i64(&[vec![1, 1], vec![1, 0]]));
        let id = Substitution::from_rules("id", &[("a", "a")]).unwrap();
        assert_eq!(id.abelianization(), IntMatrix::from_i64(&[vec![1]]));
    }

    #[test]
    fn primitivity() {
        assert!(fib().is_primitive());
        assert!(tm().is_primitive());
        let split = Substitution::from_rules("split", &[("a", "aa"), ("b", "bb")]).unwrap();
        assert!(!split.is_primitive());
        assert!(split.language(2).is_err());
    }

    #[test]
    fn two_letter_languages() {
        let t = tm();
        assert_eq!(t.language(2).unwrap(), words(&t, &["aa", "ab", "ba", "bb"]));
        let f = fib();
        assert_eq!(f.language(2).unwrap(), words(&f, &["aa", "ab", "ba"]));
        assert_eq!(f.language(1).unwrap(), words(&f, &["a", "b"]));
    }

    #[test]
    fn sturmian_complexity() {
        let p = fib().complexity(10).unwrap();
        assert_eq!(p, (2..=11).collect::<Vec<_>>());
    }

    #[test]
    fn aperiodicity() {
        let aa = Substitution::from_rules("aa", &[("a", "aa")]).unwrap();
        let r = aa.is_aperiodic().unwrap();
        assert!(!r.aperiodic);
        assert_eq!(r.witness, Some(1));
        assert!(fib().is_aperiodic().unwrap().aperiodic);
        assert!(tm().is_aperiodic().unwrap().aperiodic);
        // a periodic two-letter example: (ab)^infinity
        let per = Substitution::from_rules("per", &[("a", "aba"), ("b", "bab")]).unwrap();
        assert!(!per.is_aperiodic().unwrap().aperiodic);
    }

    #[test]
    fn seeds_and_cycles() {
        let t = tm();
        let seeds = t.periodic_biinfinite_words().unwrap();
        let names: Vec<String> = seeds.iter().map(|s| t.seed_string(s)).collect();
        assert_eq!(names, ["a.a", "a.b", "b.a", "b.b"]);
        assert!(seeds.iter().all(|s| s.period == 2));
        let cycles = t.asymptotic_cycles().unwrap();
        assert_eq!(cycles.len(), 1);
        assert_eq!(cycles[0].len(), 4);

        let f = fib();
        let seeds = f.periodic_biinfinite_words().unwrap();
        let names: Vec<String> = seeds.iter().map(|s| f.seed_string(s)).collect();
        assert_eq!(names, ["a.a", "b.a"]);
        assert!(seeds.iter().all(|s| s.period == 2));
        assert!(f.asymptotic_cycles().unwrap().is_empty());
    }

    #[test]
    fn json_round_trip_and_errors() {
        let s = Substitution::from_json_str(r#"{"name":"fib","rules":{"a":"ab","b":"a"}}"#).unwrap();
        assert_eq!(s, fib().with_name("fib"));
        let back = Substitution::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        match Substitution::from_json_str("{\"name\": \"x\",\n \"rules\": {\"a\": }}") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            Substitution::from_json_str(r#"{"rules":{"a":"ac"}}"#),
            Err(Error::Invalid(_))
        ));
        let multi = Substitution::from_json_str(r#"{"name":"m","rules":{"p0":["p1","p0"],"p1":["p0"]}}"#).unwrap();
        assert_eq!(Substitution::from_json(&multi.to_json()).unwrap(), multi);
    }

    #[test]
    fn properness() {
        assert!(!Substitution::from_rules("x", &[("a", "ab"), ("b", "aa")]).unwrap().is_proper());
        assert!(Substitution::from_rules("x", &[("a", "aaa")]).unwrap().is_proper());
        assert!(Substitution::from_rules("x", &[("a", "aab"), ("b", "ab")]).unwrap().is_proper());
    }
}

//! Lower bounds on the rank of first cohomology from substitution data.

use serde_json::{json, Value};

use crate::algebra::{eventual_rank, involution_block_bound, perron_data, InvolutionBound, RankField};
use crate::error::{Error, Precondition, Result};
use crate::factors::{maximal_pure_discrete_factor, RpdPairSystem, StackSystem};
use crate::pair_dynamics::{coincidence_rank, Caps, CoincidenceRank};
use crate::subst::Substitution;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyBound {
    pub evrank_q: usize,
    /// Number of substitution-periodic bi-infinite words.
    pub n_periodic: usize,
    pub lower_bound: i64,
    pub substitution_name: String,
}

impl CohomologyBound {
    pub fn to_json(&self) -> Value {
        json!({
            "substitution": self.substitution_name,
            "evrank_q": self.evrank_q,
            "n_periodic": self.n_periodic,
            "lower_bound": self.lower_bound,
        })
    }
}

/// `evrank(M^T) - n + 1`.
pub fn h1_lower_bound(s: &Substitution) -> Result<CohomologyBound> {
    if !s.is_primitive() {
        return Err(Precondition::NotPrimitive(s.name().into()).into());
    }
    s.require_aperiodic()?;
    let evrank_q = eventual_rank(&s.abelianization().transpose(), RankField::Rationals);
    let n_periodic = s.periodic_biinfinite_words()?.len();
    if n_periodic == 0 {
        return Err(Error::Internal("primitive substitution without periodic words".into()));
    }
    Ok(CohomologyBound {
        evrank_q,
        n_periodic,
        lower_bound: evrank_q as i64 - n_periodic as i64 + 1,
        substitution_name: s.name().to_string(),
    })
}

#[derive(Clone, Debug)]
pub struct CrcVerdict {
    pub d: usize,
    pub norm: i64,
    pub norm_odd: bool,
    pub cr: usize,
    /// `2d - 1`, when the theorem applies.
    pub bound_claimed: Option<i64>,
    pub bound_from_op: Option<CohomologyBound>,
    pub involution: Option<InvolutionBound>,
    pub evrank_op: Option<usize>,
    pub theorem_applies: bool,
    pub consistent: Option<bool>,
    pub rank: CoincidenceRank,
    pub factors: Option<(StackSystem, RpdPairSystem)>,
    /// Why the factor stages did not run.
    pub skipped: Option<String>,
}

impl CrcVerdict {
    pub fn to_json(&self) -> Value {
        let na = |why: &str| Value::String(format!("not applicable: {why}"));
        let reason = self.skipped.clone().unwrap_or_default();
        json!({
            "d": self.d,
            "norm": self.norm,
            "norm_odd": self.norm_odd,
            "cr": self.cr,
            "theorem_applies": self.theorem_applies,
            "bound_claimed": self.bound_claimed.map(Value::from).unwrap_or_else(|| na("requires cr = 2 and odd norm")),
            "consistent": self.consistent.map(Value::from).unwrap_or_else(|| na("requires cr = 2 and odd norm")),
            "bound_from_op": self.bound_from_op.as_ref().map(CohomologyBound::to_json).unwrap_or_else(|| na(&reason)),
            "evrank_op": self.evrank_op.map(Value::from).unwrap_or_else(|| na(&reason)),
            "involution": self.involution.as_ref().map(InvolutionBound::to_json).unwrap_or_else(|| na(&reason)),
        })
    }
}

/// Coincidence rank, the ordered-pair factor when the rank is two, and the
/// cohomology quantities the rank-two argument rests on.
pub fn crc_pipeline(s: &Substitution, caps: &Caps) -> Result<CrcVerdict> {
    let rank = coincidence_rank(s, caps)?;
    crc_with_rank(s, rank, caps)
}

/// As [`crc_pipeline`] with the coincidence rank of `s` already known.
pub fn crc_with_rank(s: &Substitution, rank: CoincidenceRank, caps: &Caps) -> Result<CrcVerdict> {
    let p = perron_data(&s.abelianization())?;
    let norm: i64 = (&p.signed_norm).try_into().map_err(|_| Error::Internal("norm out of range".into()))?;
    let norm_odd = p.norm_is_odd();
    let mut v = CrcVerdict {
        d: p.degree,
        norm,
        norm_odd,
        cr: rank.cr,
        bound_claimed: None,
        bound_from_op: None,
        involution: None,
        evrank_op: None,
        theorem_applies: rank.cr == 2 && norm_odd,
        consistent: None,
        rank,
        factors: None,
        skipped: None,
    };
    if v.cr != 2 {
        v.skipped = Some(format!("coincidence rank is {}", v.cr));
        return Ok(v);
    }
    let (ss, rp) = maximal_pure_discrete_factor(s, caps)?;
    let op = &rp.psi_op;
    let bound = h1_lower_bound(op).map_err(|e| e.in_stage("h1_lower_bound"))?;
    if bound.n_periodic != 2 {
        return Err(Error::Internal(format!(
            "ordered pair substitution has {} periodic words, expected 2",
            bound.n_periodic
        )));
    }
    let op_perron = perron_data(&op.abelianization())?;
    let inv = involution_block_bound(op, &rp.iota, &op_perron)?;
    v.evrank_op = Some(eventual_rank(&op.abelianization(), RankField::Rationals));
    if v.theorem_applies {
        let claimed = 2 * v.d as i64 - 1;
        v.bound_claimed = Some(claimed);
        v.consistent = Some(bound.lower_bound >= claimed);
    }
    v.bound_from_op = Some(bound);
    v.involution = Some(inv);
    v.factors = Some((ss, rp));
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::IntMatrix;
    use crate::properize::properize;

    fn sub(name: &str, rules: &[(&str, &str)]) -> Substitution {
        Substitution::from_rules(name, rules).unwrap()
    }

    /// Rank of `M^m` by direct powering.
    fn rank_of_power(m: &IntMatrix) -> usize {
        m.pow(m.nrows()).rank(RankField::Rationals)
    }

    #[test]
    fn proper_fibonacci_bound_is_degree() {
        let p = properize(&sub("fib", &[("a", "ab"), ("b", "a")])).unwrap().proper;
        let b = h1_lower_bound(&p).unwrap();
        assert_eq!(b.n_periodic, 1);
        assert_eq!(b.evrank_q, rank_of_power(&p.abelianization()));
        assert_eq!(b.lower_bound, 2);
    }

    #[test]
    fn proper_period_doubling_bound() {
        let p = properize(&sub("pd", &[("a", "ab"), ("b", "aa")])).unwrap().proper;
        let b = h1_lower_bound(&p).unwrap();
        assert_eq!(b.evrank_q, rank_of_power(&p.abelianization()));
        assert_eq!(b.lower_bound, 2);
    }

    #[test]
    fn bound_counts_several_periodic_words() {
        // Thue-Morse itself has four periodic words a.a, a.b, b.a, b.b
        let b = h1_lower_bound(&sub("tm", &[("a", "ab"), ("b", "ba")])).unwrap();
        assert_eq!(b.n_periodic, 4);
        assert_eq!(b.evrank_q, 1);
        assert_eq!(b.lower_bound, -2);
    }

    #[test]
    fn thue_morse_verdict() {
        let v = crc_pipeline(&sub("tm", &[("a", "ab"), ("b", "ba")]), &Caps::default()).unwrap();
        assert_eq!(v.cr, 2);
        assert_eq!(v.norm, 2);
        assert!(!v.theorem_applies);
        assert_eq!(v.bound_from_op.as_ref().unwrap().n_periodic, 2);
        assert!(v.consistent.is_none());
    }

    #[test]
    fn odd_norm_verdict() {
        let v = crc_pipeline(&sub("abb", &[("a", "abb"), ("b", "baa")]), &Caps::default()).unwrap();
        assert_eq!((v.cr, v.d, v.norm), (2, 1, 3));
        assert!(v.theorem_applies);
        assert_eq!(v.bound_claimed, Some(1));
        assert_eq!(v.consistent, Some(true));
        assert!(v.evrank_op.unwrap() >= 2);
        assert!(v.involution.as_ref().unwrap().certified);
    }

    #[test]
    fn fibonacci_verdict_skips_factors() {
        let v = crc_pipeline(&sub("fib", &[("a", "ab"), ("b", "a")]), &Caps::default()).unwrap();
        assert_eq!(v.cr, 1);
        assert!(!v.theorem_applies);
        assert!(v.factors.is_none());
        let j = v.to_json();
        assert!(j["bound_from_op"].as_str().unwrap().starts_with("not applicable: "));
    }

    #[test]
    fn bound_is_relabeling_invariant() {
        let p = properize(&sub("trib", &[("a", "ab"), ("b", "ac"), ("c", "a")])).unwrap().proper;
        let n = p.size();
        let perm: Vec<usize> = (0..n).rev().collect();
        let names = (0..n).map(|i| format!("q{i}")).collect();
        let q = p.relabeled(&perm, names).unwrap();
        let (a, b) = (h1_lower_bound(&p).unwrap(), h1_lower_bound(&q).unwrap());
        assert_eq!((a.evrank_q, a.n_periodic, a.lower_bound), (b.evrank_q, b.n_periodic, b.lower_bound));
    }
}

//! Built-in substitutions.

use crate::error::Result;
use crate::subst::Substitution;

pub struct CorpusItem {
    pub name: &'static str,
    pub description: &'static str,
    pub rules: &'static [(&'static str, &'static str)],
}

impl CorpusItem {
    pub fn substitution(&self) -> Substitution {
        Substitution::from_rules(self.name, self.rules).expect("corpus items are valid")
    }
}

pub const CORPUS: &[CorpusItem] = &[
    CorpusItem {
        name: "fibonacci",
        description: "unimodular quadratic Pisot, pure discrete",
        rules: &[("a", "ab"), ("b", "a")],
    },
    CorpusItem {
        name: "thue-morse",
        description: "constant length 2, coincidence rank 2",
        rules: &[("a", "ab"), ("b", "ba")],
    },
    CorpusItem {
        name: "period-doubling",
        description: "constant length 2, pure discrete",
        rules: &[("a", "ab"), ("b", "aa")],
    },
    CorpusItem {
        name: "abb-baa",
        description: "constant length 3, coincidence rank 2, odd norm",
        rules: &[("a", "abb"), ("b", "baa")],
    },
    CorpusItem {
        name: "tribonacci",
        description: "unimodular cubic Pisot",
        rules: &[("a", "ab"), ("b", "ac"), ("c", "a")],
    },
    CorpusItem {
        name: "non-pisot",
        description: "control: characteristic polynomial x^2 - x - 3, conjugate below -1",
        rules: &[("a", "abbb"), ("b", "a")],
    },
];

pub fn lookup(name: &str) -> Option<&'static CorpusItem> {
    CORPUS.iter().find(|c| c.name == name)
}

/// Items whose name matches `pattern` (all items for `None`).
pub fn filtered(pattern: Option<&str>) -> Result<Vec<&'static CorpusItem>> {
    let Some(p) = pattern else {
        return Ok(CORPUS.iter().collect());
    };
    let re = regex::Regex::new(p).map_err(|e| crate::Error::Invalid(format!("bad filter: {e}")))?;
    Ok(CORPUS.iter().filter(|c| re.is_match(c.name)).collect())
}

//! Built-in derivations used by the test suites and `adt corpus-run`.

use crate::algebra::{builtin, star_algebra, Algebra};
use crate::error::{Error, Result};
use crate::schemes::{parse_derivation, Derivation};

pub struct CorpusItem {
    pub name: &'static str,
    /// Name of the built-in algebra the derivation runs over (`N` or `N*`).
    pub algebra: &'static str,
    pub text: &'static str,
}

macro_rules! item {
    ($n:literal, $a:literal) => {
        CorpusItem { name: $n, algebra: $a, text: include_str!(concat!("../corpus/", $n, ".der")) }
    };
}

pub const CORPUS: &[CorpusItem] = &[
    item!("add", "N"),
    item!("mult", "N"),
    item!("pred", "N"),
    item!("fact", "N"),
    item!("fib", "N"),
    item!("choose", "N"),
    item!("double", "N"),
    item!("square", "N"),
    item!("plus3", "N"),
    item!("iszero", "N"),
    item!("isqrt", "N"),
    item!("muid", "N"),
    item!("twomu", "N"),
    item!("arrlen", "N*"),
];

/// The algebra a corpus derivation runs over.
pub fn corpus_algebra(name: &str) -> Result<Algebra> {
    let n = builtin("N")?.into_algebra();
    match name {
        "N" => Ok(n),
        "N*" => star_algebra(&n),
        _ => Err(Error::NotFound(format!("no corpus algebra {name}"))),
    }
}

pub fn corpus_item(name: &str) -> Result<&'static CorpusItem> {
    CORPUS.iter().find(|c| c.name == name).ok_or_else(|| Error::NotFound(format!("no corpus derivation {name}")))
}

/// Parses a corpus derivation together with its algebra.
pub fn load(name: &str) -> Result<(Derivation, Algebra)> {
    let it = corpus_item(name)?;
    let a = corpus_algebra(it.algebra)?;
    let d = parse_derivation(a.signature(), it.text)?;
    Ok((d, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_parse() {
        for it in CORPUS {
            let (d, _) = load(it.name).unwrap_or_else(|e| panic!("{}: {e}", it.name));
            assert_eq!(d.name, it.name);
        }
    }
}

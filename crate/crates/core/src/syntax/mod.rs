//! Lexing and the pieces of concrete syntax shared by all input files.

pub mod expr;
pub mod lexer;

use crate::error::Result;
use crate::relcore::VarDecl;
use lexer::Cursor;

pub(crate) const DECL_KEYWORDS: &[&str] = &["var", "nat", "int"];

pub(crate) fn at_decl(c: &Cursor) -> bool {
    DECL_KEYWORDS.iter().any(|k| c.at_keyword(k))
}

/// Parses one declaration statement, `nat a, b : lo..hi;`.
///
/// The range may be omitted only when `default_range` is given.
pub(crate) fn parse_decl(
    c: &mut Cursor,
    default_range: Option<(i64, i64)>,
) -> Result<Vec<(VarDecl, crate::error::Pos)>> {
    if !at_decl(c) {
        return c.unexpected("a declaration (`var`, `nat` or `int`)");
    }
    c.bump();
    let mut names = vec![c.expect_ident()?];
    while c.eat_sym(",") {
        names.push(c.expect_ident()?);
    }
    let (lo, hi) = if c.eat_sym(":") {
        let lo = c.expect_signed_int()?;
        c.expect_sym("..")?;
        let hi = c.expect_signed_int()?;
        (lo, hi)
    } else if let Some(r) = default_range {
        r
    } else {
        return c.error("declaration needs a range `: lo..hi`");
    };
    if lo > hi {
        return c.error(format!("empty range {lo}..{hi}"));
    }
    c.expect_sym(";")?;
    Ok(names.into_iter().map(|(n, p)| (VarDecl::new(n, lo, hi), p)).collect())
}

//! Relation literal files.
//!
//! ```text
//! # comment
//! space fig2 { nat s : 0..7; }
//! (2) -> (1)
//! (3) -> (2)
//! ```
//!
//! The inline declaration block is optional when the space is supplied by
//! the caller. Canonical output writes the bare `space <name>` header and
//! sorts pairs by `(index(s), index(s'))`.

use std::fmt::Write;
use std::sync::Arc;

use super::{Relation, StateSpace};
use crate::error::{Error, Result};
use crate::syntax::lexer::Cursor;
use crate::syntax::{at_decl, parse_decl};

fn parse_tuple(c: &mut Cursor, space: &StateSpace) -> Result<usize> {
    let pos = c.expect_sym("(")?;
    let mut vals = vec![c.expect_signed_int()?];
    while c.eat_sym(",") {
        vals.push(c.expect_signed_int()?);
    }
    c.expect_sym(")")?;
    if vals.len() != space.arity() {
        return Err(Error::Syntax {
            pos,
            msg: format!(
                "tuple has {} components, space `{}` has {}",
                vals.len(),
                space.name(),
                space.arity()
            ),
        });
    }
    space.index_of(&vals).map_err(|_| Error::Syntax {
        pos,
        msg: format!(
            "state {} is outside space `{}`",
            crate::relcore::format_tuple(&vals),
            space.name()
        ),
    })
}

/// Reads the `space <name> [{ decls }]` header.
pub(crate) fn parse_space_header(c: &mut Cursor, given: Option<&Arc<StateSpace>>) -> Result<Arc<StateSpace>> {
    c.expect_keyword("space")?;
    let (name, _) = c.expect_ident()?;
    let inline = if c.eat_sym("{") {
        let mut vars = Vec::new();
        while at_decl(c) {
            vars.extend(parse_decl(c, None)?.into_iter().map(|(d, _)| d));
        }
        c.expect_sym("}")?;
        Some(StateSpace::new(name.clone(), vars)?.shared())
    } else {
        None
    };
    match (inline, given) {
        (Some(s), Some(g)) if *s != **g => Err(Error::SpaceMismatch {
            left: s.name().to_string(),
            right: g.name().to_string(),
        }),
        (Some(s), _) => Ok(s),
        (None, Some(g)) if g.name() == name => Ok(g.clone()),
        (None, Some(g)) => Err(Error::SpaceMismatch {
            left: name,
            right: g.name().to_string(),
        }),
        (None, None) => Err(Error::Semantic {
            pos: c.pos(),
            msg: format!("space `{name}` has no declaration; supply one inline or with the space file"),
        }),
    }
}

/// Parses a relation literal. `space` is required unless the file declares
/// its space inline.
pub fn parse_relation(src: &str, space: Option<&Arc<StateSpace>>) -> Result<Relation> {
    let mut c = Cursor::new(src)?;
    let space = parse_space_header(&mut c, space)?;
    let mut pairs = Vec::new();
    while !c.at_eof() {
        let a = parse_tuple(&mut c, &space)?;
        c.expect_sym("->")?;
        let b = parse_tuple(&mut c, &space)?;
        pairs.push((a, b));
    }
    Relation::from_pairs(space, pairs)
}

/// Canonical text form of a relation.
pub fn serialize_relation(rel: &Relation) -> String {
    let space = rel.space();
    let mut out = format!("space {}\n", space.name());
    for (i, j) in rel.pairs() {
        let _ = writeln!(
            out,
            "{} -> {}",
            space.format_state(&space.state_at(i)),
            space.format_state(&space.state_at(j))
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relcore::VarDecl;

    #[test]
    fn parses_inline_space_and_pairs() {
        let r = parse_relation(
            "# R of the refinement example\nspace s4 { nat s : 0..3; }\n(1) -> (0)\n(1)->(1) (2) -> (3)\n",
            None,
        )
        .unwrap();
        assert_eq!(r.len(), 3);
        assert!(r.contains(2, 3));
        assert_eq!(serialize_relation(&r), "space s4\n(1) -> (0)\n(1) -> (1)\n(2) -> (3)\n");
    }

    #[test]
    fn external_space_and_multi_component_tuples() {
        let sp = StateSpace::new("xy", vec![VarDecl::new("x", 0, 2), VarDecl::new("y", -1, 1)])
            .unwrap()
            .shared();
        let r = parse_relation("space xy\n(2,-1) -> (0,1)\n(0,0)->(0,0)", Some(&sp)).unwrap();
        assert_eq!(serialize_relation(&r), "space xy\n(0,0) -> (0,0)\n(2,-1) -> (0,1)\n");
        let again = parse_relation(&serialize_relation(&r), Some(&sp)).unwrap();
        assert_eq!(again, r);
    }

    #[test]
    fn errors() {
        assert!(parse_relation("space s\n(0) -> (0)", None).is_err());
        let src = "space s { nat s : 0..1; }\n(0) -> (2)";
        assert!(matches!(parse_relation(src, None), Err(Error::Syntax { .. })));
        let src = "space s { nat s : 0..1; }\n(0,1) -> (0)";
        assert!(parse_relation(src, None).is_err());
        let other = StateSpace::new("t", vec![VarDecl::new("s", 0, 1)]).unwrap().shared();
        assert!(matches!(
            parse_relation("space s\n", Some(&other)),
            Err(Error::SpaceMismatch { .. })
        ));
    }
}

use crate::error::{Pos, Result};
use crate::relcore::VarDecl;
use crate::syntax::expr::{self, BoolExpr, IntExpr, Var};
use crate::syntax::lexer::{Cursor, Tok};
use crate::syntax::{at_decl, parse_decl};

#[derive(Clone, Debug)]
pub enum Stmt {
    Abort(Pos),
    Skip(Pos),
    Assign {
        target: Var,
        expr: IntExpr,
        pos: Pos,
    },
    Seq(Vec<Stmt>),
    If {
        cond: BoolExpr,
        then: Box<Stmt>,
        pos: Pos,
    },
    IfElse {
        cond: BoolExpr,
        then: Box<Stmt>,
        els: Box<Stmt>,
        pos: Pos,
    },
    While {
        cond: BoolExpr,
        body: Box<Stmt>,
        pos: Pos,
    },
    /// `{ nat r : lo..hi; body }`.
    Block {
        locals: Vec<(VarDecl, Pos)>,
        body: Box<Stmt>,
        pos: Pos,
    },
}

impl Stmt {
    pub fn seq(mut stmts: Vec<Stmt>) -> Stmt {
        if stmts.len() == 1 {
            stmts.pop().unwrap()
        } else {
            Stmt::Seq(stmts)
        }
    }

    pub fn count_loops(&self) -> usize {
        match self {
            Stmt::Abort(_) | Stmt::Skip(_) | Stmt::Assign { .. } => 0,
            Stmt::Seq(v) => v.iter().map(Stmt::count_loops).sum(),
            Stmt::If { then, .. } => then.count_loops(),
            Stmt::IfElse { then, els, .. } => then.count_loops() + els.count_loops(),
            Stmt::While { body, .. } => 1 + body.count_loops(),
            Stmt::Block { body, .. } => body.count_loops(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Program {
    pub name: String,
    /// Space named in the `over` clause, if any.
    pub over: Option<String>,
    pub body: Stmt,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Range given to declarations that omit `: lo..hi`.
    pub default_range: Option<(i64, i64)>,
}

/// Parses `program <name> over <space> { ... }` or a bare statement list.
pub fn parse_program(src: &str) -> Result<Program> {
    parse_program_with(src, &ParseOptions::default())
}

pub fn parse_program_with(src: &str, opts: &ParseOptions) -> Result<Program> {
    let mut c = Cursor::new(src)?;
    let mut p = Parser { c: &mut c, opts };
    let prog = if p.c.eat_keyword("program") {
        let (name, _) = p.c.expect_ident()?;
        let over = if p.c.eat_keyword("over") {
            Some(p.c.expect_ident()?.0)
        } else {
            None
        };
        let pos = p.c.expect_sym("{")?;
        let body = p.block_contents(pos, true)?;
        Program { name, over, body }
    } else {
        let pos = p.c.pos();
        let body = p.block_contents(pos, false)?;
        Program {
            name: "main".to_string(),
            over: None,
            body,
        }
    };
    c.expect_eof()?;
    Ok(prog)
}

struct Parser<'a> {
    c: &'a mut Cursor,
    opts: &'a ParseOptions,
}

impl Parser<'_> {
    /// Declarations then statements, up to `}` (consumed) or end of input.
    fn block_contents(&mut self, pos: Pos, braced: bool) -> Result<Stmt> {
        let mut locals = Vec::new();
        while at_decl(self.c) {
            locals.extend(parse_decl(self.c, self.opts.default_range)?);
        }
        let mut stmts = Vec::new();
        loop {
            if self.c.eat_sym(";") {
                continue;
            }
            if braced && self.c.eat_sym("}") {
                break;
            }
            if self.c.at_eof() {
                if braced {
                    return self.c.unexpected("`}`");
                }
                break;
            }
            if at_decl(self.c) {
                return self.c.error("declarations must come before the statements of a block");
            }
            stmts.push(self.stmt()?);
        }
        let body = Stmt::seq(stmts);
        Ok(if locals.is_empty() {
            body
        } else {
            Stmt::Block {
                locals,
                body: Box::new(body),
                pos,
            }
        })
    }

    fn end_simple(&mut self) -> Result<()> {
        if self.c.eat_sym(";") || self.c.at_sym("}") || self.c.at_eof() {
            Ok(())
        } else {
            self.c.unexpected("`;`")
        }
    }

    fn cond(&mut self) -> Result<BoolExpr> {
        self.c.expect_sym("(")?;
        let e = expr::parse_bool(self.c)?;
        self.c.expect_sym(")")?;
        Ok(e)
    }

    /// Body of `if`/`while`: a braced block or a single statement.
    fn body(&mut self) -> Result<Stmt> {
        if self.c.at_sym("{") {
            let pos = self.c.expect_sym("{")?;
            self.block_contents(pos, true)
        } else {
            self.stmt()
        }
    }

    fn stmt(&mut self) -> Result<Stmt> {
        let pos = self.c.pos();
        if self.c.eat_keyword("abort") {
            self.end_simple()?;
            return Ok(Stmt::Abort(pos));
        }
        if self.c.eat_keyword("skip") {
            self.end_simple()?;
            return Ok(Stmt::Skip(pos));
        }
        if self.c.eat_keyword("if") {
            let cond = self.cond()?;
            let then = Box::new(self.body()?);
            return Ok(if self.c.eat_keyword("else") {
                Stmt::IfElse {
                    cond,
                    then,
                    els: Box::new(self.body()?),
                    pos,
                }
            } else {
                Stmt::If { cond, then, pos }
            });
        }
        if self.c.eat_keyword("while") {
            let cond = self.cond()?;
            let body = Box::new(self.body()?);
            return Ok(Stmt::While { cond, body, pos });
        }
        if self.c.eat_sym("{") {
            return self.block_contents(pos, true);
        }
        match self.c.peek().clone() {
            Tok::Ident(name) if matches!(self.c.peek_at(1), Tok::Sym("=")) => {
                self.c.bump();
                self.c.bump();
                let expr = expr::parse_int(self.c)?;
                self.end_simple()?;
                let mut target = Var::new(name, false);
                target.pos = pos;
                Ok(Stmt::Assign { target, expr, pos })
            }
            _ => self.c.unexpected("a statement"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn skip_alone() {
        let p = parse_program("skip").unwrap();
        assert!(matches!(p.body, Stmt::Skip(_)));
    }

    #[test]
    fn while_node() {
        let p = parse_program("while (y!=0) {x=x+1; y=y-1;}").unwrap();
        match p.body {
            Stmt::While { body, .. } => assert!(matches!(*body, Stmt::Seq(ref v) if v.len() == 2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn program_with_block() {
        let src = "program p1 over fermat {\n  nat r : 0..10;\n  x=0; y=0; r=0; while (r<n) {r=r+2*x+1; x=x+1;}\n}";
        let p = parse_program(src).unwrap();
        assert_eq!(p.name, "p1");
        assert_eq!(p.over.as_deref(), Some("fermat"));
        let Stmt::Block { locals, body, .. } = p.body else {
            panic!()
        };
        assert_eq!(locals[0].0, VarDecl::new("r", 0, 10));
        let Stmt::Seq(v) = *body else { panic!() };
        assert_eq!(v.len(), 4);
        assert!(matches!(&v[0], Stmt::Assign { target, .. } if target.name == "x"));
        assert!(matches!(&v[1], Stmt::Assign { target, .. } if target.name == "y"));
        assert!(matches!(&v[2], Stmt::Assign { target, .. } if target.name == "r"));
        assert!(matches!(&v[3], Stmt::While { .. }));
    }

    #[test]
    fn else_and_single_statement_bodies() {
        let p = parse_program("if (x > 0) x = x - 1; else { abort; } skip").unwrap();
        let Stmt::Seq(v) = p.body else { panic!() };
        assert!(matches!(v[0], Stmt::IfElse { .. }));
        assert!(matches!(v[1], Stmt::Skip(_)));
    }

    #[test]
    fn missing_semicolon_is_located() {
        match parse_program("x = 1\ny = 2") {
            Err(Error::Syntax { pos, .. }) => assert_eq!(pos, Pos::new(2, 1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn default_range_for_bare_declarations() {
        assert!(parse_program("{ nat r; r = 0; }").is_err());
        let opts = ParseOptions {
            default_range: Some((0, 5)),
        };
        let p = parse_program_with("{ nat r; r = 0; }", &opts).unwrap();
        let Stmt::Block { locals, .. } = p.body else { panic!() };
        assert_eq!(locals[0].0, VarDecl::new("r", 0, 5));
    }
}

//! Integer and boolean expressions shared by specifications and programs.
//!
//! Expressions are generic over their variable representation: parsed
//! expressions carry names ([`Var`]), bound expressions carry positions in a
//! state vector ([`Slot`]).

use std::fmt;

use super::lexer::{Cursor, Tok};
use crate::error::{Error, Pos, Result};
use crate::relcore::StateSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

impl ArithOp {
    fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
            ArithOp::Mod => "%",
        }
    }

    fn prec(self) -> u8 {
        match self {
            ArithOp::Add | ArithOp::Sub => 5,
            _ => 6,
        }
    }

    /// Checked integer arithmetic; `None` on overflow or division by zero.
    /// Division and remainder are Euclidean.
    #[inline]
    pub fn apply(self, a: i64, b: i64) -> Option<i64> {
        match self {
            ArithOp::Add => a.checked_add(b),
            ArithOp::Sub => a.checked_sub(b),
            ArithOp::Mul => a.checked_mul(b),
            ArithOp::Div => a.checked_div_euclid(b),
            ArithOp::Mod => a.checked_rem_euclid(b),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    #[inline]
    pub fn apply(self, a: i64, b: i64) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }
}

/// A variable occurrence by name. `primed` marks the final-state component.
/// Positions are for diagnostics only and do not take part in equality.
#[derive(Clone, Debug)]
pub struct Var {
    pub name: String,
    pub primed: bool,
    pub pos: Pos,
}

impl Var {
    pub fn new(name: impl Into<String>, primed: bool) -> Self {
        Var {
            name: name.into(),
            primed,
            pos: Pos::default(),
        }
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.primed == other.primed
    }
}

impl Eq for Var {}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.name, if self.primed { "'" } else { "" })
    }
}

/// A variable resolved to its position in a state vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Slot {
    pub index: usize,
    pub primed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IntExpr<V = Var> {
    Const(i64),
    Var(V),
    Neg(Box<IntExpr<V>>),
    Bin(ArithOp, Box<IntExpr<V>>, Box<IntExpr<V>>),
    /// `⌈√e⌉`; undefined for negative arguments.
    CeilSqrt(Box<IntExpr<V>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoolExpr<V = Var> {
    Const(bool),
    Cmp(CmpOp, IntExpr<V>, IntExpr<V>),
    PerfectSquare(IntExpr<V>),
    Not(Box<BoolExpr<V>>),
    And(Box<BoolExpr<V>>, Box<BoolExpr<V>>),
    Or(Box<BoolExpr<V>>, Box<BoolExpr<V>>),
}

/// Exact `⌈√v⌉` for `v ≥ 0`.
pub fn ceil_sqrt(v: i64) -> Option<i64> {
    if v < 0 {
        return None;
    }
    let r = (v as u64).isqrt() as i64;
    Some(if r * r == v { r } else { r + 1 })
}

pub fn is_perfect_square(v: i64) -> bool {
    if v < 0 {
        return false;
    }
    let r = (v as u64).isqrt();
    r * r == v as u64
}

impl<V> IntExpr<V> {
    pub fn try_map_vars<W, E>(&self, f: &mut impl FnMut(&V) -> Result<W, E>) -> Result<IntExpr<W>, E> {
        Ok(match self {
            IntExpr::Const(c) => IntExpr::Const(*c),
            IntExpr::Var(v) => IntExpr::Var(f(v)?),
            IntExpr::Neg(e) => IntExpr::Neg(Box::new(e.try_map_vars(f)?)),
            IntExpr::Bin(op, a, b) => IntExpr::Bin(*op, Box::new(a.try_map_vars(f)?), Box::new(b.try_map_vars(f)?)),
            IntExpr::CeilSqrt(e) => IntExpr::CeilSqrt(Box::new(e.try_map_vars(f)?)),
        })
    }

    pub fn for_each_var(&self, f: &mut impl FnMut(&V)) {
        match self {
            IntExpr::Const(_) => {}
            IntExpr::Var(v) => f(v),
            IntExpr::Neg(e) | IntExpr::CeilSqrt(e) => e.for_each_var(f),
            IntExpr::Bin(_, a, b) => {
                a.for_each_var(f);
                b.for_each_var(f);
            }
        }
    }

    pub fn uses_builtins(&self) -> bool {
        match self {
            IntExpr::Const(_) | IntExpr::Var(_) => false,
            IntExpr::Neg(e) => e.uses_builtins(),
            IntExpr::Bin(_, a, b) => a.uses_builtins() || b.uses_builtins(),
            IntExpr::CeilSqrt(_) => true,
        }
    }
}

impl<V> BoolExpr<V> {
    pub fn try_map_vars<W, E>(&self, f: &mut impl FnMut(&V) -> Result<W, E>) -> Result<BoolExpr<W>, E> {
        Ok(match self {
            BoolExpr::Const(b) => BoolExpr::Const(*b),
            BoolExpr::Cmp(op, a, b) => BoolExpr::Cmp(*op, a.try_map_vars(f)?, b.try_map_vars(f)?),
            BoolExpr::PerfectSquare(e) => BoolExpr::PerfectSquare(e.try_map_vars(f)?),
            BoolExpr::Not(e) => BoolExpr::Not(Box::new(e.try_map_vars(f)?)),
            BoolExpr::And(a, b) => BoolExpr::And(Box::new(a.try_map_vars(f)?), Box::new(b.try_map_vars(f)?)),
            BoolExpr::Or(a, b) => BoolExpr::Or(Box::new(a.try_map_vars(f)?), Box::new(b.try_map_vars(f)?)),
        })
    }

    pub fn for_each_var(&self, f: &mut impl FnMut(&V)) {
        match self {
            BoolExpr::Const(_) => {}
            BoolExpr::Cmp(_, a, b) => {
                a.for_each_var(f);
                b.for_each_var(f);
            }
            BoolExpr::PerfectSquare(e) => e.for_each_var(f),
            BoolExpr::Not(e) => e.for_each_var(f),
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) => {
                a.for_each_var(f);
                b.for_each_var(f);
            }
        }
    }

    pub fn uses_builtins(&self) -> bool {
        match self {
            BoolExpr::Const(_) => false,
            BoolExpr::Cmp(_, a, b) => a.uses_builtins() || b.uses_builtins(),
            BoolExpr::PerfectSquare(_) => true,
            BoolExpr::Not(e) => e.uses_builtins(),
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) => a.uses_builtins() || b.uses_builtins(),
        }
    }

    /// Number of atomic predicates (comparisons, constants, builtin predicates).
    pub fn atom_count(&self) -> usize {
        match self {
            BoolExpr::Const(_) | BoolExpr::Cmp(..) | BoolExpr::PerfectSquare(_) => 1,
            BoolExpr::Not(e) => e.atom_count(),
            BoolExpr::And(a, b) | BoolExpr::Or(a, b) => a.atom_count() + b.atom_count(),
        }
    }
}

impl IntExpr<Slot> {
    /// Evaluates over an initial state `pre` and a final state `post`.
    /// `None` means the value is undefined (overflow, division by zero,
    /// square root of a negative number).
    #[inline]
    pub fn eval(&self, pre: &[i64], post: &[i64]) -> Option<i64> {
        match self {
            IntExpr::Const(c) => Some(*c),
            IntExpr::Var(s) => Some(if s.primed { post[s.index] } else { pre[s.index] }),
            IntExpr::Neg(e) => e.eval(pre, post)?.checked_neg(),
            IntExpr::Bin(op, a, b) => op.apply(a.eval(pre, post)?, b.eval(pre, post)?),
            IntExpr::CeilSqrt(e) => ceil_sqrt(e.eval(pre, post)?),
        }
    }
}

impl BoolExpr<Slot> {
    /// Total evaluation: an atomic predicate with an undefined operand is false.
    pub fn eval(&self, pre: &[i64], post: &[i64]) -> bool {
        match self {
            BoolExpr::Const(b) => *b,
            BoolExpr::Cmp(op, a, b) => match (a.eval(pre, post), b.eval(pre, post)) {
                (Some(x), Some(y)) => op.apply(x, y),
                _ => false,
            },
            BoolExpr::PerfectSquare(e) => e.eval(pre, post).is_some_and(is_perfect_square),
            BoolExpr::Not(e) => !e.eval(pre, post),
            BoolExpr::And(a, b) => a.eval(pre, post) && b.eval(pre, post),
            BoolExpr::Or(a, b) => a.eval(pre, post) || b.eval(pre, post),
        }
    }
}

/// Resolves variable names against `space`.
pub fn resolve_in(space: &StateSpace) -> impl FnMut(&Var) -> Result<Slot> + '_ {
    move |v: &Var| {
        space
            .var_index(&v.name)
            .map(|index| Slot {
                index,
                primed: v.primed,
            })
            .ok_or_else(|| Error::UnknownVariable {
                pos: v.pos,
                name: v.name.clone(),
            })
    }
}

// ---------------------------------------------------------------------------
// Printing. Parenthesizes only where precedence requires it, so that
// `parse(print(e)) == e` for parsed expressions.

const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_NOT: u8 = 3;
const PREC_SUM: u8 = 5;
const PREC_NEG: u8 = 7;

fn write_int<V: fmt::Display>(e: &IntExpr<V>, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        IntExpr::Const(c) if *c < 0 => write!(f, "({c})"),
        IntExpr::Const(c) => write!(f, "{c}"),
        IntExpr::Var(v) => write!(f, "{v}"),
        IntExpr::Neg(inner) => {
            let paren = min > PREC_NEG;
            if paren {
                f.write_str("(")?;
            }
            f.write_str("-")?;
            write_int(inner, PREC_NEG, f)?;
            if paren {
                f.write_str(")")?;
            }
            Ok(())
        }
        IntExpr::Bin(op, a, b) => {
            let p = op.prec();
            let paren = min > p;
            if paren {
                f.write_str("(")?;
            }
            write_int(a, p, f)?;
            write!(f, " {} ", op.symbol())?;
            write_int(b, p + 1, f)?;
            if paren {
                f.write_str(")")?;
            }
            Ok(())
        }
        IntExpr::CeilSqrt(inner) => {
            f.write_str("ceil_sqrt(")?;
            write_int(inner, 0, f)?;
            f.write_str(")")
        }
    }
}

fn write_bool<V: fmt::Display>(e: &BoolExpr<V>, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let p = match e {
        BoolExpr::Const(b) => return write!(f, "{b}"),
        BoolExpr::PerfectSquare(inner) => {
            f.write_str("perfect_square(")?;
            write_int(inner, 0, f)?;
            return f.write_str(")");
        }
        BoolExpr::Cmp(op, a, b) => {
            // Comparisons are non-associative and bind tighter than every
            // connective, so they never need parentheses.
            write_int(a, PREC_SUM, f)?;
            write!(f, " {} ", op.symbol())?;
            return write_int(b, PREC_SUM, f);
        }
        BoolExpr::Not(_) => PREC_NOT,
        BoolExpr::And(..) => PREC_AND,
        BoolExpr::Or(..) => PREC_OR,
    };
    let paren = min > p;
    if paren {
        f.write_str("(")?;
    }
    match e {
        BoolExpr::Not(inner) => {
            f.write_str("!")?;
            write_bool(inner, PREC_NOT, f)?;
        }
        BoolExpr::And(a, b) => {
            write_bool(a, PREC_AND, f)?;
            f.write_str(" && ")?;
            write_bool(b, PREC_AND + 1, f)?;
        }
        BoolExpr::Or(a, b) => {
            write_bool(a, PREC_OR, f)?;
            f.write_str(" || ")?;
            write_bool(b, PREC_OR + 1, f)?;
        }
        _ => unreachable!(),
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

impl<V: fmt::Display> fmt::Display for IntExpr<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_int(self, 0, f)
    }
}

impl<V: fmt::Display> fmt::Display for BoolExpr<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_bool(self, 0, f)
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "${}{}", self.index, if self.primed { "'" } else { "" })
    }
}

// ---------------------------------------------------------------------------
// Parsing. The grammar is parsed untyped and then checked, so that a
// parenthesis can open either an integer or a boolean sub-expression.

enum Raw {
    Int(i64),
    Bool(bool),
    Var(Var),
    Neg(Box<Node>),
    Not(Box<Node>),
    Arith(ArithOp, Box<Node>, Box<Node>),
    Cmp(CmpOp, Box<Node>, Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    CeilSqrt(Box<Node>),
    PerfectSquare(Box<Node>),
}

struct Node {
    raw: Raw,
    pos: Pos,
}

fn node(raw: Raw, pos: Pos) -> Node {
    Node { raw, pos }
}

fn parse_or(c: &mut Cursor) -> Result<Node> {
    let mut lhs = parse_and(c)?;
    while c.at_sym("||") {
        let pos = c.bump().1;
        let rhs = parse_and(c)?;
        lhs = node(Raw::Or(Box::new(lhs), Box::new(rhs)), pos);
    }
    Ok(lhs)
}

fn parse_and(c: &mut Cursor) -> Result<Node> {
    let mut lhs = parse_not(c)?;
    while c.at_sym("&&") {
        let pos = c.bump().1;
        let rhs = parse_not(c)?;
        lhs = node(Raw::And(Box::new(lhs), Box::new(rhs)), pos);
    }
    Ok(lhs)
}

fn parse_not(c: &mut Cursor) -> Result<Node> {
    if c.at_sym("!") {
        let pos = c.bump().1;
        let inner = parse_not(c)?;
        return Ok(node(Raw::Not(Box::new(inner)), pos));
    }
    parse_cmp(c)
}

fn cmp_op(t: &Tok) -> Option<CmpOp> {
    match t {
        Tok::Sym("==") => Some(CmpOp::Eq),
        Tok::Sym("!=") => Some(CmpOp::Ne),
        Tok::Sym("<") => Some(CmpOp::Lt),
        Tok::Sym("<=") => Some(CmpOp::Le),
        Tok::Sym(">") => Some(CmpOp::Gt),
        Tok::Sym(">=") => Some(CmpOp::Ge),
        _ => None,
    }
}

fn parse_cmp(c: &mut Cursor) -> Result<Node> {
    let lhs = parse_sum(c)?;
    if let Some(op) = cmp_op(c.peek()) {
        let pos = c.bump().1;
        let rhs = parse_sum(c)?;
        if cmp_op(c.peek()).is_some() {
            return c.error("comparisons cannot be chained; use `&&`");
        }
        return Ok(node(Raw::Cmp(op, Box::new(lhs), Box::new(rhs)), pos));
    }
    Ok(lhs)
}

fn parse_sum(c: &mut Cursor) -> Result<Node> {
    let mut lhs = parse_term(c)?;
    loop {
        let op = match c.peek() {
            Tok::Sym("+") => ArithOp::Add,
            Tok::Sym("-") => ArithOp::Sub,
            _ => return Ok(lhs),
        };
        let pos = c.bump().1;
        let rhs = parse_term(c)?;
        lhs = node(Raw::Arith(op, Box::new(lhs), Box::new(rhs)), pos);
    }
}

fn parse_term(c: &mut Cursor) -> Result<Node> {
    let mut lhs = parse_unary(c)?;
    loop {
        let op = match c.peek() {
            Tok::Sym("*") => ArithOp::Mul,
            Tok::Sym("/") => ArithOp::Div,
            Tok::Sym("%") => ArithOp::Mod,
            _ => return Ok(lhs),
        };
        let pos = c.bump().1;
        let rhs = parse_unary(c)?;
        lhs = node(Raw::Arith(op, Box::new(lhs), Box::new(rhs)), pos);
    }
}

fn parse_unary(c: &mut Cursor) -> Result<Node> {
    if c.at_sym("-") {
        let pos = c.bump().1;
        let inner = parse_unary(c)?;
        return Ok(node(Raw::Neg(Box::new(inner)), pos));
    }
    parse_primary(c)
}

fn parse_primary(c: &mut Cursor) -> Result<Node> {
    let pos = c.pos();
    match c.peek().clone() {
        Tok::Int(v) => {
            c.bump();
            Ok(node(Raw::Int(v), pos))
        }
        Tok::Sym("(") => {
            c.bump();
            let inner = parse_or(c)?;
            c.expect_sym(")")?;
            Ok(inner)
        }
        Tok::Ident(name) => {
            c.bump();
            match name.as_str() {
                "true" => Ok(node(Raw::Bool(true), pos)),
                "false" => Ok(node(Raw::Bool(false), pos)),
                "ceil_sqrt" | "perfect_square" => {
                    c.expect_sym("(")?;
                    let arg = Box::new(parse_or(c)?);
                    c.expect_sym(")")?;
                    let raw = if name == "ceil_sqrt" {
                        Raw::CeilSqrt(arg)
                    } else {
                        Raw::PerfectSquare(arg)
                    };
                    Ok(node(raw, pos))
                }
                _ => {
                    let primed = c.eat_sym("'");
                    Ok(node(Raw::Var(Var { name, primed, pos }), pos))
                }
            }
        }
        _ => c.unexpected("an expression"),
    }
}

fn type_error<T>(pos: Pos, wanted: &str) -> Result<T> {
    Err(Error::Syntax {
        pos,
        msg: format!("expected {wanted} expression"),
    })
}

fn to_int(n: Node) -> Result<IntExpr> {
    Ok(match n.raw {
        Raw::Int(v) => IntExpr::Const(v),
        Raw::Var(v) => IntExpr::Var(v),
        Raw::Neg(e) => IntExpr::Neg(Box::new(to_int(*e)?)),
        Raw::Arith(op, a, b) => IntExpr::Bin(op, Box::new(to_int(*a)?), Box::new(to_int(*b)?)),
        Raw::CeilSqrt(e) => IntExpr::CeilSqrt(Box::new(to_int(*e)?)),
        _ => return type_error(n.pos, "an integer"),
    })
}

fn to_bool(n: Node) -> Result<BoolExpr> {
    Ok(match n.raw {
        Raw::Bool(b) => BoolExpr::Const(b),
        Raw::Cmp(op, a, b) => BoolExpr::Cmp(op, to_int(*a)?, to_int(*b)?),
        Raw::PerfectSquare(e) => BoolExpr::PerfectSquare(to_int(*e)?),
        Raw::Not(e) => BoolExpr::Not(Box::new(to_bool(*e)?)),
        Raw::And(a, b) => BoolExpr::And(Box::new(to_bool(*a)?), Box::new(to_bool(*b)?)),
        Raw::Or(a, b) => BoolExpr::Or(Box::new(to_bool(*a)?), Box::new(to_bool(*b)?)),
        _ => return type_error(n.pos, "a boolean"),
    })
}

pub fn parse_bool(c: &mut Cursor) -> Result<BoolExpr> {
    to_bool(parse_or(c)?)
}

pub fn parse_int(c: &mut Cursor) -> Result<IntExpr> {
    to_int(parse_or(c)?)
}

/// Parses a complete boolean expression.
pub fn parse_bool_expr(src: &str) -> Result<BoolExpr> {
    let mut c = Cursor::new(src)?;
    let e = parse_bool(&mut c)?;
    c.expect_eof()?;
    Ok(e)
}

/// Parses a complete integer expression.
pub fn parse_int_expr(src: &str) -> Result<IntExpr> {
    let mut c = Cursor::new(src)?;
    let e = parse_int(&mut c)?;
    c.expect_eof()?;
    Ok(e)
}

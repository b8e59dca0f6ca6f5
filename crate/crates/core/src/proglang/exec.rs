//! Closure compilation of bound programs.
//!
//! Each statement and expression becomes a boxed closure; operator kinds
//! and variable/constant operands are resolved at compile time through
//! generics, so the common shapes (`r = r + 2*x + 1`, `while (r < n)`) run
//! without any per-node dispatch on syntax.

use super::bind::BStmt;
use crate::syntax::expr::{ArithOp, BoolExpr, CmpOp, IntExpr, Slot};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Exit {
    Halt,
    Aborted,
    Undefined,
    Fuel,
}

type IntFn = Box<dyn Fn(&[i64]) -> Option<i64> + Send + Sync>;
type CondFn = Box<dyn Fn(&[i64]) -> bool + Send + Sync>;
type StmtFn = Box<dyn Fn(&mut [i64], &mut u64) -> Result<(), Exit> + Send + Sync>;

pub(crate) struct Code {
    root: StmtFn,
    arity: usize,
    slots: usize,
}

impl std::fmt::Debug for Code {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Code {{ arity: {}, slots: {} }}", self.arity, self.slots)
    }
}

pub(crate) fn compile(body: &BStmt, arity: usize, slots: usize) -> Code {
    Code {
        root: stmt(body, arity),
        arity,
        slots,
    }
}

trait Arith: Send + Sync + 'static {
    fn ap(a: i64, b: i64) -> Option<i64>;
}

macro_rules! arith {
    ($name:ident, $op:path) => {
        struct $name;
        impl Arith for $name {
            #[inline(always)]
            fn ap(a: i64, b: i64) -> Option<i64> {
                $op.apply(a, b)
            }
        }
    };
}
arith!(AddOp, ArithOp::Add);
arith!(SubOp, ArithOp::Sub);
arith!(MulOp, ArithOp::Mul);
arith!(DivOp, ArithOp::Div);
arith!(ModOp, ArithOp::Mod);

trait Cmp: Send + Sync + 'static {
    fn ap(a: i64, b: i64) -> bool;
}

macro_rules! cmp {
    ($name:ident, $op:tt) => {
        struct $name;
        impl Cmp for $name {
            #[inline(always)]
            fn ap(a: i64, b: i64) -> bool {
                a $op b
            }
        }
    };
}
cmp!(EqOp, ==);
cmp!(NeOp, !=);
cmp!(LtOp, <);
cmp!(LeOp, <=);
cmp!(GtOp, >);
cmp!(GeOp, >=);

enum Operand {
    Const(i64),
    Var(usize),
    Dyn(IntFn),
}

fn operand(e: &IntExpr<Slot>) -> Operand {
    match e {
        IntExpr::Const(v) => Operand::Const(*v),
        IntExpr::Var(s) => Operand::Var(s.index),
        e => Operand::Dyn(int(e)),
    }
}

fn into_fn(o: Operand) -> IntFn {
    match o {
        Operand::Const(v) => Box::new(move |_| Some(v)),
        Operand::Var(i) => Box::new(move |r| Some(r[i])),
        Operand::Dyn(f) => f,
    }
}

fn bin<O: Arith>(a: Operand, b: Operand) -> IntFn {
    use Operand::*;
    match (a, b) {
        (Var(i), Const(c)) => Box::new(move |r| O::ap(r[i], c)),
        (Const(c), Var(j)) => Box::new(move |r| O::ap(c, r[j])),
        (Var(i), Var(j)) => Box::new(move |r| O::ap(r[i], r[j])),
        (Dyn(f), Const(c)) => Box::new(move |r| O::ap(f(r)?, c)),
        (Const(c), Dyn(g)) => Box::new(move |r| O::ap(c, g(r)?)),
        (Dyn(f), Var(j)) => Box::new(move |r| O::ap(f(r)?, r[j])),
        (Var(i), Dyn(g)) => Box::new(move |r| O::ap(r[i], g(r)?)),
        (a, b) => {
            let (f, g) = (into_fn(a), into_fn(b));
            Box::new(move |r| O::ap(f(r)?, g(r)?))
        }
    }
}

/// A constant, a variable, or a constant times a variable.
#[derive(Clone, Copy)]
enum Term {
    Const(i64),
    Var(usize),
    Scaled(i64, usize),
}

impl Term {
    fn of(e: &IntExpr<Slot>) -> Option<Term> {
        match e {
            IntExpr::Const(v) => Some(Term::Const(*v)),
            IntExpr::Var(s) => Some(Term::Var(s.index)),
            IntExpr::Bin(ArithOp::Mul, a, b) => match (&**a, &**b) {
                (IntExpr::Const(c), IntExpr::Var(v)) | (IntExpr::Var(v), IntExpr::Const(c)) => {
                    Some(Term::Scaled(*c, v.index))
                }
                _ => None,
            },
            _ => None,
        }
    }
}

/// Expression shapes known at compile time; each instantiation evaluates
/// without branching on syntax.
trait Eval: Send + Sync + 'static {
    fn ev(&self, r: &[i64]) -> Option<i64>;
}

struct K(i64);
struct V(usize);
struct Sc(i64, usize);

impl Eval for K {
    #[inline(always)]
    fn ev(&self, _: &[i64]) -> Option<i64> {
        Some(self.0)
    }
}

impl Eval for V {
    #[inline(always)]
    fn ev(&self, r: &[i64]) -> Option<i64> {
        Some(r[self.0])
    }
}

impl Eval for Sc {
    #[inline(always)]
    fn ev(&self, r: &[i64]) -> Option<i64> {
        self.0.checked_mul(r[self.1])
    }
}

struct Pair<O, A, B>(A, B, std::marker::PhantomData<O>);

impl<O: Arith, A: Eval, B: Eval> Eval for Pair<O, A, B> {
    #[inline(always)]
    fn ev(&self, r: &[i64]) -> Option<i64> {
        O::ap(self.0.ev(r)?, self.1.ev(r)?)
    }
}

/// `(a ± b) ± c`; the flags are true for subtraction.
struct Tri<A, B, C, const SUB1: bool, const SUB2: bool> {
    a: A,
    b: B,
    c: C,
}

#[inline(always)]
fn step<const SUB: bool>(acc: i64, v: i64) -> Option<i64> {
    if SUB {
        acc.checked_sub(v)
    } else {
        acc.checked_add(v)
    }
}

impl<A: Eval, B: Eval, C: Eval, const SUB1: bool, const SUB2: bool> Eval for Tri<A, B, C, SUB1, SUB2> {
    #[inline(always)]
    fn ev(&self, r: &[i64]) -> Option<i64> {
        step::<SUB2>(step::<SUB1>(self.a.ev(r)?, self.b.ev(r)?)?, self.c.ev(r)?)
    }
}

/// What to make of a specialized expression.
trait Build {
    type Out;
    fn build<E: Eval>(self, e: E) -> Self::Out;
}

struct ToInt;

impl Build for ToInt {
    type Out = IntFn;
    fn build<E: Eval>(self, e: E) -> IntFn {
        Box::new(move |r| e.ev(r))
    }
}

struct ToStore {
    slot: usize,
    lo: i64,
    hi: i64,
}

impl Build for ToStore {
    type Out = StmtFn;
    fn build<E: Eval>(self, e: E) -> StmtFn {
        let ToStore { slot, lo, hi } = self;
        Box::new(move |r, _| match e.ev(r) {
            Some(v) if lo <= v && v <= hi => {
                r[slot] = v;
                Ok(())
            }
            _ => Err(Exit::Undefined),
        })
    }
}

macro_rules! with_term {
    ($t:expr, |$x:ident| $body:expr) => {
        match $t {
            Term::Const(c) => {
                let $x = K(c);
                $body
            }
            Term::Var(i) => {
                let $x = V(i);
                $body
            }
            Term::Scaled(c, i) => {
                let $x = Sc(c, i);
                $body
            }
        }
    };
}

macro_rules! with_arith {
    ($op:expr, $O:ident => $body:expr) => {
        match $op {
            ArithOp::Add => {
                type $O = AddOp;
                $body
            }
            ArithOp::Sub => {
                type $O = SubOp;
                $body
            }
            ArithOp::Mul => {
                type $O = MulOp;
                $body
            }
            ArithOp::Div => {
                type $O = DivOp;
                $body
            }
            ArithOp::Mod => {
                type $O = ModOp;
                $body
            }
        }
    };
}

/// Specializes a term, a binary operation on two terms, or a left-grouped
/// `±` chain of three terms. Other shapes hand the builder back.
fn specialize<B: Build>(e: &IntExpr<Slot>, out: B) -> Result<B::Out, B> {
    if let Some(t) = Term::of(e) {
        return Ok(with_term!(t, |x| out.build(x)));
    }
    let IntExpr::Bin(op, l, r) = e else {
        return Err(out);
    };
    if let (IntExpr::Bin(op1 @ (ArithOp::Add | ArithOp::Sub), a, b), ArithOp::Add | ArithOp::Sub) = (&**l, op) {
        if let (Some(a), Some(b), Some(c)) = (Term::of(a), Term::of(b), Term::of(r)) {
            return Ok(with_term!(a, |a| with_term!(b, |b| with_term!(
                c,
                |c| match (op1, op) {
                    (ArithOp::Add, ArithOp::Add) => out.build(Tri::<_, _, _, false, false> { a, b, c }),
                    (ArithOp::Add, _) => out.build(Tri::<_, _, _, false, true> { a, b, c }),
                    (_, ArithOp::Add) => out.build(Tri::<_, _, _, true, false> { a, b, c }),
                    _ => out.build(Tri::<_, _, _, true, true> { a, b, c }),
                }
            ))));
        }
    }
    match (Term::of(l), Term::of(r)) {
        (Some(a), Some(b)) => Ok(with_arith!(*op, O => with_term!(a, |a| with_term!(b, |b| {
            out.build(Pair::<O, _, _>(a, b, std::marker::PhantomData))
        })))),
        _ => Err(out),
    }
}

fn int(e: &IntExpr<Slot>) -> IntFn {
    if let Ok(f) = specialize(e, ToInt) {
        return f;
    }
    match e {
        IntExpr::Const(_) | IntExpr::Var(_) => into_fn(operand(e)),
        IntExpr::Neg(a) => {
            let f = int(a);
            Box::new(move |r| f(r)?.checked_neg())
        }
        IntExpr::Bin(op, a, b) => {
            let (a, b) = (operand(a), operand(b));
            match op {
                ArithOp::Add => bin::<AddOp>(a, b),
                ArithOp::Sub => bin::<SubOp>(a, b),
                ArithOp::Mul => bin::<MulOp>(a, b),
                ArithOp::Div => bin::<DivOp>(a, b),
                ArithOp::Mod => bin::<ModOp>(a, b),
            }
        }
        IntExpr::CeilSqrt(_) => unreachable!("built-ins are rejected when binding programs"),
    }
}

/// Atoms are false when an operand is undefined.
fn atom<C: Cmp>(a: Operand, b: Operand) -> CondFn {
    use Operand::*;
    match (a, b) {
        (Var(i), Var(j)) => Box::new(move |r| C::ap(r[i], r[j])),
        (Var(i), Const(c)) => Box::new(move |r| C::ap(r[i], c)),
        (Const(c), Var(j)) => Box::new(move |r| C::ap(c, r[j])),
        (a, b) => {
            let (f, g) = (into_fn(a), into_fn(b));
            Box::new(move |r| match (f(r), g(r)) {
                (Some(x), Some(y)) => C::ap(x, y),
                _ => false,
            })
        }
    }
}

fn cond(e: &BoolExpr<Slot>) -> CondFn {
    match e {
        BoolExpr::Const(b) => {
            let b = *b;
            Box::new(move |_| b)
        }
        BoolExpr::Cmp(op, a, b) => {
            let (a, b) = (operand(a), operand(b));
            match op {
                CmpOp::Eq => atom::<EqOp>(a, b),
                CmpOp::Ne => atom::<NeOp>(a, b),
                CmpOp::Lt => atom::<LtOp>(a, b),
                CmpOp::Le => atom::<LeOp>(a, b),
                CmpOp::Gt => atom::<GtOp>(a, b),
                CmpOp::Ge => atom::<GeOp>(a, b),
            }
        }
        BoolExpr::PerfectSquare(_) => unreachable!("built-ins are rejected when binding programs"),
        BoolExpr::Not(a) => {
            let f = cond(a);
            Box::new(move |r| !f(r))
        }
        BoolExpr::And(a, b) => {
            let (f, g) = (cond(a), cond(b));
            Box::new(move |r| f(r) && g(r))
        }
        BoolExpr::Or(a, b) => {
            let (f, g) = (cond(a), cond(b));
            Box::new(move |r| f(r) || g(r))
        }
    }
}

#[inline(always)]
fn tick(fuel: &mut u64) -> Result<(), Exit> {
    if *fuel == 0 {
        return Err(Exit::Fuel);
    }
    *fuel -= 1;
    Ok(())
}

fn assign_with<O: Arith>(slot: usize, a: Operand, b: Operand, lo: i64, hi: i64) -> StmtFn {
    use Operand::*;
    macro_rules! put {
        ($r:ident, $v:expr) => {
            match $v {
                Some(v) if lo <= v && v <= hi => {
                    $r[slot] = v;
                    Ok(())
                }
                _ => Err(Exit::Undefined),
            }
        };
    }
    match (a, b) {
        (Var(i), Const(c)) => Box::new(move |r, _| put!(r, O::ap(r[i], c))),
        (Var(i), Var(j)) => Box::new(move |r, _| put!(r, O::ap(r[i], r[j]))),
        (Dyn(f), Const(c)) => Box::new(move |r, _| put!(r, f(r).and_then(|x| O::ap(x, c)))),
        (Dyn(f), Var(j)) => Box::new(move |r, _| put!(r, f(r).and_then(|x| O::ap(x, r[j])))),
        (Var(i), Dyn(g)) => Box::new(move |r, _| put!(r, g(r).and_then(|y| O::ap(r[i], y)))),
        (a, b) => {
            let f = bin::<O>(a, b);
            Box::new(move |r, _| put!(r, f(r)))
        }
    }
}

fn assign(slot: usize, e: &IntExpr<Slot>, lo: i64, hi: i64) -> StmtFn {
    if let Ok(f) = specialize(e, ToStore { slot, lo, hi }) {
        return f;
    }
    match e {
        IntExpr::Bin(op, a, b) => {
            let (a, b) = (operand(a), operand(b));
            match op {
                ArithOp::Add => assign_with::<AddOp>(slot, a, b, lo, hi),
                ArithOp::Sub => assign_with::<SubOp>(slot, a, b, lo, hi),
                ArithOp::Mul => assign_with::<MulOp>(slot, a, b, lo, hi),
                ArithOp::Div => assign_with::<DivOp>(slot, a, b, lo, hi),
                ArithOp::Mod => assign_with::<ModOp>(slot, a, b, lo, hi),
            }
        }
        e => {
            let f = int(e);
            Box::new(move |r, _| match f(r) {
                Some(v) if lo <= v && v <= hi => {
                    r[slot] = v;
                    Ok(())
                }
                _ => Err(Exit::Undefined),
            })
        }
    }
}

#[inline(always)]
fn run_all(body: &[StmtFn], r: &mut [i64], fuel: &mut u64) -> Result<(), Exit> {
    for f in body {
        f(r, fuel)?;
    }
    Ok(())
}

fn stmts(list: &[BStmt], depth: usize) -> Vec<StmtFn> {
    list.iter().map(|s| stmt(s, depth)).collect()
}

fn list(s: &BStmt) -> &[BStmt] {
    match s {
        BStmt::Seq(v) => v,
        s => std::slice::from_ref(s),
    }
}

fn while_with<C: Cmp>(a: Operand, b: Operand, body: Vec<StmtFn>) -> StmtFn {
    use Operand::*;
    match (a, b) {
        (Var(i), Var(j)) => looped(move |r| C::ap(r[i], r[j]), body),
        (Var(i), Const(c)) => looped(move |r| C::ap(r[i], c), body),
        (a, b) => looped(atom::<C>(a, b), body),
    }
}

/// A loop with the test inlined and short bodies called directly.
fn looped<T: Fn(&[i64]) -> bool + Send + Sync + 'static>(test: T, mut body: Vec<StmtFn>) -> StmtFn {
    match body.len() {
        1 => {
            let f = body.pop().unwrap();
            Box::new(move |r, fuel| {
                while test(r) {
                    tick(fuel)?;
                    f(r, fuel)?;
                }
                Ok(())
            })
        }
        2 => {
            let g = body.pop().unwrap();
            let f = body.pop().unwrap();
            Box::new(move |r, fuel| {
                while test(r) {
                    tick(fuel)?;
                    f(r, fuel)?;
                    g(r, fuel)?;
                }
                Ok(())
            })
        }
        _ => Box::new(move |r, fuel| {
            while test(r) {
                tick(fuel)?;
                run_all(&body, r, fuel)?;
            }
            Ok(())
        }),
    }
}

fn stmt(s: &BStmt, depth: usize) -> StmtFn {
    match s {
        BStmt::Abort => Box::new(|_, _| Err(Exit::Aborted)),
        BStmt::Skip => Box::new(|_, _| Ok(())),
        BStmt::Assign { slot, expr, lo, hi } => assign(*slot, expr, *lo, *hi),
        BStmt::Seq(v) => {
            let mut body = stmts(v, depth);
            if body.len() == 1 {
                body.pop().unwrap()
            } else {
                Box::new(move |r, fuel| run_all(&body, r, fuel))
            }
        }
        BStmt::If { cond: c, then, els } => {
            let (c, t) = (cond(c), stmt(then, depth));
            match els {
                None => Box::new(move |r, fuel| if c(r) { t(r, fuel) } else { Ok(()) }),
                Some(e) => {
                    let e = stmt(e, depth);
                    Box::new(move |r, fuel| if c(r) { t(r, fuel) } else { e(r, fuel) })
                }
            }
        }
        BStmt::While { cond: c, body } => {
            let body = stmts(list(body), depth);
            match c {
                BoolExpr::Cmp(op, a, b) => {
                    let (a, b) = (operand(a), operand(b));
                    match op {
                        CmpOp::Eq => while_with::<EqOp>(a, b, body),
                        CmpOp::Ne => while_with::<NeOp>(a, b, body),
                        CmpOp::Lt => while_with::<LtOp>(a, b, body),
                        CmpOp::Le => while_with::<LeOp>(a, b, body),
                        CmpOp::Gt => while_with::<GtOp>(a, b, body),
                        CmpOp::Ge => while_with::<GeOp>(a, b, body),
                    }
                }
                c => looped(cond(c), body),
            }
        }
        BStmt::Block { locals, body } => {
            // Locals take the slots right after the enclosing scope, as in
            // binding, and start at the low end of their range.
            let init: Vec<(usize, i64)> = locals.iter().enumerate().map(|(k, d)| (depth + k, d.lo)).collect();
            let body = stmt(body, depth + locals.len());
            Box::new(move |r, fuel| {
                for &(slot, lo) in &init {
                    r[slot] = lo;
                }
                body(r, fuel)
            })
        }
    }
}

/// Reusable execution state for one compiled program.
pub(crate) struct Machine<'a> {
    code: &'a Code,
    regs: Vec<i64>,
}

impl<'a> Machine<'a> {
    pub fn new(code: &'a Code) -> Self {
        Machine {
            code,
            regs: vec![0; code.slots],
        }
    }

    /// Program variables after a run that ended in `Exit::Halt`.
    pub fn state(&self) -> &[i64] {
        &self.regs[..self.code.arity]
    }

    pub fn run(&mut self, state: &[i64], fuel: u64) -> Exit {
        self.regs[..self.code.arity].copy_from_slice(state);
        let mut fuel = fuel;
        match (self.code.root)(&mut self.regs, &mut fuel) {
            Ok(()) => Exit::Halt,
            Err(e) => e,
        }
    }
}

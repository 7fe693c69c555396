use std::collections::BTreeMap;

use crate::ast::{ArithOp, Constant, Relation, Term, Variable};

pub(crate) type Subst = BTreeMap<Variable, Constant>;

/// Why an arithmetic term had no value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalError {
    DivisionByZero,
    Overflow,
    NonInteger,
    /// A variable without a binding; only seen for unsafe input.
    Unbound,
}

/// Evaluates `t` under `s` with checked 64-bit arithmetic. Division
/// truncates toward zero.
pub(crate) fn eval(t: &Term, s: &Subst) -> Result<Constant, EvalError> {
    match t {
        Term::Const(c) => Ok(c.clone()),
        Term::Var(v) => s.get(v).cloned().ok_or(EvalError::Unbound),
        Term::Arith(op, l, r) => {
            let a = eval(l, s)?.as_int().ok_or(EvalError::NonInteger)?;
            let b = eval(r, s)?.as_int().ok_or(EvalError::NonInteger)?;
            let v = match op {
                ArithOp::Add => a.checked_add(b),
                ArithOp::Sub => a.checked_sub(b),
                ArithOp::Mul => a.checked_mul(b),
                ArithOp::Div => {
                    if b == 0 {
                        return Err(EvalError::DivisionByZero);
                    }
                    a.checked_div(b)
                }
            };
            v.map(Constant::Int).ok_or(EvalError::Overflow)
        }
    }
}

pub(crate) fn compare(rel: Relation, lhs: &Term, rhs: &Term, s: &Subst) -> Result<bool, EvalError> {
    Ok(rel.holds(&eval(lhs, s)?, &eval(rhs, s)?))
}

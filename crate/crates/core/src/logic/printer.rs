use std::fmt::{self, Formatter};

use super::{Formula, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(super) enum Prec {
    Quantifier,
    Implication,
    Disjunction,
    Conjunction,
    Unary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(super) enum TermPrec {
    Sum,
    Product,
    Primary,
}

fn formula_prec(f: &Formula) -> Prec {
    match f {
        Formula::Exists(..) | Formula::Forall(..) => Prec::Quantifier,
        Formula::Implies(..) => Prec::Implication,
        Formula::Or(..) => Prec::Disjunction,
        Formula::And(..) => Prec::Conjunction,
        Formula::Not(..) | Formula::Rel(..) | Formula::Eq(..) => Prec::Unary,
    }
}

fn term_prec(t: &Term) -> TermPrec {
    match t {
        Term::App(op, args) if op == "+" && args.len() == 2 => TermPrec::Sum,
        Term::App(op, args) if op == "*" && args.len() == 2 => TermPrec::Product,
        _ => TermPrec::Primary,
    }
}

pub(super) fn write_term(f: &mut Formatter<'_>, t: &Term, min: TermPrec) -> fmt::Result {
    if term_prec(t) < min {
        f.write_str("(")?;
        write_term(f, t, TermPrec::Sum)?;
        return f.write_str(")");
    }
    match t {
        Term::Var(v) | Term::Const(v) => f.write_str(v),
        Term::Elem(k) => write!(f, "⟨{k}⟩"),
        Term::App(op, args) => match term_prec(t) {
            TermPrec::Sum => {
                write_term(f, &args[0], TermPrec::Sum)?;
                f.write_str(" + ")?;
                write_term(f, &args[1], TermPrec::Product)
            }
            TermPrec::Product => {
                write_term(f, &args[0], TermPrec::Product)?;
                f.write_str(" * ")?;
                write_term(f, &args[1], TermPrec::Primary)
            }
            TermPrec::Primary => {
                write!(f, "{op}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_term(f, a, TermPrec::Sum)?;
                }
                f.write_str(")")
            }
        },
    }
}

pub(super) fn write_formula(f: &mut Formatter<'_>, phi: &Formula, min: Prec) -> fmt::Result {
    if formula_prec(phi) < min {
        f.write_str("(")?;
        write_formula(f, phi, Prec::Quantifier)?;
        return f.write_str(")");
    }
    match phi {
        Formula::Rel(r, args) if r == "<" && args.len() == 2 => {
            write_term(f, &args[0], TermPrec::Sum)?;
            f.write_str(" < ")?;
            write_term(f, &args[1], TermPrec::Sum)
        }
        Formula::Rel(r, args) => {
            write!(f, "{r}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_term(f, a, TermPrec::Sum)?;
            }
            f.write_str(")")
        }
        Formula::Eq(a, b) => {
            write_term(f, a, TermPrec::Sum)?;
            f.write_str(" = ")?;
            write_term(f, b, TermPrec::Sum)
        }
        Formula::Not(inner) => {
            f.write_str("!")?;
            match inner.as_ref() {
                Formula::Not(_) => write_formula(f, inner, Prec::Unary),
                _ => {
                    f.write_str("(")?;
                    write_formula(f, inner, Prec::Quantifier)?;
                    f.write_str(")")
                }
            }
        }
        Formula::And(a, b) => {
            write_formula(f, a, Prec::Conjunction)?;
            f.write_str(" & ")?;
            write_formula(f, b, Prec::Unary)
        }
        Formula::Or(a, b) => {
            write_formula(f, a, Prec::Disjunction)?;
            f.write_str(" | ")?;
            write_formula(f, b, Prec::Conjunction)
        }
        Formula::Implies(a, b) => {
            write_formula(f, a, Prec::Disjunction)?;
            f.write_str(" -> ")?;
            write_formula(f, b, Prec::Implication)
        }
        Formula::Exists(v, body) => {
            write!(f, "exists {v}. ")?;
            write_formula(f, body, Prec::Quantifier)
        }
        Formula::Forall(v, body) => {
            write!(f, "forall {v}. ")?;
            write_formula(f, body, Prec::Quantifier)
        }
    }
}

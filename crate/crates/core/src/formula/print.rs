//! Minimal-parentheses printer; the inverse of the parser.

use std::fmt;

use super::Formula;

const PREC_IMPLIES: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_NOT: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => PREC_IMPLIES,
        Formula::Or(..) => PREC_OR,
        Formula::And(..) => PREC_AND,
        Formula::Not(_) => PREC_NOT,
        Formula::Atom(_) | Formula::False => PREC_ATOM,
    }
}

fn write_operand(out: &mut fmt::Formatter<'_>, f: &Formula, parens: bool) -> fmt::Result {
    if parens {
        out.write_str("(")?;
        write_formula(out, f)?;
        out.write_str(")")
    } else {
        write_formula(out, f)
    }
}

pub(super) fn write_formula(out: &mut fmt::Formatter<'_>, f: &Formula) -> fmt::Result {
    match f {
        Formula::Atom(name) => out.write_str(name),
        Formula::False => out.write_str("0"),
        Formula::Not(a) => {
            out.write_str("~")?;
            write_operand(out, a, precedence(a) < PREC_NOT)
        }
        // `->` is right-associative: a nested implication on the left needs
        // parentheses, one on the right does not.
        Formula::Implies(a, b) => {
            write_operand(out, a, precedence(a) <= PREC_IMPLIES)?;
            out.write_str(" -> ")?;
            write_operand(out, b, precedence(b) < PREC_IMPLIES)
        }
        Formula::Or(a, b) => {
            write_operand(out, a, precedence(a) < PREC_OR)?;
            out.write_str(" | ")?;
            write_operand(out, b, precedence(b) <= PREC_OR)
        }
        Formula::And(a, b) => {
            write_operand(out, a, precedence(a) < PREC_AND)?;
            out.write_str(" & ")?;
            write_operand(out, b, precedence(b) <= PREC_AND)
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::formula::{parse, Formula};

    #[test]
    fn canonical_rendering() {
        let p = Formula::atom("P");
        let q = Formula::atom("Q");
        assert_eq!(Formula::and(p.clone(), q.clone()).to_string(), "P & Q");
        assert_eq!(Formula::not(Formula::and(p, q)).to_string(), "~(P & Q)");
        assert_eq!(Formula::False.to_string(), "0");
    }

    #[test]
    fn parentheses_only_where_needed() {
        for (input, expected) in [
            ("((A -> B)) -> C", "(A -> B) -> C"),
            ("A -> (B -> C)", "A -> B -> C"),
            ("(A & B) | C", "A & B | C"),
            ("A & (B | C)", "A & (B | C)"),
            ("A | (B | C)", "A | (B | C)"),
            ("(A | B) | C", "A | B | C"),
            ("~(~A)", "~~A"),
            ("~(A -> B) & 0", "~(A -> B) & 0"),
        ] {
            assert_eq!(parse(input).unwrap().to_string(), expected, "{input}");
        }
    }
}

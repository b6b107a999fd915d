//! Canonical text form: single spaces around operators and the minimum
//! parentheses needed to reproduce the same tree.

use super::ast::Expr;

const ATOM: u8 = 7;
const UNARY: u8 = 6;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Let(..) | Expr::If(..) => 0,
        Expr::Binary(op, _, _) => op.precedence(),
        Expr::Neg(_) => UNARY,
        Expr::Num(_) | Expr::Var(_) | Expr::Call(..) | Expr::Bind(..) => ATOM,
    }
}

/// Literals are expected to be finite and nonnegative, as produced by the
/// parser; negation is always an explicit `Neg` node.
pub fn print(e: &Expr) -> String {
    let mut out = String::new();
    write(e, 0, &mut out);
    out
}

fn write(e: &Expr, min_prec: u8, out: &mut String) {
    let wrap = precedence(e) < min_prec;
    if wrap {
        out.push('(');
    }
    match e {
        // shortest round-trip formatting; never uses exponent notation
        Expr::Num(v) => out.push_str(&format!("{v}")),
        Expr::Var(name) => out.push_str(name),
        Expr::Neg(inner) => {
            out.push('-');
            write(inner, ATOM, out);
        }
        Expr::Binary(op, lhs, rhs) => {
            let p = op.precedence();
            // comparisons do not chain; other levels are left-associative
            let left_min = if op.is_comparison() { p + 1 } else { p };
            write(lhs, left_min, out);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write(rhs, p + 1, out);
        }
        Expr::Let(name, value, body) => {
            out.push_str("let ");
            out.push_str(name);
            out.push_str(" = ");
            write(value, 0, out);
            out.push_str(" in ");
            write(body, 0, out);
        }
        Expr::If(c, t, f) => {
            out.push_str("if ");
            write(c, 0, out);
            out.push_str(" then ");
            write(t, 0, out);
            out.push_str(" else ");
            write(f, 0, out);
        }
        Expr::Call(func, args) => {
            out.push_str(func.name());
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write(a, 0, out);
            }
            out.push(')');
        }
        Expr::Bind(func, var, coll, body) => {
            out.push_str(func.name());
            out.push('(');
            out.push_str(var);
            out.push_str(" in ");
            write(coll, 0, out);
            out.push_str(", ");
            write(body, 0, out);
            out.push(')');
        }
    }
    if wrap {
        out.push(')');
    }
}

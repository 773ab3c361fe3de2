use super::{Term, TermKind};

const PREFIX: u8 = 6;
const ATOMIC: u8 = 7;

fn prec(t: &Term) -> u8 {
    match t.kind {
        TermKind::Iff(..) => 1,
        TermKind::Imp(..) => 2,
        TermKind::Or(..) => 3,
        TermKind::Xor(..) => 4,
        TermKind::And(..) => 5,
        TermKind::Not(_) | TermKind::Apply { .. } | TermKind::Meas { .. } => PREFIX,
        TermKind::Atom(..) | TermKind::Top | TermKind::Bottom => ATOMIC,
    }
}

/// Renders a term with the fewest parentheses that still parse back to the
/// same tree.
pub fn pretty(t: &Term) -> String {
    let mut out = String::new();
    write_term(t, &mut out);
    out
}

fn write_child(child: &Term, parens: bool, out: &mut String) {
    if parens {
        out.push('(');
        write_term(child, out);
        out.push(')');
    } else {
        write_term(child, out);
    }
}

fn write_term(t: &Term, out: &mut String) {
    use TermKind::*;
    let p = prec(t);
    match &t.kind {
        Atom(axis, i) => {
            out.push(axis.letter());
            out.push_str(&i.to_string());
        }
        Top => out.push_str("top"),
        Bottom => out.push_str("bot"),
        Not(body) => {
            out.push('~');
            write_child(body, prec(body) < PREFIX, out);
        }
        Apply { gate, wires, body } => {
            out.push('[');
            out.push_str(gate);
            for w in wires {
                out.push(' ');
                out.push_str(&w.to_string());
            }
            out.push(']');
            write_child(body, prec(body) < PREFIX, out);
        }
        Meas { axis, qubit, body } => {
            out.push_str(&format!("[m{axis} {qubit}]"));
            write_child(body, prec(body) < PREFIX, out);
        }
        And(l, r) | Or(l, r) | Xor(l, r) | Iff(l, r) | Imp(l, r) => {
            let (sym, right_assoc) = match &t.kind {
                And(..) => ("&", false),
                Or(..) => ("|", false),
                Xor(..) => ("^", false),
                Iff(..) => ("<->", false),
                _ => ("->", true),
            };
            let (left_parens, right_parens) = if right_assoc {
                (prec(l) <= p, prec(r) < p)
            } else {
                (prec(l) < p, prec(r) <= p)
            };
            write_child(l, left_parens, out);
            out.push(' ');
            out.push_str(sym);
            out.push(' ');
            write_child(r, right_parens, out);
        }
    }
}

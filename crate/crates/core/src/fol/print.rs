use super::{Atom, Conn, Formula, Quant};
use std::fmt;

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::In(a, b) => write!(f, "{a} in {b}"),
            Atom::Eq(a, b) => write!(f, "{a} = {b}"),
            Atom::InStar(a, b) => write!(f, "{a} in* {b}"),
            Atom::EqStar(a, b) => write!(f, "{a} =* {b}"),
            Atom::Set(a) => write!(f, "set({a})"),
            Atom::At(a) => write!(f, "At({a})"),
            Atom::Pure(a) => write!(f, "Pure({a})"),
        }
    }
}

impl Conn {
    fn prec(self) -> u8 {
        match self {
            Conn::Iff => 1,
            Conn::Implies => 2,
            Conn::Or => 3,
            Conn::And => 4,
        }
    }

    fn right_assoc(self) -> bool {
        matches!(self, Conn::Iff | Conn::Implies)
    }

    fn symbol(self) -> &'static str {
        match self {
            Conn::And => "&",
            Conn::Or => "|",
            Conn::Implies => "->",
            Conn::Iff => "<->",
        }
    }
}

const PREC_NOT: u8 = 5;
const PREC_ATOM: u8 = 6;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Atom(_) => PREC_ATOM,
        Formula::Not(_) => PREC_NOT,
        Formula::Bin(c, ..) => c.prec(),
        // quantifiers extend to the right as far as possible
        Formula::Quant(..) => 0,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Formula, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Not(g) => {
                f.write_str("~")?;
                let parens = match g.as_ref() {
                    Formula::Atom(a) => a.pred().is_binary(),
                    Formula::Not(_) => false,
                    _ => true,
                };
                write_child(f, g, parens)
            }
            Formula::Bin(c, a, b) => {
                let p = c.prec();
                let (lp, rp) = (prec(a), prec(b));
                let left_parens = lp == 0 || if c.right_assoc() { lp <= p } else { lp < p };
                let right_parens = rp == 0 || if c.right_assoc() { rp < p } else { rp <= p };
                write_child(f, a, left_parens)?;
                write!(f, " {} ", c.symbol())?;
                write_child(f, b, right_parens)
            }
            Formula::Quant(q, v, body) => {
                let kw = match q {
                    Quant::Forall => "all",
                    Quant::Exists => "ex",
                };
                write!(f, "{kw} {v}. ")?;
                write_child(f, body, matches!(body.as_ref(), Formula::Bin(..)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::fol::parse;

    #[test]
    fn prints_minimal_parentheses() {
        for s in [
            "all z. (z in x <-> z in y)",
            "x in y & y in z | z = x",
            "x in y -> y in z -> z =* x",
            "(x in y -> y in z) -> z =* x",
            "x in y & (all z. z in x)",
            "~(x in y) & ~set(x)",
            "~(all z. z in* x)",
            "(x in y <-> y in x) <-> x = y",
        ] {
            let f = parse(s).unwrap();
            assert_eq!(f.to_string(), s);
        }
    }

    #[test]
    fn quantifier_operand_keeps_its_scope() {
        let f = parse("(x in y -> (all z. z in x)) <-> y in x").unwrap();
        assert_eq!(parse(&f.to_string()).unwrap(), f);
    }
}

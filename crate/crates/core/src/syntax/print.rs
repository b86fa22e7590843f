use std::fmt;

use super::Term;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Pos {
    Top,
    ParLeft,
    ParRight,
    AppFun,
    AppArg,
}

fn fmt_term(t: &Term, pos: Pos, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let paren = match t {
        Term::Lam(..) => pos != Pos::Top,
        Term::Par(..) => !matches!(pos, Pos::Top | Pos::ParLeft),
        Term::App(..) => pos == Pos::AppArg,
        _ => false,
    };
    if paren {
        f.write_str("(")?;
    }
    match t {
        Term::Var(x) => f.write_str(x)?,
        Term::Star => f.write_str("*")?,
        Term::SStar(s) => write!(f, "sstar({s})")?,
        Term::SMul(s, a) => {
            write!(f, "smul({s}, ")?;
            fmt_term(a, Pos::Top, f)?;
            f.write_str(")")?;
        }
        Term::Par(a, b) => {
            fmt_term(a, Pos::ParLeft, f)?;
            f.write_str(" || ")?;
            fmt_term(b, Pos::ParRight, f)?;
        }
        Term::ElimTop(a, b) => {
            f.write_str("dTop(")?;
            fmt_term(a, Pos::Top, f)?;
            f.write_str(", ")?;
            fmt_term(b, Pos::Top, f)?;
            f.write_str(")")?;
        }
        Term::Lam(x, b) => {
            write!(f, "\\{x}. ")?;
            fmt_term(b, Pos::Top, f)?;
        }
        Term::App(a, b) => {
            fmt_term(a, Pos::AppFun, f)?;
            f.write_str(" ")?;
            fmt_term(b, Pos::AppArg, f)?;
        }
        Term::Pair(a, b) => {
            f.write_str("<")?;
            fmt_term(a, Pos::Top, f)?;
            f.write_str(",")?;
            fmt_term(b, Pos::Top, f)?;
            f.write_str(">")?;
        }
        Term::ElimBot(a) | Term::Proj1(a) | Term::Proj2(a) | Term::Inl(a) | Term::Inr(a) => {
            let kw = match t {
                Term::ElimBot(_) => "dBot",
                Term::Proj1(_) => "fst",
                Term::Proj2(_) => "snd",
                Term::Inl(_) => "inl",
                _ => "inr",
            };
            write!(f, "{kw}(")?;
            fmt_term(a, Pos::Top, f)?;
            f.write_str(")")?;
        }
        Term::ElimOr(a, x, u, y, v) => {
            f.write_str("dOr(")?;
            fmt_term(a, Pos::Top, f)?;
            write!(f, ", {x}. ")?;
            fmt_term(u, Pos::Top, f)?;
            write!(f, ", {y}. ")?;
            fmt_term(v, Pos::Top, f)?;
            f.write_str(")")?;
        }
        Term::Ann(a, p) => {
            f.write_str("(")?;
            fmt_term(a, Pos::Top, f)?;
            write!(f, " : {p})")?;
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(self, Pos::Top, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(Term::par(Term::Star, Term::Star).to_string(), "* || *");
        let t = Term::elim_or(Term::var("t"), "x", Term::var("x"), "y", Term::var("y"));
        assert_eq!(t.to_string(), "dOr(t, x. x, y. y)");
        assert_eq!(Term::pair(Term::Star, Term::Star).to_string(), "<*,*>");
        let nested = Term::par(Term::Star, Term::par(Term::Star, Term::Star));
        assert_eq!(nested.to_string(), "* || (* || *)");
        let app = Term::app(Term::lam("x", Term::var("x")), Term::app(Term::var("f"), Term::Star));
        assert_eq!(app.to_string(), "(\\x. x) (f *)");
        let lam = Term::lam("x", Term::par(Term::var("x"), Term::var("x")));
        assert_eq!(lam.to_string(), "\\x. x || x");
    }
}

use super::Formula;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderOptions {
    /// Print derived connectives (`|`, `->`, `<->`, `dia`, `<i>`, `<*>`, `M`, `F`, `G`)
    /// where the tree has their exact desugared shape.
    pub abbreviate: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { abbreviate: true }
    }
}

pub fn render(f: &Formula) -> String {
    render_with(f, RenderOptions::default())
}

pub fn render_with(f: &Formula, opts: RenderOptions) -> String {
    let mut out = String::new();
    write(f, opts, true, &mut out);
    out
}

enum View<'a> {
    Leaf(String),
    Prefix(String, &'a Formula),
    Binary(&'static str, &'a Formula, &'a Formula),
    Until(&'a Formula, &'a Formula),
}

/// Matches `~(a & ~b)` and returns `(a, b)`.
fn as_implication(f: &Formula) -> Option<(&Formula, &Formula)> {
    match f {
        Formula::Not(inner) => match &**inner {
            Formula::And(a, nb) => match &**nb {
                Formula::Not(b) => Some((a, b)),
                _ => None,
            },
            _ => None,
        },
        _ => None,
    }
}

fn strip_not(f: &Formula) -> Option<&Formula> {
    match f {
        Formula::Not(inner) => Some(inner),
        _ => None,
    }
}

fn view(f: &Formula, opts: RenderOptions) -> View<'_> {
    if opts.abbreviate {
        if let Some(v) = abbreviated(f) {
            return v;
        }
    }
    match f {
        Formula::Atom(name) => View::Leaf(name.clone()),
        Formula::Top => View::Leaf("true".into()),
        Formula::Bottom => View::Leaf("false".into()),
        Formula::Not(g) => View::Prefix("~".into(), g),
        Formula::And(a, b) => View::Binary("&", a, b),
        Formula::Nec(g) => View::Prefix("box ".into(), g),
        Formula::Stit(i, g) => View::Prefix(format!("[{i}] "), g),
        Formula::GroupStit(g) => View::Prefix("[*] ".into(), g),
        Formula::Ought(i, g) => View::Prefix(format!("O{i} "), g),
        Formula::Next(g) => View::Prefix("X ".into(), g),
        Formula::Until(a, b) => View::Until(a, b),
    }
}

fn abbreviated(f: &Formula) -> Option<View<'_>> {
    match f {
        Formula::Not(inner) => match &**inner {
            Formula::Nec(g) => strip_not(g).map(|h| View::Prefix("dia ".into(), h)),
            Formula::Stit(i, g) => strip_not(g).map(|h| View::Prefix(format!("<{i}> "), h)),
            Formula::GroupStit(g) => strip_not(g).map(|h| View::Prefix("<*> ".into(), h)),
            Formula::Ought(i, g) => strip_not(g).map(|h| View::Prefix(format!("M{i} "), h)),
            Formula::Until(a, top) if **top == Formula::Top => {
                strip_not(a).map(|h| View::Prefix("G ".into(), h))
            }
            Formula::And(a, b) => match (&**a, &**b) {
                (Formula::Not(x), Formula::Not(y)) => Some(View::Binary("|", x, y)),
                (x, Formula::Not(y)) => Some(View::Binary("->", x, y)),
                _ => None,
            },
            _ => None,
        },
        Formula::And(a, b) => {
            let (x1, y1) = as_implication(a)?;
            let (y2, x2) = as_implication(b)?;
            (x1 == x2 && y1 == y2).then_some(View::Binary("<->", x1, y1))
        }
        Formula::Until(a, top) if **top == Formula::Top => Some(View::Prefix("F ".into(), a)),
        _ => None,
    }
}

fn write(f: &Formula, opts: RenderOptions, top: bool, out: &mut String) {
    match view(f, opts) {
        View::Leaf(s) => out.push_str(&s),
        View::Prefix(prefix, g) => {
            out.push_str(&prefix);
            write(g, opts, false, out);
        }
        View::Binary(op, a, b) => {
            if !top {
                out.push('(');
            }
            write(a, opts, false, out);
            out.push(' ');
            out.push_str(op);
            out.push(' ');
            write(b, opts, false, out);
            if !top {
                out.push(')');
            }
        }
        View::Until(a, b) => {
            out.push_str("U(");
            write(a, opts, true, out);
            out.push_str(", ");
            write(b, opts, true, out);
            out.push(')');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    #[test]
    fn atoms_and_sugar() {
        assert_eq!(render(&Formula::atom("p")), "p");
        let fp = Formula::until(Formula::atom("p"), Formula::Top);
        assert_eq!(render(&fp), "F p");
        assert_eq!(
            render_with(&fp, RenderOptions { abbreviate: false }),
            "U(p, true)"
        );
    }

    #[test]
    fn derived_connectives_print_back() {
        for src in [
            "p | q",
            "p -> q",
            "p <-> q",
            "dia p",
            "<1> p",
            "<*> p",
            "M1 p",
            "G p",
            "G ~p",
            "~F p",
            "box (p -> q) -> (box p -> box q)",
        ] {
            let f = parse(src, 2).unwrap();
            assert_eq!(render(&f), src, "source {src}");
        }
    }

    #[test]
    fn primitive_mode_roundtrips() {
        let f = parse("dia [1] X (O1 [1] p & O2 [2] q) <-> G r", 2).unwrap();
        let plain = render_with(&f, RenderOptions { abbreviate: false });
        assert!(!plain.contains("dia") && !plain.contains("<->"));
        assert_eq!(parse(&plain, 2).unwrap(), f);
    }
}

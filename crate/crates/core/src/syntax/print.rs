use super::Formula;

// Binding strength of the printed context: 0 quantifier body, 1 right of
// `->`, 2 operand of `\/`, 3 operand of `&`, 4 operand of a prefix operator.
pub fn print(f: &Formula) -> String {
    let mut out = String::new();
    go(f, 0, &mut out);
    out
}

fn negated(f: &Formula) -> Option<&Formula> {
    match f {
        Formula::Implies(a, b) if **b == Formula::Bot => Some(a),
        _ => None,
    }
}

fn questioned(f: &Formula) -> Option<&Formula> {
    match f {
        Formula::IDisj(a, b) if negated(b) == Some(a.as_ref()) => Some(a),
        _ => None,
    }
}

fn go(f: &Formula, ctx: u8, out: &mut String) {
    if let Some(a) = questioned(f) {
        out.push('?');
        go(a, 4, out);
        return;
    }
    if let Some(a) = negated(f) {
        out.push('~');
        go(a, 4, out);
        return;
    }
    let (prec, body): (u8, Box<dyn Fn(&mut String)>) = match f {
        Formula::Bot => (5, Box::new(|o: &mut String| o.push_str("bot"))),
        Formula::Atom(p, args) => (
            5,
            Box::new(move |o: &mut String| {
                o.push_str(p);
                if !args.is_empty() {
                    o.push('(');
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            o.push(',');
                        }
                        o.push_str(a);
                    }
                    o.push(')');
                }
            }),
        ),
        Formula::Implies(a, b) => (
            1,
            Box::new(move |o: &mut String| {
                go(a, 2, o);
                o.push_str(" -> ");
                go(b, 1, o);
            }),
        ),
        Formula::IDisj(a, b) => (
            2,
            Box::new(move |o: &mut String| {
                go(a, 2, o);
                o.push_str(" \\/ ");
                go(b, 3, o);
            }),
        ),
        Formula::And(a, b) => (
            3,
            Box::new(move |o: &mut String| {
                go(a, 3, o);
                o.push_str(" & ");
                go(b, 4, o);
            }),
        ),
        Formula::Forall(x, a) | Formula::IExists(x, a) => {
            let kw = if matches!(f, Formula::Forall(..)) { "forall" } else { "iexists" };
            (
                0,
                Box::new(move |o: &mut String| {
                    o.push_str(kw);
                    o.push(' ');
                    o.push_str(x);
                    o.push_str(". ");
                    go(a, 0, o);
                }),
            )
        }
    };
    if prec < ctx {
        out.push('(');
        body(out);
        out.push(')');
    } else {
        body(out);
    }
}

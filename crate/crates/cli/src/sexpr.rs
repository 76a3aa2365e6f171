//! Tokens and s-expressions of one input line.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    /// 1-based column of the first character.
    pub col: usize,
}

impl Token {
    pub fn is(&self, s: &str) -> bool {
        self.text == s
    }
}

pub fn tokenize(line: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut cur: Option<Token> = None;
    for (k, c) in line.chars().enumerate() {
        let col = k + 1;
        if c.is_whitespace() || matches!(c, '(' | ')' | '[' | ']') {
            out.extend(cur.take());
            if !c.is_whitespace() {
                out.push(Token { text: c.to_string(), col });
            }
        } else {
            cur.get_or_insert_with(|| Token { text: String::new(), col }).text.push(c);
        }
    }
    out.extend(cur);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SExpr {
    Atom(Token),
    List(Vec<SExpr>, usize),
}

impl SExpr {
    pub fn col(&self) -> usize {
        match self {
            SExpr::Atom(t) => t.col,
            SExpr::List(_, c) => *c,
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            SExpr::Atom(t) => Some(&t.text),
            SExpr::List(..) => None,
        }
    }
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExpr::Atom(t) => write!(f, "{}", t.text),
            SExpr::List(xs, _) => {
                write!(f, "(")?;
                for (k, x) in xs.iter().enumerate() {
                    if k > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Read one s-expression starting at `toks[*pos]`. Errors are `(col, message)`.
pub fn read(toks: &[Token], pos: &mut usize) -> Result<SExpr, (usize, String)> {
    let Some(t) = toks.get(*pos) else {
        let col = toks.last().map_or(1, |t| t.col + t.text.chars().count());
        return Err((col, "expected an expression".into()));
    };
    *pos += 1;
    match t.text.as_str() {
        "(" => {
            let mut items = Vec::new();
            loop {
                match toks.get(*pos) {
                    None => return Err((t.col, "unclosed `(`".into())),
                    Some(c) if c.is(")") => {
                        *pos += 1;
                        return Ok(SExpr::List(items, t.col));
                    }
                    Some(_) => items.push(read(toks, pos)?),
                }
            }
        }
        ")" | "[" | "]" => Err((t.col, format!("unexpected `{}`", t.text))),
        _ => Ok(SExpr::Atom(t.clone())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_are_one_based() {
        let ts = tokenize("var x = (cons 1 x)");
        let cols: Vec<usize> = ts.iter().map(|t| t.col).collect();
        assert_eq!(cols, vec![1, 5, 7, 9, 10, 15, 17, 18]);
    }

    #[test]
    fn nested_lists_roundtrip() {
        let ts = tokenize("(cons (head o) (plus x (tail o)))");
        let mut pos = 0;
        let e = read(&ts, &mut pos).unwrap();
        assert_eq!(pos, ts.len());
        assert_eq!(e.to_string(), "(cons (head o) (plus x (tail o)))");
    }

    #[test]
    fn unclosed_list_points_at_open_paren() {
        let ts = tokenize("x (cons 1");
        let mut pos = 1;
        assert_eq!(read(&ts, &mut pos), Err((3, "unclosed `(`".into())));
    }
}

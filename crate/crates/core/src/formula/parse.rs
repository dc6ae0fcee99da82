use super::Formula;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unknown token at byte {pos}: {found:?}")]
    UnknownToken { pos: usize, found: char },
    #[error("syntax error at byte {pos}: expected {expected}, found {found}")]
    Syntax {
        pos: usize,
        expected: &'static str,
        found: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Atom(String),
    True,
    False,
    Not,
    Box,
    Diamond,
    And,
    Or,
    Implies,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Atom(a) => format!("atom `{a}`"),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::Not => "`~`".into(),
            Tok::Box => "`[]`".into(),
            Tok::Diamond => "`<>`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Implies => "`->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'~' => {
                i += 1;
                Tok::Not
            }
            b'&' => {
                i += 1;
                Tok::And
            }
            b'|' => {
                i += 1;
                Tok::Or
            }
            b'(' => {
                i += 1;
                Tok::LParen
            }
            b')' => {
                i += 1;
                Tok::RParen
            }
            b'[' if bytes.get(i + 1) == Some(&b']') => {
                i += 2;
                Tok::Box
            }
            b'<' if bytes.get(i + 1) == Some(&b'>') => {
                i += 2;
                Tok::Diamond
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 2;
                Tok::Implies
            }
            b'a'..=b'z' => {
                while i < bytes.len()
                    && (bytes[i].is_ascii_lowercase() || bytes[i].is_ascii_digit() || bytes[i] == b'_')
                {
                    i += 1;
                }
                match &text[start..i] {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    name => Tok::Atom(name.to_string()),
                }
            }
            _ => {
                let found = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError::UnknownToken { pos: start, found });
            }
        };
        out.push((start, tok));
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, expected: &'static str) -> ParseError {
        let (pos, tok) = &self.toks[self.at];
        ParseError::Syntax {
            pos: *pos,
            expected,
            found: tok.describe(),
        }
    }

    // implication := disjunction ('->' implication)?
    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Box => {
                self.bump();
                Ok(Formula::boxed(self.unary()?))
            }
            Tok::Diamond => {
                self.bump();
                Ok(Formula::diamond(self.unary()?))
            }
            Tok::Atom(name) => {
                self.bump();
                Ok(Formula::atom(&name))
            }
            Tok::True => {
                self.bump();
                Ok(Formula::top())
            }
            Tok::False => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Tok::LParen => {
                self.bump();
                let inner = self.implication()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error("`)`"));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error("a formula")),
        }
    }
}

/// Parses the ASCII concrete syntax into primitive form.
///
/// Atoms are `[a-z][a-z0-9_]*`; constants `true`/`false`; prefix `~`, `[]`,
/// `<>`; infix `&`, `|`, `->` in decreasing binding strength. `&` and `|`
/// associate to the left, `->` to the right.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let f = p.implication()?;
    if *p.peek() != Tok::End {
        return Err(p.error("end of input"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }
    fn q() -> Formula {
        Formula::atom("q")
    }

    #[test]
    fn grammar_examples() {
        assert_eq!(parse("p & ~q").unwrap(), Formula::and(p(), Formula::not(q())));
        assert_eq!(
            parse("<>p").unwrap(),
            Formula::not(Formula::boxed(Formula::not(p())))
        );
        assert_eq!(
            parse("p -> q").unwrap(),
            Formula::not(Formula::and(p(), Formula::not(q())))
        );
    }

    #[test]
    fn precedence_and_associativity() {
        let r = Formula::atom("r");
        assert_eq!(
            parse("p | q & r").unwrap(),
            Formula::or(p(), Formula::and(q(), r.clone()))
        );
        assert_eq!(
            parse("p -> q -> r").unwrap(),
            Formula::implies(p(), Formula::implies(q(), r.clone()))
        );
        assert_eq!(
            parse("p & q & r").unwrap(),
            Formula::and(Formula::and(p(), q()), r)
        );
        assert_eq!(parse("[]~p").unwrap(), Formula::boxed(Formula::not(p())));
        assert_eq!(parse("~[]p & q").unwrap(), Formula::and(Formula::not(Formula::boxed(p())), q()));
        assert_eq!(parse("true").unwrap(), Formula::top());
        assert_eq!(parse(" ( false ) ").unwrap(), Formula::Bottom);
        assert_eq!(parse("p_1").unwrap(), Formula::atom("p_1"));
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse("p & Q"),
            Err(ParseError::UnknownToken { pos: 4, found: 'Q' })
        );
        assert!(matches!(parse("p &"), Err(ParseError::Syntax { pos: 3, .. })));
        assert!(matches!(parse("(p"), Err(ParseError::Syntax { pos: 2, .. })));
        assert!(matches!(parse("p q"), Err(ParseError::Syntax { pos: 2, .. })));
        assert!(matches!(parse(""), Err(ParseError::Syntax { pos: 0, .. })));
        assert!(matches!(parse("[p"), Err(ParseError::UnknownToken { pos: 0, .. })));
    }
}

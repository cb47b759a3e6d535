use super::{ParseError, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Str(String),
    // keywords
    Effect,
    Prim,
    Purify,
    Fun,
    Let,
    In,
    TUnit,
    TStr,
    TEff,
    KPure,
    KMap,
    KAp,
    KJoin,
    // punctuation
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Arrow,
    Bang,
    Proj1,
    Proj2,
    Concat,
    Eq,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::Eof => "end of input".into(),
            t => format!("`{}`", t.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Effect => "effect",
            Tok::Prim => "prim",
            Tok::Purify => "purify",
            Tok::Fun => "fun",
            Tok::Let => "let",
            Tok::In => "in",
            Tok::TUnit => "Unit",
            Tok::TStr => "Str",
            Tok::TEff => "Eff",
            Tok::KPure => "pure",
            Tok::KMap => "map",
            Tok::KAp => "ap",
            Tok::KJoin => "join",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Arrow => "->",
            Tok::Bang => "!",
            Tok::Proj1 => ".1",
            Tok::Proj2 => ".2",
            Tok::Concat => "++",
            Tok::Eq => "=",
            Tok::Ident(_) | Tok::Str(_) | Tok::Eof => "",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
    /// No whitespace or comment separates this token from the previous one.
    pub adjacent: bool,
}

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "effect" => Tok::Effect,
        "prim" => Tok::Prim,
        "purify" => Tok::Purify,
        "fun" => Tok::Fun,
        "let" => Tok::Let,
        "in" => Tok::In,
        "Unit" => Tok::TUnit,
        "Str" => Tok::TStr,
        "Eff" => Tok::TEff,
        "pure" => Tok::KPure,
        "map" => Tok::KMap,
        "ap" => Tok::KAp,
        "join" => Tok::KJoin,
        _ => return None,
    })
}

pub fn lex(input: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;
    let (mut line, mut col) = (1usize, 1usize);
    let mut out = Vec::new();
    let mut adjacent = false;

    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, c);
            adjacent = false;
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                {
                    let ch = chars[i];
                    advance(&mut i, &mut line, &mut col, ch);
                }
            }
            adjacent = false;
            continue;
        }
        let pos = Pos { line, col };
        let err = |expected: &str| ParseError::Syntax {
            line: pos.line,
            col: pos.col,
            expected: expected.to_string(),
            found: format!("`{c}`"),
        };
        let tok = if c.is_alphabetic() || c == '_' || c == '$' {
            let start = i;
            advance(&mut i, &mut line, &mut col, c);
            while i < chars.len()
                && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
            {
                {
                    let ch = chars[i];
                    advance(&mut i, &mut line, &mut col, ch);
                }
            }
            let word: String = chars[start..i].iter().collect();
            if word == "$" {
                return Err(err("identifier"));
            }
            keyword(&word).unwrap_or(Tok::Ident(word))
        } else if c == '"' {
            advance(&mut i, &mut line, &mut col, c);
            let mut s = String::new();
            loop {
                let Some(&d) = chars.get(i) else {
                    return Err(ParseError::Syntax {
                        line: pos.line,
                        col: pos.col,
                        expected: "closing `\"`".into(),
                        found: "end of input".into(),
                    });
                };
                advance(&mut i, &mut line, &mut col, d);
                match d {
                    '"' => break,
                    '\\' => {
                        let Some(&e) = chars.get(i) else { continue };
                        advance(&mut i, &mut line, &mut col, e);
                        s.push(match e {
                            'n' => '\n',
                            't' => '\t',
                            other => other,
                        });
                    }
                    d => s.push(d),
                }
            }
            Tok::Str(s)
        } else {
            let next = chars.get(i + 1).copied();
            let (tok, len) = match (c, next) {
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('+', Some('+')) => (Tok::Concat, 2),
                ('.', Some('1')) => (Tok::Proj1, 2),
                ('.', Some('2')) => (Tok::Proj2, 2),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                (',', _) => (Tok::Comma, 1),
                (':', _) => (Tok::Colon, 1),
                ('!', _) => (Tok::Bang, 1),
                ('=', _) => (Tok::Eq, 1),
                _ => return Err(err("a token")),
            };
            for _ in 0..len {
                {
                    let ch = chars[i];
                    advance(&mut i, &mut line, &mut col, ch);
                }
            }
            tok
        };
        out.push(Token { tok, pos, adjacent });
        adjacent = true;
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
        adjacent: false,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn basic() {
        assert_eq!(
            toks("f(\"a\")! -- comment\n x.1 ++ $3"),
            vec![
                Tok::Ident("f".into()),
                Tok::LParen,
                Tok::Str("a".into()),
                Tok::RParen,
                Tok::Bang,
                Tok::Ident("x".into()),
                Tok::Proj1,
                Tok::Concat,
                Tok::Ident("$3".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn adjacency() {
        let t = lex("f(x) f (x)").unwrap();
        assert!(t[1].adjacent);
        assert!(!t[5].adjacent);
    }

    #[test]
    fn positions_and_errors() {
        let t = lex("a\n  b").unwrap();
        assert_eq!(t[1].pos, Pos { line: 2, col: 3 });
        assert!(matches!(
            lex("a # b"),
            Err(ParseError::Syntax {
                line: 1,
                col: 3,
                ..
            })
        ));
        assert!(lex("\"open").is_err());
    }

    #[test]
    fn string_escapes() {
        assert_eq!(toks(r#""a\"b\n""#)[0], Tok::Str("a\"b\n".into()));
    }
}

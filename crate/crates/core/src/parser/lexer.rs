use super::{ParseError, ParseErrorKind, SourceLocation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Var(String),
    Anon,
    Int(i64),
    Str(String),
    Not,
    Aggregate(String),
    If,
    WeakIf,
    Dot,
    DotDot,
    Comma,
    Semi,
    Bar,
    Colon,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBrack,
    RBrack,
    At,
    Plus,
    Minus,
    Star,
    Slash,
    Backslash,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Eof,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub loc: SourceLocation,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let loc = SourceLocation { line, column: col };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '%' {
            if chars.get(i + 1) == Some(&'*') {
                bump!();
                bump!();
                loop {
                    if i >= chars.len() {
                        return Err(ParseError::new(loc, ParseErrorKind::Lexical, "unterminated block comment"));
                    }
                    if chars[i] == '*' && chars.get(i + 1) == Some(&'%') {
                        bump!();
                        bump!();
                        break;
                    }
                    bump!();
                }
            } else {
                while i < chars.len() && chars[i] != '\n' {
                    bump!();
                }
            }
            continue;
        }
        let two: Option<char> = chars.get(i + 1).copied();
        let simple = |t: Tok| Token { tok: t, loc };
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            let word: String = chars[start..i].iter().collect();
            let tok = if word == "_" {
                Tok::Anon
            } else if word == "not" {
                Tok::Not
            } else if let Some(rest) = word.strip_prefix('_') {
                // `_X` is an ordinary named variable
                if rest.starts_with(|ch: char| ch.is_ascii_uppercase()) {
                    Tok::Var(word)
                } else {
                    return Err(ParseError::new(loc, ParseErrorKind::Lexical, format!("invalid identifier `{word}`")));
                }
            } else if c.is_ascii_uppercase() {
                Tok::Var(word)
            } else {
                Tok::Ident(word)
            };
            out.push(Token { tok, loc });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            let digits: String = chars[start..i].iter().collect();
            let value = digits
                .parse::<i64>()
                .map_err(|_| ParseError::new(loc, ParseErrorKind::Lexical, format!("integer `{digits}` out of range")))?;
            out.push(simple(Tok::Int(value)));
            continue;
        }
        if c == '"' {
            let start = i;
            bump!();
            loop {
                match chars.get(i) {
                    None | Some('\n') => {
                        return Err(ParseError::new(loc, ParseErrorKind::Lexical, "unterminated string"))
                    }
                    Some('\\') => {
                        bump!();
                        if i < chars.len() {
                            bump!();
                        }
                    }
                    Some('"') => {
                        bump!();
                        break;
                    }
                    Some(_) => bump!(),
                }
            }
            out.push(simple(Tok::Str(chars[start..i].iter().collect())));
            continue;
        }
        if c == '#' {
            let start = i;
            bump!();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            let word: String = chars[start + 1..i].iter().collect();
            if word.is_empty() {
                return Err(ParseError::new(loc, ParseErrorKind::Lexical, "stray `#`"));
            }
            out.push(simple(Tok::Aggregate(word)));
            continue;
        }
        let (tok, len) = match (c, two) {
            (':', Some('-')) => (Tok::If, 2),
            (':', Some('~')) => (Tok::WeakIf, 2),
            (':', _) => (Tok::Colon, 1),
            ('.', Some('.')) => (Tok::DotDot, 2),
            ('.', _) => (Tok::Dot, 1),
            (',', _) => (Tok::Comma, 1),
            (';', _) => (Tok::Semi, 1),
            ('|', _) => (Tok::Bar, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            ('[', _) => (Tok::LBrack, 1),
            (']', _) => (Tok::RBrack, 1),
            ('@', _) => (Tok::At, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('/', _) => (Tok::Slash, 1),
            ('\\', _) => (Tok::Backslash, 1),
            ('=', Some('=')) => (Tok::Eq, 2),
            ('=', _) => (Tok::Eq, 1),
            ('!', Some('=')) => (Tok::Ne, 2),
            ('<', Some('>')) => (Tok::Ne, 2),
            ('<', Some('=')) => (Tok::Le, 2),
            ('<', _) => (Tok::Lt, 1),
            ('>', Some('=')) => (Tok::Ge, 2),
            ('>', _) => (Tok::Gt, 1),
            _ => {
                return Err(ParseError::new(
                    loc,
                    ParseErrorKind::Lexical,
                    format!("unexpected character `{c}`"),
                ))
            }
        };
        for _ in 0..len {
            bump!();
        }
        out.push(simple(tok));
    }
    out.push(Token {
        tok: Tok::Eof,
        loc: SourceLocation { line, column: col },
    });
    Ok(out)
}

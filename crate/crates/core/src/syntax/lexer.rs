use crate::diag::{DiagCode, Diagnostic, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    /// Digits only; sign is handled by the parser so `i64::MIN` is expressible.
    Int(String),
    Statechart,
    State,
    Initial,
    Final,
    Var,
    Event,
    When,
    On,
    IntKw,
    BoolKw,
    True,
    False,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Colon,
    Assign,
    Arrow,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    AndAnd,
    OrOr,
    Bang,
    Minus,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(name) => format!("identifier `{name}`"),
            Tok::Int(digits) => format!("integer `{digits}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Statechart => "statechart",
            Tok::State => "state",
            Tok::Initial => "initial",
            Tok::Final => "final",
            Tok::Var => "var",
            Tok::Event => "event",
            Tok::When => "when",
            Tok::On => "on",
            Tok::IntKw => "int",
            Tok::BoolKw => "bool",
            Tok::True => "true",
            Tok::False => "false",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Colon => ":",
            Tok::Assign => "=",
            Tok::Arrow => "->",
            Tok::EqEq => "==",
            Tok::NotEq => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Bang => "!",
            Tok::Minus => "-",
            Tok::Ident(_) | Tok::Int(_) | Tok::Eof => "",
        }
    }
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "statechart" => Tok::Statechart,
        "state" => Tok::State,
        "initial" => Tok::Initial,
        "final" => Tok::Final,
        "var" => Tok::Var,
        "event" => Tok::Event,
        "when" => Tok::When,
        "on" => Tok::On,
        "int" => Tok::IntKw,
        "bool" => Tok::BoolKw,
        "true" => Tok::True,
        "false" => Tok::False,
        _ => return None,
    })
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// Splits `src` into tokens. Invalid characters are reported and skipped so
/// the parser still sees the rest of the input.
pub(crate) fn tokenize(src: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let chars: Vec<char> = src.chars().collect();
    let mut tokens = Vec::new();
    let mut diags = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut col = 1u32;

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }

        let start_col = col;
        let take = |n: usize, tok: Tok, tokens: &mut Vec<Token>| {
            tokens.push(Token {
                tok,
                span: Span::new(line, start_col, n as u32),
            });
            n
        };
        let next = chars.get(i + 1).copied();
        let consumed = if c.is_ascii_alphabetic() || c == '_' {
            let len = chars[i..]
                .iter()
                .take_while(|c| c.is_ascii_alphanumeric() || **c == '_')
                .count();
            let word: String = chars[i..i + len].iter().collect();
            let tok = keyword(&word).unwrap_or(Tok::Ident(word));
            take(len, tok, &mut tokens)
        } else if c.is_ascii_digit() {
            let len = chars[i..].iter().take_while(|c| c.is_ascii_digit()).count();
            let trailing = chars[i + len..]
                .iter()
                .take_while(|c| c.is_ascii_alphanumeric() || **c == '_')
                .count();
            if trailing > 0 {
                diags.push(Diagnostic::at(
                    DiagCode::Lexical,
                    "malformed number",
                    Span::new(line, start_col, (len + trailing) as u32),
                ));
                len + trailing
            } else {
                let digits: String = chars[i..i + len].iter().collect();
                take(len, Tok::Int(digits), &mut tokens)
            }
        } else {
            match (c, next) {
                ('-', Some('>')) => take(2, Tok::Arrow, &mut tokens),
                ('=', Some('=')) => take(2, Tok::EqEq, &mut tokens),
                ('!', Some('=')) => take(2, Tok::NotEq, &mut tokens),
                ('<', Some('=')) => take(2, Tok::Le, &mut tokens),
                ('>', Some('=')) => take(2, Tok::Ge, &mut tokens),
                ('&', Some('&')) => take(2, Tok::AndAnd, &mut tokens),
                ('|', Some('|')) => take(2, Tok::OrOr, &mut tokens),
                ('{', _) => take(1, Tok::LBrace, &mut tokens),
                ('}', _) => take(1, Tok::RBrace, &mut tokens),
                ('[', _) => take(1, Tok::LBracket, &mut tokens),
                (']', _) => take(1, Tok::RBracket, &mut tokens),
                ('(', _) => take(1, Tok::LParen, &mut tokens),
                (')', _) => take(1, Tok::RParen, &mut tokens),
                (':', _) => take(1, Tok::Colon, &mut tokens),
                ('=', _) => take(1, Tok::Assign, &mut tokens),
                ('<', _) => take(1, Tok::Lt, &mut tokens),
                ('>', _) => take(1, Tok::Gt, &mut tokens),
                ('!', _) => take(1, Tok::Bang, &mut tokens),
                ('-', _) => take(1, Tok::Minus, &mut tokens),
                _ => {
                    diags.push(Diagnostic::at(
                        DiagCode::Lexical,
                        format!("unexpected character `{}`", c.escape_default()),
                        Span::new(line, start_col, 1),
                    ));
                    1
                }
            }
        };
        i += consumed;
        col += consumed as u32;
    }

    tokens.push(Token {
        tok: Tok::Eof,
        span: eof_span(src),
    });
    (tokens, diags)
}

/// Zero-length span just past the last character.
pub(crate) fn eof_span(src: &str) -> Span {
    let line = src.matches('\n').count() as u32 + 1;
    let last = src.rsplit('\n').next().unwrap_or("");
    Span::new(line, last.chars().count() as u32 + 1, 0)
}

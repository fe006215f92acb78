//! Recursive-descent parser for `.sct.txt` statechart sources.
//!
//! ```text
//! program    := 'statechart' IDENT '{' item* '}' EOF
//! item       := 'var' IDENT ':' ('int' | 'bool') '=' literal
//!             | 'event' IDENT
//!             | 'initial' '->' IDENT
//!             | 'state' IDENT '{' transition* '}'
//! transition := ('when' | 'on' IDENT) ('[' expr ']')? '->' (IDENT | 'final')
//! expr       := and ('||' and)*
//! and        := unary ('&&' unary)*
//! unary      := '!' unary | compare
//! compare    := primary (('==' | '!=' | '<' | '<=' | '>' | '>=') primary)?
//! primary    := literal | IDENT | '(' expr ')'
//! literal    := '-'? INT | 'true' | 'false'
//! ```
//!
//! Errors inside an item are reported and the parser resynchronises at the
//! next item keyword, so one pass reports as many problems as possible.

use crate::diag::{DiagCode, Diagnostic, Loc, Span};
use crate::model::{
    CompareOp, EventDecl, Expr, LogicOp, StateDef, StateRef, StatechartModel, Transition, Trigger,
    Value, VarType, VariableDecl,
};

use super::lexer::{tokenize, Tok, Token};

/// Marker for "a diagnostic was recorded; unwind to the recovery point".
struct Fail;

type PResult<T> = Result<T, Fail>;

pub(crate) fn parse(src: &str) -> Result<StatechartModel, Vec<Diagnostic>> {
    let (tokens, lex_diags) = tokenize(src);
    let mut parser = Parser {
        tokens,
        pos: 0,
        diags: lex_diags,
    };
    let model = parser.program();
    match model {
        Some(model) if parser.diags.is_empty() => Ok(model),
        _ => {
            let mut diags = parser.diags;
            diags.sort_by_key(|d| d.span.map(|s| (s.line, s.column)));
            Err(diags)
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn span(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let token = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        token
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&mut self, expected: &str) -> PResult<T> {
        let found = self.peek().describe();
        self.diags.push(Diagnostic::at(
            DiagCode::Syntax,
            format!("expected {expected}, found {found}"),
            self.span(),
        ));
        Err(Fail)
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> PResult<Span> {
        if self.peek() == &tok {
            Ok(self.bump().span)
        } else {
            self.error(expected)
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.bump().span;
                Ok((name, span))
            }
            _ => self.error(what),
        }
    }

    /// Skips tokens until `stop` says a safe restart point is reached.
    fn skip_until(&mut self, stop: impl Fn(&Tok) -> bool) {
        while !matches!(self.peek(), Tok::Eof) && !stop(self.peek()) {
            self.bump();
        }
    }

    fn program(&mut self) -> Option<StatechartModel> {
        if self.expect(Tok::Statechart, "`statechart`").is_err() {
            return None;
        }
        let (name, name_span) = self.ident("statechart name").ok()?;
        self.expect(Tok::LBrace, "`{`").ok()?;

        let mut model = StatechartModel::new(name);
        model.name_loc = name_span.into();
        loop {
            match self.peek() {
                Tok::RBrace => {
                    self.bump();
                    break;
                }
                Tok::Eof => {
                    let _ = self.error::<()>("`}` closing the statechart");
                    return Some(model);
                }
                _ => {
                    if self.item(&mut model).is_err() {
                        self.skip_until(|t| {
                            matches!(
                                t,
                                Tok::Var | Tok::Event | Tok::Initial | Tok::State | Tok::RBrace
                            )
                        });
                    }
                }
            }
        }
        if !matches!(self.peek(), Tok::Eof) {
            let _ = self.error::<()>("end of input after the statechart");
        }
        Some(model)
    }

    fn item(&mut self, model: &mut StatechartModel) -> PResult<()> {
        match self.peek() {
            Tok::Var => {
                self.bump();
                let (name, span) = self.ident("variable name")?;
                self.expect(Tok::Colon, "`:`")?;
                let vtype = match self.peek() {
                    Tok::IntKw => VarType::Int,
                    Tok::BoolKw => VarType::Bool,
                    _ => return self.error("`int` or `bool`"),
                };
                self.bump();
                self.expect(Tok::Assign, "`=`")?;
                let default = self.literal()?;
                model.variables.push(VariableDecl {
                    name,
                    vtype,
                    default,
                    loc: span.into(),
                });
            }
            Tok::Event => {
                self.bump();
                let (name, span) = self.ident("event name")?;
                model.events.push(EventDecl {
                    name,
                    loc: span.into(),
                });
            }
            Tok::Initial => {
                let initial_span = self.bump().span;
                self.expect(Tok::Arrow, "`->`")?;
                let (target, span) = self.ident("initial state name")?;
                if model.initial_target.is_some() {
                    self.diags.push(Diagnostic::at(
                        DiagCode::Syntax,
                        "duplicate `initial` declaration",
                        initial_span,
                    ));
                } else {
                    model.initial_target = Some(target);
                    model.initial_loc = span.into();
                }
            }
            Tok::State => {
                self.bump();
                let (name, span) = self.ident("state name")?;
                self.expect(Tok::LBrace, "`{`")?;
                let mut state = StateDef::new(name);
                state.loc = span.into();
                self.state_body(&mut state);
                model.states.push(state);
            }
            _ => return self.error("`var`, `event`, `initial`, `state` or `}`"),
        }
        Ok(())
    }

    /// Parses transitions up to and including the closing brace.
    fn state_body(&mut self, state: &mut StateDef) {
        loop {
            match self.peek() {
                Tok::RBrace => {
                    self.bump();
                    return;
                }
                Tok::Eof => {
                    let _ = self.error::<()>("`}` closing the state");
                    return;
                }
                _ => match self.transition(state) {
                    Ok(t) => state.transitions.push(t),
                    Err(Fail) => {
                        self.skip_until(|t| {
                            matches!(t, Tok::When | Tok::On | Tok::RBrace | Tok::State)
                        });
                        if matches!(self.peek(), Tok::State) {
                            // missing `}`; let the item loop take the next state
                            return;
                        }
                    }
                },
            }
        }
    }

    fn transition(&mut self, state: &StateDef) -> PResult<Transition> {
        let start = self.span();
        let trigger = match self.peek() {
            Tok::When => {
                self.bump();
                Trigger::None
            }
            Tok::On => {
                self.bump();
                Trigger::Event(self.ident("event name")?.0)
            }
            _ => return self.error("`when`, `on` or `}`"),
        };
        let guard = if self.eat(&Tok::LBracket) {
            let expr = self.expr()?;
            self.expect(Tok::RBracket, "`]`")?;
            Some(expr)
        } else {
            None
        };
        self.expect(Tok::Arrow, "`->`")?;
        let target = match self.peek().clone() {
            Tok::Final => StateRef::Final,
            Tok::Ident(name) => StateRef::State(name),
            _ => return self.error("target state name or `final`"),
        };
        self.bump();
        Ok(Transition {
            source: state.name.clone(),
            target,
            trigger,
            guard,
            decl_index: state.transitions.len(),
            loc: Loc::from(start),
        })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::OrOr) {
            let rhs = self.and()?;
            lhs = Expr::logic(LogicOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::AndAnd) {
            let rhs = self.unary()?;
            lhs = Expr::logic(LogicOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat(&Tok::Bang) {
            Ok(Expr::negate(self.unary()?))
        } else {
            self.compare()
        }
    }

    fn compare(&mut self) -> PResult<Expr> {
        let lhs = self.primary()?;
        let op = match self.peek() {
            Tok::EqEq => CompareOp::Eq,
            Tok::NotEq => CompareOp::Ne,
            Tok::Lt => CompareOp::Lt,
            Tok::Le => CompareOp::Le,
            Tok::Gt => CompareOp::Gt,
            Tok::Ge => CompareOp::Ge,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.primary()?;
        Ok(Expr::compare(op, lhs, rhs))
    }

    fn primary(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                Ok(Expr::Var(name))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Int(_) | Tok::Minus | Tok::True | Tok::False => Ok(match self.literal()? {
                Value::Int(v) => Expr::Int(v),
                Value::Bool(v) => Expr::Bool(v),
            }),
            _ => self.error("an expression"),
        }
    }

    fn literal(&mut self) -> PResult<Value> {
        let start = self.span();
        let negative = self.eat(&Tok::Minus);
        match self.peek().clone() {
            Tok::True if !negative => {
                self.bump();
                Ok(Value::Bool(true))
            }
            Tok::False if !negative => {
                self.bump();
                Ok(Value::Bool(false))
            }
            Tok::Int(digits) => {
                let end = self.bump().span;
                let magnitude: Option<i128> = digits.parse().ok();
                let value = magnitude
                    .map(|m| if negative { -m } else { m })
                    .and_then(|v| i64::try_from(v).ok());
                match value {
                    Some(v) => Ok(Value::Int(v)),
                    None => {
                        let span = if end.line == start.line {
                            Span::new(
                                start.line,
                                start.column,
                                end.column + end.length - start.column,
                            )
                        } else {
                            end
                        };
                        self.diags.push(Diagnostic::at(
                            DiagCode::Lexical,
                            "integer literal does not fit in 64 bits",
                            span,
                        ));
                        Err(Fail)
                    }
                }
            }
            _ if negative => self.error("integer literal after `-`"),
            _ => self.error("a literal"),
        }
    }
}

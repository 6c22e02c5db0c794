//! Recursive-descent parser for the textual formula language.
//!
//! ```text
//! formula     := "forall" var "." formula | "exists" var "." formula | implication
//! implication := disjunction [ "->" implication ]
//! disjunction := conjunction { "|" conjunction }
//! conjunction := unary { "&" unary }
//! unary       := "!" unary | "(" formula ")" | atom
//! atom        := relname "(" term {"," term} ")" | term ("=" | "<") term
//! term        := product { "+" product }
//! product     := primary { "*" primary }
//! primary     := var | constname | funcname "(" term {"," term} ")" | "⟨" digits "⟩" | "(" term ")"
//! ```
//!
//! `+`, `*` and `<` are infix spellings of binary symbols with those names and
//! are only accepted when the signature declares them.

use super::{Formula, Signature, SymbolKind, SyntaxError, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Elem(usize),
    Forall,
    Exists,
    Dot,
    LParen,
    RParen,
    Comma,
    Eq,
    Lt,
    Arrow,
    Bar,
    Amp,
    Bang,
    Plus,
    Star,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Elem(k) => format!("element ⟨{k}⟩"),
        Tok::End => "end of input".to_string(),
        other => format!("{other:?}"),
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        let simple = match c {
            '.' => Some(Tok::Dot),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '=' => Some(Tok::Eq),
            '<' => Some(Tok::Lt),
            '|' => Some(Tok::Bar),
            '&' => Some(Tok::Amp),
            '!' => Some(Tok::Bang),
            '+' => Some(Tok::Plus),
            '*' => Some(Tok::Star),
            _ => None,
        };
        if let Some(tok) = simple {
            chars.next();
            out.push((tok, pos));
            continue;
        }
        if c == '-' {
            chars.next();
            match chars.next() {
                Some((_, '>')) => out.push((Tok::Arrow, pos)),
                _ => {
                    return Err(SyntaxError::Parse {
                        position: pos,
                        message: "expected `->`".into(),
                    })
                }
            }
            continue;
        }
        if c == '⟨' {
            chars.next();
            let mut digits = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if d.is_ascii_digit() {
                    digits.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            let closed = matches!(chars.next(), Some((_, '⟩')));
            let value = digits.parse::<usize>().ok().filter(|_| closed);
            match value {
                Some(k) => out.push((Tok::Elem(k), pos)),
                None => {
                    return Err(SyntaxError::Parse {
                        position: pos,
                        message: "malformed element literal".into(),
                    })
                }
            }
            continue;
        }
        if c.is_ascii_alphanumeric() || c == '_' {
            let mut ident = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    ident.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            // Digit-led names only denote declared constants such as `0`.
            let tok = match ident.as_str() {
                "forall" => Tok::Forall,
                "exists" => Tok::Exists,
                _ if c.is_ascii_digit() && !ident.bytes().all(|b| b.is_ascii_digit()) => {
                    return Err(SyntaxError::Parse {
                        position: pos,
                        message: format!("malformed identifier `{ident}`"),
                    })
                }
                _ => Tok::Ident(ident),
            };
            out.push((tok, pos));
            continue;
        }
        return Err(SyntaxError::Parse {
            position: pos,
            message: format!("unexpected character `{c}`"),
        });
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'s> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    sig: &'s Signature,
}

type PResult<T> = Result<T, SyntaxError>;

impl<'s> Parser<'s> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(SyntaxError::Parse {
            position: self.pos(),
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            let found = describe(self.peek());
            self.error(format!("expected {}, found {found}", describe(&tok)))
        }
    }

    fn formula(&mut self) -> PResult<Formula> {
        match self.peek() {
            Tok::Forall | Tok::Exists => {
                let universal = *self.peek() == Tok::Forall;
                self.bump();
                let var = match self.bump() {
                    Tok::Ident(v) if self.sig.lookup(&v).is_none() && !v.as_bytes()[0].is_ascii_digit() => v,
                    _ => {
                        self.at -= 1;
                        return self.error("expected a variable after quantifier");
                    }
                };
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(if universal {
                    Formula::forall(&var, body)
                } else {
                    Formula::exists(&var, body)
                })
            }
            _ => self.implication(),
        }
    }

    fn implication(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut acc = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            acc = Formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> PResult<Formula> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                // Either a parenthesized formula or an atom whose left term is
                // parenthesized; try the formula reading first.
                let save = self.at;
                self.bump();
                let grouped = self.formula().and_then(|f| {
                    self.expect(Tok::RParen)?;
                    Ok(f)
                });
                match grouped {
                    Ok(f) if !matches!(self.peek(), Tok::Eq | Tok::Lt | Tok::Plus | Tok::Star) => Ok(f),
                    first => {
                        self.at = save;
                        self.atom().map_err(|second| match first {
                            Err(e @ SyntaxError::Parse { .. }) => furthest(e, second),
                            Err(e) => e,
                            Ok(_) => second,
                        })
                    }
                }
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> PResult<Formula> {
        if let Tok::Ident(name) = self.peek().clone() {
            if let Some(SymbolKind::Relation(arity)) = self.sig.lookup(&name) {
                self.bump();
                let args = self.arguments()?;
                if args.len() != arity {
                    return Err(SyntaxError::ArityMismatch {
                        symbol: name,
                        expected: arity,
                        found: args.len(),
                    });
                }
                return Ok(Formula::Rel(name, args));
            }
        }
        let lhs = self.term()?;
        match self.peek() {
            Tok::Eq => {
                self.bump();
                Ok(Formula::Eq(lhs, self.term()?))
            }
            Tok::Lt => {
                match self.sig.relation_arity("<") {
                    Some(2) => {}
                    Some(found) => {
                        return Err(SyntaxError::ArityMismatch {
                            symbol: "<".into(),
                            expected: found,
                            found: 2,
                        })
                    }
                    None => return Err(SyntaxError::UnknownSymbol("<".into())),
                }
                self.bump();
                let rhs = self.term()?;
                Ok(Formula::Rel("<".into(), vec![lhs, rhs]))
            }
            other => {
                let found = describe(other);
                self.error(format!("expected `=` or `<` after term, found {found}"))
            }
        }
    }

    fn arguments(&mut self) -> PResult<Vec<Term>> {
        self.expect(Tok::LParen)?;
        let mut args = vec![self.term()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.term()?);
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn infix_symbol(&self, name: &str) -> PResult<()> {
        match self.sig.function_arity(name) {
            Some(2) => Ok(()),
            Some(found) => Err(SyntaxError::ArityMismatch {
                symbol: name.into(),
                expected: found,
                found: 2,
            }),
            None => Err(SyntaxError::UnknownSymbol(name.into())),
        }
    }

    fn term(&mut self) -> PResult<Term> {
        let mut acc = self.product()?;
        while *self.peek() == Tok::Plus {
            self.infix_symbol("+")?;
            self.bump();
            acc = Term::App("+".into(), vec![acc, self.product()?]);
        }
        Ok(acc)
    }

    fn product(&mut self) -> PResult<Term> {
        let mut acc = self.primary()?;
        while *self.peek() == Tok::Star {
            self.infix_symbol("*")?;
            self.bump();
            acc = Term::App("*".into(), vec![acc, self.primary()?]);
        }
        Ok(acc)
    }

    fn primary(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Elem(k) => {
                self.bump();
                Ok(Term::Elem(k))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(name) => match self.sig.lookup(&name) {
                None if name.as_bytes()[0].is_ascii_digit() => Err(SyntaxError::UnknownSymbol(name)),
                None => {
                    self.bump();
                    Ok(Term::Var(name))
                }
                Some(SymbolKind::Constant) => {
                    self.bump();
                    Ok(Term::Const(name))
                }
                Some(SymbolKind::Function(arity)) => {
                    self.bump();
                    let args = self.arguments()?;
                    if args.len() != arity {
                        return Err(SyntaxError::ArityMismatch {
                            symbol: name,
                            expected: arity,
                            found: args.len(),
                        });
                    }
                    Ok(Term::App(name, args))
                }
                Some(SymbolKind::Relation(_)) => {
                    self.error(format!("relation `{name}` used where a term is expected"))
                }
            },
            other => {
                let found = describe(&other);
                self.error(format!("expected a term, found {found}"))
            }
        }
    }
}

fn furthest(a: SyntaxError, b: SyntaxError) -> SyntaxError {
    match (&a, &b) {
        (SyntaxError::Parse { position: pa, .. }, SyntaxError::Parse { position: pb, .. }) => {
            if pb > pa {
                b
            } else {
                a
            }
        }
        (SyntaxError::Parse { .. }, _) => b,
        _ => a,
    }
}

/// Parses `text` into a formula over `sig`.
///
/// Identifiers not declared in the signature are variables. Element literals
/// `⟨k⟩` are accepted so that printed instantiated formulas read back.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, SyntaxError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, at: 0, sig };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        let found = describe(p.peek());
        return p.error(format!("unexpected {found} after formula"));
    }
    Ok(f)
}

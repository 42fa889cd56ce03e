//! Surface syntax for transport constraints.
//!
//! The accepted language (whitespace-insensitive):
//!
//! ```text
//! expr     := "x*y" [ "-" rhs ]
//! rhs      := "(" sum ")" | term
//! sum      := [ sign ] term { sign term }
//! sign     := "+" | "-"
//! term     := factor { "*" factor }
//! factor   := rational | "x" [ "^" nat ] | "y" | "y" "*" "(" sum ")"
//! rational := digits [ "/" digits ]
//! ```
//!
//! Subject to the shape rule: after folding rational factors into the
//! coefficient, every term must be `c`, `c*x^k`, or `c*y*x^k` — the family
//! `x*y − (φ(x) + y·ψ(x))`. A grouped `y*(p(x))` distributes `p` into ψ and
//! must end its term. Anything else (a `y` after an `x`, a second `y`, a
//! power of `y`) is rejected with a message naming the violated shape.
//!
//! Printing uses [`OmegaConstraint`]'s canonical form; `parse ∘ print` is
//! the identity on canonical forms (see the round-trip tests below).

use std::fmt;

use rbdiff_core::{OmegaConstraint, Scalar};

/// A syntax or shape error, with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

impl ParseError {
    fn new(position: usize, message: impl Into<String>) -> Self {
        ParseError { position, message: message.into() }
    }

    /// Renders the source with a caret under the offending byte.
    pub fn render(&self, src: &str) -> String {
        let caret = " ".repeat(self.position.min(src.len())) + "^";
        format!("{self}\n  {src}\n  {caret}")
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    X,
    Y,
    Num(Scalar),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::X => write!(f, "`x`"),
            Tok::Y => write!(f, "`y`"),
            Tok::Num(r) => write!(f, "`{r}`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'x' => {
                out.push((i, Tok::X));
                i += 1;
            }
            b'y' => {
                out.push((i, Tok::Y));
                i += 1;
            }
            b'+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            b'-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            b'*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            b'^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            b'(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            b')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let numer = &src[start..i];
                // A fraction binds tightly to the number: digits "/" digits.
                let mut j = i;
                while j < bytes.len() && (bytes[j] == b' ' || bytes[j] == b'\t') {
                    j += 1;
                }
                let text = if j < bytes.len() && bytes[j] == b'/' {
                    j += 1;
                    while j < bytes.len() && (bytes[j] == b' ' || bytes[j] == b'\t') {
                        j += 1;
                    }
                    let dstart = j;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    if dstart == j {
                        return Err(ParseError::new(j.min(src.len()), "expected digits after `/`"));
                    }
                    let denom = &src[dstart..j];
                    if denom.bytes().all(|b| b == b'0') {
                        return Err(ParseError::new(dstart, "zero denominator in rational"));
                    }
                    i = j;
                    format!("{numer}/{denom}")
                } else {
                    numer.to_string()
                };
                let value: Scalar = text
                    .parse()
                    .map_err(|_| ParseError::new(start, format!("invalid rational `{text}`")))?;
                out.push((start, Tok::Num(value)));
            }
            _ => {
                let ch = src[i..].chars().next().unwrap();
                return Err(ParseError::new(i, format!("unexpected character `{ch}`")));
            }
        }
    }
    Ok(out)
}

/// Sparse polynomial accumulator: coefficient at each x-degree.
#[derive(Default)]
struct Poly(Vec<Scalar>);

impl Poly {
    fn add(&mut self, deg: usize, c: Scalar) {
        if self.0.len() <= deg {
            self.0.resize(deg + 1, Scalar::zero());
        }
        self.0[deg] = &self.0[deg] + &c;
    }

    fn into_coeffs(self) -> Vec<Scalar> {
        self.0
    }
}

/// One parsed term in shape-checked form.
enum Term {
    /// `c * x^deg` — contributes to φ.
    Phi { deg: usize, coeff: Scalar },
    /// `c * y * x^deg` — contributes to ψ.
    Psi { deg: usize, coeff: Scalar },
    /// `c * y * (p(x))` — distributes `c·p` into ψ.
    PsiGroup { coeff: Scalar, poly: Vec<(usize, Scalar)> },
}

const SHAPE_HINT: &str =
    "terms must have the shape c, c*x^k, or c*y*x^k (the family x*y - (φ(x) + y*ψ(x)))";

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek_pos(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.src.len())
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<usize, ParseError> {
        match self.bump() {
            Some((p, t)) if t == want => Ok(p),
            Some((p, t)) => Err(ParseError::new(p, format!("expected {what}, found {t}"))),
            None => Err(ParseError::new(self.src.len(), format!("expected {what}, found end of input"))),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    /// `"x*y"` — the fixed left-hand side.
    fn expect_head(&mut self) -> Result<(), ParseError> {
        self.expect(Tok::X, "`x` (every constraint starts with `x*y`)")?;
        self.expect(Tok::Star, "`*` (every constraint starts with `x*y`)")?;
        self.expect(Tok::Y, "`y` (every constraint starts with `x*y`)")?;
        Ok(())
    }

    /// Exponent suffix: `^ nat`. Returns the degree (1 when absent).
    fn exponent(&mut self) -> Result<usize, ParseError> {
        if self.peek() != Some(&Tok::Caret) {
            return Ok(1);
        }
        self.bump();
        match self.bump() {
            Some((p, Tok::Num(r))) => r.to_string().parse::<usize>().map_err(|_| {
                ParseError::new(p, format!("expected a non-negative integer exponent, found `{r}`"))
            }),
            Some((p, t)) => {
                Err(ParseError::new(p, format!("expected a non-negative integer exponent, found {t}")))
            }
            None => Err(ParseError::new(self.src.len(), "expected an exponent after `^`")),
        }
    }

    /// `sum := [sign] term { sign term }`, stopping before `)` or end.
    /// `inside_group` restricts terms to pure x-terms (ψ coefficients).
    fn sum(&mut self, inside_group: bool) -> Result<Vec<(Scalar, Term)>, ParseError> {
        let mut terms = Vec::new();
        let mut sign = Scalar::one();
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            sign = -Scalar::one();
        } else if self.peek() == Some(&Tok::Plus) {
            self.bump();
        }
        loop {
            let term = self.term(inside_group)?;
            terms.push((sign.clone(), term));
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    sign = Scalar::one();
                }
                Some(Tok::Minus) => {
                    self.bump();
                    sign = -Scalar::one();
                }
                _ => return Ok(terms),
            }
        }
    }

    /// One term: factors joined by `*`, shape-checked.
    fn term(&mut self, inside_group: bool) -> Result<Term, ParseError> {
        let mut coeff = Scalar::one();
        let mut saw_factor = false;
        let mut x_deg = 0usize;
        let mut saw_x = false;
        let mut y_state: Option<usize> = None; // position of the y factor
        let mut group: Option<Vec<(usize, Scalar)>> = None;

        loop {
            let p = self.peek_pos();
            match self.peek() {
                Some(Tok::Num(_)) => {
                    let Some((_, Tok::Num(r))) = self.bump() else { unreachable!() };
                    coeff = &coeff * &r;
                }
                Some(Tok::X) => {
                    self.bump();
                    let k = self.exponent()?;
                    x_deg += k;
                    saw_x = true;
                }
                Some(Tok::Y) => {
                    if inside_group {
                        return Err(ParseError::new(
                            p,
                            "`y` inside `y*(...)` — ψ must be a polynomial in x alone",
                        ));
                    }
                    if y_state.is_some() {
                        return Err(ParseError::new(p, format!("second `y` in a term; {SHAPE_HINT}")));
                    }
                    if saw_x {
                        return Err(ParseError::new(
                            p,
                            format!("`y` after an `x` factor; {SHAPE_HINT}"),
                        ));
                    }
                    self.bump();
                    if self.peek() == Some(&Tok::Caret) {
                        return Err(ParseError::new(p, format!("`y` raised to a power; {SHAPE_HINT}")));
                    }
                    y_state = Some(p);
                }
                Some(Tok::LParen) => {
                    return Err(ParseError::new(
                        p,
                        "`(` may only open the whole right-hand side or follow `y*`",
                    ));
                }
                Some(t) => {
                    if !saw_factor {
                        return Err(ParseError::new(p, format!("expected a term, found {t}")));
                    }
                    break;
                }
                None => {
                    if !saw_factor {
                        return Err(ParseError::new(p, "expected a term, found end of input"));
                    }
                    break;
                }
            }
            saw_factor = true;
            // Factor separator: `*`, possibly introducing a `y*(...)` group.
            if self.peek() == Some(&Tok::Star) {
                self.bump();
                if self.peek() == Some(&Tok::LParen) {
                    let lp = self.peek_pos();
                    if y_state.is_none() || saw_x {
                        return Err(ParseError::new(
                            lp,
                            "a parenthesized factor is only allowed directly after `y*`",
                        ));
                    }
                    self.bump();
                    let inner = self.sum(true)?;
                    self.expect(Tok::RParen, "`)` closing the `y*(...)` group")?;
                    let mut poly = Vec::new();
                    for (s, t) in inner {
                        match t {
                            Term::Phi { deg, coeff: c } => poly.push((deg, &s * &c)),
                            _ => unreachable!("group terms are pure x-terms"),
                        }
                    }
                    group = Some(poly);
                    // A group closes its term.
                    match self.peek() {
                        Some(Tok::Star) | Some(Tok::X) | Some(Tok::Y) | Some(Tok::Num(_)) => {
                            return Err(ParseError::new(
                                self.peek_pos(),
                                "a `y*(...)` group must end its term",
                            ));
                        }
                        _ => break,
                    }
                }
            } else {
                // Juxtaposition without `*` is not part of the language.
                match self.peek() {
                    Some(Tok::X) | Some(Tok::Y) | Some(Tok::Num(_)) => {
                        return Err(ParseError::new(
                            self.peek_pos(),
                            "expected `*` between factors",
                        ));
                    }
                    _ => break,
                }
            }
        }

        if let Some(poly) = group {
            return Ok(Term::PsiGroup { coeff, poly });
        }
        if y_state.is_some() {
            Ok(Term::Psi { deg: x_deg, coeff })
        } else {
            Ok(Term::Phi { deg: x_deg, coeff })
        }
    }
}

/// Parses the surface syntax into a constraint.
pub fn parse_omega(src: &str) -> Result<OmegaConstraint, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, src };
    p.expect_head()?;
    if p.at_end() {
        return Ok(OmegaConstraint::xy());
    }
    match p.bump() {
        Some((_, Tok::Minus)) => {}
        Some((pos, Tok::Plus)) => {
            return Err(ParseError::new(
                pos,
                "constraints have the form `x*y - (φ(x) + y*ψ(x))`; only `-` may follow `x*y`",
            ));
        }
        Some((pos, t)) => {
            return Err(ParseError::new(pos, format!("expected `-` or end of input after `x*y`, found {t}")));
        }
        None => unreachable!(),
    }
    let terms = if p.peek() == Some(&Tok::LParen) {
        p.bump();
        let inner = p.sum(false)?;
        p.expect(Tok::RParen, "`)` closing the right-hand side")?;
        inner
    } else {
        // Unparenthesized: a single positive term, e.g. `x*y - 1` or `x*y - y*x`.
        vec![(Scalar::one(), p.term(false)?)]
    };
    if !p.at_end() {
        let (pos, t) = p.bump().unwrap();
        return Err(ParseError::new(pos, format!("expected end of input, found {t}")));
    }

    let mut phi = Poly::default();
    let mut psi = Poly::default();
    for (sign, term) in terms {
        match term {
            Term::Phi { deg, coeff } => phi.add(deg, &sign * &coeff),
            Term::Psi { deg, coeff } => psi.add(deg, &sign * &coeff),
            Term::PsiGroup { coeff, poly } => {
                let c = &sign * &coeff;
                for (deg, pc) in poly {
                    psi.add(deg, &c * &pc);
                }
            }
        }
    }
    Ok(OmegaConstraint::new(phi.into_coeffs(), psi.into_coeffs()))
}

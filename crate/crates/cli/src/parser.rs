//! Symbol mini-language.
//!
//! ```text
//! expression  := sign? term (('+' | '-') term)*
//! term        := coefficient? '*'? factor ('*'? factor)*  |  coefficient
//! factor      := ('zs' | 'z') modeIndex ('^' power)?
//! coefficient := decimal | '(' decimal ',' decimal ')'
//! ```
//!
//! Mode indices are one-based; `zs` is the starred variable. [`format_symbol`] prints
//! the canonical form, which parses back to the same symbol.

use bargmann_core::{Monomial, MultiIndex, PolySymbol};
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("mode index {index} at position {pos} exceeds the {modes} available modes")]
    Dimension {
        pos: usize,
        index: usize,
        modes: usize,
    },
}

impl ParseError {
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::Syntax { .. } => "E_PARSE",
            ParseError::Dimension { .. } => "E_DIMENSION",
        }
    }
}

/// Parsed symbol together with its source text.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolSpec {
    pub source: String,
    pub parsed: PolySymbol,
}

impl SymbolSpec {
    pub fn parse(source: &str, modes: usize) -> Result<Self, ParseError> {
        Ok(SymbolSpec {
            source: source.to_string(),
            parsed: parse_symbol(source, modes)?,
        })
    }

    /// Conjugate-invariant up to `1e-12` relative to the largest coefficient.
    pub fn is_real(&self) -> bool {
        let scale = self
            .parsed
            .terms()
            .map(|(_, c)| c.norm())
            .fold(1.0, f64::max);
        self.parsed.reality_defect() <= 1e-12 * scale
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, b: u8) -> Result<(), ParseError> {
        if self.eat(b) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", b as char))
        }
    }

    fn integer(&mut self) -> Result<(usize, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse()
            .map(|v| (v, start))
            .or_else(|_| self.err("integer out of range"))
    }

    /// Unsigned decimal with optional fraction and exponent, or a signed one inside pairs.
    fn decimal(&mut self, allow_sign: bool) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let at = |p: usize| self.src.get(p).copied();
        let mut p = self.pos;
        if allow_sign && matches!(at(p), Some(b'+' | b'-')) {
            p += 1;
        }
        let digits_start = p;
        while at(p).is_some_and(|b| b.is_ascii_digit()) {
            p += 1;
        }
        if at(p) == Some(b'.') {
            p += 1;
            while at(p).is_some_and(|b| b.is_ascii_digit()) {
                p += 1;
            }
        }
        if p == digits_start || (p == digits_start + 1 && at(digits_start) == Some(b'.')) {
            return self.err("expected a number");
        }
        if matches!(at(p), Some(b'e' | b'E')) {
            let mut q = p + 1;
            if matches!(at(q), Some(b'+' | b'-')) {
                q += 1;
            }
            let exp_digits = q;
            while at(q).is_some_and(|b| b.is_ascii_digit()) {
                q += 1;
            }
            if q > exp_digits {
                p = q;
            }
        }
        let text = std::str::from_utf8(&self.src[start..p]).expect("ascii number");
        self.pos = p;
        text.parse().or_else(|_| {
            self.pos = start;
            self.err(format!("malformed number '{text}'"))
        })
    }

    fn at_factor(&mut self) -> bool {
        self.peek() == Some(b'z')
    }

    fn at_coefficient(&mut self) -> bool {
        matches!(self.peek(), Some(b'0'..=b'9' | b'.' | b'('))
    }
}

/// Parse `text` as a symbol on `modes` modes.
pub fn parse_symbol(text: &str, modes: usize) -> Result<PolySymbol, ParseError> {
    if modes == 0 {
        return Err(ParseError::Dimension {
            pos: 0,
            index: 1,
            modes,
        });
    }
    let mut lx = Lexer {
        src: text.as_bytes(),
        pos: 0,
    };
    if lx.peek().is_none() {
        return lx.err("empty symbol");
    }
    let mut out = PolySymbol::zero(modes);
    let mut sign = if lx.eat(b'-') {
        -1.0
    } else {
        lx.eat(b'+');
        1.0
    };
    loop {
        let (m, c) = term(&mut lx, modes)?;
        out.add_term(m, c * sign);
        if lx.eat(b'+') {
            sign = 1.0;
        } else if lx.eat(b'-') {
            sign = -1.0;
        } else if lx.peek().is_none() {
            return Ok(out);
        } else {
            return lx.err("expected '+', '-' or end of input");
        }
    }
}

fn term(lx: &mut Lexer<'_>, modes: usize) -> Result<(Monomial, Complex64), ParseError> {
    let mut coeff = Complex64::new(1.0, 0.0);
    let has_coeff = lx.at_coefficient();
    if has_coeff {
        coeff = coefficient(lx)?;
        lx.eat(b'*');
    }
    let mut zs = MultiIndex::zeros(modes);
    let mut z = MultiIndex::zeros(modes);
    let mut factors = 0;
    while lx.at_factor() {
        factor(lx, modes, &mut zs, &mut z)?;
        factors += 1;
        if lx.eat(b'*') && !lx.at_factor() {
            return lx.err("expected a factor after '*'");
        }
    }
    if !has_coeff && factors == 0 {
        return lx.err("expected a coefficient or a factor");
    }
    Ok((Monomial::new(zs, z), coeff))
}

fn coefficient(lx: &mut Lexer<'_>) -> Result<Complex64, ParseError> {
    if lx.eat(b'(') {
        let re = lx.decimal(true)?;
        lx.expect(b',')?;
        let im = lx.decimal(true)?;
        lx.expect(b')')?;
        Ok(Complex64::new(re, im))
    } else {
        Ok(Complex64::new(lx.decimal(false)?, 0.0))
    }
}

fn factor(
    lx: &mut Lexer<'_>,
    modes: usize,
    zs: &mut MultiIndex,
    z: &mut MultiIndex,
) -> Result<(), ParseError> {
    lx.expect(b'z')?;
    // no whitespace inside the variable name
    let starred = lx.src.get(lx.pos) == Some(&b's');
    if starred {
        lx.pos += 1;
    }
    if !lx.src.get(lx.pos).is_some_and(|b| b.is_ascii_digit()) {
        return lx.err("expected a mode index");
    }
    let (index, pos) = lx.integer()?;
    if index == 0 {
        return Err(ParseError::Syntax {
            pos,
            msg: "mode indices start at 1".into(),
        });
    }
    if index > modes {
        return Err(ParseError::Dimension { pos, index, modes });
    }
    let power = if lx.eat(b'^') {
        let (p, ppos) = lx.integer()?;
        u32::try_from(p).map_err(|_| ParseError::Syntax {
            pos: ppos,
            msg: "power out of range".into(),
        })?
    } else {
        1
    };
    let target = if starred { zs } else { z };
    let i = index - 1;
    let cur = target.get(i);
    let next = cur.checked_add(power).ok_or(ParseError::Syntax {
        pos,
        msg: "power out of range".into(),
    })?;
    *target = target.with_entry(i, next);
    Ok(())
}

fn push_factors(out: &mut String, name: &str, exps: &MultiIndex) {
    for (i, &k) in exps.entries().iter().enumerate() {
        if k == 0 {
            continue;
        }
        if !out.is_empty() && !out.ends_with(' ') {
            out.push(' ');
        }
        out.push_str(&format!("{name}{}", i + 1));
        if k > 1 {
            out.push_str(&format!("^{k}"));
        }
    }
}

/// Canonical text: terms in symbol order, real coefficients as signed decimals,
/// complex ones as `(re,im)`, unit coefficients omitted.
pub fn format_symbol(p: &PolySymbol) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, (m, c)) in p.terms().enumerate() {
        let mut body = String::new();
        let negative = c.im == 0.0 && c.re.is_sign_negative();
        let mag = if negative { -c.re } else { c.re };
        let is_const = m.degree() == 0;
        if c.im != 0.0 {
            body.push_str(&format!("({},{})", c.re, c.im));
        } else if mag != 1.0 || is_const {
            body.push_str(&format!("{mag}"));
        }
        push_factors(&mut body, "zs", &m.zs);
        push_factors(&mut body, "z", &m.z);
        match (k, negative) {
            (0, false) => {}
            (0, true) => out.push_str("- "),
            (_, false) => out.push_str(" + "),
            (_, true) => out.push_str(" - "),
        }
        out.push_str(&body);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn number_symbol() {
        assert_eq!(parse_symbol("zs1 z1", 1).unwrap(), PolySymbol::number(1));
    }

    #[test]
    fn quartic_symbol() {
        let p = parse_symbol("zs1 z1 + 0.1 zs1^2 z1^2", 1).unwrap();
        let want = PolySymbol::number(1)
            .add(&PolySymbol::single_mode(1, 0, 2, 2).scale(c(0.1)))
            .unwrap();
        assert_eq!(p, want);
    }

    #[test]
    fn hopping_symbol_is_real() {
        let s = SymbolSpec::parse("zs1 z2 + zs2 z1", 2).unwrap();
        assert!(s.is_real());
        assert!(!SymbolSpec::parse("zs1 z2", 2).unwrap().is_real());
    }

    #[test]
    fn coefficients_and_signs() {
        let p = parse_symbol("-(0.5,-2)*zs1 - 3 + 1e-2 z1", 1).unwrap();
        assert_eq!(p.constant_term(), c(-3.0));
        let zs = Monomial::new(vec![1].into(), vec![0].into());
        assert_eq!(p.coefficient(&zs), Complex64::new(-0.5, 2.0));
        let z = Monomial::new(vec![0].into(), vec![1].into());
        assert_eq!(p.coefficient(&z), c(0.01));
    }

    #[test]
    fn repeated_factors_accumulate() {
        let p = parse_symbol("zs1 zs1 z1*z1", 1).unwrap();
        assert_eq!(p, PolySymbol::single_mode(1, 0, 2, 2));
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_symbol("zs1 + ", 1).unwrap_err(),
            ParseError::Syntax {
                pos: 6,
                msg: "expected a coefficient or a factor".into()
            }
        );
        match parse_symbol("zs1 z3", 2).unwrap_err() {
            ParseError::Dimension { pos, index, modes } => {
                assert_eq!((pos, index, modes), (5, 3, 2))
            }
            e => panic!("{e:?}"),
        }
        assert_eq!(parse_symbol("z0", 2).unwrap_err().code(), "E_PARSE");
        assert_eq!(parse_symbol("", 1).unwrap_err().code(), "E_PARSE");
        assert_eq!(parse_symbol("zs1 % z1", 1).unwrap_err().code(), "E_PARSE");
        assert_eq!(parse_symbol("zs 1", 1).unwrap_err().code(), "E_PARSE");
    }

    #[test]
    fn canonical_printing() {
        let p = parse_symbol("0.1 zs1^2 z1^2 + zs1 z1 - 0.5", 1).unwrap();
        assert_eq!(format_symbol(&p), "- 0.5 + zs1 z1 + 0.1 zs1^2 z1^2");
        assert_eq!(format_symbol(&PolySymbol::zero(2)), "0");
        let q = parse_symbol("(0,1) zs1 z2 - z1", 2).unwrap();
        assert_eq!(parse_symbol(&format_symbol(&q), 2).unwrap(), q);
    }
}

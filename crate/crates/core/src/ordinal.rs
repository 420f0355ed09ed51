//! Ordinals below epsilon-zero in Cantor normal form.
//!
//! An [`Ordinal`] is a finite list of terms `w^e * c` with strictly decreasing
//! exponents and positive coefficients; the empty list is zero. Exponents are
//! themselves ordinals, so nesting is finite by construction.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrdinalError {
    #[error("ordinal {0} is not a limit of cofinality omega")]
    NotOmegaLimit(Ordinal),
    #[error("negative difference: {gamma} > {alpha}")]
    NegativeDifference { gamma: Ordinal, alpha: Ordinal },
    #[error("cannot parse ordinal {text:?}: {reason}")]
    Parse { text: String, reason: String },
}

/// One Cantor-normal-form term `w^exp * coef`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub exp: Ordinal,
    pub coef: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Ordinal {
    terms: Vec<Term>,
}

/// Cofinality class of an ordinal at desk scale.
///
/// `DesignatedBig` stands in for cofinality omega-2 and is only ever assigned
/// through membership in a universe's designated set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CofClass {
    Zero,
    Successor,
    LimOmega,
    DesignatedBig,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn nat(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Ordinal { terms: vec![Term { exp: Self::zero(), coef: n }] }
        }
    }

    pub fn one() -> Self {
        Self::nat(1)
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::one())
    }

    /// `w^e`.
    pub fn omega_pow(e: Ordinal) -> Self {
        Ordinal { terms: vec![Term { exp: e, coef: 1 }] }
    }

    /// `w^e * c`, zero when `c == 0`.
    pub fn monomial(e: Ordinal, c: u64) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            Ordinal { terms: vec![Term { exp: e, coef: c }] }
        }
    }

    /// Builds an ordinal from terms, checking the normal-form invariant.
    pub fn from_terms(terms: Vec<Term>) -> Option<Self> {
        if terms.iter().any(|t| t.coef == 0) {
            return None;
        }
        if terms.windows(2).any(|w| w[0].exp <= w[1].exp) {
            return None;
        }
        Some(Ordinal { terms })
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_successor(&self) -> bool {
        self.terms.last().is_some_and(|t| t.exp.is_zero())
    }

    pub fn is_limit(&self) -> bool {
        self.terms.last().is_some_and(|t| !t.exp.is_zero())
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(|t| t.exp.is_zero())
    }

    /// The natural-number value, when finite.
    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [t] if t.exp.is_zero() => Some(t.coef),
            _ => None,
        }
    }

    /// Structural class ignoring any designated set.
    pub fn structural_class(&self) -> CofClass {
        if self.is_zero() {
            CofClass::Zero
        } else if self.is_successor() {
            CofClass::Successor
        } else {
            CofClass::LimOmega
        }
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::one())
    }

    pub fn plus_nat(&self, n: u64) -> Ordinal {
        self.add(&Ordinal::nat(n))
    }

    /// Immediate predecessor of a successor ordinal.
    pub fn pred(&self) -> Option<Ordinal> {
        if !self.is_successor() {
            return None;
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().expect("successor has a term");
        if last.coef == 1 {
            terms.pop();
        } else {
            last.coef -= 1;
        }
        Some(Ordinal { terms })
    }

    /// The greatest limit ordinal (or zero) not exceeding `self`: drops the finite tail.
    pub fn limit_part(&self) -> Ordinal {
        let mut terms = self.terms.clone();
        if terms.last().is_some_and(|t| t.exp.is_zero()) {
            terms.pop();
        }
        Ordinal { terms }
    }

    /// The finite tail `n` with `self = limit_part + n`.
    pub fn finite_part(&self) -> u64 {
        match self.terms.last() {
            Some(t) if t.exp.is_zero() => t.coef,
            _ => 0,
        }
    }

    /// Standard ordinal sum.
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some(lead) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> = Vec::with_capacity(self.terms.len() + other.terms.len());
        for t in &self.terms {
            match t.exp.cmp(&lead.exp) {
                Ordering::Greater => terms.push(t.clone()),
                Ordering::Equal => {
                    terms.push(Term { exp: t.exp.clone(), coef: t.coef + lead.coef });
                    terms.extend(other.terms[1..].iter().cloned());
                    return Ordinal { terms };
                }
                Ordering::Less => break,
            }
        }
        terms.extend(other.terms.iter().cloned());
        Ordinal { terms }
    }

    /// Order type of `[gamma, self)`, i.e. the unique `xi` with `gamma + xi = self`.
    pub fn ot_diff(gamma: &Ordinal, alpha: &Ordinal) -> Result<Ordinal, OrdinalError> {
        if gamma > alpha {
            return Err(OrdinalError::NegativeDifference { gamma: gamma.clone(), alpha: alpha.clone() });
        }
        let a = &alpha.terms;
        let g = &gamma.terms;
        let mut i = 0;
        while i < g.len() && i < a.len() && g[i] == a[i] {
            i += 1;
        }
        if i == g.len() {
            return Ok(Ordinal { terms: a[i..].to_vec() });
        }
        // gamma < alpha, so alpha's term at i dominates gamma's
        let (at, gt) = (&a[i], &g[i]);
        if at.exp == gt.exp {
            let mut terms = vec![Term { exp: at.exp.clone(), coef: at.coef - gt.coef }];
            terms.extend(a[i + 1..].iter().cloned());
            Ok(Ordinal { terms })
        } else {
            Ok(Ordinal { terms: a[i..].to_vec() })
        }
    }

    /// Canonical fundamental sequence of a limit ordinal.
    ///
    /// The last term `w^e * c` is replaced by `w^e * (c-1) + x_n` where
    /// `x_n = w^(e-1) * n` for successor `e` and `x_n = w^(e[n])` for limit `e`.
    pub fn fundamental(&self, n: u64) -> Result<Ordinal, OrdinalError> {
        if !self.is_limit() {
            return Err(OrdinalError::NotOmegaLimit(self.clone()));
        }
        let mut terms = self.terms.clone();
        let last = terms.pop().expect("limit has a term");
        let head = {
            let mut h = terms;
            if last.coef > 1 {
                h.push(Term { exp: last.exp.clone(), coef: last.coef - 1 });
            }
            Ordinal { terms: h }
        };
        let step = if last.exp.is_successor() {
            Ordinal::monomial(last.exp.pred().expect("successor"), n)
        } else {
            Ordinal::omega_pow(last.exp.fundamental(n)?)
        };
        Ok(head.add(&step))
    }

    /// Least `n` with `fundamental(n) > below`.
    pub fn fundamental_index_above(&self, below: &Ordinal) -> Result<u64, OrdinalError> {
        let mut n = 0;
        loop {
            if &self.fundamental(n)? > below {
                return Ok(n);
            }
            n += 1;
        }
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.exp.cmp(&other.exp).then(self.coef.cmp(&other.coef))
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(other.terms.iter()) {
            match a.cmp(b) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::nat(n)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if t.exp.is_zero() {
                write!(f, "{}", t.coef)?;
                continue;
            }
            write!(f, "w")?;
            if t.exp != Ordinal::one() {
                match t.exp.as_nat() {
                    Some(n) => write!(f, "^{n}")?,
                    None if t.exp == Ordinal::omega() => write!(f, "^w")?,
                    None => write!(f, "^({})", t.exp)?,
                }
            }
            if t.coef != 1 {
                write!(f, "*{}", t.coef)?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<u64, String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(format!("expected a number at byte {start}"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|e| format!("{e}"))
    }

    fn sum(&mut self) -> Result<Ordinal, String> {
        let mut acc = self.term()?;
        while self.eat(b'+') {
            let t = self.term()?;
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Ordinal, String> {
        match self.peek() {
            Some(b'w') => {
                self.pos += 1;
                let exp = if self.eat(b'^') { self.exponent()? } else { Ordinal::one() };
                let coef = if self.eat(b'*') { self.number()? } else { 1 };
                Ok(Ordinal::monomial(exp, coef))
            }
            Some(b'(') => {
                self.pos += 1;
                let o = self.sum()?;
                if !self.eat(b')') {
                    return Err("expected ')'".into());
                }
                Ok(o)
            }
            Some(c) if c.is_ascii_digit() => Ok(Ordinal::nat(self.number()?)),
            other => Err(format!("unexpected {:?} at byte {}", other.map(char::from), self.pos)),
        }
    }

    fn exponent(&mut self) -> Result<Ordinal, String> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let o = self.sum()?;
                if !self.eat(b')') {
                    return Err("expected ')'".into());
                }
                Ok(o)
            }
            Some(b'w') => {
                self.pos += 1;
                Ok(Ordinal::omega())
            }
            _ => Ok(Ordinal::nat(self.number()?)),
        }
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let normalized = s.replace('ω', "w").replace('·', "*");
        let mut p = Parser { src: normalized.as_bytes(), pos: 0 };
        let err = |reason: String| OrdinalError::Parse { text: s.to_string(), reason };
        let o = p.sum().map_err(err)?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(err(format!("trailing input at byte {}", p.pos)));
        }
        Ok(o)
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses an ordinal literal, panicking on bad input. Intended for tests and fixtures.
pub fn ord(s: &str) -> Ordinal {
    s.parse().unwrap_or_else(|e| panic!("{e}"))
}

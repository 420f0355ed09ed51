//! Points of the block universe `Y` and the projections `pi`, `pi_-`, `pi_B`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ordinal::{Ordinal, OrdinalError};
use crate::universe::{SplitResult, UniverseSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PointError {
    #[error("cannot parse point {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("point {0} is not in Y: {1}")]
    NotInY(String, String),
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
}

/// Second coordinate of a point.
///
/// `Nat(n)` is `n < w` (the unit block), `Block` is `w*zeta + n` at `gamma_alpha`,
/// and `Top` is the symbolic `lambda + zeta` at `gamma_alpha + 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Eta {
    Nat(u32),
    Block { alpha: Ordinal, zeta: u32, n: u32 },
    Top { alpha: Ordinal, zeta: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BlockId {
    Unit,
    Pair { alpha: Ordinal, zeta: u32 },
}

impl fmt::Display for BlockId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockId::Unit => write!(f, "1"),
            BlockId::Pair { alpha, zeta } => write!(f, "<{alpha}, {zeta}>"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Point {
    pub pi: Ordinal,
    pub eta: Eta,
}

impl Point {
    pub fn unit(pi: Ordinal, n: u32) -> Self {
        Point { pi, eta: Eta::Nat(n) }
    }

    pub fn block(s: &SplitResult, alpha: &Ordinal, zeta: u32, n: u32) -> Self {
        Point { pi: s.gamma_of[alpha].clone(), eta: Eta::Block { alpha: alpha.clone(), zeta, n } }
    }

    pub fn top(s: &SplitResult, alpha: &Ordinal, zeta: u32) -> Self {
        Point { pi: s.gamma_of[alpha].succ(), eta: Eta::Top { alpha: alpha.clone(), zeta } }
    }

    pub fn block_id(&self) -> BlockId {
        match &self.eta {
            Eta::Nat(_) => BlockId::Unit,
            Eta::Block { alpha, zeta, .. } | Eta::Top { alpha, zeta } => BlockId::Pair { alpha: alpha.clone(), zeta: *zeta },
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self.eta, Eta::Nat(_))
    }

    /// Member of some big block.
    pub fn in_u(&self) -> bool {
        !self.is_unit()
    }

    /// Big-block point with `pi = pi_-`.
    pub fn in_u1(&self) -> bool {
        matches!(self.eta, Eta::Block { .. })
    }

    /// Block top, the only points with `pi != pi_-`.
    pub fn in_u2(&self) -> bool {
        matches!(self.eta, Eta::Top { .. })
    }

    /// `pi_-`: `pi` on the unit block and `gamma_alpha` on block `<alpha, zeta>`.
    pub fn pi_minus(&self) -> Ordinal {
        match &self.eta {
            Eta::Top { .. } => self.pi.pred().expect("top sits at a successor"),
            _ => self.pi.clone(),
        }
    }

    /// The big point `alpha` owning this point's block, if any.
    pub fn owner(&self) -> Option<&Ordinal> {
        match &self.eta {
            Eta::Nat(_) => None,
            Eta::Block { alpha, .. } | Eta::Top { alpha, .. } => Some(alpha),
        }
    }

    /// Membership in `Y` for the given universe and split.
    pub fn check_in_y(&self, u: &UniverseSpec, s: &SplitResult) -> Result<(), PointError> {
        let bad = |why: &str| Err(PointError::NotInY(self.to_string(), why.to_string()));
        if self.pi >= u.delta {
            return bad("first coordinate is not below delta");
        }
        match &self.eta {
            Eta::Nat(_) => Ok(()),
            Eta::Block { alpha, zeta, .. } | Eta::Top { alpha, zeta } => {
                if !s.l_tilde.contains(alpha) {
                    return bad("block owner has no proper gamma");
                }
                if *zeta == 0 || *zeta >= u.lambda {
                    return bad("block index outside (0, lambda)");
                }
                let g = &s.gamma_of[alpha];
                let want = if self.in_u2() { g.succ() } else { g.clone() };
                if self.pi != want {
                    return bad("first coordinate does not match the block");
                }
                Ok(())
            }
        }
    }

    /// Parses the display form, resolving block owners through the split.
    pub fn parse_with(text: &str, s: &SplitResult) -> Result<Point, PointError> {
        let err = |reason: &str| PointError::Parse { text: text.to_string(), reason: reason.to_string() };
        let inner = text
            .trim()
            .strip_prefix('<')
            .and_then(|x| x.strip_suffix('>'))
            .ok_or_else(|| err("expected <pi, eta>"))?;
        let (pi, eta) = inner.rsplit_once(',').ok_or_else(|| err("expected a comma"))?;
        let pi: Ordinal = pi.trim().parse()?;
        let eta = eta.trim();
        if let Some(z) = eta.strip_prefix("L+") {
            let zeta: u32 = z.trim().parse().map_err(|_| err("bad block index after L+"))?;
            let g = pi.pred().ok_or_else(|| err("a top point sits at a successor"))?;
            let alpha = s.owner_of_gamma(&g).ok_or_else(|| err("no block owner for this gamma"))?.clone();
            return Ok(Point { pi, eta: Eta::Top { alpha, zeta } });
        }
        let e: Ordinal = eta.parse()?;
        if let Some(n) = e.as_nat() {
            let n = u32::try_from(n).map_err(|_| err("index too large"))?;
            return Ok(Point::unit(pi, n));
        }
        // w*zeta + n
        let t = e.terms();
        let ok_shape = t.first().is_some_and(|x| x.exp == Ordinal::one()) && t.len() <= 2;
        if !ok_shape {
            return Err(err("second coordinate must be n, w*z + n or L+z"));
        }
        let zeta = u32::try_from(t[0].coef).map_err(|_| err("index too large"))?;
        let n = u32::try_from(e.finite_part()).map_err(|_| err("index too large"))?;
        let alpha = s.owner_of_gamma(&pi).ok_or_else(|| err("no block owner at this first coordinate"))?.clone();
        Ok(Point { pi, eta: Eta::Block { alpha, zeta, n } })
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.eta {
            Eta::Nat(n) => write!(f, "<{}, {n}>", self.pi),
            Eta::Block { zeta, n, .. } => {
                let e = Ordinal::monomial(Ordinal::one(), u64::from(*zeta)).plus_nat(u64::from(*n));
                write!(f, "<{}, {e}>", self.pi)
            }
            Eta::Top { zeta, .. } => write!(f, "<{}, L+{zeta}>", self.pi),
        }
    }
}

/// Points without blocks parse standalone.
impl FromStr for Point {
    type Err = PointError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let empty = SplitResult {
            f0_big: Default::default(),
            f1_big: Default::default(),
            gamma_of: Default::default(),
            l_tilde: Default::default(),
        };
        Point::parse_with(s, &empty)
    }
}

//! Shared domain types: scaled coordinates, regime labels, expansion results.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Left boundary of the oscillatory zone in the self-similar variable,
/// s = -2*sqrt(3).
pub const S_LEFT: f64 = -3.464101615137754587;

/// Right boundary of the oscillatory zone, s = 2*sqrt(15)/27.
pub const S_RIGHT: f64 = 0.2868876552746234730;

/// Default half-width (in s) of the critical bands around the two edges.
pub const DEFAULT_EDGE_WIDTH: f64 = 0.05;

/// Which side of a branch cut a boundary value is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CutSide {
    /// Limit from the upper half-plane.
    Plus,
    /// Limit from the lower half-plane.
    Minus,
}

/// A point of the (x, t) plane together with the self-similar coordinate
/// s = x * |t|^(-3/2) that selects the asymptotic regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalePoint {
    pub x: f64,
    pub t: f64,
    pub s: f64,
}

impl ScalePoint {
    /// Builds a point from physical coordinates (x, t), t != 0.
    pub fn from_xt(x: f64, t: f64) -> Result<Self> {
        if t == 0.0 || !t.is_finite() || !x.is_finite() {
            return Err(Error::Domain(format!(
                "scale point requires finite x and t != 0, got x={x}, t={t}"
            )));
        }
        Ok(Self {
            x,
            t,
            s: x * t.abs().powf(-1.5),
        })
    }

    /// Builds a point from the scaled coordinate s and t, x = s * |t|^(3/2).
    pub fn from_st(s: f64, t: f64) -> Result<Self> {
        if t == 0.0 || !t.is_finite() || !s.is_finite() {
            return Err(Error::Domain(format!(
                "scale point requires finite s and t != 0, got s={s}, t={t}"
            )));
        }
        Ok(Self {
            x: s * t.abs().powf(1.5),
            t,
            s,
        })
    }

    /// Checks mutual consistency of (x, t, s) to 1e-12 relative.
    pub fn is_consistent(&self) -> bool {
        let x_implied = self.s * self.t.abs().powf(1.5);
        (self.x - x_implied).abs() <= 1e-12 * self.x.abs().max(x_implied.abs()).max(1.0)
    }
}

/// Asymptotic regime of a scale point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeLabel {
    /// t < 0, any s: algebraic expansion.
    AlgebraicNegT,
    /// t > 0 with s outside the oscillatory interval and its edge bands.
    AlgebraicPosT,
    /// t > 0 with s strictly inside (-2*sqrt(3), 2*sqrt(15)/27).
    Elliptic,
    /// t > 0 with s in the band around the left edge -2*sqrt(3).
    EdgePII,
    /// t > 0 with s in the band around the right edge 2*sqrt(15)/27.
    EdgeSoliton,
}

impl RegimeLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeLabel::AlgebraicNegT => "algebraic-neg-t",
            RegimeLabel::AlgebraicPosT => "algebraic-pos-t",
            RegimeLabel::Elliptic => "elliptic",
            RegimeLabel::EdgePII => "edge-pii",
            RegimeLabel::EdgeSoliton => "edge-soliton",
        }
    }
}

impl std::fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Symbolic order of the error term attached to an asymptotic evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorOrder {
    /// O(|t|^-1), algebraic regime.
    InverseT,
    /// O(t^-1/2), elliptic regime.
    InverseSqrtT,
    /// O(t^-2/3), Painleve-II edge.
    TwoThirds,
    /// O(t^-5/4 ln^2 t), soliton edge.
    SolitonEdge,
}

impl ErrorOrder {
    pub fn as_str(&self) -> &'static str {
        match self {
            ErrorOrder::InverseT => "O(|t|^-1)",
            ErrorOrder::InverseSqrtT => "O(t^-1/2)",
            ErrorOrder::TwoThirds => "O(t^-2/3)",
            ErrorOrder::SolitonEdge => "O(t^-5/4 ln^2 t)",
        }
    }
}

impl std::fmt::Display for ErrorOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Leading term plus correction of an asymptotic evaluation of y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionResult {
    pub leading: f64,
    pub correction: f64,
    pub value: f64,
    pub error_order: ErrorOrder,
    pub regime: RegimeLabel,
}

impl ExpansionResult {
    pub fn new(leading: f64, correction: f64, error_order: ErrorOrder, regime: RegimeLabel) -> Self {
        Self {
            leading,
            correction,
            value: leading + correction,
            error_order,
            regime,
        }
    }
}

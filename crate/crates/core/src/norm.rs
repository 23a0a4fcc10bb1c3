//! Vector norms on the decision space and their duals.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// One of the three polyhedral/Euclidean norms supported on `R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum NormKind {
    L1,
    #[default]
    L2,
    LInf,
}

impl NormKind {
    pub const ALL: [NormKind; 3] = [NormKind::L1, NormKind::L2, NormKind::LInf];

    /// The dual norm `‖u‖_* = max_{‖x‖≤1} |u'x|`.
    pub fn dual(self) -> NormKind {
        match self {
            NormKind::L1 => NormKind::LInf,
            NormKind::L2 => NormKind::L2,
            NormKind::LInf => NormKind::L1,
        }
    }

    pub fn norm(self, v: &[f64]) -> f64 {
        match self {
            NormKind::L1 => v.iter().map(|x| x.abs()).sum(),
            NormKind::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            NormKind::LInf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    pub fn dual_norm(self, v: &[f64]) -> f64 {
        self.dual().norm(v)
    }

    pub fn distance(self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        let diffs = x.iter().zip(y).map(|(a, b)| (a - b).abs());
        match self {
            NormKind::L1 => diffs.sum(),
            NormKind::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            NormKind::LInf => diffs.fold(0.0, f64::max),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::L1 => "l1",
            NormKind::L2 => "l2",
            NormKind::LInf => "linf",
        }
    }
}

impl fmt::Display for NormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(NormKind::L1),
            "l2" => Ok(NormKind::L2),
            "linf" => Ok(NormKind::LInf),
            other => Err(Error::InvalidSystem(format!("unknown norm `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_pairing_is_involutive() {
        assert_eq!(NormKind::L1.dual(), NormKind::LInf);
        assert_eq!(NormKind::L2.dual(), NormKind::L2);
        assert_eq!(NormKind::LInf.dual(), NormKind::L1);
        for k in NormKind::ALL {
            assert_eq!(k.dual().dual(), k);
        }
    }

    #[test]
    fn norm_values() {
        let v = [3.0, -4.0];
        assert_eq!(NormKind::L1.norm(&v), 7.0);
        assert_eq!(NormKind::L2.norm(&v), 5.0);
        assert_eq!(NormKind::LInf.norm(&v), 4.0);
    }

    #[test]
    fn dual_norm_is_the_support_of_the_unit_ball() {
        // ‖u‖_* = max over the vertices of the unit ball for polyhedral norms.
        let u = [0.3, -1.7, 0.4];
        let l1_vertices: Vec<[f64; 3]> = (0..3)
            .flat_map(|i| {
                [1.0, -1.0].map(|s| {
                    let mut e = [0.0; 3];
                    e[i] = s;
                    e
                })
            })
            .collect();
        let support = l1_vertices
            .iter()
            .map(|e| e.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::MIN, f64::max);
        assert!((NormKind::L1.dual_norm(&u) - support).abs() < 1e-15);

        let mut best = f64::MIN;
        for mask in 0..8u32 {
            let x: Vec<f64> = (0..3).map(|i| if mask & (1 << i) != 0 { 1.0 } else { -1.0 }).collect();
            best = best.max(x.iter().zip(&u).map(|(a, b)| a * b).sum());
        }
        assert!((NormKind::LInf.dual_norm(&u) - best).abs() < 1e-15);
    }

    #[test]
    fn parse_round_trip() {
        for k in NormKind::ALL {
            assert_eq!(k.as_str().parse::<NormKind>().unwrap(), k);
        }
        assert!("l3".parse::<NormKind>().is_err());
    }
}

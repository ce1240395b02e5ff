//! Number and kind of special Killing spinors needed per signature and normal type.

use serde::Serialize;

use crate::clifford::Epsilon;
use crate::error::{Error, Result};

/// Real (`epsilon = 1`) or imaginary (`epsilon = i`) special Killing spinor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpinorKind {
    #[serde(rename = "RSK")]
    Rsk,
    #[serde(rename = "ISK")]
    Isk,
}

impl std::fmt::Display for SpinorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SpinorKind::Rsk => "RSK",
            SpinorKind::Isk => "ISK",
        })
    }
}

/// Spinors required to characterize an immersion of a `(p,q)` surface.
pub fn spinor_count(p: usize, q: usize, epsilon: Epsilon) -> Result<(usize, SpinorKind)> {
    let kind = match epsilon {
        Epsilon::Spacelike => SpinorKind::Rsk,
        Epsilon::Timelike => SpinorKind::Isk,
    };
    let count = match ((p, q), epsilon) {
        ((2, 0), Epsilon::Spacelike) | ((0, 2), Epsilon::Timelike) => 1,
        ((2, 0), Epsilon::Timelike) | ((0, 2), Epsilon::Spacelike) | ((1, 1), _) => 2,
        _ => {
            return Err(Error::InvalidSignature {
                p,
                q,
                reason: "surface signature must be (2,0), (1,1) or (0,2)".into(),
            })
        }
    };
    Ok((count, kind))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_six_entries() {
        use Epsilon::*;
        use SpinorKind::*;
        let table = [
            ((2, 0), Spacelike, (1, Rsk)),
            ((2, 0), Timelike, (2, Isk)),
            ((1, 1), Spacelike, (2, Rsk)),
            ((1, 1), Timelike, (2, Isk)),
            ((0, 2), Spacelike, (2, Rsk)),
            ((0, 2), Timelike, (1, Isk)),
        ];
        for ((p, q), e, want) in table {
            assert_eq!(spinor_count(p, q, e).unwrap(), want);
        }
        assert!(spinor_count(3, 0, Spacelike).is_err());
    }
}

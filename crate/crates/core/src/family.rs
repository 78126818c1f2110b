//! Subsystem families and their admissible transition graphs.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numkit::Mat;

/// Matrices with `|det A| ≤ FULL_RANK_TOL` are rejected.
pub const FULL_RANK_TOL: f64 = 1e-12;

/// 1-based subsystem index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModeId(pub usize);

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Ordered pair `(p, q)`: a switch from subsystem `p` to subsystem `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(ModeId, ModeId)", into = "(ModeId, ModeId)")]
pub struct Edge {
    pub from: ModeId,
    pub to: ModeId,
}

impl Edge {
    pub fn new(from: usize, to: usize) -> Self {
        Edge { from: ModeId(from), to: ModeId(to) }
    }
}

impl From<(ModeId, ModeId)> for Edge {
    fn from((from, to): (ModeId, ModeId)) -> Self {
        Edge { from, to }
    }
}

impl From<Edge> for (ModeId, ModeId) {
    fn from(e: Edge) -> Self {
        (e.from, e.to)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.from, self.to)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("family has no subsystems")]
    Empty,
    #[error("subsystem ids must be 1..={expected} without gaps, found {found}")]
    BadIds { expected: usize, found: String },
    #[error("subsystem {id} is {rows}x{cols}, expected {d}x{d}")]
    Dimension { id: ModeId, rows: usize, cols: usize, d: usize },
    #[error("subsystem {0} is not full rank")]
    RankDeficient(ModeId),
    #[error("edge {0} references an unknown subsystem")]
    UnknownEdgeMode(Edge),
    #[error("edge {0} is a self-loop")]
    SelfLoop(Edge),
}

/// The matrices `A_1..A_N` of a switched linear system together with the
/// admissible transition set.
#[derive(Clone, Debug, PartialEq)]
pub struct SubsystemFamily {
    dim: usize,
    matrices: Vec<Mat>,
    edges: BTreeSet<Edge>,
}

impl SubsystemFamily {
    pub fn new(
        subsystems: impl IntoIterator<Item = (ModeId, Mat)>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, FamilyError> {
        let mut subsystems: Vec<(ModeId, Mat)> = subsystems.into_iter().collect();
        subsystems.sort_by_key(|(id, _)| *id);
        let Some((_, first)) = subsystems.first() else {
            return Err(FamilyError::Empty);
        };
        let dim = first.rows();
        let ids: Vec<usize> = subsystems.iter().map(|(id, _)| id.0).collect();
        if ids.iter().enumerate().any(|(i, &id)| id != i + 1) {
            return Err(FamilyError::BadIds { expected: ids.len(), found: format!("{ids:?}") });
        }
        for (id, a) in &subsystems {
            if a.rows() != dim || a.cols() != dim {
                return Err(FamilyError::Dimension { id: *id, rows: a.rows(), cols: a.cols(), d: dim });
            }
            if a.det().abs() <= FULL_RANK_TOL {
                return Err(FamilyError::RankDeficient(*id));
            }
        }
        let n = subsystems.len();
        let edges: BTreeSet<Edge> = edges.into_iter().collect();
        for e in &edges {
            if e.from == e.to {
                return Err(FamilyError::SelfLoop(*e));
            }
            if e.from.0 == 0 || e.from.0 > n || e.to.0 == 0 || e.to.0 > n {
                return Err(FamilyError::UnknownEdgeMode(*e));
            }
        }
        Ok(SubsystemFamily { dim, matrices: subsystems.into_iter().map(|(_, a)| a).collect(), edges })
    }

    /// All ordered pairs of distinct subsystems are admissible.
    pub fn fully_connected(matrices: Vec<Mat>) -> Result<Self, FamilyError> {
        let n = matrices.len();
        let edges: Vec<Edge> =
            (1..=n).flat_map(|p| (1..=n).filter(move |&q| q != p).map(move |q| Edge::new(p, q))).collect();
        Self::new(matrices.into_iter().enumerate().map(|(i, a)| (ModeId(i + 1), a)), edges)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn contains(&self, id: ModeId) -> bool {
        id.0 >= 1 && id.0 <= self.matrices.len()
    }

    pub fn matrix(&self, id: ModeId) -> Option<&Mat> {
        id.0.checked_sub(1).and_then(|i| self.matrices.get(i))
    }

    pub fn modes(&self) -> impl Iterator<Item = ModeId> + '_ {
        (1..=self.matrices.len()).map(ModeId)
    }

    pub fn subsystems(&self) -> impl Iterator<Item = (ModeId, &Mat)> {
        self.matrices.iter().enumerate().map(|(i, a)| (ModeId(i + 1), a))
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn has_edge(&self, e: Edge) -> bool {
        self.edges.contains(&e)
    }

    /// Admissible successors of `p`, in ascending order.
    pub fn successors(&self, p: ModeId) -> impl Iterator<Item = ModeId> + '_ {
        self.edges.iter().filter(move |e| e.from == p).map(|e| e.to)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(v: f64) -> Mat {
        Mat::diag(&[v, v])
    }

    #[test]
    fn validates_ids_and_edges() {
        let fam =
            SubsystemFamily::new([(ModeId(2), a(-1.0)), (ModeId(1), a(-2.0))], [Edge::new(1, 2), Edge::new(2, 1)])
                .unwrap();
        assert_eq!(fam.matrix(ModeId(1)).unwrap()[(0, 0)], -2.0);
        assert_eq!(fam.successors(ModeId(1)).collect::<Vec<_>>(), vec![ModeId(2)]);

        let gap = SubsystemFamily::new([(ModeId(1), a(-1.0)), (ModeId(3), a(-1.0))], []);
        assert!(matches!(gap, Err(FamilyError::BadIds { .. })));
        let bad_edge = SubsystemFamily::new([(ModeId(1), a(-1.0))], [Edge::new(1, 2)]);
        assert!(matches!(bad_edge, Err(FamilyError::UnknownEdgeMode(_))));
        let self_loop = SubsystemFamily::new([(ModeId(1), a(-1.0))], [Edge::new(1, 1)]);
        assert!(matches!(self_loop, Err(FamilyError::SelfLoop(_))));
    }

    #[test]
    fn rejects_singular_and_mismatched() {
        let sing = Mat::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(matches!(SubsystemFamily::new([(ModeId(1), sing)], []), Err(FamilyError::RankDeficient(_))));
        let r = SubsystemFamily::new([(ModeId(1), a(-1.0)), (ModeId(2), Mat::diag(&[-1.0]))], []);
        assert!(matches!(r, Err(FamilyError::Dimension { .. })));
    }

    #[test]
    fn edge_serializes_as_pair() {
        let e = Edge::new(3, 4);
        let pair: (ModeId, ModeId) = e.into();
        assert_eq!(pair, (ModeId(3), ModeId(4)));
        assert_eq!(e.to_string(), "(3,4)");
    }
}

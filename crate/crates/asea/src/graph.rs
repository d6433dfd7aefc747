//! Human skeleton graphs and the shared trainable adjacency.

use crate::error::{AseaError, Result};
use crate::tensor::Tensor;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkeletonGraph {
    pub n_joints: usize,
    pub edges: Vec<(usize, usize)>,
    pub names: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SkeletonKind {
    Sbu15,
    Ntu25,
    Custom,
}

impl std::str::FromStr for SkeletonKind {
    type Err = AseaError;
    fn from_str(s: &str) -> Result<SkeletonKind> {
        match s {
            "sbu15" => Ok(SkeletonKind::Sbu15),
            "ntu25" => Ok(SkeletonKind::Ntu25),
            "custom" => Ok(SkeletonKind::Custom),
            other => Err(AseaError::Config(format!("unknown skeleton kind '{other}'"))),
        }
    }
}

/// SBU 15-joint layout: head, neck, torso, then left/right arm and leg chains.
const SBU15_NAMES: [&str; 15] = [
    "head",
    "neck",
    "torso",
    "left_shoulder",
    "left_elbow",
    "left_hand",
    "right_shoulder",
    "right_elbow",
    "right_hand",
    "left_hip",
    "left_knee",
    "left_foot",
    "right_hip",
    "right_knee",
    "right_foot",
];

const SBU15_EDGES: [(usize, usize); 14] = [
    (0, 1),
    (1, 2),
    (1, 3),
    (3, 4),
    (4, 5),
    (1, 6),
    (6, 7),
    (7, 8),
    (2, 9),
    (9, 10),
    (10, 11),
    (2, 12),
    (12, 13),
    (13, 14),
];

const NTU25_EDGES: [(usize, usize); 24] = [
    (0, 1),
    (1, 20),
    (2, 20),
    (3, 2),
    (4, 20),
    (5, 4),
    (6, 5),
    (7, 6),
    (8, 20),
    (9, 8),
    (10, 9),
    (11, 10),
    (12, 0),
    (13, 12),
    (14, 13),
    (15, 14),
    (16, 0),
    (17, 16),
    (18, 17),
    (19, 18),
    (21, 22),
    (22, 7),
    (23, 24),
    (24, 11),
];

pub fn build_graph(kind: SkeletonKind) -> Result<SkeletonGraph> {
    match kind {
        SkeletonKind::Sbu15 => Ok(SkeletonGraph {
            n_joints: 15,
            edges: SBU15_EDGES.to_vec(),
            names: SBU15_NAMES.iter().map(|s| s.to_string()).collect(),
        }),
        SkeletonKind::Ntu25 => Ok(SkeletonGraph {
            n_joints: 25,
            edges: NTU25_EDGES.to_vec(),
            names: (0..25).map(|i| format!("joint{i}")).collect(),
        }),
        SkeletonKind::Custom => Err(AseaError::Config(
            "custom skeletons must supply explicit joints and edges".into(),
        )),
    }
}

pub fn custom_graph(names: Vec<String>, edges: Vec<(usize, usize)>) -> Result<SkeletonGraph> {
    let n = names.len();
    if n == 0 {
        return Err(AseaError::Config("custom skeleton needs at least one joint".into()));
    }
    for &(a, b) in &edges {
        if a >= n || b >= n {
            return Err(AseaError::Config(format!(
                "edge ({a},{b}) references a joint outside 0..{n}"
            )));
        }
    }
    let g = SkeletonGraph { n_joints: n, edges, names };
    if !g.is_connected() {
        return Err(AseaError::Config("custom skeleton graph is not connected".into()));
    }
    Ok(g)
}

/// Custom skeletons accepted as JSON: `{"names": [...], "edges": [[i,j], ...]}`.
pub fn custom_graph_from_json(json: &str) -> Result<SkeletonGraph> {
    #[derive(Deserialize)]
    struct Spec {
        names: Vec<String>,
        edges: Vec<(usize, usize)>,
    }
    let spec: Spec = serde_json::from_str(json)
        .map_err(|e| AseaError::Config(format!("bad skeleton JSON: {e}")))?;
    custom_graph(spec.names, spec.edges)
}

impl SkeletonGraph {
    pub fn is_connected(&self) -> bool {
        // union-find
        let mut parent: Vec<usize> = (0..self.n_joints).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let root = find(&mut parent, 0);
        (0..self.n_joints).all(|j| find(&mut parent, j) == root)
    }

    /// D^{-1/2} (Adj + I) D^{-1/2}: symmetric normalization with self-loops.
    pub fn normalized_adjacency(&self) -> Tensor {
        let n = self.n_joints;
        let mut adj = Tensor::zeros(&[n, n]);
        for i in 0..n {
            *adj.at_mut(&[i, i]) = 1.0;
        }
        for &(a, b) in &self.edges {
            *adj.at_mut(&[a, b]) = 1.0;
            *adj.at_mut(&[b, a]) = 1.0;
        }
        let deg: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| adj.at(&[i, j])).sum())
            .collect();
        Tensor::from_fn(&[n, n], |ix| {
            adj.at(ix) / (deg[ix[0]].sqrt() * deg[ix[1]].sqrt())
        })
    }
}

/// The shared learnable adjacency A, initialized from bone connectivity and
/// unconstrained afterwards.
pub fn init_adjacency(g: &SkeletonGraph) -> Tensor {
    g.normalized_adjacency()
}

//! Vertex-indexed sparse matrices, probability measures, norms and graph
//! construction.

pub mod generate;
pub mod io;
pub mod measure;
pub mod norms;
pub mod sparse;

pub use generate::{
    knn_graph, two_cluster_cloud, uniform_square_cloud, watts_strogatz, EdgeWeight, PointCloud,
};
pub use io::{load_edge_list, load_measure, load_point_cloud};
pub use measure::{inverse_density_measure, Measure};
pub use norms::{kappa, norms, NormReport};
pub use sparse::SparseSymMatrix;

pub mod digraph;
pub mod separators;
pub mod vset;

pub use digraph::{parse_edge_list, Digraph, GraphError, SccDecomposition};
pub use separators::{Lambda, Separator, SeparatorError, TerminalPair, TightCover};
pub use vset::VertexSet;
pub mod patterns;
pub use patterns::{builtin_family, check_solution, find_forbidden_subgraph, Embedding, FamilyKind, FamilySpec, ForbiddenFamily, Pattern, PatternError};
pub mod compression;
pub mod core_solver;
pub mod fast_solvers;
pub mod path_solver;
pub mod gen;
pub mod oracle;
pub use compression::{PartitionSolver, PartitionedInstance, SolveError, SolveStats, SolverConfig};

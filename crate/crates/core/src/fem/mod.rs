//! P1 finite elements on triangulations: assembly, CG, inverse iteration.

mod assembly;
mod solvers;
mod sparse;

pub use assembly::{assemble, AssembledSystem};
pub use solvers::{
    cg_solve, cg_solve_from, discrete_f1, solve_eig, solve_eig_with, solve_torsion, CgOutcome,
    SolverOptions, SpectralSolution, TorsionSolution, DEFAULT_CG_TOL, DEFAULT_EIG_TOL,
};
pub use sparse::SparseSymmetric;

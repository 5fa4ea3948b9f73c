//! Exact simplex paths on lattice polytopes in `[0,k]^n`: an improvement
//! oracle, the basic walk, bit scaling, Frank–Tardos preprocessing and the
//! iterative face-fixing algorithm, plus brute-force verification.

pub mod cli;
pub mod iterative;
pub mod linalg;
pub mod lp;
pub mod oracle;
pub mod paths;
pub mod polytope;
pub mod preprocess;
pub mod trace;
pub mod verify;

//! Small fixed-size numerical kernels: cubic roots, 3×3 symmetric
//! eigenvalues and fixed-step RK4 integration.

mod cubic;
mod ode;
mod sym3;

pub use cubic::{solve_cubic, Cubic, RootTriple};
pub use ode::{integrate_fixed_step, integrate_steps, rk4_step, step_count, Trajectory};
pub use sym3::{eig_sym3, eigen_sym3, SymEigen, Sym3};

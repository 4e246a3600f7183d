//! Global theory on closed and planar meshes: Hodge decomposition, period
//! data on tori, Green functions and the Cauchy integral.

mod cauchy;
mod green;
mod hodge;
mod periods;

pub use cauchy::{cauchy_integral, quad_region_boundary, window_contour, CauchyResult};
pub use green::{disk_domain, green_function, green_on_domain, greens_identity_residual, GreenFunction};
pub use hodge::{hodge_decompose, HodgeSplit};
pub use periods::{graph_periods, harmonic_rank, holomorphic_basis, PeriodData, RankCertificate, RANK_GAP};

//! Speed profiles `c(x)`, their admissibility diagnostics, and the symbols built from them.

mod admissibility;
mod partition;
mod profile;
mod seminorm;
mod symbol;

pub use admissibility::{
    check_admissible, required_derivatives, required_sobolev, AdmissibilityReport, DerivativeEstimate,
    RegularityVerdict, SobolevProxy, MAX_DERIVATIVE_ORDER,
};
pub use partition::{bump_profile, chi0, dyadic_support, dyadic_window, phi};
pub use profile::{smooth_step, PeriodicSpline, Perturbation, SpeedProfile};
pub use seminorm::{
    mixed_derivative, nested_derivative, periodic_hs_norm, seminorm_m, seminorm_m_on, seminorm_n, seminorm_n_on,
    GridMeta, SeminormBox, SeminormEstimate, SeminormKind,
};
pub use symbol::{
    decompose_pi_sigma, make_bump, make_dyadic_partition, make_dyadic_window, make_symbol_d, make_symbol_d_t,
    make_symbol_p, make_symbol_p_inv, make_symbol_p_m, make_weight, Symbol, SymbolKind, SymbolLabel,
    TrigInterpolant,
};

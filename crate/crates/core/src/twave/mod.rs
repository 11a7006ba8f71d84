//! Traveling-wave construction: the potential `F(g, q)`, the turning point
//! `g*`, and the profile `ω(η)` obtained by quadrature of `g' = sqrt(F)`.

mod fpoly;
mod profile;
mod solve;

pub use fpoly::{eval_f, FPoly, SelfConsistencyPoly};
pub use profile::{
    fit_tail_rate, integrate_profile, integrate_profile_with, profile_residual, profile_to_omega,
    sample_physical_wave, soliton_profile, GProfile, Profile, ProfileKind, ProfileOptions,
};
pub use solve::{
    linear_coefficients, self_consistency, solve_g_star_alpha_pos, solve_g_star_alpha_pos_with,
    solve_q_star_alpha_zero, wave_velocity, GStarSolution, ScanOptions, WaveRoot,
};

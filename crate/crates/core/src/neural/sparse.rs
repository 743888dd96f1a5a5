//! KL-divergence sparsity penalty.

/// Activation averages are clamped to `[EPS, 1 - EPS]` before use.
pub const RHO_HAT_EPS: f64 = 1e-6;

#[inline]
fn clamp_rho_hat(r: f64) -> f64 {
    r.clamp(RHO_HAT_EPS, 1.0 - RHO_HAT_EPS)
}

/// `Σ_j ρ ln(ρ/ρ̂_j) + (1-ρ) ln((1-ρ)/(1-ρ̂_j))` over hidden units.
pub fn kl_sparsity(rho_hat: &[f64], rho: f64) -> f64 {
    rho_hat
        .iter()
        .map(|&r| {
            let r = clamp_rho_hat(r);
            rho * libm::log(rho / r) + (1.0 - rho) * libm::log((1.0 - rho) / (1.0 - r))
        })
        .sum()
}

/// Derivative of [`kl_sparsity`] with respect to each `ρ̂_j`; zero where the
/// clamp is active.
pub fn kl_sparsity_grad(rho_hat: &[f64], rho: f64) -> impl Iterator<Item = f64> + '_ {
    rho_hat.iter().map(move |&r| {
        if !(RHO_HAT_EPS..=1.0 - RHO_HAT_EPS).contains(&r) {
            0.0
        } else {
            -rho / r + (1.0 - rho) / (1.0 - r)
        }
    })
}

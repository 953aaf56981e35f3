//! Rating synthesis for a selected item: the user's mean plus their
//! rating deviation scaled by the item mean plus unit Gaussian noise,
//! rounded half-away-from-zero and clamped into the rating bounds.

use rand::Rng;
use rand_distr::StandardNormal;

/// Draws the noise term and synthesizes `(omega, rating)`.
pub fn synthesize_rating(
    user_mean: f64,
    user_sd: f64,
    item_mean: f64,
    bounds: (i32, i32),
    rng: &mut impl Rng,
) -> (f64, i32) {
    let eta: f64 = rng.sample(StandardNormal);
    synthesize_rating_with_noise(user_mean, user_sd, item_mean, eta, bounds)
}

/// Deterministic core with the noise term supplied by the caller.
pub fn synthesize_rating_with_noise(
    user_mean: f64,
    user_sd: f64,
    item_mean: f64,
    eta: f64,
    bounds: (i32, i32),
) -> (f64, i32) {
    let omega = user_mean + user_sd * item_mean + eta;
    // f64::round is half-away-from-zero.
    let rating = (omega.round() as i64).clamp(bounds.0 as i64, bounds.1 as i64) as i32;
    (omega, rating)
}

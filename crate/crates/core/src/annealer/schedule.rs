//! Metropolis acceptance and the temperature schedule.

use alloc::format;

use rand::Rng;

use crate::{Error, Result};

/// Probability of accepting an energy change `delta` at inverse temperature
/// `beta`: 1 for downhill or level moves, `exp(-beta * delta)` otherwise.
pub fn acceptance_probability(delta: f64, beta: f64) -> Result<f64> {
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "inverse temperature must be non-negative, got {beta}"
        )));
    }
    Ok(metropolis(delta, beta))
}

#[inline]
pub(crate) fn metropolis(delta: f64, beta: f64) -> f64 {
    if delta <= 0.0 {
        1.0
    } else {
        libm::exp(-beta * delta)
    }
}

/// Draws the Metropolis decision for `delta` at `beta`.
#[inline]
pub fn metropolis_accept<R: Rng + ?Sized>(delta: f64, beta: f64, rng: &mut R) -> bool {
    delta <= 0.0 || crate::rng::unit(rng) < metropolis(delta, beta)
}

/// Mean of `-|df| / ln p` over the non-zero energy differences. Returns 1.0
/// when every difference is zero.
pub fn temperature_from_deltas<I: IntoIterator<Item = f64>>(deltas: I, accept_p: f64) -> Result<f64> {
    check_probability(accept_p)?;
    let log_p = libm::log(accept_p);
    let (mut sum, mut count) = (0.0, 0usize);
    for delta in deltas {
        if delta != 0.0 {
            sum += -libm::fabs(delta) / log_p;
            count += 1;
        }
    }
    Ok(if count == 0 { 1.0 } else { sum / count as f64 })
}

/// Calibrates the starting temperature from `samples` neighbours of `start`
/// so that a typical uphill move is accepted with probability `accept_p`.
pub fn initial_temperature<S, R, E, N>(
    energy: E,
    start: &S,
    mut neighbor: N,
    samples: usize,
    accept_p: f64,
    rng: &mut R,
) -> Result<f64>
where
    R: Rng + ?Sized,
    E: Fn(&S) -> f64,
    N: FnMut(&S, &mut R) -> S,
{
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one calibration sample is needed".into()));
    }
    check_probability(accept_p)?;
    let base = energy(start);
    let mut deltas = alloc::vec::Vec::with_capacity(samples);
    for _ in 0..samples {
        let next = neighbor(start, rng);
        deltas.push(energy(&next) - base);
    }
    temperature_from_deltas(deltas, accept_p)
}

/// Geometric cooling `T0 * alpha^k`.
pub fn cooling_temperature(t0: f64, alpha: f64, k: u32) -> Result<f64> {
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(Error::InvalidArgument(format!("T0 must be positive, got {t0}")));
    }
    check_cooling_factor(alpha)?;
    Ok(t0 * libm::pow(alpha, k as f64))
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "acceptance probability must lie in (0, 1), got {p}"
        )))
    }
}

pub(crate) fn check_cooling_factor(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "cooling factor must lie in (0, 1), got {alpha}"
        )))
    }
}

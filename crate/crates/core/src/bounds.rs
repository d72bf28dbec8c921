//! Closed-form competitive bounds as functions of `(eta, lambda, w, alpha)`.

use crate::model::pad_movement;

/// Greedy (`w = 1`): `max(1 + (eta + eta^2) / (2 lambda), eta^2)`.
pub fn greedy_ratio(eta: f64, lambda: f64) -> f64 {
    (1.0 + (eta + eta * eta) / (2.0 * lambda)).max(eta * eta)
}

/// Refined greedy bound on the oracle breakdown:
/// `(1 + (eta^2 + eta) / (2 lambda)) sum H* + eta^2 sum M*`.
pub fn greedy_component_bound(eta: f64, lambda: f64, h_star: &[f64], m_star: &[f64]) -> f64 {
    let h: f64 = h_star.iter().sum();
    let m: f64 = m_star.iter().sum();
    (1.0 + (eta * eta + eta) / (2.0 * lambda)) * h + eta * eta * m
}

/// Average of the `w` subroutines (and deterministic averaging for convex
/// costs, or uniform phase sampling for any cost):
/// `1 + (1/w) max(eta / lambda, 2 (eta - 1))`.
pub fn subroutine_average_ratio(eta: f64, lambda: f64, w: usize) -> f64 {
    1.0 + (eta / lambda).max(2.0 * (eta - 1.0)) / w as f64
}

/// Random anchor gaps against a semi-adaptive adversary:
/// `1 + (2 / (w - 2)) max(eta / lambda, 2 (eta - 1))`, for `w >= 4`.
pub fn random_anchor_ratio(eta: f64, lambda: f64, w: usize) -> f64 {
    1.0 + 2.0 / (w as f64 - 2.0) * (eta / lambda).max(2.0 * (eta - 1.0))
}

/// Extra cost of forcing anchors at `anchors` (timesteps in `[1, T]`) over a
/// comparison trajectory with per-step costs `h_star`, `m_star`:
/// `(eta/lambda) sum_s H*_s + (eta - 1) sum_s (M*_s + M*_{s+1})`, `M*_{T+1} = 0`.
pub fn anchor_extra_cost(
    eta: f64,
    lambda: f64,
    anchors: &[usize],
    h_star: &[f64],
    m_star: &[f64],
) -> f64 {
    let m = pad_movement(m_star);
    let mut hs = 0.0;
    let mut ms = 0.0;
    for &s in anchors {
        if s == 0 || s > h_star.len() {
            continue;
        }
        hs += h_star[s - 1];
        ms += m[s - 1] + m[s];
    }
    eta / lambda * hs + (eta - 1.0) * ms
}

/// Loss factor of averaging convexifiable costs: `1 + alpha / lambda`.
pub fn convexifiable_factor(alpha: f64, lambda: f64) -> f64 {
    1.0 + alpha / lambda
}

/// Deterministic averaging on convexifiable costs with `0.5 ||.||^2`
/// movement: `(1 + alpha/lambda) (1 + (1/w) max(2/lambda, 2))`.
pub fn convexifiable_dsfhc_ratio(alpha: f64, lambda: f64, w: usize) -> f64 {
    convexifiable_factor(alpha, lambda) * (1.0 + (2.0 / lambda).max(2.0) / w as f64)
}

/// Anchor-hit probability bound for random gaps: `2 / (w - 2)`.
pub fn anchor_probability_bound(w: usize) -> f64 {
    2.0 / (w as f64 - 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_values() {
        // eta = 2, lambda = m/2 = 1.
        assert_eq!(greedy_ratio(2.0, 1.0), 4.0);
        assert_eq!(subroutine_average_ratio(2.0, 1.0, 4), 1.5);
        assert_eq!(random_anchor_ratio(2.0, 1.0, 6), 2.0);
    }

    #[test]
    fn polyhedral_values() {
        // eta = 1, lambda = alpha / 2 gives 1 + 2 / (w alpha).
        for alpha in [0.5, 1.0, 2.0] {
            for w in [2usize, 4, 8] {
                let b = subroutine_average_ratio(1.0, alpha / 2.0, w);
                assert!((b - (1.0 + 2.0 / (w as f64 * alpha))).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn extra_cost_pads_last_movement() {
        let h = [1.0, 2.0, 3.0];
        let m = [0.5, 0.25, 0.125];
        // anchors {1, 3}: (2/1)(1 + 3) + 1 * ((0.5 + 0.25) + (0.125 + 0)).
        let v = anchor_extra_cost(2.0, 1.0, &[0, 1, 3, 9], &h, &m);
        assert_eq!(v, 8.0 + 0.875);
    }

    #[test]
    fn convexifiable_chain() {
        assert_eq!(convexifiable_factor(0.0, 1.0), 1.0);
        assert_eq!(convexifiable_dsfhc_ratio(0.0, 1.0, 2), 2.0);
        assert_eq!(anchor_probability_bound(6), 0.5);
    }
}

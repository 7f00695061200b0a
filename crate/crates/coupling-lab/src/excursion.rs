//! The excursion success parameter of the two-ball walk: the probability
//! that a departure from a long-edge endpoint escapes its ball before the
//! next crossing.

use crate::CoupleError;

/// `(1 - p)d / (1 + (1 - p)d)` for local return probability `p` and local
/// degree `d`. The endpoint's geometric crossing count has this parameter.
pub fn excursion_parameter(p_tilde: f64, d_tilde: usize) -> Result<f64, CoupleError> {
    if !(0.0..1.0).contains(&p_tilde) || d_tilde == 0 {
        return Err(CoupleError::Degenerate(format!(
            "excursion parameter undefined for p_tilde={p_tilde}, d_tilde={d_tilde}: \
             a vertex that never escapes (or has no local neighbors) makes no excursions"
        )));
    }
    let a = (1.0 - p_tilde) * d_tilde as f64;
    Ok(a / (1.0 + a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert_eq!(excursion_parameter(0.0, 1).unwrap(), 0.5);
        assert!((excursion_parameter(0.0, 2).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert!((excursion_parameter(0.5, 4).unwrap() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_inputs_are_signaled() {
        assert!(excursion_parameter(1.0, 3).is_err());
        assert!(excursion_parameter(0.5, 0).is_err());
        assert!(excursion_parameter(-0.1, 1).is_err());
    }
}

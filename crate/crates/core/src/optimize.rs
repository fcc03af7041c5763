//! Golden-section maximization on a bracket.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Maximum<T> {
    pub at: T,
    pub value: T,
}

/// Maximizes `f` on `[lo, hi]` to absolute abscissa tolerance `tol`.
///
/// The objective is assumed unimodal on the bracket. If the located maximizer
/// is within `tol` of either end, there is no interior maximum and a
/// [`Error::Bracket`] is returned.
pub fn golden_max<T, F>(mut f: F, lo: T, hi: T, tol: T) -> Result<Maximum<T>>
where
    T: Real,
    F: FnMut(T) -> Result<T>,
{
    if !(lo < hi) {
        return Err(Error::Domain(format!("empty bracket [{lo}, {hi}]")));
    }
    let inv_phi: T = (lit::<T>(5.0).sqrt() - T::one()) / lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let (at, value) = if fc > fd { (c, fc) } else { (d, fd) };
    let edge = tol * lit(2.0);
    if at - lo <= edge || hi - at <= edge {
        return Err(Error::Bracket {
            lo: lo.to_f64().unwrap_or(f64::NAN),
            hi: hi.to_f64().unwrap_or(f64::NAN),
            at: at.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(Maximum { at, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let m = golden_max(|x: f64| Ok(-(x - 0.3) * (x - 0.3) + 2.0), 0.0, 1.0, 1e-9).unwrap();
        assert!((m.at - 0.3).abs() < 1e-7);
        assert!((m.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_objective_is_a_bracket_error() {
        let err = golden_max(|x: f64| Ok(x), 0.0, 1.0, 1e-7).unwrap_err();
        assert!(matches!(err, Error::Bracket { .. }));
    }

    #[test]
    fn empty_bracket_rejected() {
        assert!(golden_max(|x: f64| Ok(x), 1.0, 1.0, 1e-7).is_err());
    }
}

//! Closed-form echo responses, optimal twist angles, readout noise and the
//! sensitivity ratios they imply.
//!
//! Every twist angle here is the *per-unit-acceleration* angle `θ`. A block
//! steered by `a` driven qubits accumulates the effective angle `a·θ`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::optimize::golden_max;
use crate::scalar::{arccot, count, lit, Real};

/// Coarse family of an architecture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArchKind {
    Qrc,
    Perceptron,
    Qnn,
}

impl fmt::Display for ArchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArchKind::Qrc => "qrc",
            ArchKind::Perceptron => "perceptron",
            ArchKind::Qnn => "qnn",
        })
    }
}

impl FromStr for ArchKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qrc" => Ok(ArchKind::Qrc),
            "perceptron" => Ok(ArchKind::Perceptron),
            "qnn" => Ok(ArchKind::Qnn),
            other => Err(Error::Domain(format!("unknown architecture '{other}'"))),
        }
    }
}

/// Qubit layout of a sensor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArchitectureParams {
    /// All `n` qubits twisted jointly.
    Qrc { n: usize },
    /// `n_in` inputs steered by a single driven output qubit.
    Perceptron { n_in: usize },
    /// Two blocks that can steer each other.
    Qnn { n_in: usize, n_out: usize },
    /// `layers` blocks of `n_l` qubits, neighbours steering each other.
    Layered { layers: usize, n_l: usize },
}

impl ArchitectureParams {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Qrc { n } => n >= 1,
            Self::Perceptron { n_in } => n_in >= 1,
            Self::Qnn { n_in, n_out } => n_in >= 1 && n_out >= 1,
            Self::Layered { layers, n_l } => layers >= 2 && n_l >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid architecture {self:?}")))
        }
    }

    pub fn kind(&self) -> ArchKind {
        match self {
            Self::Qrc { .. } => ArchKind::Qrc,
            Self::Perceptron { .. } => ArchKind::Perceptron,
            Self::Qnn { .. } | Self::Layered { .. } => ArchKind::Qnn,
        }
    }

    pub fn n_in(&self) -> usize {
        match *self {
            Self::Qrc { n } => n,
            Self::Perceptron { n_in } | Self::Qnn { n_in, .. } => n_in,
            Self::Layered { n_l, .. } => n_l,
        }
    }

    pub fn n_out(&self) -> usize {
        match *self {
            Self::Qrc { .. } => 0,
            Self::Perceptron { .. } => 1,
            Self::Qnn { n_out, .. } => n_out,
            Self::Layered { n_l, .. } => n_l,
        }
    }

    pub fn layers(&self) -> usize {
        match *self {
            Self::Qrc { .. } => 1,
            Self::Perceptron { .. } | Self::Qnn { .. } => 2,
            Self::Layered { layers, .. } => layers,
        }
    }

    /// Qubits per layer when every layer has the same size.
    pub fn n_per_layer(&self) -> Option<usize> {
        match *self {
            Self::Qrc { n } => Some(n),
            Self::Perceptron { .. } => None,
            Self::Qnn { n_in, n_out } => (n_in == n_out).then_some(n_in),
            Self::Layered { n_l, .. } => Some(n_l),
        }
    }

    /// `n_out / n_in`, undefined for a reservoir.
    pub fn alpha<T: Real>(&self) -> Option<T> {
        match self.kind() {
            ArchKind::Qrc => None,
            _ => Some(count::<T>(self.n_out()) / count::<T>(self.n_in())),
        }
    }

    pub fn total_qubits(&self) -> usize {
        match *self {
            Self::Qrc { n } => n,
            Self::Perceptron { n_in } => n_in + 1,
            Self::Qnn { n_in, n_out } => n_in + n_out,
            Self::Layered { layers, n_l } => layers * n_l,
        }
    }
}

/// Normalization used for the readout noise `ΔS_y` at `φ = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Convention {
    /// `√(N/2)`
    Paper,
    /// `√N / 2`, the exact coherent-state value.
    Css,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Paper => "paper",
            Convention::Css => "css",
        })
    }
}

impl FromStr for Convention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Convention::Paper),
            "css" => Ok(Convention::Css),
            other => Err(Error::Domain(format!("unknown convention '{other}'"))),
        }
    }
}

/// How the response of an `L`-layer stack is accumulated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LayerModel {
    /// Every squeezing event scored as its own edge-like echo: `2(L−1)` of them.
    EventAdditive,
    /// Interior layers carry the doubled twist `2·n_l·θ` within one echo.
    StateEvolution,
}

impl fmt::Display for LayerModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LayerModel::EventAdditive => "event-additive",
            LayerModel::StateEvolution => "state-evolution",
        })
    }
}

impl FromStr for LayerModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "event-additive" => Ok(LayerModel::EventAdditive),
            "state-evolution" => Ok(LayerModel::StateEvolution),
            other => Err(Error::Domain(format!("unknown layer model '{other}'"))),
        }
    }
}

/// `(N/2)(N−1)·sin(θ_eff)·cos^{N−2}(θ_eff)`: echo slope of one block of
/// `N` qubits twisted by the effective angle `θ_eff`.
pub fn d_single<T: Real>(n: usize, theta_eff: T) -> Result<T> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "echo response formula needs N >= 2 (got N = {n}; N(N-1) vanishes)"
        )));
    }
    Ok(block_response(n, theta_eff))
}

/// Same as [`d_single`] but total: a lone qubit has no twist-induced
/// response, so `N = 1` yields zero.
pub fn block_response<T: Real>(n: usize, theta_eff: T) -> T {
    if n < 2 {
        return T::zero();
    }
    let nn = count::<T>(n);
    nn / lit(2.0) * (nn - T::one()) * theta_eff.sin() * theta_eff.cos().powi((n - 2) as i32)
}

/// Input-block slope when the `n_out` outputs steer the inputs.
pub fn d_in<T: Real>(n_in: usize, n_out: usize, theta: T) -> Result<T> {
    d_single(n_in, count::<T>(n_out) * theta)
}

/// Output-block slope when the `n_in` inputs steer the outputs.
pub fn d_out<T: Real>(n_in: usize, n_out: usize, theta: T) -> Result<T> {
    d_single(n_out, count::<T>(n_in) * theta)
}

/// Summed slope of the sequential two-layer echo.
pub fn total_derivative_2layer<T: Real>(n_in: usize, n_out: usize, theta: T) -> Result<T> {
    Ok(d_in(n_in, n_out, theta)? + d_out(n_in, n_out, theta)?)
}

/// `arccot(√(N−2)) / accel`, the stationary point of [`d_single`] reached
/// with acceleration `accel`.
pub fn theta_opt<T: Real>(n: usize, accel: usize) -> Result<T> {
    if n < 3 {
        return Err(Error::Domain(format!(
            "optimal angle arccot(sqrt(N-2)) needs N >= 3 (got N = {n})"
        )));
    }
    if accel == 0 {
        return Err(Error::Domain("acceleration must be at least 1".into()));
    }
    Ok(arccot(count::<T>(n - 2).sqrt()) / count::<T>(accel))
}

/// Optimal squeezing strength `Q = N·θ_opt`.
pub fn q_opt<T: Real>(n: usize) -> Result<T> {
    Ok(count::<T>(n) * theta_opt::<T>(n, 1)?)
}

/// Readout noise of `n_total` uncorrelated qubits at `φ = 0`.
pub fn delta_sy0<T: Real>(n_total: usize, convention: Convention) -> T {
    let n = count::<T>(n_total);
    match convention {
        Convention::Paper => (n / lit(2.0)).sqrt(),
        Convention::Css => n.sqrt() / lit(2.0),
    }
}

/// Error-propagation phase uncertainty `ΔS_y / |∂φ⟨S_y⟩|`.
pub fn sensitivity<T: Real>(deriv: T, delta_sy: T) -> Result<T> {
    if deriv == T::zero() {
        return Err(Error::UndefinedSensitivity);
    }
    if !deriv.is_finite() || !delta_sy.is_finite() {
        return Err(Error::NonFinite("sensitivity inputs"));
    }
    Ok(delta_sy / deriv.abs())
}

/// Twist multipliers `k_i` of each layer (`1` at the edges, `2` inside).
pub fn layer_twist_multipliers(layers: usize) -> Vec<usize> {
    (0..layers)
        .map(|i| if i == 0 || i + 1 == layers { 1 } else { 2 })
        .collect()
}

/// Response of an `L`-layer stack of `n_l`-qubit layers.
pub fn multilayer_derivative<T: Real>(
    layers: usize,
    n_l: usize,
    theta: T,
    model: LayerModel,
) -> Result<T> {
    if layers < 2 {
        return Err(Error::Domain(format!(
            "layered stack needs L >= 2 (got {layers})"
        )));
    }
    let accel = count::<T>(n_l) * theta;
    match model {
        LayerModel::EventAdditive => Ok(count::<T>(2 * (layers - 1)) * d_single(n_l, accel)?),
        LayerModel::StateEvolution => layer_twist_multipliers(layers)
            .into_iter()
            .try_fold(T::zero(), |acc, k| {
                Ok(acc + d_single(n_l, count::<T>(k) * accel)?)
            }),
    }
}

/// The displayed multilayer ratio `√L / (1 − (N_l+L)/(N_l·L+1))`, evaluated
/// verbatim.
pub fn ratio_display_expression<T: Real>(layers: usize, n_l: usize) -> T {
    let l = count::<T>(layers);
    let n = count::<T>(n_l);
    l.sqrt() / (T::one() - (n + l) / (n * l + T::one()))
}

/// Optimum of an analytic response curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticOptimum<T> {
    pub theta: T,
    pub deriv: T,
}

/// Maximizes `|response(θ)|` for a given architecture on the first lobe
/// `(0, π/(2·a_max))`, where `a_max` is the largest acceleration present.
pub fn analytic_optimum<T: Real>(
    arch: &ArchitectureParams,
    response: impl Fn(T) -> Result<T>,
    max_accel: usize,
) -> Result<AnalyticOptimum<T>> {
    arch.validate()?;
    let hi = T::FRAC_PI_2() / count::<T>(max_accel.max(1));
    let m = golden_max(|t| Ok(response(t)?.abs()), T::zero(), hi, lit(1e-12))?;
    Ok(AnalyticOptimum {
        theta: m.at,
        deriv: response(m.at)?,
    })
}

/// Optimum of a QRC of `n` qubits.
pub fn qrc_optimum<T: Real>(n: usize) -> Result<AnalyticOptimum<T>> {
    let theta = theta_opt::<T>(n, 1)?;
    Ok(AnalyticOptimum {
        theta,
        deriv: d_single(n, theta)?,
    })
}

/// Optimum of the layered stack (two layers included) under `model`.
pub fn layered_optimum<T: Real>(
    layers: usize,
    n_l: usize,
    model: LayerModel,
) -> Result<AnalyticOptimum<T>> {
    let arch = ArchitectureParams::Layered { layers, n_l };
    let max_accel = match model {
        LayerModel::StateEvolution if layers > 2 => 2 * n_l,
        _ => n_l,
    };
    analytic_optimum(
        &arch,
        |t| multilayer_derivative(layers, n_l, t, model),
        max_accel,
    )
}

/// Both sides of a QNN-versus-QRC comparison at equal total qubit count.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioReport<T> {
    pub layers: usize,
    pub n_l: usize,
    pub model: LayerModel,
    pub convention: Convention,
    pub qrc: AnalyticOptimum<T>,
    pub qnn: AnalyticOptimum<T>,
    pub delta_phi_qrc: T,
    pub delta_phi_qnn: T,
    /// `Δφ^QNN / Δφ^QRC`; below one means the layered network is more
    /// sensitive.
    pub delta_phi_ratio: T,
    /// `|∂φ⟨S_y⟩^QNN| / |∂φ⟨S_y⟩^QRC|`.
    pub derivative_ratio: T,
    pub display_expression: T,
}

/// Compares a layered network of `L` layers with `n_l` qubits each against a
/// QRC of `L·n_l` qubits, both at their own optimal twist.
pub fn ratio_qnn_qrc<T: Real>(
    layers: usize,
    n_l: usize,
    model: LayerModel,
    convention: Convention,
) -> Result<RatioReport<T>> {
    let n_total = layers * n_l;
    let qrc = qrc_optimum::<T>(n_total)?;
    let qnn = layered_optimum::<T>(layers, n_l, model)?;
    let noise = delta_sy0::<T>(n_total, convention);
    let delta_phi_qrc = sensitivity(qrc.deriv, noise)?;
    let delta_phi_qnn = sensitivity(qnn.deriv, noise)?;
    Ok(RatioReport {
        layers,
        n_l,
        model,
        convention,
        qrc,
        qnn,
        delta_phi_qrc,
        delta_phi_qnn,
        delta_phi_ratio: delta_phi_qnn / delta_phi_qrc,
        derivative_ratio: qnn.deriv.abs() / qrc.deriv.abs(),
        display_expression: ratio_display_expression(layers, n_l),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn d_single_small_cases() {
        assert_abs_diff_eq!(d_single(2, 0.3f64).unwrap(), 0.3f64.sin(), epsilon = 1e-15);
        assert_eq!(d_single(7, 0.0f64).unwrap(), 0.0);
        assert_abs_diff_eq!(
            d_single(2, FRAC_PI_4).unwrap(),
            2f64.sqrt() / 2.0,
            epsilon = 1e-15
        );
        assert!(matches!(d_single(1, 0.1f64), Err(Error::Domain(_))));
        assert_eq!(block_response(1, 0.4f64), 0.0);
    }

    #[test]
    fn d_in_and_d_out() {
        for theta in [0.0f64, 0.05, 0.2, 0.7] {
            assert_eq!(d_in(5, 5, theta).unwrap(), d_out(5, 5, theta).unwrap());
            assert_abs_diff_eq!(
                d_in(2, 2, theta).unwrap(),
                (2.0 * theta).sin(),
                epsilon = 1e-15
            );
        }
        assert_eq!(total_derivative_2layer(4, 3, 0.0f64).unwrap(), 0.0);
    }

    #[test]
    fn equal_layers_total_matches_closed_form() {
        for n in 2..12usize {
            for theta in [0.01, 0.1, 0.3] {
                let nf = n as f64;
                let want =
                    nf * (nf - 1.0) * (nf * theta).sin() * (nf * theta).cos().powi(n as i32 - 2);
                assert_relative_eq!(
                    total_derivative_2layer(n, n, theta).unwrap(),
                    want,
                    max_relative = 1e-13
                );
            }
        }
    }

    #[test]
    fn theta_opt_values() {
        assert_abs_diff_eq!(theta_opt::<f64>(3, 1).unwrap(), FRAC_PI_4, epsilon = 1e-15);
        assert_abs_diff_eq!(theta_opt::<f64>(3, 2).unwrap(), PI / 8.0, epsilon = 1e-15);
        let t100 = theta_opt::<f64>(100, 1).unwrap();
        assert_abs_diff_eq!(t100, (1.0 / 98f64.sqrt()).atan(), epsilon = 1e-15);
        assert_abs_diff_eq!(t100, 0.10067, epsilon = 1e-5);
        assert!((t100 * 10.0 - 1.0).abs() < 0.02);
        let err = theta_opt::<f64>(2, 1).unwrap_err();
        assert!(err.to_string().contains("arccot(sqrt(N-2))"));
        assert_abs_diff_eq!(q_opt::<f64>(3).unwrap(), 3.0 * FRAC_PI_4, epsilon = 1e-15);
    }

    #[test]
    fn acceleration_covariance_is_exact() {
        for n in 3..40 {
            for a in 1..9 {
                assert_eq!(
                    theta_opt::<f64>(n, a).unwrap(),
                    theta_opt::<f64>(n, 1).unwrap() / a as f64
                );
            }
        }
    }

    #[test]
    fn readout_noise_conventions() {
        assert_abs_diff_eq!(delta_sy0::<f64>(2, Convention::Paper), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            delta_sy0::<f64>(2, Convention::Css),
            0.5f64.sqrt(),
            epsilon = 1e-15
        );
        for n in 1..50 {
            let r = delta_sy0::<f64>(n, Convention::Paper) / delta_sy0::<f64>(n, Convention::Css);
            assert_abs_diff_eq!(r, 2f64.sqrt(), epsilon = 1e-13);
        }
    }

    #[test]
    fn sensitivity_errors_on_zero_slope() {
        assert_eq!(sensitivity(1.0f64, 1.0).unwrap(), 1.0);
        assert_eq!(sensitivity(-2.0f64, 1.0).unwrap(), 0.5);
        assert_eq!(sensitivity(0.0f64, 1.0), Err(Error::UndefinedSensitivity));
    }

    #[test]
    fn multilayer_models() {
        for n_l in 2..8 {
            for theta in [0.01, 0.07] {
                let a = multilayer_derivative(2, n_l, theta, LayerModel::EventAdditive).unwrap();
                let b = multilayer_derivative(2, n_l, theta, LayerModel::StateEvolution).unwrap();
                let c = total_derivative_2layer(n_l, n_l, theta).unwrap();
                assert_relative_eq!(a, c, max_relative = 1e-14);
                assert_relative_eq!(b, c, max_relative = 1e-14);
            }
        }
        let theta = 0.02;
        let ea = multilayer_derivative(3, 4, theta, LayerModel::EventAdditive).unwrap();
        let se = multilayer_derivative(3, 4, theta, LayerModel::StateEvolution).unwrap();
        assert_relative_eq!(
            ea,
            4.0 * d_single(4, 4.0 * theta).unwrap(),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            se,
            2.0 * d_single(4, 4.0 * theta).unwrap() + d_single(4, 8.0 * theta).unwrap(),
            max_relative = 1e-14
        );
        assert_eq!(layer_twist_multipliers(4), vec![1, 2, 2, 1]);
        assert!(multilayer_derivative(1, 4, 0.1f64, LayerModel::EventAdditive).is_err());
    }

    #[test]
    fn three_layer_six_qubit_optima() {
        let ea = layered_optimum::<f64>(3, 6, LayerModel::EventAdditive).unwrap();
        let se = layered_optimum::<f64>(3, 6, LayerModel::StateEvolution).unwrap();
        // event-additive peaks where each edge echo peaks
        assert_abs_diff_eq!(ea.theta, theta_opt::<f64>(6, 6).unwrap(), epsilon = 1e-9);
        assert_relative_eq!(
            ea.deriv,
            4.0 * d_single(6, 0.5f64.atan()).unwrap(),
            max_relative = 1e-9
        );
        // the doubled interior twist peaks earlier and lower
        assert!(se.theta < ea.theta);
        assert!(se.deriv < ea.deriv);
    }

    #[test]
    fn display_expression_limit() {
        let v: f64 = ratio_display_expression(4, 100);
        // approaches 1/sqrt(L) only loosely; the verbatim value is reported
        assert!(v.is_finite());
        let r2: f64 = ratio_display_expression(2, 1_000_000);
        assert_relative_eq!(r2, 2f64.sqrt() / (1.0 - 0.5), max_relative = 1e-5);
    }

    #[test]
    fn two_layer_ratio_against_reservoir() {
        let r = ratio_qnn_qrc::<f64>(2, 16, LayerModel::StateEvolution, Convention::Css).unwrap();
        assert_relative_eq!(
            r.delta_phi_ratio * r.derivative_ratio,
            1.0,
            max_relative = 1e-12
        );
        assert_abs_diff_eq!(
            r.qrc.theta,
            theta_opt::<f64>(32, 1).unwrap(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            r.qnn.theta,
            theta_opt::<f64>(16, 16).unwrap(),
            epsilon = 1e-9
        );
        // sqrt(2)·N_l^{3/2} versus N_l^{3/2} asymptotically
        assert!(r.derivative_ratio > 0.6 && r.derivative_ratio < 0.8);
    }

    #[test]
    fn alpha_and_counts() {
        let a = ArchitectureParams::Qnn { n_in: 4, n_out: 2 };
        assert_eq!(a.alpha::<f64>(), Some(0.5));
        assert_eq!(a.total_qubits(), 6);
        assert_eq!(ArchitectureParams::Qrc { n: 5 }.alpha::<f64>(), None);
        assert_eq!(ArchitectureParams::Qrc { n: 5 }.n_out(), 0);
        assert!(ArchitectureParams::Layered { layers: 1, n_l: 3 }
            .validate()
            .is_err());
        assert!(ArchitectureParams::Qnn { n_in: 0, n_out: 3 }
            .validate()
            .is_err());
    }
}

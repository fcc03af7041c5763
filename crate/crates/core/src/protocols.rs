//! Twist / encode / untwist echoes on each architecture, their linear
//! response, and the optimal twist angle.
//!
//! The idealized echo never entangles different blocks: every twist is a
//! block-local `exp(-i·a·θ·S_z²)` whose acceleration `a` is the size of the
//! steering block, and the encoding generator is a sum of block-local spins.
//! Runs therefore act on a [`MultiBlockState`] block by block.

use std::fmt;
use std::str::FromStr;

use crate::analytic::{
    analytic_optimum, block_response, delta_sy0, layer_twist_multipliers, sensitivity, theta_opt,
    ArchitectureParams, Convention, LayerModel,
};
use crate::collective::{Axis, BlockState, MultiBlockState};
use crate::error::{Error, Result};
use crate::optimize::golden_max;
use crate::scalar::{count, lit, Real};

/// Ordering of the squeezing stages.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Stages one after another, reversed in mirror order.
    Sequential,
    /// All twists applied at once.
    Simultaneous,
    /// Only the input block is twisted (by the outputs) and read out; the
    /// outputs are spectators.
    Steered,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sequential => "sequential",
            Mode::Simultaneous => "simultaneous",
            Mode::Steered => "steered",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sequential" => Ok(Mode::Sequential),
            "simultaneous" => Ok(Mode::Simultaneous),
            "steered" => Ok(Mode::Steered),
            other => Err(Error::Domain(format!("unknown mode '{other}'"))),
        }
    }
}

/// Mode an architecture runs in unless told otherwise.
pub fn default_mode(arch: &ArchitectureParams) -> Mode {
    match arch {
        ArchitectureParams::Qrc { .. } => Mode::Simultaneous,
        ArchitectureParams::Perceptron { .. } => Mode::Steered,
        ArchitectureParams::Qnn { .. } | ArchitectureParams::Layered { .. } => Mode::Sequential,
    }
}

/// Full description of one echo experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolSpec<T> {
    pub arch: ArchitectureParams,
    pub theta: T,
    pub phi: T,
    pub mode: Mode,
    pub model: LayerModel,
    pub encoding_axis: Axis,
    /// Encode on every layer of a stack, or only on the first.
    pub encode_all_layers: bool,
    /// Largest admissible `|φ|`.
    pub phi_guard: T,
    /// Coarse finite-difference step in `φ`.
    pub fd_step: T,
}

impl<T: Real> ProtocolSpec<T> {
    pub fn new(arch: ArchitectureParams, theta: T) -> Self {
        Self {
            arch,
            theta,
            phi: T::zero(),
            mode: default_mode(&arch),
            model: LayerModel::StateEvolution,
            encoding_axis: Axis::Y,
            encode_all_layers: true,
            phi_guard: lit(0.1),
            fd_step: lit(1e-3),
        }
    }

    pub fn with_theta(mut self, theta: T) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_phi(mut self, phi: T) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_model(mut self, model: LayerModel) -> Self {
        self.model = model;
        self
    }

    pub fn with_encoding_axis(mut self, axis: Axis) -> Self {
        self.encoding_axis = axis;
        self
    }

    pub fn with_fd_step(mut self, step: T) -> Self {
        self.fd_step = step;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.arch.validate()?;
        if !self.theta.is_finite() || self.theta < T::zero() {
            return Err(Error::InvalidSpec(format!(
                "twist angle must be >= 0 (got {})",
                self.theta
            )));
        }
        if !self.phi.is_finite() || self.phi.abs() >= self.phi_guard {
            return Err(Error::InvalidSpec(format!(
                "|phi| = {} leaves the linear-response regime (guard {})",
                self.phi.abs(),
                self.phi_guard
            )));
        }
        if !(self.fd_step > T::zero()) || self.fd_step >= self.phi_guard {
            return Err(Error::InvalidSpec(format!(
                "bad finite-difference step {}",
                self.fd_step
            )));
        }
        let mode_ok = match self.arch {
            ArchitectureParams::Qrc { .. } => self.mode == Mode::Simultaneous,
            ArchitectureParams::Perceptron { .. } => self.mode == Mode::Steered,
            ArchitectureParams::Qnn { .. } => true,
            ArchitectureParams::Layered { .. } => self.mode != Mode::Steered,
        };
        if !mode_ok {
            return Err(Error::InvalidSpec(format!(
                "mode {} is not available for {}",
                self.mode,
                self.arch.kind()
            )));
        }
        Ok(())
    }

    /// Largest acceleration any block experiences.
    pub fn max_accel(&self) -> usize {
        self.plan()
            .blocks
            .iter()
            .map(|b| b.twists.iter().sum::<usize>())
            .max()
            .unwrap_or(1)
            .max(1)
    }

    fn plan(&self) -> EchoPlan {
        EchoPlan::physical(self)
    }
}

/// Per-block schedule of an echo.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockPlan {
    pub n: usize,
    /// Accelerations of the successive twist stages acting on this block.
    pub twists: Vec<usize>,
    pub encoded: bool,
}

/// Block layout and twist order of an echo.
#[derive(Clone, Debug, PartialEq)]
pub struct EchoPlan {
    pub blocks: Vec<BlockPlan>,
    /// `(block, accel)` in forward time order.
    pub stages: Vec<(usize, usize)>,
}

impl EchoPlan {
    fn physical<T: Real>(spec: &ProtocolSpec<T>) -> Self {
        let block = |n, twists: Vec<usize>, encoded| BlockPlan { n, twists, encoded };
        match (spec.arch, spec.mode) {
            (ArchitectureParams::Qrc { n }, _) => Self::from_blocks(vec![block(n, vec![1], true)]),
            (ArchitectureParams::Perceptron { n_in }, _) => {
                Self::from_blocks(vec![block(n_in, vec![1], true), block(1, vec![], false)])
            }
            (ArchitectureParams::Qnn { n_in, n_out }, Mode::Steered) => Self::from_blocks(vec![
                block(n_in, vec![n_out], true),
                block(n_out, vec![], false),
            ]),
            (ArchitectureParams::Qnn { n_in, n_out }, _) => Self::from_blocks(vec![
                block(n_in, vec![n_out], true),
                block(n_out, vec![n_in], true),
            ]),
            (ArchitectureParams::Layered { layers, n_l }, _) => {
                // layer i+1 steers layer i, then layer i steers layer i+1
                let mut stages = Vec::with_capacity(2 * (layers - 1));
                for i in 0..layers - 1 {
                    stages.push((i, n_l));
                    stages.push((i + 1, n_l));
                }
                let blocks = layer_twist_multipliers(layers)
                    .into_iter()
                    .enumerate()
                    .map(|(i, k)| block(n_l, vec![n_l; k], spec.encode_all_layers || i == 0))
                    .collect();
                Self { blocks, stages }
            }
        }
    }

    /// Every squeezing event of a stack scored as an independent echo on a
    /// copy of the layer it twists.
    fn event_scoring<T: Real>(spec: &ProtocolSpec<T>) -> Self {
        let physical = Self::physical(spec);
        let blocks = physical
            .stages
            .iter()
            .filter(|(layer, _)| physical.blocks[*layer].encoded)
            .map(|&(layer, accel)| BlockPlan {
                n: physical.blocks[layer].n,
                twists: vec![accel],
                encoded: true,
            })
            .collect();
        Self::from_blocks(blocks)
    }

    fn from_blocks(blocks: Vec<BlockPlan>) -> Self {
        let stages = blocks
            .iter()
            .enumerate()
            .flat_map(|(i, b)| b.twists.iter().map(move |&a| (i, a)))
            .collect();
        Self { blocks, stages }
    }

    /// Per-block total twist acceleration.
    pub fn total_twists(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.twists.iter().sum()).collect()
    }

    pub fn total_qubits(&self) -> usize {
        self.blocks.iter().map(|b| b.n).sum()
    }

    fn scoring<T: Real>(spec: &ProtocolSpec<T>) -> Self {
        match (spec.arch, spec.model) {
            (ArchitectureParams::Layered { .. }, LayerModel::EventAdditive) => {
                Self::event_scoring(spec)
            }
            _ => Self::physical(spec),
        }
    }

    fn execute<T: Real>(&self, theta: T, phi: T, mode: Mode, axis: Axis) -> Result<EchoOutcome<T>> {
        let mut blocks = self
            .blocks
            .iter()
            .map(|b| BlockState::css_x(b.n))
            .collect::<Result<Vec<_>>>()?;
        match mode {
            Mode::Simultaneous => {
                let total = self.total_twists();
                for (state, &a) in blocks.iter_mut().zip(&total) {
                    *state = state.apply_oat(theta, a);
                }
                self.encode(&mut blocks, phi, axis);
                for (state, &a) in blocks.iter_mut().zip(&total) {
                    *state = state.apply_oat(-theta, a);
                }
            }
            Mode::Sequential | Mode::Steered => {
                for &(i, a) in &self.stages {
                    blocks[i] = blocks[i].apply_oat(theta, a);
                }
                self.encode(&mut blocks, phi, axis);
                for &(i, a) in self.stages.iter().rev() {
                    blocks[i] = blocks[i].apply_oat(-theta, a);
                }
            }
        }
        let readout = self
            .blocks
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.encoded.then_some(i))
            .collect();
        Ok(EchoOutcome {
            state: MultiBlockState::new(blocks)?,
            readout,
        })
    }

    fn encode<T: Real>(&self, blocks: &mut [BlockState<T>], phi: T, axis: Axis) {
        if phi == T::zero() {
            return;
        }
        for (state, plan) in blocks.iter_mut().zip(&self.blocks) {
            if plan.encoded {
                *state = state.apply_rotation(axis, phi);
            }
        }
    }
}

/// Final state of an echo together with the blocks that are read out.
#[derive(Clone, Debug, PartialEq)]
pub struct EchoOutcome<T> {
    pub state: MultiBlockState<T>,
    pub readout: Vec<usize>,
}

impl<T: Real> EchoOutcome<T> {
    /// `⟨S_y⟩` summed over read-out blocks.
    pub fn readout_mean(&self) -> T {
        self.readout.iter().fold(T::zero(), |acc, &i| {
            acc + self.state.blocks()[i].spin_mean(Axis::Y)
        })
    }

    pub fn readout_variance(&self) -> T {
        self.readout.iter().fold(T::zero(), |acc, &i| {
            acc + self.state.blocks()[i].spin_variance(Axis::Y)
        })
    }

    pub fn readout_qubits(&self) -> usize {
        self.readout
            .iter()
            .map(|&i| self.state.blocks()[i].n_qubits())
            .sum()
    }
}

/// Runs the physical echo described by `spec`.
pub fn run<T: Real>(spec: &ProtocolSpec<T>) -> Result<EchoOutcome<T>> {
    spec.validate()?;
    EchoPlan::physical(spec).execute(spec.theta, spec.phi, spec.mode, spec.encoding_axis)
}

/// Runs the echo used for scoring the readout. Identical to [`run`] except
/// for the event-additive stack model, where every squeezing event becomes
/// its own single-layer echo.
pub fn run_scoring<T: Real>(spec: &ProtocolSpec<T>) -> Result<EchoOutcome<T>> {
    spec.validate()?;
    EchoPlan::scoring(spec).execute(spec.theta, spec.phi, spec.mode, spec.encoding_axis)
}

pub fn run_qrc<T: Real>(n: usize, theta: T, phi: T) -> Result<MultiBlockState<T>> {
    let spec = ProtocolSpec::new(ArchitectureParams::Qrc { n }, theta).with_phi(phi);
    Ok(run(&spec)?.state)
}

pub fn run_perceptron<T: Real>(n_in: usize, theta: T, phi: T) -> Result<MultiBlockState<T>> {
    let spec = ProtocolSpec::new(ArchitectureParams::Perceptron { n_in }, theta).with_phi(phi);
    Ok(run(&spec)?.state)
}

pub fn run_qnn_2layer<T: Real>(
    n_in: usize,
    n_out: usize,
    theta: T,
    phi: T,
    mode: Mode,
) -> Result<MultiBlockState<T>> {
    let spec = ProtocolSpec::new(ArchitectureParams::Qnn { n_in, n_out }, theta)
        .with_phi(phi)
        .with_mode(mode);
    Ok(run(&spec)?.state)
}

/// `L`-layer echo. For [`LayerModel::EventAdditive`] the returned blocks are
/// the per-event scoring echoes, one per squeezing event.
pub fn run_qnn_l<T: Real>(
    layers: usize,
    n_l: usize,
    theta: T,
    phi: T,
    model: LayerModel,
) -> Result<MultiBlockState<T>> {
    let spec = ProtocolSpec::new(ArchitectureParams::Layered { layers, n_l }, theta)
        .with_phi(phi)
        .with_model(model);
    Ok(run_scoring(&spec)?.state)
}

/// Schedule executed by [`run_scoring`].
pub fn scoring_plan<T: Real>(spec: &ProtocolSpec<T>) -> Result<EchoPlan> {
    spec.validate()?;
    Ok(EchoPlan::scoring(spec))
}

/// Readout `⟨S_y⟩` of the scoring echo at encoding angle `phi`.
pub fn readout_at<T: Real>(spec: &ProtocolSpec<T>, phi: T) -> Result<T> {
    let mut s = spec.clone();
    s.phi = phi;
    let v = run_scoring(&s)?.readout_mean();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite("readout expectation"))
    }
}

/// Finite-difference slope at the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearResponse<T> {
    /// Richardson-extrapolated slope.
    pub value: T,
    /// Central difference with step `h`.
    pub coarse: T,
    /// Central difference with step `h/2`.
    pub fine: T,
    /// `coarse` and `fine` agree to relative `1e-6`.
    pub stable: bool,
}

/// Central differences of `f` at `0` with steps `h` and `h/2`, combined by
/// Richardson extrapolation.
pub fn central_slope<T: Real>(
    mut f: impl FnMut(T) -> Result<T>,
    h: T,
) -> Result<LinearResponse<T>> {
    let two: T = lit(2.0);
    let coarse = (f(h)? - f(-h)?) / (two * h);
    let hh = h / two;
    let fine = (f(hh)? - f(-hh)?) / (two * hh);
    let value = (lit::<T>(4.0) * fine - coarse) / lit(3.0);
    if !value.is_finite() {
        return Err(Error::NonFinite("linear response"));
    }
    let scale = value.abs();
    let stable = (coarse - fine).abs() <= lit::<T>(1e-6) * scale || scale == T::zero();
    Ok(LinearResponse {
        value,
        coarse,
        fine,
        stable,
    })
}

/// `∂φ⟨S_y⟩` at `φ = 0`.
pub fn linear_response<T: Real>(spec: &ProtocolSpec<T>) -> Result<LinearResponse<T>> {
    spec.validate()?;
    central_slope(|phi| readout_at(spec, phi), spec.fd_step)
}

/// Closed-form counterpart of [`linear_response`]. Only defined for the
/// `y` encoding axis.
pub fn analytic_derivative<T: Real>(spec: &ProtocolSpec<T>) -> Option<T> {
    if spec.encoding_axis != Axis::Y || spec.validate().is_err() {
        return None;
    }
    let plan = EchoPlan::scoring(spec);
    Some(
        plan.blocks
            .iter()
            .filter(|b| b.encoded)
            .fold(T::zero(), |acc, b| {
                let accel: usize = b.twists.iter().sum();
                acc + block_response(b.n, count::<T>(accel) * spec.theta)
            }),
    )
}

/// Closed-form optimal twist, when one exists in the first lobe.
pub fn analytic_theta_opt<T: Real>(spec: &ProtocolSpec<T>) -> Option<T> {
    if spec.encoding_axis != Axis::Y {
        return None;
    }
    match (spec.arch, spec.mode) {
        (ArchitectureParams::Qrc { n }, _) => theta_opt(n, 1).ok(),
        (ArchitectureParams::Perceptron { n_in }, _) => theta_opt(n_in, 1).ok(),
        (ArchitectureParams::Qnn { n_in, n_out }, Mode::Steered) => theta_opt(n_in, n_out).ok(),
        (ArchitectureParams::Qnn { n_in, n_out }, _) if n_in == n_out => theta_opt(n_in, n_in).ok(),
        _ => analytic_optimum(
            &spec.arch,
            |t| {
                analytic_derivative(&spec.clone().with_theta(t))
                    .ok_or(Error::InvalidSpec("no closed form".into()))
            },
            spec.max_accel(),
        )
        .ok()
        .map(|o| o.theta),
    }
}

/// Numerically located optimum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaOpt<T> {
    pub theta: T,
    pub deriv: T,
}

/// Default search bracket `(0, π/(2·a_max))`: the first lobe of the response.
pub fn default_theta_range<T: Real>(spec: &ProtocolSpec<T>) -> (T, T) {
    (T::zero(), T::FRAC_PI_2() / count::<T>(spec.max_accel()))
}

/// Golden-section maximization of `|∂φ⟨S_y⟩|` over `θ` to absolute tolerance
/// `1e-7`. `spec.theta` is ignored.
pub fn find_theta_opt<T: Real>(
    spec: &ProtocolSpec<T>,
    range: Option<(T, T)>,
) -> Result<ThetaOpt<T>> {
    let (lo_max, hi_max) = default_theta_range(spec);
    let (lo, hi) = range.unwrap_or((lo_max, hi_max));
    let slack: T = lit(1e-12);
    if lo < lo_max || hi > hi_max + slack || !(lo < hi) {
        return Err(Error::Domain(format!(
            "theta range [{lo}, {hi}] must lie inside ({lo_max}, {hi_max}]"
        )));
    }
    let mut probe = spec.clone().with_theta(lo);
    probe.validate()?;
    let best = golden_max(
        |t| {
            probe.theta = t;
            Ok(linear_response(&probe)?.value.abs())
        },
        lo,
        hi,
        T::tol(1e-7),
    )?;
    let deriv = linear_response(&spec.clone().with_theta(best.at))?.value;
    Ok(ThetaOpt {
        theta: best.at,
        deriv,
    })
}

/// Numeric results paired with their closed-form counterparts.
#[derive(Clone, Debug, PartialEq)]
pub struct SensitivityReport<T> {
    /// `⟨S_y⟩` at the spec's `φ`.
    pub exp_sy: T,
    /// Readout variance at `φ = 0`.
    pub var_sy0: T,
    pub deriv_numeric: T,
    pub deriv_analytic: Option<T>,
    pub delta_phi_css: T,
    pub delta_phi_paper: T,
    pub theta_opt_numeric: Option<T>,
    pub theta_opt_analytic: Option<T>,
    /// Qubits contributing to the readout.
    pub sensing_qubits: usize,
    pub response_stable: bool,
}

/// Report at the spec's own `θ`, without the optimum search.
pub fn point_report<T: Real>(spec: &ProtocolSpec<T>) -> Result<SensitivityReport<T>> {
    spec.validate()?;
    let exp_sy = readout_at(spec, spec.phi)?;
    let rest = run(&spec.clone().with_phi(T::zero()))?;
    let var_sy0 = rest.readout_variance();
    let sensing_qubits = rest.readout_qubits();
    let response = linear_response(spec)?;
    let deriv = response.value;
    let delta_phi = |noise: T| match sensitivity(deriv, noise) {
        Err(Error::UndefinedSensitivity) => Ok(T::infinity()),
        other => other,
    };
    Ok(SensitivityReport {
        exp_sy,
        var_sy0,
        deriv_numeric: deriv,
        deriv_analytic: analytic_derivative(spec),
        delta_phi_css: delta_phi(var_sy0.sqrt())?,
        delta_phi_paper: delta_phi(delta_sy0(sensing_qubits, Convention::Paper))?,
        theta_opt_numeric: None,
        theta_opt_analytic: None,
        sensing_qubits,
        response_stable: response.stable,
    })
}

/// [`point_report`] plus numeric and closed-form optimal twists.
pub fn full_report<T: Real>(spec: &ProtocolSpec<T>) -> Result<SensitivityReport<T>> {
    let mut report = point_report(spec)?;
    report.theta_opt_numeric = Some(find_theta_opt(spec, None)?.theta);
    report.theta_opt_analytic = analytic_theta_opt(spec);
    Ok(report)
}

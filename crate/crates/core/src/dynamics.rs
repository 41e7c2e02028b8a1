//! Numerical harness: forced flows, Poincaré maps, subharmonic shooting,
//! saddle-node continuation, invariant manifolds and separatrix splitting.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::FourierSeries;
use crate::normalform::Sign;
use crate::ode::{self, StepView, Tolerances, Variational, VectorField};
use crate::orbits::ScaledSystem;
use crate::pendulum::{self, PendulumParams};

/// A vector field with a periodic time dependence; `t = 0` is the section.
pub trait ForcedSystem: VectorField {
    fn forcing_period(&self) -> f64;
}

/// Scaled planar system
/// `ζ̇₁ = ζ₂`, `ζ̇₂ = lζ₁ + qζ₁³ + ε̂(ν̂ζ₂ + s₂ζ₁²ζ₂ + Δh(ω̂t))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaledFlow {
    pub system: ScaledSystem,
    pub eps_hat: f64,
    pub nu_hat: f64,
    pub s2: Sign,
    pub delta_big: f64,
    pub omega_hat: f64,
    pub h: FourierSeries,
}

impl ScaledFlow {
    pub fn validate(&self) -> Result<()> {
        let vals = [self.eps_hat, self.nu_hat, self.delta_big, self.omega_hat];
        if vals.iter().any(|v| !v.is_finite()) {
            return crate::error::domain("scaled flow parameters must be finite");
        }
        if !(self.omega_hat > 0.0) {
            return crate::error::domain(format!("omega_hat must be positive, got {}", self.omega_hat));
        }
        if self.eps_hat < 0.0 {
            return crate::error::domain(format!("eps_hat must be non-negative, got {}", self.eps_hat));
        }
        Ok(())
    }

    pub fn with_nu_hat(&self, nu_hat: f64) -> Self {
        Self { nu_hat, ..self.clone() }
    }
}

impl VectorField for ScaledFlow {
    fn dim(&self) -> usize {
        2
    }

    fn eval(&self, t: f64, x: &[f64], out: &mut [f64]) {
        let (l, q) = self.system.coefficients();
        let (z1, z2) = (x[0], x[1]);
        out[0] = z2;
        out[1] = l * z1
            + q * z1 * z1 * z1
            + self.eps_hat * (self.nu_hat * z2 + self.s2.f() * z1 * z1 * z2 + self.delta_big * self.h.eval(self.omega_hat * t));
    }

    fn jacobian(&self, _t: f64, x: &[f64], out: &mut [f64]) {
        let (l, q) = self.system.coefficients();
        let (z1, z2) = (x[0], x[1]);
        out[0] = 0.0;
        out[1] = 1.0;
        out[2] = l + 3.0 * q * z1 * z1 + 2.0 * self.eps_hat * self.s2.f() * z1 * z2;
        out[3] = self.eps_hat * (self.nu_hat + self.s2.f() * z1 * z1);
    }

    fn divergence(&self, _t: f64, x: &[f64]) -> f64 {
        self.eps_hat * (self.nu_hat + self.s2.f() * x[0] * x[0])
    }
}

impl ForcedSystem for ScaledFlow {
    fn forcing_period(&self) -> f64 {
        2.0 * PI / self.omega_hat
    }
}

/// The three-dimensional pendulum equations in original time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PendulumFlow {
    pub params: PendulumParams,
}

impl VectorField for PendulumFlow {
    fn dim(&self) -> usize {
        3
    }

    fn eval(&self, t: f64, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&pendulum::vector_field(&self.params, t, [x[0], x[1], x[2]]));
    }

    fn jacobian(&self, _t: f64, x: &[f64], out: &mut [f64]) {
        let j = pendulum::vector_field_jacobian(&self.params, [x[0], x[1], x[2]]);
        for r in 0..3 {
            out[r * 3..r * 3 + 3].copy_from_slice(&j[r]);
        }
    }

    fn divergence(&self, _t: f64, _x: &[f64]) -> f64 {
        -self.params.delta0 - self.params.alpha
    }
}

impl ForcedSystem for PendulumFlow {
    fn forcing_period(&self) -> f64 {
        2.0 * PI / self.params.omega
    }
}

/// `m`-fold Poincaré map `x ↦ φ(mT; 0, x)`.
pub fn poincare_map<F: ForcedSystem + ?Sized>(field: &F, x: &[f64], m: u32, tol: Tolerances) -> Result<Vec<f64>> {
    ode::integrate(field, x, 0.0, m as f64 * field.forcing_period(), tol)
}

/// Inverse `m`-fold map, by backward integration.
pub fn inverse_poincare_map<F: ForcedSystem + ?Sized>(field: &F, x: &[f64], m: u32, tol: Tolerances) -> Result<Vec<f64>> {
    ode::integrate(field, x, 0.0, -(m as f64) * field.forcing_period(), tol)
}

/// Image, derivative and `∫₀^{mT} div F dt` of the `m`-fold map.
pub struct MapLinearization {
    pub image: Vec<f64>,
    pub derivative: DMatrix<f64>,
    pub divergence_integral: f64,
}

pub fn poincare_map_linearized<F: ForcedSystem + ?Sized>(
    field: &F,
    x: &[f64],
    m: u32,
    tol: Tolerances,
) -> Result<MapLinearization> {
    let n = field.dim();
    let mut y0 = vec![0.0; n + n * n + 1];
    y0[..n].copy_from_slice(x);
    for i in 0..n {
        y0[n + i * n + i] = 1.0;
    }
    let var = Variational { field };
    let y = ode::integrate(&var, &y0, 0.0, m as f64 * field.forcing_period(), tol)?;
    Ok(MapLinearization {
        image: y[..n].to_vec(),
        derivative: DMatrix::from_row_slice(n, n, &y[n..n + n * n]),
        divergence_integral: y[n + n * n],
    })
}

/// Samples the trajectory from `x0` at `samples + 1` equally spaced times in `[0, t_end]`.
pub fn sample_trajectory<F: VectorField + ?Sized>(
    field: &F,
    x0: &[f64],
    t_end: f64,
    samples: usize,
    tol: Tolerances,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let samples = samples.max(1);
    let dt = t_end / samples as f64;
    let mut out = Vec::with_capacity(samples + 1);
    let mut x = x0.to_vec();
    out.push((0.0, x.clone()));
    for i in 0..samples {
        let (ta, tb) = (i as f64 * dt, if i + 1 == samples { t_end } else { (i + 1) as f64 * dt });
        x = ode::integrate(field, &x, ta, tb, tol)?;
        out.push((tb, x.clone()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitStability {
    Sink,
    Source,
    Saddle,
    CenterLike,
}

impl OrbitStability {
    pub fn as_str(self) -> &'static str {
        match self {
            OrbitStability::Sink => "sink",
            OrbitStability::Source => "source",
            OrbitStability::Saddle => "saddle",
            OrbitStability::CenterLike => "center-like",
        }
    }
}

/// Multipliers within this distance of the unit circle count as neutral.
pub const NEUTRAL_MULTIPLIER_TOL: f64 = 1e-7;

pub fn classify_multipliers(multipliers: &[(f64, f64)]) -> OrbitStability {
    let mods: Vec<f64> = multipliers.iter().map(|&(re, im)| re.hypot(im)).collect();
    if mods.iter().any(|r| (r - 1.0).abs() < NEUTRAL_MULTIPLIER_TOL) {
        return OrbitStability::CenterLike;
    }
    let inside = mods.iter().filter(|&&r| r < 1.0).count();
    if inside == mods.len() {
        OrbitStability::Sink
    } else if inside == 0 {
        OrbitStability::Source
    } else {
        OrbitStability::Saddle
    }
}

fn eigenvalues(a: &DMatrix<f64>) -> Vec<(f64, f64)> {
    let mut ev: Vec<(f64, f64)> = a.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
    ev.sort_by(|p, q| p.0.hypot(p.1).total_cmp(&q.0.hypot(q.1)).then(p.1.total_cmp(&q.1)));
    ev
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingOptions {
    /// Converged when `‖P^m(x) − x‖∞` falls below this.
    pub residual_tol: f64,
    pub max_iterations: usize,
    /// Integration tolerances used inside the shooting loop.
    pub integration: Tolerances,
    /// Upper bound on the length of one shooting segment.
    pub max_segment_time: f64,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self { residual_tol: 1e-10, max_iterations: 50, integration: Tolerances { abs: 1e-12, rel: 1e-12 }, max_segment_time: 1.0 }
    }
}

/// A fixed point of the `m`-fold Poincaré map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicOrbit {
    pub state: Vec<f64>,
    pub m: u32,
    pub period: f64,
    /// Floquet multipliers `(re, im)`, sorted by modulus.
    pub multipliers: Vec<(f64, f64)>,
    pub stability: OrbitStability,
    pub residual: f64,
    pub iterations: usize,
    /// `|ln|det DP| − ∫ div F dt|`.
    pub liouville_defect: f64,
    #[serde(skip)]
    pub monodromy: Vec<f64>,
}

impl PeriodicOrbit {
    pub fn monodromy_matrix(&self) -> DMatrix<f64> {
        let n = self.state.len();
        DMatrix::from_row_slice(n, n, &self.monodromy)
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Flow and fundamental matrix over `[ta, tb]`, plus `∫ div F dt`.
fn segment_linearized<F: VectorField + ?Sized>(
    field: &F,
    x: &[f64],
    ta: f64,
    tb: f64,
    tol: Tolerances,
) -> Result<(Vec<f64>, DMatrix<f64>, f64)> {
    let n = field.dim();
    let mut y0 = vec![0.0; n + n * n + 1];
    y0[..n].copy_from_slice(x);
    for i in 0..n {
        y0[n + i * n + i] = 1.0;
    }
    let y = ode::integrate(&Variational { field }, &y0, ta, tb, tol)?;
    Ok((y[..n].to_vec(), DMatrix::from_row_slice(n, n, &y[n..n + n * n]), y[n + n * n]))
}

/// Segment end points `t₀ = 0 < … < t_N = mT`.
fn segment_times(total: f64, max_len: f64) -> Vec<f64> {
    let count = ((total / max_len).ceil() as usize).max(1);
    (0..=count).map(|i| if i == count { total } else { total * i as f64 / count as f64 }).collect()
}

/// Stacked multiple-shooting defects `φ(t_{i+1}; t_i, x_i) − x_{i+1}` (indices mod N).
fn shooting_defects<F: ForcedSystem + ?Sized>(field: &F, nodes: &[Vec<f64>], times: &[f64], tol: Tolerances) -> Result<Vec<f64>> {
    let count = nodes.len();
    let mut out = Vec::with_capacity(count * field.dim());
    for i in 0..count {
        let y = ode::integrate(field, &nodes[i], times[i], times[i + 1], tol)?;
        out.extend(y.iter().zip(&nodes[(i + 1) % count]).map(|(a, b)| a - b));
    }
    Ok(out)
}

/// Newton multiple shooting for a period-`mT` orbit starting from `guess`.
///
/// The period is split into segments no longer than `max_segment_time`; interior
/// nodes are seeded by integrating the guess, falling back to the previous node
/// when that integration fails or grows past `10 (1 + ‖guess‖)`.
pub fn find_subharmonic<F: ForcedSystem + ?Sized>(
    field: &F,
    m: u32,
    guess: &[f64],
    opts: &ShootingOptions,
) -> Result<PeriodicOrbit> {
    let times = shooting_grid(field, m, opts)?;
    check_dim(field, guess)?;
    let tol = opts.integration;
    let mut nodes = vec![guess.to_vec()];
    for i in 1..times.len() - 1 {
        let prev = nodes[i - 1].clone();
        let next = match ode::integrate(field, &prev, times[i - 1], times[i], tol) {
            Ok(y) if inf_norm(&y) < 10.0 * (1.0 + inf_norm(guess)) => y,
            _ => prev,
        };
        nodes.push(next);
    }
    shoot(field, m, nodes, &times, opts)
}

/// As [`find_subharmonic`], with the shooting nodes seeded from `path(t)`, `t ∈ [0, mT)`.
/// A constant path suits orbits near an equilibrium.
pub fn find_subharmonic_from_path<F: ForcedSystem + ?Sized>(
    field: &F,
    m: u32,
    path: &dyn Fn(f64) -> Vec<f64>,
    opts: &ShootingOptions,
) -> Result<PeriodicOrbit> {
    let times = shooting_grid(field, m, opts)?;
    let nodes: Vec<Vec<f64>> = times[..times.len() - 1].iter().map(|&t| path(t)).collect();
    for x in &nodes {
        check_dim(field, x)?;
    }
    shoot(field, m, nodes, &times, opts)
}

fn check_dim<F: VectorField + ?Sized>(field: &F, x: &[f64]) -> Result<()> {
    if x.len() != field.dim() {
        return crate::error::domain(format!("guess has dimension {}, expected {}", x.len(), field.dim()));
    }
    Ok(())
}

fn shooting_grid<F: ForcedSystem + ?Sized>(field: &F, m: u32, opts: &ShootingOptions) -> Result<Vec<f64>> {
    if m == 0 {
        return crate::error::domain("m must be positive");
    }
    if !(opts.max_segment_time > 0.0) {
        return crate::error::domain("max_segment_time must be positive");
    }
    Ok(segment_times(m as f64 * field.forcing_period(), opts.max_segment_time))
}

fn shoot<F: ForcedSystem + ?Sized>(
    field: &F,
    m: u32,
    mut nodes: Vec<Vec<f64>>,
    times: &[f64],
    opts: &ShootingOptions,
) -> Result<PeriodicOrbit> {
    let n = field.dim();
    let tol = opts.integration;
    let period = times[times.len() - 1];
    let count = nodes.len();
    let dim = n * count;
    let mut iterations = 0;
    loop {
        let segs: Vec<Result<(Vec<f64>, DMatrix<f64>, f64)>> =
            (0..count).map(|i| segment_linearized(field, &nodes[i], times[i], times[i + 1], tol)).collect();
        let segs: Vec<(Vec<f64>, DMatrix<f64>, f64)> = segs.into_iter().collect::<Result<_>>()?;
        let mut f = Vec::with_capacity(dim);
        for i in 0..count {
            f.extend(segs[i].0.iter().zip(&nodes[(i + 1) % count]).map(|(a, b)| a - b));
        }
        let res_norm = inf_norm(&f);
        if !res_norm.is_finite() {
            return Err(Error::NewtonDivergence { iterations, residual: res_norm });
        }
        if res_norm < opts.residual_tol {
            let mut mono = DMatrix::identity(n, n);
            let mut div = 0.0;
            let mut log_det = 0.0;
            for seg in &segs {
                mono = &seg.1 * mono;
                div += seg.2;
                log_det += seg.1.determinant().abs().ln();
            }
            let multipliers = eigenvalues(&mono);
            // Per-segment determinants stay representable for strongly contracting flows.
            let liouville_defect = (log_det - div).abs();
            return Ok(PeriodicOrbit {
                stability: classify_multipliers(&multipliers),
                multipliers,
                state: nodes.swap_remove(0),
                m,
                period,
                residual: res_norm,
                iterations,
                liouville_defect,
                monodromy: mono.transpose().as_slice().to_vec(),
            });
        }
        if iterations >= opts.max_iterations {
            return Err(Error::NewtonDivergence { iterations, residual: res_norm });
        }
        iterations += 1;
        // Block-cyclic Jacobian: Φ_i on the diagonal, −I on the super-diagonal.
        let mut a = DMatrix::zeros(dim, dim);
        for i in 0..count {
            let j = (i + 1) % count;
            a.view_mut((i * n, i * n), (n, n)).copy_from(&segs[i].1);
            for d in 0..n {
                a[(i * n + d, j * n + d)] -= 1.0;
            }
        }
        let rhs = DVector::from_iterator(dim, f.iter().map(|v| -v));
        let step = a
            .lu()
            .solve(&rhs)
            .ok_or(Error::NewtonDivergence { iterations, residual: res_norm })?;
        let trial_nodes = |nodes: &[Vec<f64>], lambda: f64| -> Vec<Vec<f64>> {
            (0..count).map(|i| (0..n).map(|d| nodes[i][d] + lambda * step[i * n + d]).collect()).collect()
        };
        // Backtracking on the defect norm.
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let trial = trial_nodes(&nodes, lambda);
            if let Ok(r) = shooting_defects(field, &trial, &times, tol) {
                if inf_norm(&r) < res_norm {
                    nodes = trial;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            // Near roundoff the defect may not decrease; take the full step.
            if res_norm < 1e3 * opts.residual_tol {
                nodes = trial_nodes(&nodes, 1.0);
            } else {
                return Err(Error::NewtonDivergence { iterations, residual: res_norm });
            }
        }
        if nodes.iter().any(|x| inf_norm(x) > 1e6) {
            return Err(Error::NewtonDivergence { iterations, residual: res_norm });
        }
    }
}

/// Runs shooting from every seed and keeps distinct converged orbits.
pub fn census<F: ForcedSystem + ?Sized>(
    field: &F,
    m: u32,
    seeds: &[Vec<f64>],
    opts: &ShootingOptions,
    dedup_tol: f64,
) -> Vec<PeriodicOrbit> {
    let found = par_map(seeds, |s| find_subharmonic(field, m, s, opts).ok());
    let mut out: Vec<PeriodicOrbit> = Vec::new();
    for orbit in found.into_iter().flatten() {
        let dup = out.iter().any(|o| {
            let d = o.state.iter().zip(&orbit.state).fold(0.0f64, |a, (p, q)| a.max((p - q).abs()));
            d < dedup_tol
        });
        if !dup {
            out.push(orbit);
        }
    }
    out.sort_by(|a, b| a.state[0].total_cmp(&b.state[0]).then(a.state[1].total_cmp(&b.state[1])));
    out
}

/// Time-mean and maximal deviation from it of component `i` along the orbit.
pub fn orbit_extent<F: ForcedSystem + ?Sized>(field: &F, orbit: &PeriodicOrbit, i: usize, tol: Tolerances) -> Result<(f64, f64)> {
    let samples = 256 * orbit.m as usize;
    let traj = sample_trajectory(field, &orbit.state, orbit.period, samples, tol)?;
    let vals: Vec<f64> = traj[..samples].iter().map(|(_, x)| x[i]).collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let dev = vals.iter().fold(0.0f64, |a, v| a.max((v - mean).abs()));
    Ok((mean, dev))
}

pub(crate) fn par_map<T, R, G>(items: &[T], f: G) -> Vec<R>
where
    T: Sync,
    R: Send,
    G: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

// ---------------------------------------------------------------------------
// Saddle-node continuation

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationOptions {
    pub initial_step: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
    /// Target width of the arclength bracket around the turning point.
    pub bracket_tol: f64,
    pub shooting: ShootingOptions,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.02,
            max_step: 0.1,
            min_step: 1e-7,
            max_steps: 2000,
            bracket_tol: 1e-7,
            shooting: ShootingOptions::default(),
        }
    }
}

/// A turning point of the branch of `m`-periodic orbits in the parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPoint {
    pub parameter: f64,
    pub state: Vec<f64>,
    pub multipliers: Vec<(f64, f64)>,
    /// Arclength width of the final bracket.
    pub bracket_width: f64,
    pub continuation_steps: usize,
}

struct Branch<'a, F, B: Fn(f64) -> F> {
    build: &'a B,
    m: u32,
    n: usize,
    opts: &'a ContinuationOptions,
}

impl<F: ForcedSystem, B: Fn(f64) -> F> Branch<'_, F, B> {
    /// `G(x, p) = P^m(x; p) − x` and its `n × (n + 1)` Jacobian.
    fn eval(&self, y: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let n = self.n;
        let p = y[n];
        let tol = self.opts.shooting.integration;
        let field = (self.build)(p);
        let lin = poincare_map_linearized(&field, &y[..n], self.m, tol)?;
        let g: Vec<f64> = lin.image.iter().zip(&y[..n]).map(|(a, b)| a - b).collect();
        let hp = 1e-6 * p.abs().max(1.0);
        let fp = poincare_map(&(self.build)(p + hp), &y[..n], self.m, tol)?;
        let fm = poincare_map(&(self.build)(p - hp), &y[..n], self.m, tol)?;
        let mut a = DMatrix::zeros(n, n + 1);
        for r in 0..n {
            for c in 0..n {
                a[(r, c)] = lin.derivative[(r, c)] - if r == c { 1.0 } else { 0.0 };
            }
            a[(r, n)] = (fp[r] - fm[r]) / (2.0 * hp);
        }
        Ok((g, a))
    }

    /// Unit null vector of `a` with `τ · reference > 0`.
    fn tangent(&self, a: &DMatrix<f64>, reference: &DVector<f64>) -> Result<DVector<f64>> {
        let n = self.n;
        let mut sys = DMatrix::zeros(n + 1, n + 1);
        sys.view_mut((0, 0), (n, n + 1)).copy_from(a);
        for c in 0..=n {
            sys[(n, c)] = reference[c];
        }
        let mut rhs = DVector::zeros(n + 1);
        rhs[n] = 1.0;
        let t = sys
            .lu()
            .solve(&rhs)
            .ok_or_else(|| Error::Degeneracy("singular continuation tangent system".into()))?;
        Ok(t.normalize())
    }

    /// Corrector: solve `G(y) = 0`, `τ · (y − y₀) = s` from `y₀ + sτ`.
    fn correct(&self, y0: &DVector<f64>, tau: &DVector<f64>, s: f64) -> Result<(DVector<f64>, DMatrix<f64>, usize)> {
        let n = self.n;
        let mut y = y0 + tau * s;
        for it in 0..10 {
            let (g, a) = self.eval(y.as_slice())?;
            let gn = inf_norm(&g);
            let arc = tau.dot(&(&y - y0)) - s;
            if gn < self.opts.shooting.residual_tol && arc.abs() < 1e-12 {
                return Ok((y, a, it));
            }
            let mut sys = DMatrix::zeros(n + 1, n + 1);
            sys.view_mut((0, 0), (n, n + 1)).copy_from(&a);
            for c in 0..=n {
                sys[(n, c)] = tau[c];
            }
            let mut rhs = DVector::zeros(n + 1);
            for r in 0..n {
                rhs[r] = -g[r];
            }
            rhs[n] = -arc;
            let dy = sys
                .lu()
                .solve(&rhs)
                .ok_or(Error::NewtonDivergence { iterations: it, residual: gn })?;
            y += &dy;
            if !y.iter().all(|v| v.is_finite()) {
                return Err(Error::NewtonDivergence { iterations: it, residual: gn });
            }
        }
        let (g, _) = self.eval(y.as_slice())?;
        Err(Error::NewtonDivergence { iterations: 10, residual: inf_norm(&g) })
    }
}

/// Continues the `m`-periodic orbit from `(start, p_start)` towards `p_end` and
/// locates the first turning point in the parameter.
pub fn detect_saddle_node<F, B>(
    build: B,
    m: u32,
    start: &[f64],
    p_start: f64,
    p_end: f64,
    opts: &ContinuationOptions,
) -> Result<FoldPoint>
where
    F: ForcedSystem,
    B: Fn(f64) -> F,
{
    let n = start.len();
    let br = Branch { build: &build, m, n, opts };
    let x0 = find_subharmonic(&build(p_start), m, start, &opts.shooting)?;
    let dir = (p_end - p_start).signum();
    let mut y = DVector::from_iterator(n + 1, x0.state.iter().copied().chain([p_start]));
    let (_, mut a) = br.eval(y.as_slice())?;
    let mut e = DVector::zeros(n + 1);
    e[n] = dir;
    let mut tau = br.tangent(&a, &e)?;
    let mut ds = opts.initial_step;
    let mut steps = 0;
    while steps < opts.max_steps {
        steps += 1;
        let (y1, a1, its) = match br.correct(&y, &tau, ds) {
            Ok(v) => v,
            Err(_) => {
                ds *= 0.5;
                if ds < opts.min_step {
                    return Err(Error::NoFoldInBracket { lo: p_start.min(p_end), hi: p_start.max(p_end) });
                }
                continue;
            }
        };
        let tau1 = br.tangent(&a1, &tau)?;
        if tau1[n] * tau[n] < 0.0 {
            return refine_fold(&br, &y, &tau, ds, steps);
        }
        if (y1[n] - p_end) * dir > 0.0 {
            return Err(Error::NoFoldInBracket { lo: p_start.min(p_end), hi: p_start.max(p_end) });
        }
        y = y1;
        a = a1;
        tau = tau1;
        if its <= 3 {
            ds = (ds * 1.5).min(opts.max_step);
        }
    }
    let _ = a;
    Err(Error::NoFoldInBracket { lo: p_start.min(p_end), hi: p_start.max(p_end) })
}

/// Regula falsi (Illinois) in arclength on the parameter component of the tangent.
fn refine_fold<F: ForcedSystem, B: Fn(f64) -> F>(
    br: &Branch<'_, F, B>,
    y0: &DVector<f64>,
    tau0: &DVector<f64>,
    s_hi: f64,
    steps: usize,
) -> Result<FoldPoint> {
    let n = br.n;
    let tp = |s: f64| -> Result<(f64, DVector<f64>)> {
        if s == 0.0 {
            return Ok((tau0[n], y0.clone()));
        }
        let (y, a, _) = br.correct(y0, tau0, s)?;
        let t = br.tangent(&a, tau0)?;
        Ok((t[n], y))
    };
    let (mut lo, mut hi) = (0.0, s_hi);
    let (mut flo, _) = tp(lo)?;
    let (mut fhi, mut yhi) = tp(hi)?;
    let mut best = yhi.clone();
    let mut side = 0i8;
    for _ in 0..200 {
        if (hi - lo).abs() < br.opts.bracket_tol {
            break;
        }
        let mut s = (lo * fhi - hi * flo) / (fhi - flo);
        if !(s > lo && s < hi) {
            s = 0.5 * (lo + hi);
        }
        let (fs, ys) = tp(s)?;
        best = ys.clone();
        if fs * flo > 0.0 {
            lo = s;
            flo = fs;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = s;
            fhi = fs;
            yhi = ys;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    let _ = yhi;
    let p = best[n];
    let field = (br.build)(p);
    let lin = poincare_map_linearized(&field, &best.as_slice()[..n], br.m, br.opts.shooting.integration)?;
    Ok(FoldPoint {
        parameter: p,
        state: best.as_slice()[..n].to_vec(),
        multipliers: eigenvalues(&lin.derivative),
        bracket_width: (hi - lo).abs(),
        continuation_steps: steps,
    })
}

// ---------------------------------------------------------------------------
// Invariant manifolds

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ManifoldBranch {
    UnstablePlus,
    UnstableMinus,
    StablePlus,
    StableMinus,
}

impl ManifoldBranch {
    pub const ALL: [ManifoldBranch; 4] =
        [ManifoldBranch::UnstablePlus, ManifoldBranch::UnstableMinus, ManifoldBranch::StablePlus, ManifoldBranch::StableMinus];

    pub fn as_str(self) -> &'static str {
        match self {
            ManifoldBranch::UnstablePlus => "unstable+",
            ManifoldBranch::UnstableMinus => "unstable-",
            ManifoldBranch::StablePlus => "stable+",
            ManifoldBranch::StableMinus => "stable-",
        }
    }

    pub fn is_unstable(self) -> bool {
        matches!(self, ManifoldBranch::UnstablePlus | ManifoldBranch::UnstableMinus)
    }

    /// `+1` for the branch leaving along the eigenvector with positive first component.
    pub fn side(self) -> f64 {
        match self {
            ManifoldBranch::UnstablePlus | ManifoldBranch::StablePlus => 1.0,
            _ => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManifoldOptions {
    /// Seeds per fundamental domain.
    pub seeds: usize,
    /// Distance of the fundamental domain from the saddle.
    pub offset: f64,
    pub max_iterates: usize,
    /// Points with `max |xᵢ|` above this (over the first two components) are dropped.
    pub box_radius: f64,
    pub integration: Tolerances,
}

impl Default for ManifoldOptions {
    fn default() -> Self {
        Self { seeds: 200, offset: 1e-6, max_iterates: 12, box_radius: 3.0, integration: Tolerances { abs: 1e-11, rel: 1e-11 } }
    }
}

/// One branch of `W^u` or `W^s` of a saddle fixed point of the `m`-fold map on the section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifoldTrace {
    pub branch: ManifoldBranch,
    pub multiplier: f64,
    /// Section points ordered along the branch, starting at the saddle.
    pub points: Vec<Vec<f64>>,
}

/// Real saddle multipliers `(μ_s, v_s, μ_u, v_u)` with `|μ_s| < 1 < |μ_u|`.
/// In three dimensions the weakest stable direction is used.
fn saddle_directions(orbit: &PeriodicOrbit) -> Result<(f64, DVector<f64>, f64, DVector<f64>)> {
    if orbit.stability != OrbitStability::Saddle {
        return Err(Error::NotASaddle(format!("orbit is {}", orbit.stability.as_str())));
    }
    let a = orbit.monodromy_matrix();
    let n = a.nrows();
    let mut real: Vec<f64> = orbit.multipliers.iter().filter(|(_, im)| im.abs() < 1e-12).map(|(re, _)| *re).collect();
    if real.len() != orbit.multipliers.len() {
        return Err(Error::NotASaddle("complex multipliers".into()));
    }
    real.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mu_u = *real.last().unwrap();
    let mu_s = *real.iter().rev().find(|r| r.abs() < 1.0).unwrap();
    let eig = |mu: f64| -> Result<DVector<f64>> {
        // Null vector of A − μI via the one-dimensional inverse-iteration system.
        let shifted = &a - DMatrix::identity(n, n) * (mu * (1.0 + 1e-10));
        let lu = shifted.lu();
        let mut v = DVector::from_element(n, 1.0);
        for _ in 0..4 {
            v = lu.solve(&v).ok_or_else(|| Error::NotASaddle("eigenvector solve failed".into()))?;
            v = v.normalize();
        }
        if v[0] < 0.0 {
            v = -v;
        }
        Ok(v)
    };
    if mu_u.abs() <= 1.0 {
        return Err(Error::NotASaddle("no unstable multiplier".into()));
    }
    Ok((mu_s, eig(mu_s)?, mu_u, eig(mu_u)?))
}

/// Trajectories leaving `ESCAPE_FACTOR × box_radius` mid-iterate are abandoned: outside
/// the separatrices the scaled systems blow up in finite time and become stiff first.
const ESCAPE_FACTOR: f64 = 10.0;

/// Flow over `span`, or `None` once any component exceeds `radius`.
fn bounded_flow<F: ForcedSystem + ?Sized>(field: &F, x: &[f64], span: f64, tol: Tolerances, radius: f64) -> Result<Option<Vec<f64>>> {
    let mut escaped = false;
    let (_, y) = ode::integrate_observed(field, x, 0.0, span, tol, |v| {
        escaped = v.x1.iter().any(|c| c.abs() > radius);
        !escaped
    })?;
    Ok(if escaped { None } else { Some(y) })
}

/// Traces the requested branches by iterating a fundamental domain of seeds.
pub fn trace_manifolds<F: ForcedSystem + ?Sized>(
    field: &F,
    orbit: &PeriodicOrbit,
    branches: &[ManifoldBranch],
    opts: &ManifoldOptions,
) -> Result<Vec<ManifoldTrace>> {
    if opts.seeds < 2 {
        return crate::error::domain("at least two seeds per fundamental domain are required");
    }
    let (mu_s, v_s, mu_u, v_u) = saddle_directions(orbit)?;
    let n = orbit.state.len();
    let m = orbit.m;
    let mut out = Vec::new();
    for &branch in branches {
        let (mu, v) = if branch.is_unstable() { (mu_u, &v_u) } else { (mu_s, &v_s) };
        let growth = if branch.is_unstable() { mu.abs() } else { 1.0 / mu.abs() };
        // A negative multiplier swaps sides on every iterate; use the square map's domain.
        let (growth, step) = if mu < 0.0 { (growth * growth, 2) } else { (growth, 1) };
        let seeds: Vec<Vec<f64>> = (0..opts.seeds)
            .map(|i| {
                let s = i as f64 / opts.seeds as f64;
                let d = branch.side() * opts.offset * growth.powf(s);
                (0..n).map(|c| orbit.state[c] + d * v[c]).collect()
            })
            .collect();
        let inside = |x: &[f64]| x.iter().take(2).all(|c| c.abs() <= opts.box_radius) && x.iter().all(|c| c.is_finite());
        let span = (m * step) as f64 * field.forcing_period() * if branch.is_unstable() { 1.0 } else { -1.0 };
        let images: Vec<Vec<Vec<f64>>> = par_map(&seeds, |s| {
            let mut traj = vec![s.clone()];
            let mut x = s.clone();
            for _ in 0..opts.max_iterates {
                match bounded_flow(field, &x, span, opts.integration, ESCAPE_FACTOR * opts.box_radius) {
                    Ok(Some(y)) if inside(&y) => {
                        traj.push(y.clone());
                        x = y;
                    }
                    _ => break,
                }
            }
            traj
        });
        let mut points = vec![orbit.state.clone()];
        for j in 0..=opts.max_iterates {
            let mut any = false;
            for traj in &images {
                if let Some(p) = traj.get(j) {
                    points.push(p.clone());
                    any = true;
                }
            }
            if !any {
                break;
            }
        }
        out.push(ManifoldTrace { branch, multiplier: mu, points });
    }
    Ok(out)
}

/// Linear-interpolated crossings of the polyline `points` with the plane `x[component] = level`.
pub fn plane_slice(points: &[Vec<f64>], component: usize, level: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for w in points.windows(2) {
        let (a, b) = (w[0][component] - level, w[1][component] - level);
        if a == 0.0 {
            out.push(w[0].clone());
        } else if a * b < 0.0 {
            let s = a / (a - b);
            out.push(w[0].iter().zip(&w[1]).map(|(p, q)| p + s * (q - p)).collect());
        }
    }
    out
}

/// Symmetric Hausdorff distance between two point sets.
pub fn hausdorff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let d = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let one = |a: &[Vec<f64>], b: &[Vec<f64>]| {
        a.iter().map(|p| b.iter().map(|q| d(p, q)).fold(f64::INFINITY, f64::min)).fold(0.0f64, f64::max)
    };
    one(a, b).max(one(b, a))
}

// ---------------------------------------------------------------------------
// Separatrix splitting

/// Which unperturbed connection is followed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Connection {
    /// `(−1, 0) → (1, 0)` through `ζ₂ > 0` (psys1).
    HetUpper,
    /// `(1, 0) → (−1, 0)` through `ζ₂ < 0` (psys1).
    HetLower,
    /// Loop of the origin through `ζ₁ > 0` (psys2b).
    HomRight,
    /// Loop of the origin through `ζ₁ < 0` (psys2b).
    HomLeft,
}

impl Connection {
    pub fn system(self) -> ScaledSystem {
        match self {
            Connection::HetUpper | Connection::HetLower => ScaledSystem::Psys1,
            _ => ScaledSystem::Psys2b,
        }
    }

    /// Saddle guesses `(source, target)`.
    fn saddles(self) -> ([f64; 2], [f64; 2]) {
        match self {
            Connection::HetUpper => ([-1.0, 0.0], [1.0, 0.0]),
            Connection::HetLower => ([1.0, 0.0], [-1.0, 0.0]),
            _ => ([0.0, 0.0], [0.0, 0.0]),
        }
    }

    /// `(W^u branch, W^s branch)` that follow the connection.
    fn branches(self) -> (ManifoldBranch, ManifoldBranch) {
        match self {
            Connection::HetUpper => (ManifoldBranch::UnstablePlus, ManifoldBranch::StableMinus),
            Connection::HetLower => (ManifoldBranch::UnstableMinus, ManifoldBranch::StablePlus),
            Connection::HomRight => (ManifoldBranch::UnstablePlus, ManifoldBranch::StablePlus),
            Connection::HomLeft => (ManifoldBranch::UnstableMinus, ManifoldBranch::StableMinus),
        }
    }

    /// Section `x[component] = 0`, crossed where the other component has sign `side`;
    /// the returned coordinate is the other component.
    fn section(self) -> (usize, f64) {
        match self {
            Connection::HetUpper => (0, 1.0),
            Connection::HetLower => (0, -1.0),
            Connection::HomRight => (1, 1.0),
            Connection::HomLeft => (1, -1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplittingOptions {
    pub seeds: usize,
    pub offset: f64,
    /// Phase grid used to compare the two manifolds.
    pub grid: usize,
    pub max_time: f64,
    /// Sign changes of the distance smaller than this are ignored.
    pub noise_tol: f64,
    pub shooting: ShootingOptions,
    pub integration: Tolerances,
}

impl Default for SplittingOptions {
    fn default() -> Self {
        Self {
            seeds: 96,
            offset: 1e-6,
            grid: 256,
            max_time: 400.0,
            noise_tol: 1e-7,
            shooting: ShootingOptions::default(),
            integration: Tolerances { abs: 1e-11, rel: 1e-11 },
        }
    }
}

/// Distance `D(θ) = U(θ) − S(θ)` between `W^u` and `W^s` on the section, as a function
/// of the crossing phase `θ = ω̂t mod 2π`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingProfile {
    pub connection: Connection,
    pub phases: Vec<f64>,
    pub distance: Vec<f64>,
    pub min: f64,
    pub max: f64,
    /// `true` when `D` changes sign, i.e. the manifolds intersect.
    pub intersects: bool,
}

/// One crossing `(phase, coordinate)` per seed.
fn section_crossings(
    flow: &ScaledFlow,
    seeds: &[Vec<f64>],
    forward: bool,
    connection: Connection,
    opts: &SplittingOptions,
) -> Result<Vec<(f64, f64)>> {
    let (comp, side) = connection.section();
    let other = 1 - comp;
    let t1 = if forward { opts.max_time } else { -opts.max_time };
    let res = par_map(seeds, |s| -> Result<(f64, f64)> {
        let mut hit: Option<f64> = None;
        let mut from: Option<(f64, Vec<f64>)> = None;
        ode::integrate_observed(flow, s, 0.0, t1, opts.integration, |v: &StepView<'_>| {
            let (a, b) = (v.x0[comp], v.x1[comp]);
            let crosses = a * b <= 0.0 && a != b && v.x1[other] * side > 0.0 && v.x0[other] * side > 0.0;
            // Skip the immediate neighbourhood of the saddle for homoclinic loops.
            let away = v.x0[0].hypot(v.x0[1]) > 1e-3 || comp == 0;
            if crosses && away {
                let (mut lo, mut hi) = (v.t0, v.t1);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if (v.interpolate(mid, comp) - 0.0) * a > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hit = Some(0.5 * (lo + hi));
                from = Some((v.t0, v.x0.to_vec()));
                return false;
            }
            if v.x1.iter().any(|c| c.abs() > 10.0) {
                return false;
            }
            true
        })?;
        let (tc, (t0, x0)) = match (hit, from) {
            (Some(tc), Some(f)) => (tc, f),
            _ => return Err(Error::StepFailure { t: t1, reason: "manifold did not reach the section".into() }),
        };
        let xc = ode::integrate(flow, &x0, t0, tc, opts.integration)?;
        let phase = (flow.omega_hat * tc).rem_euclid(2.0 * PI);
        Ok((phase, xc[other]))
    });
    res.into_iter().collect()
}

fn periodic_interp(samples: &mut [(f64, f64)], grid: &[f64]) -> Vec<f64> {
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = samples.len();
    grid.iter()
        .map(|&th| {
            let idx = samples.partition_point(|s| s.0 <= th);
            let (a, b) = if idx == 0 || idx == n {
                let a = samples[n - 1];
                let b = samples[0];
                let a = (a.0 - 2.0 * PI, a.1);
                if idx == 0 { (a, b) } else { ((a.0 + 2.0 * PI, a.1), (b.0 + 2.0 * PI, b.1)) }
            } else {
                (samples[idx - 1], samples[idx])
            };
            let s = if b.0 == a.0 { 0.0 } else { (th - a.0) / (b.0 - a.0) };
            a.1 + s * (b.1 - a.1)
        })
        .collect()
}

/// Locates the perturbed saddles, traces the connection's manifolds to the section and
/// compares them on a common phase grid.
pub fn splitting_profile(flow: &ScaledFlow, connection: Connection, opts: &SplittingOptions) -> Result<SplittingProfile> {
    flow.validate()?;
    if flow.system != connection.system() {
        return crate::error::domain(format!("{:?} needs {}, got {}", connection, connection.system().name(), flow.system.name()));
    }
    let (src, dst) = connection.saddles();
    let p_src = find_subharmonic_from_path(flow, 1, &|_| src.to_vec(), &opts.shooting)?;
    let p_dst = find_subharmonic_from_path(flow, 1, &|_| dst.to_vec(), &opts.shooting)?;
    let (bu, bs) = connection.branches();
    let (_, _, mu_u, v_u) = saddle_directions(&p_src)?;
    let (mu_s, v_s, _, _) = saddle_directions(&p_dst)?;
    let seeds = |state: &[f64], v: &DVector<f64>, growth: f64, side: f64| -> Vec<Vec<f64>> {
        (0..opts.seeds)
            .map(|i| {
                let d = side * opts.offset * growth.powf(i as f64 / opts.seeds as f64);
                vec![state[0] + d * v[0], state[1] + d * v[1]]
            })
            .collect()
    };
    let su = seeds(&p_src.state, &v_u, mu_u.abs(), bu.side());
    let ss = seeds(&p_dst.state, &v_s, 1.0 / mu_s.abs(), bs.side());
    let mut cu = section_crossings(flow, &su, true, connection, opts)?;
    let mut cs = section_crossings(flow, &ss, false, connection, opts)?;
    let grid: Vec<f64> = (0..opts.grid).map(|i| 2.0 * PI * i as f64 / opts.grid as f64).collect();
    let u = periodic_interp(&mut cu, &grid);
    let s = periodic_interp(&mut cs, &grid);
    let distance: Vec<f64> = u.iter().zip(&s).map(|(a, b)| a - b).collect();
    let min = distance.iter().copied().fold(f64::INFINITY, f64::min);
    let max = distance.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(SplittingProfile {
        connection,
        phases: grid,
        distance,
        min,
        max,
        intersects: min < -opts.noise_tol && max > opts.noise_tol,
    })
}

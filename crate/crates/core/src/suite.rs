//! Verification suites. Every check measures one residual against a tolerance;
//! reports list the entries sorted by check name.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::abel::LineProfile;
use crate::analysis::{Analysis, GridConfig};
use crate::bumps::{BumpMixture, PointBump};
use crate::config::{ExperimentConfig, SphereConfig};
use crate::error::{Error, Result};
use crate::geometry::{Ball, Geometry, Point};
use crate::heat::{
    crank_nicolson, derivative_bound_probe, heat_config, heat_evolve, heat_kernel, heat_span_projection, heat_spectrum,
    parse_times,
};
use crate::model_space::{ModelSpace, SpaceKind};
use crate::operators::{
    abel_intertwining_check, fornberg_weights, fundamental_solution, identify_operator, solve,
};
use crate::radial::{
    apply_polynomial, apply_radial_laplacian, compute_pj_exact, derivatives_at_zero, LaplacePolynomial, RadialGrid,
    RadialProfile,
};
use crate::spherical::{spherical_function, spherical_values};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Cheigf,
    Abel,
    Algebra,
    Fundsol,
    Heat,
    All,
}

impl Suite {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "cheigf" => Ok(Self::Cheigf),
            "abel" => Ok(Self::Abel),
            "algebra" => Ok(Self::Algebra),
            "fundsol" => Ok(Self::Fundsol),
            "heat" => Ok(Self::Heat),
            "all" => Ok(Self::All),
            _ => Err(Error::Config(format!(
                "unknown suite '{text}' (expected cheigf, abel, algebra, fundsol, heat or all)"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Cheigf => "cheigf",
            Self::Abel => "abel",
            Self::Algebra => "algebra",
            Self::Fundsol => "fundsol",
            Self::Heat => "heat",
            Self::All => "all",
        }
    }

    /// Checks belonging to this suite.
    pub fn checks(self) -> impl Iterator<Item = &'static Check> {
        CHECKS.iter().filter(move |c| self == Self::All || c.name.split('.').next() == Some(self.name()))
    }
}

/// Direction of the comparison between residual and tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// Passes when `residual ≤ tolerance`.
    AtMost,
    /// Passes when `residual ≥ tolerance` (negative controls).
    AtLeast,
}

/// Outcome of running one check.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub residual: f64,
    pub note: Option<String>,
}

impl Measurement {
    fn new(residual: f64) -> Self {
        Self { residual, note: None }
    }

    fn with_note(residual: f64, note: impl Into<String>) -> Self {
        Self { residual, note: Some(note.into()) }
    }
}

/// A registered check.
pub struct Check {
    pub name: &'static str,
    /// The statement the check verifies.
    pub anchor: &'static str,
    pub tolerance: f64,
    pub bound: Bound,
    run: fn(&Context) -> Result<Measurement>,
}

impl std::fmt::Debug for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Check").field("name", &self.name).field("tolerance", &self.tolerance).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Not applicable to this space (capability or resonance).
    Skipped,
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportEntry {
    pub check_name: String,
    pub anchor: String,
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub bound: Bound,
    /// True unless the check failed or errored; skipped checks do not fail a run.
    pub pass: bool,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub experiment: String,
    pub suite: Suite,
    pub space: String,
    pub seed: u64,
    pub pass: bool,
    pub entries: Vec<ReportEntry>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }
}

/// Shared state for the checks of one run.
pub struct Context {
    space: ModelSpace,
    config: ExperimentConfig,
    analysis: Analysis,
    geometry: OnceLock<Geometry>,
    heat_analysis: OnceLock<Analysis>,
}

impl Context {
    /// Context for an explicit space; the space field of `config` is ignored.
    pub fn new(space: ModelSpace, config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            space,
            config: config.clone(),
            analysis: Analysis::new(space, config.grid.clone())?,
            geometry: OnceLock::new(),
            heat_analysis: OnceLock::new(),
        })
    }

    pub fn from_config(config: &ExperimentConfig) -> Result<Self> {
        Self::new(config.model_space()?, config)
    }

    pub fn space(&self) -> &ModelSpace {
        &self.space
    }

    pub fn analysis(&self) -> &Analysis {
        &self.analysis
    }

    fn seed(&self, k: u64) -> u64 {
        self.config.seed.wrapping_mul(1_000_003).wrapping_add(k)
    }

    fn grid(&self) -> Arc<RadialGrid> {
        self.analysis.grid().clone()
    }

    /// Point-level geometry with the configured sphere quadrature.
    pub fn geometry(&self) -> Result<&Geometry> {
        if let Some(g) = self.geometry.get() {
            return Ok(g);
        }
        let g = Geometry::new(self.space)?.with_sphere_rule(self.config.sphere.rule(self.space.dimension())?)?;
        Ok(self.geometry.get_or_init(|| g))
    }

    /// Analysis with `λ_max` extended for heat kernels down to `t = 0.01`.
    fn heat_analysis(&self) -> Result<&Analysis> {
        if let Some(a) = self.heat_analysis.get() {
            return Ok(a);
        }
        let a = Analysis::new(self.space, heat_config(&self.space, self.config.grid.clone(), 0.01))?;
        Ok(self.heat_analysis.get_or_init(|| a))
    }

    fn tolerance(&self, check: &Check) -> f64 {
        self.config.tolerances.get(check.name).copied().unwrap_or(check.tolerance)
    }

    pub fn evaluate(&self, check: &Check) -> ReportEntry {
        let tolerance = self.tolerance(check);
        let base = ReportEntry {
            check_name: check.name.to_string(),
            anchor: check.anchor.to_string(),
            residual: None,
            tolerance,
            bound: check.bound,
            pass: true,
            status: Status::Skipped,
            note: None,
        };
        match (check.run)(self) {
            Ok(m) => {
                let ok = match check.bound {
                    Bound::AtMost => m.residual <= tolerance,
                    Bound::AtLeast => m.residual >= tolerance,
                };
                ReportEntry {
                    residual: Some(m.residual),
                    pass: ok,
                    status: if ok { Status::Pass } else { Status::Fail },
                    note: m.note,
                    ..base
                }
            }
            Err(e @ (Error::Capability(_) | Error::ResonantSymbol(_))) => {
                ReportEntry { note: Some(format!("expected skip: {e}")), ..base }
            }
            Err(e) => ReportEntry { pass: false, status: Status::Error, note: Some(e.to_string()), ..base },
        }
    }

    /// Runs one check by name.
    pub fn run_check(&self, name: &str) -> Result<ReportEntry> {
        let check = find_check(name).ok_or_else(|| Error::Config(format!("unknown check '{name}'")))?;
        Ok(self.evaluate(check))
    }
}

pub fn find_check(name: &str) -> Option<&'static Check> {
    CHECKS.iter().find(|c| c.name == name)
}

/// Runs a suite for the space named in `config`.
///
/// Tolerance overrides must name registered checks. A single suite whose
/// checks are all skipped for lack of capability is a capability error.
pub fn run_suite(config: &ExperimentConfig, suite: Suite) -> Result<SuiteReport> {
    config.validate()?;
    for key in config.tolerances.keys() {
        if find_check(key).is_none() {
            return Err(Error::Config(format!("tolerance override for unknown check '{key}'")));
        }
    }
    let ctx = Context::from_config(config)?;
    let mut entries: Vec<ReportEntry> = suite.checks().map(|c| ctx.evaluate(c)).collect();
    entries.sort_by(|a, b| a.check_name.cmp(&b.check_name));
    if suite != Suite::All && entries.iter().all(|e| e.status == Status::Skipped) {
        return Err(Error::Capability(format!(
            "suite '{}' has no applicable checks on {}",
            suite.name(),
            ctx.space.label()
        )));
    }
    Ok(SuiteReport {
        experiment: config.name.clone(),
        suite,
        space: ctx.space.label(),
        seed: config.seed,
        pass: entries.iter().all(|e| e.pass),
        entries,
    })
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

macro_rules! check {
    ($name:literal, $anchor:literal, $tol:expr, $run:path) => {
        Check { name: $name, anchor: $anchor, tolerance: $tol, bound: Bound::AtMost, run: $run }
    };
    ($name:literal, $anchor:literal, $tol:expr, $run:path, at_least) => {
        Check { name: $name, anchor: $anchor, tolerance: $tol, bound: Bound::AtLeast, run: $run }
    };
}

/// Every registered check.
pub static CHECKS: &[Check] = &[
    check!("cheigf.spherical_oracle", "spherical function eigen-equation", 1e-8, spherical_oracle),
    check!("cheigf.limit_varphi", "second-order behaviour of φ_λ at the origin", 1e-4, limit_varphi),
    check!("cheigf.horospherical_eigenfunction", "spherical means of eigenfunctions", 1e-6, horospherical_eigenfunction),
    check!("cheigf.negative_control", "spherical means of eigenfunctions (bump fails)", 1e-2, negative_control, at_least),
    check!("cheigf.radialize_idempotent", "radialization fixes radial functions", 1e-12, radialize_idempotent),
    check!("cheigf.radialize_positive", "radialization preserves positivity", 0.0, radialize_positive),
    check!("cheigf.radialize_adjoint", "radialization is self-adjoint", 1e-4, radialize_adjoint),
    check!("cheigf.radialize_mass", "radialization preserves integrals", 1e-4, radialize_mass),
    check!("cheigf.radialize_convolution", "radialization commutes with radial convolution", 1e-3, radialize_convolution),
    check!("cheigf.radialize_laplacian", "radialization commutes with the Laplacian", 1e-3, radialize_laplacian),
    check!("abel.fourier_identity", "Fourier transform of the Abel transform", 1e-6, abel_fourier_identity),
    check!("abel.convolution_theorem", "Abel transform of a radial convolution", 1e-6, abel_convolution_theorem),
    check!("abel.brute_force_convolution", "radial convolution against direct quadrature", 1e-3, brute_force_convolution),
    check!("abel.duality", "duality of Abel and dual Abel transforms", 1e-8, abel_duality),
    check!("abel.dual_routes", "dual Abel transform as a spherical mean", 1e-6, dual_abel_routes),
    check!("algebra.radial_polynomials_exact", "radial polynomials P_0 and P_1", 0.0, radial_polynomials_exact),
    check!("algebra.derivatives_at_zero", "even derivatives at the origin via P_j(Δ)", 1e-5, derivatives_at_origin),
    check!("algebra.identify", "invariant operators are polynomials in Δ", 1e-6, identify_polynomials),
    check!("algebra.reject_non_invariant", "multiplication by r² is not invariant", 0.0, reject_non_invariant),
    check!("algebra.commutativity", "commutativity of invariant operators", 1e-8, commutativity),
    check!("algebra.eigen_coincidence", "invariant operators act on φ_λ by P(-(λ²+ρ²))", 1e-6, eigen_coincidence),
    check!("algebra.abel_intertwining", "Abel transform conjugates P(Δ) to P(d²/ds² - ρ²)", 1e-6, abel_intertwining),
    check!("fundsol.laplacian_certificate", "fundamental solution of Δ via the Abel transform", 1e-6, laplacian_certificate),
    check!("fundsol.shifted_certificate", "fundamental solution of Δ - 1 via the Abel transform", 1e-6, shifted_certificate),
    check!("fundsol.solve_residual", "solving (Δ - 1)u = f", 1e-4, solve_residual),
    check!("fundsol.symbol", "Fourier transform of the line Green's function", 1e-8, fundsol_symbol),
    check!("fundsol.delta_residual", "line Green's function against a mollified delta", 1e-6, delta_residual),
    check!("heat.closed_form", "heat kernel closed form", 1e-6, heat_closed_form),
    check!("heat.unit_mass", "heat kernel has unit mass", 1e-6, heat_unit_mass),
    check!("heat.positivity", "heat kernel is positive", 0.0, heat_positivity),
    check!("heat.semigroup", "heat semigroup property", 1e-6, heat_semigroup),
    check!("heat.spectrum", "heat kernel spectrum e^{-t(λ²+ρ²)}", 1e-6, heat_spectrum_check),
    check!("heat.pde_cross_check", "heat kernel solves the heat equation", 1e-4, heat_pde_cross_check),
    check!("heat.evolve_pde", "heat evolution solves the heat equation", 1e-4, heat_evolve_pde),
    check!("heat.small_time", "heat kernel is an approximate identity", 1e-3, heat_small_time),
    check!("heat.span_density", "heat kernels span a dense subspace", 1e-3, span_density),
    check!("heat.span_monotone", "heat-span L¹ residual decreases with more times", 0.0, span_monotone),
    check!("heat.span_monotone_l2", "heat-span L² residual decreases with more times", 1e-12, span_monotone_l2),
    check!("heat.derivative_bound", "exponential bound on Δ^N h_t", 0.05, derivative_bound),
];

// ─── spherical functions and spherical means ──────────────────────────────

fn spherical_oracle(ctx: &Context) -> Result<Measurement> {
    let space = ctx.space;
    let closed: Option<fn(f64, f64) -> f64> = match space.kind() {
        SpaceKind::RealHyperbolic { n: 3 } => Some(|l, r| (l * r).sin() / (l * r.sinh())),
        SpaceKind::Euclidean { n: 3 } => Some(|l, r| (l * r).sin() / (l * r)),
        SpaceKind::Euclidean { n: 1 } => Some(|l, r| (l * r).cos()),
        _ => None,
    };
    let mut worst = 0.0f64;
    match closed {
        Some(f) => {
            let radii: Vec<f64> = (0..500).map(|i| 0.01 + (5.0 - 0.01) * i as f64 / 499.0).collect();
            for lambda in [0.5, 1.0, 2.0] {
                let values = spherical_values(&space, c(lambda), &radii)?;
                for (v, &r) in values.iter().zip(&radii) {
                    worst = worst.max((v - f(lambda, r)).norm());
                }
            }
            Ok(Measurement::with_note(worst, "closed form, sup over r in [0.01, 5]"))
        }
        None => {
            let grid = Arc::new(RadialGrid::new(5.0, 65)?);
            for lambda in [0.5, 1.0, 2.0] {
                let phi = spherical_function(&space, c(lambda), grid.clone())?;
                let lap = apply_radial_laplacian(&space, &phi)?;
                let mu = lambda * lambda + space.rho().powi(2);
                let residual = lap.axpy(c(mu), &phi)?.sup_norm() / (mu * phi.sup_norm());
                worst = worst.max(residual);
            }
            Ok(Measurement::with_note(worst, "no closed form; relative residual of L_A φ + (λ²+ρ²) φ on [0, 5]"))
        }
    }
}

fn limit_varphi(ctx: &Context) -> Result<Measurement> {
    let space = ctx.space;
    let r = 1e-3;
    let mu = 1.0 + space.rho().powi(2);
    let n = space.dimension() as f64;
    let phi = spherical_values(&space, c(1.0), &[r])?[0].re;
    let quotient = (phi - 1.0) / (r * r);
    let residual = (quotient + mu / (2.0 * n)).abs() / mu;
    let literal = (quotient + mu / 2.0).abs() / mu;
    Ok(Measurement::with_note(
        residual,
        format!("(φ-1)/r² = {quotient:.9}; limit -μ/(2n); residual against -μ/2 is {literal:.3e}"),
    ))
}

fn horospherical_eigenfunction(ctx: &Context) -> Result<Measurement> {
    let geometry = ctx.geometry()?;
    let n = geometry.space().dimension();
    let mut comps = vec![0.0; n];
    comps[n - 1] = 1.0;
    let v = geometry.unit_vector(&geometry.origin(), &comps)?;
    let f = geometry.horospherical_wave(&v, 1.0);
    let samples = geometry.sample_points(ctx.seed(1), ctx.config.samples, 1.5);
    let report = geometry.eigenfunction_check(&f, c(1.0), &samples, &[0.25, 0.5, 1.0, 2.0], 1.0)?;
    let mean = report.samples.iter().map(|s| s.residual).fold(0.0, f64::max);
    let lap = report.samples.iter().map(|s| s.laplacian_residual).fold(0.0, f64::max);
    Ok(Measurement::with_note(mean, format!("spherical-mean residual; Laplacian residual {lap:.2e}")))
}

fn negative_control(ctx: &Context) -> Result<Measurement> {
    let geometry = ctx.geometry()?;
    let f = PointBump::new(geometry, geometry.origin(), 0.8);
    let eval = |p: &Point| f.eval(p);
    let samples = geometry.sample_points(ctx.seed(1), ctx.config.samples, 1.5);
    let report = geometry.eigenfunction_check(&eval, c(1.0), &samples, &[0.25, 0.5, 1.0, 2.0], 1.0)?;
    let residual = report.samples.iter().map(|s| s.residual).fold(0.0, f64::max);
    Ok(Measurement::new(residual))
}

/// Off-centre bumps and a base point for the radialization checks.
struct RadialSetup<'a> {
    geometry: &'a Geometry,
    x: Point,
    f: PointBump,
    g: PointBump,
}

impl RadialSetup<'_> {
    fn ball(bump: &PointBump) -> Ball {
        Ball { center: bump.center.clone(), radius: bump.support_radius() }
    }

    fn panels(ball: &Ball) -> usize {
        (ball.radius / 0.25).ceil() as usize
    }

    fn integrate(&self, f: &(impl Fn(&Point) -> Complex64 + Sync), ball: &Ball) -> Complex64 {
        self.geometry.integrate(f, ball, Self::panels(ball))
    }

    fn radialize(&self, bump: &PointBump, grid: Arc<RadialGrid>) -> RadialProfile {
        self.geometry.radialize(&|p: &Point| bump.eval(p), &self.x, grid)
    }
}

fn radial_setup(ctx: &Context) -> Result<RadialSetup<'_>> {
    let geometry = ctx.geometry()?;
    let mut points = geometry.sample_points(ctx.seed(2), 3, 1.0).into_iter();
    let mut next = || points.next().expect("three points");
    let x = next();
    let f = PointBump::new(geometry, next(), 0.5);
    let g = PointBump::new(geometry, next(), 0.6);
    Ok(RadialSetup { geometry, x, f, g })
}

fn radialize_idempotent(ctx: &Context) -> Result<Measurement> {
    let s = radial_setup(ctx)?;
    let u = BumpMixture::seeded(ctx.seed(3), 2).profile(ctx.grid());
    let translated = s.geometry.translate(&s.x, &u);
    let back = s.geometry.radialize(&|p: &Point| translated.eval(p), &s.x, ctx.grid());
    Ok(Measurement::new(back.max_abs_diff(&u)? / u.sup_norm()))
}

fn radialize_positive(ctx: &Context) -> Result<Measurement> {
    let s = radial_setup(ctx)?;
    let p = s.radialize(&s.f, ctx.grid());
    let min = p.values().iter().map(|v| v.re).fold(f64::INFINITY, f64::min);
    let imag = p.values().iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    Ok(Measurement::with_note((-min).max(0.0).max(imag), format!("minimum value {min:.3e}")))
}

fn radialize_adjoint(ctx: &Context) -> Result<Measurement> {
    let s = radial_setup(ctx)?;
    let rf = s.radialize(&s.f, ctx.grid()).tabulate(4097);
    let rg = s.radialize(&s.g, ctx.grid()).tabulate(4097);
    let (bf, bg) = (RadialSetup::ball(&s.f), RadialSetup::ball(&s.g));
    let lhs = s.integrate(&|p: &Point| rf.value_at(s.geometry.distance(&s.x, p)) * s.g.eval(p), &bg);
    let rhs = s.integrate(&|p: &Point| s.f.eval(p) * rg.value_at(s.geometry.distance(&s.x, p)), &bf);
    let nf = s.integrate(&|p: &Point| c(s.f.eval(p).norm_sqr()), &bf).re.sqrt();
    let ng = s.integrate(&|p: &Point| c(s.g.eval(p).norm_sqr()), &bg).re.sqrt();
    Ok(Measurement::with_note(
        (lhs - rhs).norm() / (nf * ng),
        format!("⟨R_x f, g⟩ = {:.10}, ⟨f, R_x g⟩ = {:.10}", lhs.re, rhs.re),
    ))
}

fn radialize_mass(ctx: &Context) -> Result<Measurement> {
    let s = radial_setup(ctx)?;
    let rf = s.radialize(&s.f, ctx.grid());
    let radial = ctx.analysis.integral(&rf)?;
    let direct = s.integrate(&|p: &Point| s.f.eval(p), &RadialSetup::ball(&s.f));
    Ok(Measurement::new((radial - direct).norm() / direct.norm()))
}

/// Coarse sphere quadrature for the nested integrals of the convolution check.
fn coarse_geometry(space: ModelSpace) -> Result<Geometry> {
    let coarse = SphereConfig { polar: 12, azimuth: 24, circle: 96 };
    Geometry::new(space)?.with_sphere_rule(coarse.rule(space.dimension())?)
}

fn radialize_convolution(ctx: &Context) -> Result<Measurement> {
    let s = radial_setup(ctx)?;
    let coarse = coarse_geometry(ctx.space)?;
    let v = BumpMixture::centered(ctx.seed(4), 2).profile(ctx.grid());
    let ball = RadialSetup::ball(&s.f);
    let fv = |y: &Point| coarse.convolve_general(&|p: &Point| s.f.eval(p), &ball, &v, y);
    let rf = s.radialize(&s.f, ctx.grid());
    let rhs = ctx.analysis.radial_convolve(&rf, &v)?;
    let scale = rhs.sup_norm();
    let mut worst = 0.0f64;
    for r in [0.0, 0.5, 1.0, 2.0] {
        let values = coarse
            .sphere_points(&s.x, r)
            .iter()
            .map(|(p, w)| fv(p).map(|z| z * w))
            .collect::<Result<Vec<_>>>()?;
        let lhs: Complex64 = values.iter().sum();
        worst = worst.max((lhs - rhs.value_at(r)).norm() / scale);
    }
    Ok(Measurement::with_note(worst, "R_x(f ∗ v) against (R_x f) ∗ v at r ∈ {0, 0.5, 1, 2}"))
}

fn radialize_laplacian(ctx: &Context) -> Result<Measurement> {
    let s = radial_setup(ctx)?;
    let lap_f = |p: &Point| s.geometry.chart_laplacian(&|q: &Point| s.f.eval(q), p, 1e-2);
    let lhs = s.geometry.radialize(&lap_f, &s.x, ctx.grid());
    let rhs = apply_radial_laplacian(&ctx.space, &s.radialize(&s.f, ctx.grid()))?;
    Ok(Measurement::new(lhs.max_abs_diff(&rhs)? / rhs.sup_norm()))
}

// ─── Abel transform ───────────────────────────────────────────────────────

/// `𝒜u` by the horosphere route where points exist, spectrally otherwise.
fn abel_of(ctx: &Context, u: &RadialProfile) -> Result<(LineProfile, &'static str)> {
    if ctx.space.point_ops() {
        Ok((ctx.analysis.abel_transform_geometric(u)?, "horosphere integrals"))
    } else {
        Ok((ctx.analysis.abel_transform(u)?, "spectral route"))
    }
}

fn abel_fourier_identity(ctx: &Context) -> Result<Measurement> {
    let mut worst = 0.0f64;
    let mut route = "";
    for k in 0..3 {
        let u = BumpMixture::seeded(ctx.seed(10 + k), 2).profile(ctx.grid());
        let (w, r) = abel_of(ctx, &u)?;
        route = r;
        let lhs = ctx.analysis.line_fourier(&w)?;
        let rhs = ctx.analysis.spherical_fourier(&u)?;
        worst = worst.max(lhs.max_abs_diff(&rhs) / rhs.sup_norm());
    }
    Ok(Measurement::with_note(worst, format!("Abel transform by {route}")))
}

fn abel_convolution_theorem(ctx: &Context) -> Result<Measurement> {
    let u = BumpMixture::centered(ctx.seed(20), 2).profile(ctx.grid());
    let v = BumpMixture::centered(ctx.seed(21), 2).profile(ctx.grid());
    let uv = ctx.analysis.radial_convolve(&u, &v)?;
    let (lhs, route) = abel_of(ctx, &uv)?;
    let rhs = ctx.analysis.line_convolve(&abel_of(ctx, &u)?.0, &abel_of(ctx, &v)?.0)?;
    Ok(Measurement::with_note(lhs.max_abs_diff(&rhs)? / rhs.sup_norm(), format!("Abel transform by {route}")))
}

fn brute_force_convolution(ctx: &Context) -> Result<Measurement> {
    let geometry = ctx.geometry()?;
    let u = BumpMixture::centered(ctx.seed(30), 2).profile(ctx.grid());
    let v = BumpMixture::centered(ctx.seed(31), 2).profile(ctx.grid());
    let uv = ctx.analysis.radial_convolve(&u, &v)?;
    let origin = geometry.origin();
    let table = u.tabulate(4097);
    let f = |p: &Point| table.value_at(geometry.distance(&origin, p));
    let support = Ball { center: origin.clone(), radius: 6.0 };
    let n = ctx.space.dimension();
    let mut comps = vec![0.0; n];
    comps[0] = 1.0;
    let dir = geometry.unit_vector(&origin, &comps)?;
    let scale = uv.sup_norm();
    let mut worst = 0.0f64;
    for r in [0.0, 0.5, 1.0, 1.5, 2.5] {
        let x = geometry.exp_map(&dir, r);
        let brute = geometry.convolve_general(&f, &support, &v, &x)?;
        worst = worst.max((brute - uv.value_at(r)).norm() / scale);
    }
    Ok(Measurement::with_note(worst, "direct quadrature at r ∈ {0, 0.5, 1, 1.5, 2.5}"))
}

/// `∫_ℝ a b ds` for even line profiles by the trapezoid rule.
fn line_pairing(a: &LineProfile, b: &LineProfile) -> Complex64 {
    let ds = a.ds();
    let last = a.len() - 1;
    a.values()
        .iter()
        .zip(b.values())
        .enumerate()
        .map(|(j, (x, y))| x * y * if j == 0 || j == last { ds } else { 2.0 * ds })
        .sum()
}

fn abel_duality(ctx: &Context) -> Result<Measurement> {
    let a = &ctx.analysis;
    let u = BumpMixture::seeded(ctx.seed(40), 2).profile(ctx.grid());
    let w = a.line_profile_real(|s| (-0.5 * s * s).exp() * (1.0 + s * s));
    let lhs = line_pairing(&a.abel_transform(&u)?, &w);
    let aw = a.dual_abel_spectral(&w)?;
    let rhs = a.integral(&RadialProfile::new(ctx.grid(), u.values().iter().zip(aw.values()).map(|(x, y)| x * y).collect())?)?;
    Ok(Measurement::new((lhs - rhs).norm() / lhs.norm()))
}

fn dual_abel_routes(ctx: &Context) -> Result<Measurement> {
    let geometry = ctx.geometry()?;
    let w = ctx.analysis.line_profile_real(|s| (-s * s).exp());
    let spectral = ctx.analysis.dual_abel_spectral(&w)?;
    let direct = geometry.dual_abel_quadrature(&|s: f64| c((-s * s).exp()), ctx.grid());
    // beyond r ≈ 3 the level band of w is too thin for the sphere rule
    let mut worst = 0.0f64;
    for ((&r, x), y) in spectral.nodes().iter().zip(spectral.values()).zip(direct.values()) {
        if r <= 3.0 {
            worst = worst.max((x - y).norm());
        }
    }
    Ok(Measurement::with_note(worst / spectral.sup_norm(), "spectral against spherical means, r ≤ 3"))
}

// ─── invariant operators ──────────────────────────────────────────────────

fn radial_polynomials_exact(ctx: &Context) -> Result<Measurement> {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, Zero};
    let pj = compute_pj_exact(&ctx.space, 1);
    let n = BigInt::from(ctx.space.dimension());
    let p0_ok = pj[0].len() == 1 && pj[0][0].is_one();
    let p1_ok = pj[1].len() == 2 && pj[1][0].is_zero() && pj[1][1] == BigRational::new(BigInt::one(), n);
    let residual = if p0_ok && p1_ok { 0.0 } else { 1.0 };
    Ok(Measurement::with_note(residual, format!("P_0 = {:?}, P_1 = {:?}", pj[0], pj[1])))
}

fn derivatives_at_origin(ctx: &Context) -> Result<Measurement> {
    let space = ctx.space;
    let grid = Arc::new(RadialGrid::new(2.0, 33)?);
    let h = 0.25;
    let offsets: Vec<f64> = (0..=8).map(|k| k as f64).collect();
    let weights = fornberg_weights(&offsets, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed(50));
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let coeffs: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let poly = |r: f64| coeffs.iter().rev().fold(0.0, |acc, &a| acc * r * r + a);
        let u = RadialProfile::from_real_fn(grid.clone(), poly);
        let computed = derivatives_at_zero(&space, &u, 4)?;
        let scale_c = coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let mut factorial = 1.0;
        for (j, d) in computed.iter().enumerate() {
            let order = 2 * j;
            if j > 0 {
                factorial *= (order * (order - 1)) as f64;
            }
            let fd: f64 =
                offsets.iter().zip(&weights[order]).map(|(&k, w)| w * u.value_at(k * h).re).sum::<f64>() / h.powi(order as i32);
            worst = worst.max((d.re - fd).abs() / (factorial * scale_c));
        }
    }
    Ok(Measurement::with_note(worst, "u^{(2j)}(0), j ≤ 4, relative to (2j)! max|c_k|"))
}

/// Seeded polynomial of degree 1..=`max_degree` with coefficients in `[-3, 3]`.
fn random_polynomial(rng: &mut ChaCha8Rng, max_degree: usize) -> Result<LaplacePolynomial> {
    let degree = rng.gen_range(1..=max_degree);
    let mut coeffs: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-3.0..3.0)).collect();
    if coeffs[degree].abs() < 0.5 {
        coeffs[degree] = 0.5f64.copysign(coeffs[degree]);
    }
    LaplacePolynomial::from_real(&coeffs)
}

fn identify_polynomials(ctx: &Context) -> Result<Measurement> {
    let space = ctx.space;
    let mut targets = vec![LaplacePolynomial::from_real(&[2.0, 3.0, 1.0])?];
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed(60));
    for _ in 0..5 {
        targets.push(random_polynomial(&mut rng, 3)?);
    }
    let mut worst = 0.0f64;
    for p in &targets {
        let found = identify_operator(&space, |u: &RadialProfile| apply_polynomial(&space, p, u), 4)?;
        worst = worst.max(found.max_coeff_diff(p));
    }
    Ok(Measurement::with_note(worst, "z² + 3z + 2 and five seeded polynomials of degree ≤ 3"))
}

fn reject_non_invariant(ctx: &Context) -> Result<Measurement> {
    let outcome = identify_operator(&ctx.space, |u: &RadialProfile| Ok(u.map(|r, v| v * (r * r))), 4);
    match outcome {
        Err(Error::NotInvariant(msg)) => Ok(Measurement::with_note(0.0, msg)),
        Err(e) => Err(e),
        Ok(p) => Ok(Measurement::with_note(1.0, format!("accepted as {p}"))),
    }
}

fn commutativity(ctx: &Context) -> Result<Measurement> {
    let space = ctx.space;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed(70));
    let p = random_polynomial(&mut rng, 2)?;
    let q = random_polynomial(&mut rng, 2)?;
    let u = BumpMixture::centered(ctx.seed(71), 2).profile(ctx.grid());
    let pq = apply_polynomial(&space, &p, &apply_polynomial(&space, &q, &u)?)?;
    let qp = apply_polynomial(&space, &q, &apply_polynomial(&space, &p, &u)?)?;
    Ok(Measurement::with_note(pq.max_abs_diff(&qp)? / pq.sup_norm(), format!("P = {p}, Q = {q}")))
}

fn eigen_coincidence(ctx: &Context) -> Result<Measurement> {
    let space = ctx.space;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed(80));
    let grid = Arc::new(RadialGrid::new(3.0, 33)?);
    let mut worst = 0.0f64;
    for lambda in [0.5, 1.0, 2.0] {
        let p = random_polynomial(&mut rng, 2)?;
        let phi = spherical_function(&space, c(lambda), grid.clone())?;
        let image = apply_polynomial(&space, &p, &phi)?;
        let mu = lambda * lambda + space.rho().powi(2);
        let eigenvalue = p.eval(c(-mu));
        let scale: f64 = p.coeffs().iter().enumerate().map(|(k, a)| a.norm() * mu.powi(k as i32)).sum();
        worst = worst.max(image.axpy(-eigenvalue, &phi)?.sup_norm() / (scale * phi.sup_norm()));
    }
    Ok(Measurement::new(worst))
}

fn abel_intertwining(ctx: &Context) -> Result<Measurement> {
    let u = BumpMixture::seeded(ctx.seed(90), 2).profile(ctx.grid());
    let mut worst = 0.0f64;
    for p in [LaplacePolynomial::laplacian(), LaplacePolynomial::from_real(&[0.0, 0.0, 1.0])?] {
        worst = worst.max(abel_intertwining_check(&ctx.analysis, &p, &u)?);
    }
    Ok(Measurement::with_note(worst, "P = z and P = z²"))
}

// ─── fundamental solutions ────────────────────────────────────────────────

fn certificate_for(ctx: &Context, p: &LaplacePolynomial) -> Result<Measurement> {
    let fs = fundamental_solution(&ctx.space, p)?;
    let mut worst = 0.0f64;
    for k in 0..3 {
        let f = BumpMixture::seeded(ctx.seed(100 + k), 2).profile(ctx.grid());
        let w = ctx.analysis.abel_transform(&f)?;
        worst = worst.max(fs.abel_certificate(&w));
    }
    Ok(Measurement::with_note(worst, format!("‖D̃(F ∗ 𝒜f) - 𝒜f‖∞ / ‖𝒜f‖∞ for three bumps, P = {p}")))
}

fn laplacian_certificate(ctx: &Context) -> Result<Measurement> {
    certificate_for(ctx, &LaplacePolynomial::laplacian())
}

fn shifted_certificate(ctx: &Context) -> Result<Measurement> {
    certificate_for(ctx, &LaplacePolynomial::from_real(&[-1.0, 1.0])?)
}

fn solve_residual(ctx: &Context) -> Result<Measurement> {
    let p = LaplacePolynomial::from_real(&[-1.0, 1.0])?;
    let mut worst = 0.0f64;
    for k in 0..3 {
        let f = BumpMixture::seeded(ctx.seed(110 + k), 2).profile(ctx.grid());
        let u = solve(&ctx.analysis, &p, &f)?;
        let image = apply_polynomial(&ctx.space, &p, &u)?;
        worst = worst.max(image.max_abs_diff(&f)? / f.sup_norm());
    }
    Ok(Measurement::new(worst))
}

fn fundsol_symbol(ctx: &Context) -> Result<Measurement> {
    let p = LaplacePolynomial::from_real(&[-1.0, 1.0])?;
    let fs = fundamental_solution(&ctx.space, &p)?;
    let end = 40.0 / fs.decay_rate().max(1e-3);
    let rule = crate::quadrature::gauss_legendre(16).composite(0.0, end, (end / 0.25).ceil() as usize);
    let scale = fs.symbol(0.0).norm();
    let mut worst = 0.0f64;
    for lambda in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let transform: Complex64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&s, &w)| fs.line_value(s) * (2.0 * w * (lambda * s).cos()))
            .sum();
        worst = worst.max((transform - fs.symbol(lambda)).norm() / scale);
    }
    Ok(Measurement::with_note(worst, "∫ F(s) cos(λs) ds against 1/P(-(λ²+ρ²)), P = z - 1"))
}

fn delta_residual(ctx: &Context) -> Result<Measurement> {
    let fs = fundamental_solution(&ctx.space, &LaplacePolynomial::from_real(&[-1.0, 1.0])?)?;
    Ok(Measurement::with_note(fs.delta_residual(0.05), "ε = 0.05"))
}

// ─── heat kernel ──────────────────────────────────────────────────────────

fn heat_closed_form(ctx: &Context) -> Result<Measurement> {
    let t = 0.5;
    let closed: Box<dyn Fn(f64) -> f64> = match ctx.space.kind() {
        SpaceKind::RealHyperbolic { n: 3 } => Box::new(move |r: f64| {
            let ratio = if r == 0.0 { 1.0 } else { r / r.sinh() };
            (4.0 * PI * t).powf(-1.5) * (-t).exp() * ratio * (-r * r / (4.0 * t)).exp()
        }),
        SpaceKind::Euclidean { n } => {
            Box::new(move |r: f64| (4.0 * PI * t).powf(-(n as f64) / 2.0) * (-r * r / (4.0 * t)).exp())
        }
        _ => return Err(Error::Capability(format!("no closed-form heat kernel on {}", ctx.space.label()))),
    };
    let h = heat_kernel(&ctx.analysis, t)?;
    let worst = h
        .profile()
        .nodes()
        .iter()
        .zip(h.profile().values())
        .map(|(&r, v)| (v - closed(r)).norm())
        .fold(0.0, f64::max);
    Ok(Measurement::with_note(worst / closed(0.0), "t = 0.5, relative to h_t(0)"))
}

fn heat_unit_mass(ctx: &Context) -> Result<Measurement> {
    let mut worst = 0.0f64;
    // at t = 1 on H³ about 1e-4 of the mass lies beyond r = 8
    for t in [0.1, 0.25, 0.5] {
        let h = heat_kernel(&ctx.analysis, t)?;
        worst = worst.max((ctx.analysis.integral(h.profile())? - 1.0).norm());
    }
    Ok(Measurement::with_note(worst, "t ∈ {0.1, 0.25, 0.5}"))
}

fn heat_positivity(ctx: &Context) -> Result<Measurement> {
    // resolved range: values above 1e-10 of the peak
    let mut negative = 0usize;
    for t in [0.05, 0.5, 5.0] {
        let h = heat_kernel(&ctx.analysis, t)?;
        let floor = 1e-10 * h.profile().sup_norm();
        let mut resolved = true;
        for v in h.profile().values() {
            if resolved && v.re <= 0.0 {
                negative += 1;
            }
            resolved &= v.norm() > floor;
        }
    }
    Ok(Measurement::with_note(negative as f64, "non-positive values on the resolved range, t ∈ {0.05, 0.5, 5}"))
}

fn heat_semigroup(ctx: &Context) -> Result<Measurement> {
    let a = &ctx.analysis;
    let quarter = heat_kernel(a, 0.25)?;
    let half = heat_kernel(a, 0.5)?;
    let product = a.radial_convolve(quarter.profile(), quarter.profile())?;
    let kernels = product.max_abs_diff(half.profile())? / half.profile().sup_norm();
    let u = BumpMixture::seeded(ctx.seed(120), 2).profile(ctx.grid());
    let twice = heat_evolve(a, &heat_evolve(a, &u, 0.25)?, 0.5)?;
    let once = heat_evolve(a, &u, 0.75)?;
    let evolved = twice.max_abs_diff(&once)? / once.sup_norm();
    Ok(Measurement::with_note(
        kernels.max(evolved),
        format!("h_¼ ∗ h_¼ = h_½: {kernels:.2e}; (u ∗ h_¼) ∗ h_½ = u ∗ h_¾: {evolved:.2e}"),
    ))
}

fn heat_spectrum_check(ctx: &Context) -> Result<Measurement> {
    let a = &ctx.analysis;
    let t = 0.5;
    let h = heat_kernel(a, t)?;
    let measured = a.spherical_fourier(h.profile())?;
    let exact = heat_spectrum(a, t);
    let mut worst = 0.0f64;
    for ((&l, x), y) in a.lambdas().iter().zip(measured.values()).zip(exact.values()) {
        if l <= 10.0 {
            worst = worst.max((x - y).norm());
        }
    }
    Ok(Measurement::with_note(worst / exact.sup_norm(), "λ ∈ [0, 10], relative to the peak"))
}

fn heat_pde_cross_check(ctx: &Context) -> Result<Measurement> {
    let a = &ctx.analysis;
    let start = heat_kernel(a, 0.25)?;
    let end = heat_kernel(a, 0.5)?;
    let pde = crank_nicolson(a, start.profile(), 0.25, 500)?;
    Ok(Measurement::with_note(
        pde.max_abs_diff(end.profile())? / end.profile().sup_norm(),
        "Crank–Nicolson from h_¼ to h_½, 500 steps",
    ))
}

fn heat_evolve_pde(ctx: &Context) -> Result<Measurement> {
    let a = &ctx.analysis;
    let u = BumpMixture::seeded(ctx.seed(130), 2).profile(ctx.grid());
    let (t, dt) = (0.5, 1e-3);
    let ahead = heat_evolve(a, &u, t + dt)?;
    let behind = heat_evolve(a, &u, t - dt)?;
    let now = heat_evolve(a, &u, t)?;
    let dudt = ahead.sub(&behind)?.scale(c(0.5 / dt));
    let lap = apply_radial_laplacian(&ctx.space, &now)?;
    Ok(Measurement::with_note(dudt.max_abs_diff(&lap)? / lap.sup_norm(), "central ∂_t at t = 0.5 against L_A u"))
}

fn heat_small_time(ctx: &Context) -> Result<Measurement> {
    // e^{tΔ}u - u ≈ tΔu, so the bump needs sup|Δu| < 1; with the drift of H³
    // that forces a plateau wider than the default grid can hold
    let config = GridConfig { r_max: 12.0, ..ctx.config.grid.clone() };
    let analysis = Analysis::new(ctx.space, config)?;
    let u = analysis.profile(|r| (-(r / 5.0).powi(4)).exp());
    let evolved = heat_evolve(&analysis, &u, 1e-3)?;
    Ok(Measurement::with_note(
        evolved.max_abs_diff(&u)? / u.sup_norm(),
        "t = 1e-3, bump e^{-(r/5)^4} on a grid with R = 12",
    ))
}

fn span_target(ctx: &Context, analysis: &Analysis) -> RadialProfile {
    BumpMixture::centered(ctx.seed(140), 2).profile(analysis.grid().clone())
}

fn span_density(ctx: &Context) -> Result<Measurement> {
    let a = ctx.heat_analysis()?;
    let times = parse_times("log:0.01:5:20")?;
    let report = heat_span_projection(a, &span_target(ctx, a), &times)?;
    let note = if report.regularized { "20 log-spaced times, Tikhonov damping active" } else { "20 log-spaced times" };
    Ok(Measurement::with_note(report.relative_l1_residual(), note))
}

/// Span residuals along two nested chains of time sets: every 4th, every 2nd
/// and all of the 20 times, and growing prefixes. Each chain starts empty.
struct SpanChains {
    strided: Vec<(f64, f64)>,
    prefix: Vec<(f64, f64)>,
}

fn span_chains(ctx: &Context) -> Result<SpanChains> {
    let a = ctx.heat_analysis()?;
    let times = parse_times("log:0.01:5:20")?;
    let target = span_target(ctx, a);
    let run = |subset: &[f64]| -> Result<(f64, f64)> {
        let report = heat_span_projection(a, &target, subset)?;
        Ok((report.relative_l1_residual(), report.l2_residual))
    };
    let mut strided = vec![run(&[])?];
    for stride in [4, 2, 1] {
        strided.push(run(&times.iter().copied().step_by(stride).collect::<Vec<_>>())?);
    }
    let mut prefix = vec![run(&[])?];
    for k in [1, 2, 3, 5, 8, 12, 16, 20] {
        prefix.push(run(&times[..k])?);
    }
    Ok(SpanChains { strided, prefix })
}

fn largest_increase(values: impl Iterator<Item = f64>) -> f64 {
    let values: Vec<f64> = values.collect();
    values.windows(2).map(|w| (w[1] - w[0]).max(0.0)).fold(0.0, f64::max)
}

fn format_chain(values: impl Iterator<Item = f64>) -> String {
    values.map(|v| format!("{v:.3e}")).collect::<Vec<_>>().join(", ")
}

fn span_monotone(ctx: &Context) -> Result<Measurement> {
    let chains = span_chains(ctx)?;
    let increase = largest_increase(chains.strided.iter().map(|c| c.0))
        .max(largest_increase(chains.prefix.iter().map(|c| c.0)));
    Ok(Measurement::with_note(
        increase,
        format!(
            "relative L¹ residuals; strided sets (0, 5, 10, 20 times): {}; prefixes (0, 1, 2, 3, 5, 8, 12, 16, 20): {}",
            format_chain(chains.strided.iter().map(|c| c.0)),
            format_chain(chains.prefix.iter().map(|c| c.0)),
        ),
    ))
}

fn span_monotone_l2(ctx: &Context) -> Result<Measurement> {
    let chains = span_chains(ctx)?;
    let l2 = |chain: &[(f64, f64)]| {
        let top = chain[0].1;
        largest_increase(chain.iter().map(|c| c.1 / top))
    };
    Ok(Measurement::with_note(
        l2(&chains.strided).max(l2(&chains.prefix)),
        format!(
            "weighted L² residuals relative to the target; strided: {}; prefixes: {}",
            format_chain(chains.strided.iter().map(|c| c.1 / chains.strided[0].1)),
            format_chain(chains.prefix.iter().map(|c| c.1 / chains.prefix[0].1)),
        ),
    ))
}

fn derivative_bound(ctx: &Context) -> Result<Measurement> {
    let alpha = if ctx.space.rho() > 0.0 { ctx.space.rho() } else { 1.0 };
    let mut worst = 0.0f64;
    for order in 0..=3 {
        let probe = derivative_bound_probe(&ctx.analysis, 0.5, order, alpha)?;
        if !probe.constant.is_finite() || !probe.refined_constant.is_finite() {
            return Ok(Measurement::with_note(f64::INFINITY, format!("order {order}: bound not finite")));
        }
        worst = worst.max(probe.relative_change);
    }
    Ok(Measurement::with_note(worst, format!("t = 0.5, α = {alpha}, N ≤ 3; relative change under grid doubling")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique_and_prefixed() {
        let mut names: Vec<&str> = CHECKS.iter().map(|c| c.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), CHECKS.len());
        let total: usize =
            [Suite::Cheigf, Suite::Abel, Suite::Algebra, Suite::Fundsol, Suite::Heat].iter().map(|s| s.checks().count()).sum();
        assert_eq!(total, CHECKS.len());
        assert!(Suite::parse("nope").is_err());
    }

    #[test]
    fn unknown_tolerance_key_is_a_config_error() {
        let mut config = ExperimentConfig::default();
        config.tolerances.insert("heat.nonexistent".into(), 1e-3);
        assert!(matches!(run_suite(&config, Suite::Algebra), Err(Error::Config(_))));
    }

    #[test]
    fn algebra_suite_passes_on_h3() {
        let config = ExperimentConfig { grid: GridConfig { lambda_nodes: 1024, ..GridConfig::default() }, ..Default::default() };
        let report = run_suite(&config, Suite::Algebra).unwrap();
        for e in &report.entries {
            assert!(e.pass, "{e:?}");
        }
    }
}

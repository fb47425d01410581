//! Acceptance criteria 1–11. Each test writes one `criterion N: PASS|FAIL` line
//! to stderr (outside the test harness capture) and asserts the outcome.

use std::io::Write;

use harmonia::config::ExperimentConfig;
use harmonia::suite::{Context, ReportEntry, Status};
use harmonia::ModelSpace;

fn context(space: &str) -> Context {
    let config = ExperimentConfig { space: space.into(), ..ExperimentConfig::default() };
    Context::new(ModelSpace::parse(space).expect("space"), &config).expect("context")
}

fn describe(space: &str, e: &ReportEntry) -> String {
    let residual = e.residual.map_or("-".into(), |r| format!("{r:.2e}"));
    let status = match e.status {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Skipped => "skipped",
        Status::Error => "error",
    };
    format!("{space} {} {status} {residual} (tol {:.0e})", e.check_name, e.tolerance)
}

/// Runs `checks` on each space; a criterion passes only if every check was
/// measured and passed. Skips count as failures here.
fn criterion(number: u32, title: &str, runs: &[(&str, &[&str])]) {
    let mut pass = true;
    let mut details = Vec::new();
    let mut notes = Vec::new();
    for (space, checks) in runs {
        let ctx = context(space);
        for name in *checks {
            let entry = ctx.run_check(name).expect("registered check");
            pass &= entry.status == Status::Pass;
            details.push(describe(space, &entry));
            if entry.status != Status::Pass {
                if let Some(note) = &entry.note {
                    notes.push(format!("{space} {name}: {note}"));
                }
            }
        }
    }
    let verdict = if pass { "PASS" } else { "FAIL" };
    let mut line = format!("criterion {number}: {verdict} {title} [{}]", details.join("; "));
    if !notes.is_empty() {
        line.push_str(&format!(" notes: {}", notes.join(" | ")));
    }
    let _ = writeln!(std::io::stderr(), "\n{line}");
    assert!(pass, "{line}");
}

#[test]
fn criterion_01_spherical_function_oracle() {
    criterion(1, "spherical-function closed form on H3", &[("h3", &["cheigf.spherical_oracle"])]);
}

#[test]
fn criterion_02_limit_of_phi() {
    // The note of each entry also carries the residual against the literal -μ/2.
    let check: &[&str] = &["cheigf.limit_varphi"];
    criterion(2, "(φ_λ(r) - 1)/r² limit on all backends", &[("e3", check), ("h3", check), ("damek-ricci:2:1", check)]);
}

#[test]
fn criterion_03_horospherical_eigenfunction() {
    criterion(
        3,
        "spherical means of e^{(iλ-ρ)b_v} on H3, with negative control",
        &[("h3", &["cheigf.horospherical_eigenfunction", "cheigf.negative_control"])],
    );
}

#[test]
fn criterion_04_abel_fourier_identity() {
    let check: &[&str] = &["abel.fourier_identity"];
    criterion(4, "Abel-Fourier identity on all backends", &[("e3", check), ("h3", check), ("damek-ricci:2:1", check)]);
}

#[test]
fn criterion_05_abel_convolution() {
    criterion(
        5,
        "Abel convolution theorem on H3 and brute-force convolution on H2",
        &[("h3", &["abel.convolution_theorem"]), ("h2", &["abel.brute_force_convolution"])],
    );
}

#[test]
fn criterion_06_radial_polynomials() {
    let checks: &[&str] = &["algebra.radial_polynomials_exact", "algebra.derivatives_at_zero"];
    criterion(
        6,
        "exact P_0, P_1 and derivatives at zero on all backends",
        &[("e3", checks), ("h3", checks), ("damek-ricci:2:1", checks)],
    );
}

#[test]
fn criterion_07_invariant_algebra() {
    criterion(
        7,
        "identify_operator recovers polynomials and rejects r² on H3",
        &[("h3", &["algebra.identify", "algebra.reject_non_invariant"])],
    );
}

#[test]
fn criterion_08_fundamental_solution() {
    criterion(
        8,
        "Δ - 1 on H3: Abel-domain certificate and solve residual",
        &[("h3", &["fundsol.shifted_certificate", "fundsol.solve_residual"])],
    );
}

#[test]
fn criterion_09_heat_kernel() {
    criterion(
        9,
        "H3 heat kernel: closed form, unit mass, semigroup, PDE cross-check",
        &[("h3", &["heat.closed_form", "heat.unit_mass", "heat.semigroup", "heat.pde_cross_check"])],
    );
}

#[test]
fn criterion_10_heat_span() {
    criterion(
        10,
        "heat-span L¹ residual and nested monotonicity on H3",
        &[("h3", &["heat.span_density", "heat.span_monotone"])],
    );
}

#[test]
fn criterion_11_radialization() {
    criterion(
        11,
        "radialization on H2: idempotence, adjointness, mass, convolution, Δ-commutation",
        &[(
            "h2",
            &[
                "cheigf.radialize_idempotent",
                "cheigf.radialize_adjoint",
                "cheigf.radialize_mass",
                "cheigf.radialize_convolution",
                "cheigf.radialize_laplacian",
            ],
        )],
    );
}

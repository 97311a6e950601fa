use std::fmt::Write as _;
use std::time::Instant;

use clap::ValueEnum;
use num_bigint::BigInt;
use serde_json::{json, Value};

use pellspace::associahedron::{
    assoc_vertices, catalan, check_assoc_u_equations, check_refinement, pellytope_divides_g,
};
use pellspace::binary_geometry::verify_binary_geometry;
use pellspace::linalg::{IntMatrix, IntVec};
use pellspace::pellytope::{
    build_fan, build_m, build_pellytope, build_u_equations, closed_form_minv, compatibility, minimal_generators,
    pell_number, u_equation_residue, PellModel,
};
use pellspace::polyhedra::{check_simple_and_facets, int_vec_json};

pub const MAX_FAN_D: usize = 12;
pub const MAX_POLYTOPE_D: usize = 8;
pub const MAX_MATRIX_D: usize = 32;
pub const MAX_UEQUATIONS_D: usize = 32;
pub const MAX_VERIFY_FAN_D: usize = 12;
pub const MAX_VERIFY_MATRIX_D: usize = 12;
pub const MAX_VERIFY_UEQUATIONS_D: usize = 6;
pub const MAX_VERIFY_BINARY_D: usize = 5;
pub const MAX_ASSOC_N: usize = 8;
/// Vertex duality is only run up to this dimension inside `verify`.
const MAX_DUALITY_D: usize = 7;

pub enum CliError {
    Usage(String),
    Runtime(String),
}

pub struct Output {
    pub json: Value,
    pub text: String,
    pub passed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Check {
    Fan,
    Matrix,
    Uequations,
    Binary,
    Assoc,
    All,
}

impl Check {
    fn name(self) -> &'static str {
        match self {
            Check::Fan => "fan",
            Check::Matrix => "matrix",
            Check::Uequations => "uequations",
            Check::Binary => "binary",
            Check::Assoc => "assoc",
            Check::All => "all",
        }
    }

    fn max_d(self) -> usize {
        match self {
            Check::Fan => MAX_VERIFY_FAN_D,
            Check::Matrix => MAX_VERIFY_MATRIX_D,
            Check::Uequations => MAX_VERIFY_UEQUATIONS_D,
            Check::Binary => MAX_VERIFY_BINARY_D,
            Check::Assoc => MAX_ASSOC_N - 3,
            Check::All => MAX_VERIFY_BINARY_D,
        }
    }
}

fn check_d(d: usize, max: usize, what: &str) -> Result<(), CliError> {
    if d < 1 || d > max {
        return Err(CliError::Usage(format!("{what} needs 1 <= d <= {max}, got d = {d}")));
    }
    Ok(())
}

fn runtime<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

fn matrix_json(m: &IntMatrix) -> Value {
    Value::Array(m.row_vectors().iter().map(int_vec_json).collect())
}

fn matrix_text(m: &IntMatrix) -> String {
    m.row_vectors()
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| format!("{x:>3}"))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn merge(mut base: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut base, extra) {
        b.extend(e);
    }
    base
}

pub fn fan(d: usize) -> Result<Output, CliError> {
    check_d(d, MAX_FAN_D, "fan")?;
    let fan = build_fan(d).map_err(runtime)?;
    let json = merge(
        fan.to_json(),
        json!({"num_rays": fan.num_rays(), "num_maximal_cones": fan.num_maximal_cones()}),
    );
    let mut text = format!(
        "Σ_{d}: {} rays, {} maximal cones\nrays:\n",
        fan.num_rays(),
        fan.num_maximal_cones()
    );
    for (i, r) in fan.rays().iter().enumerate() {
        let _ = writeln!(text, "  u{} {r}", i + 1);
    }
    Ok(Output { json, text, passed: true })
}

pub fn polytope(d: usize) -> Result<Output, CliError> {
    check_d(d, MAX_POLYTOPE_D, "polytope")?;
    let poly = build_pellytope(d).map_err(runtime)?;
    let json = merge(
        poly.to_json(),
        json!({"num_support": poly.support().len(), "num_vertices": poly.vertices().len()}),
    );
    let mut text = format!(
        "P_{d}: {} support points, {} vertices\nvertices:\n",
        poly.support().len(),
        poly.vertices().len()
    );
    for v in poly.vertices() {
        let _ = writeln!(text, "  {v}");
    }
    Ok(Output { json, text, passed: true })
}

pub fn matrix(d: usize) -> Result<Output, CliError> {
    check_d(d, MAX_MATRIX_D, "matrix")?;
    let m = build_m(d).map_err(runtime)?;
    let minv = closed_form_minv(d).map_err(runtime)?;
    let identity = minv.mat_mul(&m).map_err(runtime)?.is_identity();
    let json = json!({"d": d, "M": matrix_json(&m), "Minv": matrix_json(&minv), "identity": identity});
    let text = format!(
        "M_{d}:\n{}\n\nM_{d}^-1:\n{}\n\nMinv * M = I: {identity}\n",
        matrix_text(&m),
        matrix_text(&minv)
    );
    Ok(Output { json, text, passed: identity })
}

pub fn uequations(d: usize) -> Result<Output, CliError> {
    check_d(d, MAX_UEQUATIONS_D, "uequations")?;
    let system = build_u_equations(d).map_err(runtime)?;
    let generators = minimal_generators(d).map_err(runtime)?;
    let json = merge(
        json!({"d": d, "generators": generators.iter().map(|g| g.to_json()).collect::<Vec<_>>()}),
        system.to_json(),
    );
    let mut text = format!("u-equations for d = {d}:\n{system}\ngenerators:\n");
    for (i, g) in generators.iter().enumerate() {
        let _ = writeln!(text, "  u{} = {g}", i + 1);
    }
    Ok(Output { json, text, passed: true })
}

struct CheckResult {
    passed: bool,
    detail: Value,
    summary: String,
}

fn failed(msg: impl std::fmt::Display) -> CheckResult {
    CheckResult {
        passed: false,
        detail: json!({"error": msg.to_string()}),
        summary: format!("error: {msg}"),
    }
}

fn run_fan_check(d: usize) -> CheckResult {
    let fan = match build_fan(d) {
        Ok(f) => f,
        Err(e) => return failed(e),
    };
    let expected = pell_number(d + 1).expect("d >= 1");
    let counts_ok = fan.num_rays() == 3 * d - 1 && num_bigint_eq(fan.num_maximal_cones(), &expected);
    let flag_ok = fan.flag_complex().is_ok();
    let mut detail = json!({
        "num_rays": fan.num_rays(),
        "num_maximal_cones": fan.num_maximal_cones(),
        "expected_cones": expected.to_string(),
        "flag": flag_ok,
    });
    let mut passed = counts_ok && flag_ok;
    let mut summary = format!(
        "{} rays, {} maximal cones (expected {expected}), flag: {flag_ok}",
        fan.num_rays(),
        fan.num_maximal_cones()
    );
    if d <= MAX_DUALITY_D {
        match build_pellytope(d).and_then(|p| Ok(check_simple_and_facets(&p, &fan)?)) {
            Ok(report) => {
                let ok = report.simple
                    && report.num_facets == 3 * d - 1
                    && num_bigint_eq(report.num_vertices, &expected);
                passed &= ok;
                detail["vertices"] = json!(report.num_vertices);
                detail["facets"] = json!(report.num_facets);
                detail["simple"] = json!(report.simple);
                let _ = write!(
                    summary,
                    "; {} vertices, {} facets, simple: {}",
                    report.num_vertices, report.num_facets, report.simple
                );
            }
            Err(e) => return failed(e),
        }
    }
    CheckResult { passed, detail, summary }
}

fn num_bigint_eq(x: usize, y: &BigInt) -> bool {
    &BigInt::from(x) == y
}

fn run_matrix_check(d: usize) -> CheckResult {
    let model = match PellModel::new(d) {
        Ok(m) => m,
        Err(e) => return failed(e),
    };
    let images_ok = model.generators().iter().enumerate().all(|(i, g)| {
        model
            .ray_values(g)
            .map(|v| v == IntVec::unit(model.num_vars(), i))
            .unwrap_or(false)
    });
    CheckResult {
        passed: images_ok,
        detail: json!({"identity": true, "generator_images": images_ok}),
        summary: format!("Minv * M = I, generators match the monomial formulas, images e_i: {images_ok}"),
    }
}

fn run_uequations_check(d: usize) -> CheckResult {
    let system = match build_u_equations(d) {
        Ok(s) => s,
        Err(e) => return failed(e),
    };
    let mut nonzero = Vec::new();
    for i in 0..system.len() {
        match u_equation_residue(d, &system, i) {
            Ok(r) if r.is_zero() => {}
            Ok(_) => nonzero.push(i + 1),
            Err(e) => return failed(e),
        }
    }
    let fan_non_edges = match build_fan(d).map(|f| f.flag_complex()) {
        Ok(Ok(flag)) => flag.non_edges().clone(),
        Ok(Err(e)) => return failed(e),
        Err(e) => return failed(e),
    };
    let n = system.len();
    let rule_non_edges = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !compatibility(i, j, d))
        .collect();
    let agree = system.non_edges() == fan_non_edges && fan_non_edges == rule_non_edges;
    CheckResult {
        passed: nonzero.is_empty() && agree,
        detail: json!({"equations": n, "nonzero_residues": nonzero, "incompatibility_agrees": agree}),
        summary: format!(
            "{} identities, {} nonzero, fan/equations/rules agree: {agree}",
            n,
            nonzero.len()
        ),
    }
}

fn run_binary_check(d: usize, seed: u64) -> CheckResult {
    let model = match PellModel::new(d) {
        Ok(m) => m,
        Err(e) => return failed(e),
    };
    match verify_binary_geometry(&model, seed) {
        Ok(report) => CheckResult {
            passed: true,
            summary: format!(
                "{} strata analyzed, {} faces, Jacobian rank {}",
                report.strata.len(),
                report.num_faces(),
                report.jacobian_ranks.first().copied().unwrap_or(0)
            ),
            detail: report.to_json(),
        },
        Err(e) => failed(e),
    }
}

struct AssocOutcome {
    passed: bool,
    json: Value,
    text: String,
}

fn run_assoc(n: usize, trials: usize, seed: u64) -> Result<AssocOutcome, String> {
    let e = |x: pellspace::associahedron::AssocError| x.to_string();
    let polytope = assoc_vertices(n).map_err(e)?;
    let expected = catalan(n - 2);
    let vertices_ok = num_bigint_eq(polytope.vertices.len(), &expected);
    let divides = pellytope_divides_g(n).map_err(e)?;
    let refinement = check_refinement(n).map_err(e)?;
    let dihedral = check_assoc_u_equations(n, trials, seed).map_err(e)?;
    let passed = vertices_ok && divides && refinement.refines && dihedral.passed();
    let extra: Vec<String> = refinement.extra_rays.iter().map(ToString::to_string).collect();
    let json = json!({
        "n": n,
        "passed": passed,
        "vertices": polytope.vertices.len(),
        "catalan": expected.to_string(),
        "pellytope_divides_g": divides,
        "refinement": refinement.to_json(),
        "dihedral": dihedral.to_json(),
    });
    let text = format!(
        "n = {n}: {} vertices (Catalan {expected}), pellytope divides G: {divides}, refines Σ_{}: {}, extra rays: [{}], dihedral identities: {}/{} trials exact",
        polytope.vertices.len(),
        n - 3,
        refinement.refines,
        extra.join(", "),
        dihedral.trials.iter().filter(|t| t.failed.is_empty()).count(),
        dihedral.trials.len()
    );
    Ok(AssocOutcome { passed, json, text })
}

pub fn verify(d: usize, checks: &[Check], seed: u64, trials: usize) -> Result<Output, CliError> {
    let mut selected: Vec<Check> = if checks.contains(&Check::All) {
        vec![Check::Fan, Check::Matrix, Check::Uequations, Check::Binary, Check::Assoc]
    } else {
        checks.to_vec()
    };
    selected.sort();
    selected.dedup();
    for c in &selected {
        check_d(d, c.max_d(), &format!("check {}", c.name()))?;
    }
    let mut results = serde_json::Map::new();
    let mut text = format!("verify d = {d}, seed = {seed}\n");
    let mut all_passed = true;
    for c in selected {
        let start = Instant::now();
        let result = match c {
            Check::Fan => run_fan_check(d),
            Check::Matrix => run_matrix_check(d),
            Check::Uequations => run_uequations_check(d),
            Check::Binary => run_binary_check(d, seed),
            Check::Assoc => match run_assoc(d + 3, trials, seed) {
                Ok(o) => CheckResult {
                    passed: o.passed,
                    detail: o.json,
                    summary: o.text,
                },
                Err(msg) => failed(msg),
            },
            Check::All => unreachable!("expanded above"),
        };
        let secs = start.elapsed().as_secs_f64();
        all_passed &= result.passed;
        let status = if result.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(text, "[{status}] {:<10} {} ({secs:.3}s)", c.name(), result.summary);
        results.insert(
            c.name().to_string(),
            json!({"passed": result.passed, "detail": result.detail}),
        );
    }
    let _ = writeln!(text, "{}", if all_passed { "all checks passed" } else { "some checks FAILED" });
    Ok(Output {
        json: json!({"d": d, "seed": seed, "passed": all_passed, "checks": Value::Object(results)}),
        text,
        passed: all_passed,
    })
}

pub fn assoc(n: usize, trials: usize, seed: u64) -> Result<Output, CliError> {
    if !(4..=MAX_ASSOC_N).contains(&n) {
        return Err(CliError::Usage(format!("assoc needs 4 <= n <= {MAX_ASSOC_N}, got n = {n}")));
    }
    let outcome = run_assoc(n, trials, seed).map_err(CliError::Runtime)?;
    Ok(Output {
        json: outcome.json,
        text: outcome.text,
        passed: outcome.passed,
    })
}

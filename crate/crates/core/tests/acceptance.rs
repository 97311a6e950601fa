//! End-to-end acceptance checks. Runs without the libtest harness so each
//! criterion prints exactly one PASS/FAIL line.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pellspace::associahedron::{assoc_vertices, catalan, check_assoc_u_equations, check_refinement, pellytope_divides_g};
use pellspace::binary_geometry::verify_binary_geometry;
use pellspace::graph::SimpleGraph;
use pellspace::linalg::{IntMatrix, IntVec};
use pellspace::pellytope::{
    build_fan, build_m, build_pellytope, build_u_equations, closed_form_minv, compatibility, pell_number,
    u_equation_residue, PellModel, RayKind,
};
use pellspace::polyhedra::check_simple_and_facets;
use pellspace::uequations::UEquationSystem;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn pell_counts() -> Outcome {
    for d in 1..=7 {
        let expected = pell_number(d + 1).map_err(err)?;
        let fan = build_fan(d).map_err(err)?;
        ensure(fan.num_rays() == 3 * d - 1, || format!("d={d}: {} rays", fan.num_rays()))?;
        ensure(BigInt::from(fan.num_maximal_cones()) == expected, || {
            format!("d={d}: {} maximal cones, expected {expected}", fan.num_maximal_cones())
        })?;
        let poly = build_pellytope(d).map_err(err)?;
        ensure(BigInt::from(poly.vertices().len()) == expected, || {
            format!("d={d}: {} vertices", poly.vertices().len())
        })?;
        let report = check_simple_and_facets(&poly, &fan).map_err(err)?;
        ensure(report.simple && report.num_facets == 3 * d - 1, || format!("d={d}: {report:?}"))?;
    }
    Ok("d=1..7 give 2, 5, 12, 29, 70, 169, 408 cones and vertices".into())
}

fn matrix_identities() -> Outcome {
    for d in 1..=12 {
        let product = closed_form_minv(d).map_err(err)?.mat_mul(&build_m(d).map_err(err)?).map_err(err)?;
        ensure(product.is_identity(), || format!("d={d}: Minv*M is not the identity"))?;
    }
    let m2 = IntMatrix::from_rows(&[
        vec![1, 0, -1, 0, 1],
        vec![0, 1, 0, -1, -1],
        vec![0, 0, -1, 0, 0],
        vec![0, 0, 0, -1, -1],
        vec![0, 0, -1, -1, 0],
    ]);
    let m2inv = IntMatrix::from_rows(&[
        vec![1, 0, 0, 1, -1],
        vec![0, 1, 0, -1, 0],
        vec![0, 0, -1, 0, 0],
        vec![0, 0, 1, 0, -1],
        vec![0, 0, -1, -1, 1],
    ]);
    ensure(build_m(2).map_err(err)? == m2, || "M_2 differs from the reference matrix".into())?;
    ensure(closed_form_minv(2).map_err(err)? == m2inv, || "M_2^-1 differs from the reference matrix".into())?;
    Ok("d=1..12 exact, d=2 entry-for-entry".into())
}

fn u_equation_identities() -> Outcome {
    let mut count = 0;
    for d in 1..=6 {
        let sys = build_u_equations(d).map_err(err)?;
        for i in 0..sys.len() {
            let residue = u_equation_residue(d, &sys, i).map_err(err)?;
            ensure(residue.is_zero(), || format!("d={d}, R_{} leaves {residue}", i + 1))?;
            count += 1;
        }
    }
    let reference = [
        vec![4, 5],
        vec![5, 7, 6],
        vec![6, 8],
        vec![1, 7],
        vec![2, 1, 8],
        vec![3, 2],
        vec![2, 4, 8],
        vec![3, 5, 7],
    ];
    let fixture_permutation: Vec<usize> = (0..8).collect();
    let reference = UEquationSystem::from_products(reference.iter().map(|p| p.iter().map(|j| j - 1).collect()).collect())
        .map_err(err)?
        .relabel(&fixture_permutation);
    ensure(build_u_equations(3).map_err(err)? == reference, || "d=3 system differs from the reference kernel".into())?;
    Ok(format!("{count} residues reduce to 0; d=3 matches the reference system"))
}

fn compatibility_agreement() -> Outcome {
    for d in 2..=6 {
        let n = 3 * d - 1;
        let from_fan = build_fan(d).map_err(err)?.flag_complex().map_err(err)?.non_edges().clone();
        let from_equations = build_u_equations(d).map_err(err)?.non_edges();
        let from_rules = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !compatibility(i, j, d))
            .collect();
        ensure(from_fan == from_equations, || format!("d={d}: fan and equations disagree"))?;
        ensure(from_fan == from_rules, || format!("d={d}: fan and rules disagree"))?;
    }
    Ok("d=2..6 fan, equations, and rules agree".into())
}

fn binary_geometry() -> Outcome {
    let mut summary = Vec::new();
    for d in 1..=5 {
        let model = PellModel::new(d).map_err(err)?;
        let system = model.uequations();
        let report = verify_binary_geometry(&model, 2024 + d as u64).map_err(err)?;
        ensure(report.strata.len() == 1 << (3 * d - 1), || format!("d={d}: {} strata", report.strata.len()))?;
        for s in &report.strata {
            match (&s.witness, s.certificate) {
                (Some(w), None) => {
                    ensure(system.residues(w.entries()).map_err(err)?.iter().all(Zero::is_zero), || {
                        format!("d={d}, S={:?}: nonzero residue", s.s)
                    })?;
                    ensure(s.s.iter().all(|&i| w[i].is_zero()), || format!("S={:?}: witness not on stratum", s.s))?;
                    ensure(s.codim == Some(s.s.len()), || format!("S={:?}: codim {:?}", s.s, s.codim))?;
                }
                (None, Some((i, j))) => {
                    ensure(system.involves(i, j) && system.involves(j, i), || {
                        format!("S={:?}: certificate ({i}, {j}) not incompatible", s.s)
                    })?;
                }
                _ => return Err(format!("d={d}, S={:?}: inconsistent report", s.s)),
            }
        }
        ensure(report.jacobian_ranks == vec![2 * d - 1; 10], || {
            format!("d={d}: ranks {:?}", report.jacobian_ranks)
        })?;
        summary.push(format!("{}/{}", report.num_faces(), report.strata.len()));
    }
    Ok(format!("faces/subsets for d=1..5: {}", summary.join(", ")))
}

fn incompatibility_graph(d: usize) -> Result<SimpleGraph, String> {
    if d == 0 {
        return Ok(SimpleGraph::new(0));
    }
    Ok(build_fan(d).map_err(err)?.flag_complex().map_err(err)?.incompatibility_graph())
}

fn star_factorization() -> Outcome {
    let mut checked = 0;
    for d in 2..=6 {
        let fan = build_fan(d).map_err(err)?;
        for v in 0..fan.num_rays() {
            let factors: Vec<usize> = match RayKind::of_index(d, v) {
                RayKind::Pos(i) | RayKind::Neg(i) if i == 1 || i == d => vec![d - 1],
                RayKind::Pos(i) | RayKind::Neg(i) => vec![i - 1, d - i],
                RayKind::Edge(i) if i == 1 || i == d - 1 => vec![d - 2, 1],
                RayKind::Edge(i) => vec![i - 1, 1, d - i - 1],
            };
            let mut expected = SimpleGraph::new(0);
            for k in &factors {
                expected = expected.disjoint_union(&incompatibility_graph(*k)?);
            }
            let star = fan.star(&[v]).map_err(err)?;
            let got = star.fan.flag_complex().map_err(err)?.incompatibility_graph();
            ensure(got.is_isomorphic(&expected), || {
                format!("d={d}, ray {}: star is not Σ product {factors:?}", RayKind::of_index(d, v))
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} stars match their product decompositions"))
}

fn gamma_structure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for d in 1..=5 {
        let model = PellModel::new(d).map_err(err)?;
        let n = model.num_vars();
        for (i, g) in model.generators().iter().enumerate() {
            ensure(model.ray_values(g).map_err(err)? == IntVec::unit(n, i), || format!("d={d}: u_{} image", i + 1))?;
        }
        for _ in 0..100 {
            let lambda: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=6)).collect();
            let lambda = IntVec::from_i64s(&lambda);
            let chi = model.character_of(&lambda).map_err(err)?;
            ensure(model.is_bounded(&chi).map_err(err)?, || format!("d={d}: {chi} not bounded"))?;
            ensure(model.factor_character(&chi).map_err(err)? == lambda, || format!("d={d}: {chi} misfactored"))?;
        }
        for _ in 0..100 {
            let mut image: Vec<i64> = (0..n).map(|_| rng.gen_range(-6..=6)).collect();
            let k = rng.gen_range(0..n);
            image[k] = -rng.gen_range(1..=6);
            let chi = model.character_of(&IntVec::from_i64s(&image)).map_err(err)?;
            ensure(!model.is_bounded(&chi).map_err(err)?, || format!("d={d}: {chi} wrongly bounded"))?;
        }
    }
    Ok("d=1..5, 100 bounded and 100 unbounded characters each".into())
}

fn associahedron() -> Outcome {
    let mut counts = Vec::new();
    for n in 4..=8 {
        let polytope = assoc_vertices(n).map_err(err)?;
        let expected = catalan(n - 2);
        ensure(BigInt::from(polytope.vertices.len()) == expected, || {
            format!("n={n}: {} vertices, expected {expected}", polytope.vertices.len())
        })?;
        ensure(pellytope_divides_g(n).map_err(err)?, || format!("n={n}: nonzero remainder"))?;
        let refinement = check_refinement(n).map_err(err)?;
        ensure(refinement.refines, || format!("n={n}: not a refinement"))?;
        if n == 6 {
            ensure(refinement.extra_rays == [IntVec::from_i64s(&[1, 0, -1])], || {
                format!("n=6: extra rays {:?}", refinement.extra_rays)
            })?;
        }
        let dihedral = check_assoc_u_equations(n, 20, 100 + n as u64).map_err(err)?;
        ensure(dihedral.passed() && dihedral.trials.len() == 20, || format!("n={n}: identity failed"))?;
        counts.push(polytope.vertices.len().to_string());
    }
    Ok(format!("vertices {}; refinements and identities exact", counts.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("pell counts", pell_counts),
        ("matrix identities", matrix_identities),
        ("u-equation identities", u_equation_identities),
        ("compatibility agreement", compatibility_agreement),
        ("binary geometry", binary_geometry),
        ("star factorization", star_factorization),
        ("bounded characters", gamma_structure),
        ("associahedron", associahedron),
    ];
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}) [{secs:.2}s]", k + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {} {name}: FAIL ({detail}) [{secs:.2}s]", k + 1);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Acceptance criteria. Runs every criterion at its stated tolerance and
//! prints one PASS/FAIL line each; exits nonzero if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use conftree::bench::fit_loglog_slope;
use conftree::bisect1d::{squared_l2_error_of_x_squared, Bisection1d, Interval};
use conftree::indicators::{Algorithm, Greedy, RunTrace, StepOutcome, StoppingRule};
use conftree::local_error::{
    local_error_h1, validate_rule, Affine, H1Error, QuadratureRule, QuadratureSettings, Target, XSquared, U1, U2,
};
use conftree::nvb::{build_domain_mesh, complete, Domain, NvbBackend};
use conftree::oracle::{certify_near_best, enumerate_conforming, minimal_completion, SigmaTable, DEFAULT_SEARCH_CAP};
use conftree::tree::{count_patches, CellId, GeometryBackend, RefinementTree};

const BIG_RUN_LEAVES: usize = 100_000;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// A long run with per-step checks.
struct BigRun {
    target: &'static str,
    algorithm: Algorithm,
    trace: RunTrace,
    backend: NvbBackend,
    tree: RefinementTree,
    /// Steps whose incremental conformity check or periodic full check failed.
    conformity_violations: usize,
    /// Steps with `|T_n| != n`.
    complexity_violations: usize,
    full_checks: usize,
}

fn big_run(target: &'static str, algorithm: Algorithm) -> BigRun {
    let t: Box<dyn Target> = if target == "u1" { Box::new(U1) } else { Box::new(U2) };
    let mut backend = NvbBackend::new(&build_domain_mesh(t.domain())).unwrap();
    let functional = H1Error::new(t, QuadratureSettings::default());
    let mut run = Greedy::new(&mut backend, &functional, algorithm).unwrap();
    let (mut conformity_violations, mut complexity_violations, mut full_checks) = (0, 0, 0);
    if run.tree().complexity() != 0 {
        complexity_violations += 1;
    }
    while run.tree().num_leaves() < BIG_RUN_LEAVES {
        match run.step() {
            Ok(StepOutcome::Stepped(row)) => {
                let n = run.iteration();
                if row.complexity != row.n || run.tree().complexity() != n {
                    complexity_violations += 1;
                }
                if n % 2000 == 0 {
                    full_checks += 1;
                    if !run.backend().is_conforming(run.tree()) {
                        conformity_violations += 1;
                    }
                }
            }
            Ok(StepOutcome::Converged) => break,
            Err(conftree::Error::NonConforming(_)) => {
                conformity_violations += 1;
                break;
            }
            Err(e) => panic!("{target} {algorithm}: {e}"),
        }
    }
    let trace = run.trace(None);
    let tree = run.into_tree();
    full_checks += 1;
    if !backend.is_conforming(&tree) {
        conformity_violations += 1;
    }
    if count_patches(&mut backend, &tree).unwrap() != tree.complexity() {
        complexity_violations += 1;
    }
    BigRun { target, algorithm, trace, backend, tree, conformity_violations, complexity_violations, full_checks }
}

fn near_best_certification() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for (target, domain) in [(Box::new(U1) as Box<dyn Target>, Domain::LShape), (Box::new(U2), Domain::Square)] {
        let mut backend = NvbBackend::new(&build_domain_mesh(domain)).unwrap();
        let initial = RefinementTree::initial(&backend);
        let enumeration = enumerate_conforming(&mut backend, &initial, 8).unwrap();
        let name = target.name().to_string();
        let functional = H1Error::new(target, QuadratureSettings::default());
        let table = SigmaTable::from_enumeration(&backend, &functional, &enumeration).unwrap();
        let mut run = Greedy::new(&mut backend, &functional, Algorithm::Conforming).unwrap();
        let trace = run.run(StoppingRule::MaxIterations(8)).unwrap();
        let report = certify_near_best(&trace, &table, 2);
        let ok = report.passed() && report.rows.len() == 9 && table.is_nonincreasing();
        pass &= ok;
        details.push(format!(
            "{name}: {} states, N=0..{}, max err/bound {:.4}",
            enumeration.num_states(),
            report.rows.len() - 1,
            report.tightest_ratio()
        ));
    }
    outcome(pass, details.join("; "))
}

fn reduction_equivalence() -> Outcome {
    let f = |iv: &Interval| squared_l2_error_of_x_squared(iv);
    let mut b1 = Bisection1d::unit();
    let mut b2 = Bisection1d::unit();
    let mut r1 = Greedy::new(&mut b1, &f, Algorithm::Conforming).unwrap();
    let t1 = r1.run(StoppingRule::MaxIterations(200)).unwrap();
    let leaves1: Vec<CellId> = r1.tree().leaves().collect();
    let mut r2 = Greedy::new(&mut b2, &f, Algorithm::Simple).unwrap();
    let t2 = r2.run(StoppingRule::MaxIterations(200)).unwrap();
    let leaves2: Vec<CellId> = r2.tree().leaves().collect();
    let m1: Vec<CellId> = t1.marked_cells().collect();
    let m2: Vec<CellId> = t2.marked_cells().collect();
    let pass = m1.len() == 200 && m1 == m2 && leaves1 == leaves2;
    outcome(pass, format!("{} marked cells compared, trees of {} leaves identical: {}", m1.len(), leaves1.len(), leaves1 == leaves2))
}

fn monotone_maxima(runs: &[BigRun]) -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for r in runs {
        let v = r.trace.monotonicity_violations().len();
        let steps = r.trace.len() - 1;
        pass &= v == 0 && steps >= 2000;
        details.push(format!("{} {}: {steps} steps, {v} increases", r.target, r.algorithm));
    }
    outcome(pass, details.join("; "))
}

fn conformity(runs: &[BigRun]) -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for r in runs {
        pass &= r.conformity_violations == 0;
        details.push(format!(
            "{} {}: {} violations ({} steps tracked, {} full checks)",
            r.target,
            r.algorithm,
            r.conformity_violations,
            r.trace.len() - 1,
            r.full_checks
        ));
    }
    outcome(pass, details.join("; "))
}

fn complexity_identity(runs: &[BigRun]) -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for r in runs {
        let bad_rows = r.trace.rows().iter().filter(|row| row.complexity != row.n).count();
        let v = r.complexity_violations + bad_rows;
        pass &= v == 0;
        details.push(format!("{} {}: {v} mismatches", r.target, r.algorithm));
    }
    outcome(pass, details.join("; "))
}

fn zero_error_termination() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for domain in [Domain::Square, Domain::LShape] {
        for alg in [Algorithm::Conforming, Algorithm::Simple] {
            let mut backend = NvbBackend::new(&build_domain_mesh(domain)).unwrap();
            let f = H1Error::new(Affine::default(), QuadratureSettings::default());
            let trace = Greedy::new(&mut backend, &f, alg).unwrap().run(StoppingRule::IndicatorZero).unwrap();
            let last = trace.last().unwrap();
            pass &= trace.len() == 1 && last.n == 0 && last.err == 0.0;
            details.push(format!("{domain} {alg}: n={} Err={}", last.n, last.err));
        }
    }
    outcome(pass, details.join("; "))
}

fn slope(trace: &RunTrace) -> f64 {
    let pts: Vec<(f64, f64)> = trace.checkpoints(10).iter().map(|&(c, e)| (c as f64, e)).collect();
    fit_loglog_slope(&pts, 1e3, 1e5).unwrap()
}

fn asymptotic_rate(runs: &[BigRun]) -> Outcome {
    let s1 = slope(&runs.iter().find(|r| r.target == "u1" && r.algorithm == Algorithm::Conforming).unwrap().trace);
    let s2 = slope(&runs.iter().find(|r| r.target == "u1" && r.algorithm == Algorithm::Simple).unwrap().trace);
    let pass = (s1 + 0.5).abs() <= 0.05 && (s2 + 0.5).abs() <= 0.05 && (s1 - s2).abs() <= 0.05;
    outcome(pass, format!("u1 slopes over [1e3, 1e5]: alg1 {s1:.4}, alg2 {s2:.4}"))
}

fn subadditivity(runs: &[BigRun]) -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    let settings = QuadratureSettings::default();
    for r in runs.iter().filter(|r| r.algorithm == Algorithm::Conforming) {
        let target: Box<dyn Target> = if r.target == "u1" { Box::new(U1) } else { Box::new(U2) };
        let internal: Vec<CellId> = r.tree.internal_nodes().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let samples = 10_000.min(internal.len());
        let picked: BTreeSet<usize> = rand::seq::index::sample(&mut rng, internal.len(), samples).into_iter().collect();
        let (mut violations, mut worst) = (0, f64::NEG_INFINITY);
        for i in picked {
            let c = internal[i];
            let parent = local_error_h1(&target, &r.backend.shape(c), &settings).value;
            let kids = r.backend.arena().children(c).unwrap();
            let sum: f64 = kids.iter().map(|&k| local_error_h1(&target, &r.backend.shape(k), &settings).value).sum();
            if sum > parent * (1.0 + 1e-10) {
                violations += 1;
            }
            if parent > 0.0 {
                worst = worst.max(sum / parent - 1.0);
            }
        }
        pass &= violations == 0 && samples >= 10_000;
        details.push(format!(
            "{}: {samples} cells, {violations} violations, max (Σchildren/parent - 1) = {worst:.3e}",
            r.target
        ));
    }
    outcome(pass, details.join("; "))
}

fn quadrature_validation() -> Outcome {
    let v = validate_rule(QuadratureRule::degree17(), 17);
    let tri = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    let got = local_error_h1(&XSquared, &tri, &QuadratureSettings::default()).value;
    let rel = ((got - 1.0 / 9.0) * 9.0).abs();
    let plain = local_error_h1(&XSquared, &tri, &QuadratureSettings::plain()).value;
    let rel_plain = ((plain - 1.0 / 9.0) * 9.0).abs();
    let pass = v.max_relative_error <= 1e-13 && rel <= 1e-12 && rel_plain <= 1e-12;
    outcome(
        pass,
        format!(
            "max monomial error {:.2e} (degree ≤ 17), x² error {:.2e} relative ({:.2e} plain)",
            v.max_relative_error, rel, rel_plain
        ),
    )
}

/// `ln err` at `ln cards` by linear interpolation in log-log coordinates.
fn interpolate(points: &[(f64, f64)], cards: f64) -> Option<f64> {
    let i = points.partition_point(|p| p.0 < cards);
    if i == 0 || i == points.len() {
        return (points.get(i).map(|p| p.0) == Some(cards)).then(|| points[i].1);
    }
    let (a, b) = (points[i - 1], points[i]);
    let t = (cards.ln() - a.0.ln()) / (b.0.ln() - a.0.ln());
    Some((a.1.ln() + t * (b.1.ln() - a.1.ln())).exp())
}

fn u2_comparison(runs: &[BigRun]) -> Outcome {
    let get = |alg| {
        let r = runs.iter().find(|r| r.target == "u2" && r.algorithm == alg).unwrap();
        r.trace.checkpoints(10).iter().map(|&(c, e)| (c as f64, e)).collect::<Vec<_>>()
    };
    let (c1, c2) = (get(Algorithm::Conforming), get(Algorithm::Simple));
    let (mut compared, mut better) = (0, 0);
    for &(cards, e1) in c1.iter().filter(|p| p.0 >= 1e2 && p.0 <= 1e5) {
        if let Some(e2) = interpolate(&c2, cards) {
            compared += 1;
            if e1 <= e2 {
                better += 1;
            }
        }
    }
    let frac = better as f64 / compared.max(1) as f64;
    outcome(
        frac >= 0.8 && compared > 0,
        format!("alg1 ≤ alg2 at {better} of {compared} checkpoints ({:.1}%)", 100.0 * frac),
    )
}

fn completion_validation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut trees, mut mismatches, mut not_idempotent, mut max_nodes) = (0, 0, 0, 0);
    while trees < 60 {
        let domain = if trees % 2 == 0 { Domain::Square } else { Domain::LShape };
        let mut b = NvbBackend::new(&build_domain_mesh(domain)).unwrap();
        let mut t = RefinementTree::initial(&b);
        let budget = (40 - t.num_nodes()) / 2;
        for _ in 0..rng.gen_range(1..=budget) {
            let leaves: Vec<CellId> = t.leaves().collect();
            let c = leaves[rng.gen_range(0..leaves.len())];
            t.split_leaf(&mut b, c).unwrap();
        }
        if b.is_conforming(&t) {
            continue;
        }
        trees += 1;
        max_nodes = max_nodes.max(t.num_nodes());
        let fast = complete(&mut b, &t).unwrap();
        let oracle = minimal_completion(&mut b, &t, DEFAULT_SEARCH_CAP).unwrap();
        if fast.num_nodes() != oracle.num_nodes() {
            mismatches += 1;
        }
        let again = complete(&mut b, &fast).unwrap();
        if again.nodes().collect::<Vec<_>>() != fast.nodes().collect::<Vec<_>>() {
            not_idempotent += 1;
        }
    }
    outcome(
        mismatches == 0 && not_idempotent == 0,
        format!(
            "{trees} nonconforming trees (≤ {max_nodes} nodes): {mismatches} cardinality mismatches, {not_idempotent} non-idempotent"
        ),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let mut report = |id: usize, name: &'static str, o: Outcome| {
        println!("[{}] {id:>2} {name}: {} ({:.1}s)", if o.pass { "PASS" } else { "FAIL" }, o.detail, start.elapsed().as_secs_f64());
        results.push((id, name, o));
    };

    report(1, "near-best certification", near_best_certification());
    report(2, "reduction equivalence", reduction_equivalence());

    let runs: Vec<BigRun> = [("u1", Algorithm::Conforming), ("u1", Algorithm::Simple), ("u2", Algorithm::Conforming), ("u2", Algorithm::Simple)]
        .into_iter()
        .map(|(t, a)| big_run(t, a))
        .collect();

    report(3, "monotone maxima", monotone_maxima(&runs));
    report(4, "conformity", conformity(&runs));
    report(5, "complexity identity", complexity_identity(&runs));
    report(6, "zero-error termination", zero_error_termination());
    report(7, "asymptotic rate", asymptotic_rate(&runs));
    report(8, "subadditivity audit", subadditivity(&runs));
    report(9, "quadrature validation", quadrature_validation());
    report(10, "u2 comparison", u2_comparison(&runs));
    report(11, "completion validation", completion_validation());

    let failed: Vec<usize> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    if failed.is_empty() {
        println!("all {} criteria passed", results.len());
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}

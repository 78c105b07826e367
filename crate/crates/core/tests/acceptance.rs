//! Acceptance checks. Each test prints one `PASS`/`FAIL` line before
//! asserting, so `cargo test --test acceptance -- --nocapture` gives a
//! readable summary.

use ptlab::face_census::compare_loss_fractions;
use ptlab::l1lab::{basis_pursuit, face_survives, gaussian_instance, relative_error, BpOptions, Face, SURVIVAL_MARGIN};
use ptlab::models::{
    block_subspace_count, catalan, delta_diff, enumerate_block_supports, enumerate_tree_supports, tree_bound_for_regime,
    tree_subspace_bound, DiffMode, ProblemSize, Regime,
};
use ptlab::phasegrid::{compare_to_theory, fit_empirical_transition, run_phase_diagram, GridSpec};
use ptlab::seeding;
use ptlab::thresholds::{delta_of_rho, rho_of_delta, sample_curve, threshold_first_zero, ThresholdCurve, ThresholdParams};
use ptlab::{SparsityModel, TreeRegime};
use rand::Rng;

fn report(label: &str, ok: bool, detail: String) {
    println!("{} {label}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{label}: {detail}");
}

fn block(z: f64) -> SparsityModel {
    SparsityModel::block_fraction(z).unwrap()
}

const SMALL: SparsityModel = SparsityModel::Tree(TreeRegime::SmallK);
const LARGE: SparsityModel = SparsityModel::Tree(TreeRegime::LargeK);

/// `rho` at sample `i`, or `None` past the curve's truncation (threshold
/// above 1/2).
fn rho_at(curve: &ThresholdCurve, i: usize) -> Option<f64> {
    curve.points.get(i).map(|p| p.rho)
}

#[test]
fn subspace_counts_match_enumeration() {
    let mut checked = 0;
    let mut bad = Vec::new();
    for n in 1..=14 {
        for k in 1..=n {
            for c in 1..=k {
                let formula = block_subspace_count(n, k, c).unwrap().exact().unwrap();
                let listed = enumerate_block_supports(n, k, c).unwrap().len() as u128;
                checked += 1;
                if formula != listed {
                    bad.push(format!("block N={n} k={k} C={c}: {formula} vs {listed}"));
                }
            }
        }
    }
    for k in 1..=10u32 {
        for depth in k..=(k + 1).min(11) {
            let listed = enumerate_tree_supports(depth, k as usize).unwrap().len() as u128;
            checked += 1;
            if Some(listed) != catalan(k as u64) {
                bad.push(format!("tree depth={depth} k={k}: {listed} vs Catalan"));
            }
            let (ln_bound, _) = tree_subspace_bound(1u64 << depth, k as u64).unwrap();
            if (listed as f64).ln() > ln_bound + 1e-12 {
                bad.push(format!("tree depth={depth} k={k}: {listed} above its bound"));
            }
            for regime in [Regime::SmallK, Regime::LargeK] {
                let b = tree_bound_for_regime(k as u64, regime).unwrap();
                if (listed as f64).ln() > b + 1e-12 && (regime == Regime::LargeK || k < depth) {
                    bad.push(format!("tree depth={depth} k={k}: above the {} bound", regime.name()));
                }
            }
        }
    }
    report("subspace counts", bad.is_empty(), format!("{checked} cases, mismatches {bad:?}"));
}

/// Threshold curves on a shared delta grid.
fn curves(models: &[SparsityModel]) -> Vec<ThresholdCurve> {
    let p = ThresholdParams::default();
    models.iter().map(|m| sample_curve(m, 1e-3, 0.5, 200, &p).unwrap()).collect()
}

#[test]
fn block_curves_decline_with_cluster_fraction() {
    let zetas = [0.25, 0.5, 0.75, 1.0];
    let cs = curves(&zetas.map(block));
    let simple = &curves(&[SparsityModel::Simple])[0];
    let mut compared = 0;
    let mut violations = Vec::new();
    for i in 0..200 {
        for w in 0..3 {
            // a truncated (missing) sample sits above 1/2, so above any present one
            match (rho_at(&cs[w], i), rho_at(&cs[w + 1], i)) {
                (Some(lo_zeta), Some(hi_zeta)) => {
                    compared += 1;
                    if !(lo_zeta > hi_zeta) {
                        violations.push((zetas[w], i));
                    }
                }
                (Some(_), None) => violations.push((zetas[w], i)),
                (None, Some(_)) => compared += 1,
                (None, None) => {}
            }
        }
    }
    let max_dev = simple.points.iter().zip(&cs[3].points).map(|(a, b)| (a.rho - b.rho).abs()).fold(0.0, f64::max);
    let same_len = simple.points.len() == cs[3].points.len();
    report(
        "block curves ordered in zeta",
        violations.is_empty() && same_len && max_dev <= 1e-12,
        format!("{compared} comparisons, violations {violations:?}, |zeta=1 - simple| <= {max_dev:e}"),
    );
}

#[test]
fn tree_small_k_curve_lies_below_large_k() {
    let cs = curves(&[SMALL, LARGE]);
    let mut violations = Vec::new();
    for i in 0..200 {
        match (rho_at(&cs[0], i), rho_at(&cs[1], i)) {
            (Some(s), Some(l)) if s < l => {}
            (Some(_), None) => {}
            (None, None) => {}
            other => violations.push((i, other)),
        }
    }
    report("tree small-k below large-k", violations.is_empty(), format!("violations {violations:?}"));
}

#[test]
fn threshold_routes_agree() {
    let p = ThresholdParams::default();
    let models = [SparsityModel::Simple, block(0.25), block(0.5), block(0.75), block(1.0), SMALL, LARGE];
    let mut worst_round_trip = 0.0f64;
    let mut worst_first_zero = 0.0f64;
    for m in &models {
        for i in 0..=200 {
            let rho = 1e-3 * (0.45f64 / 1e-3).powf(i as f64 / 200.0);
            let delta = delta_of_rho(m, rho, &p).unwrap();
            let back = rho_of_delta(m, delta, &p).unwrap();
            worst_round_trip = worst_round_trip.max((back - rho).abs());
        }
        let curve = sample_curve(m, 1e-3, 0.5, 200, &p).unwrap();
        let hi = curve.points.last().unwrap().delta;
        for j in 0..50 {
            let delta = 1e-3 * (hi / 1e-3).powf(j as f64 / 49.0);
            let a = threshold_first_zero(m, delta, &p).unwrap();
            let b = rho_of_delta(m, delta, &p).unwrap();
            worst_first_zero = worst_first_zero.max((a - b).abs());
        }
    }
    report(
        "threshold self-consistency",
        worst_round_trip <= 1e-8 && worst_first_zero <= 1e-6,
        format!("round trip {worst_round_trip:e}, first zero vs fixed point {worst_first_zero:e}"),
    );
}

#[test]
fn block_prefactor_gap_shrinks_with_dimension() {
    let gaps: Vec<f64> = [1_000usize, 10_000, 100_000]
        .iter()
        .map(|&n| {
            let (k, c) = (n / 10, n / 20);
            let exact = delta_diff(n, k, c, DiffMode::Exact).unwrap();
            let first_order = delta_diff(n, k, c, DiffMode::Asymptotic).unwrap();
            (exact - first_order).abs()
        })
        .collect();
    let ok = gaps[0] > gaps[1] && gaps[1] > gaps[2];
    report("prefactor asymptotics", ok, format!("gaps {gaps:?} at N = 1e3, 1e4, 1e5 with k = N/10, C = k/2"));
}

#[test]
fn block_and_simple_loss_fractions_agree() {
    let mut rows = Vec::new();
    let mut ok = true;
    for n in [5usize, 6, 7] {
        for k in [1usize, 2] {
            let size = ProblemSize::new(9, n, 0).unwrap();
            let cmp = compare_loss_fractions(size, k, 2, 200, 42).unwrap();
            ok &= cmp.pass;
            rows.push(format!(
                "n={n} k={k}: all {:.4} block {:.4} z {:.2}",
                cmp.all.loss_fraction, cmp.block.loss_fraction, cmp.z
            ));
        }
    }
    report("paired loss fractions", ok, rows.join("; "));
}

#[test]
fn certificate_agrees_with_basis_pursuit() {
    let size = ProblemSize::new(9, 6, 0).unwrap();
    let mut rng = seeding::rng(2024);
    let (mut agree, mut in_band, mut survived) = (0, 0, 0);
    let mut disagreements = Vec::new();
    for pair in 0..500u64 {
        let inst = gaussian_instance(size, seeding::mix(7, &[pair]));
        let len = rng.random_range(1..=5usize);
        let mut support = rand::seq::index::sample(&mut rng, 9, len).into_vec();
        support.sort_unstable();
        let signs = (0..len).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
        let face = Face::new(support, signs).unwrap();
        let verdict = face_survives(&inst, &face).unwrap();
        if verdict.t_star >= 1.0 - SURVIVAL_MARGIN && verdict.t_star <= 1.0 {
            in_band += 1;
            continue;
        }
        let chi = face.barycenter(9);
        let sol = basis_pursuit(&inst, &inst.measure(&chi), &BpOptions::default()).unwrap();
        let recovered = relative_error(&sol.x, &chi) <= 1e-6;
        survived += usize::from(verdict.survives);
        if recovered == verdict.survives {
            agree += 1;
        } else {
            disagreements.push((pair, verdict.t_star));
        }
    }
    report(
        "certificate vs basis pursuit",
        disagreements.is_empty(),
        format!("{agree} agree ({survived} surviving), {in_band} in margin band, disagreements {disagreements:?}"),
    );
}

#[test]
fn phase_diagrams_sit_above_strong_curves() {
    let params = ThresholdParams::default();
    let mut lines = Vec::new();
    let mut ok = true;
    for (i, model) in [SparsityModel::Simple, block(0.5), SMALL, LARGE].into_iter().enumerate() {
        let spec = GridSpec::uniform(64, 12, 12, 25, model, 100 + i as u64).unwrap();
        let diagram = run_phase_diagram(&spec).unwrap();
        let rho_zero = (0..12).all(|di| diagram.cell(di, 0).successes == 25);
        let full = (0..12).all(|ri| diagram.cell(11, ri).successes == 25);
        let empirical = fit_empirical_transition(&diagram);
        let monotone = empirical.columns.iter().all(|c| c.isotonic.windows(2).all(|w| w[0] >= w[1]));
        let curve = sample_curve(&model, 1e-3, 0.5, 200, &params).unwrap();
        let cmp = compare_to_theory(&empirical, &curve).unwrap();
        let below: Vec<String> = cmp
            .rows
            .iter()
            .filter(|r| !r.pass)
            .map(|r| format!("delta {:.3}: {:.3} < {:.3}", r.delta, r.rho_hat, r.rho_theory))
            .collect();
        let model_ok = rho_zero && full && monotone && below.is_empty();
        ok &= model_ok;
        lines.push(format!(
            "{model}: rho=0 row {rho_zero}, delta=1 column {full}, monotone {monotone}, {} columns compared, below theory {below:?}",
            cmp.rows.len()
        ));
    }
    report("phase diagrams", ok, lines.join("; "));
}

#[test]
fn commands_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let runs: Vec<Vec<String>> = vec![
        vec![
            "threshold", "--model", "block", "--zeta", "0.25,0.5,0.75,1.0", "--delta", "1e-3:0.5", "--points", "50",
            "--out", &path("curve.csv"), "--svg", &path("curve.svg"),
        ],
        vec!["face-census", "--N", "7", "--n", "5", "--k", "1", "--instances", "20", "--out", &path("census.csv")],
        vec![
            "phase-diagram", "--N", "16", "--grid", "4x4", "--trials", "3", "--model", "block", "--zeta", "0.5",
            "--seed", "7", "--out", &path("diag.csv"), "--empirical", &path("emp.csv"), "--report",
            &path("report.csv"), "--svg", &path("diag.svg"),
        ],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();
    let files = ["curve.csv", "curve.svg", "census.csv", "diag.csv", "emp.csv", "report.csv", "diag.svg"];
    let mut snapshots: Vec<Vec<Vec<u8>>> = Vec::new();
    for _ in 0..2 {
        for args in &runs {
            let mut sink = Vec::new();
            let mut err = Vec::new();
            let argv = std::iter::once("ptlab".to_string()).chain(args.iter().cloned());
            let code = ptlab::cli::run(argv, &mut sink, &mut err);
            assert!(code == 0 || code == 1, "exit {code}: {}", String::from_utf8_lossy(&err));
        }
        snapshots.push(files.iter().map(|f| std::fs::read(dir.path().join(f)).unwrap()).collect());
        for f in files {
            std::fs::remove_file(dir.path().join(f)).unwrap();
        }
    }
    let differing: Vec<&str> = files.iter().zip(snapshots[0].iter().zip(&snapshots[1])).filter(|(_, (a, b))| a != b).map(|(f, _)| *f).collect();
    report("determinism", differing.is_empty(), format!("{} files compared, differing {differing:?}", files.len()));
}

//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use intda_core::experiments::sweep::run_sweep;
use intda_core::experiments::verify::{run_verify, VerifyOptions};
use intda_core::experiments::{run_experiment, AggregateRow, ExperimentSpec};
use intda_core::metrics::{rank_fractions, Mechanism};
use intda_core::{
    deferred_acceptance, example, generate_market, int_da, interview_schedule, rank_of_match,
    serial_dictatorship, to_preferences, truncate_by_interviews, Distribution, MarketConfig,
    Matching, PreferenceProfile, Side,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 2021;

type Criterion = (&'static str, fn() -> Check);

/// Collects failed comparisons for one criterion.
#[derive(Default)]
struct Check {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    /// `got` and `target` are fractions, `tol` is in percentage points.
    fn within_pp(&mut self, label: &str, got: f64, target_pct: f64, tol: f64) {
        let got_pct = 100.0 * got;
        let ok = (got_pct - target_pct).abs() <= tol;
        let line = format!("{label} {got_pct:.1} vs {target_pct:.1}±{tol}");
        if !ok {
            self.failures.push(line);
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn row(rows: &[AggregateRow], mech: Mechanism, lambda: f64) -> &AggregateRow {
    rows.iter()
        .find(|r| r.mechanism == mech && r.lambda_d == lambda && r.lambda_h == lambda)
        .unwrap_or_else(|| panic!("no row for {mech:?} at {lambda}"))
}

/// Pairs `(d, h)` that would both rather be together, by direct scan of the
/// lists.
fn blocking_pairs(
    m: &Matching,
    d: &PreferenceProfile,
    h: &PreferenceProfile,
) -> Vec<(usize, usize)> {
    let pos = |list: &[usize], x: usize| list.iter().position(|&y| y == x);
    let mut out = Vec::new();
    for doc in 0..d.n_agents() {
        for &hos in d.list(doc) {
            let Some(hd) = pos(h.list(hos), doc) else {
                continue;
            };
            let doc_wants = match m.doctor(doc) {
                None => true,
                Some(cur) => pos(d.list(doc), hos) < pos(d.list(doc), cur),
            };
            let hos_wants = match m.hospital(hos) {
                None => true,
                Some(cur) => pos(h.list(hos), cur).is_none_or(|c| hd < c),
            };
            if doc_wants && hos_wants {
                out.push((doc, hos));
            }
        }
    }
    out
}

fn golden() -> Check {
    let mut c = Check::default();
    let start = Instant::now();
    let (d, h) = example::profiles();
    let da = deferred_acceptance(&d, &h, Side::Doctor).unwrap();
    c.require(
        da.doctor_assignments() == [Some(0), Some(1), Some(2)],
        format!("DA {:?}", da.doctor_assignments()),
    );
    let schedule = interview_schedule(&d, &h, 2, 2).unwrap();
    let sets: Vec<Vec<usize>> = (0..3).map(|x| schedule.doctor(x).to_vec()).collect();
    c.require(
        sets == [vec![0, 2], vec![1, 2], vec![0, 3]],
        format!("schedule {sets:?}"),
    );
    let td = truncate_by_interviews(&d, &schedule).unwrap();
    let th = truncate_by_interviews(&h, &schedule).unwrap();
    let m = deferred_acceptance(&td, &th, Side::Doctor).unwrap();
    let rank = rank_of_match(&m, &td, 2).unwrap();
    c.require(rank == Some(2), format!("d3 truncated rank {rank:?}"));
    let blocks = blocking_pairs(&m, &d, &h);
    c.require(!blocks.is_empty(), "Int-DA outcome not flagged unstable");
    let elapsed = start.elapsed();
    c.require(
        elapsed < Duration::from_secs(1),
        format!("took {elapsed:?}"),
    );
    c.note(format!("blocking {blocks:?}"));
    c
}

fn table_small() -> Check {
    let mut c = Check::default();
    let run = run_experiment(&ExperimentSpec::table(50, 340, SEED)).unwrap();
    let rows = &run.summary;
    let lambdas = [0.25, 0.5, 0.75];
    let int_unmatched = [5.7, 5.3, 4.4];
    let int_first = [42.8, 39.8, 34.6];
    let int_top3 = [81.9, 81.4, 80.7];
    let tr_unmatched = [14.6, 39.9, 71.7];
    let da_first = [16.1, 7.2, 3.6];
    let int_swap = [98.4, 98.6, 97.6];
    let identical = [74.0, 80.8, 82.3];
    let block_matched = [0.5, 0.8, 1.3];
    let block_unmatched = [16.4, 20.3, 33.3];
    for (i, &l) in lambdas.iter().enumerate() {
        let int = row(rows, Mechanism::IntDa, l);
        let tr = row(rows, Mechanism::TrDa, l);
        let da = row(rows, Mechanism::Da, l);
        c.within_pp(
            &format!("λ={l} Int-DA unmatched"),
            int.unmatched_fraction,
            int_unmatched[i],
            2.0,
        );
        c.within_pp(
            &format!("λ={l} Int-DA first"),
            int.first_rank_fraction_all,
            int_first[i],
            3.0,
        );
        c.within_pp(
            &format!("λ={l} Int-DA top3"),
            int.top3_rank_fraction_all,
            int_top3[i],
            3.0,
        );
        c.within_pp(
            &format!("λ={l} Tr-DA unmatched"),
            tr.unmatched_fraction,
            tr_unmatched[i],
            3.0,
        );
        c.within_pp(
            &format!("λ={l} DA first"),
            da.first_rank_fraction_all,
            da_first[i],
            3.0,
        );
        c.within_pp(
            &format!("λ={l} Int-DA swap"),
            int.same_partner_on_swap_fraction,
            int_swap[i],
            1.5,
        );
        c.within_pp(
            &format!("λ={l} identical"),
            int.identical_to_da_fraction,
            identical[i],
            3.0,
        );
        c.within_pp(
            &format!("λ={l} blocking matched"),
            int.blocking_fraction_matched,
            block_matched[i],
            1.0,
        );
        c.within_pp(
            &format!("λ={l} blocking unmatched"),
            int.blocking_fraction_unmatched,
            block_unmatched[i],
            5.0,
        );
    }
    let int = row(rows, Mechanism::IntDa, 0.5);
    c.note(format!(
        "λ=1/2 Int-DA unmatched {:.1}% first {:.1}% top3 {:.1}%",
        100.0 * int.unmatched_fraction,
        100.0 * int.first_rank_fraction_all,
        100.0 * int.top3_rank_fraction_all
    ));
    c
}

fn table_large() -> Check {
    let mut c = Check::default();
    let mut spec = ExperimentSpec::new(MarketConfig::balanced(1700, 0.5, SEED), 10, 5, 5);
    spec.mechanisms = vec![Mechanism::Da, Mechanism::IntDa];
    let run = run_experiment(&spec).unwrap();
    let int = row(&run.summary, Mechanism::IntDa, 0.5);
    let da = row(&run.summary, Mechanism::Da, 0.5);
    c.within_pp("Int-DA unmatched", int.unmatched_fraction, 5.8, 1.0);
    c.within_pp("Int-DA first", int.first_rank_fraction_all, 41.5, 3.0);
    c.within_pp("Int-DA top3", int.top3_rank_fraction_all, 81.3, 2.0);
    c.within_pp("Int-DA swap", int.same_partner_on_swap_fraction, 99.9, 0.2);
    c.within_pp("DA first", da.first_rank_fraction_all, 0.6, 0.4);
    c.note(format!(
        "unmatched {:.2}% first {:.2}% top3 {:.2}% swap {:.2}% DA first {:.2}%",
        100.0 * int.unmatched_fraction,
        100.0 * int.first_rank_fraction_all,
        100.0 * int.top3_rank_fraction_all,
        100.0 * int.same_partner_on_swap_fraction,
        100.0 * da.first_rank_fraction_all
    ));
    c
}

fn common_doctor_preferences() -> Check {
    let mut c = Check::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worse = 0;
    let mut moved = 0;
    let mut unmatched = 0;
    let mut doctors_checked = 0;
    for t in 0..200 {
        let n = rng.random_range(5..=50);
        let k = [2, 3, 5][t % 3];
        let config = MarketConfig {
            lambda_d: 1.0,
            lambda_h: rng.random::<f64>(),
            seed: rng.random(),
            ..MarketConfig::balanced(n, 1.0, 0)
        };
        let market = generate_market(&config).unwrap();
        let d = to_preferences(&market, Side::Doctor);
        let h = to_preferences(&market, Side::Hospital);
        let common = d.list(0).to_vec();
        c.require(
            (0..n).all(|x| d.list(x) == common),
            format!("market {t}: doctor lists differ"),
        );
        let da = deferred_acceptance(&d, &h, Side::Doctor).unwrap();
        let (schedule, m) = int_da(&market, k, k, Side::Doctor).unwrap();
        let truncated = truncate_by_interviews(&d, &schedule).unwrap();
        for x in 0..n {
            doctors_checked += 1;
            let before = rank_of_match(&da, &d, x).unwrap();
            match rank_of_match(&m, &truncated, x).unwrap() {
                Some(after) => {
                    if before.is_some_and(|b| after > b) {
                        worse += 1;
                    }
                }
                // No partner, so no rank to compare.
                None => unmatched += 1,
            }
            // Doctors placed in the first k - 1 rounds keep their DA partner.
            if before.is_some_and(|b| b < k) && m.doctor(x) != da.doctor(x) {
                moved += 1;
            }
        }
        let sd = serial_dictatorship(&common, &h).unwrap();
        c.require(
            sd == da,
            format!("market {t}: serial dictatorship differs from DA"),
        );
    }
    c.require(
        worse == 0,
        format!("{worse} doctors with truncated rank above DA rank"),
    );
    c.require(
        moved == 0,
        format!("{moved} doctors with DA rank below k lost their DA partner"),
    );
    c.note(format!(
        "{doctors_checked} doctors, {unmatched} unmatched under Int-DA"
    ));
    c
}

fn oracle_battery() -> Check {
    let mut c = Check::default();
    let report = run_verify(&VerifyOptions::new(6, 500, SEED)).unwrap();
    for f in report.failures.iter().take(5) {
        c.require(false, f.clone());
    }
    c.require(report.trials == 500, "trial count");
    c.note(format!(
        "{} stable matchings, {} schedules",
        report.stable_matchings, report.pairwise_stable_schedules
    ));
    c
}

/// Pairs doctors and hospitals by descending common score.
fn assortative(common_doctor: &[f64], common_hospital: &[f64]) -> Vec<Option<usize>> {
    let order = |v: &[f64]| {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));
        idx
    };
    let ds = order(common_doctor);
    let hs = order(common_hospital);
    let mut out = vec![None; common_doctor.len()];
    for (d, h) in ds.into_iter().zip(hs) {
        out[d] = Some(h);
    }
    out
}

fn assortative_benchmark() -> Check {
    let mut c = Check::default();
    for seed in 0..10 {
        let market = generate_market(&MarketConfig::balanced(100, 1.0, seed)).unwrap();
        let d = to_preferences(&market, Side::Doctor);
        let h = to_preferences(&market, Side::Hospital);
        let da = deferred_acceptance(&d, &h, Side::Doctor).unwrap();
        let expected = assortative(market.common_doctor(), market.common_hospital());
        c.require(
            da.doctor_assignments() == expected,
            format!("seed {seed}: not assortative"),
        );
        let top = market
            .common_hospital()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i);
        let first = expected.iter().filter(|&&p| p == top).count();
        c.require(
            first == 1,
            format!("seed {seed}: oracle counts {first} first choices"),
        );
        let fr = rank_fractions(&da, &d, &[1]).unwrap().unconditional(0);
        c.require(fr == 0.01, format!("seed {seed}: first-rank fraction {fr}"));
    }
    c.note("10 markets of 100, first-rank fraction 0.01 in each");
    c
}

fn figure_shape() -> Check {
    let mut c = Check::default();
    let run = run_sweep(&ExperimentSpec::figure(SEED)).unwrap();
    let peak = run.row(0.0, 1.0).expect("cell (0, 1)");
    for r in &run.rows {
        if (r.lambda_d, r.lambda_h) == (0.0, 1.0) {
            continue;
        }
        c.require(
            r.first_rank_fraction < peak.first_rank_fraction,
            format!(
                "first-rank at ({}, {}) reaches the peak",
                r.lambda_d, r.lambda_h
            ),
        );
        c.require(
            r.same_partner_on_swap_fraction <= peak.same_partner_on_swap_fraction,
            format!("swap at ({}, {}) exceeds the peak", r.lambda_d, r.lambda_h),
        );
    }
    let corner = run.row(1.0, 1.0).expect("cell (1, 1)");
    c.require(
        corner.first_rank_fraction == 0.01,
        format!("(1,1) first-rank {}", corner.first_rank_fraction),
    );
    c.note(format!(
        "peak first {:.3} swap {:.3}",
        peak.first_rank_fraction, peak.same_partner_on_swap_fraction
    ));

    // Large-market trend, with draws on [0, 1].
    let mut improved = Vec::new();
    for n in [200, 800] {
        let market = MarketConfig {
            distribution: Distribution::Uniform01,
            ..MarketConfig::balanced(n, 0.1, SEED)
        };
        let mut spec = ExperimentSpec::new(market, 20, 5, 5);
        spec.mechanisms = vec![Mechanism::IntDa];
        let run = run_experiment(&spec).unwrap();
        improved.push(run.summary[0].improved_rank_fraction_all);
    }
    c.require(
        improved[1] > improved[0],
        format!("improved share falls: {improved:?}"),
    );
    c.require(
        improved[1] > 0.9,
        format!("improved share at 800 is {:.3}", improved[1]),
    );
    c.note(format!("improved {:.3} -> {:.3}", improved[0], improved[1]));
    c
}

fn determinism() -> Check {
    let mut c = Check::default();
    let spec = ExperimentSpec::table(30, 12, 99);
    let in_pool = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_experiment(&spec).unwrap())
    };
    let a = in_pool(1);
    let b = in_pool(4);
    let dir = tempfile::tempdir().unwrap();
    let pa = a.write(&dir.path().join("a.csv")).unwrap();
    let pb = b.write(&dir.path().join("b.csv")).unwrap();
    let bytes = |p: &std::path::Path| std::fs::read(p).unwrap();
    c.require(
        bytes(&pa.csv) == bytes(&pb.csv),
        "per-replication CSV differs",
    );
    c.require(
        bytes(&pa.summary) == bytes(&pb.summary),
        "summary CSV differs",
    );
    c.note(format!("{} bytes", bytes(&pa.csv).len()));
    c
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("worked 3x4 example", golden),
        ("N=50 simulation table", table_small),
        ("N=1700 simulation table", table_large),
        ("common doctor preferences", common_doctor_preferences),
        ("brute-force oracle battery", oracle_battery),
        ("assortative benchmark", assortative_benchmark),
        ("DA grid shape and large-market trend", figure_shape),
        ("byte-identical reruns", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let check = f();
        let secs = start.elapsed().as_secs_f64();
        let status = if check.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        let detail = if check.failures.is_empty() {
            check.notes.join("; ")
        } else {
            failed += 1;
            check.failures.join("; ")
        };
        println!("{status} {}. {name} ({secs:.1}s) {detail}", i + 1);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}

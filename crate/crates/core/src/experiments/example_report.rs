//! Runs DA and Int-DA on the 3x4 example market and checks the known outcome.

use std::fmt::Write as _;

use crate::da::{deferred_acceptance, rank_of_match, Matching};
use crate::error::{Error, Result};
use crate::example;
use crate::interviews::{InterviewSchedule, InterviewStage};
use crate::oracle::{is_pairwise_stable, is_stable};
use crate::profile::Side;

#[derive(Clone, Debug)]
pub struct ExampleReport {
    pub da: Matching,
    pub schedule: InterviewSchedule,
    pub int_da: Matching,
    /// `d3`'s rank under DA in full preferences.
    pub da_rank_d3: Option<usize>,
    /// `d3`'s rank under Int-DA in interview-truncated preferences.
    pub int_da_rank_d3: Option<usize>,
    /// Pairs blocking the Int-DA outcome under full preferences.
    pub blocking_pairs: Vec<(usize, usize)>,
    pub trace: String,
}

fn name(prefix: char, i: Option<usize>) -> String {
    i.map_or_else(|| "unmatched".to_string(), |i| format!("{prefix}{}", i + 1))
}

fn check(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Regression(what.to_string()))
    }
}

pub fn run_worked_example() -> Result<ExampleReport> {
    let (doctors, hospitals) = example::profiles();
    let k = example::CAPACITY;
    let da = deferred_acceptance(&doctors, &hospitals, Side::Doctor)?;
    let stage = InterviewStage::run(&doctors, &hospitals, k, k)?;
    let int_da = stage.match_with(Side::Doctor);
    let da_rank_d3 = rank_of_match(&da, &doctors, 2)?;
    let int_da_rank_d3 = rank_of_match(&int_da, &stage.doctors, 2)?;
    let blocking_pairs = is_stable(&int_da, &doctors, &hospitals).blocking_pairs;

    let mut trace = String::new();
    let _ = writeln!(
        trace,
        "market: 3 doctors, 4 hospitals, hospitals rank d1 > d2 > d3"
    );
    for d in 0..example::N_DOCTORS {
        let list: Vec<String> = doctors
            .list(d)
            .iter()
            .map(|&h| name('h', Some(h)))
            .collect();
        let _ = writeln!(trace, "  d{} ranks {}", d + 1, list.join(" "));
    }
    let _ = writeln!(trace, "DA (doctor-proposing, full preferences):");
    for d in 0..example::N_DOCTORS {
        let _ = writeln!(trace, "  d{} - {}", d + 1, name('h', da.doctor(d)));
    }
    let _ = writeln!(trace, "interview schedule (k = k' = {k}):");
    for d in 0..example::N_DOCTORS {
        let set: Vec<String> = stage
            .schedule
            .doctor(d)
            .iter()
            .map(|&h| name('h', Some(h)))
            .collect();
        let _ = writeln!(trace, "  d{} interviews {}", d + 1, set.join(", "));
    }
    let _ = writeln!(
        trace,
        "Int-DA (doctor-proposing, interview-truncated preferences):"
    );
    for d in 0..example::N_DOCTORS {
        let _ = writeln!(trace, "  d{} - {}", d + 1, name('h', int_da.doctor(d)));
    }
    for h in 0..example::N_HOSPITALS {
        if int_da.hospital(h).is_none() {
            let _ = writeln!(trace, "  h{} unmatched", h + 1);
        }
    }
    let _ = writeln!(
        trace,
        "d3 rank: {} under DA, {} under Int-DA",
        da_rank_d3.map_or("-".into(), |r| r.to_string()),
        int_da_rank_d3.map_or("-".into(), |r| r.to_string())
    );
    let pairs: Vec<String> = blocking_pairs
        .iter()
        .map(|&(d, h)| format!("(d{}, h{})", d + 1, h + 1))
        .collect();
    let _ = writeln!(
        trace,
        "Int-DA outcome under full preferences: {}",
        if pairs.is_empty() {
            "stable".to_string()
        } else {
            format!("unstable, blocking pairs {}", pairs.join(" "))
        }
    );

    check(
        da.doctor_assignments() == [Some(0), Some(1), Some(2)],
        "DA should match d_i with h_i",
    )?;
    check(
        (0..3)
            .map(|d| stage.schedule.doctor(d).to_vec())
            .collect::<Vec<_>>()
            == [vec![0, 2], vec![1, 2], vec![0, 3]],
        "interview schedule should be d1:{h1,h3} d2:{h2,h3} d3:{h1,h4}",
    )?;
    check(
        is_pairwise_stable(&stage.schedule, &doctors, &hospitals, k, k).is_pairwise_stable(),
        "interview schedule should be pairwise stable",
    )?;
    check(
        da_rank_d3 == Some(1),
        "d3 should get its first choice under DA",
    )?;
    check(
        int_da_rank_d3 == Some(2),
        "d3 should report rank 2 under Int-DA",
    )?;
    check(
        !blocking_pairs.is_empty(),
        "Int-DA outcome should be unstable",
    )?;

    Ok(ExampleReport {
        da,
        schedule: stage.schedule,
        int_da,
        da_rank_d3,
        int_da_rank_d3,
        blocking_pairs,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_passes_its_checks() {
        let r = run_worked_example().unwrap();
        assert_eq!(r.blocking_pairs, vec![(2, 2)]);
        assert!(r.trace.contains("d3 - h4"));
        assert!(r.trace.contains("h3 unmatched"));
    }
}

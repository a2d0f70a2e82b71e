//! Brute-force ground truth for small markets.
//!
//! Everything here works by exhaustive scanning or enumeration and shares no
//! logic with the proposal algorithms it is used to check.

use std::fmt;

use serde::Serialize;

use crate::da::{check_sides, Matching};
use crate::error::{Error, Result};
use crate::interviews::InterviewSchedule;
use crate::profile::{PreferenceProfile, Side};

/// Largest market `enumerate_stable` accepts.
pub const MAX_ENUMERATE_MATCHING: usize = 8;
/// Largest market `enumerate_pairwise_stable` accepts.
pub const MAX_ENUMERATE_SCHEDULE: usize = 6;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StabilityReport {
    /// Agents matched to a partner missing from their list.
    pub irrational: Vec<(Side, usize)>,
    /// `(doctor, hospital)` pairs that would both rather be together.
    pub blocking_pairs: Vec<(usize, usize)>,
}

impl StabilityReport {
    pub fn is_stable(&self) -> bool {
        self.irrational.is_empty() && self.blocking_pairs.is_empty()
    }
}

/// Scans every agent and every doctor-hospital pair.
pub fn is_stable(
    matching: &Matching,
    doctors: &PreferenceProfile,
    hospitals: &PreferenceProfile,
) -> StabilityReport {
    let mut report = StabilityReport::default();
    for (d, h) in matching.pairs() {
        if !doctors.is_acceptable(d, h) {
            report.irrational.push((Side::Doctor, d));
        }
        if !hospitals.is_acceptable(h, d) {
            report.irrational.push((Side::Hospital, h));
        }
    }
    for d in 0..doctors.n_agents() {
        for h in 0..hospitals.n_agents() {
            if matching.doctor(d) == Some(h) {
                continue;
            }
            if doctors.prefers(d, h, matching.doctor(d))
                && hospitals.prefers(h, d, matching.hospital(h))
            {
                report.blocking_pairs.push((d, h));
            }
        }
    }
    report
}

/// Which blocking condition a non-interviewing pair satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BlockingClause {
    /// The doctor would drop some interview for the hospital and the hospital
    /// would drop some interviewee for the doctor.
    BothReplace,
    /// The doctor would drop some interview; the hospital has a free slot and
    /// finds the doctor acceptable.
    DoctorReplacesHospitalVacant,
    /// The hospital would drop some interviewee; the doctor has a free slot
    /// and finds the hospital acceptable.
    HospitalReplacesDoctorVacant,
    /// Both have free slots and find each other acceptable.
    BothVacant,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Violation {
    DoctorOverCapacity {
        doctor: usize,
        load: usize,
    },
    HospitalOverCapacity {
        hospital: usize,
        load: usize,
    },
    DoctorUnacceptable {
        doctor: usize,
        hospital: usize,
    },
    HospitalUnacceptable {
        hospital: usize,
        doctor: usize,
    },
    Blocking {
        doctor: usize,
        hospital: usize,
        clause: BlockingClause,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DoctorOverCapacity { doctor, load } => {
                write!(f, "doctor {doctor} holds {load} interviews")
            }
            Violation::HospitalOverCapacity { hospital, load } => {
                write!(f, "hospital {hospital} holds {load} interviews")
            }
            Violation::DoctorUnacceptable { doctor, hospital } => {
                write!(
                    f,
                    "doctor {doctor} interviews unacceptable hospital {hospital}"
                )
            }
            Violation::HospitalUnacceptable { hospital, doctor } => {
                write!(
                    f,
                    "hospital {hospital} interviews unacceptable doctor {doctor}"
                )
            }
            Violation::Blocking {
                doctor,
                hospital,
                clause,
            } => write!(f, "({doctor}, {hospital}) blocks via {clause:?}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairwiseReport {
    pub violations: Vec<Violation>,
}

impl PairwiseReport {
    pub fn is_pairwise_stable(&self) -> bool {
        self.violations.is_empty()
    }
}

struct PairView {
    doctor_replaces: bool,
    hospital_replaces: bool,
    doctor_accepts: bool,
    hospital_accepts: bool,
}

fn pair_view(
    schedule_d: &[usize],
    schedule_h: &[usize],
    doctors: &PreferenceProfile,
    hospitals: &PreferenceProfile,
    d: usize,
    h: usize,
) -> PairView {
    PairView {
        doctor_replaces: schedule_d.iter().any(|&h2| doctors.prefers(d, h, Some(h2))),
        hospital_replaces: schedule_h
            .iter()
            .any(|&d2| hospitals.prefers(h, d, Some(d2))),
        doctor_accepts: doctors.is_acceptable(d, h),
        hospital_accepts: hospitals.is_acceptable(h, d),
    }
}

/// Checks capacities, individual rationality and every blocking clause for
/// every non-interviewing pair. All violations are reported.
pub fn is_pairwise_stable(
    schedule: &InterviewSchedule,
    doctors: &PreferenceProfile,
    hospitals: &PreferenceProfile,
    k: usize,
    k_prime: usize,
) -> PairwiseReport {
    let mut violations = Vec::new();
    for d in 0..schedule.n_doctors() {
        let load = schedule.doctor(d).len();
        if load > k {
            violations.push(Violation::DoctorOverCapacity { doctor: d, load });
        }
        for &h in schedule.doctor(d) {
            if !doctors.is_acceptable(d, h) {
                violations.push(Violation::DoctorUnacceptable {
                    doctor: d,
                    hospital: h,
                });
            }
        }
    }
    for h in 0..schedule.n_hospitals() {
        let load = schedule.hospital(h).len();
        if load > k_prime {
            violations.push(Violation::HospitalOverCapacity { hospital: h, load });
        }
        for &d in schedule.hospital(h) {
            if !hospitals.is_acceptable(h, d) {
                violations.push(Violation::HospitalUnacceptable {
                    hospital: h,
                    doctor: d,
                });
            }
        }
    }
    for d in 0..schedule.n_doctors() {
        let d_set = schedule.doctor(d);
        let d_vacant = d_set.len() < k;
        for h in 0..schedule.n_hospitals() {
            if d_set.contains(&h) {
                continue;
            }
            let h_set = schedule.hospital(h);
            let h_vacant = h_set.len() < k_prime;
            let v = pair_view(d_set, h_set, doctors, hospitals, d, h);
            let clauses = [
                (
                    v.doctor_replaces && v.hospital_replaces,
                    BlockingClause::BothReplace,
                ),
                (
                    v.doctor_replaces && v.hospital_accepts && h_vacant,
                    BlockingClause::DoctorReplacesHospitalVacant,
                ),
                (
                    v.hospital_replaces && v.doctor_accepts && d_vacant,
                    BlockingClause::HospitalReplacesDoctorVacant,
                ),
                (
                    v.doctor_accepts && v.hospital_accepts && d_vacant && h_vacant,
                    BlockingClause::BothVacant,
                ),
            ];
            for (holds, clause) in clauses {
                if holds {
                    violations.push(Violation::Blocking {
                        doctor: d,
                        hospital: h,
                        clause,
                    });
                }
            }
        }
    }
    PairwiseReport { violations }
}

fn guard(doctors: &PreferenceProfile, hospitals: &PreferenceProfile, max: usize) -> Result<()> {
    check_sides(doctors, hospitals)?;
    if doctors.n_agents() > max || hospitals.n_agents() > max {
        return Err(Error::SizeGuard {
            doctors: doctors.n_agents(),
            hospitals: hospitals.n_agents(),
            max_doctors: max,
            max_hospitals: max,
        });
    }
    Ok(())
}

/// Every stable matching, by exhaustive search over individually rational
/// assignments. Limited to 8x8 markets.
pub fn enumerate_stable(
    doctors: &PreferenceProfile,
    hospitals: &PreferenceProfile,
) -> Result<Vec<Matching>> {
    guard(doctors, hospitals, MAX_ENUMERATE_MATCHING)?;
    let nd = doctors.n_agents();
    let nh = hospitals.n_agents();
    let mut assignment: Vec<Option<usize>> = vec![None; nd];
    let mut taken = vec![false; nh];
    let mut out = Vec::new();

    fn walk(
        d: usize,
        assignment: &mut Vec<Option<usize>>,
        taken: &mut Vec<bool>,
        doctors: &PreferenceProfile,
        hospitals: &PreferenceProfile,
        out: &mut Vec<Matching>,
    ) {
        if d == assignment.len() {
            let pairs = assignment
                .iter()
                .enumerate()
                .filter_map(|(d, h)| h.map(|h| (d, h)));
            let m = Matching::from_pairs(assignment.len(), taken.len(), pairs)
                .expect("search assigns each hospital once");
            if is_stable(&m, doctors, hospitals).is_stable() {
                out.push(m);
            }
            return;
        }
        walk(d + 1, assignment, taken, doctors, hospitals, out);
        for h in 0..taken.len() {
            if !taken[h] && doctors.is_acceptable(d, h) && hospitals.is_acceptable(h, d) {
                taken[h] = true;
                assignment[d] = Some(h);
                walk(d + 1, assignment, taken, doctors, hospitals, out);
                assignment[d] = None;
                taken[h] = false;
            }
        }
    }

    walk(0, &mut assignment, &mut taken, doctors, hospitals, &mut out);
    Ok(out)
}

/// Every `(k, k')` pairwise-stable schedule, by exhaustive search over
/// individually rational schedules within capacity. Limited to 6x6 markets.
///
/// Branches are cut once a pair satisfies a blocking clause that can no
/// longer be undone: interview sets of already-placed doctors are final and
/// hospital sets only grow, so "hospital would replace someone" stays true.
pub fn enumerate_pairwise_stable(
    doctors: &PreferenceProfile,
    hospitals: &PreferenceProfile,
    k: usize,
    k_prime: usize,
) -> Result<Vec<InterviewSchedule>> {
    guard(doctors, hospitals, MAX_ENUMERATE_SCHEDULE)?;
    let nd = doctors.n_agents();
    let nh = hospitals.n_agents();

    // Candidate sets per doctor: subsets of size <= k of mutually acceptable
    // hospitals.
    let candidates: Vec<Vec<Vec<usize>>> = (0..nd)
        .map(|d| {
            let pool: Vec<usize> = (0..nh)
                .filter(|&h| doctors.is_acceptable(d, h) && hospitals.is_acceptable(h, d))
                .collect();
            subsets_up_to(&pool, k)
        })
        .collect();

    struct Search<'a> {
        doctors: &'a PreferenceProfile,
        hospitals: &'a PreferenceProfile,
        k: usize,
        k_prime: usize,
        candidates: Vec<Vec<Vec<usize>>>,
        sets: Vec<Vec<usize>>,
        loads: Vec<Vec<usize>>,
        out: Vec<InterviewSchedule>,
    }

    impl Search<'_> {
        fn settled_block(&self, placed: usize) -> bool {
            for d in 0..placed {
                let d_set = &self.sets[d];
                for h in 0..self.loads.len() {
                    if d_set.contains(&h) {
                        continue;
                    }
                    let v = pair_view(d_set, &self.loads[h], self.doctors, self.hospitals, d, h);
                    if v.hospital_replaces
                        && (v.doctor_replaces || (v.doctor_accepts && d_set.len() < self.k))
                    {
                        return true;
                    }
                }
            }
            false
        }

        fn walk(&mut self, d: usize) {
            if d == self.sets.len() {
                let schedule = InterviewSchedule::from_doctor_sets(self.loads.len(), &self.sets)
                    .expect("candidate sets are in range");
                if is_pairwise_stable(
                    &schedule,
                    self.doctors,
                    self.hospitals,
                    self.k,
                    self.k_prime,
                )
                .is_pairwise_stable()
                {
                    self.out.push(schedule);
                }
                return;
            }
            for i in 0..self.candidates[d].len() {
                let set = self.candidates[d][i].clone();
                if set.iter().any(|&h| self.loads[h].len() >= self.k_prime) {
                    continue;
                }
                for &h in &set {
                    self.loads[h].push(d);
                }
                self.sets[d] = set;
                if !self.settled_block(d + 1) {
                    self.walk(d + 1);
                }
                for &h in &self.sets[d] {
                    self.loads[h].pop();
                }
                self.sets[d].clear();
            }
        }
    }

    let mut search = Search {
        doctors,
        hospitals,
        k,
        k_prime,
        candidates,
        sets: vec![Vec::new(); nd],
        loads: vec![Vec::new(); nh],
        out: Vec::new(),
    };
    search.walk(0);
    Ok(search.out)
}

fn subsets_up_to(pool: &[usize], max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &x in pool {
        let extended: Vec<Vec<usize>> = out
            .iter()
            .filter(|s| s.len() < max)
            .map(|s| {
                let mut s = s.clone();
                s.push(x);
                s
            })
            .collect();
        out.extend(extended);
    }
    out
}

/// Responsive comparison of two partner sets for `agent`: `a` is weakly
/// preferred to `b` when, pairing both sets best-to-worst, every member of
/// `b` is matched by a member of `a` that is at least as good.
///
/// Unlisted partners count as worse than every listed one.
pub fn responsively_weakly_prefers(
    profile: &PreferenceProfile,
    agent: usize,
    a: &[usize],
    b: &[usize],
) -> bool {
    let sorted = |set: &[usize]| {
        let mut p: Vec<usize> = set
            .iter()
            .map(|&x| profile.position(agent, x).unwrap_or(usize::MAX))
            .collect();
        p.sort_unstable();
        p
    };
    let (pa, pb) = (sorted(a), sorted(b));
    pa.len() >= pb.len() && pa.iter().zip(&pb).all(|(x, y)| x <= y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example;

    fn full(side: Side, n_agents: usize, n_partners: usize) -> PreferenceProfile {
        PreferenceProfile::uniform(
            side,
            n_agents,
            n_partners,
            &(0..n_partners).collect::<Vec<_>>(),
        )
        .unwrap()
    }

    #[test]
    fn worked_example_da_outcome_is_stable() {
        let (d, h) = example::profiles();
        let m = Matching::from_pairs(3, 4, [(0, 0), (1, 1), (2, 2)]).unwrap();
        assert!(is_stable(&m, &d, &h).is_stable());
    }

    #[test]
    fn worked_example_int_da_outcome_blocks() {
        let (d, h) = example::profiles();
        let m = Matching::from_pairs(3, 4, [(0, 0), (1, 1), (2, 3)]).unwrap();
        let r = is_stable(&m, &d, &h);
        assert!(!r.is_stable());
        assert!(r.blocking_pairs.contains(&(2, 2)));
    }

    #[test]
    fn irrational_match_reported() {
        let d = PreferenceProfile::new(Side::Doctor, 1, vec![vec![]]).unwrap();
        let h = full(Side::Hospital, 1, 1);
        let m = Matching::from_pairs(1, 1, [(0, 0)]).unwrap();
        let r = is_stable(&m, &d, &h);
        assert_eq!(r.irrational, vec![(Side::Doctor, 0)]);
    }

    #[test]
    fn worked_example_schedule_pairwise_stable() {
        let (d, h) = example::profiles();
        let s =
            InterviewSchedule::from_doctor_sets(4, &[vec![0, 2], vec![1, 2], vec![0, 3]]).unwrap();
        let r = is_pairwise_stable(&s, &d, &h, 2, 2);
        assert!(r.is_pairwise_stable(), "{:?}", r.violations);
    }

    #[test]
    fn empty_schedule_blocked_by_vacancies() {
        let d = full(Side::Doctor, 2, 2);
        let h = full(Side::Hospital, 2, 2);
        let r = is_pairwise_stable(&InterviewSchedule::empty(2, 2), &d, &h, 1, 1);
        assert!(!r.is_pairwise_stable());
        assert!(r.violations.iter().all(|v| matches!(
            v,
            Violation::Blocking {
                clause: BlockingClause::BothVacant,
                ..
            }
        )));
        assert_eq!(r.violations.len(), 4);
    }

    #[test]
    fn over_capacity_reported() {
        let d = full(Side::Doctor, 1, 2);
        let h = full(Side::Hospital, 2, 1);
        let s = InterviewSchedule::from_doctor_sets(2, &[vec![0, 1]]).unwrap();
        let r = is_pairwise_stable(&s, &d, &h, 1, 1);
        assert!(r
            .violations
            .contains(&Violation::DoctorOverCapacity { doctor: 0, load: 2 }));
    }

    #[test]
    fn unacceptable_interview_reported() {
        let d = PreferenceProfile::new(Side::Doctor, 1, vec![vec![]]).unwrap();
        let h = full(Side::Hospital, 1, 1);
        let s = InterviewSchedule::from_doctor_sets(1, &[vec![0]]).unwrap();
        let r = is_pairwise_stable(&s, &d, &h, 1, 1);
        assert!(r.violations.contains(&Violation::DoctorUnacceptable {
            doctor: 0,
            hospital: 0
        }));
    }

    #[test]
    fn enumerate_worked_example() {
        let (d, h) = example::profiles();
        let all = enumerate_stable(&d, &h).unwrap();
        let da = Matching::from_pairs(3, 4, [(0, 0), (1, 1), (2, 2)]).unwrap();
        assert_eq!(all, vec![da]);
    }

    #[test]
    fn identical_preferences_unique_stable() {
        let d = full(Side::Doctor, 3, 3);
        let h = full(Side::Hospital, 3, 3);
        let all = enumerate_stable(&d, &h).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].doctor_assignments(), &[Some(0), Some(1), Some(2)]);
    }

    #[test]
    fn latin_square_has_three_stable_matchings() {
        // Classic 3x3 instance with doctor-optimal, hospital-optimal and a middle matching.
        let d = PreferenceProfile::new(
            Side::Doctor,
            3,
            vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]],
        )
        .unwrap();
        let h = PreferenceProfile::new(
            Side::Hospital,
            3,
            vec![vec![1, 2, 0], vec![2, 0, 1], vec![0, 1, 2]],
        )
        .unwrap();
        assert_eq!(enumerate_stable(&d, &h).unwrap().len(), 3);
    }

    #[test]
    fn size_guards() {
        let d = full(Side::Doctor, 9, 2);
        let h = full(Side::Hospital, 2, 9);
        assert!(matches!(
            enumerate_stable(&d, &h),
            Err(Error::SizeGuard { .. })
        ));
        let d = full(Side::Doctor, 7, 2);
        let h = full(Side::Hospital, 2, 7);
        assert!(enumerate_stable(&d, &h).is_ok());
        assert!(matches!(
            enumerate_pairwise_stable(&d, &h, 1, 1),
            Err(Error::SizeGuard { .. })
        ));
    }

    #[test]
    fn enumerate_schedules_worked_example() {
        let (d, h) = example::profiles();
        let all = enumerate_pairwise_stable(&d, &h, 2, 2).unwrap();
        let expected =
            InterviewSchedule::from_doctor_sets(4, &[vec![0, 2], vec![1, 2], vec![0, 3]]).unwrap();
        assert!(all.contains(&expected));
        for s in &all {
            assert!(is_pairwise_stable(s, &d, &h, 2, 2).is_pairwise_stable());
        }
    }

    #[test]
    fn responsive_comparison() {
        let d = full(Side::Doctor, 1, 4);
        assert!(responsively_weakly_prefers(&d, 0, &[0, 2], &[1, 2]));
        assert!(!responsively_weakly_prefers(&d, 0, &[1, 2], &[0, 2]));
        assert!(responsively_weakly_prefers(&d, 0, &[0, 3], &[1]));
        assert!(!responsively_weakly_prefers(&d, 0, &[0], &[1, 2]));
        assert!(!responsively_weakly_prefers(&d, 0, &[0, 3], &[1, 2]));
        assert!(responsively_weakly_prefers(&d, 0, &[], &[]));
    }

    #[test]
    fn subsets_counted() {
        assert_eq!(subsets_up_to(&[0, 1, 2, 3], 2).len(), 1 + 4 + 6);
        assert_eq!(subsets_up_to(&[], 2), vec![Vec::<usize>::new()]);
    }
}

//! Capacity-constrained interview scheduling and preference truncation.

use serde::{Deserialize, Serialize};

use crate::da::{check_sides, deferred_acceptance, Matching};
use crate::error::{Error, Result};
use crate::market::{to_preferences, MarketInstance};
use crate::profile::{PreferenceProfile, Side};

/// Many-to-many assignment of interviews. Both adjacency lists are kept
/// sorted by index and mirror each other.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterviewSchedule {
    doctor_interviews: Vec<Vec<usize>>,
    hospital_interviews: Vec<Vec<usize>>,
}

impl InterviewSchedule {
    pub fn empty(n_doctors: usize, n_hospitals: usize) -> Self {
        InterviewSchedule {
            doctor_interviews: vec![Vec::new(); n_doctors],
            hospital_interviews: vec![Vec::new(); n_hospitals],
        }
    }

    /// Builds the schedule in which doctor `d` interviews exactly `sets[d]`.
    pub fn from_doctor_sets(n_hospitals: usize, sets: &[Vec<usize>]) -> Result<Self> {
        let mut s = InterviewSchedule::empty(sets.len(), n_hospitals);
        for (d, set) in sets.iter().enumerate() {
            for &h in set {
                if h >= n_hospitals {
                    return Err(Error::DimensionMismatch(format!(
                        "doctor {d} interviews hospital {h}, but only {n_hospitals} exist"
                    )));
                }
                if s.doctor_interviews[d].contains(&h) {
                    return Err(Error::DimensionMismatch(format!(
                        "doctor {d} interviews hospital {h} twice"
                    )));
                }
                s.doctor_interviews[d].push(h);
                s.hospital_interviews[h].push(d);
            }
            s.doctor_interviews[d].sort_unstable();
        }
        Ok(s)
    }

    pub fn n_doctors(&self) -> usize {
        self.doctor_interviews.len()
    }

    pub fn n_hospitals(&self) -> usize {
        self.hospital_interviews.len()
    }

    /// Hospitals interviewing doctor `d`, ascending.
    pub fn doctor(&self, d: usize) -> &[usize] {
        &self.doctor_interviews[d]
    }

    /// Doctors interviewed by hospital `h`, ascending.
    pub fn hospital(&self, h: usize) -> &[usize] {
        &self.hospital_interviews[h]
    }

    pub fn partners(&self, side: Side, agent: usize) -> &[usize] {
        match side {
            Side::Doctor => self.doctor(agent),
            Side::Hospital => self.hospital(agent),
        }
    }

    pub fn contains(&self, d: usize, h: usize) -> bool {
        self.doctor_interviews[d].binary_search(&h).is_ok()
    }

    pub fn n_interviews(&self) -> usize {
        self.doctor_interviews.iter().map(Vec::len).sum()
    }
}

fn check_capacities(k: usize, k_prime: usize) -> Result<()> {
    if k == 0 || k_prime == 0 {
        return Err(Error::InvalidConfig(format!(
            "interview capacities must be positive, got k={k}, k'={k_prime}"
        )));
    }
    Ok(())
}

/// Doctor-optimal `(k, k')` pairwise-stable interview schedule.
///
/// Capacitated many-to-many deferred acceptance: a doctor holding fewer than
/// `k` interviews proposes to the best hospital on its list it has not yet
/// asked; a hospital keeps its best `k_prime` acceptable proposers and
/// rejects the worst one when over capacity. Runs until no doctor can
/// propose. Capacities above the market size simply never bind.
pub fn interview_schedule(
    doctors: &PreferenceProfile,
    hospitals: &PreferenceProfile,
    k: usize,
    k_prime: usize,
) -> Result<InterviewSchedule> {
    check_sides(doctors, hospitals)?;
    check_capacities(k, k_prime)?;
    let nd = doctors.n_agents();
    let nh = hospitals.n_agents();

    let mut next = vec![0usize; nd];
    let mut holding = vec![0usize; nd];
    // Held proposers per hospital, best first.
    let mut held: Vec<Vec<usize>> = vec![Vec::new(); nh];
    let mut active: Vec<usize> = (0..nd).rev().collect();

    while let Some(d) = active.pop() {
        let list = doctors.list(d);
        while holding[d] < k && next[d] < list.len() {
            let h = list[next[d]];
            next[d] += 1;
            let Some(pos) = hospitals.position(h, d) else {
                continue;
            };
            let slot = &mut held[h];
            let at =
                slot.partition_point(|&x| hospitals.position(h, x).expect("held is listed") < pos);
            if at >= k_prime {
                continue;
            }
            slot.insert(at, d);
            holding[d] += 1;
            if slot.len() > k_prime {
                let worst = slot.pop().expect("over capacity");
                holding[worst] -= 1;
                active.push(worst);
            }
        }
    }

    let mut schedule = InterviewSchedule::empty(nd, nh);
    for (h, ds) in held.into_iter().enumerate() {
        for d in ds {
            schedule.doctor_interviews[d].push(h);
            schedule.hospital_interviews[h].push(d);
        }
    }
    for list in schedule.hospital_interviews.iter_mut() {
        list.sort_unstable();
    }
    Ok(schedule)
}

/// Restricts every list to the agent's interview partners, keeping order.
pub fn truncate_by_interviews(
    profile: &PreferenceProfile,
    schedule: &InterviewSchedule,
) -> Result<PreferenceProfile> {
    let (n_agents, n_partners) = match profile.side() {
        Side::Doctor => (schedule.n_doctors(), schedule.n_hospitals()),
        Side::Hospital => (schedule.n_hospitals(), schedule.n_doctors()),
    };
    if profile.n_agents() != n_agents || profile.n_partners() != n_partners {
        return Err(Error::DimensionMismatch(format!(
            "{} profile is {}x{}, schedule expects {}x{}",
            profile.side(),
            profile.n_agents(),
            profile.n_partners(),
            n_agents,
            n_partners
        )));
    }
    let side = profile.side();
    Ok(profile.filter(|a, b| schedule.partners(side, a).binary_search(&b).is_ok()))
}

/// Cuts every list to its first `k` entries.
pub fn truncate_top_k(profile: &PreferenceProfile, k: usize) -> PreferenceProfile {
    profile.filter(|a, b| profile.position(a, b).is_some_and(|p| p < k))
}

/// Interview schedule plus both sides' interview-truncated profiles.
#[derive(Clone, Debug)]
pub struct InterviewStage {
    pub schedule: InterviewSchedule,
    pub doctors: PreferenceProfile,
    pub hospitals: PreferenceProfile,
}

impl InterviewStage {
    pub fn run(
        doctors: &PreferenceProfile,
        hospitals: &PreferenceProfile,
        k: usize,
        k_prime: usize,
    ) -> Result<Self> {
        let schedule = interview_schedule(doctors, hospitals, k, k_prime)?;
        Ok(InterviewStage {
            doctors: truncate_by_interviews(doctors, &schedule)?,
            hospitals: truncate_by_interviews(hospitals, &schedule)?,
            schedule,
        })
    }

    /// Deferred acceptance on the truncated profiles.
    pub fn match_with(&self, proposing: Side) -> Matching {
        deferred_acceptance(&self.doctors, &self.hospitals, proposing)
            .expect("truncated profiles share the original index space")
    }
}

/// Int-DA: schedule interviews, truncate both sides to interview partners,
/// then run deferred acceptance with `proposing` proposing.
pub fn int_da(
    instance: &MarketInstance,
    k: usize,
    k_prime: usize,
    proposing: Side,
) -> Result<(InterviewSchedule, Matching)> {
    let doctors = to_preferences(instance, Side::Doctor);
    let hospitals = to_preferences(instance, Side::Hospital);
    let stage = InterviewStage::run(&doctors, &hospitals, k, k_prime)?;
    let matching = stage.match_with(proposing);
    Ok((stage.schedule, matching))
}

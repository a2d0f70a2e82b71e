//! One-to-one deferred acceptance and serial dictatorship.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profile::{PreferenceProfile, Side};

/// One-to-one assignment between doctors and hospitals. `None` means unmatched.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    doctor_to_hospital: Vec<Option<usize>>,
    hospital_to_doctor: Vec<Option<usize>>,
}

impl Matching {
    pub fn empty(n_doctors: usize, n_hospitals: usize) -> Self {
        Matching {
            doctor_to_hospital: vec![None; n_doctors],
            hospital_to_doctor: vec![None; n_hospitals],
        }
    }

    /// Builds a matching from `(doctor, hospital)` pairs; every agent may
    /// appear at most once.
    pub fn from_pairs(
        n_doctors: usize,
        n_hospitals: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut m = Matching::empty(n_doctors, n_hospitals);
        for (d, h) in pairs {
            if d >= n_doctors || h >= n_hospitals {
                return Err(Error::DimensionMismatch(format!(
                    "pair ({d}, {h}) outside a {n_doctors}x{n_hospitals} market"
                )));
            }
            if m.doctor_to_hospital[d].is_some() || m.hospital_to_doctor[h].is_some() {
                return Err(Error::DimensionMismatch(format!(
                    "pair ({d}, {h}) reuses a matched agent"
                )));
            }
            m.doctor_to_hospital[d] = Some(h);
            m.hospital_to_doctor[h] = Some(d);
        }
        Ok(m)
    }

    fn from_receiver_map(receivers: Side, held: Vec<Option<usize>>, n_proposers: usize) -> Self {
        let mut proposer_map = vec![None; n_proposers];
        for (r, p) in held.iter().enumerate() {
            if let Some(p) = *p {
                proposer_map[p] = Some(r);
            }
        }
        match receivers {
            Side::Hospital => Matching {
                doctor_to_hospital: proposer_map,
                hospital_to_doctor: held,
            },
            Side::Doctor => Matching {
                doctor_to_hospital: held,
                hospital_to_doctor: proposer_map,
            },
        }
    }

    pub fn n_doctors(&self) -> usize {
        self.doctor_to_hospital.len()
    }

    pub fn n_hospitals(&self) -> usize {
        self.hospital_to_doctor.len()
    }

    pub fn doctor(&self, d: usize) -> Option<usize> {
        self.doctor_to_hospital[d]
    }

    pub fn hospital(&self, h: usize) -> Option<usize> {
        self.hospital_to_doctor[h]
    }

    pub fn partner(&self, side: Side, agent: usize) -> Option<usize> {
        match side {
            Side::Doctor => self.doctor_to_hospital[agent],
            Side::Hospital => self.hospital_to_doctor[agent],
        }
    }

    pub fn doctor_assignments(&self) -> &[Option<usize>] {
        &self.doctor_to_hospital
    }

    pub fn hospital_assignments(&self) -> &[Option<usize>] {
        &self.hospital_to_doctor
    }

    pub fn n_agents(&self, side: Side) -> usize {
        match side {
            Side::Doctor => self.n_doctors(),
            Side::Hospital => self.n_hospitals(),
        }
    }

    /// Matched `(doctor, hospital)` pairs in doctor order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.doctor_to_hospital
            .iter()
            .enumerate()
            .filter_map(|(d, h)| h.map(|h| (d, h)))
    }

    pub fn n_matched(&self) -> usize {
        self.doctor_to_hospital.iter().flatten().count()
    }
}

/// Proposer-optimal stable matching of `proposers` against `receivers`.
///
/// Free proposers wait on a LIFO stack seeded so that agent 0 moves first;
/// each proposes down its own list. The outcome does not depend on this
/// order. Returns, per receiver, the proposer it holds.
fn propose(proposers: &PreferenceProfile, receivers: &PreferenceProfile) -> Vec<Option<usize>> {
    let mut next = vec![0usize; proposers.n_agents()];
    let mut held: Vec<Option<usize>> = vec![None; receivers.n_agents()];
    let mut free: Vec<usize> = (0..proposers.n_agents()).rev().collect();
    while let Some(p) = free.pop() {
        let list = proposers.list(p);
        while next[p] < list.len() {
            let r = list[next[p]];
            next[p] += 1;
            if receivers.prefers(r, p, held[r]) {
                if let Some(bumped) = held[r].replace(p) {
                    free.push(bumped);
                }
                break;
            }
        }
    }
    held
}

/// Deferred acceptance on strict (possibly truncated) profiles.
///
/// Returns the stable matching optimal for `proposing`. A match only forms
/// between mutually listed agents.
pub fn deferred_acceptance(
    doctors: &PreferenceProfile,
    hospitals: &PreferenceProfile,
    proposing: Side,
) -> Result<Matching> {
    check_sides(doctors, hospitals)?;
    Ok(match proposing {
        Side::Doctor => Matching::from_receiver_map(
            Side::Hospital,
            propose(doctors, hospitals),
            doctors.n_agents(),
        ),
        Side::Hospital => Matching::from_receiver_map(
            Side::Doctor,
            propose(hospitals, doctors),
            hospitals.n_agents(),
        ),
    })
}

pub(crate) fn check_sides(
    doctors: &PreferenceProfile,
    hospitals: &PreferenceProfile,
) -> Result<()> {
    if doctors.side() != Side::Doctor || hospitals.side() != Side::Hospital {
        return Err(Error::DimensionMismatch(format!(
            "expected doctor and hospital profiles, got {} and {}",
            doctors.side(),
            hospitals.side()
        )));
    }
    doctors.check_counterpart(hospitals)
}

/// Hospitals choose in the order of `common_doctor_pref`, each taking its
/// favourite remaining doctor from its own list.
///
/// Equivalent to doctor-proposing DA when every doctor submits
/// `common_doctor_pref`; hospitals absent from it are unacceptable to all
/// doctors and never choose.
pub fn serial_dictatorship(
    common_doctor_pref: &[usize],
    hospitals: &PreferenceProfile,
) -> Result<Matching> {
    if hospitals.side() != Side::Hospital {
        return Err(Error::DimensionMismatch(
            "expected a hospital profile".into(),
        ));
    }
    let n_hospitals = hospitals.n_agents();
    let n_doctors = hospitals.n_partners();
    let mut seen = vec![false; n_hospitals];
    for &h in common_doctor_pref {
        if h >= n_hospitals || std::mem::replace(&mut seen[h], true) {
            return Err(Error::MalformedProfile {
                side: "doctor",
                reason: format!("common list entry {h} is duplicated or out of range"),
            });
        }
    }
    let mut m = Matching::empty(n_doctors, n_hospitals);
    for &h in common_doctor_pref {
        if let Some(&d) = hospitals
            .list(h)
            .iter()
            .find(|&&d| m.doctor_to_hospital[d].is_none())
        {
            m.doctor_to_hospital[d] = Some(h);
            m.hospital_to_doctor[h] = Some(d);
        }
    }
    Ok(m)
}

/// Rank-order of `agent`'s partner in `profile` (1 = top choice), `None` if
/// unmatched.
pub fn rank_of_match(
    matching: &Matching,
    profile: &PreferenceProfile,
    agent: usize,
) -> Result<Option<usize>> {
    let side = profile.side();
    match matching.partner(side, agent) {
        None => Ok(None),
        Some(partner) => profile
            .rank(agent, partner)
            .map(Some)
            .ok_or(Error::PartnerNotListed {
                side: side.as_str(),
                agent,
                partner,
            }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example;

    #[test]
    fn worked_example_doctor_proposing() {
        let (d, h) = example::profiles();
        let m = deferred_acceptance(&d, &h, Side::Doctor).unwrap();
        assert_eq!(m.doctor_assignments(), &[Some(0), Some(1), Some(2)]);
        assert_eq!(m.hospital(3), None);
        assert_eq!(rank_of_match(&m, &d, 2).unwrap(), Some(1));
        assert_eq!(rank_of_match(&m, &h, 3).unwrap(), None);
    }

    #[test]
    fn single_pair() {
        let d = PreferenceProfile::new(Side::Doctor, 1, vec![vec![0]]).unwrap();
        let h = PreferenceProfile::new(Side::Hospital, 1, vec![vec![0]]).unwrap();
        for side in [Side::Doctor, Side::Hospital] {
            let m = deferred_acceptance(&d, &h, side).unwrap();
            assert_eq!(m.doctor(0), Some(0));
            assert_eq!(rank_of_match(&m, &d, 0).unwrap(), Some(1));
            assert_eq!(rank_of_match(&m, &h, 0).unwrap(), Some(1));
        }
    }

    #[test]
    fn one_sided_acceptability_leaves_unmatched() {
        let d = PreferenceProfile::new(Side::Doctor, 1, vec![vec![0]]).unwrap();
        let h = PreferenceProfile::new(Side::Hospital, 1, vec![vec![]]).unwrap();
        let m = deferred_acceptance(&d, &h, Side::Hospital).unwrap();
        assert_eq!(m.n_matched(), 0);
        let m = deferred_acceptance(&d, &h, Side::Doctor).unwrap();
        assert_eq!(m.n_matched(), 0);
    }

    #[test]
    fn hospital_proposing_on_worked_example() {
        // Hospitals share d1 > d2 > d3, so the stable matching is unique.
        let (d, h) = example::profiles();
        let a = deferred_acceptance(&d, &h, Side::Doctor).unwrap();
        let b = deferred_acceptance(&d, &h, Side::Hospital).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn serial_dictatorship_on_worked_hospitals() {
        let (_, h) = example::profiles();
        let m = serial_dictatorship(&[0, 1, 2, 3], &h).unwrap();
        assert_eq!(m.doctor_assignments(), &[Some(0), Some(1), Some(2)]);
        assert_eq!(m.hospital(3), None);
    }

    #[test]
    fn serial_dictatorship_single_hospital() {
        let h = PreferenceProfile::new(Side::Hospital, 3, vec![vec![2, 0]]).unwrap();
        let m = serial_dictatorship(&[0], &h).unwrap();
        assert_eq!(m.hospital(0), Some(2));
    }

    #[test]
    fn serial_dictatorship_rejects_bad_order() {
        let (_, h) = example::profiles();
        assert!(serial_dictatorship(&[0, 0], &h).is_err());
        assert!(serial_dictatorship(&[4], &h).is_err());
    }

    #[test]
    fn rank_of_unlisted_partner_is_an_error() {
        let d = PreferenceProfile::new(Side::Doctor, 2, vec![vec![1]]).unwrap();
        let m = Matching::from_pairs(1, 2, [(0, 0)]).unwrap();
        assert!(matches!(
            rank_of_match(&m, &d, 0),
            Err(Error::PartnerNotListed {
                agent: 0,
                partner: 0,
                ..
            })
        ));
    }

    #[test]
    fn mismatched_profiles_rejected() {
        let d = PreferenceProfile::new(Side::Doctor, 2, vec![vec![0, 1]]).unwrap();
        let h = PreferenceProfile::new(Side::Hospital, 2, vec![vec![0, 1]; 2]).unwrap();
        assert!(deferred_acceptance(&d, &h, Side::Doctor).is_err());
        assert!(deferred_acceptance(&d, &d, Side::Doctor).is_err());
    }

    #[test]
    fn from_pairs_rejects_reuse() {
        assert!(Matching::from_pairs(2, 2, [(0, 0), (1, 0)]).is_err());
        assert!(Matching::from_pairs(2, 2, [(0, 2)]).is_err());
    }
}

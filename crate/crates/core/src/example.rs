//! The 3-doctor, 4-hospital market where interviews make a doctor's
//! reported rank worse than under plain DA.
//!
//! Hospitals all rank `d1 > d2 > d3`. Doctors rank (best first):
//!
//! ```text
//! d1: h1 h3 h2 h4
//! d2: h2 h3 h1 h4
//! d3: h3 h1 h4 h2
//! ```
//!
//! Indices are 0-based: `d1` is doctor 0, `h4` is hospital 3.

use crate::profile::{PreferenceProfile, Side};

pub const N_DOCTORS: usize = 3;
pub const N_HOSPITALS: usize = 4;
/// Interview capacity on both sides.
pub const CAPACITY: usize = 2;

pub fn doctor_lists() -> Vec<Vec<usize>> {
    vec![vec![0, 2, 1, 3], vec![1, 2, 0, 3], vec![2, 0, 3, 1]]
}

pub fn hospital_lists() -> Vec<Vec<usize>> {
    vec![vec![0, 1, 2]; N_HOSPITALS]
}

/// `(doctors, hospitals)` profiles of the example market.
pub fn profiles() -> (PreferenceProfile, PreferenceProfile) {
    (
        PreferenceProfile::new(Side::Doctor, N_HOSPITALS, doctor_lists()).expect("static lists"),
        PreferenceProfile::new(Side::Hospital, N_DOCTORS, hospital_lists()).expect("static lists"),
    )
}

//! An exact generalized probabilistic theory of keys and locks: key
//! systems reveal prefixes of a stored bit string, lock systems open on a
//! matching input, and joint systems admit adaptive measurements that
//! product measurements cannot imitate.

pub mod bits;
pub mod effect;
pub mod error;
pub mod json;
pub mod protocol;
pub mod state;
pub mod tomography;

pub use bits::BitString;
pub use effect::{
    adaptive_effect_eval, key_eval, lock_eval, open_probability, product_effect_eval, KeyEffect,
    LockEffect, LockOutcome,
};
pub use error::{GptError, Result};
pub use protocol::{
    adaptive_distance, correlated_state, empty_bottom_state, product_family_distance,
    CORRELATED_MAX_N, PRODUCT_MAX_N,
};
pub use state::{JointState, KeyState, LockLabel, LockState, Mixture};
pub use tomography::{
    local_tomography_check, tomography_report, TomographyReport, TOMOGRAPHY_MAX_LEN,
};

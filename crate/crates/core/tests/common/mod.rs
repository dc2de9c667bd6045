//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

pub mod delaunay;
pub mod dismantle;

//! The bundled demo: five point scatterers around an out-and-back path.
//!
//! The return leg revisits the outbound positions, so the two halves of the
//! run image the same region and form a loop.

use uwbsar_core::geometry::Pose2;
use uwbsar_core::simulator::Scatterer;

use crate::textio::{parse_scene, parse_trajectory};

pub const SCENE: &str = include_str!("../data/demo_scene.txt");
pub const TRAJECTORY: &str = include_str!("../data/demo_trajectory.txt");

pub fn scene() -> Vec<Scatterer> {
    parse_scene(SCENE).expect("bundled scene parses")
}

pub fn trajectory() -> Vec<Pose2> {
    parse_trajectory(TRAJECTORY).expect("bundled trajectory parses")
}

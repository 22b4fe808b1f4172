pub mod calibrate;
pub mod coverage;
pub mod noise;
pub mod replay;
pub mod stats;
pub mod sweep;

use anyhow::Result;

use crate::args::Command;

pub fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Sweep(a) => sweep::run(&a),
        Command::Coverage(a) => coverage::run(&a),
        Command::Calibrate(a) => calibrate::run(&a),
        Command::Noise(a) => noise::run(&a),
        Command::Stats(a) => stats::run(&a),
        Command::Replay(a) => replay::run(&a),
    }
}

//! Subcommand handlers. Each one fills an [`Out`] with tables, verdicts and data.

pub mod combinatorics;
pub mod ellipsoid;
pub mod twist;

use crate::args::Command;
use crate::{Ctx, Out, RunError};

pub fn dispatch(c: &Command, ctx: &Ctx, out: &mut Out) -> Result<(), RunError> {
    match c {
        Command::Ellipsoid(e) => ellipsoid::run(e, ctx, out),
        Command::Twist(t) => twist::run(t, ctx, out),
        Command::Partitions(p) => combinatorics::partitions(p, out),
        Command::Score(s) => combinatorics::score(s, ctx, out),
        Command::Tower(t) => combinatorics::tower(t, ctx, out),
        Command::Selftest => crate::selftest::run(ctx, out),
    }
}

//! Assignment trace records.
//!
//! One CSV row per scheduled link:
//!
//! ```text
//! frame,subcarrier,q,combination_size,combination,beam,user,sinr
//! ```
//!
//! `q` is the number of active beams on the subcarrier, `combination` the
//! zero-based lexicographic index among `C(N_T, combination_size)` subsets.

use std::io::{self, Write};

use super::Assignment;

pub fn write_assignment_header<W: Write>(out: &mut W) -> io::Result<()> {
    writeln!(out, "frame,subcarrier,q,combination_size,combination,beam,user,sinr")
}

pub fn write_assignment_records<W: Write>(
    out: &mut W,
    frame: u64,
    assignment: &Assignment,
) -> io::Result<()> {
    for (m, d) in assignment.decisions().iter().enumerate() {
        for l in &d.links {
            writeln!(
                out,
                "{frame},{m},{},{},{},{},{},{:.16e}",
                d.q(),
                d.combination_size,
                d.combination,
                l.beam,
                l.user,
                l.sinr
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::EquivalentGains;
    use crate::scheduling::{schedule_frame, EqualPower, QPolicy, SchedulerMode};

    #[test]
    fn one_row_per_link() {
        let g = EquivalentGains::new(2, 2, 2, vec![10.0, 0.0, 0.0, 1.0, 0.0, 10.0, 2.0, 0.0]).unwrap();
        let a = schedule_frame(
            &g,
            SchedulerMode::new(QPolicy::Dynamic, false),
            EqualPower::new(1.0, 1.0).unwrap(),
            None,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_assignment_header(&mut buf).unwrap();
        write_assignment_records(&mut buf, 9, &a).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + a.scheduled_links());
        assert!(text.lines().nth(1).unwrap().starts_with("9,0,"));
    }
}

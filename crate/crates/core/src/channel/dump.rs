//! Columnar text dump of channel realizations.
//!
//! One comma-separated record per (frame, user, subcarrier):
//!
//! ```text
//! frame,user,subcarrier,h0_re,h0_im,h1_re,h1_im,...
//! ```
//!
//! Indices are zero-based; values are printed with 17 significant digits so
//! the dump round-trips `f64` exactly.

use std::io::{self, Write};

use super::ChannelState;

pub fn write_channel_dump_header<W: Write>(out: &mut W, antennas: usize) -> io::Result<()> {
    write!(out, "frame,user,subcarrier")?;
    for a in 0..antennas {
        write!(out, ",h{a}_re,h{a}_im")?;
    }
    writeln!(out)
}

pub fn write_channel_dump<W: Write>(
    out: &mut W,
    frame: u64,
    channel: &ChannelState,
) -> io::Result<()> {
    for k in 0..channel.users() {
        for m in 0..channel.subcarriers() {
            write!(out, "{frame},{k},{m}")?;
            for h in channel.vector(k, m) {
                write!(out, ",{:.16e},{:.16e}", h.re, h.im)?;
            }
            writeln!(out)?;
        }
    }
    Ok(())
}

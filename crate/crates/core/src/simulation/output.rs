//! CSV writers. Rates are bit/s/Hz summed over subcarriers (scaled by the
//! downlink fraction in the realistic scenario); powers are in config units;
//! times are seconds.

use std::io::Write;

use super::drivers::{RateHistogram, RateRegion, SweepRow, TimingRow};
use super::run::RunSeries;
use crate::Result;

/// `slot,sum_rate,P_total,lambda,mu_1..mu_K,R_1..R_K`, one row per slot.
pub fn write_trace_csv<W: Write>(out: &mut W, series: &RunSeries) -> Result<()> {
    write!(out, "slot,sum_rate,P_total,lambda")?;
    for k in 1..=series.users {
        write!(out, ",mu_{k}")?;
    }
    for k in 1..=series.users {
        write!(out, ",R_{k}")?;
    }
    writeln!(out)?;
    for n in 0..series.slots() {
        write!(
            out,
            "{n},{},{},{}",
            series.sum_rate[n], series.total_power[n], series.lambda[n]
        )?;
        for v in series.mu_at(n).iter().chain(series.rates_at(n)) {
            write!(out, ",{v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// `K,sum_rate,class2_rate`.
pub fn write_sweep_csv<W: Write>(out: &mut W, rows: &[SweepRow]) -> Result<()> {
    writeln!(out, "K,sum_rate,class2_rate")?;
    for r in rows {
        writeln!(out, "{},{},{}", r.users, r.sum_rate, r.class2_rate)?;
    }
    Ok(())
}

/// `phi1,R1,R2` for the waterfilling points.
pub fn write_region_csv<W: Write>(out: &mut W, region: &RateRegion) -> Result<()> {
    writeln!(out, "phi1,R1,R2")?;
    for p in &region.points {
        writeln!(out, "{},{},{}", p.phi1, p.r1, p.r2)?;
    }
    Ok(())
}

/// Same columns, single row for the uniform-power point.
pub fn write_region_upa_csv<W: Write>(out: &mut W, region: &RateRegion) -> Result<()> {
    writeln!(out, "phi1,R1,R2")?;
    let p = region.upa;
    writeln!(out, "{},{},{}", p.phi1, p.r1, p.r2)?;
    Ok(())
}

/// `mode,K,N_T,stage,seconds`; seconds per frame.
pub fn write_complexity_csv<W: Write>(out: &mut W, rows: &[TimingRow]) -> Result<()> {
    writeln!(out, "mode,K,N_T,stage,seconds")?;
    for r in rows {
        writeln!(out, "{},{},{},{},{:e}", r.mode, r.users, r.antennas, r.stage, r.seconds)?;
    }
    Ok(())
}

/// `class,bin,lo,hi,count`.
pub fn write_histogram_csv<W: Write>(out: &mut W, hist: &RateHistogram) -> Result<()> {
    writeln!(out, "class,bin,lo,hi,count")?;
    let mut bin = 0;
    let mut class = 0;
    for b in &hist.bins {
        if b.class != class {
            class = b.class;
            bin = 0;
        }
        writeln!(out, "{},{bin},{},{},{}", b.class, b.lo, b.hi, b.count)?;
        bin += 1;
    }
    Ok(())
}

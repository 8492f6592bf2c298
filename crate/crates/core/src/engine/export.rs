// SPDX-License-Identifier: Apache-2.0

//! Trace writers: VCD for waveform viewers and CSV for scripts.

use std::io::{self, Write};

use super::trace::Trace;

pub trait TraceExporter: Send + Sync {
    fn name(&self) -> &'static str;
    fn export(&self, trace: &Trace, out: &mut dyn Write) -> io::Result<()>;
}

/// Value Change Dump, one timestamp per system clock cycle.
#[derive(Debug, Default)]
pub struct VcdExporter;

/// Short identifier for the `index`-th variable, from the printable ASCII range.
fn vcd_id(mut index: usize) -> String {
    const FIRST: u8 = b'!';
    const RADIX: usize = (b'~' - b'!' + 1) as usize;
    let mut id = String::new();
    loop {
        id.push((FIRST + (index % RADIX) as u8) as char);
        index /= RADIX;
        if index == 0 {
            break;
        }
        index -= 1;
    }
    id
}

fn vcd_value(out: &mut dyn Write, width: u32, value: u64, id: &str) -> io::Result<()> {
    if width == 1 {
        writeln!(out, "{value}{id}")
    } else {
        writeln!(out, "b{value:b} {id}")
    }
}

impl TraceExporter for VcdExporter {
    fn name(&self) -> &'static str {
        "vcd"
    }

    fn export(&self, trace: &Trace, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "$version bridge-sim {} $end", env!("CARGO_PKG_VERSION"))?;
        writeln!(out, "$timescale 1ns $end")?;
        let ids: Vec<String> = (0..trace.signals().len()).map(vcd_id).collect();
        if !trace.signals().is_empty() {
            writeln!(out, "$scope module bridge $end")?;
            for (sig, id) in trace.signals().iter().zip(&ids) {
                let range = if sig.width > 1 {
                    format!(" [{}:0]", sig.width - 1)
                } else {
                    String::new()
                };
                writeln!(out, "$var wire {} {id} {}{range} $end", sig.width, sig.name)?;
            }
            writeln!(out, "$upscope $end")?;
        }
        writeln!(out, "$enddefinitions $end")?;
        if trace.cycles() == 0 || trace.signals().is_empty() {
            return Ok(());
        }

        writeln!(out, "#0")?;
        writeln!(out, "$dumpvars")?;
        for (sig, id) in trace.signals().iter().zip(&ids) {
            let v = sig.changes.first().map_or(0, |&(_, v)| v);
            vcd_value(out, sig.width, v, id)?;
        }
        writeln!(out, "$end")?;

        // merge all change lists by cycle
        let mut cursors = vec![1usize; trace.signals().len()];
        loop {
            let next = trace
                .signals()
                .iter()
                .zip(&cursors)
                .filter_map(|(s, &c)| s.changes.get(c).map(|&(cycle, _)| cycle))
                .min();
            let Some(cycle) = next else { break };
            writeln!(out, "#{cycle}")?;
            for ((sig, id), cur) in trace.signals().iter().zip(&ids).zip(&mut cursors) {
                if let Some(&(c, v)) = sig.changes.get(*cur) {
                    if c == cycle {
                        vcd_value(out, sig.width, v, id)?;
                        *cur += 1;
                    }
                }
            }
        }
        writeln!(out, "#{}", trace.cycles())
    }
}

/// Header of signal names, then one row of lowercase hex values per cycle.
#[derive(Debug, Default)]
pub struct CsvExporter;

impl TraceExporter for CsvExporter {
    fn name(&self) -> &'static str {
        "csv"
    }

    fn export(&self, trace: &Trace, out: &mut dyn Write) -> io::Result<()> {
        let names: Vec<&str> = trace.signals().iter().map(|s| s.name.as_str()).collect();
        writeln!(out, "{}", names.join(","))?;
        let Some(mut walk) = trace.walk(&names) else {
            return Ok(());
        };
        let mut line = String::new();
        while let Some((_, values)) = walk.next_cycle() {
            use std::fmt::Write as _;
            line.clear();
            for (i, v) in values.iter().enumerate() {
                let sep = if i == 0 { "" } else { "," };
                let _ = write!(line, "{sep}{v:x}");
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

pub fn export_vcd(trace: &Trace) -> Vec<u8> {
    let mut buf = Vec::new();
    VcdExporter.export(trace, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

pub fn export_csv(trace: &Trace) -> Vec<u8> {
    let mut buf = Vec::new();
    CsvExporter.export(trace, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

// SPDX-License-Identifier: Apache-2.0

//! APB protocol checker over the externally visible trace signals.

use std::fmt;

use super::trace::Trace;
use crate::bus_types::is_zero_or_one_hot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Pselxout is neither zero nor one-hot.
    SelectOneHot,
    /// Penableout high without a select.
    EnableWithoutSelect,
    /// Penableout high without a preceding setup cycle.
    SetupBeforeEnable,
    /// Penableout high in two consecutive cycles.
    EnablePulseWidth,
    /// Address, direction, select or write data changed between setup and enable.
    SetupStability,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::SelectOneHot => "pselx-one-hot",
            Self::EnableWithoutSelect => "enable-without-select",
            Self::SetupBeforeEnable => "setup-before-enable",
            Self::EnablePulseWidth => "enable-pulse-width",
            Self::SetupStability => "setup-stability",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub cycle: u64,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cycle {}: {}", self.cycle, self.rule)
    }
}

pub const MONITORED: [&str; 5] = ["Pselxout", "Penableout", "Paddrout", "Pwriteout", "Pwdataout"];

/// Checks every cycle of `trace`. Returns `None` if a monitored signal is
/// missing from the trace.
pub fn check_protocol(trace: &Trace) -> Option<Vec<Violation>> {
    let mut walk = trace.walk(&MONITORED)?;
    let mut out = Vec::new();
    let mut prev: Option<[u64; 5]> = None;
    while let Some((cycle, v)) = walk.next_cycle() {
        let cur: [u64; 5] = v.try_into().expect("five monitored signals");
        let [sel, en, addr, write, wdata] = cur;
        let mut flag = |rule| out.push(Violation { cycle, rule });
        if sel > 0b111 || !is_zero_or_one_hot(sel as u8) {
            flag(Rule::SelectOneHot);
        }
        if en == 1 {
            if sel == 0 {
                flag(Rule::EnableWithoutSelect);
            }
            match prev {
                None => flag(Rule::SetupBeforeEnable),
                Some([psel, pen, paddr, pwrite, pwdata]) => {
                    if pen == 1 {
                        flag(Rule::EnablePulseWidth);
                    } else if psel == 0 {
                        flag(Rule::SetupBeforeEnable);
                    }
                    let data_moved = write == 1 && pwdata != wdata;
                    if psel != sel || paddr != addr || pwrite != write || data_moved {
                        flag(Rule::SetupStability);
                    }
                }
            }
        }
        prev = Some(cur);
    }
    Some(out)
}

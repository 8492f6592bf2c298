// SPDX-License-Identifier: Apache-2.0

//! APB controller state machine.
//!
//! Eight states sequence the APB setup and enable phases. Writes go through
//! `WWAIT` so the write data register is loaded before setup, and
//! back-to-back writes alternate `WRITEP`/`WENABLEP` using the second
//! pipeline stage.

use std::fmt::{self, Write as _};

use crate::slave_if::SlaveIfState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
#[repr(u8)]
pub enum FsmState {
    #[default]
    Idle = 0,
    Read = 1,
    REnable = 2,
    WWait = 3,
    Write = 4,
    WriteP = 5,
    WEnable = 6,
    WEnableP = 7,
}

impl FsmState {
    pub const ALL: [FsmState; 8] = [
        Self::Idle,
        Self::Read,
        Self::REnable,
        Self::WWait,
        Self::Write,
        Self::WriteP,
        Self::WEnable,
        Self::WEnableP,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Idle => "IDLE",
            Self::Read => "READ",
            Self::REnable => "RENABLE",
            Self::WWait => "WWAIT",
            Self::Write => "WRITE",
            Self::WriteP => "WRITEP",
            Self::WEnable => "WENABLE",
            Self::WEnableP => "WENABLEP",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn is_enable(self) -> bool {
        matches!(self, Self::REnable | Self::WEnable | Self::WEnableP)
    }

    pub fn is_write(self) -> bool {
        matches!(self, Self::Write | Self::WriteP | Self::WEnable | Self::WEnableP)
    }

    /// States whose APB operands come from the second pipeline stage.
    pub fn uses_second_stage(self) -> bool {
        matches!(self, Self::WriteP | Self::WEnableP)
    }
}

impl fmt::Display for FsmState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn fsm_next(state: FsmState, valid: bool, hwrite: bool, hwritereg: bool) -> FsmState {
    use FsmState::*;
    match state {
        Idle | REnable | WEnable => match (valid, hwrite) {
            (true, true) => WWait,
            (true, false) => Read,
            (false, _) => Idle,
        },
        WWait if valid => WriteP,
        WWait => Write,
        Read => REnable,
        Write if valid => WEnableP,
        Write => WEnable,
        WriteP => WEnableP,
        WEnableP => match (valid, hwritereg) {
            (true, true) => WriteP,
            (false, true) => Write,
            (_, false) => Read,
        },
    }
}

/// Whether a new transfer may be loaded into the slave pipeline this cycle
/// without overwriting operands the current or pending APB transfer still
/// needs.
///
/// `READ` and `WRITEP` drive their operands from registers that the next
/// load would shift. In `WENABLEP` one transfer is already pending; a second
/// can only be taken when that pending transfer is a write, since a pending
/// read is issued from stage 1.
pub fn can_accept(state: FsmState, hwritereg: bool) -> bool {
    match state {
        FsmState::Read | FsmState::WriteP => false,
        FsmState::WEnableP => hwritereg,
        _ => true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FsmOutputs {
    pub pwrite: bool,
    pub penable: bool,
    pub pselx: u8,
    pub paddr: u32,
    pub pwdata: u32,
    pub hreadyout: bool,
}

pub fn fsm_outputs(state: FsmState, pipe: &SlaveIfState) -> FsmOutputs {
    let second = state.uses_second_stage();
    let (paddr, pwdata, selx) = if second {
        (pipe.haddr2, pipe.hwdata2, pipe.selx2)
    } else {
        (pipe.haddr1, pipe.hwdata1, pipe.selx1)
    };
    let selecting = !matches!(state, FsmState::Idle | FsmState::WWait);
    FsmOutputs {
        pwrite: state.is_write(),
        penable: state.is_enable(),
        pselx: if selecting { selx } else { 0 },
        paddr,
        pwdata,
        hreadyout: matches!(
            state,
            FsmState::Idle | FsmState::REnable | FsmState::WEnable | FsmState::WEnableP
        ),
    }
}

/// Host-supplied read data travelling with the transfer currently on the APB.
pub fn bus_prdata(state: FsmState, pipe: &SlaveIfState) -> u32 {
    if state.uses_second_stage() {
        pipe.prdata2
    } else {
        pipe.prdata_latch
    }
}

/// Transition guard, used to describe the table as labelled edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Guard {
    Always,
    Valid,
    NotValid,
    ValidWrite,
    ValidRead,
    ValidWriteReg,
    NotValidWriteReg,
    NotWriteReg,
}

impl Guard {
    pub fn eval(self, valid: bool, hwrite: bool, hwritereg: bool) -> bool {
        match self {
            Self::Always => true,
            Self::Valid => valid,
            Self::NotValid => !valid,
            Self::ValidWrite => valid && hwrite,
            Self::ValidRead => valid && !hwrite,
            Self::ValidWriteReg => valid && hwritereg,
            Self::NotValidWriteReg => !valid && hwritereg,
            Self::NotWriteReg => !hwritereg,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Always => "1",
            Self::Valid => "valid",
            Self::NotValid => "¬valid",
            Self::ValidWrite => "valid∧hwrite",
            Self::ValidRead => "valid∧¬hwrite",
            Self::ValidWriteReg => "valid∧hwritereg",
            Self::NotValidWriteReg => "¬valid∧hwritereg",
            Self::NotWriteReg => "¬hwritereg",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub from: FsmState,
    pub guard: Guard,
    pub to: FsmState,
}

/// The transition table as guarded edges, in state order.
pub fn edges() -> Vec<Edge> {
    use FsmState::*;
    use Guard::*;
    let mut out = Vec::new();
    let mut add = |from, guard, to| out.push(Edge { from, guard, to });
    for from in [Idle, REnable, WEnable] {
        add(from, ValidWrite, WWait);
        add(from, ValidRead, Read);
        add(from, NotValid, Idle);
    }
    add(WWait, Valid, WriteP);
    add(WWait, NotValid, Write);
    add(Read, Always, REnable);
    add(Write, Valid, WEnableP);
    add(Write, NotValid, WEnable);
    add(WriteP, Always, WEnableP);
    add(WEnableP, ValidWriteReg, WriteP);
    add(WEnableP, NotValidWriteReg, Write);
    add(WEnableP, NotWriteReg, Read);
    out.sort_by_key(|e| e.from);
    out
}

/// Graphviz rendering of the transition table.
pub fn to_dot() -> String {
    let mut s = String::from("digraph apb_fsm {\n    rankdir=LR;\n");
    for state in FsmState::ALL {
        let shape = if state == FsmState::Idle { "doublecircle" } else { "circle" };
        let _ = writeln!(s, "    {state} [shape={shape}];");
    }
    for e in edges() {
        let _ = writeln!(s, "    {} -> {} [label=\"{}\"];", e.from, e.to, e.guard.label());
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use FsmState::*;

    #[test]
    fn idle_write_enters_wwait() {
        assert_eq!(fsm_next(Idle, true, true, false), WWait);
        assert_eq!(fsm_next(Idle, true, true, true), WWait);
    }

    #[test]
    fn idle_without_valid_stays() {
        for (w, r) in [(false, false), (false, true), (true, false), (true, true)] {
            assert_eq!(fsm_next(Idle, false, w, r), Idle);
        }
    }

    #[test]
    fn edges_agree_with_next_function() {
        let edges = edges();
        for state in FsmState::ALL {
            for bits in 0..8u8 {
                let (v, w, r) = (bits & 4 != 0, bits & 2 != 0, bits & 1 != 0);
                let firing: Vec<_> = edges
                    .iter()
                    .filter(|e| e.from == state && e.guard.eval(v, w, r))
                    .collect();
                assert_eq!(firing.len(), 1, "{state} {v} {w} {r}");
                assert_eq!(firing[0].to, fsm_next(state, v, w, r));
            }
        }
    }

    #[test]
    fn idle_outputs() {
        let pipe = SlaveIfState {
            selx1: 0b010,
            haddr1: 0x1234,
            ..Default::default()
        };
        let o = fsm_outputs(Idle, &pipe);
        assert!(!o.penable && o.hreadyout && !o.pwrite);
        assert_eq!(o.pselx, 0);
    }

    #[test]
    fn wenable_drives_stage_one() {
        let pipe = SlaveIfState {
            selx1: 0b001,
            haddr1: 0x8000_000C,
            hwdata1: 0xFFFF_FFFF,
            ..Default::default()
        };
        let o = fsm_outputs(WEnable, &pipe);
        assert_eq!(
            o,
            FsmOutputs {
                pwrite: true,
                penable: true,
                pselx: 0b001,
                paddr: 0x8000_000C,
                pwdata: 0xFFFF_FFFF,
                hreadyout: true,
            }
        );
    }

    #[test]
    fn pipelined_states_drive_stage_two() {
        let pipe = SlaveIfState {
            haddr1: 1,
            haddr2: 2,
            hwdata1: 3,
            hwdata2: 4,
            selx1: 0b001,
            selx2: 0b100,
            prdata_latch: 5,
            prdata2: 6,
            ..Default::default()
        };
        for state in [WriteP, WEnableP] {
            let o = fsm_outputs(state, &pipe);
            assert_eq!((o.paddr, o.pwdata, o.pselx), (2, 4, 0b100));
            assert_eq!(bus_prdata(state, &pipe), 6);
        }
        assert_eq!(bus_prdata(Write, &pipe), 5);
    }

    #[test]
    fn single_write_enables_for_one_cycle() {
        let pipe = SlaveIfState {
            selx1: 0b001,
            haddr1: 0x8000_000C,
            ..Default::default()
        };
        let seq = [Idle, WWait, Write, WEnable];
        let penable: Vec<bool> = seq.iter().map(|&s| fsm_outputs(s, &pipe).penable).collect();
        assert_eq!(penable, [false, false, false, true]);
        // walk the table with one valid write then nothing
        let mut s = Idle;
        let mut walked = vec![s];
        for valid in [true, false, false] {
            s = fsm_next(s, valid, true, true);
            walked.push(s);
        }
        assert_eq!(walked, seq);
    }

    #[test]
    fn hreadyout_profile() {
        let high: Vec<_> = FsmState::ALL
            .into_iter()
            .filter(|&s| fsm_outputs(s, &SlaveIfState::default()).hreadyout)
            .collect();
        assert_eq!(high, [Idle, REnable, WEnable, WEnableP]);
    }

    #[test]
    fn codes_and_names_round_trip() {
        for s in FsmState::ALL {
            assert_eq!(FsmState::from_code(s.code()), Some(s));
            assert_eq!(FsmState::from_name(s.name()), Some(s));
        }
        assert_eq!(FsmState::from_code(8), None);
    }

    #[test]
    fn dot_has_every_state() {
        let dot = to_dot();
        for s in FsmState::ALL {
            assert!(dot.contains(&format!("    {s} [shape=")));
        }
        assert!(dot.contains("IDLE -> WWAIT [label=\"valid∧hwrite\"];"));
    }
}

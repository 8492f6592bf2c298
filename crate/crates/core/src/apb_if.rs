// SPDX-License-Identifier: Apache-2.0

//! APB output stage, AHB response generation and the read-data models.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::apb_fsm::FsmOutputs;
use crate::bus_types::{AhbRequest, ApbSnapshot};
use crate::error::{Error, Result};

pub const HRESP_OKAY: u8 = 0b00;
pub const HRESP_ERROR: u8 = 0b01;

/// Drives the FSM outputs onto the external APB pins. Response fields are
/// filled in by the caller.
pub fn apb_stage(outs: &FsmOutputs) -> ApbSnapshot {
    ApbSnapshot {
        paddr: outs.paddr,
        pwdata: outs.pwdata,
        pselx: outs.pselx,
        pwrite: outs.pwrite,
        penable: outs.penable,
        hreadyout: outs.hreadyout,
        hresp: HRESP_OKAY,
        hrdata: 0,
    }
}

/// ERROR when the master attempted a transfer that no select line decodes.
pub fn compute_hresp(attempted: bool, decode_hit: bool) -> u8 {
    if attempted && !decode_hit {
        HRESP_ERROR
    } else {
        HRESP_OKAY
    }
}

/// A word-addressed register file behind one APB select line.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ApbPeripheral {
    select: u8,
    registers: BTreeMap<u32, u32>,
}

impl ApbPeripheral {
    pub fn new(select: u8) -> Result<Self> {
        if select > 2 {
            return Err(Error::Config(format!("peripheral select index {select} > 2")));
        }
        Ok(Self {
            select,
            registers: BTreeMap::new(),
        })
    }

    pub fn select(&self) -> u8 {
        self.select
    }

    pub fn registers(&self) -> &BTreeMap<u32, u32> {
        &self.registers
    }

    pub fn read(&self, addr: u32) -> u32 {
        self.registers.get(&word(addr)).copied().unwrap_or(0)
    }

    pub fn poke(&mut self, addr: u32, value: u32) {
        self.registers.insert(word(addr), value);
    }

    /// Performs the access in an enable cycle. Writes return the value the
    /// register held before the write.
    pub fn access(&mut self, snap: &ApbSnapshot) -> Result<u32> {
        if snap.pselx != 1 << self.select {
            return Err(Error::NotSelected {
                peripheral: self.select,
                pselx: snap.pselx,
            });
        }
        if !snap.penable {
            return Err(Error::NotEnabled);
        }
        let prior = self.read(snap.paddr);
        if snap.pwrite {
            self.poke(snap.paddr, snap.pwdata);
        }
        Ok(prior)
    }

    /// Parses `address value` hex lines. Blank lines and `#` comments are
    /// skipped.
    pub fn parse(select: u8, text: &str) -> Result<Self> {
        let mut p = Self::new(select)?;
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            let mut parts = line.split_whitespace();
            let (Some(a), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(err(format!("expected `address value`, got {line:?}")));
            };
            let addr = parse_hex_u32(a).map_err(err)?;
            if addr & 3 != 0 {
                return Err(err(format!("address {addr:#x} is not word aligned")));
            }
            p.poke(addr, parse_hex_u32(v).map_err(err)?);
        }
        Ok(p)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (a, v) in &self.registers {
            let _ = writeln!(s, "{a:08x} {v:08x}");
        }
        s
    }
}

fn word(addr: u32) -> u32 {
    addr & !3
}

pub(crate) fn parse_hex_u32(s: &str) -> std::result::Result<u32, String> {
    let digits = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")).unwrap_or(s);
    u32::from_str_radix(digits, 16).map_err(|e| format!("bad hex value {s:?}: {e}"))
}

/// Source of HRDATA for completed transfers.
pub trait ResponseModel: Send {
    fn name(&self) -> &'static str;

    /// Read data for the transfer whose enable cycle is `snap`.
    /// `bus_prdata` is the host-supplied read data travelling with it.
    fn complete(&mut self, snap: &ApbSnapshot, bus_prdata: u32) -> u32;

    /// HRDATA reported for a command that did not start a transfer.
    fn passthrough(&self, req: &AhbRequest, held_hrdata: u32) -> u32;

    fn peripherals(&self) -> &[ApbPeripheral] {
        &[]
    }
}

/// HRDATA comes from the Prdata field of the host's command frame.
#[derive(Debug, Default)]
pub struct OpenLoop;

impl ResponseModel for OpenLoop {
    fn name(&self) -> &'static str {
        "open_loop"
    }

    fn complete(&mut self, _snap: &ApbSnapshot, bus_prdata: u32) -> u32 {
        bus_prdata
    }

    fn passthrough(&self, req: &AhbRequest, _held: u32) -> u32 {
        req.prdata
    }
}

/// HRDATA comes from modelled peripheral register files, one per select line.
#[derive(Debug)]
pub struct ClosedLoop {
    peripherals: Vec<ApbPeripheral>,
}

impl ClosedLoop {
    /// Missing select lines get an empty register file.
    pub fn new(initial: &[ApbPeripheral]) -> Self {
        let peripherals = (0..3)
            .map(|sel| {
                initial
                    .iter()
                    .find(|p| p.select == sel)
                    .cloned()
                    .unwrap_or_else(|| ApbPeripheral::new(sel).expect("index in range"))
            })
            .collect();
        Self { peripherals }
    }
}

impl ResponseModel for ClosedLoop {
    fn name(&self) -> &'static str {
        "closed_loop"
    }

    fn complete(&mut self, snap: &ApbSnapshot, _bus_prdata: u32) -> u32 {
        self.peripherals
            .iter_mut()
            .find(|p| snap.pselx == 1 << p.select)
            .and_then(|p| p.access(snap).ok())
            .unwrap_or(0)
    }

    fn passthrough(&self, _req: &AhbRequest, held: u32) -> u32 {
        held
    }

    fn peripherals(&self) -> &[ApbPeripheral] {
        &self.peripherals
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn enable(pselx: u8, pwrite: bool, paddr: u32, pwdata: u32) -> ApbSnapshot {
        ApbSnapshot {
            paddr,
            pwdata,
            pselx,
            pwrite,
            penable: true,
            ..Default::default()
        }
    }

    #[test]
    fn stage_passes_fields_through() {
        let outs = FsmOutputs {
            pwrite: true,
            penable: true,
            pselx: 0b001,
            paddr: 0x8000_000C,
            pwdata: 0xFFFF_FFFF,
            hreadyout: true,
        };
        let s = apb_stage(&outs);
        assert!(s.pwrite && s.penable && s.hreadyout);
        assert_eq!((s.paddr, s.pwdata, s.pselx), (0x8000_000C, 0xFFFF_FFFF, 0b001));
        assert_eq!(apb_stage(&FsmOutputs::default()), ApbSnapshot::default());
    }

    #[test]
    fn hresp_encoding() {
        assert_eq!(compute_hresp(true, true), HRESP_OKAY);
        assert_eq!(compute_hresp(false, false), HRESP_OKAY);
        assert_eq!(compute_hresp(false, true), HRESP_OKAY);
        assert_eq!(compute_hresp(true, false), HRESP_ERROR);
    }

    #[test]
    fn write_then_read() {
        let mut p = ApbPeripheral::new(2).unwrap();
        let prior = p.access(&enable(0b100, true, 0x8C00_0000, 0x8765_4321)).unwrap();
        assert_eq!(prior, 0);
        assert_eq!(p.access(&enable(0b100, false, 0x8C00_0000, 0)).unwrap(), 0x8765_4321);
    }

    #[test]
    fn absent_reads_zero_and_reads_do_not_write() {
        let mut p = ApbPeripheral::new(0).unwrap();
        assert_eq!(p.access(&enable(0b001, false, 0x8000_0040, 0xDEAD)).unwrap(), 0);
        assert!(p.registers().is_empty());
    }

    #[test]
    fn wrong_select_is_rejected() {
        let mut p = ApbPeripheral::new(1).unwrap();
        assert_eq!(
            p.access(&enable(0b001, true, 0, 1)),
            Err(Error::NotSelected {
                peripheral: 1,
                pselx: 0b001
            })
        );
        let mut idle = enable(0b010, true, 0, 1);
        idle.penable = false;
        assert_eq!(p.access(&idle), Err(Error::NotEnabled));
        assert!(p.registers().is_empty());
    }

    #[test]
    fn text_round_trip() {
        let text = "# regs\n8c000000 87654321\n\n0x8c000004 1 # trailing\n";
        let p = ApbPeripheral::parse(2, text).unwrap();
        assert_eq!(p.read(0x8C00_0004), 1);
        assert_eq!(p.to_text(), "8c000000 87654321\n8c000004 00000001\n");
        assert_eq!(ApbPeripheral::parse(2, &p.to_text()).unwrap(), p);
        assert!(matches!(
            ApbPeripheral::parse(0, "8c000002 1"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(ApbPeripheral::parse(0, "zz 1").is_err());
        assert!(ApbPeripheral::parse(0, "1 2 3").is_err());
    }

    #[test]
    fn closed_loop_routes_by_select() {
        let mut seeded = ApbPeripheral::new(1).unwrap();
        seeded.poke(0x8400_0000, 7);
        let mut m = ClosedLoop::new(&[seeded]);
        assert_eq!(m.peripherals().len(), 3);
        assert_eq!(m.complete(&enable(0b010, false, 0x8400_0000, 0), 99), 7);
        assert_eq!(m.complete(&enable(0b001, true, 0x8000_0000, 5), 99), 0);
        assert_eq!(m.complete(&enable(0b001, false, 0x8000_0000, 0), 99), 5);
        assert_eq!(m.peripherals()[1].read(0x8400_0000), 7);
    }

    #[test]
    fn open_loop_echoes_prdata() {
        let mut m = OpenLoop;
        assert_eq!(m.complete(&enable(0b001, true, 0, 0), 0x1234_5678), 0x1234_5678);
        let req = AhbRequest {
            prdata: 9,
            ..Default::default()
        };
        assert_eq!(m.passthrough(&req, 3), 9);
    }
}

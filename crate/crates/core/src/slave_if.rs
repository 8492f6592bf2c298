// SPDX-License-Identifier: Apache-2.0

//! AHB slave interface: address decode, transfer qualification and the
//! two-stage address/data pipeline feeding the APB controller.

use serde::{Deserialize, Serialize};

use crate::bus_types::{AhbRequest, TransType};
use crate::error::{Error, Result};

/// One decoded address window, inclusive on both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeRange {
    #[serde(with = "crate::hex_u32")]
    pub lo: u32,
    #[serde(with = "crate::hex_u32")]
    pub hi: u32,
    /// Select line index, 0..=2.
    pub select: u8,
}

impl DecodeRange {
    pub fn contains(&self, addr: u32) -> bool {
        (self.lo..=self.hi).contains(&addr)
    }
}

/// Address map from AHB address windows to APB select lines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct DecodeMap {
    ranges: Vec<DecodeRange>,
}

impl DecodeMap {
    pub fn new(ranges: Vec<DecodeRange>) -> Result<Self> {
        if ranges.len() > 3 {
            return Err(Error::DecodeMap(format!("{} ranges, at most 3 allowed", ranges.len())));
        }
        for (i, r) in ranges.iter().enumerate() {
            if r.lo > r.hi {
                return Err(Error::DecodeMap(format!("range {i}: lo {:#x} > hi {:#x}", r.lo, r.hi)));
            }
            if r.select > 2 {
                return Err(Error::DecodeMap(format!("range {i}: select index {} > 2", r.select)));
            }
            for (j, other) in ranges.iter().enumerate().take(i) {
                if other.select == r.select {
                    return Err(Error::DecodeMap(format!(
                        "ranges {j} and {i} share select index {}",
                        r.select
                    )));
                }
                if r.lo <= other.hi && other.lo <= r.hi {
                    return Err(Error::DecodeMap(format!("ranges {j} and {i} overlap")));
                }
            }
        }
        Ok(Self { ranges })
    }

    pub fn ranges(&self) -> &[DecodeRange] {
        &self.ranges
    }

    /// One-hot select for `haddr`, or 0 when no window matches.
    pub fn decode_select(&self, haddr: u32) -> u8 {
        self.ranges
            .iter()
            .find(|r| r.contains(haddr))
            .map_or(0, |r| 1 << r.select)
    }
}

impl Default for DecodeMap {
    fn default() -> Self {
        Self::new(vec![
            DecodeRange {
                lo: 0x8000_0000,
                hi: 0x83FF_FFFF,
                select: 0,
            },
            DecodeRange {
                lo: 0x8400_0000,
                hi: 0x87FF_FFFF,
                select: 1,
            },
            DecodeRange {
                lo: 0x8800_0000,
                hi: 0x8FFF_FFFF,
                select: 2,
            },
        ])
        .expect("default map is well formed")
    }
}

impl<'de> Deserialize<'de> for DecodeMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let ranges = Vec::<DecodeRange>::deserialize(d)?;
        Self::new(ranges).map_err(serde::de::Error::custom)
    }
}

pub fn compute_valid(hreadyin: bool, htrans: TransType, tempselx: u8) -> bool {
    hreadyin && htrans.is_transfer() && tempselx != 0
}

/// Combinational view of one presented request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Sample {
    pub tempselx: u8,
    pub valid: bool,
    /// The master attempted a transfer, whether or not it decoded.
    pub attempted: bool,
}

pub fn sample(req: &AhbRequest, map: &DecodeMap) -> Sample {
    let tempselx = map.decode_select(req.haddr);
    Sample {
        tempselx,
        valid: compute_valid(req.hreadyin, req.htrans, tempselx),
        attempted: req.hreadyin && req.htrans.is_transfer(),
    }
}

/// Registers of the AHB slave interface.
///
/// Stage 1 holds the most recently accepted transfer and stage 2 the one
/// before it. The read data and decoded select travel with their address so
/// the pipelined path presents a consistent transfer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SlaveIfState {
    pub haddr1: u32,
    pub haddr2: u32,
    pub hwdata1: u32,
    pub hwdata2: u32,
    pub hwritereg: bool,
    pub selx1: u8,
    pub selx2: u8,
    pub prdata_latch: u32,
    pub prdata2: u32,
    /// Derived from the request sampled at the last edge.
    pub valid: bool,
    /// Derived from the request sampled at the last edge.
    pub tempselx: u8,
}

impl SlaveIfState {
    /// Advances one rising edge with `req` on the bus.
    pub fn tick(&self, req: &AhbRequest, map: &DecodeMap) -> Self {
        let s = sample(req, map);
        let mut next = Self {
            valid: s.valid,
            tempselx: s.tempselx,
            ..*self
        };
        if s.valid {
            next.haddr2 = self.haddr1;
            next.hwdata2 = self.hwdata1;
            next.selx2 = self.selx1;
            next.prdata2 = self.prdata_latch;
            next.haddr1 = req.haddr;
            next.hwdata1 = req.hwdata;
            next.selx1 = s.tempselx;
            next.prdata_latch = req.prdata;
            next.hwritereg = req.hwrite;
        }
        next
    }
}

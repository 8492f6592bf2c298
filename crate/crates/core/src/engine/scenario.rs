// SPDX-License-Identifier: Apache-2.0

//! JSON scenario files.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::apb_if::{parse_hex_u32, ApbPeripheral};
use crate::bus_types::CommandFrame;
use crate::error::{Error, Result};
use crate::registry;
use crate::slave_if::DecodeMap;

fn default_cycles() -> u64 {
    1
}
fn default_reset_cycles() -> u64 {
    4
}
fn default_divider() -> u32 {
    4
}
fn default_gap() -> u32 {
    8
}
fn default_mode() -> String {
    "open_loop".into()
}
fn default_transport() -> String {
    "spi".into()
}

/// A command frame, either bare hex or with its own idle gap.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FrameSpec {
    Hex(String),
    Detailed { frame: String, gap: Option<u32> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeripheralSpec {
    pub select: u8,
    /// Word address to initial value, both hex.
    #[serde(default)]
    pub registers: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Minimum number of system clock cycles to simulate, reset included.
    /// The run continues past this until every frame has a response.
    #[serde(default = "default_cycles")]
    pub cycles: u64,
    #[serde(default = "default_reset_cycles")]
    pub reset_cycles: u64,
    #[serde(default = "default_divider")]
    pub sclk_divider: u32,
    #[serde(default)]
    pub decode_map: DecodeMap,
    #[serde(default = "default_mode")]
    pub response_mode: String,
    #[serde(default = "default_transport")]
    pub transport: String,
    /// Idle cycles before a frame that does not set its own gap.
    #[serde(default = "default_gap")]
    pub default_gap: u32,
    #[serde(default)]
    pub peripherals: Vec<PeripheralSpec>,
    #[serde(default)]
    pub frames: Vec<FrameSpec>,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            cycles: default_cycles(),
            reset_cycles: default_reset_cycles(),
            sclk_divider: default_divider(),
            decode_map: DecodeMap::default(),
            response_mode: default_mode(),
            transport: default_transport(),
            default_gap: default_gap(),
            peripherals: Vec::new(),
            frames: Vec::new(),
        }
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialises")
    }

    /// Appends frames with an explicit gap.
    pub fn with_frames<I: IntoIterator<Item = CommandFrame>>(mut self, frames: I, gap: u32) -> Self {
        self.frames.extend(frames.into_iter().map(|f| FrameSpec::Detailed {
            frame: f.to_hex(),
            gap: Some(gap),
        }));
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.cycles == 0 {
            return bad("cycles must be positive".into());
        }
        if self.reset_cycles == 0 {
            return bad("reset_cycles must be positive".into());
        }
        if self.sclk_divider < 2 {
            return bad(format!("sclk_divider {} < 2", self.sclk_divider));
        }
        if !registry::transports().contains(&self.transport) {
            return Err(registry::transports()
                .create(&self.transport, &Default::default())
                .err()
                .expect("unknown name"));
        }
        if !registry::response_models().contains(&self.response_mode) {
            return Err(registry::response_models()
                .create(&self.response_mode, &vec![])
                .err()
                .expect("unknown name"));
        }
        self.frames()?;
        self.peripherals()?;
        Ok(())
    }

    /// Frames with their resolved gaps.
    pub fn frames(&self) -> Result<Vec<(CommandFrame, u32)>> {
        self.frames
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                let (hex, gap) = match spec {
                    FrameSpec::Hex(h) => (h, None),
                    FrameSpec::Detailed { frame, gap } => (frame, *gap),
                };
                let frame = CommandFrame::from_hex(hex)
                    .map_err(|e| Error::Config(format!("frame {i}: {e}")))?;
                Ok((frame, gap.unwrap_or(self.default_gap)))
            })
            .collect()
    }

    pub fn peripherals(&self) -> Result<Vec<ApbPeripheral>> {
        let mut seen = [false; 3];
        self.peripherals
            .iter()
            .map(|spec| {
                let mut p = ApbPeripheral::new(spec.select)?;
                if std::mem::replace(&mut seen[spec.select as usize], true) {
                    return Err(Error::Config(format!("peripheral {} listed twice", spec.select)));
                }
                for (a, v) in &spec.registers {
                    let addr = parse_hex_u32(a).map_err(Error::Config)?;
                    if addr & 3 != 0 {
                        return Err(Error::Config(format!("register address {addr:#x} not word aligned")));
                    }
                    p.poke(addr, parse_hex_u32(v).map_err(Error::Config)?);
                }
                Ok(p)
            })
            .collect()
    }
}

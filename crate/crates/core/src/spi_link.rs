// SPDX-License-Identifier: Apache-2.0

//! Bit-level SPI slave (mode 0) plus the Mapper1/Mapper2 frame glue.
//!
//! SCLK is sampled by the system clock, so edges are detected by comparing
//! against the previous sample. MOSI is captured on rising edges and MISO
//! changes on falling edges, MSB first in both directions. The link is half
//! duplex: while a response is loaded, rising edges do not capture MOSI.

use crate::bus_types::{
    decode_command, encode_response, AhbRequest, ApbSnapshot, CommandFrame, ResponseFrame,
    COMMAND_BITS, RESPONSE_BITS,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SpiPins {
    pub sclk: bool,
    pub mosi: bool,
    pub miso: bool,
    /// Active low.
    pub csn: bool,
}

impl SpiPins {
    /// Bus idle: deselected, clock low.
    pub fn idle() -> Self {
        Self {
            csn: true,
            ..Self::default()
        }
    }
}

const IN_MASK: u128 = (1u128 << COMMAND_BITS) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SpiSlaveState {
    pub shift_in: u128,
    pub bit_count: u8,
    pub shift_out: u128,
    pub out_count: u8,
    /// A response is loaded and not yet fully shifted out.
    pub tx_pending: bool,
    /// High for the one cycle in which the last command bit arrived.
    pub start_transaction: bool,
    pub last_sclk: bool,
    pub miso: bool,
}

impl SpiSlaveState {
    pub fn tick(&self, pins: &SpiPins) -> Self {
        let mut next = Self {
            start_transaction: false,
            last_sclk: pins.sclk,
            ..*self
        };
        if pins.csn {
            next.bit_count = 0;
            next.out_count = 0;
            return next;
        }
        let rising = pins.sclk && !self.last_sclk;
        let falling = !pins.sclk && self.last_sclk;

        if rising && !self.tx_pending {
            next.shift_in = ((self.shift_in << 1) | pins.mosi as u128) & IN_MASK;
            next.bit_count += 1;
            if next.bit_count as usize == COMMAND_BITS {
                next.bit_count = 0;
                next.start_transaction = true;
            }
        }
        if falling && self.tx_pending && (self.out_count as usize) < RESPONSE_BITS {
            let index = RESPONSE_BITS - 1 - self.out_count as usize;
            next.miso = (self.shift_out >> index) & 1 == 1;
            next.out_count += 1;
            if next.out_count as usize == RESPONSE_BITS {
                next.tx_pending = false;
            }
        }
        next
    }

    /// The command assembled so far; complete when `start_transaction` is high.
    pub fn received(&self) -> CommandFrame {
        CommandFrame::from_raw(self.shift_in).expect("shift register is masked to frame width")
    }

    pub fn load_response(&self, frame: ResponseFrame) -> Result<Self> {
        if self.tx_pending {
            return Err(Error::SpiBusy);
        }
        Ok(Self {
            shift_out: frame.raw(),
            out_count: 0,
            tx_pending: true,
            ..*self
        })
    }

    /// Response waiting for the master to clock it out.
    pub fn response_ready(&self) -> bool {
        self.tx_pending
    }
}

pub fn mapper1(frame: CommandFrame) -> AhbRequest {
    decode_command(frame)
}

pub fn mapper2(snap: &ApbSnapshot) -> Result<ResponseFrame> {
    encode_response(snap)
}

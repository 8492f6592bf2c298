// SPDX-License-Identifier: Apache-2.0

//! Bus signal types and the bit-exact host link frames.
//!
//! Command frames are 100 bits wide and carry one AHB transfer presentation:
//!
//! ```text
//!  99      68 67      36 35       4 3    2    1        0
//! +----------+----------+----------+------+----------+--------+
//! |  prdata  |  haddr   |  hwdata  |htrans| hreadyin | hwrite |
//! +----------+----------+----------+------+----------+--------+
//! ```
//!
//! Response frames are 104 bits wide and carry one APB-side snapshot:
//!
//! ```text
//!  103     72 71      40 39       8 7   5 4   3     2        1        0
//! +----------+----------+----------+-----+-----+---------+--------+---------+
//! |  hrdata  |  paddr   |  pwdata  |pselx|hresp|hreadyout| pwrite | penable |
//! +----------+----------+----------+-----+-----+---------+--------+---------+
//! ```
//!
//! Both frames travel MSB first. Multi-bit fields are big-endian within
//! their slice.

use std::fmt;

use crate::error::{Error, Result};

pub const COMMAND_BITS: usize = 100;
pub const RESPONSE_BITS: usize = 104;

/// Hex digits used for both frame kinds on the wire.
pub const FRAME_HEX_DIGITS: usize = 26;

/// AHB transfer type (HTRANS).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[repr(u8)]
pub enum TransType {
    #[default]
    Idle = 0,
    Busy = 1,
    NonSeq = 2,
    Seq = 3,
}

impl TransType {
    pub const ALL: [TransType; 4] = [Self::Idle, Self::Busy, Self::NonSeq, Self::Seq];

    /// Decodes the low two bits of `code`.
    pub fn from_bits(code: u8) -> Self {
        Self::ALL[(code & 0b11) as usize]
    }

    pub fn code(self) -> u8 {
        self as u8
    }

    /// NONSEQ and SEQ are the transfer types a slave must act on.
    pub fn is_transfer(self) -> bool {
        matches!(self, Self::NonSeq | Self::Seq)
    }
}

impl TryFrom<u8> for TransType {
    type Error = Error;

    fn try_from(code: u8) -> Result<Self> {
        if code < 4 {
            Ok(Self::from_bits(code))
        } else {
            Err(Error::FieldWidth {
                field: "htrans",
                value: code as u64,
                width: 2,
            })
        }
    }
}

/// One AHB-side transfer presentation as produced by Mapper1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AhbRequest {
    /// Read data supplied by the host in open-loop mode.
    pub prdata: u32,
    pub haddr: u32,
    pub hwdata: u32,
    pub htrans: TransType,
    pub hreadyin: bool,
    pub hwrite: bool,
}

impl AhbRequest {
    /// Same fields with the transfer type forced to IDLE.
    pub fn idle(self) -> Self {
        Self {
            htrans: TransType::Idle,
            ..self
        }
    }
}

/// One cycle of APB outputs together with the AHB response signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ApbSnapshot {
    pub paddr: u32,
    pub pwdata: u32,
    pub pselx: u8,
    pub pwrite: bool,
    pub penable: bool,
    pub hreadyout: bool,
    pub hresp: u8,
    pub hrdata: u32,
}

impl ApbSnapshot {
    pub fn validate(&self) -> Result<()> {
        if self.pselx > 0b111 {
            return Err(Error::FieldWidth {
                field: "pselx",
                value: self.pselx as u64,
                width: 3,
            });
        }
        if !is_zero_or_one_hot(self.pselx) {
            return Err(Error::SelectNotOneHot(self.pselx));
        }
        if self.hresp > 0b11 {
            return Err(Error::FieldWidth {
                field: "hresp",
                value: self.hresp as u64,
                width: 2,
            });
        }
        Ok(())
    }
}

pub fn is_zero_or_one_hot(sel: u8) -> bool {
    sel & sel.wrapping_sub(1) == 0
}

macro_rules! frame_type {
    ($name:ident, $bits:expr) => {
        #[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
        pub struct $name(u128);

        impl $name {
            pub const BITS: usize = $bits;
            const MASK: u128 = (1u128 << $bits) - 1;

            /// Wraps a raw value; fails if anything above the top frame bit is set.
            pub fn from_raw(raw: u128) -> Result<Self> {
                if raw & !Self::MASK != 0 {
                    return Err(Error::FrameLength {
                        expected: $bits,
                        got: 128 - raw.leading_zeros() as usize,
                    });
                }
                Ok(Self(raw))
            }

            pub fn raw(self) -> u128 {
                self.0
            }

            /// Bit `index`, where index 0 is the last bit on the wire.
            pub fn bit(self, index: usize) -> bool {
                assert!(index < $bits, "bit index {index} out of range");
                (self.0 >> index) & 1 == 1
            }

            /// Builds a frame from bits in transmission order (MSB first).
            pub fn from_msb_first(bits: &[bool]) -> Result<Self> {
                if bits.len() != $bits {
                    return Err(Error::FrameLength {
                        expected: $bits,
                        got: bits.len(),
                    });
                }
                Ok(Self(
                    bits.iter().fold(0u128, |acc, &b| (acc << 1) | b as u128),
                ))
            }

            /// Bits in transmission order (MSB first).
            pub fn msb_first(self) -> impl Iterator<Item = bool> {
                (0..$bits).rev().map(move |i| (self.0 >> i) & 1 == 1)
            }

            /// Lowercase hex, zero-padded to [`FRAME_HEX_DIGITS`].
            pub fn to_hex(self) -> String {
                format!("{:0width$x}", self.0, width = FRAME_HEX_DIGITS)
            }

            /// Parses hex with an optional `0x` prefix. The digit count must
            /// be exactly the frame width rounded up to whole digits, or
            /// [`FRAME_HEX_DIGITS`].
            pub fn from_hex(s: &str) -> Result<Self> {
                let s = s.trim();
                let digits = s
                    .strip_prefix("0x")
                    .or_else(|| s.strip_prefix("0X"))
                    .unwrap_or(s);
                let natural = $bits.div_ceil(4);
                if digits.len() != natural && digits.len() != FRAME_HEX_DIGITS {
                    return Err(Error::Hex(format!(
                        "expected {natural} or {FRAME_HEX_DIGITS} hex digits, got {}",
                        digits.len()
                    )));
                }
                let raw = u128::from_str_radix(digits, 16)
                    .map_err(|e| Error::Hex(format!("{digits:?}: {e}")))?;
                Self::from_raw(raw)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({})", stringify!($name), self.to_hex())
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.to_hex())
            }
        }
    };
}

frame_type!(CommandFrame, COMMAND_BITS);
frame_type!(ResponseFrame, RESPONSE_BITS);

#[inline]
fn field(raw: u128, lsb: u32, width: u32) -> u128 {
    (raw >> lsb) & ((1u128 << width) - 1)
}

pub fn encode_command(req: &AhbRequest) -> CommandFrame {
    let raw = (req.prdata as u128) << 68
        | (req.haddr as u128) << 36
        | (req.hwdata as u128) << 4
        | (req.htrans.code() as u128) << 2
        | (req.hreadyin as u128) << 1
        | req.hwrite as u128;
    CommandFrame(raw)
}

pub fn decode_command(frame: CommandFrame) -> AhbRequest {
    let raw = frame.0;
    AhbRequest {
        prdata: field(raw, 68, 32) as u32,
        haddr: field(raw, 36, 32) as u32,
        hwdata: field(raw, 4, 32) as u32,
        htrans: TransType::from_bits(field(raw, 2, 2) as u8),
        hreadyin: field(raw, 1, 1) == 1,
        hwrite: field(raw, 0, 1) == 1,
    }
}

pub fn encode_response(snap: &ApbSnapshot) -> Result<ResponseFrame> {
    snap.validate()?;
    let raw = (snap.hrdata as u128) << 72
        | (snap.paddr as u128) << 40
        | (snap.pwdata as u128) << 8
        | (snap.pselx as u128) << 5
        | (snap.hresp as u128) << 3
        | (snap.hreadyout as u128) << 2
        | (snap.pwrite as u128) << 1
        | snap.penable as u128;
    Ok(ResponseFrame(raw))
}

/// Host-side inverse of [`encode_response`]. Does not check the select
/// invariant, so arbitrary frames decode.
pub fn decode_response(frame: ResponseFrame) -> ApbSnapshot {
    let raw = frame.0;
    ApbSnapshot {
        hrdata: field(raw, 72, 32) as u32,
        paddr: field(raw, 40, 32) as u32,
        pwdata: field(raw, 8, 32) as u32,
        pselx: field(raw, 5, 3) as u8,
        hresp: field(raw, 3, 2) as u8,
        hreadyout: field(raw, 2, 1) == 1,
        pwrite: field(raw, 1, 1) == 1,
        penable: field(raw, 0, 1) == 1,
    }
}

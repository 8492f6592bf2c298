// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("frame length {got} bits, expected {expected}")]
    FrameLength { expected: usize, got: usize },

    #[error("invalid hex frame: {0}")]
    Hex(String),

    #[error("pselx {0:#05b} is neither zero nor one-hot")]
    SelectNotOneHot(u8),

    #[error("field `{field}` value {value:#x} exceeds {width} bits")]
    FieldWidth {
        field: &'static str,
        value: u64,
        width: u32,
    },

    #[error("invalid decode map: {0}")]
    DecodeMap(String),

    #[error("peripheral {peripheral} is not selected by pselx {pselx:#05b}")]
    NotSelected { peripheral: u8, pselx: u8 },

    #[error("peripheral access outside an enable cycle")]
    NotEnabled,

    #[error("SPI response transmission in progress")]
    SpiBusy,

    #[error("invalid scenario: {0}")]
    Config(String),

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("simulation stalled at cycle {0} with frames outstanding")]
    Stalled(u64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

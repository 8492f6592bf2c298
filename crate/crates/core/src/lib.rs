// SPDX-License-Identifier: Apache-2.0

//! Cycle-accurate model of an AHB-to-APB bridge driven over an SPI host link.
//!
//! The pipeline per system clock is
//! `SPI slave -> Mapper1 -> AHB slave interface -> APB FSM -> APB interface -> Mapper2`,
//! with every named signal recorded into a [`engine::Trace`] that can be
//! exported as VCD or CSV.
//!
//! Interchangeable pieces (host link transport, read-data model, trace
//! exporter) are trait objects looked up by name in a [`registry::Registry`].

pub mod apb_fsm;
pub mod apb_if;
pub mod bus_types;
pub mod engine;
pub mod error;
pub mod random;
pub mod registry;
pub mod slave_if;
pub mod spi_link;
pub mod wire;

pub use error::{Error, Result};

/// Serde adapter for 32-bit values written as hex strings.
pub(crate) mod hex_u32 {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u32, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("0x{v:08x}"))
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(u32),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u32, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(n) => Ok(n),
            Repr::Str(s) => crate::apb_if::parse_hex_u32(&s).map_err(de::Error::custom),
        }
    }
}

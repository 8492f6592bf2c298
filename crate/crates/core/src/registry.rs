// SPDX-License-Identifier: Apache-2.0

//! Name-keyed factories for the simulator's pluggable strategies.

use crate::apb_if::{ApbPeripheral, ClosedLoop, OpenLoop, ResponseModel};
use crate::engine::export::{CsvExporter, TraceExporter, VcdExporter};
use crate::engine::transport::{DirectTransport, SpiTransport, Transport, TransportConfig};
use crate::error::{Error, Result};

type Factory<T, C> = Box<dyn Fn(&C) -> Box<T> + Send + Sync>;

/// Factories for one strategy kind, keyed by name.
pub struct Registry<T: ?Sized, C> {
    kind: &'static str,
    entries: Vec<(&'static str, Factory<T, C>)>,
}

impl<T: ?Sized, C> Registry<T, C> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: Vec::new(),
        }
    }

    /// Registers `factory` under `name`, replacing any earlier entry.
    pub fn register<F>(&mut self, name: &'static str, factory: F) -> &mut Self
    where
        F: Fn(&C) -> Box<T> + Send + Sync + 'static,
    {
        self.entries.retain(|(n, _)| *n != name);
        self.entries.push((name, Box::new(factory)));
        self
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.iter().any(|(n, _)| *n == name)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn create(&self, name: &str, ctx: &C) -> Result<Box<T>> {
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, f)| f(ctx))
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }
}

pub type TransportRegistry = Registry<dyn Transport, TransportConfig>;
pub type ResponseModelRegistry = Registry<dyn ResponseModel, Vec<ApbPeripheral>>;
pub type ExporterRegistry = Registry<dyn TraceExporter, ()>;

pub fn transports() -> TransportRegistry {
    let mut r = Registry::new("transport");
    r.register("spi", |c: &TransportConfig| Box::new(SpiTransport::new(c)) as Box<dyn Transport>)
        .register("direct", |_: &TransportConfig| {
            Box::new(DirectTransport::default()) as Box<dyn Transport>
        });
    r
}

pub fn response_models() -> ResponseModelRegistry {
    let mut r = Registry::new("response mode");
    r.register("open_loop", |_: &Vec<ApbPeripheral>| {
        Box::new(OpenLoop) as Box<dyn ResponseModel>
    })
    .register("closed_loop", |p: &Vec<ApbPeripheral>| {
        Box::new(ClosedLoop::new(p)) as Box<dyn ResponseModel>
    });
    r
}

pub fn exporters() -> ExporterRegistry {
    let mut r = Registry::new("trace format");
    r.register("vcd", |_: &()| Box::new(VcdExporter) as Box<dyn TraceExporter>)
        .register("csv", |_: &()| Box::new(CsvExporter) as Box<dyn TraceExporter>);
    r
}

// SPDX-License-Identifier: Apache-2.0

//! Cycle scheduler composing the link, the bridge stages and the trace.
//!
//! Each system clock cycle is evaluated in a fixed order: link pins and the
//! SPI slave, Mapper1, the AHB slave interface, the APB controller outputs,
//! the APB interface and response model, Mapper2, then the trace. Registers
//! update at the end of the cycle.

pub mod export;
pub mod monitor;
pub mod scenario;
pub mod trace;
pub mod transport;

use std::collections::{BTreeMap, VecDeque};

use crate::apb_fsm::{bus_prdata, can_accept, fsm_next, fsm_outputs, FsmOutputs, FsmState};
use crate::apb_if::{apb_stage, compute_hresp, ApbPeripheral, ResponseModel, HRESP_OKAY};
use crate::bus_types::{AhbRequest, ApbSnapshot, CommandFrame, ResponseFrame};
use crate::error::{Error, Result};
use crate::registry;
use crate::slave_if::{self, DecodeMap, SlaveIfState};
use crate::spi_link::{mapper1, mapper2};

pub use export::{export_csv, export_vcd, TraceExporter};
pub use monitor::{check_protocol, Rule, Violation};
pub use scenario::{FrameSpec, PeripheralSpec, Scenario};
pub use trace::{SignalTrace, Trace};
pub use transport::{LinkCycle, Transport, TransportConfig};

/// Every traced signal with its width, in trace order.
pub const SIGNALS: &[(&str, u32)] = &[
    ("resetn", 1),
    ("sclk", 1),
    ("mosi", 1),
    ("miso", 1),
    ("csn", 1),
    ("start_transaction", 1),
    ("Prdata", 32),
    ("Haddr", 32),
    ("Hwdata", 32),
    ("Htrans", 2),
    ("Hreadyin", 1),
    ("Hwrite", 1),
    ("valid", 1),
    ("tempselx", 3),
    ("Haddr1", 32),
    ("Haddr2", 32),
    ("Hwdata1", 32),
    ("Hwdata2", 32),
    ("Hwritereg", 1),
    ("state", 3),
    ("Pwrite", 1),
    ("Penable", 1),
    ("Pselx", 3),
    ("Paddr", 32),
    ("Pwdata", 32),
    ("Pwriteout", 1),
    ("Penableout", 1),
    ("Pselxout", 3),
    ("Pwdataout", 32),
    ("Paddrout", 32),
    ("Hreadyout", 1),
    ("Hresp", 2),
    ("Hrdata", 32),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub trace: Trace,
    pub responses: Vec<ResponseFrame>,
    /// Peripheral register files after the run (closed-loop mode only).
    pub peripherals: Vec<ApbPeripheral>,
}

pub struct Engine {
    map: DecodeMap,
    reset_cycles: u64,
    transport: Box<dyn Transport>,
    model: Box<dyn ResponseModel>,

    slave: SlaveIfState,
    fsm: FsmState,
    hrdata: u32,
    /// Mapper1 output register; holds the last presented frame.
    bus: AhbRequest,

    pending: VecDeque<(u64, CommandFrame)>,
    inflight: VecDeque<u64>,
    finished: BTreeMap<u64, ResponseFrame>,
    next_slot: u64,
    next_emit: u64,

    submitted: u64,
    responses: Vec<ResponseFrame>,
    trace: Trace,
    cycle: u64,
}

impl Engine {
    /// Builds an engine from the scenario's configuration. Its frames are
    /// not submitted.
    pub fn new(scenario: &Scenario) -> Result<Self> {
        scenario.validate()?;
        let transport = registry::transports().create(
            &scenario.transport,
            &TransportConfig {
                sclk_divider: scenario.sclk_divider,
            },
        )?;
        let model = registry::response_models()
            .create(&scenario.response_mode, &scenario.peripherals()?)?;
        Ok(Self::with_parts(
            scenario.decode_map.clone(),
            scenario.reset_cycles,
            transport,
            model,
        ))
    }

    pub fn with_parts(
        map: DecodeMap,
        reset_cycles: u64,
        transport: Box<dyn Transport>,
        model: Box<dyn ResponseModel>,
    ) -> Self {
        Self {
            map,
            reset_cycles,
            transport,
            model,
            slave: SlaveIfState::default(),
            fsm: FsmState::Idle,
            hrdata: 0,
            bus: AhbRequest::default(),
            pending: VecDeque::new(),
            inflight: VecDeque::new(),
            finished: BTreeMap::new(),
            next_slot: 0,
            next_emit: 0,
            submitted: 0,
            responses: Vec::new(),
            trace: Trace::new(SIGNALS),
            cycle: 0,
        }
    }

    pub fn submit(&mut self, frame: CommandFrame, gap: u32) {
        self.transport.submit(frame, gap);
        self.submitted += 1;
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn fsm_state(&self) -> FsmState {
        self.fsm
    }

    pub fn slave_if(&self) -> &SlaveIfState {
        &self.slave
    }

    pub fn trace(&self) -> &Trace {
        &self.trace
    }

    /// Responses collected by the host so far, in command order.
    pub fn responses(&self) -> &[ResponseFrame] {
        &self.responses
    }

    pub fn peripherals(&self) -> &[ApbPeripheral] {
        self.model.peripherals()
    }

    /// Every submitted frame has been answered.
    pub fn is_drained(&self) -> bool {
        self.responses.len() as u64 == self.submitted
    }

    /// Advances one system clock cycle.
    pub fn step(&mut self) {
        if self.cycle < self.reset_cycles {
            let outs = fsm_outputs(FsmState::Idle, &SlaveIfState::default());
            let snap = apb_stage(&outs);
            let req = AhbRequest::default();
            self.record(false, &LinkCycle::default(), &req, Default::default(), &snap, &outs);
            self.cycle += 1;
            return;
        }

        let link = self.transport.tick();
        if let Some(frame) = link.delivered {
            self.pending.push_back((self.next_slot, frame));
            self.next_slot += 1;
        }

        // AHB master side: issue the next frame only when the bridge can
        // take it, otherwise keep the bus idle.
        let mut issued = None;
        let req = match self.pending.front() {
            Some(&(slot, frame)) if can_accept(self.fsm, self.slave.hwritereg) => {
                self.pending.pop_front();
                self.bus = mapper1(frame);
                issued = Some(slot);
                self.bus
            }
            _ => self.bus.idle(),
        };

        let sample = slave_if::sample(&req, &self.map);
        let outs = fsm_outputs(self.fsm, &self.slave);
        let mut snap = apb_stage(&outs);
        snap.hresp = compute_hresp(sample.attempted, sample.tempselx != 0);

        if outs.penable {
            let slot = self
                .inflight
                .pop_front()
                .expect("enable cycle without an accepted transfer");
            self.hrdata = self.model.complete(&snap, bus_prdata(self.fsm, &self.slave));
            snap.hrdata = self.hrdata;
            self.finish(slot, ApbSnapshot { hresp: HRESP_OKAY, ..snap });
        } else {
            snap.hrdata = self.hrdata;
        }

        if let Some(slot) = issued {
            if sample.valid {
                self.inflight.push_back(slot);
            } else {
                let hrdata = self.model.passthrough(&req, self.hrdata);
                self.finish(slot, ApbSnapshot { hrdata, ..snap });
            }
        }

        self.record(true, &link, &req, sample, &snap, &outs);

        let next = fsm_next(self.fsm, sample.valid, req.hwrite, self.slave.hwritereg);
        self.slave = self.slave.tick(&req, &self.map);
        self.fsm = next;
        self.responses.extend(self.transport.drain_host());
        self.cycle += 1;
    }

    fn finish(&mut self, slot: u64, snap: ApbSnapshot) {
        let frame = mapper2(&snap).expect("bridge outputs satisfy the snapshot invariants");
        self.finished.insert(slot, frame);
        while let Some(frame) = self.finished.remove(&self.next_emit) {
            self.transport.respond(frame);
            self.next_emit += 1;
        }
    }

    fn record(
        &mut self,
        resetn: bool,
        link: &LinkCycle,
        req: &AhbRequest,
        sample: slave_if::Sample,
        snap: &ApbSnapshot,
        outs: &FsmOutputs,
    ) {
        let s = &self.slave;
        let b = |v: bool| v as u64;
        let values = [
            b(resetn),
            b(link.pins.sclk),
            b(link.pins.mosi),
            b(link.pins.miso),
            b(link.pins.csn),
            b(link.start_transaction),
            req.prdata as u64,
            req.haddr as u64,
            req.hwdata as u64,
            req.htrans.code() as u64,
            b(req.hreadyin),
            b(req.hwrite),
            b(sample.valid),
            sample.tempselx as u64,
            s.haddr1 as u64,
            s.haddr2 as u64,
            s.hwdata1 as u64,
            s.hwdata2 as u64,
            b(s.hwritereg),
            self.fsm.code() as u64,
            b(outs.pwrite),
            b(outs.penable),
            outs.pselx as u64,
            outs.paddr as u64,
            outs.pwdata as u64,
            b(snap.pwrite),
            b(snap.penable),
            snap.pselx as u64,
            snap.pwdata as u64,
            snap.paddr as u64,
            b(snap.hreadyout),
            snap.hresp as u64,
            snap.hrdata as u64,
        ];
        self.trace.push_cycle(&values);
    }

    /// Steps until every submitted frame is answered and at least
    /// `min_cycles` have elapsed. Fails if no response arrives for
    /// `watchdog` consecutive cycles while frames are outstanding.
    pub fn run_until_drained(&mut self, min_cycles: u64, watchdog: u64) -> Result<()> {
        let mut last_progress = self.cycle;
        let mut answered = self.responses.len();
        while self.cycle < min_cycles || !self.is_drained() {
            self.step();
            if self.responses.len() != answered || self.is_drained() {
                answered = self.responses.len();
                last_progress = self.cycle;
            } else if self.cycle - last_progress > watchdog {
                return Err(Error::Stalled(self.cycle));
            }
        }
        Ok(())
    }

    pub fn into_output(self) -> RunOutput {
        RunOutput {
            peripherals: self.model.peripherals().to_vec(),
            trace: self.trace,
            responses: self.responses,
        }
    }
}

/// Cycles without a response after which a run is declared stalled.
pub fn watchdog_for(scenario: &Scenario, max_gap: u32) -> u64 {
    let reset = scenario.reset_cycles;
    let per_frame = 4 * (crate::bus_types::RESPONSE_BITS as u64 + 4) * scenario.sclk_divider as u64;
    reset + max_gap as u64 + per_frame + 64
}

/// Simulates `scenario` from reset. Deterministic in the scenario alone.
pub fn run(scenario: &Scenario) -> Result<RunOutput> {
    let mut engine = Engine::new(scenario)?;
    let frames = scenario.frames()?;
    let max_gap = frames.iter().map(|&(_, g)| g).max().unwrap_or(0);
    for (frame, gap) in frames {
        engine.submit(frame, gap);
    }
    engine.run_until_drained(scenario.cycles, watchdog_for(scenario, max_gap))?;
    Ok(engine.into_output())
}

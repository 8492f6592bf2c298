// SPDX-License-Identifier: Apache-2.0

//! Host links carrying command frames into the bridge and responses back.

use std::collections::VecDeque;

use crate::bus_types::{CommandFrame, ResponseFrame, COMMAND_BITS, RESPONSE_BITS};
use crate::spi_link::{SpiPins, SpiSlaveState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransportConfig {
    /// System clock cycles per SCLK period, at least 2.
    pub sclk_divider: u32,
}

impl Default for TransportConfig {
    fn default() -> Self {
        Self { sclk_divider: 4 }
    }
}

/// What the link presents to the bridge in one system clock cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkCycle {
    pub pins: SpiPins,
    pub start_transaction: bool,
    /// Command handed to Mapper1 this cycle.
    pub delivered: Option<CommandFrame>,
}

impl Default for LinkCycle {
    fn default() -> Self {
        Self {
            pins: SpiPins::idle(),
            start_transaction: false,
            delivered: None,
        }
    }
}

pub trait Transport: Send {
    fn name(&self) -> &'static str;

    /// Queues a host command to be sent after `gap` idle cycles.
    fn submit(&mut self, frame: CommandFrame, gap: u32);

    /// Advances the link one system clock cycle.
    fn tick(&mut self) -> LinkCycle;

    /// Hands a Mapper2 response to the link at the end of the current cycle.
    fn respond(&mut self, frame: ResponseFrame);

    /// Responses that reached the host since the last call.
    fn drain_host(&mut self) -> Vec<ResponseFrame>;

    /// Nothing queued, in flight, or waiting to be returned.
    fn is_idle(&self) -> bool;
}

/// Frames reach Mapper1 directly, one per cycle at most, with no
/// serialisation delay. Responses return to the host immediately.
#[derive(Debug, Default)]
pub struct DirectTransport {
    queue: VecDeque<(CommandFrame, u32)>,
    host: Vec<ResponseFrame>,
}

impl Transport for DirectTransport {
    fn name(&self) -> &'static str {
        "direct"
    }

    fn submit(&mut self, frame: CommandFrame, gap: u32) {
        self.queue.push_back((frame, gap));
    }

    fn tick(&mut self) -> LinkCycle {
        let mut cycle = LinkCycle::default();
        if let Some((frame, gap)) = self.queue.front_mut() {
            if *gap == 0 {
                cycle.delivered = Some(*frame);
                self.queue.pop_front();
            } else {
                *gap -= 1;
            }
        }
        cycle
    }

    fn respond(&mut self, frame: ResponseFrame) {
        self.host.push(frame);
    }

    fn drain_host(&mut self) -> Vec<ResponseFrame> {
        std::mem::take(&mut self.host)
    }

    fn is_idle(&self) -> bool {
        self.queue.is_empty() && self.host.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Idle,
    Gap(u32),
    /// Shifting command bit `bit` (0 = MSB); `tick` counts within the period.
    Command { bit: usize, tick: u32 },
    /// CSN high, waiting for the slave to load a response.
    Turnaround,
    /// CSN low with SCLK low before the first readout edge.
    Select,
    Readout { bit: usize, tick: u32 },
    Deselect,
}

/// Bit-banged SPI master (the host) wired to the bridge's SPI slave.
///
/// The master sends one command, waits for the slave to flag a loaded
/// response, clocks the 104 response bits out, then moves to the next
/// command.
#[derive(Debug)]
pub struct SpiTransport {
    low: u32,
    high: u32,
    phase: Phase,
    queue: VecDeque<(CommandFrame, u32)>,
    current: CommandFrame,
    slave: SpiSlaveState,
    unloaded: VecDeque<ResponseFrame>,
    captured: Vec<bool>,
    host: Vec<ResponseFrame>,
}

impl SpiTransport {
    pub fn new(cfg: &TransportConfig) -> Self {
        let div = cfg.sclk_divider.max(2);
        Self {
            low: div / 2,
            high: div - div / 2,
            phase: Phase::Idle,
            queue: VecDeque::new(),
            current: CommandFrame::default(),
            slave: SpiSlaveState::default(),
            unloaded: VecDeque::new(),
            captured: Vec::with_capacity(RESPONSE_BITS),
            host: Vec::new(),
        }
    }

    pub fn slave(&self) -> &SpiSlaveState {
        &self.slave
    }

    fn period(&self) -> u32 {
        self.low + self.high
    }

    /// Master drive for this cycle, advancing the phase.
    fn drive(&mut self) -> SpiPins {
        let mut pins = SpiPins::idle();
        loop {
            match self.phase {
                Phase::Idle => match self.queue.pop_front() {
                    Some((frame, gap)) => {
                        self.current = frame;
                        self.phase = Phase::Gap(gap);
                        continue;
                    }
                    None => return pins,
                },
                Phase::Gap(0) => {
                    self.phase = Phase::Command { bit: 0, tick: 0 };
                    continue;
                }
                Phase::Gap(n) => {
                    self.phase = Phase::Gap(n - 1);
                    return pins;
                }
                Phase::Command { bit, tick } => {
                    pins.csn = false;
                    pins.sclk = tick >= self.low;
                    pins.mosi = self.current.bit(COMMAND_BITS - 1 - bit);
                    self.phase = if tick + 1 < self.period() {
                        Phase::Command { bit, tick: tick + 1 }
                    } else if bit + 1 < COMMAND_BITS {
                        Phase::Command { bit: bit + 1, tick: 0 }
                    } else {
                        Phase::Turnaround
                    };
                    return pins;
                }
                // at least one deselected cycle, so the last command clock
                // is not seen as a readout edge
                Phase::Turnaround => {
                    if self.slave.response_ready() {
                        self.phase = Phase::Select;
                    }
                    return pins;
                }
                Phase::Select => {
                    pins.csn = false;
                    self.captured.clear();
                    self.phase = Phase::Readout { bit: 0, tick: 0 };
                    return pins;
                }
                // high half first: the rising edge is ignored while a
                // response is loaded and the falling edge shifts MISO
                Phase::Readout { bit, tick } => {
                    pins.csn = false;
                    pins.sclk = tick < self.high;
                    self.phase = if tick + 1 < self.period() {
                        Phase::Readout { bit, tick: tick + 1 }
                    } else if bit + 1 < RESPONSE_BITS {
                        Phase::Readout { bit: bit + 1, tick: 0 }
                    } else {
                        Phase::Deselect
                    };
                    return pins;
                }
                Phase::Deselect => {
                    self.phase = Phase::Idle;
                    return pins;
                }
            }
        }
    }
}

impl Transport for SpiTransport {
    fn name(&self) -> &'static str {
        "spi"
    }

    fn submit(&mut self, frame: CommandFrame, gap: u32) {
        self.queue.push_back((frame, gap));
    }

    fn tick(&mut self) -> LinkCycle {
        let before = self.phase;
        let mut pins = self.drive();
        self.slave = self.slave.tick(&pins);
        pins.miso = self.slave.miso;

        // sample MISO in the last low cycle of each readout period
        if let Phase::Readout { tick, .. } = before {
            if tick + 1 == self.period() {
                self.captured.push(self.slave.miso);
                if self.captured.len() == RESPONSE_BITS {
                    let frame = ResponseFrame::from_msb_first(&self.captured)
                        .expect("captured exactly one response");
                    self.host.push(frame);
                }
            }
        }

        LinkCycle {
            pins,
            start_transaction: self.slave.start_transaction,
            delivered: self.slave.start_transaction.then(|| self.slave.received()),
        }
    }

    fn respond(&mut self, frame: ResponseFrame) {
        self.unloaded.push_back(frame);
        self.load_pending();
    }

    fn drain_host(&mut self) -> Vec<ResponseFrame> {
        self.load_pending();
        std::mem::take(&mut self.host)
    }

    fn is_idle(&self) -> bool {
        self.phase == Phase::Idle
            && self.queue.is_empty()
            && self.unloaded.is_empty()
            && !self.slave.response_ready()
            && self.host.is_empty()
    }
}

impl SpiTransport {
    fn load_pending(&mut self) {
        if let Some(&frame) = self.unloaded.front() {
            if let Ok(loaded) = self.slave.load_response(frame) {
                self.slave = loaded;
                self.unloaded.pop_front();
            }
        }
    }
}

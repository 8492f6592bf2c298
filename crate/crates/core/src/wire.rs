// SPDX-License-Identifier: Apache-2.0

//! Line protocol used by the TCP serve endpoint.
//!
//! ```text
//! client: CMD <26 hex digits>\n
//! server: RSP <26 hex digits>\n   or   ERR <message>\n
//! ```
//!
//! Each command is simulated on one persistent engine, so a session gives
//! the same responses as a batch run of the same frames.

use std::io::{self, BufRead, BufReader, Write};
use std::net::TcpListener;

use crate::bus_types::{CommandFrame, ResponseFrame};
use crate::engine::{watchdog_for, Engine, Scenario};
use crate::error::Result;

pub fn parse_command(line: &str) -> std::result::Result<CommandFrame, String> {
    let line = line.trim_end_matches(['\r', '\n']);
    let Some(payload) = line.strip_prefix("CMD ") else {
        return Err(format!("expected `CMD <hex>`, got {line:?}"));
    };
    CommandFrame::from_hex(payload).map_err(|e| e.to_string())
}

pub fn parse_reply(line: &str) -> std::result::Result<ResponseFrame, String> {
    let line = line.trim_end_matches(['\r', '\n']);
    if let Some(msg) = line.strip_prefix("ERR ") {
        return Err(msg.to_string());
    }
    let payload = line
        .strip_prefix("RSP ")
        .ok_or_else(|| format!("malformed reply {line:?}"))?;
    ResponseFrame::from_hex(payload).map_err(|e| e.to_string())
}

pub fn format_command(frame: CommandFrame) -> String {
    format!("CMD {}\n", frame.to_hex())
}

pub fn format_response(frame: ResponseFrame) -> String {
    format!("RSP {}\n", frame.to_hex())
}

pub fn format_error(msg: &str) -> String {
    format!("ERR {}\n", msg.replace(['\r', '\n'], " "))
}

/// One client's simulation.
pub struct Session {
    engine: Engine,
    gap: u32,
    watchdog: u64,
}

impl Session {
    /// Uses the scenario's configuration; its frame list is ignored and
    /// every command is sent after `default_gap` idle cycles.
    pub fn new(config: &Scenario) -> Result<Self> {
        Ok(Self {
            engine: Engine::new(config)?,
            gap: config.default_gap,
            watchdog: watchdog_for(config, config.default_gap),
        })
    }

    pub fn simulate(&mut self, frame: CommandFrame) -> Result<ResponseFrame> {
        let answered = self.engine.responses().len();
        self.engine.submit(frame, self.gap);
        self.engine.run_until_drained(0, self.watchdog)?;
        Ok(self.engine.responses()[answered])
    }

    /// Reply line for one request line.
    pub fn handle_line(&mut self, line: &str) -> String {
        match parse_command(line) {
            Ok(frame) => match self.simulate(frame) {
                Ok(rsp) => format_response(rsp),
                Err(e) => format_error(&e.to_string()),
            },
            Err(e) => format_error(&e),
        }
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }
}

/// Serves request lines until the peer closes the stream.
pub fn serve_stream<R: BufRead, W: Write>(session: &mut Session, reader: R, mut writer: W) -> io::Result<()> {
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        writer.write_all(session.handle_line(&line).as_bytes())?;
        writer.flush()?;
    }
    Ok(())
}

/// Accepts one client and serves it with a fresh session. A dropped
/// connection ends the session without an error.
pub fn serve_one(listener: &TcpListener, config: &Scenario) -> io::Result<()> {
    let (stream, _) = listener.accept()?;
    let mut session = Session::new(config).map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
    let reader = BufReader::new(stream.try_clone()?);
    match serve_stream(&mut session, reader, stream) {
        Err(e) if is_disconnect(&e) => Ok(()),
        other => other,
    }
}

/// Serves clients one after another, forever.
pub fn serve(listener: &TcpListener, config: &Scenario) -> io::Result<()> {
    loop {
        serve_one(listener, config)?;
    }
}

fn is_disconnect(e: &io::Error) -> bool {
    use io::ErrorKind::*;
    matches!(e.kind(), ConnectionReset | ConnectionAborted | BrokenPipe | UnexpectedEof)
}

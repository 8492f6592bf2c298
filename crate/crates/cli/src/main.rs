// SPDX-License-Identifier: Apache-2.0

//! `bridge-sim` command-line front end.

use std::fs;
use std::io::{self, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use bridge_sim::apb_fsm::to_dot;
use bridge_sim::bus_types::{decode_response, ResponseFrame};
use bridge_sim::engine::{check_protocol, run, RunOutput, Scenario, Trace};
use bridge_sim::random::TrafficGen;
use bridge_sim::registry;
use bridge_sim::wire;
use clap::{Parser, Subcommand, ValueEnum};

const EXIT_PARSE: u8 = 2;
const EXIT_MONITOR: u8 = 3;
const EXIT_GOLDEN: u8 = 4;

#[derive(Parser)]
#[command(name = "bridge-sim", version, about = "AHB-to-APB bridge simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario file and print one decoded response per frame.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        vcd: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Expected responses, one hex frame per line.
        #[arg(long)]
        golden: Option<PathBuf>,
        /// Write each peripheral's registers to DIR/peripheral<N>.txt.
        #[arg(long, value_name = "DIR")]
        dump_peripherals: Option<PathBuf>,
    },
    /// Serve the line protocol over TCP, one client at a time.
    Serve {
        #[arg(long, alias = "serve", value_name = "PORT")]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        /// Configuration to simulate with; its frame list is ignored.
        #[arg(long)]
        scenario: Option<PathBuf>,
        /// Exit after the first client disconnects.
        #[arg(long)]
        once: bool,
    },
    /// Print the FSM transition graph.
    FsmExport {
        #[arg(long, value_enum, default_value_t = GraphFormat::Dot)]
        format: GraphFormat,
    },
    /// Print seeded random command frames, one hex frame per line.
    GenFrames {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        count: usize,
        /// Emit a scenario JSON document instead of bare frames.
        #[arg(long)]
        scenario: bool,
    },
    /// Run the built-in reference scenarios and report each check.
    Reproduce {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dot,
}

/// Failure with a specific exit status.
#[derive(Debug)]
struct Exit(u8, String);

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.1)
    }
}

impl std::error::Error for Exit {}

fn parse_error(msg: impl Into<String>) -> anyhow::Error {
    Exit(EXIT_PARSE, msg.into()).into()
}

fn load_scenario(path: &Path) -> anyhow::Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| parse_error(format!("{}: {e}", path.display())))?;
    Scenario::from_json(&text).map_err(|e| parse_error(format!("{}: {e}", path.display())))
}

fn load_golden(path: &Path) -> anyhow::Result<Vec<ResponseFrame>> {
    let text = fs::read_to_string(path).map_err(|e| parse_error(format!("{}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .map(|(i, l)| (i, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| {
            ResponseFrame::from_hex(l).map_err(|e| parse_error(format!("{}:{}: {e}", path.display(), i + 1)))
        })
        .collect()
}

fn describe(frame: ResponseFrame) -> String {
    let r = decode_response(frame);
    format!(
        "{frame} hrdata={:#010x} paddr={:#010x} pwdata={:#010x} pselx={:#05b} hresp={:#04b} hreadyout={} pwrite={} penable={}",
        r.hrdata, r.paddr, r.pwdata, r.pselx, r.hresp, r.hreadyout as u8, r.pwrite as u8, r.penable as u8
    )
}

fn export(trace: &Trace, format: &str, path: &Path) -> anyhow::Result<()> {
    let exporter = registry::exporters().create(format, &())?;
    let mut file = io::BufWriter::new(fs::File::create(path).with_context(|| path.display().to_string())?);
    exporter.export(trace, &mut file)?;
    file.flush()?;
    Ok(())
}

fn cmd_run(
    scenario: &Path,
    vcd: Option<&Path>,
    csv: Option<&Path>,
    golden: Option<&Path>,
    dump: Option<&Path>,
) -> anyhow::Result<()> {
    let s = load_scenario(scenario)?;
    let golden = golden.map(load_golden).transpose()?;
    let RunOutput {
        trace,
        responses,
        peripherals,
    } = run(&s)?;

    let mut out = io::stdout().lock();
    for (i, &rsp) in responses.iter().enumerate() {
        writeln!(out, "frame {i}: {}", describe(rsp))?;
    }
    writeln!(out, "{} cycles", trace.cycles())?;

    if let Some(path) = vcd {
        export(&trace, "vcd", path)?;
    }
    if let Some(path) = csv {
        export(&trace, "csv", path)?;
    }
    if let Some(dir) = dump {
        fs::create_dir_all(dir)?;
        for p in &peripherals {
            fs::write(dir.join(format!("peripheral{}.txt", p.select())), p.to_text())?;
        }
    }

    let violations = check_protocol(&trace).expect("engine traces carry the monitored signals");
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("violation: {v}");
        }
        return Err(Exit(EXIT_MONITOR, format!("{} protocol violations", violations.len())).into());
    }

    if let Some(expected) = golden {
        let mut mismatches = 0;
        for i in 0..expected.len().max(responses.len()) {
            let (got, want) = (responses.get(i), expected.get(i));
            if got != want {
                mismatches += 1;
                let show = |f: Option<&ResponseFrame>| f.map_or("<none>".to_string(), |f| f.to_hex());
                eprintln!("frame {i}: got {} expected {}", show(got), show(want));
            }
        }
        if mismatches > 0 {
            return Err(Exit(EXIT_GOLDEN, format!("{mismatches} responses differ from golden")).into());
        }
        writeln!(out, "golden: {} responses match", expected.len())?;
    }
    Ok(())
}

fn cmd_serve(bind: &str, port: u16, scenario: Option<&Path>, once: bool) -> anyhow::Result<()> {
    let config = scenario.map(load_scenario).transpose()?.unwrap_or_default();
    let listener = TcpListener::bind((bind, port)).with_context(|| format!("binding {bind}:{port}"))?;
    eprintln!("listening on {}", listener.local_addr()?);
    if once {
        wire::serve_one(&listener, &config)?;
    } else {
        wire::serve(&listener, &config)?;
    }
    Ok(())
}

fn cmd_gen_frames(seed: u64, count: usize, as_scenario: bool) -> anyhow::Result<()> {
    let frames = TrafficGen::new(seed, Default::default()).frames(count);
    let mut out = io::stdout().lock();
    if as_scenario {
        let s = Scenario::default().with_frames(frames, Scenario::default().default_gap);
        writeln!(out, "{}", s.to_json())?;
    } else {
        for f in frames {
            writeln!(out, "{f}")?;
        }
    }
    Ok(())
}

fn cmd_reproduce(seed: u64) -> anyhow::Result<()> {
    use bridge_sim::bus_types::{encode_command, AhbRequest, TransType};

    let write = |prdata, haddr, hwdata, htrans| {
        encode_command(&AhbRequest {
            prdata,
            haddr,
            hwdata,
            htrans,
            hreadyin: true,
            hwrite: true,
        })
    };
    let mut failures = 0;
    let mut report = |name: &str, ok: bool, detail: String| {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        failures += !ok as u32;
    };

    let out = run(&Scenario::default().with_frames([write(0x1234_5678, 0x8C00_0000, 0x8765_4321, TransType::NonSeq)], 8))?;
    let r = decode_response(out.responses[0]);
    report(
        "reference_frame",
        (r.hrdata, r.paddr, r.pwdata, r.pwrite, r.penable, r.hreadyout)
            == (0x1234_5678, 0x8C00_0000, 0x8765_4321, true, true, true),
        describe(out.responses[0]),
    );

    let out = run(&Scenario::default().with_frames([write(0x5678_1234, 0x8000_000C, 0xFFFF_FFFF, TransType::Seq)], 8))?;
    let en = out.trace.samples("Penableout").unwrap_or_default();
    let cycles: Vec<usize> = en.iter().enumerate().filter(|(_, &v)| v == 1).map(|(i, _)| i).collect();
    let at = |name: &str| cycles.first().and_then(|&c| out.trace.value_at(name, c as u64));
    report(
        "single_write",
        cycles.len() == 1
            && at("Paddrout") == Some(0x8000_000C)
            && at("Pwriteout") == Some(1)
            && at("Pselxout") == Some(1)
            && out.trace.samples("Hresp").unwrap_or_default().iter().all(|&v| v == 0),
        format!("enable cycles {cycles:?}"),
    );

    let mut thr = Vec::new();
    for n in 1..=16u32 {
        let frames = (0..n).map(|i| write(i, 0x8000_0000 + 4 * i, i, TransType::NonSeq));
        let s = Scenario {
            transport: "direct".into(),
            ..Scenario::default()
        }
        .with_frames(frames, 0);
        let t = run(&s)?.trace;
        let state = t.samples("state").unwrap_or_default();
        let pen = t.samples("Penable").unwrap_or_default();
        let first = state.iter().position(|&s| s != 0).unwrap_or(0);
        let last = pen.iter().rposition(|&v| v == 1).unwrap_or(0);
        thr.push(((last + 1).saturating_sub(first) as u32, 2 * n + 1));
    }
    report(
        "pipelined_writes",
        thr.iter().all(|(got, want)| got == want),
        format!("{:?}", thr.iter().map(|t| t.0).collect::<Vec<_>>()),
    );

    let frames = TrafficGen::new(seed, Default::default()).frames(10_000);
    let s = Scenario {
        transport: "direct".into(),
        ..Scenario::default()
    }
    .with_frames(frames, 0);
    let violations = check_protocol(&run(&s)?.trace).unwrap_or_default();
    report("apb_monitor", violations.is_empty(), format!("10000 frames, {} violations", violations.len()));

    if failures > 0 {
        bail!("{failures} checks failed");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_PARSE } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Run {
            scenario,
            vcd,
            csv,
            golden,
            dump_peripherals,
        } => cmd_run(scenario, vcd.as_deref(), csv.as_deref(), golden.as_deref(), dump_peripherals.as_deref()),
        Command::Serve {
            port,
            bind,
            scenario,
            once,
        } => cmd_serve(bind, *port, scenario.as_deref(), *once),
        Command::FsmExport { format: GraphFormat::Dot } => {
            print!("{}", to_dot());
            Ok(())
        }
        Command::GenFrames { seed, count, scenario } => cmd_gen_frames(*seed, *count, *scenario),
        Command::Reproduce { seed } => cmd_reproduce(*seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.downcast_ref::<Exit>().map_or(1, |x| x.0))
        }
    }
}

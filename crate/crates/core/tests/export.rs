// SPDX-License-Identifier: Apache-2.0

mod support;

use bridge_sim::engine::{export_csv, export_vcd, run, Scenario, Trace, SIGNALS};
use bridge_sim::random::TrafficGen;
use bridge_sim::registry;
use bridge_sim::slave_if::DecodeMap;
use support::parse_vcd;

fn random_trace(seed: u64) -> Trace {
    let frames = TrafficGen::new(seed, DecodeMap::default()).frames(40);
    let s = Scenario {
        transport: "direct".into(),
        ..Scenario::default()
    }
    .with_frames(frames, 1);
    run(&s).unwrap().trace
}

#[test]
fn csv_rows_match_trace() {
    let trace = random_trace(3);
    let text = String::from_utf8(export_csv(&trace)).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let names: Vec<&str> = SIGNALS.iter().map(|s| s.0).collect();
    assert_eq!(header, names);
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len() as u64, trace.cycles());
    for (cycle, row) in rows.iter().enumerate() {
        for (name, cell) in names.iter().zip(row.split(',')) {
            let v = u64::from_str_radix(cell, 16).unwrap();
            assert_eq!(Some(v), trace.value_at(name, cycle as u64), "{name} at {cycle}");
        }
    }
}

#[test]
fn vcd_reproduces_random_trace() {
    for seed in 0..4 {
        let trace = random_trace(seed);
        let vcd = parse_vcd(std::str::from_utf8(&export_vcd(&trace)).unwrap()).unwrap();
        assert_eq!(vcd.scopes, ["bridge"]);
        for sig in trace.signals() {
            assert_eq!(vcd.changes[&sig.name], sig.changes, "{}", sig.name);
        }
        assert_eq!(vcd.end_time, trace.cycles());
    }
}

#[test]
fn empty_trace_exports() {
    let trace = Trace::new(SIGNALS);
    let vcd = parse_vcd(std::str::from_utf8(&export_vcd(&trace)).unwrap()).unwrap();
    assert_eq!(vcd.vars.len(), SIGNALS.len());
    assert!(vcd.changes.values().all(Vec::is_empty));
    let csv = String::from_utf8(export_csv(&trace)).unwrap();
    assert_eq!(csv.lines().count(), 1);
}

#[test]
fn exporters_by_name() {
    let trace = random_trace(9);
    let reg = registry::exporters();
    assert_eq!(reg.names(), ["vcd", "csv"]);
    for (name, direct) in [("vcd", export_vcd(&trace)), ("csv", export_csv(&trace))] {
        let mut buf = Vec::new();
        reg.create(name, &()).unwrap().export(&trace, &mut buf).unwrap();
        assert_eq!(buf, direct);
    }
    assert!(reg.create("fst", &()).is_err());
}

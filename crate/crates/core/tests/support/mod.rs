// SPDX-License-Identifier: Apache-2.0

//! Test-only oracles. Nothing here calls into the codec or exporter under
//! test; frames are built as text bit strings and VCD is parsed from scratch.

#![allow(dead_code)]

use std::collections::BTreeMap;

/// Fields of a command frame as plain integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CmdFields {
    pub prdata: u32,
    pub haddr: u32,
    pub hwdata: u32,
    pub htrans: u8,
    pub hreadyin: u8,
    pub hwrite: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RspFields {
    pub hrdata: u32,
    pub paddr: u32,
    pub pwdata: u32,
    pub pselx: u8,
    pub hresp: u8,
    pub hreadyout: u8,
    pub pwrite: u8,
    pub penable: u8,
}

/// Command layout, MSB first: name and width.
pub const CMD_LAYOUT: [(&str, usize); 6] = [
    ("prdata", 32),
    ("haddr", 32),
    ("hwdata", 32),
    ("htrans", 2),
    ("hreadyin", 1),
    ("hwrite", 1),
];

pub const RSP_LAYOUT: [(&str, usize); 8] = [
    ("hrdata", 32),
    ("paddr", 32),
    ("pwdata", 32),
    ("pselx", 3),
    ("hresp", 2),
    ("hreadyout", 1),
    ("pwrite", 1),
    ("penable", 1),
];

fn bin(v: u64, width: usize) -> String {
    format!("{v:0width$b}")
}

pub fn cmd_bits(f: &CmdFields) -> String {
    [
        bin(f.prdata as u64, 32),
        bin(f.haddr as u64, 32),
        bin(f.hwdata as u64, 32),
        bin(f.htrans as u64, 2),
        bin(f.hreadyin as u64, 1),
        bin(f.hwrite as u64, 1),
    ]
    .concat()
}

pub fn rsp_bits(f: &RspFields) -> String {
    [
        bin(f.hrdata as u64, 32),
        bin(f.paddr as u64, 32),
        bin(f.pwdata as u64, 32),
        bin(f.pselx as u64, 3),
        bin(f.hresp as u64, 2),
        bin(f.hreadyout as u64, 1),
        bin(f.pwrite as u64, 1),
        bin(f.penable as u64, 1),
    ]
    .concat()
}

/// Slices a bit string by layout into field values.
pub fn slice(bits: &str, layout: &[(&str, usize)]) -> Vec<u64> {
    let mut pos = 0;
    layout
        .iter()
        .map(|&(_, w)| {
            let v = u64::from_str_radix(&bits[pos..pos + w], 2).unwrap();
            pos += w;
            v
        })
        .collect()
}

pub fn cmd_from_bits(bits: &str) -> CmdFields {
    let v = slice(bits, &CMD_LAYOUT);
    CmdFields {
        prdata: v[0] as u32,
        haddr: v[1] as u32,
        hwdata: v[2] as u32,
        htrans: v[3] as u8,
        hreadyin: v[4] as u8,
        hwrite: v[5] as u8,
    }
}

pub fn rsp_from_bits(bits: &str) -> RspFields {
    let v = slice(bits, &RSP_LAYOUT);
    RspFields {
        hrdata: v[0] as u32,
        paddr: v[1] as u32,
        pwdata: v[2] as u32,
        pselx: v[3] as u8,
        hresp: v[4] as u8,
        hreadyout: v[5] as u8,
        pwrite: v[6] as u8,
        penable: v[7] as u8,
    }
}

/// Left-pads to 104 bits and renders four bits per lowercase hex digit.
pub fn bits_to_hex(bits: &str) -> String {
    let padded = format!("{bits:0>104}");
    padded
        .as_bytes()
        .chunks(4)
        .map(|nib| {
            let n = nib.iter().fold(0u32, |acc, &b| acc * 2 + (b - b'0') as u32);
            char::from_digit(n, 16).unwrap()
        })
        .collect()
}

pub fn bools_to_bits(bits: impl IntoIterator<Item = bool>) -> String {
    bits.into_iter().map(|b| if b { '1' } else { '0' }).collect()
}

/// One row of the committed FSM truth table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FsmRow {
    pub state: String,
    pub valid: bool,
    pub hwrite: bool,
    pub hwritereg: bool,
    pub next: String,
}

pub fn load_fsm_fixture() -> Vec<FsmRow> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/fsm_truth_table.txt");
    let text = std::fs::read_to_string(path).expect("fixture present");
    text.lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            assert_eq!(f.len(), 5, "bad fixture line {l:?}");
            let flag = |s: &str| match s {
                "0" => false,
                "1" => true,
                _ => panic!("bad flag {s:?}"),
            };
            FsmRow {
                state: f[0].to_string(),
                valid: flag(f[1]),
                hwrite: flag(f[2]),
                hwritereg: flag(f[3]),
                next: f[4].to_string(),
            }
        })
        .collect()
}

/// Every node reaches every other node.
pub fn strongly_connected(nodes: &[String], edges: &[(String, String)]) -> bool {
    let reach = |start: &str, forward: bool| {
        let mut seen = vec![start.to_string()];
        let mut queue = std::collections::VecDeque::from([start.to_string()]);
        while let Some(n) = queue.pop_front() {
            for (a, b) in edges {
                let (src, dst) = if forward { (a, b) } else { (b, a) };
                if *src == n && !seen.contains(dst) {
                    seen.push(dst.clone());
                    queue.push_back(dst.clone());
                }
            }
        }
        seen.len()
    };
    let Some(first) = nodes.first() else { return true };
    reach(first, true) == nodes.len() && reach(first, false) == nodes.len()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VcdVar {
    pub name: String,
    pub width: u32,
}

/// Parsed VCD: declared variables and their changes keyed by signal name.
#[derive(Debug, Default)]
pub struct Vcd {
    pub timescale: String,
    pub scopes: Vec<String>,
    pub vars: Vec<VcdVar>,
    pub changes: BTreeMap<String, Vec<(u64, u64)>>,
    pub end_time: u64,
}

impl Vcd {
    /// Value of `name` at `time`, holding the last change.
    pub fn value_at(&self, name: &str, time: u64) -> Option<u64> {
        self.changes
            .get(name)?
            .iter()
            .take_while(|&&(t, _)| t <= time)
            .last()
            .map(|&(_, v)| v)
    }
}

/// A strict reader for the subset of IEEE 1364 VCD used by two-state
/// simulators. Rejects undeclared identifiers, x/z values, values wider
/// than their declaration and timestamps that go backwards.
pub fn parse_vcd(text: &str) -> Result<Vcd, String> {
    let mut vcd = Vcd::default();
    let mut ids: BTreeMap<String, VcdVar> = BTreeMap::new();
    let mut tokens = text.split_whitespace().peekable();

    // header
    let mut defined = false;
    while let Some(tok) = tokens.next() {
        let mut body = Vec::new();
        if !tok.starts_with('$') {
            return Err(format!("unexpected token {tok:?} in header"));
        }
        for t in tokens.by_ref() {
            if t == "$end" {
                break;
            }
            body.push(t);
        }
        match tok {
            "$timescale" => vcd.timescale = body.concat(),
            "$scope" => {
                if body.len() != 2 {
                    return Err(format!("bad $scope {body:?}"));
                }
                vcd.scopes.push(body[1].to_string());
            }
            "$var" => {
                if body.len() < 4 {
                    return Err(format!("bad $var {body:?}"));
                }
                let width: u32 = body[1].parse().map_err(|_| format!("bad width {:?}", body[1]))?;
                let var = VcdVar {
                    name: body[3].to_string(),
                    width,
                };
                if ids.insert(body[2].to_string(), var.clone()).is_some() {
                    return Err(format!("duplicate id {:?}", body[2]));
                }
                vcd.changes.insert(var.name.clone(), Vec::new());
                vcd.vars.push(var);
            }
            "$enddefinitions" => {
                defined = true;
                break;
            }
            "$version" | "$date" | "$comment" | "$upscope" => {}
            other => return Err(format!("unknown keyword {other}")),
        }
    }
    if !defined {
        return Err("missing $enddefinitions".into());
    }

    let mut time: Option<u64> = None;
    let record = |vcd: &mut Vcd, time: Option<u64>, id: &str, digits: &str| -> Result<(), String> {
        let t = time.ok_or("value change before first timestamp")?;
        let var = ids.get(id).ok_or_else(|| format!("undeclared id {id:?}"))?;
        if digits.is_empty() || digits.len() > var.width as usize {
            return Err(format!("{} value {digits:?} does not fit {} bits", var.name, var.width));
        }
        let v = u64::from_str_radix(digits, 2).map_err(|_| format!("non-binary value {digits:?}"))?;
        let list = vcd.changes.get_mut(&var.name).unwrap();
        match list.last_mut() {
            Some(last) if last.0 == t => last.1 = v,
            _ => list.push((t, v)),
        }
        Ok(())
    };
    while let Some(tok) = tokens.next() {
        if let Some(ts) = tok.strip_prefix('#') {
            let t: u64 = ts.parse().map_err(|_| format!("bad timestamp {tok:?}"))?;
            if time.is_some_and(|prev| t < prev) {
                return Err(format!("time goes backwards at #{t}"));
            }
            time = Some(t);
            vcd.end_time = t;
        } else if tok == "$dumpvars" || tok == "$end" {
        } else if let Some(digits) = tok.strip_prefix('b') {
            let id = tokens.next().ok_or("vector value without id")?;
            record(&mut vcd, time, id, digits)?;
        } else {
            let (v, id) = tok.split_at(1);
            if v != "0" && v != "1" {
                return Err(format!("unsupported scalar {tok:?}"));
            }
            record(&mut vcd, time, id, v)?;
        }
    }
    Ok(vcd)
}

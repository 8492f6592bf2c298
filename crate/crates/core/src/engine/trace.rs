// SPDX-License-Identifier: Apache-2.0

//! Per-cycle signal history stored as value changes.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignalTrace {
    pub name: String,
    pub width: u32,
    /// `(cycle, value)` pairs, strictly increasing in cycle.
    pub changes: Vec<(u64, u64)>,
}

impl SignalTrace {
    /// Value held at `cycle`, if the signal had been recorded by then.
    pub fn value_at(&self, cycle: u64) -> Option<u64> {
        let idx = self.changes.partition_point(|&(c, _)| c <= cycle);
        idx.checked_sub(1).map(|i| self.changes[i].1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trace {
    signals: Vec<SignalTrace>,
    cycles: u64,
}

impl Trace {
    pub fn new(defs: &[(&str, u32)]) -> Self {
        let signals = defs
            .iter()
            .map(|&(name, width)| {
                assert!((1..=64).contains(&width), "signal {name} width {width}");
                SignalTrace {
                    name: name.to_string(),
                    width,
                    changes: Vec::new(),
                }
            })
            .collect();
        Self { signals, cycles: 0 }
    }

    /// Appends one cycle. `values` follows the signal declaration order.
    pub fn push_cycle(&mut self, values: &[u64]) {
        assert_eq!(values.len(), self.signals.len(), "one value per signal");
        let cycle = self.cycles;
        for (sig, &v) in self.signals.iter_mut().zip(values) {
            let mask = if sig.width == 64 { u64::MAX } else { (1u64 << sig.width) - 1 };
            debug_assert_eq!(v & !mask, 0, "{} = {v:#x} exceeds {} bits", sig.name, sig.width);
            let v = v & mask;
            if sig.changes.last().is_none_or(|&(_, last)| last != v) {
                sig.changes.push((cycle, v));
            }
        }
        self.cycles += 1;
    }

    pub fn cycles(&self) -> u64 {
        self.cycles
    }

    pub fn signals(&self) -> &[SignalTrace] {
        &self.signals
    }

    pub fn signal(&self, name: &str) -> Option<&SignalTrace> {
        self.signals.iter().find(|s| s.name == name)
    }

    pub fn value_at(&self, name: &str, cycle: u64) -> Option<u64> {
        if cycle >= self.cycles {
            return None;
        }
        self.signal(name)?.value_at(cycle)
    }

    /// Every cycle's value of one signal.
    pub fn samples(&self, name: &str) -> Option<Vec<u64>> {
        let sig = self.signal(name)?;
        let mut out = Vec::with_capacity(self.cycles as usize);
        let mut it = sig.changes.iter().peekable();
        let mut cur = 0;
        for cycle in 0..self.cycles {
            while let Some(&&(c, v)) = it.peek() {
                if c > cycle {
                    break;
                }
                cur = v;
                it.next();
            }
            out.push(cur);
        }
        Some(out)
    }

    /// Walks the listed signals cycle by cycle without expanding them.
    pub fn walk<'a>(&'a self, names: &[&str]) -> Option<Walker<'a>> {
        let sigs = names
            .iter()
            .map(|n| self.signal(n))
            .collect::<Option<Vec<_>>>()?;
        Some(Walker {
            cursors: vec![0; sigs.len()],
            values: vec![0; sigs.len()],
            sigs,
            cycle: 0,
            end: self.cycles,
        })
    }
}

pub struct Walker<'a> {
    sigs: Vec<&'a SignalTrace>,
    cursors: Vec<usize>,
    values: Vec<u64>,
    cycle: u64,
    end: u64,
}

impl Walker<'_> {
    /// Advances one cycle, returning the cycle index and the values.
    pub fn next_cycle(&mut self) -> Option<(u64, &[u64])> {
        if self.cycle >= self.end {
            return None;
        }
        let cycle = self.cycle;
        for ((sig, cur), val) in self.sigs.iter().zip(&mut self.cursors).zip(&mut self.values) {
            while let Some(&(c, v)) = sig.changes.get(*cur) {
                if c > cycle {
                    break;
                }
                *val = v;
                *cur += 1;
            }
        }
        self.cycle += 1;
        Some((cycle, &self.values))
    }
}

use std::io::Write;

use super::metrics::Metrics;
use crate::allocator::Multipliers;
use crate::error::Result;

/// Column names of the metrics trace. Indices are 1-based.
pub fn trace_header(num_sus: usize, num_channels: usize) -> Vec<String> {
    let mut h = vec!["slot".to_string(), "c2_avg".to_string()];
    h.extend((1..=num_sus).map(|m| format!("p2_avg_{m}")));
    h.extend((1..=num_channels).map(|k| format!("p1_avg_{k}")));
    h.extend((1..=num_channels).map(|k| format!("r1_avg_{k}")));
    h.push("eps1_avg".into());
    h.extend((1..=num_sus).map(|m| format!("pi_{m}")));
    h.extend((1..=num_channels).map(|k| format!("theta_{k}")));
    h.extend((1..=num_channels).map(|k| format!("rho_{k}")));
    h
}

/// One trace row: running averages from slot 0 and the multipliers after
/// the slot's update.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub slot: usize,
    pub c2_avg: Option<f64>,
    pub p2_avg: Vec<Option<f64>>,
    pub p1_avg: Vec<Option<f64>>,
    pub r1_avg: Vec<Option<f64>>,
    pub eps1_avg: Option<f64>,
    pub lambda: Multipliers,
}

impl TraceRow {
    pub fn new(slot: usize, m: &Metrics, lambda: &Multipliers) -> Self {
        TraceRow {
            slot,
            c2_avg: m.c2_avg(),
            p2_avg: (0..m.num_sus()).map(|i| m.p2_avg(i)).collect(),
            p1_avg: (0..m.num_channels()).map(|k| m.p1_avg(k)).collect(),
            r1_avg: (0..m.num_channels()).map(|k| m.r1_avg(k)).collect(),
            eps1_avg: m.eps1_avg(),
            lambda: lambda.clone(),
        }
    }

    fn fields(&self) -> Vec<String> {
        let opt = |x: &Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        let mut f = vec![self.slot.to_string(), opt(&self.c2_avg)];
        f.extend(self.p2_avg.iter().map(opt));
        f.extend(self.p1_avg.iter().map(opt));
        f.extend(self.r1_avg.iter().map(opt));
        f.push(opt(&self.eps1_avg));
        let l = &self.lambda;
        f.extend(l.pi.iter().chain(&l.theta).chain(&l.rho).map(|v| v.to_string()));
        f
    }
}

/// CSV writer for trace rows; undefined averages are empty fields.
pub struct TraceWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(out: W, num_sus: usize, num_channels: usize) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(out);
        inner.write_record(trace_header(num_sus, num_channels))?;
        Ok(TraceWriter { inner })
    }

    pub fn write(&mut self, row: &TraceRow) -> Result<()> {
        self.inner.write_record(row.fields())?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

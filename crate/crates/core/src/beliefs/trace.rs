//! Line-delimited JSON dump of beliefs, one record per (slot, entity).

use std::io::Write;

use serde::Serialize;

use super::{BeliefState, SpBelief, SuBelief};
use crate::error::Result;

#[derive(Serialize)]
#[serde(tag = "entity", rename_all = "snake_case")]
enum Record<'a> {
    Activity {
        slot: usize,
        channel: usize,
        q: f64,
    },
    SuGain {
        slot: usize,
        channel: usize,
        user: usize,
        #[serde(flatten)]
        belief: &'a SuBelief,
    },
    SpGain {
        slot: usize,
        channel: usize,
        user: usize,
        #[serde(flatten)]
        belief: &'a SpBelief,
    },
}

/// Appends the records of one slot. Channel and user indices are 1-based.
pub fn write_slot<W: Write>(out: &mut W, slot: usize, beliefs: &BeliefState, num_sus: usize) -> Result<()> {
    for (k, &q) in beliefs.activity.iter().enumerate() {
        serde_json::to_writer(
            &mut *out,
            &Record::Activity {
                slot,
                channel: k + 1,
                q,
            },
        )?;
        out.write_all(b"\n")?;
    }
    for (l, (su, sp)) in beliefs.su.iter().zip(&beliefs.sp).enumerate() {
        let (channel, user) = (l / num_sus + 1, l % num_sus + 1);
        serde_json::to_writer(
            &mut *out,
            &Record::SuGain {
                slot,
                channel,
                user,
                belief: su,
            },
        )?;
        out.write_all(b"\n")?;
        serde_json::to_writer(
            &mut *out,
            &Record::SpGain {
                slot,
                channel,
                user,
                belief: sp,
            },
        )?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beliefs::QuadratureSpec;

    #[test]
    fn one_line_per_entity() {
        let b = BeliefState::new(
            vec![0.9],
            vec![SuBelief::TruncatedExp {
                lower: 0.0,
                upper: 1.0,
                mean: 2.0,
            }],
            vec![SpBelief::Gaussian {
                mean: [0.1, 0.2],
                var: 0.3,
            }],
            QuadratureSpec::default(),
        );
        let mut buf = Vec::new();
        write_slot(&mut buf, 7, &b, 1).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        let v: serde_json::Value = serde_json::from_str(lines[2]).unwrap();
        assert_eq!(v["entity"], "sp_gain");
        assert_eq!(v["family"], "gaussian");
        assert_eq!(v["slot"], 7);
        assert_eq!(v["var"], 0.3);
    }
}

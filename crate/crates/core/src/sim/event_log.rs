//! Per-slot protocol event log.

use std::io::Write;

use crate::access::AccessConfig;
use crate::error::Result;

pub const EVENT_LOG_HEADER: [&str; 5] = ["slot", "lap_id", "event", "config_index", "channels"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Activate,
    Pilot,
    Cs,
    Tx,
    Ack,
    DeadlineDrop,
}

impl EventKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::Activate => "activate",
            EventKind::Pilot => "pilot",
            EventKind::Cs => "cs",
            EventKind::Tx => "tx",
            EventKind::Ack => "ack",
            EventKind::DeadlineDrop => "deadline_drop",
        }
    }
}

/// 1-based channel numbers joined with `;`.
pub fn channel_list(cfg: &AccessConfig) -> String {
    cfg.active_channels()
        .map(|m| (m + 1).to_string())
        .collect::<Vec<_>>()
        .join(";")
}

pub struct EventLog<W: Write> {
    writer: csv::Writer<W>,
}

impl<W: Write> EventLog<W> {
    pub fn new(inner: W) -> Result<Self> {
        let mut writer = csv::Writer::from_writer(inner);
        writer.write_record(EVENT_LOG_HEADER)?;
        Ok(Self { writer })
    }

    pub fn record(
        &mut self,
        slot: u64,
        lap: usize,
        kind: EventKind,
        cfg: Option<&AccessConfig>,
    ) -> Result<()> {
        let (index, channels) = match cfg {
            Some(c) => (c.index().to_string(), channel_list(c)),
            None => (String::new(), String::new()),
        };
        self.writer.write_record([
            slot.to_string().as_str(),
            lap.to_string().as_str(),
            kind.as_str(),
            index.as_str(),
            channels.as_str(),
        ])?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.writer.flush()?;
        Ok(())
    }

    pub fn into_inner(self) -> Result<W> {
        self.writer
            .into_inner()
            .map_err(|e| crate::error::Error::Io(e.into_error()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_formatted() {
        let mut log = EventLog::new(Vec::new()).unwrap();
        log.record(3, 1, EventKind::Pilot, None).unwrap();
        let cfg = AccessConfig::from_index(5, 3).unwrap();
        log.record(5, 1, EventKind::Tx, Some(&cfg)).unwrap();
        let text = String::from_utf8(log.into_inner().unwrap()).unwrap();
        assert_eq!(
            text,
            "slot,lap_id,event,config_index,channels\n3,1,pilot,,\n5,1,tx,5,1;3\n"
        );
    }
}

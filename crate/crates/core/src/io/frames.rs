//! JSON Lines frame files.

use std::io::{self, BufRead, Write};

use serde::Serialize;
use serde_json::ser::Formatter;

use crate::error::{Error, Result};
use crate::evolution::FrameRecord;

/// Formats a float with 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Compact JSON (the trait's default layout) with every float written by [`format_float`].
struct RoundTripFormatter;

impl Formatter for RoundTripFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` as one compact JSON line (without the newline).
pub fn to_json_line<T: Serialize>(value: &T) -> serde_json::Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, RoundTripFormatter);
    value.serialize(&mut ser)?;
    Ok(out)
}

/// Writes frames one per line, counting how many were written.
pub struct FrameWriter<W: Write> {
    inner: W,
    written: usize,
}

impl<W: Write> FrameWriter<W> {
    pub fn new(inner: W) -> Self {
        FrameWriter { inner, written: 0 }
    }

    pub fn written(&self) -> usize {
        self.written
    }

    pub fn write(&mut self, frame: &FrameRecord) -> Result<()> {
        let io_err = |frame: usize, e: &dyn std::fmt::Display| Error::Io { frame, message: e.to_string() };
        let mut line = to_json_line(frame).map_err(|e| io_err(self.written, &e))?;
        line.push(b'\n');
        self.inner.write_all(&line).map_err(|e| io_err(self.written, &e))?;
        self.written += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner
            .flush()
            .map_err(|e| Error::Io { frame: self.written, message: e.to_string() })?;
        Ok(self.inner)
    }
}

pub fn write_frames<W: Write>(frames: &[FrameRecord], destination: W) -> Result<()> {
    let mut w = FrameWriter::new(destination);
    for f in frames {
        w.write(f)?;
    }
    w.finish().map(drop)
}

/// Reads a frame file; blank lines are skipped.
pub fn read_frames<R: BufRead>(source: R) -> Result<Vec<FrameRecord>> {
    let mut frames = Vec::new();
    for (i, line) in source.lines().enumerate() {
        let line = line.map_err(|e| Error::Io { frame: frames.len(), message: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        let frame = serde_json::from_str(&line)
            .map_err(|e| Error::Io { frame: frames.len(), message: format!("line {}: {e}", i + 1) })?;
        frames.push(frame);
    }
    Ok(frames)
}

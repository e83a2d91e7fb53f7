//! Dataset files.
//!
//! Both forms hold one record per signal: id, label code, m, change index,
//! shift parameter, then the m values.
//!
//! * CSV: variable-width rows, empty fields for absent metadata. Floats are
//!   written in shortest round-trip form, so parsing recovers them exactly.
//! * Binary (little endian): magic `ANSG`, `u32` version, `u64` record count,
//!   then per record `u64 id, u8 label, u32 m, u8 has_change, u32 change,
//!   u8 has_shift, f64 shift, m × f64`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::signal::{AnomalyClass, Signal};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"ANSG";
const VERSION: u32 = 1;

pub fn write_csv<W: Write>(signals: &[Signal], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().flexible(true).has_headers(false).from_writer(out);
    let mut record = Vec::new();
    for s in signals {
        record.clear();
        record.push(s.id.to_string());
        record.push(s.label.code().to_string());
        record.push(s.values.len().to_string());
        record.push(s.change_index.map(|j| j.to_string()).unwrap_or_default());
        record.push(s.shift_param.map(|p| p.to_string()).unwrap_or_default());
        record.extend(s.values.iter().map(|v| v.to_string()));
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<Signal>> {
    let mut r = csv::ReaderBuilder::new().flexible(true).has_headers(false).from_reader(input);
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| Error::format("<csv>", format!("record {line}: {what}"));
        if rec.len() < 5 {
            return Err(bad("fewer than 5 fields"));
        }
        let id: u64 = rec[0].parse().map_err(|_| bad("id"))?;
        let code: u8 = rec[1].parse().map_err(|_| bad("label"))?;
        let label = AnomalyClass::from_code(code).ok_or_else(|| bad("label code"))?;
        let m: usize = rec[2].parse().map_err(|_| bad("m"))?;
        let change_index = match &rec[3] {
            "" => None,
            s => Some(s.parse().map_err(|_| bad("change index"))?),
        };
        let shift_param = match &rec[4] {
            "" => None,
            s => Some(s.parse().map_err(|_| bad("shift"))?),
        };
        if rec.len() != 5 + m {
            return Err(bad("value count does not match m"));
        }
        let values = rec.iter().skip(5).map(|v| v.parse::<f64>()).collect::<Result<Vec<_>, _>>();
        let values = values.map_err(|_| bad("value"))?;
        out.push(Signal { id, label, values, change_index, shift_param });
    }
    Ok(out)
}

pub fn write_binary<W: Write>(signals: &[Signal], mut out: W) -> std::io::Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(signals.len() as u64).to_le_bytes())?;
    for s in signals {
        out.write_all(&s.id.to_le_bytes())?;
        out.write_all(&[s.label.code()])?;
        out.write_all(&(s.values.len() as u32).to_le_bytes())?;
        out.write_all(&[s.change_index.is_some() as u8])?;
        out.write_all(&(s.change_index.unwrap_or(0) as u32).to_le_bytes())?;
        out.write_all(&[s.shift_param.is_some() as u8])?;
        out.write_all(&s.shift_param.unwrap_or(0.0).to_le_bytes())?;
        for v in &s.values {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    out.flush()
}

fn take<const N: usize, R: Read>(r: &mut R) -> std::io::Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

pub fn read_binary<R: Read>(mut input: R) -> Result<Vec<Signal>> {
    let io = |e| Error::io("<binary>", e);
    let bad = |what: &str| Error::format("<binary>", what.to_string());
    if &take::<4, _>(&mut input).map_err(io)? != MAGIC {
        return Err(bad("bad magic"));
    }
    let version = u32::from_le_bytes(take(&mut input).map_err(io)?);
    if version != VERSION {
        return Err(bad("unsupported version"));
    }
    let count = u64::from_le_bytes(take(&mut input).map_err(io)?);
    let mut out = Vec::with_capacity(count.min(1 << 20) as usize);
    for _ in 0..count {
        let id = u64::from_le_bytes(take(&mut input).map_err(io)?);
        let [code] = take::<1, _>(&mut input).map_err(io)?;
        let label = AnomalyClass::from_code(code).ok_or_else(|| bad("label code"))?;
        let m = u32::from_le_bytes(take(&mut input).map_err(io)?) as usize;
        let [has_change] = take::<1, _>(&mut input).map_err(io)?;
        let change = u32::from_le_bytes(take(&mut input).map_err(io)?) as usize;
        let [has_shift] = take::<1, _>(&mut input).map_err(io)?;
        let shift = f64::from_le_bytes(take(&mut input).map_err(io)?);
        let mut values = Vec::with_capacity(m);
        for _ in 0..m {
            values.push(f64::from_le_bytes(take(&mut input).map_err(io)?));
        }
        out.push(Signal {
            id,
            label,
            values,
            change_index: (has_change != 0).then_some(change),
            shift_param: (has_shift != 0).then_some(shift),
        });
    }
    Ok(out)
}

/// Writes by extension: `.csv` as CSV, anything else as binary.
pub fn save(signals: &[Signal], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let out = BufWriter::new(file);
    if is_csv(path) {
        write_csv(signals, out).map_err(|e| relabel(e, path))
    } else {
        write_binary(signals, out).map_err(|e| Error::io(path, e))
    }
}

pub fn load(path: &Path) -> Result<Vec<Signal>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let input = BufReader::new(file);
    let signals = if is_csv(path) { read_csv(input) } else { read_binary(input) };
    signals.map_err(|e| relabel(e, path))
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn relabel(err: Error, path: &Path) -> Error {
    match err {
        Error::Format { reason, .. } => Error::format(path, reason),
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{gen_dataset, DatasetSpec};
    use proptest::prelude::*;

    fn sample() -> Vec<Signal> {
        gen_dataset(&DatasetSpec { count_normal: 3, count_per_anomaly: 2, seed: 5, ..Default::default() })
    }

    #[test]
    fn binary_round_trip_is_exact() {
        let data = sample();
        let mut buf = Vec::new();
        write_binary(&data, &mut buf).unwrap();
        assert_eq!(read_binary(&buf[..]).unwrap(), data);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let data = sample();
        let mut buf = Vec::new();
        write_csv(&data, &mut buf).unwrap();
        assert_eq!(read_csv(&buf[..]).unwrap(), data);
    }

    #[test]
    fn csv_rejects_truncated_record() {
        let text = "0,0,100,,,1.0,2.0\n";
        assert!(matches!(read_csv(text.as_bytes()), Err(Error::Format { .. })));
    }

    #[test]
    fn binary_rejects_bad_magic() {
        assert!(read_binary(&b"XXXX\x01\0\0\0"[..]).is_err());
    }

    proptest! {
        #[test]
        fn csv_preserves_arbitrary_floats(values in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 100..=120)) {
            let s = Signal { id: 1, label: AnomalyClass::MeanShift, values, change_index: Some(30), shift_param: Some(0.1 + 0.2) };
            let mut buf = Vec::new();
            write_csv(std::slice::from_ref(&s), &mut buf).unwrap();
            prop_assert_eq!(read_csv(&buf[..]).unwrap(), vec![s]);
        }
    }
}

//! Normalized earthquake catalog CSV: `time,lat,lon,depth,magnitude`, one
//! event per row, ISO-8601 UTC timestamps.
//!
//! The JMA hypocenter bulletin maps onto this as origin time (converted from
//! JST to UTC), latitude and longitude in decimal degrees (the bulletin uses
//! degrees and minutes), depth in km, and the preferred magnitude.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime, SecondsFormat, Utc};
use semcell_core::geo::QuakeEvent;

use crate::error::{Error, Result};

pub const HEADER: [&str; 5] = ["time", "lat", "lon", "depth", "magnitude"];

#[derive(Debug, Clone, Default)]
pub struct CatalogOptions {
    /// Count and skip unparseable rows instead of failing.
    pub skip_bad_rows: bool,
    /// Drop events below this magnitude.
    pub min_magnitude: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct Catalog {
    /// Sorted by time; equal timestamps keep file order.
    pub events: Vec<QuakeEvent>,
    /// `(line, reason)` of rows skipped under `skip_bad_rows`.
    pub bad_rows: Vec<(u64, String)>,
    pub below_min_magnitude: usize,
}

/// Parses an ISO-8601 timestamp. Without an offset the time is taken as UTC;
/// a bare date means midnight UTC.
pub fn parse_time(s: &str) -> Option<i64> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.timestamp_millis());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(t.and_utc().timestamp_millis());
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|t| t.and_utc().timestamp_millis())
}

pub fn format_time(ms: i64) -> String {
    DateTime::<Utc>::from_timestamp_millis(ms)
        .map(|t| t.to_rfc3339_opts(SecondsFormat::AutoSi, true))
        .unwrap_or_else(|| ms.to_string())
}

pub fn parse_catalog(path: &Path, options: &CatalogOptions) -> Result<Catalog> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_catalog(file, path, options)
}

pub fn read_catalog<R: Read>(reader: R, path: &Path, options: &CatalogOptions) -> Result<Catalog> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .clone();
    if headers.iter().map(str::trim).ne(HEADER) {
        return Err(Error::parse(
            path,
            1,
            format!("expected header `{}`", HEADER.join(",")),
        ));
    }
    let mut catalog = Catalog::default();
    for record in rdr.records() {
        let (line, parsed) = match record {
            Ok(r) => {
                let line = r.position().map_or(0, |p| p.line());
                (line, parse_row(&r))
            }
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                (line, Err(e.to_string()))
            }
        };
        match parsed {
            Ok(event) => {
                if options.min_magnitude.is_some_and(|m| event.magnitude < m) {
                    catalog.below_min_magnitude += 1;
                } else {
                    catalog.events.push(event);
                }
            }
            Err(reason) if options.skip_bad_rows => catalog.bad_rows.push((line, reason)),
            Err(reason) => return Err(Error::parse(path, line, reason)),
        }
    }
    if !catalog.bad_rows.is_empty() {
        log::warn!(
            "{}: skipped {} bad row(s)",
            path.display(),
            catalog.bad_rows.len()
        );
    }
    catalog.events.sort_by_key(|e| e.time_ms);
    Ok(catalog)
}

fn parse_row(r: &csv::StringRecord) -> std::result::Result<QuakeEvent, String> {
    if r.len() != HEADER.len() {
        return Err(format!(
            "expected {} fields, found {}",
            HEADER.len(),
            r.len()
        ));
    }
    let time = parse_time(&r[0]).ok_or_else(|| format!("bad time {:?}", &r[0]))?;
    let num = |i: usize| -> std::result::Result<f64, String> {
        r[i].trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("bad {} {:?}", HEADER[i], &r[i]))
    };
    let (lat, lon, depth, mag) = (num(1)?, num(2)?, num(3)?, num(4)?);
    if depth < 0.0 {
        return Err(format!("negative depth {depth}"));
    }
    QuakeEvent::new(time, lat, lon, depth, mag).map_err(|e| e.to_string())
}

pub fn write_catalog<W: Write>(out: W, events: &[QuakeEvent]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for e in events {
        w.write_record([
            format_time(e.time_ms),
            crate::fmt::shortest(e.lat),
            crate::fmt::shortest(e.lon),
            crate::fmt::shortest(e.depth_km),
            crate::fmt::shortest(e.magnitude),
        ])?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(s: &str, options: &CatalogOptions) -> Result<Catalog> {
        read_catalog(s.as_bytes(), Path::new("cat.csv"), options)
    }

    const H: &str = "time,lat,lon,depth,magnitude\n";

    #[test]
    fn direct_parse() {
        let c = read(
            &format!("{H}2010-03-14T08:08:00Z,37.7,141.8,40,6.7\n"),
            &Default::default(),
        )
        .unwrap();
        let e = c.events[0];
        assert_eq!(e.time_ms, parse_time("2010-03-14T08:08:00+00:00").unwrap());
        assert_eq!(
            (e.lat, e.lon, e.depth_km, e.magnitude),
            (37.7, 141.8, 40.0, 6.7)
        );
    }

    #[test]
    fn rows_are_sorted_stably() {
        let c = read(
            &format!(
                "{H}2011-01-01T00:00:00Z,1,1,0,1\n2010-01-01T00:00:00Z,2,2,0,1\n2011-01-01T00:00:00Z,3,3,0,1\n"
            ),
            &Default::default(),
        )
        .unwrap();
        let lats: Vec<f64> = c.events.iter().map(|e| e.lat).collect();
        assert_eq!(lats, vec![2.0, 1.0, 3.0]);
    }

    #[test]
    fn out_of_range_names_the_line() {
        let err = read(
            &format!("{H}2010-01-01T00:00:00Z,1,1,0,1\n2010-01-01T00:00:00Z,95,1,0,1\n"),
            &Default::default(),
        )
        .unwrap_err();
        match err {
            Error::Parse { line, message, .. } => {
                assert_eq!(line, 3);
                assert!(message.contains("95"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn skip_bad_rows_and_min_magnitude() {
        let text = format!("{H}2010-01-01T00:00:00Z,1,1,0,5\nnot-a-time,1,1,0,1\n2010-01-02,1,1,0,2\n2010-01-03T00:00:00Z,1,1,0\n");
        assert!(read(&text, &Default::default()).is_err());
        let opts = CatalogOptions {
            skip_bad_rows: true,
            min_magnitude: Some(3.0),
        };
        let c = read(&text, &opts).unwrap();
        assert_eq!(c.events.len(), 1);
        assert_eq!(c.below_min_magnitude, 1);
        assert_eq!(
            c.bad_rows.iter().map(|(l, _)| *l).collect::<Vec<_>>(),
            vec![3, 5]
        );
    }

    #[test]
    fn wrong_header() {
        assert!(read("t,lat,lon,depth,mag\n", &Default::default()).is_err());
    }

    #[test]
    fn time_forms() {
        let z = parse_time("2024-01-01T07:10:09Z").unwrap();
        assert_eq!(parse_time("2024-01-01T16:10:09+09:00"), Some(z));
        assert_eq!(parse_time("2024-01-01T07:10:09"), Some(z));
        assert_eq!(parse_time("2024-01-01 07:10:09.0"), Some(z));
        assert_eq!(
            parse_time("2024-01-01"),
            Some(z - (7 * 3600 + 10 * 60 + 9) * 1000)
        );
        assert_eq!(format_time(z), "2024-01-01T07:10:09Z");
        assert_eq!(parse_time("yesterday"), None);
    }

    #[test]
    fn write_then_read() {
        let events = vec![QuakeEvent::new(
            parse_time("2001-02-03T04:05:06.5Z").unwrap(),
            -1.25,
            179.5,
            10.0,
            6.1,
        )
        .unwrap()];
        let mut buf = Vec::new();
        write_catalog(&mut buf, &events).unwrap();
        let back = read(std::str::from_utf8(&buf).unwrap(), &Default::default()).unwrap();
        assert_eq!(back.events, events);
    }
}

//! Text snapshots of a field.
//!
//! ```text
//! etdkit-snapshot 1
//! time 0.5
//! sizes 64 64
//! domain 0 30 0 30
//! components 2
//! data
//! 0.25 0
//! ...
//! ```
//!
//! After `data` come `components · Π sizes` lines `re im`, component by
//! component, x fastest. Numbers are shortest round-trip decimals.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const SNAPSHOT_VERSION: u32 = 1;
const MAGIC: &str = "etdkit-snapshot";

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub sizes: Vec<usize>,
    pub domain: Vec<(f64, f64)>,
    pub components: usize,
    pub data: Vec<Complex64>,
}

impl Snapshot {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{MAGIC} {SNAPSHOT_VERSION}");
        let _ = writeln!(s, "time {}", self.time);
        let sizes: Vec<String> = self.sizes.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(s, "sizes {}", sizes.join(" "));
        let dom: Vec<String> = self
            .domain
            .iter()
            .flat_map(|(a, b)| [a.to_string(), b.to_string()])
            .collect();
        let _ = writeln!(s, "domain {}", dom.join(" "));
        let _ = writeln!(s, "components {}", self.components);
        s.push_str("data\n");
        for z in &self.data {
            let _ = writeln!(s, "{} {}", z.re, z.im);
        }
        s
    }

    pub fn parse(text: &str, source: &str) -> Result<Snapshot> {
        let err = |line: usize, m: String| Error::Parse {
            source_name: source.to_string(),
            line,
            column: 1,
            message: m,
        };
        let mut lines = text.lines().enumerate();
        let mut next = |what: &str| -> Result<(usize, Vec<&str>)> {
            let (i, l) = lines
                .next()
                .ok_or_else(|| err(0, format!("unexpected end of file, expected {what}")))?;
            let mut parts = l.split_whitespace();
            match parts.next() {
                Some(k) if k == what => Ok((i + 1, parts.collect())),
                _ => Err(err(i + 1, format!("expected `{what}`"))),
            }
        };
        let (ln, v) = next(MAGIC)?;
        if v != [SNAPSHOT_VERSION.to_string()] {
            return Err(err(ln, format!("unsupported snapshot version {v:?}")));
        }
        let num = |ln: usize, s: &str| -> Result<f64> {
            s.parse().map_err(|_| err(ln, format!("bad number `{s}`")))
        };
        let (ln, v) = next("time")?;
        let time = num(ln, v.first().copied().unwrap_or(""))?;
        let (ln, v) = next("sizes")?;
        let sizes = v
            .iter()
            .map(|s| s.parse().map_err(|_| err(ln, format!("bad size `{s}`"))))
            .collect::<Result<Vec<usize>>>()?;
        let (ln, v) = next("domain")?;
        let d = v.iter().map(|s| num(ln, s)).collect::<Result<Vec<f64>>>()?;
        if d.len() != 2 * sizes.len() {
            return Err(err(ln, "domain needs two bounds per axis".into()));
        }
        let domain = d.chunks(2).map(|c| (c[0], c[1])).collect();
        let (ln, v) = next("components")?;
        let components: usize = v
            .first()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| err(ln, "bad component count".into()))?;
        next("data")?;
        let mut data = Vec::new();
        for (i, l) in lines {
            let p: Vec<&str> = l.split_whitespace().collect();
            if p.is_empty() {
                continue;
            }
            if p.len() != 2 {
                return Err(err(i + 1, "expected `re im`".into()));
            }
            data.push(Complex64::new(num(i + 1, p[0])?, num(i + 1, p[1])?));
        }
        let expected = components * sizes.iter().product::<usize>();
        if data.len() != expected {
            return Err(Error::Dimension(format!(
                "{source}: {} data lines, expected {expected}",
                data.len()
            )));
        }
        Ok(Snapshot {
            time,
            sizes,
            domain,
            components,
            data,
        })
    }
}

pub fn write_snapshot(path: impl AsRef<Path>, snap: &Snapshot) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, snap.to_text()).map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<Snapshot> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Snapshot::parse(&text, &path.display().to_string())
}

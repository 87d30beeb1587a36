//! Output assembly: provenance, JSON and CSV writers.

use std::io::Write;

use hdrflow::algebra::{Field, Mat};
use hdrflow::flow::TwistMode;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub p: u32,
    pub s: u32,
    pub modulus: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub twist_mode: Option<TwistMode>,
}

impl Provenance {
    pub fn new(k: &Field, twist: Option<TwistMode>) -> Provenance {
        Provenance {
            tool: "hdrflow",
            version: env!("CARGO_PKG_VERSION"),
            p: k.p(),
            s: k.s(),
            modulus: k.modulus_string(),
            seed: k.seed(),
            twist_mode: twist,
        }
    }

    fn header_lines(&self) -> Vec<String> {
        let mut v = vec![
            format!("# tool={} version={}", self.tool, self.version),
            format!("# p={} s={} modulus={} seed={}", self.p, self.s, self.modulus, self.seed),
        ];
        if let Some(t) = self.twist_mode {
            v.push(format!("# twist_mode={}", serde_json::to_value(t).unwrap().as_str().unwrap()));
        }
        v
    }
}

pub fn json_string<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s
}

/// CSV with `#` provenance lines, a header row, then the records.
pub fn csv_string(prov: &Provenance, extra: &[String], header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = Vec::new();
    for l in prov.header_lines().iter().chain(extra) {
        writeln!(out, "{l}").unwrap();
    }
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(header).unwrap();
        for r in rows {
            w.write_record(r).unwrap();
        }
        w.flush().unwrap();
    }
    String::from_utf8(out).unwrap()
}

pub fn mat_strings(m: &Mat) -> Vec<Vec<String>> {
    (0..m.dim()).map(|i| (0..m.dim()).map(|j| m[(i, j)].to_string()).collect()).collect()
}
